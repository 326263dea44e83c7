//! Batch runner over every finite construction the library checks.
//!
//! Each item runs a module pipeline with pinned parameters and yields an
//! [`ItemReport`]. Items run concurrently; a failing or erroring item does
//! not affect the others, and reports come back in registry order. Reports
//! carry no timings, so a rerun with the same seed is byte-identical.

use std::collections::BTreeSet;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::arity::{
    arity_witness_search, canned, set_system_levels, verify_set_systems, verify_witness, JohnsonOrbitReps,
    SearchOutcome,
};
use crate::config::Caps;
use crate::distality::{
    build_nondistal_witness, check_nondistal_witness, random_strong_instances, strong_distality_check,
    verify_parity_identity, DistalityInstance,
};
use crate::error::{Error, Result};
use crate::generators::cherlin_lachlan::{code_name, code_representative, orbit_code};
use crate::generators::{gen_cherlin_lachlan, gen_hypergraph, gen_johnson, parity_reduct, HypergraphMode};
use crate::johnson_homogeneity::{
    definability_bound_n, extend_to_injection, induction_failure, pigeonhole_check, random_permutation_instance,
    search_isos, LkIso,
};
use crate::pseudoplane::{build_fragment, build_goode_witness, check_drop_one_agreement, eval_phi};
use crate::structures::{Elem, ProfileMode};

pub const TOOL: &str = "arity-lab";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Item {
    JohnsonTriples,
    ArityT3,
    SetsysL2,
    SetsysL3,
    SetsysL4,
    KaygraphParity,
    KaygraphNondistal,
    KaygraphArity,
    StrongDistality,
    JohnsonBound,
    JohnsonExtend,
    GoodeFragment,
    GoodeN1,
    GoodeN2,
    CherlinLachlanOrbits,
    CherlinLachlanCycles,
}

impl Item {
    pub const ALL: [Item; 16] = [
        Item::JohnsonTriples,
        Item::ArityT3,
        Item::SetsysL2,
        Item::SetsysL3,
        Item::SetsysL4,
        Item::KaygraphParity,
        Item::KaygraphNondistal,
        Item::KaygraphArity,
        Item::StrongDistality,
        Item::JohnsonBound,
        Item::JohnsonExtend,
        Item::GoodeFragment,
        Item::GoodeN1,
        Item::GoodeN2,
        Item::CherlinLachlanOrbits,
        Item::CherlinLachlanCycles,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Item::JohnsonTriples => "johnson_triples",
            Item::ArityT3 => "ar_t3",
            Item::SetsysL2 => "setsys_l2",
            Item::SetsysL3 => "setsys_l3",
            Item::SetsysL4 => "setsys_l4",
            Item::KaygraphParity => "kaygraph_parity",
            Item::KaygraphNondistal => "kaygraph_nondistal",
            Item::KaygraphArity => "kaygraph_arity",
            Item::StrongDistality => "strong_distality",
            Item::JohnsonBound => "johnson_bound",
            Item::JohnsonExtend => "johnson_extend",
            Item::GoodeFragment => "goode_fragment",
            Item::GoodeN1 => "goode_n1",
            Item::GoodeN2 => "goode_n2",
            Item::CherlinLachlanOrbits => "cherlin_lachlan_orbits",
            Item::CherlinLachlanCycles => "cherlin_lachlan_cycles",
        }
    }

    pub fn run(self, seed: u64, caps: &Caps) -> Result<ItemReport> {
        let (pass, summary, details) = match self {
            Item::JohnsonTriples => johnson_triples(caps)?,
            Item::ArityT3 => arity_t3(caps)?,
            Item::SetsysL2 => setsys(2, caps)?,
            Item::SetsysL3 => setsys(3, caps)?,
            Item::SetsysL4 => setsys(4, caps)?,
            Item::KaygraphParity => kaygraph_parity(seed)?,
            Item::KaygraphNondistal => kaygraph_nondistal()?,
            Item::KaygraphArity => kaygraph_arity()?,
            Item::StrongDistality => strong_distality(seed)?,
            Item::JohnsonBound => johnson_bound(seed)?,
            Item::JohnsonExtend => johnson_extend(seed)?,
            Item::GoodeFragment => goode_fragment(caps)?,
            Item::GoodeN1 => goode(1, caps)?,
            Item::GoodeN2 => goode(2, caps)?,
            Item::CherlinLachlanOrbits => cherlin_lachlan_orbits(caps)?,
            Item::CherlinLachlanCycles => cherlin_lachlan_cycles(caps)?,
        };
        Ok(ItemReport {
            item: self.name().to_string(),
            pass,
            summary,
            details,
            error: None,
        })
    }
}

impl FromStr for Item {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Item::ALL
            .into_iter()
            .find(|i| i.name() == s)
            .ok_or_else(|| Error::input(format!("unknown item {s:?}")))
    }
}

impl std::fmt::Display for Item {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemReport {
    pub item: String,
    pub pass: bool,
    pub summary: Vec<String>,
    pub details: Value,
    /// Set when the pipeline stopped with an error; `pass` is then false.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub caps: Caps,
    pub pass: bool,
    pub items: Vec<ItemReport>,
}

/// Run `items` concurrently, one thread each.
pub fn reproduce(items: &[Item], seed: u64, caps: &Caps) -> RunReport {
    let reports: Vec<ItemReport> = std::thread::scope(|scope| {
        let handles: Vec<_> = items
            .iter()
            .map(|&item| (item, scope.spawn(move || item.run(seed, caps))))
            .collect();
        handles
            .into_iter()
            .map(|(item, h)| {
                let failed = |msg: String| ItemReport {
                    item: item.name().to_string(),
                    pass: false,
                    summary: Vec::new(),
                    details: Value::Null,
                    error: Some(msg),
                };
                match h.join() {
                    Ok(Ok(r)) => r,
                    Ok(Err(e)) => failed(e.to_string()),
                    Err(_) => failed("the item panicked".to_string()),
                }
            })
            .collect()
    });
    RunReport {
        tool: TOOL.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed,
        caps: *caps,
        pass: reports.iter().all(|r| r.pass),
        items: reports,
    }
}

type Outcome = (bool, Vec<String>, Value);

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

fn johnson_triples(caps: &Caps) -> Result<Outcome> {
    let c = canned::johnson2(caps)?;
    let report = verify_witness(c.structure.as_ref(), &c.witness)?;
    let j = gen_johnson(4, 2, caps)?;
    let sizes = |t: &[Elem]| -> (Vec<u32>, u32) {
        let m: Vec<u64> = t.iter().map(|&e| j.mask(e)).collect();
        let pairs = vec![(m[0] & m[1]).count_ones(), (m[0] & m[2]).count_ones(), (m[1] & m[2]).count_ones()];
        (pairs, (m[0] & m[1] & m[2]).count_ones())
    };
    let (p1, t1) = sizes(&c.witness.t1);
    let (p2, t2) = sizes(&c.witness.t2);
    let pass = report.pass && p1 == [1, 1, 1] && p2 == [1, 1, 1] && (t1, t2) == (0, 1);
    Ok((
        pass,
        vec![
            format!("{} vs {}", c.description[0], c.description[1]),
            format!("pairwise intersections {p1:?} and {p2:?}, triple intersections {t1} and {t2}"),
            format!("witness verified: {}", report.pass),
        ],
        json!({ "witness": c.witness, "report": report }),
    ))
}

fn search_line(label: &str, o: &SearchOutcome) -> String {
    match o {
        SearchOutcome::Witness { tuples_examined, .. } => format!("{label}: witness after {tuples_examined} tuples"),
        SearchOutcome::ExhaustedNoWitness {
            tuples_examined,
            profile_classes,
            ..
        } => format!("{label}: exhausted, no witness ({tuples_examined} tuples, {profile_classes} profile classes)"),
        SearchOutcome::BudgetExhausted { tuples_examined, .. } => {
            format!("{label}: budget exhausted after {tuples_examined} tuples")
        }
    }
}

fn arity_t3(caps: &Caps) -> Result<Outcome> {
    let mut details = Vec::new();
    let mut summary = Vec::new();
    let mut pass = true;
    for (n, k, l, want_witness) in [(7, 3, 4, false), (9, 3, 4, false), (4, 2, 3, true)] {
        let j = gen_johnson(n, k, caps)?;
        let o = arity_witness_search(&j, l, ProfileMode::DropOne, &JohnsonOrbitReps { johnson: &j }, None)?;
        let ok = match &o {
            SearchOutcome::Witness { witness, .. } => want_witness && verify_witness(&j, witness)?.pass,
            SearchOutcome::ExhaustedNoWitness { .. } => !want_witness,
            SearchOutcome::BudgetExhausted { .. } => false,
        };
        pass &= ok;
        summary.push(search_line(&format!("J({k}) over [{n}], l = {l}"), &o));
        details.push(json!({ "n": n, "k": k, "l": l, "outcome": o }));
    }
    Ok((pass, summary, Value::Array(details)))
}

fn setsys(l: usize, caps: &Caps) -> Result<Outcome> {
    let levels = set_system_levels(l);
    let reports: Vec<_> = levels.iter().map(|p| verify_set_systems(p, caps)).collect();
    let last = reports.last().expect("at least one level");
    let pass = reports.iter().all(|r| r.pass)
        && last.full_intersection_sizes == [1, 0]
        && last.johnson_witness == Some(true);
    let summary = vec![
        format!(
            "{} levels verified: {}",
            reports.len(),
            reports.iter().filter(|r| r.pass).count()
        ),
        format!(
            "final intersections |X| = {}, |Y| = {}, common size k = {:?}",
            last.full_intersection_sizes[0], last.full_intersection_sizes[1], last.k
        ),
        format!("embedded J(k) witness verified: {:?}", last.johnson_witness),
    ];
    let last_pair = levels.last().expect("at least one level");
    Ok((pass, summary, json!({ "final": last_pair, "reports": reports })))
}

fn kaygraph_parity(seed: u64) -> Result<Outcome> {
    let mut details = Vec::new();
    let mut graphs = 0u64;
    let mut checked = 0u64;
    let mut violations = 0u64;
    let mut tally = |r: &crate::distality::ParityReport| {
        checked += r.checked;
        violations += r.violations;
    };
    // every graph on 4 and 5 points
    for n in 4..=5 {
        let pairs = crate::combin::index_sets(n, 2);
        for bits in 0u32..1 << pairs.len() {
            let edges: Vec<Vec<Elem>> = pairs
                .iter()
                .enumerate()
                .filter(|&(p, _)| bits >> p & 1 == 1)
                .map(|(_, s)| s.iter().map(|&e| e as Elem).collect())
                .collect();
            let kg = parity_reduct(&gen_hypergraph(n, 2, &HypergraphMode::Explicit(edges))?)?;
            tally(&verify_parity_identity(&kg, None, seed)?);
            graphs += 1;
        }
    }
    details.push(json!({ "k": 2, "n": "4..=5", "graphs": graphs, "mode": "every graph, every arrangement" }));
    let mut sub = ChaCha8Rng::seed_from_u64(seed);
    use rand::Rng;
    for p in [0.1, 0.3, 0.5, 0.7, 0.9] {
        for _ in 0..4 {
            let h = gen_hypergraph(6, 2, &HypergraphMode::Random { seed: sub.gen(), edge_prob: p })?;
            let r = verify_parity_identity(&parity_reduct(&h)?, None, seed)?;
            tally(&r);
            details.push(json!({ "edge_prob": p, "report": r }));
        }
    }
    let h = gen_hypergraph(12, 3, &HypergraphMode::Random { seed: sub.gen(), edge_prob: 0.5 })?;
    let kg = parity_reduct(&h)?;
    let sampled = verify_parity_identity(&kg, Some(100_000), seed)?;
    tally(&sampled);
    let full = verify_parity_identity(&kg, None, seed)?;
    tally(&full);
    details.push(json!({ "sampled": sampled, "exhaustive": full }));
    Ok((
        violations == 0,
        vec![
            format!("k = 2: all {graphs} graphs on 4 and 5 points, 20 seeded graphs on 6 points, exhaustive"),
            "k = 3, n = 12: 100000 seeded samples and every arrangement".to_string(),
            format!("{checked} instances checked, {violations} violations"),
        ],
        Value::Array(details),
    ))
}

fn kaygraph_nondistal() -> Result<Outcome> {
    let mut pass = true;
    let mut summary = Vec::new();
    let mut details = Vec::new();
    for k in 2..=4 {
        let len_each = 2;
        let w = build_nondistal_witness(k, len_each)?;
        let r = check_nondistal_witness(&w, len_each)?;
        pass &= r.pass;
        summary.push(format!(
            "k = {k}: sequence of {} points, full sequence indiscernible: {}, every drop-one indiscernible: {}",
            r.sequence_length,
            r.full.is_yes(),
            r.drop_one.iter().all(|d| d.is_yes())
        ));
        details.push(to_value(&r)?);
    }
    Ok((pass, summary, Value::Array(details)))
}

fn kaygraph_arity() -> Result<Outcome> {
    let mut pass = true;
    let mut summary = Vec::new();
    let mut details = Vec::new();
    for k in 2..=4 {
        let c = canned::kaygraph(k)?;
        let r = verify_witness(c.structure.as_ref(), &c.witness)?;
        pass &= r.pass;
        summary.push(format!("k = {k}: {} vs {}, verified: {}", c.description[0], c.description[1], r.pass));
        details.push(json!({ "k": k, "witness": c.witness, "pass": r.pass }));
    }
    Ok((pass, summary, Value::Array(details)))
}

fn strong_distality(seed: u64) -> Result<Outcome> {
    let r = random_strong_instances(2..=3, 10_000, seed)?;
    // the non-distal sequence with k − 1 parameters is out of the theorem's
    // reach and must not be flagged
    let mut pinned = Vec::new();
    for k in 2..=4 {
        let w = build_nondistal_witness(k, 2)?;
        let vk = *w.v.last().expect("k >= 2");
        let rest: Vec<Elem> = w.sequence.iter().copied().filter(|e| !w.v.contains(e)).collect();
        let split = rest.iter().position(|&e| e > vk).expect("points after v_k");
        let inst = DistalityInstance {
            i: rest[..split].iter().map(|&e| vec![e]).collect(),
            a: vec![vk],
            j: rest[split..].iter().map(|&e| vec![e]).collect(),
            b: w.v[..k - 1].iter().map(|&e| vec![e]).collect(),
        };
        pinned.push(strong_distality_check(&w.kay.reduct, &inst, k + 1)?);
    }
    let pinned_ok = pinned
        .iter()
        .all(|p| p.hypotheses_hold && !p.conclusion && !p.theorem_violation);
    Ok((
        r.violations == 0 && pinned_ok,
        vec![
            format!(
                "{} random instances, theorem applies to {}, hypotheses held in {} of those, {} violations",
                r.instances, r.theorem_applies, r.hypotheses_held_where_applies, r.violations
            ),
            format!("k - 1 parameters on the non-distal sequence: conclusion fails unflagged for k = 2..4: {pinned_ok}"),
        ],
        json!({ "random": r, "pinned": pinned }),
    ))
}

fn johnson_bound(seed: u64) -> Result<Outcome> {
    let mut bounds = Vec::new();
    for (k, i, j) in [(2, 3, 1), (2, 4, 1), (3, 3, 1), (3, 3, 2), (3, 4, 2)] {
        bounds.push(json!({ "k": k, "i": i, "j": j, "n": definability_bound_n(k, i, j)?.to_string() }));
    }
    let mut reports = Vec::new();
    let mut pass = true;
    for (n, k, i, j) in [(12, 2, 3, 1), (16, 3, 3, 1), (14, 3, 3, 2)] {
        let r = pigeonhole_check(n, k, i, j, 300, seed)?;
        pass &= r.counterexamples == 0 && r.forward_failures == 0;
        reports.push(r);
    }
    let summary = reports
        .iter()
        .map(|r| {
            format!(
                "n = {}, k = {}, i = {}, j = {}, N = {}: {} trials, {} counterexamples",
                r.n, r.k, r.i, r.j, r.big_n, r.trials, r.counterexamples
            )
        })
        .collect();
    Ok((pass, summary, json!({ "bounds": bounds, "pigeonhole": reports })))
}

fn check_extension(c: &LkIso) -> Result<Option<String>> {
    let inj = extend_to_injection(c)?;
    Ok(induction_failure(c, &inj))
}

fn johnson_extend(seed: u64) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    let hidden = 100;
    for t in 0..hidden {
        let (c, _) = random_permutation_instance(20, 3, 10, &mut rng)?;
        if let Some(why) = check_extension(&c)? {
            failures.push(format!("hidden permutation instance {t}: {why}"));
        }
    }
    let mut adversarial = 0;
    for (n, m) in [(8, 5), (9, 6), (10, 6)] {
        let (base, _) = random_permutation_instance(n, 3, m, &mut rng)?;
        let s = base.instance().s;
        for c in search_isos(n, 3, &s, 6, &mut rng)? {
            adversarial += 1;
            if let Some(why) = check_extension(&c)? {
                failures.push(format!("searched instance on [{n}]: {why}"));
            }
        }
    }
    Ok((
        failures.is_empty() && adversarial >= 10,
        vec![
            format!("{hidden} hidden-permutation instances with n = 20, k = 3"),
            format!("{adversarial} isomorphisms found by search on at most 10 points"),
            format!("{} extensions failed", failures.len()),
        ],
        json!({ "hidden": hidden, "adversarial": adversarial, "failures": failures }),
    ))
}

fn goode_fragment(caps: &Caps) -> Result<Outcome> {
    let mut summary = Vec::new();
    let mut details = Vec::new();
    for (n, labels, depth) in [(2, 2, 2), (3, 2, 3), (3, 3, 2)] {
        let f = build_fragment(n, labels, depth, caps)?;
        f.check_freeness()?;
        let sizes: Vec<usize> = (1..=n).map(|s| f.vertices_of_sort(s).len()).collect();
        summary.push(format!(
            "{n} sorts, {labels} labels, depth {depth}: {} vertices {sizes:?}, free action verified",
            f.len()
        ));
        details.push(json!({ "sorts": n, "labels": labels, "depth": depth, "vertices_per_sort": sizes }));
    }
    Ok((true, summary, Value::Array(details)))
}

fn goode(n: usize, caps: &Caps) -> Result<Outcome> {
    let f = build_fragment(n + 1, 2, n + 1, caps)?;
    let mut w = build_goode_witness(n, &f)?;
    let accepted = eval_phi(&f, n + 1, &w.b)?.value;
    let refuted = !eval_phi(&f, n + 1, &w.b_prime)?.value;
    let agreement = check_drop_one_agreement(&w, &f, n)?;
    w.radius = agreement.max_radius;
    let show = |t: &[Elem]| t.iter().map(|&v| f.describe(v)).collect::<Vec<_>>();
    let pass = accepted && refuted && agreement.success && agreement.max_radius >= Some(n);
    Ok((
        pass,
        vec![
            format!("phi_{} accepts b: {accepted}, rejects b': {refuted}", n + 1),
            format!(
                "drop-one ball isomorphisms for all {} indices at radius {:?}",
                agreement.drops.len(),
                agreement.max_radius
            ),
        ],
        json!({
            "fragment": { "sorts": n + 1, "labels": 2, "depth": n + 1 },
            "a": show(&w.a), "a_prime": show(&w.a_prime),
            "b": show(&w.b), "b_prime": show(&w.b_prime),
            "radius": w.radius,
            "agreement": agreement,
        }),
    ))
}

fn cherlin_lachlan_orbits(caps: &Caps) -> Result<Outcome> {
    let cl = gen_cherlin_lachlan(8, 3, caps)?;
    let counts = cl.orbit_counts();
    // distinct codes over every tuple of length 1 and 2, against the
    // enumerated orbit relations
    let elems = cl.elements();
    let mut seen = [BTreeSet::new(), BTreeSet::new()];
    for &x in elems {
        seen[0].insert(orbit_code(&[x]));
        for &y in elems {
            seen[1].insert(orbit_code(&[x, y]));
        }
    }
    let counted = [seen[0].len(), seen[1].len()];
    let mut reps_ok = true;
    let csv = cl.orbit_csv()?;
    for line in csv.lines().skip(1) {
        let name = line.split(',').next().unwrap_or_default();
        let code: Vec<u8> = name
            .split_once('_')
            .map(|(_, d)| d.bytes().map(|b| b - b'0').collect())
            .unwrap_or_default();
        reps_ok &= code_name(&orbit_code(&code_representative(&code))) == name;
    }
    let pass = counts[..2] == counted && reps_ok;
    Ok((
        pass,
        vec![
            format!("orbits of Sym(8) on tuples of length 1..=3: {counts:?}"),
            format!("distinct codes over all tuples of length 1 and 2: {counted:?}"),
            format!("every orbit representative reproduces its code: {reps_ok}"),
        ],
        json!({ "n": 8, "orbit_counts": counts, "counted": counted }),
    ))
}

fn cherlin_lachlan_cycles(caps: &Caps) -> Result<Outcome> {
    let mut pass = true;
    let mut summary = Vec::new();
    let mut details = Vec::new();
    for k in 2..=4 {
        let c = canned::cherlin_lachlan(k, caps)?;
        let r = verify_witness(c.structure.as_ref(), &c.witness)?;
        pass &= r.pass;
        summary.push(format!(
            "k = {k}: {} vs {}, drop-one profiles equal: {}, full codes differ: {}",
            c.description[0], c.description[1], r.profiles_equal, r.types_differ
        ));
        details.push(json!({ "k": k, "structure": c.structure.digest(), "witness": c.witness, "pass": r.pass }));
    }
    Ok((pass, summary, Value::Array(details)))
}
