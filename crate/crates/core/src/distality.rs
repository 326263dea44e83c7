//! Quantifier-free, finite versions of the distality arguments for
//! kay-graphs and for structures of bounded arity.
//!
//! Every check here uses quantifier-free indiscernibility of finite
//! sequences; elementary indiscernibility cannot be decided from a finite
//! structure.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::combin::index_sets;
use crate::error::{Error, Result};
use crate::generators::{gen_hypergraph, parity_reduct, HypergraphMode, KayGraphPair};
use crate::structures::{is_qf_indiscernible, Elem, Indiscernibility, Relational, Structure};

/// Printed at the top of every distality report.
pub const SCOPE: &str = "quantifier-free indiscernibility of finite sequences in a finite structure";

/// Largest number of ordered `(x, y, b_1..b_k)` tuples an exhaustive
/// parity check may visit.
pub const EXHAUSTIVE_LIMIT: u64 = 50_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityReport {
    pub scope: String,
    pub k: usize,
    pub n: usize,
    pub exhaustive: bool,
    pub seed: Option<u64>,
    pub checked: u64,
    pub violations: u64,
    /// First violating `(x, y, b_1..b_k)`.
    pub first_violation: Option<Vec<Elem>>,
}

fn number_of_arrangements(n: usize, len: usize) -> Option<u64> {
    (0..len).try_fold(1u64, |acc, i| acc.checked_mul((n - i) as u64))
}

/// `R(x, b̄) + R(y, b̄) ≡ Σ_i R(x, y, b_{≠i}) (mod 2)` on distinct
/// `x, y, b_1, …, b_k`.
pub fn parity_holds(kg: &KayGraphPair, t: &[Elem]) -> bool {
    let k = kg.k;
    let (x, y, b) = (t[0], t[1], &t[2..]);
    let r = |v: &[Elem]| u32::from(kg.reduct.holds(0, v));
    let mut buf = Vec::with_capacity(k + 1);
    buf.push(x);
    buf.extend_from_slice(b);
    let left = r(&buf);
    buf[0] = y;
    let left = left + r(&buf);
    let mut right = 0;
    for i in 0..k {
        buf.clear();
        buf.push(x);
        buf.push(y);
        buf.extend(b.iter().enumerate().filter(|&(p, _)| p != i).map(|(_, &e)| e));
        right += r(&buf);
    }
    (left + right) % 2 == 0
}

/// Check the parity identity on `samples` seeded random arrangements of
/// distinct entries, or on every arrangement when `samples` is `None`.
pub fn verify_parity_identity(kg: &KayGraphPair, samples: Option<u64>, seed: u64) -> Result<ParityReport> {
    let (k, n) = (kg.k, kg.reduct.universe());
    if n < k + 2 {
        return Err(Error::input(format!(
            "the parity identity needs {} distinct points, the universe has {n}",
            k + 2
        )));
    }
    let total = number_of_arrangements(n, k + 2);
    let mut report = ParityReport {
        scope: SCOPE.to_string(),
        k,
        n,
        exhaustive: false,
        seed: None,
        checked: 0,
        violations: 0,
        first_violation: None,
    };
    let record = |t: &[Elem], report: &mut ParityReport| {
        report.checked += 1;
        if !parity_holds(kg, t) {
            report.violations += 1;
            if report.first_violation.is_none() {
                report.first_violation = Some(t.to_vec());
            }
        }
    };
    let Some(samples) = samples else {
        if !total.is_some_and(|t| t <= EXHAUSTIVE_LIMIT) {
            return Err(Error::resource("exhaustive parity check", EXHAUSTIVE_LIMIT));
        }
        report.exhaustive = true;
        let mut t = Vec::with_capacity(k + 2);
        let mut used = vec![false; n];
        fn arrange(
            n: usize,
            len: usize,
            t: &mut Vec<Elem>,
            used: &mut [bool],
            visit: &mut dyn FnMut(&[Elem]),
        ) {
            if t.len() == len {
                visit(t);
                return;
            }
            for v in 0..n {
                if !used[v] {
                    used[v] = true;
                    t.push(v as Elem);
                    arrange(n, len, t, used, visit);
                    t.pop();
                    used[v] = false;
                }
            }
        }
        let mut local = report.clone();
        arrange(n, k + 2, &mut t, &mut used, &mut |t| record(t, &mut local));
        return Ok(local);
    };
    report.seed = Some(seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Elem> = (0..n as Elem).collect();
    for _ in 0..samples {
        let t: Vec<Elem> = points.choose_multiple(&mut rng, k + 2).copied().collect();
        record(&t, &mut report);
    }
    Ok(report)
}

/// A sequence `I_0 + v_1 + I_1 + ⋯ + v_k + I_k` of distinct points whose
/// k-subsets are all edges except `{v_1, …, v_k}`.
#[derive(Debug, Clone)]
pub struct NondistalWitness {
    pub k: usize,
    pub kay: KayGraphPair,
    /// The points of the sequence, in order (`0..len`).
    pub sequence: Vec<Elem>,
    pub v: Vec<Elem>,
}

impl NondistalWitness {
    /// The sequence with `v_i` removed (`i` 1-based), as singleton entries.
    pub fn without(&self, i: usize) -> Vec<Vec<Elem>> {
        self.sequence
            .iter()
            .filter(|&&e| e != self.v[i - 1])
            .map(|&e| vec![e])
            .collect()
    }

    pub fn full(&self) -> Vec<Vec<Elem>> {
        self.sequence.iter().map(|&e| vec![e]).collect()
    }
}

pub fn build_nondistal_witness(k: usize, len_each: usize) -> Result<NondistalWitness> {
    if k < 2 || len_each < 2 {
        return Err(Error::input(format!("need k >= 2 and len_each >= 2, got k={k}, len_each={len_each}")));
    }
    let len = (k + 1) * len_each + k;
    let v: Vec<Elem> = (1..=k).map(|i| (i * len_each + i - 1) as Elem).collect();
    let edges: Vec<Vec<Elem>> = index_sets(len, k)
        .into_iter()
        .map(|s| s.into_iter().map(|e| e as Elem).collect::<Vec<Elem>>())
        .filter(|s| *s != v)
        .collect();
    let h = gen_hypergraph(len, k, &HypergraphMode::Explicit(edges))?;
    let kay = parity_reduct(&h)?;
    // drop-one edge counts: k on sets holding every v_i, k + 1 elsewhere
    for s in index_sets(len, k + 1) {
        let s: Vec<Elem> = s.into_iter().map(|e| e as Elem).collect();
        let has_all = v.iter().all(|x| s.contains(x));
        let expect = if has_all { k % 2 == 1 } else { (k + 1) % 2 == 1 };
        if kay.reduct.holds(0, &s) != expect {
            return Err(Error::consistency(format!("parity of {s:?} differs from the edge count")));
        }
    }
    Ok(NondistalWitness {
        k,
        kay,
        sequence: (0..len as Elem).collect(),
        v,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NondistalReport {
    pub scope: String,
    pub k: usize,
    pub len_each: usize,
    pub sequence_length: usize,
    pub v: Vec<Elem>,
    pub full: Indiscernibility,
    /// Verdict with `v_i` removed, for `i = 1..k`.
    pub drop_one: Vec<Indiscernibility>,
    pub pass: bool,
}

/// Exhaustive indiscernibility checks of the full and drop-one sequences
/// in the parity reduct.
pub fn check_nondistal_witness(w: &NondistalWitness, len_each: usize) -> Result<NondistalReport> {
    let full = is_qf_indiscernible(&w.kay.reduct, &w.full(), &[])?;
    let drop_one = (1..=w.k)
        .map(|i| is_qf_indiscernible(&w.kay.reduct, &w.without(i), &[]))
        .collect::<Result<Vec<_>>>()?;
    let pass = !full.is_yes() && drop_one.iter().all(Indiscernibility::is_yes);
    Ok(NondistalReport {
        scope: SCOPE.to_string(),
        k: w.k,
        len_each,
        sequence_length: w.sequence.len(),
        v: w.v.clone(),
        full,
        drop_one,
        pass,
    })
}

/// Sequences `I`, `J` of tuples, a tuple `a` and parameters `b_1..b_k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistalityInstance {
    pub i: Vec<Vec<Elem>>,
    pub a: Vec<Elem>,
    pub j: Vec<Vec<Elem>>,
    pub b: Vec<Vec<Elem>>,
}

impl DistalityInstance {
    fn with_a(&self) -> Vec<Vec<Elem>> {
        let mut s = self.i.clone();
        s.push(self.a.clone());
        s.extend(self.j.iter().cloned());
        s
    }

    fn without_a(&self) -> Vec<Vec<Elem>> {
        let mut s = self.i.clone();
        s.extend(self.j.iter().cloned());
        s
    }

    fn params_except(&self, m: Option<usize>) -> Vec<Elem> {
        self.b
            .iter()
            .enumerate()
            .filter(|&(p, _)| Some(p) != m)
            .flat_map(|(_, t)| t.iter().copied())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrongDistalityReport {
    pub scope: String,
    pub parameters: usize,
    pub arity_bound: usize,
    /// The arity bound is at most the number of parameters, so bounded
    /// arity forces the conclusion.
    pub theorem_applies: bool,
    /// `I + a + J` is indiscernible over `b_{≠m}`, for each `m`.
    pub over_drop_one: Vec<bool>,
    /// `I + J` is indiscernible over all parameters.
    pub outer_over_all: bool,
    pub hypotheses_hold: bool,
    pub conclusion: bool,
    pub theorem_violation: bool,
}

/// If `I + a + J` is indiscernible over each `b_{≠m}` and `I + J` over
/// `b̄`, is `I + a + J` indiscernible over `b̄`?
///
/// A structure whose relations have arity at most the number of
/// parameters must answer yes: an atom touching the sequence misses some
/// `b_m` entirely. Such an instance that answers no is reported as a
/// theorem violation.
pub fn strong_distality_check<S: Relational + ?Sized>(
    s: &S,
    inst: &DistalityInstance,
    arity_bound: usize,
) -> Result<StrongDistalityReport> {
    let max = s.signature().max_arity();
    if max > arity_bound {
        return Err(Error::input(format!(
            "the signature has a relation of arity {max}, above the bound {arity_bound}"
        )));
    }
    if inst.i.is_empty() || inst.j.is_empty() || inst.b.is_empty() {
        return Err(Error::input("I, J and the parameters must be nonempty"));
    }
    let with_a = inst.with_a();
    let over_drop_one = (0..inst.b.len())
        .map(|m| Ok(is_qf_indiscernible(s, &with_a, &inst.params_except(Some(m)))?.is_yes()))
        .collect::<Result<Vec<bool>>>()?;
    let all = inst.params_except(None);
    let outer_over_all = is_qf_indiscernible(s, &inst.without_a(), &all)?.is_yes();
    let conclusion = is_qf_indiscernible(s, &with_a, &all)?.is_yes();
    let hypotheses_hold = outer_over_all && over_drop_one.iter().all(|&x| x);
    let theorem_applies = arity_bound <= inst.b.len();
    Ok(StrongDistalityReport {
        scope: SCOPE.to_string(),
        parameters: inst.b.len(),
        arity_bound,
        theorem_applies,
        over_drop_one,
        outer_over_all,
        hypotheses_hold,
        conclusion,
        theorem_violation: theorem_applies && hypotheses_hold && !conclusion,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SoundnessReport {
    pub scope: String,
    pub seed: u64,
    pub instances: u64,
    pub theorem_applies: u64,
    pub hypotheses_held: u64,
    pub hypotheses_held_where_applies: u64,
    pub violations: u64,
    /// Counts of `(parameters, conclusion)` among instances whose
    /// hypotheses held.
    pub outcomes: BTreeMap<String, u64>,
}

/// Random instances on random kay-graphs: `k` drawn from `ks`, `max(9,
/// k + 6)` points, an edge probability from {0, 0.2, 0.5, 0.8, 1},
/// sequences of total length 5 with `a` in the middle, and `k` or `k + 1`
/// singleton parameters, all entries distinct. The arity bound is `k + 1`.
pub fn random_strong_instances(ks: RangeInclusive<usize>, instances: u64, seed: u64) -> Result<SoundnessReport> {
    if ks.is_empty() || *ks.start() < 2 {
        return Err(Error::input(format!("kay-graph arities must be at least 2, got {ks:?}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r = SoundnessReport {
        scope: SCOPE.to_string(),
        seed,
        instances,
        theorem_applies: 0,
        hypotheses_held: 0,
        hypotheses_held_where_applies: 0,
        violations: 0,
        outcomes: BTreeMap::new(),
    };
    for _ in 0..instances {
        let k = rng.gen_range(ks.clone());
        let n = (k + 6).max(9);
        let points: Vec<Elem> = (0..n as Elem).collect();
        let p = [0.0, 0.2, 0.5, 0.8, 1.0][rng.gen_range(0..5)];
        let h = gen_hypergraph(
            n,
            k,
            &HypergraphMode::Random {
                seed: rng.gen(),
                edge_prob: p,
            },
        )?;
        let kg = parity_reduct(&h)?;
        let params = k + rng.gen_range(0..=1);
        let pick: Vec<Elem> = points.choose_multiple(&mut rng, 5 + params).copied().collect();
        let inst = DistalityInstance {
            i: pick[0..2].iter().map(|&e| vec![e]).collect(),
            a: vec![pick[2]],
            j: pick[3..5].iter().map(|&e| vec![e]).collect(),
            b: pick[5..].iter().map(|&e| vec![e]).collect(),
        };
        let rep = strong_distality_check(&kg.reduct, &inst, k + 1)?;
        r.theorem_applies += u64::from(rep.theorem_applies);
        if rep.hypotheses_hold {
            r.hypotheses_held += 1;
            r.hypotheses_held_where_applies += u64::from(rep.theorem_applies);
            *r
                .outcomes
                .entry(format!("parameters={} conclusion={}", rep.parameters, rep.conclusion))
                .or_default() += 1;
        }
        r.violations += u64::from(rep.theorem_violation);
    }
    Ok(r)
}

/// The structure of a kay-graph built from explicit edges.
pub fn kaygraph_from_edges(n: usize, k: usize, edges: Vec<Vec<Elem>>) -> Result<Structure> {
    Ok(parity_reduct(&gen_hypergraph(n, k, &HypergraphMode::Explicit(edges))?)?.reduct)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parity_on_one_edge_graphs() {
        for n in 4..=6 {
            let h = gen_hypergraph(n, 2, &HypergraphMode::Explicit(vec![vec![0, 1]])).unwrap();
            let kg = parity_reduct(&h).unwrap();
            let r = verify_parity_identity(&kg, None, 0).unwrap();
            assert!(r.exhaustive);
            assert_eq!(r.checked, number_of_arrangements(n, 4).unwrap());
            assert_eq!(r.violations, 0);
        }
    }

    #[test]
    fn parity_sampled_k3() {
        let h = gen_hypergraph(16, 3, &HypergraphMode::Random { seed: 1, edge_prob: 0.5 }).unwrap();
        let kg = parity_reduct(&h).unwrap();
        let r = verify_parity_identity(&kg, Some(2000), 9).unwrap();
        assert!(!r.exhaustive);
        assert_eq!((r.checked, r.violations), (2000, 0));
        let h = gen_hypergraph(4, 3, &HypergraphMode::Explicit(vec![])).unwrap();
        assert!(verify_parity_identity(&parity_reduct(&h).unwrap(), Some(1), 1).is_err());
    }

    #[test]
    fn a_wrong_reduct_is_caught() {
        // a lone triple is not the parity reduct of any graph on 5 points
        let h = gen_hypergraph(5, 2, &HypergraphMode::Explicit(vec![vec![0, 1]])).unwrap();
        let mut kg = parity_reduct(&h).unwrap();
        let sig = kg.reduct.signature().clone();
        let mut sets = BTreeMap::new();
        sets.insert("R".to_string(), vec![vec![0, 1, 2]]);
        kg.reduct = Structure::from_symmetric_sets(sig, 5, sets).unwrap();
        let r = verify_parity_identity(&kg, None, 0).unwrap();
        assert!(r.violations > 0);
    }

    #[test]
    fn nondistal_witness_verdicts() {
        for (k, len_each) in [(2, 2), (3, 3)] {
            let w = build_nondistal_witness(k, len_each).unwrap();
            let r = check_nondistal_witness(&w, len_each).unwrap();
            assert!(r.pass, "{r:?}");
            if let Indiscernibility::Counterexample { first, second, .. } = &r.full {
                let holds_all = |idx: &[usize]| w.v.iter().all(|v| idx.contains(&(*v as usize)));
                assert!(holds_all(first) || holds_all(second));
            }
        }
        assert_eq!(build_nondistal_witness(2, 2).unwrap().sequence.len(), 8);
        assert!(build_nondistal_witness(1, 2).is_err());
    }

    #[test]
    fn constant_sequences_pass() {
        let s = kaygraph_from_edges(6, 2, vec![vec![0, 1], vec![1, 2]]).unwrap();
        let inst = DistalityInstance {
            i: vec![vec![3], vec![3]],
            a: vec![3],
            j: vec![vec![3]],
            b: vec![vec![0], vec![1], vec![2]],
        };
        let r = strong_distality_check(&s, &inst, 3).unwrap();
        assert!(r.hypotheses_hold && r.conclusion && r.theorem_applies && !r.theorem_violation);
        assert!(strong_distality_check(&s, &inst, 2).is_err());
    }

    #[test]
    fn nondistal_instance_is_not_flagged() {
        for k in 2..=4 {
            let w = build_nondistal_witness(k, 2).unwrap();
            let vk = *w.v.last().unwrap();
            let rest: Vec<Elem> = w.sequence.iter().copied().filter(|e| !w.v.contains(e)).collect();
            let split = rest.iter().position(|&e| e > vk).unwrap();
            let inst = DistalityInstance {
                i: rest[..split].iter().map(|&e| vec![e]).collect(),
                a: vec![vk],
                j: rest[split..].iter().map(|&e| vec![e]).collect(),
                b: w.v[..k - 1].iter().map(|&e| vec![e]).collect(),
            };
            let r = strong_distality_check(&w.kay.reduct, &inst, k + 1).unwrap();
            assert!(r.hypotheses_hold, "{r:?}");
            assert!(!r.conclusion);
            assert!(!r.theorem_applies && !r.theorem_violation);
            assert_eq!(r.parameters, k - 1);
        }
    }

    #[test]
    fn outer_hypothesis_is_load_bearing() {
        // a ternary atom on one sequence entry and both parameters is
        // invisible over either parameter alone
        let sig = crate::structures::Signature::new(vec![crate::structures::RelationSymbol::new("R", 3)]).unwrap();
        let mut sets = BTreeMap::new();
        sets.insert("R".to_string(), vec![vec![0, 5, 6]]);
        let s = Structure::from_symmetric_sets(sig, 7, sets).unwrap();
        let inst = DistalityInstance {
            i: vec![vec![0], vec![1]],
            a: vec![2],
            j: vec![vec![3], vec![4]],
            b: vec![vec![5], vec![6]],
        };
        let r = strong_distality_check(&s, &inst, 3).unwrap();
        assert_eq!(r.over_drop_one, vec![true, true]);
        assert!(!r.outer_over_all && !r.conclusion);
        assert!(!r.theorem_applies && !r.theorem_violation);
    }

    #[test]
    fn random_instances_are_sound() {
        let r = random_strong_instances(2..=3, 400, 3).unwrap();
        assert_eq!(r.violations, 0);
        assert!(r.hypotheses_held_where_applies > 0, "{r:?}");
    }
}
