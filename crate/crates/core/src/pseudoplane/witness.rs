use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::fragment::Fragment;
use super::phi::eval_phi;
use crate::error::{Error, Result};
use crate::structures::Elem;

/// Accepted and refuted tuples of `φ_n` and `φ_{n+1}`.
///
/// `b̄` and `b̄′` live in sort `n + 1`; `ā` and `ā′` are the level-`n`
/// tuples whose entries label the steps from `b_i` to `b_{i+2^n}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoodeWitness {
    pub n: usize,
    pub a: Vec<Elem>,
    pub a_prime: Vec<Elem>,
    pub b: Vec<Elem>,
    pub b_prime: Vec<Elem>,
    /// Largest radius at which every drop-one agreement was certified.
    pub radius: Option<usize>,
}

/// Accepted and refuted tuples for `φ_1, …, φ_top`, indexed from level 1.
///
/// Level 1 is `((0,0), (0,1))`. Level `m + 1` takes the roots of the first
/// `2^m` orbits of sort `m + 1` as `b_1, …, b_{2^m}` and appends
/// `a_i ∗ b_i` (resp. `a′_i ∗ b_i`).
fn witness_levels(f: &Fragment, top: usize) -> Result<Vec<(Vec<Elem>, Vec<Elem>)>> {
    if f.labels() < 2 {
        return Err(Error::insufficient("goode witness: labels in sort 1", 2, f.labels() as u64));
    }
    if top > f.sorts() {
        return Err(Error::insufficient("goode witness: sorts in the fragment", top as u64, f.sorts() as u64));
    }
    if top > 1 && f.depth() < 1 {
        return Err(Error::insufficient("goode witness: fragment depth", 1, 0));
    }
    let mut levels = vec![(vec![0, 0], vec![0, 1])];
    for m in 1..top {
        let (acc, rej) = &levels[m - 1];
        let roots = f.roots(m + 1);
        let half = 1usize << m;
        let extend = |labels: &[Elem]| -> Result<Vec<Elem>> {
            let mut t: Vec<Elem> = roots[..half].to_vec();
            for i in 0..half {
                let v = f.act(labels[i], roots[i], false).ok_or_else(|| {
                    Error::consistency(format!("label {} does not act on sort {}", labels[i], m + 1))
                })?;
                t.push(v);
            }
            Ok(t)
        };
        let next = (extend(acc)?, extend(rej)?);
        levels.push(next);
    }
    Ok(levels)
}

/// The witness for `φ_{n+1}` built by induction from `φ_1`.
pub fn build_goode_witness(n: usize, f: &Fragment) -> Result<GoodeWitness> {
    if n < 1 {
        return Err(Error::input("goode witness needs n >= 1"));
    }
    let mut levels = witness_levels(f, n + 1)?;
    let (b, b_prime) = levels.pop().expect("n + 1 levels");
    let (a, a_prime) = levels.pop().expect("n levels");
    if !eval_phi(f, n + 1, &b)?.value {
        return Err(Error::consistency(format!("phi_{} rejects the accepted tuple", n + 1)));
    }
    if eval_phi(f, n + 1, &b_prime)?.value {
        return Err(Error::consistency(format!("phi_{} accepts the refuted tuple", n + 1)));
    }
    Ok(GoodeWitness {
        n,
        a,
        a_prime,
        b,
        b_prime,
        radius: None,
    })
}

/// Map `σ` on one sort, as readable vertex pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SortMap {
    pub sort: usize,
    pub pairs: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DropReport {
    /// 1-based index of the dropped entry.
    pub j: usize,
    pub success: bool,
    /// Largest radius `≤` the requested one at which the map was built.
    pub max_radius: Option<usize>,
    pub failure: Option<String>,
    /// The ball isomorphism at `max_radius`, sort by sort.
    pub maps: Vec<SortMap>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub n: usize,
    pub radius: usize,
    pub success: bool,
    /// Smallest of the per-drop maximal radii.
    pub max_radius: Option<usize>,
    pub drops: Vec<DropReport>,
}

type SortMaps = BTreeMap<usize, HashMap<Elem, Elem>>;

/// Vertices `g ∗ base` for reduced words `g` over `labels` of length at
/// most `radius`, or the first step that leaves the fragment.
fn ball(f: &Fragment, base: Elem, labels: &[Elem], radius: usize) -> std::result::Result<Vec<Elem>, String> {
    let mut out = vec![base];
    let mut frontier = vec![(base, None::<(Elem, bool)>)];
    for _ in 0..radius {
        let mut next = Vec::new();
        for &(v, last) in &frontier {
            for &x in labels {
                for inv in [false, true] {
                    if last == Some((x, !inv)) {
                        continue;
                    }
                    let w = f
                        .act(x, v, inv)
                        .ok_or_else(|| format!("ball of radius {radius} around {} leaves the fragment", f.describe(base)))?;
                    out.push(w);
                    next.push((w, Some((x, inv))));
                }
            }
        }
        frontier = next;
    }
    Ok(out)
}

/// `σ` on sorts `1..=m` sending `ā_{≠d}` to `ā′_{≠d}` at level `m`.
///
/// At level 1 it swaps labels 0 and 1 when `d = 1` and is the identity
/// when `d = 2`. At level `m + 1` the lower map `τ` for the drop index
/// `d mod 2^m` is extended orbit by orbit: `g ∗ base ↦ τ(g) ∗ base′`,
/// where `base` is `b_r`, or `b_{r+2^m}` when `b_r` is the dropped entry.
/// Words `g` range over the labels `Λ` that `τ` carries to labels, and
/// `σ` is defined on the radius-`radius` balls around the kept entries.
fn level_map(
    f: &Fragment,
    levels: &[(Vec<Elem>, Vec<Elem>)],
    m: usize,
    d: usize,
    radius: usize,
) -> std::result::Result<SortMaps, String> {
    let (acc, rej) = &levels[m - 1];
    let mut maps = if m == 1 {
        let mut tau: HashMap<Elem, Elem> = f.vertices_of_sort(1).iter().map(|&x| (x, x)).collect();
        if d == 1 {
            tau.insert(0, 1);
            tau.insert(1, 0);
        }
        BTreeMap::from([(1, tau)])
    } else {
        let half = 1usize << (m - 1);
        let i = (d - 1) % half + 1;
        let mut maps = level_map(f, levels, m - 1, i, radius)?;
        let tau = &maps[&(m - 1)];
        let lambda: Vec<Elem> = f
            .active_labels(m)
            .iter()
            .copied()
            .filter(|x| tau.get(x).is_some_and(|&y| f.is_active(m, y)))
            .collect();
        let images: HashSet<Elem> = lambda.iter().map(|x| tau[x]).collect();
        if images.len() != lambda.len() {
            return Err(format!("the lower map is not injective on the labels of sort {m}"));
        }
        let lambda_image: Vec<Elem> = lambda.iter().map(|x| tau[x]).collect();
        let mut sigma: HashMap<Elem, Elem> = HashMap::new();
        let mut inverse: HashMap<Elem, Elem> = HashMap::new();
        for r in 1..=half {
            // entries of the dropped tuple lying in orbit r
            let entries = |t: &[Elem]| -> Vec<Elem> {
                [r - 1, r - 1 + half]
                    .into_iter()
                    .filter(|&p| p + 1 != d)
                    .map(|p| t[p])
                    .collect()
            };
            let (from, to) = (entries(acc), entries(rej));
            let mut domain = HashSet::new();
            for &e in &from {
                domain.extend(ball(f, e, &lambda, radius)?);
            }
            let mut target = HashSet::new();
            for &e in &to {
                target.extend(ball(f, e, &lambda_image, radius)?);
            }
            // walk the domain from its first entry, copying each step
            let mut stack = vec![(from[0], to[0])];
            sigma.insert(from[0], to[0]);
            inverse.insert(to[0], from[0]);
            while let Some((v, w)) = stack.pop() {
                for (&x, &y) in lambda.iter().zip(&lambda_image) {
                    for inv in [false, true] {
                        let Some(v2) = f.act(x, v, inv).filter(|v2| domain.contains(v2)) else {
                            continue;
                        };
                        if sigma.contains_key(&v2) {
                            continue;
                        }
                        let w2 = f
                            .act(y, w, inv)
                            .ok_or_else(|| format!("image ball in sort {m} leaves the fragment"))?;
                        if inverse.insert(w2, v2).is_some() {
                            return Err(format!("sigma is not injective at {}", f.describe(v2)));
                        }
                        sigma.insert(v2, w2);
                        stack.push((v2, w2));
                    }
                }
            }
            let image: HashSet<Elem> = domain.iter().filter_map(|v| sigma.get(v).copied()).collect();
            if image.len() != domain.len() || image != target {
                return Err(format!(
                    "sigma does not carry the balls around orbit {r} onto those around {}",
                    f.describe(to[0])
                ));
            }
        }
        for (&v, &w) in &sigma {
            for (&x, &y) in lambda.iter().zip(&lambda_image) {
                for inv in [false, true] {
                    if let Some(v2) = f.act(x, v, inv).filter(|v2| sigma.contains_key(v2)) {
                        if f.act(y, w, inv) != Some(sigma[&v2]) {
                            return Err(format!("edge at {} is not preserved", f.describe(v)));
                        }
                    }
                    if let Some(w2) = f.act(y, w, inv).filter(|w2| inverse.contains_key(w2)) {
                        if f.act(x, v, inv) != Some(inverse[&w2]) {
                            return Err(format!("edge at {} is not reflected", f.describe(w)));
                        }
                    }
                }
            }
        }
        maps.insert(m, sigma);
        maps
    };
    let top = &maps[&m];
    for p in (1..=acc.len()).filter(|&p| p != d) {
        if top.get(&acc[p - 1]) != Some(&rej[p - 1]) {
            return Err(format!("entry {p} of the level-{m} tuple is not sent to its counterpart"));
        }
    }
    maps.retain(|_, map| !map.is_empty());
    Ok(maps)
}

fn readable(f: &Fragment, maps: &SortMaps) -> Vec<SortMap> {
    maps.iter()
        .map(|(&sort, map)| {
            let mut pairs: Vec<(Elem, Elem)> = map.iter().map(|(&a, &b)| (a, b)).collect();
            pairs.sort_unstable();
            SortMap {
                sort,
                pairs: pairs.into_iter().map(|(a, b)| (f.describe(a), f.describe(b))).collect(),
            }
        })
        .collect()
}

/// For every dropped index `j`, build a label-respecting isomorphism of
/// radius-`r` balls sending `b̄_{≠j}` to `b̄′_{≠j}`, for each `r` up to
/// `radius`. Drops are checked on separate threads.
pub fn check_drop_one_agreement(w: &GoodeWitness, f: &Fragment, radius: usize) -> Result<AgreementReport> {
    if radius > f.depth() {
        return Err(Error::input(format!(
            "radius {radius} exceeds the fragment depth {}",
            f.depth()
        )));
    }
    let levels = witness_levels(f, w.n + 1)?;
    let top = &levels[w.n];
    if top.0 != w.b || top.1 != w.b_prime {
        return Err(Error::input("witness was not built from this fragment"));
    }
    let len = w.b.len();
    let drops: Vec<DropReport> = std::thread::scope(|scope| {
        let handles: Vec<_> = (1..=len)
            .map(|j| {
                let levels = &levels;
                scope.spawn(move || {
                    let mut best = None;
                    let mut failure = None;
                    for r in 0..=radius {
                        match level_map(f, levels, w.n + 1, j, r) {
                            Ok(maps) => best = Some((r, maps)),
                            Err(e) => {
                                failure = Some(e);
                                break;
                            }
                        }
                    }
                    DropReport {
                        j,
                        success: failure.is_none(),
                        max_radius: best.as_ref().map(|b| b.0),
                        failure,
                        maps: best.map(|b| readable(f, &b.1)).unwrap_or_default(),
                    }
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("agreement thread panicked")).collect()
    });
    let success = drops.iter().all(|d| d.success);
    let max_radius = drops.iter().map(|d| d.max_radius).min().flatten();
    Ok(AgreementReport {
        n: w.n,
        radius,
        success,
        max_radius,
        drops,
    })
}
