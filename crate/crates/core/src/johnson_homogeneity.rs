//! Extending isomorphisms between finite families of k-sets to injections
//! of the ground set, and the bound used to define the intersection
//! relations from the graph relation.

use std::collections::{BTreeMap, HashSet};

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::combin::{index_sets, mask_members};
use crate::error::{Error, Result};

/// The on-disk form of an instance: `alpha[i]` is the index in `T` of the
/// image of `S[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsoInstance {
    #[serde(rename = "S")]
    pub s: Vec<Vec<u32>>,
    #[serde(rename = "T")]
    pub t: Vec<Vec<u32>>,
    pub alpha: Vec<usize>,
}

/// A bijection between families `S`, `T` of k-subsets of `[n]`, checked
/// for well-formedness but not yet for preserving intersections.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LkIso {
    n: usize,
    k: usize,
    s: Vec<u64>,
    t: Vec<u64>,
    alpha: Vec<usize>,
}

fn to_mask(set: &[u32], n: usize, k: usize, family: &str) -> Result<u64> {
    let mut mask = 0u64;
    for &e in set {
        if e as usize >= n {
            return Err(Error::input(format!("{family} has a set {set:?} with a point outside [{n}]")));
        }
        mask |= 1 << e;
    }
    if mask.count_ones() as usize != k || set.len() != k {
        return Err(Error::input(format!("{family} has a set {set:?} that is not a {k}-set")));
    }
    Ok(mask)
}

impl LkIso {
    pub fn new(n: usize, k: usize, inst: &IsoInstance) -> Result<Self> {
        if k == 0 || n > 64 || k > n {
            return Err(Error::input(format!("need 1 <= k <= n <= 64, got n={n}, k={k}")));
        }
        let family = |sets: &[Vec<u32>], name: &str| -> Result<Vec<u64>> {
            let masks = sets.iter().map(|x| to_mask(x, n, k, name)).collect::<Result<Vec<_>>>()?;
            if masks.iter().collect::<HashSet<_>>().len() != masks.len() {
                return Err(Error::input(format!("{name} lists a set twice")));
            }
            Ok(masks)
        };
        let s = family(&inst.s, "S")?;
        let t = family(&inst.t, "T")?;
        let mut seen = vec![false; t.len()];
        if inst.alpha.len() != s.len() || t.len() != s.len() {
            return Err(Error::input("alpha must be a bijection from S onto T"));
        }
        for &a in &inst.alpha {
            if a >= t.len() || std::mem::replace(&mut seen[a], true) {
                return Err(Error::input("alpha must be a bijection from S onto T"));
            }
        }
        Ok(LkIso {
            n,
            k,
            s,
            t,
            alpha: inst.alpha.clone(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    fn image(&self, i: usize) -> u64 {
        self.t[self.alpha[i]]
    }

    pub fn instance(&self) -> IsoInstance {
        IsoInstance {
            s: self.s.iter().map(|&m| mask_members(m)).collect(),
            t: self.t.iter().map(|&m| mask_members(m)).collect(),
            alpha: self.alpha.clone(),
        }
    }
}

/// `E_{i,j}` holds on the `S`-side sets at `indices` but not on their images.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsoViolation {
    pub i: usize,
    pub j: usize,
    pub indices: Vec<usize>,
    /// Intersection size of the images.
    pub image_size: usize,
}

impl std::fmt::Display for IsoViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "E_{}_{} holds on S at {:?} but the images intersect in {} points",
            self.i, self.j, self.indices, self.image_size
        )
    }
}

fn meet(sets: impl Iterator<Item = u64>) -> u64 {
    sets.fold(u64::MAX, |acc, m| acc & m)
}

/// Compare every intersection of `2..=k+1` distinct members with the
/// intersection of their images. Repeated arguments of `E_{i,j}` reduce to
/// fewer distinct members, so distinct index sets cover every tuple. The
/// first violation in (size, lexicographic) order is returned.
pub fn check_lk_iso(c: &LkIso) -> Option<IsoViolation> {
    for size in 2..=(c.k + 1).min(c.s.len()) {
        for idx in index_sets(c.s.len(), size) {
            let a = meet(idx.iter().map(|&i| c.s[i])).count_ones() as usize;
            let b = meet(idx.iter().map(|&i| c.image(i))).count_ones() as usize;
            if a != b {
                return Some(IsoViolation {
                    i: size,
                    j: a,
                    indices: idx,
                    image_size: b,
                });
            }
        }
    }
    None
}

/// One `∼`-class and the expression that cuts it out.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassMap {
    pub class: Vec<u32>,
    /// Indices of `x_1..x_p`.
    pub intersect: Vec<usize>,
    /// Indices of `x_{p+1}..x_q`.
    pub subtract: Vec<usize>,
    pub image: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Injection {
    /// `(m, σ(m))` for every `m ∈ ⋃S`, by increasing `m`.
    pub sigma: Vec<(u32, u32)>,
    pub classes: Vec<ClassMap>,
}

impl Injection {
    pub fn get(&self, m: u32) -> Option<u32> {
        self.sigma
            .binary_search_by_key(&m, |&(a, _)| a)
            .ok()
            .map(|p| self.sigma[p].1)
    }
}

/// An injection on `⋃S` inducing `α`, built class by class.
///
/// Each class `C` is written as `(x_1 ∩ ⋯ ∩ x_p) ∖ (x_{p+1} ∪ ⋯ ∪ x_q)`:
/// `x_1` is the first member containing `C`, and each point of `x_1 ∖ C`
/// still present is removed by the first member that separates it from
/// `C`. The same expression over the images gives `D`, and `C` is mapped
/// onto `D` in increasing order. Images always lie in `⋃T`, so no fresh
/// points are needed.
pub fn extend_to_injection(c: &LkIso) -> Result<Injection> {
    if let Some(v) = check_lk_iso(c) {
        return Err(Error::input(format!("alpha is not an L_{} isomorphism: {v}", c.k)));
    }
    let union = c.s.iter().fold(0u64, |acc, &m| acc | m);
    // membership vector of each point, grouped into classes
    let mut by_profile: BTreeMap<Vec<bool>, u64> = BTreeMap::new();
    for m in mask_members(union) {
        let profile: Vec<bool> = c.s.iter().map(|&x| x >> m & 1 == 1).collect();
        *by_profile.entry(profile).or_default() |= 1 << m;
    }
    let mut classes: Vec<u64> = by_profile.into_values().collect();
    classes.sort_by_key(|m| m.trailing_zeros());
    let mut out = Vec::with_capacity(classes.len());
    let mut sigma = BTreeMap::new();
    for class in classes {
        let first = c.s.iter().position(|&x| x & class == class).ok_or_else(|| {
            Error::consistency(format!("class {:?} lies in no member of S", mask_members(class)))
        })?;
        let mut intersect = vec![first];
        let mut subtract = Vec::new();
        let mut current = c.s[first];
        for m in mask_members(c.s[first] & !class) {
            if current >> m & 1 == 0 {
                continue;
            }
            let sep = c
                .s
                .iter()
                .position(|&x| (x & class == class && x >> m & 1 == 0) || (x & class == 0 && x >> m & 1 == 1))
                .ok_or_else(|| Error::consistency(format!("no member separates point {m} from its class")))?;
            if c.s[sep] & class == class {
                intersect.push(sep);
                current &= c.s[sep];
            } else {
                subtract.push(sep);
                current &= !c.s[sep];
            }
        }
        if intersect.len() + subtract.len() > c.k {
            return Err(Error::consistency(format!(
                "class {:?} needed {} sets, more than k = {}",
                mask_members(class),
                intersect.len() + subtract.len(),
                c.k
            )));
        }
        if current != class {
            return Err(Error::consistency(format!(
                "expression for class {:?} evaluates to {:?}",
                mask_members(class),
                mask_members(current)
            )));
        }
        let mut image = meet(intersect.iter().map(|&i| c.image(i)));
        for &i in &subtract {
            image &= !c.image(i);
        }
        if image.count_ones() != class.count_ones() {
            return Err(Error::consistency(format!(
                "class {:?} has {} points but its image has {}",
                mask_members(class),
                class.count_ones(),
                image.count_ones()
            )));
        }
        let (from, to) = (mask_members(class), mask_members(image));
        for (&a, &b) in from.iter().zip(&to) {
            sigma.insert(a, b);
        }
        out.push(ClassMap {
            class: from,
            intersect,
            subtract,
            image: to,
        });
    }
    let inj = Injection {
        sigma: sigma.into_iter().collect(),
        classes: out,
    };
    if let Some(msg) = induction_failure(c, &inj) {
        return Err(Error::consistency(msg));
    }
    Ok(inj)
}

/// Why `σ` fails to be an injection inducing `α`, if it does.
pub fn induction_failure(c: &LkIso, inj: &Injection) -> Option<String> {
    let union = c.s.iter().fold(0u64, |acc, &m| acc | m);
    let domain: u64 = inj.sigma.iter().fold(0, |acc, &(a, _)| acc | 1 << a);
    if domain != union {
        return Some("sigma is not defined on exactly the union of S".to_string());
    }
    let image: HashSet<u32> = inj.sigma.iter().map(|&(_, b)| b).collect();
    if image.len() != inj.sigma.len() {
        return Some("sigma is not injective".to_string());
    }
    for (i, &x) in c.s.iter().enumerate() {
        let ax = c.image(i);
        for &(m, sm) in &inj.sigma {
            if (x >> m & 1 == 1) != (sm < 64 && ax >> sm & 1 == 1) {
                return Some(format!("point {m} and set {i}: membership is not carried to the image"));
            }
        }
    }
    None
}

/// `C(k·i, j + 1) + 1`.
pub fn definability_bound_n(k: u64, i: u64, j: u64) -> Result<BigUint> {
    if k < 2 || i < 3 || j + 1 > k {
        return Err(Error::input(format!("need k >= 2, i >= 3 and j <= k - 1; got k={k}, i={i}, j={j}")));
    }
    let n = k * i;
    let r = j + 1;
    let mut acc = BigUint::from(1u32);
    for t in 0..r {
        acc = acc * BigUint::from(n - t) / BigUint::from(t + 1);
    }
    Ok(acc + 1u32)
}

/// Outcome of testing the displayed equivalence on one `x̄`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceOutcome {
    /// `|⋂x̄| = j` and the greedy `y_1..y_N` meet the conditions.
    ForwardHolds,
    /// `|⋂x̄| = j` but `[n]` has too few points outside `⋃x̄`.
    ForwardInconclusive,
    ForwardFails,
    /// `|⋂x̄| < j` and the largest family found is smaller than `N`.
    BackwardHolds { largest: usize, exact: bool },
    /// `|⋂x̄| < j` yet `N` sets satisfy the conditions.
    Counterexample,
    /// `|⋂x̄| > j`: both sides fail.
    NotApplicable,
}

/// Check the equivalence on the k-sets `xs` of `[n]` with bound `big_n`.
///
/// The backward search looks for `N` candidates with pairwise
/// intersections of size `j`; it is exhaustive when there are at most 64
/// candidates and a seeded greedy search otherwise.
pub fn check_instance(n: usize, k: usize, j: usize, big_n: usize, xs: &[u64], rng: &mut impl Rng) -> InstanceOutcome {
    let common = meet(xs.iter().copied());
    let size = common.count_ones() as usize;
    let union = xs.iter().fold(0u64, |acc, &m| acc | m);
    if size > j {
        return InstanceOutcome::NotApplicable;
    }
    if size == j {
        let core = common;
        let fresh: Vec<u32> = (0..n as u32).filter(|&p| union >> p & 1 == 0).collect();
        if fresh.len() < big_n * (k - j) {
            return InstanceOutcome::ForwardInconclusive;
        }
        let ys: Vec<u64> = fresh
            .chunks(k - j)
            .take(big_n)
            .map(|c| c.iter().fold(core, |acc, &p| acc | 1 << p))
            .collect();
        let ok = ys.len() == big_n
            && ys.iter().all(|&y| xs.iter().all(|&x| (x & y).count_ones() as usize == j))
            && ys.iter().enumerate().all(|(p, &y)| ys[p + 1..].iter().all(|&z| (y & z).count_ones() as usize == j));
        return if ok {
            InstanceOutcome::ForwardHolds
        } else {
            InstanceOutcome::ForwardFails
        };
    }
    let candidates: Vec<u64> = k_subsets(n, k)
        .filter(|&y| xs.iter().all(|&x| (x & y).count_ones() as usize == j))
        .collect();
    let compatible = |a: u64, b: u64| (a & b).count_ones() as usize == j;
    let (largest, exact) = if candidates.len() <= 64 {
        (max_clique(&candidates, big_n, &compatible), true)
    } else {
        let mut best = 0;
        let mut order = candidates.clone();
        for _ in 0..32 {
            order.shuffle(rng);
            let mut chosen: Vec<u64> = Vec::new();
            for &y in &order {
                if chosen.iter().all(|&z| compatible(y, z)) {
                    chosen.push(y);
                }
            }
            best = best.max(chosen.len());
        }
        (best, false)
    };
    if largest >= big_n {
        InstanceOutcome::Counterexample
    } else {
        InstanceOutcome::BackwardHolds { largest, exact }
    }
}

fn k_subsets(n: usize, k: usize) -> impl Iterator<Item = u64> {
    index_sets(n, k)
        .into_iter()
        .map(|idx| idx.iter().fold(0u64, |acc, &p| acc | 1 << p))
}

/// Size of a largest pairwise compatible family, capped at `cap`.
fn max_clique(cands: &[u64], cap: usize, compatible: &dyn Fn(u64, u64) -> bool) -> usize {
    let m = cands.len();
    let adj: Vec<u64> = (0..m)
        .map(|a| (0..m).filter(|&b| b != a && compatible(cands[a], cands[b])).fold(0u64, |acc, b| acc | 1 << b))
        .collect();
    fn grow(size: usize, allowed: u64, adj: &[u64], cap: usize, best: &mut usize) {
        *best = (*best).max(size);
        if *best >= cap || size + allowed.count_ones() as usize <= *best {
            return;
        }
        let mut rest = allowed;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            grow(size + 1, rest & adj[v], adj, cap, best);
            if *best >= cap {
                return;
            }
        }
    }
    let mut best = 0;
    let all = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
    grow(0, all, &adj, cap, &mut best);
    best
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PigeonholeReport {
    pub n: usize,
    pub k: usize,
    pub i: usize,
    pub j: usize,
    pub big_n: String,
    pub seed: u64,
    pub trials: u64,
    pub forward_holds: u64,
    pub forward_inconclusive: u64,
    pub backward_exact: u64,
    pub backward_heuristic: u64,
    pub not_applicable: u64,
    pub counterexamples: u64,
    pub forward_failures: u64,
    /// Some trial could not decide its case.
    pub inconclusive: bool,
}

/// Random `x̄` of `i` k-subsets of `[n]`, each tested with [`check_instance`].
pub fn pigeonhole_check(n: usize, k: usize, i: usize, j: usize, trials: u64, seed: u64) -> Result<PigeonholeReport> {
    let big = definability_bound_n(k as u64, i as u64, j as u64)?;
    if n > 24 || n < k {
        return Err(Error::input(format!("pigeonhole check needs k <= n <= 24, got n={n}")));
    }
    let big_n = usize::try_from(&big).map_err(|_| Error::resource("definability bound N", usize::MAX as u64))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool: Vec<u64> = k_subsets(n, k).collect();
    let mut r = PigeonholeReport {
        n,
        k,
        i,
        j,
        big_n: big.to_string(),
        seed,
        trials,
        forward_holds: 0,
        forward_inconclusive: 0,
        backward_exact: 0,
        backward_heuristic: 0,
        not_applicable: 0,
        counterexamples: 0,
        forward_failures: 0,
        inconclusive: false,
    };
    for _ in 0..trials {
        let xs: Vec<u64> = (0..i).map(|_| pool[rng.gen_range(0..pool.len())]).collect();
        match check_instance(n, k, j, big_n, &xs, &mut rng) {
            InstanceOutcome::ForwardHolds => r.forward_holds += 1,
            InstanceOutcome::ForwardInconclusive => r.forward_inconclusive += 1,
            InstanceOutcome::ForwardFails => r.forward_failures += 1,
            InstanceOutcome::BackwardHolds { exact: true, .. } => r.backward_exact += 1,
            InstanceOutcome::BackwardHolds { exact: false, .. } => r.backward_heuristic += 1,
            InstanceOutcome::Counterexample => r.counterexamples += 1,
            InstanceOutcome::NotApplicable => r.not_applicable += 1,
        }
    }
    r.inconclusive = r.forward_inconclusive > 0 || r.backward_heuristic > 0;
    Ok(r)
}

/// `S` of `m` random k-subsets of `[n]`, `T = π(S)` for a hidden random
/// permutation `π`, listed in shuffled order.
pub fn random_permutation_instance(n: usize, k: usize, m: usize, rng: &mut impl Rng) -> Result<(LkIso, Vec<u32>)> {
    let mut pi: Vec<u32> = (0..n as u32).collect();
    pi.shuffle(rng);
    let mut s: Vec<Vec<u32>> = Vec::new();
    let mut seen = HashSet::new();
    let total = crate::combin::binomial(n as u64, k as u64).unwrap_or(u64::MAX);
    if (m as u64) > total {
        return Err(Error::input(format!("cannot pick {m} distinct {k}-subsets of [{n}]")));
    }
    while s.len() < m {
        let mut pts: Vec<u32> = (0..n as u32).collect();
        pts.shuffle(rng);
        let mut x = pts[..k].to_vec();
        x.sort_unstable();
        if seen.insert(x.clone()) {
            s.push(x);
        }
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(rng);
    // T lists the images in shuffled order; alpha[i] is where S[i] went
    let mut t = vec![Vec::new(); m];
    let mut alpha = vec![0; m];
    for (i, &slot) in order.iter().enumerate() {
        let mut y: Vec<u32> = s[i].iter().map(|&p| pi[p as usize]).collect();
        y.sort_unstable();
        t[slot] = y;
        alpha[i] = slot;
    }
    Ok((LkIso::new(n, k, &IsoInstance { s, t, alpha })?, pi))
}

/// Isomorphisms out of `S` found by backtracking over image sets, with no
/// permutation fixed in advance. Candidate images are tried in a seeded
/// random order; each partial assignment must already preserve every
/// intersection it determines. At most `limit` are returned, skipping the
/// identity.
pub fn search_isos(n: usize, k: usize, s: &[Vec<u32>], limit: usize, rng: &mut impl Rng) -> Result<Vec<LkIso>> {
    let base = LkIso::new(
        n,
        k,
        &IsoInstance {
            s: s.to_vec(),
            t: s.to_vec(),
            alpha: (0..s.len()).collect(),
        },
    )?;
    let mut pool: Vec<u64> = k_subsets(n, k).collect();
    pool.shuffle(rng);
    let mut found = Vec::new();
    let mut chosen: Vec<u64> = Vec::new();
    fn consistent(src: &[u64], chosen: &[u64], k: usize) -> bool {
        let last = chosen.len() - 1;
        (1..=k.min(last)).all(|size| {
            index_sets(last, size).into_iter().all(|mut idx| {
                idx.push(last);
                meet(idx.iter().map(|&i| src[i])).count_ones() == meet(idx.iter().map(|&i| chosen[i])).count_ones()
            })
        })
    }
    fn rec(src: &[u64], pool: &[u64], chosen: &mut Vec<u64>, k: usize, limit: usize, found: &mut Vec<Vec<u64>>) {
        if found.len() >= limit {
            return;
        }
        if chosen.len() == src.len() {
            if chosen.as_slice() != src {
                found.push(chosen.clone());
            }
            return;
        }
        for &y in pool {
            if chosen.contains(&y) {
                continue;
            }
            chosen.push(y);
            if consistent(src, chosen, k) {
                rec(src, pool, chosen, k, limit, found);
            }
            chosen.pop();
            if found.len() >= limit {
                return;
            }
        }
    }
    let mut images = Vec::new();
    rec(&base.s, &pool, &mut chosen, k, limit, &mut images);
    for t in images {
        found.push(LkIso {
            n,
            k,
            s: base.s.clone(),
            t,
            alpha: (0..s.len()).collect(),
        });
    }
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(s: Vec<Vec<u32>>, t: Vec<Vec<u32>>) -> IsoInstance {
        let alpha = (0..s.len()).collect();
        IsoInstance { s, t, alpha }
    }

    #[test]
    fn identity_extends_to_identity() {
        let s = vec![vec![0, 1, 2], vec![2, 3, 4], vec![0, 4, 5]];
        let c = LkIso::new(8, 3, &inst(s.clone(), s)).unwrap();
        assert_eq!(check_lk_iso(&c), None);
        let inj = extend_to_injection(&c).unwrap();
        assert!(inj.sigma.iter().all(|&(a, b)| a == b));
        assert_eq!(inj.sigma.len(), 6);
    }

    #[test]
    fn triples_are_not_l2_isomorphic() {
        let c = LkIso::new(
            4,
            2,
            &inst(vec![vec![0, 1], vec![0, 2], vec![1, 2]], vec![vec![0, 1], vec![0, 2], vec![0, 3]]),
        )
        .unwrap();
        let v = check_lk_iso(&c).unwrap();
        assert_eq!((v.i, v.j, v.indices.clone(), v.image_size), (3, 0, vec![0, 1, 2], 1));
        assert!(extend_to_injection(&c).is_err());
    }

    #[test]
    fn malformed_input() {
        let bad = |s: Vec<Vec<u32>>, t: Vec<Vec<u32>>, alpha: Vec<usize>| LkIso::new(5, 2, &IsoInstance { s, t, alpha });
        assert!(bad(vec![vec![0, 7]], vec![vec![0, 1]], vec![0]).is_err());
        assert!(bad(vec![vec![0, 0]], vec![vec![0, 1]], vec![0]).is_err());
        assert!(bad(vec![vec![0, 1], vec![1, 0]], vec![vec![0, 1], vec![1, 2]], vec![0, 1]).is_err());
        assert!(bad(vec![vec![0, 1], vec![1, 2]], vec![vec![0, 1], vec![1, 2]], vec![0, 0]).is_err());
    }

    #[test]
    fn hidden_permutations_are_recovered() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let (c, pi) = random_permutation_instance(20, 3, 10, &mut rng).unwrap();
            assert_eq!(check_lk_iso(&c), None);
            let inj = extend_to_injection(&c).unwrap();
            assert_eq!(induction_failure(&c, &inj), None);
            // σ and π agree up to permuting points inside a class
            for cl in &inj.classes {
                let mut a: Vec<u32> = cl.class.iter().map(|&m| pi[m as usize]).collect();
                a.sort_unstable();
                assert_eq!(a, cl.image);
            }
        }
    }

    #[test]
    fn searched_isos_extend() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let s = vec![vec![0, 1, 2], vec![1, 2, 3], vec![3, 4, 5], vec![0, 5, 6]];
        let isos = search_isos(10, 3, &s, 12, &mut rng).unwrap();
        assert_eq!(isos.len(), 12);
        for c in &isos {
            assert_eq!(check_lk_iso(c), None);
            let inj = extend_to_injection(c).unwrap();
            assert_eq!(induction_failure(c, &inj), None);
        }
    }

    #[test]
    fn bound_values() {
        assert_eq!(definability_bound_n(2, 3, 0).unwrap(), BigUint::from(7u32));
        assert_eq!(definability_bound_n(2, 3, 1).unwrap(), BigUint::from(16u32));
        assert!(definability_bound_n(1, 3, 0).is_err());
        assert!(definability_bound_n(2, 2, 0).is_err());
        assert!(definability_bound_n(2, 3, 2).is_err());
        // large arguments need big integers
        assert!(definability_bound_n(40, 40, 39).unwrap().bits() > 64);
    }

    #[test]
    fn pigeonhole_exhaustive_small() {
        // every triple of 2-subsets of [7] with j = 1: the backward search is exact
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let pool: Vec<u64> = k_subsets(7, 2).collect();
        let mut backward = 0;
        for &a in &pool {
            for &b in &pool {
                for &c in &pool {
                    match check_instance(7, 2, 1, 16, &[a, b, c], &mut rng) {
                        InstanceOutcome::Counterexample | InstanceOutcome::ForwardFails => panic!("{a} {b} {c}"),
                        InstanceOutcome::BackwardHolds { exact, .. } => {
                            assert!(exact);
                            backward += 1;
                        }
                        _ => {}
                    }
                }
            }
        }
        assert!(backward > 0);
    }

    #[test]
    fn forward_direction_at_larger_n() {
        let xs: Vec<u64> = [vec![0u32, 1], vec![0, 2], vec![0, 3]]
            .iter()
            .map(|s| s.iter().fold(0u64, |a, &p| a | 1 << p))
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(check_instance(24, 2, 1, 16, &xs, &mut rng), InstanceOutcome::ForwardHolds);
        assert_eq!(check_instance(12, 2, 1, 16, &xs, &mut rng), InstanceOutcome::ForwardInconclusive);
    }

    #[test]
    fn pigeonhole_reports() {
        let r = pigeonhole_check(12, 2, 3, 1, 0, 1).unwrap();
        assert_eq!(r.trials, 0);
        assert_eq!(r.forward_holds + r.backward_exact + r.not_applicable, 0);
        let r = pigeonhole_check(12, 2, 3, 1, 200, 1).unwrap();
        assert_eq!(r.counterexamples, 0);
        assert_eq!(r.forward_failures, 0);
    }
}
