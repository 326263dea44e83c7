use std::collections::{BTreeMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::combin::index_sets;
use crate::error::{Error, Result};
use crate::structures::{Elem, RelationSymbol, Relational, Signature, Structure};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HypergraphMode {
    /// One independent `edge_prob` coin per k-subset, in lexicographic order.
    Random { seed: u64, edge_prob: f64 },
    Explicit(Vec<Vec<Elem>>),
}

/// A k-uniform hypergraph on `0..n` with one symmetric k-ary relation `E`.
pub fn gen_hypergraph(n: usize, k: usize, mode: &HypergraphMode) -> Result<Structure> {
    if k < 2 || k > n {
        return Err(Error::input(format!("need 2 <= k <= n, got k={k}, n={n}")));
    }
    let edges: Vec<Vec<Elem>> = match mode {
        HypergraphMode::Random { seed, edge_prob } => {
            if !(0.0..=1.0).contains(edge_prob) {
                return Err(Error::input(format!("edge probability {edge_prob} outside [0, 1]")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            index_sets(n, k)
                .into_iter()
                .filter(|_| rng.gen_bool(*edge_prob))
                .map(|s| s.into_iter().map(|e| e as Elem).collect())
                .collect()
        }
        HypergraphMode::Explicit(list) => {
            for e in list {
                if e.len() != k {
                    return Err(Error::input(format!("edge {e:?} does not have {k} vertices")));
                }
                let distinct: HashSet<_> = e.iter().collect();
                if distinct.len() != k {
                    return Err(Error::input(format!("edge {e:?} repeats a vertex")));
                }
            }
            list.clone()
        }
    };
    let sig = Signature::new(vec![RelationSymbol::new("E", k)])?;
    let mut sets = BTreeMap::new();
    sets.insert("E".to_string(), edges);
    Structure::from_symmetric_sets(sig, n, sets)
}

/// Sorted edge sets of a hypergraph built by [`gen_hypergraph`].
pub fn edge_sets(h: &Structure) -> Vec<Vec<Elem>> {
    h.table(0).rows().iter().map(|r| r.to_vec()).collect()
}

/// A hypergraph together with its parity reduct.
#[derive(Debug, Clone)]
pub struct KayGraphPair {
    pub k: usize,
    /// One symmetric k-ary relation `E`.
    pub base: Structure,
    /// One symmetric (k+1)-ary relation `R` on the same universe.
    pub reduct: Structure,
}

fn single_relation(h: &Structure) -> Result<usize> {
    if h.signature().len() != 1 {
        return Err(Error::input(format!(
            "parity reduct needs exactly one relation, found {}",
            h.signature().len()
        )));
    }
    let t = h.table(0);
    if t.is_empty() || t.is_symmetric() {
        return Ok(t.arity());
    }
    if t.rows().iter().any(|r| {
        let s: HashSet<_> = r.iter().collect();
        s.len() != r.len()
    }) {
        return Err(Error::input("hypergraph relation has a tuple with repeated entries"));
    }
    Err(Error::input("hypergraph relation is not closed under coordinate permutations"))
}

/// `R(v_1..v_{k+1})` holds for distinct `v` iff an odd number of the
/// drop-one k-subsets are edges. Repeated-entry tuples are never in `R`.
pub fn parity_reduct(h: &Structure) -> Result<KayGraphPair> {
    let k = single_relation(h)?;
    let n = h.universe();
    let mut r_sets = Vec::new();
    let mut drop = Vec::with_capacity(k);
    for set in index_sets(n, k + 1) {
        let set: Vec<Elem> = set.into_iter().map(|e| e as Elem).collect();
        let mut count = 0;
        for i in 0..=k {
            drop.clear();
            drop.extend(set.iter().enumerate().filter(|&(p, _)| p != i).map(|(_, &e)| e));
            if h.holds(0, &drop) {
                count += 1;
            }
        }
        if count % 2 == 1 {
            r_sets.push(set);
        }
    }
    let sig = Signature::new(vec![RelationSymbol::new("R", k + 1)])?;
    let mut sets = BTreeMap::new();
    sets.insert("R".to_string(), r_sets);
    Ok(KayGraphPair {
        k,
        base: h.clone(),
        reduct: Structure::from_symmetric_sets(sig, n, sets)?,
    })
}

/// Number of failed one-point extension demands.
///
/// For every k-set `W` and every choice `P` of its (k−1)-subsets, the
/// random hypergraph demands a vertex `v ∉ W` whose links to `W` are
/// exactly `P` (`E(v ∪ S)` iff `S ∈ P`). Counts the pairs `(W, P)` with no
/// such vertex.
pub fn extension_deficiency(h: &Structure) -> Result<u64> {
    let k = single_relation(h)?;
    let n = h.universe();
    let mut missing = 0;
    let mut buf = Vec::with_capacity(k);
    for w in index_sets(n, k) {
        let w: Vec<Elem> = w.into_iter().map(|e| e as Elem).collect();
        let faces: Vec<Vec<Elem>> = index_sets(k, k - 1)
            .into_iter()
            .map(|f| f.into_iter().map(|p| w[p]).collect())
            .collect();
        let mut realised = vec![false; 1 << faces.len()];
        for v in 0..n as Elem {
            if w.contains(&v) {
                continue;
            }
            let mut pattern = 0usize;
            for (fi, face) in faces.iter().enumerate() {
                buf.clear();
                buf.extend_from_slice(face);
                buf.push(v);
                if h.holds(0, &buf) {
                    pattern |= 1 << fi;
                }
            }
            realised[pattern] = true;
        }
        missing += realised.iter().filter(|&&r| !r).count() as u64;
    }
    Ok(missing)
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;

    #[test]
    fn n_equals_k_has_at_most_one_edge() {
        for seed in 0..5 {
            let h = gen_hypergraph(3, 3, &HypergraphMode::Random { seed, edge_prob: 0.5 }).unwrap();
            assert!(edge_sets(&h).len() <= 1);
        }
    }

    #[test]
    fn bad_parameters() {
        assert!(gen_hypergraph(2, 3, &HypergraphMode::Explicit(vec![])).is_err());
        assert!(gen_hypergraph(4, 2, &HypergraphMode::Explicit(vec![vec![1, 1]])).is_err());
        assert!(gen_hypergraph(4, 2, &HypergraphMode::Random { seed: 0, edge_prob: 1.5 }).is_err());
    }

    #[test]
    fn random_edge_count_is_pinned() {
        let h = gen_hypergraph(12, 3, &HypergraphMode::Random { seed: 1, edge_prob: 0.5 }).unwrap();
        let edges = edge_sets(&h).len() as f64;
        // Binomial(220, 1/2): mean 110, sd ~7.42
        let sd = (220.0f64 * 0.25).sqrt();
        assert!((edges - 110.0).abs() <= 4.0 * sd, "{edges}");
        assert_eq!(edges as usize, RANDOM_12_3_SEED1_EDGES);
        let again = gen_hypergraph(12, 3, &HypergraphMode::Random { seed: 1, edge_prob: 0.5 }).unwrap();
        assert_eq!(again.to_json_string(), h.to_json_string());
    }

    const RANDOM_12_3_SEED1_EDGES: usize = 100;

    #[test]
    fn empty_hypergraph_has_empty_reduct() {
        let h = gen_hypergraph(6, 2, &HypergraphMode::Explicit(vec![])).unwrap();
        let kg = parity_reduct(&h).unwrap();
        assert!(kg.reduct.table(0).is_empty());
    }

    #[test]
    fn single_edge_makes_r_hold() {
        let h = gen_hypergraph(5, 2, &HypergraphMode::Explicit(vec![vec![0, 1]])).unwrap();
        let kg = parity_reduct(&h).unwrap();
        // {0,1,2}: only {0,1} is an edge
        assert!(kg.reduct.holds(0, &[2, 0, 1]));
        assert!(!kg.reduct.holds(0, &[2, 3, 4]));
        assert!(!kg.reduct.holds(0, &[0, 0, 1]));
    }

    #[test]
    fn reduct_is_symmetric_and_matches_parity() {
        let h = gen_hypergraph(7, 3, &HypergraphMode::Random { seed: 3, edge_prob: 0.4 }).unwrap();
        let kg = parity_reduct(&h).unwrap();
        for t in (0..7 as Elem).permutations(4) {
            let odd = (0..4)
                .filter(|&i| {
                    let d: Vec<Elem> = t.iter().enumerate().filter(|&(p, _)| p != i).map(|(_, &e)| e).collect();
                    h.holds(0, &d)
                })
                .count()
                % 2
                == 1;
            assert_eq!(kg.reduct.holds(0, &t), odd);
        }
        for row in kg.reduct.table(0).tuples() {
            for p in row.iter().copied().permutations(4) {
                assert!(kg.reduct.holds(0, &p));
            }
        }
    }

    #[test]
    fn flipping_an_edge_flips_its_cofaces() {
        let (n, k) = (8usize, 3usize);
        let h = gen_hypergraph(n, k, &HypergraphMode::Random { seed: 9, edge_prob: 0.5 }).unwrap();
        let mut edges = edge_sets(&h);
        let e = vec![1, 4, 6];
        match edges.iter().position(|x| *x == e) {
            Some(i) => {
                edges.remove(i);
            }
            None => edges.push(e.clone()),
        }
        let h2 = gen_hypergraph(n, k, &HypergraphMode::Explicit(edges)).unwrap();
        let r1 = parity_reduct(&h).unwrap().reduct;
        let r2 = parity_reduct(&h2).unwrap().reduct;
        let mut flipped = 0;
        for t in (0..n as Elem).permutations(k + 1) {
            if r1.holds(0, &t) != r2.holds(0, &t) {
                flipped += 1;
                assert!(e.iter().all(|x| t.contains(x)));
            }
        }
        assert_eq!(flipped, (n - k) * (1..=k + 1).product::<usize>());
    }

    #[test]
    fn rejects_non_symmetric_input() {
        let sig = Signature::new(vec![RelationSymbol::new("E", 2)]).unwrap();
        let mut rows = BTreeMap::new();
        rows.insert("E".to_string(), vec![vec![0, 1]]);
        let s = Structure::new(sig.clone(), 3, None, rows).unwrap();
        assert!(parity_reduct(&s).is_err());
        let mut rows = BTreeMap::new();
        rows.insert("E".to_string(), vec![vec![0, 0]]);
        let s = Structure::new(sig, 3, None, rows).unwrap();
        assert!(parity_reduct(&s).is_err());
    }

    #[test]
    fn complete_hypergraph_has_no_deficiency_gaps_it_cannot_fill() {
        // complete: every vertex links to every face, so only the all-ones
        // pattern is realised
        let edges: Vec<Vec<Elem>> = index_sets(6, 2)
            .into_iter()
            .map(|s| s.into_iter().map(|e| e as Elem).collect())
            .collect();
        let h = gen_hypergraph(6, 2, &HypergraphMode::Explicit(edges)).unwrap();
        // 15 pairs W, 4 patterns each, 3 missing
        assert_eq!(extension_deficiency(&h).unwrap(), 45);
    }
}
