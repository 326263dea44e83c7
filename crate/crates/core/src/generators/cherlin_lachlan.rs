use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::combin::{index_sets, sha256_hex};
use crate::config::Caps;
use crate::error::{Error, Result};
use crate::structures::{for_each_map, Atom, Elem, RelationSymbol, Relational, Signature, Structure};

/// A pair of disjoint pairs `{{a,b},{c,d}}`, stored as `[a,b,c,d]` with
/// `a < b`, `c < d`, `a < c`.
pub type PairOfPairs = [u8; 4];

/// Codes are written with one base-36 digit per support point, so tuples
/// have at most 36 / 4 entries.
pub const MAX_ARITY: usize = 9;

const DIGITS: &[u8; 36] = b"0123456789abcdefghijklmnopqrstuvwxyz";

pub fn normalize(e: [u32; 4]) -> Result<PairOfPairs> {
    let distinct: BTreeSet<u32> = e.iter().copied().collect();
    if distinct.len() != 4 || e.iter().any(|&x| x > u32::from(u8::MAX)) {
        return Err(Error::input(format!("{e:?} is not four distinct small points")));
    }
    let p = (e[0].min(e[1]) as u8, e[0].max(e[1]) as u8);
    let q = (e[2].min(e[3]) as u8, e[2].max(e[3]) as u8);
    let (p, q) = if p < q { (p, q) } else { (q, p) };
    Ok([p.0, p.1, q.0, q.1])
}

pub fn describe(e: &PairOfPairs) -> String {
    format!("{{{{{},{}}},{{{},{}}}}}", e[0], e[1], e[2], e[3])
}

/// The eight ways of writing `e` as a word `x y z w` with `{{x,y},{z,w}} = e`.
fn presentations(e: &PairOfPairs) -> [[u8; 4]; 8] {
    let [a, b, c, d] = *e;
    [
        [a, b, c, d],
        [a, b, d, c],
        [b, a, c, d],
        [b, a, d, c],
        [c, d, a, b],
        [c, d, b, a],
        [d, c, a, b],
        [d, c, b, a],
    ]
}

struct CodeSearch<'a> {
    tuple: &'a [PairOfPairs],
    label: HashMap<u8, u8>,
    cur: Vec<u8>,
    best: Vec<u8>,
}

impl CodeSearch<'_> {
    fn run(&mut self, i: usize) {
        if i == self.tuple.len() {
            if self.best.is_empty() || self.cur < self.best {
                self.best.clone_from(&self.cur);
            }
            return;
        }
        for word in presentations(&self.tuple[i]) {
            let mut fresh = Vec::new();
            for x in word {
                let next = self.label.len() as u8;
                let l = *self.label.entry(x).or_insert_with(|| {
                    fresh.push(x);
                    next
                });
                self.cur.push(l);
            }
            let end = self.cur.len();
            if self.best.is_empty() || self.cur[..] <= self.best[..end] {
                self.run(i + 1);
            }
            self.cur.truncate(end - 4);
            for x in fresh {
                self.label.remove(&x);
            }
        }
    }
}

/// Canonical orbit code of a tuple under permutations of the ground set.
///
/// Writes each entry as one of its eight presentations, renames support
/// points by first appearance and keeps the lexicographically least word.
/// Two tuples get the same word iff a bijection between their supports
/// carries one onto the other.
pub fn orbit_code(tuple: &[PairOfPairs]) -> Vec<u8> {
    let mut s = CodeSearch {
        tuple,
        label: HashMap::new(),
        cur: Vec::with_capacity(4 * tuple.len()),
        best: Vec::new(),
    };
    s.run(0);
    s.best
}

/// Relation name for a code, e.g. `o2_01230245`.
pub fn code_name(code: &[u8]) -> String {
    let mut s = format!("o{}_", code.len() / 4);
    s.extend(code.iter().map(|&c| DIGITS[c as usize] as char));
    s
}

/// The tuple spelled by a code, on ground points `0..`.
pub fn code_representative(code: &[u8]) -> Vec<PairOfPairs> {
    code.chunks(4)
        .map(|w| normalize([w[0], w[1], w[2], w[3]].map(u32::from)).expect("codes spell pairs of pairs"))
        .collect()
}

fn all_pairs_of_pairs(n: usize) -> Vec<PairOfPairs> {
    let mut out = Vec::new();
    for s in index_sets(n, 4) {
        let [p, q, r, t] = [s[0] as u8, s[1] as u8, s[2] as u8, s[3] as u8];
        out.push([p, q, r, t]);
        out.push([p, r, q, t]);
        out.push([p, t, q, r]);
    }
    out
}

/// Pairs of pairs over `[n]` with the canonical relation per tuple orbit of
/// arity `1..=max_arity`.
#[derive(Debug, Clone)]
pub struct CherlinLachlan {
    n: usize,
    max_arity: usize,
    elems: Vec<PairOfPairs>,
    elem_index: HashMap<PairOfPairs, Elem>,
    signature: Signature,
    codes: HashMap<Vec<u8>, usize>,
}

fn check_params(n: usize, max_arity: usize) -> Result<()> {
    if n < 4 {
        return Err(Error::input(format!("need at least 4 ground points, got {n}")));
    }
    if n > 64 {
        return Err(Error::resource(format!("ground set of {n} points"), 64));
    }
    if max_arity == 0 || max_arity > MAX_ARITY {
        return Err(Error::input(format!("max arity must lie in 1..={MAX_ARITY}, got {max_arity}")));
    }
    Ok(())
}

/// Every pair of pairs over `[n]`, in lexicographic order of the 4-set and
/// then by pairing, with every orbit of tuples of length at most
/// `max_arity` realised over `[n]`.
///
/// Orbits of length `m` are found by extending one representative per
/// orbit of length `m − 1` by every pair of pairs on its support plus up
/// to four new points. Each code computation counts against
/// `caps.orbit_budget`.
pub fn gen_cherlin_lachlan(n: usize, max_arity: usize, caps: &Caps) -> Result<CherlinLachlan> {
    check_params(n, max_arity)?;
    let count = 3 * crate::combin::binomial(n as u64, 4).unwrap_or(u64::MAX);
    if count > caps.max_universe {
        return Err(Error::resource(format!("universe of {count} pairs of pairs"), caps.max_universe));
    }
    let elems = all_pairs_of_pairs(n);
    let mut spent = 0u64;
    let mut all: BTreeSet<Vec<u8>> = BTreeSet::new();
    let mut layer: BTreeSet<Vec<u8>> = BTreeSet::from([Vec::new()]);
    for _ in 0..max_arity {
        let mut next = BTreeSet::new();
        for code in &layer {
            let prefix = code_representative(code);
            let support = code.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
            let reach = (support + 4).min(n);
            for e in all_pairs_of_pairs(reach) {
                // new points beyond the support are interchangeable
                let mut fresh: Vec<u8> = e.iter().copied().filter(|&x| x as usize >= support).collect();
                fresh.sort_unstable();
                if fresh.iter().enumerate().any(|(i, &x)| x as usize != support + i) {
                    continue;
                }
                spent += 1;
                if spent > caps.orbit_budget {
                    return Err(Error::resource("orbit code computations", caps.orbit_budget));
                }
                let mut t = prefix.clone();
                t.push(e);
                next.insert(orbit_code(&t));
            }
        }
        all.extend(next.iter().cloned());
        layer = next;
    }
    CherlinLachlan::build(n, max_arity, elems, all)
}

impl CherlinLachlan {
    /// The substructure on the listed elements, with one relation per orbit
    /// realised by a tuple of them.
    pub fn on_elements(n: usize, elems: Vec<PairOfPairs>, max_arity: usize, caps: &Caps) -> Result<Self> {
        check_params(n, max_arity)?;
        let mut sorted = elems.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != elems.len() {
            return Err(Error::input("element list repeats a pair of pairs"));
        }
        if let Some(bad) = elems.iter().find(|e| e[3] as usize >= n || normalize(e.map(u32::from)).ok() != Some(**e)) {
            return Err(Error::input(format!("{bad:?} is not a normalized pair of pairs over [{n}]")));
        }
        let tuples: u64 = (1..=max_arity as u32).map(|m| (elems.len() as u64).saturating_pow(m)).sum();
        if tuples > caps.orbit_budget {
            return Err(Error::resource("orbit code computations", caps.orbit_budget));
        }
        let mut all = BTreeSet::new();
        for m in 1..=max_arity {
            for_each_map(elems.len(), m, |_, f| {
                let t: Vec<PairOfPairs> = f.iter().map(|&p| elems[p]).collect();
                all.insert(orbit_code(&t));
            });
        }
        Self::build(n, max_arity, elems, all)
    }

    fn build(n: usize, max_arity: usize, elems: Vec<PairOfPairs>, codes: BTreeSet<Vec<u8>>) -> Result<Self> {
        let signature = Signature::new(
            codes
                .iter()
                .map(|c| RelationSymbol::new(code_name(c), c.len() / 4))
                .collect(),
        )?;
        let codes = codes
            .into_iter()
            .map(|c| {
                let idx = signature.index_of(&code_name(&c)).expect("relation was just added");
                (c, idx)
            })
            .collect();
        let elem_index = elems.iter().enumerate().map(|(i, &e)| (e, i as Elem)).collect();
        Ok(CherlinLachlan {
            n,
            max_arity,
            elems,
            elem_index,
            signature,
            codes,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn max_arity(&self) -> usize {
        self.max_arity
    }

    pub fn elements(&self) -> &[PairOfPairs] {
        &self.elems
    }

    pub fn element(&self, e: [u32; 4]) -> Result<Elem> {
        let e = normalize(e)?;
        self.elem_index
            .get(&e)
            .copied()
            .ok_or_else(|| Error::input(format!("{} is not an element of this structure", describe(&e))))
    }

    pub fn tuple(&self, t: &[[u32; 4]]) -> Result<Vec<Elem>> {
        t.iter().map(|&e| self.element(e)).collect()
    }

    /// Number of orbit relations of each arity `1..=max_arity`.
    pub fn orbit_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.max_arity];
        for r in self.signature.relations() {
            counts[r.arity - 1] += 1;
        }
        counts
    }

    fn check_tuple(&self, t: &[Elem]) -> Result<()> {
        if let Some(&bad) = t.iter().find(|&&e| e as usize >= self.elems.len()) {
            return Err(Error::input(format!("element {bad} outside a universe of {}", self.elems.len())));
        }
        Ok(())
    }

    pub fn code(&self, t: &[Elem]) -> Result<Vec<u8>> {
        self.check_tuple(t)?;
        Ok(orbit_code(&t.iter().map(|&e| self.elems[e as usize]).collect::<Vec<_>>()))
    }

    /// Whether some permutation of the ground set carries `t1` onto `t2`.
    pub fn orbit_equal(&self, t1: &[Elem], t2: &[Elem]) -> Result<bool> {
        if t1.len() != t2.len() {
            return Err(Error::input(format!("tuple lengths {} and {} differ", t1.len(), t2.len())));
        }
        if t1.len() > self.max_arity {
            return Err(Error::input(format!(
                "tuples of length {} exceed the maximum arity {}",
                t1.len(),
                self.max_arity
            )));
        }
        Ok(self.code(t1)? == self.code(t2)?)
    }

    /// Materialize every orbit relation, subject to `caps.max_table_rows`.
    pub fn to_structure(&self, caps: &Caps) -> Result<Structure> {
        let size = self.elems.len() as u64;
        let rows_total: u64 = (1..=self.max_arity as u32).map(|m| size.saturating_pow(m)).sum();
        if rows_total > caps.max_table_rows {
            return Err(Error::resource(format!("{rows_total} orbit relation rows"), caps.max_table_rows));
        }
        let mut rows: BTreeMap<String, Vec<Vec<Elem>>> = BTreeMap::new();
        for m in 1..=self.max_arity {
            for_each_map(self.elems.len(), m, |_, f| {
                let t: Vec<PairOfPairs> = f.iter().map(|&p| self.elems[p]).collect();
                rows.entry(code_name(&orbit_code(&t)))
                    .or_default()
                    .push(f.iter().map(|&p| p as Elem).collect());
            });
        }
        Structure::new(self.signature.clone(), self.elems.len(), None, rows)
    }

    /// `code,arity,representative` rows, one per orbit relation, in
    /// signature order.
    pub fn orbit_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["code", "arity", "representative"])
            .map_err(|e| Error::input(e.to_string()))?;
        let mut by_name: Vec<(&Vec<u8>, &usize)> = self.codes.iter().collect();
        by_name.sort_by_key(|&(_, &i)| i);
        for (code, _) in by_name {
            let rep = code_representative(code).iter().map(describe).collect::<Vec<_>>().join(" ");
            w.write_record([code_name(code), (code.len() / 4).to_string(), rep])
                .map_err(|e| Error::input(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::input(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is ascii"))
    }
}

impl Relational for CherlinLachlan {
    fn signature(&self) -> &Signature {
        &self.signature
    }

    fn universe_size(&self) -> usize {
        self.elems.len()
    }

    fn holds(&self, rel: usize, tuple: &[Elem]) -> bool {
        let t: Vec<PairOfPairs> = tuple.iter().map(|&e| self.elems[e as usize]).collect();
        self.codes.get(&orbit_code(&t)) == Some(&rel)
    }

    fn digest(&self) -> String {
        let mut b = format!("cherlin-lachlan:n={},max_arity={};", self.n, self.max_arity);
        for e in &self.elems {
            b.push_str(&describe(e));
        }
        sha256_hex(b.as_bytes())
    }

    /// Every rearrangement of at most `max_arity` entries lies in exactly
    /// one orbit relation.
    fn collect_atoms(&self, t: &[Elem], out: &mut Vec<Atom>) {
        let mut sub = Vec::with_capacity(self.max_arity);
        for r in 1..=self.max_arity {
            for_each_map(t.len(), r, |idx, f| {
                sub.clear();
                sub.extend(f.iter().map(|&p| self.elems[t[p] as usize]));
                let rel = self
                    .codes
                    .get(&orbit_code(&sub))
                    .expect("every realised orbit has a relation");
                out.push((*rel as u32, idx));
            });
        }
    }
}

/// The cycle tuples `(m_1..m_{k+1})` and `(m_1..m_k, m'_{k+1})` on ground
/// points `a_i = i − 1`, `b_i = k + i` (for `i = 1..=k+1`), where
/// `m_i = {{a_i, a_{i+1}}, {b_i, b_{i+1}}}` with indices mod `k+1` and
/// `m'_{k+1} = {{a_1, b_{k+1}}, {b_1, a_{k+1}}}`.
pub fn cycle_witness(k: usize) -> Result<(Vec<PairOfPairs>, Vec<PairOfPairs>)> {
    if k == 0 || k + 1 > MAX_ARITY {
        return Err(Error::input(format!("cycle witnesses need 1 <= k <= {}", MAX_ARITY - 1)));
    }
    let a = |i: usize| ((i - 1) % (k + 1)) as u32;
    let b = |i: usize| (k + 1 + (i - 1) % (k + 1)) as u32;
    let mut first = Vec::new();
    for i in 1..=k + 1 {
        first.push(normalize([a(i), a(i + 1), b(i), b(i + 1)])?);
    }
    let mut second = first.clone();
    second[k] = normalize([a(1), b(k + 1), b(1), a(k + 1)])?;
    Ok((first, second))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Orbit classes of `m`-tuples of pairs of pairs over `[n]` under
    /// `Sym(n)`, by union-find over a transposition and an `n`-cycle.
    fn brute_orbits(n: usize, m: usize) -> (Vec<PairOfPairs>, Vec<u32>) {
        let elems = all_pairs_of_pairs(n);
        let index: HashMap<PairOfPairs, usize> = elems.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let gens: Vec<Vec<u8>> = vec![
            (0..n as u8).map(|x| if x < 2 { 1 - x } else { x }).collect(),
            (0..n as u8).map(|x| (x + 1) % n as u8).collect(),
        ];
        let act: Vec<Vec<usize>> = gens
            .iter()
            .map(|g| {
                elems
                    .iter()
                    .map(|e| index[&normalize(e.map(|x| u32::from(g[x as usize]))).unwrap()])
                    .collect()
            })
            .collect();
        let size = elems.len();
        let total = size.pow(m as u32);
        let mut parent: Vec<u32> = (0..total as u32).collect();
        fn find(p: &mut [u32], mut x: u32) -> u32 {
            while p[x as usize] != x {
                p[x as usize] = p[p[x as usize] as usize];
                x = p[x as usize];
            }
            x
        }
        for t in 0..total {
            for a in &act {
                let mut img = 0usize;
                let mut rest = t;
                let mut mult = 1;
                for _ in 0..m {
                    img += a[rest % size] * mult;
                    rest /= size;
                    mult *= size;
                }
                let (x, y) = (find(&mut parent, t as u32), find(&mut parent, img as u32));
                if x != y {
                    parent[x.max(y) as usize] = x.min(y);
                }
            }
        }
        for t in 0..total as u32 {
            let r = find(&mut parent, t);
            parent[t as usize] = r;
        }
        (elems, parent)
    }

    fn compare_with_brute(n: usize, m: usize) -> usize {
        let (elems, root) = brute_orbits(n, m);
        let size = elems.len();
        let mut code_of_root: HashMap<u32, Vec<u8>> = HashMap::new();
        let mut root_of_code: HashMap<Vec<u8>, u32> = HashMap::new();
        for (t, &r) in root.iter().enumerate() {
            let mut rest = t;
            let tuple: Vec<PairOfPairs> = (0..m)
                .map(|_| {
                    let e = elems[rest % size];
                    rest /= size;
                    e
                })
                .collect();
            let c = orbit_code(&tuple);
            assert_eq!(code_of_root.entry(r).or_insert_with(|| c.clone()), &c);
            assert_eq!(root_of_code.entry(c).or_insert(r), &r);
        }
        root_of_code.len()
    }

    #[test]
    fn codes_match_brute_force_orbits_up_to_pairs_at_n8() {
        assert_eq!(compare_with_brute(8, 1), 1);
        compare_with_brute(8, 2);
    }

    #[test]
    fn codes_match_brute_force_orbits_for_triples_at_n6() {
        compare_with_brute(6, 3);
    }

    #[test]
    fn enumerated_orbits_match_brute_force_counts() {
        let caps = Caps::default();
        for (n, m) in [(6usize, 2usize), (8, 2), (6, 3)] {
            let cl = gen_cherlin_lachlan(n, m, &caps).unwrap();
            assert_eq!(cl.orbit_counts()[m - 1], compare_with_brute(n, m), "n={n} m={m}");
        }
    }

    #[test]
    fn code_is_invariant_and_first_appearance() {
        let t = [normalize([5, 9, 1, 7]).unwrap(), normalize([9, 2, 5, 3]).unwrap()];
        let c = orbit_code(&t);
        assert_eq!(&c[..4], &[0, 1, 2, 3]);
        let perm = |x: u8| (x * 7 + 3) % 11;
        let moved: Vec<PairOfPairs> = t
            .iter()
            .map(|e| normalize(e.map(|x| u32::from(perm(x)))).unwrap())
            .collect();
        assert_eq!(orbit_code(&moved), c);
        assert_eq!(orbit_code(&code_representative(&c)), c);
    }

    #[test]
    fn single_elements_are_alike() {
        let cl = gen_cherlin_lachlan(8, 1, &Caps::default()).unwrap();
        assert_eq!(cl.signature().len(), 1);
        let a = cl.element([0, 1, 2, 3]).unwrap();
        let b = cl.element([4, 5, 6, 7]).unwrap();
        assert!(cl.orbit_equal(&[a], &[b]).unwrap());
        assert!(cl.orbit_equal(&[a], &[a]).unwrap());
    }

    #[test]
    fn cycle_witness_k2() {
        let (first, second) = cycle_witness(2).unwrap();
        // a = 0,1,2 and b = 3,4,5
        assert_eq!(first, vec![[0, 1, 3, 4], [1, 2, 4, 5], [0, 2, 3, 5]]);
        assert_eq!(second[2], [0, 5, 2, 3]);
        assert_ne!(orbit_code(&first), orbit_code(&second));
        for drop in 0..3 {
            let f: Vec<_> = (0..3).filter(|&i| i != drop).map(|i| first[i]).collect();
            let s: Vec<_> = (0..3).filter(|&i| i != drop).map(|i| second[i]).collect();
            assert_eq!(orbit_code(&f), orbit_code(&s));
        }
        let cl = CherlinLachlan::on_elements(6, vec![first[0], first[1], first[2], second[2]], 3, &Caps::default()).unwrap();
        let t1: Vec<Elem> = vec![0, 1, 2];
        let t2: Vec<Elem> = vec![0, 1, 3];
        assert!(!cl.orbit_equal(&t1, &t2).unwrap());
        assert!(cl.orbit_equal(&t1[..2], &t2[..2]).unwrap());
        assert!(cl.orbit_equal(&t1, &t1[..2]).is_err());
    }

    #[test]
    fn arity_above_max_rejected() {
        let cl = gen_cherlin_lachlan(6, 2, &Caps::default()).unwrap();
        assert!(matches!(cl.orbit_equal(&[0, 1, 2], &[0, 1, 2]), Err(Error::Input(_))));
        assert!(gen_cherlin_lachlan(3, 1, &Caps::default()).is_err());
    }

    #[test]
    fn budget_is_enforced() {
        let caps = Caps {
            orbit_budget: 100,
            ..Caps::default()
        };
        assert!(matches!(gen_cherlin_lachlan(12, 3, &caps), Err(Error::Resource { .. })));
    }

    #[test]
    fn csv_lists_every_orbit() {
        let cl = gen_cherlin_lachlan(8, 2, &Caps::default()).unwrap();
        let csv = cl.orbit_csv().unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("code,arity,representative"));
        assert_eq!(lines.count(), cl.signature().len());
        assert!(csv.contains("o1_0123,1,\"{{0,1},{2,3}}\""));
    }

    #[test]
    fn implicit_atoms_match_materialized_tables() {
        let caps = Caps::default();
        let cl = gen_cherlin_lachlan(5, 2, &caps).unwrap();
        let s = cl.to_structure(&caps).unwrap();
        for t in [[0u32, 1, 2], [3, 3, 7], [14, 4, 4]] {
            assert_eq!(
                crate::structures::qf_type(&cl, &t).unwrap(),
                crate::structures::qf_type(&s, &t).unwrap()
            );
        }
    }
}
