use std::collections::BTreeMap;

use crate::combin::{binomial, colex_rank, colex_unrank, mask_members, sha256_hex};
use crate::config::Caps;
use crate::error::{Error, Result};
use crate::structures::{for_each_map, Atom, Elem, RelationSymbol, Relational, Signature, Structure};

/// k-subsets of `[n]` with the intersection relations
/// `E_i_j(x_1..x_i) ⇔ |x_1 ∩ ⋯ ∩ x_i| = j` for `2 ≤ i ≤ k+1`, `0 ≤ j ≤ k−1`.
///
/// Element `e` is the k-subset of colex rank `e`. Relations are computed
/// from bitmasks on demand, so `n ≤ 64`.
#[derive(Debug, Clone)]
pub struct JohnsonStructure {
    n: usize,
    k: usize,
    size: u64,
    signature: Signature,
    /// `rel_index[i][j]` for the relation `E_i_j`.
    rel_index: Vec<Vec<usize>>,
    /// `(i, j)` per relation index.
    params: Vec<(usize, u32)>,
}

pub fn relation_name(i: usize, j: usize) -> String {
    format!("E_{i}_{j}")
}

/// Build J(k) over `[n]`.
pub fn gen_johnson(n: usize, k: usize, caps: &Caps) -> Result<JohnsonStructure> {
    if k < 1 || k > n {
        return Err(Error::input(format!("need 1 <= k <= n, got k={k}, n={n}")));
    }
    if n > 64 {
        return Err(Error::resource(format!("ground set of {n} points"), 64));
    }
    let size = binomial(n as u64, k as u64)
        .filter(|&s| s <= caps.max_universe)
        .ok_or_else(|| Error::resource(format!("universe C({n},{k})"), caps.max_universe))?;
    let mut rels = Vec::new();
    for i in 2..=k + 1 {
        for j in 0..k {
            rels.push(RelationSymbol::new(relation_name(i, j), i));
        }
    }
    let signature = Signature::new(rels)?;
    let rel_index = (0..=k + 1)
        .map(|i| {
            (0..k)
                .map(|j| {
                    if i >= 2 {
                        signature.index_of(&relation_name(i, j)).unwrap()
                    } else {
                        usize::MAX
                    }
                })
                .collect()
        })
        .collect();
    let params = signature
        .relations()
        .iter()
        .map(|r| {
            let mut parts = r.name.split('_').skip(1).map(|x| x.parse::<usize>().unwrap());
            (parts.next().unwrap(), parts.next().unwrap() as u32)
        })
        .collect();
    Ok(JohnsonStructure {
        n,
        k,
        size,
        signature,
        rel_index,
        params,
    })
}

impl JohnsonStructure {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn mask(&self, e: Elem) -> u64 {
        colex_unrank(u64::from(e), self.k as u32)
    }

    pub fn subset(&self, e: Elem) -> Vec<u32> {
        mask_members(self.mask(e))
    }

    /// Element of the given k-subset of `[n]`.
    pub fn element(&self, set: &[u32]) -> Result<Elem> {
        let mut mask = 0u64;
        for &x in set {
            if x as usize >= self.n {
                return Err(Error::input(format!("point {x} outside [{}]", self.n)));
            }
            mask |= 1 << x;
        }
        if mask.count_ones() as usize != self.k || set.len() != self.k {
            return Err(Error::input(format!("{set:?} is not a {}-subset", self.k)));
        }
        Ok(colex_rank(mask) as Elem)
    }

    pub fn tuple(&self, sets: &[Vec<u32>]) -> Result<Vec<Elem>> {
        sets.iter().map(|s| self.element(s)).collect()
    }

    /// Materialize every `E_i_j` table, subject to `caps.max_table_rows`.
    pub fn to_structure(&self, caps: &Caps) -> Result<Structure> {
        let rows_total: u64 = (2..=self.k as u32 + 1)
            .map(|i| self.size.saturating_pow(i))
            .fold(0u64, u64::saturating_add);
        if rows_total > caps.max_table_rows {
            return Err(Error::resource(
                format!("{rows_total} relation rows for J({}) over [{}]", self.k, self.n),
                caps.max_table_rows,
            ));
        }
        let masks: Vec<u64> = (0..self.size).map(|e| colex_unrank(e, self.k as u32)).collect();
        let mut rows: BTreeMap<String, Vec<Vec<Elem>>> = BTreeMap::new();
        for i in 2..=self.k + 1 {
            for_each_map(self.size as usize, i, |_, f| {
                let inter = f.iter().fold(u64::MAX, |acc, &e| acc & masks[e]);
                let j = inter.count_ones() as usize;
                if j < self.k {
                    rows.entry(relation_name(i, j))
                        .or_default()
                        .push(f.iter().map(|&e| e as Elem).collect());
                }
            });
        }
        Structure::new(self.signature.clone(), self.size as usize, None, rows)
    }
}

impl Relational for JohnsonStructure {
    fn signature(&self) -> &Signature {
        &self.signature
    }

    fn universe_size(&self) -> usize {
        self.size as usize
    }

    fn holds(&self, rel: usize, tuple: &[Elem]) -> bool {
        let (i, j) = self.params[rel];
        tuple.len() == i && tuple.iter().fold(u64::MAX, |acc, &e| acc & self.mask(e)).count_ones() == j
    }

    fn digest(&self) -> String {
        sha256_hex(format!("johnson:n={},k={}", self.n, self.k).as_bytes())
    }

    /// For each map `f: [i] -> [l]` exactly one `E_i_j` holds, unless the
    /// intersection has size `k` (all entries of the image equal).
    fn collect_atoms(&self, t: &[Elem], out: &mut Vec<Atom>) {
        let l = t.len();
        let masks: Vec<u64> = t.iter().map(|&e| self.mask(e)).collect();
        // intersection size per nonempty image set
        let mut by_image = vec![0u32; 1 << l];
        for img in 1..(1usize << l) {
            let inter = (0..l)
                .filter(|p| img >> p & 1 == 1)
                .fold(u64::MAX, |acc, p| acc & masks[p]);
            by_image[img] = inter.count_ones();
        }
        for i in 2..=self.k + 1 {
            for_each_map(l, i, |idx, f| {
                let img = f.iter().fold(0usize, |acc, &p| acc | 1 << p);
                let j = by_image[img] as usize;
                if j < self.k {
                    out.push((self.rel_index[i][j] as u32, idx));
                }
            });
        }
    }
}
