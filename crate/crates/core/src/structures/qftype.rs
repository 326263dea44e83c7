use serde::{Deserialize, Serialize};

use super::{map_from_index, Atom, Elem, Relational, Signature};
use crate::combin::{index_sets, sha256_hex};
use crate::error::{Error, Result};

/// Canonical quantifier-free type of a tuple.
///
/// `equality` is the restricted-growth string of the equality partition
/// (position `p` gets the class number of its first occurrence) and `atoms`
/// lists, sorted, every true atom `R(t ∘ f)` over all maps `f: [r] -> [l]`,
/// injective or not. Two tuples of one structure get equal values iff they
/// satisfy the same parameter-free quantifier-free formulas.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QfType {
    arity: usize,
    equality: Vec<u32>,
    atoms: Vec<Atom>,
}

impl QfType {
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn equality(&self) -> &[u32] {
        &self.equality
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// Equality classes as sorted position lists.
    pub fn equality_classes(&self) -> Vec<Vec<usize>> {
        let classes = self.equality.iter().max().map_or(0, |&m| m as usize + 1);
        let mut out = vec![Vec::new(); classes];
        for (p, &c) in self.equality.iter().enumerate() {
            out[c as usize].push(p);
        }
        out
    }

    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut b = Vec::with_capacity(16 + 4 * self.equality.len() + 12 * self.atoms.len());
        b.extend_from_slice(&(self.arity as u64).to_le_bytes());
        for &c in &self.equality {
            b.extend_from_slice(&c.to_le_bytes());
        }
        b.extend_from_slice(&(self.atoms.len() as u64).to_le_bytes());
        for &(r, f) in &self.atoms {
            b.extend_from_slice(&r.to_le_bytes());
            b.extend_from_slice(&f.to_le_bytes());
        }
        b
    }

    pub fn digest(&self) -> String {
        sha256_hex(&self.canonical_bytes())
    }

    /// Human-readable listing of the true atoms, e.g. `E_3_0(x0,x1,x2)`.
    pub fn describe_atoms(&self, sig: &Signature) -> Vec<String> {
        self.atoms
            .iter()
            .map(|&(r, f)| {
                let sym = &sig.relations()[r as usize];
                let args = map_from_index(self.arity, sym.arity, f)
                    .iter()
                    .map(|p| format!("x{p}"))
                    .collect::<Vec<_>>()
                    .join(",");
                format!("{}({args})", sym.name)
            })
            .collect()
    }

    pub fn report(&self, sig: &Signature) -> QfTypeReport {
        QfTypeReport {
            digest: self.digest(),
            arity: self.arity,
            equality_classes: self.equality_classes(),
            atoms: self.describe_atoms(sig),
        }
    }
}

/// Serialized form of a [`QfType`]: digest plus readable atoms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QfTypeReport {
    pub digest: String,
    pub arity: usize,
    pub equality_classes: Vec<Vec<usize>>,
    pub atoms: Vec<String>,
}

fn check_elements<S: Relational + ?Sized>(s: &S, t: &[Elem]) -> Result<()> {
    let n = s.universe_size();
    if let Some(&bad) = t.iter().find(|&&e| e as usize >= n) {
        return Err(Error::input(format!("element {bad} outside a universe of {n}")));
    }
    Ok(())
}

pub(crate) fn qf_type_unchecked<S: Relational + ?Sized>(s: &S, t: &[Elem]) -> QfType {
    let mut equality = Vec::with_capacity(t.len());
    let mut firsts: Vec<Elem> = Vec::new();
    for &e in t {
        let c = match firsts.iter().position(|&x| x == e) {
            Some(c) => c,
            None => {
                firsts.push(e);
                firsts.len() - 1
            }
        };
        equality.push(c as u32);
    }
    let mut atoms = Vec::new();
    s.collect_atoms(t, &mut atoms);
    atoms.sort_unstable();
    atoms.dedup();
    QfType {
        arity: t.len(),
        equality,
        atoms,
    }
}

/// The canonical quantifier-free type of `t` in `s`.
pub fn qf_type<S: Relational + ?Sized>(s: &S, t: &[Elem]) -> Result<QfType> {
    check_elements(s, t)?;
    Ok(qf_type_unchecked(s, t))
}

/// Which subtuples a profile records.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileMode {
    /// Every increasing index set of size at most `k`.
    UpToK(usize),
    /// The `l` index sets missing exactly one position.
    DropOne,
}

impl ProfileMode {
    /// Index sets for base arity `l`: by size then lexicographically for
    /// `UpToK`, by dropped position for `DropOne`.
    pub fn index_sets(self, l: usize) -> Result<Vec<Vec<usize>>> {
        match self {
            ProfileMode::UpToK(k) => {
                if k > l {
                    return Err(Error::input(format!("profile bound {k} exceeds tuple length {l}")));
                }
                Ok((0..=k).flat_map(|size| index_sets(l, size)).collect())
            }
            ProfileMode::DropOne => Ok((0..l)
                .map(|i| (0..l).filter(|&p| p != i).collect())
                .collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProfileEntry {
    pub indices: Vec<usize>,
    pub qf: QfType,
}

/// Quantifier-free types of the selected subtuples of one tuple.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubtypeProfile {
    pub base_arity: usize,
    pub mode: ProfileMode,
    pub entries: Vec<ProfileEntry>,
}

impl SubtypeProfile {
    pub fn digest(&self) -> String {
        let mut b = Vec::new();
        b.extend_from_slice(&(self.base_arity as u64).to_le_bytes());
        for e in &self.entries {
            b.extend_from_slice(&(e.indices.len() as u64).to_le_bytes());
            for &i in &e.indices {
                b.extend_from_slice(&(i as u64).to_le_bytes());
            }
            b.extend_from_slice(&e.qf.canonical_bytes());
        }
        sha256_hex(&b)
    }
}

/// Profile of `t` over the index-set family selected by `mode`.
pub fn subtype_profile<S: Relational + ?Sized>(s: &S, t: &[Elem], mode: ProfileMode) -> Result<SubtypeProfile> {
    check_elements(s, t)?;
    let sets = mode.index_sets(t.len())?;
    let mut sub = Vec::with_capacity(t.len());
    let entries = sets
        .into_iter()
        .map(|indices| {
            sub.clear();
            sub.extend(indices.iter().map(|&i| t[i]));
            ProfileEntry {
                qf: qf_type_unchecked(s, &sub),
                indices,
            }
        })
        .collect();
    Ok(SubtypeProfile {
        base_arity: t.len(),
        mode,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::structures::{RelationSymbol, Structure};

    fn pure_set(n: usize) -> Structure {
        Structure::new(Signature::default(), n, None, BTreeMap::new()).unwrap()
    }

    #[test]
    fn empty_tuple() {
        let s = pure_set(3);
        let q = qf_type(&s, &[]).unwrap();
        assert_eq!(q.arity(), 0);
        assert!(q.atoms().is_empty());
        assert!(q.equality().is_empty());
    }

    #[test]
    fn equality_pattern_only() {
        let s = pure_set(6);
        let q = qf_type(&s, &[3, 3, 5]).unwrap();
        assert_eq!(q.equality_classes(), vec![vec![0, 1], vec![2]]);
        assert!(q.atoms().is_empty());
    }

    #[test]
    fn repeated_coordinates_are_recorded() {
        // loops distinguish (0,0) from (1,1) although both have one class
        let sig = Signature::new(vec![RelationSymbol::new("E", 2)]).unwrap();
        let mut rows = BTreeMap::new();
        rows.insert("E".to_string(), vec![vec![0, 0]]);
        let s = Structure::new(sig, 2, None, rows).unwrap();
        let a = qf_type(&s, &[0]).unwrap();
        let b = qf_type(&s, &[1]).unwrap();
        assert_ne!(a, b);
        assert_eq!(a.describe_atoms(s.signature()), vec!["E(x0,x0)"]);
    }

    #[test]
    fn out_of_range() {
        let s = pure_set(2);
        assert!(matches!(qf_type(&s, &[2]), Err(Error::Input(_))));
    }

    #[test]
    fn drop_one_of_singleton() {
        let s = pure_set(2);
        let p = subtype_profile(&s, &[1], ProfileMode::DropOne).unwrap();
        assert_eq!(p.entries.len(), 1);
        assert!(p.entries[0].indices.is_empty());
        assert_eq!(p.entries[0].qf.arity(), 0);
    }

    #[test]
    fn up_to_k_family() {
        let s = pure_set(5);
        let p = subtype_profile(&s, &[0, 1, 2], ProfileMode::UpToK(2)).unwrap();
        let keys: Vec<_> = p.entries.iter().map(|e| e.indices.clone()).collect();
        assert_eq!(
            keys,
            vec![vec![], vec![0], vec![1], vec![2], vec![0, 1], vec![0, 2], vec![1, 2]]
        );
        for e in &p.entries {
            assert_eq!(e.qf.arity(), e.indices.len());
        }
        assert!(subtype_profile(&s, &[0, 1], ProfileMode::UpToK(3)).is_err());
    }
}
