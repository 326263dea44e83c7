use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use super::{Elem, RelationSymbol, Relational, Signature};
use crate::combin::sha256_hex;
use crate::error::{Error, Result};

/// Dense membership bitsets are used when `n^arity` stays below this.
const DENSE_LIMIT: u64 = 1 << 24;

/// One relation's rows: a hash set of fixed-width tuples, plus a dense
/// bitset for small arities.
///
/// Relations closed under coordinate permutations with no repeated entries
/// are stored once per underlying set (sorted); membership normalizes the
/// query.
#[derive(Debug, Clone)]
pub struct Table {
    arity: usize,
    universe: usize,
    symmetric: bool,
    rows: Vec<Box<[Elem]>>,
    set: HashSet<Box<[Elem]>>,
    dense: Option<Vec<u64>>,
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

impl Table {
    /// Store `rows`, switching to set storage when the rows are exactly the
    /// orderings of distinct-entry sets.
    fn new(arity: usize, universe: usize, rows: Vec<Box<[Elem]>>) -> Self {
        if arity >= 2 && !rows.is_empty() {
            let mut counts: HashMap<Box<[Elem]>, usize> = HashMap::new();
            let mut distinct = true;
            for r in &rows {
                let mut c = r.to_vec();
                c.sort_unstable();
                if c.windows(2).any(|w| w[0] == w[1]) {
                    distinct = false;
                    break;
                }
                *counts.entry(c.into_boxed_slice()).or_default() += 1;
            }
            let full = factorial(arity);
            if distinct && counts.values().all(|&c| c == full) {
                return Table::from_sets(arity, universe, counts.into_keys().collect());
            }
        }
        Table::build(arity, universe, false, rows)
    }

    /// Symmetric storage from sorted distinct-entry sets.
    pub(crate) fn from_sets(arity: usize, universe: usize, sets: Vec<Box<[Elem]>>) -> Self {
        Table::build(arity, universe, true, sets)
    }

    fn build(arity: usize, universe: usize, symmetric: bool, mut rows: Vec<Box<[Elem]>>) -> Self {
        rows.sort();
        let set: HashSet<Box<[Elem]>> = rows.iter().cloned().collect();
        let cells = (universe as u64).checked_pow(arity as u32);
        let dense = match cells {
            Some(c) if !symmetric && arity <= 3 && c <= DENSE_LIMIT => {
                let mut bits = vec![0u64; (c as usize).div_ceil(64)];
                for r in &rows {
                    let i = dense_index(universe, r);
                    bits[i / 64] |= 1 << (i % 64);
                }
                Some(bits)
            }
            _ => None,
        };
        Table {
            arity,
            universe,
            symmetric,
            rows,
            set,
            dense,
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// Number of tuples, counting every ordering of a symmetric row.
    pub fn len(&self) -> usize {
        if self.symmetric {
            self.rows.len() * factorial(self.arity)
        } else {
            self.rows.len()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Stored rows in lexicographic order: tuples, or sorted sets when
    /// [`Table::is_symmetric`].
    pub fn rows(&self) -> &[Box<[Elem]>] {
        &self.rows
    }

    /// Every tuple, in lexicographic order.
    pub fn tuples(&self) -> Vec<Vec<Elem>> {
        if !self.symmetric {
            return self.rows.iter().map(|r| r.to_vec()).collect();
        }
        let mut out = Vec::with_capacity(self.len());
        for r in &self.rows {
            out.extend(r.iter().copied().permutations(self.arity));
        }
        out.sort_unstable();
        out
    }

    pub fn contains(&self, t: &[Elem]) -> bool {
        if t.len() != self.arity {
            return false;
        }
        if self.symmetric {
            let mut buf = [0 as Elem; 16];
            if t.len() > buf.len() {
                let mut v = t.to_vec();
                v.sort_unstable();
                return self.set.contains(v.as_slice());
            }
            let b = &mut buf[..t.len()];
            b.copy_from_slice(t);
            b.sort_unstable();
            return self.set.contains(&*b);
        }
        match &self.dense {
            Some(bits) => {
                if t.iter().any(|&e| e as usize >= self.universe) {
                    return false;
                }
                let i = dense_index(self.universe, t);
                bits[i / 64] >> (i % 64) & 1 == 1
            }
            None => self.set.contains(t),
        }
    }
}

fn dense_index(universe: usize, t: &[Elem]) -> usize {
    t.iter().fold(0usize, |acc, &e| acc * universe + e as usize)
}

/// A finite relational structure with explicit relation tables.
///
/// Immutable after construction.
#[derive(Debug, Clone)]
pub struct Structure {
    signature: Signature,
    universe: usize,
    sort_of: Option<Vec<String>>,
    tables: Vec<Table>,
    digest: String,
}

/// The on-disk JSON form. Relation rows are sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureJson {
    pub signature: Vec<RelationSymbol>,
    pub universe: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sort_of: Option<Vec<String>>,
    pub relations: BTreeMap<String, Vec<Vec<Elem>>>,
}

impl Structure {
    /// Build a structure from rows given per relation name.
    ///
    /// Rows must have the relation's arity, entries below `universe`, the
    /// declared sorts, and no duplicates.
    pub fn new(
        signature: Signature,
        universe: usize,
        sort_of: Option<Vec<String>>,
        mut rows: BTreeMap<String, Vec<Vec<Elem>>>,
    ) -> Result<Self> {
        if let Some(s) = &sort_of {
            if s.len() != universe {
                return Err(Error::input(format!(
                    "sort_of lists {} elements but the universe has {universe}",
                    s.len()
                )));
            }
        }
        for name in rows.keys() {
            if signature.index_of(name).is_none() {
                return Err(Error::input(format!("rows given for unknown relation {name:?}")));
            }
        }
        let mut tables = Vec::with_capacity(signature.len());
        for sym in signature.relations() {
            let given = rows.remove(&sym.name).unwrap_or_default();
            let mut seen = HashSet::with_capacity(given.len());
            let mut boxed = Vec::with_capacity(given.len());
            for row in given {
                if row.len() != sym.arity {
                    return Err(Error::input(format!(
                        "row {row:?} of {:?} has length {} but the arity is {}",
                        sym.name,
                        row.len(),
                        sym.arity
                    )));
                }
                if let Some(&bad) = row.iter().find(|&&e| e as usize >= universe) {
                    return Err(Error::input(format!(
                        "row {row:?} of {:?} mentions element {bad} outside a universe of {universe}",
                        sym.name
                    )));
                }
                if let (Some(sorts), Some(sort_of)) = (&sym.sorts, &sort_of) {
                    for (pos, (&e, want)) in row.iter().zip(sorts).enumerate() {
                        if &sort_of[e as usize] != want {
                            return Err(Error::input(format!(
                                "row {row:?} of {:?}: position {pos} needs sort {want:?}, element {e} has sort {:?}",
                                sym.name, sort_of[e as usize]
                            )));
                        }
                    }
                }
                let row: Box<[Elem]> = row.into_boxed_slice();
                if !seen.insert(row.clone()) {
                    return Err(Error::input(format!("duplicate row {row:?} in {:?}", sym.name)));
                }
                boxed.push(row);
            }
            tables.push(Table::new(sym.arity, universe, boxed));
        }
        let mut s = Structure {
            signature,
            universe,
            sort_of,
            tables,
            digest: String::new(),
        };
        s.digest = s.content_digest();
        Ok(s)
    }

    /// Like [`Structure::new`] but collapses duplicate rows.
    pub fn from_row_sets(
        signature: Signature,
        universe: usize,
        sort_of: Option<Vec<String>>,
        rows: BTreeMap<String, Vec<Vec<Elem>>>,
    ) -> Result<Self> {
        let rows = rows
            .into_iter()
            .map(|(k, mut v)| {
                v.sort();
                v.dedup();
                (k, v)
            })
            .collect();
        Structure::new(signature, universe, sort_of, rows)
    }

    /// Build a structure whose relations are all symmetric, from their
    /// underlying sets. Each set must have distinct entries.
    pub fn from_symmetric_sets(
        signature: Signature,
        universe: usize,
        sets: BTreeMap<String, Vec<Vec<Elem>>>,
    ) -> Result<Self> {
        let mut tables = Vec::with_capacity(signature.len());
        for sym in signature.relations() {
            let mut rows: Vec<Box<[Elem]>> = Vec::new();
            for mut set in sets.get(&sym.name).cloned().unwrap_or_default() {
                set.sort_unstable();
                if set.len() != sym.arity || set.windows(2).any(|w| w[0] == w[1]) {
                    return Err(Error::input(format!(
                        "{set:?} is not a set of {} distinct elements for {:?}",
                        sym.arity, sym.name
                    )));
                }
                if set.iter().any(|&e| e as usize >= universe) {
                    return Err(Error::input(format!("{set:?} leaves a universe of {universe}")));
                }
                rows.push(set.into_boxed_slice());
            }
            rows.sort();
            rows.dedup();
            tables.push(Table::from_sets(sym.arity, universe, rows));
        }
        let mut s = Structure {
            signature,
            universe,
            sort_of: None,
            tables,
            digest: String::new(),
        };
        s.digest = s.content_digest();
        Ok(s)
    }

    fn content_digest(&self) -> String {
        let mut b = serde_json::to_vec(&(self.signature.relations(), self.universe, &self.sort_of))
            .expect("header serializes");
        for t in &self.tables {
            b.push(u8::from(t.symmetric));
            b.extend_from_slice(&(t.rows.len() as u64).to_le_bytes());
            for r in &t.rows {
                for &e in r.iter() {
                    b.extend_from_slice(&e.to_le_bytes());
                }
            }
        }
        sha256_hex(&b)
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn sort_of(&self, e: Elem) -> Option<&str> {
        self.sort_of.as_ref().map(|s| s[e as usize].as_str())
    }

    pub fn table(&self, rel: usize) -> &Table {
        &self.tables[rel]
    }

    pub fn table_by_name(&self, name: &str) -> Option<&Table> {
        self.signature.index_of(name).map(|i| &self.tables[i])
    }

    pub fn to_json(&self) -> StructureJson {
        StructureJson {
            signature: self.signature.relations().to_vec(),
            universe: self.universe,
            sort_of: self.sort_of.clone(),
            relations: self
                .signature
                .relations()
                .iter()
                .zip(&self.tables)
                .map(|(sym, t)| (sym.name.clone(), t.tuples()))
                .collect(),
        }
    }

    /// Compact canonical JSON. Byte-identical for equal structures.
    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("structure JSON serializes")
    }

    pub fn from_json(json: StructureJson) -> Result<Self> {
        let sig = Signature::new(json.signature)?;
        Structure::new(sig, json.universe, json.sort_of, json.relations)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Structure::from_json(serde_json::from_str(s)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Structure::from_json_str(&text)
    }

    /// Elements co-occurring with `e` in some row of some relation.
    pub fn gaifman_neighbours(&self) -> Vec<Vec<Elem>> {
        // symmetric rows mention the same elements as their orderings
        let mut adj: Vec<HashSet<Elem>> = vec![HashSet::new(); self.universe];
        for t in &self.tables {
            for row in t.rows() {
                for &a in row.iter() {
                    for &b in row.iter() {
                        if a != b {
                            adj[a as usize].insert(b);
                        }
                    }
                }
            }
        }
        adj.into_iter()
            .map(|s| {
                let mut v: Vec<Elem> = s.into_iter().collect();
                v.sort_unstable();
                v
            })
            .collect()
    }
}

impl Relational for Structure {
    fn signature(&self) -> &Signature {
        &self.signature
    }

    fn universe_size(&self) -> usize {
        self.universe
    }

    fn holds(&self, rel: usize, tuple: &[Elem]) -> bool {
        self.tables[rel].contains(tuple)
    }

    fn digest(&self) -> String {
        self.digest.clone()
    }
}
