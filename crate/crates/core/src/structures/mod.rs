//! Finite relational structures, quantifier-free types, subtype profiles,
//! quantifier-free indiscernibility and bounded partial-isomorphism search.

mod indiscernible;
mod partial_iso;
mod qftype;
mod signature;
mod structure;

pub use indiscernible::{is_qf_indiscernible, Indiscernibility};
pub use partial_iso::{find_partial_iso, PartialIso};
pub(crate) use qftype::qf_type_unchecked;
pub use qftype::{qf_type, subtype_profile, ProfileEntry, ProfileMode, QfType, QfTypeReport, SubtypeProfile};
pub use signature::{RelationSymbol, Signature};
pub use structure::{Structure, StructureJson, Table};

/// Universe elements are `0..n`.
pub type Elem = u32;

/// A true atomic formula: relation index and the lexicographic index of the
/// map `[r] -> [l]` that rearranges the tuple.
pub type Atom = (u32, u64);

/// Anything that can answer relation membership over a finite universe.
///
/// Tabled [`Structure`]s implement this directly; Johnson graphs,
/// Cherlin–Lachlan structures and φ-structures over pseudoplane fragments
/// compute membership on demand.
pub trait Relational: Sync {
    fn signature(&self) -> &Signature;

    fn universe_size(&self) -> usize;

    fn holds(&self, rel: usize, tuple: &[Elem]) -> bool;

    /// Content digest identifying this structure.
    fn digest(&self) -> String;

    /// Push every true atom of `t` onto `out`, in any order.
    ///
    /// The default walks every relation and every map `[r] -> [l]`.
    /// Implementations with one true relation per rearrangement override it.
    fn collect_atoms(&self, t: &[Elem], out: &mut Vec<Atom>) {
        let mut sub = Vec::new();
        for (ri, rel) in self.signature().relations().iter().enumerate() {
            for_each_map(t.len(), rel.arity, |idx, f| {
                sub.clear();
                sub.extend(f.iter().map(|&p| t[p]));
                if self.holds(ri, &sub) {
                    out.push((ri as u32, idx));
                }
            });
        }
    }
}

/// Visit every map `[r] -> [l]` in lexicographic order together with its index.
pub fn for_each_map(l: usize, r: usize, mut visit: impl FnMut(u64, &[usize])) {
    if l == 0 && r > 0 {
        return;
    }
    let mut f = vec![0usize; r];
    let mut idx = 0u64;
    loop {
        visit(idx, &f);
        idx += 1;
        let mut p = r;
        loop {
            if p == 0 {
                return;
            }
            p -= 1;
            f[p] += 1;
            if f[p] < l {
                break;
            }
            f[p] = 0;
        }
    }
}

/// Decode the map with the given lexicographic index.
pub fn map_from_index(l: usize, r: usize, mut idx: u64) -> Vec<usize> {
    let mut f = vec![0usize; r];
    for p in (0..r).rev() {
        f[p] = (idx % l as u64) as usize;
        idx /= l as u64;
    }
    f
}
