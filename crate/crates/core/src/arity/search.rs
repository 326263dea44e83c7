use std::collections::HashMap;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use super::witness::{make_witness, Witness};
use crate::error::{Error, Result};
use crate::generators::JohnsonStructure;
use crate::structures::{qf_type_unchecked, subtype_profile, Elem, ProfileMode, QfType, Relational, SubtypeProfile};

/// Enumerates candidate l-tuples, one or more per orbit of a group of
/// automorphisms of the structure.
pub trait TupleSource {
    /// Description of the group whose orbits are covered.
    fn symmetry(&self) -> String;

    fn for_each(&self, l: usize, visit: &mut dyn FnMut(&[Elem]) -> ControlFlow<()>);
}

/// Every l-tuple of the universe, lexicographically.
pub struct AllTuples {
    pub universe: usize,
}

impl TupleSource for AllTuples {
    fn symmetry(&self) -> String {
        "trivial group: every tuple enumerated".to_string()
    }

    fn for_each(&self, l: usize, visit: &mut dyn FnMut(&[Elem]) -> ControlFlow<()>) {
        if self.universe == 0 {
            return;
        }
        let mut t = vec![0 as Elem; l];
        loop {
            if visit(&t).is_break() {
                return;
            }
            let mut p = l;
            loop {
                if p == 0 {
                    return;
                }
                p -= 1;
                t[p] += 1;
                if (t[p] as usize) < self.universe {
                    break;
                }
                t[p] = 0;
            }
        }
    }
}

/// One l-tuple of k-sets per orbit of `Sym(n)` on the ground set.
///
/// The orbit of `(x_1..x_l)` is determined by the sizes of the `2^l − 1`
/// nonempty Venn regions; each admissible size vector is realised by
/// filling regions with consecutive points in order of their index masks.
pub struct JohnsonOrbitReps<'a> {
    pub johnson: &'a JohnsonStructure,
}

impl TupleSource for JohnsonOrbitReps<'_> {
    fn symmetry(&self) -> String {
        format!(
            "Sym({}) acting on the ground set: one tuple per Venn-region size vector",
            self.johnson.n()
        )
    }

    fn for_each(&self, l: usize, visit: &mut dyn FnMut(&[Elem]) -> ControlFlow<()>) {
        let (n, k) = (self.johnson.n(), self.johnson.k());
        let regions: Vec<usize> = (1..1usize << l).collect();
        let mut counts = vec![0usize; regions.len()];
        let mut remaining = vec![k; l];
        let mut out = Vec::with_capacity(l);
        let mut stop = false;
        #[allow(clippy::too_many_arguments)]
        fn rec(
            pos: usize,
            used: usize,
            regions: &[usize],
            counts: &mut [usize],
            remaining: &mut [usize],
            n: usize,
            j: &JohnsonStructure,
            out: &mut Vec<Elem>,
            visit: &mut dyn FnMut(&[Elem]) -> ControlFlow<()>,
            stop: &mut bool,
        ) {
            if *stop {
                return;
            }
            let l = remaining.len();
            if pos == regions.len() {
                if remaining.iter().any(|&r| r != 0) {
                    return;
                }
                let mut sets = vec![Vec::new(); l];
                let mut next = 0u32;
                for (ri, &mask) in regions.iter().enumerate() {
                    for _ in 0..counts[ri] {
                        for (i, set) in sets.iter_mut().enumerate() {
                            if mask >> i & 1 == 1 {
                                set.push(next);
                            }
                        }
                        next += 1;
                    }
                }
                out.clear();
                for set in &sets {
                    out.push(j.element(set).expect("region sizes give k-subsets of [n]"));
                }
                if visit(out).is_break() {
                    *stop = true;
                }
                return;
            }
            let mask = regions[pos];
            let cap = (0..l)
                .filter(|&i| mask >> i & 1 == 1)
                .map(|i| remaining[i])
                .min()
                .unwrap_or(0)
                .min(n - used);
            // a coordinate whose last region is this one must be filled here
            let must: usize = (0..l)
                .filter(|&i| mask >> i & 1 == 1 && !regions[pos + 1..].iter().any(|&m| m >> i & 1 == 1))
                .map(|i| remaining[i])
                .max()
                .unwrap_or(0);
            if must > cap {
                return;
            }
            for c in must..=cap {
                counts[pos] = c;
                for i in 0..l {
                    if mask >> i & 1 == 1 {
                        remaining[i] -= c;
                    }
                }
                rec(pos + 1, used + c, regions, counts, remaining, n, j, out, visit, stop);
                for i in 0..l {
                    if mask >> i & 1 == 1 {
                        remaining[i] += c;
                    }
                }
                if *stop {
                    return;
                }
            }
            counts[pos] = 0;
        }
        rec(
            0,
            0,
            &regions,
            &mut counts,
            &mut remaining,
            n,
            self.johnson,
            &mut out,
            visit,
            &mut stop,
        );
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "verdict")]
pub enum SearchOutcome {
    Witness {
        witness: Witness,
        tuples_examined: u64,
        symmetry: String,
    },
    /// Every tuple of the source was examined; no witness exists among
    /// l-tuples of this finite structure.
    ExhaustedNoWitness {
        tuples_examined: u64,
        profile_classes: u64,
        symmetry: String,
    },
    BudgetExhausted {
        tuples_examined: u64,
        symmetry: String,
    },
}

impl SearchOutcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            SearchOutcome::Witness { .. } => 0,
            SearchOutcome::ExhaustedNoWitness { .. } => 3,
            SearchOutcome::BudgetExhausted { .. } => 4,
        }
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            SearchOutcome::Witness { witness, .. } => Some(witness),
            _ => None,
        }
    }
}

/// Search the tuples of `source` for two with equal profiles and distinct
/// full types.
///
/// Tuples are grouped by profile; each group remembers its first tuple and
/// type, and the first later tuple of a different type yields the witness.
/// Profiles and types are invariant under the source's group, so covering
/// every orbit is enough for a complete verdict. `budget` bounds the number
/// of tuples examined; `None` runs to completion.
pub fn arity_witness_search<S: Relational + ?Sized>(
    s: &S,
    l: usize,
    mode: ProfileMode,
    source: &dyn TupleSource,
    budget: Option<u64>,
) -> Result<SearchOutcome> {
    if l < 2 {
        return Err(Error::input(format!("witness search needs l >= 2, got {l}")));
    }
    if budget == Some(0) {
        return Err(Error::input("search budget must be positive"));
    }
    mode.index_sets(l)?;
    let mut buckets: HashMap<SubtypeProfile, (Vec<Elem>, QfType)> = HashMap::new();
    let mut examined = 0u64;
    let mut found: Option<(Vec<Elem>, Vec<Elem>)> = None;
    let mut out_of_budget = false;
    let mut failure = None;
    source.for_each(l, &mut |t| {
        if budget.is_some_and(|b| examined >= b) {
            out_of_budget = true;
            return ControlFlow::Break(());
        }
        examined += 1;
        let profile = match subtype_profile(s, t, mode) {
            Ok(p) => p,
            Err(e) => {
                failure = Some(e);
                return ControlFlow::Break(());
            }
        };
        let full = qf_type_unchecked(s, t);
        match buckets.get(&profile) {
            Some((first, q)) if *q != full => {
                found = Some((first.clone(), t.to_vec()));
                ControlFlow::Break(())
            }
            Some(_) => ControlFlow::Continue(()),
            None => {
                buckets.insert(profile, (t.to_vec(), full));
                ControlFlow::Continue(())
            }
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let symmetry = source.symmetry();
    if let Some((t1, t2)) = found {
        let witness = make_witness(s, &t1, &t2, mode)?;
        return Ok(SearchOutcome::Witness {
            witness,
            tuples_examined: examined,
            symmetry,
        });
    }
    if out_of_budget {
        return Ok(SearchOutcome::BudgetExhausted {
            tuples_examined: examined,
            symmetry,
        });
    }
    Ok(SearchOutcome::ExhaustedNoWitness {
        tuples_examined: examined,
        profile_classes: buckets.len() as u64,
        symmetry,
    })
}
