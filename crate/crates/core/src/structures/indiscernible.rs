use serde::{Deserialize, Serialize};

use super::qftype::qf_type_unchecked;
use super::{Elem, Relational};
use crate::combin::index_sets;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "verdict")]
pub enum Indiscernibility {
    Yes,
    /// Two increasing index sequences of length `m` whose concatenations
    /// (followed by the parameters) have different quantifier-free types.
    /// `first` is always `0..m`; `m` is least and `second` is the
    /// lexicographically least set differing from `first`.
    Counterexample {
        m: usize,
        first: Vec<usize>,
        second: Vec<usize>,
    },
}

impl Indiscernibility {
    pub fn is_yes(&self) -> bool {
        matches!(self, Indiscernibility::Yes)
    }
}

/// Quantifier-free indiscernibility of `seq` over the parameter tuple `over`.
///
/// An atom touches at most `max(r, 2)` sequence entries, where `r` is the
/// largest arity of the signature, so the type of an increasing
/// `m`-subsequence is determined by those of its increasing subsequences of
/// length at most `max(r, 2)`. Only those lengths are compared; the verdict
/// and the least counterexample coincide with comparing every `m ≤ |seq|`.
pub fn is_qf_indiscernible<S: Relational + ?Sized>(
    s: &S,
    seq: &[Vec<Elem>],
    over: &[Elem],
) -> Result<Indiscernibility> {
    if seq.len() < 2 {
        return Err(Error::input("an indiscernibility check needs at least two entries"));
    }
    let width = seq[0].len();
    if let Some(bad) = seq.iter().position(|e| e.len() != width) {
        return Err(Error::input(format!(
            "sequence entry {bad} has length {} but entry 0 has length {width}",
            seq[bad].len()
        )));
    }
    let n = s.universe_size();
    if let Some(&bad) = seq.iter().flatten().chain(over).find(|&&e| e as usize >= n) {
        return Err(Error::input(format!("element {bad} outside a universe of {n}")));
    }
    let reach = s.signature().max_arity().max(2).min(seq.len());
    let mut buf = Vec::new();
    let mut concat = |idx: &[usize]| {
        buf.clear();
        for &i in idx {
            buf.extend_from_slice(&seq[i]);
        }
        buf.extend_from_slice(over);
        qf_type_unchecked(s, &buf)
    };
    for m in 1..=reach {
        let first: Vec<usize> = (0..m).collect();
        let base = concat(&first);
        for idx in index_sets(seq.len(), m).into_iter().skip(1) {
            if concat(&idx) != base {
                return Ok(Indiscernibility::Counterexample { m, first, second: idx });
            }
        }
    }
    Ok(Indiscernibility::Yes)
}
