use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::{qf_type, Elem, Structure};
use crate::error::{Error, Result};

/// A relation-preserving bijection between two Gaifman balls.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialIso {
    pub radius: usize,
    /// `(source, image)` pairs sorted by source.
    pub pairs: Vec<(Elem, Elem)>,
}

fn ball(adj: &[Vec<Elem>], centres: &[Elem], radius: usize) -> Vec<Elem> {
    let mut dist: HashMap<Elem, usize> = HashMap::new();
    let mut order = Vec::new();
    let mut queue = VecDeque::new();
    for &c in centres {
        if dist.insert(c, 0).is_none() {
            order.push(c);
            queue.push_back(c);
        }
    }
    while let Some(v) = queue.pop_front() {
        let d = dist[&v];
        if d == radius {
            continue;
        }
        for &w in &adj[v as usize] {
            if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(w) {
                e.insert(d + 1);
                order.push(w);
                queue.push_back(w);
            }
        }
    }
    order
}

/// Rows of every relation that mention a given element.
fn incidence(s: &Structure) -> Vec<Vec<(usize, usize)>> {
    let mut inc = vec![Vec::new(); s.universe()];
    for rel in 0..s.signature().len() {
        for (ri, row) in s.table(rel).rows().iter().enumerate() {
            let mut seen: Vec<Elem> = Vec::new();
            for &e in row.iter() {
                if !seen.contains(&e) {
                    seen.push(e);
                    inc[e as usize].push((rel, ri));
                }
            }
        }
    }
    inc
}

struct Search<'a> {
    s: &'a Structure,
    inc: Vec<Vec<(usize, usize)>>,
    order: Vec<Elem>,
    targets: Vec<Elem>,
    fwd: HashMap<Elem, Elem>,
    back: HashMap<Elem, Elem>,
}

impl Search<'_> {
    fn sort_ok(&self, v: Elem, w: Elem) -> bool {
        self.s.sort_of(v) == self.s.sort_of(w)
    }

    /// Every row through `v` (resp. `w`) whose entries are all mapped has
    /// its image (resp. preimage) in the same table.
    fn consistent(&self, v: Elem, w: Elem) -> bool {
        let check = |e: Elem, map: &HashMap<Elem, Elem>| {
            let mut img = Vec::new();
            for &(rel, ri) in &self.inc[e as usize] {
                let row = &self.s.table(rel).rows()[ri];
                img.clear();
                for x in row.iter() {
                    match map.get(x) {
                        Some(&y) => img.push(y),
                        None => break,
                    }
                }
                if img.len() == row.len() && !self.s.table(rel).contains(&img) {
                    return false;
                }
            }
            true
        };
        check(v, &self.fwd) && check(w, &self.back)
    }

    fn extend(&mut self, pos: usize) -> bool {
        if pos == self.order.len() {
            return true;
        }
        let v = self.order[pos];
        if self.fwd.contains_key(&v) {
            return self.extend(pos + 1);
        }
        for i in 0..self.targets.len() {
            let w = self.targets[i];
            if self.back.contains_key(&w) || !self.sort_ok(v, w) {
                continue;
            }
            self.fwd.insert(v, w);
            self.back.insert(w, v);
            if self.consistent(v, w) && self.extend(pos + 1) {
                return true;
            }
            self.fwd.remove(&v);
            self.back.remove(&w);
        }
        false
    }
}

/// Search for a bijection between the radius-`radius` Gaifman balls of
/// `src` and `dst` that extends `src ↦ dst` and preserves every relation
/// in both directions.
///
/// Candidates are tried in ball (breadth-first, then element) order, so the
/// result is deterministic.
pub fn find_partial_iso(s: &Structure, src: &[Elem], dst: &[Elem], radius: usize) -> Result<Option<PartialIso>> {
    if src.len() != dst.len() {
        return Err(Error::input(format!(
            "source has length {} but destination has length {}",
            src.len(),
            dst.len()
        )));
    }
    let n = s.universe();
    if let Some(&bad) = src.iter().chain(dst).find(|&&e| e as usize >= n) {
        return Err(Error::input(format!("element {bad} outside a universe of {n}")));
    }
    let adj = s.gaifman_neighbours();
    let order = ball(&adj, src, radius);
    let targets = ball(&adj, dst, radius);
    if order.len() != targets.len() {
        return Ok(None);
    }
    let mut search = Search {
        s,
        inc: incidence(s),
        order,
        targets,
        fwd: HashMap::new(),
        back: HashMap::new(),
    };
    for (&v, &w) in src.iter().zip(dst) {
        match (search.fwd.get(&v), search.back.get(&w)) {
            (None, None) => {
                if !search.sort_ok(v, w) {
                    return Ok(None);
                }
                search.fwd.insert(v, w);
                search.back.insert(w, v);
            }
            (Some(&w2), Some(&v2)) if w2 == w && v2 == v => {}
            _ => return Ok(None),
        }
    }
    for (&v, &w) in src.iter().zip(dst) {
        if !search.consistent(v, w) {
            return Ok(None);
        }
    }
    if !search.extend(0) {
        return Ok(None);
    }
    let mut pairs: Vec<(Elem, Elem)> = search.fwd.into_iter().collect();
    pairs.sort_unstable();
    assert_eq!(
        qf_type(s, src)?,
        qf_type(s, dst)?,
        "partial isomorphism found between tuples of different quantifier-free type"
    );
    Ok(Some(PartialIso { radius, pairs }))
}
