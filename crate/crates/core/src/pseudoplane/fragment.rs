use std::collections::{BTreeMap, HashMap, HashSet};

use crate::config::Caps;
use crate::error::{Error, Result};
use crate::structures::{Elem, RelationSymbol, Signature, Structure};

/// A generator or its inverse: `(label, inverse)`.
pub type Letter = (Elem, bool);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexInfo {
    /// 1-based sort index.
    pub sort: usize,
    /// Orbit (tree) number within the sort; 0 for sort 1.
    pub orbit: usize,
    /// Reduced word `w` with `v = w ∗ root`; the first letter is applied last.
    pub word: Vec<Letter>,
}

/// Finite truncation of an n-sorted labelled free pseudoplane.
///
/// Sort 1 is a bare set of `labels` points. Sort `i ≥ 2` has `2^{i−1}` orbit
/// trees, each the ball of radius `depth` around a root in the Schreier
/// graph of the free group on the active labels `A_i`: all of sort 1 for
/// `i = 2`, and the roots and their neighbours in sort `i − 1` otherwise.
#[derive(Debug, Clone)]
pub struct Fragment {
    sorts: usize,
    labels: usize,
    depth: usize,
    verts: Vec<VertexInfo>,
    index: HashMap<(usize, usize, Vec<Letter>), Elem>,
    by_sort: Vec<Vec<Elem>>,
    roots: Vec<Vec<Elem>>,
    active: Vec<Vec<Elem>>,
    active_set: Vec<HashSet<Elem>>,
}

fn tree_size(generators: u64, depth: usize) -> Option<u64> {
    // 1 + g (1 + (g−1) + ⋯ + (g−1)^{depth−1})
    let mut total = 1u64;
    let mut layer = generators;
    for _ in 0..depth {
        total = total.checked_add(layer)?;
        layer = layer.checked_mul(generators.saturating_sub(1))?;
    }
    Some(total)
}

/// Build the fragment with `n` sorts.
pub fn build_fragment(n: usize, labels: usize, depth: usize, caps: &Caps) -> Result<Fragment> {
    if n < 1 || labels < 1 {
        return Err(Error::input(format!("need n >= 1 and labels >= 1, got n={n}, labels={labels}")));
    }
    if n > 16 {
        return Err(Error::resource(format!("{n} sorts"), 16));
    }
    let mut f = Fragment {
        sorts: n,
        labels,
        depth,
        verts: Vec::new(),
        index: HashMap::new(),
        by_sort: vec![Vec::new(); n + 1],
        roots: vec![Vec::new(); n + 1],
        active: vec![Vec::new(); n + 1],
        active_set: vec![HashSet::new(); n + 1],
    };
    for _ in 0..labels {
        f.push(1, 0, Vec::new());
    }
    for sort in 2..=n {
        let active: Vec<Elem> = if sort == 2 {
            f.by_sort[1].clone()
        } else {
            f.by_sort[sort - 1]
                .iter()
                .copied()
                .filter(|&v| f.verts[v as usize].word.len() <= 1)
                .collect()
        };
        let orbits = 1usize << (sort - 1);
        let per_tree = tree_size(2 * active.len() as u64, depth);
        let total = per_tree
            .and_then(|t| t.checked_mul(orbits as u64))
            .and_then(|t| t.checked_add(f.verts.len() as u64));
        match total {
            Some(t) if t <= caps.max_fragment_vertices => {}
            _ => {
                return Err(Error::resource(
                    format!("fragment with {n} sorts, {labels} labels, depth {depth}"),
                    caps.max_fragment_vertices,
                ))
            }
        }
        f.active_set[sort] = active.iter().copied().collect();
        f.active[sort] = active;
        for orbit in 0..orbits {
            let root = f.push(sort, orbit, Vec::new());
            f.roots[sort].push(root);
            let mut frontier = vec![Vec::new()];
            for _ in 0..depth {
                let mut next = Vec::new();
                for w in &frontier {
                    for &x in &f.active[sort] {
                        for inv in [false, true] {
                            if w.first() == Some(&(x, !inv)) {
                                continue;
                            }
                            let mut nw = Vec::with_capacity(w.len() + 1);
                            nw.push((x, inv));
                            nw.extend_from_slice(w);
                            next.push(nw);
                        }
                    }
                }
                for w in &next {
                    f.push(sort, orbit, w.clone());
                }
                frontier = next;
            }
        }
    }
    Ok(f)
}

impl Fragment {
    fn push(&mut self, sort: usize, orbit: usize, word: Vec<Letter>) -> Elem {
        let id = self.verts.len() as Elem;
        self.index.insert((sort, orbit, word.clone()), id);
        self.verts.push(VertexInfo { sort, orbit, word });
        self.by_sort[sort].push(id);
        id
    }

    pub fn sorts(&self) -> usize {
        self.sorts
    }

    pub fn labels(&self) -> usize {
        self.labels
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.verts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.verts.is_empty()
    }

    pub fn vertex(&self, v: Elem) -> &VertexInfo {
        &self.verts[v as usize]
    }

    pub fn sort_of(&self, v: Elem) -> usize {
        self.verts[v as usize].sort
    }

    pub fn vertices_of_sort(&self, sort: usize) -> &[Elem] {
        &self.by_sort[sort]
    }

    pub fn roots(&self, sort: usize) -> &[Elem] {
        &self.roots[sort]
    }

    /// Labels acting on sort `sort` (a subset of sort `sort − 1`).
    pub fn active_labels(&self, sort: usize) -> &[Elem] {
        &self.active[sort]
    }

    pub fn is_active(&self, sort: usize, label: Elem) -> bool {
        self.active_set.get(sort).is_some_and(|s| s.contains(&label))
    }

    /// `x ∗ v` (or `x^{-1} ∗ v`), if the label acts on the sort of `v` and
    /// the result lies in the fragment.
    pub fn act(&self, x: Elem, v: Elem, inverse: bool) -> Option<Elem> {
        let info = self.verts.get(v as usize)?;
        if info.sort < 2 || !self.is_active(info.sort, x) {
            return None;
        }
        let w = &info.word;
        let nw: Vec<Letter> = if w.first() == Some(&(x, !inverse)) {
            w[1..].to_vec()
        } else {
            let mut nw = Vec::with_capacity(w.len() + 1);
            nw.push((x, inverse));
            nw.extend_from_slice(w);
            nw
        };
        self.index.get(&(info.sort, info.orbit, nw)).copied()
    }

    /// Every edge `x ∗ v` out of `v` is defined in the fragment.
    pub fn is_interior(&self, v: Elem) -> bool {
        self.verts[v as usize].word.len() < self.depth
    }

    pub fn check_element(&self, v: Elem) -> Result<()> {
        if v as usize >= self.verts.len() {
            return Err(Error::input(format!("vertex {v} outside a fragment of {}", self.verts.len())));
        }
        Ok(())
    }

    /// Readable name: `a3` in sort 1, `X2.o1:a0*a1^-1*r` otherwise.
    pub fn describe(&self, v: Elem) -> String {
        let info = &self.verts[v as usize];
        if info.sort == 1 {
            return format!("a{v}");
        }
        let mut s = format!("X{}.o{}:", info.sort, info.orbit);
        for &(x, inv) in &info.word {
            s.push_str(&format!("[{}]{}*", self.describe(x), if inv { "^-1" } else { "" }));
        }
        s.push('r');
        s
    }

    /// The labelled graph on each sort is a forest whose trees are exactly
    /// the orbits, and each label acts injectively.
    pub fn check_freeness(&self) -> Result<()> {
        for sort in 2..=self.sorts {
            let verts = &self.by_sort[sort];
            let mut parent: HashMap<Elem, Elem> = verts.iter().map(|&v| (v, v)).collect();
            fn find(p: &mut HashMap<Elem, Elem>, mut x: Elem) -> Elem {
                while p[&x] != x {
                    let up = p[&p[&x]];
                    p.insert(x, up);
                    x = up;
                }
                x
            }
            let mut edges = 0usize;
            for &x in &self.active[sort] {
                let mut images = HashSet::new();
                for &v in verts {
                    if let Some(w) = self.act(x, v, false) {
                        if !images.insert(w) {
                            return Err(Error::consistency(format!("label {x} is not injective on sort {sort}")));
                        }
                        if self.act(x, w, true) != Some(v) {
                            return Err(Error::consistency(format!("inverse of label {x} fails at vertex {w}")));
                        }
                        if w == v {
                            return Err(Error::consistency(format!("label {x} fixes vertex {v}")));
                        }
                        edges += 1;
                        let (a, b) = (find(&mut parent, v), find(&mut parent, w));
                        if a == b {
                            return Err(Error::consistency(format!("cycle through the edge {v} -[{x}]-> {w}")));
                        }
                        parent.insert(a, b);
                    }
                }
            }
            let components = verts.len() - edges;
            if components != self.roots[sort].len() {
                return Err(Error::consistency(format!(
                    "sort {sort} has {components} components but {} orbits",
                    self.roots[sort].len()
                )));
            }
            for &v in verts {
                let root = self.roots[sort][self.verts[v as usize].orbit];
                if find(&mut parent, v) != find(&mut parent, root) {
                    return Err(Error::consistency(format!("vertex {v} is cut off from its orbit root")));
                }
            }
        }
        Ok(())
    }

    /// Sorted structure with one ternary relation `act_i` of triples
    /// `(x, v, x ∗ v)` per sort `i ≥ 2`.
    pub fn to_structure(&self, caps: &Caps) -> Result<Structure> {
        let mut rels = Vec::new();
        let mut rows: BTreeMap<String, Vec<Vec<Elem>>> = BTreeMap::new();
        let mut total = 0u64;
        for sort in 2..=self.sorts {
            let name = format!("act_{sort}");
            rels.push(RelationSymbol::with_sorts(
                name.clone(),
                vec![format!("X{}", sort - 1), format!("X{sort}"), format!("X{sort}")],
            ));
            let mut table = Vec::new();
            for &x in &self.active[sort] {
                for &v in &self.by_sort[sort] {
                    if let Some(w) = self.act(x, v, false) {
                        table.push(vec![x, v, w]);
                    }
                }
            }
            total += table.len() as u64;
            if total > caps.max_table_rows {
                return Err(Error::resource("fragment action rows", caps.max_table_rows));
            }
            rows.insert(name, table);
        }
        let sort_of = self.verts.iter().map(|v| format!("X{}", v.sort)).collect();
        Structure::new(Signature::new(rels)?, self.verts.len(), Some(sort_of), rows)
    }
}
