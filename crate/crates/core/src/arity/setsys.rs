use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::witness::{make_witness, verify_witness};
use crate::combin::index_sets;
use crate::config::Caps;
use crate::generators::gen_johnson;
use crate::structures::ProfileMode;

pub type FiniteSet = BTreeSet<u32>;

/// Systems `X`, `Y` of `l` finite sets at induction level `p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetSystemPair {
    pub level: usize,
    pub l: usize,
    pub x: Vec<FiniteSet>,
    pub y: Vec<FiniteSet>,
    /// Uniform `j`-fold intersection size for `l − p < j < l`.
    pub r: BTreeMap<usize, usize>,
}

impl SetSystemPair {
    /// Common size of every set, if there is one.
    pub fn uniform_size(&self) -> Option<usize> {
        let mut sizes = self.x.iter().chain(&self.y).map(BTreeSet::len);
        let first = sizes.next()?;
        sizes.all(|s| s == first).then_some(first)
    }
}

fn intersection(sets: &[FiniteSet], idx: &[usize]) -> FiniteSet {
    let mut it = idx.iter().map(|&i| &sets[i]);
    let Some(first) = it.next() else {
        return FiniteSet::new();
    };
    it.fold(first.clone(), |acc, s| acc.intersection(s).copied().collect())
}

/// Every level `1..=l` of the induction.
///
/// Level 1 has every `x_i = {0}` and every `y_i = ∅`. Going from level `p`
/// to `p + 1`, `r_{l−p}` is the largest set size so far, and every
/// `(l−p)`-fold intersection is padded up to `r_{l−p}` with fresh points:
/// first for `X`, then for `Y`, each over index sets in lexicographic
/// order. Fresh points come from one counter starting at 1.
pub fn set_system_levels(l: usize) -> Vec<SetSystemPair> {
    assert!(l >= 1, "set systems need l >= 1");
    let mut x = vec![FiniteSet::from([0]); l];
    let mut y = vec![FiniteSet::new(); l];
    let mut r = BTreeMap::new();
    let mut counter = 1u32;
    let mut levels = vec![SetSystemPair {
        level: 1,
        l,
        x: x.clone(),
        y: y.clone(),
        r: r.clone(),
    }];
    for p in 1..l {
        let j = l - p;
        let target = x.iter().chain(&y).map(BTreeSet::len).max().unwrap_or(0);
        for system in [&mut x, &mut y] {
            for idx in index_sets(l, j) {
                let have = intersection(system, &idx).len();
                for _ in have..target {
                    for &i in &idx {
                        system[i].insert(counter);
                    }
                    counter += 1;
                }
            }
        }
        r.insert(j, target);
        levels.push(SetSystemPair {
            level: p + 1,
            l,
            x: x.clone(),
            y: y.clone(),
            r: r.clone(),
        });
    }
    levels
}

/// The final level `l` of the induction.
pub fn build_set_systems(l: usize) -> SetSystemPair {
    set_system_levels(l).pop().expect("at least one level")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetSystemViolation {
    pub system: String,
    pub j: usize,
    pub indices: Vec<usize>,
    pub expected: usize,
    pub found: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetSystemReport {
    pub pass: bool,
    pub level: usize,
    pub l: usize,
    pub full_intersection_sizes: [usize; 2],
    pub condition_i: bool,
    /// First violation of the uniform-intersection condition, if any.
    pub violation: Option<SetSystemViolation>,
    /// Common set size at the final level.
    pub k: Option<usize>,
    /// Every proper index set has equal intersection sizes in `X` and `Y`.
    pub proper_intersections_agree: Option<bool>,
    /// Outcome of verifying the embedded J(k) witness, when it was built.
    pub johnson_witness: Option<bool>,
    pub notes: Vec<String>,
}

/// Check conditions (i) and (ii) exhaustively; at the final level with
/// `l ≥ 2`, also check the arity-witness semantics of the pair.
pub fn verify_set_systems(p: &SetSystemPair, caps: &Caps) -> SetSystemReport {
    let l = p.l;
    let all: Vec<usize> = (0..l).collect();
    let fx = intersection(&p.x, &all).len();
    let fy = intersection(&p.y, &all).len();
    let condition_i = fx == 1 && fy == 0;
    let mut violation = None;
    'outer: for (&j, &rj) in &p.r {
        for (name, sys) in [("X", &p.x), ("Y", &p.y)] {
            for idx in index_sets(l, j) {
                let found = intersection(sys, &idx).len();
                if found != rj {
                    violation = Some(SetSystemViolation {
                        system: name.to_string(),
                        j,
                        indices: idx,
                        expected: rj,
                        found,
                    });
                    break 'outer;
                }
            }
        }
    }
    let tracked_ok = p.r.keys().copied().eq((l + 1).saturating_sub(p.level).max(1)..l);
    let mut notes = Vec::new();
    if !tracked_ok {
        notes.push(format!(
            "tracked j values {:?} do not match level {}",
            p.r.keys().collect::<Vec<_>>(),
            p.level
        ));
    }
    let mut report = SetSystemReport {
        pass: condition_i && violation.is_none() && tracked_ok,
        level: p.level,
        l,
        full_intersection_sizes: [fx, fy],
        condition_i,
        violation,
        k: None,
        proper_intersections_agree: None,
        johnson_witness: None,
        notes,
    };
    if p.level != l || l < 2 || !report.pass {
        if l == 1 {
            report
                .notes
                .push("l = 1: the sets {0} and ∅ have different sizes, so there is no common k".to_string());
        }
        return report;
    }
    report.k = p.uniform_size();
    let agree = (1..l).all(|size| {
        index_sets(l, size)
            .iter()
            .all(|idx| intersection(&p.x, idx).len() == intersection(&p.y, idx).len())
    });
    report.proper_intersections_agree = Some(agree);
    report.pass &= agree && report.k.is_some();
    let Some(k) = report.k else {
        report.notes.push("final sets do not share one size".to_string());
        return report;
    };
    let ground = p.x.iter().chain(&p.y).flatten().max().map_or(0, |&m| m as usize + 1);
    let johnson = match gen_johnson(ground, k, caps) {
        Ok(j) => j,
        Err(e) => {
            report.notes.push(format!("J({k}) over [{ground}] not built: {e}"));
            return report;
        }
    };
    let as_tuple = |sys: &[FiniteSet]| {
        johnson.tuple(&sys.iter().map(|s| s.iter().copied().collect()).collect::<Vec<Vec<u32>>>())
    };
    let ok = match (as_tuple(&p.x), as_tuple(&p.y)) {
        (Ok(t1), Ok(t2)) => make_witness(&johnson, &t1, &t2, ProfileMode::DropOne)
            .and_then(|w| verify_witness(&johnson, &w))
            .map(|r| r.pass)
            .unwrap_or(false),
        _ => false,
    };
    report.johnson_witness = Some(ok);
    report
        .notes
        .push(format!("embedded in J({k}) over [{ground}] as a drop-one witness"));
    report.pass &= ok;
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_case() {
        let p = build_set_systems(1);
        assert_eq!(p.x, vec![FiniteSet::from([0])]);
        assert_eq!(p.y, vec![FiniteSet::new()]);
        let r = verify_set_systems(&p, &Caps::default());
        assert!(r.pass);
        assert_eq!(r.k, None);
    }

    #[test]
    fn l2_by_hand() {
        // r_1 = 1; X already has singleton sets, each y_i gets one new point
        let p = build_set_systems(2);
        assert_eq!(p.x, vec![FiniteSet::from([0]), FiniteSet::from([0])]);
        assert_eq!(p.y, vec![FiniteSet::from([1]), FiniteSet::from([2])]);
        let r = verify_set_systems(&p, &Caps::default());
        assert!(r.pass, "{r:?}");
        assert_eq!(r.k, Some(1));
    }

    #[test]
    fn l3_matches_triple_shape() {
        let p = build_set_systems(3);
        assert_eq!(p.uniform_size(), Some(2));
        // X: three sets through 0; Y: a triangle
        assert_eq!(p.y, vec![FiniteSet::from([1, 2]), FiniteSet::from([1, 3]), FiniteSet::from([2, 3])]);
        assert!(p.x.iter().all(|s| s.contains(&0)));
        assert!(verify_set_systems(&p, &Caps::default()).pass);
    }

    #[test]
    fn every_level_passes() {
        for l in 1..=5 {
            for p in set_system_levels(l) {
                let r = verify_set_systems(&p, &Caps::default());
                assert!(r.pass, "l={l} level={} {r:?}", p.level);
            }
        }
    }

    #[test]
    fn removing_an_element_is_caught() {
        let mut p = build_set_systems(4);
        let e = *p.y[2].iter().next().unwrap();
        p.y[2].remove(&e);
        let r = verify_set_systems(&p, &Caps::default());
        assert!(!r.pass);
        let v = r.violation.unwrap();
        assert_eq!(v.system, "Y");
        assert!(v.indices.contains(&2));
    }
}
