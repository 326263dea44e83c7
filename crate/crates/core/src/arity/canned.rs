use std::sync::Arc;

use super::witness::{make_witness, Witness};
use crate::config::Caps;
use crate::error::{Error, Result};
use crate::generators::cherlin_lachlan::{cycle_witness, CherlinLachlan};
use crate::generators::{gen_hypergraph, gen_johnson, parity_reduct, HypergraphMode};
use crate::pseudoplane::{build_fragment, build_goode_witness, check_drop_one_agreement, PhiStructure};
use crate::structures::{Elem, ProfileMode, Relational};

/// A witness from one of the example families together with its structure.
pub struct CannedWitness {
    pub family: String,
    pub structure: Box<dyn Relational>,
    pub witness: Witness,
    /// The tuples in the family's own notation.
    pub description: Vec<String>,
}

/// `({0,1},{0,2},{1,2})` against `({0,1},{0,2},{0,3})` in J(2) over `[4]`.
pub fn johnson2(caps: &Caps) -> Result<CannedWitness> {
    let j = gen_johnson(4, 2, caps)?;
    let s1 = vec![vec![0, 1], vec![0, 2], vec![1, 2]];
    let s2 = vec![vec![0, 1], vec![0, 2], vec![0, 3]];
    let t1 = j.tuple(&s1)?;
    let t2 = j.tuple(&s2)?;
    let witness = make_witness(&j, &t1, &t2, ProfileMode::DropOne)?;
    Ok(CannedWitness {
        family: "johnson2".to_string(),
        structure: Box::new(j),
        witness,
        description: vec![format!("{s1:?}"), format!("{s2:?}")],
    })
}

/// The cycle tuples of length `k + 1` on `2(k + 1)` ground points, in the
/// substructure on their entries with one relation per orbit of arity at
/// most `k + 1`.
pub fn cherlin_lachlan(k: usize, caps: &Caps) -> Result<CannedWitness> {
    let (first, second) = cycle_witness(k)?;
    let mut elems: Vec<[u8; 4]> = Vec::new();
    for e in first.iter().chain(&second) {
        if !elems.contains(e) {
            elems.push(*e);
        }
    }
    let cl = CherlinLachlan::on_elements(2 * (k + 1), elems.clone(), k + 1, caps)?;
    let index = |e: &[u8; 4]| elems.iter().position(|x| x == e).expect("entry listed") as Elem;
    let t1: Vec<Elem> = first.iter().map(index).collect();
    let t2: Vec<Elem> = second.iter().map(index).collect();
    let witness = make_witness(&cl, &t1, &t2, ProfileMode::DropOne)?;
    let show = |t: &[[u8; 4]]| {
        t.iter()
            .map(crate::generators::cherlin_lachlan::describe)
            .collect::<Vec<_>>()
            .join(" ")
    };
    Ok(CannedWitness {
        family: format!("cherlin_lachlan({k})"),
        structure: Box::new(cl),
        witness,
        description: vec![show(&first), show(&second)],
    })
}

/// Parity reduct of the hypergraph on `[k + 2]` whose only edge is
/// `{0..k−1}`: `R` holds on `(0..k)` and fails on `(1..k+1)`, while no
/// relation of arity at most `k` exists.
pub fn kaygraph(k: usize) -> Result<CannedWitness> {
    if k < 2 {
        return Err(Error::input(format!("kay-graphs need k >= 2, got {k}")));
    }
    let edge: Vec<Elem> = (0..k as Elem).collect();
    let h = gen_hypergraph(k + 2, k, &HypergraphMode::Explicit(vec![edge]))?;
    let kg = parity_reduct(&h)?;
    let t1: Vec<Elem> = (0..=k as Elem).collect();
    let t2: Vec<Elem> = (1..=k as Elem + 1).collect();
    let witness = make_witness(&kg.reduct, &t1, &t2, ProfileMode::DropOne)?;
    Ok(CannedWitness {
        family: format!("kaygraph({k})"),
        structure: Box::new(kg.reduct),
        witness,
        description: vec![format!("R{t1:?}"), format!("not R{t2:?}")],
    })
}

/// The tuples `b̄`, `b̄′` accepted and refuted by `φ_{n+1}`, in the
/// fragment with `n + 1` sorts, two labels and depth `n + 1`, carrying a
/// single relation for `φ_{n+1}`. The drop-one ball isomorphisms are
/// checked at radius `n` and the radius reached is recorded.
pub fn goode(n: usize, caps: &Caps) -> Result<CannedWitness> {
    if !(1..=2).contains(&n) {
        return Err(Error::input(format!("canned goode witnesses exist for n = 1, 2; got {n}")));
    }
    let f = Arc::new(build_fragment(n + 1, 2, n + 1, caps)?);
    let mut gw = build_goode_witness(n, &f)?;
    let report = check_drop_one_agreement(&gw, &f, n)?;
    if !report.success {
        return Err(Error::consistency(format!("drop-one agreement failed at radius {n}")));
    }
    gw.radius = report.max_radius;
    let phi = PhiStructure::new(f.clone(), n + 1)?;
    let witness = make_witness(&phi, &gw.b, &gw.b_prime, ProfileMode::DropOne)?;
    let show = |t: &[Elem]| t.iter().map(|&v| f.describe(v)).collect::<Vec<_>>().join(" ");
    Ok(CannedWitness {
        family: format!("goode({n})"),
        structure: Box::new(phi),
        witness,
        description: vec![
            format!("phi_{}: {}", n + 1, show(&gw.b)),
            format!("not phi_{}: {}", n + 1, show(&gw.b_prime)),
            format!("drop-one ball isomorphisms verified at radius {}", n),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arity::verify_witness;

    #[test]
    fn canned_witnesses_verify() {
        let caps = Caps::default();
        let mut all = vec![johnson2(&caps).unwrap()];
        for k in 1..=4 {
            all.push(cherlin_lachlan(k, &caps).unwrap());
        }
        for k in 2..=4 {
            all.push(kaygraph(k).unwrap());
        }
        for n in 1..=2 {
            all.push(goode(n, &caps).unwrap());
        }
        for c in &all {
            let r = verify_witness(c.structure.as_ref(), &c.witness).unwrap();
            assert!(r.pass, "{}", c.family);
        }
    }
}
