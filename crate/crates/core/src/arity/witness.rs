use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::structures::{qf_type, subtype_profile, Elem, ProfileMode, Relational};

/// Printed with every witness verdict.
pub const FINITE_PROVISO: &str = "A witness found in a finite structure certifies a lower bound on the arity \
of a theory only when that structure embeds in a model of the theory with quantifier-free types preserved.";

/// Two tuples with equal subtype profiles and distinct full types.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub structure_digest: String,
    pub t1: Vec<Elem>,
    pub t2: Vec<Elem>,
    pub mode: ProfileMode,
    pub profile_digest: String,
    pub type_digests: [String; 2],
    pub transcript: Vec<String>,
}

/// One profile entry compared during verification.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparedEntry {
    pub indices: Vec<usize>,
    pub equal: bool,
    pub atoms_t1: Vec<String>,
    pub atoms_t2: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub pass: bool,
    pub profiles_equal: bool,
    pub types_differ: bool,
    pub profile_digests: [String; 2],
    pub type_digests: [String; 2],
    pub entries: Vec<ComparedEntry>,
    pub full_atoms_t1: Vec<String>,
    pub full_atoms_t2: Vec<String>,
    pub proviso: String,
}

fn recompute<S: Relational + ?Sized>(s: &S, t1: &[Elem], t2: &[Elem], mode: ProfileMode) -> Result<WitnessReport> {
    if t1.len() != t2.len() {
        return Err(Error::input(format!("tuple lengths {} and {} differ", t1.len(), t2.len())));
    }
    let sig = s.signature();
    let p1 = subtype_profile(s, t1, mode)?;
    let p2 = subtype_profile(s, t2, mode)?;
    let q1 = qf_type(s, t1)?;
    let q2 = qf_type(s, t2)?;
    let entries = p1
        .entries
        .iter()
        .zip(&p2.entries)
        .map(|(a, b)| ComparedEntry {
            indices: a.indices.clone(),
            equal: a.qf == b.qf,
            atoms_t1: a.qf.describe_atoms(sig),
            atoms_t2: b.qf.describe_atoms(sig),
        })
        .collect();
    let profiles_equal = p1 == p2;
    let types_differ = q1 != q2;
    Ok(WitnessReport {
        pass: profiles_equal && types_differ,
        profiles_equal,
        types_differ,
        profile_digests: [p1.digest(), p2.digest()],
        type_digests: [q1.digest(), q2.digest()],
        entries,
        full_atoms_t1: q1.describe_atoms(sig),
        full_atoms_t2: q2.describe_atoms(sig),
        proviso: FINITE_PROVISO.to_string(),
    })
}

/// Package `t1`, `t2` as a witness, failing if they are not one.
pub fn make_witness<S: Relational + ?Sized>(s: &S, t1: &[Elem], t2: &[Elem], mode: ProfileMode) -> Result<Witness> {
    let r = recompute(s, t1, t2, mode)?;
    if !r.pass {
        return Err(Error::input(format!(
            "tuples {t1:?} and {t2:?} are not a witness (profiles equal: {}, types differ: {})",
            r.profiles_equal, r.types_differ
        )));
    }
    let mut transcript = Vec::new();
    for e in &r.entries {
        transcript.push(format!("subtuple {:?}: {} true atoms, equal", e.indices, e.atoms_t1.len()));
    }
    let a1: BTreeSet<&String> = r.full_atoms_t1.iter().collect();
    let a2: BTreeSet<&String> = r.full_atoms_t2.iter().collect();
    let only1: Vec<&String> = a1.difference(&a2).copied().collect();
    let only2: Vec<&String> = a2.difference(&a1).copied().collect();
    transcript.push(format!("full type: atoms only in t1: {only1:?}; atoms only in t2: {only2:?}"));
    Ok(Witness {
        structure_digest: s.digest(),
        t1: t1.to_vec(),
        t2: t2.to_vec(),
        mode,
        profile_digest: r.profile_digests[0].clone(),
        type_digests: r.type_digests.clone(),
        transcript,
    })
}

/// Recompute both profiles and both full types of `w` in `s`.
///
/// `pass` holds iff the profiles agree and the full types differ. A witness
/// recorded against a different structure is rejected as stale.
pub fn verify_witness<S: Relational + ?Sized>(s: &S, w: &Witness) -> Result<WitnessReport> {
    let found = s.digest();
    if found != w.structure_digest {
        return Err(Error::StaleWitness {
            expected: w.structure_digest.clone(),
            found,
        });
    }
    recompute(s, &w.t1, &w.t2, w.mode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Caps;
    use crate::generators::gen_johnson;

    fn reference_triples() -> (crate::generators::JohnsonStructure, Vec<Elem>, Vec<Elem>) {
        let j = gen_johnson(4, 2, &Caps::default()).unwrap();
        let t1 = j.tuple(&[vec![0, 1], vec![0, 2], vec![1, 2]]).unwrap();
        let t2 = j.tuple(&[vec![0, 1], vec![0, 2], vec![0, 3]]).unwrap();
        (j, t1, t2)
    }

    #[test]
    fn johnson_triples_pass() {
        let (j, t1, t2) = reference_triples();
        let w = make_witness(&j, &t1, &t2, ProfileMode::DropOne).unwrap();
        let r = verify_witness(&j, &w).unwrap();
        assert!(r.pass);
        assert!(r.full_atoms_t1.contains(&"E_3_0(x0,x1,x2)".to_string()));
        assert!(r.full_atoms_t2.contains(&"E_3_1(x0,x1,x2)".to_string()));
        for e in &r.entries {
            assert!(e.atoms_t1.iter().any(|a| a.starts_with("E_2_1")));
        }
    }

    #[test]
    fn equal_tuples_fail() {
        let (j, t1, _) = reference_triples();
        assert!(make_witness(&j, &t1, &t1, ProfileMode::DropOne).is_err());
        let (_, _, t2) = reference_triples();
        let mut w = make_witness(&j, &t1, &t2, ProfileMode::DropOne).unwrap();
        w.t2 = t1.clone();
        assert!(!verify_witness(&j, &w).unwrap().pass);
    }

    #[test]
    fn stale_digest_rejected() {
        let (j, t1, t2) = reference_triples();
        let w = make_witness(&j, &t1, &t2, ProfileMode::DropOne).unwrap();
        let other = gen_johnson(5, 2, &Caps::default()).unwrap();
        assert!(matches!(verify_witness(&other, &w), Err(Error::StaleWitness { .. })));
    }
}
