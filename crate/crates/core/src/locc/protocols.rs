use std::collections::BTreeMap;

use super::LoccProtocol;
use crate::ensembles::kets::{basis, pair, perp, sic};
use crate::Matrix;

fn map(entries: &[(&str, &[&str])]) -> BTreeMap<String, Vec<String>> {
    entries.iter().map(|(k, v)| (k.to_string(), v.iter().map(|s| s.to_string()).collect())).collect()
}

fn projectors(states: &[crate::State]) -> Vec<Matrix> {
    states.iter().map(|s| s.projector().into_matrix()).collect()
}

/// Both parties measure `{|0>, |1>}`; each joint outcome names one excluded Bell state.
pub fn bell_computational_protocol() -> LoccProtocol {
    let z = projectors(&[basis(2, 0), basis(2, 1)]);
    LoccProtocol::one_round(
        vec![z.clone(), z],
        map(&[("0,0", &["Psi+"]), ("0,1", &["Phi+"]), ("1,0", &["Phi-"]), ("1,1", &["Psi-"])]),
    )
}

/// Alice measures `{|0+1>, |0-1>, |2>}`, Bob `{|0>, |1+2>, |1-2>}`.
pub fn bennett_protocol() -> LoccProtocol {
    let alice = projectors(&[pair(3, 0, 1, 1.0), pair(3, 0, 1, -1.0), basis(3, 2)]);
    let bob = projectors(&[basis(3, 0), pair(3, 1, 2, 1.0), pair(3, 1, 2, -1.0)]);
    LoccProtocol::one_round(
        vec![alice, bob],
        map(&[
            ("0,0", &["psi8"]),
            ("0,1", &["psi4"]),
            ("0,2", &["psi5"]),
            ("1,0", &["psi9"]),
            ("1,1", &["psi6", "psi7"]),
            ("1,2", &["psi6", "psi7"]),
            ("2,0", &["psi1", "psi2", "psi3"]),
            ("2,1", &["psi1", "psi2", "psi3"]),
            ("2,2", &["psi1", "psi2", "psi3"]),
        ]),
    )
}

/// Alice alone measures `{|s_i^perp><s_i^perp| / 2}`; outcome `i` excludes `gamma_i`.
pub fn double_sic_protocol() -> LoccProtocol {
    let alice: Vec<Matrix> = sic().iter().map(|s| perp(s).projector().into_matrix().scale(0.5)).collect();
    let exclusion_map = (0..4).map(|i| (format!("{i},0"), vec![format!("gamma{}", i + 1)])).collect();
    LoccProtocol::one_round(vec![alice, vec![Matrix::identity(2)]], exclusion_map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::catalog;
    use crate::locc::verify_local_protocol;

    #[test]
    fn bell_protocol_passes() {
        let e = catalog("bell4", &[]).unwrap();
        let r = verify_local_protocol(&e, &bell_computational_protocol(), 1e-10).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.outcomes.iter().all(|o| o.claimed.as_ref().unwrap().len() == 1));
    }

    #[test]
    fn bennett_protocol_passes() {
        let e = catalog("bennett9", &[]).unwrap();
        let r = verify_local_protocol(&e, &bennett_protocol(), 1e-10).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.outcomes.iter().filter(|o| o.reachable).count(), 9);
    }

    #[test]
    fn double_sic_protocol_passes() {
        let e = catalog("double_sic_antiparallel", &[]).unwrap();
        let r = verify_local_protocol(&e, &double_sic_protocol(), 1e-10).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.completeness_residual <= 1e-10);
    }
}
