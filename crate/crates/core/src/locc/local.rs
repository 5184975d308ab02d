use super::{build_pairwise_lad_protocol, protocol_povm, verify_local_protocol, LOCAL_POVM_TOL};
use crate::ensembles::{local_part_ensemble, Ensemble};
use crate::error::{Error, Result};
use crate::exclusion::{decide_antidist, Certificate, Decision, DecideOptions, Method, Verdict};

/// Local antidistinguishability.
///
/// A single party is decided globally. Orthogonal sets get the pairwise protocol, verified before it is reported. Product
/// sets are otherwise decided on their local parts: one antidistinguishable part suffices,
/// and when every part fails no local protocol exists.
pub fn decide_local_antidist(e: &Ensemble, opts: &DecideOptions) -> Result<Verdict> {
    if e.layout().party_count() == 1 {
        return decide_antidist(e, opts);
    }
    match build_pairwise_lad_protocol(e) {
        Ok(p) => {
            let report = verify_local_protocol(e, &p, opts.tol.max(LOCAL_POVM_TOL))?;
            if report.pass {
                let povm = protocol_povm(e, &p)?;
                return Ok(Verdict::new(Decision::Yes, Method::PairwiseWalgate)
                    .with_certificate(Certificate::Povm { povm })
                    .with_margins(vec![-report.max_exclusion_residual]));
            }
        }
        Err(Error::NonOrthogonal(..)) => {}
        Err(err) => return Err(err),
    }
    if !e.is_product() {
        return Ok(Verdict::new(Decision::Unknown, Method::LocalPartCriterion)
            .with_note("not orthogonal and no product factorization"));
    }
    let mut parties = Vec::new();
    for name in e.layout().names() {
        let local = local_part_ensemble(e, name)?;
        let v = if local.len() < 2 {
            Verdict::new(Decision::No, Method::NecessaryViolation).with_note("local part has a single state")
        } else {
            decide_antidist(&local, opts)?
        };
        parties.push((name.clone(), v));
    }
    let decision = if parties.iter().any(|(_, v)| v.is_yes()) {
        Decision::Yes
    } else if parties.iter().all(|(_, v)| v.is_no()) {
        Decision::No
    } else {
        Decision::Unknown
    };
    let margins = parties.iter().filter_map(|(_, v)| v.margins.first().copied()).collect();
    Ok(Verdict::new(decision, Method::LocalPartCriterion)
        .with_certificate(Certificate::LocalParts { parties })
        .with_margins(margins))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::catalog;

    fn decide(name: &str) -> Verdict {
        decide_local_antidist(&catalog(name, &[]).unwrap(), &DecideOptions::default()).unwrap()
    }

    #[test]
    fn duan_local_parts_fail_the_lp() {
        let v = decide("duan4");
        assert!(v.is_no());
        let Some(Certificate::LocalParts { parties }) = &v.certificate else { panic!() };
        assert!(parties.iter().all(|(_, p)| p.method == Method::QubitLp && p.is_no()));
    }

    #[test]
    fn orthogonal_sets_use_the_pairwise_protocol() {
        for name in ["bell4", "bennett9"] {
            let v = decide(name);
            assert!(v.is_yes(), "{name}");
            assert_eq!(v.method, Method::PairwiseWalgate);
        }
    }

    #[test]
    fn su3_is_not_local() {
        assert!(decide("su3").is_no());
    }

    #[test]
    fn single_party_is_global() {
        let v = decide("trine3");
        assert!(v.is_yes());
        assert_eq!(v.method, Method::Caves);
    }
}
