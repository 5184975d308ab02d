use super::{
    caves_criterion, find_triple_cover, povm_from_caves_triple, qubit_antidist_lp, search_exclusion_povm, Certificate,
    Decision, Method, Povm, SearchOptions, Verdict, DEFAULT_TOL,
};
use crate::ensembles::Ensemble;
use crate::error::{Error, Result};
use crate::qcore::overlap;
use crate::{Matrix, State};

#[derive(Clone, Debug)]
pub struct DecideOptions {
    /// Exclusion tolerance used to verify certificates.
    pub tol: f64,
    pub search: SearchOptions,
}

impl Default for DecideOptions {
    fn default() -> Self {
        Self { tol: DEFAULT_TOL, search: SearchOptions::default() }
    }
}

/// Decides strong antidistinguishability.
///
/// Three states go to the Caves criterion and single-qubit sets to the weight LP, both
/// exact. Two states are antidistinguishable exactly when orthogonal. Larger sets try a
/// cover by antidistinguishable triples, then the feasibility search; without a
/// certificate the answer is UNKNOWN.
pub fn decide_antidist(e: &Ensemble, opts: &DecideOptions) -> Result<Verdict> {
    let k = e.len();
    if k < 2 {
        return Err(Error::WrongCount { expected: 2, got: k });
    }
    if k == 3 {
        let report = caves_criterion(e.states())?;
        let margins = report.margins();
        if report.antidistinguishable() {
            let v = Verdict::new(Decision::Yes, Method::Caves).with_margins(margins);
            return Ok(match povm_from_caves_triple(e) {
                Ok(povm) => v.with_certificate(Certificate::Povm { povm }),
                Err(err) => v.with_note(format!("measurement construction failed: {err}")),
            });
        }
        let criterion = if report.sum_ok { "(1 - sum)^2 >= 4 x12 x13 x23" } else { "x12 + x13 + x23 < 1" };
        return Ok(Verdict::new(Decision::No, Method::Caves)
            .with_certificate(Certificate::Violation {
                criterion: criterion.into(),
                values: vec![report.x12, report.x13, report.x23],
            })
            .with_margins(margins));
    }
    if e.layout().total_dim() == 2 {
        return qubit_antidist_lp(e);
    }
    if k == 2 {
        return Ok(decide_pair(e));
    }
    if let Some((triples, povm)) = find_triple_cover(e, opts.tol) {
        let names = triples.iter().map(|t| t.iter().map(|&i| e.labels()[i].clone()).collect()).collect();
        return Ok(Verdict::new(Decision::Yes, Method::TripleCover)
            .with_certificate(Certificate::TripleCover { triples: names, povm })
            .with_margins(vec![triples.len() as f64]));
    }
    if let Some(povm) = search_exclusion_povm(e, &opts.search, opts.tol) {
        return Ok(Verdict::new(Decision::Yes, Method::Search).with_certificate(Certificate::Povm { povm }));
    }
    Ok(Verdict::new(Decision::Unknown, Method::Search).with_note("no triple cover and no certificate found"))
}

/// Two pure states can be excluded perfectly only when they are orthogonal.
fn decide_pair(e: &Ensemble) -> Verdict {
    let (a, b) = (&e.states()[0], &e.states()[1]);
    let x = overlap(a, b).map(|z| z.norm_sqr()).unwrap_or(1.0);
    if x <= 1e-20 {
        let pb = b.projector().into_matrix();
        let d = e.layout().total_dim();
        let ops = vec![(e.labels()[0].clone(), pb.clone()), (e.labels()[1].clone(), Matrix::identity(d).sub(&pb))];
        let povm = Povm::labeled(e.layout().clone(), ops).expect("dimensions agree");
        Verdict::new(Decision::Yes, Method::Certificate)
            .with_certificate(Certificate::Povm { povm })
            .with_margins(vec![-x])
    } else {
        Verdict::new(Decision::No, Method::NecessaryViolation)
            .with_certificate(Certificate::Violation { criterion: "|<psi1|psi2>|^2 = 0".into(), values: vec![x] })
            .with_margins(vec![-x])
    }
}

/// `decide_antidist` on states labeled `s1, s2, ...`.
pub fn decide_states(states: &[State], opts: &DecideOptions) -> Result<Verdict> {
    let labels = (1..=states.len()).map(|i| format!("s{i}")).collect();
    decide_antidist(&Ensemble::new("states", labels, states.to_vec())?, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{catalog, local_part_ensemble, sequence_ensemble};
    use crate::exclusion::verify_strong;

    fn check_yes(e: &Ensemble, v: &Verdict) {
        assert!(v.is_yes(), "{}: {:?}", e.name(), v.decision);
        let p = v.povm().expect("certificate");
        assert!(verify_strong(e, p, 1e-8).unwrap().pass, "{}", e.name());
    }

    #[test]
    fn duan_global_is_a_triple_cover() {
        let e = catalog("duan4", &[]).unwrap();
        let v = decide_antidist(&e, &DecideOptions::default()).unwrap();
        assert_eq!(v.method, Method::TripleCover);
        check_yes(&e, &v);
    }

    #[test]
    fn su3_is_no_by_caves() {
        let e = catalog("su3", &[]).unwrap();
        let v = decide_antidist(&e, &DecideOptions::default()).unwrap();
        assert!(v.is_no());
        assert_eq!(v.method, Method::Caves);
        assert!((v.margins[0] + 0.25).abs() < 1e-12);
    }

    #[test]
    fn duan_pair_local_part_is_covered() {
        let d2 = sequence_ensemble(&catalog("duan4", &[]).unwrap(), 2).unwrap();
        let a = local_part_ensemble(d2.ensemble(), "A").unwrap();
        assert_eq!(a.len(), 12);
        let v = decide_antidist(&a, &DecideOptions::default()).unwrap();
        assert_eq!(v.method, Method::TripleCover);
        check_yes(&a, &v);
    }

    #[test]
    fn pairs_follow_orthogonality() {
        let bell = catalog("bell4", &[]).unwrap();
        let v = decide_antidist(&bell.subset(&[0, 2]), &DecideOptions::default()).unwrap();
        check_yes(&bell.subset(&[0, 2]), &v);
        let su = catalog("su3", &[]).unwrap();
        assert!(decide_antidist(&su.subset(&[0, 1]), &DecideOptions::default()).unwrap().is_no());
    }

    #[test]
    fn every_catalog_yes_is_certified() {
        for entry in crate::ensembles::catalog_entries() {
            let params: &[f64] = if entry.param.is_some() { &[1.0] } else { &[] };
            let e = catalog(entry.name, params).unwrap();
            let v = decide_antidist(&e, &DecideOptions::default()).unwrap();
            if v.is_yes() {
                check_yes(&e, &v);
            }
        }
    }
}
