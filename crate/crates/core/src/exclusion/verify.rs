use serde::Serialize;

use super::Povm;
use crate::ensembles::Ensemble;
use crate::error::{Error, Result};
use crate::qcore::inner;
use crate::{Matrix, State};

/// `<ψ|E|ψ>` for a Hermitian `E`.
pub(crate) fn probability(s: &State, e: &Matrix) -> f64 {
    inner(s.amplitudes(), &e.apply(s.amplitudes())).re
}

#[derive(Clone, Debug, Serialize)]
pub struct OutcomeCheck {
    pub index: usize,
    pub label: Option<String>,
    /// `Tr(ρ_j Π_j)` for the labeled state `j`.
    pub self_probability: Option<f64>,
    /// `Σ_i Tr(ρ_i Π_j)`
    pub total_probability: f64,
    /// Labels with `Tr(ρ_i Π_j) <= tol`.
    pub excluded: Vec<String>,
    /// Dropped as the zero operator.
    pub zero: bool,
    /// Non-zero but never fires.
    pub redundant: bool,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct StrongReport {
    pub outcomes: Vec<OutcomeCheck>,
    /// Labels no relevant outcome excludes.
    pub unexcluded: Vec<String>,
    pub completeness_residual: f64,
    pub min_eigenvalue: f64,
    /// Largest `Tr(ρ_j Π_j)` over labeled, non-zero outcomes.
    pub max_exclusion_residual: f64,
    pub pass: bool,
}

fn check_layout(e: &Ensemble, m: &Povm) -> Result<()> {
    if e.layout().dims() != m.layout().dims() {
        return Err(Error::LayoutMismatch(format!("{:?} vs {:?}", e.layout().dims(), m.layout().dims())));
    }
    Ok(())
}

/// Checks perfect exclusion and outcome relevance of a labeled measurement.
pub fn verify_strong(e: &Ensemble, m: &Povm, tol: f64) -> Result<StrongReport> {
    check_layout(e, m)?;
    m.validate(tol)?;
    let mut outcomes = Vec::with_capacity(m.len());
    let mut covered = vec![false; e.len()];
    let mut max_residual = 0.0f64;
    for (index, el) in m.elements().iter().enumerate() {
        let target = el.label.as_deref().map(|l| e.index_of(l)).transpose()?;
        let probs: Vec<f64> = e.states().iter().map(|s| probability(s, &el.op)).collect();
        let total: f64 = probs.iter().sum();
        let excluded: Vec<String> =
            e.labels().iter().zip(&probs).filter(|(_, &p)| p <= tol).map(|(l, _)| l.clone()).collect();
        let zero = el.op.max_abs() <= tol;
        let fires = total > tol;
        let self_probability = target.map(|t| probs[t]);
        let ok = if zero {
            true
        } else {
            match target {
                Some(t) => {
                    max_residual = max_residual.max(probs[t]);
                    let good = probs[t] <= tol && fires;
                    if good {
                        covered[t] = true;
                    }
                    good
                }
                None => !fires || !excluded.is_empty(),
            }
        };
        outcomes.push(OutcomeCheck {
            index,
            label: el.label.clone(),
            self_probability,
            total_probability: total,
            excluded,
            zero,
            redundant: !zero && !fires,
            ok,
        });
    }
    let unexcluded: Vec<String> =
        e.labels().iter().zip(&covered).filter(|(_, &c)| !c).map(|(l, _)| l.clone()).collect();
    let pass = unexcluded.is_empty() && outcomes.iter().all(|o| o.ok);
    Ok(StrongReport {
        outcomes,
        unexcluded,
        completeness_residual: m.completeness_residual(),
        min_eigenvalue: m.min_eigenvalue(),
        max_exclusion_residual: max_residual,
        pass,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ExclusionCounts {
    /// Labels with zero probability, per outcome.
    pub per_outcome: Vec<Vec<String>>,
    /// Whether some state fires the outcome.
    pub reachable: Vec<bool>,
    /// Smallest excluded-set size over reachable outcomes.
    pub min_reachable: Option<usize>,
}

/// Which states each outcome rules out.
pub fn exclusion_counts(e: &Ensemble, m: &Povm, tol: f64) -> Result<ExclusionCounts> {
    check_layout(e, m)?;
    m.validate(tol.max(1e-9))?;
    let mut per_outcome = Vec::with_capacity(m.len());
    let mut reachable = Vec::with_capacity(m.len());
    for el in m.elements() {
        let probs: Vec<f64> = e.states().iter().map(|s| probability(s, &el.op)).collect();
        reachable.push(probs.iter().sum::<f64>() > tol);
        per_outcome.push(e.labels().iter().zip(&probs).filter(|(_, &p)| p <= tol).map(|(l, _)| l.clone()).collect());
    }
    let min_reachable =
        per_outcome.iter().zip(&reachable).filter(|(_, &r)| r).map(|(s, _): (&Vec<String>, _)| s.len()).min();
    Ok(ExclusionCounts { per_outcome, reachable, min_reachable })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{catalog, kets};
    use crate::qcore::PartyLayout;

    fn trine_povm() -> Povm {
        let e = catalog("trine3", &[]).unwrap();
        let ops = e
            .labels()
            .iter()
            .zip(e.states())
            .map(|(l, s)| (l.clone(), kets::perp(s).projector().into_matrix().scale(2.0 / 3.0)))
            .collect();
        Povm::labeled(e.layout().clone(), ops).unwrap()
    }

    #[test]
    fn trine_measurement_passes() {
        let e = catalog("trine3", &[]).unwrap();
        let r = verify_strong(&e, &trine_povm(), 1e-10).unwrap();
        assert!(r.pass);
        assert!(r.max_exclusion_residual <= 1e-10);
        assert!(r.completeness_residual <= 1e-12);
    }

    #[test]
    fn weak_set_fails_relevance() {
        let e = catalog("weak3", &[]).unwrap();
        let l = PartyLayout::single(2).unwrap();
        let m = Povm::labeled(
            l,
            vec![
                ("1".into(), kets::zero().projector().into_matrix()),
                ("0".into(), kets::one().projector().into_matrix()),
                ("+".into(), Matrix::zeros(2, 2)),
            ],
        )
        .unwrap();
        let r = verify_strong(&e, &m, 1e-9).unwrap();
        assert!(!r.pass);
        assert_eq!(r.unexcluded, vec!["+".to_string()]);
        assert!(r.outcomes[2].zero);
    }

    #[test]
    fn unknown_label_is_an_error() {
        let e = catalog("trine3", &[]).unwrap();
        let m = Povm::labeled(e.layout().clone(), vec![("X".into(), Matrix::identity(2))]).unwrap();
        assert!(matches!(verify_strong(&e, &m, 1e-9), Err(Error::UnknownLabel(_))));
    }

    #[test]
    fn counts_on_computational_basis() {
        let e = catalog("bell4", &[]).unwrap();
        let ops = (0..4)
            .map(|k| {
                let mut m = Matrix::zeros(4, 4);
                m[(k, k)] = num_complex::Complex::new(1.0, 0.0);
                m
            })
            .collect();
        let m = Povm::unlabeled(e.layout().clone(), ops).unwrap();
        let c = exclusion_counts(&e, &m, 1e-9).unwrap();
        assert!(c.per_outcome.iter().all(|s| s.len() == 2));
        assert_eq!(c.min_reachable, Some(2));
    }
}
