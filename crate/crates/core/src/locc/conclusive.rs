use serde::Serialize;

use super::{check_local, outcome_key, product_indices};
use crate::ensembles::Ensemble;
use crate::error::{Error, Result};
use crate::exclusion::probability;
use crate::Matrix;

#[derive(Clone, Debug, Serialize)]
pub struct ConclusiveOutcome {
    pub key: String,
    pub probability: f64,
    /// Labels with nonzero probability for this outcome.
    pub consistent: Vec<String>,
}

impl ConclusiveOutcome {
    pub fn is_conclusive(&self) -> bool {
        self.consistent.len() == 1
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConclusiveReport {
    /// Reachable joint outcomes only.
    pub outcomes: Vec<ConclusiveOutcome>,
    pub identified: Vec<String>,
    pub unidentified: Vec<String>,
    pub pass: bool,
}

/// Checks whether the product measurement `povms` (one per party) identifies every
/// state of `e` unambiguously on some outcome.
pub fn verify_conclusive_identification(e: &Ensemble, povms: &[Vec<Matrix>], tol: f64) -> Result<ConclusiveReport> {
    let dims = e.layout().dims();
    if povms.len() != dims.len() {
        return Err(Error::WrongCount { expected: dims.len(), got: povms.len() });
    }
    for (ops, &d) in povms.iter().zip(dims) {
        check_local(ops, d)?;
    }
    let sizes: Vec<usize> = povms.iter().map(Vec::len).collect();
    let k = e.len() as f64;
    let mut outcomes = Vec::new();
    let mut hit = vec![false; e.len()];
    for t in product_indices(&sizes) {
        let op = t.iter().enumerate().map(|(p, &o)| povms[p][o].clone()).reduce(|a, b| a.kron(&b)).expect("parties");
        let probs: Vec<f64> = e.states().iter().map(|s| probability(s, &op)).collect();
        let total = probs.iter().sum::<f64>() / k;
        if total <= tol {
            continue;
        }
        let idx: Vec<usize> = (0..e.len()).filter(|&i| probs[i] > tol).collect();
        if idx.len() == 1 {
            hit[idx[0]] = true;
        }
        outcomes.push(ConclusiveOutcome {
            key: outcome_key(&t),
            probability: total,
            consistent: idx.iter().map(|&i| e.labels()[i].clone()).collect(),
        });
    }
    let split = |want: bool| e.labels().iter().zip(&hit).filter(|(_, &h)| h == want).map(|(l, _)| l.clone()).collect();
    let identified: Vec<String> = split(true);
    let unidentified: Vec<String> = split(false);
    Ok(ConclusiveReport { pass: unidentified.is_empty(), outcomes, identified, unidentified })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{catalog, kets};

    fn proj(s: &crate::State) -> Matrix {
        s.projector().into_matrix()
    }

    #[test]
    fn nl1_is_identified_conclusively() {
        let e = catalog("nl1", &[]).unwrap();
        let third = |s: &crate::State| proj(s).scale(1.0 / 3.0);
        let (m1, m2, m3) = (third(&kets::one()), third(&kets::minus()), third(&kets::iminus()));
        let m4 = Matrix::identity(2).sub(&m1).sub(&m2).sub(&m3);
        let m = vec![m1, m2, m3, m4];
        let r = verify_conclusive_identification(&e, &[m.clone(), m], 1e-12).unwrap();
        assert!(r.pass);
        let o = r.outcomes.iter().find(|o| o.key == "0,0").unwrap();
        assert_eq!(o.consistent, vec!["psi3".to_string()]);
    }

    #[test]
    fn nl2_measurement_identifies_all() {
        let t = 1.0;
        let e = catalog("nl2", &[t]).unwrap();
        let z = vec![proj(&kets::zero()), proj(&kets::one())];
        let c = vec![proj(&kets::theta(t)), proj(&kets::perp(&kets::theta(t)))];
        assert!(verify_conclusive_identification(&e, &[z.clone(), z, c], 1e-12).unwrap().pass);
    }

    #[test]
    fn bell_has_no_conclusive_outcome() {
        let e = catalog("bell4", &[]).unwrap();
        let z = vec![proj(&kets::zero()), proj(&kets::one())];
        let r = verify_conclusive_identification(&e, &[z.clone(), z], 1e-12).unwrap();
        assert!(!r.pass);
        assert!(r.outcomes.iter().all(|o| o.consistent.len() == 2));
    }

    #[test]
    fn invalid_povm_is_an_error() {
        let e = catalog("bell4", &[]).unwrap();
        let z = vec![proj(&kets::zero())];
        assert!(verify_conclusive_identification(&e, &[z.clone(), z], 1e-12).is_err());
    }
}
