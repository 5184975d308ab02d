use num_complex::Complex;
use serde::Serialize;

use super::qubit_lp::qubit_lp_weights;
use super::search::{search_povm_for_exclusions, SearchOptions};
use super::{verify_strong, Povm, DEFAULT_TOL};
use crate::ensembles::Ensemble;
use crate::error::{Error, Result};
use crate::qcore::{orthonormal_span, overlap, CMatrix};
use crate::{Matrix, State, C64};

/// Boundary tolerance of the two inequalities.
pub const CAVES_TOL: f64 = 1e-9;

/// Rank cut-off for the span of a triple.
const SPAN_TOL: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CavesReport {
    pub x12: f64,
    pub x13: f64,
    pub x23: f64,
    pub sum: f64,
    /// `(1 - sum)^2`
    pub quartic_lhs: f64,
    /// `4 x12 x13 x23`
    pub quartic_rhs: f64,
    pub sum_ok: bool,
    pub quartic_ok: bool,
}

impl CavesReport {
    pub fn antidistinguishable(&self) -> bool {
        self.sum_ok && self.quartic_ok
    }

    /// `[1 - sum, lhs - rhs]`; both non-negative on the YES side up to the boundary tolerance.
    pub fn margins(&self) -> Vec<f64> {
        vec![1.0 - self.sum, self.quartic_lhs - self.quartic_rhs]
    }
}

/// Evaluates both inequalities from the squared overlaps.
pub fn caves_from_overlaps(x12: f64, x13: f64, x23: f64) -> CavesReport {
    let sum = x12 + x13 + x23;
    let quartic_lhs = (1.0 - sum).powi(2);
    let quartic_rhs = 4.0 * x12 * x13 * x23;
    CavesReport {
        x12,
        x13,
        x23,
        sum,
        quartic_lhs,
        quartic_rhs,
        sum_ok: sum < 1.0 - CAVES_TOL,
        quartic_ok: quartic_lhs >= quartic_rhs - CAVES_TOL,
    }
}

/// Strong antidistinguishability test for exactly three pure states.
pub fn caves_criterion(states: &[State]) -> Result<CavesReport> {
    if states.len() != 3 {
        return Err(Error::WrongCount { expected: 3, got: states.len() });
    }
    let x = |i: usize, j: usize| -> Result<f64> { Ok(overlap(&states[i], &states[j])?.norm_sqr()) };
    Ok(caves_from_overlaps(x(0, 1)?, x(0, 2)?, x(1, 2)?))
}

/// Three-outcome exclusion measurement for a triple passing the criterion.
///
/// On the span of the triple the measurement is projective onto an orthonormal basis
/// `φ_j` with `<φ_j|ψ_j> = 0` (rank 3) or the qubit measurement `α_j(I - P_j)`
/// (rank 2); the orthogonal complement is split evenly between the outcomes.
pub fn povm_from_caves_triple(e: &Ensemble) -> Result<Povm> {
    if e.len() != 3 {
        return Err(Error::WrongCount { expected: 3, got: e.len() });
    }
    let report = caves_criterion(e.states())?;
    if !report.antidistinguishable() {
        return Err(Error::CriterionNotSatisfied(format!(
            "sum = {}, (1 - sum)^2 = {}, 4 x12 x13 x23 = {}",
            report.sum, report.quartic_lhs, report.quartic_rhs
        )));
    }
    let closed = closed_form(e).filter(|p| verify_strong(e, p, DEFAULT_TOL).map(|r| r.pass).unwrap_or(false));
    if let Some(p) = closed {
        return Ok(p);
    }
    let excluded: Vec<Vec<usize>> = (0..3).map(|j| vec![j]).collect();
    let ops = search_povm_for_exclusions(e.states(), &excluded, &SearchOptions::default())
        .ok_or_else(|| Error::ConvergenceFailure("exclusion measurement search for a Caves triple".into()))?;
    let povm = Povm::labeled(e.layout().clone(), e.labels().iter().cloned().zip(ops).collect())?;
    let r = verify_strong(e, &povm, DEFAULT_TOL)?;
    if !r.pass {
        return Err(Error::ConvergenceFailure("exclusion measurement search for a Caves triple".into()));
    }
    Ok(povm)
}

fn closed_form(e: &Ensemble) -> Option<Povm> {
    let d = e.layout().total_dim();
    let vecs: Vec<Vec<C64>> = e.states().iter().map(|s| s.amplitudes().to_vec()).collect();
    let basis = orthonormal_span(&vecs, SPAN_TOL);
    let span = CMatrix::from_columns(&basis);
    let span_projector = span.matmul(&span.adjoint());
    let complement = Matrix::identity(d).sub(&span_projector).scale(1.0 / 3.0);
    let coords: Vec<Vec<C64>> = vecs.iter().map(|v| span.adjoint().apply(v)).collect();

    let ops: Vec<Matrix> = match basis.len() {
        2 => {
            let local: Vec<State> = coords.iter().map(|c| State::from_amplitudes(c.clone())).collect::<Result<_>>().ok()?;
            let (alpha, t) = qubit_lp_weights(&local)?;
            if t <= 0.0 {
                return None;
            }
            e.states()
                .iter()
                .zip(&alpha)
                .map(|(s, &a)| span_projector.sub(s.projector().matrix()).scale(a).add(&complement))
                .collect()
        }
        3 => {
            let y = CMatrix::from_columns(&coords);
            let phi = zero_diagonal_factor_basis(&y)?;
            (0..3)
                .map(|j| {
                    let v = span.apply(&phi.column(j));
                    CMatrix::outer(&v, &v).add(&complement)
                })
                .collect()
        }
        _ => return None,
    };
    Povm::labeled(e.layout().clone(), e.labels().iter().cloned().zip(ops).collect()).ok()
}

/// Unitary `Φ` (columns `φ_j`) with `<φ_j|y_j> = 0`, where `y_j` are the columns of `y`.
fn zero_diagonal_factor_basis(y: &Matrix) -> Option<Matrix> {
    let gram = y.adjoint().matmul(y);
    for shift in 0..3 {
        let perm = [shift, (shift + 1) % 3, (shift + 2) % 3];
        let g = CMatrix::from_fn(3, 3, |i, j| gram[(perm[i], perm[j])]);
        for m in zero_diagonal_square_roots(&g) {
            // undo the relabeling: row/column a of m refer to original index perm[a]
            let mut full = Matrix::zeros(3, 3);
            for a in 0..3 {
                for b in 0..3 {
                    full[(perm[a], perm[b])] = m[(a, b)];
                }
            }
            let Some(inv) = full.inverse() else { continue };
            let phi = y.matmul(&inv);
            let unitary_defect = phi.adjoint().matmul(&phi).max_abs_diff(&Matrix::identity(3));
            if unitary_defect > 1e-8 {
                continue;
            }
            return Some(phi);
        }
    }
    None
}

/// Matrices `M` with zero diagonal and `M†M = g` for a 3x3 Gram matrix `g` of unit vectors.
fn zero_diagonal_square_roots(g: &Matrix) -> Vec<Matrix> {
    let (x12, x13, x23) = (g[(0, 1)].norm_sqr(), g[(0, 2)].norm_sqr(), g[(1, 2)].norm_sqr());
    let a = 1.0 - x23;
    let b = -(1.0 - x12 + x13 - x23);
    let c = (1.0 - x12) * x13;
    if a <= 1e-12 {
        return Vec::new();
    }
    let disc = b * b - 4.0 * a * c;
    if disc < -1e-9 {
        return Vec::new();
    }
    let root = disc.max(0.0).sqrt();
    let mut out = Vec::new();
    for p in [(-b + root) / (2.0 * a), (-b - root) / (2.0 * a)] {
        if !(-1e-12..=1.0 + 1e-12).contains(&p) {
            continue;
        }
        let p = p.clamp(0.0, 1.0);
        let (u1, u2) = (p.sqrt(), (1.0 - p).sqrt());
        let v2 = if u2 > 1e-12 { g[(0, 1)] / u2 } else { Complex::new(0.0, 0.0) };
        let w2 = if u1 > 1e-12 { g[(0, 2)] / u1 } else { Complex::new(0.0, 0.0) };
        let v1 = (1.0 - v2.norm_sqr()).max(0.0).sqrt();
        let w1 = if v1 > 1e-12 { g[(1, 2)] / v1 } else { Complex::new((1.0 - w2.norm_sqr()).max(0.0).sqrt(), 0.0) };
        let z = Complex::new(0.0, 0.0);
        let m = Matrix::from_vec(3, 3, vec![z, Complex::new(v1, 0.0), w1, Complex::new(u1, 0.0), z, w2, Complex::new(u2, 0.0), v2, z]);
        if m.adjoint().matmul(&m).max_abs_diff(g) <= 1e-9 {
            out.push(m);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{catalog, kets};
    use rand::{Rng, SeedableRng};

    #[test]
    fn weak_set_violates_sum() {
        let e = catalog("weak3", &[]).unwrap();
        let r = caves_criterion(e.states()).unwrap();
        assert!(r.x12.abs() < 1e-12 && (r.x13 - 0.5).abs() < 1e-12 && (r.x23 - 0.5).abs() < 1e-12);
        assert!(!r.sum_ok);
        assert!(!r.antidistinguishable());
    }

    #[test]
    fn trine_sits_on_the_quartic_boundary() {
        let e = catalog("trine3", &[]).unwrap();
        let r = caves_criterion(e.states()).unwrap();
        for x in [r.x12, r.x13, r.x23] {
            assert!((x - 0.25).abs() < 1e-12);
        }
        assert!((r.quartic_lhs - r.quartic_rhs).abs() < 1e-12);
        assert!(r.antidistinguishable());
        let p = povm_from_caves_triple(&e).unwrap();
        assert!(verify_strong(&e, &p, 1e-10).unwrap().pass);
    }

    #[test]
    fn nl1_boundary_triple_gets_a_povm() {
        let e = catalog("nl1", &[]).unwrap();
        let r = caves_criterion(e.states()).unwrap();
        assert!(r.antidistinguishable());
        let p = povm_from_caves_triple(&e).unwrap();
        let v = verify_strong(&e, &p, 1e-9).unwrap();
        assert!(v.pass && v.max_exclusion_residual <= 1e-9);
    }

    #[test]
    fn orthogonal_pair_with_third_state() {
        let chi = kets::real(&[0.6, 0.8]);
        let e = Ensemble::new("x", vec!["0".into(), "1".into(), "chi".into()], vec![kets::zero(), kets::one(), chi])
            .unwrap();
        // x = (0, 0.36, 0.64) sums to 1: not antidistinguishable
        assert!(povm_from_caves_triple(&e).is_err());
    }

    #[test]
    fn random_qutrit_triples() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut built = 0;
        for _ in 0..200 {
            let states: Vec<State> = (0..3)
                .map(|_| {
                    let v: Vec<C64> = (0..3).map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
                    State::from_amplitudes(v).unwrap()
                })
                .collect();
            let e = Ensemble::new("r", vec!["a".into(), "b".into(), "c".into()], states).unwrap();
            if caves_criterion(e.states()).unwrap().antidistinguishable() {
                let p = closed_form(&e).expect("closed form exists when the criterion holds");
                let r = verify_strong(&e, &p, 1e-9).unwrap();
                assert!(r.pass, "{:?}", r.max_exclusion_residual);
                built += 1;
            }
        }
        assert!(built > 20);
    }

    #[test]
    fn wrong_count() {
        assert!(matches!(caves_criterion(&[kets::zero()]), Err(Error::WrongCount { .. })));
    }
}
