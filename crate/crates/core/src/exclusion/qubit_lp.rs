use super::{Certificate, Decision, Method, Povm, Verdict};
use crate::ensembles::Ensemble;
use crate::error::{Error, Result};
use crate::simplex::{maximize, LpOutcome};
use crate::{Matrix, State};

/// Decision threshold on the optimal common lower bound `t*` of the weights.
pub const LP_THRESHOLD: f64 = 1e-9;

fn bloch(s: &State) -> [f64; 3] {
    let a = s.amplitudes();
    let c = a[0].conj() * a[1];
    [2.0 * c.re, 2.0 * c.im, a[0].norm_sqr() - a[1].norm_sqr()]
}

/// Solves `max t` over `Σ α_i |ψ_i><ψ_i| = I`, `α_i >= t`. Returns the weights and
/// `t*`, or `None` when no non-negative combination reaches the identity.
pub fn qubit_lp_weights(states: &[State]) -> Option<(Vec<f64>, f64)> {
    let k = states.len();
    // variables: t+, t-, s_1..s_k with α_i = t+ - t- + s_i
    let n = k + 2;
    let mut objective = vec![0.0; n];
    objective[0] = 1.0;
    objective[1] = -1.0;
    let blochs: Vec<[f64; 3]> = states.iter().map(bloch).collect();
    let mut rows = Vec::with_capacity(4);
    let mut rhs = Vec::with_capacity(4);
    for comp in 0..4 {
        let coeff = |i: usize| if comp == 0 { 1.0 } else { blochs[i][comp - 1] };
        let mut row = vec![0.0; n];
        row[0] = (0..k).map(coeff).sum();
        row[1] = -row[0];
        for i in 0..k {
            row[2 + i] = coeff(i);
        }
        rows.push(row);
        // trace of the identity is 2; its Bloch vector vanishes
        rhs.push(if comp == 0 { 2.0 } else { 0.0 });
    }
    match maximize(&objective, &rows, &rhs) {
        LpOutcome::Optimal { x, value } => {
            let t = x[0] - x[1];
            Some(((0..k).map(|i| t + x[2 + i]).collect(), value))
        }
        LpOutcome::Infeasible | LpOutcome::Unbounded => None,
    }
}

/// Exact antidistinguishability test for single-qubit pure states.
pub fn qubit_antidist_lp(e: &Ensemble) -> Result<Verdict> {
    let d = e.layout().total_dim();
    if d != 2 {
        return Err(Error::NonQubit(d));
    }
    if e.len() < 2 {
        return Err(Error::WrongCount { expected: 2, got: e.len() });
    }
    match qubit_lp_weights(e.states()) {
        Some((alpha, t)) if t > LP_THRESHOLD => {
            let ops: Vec<(String, Matrix)> = e
                .labels()
                .iter()
                .zip(e.states())
                .zip(&alpha)
                .map(|((l, s), &a)| (l.clone(), Matrix::identity(2).sub(s.projector().matrix()).scale(a)))
                .collect();
            let povm = Povm::labeled(e.layout().clone(), ops)?;
            Ok(Verdict::new(Decision::Yes, Method::QubitLp)
                .with_certificate(Certificate::Weights { alpha, povm })
                .with_margins(vec![t]))
        }
        Some((_, t)) => Ok(Verdict::new(Decision::No, Method::QubitLp)
            .with_certificate(Certificate::Violation { criterion: "max min weight".into(), values: vec![t] })
            .with_margins(vec![t])),
        None => Ok(Verdict::new(Decision::No, Method::QubitLp)
            .with_certificate(Certificate::Violation { criterion: "no non-negative weights".into(), values: vec![] })
            .with_note("no non-negative combination of the projectors equals the identity")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{catalog, kets, local_part_ensemble};
    use crate::exclusion::verify_strong;

    fn ens(states: Vec<State>) -> Ensemble {
        let labels = (0..states.len()).map(|i| format!("s{i}")).collect();
        Ensemble::new("q", labels, states).unwrap()
    }

    #[test]
    fn duan_local_part_is_no_with_zero_margin() {
        let e = local_part_ensemble(&catalog("duan4", &[]).unwrap(), "A").unwrap();
        let v = qubit_antidist_lp(&e).unwrap();
        assert!(v.is_no());
        assert!(v.margins[0].abs() <= 1e-9);
    }

    #[test]
    fn orthogonal_pair_has_unit_weights() {
        let v = qubit_antidist_lp(&ens(vec![kets::zero(), kets::one()])).unwrap();
        assert!(v.is_yes());
        let Some(Certificate::Weights { alpha, .. }) = &v.certificate else { panic!() };
        assert!((alpha[0] - 1.0).abs() < 1e-12 && (alpha[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn trine_weights_are_two_thirds() {
        let e = catalog("trine3", &[]).unwrap();
        let v = qubit_antidist_lp(&e).unwrap();
        let Some(Certificate::Weights { alpha, povm }) = &v.certificate else { panic!() };
        for a in alpha {
            assert!((a - 2.0 / 3.0).abs() < 1e-12);
        }
        assert!(verify_strong(&e, povm, 1e-10).unwrap().pass);
    }

    #[test]
    fn pair_of_non_orthogonal_states_is_infeasible() {
        let v = qubit_antidist_lp(&ens(vec![kets::zero(), kets::plus()])).unwrap();
        assert!(v.is_no());
        assert!(v.margins.is_empty());
    }

    #[test]
    fn removing_a_trine_state_flips_to_no() {
        let t = kets::trine();
        assert!(qubit_antidist_lp(&ens(t.clone())).unwrap().is_yes());
        assert!(qubit_antidist_lp(&ens(t[..2].to_vec())).unwrap().is_no());
    }

    #[test]
    fn rejects_non_qubits() {
        let e = catalog("bell4", &[]).unwrap();
        assert!(matches!(qubit_antidist_lp(&e), Err(Error::NonQubit(4))));
    }
}
