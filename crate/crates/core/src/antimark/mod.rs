//! Local state antimarking: sequence tasks decided through local parts, the
//! sequence-length scaling rule, explicit sequence measurements and θ sweeps.

mod pbr;
mod sweep;
mod theta;

pub use pbr::{pbr_sequence_measurement, pbr_sequence_protocol, xi_basis};
pub use sweep::{linear_grid, nl2_global_ok, nl2_local_ok, sweep_theta, Boundary, Family, SweepOptions, SweepPoint, SweepResult};
pub use theta::{
    theta_global_measurement, theta_pair_map, theta_sequence_protocol, theta_valid, ThetaMeasurement, THETA_LOCAL_LABELS,
};

use serde::Serialize;

use crate::ensembles::{local_part_ensemble, sequence_ensemble, Ensemble, SequenceEnsemble};
use crate::error::{Error, Result};
use crate::exclusion::{decide_antidist, exclusion_counts, Certificate, Decision, DecideOptions, Method, Povm, Verdict};
use crate::locc::{LoccProtocol, ProtocolKind};
use crate::Matrix;

/// `(n, m)` antimarking task on a parent ensemble.
#[derive(Clone, Debug)]
pub struct LsamTask {
    parent: Ensemble,
    n: usize,
    m: u128,
}

impl LsamTask {
    pub fn new(parent: Ensemble, n: usize, m: u128) -> Result<Self> {
        let big_n = parent.len();
        if n == 0 || n > big_n {
            return Err(Error::Range(format!("n = {n} not in 1..={big_n}")));
        }
        let count = falling_factorial(big_n, n).ok_or_else(|| Error::Range("sequence count overflows".into()))?;
        if m == 0 || m >= count {
            return Err(Error::Range(format!("m = {m} not in 1..={}", count - 1)));
        }
        Ok(Self { parent, n, m })
    }

    pub fn parent(&self) -> &Ensemble {
        &self.parent
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> u128 {
        self.m
    }

    pub fn sequences(&self) -> Result<SequenceEnsemble> {
        sequence_ensemble(&self.parent, self.n)
    }
}

/// `N (N-1) ... (N-n+1)`
pub fn falling_factorial(big_n: usize, n: usize) -> Option<u128> {
    (0..n).try_fold(1u128, |acc, k| acc.checked_mul((big_n - k) as u128))
}

/// Eliminations guaranteed for length `n_prime` by lifting an `(n, m)` protocol:
/// `m (N-n)! / (N-n')!`.
pub fn lsam_scaling(big_n: usize, n: usize, m: u128, n_prime: usize) -> Result<u128> {
    if n == 0 || n > n_prime || n_prime > big_n {
        return Err(Error::Range(format!("need 1 <= n <= n' <= N, got n = {n}, n' = {n_prime}, N = {big_n}")));
    }
    if m == 0 {
        return Err(Error::Range("m must be positive".into()));
    }
    falling_factorial(big_n - n, n_prime - n)
        .and_then(|f| f.checked_mul(m))
        .ok_or_else(|| Error::Range("result overflows".into()))
}

/// `(n, 1)` antimarking through the local parts of the sequence ensemble.
///
/// YES when some party's local part is antidistinguishable; NO when every local part
/// fails, which for product parents rules out any local protocol.
pub fn check_lsam(task: &LsamTask, opts: &DecideOptions) -> Result<Verdict> {
    if task.m != 1 {
        return Err(Error::Range(format!("only m = 1 is decided by local parts, got m = {}", task.m)));
    }
    if !task.parent.is_product() {
        return Err(Error::NotProduct(task.parent.name().to_string()));
    }
    let seq = task.sequences()?;
    let mut parties = Vec::new();
    for name in seq.ensemble().layout().names() {
        let local = local_part_ensemble(seq.ensemble(), name)?;
        parties.push((name.clone(), decide_antidist(&local, opts)?));
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

/// `(n, 1)` antimarking with a global measurement on the sequence ensemble.
pub fn check_lsam_global(task: &LsamTask, opts: &DecideOptions) -> Result<Verdict> {
    if task.m != 1 {
        return Err(Error::Range(format!("only m = 1 is decided globally, got m = {}", task.m)));
    }
    decide_antidist(task.sequences()?.ensemble(), opts)
}

/// Measurement applied to a sequence ensemble.
#[derive(Clone, Debug)]
pub enum SequenceMeasurement {
    Local(LoccProtocol),
    Global(Povm),
}

#[derive(Clone, Debug, Serialize)]
pub struct EliminationReport {
    /// Smallest number of sequences excluded by a reachable outcome.
    pub min_eliminated: usize,
    pub per_outcome: Vec<usize>,
    pub reachable: Vec<bool>,
    pub pass: bool,
}

/// Counts sequences each reachable outcome excludes; the task passes when the
/// minimum reaches `m`.
pub fn verify_sequence_elimination(task: &LsamTask, measurement: &SequenceMeasurement, tol: f64) -> Result<EliminationReport> {
    let seq = task.sequences()?;
    let e = seq.ensemble();
    let povm = match measurement {
        SequenceMeasurement::Local(p) => p.effective_povm(e.layout())?,
        SequenceMeasurement::Global(p) => {
            if p.layout().total_dim() != e.layout().total_dim() {
                return Err(Error::LayoutMismatch(format!(
                    "measurement on dimension {} for sequences of dimension {}",
                    p.layout().total_dim(),
                    e.layout().total_dim()
                )));
            }
            Povm::unlabeled(e.layout().clone(), p.ops().cloned().collect())?
        }
    };
    let counts = exclusion_counts(e, &povm, tol)?;
    let min_eliminated = counts.min_reachable.unwrap_or(0);
    Ok(EliminationReport {
        min_eliminated,
        per_outcome: counts.per_outcome.iter().map(Vec::len).collect(),
        reachable: counts.reachable,
        pass: min_eliminated as u128 >= task.m,
    })
}

/// Applies a protocol for length-`n` sequences to the first `n` slots of length-`n_prime`
/// sequences of a parent with local dimensions `dims`.
pub fn lift_protocol(p: &LoccProtocol, dims: &[usize], n: usize, n_prime: usize) -> Result<LoccProtocol> {
    if n == 0 || n > n_prime {
        return Err(Error::Range(format!("cannot lift from {n} to {n_prime} slots")));
    }
    let pad = |d: usize, m: &Matrix| m.kron(&Matrix::identity(d.pow((n_prime - n) as u32)));
    let mut out = p.clone();
    match p.kind {
        ProtocolKind::OneRoundProduct => {
            out.parties = p.parties.iter().zip(dims).map(|(ops, &d)| ops.iter().map(|m| pad(d, m)).collect()).collect();
        }
        ProtocolKind::TwoRoundSequential => {
            if dims.len() != 2 {
                return Err(Error::InvalidLayout("two-round lifting needs two parties".into()));
            }
            out.parties = vec![p.parties[0].iter().map(|m| pad(dims[0], m)).collect()];
            out.responses = p.responses.iter().map(|ops| ops.iter().map(|m| pad(dims[1], m)).collect()).collect();
        }
        ProtocolKind::RandomizedMixture => {
            out.mixture = p
                .mixture
                .iter()
                .map(|(w, c)| Ok((*w, lift_protocol(c, dims, n, n_prime)?)))
                .collect::<Result<_>>()?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::catalog;
    use crate::locc::{build_pairwise_lad_protocol, double_sic_protocol};

    #[test]
    fn scaling_values() {
        assert_eq!(lsam_scaling(4, 1, 1, 2).unwrap(), 3);
        assert_eq!(lsam_scaling(9, 1, 3, 2).unwrap(), 24);
        assert_eq!(lsam_scaling(5, 2, 7, 2).unwrap(), 7);
        assert!(lsam_scaling(3, 2, 1, 1).is_err());
        assert!(lsam_scaling(3, 1, 0, 2).is_err());
    }

    #[test]
    fn task_ranges() {
        let e = catalog("su3", &[]).unwrap();
        assert!(LsamTask::new(e.clone(), 2, 5).is_ok());
        assert!(LsamTask::new(e.clone(), 2, 6).is_err());
        assert!(LsamTask::new(e.clone(), 4, 1).is_err());
        assert!(LsamTask::new(e, 1, 0).is_err());
    }

    #[test]
    fn su3_is_not_locally_antimarkable_but_is_globally() {
        let task = LsamTask::new(catalog("su3", &[]).unwrap(), 2, 1).unwrap();
        let v = check_lsam(&task, &DecideOptions::default()).unwrap();
        assert!(v.is_no());
        assert_eq!(v.method, Method::LocalPartCriterion);
        assert!((v.margins[0] + 0.25).abs() < 1e-12);
        assert!(check_lsam_global(&task, &DecideOptions::default()).unwrap().is_yes());
    }

    #[test]
    fn nl1_and_duan_pairs_are_antimarkable() {
        for name in ["nl1", "duan4"] {
            let task = LsamTask::new(catalog(name, &[]).unwrap(), 2, 1).unwrap();
            let v = check_lsam(&task, &DecideOptions::default()).unwrap();
            assert!(v.is_yes(), "{name}");
        }
    }

    #[test]
    fn m_above_one_is_refused() {
        let task = LsamTask::new(catalog("pbr4", &[]).unwrap(), 2, 3).unwrap();
        assert!(check_lsam(&task, &DecideOptions::default()).is_err());
        assert!(check_lsam(&LsamTask::new(catalog("bell4", &[]).unwrap(), 1, 1).unwrap(), &DecideOptions::default()).is_err());
    }

    #[test]
    fn lifted_double_sic_matches_scaling() {
        let e = catalog("double_sic_antiparallel", &[]).unwrap();
        let p = double_sic_protocol();
        let base = verify_sequence_elimination(
            &LsamTask::new(e.clone(), 1, 1).unwrap(),
            &SequenceMeasurement::Local(p.clone()),
            1e-10,
        )
        .unwrap();
        assert_eq!(base.min_eliminated, 1);
        let lifted = lift_protocol(&p, e.layout().dims(), 1, 2).unwrap();
        let r = verify_sequence_elimination(&LsamTask::new(e, 2, 1).unwrap(), &SequenceMeasurement::Local(lifted), 1e-10)
            .unwrap();
        assert_eq!(r.min_eliminated as u128, lsam_scaling(4, 1, 1, 2).unwrap());
    }

    #[test]
    fn lifted_pairwise_protocol_matches_scaling() {
        let e = catalog("bennett9", &[]).unwrap().subset(&[0, 1, 2]);
        let p = build_pairwise_lad_protocol(&e).unwrap();
        let lifted = lift_protocol(&p, e.layout().dims(), 1, 2).unwrap();
        let r = verify_sequence_elimination(&LsamTask::new(e, 2, 1).unwrap(), &SequenceMeasurement::Local(lifted), 1e-10)
            .unwrap();
        assert_eq!(r.min_eliminated as u128, lsam_scaling(3, 1, 1, 2).unwrap());
    }
}
