//! One- and two-round LOCC exclusion protocols: flattening, verification, the
//! Walgate local basis and the pairwise shared-randomness protocol.

mod conclusive;
mod io;
mod local;
mod pairwise;
mod protocols;
mod walgate;


pub use conclusive::{verify_conclusive_identification, ConclusiveOutcome, ConclusiveReport};
pub use io::{parse_protocol, protocol_from_document, protocol_to_document, PartyDocument, ProtocolDocument};
pub use local::decide_local_antidist;
pub use pairwise::{build_pairwise_lad_protocol, walgate_pair_protocol};
pub use protocols::{bell_computational_protocol, bennett_protocol, double_sic_protocol};
pub use walgate::{coefficient_matrix, walgate_basis, zero_diagonal_unitary, WalgateDecomposition};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::ensembles::Ensemble;
use crate::error::{Error, Result};
use crate::exclusion::{exclusion_counts, probability, Povm, PovmElement};
use crate::qcore::{eigh, PartyLayout};
use crate::Matrix;

/// Validity tolerance for local measurements and mixture weights.
pub const LOCAL_POVM_TOL: f64 = 1e-9;
const WEIGHT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProtocolKind {
    OneRoundProduct,
    TwoRoundSequential,
    RandomizedMixture,
}

/// Local protocol with a classical outcome map.
///
/// One-round: one POVM per party, outcome key `"a,b,..."`. Two-round: the first
/// party measures `parties[0]`, then the remaining parties jointly apply
/// `responses[a]`, outcome key `"a,b"`. Mixtures pick a component at random;
/// flattened keys are prefixed with `"k:"`.
#[derive(Clone, Debug)]
pub struct LoccProtocol {
    pub kind: ProtocolKind,
    pub parties: Vec<Vec<Matrix>>,
    pub responses: Vec<Vec<Matrix>>,
    pub exclusion_map: BTreeMap<String, Vec<String>>,
    pub mixture: Vec<(f64, LoccProtocol)>,
}

/// One outcome of the effective global measurement.
#[derive(Clone, Debug)]
pub struct FlatOutcome {
    pub key: String,
    /// Mixture weight already applied.
    pub op: Matrix,
    pub weight: f64,
    pub claim: Option<Vec<String>>,
}

pub fn outcome_key(outcome: &[usize]) -> String {
    outcome.iter().map(|o| o.to_string()).collect::<Vec<_>>().join(",")
}

impl LoccProtocol {
    pub fn one_round(parties: Vec<Vec<Matrix>>, exclusion_map: BTreeMap<String, Vec<String>>) -> Self {
        Self { kind: ProtocolKind::OneRoundProduct, parties, responses: Vec::new(), exclusion_map, mixture: Vec::new() }
    }

    pub fn two_round(
        first: Vec<Matrix>,
        responses: Vec<Vec<Matrix>>,
        exclusion_map: BTreeMap<String, Vec<String>>,
    ) -> Self {
        Self {
            kind: ProtocolKind::TwoRoundSequential,
            parties: vec![first],
            responses,
            exclusion_map,
            mixture: Vec::new(),
        }
    }

    pub fn mixture(components: Vec<(f64, LoccProtocol)>) -> Self {
        Self {
            kind: ProtocolKind::RandomizedMixture,
            parties: Vec::new(),
            responses: Vec::new(),
            exclusion_map: BTreeMap::new(),
            mixture: components,
        }
    }

    /// Uniform mixture; a single component is returned as is.
    pub fn uniform_mixture(mut components: Vec<LoccProtocol>) -> Self {
        if components.len() == 1 {
            return components.pop().expect("one component");
        }
        let w = 1.0 / components.len() as f64;
        Self::mixture(components.into_iter().map(|c| (w, c)).collect())
    }

    /// Checks measurement shapes, local validity and mixture weights against `layout`.
    pub fn validate(&self, layout: &PartyLayout) -> Result<()> {
        let dims = layout.dims();
        match self.kind {
            ProtocolKind::OneRoundProduct => {
                if self.parties.len() != dims.len() {
                    return Err(Error::LayoutMismatch(format!(
                        "{} party measurements for {} parties",
                        self.parties.len(),
                        dims.len()
                    )));
                }
                for (ops, &d) in self.parties.iter().zip(dims) {
                    check_local(ops, d)?;
                }
            }
            ProtocolKind::TwoRoundSequential => {
                if self.parties.len() != 1 || dims.len() < 2 {
                    return Err(Error::LayoutMismatch("two rounds need one first-party measurement and a responder".into()));
                }
                check_local(&self.parties[0], dims[0])?;
                if self.responses.len() != self.parties[0].len() {
                    return Err(Error::WrongCount { expected: self.parties[0].len(), got: self.responses.len() });
                }
                for r in &self.responses {
                    check_local(r, layout.responder_dim())?;
                }
            }
            ProtocolKind::RandomizedMixture => {
                if self.mixture.is_empty() {
                    return Err(Error::InvalidPovm("empty mixture".into()));
                }
                let total: f64 = self.mixture.iter().map(|(w, _)| w).sum();
                if self.mixture.iter().any(|(w, _)| w.is_nan() || *w <= 0.0) || (total - 1.0).abs() > WEIGHT_TOL {
                    return Err(Error::InvalidPovm(format!("mixture weights sum to {total}")));
                }
                for (_, p) in &self.mixture {
                    p.validate(layout)?;
                }
            }
        }
        Ok(())
    }

    /// Effective global outcomes with their claimed exclusions.
    pub fn flatten(&self, layout: &PartyLayout) -> Result<Vec<FlatOutcome>> {
        self.validate(layout)?;
        let mut out = Vec::new();
        self.flatten_into(1.0, "", &mut out);
        Ok(out)
    }

    fn flatten_into(&self, weight: f64, prefix: &str, out: &mut Vec<FlatOutcome>) {
        let claim = |key: &str| self.exclusion_map.get(key).cloned();
        match self.kind {
            ProtocolKind::OneRoundProduct => {
                let sizes: Vec<usize> = self.parties.iter().map(Vec::len).collect();
                for outcome in product_indices(&sizes) {
                    let op = outcome
                        .iter()
                        .enumerate()
                        .map(|(p, &o)| self.parties[p][o].clone())
                        .reduce(|a, b| a.kron(&b))
                        .expect("at least one party");
                    let key = outcome_key(&outcome);
                    out.push(FlatOutcome { key: format!("{prefix}{key}"), op: op.scale(weight), weight, claim: claim(&key) });
                }
            }
            ProtocolKind::TwoRoundSequential => {
                for (a, first) in self.parties[0].iter().enumerate() {
                    for (b, second) in self.responses[a].iter().enumerate() {
                        let key = outcome_key(&[a, b]);
                        out.push(FlatOutcome {
                            key: format!("{prefix}{key}"),
                            op: first.kron(second).scale(weight),
                            weight,
                            claim: claim(&key),
                        });
                    }
                }
            }
            ProtocolKind::RandomizedMixture => {
                for (k, (w, p)) in self.mixture.iter().enumerate() {
                    p.flatten_into(weight * w, &format!("{prefix}{k}:"), out);
                }
            }
        }
    }

    /// Effective global POVM, elements unlabeled.
    pub fn effective_povm(&self, layout: &PartyLayout) -> Result<Povm> {
        let ops = self.flatten(layout)?.into_iter().map(|o| o.op).collect();
        Povm::unlabeled(layout.clone(), ops)
    }

    /// Replaces the outcome map, at every level, by the labels each reachable outcome
    /// actually excludes on `e`.
    pub fn with_derived_map(mut self, e: &Ensemble, tol: f64) -> Result<Self> {
        if self.kind == ProtocolKind::RandomizedMixture {
            self.mixture = self
                .mixture
                .into_iter()
                .map(|(w, p)| Ok((w, p.with_derived_map(e, tol)?)))
                .collect::<Result<_>>()?;
            return Ok(self);
        }
        let flat = self.flatten(e.layout())?;
        let povm = Povm::unlabeled(e.layout().clone(), flat.iter().map(|o| o.op.clone()).collect())?;
        let counts = exclusion_counts(e, &povm, tol)?;
        self.exclusion_map = flat
            .iter()
            .zip(counts.per_outcome)
            .zip(counts.reachable)
            .filter(|(_, r)| *r)
            .map(|((o, ex), _)| (o.key.clone(), ex))
            .collect();
        Ok(self)
    }
}

pub(crate) fn check_local(ops: &[Matrix], d: usize) -> Result<()> {
    if ops.is_empty() {
        return Err(Error::InvalidPovm("no outcomes".into()));
    }
    for op in ops {
        if op.rows() != d || op.cols() != d {
            return Err(Error::DimensionMismatch { expected: d, got: op.rows() });
        }
    }
    let layout = PartyLayout::single(d)?;
    Povm::unlabeled(layout, ops.to_vec())?.validate(LOCAL_POVM_TOL)
}

/// All tuples with `t[i] < sizes[i]`, last index fastest.
pub(crate) fn product_indices(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &s in sizes {
        out = out.into_iter().flat_map(|t| (0..s).map(move |k| [t.clone(), vec![k]].concat())).collect();
    }
    out
}

/// Per-outcome result of local protocol verification.
#[derive(Clone, Debug, Serialize)]
pub struct ProtocolOutcome {
    pub key: String,
    pub claimed: Option<Vec<String>>,
    /// Probability under the uniform mixture of the ensemble.
    pub probability: f64,
    pub reachable: bool,
    /// Largest `Tr(rho_x E_t)` over claimed labels, before the mixture weight.
    pub max_residual: f64,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProtocolReport {
    pub outcomes: Vec<ProtocolOutcome>,
    pub completeness_residual: f64,
    pub min_eigenvalue: f64,
    pub max_exclusion_residual: f64,
    /// Labels no reachable outcome excludes.
    pub unexcluded: Vec<String>,
    /// Mapped outcomes with a nonzero element that never fire.
    pub unreachable_mapped: Vec<String>,
    /// Every claim holds and the effective measurement is a POVM.
    pub valid: bool,
    /// `valid`, every label excluded and every mapped outcome reachable.
    pub pass: bool,
}

/// Flattens `p` and checks every claimed exclusion on `e`.
pub fn verify_local_protocol(e: &Ensemble, p: &LoccProtocol, tol: f64) -> Result<ProtocolReport> {
    let flat = p.flatten(e.layout())?;
    let d = e.layout().total_dim();
    let mut sum = Matrix::zeros(d, d);
    for o in &flat {
        sum = sum.add(&o.op);
    }
    let completeness_residual = sum.max_abs_diff(&Matrix::identity(d));
    let min_eigenvalue = flat.iter().map(|o| eigh(&o.op).min_value()).fold(f64::INFINITY, f64::min);
    let k = e.len() as f64;
    let mut outcomes = Vec::with_capacity(flat.len());
    let mut excluded = vec![false; e.len()];
    let mut unreachable_mapped = Vec::new();
    for o in &flat {
        let probs: Vec<f64> = e.states().iter().map(|s| probability(s, &o.op)).collect();
        let probability = probs.iter().sum::<f64>() / k;
        let reachable = probability > tol;
        if reachable && o.claim.is_none() {
            return Err(Error::UnmappedOutcome(o.key.clone()));
        }
        let mut max_residual = 0.0f64;
        if let Some(claim) = &o.claim {
            for label in claim {
                let i = e.index_of(label)?;
                let r = probs[i] / o.weight;
                max_residual = max_residual.max(r);
                if r <= tol && reachable {
                    excluded[i] = true;
                }
            }
            if !reachable && o.op.max_abs() > tol && !claim.is_empty() {
                unreachable_mapped.push(o.key.clone());
            }
        }
        outcomes.push(ProtocolOutcome {
            key: o.key.clone(),
            claimed: o.claim.clone(),
            probability,
            reachable,
            max_residual,
            ok: max_residual <= tol,
        });
    }
    let max_exclusion_residual = outcomes.iter().map(|o| o.max_residual).fold(0.0, f64::max);
    let unexcluded: Vec<String> =
        e.labels().iter().zip(&excluded).filter(|(_, &x)| !x).map(|(l, _)| l.clone()).collect();
    let valid = outcomes.iter().all(|o| o.ok) && completeness_residual <= tol.max(1e-10) && min_eigenvalue >= -tol;
    let pass = valid && unexcluded.is_empty() && unreachable_mapped.is_empty();
    Ok(ProtocolReport {
        outcomes,
        completeness_residual,
        min_eigenvalue,
        max_exclusion_residual,
        unexcluded,
        unreachable_mapped,
        valid,
        pass,
    })
}

/// Labeled POVM built from a protocol's effective measurement; element labels are the
/// flattened outcome keys' first claimed label, when there is one.
pub fn protocol_povm(e: &Ensemble, p: &LoccProtocol) -> Result<Povm> {
    let flat = p.flatten(e.layout())?;
    let elements = flat
        .into_iter()
        .map(|o| PovmElement { label: o.claim.and_then(|c| c.into_iter().next()), op: o.op })
        .collect();
    Povm::new(e.layout().clone(), elements)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::catalog;

    #[test]
    fn product_indices_order() {
        assert_eq!(product_indices(&[2, 3]).len(), 6);
        assert_eq!(product_indices(&[2, 3])[1], vec![0, 1]);
    }

    #[test]
    fn bad_weights_are_rejected() {
        let e = catalog("bell4", &[]).unwrap();
        let p = bell_computational_protocol();
        let m = LoccProtocol::mixture(vec![(0.5, p.clone()), (0.4, p)]);
        assert!(m.validate(e.layout()).is_err());
    }

    #[test]
    fn unmapped_reachable_outcome_is_an_error() {
        let e = catalog("bell4", &[]).unwrap();
        let mut p = bell_computational_protocol();
        p.exclusion_map.remove("0,1");
        assert!(matches!(verify_local_protocol(&e, &p, 1e-10), Err(Error::UnmappedOutcome(k)) if k == "0,1"));
    }

    #[test]
    fn wrong_claim_is_invalid() {
        let e = catalog("bell4", &[]).unwrap();
        let mut p = bell_computational_protocol();
        p.exclusion_map.insert("0,0".into(), vec!["Phi+".into()]);
        let r = verify_local_protocol(&e, &p, 1e-10).unwrap();
        assert!(!r.valid && !r.pass);
        assert!((r.outcomes[0].max_residual - 0.5).abs() < 1e-12);
    }

    #[test]
    fn mixture_validity_ignores_weights() {
        let e = catalog("bell4", &[]).unwrap();
        let p = bell_computational_protocol();
        for w in [0.5, 0.999] {
            let m = LoccProtocol::mixture(vec![(w, p.clone()), (1.0 - w, p.clone())]);
            let r = verify_local_protocol(&e, &m, 1e-10).unwrap();
            assert!(r.pass);
            assert!(r.completeness_residual < 1e-12);
        }
    }

    #[test]
    fn derived_map_matches_exclusions() {
        let e = catalog("bell4", &[]).unwrap();
        let p = bell_computational_protocol().with_derived_map(&e, 1e-10).unwrap();
        assert!(p.exclusion_map.values().all(|v| v.len() == 2));
        assert!(verify_local_protocol(&e, &p, 1e-10).unwrap().pass);
    }
}
