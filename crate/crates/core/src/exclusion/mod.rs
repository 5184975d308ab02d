//! Antidistinguishability of pure-state sets: exact criteria, certificate
//! verification, triple covers and a feasibility search.

mod caves;
mod cover;
mod decide;
mod qubit_lp;
mod search;
mod verify;

pub use caves::{caves_criterion, caves_from_overlaps, povm_from_caves_triple, CavesReport};
pub use cover::{compose_union, find_triple_cover, minimum_set_cover};
pub use decide::{decide_antidist, decide_states, DecideOptions};
pub use qubit_lp::{qubit_antidist_lp, qubit_lp_weights, LP_THRESHOLD};
pub use search::{search_exclusion_povm, search_povm_for_exclusions, SearchOptions};
pub(crate) use verify::probability;
pub use verify::{exclusion_counts, verify_strong, ExclusionCounts, OutcomeCheck, StrongReport};

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::formats::{matrix_to_document, MatrixDocument};
use crate::qcore::{eigh, PartyLayout};
use crate::Matrix;

/// Default tolerance for exclusion and validity checks.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct PovmElement {
    /// State label this outcome is meant to exclude, if any.
    pub label: Option<String>,
    pub op: Matrix,
}

/// Labeled measurement on a composite space.
#[derive(Clone, Debug)]
pub struct Povm {
    layout: PartyLayout,
    elements: Vec<PovmElement>,
}

impl Povm {
    pub fn new(layout: PartyLayout, elements: Vec<PovmElement>) -> Result<Self> {
        let d = layout.total_dim();
        for e in &elements {
            if !e.op.is_square() || e.op.rows() != d {
                return Err(Error::DimensionMismatch { expected: d, got: e.op.rows() });
            }
        }
        if elements.is_empty() {
            return Err(Error::InvalidPovm("no elements".into()));
        }
        Ok(Self { layout, elements })
    }

    /// Elements labeled by the state each one excludes.
    pub fn labeled(layout: PartyLayout, elements: Vec<(String, Matrix)>) -> Result<Self> {
        Self::new(layout, elements.into_iter().map(|(l, op)| PovmElement { label: Some(l), op }).collect())
    }

    pub fn unlabeled(layout: PartyLayout, ops: Vec<Matrix>) -> Result<Self> {
        Self::new(layout, ops.into_iter().map(|op| PovmElement { label: None, op }).collect())
    }

    pub fn layout(&self) -> &PartyLayout {
        &self.layout
    }

    pub fn elements(&self) -> &[PovmElement] {
        &self.elements
    }

    pub fn ops(&self) -> impl Iterator<Item = &Matrix> {
        self.elements.iter().map(|e| &e.op)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn sum(&self) -> Matrix {
        let d = self.layout.total_dim();
        self.ops().fold(Matrix::zeros(d, d), |acc, m| acc.add(m))
    }

    /// `max |(Σ E - I)_ij|`
    pub fn completeness_residual(&self) -> f64 {
        self.sum().max_abs_diff(&Matrix::identity(self.layout.total_dim()))
    }

    /// Smallest eigenvalue over all elements.
    pub fn min_eigenvalue(&self) -> f64 {
        self.ops().map(|m| eigh(m).min_value()).fold(f64::INFINITY, f64::min)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.ops().map(|m| m.hermiticity_defect()).fold(0.0, f64::max)
    }

    /// Checks Hermiticity, positivity and completeness within `tol`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let h = self.hermiticity_defect();
        if h > tol {
            return Err(Error::InvalidPovm(format!("element not Hermitian (deviation {h:e})")));
        }
        let m = self.min_eigenvalue();
        if m < -tol {
            return Err(Error::InvalidPovm(format!("element has eigenvalue {m:e}")));
        }
        let c = self.completeness_residual();
        if c > tol {
            return Err(Error::InvalidPovm(format!("elements sum to identity only within {c:e}")));
        }
        Ok(())
    }

    /// Same elements with every operator multiplied by `w`.
    pub fn scaled(&self, w: f64) -> Self {
        Self {
            layout: self.layout.clone(),
            elements: self.elements.iter().map(|e| PovmElement { label: e.label.clone(), op: e.op.scale(w) }).collect(),
        }
    }

    /// Concatenation of the elements of several POVMs on the same layout.
    pub fn concat(parts: &[Povm]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::InvalidPovm("no parts".into()))?;
        let mut elements = Vec::new();
        for p in parts {
            if p.layout.dims() != first.layout.dims() {
                return Err(Error::LayoutMismatch(format!("{:?} vs {:?}", p.layout.dims(), first.layout.dims())));
            }
            elements.extend(p.elements.iter().cloned());
        }
        Self::new(first.layout.clone(), elements)
    }
}

#[derive(Serialize)]
struct ElementDocument<'a> {
    label: &'a Option<String>,
    matrix: MatrixDocument,
}

impl Serialize for Povm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let docs: Vec<ElementDocument> = self
            .elements
            .iter()
            .map(|e| ElementDocument { label: &e.label, matrix: matrix_to_document(&e.op) })
            .collect();
        docs.serialize(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Decision {
    Yes,
    No,
    Unknown,
}

impl std::fmt::Display for Decision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Decision::Yes => "YES",
            Decision::No => "NO",
            Decision::Unknown => "UNKNOWN",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Caves,
    QubitLp,
    TripleCover,
    Certificate,
    Search,
    NecessaryViolation,
    LocalPartCriterion,
    PairwiseWalgate,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Caves => "caves",
            Method::QubitLp => "qubit_lp",
            Method::TripleCover => "triple_cover",
            Method::Certificate => "certificate",
            Method::Search => "search",
            Method::NecessaryViolation => "necessary_violation",
            Method::LocalPartCriterion => "local_part_criterion",
            Method::PairwiseWalgate => "pairwise_walgate",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Evidence attached to a verdict.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// An exclusion measurement that passes strong verification.
    Povm { povm: Povm },
    /// Weights with `Σ α_i |ψ_i><ψ_i| = I` and the measurement `α_j (I - |ψ_j><ψ_j|)`.
    Weights { alpha: Vec<f64>, povm: Povm },
    /// Antidistinguishable triples whose union is the whole set, and their mixture.
    TripleCover { triples: Vec<Vec<String>>, povm: Povm },
    /// A necessary condition that fails, with the values entering it.
    Violation { criterion: String, values: Vec<f64> },
    /// Verdicts on each party's local part.
    LocalParts { parties: Vec<(String, Verdict)> },
}

impl Certificate {
    pub fn povm(&self) -> Option<&Povm> {
        match self {
            Certificate::Povm { povm } | Certificate::Weights { povm, .. } | Certificate::TripleCover { povm, .. } => {
                Some(povm)
            }
            _ => None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub decision: Decision,
    pub method: Method,
    pub certificate: Option<Certificate>,
    pub margins: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Verdict {
    pub fn new(decision: Decision, method: Method) -> Self {
        Self { decision, method, certificate: None, margins: Vec::new(), note: None }
    }

    pub fn with_certificate(mut self, c: Certificate) -> Self {
        self.certificate = Some(c);
        self
    }

    pub fn with_margins(mut self, m: Vec<f64>) -> Self {
        self.margins = m;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn is_yes(&self) -> bool {
        self.decision == Decision::Yes
    }

    pub fn is_no(&self) -> bool {
        self.decision == Decision::No
    }

    pub fn povm(&self) -> Option<&Povm> {
        self.certificate.as_ref().and_then(Certificate::povm)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::kets;

    #[test]
    fn validate_catches_each_defect() {
        let l = PartyLayout::single(2).unwrap();
        let p0 = kets::zero().projector().into_matrix();
        let p1 = kets::one().projector().into_matrix();
        assert!(Povm::unlabeled(l.clone(), vec![p0.clone(), p1.clone()]).unwrap().validate(1e-12).is_ok());
        assert!(Povm::unlabeled(l.clone(), vec![p0.clone()]).unwrap().validate(1e-12).is_err());
        let neg = Matrix::from_diagonal(&[1.1, 1.0]);
        let rest = Matrix::from_diagonal(&[-0.1, 0.0]);
        assert!(Povm::unlabeled(l.clone(), vec![neg, rest]).unwrap().validate(1e-12).is_err());
        assert!(Povm::unlabeled(l, vec![Matrix::identity(3)]).is_err());
    }

    #[test]
    fn serializes_labels_and_matrices() {
        let l = PartyLayout::single(2).unwrap();
        let p = Povm::labeled(l, vec![("x".into(), Matrix::identity(2))]).unwrap();
        let v = serde_json::to_value(&p).unwrap();
        assert_eq!(v[0]["label"], "x");
        assert_eq!(v[0]["matrix"][1][1][0], 1.0);
    }
}
