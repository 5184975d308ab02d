//! Labeled pure-state ensembles, the built-in catalog, local parts and
//! sequence ensembles.

mod catalog;
mod io;
mod sequence;

pub use catalog::{catalog, catalog_entries, kets, CatalogEntry};
pub use io::{ensemble_to_document, parse_ensemble, EnsembleDocument, StateDocument};
pub use sequence::{sequence_ensemble, SequenceEnsemble};

use crate::error::{Error, Result};
use crate::qcore::{tensor_all, PartyLayout};
use crate::{Matrix, State};

/// Tolerance for reassembling product factors and for phase-insensitive deduplication.
pub const FACTOR_TOL: f64 = 1e-10;
pub const DEDUP_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct Ensemble {
    name: String,
    layout: PartyLayout,
    labels: Vec<String>,
    states: Vec<State>,
    factors: Option<Vec<Vec<State>>>,
}

impl Ensemble {
    pub fn new(name: impl Into<String>, labels: Vec<String>, states: Vec<State>) -> Result<Self> {
        let first = states.first().ok_or_else(|| Error::Schema("ensemble has no states".into()))?;
        let layout = first.layout().clone();
        for s in &states {
            if s.layout().dims() != layout.dims() {
                return Err(Error::LayoutMismatch(format!("{:?} vs {:?}", s.layout().dims(), layout.dims())));
            }
        }
        check_labels(&labels, states.len())?;
        let states = states.into_iter().map(|s| s.with_layout(layout.clone())).collect::<Result<_>>()?;
        Ok(Self { name: name.into(), layout, labels, states, factors: None })
    }

    /// Product ensemble from per-party factors; `factors[i][p]` is party `p`'s factor of state `i`.
    pub fn from_factors(
        name: impl Into<String>,
        layout: PartyLayout,
        labels: Vec<String>,
        factors: Vec<Vec<State>>,
    ) -> Result<Self> {
        check_labels(&labels, factors.len())?;
        let mut states = Vec::with_capacity(factors.len());
        let mut clean = Vec::with_capacity(factors.len());
        for fs in factors {
            if fs.len() != layout.party_count() {
                return Err(Error::WrongCount { expected: layout.party_count(), got: fs.len() });
            }
            let mut owned = Vec::with_capacity(fs.len());
            for (p, f) in fs.into_iter().enumerate() {
                if f.dim() != layout.dims()[p] {
                    return Err(Error::DimensionMismatch { expected: layout.dims()[p], got: f.dim() });
                }
                let local = PartyLayout::new(vec![f.dim()], vec![layout.names()[p].clone()])?;
                owned.push(f.with_layout(local)?);
            }
            let joint = tensor_all(&owned).expect("at least one party");
            states.push(joint.with_layout(layout.clone())?);
            clean.push(owned);
        }
        if states.is_empty() {
            return Err(Error::Schema("ensemble has no states".into()));
        }
        Ok(Self { name: name.into(), layout, labels, states, factors: Some(clean) })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn layout(&self) -> &PartyLayout {
        &self.layout
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, label: &str) -> Result<&State> {
        Ok(&self.states[self.index_of(label)?])
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn factors(&self) -> Option<&[Vec<State>]> {
        self.factors.as_deref()
    }

    pub fn is_product(&self) -> bool {
        self.factors.is_some()
    }

    /// Pure-state projectors in label order.
    pub fn projectors(&self) -> Vec<Matrix> {
        self.states.iter().map(|s| s.projector().into_matrix()).collect()
    }

    /// Sub-ensemble on the given indices, keeping labels and factors.
    pub fn subset(&self, indices: &[usize]) -> Self {
        Self {
            name: format!("{}{{{}}}", self.name, indices.iter().map(|&i| self.labels[i].as_str()).collect::<Vec<_>>().join(",")),
            layout: self.layout.clone(),
            labels: indices.iter().map(|&i| self.labels[i].clone()).collect(),
            states: indices.iter().map(|&i| self.states[i].clone()).collect(),
            factors: self.factors.as_ref().map(|f| indices.iter().map(|&i| f[i].clone()).collect()),
        }
    }

    /// Largest deviation between a state and the tensor product of its factors.
    pub fn factor_residual(&self) -> Option<f64> {
        let factors = self.factors.as_ref()?;
        let mut worst = 0.0f64;
        for (s, fs) in self.states.iter().zip(factors) {
            let joint = tensor_all(fs).expect("at least one party");
            worst = worst.max(s.max_abs_diff(&joint));
        }
        Some(worst)
    }
}

fn check_labels(labels: &[String], count: usize) -> Result<()> {
    if labels.len() != count {
        return Err(Error::WrongCount { expected: count, got: labels.len() });
    }
    for (i, l) in labels.iter().enumerate() {
        if labels[..i].contains(l) {
            return Err(Error::DuplicateLabel(l.clone()));
        }
    }
    Ok(())
}

fn party_factors<'a>(e: &'a Ensemble, party: &str) -> Result<(usize, &'a [Vec<State>])> {
    let p = e.layout.party_index(party)?;
    let f = e.factors().ok_or_else(|| Error::NotProduct(e.name.clone()))?;
    Ok((p, f))
}

/// A party's factor states, deduplicated up to global phase, in order of first appearance.
pub fn local_part(e: &Ensemble, party: &str) -> Result<Vec<State>> {
    Ok(local_part_labeled(e, party)?.into_iter().map(|(_, s)| s).collect())
}

/// A party's factor states with repetition, one per ensemble member.
pub fn local_part_multiset(e: &Ensemble, party: &str) -> Result<Vec<State>> {
    let (p, f) = party_factors(e, party)?;
    Ok(f.iter().map(|fs| fs[p].clone()).collect())
}

/// Deduplicated local part, each state tagged with the labels of the members carrying it.
pub fn local_part_labeled(e: &Ensemble, party: &str) -> Result<Vec<(Vec<String>, State)>> {
    let (p, f) = party_factors(e, party)?;
    let mut out: Vec<(Vec<String>, State)> = Vec::new();
    for (label, fs) in e.labels.iter().zip(f) {
        let s = &fs[p];
        match out.iter_mut().find(|(_, t)| t.equal_up_to_phase(s, DEDUP_TOL)) {
            Some((owners, _)) => owners.push(label.clone()),
            None => out.push((vec![label.clone()], s.clone())),
        }
    }
    Ok(out)
}

/// The deduplicated local part as an ensemble labeled `party[k]` with `k` counted from 1.
pub fn local_part_ensemble(e: &Ensemble, party: &str) -> Result<Ensemble> {
    let part = local_part(e, party)?;
    let labels = (1..=part.len()).map(|k| format!("{party}[{k}]")).collect();
    Ensemble::new(format!("{}|{party}", e.name), labels, part)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duan_local_part() {
        let e = catalog("duan4", &[]).unwrap();
        let a = local_part(&e, "A").unwrap();
        let expect = [kets::zero(), kets::one(), kets::plus(), kets::iplus()];
        assert_eq!(a.len(), 4);
        for (s, t) in a.iter().zip(&expect) {
            assert!(s.equal_up_to_phase(t, 1e-12));
        }
    }

    #[test]
    fn pbr_local_part_is_a_set() {
        let e = catalog("pbr4", &[]).unwrap();
        let a = local_part(&e, "A").unwrap();
        assert_eq!(a.len(), 2);
        assert!(a[0].equal_up_to_phase(&kets::zero(), 1e-12));
        assert!(a[1].equal_up_to_phase(&kets::plus(), 1e-12));
        assert_eq!(local_part_multiset(&e, "A").unwrap().len(), 4);
    }

    #[test]
    fn local_part_errors() {
        let bell = catalog("bell4", &[]).unwrap();
        assert!(matches!(local_part(&bell, "A"), Err(Error::NotProduct(_))));
        let duan = catalog("duan4", &[]).unwrap();
        assert!(matches!(local_part(&duan, "Z"), Err(Error::UnknownParty(_))));
    }

    #[test]
    fn duplicate_labels_rejected() {
        let s = kets::zero();
        let r = Ensemble::new("x", vec!["a".into(), "a".into()], vec![s.clone(), s]);
        assert!(matches!(r, Err(Error::DuplicateLabel(_))));
    }
}
