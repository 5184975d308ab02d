use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::Ensemble;
use crate::error::{Error, Result};
use crate::qcore::{norm, PartyLayout};
use crate::{State, C64};

/// Largest unit-norm deviation accepted (and silently corrected) on input.
pub const NORM_SLACK: f64 = 1e-6;

/// On-disk ensemble. Amplitudes are `[re, im]` pairs over the row-major composite basis.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EnsembleDocument {
    pub name: String,
    pub dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parties: Option<Vec<String>>,
    /// Renormalize every vector instead of rejecting ones far from unit norm.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub normalize: bool,
    pub states: Vec<StateDocument>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateDocument {
    Factors { label: String, factors: Vec<Vec<[f64; 2]>> },
    Amplitudes { label: String, amplitudes: Vec<[f64; 2]> },
}

impl StateDocument {
    pub fn label(&self) -> &str {
        match self {
            StateDocument::Factors { label, .. } | StateDocument::Amplitudes { label, .. } => label,
        }
    }
}

fn to_complex(v: &[[f64; 2]]) -> Vec<C64> {
    v.iter().map(|&[re, im]| Complex::new(re, im)).collect()
}

fn from_complex(v: &[C64]) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

fn checked_state(label: &str, amps: Vec<C64>, layout: PartyLayout, lenient: bool) -> Result<State> {
    if amps.len() != layout.total_dim() {
        return Err(Error::DimensionMismatch { expected: layout.total_dim(), got: amps.len() });
    }
    if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Schema(format!("state `{label}` has a non-finite amplitude")));
    }
    let n = norm(&amps);
    if !lenient && (n - 1.0).abs() > NORM_SLACK {
        return Err(Error::NotNormalized(n));
    }
    State::new(amps, layout)
}

/// Reads an ensemble from its JSON document.
pub fn parse_ensemble(document: &str) -> Result<Ensemble> {
    let doc: EnsembleDocument = serde_json::from_str(document)?;
    ensemble_from_document(&doc)
}

pub fn ensemble_from_document(doc: &EnsembleDocument) -> Result<Ensemble> {
    let layout = match &doc.parties {
        Some(names) => PartyLayout::new(doc.dims.clone(), names.clone())?,
        None => PartyLayout::with_default_names(doc.dims.clone())?,
    };
    if doc.states.is_empty() {
        return Err(Error::Schema("`states` is empty".into()));
    }
    let labels: Vec<String> = doc.states.iter().map(|s| s.label().to_string()).collect();
    let all_factored = doc.states.iter().all(|s| matches!(s, StateDocument::Factors { .. }));

    let factored = |label: &str, factors: &[Vec<[f64; 2]>]| -> Result<Vec<State>> {
        if factors.len() != layout.party_count() {
            return Err(Error::Schema(format!(
                "state `{label}` has {} factors for {} parties",
                factors.len(),
                layout.party_count()
            )));
        }
        factors
            .iter()
            .enumerate()
            .map(|(p, f)| {
                let local = PartyLayout::new(vec![layout.dims()[p]], vec![layout.names()[p].clone()])?;
                checked_state(label, to_complex(f), local, doc.normalize)
            })
            .collect()
    };

    if all_factored {
        let factors = doc
            .states
            .iter()
            .map(|s| match s {
                StateDocument::Factors { label, factors } => factored(label, factors),
                StateDocument::Amplitudes { .. } => unreachable!(),
            })
            .collect::<Result<Vec<_>>>()?;
        Ensemble::from_factors(doc.name.clone(), layout, labels, factors)
    } else {
        let states = doc
            .states
            .iter()
            .map(|s| match s {
                StateDocument::Amplitudes { label, amplitudes } => {
                    checked_state(label, to_complex(amplitudes), layout.clone(), doc.normalize)
                }
                StateDocument::Factors { label, factors } => {
                    let parts = factored(label, factors)?;
                    let joint = crate::qcore::tensor_all(&parts).expect("non-empty layout");
                    joint.with_layout(layout.clone())
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ensemble::new(doc.name.clone(), labels, states)
    }
}

/// Document for an ensemble; product ensembles are written by factors.
pub fn ensemble_to_document(e: &Ensemble) -> EnsembleDocument {
    let states = match e.factors() {
        Some(f) => e
            .labels()
            .iter()
            .zip(f)
            .map(|(l, fs)| StateDocument::Factors {
                label: l.clone(),
                factors: fs.iter().map(|s| from_complex(s.amplitudes())).collect(),
            })
            .collect(),
        None => e
            .labels()
            .iter()
            .zip(e.states())
            .map(|(l, s)| StateDocument::Amplitudes { label: l.clone(), amplitudes: from_complex(s.amplitudes()) })
            .collect(),
    };
    EnsembleDocument {
        name: e.name().to_string(),
        dims: e.layout().dims().to_vec(),
        parties: Some(e.layout().names().to_vec()),
        normalize: false,
        states,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::catalog;

    #[test]
    fn round_trips_catalog_ensembles() {
        for name in ["bell4", "duan4", "bennett9", "sic4"] {
            let e = catalog(name, &[]).unwrap();
            let text = serde_json::to_string(&ensemble_to_document(&e)).unwrap();
            let back = parse_ensemble(&text).unwrap();
            assert_eq!(back.labels(), e.labels());
            assert_eq!(back.is_product(), e.is_product());
            for (a, b) in back.states().iter().zip(e.states()) {
                assert!(a.max_abs_diff(b) < 1e-10);
            }
        }
    }

    #[test]
    fn renormalizes_on_request_and_rejects_otherwise() {
        let raw = r#"{"name":"x","dims":[2],"states":[{"label":"a","amplitudes":[[1,0],[1,0]]}]}"#;
        assert!(matches!(parse_ensemble(raw), Err(Error::NotNormalized(_))));
        let lenient = raw.replacen("\"dims\"", "\"normalize\":true,\"dims\"", 1);
        let e = parse_ensemble(&lenient).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((e.states()[0].amplitudes()[0].re - h).abs() < 1e-15);
        let near = r#"{"name":"x","dims":[2],"states":[{"label":"a","amplitudes":[[1.0000001,0],[0,0]]}]}"#;
        assert_eq!(parse_ensemble(near).unwrap().states()[0].amplitudes()[0].re, 1.0);
    }

    #[test]
    fn dimension_and_label_errors() {
        let bad = r#"{"name":"x","dims":[2,2],"states":[{"label":"a","amplitudes":[[1,0],[0,0],[0,0]]}]}"#;
        assert!(matches!(parse_ensemble(bad), Err(Error::DimensionMismatch { .. })));
        let dup = r#"{"name":"x","dims":[2],"states":[{"label":"a","amplitudes":[[1,0],[0,0]]},{"label":"a","amplitudes":[[0,0],[1,0]]}]}"#;
        assert!(matches!(parse_ensemble(dup), Err(Error::DuplicateLabel(_))));
        assert!(matches!(parse_ensemble("{"), Err(Error::Json(_))));
    }
}
