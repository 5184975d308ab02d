use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{LoccProtocol, ProtocolKind};
use crate::error::{Error, Result};
use crate::formats::{matrix_from_document, matrix_to_document, MatrixDocument};
use crate::Matrix;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PartyDocument {
    pub povm: Vec<MatrixDocument>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MixtureDocument {
    pub weight: f64,
    pub protocol: ProtocolDocument,
}

/// On-disk protocol.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProtocolDocument {
    pub kind: ProtocolKind,
    #[serde(default)]
    pub parties: Vec<PartyDocument>,
    /// Responder measurement per first-party outcome (two-round only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub responses: Option<Vec<PartyDocument>>,
    #[serde(default)]
    pub exclusion_map: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mixture: Option<Vec<MixtureDocument>>,
}

fn povm_doc(ops: &[Matrix]) -> PartyDocument {
    PartyDocument { povm: ops.iter().map(matrix_to_document).collect() }
}

fn povm_from(doc: &PartyDocument) -> Result<Vec<Matrix>> {
    doc.povm.iter().map(matrix_from_document).collect()
}

pub fn protocol_to_document(p: &LoccProtocol) -> ProtocolDocument {
    ProtocolDocument {
        kind: p.kind,
        parties: p.parties.iter().map(|ops| povm_doc(ops)).collect(),
        responses: (p.kind == ProtocolKind::TwoRoundSequential)
            .then(|| p.responses.iter().map(|ops| povm_doc(ops)).collect()),
        exclusion_map: p.exclusion_map.clone(),
        mixture: (p.kind == ProtocolKind::RandomizedMixture).then(|| {
            p.mixture.iter().map(|(w, c)| MixtureDocument { weight: *w, protocol: protocol_to_document(c) }).collect()
        }),
    }
}

pub fn protocol_from_document(doc: &ProtocolDocument) -> Result<LoccProtocol> {
    let parties = doc.parties.iter().map(povm_from).collect::<Result<Vec<_>>>()?;
    let responses = match &doc.responses {
        Some(r) => r.iter().map(povm_from).collect::<Result<Vec<_>>>()?,
        None => Vec::new(),
    };
    let mixture = match &doc.mixture {
        Some(m) => m.iter().map(|c| Ok((c.weight, protocol_from_document(&c.protocol)?))).collect::<Result<Vec<_>>>()?,
        None => Vec::new(),
    };
    match doc.kind {
        ProtocolKind::RandomizedMixture if mixture.is_empty() => {
            return Err(Error::Schema("randomized_mixture without `mixture`".into()))
        }
        ProtocolKind::TwoRoundSequential if responses.is_empty() => {
            return Err(Error::Schema("two_round_sequential without `responses`".into()))
        }
        _ => {}
    }
    for key in doc.exclusion_map.keys() {
        if key.split(',').any(|part| part.trim().parse::<usize>().is_err()) {
            return Err(Error::Schema(format!("bad outcome key `{key}`")));
        }
    }
    Ok(LoccProtocol { kind: doc.kind, parties, responses, exclusion_map: doc.exclusion_map.clone(), mixture })
}

/// Reads a protocol from its JSON document.
pub fn parse_protocol(document: &str) -> Result<LoccProtocol> {
    let doc: ProtocolDocument = serde_json::from_str(document)?;
    protocol_from_document(&doc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::catalog;
    use crate::locc::{bell_computational_protocol, build_pairwise_lad_protocol, verify_local_protocol};

    #[test]
    fn pairwise_protocol_round_trips() {
        let e = catalog("bennett9", &[]).unwrap();
        let p = build_pairwise_lad_protocol(&e).unwrap();
        let text = serde_json::to_string(&protocol_to_document(&p)).unwrap();
        let q = parse_protocol(&text).unwrap();
        assert!(verify_local_protocol(&e, &q, 1e-9).unwrap().pass);
        assert_eq!(q.mixture.len(), 5);
    }

    #[test]
    fn reads_hand_written_document() {
        let text = r#"{
            "kind": "one_round_product",
            "parties": [
                {"povm": [[[[1,0],[0,0]],[[0,0],[0,0]]], [[[0,0],[0,0]],[[0,0],[1,0]]]]},
                {"povm": [[[[1,0],[0,0]],[[0,0],[0,0]]], [[[0,0],[0,0]],[[0,0],[1,0]]]]}
            ],
            "exclusion_map": {"0,0": ["Psi+"], "0,1": ["Phi+"], "1,0": ["Phi-"], "1,1": ["Psi-"]}
        }"#;
        let p = parse_protocol(text).unwrap();
        let e = catalog("bell4", &[]).unwrap();
        assert!(verify_local_protocol(&e, &p, 1e-10).unwrap().pass);
        let doc = protocol_to_document(&bell_computational_protocol());
        assert!(doc.responses.is_none() && doc.mixture.is_none());
    }

    #[test]
    fn rejects_bad_keys_and_missing_parts() {
        let bad = r#"{"kind": "one_round_product", "parties": [], "exclusion_map": {"a": []}}"#;
        assert!(matches!(parse_protocol(bad), Err(Error::Schema(_))));
        let mix = r#"{"kind": "randomized_mixture"}"#;
        assert!(matches!(parse_protocol(mix), Err(Error::Schema(_))));
    }
}
