use crate::ensembles::kets::{minus, one, plus, zero};
use crate::error::Result;
use crate::exclusion::Povm;
use crate::locc::LoccProtocol;
use crate::qcore::{tensor, PartyLayout};
use crate::{Matrix, State};

/// `ξ_1 .. ξ_4` on two qubits.
pub fn xi_basis() -> Vec<State> {
    let sum = |a: State, b: State| -> State {
        let amps = a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| x + y).collect();
        State::from_amplitudes(amps).expect("nonzero")
    };
    vec![
        sum(tensor(&zero(), &one()), tensor(&one(), &zero())),
        sum(tensor(&zero(), &minus()), tensor(&one(), &plus())),
        sum(tensor(&plus(), &one()), tensor(&minus(), &zero())),
        sum(tensor(&plus(), &minus()), tensor(&minus(), &plus())),
    ]
}

/// Projective measurement onto the ξ basis.
pub fn pbr_sequence_measurement() -> Povm {
    let layout = PartyLayout::with_default_names(vec![2, 2]).expect("qubits");
    let ops: Vec<Matrix> = xi_basis().iter().map(|s| s.projector().into_matrix()).collect();
    Povm::labeled(layout, ["xi1", "xi2", "xi3", "xi4"].iter().map(|l| l.to_string()).zip(ops).collect())
        .expect("4 x 4 projectors")
}

/// Both parties measure the ξ basis on their two slots.
pub fn pbr_sequence_protocol() -> Result<LoccProtocol> {
    let ops: Vec<Matrix> = pbr_sequence_measurement().ops().cloned().collect();
    Ok(LoccProtocol::one_round(vec![ops.clone(), ops], Default::default()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::antimark::{verify_sequence_elimination, LsamTask, SequenceMeasurement};
    use crate::ensembles::catalog;
    use crate::qcore::inner;

    #[test]
    fn xi_basis_is_orthonormal() {
        let b = xi_basis();
        for i in 0..4 {
            for j in 0..4 {
                let g = inner(b[i].amplitudes(), b[j].amplitudes());
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((g.re - want).abs() < 1e-12 && g.im.abs() < 1e-12);
            }
        }
        let m = pbr_sequence_measurement();
        assert!(m.completeness_residual() < 1e-12);
        let p = m.elements()[0].op.clone();
        let zz = tensor(&zero(), &zero());
        assert!(inner(zz.amplitudes(), &p.apply(zz.amplitudes())).norm() < 1e-15);
    }

    #[test]
    fn every_joint_outcome_eliminates_at_least_three() {
        let task = LsamTask::new(catalog("pbr4", &[]).unwrap(), 2, 3).unwrap();
        let e = task.sequences().unwrap();
        let p = pbr_sequence_protocol().unwrap().with_derived_map(e.ensemble(), 1e-10).unwrap();
        let r = verify_sequence_elimination(&task, &SequenceMeasurement::Local(p), 1e-10).unwrap();
        // outcomes pairing xi1/xi4 on both sides remove two disjoint pairs of sequences
        assert_eq!(r.min_eliminated, 4, "{r:?}");
        assert!(r.pass);
        assert_eq!(r.per_outcome.len(), 16);
    }
}
