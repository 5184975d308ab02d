use std::collections::BTreeMap;

use super::{outcome_key, walgate_basis, LoccProtocol};
use crate::ensembles::Ensemble;
use crate::error::{Error, Result};
use crate::qcore::{inner, norm};
use crate::{Matrix, C64};

const ORTHO_TOL: f64 = 1e-10;
const ZERO_TOL: f64 = 1e-10;

/// Two-round protocol excluding one of the orthogonal states `i`, `j` of `e`.
///
/// Alice measures in the Walgate basis and announces the index; the responder then
/// separates the two conditional vectors. Alice indices where both conditional vectors
/// vanish are merged into a neighbouring outcome.
pub fn walgate_pair_protocol(e: &Ensemble, i: usize, j: usize) -> Result<LoccProtocol> {
    let (psi, phi) = (&e.states()[i], &e.states()[j]);
    let (li, lj) = (e.labels()[i].clone(), e.labels()[j].clone());
    let w = walgate_basis(psi, phi).map_err(|err| match err {
        Error::NonOrthogonal(_, _, x) => Error::NonOrthogonal(li.clone(), lj.clone(), x),
        other => other,
    })?;
    let basis = w.alice_basis();
    let dr = e.layout().responder_dim();
    let live: Vec<bool> = (0..basis.len()).map(|k| norm(&w.eta[k]) > ZERO_TOL || norm(&w.eta_perp[k]) > ZERO_TOL).collect();
    let anchor = live.iter().position(|&l| l).ok_or_else(|| Error::ConvergenceFailure("both states vanish on every Alice outcome".into()))?;

    let mut first = Vec::new();
    let mut responses = Vec::new();
    let mut exclusion_map = BTreeMap::new();
    for k in (0..basis.len()).filter(|&k| live[k]) {
        let mut a = Matrix::outer(&basis[k], &basis[k]);
        if k == anchor {
            for z in (0..basis.len()).filter(|&z| !live[z]) {
                a = a.add(&Matrix::outer(&basis[z], &basis[z]));
            }
        }
        let a_out = first.len();
        first.push(a);
        let (np, nf) = (norm(&w.eta[k]) > ZERO_TOL, norm(&w.eta_perp[k]) > ZERO_TOL);
        if np && nf {
            let eta: Vec<C64> = w.eta[k].iter().map(|z| z / norm(&w.eta[k])).collect();
            let p = Matrix::outer(&eta, &eta);
            responses.push(vec![p.clone(), Matrix::identity(dr).sub(&p)]);
            exclusion_map.insert(outcome_key(&[a_out, 0]), vec![lj.clone()]);
            exclusion_map.insert(outcome_key(&[a_out, 1]), vec![li.clone()]);
        } else {
            responses.push(vec![Matrix::identity(dr)]);
            let excluded = if np { lj.clone() } else { li.clone() };
            exclusion_map.insert(outcome_key(&[a_out, 0]), vec![excluded]);
        }
    }
    Ok(LoccProtocol::two_round(first, responses, exclusion_map))
}

/// Shared-randomness mixture of Walgate pair protocols for mutually orthogonal states.
///
/// Pairs are `(1,2), (3,4), ...`; an odd count adds `(1,N)`.
pub fn build_pairwise_lad_protocol(e: &Ensemble) -> Result<LoccProtocol> {
    let n = e.len();
    if n < 2 {
        return Err(Error::WrongCount { expected: 2, got: n });
    }
    for a in 0..n {
        for b in (a + 1)..n {
            let x = inner(e.states()[a].amplitudes(), e.states()[b].amplitudes()).norm();
            if x > ORTHO_TOL {
                return Err(Error::NonOrthogonal(e.labels()[a].clone(), e.labels()[b].clone(), x));
            }
        }
    }
    let mut pairs: Vec<(usize, usize)> = (0..n / 2).map(|k| (2 * k, 2 * k + 1)).collect();
    if n % 2 == 1 {
        pairs.push((0, n - 1));
    }
    let components = pairs.iter().map(|&(a, b)| walgate_pair_protocol(e, a, b)).collect::<Result<Vec<_>>>()?;
    Ok(LoccProtocol::uniform_mixture(components))
}
