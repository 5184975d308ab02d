use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::ensembles::kets::{theta, theta_minus};
use crate::ensembles::{catalog, sequence_ensemble};
use crate::error::{Error, Result};
use crate::exclusion::{probability, search_povm_for_exclusions, Povm, SearchOptions};
use crate::locc::{outcome_key, LoccProtocol};
use crate::qcore::{eigh, inner, tensor, PartyLayout};
use crate::{Matrix, State, C64};

/// Labels of the two-slot local states `θ±θ±`, in order.
pub const THETA_LOCAL_LABELS: [&str; 4] = ["++", "+-", "-+", "--"];
const OUTCOMES: [&str; 6] = ["A", "B", "C", "D", "E", "F"];
const COMPLETENESS_TOL: f64 = 1e-8;
const PAIR_TOL: f64 = 1e-9;

/// Local states each outcome rules out.
pub fn theta_pair_map() -> [[&'static str; 2]; 6] {
    [["++", "+-"], ["++", "-+"], ["+-", "--"], ["-+", "--"], ["+-", "-+"], ["++", "--"]]
}

/// `0 < θ < π/2` and `cos 2θ <= √2 - 1`.
pub fn theta_valid(t: f64) -> bool {
    t > 0.0 && t < FRAC_PI_2 && (2.0 * t).cos() <= 2f64.sqrt() - 1.0
}

#[derive(Clone, Debug, Serialize)]
pub struct ThetaMeasurement {
    pub theta: f64,
    /// Six outcomes `A..F` on two qubits, unlabeled.
    pub povm: Povm,
    pub outcomes: Vec<String>,
    pub pairs: Vec<[String; 2]>,
    /// Which reading of the printed elements was adopted, or `"synthesized"`.
    pub interpretation: String,
    pub synthesized: bool,
    /// Readings of the printed elements that were tried, with why each failed.
    pub rejected: Vec<(String, String)>,
    pub completeness_residual: f64,
    pub min_eigenvalue: f64,
    pub max_pair_residual: f64,
}

fn local_states(t: f64) -> Vec<State> {
    let (p, m) = (theta(t), theta_minus(t));
    vec![tensor(&p, &p), tensor(&p, &m), tensor(&m, &p), tensor(&m, &m)]
}

fn pair_indices() -> Vec<Vec<usize>> {
    theta_pair_map()
        .iter()
        .map(|pair| pair.iter().map(|l| THETA_LOCAL_LABELS.iter().position(|x| x == l).expect("known label")).collect())
        .collect()
}

fn rank_one(v: &[f64], w: f64) -> Matrix {
    let amps: Vec<C64> = v.iter().map(|&x| C64::new(x, 0.0)).collect();
    Matrix::outer(&amps, &amps).scale(w)
}

fn normalize(v: [f64; 4], yes: bool) -> [f64; 4] {
    if !yes {
        return v;
    }
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.map(|x| x / n)
}

/// The printed elements under one reading of the entangled outcomes.
fn printed_elements(t: f64, cs_cross: bool, norm_01: bool, norm_cs: bool) -> Vec<Matrix> {
    let (s, c) = (t.sin(), t.cos());
    let beta = 1.0 / (2.0 * c.powi(4));
    let gamma = (1.0 - t.tan().powi(4)) / (4.0 * s * s);
    let alpha = 0.5 - gamma * c * c;
    let bar_p = [s, -c];
    let bar_m = [s, c];
    let kron = |a: [f64; 2], b: [f64; 2]| [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]];
    let zero = [1.0, 0.0];
    let psi01 = |sign: f64| normalize([1.0, 0.0, 0.0, sign], norm_01);
    let cs = |sign: f64| {
        let v = if cs_cross { [0.0, s * s, sign * c * c, 0.0] } else { [s * s, 0.0, 0.0, sign * c * c] };
        normalize(v, norm_cs)
    };
    vec![
        rank_one(&kron(bar_p, zero), gamma),
        rank_one(&kron(zero, bar_p), gamma),
        rank_one(&kron(zero, bar_m), gamma),
        rank_one(&kron(bar_m, zero), gamma),
        rank_one(&psi01(1.0), alpha).add(&rank_one(&cs(1.0), beta)),
        rank_one(&psi01(-1.0), alpha).add(&rank_one(&cs(-1.0), beta)),
    ]
}

struct Checked {
    completeness: f64,
    min_eig: f64,
    pair: f64,
}

fn check(ops: &[Matrix], states: &[State]) -> Checked {
    let sum = ops.iter().fold(Matrix::zeros(4, 4), |a, m| a.add(m));
    let completeness = sum.max_abs_diff(&Matrix::identity(4));
    let min_eig = ops.iter().map(|m| eigh(m).min_value()).fold(f64::INFINITY, f64::min);
    let pair = ops
        .iter()
        .zip(pair_indices())
        .flat_map(|(m, idx)| idx.into_iter().map(move |i| probability(&states[i], m).abs()))
        .fold(0.0, f64::max);
    Checked { completeness, min_eig, pair }
}

/// Six-outcome measurement on two θ-qubits where each outcome excludes one pair of
/// `{θ±θ±}`. Tries the printed elements under each reading of the entangled outcomes;
/// when none is a valid measurement with the required exclusions, searches for one
/// with the same exclusion pattern and flags it as synthesized.
pub fn theta_global_measurement(t: f64, opts: &SearchOptions) -> Result<ThetaMeasurement> {
    if !theta_valid(t) {
        return Err(Error::ParameterOutOfRange {
            param: "theta".into(),
            value: t,
            reason: "needs 0 < θ < π/2 and cos 2θ <= √2 - 1".into(),
        });
    }
    let states = local_states(t);
    let layout = PartyLayout::with_default_names(vec![2, 2])?;
    let mut rejected = Vec::new();
    let mut chosen = None;
    for cs_cross in [false, true] {
        for norm_01 in [false, true] {
            for norm_cs in [false, true] {
                let name = format!(
                    "psi_cs = sin^2 |{}> ± cos^2 |{}>{}, psi_01 {}",
                    if cs_cross { "01" } else { "00" },
                    if cs_cross { "10" } else { "11" },
                    if norm_cs { " normalized" } else { "" },
                    if norm_01 { "normalized" } else { "as printed" },
                );
                let ops = printed_elements(t, cs_cross, norm_01, norm_cs);
                let c = check(&ops, &states);
                if c.completeness <= COMPLETENESS_TOL && c.min_eig >= -PAIR_TOL && c.pair <= PAIR_TOL {
                    if chosen.is_none() {
                        chosen = Some((name, ops, c));
                    }
                } else {
                    rejected.push((
                        name,
                        format!("completeness {:e}, min eigenvalue {:e}, pair residual {:e}", c.completeness, c.min_eig, c.pair),
                    ));
                }
            }
        }
    }
    let (interpretation, ops, c, synthesized) = match chosen {
        Some((name, ops, c)) => (name, ops, c, false),
        None => {
            let ops = search_povm_for_exclusions(&states, &pair_indices(), opts).ok_or_else(|| {
                Error::ConvergenceFailure(format!("exclusion search for the θ = {t} pair pattern"))
            })?;
            let c = check(&ops, &states);
            if c.completeness > COMPLETENESS_TOL || c.pair > PAIR_TOL || c.min_eig < -PAIR_TOL {
                return Err(Error::CriterionNotSatisfied(format!(
                    "synthesized measurement at θ = {t}: completeness {:e}, pair residual {:e}",
                    c.completeness, c.pair
                )));
            }
            ("synthesized".to_string(), ops, c, true)
        }
    };
    Ok(ThetaMeasurement {
        theta: t,
        povm: Povm::unlabeled(layout, ops)?,
        outcomes: OUTCOMES.iter().map(|s| s.to_string()).collect(),
        pairs: theta_pair_map().iter().map(|p| [p[0].to_string(), p[1].to_string()]).collect(),
        interpretation,
        synthesized,
        rejected,
        completeness_residual: c.completeness,
        min_eigenvalue: c.min_eig,
        max_pair_residual: c.pair,
    })
}

/// Both parties apply the θ measurement to their two slots of `theta4^[2]`. A joint
/// outcome excludes every sequence whose Alice part or Bob part is in the outcome's pair.
pub fn theta_sequence_protocol(t: f64, opts: &SearchOptions) -> Result<(LoccProtocol, ThetaMeasurement)> {
    let m = theta_global_measurement(t, opts)?;
    let seq = sequence_ensemble(&catalog("theta4", &[t])?, 2)?;
    let e = seq.ensemble();
    let local = local_states(t);
    let factors = e.factors().ok_or_else(|| Error::NotProduct(e.name().to_string()))?;
    let which = |s: &State| {
        local
            .iter()
            .position(|l| inner(l.amplitudes(), s.amplitudes()).norm() > 1.0 - 1e-9)
            .ok_or_else(|| Error::UnknownLabel("local part outside θ±θ±".into()))
    };
    let parts: Vec<[usize; 2]> = factors.iter().map(|f| Ok([which(&f[0])?, which(&f[1])?])).collect::<Result<_>>()?;
    let pairs = pair_indices();
    let mut map = BTreeMap::new();
    for a in 0..6 {
        for b in 0..6 {
            let excluded = e
                .labels()
                .iter()
                .zip(&parts)
                .filter(|(_, p)| pairs[a].contains(&p[0]) || pairs[b].contains(&p[1]))
                .map(|(l, _)| l.clone())
                .collect();
            map.insert(outcome_key(&[a, b]), excluded);
        }
    }
    let ops: Vec<Matrix> = m.povm.ops().cloned().collect();
    Ok((LoccProtocol::one_round(vec![ops.clone(), ops], map), m))
}
