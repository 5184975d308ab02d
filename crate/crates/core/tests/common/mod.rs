//! Random fixtures shared by the integration and acceptance targets.
#![allow(dead_code)]

use antimark_core::ensembles::Ensemble;
use antimark_core::qcore::{orthonormal_span, PartyLayout};
use antimark_core::{State, C64};
use rand::Rng;

/// Complex vector from interleaved real and imaginary parts.
pub fn complex(parts: &[f64]) -> Vec<C64> {
    parts.chunks(2).map(|c| C64::new(c[0], c[1])).collect()
}

pub fn random_vector(rng: &mut impl Rng, d: usize) -> Vec<C64> {
    (0..d).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

/// Unit vectors from raw vectors by Gram-Schmidt; `None` when they are nearly dependent.
pub fn orthonormalize(raw: &[Vec<C64>]) -> Option<Vec<Vec<C64>>> {
    let span = orthonormal_span(raw, 1e-6);
    (span.len() == raw.len()).then_some(span)
}

pub fn labels(n: usize) -> Vec<String> {
    (1..=n).map(|k| format!("s{k}")).collect()
}

pub fn ensemble(dims: &[usize], vectors: Vec<Vec<C64>>) -> Ensemble {
    let layout = PartyLayout::with_default_names(dims.to_vec()).unwrap();
    let states = vectors.into_iter().map(|v| State::new(v, layout.clone()).unwrap()).collect::<Vec<_>>();
    Ensemble::new("random", labels(states.len()), states).unwrap()
}

/// `n` mutually orthogonal random states on `dims`.
pub fn random_orthogonal(rng: &mut impl Rng, dims: &[usize], n: usize) -> Ensemble {
    let d: usize = dims.iter().product();
    loop {
        let raw: Vec<Vec<C64>> = (0..n).map(|_| random_vector(rng, d)).collect();
        if let Some(v) = orthonormalize(&raw) {
            return ensemble(dims, v);
        }
    }
}

/// `n` random unit vectors in dimension `d`.
pub fn random_states(rng: &mut impl Rng, d: usize, n: usize) -> Ensemble {
    let vectors = (0..n)
        .map(|_| loop {
            let v = random_vector(rng, d);
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-3 {
                break v.into_iter().map(|z| z / norm).collect();
            }
        })
        .collect();
    ensemble(&[d], vectors)
}

/// Three qubit states on a random great circle of the Bloch sphere at random angles.
pub fn random_great_circle_triple(rng: &mut impl Rng) -> Ensemble {
    let frame = loop {
        if let Some(f) = orthonormalize(&[random_vector(rng, 2), random_vector(rng, 2)]) {
            break f;
        }
    };
    let vectors = (0..3)
        .map(|_| {
            let half: f64 = rng.gen_range(0.0..std::f64::consts::PI);
            (0..2).map(|i| frame[0][i] * half.cos() + frame[1][i] * half.sin()).collect()
        })
        .collect();
    ensemble(&[2], vectors)
}
