use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex;

use super::Ensemble;
use crate::error::{Error, Result};
use crate::qcore::PartyLayout;
use crate::{State, C64};

/// Single-party kets used by the built-in ensembles.
pub mod kets {
    use super::*;

    fn c(re: f64) -> C64 {
        Complex::new(re, 0.0)
    }

    /// Normalized single-party state from amplitudes.
    pub fn ket(amps: &[C64]) -> State {
        State::from_amplitudes(amps.to_vec()).expect("non-zero literal ket")
    }

    pub fn real(amps: &[f64]) -> State {
        State::from_reals(amps).expect("non-zero literal ket")
    }

    pub fn zero() -> State {
        real(&[1.0, 0.0])
    }

    pub fn one() -> State {
        real(&[0.0, 1.0])
    }

    pub fn plus() -> State {
        real(&[1.0, 1.0])
    }

    pub fn minus() -> State {
        real(&[1.0, -1.0])
    }

    /// `(|0> + i|1>)/√2`
    pub fn iplus() -> State {
        ket(&[c(1.0), Complex::new(0.0, 1.0)])
    }

    /// `(|0> - i|1>)/√2`
    pub fn iminus() -> State {
        ket(&[c(1.0), Complex::new(0.0, -1.0)])
    }

    /// `cos θ|0> + sin θ|1>`
    pub fn theta(t: f64) -> State {
        real(&[t.cos(), t.sin()])
    }

    /// `cos θ|0> - sin θ|1>`
    pub fn theta_minus(t: f64) -> State {
        real(&[t.cos(), -t.sin()])
    }

    /// Qubit state orthogonal to `a|0> + b|1>`: `-b*|0> + a*|1>`.
    pub fn perp(s: &State) -> State {
        let a = s.amplitudes();
        ket(&[-a[1].conj(), a[0].conj()])
    }

    /// `(|p> + sign|q>)` in dimension `d`, normalized.
    pub fn pair(d: usize, p: usize, q: usize, sign: f64) -> State {
        let mut v = vec![0.0; d];
        v[p] += 1.0;
        v[q] += sign;
        real(&v)
    }

    pub fn basis(d: usize, k: usize) -> State {
        let mut v = vec![0.0; d];
        v[k] = 1.0;
        real(&v)
    }

    /// The qubit SIC `s_1 = |0>`, `s_j = (|0> + e^{2πi(j-2)/3}√2|1>)/√3`.
    pub fn sic() -> Vec<State> {
        let mut out = vec![zero()];
        for j in 2..=4 {
            let phase = Complex::from_polar(2.0f64.sqrt(), 2.0 * PI * (j as f64 - 2.0) / 3.0);
            out.push(ket(&[c(1.0), phase]));
        }
        out
    }

    /// Trine `T_k = cos(2π(k-1)/3)|0> + sin(2π(k-1)/3)|1>`.
    pub fn trine() -> Vec<State> {
        (0..3).map(|k| theta(2.0 * PI * k as f64 / 3.0)).collect()
    }
}

/// Description of a built-in ensemble.
#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub dims: &'static [usize],
    pub states: usize,
    pub param: Option<&'static str>,
    pub product: bool,
    pub summary: &'static str,
}

const ENTRIES: &[CatalogEntry] = &[
    CatalogEntry { name: "weak3", dims: &[2], states: 3, param: None, product: false, summary: "{|0>, |1>, |+>}" },
    CatalogEntry { name: "trine3", dims: &[2], states: 3, param: None, product: false, summary: "symmetric qubit trine" },
    CatalogEntry { name: "bell4", dims: &[2, 2], states: 4, param: None, product: false, summary: "Bell basis" },
    CatalogEntry { name: "bennett9", dims: &[3, 3], states: 9, param: None, product: true, summary: "nine orthogonal product states in 3x3" },
    CatalogEntry { name: "duan4", dims: &[2, 2], states: 4, param: None, product: true, summary: "{|00>, |11>, |++>, |i+ i->}" },
    CatalogEntry { name: "nl1", dims: &[2, 2], states: 3, param: None, product: true, summary: "{|0+>, |+0>, |i+ i+>}" },
    CatalogEntry { name: "sic4", dims: &[2], states: 4, param: None, product: false, summary: "qubit SIC" },
    CatalogEntry { name: "double_sic_antiparallel", dims: &[2, 2], states: 4, param: None, product: true, summary: "|s_i>|s_i^perp>" },
    CatalogEntry { name: "pbr4", dims: &[2, 2], states: 4, param: None, product: true, summary: "{|00>, |0+>, |+0>, |++>}" },
    CatalogEntry { name: "theta4", dims: &[2, 2], states: 4, param: Some("theta"), product: true, summary: "|θ±>|θ±>, θ in (0, π/2)" },
    CatalogEntry { name: "nl2", dims: &[2, 2, 2], states: 3, param: Some("theta"), product: true, summary: "{|000>, |0θθ>, |θ0θ>}, θ in (0, π)" },
    CatalogEntry { name: "su3", dims: &[2, 2], states: 3, param: None, product: true, summary: "{|00>, |0+>, |+0>}" },
];

pub fn catalog_entries() -> &'static [CatalogEntry] {
    ENTRIES
}

fn labels(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|k| format!("{prefix}{k}")).collect()
}

fn strs(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn product(name: &str, dims: Vec<usize>, labels: Vec<String>, factors: Vec<Vec<State>>) -> Result<Ensemble> {
    Ensemble::from_factors(name, PartyLayout::with_default_names(dims)?, labels, factors)
}

fn theta_param(name: &str, params: &[f64], hi: f64) -> Result<f64> {
    let t = *params
        .first()
        .ok_or_else(|| Error::MissingParameter { name: name.into(), param: "theta".into() })?;
    if !(t > 0.0 && t < hi) {
        return Err(Error::ParameterOutOfRange {
            param: "theta".into(),
            value: t,
            reason: format!("must lie in (0, {hi})"),
        });
    }
    Ok(t)
}

/// Built-in ensemble by name; `theta4` and `nl2` take the angle θ as the first parameter.
pub fn catalog(name: &str, params: &[f64]) -> Result<Ensemble> {
    use kets::*;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let c = |re: f64| Complex::new(re, 0.0);
    match name {
        "weak3" => Ensemble::new(name, strs(&["0", "1", "+"]), vec![zero(), one(), plus()]),
        "trine3" => Ensemble::new(name, labels("T", 3), trine()),
        "sic4" => Ensemble::new(name, labels("s", 4), sic()),
        "bell4" => {
            let layout = PartyLayout::with_default_names(vec![2, 2])?;
            let vecs = [[h, 0.0, 0.0, h], [h, 0.0, 0.0, -h], [0.0, h, h, 0.0], [0.0, h, -h, 0.0]];
            let states = vecs
                .iter()
                .map(|v| State::new(v.iter().map(|&x| c(x)).collect(), layout.clone()))
                .collect::<Result<_>>()?;
            Ensemble::new(name, strs(&["Phi+", "Phi-", "Psi+", "Psi-"]), states)
        }
        "bennett9" => {
            let b = |k| basis(3, k);
            let p = |x, y, s| pair(3, x, y, s);
            let factors = vec![
                vec![b(1), b(1)],
                vec![b(0), p(0, 1, 1.0)],
                vec![b(0), p(0, 1, -1.0)],
                vec![b(2), p(1, 2, 1.0)],
                vec![b(2), p(1, 2, -1.0)],
                vec![p(1, 2, 1.0), b(0)],
                vec![p(1, 2, -1.0), b(0)],
                vec![p(0, 1, 1.0), b(2)],
                vec![p(0, 1, -1.0), b(2)],
            ];
            product(name, vec![3, 3], labels("psi", 9), factors)
        }
        "duan4" => product(
            name,
            vec![2, 2],
            labels("D", 4),
            vec![vec![zero(), zero()], vec![one(), one()], vec![plus(), plus()], vec![iplus(), iminus()]],
        ),
        "nl1" => product(
            name,
            vec![2, 2],
            labels("psi", 3),
            vec![vec![zero(), plus()], vec![plus(), zero()], vec![iplus(), iplus()]],
        ),
        "double_sic_antiparallel" => {
            let factors = sic().into_iter().map(|s| { let p = perp(&s); vec![s, p] }).collect();
            product(name, vec![2, 2], labels("gamma", 4), factors)
        }
        "pbr4" => product(
            name,
            vec![2, 2],
            strs(&["00", "0+", "+0", "++"]),
            vec![vec![zero(), zero()], vec![zero(), plus()], vec![plus(), zero()], vec![plus(), plus()]],
        ),
        "theta4" => {
            let t = theta_param(name, params, FRAC_PI_2)?;
            let (p, m) = (theta(t), theta_minus(t));
            product(
                name,
                vec![2, 2],
                labels("psi", 4),
                vec![vec![p.clone(), p.clone()], vec![p.clone(), m.clone()], vec![m.clone(), p], vec![m.clone(), m]],
            )
        }
        "nl2" => {
            let t = theta_param(name, params, PI)?;
            let th = theta(t);
            product(
                name,
                vec![2, 2, 2],
                labels("psi", 3),
                vec![vec![zero(), zero(), zero()], vec![zero(), th.clone(), th.clone()], vec![th.clone(), zero(), th]],
            )
        }
        "su3" => product(
            name,
            vec![2, 2],
            labels("psi", 3),
            vec![vec![zero(), zero()], vec![zero(), plus()], vec![plus(), zero()]],
        ),
        _ => Err(Error::UnknownEnsemble(name.to_string())),
    }
}
