use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use super::{check_lsam, theta_sequence_protocol, theta_valid, verify_sequence_elimination, LsamTask, SequenceMeasurement};
use crate::ensembles::catalog;
use crate::error::{Error, Result};
use crate::exclusion::{caves_from_overlaps, decide_antidist, Decision, DecideOptions, Method, SearchOptions, Verdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Nl2,
    Theta4,
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nl2" => Ok(Family::Nl2),
            "theta4" => Ok(Family::Theta4),
            other => Err(Error::UnknownEnsemble(other.to_string())),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SweepOptions {
    pub decide: DecideOptions,
    /// Search settings for the θ-family certificate pipeline.
    pub search: SearchOptions,
    /// Bracket width at which boundary bisection stops.
    pub bisection_width: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            decide: DecideOptions::default(),
            search: SearchOptions { restarts: 16, iterations: 3000, ..SearchOptions::default() },
            bisection_width: 1e-7,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepPoint {
    pub theta: f64,
    /// Named verdicts at this angle.
    pub verdicts: Vec<(String, Verdict)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Boundary {
    pub series: String,
    pub theta: f64,
    pub lower: f64,
    pub upper: f64,
    pub width: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepResult {
    pub family: Family,
    pub grid: Vec<f64>,
    pub points: Vec<SweepPoint>,
    pub boundaries: Vec<Boundary>,
    /// For `nl2`: where the set is globally antidistinguishable but not `(2,1)`
    /// antimarkable. For `theta4`: where `(2,8)` antimarking is certified.
    pub regions: Vec<[f64; 2]>,
}

/// Caves criterion for `nl2`: all pairwise overlaps are `cos^4 θ`.
pub fn nl2_global_ok(t: f64) -> bool {
    let x = t.cos().powi(4);
    caves_from_overlaps(x, x, x).antidistinguishable()
}

/// Caves criterion for the local parts of `nl2^[2]`: overlaps `cos^2 θ, cos^2 θ, cos^4 θ`.
pub fn nl2_local_ok(t: f64) -> bool {
    let c2 = t.cos().powi(2);
    caves_from_overlaps(c2, c2, c2 * c2).antidistinguishable()
}

fn nl2_point(t: f64, opts: &SweepOptions) -> Result<SweepPoint> {
    let e = catalog("nl2", &[t])?;
    let global = decide_antidist(&e, &opts.decide)?;
    let local = check_lsam(&LsamTask::new(e, 2, 1)?, &opts.decide)?;
    Ok(SweepPoint { theta: t, verdicts: vec![("global".into(), global), ("lsam_2_1".into(), local)] })
}

fn theta4_verdict(t: f64, opts: &SweepOptions) -> Verdict {
    if !theta_valid(t) {
        return Verdict::new(Decision::Unknown, Method::Certificate).with_note("outside 0 < θ < π/2, cos 2θ <= √2 - 1");
    }
    let run = || -> Result<(usize, bool)> {
        let (protocol, m) = theta_sequence_protocol(t, &opts.search)?;
        let task = LsamTask::new(catalog("theta4", &[t])?, 2, 8)?;
        let r = verify_sequence_elimination(&task, &SequenceMeasurement::Local(protocol), 1e-9)?;
        Ok((r.min_eliminated, m.synthesized))
    };
    match run() {
        Ok((k, synthesized)) => {
            let d = if k >= 8 { Decision::Yes } else { Decision::Unknown };
            let v = Verdict::new(d, Method::Certificate).with_margins(vec![k as f64 - 8.0]);
            if synthesized { v.with_note("synthesized") } else { v }
        }
        Err(err) => Verdict::new(Decision::Unknown, Method::Certificate).with_note(err.to_string()),
    }
}

fn bisect(mut lo: f64, mut hi: f64, width: f64, pred: impl Fn(f64) -> bool) -> (f64, f64) {
    let at_lo = pred(lo);
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        if pred(mid) == at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Evaluates `family` on `grid`, locates verdict changes by bisection and reports the
/// resulting regions. Grid points are evaluated in parallel.
type Predicate<'a> = Box<dyn Fn(f64) -> bool + Sync + 'a>;

pub fn sweep_theta(family: Family, grid: &[f64], opts: &SweepOptions) -> Result<SweepResult> {
    if grid.is_empty() {
        return Err(Error::Range("empty grid".into()));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) || grid[0] <= 0.0 || grid[grid.len() - 1] >= PI {
        return Err(Error::Range("grid must be increasing inside (0, π)".into()));
    }
    let points: Vec<SweepPoint> = match family {
        Family::Nl2 => grid.par_iter().map(|&t| nl2_point(t, opts)).collect::<Result<_>>()?,
        Family::Theta4 => grid
            .par_iter()
            .map(|&t| SweepPoint { theta: t, verdicts: vec![("lsam_2_8".into(), theta4_verdict(t, opts))] })
            .collect(),
    };
    let predicates: Vec<(String, Predicate<'_>)> = match family {
        Family::Nl2 => vec![("global".into(), Box::new(nl2_global_ok)), ("lsam_2_1".into(), Box::new(nl2_local_ok))],
        Family::Theta4 => vec![("lsam_2_8".into(), Box::new(move |t| theta4_verdict(t, opts).is_yes()))],
    };
    let mut boundaries = Vec::new();
    for (k, (series, pred)) in predicates.iter().enumerate() {
        for w in points.windows(2) {
            if w[0].verdicts[k].1.is_yes() != w[1].verdicts[k].1.is_yes() {
                let (lower, upper) = bisect(w[0].theta, w[1].theta, opts.bisection_width, pred);
                boundaries.push(Boundary {
                    series: series.clone(),
                    theta: 0.5 * (lower + upper),
                    lower,
                    upper,
                    width: upper - lower,
                });
            }
        }
    }
    let inside = |t: f64| match family {
        Family::Nl2 => nl2_global_ok(t) && !nl2_local_ok(t),
        Family::Theta4 => (predicates[0].1)(t),
    };
    let mut cuts: Vec<f64> = boundaries.iter().map(|b| b.theta).collect();
    cuts.push(grid[0]);
    cuts.push(grid[grid.len() - 1]);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut regions: Vec<[f64; 2]> = Vec::new();
    for w in cuts.windows(2) {
        if !inside(0.5 * (w[0] + w[1])) {
            continue;
        }
        match regions.last_mut() {
            Some(r) if r[1] == w[0] => r[1] = w[1],
            _ => regions.push([w[0], w[1]]),
        }
    }
    if cuts.len() == 1 && inside(cuts[0]) {
        regions.push([cuts[0], cuts[0]]);
    }
    Ok(SweepResult { family, grid: grid.to_vec(), points, boundaries, regions })
}

/// `steps` evenly spaced angles from `min` to `max` inclusive.
pub fn linear_grid(min: f64, max: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![min],
        _ => (0..steps).map(|k| min + (max - min) * k as f64 / (steps - 1) as f64).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    #[test]
    fn nl2_boundaries() {
        let grid = linear_grid(0.1, PI - 0.1, 40);
        let r = sweep_theta(Family::Nl2, &grid, &SweepOptions::default()).unwrap();
        let find = |series: &str| -> Vec<f64> {
            r.boundaries.iter().filter(|b| b.series == series).map(|b| b.theta).collect()
        };
        let g = find("global");
        assert_eq!(g.len(), 2);
        assert!((g[0] - FRAC_PI_4).abs() < 1e-6 && (g[1] - 3.0 * FRAC_PI_4).abs() < 1e-6);
        let l = find("lsam_2_1");
        let a = (1.0 / 3f64.sqrt()).acos();
        assert!((l[0] - a).abs() < 1e-6 && (l[1] - (PI - a)).abs() < 1e-6);
        assert_eq!(r.regions.len(), 2);
        assert!((r.regions[0][0] - FRAC_PI_4).abs() < 1e-6 && (r.regions[0][1] - a).abs() < 1e-6);
    }

    #[test]
    fn closed_forms_agree_with_ensembles() {
        for t in linear_grid(0.05, PI - 0.05, 60) {
            let p = nl2_point(t, &SweepOptions::default()).unwrap();
            assert_eq!(p.verdicts[0].1.is_yes(), nl2_global_ok(t), "θ = {t}");
            assert_eq!(p.verdicts[1].1.is_yes(), nl2_local_ok(t), "θ = {t}");
        }
    }

    #[test]
    fn orthogonal_at_half_pi() {
        let p = nl2_point(FRAC_PI_2, &SweepOptions::default()).unwrap();
        assert!(p.verdicts.iter().all(|(_, v)| v.is_yes()));
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(sweep_theta(Family::Nl2, &[], &SweepOptions::default()).is_err());
        assert!(sweep_theta(Family::Nl2, &[1.0, 0.5], &SweepOptions::default()).is_err());
        assert!(sweep_theta(Family::Nl2, &[0.0, 1.0], &SweepOptions::default()).is_err());
    }
}
