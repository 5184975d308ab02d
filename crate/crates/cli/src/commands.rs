use std::fmt::Write as _;
use std::path::Path;

use antimark_core::antimark::{
    check_lsam as lsam_local, check_lsam_global, linear_grid, pbr_sequence_protocol, sweep_theta,
    theta_sequence_protocol, verify_sequence_elimination, Family, LsamTask, SequenceMeasurement, SweepOptions,
};
use antimark_core::ensembles::{catalog as builtin, catalog_entries, parse_ensemble, Ensemble};
use antimark_core::exclusion::{decide_antidist, Decision, DecideOptions, SearchOptions, DEFAULT_TOL};
use antimark_core::locc::{
    build_pairwise_lad_protocol, decide_local_antidist, parse_protocol, protocol_to_document,
    verify_conclusive_identification, verify_local_protocol, LoccProtocol, ProtocolKind,
};
use serde_json::json;

use crate::report::{fmt_list, num, to_value, write_verdict, Failure, Report, EXIT_UNKNOWN};
use crate::{BuildMethod, Common, EnsembleArgs, FamilyArg, Mode, TOL_ENV};

pub struct Context {
    pub tol: f64,
    pub seed: Option<u64>,
}

impl Context {
    pub fn new(common: &Common) -> Result<Self, Failure> {
        let tol = match common.tol {
            Some(t) => t,
            None => match std::env::var(TOL_ENV) {
                Ok(s) => s.trim().parse().map_err(|_| Failure::usage(format!("{TOL_ENV}={s} is not a number")))?,
                Err(_) => DEFAULT_TOL,
            },
        };
        if !(tol.is_finite() && tol > 0.0) {
            return Err(Failure::usage(format!("tolerance must be positive, got {tol}")));
        }
        Ok(Self { tol, seed: common.seed })
    }

    fn search(&self, base: SearchOptions) -> SearchOptions {
        match self.seed {
            Some(seed) => SearchOptions { seed, ..base },
            None => base,
        }
    }

    fn decide(&self) -> DecideOptions {
        DecideOptions { tol: self.tol, search: self.search(SearchOptions::default()) }
    }
}

fn parse_param(param: Option<&str>) -> Result<Vec<f64>, Failure> {
    let Some(p) = param else { return Ok(Vec::new()) };
    let (key, value) = p.split_once('=').ok_or_else(|| Failure::usage(format!("expected theta=<value>, got `{p}`")))?;
    if key.trim() != "theta" {
        return Err(Failure::usage(format!("unknown parameter `{}`", key.trim())));
    }
    let v: f64 = value.trim().parse().map_err(|_| Failure::usage(format!("`{value}` is not a number")))?;
    Ok(vec![v])
}

fn load_ensemble(args: &EnsembleArgs) -> Result<Ensemble, Failure> {
    let params = parse_param(args.param.as_deref())?;
    if catalog_entries().iter().any(|c| c.name == args.ensemble) {
        return Ok(builtin(&args.ensemble, &params)?);
    }
    let path = Path::new(&args.ensemble);
    if !path.exists() {
        return Err(Failure::usage(format!("`{}` is neither a catalog name nor a file", args.ensemble)));
    }
    if !params.is_empty() {
        return Err(Failure::usage("--param applies to catalog ensembles only"));
    }
    let text = std::fs::read_to_string(path).map_err(|e| Failure::data(format!("{}: {e}", path.display())))?;
    Ok(parse_ensemble(&text)?)
}

fn load_protocol(path: &Path) -> Result<LoccProtocol, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::data(format!("{}: {e}", path.display())))?;
    Ok(parse_protocol(&text)?)
}

pub fn catalog() -> Result<Report, Failure> {
    let mut text = String::new();
    let mut rows = Vec::new();
    for c in catalog_entries() {
        let dims: Vec<String> = c.dims.iter().map(usize::to_string).collect();
        let param = c.param.unwrap_or("-");
        let _ = writeln!(
            text,
            "{:<26} dims {:<7} states {:<2} param {:<6} product {:<5} {}",
            c.name,
            dims.join("x"),
            c.states,
            param,
            c.product,
            c.summary
        );
        rows.push(json!({
            "name": c.name,
            "dims": c.dims,
            "states": c.states,
            "param": c.param,
            "product": c.product,
            "summary": c.summary,
        }));
    }
    Ok(Report::new("catalog", "ok", 0, json!({ "ensembles": rows }), text))
}

pub fn check_antidist(ctx: &Context, args: &EnsembleArgs, mode: Mode) -> Result<Report, Failure> {
    let e = load_ensemble(args)?;
    let opts = ctx.decide();
    let v = match mode {
        Mode::Global => decide_antidist(&e, &opts)?,
        Mode::Local => decide_local_antidist(&e, &opts)?,
    };
    let mode_name = match mode {
        Mode::Global => "global",
        Mode::Local => "local",
    };
    let mut text = format!("ensemble: {} ({} states)\nmode: {mode_name}\n", e.name(), e.len());
    write_verdict(&mut text, &v, 0);
    let result = json!({ "ensemble": e.name(), "mode": mode_name, "tol": ctx.tol, "verdict": to_value(&v)? });
    Ok(Report::decision("check-antidist", v.decision, result, text))
}

/// Built-in sequence protocols for `m > 1`.
fn builtin_sequence_protocol(
    ctx: &Context,
    name: &str,
    theta: Option<f64>,
    n: usize,
) -> Result<Option<(LoccProtocol, serde_json::Value)>, Failure> {
    match (name, theta, n) {
        ("pbr4", _, 2) => Ok(Some((pbr_sequence_protocol()?, json!({ "construction": "xi_product" })))),
        ("theta4", Some(t), 2) => {
            let search = ctx.search(SweepOptions::default().search);
            let (p, m) = theta_sequence_protocol(t, &search)?;
            Ok(Some((p, json!({ "construction": "theta_pairs", "measurement": to_value(&m)? }))))
        }
        _ => Ok(None),
    }
}

pub fn check_lsam(
    ctx: &Context,
    args: &EnsembleArgs,
    n: usize,
    m: u128,
    global: bool,
    protocol: Option<&Path>,
) -> Result<Report, Failure> {
    let e = load_ensemble(args)?;
    let task = LsamTask::new(e, n, m)?;
    let name = task.parent().name().to_string();
    let mut text = format!("ensemble: {name}\ntask: ({n}, {m})-LSAM{}\n", if global { " with a global measurement" } else { "" });

    if protocol.is_none() && m == 1 {
        let opts = ctx.decide();
        let v = if global { check_lsam_global(&task, &opts)? } else { lsam_local(&task, &opts)? };
        write_verdict(&mut text, &v, 0);
        let result = json!({ "ensemble": name, "n": n, "m": m, "global": global, "verdict": to_value(&v)? });
        return Ok(Report::decision("check-lsam", v.decision, result, text));
    }

    let found = match protocol {
        Some(path) => Some((load_protocol(path)?, json!({ "construction": "file", "path": path.display().to_string() }))),
        None => builtin_sequence_protocol(ctx, &args.ensemble, parse_param(args.param.as_deref())?.first().copied(), n)?,
    };
    let Some((p, info)) = found else {
        let _ = writeln!(text, "decision: UNKNOWN\nnote: no protocol for m > 1; pass one with --protocol");
        let result = json!({ "ensemble": name, "n": n, "m": m, "global": global, "decision": "UNKNOWN" });
        return Ok(Report::new("check-lsam", "UNKNOWN", EXIT_UNKNOWN, result, text));
    };
    let report = verify_sequence_elimination(&task, &SequenceMeasurement::Local(p), ctx.tol)?;
    let decision = if report.pass { Decision::Yes } else { Decision::Unknown };
    let _ = writeln!(text, "decision: {decision}");
    let _ = writeln!(text, "method: sequence_elimination");
    let _ = writeln!(text, "min eliminated: {} (required {m})", report.min_eliminated);
    if let Some(flag) = info.pointer("/measurement/synthesized").and_then(|v| v.as_bool()) {
        let _ = writeln!(text, "synthesized: {flag}");
    }
    let result = json!({
        "ensemble": name,
        "n": n,
        "m": m,
        "global": global,
        "decision": decision,
        "method": "sequence_elimination",
        "protocol": info,
        "elimination": to_value(&report)?,
    });
    Ok(Report::decision("check-lsam", decision, result, text))
}

pub fn verify_protocol(ctx: &Context, args: &EnsembleArgs, path: &Path, conclusive: bool) -> Result<Report, Failure> {
    let e = load_ensemble(args)?;
    let p = load_protocol(path)?;
    let mut text = format!("ensemble: {}\nprotocol: {}\n", e.name(), path.display());
    if conclusive {
        if p.kind != ProtocolKind::OneRoundProduct {
            return Err(Failure::data("conclusive identification needs a one_round_product protocol"));
        }
        let r = verify_conclusive_identification(&e, &p.parties, ctx.tol)?;
        let _ = writeln!(text, "conclusive: {}", if r.pass { "pass" } else { "fail" });
        let _ = writeln!(text, "identified: {}", r.identified.join(", "));
        let _ = writeln!(text, "unidentified: {}", r.unidentified.join(", "));
        for o in r.outcomes.iter().filter(|o| o.is_conclusive()) {
            let _ = writeln!(text, "  {} -> {} (p = {})", o.key, o.consistent.join(", "), num(o.probability));
        }
        let result = json!({ "ensemble": e.name(), "conclusive": to_value(&r)? });
        return Ok(Report::pass_fail("verify-protocol", r.pass, result, text));
    }
    let r = verify_local_protocol(&e, &p, ctx.tol)?;
    let _ = writeln!(text, "result: {}", if r.pass { "pass" } else { "fail" });
    let _ = writeln!(text, "completeness residual: {}", num(r.completeness_residual));
    let _ = writeln!(text, "min eigenvalue: {}", num(r.min_eigenvalue));
    let _ = writeln!(text, "max exclusion residual: {}", num(r.max_exclusion_residual));
    if !r.unexcluded.is_empty() {
        let _ = writeln!(text, "never excluded: {}", r.unexcluded.join(", "));
    }
    if !r.unreachable_mapped.is_empty() {
        let _ = writeln!(text, "mapped but unreachable: {}", r.unreachable_mapped.join(", "));
    }
    for o in &r.outcomes {
        let claim = o.claimed.as_ref().map(|c| c.join(", ")).unwrap_or_else(|| "-".into());
        let _ = writeln!(text, "  {} excludes [{claim}] p = {} residual = {}", o.key, num(o.probability), num(o.max_residual));
    }
    let result = json!({ "ensemble": e.name(), "tol": ctx.tol, "report": to_value(&r)? });
    Ok(Report::pass_fail("verify-protocol", r.pass, result, text))
}

pub fn sweep(ctx: &Context, family: FamilyArg, min: f64, max: f64, steps: usize) -> Result<Report, Failure> {
    if steps == 0 || !(min < max || (steps == 1 && min == max)) {
        return Err(Failure::usage("need --min < --max and --steps >= 1"));
    }
    let family = match family {
        FamilyArg::Nl2 => Family::Nl2,
        FamilyArg::Theta4 => Family::Theta4,
    };
    let defaults = SweepOptions::default();
    let opts = SweepOptions { decide: ctx.decide(), search: ctx.search(defaults.search.clone()), ..defaults };
    let r = sweep_theta(family, &linear_grid(min, max, steps), &opts)?;
    let mut text = String::new();
    for p in &r.points {
        let cells: Vec<String> = p.verdicts.iter().map(|(s, v)| format!("{s}={}", v.decision)).collect();
        let _ = writeln!(text, "theta {} {}", num(p.theta), cells.join(" "));
    }
    for b in &r.boundaries {
        let _ = writeln!(text, "boundary {} at {} in [{}, {}]", b.series, num(b.theta), num(b.lower), num(b.upper));
    }
    for reg in &r.regions {
        let _ = writeln!(text, "region {}", fmt_list(reg));
    }
    Ok(Report::new("sweep", "ok", 0, to_value(&r)?, text))
}

pub fn build_protocol(ctx: &Context, args: &EnsembleArgs, method: BuildMethod, out: &Path) -> Result<Report, Failure> {
    let e = load_ensemble(args)?;
    let p = match method {
        BuildMethod::PairwiseWalgate => build_pairwise_lad_protocol(&e)?,
    };
    let r = verify_local_protocol(&e, &p, ctx.tol)?;
    let doc = serde_json::to_string_pretty(&protocol_to_document(&p))?;
    std::fs::write(out, doc).map_err(|err| Failure::data(format!("{}: {err}", out.display())))?;
    let text = format!(
        "ensemble: {}\nmethod: pairwise_walgate\nwritten: {}\nverification: {}\n",
        e.name(),
        out.display(),
        if r.pass { "pass" } else { "fail" }
    );
    let result = json!({ "ensemble": e.name(), "method": "pairwise_walgate", "out": out.display().to_string(), "report": to_value(&r)? });
    Ok(Report::pass_fail("build-protocol", r.pass, result, text))
}
