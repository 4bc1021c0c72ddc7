use std::fs;
use std::io::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::{json, Value};
use smlab_core::analysis::{
    self, lemma_suite, pent_up_residual, validate, ValidationReport, BAND_TOL, CERTIFICATE_TOL,
    LEMMA_TOL, MONOTONE_TOL, VISIT_TOL,
};
use smlab_core::bounds::{bound_report, key_quantities, Certificate, KeyQuantities};
use smlab_core::engine::{run_with_states, SimConfig, Trajectory};
use smlab_core::format::{round_sig, sig, sweep_csv, trajectory_csv};

use crate::config::{Format, RunConfig};
use crate::plot;

/// Lemma samples drawn by `verify`.
pub const LEMMA_SAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Clean,
    Violations,
}

/// Rounds every float to the output precision.
fn rounded(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => n
            .as_f64()
            .and_then(|x| serde_json::Number::from_f64(round_sig(x)))
            .map_or(Value::Null, Value::Number),
        Value::Array(a) => Value::Array(a.into_iter().map(rounded).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, rounded(v))).collect()),
        other => other,
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let v = rounded(serde_json::to_value(value)?);
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}

fn emit(cfg: &RunConfig, text: &str) -> Result<()> {
    match &cfg.out {
        Some(path) => write_file(path, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn simulate_config(cfg: &RunConfig, delta: f64) -> Result<SimConfig> {
    Ok(
        SimConfig::new(cfg.curve.clone(), cfg.supply, delta, cfg.steps)?
            .with_tie_tol(cfg.tie_tol)?,
    )
}

fn report_violations(what: &str, report: &ValidationReport) {
    eprintln!(
        "{what}: {} violations (band {}, monotonicity {}, certificate {}, revenue {}, pent-up {})",
        report.violation_count(),
        report.band_violations.len(),
        report.monotonicity_violations.len(),
        report.certificate_violations.len(),
        report.revenue_violations.len(),
        report.pent_up_violations.len()
    );
}

pub fn quantities(cfg: &RunConfig) -> Result<Outcome> {
    let kq = key_quantities(&cfg.curve, cfg.supply)?;
    let text = match cfg.format.unwrap_or(Format::Json) {
        Format::Json => {
            #[derive(Serialize)]
            struct Out<'a> {
                curve: String,
                #[serde(flatten)]
                kq: &'a KeyQuantities,
            }
            to_json(&Out {
                curve: cfg.curve.to_string(),
                kq: &kq,
            })?
        }
        Format::Csv => {
            let rows = [
                ("supply", sig(kq.supply)),
                ("p_mon", sig(kq.p_mon)),
                ("q_mon", sig(kq.q_mon)),
                ("rev_mon", sig(kq.rev_mon)),
                ("p_ser", sig(kq.p_ser)),
                ("q_ser", sig(kq.q_ser)),
                ("p_bar_ser", sig(kq.p_bar_ser)),
                ("q_bar_ser", sig(kq.q_bar_ser)),
                ("delta_bar_ser", sig(kq.delta_bar_ser)),
                ("weakly_decreasing", kq.weakly_decreasing.to_string()),
                (
                    "p_ser_flat_adjusted",
                    kq.p_ser_flat_adjusted.map(sig).unwrap_or_default(),
                ),
            ];
            let mut s = String::from("quantity,value\n");
            for (k, v) in rows {
                s.push_str(&format!("{k},{v}\n"));
            }
            s
        }
    };
    emit(cfg, &text)?;
    Ok(Outcome::Clean)
}

pub fn simulate(cfg: &RunConfig) -> Result<Outcome> {
    let delta = cfg.scalar_delta()?;
    let kq = key_quantities(&cfg.curve, cfg.supply)?;
    let traj = run_with_states(&simulate_config(cfg, delta)?)?;
    let report = validate(&traj.records, &traj.states, &kq, &cfg.curve, delta)?;
    let text = match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => trajectory_csv(&traj.records),
        Format::Json => to_json(&json!({
            "curve": cfg.curve.to_string(),
            "supply": cfg.supply,
            "delta": delta,
            "steps": cfg.steps,
            "records": traj.records,
            "validation": report,
        }))?,
    };
    emit(cfg, &text)?;
    if let Some(path) = &cfg.plot {
        let pts: Vec<(f64, f64)> = traj.records.iter().map(|r| (r.t as f64, r.price)).collect();
        write_file(path, &plot::line_chart(&pts, "t", "price"))?;
    }
    if report.is_clean() {
        Ok(Outcome::Clean)
    } else {
        report_violations(&format!("delta={}", sig(delta)), &report);
        Ok(Outcome::Violations)
    }
}

pub fn sweep(cfg: &RunConfig) -> Result<Outcome> {
    let grid = cfg.delta_grid()?;
    let rows = analysis::delta_sweep(
        &cfg.curve,
        cfg.supply,
        &grid,
        cfg.steps,
        cfg.burn_in_fraction,
        cfg.tie_tol,
    )?;
    let kq = key_quantities(&cfg.curve, cfg.supply)?;
    let mut outcome = Outcome::Clean;
    for &delta in &grid {
        let traj = run_with_states(&simulate_config(cfg, delta)?)?;
        let report = validate(&traj.records, &traj.states, &kq, &cfg.curve, delta)?;
        if !report.is_clean() {
            report_violations(&format!("delta={}", sig(delta)), &report);
            outcome = Outcome::Violations;
        }
    }
    let text = match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => sweep_csv(&rows),
        Format::Json => to_json(&json!({
            "curve": cfg.curve.to_string(),
            "supply": cfg.supply,
            "steps": cfg.steps,
            "burn_in_fraction": cfg.burn_in_fraction,
            "rows": rows,
        }))?,
    };
    emit(cfg, &text)?;
    if let Some(path) = &cfg.plot {
        let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.delta, r.p_map_hat)).collect();
        write_file(path, &plot::line_chart(&pts, "delta", "p_map_hat"))?;
    }
    Ok(outcome)
}

pub fn bounds(cfg: &RunConfig) -> Result<Outcome> {
    if cfg.format == Some(Format::Csv) {
        bail!("bounds output is JSON only");
    }
    let delta = cfg.scalar_delta()?;
    emit(
        cfg,
        &to_json(&bound_report(&cfg.curve, cfg.supply, delta)?)?,
    )?;
    Ok(Outcome::Clean)
}

#[derive(Debug, Serialize)]
struct CheckResult {
    name: String,
    samples: usize,
    max_residual: f64,
    tolerance: f64,
    passed: bool,
}

impl CheckResult {
    fn new(name: &str, samples: usize, max_residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            samples,
            max_residual,
            tolerance,
            passed: max_residual <= tolerance,
        }
    }
}

/// Residuals of the trajectory checks; zero means the check holds exactly.
fn trajectory_checks(
    traj: &Trajectory,
    kq: &KeyQuantities,
    cfg: &RunConfig,
    delta: f64,
) -> Vec<CheckResult> {
    let cert = Certificate::with_quantities(&cfg.curve, *kq, delta);
    let recs = &traj.records;
    let n = recs.len();
    let mut band: f64 = 0.0;
    let mut mono: f64 = 0.0;
    let mut certificate: f64 = 0.0;
    let mut roots: f64 = 0.0;
    let mut revenue: f64 = 0.0;
    let mut pent_up: f64 = 0.0;
    for (i, r) in recs.iter().enumerate() {
        let p = r.price;
        band = band.max(kq.p_ser - p).max(p - kq.p_mon);
        if i > 0 && (p - kq.p_mon).abs() > MONOTONE_TOL {
            mono = mono.max(p - recs[i - 1].price);
        }
        let t = r.t as u32;
        certificate = certificate.max(-cert.value(t, p));
        roots = roots.max(match cert.forbidden_root(t) {
            Some(root) => root - p,
            None => (p - kq.p_mon).abs(),
        });
        revenue = revenue.max(kq.rev_mon - r.revenue);
        pent_up = pent_up.max(pent_up_residual(&traj.states[i + 1], p));
    }
    vec![
        CheckResult::new("band", n, band.max(0.0), BAND_TOL),
        CheckResult::new(
            "monotone_or_jump",
            n.saturating_sub(1),
            mono.max(0.0),
            MONOTONE_TOL,
        ),
        CheckResult::new("certificate", n, certificate.max(0.0), CERTIFICATE_TOL),
        CheckResult::new("forbidden_interval", n, roots.max(0.0), CERTIFICATE_TOL),
        CheckResult::new("revenue_dominance", n, revenue.max(0.0), BAND_TOL),
        CheckResult::new("pent_up", n, pent_up, BAND_TOL),
    ]
}

pub fn verify(cfg: &RunConfig) -> Result<Outcome> {
    if cfg.format == Some(Format::Csv) {
        bail!("verify output is JSON only");
    }
    let delta = cfg.scalar_delta()?;
    let kq = key_quantities(&cfg.curve, cfg.supply)?;
    let traj = run_with_states(&simulate_config(cfg, delta)?)?;
    let report = validate(&traj.records, &traj.states, &kq, &cfg.curve, delta)?;
    let mut checks = trajectory_checks(&traj, &kq, cfg, delta);
    for lemma in lemma_suite(
        &traj.states,
        &traj.records,
        &cfg.curve,
        delta,
        LEMMA_SAMPLES,
        cfg.seed,
    )? {
        let name = serde_json::to_value(lemma.lemma)?
            .as_str()
            .unwrap_or_default()
            .to_owned();
        checks.push(CheckResult::new(
            &name,
            lemma.samples,
            lemma.max_violation,
            LEMMA_TOL,
        ));
    }
    let passed = report.is_clean() && checks.iter().all(|c| c.passed);
    let visits_after_burn_in = {
        let burn_in = (traj.records.len() as f64 * cfg.burn_in_fraction).floor() as usize;
        traj.records[burn_in..]
            .iter()
            .filter(|r| (r.price - kq.p_mon).abs() <= VISIT_TOL)
            .count()
    };
    let text = to_json(&json!({
        "curve": cfg.curve.to_string(),
        "supply": cfg.supply,
        "delta": delta,
        "steps": cfg.steps,
        "seed": cfg.seed,
        "quantities": kq,
        "checks": checks,
        "validation": report,
        "collapsed": report.collapsed,
        "monopolist_visits_after_burn_in": visits_after_burn_in,
        "passed": passed,
    }))?;
    emit(cfg, &text)?;
    if passed {
        Ok(Outcome::Clean)
    } else {
        for c in checks.iter().filter(|c| !c.passed) {
            eprintln!(
                "{}: max residual {} exceeds {:e}",
                c.name,
                sig(c.max_residual),
                c.tolerance
            );
        }
        if !report.is_clean() {
            report_violations(&format!("delta={}", sig(delta)), &report);
        }
        Ok(Outcome::Violations)
    }
}
