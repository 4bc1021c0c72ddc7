//! Run configuration: an optional JSON file merged with command-line flags.
//! Flags win over the file.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use serde::Deserialize;
use smlab_core::demand::DemandCurve;
use smlab_core::engine::DEFAULT_TIE_TOL;

pub const DEFAULT_STEPS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Linear,
    #[value(name = "q_epsilon")]
    QEpsilon,
    #[value(name = "q_zero")]
    QZero,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum DeltaSpec {
    Scalar(f64),
    Grid(GridSpec),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemandSpec {
    pub family: Option<Family>,
    pub c: Option<f64>,
    pub m: Option<f64>,
    pub epsilon: Option<f64>,
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

/// The JSON config file. Every field is optional; missing ones fall back to
/// flags or defaults.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfigFile {
    pub demand: Option<DemandSpec>,
    pub s: Option<f64>,
    pub delta: Option<DeltaSpec>,
    pub steps: Option<usize>,
    pub seed: Option<u64>,
    pub burn_in_fraction: Option<f64>,
    pub output: Option<OutputSpec>,
}

impl RunConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg: Self = serde_json::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        // Curve files are relative to the config file.
        if let Some(p) = cfg.demand.as_mut().and_then(|d| d.path.as_mut()) {
            if p.is_relative() {
                if let Some(dir) = path.parent() {
                    *p = dir.join(&*p);
                }
            }
        }
        Ok(cfg)
    }
}

fn parse_grid(s: &str) -> Result<GridSpec, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts[..] else {
        return Err(format!("expected START:STOP:COUNT, got {s:?}"));
    };
    let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
    Ok(GridSpec {
        start: num(a)?,
        stop: num(b)?,
        count: n.trim().parse().map_err(|e| format!("{n:?}: {e}"))?,
    })
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// JSON run configuration; flags override its fields.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Demand family.
    #[arg(long, value_enum, value_name = "FAMILY")]
    pub demand: Option<Family>,
    #[arg(long, value_name = "X")]
    pub epsilon: Option<f64>,
    /// Linear demand intercept: Q(p) = c - m p.
    #[arg(long, value_name = "X")]
    pub c: Option<f64>,
    /// Linear demand slope.
    #[arg(long, value_name = "X")]
    pub m: Option<f64>,
    /// Two-column price,quantity file for the custom family.
    #[arg(long, value_name = "PATH")]
    pub curve_file: Option<PathBuf>,
    /// Per-round supply s.
    #[arg(long, value_name = "S")]
    pub supply: Option<f64>,
    /// Patience factor.
    #[arg(long, value_name = "D", conflicts_with = "delta_grid")]
    pub delta: Option<f64>,
    /// Evenly spaced patience grid, endpoints included.
    #[arg(long, value_name = "A:B:N", value_parser = parse_grid)]
    pub delta_grid: Option<GridSpec>,
    #[arg(long, value_name = "T")]
    pub steps: Option<usize>,
    #[arg(long, value_name = "N")]
    pub seed: Option<u64>,
    /// Fraction of rounds dropped before the tail statistics.
    #[arg(long, value_name = "F")]
    pub burn_in_fraction: Option<f64>,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Also write an SVG chart to PATH.
    #[arg(long, value_name = "PATH")]
    pub plot: Option<PathBuf>,
    /// Revenue tolerance for breaking ties toward the larger price.
    #[arg(long, env = "SMLAB_TIE_TOL", value_name = "X", hide = true)]
    pub tie_tol: Option<f64>,
}

/// A fully resolved configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub curve: DemandCurve,
    pub supply: f64,
    pub delta: Option<DeltaSpec>,
    pub steps: usize,
    pub seed: u64,
    pub burn_in_fraction: f64,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub plot: Option<PathBuf>,
    pub tie_tol: f64,
}

impl RunConfig {
    pub fn resolve(args: &CommonArgs) -> Result<Self> {
        let file = match &args.config {
            Some(p) => RunConfigFile::load(p)?,
            None => RunConfigFile::default(),
        };
        let demand = file.demand.unwrap_or_default();
        let family = args.demand.or(demand.family).unwrap_or(Family::Linear);
        let curve = match family {
            Family::Linear => DemandCurve::linear(
                args.c.or(demand.c).unwrap_or(1.0),
                args.m.or(demand.m).unwrap_or(1.0),
            )?,
            Family::QEpsilon => {
                let eps = args
                    .epsilon
                    .or(demand.epsilon)
                    .context("the q_epsilon family needs an epsilon")?;
                DemandCurve::q_epsilon(eps)?
            }
            Family::QZero => DemandCurve::q_zero(),
            Family::Custom => {
                let path = args
                    .curve_file
                    .clone()
                    .or(demand.path)
                    .context("the custom family needs a curve file")?;
                let text = fs::read_to_string(&path)
                    .with_context(|| format!("reading curve {}", path.display()))?;
                DemandCurve::parse(&text)
                    .with_context(|| format!("parsing curve {}", path.display()))?
            }
        };

        let supply = args.supply.or(file.s).unwrap_or(1.0);
        if !(supply.is_finite() && supply > 0.0) {
            bail!("supply must be positive, got {supply}");
        }
        let delta = match (args.delta, args.delta_grid) {
            (Some(d), _) => Some(DeltaSpec::Scalar(d)),
            (None, Some(g)) => Some(DeltaSpec::Grid(g)),
            (None, None) => file.delta,
        };
        match delta {
            Some(DeltaSpec::Scalar(d)) => check_delta(d)?,
            Some(DeltaSpec::Grid(g)) => {
                check_delta(g.start)?;
                check_delta(g.stop)?;
                if g.count == 0 {
                    bail!("delta grid needs at least one point");
                }
            }
            None => {}
        }
        let steps = args.steps.or(file.steps).unwrap_or(DEFAULT_STEPS);
        if steps == 0 {
            bail!("steps must be at least 1");
        }
        let burn_in_fraction = args
            .burn_in_fraction
            .or(file.burn_in_fraction)
            .unwrap_or(smlab_core::analysis::DEFAULT_BURN_IN);
        if !(0.0..1.0).contains(&burn_in_fraction) {
            bail!("burn_in_fraction must lie in [0, 1), got {burn_in_fraction}");
        }
        let tie_tol = args.tie_tol.unwrap_or(DEFAULT_TIE_TOL);
        if !(tie_tol.is_finite() && tie_tol >= 0.0) {
            bail!("tie tolerance must be non-negative, got {tie_tol}");
        }
        let output = file.output.unwrap_or_default();
        Ok(Self {
            curve,
            supply,
            delta,
            steps,
            seed: args.seed.or(file.seed).unwrap_or(0),
            burn_in_fraction,
            out: args.out.clone().or(output.path),
            format: args.format.or(output.format),
            plot: args.plot.clone(),
            tie_tol,
        })
    }

    pub fn scalar_delta(&self) -> Result<f64> {
        match self.delta {
            Some(DeltaSpec::Scalar(d)) => Ok(d),
            Some(DeltaSpec::Grid(_)) => bail!("this command needs a single delta, not a grid"),
            None => bail!("no delta given (use --delta or the config file)"),
        }
    }

    /// The sweep grid; a scalar delta is a one-point grid.
    pub fn delta_grid(&self) -> Result<Vec<f64>> {
        match self.delta {
            Some(DeltaSpec::Scalar(d)) => Ok(vec![d]),
            Some(DeltaSpec::Grid(g)) => {
                Ok(smlab_core::analysis::linspace(g.start, g.stop, g.count))
            }
            None => bail!("no delta grid given (use --delta-grid or the config file)"),
        }
    }
}

fn check_delta(d: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&d) {
        bail!("delta must lie in [0, 1], got {d}");
    }
    Ok(())
}
