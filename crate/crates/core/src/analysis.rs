//! Trajectory analytics: finite-horizon admission-price estimates, collapse
//! detection, invariant checks and delta sweeps.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{key_quantities, Certificate, KeyQuantities};
use crate::demand::DemandCurve;
use crate::engine::{accumulation_factor, run, PentUpState, SimConfig, StepRecord};
use crate::error::{Error, Result};

pub const MIN_ESTIMATE_ROUNDS: usize = 10;
pub const DEFAULT_BURN_IN: f64 = 0.5;
pub const VISIT_TOL: f64 = 1e-9;
pub const BAND_TOL: f64 = 1e-9;
pub const MONOTONE_TOL: f64 = 1e-12;
pub const CERTIFICATE_TOL: f64 = 1e-9;
pub const LEMMA_TOL: f64 = 1e-9;

/// Tail-minimum estimate of the minimum admission price.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdmissionEstimate {
    pub p_map_hat: f64,
    /// Longest run of rounds in the tail without a price at or below
    /// `p_map_hat` (within [`VISIT_TOL`]), counting the stretches before the
    /// first and after the last such round. A constant trajectory gives 1.
    pub recurrence_gap: usize,
    pub burn_in: usize,
    pub horizon: usize,
}

pub fn estimate_map(trajectory: &[StepRecord], burn_in_fraction: f64) -> Result<AdmissionEstimate> {
    let horizon = trajectory.len();
    if horizon < MIN_ESTIMATE_ROUNDS {
        return Err(Error::TrajectoryTooShort {
            len: horizon,
            min: MIN_ESTIMATE_ROUNDS,
        });
    }
    if !(0.0..1.0).contains(&burn_in_fraction) {
        return Err(Error::InvalidConfig(format!(
            "burn-in fraction must lie in [0, 1), got {burn_in_fraction}"
        )));
    }
    let burn_in = (horizon as f64 * burn_in_fraction).floor() as usize;
    let tail = &trajectory[burn_in..];
    let p_map_hat = tail.iter().map(|r| r.price).fold(f64::INFINITY, f64::min);

    let mut gap = 0;
    let mut run_len = 0;
    for r in tail {
        run_len += 1;
        if r.price <= p_map_hat + VISIT_TOL {
            gap = gap.max(run_len);
            run_len = 0;
        }
    }
    gap = gap.max(run_len + 1).min(tail.len());

    Ok(AdmissionEstimate {
        p_map_hat,
        recurrence_gap: gap,
        burn_in,
        horizon,
    })
}

/// True iff every price sits within `tol` of `p_mon`.
pub fn detect_collapse(trajectory: &[StepRecord], kq: &KeyQuantities, tol: f64) -> bool {
    !trajectory.is_empty() && trajectory.iter().all(|r| (r.price - kq.p_mon).abs() <= tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Violation {
    pub t: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ValidationReport {
    /// Prices outside `[p_ser, p_mon]`.
    pub band_violations: Vec<Violation>,
    /// Rounds that neither decrease the price nor post `p_mon`.
    pub monotonicity_violations: Vec<Violation>,
    /// Rounds whose price has a negative certificate `F_t(p_t)`.
    pub certificate_violations: Vec<Violation>,
    /// Rounds earning less than the monopolist revenue.
    pub revenue_violations: Vec<Violation>,
    /// Rounds whose pent-up demand is negative somewhere or nonzero at the
    /// posted price; `value` is the worst residual.
    pub pent_up_violations: Vec<Violation>,
    pub monopolist_visits: Vec<usize>,
    pub collapsed: bool,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violation_count() == 0
    }

    pub fn violation_count(&self) -> usize {
        self.band_violations.len()
            + self.monotonicity_violations.len()
            + self.certificate_violations.len()
            + self.revenue_violations.len()
            + self.pent_up_violations.len()
    }
}

/// Checks a trajectory against the price band, the monotone-or-jump rule,
/// the certificate, revenue dominance and the pent-up bookkeeping.
///
/// `states` must hold the state ahead of every round plus the final state,
/// as produced by [`crate::engine::run_with_states`]. Pass an empty slice to
/// skip the pent-up checks.
pub fn validate(
    trajectory: &[StepRecord],
    states: &[PentUpState],
    kq: &KeyQuantities,
    curve: &DemandCurve,
    delta: f64,
) -> Result<ValidationReport> {
    if !states.is_empty() && states.len() != trajectory.len() + 1 {
        return Err(Error::LengthMismatch(format!(
            "{} records need {} states, got {}",
            trajectory.len(),
            trajectory.len() + 1,
            states.len()
        )));
    }
    let cert = Certificate::with_quantities(curve, *kq, delta);
    let mut rep = ValidationReport::default();
    let mut prev: Option<f64> = None;

    for (i, r) in trajectory.iter().enumerate() {
        let p = r.price;
        if p < kq.p_ser - BAND_TOL || p > kq.p_mon + BAND_TOL {
            rep.band_violations.push(Violation { t: r.t, value: p });
        }
        if let Some(before) = prev {
            let decreased = p < before + MONOTONE_TOL;
            let at_mon = (p - kq.p_mon).abs() <= MONOTONE_TOL;
            if !decreased && !at_mon {
                rep.monotonicity_violations
                    .push(Violation { t: r.t, value: p });
            }
        }
        let f = cert.value(r.t as u32, p);
        if f < -CERTIFICATE_TOL {
            rep.certificate_violations
                .push(Violation { t: r.t, value: f });
        }
        if r.revenue < kq.rev_mon - BAND_TOL {
            rep.revenue_violations.push(Violation {
                t: r.t,
                value: r.revenue,
            });
        }
        if (p - kq.p_mon).abs() <= VISIT_TOL {
            rep.monopolist_visits.push(r.t);
        }
        if let Some(after) = states.get(i + 1) {
            let worst = pent_up_residual(after, p);
            if worst > BAND_TOL {
                rep.pent_up_violations.push(Violation {
                    t: r.t,
                    value: worst,
                });
            }
        }
        prev = Some(p);
    }
    rep.collapsed = detect_collapse(trajectory, kq, VISIT_TOL);
    Ok(rep)
}

/// Largest of `|Z(p_t)|`, the negative part of `Z` at segment ends, and the
/// jump of `Z` across internal segment boundaries.
pub fn pent_up_residual(state: &PentUpState, price: f64) -> f64 {
    let curve = &state.config().curve;
    let mut worst = state.pent_up(price).abs();
    let segs = state.segments();
    for seg in segs {
        for p in [seg.lo, seg.hi] {
            let z = seg.alpha * curve.value(p) - seg.beta;
            worst = worst.max(-z);
        }
    }
    if curve.is_continuous() {
        for w in segs.windows(2) {
            let p = w[0].hi;
            let q = curve.value(p);
            let left = w[0].alpha * q - w[0].beta;
            let right = w[1].alpha * q - w[1].beta;
            worst = worst.max((left - right).abs());
        }
    }
    worst
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LemmaId {
    /// `D_t(p) - D_t(p') <= a_t (Q(p) - Q(p'))` for `p < p'`.
    DemandDifferenceBound,
    /// Equality `D_t(p) - D_t(p') = a_{t-T} (Q(p) - Q(p'))` when
    /// `p_T <= p < p'` and every price strictly between rounds `T` and `t`
    /// is at least `p'`.
    DemandDifferenceEquality,
    /// `D_t(p) = a_t Q(p) - b_t` below every earlier price.
    AccumulatedForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LemmaCheck {
    pub lemma: LemmaId,
    pub samples: usize,
    pub max_violation: f64,
}

impl LemmaCheck {
    pub fn passed(&self) -> bool {
        self.max_violation <= LEMMA_TOL
    }
}

/// Samples `(p, p', t)` triples and reports the worst violation of each
/// pent-up demand identity. `states[t - 1]` must be the state ahead of
/// round `t` and `trajectory[t - 1]` its record.
pub fn lemma_suite(
    states: &[PentUpState],
    trajectory: &[StepRecord],
    curve: &DemandCurve,
    delta: f64,
    sample_count: usize,
    seed: u64,
) -> Result<Vec<LemmaCheck>> {
    let rounds = trajectory.len();
    if states.len() < rounds {
        return Err(Error::LengthMismatch(format!(
            "{rounds} records need at least {rounds} states, got {}",
            states.len()
        )));
    }
    if rounds == 0 || sample_count == 0 {
        return Err(Error::InvalidConfig(
            "lemma suite needs a nonempty trajectory and sample_count >= 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let top = curve.domain_max();
    let prices: Vec<f64> = trajectory.iter().map(|r| r.price).collect();
    let demand = |t: usize, p: f64| states[t - 1].total_demand(p).expect("p >= 0");
    let q = |p: f64| curve.value(p);

    let mut bound = LemmaCheck {
        lemma: LemmaId::DemandDifferenceBound,
        samples: 0,
        max_violation: 0.0,
    };
    let mut equality = LemmaCheck {
        lemma: LemmaId::DemandDifferenceEquality,
        samples: 0,
        max_violation: 0.0,
    };
    let mut accumulated = LemmaCheck {
        lemma: LemmaId::AccumulatedForm,
        samples: 0,
        max_violation: 0.0,
    };

    // b_t = q_1 delta^(t-1) + ... + q_{t-1} delta, built from the records
    // rather than the pent-up segments.
    let mut b = vec![0.0; rounds + 1];
    for t in 2..=rounds {
        b[t] = delta * (b[t - 1] + trajectory[t - 2].quantity);
    }
    let mut running_min = vec![f64::INFINITY; rounds + 1];
    for t in 2..=rounds {
        running_min[t] = running_min[t - 1].min(prices[t - 2]);
    }

    for _ in 0..sample_count {
        let t = rng.gen_range(1..=rounds);
        let (x, y) = (rng.gen_range(0.0..=top), rng.gen_range(0.0..=top));
        let (p, pp) = if x <= y { (x, y) } else { (y, x) };
        let a = accumulation_factor(delta, t as u32);
        let lhs = demand(t, p) - demand(t, pp);
        let rhs = a * (q(p) - q(pp));
        bound.max_violation = bound.max_violation.max(lhs - rhs);
        bound.samples += 1;

        // Equality case: pick T, then draw p < p' inside the admissible window.
        let big_t = rng.gen_range(0..t);
        let floor = if big_t == 0 { 0.0 } else { prices[big_t - 1] };
        let ceiling = prices[big_t..t - 1].iter().copied().fold(top, f64::min);
        if floor < ceiling {
            let (x, y) = (
                rng.gen_range(floor..=ceiling),
                rng.gen_range(floor..=ceiling),
            );
            let (p, pp) = if x <= y { (x, y) } else { (y, x) };
            if p < pp {
                let a = accumulation_factor(delta, (t - big_t) as u32);
                let lhs = demand(t, p) - demand(t, pp);
                let rhs = a * (q(p) - q(pp));
                equality.max_violation = equality.max_violation.max((lhs - rhs).abs());
                equality.samples += 1;
            }
        }

        let limit = running_min[t].min(top);
        let p = rng.gen_range(0.0..=limit);
        let a = accumulation_factor(delta, t as u32);
        let resid = (demand(t, p) - (a * q(p) - b[t])).abs();
        accumulated.max_violation = accumulated.max_violation.max(resid);
        accumulated.samples += 1;
    }

    Ok(vec![bound, equality, accumulated])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub delta: f64,
    pub p_map_hat: f64,
    pub recurrence_gap: usize,
    pub collapsed: bool,
    /// Rounds after burn-in that post `p_mon`.
    pub monopolist_visits: usize,
}

/// One simulation per `delta`, rows in grid order. Rows are computed in
/// parallel; the output does not depend on scheduling.
pub fn delta_sweep(
    curve: &DemandCurve,
    supply: f64,
    delta_grid: &[f64],
    steps: usize,
    burn_in_fraction: f64,
    tie_tol: f64,
) -> Result<Vec<SweepRow>> {
    if delta_grid.is_empty() {
        return Err(Error::InvalidConfig("delta grid is empty".into()));
    }
    let kq = key_quantities(curve, supply)?;
    delta_grid
        .par_iter()
        .map(|&delta| {
            let cfg = SimConfig::new(curve.clone(), supply, delta, steps)?.with_tie_tol(tie_tol)?;
            let recs = run(&cfg)?;
            let est = estimate_map(&recs, burn_in_fraction)?;
            let visits = recs[est.burn_in..]
                .iter()
                .filter(|r| (r.price - kq.p_mon).abs() <= VISIT_TOL)
                .count();
            Ok(SweepRow {
                delta,
                p_map_hat: est.p_map_hat,
                recurrence_gap: est.recurrence_gap,
                collapsed: detect_collapse(&recs, &kq, VISIT_TOL),
                monopolist_visits: visits,
            })
        })
        .collect()
}

/// `count` evenly spaced points from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        n => (0..n)
            .map(|i| {
                if i == n - 1 {
                    stop
                } else {
                    start + (stop - start) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}
