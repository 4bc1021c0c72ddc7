//! The serial-monopoly dynamic.
//!
//! Each round the monopolist faces total demand `D_t(p) = delta * Z_{t-1}(p) + Q(p)`
//! and posts the price maximizing `p * min(s, D_t(p))`. Unserved demand at
//! or below the posted price becomes the pent-up demand `Z_t`, which is kept
//! exactly as a list of segments `Z(p) = alpha * Q(p) - beta`.

use std::sync::Arc;

use serde::Serialize;

use crate::demand::{DemandCurve, LinearPiece};
use crate::error::{Error, Result};
use crate::revenue;

pub const DEFAULT_TIE_TOL: f64 = 1e-12;

/// Geometric pent-up accumulation `1 + delta + ... + delta^(t-1)`.
pub fn accumulation_factor(delta: f64, t: u32) -> f64 {
    if (1.0 - delta).abs() < 1e-12 {
        t as f64
    } else {
        (1.0 - delta.powi(t as i32)) / (1.0 - delta)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub curve: DemandCurve,
    pub supply: f64,
    pub delta: f64,
    pub steps: usize,
    pub tie_tol: f64,
}

impl SimConfig {
    pub fn new(curve: DemandCurve, supply: f64, delta: f64, steps: usize) -> Result<Self> {
        let cfg = Self {
            curve,
            supply,
            delta,
            steps,
            tie_tol: DEFAULT_TIE_TOL,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_tie_tol(mut self, tie_tol: f64) -> Result<Self> {
        self.tie_tol = tie_tol;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.supply.is_finite() && self.supply > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "supply must be positive, got {}",
                self.supply
            )));
        }
        if !(0.0..=1.0).contains(&self.delta) {
            return Err(Error::InvalidConfig(format!(
                "delta must lie in [0, 1], got {}",
                self.delta
            )));
        }
        if self.steps == 0 {
            return Err(Error::InvalidConfig("steps must be at least 1".into()));
        }
        if !(self.tie_tol.is_finite() && self.tie_tol > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "tie tolerance must be positive, got {}",
                self.tie_tol
            )));
        }
        Ok(())
    }
}

/// `Z(p) = alpha * Q(p) - beta` for `p` in `(lo, hi]` (the first segment
/// also covers `p = 0`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepRecord {
    pub t: usize,
    pub price: f64,
    pub quantity: f64,
    pub revenue: f64,
    /// `p_t >= p_{t-1}`; always false in the first round.
    pub jumped: bool,
    pub segments: usize,
}

/// Pent-up demand `Z_{t-1}` ahead of round `t`.
#[derive(Debug, Clone)]
pub struct PentUpState {
    config: Arc<SimConfig>,
    segments: Vec<Segment>,
    last_price: f64,
    t: usize,
    running_min: f64,
}

impl PentUpState {
    pub fn new(config: &SimConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self::from_shared(Arc::new(config.clone())))
    }

    fn from_shared(config: Arc<SimConfig>) -> Self {
        Self {
            config,
            segments: Vec::new(),
            last_price: 0.0,
            t: 1,
            running_min: f64::INFINITY,
        }
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    /// The round this state will play next.
    pub fn round(&self) -> usize {
        self.t
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// `p_{t-1}`, or 0 before the first round.
    pub fn last_price(&self) -> f64 {
        self.last_price
    }

    pub fn running_min(&self) -> f64 {
        self.running_min
    }

    fn segment_at(&self, p: f64) -> Option<&Segment> {
        if self.segments.is_empty() || p > self.last_price {
            return None;
        }
        let idx = self.segments.partition_point(|s| s.hi < p);
        self.segments.get(idx.min(self.segments.len() - 1))
    }

    /// `Z_{t-1}(p)`.
    pub fn pent_up(&self, p: f64) -> f64 {
        match self.segment_at(p) {
            Some(seg) => seg.alpha * self.config.curve.value(p) - seg.beta,
            None => 0.0,
        }
    }

    /// `D_t(p) = delta * Z_{t-1}(p) + Q(p)`.
    pub fn total_demand(&self, p: f64) -> Result<f64> {
        if !(p >= 0.0) {
            return Err(Error::NegativePrice(p));
        }
        Ok(self.demand(p))
    }

    fn demand(&self, p: f64) -> f64 {
        let q = self.config.curve.value(p);
        match self.segment_at(p) {
            Some(seg) => {
                let d = self.config.delta;
                (d * seg.alpha + 1.0) * q - d * seg.beta
            }
            None => q,
        }
    }

    /// `f_t(p) = p * D_t(p) - REV_mon`.
    pub fn revenue_diff(&self, p: f64, rev_mon: f64) -> Result<f64> {
        Ok(p * self.total_demand(p)? - rev_mon)
    }

    /// `D_t` as linear pieces `A - B p` on the common refinement of the
    /// pent-up segments and the curve's knots.
    pub fn demand_pieces(&self) -> Vec<LinearPiece> {
        let curve = &self.config.curve;
        let delta = self.config.delta;
        let end = curve.domain_max().max(self.last_price);

        let mut cuts: Vec<f64> = Vec::with_capacity(self.segments.len() + curve.knots().len() + 1);
        cuts.push(0.0);
        cuts.extend(self.segments.iter().map(|s| s.hi));
        cuts.extend(curve.knots().iter().map(|k| k.price));
        cuts.push(end);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();

        cuts.windows(2)
            .map(|w| {
                let (lo, hi) = (w[0], w[1]);
                let mid = 0.5 * (lo + hi);
                let (qa, qb) = if mid > curve.domain_max() {
                    (0.0, 0.0)
                } else {
                    let pc = curve.piece_at(mid);
                    (pc.intercept, pc.slope)
                };
                let (a, b) = match self.segment_at(mid) {
                    Some(seg) => (delta * seg.alpha + 1.0, delta * seg.beta),
                    None => (1.0, 0.0),
                };
                LinearPiece {
                    lo,
                    hi,
                    intercept: a * qa - b,
                    slope: a * qb,
                }
            })
            .collect()
    }

    /// Plays round `t` and advances the state to `Z_t`.
    pub fn step(&mut self) -> Result<StepRecord> {
        let curve = &self.config.curve;
        if curve.q0() <= 0.0 {
            return Err(Error::NoDemand);
        }
        let pieces = self.demand_pieces();
        let opt = revenue::maximize(&pieces, self.config.supply, self.config.tie_tol)
            .ok_or(Error::NoDemand)?;
        let price = opt.price;
        let quantity = self.demand(price);
        let jumped = self.t > 1 && price >= self.last_price;

        let delta = self.config.delta;
        let mut next: Vec<Segment> = Vec::with_capacity(self.segments.len() + 1);
        for seg in &self.segments {
            if seg.lo >= price {
                break;
            }
            next.push(Segment {
                lo: seg.lo,
                hi: seg.hi.min(price),
                alpha: delta * seg.alpha + 1.0,
                beta: delta * seg.beta + quantity,
            });
        }
        if price > self.last_price {
            next.push(Segment {
                lo: self.last_price,
                hi: price,
                alpha: 1.0,
                beta: quantity,
            });
        }

        let record = StepRecord {
            t: self.t,
            price,
            quantity,
            revenue: price * quantity,
            jumped,
            segments: next.len(),
        };
        self.segments = next;
        self.last_price = price;
        self.running_min = self.running_min.min(price);
        self.t += 1;
        Ok(record)
    }
}

/// A full run: `records[i]` is round `i + 1`, and `states[i]` is the state
/// ahead of that round (so `states` has one more entry than `records`).
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub records: Vec<StepRecord>,
    pub states: Vec<PentUpState>,
}

impl Trajectory {
    pub fn prices(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.price).collect()
    }
}

pub fn run(config: &SimConfig) -> Result<Vec<StepRecord>> {
    let mut state = PentUpState::new(config)?;
    (0..config.steps).map(|_| state.step()).collect()
}

/// Like [`run`], also keeping a snapshot of the state ahead of every round.
pub fn run_with_states(config: &SimConfig) -> Result<Trajectory> {
    let mut state = PentUpState::new(config)?;
    let mut records = Vec::with_capacity(config.steps);
    let mut states = Vec::with_capacity(config.steps + 1);
    for _ in 0..config.steps {
        states.push(state.clone());
        records.push(state.step()?);
    }
    states.push(state);
    Ok(Trajectory { records, states })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example1(delta: f64, steps: usize) -> SimConfig {
        SimConfig::new(DemandCurve::linear(1.0, 1.0).unwrap(), 1.0, delta, steps).unwrap()
    }

    #[test]
    fn accumulation_factor_limits() {
        assert_eq!(accumulation_factor(0.0, 5), 1.0);
        assert_eq!(accumulation_factor(1.0, 7), 7.0);
        assert!((accumulation_factor(0.5, 2) - 1.5).abs() < 1e-15);
        assert!((accumulation_factor(1.0 - 1e-13, 3) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn config_validation() {
        let q = DemandCurve::linear(1.0, 1.0).unwrap();
        assert!(SimConfig::new(q.clone(), 0.0, 0.5, 10).is_err());
        assert!(SimConfig::new(q.clone(), 1.0, 1.5, 10).is_err());
        assert!(SimConfig::new(q.clone(), 1.0, -0.1, 10).is_err());
        assert!(SimConfig::new(q.clone(), 1.0, 0.5, 0).is_err());
        let cfg = SimConfig::new(q, 1.0, 0.5, 1).unwrap();
        assert!(cfg.clone().with_tie_tol(0.0).is_err());
        assert!(cfg.with_tie_tol(1e-9).is_ok());
    }

    #[test]
    fn new_state_has_no_pent_up_demand() {
        let cfg = example1(0.5, 3);
        let st = PentUpState::new(&cfg).unwrap();
        assert_eq!(st.round(), 1);
        assert!(st.segments().is_empty());
        assert_eq!(st.running_min(), f64::INFINITY);
        for i in 0..=20 {
            let p = i as f64 / 20.0;
            assert_eq!(st.pent_up(p), 0.0);
            assert_eq!(st.total_demand(p).unwrap(), cfg.curve.eval(p).unwrap());
        }

        let cfg = SimConfig::new(DemandCurve::q_epsilon(0.1).unwrap(), 1.0, 0.9, 1).unwrap();
        let st = PentUpState::new(&cfg).unwrap();
        assert!((st.total_demand(0.0).unwrap() - 0.6).abs() < 1e-15);
    }

    #[test]
    fn example1_first_rounds() {
        let mut st = PentUpState::new(&example1(0.5, 3)).unwrap();
        let r1 = st.step().unwrap();
        assert_eq!((r1.price, r1.quantity, r1.revenue), (0.5, 0.5, 0.25));
        assert!(!r1.jumped);

        // D_2(0.25) = 1 + delta/2 - (1 + delta) 0.25
        assert!((st.total_demand(0.25).unwrap() - 0.875).abs() < 1e-15);
        assert_eq!(st.total_demand(0.75).unwrap(), 0.25);

        let r2 = st.step().unwrap();
        assert!((r2.price - 5.0 / 12.0).abs() < 1e-15);
        assert!((r2.quantity - 0.625).abs() < 1e-15);

        let r3 = st.step().unwrap();
        assert_eq!(r3.price, 0.5);
        assert!(r3.jumped);
    }

    #[test]
    fn example1_no_jump_at_high_delta() {
        let mut st = PentUpState::new(&example1(0.9, 3)).unwrap();
        st.step().unwrap();
        st.step().unwrap();
        // D_3(0.2) = (2d + d^2 + 4)/4 - (1 + d + d^2) 0.2 at d = 0.9
        assert!((st.total_demand(0.2).unwrap() - 1.1105).abs() < 1e-12);
        let r3 = st.step().unwrap();
        assert!((r3.price - 6.61 / 21.68).abs() < 1e-12);
        assert!(!r3.jumped);
    }

    #[test]
    fn revenue_diff_examples() {
        let mut st = PentUpState::new(&example1(0.5, 3)).unwrap();
        assert_eq!(st.revenue_diff(0.5, 0.25).unwrap(), 0.0);
        st.step().unwrap();
        let f2 = st.revenue_diff(5.0 / 12.0, 0.25).unwrap();
        assert!((f2 - (2.5f64.powi(2) / 24.0 - 0.25)).abs() < 1e-12);
        st.step().unwrap();
        let f3 = st.revenue_diff(0.375, 0.25).unwrap();
        assert!((f3 - (27.5625 / 112.0 - 0.25)).abs() < 1e-12);
        assert!(f3 < 0.0);
    }

    #[test]
    fn pent_up_vanishes_at_last_price() {
        let cfg = example1(0.7, 40);
        let mut st = PentUpState::new(&cfg).unwrap();
        for _ in 0..40 {
            let r = st.step().unwrap();
            assert!(st.pent_up(r.price).abs() < 1e-9);
            for seg in st.segments() {
                assert!(seg.lo < seg.hi);
                assert!(seg.alpha >= 0.0);
            }
            for w in st.segments().windows(2) {
                assert_eq!(w[0].hi, w[1].lo);
            }
            assert_eq!(st.segments().last().unwrap().hi, r.price);
        }
    }

    #[test]
    fn impatient_users_stay_at_monopoly_price() {
        let recs = run(&example1(0.0, 25)).unwrap();
        assert_eq!(recs.len(), 25);
        assert!(recs.iter().all(|r| r.price == 0.5));
    }

    #[test]
    fn patient_users_stay_in_band() {
        let recs = run(&example1(1.0, 200)).unwrap();
        for r in &recs {
            assert!(r.price >= 0.25 - 1e-9 && r.price <= 0.5 + 1e-9, "{r:?}");
        }
    }

    #[test]
    fn no_demand_is_an_error() {
        let flat_zero = DemandCurve::from_points(&[(0.0, 0.0), (1.0, 0.0)]).unwrap();
        let cfg = SimConfig::new(flat_zero, 1.0, 0.5, 3).unwrap();
        assert_eq!(run(&cfg), Err(Error::NoDemand));
    }

    #[test]
    fn trajectory_keeps_one_state_per_round_plus_final() {
        let tr = run_with_states(&example1(0.5, 10)).unwrap();
        assert_eq!(tr.records.len(), 10);
        assert_eq!(tr.states.len(), 11);
        assert_eq!(tr.states[3].round(), 4);
        assert_eq!(tr.records, run(&example1(0.5, 10)).unwrap());
    }
}
