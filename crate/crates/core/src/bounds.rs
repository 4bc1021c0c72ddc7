//! Analytic quantities and bounds on the minimum admission price.
//!
//! Upper bound: for `delta > delta_bar_ser` the minimum admission price is at
//! most `p_ser^delta`, the largest price with `Q(p) = q_ser - (1 - delta) s`.
//!
//! Lower bounds come from the certificate
//! `F_t(p) = p (a_t Q(p) - (a_t - 1) q_mon) - p_mon q_mon`: no round `t` can
//! post a price where `F_t` is negative.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::demand::{CurveFamily, DemandCurve, DEFAULT_TOL};
use crate::engine::{accumulation_factor, DEFAULT_TIE_TOL};
use crate::error::{Error, Result};
use crate::revenue;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KeyQuantities {
    pub supply: f64,
    pub p_mon: f64,
    pub q_mon: f64,
    pub rev_mon: f64,
    pub p_ser: f64,
    pub q_ser: f64,
    pub p_bar_ser: f64,
    pub q_bar_ser: f64,
    pub delta_bar_ser: f64,
    /// The curve has flat stretches or steps.
    pub weakly_decreasing: bool,
    /// For weakly decreasing curves, the largest price with `Q(p) = q_ser`;
    /// the serial floor moves up to this price when `Q` is flat at `p_ser`.
    pub p_ser_flat_adjusted: Option<f64>,
}

pub fn key_quantities(curve: &DemandCurve, supply: f64) -> Result<KeyQuantities> {
    if !(supply.is_finite() && supply > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "supply must be positive, got {supply}"
        )));
    }
    if curve.q0() <= 0.0 {
        return Err(Error::NoDemand);
    }
    let opt = revenue::maximize(curve.pieces(), supply, DEFAULT_TIE_TOL).ok_or(Error::NoDemand)?;
    let p_mon = opt.price;
    let q_mon = curve.value(p_mon);
    let rev_mon = p_mon * q_mon;
    let p_ser = rev_mon / supply;
    let q_ser = curve.value(p_ser);
    if q_ser <= 0.0 {
        return Err(Error::InvalidCurve(format!(
            "degenerate curve: Q(p_ser) = 0 at p_ser = {p_ser}"
        )));
    }
    let p_bar_ser = p_ser * supply / q_ser;
    let q_bar_ser = curve.value(p_bar_ser);
    let delta_bar_ser = 1.0 - (q_ser - q_bar_ser) / supply;
    let weakly_decreasing = !curve.is_strict();
    let p_ser_flat_adjusted = if weakly_decreasing {
        Some(curve.inverse_max_price(q_ser)?)
    } else {
        None
    };
    Ok(KeyQuantities {
        supply,
        p_mon,
        q_mon,
        rev_mon,
        p_ser,
        q_ser,
        p_bar_ser,
        q_bar_ser,
        delta_bar_ser,
        weakly_decreasing,
        p_ser_flat_adjusted,
    })
}

impl KeyQuantities {
    /// The price with `Q(p) = q_ser - (1 - delta) s`, defined for
    /// `delta > delta_bar_ser`.
    pub fn p_ser_delta(&self, curve: &DemandCurve, delta: f64) -> Result<f64> {
        if !(delta <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "delta must be <= 1, got {delta}"
            )));
        }
        if delta <= self.delta_bar_ser {
            return Err(Error::NotApplicable("delta ≤ delta_bar_ser".into()));
        }
        curve.inverse_max_price(self.q_ser - (1.0 - delta) * self.supply)
    }

    /// `1 - (Q(p_ser) - Q(p_star)) / s` for `p_star > p_ser`.
    pub fn delta_min(&self, curve: &DemandCurve, p_star: f64) -> Result<f64> {
        if !(p_star > self.p_ser) {
            return Err(Error::NotApplicable(format!(
                "p_star = {p_star} must exceed p_ser = {}",
                self.p_ser
            )));
        }
        Ok(1.0 - (self.q_ser - curve.value(p_star)) / self.supply)
    }
}

pub fn p_ser_delta(curve: &DemandCurve, supply: f64, delta: f64) -> Result<f64> {
    key_quantities(curve, supply)?.p_ser_delta(curve, delta)
}

pub fn delta_min(curve: &DemandCurve, supply: f64, p_star: f64) -> Result<f64> {
    key_quantities(curve, supply)?.delta_min(curve, p_star)
}

/// The commonly quoted closed form `1/4 + (1 - delta)/eps` for the `Q_eps`
/// family, with `Q(p) = 1 - p` read as `eps = 1/2`. It disagrees
/// with the root of `Q(p) = q_ser - (1 - delta) s`, which is
/// `1/4 + (1 - delta)/(2 eps)`; reports carry it for cross-reference only.
pub fn stated_p_ser_delta(family: CurveFamily, delta: f64) -> Option<f64> {
    let eps = match family {
        CurveFamily::QEpsilon { epsilon } => epsilon,
        CurveFamily::Linear { c, m } if c == 1.0 && m == 1.0 => 0.5,
        _ => return None,
    };
    Some(0.25 + (1.0 - delta) / eps)
}

/// The certificate `F_t` for one `(curve, s, delta)`.
#[derive(Debug, Clone)]
pub struct Certificate<'a> {
    curve: &'a DemandCurve,
    kq: KeyQuantities,
    delta: f64,
}

impl<'a> Certificate<'a> {
    pub fn new(curve: &'a DemandCurve, supply: f64, delta: f64) -> Result<Self> {
        Ok(Self::with_quantities(
            curve,
            key_quantities(curve, supply)?,
            delta,
        ))
    }

    pub fn with_quantities(curve: &'a DemandCurve, kq: KeyQuantities, delta: f64) -> Self {
        Self { curve, kq, delta }
    }

    pub fn quantities(&self) -> &KeyQuantities {
        &self.kq
    }

    /// `F_t(p)`.
    pub fn value(&self, t: u32, p: f64) -> f64 {
        let a = accumulation_factor(self.delta, t);
        p * (a * self.curve.value(p) - (a - 1.0) * self.kq.q_mon) - self.kq.rev_mon
    }

    /// The smallest root `p*_t` of `F_t` below `p_mon`; `F_t < 0` on
    /// `[0, p*_t)`, so no price there can be posted in round `t`.
    ///
    /// `None` means `F_t` stays negative on all of `[0, p_mon)`: round `t`
    /// must post `p_mon`.
    pub fn forbidden_root(&self, t: u32) -> Option<f64> {
        let a = accumulation_factor(self.delta, t);
        let p_mon = self.kq.p_mon;
        let c0 = -self.kq.rev_mon;
        for pc in self.curve.pieces() {
            if pc.lo >= p_mon {
                break;
            }
            let hi = pc.hi.min(p_mon);
            // F = c2 p^2 + c1 p + c0 on this piece, c2 <= 0.
            let c2 = -a * pc.slope;
            let c1 = a * pc.intercept - (a - 1.0) * self.kq.q_mon;
            let root = smallest_root_in(c2, c1, c0, pc.lo, hi);
            if let Some(r) = root {
                return (r < p_mon - DEFAULT_TOL).then_some(r);
            }
        }
        None
    }

    /// `(p*_t, p_mon)` when a root exists below `p_mon`.
    pub fn forbidden_interval(&self, t: u32) -> Option<(f64, f64)> {
        self.forbidden_root(t).map(|r| (r, self.kq.p_mon))
    }
}

pub fn certificate_value(
    curve: &DemandCurve,
    supply: f64,
    delta: f64,
    t: u32,
    p: f64,
) -> Result<f64> {
    Ok(Certificate::new(curve, supply, delta)?.value(t, p))
}

pub fn forbidden_interval(
    curve: &DemandCurve,
    supply: f64,
    delta: f64,
    t: u32,
) -> Result<Option<(f64, f64)>> {
    Ok(Certificate::new(curve, supply, delta)?.forbidden_interval(t))
}

/// Smallest `p` in `(lo, hi]` with `c2 p^2 + c1 p + c0 >= 0`, given the
/// quadratic is negative just right of `lo` and `c2 <= 0`.
fn smallest_root_in(c2: f64, c1: f64, c0: f64, lo: f64, hi: f64) -> Option<f64> {
    let in_range = |r: f64| r > lo && r <= hi;
    if c2 == 0.0 {
        if c1 > 0.0 {
            let r = -c0 / c1;
            return in_range(r).then_some(r);
        }
        return None;
    }
    let disc = c1 * c1 - 4.0 * c2 * c0;
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    let q = -0.5 * (c1 + c1.signum() * sq);
    let (mut r1, mut r2) = if q == 0.0 {
        (0.0, 0.0)
    } else {
        (q / c2, c0 / q)
    };
    if r1 > r2 {
        std::mem::swap(&mut r1, &mut r2);
    }
    [r1, r2].into_iter().find(|&r| in_range(r))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LowerBoundSource {
    Linear,
    QEpsilon,
    GeneralQ,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LowerBound {
    pub value: f64,
    pub source: LowerBoundSource,
}

/// The `t -> infinity` limit of the forbidden-interval root for the given
/// bound family.
pub fn asymptotic_admission_lb(
    curve: &DemandCurve,
    supply: f64,
    delta: f64,
    source: LowerBoundSource,
) -> Result<f64> {
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::NotApplicable("delta must lie in [0, 1)".into()));
    }
    match source {
        LowerBoundSource::Linear => {
            let CurveFamily::Linear { c, m } = curve.family() else {
                return Err(Error::NotApplicable("curve is not linear".into()));
            };
            // Rescale to 1 - p: prices by c/m, quantities by c.
            if supply < 0.5 * c {
                return Err(Error::NotApplicable("supply < c/2".into()));
            }
            Ok(c / m * (1.0 - delta) / 2.0)
        }
        LowerBoundSource::QEpsilon => {
            let CurveFamily::QEpsilon { epsilon } = curve.family() else {
                return Err(Error::NotApplicable(
                    "curve is not a q_epsilon curve".into(),
                ));
            };
            if epsilon < 0.5 {
                return Err(Error::NotApplicable("epsilon < 1/2".into()));
            }
            if supply < 0.5 {
                return Err(Error::NotApplicable("supply < 1/2".into()));
            }
            Ok((1.0 - delta) / (4.0 * epsilon))
        }
        LowerBoundSource::GeneralQ => {
            let kq = key_quantities(curve, supply)?;
            let q0 = curve.q0();
            if q0 > supply + delta * (kq.q_mon - supply) {
                return Err(Error::NotApplicable("Q(0) > s + delta (q_mon - s)".into()));
            }
            Ok(kq.rev_mon / ((q0 - delta * kq.q_mon) / (1.0 - delta)))
        }
    }
}

/// `true` iff the dynamic on `Q_eps` is predicted to sit at `p_mon` forever:
/// `eps < (1 - delta)/2`, or the flat curve `eps = 0` for any `delta`.
pub fn collapse_predicted(epsilon: f64, delta: f64) -> Result<bool> {
    if !(epsilon >= 0.0) {
        return Err(Error::NotApplicable(format!(
            "epsilon must be >= 0, got {epsilon}"
        )));
    }
    if epsilon == 0.0 && (0.0..=1.0).contains(&delta) {
        return Ok(true);
    }
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::NotApplicable(format!(
            "delta must lie in [0, 1), got {delta}"
        )));
    }
    Ok(epsilon < (1.0 - delta) / 2.0)
}

/// `(1 - 2 eps, 1 - eps/2 + eps^2/(1 + eps))`: below the first the `Q_eps`
/// dynamic collapses to `p_mon`, above the second the upper bound applies.
pub fn tightness_thresholds(epsilon: f64) -> Result<(f64, f64)> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::NotApplicable(format!(
            "epsilon must lie in (0, 1/2), got {epsilon}"
        )));
    }
    Ok((
        1.0 - 2.0 * epsilon,
        1.0 - epsilon / 2.0 + epsilon * epsilon / (1.0 + epsilon),
    ))
}

/// Every bound that applies to one `(curve, s, delta)`. Missing values are
/// explained in `reasons`, keyed by field name.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub curve: String,
    #[serde(flatten)]
    pub kq: KeyQuantities,
    pub delta: f64,
    pub upper_bound: Option<f64>,
    pub upper_bound_stated_form: Option<f64>,
    pub asymptotic_lower: Option<f64>,
    pub asymptotic_lower_source: Option<LowerBoundSource>,
    pub collapse_predicted: Option<bool>,
    pub tightness_lower: Option<f64>,
    pub tightness_upper: Option<f64>,
    pub reasons: BTreeMap<String, String>,
}

impl BoundReport {
    pub fn tightness(&self) -> Option<(f64, f64)> {
        self.tightness_lower.zip(self.tightness_upper)
    }
}

pub fn bound_report(curve: &DemandCurve, supply: f64, delta: f64) -> Result<BoundReport> {
    let kq = key_quantities(curve, supply)?;
    let mut reasons = BTreeMap::new();
    let mut why = |field: &str, err: Error| {
        let msg = match err {
            Error::NotApplicable(m) => m,
            other => other.to_string(),
        };
        reasons.insert(field.to_string(), msg);
    };

    let upper_bound = match kq.p_ser_delta(curve, delta) {
        Ok(v) => Some(v),
        Err(e) => {
            why("upper_bound", e);
            None
        }
    };
    let upper_bound_stated_form = stated_p_ser_delta(curve.family(), delta);
    if upper_bound_stated_form.is_none() {
        why(
            "upper_bound_stated_form",
            Error::NotApplicable("only stated for q_epsilon and 1 - p".into()),
        );
    }

    let mut best: Option<LowerBound> = None;
    let mut failures = Vec::new();
    for source in [
        LowerBoundSource::Linear,
        LowerBoundSource::QEpsilon,
        LowerBoundSource::GeneralQ,
    ] {
        match asymptotic_admission_lb(curve, supply, delta, source) {
            Ok(value) => {
                if best.is_none_or(|b| value > b.value) {
                    best = Some(LowerBound { value, source });
                }
            }
            Err(e) => failures.push(format!("{source:?}: {}", reason_text(e))),
        }
    }
    if best.is_none() {
        why(
            "asymptotic_lower",
            Error::NotApplicable(failures.join("; ")),
        );
    }

    // 1 - p is the member eps = 1/2 of the q_epsilon family.
    let epsilon = match curve.family() {
        CurveFamily::Linear { c, m } if c == 1.0 && m == 1.0 => Some(0.5),
        family => family.epsilon(),
    };
    let collapse = match epsilon {
        Some(eps) => match collapse_predicted(eps, delta) {
            Ok(c) => Some(c),
            Err(e) => {
                why("collapse_predicted", e);
                None
            }
        },
        None => {
            why(
                "collapse_predicted",
                Error::NotApplicable("only defined for q_epsilon curves".into()),
            );
            None
        }
    };

    let tightness = match epsilon {
        Some(eps) => match tightness_thresholds(eps) {
            Ok(t) => Some(t),
            Err(e) => {
                why("tightness", e);
                None
            }
        },
        None => {
            why(
                "tightness",
                Error::NotApplicable("only defined for q_epsilon curves".into()),
            );
            None
        }
    };

    Ok(BoundReport {
        curve: curve.to_string(),
        kq,
        delta,
        upper_bound,
        upper_bound_stated_form,
        asymptotic_lower: best.map(|b| b.value),
        asymptotic_lower_source: best.map(|b| b.source),
        collapse_predicted: collapse,
        tightness_lower: tightness.map(|t| t.0),
        tightness_upper: tightness.map(|t| t.1),
        reasons,
    })
}

fn reason_text(e: Error) -> String {
    match e {
        Error::NotApplicable(m) => m,
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line() -> DemandCurve {
        DemandCurve::linear(1.0, 1.0).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn key_quantities_for_one_minus_p() {
        let kq = key_quantities(&line(), 1.0).unwrap();
        assert_eq!(kq.p_mon, 0.5);
        assert_eq!(kq.q_mon, 0.5);
        assert_eq!(kq.p_ser, 0.25);
        assert_eq!(kq.q_ser, 0.75);
        assert!(close(kq.p_bar_ser, 1.0 / 3.0, 1e-15));
        assert!(close(kq.delta_bar_ser, 11.0 / 12.0, 1e-15));
        assert!(!kq.weakly_decreasing);
        assert_eq!(kq.p_ser_flat_adjusted, None);
    }

    #[test]
    fn capacity_never_binds_when_supply_covers_demand() {
        let kq = key_quantities(&line(), 5.0).unwrap();
        assert_eq!(kq.p_mon, 0.5);
        let kq = key_quantities(&line(), 10.0).unwrap();
        assert!(close(kq.p_ser, 0.025, 1e-15));
    }

    #[test]
    fn flat_curve_adjusts_serial_floor() {
        let kq = key_quantities(&DemandCurve::q_zero(), 1.0).unwrap();
        assert!(kq.weakly_decreasing);
        assert_eq!(kq.p_mon, 0.5);
        assert_eq!(kq.p_bar_ser, 0.5);
        assert_eq!(kq.p_ser_flat_adjusted, Some(0.5));
    }

    #[test]
    fn degenerate_curve_rejected() {
        let zero = DemandCurve::from_points(&[(0.0, 0.0), (1.0, 0.0)]).unwrap();
        assert_eq!(key_quantities(&zero, 1.0), Err(Error::NoDemand));
        assert!(key_quantities(&line(), 0.0).is_err());
    }

    #[test]
    fn p_ser_delta_examples() {
        assert!(close(p_ser_delta(&line(), 1.0, 0.95).unwrap(), 0.30, 1e-12));
        let near_one = p_ser_delta(&line(), 1.0, 1.0 - 1e-9).unwrap();
        assert!(close(near_one, 0.25, 1e-8));
        let q = DemandCurve::q_epsilon(0.2).unwrap();
        assert!(close(p_ser_delta(&q, 1.0, 0.97).unwrap(), 0.325, 1e-12));
        assert!(matches!(
            p_ser_delta(&line(), 1.0, 0.5),
            Err(Error::NotApplicable(_))
        ));
    }

    #[test]
    fn stated_form_differs_from_root() {
        assert!(close(
            stated_p_ser_delta(line().family(), 0.95).unwrap(),
            0.35,
            1e-12
        ));
        assert_eq!(stated_p_ser_delta(CurveFamily::Custom, 0.95), None);
    }

    #[test]
    fn delta_min_examples() {
        let kq = key_quantities(&line(), 1.0).unwrap();
        assert!(close(
            kq.delta_min(&line(), 1.0 / 3.0).unwrap(),
            11.0 / 12.0,
            1e-12
        ));
        assert!(close(
            kq.delta_min(&line(), 0.25 + 1e-12).unwrap(),
            1.0,
            1e-11
        ));
        assert!(kq.delta_min(&line(), 0.25).is_err());

        let q = DemandCurve::q_epsilon(0.2).unwrap();
        assert!(close(delta_min(&q, 1.0, 0.4).unwrap(), 0.94, 1e-12));
    }

    #[test]
    fn certificate_examples() {
        let q = line();
        let c = Certificate::new(&q, 1.0, 0.5).unwrap();
        assert!(close(c.value(2, 0.3), -0.01, 1e-15));
        for t in 1..50 {
            assert!(c.value(t, 0.5).abs() < 1e-12);
        }
        assert!(c.value(10_000, 0.24) < 0.0);
    }

    #[test]
    fn forbidden_roots_match_closed_forms() {
        let lin = line();
        for &delta in &[0.2, 0.5, 0.9] {
            let c = Certificate::new(&lin, 1.0, delta).unwrap();
            for t in 2..30u32 {
                let want = (1.0 - delta) / (2.0 * (1.0 - delta.powi(t as i32)));
                let got = c.forbidden_root(t).unwrap();
                assert!(
                    close(got, want, 1e-12),
                    "delta {delta} t {t}: {got} vs {want}"
                );
            }
            // A single round forbids everything but p_mon.
            assert_eq!(c.forbidden_root(1), None);
        }
        let c = Certificate::new(&lin, 1.0, 0.5).unwrap();
        assert!(close(c.forbidden_root(2).unwrap(), 1.0 / 3.0, 1e-15));

        let eps = 0.3;
        let q = DemandCurve::q_epsilon(eps).unwrap();
        let c = Certificate::new(&q, 1.0, 0.8).unwrap();
        for t in 1..40u32 {
            let closed = (1.0 - 0.8) / (4.0 * eps * (1.0 - 0.8f64.powi(t as i32)));
            match c.forbidden_root(t) {
                Some(r) => assert!(close(r, closed, 1e-12)),
                None => assert!(closed >= 0.5 - 1e-12, "t {t}: closed form {closed}"),
            }
        }
    }

    #[test]
    fn asymptotic_bounds() {
        let lb = asymptotic_admission_lb(&line(), 1.0, 0.5, LowerBoundSource::Linear).unwrap();
        assert_eq!(lb, 0.25);
        let half = DemandCurve::q_epsilon(0.5).unwrap();
        let lb = asymptotic_admission_lb(&half, 1.0, 0.5, LowerBoundSource::QEpsilon).unwrap();
        assert_eq!(lb, 0.25);
        assert!(asymptotic_admission_lb(&line(), 0.4, 0.5, LowerBoundSource::Linear).is_err());
        let small = DemandCurve::q_epsilon(0.2).unwrap();
        assert!(asymptotic_admission_lb(&small, 1.0, 0.5, LowerBoundSource::QEpsilon).is_err());

        // s = Q(0)/(1 - delta) gives p_mon q_mon / (s - delta q_mon/(1 - delta)).
        let delta = 0.5;
        let s = 1.0 / (1.0 - delta);
        let lb = asymptotic_admission_lb(&line(), s, delta, LowerBoundSource::GeneralQ).unwrap();
        let want = 0.25 / (s - delta / (1.0 - delta) * 0.5);
        assert!(close(lb, want, 1e-15));
        assert!(lb >= 0.25 / s);
        assert!(asymptotic_admission_lb(&line(), 1.0, 0.5, LowerBoundSource::GeneralQ).is_err());
    }

    #[test]
    fn collapse_and_tightness() {
        assert!(collapse_predicted(0.1, 0.5).unwrap());
        assert!(!collapse_predicted(0.5, 0.5).unwrap());
        assert!(collapse_predicted(0.0, 0.3).unwrap());
        assert!(collapse_predicted(0.0, 1.0).unwrap());
        assert!(collapse_predicted(0.1, 1.0).is_err());

        let (lo, hi) = tightness_thresholds(0.1).unwrap();
        assert!(close(lo, 0.8, 1e-15));
        assert!(close(hi, 1.0 - 0.05 + 0.01 / 1.1, 1e-15));
        assert!(close(hi - lo, 0.159090909090909, 1e-12));
        let (lo, hi) = tightness_thresholds(0.25).unwrap();
        assert!(close(lo, 0.5, 1e-15) && close(hi, 0.925, 1e-15));
        assert!(tightness_thresholds(0.0).is_err());
        assert!(tightness_thresholds(0.5).is_err());
    }

    #[test]
    fn report_examples() {
        let r = bound_report(&line(), 1.0, 0.95).unwrap();
        assert!(close(r.upper_bound.unwrap(), 0.30, 1e-12));
        assert!(close(r.asymptotic_lower.unwrap(), 0.025, 1e-15));
        assert_eq!(r.asymptotic_lower_source, Some(LowerBoundSource::Linear));
        assert!(r.asymptotic_lower.unwrap() <= r.upper_bound.unwrap());

        let r = bound_report(&line(), 1.0, 0.5).unwrap();
        assert_eq!(r.upper_bound, None);
        assert_eq!(r.reasons["upper_bound"], "delta ≤ delta_bar_ser");

        let q = DemandCurve::q_epsilon(0.1).unwrap();
        let r = bound_report(&q, 1.0, 0.5).unwrap();
        assert_eq!(r.collapse_predicted, Some(true));
        let (lo, hi) = r.tightness().unwrap();
        assert!(close(lo, 0.8, 1e-15) && close(hi, 0.959090909090909, 1e-12));
    }
}
