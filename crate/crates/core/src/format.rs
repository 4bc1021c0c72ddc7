//! Text output: numbers at 12 significant digits, trajectory and sweep CSV.

use std::fmt::Write as _;

use crate::analysis::SweepRow;
use crate::engine::StepRecord;

pub const SIGNIFICANT_DIGITS: usize = 12;

pub const TRAJECTORY_HEADER: &str = "t,price,quantity,revenue,jumped,segments";
pub const SWEEP_HEADER: &str = "delta,p_map_hat,recurrence_gap,collapsed,monopolist_visits";

/// Formats `x` with [`SIGNIFICANT_DIGITS`] significant digits in plain
/// decimal notation, trailing zeros trimmed (`0.25`, `0.916666666667`).
pub fn sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    // Round in scientific notation first so the digit count is exact even
    // when rounding carries into a new leading digit.
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (_, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
    let rounded: f64 = sci.parse().expect("round trip");
    let mut s = format!("{rounded:.decimals$}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

/// `x` rounded to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    sig(x).parse().unwrap_or(x)
}

pub fn trajectory_csv(records: &[StepRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.t,
            sig(r.price),
            sig(r.quantity),
            sig(r.revenue),
            r.jumped,
            r.segments
        );
    }
    out
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            sig(r.delta),
            sig(r.p_map_hat),
            r.recurrence_gap,
            r.collapsed,
            r.monopolist_visits
        );
    }
    out
}
