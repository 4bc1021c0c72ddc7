//! Daily demand curves.
//!
//! A [`DemandCurve`] is a weakly decreasing piecewise-linear function `Q(p)`
//! counting the new transactions willing to pay `p` or more. Curves are stored
//! as knots; a knot may carry a step (different values from the left and from
//! the right), in which case the curve evaluates left-continuously.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default absolute tolerance used for comparisons on prices and quantities.
pub const DEFAULT_TOL: f64 = 1e-12;

/// The family a curve was built from. Bounds that only hold for a specific
/// family look at this tag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum CurveFamily {
    /// `Q(p) = c - m p` on `[0, c/m]`.
    Linear {
        c: f64,
        m: f64,
    },
    /// `1/2 + eps - 2 eps p` on `[0, 1/2]`, then `1 - p` on `[1/2, 1]`.
    QEpsilon {
        epsilon: f64,
    },
    /// The `eps = 0` member of the `QEpsilon` family: flat at 1/2 up to price 1/2.
    QZero,
    Custom,
}

impl CurveFamily {
    pub fn epsilon(&self) -> Option<f64> {
        match *self {
            CurveFamily::QEpsilon { epsilon } => Some(epsilon),
            CurveFamily::QZero => Some(0.0),
            _ => None,
        }
    }
}

/// A breakpoint of a demand curve.
///
/// `quantity` is the value at the knot itself (the limit from the left) and
/// `right` is the limit from the right. They differ only at a step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Knot {
    pub price: f64,
    pub quantity: f64,
    pub right: f64,
}

/// One linear piece `Q(p) = intercept - slope * p` valid on `(lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearPiece {
    pub lo: f64,
    pub hi: f64,
    pub intercept: f64,
    pub slope: f64,
}

impl LinearPiece {
    #[inline]
    pub fn value(&self, p: f64) -> f64 {
        self.intercept - self.slope * p
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DemandCurve {
    knots: Vec<Knot>,
    pieces: Vec<LinearPiece>,
    strict: bool,
    family: CurveFamily,
}

impl DemandCurve {
    /// `Q(p) = c - m p`, zero from `c/m` on.
    pub fn linear(c: f64, m: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) || !(m.is_finite() && m > 0.0) {
            return Err(Error::InvalidCurve(format!(
                "linear curve needs c > 0 and m > 0, got c = {c}, m = {m}"
            )));
        }
        Self::build(
            vec![continuous(0.0, c), continuous(c / m, 0.0)],
            CurveFamily::Linear { c, m },
        )
    }

    /// The piecewise family `Q_eps`. `eps = 0` gives the flat curve `Q_0`.
    pub fn q_epsilon(epsilon: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon >= 0.0) {
            return Err(Error::InvalidCurve(format!(
                "q_epsilon needs epsilon >= 0, got {epsilon}"
            )));
        }
        let family = if epsilon == 0.0 {
            CurveFamily::QZero
        } else {
            CurveFamily::QEpsilon { epsilon }
        };
        Self::build(
            vec![
                continuous(0.0, 0.5 + epsilon),
                continuous(0.5, 0.5),
                continuous(1.0, 0.0),
            ],
            family,
        )
    }

    pub fn q_zero() -> Self {
        Self::q_epsilon(0.0).expect("eps = 0 is valid")
    }

    /// Builds a custom curve from `(price, quantity)` points in ascending
    /// price order. Two consecutive points with the same price describe a
    /// step: the first gives the value at the step, the second the value just
    /// to its right.
    pub fn from_points(points: &[(f64, f64)]) -> Result<Self> {
        let mut knots: Vec<Knot> = Vec::with_capacity(points.len());
        for (i, &(price, quantity)) in points.iter().enumerate() {
            if !price.is_finite() || !quantity.is_finite() {
                return Err(Error::InvalidCurve(format!("point {i} is not finite")));
            }
            match knots.last_mut() {
                Some(last) if price == last.price => {
                    if last.right != last.quantity {
                        return Err(Error::InvalidCurve(format!(
                            "more than two points at price {price}"
                        )));
                    }
                    last.right = quantity;
                }
                _ => knots.push(continuous(price, quantity)),
            }
        }
        Self::build(knots, CurveFamily::Custom)
    }

    /// Parses the two-column text format: one `price,quantity` pair per line,
    /// ascending prices. Blank lines and lines starting with `#` are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut points = Vec::new();
        let mut last_line = 0;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split(',');
            let (Some(p), Some(q), None) = (cols.next(), cols.next(), cols.next()) else {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected `price,quantity`, got `{line}`"),
                });
            };
            let parse = |s: &str, what: &str| {
                s.trim().parse::<f64>().map_err(|e| Error::Parse {
                    line: line_no,
                    message: format!("bad {what} `{}`: {e}", s.trim()),
                })
            };
            let (p, q) = (parse(p, "price")?, parse(q, "quantity")?);
            if let Some(&(prev, _)) = points.last() {
                if p < prev {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("price {p} is below the previous price {prev}"),
                    });
                }
            }
            points.push((p, q));
            last_line = line_no;
        }
        Self::from_points(&points).map_err(|e| match e {
            Error::InvalidCurve(message) => Error::Parse {
                line: last_line,
                message,
            },
            other => other,
        })
    }

    fn build(knots: Vec<Knot>, family: CurveFamily) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidCurve("need at least two knots".into()));
        }
        if knots[0].price != 0.0 {
            return Err(Error::InvalidCurve(format!(
                "first knot must be at price 0, got {}",
                knots[0].price
            )));
        }
        if knots[0].quantity != knots[0].right {
            return Err(Error::InvalidCurve("no step allowed at price 0".into()));
        }
        let mut prev: Option<&Knot> = None;
        for k in &knots {
            if k.quantity < 0.0 || k.right < 0.0 {
                return Err(Error::InvalidCurve(format!(
                    "negative quantity at price {}",
                    k.price
                )));
            }
            if k.right > k.quantity {
                return Err(Error::InvalidCurve(format!(
                    "upward step at price {}",
                    k.price
                )));
            }
            if let Some(p) = prev {
                if k.price <= p.price {
                    return Err(Error::InvalidCurve(format!(
                        "knot prices must be strictly increasing ({} after {})",
                        k.price, p.price
                    )));
                }
                if k.quantity > p.right {
                    return Err(Error::InvalidCurve(format!(
                        "quantity increases between prices {} and {}",
                        p.price, k.price
                    )));
                }
            }
            prev = Some(k);
        }

        let pieces: Vec<LinearPiece> = knots
            .windows(2)
            .map(|w| {
                let (a, b) = (&w[0], &w[1]);
                let slope = (a.right - b.quantity) / (b.price - a.price);
                LinearPiece {
                    lo: a.price,
                    hi: b.price,
                    intercept: a.right + slope * a.price,
                    slope,
                }
            })
            .collect();
        let strict =
            pieces.iter().all(|pc| pc.slope > 0.0) && knots.iter().all(|k| k.quantity == k.right);

        Ok(Self {
            knots,
            pieces,
            strict,
            family,
        })
    }

    /// `Q(p)`. Left-continuous at steps and zero beyond [`Self::domain_max`].
    pub fn eval(&self, p: f64) -> Result<f64> {
        if !(p >= 0.0) {
            return Err(Error::NegativePrice(p));
        }
        Ok(self.value(p))
    }

    /// Unchecked evaluation for internal callers that already know `p >= 0`.
    pub(crate) fn value(&self, p: f64) -> f64 {
        if p <= 0.0 {
            return self.knots[0].quantity;
        }
        if p > self.domain_max() {
            return 0.0;
        }
        self.piece_at(p).value(p)
    }

    /// The linear piece whose half-open range `(lo, hi]` holds `p`, for
    /// `0 < p <= domain_max`; `p = 0` maps to the first piece.
    pub(crate) fn piece_at(&self, p: f64) -> &LinearPiece {
        let idx = self.pieces.partition_point(|pc| pc.hi < p);
        &self.pieces[idx.min(self.pieces.len() - 1)]
    }

    /// Largest price `p` with `Q(p) >= q`.
    ///
    /// On a strictly decreasing curve this is the unique root of `Q(p) = q`;
    /// on flat stretches it returns the right end. For `q = 0` the answer is
    /// the first price where the curve reaches zero.
    pub fn inverse_max_price(&self, q: f64) -> Result<f64> {
        self.inverse_max_price_tol(q, DEFAULT_TOL)
    }

    pub fn inverse_max_price_tol(&self, q: f64, tol: f64) -> Result<f64> {
        let max = self.q0();
        if !q.is_finite() || q < 0.0 || q > max + tol {
            return Err(Error::NoSolution { quantity: q, max });
        }
        if q <= 0.0 {
            // First price where Q hits zero.
            for (k, pc) in self.knots.iter().zip(&self.pieces) {
                if k.right <= 0.0 {
                    return Ok(k.price);
                }
                if pc.value(pc.hi) <= 0.0 {
                    return Ok(if pc.slope > 0.0 {
                        (pc.intercept / pc.slope).clamp(pc.lo, pc.hi)
                    } else {
                        pc.hi
                    });
                }
            }
            return Ok(self.domain_max());
        }
        for (i, pc) in self.pieces.iter().enumerate() {
            let at_hi = self.knots[i + 1].quantity;
            if at_hi >= q - tol {
                continue;
            }
            let from_right = self.knots[i].right;
            if from_right >= q - tol && pc.slope > 0.0 {
                let root = (pc.intercept - q) / pc.slope;
                return Ok(root.clamp(pc.lo, pc.hi));
            }
            return Ok(pc.lo);
        }
        Ok(self.domain_max())
    }

    pub fn q0(&self) -> f64 {
        self.knots[0].quantity
    }

    /// Price of the last knot; `Q` is zero beyond it.
    pub fn domain_max(&self) -> f64 {
        self.knots[self.knots.len() - 1].price
    }

    pub fn knots(&self) -> &[Knot] {
        &self.knots
    }

    pub fn pieces(&self) -> &[LinearPiece] {
        &self.pieces
    }

    /// True iff the curve strictly decreases on `[0, domain_max]` with no steps.
    pub fn is_strict(&self) -> bool {
        self.strict
    }

    pub fn is_continuous(&self) -> bool {
        self.knots[..self.knots.len() - 1]
            .iter()
            .all(|k| k.quantity == k.right)
    }

    pub fn family(&self) -> CurveFamily {
        self.family
    }

    /// Prices at which the curve has a step, if any.
    pub fn steps(&self) -> impl Iterator<Item = f64> + '_ {
        self.knots
            .iter()
            .filter(|k| k.quantity != k.right)
            .map(|k| k.price)
    }
}

impl fmt::Display for DemandCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            CurveFamily::Linear { c, m } => write!(f, "linear(c={c}, m={m})"),
            CurveFamily::QEpsilon { epsilon } => write!(f, "q_epsilon({epsilon})"),
            CurveFamily::QZero => write!(f, "q_zero"),
            CurveFamily::Custom => write!(f, "custom({} knots)", self.knots.len()),
        }
    }
}

fn continuous(price: f64, quantity: f64) -> Knot {
    Knot {
        price,
        quantity,
        right: quantity,
    }
}
