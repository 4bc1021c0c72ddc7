//! Closed-form maximization of `p * min(s, D(p))` over a piecewise-linear,
//! non-increasing, left-continuous demand `D`.

use crate::demand::LinearPiece;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Optimum {
    pub price: f64,
    pub revenue: f64,
}

/// Maximizes capped revenue over `pieces`, which must tile `(0, end]` in
/// increasing order with `D(p) = intercept - slope * p` on each `(lo, hi]`.
///
/// Per piece the candidates are the right end, the unconstrained vertex
/// `intercept / (2 slope)` and the capacity crossing `D(p) = supply`. The
/// supremum approached at a left end is either attained by the previous
/// piece's right end or dominated by it (left-continuity), so left ends are
/// never candidates.
///
/// Among candidates whose revenue is within `tie_tol` of the best, the
/// largest price wins.
pub fn maximize(pieces: &[LinearPiece], supply: f64, tie_tol: f64) -> Option<Optimum> {
    let revenue = |pc: &LinearPiece, p: f64| p * supply.min(pc.value(p)).max(0.0);

    let mut candidates: Vec<Optimum> = Vec::with_capacity(pieces.len() * 3);
    for pc in pieces {
        let mut push = |p: f64| {
            candidates.push(Optimum {
                price: p,
                revenue: revenue(pc, p),
            })
        };
        push(pc.hi);
        if pc.slope > 0.0 {
            let vertex = pc.intercept / (2.0 * pc.slope);
            if vertex > pc.lo && vertex < pc.hi {
                push(vertex);
            }
            let crossing = (pc.intercept - supply) / pc.slope;
            if crossing > pc.lo && crossing < pc.hi {
                push(crossing);
            }
        }
    }

    let best = candidates
        .iter()
        .map(|c| c.revenue)
        .fold(f64::NEG_INFINITY, f64::max);
    if !(best > 0.0) {
        return None;
    }
    candidates
        .into_iter()
        .filter(|c| c.revenue >= best - tie_tol)
        .max_by(|a, b| a.price.total_cmp(&b.price))
}
