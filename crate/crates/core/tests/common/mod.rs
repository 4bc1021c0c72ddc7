#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use smlab_core::demand::DemandCurve;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Knots of a random strictly decreasing curve that reaches zero.
pub fn random_strict_points(rng: &mut ChaCha8Rng) -> Vec<(f64, f64)> {
    let pieces = rng.gen_range(1..=5);
    let mut price = 0.0;
    let mut quantity = rng.gen_range(0.5..1.5);
    let mut points = vec![(price, quantity)];
    for i in 0..pieces {
        price += rng.gen_range(0.1..0.6);
        quantity = if i + 1 == pieces {
            0.0
        } else {
            quantity * rng.gen_range(0.2..0.9)
        };
        points.push((price, quantity));
    }
    points
}

pub fn random_strict_curve(rng: &mut ChaCha8Rng) -> DemandCurve {
    DemandCurve::from_points(&random_strict_points(rng)).expect("valid random curve")
}

/// Linear interpolation through `points`, zero past the last knot.
pub fn interp(points: &[(f64, f64)], p: f64) -> f64 {
    if p <= points[0].0 {
        return points[0].1;
    }
    for w in points.windows(2) {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        if p <= x1 {
            return y0 + (y1 - y0) * (p - x0) / (x1 - x0);
        }
    }
    0.0
}

/// Plays the dynamics on a uniform price grid, taking the grid argmax of
/// `p * min(s, D_t(p))` each round (largest price among ties).
pub fn grid_prices(
    points: &[(f64, f64)],
    supply: f64,
    delta: f64,
    steps: usize,
    h: f64,
) -> Vec<f64> {
    let top = points.last().unwrap().0;
    let n = (top / h).ceil() as usize + 1;
    let grid: Vec<f64> = (0..n).map(|i| (i as f64 * h).min(top)).collect();
    let q: Vec<f64> = grid.iter().map(|&p| interp(points, p)).collect();
    let mut z = vec![0.0; n];
    let mut prices = Vec::with_capacity(steps);
    for _ in 0..steps {
        let d: Vec<f64> = (0..n).map(|i| delta * z[i] + q[i]).collect();
        let mut best = f64::NEG_INFINITY;
        let mut arg = 0;
        for i in 0..n {
            let r = grid[i] * supply.min(d[i]);
            if r >= best - 1e-12 {
                if r > best {
                    best = r;
                }
                arg = i;
            }
        }
        let qt = d[arg];
        for i in 0..n {
            z[i] = if i <= arg { d[i] - qt } else { 0.0 };
        }
        prices.push(grid[arg]);
    }
    prices
}
