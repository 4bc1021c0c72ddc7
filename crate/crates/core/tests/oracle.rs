mod common;

use rand::Rng;
use smlab_core::bounds::{self, Certificate};
use smlab_core::demand::DemandCurve;
use smlab_core::engine::{run, run_with_states, SimConfig};

#[test]
fn exact_engine_tracks_grid_dynamics() {
    let mut rng = common::rng(2024);
    for _ in 0..15 {
        let points = common::random_strict_points(&mut rng);
        let supply = rng.gen_range(0.3..1.5);
        let delta = rng.gen_range(0.0..1.0);
        let curve = DemandCurve::from_points(&points).unwrap();
        let exact = run(&SimConfig::new(curve, supply, delta, 5).unwrap()).unwrap();
        let grid = common::grid_prices(&points, supply, delta, 5, 1e-5);
        for (rec, g) in exact.iter().zip(&grid) {
            assert!(
                (rec.price - g).abs() <= 1e-4,
                "round {}: {} vs {g}",
                rec.t,
                rec.price
            );
        }
    }
}

#[test]
fn total_demand_matches_recursive_definition() {
    // D_t(p) = Q(p) + delta * (D_{t-1}(p) - q_{t-1}) for p <= p_{t-1}, else Q(p).
    let points = [(0.0, 1.2), (0.4, 0.7), (0.9, 0.2), (1.3, 0.0)];
    let curve = DemandCurve::from_points(&points).unwrap();
    let delta = 0.7;
    let traj = run_with_states(&SimConfig::new(curve, 0.8, delta, 12).unwrap()).unwrap();
    for i in 0..=20 {
        let p = 1.3 * i as f64 / 20.0;
        let mut d = common::interp(&points, p);
        for (k, rec) in traj.records.iter().enumerate() {
            let got = traj.states[k].total_demand(p).unwrap();
            assert!(
                (got - d).abs() <= 1e-12,
                "round {} p={p}: {got} vs {d}",
                rec.t
            );
            let z = if p <= rec.price {
                d - rec.quantity
            } else {
                0.0
            };
            d = common::interp(&points, p) + delta * z;
        }
    }
}

#[test]
fn forbidden_roots_vanish_certificate() {
    let mut rng = common::rng(5);
    for _ in 0..20 {
        let curve = common::random_strict_curve(&mut rng);
        let delta = rng.gen_range(0.1..0.99);
        let cert = Certificate::new(&curve, 1.0, delta).unwrap();
        for t in 1..30 {
            if let Some(r) = cert.forbidden_root(t) {
                assert!(cert.value(t, r).abs() <= 1e-9);
                assert!(cert.value(t, 0.5 * r) < 0.0);
            }
        }
    }
}

#[test]
fn linear_lower_bound_approaches_tail() {
    let curve = DemandCurve::linear(1.0, 1.0).unwrap();
    let lb = bounds::asymptotic_admission_lb(&curve, 1.0, 0.5, bounds::LowerBoundSource::Linear)
        .unwrap();
    assert!((lb - 0.25).abs() <= 1e-12);
    let recs = run(&SimConfig::new(curve, 1.0, 0.5, 200).unwrap()).unwrap();
    assert!(recs.iter().all(|r| r.price >= lb - 1e-9));
}

#[test]
fn report_serializes_with_flat_quantities() {
    let curve = DemandCurve::q_epsilon(0.1).unwrap();
    let report = bounds::bound_report(&curve, 1.0, 0.5).unwrap();
    let json = serde_json::to_value(&report).unwrap();
    assert_eq!(json["p_mon"], 0.5);
    assert_eq!(json["collapse_predicted"], true);
    assert!(json["upper_bound"].is_null());
}
