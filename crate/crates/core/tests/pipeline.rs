mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use steptda::detect::{count_series, rpm_persistence, PersistenceOptions};
use steptda::harness::relative_error;
use steptda::persistence::{bottleneck, diagram_1d, diagram_point_cloud, hausdorff, PointCloud};
use steptda::signal::{simulate_accordion, simulate_simple, NominalTrain, PulseModel};
use steptda::spectral::rpm_fourier;
use steptda::{PersistenceDiagram, SupportSet};

use common::{brute_bottleneck, eq2_count, exhaustive_mst};

fn model(t: f64, tau: f64, alpha: f64, a: f64, b: f64, dt: f64, seed: u64) -> PulseModel {
    PulseModel {
        period_s: t,
        on_time_s: tau,
        alpha,
        beta: 0.0,
        epsilon: 0.0,
        window_s: [a, b],
        dt_s: dt,
        seed,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn clean_count_matches_window_oracle(
        t in 0.05f64..3.0,
        duty in 0.05f64..0.3,
        step in 0.1f64..0.5,
        start in -3.0f64..3.0,
        periods in 4.2f64..10.0,
    ) {
        let tau = duty * t;
        let dt = step * tau;
        let a = start * t;
        let b = a + (periods * t / dt).floor() * dt;
        let ts = simulate_simple(&model(t, tau, 0.0, a, b, dt, 0)).unwrap();
        let last = *ts.times().last().unwrap();
        let got = count_series(&ts, &PersistenceOptions::default()).unwrap();
        prop_assert_eq!(got.count, eq2_count(t, tau, a, last));
    }

    #[test]
    fn line_diagram_is_spanning_tree_of_line(xs in prop::collection::vec(-50.0f64..50.0, 1..8)) {
        let mut xs = xs;
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        let points: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
        let want = exhaustive_mst(&points);
        let got = diagram_1d(&SupportSet::new(xs).unwrap()).unwrap();
        prop_assert_eq!(got.len(), want.len());
        for (g, w) in got.deaths().iter().zip(&want) {
            prop_assert!((g - w).abs() < 1e-9);
        }
    }

    #[test]
    fn bottleneck_matches_enumeration(
        a in prop::collection::vec(0.0f64..5.0, 0..5),
        b in prop::collection::vec(0.0f64..5.0, 0..5),
    ) {
        let da = PersistenceDiagram::new(a).unwrap();
        let db = PersistenceDiagram::new(b).unwrap();
        let want = brute_bottleneck(da.deaths(), db.deaths());
        prop_assert!((bottleneck(&da, &db).unwrap() - want).abs() < 1e-12);
    }

    /// Deaths are merge distances, so moving every point by at most η can
    /// move a death by up to 2η.
    #[test]
    fn diagrams_move_at_most_twice_the_hausdorff_distance(
        pts in prop::collection::vec((0.0f64..10.0, 0.0f64..10.0), 2..10),
        moves in prop::collection::vec((0.0f64..1.0, 0.0f64..std::f64::consts::TAU), 10),
        eta in 0.01f64..1.0,
    ) {
        let a: Vec<[f64; 2]> = pts.iter().map(|&(x, y)| [x, y]).collect();
        let b: Vec<[f64; 2]> = a
            .iter()
            .zip(&moves)
            .map(|(p, &(r, th))| [p[0] + eta * r * th.cos(), p[1] + eta * r * th.sin()])
            .collect();
        let (ca, cb) = (PointCloud::from_points(&a).unwrap(), PointCloud::from_points(&b).unwrap());
        let dh = hausdorff(&ca, &cb).unwrap();
        let db = bottleneck(&diagram_point_cloud(&ca).unwrap(), &diagram_point_cloud(&cb).unwrap()).unwrap();
        prop_assert!(dh <= eta + 1e-12);
        prop_assert!(db <= 2.0 * dh + 1e-12, "d_B {} d_H {}", db, dh);
    }
}

#[test]
fn one_sided_bound_fails_by_a_factor_of_two() {
    let eta = 0.1;
    let a = PointCloud::from_line(&[0.0, 1.0]);
    let b = PointCloud::from_line(&[eta, 1.0 - eta]);
    let dh = hausdorff(&a, &b).unwrap();
    let db = bottleneck(&diagram_point_cloud(&a).unwrap(), &diagram_point_cloud(&b).unwrap()).unwrap();
    assert!((dh - eta).abs() < 1e-12);
    assert!((db - 2.0 * eta).abs() < 1e-12);
}

#[test]
fn nominal_train_without_noise_is_exact() {
    let train = NominalTrain::default();
    for omega in [30.0, 1000.0, 3178.0, 12136.0, 20126.0, 24000.0] {
        let ts = simulate_accordion(&train.model(omega, 0.0, 0.0, 1)).unwrap();
        let e = rpm_persistence(&ts, &PersistenceOptions::default()).unwrap();
        assert!(relative_error(e.omega, omega).unwrap() < 1e-9, "{omega}: {}", e.omega);
        assert!(e.detail.unwrap().valid_split);
    }
}

#[test]
fn trimmed_window_tracks_true_pulse_starts() {
    // Window ends kept more than ατ + dt away from any edge.
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let (t, tau) = (1.0, 0.2);
    for seed in 0..50 {
        let alpha = rng.random_range(0.0..0.3);
        let dt = tau * (1.0 - 2.0 * alpha) / 2.0 * rng.random_range(0.2..0.9);
        let a = rng.random_range(0.0..3.0f64).floor() + 0.5;
        let b = a + rng.random_range(4.0..7.0f64).floor();
        let ts = simulate_simple(&model(t, tau, alpha, a, b, dt, seed)).unwrap();
        let c = count_series(&ts, &PersistenceOptions::default()).unwrap();
        let a_low = (((a - tau) / t).ceil() + 1.0) * t;
        let a_high = (b / t).floor() * t;
        let tol = alpha * tau + dt;
        assert!((c.a_low - a_low).abs() <= tol, "{seed}: {} vs {a_low}", c.a_low);
        assert!((c.a_high - a_high).abs() <= tol, "{seed}: {} vs {a_high}", c.a_high);
    }
}

#[test]
fn moderate_ringing_at_3178_rpm() {
    let train = NominalTrain::default();
    let omega = 3178.0;
    let errs: Vec<f64> = (0..100)
        .map(|s| {
            let ts = simulate_accordion(&train.model(omega, 0.10, 0.0, 48824 + s)).unwrap();
            rpm_persistence(&ts, &PersistenceOptions::default()).unwrap().omega
        })
        .collect();
    let mean = errs.iter().sum::<f64>() / errs.len() as f64;
    assert!(relative_error(mean, omega).unwrap() < 0.07);
}

#[test]
fn fourier_drifts_under_irregular_spacing() {
    let train = NominalTrain::default();
    for omega in [3178.0, 12136.0, 20126.0] {
        let (mut p, mut f) = (0.0, 0.0);
        let reps = 25;
        for s in 0..reps {
            let ts = simulate_accordion(&train.model(omega, 0.10, 0.25, 900 + s)).unwrap();
            p += rpm_persistence(&ts, &PersistenceOptions::default()).unwrap().omega;
            f += rpm_fourier(&ts, 3.0).unwrap().omega;
        }
        let ep = relative_error(p / reps as f64, omega).unwrap();
        let ef = relative_error(f / reps as f64, omega).unwrap();
        assert!(ep < 0.05, "{omega}: persistence {ep}");
        assert!(ep < ef, "{omega}: persistence {ep} fourier {ef}");
    }
}

#[test]
fn inverted_signal_counts_off_intervals() {
    let t = 2.0;
    let ts = simulate_simple(&model(t, 0.4, 0.0, 0.0, 20.0 - 0.05, 0.05, 0)).unwrap();
    let plain = count_series(&ts, &PersistenceOptions::default()).unwrap();
    let inv = count_series(&ts, &PersistenceOptions { invert: true, ..Default::default() }).unwrap();
    // Off intervals of a pulse wave are themselves a pulse wave with the same period.
    assert_eq!(plain.count, 8);
    assert_eq!(inv.count, 8);
    assert!((inv.a_high - inv.a_low - 8.0 * t).abs() < 1e-9);
}
