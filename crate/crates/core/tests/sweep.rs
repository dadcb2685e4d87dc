use steptda::harness::{run_sweep, run_sweep_with, Exec, Plane, SweepConfig};
use steptda::Method;

fn small(grid: (usize, usize), reps: usize) -> SweepConfig {
    SweepConfig { grid, replicates: reps, ..Default::default() }
}

fn without_runtimes(mut res: steptda::SweepResult) -> steptda::SweepResult {
    for c in &mut res.cells {
        c.persistence.mean_runtime_s = 0.0;
        c.fourier.mean_runtime_s = 0.0;
    }
    res
}

#[test]
fn identical_config_gives_identical_result() {
    let cfg = small((4, 3), 6);
    for plane in [Plane::Alpha, Plane::Epsilon] {
        let a = without_runtimes(run_sweep(&cfg, plane).unwrap());
        let b = without_runtimes(run_sweep_with(&cfg, plane, Exec::Sequential).unwrap());
        assert_eq!(a, b);
    }
}

#[test]
fn seeds_increase_row_major_with_replicates_innermost() {
    let cfg = small((3, 4), 5);
    let mut expected = cfg.base_seed;
    for row in 0..3 {
        for col in 0..4 {
            for rep in 0..5 {
                assert_eq!(cfg.replicate_model(Plane::Alpha, row, col, rep).seed, expected);
                expected += 1;
            }
        }
    }
}

#[test]
fn planes_hold_the_other_parameter_fixed() {
    let cfg = small((3, 3), 1);
    let m = cfg.replicate_model(Plane::Alpha, 2, 1, 0);
    assert_eq!((m.alpha, m.epsilon), (0.5, cfg.fixed_epsilon));
    let m = cfg.replicate_model(Plane::Epsilon, 0, 0, 0);
    assert_eq!((m.alpha, m.epsilon), (cfg.fixed_alpha, 0.02));
    assert_eq!(m.period_s, 60.0 / 30.0);
}

#[test]
fn bands_contain_means_and_errors_are_nonnegative() {
    let res = run_sweep(&small((4, 4), 8), Plane::Epsilon).unwrap();
    for c in &res.cells {
        for s in [&c.persistence, &c.fourier] {
            assert!(s.rel_error >= 0.0);
            assert!(s.band.0 <= s.mean && s.mean <= s.band.1, "{c:?}");
        }
    }
}

#[test]
fn persistence_degrades_with_heavy_ringing() {
    // Errors only grow once pulses start losing all their samples.
    // Differences below 0.1% are replicate noise.
    let cfg = SweepConfig {
        alpha_range: [0.3, 0.5],
        grid: (9, 12),
        replicates: 25,
        ..Default::default()
    };
    let rows = run_sweep(&cfg, Plane::Alpha).unwrap().row_mean_error(Method::Persistence);
    for w in rows.windows(2) {
        assert!(w[1] >= w[0] - 1e-3, "{rows:?}");
    }
    assert!(rows[8] > 0.1, "{rows:?}");
}
