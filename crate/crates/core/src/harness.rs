//! Monte-Carlo robustness sweeps and runtime benchmarks.
//!
//! A sweep covers a `rows × cols` grid: rows step through the noise
//! parameter (α or ε), columns through the nominal speed Ω₀. Cells are
//! numbered row-major and every cell runs `replicates` simulations. The
//! replicate `r` of cell `c` is seeded with
//! `base_seed + c · replicates + r`, so seeds are a pure function of the
//! global iteration index and results do not depend on execution order.
//! Cells run in parallel when the `parallel` feature is enabled.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::detect::{rpm_persistence, Method, PersistenceOptions, DEFAULT_RHO_MIN};
use crate::error::{Error, Result};
use crate::signal::{simulate_accordion, NominalTrain, PulseModel, TimeSeries};
use crate::spectral::{rpm_fourier, DEFAULT_PEAK_DIVISOR};

pub const DEFAULT_SEED: u64 = 48824;
const BOOTSTRAP_STREAM: u64 = 2;

/// Which noise parameter varies along the sweep rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Plane {
    Alpha,
    Epsilon,
}

impl std::str::FromStr for Plane {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "alpha" => Ok(Plane::Alpha),
            "epsilon" => Ok(Plane::Epsilon),
            other => Err(Error::InvalidParameter(format!("unknown plane {other:?}"))),
        }
    }
}

/// How grid cells are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    /// Falls back to sequential without the `parallel` feature.
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepConfig {
    pub omega_range: [f64; 2],
    pub alpha_range: [f64; 2],
    pub epsilon_range: [f64; 2],
    /// `(rows, cols)`: noise values × nominal speeds.
    pub grid: (usize, usize),
    pub replicates: usize,
    pub base_seed: u64,
    pub train: NominalTrain,
    /// α used on the ε plane.
    pub fixed_alpha: f64,
    /// ε used on the α plane.
    pub fixed_epsilon: f64,
    pub peak_divisor: f64,
    pub rho_min: f64,
    pub band_level: f64,
    pub bootstrap_resamples: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            omega_range: [30.0, 24000.0],
            alpha_range: [0.0, 0.5],
            epsilon_range: [0.02, 0.65],
            grid: (12, 12),
            replicates: 25,
            base_seed: DEFAULT_SEED,
            train: NominalTrain::default(),
            fixed_alpha: 0.10,
            fixed_epsilon: 0.0,
            peak_divisor: DEFAULT_PEAK_DIVISOR,
            rho_min: DEFAULT_RHO_MIN,
            band_level: 0.68,
            bootstrap_resamples: 1000,
        }
    }
}

fn check_range(name: &str, r: [f64; 2], bounds: [f64; 2]) -> Result<()> {
    if !(r[0] <= r[1] && r[0] >= bounds[0] && r[1] <= bounds[1]) {
        return Err(Error::InvalidParameter(format!(
            "{name} range [{}, {}] outside [{}, {}]",
            r[0], r[1], bounds[0], bounds[1]
        )));
    }
    Ok(())
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        check_range("omega", self.omega_range, [30.0, 24000.0])?;
        check_range("alpha", self.alpha_range, [0.0, 0.5])?;
        check_range("epsilon", self.epsilon_range, [0.02, 0.65])?;
        if self.grid.0 == 0 || self.grid.1 == 0 {
            return Err(Error::InvalidParameter("grid must be at least 1x1".into()));
        }
        if self.replicates == 0 {
            return Err(Error::InvalidParameter("replicates must be at least 1".into()));
        }
        if self.train.n_samples() < 4 {
            return Err(Error::InvalidParameter("signal too short".into()));
        }
        if !(self.band_level > 0.0 && self.band_level < 1.0) {
            return Err(Error::InvalidParameter("band level must lie in (0, 1)".into()));
        }
        Ok(())
    }

    fn noise_range(&self, plane: Plane) -> [f64; 2] {
        match plane {
            Plane::Alpha => self.alpha_range,
            Plane::Epsilon => self.epsilon_range,
        }
    }

    pub fn noise_values(&self, plane: Plane) -> Vec<f64> {
        linspace(self.noise_range(plane), self.grid.0)
    }

    pub fn omega_values(&self) -> Vec<f64> {
        linspace(self.omega_range, self.grid.1)
    }

    /// Model for replicate `rep` of cell (`row`, `col`).
    pub fn replicate_model(&self, plane: Plane, row: usize, col: usize, rep: usize) -> PulseModel {
        let noise = self.noise_values(plane)[row];
        let omega = self.omega_values()[col];
        let cell = (row * self.grid.1 + col) as u64;
        let seed = self
            .base_seed
            .wrapping_add(cell * self.replicates as u64 + rep as u64);
        let (alpha, epsilon) = match plane {
            Plane::Alpha => (noise, self.fixed_epsilon),
            Plane::Epsilon => (self.fixed_alpha, noise),
        };
        self.train.model(omega, alpha, epsilon, seed)
    }
}

fn linspace(r: [f64; 2], n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![r[0]];
    }
    (0..n)
        .map(|i| r[0] + (r[1] - r[0]) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Aggregated estimates of one method in one cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MethodStats {
    /// Mean estimate over successful replicates; NaN if none succeeded.
    pub mean: f64,
    pub rel_error: f64,
    pub band: (f64, f64),
    pub failures: usize,
    pub mean_runtime_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub row: usize,
    pub col: usize,
    pub omega0: f64,
    pub noise: f64,
    pub persistence: MethodStats,
    pub fourier: MethodStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub plane: Plane,
    pub config: SweepConfig,
    /// Row-major by (noise, Ω₀).
    pub cells: Vec<CellResult>,
}

impl SweepResult {
    pub fn cell(&self, row: usize, col: usize) -> &CellResult {
        &self.cells[row * self.config.grid.1 + col]
    }

    /// Per-row mean of the persistence relative error, averaged over Ω₀.
    pub fn row_mean_error(&self, method: Method) -> Vec<f64> {
        let cols = self.config.grid.1;
        self.cells
            .chunks(cols)
            .map(|row| {
                row.iter()
                    .map(|c| match method {
                        Method::Persistence => c.persistence.rel_error,
                        Method::Fourier => c.fourier.rel_error,
                    })
                    .sum::<f64>()
                    / cols as f64
            })
            .collect()
    }
}

/// `|estimate - nominal| / nominal`.
pub fn relative_error(estimate: f64, nominal: f64) -> Result<f64> {
    if !(nominal > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "nominal value {nominal} must be positive"
        )));
    }
    Ok((estimate - nominal).abs() / nominal)
}

/// Percentile bootstrap band of the sample mean. Resamples with replacement
/// and returns the `(1-level)/2` and `(1+level)/2` quantiles of the
/// resampled means (linear interpolation between order statistics).
pub fn bootstrap_band(samples: &[f64], level: f64, resamples: usize, seed: u64) -> Result<(f64, f64)> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "bootstrap needs at least 2 samples, got {n}"
        )));
    }
    if !(level > 0.0 && level < 1.0) || resamples == 0 {
        return Err(Error::InvalidParameter("bad bootstrap level or resample count".into()));
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    if samples.iter().all(|&s| s == samples[0]) {
        return Ok((mean, mean));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(BOOTSTRAP_STREAM);
    let mut means: Vec<f64> = (0..resamples)
        .map(|_| (0..n).map(|_| samples[rng.random_range(0..n)]).sum::<f64>() / n as f64)
        .collect();
    means.sort_unstable_by(f64::total_cmp);
    let q = |p: f64| {
        let pos = p * (resamples - 1) as f64;
        let i = pos.floor() as usize;
        let frac = pos - i as f64;
        if i + 1 < resamples {
            means[i] + frac * (means[i + 1] - means[i])
        } else {
            means[i]
        }
    };
    Ok((q((1.0 - level) / 2.0), q((1.0 + level) / 2.0)))
}

struct Replicate {
    persistence: Option<(f64, f64)>,
    fourier: Option<(f64, f64)>,
}

fn timed<T>(f: impl FnOnce() -> Result<T>) -> (Result<T>, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64())
}

fn run_replicate(config: &SweepConfig, model: &PulseModel) -> Result<Replicate> {
    let ts = simulate_accordion(model)?;
    let opts = PersistenceOptions {
        rho_min: config.rho_min,
        ..Default::default()
    };
    let (p, tp) = timed(|| rpm_persistence(&ts, &opts));
    let (f, tf) = timed(|| rpm_fourier(&ts, config.peak_divisor));
    Ok(Replicate {
        persistence: p.ok().map(|e| (e.omega, tp)),
        fourier: f.ok().map(|e| (e.omega, tf)),
    })
}

fn aggregate(
    config: &SweepConfig,
    nominal: f64,
    results: &[Option<(f64, f64)>],
    seed: u64,
) -> Result<MethodStats> {
    let ok: Vec<(f64, f64)> = results.iter().flatten().copied().collect();
    let failures = results.len() - ok.len();
    if ok.is_empty() {
        return Ok(MethodStats {
            mean: f64::NAN,
            rel_error: f64::NAN,
            band: (f64::NAN, f64::NAN),
            failures,
            mean_runtime_s: f64::NAN,
        });
    }
    let estimates: Vec<f64> = ok.iter().map(|e| e.0).collect();
    let mean = estimates.iter().sum::<f64>() / estimates.len() as f64;
    let band = if estimates.len() >= 2 {
        let (lo, hi) = bootstrap_band(&estimates, config.band_level, config.bootstrap_resamples, seed)?;
        // Percentile bands can miss a skewed sample mean by a hair; keep the
        // point estimate inside the reported band.
        (lo.min(mean), hi.max(mean))
    } else {
        (mean, mean)
    };
    Ok(MethodStats {
        mean,
        rel_error: relative_error(mean, nominal)?,
        band,
        failures,
        mean_runtime_s: ok.iter().map(|e| e.1).sum::<f64>() / ok.len() as f64,
    })
}

fn run_cell(config: &SweepConfig, plane: Plane, cell: usize) -> Result<CellResult> {
    let cols = config.grid.1;
    let (row, col) = (cell / cols, cell % cols);
    let omega0 = config.omega_values()[col];
    let noise = config.noise_values(plane)[row];
    let mut p = Vec::with_capacity(config.replicates);
    let mut f = Vec::with_capacity(config.replicates);
    for rep in 0..config.replicates {
        let r = run_replicate(config, &config.replicate_model(plane, row, col, rep))?;
        p.push(r.persistence);
        f.push(r.fourier);
    }
    let seed = config.base_seed.wrapping_add(cell as u64);
    Ok(CellResult {
        row,
        col,
        omega0,
        noise,
        persistence: aggregate(config, omega0, &p, seed)?,
        fourier: aggregate(config, omega0, &f, seed)?,
    })
}

/// Runs the sweep with the default execution mode.
pub fn run_sweep(config: &SweepConfig, plane: Plane) -> Result<SweepResult> {
    run_sweep_with(config, plane, Exec::default())
}

pub fn run_sweep_with(config: &SweepConfig, plane: Plane, exec: Exec) -> Result<SweepResult> {
    config.validate()?;
    let n_cells = config.grid.0 * config.grid.1;
    let cells = map_indices(n_cells, exec, |c| run_cell(config, plane, c))?;
    Ok(SweepResult {
        plane,
        config: config.clone(),
        cells,
    })
}

/// Maps `f` over `0..n`, keeping results in index order.
fn map_indices<T, F>(n: usize, exec: Exec, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
        _ => (0..n).map(f).collect(),
    }
}

/// Runtime benchmark settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchConfig {
    pub omegas: Vec<f64>,
    pub runs: usize,
    pub alpha: f64,
    pub epsilon: f64,
    pub train: NominalTrain,
    pub base_seed: u64,
    pub peak_divisor: f64,
    pub band_level: f64,
    pub bootstrap_resamples: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            omegas: linspace([30.0, 24000.0], 12),
            runs: 200,
            alpha: 0.10,
            epsilon: 0.0,
            train: NominalTrain::default(),
            base_seed: DEFAULT_SEED,
            peak_divisor: DEFAULT_PEAK_DIVISOR,
            band_level: 0.68,
            bootstrap_resamples: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuntimeRow {
    pub omega0: f64,
    pub n_samples: usize,
    pub method: Method,
    pub mean_s: f64,
    pub band: (f64, f64),
    /// Individual timings in seconds.
    pub raw_s: Vec<f64>,
}

impl RuntimeRow {
    pub fn median_s(&self) -> f64 {
        median(&self.raw_s)
    }
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Times one estimator on `ts` (simulation excluded).
pub fn time_estimator(method: Method, ts: &TimeSeries, peak_divisor: f64) -> f64 {
    let opts = PersistenceOptions::default();
    let start = Instant::now();
    let out = match method {
        Method::Persistence => rpm_persistence(ts, &opts).map(|e| e.omega),
        Method::Fourier => rpm_fourier(ts, peak_divisor).map(|e| e.omega),
    };
    let elapsed = start.elapsed().as_secs_f64();
    std::hint::black_box(out.ok());
    elapsed
}

fn timing_row(
    omega0: f64,
    n_samples: usize,
    method: Method,
    raw_s: Vec<f64>,
    level: f64,
    resamples: usize,
    seed: u64,
) -> Result<RuntimeRow> {
    let mean = raw_s.iter().sum::<f64>() / raw_s.len() as f64;
    let band = if raw_s.len() >= 2 {
        let (lo, hi) = bootstrap_band(&raw_s, level, resamples, seed)?;
        (lo.min(mean), hi.max(mean))
    } else {
        (mean, mean)
    };
    Ok(RuntimeRow {
        omega0,
        n_samples,
        method,
        mean_s: mean,
        band,
        raw_s,
    })
}

/// Mean estimator runtime per nominal speed. Runs sequentially so timings do
/// not compete for cores.
pub fn bench_runtime(config: &BenchConfig, methods: &[Method]) -> Result<Vec<RuntimeRow>> {
    if config.train.n_samples() == 0 {
        return Err(Error::InvalidParameter("zero-length signal".into()));
    }
    if config.runs == 0 {
        return Err(Error::InvalidParameter("runs must be at least 1".into()));
    }
    let mut rows = Vec::new();
    for (i, &omega) in config.omegas.iter().enumerate() {
        if !(omega > 0.0) {
            return Err(Error::InvalidParameter(format!("nominal speed {omega} must be positive")));
        }
        let mut raw = vec![Vec::with_capacity(config.runs); methods.len()];
        let mut n_samples = 0;
        for run in 0..config.runs {
            let seed = config
                .base_seed
                .wrapping_add((i * config.runs + run) as u64);
            let model = config.train.model(omega, config.alpha, config.epsilon, seed);
            let ts = simulate_accordion(&model)?;
            n_samples = ts.len();
            for (m, &method) in methods.iter().enumerate() {
                raw[m].push(time_estimator(method, &ts, config.peak_divisor));
            }
        }
        for (m, &method) in methods.iter().enumerate() {
            rows.push(timing_row(
                omega,
                n_samples,
                method,
                std::mem::take(&mut raw[m]),
                config.band_level,
                config.bootstrap_resamples,
                config.base_seed.wrapping_add(i as u64),
            )?);
        }
    }
    Ok(rows)
}

/// Runtime against signal length: realizations of exactly `n` samples at a
/// fixed speed and oversampling, `runs` timings per length and method.
pub fn bench_scaling(
    lengths: &[usize],
    runs: usize,
    methods: &[Method],
    base_seed: u64,
) -> Result<Vec<RuntimeRow>> {
    if lengths.iter().any(|&n| n < 4) {
        return Err(Error::InvalidParameter("signal lengths must be at least 4".into()));
    }
    if runs == 0 {
        return Err(Error::InvalidParameter("runs must be at least 1".into()));
    }
    let omega = 3178.0;
    let train = NominalTrain::default();
    let mut rows = Vec::new();
    for (i, &n) in lengths.iter().enumerate() {
        let mut model = train.model(omega, 0.10, 0.0, base_seed.wrapping_add(i as u64));
        model.window_s = [0.0, (n - 1) as f64 * model.dt_s];
        let ts = simulate_accordion(&model)?;
        debug_assert_eq!(ts.len(), n);
        for &method in methods {
            // One untimed pass warms caches and the FFT planner.
            time_estimator(method, &ts, DEFAULT_PEAK_DIVISOR);
            let raw = (0..runs)
                .map(|_| time_estimator(method, &ts, DEFAULT_PEAK_DIVISOR))
                .collect();
            rows.push(timing_row(omega, n, method, raw, 0.68, 1000, base_seed)?);
        }
    }
    Ok(rows)
}

/// Ratios of median runtime between consecutive lengths for `method`.
pub fn doubling_ratios(rows: &[RuntimeRow], method: Method) -> Vec<(usize, f64)> {
    let mine: Vec<&RuntimeRow> = rows.iter().filter(|r| r.method == method).collect();
    mine.windows(2)
        .map(|w| (w[1].n_samples, w[1].median_s() / w[0].median_s()))
        .collect()
}
