//! Synthetic two-state pulse trains.
//!
//! Two generative models are provided. The simple model jitters every sample
//! time by `δx ~ unif(-ατ, ατ)` and adds `δy ~ unif(-β, β)` to the level, which
//! produces spurious on/off flips near the edges ("digital ringing"). The
//! accordion model additionally draws each period length from
//! `unif((1-ε)T, (1+ε)T)` and warps time through a piecewise-linear clock.
//!
//! Random draws come from ChaCha8 seeded with the model's 64-bit seed. Period
//! lengths use stream 1 and per-sample noise uses stream 0, drawn in sample
//! order as `δx` then `δy`. Keeping the streams apart means the accordion
//! model with `ε = 0` consumes exactly the same sample noise as the simple
//! model.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const NOISE_STREAM: u64 = 0;
const PERIOD_STREAM: u64 = 1;

/// Phase comparisons are made with this tolerance (relative to the period) so
/// that sample times lying on a pulse edge up to rounding land on the closed
/// "on" interval.
const PHASE_TOL: f64 = 1e-9;

/// Parameters of the pulse-train generators. Times are in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseModel {
    /// Period `T`.
    pub period_s: f64,
    /// On-time `τ`.
    pub on_time_s: f64,
    /// Edge jitter as a fraction of the on-time.
    pub alpha: f64,
    /// Half-width of the uniform amplitude noise.
    pub beta: f64,
    /// Half-width of the period-length noise as a fraction of `T`.
    pub epsilon: f64,
    /// Sampling window `[A, B]`, both ends inclusive.
    pub window_s: [f64; 2],
    pub dt_s: f64,
    pub seed: u64,
}

impl PulseModel {
    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(Error::InvalidParameter(msg));
        let all = [
            self.period_s,
            self.on_time_s,
            self.alpha,
            self.beta,
            self.epsilon,
            self.window_s[0],
            self.window_s[1],
            self.dt_s,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return invalid("model parameters must be finite".into());
        }
        if self.period_s <= 0.0 {
            return invalid(format!("period {} must be positive", self.period_s));
        }
        if !(self.on_time_s > 0.0 && self.on_time_s < 0.5 * self.period_s) {
            return invalid(format!(
                "on-time {} must lie in (0, T/2) for T = {}",
                self.on_time_s, self.period_s
            ));
        }
        if !(0.0..=0.5).contains(&self.alpha) {
            return invalid(format!("alpha {} outside [0, 0.5]", self.alpha));
        }
        if !(0.0..0.5).contains(&self.beta) {
            return invalid(format!("beta {} outside [0, 0.5)", self.beta));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return invalid(format!("epsilon {} outside [0, 1]", self.epsilon));
        }
        if self.dt_s <= 0.0 {
            return invalid(format!("dt {} must be positive", self.dt_s));
        }
        if self.window_s[1] <= self.window_s[0] {
            return invalid(format!(
                "window [{}, {}] is empty",
                self.window_s[0], self.window_s[1]
            ));
        }
        Ok(())
    }

    pub fn duty(&self) -> f64 {
        self.on_time_s / self.period_s
    }

    pub fn window_len(&self) -> f64 {
        self.window_s[1] - self.window_s[0]
    }

    /// Sample times `A + i·dt` for every `i` with `A + i·dt ≤ B`.
    pub fn sample_times(&self) -> Vec<f64> {
        let [a, _] = self.window_s;
        let steps = (self.window_len() / self.dt_s + 1e-9).floor() as usize;
        (0..=steps).map(|i| a + i as f64 * self.dt_s).collect()
    }

    fn noise_rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(NOISE_STREAM);
        rng
    }

    fn period_rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(PERIOD_STREAM);
        rng
    }
}

/// The simulation protocol used by the robustness sweeps: period `60/Ω₀`,
/// fixed duty, `n_periods` periods sampled `oversample` times per period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NominalTrain {
    pub duty: f64,
    pub n_periods: usize,
    pub oversample: usize,
}

impl Default for NominalTrain {
    fn default() -> Self {
        Self {
            duty: 0.05,
            n_periods: 32,
            oversample: 32,
        }
    }
}

impl NominalTrain {
    /// Number of samples per realization (`m·n`).
    pub fn n_samples(&self) -> usize {
        self.n_periods * self.oversample
    }

    /// Model for nominal speed `omega0_rpm`. The window holds exactly
    /// `m·n` samples starting at 0.
    pub fn model(&self, omega0_rpm: f64, alpha: f64, epsilon: f64, seed: u64) -> PulseModel {
        let period = 60.0 / omega0_rpm;
        let dt = period / self.oversample as f64;
        let last = (self.n_samples().saturating_sub(1)) as f64 * dt;
        PulseModel {
            period_s: period,
            on_time_s: self.duty * period,
            alpha,
            beta: 0.0,
            epsilon,
            window_s: [0.0, last],
            dt_s: dt,
            seed,
        }
    }
}

/// Samples `times` with matching `values`; times strictly increase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::InvalidParameter(format!(
                "{} times but {} values",
                times.len(),
                values.len()
            )));
        }
        if let Some(i) = times.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::NonMonotoneTime {
                line: i as u64 + 1,
                time: times[i + 1],
            });
        }
        if times.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite sample".into()));
        }
        Ok(Self { times, values })
    }

    /// Uniformly sampled series starting at `start`.
    pub fn uniform(start: f64, dt: f64, values: Vec<f64>) -> Result<Self> {
        let times = (0..values.len()).map(|i| start + i as f64 * dt).collect();
        Self::new(times, values)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Same samples on the time axis `c·t + shift`.
    pub fn retimed(&self, scale: f64, shift: f64) -> Result<Self> {
        let times = self.times.iter().map(|t| scale * t + shift).collect();
        Self::new(times, self.values.clone())
    }

    /// The series `1 - X`.
    pub fn inverted(&self) -> Self {
        Self {
            times: self.times.clone(),
            values: self.values.iter().map(|v| 1.0 - v).collect(),
        }
    }
}

/// Ideal pulse wave: 1 when `t mod T ∈ [0, τ]`, else 0.
pub fn pulse_train(t: f64, period: f64, on_time: f64) -> Result<f64> {
    if !(period > 0.0) || !(on_time > 0.0 && on_time < period) {
        return Err(Error::InvalidParameter(format!(
            "pulse wave needs T > 0 and τ in (0, T), got T = {period}, τ = {on_time}"
        )));
    }
    Ok(pulse_level(t, period, on_time))
}

#[inline]
fn pulse_level(t: f64, period: f64, on_time: f64) -> f64 {
    let tol = PHASE_TOL * period;
    let r = t.rem_euclid(period);
    if r <= on_time + tol || period - r <= tol {
        1.0
    } else {
        0.0
    }
}

#[inline]
fn symmetric(rng: &mut ChaCha8Rng, half_width: f64) -> f64 {
    half_width * (2.0 * rng.random::<f64>() - 1.0)
}

/// Simple model: `X(t) = P(t + δx) + δy` at every sample time. `ε` is ignored.
pub fn simulate_simple(model: &PulseModel) -> Result<TimeSeries> {
    model.validate()?;
    let jitter = model.alpha * model.on_time_s;
    let mut rng = model.noise_rng();
    let times = model.sample_times();
    let values = times
        .iter()
        .map(|&t| {
            let dx = symmetric(&mut rng, jitter);
            let dy = symmetric(&mut rng, model.beta);
            pulse_level(t + dx, model.period_s, model.on_time_s) + dy
        })
        .collect();
    Ok(TimeSeries { times, values })
}

/// Drawn period lengths of one accordion realization.
#[derive(Debug, Clone, PartialEq)]
pub struct AccordionRealization {
    periods: Vec<f64>,
    /// `cumulative[j] = Q₁ + … + Q_j`, with `cumulative[0] = 0`.
    cumulative: Vec<f64>,
}

impl AccordionRealization {
    pub fn from_periods(periods: Vec<f64>) -> Result<Self> {
        if periods.is_empty() {
            return Err(Error::EmptyInput);
        }
        if periods.iter().any(|q| !(q.is_finite() && *q > 0.0)) {
            return Err(Error::InvalidParameter("period lengths must be positive".into()));
        }
        let mut cumulative = Vec::with_capacity(periods.len() + 1);
        cumulative.push(0.0);
        let mut acc = 0.0;
        for q in &periods {
            acc += q;
            cumulative.push(acc);
        }
        Ok(Self { periods, cumulative })
    }

    pub fn periods(&self) -> &[f64] {
        &self.periods
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn total(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }
}

/// Draws `Q_i ~ unif((1-ε)T, (1+ε)T)` until their sum reaches the window
/// length.
pub fn draw_accordion_periods(model: &PulseModel) -> Result<AccordionRealization> {
    model.validate()?;
    let (t, eps) = (model.period_s, model.epsilon);
    let width = model.window_len();
    let mut rng = model.period_rng();
    let mut periods = Vec::with_capacity((width / ((1.0 - eps).max(0.05) * t)) as usize + 2);
    let mut total = 0.0;
    while total < width {
        let q = if eps == 0.0 {
            t
        } else {
            loop {
                let q = (1.0 - eps) * t + 2.0 * eps * t * rng.random::<f64>();
                if q > 0.0 {
                    break q;
                }
            }
        };
        periods.push(q);
        total += q;
    }
    AccordionRealization::from_periods(periods)
}

/// Warped clock `φ(s)`: maps the `j`-th drawn period linearly onto
/// `[jT, (j+1)T]`.
pub fn reparameterize(s: f64, realization: &AccordionRealization, period: f64) -> Result<f64> {
    let total = realization.total();
    if !(0.0..=total).contains(&s) {
        return Err(Error::OutOfRange {
            value: s,
            low: 0.0,
            high: total,
        });
    }
    Ok(warp(s, realization, period))
}

fn warp(s: f64, realization: &AccordionRealization, period: f64) -> f64 {
    let cum = &realization.cumulative;
    // σ(s) = max{j | cum[j] <= s}; s == total maps onto the last endpoint.
    let sigma = cum.partition_point(|&c| c <= s) - 1;
    if sigma >= realization.periods.len() {
        return period * sigma as f64;
    }
    period * sigma as f64 + period / realization.periods[sigma] * (s - cum[sigma])
}

/// Accordion model: `X(s) = P(A + φ(s - A) + δx) + δy`. The warped clock
/// starts at the window start `A`, so `ε = 0` reproduces [`simulate_simple`].
pub fn simulate_accordion(model: &PulseModel) -> Result<TimeSeries> {
    Ok(simulate_accordion_with_truth(model)?.0)
}

/// As [`simulate_accordion`], also returning the true rising-edge times
/// inside the window.
pub fn simulate_accordion_with_truth(model: &PulseModel) -> Result<(TimeSeries, Vec<f64>)> {
    let realization = draw_accordion_periods(model)?;
    let a = model.window_s[0];
    let jitter = model.alpha * model.on_time_s;
    let mut rng = model.noise_rng();
    let times = model.sample_times();
    let values = times
        .iter()
        .map(|&t| {
            let phase = a + warp((t - a).max(0.0), &realization, model.period_s);
            let dx = symmetric(&mut rng, jitter);
            let dy = symmetric(&mut rng, model.beta);
            pulse_level(phase + dx, model.period_s, model.on_time_s) + dy
        })
        .collect();
    let edges = accordion_rising_edges(model, &realization);
    Ok((TimeSeries { times, values }, edges))
}

/// Rising edges of the noise-free simple model inside the window.
pub fn simple_rising_edges(model: &PulseModel) -> Vec<f64> {
    let [a, b] = model.window_s;
    let t = model.period_s;
    let first = (a / t).ceil() as i64;
    let last = (b / t).floor() as i64;
    (first..=last).map(|k| k as f64 * t).collect()
}

fn accordion_rising_edges(model: &PulseModel, realization: &AccordionRealization) -> Vec<f64> {
    // Edges sit where A + φ(s) is a multiple of T. Within the j-th segment
    // φ runs linearly over [jT, (j+1)T], so each segment holds at most one.
    let [a, b] = model.window_s;
    let t = model.period_s;
    let offset = a.rem_euclid(t);
    let lead = if offset == 0.0 { 0.0 } else { t - offset };
    let mut edges = Vec::new();
    for (j, q) in realization.periods.iter().enumerate() {
        let s = realization.cumulative[j] + lead / t * q;
        if a + s <= b {
            edges.push(a + s);
        }
    }
    edges
}
