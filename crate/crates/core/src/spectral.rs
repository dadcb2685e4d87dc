//! Fourier baseline: the speed is read off the lowest spectral line that
//! reaches a fixed fraction of the tallest one.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::detect::{Method, RpmEstimate};
use crate::error::{Error, Result};
use crate::signal::TimeSeries;

/// Relative tolerance on sample spacing for a series to count as uniform.
pub const UNIFORM_TOL: f64 = 1e-9;

/// Default peak divisor `w`: a bin qualifies when its amplitude exceeds
/// `A_max / w`.
pub const DEFAULT_PEAK_DIVISOR: f64 = 3.0;

/// One-sided magnitude spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub freqs: Vec<f64>,
    pub amps: Vec<f64>,
}

impl Spectrum {
    pub fn resolution(&self) -> f64 {
        self.freqs.get(1).copied().unwrap_or(0.0)
    }

    /// Index of the tallest bin.
    pub fn peak(&self) -> usize {
        self.amps
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, &a)| {
                if a > best.1 {
                    (i, a)
                } else {
                    best
                }
            })
            .0
    }
}

/// Sample spacing of a uniformly sampled series.
pub fn uniform_spacing(ts: &TimeSeries) -> Result<f64> {
    let t = ts.times();
    if t.len() < 2 {
        return Err(Error::InvalidParameter("need at least two samples".into()));
    }
    let dt = (t[t.len() - 1] - t[0]) / (t.len() - 1) as f64;
    let worst = t
        .windows(2)
        .map(|w| ((w[1] - w[0]) - dt).abs() / dt)
        .fold(0.0, f64::max);
    // Spacing computed from absolute times loses precision far from zero.
    let slack = f64::EPSILON * t[0].abs().max(t[t.len() - 1].abs()) / dt * 4.0;
    if worst > UNIFORM_TOL + slack {
        return Err(Error::NonUniformSampling(worst));
    }
    Ok(dt)
}

/// Magnitude spectrum over `[0, Nyquist]` after removing the mean. No
/// window and no zero padding, so bins are spaced `1 / (N·dt)`.
///
/// Non-DC bins below Nyquist are doubled so that a unit-amplitude sinusoid
/// shows amplitude 1 at its bin.
pub fn one_sided_spectrum(ts: &TimeSeries) -> Result<Spectrum> {
    let n = ts.len();
    if n < 4 {
        return Err(Error::InvalidParameter(format!(
            "spectrum needs at least 4 samples, got {n}"
        )));
    }
    let dt = uniform_spacing(ts)?;
    let mean = ts.values().iter().sum::<f64>() / n as f64;
    let mut buf: Vec<Complex<f64>> = ts
        .values()
        .iter()
        .map(|&v| Complex::new(v - mean, 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);

    let half = n / 2;
    let df = 1.0 / (n as f64 * dt);
    let scale = 1.0 / n as f64;
    let (freqs, amps) = (0..=half)
        .map(|k| {
            let doubled = k != 0 && !(n.is_multiple_of(2) && k == half);
            let a = buf[k].norm() * scale * if doubled { 2.0 } else { 1.0 };
            (k as f64 * df, a)
        })
        .unzip();
    Ok(Spectrum { freqs, amps })
}

/// Fourier speed estimate: 60 × the frequency of the lowest non-DC bin with
/// amplitude above `A_max / w`.
pub fn rpm_fourier(ts: &TimeSeries, w: f64) -> Result<RpmEstimate> {
    if !(w > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "peak divisor must exceed 1, got {w}"
        )));
    }
    let spec = one_sided_spectrum(ts)?;
    fourier_from_spectrum(&spec, w)
}

pub(crate) fn fourier_from_spectrum(spec: &Spectrum, w: f64) -> Result<RpmEstimate> {
    let a_max = spec.amps.iter().copied().fold(0.0, f64::max);
    if !(a_max > 0.0) {
        return Err(Error::NoPeak);
    }
    let cut = a_max / w;
    let k = spec.amps[1..]
        .iter()
        .position(|&a| a > cut)
        .map(|i| i + 1)
        .ok_or(Error::NoPeak)?;
    Ok(RpmEstimate {
        omega: spec.freqs[k] * 60.0,
        pulses: 0,
        span_s: record_length(spec),
        method: Method::Fourier,
        detail: None,
    })
}

/// `N·dt`, recovered from the bin spacing.
fn record_length(spec: &Spectrum) -> f64 {
    let df = spec.resolution();
    if df > 0.0 {
        1.0 / df
    } else {
        0.0
    }
}
