//! Pulse counting and speed estimation from the gap diagram.
//!
//! The support of a two-state signal (times above ½) splits into clusters,
//! one per true pulse. Gaps inside a cluster are short (sampling steps and
//! ringing flips); gaps between clusters are close to the off-time `T - τ`.
//! The widest jump in the sorted gap diagram separates the two groups, and
//! the long gaps mark the pulse boundaries.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::persistence::{diagram_1d, extract_support, PersistenceDiagram, SupportSet};
use crate::signal::TimeSeries;

/// Default minimum ratio `d_{j+1} / d_j` for a split to count as clean.
pub const DEFAULT_RHO_MIN: f64 = 3.0;

/// Location of the widest jump in a sorted diagram.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Split {
    /// Midpoint of the widest jump.
    pub mu: f64,
    /// Index of the last point below the jump.
    pub index: usize,
    /// `d_{j+1} / d_j`; infinite when `d_j = 0`.
    pub ratio: f64,
}

/// Result of counting the pulses of one signal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseCount {
    pub count: usize,
    pub mu: f64,
    pub split_ratio: f64,
    pub a_low: f64,
    pub a_high: f64,
    pub valid_split: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Persistence,
    Fourier,
}

/// Speed estimate in pulses per minute.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RpmEstimate {
    pub omega: f64,
    pub pulses: usize,
    pub span_s: f64,
    pub method: Method,
    /// Present for the persistence method.
    pub detail: Option<PulseCount>,
}

/// Flat record written by the CLI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub method: Method,
    pub omega_rpm: f64,
    pub pulse_count: Option<usize>,
    pub mu: Option<f64>,
    pub split_ratio: Option<f64>,
    pub a_low_s: Option<f64>,
    pub a_high_s: Option<f64>,
    pub valid_split: Option<bool>,
}

impl From<&RpmEstimate> for ResultRecord {
    fn from(e: &RpmEstimate) -> Self {
        let d = e.detail.as_ref();
        Self {
            method: e.method,
            omega_rpm: e.omega,
            pulse_count: d.map(|d| d.count),
            mu: d.map(|d| d.mu),
            split_ratio: d.map(|d| d.split_ratio).filter(|r| r.is_finite()),
            a_low_s: d.map(|d| d.a_low),
            a_high_s: d.map(|d| d.a_high),
            valid_split: d.map(|d| d.valid_split),
        }
    }
}

/// Widest jump between consecutive diagram points (first one on ties).
pub fn split_threshold(dgm: &PersistenceDiagram) -> Result<Split> {
    let d = dgm.deaths();
    if d.len() < 2 {
        return Err(Error::InsufficientStructure(d.len()));
    }
    let mut index = 0;
    let mut widest = f64::NEG_INFINITY;
    for (k, w) in d.windows(2).enumerate() {
        let jump = w[1] - w[0];
        if jump > widest {
            widest = jump;
            index = k;
        }
    }
    let (lo, hi) = (d[index], d[index + 1]);
    let ratio = if lo == 0.0 { f64::INFINITY } else { hi / lo };
    Ok(Split {
        mu: 0.5 * (lo + hi),
        index,
        ratio,
    })
}

/// `#{d > μ} - 1`, floored at zero.
///
/// `μ` sits strictly inside a jump of the diagram, so `d > μ` and `d ≥ μ`
/// select the same points; the strict form is used everywhere.
pub fn count_pulses(dgm: &PersistenceDiagram, mu: f64) -> usize {
    dgm.count_above(mu).saturating_sub(1)
}

/// First and last support points that follow a gap longer than `mu`.
pub fn trimmed_window(support: &SupportSet, mu: f64) -> Result<(f64, f64)> {
    let t = support.times();
    let mut bounds = None;
    for w in t.windows(2) {
        if w[1] - w[0] > mu {
            bounds = match bounds {
                None => Some((w[1], w[1])),
                Some((lo, _)) => Some((lo, w[1])),
            };
        }
    }
    bounds.ok_or(Error::NoSplit { mu })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PersistenceOptions {
    /// Analyse `1 - X`, counting high stretches between valleys.
    pub invert: bool,
    pub rho_min: f64,
    pub level: f64,
}

impl Default for PersistenceOptions {
    fn default() -> Self {
        Self {
            invert: false,
            rho_min: DEFAULT_RHO_MIN,
            level: 0.5,
        }
    }
}

/// Counts pulses in `support` from its gap diagram.
pub fn count_support(support: &SupportSet, rho_min: f64) -> Result<PulseCount> {
    let dgm = diagram_1d(support)?;
    let split = split_threshold(&dgm)?;
    let count = count_pulses(&dgm, split.mu);
    let (a_low, a_high) = trimmed_window(support, split.mu)?;
    Ok(PulseCount {
        count,
        mu: split.mu,
        split_ratio: split.ratio,
        a_low,
        a_high,
        valid_split: split.ratio >= rho_min,
    })
}

/// Counts the pulses of a series.
pub fn count_series(ts: &TimeSeries, opts: &PersistenceOptions) -> Result<PulseCount> {
    let support = if opts.invert {
        extract_support(&ts.inverted(), opts.level)?
    } else {
        extract_support(ts, opts.level)?
    };
    count_support(&support, opts.rho_min)
}

/// Persistence speed estimate: `60 · count / (a_high - a_low)` with times in
/// seconds. A split below `rho_min` is reported through `valid_split`
/// rather than as an error.
pub fn rpm_persistence(ts: &TimeSeries, opts: &PersistenceOptions) -> Result<RpmEstimate> {
    let pc = count_series(ts, opts)?;
    let span = pc.a_high - pc.a_low;
    if !(span > 0.0) {
        return Err(Error::DegenerateWindow);
    }
    Ok(RpmEstimate {
        omega: 60.0 * pc.count as f64 / span,
        pulses: pc.count,
        span_s: span,
        method: Method::Persistence,
        detail: Some(pc),
    })
}
