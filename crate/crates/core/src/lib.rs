//! Pulse counting and speed estimation for two-state signals corrupted by
//! edge ringing and irregular pulse spacing, using 0-dimensional persistent
//! homology of the set of "on" sample times.
//!
//! The pipeline is: threshold the signal ([`persistence::extract_support`]),
//! take the consecutive gaps as a persistence diagram
//! ([`persistence::diagram_1d`]), split the diagram at its widest jump
//! ([`detect::split_threshold`]) and count the long gaps
//! ([`detect::rpm_persistence`]). A Fourier estimator
//! ([`spectral::rpm_fourier`]) and a Monte-Carlo harness
//! ([`harness::run_sweep`]) are included for comparison.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod detect;
pub mod error;
pub mod harness;
pub mod image;
pub mod io;
pub mod persistence;
pub mod signal;
pub mod spectral;

pub use detect::{
    count_pulses, rpm_persistence, split_threshold, trimmed_window, Method, PersistenceOptions,
    PulseCount, ResultRecord, RpmEstimate,
};
pub use error::{Error, Result};
pub use harness::{run_sweep, Plane, SweepConfig, SweepResult};
pub use persistence::{
    bottleneck, diagram_1d, diagram_point_cloud, extract_support, hausdorff, PersistenceDiagram,
    PointCloud, SupportSet,
};
pub use signal::{
    pulse_train, simulate_accordion, simulate_simple, NominalTrain, PulseModel, TimeSeries,
};
pub use spectral::{one_sided_spectrum, rpm_fourier, Spectrum};
