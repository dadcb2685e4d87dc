//! CSV and JSON readers and writers.
//!
//! Formats (header line first, LF endings):
//! * time series: `time_s,value`
//! * analog recording: `time_s,volts`, binarized at a voltage threshold
//! * diagram: `death`, sorted ascending (or a JSON array)
//! * spectrum: `freq_hz,amplitude`
//! * sweep heatmap and runtime tables, see [`write_heatmap_csv`] and
//!   [`write_runtime_csv`]

use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::detect::Method;
use crate::error::{Error, Result};
use crate::harness::{RuntimeRow, SweepResult};
use crate::persistence::PersistenceDiagram;
use crate::signal::TimeSeries;
use crate::spectral::Spectrum;

pub const SERIES_HEADER: [&str; 2] = ["time_s", "value"];
pub const RECORDING_HEADER: [&str; 2] = ["time_s", "volts"];
pub const DEFAULT_THRESHOLD_VOLTS: f64 = 2.5;

/// An analog capture before thresholding.
#[derive(Debug, Clone, PartialEq)]
pub struct RawRecording {
    pub times: Vec<f64>,
    pub volts: Vec<f64>,
    pub threshold_volts: f64,
}

impl RawRecording {
    /// 1 above the threshold, 0 otherwise.
    pub fn binarize(&self) -> Result<TimeSeries> {
        let values = self
            .volts
            .iter()
            .map(|&v| if v > self.threshold_volts { 1.0 } else { 0.0 })
            .collect();
        TimeSeries::new(self.times.clone(), values)
    }
}

fn parse_err(line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn csv_err(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        kind => parse_err(line, format!("{kind:?}")),
    }
}

/// Reads a two-column numeric CSV with the given header, streaming rows.
fn read_pairs<R: Read>(reader: R, header: [&str; 2]) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut record = csv::StringRecord::new();
    if !rdr.read_record(&mut record).map_err(csv_err)? {
        return Err(parse_err(1, "empty file"));
    }
    if record.len() != 2 || record[0] != *header[0] || record[1] != *header[1] {
        return Err(parse_err(
            1,
            format!("expected header {},{}", header[0], header[1]),
        ));
    }
    let (mut a, mut b) = (Vec::new(), Vec::new());
    let mut last = f64::NEG_INFINITY;
    while rdr.read_record(&mut record).map_err(csv_err)? {
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() != 2 {
            return Err(parse_err(line, format!("expected 2 fields, got {}", record.len())));
        }
        let num = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| parse_err(line, format!("not a finite number: {s:?}")))
        };
        let t = num(&record[0])?;
        let v = num(&record[1])?;
        if !(t > last) {
            return Err(Error::NonMonotoneTime { line, time: t });
        }
        last = t;
        a.push(t);
        b.push(v);
    }
    if a.is_empty() {
        return Err(parse_err(2, "no data rows"));
    }
    Ok((a, b))
}

pub fn read_series_csv<R: Read>(reader: R) -> Result<TimeSeries> {
    let (t, v) = read_pairs(reader, SERIES_HEADER)?;
    TimeSeries::new(t, v)
}

pub fn write_series_csv<W: Write>(ts: &TimeSeries, mut w: W) -> Result<()> {
    writeln!(w, "{}", SERIES_HEADER.join(","))?;
    for (t, v) in ts.times().iter().zip(ts.values()) {
        writeln!(w, "{t},{v}")?;
    }
    Ok(())
}

pub fn read_recording<R: Read>(reader: R, threshold_volts: f64) -> Result<RawRecording> {
    let (times, volts) = read_pairs(reader, RECORDING_HEADER)?;
    Ok(RawRecording {
        times,
        volts,
        threshold_volts,
    })
}

/// Loads a `time_s,volts` capture and binarizes it.
pub fn load_recording(path: impl AsRef<Path>, threshold_volts: f64) -> Result<TimeSeries> {
    let file = BufReader::new(File::open(path)?);
    read_recording(file, threshold_volts)?.binarize()
}

/// Writes `value × high_volts` as a recording (e.g. 0/5 V logic).
pub fn write_recording_csv<W: Write>(ts: &TimeSeries, high_volts: f64, mut w: W) -> Result<()> {
    writeln!(w, "{}", RECORDING_HEADER.join(","))?;
    for (t, v) in ts.times().iter().zip(ts.values()) {
        writeln!(w, "{t},{}", v * high_volts)?;
    }
    Ok(())
}

/// Loads either a recording (binarized at `threshold_volts`) or a plain
/// series, chosen by the header line.
pub fn load_signal(path: impl AsRef<Path>, threshold_volts: f64) -> Result<TimeSeries> {
    let mut file = BufReader::new(File::open(path)?);
    let mut first = String::new();
    file.read_line(&mut first)?;
    let header: String = first.chars().filter(|c| !c.is_whitespace()).collect();
    let rows = first.as_bytes().chain(file);
    if header == RECORDING_HEADER.join(",") {
        read_recording(rows, threshold_volts)?.binarize()
    } else {
        read_series_csv(rows)
    }
}

pub fn write_diagram_csv<W: Write>(dgm: &PersistenceDiagram, mut w: W) -> Result<()> {
    writeln!(w, "death")?;
    for d in dgm.deaths() {
        writeln!(w, "{d}")?;
    }
    Ok(())
}

pub fn read_diagram_csv<R: Read>(reader: R) -> Result<PersistenceDiagram> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut record = csv::StringRecord::new();
    if !rdr.read_record(&mut record).map_err(csv_err)? || &record[0] != "death" {
        return Err(parse_err(1, "expected header death"));
    }
    let mut deaths = Vec::new();
    while rdr.read_record(&mut record).map_err(csv_err)? {
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let d = record[0]
            .parse::<f64>()
            .map_err(|_| parse_err(line, format!("not a number: {:?}", &record[0])))?;
        deaths.push(d);
    }
    PersistenceDiagram::new(deaths)
}

pub fn write_spectrum_csv<W: Write>(spec: &Spectrum, mut w: W) -> Result<()> {
    writeln!(w, "freq_hz,amplitude")?;
    for (f, a) in spec.freqs.iter().zip(&spec.amps) {
        writeln!(w, "{f},{a}")?;
    }
    Ok(())
}

pub const HEATMAP_HEADER: &str = "omega0,noise_param,err_persistence,err_fourier,band_lo_p,band_hi_p,band_lo_f,band_hi_f,failures_p,failures_f";

/// One row per cell. Bands bracket the mean speed estimate in RPM. Runtime
/// columns are left out so the table is reproducible byte for byte.
pub fn write_heatmap_csv<W: Write>(res: &SweepResult, mut w: W) -> Result<()> {
    writeln!(w, "{HEATMAP_HEADER}")?;
    for c in &res.cells {
        let (p, f) = (&c.persistence, &c.fourier);
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            c.omega0,
            c.noise,
            p.rel_error,
            f.rel_error,
            p.band.0,
            p.band.1,
            f.band.0,
            f.band.1,
            p.failures,
            f.failures
        )?;
    }
    Ok(())
}

pub const RUNTIME_HEADER: &str = "omega0,n_samples,method,mean_s,band_lo_s,band_hi_s";

pub fn write_runtime_csv<W: Write>(rows: &[RuntimeRow], mut w: W) -> Result<()> {
    writeln!(w, "{RUNTIME_HEADER}")?;
    for r in rows {
        let method = match r.method {
            Method::Persistence => "persistence",
            Method::Fourier => "fourier",
        };
        writeln!(
            w,
            "{},{},{},{:e},{:e},{:e}",
            r.omega0, r.n_samples, method, r.mean_s, r.band.0, r.band.1
        )?;
    }
    Ok(())
}
