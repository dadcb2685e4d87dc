//! Cluster counting for two-dimensional two-state signals.
//!
//! The super-level samples of an image form a point cloud in the plane; its
//! diagram is the weight list of a minimum spanning tree. As on the line, the
//! widest jump separates short within-cluster edges from long between-cluster
//! edges. There is no window to trim in 2-D, so the count reported is the
//! number of components, `#{d > μ} + 1`.

use serde::{Deserialize, Serialize};

use crate::detect::split_threshold;
use crate::error::{Error, Result};
use crate::persistence::{diagram_point_cloud, PersistenceDiagram, PointCloud};
use crate::signal::TimeSeries;

/// Row-major image with strictly increasing axis coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageGrid {
    rows: Vec<f64>,
    cols: Vec<f64>,
    values: Vec<f64>,
}

impl ImageGrid {
    pub fn new(rows: Vec<f64>, cols: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if rows.is_empty() || cols.is_empty() {
            return Err(Error::EmptyInput);
        }
        if values.len() != rows.len() * cols.len() {
            return Err(Error::InvalidParameter(format!(
                "{} values for a {}x{} grid",
                values.len(),
                rows.len(),
                cols.len()
            )));
        }
        for axis in [&rows, &cols] {
            if axis.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(Error::InvalidParameter(
                    "axis coordinates must strictly increase".into(),
                ));
            }
        }
        Ok(Self { rows, cols, values })
    }

    /// `Y(s, t) = X₁(s) · X₂(t)`.
    pub fn outer_product(x1: &TimeSeries, x2: &TimeSeries) -> Result<Self> {
        let values = x1
            .values()
            .iter()
            .flat_map(|a| x2.values().iter().map(move |b| a * b))
            .collect();
        Self::new(x1.times().to_vec(), x2.times().to_vec(), values)
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows.len(), self.cols.len())
    }

    pub fn value(&self, r: usize, c: usize) -> f64 {
        self.values[r * self.cols.len() + c]
    }

    /// Coordinates `(row, col)` of the pixels above `level`.
    pub fn super_level_cloud(&self, level: f64) -> PointCloud {
        let mut cloud = PointCloud::new(2);
        for (r, &y) in self.rows.iter().enumerate() {
            for (c, &x) in self.cols.iter().enumerate() {
                if self.value(r, c) > level {
                    cloud.push(&[y, x]).expect("finite 2-D point");
                }
            }
        }
        cloud
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageCount {
    pub clusters: usize,
    /// Absent when the diagram is empty (a single pixel).
    pub mu: Option<f64>,
    pub split_ratio: Option<f64>,
    pub points: usize,
    #[serde(skip)]
    pub diagram: PersistenceDiagram,
}

/// Number of clusters among the pixels above `level`.
pub fn image_pulse_count(img: &ImageGrid, level: f64) -> Result<ImageCount> {
    let cloud = img.super_level_cloud(level);
    if cloud.is_empty() {
        return Err(Error::EmptySupport);
    }
    let diagram = diagram_point_cloud(&cloud)?;
    if diagram.is_empty() {
        return Ok(ImageCount {
            clusters: 1,
            mu: None,
            split_ratio: None,
            points: cloud.len(),
            diagram,
        });
    }
    let split = split_threshold(&diagram)?;
    Ok(ImageCount {
        clusters: diagram.count_above(split.mu) + 1,
        mu: Some(split.mu),
        split_ratio: Some(split.ratio).filter(|r| r.is_finite()),
        points: cloud.len(),
        diagram,
    })
}
