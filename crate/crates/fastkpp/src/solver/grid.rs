//! Radial finite-volume grids with the `r^{N-1} dr` cell measure.

use crate::error::{Error, Result};
use crate::quad::sphere_surface;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum GridMode {
    /// Cell edges from 0 to `r_max` with constant spacing.
    Uniform,
    /// Edges geometric from `r_inner` to `r_max`; constant spacing in ln r.
    LogUniform { r_inner: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GridSpec {
    pub mode: GridMode,
    pub r_max: f64,
    pub cells: usize,
    pub dim: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    pub dim: u32,
    pub mode: GridMode,
    /// `cells + 1` strictly increasing edges.
    pub edges: Vec<f64>,
    pub centers: Vec<f64>,
    /// Cell volumes in the radial measure, `(r_{i+1}^N - r_i^N)/N`.
    pub volumes: Vec<f64>,
}

pub const MIN_CELLS: usize = 64;

pub fn build_grid(spec: &GridSpec) -> Result<RadialGrid> {
    if spec.cells < MIN_CELLS {
        return Err(Error::ParameterDomain(format!(
            "grid needs at least {MIN_CELLS} cells, got {}",
            spec.cells
        )));
    }
    if spec.dim < 1 {
        return Err(Error::ParameterDomain("grid dimension must be >= 1".into()));
    }
    if !(spec.r_max.is_finite() && spec.r_max > 0.0) {
        return Err(Error::ParameterDomain(format!("r_max must be positive, got {}", spec.r_max)));
    }
    let n = spec.cells;
    let edges: Vec<f64> = match spec.mode {
        GridMode::Uniform => (0..=n).map(|i| spec.r_max * i as f64 / n as f64).collect(),
        GridMode::LogUniform { r_inner } => {
            if !(r_inner > 0.0 && r_inner < spec.r_max) {
                return Err(Error::ParameterDomain(format!(
                    "log grid needs 0 < r_inner < r_max, got r_inner = {r_inner}"
                )));
            }
            let ratio = (spec.r_max / r_inner).ln();
            (0..=n).map(|i| r_inner * (ratio * i as f64 / n as f64).exp()).collect()
        }
    };
    for w in edges.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::Numeric("grid edges are not strictly increasing".into()));
        }
    }
    let nf = spec.dim as f64;
    let centers: Vec<f64> = edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    let volumes: Vec<f64> =
        edges.windows(2).map(|w| (w[1].powf(nf) - w[0].powf(nf)) / nf).collect();
    Ok(RadialGrid { dim: spec.dim, mode: spec.mode, edges, centers, volumes })
}

impl RadialGrid {
    pub fn cells(&self) -> usize {
        self.centers.len()
    }

    pub fn r_max(&self) -> f64 {
        *self.edges.last().unwrap()
    }

    /// Full-space mass of a cell-average vector: `A_N * sum u_i vol_i`.
    pub fn mass_of(&self, u: &[f64]) -> f64 {
        let surf = sphere_surface(self.dim);
        surf * u.iter().zip(&self.volumes).map(|(&ui, &vi)| ui * vi).sum::<f64>()
    }
}
