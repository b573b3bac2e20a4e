//! Conjugate families with closed-form prior predictives.

use crate::error::{Error, Result};

pub mod bernoulli_beta;
pub mod location_normal;
pub mod location_scale;

pub use bernoulli_beta::BernoulliBetaModel;
pub use location_normal::LocationNormalModel;
pub use location_scale::{LocationScaleModel, ScaleForm};

/// Equal-width cells on `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridAxis {
    pub lo: f64,
    pub hi: f64,
    pub cells: usize,
}

/// Prior mass that an exported axis must cover.
pub const MIN_COVERAGE: f64 = 1.0 - 1e-6;

impl GridAxis {
    pub fn new(lo: f64, hi: f64, cells: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) || cells == 0 {
            return Err(Error::InvalidGrid(format!("axis [{lo}, {hi}] with {cells} cells")));
        }
        Ok(Self { lo, hi, cells })
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.cells as f64
    }

    /// Cell edges, `cells + 1` of them.
    pub fn edges(&self) -> Vec<f64> {
        let n = self.cells as f64;
        (0..=self.cells)
            .map(|i| {
                let i = i as f64;
                (self.lo * (n - i) + self.hi * i) / n
            })
            .collect()
    }

    // one rounding per point, so e.g. 4.1 prints as 4.1
    pub fn midpoints(&self) -> Vec<f64> {
        let n2 = 2.0 * self.cells as f64;
        (0..self.cells)
            .map(|i| {
                let k = (2 * i + 1) as f64;
                (self.lo * (n2 - k) + self.hi * k) / n2
            })
            .collect()
    }
}

/// Turns per-cell prior and posterior masses into a grid and the conditional
/// prior predictive values m(x | cell) = m(x) Pi(cell | x) / Pi(cell).
pub(crate) fn export_cells(
    labels: Vec<f64>,
    prior: Vec<f64>,
    posterior: Vec<f64>,
    m: f64,
) -> Result<(crate::rb_core::ParamGrid, Vec<f64>)> {
    let covered: f64 = prior.iter().sum();
    if covered < MIN_COVERAGE {
        return Err(Error::InvalidGrid(format!("axis covers only {covered} of the prior mass")));
    }
    if let Some(i) = prior.iter().position(|&p| !(p > 0.0)) {
        return Err(Error::InvalidGrid(format!(
            "cell {i} has no prior mass at double precision; narrow the axis"
        )));
    }
    let cond: Vec<f64> = prior.iter().zip(&posterior).map(|(p, q)| m * q.max(0.0) / p).collect();
    let grid = crate::rb_core::ParamGrid::from_weights(labels.into_iter().map(Into::into).collect(), &prior)?;
    Ok((grid, cond))
}
