//! Schmidt decomposition of the two-photon amplitude.
//!
//! The singular-value spectrum of the weighted kernel
//! `sqrt(w_a) Phi1(nu_a, nu_b) sqrt(w_b)` gives the Schmidt coefficients
//! rho_n of the single-pair state; `K = 1 / sum rho_n^2` is the
//! degree-of-factorability and `P_r = 1/K` the photon-pair purity.
//!
//! K is cutoff-divergent for frequency-anticorrelated states (mu = 0), so
//! results always carry the window they were computed on.

use crate::error::{Error, Result};
use crate::quad::FreqGrid;
use crate::spectral::SourceParams;
use nalgebra::DMatrix;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct SchmidtResult {
    /// Normalized squared singular values, descending, summing to one.
    pub coefficients: Vec<f64>,
    /// Degree-of-factorability K = 1 / sum rho_n^2, K >= 1.
    pub k: f64,
    /// Photon-pair purity P_r = 1/K.
    pub purity: f64,
    /// Truncation half-width the kernel was sampled on.
    pub window: f64,
}

/// Schmidt decomposition of an arbitrary real kernel on the square grid.
pub fn schmidt_of_kernel(
    kernel: impl Fn(f64, f64) -> f64,
    grid: &FreqGrid,
) -> Result<SchmidtResult> {
    let n = grid.len();
    let sqrt_w: Vec<f64> = grid.weights().iter().map(|&w| w.sqrt()).collect();
    let m = DMatrix::from_fn(n, n, |a, b| {
        sqrt_w[a] * kernel(grid.nodes()[a], grid.nodes()[b]) * sqrt_w[b]
    });
    let svd = m.svd(false, false);
    let mut rho: Vec<f64> = svd.singular_values.iter().map(|&s| s * s).collect();
    rho.sort_by(|a, b| b.partial_cmp(a).expect("singular values are finite"));
    let total: f64 = rho.iter().sum();
    if total <= 0.0 || total.is_nan() {
        return Err(Error::NumericalFailure(
            "Schmidt decomposition of an all-zero amplitude".into(),
        ));
    }
    rho.iter_mut().for_each(|r| *r /= total);
    let inv_k: f64 = rho.iter().map(|&r| r * r).sum();
    let k = 1.0 / inv_k;
    Ok(SchmidtResult {
        coefficients: rho,
        k,
        purity: inv_k,
        window: grid.window(),
    })
}

/// Schmidt decomposition of the two-photon amplitude of the source.
pub fn schmidt_decompose(source: &SourceParams, grid: &FreqGrid) -> Result<SchmidtResult> {
    schmidt_of_kernel(|nu_s, nu_i| source.jsa_single(nu_s, nu_i), grid)
}
