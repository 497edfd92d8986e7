//! Gauss-Legendre quadrature grids for the spectral integrals.
//!
//! All integrands in the pipeline are smooth (Gaussians, sincs, prolate
//! modes), so Gauss-Legendre converges spectrally and 64 nodes per axis
//! is plenty for the default windows.

use crate::error::{Error, Result};
use serde::Serialize;

/// Nodes and weights of a Gauss-Legendre rule on `[-1, 1]`.
///
/// Nodes are strictly increasing and exactly antisymmetric about zero;
/// the weight list is palindromic.
fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for k in 0..m {
        // Tricomi-style initial guess for the k-th root (from above).
        let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_deriv(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-15 * x.abs().max(1.0) {
                let (_, d2) = legendre_and_deriv(n, x);
                dp = d2;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // The guess above walks roots from +1 downwards.
        nodes[n - 1 - k] = x;
        weights[n - 1 - k] = w;
        nodes[k] = -x;
        weights[k] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Legendre polynomial `P_n(x)` and its derivative via the Bonnet recurrence.
fn legendre_and_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A quadrature grid over a symmetric frequency interval `[-W, W]`
/// (frequencies in units of the pump bandwidth sigma).
#[derive(Debug, Clone, Serialize)]
pub struct FreqGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    window: f64,
}

impl FreqGrid {
    /// Gauss-Legendre grid with `n` nodes on `[-window, window]`.
    pub fn gauss_legendre(window: f64, n: usize) -> Result<Self> {
        if !window.is_finite() || window <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "frequency window must be positive and finite, got {window}"
            )));
        }
        if n < 2 {
            return Err(Error::InvalidInput(format!(
                "need at least 2 quadrature nodes, got {n}"
            )));
        }
        let (x, w) = gauss_legendre_unit(n);
        let nodes = x.iter().map(|&t| t * window).collect();
        let weights = w.iter().map(|&t| t * window).collect();
        Ok(Self {
            nodes,
            weights,
            window,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Half-width of the covered interval.
    pub fn window(&self) -> f64 {
        self.window
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Quadrature of a function over the grid's interval.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Quadrature of tabulated samples (one per node).
    pub fn integrate_samples(&self, samples: &[f64]) -> f64 {
        debug_assert_eq!(samples.len(), self.len());
        self.weights.iter().zip(samples).map(|(&w, &s)| w * s).sum()
    }
}
