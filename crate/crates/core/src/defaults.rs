//! Default numerics shared by the library, CLI and tests.
//!
//! The defaults resolve every quantity of interest at the grid resolutions
//! used throughout: 64 Gauss-Legendre nodes per frequency axis, a +-4 sigma
//! truncation window for unfiltered integrals, and prolate mode retention
//! down to chi = 1e-6.

use serde::Serialize;

/// Nodes per frequency axis.
pub const NODES: usize = 64;

/// Half-width W of the frequency truncation window, units sigma. Idler and
/// unfiltered signal integrals run over [-W, W]. Quantities entering H and
/// R are insensitive to it; absolute pair rates (p, P, D_s) are not, so
/// every report records the window used.
pub const WINDOW: f64 = 4.0;

/// Prolate mode retention threshold on chi_m.
pub const PROLATE_TOL: f64 = 1e-6;

/// Cap on retained prolate modes at default filter settings.
pub const M_CAP: usize = 32;

/// Weak-pump heralding floor used when selecting T for a given B.
pub const H_FLOOR: f64 = 0.99;

/// Heralding efficiency targeted by the bandwidth scan.
pub const TARGET_H: f64 = 0.95;

/// B scan: 0.2 sigma to 2.0 sigma inclusive, step 0.05 sigma.
pub const B_SCAN_START: f64 = 0.2;
pub const B_SCAN_STOP: f64 = 2.0;
pub const B_SCAN_STEP: f64 = 0.05;

/// T scan: 0.2/sigma to 6.0/sigma inclusive, step 0.1/sigma.
pub const T_SCAN_START: f64 = 0.2;
pub const T_SCAN_STOP: f64 = 6.0;
pub const T_SCAN_STEP: f64 = 0.1;

/// kappa L grid: logarithmic, 24 points in [0.02, 0.5].
pub const KAPPA_GRID_MIN: f64 = 0.02;
pub const KAPPA_GRID_MAX: f64 = 0.5;
pub const KAPPA_GRID_POINTS: usize = 24;

/// Signal-axis nodes for the unfiltered reference configuration, whose
/// band spans the whole window and whose kernel oscillates accordingly.
pub const UNFILTERED_NODES: usize = 144;

/// Mode cap for the unfiltered reference (roughly 2c/pi + plunge width).
pub const UNFILTERED_M_CAP: usize = 128;

/// Tag identifying the coherence-time definition recorded in every report:
/// the power-equivalent width of the normalized first-order coherence
/// function, tau_c = integral |gamma(t)|^2 dt.
pub const COHERENCE_TIME_DEFINITION: &str = "power-equivalent-width";

/// Grid and mode-retention settings for one pipeline run.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Numerics {
    /// Gauss-Legendre nodes per frequency axis.
    pub nodes: usize,
    /// Truncation half-width W, units sigma.
    pub window: f64,
    /// Prolate mode retention threshold.
    pub tol: f64,
    /// Cap on retained prolate modes.
    pub m_cap: usize,
}

impl Default for Numerics {
    fn default() -> Self {
        Self {
            nodes: NODES,
            window: WINDOW,
            tol: PROLATE_TOL,
            m_cap: M_CAP,
        }
    }
}

/// The default logarithmic kappa L grid.
pub fn kappa_grid() -> Vec<f64> {
    log_grid(KAPPA_GRID_MIN, KAPPA_GRID_MAX, KAPPA_GRID_POINTS)
}

/// Logarithmically spaced grid, endpoints included.
pub fn log_grid(min: f64, max: f64, points: usize) -> Vec<f64> {
    assert!(points >= 2 && min > 0.0 && max > min);
    let lmin = min.ln();
    let lmax = max.ln();
    (0..points)
        .map(|k| (lmin + (lmax - lmin) * k as f64 / (points - 1) as f64).exp())
        .collect()
}

/// Linear grid from `start` through `stop` (inclusive up to rounding) with
/// the given step.
pub fn linear_grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    assert!(step > 0.0 && stop > start);
    let n = ((stop - start) / step).round() as usize;
    (0..=n).map(|k| start + k as f64 * step).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kappa_grid_shape() {
        let g = kappa_grid();
        assert_eq!(g.len(), KAPPA_GRID_POINTS);
        assert!((g[0] - KAPPA_GRID_MIN).abs() < 1e-15);
        assert!((g[g.len() - 1] - KAPPA_GRID_MAX).abs() < 1e-15);
        for k in 1..g.len() {
            assert!(g[k] > g[k - 1]);
        }
    }

    #[test]
    fn linear_grid_covers_scan_ranges() {
        let b = linear_grid(B_SCAN_START, B_SCAN_STOP, B_SCAN_STEP);
        assert_eq!(b.len(), 37);
        assert!((b[15] - 0.95).abs() < 1e-12);
        let t = linear_grid(T_SCAN_START, T_SCAN_STOP, T_SCAN_STEP);
        assert_eq!(t.len(), 59);
        assert!((t[9] - 1.1).abs() < 1e-12);
    }
}
