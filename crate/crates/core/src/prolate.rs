//! Prolate spheroidal measurement basis of the time-and-band-limited
//! detection chain.
//!
//! The on/off detector behind a rectangular spectral filter of bandwidth B
//! and a rectangular time gate of width T measures in the eigenbasis of the
//! operator with kernel
//!
//! ```text
//!     K(nu, nu') = sin(pi T (nu - nu')) / (pi (nu - nu')),   |nu| <= B/2,
//! ```
//!
//! whose eigenfunctions are the (band-limited) prolate spheroidal wave
//! functions and whose eigenvalues chi_m(c), c = pi B T / 2, are the
//! per-mode transmissions. We diagonalize the kernel directly by Nystrom
//! discretization on a Gauss-Legendre grid instead of evaluating classical
//! special functions: downstream quadratures need the mode samples on
//! exactly that grid, and the eigenvalues come out simultaneously.

use crate::error::{Error, Result};
use crate::quad::FreqGrid;
use crate::spectral::sinc;
use nalgebra::DMatrix;
use serde::Serialize;

/// Measurement configuration: spectral bandwidth and temporal gate width.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FilterParams {
    b: f64,
    t: f64,
}

impl FilterParams {
    pub fn new(b: f64, t: f64) -> Result<Self> {
        if !b.is_finite() || b <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "filter bandwidth B must be positive, got {b}"
            )));
        }
        if !t.is_finite() || t <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "time window T must be positive, got {t}"
            )));
        }
        Ok(Self { b, t })
    }

    /// Spectral bandwidth (units sigma).
    pub fn b(&self) -> f64 {
        self.b
    }

    /// Temporal gate width (units 1/sigma).
    pub fn t(&self) -> f64 {
        self.t
    }

    /// Dimensionless time-bandwidth parameter c = pi B T / 2.
    /// Always recomputed, never stored.
    pub fn c(&self) -> f64 {
        0.5 * std::f64::consts::PI * self.b * self.t
    }
}

/// Eigenvalues and orthonormal mode functions of the measurement operator,
/// sampled on the filter quadrature grid.
#[derive(Debug, Clone)]
pub struct ProlateBasis {
    filter: FilterParams,
    /// Retained eigenvalues, strictly descending, all >= tol.
    chi: Vec<f64>,
    /// Mode samples, column m = phi_m at the grid nodes; orthonormal under
    /// the quadrature weights.
    modes: DMatrix<f64>,
    /// Gauss-Legendre grid on [-B/2, B/2].
    grid: FreqGrid,
    /// Sum of the full Nystrom spectrum (all nodes); equals B*T up to
    /// rounding by the trace identity.
    chi_trace: f64,
}

impl ProlateBasis {
    pub fn filter(&self) -> &FilterParams {
        &self.filter
    }

    pub fn c(&self) -> f64 {
        self.filter.c()
    }

    pub fn chi(&self) -> &[f64] {
        &self.chi
    }

    /// Number of retained modes.
    pub fn len(&self) -> usize {
        self.chi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chi.is_empty()
    }

    /// Mode samples (nodes x modes).
    pub fn modes(&self) -> &DMatrix<f64> {
        &self.modes
    }

    pub fn grid(&self) -> &FreqGrid {
        &self.grid
    }

    /// Trace of the discretized operator, i.e. the sum over the complete
    /// eigenvalue spectrum (not just retained modes).
    pub fn chi_trace(&self) -> f64 {
        self.chi_trace
    }

    /// Per-mode detection efficiencies eta_m = eta * chi_m.
    pub fn efficiencies(&self, eta: f64) -> Vec<f64> {
        debug_assert!((0.0..=1.0).contains(&eta));
        self.chi.iter().map(|&chi| eta * chi).collect()
    }
}

/// Diagonalize the measurement kernel and retain the modes with
/// chi_m >= tol, at most `m_cap` of them.
///
/// Fails if the eigensolver does not converge or if more than `m_cap`
/// modes carry eigenvalue mass above `tol` (raise the cap in that case).
pub fn build_basis(
    filter: &FilterParams,
    nodes: usize,
    tol: f64,
    m_cap: usize,
) -> Result<ProlateBasis> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidInput(format!(
            "mode tolerance must lie in (0, 1), got {tol}"
        )));
    }
    if m_cap < 1 {
        return Err(Error::InvalidInput("m_cap must be at least 1".into()));
    }
    let grid = FreqGrid::gauss_legendre(0.5 * filter.b(), nodes)?;
    let nu = grid.nodes();
    let w = grid.weights();
    let n = grid.len();
    let t = filter.t();
    let pi_t = std::f64::consts::PI * t;

    // Symmetrized Nystrom matrix a_kl = sqrt(w_k w_l) K(nu_k, nu_l);
    // diagonal K(nu, nu) = T. Filled per (k <= l) so it is exactly symmetric.
    let sqrt_w: Vec<f64> = w.iter().map(|&x| x.sqrt()).collect();
    let mut a = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        a[(k, k)] = w[k] * t;
        for l in (k + 1)..n {
            let d = nu[k] - nu[l];
            let val = sqrt_w[k] * sqrt_w[l] * t * sinc(pi_t * d);
            a[(k, l)] = val;
            a[(l, k)] = val;
        }
    }

    let eigen = nalgebra::SymmetricEigen::try_new(a, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::EigensolveFailed("prolate kernel diagonalization".into()))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eigen.eigenvalues[j]
            .partial_cmp(&eigen.eigenvalues[i])
            .expect("prolate eigenvalues are finite")
    });

    let chi_trace: f64 = eigen.eigenvalues.iter().sum();
    let qualifying = order
        .iter()
        .filter(|&&i| eigen.eigenvalues[i] >= tol)
        .count();
    if qualifying > m_cap {
        return Err(Error::ModeCapExceeded {
            needed: qualifying,
            cap: m_cap,
        });
    }
    if qualifying == 0 {
        return Err(Error::NumericalFailure(format!(
            "no prolate mode reaches chi >= {tol} (c = {})",
            filter.c()
        )));
    }

    let m = qualifying;
    let chi: Vec<f64> = order[..m].iter().map(|&i| eigen.eigenvalues[i]).collect();

    // Undo the sqrt-weight similarity: phi_m(nu_k) = v_m[k] / sqrt(w_k).
    // Sign convention: phi_m positive at the smallest positive node (for odd
    // modes this equals requiring a positive derivative at zero).
    let first_positive = nu.iter().position(|&x| x > 0.0).unwrap_or(n / 2);
    let mut modes = DMatrix::<f64>::zeros(n, m);
    for (col, &i) in order[..m].iter().enumerate() {
        let v = eigen.eigenvectors.column(i);
        let mut samples: Vec<f64> = (0..n).map(|k| v[k] / sqrt_w[k]).collect();
        let max_abs = samples.iter().fold(0.0f64, |acc, &s| acc.max(s.abs()));
        let anchor = samples[first_positive..]
            .iter()
            .copied()
            .find(|s| s.abs() > 1e-12 * max_abs)
            .unwrap_or(0.0);
        if anchor < 0.0 {
            samples.iter_mut().for_each(|s| *s = -*s);
        }
        for k in 0..n {
            modes[(k, col)] = samples[k];
        }
    }

    Ok(ProlateBasis {
        filter: *filter,
        chi,
        modes,
        grid,
        chi_trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn basis(b: f64, t: f64, nodes: usize) -> ProlateBasis {
        build_basis(&FilterParams::new(b, t).unwrap(), nodes, 1e-6, 32).unwrap()
    }

    #[test]
    fn filter_params_c() {
        let f = FilterParams::new(1.0, 1.0).unwrap();
        assert_relative_eq!(f.c(), std::f64::consts::FRAC_PI_2, max_relative = 1e-15);
        assert!(FilterParams::new(0.0, 1.0).is_err());
        assert!(FilterParams::new(1.0, -2.0).is_err());
    }

    #[test]
    fn trace_identity() {
        for &(b, t) in &[(0.5, 0.5), (1.0, 1.0), (2.0, 2.0), (0.95, 1.1)] {
            let basis = basis(b, t, 64);
            assert_relative_eq!(basis.chi_trace(), b * t, max_relative = 1e-10);
        }
    }

    #[test]
    fn eigenvalues_descending_in_unit_interval() {
        let basis = basis(1.0, 1.0, 64);
        let chi = basis.chi();
        assert!(!chi.is_empty());
        for m in 0..chi.len() {
            assert!(chi[m] > 0.0 && chi[m] < 1.0, "chi_{m} = {}", chi[m]);
            if m > 0 {
                assert!(chi[m] < chi[m - 1]);
            }
        }
    }

    #[test]
    fn orthonormal_under_weights() {
        let basis = basis(0.95, 1.1, 64);
        let w = basis.grid().weights();
        let m = basis.len();
        for a in 0..m {
            for b in a..m {
                let dot: f64 = (0..basis.grid().len())
                    .map(|k| w[k] * basis.modes()[(k, a)] * basis.modes()[(k, b)])
                    .sum();
                let expect = if a == b { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(dot, expect, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn parity_pattern() {
        let basis = basis(1.0, 2.0, 64);
        let n = basis.grid().len();
        for m in 0..basis.len() {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            for k in 0..n {
                let j = n - 1 - k;
                assert_abs_diff_eq!(
                    basis.modes()[(k, m)],
                    sign * basis.modes()[(j, m)],
                    epsilon = 1e-8
                );
            }
        }
    }

    #[test]
    fn sign_convention_positive_at_first_positive_node() {
        let basis = basis(1.0, 2.0, 64);
        let n = basis.grid().len();
        let first_positive = n / 2; // even node count, symmetric grid
        for m in 0..basis.len() {
            assert!(basis.modes()[(first_positive, m)] > 0.0);
        }
    }

    #[test]
    fn small_c_asymptotics() {
        // c -> 0: chi_0 -> 2c/pi = B T, higher modes negligible. The dense
        // 512-node diagonalization is the oracle for the leading eigenvalue.
        let f = FilterParams::new(0.1, 0.1).unwrap();
        let basis = build_basis(&f, 64, 1e-12, 32).unwrap();
        let chi0 = basis.chi()[0];
        assert!((chi0 - 0.01).abs() / 0.01 < 0.01, "chi_0 = {chi0}");
        if basis.len() > 1 {
            assert!(basis.chi()[1] / chi0 < 1e-2);
        }
        let dense = build_basis(&f, 512, 1e-12, 32).unwrap();
        assert_relative_eq!(chi0, dense.chi()[0], max_relative = 1e-10);
    }

    #[test]
    fn nystrom_self_convergence() {
        // Eigenvalues stable to 1e-8 between N- and 2N-node
        // discretizations for every retained mode, from c = pi/2 up to
        // c ~ 19.
        for &(b, t, n) in &[(1.0, 1.0, 64), (2.0, 3.0, 64), (2.0, 6.0, 64)] {
            let coarse = basis(b, t, n);
            let fine = basis(b, t, 2 * n);
            assert_eq!(coarse.len(), fine.len());
            for m in 0..coarse.len() {
                assert_abs_diff_eq!(coarse.chi()[m], fine.chi()[m], epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn efficiencies_scale_chi() {
        let basis = basis(1.0, 1.0, 64);
        assert!(basis.efficiencies(0.0).iter().all(|&e| e == 0.0));
        let full = basis.efficiencies(1.0);
        for (e, &chi) in full.iter().zip(basis.chi()) {
            assert_eq!(*e, chi);
        }
        let tenth = basis.efficiencies(0.1);
        for (e, &chi) in tenth.iter().zip(basis.chi()) {
            assert_relative_eq!(*e, 0.1 * chi, max_relative = 1e-15);
        }
    }

    #[test]
    fn mode_cap_reported() {
        let f = FilterParams::new(8.0, 4.0).unwrap();
        match build_basis(&f, 96, 1e-6, 8) {
            Err(Error::ModeCapExceeded { needed, cap }) => {
                assert!(needed > 8);
                assert_eq!(cap, 8);
            }
            other => panic!("expected ModeCapExceeded, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_tol() {
        let f = FilterParams::new(1.0, 1.0).unwrap();
        assert!(build_basis(&f, 64, 0.0, 32).is_err());
        assert!(build_basis(&f, 64, 1.0, 32).is_err());
        assert!(build_basis(&f, 64, 1e-6, 0).is_err());
    }
}
