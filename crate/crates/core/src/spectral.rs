//! Pump profile, joint spectral amplitudes and pair-generation probabilities.
//!
//! Frequencies are measured in units of the pump sum-frequency bandwidth
//! sigma and times in units of 1/sigma. The phase-matching coefficients
//! `mu_s`, `mu_i` carry units of 1/sigma, so every sinc argument below is
//! dimensionless.

use crate::error::{Error, Result};
use crate::quad::FreqGrid;
use num_complex::Complex64;
use serde::Serialize;

/// Arguments below which the sinc family switches to its Taylor series.
const SINC_SERIES_CUTOFF: f64 = 0.1;

/// Half-width of the removable singularity of the four-photon amplitude:
/// for |mu_s nu_s' + mu_i nu_i'| below this the Taylor surrogate is used.
pub const JSA_DOUBLE_TAYLOR_EPS: f64 = 1e-4;

/// Pump strength above which the two-pair truncation of the output state
/// is no longer trustworthy; rejected everywhere.
pub const KAPPA_L_MAX: f64 = 0.5;

/// sinc(x) = sin(x)/x with sinc(0) = 1.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < SINC_SERIES_CUTOFF {
        let x2 = x * x;
        1.0 - x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0))
    } else {
        x.sin() / x
    }
}

/// First derivative of sinc. The direct form (x cos x - sin x)/x^2
/// cancels catastrophically near zero, hence the series branch.
pub fn sinc_d1(x: f64) -> f64 {
    if x.abs() < SINC_SERIES_CUTOFF {
        let x2 = x * x;
        -x / 3.0 * (1.0 - x2 / 10.0 * (1.0 - x2 / 28.0))
    } else {
        (x * x.cos() - x.sin()) / (x * x)
    }
}

/// Second derivative of sinc.
pub fn sinc_d2(x: f64) -> f64 {
    if x.abs() < SINC_SERIES_CUTOFF {
        let x2 = x * x;
        -1.0 / 3.0 + x2 / 10.0 - x2 * x2 / 168.0
    } else {
        (2.0 * x.sin() - x * x * x.sin() - 2.0 * x * x.cos()) / (x * x * x)
    }
}

/// Physics inputs of the pair source: pump bandwidth, phase matching,
/// pump strength and total detection efficiency.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SourceParams {
    /// Pump sum-frequency bandwidth parameter (whole pipeline is expressed
    /// in units of this, so it is 1.0 in practice).
    pub sigma: f64,
    /// Signal phase-matching coefficient beta_s L / 2, units 1/sigma.
    pub mu_s: f64,
    /// Idler phase-matching coefficient beta_i L / 2, units 1/sigma.
    pub mu_i: f64,
    /// Dimensionless interaction strength kappa L.
    pub kappa_l: f64,
    /// Total detection efficiency (transmission times quantum efficiency).
    pub eta: f64,
}

impl SourceParams {
    pub fn new(sigma: f64, mu_s: f64, mu_i: f64, kappa_l: f64, eta: f64) -> Result<Self> {
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "sigma must be positive, got {sigma}"
            )));
        }
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::InvalidInput(format!(
                "eta must lie in [0, 1], got {eta}"
            )));
        }
        if !kappa_l.is_finite() || kappa_l < 0.0 {
            return Err(Error::InvalidInput(format!(
                "kappa_l must be non-negative, got {kappa_l}"
            )));
        }
        if kappa_l > KAPPA_L_MAX {
            return Err(Error::InvalidInput(format!(
                "kappa_l = {kappa_l} exceeds {KAPPA_L_MAX}; the two-pair truncation \
                 is not valid there"
            )));
        }
        if !mu_s.is_finite() || !mu_i.is_finite() {
            return Err(Error::InvalidInput("mu_s/mu_i must be finite".into()));
        }
        Ok(Self {
            sigma,
            mu_s,
            mu_i,
            kappa_l,
            eta,
        })
    }

    /// Source in sigma-units (sigma = 1).
    pub fn in_sigma_units(mu_s: f64, mu_i: f64, kappa_l: f64, eta: f64) -> Result<Self> {
        Self::new(1.0, mu_s, mu_i, kappa_l, eta)
    }

    pub fn with_kappa_l(mut self, kappa_l: f64) -> Result<Self> {
        if !kappa_l.is_finite() || !(0.0..=KAPPA_L_MAX).contains(&kappa_l) {
            return Err(Error::InvalidInput(format!(
                "kappa_l must lie in [0, {KAPPA_L_MAX}], got {kappa_l}"
            )));
        }
        self.kappa_l = kappa_l;
        Ok(self)
    }

    /// Gaussian sum-frequency profile of the pump, exp(-nu^2 / 2 sigma^2).
    pub fn pump_profile(&self, nu_sum: f64) -> f64 {
        let t = nu_sum / self.sigma;
        (-0.5 * t * t).exp()
    }

    /// Joint two-photon (single-pair) amplitude:
    /// phi(nu_s + nu_i) sinc(mu_s nu_s + mu_i nu_i). Real, |.| <= 1.
    pub fn jsa_single(&self, nu_s: f64, nu_i: f64) -> f64 {
        self.pump_profile(nu_s + nu_i) * sinc(self.mu_s * nu_s + self.mu_i * nu_i)
    }

    /// Joint four-photon (double-pair) amplitude.
    ///
    /// Finite everywhere: where the denominator 2(mu_s nu_s' + mu_i nu_i')
    /// vanishes the removable singularity is evaluated by Taylor expansion,
    /// see [`phase_mismatch_factor`].
    pub fn jsa_double(&self, nu_s: f64, nu_s_p: f64, nu_i: f64, nu_i_p: f64) -> Complex64 {
        let pump = self.pump_profile(nu_s + nu_i) * self.pump_profile(nu_s_p + nu_i_p);
        let big_x = self.mu_s * nu_s + self.mu_i * nu_i;
        let x = self.mu_s * nu_s_p + self.mu_i * nu_i_p;
        phase_mismatch_factor(big_x, x) * pump
    }

    /// Single-pair and total pair-generation probabilities on the grid.
    pub fn pair_probability(&self, grid: &FreqGrid) -> Result<PairProbability> {
        if grid.window() <= 0.0 {
            return Err(Error::InvalidInput(
                "pair probability needs a positive truncation window".into(),
            ));
        }
        let nodes = grid.nodes();
        let weights = grid.weights();
        let mut p = 0.0;
        for (k, &nu_s) in nodes.iter().enumerate() {
            let mut row = 0.0;
            for (j, &nu_i) in nodes.iter().enumerate() {
                let a = self.jsa_single(nu_s, nu_i);
                row += weights[j] * a * a;
            }
            p += weights[k] * row;
        }
        Ok(PairProbability::from_p_single(p, self.kappa_l))
    }
}

/// Phase-mismatch factor of the four-photon amplitude:
/// `[sinc(X + x) - exp(-i x) sinc(X)] / (2 x)`.
///
/// This is the only place the Eq.-6 bracket is evaluated; both the scalar
/// amplitude and the bulk tensor assembly route through it. For
/// |x| < [`JSA_DOUBLE_TAYLOR_EPS`] the 0/0 form is replaced by its Taylor
/// expansion about x = 0,
/// `[sinc'(X) + i sinc(X)]/2 + x [sinc''(X) + sinc(X)]/4`.
pub fn phase_mismatch_factor(big_x: f64, x: f64) -> Complex64 {
    if x.abs() < JSA_DOUBLE_TAYLOR_EPS {
        let re = 0.5 * sinc_d1(big_x) + 0.25 * x * (sinc_d2(big_x) + sinc(big_x));
        let im = 0.5 * sinc(big_x);
        Complex64::new(re, im)
    } else {
        let phase = Complex64::new(x.cos(), -x.sin());
        let num = Complex64::new(sinc(big_x + x), 0.0) - phase * sinc(big_x);
        num / (2.0 * x)
    }
}

/// Pair-generation probabilities per pump pulse (Eq. of the perturbative
/// state truncated at two pairs). The double-pair term is computed as the
/// exact square of the single-pair term.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PairProbability {
    /// p = quadrature of |Phi^(1)|^2 over the truncated window.
    pub p_single: f64,
    /// (kappa L)^2 p, single-pair emission probability.
    pub single: f64,
    /// (kappa L)^4 p^2 = single^2, double-pair emission probability.
    pub double: f64,
    /// P = single + double.
    pub total: f64,
}

impl PairProbability {
    pub fn from_p_single(p_single: f64, kappa_l: f64) -> Self {
        let single = kappa_l * kappa_l * p_single;
        let double = single * single;
        Self {
            p_single,
            single,
            double,
            total: single + double,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn src(mu_s: f64, mu_i: f64) -> SourceParams {
        SourceParams::in_sigma_units(mu_s, mu_i, 0.1, 0.1).unwrap()
    }

    #[test]
    fn pump_profile_values() {
        let p = src(0.0, 0.0);
        assert_eq!(p.pump_profile(0.0), 1.0);
        assert_relative_eq!(p.pump_profile(1.0), (-0.5f64).exp(), max_relative = 1e-15);
        for x in [0.3, 1.7] {
            assert_eq!(p.pump_profile(x), p.pump_profile(-x));
        }
    }

    #[test]
    fn jsa_single_reduces_to_pump_for_zero_mu() {
        let p = src(0.0, 0.0);
        for (ns, ni) in [(0.0, 0.0), (0.4, -1.2), (2.0, 1.0)] {
            assert_eq!(p.jsa_single(ns, ni), p.pump_profile(ns + ni));
        }
        assert_eq!(p.jsa_single(0.0, 0.0), 1.0);
    }

    #[test]
    fn jsa_single_sinc_zero() {
        let p = src(10.0, 0.0);
        let v = p.jsa_single(std::f64::consts::PI / 10.0, 0.0);
        assert_abs_diff_eq!(v, 0.0, epsilon = 1e-16);
    }

    #[test]
    fn jsa_single_symmetry_and_bound() {
        let p = src(2.6, 0.0);
        for &(ns, ni) in &[(0.1, 0.3), (1.5, -0.7), (-2.0, 2.0)] {
            assert_relative_eq!(
                p.jsa_single(ns, ni),
                p.jsa_single(-ns, -ni),
                max_relative = 1e-14
            );
            assert!(p.jsa_single(ns, ni).abs() <= 1.0);
        }
    }

    #[test]
    fn sinc_derivatives_match_finite_differences() {
        let h = 1e-5;
        for &x in &[0.05, 0.2, 1.3, 3.0, 7.7] {
            let d1 = (sinc(x + h) - sinc(x - h)) / (2.0 * h);
            assert_abs_diff_eq!(sinc_d1(x), d1, epsilon = 1e-9);
            let d2 = (sinc(x + h) - 2.0 * sinc(x) + sinc(x - h)) / (h * h);
            assert_abs_diff_eq!(sinc_d2(x), d2, epsilon = 1e-5);
        }
        assert_eq!(sinc(0.0), 1.0);
        assert_eq!(sinc_d1(0.0), 0.0);
        assert_abs_diff_eq!(sinc_d2(0.0), -1.0 / 3.0, epsilon = 1e-16);
    }

    #[test]
    fn jsa_double_zero_mu_closed_form() {
        // With mu = 0 the denominator vanishes identically and the Taylor
        // limit gives (i/2) phi(nu_s + nu_i) phi(nu_s' + nu_i').
        let p = src(0.0, 0.0);
        for &(a, b, c, d) in &[(0.0, 0.0, 0.0, 0.0), (0.3, -0.2, 0.8, 0.1)] {
            let v = p.jsa_double(a, b, c, d);
            let expect = 0.5 * p.pump_profile(a + c) * p.pump_profile(b + d);
            assert_abs_diff_eq!(v.re, 0.0, epsilon = 1e-15);
            assert_relative_eq!(v.im, expect, max_relative = 1e-13);
        }
        assert_relative_eq!(
            p.jsa_double(0.0, 0.0, 0.0, 0.0).norm(),
            0.5,
            max_relative = 1e-15
        );
    }

    #[test]
    fn jsa_double_taylor_limit_numerically() {
        // Evaluate the direct branch at shrinking x and extrapolate: it must
        // approach the Taylor limit used below the threshold.
        let p = src(0.0, 0.0);
        let limit = p.jsa_double(0.3, 0.0, -0.2, 0.0);
        let probe = |mu: &SourceParams, nu_sp: f64| mu.jsa_double(0.3, nu_sp, -0.2, 0.0);
        let q = src(10.0, 0.0);
        // Here x = 10 nu_s'; compare direct evaluations against the Taylor
        // branch of the same X at matching small x.
        let taylor = |x: f64| {
            let big_x = 10.0 * 0.3;
            let pump = q.pump_profile(0.3 - 0.2) * q.pump_profile(x / 10.0);
            Complex64::new(
                0.5 * sinc_d1(big_x) + 0.25 * x * (sinc_d2(big_x) + sinc(big_x)),
                0.5 * sinc(big_x),
            ) * pump
        };
        for &nu_sp in &[1e-5, -1e-5, 2e-5] {
            let direct = probe(&q, nu_sp);
            let t = taylor(10.0 * nu_sp);
            assert!(
                (direct - t).norm() < 1e-9,
                "direct vs taylor at x = {}",
                10.0 * nu_sp
            );
        }
        let _ = limit;
    }

    #[test]
    fn jsa_double_continuous_across_threshold() {
        // Ring just outside the Taylor threshold: direct evaluation and the
        // Taylor surrogate agree to 1e-6.
        for &big_x in &[0.0, 0.5, 3.0, 9.0] {
            for &x in &[
                JSA_DOUBLE_TAYLOR_EPS,
                -JSA_DOUBLE_TAYLOR_EPS,
                1.5 * JSA_DOUBLE_TAYLOR_EPS,
                2.0 * JSA_DOUBLE_TAYLOR_EPS,
            ] {
                let direct = {
                    let phase = Complex64::new(x.cos(), -x.sin());
                    (Complex64::new(sinc(big_x + x), 0.0) - phase * sinc(big_x)) / (2.0 * x)
                };
                let taylor = Complex64::new(
                    0.5 * sinc_d1(big_x) + 0.25 * x * (sinc_d2(big_x) + sinc(big_x)),
                    0.5 * sinc(big_x),
                );
                assert!(
                    (direct - taylor).norm() < 1e-6,
                    "X = {big_x}, x = {x}: direct {direct} vs taylor {taylor}"
                );
            }
        }
    }

    #[test]
    fn pair_probability_zero_kappa() {
        let p = SourceParams::in_sigma_units(0.0, 0.0, 0.0, 0.1).unwrap();
        let g = FreqGrid::gauss_legendre(4.0, 32).unwrap();
        let pp = p.pair_probability(&g).unwrap();
        assert_eq!(pp.total, 0.0);
        assert!(pp.p_single > 0.0);
    }

    #[test]
    fn pair_probability_double_is_exact_square() {
        let p = src(10.0, 0.0);
        let g = FreqGrid::gauss_legendre(4.0, 64).unwrap();
        let pp = p.pair_probability(&g).unwrap();
        assert_eq!(pp.double, pp.single * pp.single);
        assert_eq!(pp.total, pp.single + pp.double);
    }

    #[test]
    fn pair_probability_paper_ratio() {
        // (kappa L)^2 p = 0.057 implies a double-pair rate of exactly
        // 0.057^2 = 0.3249%.
        let pp = PairProbability::from_p_single(0.057 / (0.2 * 0.2), 0.2);
        assert_relative_eq!(pp.single, 0.057, max_relative = 1e-14);
        assert_relative_eq!(pp.double, 0.003249, max_relative = 1e-12);
    }

    #[test]
    fn pair_probability_separable_matches_dense_oracle() {
        // mu_s = 10, mu_i = 0 factorizes the integrand; a dense trapezoid
        // product quadrature at 4x resolution is the independent oracle.
        let p = src(10.0, 0.0);
        let g = FreqGrid::gauss_legendre(4.0, 64).unwrap();
        let pp = p.pair_probability(&g).unwrap();

        let n = 1024;
        let h = 8.0 / n as f64;
        let mut oracle = 0.0;
        for a in 0..=n {
            let nu_s = -4.0 + a as f64 * h;
            let wa = if a == 0 || a == n { 0.5 } else { 1.0 };
            let mut row = 0.0;
            for b in 0..=n {
                let nu_i = -4.0 + b as f64 * h;
                let wb = if b == 0 || b == n { 0.5 } else { 1.0 };
                let v = p.jsa_single(nu_s, nu_i);
                row += wb * v * v;
            }
            oracle += wa * row;
        }
        oracle *= h * h;
        assert_relative_eq!(pp.p_single, oracle, max_relative = 5e-7);
    }

    #[test]
    fn pair_probability_grid_convergence() {
        let p = src(2.6, 0.0);
        let g1 = FreqGrid::gauss_legendre(4.0, 64).unwrap();
        let g2 = FreqGrid::gauss_legendre(4.0, 128).unwrap();
        let p1 = p.pair_probability(&g1).unwrap().p_single;
        let p2 = p.pair_probability(&g2).unwrap().p_single;
        assert!(((p1 - p2) / p2).abs() < 1e-4);
    }

    #[test]
    fn rejects_out_of_model_kappa() {
        assert!(SourceParams::in_sigma_units(0.0, 0.0, 0.6, 0.1).is_err());
        assert!(SourceParams::in_sigma_units(0.0, 0.0, -0.1, 0.1).is_err());
        assert!(SourceParams::in_sigma_units(0.0, 0.0, 0.1, 1.5).is_err());
        assert!(SourceParams::new(0.0, 0.0, 0.0, 0.1, 0.1).is_err());
    }
}
