//! Click statistics and heralded-state analysis of the filtered detection
//! chain.
//!
//! A detector click projects the signal onto the prolate measurement modes;
//! the heralded idler state and the click probabilities follow from the
//! one- and two-pair amplitudes integrated against those modes:
//!
//! * `psi1[m](nu_i)` - single-pair heralded wavefunction per mode,
//! * `psi2[m, m'](nu_i, nu_i')` - symmetrized double-pair wavefunction,
//! * `Ps = (kL)^2 Ps1 + (kL)^4 Ps2` - click probability per pump pulse,
//! * `rho_i` - heralded idler density matrix, eigenvalue lambda_0,
//! * `H = lambda_0 Ps1 / (Ps1 + (kL)^2 Ps2)` - heralding efficiency,
//! * `R = Ps / T_min` - production rate at maximal repetition.
//!
//! `T_min = max(T, 4 tau_p, 4 tau_s, 4 tau_0)` uses power-equivalent-width
//! coherence times, tau_c = integral |gamma(t)|^2 dt with gamma the
//! normalized Fourier transform of the relevant spectral profile. By
//! Parseval this equals `int S^2 / (int S)^2`, evaluated directly on the
//! quadrature grids.

use crate::defaults::{Numerics, COHERENCE_TIME_DEFINITION};
use crate::error::{Error, Result};
use crate::prolate::{build_basis, FilterParams, ProlateBasis};
use crate::quad::FreqGrid;
use crate::spectral::{phase_mismatch_factor, SourceParams};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::sync::OnceLock;

/// Heralded one-photon wavefunctions: column m holds
/// `psi_m(nu_i) = int_band phi_m(nu_s) Phi1(nu_s, nu_i) d nu_s`
/// at the idler nodes, evaluated with the basis quadrature.
pub fn heralded_psi1(
    basis: &ProlateBasis,
    source: &SourceParams,
    idler: &FreqGrid,
) -> DMatrix<f64> {
    let ns = basis.grid().len();
    let ni = idler.len();
    let m = basis.len();
    let w = basis.grid().weights();
    // Weighted modes: g[s, m] = w_s phi_m(nu_s).
    let mut g = basis.modes().clone();
    for col in 0..m {
        for s in 0..ns {
            g[(s, col)] *= w[s];
        }
    }
    let phi1 = DMatrix::from_fn(ns, ni, |s, j| {
        source.jsa_single(basis.grid().nodes()[s], idler.nodes()[j])
    });
    phi1.transpose() * g
}

/// Weighted squared norms per mode, `a_m = int |psi_m(nu_i)|^2 d nu_i`.
fn mode_norms(psi1: &DMatrix<f64>, idler: &FreqGrid) -> Vec<f64> {
    let w = idler.weights();
    (0..psi1.ncols())
        .map(|m| {
            psi1.column(m)
                .iter()
                .zip(w)
                .map(|(&v, &wk)| wk * v * v)
                .sum()
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Double-pair tensor assembly
// ---------------------------------------------------------------------------

/// Evaluates blocks of the symmetrized double-pair amplitude
/// `psi2[m, m'](nu_i, nu_i')` (one M x M matrix per idler node pair) by
/// quadrature of the four-photon amplitude against the mode functions.
///
/// Writing `Phi2 = pump(nu_s + nu_i) pump(nu_s' + nu_i') f(X, x)` with the
/// phase-mismatch factor `f` of [`phase_mismatch_factor`], the block is
/// `Y + Y^T` where `Y = U_i^T F U_i'`, `U_i[s, m] = w_s phi_m(nu_s)
/// pump(nu_s + nu_i)` and `F[s, s'] = f(X[s, i], x[s', i'])`. For
/// `mu_i = 0` the mismatch arguments lose their idler dependence, so `F`
/// and the products `Z_i' = F U_i'` are precomputed once.
struct Psi2Engine {
    /// Pump-weighted mode tables, one N_s x M matrix per idler node.
    u: Vec<DMatrix<f64>>,
    kind: EngineKind,
    n_modes: usize,
    n_signal: usize,
}

enum EngineKind {
    /// mu_i == 0: mismatch factor independent of the idler nodes.
    Separable {
        /// z[i'] = F * u[i'], complex N_s x M.
        z: Vec<DMatrix<Complex64>>,
    },
    /// General case: mismatch arguments X[s, i] tabulated, F rebuilt per
    /// node pair.
    General {
        /// big_x[(s, i)] = mu_s nu_s + mu_i nu_i.
        big_x: DMatrix<f64>,
    },
}

/// Per-thread scratch buffers for block assembly.
struct Psi2Scratch {
    f: DMatrix<Complex64>,
    z: DMatrix<Complex64>,
    y: DMatrix<Complex64>,
}

impl Psi2Engine {
    fn new(basis: &ProlateBasis, source: &SourceParams, idler: &FreqGrid) -> Self {
        let ns = basis.grid().len();
        let ni = idler.len();
        let m = basis.len();
        let w = basis.grid().weights();
        let s_nodes = basis.grid().nodes();

        let u: Vec<DMatrix<f64>> = (0..ni)
            .map(|i| {
                let nu_i = idler.nodes()[i];
                DMatrix::from_fn(ns, m, |s, col| {
                    w[s] * basis.modes()[(s, col)] * source.pump_profile(s_nodes[s] + nu_i)
                })
            })
            .collect();

        let kind = if source.mu_i == 0.0 {
            let f = DMatrix::from_fn(ns, ns, |s, sp| {
                phase_mismatch_factor(source.mu_s * s_nodes[s], source.mu_s * s_nodes[sp])
            });
            let z = u.iter().map(|ui| complex_product(&f, ui)).collect();
            EngineKind::Separable { z }
        } else {
            let big_x = DMatrix::from_fn(ns, ni, |s, i| {
                source.mu_s * s_nodes[s] + source.mu_i * idler.nodes()[i]
            });
            EngineKind::General { big_x }
        };

        Self {
            u,
            kind,
            n_modes: m,
            n_signal: ns,
        }
    }

    fn scratch(&self) -> Psi2Scratch {
        Psi2Scratch {
            f: DMatrix::zeros(self.n_signal, self.n_signal),
            z: DMatrix::zeros(self.n_signal, self.n_modes),
            y: DMatrix::zeros(self.n_modes, self.n_modes),
        }
    }

    /// Symmetrized block psi2(., .)(nu_i, nu_i') into `scratch.y`:
    /// after the call `scratch.y[(m, mp)] = psi2_{m, mp}(nu_i, nu_i')`.
    fn block(&self, i: usize, ip: usize, scratch: &mut Psi2Scratch) {
        let z = match &self.kind {
            EngineKind::Separable { z } => &z[ip],
            EngineKind::General { big_x } => {
                for sp in 0..self.n_signal {
                    let x = big_x[(sp, ip)];
                    for s in 0..self.n_signal {
                        scratch.f[(s, sp)] = phase_mismatch_factor(big_x[(s, i)], x);
                    }
                }
                complex_product_into(&scratch.f, &self.u[ip], &mut scratch.z);
                &scratch.z
            }
        };
        // y = u_i^T z, then symmetrize over the mode indices.
        let ui = &self.u[i];
        let m = self.n_modes;
        for mp in 0..m {
            let zc = z.column(mp);
            for mm in 0..m {
                let uc = ui.column(mm);
                let mut acc = Complex64::new(0.0, 0.0);
                for s in 0..self.n_signal {
                    acc += zc[s] * uc[s];
                }
                scratch.y[(mm, mp)] = acc;
            }
        }
        for mp in 0..m {
            for mm in 0..=mp {
                let v = scratch.y[(mm, mp)] + scratch.y[(mp, mm)];
                scratch.y[(mm, mp)] = v;
                scratch.y[(mp, mm)] = v;
            }
        }
    }
}

/// `F * U` for complex F and real U.
fn complex_product(f: &DMatrix<Complex64>, u: &DMatrix<f64>) -> DMatrix<Complex64> {
    let mut out = DMatrix::zeros(f.nrows(), u.ncols());
    complex_product_into(f, u, &mut out);
    out
}

fn complex_product_into(f: &DMatrix<Complex64>, u: &DMatrix<f64>, out: &mut DMatrix<Complex64>) {
    let (n, k) = (f.nrows(), f.ncols());
    let m = u.ncols();
    debug_assert_eq!(u.nrows(), k);
    out.fill(Complex64::new(0.0, 0.0));
    for col in 0..m {
        for sp in 0..k {
            let g = u[(sp, col)];
            if g == 0.0 {
                continue;
            }
            let fc = f.column(sp);
            for s in 0..n {
                out[(s, col)] += fc[s] * g;
            }
        }
    }
}

/// Full symmetrized double-pair tensor, stored for the `m <= m'` mode pairs
/// (the bracket of the defining integral makes it symmetric in the mode
/// indices). Memory grows as M(M+1)/2 * N_i^2; intended for analysis and
/// testing at moderate mode counts. Bulk click statistics use the streaming
/// quadrature in [`click_probabilities`] instead.
pub struct Psi2Tensor {
    n_modes: usize,
    n_idler: usize,
    data: Vec<Complex64>,
}

impl Psi2Tensor {
    fn pair_index(&self, m: usize, mp: usize) -> usize {
        let (lo, hi) = if m <= mp { (m, mp) } else { (mp, m) };
        lo * self.n_modes - lo * (lo + 1) / 2 + hi
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn n_idler(&self) -> usize {
        self.n_idler
    }

    /// psi2_{m, m'}(nu_i, nu_i') by node indices.
    pub fn get(&self, m: usize, mp: usize, i: usize, ip: usize) -> Complex64 {
        let p = self.pair_index(m, mp);
        self.data[(p * self.n_idler + i) * self.n_idler + ip]
    }
}

/// Heralded two-photon wavefunctions psi2_{m, m'}(nu_i, nu_i') for all
/// retained mode pairs, by quadrature of the four-photon amplitude.
pub fn heralded_psi2(basis: &ProlateBasis, source: &SourceParams, idler: &FreqGrid) -> Psi2Tensor {
    let engine = Psi2Engine::new(basis, source, idler);
    let m = basis.len();
    let ni = idler.len();
    let pairs = m * (m + 1) / 2;
    let mut tensor = Psi2Tensor {
        n_modes: m,
        n_idler: ni,
        data: vec![Complex64::new(0.0, 0.0); pairs * ni * ni],
    };
    let mut scratch = engine.scratch();
    for i in 0..ni {
        for ip in 0..ni {
            engine.block(i, ip, &mut scratch);
            for mm in 0..m {
                for mp in mm..m {
                    let p = tensor.pair_index(mm, mp);
                    tensor.data[(p * ni + i) * ni + ip] = scratch.y[(mm, mp)];
                }
            }
        }
    }
    tensor
}

/// POVM weights of the double-pair click term: `eta_m + eta_m' - eta_m
/// eta_m'` for distinct modes, `eta_m - eta_m^2 / 2` on the diagonal.
fn ps2_weights(eta_m: &[f64]) -> DMatrix<f64> {
    let m = eta_m.len();
    DMatrix::from_fn(m, m, |a, b| {
        if a == b {
            eta_m[a] - 0.5 * eta_m[a] * eta_m[a]
        } else {
            eta_m[a] + eta_m[b] - eta_m[a] * eta_m[b]
        }
    })
}

/// Streaming quadrature of the double-pair click probability over the
/// idler plane. Rows are distributed across threads (fixed partition) and
/// combined in index order, so the result is independent of thread count.
fn ps2_quadrature(engine: &Psi2Engine, weights: &DMatrix<f64>, idler: &FreqGrid) -> f64 {
    let ni = idler.len();
    let w = idler.weights();
    let m = engine.n_modes;
    let row_sums: Vec<f64> = (0..ni)
        .into_par_iter()
        .map(|i| {
            let mut scratch = engine.scratch();
            let mut acc = 0.0;
            for (ip, &w_ip) in w.iter().enumerate() {
                engine.block(i, ip, &mut scratch);
                let mut val = 0.0;
                for mm in 0..m {
                    for mp in mm..m {
                        val += weights[(mm, mp)] * scratch.y[(mm, mp)].norm_sqr();
                    }
                }
                acc += w_ip * val;
            }
            acc
        })
        .collect();
    row_sums.iter().zip(w).map(|(&row, &wi)| wi * row).sum()
}

/// Click probabilities of the on/off detector per pump pulse.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ClickProbabilities {
    /// Single-pair click coefficient, sum_m eta_m int |psi_m|^2.
    pub ps1: f64,
    /// Double-pair click coefficient (POVM-weighted psi2 norm).
    pub ps2: f64,
    /// Ps at the source's kappa L: (kL)^2 Ps1 + (kL)^4 Ps2.
    pub ps: f64,
}

impl ClickProbabilities {
    pub fn ps_at(&self, kappa_l: f64) -> f64 {
        let k2 = kappa_l * kappa_l;
        k2 * self.ps1 + k2 * k2 * self.ps2
    }
}

/// Click probabilities from scratch (builds psi1 and streams the psi2
/// quadrature). Pipeline users should prefer [`Heralding`], which caches
/// the intermediates.
pub fn click_probabilities(
    basis: &ProlateBasis,
    source: &SourceParams,
    idler: &FreqGrid,
) -> ClickProbabilities {
    let psi1 = heralded_psi1(basis, source, idler);
    let eta_m = basis.efficiencies(source.eta);
    let ps1 = eta_m
        .iter()
        .zip(mode_norms(&psi1, idler))
        .map(|(&e, a)| e * a)
        .sum();
    let engine = Psi2Engine::new(basis, source, idler);
    let ps2 = ps2_quadrature(&engine, &ps2_weights(&eta_m), idler);
    let mut out = ClickProbabilities { ps1, ps2, ps: 0.0 };
    out.ps = out.ps_at(source.kappa_l);
    out
}

// ---------------------------------------------------------------------------
// Heralded density matrix
// ---------------------------------------------------------------------------

/// Eigenvalue spectrum of the heralded idler density matrix and the
/// dominant mode's samples at the idler nodes.
#[derive(Debug, Clone, Serialize)]
pub struct DensitySpectrum {
    /// Eigenvalues, descending; sum to one.
    pub lambda: Vec<f64>,
    /// |0>_i wavefunction samples, unit norm under the idler weights.
    pub mode: Vec<f64>,
}

impl DensitySpectrum {
    pub fn lambda0(&self) -> f64 {
        self.lambda[0]
    }
}

/// Negative-eigenvalue slack below which the discretized density matrix is
/// treated as a quadrature bug rather than rounding noise.
const PSD_TOLERANCE: f64 = -1e-9;

fn density_from_psi1(
    psi1: &DMatrix<f64>,
    eta_m: &[f64],
    ps1: f64,
    idler: &FreqGrid,
) -> Result<DensitySpectrum> {
    if ps1 <= 0.0 || ps1.is_nan() {
        return Err(Error::InvalidInput(
            "heralded density matrix needs Ps1 > 0 (is eta zero?)".into(),
        ));
    }
    let ni = idler.len();
    let m = psi1.ncols();
    let sqrt_w: Vec<f64> = idler.weights().iter().map(|&w| w.sqrt()).collect();

    // rho_ab = sqrt(w_a w_b)/Ps1 * sum_m eta_m psi_m(a) psi_m(b) = B B^T
    // with B[a, m] = sqrt(w_a eta_m / Ps1) psi_m(a); the sqrt-weight
    // similarity keeps the discrete problem symmetric while preserving the
    // continuum inner product.
    let b = DMatrix::from_fn(ni, m, |a, col| {
        sqrt_w[a] * (eta_m[col] / ps1).sqrt() * psi1[(a, col)]
    });
    let mut rho = &b * b.transpose();
    for a in 0..ni {
        for c in (a + 1)..ni {
            let v = 0.5 * (rho[(a, c)] + rho[(c, a)]);
            rho[(a, c)] = v;
            rho[(c, a)] = v;
        }
    }

    let eigen = nalgebra::SymmetricEigen::try_new(rho, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::EigensolveFailed("heralded density matrix".into()))?;
    let mut order: Vec<usize> = (0..ni).collect();
    order.sort_by(|&a, &c| {
        eigen.eigenvalues[c]
            .partial_cmp(&eigen.eigenvalues[a])
            .expect("density eigenvalues are finite")
    });
    let lambda: Vec<f64> = order.iter().map(|&k| eigen.eigenvalues[k]).collect();
    if lambda[lambda.len() - 1] < PSD_TOLERANCE {
        return Err(Error::NumericalFailure(format!(
            "density matrix not PSD: min eigenvalue {}",
            lambda[lambda.len() - 1]
        )));
    }

    let v0 = eigen.eigenvectors.column(order[0]);
    let mut mode: Vec<f64> = (0..ni).map(|a| v0[a] / sqrt_w[a]).collect();
    // Deterministic sign: positive at the sample of largest magnitude.
    let anchor = mode
        .iter()
        .enumerate()
        .max_by(|(_, x), (_, y)| x.abs().partial_cmp(&y.abs()).unwrap())
        .map(|(k, _)| k)
        .unwrap_or(0);
    if mode[anchor] < 0.0 {
        mode.iter_mut().for_each(|v| *v = -*v);
    }
    Ok(DensitySpectrum { lambda, mode })
}

/// Heralded idler density matrix from the single-pair wavefunctions:
/// eigenvalues sorted descending plus the dominant mode.
pub fn heralded_density_matrix(
    basis: &ProlateBasis,
    source: &SourceParams,
    idler: &FreqGrid,
) -> Result<DensitySpectrum> {
    let psi1 = heralded_psi1(basis, source, idler);
    let eta_m = basis.efficiencies(source.eta);
    let ps1: f64 = eta_m
        .iter()
        .zip(mode_norms(&psi1, idler))
        .map(|(&e, a)| e * a)
        .sum();
    density_from_psi1(&psi1, &eta_m, ps1, idler)
}

// ---------------------------------------------------------------------------
// Coherence times
// ---------------------------------------------------------------------------

/// Coherence times entering T_min, in units 1/sigma.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CoherenceTimes {
    /// Pump pulse.
    pub tau_p: f64,
    /// Spectrally filtered signal photons.
    pub tau_s: f64,
    /// Heralded idler mode |0>.
    pub tau_0: f64,
}

impl CoherenceTimes {
    /// T_min = max(T, 4 tau_p, 4 tau_s, 4 tau_0).
    pub fn t_min(&self, t_gate: f64) -> f64 {
        t_gate
            .max(4.0 * self.tau_p)
            .max(4.0 * self.tau_s)
            .max(4.0 * self.tau_0)
    }
}

/// Power-equivalent width of the normalized first-order coherence function
/// of a spectrum S >= 0: by Parseval,
/// `int |gamma(t)|^2 dt = int S^2 dnu / (int S dnu)^2`.
pub fn power_equivalent_width(spectrum: &[f64], grid: &FreqGrid) -> f64 {
    let w = grid.weights();
    let mut s1 = 0.0;
    let mut s2 = 0.0;
    for (k, &s) in spectrum.iter().enumerate() {
        s1 += w[k] * s;
        s2 += w[k] * s * s;
    }
    s2 / (s1 * s1)
}

/// Coherence times of the pump, the filtered signal and the heralded mode.
///
/// The pump enters through the sum-frequency profile of the source (the
/// Gaussian whose closed-form width is 1/(2 sqrt(pi) sigma)); the filtered
/// signal through its band-windowed marginal intensity sampled on the basis
/// grid; the heralded mode through its spectral intensity on the idler
/// grid.
pub fn coherence_times(
    source: &SourceParams,
    basis: &ProlateBasis,
    filtered_signal_spectrum: &[f64],
    heralded_mode: &[f64],
    idler: &FreqGrid,
) -> CoherenceTimes {
    let pump: Vec<f64> = idler
        .nodes()
        .iter()
        .map(|&nu| source.pump_profile(nu))
        .collect();
    let mode_intensity: Vec<f64> = heralded_mode.iter().map(|&v| v * v).collect();
    CoherenceTimes {
        tau_p: power_equivalent_width(&pump, idler),
        tau_s: power_equivalent_width(filtered_signal_spectrum, basis.grid()),
        tau_0: power_equivalent_width(&mode_intensity, idler),
    }
}

/// Band-windowed marginal intensity of the signal photon,
/// `S_s(nu_s) = int |Phi1(nu_s, nu_i)|^2 d nu_i` at the basis nodes.
pub fn filtered_signal_spectrum(
    basis: &ProlateBasis,
    source: &SourceParams,
    idler: &FreqGrid,
) -> Vec<f64> {
    basis
        .grid()
        .nodes()
        .iter()
        .map(|&nu_s| {
            idler.integrate(|nu_i| {
                let a = source.jsa_single(nu_s, nu_i);
                a * a
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Figures of merit
// ---------------------------------------------------------------------------

/// Scalar figures of merit at a given pump strength.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Figures {
    /// Heralding efficiency, lambda_0 Ps1 / (Ps1 + (kL)^2 Ps2).
    pub h: f64,
    /// Production rate in units of sigma, Ps / T_min.
    pub r: f64,
    /// Weak-pump approximant (1 - (kL)^2 Ps2/Ps1) lambda_0.
    pub h_weak: f64,
    /// Weak-pump approximant (kL)^2 Ps1 / T_min.
    pub r_weak: f64,
    /// Click probability per pulse.
    pub ps: f64,
}

/// Evaluate H, R and their weak-pump approximants.
pub fn figures_of_merit(ps1: f64, ps2: f64, lambda0: f64, t_min: f64, kappa_l: f64) -> Figures {
    let k2 = kappa_l * kappa_l;
    let ps = k2 * ps1 + k2 * k2 * ps2;
    Figures {
        // Grouped so that kappa -> 0 gives exactly lambda_0.
        h: lambda0 * (ps1 / (ps1 + k2 * ps2)),
        r: ps / t_min,
        h_weak: (1.0 - k2 * ps2 / ps1) * lambda0,
        r_weak: k2 * ps1 / t_min,
        ps,
    }
}

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

/// One fully analyzed source + filter configuration.
///
/// Building it performs the pump-strength-independent work: prolate basis,
/// heralded wavefunctions, density-matrix spectrum, coherence times and the
/// pair-probability quadrature. The double-pair click coefficient (the
/// dominant cost) is computed on first use and cached. Reports at any
/// kappa L then cost nothing.
pub struct Heralding {
    source: SourceParams,
    numerics: Numerics,
    basis: ProlateBasis,
    idler: FreqGrid,
    psi1: DMatrix<f64>,
    eta_m: Vec<f64>,
    ps1: f64,
    density: DensitySpectrum,
    taus: CoherenceTimes,
    p_single: f64,
    ps2: OnceLock<f64>,
}

impl Heralding {
    /// Analyze a configuration. The source must be in sigma units
    /// (sigma = 1); physical rescaling is an I/O concern.
    pub fn new(source: &SourceParams, filter: &FilterParams, numerics: &Numerics) -> Result<Self> {
        let basis = build_basis(filter, numerics.nodes, numerics.tol, numerics.m_cap)?;
        Self::with_basis(source, basis, numerics)
    }

    /// Analyze with a prebuilt basis (shared across pump strengths).
    pub fn with_basis(
        source: &SourceParams,
        basis: ProlateBasis,
        numerics: &Numerics,
    ) -> Result<Self> {
        if source.sigma != 1.0 {
            return Err(Error::InvalidInput(
                "the pipeline operates in sigma units; rescale inputs to sigma = 1".into(),
            ));
        }
        if source.eta <= 0.0 {
            return Err(Error::InvalidInput(
                "heralding analysis needs eta > 0".into(),
            ));
        }
        let idler = FreqGrid::gauss_legendre(numerics.window, numerics.nodes)?;
        let psi1 = heralded_psi1(&basis, source, &idler);
        let eta_m = basis.efficiencies(source.eta);
        let ps1: f64 = eta_m
            .iter()
            .zip(mode_norms(&psi1, &idler))
            .map(|(&e, a)| e * a)
            .sum();
        let density = density_from_psi1(&psi1, &eta_m, ps1, &idler)?;
        let signal = filtered_signal_spectrum(&basis, source, &idler);
        let taus = coherence_times(source, &basis, &signal, &density.mode, &idler);
        let p_single = source.pair_probability(&idler)?.p_single;
        Ok(Self {
            source: *source,
            numerics: *numerics,
            basis,
            idler,
            psi1,
            eta_m,
            ps1,
            density,
            taus,
            p_single,
            ps2: OnceLock::new(),
        })
    }

    pub fn source(&self) -> &SourceParams {
        &self.source
    }

    pub fn basis(&self) -> &ProlateBasis {
        &self.basis
    }

    pub fn idler(&self) -> &FreqGrid {
        &self.idler
    }

    pub fn psi1(&self) -> &DMatrix<f64> {
        &self.psi1
    }

    pub fn ps1(&self) -> f64 {
        self.ps1
    }

    /// Double-pair click coefficient; computed on first call.
    pub fn ps2(&self) -> f64 {
        *self.ps2.get_or_init(|| {
            let engine = Psi2Engine::new(&self.basis, &self.source, &self.idler);
            ps2_quadrature(&engine, &ps2_weights(&self.eta_m), &self.idler)
        })
    }

    pub fn lambda0(&self) -> f64 {
        self.density.lambda0()
    }

    pub fn density(&self) -> &DensitySpectrum {
        &self.density
    }

    pub fn coherence(&self) -> &CoherenceTimes {
        &self.taus
    }

    pub fn t_min(&self) -> f64 {
        self.taus.t_min(self.basis.filter().t())
    }

    /// Single-pair spectral weight p over the truncation window.
    pub fn p_single(&self) -> f64 {
        self.p_single
    }

    pub fn figures(&self, kappa_l: f64) -> Figures {
        figures_of_merit(self.ps1, self.ps2(), self.lambda0(), self.t_min(), kappa_l)
    }

    /// Full report at the given pump strength.
    pub fn report(&self, kappa_l: f64) -> Result<HeraldingReport> {
        let source = self.source.with_kappa_l(kappa_l)?;
        let fig = self.figures(kappa_l);
        let pair = crate::spectral::PairProbability::from_p_single(self.p_single, kappa_l);
        // D_s = Ps/P; the (kL)^2 factors cancel in the kappa -> 0 limit.
        let ds = if kappa_l == 0.0 {
            self.ps1 / self.p_single
        } else {
            fig.ps / pair.total
        };
        let t_min = self.t_min();
        let report = HeraldingReport {
            kappa_l,
            ps1: self.ps1,
            ps2: self.ps2(),
            ps: fig.ps,
            lambda0: self.lambda0(),
            h: fig.h,
            r: fig.r,
            h_weak: fig.h_weak,
            r_weak: fig.r_weak,
            ds,
            t_min,
            tau_p: self.taus.tau_p,
            tau_s: self.taus.tau_s,
            tau_0: self.taus.tau_0,
            p_single: pair.p_single,
            pair_single: pair.single,
            pair_double: pair.double,
            pair_total: pair.total,
            lambda: self.density.lambda.clone(),
            heralded_mode: self.density.mode.clone(),
            idler_nodes: self.idler.nodes().to_vec(),
            config: ReportConfig {
                source,
                b: self.basis.filter().b(),
                t: self.basis.filter().t(),
                c: self.basis.c(),
                window: self.idler.window(),
                nodes: self.numerics.nodes,
                tol: self.numerics.tol,
                m_cap: self.numerics.m_cap,
                modes_retained: self.basis.len(),
                coherence_time_definition: COHERENCE_TIME_DEFINITION,
            },
        };
        report.validate()?;
        Ok(report)
    }
}

/// Configuration echo attached to every report; records everything needed
/// to reproduce the run (window, grid sizes, retention, definitions).
#[derive(Debug, Clone, Serialize)]
pub struct ReportConfig {
    pub source: SourceParams,
    pub b: f64,
    pub t: f64,
    pub c: f64,
    pub window: f64,
    pub nodes: usize,
    pub tol: f64,
    pub m_cap: usize,
    pub modes_retained: usize,
    pub coherence_time_definition: &'static str,
}

/// Complete output of one heralding analysis at a fixed pump strength.
#[derive(Debug, Clone, Serialize)]
pub struct HeraldingReport {
    pub kappa_l: f64,
    pub ps1: f64,
    pub ps2: f64,
    pub ps: f64,
    pub lambda0: f64,
    pub h: f64,
    pub r: f64,
    pub h_weak: f64,
    pub r_weak: f64,
    pub ds: f64,
    pub t_min: f64,
    pub tau_p: f64,
    pub tau_s: f64,
    pub tau_0: f64,
    pub p_single: f64,
    pub pair_single: f64,
    pub pair_double: f64,
    pub pair_total: f64,
    pub lambda: Vec<f64>,
    pub heralded_mode: Vec<f64>,
    pub idler_nodes: Vec<f64>,
    pub config: ReportConfig,
}

impl HeraldingReport {
    fn validate(&self) -> Result<()> {
        let slack = 1e-9;
        if !(self.h >= -slack && self.h <= self.lambda0 + slack && self.lambda0 <= 1.0 + slack) {
            return Err(Error::NumericalFailure(format!(
                "H/lambda_0 ordering violated: H = {}, lambda_0 = {}",
                self.h, self.lambda0
            )));
        }
        if !(self.ds >= -slack && self.ds <= 1.0 + slack) {
            return Err(Error::NumericalFailure(format!(
                "D_s = {} outside [0, 1]",
                self.ds
            )));
        }
        let t_min = self
            .config
            .t
            .max(4.0 * self.tau_p)
            .max(4.0 * self.tau_s)
            .max(4.0 * self.tau_0);
        if t_min != self.t_min {
            return Err(Error::NumericalFailure("T_min is not the exact max".into()));
        }
        for v in [self.ps1, self.ps2, self.ps, self.r] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::NumericalFailure(format!(
                    "negative or non-finite probability/rate: {v}"
                )));
            }
        }
        Ok(())
    }
}
