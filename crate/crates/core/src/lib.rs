//! Multimode simulator and filter optimizer for heralded single-photon
//! sources.
//!
//! Photon pairs from a pulsed SPDC/SFWM source are modeled to second order
//! in the pump strength (up to two pairs per pulse). The signal photon
//! passes a rectangular spectral filter of bandwidth B and a rectangular
//! time gate of width T before hitting an on/off detector; a click heralds
//! the idler. The detector measures in the prolate spheroidal mode basis of
//! the time-and-band-limited channel, with per-mode transmissions
//! chi_m(c), c = pi B T / 2.
//!
//! The crate computes, on Gauss-Legendre quadrature grids:
//!
//! * joint spectral amplitudes and pair-generation probabilities
//!   ([`spectral`]),
//! * the prolate measurement basis ([`prolate`]),
//! * click probabilities, the heralded idler density matrix, heralding
//!   efficiency H and production rate R ([`heralding`]),
//! * Schmidt decompositions of the two-photon amplitude ([`schmidt`]),
//! * filter-parameter scans that trade H against R ([`optimizer`]).
//!
//! Everything is expressed in units of the pump sum-frequency bandwidth
//! sigma (frequencies in sigma, times in 1/sigma). All operations are pure
//! functions of their inputs; parallel sections use fixed partitions with
//! ordered combination so results are identical run to run and independent
//! of the thread count.

pub mod defaults;
pub mod error;
pub mod heralding;
pub mod optimizer;
pub mod prolate;
pub mod quad;
pub mod schmidt;
pub mod spectral;

pub use error::{Error, Result};
pub use heralding::{
    click_probabilities, coherence_times, figures_of_merit, heralded_density_matrix, heralded_psi1,
    heralded_psi2, CoherenceTimes, DensitySpectrum, Heralding, HeraldingReport,
};
pub use optimizer::{
    choose_t, kappa_for_target_h, scan_b, tradeoff_curve, unfiltered_reference, ScanPoint,
    ScanResult, TradeoffCurve, TradeoffPoint,
};
pub use prolate::{build_basis, FilterParams, ProlateBasis};
pub use quad::FreqGrid;
pub use schmidt::{schmidt_decompose, schmidt_of_kernel, SchmidtResult};
pub use spectral::{PairProbability, SourceParams};
