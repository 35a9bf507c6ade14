//! Spectra, bond measures and multifractal exponents of quantum star graphs
//! with bond lengths `L_j = L + ε·ℓ_j`.
//!
//! Every routine is generic over [`Real`] (`f32` or `f64`); the aliases below
//! fix the double-precision types used by the command-line runner.

// `!(x > 0)` is deliberate: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod error;
pub mod graph;
pub mod measure;
pub mod mellin;
pub mod quadrature;
pub mod root;
pub mod scalar;
pub mod special;
pub mod spectrum;
pub mod zeta;

pub use error::{Error, Result};
pub use graph::{BondFamily, IndexFunction, StarGraph};
pub use measure::{
    amplitude, entropy_from_moments, fractal_exponent_estimate, measure_at, moment_sum, renormalized_moment_sum,
    renyi_entropy, shannon_entropy, BondMeasure, MomentMode, MomentReport,
};
pub use mellin::{
    entropy_asymptotic, mellin_asymptotic_m1, mellin_closed_form, mellin_closed_form_of, mellin_numeric,
    stability_check, LengthFunction, MellinMethod, MellinValue, StabilityReport,
};
pub use scalar::Real;
pub use spectrum::{
    cluster_decompose, first_in_cluster, poles_in_range, sigma_sequence, solve_spectrum, spectral_function, Cluster,
    Eigenvalue, ScanSchedule, SigmaPoint,
};
pub use zeta::{
    epstein_zeta, ground_state_exponent, ground_state_exponent_limit, riemann_zeta, symmetry_check,
    zeta_graph_finite, zeta_graph_limit, SymmetryCheck, ZetaEvaluation, ZetaKind,
};

pub type StarGraph64 = StarGraph<f64>;
pub type StarGraph32 = StarGraph<f32>;
pub type BondFamily64 = BondFamily<f64>;
pub type BondFamily32 = BondFamily<f32>;
pub type Eigenvalue64 = Eigenvalue<f64>;
pub type BondMeasure64 = BondMeasure<f64>;
pub type LengthFunction64 = LengthFunction<f64>;
