//! Second-order coherence g²(τ) of a two-photon state detected through
//! frequency-mismatched detectors.
//!
//! The crate evaluates the closed-form overlap algebra for Gaussian and
//! causal-Lorentzian wavepackets, and checks it against two independent
//! references: adaptive quadrature of the overlap integrals and a
//! brute-force Fock-space calculation over discretized modes.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod error;
pub mod figures;
pub mod fock;
pub mod g2;
pub mod output;
pub mod overlap;
pub mod quadrature;
pub mod spectral;
pub mod sweep;
pub mod validate;

pub use error::{Error, Result};
pub use fock::{discretize, oracle_g2, oracle_moments, DiscreteModeGrid, ModeDomain, TwoPhotonState};
pub use g2::{assert_reduction, g2_fock_pair, g2_from_overlaps, g2_from_single_j, G2Flags, G2Result};
pub use overlap::{
    compute_overlap_set, legacy_fig1a_kernel, lorentzian_cross_overlap, lorentzian_overlap_set,
    overlap_quadrature, Method, OverlapSet,
};
pub use quadrature::QuadratureSettings;
pub use spectral::{check_normalization, Model, ScenarioSpec, WavepacketSpec};
pub use sweep::{analyze_extrema, detect_bunching, run_sweep, Axis, ExtremaReport, SweepGrid, SweepRecord};
