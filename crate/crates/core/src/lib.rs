//! Numerical model of biphoton spatial modes in non-collinear Type-I SPDC.
//!
//! The crate evaluates the joint two-photon amplitude on transverse-momentum
//! grids, derives heralded (conditional) modes, and scores single-mode fiber
//! coupling through overlap integrals. A separate half of the crate works on
//! far-field ring images: synthesis from the model, ingestion of camera
//! frames, and ring-width asymmetry measurements.
//!
//! All quantities are SI internally (metres, rad/m, rad/s). Unit conversion
//! happens only at the configuration boundary, see [`config`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod biphoton;
pub mod config;
pub mod error;
pub mod geometry;
pub mod grid;
pub mod image_io;
pub mod metrics;
pub mod optics;
pub mod ring;

pub use biphoton::{
    conditional_mode, ellipticity, frequency_filter, joint_mode_function, pump_angular_spectrum,
    reference_mode, spatial_filter, JointAmplitude,
};
pub use config::{ExperimentConfig, GridSpec};
pub use error::{Error, Result};
pub use geometry::Vec2;
pub use grid::{ComplexField, TransverseGrid};
pub use metrics::{
    cauchy_schwarz_check, coupling_efficiency_numeric, efficiency_sweep, mode_matching, purity,
    purity_of_mixture, CouplingReport, SweepRow,
};
pub use optics::{
    classify_regime, focusing_parameter, phase_mismatch, thin_crystal_efficiency, wavenumber, Arm,
    CollectionMode, Crystal, CrystalType, FilterSpec, PhaseMatchMode, PhaseMatchModel, PumpBeam,
    Regime,
};
pub use ring::{
    asymmetry_factor, find_ring_center, radial_profile, synthesize_ring, AsymmetryResult,
    Provenance, RingImage, RingProfile,
};

pub use num_complex::Complex64;
