//! Joint two-photon amplitude, collection filters and heralded modes.
//!
//! The joint amplitude `Φ(k_s⊥, k_i⊥) = E₀(k_s⊥ + k_i⊥)·sinc(ΔkL/2)·exp(iΔkL/2)`
//! lives on the product of a signal and an idler grid. With `n²` points per
//! grid the full tensor has `n⁴` entries, so it is never stored: every
//! consumer evaluates samples on demand, slice by slice.
//!
//! Projections (conditional modes, coupling overlaps) skip partner samples
//! where either the herald or the pump spectrum is negligible. The cut-offs
//! ([`HERALD_CUTOFF`], [`PUMP_CUTOFF`]) sit far below every tolerance used
//! downstream.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{ensure_positive, Error, Result};
use crate::geometry::Vec2;
use crate::grid::{ComplexField, IndexBox, TransverseGrid};
use crate::optics::{
    Arm, CollectionMode, Crystal, FilterSpec, PhaseMatchModel, PhaseMismatch, PumpBeam,
};

/// Relative herald amplitude below which partner samples are skipped.
pub const HERALD_CUTOFF: f64 = 1e-10;
/// Pump spectral amplitude below which partner samples are skipped.
pub const PUMP_CUTOFF: f64 = 1e-12;

/// Largest grid (points per axis) accepted by [`JointAmplitude::materialize`].
pub const MATERIALIZE_MAX_POINTS: usize = 32;

/// Gaussian pump angular spectrum `exp(−w_p²|q|²/4)`, peak 1 at `q = 0`.
pub fn pump_angular_spectrum(pump: &PumpBeam, q: Vec2) -> Complex64 {
    Complex64::new(gaussian_amplitude(pump.waist, q.norm_sq()), 0.0)
}

#[inline]
fn gaussian_amplitude(waist: f64, q_sq: f64) -> f64 {
    (-0.25 * waist * waist * q_sq).exp()
}

/// Spatial collection filter `exp(−w_c²|k|²/2)`.
pub fn spatial_filter(w_c: f64, k: Vec2) -> Result<f64> {
    ensure_positive("spatial filter width", w_c)?;
    Ok((-0.5 * w_c * w_c * k.norm_sq()).exp())
}

/// Spectral filter `exp(−(ω − ω_c0)²/(2B_c²))`.
pub fn frequency_filter(spec: &FilterSpec, omega: f64) -> Result<f64> {
    ensure_positive("filter bandwidth", spec.bandwidth)?;
    let d = omega - spec.center_frequency;
    Ok((-d * d / (2.0 * spec.bandwidth * spec.bandwidth)).exp())
}

/// Heralding reference mode `exp(−w_0²|k − k_c|²/4)` with peak 1.
pub fn reference_mode(mode: &CollectionMode, grid: &TransverseGrid) -> Result<ComplexField> {
    mode.validate()?;
    let (w, c) = (mode.waist, mode.center);
    Ok(ComplexField::from_fn(*grid, |k| {
        Complex64::new(gaussian_amplitude(w, (k - c).norm_sq()), 0.0)
    }))
}

#[inline]
fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0
    } else {
        x.sin() / x
    }
}

#[derive(Debug, Clone)]
enum Kernel {
    Spdc {
        pump_waist: f64,
        mismatch: PhaseMismatch,
        half_thickness: f64,
        /// Radius in `|k_s⊥ + k_i⊥|` beyond which the pump spectrum is below [`PUMP_CUTOFF`].
        support: f64,
    },
    Separable {
        signal: Vec<Complex64>,
        idler: Vec<Complex64>,
    },
}

/// Lazily evaluated joint amplitude on `grid_s × grid_i`.
#[derive(Debug, Clone)]
pub struct JointAmplitude {
    grid_s: TransverseGrid,
    grid_i: TransverseGrid,
    kernel: Kernel,
    /// Global scalar: spectral-filter weight times any imposed global phase.
    factor: Complex64,
}

/// Builds the SPDC joint amplitude for a pump, crystal and phase-matching model.
pub fn joint_mode_function(
    grid_s: TransverseGrid,
    grid_i: TransverseGrid,
    pump: &PumpBeam,
    crystal: &Crystal,
    model: &PhaseMatchModel,
) -> Result<JointAmplitude> {
    pump.validate()?;
    crystal.validate()?;
    model.validate()?;
    let support = 2.0 * (-PUMP_CUTOFF.ln()).sqrt() / pump.waist;
    Ok(JointAmplitude {
        grid_s,
        grid_i,
        kernel: Kernel::Spdc {
            pump_waist: pump.waist,
            mismatch: PhaseMismatch::new(pump, crystal, model),
            half_thickness: 0.5 * crystal.thickness,
            support,
        },
        factor: Complex64::new(1.0, 0.0),
    })
}

impl JointAmplitude {
    /// Rank-one amplitude `Φ(k_s, k_i) = f(k_s)·g(k_i)`.
    pub fn separable(signal: &ComplexField, idler: &ComplexField) -> Self {
        JointAmplitude {
            grid_s: *signal.grid(),
            grid_i: *idler.grid(),
            kernel: Kernel::Separable {
                signal: signal.values().to_vec(),
                idler: idler.values().to_vec(),
            },
            factor: Complex64::new(1.0, 0.0),
        }
    }

    /// Multiplies every sample by a real spectral weight (e.g. the product of
    /// the signal and idler frequency-filter transmissions).
    pub fn with_spectral_weight(mut self, weight: f64) -> Self {
        self.factor *= weight;
        self
    }

    /// Multiplies every sample by `exp(i·phase)`.
    pub fn with_global_phase(mut self, phase: f64) -> Self {
        self.factor *= Complex64::from_polar(1.0, phase);
        self
    }

    pub fn grid_s(&self) -> &TransverseGrid {
        &self.grid_s
    }

    pub fn grid_i(&self) -> &TransverseGrid {
        &self.grid_i
    }

    pub fn grid(&self, arm: Arm) -> &TransverseGrid {
        match arm {
            Arm::Signal => &self.grid_s,
            Arm::Idler => &self.grid_i,
        }
    }

    /// Underlying SPDC phase mismatch, if this is an SPDC amplitude.
    pub fn phase_mismatch(&self) -> Option<&PhaseMismatch> {
        match &self.kernel {
            Kernel::Spdc { mismatch, .. } => Some(mismatch),
            Kernel::Separable { .. } => None,
        }
    }

    #[inline]
    fn sample(&self, is: usize, q_s: Vec2, ii: usize, q_i: Vec2) -> Complex64 {
        let raw = match &self.kernel {
            Kernel::Spdc {
                pump_waist,
                mismatch,
                half_thickness,
                ..
            } => {
                let e0 = gaussian_amplitude(*pump_waist, (q_s + q_i).norm_sq());
                let x = mismatch.eval(q_s, q_i) * half_thickness;
                let (s, c) = x.sin_cos();
                Complex64::new(c, s) * (e0 * sinc(x))
            }
            Kernel::Separable { signal, idler } => signal[is] * idler[ii],
        };
        raw * self.factor
    }

    /// Sample at signal index `is`, idler index `ii`.
    pub fn at(&self, is: usize, ii: usize) -> Complex64 {
        self.sample(is, self.grid_s.point_at(is), ii, self.grid_i.point_at(ii))
    }

    /// All idler samples at fixed signal index.
    pub fn signal_slice(&self, is: usize) -> Vec<Complex64> {
        let q_s = self.grid_s.point_at(is);
        (0..self.grid_i.len())
            .map(|ii| self.sample(is, q_s, ii, self.grid_i.point_at(ii)))
            .collect()
    }

    /// All signal samples at fixed idler index.
    pub fn idler_slice(&self, ii: usize) -> Vec<Complex64> {
        let q_i = self.grid_i.point_at(ii);
        (0..self.grid_s.len())
            .map(|is| self.sample(is, self.grid_s.point_at(is), ii, q_i))
            .collect()
    }

    /// Full tensor, laid out `[is * n_i² + ii]`. Only for small grids.
    pub fn materialize(&self) -> Result<Vec<Complex64>> {
        let n = self.grid_s.n().max(self.grid_i.n());
        if n > MATERIALIZE_MAX_POINTS {
            return Err(Error::domain(
                "points per axis for materialization",
                "<= 32",
                n as f64,
            ));
        }
        Ok((0..self.grid_s.len())
            .into_par_iter()
            .flat_map_iter(|is| self.signal_slice(is))
            .collect())
    }

    /// Partner-grid indices that can contribute at output point `q` of `onto`.
    fn partner_window(&self, onto: Arm, q: Vec2, herald_box: &IndexBox) -> IndexBox {
        match &self.kernel {
            Kernel::Spdc { support, .. } => {
                let partner = self.grid(onto.partner());
                partner.window(-q, *support).intersect(herald_box)
            }
            Kernel::Separable { .. } => herald_box.clone(),
        }
    }

    /// `P(k) = Σ_partner Φ·conj(herald)·spacing²` for every sample `k` of the
    /// `onto` grid, where the herald lives on the partner grid.
    pub fn project(&self, herald: &ComplexField, onto: Arm) -> Result<Vec<Complex64>> {
        let partner_arm = onto.partner();
        let partner_grid = *self.grid(partner_arm);
        if !herald.grid().approx_eq(&partner_grid) {
            return Err(Error::GridMismatch(format!(
                "herald must be sampled on the {partner_arm:?} grid"
            )));
        }
        let out_grid = *self.grid(onto);
        let Some(herald_box) = herald.significant_box(HERALD_CUTOFF) else {
            return Err(Error::ZeroMode("herald mode is identically zero".into()));
        };
        let n_p = partner_grid.n();
        let h2 = partner_grid.cell_area();
        let hv = herald.values();
        let projected = (0..out_grid.len())
            .into_par_iter()
            .map(|io| {
                let q = out_grid.point_at(io);
                let window = self.partner_window(onto, q, &herald_box);
                let mut acc = Complex64::new(0.0, 0.0);
                for iy in window.y.clone() {
                    for ix in window.x.clone() {
                        let ip = iy * n_p + ix;
                        let qp = partner_grid.point(ix, iy);
                        let phi = match onto {
                            Arm::Signal => self.sample(io, q, ip, qp),
                            Arm::Idler => self.sample(ip, qp, io, q),
                        };
                        acc += phi * hv[ip].conj();
                    }
                }
                acc * h2
            })
            .collect();
        Ok(projected)
    }
}

/// Normalized conditional mode of `which` given its partner was projected
/// onto `herald` (sampled on the partner grid).
///
/// The projection uses `conj(herald)`; for the real Gaussian reference
/// modes this is the plain product `Φ·u`.
pub fn conditional_mode(
    joint: &JointAmplitude,
    herald: &ComplexField,
    which: Arm,
) -> Result<ComplexField> {
    let values = joint.project(herald, which)?;
    let field = ComplexField::new(*joint.grid(which), values)?;
    let norm = field.norm();
    if !(norm > 0.0) {
        return Err(Error::ZeroMode(format!(
            "conditional {which:?} mode vanishes for this herald"
        )));
    }
    let edge = field.edge_fraction();
    if edge > 1e-6 {
        log::warn!(
            "conditional {which:?} mode carries {edge:.2e} of its weight on the grid boundary; \
             the grid may not cover the mode"
        );
    }
    Ok(field.scaled(Complex64::new(1.0 / norm, 0.0)))
}

/// Major-over-minor ratio of the principal second-moment widths of `|field|²`.
pub fn ellipticity(field: &ComplexField) -> Result<f64> {
    let (major, minor) = field.moments()?.principal();
    if !(minor > 0.0) {
        return Err(Error::ZeroMode(
            "field intensity is degenerate along one axis".into(),
        ));
    }
    Ok((major / minor).sqrt())
}
