//! Scalar optics: wavenumbers, the pump focusing parameter, phase mismatch
//! models, the thin-crystal coupling closed form and crystal-length regimes.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};
use crate::geometry::Vec2;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Wavenumber `2πn/λ` in rad/m.
pub fn wavenumber(wavelength_vacuum: f64, n: f64) -> Result<f64> {
    ensure_positive("wavelength", wavelength_vacuum)?;
    if !(n.is_finite() && n >= 1.0) {
        return Err(Error::domain("refractive index", ">= 1", n));
    }
    Ok(2.0 * PI * n / wavelength_vacuum)
}

/// Angular frequency of light with the given vacuum wavelength.
pub fn angular_frequency(wavelength_vacuum: f64) -> Result<f64> {
    ensure_positive("wavelength", wavelength_vacuum)?;
    Ok(2.0 * PI * SPEED_OF_LIGHT / wavelength_vacuum)
}

/// Pump focusing parameter `ξ_p = L / (k_p w_p²)`.
pub fn focusing_parameter(thickness: f64, k_p: f64, waist: f64) -> Result<f64> {
    ensure_positive("crystal thickness", thickness)?;
    ensure_positive("pump wavenumber", k_p)?;
    ensure_positive("pump waist", waist)?;
    Ok(thickness / (k_p * waist * waist))
}

/// Inverse of [`focusing_parameter`]: the pump waist that yields `xi_p`.
pub fn pump_waist_for_focusing(thickness: f64, k_p: f64, xi_p: f64) -> Result<f64> {
    ensure_positive("crystal thickness", thickness)?;
    ensure_positive("pump wavenumber", k_p)?;
    ensure_positive("focusing parameter", xi_p)?;
    Ok((thickness / (k_p * xi_p)).sqrt())
}

/// Thin-crystal, degenerate-SPDC coupling efficiency
/// `4L(k_p ξ_p w_0² + L) / (k_p ξ_p w_0² + 2L)²`.
pub fn thin_crystal_efficiency(thickness: f64, k_p: f64, xi_p: f64, w0: f64) -> Result<f64> {
    ensure_positive("crystal thickness", thickness)?;
    ensure_positive("pump wavenumber", k_p)?;
    ensure_positive("focusing parameter", xi_p)?;
    ensure_positive("collection waist", w0)?;
    let s = k_p * xi_p * w0 * w0;
    let d = s + 2.0 * thickness;
    Ok(4.0 * thickness * (s + thickness) / (d * d))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Short,
    Long,
}

/// `Short` iff `L < L_eff`; the boundary belongs to `Long`.
pub fn classify_regime(thickness: f64, effective_length: f64) -> Result<Regime> {
    ensure_positive("crystal thickness", thickness)?;
    ensure_positive("effective crystal length", effective_length)?;
    Ok(if thickness < effective_length {
        Regime::Short
    } else {
        Regime::Long
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpBeam {
    /// Vacuum wavelength (m).
    pub wavelength: f64,
    /// 1/e² intensity waist at the focus inside the crystal (m).
    pub waist: f64,
    /// Index used for `k_p`; 1.0 gives the vacuum convention.
    pub refractive_index: f64,
    /// Informational only (W).
    pub power: f64,
}

impl PumpBeam {
    pub fn new(wavelength: f64, waist: f64, refractive_index: f64) -> Result<Self> {
        let pump = PumpBeam {
            wavelength,
            waist,
            refractive_index,
            power: 0.0,
        };
        pump.validate()?;
        Ok(pump)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("pump wavelength", self.wavelength)?;
        ensure_positive("pump waist", self.waist)?;
        wavenumber(self.wavelength, self.refractive_index)?;
        Ok(())
    }

    pub fn wavenumber(&self) -> f64 {
        2.0 * PI * self.refractive_index / self.wavelength
    }

    pub fn angular_frequency(&self) -> f64 {
        2.0 * PI * SPEED_OF_LIGHT / self.wavelength
    }

    pub fn focusing_parameter(&self, thickness: f64) -> Result<f64> {
        focusing_parameter(thickness, self.wavenumber(), self.waist)
    }

    /// Same beam with the focus adjusted to give `xi_p` in a crystal of `thickness`.
    pub fn focused_to(&self, thickness: f64, xi_p: f64) -> Result<Self> {
        let waist = pump_waist_for_focusing(thickness, self.wavenumber(), xi_p)?;
        Ok(PumpBeam { waist, ..*self })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CrystalType {
    #[default]
    TypeI,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crystal {
    pub thickness: f64,
    /// Optic-axis angle to the pump normal (rad).
    pub phase_matching_angle: f64,
    /// Azimuth along which the pump walks off (rad).
    pub walk_off_azimuth: f64,
    pub kind: CrystalType,
}

impl Crystal {
    pub fn validate(&self) -> Result<()> {
        ensure_positive("crystal thickness", self.thickness)?;
        let theta = self.phase_matching_angle;
        if !(theta > 0.0 && theta < PI / 2.0) {
            return Err(Error::domain("phase-matching angle", "in (0, pi/2)", theta));
        }
        if !self.walk_off_azimuth.is_finite() {
            return Err(Error::domain(
                "walk-off azimuth",
                "finite",
                self.walk_off_azimuth,
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Arm {
    Signal,
    Idler,
}

impl Arm {
    pub fn partner(self) -> Arm {
        match self {
            Arm::Signal => Arm::Idler,
            Arm::Idler => Arm::Signal,
        }
    }
}

/// A single-mode fiber mode imaged back onto the crystal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollectionMode {
    pub waist: f64,
    pub center: Vec2,
    pub arm: Arm,
}

impl CollectionMode {
    pub fn validate(&self) -> Result<()> {
        ensure_positive("collection waist", self.waist)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterSpec {
    pub center_frequency: f64,
    pub bandwidth: f64,
    pub spatial_width: f64,
}

impl FilterSpec {
    pub fn validate(&self) -> Result<()> {
        ensure_positive("filter center frequency", self.center_frequency)?;
        ensure_positive("filter bandwidth", self.bandwidth)?;
        ensure_positive("filter spatial width", self.spatial_width)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseMatchMode {
    /// `Δk ≡ 0`: the thin-crystal limit where the sinc factor is 1.
    Ideal,
    /// Collinear paraxial expansion of the longitudinal wave-vector components.
    ParaxialQuadratic,
    /// Expansion about a non-collinear phase-matched cone with a linear
    /// pump-anisotropy (walk-off) term.
    ConeExpansion,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseMatchModel {
    pub mode: PhaseMatchMode,
    /// Internal half-angle of the phase-matched cone (rad). Read by `ConeExpansion`.
    pub cone_half_angle: f64,
    /// Slope of `Δk` with the pump transverse momentum along the walk-off
    /// azimuth. Read by `ConeExpansion`.
    pub anisotropy: f64,
}

impl PhaseMatchModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.cone_half_angle.is_finite() && self.cone_half_angle >= 0.0) {
            return Err(Error::domain(
                "cone half-angle",
                ">= 0",
                self.cone_half_angle,
            ));
        }
        if !self.anisotropy.is_finite() {
            return Err(Error::domain(
                "anisotropy coefficient",
                "finite",
                self.anisotropy,
            ));
        }
        Ok(())
    }
}

/// Precomputed phase-mismatch evaluator for one pump/crystal/model triple.
///
/// Signal and idler are degenerate (`λ_s = λ_i = 2λ_p`, same index as the
/// pump), so `k_s = k_i = k_p / 2`. The sign follows `Δk = k_sz + k_iz − k_pz`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseMismatch {
    mode: PhaseMatchMode,
    k_p: f64,
    k_s: f64,
    k_i: f64,
    /// Longitudinal offset that puts the zero set on the cone.
    cone_offset: f64,
    anisotropy: f64,
    walk_off_dir: Vec2,
}

impl PhaseMismatch {
    pub fn new(pump: &PumpBeam, crystal: &Crystal, model: &PhaseMatchModel) -> Self {
        let k_p = pump.wavenumber();
        let k_s = 0.5 * k_p;
        let k_i = 0.5 * k_p;
        let (cone_offset, anisotropy) = match model.mode {
            PhaseMatchMode::ConeExpansion => {
                let q0 = k_s * model.cone_half_angle;
                (
                    q0 * q0 / (2.0 * k_s) + q0 * q0 / (2.0 * k_i),
                    model.anisotropy,
                )
            }
            _ => (0.0, 0.0),
        };
        PhaseMismatch {
            mode: model.mode,
            k_p,
            k_s,
            k_i,
            cone_offset,
            anisotropy,
            walk_off_dir: Vec2::from_polar(1.0, crystal.walk_off_azimuth),
        }
    }

    pub fn signal_wavenumber(&self) -> f64 {
        self.k_s
    }

    pub fn mode(&self) -> PhaseMatchMode {
        self.mode
    }

    /// Bound on `|∂Δk/∂k_s⊥|` for `|k_s⊥| <= q_max` and `|k_s⊥ + k_i⊥| <= qp_max`.
    pub(crate) fn gradient_bound(&self, q_max: f64, qp_max: f64) -> f64 {
        match self.mode {
            PhaseMatchMode::Ideal => 0.0,
            _ => q_max / self.k_s + qp_max / self.k_i + qp_max / self.k_p + self.anisotropy.abs(),
        }
    }

    #[inline]
    pub fn eval(&self, q_s: Vec2, q_i: Vec2) -> f64 {
        if self.mode == PhaseMatchMode::Ideal {
            return 0.0;
        }
        let q_p = q_s + q_i;
        let quadratic = q_s.norm_sq() / (2.0 * self.k_s) + q_i.norm_sq() / (2.0 * self.k_i)
            - q_p.norm_sq() / (2.0 * self.k_p);
        -quadratic + self.cone_offset + self.anisotropy * q_p.dot(self.walk_off_dir)
    }
}

/// Phase mismatch `Δk` (rad/m) for transverse momenta `k_s⊥`, `k_i⊥`.
pub fn phase_mismatch(
    k_s_perp: Vec2,
    k_i_perp: Vec2,
    pump: &PumpBeam,
    crystal: &Crystal,
    model: &PhaseMatchModel,
) -> f64 {
    PhaseMismatch::new(pump, crystal, model).eval(k_s_perp, k_i_perp)
}
