//! Experiment configuration.
//!
//! [`ExperimentConfig`] holds SI values. On disk the configuration is a
//! single JSON document whose keys carry their unit (`wavelength_nm`,
//! `thickness_mm`, ...); [`ConfigFile`] mirrors that layout and converts in
//! both directions. Missing sections or keys take the defaults of the
//! reference setup: 405 nm pump, 2 mm Type-I BBO cut at 29.97°, degenerate
//! 810 nm photons collected with 456 µm modes.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::biphoton::{self, JointAmplitude};
use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::grid::{ComplexField, TransverseGrid};
use crate::metrics::{self, CouplingReport};
use crate::optics::{
    self, Arm, CollectionMode, Crystal, CrystalType, FilterSpec, PhaseMatchMode, PhaseMatchModel,
    PhaseMismatch, PumpBeam, Regime, SPEED_OF_LIGHT,
};

/// Focusing parameters of the default sweep.
pub const DEFAULT_XI_SWEEP: [f64; 7] = [0.01, 0.05, 0.1, 0.2, 0.4, 0.6, 0.832];
/// Collection waists (m) of the default sweep.
pub const DEFAULT_W0_SWEEP: [f64; 4] = [100e-6, 300e-6, 456e-6, 700e-6];

/// How the transverse grids are laid out.
///
/// Each arm gets its own grid centered on its collection mode. The half
/// extent is `extent_efolds` times the combined pump-spectrum and herald
/// e-fold radius. Unless `points_per_axis` is fixed, the point count is the
/// smallest even number that samples the narrowest Gaussian scale at one
/// point per standard deviation, clamped to `[min_points, max_points]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub points_per_axis: Option<usize>,
    pub min_points: usize,
    pub max_points: usize,
    pub extent_efolds: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            points_per_axis: None,
            min_points: 64,
            max_points: 1024,
            extent_efolds: 4.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub xi: Vec<f64>,
    /// Collection waists (m).
    pub w0: Vec<f64>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            xi: DEFAULT_XI_SWEEP.to_vec(),
            w0: DEFAULT_W0_SWEEP.to_vec(),
        }
    }
}

/// Far-field camera used for ring images.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraSpec {
    pub size_px: usize,
    /// Pixel pitch (m).
    pub pixel_pitch: f64,
    /// Crystal-to-camera distance (m); emission angle θ lands at radius `distance·θ`.
    pub distance: f64,
}

impl Default for CameraSpec {
    fn default() -> Self {
        CameraSpec {
            size_px: 256,
            pixel_pitch: 32e-6,
            distance: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub pump: PumpBeam,
    pub crystal: Crystal,
    pub phase_match: PhaseMatchModel,
    pub signal_mode: CollectionMode,
    pub idler_mode: CollectionMode,
    pub filters: FilterSpec,
    pub grid: GridSpec,
    pub sweep: SweepSpec,
    pub camera: CameraSpec,
    /// User-supplied effective crystal length for regime classification (m).
    pub effective_length: Option<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ConfigFile::default()
            .into_config()
            .expect("default configuration is valid")
    }
}

impl ExperimentConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: ConfigFile = serde_json::from_str(text).map_err(|e| {
            Error::config(
                format!("line {}, column {}", e.line(), e.column()),
                e.to_string(),
            )
        })?;
        file.into_config()
    }

    pub fn from_path(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(path.display().to_string(), e.to_string()))?;
        Self::from_json_str(&text)
    }

    /// Canonical JSON (unit-suffixed keys, fixed key order).
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&ConfigFile::from_config(self))
            .expect("config serialization cannot fail")
    }

    /// SHA-256 of the canonical JSON, hex encoded.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_json_string().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let at = |path: &'static str| move |e: Error| Error::config(path, e.to_string());
        self.pump.validate().map_err(at("pump"))?;
        self.crystal.validate().map_err(at("crystal"))?;
        self.phase_match.validate().map_err(at("phase_match"))?;
        self.signal_mode.validate().map_err(at("signal_mode"))?;
        self.idler_mode.validate().map_err(at("idler_mode"))?;
        self.filters.validate().map_err(at("filters"))?;
        let g = &self.grid;
        if let Some(n) = g.points_per_axis {
            if n < TransverseGrid::MIN_POINTS || !n.is_multiple_of(2) {
                return Err(Error::config(
                    "grid.points_per_axis",
                    "must be even and >= 8",
                ));
            }
        }
        if g.min_points < TransverseGrid::MIN_POINTS || g.min_points > g.max_points {
            return Err(Error::config(
                "grid.min_points",
                "must be >= 8 and <= grid.max_points",
            ));
        }
        if !(g.extent_efolds.is_finite() && g.extent_efolds > 0.0) {
            return Err(Error::config("grid.extent_efolds", "must be positive"));
        }
        if self.sweep.xi.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(Error::config("sweep.xi", "values must be positive"));
        }
        if self.sweep.w0.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(Error::config("sweep.w0_um", "values must be positive"));
        }
        let c = &self.camera;
        if c.size_px < crate::ring::MIN_IMAGE_SIDE {
            return Err(Error::config("camera.size_px", "must be >= 64"));
        }
        if !(c.pixel_pitch > 0.0 && c.distance > 0.0) {
            return Err(Error::config(
                "camera",
                "pixel_pitch_um and distance_mm must be positive",
            ));
        }
        if let Some(l) = self.effective_length {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::config(
                    "crystal.effective_length_mm",
                    "must be positive",
                ));
            }
        }
        Ok(())
    }

    pub fn pump_wavenumber(&self) -> f64 {
        self.pump.wavenumber()
    }

    pub fn focusing_parameter(&self) -> f64 {
        self.crystal.thickness / (self.pump.wavenumber() * self.pump.waist.powi(2))
    }

    /// Copy with the pump waist set to give focusing parameter `xi_p`.
    pub fn with_focusing(&self, xi_p: f64) -> Result<Self> {
        Ok(ExperimentConfig {
            pump: self.pump.focused_to(self.crystal.thickness, xi_p)?,
            ..self.clone()
        })
    }

    /// Copy with both collection waists set to `w0`.
    pub fn with_collection_waist(&self, w0: f64) -> Self {
        let mut c = self.clone();
        c.signal_mode.waist = w0;
        c.idler_mode.waist = w0;
        c
    }

    pub fn phase_mismatch(&self) -> PhaseMismatch {
        PhaseMismatch::new(&self.pump, &self.crystal, &self.phase_match)
    }

    /// Radius of the phase-matched cone in transverse momentum (rad/m).
    pub fn cone_radius(&self) -> f64 {
        match self.phase_match.mode {
            PhaseMatchMode::ConeExpansion => {
                self.phase_mismatch().signal_wavenumber() * self.phase_match.cone_half_angle
            }
            _ => 0.0,
        }
    }

    pub fn regime(&self) -> Option<Regime> {
        self.effective_length
            .and_then(|l| optics::classify_regime(self.crystal.thickness, l).ok())
    }

    /// Thin-crystal closed form for the signal collection waist.
    pub fn closed_form_efficiency(&self) -> Result<f64> {
        optics::thin_crystal_efficiency(
            self.crystal.thickness,
            self.pump.wavenumber(),
            self.focusing_parameter(),
            self.signal_mode.waist,
        )
    }

    /// Signal and idler grids per [`GridSpec`].
    pub fn grids(&self) -> Result<(TransverseGrid, TransverseGrid)> {
        let w_p = self.pump.waist;
        let w_small = self.signal_mode.waist.min(self.idler_mode.waist);
        let w_large = self.signal_mode.waist.max(self.idler_mode.waist);
        let reach = (2.0 / w_p).hypot(2.0 / w_small);
        let half = self.grid.extent_efolds * reach;

        let n = match self.grid.points_per_axis {
            Some(n) => n,
            None => {
                let sigma = (2f64.sqrt() / w_p).min(2f64.sqrt() / w_large);
                let far = self
                    .signal_mode
                    .center
                    .norm()
                    .max(self.idler_mode.center.norm())
                    + half;
                let pump_reach = 2.0 * (-biphoton::PUMP_CUTOFF.ln()).sqrt() / w_p;
                let slope = self.phase_mismatch().gradient_bound(far, pump_reach);
                // at most 0.5 rad of sinc argument per step
                let h_phase = if slope > 0.0 {
                    1.0 / (slope * self.crystal.thickness)
                } else {
                    f64::INFINITY
                };
                let h = sigma.min(h_phase);
                let raw = (2.0 * half / h).ceil() as usize + 1;
                let even = raw + raw % 2;
                even.clamp(self.grid.min_points, self.grid.max_points)
            }
        };
        let gs = TransverseGrid::new(n, half, self.signal_mode.center)?;
        let gi = TransverseGrid::new(n, half, self.idler_mode.center)?;
        Ok((gs, gi))
    }

    /// Joint amplitude including the spectral-filter weight at the degenerate frequency.
    pub fn joint(&self, grid_s: TransverseGrid, grid_i: TransverseGrid) -> Result<JointAmplitude> {
        let omega = 0.5 * self.pump.angular_frequency();
        let t = biphoton::frequency_filter(&self.filters, omega)?;
        Ok(biphoton::joint_mode_function(
            grid_s,
            grid_i,
            &self.pump,
            &self.crystal,
            &self.phase_match,
        )?
        .with_spectral_weight(t * t))
    }

    /// Grids, joint amplitude and both reference modes, ready for projections.
    pub fn setup(&self) -> Result<Setup> {
        self.validate()?;
        let (gs, gi) = self.grids()?;
        let joint = self.joint(gs, gi)?;
        let mode_s = biphoton::reference_mode(&self.signal_mode, &gs)?;
        let mode_i = biphoton::reference_mode(&self.idler_mode, &gi)?;
        Ok(Setup {
            joint,
            mode_s,
            mode_i,
        })
    }

    pub fn coupling_report(&self) -> Result<CouplingReport> {
        let s = self.setup()?;
        metrics::coupling_efficiency_numeric(&s.joint, &s.mode_s, &s.mode_i)
    }

    /// Normalized signal mode heralded by the idler reference mode.
    pub fn conditional_signal_mode(&self) -> Result<ComplexField> {
        let s = self.setup()?;
        biphoton::conditional_mode(&s.joint, &s.mode_i, Arm::Signal)
    }
}

/// Everything needed to evaluate heralding and coupling for one config.
#[derive(Debug, Clone)]
pub struct Setup {
    pub joint: JointAmplitude,
    pub mode_s: ComplexField,
    pub mode_i: ComplexField,
}

impl Setup {
    pub fn reference(&self, arm: Arm) -> &ComplexField {
        match arm {
            Arm::Signal => &self.mode_s,
            Arm::Idler => &self.mode_i,
        }
    }
}

// --- on-disk layout -------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub pump: PumpFile,
    pub crystal: CrystalFile,
    pub phase_match: PhaseMatchFile,
    pub signal_mode: CollectionFile,
    pub idler_mode: CollectionFile,
    pub filters: FilterFile,
    pub grid: GridFile,
    pub sweep: SweepFile,
    pub camera: CameraFile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PumpFile {
    pub wavelength_nm: f64,
    pub waist_um: f64,
    pub refractive_index: f64,
    pub power_mw: f64,
}

impl Default for PumpFile {
    fn default() -> Self {
        PumpFile {
            wavelength_nm: 405.0,
            waist_um: 100.0,
            refractive_index: 1.0,
            power_mw: 300.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CrystalFile {
    #[serde(rename = "type")]
    pub kind: CrystalType,
    pub thickness_mm: f64,
    pub phase_matching_angle_deg: f64,
    pub walk_off_azimuth_deg: f64,
    pub effective_length_mm: Option<f64>,
}

impl Default for CrystalFile {
    fn default() -> Self {
        CrystalFile {
            kind: CrystalType::TypeI,
            thickness_mm: 2.0,
            phase_matching_angle_deg: 29.97,
            walk_off_azimuth_deg: 0.0,
            effective_length_mm: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhaseMatchFile {
    pub mode: PhaseMatchMode,
    pub cone_half_angle_mrad: f64,
    pub anisotropy: f64,
}

impl Default for PhaseMatchFile {
    fn default() -> Self {
        PhaseMatchFile {
            mode: PhaseMatchMode::ConeExpansion,
            cone_half_angle_mrad: 20.0,
            anisotropy: 0.005,
        }
    }
}

/// Collection mode placed on the phase-matched cone at `azimuth_deg`,
/// shifted radially by `radial_offset_per_mm` (units of 10³ rad/m).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CollectionFile {
    pub waist_um: f64,
    pub azimuth_deg: f64,
    pub radial_offset_per_mm: f64,
}

impl CollectionFile {
    fn new(azimuth_deg: f64) -> Self {
        CollectionFile {
            waist_um: 456.0,
            azimuth_deg,
            radial_offset_per_mm: 0.0,
        }
    }
}

impl Default for CollectionFile {
    fn default() -> Self {
        CollectionFile::new(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterFile {
    pub center_wavelength_nm: f64,
    pub bandwidth_nm: f64,
    pub spatial_width_um: f64,
}

impl Default for FilterFile {
    fn default() -> Self {
        FilterFile {
            center_wavelength_nm: 810.0,
            bandwidth_nm: 10.0,
            spatial_width_um: 456.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridFile {
    pub points_per_axis: Option<usize>,
    pub min_points: usize,
    pub max_points: usize,
    pub extent_efolds: f64,
}

impl Default for GridFile {
    fn default() -> Self {
        let g = GridSpec::default();
        GridFile {
            points_per_axis: g.points_per_axis,
            min_points: g.min_points,
            max_points: g.max_points,
            extent_efolds: g.extent_efolds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepFile {
    pub xi: Vec<f64>,
    pub w0_um: Vec<f64>,
}

impl Default for SweepFile {
    fn default() -> Self {
        SweepFile {
            xi: DEFAULT_XI_SWEEP.to_vec(),
            w0_um: DEFAULT_W0_SWEEP.iter().map(|w| w * 1e6).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CameraFile {
    pub size_px: usize,
    pub pixel_pitch_um: f64,
    pub distance_mm: f64,
}

impl Default for CameraFile {
    fn default() -> Self {
        let c = CameraSpec::default();
        CameraFile {
            size_px: c.size_px,
            pixel_pitch_um: c.pixel_pitch * 1e6,
            distance_mm: c.distance * 1e3,
        }
    }
}

impl Default for ConfigFile {
    fn default() -> Self {
        ConfigFile {
            pump: PumpFile::default(),
            crystal: CrystalFile::default(),
            phase_match: PhaseMatchFile::default(),
            signal_mode: CollectionFile::new(0.0),
            idler_mode: CollectionFile::new(180.0),
            filters: FilterFile::default(),
            grid: GridFile::default(),
            sweep: SweepFile::default(),
            camera: CameraFile::default(),
        }
    }
}

fn omega_of(wavelength: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / wavelength
}

impl ConfigFile {
    /// Positive-quantity fields checked in file units, so errors name the key.
    fn check_positive(&self) -> Result<()> {
        let fields = [
            ("pump.wavelength_nm", self.pump.wavelength_nm),
            ("pump.waist_um", self.pump.waist_um),
            ("pump.refractive_index", self.pump.refractive_index),
            ("crystal.thickness_mm", self.crystal.thickness_mm),
            ("signal_mode.waist_um", self.signal_mode.waist_um),
            ("idler_mode.waist_um", self.idler_mode.waist_um),
            (
                "filters.center_wavelength_nm",
                self.filters.center_wavelength_nm,
            ),
            ("filters.bandwidth_nm", self.filters.bandwidth_nm),
            ("filters.spatial_width_um", self.filters.spatial_width_um),
        ];
        for (path, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(
                    path,
                    format!("must be positive and finite, got {v}"),
                ));
            }
        }
        Ok(())
    }

    pub fn into_config(self) -> Result<ExperimentConfig> {
        self.check_positive()?;
        let at = |path: &'static str| move |e: Error| Error::config(path, e.to_string());
        let p = &self.pump;
        let mut pump = PumpBeam::new(
            p.wavelength_nm * 1e-9,
            p.waist_um * 1e-6,
            p.refractive_index,
        )
        .map_err(at("pump"))?;
        pump.power = p.power_mw * 1e-3;

        let c = &self.crystal;
        let crystal = Crystal {
            thickness: c.thickness_mm * 1e-3,
            phase_matching_angle: c.phase_matching_angle_deg.to_radians(),
            walk_off_azimuth: c.walk_off_azimuth_deg.to_radians(),
            kind: c.kind,
        };
        crystal.validate().map_err(at("crystal"))?;

        let phase_match = PhaseMatchModel {
            mode: self.phase_match.mode,
            cone_half_angle: self.phase_match.cone_half_angle_mrad * 1e-3,
            anisotropy: self.phase_match.anisotropy,
        };
        phase_match.validate().map_err(at("phase_match"))?;

        let cone = match phase_match.mode {
            PhaseMatchMode::ConeExpansion => 0.5 * pump.wavenumber() * phase_match.cone_half_angle,
            _ => 0.0,
        };
        let place = |f: &CollectionFile, arm: Arm| CollectionMode {
            waist: f.waist_um * 1e-6,
            center: Vec2::from_polar(
                cone + f.radial_offset_per_mm * 1e3,
                f.azimuth_deg.to_radians(),
            ),
            arm,
        };
        let signal_mode = place(&self.signal_mode, Arm::Signal);
        let idler_mode = place(&self.idler_mode, Arm::Idler);

        let f = &self.filters;
        let lambda_c = f.center_wavelength_nm * 1e-9;
        if !(lambda_c > 0.0) {
            return Err(Error::config(
                "filters.center_wavelength_nm",
                "must be positive",
            ));
        }
        let filters = FilterSpec {
            center_frequency: omega_of(lambda_c),
            bandwidth: 2.0 * PI * SPEED_OF_LIGHT * f.bandwidth_nm * 1e-9 / (lambda_c * lambda_c),
            spatial_width: f.spatial_width_um * 1e-6,
        };

        let config = ExperimentConfig {
            pump,
            crystal,
            phase_match,
            signal_mode,
            idler_mode,
            filters,
            grid: GridSpec {
                points_per_axis: self.grid.points_per_axis,
                min_points: self.grid.min_points,
                max_points: self.grid.max_points,
                extent_efolds: self.grid.extent_efolds,
            },
            sweep: SweepSpec {
                xi: self.sweep.xi.clone(),
                w0: self.sweep.w0_um.iter().map(|w| w * 1e-6).collect(),
            },
            camera: CameraSpec {
                size_px: self.camera.size_px,
                pixel_pitch: self.camera.pixel_pitch_um * 1e-6,
                distance: self.camera.distance_mm * 1e-3,
            },
            effective_length: c.effective_length_mm.map(|l| l * 1e-3),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn from_config(config: &ExperimentConfig) -> Self {
        let cone = config.cone_radius();
        let collection = |m: &CollectionMode| CollectionFile {
            waist_um: tidy(m.waist * 1e6),
            azimuth_deg: tidy(m.center.y.atan2(m.center.x).to_degrees()),
            radial_offset_per_mm: tidy((m.center.norm() - cone) * 1e-3),
        };
        let lambda_c = 2.0 * PI * SPEED_OF_LIGHT / config.filters.center_frequency;
        ConfigFile {
            pump: PumpFile {
                wavelength_nm: tidy(config.pump.wavelength * 1e9),
                waist_um: tidy(config.pump.waist * 1e6),
                refractive_index: config.pump.refractive_index,
                power_mw: tidy(config.pump.power * 1e3),
            },
            crystal: CrystalFile {
                kind: config.crystal.kind,
                thickness_mm: tidy(config.crystal.thickness * 1e3),
                phase_matching_angle_deg: tidy(config.crystal.phase_matching_angle.to_degrees()),
                walk_off_azimuth_deg: tidy(config.crystal.walk_off_azimuth.to_degrees()),
                effective_length_mm: config.effective_length.map(|l| tidy(l * 1e3)),
            },
            phase_match: PhaseMatchFile {
                mode: config.phase_match.mode,
                cone_half_angle_mrad: tidy(config.phase_match.cone_half_angle * 1e3),
                anisotropy: config.phase_match.anisotropy,
            },
            signal_mode: collection(&config.signal_mode),
            idler_mode: collection(&config.idler_mode),
            filters: FilterFile {
                center_wavelength_nm: tidy(lambda_c * 1e9),
                bandwidth_nm: tidy(
                    config.filters.bandwidth * lambda_c * lambda_c / (2.0 * PI * SPEED_OF_LIGHT)
                        * 1e9,
                ),
                spatial_width_um: tidy(config.filters.spatial_width * 1e6),
            },
            grid: GridFile {
                points_per_axis: config.grid.points_per_axis,
                min_points: config.grid.min_points,
                max_points: config.grid.max_points,
                extent_efolds: config.grid.extent_efolds,
            },
            sweep: SweepFile {
                xi: config.sweep.xi.clone(),
                w0_um: config.sweep.w0.iter().map(|w| tidy(w * 1e6)).collect(),
            },
            camera: CameraFile {
                size_px: config.camera.size_px,
                pixel_pitch_um: tidy(config.camera.pixel_pitch * 1e6),
                distance_mm: tidy(config.camera.distance * 1e3),
            },
        }
    }
}

/// Round a unit-converted value to 12 significant digits so that file
/// output is stable under repeated load/save.
fn tidy(x: f64) -> f64 {
    format!("{x:.11e}").parse().unwrap_or(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn defaults_match_reference_setup() {
        let c = ExperimentConfig::default();
        assert!((c.pump.wavelength - 405e-9).abs() < 1e-18);
        assert!((c.crystal.thickness - 2e-3).abs() < 1e-15);
        assert!((c.crystal.phase_matching_angle.to_degrees() - 29.97).abs() < 1e-12);
        assert!((c.signal_mode.waist - 456e-6).abs() < 1e-15);
        assert!((c.idler_mode.center + c.signal_mode.center).norm() < 1e-6);
        assert_eq!(c.sweep.xi, DEFAULT_XI_SWEEP.to_vec());
        // Degenerate photons at the filter center.
        let omega = 0.5 * c.pump.angular_frequency();
        assert!(rel(omega, c.filters.center_frequency) < 1e-12);
    }

    #[test]
    fn partial_file_uses_defaults() {
        let c = ExperimentConfig::from_json_str(r#"{"pump": {"waist_um": 50}}"#).unwrap();
        assert!((c.pump.waist - 50e-6).abs() < 1e-18);
        assert!((c.pump.wavelength - 405e-9).abs() < 1e-18);
    }

    #[test]
    fn validation_errors_name_the_field() {
        let e = ExperimentConfig::from_json_str(r#"{"pump": {"waist_um": -1}}"#).unwrap_err();
        assert!(
            matches!(&e, Error::Config { path, .. } if path == "pump.waist_um"),
            "{e}"
        );
        let e =
            ExperimentConfig::from_json_str(r#"{"grid": {"points_per_axis": 63}}"#).unwrap_err();
        assert!(matches!(&e, Error::Config { path, .. } if path == "grid.points_per_axis"));
        let e = ExperimentConfig::from_json_str(r#"{"pump": {"colour": 1}}"#).unwrap_err();
        assert!(matches!(e, Error::Config { .. }));
        let e = ExperimentConfig::from_json_str(r#"{"sweep": {"xi": [0.1, -2]}}"#).unwrap_err();
        assert!(matches!(&e, Error::Config { path, .. } if path == "sweep.xi"));
    }

    #[test]
    fn round_trip_is_unit_normalized() {
        let text = r#"{
            "pump": {"wavelength_nm": 404, "waist_um": 33.3, "refractive_index": 1.2},
            "crystal": {"thickness_mm": 1.5, "walk_off_azimuth_deg": 30, "effective_length_mm": 12.3},
            "phase_match": {"mode": "paraxial_quadratic"},
            "signal_mode": {"waist_um": 300, "azimuth_deg": 45, "radial_offset_per_mm": 2},
            "filters": {"bandwidth_nm": 4}
        }"#;
        let a = ExperimentConfig::from_json_str(text).unwrap();
        let b = ExperimentConfig::from_json_str(&a.to_json_string()).unwrap();
        assert!(rel(a.pump.waist, b.pump.waist) < 1e-12);
        assert!(rel(a.filters.bandwidth, b.filters.bandwidth) < 1e-12);
        assert!((a.signal_mode.center - b.signal_mode.center).norm() < 1e-9);
        assert_eq!(a.effective_length.is_some(), b.effective_length.is_some());
        assert_eq!(a.regime(), Some(Regime::Short));
        assert_eq!(a.to_json_string(), b.to_json_string());
        assert_eq!(a.hash(), b.hash());
    }

    #[test]
    fn with_focusing_hits_target() {
        let c = ExperimentConfig::default().with_focusing(0.832).unwrap();
        assert!(rel(c.focusing_parameter(), 0.832) < 1e-12);
        assert!(ExperimentConfig::default().with_focusing(0.0).is_err());
    }

    #[test]
    fn auto_grid_resolves_narrowest_scale() {
        let c = ExperimentConfig::default().with_focusing(0.832).unwrap();
        let (gs, gi) = c.grids().unwrap();
        assert_eq!(gs.n() % 2, 0);
        assert!(gs.spacing() <= 2f64.sqrt() / c.signal_mode.waist * 1.0001);
        assert!(gi.approx_eq(&gs.reflected()));
        let fixed =
            ExperimentConfig::from_json_str(r#"{"grid": {"points_per_axis": 64}}"#).unwrap();
        assert_eq!(fixed.grids().unwrap().0.n(), 64);
    }
}
