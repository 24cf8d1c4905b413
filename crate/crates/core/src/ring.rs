//! Far-field ring images: synthesis from the model, radial profiles,
//! ring-width asymmetry and center finding.
//!
//! Pixel coordinates are `(x, y)` with `x` along a row and `y` down the
//! rows; azimuths are measured in that frame, `φ = 0` along `+x` and
//! `φ = π/2` along `+y`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::geometry::Vec2;

/// Smallest accepted image side, in pixels.
pub const MIN_IMAGE_SIDE: usize = 64;
/// Smallest accepted number of samples along a radial profile.
pub const MIN_PROFILE_SAMPLES: usize = 32;
/// Pixel pitch assumed for ingested frames when none is given (m).
pub const DEFAULT_INGEST_PITCH: f64 = 16e-6;

/// Pump momenta beyond this many `1/w_p` are dropped from the singles integral.
const PUMP_DISK_RADII: f64 = 6.0;
/// Largest change of the half sinc argument between neighbouring pump samples.
const MAX_PHASE_STEP: f64 = 0.35;
/// Noise floor = median + this many robust standard deviations.
const NOISE_SIGMAS: f64 = 5.0;
/// Consistency constant turning a MAD into a Gaussian standard deviation.
const MAD_TO_SIGMA: f64 = 1.4826;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Synthesized,
    Ingested,
}

/// Non-negative intensity raster, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RingImage {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
    pixel_pitch: f64,
    center_estimate: Vec2,
    provenance: Provenance,
    noise_floor: f64,
}

impl RingImage {
    /// Validates the raster. The center estimate starts at the geometric center.
    pub fn new(
        width: usize,
        height: usize,
        pixels: Vec<f64>,
        pixel_pitch: f64,
        provenance: Provenance,
    ) -> Result<Self> {
        if width < MIN_IMAGE_SIDE || height < MIN_IMAGE_SIDE {
            return Err(Error::Image(format!(
                "image is {width}x{height}, need at least {MIN_IMAGE_SIDE}x{MIN_IMAGE_SIDE}"
            )));
        }
        if pixels.len() != width * height {
            return Err(Error::Image(format!(
                "{} pixels for a {width}x{height} image",
                pixels.len()
            )));
        }
        if let Some(i) = pixels.iter().position(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::Image(format!(
                "pixel ({}, {}) is {}, must be finite and >= 0",
                i % width,
                i / width,
                pixels[i]
            )));
        }
        if !(pixel_pitch.is_finite() && pixel_pitch > 0.0) {
            return Err(Error::Image(format!(
                "pixel pitch must be positive, got {pixel_pitch}"
            )));
        }
        let noise_floor = robust_floor(&pixels);
        Ok(RingImage {
            width,
            height,
            pixels,
            pixel_pitch,
            center_estimate: Vec2::new((width as f64 - 1.0) / 2.0, (height as f64 - 1.0) / 2.0),
            provenance,
            noise_floor,
        })
    }

    /// Synthesized raster from a per-pixel function `f(x, y)`.
    pub fn from_fn(
        width: usize,
        height: usize,
        pixel_pitch: f64,
        f: impl Fn(f64, f64) -> f64 + Sync,
    ) -> Result<Self> {
        let pixels = (0..width * height)
            .into_par_iter()
            .map(|i| f((i % width) as f64, (i / width) as f64))
            .collect();
        RingImage::new(width, height, pixels, pixel_pitch, Provenance::Synthesized)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.pixels[y * self.width + x]
    }

    pub fn pixel_pitch(&self) -> f64 {
        self.pixel_pitch
    }

    /// `(width, height)` on the detector, in metres.
    pub fn physical_extent(&self) -> (f64, f64) {
        (
            self.width as f64 * self.pixel_pitch,
            self.height as f64 * self.pixel_pitch,
        )
    }

    pub fn center_estimate(&self) -> Vec2 {
        self.center_estimate
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Pixel level a ring peak has to exceed: median + 5 robust sigmas.
    pub fn noise_floor(&self) -> f64 {
        self.noise_floor
    }

    pub fn max(&self) -> f64 {
        self.pixels.iter().cloned().fold(0.0, f64::max)
    }

    pub fn with_center(mut self, center: Vec2) -> Self {
        self.center_estimate = center;
        self
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    /// Same image with every pixel mapped through `f`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let pixels = self.pixels.iter().map(|&p| f(p)).collect();
        Ok(RingImage::new(
            self.width,
            self.height,
            pixels,
            self.pixel_pitch,
            self.provenance,
        )?
        .with_center(self.center_estimate))
    }

    /// Poisson counts with mean `peak_counts · pixel / max`.
    pub fn with_shot_noise(&self, peak_counts: f64, seed: u64) -> Result<Self> {
        if !(peak_counts.is_finite() && peak_counts > 0.0) {
            return Err(Error::domain("peak counts", "> 0", peak_counts));
        }
        let max = self.max();
        if max <= 0.0 {
            return Err(Error::Image(
                "cannot add shot noise to an all-zero image".into(),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pixels = self
            .pixels
            .iter()
            .map(|&p| {
                let mean = peak_counts * p / max;
                if mean > 0.0 {
                    Poisson::new(mean)
                        .map(|d| d.sample(&mut rng))
                        .unwrap_or(0.0)
                } else {
                    0.0
                }
            })
            .collect();
        Ok(RingImage::new(
            self.width,
            self.height,
            pixels,
            self.pixel_pitch,
            self.provenance,
        )?
        .with_center(self.center_estimate))
    }

    /// Bilinear sample at fractional pixel position; `None` outside the raster.
    pub fn sample(&self, x: f64, y: f64) -> Option<f64> {
        let (xmax, ymax) = ((self.width - 1) as f64, (self.height - 1) as f64);
        if !(x >= 0.0 && y >= 0.0 && x <= xmax && y <= ymax) {
            return None;
        }
        let x0 = (x.floor() as usize).min(self.width - 2);
        let y0 = (y.floor() as usize).min(self.height - 2);
        let (fx, fy) = (x - x0 as f64, y - y0 as f64);
        let p = |xx, yy| self.get(xx, yy);
        Some(
            (1.0 - fy) * ((1.0 - fx) * p(x0, y0) + fx * p(x0 + 1, y0))
                + fy * ((1.0 - fx) * p(x0, y0 + 1) + fx * p(x0 + 1, y0 + 1)),
        )
    }

    /// Longest ray from the center estimate that stays inside the raster in
    /// every direction, in pixels.
    fn max_radius(&self) -> f64 {
        let c = self.center_estimate;
        let r =
            c.x.min(c.y)
                .min(self.width as f64 - 1.0 - c.x)
                .min(self.height as f64 - 1.0 - c.y);
        (r - 1.0).max(0.0)
    }

    /// Default profile length: four samples per pixel of radius.
    fn default_samples(&self) -> usize {
        ((4.0 * self.max_radius()).ceil() as usize).max(MIN_PROFILE_SAMPLES)
    }
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

fn robust_floor(pixels: &[f64]) -> f64 {
    let mut v = pixels.to_vec();
    let med = median(&mut v);
    let mut dev: Vec<f64> = pixels.iter().map(|p| (p - med).abs()).collect();
    med + NOISE_SIGMAS * MAD_TO_SIGMA * median(&mut dev)
}

/// Intensity along one ray from the image's center estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RingProfile {
    pub azimuth: f64,
    /// Detector-plane radii (m), strictly increasing from 0.
    pub radii: Vec<f64>,
    pub intensity: Vec<f64>,
    /// Full width at half maximum of the outermost peak (m).
    pub fwhm: f64,
    pub peak_radius: f64,
}

/// Radial profile at `azimuth` with `n_samples` bilinear samples.
///
/// The half level sits halfway between the profile minimum and the peak.
/// When no half crossing exists on the inner side (a central blob), the
/// width is twice the outer crossing radius.
pub fn radial_profile(image: &RingImage, azimuth: f64, n_samples: usize) -> Result<RingProfile> {
    measure(image, azimuth, n_samples).map(|(p, _)| p)
}

/// Profile plus the midpoint of its half-level crossings in pixels (0 for a blob).
fn measure(image: &RingImage, azimuth: f64, n_samples: usize) -> Result<(RingProfile, f64)> {
    if n_samples < MIN_PROFILE_SAMPLES {
        return Err(Error::domain("profile samples", ">= 32", n_samples as f64));
    }
    let c = image.center_estimate;
    let r_max = image.max_radius();
    if !(r_max >= 2.0) {
        return Err(Error::NoRing(format!(
            "center estimate ({:.1}, {:.1}) leaves no room for a profile",
            c.x, c.y
        )));
    }
    let dir = Vec2::from_polar(1.0, azimuth);
    let step = r_max / (n_samples - 1) as f64;
    let radii_px: Vec<f64> = (0..n_samples).map(|i| i as f64 * step).collect();
    let intensity: Vec<f64> = radii_px
        .iter()
        .map(|&r| {
            let p = c + dir * r;
            image.sample(p.x, p.y).unwrap_or(0.0)
        })
        .collect();

    let gmax = intensity.iter().cloned().fold(f64::MIN, f64::max);
    if !(gmax > image.noise_floor) {
        return Err(Error::NoRing(format!(
            "profile peak {gmax:.4e} at azimuth {azimuth:.4} does not exceed noise floor {:.4e}",
            image.noise_floor
        )));
    }
    let base = intensity.iter().cloned().fold(f64::MAX, f64::min);
    let global_half = base + 0.5 * (gmax - base);
    // The outermost region above the global half level holds the ring.
    let last = intensity
        .iter()
        .rposition(|&v| v >= global_half)
        .unwrap_or(0);
    let mut first = last;
    while first > 0 && intensity[first - 1] >= global_half {
        first -= 1;
    }
    let peak = (first..=last)
        .max_by(|&a, &b| intensity[a].total_cmp(&intensity[b]))
        .unwrap_or(last);
    let half = base + 0.5 * (intensity[peak] - base);

    let cross = |i: usize, j: usize| {
        let (a, b) = (intensity[i], intensity[j]);
        let t = if b != a { (half - a) / (b - a) } else { 0.5 };
        radii_px[i] + t * (radii_px[j] - radii_px[i])
    };
    let mut j = peak;
    while j + 1 < n_samples && intensity[j + 1] > half {
        j += 1;
    }
    if j + 1 == n_samples {
        return Err(Error::NoRing(format!(
            "ring at azimuth {azimuth:.4} extends past the image edge"
        )));
    }
    let outer = cross(j, j + 1);
    let mut i = peak;
    while i > 0 && intensity[i - 1] > half {
        i -= 1;
    }
    let (width_px, mid) = if i == 0 {
        (2.0 * outer, 0.0)
    } else {
        let inner = cross(i - 1, i);
        (outer - inner, 0.5 * (outer + inner))
    };

    let pitch = image.pixel_pitch;
    let profile = RingProfile {
        azimuth,
        radii: radii_px.iter().map(|r| r * pitch).collect(),
        intensity,
        fwhm: width_px * pitch,
        peak_radius: radii_px[peak] * pitch,
    };
    Ok((profile, mid))
}

/// Ring-width asymmetry `AF = 1 − b/a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymmetryResult {
    /// Larger of the two widths (m).
    pub a: f64,
    pub b: f64,
    pub af: f64,
    pub azimuth_of_a: f64,
}

/// Compare FWHMs at `walk_off_azimuth` and its antipode.
pub fn asymmetry_factor(image: &RingImage, walk_off_azimuth: f64) -> Result<AsymmetryResult> {
    let n = image.default_samples();
    let p = radial_profile(image, walk_off_azimuth, n)?;
    let q = radial_profile(image, walk_off_azimuth + PI, n)?;
    let (a, b, az) = if p.fwhm >= q.fwhm {
        (p.fwhm, q.fwhm, p.azimuth)
    } else {
        (q.fwhm, p.fwhm, q.azimuth)
    };
    if !(b > 0.0) {
        return Err(Error::NoRing("zero ring width".into()));
    }
    Ok(AsymmetryResult {
        a,
        b,
        af: 1.0 - b / a,
        azimuth_of_a: az.rem_euclid(2.0 * PI),
    })
}

/// Scan `n_azimuths` diameters over `[0, π)` and keep the most asymmetric.
///
/// Diameters where the ring is not detected are skipped.
pub fn asymmetry_scan(image: &RingImage, n_azimuths: usize) -> Result<AsymmetryResult> {
    let results: Vec<Result<AsymmetryResult>> = (0..n_azimuths.max(1))
        .into_par_iter()
        .map(|k| asymmetry_factor(image, PI * k as f64 / n_azimuths.max(1) as f64))
        .collect();
    let mut best: Option<AsymmetryResult> = None;
    let mut last_err = None;
    for r in results {
        match r {
            Ok(r) if best.is_none_or(|b| r.af > b.af) => best = Some(r),
            Ok(_) => {}
            Err(e) => last_err = Some(e),
        }
    }
    best.ok_or_else(|| last_err.unwrap_or_else(|| Error::NoRing("no diameter scanned".into())))
}

/// Ring center in pixels: thresholded intensity centroid, refined until
/// opposite rays see the ring at equal radii.
pub fn find_ring_center(image: &RingImage) -> Result<Vec2> {
    const PAIRS: usize = 8;
    const MAX_ITER: usize = 30;

    let mut sorted = image.pixels.clone();
    let med = median(&mut sorted);
    let threshold = med + 0.25 * (image.max() - med);
    let (mut sw, mut sx, mut sy) = (0.0, 0.0, 0.0);
    for (i, &p) in image.pixels.iter().enumerate() {
        let w = p - threshold;
        if w > 0.0 {
            sw += w;
            sx += w * (i % image.width) as f64;
            sy += w * (i / image.width) as f64;
        }
    }
    if !(sw > 0.0) || !(image.max() > image.noise_floor) {
        return Err(Error::NoRing(
            "no pixel stands out from the background".into(),
        ));
    }
    let mut c = Vec2::new(sx / sw, sy / sw);
    let lo = Vec2::new(1.0, 1.0);
    let hi = Vec2::new(image.width as f64 - 2.0, image.height as f64 - 2.0);
    let clamp = |v: Vec2| Vec2::new(v.x.clamp(lo.x, hi.x), v.y.clamp(lo.y, hi.y));
    c = clamp(c);

    for _ in 0..MAX_ITER {
        let probe = image.clone().with_center(c);
        let n = probe.default_samples();
        let mut d = Vec2::ZERO;
        for k in 0..PAIRS {
            let phi = PI * k as f64 / PAIRS as f64;
            let fwd = measure(&probe, phi, n)?.1;
            let back = measure(&probe, phi + PI, n)?.1;
            d += Vec2::from_polar(1.0, phi) * ((fwd - back) / 2.0);
        }
        let shift = d * (2.0 / PAIRS as f64);
        c = clamp(c + shift);
        if shift.norm() < 0.01 {
            break;
        }
    }
    Ok(c)
}

/// Far-field singles image of the configured source on the configured camera.
///
/// Pixel `(x, y)` maps to the emission direction whose sine is the pixel's
/// offset from the optical axis (the image center) over its distance from
/// the crystal, and to `k_s⊥ = k_s · sin θ`. The intensity is the joint
/// amplitude squared integrated over the partner momentum, written in terms
/// of the pump momentum `q_p = k_s⊥ + k_i⊥` on a disk of radius `6/w_p`.
/// The disk is sampled on a frame aligned with `∂Δk/∂q_p`, finely along it
/// and at `1/w_p` across it. The result is scaled to a maximum of 1.
pub fn synthesize_ring(config: &ExperimentConfig, size_px: usize) -> Result<RingImage> {
    config.validate()?;
    let cam = &config.camera;
    let pm = config.phase_mismatch();
    let k_s = pm.signal_wavenumber();
    let w_p = config.pump.waist;
    let half_l = 0.5 * config.crystal.thickness;
    let radius = PUMP_DISK_RADII / w_p;
    let h_cross = 1.0 / w_p;
    let n_cross = (2.0 * radius / h_cross).round() as i64 / 2;
    let axis = (size_px as f64 - 1.0) / 2.0;

    let pixel_value = |x: f64, y: f64| -> f64 {
        let off = Vec2::new(x - axis, y - axis) * cam.pixel_pitch;
        let q_s = off * (k_s / off.norm().hypot(cam.distance));
        let dk = |q_p: Vec2| pm.eval(q_s, q_p - q_s);
        // Δk is affine in q_p for degenerate photons; a symmetric difference
        // over one pump width gives its gradient.
        let e = 1.0 / w_p;
        let g = Vec2::new(
            (dk(Vec2::new(e, 0.0)) - dk(Vec2::new(-e, 0.0))) / (2.0 * e),
            (dk(Vec2::new(0.0, e)) - dk(Vec2::new(0.0, -e))) / (2.0 * e),
        );
        let g_norm = g.norm();
        let along = if g_norm > 0.0 {
            g * (1.0 / g_norm)
        } else {
            Vec2::new(1.0, 0.0)
        };
        let across = Vec2::new(-along.y, along.x);
        let h_along = if g_norm > 0.0 {
            h_cross.min(MAX_PHASE_STEP / (g_norm * half_l))
        } else {
            h_cross
        };
        let n_along = (radius / h_along).ceil() as i64;
        let h_along = radius / n_along as f64;
        let mut sum = 0.0;
        for j in -n_cross..=n_cross {
            let u = j as f64 * h_cross;
            for i in -n_along..=n_along {
                let t = i as f64 * h_along;
                let r2 = t * t + u * u;
                if r2 > radius * radius {
                    continue;
                }
                let q_p = along * t + across * u;
                let x = dk(q_p) * half_l;
                let s = if x.abs() < 1e-8 { 1.0 } else { x.sin() / x };
                sum += (-0.5 * w_p * w_p * r2).exp() * s * s;
            }
        }
        sum * h_along * h_cross
    };

    let raw = RingImage::from_fn(size_px, size_px, cam.pixel_pitch, pixel_value)?;
    let max = raw.max();
    if !(max > 0.0) {
        return Err(Error::ZeroMode(
            "synthesized ring image is identically zero".into(),
        ));
    }
    raw.map(|p| p / max)
}

#[cfg(test)]
mod tests {
    use super::*;

    const PITCH: f64 = 10e-6;

    /// Gaussian annulus of radius `r0` px whose radial sigma varies with azimuth.
    fn annulus(n: usize, c: Vec2, r0: f64, sigma: impl Fn(f64) -> f64 + Sync) -> RingImage {
        RingImage::from_fn(n, n, PITCH, |x, y| {
            let d = Vec2::new(x - c.x, y - c.y);
            let s = sigma(d.y.atan2(d.x));
            (-(d.norm() - r0).powi(2) / (2.0 * s * s)).exp()
        })
        .unwrap()
        .with_center(c)
    }

    #[test]
    fn construction_checks() {
        assert!(RingImage::new(63, 64, vec![0.0; 63 * 64], PITCH, Provenance::Ingested).is_err());
        assert!(RingImage::new(64, 64, vec![0.0; 10], PITCH, Provenance::Ingested).is_err());
        let mut px = vec![0.0; 64 * 64];
        px[5] = -1.0;
        assert!(RingImage::new(64, 64, px, PITCH, Provenance::Ingested).is_err());
        let img =
            RingImage::new(512, 512, vec![0.0; 512 * 512], 16e-6, Provenance::Ingested).unwrap();
        let (w, h) = img.physical_extent();
        assert!((w - 8.192e-3).abs() < 1e-12 && (h - 8.192e-3).abs() < 1e-12);
    }

    #[test]
    fn bilinear_sample() {
        let img = RingImage::from_fn(64, 64, PITCH, |x, y| 2.0 * x + 3.0 * y).unwrap();
        assert!((img.sample(10.25, 7.5).unwrap() - (20.5 + 22.5)).abs() < 1e-12);
        assert!((img.sample(63.0, 63.0).unwrap() - 315.0).abs() < 1e-12);
        assert!(img.sample(-0.1, 3.0).is_none());
        assert!(img.sample(3.0, 63.5).is_none());
    }

    #[test]
    fn gaussian_annulus_fwhm() {
        let sigma = 4.0;
        let img = annulus(256, Vec2::new(127.5, 127.5), 60.0, |_| sigma);
        for phi in [0.0, 0.7, 2.0, 4.1] {
            let p = radial_profile(&img, phi, 512).unwrap();
            let expect = 2.0 * (2.0 * 2f64.ln()).sqrt() * sigma * PITCH;
            assert!(
                (p.fwhm / expect - 1.0).abs() < 0.02,
                "{} vs {}",
                p.fwhm,
                expect
            );
            assert!((p.peak_radius / PITCH - 60.0).abs() < 0.5);
            assert!(p.radii.windows(2).all(|w| w[1] > w[0]));
        }
    }

    #[test]
    fn flat_image_has_no_ring() {
        let img = RingImage::from_fn(64, 64, PITCH, |_, _| 3.0).unwrap();
        assert!(matches!(
            radial_profile(&img, 0.0, 64),
            Err(Error::NoRing(_))
        ));
        assert!(matches!(asymmetry_factor(&img, 0.0), Err(Error::NoRing(_))));
        assert!(matches!(find_ring_center(&img), Err(Error::NoRing(_))));
        assert!(radial_profile(&img, 0.0, 16).is_err());
    }

    #[test]
    fn profile_is_periodic() {
        let img = annulus(128, Vec2::new(63.5, 63.5), 30.0, |phi| 3.0 + phi.cos());
        let a = radial_profile(&img, 0.4, 128).unwrap();
        let b = radial_profile(&img, 0.4 + 2.0 * PI, 128).unwrap();
        for (x, y) in a.intensity.iter().zip(&b.intensity) {
            assert!((x - y).abs() < 1e-9);
        }
        assert!((a.fwhm - b.fwhm).abs() < 1e-9 * a.fwhm);
    }

    #[test]
    fn two_to_one_annulus() {
        // sigma goes from 6 px at φ=0 to 3 px at φ=π, smoothly in between.
        let img = annulus(256, Vec2::new(127.5, 127.5), 60.0, |phi| {
            4.5 + 1.5 * phi.cos()
        });
        let r = asymmetry_factor(&img, 0.0).unwrap();
        assert!((r.af - 0.5).abs() < 0.02, "af {}", r.af);
        assert!(r.a >= r.b);
        assert!(r.azimuth_of_a.abs() < 1e-12);
        let swapped = asymmetry_factor(&img, PI).unwrap();
        assert!((swapped.af - r.af).abs() < 1e-12);
        let scan = asymmetry_scan(&img, 36).unwrap();
        assert!(scan.azimuth_of_a.abs() < 1e-9 || (scan.azimuth_of_a - 2.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn symmetric_ring_af_zero_and_scale_invariance() {
        let img = annulus(256, Vec2::new(127.5, 127.5), 50.0, |_| 5.0);
        let r = asymmetry_factor(&img, 1.1).unwrap();
        assert!(r.af < 0.02);
        let scaled = img.map(|p| 7.3 * p).unwrap();
        let s = asymmetry_factor(&scaled, 1.1).unwrap();
        assert!((s.af - r.af).abs() < 1e-12);
    }

    #[test]
    fn background_robustness() {
        let img = annulus(256, Vec2::new(127.5, 127.5), 60.0, |phi| {
            4.5 + 1.5 * phi.cos()
        });
        let base = asymmetry_factor(&img, 0.0).unwrap().af;
        for bg in [0.02, 0.05, 0.09] {
            let lifted = img.map(|p| p + bg).unwrap();
            let af = asymmetry_factor(&lifted, 0.0).unwrap().af;
            assert!((af - base).abs() < 0.02, "bg {bg}: {af} vs {base}");
        }
    }

    #[test]
    fn center_recovery_and_translation() {
        let truth = Vec2::new(120.3, 135.8);
        let img = annulus(256, truth, 50.0, |_| 4.0);
        let c = find_ring_center(&img).unwrap();
        assert!((c - truth).norm() < 1.0, "{c:?}");
        let moved = annulus(256, truth + Vec2::new(7.0, -5.0), 50.0, |_| 4.0);
        let c2 = find_ring_center(&moved).unwrap();
        assert!((c2 - c - Vec2::new(7.0, -5.0)).norm() < 1.0);
    }

    #[test]
    fn shot_noise_is_seeded() {
        let img = annulus(64, Vec2::new(31.5, 31.5), 15.0, |_| 3.0);
        let a = img.with_shot_noise(100.0, 7).unwrap();
        let b = img.with_shot_noise(100.0, 7).unwrap();
        let c = img.with_shot_noise(100.0, 8).unwrap();
        assert_eq!(a.pixels(), b.pixels());
        assert_ne!(a.pixels(), c.pixels());
        assert!(a.pixels().iter().all(|p| p.fract() == 0.0));
    }
}
