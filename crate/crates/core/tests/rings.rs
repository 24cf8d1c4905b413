use std::f64::consts::PI;

use spdc_core::config::ExperimentConfig;
use spdc_core::image_io::{self, ImageFormat};
use spdc_core::ring::{asymmetry_scan, MIN_PROFILE_SAMPLES};
use spdc_core::{
    asymmetry_factor, find_ring_center, radial_profile, synthesize_ring, Provenance, RingImage,
    Vec2,
};

/// Default source on a 128 px camera with doubled pitch, so the ring keeps
/// its pixel size.
fn small(xi: f64) -> ExperimentConfig {
    let mut c = ExperimentConfig::default().with_focusing(xi).unwrap();
    c.camera.size_px = 128;
    c.camera.pixel_pitch = 64e-6;
    c
}

fn peak(p: &spdc_core::RingProfile) -> f64 {
    p.intensity.iter().cloned().fold(0.0, f64::max)
}

#[test]
fn ring_radius_follows_cone_angle() {
    let c = small(0.05);
    let img = synthesize_ring(&c, c.camera.size_px).unwrap();
    assert_eq!(img.provenance(), Provenance::Synthesized);
    assert!(img.pixels().iter().all(|&p| p >= 0.0));
    let expect = c.camera.distance * c.phase_match.cone_half_angle.tan();
    for phi in [0.3, 1.9, 4.0] {
        let p = radial_profile(&img, phi, 256).unwrap();
        assert!(
            (p.peak_radius - expect).abs() < 1.5 * c.camera.pixel_pitch,
            "{} vs {expect}",
            p.peak_radius
        );
    }
}

#[test]
fn isotropic_ring_is_azimuthally_uniform() {
    let mut c = small(0.01);
    c.phase_match.anisotropy = 0.0;
    let img = synthesize_ring(&c, c.camera.size_px).unwrap();
    let peaks: Vec<f64> = (0..24)
        .map(|k| peak(&radial_profile(&img, 2.0 * PI * k as f64 / 24.0, 256).unwrap()))
        .collect();
    let (lo, hi) = peaks
        .iter()
        .fold((f64::MAX, 0.0f64), |(l, h), &v| (l.min(v), h.max(v)));
    assert!(hi / lo < 1.02, "peak variation {}", hi / lo);
    assert!(asymmetry_factor(&img, 0.0).unwrap().af < 0.02);
}

#[test]
fn isotropic_ring_commutes_with_rotation() {
    let mut c = small(0.4);
    c.phase_match.anisotropy = 0.0;
    let img = synthesize_ring(&c, c.camera.size_px).unwrap();
    let n = img.width();
    // Quarter turn: new(x, y) = old(y, n-1-x), which maps azimuth φ to φ + π/2.
    let turned = RingImage::from_fn(n, n, img.pixel_pitch(), |x, y| {
        img.get(y as usize, n - 1 - x as usize)
    })
    .unwrap();
    for phi in [0.2, 1.0, 2.5] {
        let a = radial_profile(&img, phi, 200).unwrap();
        let b = radial_profile(&turned, phi + PI / 2.0, 200).unwrap();
        assert!((a.fwhm / b.fwhm - 1.0).abs() < 0.01);
        for (x, y) in a.intensity.iter().zip(&b.intensity) {
            assert!((x - y).abs() < 0.01 * peak(&a));
        }
    }
}

#[test]
fn collinear_limit_is_a_blob() {
    let mut c = small(0.2);
    c.phase_match.cone_half_angle = 0.0;
    c.signal_mode.center = Vec2::ZERO;
    c.idler_mode.center = Vec2::ZERO;
    let img = synthesize_ring(&c, c.camera.size_px).unwrap();
    let p = radial_profile(&img, 0.7, 128).unwrap();
    assert_eq!(p.peak_radius, 0.0);
    assert!(p.fwhm > 0.0);
}

#[test]
fn walk_off_widens_the_ring_on_its_side() {
    let mut c = small(0.832);
    c.crystal.walk_off_azimuth = 0.6;
    let img = synthesize_ring(&c, c.camera.size_px).unwrap();
    let n = MIN_PROFILE_SAMPLES * 8;
    let fwd = radial_profile(&img, 0.6, n).unwrap();
    let back = radial_profile(&img, 0.6 + PI, n).unwrap();
    assert!(fwd.fwhm > 1.2 * back.fwhm, "{} vs {}", fwd.fwhm, back.fwhm);
    let r = asymmetry_factor(&img, 0.6).unwrap();
    assert!((r.azimuth_of_a - 0.6).abs() < 1e-12);
    let scan = asymmetry_scan(&img, 18).unwrap();
    assert!(scan.af >= r.af - 0.02);
}

#[test]
fn synthesis_is_deterministic() {
    let c = small(0.2);
    assert_eq!(
        synthesize_ring(&c, 128).unwrap().pixels(),
        synthesize_ring(&c, 128).unwrap().pixels()
    );
}

#[test]
fn noisy_center_within_three_pixels() {
    let truth = Vec2::new(66.2, 60.7);
    let clean = RingImage::from_fn(128, 128, 16e-6, |x, y| {
        let r = Vec2::new(x, y) - truth;
        (-(r.norm() - 35.0).powi(2) / (2.0 * 4.0f64.powi(2))).exp()
    })
    .unwrap();
    let mut worst: f64 = 0.0;
    for seed in 0..100 {
        // 100 counts at the crest: shot-noise SNR 10.
        let noisy = clean.with_shot_noise(100.0, seed).unwrap();
        let c = find_ring_center(&noisy).unwrap();
        worst = worst.max((c - truth).norm());
    }
    assert!(worst < 3.0, "worst center error {worst} px");
}

#[test]
fn saved_rings_analyze_like_in_memory() {
    let c = small(0.6);
    let img = synthesize_ring(&c, c.camera.size_px).unwrap();
    let direct = asymmetry_factor(&img, 0.0).unwrap();
    let dir = tempfile::tempdir().unwrap();
    for format in [ImageFormat::Pgm16, ImageFormat::Csv] {
        let path = dir.path().join(match format {
            ImageFormat::Pgm16 => "ring.pgm",
            ImageFormat::Csv => "ring.csv",
        });
        image_io::write_image(&img, &path, format).unwrap();
        let back = image_io::ingest_image(&path, None, format).unwrap();
        assert_eq!(back.provenance(), Provenance::Ingested);
        assert_eq!(back.pixel_pitch(), img.pixel_pitch());
        if format == ImageFormat::Csv {
            assert_eq!(back.pixels(), img.pixels());
        } else {
            let q: Vec<f64> = image_io::quantize(&img).iter().map(|&v| v as f64).collect();
            assert_eq!(back.pixels(), q.as_slice());
        }
        let centered = back.clone().with_center(find_ring_center(&back).unwrap());
        let r = asymmetry_factor(&centered, 0.0).unwrap();
        assert!(
            (r.af - direct.af).abs() < 0.01,
            "{format:?}: {} vs {}",
            r.af,
            direct.af
        );
    }
}
