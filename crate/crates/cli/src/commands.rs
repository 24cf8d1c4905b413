use std::path::Path;

use serde::Serialize;
use spdc_core::image_io::{self, ImageFormat};
use spdc_core::ring::asymmetry_scan;
use spdc_core::{
    asymmetry_factor, efficiency_sweep, ellipticity, find_ring_center, synthesize_ring,
    AsymmetryResult, CouplingReport, ExperimentConfig, Vec2,
};

use crate::output::{fmt9, linear_fit, LinearFit, Outputs};
use crate::Failure;

/// Tolerance of the "non-increasing in ξ" verdict.
const MONOTONE_TOL: f64 = 1e-6;
/// Tolerance of the "AF increasing in ξ" verdict.
const AF_TREND_TOL: f64 = 0.02;
/// Diameters tried when no azimuth is given.
const SCAN_AZIMUTHS: usize = 180;

fn focused(config: &ExperimentConfig, xi: Option<f64>) -> Result<ExperimentConfig, Failure> {
    Ok(match xi {
        Some(x) => config.with_focusing(x)?,
        None => config.clone(),
    })
}

#[derive(Serialize)]
struct WaistTrend {
    w0_m: f64,
    xi_p: Vec<f64>,
    chi_numeric: Vec<f64>,
    monotone_non_increasing: bool,
}

#[derive(Serialize)]
struct SweepSummary {
    rows: usize,
    max_abs_rel_diff: f64,
    monotone_non_increasing: bool,
    by_waist: Vec<WaistTrend>,
}

pub fn sweep_efficiency(
    config: &ExperimentConfig,
    xi: &[f64],
    w0: &[f64],
    out: &mut Outputs,
) -> Result<(), Failure> {
    config.validate()?;
    let rows = efficiency_sweep(config, xi, w0)?;
    let table: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| vec![r.xi_p, r.w0, r.chi_numeric, r.chi_closed_form, r.rel_diff])
        .collect();
    out.csv(
        "efficiency_sweep.csv",
        &["xi_p", "w0_m", "chi_numeric", "chi_closed_form", "rel_diff"],
        &table,
    )?;

    let by_waist: Vec<WaistTrend> = w0
        .iter()
        .map(|&w| {
            let mut pts: Vec<(f64, f64)> = rows
                .iter()
                .filter(|r| r.w0 == w)
                .map(|r| (r.xi_p, r.chi_numeric))
                .collect();
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            let monotone = pts.windows(2).all(|p| p[1].1 <= p[0].1 + MONOTONE_TOL);
            WaistTrend {
                w0_m: w,
                xi_p: pts.iter().map(|p| p.0).collect(),
                chi_numeric: pts.iter().map(|p| p.1).collect(),
                monotone_non_increasing: monotone,
            }
        })
        .collect();
    let summary = SweepSummary {
        rows: rows.len(),
        max_abs_rel_diff: rows.iter().map(|r| r.rel_diff.abs()).fold(0.0, f64::max),
        monotone_non_increasing: by_waist.iter().all(|t| t.monotone_non_increasing),
        by_waist,
    };
    out.json("efficiency_sweep.json", &summary)?;
    Ok(())
}

#[derive(Serialize)]
struct ConditionalSummary {
    xi_p: f64,
    ellipticity: f64,
    norm: f64,
    norm_ok: bool,
    points_per_axis: usize,
    spacing_rad_per_m: f64,
    center_rad_per_m: Vec2,
}

pub fn conditional_mode(
    config: &ExperimentConfig,
    xi: Option<f64>,
    out: &mut Outputs,
) -> Result<(), Failure> {
    let c = focused(config, xi)?;
    let phi = c.conditional_signal_mode()?;
    let grid = *phi.grid();
    let norm = phi.norm();
    let summary = ConditionalSummary {
        xi_p: c.focusing_parameter(),
        ellipticity: ellipticity(&phi)?,
        norm,
        norm_ok: (norm - 1.0).abs() <= 1e-9,
        points_per_axis: grid.n(),
        spacing_rad_per_m: grid.spacing(),
        center_rad_per_m: grid.center(),
    };
    let intensity = phi.intensity();
    let pgm = image_io::encode_pgm16_raster(
        grid.n(),
        grid.n(),
        &intensity,
        &format!("momentum_spacing_rad_per_m {}", fmt9(grid.spacing())),
    );
    out.bytes("conditional_mode.pgm", &pgm)?;
    out.json("conditional_mode.json", &summary)?;
    Ok(())
}

#[derive(Serialize)]
struct RingRow {
    xi_p: f64,
    image: String,
    #[serde(flatten)]
    asymmetry: AsymmetryResult,
}

#[derive(Serialize)]
struct RingSummary {
    walk_off_azimuth_rad: f64,
    rows: Vec<RingRow>,
    fit: Option<LinearFit>,
    af_increasing: bool,
}

pub fn ring(
    config: &ExperimentConfig,
    xi: &[f64],
    size_px: usize,
    out: &mut Outputs,
) -> Result<(), Failure> {
    config.validate()?;
    let phi_w = config.crystal.walk_off_azimuth;
    let mut rows = Vec::with_capacity(xi.len());
    for (index, &x) in xi.iter().enumerate() {
        let at_row = |source| Failure::Row {
            index,
            xi_p: x,
            source,
        };
        let c = config.with_focusing(x).map_err(at_row)?;
        let img = synthesize_ring(&c, size_px).map_err(at_row)?;
        let asymmetry = asymmetry_factor(&img, phi_w).map_err(at_row)?;
        let name = format!("ring_{index:02}_xi_{}.pgm", fmt9(x));
        out.bytes(&name, &image_io::encode_pgm16(&img))?;
        rows.push(RingRow {
            xi_p: x,
            image: name,
            asymmetry,
        });
    }
    let table: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| vec![r.xi_p, r.asymmetry.af, r.asymmetry.a, r.asymmetry.b])
        .collect();
    out.csv("ring_asymmetry.csv", &["xi_p", "af", "a_m", "b_m"], &table)?;

    let mut by_xi: Vec<(f64, f64)> = rows.iter().map(|r| (r.xi_p, r.asymmetry.af)).collect();
    by_xi.sort_by(|a, b| a.0.total_cmp(&b.0));
    let xs: Vec<f64> = by_xi.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = by_xi.iter().map(|p| p.1).collect();
    let summary = RingSummary {
        walk_off_azimuth_rad: phi_w,
        fit: linear_fit(&xs, &ys),
        af_increasing: by_xi.windows(2).all(|p| p[1].1 >= p[0].1 - AF_TREND_TOL),
        rows,
    };
    out.json("ring_asymmetry.json", &summary)?;
    Ok(())
}

#[derive(Serialize)]
struct ImageAnalysis {
    file: String,
    width: usize,
    height: usize,
    pixel_pitch_m: f64,
    center_px: Vec2,
    scanned: bool,
    #[serde(flatten)]
    asymmetry: AsymmetryResult,
}

pub fn analyze_image(
    path: &Path,
    pitch: Option<f64>,
    azimuth: Option<f64>,
    format: ImageFormat,
    out: &mut Outputs,
) -> Result<(), Failure> {
    let img = image_io::ingest_image(path, pitch, format)?;
    let center = find_ring_center(&img)?;
    let img = img.with_center(center);
    let asymmetry = match azimuth {
        Some(a) => asymmetry_factor(&img, a)?,
        None => asymmetry_scan(&img, SCAN_AZIMUTHS)?,
    };
    let analysis = ImageAnalysis {
        file: path
            .file_name()
            .map(|f| f.to_string_lossy().into_owned())
            .unwrap_or_default(),
        width: img.width(),
        height: img.height(),
        pixel_pitch_m: img.pixel_pitch(),
        center_px: center,
        scanned: azimuth.is_none(),
        asymmetry,
    };
    out.json("image_analysis.json", &analysis)?;
    Ok(())
}

#[derive(Serialize)]
struct MatchReport {
    xi_p: f64,
    w0_signal_m: f64,
    w0_idler_m: f64,
    chi_closed_form: f64,
    #[serde(flatten)]
    report: CouplingReport,
}

pub fn match_metrics(
    config: &ExperimentConfig,
    xi: Option<f64>,
    out: &mut Outputs,
) -> Result<(), Failure> {
    let c = focused(config, xi)?;
    let report = c.coupling_report()?;
    let doc = MatchReport {
        xi_p: c.focusing_parameter(),
        w0_signal_m: c.signal_mode.waist,
        w0_idler_m: c.idler_mode.waist,
        chi_closed_form: c.closed_form_efficiency()?,
        report,
    };
    out.json("match_metrics.json", &doc)?;
    if !report.cs_satisfied {
        return Err(Failure::Data(format!(
            "Cauchy-Schwarz bound violated by {:.3e}",
            -report.cs_gap
        )));
    }
    Ok(())
}
