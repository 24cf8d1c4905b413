use proptest::prelude::*;
use spdc_core::config::ExperimentConfig;
use spdc_core::optics::{PhaseMatchMode, PhaseMatchModel};
use spdc_core::{
    conditional_mode, coupling_efficiency_numeric, efficiency_sweep, joint_mode_function,
    reference_mode, Arm, CollectionMode, Complex64, Crystal, CrystalType, PumpBeam, TransverseGrid,
    Vec2,
};

fn crystal() -> Crystal {
    Crystal {
        thickness: 2e-3,
        phase_matching_angle: 29.97f64.to_radians(),
        walk_off_azimuth: 0.0,
        kind: CrystalType::TypeI,
    }
}

fn ideal() -> PhaseMatchModel {
    PhaseMatchModel {
        mode: PhaseMatchMode::Ideal,
        cone_half_angle: 0.0,
        anisotropy: 0.0,
    }
}

/// Thin crystal: `∫ exp(−a|q+k|²)·exp(−b|k−c|²) dk ∝ exp(−ab/(a+b)·|q+c|²)`.
#[test]
fn conditional_mode_matches_gaussian_convolution() {
    let (w_p, w0): (f64, f64) = (100e-6, 456e-6);
    let c = Vec2::new(3.0e4, -1.2e4);
    let a = w_p * w_p / 4.0;
    let b = w0 * w0 / 4.0;
    let g = a * b / (a + b);
    let half = 4.0 * (2.0 / w_p).hypot(2.0 / w0);
    let gi = TransverseGrid::new(128, half, c).unwrap();
    let gs = TransverseGrid::new(128, half, -c).unwrap();
    let pump = PumpBeam::new(405e-9, w_p, 1.0).unwrap();
    let joint = joint_mode_function(gs, gi, &pump, &crystal(), &ideal()).unwrap();
    let herald = reference_mode(
        &CollectionMode {
            waist: w0,
            center: c,
            arm: Arm::Idler,
        },
        &gi,
    )
    .unwrap();
    let phi = conditional_mode(&joint, &herald, Arm::Signal).unwrap();
    let peak = (2.0 * g / std::f64::consts::PI).sqrt();
    let mut worst: f64 = 0.0;
    for (k, v) in gs.points().zip(phi.values()) {
        let exact = peak * (-g * (k + c).norm_sq()).exp();
        worst = worst.max((v - Complex64::new(exact, 0.0)).norm() / peak);
    }
    assert!(worst < 1e-6, "max deviation {worst:e} of peak");
    assert!((phi.norm() - 1.0).abs() < 1e-9);
}

#[test]
fn adaptive_grid_is_converged() {
    let config = ExperimentConfig::default().with_focusing(0.05).unwrap();
    let coarse = config.coupling_report().unwrap();
    let (gs, _) = config.grids().unwrap();
    let mut fine = config.clone();
    fine.grid.points_per_axis = Some(2 * gs.n());
    let fine = fine.coupling_report().unwrap();
    let rel = (coarse.chi_si - fine.chi_si).abs() / fine.chi_si;
    assert!(
        rel < 0.01,
        "n = {}: {} vs {}",
        gs.n(),
        coarse.chi_si,
        fine.chi_si
    );
}

#[test]
fn sweep_rows_are_reproducible_in_isolation() {
    let mut config = ExperimentConfig::default();
    config.phase_match.mode = PhaseMatchMode::Ideal;
    let xi = [0.01, 0.1];
    let w0 = [100e-6, 456e-6];
    let table = efficiency_sweep(&config, &xi, &w0).unwrap();
    assert_eq!(table.len(), 4);
    for (i, row) in table.iter().enumerate() {
        assert_eq!(row.xi_p, xi[i / 2]);
        assert_eq!(row.w0, w0[i % 2]);
        let alone = efficiency_sweep(&config, &[row.xi_p], &[row.w0]).unwrap();
        assert_eq!(alone[0], *row);
    }
    assert_eq!(table, efficiency_sweep(&config, &xi, &w0).unwrap());
}

#[test]
fn failing_sweep_row_is_identified() {
    let config = ExperimentConfig::default();
    let err = efficiency_sweep(&config, &[0.1, -1.0], &[456e-6]).unwrap_err();
    match err {
        spdc_core::Error::SweepRow { row, xi_p, .. } => {
            assert_eq!(row, 1);
            assert_eq!(xi_p, -1.0);
        }
        other => panic!("unexpected {other}"),
    }
}

fn small_config(xi: f64, w0: f64, theta0: f64, rho: f64, phi_w: f64) -> ExperimentConfig {
    let mut c = ExperimentConfig::default()
        .with_focusing(xi)
        .unwrap()
        .with_collection_waist(w0);
    c.phase_match.cone_half_angle = theta0;
    c.phase_match.anisotropy = rho;
    c.crystal.walk_off_azimuth = phi_w;
    c.signal_mode.center = Vec2::new(c.cone_radius(), 0.0);
    c.idler_mode.center = -c.signal_mode.center;
    c.grid.points_per_axis = Some(40);
    c
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn projections_respect_invariants(
        xi in 0.01f64..0.9,
        w0 in 100e-6f64..700e-6,
        theta0 in 0.0f64..0.03,
        rho in -0.01f64..0.01,
        phi_w in 0.0f64..std::f64::consts::TAU,
        phase in -3.0f64..3.0,
    ) {
        let c = small_config(xi, w0, theta0, rho, phi_w);
        let s = c.setup().unwrap();
        let report = coupling_efficiency_numeric(&s.joint, &s.mode_s, &s.mode_i).unwrap();
        prop_assert!(report.m_si.powi(2) <= report.purity_s * report.purity_i + 1e-9);
        prop_assert!(report.cs_satisfied);
        prop_assert!(report.chi_si > 0.0 && report.chi_si <= 1.0 + 1e-9);

        let rotated = s.joint.clone().with_global_phase(phase);
        let r2 = coupling_efficiency_numeric(&rotated, &s.mode_s, &s.mode_i).unwrap();
        prop_assert!((r2.chi_si - report.chi_si).abs() <= 1e-12 * report.chi_si);

        let phi = conditional_mode(&s.joint, &s.mode_i, Arm::Signal).unwrap();
        prop_assert!((phi.norm() - 1.0).abs() < 1e-9);
        let psi = conditional_mode(&s.joint, &s.mode_s, Arm::Idler).unwrap();
        prop_assert!((psi.norm() - 1.0).abs() < 1e-9);
    }
}
