//! Mode matching, purity, the Cauchy–Schwarz optimality bound and the
//! field-based pair-collection efficiency.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::biphoton::JointAmplitude;
use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::grid::ComplexField;
use crate::optics::Arm;

/// Tolerance on the Cauchy–Schwarz bound in [`CouplingReport`].
pub const CS_TOLERANCE: f64 = 1e-9;

/// L2-normalized overlap `|⟨a,b⟩| / (‖a‖‖b‖)`.
pub fn mode_matching(a: &ComplexField, b: &ComplexField) -> Result<f64> {
    let (na, nb) = (a.norm(), b.norm());
    if !(na > 0.0 && nb > 0.0) {
        return Err(Error::ZeroMode(
            "mode matching needs two non-zero fields".into(),
        ));
    }
    Ok((a.inner(b)?.norm() / (na * nb)).min(1.0))
}

/// Purity of a single spatial mode. A normalizable pure mode has purity 1.
pub fn purity(field: &ComplexField) -> Result<f64> {
    if !(field.norm() > 0.0) {
        return Err(Error::ZeroMode("purity of an all-zero field".into()));
    }
    Ok(1.0)
}

/// `Tr(ρ²)` of the mixture `ρ = Σ p_n |φ_n⟩⟨φ_n|`; the fields need not be normalized.
pub fn purity_of_mixture(ensemble: &[(f64, ComplexField)]) -> Result<f64> {
    if ensemble.is_empty() {
        return Err(Error::Mixture("empty ensemble".into()));
    }
    let total: f64 = ensemble.iter().map(|(p, _)| p).sum();
    if ensemble.iter().any(|(p, _)| !(*p >= 0.0)) || (total - 1.0).abs() > 1e-9 {
        return Err(Error::Mixture(format!(
            "weights must be non-negative and sum to 1, got {total}"
        )));
    }
    let modes = ensemble
        .iter()
        .map(|(_, f)| f.normalized())
        .collect::<Result<Vec<_>>>()?;
    let mut tr = 0.0;
    for (m, (pm, _)) in ensemble.iter().enumerate() {
        for (n, (pn, _)) in ensemble.iter().enumerate() {
            tr += pm * pn * modes[m].inner(&modes[n])?.norm_sqr();
        }
    }
    Ok(tr)
}

/// `(m_si² <= p_s·p_i + tol, p_s·p_i − m_si²)`.
pub fn cauchy_schwarz_check(m_si: f64, p_s: f64, p_i: f64, tol: f64) -> (bool, f64) {
    let gap = p_s * p_i - m_si * m_si;
    (gap >= -tol, gap)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CouplingReport {
    pub chi_si: f64,
    /// Coincidence overlap `|⟨u_s u_i, Φ⟩|²`.
    pub c_si: f64,
    /// Singles with the idler projected on its mode, signal unrestricted.
    pub c_s: f64,
    /// Singles with the signal projected on its mode, idler unrestricted.
    pub c_i: f64,
    pub m_si: f64,
    pub purity_s: f64,
    pub purity_i: f64,
    pub cs_satisfied: bool,
    pub cs_gap: f64,
}

/// Pair-collection efficiency `χ_si = C_si / √(C_s C_i)` for collection
/// modes `mode_s` (signal grid) and `mode_i` (idler grid).
///
/// The modes are L2-normalized internally. `m_si` compares the two
/// conditional modes after mapping the idler one through `k → −k`, which
/// requires the idler grid to be the mirror image of the signal grid (or
/// identical to it).
pub fn coupling_efficiency_numeric(
    joint: &JointAmplitude,
    mode_s: &ComplexField,
    mode_i: &ComplexField,
) -> Result<CouplingReport> {
    if !mode_s.grid().approx_eq(joint.grid_s()) || !mode_i.grid().approx_eq(joint.grid_i()) {
        return Err(Error::GridMismatch(
            "collection modes must be sampled on the joint amplitude grids".into(),
        ));
    }
    let u_s = mode_s.normalized()?;
    let u_i = mode_i.normalized()?;

    let p = joint.project(&u_i, Arm::Signal)?;
    let q = joint.project(&u_s, Arm::Idler)?;
    let h_s = joint.grid_s().cell_area();
    let h_i = joint.grid_i().cell_area();

    let c_s = p.iter().map(|v| v.norm_sqr()).sum::<f64>() * h_s;
    let c_i = q.iter().map(|v| v.norm_sqr()).sum::<f64>() * h_i;
    if !(c_s > 0.0 && c_i > 0.0) {
        return Err(Error::ZeroMode("singles overlap vanishes".into()));
    }
    let amp: Complex64 = u_s
        .values()
        .iter()
        .zip(&p)
        .map(|(u, v)| u.conj() * v)
        .sum::<Complex64>()
        * h_s;
    let c_si = amp.norm_sqr();
    let chi_si = c_si / (c_s * c_i).sqrt();

    let phi_s = ComplexField::new(*joint.grid_s(), p)?;
    let phi_i = ComplexField::new(*joint.grid_i(), q)?;
    let partner = if phi_i.grid().approx_eq(&phi_s.grid().reflected()) {
        phi_i.reflected()
    } else if phi_i.grid().approx_eq(phi_s.grid()) {
        phi_i
    } else {
        return Err(Error::GridMismatch(
            "idler grid must mirror the signal grid to compare conditional modes".into(),
        ));
    };
    let m_si = mode_matching(&phi_s, &partner)?;
    let purity_s = purity(&phi_s)?;
    let purity_i = purity(&partner)?;
    let (cs_satisfied, cs_gap) = cauchy_schwarz_check(m_si, purity_s, purity_i, CS_TOLERANCE);
    Ok(CouplingReport {
        chi_si,
        c_si,
        c_s,
        c_i,
        m_si,
        purity_s,
        purity_i,
        cs_satisfied,
        cs_gap,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub xi_p: f64,
    /// Collection waist (m), both arms.
    pub w0: f64,
    pub chi_numeric: f64,
    pub chi_closed_form: f64,
    pub rel_diff: f64,
    pub report: CouplingReport,
}

fn sweep_point(config: &ExperimentConfig, xi_p: f64, w0: f64) -> Result<SweepRow> {
    let point = config.with_focusing(xi_p)?.with_collection_waist(w0);
    let report = point.coupling_report()?;
    let chi_closed_form = point.closed_form_efficiency()?;
    Ok(SweepRow {
        xi_p,
        w0,
        chi_numeric: report.chi_si,
        chi_closed_form,
        rel_diff: (report.chi_si - chi_closed_form) / chi_closed_form,
        report,
    })
}

/// χ_si over the cross product `xi_values × w0_values`, ξ-major.
///
/// Rows are evaluated in parallel; ordering and values do not depend on
/// the thread count. The first failing row (in table order) is reported.
pub fn efficiency_sweep(
    config: &ExperimentConfig,
    xi_values: &[f64],
    w0_values: &[f64],
) -> Result<Vec<SweepRow>> {
    if xi_values.is_empty() || w0_values.is_empty() {
        return Err(Error::config("sweep", "xi and w0 lists must be non-empty"));
    }
    let points: Vec<(f64, f64)> = xi_values
        .iter()
        .flat_map(|&xi| w0_values.iter().map(move |&w0| (xi, w0)))
        .collect();
    let results: Vec<Result<SweepRow>> = points
        .par_iter()
        .map(|&(xi, w0)| sweep_point(config, xi, w0))
        .collect();
    results
        .into_iter()
        .enumerate()
        .map(|(row, r)| {
            r.map_err(|e| Error::SweepRow {
                row,
                xi_p: points[row].0,
                w0: points[row].1,
                source: Box::new(e),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec2;
    use crate::grid::TransverseGrid;

    fn grid() -> TransverseGrid {
        TransverseGrid::new(128, 6.0, Vec2::ZERO).unwrap()
    }

    fn gaussian(w: f64) -> ComplexField {
        ComplexField::from_fn(grid(), |k| {
            Complex64::new((-k.norm_sq() / (w * w)).exp(), 0.0)
        })
    }

    #[test]
    fn self_overlap_and_parity() {
        let a = gaussian(1.0);
        assert!((mode_matching(&a, &a).unwrap() - 1.0).abs() < 1e-12);
        let odd =
            ComplexField::from_fn(grid(), |k| Complex64::new(k.x * (-k.norm_sq()).exp(), 0.0));
        assert!(mode_matching(&a, &odd).unwrap() < 1e-9);
    }

    #[test]
    fn gaussian_overlap_formula() {
        // The amplitude width w here is the field 1/e radius of exp(−|k|²/w²).
        let (w1, w2) = (0.8, 1.3);
        let m = mode_matching(&gaussian(w1), &gaussian(w2)).unwrap();
        let expect = 2.0 * w1 * w2 / (w1 * w1 + w2 * w2);
        assert!((m - expect).abs() < 1e-6, "{m} vs {expect}");
    }

    #[test]
    fn overlap_symmetric_and_phase_blind() {
        let a = gaussian(0.9);
        let b = ComplexField::from_fn(grid(), |k| {
            Complex64::new((-(k.x - 0.3).powi(2) - k.y * k.y).exp(), 0.2 * k.x)
        });
        let ab = mode_matching(&a, &b).unwrap();
        assert!((ab - mode_matching(&b, &a).unwrap()).abs() < 1e-12);
        let rotated = b.scaled(Complex64::from_polar(1.0, 1.234));
        assert!((ab - mode_matching(&a, &rotated).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn zero_and_mismatched_fields() {
        let a = gaussian(1.0);
        let z = a.scaled(Complex64::new(0.0, 0.0));
        assert!(mode_matching(&a, &z).is_err());
        assert!(purity(&z).is_err());
        let other =
            ComplexField::from_fn(TransverseGrid::new(64, 6.0, Vec2::ZERO).unwrap(), |_| {
                Complex64::new(1.0, 0.0)
            });
        assert!(matches!(
            mode_matching(&a, &other),
            Err(Error::GridMismatch(_))
        ));
    }

    #[test]
    fn purities() {
        let a = gaussian(1.0);
        assert_eq!(purity(&a).unwrap(), 1.0);
        let odd =
            ComplexField::from_fn(grid(), |k| Complex64::new(k.x * (-k.norm_sq()).exp(), 0.0));
        let mixed = purity_of_mixture(&[(0.5, a.clone()), (0.5, odd)]).unwrap();
        assert!((mixed - 0.5).abs() < 1e-9);
        let same = purity_of_mixture(&[(0.5, a.clone()), (0.5, a.clone())]).unwrap();
        assert!((same - 1.0).abs() < 1e-12);
        assert!(purity_of_mixture(&[(0.6, a.clone()), (0.5, a)]).is_err());
    }

    #[test]
    fn cauchy_schwarz_cases() {
        assert_eq!(cauchy_schwarz_check(1.0, 1.0, 1.0, 0.0), (true, 0.0));
        assert_eq!(cauchy_schwarz_check(0.0, 1.0, 1.0, 0.0), (true, 1.0));
        let (ok, gap) = cauchy_schwarz_check(0.9, 0.5, 0.5, 1e-9);
        assert!(!ok);
        assert!((gap - (0.25 - 0.81)).abs() < 1e-15);
    }

    #[test]
    fn separable_amplitude_couples_perfectly() {
        let gs = TransverseGrid::new(48, 5.0, Vec2::new(2.0, 0.0)).unwrap();
        let f = ComplexField::from_fn(gs, |k| {
            Complex64::new((-(k.x - 2.0).powi(2) - 0.5 * k.y * k.y).exp(), 0.0)
        });
        let g = f.reflected();
        let joint = JointAmplitude::separable(&f, &g);
        let r = coupling_efficiency_numeric(&joint, &f, &g).unwrap();
        assert!((r.chi_si - 1.0).abs() < 1e-6);
        assert!((r.m_si - 1.0).abs() < 1e-9);
        assert!(r.cs_satisfied);
        let stored = r.c_si / (r.c_s * r.c_i).sqrt();
        assert!((stored - r.chi_si).abs() <= 1e-12 * r.chi_si);
    }

    #[test]
    fn empty_sweep_is_rejected() {
        let c = ExperimentConfig::default();
        assert!(efficiency_sweep(&c, &[], &[456e-6]).is_err());
        assert!(efficiency_sweep(&c, &[0.1], &[]).is_err());
    }
}
