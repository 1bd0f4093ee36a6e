//! The full verification suite, as run by `graftlab verify`.
//!
//! Every check yields an [`IdentityReport`]. Inequality checks are encoded as
//! identities whose left side is the size of the violation and whose right
//! side is zero.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::GraftedCollar;
use crate::hypersolve::HyperbolicField;
use crate::identities::{
    arc_length_derivative, area_derivative_analytic, area_derivative_geometric, boundary_term_pair, extended_boundary_term,
    extended_boundary_term_quadrature, extended_master_identity, fitted_exponent, hyperbolic_area_check, hyperbolic_lambda_gap,
    length_rate_fd, master_identity, quad_terms, slice_condition, vanishing_summary, Configuration, IdentityReport, ALGEBRAIC_TOL,
    BVP_TOL,
};
use crate::sample::{random_quad, random_solution, random_solution_any_mean, rng};
use crate::spectral::{FourierSolution, Side};
use crate::variation::collocation::{collocate_amended_variation, collocate_flat_variation};
use crate::variation::{amended_variation_explicit, flat_variation_explicit, solve_both_amended, solve_flat_variation, QuadDiffModes};

/// Inputs of a suite run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub chart: GraftedCollar<f64>,
    /// Spectral truncation `N`.
    pub modes: usize,
    pub seed: u64,
    /// Random configurations per randomized check.
    pub samples: usize,
    /// Overrides every check's tolerance when set.
    pub tol: Option<f64>,
    /// Step of the finite-difference length check.
    pub fd_t: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            chart: GraftedCollar::new(2.0 * std::f64::consts::PI, 2.0, 1.0).expect("valid default chart"),
            modes: 8,
            seed: 1,
            samples: 20,
            tol: None,
            fd_t: 1e-5,
        }
    }
}

/// Points used by the variation collocation checks.
const COLLOCATION_POINTS: usize = 64;
/// Modes compared by the variation collocation checks.
const COLLOCATION_MODES: usize = 8;

fn violation(identity: &str, terms: Vec<(&str, f64)>, amount: f64, tol: f64) -> IdentityReport {
    IdentityReport::new(identity, terms, amount.max(0.0), 0.0, tol)
}

/// Worst case over reports of one kind, keeping the terms of the worst one.
fn worst(identity: &str, reports: Vec<IdentityReport>, samples: usize) -> IdentityReport {
    let mut w = reports
        .into_iter()
        .max_by(|a, b| a.rel_err.min(a.abs_err).total_cmp(&b.rel_err.min(b.abs_err)))
        .expect("at least one sample");
    w.identity = identity.to_string();
    w.notes.push(format!("worst of {samples} samples"));
    w
}

/// Runs all checks. The order of the returned reports is fixed.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Vec<IdentityReport>> {
    let chart = cfg.chart.validated()?;
    if chart.s == 0.0 {
        return Err(crate::error::invalid("s", "the suite needs s > 0"));
    }
    let (ell, s, n) = (chart.ell, chart.s, cfg.modes.max(1));
    let samples = cfg.samples.max(1);
    let mut r = rng(cfg.seed);
    let sols: Vec<FourierSolution<f64>> = (0..samples).map(|_| random_solution(&mut r, ell, s, n)).collect();
    let quads: Vec<QuadDiffModes<f64>> = (0..samples).map(|_| random_quad(&mut r, ell, s, n)).collect();
    let tilted: Vec<FourierSolution<f64>> = (0..samples).map(|_| random_solution_any_mean(&mut r, ell, s, n)).collect();

    let mut out = Vec::new();

    // seam integral: closed form against quadrature
    let reports = sols
        .par_iter()
        .map(|sol| {
            let (vl, vr) = crate::variation::solve_both(sol, 0.1, -0.2)?;
            let (closed, quad) = boundary_term_pair(sol, &vl, &vr)?;
            Ok(IdentityReport::new("", vec![("closed", closed), ("quadrature", quad)], closed, quad, ALGEBRAIC_TOL))
        })
        .collect::<Result<Vec<_>>>()?;
    out.push(worst("boundary_term_oracle", reports, samples));

    // seam variations: coefficient formulas against periodic collocation
    let m = n.min(COLLOCATION_MODES);
    let per_mode = |a: &[num_complex::Complex<f64>], b: &[num_complex::Complex<f64>]| {
        a.iter().zip(b).take(m).fold(0.0_f64, |w, (x, y)| w.max((x - y).norm()))
    };
    let mut flat_err = 0.0_f64;
    let mut amended_err = 0.0_f64;
    for (sol, q) in sols.iter().zip(&quads) {
        for side in Side::both() {
            let trace = sol.neumann_trace_flat(side);
            let closed = flat_variation_explicit(sol, side, 0.0)?;
            let coll = collocate_flat_variation(&trace, 0.0, COLLOCATION_POINTS)?;
            flat_err = flat_err.max(per_mode(&closed.modes, &coll.modes));
            let closed = amended_variation_explicit(sol, q, side, 0.0)?;
            let coll = collocate_amended_variation(&trace, q, 0.0, COLLOCATION_POINTS)?;
            amended_err = amended_err.max(per_mode(&closed.modes, &coll.modes));
        }
    }
    out.push(IdentityReport::new("variation_collocation", vec![("max_mode_error", flat_err)], flat_err, 0.0, 1e-8));
    out.push(IdentityReport::new("amended_variation_collocation", vec![("max_mode_error", amended_err)], amended_err, 0.0, 1e-8));

    // solvability: exactly the inputs with c₀ ≠ 0 are rejected
    let mut wrong = 0usize;
    for sol in sols.iter().chain(&tilted) {
        let rejected = matches!(
            solve_flat_variation(&sol.neumann_trace_flat(Side::Left), 0.0),
            Err(Error::NoPeriodicSolution { .. })
        );
        if rejected != (sol.c0 != 0.0) {
            wrong += 1;
        }
    }
    out.push(violation("solvability_constraint", vec![("misclassified", wrong as f64)], wrong as f64, 0.0));

    // slice-compatible configuration on the given chart
    let sol = sols[0].clone();
    let cfg0 = Configuration::slice(chart, sol.clone(), 0.0)?;
    out.push(slice_condition(&cfg0.sol, &cfg0.v_left, &cfg0.v_right, 0.0));

    let geometric = area_derivative_geometric(&sol, 0.0)?;
    let analytic = area_derivative_analytic(&sol, &cfg0.v_left, &cfg0.v_right);
    out.push(IdentityReport::new(
        "area_two_methods",
        vec![("geometric", geometric), ("analytic", analytic)],
        geometric,
        analytic,
        1e-9,
    ));
    out.push(hyperbolic_area_check(hyperbolic_lambda_gap(&cfg0.hyper), &cfg0.hyper));

    let exact = -0.5 * sol.d0 * ell;
    let fd = length_rate_fd(&sol, cfg.fd_t)?;
    out.push(IdentityReport::new("arc_length_fd", vec![("fd", fd), ("-d0*ell/2", exact)], fd, exact, 1e-4));
    let seam = arc_length_derivative(&sol, None, Side::Left)?;
    out.push(IdentityReport::new("arc_length_seam", vec![("seam", seam), ("-d0*ell/2", exact)], seam, exact, ALGEBRAIC_TOL));

    out.push(hyperbolic_checks(&cfg0.hyper));
    out.push(violation(
        "hyperbolic_cross_method",
        vec![("max_discrepancy", cfg0.hyper.discrepancy())],
        cfg0.hyper.discrepancy(),
        1e-8,
    ));

    // master identity: zero field, then nonpositivity and strict negativity
    let zero = Configuration::slice(chart, FourierSolution::zero(ell, s, n), 0.0)?;
    let mut z = master_identity(&zero);
    z.identity = "master_identity_zero_field".into();
    out.push(z);
    out.push(nonpositivity(&cfg0));

    let v = vanishing_summary(&chart, n)?;
    out.push(violation(
        "per_mode_determinant",
        vec![("min_abs_det", v.min_abs_det), ("argmin", v.argmin as f64)],
        1e-6 - v.min_abs_det,
        0.0,
    ));
    out.push(violation(
        "zero_mode_balance",
        vec![("s/2-dtn0", v.zero_mode_coefficient)],
        -v.zero_mode_coefficient,
        0.0,
    ));

    // extended identities
    let reports = sols
        .par_iter()
        .zip(&quads)
        .map(|(sol, q)| {
            let (wl, wr) = solve_both_amended(sol, q, 0.1, -0.2)?;
            let closed = extended_boundary_term(sol, q, &wl, &wr)?;
            let quad = extended_boundary_term_quadrature(sol, &wl, &wr)?;
            Ok(IdentityReport::new("", vec![("closed", closed), ("quadrature", quad)], closed, quad, ALGEBRAIC_TOL))
        })
        .collect::<Result<Vec<_>>>()?;
    out.push(worst("extended_boundary_oracle", reports, samples));

    let q0 = Configuration::extended(chart, sol.clone(), QuadDiffModes::zero(ell, s, n), 0.0)?;
    let reduced = extended_master_identity(&q0)?.identity.lhs;
    let plain = master_identity(&cfg0).lhs;
    out.push(IdentityReport::new(
        "extended_reduction",
        vec![("extended_at_q0", reduced), ("master", plain)],
        reduced,
        plain,
        0.0,
    ));

    let qcfg = Configuration::extended(chart, sol.clone(), quads[0].clone(), 0.0)?;
    let ext = extended_master_identity(&qcfg)?;
    let mut rewritten = ext.rewritten;
    rewritten.notes.push(format!("remainder ratio |R|/(l s |Phi|) = {:.3e}", ext.remainder_ratio));
    out.push(rewritten);

    let pts = [1e-2, 1e-3, 1e-4]
        .iter()
        .map(|&eps| {
            let c = Configuration::extended(chart, sol.clone(), quads[0].scaled(eps), 0.0)?;
            Ok((eps, quad_terms(&c)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let slope = fitted_exponent(&pts);
    out.push(IdentityReport::new("extended_scaling", vec![("fitted_exponent", slope)], slope, 1.0, 0.05));

    let closed = chart.conformal_modulus();
    let quad = chart.conformal_modulus_quadrature(1024);
    out.push(IdentityReport::new(
        "conformal_modulus",
        vec![("closed", closed), ("quadrature", quad)],
        closed,
        quad,
        ALGEBRAIC_TOL,
    ));

    let closed = chart.total_area();
    let quad = chart.total_area_quadrature(1024);
    out.push(IdentityReport::new(
        "total_area",
        vec![("closed", closed), ("quadrature", quad)],
        closed,
        quad,
        ALGEBRAIC_TOL,
    ));

    if let Some(t) = cfg.tol {
        out = out.into_iter().map(|r| r.with_tolerance(t)).collect();
    }
    Ok(out)
}

/// Green's identity on the hyperbolic strips, `∫∫H(Δ-2)H + E` against the
/// seam and outer boundary terms.
fn hyperbolic_checks(hyper: &HyperbolicField<f64>) -> IdentityReport {
    let (lhs, rhs) = hyper.greens_sides();
    let e = hyper.energy();
    IdentityReport::new(
        "hyperbolic_greens_identity",
        vec![
            ("interior", lhs),
            ("energy", e),
            ("seam_green", hyper.seam_green_term()),
            ("outer_green", hyper.outer_green_term()),
        ],
        lhs + e,
        rhs + e,
        BVP_TOL,
    )
}

/// Every master-identity term is `≤ 0` and the total is `< 0` for a nonzero field.
fn nonpositivity(cfg: &Configuration<f64>) -> IdentityReport {
    let m = master_identity(cfg);
    let positive: f64 = m.terms[..3].iter().map(|t| t.value.max(0.0)).sum();
    let total = m.lhs;
    let mut r = violation("master_identity_nonpositivity", m.terms.iter().map(|t| (t.label.as_str(), t.value)).collect(), positive, 0.0);
    r.notes.push(format!("total {total:.6e}"));
    if total >= 0.0 {
        r.pass = false;
        r.notes.push("total not strictly negative".into());
    } else {
        r.notes.push("strictly negative: contradiction for a nonzero field".into());
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suite_passes() {
        let reports = run_suite(&SuiteConfig::default()).unwrap();
        assert!(reports.len() >= 12);
        for r in &reports {
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn impossible_tolerance_fails_some_checks() {
        let cfg = SuiteConfig {
            tol: Some(1e-16),
            samples: 3,
            ..Default::default()
        };
        let reports = run_suite(&cfg).unwrap();
        assert!(reports.iter().any(|r| !r.pass));
    }
}
