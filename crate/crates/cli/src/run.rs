use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use graftlab_core::geometry::{grafted_length, ConformalFamily, GraftedCollar};
use graftlab_core::hypersolve::{mode_solve, mode_system, zero_mode_balance};
use graftlab_core::identities::{area_derivative_analytic, area_derivative_geometric, boundary_term_pair, master_identity, Configuration};
use graftlab_core::sample::{random_solution, rng};
use graftlab_core::spectral::{FourierSolution, Side};
use graftlab_core::suite::{run_suite, SuiteConfig};
use graftlab_core::variation::collocation::fourier_modes;
use graftlab_core::variation::geodesic::{geodesic_oracle, GeodesicOptions};
use graftlab_core::variation::{global_field, solve_both};
use graftlab_core::{Collar, Error};
use rayon::prelude::*;
use serde_json::json;
use thiserror::Error;

use crate::config::{ConfigError, RunConfig, SweepParam};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Model(#[from] Error),
    #[error("output: {0}")]
    Io(#[from] io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl RunError {
    /// 2 for anything the caller can fix by changing the input, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Config(_) | RunError::Io(_) | RunError::Csv(_) => 2,
            RunError::Model(Error::InvalidParameter { .. }) | RunError::Model(Error::ZeroHeightRate) => 2,
            RunError::Model(_) | RunError::Json(_) => 1,
        }
    }
}

type Outcome = Result<bool, RunError>;

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, RunError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn chart_of(cfg: &RunConfig) -> Result<Collar, RunError> {
    Ok(GraftedCollar::new(cfg.ell, cfg.s, cfg.a)?.with_outer_bc(cfg.outer_bc))
}

pub fn verify(cfg: &RunConfig) -> Outcome {
    let suite = SuiteConfig {
        chart: chart_of(cfg)?,
        modes: cfg.modes,
        seed: cfg.seed,
        samples: cfg.samples,
        tol: cfg.tol,
        ..Default::default()
    };
    let reports = run_suite(&suite)?;
    let mut out = output(cfg.out.as_deref())?;
    serde_json::to_writer_pretty(&mut out, &reports)?;
    writeln!(out)?;
    out.flush()?;
    for r in &reports {
        eprintln!(
            "{} {:<34} abs {:.3e} rel {:.3e} tol {:.1e}",
            if r.pass { "PASS" } else { "FAIL" },
            r.identity,
            r.abs_err,
            r.rel_err,
            r.tol
        );
    }
    Ok(reports.iter().all(|r| r.pass))
}

/// Columns after the per-mode determinants.
const SWEEP_TAIL: [&str; 3] = ["boundary_oracle_rel_err", "area_two_methods_abs_err", "master_total"];

fn sweep_row(cfg: &RunConfig, param: SweepParam, value: f64) -> Result<Vec<f64>, RunError> {
    let mut c = cfg.clone();
    match param {
        SweepParam::Ell => c.ell = value,
        SweepParam::S => c.s = value,
        SweepParam::A => c.a = value,
    }
    let chart = chart_of(&c)?;
    let mut row = vec![
        value,
        chart.ell,
        chart.s,
        chart.a,
        chart.conformal_modulus(),
        (chart.conformal_modulus() - chart.conformal_modulus_quadrature(1024)).abs(),
        zero_mode_balance(&chart)?.1,
    ];
    for n in 1..=c.modes {
        row.push(mode_system(n, &chart)?.det);
    }
    if chart.s > 0.0 {
        let sol = random_solution(&mut rng(c.seed), chart.ell, chart.s, c.modes);
        let config = Configuration::slice(chart, sol.clone(), 0.0)?;
        let (closed, quad) = boundary_term_pair(&sol, &config.v_left, &config.v_right)?;
        let scale = closed.abs().max(quad.abs());
        row.push(if scale == 0.0 { 0.0 } else { (closed - quad).abs() / scale });
        let area = area_derivative_geometric(&sol, 0.0)? - area_derivative_analytic(&sol, &config.v_left, &config.v_right);
        row.push(area.abs());
        row.push(master_identity(&config).lhs);
    } else {
        row.extend([f64::NAN; 3]);
    }
    Ok(row)
}

/// CSV header: `param, value, ell, s, a, conformal_modulus, modulus_quadrature_err,
/// zero_mode_coefficient, det_1..det_N, boundary_oracle_rel_err,
/// area_two_methods_abs_err, master_total`.
pub fn sweep(cfg: &RunConfig) -> Outcome {
    let (param, values) = cfg.sweep_points()?;
    let rows = values
        .par_iter()
        .map(|&v| sweep_row(cfg, param, v))
        .collect::<Result<Vec<_>, _>>()?;
    let mut w = csv::Writer::from_writer(output(cfg.out.as_deref())?);
    let mut header: Vec<String> = [
        "param",
        "value",
        "ell",
        "s",
        "a",
        "conformal_modulus",
        "modulus_quadrature_err",
        "zero_mode_coefficient",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    header.extend((1..=cfg.modes).map(|n| format!("det_{n}")));
    header.extend(SWEEP_TAIL.iter().map(|s| s.to_string()));
    w.write_record(&header)?;
    for row in rows {
        let mut rec = vec![param.name().to_string()];
        rec.extend(row.iter().map(|v| format!("{v:e}")));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(true)
}

/// Bound on the extrapolated displacement error, nodal and per mode.
const GEODESIC_TOL: f64 = 1e-2;

/// Relative error of each Fourier mode of the numeric displacement, scaled
/// by the largest value of the linearised one.
fn mode_errors(displacement: &[f64], v: &graftlab_core::Variation, scale: f64) -> Vec<f64> {
    let (mean, modes) = fourier_modes(displacement, v.modes.len());
    let scale = if scale > 0.0 { scale } else { 1.0 };
    std::iter::once((mean - v.mean).abs() / scale)
        .chain(modes.iter().zip(&v.modes).map(|(a, b)| (a - b).norm() / scale))
        .collect()
}

pub fn geodesic(cfg: &RunConfig) -> Outcome {
    let chart = chart_of(cfg)?;
    if chart.s == 0.0 {
        return Err(ConfigError::Invalid("geodesic needs s > 0".into()).into());
    }
    let base = random_solution(&mut rng(cfg.seed), chart.ell, chart.s, cfg.modes);
    let sol = FourierSolution {
        d0: base.d0 * cfg.amplitude,
        modes: base.modes.iter().map(|(c, d)| (c * cfg.amplitude, d * cfg.amplitude)).collect(),
        ..base
    };
    let (vl, vr) = solve_both(&sol, 0.0, 0.0)?;
    let fam = ConformalFamily::conformal(chart, global_field(&sol, &vl, &vr)?);
    let opts = GeodesicOptions {
        points: cfg.points,
        fd_step: cfg.fd_step,
        ..Default::default()
    };
    let mut sides = Vec::new();
    let mut pass = true;
    for (side, v) in [(Side::Left, &vl), (Side::Right, &vr)] {
        let d = geodesic_oracle(&fam, side, cfg.t, &opts)?;
        let (rel, rel_x) = d.relative_error(v);
        let half: Vec<f64> = d.displacement.iter().zip(&d.extrapolated).map(|(a, b)| (a + b) / 2.0).collect();
        let scale = d.y.iter().fold(0.0_f64, |m, &y| m.max(v.eval(y).abs()));
        let err_half = {
            let e = half.iter().zip(&d.y).fold(0.0_f64, |m, (h, &y)| m.max((h - v.eval(y)).abs()));
            if scale > 0.0 {
                e / scale
            } else {
                e
            }
        };
        let modes = mode_errors(&d.extrapolated, v, scale);
        let worst = modes.iter().fold(rel_x, |m, &e| m.max(e));
        pass &= worst < GEODESIC_TOL;
        sides.push(json!({
            "side": format!("{side:?}").to_lowercase(),
            "rel_err": rel,
            "rel_err_half_t": err_half,
            "rel_err_extrapolated": rel_x,
            "first_order_ratio": if err_half > 0.0 { rel / err_half } else { 0.0 },
            "iterations": d.iterations,
            "mode_rel_err": modes,
        }));
    }
    let report = json!({
        "t": cfg.t,
        "points": cfg.points,
        "modes": cfg.modes,
        "seed": cfg.seed,
        "amplitude": cfg.amplitude,
        "tolerance": GEODESIC_TOL,
        "sides": sides,
        "pass": pass,
    });
    let mut out = output(cfg.out.as_deref())?;
    serde_json::to_writer_pretty(&mut out, &report)?;
    writeln!(out)?;
    out.flush()?;
    Ok(pass)
}

pub fn chart(cfg: &RunConfig) -> Outcome {
    let chart = chart_of(cfg)?;
    let report = json!({
        "chart": chart,
        "half_width": chart.half_width(),
        "total_area": chart.total_area(),
        "conformal_modulus": chart.conformal_modulus(),
        "grafted_length": grafted_length(chart.ell, chart.s),
        "curvature_flat": chart.gauss_curvature(0.0)?,
        "curvature_hyperbolic": chart.gauss_curvature(chart.half_width())?,
    });
    let mut out = output(cfg.out.as_deref())?;
    serde_json::to_writer_pretty(&mut out, &report)?;
    writeln!(out)?;
    out.flush()?;
    Ok(true)
}

/// Hyperbolic CSV: `n, xi, b, b_prime, dtn` for unit seam value.
/// Spectral CSV: `n, c_re, c_im, d_re, d_im` of the seeded random solution.
pub fn modes(cfg: &RunConfig, spectral: bool) -> Outcome {
    let chart = chart_of(cfg)?;
    let mut w = csv::Writer::from_writer(output(cfg.out.as_deref())?);
    if spectral {
        if chart.s == 0.0 {
            return Err(ConfigError::Invalid("spectral dump needs s > 0".into()).into());
        }
        let sol = random_solution(&mut rng(cfg.seed), chart.ell, chart.s, cfg.modes);
        w.write_record(["n", "c_re", "c_im", "d_re", "d_im"])?;
        w.write_record(["0".to_string(), format!("{:e}", sol.c0), "0".into(), format!("{:e}", sol.d0), "0".into()])?;
        for (j, (c, d)) in sol.modes.iter().enumerate() {
            w.write_record([(j + 1).to_string(), format!("{:e}", c.re), format!("{:e}", c.im), format!("{:e}", d.re), format!("{:e}", d.im)])?;
        }
    } else {
        let sols = (0..=cfg.modes)
            .into_par_iter()
            .map(|n| mode_solve(n, chart.ell, chart.a, chart.outer_bc, 1.0))
            .collect::<Result<Vec<_>, _>>()?;
        w.write_record(["n", "xi", "b", "b_prime", "dtn"])?;
        for s in &sols {
            for (xi, b, db) in &s.samples {
                w.write_record([s.n().to_string(), format!("{xi:e}"), format!("{b:e}"), format!("{db:e}"), format!("{:e}", s.dtn)])?;
            }
        }
    }
    w.flush()?;
    Ok(true)
}
