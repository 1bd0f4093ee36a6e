//! Direct computation of the perturbed seam geodesic, used as an oracle for
//! the linearised displacement.
//!
//! The curve is a graph `x = X(y)` over the seam circle, discretised on `M`
//! periodic nodes. Its length under `gr(σ₀)/H_t`,
//!
//! ```text
//! L_h(X) = Σ_j h·F(X_{j+½}, (X_{j+1} - X_j)/h, y_{j+½}),
//! F(X, p, y) = ((p² + G(X)²) / (1 + tH(X, y)))^{1/2},
//! ```
//!
//! is made stationary by Newton's method, starting from the seam. The
//! Jacobian of the gradient is built by centred differences with a
//! colouring of its cyclic tridiagonal pattern. `∂ₓH` jumps across the seam,
//! so while differencing, each midpoint keeps the stratum formula of the
//! current iterate (a semi-smooth Newton step).

use crate::error::{invalid, Error, Result};
use crate::geometry::{ConformalFamily, Stratum};
use crate::linalg::{Lu, Matrix};
use crate::scalar::Scalar;
use crate::spectral::Side;
use crate::variation::VariationField;

#[derive(Debug, Clone)]
pub struct GeodesicOptions<T> {
    /// Collocation nodes on the circle.
    pub points: usize,
    /// Step of the centred differences for the Newton Jacobian. Defaults to
    /// `1e-4·t` when `None`.
    pub fd_step: Option<T>,
    pub max_iterations: usize,
}

impl<T: Scalar> Default for GeodesicOptions<T> {
    fn default() -> Self {
        Self {
            points: 256,
            fd_step: None,
            max_iterations: 60,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GeodesicDisplacement<T> {
    pub side: Side,
    pub t: T,
    pub y: Vec<T>,
    /// `(X(y) ∓ s/2)/t` at parameter `t`.
    pub displacement: Vec<T>,
    /// `2D(t/2) - D(t)`, removing the `O(t)` term.
    pub extrapolated: Vec<T>,
    pub iterations: usize,
}

impl<T: Scalar> GeodesicDisplacement<T> {
    /// `max|D - V| / max|V|` at the nodes, for the primary and extrapolated samples.
    pub fn relative_error(&self, v: &VariationField<T>) -> (T, T) {
        let reference: Vec<T> = self.y.iter().map(|&y| v.eval(y)).collect();
        let scale = reference.iter().fold(T::zero(), |m, r| m.max(r.abs()));
        let err = |d: &[T]| {
            let e = d.iter().zip(&reference).fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs()));
            if scale > T::zero() {
                e / scale
            } else {
                e
            }
        };
        (err(&self.displacement), err(&self.extrapolated))
    }
}

/// Computes the displacement of the closed geodesic homotopic to `side`'s
/// seam for the metric `gr(σ₀)/(1 + tH)`.
pub fn geodesic_oracle<T: Scalar>(
    fam: &ConformalFamily<T>,
    side: Side,
    t: T,
    opts: &GeodesicOptions<T>,
) -> Result<GeodesicDisplacement<T>> {
    if fam.quad.is_some() {
        return Err(Error::QuadUnsupported("geodesic_oracle"));
    }
    if !(t > T::zero()) {
        return Err(invalid("t", "must be > 0"));
    }
    if opts.points < 8 {
        return Err(invalid("points", "need at least 8 nodes"));
    }
    let (x_full, iters_full) = solve_curve(fam, side, t, opts)?;
    let (x_half, iters_half) = solve_curve(fam, side, t / T::lit(2.0), opts)?;
    let seam = side.sign::<T>() * fam.base.half_height();
    let two = T::lit(2.0);
    let displacement: Vec<T> = x_full.iter().map(|&x| (x - seam) / t).collect();
    let extrapolated = x_half
        .iter()
        .zip(&displacement)
        .map(|(&xh, &d)| two * (xh - seam) / (t / two) - d)
        .collect();
    let m = opts.points;
    let y = (0..m).map(|j| fam.base.ell * T::from_usize_lossy(j) / T::from_usize_lossy(m)).collect();
    Ok(GeodesicDisplacement {
        side,
        t,
        y,
        displacement,
        extrapolated,
        iterations: iters_full + iters_half,
    })
}

struct Lagrangian<'a, T: Scalar> {
    fam: &'a ConformalFamily<T>,
    t: T,
    h: T,
}

impl<T: Scalar> Lagrangian<'_, T> {
    /// `(F_X, F_p)` at a midpoint.
    fn partials(&self, stratum: Stratum, x: T, p: T, y: T) -> Result<(T, T)> {
        let m = self.fam.base.metric_coefficient(x)?;
        let (hv, hx) = self.fam.hdot.value_and_dx_in(stratum, x, y);
        let factor = T::one() + self.t * hv;
        if !(factor > T::zero()) {
            return Err(Error::NonPositiveFactor {
                value: factor.to_f64_lossy(),
                x: x.to_f64_lossy(),
                y: y.to_f64_lossy(),
            });
        }
        let w = T::one() / factor;
        let wx = -self.t * hx * w * w;
        let q = p * p + m.g * m.g;
        let f = (w * q).sqrt();
        let two = T::lit(2.0);
        Ok(((wx * q + two * w * m.g * m.dg) / (two * f), w * p / f))
    }

    fn midpoint_strata(&self, xs: &[T]) -> Vec<Stratum> {
        let m = xs.len();
        let half = T::lit(0.5);
        (0..m).map(|j| self.fam.hdot.stratum(half * (xs[j] + xs[(j + 1) % m]))).collect()
    }

    fn gradient(&self, xs: &[T], strata: &[Stratum]) -> Result<Vec<T>> {
        let m = xs.len();
        let half = T::lit(0.5);
        let mut fx = Vec::with_capacity(m);
        let mut fp = Vec::with_capacity(m);
        for j in 0..m {
            let (a, b) = (xs[j], xs[(j + 1) % m]);
            let y = self.h * (T::from_usize_lossy(j) + half);
            let (gx, gp) = self.partials(strata[j], half * (a + b), (b - a) / self.h, y)?;
            fx.push(gx);
            fp.push(gp);
        }
        Ok((0..m)
            .map(|i| {
                let prev = (i + m - 1) % m;
                self.h * half * (fx[i] + fx[prev]) + fp[prev] - fp[i]
            })
            .collect())
    }
}

fn colour_count(m: usize) -> usize {
    (3..=m).find(|c| m % c == 0).unwrap_or(m)
}

fn solve_curve<T: Scalar>(fam: &ConformalFamily<T>, side: Side, t: T, opts: &GeodesicOptions<T>) -> Result<(Vec<T>, usize)> {
    let m = opts.points;
    let lag = Lagrangian {
        fam,
        t,
        h: fam.base.ell / T::from_usize_lossy(m),
    };
    let seam = side.sign::<T>() * fam.base.half_height();
    let mut xs = vec![seam; m];
    let step = opts.fd_step.unwrap_or(T::lit(1e-4) * t);
    let colours = colour_count(m);
    let tol = T::tol(1e-12) * t;
    let two = T::lit(2.0);
    let mut last = T::infinity();
    for iter in 1..=opts.max_iterations {
        let strata = lag.midpoint_strata(&xs);
        let g = lag.gradient(&xs, &strata)?;
        let mut jac = Matrix::zeros(m, m);
        for colour in 0..colours {
            let mut plus = xs.clone();
            let mut minus = xs.clone();
            for j in (colour..m).step_by(colours) {
                plus[j] += step;
                minus[j] -= step;
            }
            let gp = lag.gradient(&plus, &strata)?;
            let gm = lag.gradient(&minus, &strata)?;
            for j in (colour..m).step_by(colours) {
                for i in [(j + m - 1) % m, j, (j + 1) % m] {
                    jac.set(i, j, (gp[i] - gm[i]) / (two * step));
                }
            }
        }
        let neg: Vec<T> = g.iter().map(|v| -*v).collect();
        let dx = Lu::factor(jac)?.solve(&neg);
        let size = dx.iter().fold(T::zero(), |a, v| a.max(v.abs()));
        for (x, d) in xs.iter_mut().zip(&dx) {
            *x += *d;
        }
        last = size;
        if size <= tol {
            return Ok((xs, iter));
        }
    }
    Err(Error::NonConvergence {
        what: "geodesic Newton iteration",
        iterations: opts.max_iterations,
        residual: last.to_f64_lossy(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{GlobalField, GraftedCollar};
    use crate::spectral::FourierSolution;
    use crate::variation::{global_field, solve_both};
    use num_complex::Complex;
    use std::f64::consts::PI;

    #[test]
    fn constant_scaling_leaves_seam_fixed() {
        let chart = GraftedCollar::new(2.0 * PI, 2.0, 1.0).unwrap();
        let fam = ConformalFamily::conformal(chart, GlobalField::constant(chart.ell, chart.s, 1.0));
        let opts = GeodesicOptions {
            points: 64,
            ..Default::default()
        };
        for side in Side::both() {
            let d = geodesic_oracle(&fam, side, 1e-3, &opts).unwrap();
            assert!(d.displacement.iter().all(|v| v.abs() < 1e-12));
        }
    }

    #[test]
    fn first_mode_displacement_matches_linearisation() {
        let chart = GraftedCollar::new(2.0 * PI, 2.0, 1.0).unwrap();
        let sol = FourierSolution::zero(chart.ell, chart.s, 1).with_mode(1, Complex::new(1.0, 0.0), Complex::new(0.0, 0.0));
        let (vl, vr) = solve_both(&sol, 0.0, 0.0).unwrap();
        let fam = ConformalFamily::conformal(chart, global_field(&sol, &vl, &vr).unwrap());
        let opts = GeodesicOptions::default();
        let d = geodesic_oracle(&fam, Side::Left, 1e-3, &opts).unwrap();
        let (rel, rel_x) = d.relative_error(&vl);
        assert!(rel < 1e-2, "{rel}");
        assert!(rel_x < rel, "{rel_x} vs {rel}");
    }
}
