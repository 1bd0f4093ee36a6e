//! Normal variation of the seam geodesics under a conformal (or amended,
//! quasi-conformal) deformation of the collar metric.
//!
//! On either seam the displacement `V(y)`, measured positive towards `+x`,
//! solves
//!
//! ```text
//! V_yy = -½ (∂ₓH)₀                      flat side
//! V_yy - V = -½ (∂ₓH)₋₁                 hyperbolic side
//! W_yy = -½ (∂ₓH)₀ + ∂_y Im φ           amended, flat side
//! ```
//!
//! Mode by mode these are algebraic. The flat equation is only solvable when
//! the forcing has zero mean, i.e. when `c₀ = 0`.

pub mod collocation;
pub mod geodesic;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::GlobalField;
use crate::scalar::Scalar;
use crate::spectral::{real_series, wavenumber, FourierSolution, Side, Stencil, TraceKind, TraceModes};

/// Seam displacement `V₋`/`V₊` (or `W` when amended).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct VariationField<T: Scalar> {
    pub side: Side,
    pub ell: T,
    /// `λ₀` (left) or `ρ₀` (right).
    pub mean: T,
    /// `λ_n`/`ρ_n`, or the starred coefficients when `amended`.
    pub modes: Vec<Complex<T>>,
    pub amended: bool,
}

impl<T: Scalar> VariationField<T> {
    pub fn eval(&self, y: T) -> T {
        real_series(self.mean, &self.modes, self.ell, y)
    }

    pub fn as_trace(&self) -> TraceModes<T> {
        TraceModes {
            side: self.side,
            kind: TraceKind::Dirichlet,
            ell: self.ell,
            mean: self.mean,
            modes: self.modes.clone(),
        }
    }

    pub fn with_mean(mut self, mean: T) -> Self {
        self.mean = mean;
        self
    }

    /// Largest per-mode residual of `V_yy = f` against a forcing trace `f`.
    pub fn residual_against(&self, forcing: &TraceModes<T>) -> T {
        let mut worst = forcing.mean.abs();
        for (j, (v, f)) in self.modes.iter().zip(&forcing.modes).enumerate() {
            let k = wavenumber(j + 1, self.ell);
            worst = worst.max((-v * (k * k) - f).norm());
        }
        worst
    }
}

/// Fourier data of `Im φ`, the harmonic function attached to the
/// infinitesimal Hopf differential:
///
/// ```text
/// Im φ = u₀x + v₀ + 2·Re Σ_{n≥1} (u_n cosh(k_n x) + v_n sinh(k_n x)) e^{i k_n y}
/// ```
///
/// with `u_{-n} = conj(u_n)`, `v_{-n} = -conj(v_n)`. The harmonic conjugate
/// is fixed with zero additive constant on the branch `y ∈ [0, ℓ)`:
///
/// ```text
/// Re φ = -u₀y + 2·Re Σ_{n≥1} i(u_n sinh(k_n x) + v_n cosh(k_n x)) e^{i k_n y}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct QuadDiffModes<T: Scalar> {
    pub ell: T,
    pub s: T,
    pub u0: T,
    pub v0: T,
    /// `modes[n-1] = (u_n, v_n)`.
    pub modes: Vec<(Complex<T>, Complex<T>)>,
}

impl<T: Scalar> QuadDiffModes<T> {
    pub fn zero(ell: T, s: T, truncation: usize) -> Self {
        let z = Complex::new(T::zero(), T::zero());
        Self {
            ell,
            s,
            u0: T::zero(),
            v0: T::zero(),
            modes: vec![(z, z); truncation],
        }
    }

    pub fn with_mode(mut self, n: usize, u: Complex<T>, v: Complex<T>) -> Self {
        assert!(n >= 1, "mode index starts at 1");
        if self.modes.len() < n {
            let z = Complex::new(T::zero(), T::zero());
            self.modes.resize(n, (z, z));
        }
        self.modes[n - 1] = (u, v);
        self
    }

    pub fn with_constant(mut self, u0: T, v0: T) -> Self {
        self.u0 = u0;
        self.v0 = v0;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.u0 == T::zero()
            && self.v0 == T::zero()
            && self.modes.iter().all(|(u, v)| u.norm_sqr() == T::zero() && v.norm_sqr() == T::zero())
    }

    /// Every coefficient multiplied by `eps`.
    pub fn scaled(&self, eps: T) -> Self {
        Self {
            u0: self.u0 * eps,
            v0: self.v0 * eps,
            modes: self.modes.iter().map(|(u, v)| (u * eps, v * eps)).collect(),
            ..self.clone()
        }
    }

    /// Coefficient norm `(u₀² + v₀² + 2Σ(|u_n|² + |v_n|²))^{1/2}`, used as
    /// the size `‖Φ̇‖` of the deformation.
    pub fn norm(&self) -> T {
        let two = T::lit(2.0);
        let modes: T = self.modes.iter().map(|(u, v)| u.norm_sqr() + v.norm_sqr()).sum();
        (self.u0 * self.u0 + self.v0 * self.v0 + two * modes).sqrt()
    }

    fn theta(&self, n: usize) -> T {
        T::PI() * T::from_usize_lossy(n) * self.s / self.ell
    }

    pub fn im_phi(&self, x: T, y: T) -> T {
        let two = T::lit(2.0);
        let mut acc = self.u0 * x + self.v0;
        for (j, (u, v)) in self.modes.iter().enumerate() {
            let k = wavenumber(j + 1, self.ell);
            let a = u * (k * x).cosh() + v * (k * x).sinh();
            let p = k * y;
            acc += two * (a.re * p.cos() - a.im * p.sin());
        }
        acc
    }

    pub fn re_phi(&self, x: T, y: T) -> T {
        let two = T::lit(2.0);
        let i = Complex::new(T::zero(), T::one());
        let mut acc = -self.u0 * y;
        for (j, (u, v)) in self.modes.iter().enumerate() {
            let k = wavenumber(j + 1, self.ell);
            let a = (u * (k * x).sinh() + v * (k * x).cosh()) * i;
            let p = k * y;
            acc += two * (a.re * p.cos() - a.im * p.sin());
        }
        acc
    }

    /// `Im φ` on a seam: mean `∓u₀s/2 + v₀`, modes `u_n cosh θ ∓ v_n sinh θ`.
    pub fn im_phi_trace(&self, side: Side) -> TraceModes<T> {
        let sign: T = side.sign();
        let modes = self
            .modes
            .iter()
            .enumerate()
            .map(|(j, (u, v))| {
                let th = self.theta(j + 1);
                u * th.cosh() + v * (sign * th.sinh())
            })
            .collect();
        TraceModes {
            side,
            kind: TraceKind::Dirichlet,
            ell: self.ell,
            mean: sign * self.u0 * self.s / T::lit(2.0) + self.v0,
            modes,
        }
    }

    /// Same stencil check as for the cylinder solutions.
    pub fn harmonicity_residual(&self, h: T, stencil: Stencil) -> T {
        crate::spectral::harmonicity_residual_of(|x, y| self.im_phi(x, y), self.ell, self.s, h, stencil)
    }
}

fn require_kind<T: Scalar>(t: &TraceModes<T>, kind: TraceKind) -> Result<()> {
    if t.kind != kind {
        return Err(Error::TraceKind {
            expected: kind.name(),
            found: t.kind.name(),
        });
    }
    Ok(())
}

/// Solves `V_yy = -½(∂ₓH)₀` on the seam of `flat_neumann`.
///
/// Mode `n`: `λ_n = (∂ₓH)₀,n / (2k_n²)`. The mean of the solution is free and
/// set to `mean_value`. A nonzero forcing mean (`c₀ ≠ 0`) has no periodic
/// solution.
pub fn solve_flat_variation<T: Scalar>(flat_neumann: &TraceModes<T>, mean_value: T) -> Result<VariationField<T>> {
    require_kind(flat_neumann, TraceKind::NeumannFlat)?;
    if flat_neumann.mean != T::zero() {
        return Err(Error::NoPeriodicSolution {
            mean: flat_neumann.mean.to_f64_lossy(),
        });
    }
    let two = T::lit(2.0);
    let modes = flat_neumann
        .modes
        .iter()
        .enumerate()
        .map(|(j, f)| {
            let k = wavenumber(j + 1, flat_neumann.ell);
            f / (two * k * k)
        })
        .collect();
    Ok(VariationField {
        side: flat_neumann.side,
        ell: flat_neumann.ell,
        mean: mean_value,
        modes,
        amended: false,
    })
}

/// `(∂ₓH)₋₁ = -2(V_yy - V)`: mean `2λ₀`, mode `2(1 + k_n²)λ_n`.
pub fn hyperbolic_neumann<T: Scalar>(v: &VariationField<T>) -> Result<TraceModes<T>> {
    if v.amended {
        return Err(Error::Amendment {
            expected: "unamended",
            found: "amended",
        });
    }
    Ok(neumann_from_displacement(v))
}

fn neumann_from_displacement<T: Scalar>(v: &VariationField<T>) -> TraceModes<T> {
    let two = T::lit(2.0);
    let modes = v
        .modes
        .iter()
        .enumerate()
        .map(|(j, m)| {
            let k = wavenumber(j + 1, v.ell);
            m * (two * (T::one() + k * k))
        })
        .collect();
    TraceModes {
        side: v.side,
        kind: TraceKind::NeumannHyperbolic,
        ell: v.ell,
        mean: two * v.mean,
        modes,
    }
}

/// Coefficient form of the hyperbolic-side Neumann data:
/// mode `((4π²n² + ℓ²)/(2πnℓ))·(∓c_n sinh θ + d_n cosh θ)`, mean `2·mean_value`.
pub fn hyperbolic_neumann_explicit<T: Scalar>(sol: &FourierSolution<T>, side: Side, mean_value: T) -> TraceModes<T> {
    let sign: T = side.sign();
    let (pi, ell) = (T::PI(), sol.ell);
    let modes = sol
        .modes
        .iter()
        .enumerate()
        .map(|(j, (c, d))| {
            let n = T::from_usize_lossy(j + 1);
            let th = sol.theta(j + 1);
            let big = T::lit(4.0) * pi * pi * n * n + ell * ell;
            (c * (sign * th.sinh()) + d * th.cosh()) * (big / (T::lit(2.0) * pi * n * ell))
        })
        .collect();
    TraceModes {
        side,
        kind: TraceKind::NeumannHyperbolic,
        ell,
        mean: T::lit(2.0) * mean_value,
        modes,
    }
}

/// Solves `W_yy = -½(∂ₓH)₀ + ∂_y Im φ` on the seam of `flat_neumann`.
///
/// Mode `n`: `λ*_n = λ_n + (ℓ/2πin)(u_n cosh θ ∓ v_n sinh θ)`. The forcing
/// mean is `-c₀/2` (the `Im φ` term is a derivative), so the same
/// solvability condition applies.
pub fn solve_amended_variation<T: Scalar>(
    flat_neumann: &TraceModes<T>,
    q: &QuadDiffModes<T>,
    mean_value: T,
) -> Result<VariationField<T>> {
    let mut w = solve_flat_variation(flat_neumann, mean_value)?;
    if flat_neumann.modes.len() != q.modes.len() {
        return Err(Error::MismatchedTruncation {
            left: flat_neumann.modes.len(),
            right: q.modes.len(),
        });
    }
    let trace = q.im_phi_trace(flat_neumann.side);
    let i = Complex::new(T::zero(), T::one());
    for (j, (m, im)) in w.modes.iter_mut().zip(&trace.modes).enumerate() {
        let k = wavenumber(j + 1, flat_neumann.ell);
        *m += im / (i * k);
    }
    w.amended = true;
    Ok(w)
}

/// `(∂ₓH)₋₁` for the amended field: mean `2λ₀`, mode `2(1 + k_n²)λ*_n`.
pub fn extended_hyperbolic_neumann<T: Scalar>(w: &VariationField<T>) -> Result<TraceModes<T>> {
    if !w.amended {
        return Err(Error::Amendment {
            expected: "amended",
            found: "unamended",
        });
    }
    Ok(neumann_from_displacement(w))
}

/// Coefficient form of the amended Neumann data: mode
/// `(4π²n² + ℓ²)·[(∓c_n sinh θ + d_n cosh θ)/(2πnℓ) + (u_n cosh θ ∓ v_n sinh θ)/(πinℓ)]`.
pub fn extended_hyperbolic_neumann_explicit<T: Scalar>(
    sol: &FourierSolution<T>,
    q: &QuadDiffModes<T>,
    side: Side,
    mean_value: T,
) -> TraceModes<T> {
    let mut out = hyperbolic_neumann_explicit(sol, side, mean_value);
    let sign: T = side.sign();
    let (pi, ell) = (T::PI(), sol.ell);
    for (j, (m, (u, v))) in out.modes.iter_mut().zip(&q.modes).enumerate() {
        let n = T::from_usize_lossy(j + 1);
        let th = sol.theta(j + 1);
        let big = T::lit(4.0) * pi * pi * n * n + ell * ell;
        let denom = Complex::new(T::zero(), pi * n * ell);
        *m += (u * th.cosh() + v * (sign * th.sinh())) * big / denom;
    }
    out
}

/// Coefficient form of the seam displacement:
/// `λ_n, ρ_n = (ℓ/4πn)(∓c_n sinh θ + d_n cosh θ)`. Fails when `c₀ ≠ 0`.
pub fn flat_variation_explicit<T: Scalar>(sol: &FourierSolution<T>, side: Side, mean_value: T) -> Result<VariationField<T>> {
    if sol.c0 != T::zero() {
        return Err(Error::NoPeriodicSolution {
            mean: sol.c0.to_f64_lossy(),
        });
    }
    let sign: T = side.sign();
    let modes = sol
        .modes
        .iter()
        .enumerate()
        .map(|(j, (c, d))| {
            let th = sol.theta(j + 1);
            let factor = sol.ell / (T::lit(4.0) * T::PI() * T::from_usize_lossy(j + 1));
            (c * (sign * th.sinh()) + d * th.cosh()) * factor
        })
        .collect();
    Ok(VariationField {
        side,
        ell: sol.ell,
        mean: mean_value,
        modes,
        amended: false,
    })
}

/// Coefficient form of the amended displacement:
/// `λ*_n, ρ*_n = λ_n, ρ_n + (ℓ/2πin)(u_n cosh θ ∓ v_n sinh θ)`.
pub fn amended_variation_explicit<T: Scalar>(
    sol: &FourierSolution<T>,
    q: &QuadDiffModes<T>,
    side: Side,
    mean_value: T,
) -> Result<VariationField<T>> {
    let mut w = flat_variation_explicit(sol, side, mean_value)?;
    if q.modes.len() != sol.modes.len() {
        return Err(Error::MismatchedTruncation {
            left: sol.modes.len(),
            right: q.modes.len(),
        });
    }
    let sign: T = side.sign();
    for (j, (m, (u, v))) in w.modes.iter_mut().zip(&q.modes).enumerate() {
        let th = sol.theta(j + 1);
        let denom = Complex::new(T::zero(), T::lit(2.0) * T::PI() * T::from_usize_lossy(j + 1));
        *m += (u * th.cosh() + v * (sign * th.sinh())) * sol.ell / denom;
    }
    w.amended = true;
    Ok(w)
}

/// Mean of the displacement forced by the hyperbolic-side equation alone:
/// averaging `V_yy - V = -½(∂ₓH)₋₁` gives `λ₀ = ½·mean((∂ₓH)₋₁)`.
pub fn mean_from_hyperbolic_neumann<T: Scalar>(neumann: &TraceModes<T>) -> Result<T> {
    require_kind(neumann, TraceKind::NeumannHyperbolic)?;
    Ok(neumann.mean / T::lit(2.0))
}

/// Global conformal factor whose hyperbolic-side jets carry the Neumann data
/// produced by the two seam variations.
pub fn global_field<T: Scalar>(
    sol: &FourierSolution<T>,
    v_left: &VariationField<T>,
    v_right: &VariationField<T>,
) -> Result<GlobalField<T>> {
    if v_left.side != Side::Left || v_right.side != Side::Right {
        return Err(invalid("variation", "expected (left, right) fields"));
    }
    GlobalField::with_seam_jets(sol.clone(), hyperbolic_neumann(v_left)?, hyperbolic_neumann(v_right)?)
}

/// Both seam variations of `sol` with the given means.
pub fn solve_both<T: Scalar>(
    sol: &FourierSolution<T>,
    lambda0: T,
    rho0: T,
) -> Result<(VariationField<T>, VariationField<T>)> {
    Ok((
        solve_flat_variation(&sol.neumann_trace_flat(Side::Left), lambda0)?,
        solve_flat_variation(&sol.neumann_trace_flat(Side::Right), rho0)?,
    ))
}

/// Amended variations of `sol` on both seams.
pub fn solve_both_amended<T: Scalar>(
    sol: &FourierSolution<T>,
    q: &QuadDiffModes<T>,
    lambda0: T,
    rho0: T,
) -> Result<(VariationField<T>, VariationField<T>)> {
    Ok((
        solve_amended_variation(&sol.neumann_trace_flat(Side::Left), q, lambda0)?,
        solve_amended_variation(&sol.neumann_trace_flat(Side::Right), q, rho0)?,
    ))
}
