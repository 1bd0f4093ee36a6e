//! Fourier-mode representation of harmonic fields on the flat cylinder
//! `[-s/2, s/2] × [0, ℓ)` and their seam traces.
//!
//! A field is stored by its non-negative modes only. Mode `n ≥ 1` carries a
//! pair `(c_n, d_n)`; the negative modes are implied by
//! `c_{-n} = conj(c_n)`, `d_{-n} = -conj(d_n)`, which makes every evaluation
//! real by construction:
//!
//! ```text
//! H(x, y) = c0·x + d0 + 2·Re Σ_{n≥1} (c_n cosh(k_n x) + d_n sinh(k_n x)) e^{i k_n y},
//! k_n = 2πn/ℓ.
//! ```

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;

/// Which seam circle: `x = -s/2` (left) or `x = +s/2` (right).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    /// `-1` on the left seam, `+1` on the right one.
    pub fn sign<T: Scalar>(self) -> T {
        match self {
            Side::Left => -T::one(),
            Side::Right => T::one(),
        }
    }

    pub fn both() -> [Side; 2] {
        [Side::Left, Side::Right]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceKind {
    Dirichlet,
    /// `∂ₓH` approached from the flat cylinder.
    NeumannFlat,
    /// `∂ₓH` approached from the hyperbolic strip.
    NeumannHyperbolic,
}

impl TraceKind {
    pub fn name(self) -> &'static str {
        match self {
            TraceKind::Dirichlet => "dirichlet",
            TraceKind::NeumannFlat => "neumann_flat",
            TraceKind::NeumannHyperbolic => "neumann_hyperbolic",
        }
    }
}

/// `2πn/ℓ`.
#[inline]
pub fn wavenumber<T: Scalar>(n: usize, ell: T) -> T {
    T::lit(2.0) * T::PI() * T::from_usize_lossy(n) / ell
}

/// Evaluates `mean + 2·Re Σ_{n≥1} modes[n-1]·e^{2πiny/ℓ}`.
pub fn real_series<T: Scalar>(mean: T, modes: &[Complex<T>], ell: T, y: T) -> T {
    let two = T::lit(2.0);
    let mut acc = mean;
    for (i, m) in modes.iter().enumerate() {
        let phase = wavenumber(i + 1, ell) * y;
        acc += two * (m.re * phase.cos() - m.im * phase.sin());
    }
    acc
}

/// Spectral solution of the flat-cylinder Laplace equation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    into = "FourierSolutionRepr<T>",
    try_from = "FourierSolutionRepr<T>",
    bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>")
)]
pub struct FourierSolution<T: Scalar> {
    pub ell: T,
    pub s: T,
    pub c0: T,
    pub d0: T,
    /// `modes[n-1] = (c_n, d_n)`.
    pub modes: Vec<(Complex<T>, Complex<T>)>,
}

impl<T: Scalar> FourierSolution<T> {
    pub fn zero(ell: T, s: T, truncation: usize) -> Self {
        let z = Complex::new(T::zero(), T::zero());
        Self {
            ell,
            s,
            c0: T::zero(),
            d0: T::zero(),
            modes: vec![(z, z); truncation],
        }
    }

    pub fn truncation(&self) -> usize {
        self.modes.len()
    }

    /// Sets mode `n ≥ 1`, growing the truncation if needed.
    pub fn with_mode(mut self, n: usize, c: Complex<T>, d: Complex<T>) -> Self {
        assert!(n >= 1, "mode index starts at 1");
        if self.modes.len() < n {
            self.modes.resize(n, (Complex::new(T::zero(), T::zero()), Complex::new(T::zero(), T::zero())));
        }
        self.modes[n - 1] = (c, d);
        self
    }

    pub fn with_constant(mut self, c0: T, d0: T) -> Self {
        self.c0 = c0;
        self.d0 = d0;
        self
    }

    /// `θ_n = πns/ℓ`, the half-height phase appearing in every seam formula.
    #[inline]
    pub fn theta(&self, n: usize) -> T {
        T::PI() * T::from_usize_lossy(n) * self.s / self.ell
    }

    fn check_x(&self, x: T) -> Result<()> {
        let half = self.s / T::lit(2.0);
        if x.abs() > half {
            return Err(Error::OutOfDomain {
                x: x.to_f64_lossy(),
                half_width: half.to_f64_lossy(),
            });
        }
        Ok(())
    }

    /// Value of the field at `(x, y)`; `y` is taken modulo `ℓ`.
    pub fn evaluate(&self, x: T, y: T) -> Result<T> {
        self.check_x(x)?;
        Ok(self.evaluate_unchecked(x, y))
    }

    /// Series value without the domain check (the formula extends analytically).
    pub fn evaluate_unchecked(&self, x: T, y: T) -> T {
        let two = T::lit(2.0);
        let mut acc = self.c0 * x + self.d0;
        for (i, (c, d)) in self.modes.iter().enumerate() {
            let k = wavenumber(i + 1, self.ell);
            let (ch, sh) = ((k * x).cosh(), (k * x).sinh());
            let a = c * ch + d * sh;
            let phase = k * y;
            acc += two * (a.re * phase.cos() - a.im * phase.sin());
        }
        acc
    }

    /// `∂ₓH` at `(x, y)` without the domain check.
    pub fn dx_unchecked(&self, x: T, y: T) -> T {
        let two = T::lit(2.0);
        let mut acc = self.c0;
        for (i, (c, d)) in self.modes.iter().enumerate() {
            let k = wavenumber(i + 1, self.ell);
            let (ch, sh) = ((k * x).cosh(), (k * x).sinh());
            let a = (c * sh + d * ch) * k;
            let phase = k * y;
            acc += two * (a.re * phase.cos() - a.im * phase.sin());
        }
        acc
    }

    /// Seam values, `H|_{x=∓s/2}`.
    pub fn dirichlet_trace(&self, side: Side) -> TraceModes<T> {
        let sign: T = side.sign();
        let half = self.s / T::lit(2.0);
        let modes = self
            .modes
            .iter()
            .enumerate()
            .map(|(i, (c, d))| {
                let th = self.theta(i + 1);
                c * th.cosh() + d * (sign * th.sinh())
            })
            .collect();
        TraceModes {
            side,
            kind: TraceKind::Dirichlet,
            ell: self.ell,
            mean: sign * self.c0 * half + self.d0,
            modes,
        }
    }

    /// `∂ₓH` at the seam, approached from inside the cylinder.
    pub fn neumann_trace_flat(&self, side: Side) -> TraceModes<T> {
        let sign: T = side.sign();
        let modes = self
            .modes
            .iter()
            .enumerate()
            .map(|(i, (c, d))| {
                let th = self.theta(i + 1);
                let k = wavenumber(i + 1, self.ell);
                (c * (sign * th.sinh()) + d * th.cosh()) * k
            })
            .collect();
        TraceModes {
            side,
            kind: TraceKind::NeumannFlat,
            ell: self.ell,
            mean: self.c0,
            modes,
        }
    }

    /// Recovers the unique cylinder solution with the given seam values.
    ///
    /// Mode by mode this inverts `c cosh θ ∓ d sinh θ`, a 2×2 system with
    /// determinant `2 cosh θ sinh θ`, singular exactly when `s = 0`.
    pub fn from_boundary_data(left: &TraceModes<T>, right: &TraceModes<T>, ell: T, s: T) -> Result<Self> {
        for t in [left, right] {
            if t.kind != TraceKind::Dirichlet {
                return Err(Error::TraceKind {
                    expected: "dirichlet",
                    found: t.kind.name(),
                });
            }
        }
        if left.modes.len() != right.modes.len() {
            return Err(Error::MismatchedTruncation {
                left: left.modes.len(),
                right: right.modes.len(),
            });
        }
        if !(ell > T::zero()) || s < T::zero() {
            return Err(invalid("ell/s", "need ell > 0 and s >= 0"));
        }
        let two = T::lit(2.0);
        let d0 = (left.mean + right.mean) / two;
        let c0 = if s > T::zero() {
            (right.mean - left.mean) / s
        } else if left.mean == right.mean {
            T::zero()
        } else {
            return Err(Error::SingularSystem("s = 0 with distinct seam means".into()));
        };
        let mut out = Self::zero(ell, s, left.modes.len()).with_constant(c0, d0);
        for n in 1..=left.modes.len() {
            let (l, r) = (left.modes[n - 1], right.modes[n - 1]);
            let th = out.theta(n);
            let det = two * th.cosh() * th.sinh();
            if det == T::zero() {
                if l.norm_sqr() == T::zero() && r.norm_sqr() == T::zero() {
                    continue;
                }
                return Err(Error::SingularSystem(format!(
                    "mode {n}: determinant 2·cosh·sinh vanishes at s = 0"
                )));
            }
            let c = (l + r) / (two * th.cosh());
            let d = (r - l) / (two * th.sinh());
            out.modes[n - 1] = (c, d);
        }
        Ok(out)
    }

    /// Maximum discrete Laplacian of the field over an interior grid of
    /// spacing `h`; see [`harmonicity_residual_of`].
    pub fn harmonicity_residual(&self, h: T, stencil: Stencil) -> T {
        harmonicity_residual_of(|x, y| self.evaluate_unchecked(x, y), self.ell, self.s, h, stencil)
    }
}

/// Discrete Laplacian used by the harmonicity check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stencil {
    /// Standard 5-point stencil; truncation `h²/12·(∂⁴ₓ + ∂⁴ᵧ)`.
    FivePoint,
    /// Compact 9-point stencil; on harmonic fields the error is `O(h⁶)`.
    NinePoint,
}

/// `max |Δ_h f|` over grid points `x = -s/2 + i·h` with the whole stencil
/// inside the cylinder and `y = j·h ∈ [0, ℓ)`.
pub fn harmonicity_residual_of<T: Scalar, F: Fn(T, T) -> T>(f: F, ell: T, s: T, h: T, stencil: Stencil) -> T {
    let half = s / T::lit(2.0);
    let h2 = h * h;
    let mut worst = T::zero();
    let mut i = 1usize;
    loop {
        let x = -half + h * T::from_usize_lossy(i);
        if x + h > half + h * T::lit(1e-9) {
            break;
        }
        let mut j = 0usize;
        loop {
            let y = h * T::from_usize_lossy(j);
            if y >= ell {
                break;
            }
            let c = f(x, y);
            let side = f(x + h, y) + f(x - h, y) + f(x, y + h) + f(x, y - h);
            let lap = match stencil {
                Stencil::FivePoint => (side - T::lit(4.0) * c) / h2,
                Stencil::NinePoint => {
                    let corner = f(x + h, y + h) + f(x + h, y - h) + f(x - h, y + h) + f(x - h, y - h);
                    (T::lit(4.0) * side + corner - T::lit(20.0) * c) / (T::lit(6.0) * h2)
                }
            };
            worst = worst.max(lap.abs());
            j += 1;
        }
        i += 1;
    }
    worst
}

/// Fourier data of a real function of `y` on one seam circle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct TraceModes<T: Scalar> {
    pub side: Side,
    pub kind: TraceKind,
    pub ell: T,
    pub mean: T,
    /// `modes[n-1]` is the coefficient of `e^{2πiny/ℓ}`; `-n` is its conjugate.
    pub modes: Vec<Complex<T>>,
}

impl<T: Scalar> TraceModes<T> {
    pub fn eval(&self, y: T) -> T {
        real_series(self.mean, &self.modes, self.ell, y)
    }

    /// `order`-th derivative in `y`.
    pub fn derivative(&self, y: T, order: u32) -> T {
        if order == 0 {
            return self.eval(y);
        }
        let i = Complex::new(T::zero(), T::one());
        let modes: Vec<_> = self
            .modes
            .iter()
            .enumerate()
            .map(|(j, m)| m * (i * wavenumber(j + 1, self.ell)).powu(order))
            .collect();
        real_series(T::zero(), &modes, self.ell, y)
    }

    /// `∫₀^ℓ f² dy = ℓ(mean² + 2Σ|m_n|²)`.
    pub fn parseval(&self) -> T {
        let two = T::lit(2.0);
        self.ell * (self.mean * self.mean + two * self.modes.iter().map(|m| m.norm_sqr()).sum::<T>())
    }

    /// The trace of `f(y - y0)`.
    pub fn rotated(&self, y0: T) -> Self {
        let modes = self
            .modes
            .iter()
            .enumerate()
            .map(|(j, m)| m * Complex::from_polar(T::one(), -wavenumber(j + 1, self.ell) * y0))
            .collect();
        Self {
            modes,
            ..self.clone()
        }
    }

    pub fn truncation(&self) -> usize {
        self.modes.len()
    }
}

#[derive(Serialize, Deserialize)]
struct ModeRepr<T> {
    n: usize,
    c_re: T,
    c_im: T,
    d_re: T,
    d_im: T,
}

#[derive(Serialize, Deserialize)]
struct FourierSolutionRepr<T> {
    ell: T,
    s: T,
    c0: T,
    d0: T,
    modes: Vec<ModeRepr<T>>,
}

impl<T: Scalar> From<FourierSolution<T>> for FourierSolutionRepr<T> {
    fn from(v: FourierSolution<T>) -> Self {
        Self {
            ell: v.ell,
            s: v.s,
            c0: v.c0,
            d0: v.d0,
            modes: v
                .modes
                .iter()
                .enumerate()
                .map(|(i, (c, d))| ModeRepr {
                    n: i + 1,
                    c_re: c.re,
                    c_im: c.im,
                    d_re: d.re,
                    d_im: d.im,
                })
                .collect(),
        }
    }
}

impl<T: Scalar> TryFrom<FourierSolutionRepr<T>> for FourierSolution<T> {
    type Error = String;

    fn try_from(r: FourierSolutionRepr<T>) -> Result<Self, String> {
        let truncation = r.modes.iter().map(|m| m.n).max().unwrap_or(0);
        let mut out = FourierSolution::zero(r.ell, r.s, truncation).with_constant(r.c0, r.d0);
        for m in r.modes {
            if m.n == 0 {
                return Err("mode index 0 belongs in c0/d0".into());
            }
            out.modes[m.n - 1] = (Complex::new(m.c_re, m.c_im), Complex::new(m.d_re, m.d_im));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn constant_field_is_constant() {
        let sol = FourierSolution::zero(2.0 * PI, 2.0, 4).with_constant(0.0, 3.0);
        for &(x, y) in &[(0.0, 0.0), (-1.0, 1.3), (0.7, 5.9)] {
            assert_eq!(sol.evaluate(x, y).unwrap(), 3.0);
        }
    }

    #[test]
    fn first_mode_pair_sums_to_two_at_origin() {
        let sol = FourierSolution::zero(2.0 * PI, 2.0, 1).with_mode(1, c(1.0, 0.0), c(0.0, 0.0));
        assert!((sol.evaluate(0.0, 0.0).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn evaluation_outside_cylinder_is_rejected() {
        let sol = FourierSolution::zero(1.0, 2.0, 1);
        assert!(matches!(sol.evaluate(1.5, 0.0), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn dirichlet_trace_examples() {
        let sol = FourierSolution::zero(2.0 * PI, 2.0, 1).with_mode(1, c(1.0, 0.0), c(0.0, 0.0));
        let left = sol.dirichlet_trace(Side::Left);
        assert!((left.modes[0] - c(1.0_f64.cosh(), 0.0)).norm() < 1e-15);

        let sol = FourierSolution::zero(2.0 * PI, 2.0, 0).with_constant(2.0, 0.0);
        assert_eq!(sol.dirichlet_trace(Side::Left).mean, -2.0);
        assert_eq!(sol.dirichlet_trace(Side::Right).mean, 2.0);

        let sol = FourierSolution::zero(3.0, 1.0, 0).with_constant(0.0, 1.0);
        assert_eq!(sol.dirichlet_trace(Side::Left).mean, 1.0);
        assert_eq!(sol.dirichlet_trace(Side::Right).mean, 1.0);
    }

    #[test]
    fn neumann_trace_examples() {
        let sol = FourierSolution::zero(2.0 * PI, 2.0, 2).with_constant(0.0, 5.0);
        let t = sol.neumann_trace_flat(Side::Right);
        assert_eq!(t.mean, 0.0);
        assert!(t.modes.iter().all(|m| m.norm() == 0.0));

        let sol = FourierSolution::zero(2.0 * PI, 2.0, 1).with_mode(1, c(1.0, 0.0), c(0.0, 0.0));
        let t = sol.neumann_trace_flat(Side::Left);
        assert!((t.modes[0] - c(-(1.0_f64.sinh()), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn neumann_trace_matches_one_sided_difference() {
        let sol = FourierSolution::zero(3.0, 1.5, 2)
            .with_constant(0.4, -0.2)
            .with_mode(1, c(0.3, -0.1), c(0.2, 0.5))
            .with_mode(2, c(-0.1, 0.05), c(0.07, 0.0));
        let h = 1e-6;
        for side in Side::both() {
            let tr = sol.neumann_trace_flat(side);
            let xs = side.sign::<f64>() * 0.75;
            for &y in &[0.0, 0.4, 1.9] {
                let inner = xs - side.sign::<f64>() * h;
                let fd = side.sign::<f64>() * (sol.evaluate(xs, y).unwrap() - sol.evaluate(inner, y).unwrap()) / h;
                assert!((fd - tr.eval(y)).abs() < 1e-4, "{side:?} {y}: {fd} vs {}", tr.eval(y));
            }
        }
    }

    #[test]
    fn boundary_data_round_trip_and_singular_case() {
        let sol = FourierSolution::zero(2.5, 1.2, 3)
            .with_constant(0.3, 0.8)
            .with_mode(1, c(0.5, 0.1), c(-0.2, 0.3))
            .with_mode(3, c(0.01, -0.02), c(0.03, 0.0));
        let back = FourierSolution::from_boundary_data(
            &sol.dirichlet_trace(Side::Left),
            &sol.dirichlet_trace(Side::Right),
            sol.ell,
            sol.s,
        )
        .unwrap();
        assert!((back.c0 - sol.c0).abs() < 1e-14 && (back.d0 - sol.d0).abs() < 1e-15);
        for (a, b) in back.modes.iter().zip(&sol.modes) {
            assert!((a.0 - b.0).norm() < 1e-14 && (a.1 - b.1).norm() < 1e-14);
        }

        let flat = FourierSolution::zero(1.0, 0.0, 1).with_constant(0.0, 2.0);
        let same = FourierSolution::from_boundary_data(
            &flat.dirichlet_trace(Side::Left),
            &flat.dirichlet_trace(Side::Right),
            1.0,
            0.0,
        )
        .unwrap();
        assert_eq!(same.c0, 0.0);

        let mut l = flat.dirichlet_trace(Side::Left);
        let mut r = flat.dirichlet_trace(Side::Right);
        l.modes[0] = c(1.0, 0.0);
        r.modes[0] = c(0.5, 0.0);
        assert!(matches!(
            FourierSolution::from_boundary_data(&l, &r, 1.0, 0.0),
            Err(Error::SingularSystem(_))
        ));
    }

    #[test]
    fn harmonicity_examples() {
        let ell = 2.0 * PI;
        let constant = FourierSolution::zero(ell, 2.0, 0).with_constant(0.0, 1.7);
        assert!(constant.harmonicity_residual(ell / 64.0, Stencil::FivePoint) < 1e-12);

        let sol = FourierSolution::zero(ell, 1.0, 3).with_mode(3, c(0.4, -0.2), c(0.1, 0.3));
        let h = ell / 256.0;
        let nine = sol.harmonicity_residual(h, Stencil::NinePoint);
        assert!(nine < 1e-6, "nine-point residual {nine}");

        let five = sol.harmonicity_residual(h, Stencil::FivePoint);
        let five_half = sol.harmonicity_residual(h / 2.0, Stencil::FivePoint);
        let ratio = five / five_half;
        assert!((ratio - 4.0).abs() < 0.25, "second-order stencil, ratio {ratio}");

        let bumped = harmonicity_residual_of(
            |x, y| sol.evaluate_unchecked(x, y) + x * x,
            ell,
            1.0,
            h,
            Stencil::FivePoint,
        );
        assert!((bumped - 2.0).abs() < 0.05, "{bumped}");
    }

    #[test]
    fn json_shape() {
        let sol = FourierSolution::zero(2.0, 1.0, 1)
            .with_constant(0.1, 0.2)
            .with_mode(1, c(0.3, 0.4), c(0.5, 0.6));
        let v: serde_json::Value = serde_json::to_value(&sol).unwrap();
        assert_eq!(v["modes"][0]["n"], 1);
        assert_eq!(v["modes"][0]["d_im"], 0.6);
        let back: FourierSolution<f64> = serde_json::from_value(v).unwrap();
        assert_eq!(back, sol);
    }
}
