//! The model grafted collar: a flat cylinder of height `s` and circumference
//! `ℓ`, glued along its two boundary circles to hyperbolic Fermi strips of
//! half-width `a`.
//!
//! Coordinates are `x` (longitudinal, `|x| ≤ s/2 + a`) and `y ∈ [0, ℓ)`
//! (around the core). The metric is `dx² + G(x)² dy²` with
//!
//! ```text
//! G(x) = 1                    |x| ≤ s/2
//! G(x) = cosh(|x| - s/2)      s/2 ≤ |x| ≤ s/2 + a
//! ```
//!
//! so `G` and `G'` are continuous across the seams while `G''` jumps by one.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::quad::simpson;
use crate::scalar::{gudermannian, Scalar};
use crate::spectral::{FourierSolution, Side, TraceKind, TraceModes};
use crate::variation::QuadDiffModes;

/// Self-adjoint condition imposed on the outer circles `|x| = s/2 + a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OuterBc {
    #[default]
    Dirichlet,
    Neumann,
}

impl std::str::FromStr for OuterBc {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dirichlet" | "dirichlet-zero" => Ok(OuterBc::Dirichlet),
            "neumann" | "neumann-zero" => Ok(OuterBc::Neumann),
            other => Err(invalid("outer_bc", format!("unknown condition {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct GraftedCollar<T: Scalar> {
    pub ell: T,
    pub s: T,
    pub a: T,
    #[serde(default)]
    pub outer_bc: OuterBc,
}

/// One-sided limits at a point: from smaller `x` and from larger `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneSided<T> {
    pub below: T,
    pub above: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricCoefficient<T> {
    pub g: T,
    pub dg: T,
    pub d2g: OneSided<T>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stratum {
    Flat,
    Hyperbolic(Side),
}

impl<T: Scalar> GraftedCollar<T> {
    pub fn new(ell: T, s: T, a: T) -> Result<Self> {
        Self {
            ell,
            s,
            a,
            outer_bc: OuterBc::Dirichlet,
        }
        .validated()
    }

    pub fn with_outer_bc(mut self, bc: OuterBc) -> Self {
        self.outer_bc = bc;
        self
    }

    pub fn validated(self) -> Result<Self> {
        if !(self.ell > T::zero()) || !self.ell.is_finite() {
            return Err(invalid("ell", "must be finite and > 0"));
        }
        if !(self.s >= T::zero()) || !self.s.is_finite() {
            return Err(invalid("s", "must be finite and >= 0"));
        }
        if !(self.a > T::zero()) || !self.a.is_finite() {
            return Err(invalid("a", "must be finite and > 0"));
        }
        Ok(self)
    }

    pub fn half_height(&self) -> T {
        self.s / T::lit(2.0)
    }

    /// Outer edge `s/2 + a`.
    pub fn half_width(&self) -> T {
        self.half_height() + self.a
    }

    pub fn stratum(&self, x: T) -> Stratum {
        if x < -self.half_height() {
            Stratum::Hyperbolic(Side::Left)
        } else if x > self.half_height() {
            Stratum::Hyperbolic(Side::Right)
        } else {
            Stratum::Flat
        }
    }

    fn check(&self, x: T) -> Result<()> {
        if x.abs() > self.half_width() || x.is_nan() {
            return Err(Error::OutOfDomain {
                x: x.to_f64_lossy(),
                half_width: self.half_width().to_f64_lossy(),
            });
        }
        Ok(())
    }

    /// `G`, `G'` and the one-sided values of `G''` at `x`.
    pub fn metric_coefficient(&self, x: T) -> Result<MetricCoefficient<T>> {
        self.check(x)?;
        Ok(self.metric_coefficient_unchecked(x))
    }

    pub(crate) fn metric_coefficient_unchecked(&self, x: T) -> MetricCoefficient<T> {
        let h = self.half_height();
        let u = x.abs() - h;
        let (g, dg) = if u > T::zero() {
            (u.cosh(), x.signum() * u.sinh())
        } else {
            (T::one(), T::zero())
        };
        let inner = |side_x: T| -> T {
            // G'' just on the given side of x: flat (0) or hyperbolic (cosh).
            if side_x.abs() > h {
                (side_x.abs() - h).cosh()
            } else {
                T::zero()
            }
        };
        let d2g = if x.abs() == h {
            let below = if x < T::zero() || h == T::zero() { u.max(T::zero()).cosh() } else { T::zero() };
            let above = if x > T::zero() || h == T::zero() { u.max(T::zero()).cosh() } else { T::zero() };
            OneSided { below, above }
        } else {
            let v = inner(x);
            OneSided { below: v, above: v }
        };
        MetricCoefficient { g, dg, d2g }
    }

    /// `K = -G''/G`; undefined on the seams.
    pub fn gauss_curvature(&self, x: T) -> Result<T> {
        self.check(x)?;
        if x.abs() == self.half_height() {
            return Err(Error::Seam { x: x.to_f64_lossy() });
        }
        let m = self.metric_coefficient_unchecked(x);
        Ok(-m.d2g.below / m.g)
    }

    /// `2ℓ sinh a + ℓ s`.
    pub fn total_area(&self) -> T {
        T::lit(2.0) * self.ell * self.a.sinh() + self.ell * self.s
    }

    /// `ℓ ∫ G dx` by composite Simpson on each stratum.
    pub fn total_area_quadrature(&self, panels: usize) -> T {
        self.ell * self.integrate_over_strata(panels, |m| m.g)
    }

    /// Conformal modulus `(1/ℓ)∫ dx/G = (2 gd(a) + s)/ℓ`.
    pub fn conformal_modulus(&self) -> T {
        (T::lit(2.0) * gudermannian(self.a) + self.s) / self.ell
    }

    pub fn conformal_modulus_quadrature(&self, panels: usize) -> T {
        self.integrate_over_strata(panels, |m| T::one() / m.g) / self.ell
    }

    fn integrate_over_strata<F: Fn(MetricCoefficient<T>) -> T>(&self, panels: usize, f: F) -> T {
        let h = self.half_height();
        let w = self.half_width();
        let panels = panels.max(2);
        let strip = panels / 3 + 1;
        let g = |x: T| f(self.metric_coefficient_unchecked(x));
        simpson(-w, -h, strip, &g) + simpson(-h, h, panels - 2 * strip + 2, &g) + simpson(h, w, strip, &g)
    }

    /// Largest jump of `G` and `G'` across either seam, sampled at `±δ`.
    pub fn seam_continuity_defect(&self, delta: T) -> (T, T) {
        let mut worst = (T::zero(), T::zero());
        for seam in [-self.half_height(), self.half_height()] {
            let lo = self.metric_coefficient_unchecked(seam - delta);
            let hi = self.metric_coefficient_unchecked(seam + delta);
            worst.0 = worst.0.max((lo.g - hi.g).abs());
            worst.1 = worst.1.max((lo.dg - hi.dg).abs());
        }
        worst
    }
}

/// `L = ℓ·s`, the length of the weighted core curve.
pub fn grafted_length<T: Scalar>(ell: T, s: T) -> T {
    ell * s
}

/// Gaussian curvature of the orthogonal metric `E dx² + F dy²` by centred
/// differences of step `h` (Brioschi form).
pub fn orthogonal_curvature_fd<T: Scalar, E, F>(e: E, f: F, x: T, y: T, h: T) -> T
where
    E: Fn(T, T) -> T,
    F: Fn(T, T) -> T,
{
    let two = T::lit(2.0);
    let root = |x: T, y: T| (e(x, y) * f(x, y)).sqrt();
    // ∂ₓ(Fₓ/√(EF)) + ∂ᵧ(Eᵧ/√(EF))
    let fx = |x: T, y: T| (f(x + h, y) - f(x - h, y)) / (two * h);
    let ey = |x: T, y: T| (e(x, y + h) - e(x, y - h)) / (two * h);
    let px = |x: T, y: T| fx(x, y) / root(x, y);
    let py = |x: T, y: T| ey(x, y) / root(x, y);
    let div = (px(x + h, y) - px(x - h, y)) / (two * h) + (py(x, y + h) - py(x, y - h)) / (two * h);
    -div / (two * root(x, y))
}

/// Global infinitesimal conformal factor `Ḣ`.
///
/// Inside the cylinder it is the spectral solution; on each hyperbolic side it
/// is the first-order jet `Ḣ = D(y) + ξ·N(y)` built from the seam value `D`
/// and the hyperbolic-side derivative `N = ∂ₓḢ`, with `ξ = x ∓ s/2`.
/// This is exactly the data that enters the geodesic variation equation.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalField<T: Scalar> {
    pub flat: FourierSolution<T>,
    pub left_neumann: TraceModes<T>,
    pub right_neumann: TraceModes<T>,
    left_dirichlet: TraceModes<T>,
    right_dirichlet: TraceModes<T>,
}

impl<T: Scalar> GlobalField<T> {
    pub fn with_seam_jets(flat: FourierSolution<T>, left_neumann: TraceModes<T>, right_neumann: TraceModes<T>) -> Result<Self> {
        for (t, side) in [(&left_neumann, Side::Left), (&right_neumann, Side::Right)] {
            if t.kind != TraceKind::NeumannHyperbolic {
                return Err(Error::TraceKind {
                    expected: "neumann_hyperbolic",
                    found: t.kind.name(),
                });
            }
            if t.side != side {
                return Err(invalid("neumann trace", "side mismatch"));
            }
        }
        let left_dirichlet = flat.dirichlet_trace(Side::Left);
        let right_dirichlet = flat.dirichlet_trace(Side::Right);
        Ok(Self {
            flat,
            left_neumann,
            right_neumann,
            left_dirichlet,
            right_dirichlet,
        })
    }

    /// A field that is the given constant everywhere.
    pub fn constant(ell: T, s: T, value: T) -> Self {
        let flat = FourierSolution::zero(ell, s, 0).with_constant(T::zero(), value);
        let zero = |side| TraceModes {
            side,
            kind: TraceKind::NeumannHyperbolic,
            ell,
            mean: T::zero(),
            modes: vec![],
        };
        Self::with_seam_jets(flat, zero(Side::Left), zero(Side::Right)).expect("consistent constant field")
    }

    /// `(Ḣ, ∂ₓḢ)` at `(x, y)`.
    pub fn value_and_dx(&self, x: T, y: T) -> (T, T) {
        self.value_and_dx_in(self.stratum(x), x, y)
    }

    pub fn stratum(&self, x: T) -> Stratum {
        let h = self.flat.s / T::lit(2.0);
        if x < -h {
            Stratum::Hyperbolic(Side::Left)
        } else if x > h {
            Stratum::Hyperbolic(Side::Right)
        } else {
            Stratum::Flat
        }
    }

    /// `(Ḣ, ∂ₓḢ)` from the formula of the given stratum, continued past its
    /// edge if `x` lies outside it.
    pub fn value_and_dx_in(&self, stratum: Stratum, x: T, y: T) -> (T, T) {
        let h = self.flat.s / T::lit(2.0);
        match stratum {
            Stratum::Hyperbolic(Side::Left) => {
                let n = self.left_neumann.eval(y);
                (self.left_dirichlet.eval(y) + (x + h) * n, n)
            }
            Stratum::Hyperbolic(Side::Right) => {
                let n = self.right_neumann.eval(y);
                (self.right_dirichlet.eval(y) + (x - h) * n, n)
            }
            Stratum::Flat => (self.flat.evaluate_unchecked(x, y), self.flat.dx_unchecked(x, y)),
        }
    }

    pub fn value(&self, x: T, y: T) -> T {
        self.value_and_dx(x, y).0
    }
}

/// Family `gr(σ_t) = gr(σ₀)/H_t (+ t·φ_ij)` with `H_t = 1 + t·Ḣ`.
#[derive(Debug, Clone)]
pub struct ConformalFamily<T: Scalar> {
    pub base: GraftedCollar<T>,
    pub hdot: GlobalField<T>,
    pub quad: Option<QuadDiffModes<T>>,
    pub s_rate: T,
    pub t_eval: Vec<T>,
}

/// Symmetric metric tensor in `(x, y)` coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricTensor<T> {
    pub xx: T,
    pub xy: T,
    pub yy: T,
}

impl<T: Scalar> ConformalFamily<T> {
    pub fn conformal(base: GraftedCollar<T>, hdot: GlobalField<T>) -> Self {
        Self {
            base,
            hdot,
            quad: None,
            s_rate: T::zero(),
            t_eval: vec![],
        }
    }

    pub fn with_quad(mut self, quad: QuadDiffModes<T>) -> Self {
        self.quad = Some(quad);
        self
    }

    /// `H_t(x, y) = 1 + t·Ḣ(x, y)`, rejected when non-positive.
    pub fn conformal_factor(&self, t: T, x: T, y: T) -> Result<T> {
        let h = T::one() + t * self.hdot.value(x, y);
        if !(h > T::zero()) {
            return Err(Error::NonPositiveFactor {
                value: h.to_f64_lossy(),
                x: x.to_f64_lossy(),
                y: y.to_f64_lossy(),
            });
        }
        Ok(h)
    }

    /// Metric of the family member `t` at `(x, y)`.
    ///
    /// With quadratic-differential data the first-order tensor
    /// `t·[[-2Re φ, 2Im φ], [2Im φ, 2Re φ]]` is added in the `(y, x)` Fermi
    /// frame; it is only defined on the closed flat stratum.
    pub fn family_metric(&self, t: T, x: T, y: T) -> Result<MetricTensor<T>> {
        let g = self.base.metric_coefficient(x)?.g;
        let h = self.conformal_factor(t, x, y)?;
        let mut m = MetricTensor {
            xx: T::one() / h,
            xy: T::zero(),
            yy: g * g / h,
        };
        if let Some(q) = &self.quad {
            if x.abs() > self.base.half_height() {
                return Err(Error::OutsideFlatStratum {
                    x: x.to_f64_lossy(),
                    y: y.to_f64_lossy(),
                });
            }
            let two = T::lit(2.0);
            let (re, im) = (q.re_phi(x, y), q.im_phi(x, y));
            m.yy -= t * two * re;
            m.xy += t * two * im;
            m.xx += t * two * re;
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;
    use std::f64::consts::PI;

    fn chart() -> GraftedCollar<f64> {
        GraftedCollar::new(2.0 * PI, 2.0, 1.0).unwrap()
    }

    #[test]
    fn metric_coefficient_examples() {
        let c = chart();
        let m = c.metric_coefficient(0.0).unwrap();
        assert_eq!((m.g, m.dg), (1.0, 0.0));
        let m = c.metric_coefficient(2.0).unwrap();
        assert!((m.g - 1.0_f64.cosh()).abs() < 1e-15);
        assert!((m.g - 1.5431).abs() < 1e-4);
        let m = c.metric_coefficient(1.0).unwrap();
        assert_eq!((m.g, m.dg), (1.0, 0.0));
        assert_eq!((m.d2g.below, m.d2g.above), (0.0, 1.0));
        let m = c.metric_coefficient(-1.0).unwrap();
        assert_eq!((m.d2g.below, m.d2g.above), (1.0, 0.0));
        assert!(matches!(c.metric_coefficient(2.5), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn curvature_on_strata() {
        let c = chart();
        assert_eq!(c.gauss_curvature(0.0).unwrap(), 0.0);
        assert!((c.gauss_curvature(1.5).unwrap() + 1.0).abs() < 1e-15);
        assert!((c.gauss_curvature(-1.7).unwrap() + 1.0).abs() < 1e-15);
        let err = c.gauss_curvature(1.0).unwrap_err();
        assert!(err.to_string().contains("seam: curvature discontinuous"));
    }

    #[test]
    fn c11_regularity_across_seams() {
        let c = GraftedCollar::new(3.0, 1.3, 2.0).unwrap();
        for &d in &[1e-3, 1e-6, 1e-9] {
            let (jg, jdg) = c.seam_continuity_defect(d);
            assert!(jg <= d * d && jdg <= 2.0 * d, "{d}: {jg} {jdg}");
        }
    }

    #[test]
    fn area_closed_form_and_quadrature() {
        let c = chart();
        let expected = 2.0 * 2.0 * PI * 1.0_f64.sinh() + 4.0 * PI;
        assert!((c.total_area() - expected).abs() < 1e-12);
        let q = c.total_area_quadrature(10_000);
        assert!(((q - expected) / expected).abs() < 1e-10);

        let flat = GraftedCollar::new(2.0, 0.0, 0.7).unwrap();
        assert!((flat.total_area() - 4.0 * 0.7_f64.sinh()).abs() < 1e-15);
        let thin = GraftedCollar::new(2.0_f64, 1.5, 1e-12).unwrap();
        assert!((thin.total_area() - 3.0).abs() < 1e-10);
    }

    #[test]
    fn modulus_examples() {
        let c = GraftedCollar::new(2.0 * PI, 0.0, 1.0).unwrap();
        assert!((c.conformal_modulus() - 0.2756).abs() < 1e-4);
        assert!((c.conformal_modulus() - c.conformal_modulus_quadrature(10_000)).abs() < 1e-10);
        let thin = GraftedCollar::new(3.0_f64, 1.2, 1e-14).unwrap();
        assert!((thin.conformal_modulus() - 0.4).abs() < 1e-12);
        let short = GraftedCollar::new(1.0, 1.0, 1.0).unwrap();
        let long = GraftedCollar::new(2.0, 1.0, 1.0).unwrap();
        assert!(short.conformal_modulus() > long.conformal_modulus());
    }

    #[test]
    fn grafted_length_examples() {
        assert!((grafted_length(2.0 * PI, 2.0) - 4.0 * PI).abs() < 1e-15);
        assert_eq!(grafted_length(3.0, 0.0), 0.0);
        assert_eq!(grafted_length(1.0, 1.0), 1.0);
    }

    #[test]
    fn conformal_rescaling_curvature_identity() {
        // bump supported in the right hyperbolic strip
        let c = GraftedCollar::new(4.0, 1.0, 3.0).unwrap();
        let t = 0.3;
        let bump = |x: f64, y: f64| {
            let u = x - 2.0;
            (-(u * u) * 4.0).exp() * (2.0 * PI * y / 4.0).cos()
        };
        let g = |x: f64| c.metric_coefficient_unchecked(x).g;
        let hfun = |x: f64, y: f64| 1.0 + t * bump(x, y);
        let e = |x: f64, y: f64| 1.0 / hfun(x, y);
        let f = |x: f64, y: f64| g(x) * g(x) / hfun(x, y);
        let (x, y) = (2.1, 0.7);
        let k0 = c.gauss_curvature(x).unwrap();
        let lap_log = |x: f64, y: f64| {
            let d = 1e-4;
            let lh = |x: f64, y: f64| hfun(x, y).ln();
            let gx = g(x);
            let dx = |x: f64| g(x) * (lh(x + d, y) - lh(x - d, y)) / (2.0 * d);
            ((dx(x + d) - dx(x - d)) / (2.0 * d)) / gx + (lh(x, y + d) - 2.0 * lh(x, y) + lh(x, y - d)) / (d * d * gx * gx)
        };
        let closed = hfun(x, y) * (k0 + 0.5 * lap_log(x, y));
        let mut errs = vec![];
        for &h in &[4e-3, 2e-3] {
            let fd = orthogonal_curvature_fd(e, f, x, y, h);
            errs.push((fd - closed).abs());
        }
        assert!(errs[0] < 1e-4, "{errs:?}");
        assert!(errs[1] < errs[0] / 3.0, "second order: {errs:?}");
    }

    #[test]
    fn family_metric_examples() {
        let c = chart();
        let field = GlobalField::constant(c.ell, c.s, 0.5);
        let fam = ConformalFamily::conformal(c, field);
        let m0 = fam.family_metric(0.0, 1.5, 0.3).unwrap();
        assert_eq!(m0.xx, 1.0);
        assert!((m0.yy - 0.5_f64.cosh().powi(2)).abs() < 1e-15);
        let m = fam.family_metric(0.1, 0.2, 0.3).unwrap();
        assert!((m.xx - 1.0 / 1.05).abs() < 1e-15 && (m.yy - 1.0 / 1.05).abs() < 1e-15);
        assert!(matches!(fam.family_metric(-3.0, 0.0, 0.0), Err(Error::NonPositiveFactor { .. })));

        let q = QuadDiffModes::zero(c.ell, c.s, 1).with_mode(1, Complex::new(1.0, 0.0), Complex::new(0.0, 0.0));
        let fam = fam.with_quad(q.clone());
        let t = 1e-3;
        let m = fam.family_metric(t, 1.0, 0.4).unwrap();
        assert!((m.xy - 2.0 * t * q.im_phi(1.0, 0.4)).abs() < 1e-16);
        // Im φ = 2 cosh(1)·cos(0.4) for u₁ = 1
        assert!((q.im_phi(1.0, 0.4) - 2.0 * 1.0_f64.cosh() * 0.4_f64.cos()).abs() < 1e-14);
        assert!(matches!(fam.family_metric(t, 1.5, 0.0), Err(Error::OutsideFlatStratum { .. })));
    }

    #[test]
    fn chart_json_round_trip() {
        let c = GraftedCollar::new(0.1 + 0.2, 1.0 / 3.0, 2.5e-7).unwrap().with_outer_bc(OuterBc::Neumann);
        let text = serde_json::to_string(&c).unwrap();
        assert!(text.contains("\"outer_bc\":\"neumann\""));
        let back: GraftedCollar<f64> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, c);
    }
}
