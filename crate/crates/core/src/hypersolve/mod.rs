//! Hyperbolic-side boundary value problems.
//!
//! On a Fermi strip `ξ ∈ [0, a]` (distance from the seam) with metric
//! `dξ² + cosh²ξ dy²`, the linearised equation `(Δ_h - 2)H = 0` separates
//! into Fourier modes `H = b(ξ) e^{i k y}`, `k = 2πn/ℓ`:
//!
//! ```text
//! b'' + tanh(ξ) b' - (k²/cosh²ξ + 2) b = 0,   b(0) = D,   b(a) = 0 or b'(a) = 0.
//! ```
//!
//! Each mode is solved twice, by adaptive backward shooting and by element
//! collocation, and the two are required to agree.

pub mod collocation;
pub mod shooting;

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::geometry::{GraftedCollar, OuterBc};
use crate::quad::CompositeGauss;
use crate::scalar::Scalar;
use crate::spectral::{wavenumber, FourierSolution, Side, TraceKind, TraceModes};

pub use collocation::ChebyshevProfile;

/// Nodes of the sample grid returned with every solution.
pub const GRID_NODES: usize = 512;
/// Polynomial degree per collocation element.
pub const COLLOCATION_DEGREE: usize = 16;
const SHOOTING_RTOL: f64 = 1e-12;
const GAUSS_ORDER: usize = 24;

/// A radial function on `[0, a]` with two derivatives.
pub trait RadialProfile<T: Scalar> {
    fn value(&self, xi: T) -> T;
    fn derivative(&self, xi: T) -> T;
    fn second_derivative(&self, xi: T) -> T;
    /// Panel boundaries for quadrature, from `0` to `a`.
    fn breakpoints(&self) -> Vec<T>;
}

/// One separated mode equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeProblem<T> {
    pub n: usize,
    pub ell: T,
    pub a: T,
    pub outer_bc: OuterBc,
}

impl<T: Scalar> ModeProblem<T> {
    pub fn new(n: usize, ell: T, a: T, outer_bc: OuterBc) -> Result<Self> {
        if !(ell > T::zero()) {
            return Err(invalid("ell", "must be > 0"));
        }
        if !(a > T::zero()) || !a.is_finite() {
            return Err(invalid("a", "must be finite and > 0"));
        }
        Ok(Self { n, ell, a, outer_bc })
    }

    pub fn k(&self) -> T {
        wavenumber(self.n, self.ell)
    }

    /// `k²/cosh²ξ + 2`.
    pub fn potential(&self, xi: T) -> T {
        let k = self.k();
        let c = xi.cosh();
        k * k / (c * c) + T::lit(2.0)
    }

    /// `b'' + tanh ξ b' - (k²/cosh²ξ + 2) b` for a given profile.
    pub fn residual<P: RadialProfile<T>>(&self, profile: &P, xi: T) -> T {
        profile.second_derivative(xi) + xi.tanh() * profile.derivative(xi) - self.potential(xi) * profile.value(xi)
    }

    /// Green's identity for one mode, weighted by `cosh ξ`:
    /// returns `(∫ b·L[b] cosh, -∫(b'² + q b²) cosh + [cosh·b·b']₀^a)`.
    pub fn greens_sides<P: RadialProfile<T>>(&self, profile: &P) -> (T, T) {
        let g = CompositeGauss::new(GAUSS_ORDER);
        let bp = profile.breakpoints();
        let lhs = g.integrate(&bp, |x| profile.value(x) * self.residual(profile, x) * x.cosh());
        let energy = g.integrate(&bp, |x| {
            let (b, db) = (profile.value(x), profile.derivative(x));
            (db * db + self.potential(x) * b * b) * x.cosh()
        });
        let boundary = |x: T| x.cosh() * profile.value(x) * profile.derivative(x);
        (lhs, -energy + boundary(self.a) - boundary(T::zero()))
    }
}

/// Solution of one mode with seam value `seam_dirichlet`.
#[derive(Debug, Clone)]
pub struct HyperbolicModeSolution<T: Scalar> {
    pub problem: ModeProblem<T>,
    pub seam_dirichlet: T,
    /// `(ξ, b, b')` from the shooting solve on the graded grid.
    pub samples: Vec<(T, T, T)>,
    /// `b'(0)/b(0)` from the shooting solve.
    pub dtn: T,
    /// Largest disagreement between the two methods, relative to `|b(0)|`
    /// for values and to `|dtn|` for the seam derivative.
    pub discrepancy: T,
    unit: ChebyshevProfile<T>,
}

impl<T: Scalar> HyperbolicModeSolution<T> {
    pub fn n(&self) -> usize {
        self.problem.n
    }

    pub fn value(&self, xi: T) -> T {
        self.seam_dirichlet * self.unit.value(xi)
    }

    pub fn derivative(&self, xi: T) -> T {
        self.seam_dirichlet * self.unit.derivative(xi)
    }

    /// The solution normalised to `b(0) = 1`.
    pub fn unit_profile(&self) -> &ChebyshevProfile<T> {
        &self.unit
    }

    /// `∫₀^a β cosh ξ dξ` for the unit profile `β`.
    pub fn unit_weighted_integral(&self) -> T {
        let g = CompositeGauss::new(GAUSS_ORDER);
        g.integrate(&self.unit.breakpoints(), |x| self.unit.value(x) * x.cosh())
    }

    /// `∫₀^a (β'² + (k²/cosh²ξ + 2)β²) cosh ξ dξ` for the unit profile.
    pub fn unit_energy(&self) -> T {
        let g = CompositeGauss::new(GAUSS_ORDER);
        g.integrate(&self.unit.breakpoints(), |x| {
            let (b, db) = (self.unit.value(x), self.unit.derivative(x));
            (db * db + self.problem.potential(x) * b * b) * x.cosh()
        })
    }

    /// `cosh a · β(a) β'(a)` with the imposed outer datum in place of the
    /// computed one, so it is exactly zero for either outer condition.
    pub fn unit_outer_term(&self) -> T {
        let a = self.problem.a;
        let (b, db) = match self.problem.outer_bc {
            OuterBc::Dirichlet => (T::zero(), self.unit.derivative(a)),
            OuterBc::Neumann => (self.unit.value(a), T::zero()),
        };
        a.cosh() * b * db
    }

    /// Residual of the outer condition for the computed unit profile.
    pub fn outer_condition_residual(&self) -> T {
        let a = self.problem.a;
        match self.problem.outer_bc {
            OuterBc::Dirichlet => self.unit.value(a).abs(),
            OuterBc::Neumann => self.unit.derivative(a).abs(),
        }
    }

    /// `cosh a · β'(a)`, the outer flux per unit seam value.
    pub fn unit_outer_flux(&self) -> T {
        let a = self.problem.a;
        a.cosh() * self.unit.derivative(a)
    }

    /// `(∫ β L[β] cosh, -∫(β'² + qβ²) cosh + boundary terms)` for the unit profile.
    pub fn unit_greens_sides(&self) -> (T, T) {
        self.problem.greens_sides(&self.unit)
    }
}

/// Solves one mode by both methods.
pub fn mode_solve<T: Scalar>(n: usize, ell: T, a: T, outer_bc: OuterBc, seam_dirichlet: T) -> Result<HyperbolicModeSolution<T>> {
    let problem = ModeProblem::new(n, ell, a, outer_bc)?;
    let nodes = shooting::graded_grid(a, GRID_NODES);
    let shot = shooting::shoot(&problem, &nodes, T::tol(SHOOTING_RTOL))?;
    let unit = collocation::collocate(&problem, COLLOCATION_DEGREE)?;
    let dtn = shot[0].1;
    let mut discrepancy = ((unit.derivative(T::zero()) - dtn) / dtn).abs();
    for (x, (b, _)) in nodes.iter().zip(&shot) {
        discrepancy = discrepancy.max((unit.value(*x) - *b).abs());
    }
    if !(discrepancy <= T::tol(1e-7)) {
        return Err(Error::NonConvergence {
            what: "mode solve cross-check",
            iterations: 2,
            residual: discrepancy.to_f64_lossy(),
        });
    }
    let samples = nodes
        .iter()
        .zip(&shot)
        .map(|(&x, &(b, db))| (x, seam_dirichlet * b, seam_dirichlet * db))
        .collect();
    Ok(HyperbolicModeSolution {
        problem,
        seam_dirichlet,
        samples,
        dtn,
        discrepancy,
        unit,
    })
}

/// Seam Neumann value per unit seam Dirichlet value, by shooting.
pub fn dtn<T: Scalar>(n: usize, ell: T, a: T, outer_bc: OuterBc) -> Result<T> {
    let problem = ModeProblem::new(n, ell, a, outer_bc)?;
    let nodes = [T::zero(), a];
    Ok(shooting::shoot(&problem, &nodes, T::tol(SHOOTING_RTOL))?[0].1)
}

/// The hyperbolic continuation of a seam-continuous conformal factor on both
/// strips: unit-seam mode solutions `β_n` shared by the two (congruent)
/// strips, and the complex seam data `D_n` of each side.
#[derive(Debug, Clone)]
pub struct HyperbolicField<T: Scalar> {
    pub ell: T,
    pub a: T,
    pub outer_bc: OuterBc,
    pub left: TraceModes<T>,
    pub right: TraceModes<T>,
    /// `profiles[n]` for `n = 0..=N`, each with seam value 1.
    pub profiles: Vec<HyperbolicModeSolution<T>>,
}

/// `(∫∫_{S₋₁} H dA, ∫∫_{S₋₁} (|∇H|² + 2H²) dA)` over both strips.
pub fn interior_integral<T: Scalar>(field: &HyperbolicField<T>) -> (T, T) {
    (field.integral(), field.energy())
}

impl<T: Scalar> HyperbolicField<T> {
    /// Solves every mode `0..=N` once (in parallel) for the chart's strips.
    pub fn solve(chart: &GraftedCollar<T>, left: TraceModes<T>, right: TraceModes<T>) -> Result<Self> {
        for t in [&left, &right] {
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
        let profiles = (0..=left.modes.len())
            .into_par_iter()
            .map(|n| mode_solve(n, chart.ell, chart.a, chart.outer_bc, T::one()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            ell: chart.ell,
            a: chart.a,
            outer_bc: chart.outer_bc,
            left,
            right,
            profiles,
        })
    }

    /// Continuation of the seam values of a cylinder solution.
    pub fn from_solution(chart: &GraftedCollar<T>, sol: &FourierSolution<T>) -> Result<Self> {
        Self::solve(chart, sol.dirichlet_trace(Side::Left), sol.dirichlet_trace(Side::Right))
    }

    fn sides(&self) -> [&TraceModes<T>; 2] {
        [&self.left, &self.right]
    }

    /// `Σ_sides ℓ(D₀² f(0) + 2Σ|D_n|² f(n))`.
    fn quadratic<F: Fn(&HyperbolicModeSolution<T>) -> T>(&self, f: F) -> T {
        let two = T::lit(2.0);
        let per_mode: Vec<T> = self.profiles.iter().map(f).collect();
        let mut total = T::zero();
        for side in self.sides() {
            let mut acc = side.mean * side.mean * per_mode[0];
            for (m, v) in side.modes.iter().zip(&per_mode[1..]) {
                acc += two * m.norm_sqr() * *v;
            }
            total += self.ell * acc;
        }
        total
    }

    /// `∫∫ H dA`; only the zero mode survives the `y`-integration.
    pub fn integral(&self) -> T {
        let i0 = self.profiles[0].unit_weighted_integral();
        self.sides().iter().map(|s| self.ell * s.mean * i0).sum()
    }

    /// `∫∫ (|∇H|² + 2H²) dA` by quadrature of the mode profiles.
    pub fn energy(&self) -> T {
        self.quadratic(|p| p.unit_energy())
    }

    /// `∮_seams H ∂_n H` with the outward normal `-∂_ξ`.
    pub fn seam_green_term(&self) -> T {
        self.quadratic(|p| -p.unit_profile().derivative(T::zero()))
    }

    /// `∮_outer H ∂_n H`; vanishes for both outer conditions.
    pub fn outer_green_term(&self) -> T {
        self.quadratic(|p| p.unit_outer_term())
    }

    /// `∮_seams ∂_n H` (outward normal `-∂_ξ`), zero mode only.
    pub fn seam_flux(&self) -> T {
        let d = self.profiles[0].unit_profile().derivative(T::zero());
        self.sides().iter().map(|s| -self.ell * s.mean * d).sum()
    }

    /// `∮_outer ∂_n H`, zero mode only.
    pub fn outer_flux(&self) -> T {
        let d = self.profiles[0].unit_outer_flux();
        self.sides().iter().map(|s| self.ell * s.mean * d).sum()
    }

    /// `(∫∫ H(Δ - 2)H, -∫∫(|∇H|² + 2H²) + ∮_all H ∂_n H)`.
    pub fn greens_sides(&self) -> (T, T) {
        let lhs = self.quadratic(|p| p.unit_greens_sides().0);
        let rhs = -self.energy() + self.seam_green_term() + self.outer_green_term();
        (lhs, rhs)
    }

    /// Absolute difference of the two sides of [`Self::greens_sides`].
    pub fn greens_residual(&self) -> T {
        let (lhs, rhs) = self.greens_sides();
        (lhs - rhs).abs()
    }

    /// Largest cross-method disagreement over the solved modes.
    pub fn discrepancy(&self) -> T {
        self.profiles.iter().fold(T::zero(), |m, p| m.max(p.discrepancy))
    }

    /// Value of the continuation at distance `xi` from the seam of `side`.
    pub fn value(&self, side: Side, xi: T, y: T) -> T {
        let tr = match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        };
        let modes: Vec<Complex<T>> = tr
            .modes
            .iter()
            .zip(&self.profiles[1..])
            .map(|(m, p)| m * p.unit_profile().value(xi))
            .collect();
        crate::spectral::real_series(tr.mean * self.profiles[0].unit_profile().value(xi), &modes, self.ell, y)
    }
}

/// Per-mode consistency system in the unknowns `(c_n cosh θ, d_n cosh θ)`:
/// on each seam the variation-mediated Neumann data must equal the
/// hyperbolic Dirichlet-to-Neumann response of the seam value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSystem<T> {
    pub n: usize,
    pub dtn: T,
    pub matrix: [[T; 2]; 2],
    pub det: T,
}

/// Assembles the system for mode `n ≥ 1`. Rows: left seam, right seam.
///
/// With `A = (4π²n² + ℓ²)/(2πnℓ)`, `t = tanh θ` and `δ` the DtN value:
/// left `A(-t X + Y) = -δ(X - tY)`, right `A(tX + Y) = δ(X + tY)`.
pub fn mode_system<T: Scalar>(n: usize, chart: &GraftedCollar<T>) -> Result<ModeSystem<T>> {
    if n == 0 {
        return Err(invalid("n", "the zero mode has its own balance"));
    }
    let delta = dtn(n, chart.ell, chart.a, chart.outer_bc)?;
    let (pi, ell) = (T::PI(), chart.ell);
    let nf = T::from_usize_lossy(n);
    let big = (T::lit(4.0) * pi * pi * nf * nf + ell * ell) / (T::lit(2.0) * pi * nf * ell);
    let t = (pi * nf * chart.s / ell).tanh();
    let matrix = [[delta - big * t, big - delta * t], [big * t - delta, big - delta * t]];
    let det = matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0];
    Ok(ModeSystem { n, dtn: delta, matrix, det })
}

/// Zero-mode balance under the slice condition: `d₀(s/2 - δ₀) = 0`.
/// Returns `(δ₀, s/2 - δ₀)`; the second entry is the coefficient of `d₀`.
pub fn zero_mode_balance<T: Scalar>(chart: &GraftedCollar<T>) -> Result<(T, T)> {
    let d0 = dtn(0, chart.ell, chart.a, chart.outer_bc)?;
    Ok((d0, chart.half_height() - d0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn gd(x: f64) -> f64 {
        x.sinh().atan()
    }

    #[test]
    fn zero_seam_value_gives_zero_solution() {
        let s = mode_solve(2, 3.0_f64, 1.0, OuterBc::Dirichlet, 0.0).unwrap();
        assert!(s.samples.iter().all(|(_, b, db)| *b == 0.0 && *db == 0.0));
    }

    #[test]
    fn zero_mode_decreases_to_zero() {
        let s = mode_solve(0, 2.0 * PI, 1.0, OuterBc::Dirichlet, 1.0).unwrap();
        assert!(s.discrepancy < 1e-8);
        assert!(s.dtn < 0.0);
        assert!(s.samples.windows(2).all(|w| w[1].1 <= w[0].1));
        assert!(s.samples.last().unwrap().1.abs() < 1e-14);
        assert!((s.dtn - (-1.0 / 1.0_f64.sinh() - gd(1.0))).abs() < 1e-11);
    }

    #[test]
    fn solutions_are_linear_in_seam_value() {
        let one = mode_solve(3, 2.0_f64, 1.5, OuterBc::Neumann, 1.0).unwrap();
        let two = mode_solve(3, 2.0_f64, 1.5, OuterBc::Neumann, 2.0).unwrap();
        for (a, b) in one.samples.iter().zip(&two.samples) {
            assert!((2.0 * a.1 - b.1).abs() < 1e-14 && (2.0 * a.2 - b.2).abs() < 1e-13);
        }
    }

    #[test]
    fn dtn_examples() {
        let (ell, a) = (3.0_f64, 1.2);
        let d0 = dtn(0, ell, a, OuterBc::Dirichlet).unwrap();
        let d5 = dtn(5, ell, a, OuterBc::Dirichlet).unwrap();
        assert!(d5 < d0 && d0 < 0.0);
        let far5 = dtn(0, ell, 5.0, OuterBc::Dirichlet).unwrap();
        let far10 = dtn(0, ell, 10.0, OuterBc::Dirichlet).unwrap();
        assert!((far5 - far10).abs() < 1e-6, "{}", far5 - far10);
        let neu = dtn(0, ell, 1.0, OuterBc::Neumann).unwrap();
        assert!(neu < 0.0);
        assert!((neu - (-gd(1.0) - 1.0_f64.tanh() / 1.0_f64.cosh())).abs() < 1e-11);
    }

    #[test]
    fn cross_method_agreement_on_a_sample() {
        for &(n, ell, a) in &[(1, 1.0, 0.5), (7, 2.0, 2.0), (32, 1.0, 3.0), (32, 8.0, 0.3), (0, 8.0, 4.0)] {
            for bc in [OuterBc::Dirichlet, OuterBc::Neumann] {
                let s = mode_solve::<f64>(n, ell, a, bc, 1.0).unwrap();
                assert!(s.discrepancy < 1e-8, "{n} {ell} {a} {bc:?}: {}", s.discrepancy);
                assert_eq!(s.unit_outer_term(), 0.0);
                assert!(s.outer_condition_residual() < 1e-10);
            }
        }
    }

    struct Cubic(f64);

    impl RadialProfile<f64> for Cubic {
        fn value(&self, x: f64) -> f64 {
            1.0 - x * x + x * x * x / 3.0
        }
        fn derivative(&self, x: f64) -> f64 {
            -2.0 * x + x * x
        }
        fn second_derivative(&self, x: f64) -> f64 {
            -2.0 + 2.0 * x
        }
        fn breakpoints(&self) -> Vec<f64> {
            (0..=8).map(|i| self.0 * i as f64 / 8.0).collect()
        }
    }

    #[test]
    fn greens_identity_for_manufactured_profile() {
        let p = ModeProblem::new(2, 3.0, 1.7, OuterBc::Dirichlet).unwrap();
        let (lhs, rhs) = p.greens_sides(&Cubic(1.7));
        assert!(lhs.abs() > 1e-3, "forcing is not zero");
        assert!((lhs - rhs).abs() < 1e-8, "{lhs} {rhs}");
    }

    #[test]
    fn field_integrals() {
        let chart = GraftedCollar::new(2.5_f64, 1.0, 1.3).unwrap();
        let zero = FourierSolution::zero(2.5, 1.0, 2);
        let f = HyperbolicField::from_solution(&chart, &zero).unwrap();
        assert_eq!(interior_integral(&f), (0.0, 0.0));
        assert_eq!(f.greens_residual(), 0.0);

        let pure = FourierSolution::zero(2.5, 1.0, 1).with_mode(1, Complex::new(0.4, 0.1), Complex::new(0.0, 0.2));
        let f = HyperbolicField::from_solution(&chart, &pure).unwrap();
        assert!(f.integral().abs() < 1e-12);
        assert!(f.energy() > 0.0);
        assert!(f.greens_residual() < 1e-8 * f.energy());
        assert!(f.outer_green_term().abs() < 1e-10);

        let constant = FourierSolution::zero(2.5, 1.0, 0).with_constant(0.0, 0.7);
        let f = HyperbolicField::from_solution(&chart, &constant).unwrap();
        let b0 = &f.profiles[0];
        let expected = 2.0 * 2.5 * 0.7 * b0.unit_weighted_integral();
        assert!((f.integral() - expected).abs() < 1e-14);
        // divergence theorem with (Δ - 2)H = 0: ∫∫H = ½(seam + outer flux)
        assert!((f.integral() - 0.5 * (f.seam_flux() + f.outer_flux())).abs() < 1e-9);
    }

    #[test]
    fn mode_system_determinant_matches_factorisation() {
        let chart = GraftedCollar::new(3.0_f64, 1.1, 1.4).unwrap();
        for n in [1, 4, 16] {
            let m = mode_system(n, &chart).unwrap();
            let nf = n as f64;
            let big = (4.0 * PI * PI * nf * nf + 9.0) / (2.0 * PI * nf * 3.0);
            let t = (PI * nf * 1.1 / 3.0).tanh();
            let expect = 2.0 * (m.dtn - big * t) * (big - m.dtn * t);
            assert!((m.det - expect).abs() < 1e-10 * expect.abs());
            assert!(m.det.abs() >= 2.0 * big * m.dtn.abs() * (1.0 - 1e-12));
        }
        let (d0, coeff) = zero_mode_balance(&chart).unwrap();
        assert!(d0 < 0.0 && coeff > 0.55);
    }
}
