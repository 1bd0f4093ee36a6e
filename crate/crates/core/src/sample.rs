//! Seeded random configurations for property checks and the suite.
//!
//! Random cylinder solutions are drawn through their seam values, with mode
//! amplitudes decaying like `e^{-n/4}`, and then inverted. Drawing the
//! coefficients `c_n, d_n` directly would make the seam traces grow like
//! `cosh(πns/ℓ)`.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::{GraftedCollar, OuterBc};
use crate::scalar::Scalar;
use crate::spectral::{FourierSolution, Side, TraceKind, TraceModes};
use crate::variation::QuadDiffModes;

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn uniform<T: Scalar>(rng: &mut SampleRng, lo: f64, hi: f64) -> T {
    T::lit(if lo == hi { lo } else { rng.gen_range(lo..hi) })
}

fn amplitude(n: usize) -> f64 {
    (-(n as f64) / 4.0).exp()
}

fn complex<T: Scalar>(rng: &mut SampleRng, scale: f64) -> Complex<T> {
    Complex::new(uniform(rng, -scale, scale), uniform(rng, -scale, scale))
}

/// Chart with parameters uniform in the given ranges.
pub fn random_chart<T: Scalar>(rng: &mut SampleRng, ell: (f64, f64), s: (f64, f64), a: (f64, f64)) -> GraftedCollar<T> {
    GraftedCollar {
        ell: uniform(rng, ell.0, ell.1),
        s: uniform(rng, s.0, s.1),
        a: uniform(rng, a.0, a.1),
        outer_bc: OuterBc::Dirichlet,
    }
}

fn random_trace<T: Scalar>(rng: &mut SampleRng, side: Side, ell: T, mean: T, modes: usize) -> TraceModes<T> {
    TraceModes {
        side,
        kind: TraceKind::Dirichlet,
        ell,
        mean,
        modes: (1..=modes).map(|n| complex(rng, amplitude(n))).collect(),
    }
}

/// Cylinder solution with `c₀ = 0`, `d₀ ∈ [-1, 1]` and decaying seam modes.
/// Requires `s > 0`.
pub fn random_solution<T: Scalar>(rng: &mut SampleRng, ell: T, s: T, modes: usize) -> FourierSolution<T> {
    let d0: T = uniform(rng, -1.0, 1.0);
    let left = random_trace(rng, Side::Left, ell, d0, modes);
    let right = random_trace(rng, Side::Right, ell, d0, modes);
    FourierSolution::from_boundary_data(&left, &right, ell, s).expect("s > 0 and matching truncations")
}

/// As [`random_solution`] but with seam means drawn independently, so that
/// `c₀ ≠ 0` almost surely.
pub fn random_solution_any_mean<T: Scalar>(rng: &mut SampleRng, ell: T, s: T, modes: usize) -> FourierSolution<T> {
    let (ml, mr) = (uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0));
    let left = random_trace(rng, Side::Left, ell, ml, modes);
    let right = random_trace(rng, Side::Right, ell, mr, modes);
    FourierSolution::from_boundary_data(&left, &right, ell, s).expect("s > 0 and matching truncations")
}

/// Quadratic-differential data with `Im φ` seam modes of size `e^{-n/4}`.
pub fn random_quad<T: Scalar>(rng: &mut SampleRng, ell: T, s: T, modes: usize) -> QuadDiffModes<T> {
    let mut q = QuadDiffModes::zero(ell, s, modes).with_constant(uniform(rng, -0.5, 0.5), uniform(rng, -0.5, 0.5));
    for n in 1..=modes {
        let th = T::PI() * T::from_usize_lossy(n) * s / ell;
        let scale = T::one() / th.cosh();
        let u: Complex<T> = complex(rng, amplitude(n));
        let v: Complex<T> = complex(rng, amplitude(n));
        q = q.with_mode(n, u * scale, v * scale);
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_draws() {
        let a: FourierSolution<f64> = random_solution(&mut rng(7), 2.0, 1.0, 4);
        let b: FourierSolution<f64> = random_solution(&mut rng(7), 2.0, 1.0, 4);
        let c: FourierSolution<f64> = random_solution(&mut rng(8), 2.0, 1.0, 4);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.c0, 0.0);
    }

    #[test]
    fn seam_values_stay_bounded_for_tall_charts() {
        let sol: FourierSolution<f64> = random_solution(&mut rng(1), 1.0, 4.0, 32);
        for side in Side::both() {
            let t = sol.dirichlet_trace(side);
            assert!(t.modes.iter().all(|m| m.norm() <= 2.0_f64.sqrt()));
        }
        let q: QuadDiffModes<f64> = random_quad(&mut rng(1), 1.0, 4.0, 32);
        assert!(q.im_phi_trace(Side::Left).modes.iter().all(|m| m.norm() < 3.0));
    }
}
