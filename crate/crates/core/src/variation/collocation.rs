//! Independent oracle for the seam variation coefficients: periodic spectral
//! collocation of `V_yy = f` on `M` equispaced points, solved densely with
//! one equation traded for the mean constraint.

use num_complex::Complex;

use crate::error::Result;
use crate::linalg::{solve, Matrix};
use crate::scalar::Scalar;
use crate::spectral::{Side, TraceModes};
use crate::variation::{QuadDiffModes, VariationField};

/// Periodic first-derivative matrix on `m` (even) points of `[0, ℓ)`.
pub fn first_derivative_matrix<T: Scalar>(m: usize, ell: T) -> Matrix<T> {
    assert!(m >= 4 && m % 2 == 0, "even point count required");
    let h = T::lit(2.0) * T::PI() / T::from_usize_lossy(m);
    let scale = T::lit(2.0) * T::PI() / ell;
    let half = T::lit(0.5);
    let mut d = Matrix::zeros(m, m);
    for i in 0..m {
        for k in 0..m {
            let j = (i + m - k) % m;
            if j == 0 {
                continue;
            }
            let sign = if j % 2 == 0 { T::one() } else { -T::one() };
            let arg = T::from_usize_lossy(j) * h / T::lit(2.0);
            d.set(i, k, scale * half * sign / arg.tan());
        }
    }
    d
}

/// Periodic second-derivative matrix on `m` (even) points of `[0, ℓ)`.
pub fn second_derivative_matrix<T: Scalar>(m: usize, ell: T) -> Matrix<T> {
    assert!(m >= 4 && m % 2 == 0, "even point count required");
    let h = T::lit(2.0) * T::PI() / T::from_usize_lossy(m);
    let scale = (T::lit(2.0) * T::PI() / ell).powi(2);
    let diag = -T::PI() * T::PI() / (T::lit(3.0) * h * h) - T::one() / T::lit(6.0);
    let mut d = Matrix::zeros(m, m);
    for i in 0..m {
        for k in 0..m {
            let j = (i + m - k) % m;
            let v = if j == 0 {
                diag
            } else {
                let sign = if j % 2 == 0 { T::one() } else { -T::one() };
                let sn = (T::from_usize_lossy(j) * h / T::lit(2.0)).sin();
                -sign / (T::lit(2.0) * sn * sn)
            };
            d.set(i, k, scale * v);
        }
    }
    d
}

/// Solves `V'' = f` at the nodes `y_j = jℓ/m` with `mean(V) = mean`.
pub fn solve_periodic<T: Scalar>(forcing: &[T], ell: T, mean: T) -> Result<Vec<T>> {
    let m = forcing.len();
    let mut a = second_derivative_matrix(m, ell);
    let mut rhs = forcing.to_vec();
    let w = T::one() / T::from_usize_lossy(m);
    for v in a.row_mut(m - 1) {
        *v = w;
    }
    rhs[m - 1] = mean;
    solve(a, &rhs)
}

/// Mean and coefficients of `e^{2πiny/ℓ}`, `1 ≤ n ≤ nmax`, of nodal samples.
pub fn fourier_modes<T: Scalar>(samples: &[T], nmax: usize) -> (T, Vec<Complex<T>>) {
    let m = samples.len();
    let mf = T::from_usize_lossy(m);
    let mean = samples.iter().copied().sum::<T>() / mf;
    let modes = (1..=nmax)
        .map(|n| {
            let mut acc = Complex::new(T::zero(), T::zero());
            for (j, &v) in samples.iter().enumerate() {
                let ph = -T::lit(2.0) * T::PI() * T::from_usize_lossy((n * j) % m) / mf;
                acc += Complex::from_polar(v, ph);
            }
            acc / mf
        })
        .collect();
    (mean, modes)
}

fn nodes<T: Scalar>(m: usize, ell: T) -> Vec<T> {
    (0..m).map(|j| ell * T::from_usize_lossy(j) / T::from_usize_lossy(m)).collect()
}

/// Collocation solution of `V_yy = -½(∂ₓH)₀`.
pub fn collocate_flat_variation<T: Scalar>(flat_neumann: &TraceModes<T>, mean: T, m: usize) -> Result<VariationField<T>> {
    let ys = nodes(m, flat_neumann.ell);
    let half = T::lit(0.5);
    let f: Vec<T> = ys.iter().map(|&y| -half * flat_neumann.eval(y)).collect();
    finish(flat_neumann, &f, mean, false)
}

/// Collocation solution of `W_yy = -½(∂ₓH)₀ + ∂_y Im φ`, with `Im φ`
/// sampled on the seam and differentiated by the collocation matrix.
pub fn collocate_amended_variation<T: Scalar>(
    flat_neumann: &TraceModes<T>,
    q: &QuadDiffModes<T>,
    mean: T,
    m: usize,
) -> Result<VariationField<T>> {
    let ell = flat_neumann.ell;
    let ys = nodes(m, ell);
    let x = match flat_neumann.side {
        Side::Left => -q.s / T::lit(2.0),
        Side::Right => q.s / T::lit(2.0),
    };
    let im: Vec<T> = ys.iter().map(|&y| q.im_phi(x, y)).collect();
    let dim = first_derivative_matrix(m, ell).mul_vec(&im);
    let half = T::lit(0.5);
    let f: Vec<T> = ys.iter().zip(&dim).map(|(&y, &d)| -half * flat_neumann.eval(y) + d).collect();
    finish(flat_neumann, &f, mean, true)
}

fn finish<T: Scalar>(trace: &TraceModes<T>, f: &[T], mean: T, amended: bool) -> Result<VariationField<T>> {
    let v = solve_periodic(f, trace.ell, mean)?;
    let (mean, modes) = fourier_modes(&v, trace.modes.len());
    Ok(VariationField {
        side: trace.side,
        ell: trace.ell,
        mean,
        modes,
        amended,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::FourierSolution;
    use crate::variation::{solve_amended_variation, solve_flat_variation};
    use std::f64::consts::PI;

    #[test]
    fn matrices_differentiate_trigonometric_polynomials() {
        let ell = 3.0;
        let m = 32;
        let ys = nodes(m, ell);
        let k = 2.0 * PI * 3.0 / ell;
        let f: Vec<f64> = ys.iter().map(|y| (k * y).sin()).collect();
        let d1 = first_derivative_matrix(m, ell).mul_vec(&f);
        let d2 = second_derivative_matrix(m, ell).mul_vec(&f);
        for (j, y) in ys.iter().enumerate() {
            assert!((d1[j] - k * (k * y).cos()).abs() < 1e-11);
            assert!((d2[j] + k * k * (k * y).sin()).abs() < 1e-9);
        }
    }

    #[test]
    fn collocation_reproduces_flat_example() {
        let sol = FourierSolution::zero(2.0 * PI, 2.0, 1).with_mode(1, Complex::new(1.0, 0.0), Complex::new(0.0, 0.0));
        let tr = sol.neumann_trace_flat(Side::Left);
        let v = collocate_flat_variation(&tr, 0.25, 64).unwrap();
        let closed = solve_flat_variation(&tr, 0.25).unwrap();
        assert!((v.mean - 0.25).abs() < 1e-12);
        assert!((v.modes[0] - closed.modes[0]).norm() < 1e-12);
    }

    #[test]
    fn collocation_reproduces_amended_example() {
        let ell = 2.0 * PI;
        let sol = FourierSolution::zero(ell, 2.0, 1);
        let q = QuadDiffModes::zero(ell, 2.0, 1).with_mode(1, Complex::new(1.0, 0.0), Complex::new(0.0, 0.0));
        let tr = sol.neumann_trace_flat(Side::Left);
        let w = collocate_amended_variation(&tr, &q, 0.0, 64).unwrap();
        let closed = solve_amended_variation(&tr, &q, 0.0).unwrap();
        assert!((w.modes[0] - closed.modes[0]).norm() < 1e-10, "{:?} {:?}", w.modes[0], closed.modes[0]);
    }
}
