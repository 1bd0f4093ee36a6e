//! Backward shooting with an adaptive Dormand–Prince 5(4) pair.
//!
//! Integration starts at the outer edge `ξ = a` with data satisfying the
//! outer condition and runs towards the seam, where the wanted solution is
//! the dominant one. The state is renormalised whenever it grows large; the
//! accumulated log-scale is tracked per sample so that the final rescaling to
//! `b(0) = 1` is exact.

use crate::error::{Error, Result};
use crate::geometry::OuterBc;
use crate::hypersolve::ModeProblem;
use crate::scalar::Scalar;

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Graded nodes `ξ_j = a(1 - cos(πj/(2(m-1))))`, clustered at the seam.
pub fn graded_grid<T: Scalar>(a: T, m: usize) -> Vec<T> {
    assert!(m >= 2);
    let last = T::from_usize_lossy(m - 1);
    (0..m)
        .map(|j| {
            if j == m - 1 {
                a
            } else {
                a * (T::one() - (T::PI() * T::from_usize_lossy(j) / (T::lit(2.0) * last)).cos())
            }
        })
        .collect()
}

/// `(b, b')` on `nodes`, normalised to `b(0) = 1`. `nodes` must start at 0
/// and end at `a`, increasing.
pub fn shoot<T: Scalar>(problem: &ModeProblem<T>, nodes: &[T], rtol: T) -> Result<Vec<(T, T)>> {
    let a = problem.a;
    let mut y = match problem.outer_bc {
        OuterBc::Dirichlet => [T::zero(), T::one()],
        OuterBc::Neumann => [T::one(), T::zero()],
    };
    let m = nodes.len();
    let mut raw = vec![(T::zero(), T::zero(), T::zero()); m];
    raw[m - 1] = (y[0], y[1], T::zero());
    let mut log_scale = T::zero();
    let mut xi = a;
    let mut h = (a / T::lit(64.0)).min(T::one() / (problem.k() + T::one()));
    let big = T::lit(1e100);
    let safety = T::lit(0.9);
    let mut steps = 0usize;
    for j in (0..m - 1).rev() {
        let target = nodes[j];
        while xi > target {
            steps += 1;
            if steps > 2_000_000 {
                return Err(Error::NonConvergence {
                    what: "shooting integrator",
                    iterations: steps,
                    residual: xi.to_f64_lossy(),
                });
            }
            let step = h.min(xi - target);
            let (next, err) = dp_step(problem, xi, y, -step, rtol);
            if err <= T::one() {
                xi -= step;
                if xi - target <= T::epsilon() * a {
                    xi = target;
                }
                y = next;
                let size = y[0].abs().max(y[1].abs());
                if size > big {
                    y = [y[0] / size, y[1] / size];
                    log_scale += size.ln();
                }
            }
            let factor = if err == T::zero() {
                T::lit(5.0)
            } else {
                (safety * err.powf(-T::lit(0.2))).min(T::lit(5.0)).max(T::lit(0.2))
            };
            h = (step * factor).max(T::epsilon() * a * T::lit(16.0));
        }
        raw[j] = (y[0], y[1], log_scale);
    }
    let (b0, _, s0) = raw[0];
    if b0 == T::zero() {
        return Err(Error::DegenerateDtn { n: problem.n });
    }
    Ok(raw
        .into_iter()
        .map(|(b, db, s)| {
            let f = (s - s0).exp() / b0;
            (b * f, db * f)
        })
        .collect())
}

fn dp_step<T: Scalar>(p: &ModeProblem<T>, xi: T, y: [T; 2], h: T, rtol: T) -> ([T; 2], T) {
    let f = |x: T, s: [T; 2]| -> [T; 2] { [s[1], p.potential(x) * s[0] - x.tanh() * s[1]] };
    let mut k = [[T::zero(); 2]; 7];
    for i in 0..7 {
        let mut s = y;
        for (j, kj) in k.iter().enumerate().take(i) {
            let aij = T::lit(A[i][j]);
            s[0] += h * aij * kj[0];
            s[1] += h * aij * kj[1];
        }
        k[i] = f(xi + h * T::lit(C[i]), s);
    }
    let mut out = y;
    let mut err = [T::zero(); 2];
    for i in 0..7 {
        let (b5, d) = (T::lit(B5[i]), T::lit(B5[i] - B4[i]));
        for c in 0..2 {
            out[c] += h * b5 * k[i][c];
            err[c] += h * d * k[i][c];
        }
    }
    let scale = y[0].abs().max(y[1].abs()).max(out[0].abs().max(out[1].abs()));
    let tol = rtol * scale + T::min_positive_value();
    (out, err[0].abs().max(err[1].abs()) / tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_graded_towards_the_seam() {
        let g = graded_grid(2.0_f64, 512);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[511], 2.0);
        assert!(g[1] - g[0] < g[511] - g[510]);
    }

    #[test]
    fn zero_mode_matches_closed_form() {
        // n = 0 solutions: sinh ξ and 1 + sinh ξ·gd(ξ)
        let a = 1.3_f64;
        let p = ModeProblem::new(0, 2.0, a, OuterBc::Dirichlet).unwrap();
        let nodes = graded_grid(a, 512);
        let b = shoot(&p, &nodes, 1e-12).unwrap();
        let gd = |x: f64| x.sinh().atan();
        let phi2 = |x: f64| 1.0 + x.sinh() * gd(x);
        let exact = |x: f64| phi2(x) - phi2(a) * x.sinh() / a.sinh();
        for (x, (v, _)) in nodes.iter().zip(&b) {
            assert!((v - exact(*x)).abs() < 1e-11, "{x}");
        }
        assert!((b[0].1 - (-1.0 / a.sinh() - gd(a))).abs() < 1e-11);
    }
}
