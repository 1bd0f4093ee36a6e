//! Element-wise Chebyshev–Lobatto collocation of the radial mode equation.
//!
//! The strip is cut into elements whose width shrinks where the local decay
//! rate `k/cosh ξ` is large. Nodal values are shared at element ends, the
//! equation is collocated at interior nodes, and `b'` is matched across each
//! interface. The resulting system is banded with bandwidth equal to the
//! polynomial degree.

use crate::error::{Error, Result};
use crate::geometry::OuterBc;
use crate::hypersolve::{ModeProblem, RadialProfile};
use crate::linalg::Banded;
use crate::scalar::Scalar;

/// Piecewise polynomial on Chebyshev–Lobatto nodes.
#[derive(Debug, Clone)]
pub struct ChebyshevProfile<T> {
    breaks: Vec<T>,
    reference: Vec<T>,
    weights: Vec<T>,
    values: Vec<Vec<T>>,
    first: Vec<Vec<T>>,
    second: Vec<Vec<T>>,
}

/// Lobatto nodes `-cos(πj/p)` on `[-1, 1]` with barycentric weights and the
/// differentiation matrix.
fn reference_element<T: Scalar>(p: usize) -> (Vec<T>, Vec<T>, Vec<Vec<T>>) {
    let pf = T::from_usize_lossy(p);
    let nodes: Vec<T> = (0..=p).map(|j| -(T::PI() * T::from_usize_lossy(j) / pf).cos()).collect();
    let weights: Vec<T> = (0..=p)
        .map(|j| {
            let w = if j % 2 == 0 { T::one() } else { -T::one() };
            if j == 0 || j == p {
                w / T::lit(2.0)
            } else {
                w
            }
        })
        .collect();
    let mut d = vec![vec![T::zero(); p + 1]; p + 1];
    for i in 0..=p {
        let mut diag = T::zero();
        for j in 0..=p {
            if i != j {
                let v = (weights[j] / weights[i]) / (nodes[i] - nodes[j]);
                d[i][j] = v;
                diag -= v;
            }
        }
        d[i][i] = diag;
    }
    (nodes, weights, d)
}

fn apply<T: Scalar>(d: &[Vec<T>], v: &[T]) -> Vec<T> {
    d.iter().map(|row| row.iter().zip(v).map(|(&a, &b)| a * b).sum()).collect()
}

/// Element boundaries adapted to the decay rate of mode `problem.n`.
pub fn element_breaks<T: Scalar>(problem: &ModeProblem<T>) -> Vec<T> {
    let a = problem.a;
    let k = problem.k();
    let mut breaks = vec![T::zero()];
    let mut x = T::zero();
    while x < a {
        let width = (T::lit(4.0) / (k / x.cosh() + T::lit(1.5))).min(T::one());
        let mut next = x + width;
        if next > a - width / T::lit(4.0) {
            next = a;
        }
        breaks.push(next);
        x = next;
    }
    breaks
}

/// Solves the mode equation with `b(0) = 1` and the outer condition.
pub fn collocate<T: Scalar>(problem: &ModeProblem<T>, degree: usize) -> Result<ChebyshevProfile<T>> {
    let p = degree.max(4);
    let breaks = element_breaks(problem);
    let elements = breaks.len() - 1;
    let n = elements * p + 1;
    let (reference, weights, d) = reference_element::<T>(p);
    let mut a = Banded::zeros(n, p, p);
    let mut rhs = vec![T::zero(); n];
    let two = T::lit(2.0);
    a.set(0, 0, T::one());
    rhs[0] = T::one();
    for e in 0..elements {
        let (lo, hi) = (breaks[e], breaks[e + 1]);
        let hw = (hi - lo) / two;
        let mid = (hi + lo) / two;
        let base = e * p;
        for j in 1..p {
            let xi = mid + hw * reference[j];
            let tanh = xi.tanh();
            let row = base + j;
            for c in 0..=p {
                let d2: T = (0..=p).map(|m| d[j][m] * d[m][c]).sum();
                let mut v = d2 + tanh * hw * d[j][c];
                if c == j {
                    v -= problem.potential(xi) * hw * hw;
                }
                a.set(row, base + c, v);
            }
        }
        if e + 1 < elements {
            let next_hw = (breaks[e + 2] - hi) / two;
            let row = base + p;
            // hw-weighted derivative match keeps rows of comparable size
            for c in 0..=p {
                a.set(row, base + c, d[p][c]);
            }
            let ratio = hw / next_hw;
            for c in 0..=p {
                let prev = if c == 0 { a.get(row, base + p) } else { T::zero() };
                a.set(row, base + p + c, prev - ratio * d[0][c]);
            }
        }
    }
    let last = n - 1;
    match problem.outer_bc {
        OuterBc::Dirichlet => a.set(last, last, T::one()),
        OuterBc::Neumann => {
            let base = (elements - 1) * p;
            for c in 0..=p {
                a.set(last, base + c, d[p][c]);
            }
        }
    }
    let u = a.factor()?.solve(&rhs);
    if u.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonConvergence {
            what: "mode collocation",
            iterations: 1,
            residual: f64::NAN,
        });
    }
    let mut values = Vec::with_capacity(elements);
    let mut first = Vec::with_capacity(elements);
    let mut second = Vec::with_capacity(elements);
    for e in 0..elements {
        let hw = (breaks[e + 1] - breaks[e]) / two;
        let v = u[e * p..=e * p + p].to_vec();
        let d1: Vec<T> = apply(&d, &v).into_iter().map(|x| x / hw).collect();
        let d2: Vec<T> = apply(&d, &d1).into_iter().map(|x| x / hw).collect();
        values.push(v);
        first.push(d1);
        second.push(d2);
    }
    Ok(ChebyshevProfile {
        breaks,
        reference,
        weights,
        values,
        first,
        second,
    })
}

impl<T: Scalar> ChebyshevProfile<T> {
    fn locate(&self, xi: T) -> (usize, T) {
        let e = match self.breaks.binary_search_by(|b| b.partial_cmp(&xi).expect("finite")) {
            Ok(i) => i.min(self.breaks.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.breaks.len() - 2),
        };
        let (lo, hi) = (self.breaks[e], self.breaks[e + 1]);
        let t = (T::lit(2.0) * xi - lo - hi) / (hi - lo);
        (e, t)
    }

    fn interpolate(&self, data: &[Vec<T>], xi: T) -> T {
        let (e, t) = self.locate(xi);
        let vals = &data[e];
        let mut num = T::zero();
        let mut den = T::zero();
        for (j, (&x, &w)) in self.reference.iter().zip(&self.weights).enumerate() {
            let diff = t - x;
            if diff == T::zero() {
                return vals[j];
            }
            let c = w / diff;
            num += c * vals[j];
            den += c;
        }
        num / den
    }

    pub fn element_count(&self) -> usize {
        self.values.len()
    }
}

impl<T: Scalar> RadialProfile<T> for ChebyshevProfile<T> {
    fn value(&self, xi: T) -> T {
        self.interpolate(&self.values, xi)
    }

    fn derivative(&self, xi: T) -> T {
        self.interpolate(&self.first, xi)
    }

    fn second_derivative(&self, xi: T) -> T {
        self.interpolate(&self.second, xi)
    }

    fn breakpoints(&self) -> Vec<T> {
        self.breaks.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_mode_matches_closed_form_both_conditions() {
        let gd = |x: f64| x.sinh().atan();
        let phi2 = |x: f64| 1.0 + x.sinh() * gd(x);
        let dphi2 = |x: f64| x.cosh() * gd(x) + x.tanh();
        let a = 1.0_f64;
        let p = ModeProblem::new(0, 3.0, a, OuterBc::Dirichlet).unwrap();
        let prof = collocate(&p, 16).unwrap();
        for &x in &[0.0, 0.1, 0.5, 0.99, 1.0] {
            let exact = phi2(x) - phi2(a) * x.sinh() / a.sinh();
            assert!((prof.value(x) - exact).abs() < 1e-12);
        }
        assert!((prof.derivative(0.0) - (-1.0 / a.sinh() - gd(a))).abs() < 1e-11);

        let p = ModeProblem::new(0, 3.0, a, OuterBc::Neumann).unwrap();
        let prof = collocate(&p, 16).unwrap();
        let alpha = -dphi2(a) / a.cosh();
        for &x in &[0.0, 0.3, 1.0] {
            assert!((prof.value(x) - (phi2(x) + alpha * x.sinh())).abs() < 1e-12);
        }
        assert!(prof.derivative(a).abs() < 1e-10);
    }

    #[test]
    fn high_modes_use_many_elements() {
        let p = ModeProblem::new(32, 1.0, 2.0, OuterBc::Dirichlet).unwrap();
        let prof = collocate(&p, 16).unwrap();
        assert!(prof.element_count() > 20);
        let r = (0..50)
            .map(|i| {
                let x = 2.0 * i as f64 / 50.0 + 0.013;
                let res = prof.second_derivative(x) + x.tanh() * prof.derivative(x) - p.potential(x) * prof.value(x);
                res.abs()
            })
            .fold(0.0, f64::max);
        assert!(r < 1e-6 * p.k() * p.k(), "{r}");
    }
}
