//! Quadrature rules used by the oracles.

use crate::scalar::Scalar;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration on `P_n`.
pub fn gauss_legendre<T: Scalar>(n: usize) -> (Vec<T>, Vec<T>) {
    assert!(n >= 1);
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let nf = T::from_usize_lossy(n);
    let half = T::lit(0.5);
    for i in 0..n.div_ceil(2) {
        let mut x = (T::PI() * (T::from_usize_lossy(i) + T::lit(0.75)) / (nf + half)).cos();
        let mut dp = T::one();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= T::epsilon() * T::lit(4.0) {
                let (_, d) = legendre_with_derivative(n, x);
                dp = d;
                break;
            }
        }
        let w = T::lit(2.0) / ((T::one() - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative<T: Scalar>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    for k in 2..=n {
        let kf = T::from_usize_lossy(k);
        let p2 = ((T::lit(2.0) * kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (T::one(), T::zero());
    }
    let nf = T::from_usize_lossy(n);
    let d = nf * (x * p1 - p0) / (x * x - T::one());
    (p1, d)
}

/// Composite Gauss–Legendre rule over consecutive breakpoints.
#[derive(Debug, Clone)]
pub struct CompositeGauss<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Scalar> CompositeGauss<T> {
    pub fn new(order: usize) -> Self {
        let (nodes, weights) = gauss_legendre(order);
        Self { nodes, weights }
    }

    pub fn integrate<F: FnMut(T) -> T>(&self, breakpoints: &[T], mut f: F) -> T {
        let two = T::lit(2.0);
        let mut total = T::zero();
        for w in breakpoints.windows(2) {
            let (a, b) = (w[0], w[1]);
            let mid = (a + b) / two;
            let half = (b - a) / two;
            let mut s = T::zero();
            for (&x, &wt) in self.nodes.iter().zip(&self.weights) {
                s += wt * f(mid + half * x);
            }
            total += s * half;
        }
        total
    }
}

/// Composite Simpson rule with an even panel count.
pub fn simpson<T: Scalar, F: Fn(T) -> T>(a: T, b: T, panels: usize, f: F) -> T {
    let panels = panels + panels % 2;
    if b == a {
        return T::zero();
    }
    let h = (b - a) / T::from_usize_lossy(panels);
    let mut s = f(a) + f(b);
    for i in 1..panels {
        let x = a + h * T::from_usize_lossy(i);
        s += if i % 2 == 1 { T::lit(4.0) } else { T::lit(2.0) } * f(x);
    }
    s * h / T::lit(3.0)
}

/// Trapezoidal rule for an `ell`-periodic integrand on `points` equispaced nodes.
pub fn periodic_trapezoid<T: Scalar, F: FnMut(T) -> T>(ell: T, points: usize, mut f: F) -> T {
    let h = ell / T::from_usize_lossy(points);
    let mut s = T::zero();
    for j in 0..points {
        s += f(h * T::from_usize_lossy(j));
    }
    s * h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let g = CompositeGauss::<f64>::new(6);
        // degree 11 is the exactness limit for 6 nodes
        let v = g.integrate(&[0.0, 1.0], |x| x.powi(11));
        assert!((v - 1.0 / 12.0).abs() < 1e-15);
        let (_, w) = gauss_legendre::<f64>(17);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn simpson_and_trapezoid() {
        let v = simpson(0.0_f64, std::f64::consts::PI, 1000, |x| x.sin());
        assert!((v - 2.0).abs() < 1e-11);
        let ell = 3.0_f64;
        let w = periodic_trapezoid(ell, 64, |y| (2.0 * std::f64::consts::PI * y / ell).cos().powi(2));
        assert!((w - ell / 2.0).abs() < 1e-14);
    }
}
