//! Gauss–Legendre quadrature and spherical point sets.

use std::f64::consts::PI;

use rand::Rng;

use crate::linalg::{self, Matrix};
use crate::rng;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "quadrature needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A reusable composite Gauss–Legendre rule.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        let (nodes, weights) = gauss_legendre(n);
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// `int_a^b f` with one panel.
    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        half * self.nodes.iter().zip(&self.weights).map(|(&t, &w)| w * f(mid + half * t)).sum::<f64>()
    }

    /// `int_a^b f` over `panels` equal panels.
    pub fn integrate_panels(&self, a: f64, b: f64, panels: usize, f: impl Fn(f64) -> f64) -> f64 {
        let h = (b - a) / panels as f64;
        (0..panels).map(|i| self.integrate(a + i as f64 * h, a + (i + 1) as f64 * h, &f)).sum()
    }

    /// `int f` over consecutive breakpoints, each interval split into
    /// `panels` equal panels. Kinks of `f` belong at the breakpoints.
    pub fn integrate_breaks(&self, breaks: &[f64], panels: usize, f: impl Fn(f64) -> f64) -> f64 {
        breaks.windows(2).map(|w| self.integrate_panels(w[0], w[1], panels, &f)).sum()
    }
}

/// Spherical Fibonacci lattice of `n` points on `S^2`.
pub fn fibonacci_sphere(n: usize) -> Vec<[f64; 3]> {
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = 2.0 * PI * (i as f64 * golden).fract();
            [r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

/// Haar-random rotation of `R^3` (determinant `+1`).
pub fn random_rotation3<R: Rng + ?Sized>(rng: &mut R) -> Matrix<f64> {
    let a = Matrix::from_vec(3, 3, rng::gaussian_vec(rng, 9)).expect("shape");
    let mut q: Matrix<f64> = linalg::qr_orthogonal(&a);
    let det = q[(0, 0)] * (q[(1, 1)] * q[(2, 2)] - q[(1, 2)] * q[(2, 1)])
        - q[(0, 1)] * (q[(1, 0)] * q[(2, 2)] - q[(1, 2)] * q[(2, 0)])
        + q[(0, 2)] * (q[(1, 0)] * q[(2, 1)] - q[(1, 1)] * q[(2, 0)]);
    if det < 0.0 {
        for r in 0..3 {
            let v: f64 = q[(r, 0)];
            q.row_mut(r)[0] = -v;
        }
    }
    q
}

/// A randomly rotated spherical Fibonacci lattice: an equal-weight rule for
/// `S^2` whose rotation makes the estimate unbiased.
pub fn rotated_fibonacci_sphere<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<[f64; 3]> {
    let q = random_rotation3(rng);
    fibonacci_sphere(n)
        .into_iter()
        .map(|p| {
            let v = q.mul_vec(&p).expect("shape");
            [v[0], v[1], v[2]]
        })
        .collect()
}
