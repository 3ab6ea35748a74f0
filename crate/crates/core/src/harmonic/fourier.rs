//! Fourier analysis of max filters on `R^2 / C_r`.
//!
//! On the unit circle the max filter against `e_0` is the kernel
//! `f(theta) = max_j cos(theta - 2 pi j / r)`. Coefficients are normalized
//! as `f^(k) = (1/2pi) int f(theta) e^{-ik theta} dtheta`, and convolution as
//! `(c * f)(theta) = (1/2pi) int c(phi) f(theta - phi) dphi`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

/// Relative tolerance for treating a coefficient off `rZ` as zero.
pub const INVARIANCE_TOL: f64 = 1e-12;

/// `max_j cos(theta - 2 pi j / r)`.
pub fn kernel(r: usize, theta: f64) -> f64 {
    let step = TAU / r as f64;
    // Nearest multiple of the rotation step attains the max.
    let j = (theta / step).round();
    (theta - j * step).cos()
}

/// Closed-form `f^(k)`: `(-1)^{m+1} (r/pi) sin(pi/r) / ((rm)^2 - 1)` for
/// `k = rm`, and zero when `r` does not divide `k`.
pub fn kernel_fourier(r: usize, k: i64) -> f64 {
    assert!(r >= 2, "rotation order must be at least 2");
    let ri = r as i64;
    if k % ri != 0 {
        return 0.0;
    }
    let m = k / ri;
    let sign = if m % 2 == 0 { -1.0 } else { 1.0 };
    let rf = r as f64;
    let km = k as f64;
    sign * (rf / PI) * (PI / rf).sin() / (km * km - 1.0)
}

/// `f^(k)` by Gauss–Legendre quadrature on the smooth pieces of `f`.
pub fn kernel_fourier_quadrature(r: usize, k: i64, nodes_per_piece: usize) -> Complex64 {
    let gl = GaussLegendre::new(nodes_per_piece);
    let step = TAU / r as f64;
    // Kinks sit at odd multiples of pi/r.
    let breaks: Vec<f64> = (0..=r).map(|j| -step / 2.0 + j as f64 * step).collect();
    let kf = k as f64;
    let re = gl.integrate_breaks(&breaks, 1, |t| kernel(r, t) * (kf * t).cos());
    let im = gl.integrate_breaks(&breaks, 1, |t| -kernel(r, t) * (kf * t).sin());
    Complex64::new(re, im) / TAU
}

/// Real trigonometric polynomial `sum_{|k| <= K} g^(k) e^{ik theta}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrigPolynomial {
    /// Coefficients for `k = -K..=K`.
    coeffs: Vec<Complex64>,
}

impl TrigPolynomial {
    /// From coefficients `k = -K..=K`; they must be conjugate-symmetric.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() % 2 == 0 {
            return Err(Error::InvalidArgument("need an odd number of coefficients -K..=K".into()));
        }
        let k = coeffs.len() / 2;
        let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max).max(1.0);
        for j in 1..=k {
            if (coeffs[k + j] - coeffs[k - j].conj()).norm() > INVARIANCE_TOL * scale {
                return Err(Error::InvalidArgument(format!("coefficients at +-{j} are not conjugate")));
            }
        }
        if coeffs[k].im.abs() > INVARIANCE_TOL * scale {
            return Err(Error::InvalidArgument("constant coefficient must be real".into()));
        }
        Ok(Self { coeffs })
    }

    /// `a_0 + sum_k (a_k cos k theta + b_k sin k theta)`, with `cos[0] = a_0`
    /// and `sin[0]` ignored.
    pub fn from_cos_sin(cos: &[f64], sin: &[f64]) -> Self {
        let k = cos.len().max(sin.len()).saturating_sub(1);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * k + 1];
        coeffs[k] = Complex64::new(cos.first().copied().unwrap_or(0.0), 0.0);
        for j in 1..=k {
            let a = cos.get(j).copied().unwrap_or(0.0);
            let b = sin.get(j).copied().unwrap_or(0.0);
            // a cos + b sin = (a - ib)/2 e^{ij} + (a + ib)/2 e^{-ij}
            coeffs[k + j] = Complex64::new(a / 2.0, -b / 2.0);
            coeffs[k - j] = Complex64::new(a / 2.0, b / 2.0);
        }
        Self { coeffs }
    }

    /// Interpolates a real function of degree at most `k` from `4k + 4`
    /// equispaced samples.
    pub fn from_samples(k: usize, f: impl Fn(f64) -> f64) -> Self {
        let n = 4 * k + 4;
        let samples: Vec<f64> = (0..n).map(|i| f(TAU * i as f64 / n as f64)).collect();
        let coeffs = (-(k as i64)..=k as i64)
            .map(|j| {
                samples.iter().enumerate().fold(Complex64::new(0.0, 0.0), |acc, (i, &v)| {
                    acc + Complex64::from_polar(v, -(j as f64) * TAU * i as f64 / n as f64)
                }) / n as f64
            })
            .collect::<Vec<_>>();
        let mut p = Self { coeffs };
        p.symmetrize();
        p
    }

    fn symmetrize(&mut self) {
        let k = self.degree();
        self.coeffs[k].im = 0.0;
        for j in 1..=k {
            let avg = (self.coeffs[k + j] + self.coeffs[k - j].conj()) / 2.0;
            self.coeffs[k + j] = avg;
            self.coeffs[k - j] = avg.conj();
        }
    }

    /// Largest frequency `K`.
    pub fn degree(&self) -> usize {
        self.coeffs.len() / 2
    }

    /// `g^(k)`, zero beyond the degree.
    pub fn coeff(&self, k: i64) -> Complex64 {
        let kk = self.degree() as i64;
        if k.abs() > kk {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(k + kk) as usize]
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let k = self.degree();
        let z = Complex64::from_polar(1.0, theta);
        let (mut v, mut zj) = (self.coeffs[k].re, z);
        for j in 1..=k {
            v += 2.0 * (self.coeffs[k + j] * zj).re;
            zj *= z;
        }
        v
    }

    /// `g'(theta)`.
    pub fn derivative(&self, theta: f64) -> f64 {
        let k = self.degree();
        let z = Complex64::from_polar(1.0, theta);
        let (mut v, mut zj) = (0.0, z);
        for j in 1..=k {
            v += 2.0 * (self.coeffs[k + j] * Complex64::new(0.0, j as f64) * zj).re;
            zj *= z;
        }
        v
    }

    /// Whether `g^(k) = 0` unless `r | k`, i.e. `g` has period `2 pi / r`.
    pub fn is_invariant(&self, r: usize) -> bool {
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max).max(1.0);
        let kk = self.degree() as i64;
        (-kk..=kk).all(|k| k % r as i64 == 0 || self.coeff(k).norm() <= INVARIANCE_TOL * scale)
    }

    /// `(c * f)` for the `C_r` kernel: multiplies coefficients by `f^(k)`.
    pub fn convolve_kernel(&self, r: usize) -> Self {
        let kk = self.degree() as i64;
        Self { coeffs: (-kk..=kk).map(|k| self.coeff(k) * kernel_fourier(r, k)).collect() }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    /// Evaluates the positively homogeneous extension `||x|| g(arg x)`.
    pub fn homogeneous(&self, x: &[f64]) -> f64 {
        let r = x[0].hypot(x[1]);
        if r == 0.0 {
            0.0
        } else {
            r * self.eval(x[1].atan2(x[0]))
        }
    }

    /// Gradient of the homogeneous extension at `x != 0`:
    /// `g(theta) u + g'(theta) u_perp` with `u = x/||x||`.
    pub fn homogeneous_gradient(&self, x: &[f64]) -> [f64; 2] {
        let theta = x[1].atan2(x[0]);
        let (s, c) = theta.sin_cos();
        let (g, dg) = (self.eval(theta), self.derivative(theta));
        [g * c - dg * s, g * s + dg * c]
    }
}

/// Coefficient function `c` with `c * f = g`, i.e. `c^(k) = g^(k) / f^(k)`.
pub fn deconvolve(r: usize, g: &TrigPolynomial) -> Result<TrigPolynomial> {
    if r < 2 {
        return Err(Error::InvalidArgument(format!("rotation order must be at least 2, got {r}")));
    }
    if !g.is_invariant(r) {
        return Err(Error::NotInvariant(format!("trigonometric polynomial has frequencies off {r}Z")));
    }
    let kk = g.degree() as i64;
    let coeffs = (-kk..=kk)
        .map(|k| if k % r as i64 == 0 { g.coeff(k) / kernel_fourier(r, k) } else { Complex64::new(0.0, 0.0) })
        .collect();
    Ok(TrigPolynomial { coeffs })
}

/// Sup over `n_theta` equispaced angles of
/// `|(1/2pi) int c(phi) f(theta - phi) dphi - g(theta)|`, integrating with
/// `n_quad` Gauss–Legendre nodes spread over the smooth pieces.
pub fn verify_integral_identity(
    r: usize,
    g: &TrigPolynomial,
    c: &TrigPolynomial,
    n_theta: usize,
    n_quad: usize,
) -> f64 {
    const NODES: usize = 16;
    let panels = (n_quad / (r * NODES)).max(1);
    let gl = GaussLegendre::new(NODES);
    let step = TAU / r as f64;
    (0..n_theta)
        .into_par_iter()
        .map(|i| {
            let theta = TAU * i as f64 / n_theta as f64;
            // Kinks of phi -> f(theta - phi) sit at theta - pi/r - j step.
            let start = theta - step / 2.0 - TAU;
            let breaks: Vec<f64> = (0..=r).map(|j| start + j as f64 * step).collect();
            let conv = gl.integrate_breaks(&breaks, panels, |phi| c.eval(phi) * kernel(r, theta - phi)) / TAU;
            (conv - g.eval(theta)).abs()
        })
        .reduce(|| 0.0, f64::max)
}
