//! Gegenbauer polynomials on `S^{d-1}` and the Funk–Hecke eigenvalues of the
//! kernel `|<x, y>|`.
//!
//! `G_k` is orthogonal under the weight `(1 - t^2)^{(d-3)/2}` on `[-1, 1]`
//! and normalized by `G_k(1) = 1`. Every moment of that weight is rational
//! once divided by the total mass, so Gram–Schmidt runs in exact rational
//! arithmetic:
//!
//! * `E[t^{2i}] = prod_{l<i} (l + 1/2) / (l + d/2)`
//! * `int |t| t^{2i} w(t) dt = B(i + 1, (d-1)/2) = i! / prod_{l<=i} (l + (d-1)/2)`
//!
//! The eigenvalues are `c_k = omega_{d-2} int |t| G_k(t) w(t) dt` with
//! `omega_n` the surface area of `S^n`.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

/// Largest degree tabulated.
pub const MAX_DEGREE: usize = 20;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn to_f64(q: &BigRational) -> f64 {
    // Scale down huge numerators and denominators before conversion.
    match (q.numer().to_f64(), q.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            let bits = q.numer().bits().max(q.denom().bits()).saturating_sub(900);
            let n = (q.numer() >> bits).to_f64().unwrap_or(0.0);
            let d = (q.denom() >> bits).to_f64().unwrap_or(1.0);
            n / d
        }
    }
}

/// Surface area of the unit sphere `S^n`.
pub fn sphere_area(n: usize) -> f64 {
    match n {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (n as f64 - 1.0) * sphere_area(n - 2),
    }
}

/// Normalized moment `E[t^j]` under the weight, exact.
fn moment(d: usize, j: usize) -> BigRational {
    if j % 2 == 1 {
        return BigRational::zero();
    }
    let mut m = BigRational::one();
    for l in 0..(j / 2) as i64 {
        // (l + 1/2) / (l + d/2) = (2l + 1) / (2l + d)
        m *= rat(2 * l + 1, 2 * l + d as i64);
    }
    m
}

/// `int_{-1}^{1} |t| t^j w(t) dt`, exact; zero for odd `j`.
fn abs_moment(d: usize, j: usize) -> BigRational {
    if j % 2 == 1 {
        return BigRational::zero();
    }
    let i = (j / 2) as i64;
    // i! / prod_{l=0}^{i} (l + (d-1)/2) = i! 2^{i+1} / prod (2l + d - 1)
    let mut v = BigRational::from_integer(BigInt::from(2));
    for l in 1..=i {
        v *= rat(2 * l, 1);
    }
    for l in 0..=i {
        v /= rat(2 * l + d as i64 - 1, 1);
    }
    v
}

/// Gegenbauer polynomials `G_0..G_K` for `S^{d-1}` and their coefficients.
#[derive(Clone, Debug, Serialize)]
pub struct GegenbauerTable {
    pub dim: usize,
    /// `polys[k][j]` is the coefficient of `t^j` in `G_k`, exact.
    #[serde(skip)]
    exact: Vec<Vec<BigRational>>,
    /// Exact `int |t| G_k(t) w(t) dt`.
    #[serde(skip)]
    reduced_exact: Vec<BigRational>,
    pub polys: Vec<Vec<f64>>,
    /// `int_{-1}^{1} |t| G_k(t) (1 - t^2)^{(d-3)/2} dt`
    pub reduced: Vec<f64>,
    /// `c_k = omega_{d-2} * reduced[k]`
    pub coefficients: Vec<f64>,
}

impl GegenbauerTable {
    pub fn new(dim: usize, max_degree: usize) -> Result<Self> {
        if dim < 3 {
            return Err(Error::InvalidArgument(format!("Gegenbauer tables need d >= 3, got {dim}")));
        }
        if max_degree > MAX_DEGREE {
            return Err(Error::DegreeTooLarge { degree: max_degree, max: MAX_DEGREE });
        }
        let inner = |p: &[BigRational], q: &[BigRational]| -> BigRational {
            let mut s = BigRational::zero();
            for (i, a) in p.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (j, b) in q.iter().enumerate() {
                    if !b.is_zero() {
                        s += a * b * moment(dim, i + j);
                    }
                }
            }
            s
        };
        let mut exact: Vec<Vec<BigRational>> = Vec::with_capacity(max_degree + 1);
        for k in 0..=max_degree {
            let mut p = vec![BigRational::zero(); k + 1];
            p[k] = BigRational::one();
            for q in &exact {
                let proj = inner(&p, q) / inner(q, q);
                for (j, c) in q.iter().enumerate() {
                    p[j] -= &proj * c;
                }
            }
            let at_one: BigRational = p.iter().sum();
            for c in p.iter_mut() {
                *c /= &at_one;
            }
            exact.push(p);
        }
        let reduced_exact: Vec<BigRational> = exact
            .iter()
            .map(|p| p.iter().enumerate().map(|(j, c)| c * abs_moment(dim, j)).sum())
            .collect();
        let omega = sphere_area(dim - 2);
        let reduced: Vec<f64> = reduced_exact.iter().map(to_f64).collect();
        Ok(Self {
            dim,
            polys: exact.iter().map(|p| p.iter().map(to_f64).collect()).collect(),
            coefficients: reduced.iter().map(|r| omega * r).collect(),
            reduced,
            reduced_exact,
            exact,
        })
    }

    pub fn max_degree(&self) -> usize {
        self.polys.len() - 1
    }

    /// Exact coefficients of `G_k`, lowest degree first.
    pub fn exact_poly(&self, k: usize) -> &[BigRational] {
        &self.exact[k]
    }

    /// Exact `int |t| G_k(t) w(t) dt`.
    pub fn exact_reduced(&self, k: usize) -> &BigRational {
        &self.reduced_exact[k]
    }

    /// Sign of `c_k` from exact arithmetic: `-1`, `0` or `1`.
    pub fn sign(&self, k: usize) -> i8 {
        let r = &self.reduced_exact[k];
        if r.is_zero() {
            0
        } else if r.is_positive() {
            1
        } else {
            -1
        }
    }

    /// `G_k(t)` by Horner's rule.
    pub fn eval(&self, k: usize, t: f64) -> f64 {
        self.polys[k].iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }
}

/// `int_{-1}^{1} f(t) (1 - t^2)^{(d-3)/2} dt` via `t = cos(theta)`, which
/// turns the weight into the smooth `sin^{d-2} theta`.
pub fn weighted_integral(dim: usize, nodes: usize, f: impl Fn(f64) -> f64) -> f64 {
    let gl = GaussLegendre::new(nodes);
    let p = dim as i32 - 2;
    gl.integrate_breaks(&[0.0, PI / 2.0, PI], 4, |th| f(th.cos()) * th.sin().powi(p))
}

/// Quadrature value of `int |t| G_k(t) w(t) dt`, split at the kink `t = 0`.
pub fn reduced_by_quadrature(table: &GegenbauerTable, k: usize) -> f64 {
    weighted_integral(table.dim, 40, |t| t.abs() * table.eval(k, t))
}
