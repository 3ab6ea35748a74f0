//! Densities `q` on `S^{d-1}` with `int q(y) |<x, y>| dy = p(x)` for even
//! spherical harmonics `p`: by Funk–Hecke, `q = p / c_k`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::rotated_fibonacci_sphere;
use crate::rng;

use super::gegenbauer::{GegenbauerTable, MAX_DEGREE};

/// Smallest `|c_k|` accepted as a divisor.
pub const MIN_COEFFICIENT: f64 = 1e-12;

/// Laplacian coefficients below this count as zero.
const HARMONIC_TOL: f64 = 1e-12;

/// A homogeneous polynomial in `dim` variables, as monomial exponents and
/// coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomogeneousPolynomial {
    dim: usize,
    degree: usize,
    terms: BTreeMap<Vec<u32>, f64>,
}

impl HomogeneousPolynomial {
    pub fn new(dim: usize, terms: impl IntoIterator<Item = (Vec<u32>, f64)>) -> Result<Self> {
        let mut map: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        let mut degree = None;
        for (e, c) in terms {
            if e.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: e.len() });
            }
            let deg = e.iter().sum::<u32>() as usize;
            if *degree.get_or_insert(deg) != deg {
                return Err(Error::InvalidArgument("monomials of different degrees".into()));
            }
            *map.entry(e).or_default() += c;
        }
        map.retain(|_, c| *c != 0.0);
        Ok(Self { dim, degree: degree.unwrap_or(0), terms: map })
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        Self::new(dim, [(vec![0; dim], c)]).expect("consistent monomial")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| c * e.iter().zip(x).map(|(&k, &xi)| xi.powi(k as i32)).product::<f64>())
            .sum()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect(), ..self.clone() }
    }

    /// Coefficients of the Laplacian, keyed by monomial.
    pub fn laplacian(&self) -> BTreeMap<Vec<u32>, f64> {
        let mut out: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        for (e, c) in &self.terms {
            for i in 0..self.dim {
                if e[i] >= 2 {
                    let mut f = e.clone();
                    f[i] -= 2;
                    *out.entry(f).or_default() += c * (e[i] * (e[i] - 1)) as f64;
                }
            }
        }
        out
    }

    pub fn is_harmonic(&self) -> bool {
        let scale = self.terms.values().fold(1.0f64, |a, c| a.max(c.abs()));
        self.laplacian().values().all(|c| c.abs() <= HARMONIC_TOL * scale)
    }
}

/// `q = p / c_k` together with the coefficient used.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhaseDensity {
    pub q: HomogeneousPolynomial,
    pub degree: usize,
    pub coefficient: f64,
}

/// Density reproducing the even harmonic `p` against `|<x, y>|` under the
/// unnormalized surface measure.
pub fn pr_coefficient_q(d: usize, p: &HomogeneousPolynomial) -> Result<PhaseDensity> {
    if p.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: p.dim() });
    }
    let k = p.degree();
    if k % 2 == 1 {
        return Err(Error::InvalidArgument(format!("degree {k} is odd; |<x, y>| only reproduces even harmonics")));
    }
    if k > MAX_DEGREE {
        return Err(Error::DegreeTooLarge { degree: k, max: MAX_DEGREE });
    }
    if !p.is_harmonic() {
        return Err(Error::InvalidArgument("polynomial is not harmonic".into()));
    }
    let coefficient = GegenbauerTable::new(d, k)?.coefficients[k];
    if coefficient.abs() < MIN_COEFFICIENT {
        return Err(Error::DegenerateData(format!("c_{k} = {coefficient:e} is too small to divide by")));
    }
    Ok(PhaseDensity { q: p.scaled(1.0 / coefficient), degree: k, coefficient })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReproductionSample {
    pub x: Vec<f64>,
    pub expected: f64,
    pub estimate: f64,
}

impl ReproductionSample {
    pub fn relative_error(&self) -> f64 {
        (self.estimate - self.expected).abs() / self.expected.abs()
    }
}

/// Estimates `int_{S^2} q(y) |<x, y>| dy` at `n_points` random unit `x`
/// with a randomly rotated Fibonacci lattice of `n_samples` nodes.
pub fn reproducing_check(
    density: &PhaseDensity,
    p: &HomogeneousPolynomial,
    n_points: usize,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<ReproductionSample>> {
    if p.dim() != 3 {
        return Err(Error::Unsupported("the lattice rule covers S^2 only".into()));
    }
    let mut r = rng::stream(seed, "reproducing-lattice", 0);
    let nodes = rotated_fibonacci_sphere(n_samples, &mut r);
    let qy: Vec<f64> = nodes.par_iter().map(|y| density.q.eval(y)).collect();
    let weight = 4.0 * std::f64::consts::PI / n_samples as f64;
    let mut rx = rng::stream(seed, "reproducing-points", 0);
    Ok((0..n_points)
        .map(|_| {
            let x: Vec<f64> = rng::unit_vector(&mut rx, 3);
            let estimate = weight
                * nodes
                    .par_iter()
                    .zip(&qy)
                    .map(|(y, q)| q * (x[0] * y[0] + x[1] * y[1] + x[2] * y[2]).abs())
                    .sum::<f64>();
            ReproductionSample { expected: p.eval(&x), x, estimate }
        })
        .collect())
}
