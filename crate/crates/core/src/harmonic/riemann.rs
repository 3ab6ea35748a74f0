//! Finite max-filter banks approximating integral combinations of max
//! filters, and Lipschitz norm estimates for checking the approximation.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use rayon::prelude::*;
use serde::Serialize;

use crate::embeddings::{Embedding, EmbeddingModel};
use crate::error::{check_dim, Error, Result};
use crate::filters::{FilterBank, LinearMap};
use crate::groups::GroupSpec;
use crate::linalg::{self, Matrix};
use crate::rng;

use super::fourier::{deconvolve, TrigPolynomial};
use super::partition::{make_partition, SpherePartition};

/// A point is treated as a kink of a max filter when two distinct orbit
/// points come within this of the maximum.
pub const KINK_TOL: f64 = 1e-9;

/// Step for central differences.
const FD_STEP: f64 = 1e-6;

/// Relative disagreement of one-sided differences that flags a kink.
const FD_KINK_TOL: f64 = 1e-4;

/// Gradient of a scalar map at a point.
#[derive(Clone, Debug, PartialEq)]
pub enum Gradient {
    At(Vec<f64>),
    /// Not differentiable (or too close to call) here.
    Kink,
}

/// A real-valued map on `R^d`.
pub trait ScalarMap: Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;

    /// Analytic (sub)gradient, if the map has one.
    fn gradient(&self, _x: &[f64]) -> Option<Gradient> {
        None
    }
}

/// `x -> <x, v>`.
#[derive(Clone, Debug)]
pub struct LinearFunctional(pub Vec<f64>);

impl ScalarMap for LinearFunctional {
    fn dim(&self) -> usize {
        self.0.len()
    }
    fn value(&self, x: &[f64]) -> f64 {
        linalg::dot(x, &self.0)
    }
    fn gradient(&self, _x: &[f64]) -> Option<Gradient> {
        Some(Gradient::At(self.0.clone()))
    }
}

/// `x -> sum_k w_k max_g <x, g y_k>`.
#[derive(Clone, Debug)]
pub struct BankCombination {
    pub bank: FilterBank<f64>,
    pub weights: Vec<f64>,
}

impl BankCombination {
    pub fn new(bank: FilterBank<f64>, weights: Vec<f64>) -> Result<Self> {
        check_dim(bank.len(), weights.len())?;
        Ok(Self { bank, weights })
    }

    /// Reads the single row of a `1 x n` linear map as weights.
    pub fn from_row(bank: FilterBank<f64>, row: &LinearMap<f64>) -> Result<Self> {
        if row.output_dim() != 1 {
            return Err(Error::ShapeMismatch(format!("expected a 1 x n map, got {} rows", row.output_dim())));
        }
        Self::new(bank, row.matrix().row(0).to_vec())
    }
}

impl ScalarMap for BankCombination {
    fn dim(&self) -> usize {
        self.bank.input_dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        let phi = self.bank.apply(x).expect("dimension checked by caller");
        linalg::dot(&phi, &self.weights)
    }
    fn gradient(&self, x: &[f64]) -> Option<Gradient> {
        let g = self.bank.group();
        let mut grad = vec![0.0; x.len()];
        for (y, &w) in self.bank.templates().row_iter().zip(&self.weights) {
            if w == 0.0 {
                continue;
            }
            if g.argmax_gap(x, y).is_some_and(|gap| gap < KINK_TOL) {
                return Some(Gradient::Kink);
            }
            let a = g.argmax_inner(x, y).ok()?;
            linalg::axpy(w, &a.aligned, &mut grad);
        }
        Some(Gradient::At(grad))
    }
}

/// The positively homogeneous extension `||x|| g(arg x)` on `R^2`.
#[derive(Clone, Debug)]
pub struct HomogeneousTrig(pub TrigPolynomial);

impl ScalarMap for HomogeneousTrig {
    fn dim(&self) -> usize {
        2
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.0.homogeneous(x)
    }
    fn gradient(&self, x: &[f64]) -> Option<Gradient> {
        Some(if x[0] == 0.0 && x[1] == 0.0 {
            Gradient::Kink
        } else {
            Gradient::At(self.0.homogeneous_gradient(x).to_vec())
        })
    }
}

/// `a - b`.
pub struct Difference<A, B>(pub A, pub B);

impl<A: ScalarMap, B: ScalarMap> ScalarMap for Difference<A, B> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.0.value(x) - self.1.value(x)
    }
    fn gradient(&self, x: &[f64]) -> Option<Gradient> {
        let ga = self.0.gradient(x).unwrap_or_else(|| numeric_gradient(&self.0, x));
        let gb = self.1.gradient(x).unwrap_or_else(|| numeric_gradient(&self.1, x));
        Some(match (ga, gb) {
            (Gradient::At(a), Gradient::At(b)) => Gradient::At(linalg::sub(&a, &b)),
            _ => Gradient::Kink,
        })
    }
}

/// A closure with no analytic gradient.
pub struct FnScalar<F> {
    pub dim: usize,
    pub f: F,
}

impl<F: Fn(&[f64]) -> f64 + Sync> ScalarMap for FnScalar<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}

/// Central differences, or [`Gradient::Kink`] when one-sided differences
/// disagree.
pub fn numeric_gradient<M: ScalarMap + ?Sized>(f: &M, x: &[f64]) -> Gradient {
    let f0 = f.value(x);
    let mut grad = Vec::with_capacity(x.len());
    let mut xp = x.to_vec();
    for i in 0..x.len() {
        xp[i] = x[i] + FD_STEP;
        let fp = f.value(&xp);
        xp[i] = x[i] - FD_STEP;
        let fm = f.value(&xp);
        xp[i] = x[i];
        let (fwd, bwd) = ((fp - f0) / FD_STEP, (f0 - fm) / FD_STEP);
        if (fwd - bwd).abs() > FD_KINK_TOL * (1.0 + fwd.abs().max(bwd.abs())) {
            return Gradient::Kink;
        }
        grad.push(0.5 * (fwd + bwd));
    }
    Gradient::At(grad)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LipEstimate {
    /// Max gradient norm over the evaluated points.
    pub value: f64,
    pub evaluated: usize,
    pub skipped: usize,
}

fn sphere_samples(dim: usize, n_samples: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut r = rng::stream(seed, "lip-samples", 0);
    (0..n_samples).map(|_| rng::unit_vector(&mut r, dim)).collect()
}

fn reduce(norms: Vec<Option<f64>>) -> LipEstimate {
    let evaluated = norms.iter().flatten().count();
    LipEstimate {
        value: norms.iter().flatten().fold(0.0, |a, &b| a.max(b)),
        evaluated,
        skipped: norms.len() - evaluated,
    }
}

/// Lipschitz norm of a positively homogeneous scalar map, as the largest
/// gradient norm over `n_samples` uniform points of the unit sphere. Kinks
/// are skipped.
pub fn lip_norm_estimate<M: ScalarMap + ?Sized>(f: &M, n_samples: usize, seed: u64) -> LipEstimate {
    let pts = sphere_samples(f.dim(), n_samples, seed);
    let norms = pts
        .par_iter()
        .map(|x| match f.gradient(x).unwrap_or_else(|| numeric_gradient(f, x)) {
            Gradient::At(g) => Some(linalg::norm(&g)),
            Gradient::Kink => None,
        })
        .collect();
    reduce(norms)
}

/// Lipschitz norm of a positively homogeneous embedding: the largest spectral
/// norm of a central-difference Jacobian over sphere samples.
pub fn lip_norm_embedding<E: Embedding<f64> + ?Sized>(f: &E, n_samples: usize, seed: u64) -> Result<LipEstimate> {
    let pts = sphere_samples(f.input_dim(), n_samples, seed);
    let norms = pts
        .par_iter()
        .map(|x| -> Result<Option<f64>> {
            let f0 = f.embed(x)?;
            let (d, m) = (x.len(), f0.len());
            let mut jac = Matrix::zeros(m, d);
            let mut xp = x.clone();
            for j in 0..d {
                xp[j] = x[j] + FD_STEP;
                let fp = f.embed(&xp)?;
                xp[j] = x[j] - FD_STEP;
                let fm = f.embed(&xp)?;
                xp[j] = x[j];
                for i in 0..m {
                    let (fwd, bwd) = ((fp[i] - f0[i]) / FD_STEP, (f0[i] - fm[i]) / FD_STEP);
                    if (fwd - bwd).abs() > FD_KINK_TOL * (1.0 + fwd.abs().max(bwd.abs())) {
                        return Ok(None);
                    }
                    jac[(i, j)] = 0.5 * (fwd + bwd);
                }
            }
            Ok(linalg::svd(&jac).s.first().copied().or(Some(0.0)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(reduce(norms))
}

/// Bank with templates `y_k` and the `1 x n` row `(q(y_k) |I_k|)_k`, the
/// Riemann sum of `x -> int q(y) max_g <x, g y> dy` over `partition`.
pub fn riemann_bank(
    group: &GroupSpec<f64>,
    q: impl Fn(&[f64]) -> f64,
    partition: &SpherePartition,
) -> Result<(FilterBank<f64>, LinearMap<f64>)> {
    check_dim(partition.dim, group.ambient_dim())?;
    let templates: Vec<Vec<f64>> = partition.cells.iter().map(|c| c.representative.clone()).collect();
    let row: Vec<f64> = partition.cells.iter().map(|c| q(&c.representative) * c.measure).collect();
    let bank = FilterBank::new(group.clone(), templates)?;
    let linear = LinearMap::new(Matrix::from_rows(&[row])?)?;
    Ok((bank, linear))
}

/// Arc-length density `q = c / 2pi` of a coefficient function, so that
/// `g(theta) = int_{S^1} q(y) max_j <x, rot_j y> dy` for unit `x` at angle
/// `theta`.
pub fn arc_density(c: &TrigPolynomial) -> impl Fn(&[f64]) -> f64 + '_ {
    move |y: &[f64]| c.eval(y[1].atan2(y[0])) / TAU
}

/// Group whose max filters realize the kernel `max_j cos(theta - 2 pi j / r)`.
pub fn planar_group(r: usize) -> GroupSpec<f64> {
    if r == 2 {
        GroupSpec::sign_flip(2)
    } else {
        GroupSpec::planar_rotation(r)
    }
}

/// Riemann bank for the homogeneous extension of a `C_r`-invariant `g`,
/// over `n` equal arcs.
pub fn planar_riemann_bank(
    r: usize,
    g: &TrigPolynomial,
    n: usize,
) -> Result<(FilterBank<f64>, LinearMap<f64>)> {
    let c = deconvolve(r, g)?;
    riemann_bank(&planar_group(r), arc_density(&c), &make_partition(2, n)?)
}

/// One shared bank of `n` arc midpoints with one output row per invariant in
/// `gs`.
pub fn planar_riemann_embedding(r: usize, gs: &[TrigPolynomial], n: usize) -> Result<EmbeddingModel<f64>> {
    let partition = make_partition(2, n)?;
    let group = planar_group(r);
    let mut rows = Vec::with_capacity(gs.len());
    let mut bank = None;
    for g in gs {
        let c = deconvolve(r, g)?;
        let (b, l) = riemann_bank(&group, arc_density(&c), &partition)?;
        rows.push(l.matrix().row(0).to_vec());
        bank.get_or_insert(b);
    }
    let bank = bank.ok_or_else(|| Error::InvalidArgument("no invariants given".into()))?;
    EmbeddingModel::lmf(LinearMap::new(Matrix::from_rows(&rows)?)?, bank)
}

/// `cos^2`, `sin^2` and `sqrt 2 cos sin`: the homogeneous extensions are the
/// entries of the flattened `x x^T / ||x||`.
pub fn psd_invariants() -> [TrigPolynomial; 3] {
    [
        TrigPolynomial::from_cos_sin(&[0.5, 0.0, 0.5], &[]),
        TrigPolynomial::from_cos_sin(&[0.5, 0.0, -0.5], &[]),
        TrigPolynomial::from_cos_sin(&[], &[0.0, 0.0, FRAC_1_SQRT_2]),
    ]
}

/// One point of a convergence study.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatePoint {
    pub n: usize,
    pub epsilon: f64,
    pub lip_error: f64,
}

/// `Lip(p_hat - p)` for the Riemann bank of `g` at each arc count.
pub fn riemann_rate(r: usize, g: &TrigPolynomial, ns: &[usize], n_samples: usize, seed: u64) -> Result<Vec<RatePoint>> {
    ns.iter()
        .map(|&n| {
            let (bank, row) = planar_riemann_bank(r, g, n)?;
            let diff = Difference(BankCombination::from_row(bank, &row)?, HomogeneousTrig(g.clone()));
            let est = lip_norm_estimate(&diff, n_samples, seed);
            Ok(RatePoint { n, epsilon: make_partition(2, n)?.epsilon, lip_error: est.value })
        })
        .collect()
}

/// Least-squares slope of `log lip_error` against `log epsilon`.
pub fn loglog_slope(points: &[RatePoint]) -> f64 {
    let xs: Vec<f64> = points.iter().map(|p| p.epsilon.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.lip_error.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}
