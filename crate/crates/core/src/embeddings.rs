//! Reference invariant maps: the optimal embeddings of planar rotation
//! quotients, real phase retrieval and reflection groups, the classical
//! invariant polynomials, their homogeneous extensions, and the trainable
//! architectures built from max filter banks.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::filters::{lmf_apply, FilterBank, LinearMap};
use crate::groups::{GroupKind, GroupSpec};
use crate::linalg::{self, Matrix};
use crate::metrics::sorted_desc;
use crate::scalar::Real;

/// A map `V -> R^n`.
pub trait Embedding<T: Real>: Sync {
    fn input_dim(&self) -> usize;
    fn output_dim(&self) -> usize;
    fn embed(&self, x: &[T]) -> Result<Vec<T>>;

    /// Embeds every point, in parallel.
    fn embed_all(&self, xs: &[Vec<T>]) -> Result<Vec<Vec<T>>> {
        xs.par_iter().map(|x| self.embed(x)).collect()
    }
}

/// Wraps a closure as an [`Embedding`].
pub struct FnEmbedding<F> {
    input_dim: usize,
    output_dim: usize,
    f: F,
}

impl<F> FnEmbedding<F> {
    pub fn new(input_dim: usize, output_dim: usize, f: F) -> Self {
        Self { input_dim, output_dim, f }
    }
}

impl<T: Real, F: Fn(&[T]) -> Vec<T> + Sync> Embedding<T> for FnEmbedding<F> {
    fn input_dim(&self) -> usize {
        self.input_dim
    }
    fn output_dim(&self) -> usize {
        self.output_dim
    }
    fn embed(&self, x: &[T]) -> Result<Vec<T>> {
        check_dim(self.input_dim, x.len())?;
        let y = (self.f)(x);
        check_dim(self.output_dim, y.len())?;
        Ok(y)
    }
}

impl<T: Real> Embedding<T> for FilterBank<T> {
    fn input_dim(&self) -> usize {
        FilterBank::input_dim(self)
    }
    fn output_dim(&self) -> usize {
        self.len()
    }
    fn embed(&self, x: &[T]) -> Result<Vec<T>> {
        self.apply(x)
    }
}

/// One row of the table of classical invariant polynomials.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "row", rename_all = "snake_case", deny_unknown_fields)]
pub enum PolyRow {
    /// `x x^T` on `R^dim` under `{+-I}`.
    OuterProduct { dim: usize },
    /// Power sums `sum_j x_j^k`, `k = 1..dim`, under `S_dim`.
    PowerSums { dim: usize },
    /// Bispectrum `x^(a) x^(b) x^(-a-b)` on `l^2(Z_dim)` under `C_dim`.
    Bispectrum { dim: usize },
    /// `z^order` on `C` under `C_order`.
    ComplexPower { order: usize },
    /// `x x^*` on `C^dim` under `S^1`.
    HermitianOuter { dim: usize },
    /// Gram matrix of `count` vectors of `R^dim` under `O(dim)`.
    Gram { dim: usize, count: usize },
}

impl PolyRow {
    pub fn input_dim(&self) -> usize {
        match *self {
            PolyRow::OuterProduct { dim } | PolyRow::PowerSums { dim } | PolyRow::Bispectrum { dim } => dim,
            PolyRow::ComplexPower { .. } => 2,
            PolyRow::HermitianOuter { dim } => 2 * dim,
            PolyRow::Gram { dim, count } => dim * count,
        }
    }

    pub fn output_dim(&self) -> usize {
        match *self {
            PolyRow::OuterProduct { dim } => dim * (dim + 1) / 2,
            PolyRow::PowerSums { dim } => dim,
            PolyRow::Bispectrum { dim } => 2 * dim * dim,
            PolyRow::ComplexPower { .. } => 2,
            PolyRow::HermitianOuter { dim } => dim * dim,
            PolyRow::Gram { count, .. } => count * (count + 1) / 2,
        }
    }

    /// The group whose invariants this row lists.
    pub fn group<T: Real>(&self) -> GroupSpec<T> {
        match *self {
            PolyRow::OuterProduct { dim } => GroupSpec::sign_flip(dim),
            PolyRow::PowerSums { dim } => GroupSpec::permutation(dim),
            PolyRow::Bispectrum { dim } => GroupSpec::cyclic_shift(dim),
            PolyRow::ComplexPower { order } => GroupSpec::planar_rotation(order),
            PolyRow::HermitianOuter { dim } => GroupSpec::phase_circle(dim),
            PolyRow::Gram { dim, count } => GroupSpec::orthogonal_tuple(dim, count),
        }
    }

    /// The row matching a group, if there is one.
    pub fn for_group<T: Real>(g: &GroupSpec<T>) -> Result<Self> {
        Ok(match *g.kind() {
            GroupKind::SignFlip { dim } => PolyRow::OuterProduct { dim },
            GroupKind::Permutation { dim } => PolyRow::PowerSums { dim },
            GroupKind::CyclicShift { dim } => PolyRow::Bispectrum { dim },
            GroupKind::PlanarRotation { order } => PolyRow::ComplexPower { order },
            GroupKind::PhaseCircle { dim } => PolyRow::HermitianOuter { dim },
            GroupKind::OrthogonalTuple { dim, count } => PolyRow::Gram { dim, count },
            _ => return Err(Error::Unsupported(format!("no invariant polynomial row for {}", g.name()))),
        })
    }
}

/// Reference and trainable invariant maps, serialized as `{"model": ..., ...}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", bound = "T: Real", deny_unknown_fields)]
pub enum EmbeddingModel<T: Real> {
    MaxFilterBank { bank: FilterBank<T> },
    LinearOfBank { linear: LinearMap<T>, bank: FilterBank<T> },
    Linear { linear: LinearMap<T> },
    /// `L relu(W x)`; not invariant.
    ReluNet { w: LinearMap<T>, l: LinearMap<T> },
    OptimalPlanar { order: usize },
    OptimalPsd { dim: usize },
    WeylSort { group: GroupSpec<T> },
    Poly { row: PolyRow },
    #[serde(rename = "hpoly")]
    HPoly { row: PolyRow },
}

impl<T: Real> EmbeddingModel<T> {
    pub fn optimal_planar(order: usize) -> Result<Self> {
        if order < 2 {
            return Err(Error::InvalidArgument(format!("rotation order must be at least 2, got {order}")));
        }
        Ok(Self::OptimalPlanar { order })
    }

    pub fn weyl_sort(group: GroupSpec<T>) -> Result<Self> {
        reflection_dim(&group)?;
        Ok(Self::WeylSort { group })
    }

    pub fn lmf(linear: LinearMap<T>, bank: FilterBank<T>) -> Result<Self> {
        if linear.input_dim() != bank.len() {
            return Err(Error::ShapeMismatch(format!(
                "linear map takes {} inputs but the bank has {} templates",
                linear.input_dim(),
                bank.len()
            )));
        }
        Ok(Self::LinearOfBank { linear, bank })
    }

    pub fn relu(w: LinearMap<T>, l: LinearMap<T>) -> Result<Self> {
        if l.input_dim() != w.output_dim() {
            return Err(Error::ShapeMismatch(format!(
                "hidden width {} does not match output layer input {}",
                w.output_dim(),
                l.input_dim()
            )));
        }
        Ok(Self::ReluNet { w, l })
    }

    /// Short label such as `lmf` or `hpoly`.
    pub fn label(&self) -> &'static str {
        match self {
            Self::MaxFilterBank { .. } => "mf",
            Self::LinearOfBank { .. } => "lmf",
            Self::Linear { .. } => "linear",
            Self::ReluNet { .. } => "relu",
            Self::OptimalPlanar { .. } => "optimal_planar",
            Self::OptimalPsd { .. } => "optimal_psd",
            Self::WeylSort { .. } => "weyl_sort",
            Self::Poly { .. } => "poly",
            Self::HPoly { .. } => "hpoly",
        }
    }

    /// Whether `f(gx) = f(x)` holds exactly for the model's group.
    pub fn is_invariant(&self) -> bool {
        !matches!(self, Self::ReluNet { .. } | Self::Linear { .. })
    }

    /// Whether `f(rx) = r f(x)` for `r >= 0`.
    pub fn is_homogeneous(&self) -> bool {
        !matches!(self, Self::Poly { .. })
    }
}

impl<T: Real> Embedding<T> for EmbeddingModel<T> {
    fn input_dim(&self) -> usize {
        match self {
            Self::MaxFilterBank { bank } | Self::LinearOfBank { bank, .. } => bank.input_dim(),
            Self::Linear { linear } => linear.input_dim(),
            Self::ReluNet { w, .. } => w.input_dim(),
            Self::OptimalPlanar { .. } => 2,
            Self::OptimalPsd { dim } => *dim,
            Self::WeylSort { group } => group.ambient_dim(),
            Self::Poly { row } | Self::HPoly { row } => row.input_dim(),
        }
    }

    fn output_dim(&self) -> usize {
        match self {
            Self::MaxFilterBank { bank } => bank.len(),
            Self::LinearOfBank { linear, .. } | Self::Linear { linear } => linear.output_dim(),
            Self::ReluNet { l, .. } => l.output_dim(),
            Self::OptimalPlanar { .. } => 3,
            Self::OptimalPsd { dim } => dim * (dim + 1) / 2,
            Self::WeylSort { group } => group.ambient_dim(),
            Self::Poly { row } | Self::HPoly { row } => row.output_dim(),
        }
    }

    fn embed(&self, x: &[T]) -> Result<Vec<T>> {
        match self {
            Self::MaxFilterBank { bank } => bank.apply(x),
            Self::LinearOfBank { linear, bank } => lmf_apply(linear, bank, x),
            Self::Linear { linear } => linear.apply(x),
            Self::ReluNet { w, l } => {
                let hidden: Vec<T> = w.apply(x)?.into_iter().map(|v| v.max(T::zero())).collect();
                l.apply(&hidden)
            }
            Self::OptimalPlanar { order } => optimal_planar(*order, x),
            Self::OptimalPsd { dim } => {
                check_dim(*dim, x.len())?;
                Ok(optimal_psd(x))
            }
            Self::WeylSort { group } => weyl_sort(group, x),
            Self::Poly { row } => poly_invariant(*row, x),
            Self::HPoly { row } => hpoly_invariant(*row, x),
        }
    }
}

/// `h(x) = ||x|| (cos(pi/2r), u^r sin(pi/2r))` with `u = (x_1 + i x_2)/||x||`,
/// the complex coordinate flattened to `(re, im)`.
pub fn optimal_planar<T: Real>(order: usize, x: &[T]) -> Result<Vec<T>> {
    check_dim(2, x.len())?;
    let r = linalg::norm(x);
    if r == T::zero() {
        return Ok(vec![T::zero(); 3]);
    }
    let half = T::PI() / (T::lit(2.0) * T::from_usize_lossy(order));
    let (s, c) = half.sin_cos();
    let (ur, ui) = complex_pow(x[0] / r, x[1] / r, order);
    Ok(vec![r * c, r * s * ur, r * s * ui])
}

/// `xx^T / ||x||`, the square root of the rank-one PSD matrix `xx^T`.
pub fn optimal_psd<T: Real>(x: &[T]) -> Vec<T> {
    let r = linalg::norm(x);
    if r == T::zero() {
        return vec![T::zero(); x.len() * (x.len() + 1) / 2];
    }
    let mut out = flatten_sym(x.len(), |i, j| x[i] * x[j]);
    out.iter_mut().for_each(|v| *v /= r);
    out
}

/// Upper triangle, row-major, with off-diagonal entries scaled by `sqrt 2` so
/// the Euclidean norm equals the Frobenius norm.
pub fn flatten_sym<T: Real>(n: usize, entry: impl Fn(usize, usize) -> T) -> Vec<T> {
    let sqrt2 = T::SQRT_2();
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        out.push(entry(i, i));
        for j in (i + 1)..n {
            out.push(sqrt2 * entry(i, j));
        }
    }
    out
}

fn reflection_dim<T: Real>(g: &GroupSpec<T>) -> Result<usize> {
    match *g.kind() {
        GroupKind::Permutation { dim } | GroupKind::HyperoctahedralSigns { dim } => Ok(dim),
        _ => Err(Error::Unsupported(format!("no Weyl chamber projection for {}", g.name()))),
    }
}

/// The representative of `[x]` in the fundamental Weyl chamber: weakly
/// decreasing coordinates for permutations, and weakly decreasing absolute
/// values for signed permutations.
pub fn weyl_sort<T: Real>(g: &GroupSpec<T>, x: &[T]) -> Result<Vec<T>> {
    check_dim(reflection_dim(g)?, x.len())?;
    Ok(match g.kind() {
        GroupKind::HyperoctahedralSigns { .. } => sorted_desc(&x.iter().map(|v| v.abs()).collect::<Vec<_>>()),
        _ => sorted_desc(x),
    })
}

/// `(a + ib)^n` by repeated squaring.
fn complex_pow<T: Real>(a: T, b: T, mut n: usize) -> (T, T) {
    let (mut rr, mut ri) = (T::one(), T::zero());
    let (mut br, mut bi) = (a, b);
    while n > 0 {
        if n & 1 == 1 {
            (rr, ri) = (rr * br - ri * bi, rr * bi + ri * br);
        }
        (br, bi) = (br * br - bi * bi, T::lit(2.0) * br * bi);
        n >>= 1;
    }
    (rr, ri)
}

/// `x^(a) = sum_j x_j e^{-2 pi i a j / d}`, as `(re, im)` pairs.
pub fn dft<T: Real>(x: &[T]) -> Vec<(T, T)> {
    let d = x.len();
    (0..d)
        .map(|a| {
            let mut acc = (T::zero(), T::zero());
            for (j, &v) in x.iter().enumerate() {
                let theta = -T::TAU() * T::from_usize_lossy((a * j) % d) / T::from_usize_lossy(d);
                let (s, c) = theta.sin_cos();
                acc.0 += v * c;
                acc.1 += v * s;
            }
            acc
        })
        .collect()
}

/// The row's invariant polynomial, complex outputs flattened to `(re, im)`.
pub fn poly_invariant<T: Real>(row: PolyRow, x: &[T]) -> Result<Vec<T>> {
    check_dim(row.input_dim(), x.len())?;
    Ok(match row {
        PolyRow::OuterProduct { dim } => flatten_sym(dim, |i, j| x[i] * x[j]),
        PolyRow::PowerSums { dim } => {
            let mut powers = x.to_vec();
            let mut out = Vec::with_capacity(dim);
            for _ in 0..dim {
                out.push(powers.iter().copied().sum());
                powers.iter_mut().zip(x).for_each(|(p, &v)| *p *= v);
            }
            out
        }
        PolyRow::Bispectrum { dim } => {
            let f = dft(x);
            let mul = |p: (T, T), q: (T, T)| (p.0 * q.0 - p.1 * q.1, p.0 * q.1 + p.1 * q.0);
            let mut out = Vec::with_capacity(2 * dim * dim);
            for a in 0..dim {
                for b in 0..dim {
                    let c = (2 * dim - a - b) % dim;
                    let v = mul(mul(f[a], f[b]), f[c]);
                    out.push(v.0);
                    out.push(v.1);
                }
            }
            out
        }
        PolyRow::ComplexPower { order } => {
            let (re, im) = complex_pow(x[0], x[1], order);
            vec![re, im]
        }
        PolyRow::HermitianOuter { dim } => {
            // (xx*)_{ij} = x_i conj(x_j)
            let sqrt2 = T::SQRT_2();
            let mut out = Vec::with_capacity(dim * dim);
            for i in 0..dim {
                let (ar, ai) = (x[2 * i], x[2 * i + 1]);
                out.push(ar * ar + ai * ai);
                for j in (i + 1)..dim {
                    let (br, bi) = (x[2 * j], x[2 * j + 1]);
                    out.push(sqrt2 * (ar * br + ai * bi));
                    out.push(sqrt2 * (ai * br - ar * bi));
                }
            }
            out
        }
        PolyRow::Gram { dim, count } => {
            let blocks: Vec<&[T]> = x.chunks_exact(dim).collect();
            flatten_sym(count, |i, j| linalg::dot(blocks[i], blocks[j]))
        }
    })
}

/// `||x|| p(x/||x||)`, and `0` at the origin.
pub fn hpoly_invariant<T: Real>(row: PolyRow, x: &[T]) -> Result<Vec<T>> {
    check_dim(row.input_dim(), x.len())?;
    let r = linalg::norm(x);
    if r == T::zero() {
        return Ok(vec![T::zero(); row.output_dim()]);
    }
    let unit: Vec<T> = x.iter().map(|&v| v / r).collect();
    Ok(poly_invariant(row, &unit)?.into_iter().map(|v| v * r).collect())
}

/// Lower-triangular ones matrix `T`, so that `T sort(x)` is the output of the
/// sorting bank.
pub fn cumulative_matrix<T: Real>(dim: usize) -> Matrix<T> {
    Matrix::from_fn(dim, dim, |i, j| if j <= i { T::one() } else { T::zero() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters::{sorting_bank, sorting_decoder};
    use crate::rng;
    use approx::assert_abs_diff_eq;

    fn close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert_abs_diff_eq!(*x, *y, epsilon = tol);
        }
    }

    #[test]
    fn optimal_planar_examples() {
        let h = |x: [f64; 2]| optimal_planar(2, &x).unwrap();
        let s = 0.5f64.sqrt();
        close(&h([1.0, 0.0]), &[s, s, 0.0], 1e-15);
        close(&h([0.0, 0.0]), &[0.0; 3], 0.0);
        close(&h([0.0, 1.0]), &[s, -s, 0.0], 1e-15);
    }

    #[test]
    fn optimal_psd_examples() {
        close(&optimal_psd(&[1.0, 0.0]), &[1.0, 0.0, 0.0], 0.0);
        close(&optimal_psd(&[0.0, 0.0]), &[0.0; 3], 0.0);
        let s = 0.5f64.sqrt();
        close(&optimal_psd(&[1.0, 1.0]), &[s, 1.0, s], 1e-15);
    }

    #[test]
    fn optimal_psd_matches_eigen_square_root() {
        // Oracle: sqrt of xx^T through its eigendecomposition.
        let x = [0.3, -1.1, 2.0];
        let m = Matrix::from_fn(3, 3, |i, j| x[i] * x[j]);
        let (vals, vecs): (Vec<f64>, _) = linalg::symmetric_eigen(&m);
        let root = Matrix::from_fn(3, 3, |i, j| {
            (0..3).map(|k| vals[k].max(0.0).sqrt() * vecs[(i, k)] * vecs[(j, k)]).sum::<f64>()
        });
        close(&optimal_psd(&x), &flatten_sym(3, |i, j| root[(i, j)]), 1e-10);
    }

    #[test]
    fn weyl_sort_examples() {
        let p = GroupSpec::<f64>::permutation(3);
        assert_eq!(weyl_sort(&p, &[3.0, 1.0, 2.0]).unwrap(), vec![3.0, 2.0, 1.0]);
        assert_eq!(weyl_sort(&p, &[3.0, 2.0, 1.0]).unwrap(), vec![3.0, 2.0, 1.0]);
        let b = GroupSpec::<f64>::hyperoctahedral(3);
        assert_eq!(weyl_sort(&b, &[-3.0, 1.0, -2.0]).unwrap(), vec![3.0, 2.0, 1.0]);
        let s = GroupSpec::<f64>::sign_flip(3);
        assert!(matches!(weyl_sort(&s, &[1.0, 2.0, 3.0]), Err(Error::Unsupported(_))));
        assert!(EmbeddingModel::weyl_sort(s).is_err());
    }

    #[test]
    fn sort_is_decoded_sorting_bank() {
        let b = sorting_bank::<f64>(3);
        let l = sorting_decoder::<f64>(3);
        let p = GroupSpec::permutation(3);
        for x in rng::gaussian_points::<f64>(5, "sort-identity", 50, 3) {
            // Dyadic inputs keep every partial sum exact.
            let q: Vec<f64> = x.iter().map(|v| (v * 1024.0).round() / 1024.0).collect();
            assert_eq!(lmf_apply(&l, &b, &q).unwrap(), weyl_sort(&p, &q).unwrap());
            close(&lmf_apply(&l, &b, &x).unwrap(), &weyl_sort(&p, &x).unwrap(), 1e-14);
            let t = cumulative_matrix::<f64>(3);
            close(&t.mul_vec(&weyl_sort(&p, &x).unwrap()).unwrap(), &b.apply(&x).unwrap(), 1e-14);
        }
    }

    #[test]
    fn poly_examples() {
        assert_eq!(poly_invariant(PolyRow::PowerSums { dim: 2 }, &[1.0, 2.0]).unwrap(), vec![3.0, 5.0]);
        assert_eq!(poly_invariant(PolyRow::ComplexPower { order: 2 }, &[0.0, 1.0]).unwrap(), vec![-1.0, 0.0]);
        let b = poly_invariant(PolyRow::Bispectrum { dim: 3 }, &[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(b.len(), 18);
        for pair in b.chunks(2) {
            close(pair, &[1.0, 0.0], 1e-15);
        }
        assert!(poly_invariant(PolyRow::PowerSums { dim: 2 }, &[1.0]).is_err());
    }

    #[test]
    fn hpoly_examples() {
        let row = PolyRow::OuterProduct { dim: 3 };
        let x = [0.4, -2.0, 1.3];
        close(&hpoly_invariant(row, &x).unwrap(), &optimal_psd(&x), 1e-14);
        let x2: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        let h1 = hpoly_invariant(row, &x).unwrap();
        close(&hpoly_invariant(row, &x2).unwrap(), &h1.iter().map(|v| 2.0 * v).collect::<Vec<_>>(), 1e-14);
        close(&hpoly_invariant(PolyRow::PowerSums { dim: 2 }, &[2.0, 0.0]).unwrap(), &[2.0, 2.0], 1e-15);
        close(&hpoly_invariant(row, &[0.0; 3]).unwrap(), &[0.0; 6], 0.0);
    }

    #[test]
    fn flattenings_are_isometric() {
        // |xx^*|_F = |x|^2 and |G|_F for the Gram matrix.
        let x = [0.5f64, -1.0, 2.0, 0.25];
        let h = poly_invariant(PolyRow::HermitianOuter { dim: 2 }, &x).unwrap();
        assert_eq!(h.len(), 4);
        assert_abs_diff_eq!(linalg::norm(&h), linalg::norm_sq(&x), epsilon = 1e-14);
        let g = poly_invariant(PolyRow::Gram { dim: 2, count: 2 }, &x).unwrap();
        let (a, b) = (&x[..2], &x[2..]);
        let frob = (linalg::dot(a, a).powi(2) + 2.0 * linalg::dot(a, b).powi(2) + linalg::dot(b, b).powi(2)).sqrt();
        assert_abs_diff_eq!(linalg::norm(&g), frob, epsilon = 1e-14);
    }

    #[test]
    fn invariance_and_homogeneity_of_reference_models() {
        let rows = [
            PolyRow::OuterProduct { dim: 3 },
            PolyRow::PowerSums { dim: 4 },
            PolyRow::Bispectrum { dim: 5 },
            PolyRow::ComplexPower { order: 3 },
            PolyRow::HermitianOuter { dim: 2 },
            PolyRow::Gram { dim: 3, count: 3 },
        ];
        for row in rows {
            let g: GroupSpec<f64> = row.group();
            assert_eq!(PolyRow::for_group(&g).unwrap(), row);
            let mut r = rng::stream(1, "poly-invariance", row.input_dim() as u64);
            let x: Vec<f64> = rng::gaussian_vec(&mut r, row.input_dim());
            for model in [EmbeddingModel::Poly { row }, EmbeddingModel::HPoly { row }] {
                let fx = model.embed(&x).unwrap();
                assert_eq!(fx.len(), model.output_dim());
                for e in g.sample(5, 3) {
                    let gx = g.apply(&e, &x).unwrap();
                    close(&model.embed(&gx).unwrap(), &fx, 1e-9 * (1.0 + linalg::norm(&fx)));
                }
            }
            let h = EmbeddingModel::HPoly { row };
            for s in [0.0, 0.5, 2.0] {
                let sx: Vec<f64> = x.iter().map(|v| s * v).collect();
                let want: Vec<f64> = h.embed(&x).unwrap().iter().map(|v| s * v).collect();
                close(&h.embed(&sx).unwrap(), &want, 1e-9);
            }
        }
    }

    #[test]
    fn model_json_round_trip() {
        let mut r = rng::stream(2, "model-json", 0);
        let bank = FilterBank::<f64>::gaussian(GroupSpec::sign_flip(2), 4, &mut r);
        let lin = LinearMap::new(Matrix::from_vec(2, 4, rng::gaussian_vec(&mut r, 8)).unwrap()).unwrap();
        let models = vec![
            EmbeddingModel::lmf(lin, bank.clone()).unwrap(),
            EmbeddingModel::MaxFilterBank { bank },
            EmbeddingModel::HPoly { row: PolyRow::Gram { dim: 2, count: 3 } },
            EmbeddingModel::weyl_sort(GroupSpec::hyperoctahedral(4)).unwrap(),
            EmbeddingModel::optimal_planar(5).unwrap(),
        ];
        for m in models {
            let s = serde_json::to_string(&m).unwrap();
            let back: EmbeddingModel<f64> = serde_json::from_str(&s).unwrap();
            assert_eq!(back, m, "{s}");
        }
        assert!(serde_json::from_str::<EmbeddingModel<f64>>(r#"{"model":"optimal_psd","dim":2,"x":1}"#).is_err());
    }
}
