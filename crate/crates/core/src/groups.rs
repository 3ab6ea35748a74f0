//! Orthogonal group actions on real inner-product spaces.
//!
//! Every action is a subgroup `G <= O(V)` with `V = R^D`. Complex spaces are
//! modelled as interleaved real pairs `(re_0, im_0, re_1, im_1, ...)`, point
//! tuples `(R^d)^k` as `k` consecutive blocks of length `d`.
//!
//! The central primitive is [`GroupSpec::argmax_inner`], the maximization
//! `max_g <x, g y>` together with an attaining `g* y`. Finite groups enumerate
//! in a fixed order and keep the first maximizer; continuous groups use closed
//! forms (phase alignment, orthogonal Procrustes).

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{self, dot, Matrix};
use crate::rng;
use crate::scalar::Real;

const MAX_PERMUTATION_ENUM_DIM: usize = 8;
const MAX_HYPEROCTAHEDRAL_ENUM_DIM: usize = 6;
const EXPLICIT_TOL: f64 = 1e-9;

/// Serialized form of a group: `{kind, params}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case", deny_unknown_fields)]
#[serde(bound = "T: Real")]
pub enum GroupKind<T> {
    /// `{+I, -I}` on `R^dim`.
    SignFlip { dim: usize },
    /// Cyclic subgroup of SO(2) of the given order acting on `R^2`.
    PlanarRotation { order: usize },
    /// Symmetric group permuting the coordinates of `R^dim`.
    Permutation { dim: usize },
    /// Cyclic shifts of `R^dim`, i.e. translations of `l^2(Z_dim)`.
    CyclicShift { dim: usize },
    /// Global phase `S^1` acting on `C^dim`.
    PhaseCircle { dim: usize },
    /// O(dim) acting diagonally on `count` vectors of `R^dim`.
    OrthogonalTuple { dim: usize, count: usize },
    /// O(2) x C_vertices acting on planar polygons.
    ShapeGroup { vertices: usize },
    /// Finite list of orthogonal matrices, closed under inversion.
    ExplicitFinite { elements: Vec<Vec<Vec<T>>> },
    /// Hyperoctahedral group B_dim of signed coordinate permutations.
    HyperoctahedralSigns { dim: usize },
}

/// A validated group action.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GroupKind<T>", into = "GroupKind<T>", bound = "T: Real")]
pub struct GroupSpec<T: Real> {
    kind: GroupKind<T>,
    explicit: Vec<Matrix<T>>,
}

/// A single group element, interpreted relative to its [`GroupSpec`].
#[derive(Clone, Debug, PartialEq)]
pub enum GroupElement<T> {
    /// `-I` when `negate`, else `I`.
    Sign { negate: bool },
    /// Rotation by `2 pi step / order`.
    Rotation { step: usize },
    /// `(g x)_i = x_{perm[i]}`.
    Permutation(Vec<usize>),
    /// `(g x)_i = x_{(i - shift) mod d}`.
    Shift(usize),
    /// Multiplication by `e^{i theta}`.
    Phase(T),
    /// Orthogonal matrix applied to each block.
    Orthogonal(Matrix<T>),
    /// `(g x)_i = R x_{(i - shift) mod k}` for planar vertices.
    Shape { rotation: [[T; 2]; 2], shift: usize },
    /// Index into the explicit element list.
    Explicit(usize),
    /// `(g x)_i = sign_i * x_{perm[i]}`.
    SignedPermutation { perm: Vec<usize>, negate: Vec<bool> },
}

/// Result of `max_g <x, g y>`.
#[derive(Clone, Debug, PartialEq)]
pub struct Alignment<T> {
    pub value: T,
    /// The attaining orbit point `g* y`.
    pub aligned: Vec<T>,
}

impl<T: Real> TryFrom<GroupKind<T>> for GroupSpec<T> {
    type Error = Error;

    fn try_from(kind: GroupKind<T>) -> Result<Self> {
        GroupSpec::new(kind)
    }
}

impl<T: Real> From<GroupSpec<T>> for GroupKind<T> {
    fn from(g: GroupSpec<T>) -> Self {
        g.kind
    }
}

impl<T: Real> GroupSpec<T> {
    pub fn new(kind: GroupKind<T>) -> Result<Self> {
        let positive = |name: &str, v: usize| {
            if v == 0 {
                Err(Error::InvalidGroup(format!("{name} must be positive")))
            } else {
                Ok(())
            }
        };
        let mut explicit = Vec::new();
        match &kind {
            GroupKind::SignFlip { dim }
            | GroupKind::Permutation { dim }
            | GroupKind::CyclicShift { dim }
            | GroupKind::PhaseCircle { dim }
            | GroupKind::HyperoctahedralSigns { dim } => positive("dim", *dim)?,
            GroupKind::PlanarRotation { order } => positive("order", *order)?,
            GroupKind::OrthogonalTuple { dim, count } => {
                positive("dim", *dim)?;
                positive("count", *count)?;
            }
            GroupKind::ShapeGroup { vertices } => positive("vertices", *vertices)?,
            GroupKind::ExplicitFinite { elements } => {
                explicit = validate_explicit(elements)?;
            }
        }
        Ok(Self { kind, explicit })
    }

    pub fn sign_flip(dim: usize) -> Self {
        Self::new(GroupKind::SignFlip { dim }).expect("valid")
    }

    pub fn planar_rotation(order: usize) -> Self {
        Self::new(GroupKind::PlanarRotation { order }).expect("valid")
    }

    pub fn permutation(dim: usize) -> Self {
        Self::new(GroupKind::Permutation { dim }).expect("valid")
    }

    pub fn cyclic_shift(dim: usize) -> Self {
        Self::new(GroupKind::CyclicShift { dim }).expect("valid")
    }

    pub fn phase_circle(dim: usize) -> Self {
        Self::new(GroupKind::PhaseCircle { dim }).expect("valid")
    }

    pub fn orthogonal_tuple(dim: usize, count: usize) -> Self {
        Self::new(GroupKind::OrthogonalTuple { dim, count }).expect("valid")
    }

    pub fn shape_group(vertices: usize) -> Self {
        Self::new(GroupKind::ShapeGroup { vertices }).expect("valid")
    }

    pub fn hyperoctahedral(dim: usize) -> Self {
        Self::new(GroupKind::HyperoctahedralSigns { dim }).expect("valid")
    }

    pub fn explicit_finite(elements: Vec<Matrix<T>>) -> Result<Self> {
        Self::new(GroupKind::ExplicitFinite { elements: elements.iter().map(Matrix::to_rows).collect() })
    }

    /// The trivial group `{I}` on `R^dim`.
    pub fn trivial(dim: usize) -> Self {
        Self::explicit_finite(vec![Matrix::identity(dim)]).expect("identity is valid")
    }

    pub fn kind(&self) -> &GroupKind<T> {
        &self.kind
    }

    /// Real dimension of `V`.
    pub fn ambient_dim(&self) -> usize {
        match &self.kind {
            GroupKind::SignFlip { dim }
            | GroupKind::Permutation { dim }
            | GroupKind::CyclicShift { dim }
            | GroupKind::HyperoctahedralSigns { dim } => *dim,
            GroupKind::PlanarRotation { .. } => 2,
            GroupKind::PhaseCircle { dim } => 2 * dim,
            GroupKind::OrthogonalTuple { dim, count } => dim * count,
            GroupKind::ShapeGroup { vertices } => 2 * vertices,
            GroupKind::ExplicitFinite { .. } => self.explicit[0].rows(),
        }
    }

    /// Real dimension of the orbit space `V/G`.
    pub fn quotient_dim(&self) -> usize {
        let d = self.ambient_dim();
        match &self.kind {
            GroupKind::PhaseCircle { .. } => d - 1,
            GroupKind::OrthogonalTuple { dim, .. } => d.saturating_sub(dim * (dim - 1) / 2),
            GroupKind::ShapeGroup { .. } => d - 1,
            _ => d,
        }
    }

    /// Short human-readable label such as `sign_flip(3)`.
    pub fn name(&self) -> String {
        match &self.kind {
            GroupKind::SignFlip { dim } => format!("sign_flip({dim})"),
            GroupKind::PlanarRotation { order } => format!("planar_rotation({order})"),
            GroupKind::Permutation { dim } => format!("permutation({dim})"),
            GroupKind::CyclicShift { dim } => format!("cyclic_shift({dim})"),
            GroupKind::PhaseCircle { dim } => format!("phase_circle({dim})"),
            GroupKind::OrthogonalTuple { dim, count } => format!("orthogonal_tuple({dim},{count})"),
            GroupKind::ShapeGroup { vertices } => format!("shape_group({vertices})"),
            GroupKind::ExplicitFinite { .. } => format!("explicit_finite({})", self.explicit.len()),
            GroupKind::HyperoctahedralSigns { dim } => format!("hyperoctahedral({dim})"),
        }
    }

    pub fn is_finite(&self) -> bool {
        !matches!(
            self.kind,
            GroupKind::PhaseCircle { .. } | GroupKind::OrthogonalTuple { .. } | GroupKind::ShapeGroup { .. }
        )
    }

    /// Group order for finite groups (saturating at `u128::MAX`).
    pub fn order(&self) -> Option<u128> {
        let fact = |n: usize| (1..=n as u128).try_fold(1u128, |a, b| a.checked_mul(b)).unwrap_or(u128::MAX);
        match &self.kind {
            GroupKind::SignFlip { .. } => Some(2),
            GroupKind::PlanarRotation { order } => Some(*order as u128),
            GroupKind::Permutation { dim } => Some(fact(*dim)),
            GroupKind::CyclicShift { dim } => Some(*dim as u128),
            GroupKind::ExplicitFinite { .. } => Some(self.explicit.len() as u128),
            GroupKind::HyperoctahedralSigns { dim } => {
                Some(fact(*dim).saturating_mul(1u128.checked_shl(*dim as u32).unwrap_or(u128::MAX)))
            }
            _ => None,
        }
    }

    fn check_len(&self, x: &[T]) -> Result<()> {
        check_dim(self.ambient_dim(), x.len())
    }

    /// Applies `g` to `x`.
    pub fn apply(&self, g: &GroupElement<T>, x: &[T]) -> Result<Vec<T>> {
        self.check_len(x)?;
        let foreign = || Error::ForeignElement(self.name());
        let d = x.len();
        match (&self.kind, g) {
            (GroupKind::SignFlip { .. }, GroupElement::Sign { negate }) => {
                Ok(if *negate { x.iter().map(|&v| -v).collect() } else { x.to_vec() })
            }
            (GroupKind::PlanarRotation { order }, GroupElement::Rotation { step }) => {
                if step >= order {
                    return Err(foreign());
                }
                let (s, c) = rotation_angle::<T>(*step, *order).sin_cos();
                Ok(vec![c * x[0] - s * x[1], s * x[0] + c * x[1]])
            }
            (GroupKind::Permutation { .. }, GroupElement::Permutation(p)) => {
                if !is_permutation(p, d) {
                    return Err(foreign());
                }
                Ok(p.iter().map(|&j| x[j]).collect())
            }
            (GroupKind::CyclicShift { .. }, GroupElement::Shift(s)) => {
                if *s >= d {
                    return Err(foreign());
                }
                Ok((0..d).map(|i| x[(i + d - s) % d]).collect())
            }
            (GroupKind::PhaseCircle { .. }, GroupElement::Phase(theta)) => {
                let (s, c) = theta.sin_cos();
                let mut out = Vec::with_capacity(d);
                for z in x.chunks_exact(2) {
                    out.push(c * z[0] - s * z[1]);
                    out.push(s * z[0] + c * z[1]);
                }
                Ok(out)
            }
            (GroupKind::OrthogonalTuple { dim, .. }, GroupElement::Orthogonal(r)) => {
                if r.rows() != *dim || r.cols() != *dim {
                    return Err(foreign());
                }
                let mut out = Vec::with_capacity(d);
                for block in x.chunks_exact(*dim) {
                    out.extend(r.mul_vec(block)?);
                }
                Ok(out)
            }
            (GroupKind::ShapeGroup { vertices }, GroupElement::Shape { rotation: r, shift }) => {
                let k = *vertices;
                if *shift >= k {
                    return Err(foreign());
                }
                let mut out = Vec::with_capacity(d);
                for i in 0..k {
                    let j = (i + k - shift) % k;
                    let (a, b) = (x[2 * j], x[2 * j + 1]);
                    out.push(r[0][0] * a + r[0][1] * b);
                    out.push(r[1][0] * a + r[1][1] * b);
                }
                Ok(out)
            }
            (GroupKind::ExplicitFinite { .. }, GroupElement::Explicit(i)) => {
                self.explicit.get(*i).ok_or_else(foreign)?.mul_vec(x)
            }
            (GroupKind::HyperoctahedralSigns { .. }, GroupElement::SignedPermutation { perm, negate }) => {
                if !is_permutation(perm, d) || negate.len() != d {
                    return Err(foreign());
                }
                Ok(perm
                    .iter()
                    .zip(negate)
                    .map(|(&j, &n)| if n { -x[j] } else { x[j] })
                    .collect())
            }
            _ => Err(foreign()),
        }
    }

    /// All elements of a finite group in the deterministic order used for
    /// tie-breaking.
    pub fn enumerate(&self) -> Result<Vec<GroupElement<T>>> {
        match &self.kind {
            GroupKind::SignFlip { .. } => {
                Ok(vec![GroupElement::Sign { negate: false }, GroupElement::Sign { negate: true }])
            }
            GroupKind::PlanarRotation { order } => {
                Ok((0..*order).map(|step| GroupElement::Rotation { step }).collect())
            }
            GroupKind::Permutation { dim } => {
                if *dim > MAX_PERMUTATION_ENUM_DIM {
                    return Err(self.too_large());
                }
                Ok(permutations(*dim).into_iter().map(GroupElement::Permutation).collect())
            }
            GroupKind::CyclicShift { dim } => Ok((0..*dim).map(GroupElement::Shift).collect()),
            GroupKind::ExplicitFinite { .. } => {
                Ok((0..self.explicit.len()).map(GroupElement::Explicit).collect())
            }
            GroupKind::HyperoctahedralSigns { dim } => {
                if *dim > MAX_HYPEROCTAHEDRAL_ENUM_DIM {
                    return Err(self.too_large());
                }
                let d = *dim;
                let mut out = Vec::new();
                for perm in permutations(d) {
                    for mask in 0u32..(1 << d) {
                        let negate = (0..d).map(|i| mask >> i & 1 == 1).collect();
                        out.push(GroupElement::SignedPermutation { perm: perm.clone(), negate });
                    }
                }
                Ok(out)
            }
            _ => Err(Error::ContinuousGroup(self.name())),
        }
    }

    fn too_large(&self) -> Error {
        Error::TooLargeToEnumerate {
            kind: self.name(),
            size: self.order().map_or_else(|| "inf".into(), |o| o.to_string()),
        }
    }

    /// `n` random elements, uniform for finite groups and Haar for compact
    /// continuous ones. Deterministic in `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<GroupElement<T>> {
        let mut rng = rng::stream(seed, "group-sample", 0);
        (0..n).map(|_| self.sample_one(&mut rng)).collect()
    }

    pub fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> GroupElement<T> {
        match &self.kind {
            GroupKind::SignFlip { .. } => GroupElement::Sign { negate: rng.random::<bool>() },
            GroupKind::PlanarRotation { order } => GroupElement::Rotation { step: rng.random_range(0..*order) },
            GroupKind::Permutation { dim } => {
                let mut p: Vec<usize> = (0..*dim).collect();
                p.shuffle(rng);
                GroupElement::Permutation(p)
            }
            GroupKind::CyclicShift { dim } => GroupElement::Shift(rng.random_range(0..*dim)),
            GroupKind::PhaseCircle { .. } => {
                GroupElement::Phase(T::lit(rng.random_range(0.0..std::f64::consts::TAU)))
            }
            GroupKind::OrthogonalTuple { dim, .. } => {
                let a = Matrix::from_vec(*dim, *dim, rng::gaussian_vec(rng, dim * dim)).expect("square");
                GroupElement::Orthogonal(linalg::qr_orthogonal(&a))
            }
            GroupKind::ShapeGroup { vertices } => {
                let t: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                let (s, c) = (T::lit(t.sin()), T::lit(t.cos()));
                let rotation = if rng.random::<bool>() { [[c, s], [s, -c]] } else { [[c, -s], [s, c]] };
                GroupElement::Shape { rotation, shift: rng.random_range(0..*vertices) }
            }
            GroupKind::ExplicitFinite { .. } => GroupElement::Explicit(rng.random_range(0..self.explicit.len())),
            GroupKind::HyperoctahedralSigns { dim } => {
                let mut perm: Vec<usize> = (0..*dim).collect();
                perm.shuffle(rng);
                let negate = (0..*dim).map(|_| rng.random::<bool>()).collect();
                GroupElement::SignedPermutation { perm, negate }
            }
        }
    }

    /// `max_g <x, g y>` and an attaining `g* y`.
    ///
    /// Ties resolve to the first maximizer in enumeration order. A zero `y`
    /// yields value 0 with maximizer 0.
    pub fn argmax_inner(&self, x: &[T], y: &[T]) -> Result<Alignment<T>> {
        self.check_len(x)?;
        self.check_len(y)?;
        Ok(match &self.kind {
            GroupKind::SignFlip { .. } => {
                let v = dot(x, y);
                if v >= T::zero() {
                    Alignment { value: v, aligned: y.to_vec() }
                } else {
                    Alignment { value: -v, aligned: y.iter().map(|&t| -t).collect() }
                }
            }
            GroupKind::PlanarRotation { order } => {
                let mut best: Option<Alignment<T>> = None;
                for step in 0..*order {
                    let (s, c) = rotation_angle::<T>(step, *order).sin_cos();
                    let gy = vec![c * y[0] - s * y[1], s * y[0] + c * y[1]];
                    let v = dot(x, &gy);
                    if best.as_ref().is_none_or(|b| v > b.value) {
                        best = Some(Alignment { value: v, aligned: gy });
                    }
                }
                best.expect("nonempty group")
            }
            GroupKind::Permutation { .. } => sorted_alignment(x, y, false),
            GroupKind::HyperoctahedralSigns { .. } => sorted_alignment(x, y, true),
            GroupKind::CyclicShift { dim } => {
                let d = *dim;
                let mut best_v = T::neg_infinity();
                let mut best_s = 0;
                for s in 0..d {
                    let mut v = T::zero();
                    for i in 0..d {
                        v += x[i] * y[(i + d - s) % d];
                    }
                    if v > best_v {
                        best_v = v;
                        best_s = s;
                    }
                }
                Alignment { value: best_v, aligned: (0..d).map(|i| y[(i + d - best_s) % d]).collect() }
            }
            GroupKind::PhaseCircle { .. } => {
                // w = sum_j x_j conj(y_j); <x, e^{it} y> = Re(e^{-it} w)
                let (mut wr, mut wi) = (T::zero(), T::zero());
                for (a, b) in x.chunks_exact(2).zip(y.chunks_exact(2)) {
                    wr += a[0] * b[0] + a[1] * b[1];
                    wi += a[1] * b[0] - a[0] * b[1];
                }
                let value = wr.hypot(wi);
                let (c, s) = if value > T::zero() { (wr / value, wi / value) } else { (T::one(), T::zero()) };
                let mut aligned = Vec::with_capacity(y.len());
                for b in y.chunks_exact(2) {
                    aligned.push(c * b[0] - s * b[1]);
                    aligned.push(s * b[0] + c * b[1]);
                }
                Alignment { value, aligned }
            }
            GroupKind::OrthogonalTuple { dim, .. } => {
                let d = *dim;
                // M = sum_i y_i x_i^T; <X, R Y> = tr(R M)
                let mut m = Matrix::zeros(d, d);
                for (xb, yb) in x.chunks_exact(d).zip(y.chunks_exact(d)) {
                    for a in 0..d {
                        for b in 0..d {
                            m[(a, b)] += yb[a] * xb[b];
                        }
                    }
                }
                let (value, r) = if d == 2 {
                    let (v, r) = linalg::procrustes_2x2(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
                    (v, Matrix::from_fn(2, 2, |i, j| r[i][j]))
                } else {
                    linalg::procrustes(&m)
                };
                let mut aligned = Vec::with_capacity(y.len());
                for yb in y.chunks_exact(d) {
                    aligned.extend(r.mul_vec(yb).expect("square"));
                }
                Alignment { value, aligned }
            }
            GroupKind::ShapeGroup { vertices } => shape_alignment(*vertices, x, y),
            GroupKind::ExplicitFinite { .. } => {
                let mut best: Option<Alignment<T>> = None;
                for g in &self.explicit {
                    let gy = g.mul_vec(y)?;
                    let v = dot(x, &gy);
                    if best.as_ref().is_none_or(|b| v > b.value) {
                        best = Some(Alignment { value: v, aligned: gy });
                    }
                }
                best.expect("nonempty group")
            }
        })
    }

    /// Brute-force `max_g <x, g y>` by enumeration; the oracle for closed forms.
    pub fn argmax_inner_enumerated(&self, x: &[T], y: &[T]) -> Result<Alignment<T>> {
        self.check_len(x)?;
        self.check_len(y)?;
        let mut best: Option<Alignment<T>> = None;
        for g in self.enumerate()? {
            let gy = self.apply(&g, y)?;
            let v = dot(x, &gy);
            if best.as_ref().is_none_or(|b| v > b.value) {
                best = Some(Alignment { value: v, aligned: gy });
            }
        }
        Ok(best.expect("nonempty group"))
    }

    /// Gap between the best and second-best values of `<x, u>` over distinct
    /// orbit points `u` in `[y]`. A gap near zero means the max filter with
    /// template `y` is not differentiable at `x`. Returns `None` when the
    /// group cannot be enumerated or the orbit is a single point.
    pub fn argmax_gap(&self, x: &[T], y: &[T]) -> Option<T> {
        if let GroupKind::SignFlip { .. } = self.kind {
            return (linalg::norm(y) > T::zero()).then(|| dot(x, y).abs() * T::lit(2.0));
        }
        let elems = self.enumerate().ok()?;
        let mut orbit: Vec<(T, Vec<T>)> = Vec::with_capacity(elems.len());
        for g in &elems {
            let gy = self.apply(g, y).ok()?;
            orbit.push((dot(x, &gy), gy));
        }
        let (best_i, best) = orbit
            .iter()
            .enumerate()
            .fold((0, T::neg_infinity()), |acc, (i, (v, _))| if *v > acc.1 { (i, *v) } else { acc });
        let tol = T::tiny() * (T::one() + linalg::norm(y));
        let best_point = orbit[best_i].1.clone();
        orbit
            .iter()
            .filter(|(_, u)| linalg::dist(u, &best_point) > tol)
            .map(|(v, _)| best - *v)
            .fold(None, |acc: Option<T>, g| Some(acc.map_or(g, |a| a.min(g))))
    }
}

fn rotation_angle<T: Real>(step: usize, order: usize) -> T {
    T::TAU() * T::from_usize_lossy(step) / T::from_usize_lossy(order)
}

fn is_permutation(p: &[usize], d: usize) -> bool {
    if p.len() != d {
        return false;
    }
    let mut seen = vec![false; d];
    p.iter().all(|&j| j < d && !std::mem::replace(&mut seen[j], true))
}

/// All permutations of `0..d` in lexicographic order, identity first.
fn permutations(d: usize) -> Vec<Vec<usize>> {
    let mut p: Vec<usize> = (0..d).collect();
    let mut out = vec![p.clone()];
    loop {
        let Some(i) = (1..d).rev().find(|&i| p[i - 1] < p[i]) else {
            return out;
        };
        let j = (i..d).rev().find(|&j| p[j] > p[i - 1]).expect("successor exists");
        p.swap(i - 1, j);
        p[i..].reverse();
        out.push(p.clone());
    }
}

/// Indices of `v` ordered by decreasing key, ties by increasing index.
fn descending_order<T: Real>(v: &[T], key: impl Fn(T) -> T) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| key(v[b]).partial_cmp(&key(v[a])).unwrap_or(std::cmp::Ordering::Equal));
    idx
}

/// Rearrangement-inequality alignment for S_d (`signed == false`) and B_d.
fn sorted_alignment<T: Real>(x: &[T], y: &[T], signed: bool) -> Alignment<T> {
    let key = |t: T| if signed { t.abs() } else { t };
    let xi = descending_order(x, key);
    let yi = descending_order(y, key);
    let mut aligned = vec![T::zero(); x.len()];
    let mut value = T::zero();
    for (&i, &j) in xi.iter().zip(&yi) {
        let mut u = key(y[j]);
        if signed && x[i] < T::zero() {
            u = -u;
        }
        aligned[i] = u;
        value += x[i] * u;
    }
    Alignment { value, aligned }
}

/// O(2) x C_k alignment: best cyclic shift, each with a closed-form 2x2
/// Procrustes step. O(k^2) per pair.
fn shape_alignment<T: Real>(k: usize, x: &[T], y: &[T]) -> Alignment<T> {
    let mut best_v = T::neg_infinity();
    let mut best_shift = 0;
    let mut best_r = [[T::one(), T::zero()], [T::zero(), T::one()]];
    for s in 0..k {
        // M_s = sum_i y_{i-s} x_i^T
        let (mut a, mut b, mut c, mut d) = (T::zero(), T::zero(), T::zero(), T::zero());
        for i in 0..k {
            let j = if i >= s { i - s } else { i + k - s };
            let (x0, x1) = (x[2 * i], x[2 * i + 1]);
            let (y0, y1) = (y[2 * j], y[2 * j + 1]);
            a += y0 * x0;
            b += y0 * x1;
            c += y1 * x0;
            d += y1 * x1;
        }
        let (v, r) = linalg::procrustes_2x2(a, b, c, d);
        if v > best_v {
            best_v = v;
            best_shift = s;
            best_r = r;
        }
    }
    let mut aligned = Vec::with_capacity(2 * k);
    for i in 0..k {
        let j = (i + k - best_shift) % k;
        let (y0, y1) = (y[2 * j], y[2 * j + 1]);
        aligned.push(best_r[0][0] * y0 + best_r[0][1] * y1);
        aligned.push(best_r[1][0] * y0 + best_r[1][1] * y1);
    }
    Alignment { value: best_v, aligned }
}

fn validate_explicit<T: Real>(elements: &[Vec<Vec<T>>]) -> Result<Vec<Matrix<T>>> {
    if elements.is_empty() {
        return Err(Error::InvalidGroup("explicit group needs at least one element".into()));
    }
    let mats: Vec<Matrix<T>> = elements.iter().map(|rows| Matrix::from_rows(rows)).collect::<Result<_>>()?;
    let d = mats[0].rows();
    let tol = T::lit(EXPLICIT_TOL);
    for (i, m) in mats.iter().enumerate() {
        if m.rows() != d || m.cols() != d || d == 0 {
            return Err(Error::InvalidGroup(format!("element {i} is not {d}x{d}")));
        }
        if m.orthogonality_defect() > tol {
            return Err(Error::InvalidGroup(format!("element {i} is not orthogonal")));
        }
    }
    for (i, m) in mats.iter().enumerate() {
        let inv = m.transpose();
        let present = mats.iter().any(|other| {
            other.as_slice().iter().zip(inv.as_slice()).all(|(a, b)| (*a - *b).abs() <= tol)
        });
        if !present {
            return Err(Error::InvalidGroup(format!("inverse of element {i} is missing")));
        }
    }
    Ok(mats)
}
