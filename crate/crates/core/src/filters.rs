//! Max filters, max filter banks and their subgradients.
//!
//! A max filter with template `y` is the invariant `x -> max_g <x, g y>`.
//! Being a maximum of linear functionals it is convex, positively
//! homogeneous and `||y||`-Lipschitz; wherever the maximizer `g* y` is unique
//! its gradient is `g* y`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::groups::GroupSpec;
use crate::linalg::{self, Matrix};
use crate::rng;
use crate::scalar::Real;

/// `<<[x], [y]>> = max_g <x, g y>`.
pub fn max_filter<T: Real>(g: &GroupSpec<T>, template: &[T], x: &[T]) -> Result<T> {
    Ok(g.argmax_inner(x, template)?.value)
}

/// Max filter bank `x -> (<<[x], [y_i]>>)_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BankRecord<T>", into = "BankRecord<T>", bound = "T: Real")]
pub struct FilterBank<T: Real> {
    group: GroupSpec<T>,
    templates: Matrix<T>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Real", deny_unknown_fields)]
struct BankRecord<T: Real> {
    group: GroupSpec<T>,
    templates: Vec<Vec<T>>,
}

impl<T: Real> TryFrom<BankRecord<T>> for FilterBank<T> {
    type Error = Error;
    fn try_from(r: BankRecord<T>) -> Result<Self> {
        FilterBank::new(r.group, r.templates)
    }
}

impl<T: Real> From<FilterBank<T>> for BankRecord<T> {
    fn from(b: FilterBank<T>) -> Self {
        BankRecord { templates: b.templates.to_rows(), group: b.group }
    }
}

impl<T: Real> FilterBank<T> {
    pub fn new(group: GroupSpec<T>, templates: Vec<Vec<T>>) -> Result<Self> {
        let d = group.ambient_dim();
        for t in &templates {
            check_dim(d, t.len())?;
        }
        let templates = if templates.is_empty() { Matrix::zeros(0, d) } else { Matrix::from_rows(&templates)? };
        Ok(Self { group, templates })
    }

    pub fn from_matrix(group: GroupSpec<T>, templates: Matrix<T>) -> Result<Self> {
        check_dim(group.ambient_dim(), templates.cols())?;
        Ok(Self { group, templates })
    }

    /// `m` templates with independent standard Gaussian entries.
    pub fn gaussian<R: Rng + ?Sized>(group: GroupSpec<T>, m: usize, rng: &mut R) -> Self {
        let d = group.ambient_dim();
        let templates = Matrix::from_vec(m, d, rng::gaussian_vec(rng, m * d)).expect("shape");
        Self { group, templates }
    }

    pub fn group(&self) -> &GroupSpec<T> {
        &self.group
    }

    pub fn templates(&self) -> &Matrix<T> {
        &self.templates
    }

    pub fn templates_mut(&mut self) -> &mut Matrix<T> {
        &mut self.templates
    }

    pub fn len(&self) -> usize {
        self.templates.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn input_dim(&self) -> usize {
        self.group.ambient_dim()
    }

    /// Rescales each nonzero template to unit norm.
    pub fn normalize_templates(&mut self) {
        for i in 0..self.templates.rows() {
            let row = self.templates.row_mut(i);
            let n = linalg::norm(row);
            if n > T::zero() {
                row.iter_mut().for_each(|v| *v /= n);
            }
        }
    }

    pub fn apply(&self, x: &[T]) -> Result<Vec<T>> {
        check_dim(self.input_dim(), x.len())?;
        self.templates.row_iter().map(|y| max_filter(&self.group, y, x)).collect()
    }

    /// Row `i` is the maximizer `g*_i y_i`, a subgradient of the `i`th filter
    /// at `x` (the gradient wherever the maximizer is unique).
    pub fn subgradient(&self, x: &[T]) -> Result<Matrix<T>> {
        check_dim(self.input_dim(), x.len())?;
        let mut out = Matrix::zeros(self.len(), x.len());
        for (i, y) in self.templates.row_iter().enumerate() {
            out.row_mut(i).copy_from_slice(&self.group.argmax_inner(x, y)?.aligned);
        }
        Ok(out)
    }
}

/// Linear map `R^m -> R^n` stored as an `n x m` matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<T>>", into = "Vec<Vec<T>>", bound = "T: Real")]
pub struct LinearMap<T: Real> {
    matrix: Matrix<T>,
}

impl<T: Real> TryFrom<Vec<Vec<T>>> for LinearMap<T> {
    type Error = Error;
    fn try_from(rows: Vec<Vec<T>>) -> Result<Self> {
        LinearMap::new(Matrix::from_rows(&rows)?)
    }
}

impl<T: Real> From<LinearMap<T>> for Vec<Vec<T>> {
    fn from(l: LinearMap<T>) -> Self {
        l.matrix.to_rows()
    }
}

impl<T: Real> LinearMap<T> {
    pub fn new(matrix: Matrix<T>) -> Result<Self> {
        if !matrix.is_finite() {
            return Err(Error::InvalidArgument("linear map has non-finite entries".into()));
        }
        Ok(Self { matrix })
    }

    pub fn identity(n: usize) -> Self {
        Self { matrix: Matrix::identity(n) }
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn matrix_mut(&mut self) -> &mut Matrix<T> {
        &mut self.matrix
    }

    pub fn input_dim(&self) -> usize {
        self.matrix.cols()
    }

    pub fn output_dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn apply(&self, v: &[T]) -> Result<Vec<T>> {
        self.matrix.mul_vec(v)
    }
}

/// `L * Phi(x)`.
pub fn lmf_apply<T: Real>(l: &LinearMap<T>, bank: &FilterBank<T>, x: &[T]) -> Result<Vec<T>> {
    if l.input_dim() != bank.len() {
        return Err(Error::ShapeMismatch(format!(
            "linear map takes {} inputs but the bank has {} templates",
            l.input_dim(),
            bank.len()
        )));
    }
    l.apply(&bank.apply(x)?)
}

/// The three templates `(1,0,0), (1,1,0), (1,1,1)` under S_3, whose bank
/// equals a lower-triangular ones matrix times `sort(x)`.
pub fn sorting_bank<T: Real>(dim: usize) -> FilterBank<T> {
    let templates = (0..dim)
        .map(|i| (0..dim).map(|j| if j <= i { T::one() } else { T::zero() }).collect())
        .collect();
    FilterBank::new(GroupSpec::permutation(dim), templates).expect("square")
}

/// Inverse of the lower-triangular ones matrix: first differences.
pub fn sorting_decoder<T: Real>(dim: usize) -> LinearMap<T> {
    let m = Matrix::from_fn(dim, dim, |i, j| {
        if i == j {
            T::one()
        } else if j + 1 == i {
            -T::one()
        } else {
            T::zero()
        }
    });
    LinearMap::new(m).expect("finite")
}
