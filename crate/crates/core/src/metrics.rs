//! Quotient metric `d([x], [y]) = min_g ||x - g y||`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::groups::{GroupKind, GroupSpec};
use crate::linalg::{self, dist};
use crate::scalar::Real;

/// A point of `V/G` carried by one of its representatives.
#[derive(Clone, Debug)]
pub struct QuotientPoint<'g, T: Real> {
    pub representative: Vec<T>,
    pub group: &'g GroupSpec<T>,
}

impl<'g, T: Real> QuotientPoint<'g, T> {
    pub fn new(group: &'g GroupSpec<T>, representative: Vec<T>) -> Result<Self> {
        check_dim(group.ambient_dim(), representative.len())?;
        Ok(Self { representative, group })
    }

    pub fn dist(&self, other: &QuotientPoint<'_, T>) -> Result<T> {
        quotient_dist(self.group, &self.representative, &other.representative)
    }
}

/// `min_g ||x - g y||`.
///
/// Closed forms for sign flips (`min(||x-y||, ||x+y||)`) and permutations
/// (`||sort x - sort y||`); every other kind measures `||x - g* y||` at the
/// maximizer of `<x, g y>`, which attains the minimum because `G <= O(V)`.
pub fn quotient_dist<T: Real>(g: &GroupSpec<T>, x: &[T], y: &[T]) -> Result<T> {
    check_dim(g.ambient_dim(), x.len())?;
    check_dim(g.ambient_dim(), y.len())?;
    Ok(match g.kind() {
        GroupKind::SignFlip { .. } => {
            let (mut minus, mut plus) = (T::zero(), T::zero());
            for (&a, &b) in x.iter().zip(y) {
                minus += (a - b) * (a - b);
                plus += (a + b) * (a + b);
            }
            minus.min(plus).sqrt()
        }
        GroupKind::Permutation { .. } => dist(&sorted_desc(x), &sorted_desc(y)),
        GroupKind::HyperoctahedralSigns { .. } => {
            let ax: Vec<T> = x.iter().map(|v| v.abs()).collect();
            let ay: Vec<T> = y.iter().map(|v| v.abs()).collect();
            dist(&sorted_desc(&ax), &sorted_desc(&ay))
        }
        _ => dist(x, &g.argmax_inner(x, y)?.aligned),
    })
}

/// Brute-force `min_g ||x - g y||` over an enumerable group.
pub fn quotient_dist_enumerated<T: Real>(g: &GroupSpec<T>, x: &[T], y: &[T]) -> Result<T> {
    check_dim(g.ambient_dim(), x.len())?;
    check_dim(g.ambient_dim(), y.len())?;
    let mut best = T::infinity();
    for e in g.enumerate()? {
        best = best.min(dist(x, &g.apply(&e, y)?));
    }
    Ok(best)
}

pub(crate) fn sorted_desc<T: Real>(x: &[T]) -> Vec<T> {
    let mut v = x.to_vec();
    v.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    v
}

/// Worst-case metric-axiom violations over all triples of a point set.
#[derive(Clone, Debug, Serialize)]
pub struct MetricAxiomReport {
    pub n_points: usize,
    pub n_triples: usize,
    /// `max |d(x,y) - d(y,x)|`
    pub worst_symmetry: f64,
    /// `max (d(x,z) - d(x,y) - d(y,z))`, positive means violated
    pub worst_triangle: f64,
    /// `max d(x,x)`
    pub worst_identity: f64,
    pub violations: usize,
    pub tolerance: f64,
}

impl MetricAxiomReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

pub const AXIOM_TOLERANCE: f64 = 1e-9;

/// Checks symmetry, `d(x,x) = 0` and the triangle inequality on all triples.
pub fn check_metric_axioms<T: Real>(g: &GroupSpec<T>, points: &[Vec<T>]) -> Result<MetricAxiomReport> {
    let n = points.len();
    if n < 3 {
        return Err(Error::InvalidArgument(format!("need at least 3 points, got {n}")));
    }
    let mut d = vec![vec![T::zero(); n]; n];
    let mut worst_symmetry = 0.0f64;
    let mut worst_identity = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            d[i][j] = quotient_dist(g, &points[i], &points[j])?;
        }
    }
    let mut violations = 0;
    for i in 0..n {
        worst_identity = worst_identity.max(d[i][i].to_f64_lossy());
        if d[i][i].to_f64_lossy() > AXIOM_TOLERANCE {
            violations += 1;
        }
        for j in 0..n {
            let s = (d[i][j] - d[j][i]).abs().to_f64_lossy();
            worst_symmetry = worst_symmetry.max(s);
            if s > AXIOM_TOLERANCE {
                violations += 1;
            }
        }
    }
    let mut worst_triangle = f64::NEG_INFINITY;
    let mut n_triples = 0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if i == j || j == k || i == k {
                    continue;
                }
                n_triples += 1;
                let excess = (d[i][k] - d[i][j] - d[j][k]).to_f64_lossy();
                worst_triangle = worst_triangle.max(excess);
                if excess > AXIOM_TOLERANCE {
                    violations += 1;
                }
            }
        }
    }
    Ok(MetricAxiomReport {
        n_points: n,
        n_triples,
        worst_symmetry,
        worst_triangle,
        worst_identity,
        violations,
        tolerance: AXIOM_TOLERANCE,
    })
}

/// Quotient distances between all unordered pairs of a point set, stored as
/// a packed upper triangle (row-major over `i < j`).
#[derive(Clone, Debug)]
pub struct PairTable<T> {
    n: usize,
    dists: Vec<T>,
}

impl<T: Real> PairTable<T> {
    pub fn new(g: &GroupSpec<T>, points: &[Vec<T>]) -> Result<Self> {
        for p in points {
            check_dim(g.ambient_dim(), p.len())?;
        }
        let n = points.len();
        let rows: Vec<Vec<T>> = (0..n)
            .into_par_iter()
            .map(|i| {
                ((i + 1)..n)
                    .map(|j| quotient_dist(g, &points[i], &points[j]).expect("dimensions checked"))
                    .collect()
            })
            .collect();
        Ok(Self { n, dists: rows.concat() })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn n_pairs(&self) -> usize {
        self.dists.len()
    }

    #[inline]
    pub fn row_offset(&self, i: usize) -> usize {
        // sum_{r < i} (n - 1 - r)
        i * (2 * self.n - i - 1) / 2
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.dists[self.row_offset(a) + (b - a - 1)]
    }

    /// Distances from `i` to `i+1..n`.
    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        let off = self.row_offset(i);
        &self.dists[off..off + (self.n - i - 1)]
    }
}

/// `||x - g* y||` at the aligner attaining the quotient distance.
pub fn aligned_residual<T: Real>(g: &GroupSpec<T>, x: &[T], y: &[T]) -> Result<T> {
    let a = g.argmax_inner(x, y)?;
    Ok(linalg::dist(x, &a.aligned))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use approx::assert_abs_diff_eq;

    #[test]
    fn examples() {
        let s = GroupSpec::<f64>::sign_flip(2);
        assert_eq!(quotient_dist(&s, &[1.0, 0.0], &[-1.0, 0.0]).unwrap(), 0.0);
        let p = GroupSpec::<f64>::permutation(3);
        assert_eq!(quotient_dist(&p, &[3.0, 1.0, 2.0], &[2.0, 3.0, 1.0]).unwrap(), 0.0);
    }

    #[test]
    fn phase_circle_distance_matches_sampled_phases() {
        let g = GroupSpec::<f64>::phase_circle(2);
        let (x, y) = ([1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]);
        let brute = (0..10_000)
            .map(|i| {
                let e = crate::groups::GroupElement::Phase(std::f64::consts::TAU * i as f64 / 1e4);
                dist(&x, &g.apply(&e, &y).unwrap())
            })
            .fold(f64::INFINITY, f64::min);
        assert_abs_diff_eq!(brute, 2f64.sqrt(), epsilon = 1e-6);
        assert_abs_diff_eq!(quotient_dist(&g, &x, &y).unwrap(), 2f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn axioms_hold_on_gaussian_points() {
        for g in [GroupSpec::<f64>::sign_flip(3), GroupSpec::permutation(4)] {
            let pts = rng::gaussian_points(11, "axioms", 10, g.ambient_dim());
            let r = check_metric_axioms(&g, &pts).unwrap();
            assert!(r.passed(), "{r:?}");
            assert_eq!(r.n_triples, 720);
        }
    }

    #[test]
    fn collinear_triple_is_tight() {
        let g = GroupSpec::<f64>::cyclic_shift(4);
        let x = vec![0.3, -1.2, 2.0, 0.7];
        let pts = vec![x.clone(), linalg::scale(&x, 2.0), linalg::scale(&x, 3.0)];
        let d01 = quotient_dist(&g, &pts[0], &pts[1]).unwrap();
        let d12 = quotient_dist(&g, &pts[1], &pts[2]).unwrap();
        let d02 = quotient_dist(&g, &pts[0], &pts[2]).unwrap();
        assert_abs_diff_eq!(d02, d01 + d12, epsilon = 1e-9);
        assert!(check_metric_axioms(&g, &pts).unwrap().passed());
    }

    #[test]
    fn axioms_need_three_points() {
        let g = GroupSpec::<f64>::sign_flip(1);
        assert!(check_metric_axioms(&g, &[vec![1.0], vec![2.0]]).is_err());
    }

    #[test]
    fn pair_table_indexing() {
        let g = GroupSpec::<f64>::sign_flip(2);
        let pts = rng::gaussian_points(3, "pairs", 7, 2);
        let t = PairTable::new(&g, &pts).unwrap();
        assert_eq!(t.n_pairs(), 21);
        for i in 0..7 {
            for j in (i + 1)..7 {
                assert_eq!(t.get(i, j), quotient_dist(&g, &pts[i], &pts[j]).unwrap());
                assert_eq!(t.get(j, i), t.get(i, j));
                assert_eq!(t.row(i)[j - i - 1], t.get(i, j));
            }
        }
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let g = GroupSpec::<f64>::sign_flip(2);
        assert!(matches!(quotient_dist(&g, &[1.0], &[1.0, 2.0]), Err(Error::DimensionMismatch { .. })));
    }
}
