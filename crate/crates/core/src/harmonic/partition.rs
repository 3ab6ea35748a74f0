//! Partitions of `S^1` and `S^2` into small cells with representatives.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::quadrature::fibonacci_sphere;

/// Relative tolerance on `sum |I_k| = omega_{d-1}`.
pub const MEASURE_TOL: f64 = 1e-9;

/// Test points per cell used to bound Fibonacci cell diameters.
const COVERING_OVERSAMPLE: usize = 24;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cell {
    pub representative: Vec<f64>,
    /// Unnormalized surface measure.
    pub measure: f64,
    pub diameter: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpherePartition {
    pub dim: usize,
    pub cells: Vec<Cell>,
    /// Declared bound on every chordal cell diameter.
    pub epsilon: f64,
    /// `false` when measures are nominal equal shares rather than exact cell
    /// areas (the `S^2` lattice). The resulting quadrature error is
    /// `O(n^{-1/2})` and is not certified.
    pub exact_measures: bool,
}

impl SpherePartition {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn total_measure(&self) -> f64 {
        self.cells.iter().map(|c| c.measure).sum()
    }

    /// Checks the measure sum and the diameter bound.
    pub fn validate(&self) -> Result<()> {
        let area = sphere_surface(self.dim);
        let total = self.total_measure();
        if ((total - area) / area).abs() > MEASURE_TOL {
            return Err(Error::DegenerateData(format!("cell measures sum to {total}, expected {area}")));
        }
        if let Some(c) = self.cells.iter().find(|c| c.diameter > self.epsilon) {
            return Err(Error::DegenerateData(format!(
                "cell diameter {} exceeds declared bound {}",
                c.diameter, self.epsilon
            )));
        }
        Ok(())
    }
}

/// Surface measure of `S^{d-1}` for `d` in `{2, 3}`.
fn sphere_surface(d: usize) -> f64 {
    super::gegenbauer::sphere_area(d - 1)
}

/// `n` cells of `S^{d-1}`: equal arcs for `d = 2`, Fibonacci lattice cells
/// for `d = 3`.
pub fn make_partition(d: usize, n: usize) -> Result<SpherePartition> {
    if n < 4 {
        return Err(Error::InvalidArgument(format!("a partition needs at least 4 cells, got {n}")));
    }
    match d {
        2 => Ok(circle_partition(n)),
        3 => Ok(fibonacci_partition(n)),
        _ => Err(Error::Unsupported(format!("sphere partitions exist only for d in {{2, 3}}, got {d}"))),
    }
}

fn circle_partition(n: usize) -> SpherePartition {
    let width = TAU / n as f64;
    let diameter = 2.0 * (PI / n as f64).sin();
    let cells = (0..n)
        .map(|k| {
            let mid = (k as f64 + 0.5) * width;
            Cell { representative: vec![mid.cos(), mid.sin()], measure: width, diameter }
        })
        .collect();
    SpherePartition { dim: 2, cells, epsilon: diameter, exact_measures: true }
}

/// Voronoi cells of the Fibonacci lattice. Each cell lies within the
/// covering radius `rho` of its site, so its diameter is at most `2 rho`;
/// `rho` is estimated on a lattice `COVERING_OVERSAMPLE` times denser.
fn fibonacci_partition(n: usize) -> SpherePartition {
    let sites = fibonacci_sphere(n);
    let probes = fibonacci_sphere(n * COVERING_OVERSAMPLE);
    let rho = probes
        .par_iter()
        .map(|p| sites.iter().map(|s| linalg::dist(p, s)).fold(f64::INFINITY, f64::min))
        .reduce(|| 0.0, f64::max);
    // Slack for probe spacing.
    let epsilon = 2.0 * rho * (1.0 + 2.0 / (COVERING_OVERSAMPLE as f64).sqrt());
    let measure = 4.0 * PI / n as f64;
    let cells = sites
        .into_iter()
        .map(|s| Cell { representative: s.to_vec(), measure, diameter: 2.0 * rho })
        .collect();
    SpherePartition { dim: 3, cells, epsilon, exact_measures: false }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn quarter_arcs() {
        let p = make_partition(2, 4).unwrap();
        assert_eq!(p.len(), 4);
        for c in &p.cells {
            assert_abs_diff_eq!(c.measure, PI / 2.0, epsilon = 1e-15);
            assert_abs_diff_eq!(c.diameter, 2f64.sqrt(), epsilon = 1e-15);
        }
        assert_abs_diff_eq!(p.total_measure(), TAU, epsilon = 1e-14);
        p.validate().unwrap();
    }

    #[test]
    fn fibonacci_cells() {
        let p = make_partition(3, 400).unwrap();
        assert_abs_diff_eq!(p.total_measure(), 4.0 * PI, epsilon = 1e-9 * 4.0 * PI);
        p.validate().unwrap();
        assert!(!p.exact_measures);
        // Diameter shrinks like n^{-1/2}.
        let q = make_partition(3, 1600).unwrap();
        let ratio = q.epsilon / p.epsilon;
        assert!((0.35..0.65).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(make_partition(4, 10).is_err());
        assert!(make_partition(2, 3).is_err());
    }
}
