//! Empirical distortion `beta_X / alpha_X` over all pairs of a point set, and
//! an empirical check of Weyl's inequality for Lipschitz bounds.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embeddings::Embedding;
use crate::error::{Error, Result};
use crate::groups::GroupSpec;
use crate::linalg;
use crate::metrics::PairTable;
use crate::scalar::Real;

/// Pairs whose quotient distance is at most this are treated as one orbit.
pub const COINCIDENT_TOL: f64 = 1e-9;

/// Margin below which a Weyl-inequality check counts as failed.
pub const WEYL_TOL: f64 = 1e-10;

/// Extremes of `||f(x_i) - f(x_j)|| / d([x_i], [x_j])` over a pair set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct DistortionReport<T> {
    pub alpha: T,
    pub beta: T,
    pub dist: T,
    pub argmin_pair: (usize, usize),
    pub argmax_pair: (usize, usize),
    pub n_pairs: usize,
    /// Pairs skipped because both points lie in the same orbit.
    pub dropped: usize,
}

pub const CSV_HEADER: &str = "group,model,n,alpha,beta,dist,seed";

impl<T: Real> DistortionReport<T> {
    /// One CSV row under [`CSV_HEADER`]; `n` is the embedding dimension.
    pub fn csv_row(&self, group: &str, model: &str, n: usize, seed: u64) -> String {
        format!("{},{},{n},{},{},{},{seed}", csv_field(group), csv_field(model), self.alpha, self.beta, self.dist)
    }
}

/// Quotes a field containing a comma, quote or newline.
fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Running extremes with ties kept at the first pair seen.
#[derive(Clone, Copy)]
struct Extremes<T> {
    min: (T, (usize, usize)),
    max: (T, (usize, usize)),
    count: usize,
    dropped: usize,
}

impl<T: Real> Extremes<T> {
    fn empty() -> Self {
        Self {
            min: (T::infinity(), (usize::MAX, usize::MAX)),
            max: (T::neg_infinity(), (usize::MAX, usize::MAX)),
            count: 0,
            dropped: 0,
        }
    }

    fn push(&mut self, ratio: T, pair: (usize, usize)) {
        self.count += 1;
        if ratio < self.min.0 {
            self.min = (ratio, pair);
        }
        if ratio > self.max.0 {
            self.max = (ratio, pair);
        }
    }

    /// Merges `later`, whose pairs all follow ours lexicographically.
    fn merge(mut self, later: Self) -> Self {
        if later.min.0 < self.min.0 {
            self.min = later.min;
        }
        if later.max.0 > self.max.0 {
            self.max = later.max;
        }
        self.count += later.count;
        self.dropped += later.dropped;
        self
    }

    fn into_report(self) -> Result<DistortionReport<T>> {
        if self.count == 0 {
            return Err(Error::DegenerateData(format!(
                "no pairs in distinct orbits ({} coincident pairs dropped)",
                self.dropped
            )));
        }
        let (alpha, beta) = (self.min.0, self.max.0);
        Ok(DistortionReport {
            alpha,
            beta,
            dist: beta / alpha,
            argmin_pair: self.min.1,
            argmax_pair: self.max.1,
            n_pairs: self.count,
            dropped: self.dropped,
        })
    }
}

/// Ratio extremes of precomputed embeddings over all pairs of `table`.
pub fn distortion_from_embeddings<T: Real>(emb: &[Vec<T>], table: &PairTable<T>) -> Result<DistortionReport<T>> {
    if emb.len() != table.len() {
        return Err(Error::ShapeMismatch(format!("{} embeddings for {} points", emb.len(), table.len())));
    }
    let tol = T::lit(COINCIDENT_TOL);
    let rows: Vec<Extremes<T>> = (0..emb.len())
        .into_par_iter()
        .map(|i| {
            let mut e = Extremes::empty();
            for (off, &d) in table.row(i).iter().enumerate() {
                let j = i + 1 + off;
                if d <= tol {
                    e.dropped += 1;
                    continue;
                }
                e.push(linalg::dist(&emb[i], &emb[j]) / d, (i, j));
            }
            e
        })
        .collect();
    rows.into_iter().fold(Extremes::empty(), Extremes::merge).into_report()
}

/// Ratio extremes over an explicit list of pairs `(i, j)`.
pub fn distortion_over_pairs<T: Real>(
    emb: &[Vec<T>],
    table: &PairTable<T>,
    pairs: &[(usize, usize)],
) -> Result<DistortionReport<T>> {
    let tol = T::lit(COINCIDENT_TOL);
    let mut e = Extremes::empty();
    for &(i, j) in pairs {
        let d = table.get(i, j);
        if d <= tol {
            e.dropped += 1;
            continue;
        }
        e.push(linalg::dist(&emb[i], &emb[j]) / d, (i.min(j), i.max(j)));
    }
    e.into_report()
}

/// `dist_X(f)` over all unordered pairs of `points`.
pub fn empirical_distortion<T: Real, E: Embedding<T> + ?Sized>(
    f: &E,
    g: &GroupSpec<T>,
    points: &[Vec<T>],
) -> Result<DistortionReport<T>> {
    if points.len() < 2 {
        return Err(Error::DegenerateData(format!("need at least 2 points, got {}", points.len())));
    }
    let table = PairTable::new(g, points)?;
    distortion_from_embeddings(&f.embed_all(points)?, &table)
}

/// Both sides of `|alpha(f) - alpha(g)| <= beta(f - g)` and
/// `|beta(f) - beta(g)| <= beta(f - g)` over one pair set.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WeylReport {
    pub alpha_f: f64,
    pub alpha_g: f64,
    pub beta_f: f64,
    pub beta_g: f64,
    pub beta_diff: f64,
    /// `beta(f-g) - |alpha(f) - alpha(g)|`
    pub alpha_margin: f64,
    /// `beta(f-g) - |beta(f) - beta(g)|`
    pub beta_margin: f64,
    pub n_pairs: usize,
}

impl WeylReport {
    pub fn passed(&self) -> bool {
        self.alpha_margin >= -WEYL_TOL && self.beta_margin >= -WEYL_TOL
    }
}

/// Empirical Weyl inequality for two maps into the same space.
pub fn weyl_check<T: Real, F, G>(f: &F, h: &G, group: &GroupSpec<T>, points: &[Vec<T>]) -> Result<WeylReport>
where
    F: Embedding<T> + ?Sized,
    G: Embedding<T> + ?Sized,
{
    if f.output_dim() != h.output_dim() {
        return Err(Error::ShapeMismatch(format!(
            "output dimensions differ: {} vs {}",
            f.output_dim(),
            h.output_dim()
        )));
    }
    let table = PairTable::new(group, points)?;
    let ef = f.embed_all(points)?;
    let eh = h.embed_all(points)?;
    let diff: Vec<Vec<T>> = ef.iter().zip(&eh).map(|(a, b)| linalg::sub(a, b)).collect();
    let rf = distortion_from_embeddings(&ef, &table)?;
    let rh = distortion_from_embeddings(&eh, &table)?;
    let rd = distortion_from_embeddings(&diff, &table)?;
    let v = |t: T| t.to_f64_lossy();
    let beta_diff = v(rd.beta);
    Ok(WeylReport {
        alpha_f: v(rf.alpha),
        alpha_g: v(rh.alpha),
        beta_f: v(rf.beta),
        beta_g: v(rh.beta),
        beta_diff,
        alpha_margin: beta_diff - (v(rf.alpha) - v(rh.alpha)).abs(),
        beta_margin: beta_diff - (v(rf.beta) - v(rh.beta)).abs(),
        n_pairs: rf.n_pairs,
    })
}
