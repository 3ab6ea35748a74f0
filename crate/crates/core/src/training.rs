//! Fitting invariant maps to minimize empirical distortion.
//!
//! The loss is `log beta_X - log alpha_X` over a pair set. Its subgradient
//! flows only through the pairs attaining the max and min ratios, and through
//! each max filter at its attaining orbit point. Parameters are updated with
//! Adam; each restart keeps its best iterate and the best restart wins.

use std::f64::consts::PI;

use log::debug;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distortion::{empirical_distortion, DistortionReport, COINCIDENT_TOL};
use crate::embeddings::{Embedding, EmbeddingModel};
use crate::error::{check_dim, Error, Result};
use crate::filters::{FilterBank, LinearMap};
use crate::groups::GroupSpec;
use crate::linalg::{self, Matrix};
use crate::metrics::PairTable;
use crate::rng;
use crate::scalar::Real;

/// Trainable architectures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Arch {
    /// Unit-norm templates of a max filter bank; `n` templates, `m` unused.
    Mf,
    /// Linear layer over a frozen Gaussian bank of `m` templates.
    Lrmf,
    /// Linear layer and `m` templates trained jointly.
    Lmf,
    /// `L relu(W x)` with hidden width `m`, trained on a group-augmented set.
    Relu,
}

impl Arch {
    pub fn label(self) -> &'static str {
        match self {
            Arch::Mf => "mf",
            Arch::Lrmf => "lrmf",
            Arch::Lmf => "lmf",
            Arch::Relu => "relu",
        }
    }
}

impl std::str::FromStr for Arch {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mf" => Ok(Arch::Mf),
            "lrmf" => Ok(Arch::Lrmf),
            "lmf" => Ok(Arch::Lmf),
            "relu" => Ok(Arch::Relu),
            _ => Err(Error::Parse(format!("unknown architecture {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub arch: Arch,
    /// Hidden width: templates for LRMF/LMF, ReLU units for RELU.
    pub m: usize,
    /// Output dimension.
    pub n: usize,
    pub steps: usize,
    pub learning_rate: f64,
    /// Final learning rate as a fraction of the initial one (cosine schedule).
    pub final_lr_fraction: f64,
    pub restarts: usize,
    pub seed: u64,
    /// Random pairs per step; 0 means all pairs.
    pub batch_pairs: usize,
    /// Group samples per training point for RELU when `G` is not enumerated.
    pub augmentation_samples: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            arch: Arch::Lmf,
            m: 16,
            n: 16,
            steps: 2000,
            learning_rate: 1e-2,
            final_lr_fraction: 0.05,
            restarts: 10,
            seed: 0,
            batch_pairs: 0,
            augmentation_samples: 16,
        }
    }
}

/// Finite groups up to this order are fully enumerated for RELU augmentation.
pub const MAX_FULL_AUGMENTATION: u128 = 256;

/// Evaluation interval for best-iterate tracking when pairs are batched.
const BATCH_EVAL_EVERY: usize = 25;

/// Steps between fresh augmentation draws for continuous groups.
const AUGMENT_REFRESH: usize = 50;

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.n == 0 {
            return bad("n must be positive".into());
        }
        if matches!(self.arch, Arch::Lrmf | Arch::Lmf) && self.m < self.n {
            return bad(format!("{} needs m >= n, got m = {} < n = {}", self.arch.label(), self.m, self.n));
        }
        if self.arch == Arch::Relu && self.m == 0 {
            return bad("relu needs a positive hidden width m".into());
        }
        if self.steps == 0 || self.restarts == 0 {
            return bad("steps and restarts must be at least 1".into());
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad(format!("learning rate must be positive, got {}", self.learning_rate));
        }
        if !(0.0..=1.0).contains(&self.final_lr_fraction) {
            return bad(format!("final_lr_fraction must lie in [0, 1], got {}", self.final_lr_fraction));
        }
        if self.arch == Arch::Relu && self.augmentation_samples == 0 {
            return bad("augmentation_samples must be at least 1".into());
        }
        Ok(())
    }

    /// Number of max filter templates or hidden units.
    pub fn width(&self) -> usize {
        match self.arch {
            Arch::Mf => self.n,
            _ => self.m,
        }
    }

    fn lr_at(&self, step: usize) -> f64 {
        let t = step as f64 / self.steps.max(2).saturating_sub(1) as f64;
        let cosine = 0.5 * (1.0 + (PI * t.min(1.0)).cos());
        self.learning_rate * (self.final_lr_fraction + (1.0 - self.final_lr_fraction) * cosine)
    }
}

/// Result of [`train`].
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct TrainOutcome<T: Real> {
    pub model: EmbeddingModel<T>,
    /// Distortion of `model` over all training pairs.
    pub train_report: DistortionReport<T>,
    /// Best training distortion reached by each restart.
    pub restart_dists: Vec<T>,
    pub best_restart: usize,
}

/// Flat parameter vector with a fixed layout per architecture:
/// `[templates (w x d) | L (n x w)]` for MF/LMF (MF has no `L`),
/// `[L]` for LRMF and `[W (m x d) | L (n x m)]` for RELU.
#[derive(Clone)]
struct Net<T: Real> {
    arch: Arch,
    group: GroupSpec<T>,
    d: usize,
    w: usize,
    n: usize,
    params: Vec<T>,
    /// Frozen LRMF templates.
    frozen: Option<Matrix<T>>,
}

struct Cache<T> {
    /// Hidden features: max filter outputs, or ReLU activations.
    hidden: Vec<T>,
    out: Vec<T>,
}

impl<T: Real> Net<T> {
    fn templates(&self) -> &[T] {
        match self.arch {
            Arch::Lrmf => self.frozen.as_ref().expect("lrmf keeps templates").as_slice(),
            _ => &self.params[..self.w * self.d],
        }
    }

    fn linear(&self) -> Option<&[T]> {
        match self.arch {
            Arch::Mf => None,
            Arch::Lrmf => Some(&self.params),
            Arch::Lmf | Arch::Relu => Some(&self.params[self.w * self.d..]),
        }
    }

    fn linear_offset(&self) -> usize {
        match self.arch {
            Arch::Lrmf => 0,
            _ => self.w * self.d,
        }
    }

    fn init<R: Rng + ?Sized>(cfg: &TrainConfig, group: &GroupSpec<T>, rng: &mut R) -> Self {
        let d = group.ambient_dim();
        let (w, n) = (cfg.width(), cfg.n);
        let mut params: Vec<T>;
        let mut frozen = None;
        let inv_sqrt = |k: usize| T::one() / T::from_usize_lossy(k).sqrt();
        match cfg.arch {
            Arch::Mf => params = rng::gaussian_vec(rng, w * d),
            Arch::Lrmf => {
                frozen = Some(Matrix::from_vec(w, d, rng::gaussian_vec(rng, w * d)).expect("shape"));
                params = rng::gaussian_vec(rng, n * w);
                params.iter_mut().for_each(|v| *v *= inv_sqrt(w));
            }
            Arch::Lmf | Arch::Relu => {
                params = rng::gaussian_vec(rng, w * d);
                if cfg.arch == Arch::Relu {
                    params.iter_mut().for_each(|v| *v *= inv_sqrt(d));
                }
                let mut l: Vec<T> = rng::gaussian_vec(rng, n * w);
                l.iter_mut().for_each(|v| *v *= inv_sqrt(w));
                params.extend(l);
            }
        }
        let mut net = Self { arch: cfg.arch, group: group.clone(), d, w, n, params, frozen };
        if matches!(cfg.arch, Arch::Mf | Arch::Lmf) {
            net.normalize_templates();
        }
        net
    }

    fn from_model(model: &EmbeddingModel<T>, arch: Arch) -> Result<Self> {
        let mismatch = || Error::InvalidArgument(format!("cannot warm-start {} from a {} model", arch.label(), model.label()));
        match (arch, model) {
            (Arch::Mf, EmbeddingModel::MaxFilterBank { bank }) => Ok(Self {
                arch,
                group: bank.group().clone(),
                d: bank.input_dim(),
                w: bank.len(),
                n: bank.len(),
                params: bank.templates().as_slice().to_vec(),
                frozen: None,
            }),
            (Arch::Lmf | Arch::Lrmf, EmbeddingModel::LinearOfBank { linear, bank }) => {
                let mut params = Vec::new();
                let mut frozen = None;
                if arch == Arch::Lmf {
                    params.extend_from_slice(bank.templates().as_slice());
                } else {
                    frozen = Some(bank.templates().clone());
                }
                params.extend_from_slice(linear.matrix().as_slice());
                Ok(Self {
                    arch,
                    group: bank.group().clone(),
                    d: bank.input_dim(),
                    w: bank.len(),
                    n: linear.output_dim(),
                    params,
                    frozen,
                })
            }
            _ => Err(mismatch()),
        }
    }

    fn normalize_templates(&mut self) {
        if matches!(self.arch, Arch::Mf) {
            for row in self.params[..self.w * self.d].chunks_exact_mut(self.d) {
                let r = linalg::norm(row);
                if r > T::zero() {
                    row.iter_mut().for_each(|v| *v /= r);
                }
            }
        }
    }

    fn forward(&self, x: &[T]) -> Cache<T> {
        let (d, w, n) = (self.d, self.w, self.n);
        let hidden: Vec<T> = match self.arch {
            Arch::Relu => self.params[..w * d]
                .chunks_exact(d)
                .map(|row| linalg::dot(row, x).max(T::zero()))
                .collect(),
            _ => self
                .templates()
                .chunks_exact(d)
                .map(|y| self.group.argmax_inner(x, y).expect("dimensions checked").value)
                .collect(),
        };
        let out = match self.linear() {
            None => hidden.clone(),
            Some(l) => l.chunks_exact(w).map(|row| linalg::dot(row, &hidden)).collect(),
        };
        debug_assert_eq!(out.len(), n);
        Cache { hidden, out }
    }

    /// Adds `d<upstream, f(x)>/dparams` into `grad`.
    fn backward(&self, x: &[T], cache: &Cache<T>, upstream: &[T], grad: &mut [T]) {
        let (d, w) = (self.d, self.w);
        let hidden_grad: Vec<T> = match self.linear() {
            None => upstream.to_vec(),
            Some(l) => {
                let off = self.linear_offset();
                for (r, &u) in upstream.iter().enumerate() {
                    if u == T::zero() {
                        continue;
                    }
                    for (c, &h) in cache.hidden.iter().enumerate() {
                        grad[off + r * w + c] += u * h;
                    }
                }
                (0..w).map(|c| (0..self.n).map(|r| l[r * w + c] * upstream[r]).sum()).collect()
            }
        };
        match self.arch {
            Arch::Lrmf => {}
            Arch::Relu => {
                for (k, &hg) in hidden_grad.iter().enumerate() {
                    if cache.hidden[k] > T::zero() && hg != T::zero() {
                        linalg::axpy(hg, x, &mut grad[k * d..(k + 1) * d]);
                    }
                }
            }
            Arch::Mf | Arch::Lmf => {
                for (k, &hg) in hidden_grad.iter().enumerate() {
                    if hg == T::zero() {
                        continue;
                    }
                    let y = &self.params[k * d..(k + 1) * d];
                    // d/dy max_g <x, g y> = g*^T x, the point of [x] best aligned with y
                    let a = self.group.argmax_inner(y, x).expect("dimensions checked");
                    linalg::axpy(hg, &a.aligned, &mut grad[k * d..(k + 1) * d]);
                }
            }
        }
    }

    fn to_model(&self) -> EmbeddingModel<T> {
        let bank = |t: &[T]| {
            FilterBank::from_matrix(self.group.clone(), Matrix::from_vec(self.w, self.d, t.to_vec()).expect("shape"))
                .expect("dims")
        };
        let lin = |l: &[T], cols: usize| {
            LinearMap::new(Matrix::from_vec(self.n, cols, l.to_vec()).expect("shape")).expect("finite parameters")
        };
        match self.arch {
            Arch::Mf => EmbeddingModel::MaxFilterBank { bank: bank(self.templates()) },
            Arch::Lrmf | Arch::Lmf => EmbeddingModel::LinearOfBank {
                linear: lin(self.linear().expect("linear layer"), self.w),
                bank: bank(self.templates()),
            },
            Arch::Relu => EmbeddingModel::ReluNet {
                w: LinearMap::new(Matrix::from_vec(self.w, self.d, self.params[..self.w * self.d].to_vec()).expect("shape"))
                    .expect("finite parameters"),
                l: lin(self.linear().expect("linear layer"), self.w),
            },
        }
    }
}

struct Adam<T> {
    m: Vec<T>,
    v: Vec<T>,
    t: i32,
}

impl<T: Real> Adam<T> {
    const B1: f64 = 0.9;
    const B2: f64 = 0.999;
    const EPS: f64 = 1e-8;

    fn new(len: usize) -> Self {
        Self { m: vec![T::zero(); len], v: vec![T::zero(); len], t: 0 }
    }

    fn step(&mut self, params: &mut [T], grad: &[T], lr: T) {
        self.t += 1;
        let (b1, b2) = (T::lit(Self::B1), T::lit(Self::B2));
        let c1 = T::one() - b1.powi(self.t);
        let c2 = T::one() - b2.powi(self.t);
        for i in 0..params.len() {
            self.m[i] = b1 * self.m[i] + (T::one() - b1) * grad[i];
            self.v[i] = b2 * self.v[i] + (T::one() - b2) * grad[i] * grad[i];
            let mh = self.m[i] / c1;
            let vh = self.v[i] / c2;
            params[i] -= lr * mh / (vh.sqrt() + T::lit(Self::EPS));
        }
    }
}

/// Training points: the inputs (possibly group-augmented) with their orbit
/// index into the base pair table.
struct Sample<T> {
    points: Vec<Vec<T>>,
    orbit: Vec<usize>,
}

fn augment<T: Real, R: Rng + ?Sized>(g: &GroupSpec<T>, base: &[Vec<T>], samples: usize, rng: &mut R) -> Sample<T> {
    let full = g.order().filter(|&o| o <= MAX_FULL_AUGMENTATION).and_then(|_| g.enumerate().ok());
    let mut points = Vec::new();
    let mut orbit = Vec::new();
    for (i, x) in base.iter().enumerate() {
        match &full {
            Some(elems) => {
                for e in elems {
                    points.push(g.apply(e, x).expect("dims checked"));
                    orbit.push(i);
                }
            }
            None => {
                points.push(x.clone());
                orbit.push(i);
                for _ in 1..samples {
                    points.push(g.apply(&g.sample_one(rng), x).expect("dims checked"));
                    orbit.push(i);
                }
            }
        }
    }
    Sample { points, orbit }
}

/// Extremes of the ratio over a pair set; pairs within one orbit are skipped.
struct PairExtremes<T> {
    min: (T, (usize, usize)),
    max: (T, (usize, usize)),
}

fn pair_extremes<T: Real>(
    out: &[Vec<T>],
    orbit: &[usize],
    table: &PairTable<T>,
    batch: Option<&[(usize, usize)]>,
) -> Option<PairExtremes<T>> {
    let tol = T::lit(COINCIDENT_TOL);
    let ratio = |a: usize, b: usize| -> Option<T> {
        if orbit[a] == orbit[b] {
            return None;
        }
        let q = table.get(orbit[a], orbit[b]);
        (q > tol).then(|| linalg::dist(&out[a], &out[b]) / q)
    };
    let fold = |acc: Option<PairExtremes<T>>, (r, p): (T, (usize, usize))| match acc {
        None => Some(PairExtremes { min: (r, p), max: (r, p) }),
        Some(mut e) => {
            if r < e.min.0 {
                e.min = (r, p);
            }
            if r > e.max.0 {
                e.max = (r, p);
            }
            Some(e)
        }
    };
    match batch {
        Some(pairs) => pairs.iter().filter_map(|&(a, b)| ratio(a, b).map(|r| (r, (a, b)))).fold(None, fold),
        None => {
            let rows: Vec<Option<PairExtremes<T>>> = (0..out.len())
                .into_par_iter()
                .map(|a| ((a + 1)..out.len()).filter_map(|b| ratio(a, b).map(|r| (r, (a, b)))).fold(None, fold))
                .collect();
            rows.into_iter().fold(None, |acc, e| match (acc, e) {
                (None, e) => e,
                (acc, None) => acc,
                (Some(a), Some(e)) => fold(fold(Some(a), e.min), e.max),
            })
        }
    }
}

struct RestartResult<T: Real> {
    net: Net<T>,
    best_dist: T,
}

fn run_restart<T: Real>(
    cfg: &TrainConfig,
    mut net: Net<T>,
    restart: u64,
    base: &[Vec<T>],
    table: &PairTable<T>,
) -> Result<RestartResult<T>> {
    let mut batch_rng = rng::stream(cfg.seed, "train-batch", restart);
    let mut aug_rng = rng::stream(cfg.seed, "train-augment", restart);
    let augmenting = net.arch == Arch::Relu;
    let mut sample = if augmenting {
        augment(&net.group, base, cfg.augmentation_samples, &mut aug_rng)
    } else {
        Sample { points: base.to_vec(), orbit: (0..base.len()).collect() }
    };
    let refresh = augmenting && !net.group.order().is_some_and(|o| o <= MAX_FULL_AUGMENTATION);
    let mut adam = Adam::new(net.params.len());
    let mut best = (T::infinity(), net.params.clone());
    let mut grad = vec![T::zero(); net.params.len()];
    let mut batch = Vec::with_capacity(cfg.batch_pairs);

    for step in 0..cfg.steps {
        if refresh && step > 0 && step % AUGMENT_REFRESH == 0 {
            sample = augment(&net.group, base, cfg.augmentation_samples, &mut aug_rng);
        }
        let caches: Vec<Cache<T>> = sample.points.par_iter().map(|x| net.forward(x)).collect();
        let out: Vec<Vec<T>> = caches.iter().map(|c| c.out.clone()).collect();

        let batched = cfg.batch_pairs > 0;
        if batched {
            batch.clear();
            let np = sample.points.len();
            for _ in 0..cfg.batch_pairs {
                let a = batch_rng.random_range(0..np);
                let b = batch_rng.random_range(0..np - 1);
                batch.push((a, if b >= a { b + 1 } else { b }));
            }
        }
        let Some(ext) = pair_extremes(&out, &sample.orbit, table, batched.then_some(batch.as_slice())) else {
            return Err(Error::DegenerateData("no training pairs in distinct orbits".into()));
        };

        // Best-iterate tracking on the full training pair set.
        let track = !batched || step % BATCH_EVAL_EVERY == 0;
        if track {
            let full = if batched { pair_extremes(&out, &sample.orbit, table, None) } else { Some(ext.clone_extremes()) };
            if let Some(f) = full {
                let dist = f.max.0 / f.min.0;
                if dist < best.0 {
                    best = (dist, net.params.clone());
                }
            }
        }

        grad.iter_mut().for_each(|g| *g = T::zero());
        for (sign, (a, b)) in [(T::one(), ext.max.1), (-T::one(), ext.min.1)] {
            let v = linalg::sub(&out[a], &out[b]);
            let nsq = linalg::norm_sq(&v);
            if !(nsq > T::zero()) {
                continue;
            }
            let up: Vec<T> = v.iter().map(|&t| sign * t / nsq).collect();
            net.backward(&sample.points[a], &caches[a], &up, &mut grad);
            let down: Vec<T> = up.iter().map(|&t| -t).collect();
            net.backward(&sample.points[b], &caches[b], &down, &mut grad);
        }
        adam.step(&mut net.params, &grad, T::lit(cfg.lr_at(step)));
        net.normalize_templates();
    }

    // The final iterate has not been scored yet.
    let out: Vec<Vec<T>> = sample.points.par_iter().map(|x| net.forward(x).out).collect();
    if let Some(f) = pair_extremes(&out, &sample.orbit, table, None) {
        let dist = f.max.0 / f.min.0;
        if dist < best.0 {
            best = (dist, net.params.clone());
        }
    }
    debug!("restart {restart}: best training distortion {}", best.0);
    net.params = best.1;
    Ok(RestartResult { net, best_dist: best.0 })
}

impl<T: Copy> PairExtremes<T> {
    fn clone_extremes(&self) -> Self {
        Self { min: self.min, max: self.max }
    }
}

fn check_training_set<T: Real>(g: &GroupSpec<T>, x: &[Vec<T>]) -> Result<PairTable<T>> {
    if x.len() < 2 {
        return Err(Error::DegenerateData(format!("need at least 2 training points, got {}", x.len())));
    }
    for p in x {
        check_dim(g.ambient_dim(), p.len())?;
    }
    PairTable::new(g, x)
}

fn finish<T: Real>(results: Vec<RestartResult<T>>, x: &[Vec<T>], table: &PairTable<T>) -> Result<TrainOutcome<T>> {
    let restart_dists: Vec<T> = results.iter().map(|r| r.best_dist).collect();
    let best_restart = restart_dists
        .iter()
        .enumerate()
        .fold(0, |b, (i, &d)| if d < restart_dists[b] { i } else { b });
    let model = results[best_restart].net.to_model();
    let emb = model.embed_all(x)?;
    let train_report = crate::distortion::distortion_from_embeddings(&emb, table)?;
    Ok(TrainOutcome { model, train_report, restart_dists, best_restart })
}

/// Trains `cfg.restarts` independently initialized models in parallel and
/// returns the one with the smallest training distortion.
pub fn train<T: Real>(cfg: &TrainConfig, g: &GroupSpec<T>, x_train: &[Vec<T>]) -> Result<TrainOutcome<T>> {
    cfg.validate()?;
    let table = check_training_set(g, x_train)?;
    let results: Vec<RestartResult<T>> = (0..cfg.restarts as u64)
        .into_par_iter()
        .map(|r| {
            let mut init_rng = rng::stream(cfg.seed, "train-init", r);
            let net = Net::init(cfg, g, &mut init_rng);
            run_restart(cfg, net, r, x_train, &table)
        })
        .collect::<Result<_>>()?;
    finish(results, x_train, &table)
}

/// Continues training from an existing model (a single run, no restarts).
pub fn train_from<T: Real>(
    cfg: &TrainConfig,
    model: &EmbeddingModel<T>,
    x_train: &[Vec<T>],
) -> Result<TrainOutcome<T>> {
    cfg.validate()?;
    let net = Net::from_model(model, cfg.arch)?;
    let table = check_training_set(&net.group, x_train)?;
    let result = run_restart(cfg, net, 0, x_train, &table)?;
    finish(vec![result], x_train, &table)
}

/// Held-out distortion of a model.
pub fn evaluate<T: Real, E: Embedding<T> + ?Sized>(
    model: &E,
    g: &GroupSpec<T>,
    x_test: &[Vec<T>],
) -> Result<DistortionReport<T>> {
    empirical_distortion(model, g, x_test)
}

/// Best of `n_draws` Gaussian banks by test distortion. Draw `k` depends only
/// on `(seed, k)`, so results for nested draw counts are nested.
pub fn rmf_search<T: Real>(
    g: &GroupSpec<T>,
    m: usize,
    n_draws: usize,
    x_test: &[Vec<T>],
    seed: u64,
) -> Result<(FilterBank<T>, DistortionReport<T>)> {
    if n_draws == 0 {
        return Err(Error::InvalidArgument("n_draws must be at least 1".into()));
    }
    let table = check_training_set(g, x_test)?;
    let tol = T::lit(COINCIDENT_TOL);
    let mut best: Option<(FilterBank<T>, T)> = None;
    for k in 0..n_draws as u64 {
        let mut r = rng::stream(seed, "rmf-bank", k);
        let bank = FilterBank::gaussian(g.clone(), m, &mut r);
        let emb = bank.embed_all(x_test)?;
        let bound = best.as_ref().map(|b| b.1);
        // Rows are scanned in order and abandoned once the running ratio
        // reaches the incumbent, which can then no longer be beaten.
        let (mut lo, mut hi) = (T::infinity(), T::neg_infinity());
        let mut abandoned = false;
        for i in 0..emb.len() {
            for (off, &q) in table.row(i).iter().enumerate() {
                if q <= tol {
                    continue;
                }
                let r = linalg::dist(&emb[i], &emb[i + 1 + off]) / q;
                lo = lo.min(r);
                hi = hi.max(r);
            }
            if bound.is_some_and(|b| hi / lo >= b) {
                abandoned = true;
                break;
            }
        }
        if !abandoned && hi >= lo {
            best = Some((bank, hi / lo));
        }
    }
    let (bank, _) = best.ok_or_else(|| Error::DegenerateData("no pairs in distinct orbits".into()))?;
    let report = crate::distortion::distortion_from_embeddings(&bank.embed_all(x_test)?, &table)?;
    Ok((bank, report))
}

/// Rescales the output of a trained model by `c > 0`, keeping it in its
/// architecture family.
pub fn rescale_model<T: Real>(model: &EmbeddingModel<T>, c: T) -> Result<EmbeddingModel<T>> {
    let scale_lin = |l: &LinearMap<T>| LinearMap::new(l.matrix().scaled(c));
    Ok(match model {
        EmbeddingModel::MaxFilterBank { bank } => EmbeddingModel::MaxFilterBank {
            bank: FilterBank::from_matrix(bank.group().clone(), bank.templates().scaled(c))?,
        },
        EmbeddingModel::LinearOfBank { linear, bank } => {
            EmbeddingModel::LinearOfBank { linear: scale_lin(linear)?, bank: bank.clone() }
        }
        EmbeddingModel::ReluNet { w, l } => EmbeddingModel::ReluNet { w: w.clone(), l: scale_lin(l)? },
        other => return Err(Error::Unsupported(format!("rescaling a {} model", other.label()))),
    })
}

/// Pads a bank model to `m` templates and `n` outputs with zeros. Zero
/// templates and zero rows contribute nothing, so every pairwise distance
/// in the image is unchanged.
pub fn widen<T: Real>(model: &EmbeddingModel<T>, m: usize, n: usize) -> Result<EmbeddingModel<T>> {
    let pad_bank = |bank: &FilterBank<T>, m: usize| -> Result<FilterBank<T>> {
        let t = bank.templates();
        if m < t.rows() {
            return Err(Error::InvalidArgument(format!("cannot shrink {} templates to {m}", t.rows())));
        }
        let d = t.cols();
        FilterBank::from_matrix(bank.group().clone(), Matrix::from_fn(m, d, |i, j| if i < t.rows() { t[(i, j)] } else { T::zero() }))
    };
    Ok(match model {
        EmbeddingModel::MaxFilterBank { bank } => EmbeddingModel::MaxFilterBank { bank: pad_bank(bank, m.max(n))? },
        EmbeddingModel::LinearOfBank { linear, bank } => {
            let l = linear.matrix();
            if n < l.rows() {
                return Err(Error::InvalidArgument(format!("cannot shrink {} outputs to {n}", l.rows())));
            }
            let wide = Matrix::from_fn(n, m, |i, j| if i < l.rows() && j < l.cols() { l[(i, j)] } else { T::zero() });
            EmbeddingModel::LinearOfBank { linear: LinearMap::new(wide)?, bank: pad_bank(bank, m)? }
        }
        other => return Err(Error::Unsupported(format!("widening a {} model", other.label()))),
    })
}

/// Shuffles and splits points into train and test sets.
pub fn split<T: Clone, R: Rng + ?Sized>(mut points: Vec<T>, n_train: usize, rng: &mut R) -> (Vec<T>, Vec<T>) {
    points.shuffle(rng);
    let test = points.split_off(n_train.min(points.len()));
    (points, test)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters::{sorting_bank, sorting_decoder};

    fn quick(arch: Arch, m: usize, n: usize) -> TrainConfig {
        TrainConfig { arch, m, n, steps: 150, restarts: 2, seed: 3, ..TrainConfig::default() }
    }

    #[test]
    fn config_validation() {
        assert!(TrainConfig::default().validate().is_ok());
        assert!(TrainConfig { m: 4, n: 8, ..TrainConfig::default() }.validate().is_err());
        assert!(TrainConfig { arch: Arch::Mf, m: 0, n: 8, ..TrainConfig::default() }.validate().is_ok());
        assert!(TrainConfig { steps: 0, ..TrainConfig::default() }.validate().is_err());
        assert!(TrainConfig { restarts: 0, ..TrainConfig::default() }.validate().is_err());
        assert!(TrainConfig { learning_rate: -1.0, ..TrainConfig::default() }.validate().is_err());
        assert_eq!("LMF".parse::<Arch>().unwrap(), Arch::Lmf);
        assert!("cnn".parse::<Arch>().is_err());
    }

    #[test]
    fn config_rejects_unknown_keys() {
        assert!(serde_json::from_str::<TrainConfig>(r#"{"arch":"mf","n":4}"#).is_ok());
        assert!(serde_json::from_str::<TrainConfig>(r#"{"arch":"mf","lr":0.1}"#).is_err());
    }

    #[test]
    fn gradient_matches_finite_differences() {
        // Directional derivative of <u, f(x)> in parameter space.
        let cases = [
            (Arch::Lmf, GroupSpec::<f64>::cyclic_shift(4)),
            (Arch::Mf, GroupSpec::<f64>::phase_circle(2)),
            (Arch::Relu, GroupSpec::<f64>::sign_flip(3)),
            (Arch::Lrmf, GroupSpec::<f64>::orthogonal_tuple(2, 2)),
        ];
        for (arch, g) in cases {
            let cfg = TrainConfig { arch, m: 5, n: 3, ..TrainConfig::default() };
            let mut r = rng::stream(1, "fd-net", arch as u64);
            let net = Net::init(&cfg, &g, &mut r);
            let x: Vec<f64> = rng::gaussian_vec(&mut r, g.ambient_dim());
            let u: Vec<f64> = rng::gaussian_vec(&mut r, net.n);
            let dir: Vec<f64> = rng::gaussian_vec(&mut r, net.params.len());
            let mut grad = vec![0.0; net.params.len()];
            net.backward(&x, &net.forward(&x), &u, &mut grad);
            let h = 1e-6;
            let eval = |s: f64| {
                let mut p = net.clone();
                linalg::axpy(s, &dir, &mut p.params);
                linalg::dot(&u, &p.forward(&x).out)
            };
            let fd = (eval(h) - eval(-h)) / (2.0 * h);
            assert!((fd - linalg::dot(&grad, &dir)).abs() < 1e-5, "{arch:?}: {fd} vs {}", linalg::dot(&grad, &dir));
        }
    }

    #[test]
    fn training_is_deterministic_and_improves() {
        let g = GroupSpec::<f64>::sign_flip(2);
        let x = rng::gaussian_points(1, "train-det", 60, 2);
        let cfg = quick(Arch::Lmf, 6, 4);
        let a = train(&cfg, &g, &x).unwrap();
        let b = train(&cfg, &g, &x).unwrap();
        assert_eq!(serde_json::to_string(&a.model).unwrap(), serde_json::to_string(&b.model).unwrap());
        let best = a.restart_dists.iter().cloned().fold(f64::INFINITY, f64::min);
        assert_eq!(a.restart_dists[a.best_restart], best);
        assert!((a.train_report.dist - best).abs() < 1e-9);
        // Improves on its own initialization.
        let init = Net::init(&cfg, &g, &mut rng::stream(cfg.seed, "train-init", a.best_restart as u64)).to_model();
        assert!(a.train_report.dist <= evaluate(&init, &g, &x).unwrap().dist);
    }

    #[test]
    fn every_architecture_trains() {
        let g = GroupSpec::<f64>::sign_flip(2);
        let x = rng::gaussian_points(2, "train-arch", 40, 2);
        for arch in [Arch::Mf, Arch::Lrmf, Arch::Lmf, Arch::Relu] {
            let out = train(&quick(arch, 6, 4), &g, &x).unwrap();
            assert_eq!(out.model.label(), arch.label().replace("lrmf", "lmf"));
            assert!(out.train_report.dist.is_finite() && out.train_report.dist >= 1.0);
        }
    }

    #[test]
    fn rescaling_keeps_distortion() {
        let g = GroupSpec::<f64>::sign_flip(2);
        let x = rng::gaussian_points(3, "train-scale", 50, 2);
        let out = train(&quick(Arch::Lmf, 4, 4), &g, &x).unwrap();
        let base = evaluate(&out.model, &g, &x).unwrap().dist;
        for c in [0.01, 3.0, 1e4] {
            let d = evaluate(&rescale_model(&out.model, c).unwrap(), &g, &x).unwrap().dist;
            assert!((d - base).abs() <= 1e-9 * base);
        }
    }

    #[test]
    fn widening_keeps_distortion() {
        let g = GroupSpec::<f64>::sign_flip(2);
        let x = rng::gaussian_points(5, "train-widen", 40, 2);
        let out = train(&quick(Arch::Lmf, 4, 4), &g, &x).unwrap();
        let base = evaluate(&out.model, &g, &x).unwrap().dist;
        let wide = widen(&out.model, 9, 7).unwrap();
        assert_eq!(wide.output_dim(), 7);
        assert_eq!(evaluate(&wide, &g, &x).unwrap().dist, base);
        assert!(widen(&out.model, 2, 4).is_err());
    }

    #[test]
    fn warm_start_at_sorting_bank_stays_isometric() {
        let x: Vec<Vec<f64>> = rng::gaussian_points(4, "train-warm", 40, 3);
        let model = EmbeddingModel::lmf(sorting_decoder(3), sorting_bank(3)).unwrap();
        let cfg = TrainConfig { arch: Arch::Lmf, m: 3, n: 3, steps: 50, restarts: 1, ..TrainConfig::default() };
        let out = train_from(&cfg, &model, &x).unwrap();
        assert!(out.train_report.dist <= 1.0 + 1e-3);
        assert!(train_from(&TrainConfig { arch: Arch::Mf, ..cfg }, &model, &x).is_err());
    }

    #[test]
    fn rmf_search_is_a_running_minimum() {
        let g = GroupSpec::<f64>::sign_flip(2);
        let x = rng::gaussian_points(5, "rmf-test", 80, 2);
        let mut last = f64::INFINITY;
        for n in [1, 5, 20] {
            let (bank, rep) = rmf_search(&g, 4, n, &x, 9).unwrap();
            assert!(rep.dist <= last);
            last = rep.dist;
            if n == 1 {
                let mut r = rng::stream(9, "rmf-bank", 0);
                assert_eq!(bank, FilterBank::gaussian(g.clone(), 4, &mut r));
            }
        }
        assert!(rmf_search(&g, 4, 0, &x, 9).is_err());
    }

    #[test]
    fn degenerate_training_set_is_rejected() {
        let g = GroupSpec::<f64>::sign_flip(2);
        let x = vec![vec![1.0, 2.0], vec![-1.0, -2.0]];
        assert!(matches!(train(&quick(Arch::Mf, 0, 2), &g, &x), Err(Error::DegenerateData(_))));
    }
}
