//! Distortion tables at reduced scale.
//!
//! Every cell of a row shares one Gaussian test set. Rows of one space run
//! in increasing embedding dimension, and each LMF cell also scores the
//! previous row's best LMF model padded with zeros, keeping the better of
//! the two. That keeps the LMF column non-increasing in `n`.

use anyhow::Context as _;
use clap::ValueEnum;
use orbitmap::shapes::{synth_dataset, PolygonShape};
use orbitmap::training::{evaluate, rmf_search, train, widen};
use orbitmap::{rng, Arch, EmbeddingModel, Group, GroupSpec, Model, PolyRow, TrainConfig};
use serde::Serialize;

use super::{gaussian_set, TEST_STREAM, TRAIN_STREAM};
use crate::config::TableOverrides;
use crate::{Context, Outcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Scale {
    /// Seconds; for checking the plumbing.
    Smoke,
    /// Minutes to hours on one machine.
    Desk,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Budget {
    pub train_size: usize,
    pub test_size: usize,
    pub steps: usize,
    pub restarts: usize,
    pub rmf_draws: usize,
    pub shape_count: usize,
    /// Caps the vertex count of shape rows.
    pub max_shape_k: usize,
}

impl Budget {
    pub fn preset(scale: Scale) -> Self {
        match scale {
            Scale::Smoke => Self {
                train_size: 40,
                test_size: 60,
                steps: 20,
                restarts: 1,
                rmf_draws: 3,
                shape_count: 24,
                max_shape_k: 8,
            },
            Scale::Desk => Self {
                train_size: 500,
                test_size: 1000,
                steps: 1000,
                restarts: 3,
                rmf_draws: 200,
                shape_count: 200,
                max_shape_k: 100,
            },
        }
    }

    pub fn with(mut self, o: &TableOverrides) -> Self {
        self.train_size = o.train_size.unwrap_or(self.train_size);
        self.test_size = o.test_size.unwrap_or(self.test_size);
        self.steps = o.steps.unwrap_or(self.steps);
        self.restarts = o.restarts.unwrap_or(self.restarts);
        self.rmf_draws = o.rmf_draws.unwrap_or(self.rmf_draws);
        self.shape_count = o.shape_count.unwrap_or(self.shape_count);
        self
    }
}

/// Points of one orbit space.
enum Data {
    Gaussian,
    /// Synthetic polygons with this many vertices.
    Shapes(usize),
}

struct Space {
    label: String,
    group: Group,
    dims: Vec<usize>,
    data: Data,
}

fn space(label: &str, group: Group, dims: &[usize]) -> Space {
    Space { label: label.into(), group, dims: dims.to_vec(), data: Data::Gaussian }
}

fn shape_space(k: usize) -> Space {
    Space {
        label: format!("(R^2)^{k}/(O(2)xC_{k})"),
        group: GroupSpec::shape_group(k),
        dims: vec![2 * k],
        data: Data::Shapes(k),
    }
}

fn spaces(id: u8, budget: &Budget) -> Vec<Space> {
    match id {
        2 => vec![
            space("R^3/{+-I}", GroupSpec::sign_flip(3), &[9]),
            space("R^5/S_5", GroupSpec::permutation(5), &[15]),
            space("l2(Z_5)/C_5", GroupSpec::cyclic_shift(5), &[15]),
            space("C/C_3", GroupSpec::planar_rotation(3), &[6]),
            space("C/C_4", GroupSpec::planar_rotation(4), &[6]),
            space("C^2/S^1", GroupSpec::phase_circle(2), &[9]),
            space("(R^3)^3/O(3)", GroupSpec::orthogonal_tuple(3, 3), &[18]),
        ],
        3 => vec![space("R^2/{+-I}", GroupSpec::sign_flip(2), &[8, 16, 32, 256])],
        4 => vec![space("C^2/S^1", GroupSpec::phase_circle(2), &[8, 16, 32, 256])],
        5 => vec![space("(R^2)^2/O(2)", GroupSpec::orthogonal_tuple(2, 2), &[4, 8, 16])],
        6 => vec![shape_space(50.min(budget.max_shape_k))],
        7 => vec![shape_space(100.min(budget.max_shape_k))],
        _ => unreachable!("table id validated by the argument parser"),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Cell {
    pub table: u8,
    pub space: String,
    pub group: String,
    pub n: usize,
    pub arch: String,
    pub out_dim: usize,
    pub train_dist: Option<f64>,
    pub dist: f64,
    pub seed: u64,
}

const TRAINED: [Arch; 4] = [Arch::Mf, Arch::Lrmf, Arch::Lmf, Arch::Relu];

fn shape_vectors(shapes: &[PolygonShape]) -> Vec<Vec<f64>> {
    shapes.iter().map(PolygonShape::to_vector).collect()
}

pub fn run_table(id: u8, budget: &Budget, seed: u64) -> anyhow::Result<Vec<Cell>> {
    let mut cells = Vec::new();
    for sp in spaces(id, budget) {
        let g = &sp.group;
        let (x_train, x_test) = match sp.data {
            Data::Gaussian => (
                gaussian_set(seed, TRAIN_STREAM, budget.train_size, g.ambient_dim()),
                gaussian_set(seed, TEST_STREAM, budget.test_size, g.ambient_dim()),
            ),
            Data::Shapes(k) => {
                let all = shape_vectors(&synth_dataset(budget.shape_count, k, seed)?);
                let mut r = rng::stream(seed, "table-shape-split", id as u64);
                orbitmap::training::split(all, budget.shape_count * 3 / 4, &mut r)
            }
        };
        let mut previous_lmf: Option<Model> = None;
        for &n in &sp.dims {
            let mut push = |arch: &str, out_dim: usize, train_dist: Option<f64>, dist: f64| {
                log::info!("table {id} {} n={n} {arch}: {dist:.4}", sp.label);
                cells.push(Cell {
                    table: id,
                    space: sp.label.clone(),
                    group: g.name(),
                    n,
                    arch: arch.into(),
                    out_dim,
                    train_dist,
                    dist,
                    seed,
                });
            };
            for arch in TRAINED {
                let cfg = TrainConfig {
                    arch,
                    m: n,
                    n,
                    steps: budget.steps,
                    restarts: budget.restarts,
                    seed: rng::derive_seed(seed, &format!("table-{id}-{}-{}", sp.label, arch.label()), n as u64),
                    ..TrainConfig::default()
                };
                let out = train(&cfg, g, &x_train).with_context(|| format!("training {} on {}", arch.label(), sp.label))?;
                let mut model = out.model;
                let mut train_dist = out.train_report.dist;
                let mut dist = evaluate(&model, g, &x_test)?.dist;
                if arch == Arch::Lmf {
                    if let Some(prev) = &previous_lmf {
                        let lifted = widen(prev, n, n)?;
                        let lifted_dist = evaluate(&lifted, g, &x_test)?.dist;
                        if lifted_dist < dist {
                            train_dist = evaluate(&lifted, g, &x_train)?.dist;
                            dist = lifted_dist;
                            model = lifted;
                        }
                    }
                    previous_lmf = Some(model);
                }
                push(arch.label(), n, Some(train_dist), dist);
            }
            let rmf_seed = rng::derive_seed(seed, &format!("table-{id}-{}-rmf", sp.label), n as u64);
            let (_, rmf) = rmf_search(g, n, budget.rmf_draws, &x_test, rmf_seed)?;
            push("rmf", n, None, rmf.dist);
            if let (Data::Gaussian, Ok(row)) = (&sp.data, PolyRow::for_group(g)) {
                for model in [EmbeddingModel::Poly { row }, EmbeddingModel::HPoly { row }] {
                    let dist = evaluate(&model, g, &x_test)?.dist;
                    push(model.label(), row.output_dim(), None, dist);
                }
            }
        }
    }
    Ok(cells)
}

pub fn cells_csv(cells: &[Cell]) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["table", "space", "group", "n", "arch", "out_dim", "train_dist", "dist", "seed"])?;
    for c in cells {
        w.write_record([
            c.table.to_string(),
            c.space.clone(),
            c.group.clone(),
            c.n.to_string(),
            c.arch.clone(),
            c.out_dim.to_string(),
            c.train_dist.map(|d| d.to_string()).unwrap_or_default(),
            c.dist.to_string(),
            c.seed.to_string(),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn run(ctx: &Context, id: u8, scale: Scale) -> anyhow::Result<Outcome> {
    let budget = Budget::preset(scale).with(&ctx.cfg.table);
    if matches!(id, 6 | 7) {
        log::warn!("tables 6 and 7 use synthetic polygons in place of the external datasets");
    }
    let cells = run_table(id, &budget, ctx.seed)?;
    let csv = cells_csv(&cells)?;
    ctx.out.write(&format!("table_{id}.csv"), &csv)?;
    ctx.out.write_json(&format!("table_{id}.json"), &serde_json::json!({ "budget": budget, "cells": cells }))?;
    print!("{csv}");
    Ok(Outcome::Pass)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smoke_table_three_is_monotone_in_lmf() {
        let cells = run_table(3, &Budget::preset(Scale::Smoke), 5).unwrap();
        let lmf: Vec<f64> = cells.iter().filter(|c| c.arch == "lmf").map(|c| c.dist).collect();
        assert_eq!(lmf.len(), 4);
        assert!(lmf.windows(2).all(|w| w[1] <= w[0]), "{lmf:?}");
        assert!(cells.iter().any(|c| c.arch == "hpoly"));
    }

    #[test]
    fn smoke_shape_table() {
        let cells = run_table(6, &Budget::preset(Scale::Smoke), 5).unwrap();
        assert_eq!(cells.len(), 5);
        assert!(cells.iter().all(|c| c.dist >= 1.0 && c.n == 16));
    }
}
