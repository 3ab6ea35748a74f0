use orbitmap::training::{evaluate, train};
use orbitmap::{Report, TrainConfig};
use serde::Serialize;

use super::{distortion_csv, gaussian_set, TEST_STREAM, TRAIN_STREAM};
use crate::{Context, Outcome};

#[derive(Serialize)]
struct TrainSummary<'a> {
    group: String,
    config: &'a TrainConfig,
    train_size: usize,
    test_size: usize,
    train: &'a Report,
    test: &'a Report,
    restart_dists: &'a [f64],
    best_restart: usize,
}

pub fn run(ctx: &Context) -> anyhow::Result<Outcome> {
    let cfg = &ctx.cfg;
    let g = cfg.group()?;
    let tcfg = cfg.train_config()?;
    let d = g.ambient_dim();
    let x_train = gaussian_set(ctx.seed, TRAIN_STREAM, cfg.train_size, d);
    let x_test = gaussian_set(ctx.seed, TEST_STREAM, cfg.test_size, d);

    let outcome = train(&tcfg, g, &x_train)?;
    let test = evaluate(&outcome.model, g, &x_test)?;
    log::info!("train dist {:.4}, test dist {:.4}", outcome.train_report.dist, test.dist);

    ctx.out.write_json("model.json", &outcome.model)?;
    ctx.out.write_json(
        "train_report.json",
        &TrainSummary {
            group: g.name(),
            config: &tcfg,
            train_size: cfg.train_size,
            test_size: cfg.test_size,
            train: &outcome.train_report,
            test: &test,
            restart_dists: &outcome.restart_dists,
            best_restart: outcome.best_restart,
        },
    )?;
    let csv = distortion_csv(&[(g.name(), tcfg.arch.label().to_string(), tcfg.n, test)], ctx.seed);
    ctx.out.write("distortion.csv", &csv)?;
    print!("{csv}");
    Ok(Outcome::Pass)
}
