use anyhow::{bail, Context as _};
use orbitmap::training::rmf_search;
use orbitmap::{Embedding, Model, Report};
use serde::Serialize;

use super::{distortion_csv, gaussian_set, TEST_STREAM};
use crate::{Context, Outcome};

#[derive(Serialize)]
struct Entry<'a> {
    group: String,
    model: &'a str,
    n: usize,
    seed: u64,
    test_size: usize,
    report: &'a Report,
}

pub fn run(ctx: &Context) -> anyhow::Result<Outcome> {
    let cfg = &ctx.cfg;
    let g = cfg.group()?;
    let d = g.ambient_dim();
    let test = gaussian_set(ctx.seed, TEST_STREAM, cfg.test_size, d);

    let mut models: Vec<(String, Model)> = Vec::new();
    if let Some(m) = &cfg.embedding {
        models.push((m.label().to_string(), m.clone()));
    }
    if let Some(p) = &cfg.model_file {
        let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        let m: Model = serde_json::from_str(&text).with_context(|| format!("parsing model {}", p.display()))?;
        models.push((m.label().to_string(), m));
    }
    let mut rows = Vec::new();
    for (label, m) in &models {
        if m.input_dim() != d {
            bail!("model {label} takes inputs of dimension {}, but the group acts on R^{d}", m.input_dim());
        }
        let report = orbitmap::training::evaluate(m, g, &test)?;
        rows.push((g.name(), label.clone(), m.output_dim(), report));
    }
    if let Some(r) = cfg.rmf {
        let (_, report) = rmf_search(g, r.m, r.draws, &test, ctx.seed)?;
        rows.push((g.name(), "rmf".to_string(), r.m, report));
    }
    if rows.is_empty() {
        bail!("nothing to evaluate: set [embedding], model_file or [rmf]");
    }

    let entries: Vec<Entry> = rows
        .iter()
        .map(|(group, model, n, report)| Entry {
            group: group.clone(),
            model,
            n: *n,
            seed: ctx.seed,
            test_size: cfg.test_size,
            report,
        })
        .collect();
    let csv = distortion_csv(&rows, ctx.seed);
    ctx.out.write_json("distortion.json", &entries)?;
    ctx.out.write("distortion.csv", &csv)?;
    print!("{csv}");
    Ok(Outcome::Pass)
}
