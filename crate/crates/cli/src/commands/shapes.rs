use std::path::Path;

use anyhow::{bail, Context as _};
use orbitmap::shapes::{
    embeddings_csv, ingest, pca_csv, pca_project, pca_svg, resample, shape_embed, shape_group, shapes_csv,
    synth_dataset, synth_shapes, InputFormat, PolygonShape, RawPolygon, ScaleMode,
};
use orbitmap::training::{evaluate, split, train};
use orbitmap::{rng, Arch, Mat, Model, TrainConfig};
use serde_json::json;

use crate::{Context, Outcome, ShapesCommand};

fn format_for(ctx: &Context, path: &Path, flag: Option<InputFormat>) -> anyhow::Result<InputFormat> {
    flag.or(ctx.cfg.shapes.format)
        .or_else(|| InputFormat::from_path(path))
        .with_context(|| format!("cannot tell the format of {}; pass --format", path.display()))
}

fn scaled(shape: PolygonShape, mode: ScaleMode) -> PolygonShape {
    match mode {
        ScaleMode::Raw => shape,
        ScaleMode::UnitNorm => shape.normalized(),
    }
}

/// Polygons that already have `k` vertices are only recentered, so a file
/// written by `ingest` or `synth` reads back unchanged.
fn to_shape(p: &RawPolygon, k: usize) -> orbitmap::Result<PolygonShape> {
    if p.vertices.len() != k {
        return resample(p, k);
    }
    let n = k as f64;
    let c = p.vertices.iter().fold([0.0, 0.0], |a, v| [a[0] + v[0] / n, a[1] + v[1] / n]);
    Ok(PolygonShape {
        id: p.id.clone(),
        class_label: p.class_label.clone(),
        vertices: p.vertices.iter().map(|v| [v[0] - c[0], v[1] - c[1]]).collect(),
    })
}

fn load_shapes(ctx: &Context, path: &Path, flag: Option<InputFormat>) -> anyhow::Result<Vec<PolygonShape>> {
    let fmt = format_for(ctx, path, flag)?;
    let report = ingest(path, fmt).with_context(|| format!("reading {}", path.display()))?;
    for r in &report.rejected {
        log::warn!("skipped polygon {:?}: {}", r.id, r.reason);
    }
    let k = ctx.cfg.shapes.k;
    let shapes = report
        .polygons
        .iter()
        .map(|p| to_shape(p, k).map(|s| scaled(s, ctx.cfg.shapes.scale)))
        .collect::<orbitmap::Result<Vec<_>>>()?;
    if shapes.is_empty() {
        bail!("no usable polygons in {}", path.display());
    }
    Ok(shapes)
}

fn ingest_cmd(ctx: &Context, input: &Path, flag: Option<InputFormat>) -> anyhow::Result<Outcome> {
    let fmt = format_for(ctx, input, flag)?;
    let report = ingest(input, fmt).with_context(|| format!("reading {}", input.display()))?;
    let k = ctx.cfg.shapes.k;
    let mut shapes = Vec::new();
    let mut rejected = report.rejected.clone();
    for p in &report.polygons {
        match resample(p, k) {
            Ok(s) => shapes.push(scaled(s, ctx.cfg.shapes.scale)),
            Err(e) => rejected.push(orbitmap::shapes::Rejection { id: p.id.clone(), reason: e.to_string() }),
        }
    }
    for w in &report.warnings {
        log::warn!("{w}");
    }
    ctx.out.write("shapes.csv", &shapes_csv(&shapes)?)?;
    ctx.out.write_json(
        "ingest_report.json",
        &json!({
            "input": input,
            "k": k,
            "scale": ctx.cfg.shapes.scale,
            "accepted": shapes.len(),
            "rejected": rejected,
            "warnings": report.warnings,
        }),
    )?;
    println!("{} shapes accepted, {} rejected", shapes.len(), rejected.len());
    Ok(Outcome::Pass)
}

fn synth_cmd(ctx: &Context, count: usize, family: Option<orbitmap::shapes::ShapeFamily>) -> anyhow::Result<Outcome> {
    let k = ctx.cfg.shapes.k;
    let shapes = match family {
        Some(f) => synth_shapes(f, count, k, ctx.seed)?,
        None => synth_dataset(count, k, ctx.seed)?,
    };
    let shapes: Vec<_> = shapes.into_iter().map(|s| scaled(s, ctx.cfg.shapes.scale)).collect();
    ctx.out.write("shapes.csv", &shapes_csv(&shapes)?)?;
    println!("{} shapes with k = {k}", shapes.len());
    Ok(Outcome::Pass)
}

/// Default when no `[train]` section is given: LMF with `m = n = 2k`.
fn default_train(k: usize, seed: u64) -> TrainConfig {
    TrainConfig { arch: Arch::Lmf, m: 2 * k, n: 2 * k, steps: 1000, restarts: 1, seed, ..TrainConfig::default() }
}

fn embed_cmd(ctx: &Context, input: &Path) -> anyhow::Result<Outcome> {
    let shapes = load_shapes(ctx, input, None)?;
    let k = ctx.cfg.shapes.k;
    let g = shape_group(k);
    let mut report = json!({ "k": k, "shapes": shapes.len(), "group": g.name() });
    let model: Model = match &ctx.cfg.model_file {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing model {}", p.display()))?
        }
        None => {
            let tcfg = match &ctx.cfg.train {
                Some(_) => ctx.cfg.train_config()?,
                None => default_train(k, ctx.seed),
            };
            let xs: Vec<Vec<f64>> = shapes.iter().map(PolygonShape::to_vector).collect();
            let n_train = ((xs.len() as f64) * ctx.cfg.shapes.train_fraction).round() as usize;
            if n_train < 2 || xs.len() - n_train < 2 {
                bail!("need at least two training and two held-out shapes, have {}", xs.len());
            }
            let mut r = rng::stream(ctx.seed, "shape-split", 0);
            let (x_train, x_test) = split(xs, n_train, &mut r);
            let out = train(&tcfg, &g, &x_train)?;
            let test = evaluate(&out.model, &g, &x_test)?;
            log::info!("shape model: train {:.4}, held-out {:.4}", out.train_report.dist, test.dist);
            report["train_config"] = json!(tcfg);
            report["train"] = json!(out.train_report);
            report["test"] = json!(test);
            out.model
        }
    };
    let rows = shape_embed(&model, &shapes)?;
    ctx.out.write_json("model.json", &model)?;
    ctx.out.write("embeddings.csv", &embeddings_csv(&shapes, &rows)?)?;
    ctx.out.write_json("embed_report.json", &report)?;
    println!("{} embeddings of dimension {}", rows.rows(), rows.cols());
    Ok(Outcome::Pass)
}

/// Reads `id,class,f0,...` as written by `embed`.
fn read_embeddings(path: &Path) -> anyhow::Result<(Vec<PolygonShape>, Mat)> {
    let mut rd = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let mut labels = Vec::new();
    let mut rows = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec?;
        if rec.len() < 3 {
            bail!("row {} of {} has no feature columns", i + 1, path.display());
        }
        let row = rec
            .iter()
            .skip(2)
            .map(|f| f.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .with_context(|| format!("row {} of {}", i + 1, path.display()))?;
        let class = Some(rec[1].to_string()).filter(|c| !c.is_empty());
        labels.push(PolygonShape { id: rec[0].to_string(), class_label: class, vertices: Vec::new() });
        rows.push(row);
    }
    if rows.is_empty() {
        bail!("{} has no rows", path.display());
    }
    Ok((labels, Mat::from_rows(&rows)?))
}

fn pca_cmd(ctx: &Context, input: &Path, dims: usize) -> anyhow::Result<Outcome> {
    if dims == 0 {
        bail!("--dims must be positive");
    }
    let (labels, x) = read_embeddings(input)?;
    let pca = pca_project(&x, dims)?;
    ctx.out.write("pca.csv", &pca_csv(&labels, &pca)?)?;
    ctx.out.write("pca.svg", &pca_svg(&labels, &pca))?;
    ctx.out.write_json(
        "pca.json",
        &json!({
            "dims": dims,
            "rank": pca.rank,
            "variances": pca.variances,
            "explained_variance_ratio": pca.explained_variance_ratio,
        }),
    )?;
    println!("explained variance ratio {:?}", pca.explained_variance_ratio);
    Ok(Outcome::Pass)
}

pub fn run(ctx: &Context, command: ShapesCommand) -> anyhow::Result<Outcome> {
    match command {
        ShapesCommand::Ingest { input, format } => ingest_cmd(ctx, &input, format),
        ShapesCommand::Synth { count, family } => synth_cmd(ctx, count, family),
        ShapesCommand::Embed { input } => embed_cmd(ctx, &input),
        ShapesCommand::Pca { input, dims } => pca_cmd(ctx, &input, dims),
    }
}
