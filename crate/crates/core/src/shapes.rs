//! Planar polygons as points of `(R^2)^k / (O(2) x C_k)`: ingestion,
//! arclength resampling, embedding, PCA and export.
//!
//! A shape with `k` vertices is the vector `(x_0, y_0, x_1, y_1, ...)`,
//! matching [`GroupSpec::shape_group`].

use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::embeddings::Embedding;
use crate::error::{Error, Result};
use crate::groups::GroupSpec;
use crate::linalg::{self, Matrix};
use crate::rng;

/// Tolerance on `sum v_i = 0` after centering.
pub const CENTERING_TOL: f64 = 1e-9;

/// Boundary vertices, not necessarily centered or equally spaced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawPolygon {
    pub id: String,
    pub class_label: Option<String>,
    pub vertices: Vec<[f64; 2]>,
}

/// `k` boundary points equally spaced by arclength, centroid at the origin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolygonShape {
    pub id: String,
    pub class_label: Option<String>,
    pub vertices: Vec<[f64; 2]>,
}

impl PolygonShape {
    pub fn k(&self) -> usize {
        self.vertices.len()
    }

    /// Interleaved coordinates `(x_0, y_0, x_1, y_1, ...)`.
    pub fn to_vector(&self) -> Vec<f64> {
        self.vertices.iter().flatten().copied().collect()
    }

    pub fn from_vector(id: impl Into<String>, class_label: Option<String>, v: &[f64]) -> Result<Self> {
        if v.len() % 2 != 0 {
            return Err(Error::ShapeMismatch(format!("odd coordinate count {}", v.len())));
        }
        Ok(Self {
            id: id.into(),
            class_label,
            vertices: v.chunks_exact(2).map(|c| [c[0], c[1]]).collect(),
        })
    }

    /// Scales to unit Euclidean norm as a vector in `R^{2k}`.
    pub fn normalized(&self) -> Self {
        let n = linalg::norm(&self.to_vector());
        let s = if n > 0.0 { 1.0 / n } else { 0.0 };
        Self { vertices: self.vertices.iter().map(|v| [v[0] * s, v[1] * s]).collect(), ..self.clone() }
    }
}

/// Whether shapes keep their input scale.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleMode {
    #[default]
    Raw,
    UnitNorm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    Csv,
    GeoJson,
}

impl FromStr for InputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "geojson" | "json" => Ok(Self::GeoJson),
            other => Err(Error::Parse(format!("unknown shape format {other:?}"))),
        }
    }
}

impl InputFormat {
    /// Guesses the format from a file extension.
    pub fn from_path(path: &Path) -> Option<Self> {
        path.extension()?.to_str()?.parse().ok()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Rejection {
    pub id: String,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct IngestReport {
    pub polygons: Vec<RawPolygon>,
    pub rejected: Vec<Rejection>,
    pub warnings: Vec<String>,
}

pub fn ingest(path: &Path, format: InputFormat) -> Result<IngestReport> {
    ingest_str(&std::fs::read_to_string(path)?, format)
}

pub fn ingest_str(text: &str, format: InputFormat) -> Result<IngestReport> {
    let report = match format {
        InputFormat::Csv => ingest_csv(text)?,
        InputFormat::GeoJson => ingest_geojson(text)?,
    };
    if report.polygons.is_empty() && report.rejected.is_empty() {
        return Err(Error::Parse("no polygons found".into()));
    }
    Ok(report)
}

/// Drops a repeated closing vertex and checks the loop is usable.
fn close_loop(id: &str, mut vertices: Vec<[f64; 2]>) -> Result<Vec<[f64; 2]>> {
    if vertices.len() > 1 && vertices.first() == vertices.last() {
        vertices.pop();
    }
    if vertices.len() < 3 {
        return Err(Error::Parse(format!("polygon {id:?} has {} vertices, need at least 3", vertices.len())));
    }
    if vertices.iter().flatten().any(|c| !c.is_finite()) {
        return Err(Error::Parse(format!("polygon {id:?} has non-finite coordinates")));
    }
    if perimeter(&vertices) <= 0.0 {
        return Err(Error::DegenerateData(format!("polygon {id:?} has zero perimeter")));
    }
    Ok(vertices)
}

/// Rows `id,class,x0,y0,x1,y1,...`; a header row is skipped when its third
/// field is not numeric. An empty class field means no label.
fn ingest_csv(text: &str) -> Result<IngestReport> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).flexible(true).trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut report = IngestReport::default();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse(e.to_string()))?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        if line == 0 && record.get(2).is_some_and(|f| f.parse::<f64>().is_err()) {
            continue;
        }
        let id = record.get(0).unwrap_or_default().to_string();
        let class_label = record.get(1).filter(|c| !c.is_empty()).map(str::to_string);
        let coords = record
            .iter()
            .skip(2)
            .filter(|f| !f.is_empty())
            .map(|f| f.parse::<f64>().map_err(|_| Error::Parse(format!("row {}: bad coordinate {f:?}", line + 1))))
            .collect::<Result<Vec<f64>>>()?;
        if coords.len() % 2 != 0 {
            return Err(Error::Parse(format!("row {}: odd number of coordinates", line + 1)));
        }
        let vertices = close_loop(&id, coords.chunks_exact(2).map(|c| [c[0], c[1]]).collect())?;
        report.polygons.push(RawPolygon { id, class_label, vertices });
    }
    Ok(report)
}

fn ring(v: &Value) -> Option<Vec<[f64; 2]>> {
    v.as_array()?
        .iter()
        .map(|p| {
            let p = p.as_array()?;
            Some([p.first()?.as_f64()?, p.get(1)?.as_f64()?])
        })
        .collect()
}

/// FeatureCollection of Polygon features; outer rings only. Multi-part
/// geometries are rejected.
fn ingest_geojson(text: &str) -> Result<IngestReport> {
    let doc: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let features = doc
        .get("features")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("expected a FeatureCollection with a features array".into()))?;
    let mut report = IngestReport::default();
    for (i, f) in features.iter().enumerate() {
        let props = f.get("properties");
        let prop = |k: &str| props.and_then(|p| p.get(k)).and_then(json_label);
        let id = f.get("id").and_then(json_label).or_else(|| prop("id")).or_else(|| prop("name")).unwrap_or_else(|| i.to_string());
        let class_label = prop("class");
        let geometry = f.get("geometry").ok_or_else(|| Error::Parse(format!("feature {id:?} has no geometry")))?;
        let coords = geometry.get("coordinates");
        let rings = match geometry.get("type").and_then(Value::as_str) {
            Some("Polygon") => coords.and_then(Value::as_array).cloned(),
            Some("MultiPolygon") => {
                let parts = coords.and_then(Value::as_array).cloned().unwrap_or_default();
                if parts.len() != 1 {
                    report.rejected.push(Rejection { id, reason: format!("disconnected: {} parts", parts.len()) });
                    continue;
                }
                parts[0].as_array().cloned()
            }
            other => {
                report.rejected.push(Rejection { id, reason: format!("unsupported geometry {other:?}") });
                continue;
            }
        };
        let rings = rings.ok_or_else(|| Error::Parse(format!("feature {id:?} has malformed coordinates")))?;
        let outer = rings
            .first()
            .and_then(ring)
            .ok_or_else(|| Error::Parse(format!("feature {id:?} has malformed coordinates")))?;
        if rings.len() > 1 {
            let msg = format!("feature {id:?}: ignored {} hole(s)", rings.len() - 1);
            log::warn!("{msg}");
            report.warnings.push(msg);
        }
        let vertices = close_loop(&id, outer)?;
        report.polygons.push(RawPolygon { id, class_label, vertices });
    }
    Ok(report)
}

fn json_label(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

fn perimeter(v: &[[f64; 2]]) -> f64 {
    (0..v.len()).map(|i| edge_len(v[i], v[(i + 1) % v.len()])).sum()
}

fn edge_len(a: [f64; 2], b: [f64; 2]) -> f64 {
    (b[0] - a[0]).hypot(b[1] - a[1])
}

/// `k` points at arclength `j L / k` along the closed boundary, starting at
/// the first vertex, then centered.
///
/// Only equilateral `k`-gons are fixed points: in general the chords of the
/// output have unequal lengths, so resampling twice moves the points.
pub fn resample(p: &RawPolygon, k: usize) -> Result<PolygonShape> {
    if k == 0 {
        return Err(Error::InvalidArgument("sample count must be positive".into()));
    }
    let v = &p.vertices;
    let total = perimeter(v);
    if !(total > 0.0) {
        return Err(Error::DegenerateData(format!("polygon {:?} has zero perimeter", p.id)));
    }
    let mut out = Vec::with_capacity(k);
    let (mut edge, mut start) = (0, 0.0);
    for j in 0..k {
        let s = total * j as f64 / k as f64;
        let mut len = edge_len(v[edge], v[(edge + 1) % v.len()]);
        while start + len < s && edge + 1 < v.len() {
            start += len;
            edge += 1;
            len = edge_len(v[edge], v[(edge + 1) % v.len()]);
        }
        let (a, b) = (v[edge], v[(edge + 1) % v.len()]);
        let t = if len > 0.0 { ((s - start) / len).clamp(0.0, 1.0) } else { 0.0 };
        out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
    }
    let n = k as f64;
    let c = out.iter().fold([0.0, 0.0], |acc, q| [acc[0] + q[0] / n, acc[1] + q[1] / n]);
    for q in &mut out {
        q[0] -= c[0];
        q[1] -= c[1];
    }
    Ok(PolygonShape { id: p.id.clone(), class_label: p.class_label.clone(), vertices: out })
}

/// One embedding row per shape.
pub fn shape_embed<E: Embedding<f64> + ?Sized>(model: &E, shapes: &[PolygonShape]) -> Result<Matrix<f64>> {
    for s in shapes {
        if 2 * s.k() != model.input_dim() {
            return Err(Error::ShapeMismatch(format!(
                "shape {:?} has {} vertices but the model expects {}",
                s.id,
                s.k(),
                model.input_dim() / 2
            )));
        }
    }
    let xs: Vec<Vec<f64>> = shapes.iter().map(PolygonShape::to_vector).collect();
    let rows = model.embed_all(&xs)?;
    if rows.is_empty() {
        return Ok(Matrix::zeros(0, model.output_dim()));
    }
    Matrix::from_rows(&rows)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Pca {
    /// `N x dims` scores.
    pub projected: Matrix<f64>,
    /// Eigenvalues of the covariance for the kept components.
    pub variances: Vec<f64>,
    /// Kept variances over the total variance.
    pub explained_variance_ratio: Vec<f64>,
    /// Components as rows, `dims x n`.
    pub components: Matrix<f64>,
    /// Numerical rank of the centered data; components past it are zero.
    pub rank: usize,
}

/// Projects centered rows onto the leading covariance eigenvectors. Each
/// component is signed so its largest-magnitude loading is positive.
pub fn pca_project(x: &Matrix<f64>, dims: usize) -> Result<Pca> {
    let (n, d) = (x.rows(), x.cols());
    if n < dims.max(2) {
        return Err(Error::DegenerateData(format!("PCA onto {dims} dims needs at least {} rows, got {n}", dims.max(2))));
    }
    let mean: Vec<f64> = (0..d).map(|j| (0..n).map(|i| x[(i, j)]).sum::<f64>() / n as f64).collect();
    let centered = Matrix::from_fn(n, d, |i, j| x[(i, j)] - mean[j]);
    let cov = Matrix::from_fn(d, d, |a, b| (0..n).map(|i| centered[(i, a)] * centered[(i, b)]).sum::<f64>() / (n - 1) as f64);
    let (vals, vecs) = linalg::symmetric_eigen(&cov);
    let total: f64 = vals.iter().map(|v| v.max(0.0)).sum();
    let cutoff = 1e-12 * vals.first().copied().unwrap_or(0.0).max(f64::MIN_POSITIVE);
    let rank = vals.iter().filter(|&&v| v > cutoff).count();
    if rank < dims {
        log::warn!("data has rank {rank} < {dims}; trailing components are zero");
    }
    let mut components = Matrix::zeros(dims, d);
    let mut variances = vec![0.0; dims];
    for c in 0..dims.min(rank) {
        let mut v: Vec<f64> = (0..d).map(|j| vecs[(j, c)]).collect();
        let lead = v.iter().copied().fold(0.0f64, |a, b| if b.abs() > a.abs() { b } else { a });
        if lead < 0.0 {
            v.iter_mut().for_each(|e| *e = -*e);
        }
        components.row_mut(c).copy_from_slice(&v);
        variances[c] = vals[c];
    }
    let projected = Matrix::from_fn(n, dims, |i, c| linalg::dot(centered.row(i), components.row(c)));
    let explained_variance_ratio = variances.iter().map(|v| if total > 0.0 { v / total } else { 0.0 }).collect();
    Ok(Pca { projected, variances, explained_variance_ratio, components, rank })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeFamily {
    Ellipse,
    Star,
    Blob,
}

impl ShapeFamily {
    pub const ALL: [ShapeFamily; 3] = [Self::Ellipse, Self::Star, Self::Blob];

    pub fn label(self) -> &'static str {
        match self {
            Self::Ellipse => "ellipse",
            Self::Star => "star",
            Self::Blob => "blob",
        }
    }
}

impl FromStr for ShapeFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.label() == s)
            .ok_or_else(|| Error::Parse(format!("unknown shape family {s:?}")))
    }
}

/// Fine boundary vertices per output point of the synthetic generators.
const SYNTH_OVERSAMPLE: usize = 8;

/// Closed curve `t -> r(t) (cos t, sin t)` through a fine polygon.
fn polar_curve(id: String, label: &str, k: usize, rotation: f64, scale: f64, r: impl Fn(f64) -> f64) -> Result<PolygonShape> {
    let m = k * SYNTH_OVERSAMPLE;
    let vertices = (0..m)
        .map(|i| {
            let t = TAU * i as f64 / m as f64;
            let (s, c) = (t + rotation).sin_cos();
            [scale * r(t) * c, scale * r(t) * s]
        })
        .collect();
    resample(&RawPolygon { id, class_label: Some(label.into()), vertices }, k)
}

/// Ellipse with semi-axes `a`, `b`.
pub fn ellipse(a: f64, b: f64, k: usize) -> Result<PolygonShape> {
    let m = k * SYNTH_OVERSAMPLE;
    let vertices = (0..m)
        .map(|i| {
            let t = TAU * i as f64 / m as f64;
            [a * t.cos(), b * t.sin()]
        })
        .collect();
    resample(&RawPolygon { id: "ellipse".into(), class_label: Some("ellipse".into()), vertices }, k)
}

/// Star with `arms` points: radius `1 + amplitude cos(arms t)`.
pub fn star(arms: usize, amplitude: f64, k: usize) -> Result<PolygonShape> {
    polar_curve("star".into(), "star", k, 0.0, 1.0, |t| 1.0 + amplitude * (arms as f64 * t).cos())
}

/// Deterministic shapes of one family with randomized eccentricity,
/// convexity, scale, orientation and starting point.
pub fn synth_shapes(family: ShapeFamily, count: usize, k: usize, seed: u64) -> Result<Vec<PolygonShape>> {
    (0..count)
        .map(|i| {
            let mut r = rng::stream(seed, family.label(), i as u64);
            let id = format!("{}-{i}", family.label());
            let rotation = r.random_range(0.0..TAU);
            let scale = r.random_range(0.6..1.6);
            let mut shape = match family {
                ShapeFamily::Ellipse => {
                    let ratio = r.random_range(0.25..1.0);
                    polar_curve(id, family.label(), k, rotation, scale, move |t| {
                        ratio / ((ratio * t.cos()).powi(2) + t.sin().powi(2)).sqrt()
                    })?
                }
                ShapeFamily::Star => {
                    let arms = r.random_range(3..=7) as f64;
                    let amp = r.random_range(0.15..0.5);
                    polar_curve(id, family.label(), k, rotation, scale, move |t| 1.0 + amp * (arms * t).cos())?
                }
                ShapeFamily::Blob => {
                    let terms: Vec<(f64, f64)> = (2..=4)
                        .map(|_| (r.random_range(0.0..0.18), r.random_range(0.0..TAU)))
                        .collect();
                    polar_curve(id, family.label(), k, rotation, scale, move |t| {
                        1.0 + terms.iter().enumerate().map(|(j, (a, ph))| a * ((j + 2) as f64 * t + ph).cos()).sum::<f64>()
                    })?
                }
            };
            let shift = r.random_range(0..k);
            shape.vertices.rotate_left(shift);
            Ok(shape)
        })
        .collect()
}

/// `count` shapes cycling through the three families.
pub fn synth_dataset(count: usize, k: usize, seed: u64) -> Result<Vec<PolygonShape>> {
    let per = count.div_ceil(3);
    let mut pools: Vec<std::vec::IntoIter<PolygonShape>> = ShapeFamily::ALL
        .iter()
        .map(|&f| synth_shapes(f, per, k, seed).map(Vec::into_iter))
        .collect::<Result<_>>()?;
    Ok((0..count).filter_map(|i| pools[i % 3].next()).collect())
}

/// The group acting on `k`-vertex shapes.
pub fn shape_group(k: usize) -> GroupSpec<f64> {
    GroupSpec::shape_group(k)
}

fn csv_string(write: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    write(&mut w).map_err(|e| Error::Parse(e.to_string()))?;
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

/// `id,class,x0,y0,...`, readable by [`ingest_str`].
pub fn shapes_csv(shapes: &[PolygonShape]) -> Result<String> {
    csv_string(|w| {
        for s in shapes {
            let mut rec = vec![s.id.clone(), s.class_label.clone().unwrap_or_default()];
            rec.extend(s.to_vector().iter().map(f64::to_string));
            w.write_record(&rec)?;
        }
        Ok(())
    })
}

/// `id,class,f0,f1,...`
pub fn embeddings_csv(shapes: &[PolygonShape], rows: &Matrix<f64>) -> Result<String> {
    csv_string(|w| {
        let mut header = vec!["id".to_string(), "class".to_string()];
        header.extend((0..rows.cols()).map(|j| format!("f{j}")));
        w.write_record(&header)?;
        for (s, row) in shapes.iter().zip(rows.row_iter()) {
            let mut rec = vec![s.id.clone(), s.class_label.clone().unwrap_or_default()];
            rec.extend(row.iter().map(f64::to_string));
            w.write_record(&rec)?;
        }
        Ok(())
    })
}

/// `id,class,pc1,pc2`
pub fn pca_csv(shapes: &[PolygonShape], pca: &Pca) -> Result<String> {
    csv_string(|w| {
        let mut header = vec!["id".to_string(), "class".to_string()];
        header.extend((1..=pca.projected.cols()).map(|j| format!("pc{j}")));
        w.write_record(&header)?;
        for (s, row) in shapes.iter().zip(pca.projected.row_iter()) {
            let mut rec = vec![s.id.clone(), s.class_label.clone().unwrap_or_default()];
            rec.extend(row.iter().map(f64::to_string));
            w.write_record(&rec)?;
        }
        Ok(())
    })
}

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

fn escape_xml(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Static scatter of the first two PCA scores, one color per class.
pub fn pca_svg(shapes: &[PolygonShape], pca: &Pca) -> String {
    const SIZE: f64 = 480.0;
    const MARGIN: f64 = 40.0;
    let pts: Vec<(f64, f64)> = pca
        .projected
        .row_iter()
        .map(|r| (r.first().copied().unwrap_or(0.0), r.get(1).copied().unwrap_or(0.0)))
        .collect();
    let span = |f: fn(&(f64, f64)) -> f64| {
        let lo = pts.iter().map(f).fold(f64::INFINITY, f64::min);
        let hi = pts.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
        if lo.is_finite() && hi > lo { (lo, hi) } else { (lo.min(0.0) - 1.0, hi.max(0.0) + 1.0) }
    };
    let ((x0, x1), (y0, y1)) = (span(|p| p.0), span(|p| p.1));
    let inner = SIZE - 2.0 * MARGIN;
    let mut classes: Vec<String> = Vec::new();
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{inner}" height="{inner}" fill="none" stroke="gray"/>"#
    );
    for (s, &(px, py)) in shapes.iter().zip(&pts) {
        let class = s.class_label.clone().unwrap_or_default();
        let idx = classes.iter().position(|c| *c == class).unwrap_or_else(|| {
            classes.push(class.clone());
            classes.len() - 1
        });
        let cx = MARGIN + (px - x0) / (x1 - x0) * inner;
        let cy = SIZE - MARGIN - (py - y0) / (y1 - y0) * inner;
        let _ = writeln!(
            svg,
            r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="3" fill="{}"><title>{}</title></circle>"#,
            PALETTE[idx % PALETTE.len()],
            escape_xml(&s.id)
        );
    }
    for (i, c) in classes.iter().enumerate() {
        let y = MARGIN + 14.0 * i as f64 + 12.0;
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{y}" font-family="sans-serif" font-size="11" fill="{}">{}</text>"#,
            MARGIN + 6.0,
            PALETTE[i % PALETTE.len()],
            escape_xml(if c.is_empty() { "(none)" } else { c })
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">pc1</text>"#,
        SIZE / 2.0,
        SIZE - 12.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="14" y="{}" font-family="sans-serif" font-size="12" transform="rotate(-90 14 {})" text-anchor="middle">pc2</text>"#,
        SIZE / 2.0,
        SIZE / 2.0
    );
    svg.push_str("</svg>\n");
    svg
}
