//! End-to-end runs of the `orbitmap` binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(dir: &Path, config: Option<&str>, args: &[&str]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_orbitmap"));
    cmd.current_dir(dir).arg("--out").arg(dir.join("out"));
    if let Some(text) = config {
        let path = dir.join("config.toml");
        std::fs::write(&path, text).unwrap();
        cmd.arg("--config").arg(path);
    }
    cmd.args(args).output().unwrap()
}

fn ok(out: &Output) {
    assert!(out.status.success(), "status {:?}\nstderr: {}", out.status, String::from_utf8_lossy(&out.stderr));
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn first_dist(dir: &Path) -> f64 {
    json(&dir.join("out/distortion.json"))[0]["report"]["dist"].as_f64().unwrap()
}

#[test]
fn hpoly_on_real_phase_retrieval_is_below_sqrt2() {
    let tmp = TempDir::new().unwrap();
    let out = run(
        tmp.path(),
        Some(
            r#"
            seed = 1
            [group]
            kind = "sign_flip"
            params = { dim = 3 }
            [embedding]
            model = "hpoly"
            row = { row = "outer_product", dim = 3 }
            "#,
        ),
        &["distortion"],
    );
    ok(&out);
    let d = first_dist(tmp.path());
    assert!((1.35..=1.4143).contains(&d), "{d}");
    let csv = std::fs::read_to_string(tmp.path().join("out/distortion.csv")).unwrap();
    assert!(csv.starts_with("group,model,n,alpha,beta,dist,seed\n"));
    assert!(csv.lines().nth(1).unwrap().starts_with("sign_flip(3),hpoly,6,"));
}

#[test]
fn non_homogeneous_polynomials_distort_badly() {
    let tmp = TempDir::new().unwrap();
    let out = run(
        tmp.path(),
        Some(
            r#"
            [group]
            kind = "sign_flip"
            params = { dim = 3 }
            [embedding]
            model = "poly"
            row = { row = "outer_product", dim = 3 }
            "#,
        ),
        &["distortion"],
    );
    ok(&out);
    assert!(first_dist(tmp.path()) >= 5.0);
}

#[test]
fn sorting_has_unit_distortion() {
    let tmp = TempDir::new().unwrap();
    let out = run(
        tmp.path(),
        Some(
            r#"
            test_size = 500
            [group]
            kind = "permutation"
            params = { dim = 5 }
            [embedding]
            model = "weyl_sort"
            group = { kind = "permutation", params = { dim = 5 } }
            "#,
        ),
        &["distortion"],
    );
    ok(&out);
    assert!((first_dist(tmp.path()) - 1.0).abs() <= 1e-9);
}

#[test]
fn unknown_config_keys_are_usage_errors() {
    let tmp = TempDir::new().unwrap();
    let out = run(tmp.path(), Some("seed = 1\nlerning_rate = 0.1\n"), &["distortion"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("lerning_rate"));

    let out = run(tmp.path(), None, &["table", "9"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_writes_passing_certificates() {
    let tmp = TempDir::new().unwrap();
    for check in ["fourier", "gegenbauer", "example-1-2"] {
        let out = run(tmp.path(), None, &["verify", check]);
        ok(&out);
        let cert = json(&tmp.path().join(format!("out/verify_{check}.json")));
        assert_eq!(cert["check"], check);
        assert_eq!(cert["pass"], true);
        assert!(cert["observed"].as_f64().unwrap() <= cert["bound"].as_f64().unwrap());
    }
}

#[test]
fn training_is_deterministic_under_a_fixed_seed() {
    let config = r#"
        train_size = 40
        test_size = 60
        [group]
        kind = "sign_flip"
        params = { dim = 2 }
        [train]
        arch = "lmf"
        m = 4
        n = 4
        steps = 30
        restarts = 2
    "#;
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    ok(&run(a.path(), Some(config), &["--seed", "9", "train"]));
    ok(&run(b.path(), Some(config), &["--seed", "9", "train"]));
    let read = |d: &TempDir, f: &str| std::fs::read(d.path().join("out").join(f)).unwrap();
    assert_eq!(read(&a, "model.json"), read(&b, "model.json"));
    assert_eq!(read(&a, "distortion.csv"), read(&b, "distortion.csv"));

    // The stored model evaluates to the same held-out distortion.
    let model = a.path().join("out/model.json");
    let c = TempDir::new().unwrap();
    let text = format!(
        "test_size = 60\nmodel_file = {:?}\n[group]\nkind = \"sign_flip\"\nparams = {{ dim = 2 }}\n",
        model.display().to_string()
    );
    ok(&run(c.path(), Some(&text), &["--seed", "9", "distortion"]));
    let report = json(&a.path().join("out/train_report.json"));
    assert_eq!(report["test"]["dist"].as_f64().unwrap(), first_dist(c.path()));
}

#[test]
fn shapes_pipeline_round_trip() {
    let tmp = TempDir::new().unwrap();
    let config = r#"
        [shapes]
        k = 12
        [train]
        arch = "lmf"
        m = 24
        n = 24
        steps = 40
        restarts = 1
    "#;
    ok(&run(tmp.path(), Some(config), &["shapes", "synth", "--count", "24"]));
    let synth = tmp.path().join("out/shapes.csv");
    let first = std::fs::read_to_string(&synth).unwrap();
    assert_eq!(first.lines().count(), 24);

    // Re-ingesting keeps every record and resamples to k vertices.
    std::fs::copy(&synth, tmp.path().join("input.csv")).unwrap();
    ok(&run(tmp.path(), Some(config), &["shapes", "ingest", "input.csv"]));
    let report = json(&tmp.path().join("out/ingest_report.json"));
    assert_eq!(report["accepted"], 24);
    let fields = std::fs::read_to_string(&synth).unwrap().lines().next().unwrap().split(',').count();
    assert_eq!(fields, 2 + 2 * 12);

    ok(&run(tmp.path(), Some(config), &["shapes", "embed", "input.csv"]));
    let emb = tmp.path().join("out/embeddings.csv");
    let text = std::fs::read_to_string(&emb).unwrap();
    assert!(text.starts_with("id,class,f0,"));
    assert_eq!(text.lines().count(), 25);

    ok(&run(tmp.path(), Some(config), &["shapes", "pca", "out/embeddings.csv"]));
    let pca = std::fs::read_to_string(tmp.path().join("out/pca.csv")).unwrap();
    assert!(pca.starts_with("id,class,pc1,pc2\n"));
    assert!(std::fs::read_to_string(tmp.path().join("out/pca.svg")).unwrap().contains("<circle"));
}

#[test]
fn smoke_table_writes_csv() {
    let tmp = TempDir::new().unwrap();
    let out = run(tmp.path(), Some("seed = 3\n"), &["table", "5", "--scale", "smoke"]);
    ok(&out);
    let csv = std::fs::read_to_string(tmp.path().join("out/table_5.csv")).unwrap();
    assert!(csv.starts_with("table,space,group,n,arch,out_dim,train_dist,dist,seed\n"));
    // Three dimensions, four trained architectures, RMF, Poly and HPoly.
    assert_eq!(csv.lines().count(), 1 + 3 * 7);
}
