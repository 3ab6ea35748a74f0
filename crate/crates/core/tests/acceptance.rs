//! Acceptance gate: one PASS/FAIL line per criterion, then a non-zero exit
//! if any criterion failed. Every run uses the same fixed seed.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use orbitmap::distortion::{empirical_distortion, weyl_check};
use orbitmap::embeddings::{optimal_psd, weyl_sort, FnEmbedding};
use orbitmap::filters::{lmf_apply, sorting_bank, sorting_decoder};
use orbitmap::harmonic::fourier::kernel_fourier_quadrature;
use orbitmap::harmonic::gegenbauer::{reduced_by_quadrature, sphere_area, GegenbauerTable};
use orbitmap::harmonic::phase::{pr_coefficient_q, reproducing_check, HomogeneousPolynomial};
use orbitmap::harmonic::riemann::{loglog_slope, psd_invariants, riemann_rate};
use orbitmap::harmonic::{deconvolve, kernel_fourier, verify_integral_identity};
use orbitmap::linalg::dist;
use orbitmap::metrics::quotient_dist_enumerated;
use orbitmap::quadrature::GaussLegendre;
use orbitmap::shapes::{shape_group, synth_dataset, PolygonShape};
use orbitmap::training::{evaluate, rmf_search, split, train};
use orbitmap::{quotient_dist, rng, Arch, Bank, Embedding, Group, TrainConfig};

const SEED: u64 = 20261016;
const TEST_SIZE: usize = 2000;

struct Outcome {
    pass: bool,
    detail: String,
}

fn num(v: f64) -> String {
    if v != 0.0 && v.abs() < 1e-3 {
        format!("{v:.3e}")
    } else {
        format!("{v:.4}")
    }
}

fn bound_str(b: f64) -> String {
    if b != 0.0 && b.abs() < 1e-3 {
        format!("{b:e}")
    } else {
        format!("{b}")
    }
}

fn at_most(observed: f64, bound: f64) -> Outcome {
    Outcome { pass: observed <= bound, detail: format!("observed {} <= {}", num(observed), bound_str(bound)) }
}

fn within(observed: f64, lo: f64, hi: f64) -> Outcome {
    Outcome { pass: (lo..=hi).contains(&observed), detail: format!("observed {observed:.4} in [{lo}, {hi}]") }
}

fn all(parts: Vec<Outcome>) -> Outcome {
    Outcome {
        pass: parts.iter().all(|p| p.pass),
        detail: parts.iter().map(|p| p.detail.as_str()).collect::<Vec<_>>().join("; "),
    }
}

fn test_set(dim: usize) -> Vec<Vec<f64>> {
    rng::gaussian_points(SEED, "acceptance-test", TEST_SIZE, dim)
}

fn train_set(count: usize, dim: usize) -> Vec<Vec<f64>> {
    rng::gaussian_points(SEED, "acceptance-train", count, dim)
}

fn c01_metric_oracle() -> Outcome {
    let mut worst = 0.0f64;
    for d in 1..=6 {
        for g in [Group::sign_flip(d), Group::permutation(d)] {
            let mut r = rng::stream(SEED, &format!("c01-{}", g.name()), 0);
            for _ in 0..500 {
                let x: Vec<f64> = rng::gaussian_vec(&mut r, d);
                let y: Vec<f64> = rng::gaussian_vec(&mut r, d);
                let gap = quotient_dist(&g, &x, &y).unwrap() - quotient_dist_enumerated(&g, &x, &y).unwrap();
                worst = worst.max(gap.abs());
            }
        }
    }
    at_most(worst, 1e-12)
}

fn c02_weyl_sort_isometry() -> Outcome {
    let g = Group::permutation(5);
    let mut r = rng::stream(SEED, "c02", 0);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let x: Vec<f64> = rng::gaussian_vec(&mut r, 5);
        let y: Vec<f64> = rng::gaussian_vec(&mut r, 5);
        let embedded = dist(&weyl_sort(&g, &x).unwrap(), &weyl_sort(&g, &y).unwrap());
        worst = worst.max((embedded - quotient_dist(&g, &x, &y).unwrap()).abs());
    }
    let sort = FnEmbedding::new(5, 5, |x: &[f64]| weyl_sort(&Group::permutation(5), x).unwrap());
    let d = empirical_distortion(&sort, &g, &test_set(5)[..500]).unwrap().dist;
    all(vec![at_most(worst, 1e-12), at_most((d - 1.0).abs(), 1e-12)])
}

fn c03_sorting_identity() -> Outcome {
    let (bank, l) = (sorting_bank::<f64>(5), sorting_decoder::<f64>(5));
    let g = Group::permutation(5);
    let mut r = rng::stream(SEED, "c03", 0);
    let mut worst = 0.0f64;
    let mut inexact_dyadic = 0;
    for _ in 0..1000 {
        let x: Vec<f64> = rng::gaussian_vec(&mut r, 5);
        let out = lmf_apply(&l, &bank, &x).unwrap();
        let s = weyl_sort(&g, &x).unwrap();
        worst = out.iter().zip(&s).fold(worst, |w, (a, b)| w.max((a - b).abs()));
        // Dyadic inputs with few bits make every partial sum exact.
        let dyadic: Vec<f64> = x.iter().map(|v| (v * 256.0).round() / 256.0).collect();
        if lmf_apply(&l, &bank, &dyadic).unwrap() != weyl_sort(&g, &dyadic).unwrap() {
            inexact_dyadic += 1;
        }
    }
    let mut o = at_most(worst, 1e-12);
    o.pass &= inexact_dyadic == 0;
    o.detail += &format!("; dyadic mismatches {inexact_dyadic}/1000");
    o
}

fn c04_subgradient() -> Outcome {
    const H: f64 = 1e-6;
    let mut parts = Vec::new();
    for g in [Group::sign_flip(3), Group::permutation(4), Group::planar_rotation(6)] {
        let d = g.ambient_dim();
        let mut r = rng::stream(SEED, &format!("c04-{}", g.name()), 0);
        let bank = Bank::gaussian(g.clone(), 4, &mut r);
        let xs = rng::gaussian_points(SEED, &format!("c04-points-{}", g.name()), 1000, d);
        let agree = xs
            .iter()
            .filter(|x| {
                let grad = bank.subgradient(x).unwrap();
                (0..d).all(|j| {
                    let (mut xp, mut xm) = (x.to_vec(), x.to_vec());
                    xp[j] += H;
                    xm[j] -= H;
                    let (fp, fm) = (bank.apply(&xp).unwrap(), bank.apply(&xm).unwrap());
                    (0..bank.len()).all(|i| ((fp[i] - fm[i]) / (2.0 * H) - grad[(i, j)]).abs() <= 1e-5)
                })
            })
            .count();
        let frac = agree as f64 / xs.len() as f64;
        parts.push(Outcome { pass: frac >= 0.99, detail: format!("{} {:.1}% >= 99%", g.name(), 100.0 * frac) });
    }
    all(parts)
}

fn c05_weyl_inequality() -> Outcome {
    let mut worst = f64::INFINITY;
    for g in [Group::sign_flip(3), Group::permutation(4), Group::phase_circle(2)] {
        let d = g.ambient_dim();
        let x = rng::gaussian_points(SEED, &format!("c05-points-{}", g.name()), 60, d);
        for i in 0..100 {
            let mut r = rng::stream(SEED, &format!("c05-{}", g.name()), i);
            let f = Bank::gaussian(g.clone(), 6, &mut r);
            let h = Bank::gaussian(g.clone(), 6, &mut r);
            let rep = weyl_check(&f, &h, &g, &x).unwrap();
            worst = worst.min(rep.alpha_margin).min(rep.beta_margin);
        }
    }
    Outcome { pass: worst >= -1e-10, detail: format!("worst margin {worst:.3e} >= -1e-10") }
}

fn c06_kernel_fourier() -> Outcome {
    let mut worst = 0.0f64;
    let mut off_support = 0.0f64;
    for r in [2usize, 3, 4, 6] {
        for k in -12i64..=12 {
            let q = kernel_fourier_quadrature(r, k, 64);
            let closed = kernel_fourier(r, k);
            worst = worst.max((q.re - closed).abs()).max(q.im.abs());
            if k % r as i64 != 0 {
                off_support = off_support.max(closed.abs());
            }
        }
    }
    all(vec![at_most(worst, 1e-9), at_most(off_support, 0.0)])
}

fn c07_integral_identities() -> Outcome {
    let [cos2, sin2, _] = psd_invariants();
    let cos_sin = orbitmap::harmonic::TrigPolynomial::from_cos_sin(&[], &[0.0, 0.0, 0.5]);
    let worst = [cos2, sin2, cos_sin]
        .iter()
        .map(|g| verify_integral_identity(2, g, &deconvolve(2, g).unwrap(), 1000, 4096))
        .fold(0.0, f64::max);
    at_most(worst, 1e-6)
}

/// Legendre `P_2` in closed form; for `d = 3` it is the degree-2 Gegenbauer
/// polynomial normalized to 1 at `t = 1`.
fn legendre2(t: f64) -> f64 {
    (3.0 * t * t - 1.0) / 2.0
}

fn c08_gegenbauer() -> Outcome {
    let mut parts = Vec::new();
    let mut wrong_sign = Vec::new();
    let mut worst_odd = 0.0f64;
    for d in [3usize, 4, 5] {
        let t = GegenbauerTable::new(d, 13).unwrap();
        for m in 1..=6usize {
            let expected: i8 = if m % 2 == 1 { 1 } else { -1 };
            if t.coefficients[2 * m] == 0.0 || t.sign(2 * m) != expected {
                wrong_sign.push(format!("d={d},k={}", 2 * m));
            }
        }
        for k in (1..=13).step_by(2) {
            worst_odd = worst_odd.max(t.coefficients[k].abs()).max(reduced_by_quadrature(&t, k).abs());
        }
    }
    parts.push(Outcome { pass: wrong_sign.is_empty(), detail: format!("sign failures {wrong_sign:?}") });
    parts.push(at_most(worst_odd, 1e-10));
    let oracle = GaussLegendre::new(16).integrate(0.0, 1.0, |t| 2.0 * t * legendre2(t));
    let c2 = GegenbauerTable::new(3, 2).unwrap().coefficients[2] / sphere_area(1);
    parts.push(at_most((c2 - oracle).abs(), 1e-9));
    parts.push(at_most((oracle - 0.25).abs(), 1e-14));
    all(parts)
}

fn c09_phase_reproduction() -> Outcome {
    let p = HomogeneousPolynomial::new(3, [(vec![1, 1, 0], 1.0)]).unwrap();
    let density = pr_coefficient_q(3, &p).unwrap();
    let samples = reproducing_check(&density, &p, 20, 1_000_000, SEED).unwrap();
    at_most(samples.iter().map(|s| s.relative_error()).fold(0.0, f64::max), 0.01)
}

fn c10_riemann_rate() -> Outcome {
    let pts = riemann_rate(2, &psd_invariants()[0], &[32, 64, 128, 256, 512], 4096, SEED).unwrap();
    let slope = loglog_slope(&pts);
    Outcome { pass: slope >= 0.8, detail: format!("slope {slope:.4} >= 0.8") }
}

fn c11_psd_distortion() -> Outcome {
    let g = Group::sign_flip(3);
    let h = FnEmbedding::new(3, 6, |x: &[f64]| optimal_psd(x));
    within(empirical_distortion(&h, &g, &test_set(3)).unwrap().dist, 1.35, 1.4143)
}

fn trained_dist(g: &Group, cfg: TrainConfig, n_train: usize, tag: &str) -> f64 {
    let d = g.ambient_dim();
    let cfg = TrainConfig { seed: rng::derive_seed(SEED, tag, 0), ..cfg };
    let out = train(&cfg, g, &train_set(n_train, d)).unwrap();
    let test = evaluate(&out.model, g, &test_set(d)).unwrap().dist;
    eprintln!("  {tag}: train {:.4}, held-out {test:.4}, restarts {:?}", out.train_report.dist, out.restart_dists);
    test
}

fn lmf(m: usize, steps: usize, restarts: usize) -> TrainConfig {
    TrainConfig { arch: Arch::Lmf, m, n: m, steps, restarts, ..TrainConfig::default() }
}

fn c12_mf_floor() -> Outcome {
    let cfg = TrainConfig { arch: Arch::Mf, m: 16, n: 16, steps: 2000, restarts: 10, ..TrainConfig::default() };
    within(trained_dist(&Group::sign_flip(2), cfg, 500, "c12-mf"), 1.55, 1.80)
}

fn c13_lmf_real_phase() -> Outcome {
    let g = Group::sign_flip(2);
    let small = trained_dist(&g, lmf(16, 2000, 2), 500, "c13-lmf16");
    let large = trained_dist(&g, lmf(256, 1000, 1), 300, "c13-lmf256");
    all(vec![at_most(small, 1.55), at_most(large, 1.47)])
}

fn c14_lmf_complex_phase() -> Outcome {
    at_most(trained_dist(&Group::phase_circle(2), lmf(16, 2000, 2), 1000, "c14-lmf16"), 1.60)
}

fn c15_lmf_orthogonal_tuples() -> Outcome {
    at_most(trained_dist(&Group::orthogonal_tuple(2, 2), lmf(8, 2000, 2), 500, "c15-lmf8"), 1.60)
}

fn c16_rmf() -> Outcome {
    let g = Group::sign_flip(3);
    let (_, rep) = rmf_search(&g, 9, 2000, &test_set(3), rng::derive_seed(SEED, "c16-rmf", 0)).unwrap();
    within(rep.dist, 2.0, 2.9)
}

fn c17_shapes() -> Outcome {
    let k = 32;
    let g = shape_group(k);
    let shapes = synth_dataset(200, k, SEED).unwrap();
    let xs: Vec<Vec<f64>> = shapes.iter().map(PolygonShape::to_vector).collect();
    let mut r = rng::stream(SEED, "c17-split", 0);
    let (x_train, x_test) = split(xs, 150, &mut r);
    let cfg = TrainConfig { seed: rng::derive_seed(SEED, "c17-lmf", 0), ..lmf(2 * k, 1000, 1) };
    let out = train(&cfg, &g, &x_train).unwrap();
    let train_dist = out.train_report.dist;
    let test_dist = evaluate(&out.model, &g, &x_test).unwrap().dist;
    let mut worst = 0.0f64;
    for (i, x) in x_test.iter().take(20).enumerate() {
        let fx = out.model.embed(x).unwrap();
        for h in g.sample(100, rng::derive_seed(SEED, "c17-actions", i as u64)) {
            worst = worst.max(dist(&fx, &out.model.embed(&g.apply(&h, x).unwrap()).unwrap()));
        }
    }
    let mut o = all(vec![at_most(train_dist, 2.5), at_most(test_dist, 2.5), at_most(worst, 1e-8)]);
    o.detail = format!("train, held-out, invariance: {}", o.detail);
    o
}

/// Stands in for the full-size sorting-group run, which is out of reach at
/// desk scale.
fn c18_lmf_small_permutation() -> Outcome {
    at_most(trained_dist(&Group::permutation(3), lmf(3, 2000, 2), 500, "c18-lmf3"), 1.05)
}

type Criterion = (u8, &'static str, Duration, fn() -> Outcome);

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn main() -> ExitCode {
    let criteria: [Criterion; 18] = [
        (1, "quotient metric closed form vs enumeration", secs(5), c01_metric_oracle),
        (2, "sorting is an isometric embedding", secs(60), c02_weyl_sort_isometry),
        (3, "decoded sorting bank equals sort", secs(60), c03_sorting_identity),
        (4, "subgradient vs central differences", secs(60), c04_subgradient),
        (5, "Weyl inequality margins", secs(60), c05_weyl_inequality),
        (6, "kernel Fourier coefficients", secs(60), c06_kernel_fourier),
        (7, "integral identities", secs(1), c07_integral_identities),
        (8, "Gegenbauer coefficient signs", secs(60), c08_gegenbauer),
        (9, "phase retrieval reproducing density", secs(30), c09_phase_reproduction),
        (10, "Riemann bank Lipschitz rate", secs(60), c10_riemann_rate),
        (11, "HPoly distortion on R^3/{+-I}", secs(60), c11_psd_distortion),
        (12, "MF floor on R^2/{+-I}", secs(600), c12_mf_floor),
        (13, "LMF on R^2/{+-I}", secs(1200), c13_lmf_real_phase),
        (14, "LMF on C^2/S^1", secs(1200), c14_lmf_complex_phase),
        (15, "LMF on (R^2)^2/O(2)", secs(1200), c15_lmf_orthogonal_tuples),
        (16, "RMF best of 2000 on R^3/{+-I}", secs(300), c16_rmf),
        (17, "shape pipeline", secs(900), c17_shapes),
        (18, "supplement: LMF on R^3/S_3", secs(600), c18_lmf_small_permutation),
    ];
    let only: Option<Vec<u8>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|t| t.trim().parse().ok()).collect());
    println!("acceptance (seed {SEED})");
    let mut failed = Vec::new();
    for (id, name, limit, check) in criteria {
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        let start = Instant::now();
        let mut o = check();
        let elapsed = start.elapsed();
        if elapsed > limit {
            o.pass = false;
            o.detail += &format!("; over the {}s budget", limit.as_secs());
        }
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {id:02} {name}: {} ({:.2}s)", o.detail, elapsed.as_secs_f64());
        if !o.pass {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("failed criteria: {failed:?}");
        ExitCode::FAILURE
    }
}
