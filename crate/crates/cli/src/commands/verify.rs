//! Numerical checks, each written as a certificate
//! `{check, params, observed, bound, pass}`.

use std::f64::consts::PI;

use clap::ValueEnum;
use orbitmap::distortion::weyl_check;
use orbitmap::embeddings::weyl_sort;
use orbitmap::filters::{lmf_apply, sorting_bank, sorting_decoder};
use orbitmap::harmonic::fourier::{kernel_fourier_quadrature, TrigPolynomial};
use orbitmap::harmonic::gegenbauer::{reduced_by_quadrature, GegenbauerTable};
use orbitmap::harmonic::riemann::{loglog_slope, psd_invariants, riemann_rate};
use orbitmap::harmonic::{deconvolve, kernel_fourier, verify_integral_identity};
use orbitmap::metrics::check_metric_axioms;
use orbitmap::{rng, Bank, Group};
use serde::Serialize;
use serde_json::{json, Value};

use crate::{Context, Outcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    Fourier,
    Deconvolve,
    Gegenbauer,
    IntegralIdentity,
    RiemannRate,
    Weyl,
    MetricAxioms,
    #[value(name = "example-1-2")]
    #[serde(rename = "example-1-2")]
    Example12,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub check: Check,
    pub params: Value,
    pub observed: f64,
    pub bound: f64,
    pub pass: bool,
}

impl Certificate {
    fn at_most(check: Check, params: Value, observed: f64, bound: f64) -> Self {
        Self { check, params, observed, bound, pass: observed <= bound }
    }

    fn at_least(check: Check, params: Value, observed: f64, bound: f64) -> Self {
        Self { check, params, observed, bound, pass: observed >= bound }
    }
}

fn fourier() -> Certificate {
    let orders = [2usize, 3, 4, 6];
    let mut worst = 0.0f64;
    for &r in &orders {
        for k in -12i64..=12 {
            let q = kernel_fourier_quadrature(r, k, 64);
            worst = worst.max((q.re - kernel_fourier(r, k)).abs()).max(q.im.abs());
        }
    }
    Certificate::at_most(Check::Fourier, json!({ "orders": orders, "max_abs_k": 12 }), worst, 1e-9)
}

fn deconvolve_check(seed: u64) -> anyhow::Result<Certificate> {
    let mut r = rng::stream(seed, "verify-deconvolve", 0);
    let mut worst = 0.0f64;
    for order in [2usize, 3, 4, 6] {
        for _ in 0..20 {
            // Random real polynomial supported on multiples of the order.
            let deg = 3 * order;
            let mut cos = vec![0.0; deg + 1];
            let mut sin = vec![0.0; deg + 1];
            for k in (0..=deg).step_by(order) {
                cos[k] = rng::gaussian(&mut r);
                if k > 0 {
                    sin[k] = rng::gaussian(&mut r);
                }
            }
            let g = TrigPolynomial::from_cos_sin(&cos, &sin);
            let back = deconvolve(order, &g)?.convolve_kernel(order);
            for k in -(deg as i64)..=deg as i64 {
                worst = worst.max((back.coeff(k) - g.coeff(k)).norm());
            }
        }
    }
    let c = deconvolve(2, &psd_invariants()[0])?;
    worst = worst.max((c.coeff(0).re - PI / 4.0).abs()).max((2.0 * c.coeff(2).re - 3.0 * PI / 4.0).abs());
    Ok(Certificate::at_most(
        Check::Deconvolve,
        json!({ "orders": [2, 3, 4, 6], "polynomials_per_order": 20, "seed": seed }),
        worst,
        1e-8,
    ))
}

fn gegenbauer() -> anyhow::Result<Certificate> {
    let mut worst_odd = 0.0f64;
    let mut sign_failures = Vec::new();
    let mut coefficients = serde_json::Map::new();
    for d in [3usize, 4, 5] {
        let t = GegenbauerTable::new(d, 13)?;
        for m in 1..=6 {
            let expected = if m % 2 == 1 { 1 } else { -1 };
            if t.sign(2 * m) != expected || t.coefficients[2 * m] == 0.0 {
                sign_failures.push(json!({ "d": d, "k": 2 * m }));
            }
        }
        for k in (1..=13).step_by(2) {
            worst_odd = worst_odd.max(reduced_by_quadrature(&t, k).abs());
        }
        coefficients.insert(format!("d{d}"), json!(t.coefficients));
    }
    let t3 = GegenbauerTable::new(3, 2)?;
    let c2_err = (reduced_by_quadrature(&t3, 2) - 0.25).abs();
    let observed = worst_odd.max(c2_err);
    let mut cert = Certificate::at_most(
        Check::Gegenbauer,
        json!({ "dims": [3, 4, 5], "m": "1..=6", "sign_failures": sign_failures, "coefficients": coefficients }),
        observed,
        1e-10,
    );
    cert.pass &= sign_failures.is_empty();
    Ok(cert)
}

fn integral_identity() -> anyhow::Result<Certificate> {
    let [cos2, sin2, _] = psd_invariants();
    let cs = TrigPolynomial::from_cos_sin(&[], &[0.0, 0.0, 0.5]);
    let mut errors = Vec::new();
    for g in [&cos2, &sin2, &cs] {
        let c = deconvolve(2, g)?;
        errors.push(verify_integral_identity(2, g, &c, 1000, 4096));
    }
    let worst = errors.iter().copied().fold(0.0, f64::max);
    Ok(Certificate::at_most(
        Check::IntegralIdentity,
        json!({ "identities": ["cos^2", "sin^2", "cos sin"], "n_theta": 1000, "n_quad": 4096, "errors": errors }),
        worst,
        1e-6,
    ))
}

fn riemann(seed: u64) -> anyhow::Result<Certificate> {
    let ns = [32usize, 64, 128, 256, 512];
    let pts = riemann_rate(2, &psd_invariants()[0], &ns, 4096, seed)?;
    let slope = loglog_slope(&pts);
    Ok(Certificate::at_least(Check::RiemannRate, json!({ "n": ns, "samples": 4096, "points": pts, "seed": seed }), slope, 0.8))
}

fn weyl(seed: u64) -> anyhow::Result<Certificate> {
    let g = Group::sign_flip(3);
    let x = rng::gaussian_points(seed, "verify-weyl-points", 60, 3);
    let mut worst = f64::INFINITY;
    for i in 0..100u64 {
        let mut r = rng::stream(seed, "verify-weyl-models", i);
        let f = Bank::gaussian(g.clone(), 6, &mut r);
        let h = Bank::gaussian(g.clone(), 6, &mut r);
        let rep = weyl_check(&f, &h, &g, &x)?;
        worst = worst.min(rep.alpha_margin).min(rep.beta_margin);
    }
    Ok(Certificate::at_least(Check::Weyl, json!({ "group": g.name(), "pairs": 100, "points": 60, "seed": seed }), worst, -1e-10))
}

fn metric_axioms(seed: u64) -> anyhow::Result<Certificate> {
    let groups = [
        Group::sign_flip(3),
        Group::permutation(4),
        Group::planar_rotation(5),
        Group::cyclic_shift(5),
        Group::phase_circle(2),
        Group::orthogonal_tuple(2, 2),
        Group::shape_group(5),
    ];
    let mut worst = 0.0f64;
    let mut names = Vec::new();
    for g in &groups {
        let x = rng::gaussian_points(seed, &format!("verify-axioms-{}", g.name()), 25, g.ambient_dim());
        let rep = check_metric_axioms(g, &x)?;
        worst = worst.max(rep.worst_symmetry).max(rep.worst_triangle).max(rep.worst_identity);
        names.push(g.name());
    }
    Ok(Certificate::at_most(
        Check::MetricAxioms,
        json!({ "groups": names, "points": 25, "seed": seed }),
        worst,
        orbitmap::metrics::AXIOM_TOLERANCE,
    ))
}

fn example_1_2(seed: u64) -> anyhow::Result<Certificate> {
    let d = 5;
    let (bank, l) = (sorting_bank::<f64>(d), sorting_decoder::<f64>(d));
    let g = Group::permutation(d);
    let mut r = rng::stream(seed, "verify-example-1-2", 0);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let x: Vec<f64> = rng::gaussian_vec(&mut r, d);
        let lhs = lmf_apply(&l, &bank, &x)?;
        let rhs = weyl_sort(&g, &x)?;
        worst = lhs.iter().zip(&rhs).fold(worst, |w, (a, b)| w.max((a - b).abs()));
    }
    Ok(Certificate::at_most(Check::Example12, json!({ "d": d, "points": 1000, "seed": seed }), worst, 1e-12))
}

pub fn certify(check: Check, seed: u64) -> anyhow::Result<Certificate> {
    match check {
        Check::Fourier => Ok(fourier()),
        Check::Deconvolve => deconvolve_check(seed),
        Check::Gegenbauer => gegenbauer(),
        Check::IntegralIdentity => integral_identity(),
        Check::RiemannRate => riemann(seed),
        Check::Weyl => weyl(seed),
        Check::MetricAxioms => metric_axioms(seed),
        Check::Example12 => example_1_2(seed),
    }
}

pub fn run(ctx: &Context, check: Check) -> anyhow::Result<Outcome> {
    let cert = certify(check, ctx.seed)?;
    let name = serde_json::to_value(check)?.as_str().unwrap_or("check").to_string();
    ctx.out.write_json(&format!("verify_{name}.json"), &cert)?;
    println!("{}", serde_json::to_string(&cert)?);
    Ok(if cert.pass { Outcome::Pass } else { Outcome::CheckFailed })
}
