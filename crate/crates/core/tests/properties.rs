//! Randomized invariants of the public API.

use orbitmap::distortion::empirical_distortion;
use orbitmap::embeddings::{optimal_psd, weyl_sort, FnEmbedding};
use orbitmap::filters::{lmf_apply, max_filter, sorting_bank, sorting_decoder};
use orbitmap::groups::GroupElement;
use orbitmap::harmonic::fourier::TrigPolynomial;
use orbitmap::harmonic::deconvolve;
use orbitmap::linalg::{dist, dot, norm, sub};
use orbitmap::metrics::{aligned_residual, quotient_dist_enumerated};
use orbitmap::training::rescale_model;
use orbitmap::{quotient_dist, rng, Bank, Embedding, Group, Model};
use proptest::prelude::*;

fn vec_of(d: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0..3.0f64, d)
}

fn pair(d: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (vec_of(d), vec_of(d))
}

/// Groups small enough to enumerate, with their ambient dimension.
fn finite_groups() -> Vec<Group> {
    vec![
        Group::sign_flip(4),
        Group::planar_rotation(5),
        Group::permutation(4),
        Group::cyclic_shift(5),
        Group::hyperoctahedral(3),
    ]
}

fn all_groups() -> Vec<Group> {
    let mut g = finite_groups();
    g.extend([Group::phase_circle(2), Group::orthogonal_tuple(2, 3), Group::shape_group(4)]);
    g
}

fn group_and_pair() -> impl Strategy<Value = (Group, Vec<f64>, Vec<f64>, u64)> {
    (0..all_groups().len(), any::<u64>()).prop_flat_map(|(i, seed)| {
        let g = all_groups().swap_remove(i);
        let d = g.ambient_dim();
        (Just(g), vec_of(d), vec_of(d), Just(seed))
    })
}

fn finite_group_and_pair() -> impl Strategy<Value = (Group, Vec<f64>, Vec<f64>)> {
    (0..finite_groups().len()).prop_flat_map(|i| {
        let g = finite_groups().swap_remove(i);
        let d = g.ambient_dim();
        (Just(g), vec_of(d), vec_of(d))
    })
}

fn sorted(x: &[f64]) -> Vec<f64> {
    let mut v = x.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn argmax_dominates_sampled_elements((g, x, y, seed) in group_and_pair()) {
        let best = g.argmax_inner(&x, &y).unwrap().value;
        for h in g.sample(100, seed) {
            let gy = g.apply(&h, &y).unwrap();
            prop_assert!(best >= dot(&x, &gy) - 1e-10);
        }
    }

    #[test]
    fn argmax_value_is_symmetric((g, x, y, _) in group_and_pair()) {
        let a = g.argmax_inner(&x, &y).unwrap().value;
        let b = g.argmax_inner(&y, &x).unwrap().value;
        prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()));
    }

    #[test]
    fn argmax_matches_enumeration((g, x, y) in finite_group_and_pair()) {
        let fast = g.argmax_inner(&x, &y).unwrap().value;
        let slow = g.argmax_inner_enumerated(&x, &y).unwrap().value;
        prop_assert!((fast - slow).abs() <= 1e-12 * (1.0 + slow.abs()), "{fast} vs {slow}");
    }

    #[test]
    fn closed_form_distance_matches_enumeration(d in 1usize..=6, flip in any::<bool>(), seed in any::<u64>()) {
        let g = if flip { Group::sign_flip(d) } else { Group::permutation(d) };
        let mut r = rng::stream(seed, "prop-pairs", 0);
        let x: Vec<f64> = rng::gaussian_vec(&mut r, d);
        let y: Vec<f64> = rng::gaussian_vec(&mut r, d);
        let fast = quotient_dist(&g, &x, &y).unwrap();
        let slow = quotient_dist_enumerated(&g, &x, &y).unwrap();
        prop_assert!((fast - slow).abs() <= 1e-12);
    }

    #[test]
    fn quotient_distance_is_at_most_euclidean((g, x, y, _) in group_and_pair()) {
        prop_assert!(quotient_dist(&g, &x, &y).unwrap() <= dist(&x, &y) + 1e-10);
    }

    #[test]
    fn quotient_distance_is_invariant((g, x, y, seed) in group_and_pair()) {
        let base = quotient_dist(&g, &x, &y).unwrap();
        for h in g.sample(5, seed) {
            let gx = g.apply(&h, &x).unwrap();
            prop_assert!((quotient_dist(&g, &gx, &y).unwrap() - base).abs() <= 1e-10 * (1.0 + base));
        }
    }

    #[test]
    fn permutation_distance_is_sorted_distance((x, y) in pair(5)) {
        let g = Group::permutation(5);
        let brute = quotient_dist_enumerated(&g, &x, &y).unwrap();
        prop_assert!((brute - dist(&sorted(&x), &sorted(&y))).abs() <= 1e-12);
    }

    #[test]
    fn max_filter_is_lipschitz_in_the_signal((g, x, x2, seed) in group_and_pair()) {
        let mut r = rng::stream(seed, "prop-template", 0);
        let y: Vec<f64> = rng::gaussian_vec(&mut r, g.ambient_dim());
        let gap = (max_filter(&g, &y, &x).unwrap() - max_filter(&g, &y, &x2).unwrap()).abs();
        prop_assert!(gap <= dist(&x, &x2) * norm(&y) + 1e-10);
    }

    #[test]
    fn max_filter_is_symmetric((g, x, y, _) in group_and_pair()) {
        let a = max_filter(&g, &y, &x).unwrap();
        let b = max_filter(&g, &x, &y).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()));
    }

    #[test]
    fn subgradient_inequality((g, x, x2, seed) in group_and_pair()) {
        let mut r = rng::stream(seed, "prop-bank", 0);
        let bank = Bank::gaussian(g.clone(), 4, &mut r);
        let (fx, fx2) = (bank.apply(&x).unwrap(), bank.apply(&x2).unwrap());
        let grad = bank.subgradient(&x).unwrap();
        let step = sub(&x2, &x);
        for i in 0..bank.len() {
            let scale = 1.0 + fx[i].abs() + fx2[i].abs();
            prop_assert!(fx2[i] >= fx[i] + dot(grad.row(i), &step) - 1e-10 * scale);
        }
    }

    #[test]
    fn psd_map_ratios_stay_within_sqrt2((x, y, z) in (vec_of(3), vec_of(3), vec_of(3))) {
        let g = Group::sign_flip(3);
        let pts = [x, y, z];
        let mut ratios = Vec::new();
        for i in 0..3 {
            for j in i + 1..3 {
                let d = quotient_dist(&g, &pts[i], &pts[j]).unwrap();
                prop_assume!(d > 1e-6);
                ratios.push(dist(&optimal_psd(&pts[i]), &optimal_psd(&pts[j])) / d);
            }
        }
        let hi = ratios.iter().copied().fold(0.0, f64::max);
        let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        prop_assert!(hi / lo <= std::f64::consts::SQRT_2 + 1e-6);
    }

    #[test]
    fn weyl_sort_is_isometric((x, y) in pair(5)) {
        let g = Group::permutation(5);
        let (sx, sy) = (weyl_sort(&g, &x).unwrap(), weyl_sort(&g, &y).unwrap());
        prop_assert!((dist(&sx, &sy) - quotient_dist(&g, &x, &y).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn permutation_max_filter_polarizes((x, z) in pair(5)) {
        let g = Group::permutation(5);
        let lhs = max_filter(&g, &z, &x).unwrap();
        let rhs = dot(&weyl_sort(&g, &x).unwrap(), &weyl_sort(&g, &z).unwrap());
        prop_assert!((lhs - rhs).abs() <= 1e-10);
    }

    #[test]
    fn sorting_bank_decodes_to_sort(x in vec_of(5)) {
        let out = lmf_apply(&sorting_decoder(5), &sorting_bank(5), &x).unwrap();
        let s = weyl_sort(&Group::permutation(5), &x).unwrap();
        for (a, b) in out.iter().zip(&s) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn aligned_residual_is_the_quotient_distance((g, x, y, _) in group_and_pair()) {
        let d = quotient_dist(&g, &x, &y).unwrap();
        prop_assert!((aligned_residual(&g, &x, &y).unwrap() - d).abs() <= 1e-12 * (1.0 + d));
    }

    #[test]
    fn distortion_is_scale_equivariant(c in 0.01..100.0f64, seed in any::<u64>()) {
        let g = Group::sign_flip(3);
        let x = rng::gaussian_points(seed, "prop-scale", 12, 3);
        let mut r = rng::stream(seed, "prop-scale-bank", 0);
        let bank = Bank::gaussian(g.clone(), 5, &mut r);
        let model = Model::MaxFilterBank { bank };
        let base = empirical_distortion(&model, &g, &x).unwrap();
        let scaled = empirical_distortion(&rescale_model(&model, c).unwrap(), &g, &x).unwrap();
        prop_assert!((scaled.alpha - c * base.alpha).abs() <= 1e-12 * c * base.alpha);
        prop_assert!((scaled.beta - c * base.beta).abs() <= 1e-12 * c * base.beta);
        prop_assert!((scaled.dist - base.dist).abs() <= 1e-12 * base.dist);
    }

    #[test]
    fn adding_points_never_lowers_distortion(seed in any::<u64>(), extra in 1usize..6) {
        let g = Group::permutation(3);
        let all = rng::gaussian_points(seed, "prop-monotone", 10 + extra, 3);
        let mut r = rng::stream(seed, "prop-monotone-bank", 0);
        let bank = Bank::gaussian(g.clone(), 4, &mut r);
        let small = empirical_distortion(&bank, &g, &all[..10]).unwrap().dist;
        let big = empirical_distortion(&bank, &g, &all).unwrap().dist;
        prop_assert!(big >= small);
    }

    #[test]
    fn deconvolution_inverts_the_kernel(r in prop::sample::select(vec![2usize, 3, 4, 6]), seed in any::<u64>()) {
        let mut s = rng::stream(seed, "prop-deconvolve", 0);
        let deg = 2 * r;
        let (mut cos, mut sin) = (vec![0.0; deg + 1], vec![0.0; deg + 1]);
        for k in (0..=deg).step_by(r) {
            cos[k] = rng::gaussian(&mut s);
            sin[k] = if k > 0 { rng::gaussian(&mut s) } else { 0.0 };
        }
        let g = TrigPolynomial::from_cos_sin(&cos, &sin);
        let back = deconvolve(r, &g).unwrap().convolve_kernel(r);
        for k in -(deg as i64)..=deg as i64 {
            prop_assert!((back.coeff(k) - g.coeff(k)).norm() <= 1e-8);
        }
    }
}

#[test]
fn psd_empirical_distortion_approaches_sqrt2() {
    let g = Group::sign_flip(3);
    let x = rng::gaussian_points(3, "psd-limit", 400, 3);
    let h = FnEmbedding::new(3, 6, |v: &[f64]| optimal_psd(v));
    let rep = empirical_distortion(&h, &g, &x).unwrap();
    assert!(rep.dist <= std::f64::consts::SQRT_2 + 1e-6 && rep.dist > 1.3, "{}", rep.dist);
}

/// Brute force over every cyclic shift and a fine grid of rotations and
/// reflections stays above the closed form and closes in on it.
#[test]
fn shape_distance_brute_force_converges() {
    let k = 6;
    let g = Group::shape_group(k);
    let pts = rng::gaussian_points(4, "shape-brute", 6, 2 * k);
    for w in pts.chunks(2) {
        let (x, y) = (&w[0], &w[1]);
        let exact = quotient_dist(&g, x, y).unwrap();
        let brute = |angles: usize| {
            let mut best = f64::INFINITY;
            for shift in 0..k {
                for a in 0..angles {
                    let t = std::f64::consts::TAU * a as f64 / angles as f64;
                    let (c, s) = (t.cos(), t.sin());
                    for rotation in [[[c, -s], [s, c]], [[c, s], [s, -c]]] {
                        let gy = g.apply(&GroupElement::Shape { rotation, shift }, y).unwrap();
                        best = best.min(dist(x, &gy));
                    }
                }
            }
            best
        };
        let (coarse, fine) = (brute(100), brute(10_000));
        assert!(coarse >= exact - 1e-6 && fine >= exact - 1e-6, "{exact} {coarse} {fine}");
        assert!(fine - exact <= coarse - exact + 1e-12);
        assert!(fine - exact < 1e-5 * (1.0 + exact), "{exact} {fine}");
    }
}

#[test]
fn shape_embeddings_are_invariant() {
    let k = 8;
    let g = Group::shape_group(k);
    let mut r = rng::stream(5, "shape-invariance", 0);
    let bank = Bank::gaussian(g.clone(), 12, &mut r);
    let x = rng::gaussian_points(5, "shape-invariance-points", 10, 2 * k);
    for xi in &x {
        let fx = bank.embed(xi).unwrap();
        for h in g.sample(100, 6) {
            let fgx = bank.embed(&g.apply(&h, xi).unwrap()).unwrap();
            assert!(dist(&fx, &fgx) <= 1e-8);
        }
    }
}
