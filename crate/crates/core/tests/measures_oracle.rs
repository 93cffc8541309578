//! Bit-packed line extraction and measures against a naive enumerator.

mod common;

use common::oracle;
use proptest::prelude::*;
use rand::Rng;
use rqa_core::synth;
use rqa_core::{
    build_rp, compute_measures, delay_embed, extract_diagonals, extract_verticals, EmbeddingConfig,
    MeasureSet, Norm, RecurrencePlot,
};

fn plot(m: &[Vec<bool>]) -> RecurrencePlot {
    RecurrencePlot::from_fn(m.len(), |i, j| m[i][j])
}

fn cfg(l_min: usize, v_min: usize, theiler: usize) -> EmbeddingConfig {
    EmbeddingConfig {
        l_min,
        v_min,
        theiler,
        ..Default::default()
    }
}

fn assert_same(got: &MeasureSet, want: &oracle::Naive) {
    assert_eq!(got.rr, want.rr, "rr");
    assert_eq!(got.det, want.det, "det");
    assert_eq!(got.l_mean, want.l_mean, "l");
    assert_eq!(got.l_max, want.l_max, "lmax");
    assert_eq!(got.div, want.div, "div");
    assert_eq!(got.entr, want.entr, "entr");
    assert_eq!(got.trend, want.trend, "trend");
    assert_eq!(got.lam, want.lam, "lam");
    assert_eq!(got.tt, want.tt, "tt");
    assert_eq!(got.t1, want.t1, "t1");
    assert_eq!(got.t2, want.t2, "t2");
}

#[test]
fn random_matrices_match_enumerator() {
    let mut rng = synth::rng(42);
    for _ in 0..300 {
        let n = rng.random_range(1..=50);
        let density = rng.random_range(0.05..0.9);
        let m = oracle::random_symmetric(n, density, &mut || rng.random::<f64>());
        let (l_min, v_min, theiler) = (
            rng.random_range(2..5),
            rng.random_range(2..5),
            rng.random_range(0..4),
        );
        let rp = plot(&m);
        let got = compute_measures(&rp, &cfg(l_min, v_min, theiler));
        let want = oracle::measures(&m, l_min, v_min, theiler);
        assert_same(&got, &want);

        let (diag, total) = oracle::diagonal_runs(&m, theiler);
        let h = extract_diagonals(&rp, theiler);
        assert_eq!((h.counts, h.total_recurrence_points), (diag, total));
        let (vert, total) = oracle::vertical_runs(&m);
        let h = extract_verticals(&rp);
        assert_eq!((h.counts, h.total_recurrence_points), (vert, total));
    }
}

#[test]
fn asymmetric_matrices_match_enumerator() {
    let mut rng = synth::rng(7);
    for _ in 0..100 {
        let n = rng.random_range(2..=40);
        let m: Vec<Vec<bool>> = (0..n)
            .map(|_| (0..n).map(|_| rng.random_bool(0.4)).collect())
            .collect();
        let got = compute_measures(&plot(&m), &cfg(2, 2, 1));
        assert_same(&got, &oracle::measures(&m, 2, 2, 1));
    }
}

#[test]
fn measures_of_embedded_noise_match_enumerator() {
    let x = synth::gaussian_noise(300, 3);
    let e = delay_embed(&x, 3, 2).unwrap();
    for norm in [Norm::Maximum, Norm::Euclidean] {
        let rp = build_rp(&e, 0.8, norm).unwrap();
        let m = rp.to_rows();
        assert_same(
            &compute_measures(&rp, rp.config()),
            &oracle::measures(&m, 2, 2, 1),
        );
    }
}

#[test]
fn identity_plot() {
    let rp = RecurrencePlot::from_fn(30, |i, j| i == j);
    let s = compute_measures(&rp, &EmbeddingConfig::default());
    assert_eq!(s.rr, 1.0 / 30.0);
    assert_eq!((s.det, s.lam), (0.0, 0.0));
    assert_eq!((s.div, s.tt), (None, None));
}

fn matrix(n: usize) -> impl Strategy<Value = Vec<Vec<bool>>> {
    (prop::collection::vec(any::<bool>(), n * (n - 1) / 2)).prop_map(move |upper| {
        let mut m = vec![vec![true; n]; n];
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                m[i][j] = upper[k];
                m[j][i] = upper[k];
                k += 1;
            }
        }
        m
    })
}

fn any_matrix() -> impl Strategy<Value = Vec<Vec<bool>>> {
    (2usize..40).prop_flat_map(matrix)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fractions_are_bounded(m in any_matrix(), theiler in 0usize..3) {
        let s = compute_measures(&plot(&m), &cfg(2, 2, theiler));
        for v in [s.rr, s.det, s.lam] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
        let classes = extract_diagonals(&plot(&m), theiler).counts.range(2..).count();
        prop_assert!(s.entr >= 0.0);
        prop_assert!(s.entr <= (classes.max(1) as f64).ln() + 1e-12);
        if let Some(tt) = s.tt { prop_assert!(tt >= 2.0); }
        if let Some(l) = s.l_mean { prop_assert!(l >= 2.0); }
    }

    #[test]
    fn longer_minimum_never_raises_det_or_lam(m in any_matrix(), lo in 2usize..5, extra in 1usize..4) {
        let rp = plot(&m);
        let a = compute_measures(&rp, &cfg(lo, lo, 1));
        let b = compute_measures(&rp, &cfg(lo + extra, lo + extra, 1));
        prop_assert!(b.det <= a.det);
        prop_assert!(b.lam <= a.lam);
    }

    #[test]
    fn det_and_lam_survive_transposition(m in any_matrix()) {
        let rp = plot(&m);
        let c = cfg(2, 2, 1);
        let (a, b) = (compute_measures(&rp, &c), compute_measures(&rp.transpose(), &c));
        prop_assert_eq!(a.det, b.det);
        prop_assert_eq!(a.lam, b.lam);
    }

    #[test]
    fn rp_matches_double_loop(x in prop::collection::vec(-2f64..2.0, 2..80), m in 1usize..4, tau in 1usize..4, eps in 0.0f64..1.5) {
        prop_assume!(x.len() >= (m - 1) * tau + 2);
        let e = delay_embed(&x, m, tau).unwrap();
        for norm in [Norm::Maximum, Norm::Euclidean] {
            let rp = build_rp(&e, eps, norm).unwrap();
            prop_assert!(rp.is_symmetric());
            for i in 0..e.len() {
                prop_assert!(rp.get(i, i));
                for j in 0..e.len() {
                    let (a, b) = (e.point(i), e.point(j));
                    let d = match norm {
                        Norm::Maximum => a.iter().zip(b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max),
                        Norm::Euclidean => a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt(),
                    };
                    prop_assert_eq!(rp.get(i, j), d <= eps);
                }
            }
        }
    }

    #[test]
    fn larger_threshold_only_adds_recurrences(x in prop::collection::vec(-2f64..2.0, 2..100), e1 in 0.0f64..1.0, de in 0.0f64..1.0) {
        let e = delay_embed(&x, 1, 1).unwrap();
        let small = build_rp(&e, e1, Norm::Maximum).unwrap();
        let large = build_rp(&e, e1 + de, Norm::Maximum).unwrap();
        for i in 0..e.len() {
            for j in 0..e.len() {
                prop_assert!(!small.get(i, j) || large.get(i, j));
            }
        }
    }

    #[test]
    fn shift_leaves_plot_unchanged(x in prop::collection::vec(-2f64..2.0, 2..100), c in -0.5f64..0.5) {
        // Offsets that keep binary differences exact.
        let c = (c * 64.0).round() / 64.0;
        let x: Vec<f64> = x.iter().map(|v| (v * 64.0).round() / 64.0).collect();
        let moved: Vec<f64> = x.iter().map(|v| v + c).collect();
        let a = build_rp(&delay_embed(&x, 2, 1).unwrap_or_else(|_| delay_embed(&x, 1, 1).unwrap()), 0.25, Norm::Maximum).unwrap();
        let b = build_rp(&delay_embed(&moved, 2, 1).unwrap_or_else(|_| delay_embed(&moved, 1, 1).unwrap()), 0.25, Norm::Maximum).unwrap();
        prop_assert_eq!(a.to_rows(), b.to_rows());
    }
}
