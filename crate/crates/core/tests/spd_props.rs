mod common;

use common::*;
use proptest::prelude::*;
use symmflow_core::linalg::{mat_exp, Matrix};
use symmflow_core::series::DexpinvSeries;
use symmflow_core::space::lts_axiom_residuals;
use symmflow_core::spd::*;

fn sym_inputs(count: usize) -> impl Strategy<Value = (usize, Vec<f64>)> {
    (2usize..=6).prop_flat_map(move |n| (Just(n), prop::collection::vec(-1.0..1.0f64, count * n * n)))
}

fn sym_block(n: usize, raw: &[f64], k: usize) -> Matrix {
    symmetric(n, block(raw, n * n, k))
}

proptest! {
    #[test]
    fn lts_axioms((n, raw) in sym_inputs(5)) {
        let ms: Vec<Matrix> = (0..5).map(|k| sym_block(n, &raw, k)).collect();
        let (r1, r2, r3) = lts_axiom_residuals(spd_triple, &ms[0], &ms[1], &ms[2], &ms[3], &ms[4]);
        let scale = ms.iter().map(|m| m.frobenius()).fold(1.0, f64::max);
        prop_assert!(r1 <= 1e-13 * scale.powi(3));
        prop_assert!(r2 <= 1e-12 * scale.powi(3), "r2 = {r2:e}");
        prop_assert!(r3 <= 1e-12 * scale.powi(5), "r3 = {r3:e}");
    }

    #[test]
    fn triple_matches_commutators((n, raw) in sym_inputs(3)) {
        let (v, w, z) = (sym_block(n, &raw, 0), sym_block(n, &raw, 1), sym_block(n, &raw, 2));
        let t = spd_triple(&v, &w, &z);
        let vw = v.matmul(&w).sub(&w.matmul(&v));
        let oracle = vw.matmul(&z).sub(&z.matmul(&vw)).scaled(0.25);
        prop_assert!(t.sub(&oracle).max_abs() <= 1e-12);
        prop_assert!(t.asymmetry() <= 1e-14);
    }

    #[test]
    fn ad2_is_linear((n, raw) in sym_inputs(3), a in -2.0..2.0f64) {
        let (theta, w1, w2) = (sym_block(n, &raw, 0), sym_block(n, &raw, 1), sym_block(n, &raw, 2));
        let lhs = spd_ad2(&theta, &w1.scaled(a).add(&w2));
        let rhs = spd_ad2(&theta, &w1).scaled(a).add(&spd_ad2(&theta, &w2));
        prop_assert!(lhs.sub(&rhs).max_abs() <= 1e-13);
    }

    #[test]
    fn exp_at_identity_is_matrix_exponential((n, raw) in sym_inputs(1)) {
        use symmflow_core::space::SymmetricSpace;
        let space = SpdManifold::new(n);
        let base = SpdFrame::new(&SpdPoint::identity(n)).unwrap();
        let theta = sym_block(n, &raw, 0);
        let got = space.exp_at(&base, &theta).unwrap();
        prop_assert!(got.as_matrix().sub(&mat_exp(&theta).unwrap()).max_abs() <= 1e-13);
    }
}

fn truncation_gap(theta: &Matrix, w: &Matrix, low: usize, high: usize) -> f64 {
    let a = DexpinvSeries::new(low).apply(|x| spd_ad2(theta, x), w);
    let b = DexpinvSeries::new(high).apply(|x| spd_ad2(theta, x), w);
    a.sub(&b).frobenius()
}

fn fixed_pair() -> (Matrix, Matrix) {
    let raw_t: Vec<f64> = (0..16).map(|i| ((i * 7 + 3) % 11) as f64 / 11.0 - 0.5).collect();
    let raw_w: Vec<f64> = (0..16).map(|i| ((i * 5 + 1) % 13) as f64 / 13.0 - 0.5).collect();
    let theta = symmetric(4, &raw_t);
    let theta = theta.scaled(1.0 / theta.frobenius());
    (theta, symmetric(4, &raw_w))
}

#[test]
fn one_versus_three_terms_scale_with_fifth_power() {
    // θ and the stage vector shrink together, as both are O(h)
    let (theta, w) = fixed_pair();
    let coarse = truncation_gap(&theta.scaled(0.1), &w.scaled(0.1), 1, 3);
    let fine = truncation_gap(&theta.scaled(0.05), &w.scaled(0.05), 1, 3);
    let ratio = coarse / fine;
    assert!((ratio / 32.0 - 1.0).abs() <= 0.2, "ratio {ratio}");
}

#[test]
fn three_versus_eight_terms_scale_with_eighth_power() {
    let (theta, w) = fixed_pair();
    let coarse = truncation_gap(&theta.scaled(0.1), &w, 3, 8);
    let fine = truncation_gap(&theta.scaled(0.05), &w, 3, 8);
    let ratio = coarse / fine;
    assert!((ratio / 256.0 - 1.0).abs() <= 0.2, "ratio {ratio}");
}

#[test]
fn commuting_stage_needs_no_correction() {
    let theta = Matrix::from_diagonal(&[0.3, -0.1, 0.5]);
    let w = Matrix::from_diagonal(&[1.0, 2.0, 3.0]);
    assert_eq!(DexpinvSeries::new(5).apply(|x| spd_ad2(&theta, x), &w), w);
    assert_eq!(DexpinvSeries::new(0).apply(|x| spd_ad2(&theta, x), &w), w);
}
