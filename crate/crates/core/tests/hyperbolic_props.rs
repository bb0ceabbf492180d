mod common;

use common::*;
use proptest::prelude::*;
use symmflow_core::hyperbolic::*;
use symmflow_core::linalg::{mat_exp, minkowski, sym_eig, SymMatrix, Vector};
use symmflow_core::series::DexpinvSeries;
use symmflow_core::space::{lts_axiom_residuals, triple_bracket_oracle};

fn dims_and_raw(chunks: usize) -> impl Strategy<Value = (usize, Vec<f64>)> {
    (2usize..=8).prop_flat_map(move |n| (Just(n), prop::collection::vec(-1.0..1.0f64, chunks * (n + 1))))
}

fn point(n: usize, raw: &[f64]) -> Vector {
    hyper_point(&block(raw, n + 1, 0)[..n])
}

fn mink_len(v: &Vector) -> f64 {
    (-minkowski(v, v).unwrap()).max(0.0).sqrt()
}

/// Stage of geodesic length `len` in the direction of `v`.
fn with_length(v: Vector, len: f64) -> Vector {
    let l = mink_len(&v);
    if l < 1e-12 {
        return v;
    }
    v.scaled(len / l)
}

proptest! {
    #[test]
    fn lts_axioms_at_origin((n, raw) in dims_and_raw(5)) {
        let vs: Vec<Vector> = (0..5)
            .map(|k| with_norm(at_pole(&block(&raw, n + 1, k)[..n]), 1.0))
            .collect();
        let (r1, r2, r3) =
            lts_axiom_residuals(hyper_triple, &vs[0], &vs[1], &vs[2], &vs[3], &vs[4]);
        prop_assert!(r1 <= 1e-13);
        prop_assert!(r2 <= 1e-12, "r2 = {r2:e}");
        prop_assert!(r3 <= 1e-12, "r3 = {r3:e}");
    }

    #[test]
    fn lts_axioms_away_from_origin((n, raw) in dims_and_raw(6)) {
        let y = point(n, &raw);
        let vs: Vec<Vector> = (1..6)
            .map(|k| with_length(hyper_tangent(&y, block(&raw, n + 1, k)), 1.0))
            .collect();
        let (r1, r2, r3) =
            lts_axiom_residuals(hyper_triple, &vs[0], &vs[1], &vs[2], &vs[3], &vs[4]);
        let scale = vs.iter().map(|v| v.norm()).fold(1.0, f64::max);
        prop_assert!(r1 <= 1e-12 * scale.powi(3));
        prop_assert!(r2 <= 1e-12 * scale.powi(3), "r2 = {r2:e}");
        prop_assert!(r3 <= 1e-12 * scale.powi(5), "r3 = {r3:e}");
    }

    #[test]
    fn triple_matches_hat_commutators((n, raw) in dims_and_raw(4)) {
        let y = point(n, &raw);
        let u = hyper_tangent(&y, block(&raw, n + 1, 1));
        let v = hyper_tangent(&y, block(&raw, n + 1, 2));
        let w = hyper_tangent(&y, block(&raw, n + 1, 3));
        let oracle = triple_bracket_oracle(|x| hyper_hat(&y, x), &y, &u, &v, &w);
        let scale = [&u, &v, &w].iter().map(|x| x.norm()).fold(1.0, f64::max) * y.norm();
        prop_assert!(close(&hyper_triple(&u, &v, &w), &oracle, 1e-12 * scale.powi(3)));
    }

    #[test]
    fn exp_matches_matrix_exponential((n, raw) in dims_and_raw(2), len in 0.0..2.0f64) {
        let y = point(n, &raw);
        let v = with_length(hyper_tangent(&y, block(&raw, n + 1, 1)), len);
        let oracle = mat_exp(&hyper_hat(&y, &v)).unwrap().matvec(&y);
        let got = hyper_exp(&y, &v).unwrap();
        prop_assert!(close(&got, &oracle, 1e-12 * got.norm().max(1.0)));
    }

    #[test]
    fn dexpinv_matches_series_of_commutators((n, raw) in dims_and_raw(3), len in 0.0..1.5f64) {
        let y = point(n, &raw);
        let theta = with_length(hyper_tangent(&y, block(&raw, n + 1, 1)), len);
        let w = with_length(hyper_tangent(&y, block(&raw, n + 1, 2)), 1.0);
        let series = DexpinvSeries::new(40);
        let oracle = series.apply(
            |x: &Vector| triple_bracket_oracle(|z| hyper_hat(&y, z), &y, x, &theta, &theta),
            &w,
        );
        let got = hyper_dexpinv(&theta, &w).unwrap();
        prop_assert!(close(&got, &oracle, 1e-12 * w.norm().max(1.0)));
    }

    #[test]
    fn dexp_is_the_transported_differential((n, raw) in dims_and_raw(3), len in 0.1..2.0f64) {
        let y = point(n, &raw);
        let theta = with_length(hyper_tangent(&y, block(&raw, n + 1, 1)), len);
        let w = hyper_tangent(&y, block(&raw, n + 1, 2));
        let eps = 1e-5;
        let plus = hyper_exp(&y, &Vector::lincomb(1.0, &theta, eps, &w)).unwrap();
        let minus = hyper_exp(&y, &Vector::lincomb(1.0, &theta, -eps, &w)).unwrap();
        let derivative = plus.sub(&minus).scaled(0.5 / eps);
        let mid = hyper_midpoint(&y, &theta).unwrap();
        let trivialized = hyper_transport_inv(&mid, &derivative);
        let scale = w.norm().max(1.0) * y.norm();
        prop_assert!(close(&hyper_dexp(&theta, &w).unwrap(), &trivialized, 1e-7 * scale));
        let back = hyper_dexpinv(&theta, &trivialized).unwrap();
        prop_assert!(close(&back, &w, 1e-7 * scale));
    }

    #[test]
    fn exp_is_quadratic_representation_of_midpoint((n, raw) in dims_and_raw(2), len in 0.0..3.0f64) {
        let y = point(n, &raw);
        let theta = with_length(hyper_tangent(&y, block(&raw, n + 1, 1)), len);
        let end = hyper_exp(&y, &theta).unwrap();
        let s = hyper_midpoint(&y, &theta).unwrap();
        let via_q = hyper_sigma(&s).matmul(&hyper_sigma(&y)).matvec(&y);
        prop_assert!(close(&via_q, &end, 1e-12 * end.norm()));
    }

    #[test]
    fn quadratic_representation_is_an_isometry((n, raw) in dims_and_raw(3)) {
        let s = point(n, &raw);
        let q = hyper_quadratic(&s);
        prop_assert!(q.sub(&hyper_quadratic_block(&s)).max_abs() <= 1e-12 * q.max_abs());
        let a = vector(block(&raw, n + 1, 1));
        let b = vector(block(&raw, n + 1, 2));
        let before = minkowski(&a, &b).unwrap();
        let after = minkowski(&q.matvec(&a), &q.matvec(&b)).unwrap();
        prop_assert!((before - after).abs() <= 1e-12 * q.max_abs().powi(2));
        let o = Vector::unit(n + 1, n);
        let qo = q.matvec(&o);
        prop_assert!((minkowski(&qo, &qo).unwrap() - 1.0).abs() <= 1e-12 * qo.norm().powi(2));
    }

    #[test]
    fn boosts_satisfy_the_polar_statement((n, raw) in dims_and_raw(1)) {
        let space = &raw[..n];
        let s = lorentz_boost(space).unwrap();
        prop_assert!(s.asymmetry() <= 1e-14);
        let (eigs, _) = sym_eig(&SymMatrix::from_symmetrized(&s)).unwrap();
        let det: f64 = eigs.iter().product();
        prop_assert!((det - 1.0).abs() <= 1e-12);
        prop_assert!(eigs.iter().all(|&l| l > 0.0));
        let so = s.matvec(&Vector::unit(n + 1, n));
        prop_assert!(close(&so, &hyper_point(space), 1e-14));
        let q = hyper_quadratic_block(&so);
        prop_assert!(s.matmul(&s).sub(&q).max_abs() <= 1e-12 * q.max_abs());
    }

    #[test]
    fn transport_is_an_isometry_into_the_base((n, raw) in dims_and_raw(3), len in 0.0..3.0f64) {
        let y = point(n, &raw);
        let theta = with_length(hyper_tangent(&y, block(&raw, n + 1, 1)), len);
        let end = hyper_exp(&y, &theta).unwrap();
        let w = hyper_tangent(&end, block(&raw, n + 1, 2));
        let s = hyper_midpoint(&y, &theta).unwrap();
        let back = hyper_transport_inv(&s, &w);
        let scale = w.norm().powi(2).max(1.0) * end.norm();
        prop_assert!((minkowski(&back, &back).unwrap() - minkowski(&w, &w).unwrap()).abs() <= 1e-12 * scale);
        prop_assert!(minkowski(&back, &y).unwrap().abs() <= 1e-12 * scale);
    }

    #[test]
    fn dexpinv_contracts_the_normal_part((n, raw) in dims_and_raw(3), len in 0.0..10.0f64) {
        let y = point(n, &raw);
        let theta = with_length(hyper_tangent(&y, block(&raw, n + 1, 1)), len);
        let w = hyper_tangent(&y, block(&raw, n + 1, 2));
        let d = hyper_dexpinv(&theta, &w).unwrap();
        prop_assert!(mink_len(&d) <= mink_len(&w) * (1.0 + 1e-12) + 1e-14);
    }

    #[test]
    fn minkowski_is_symmetric_and_bilinear(a in prop::collection::vec(-5.0..5.0f64, 4), b in prop::collection::vec(-5.0..5.0f64, 4), t in -3.0..3.0f64) {
        let (a, b) = (vector(&a), vector(&b));
        prop_assert_eq!(minkowski(&a, &b).unwrap(), minkowski(&b, &a).unwrap());
        let lhs = minkowski(&a.scaled(t), &b).unwrap();
        prop_assert!((lhs - t * minkowski(&a, &b).unwrap()).abs() <= 1e-12 * (1.0 + lhs.abs()));
    }
}

#[test]
fn six_term_series_matches_closed_form() {
    let theta = vector(&[0.18, -0.24, 0.0]);
    let w = vector(&[0.7, 0.4, 0.0]);
    let series = DexpinvSeries::new(6).apply(|x| hyper_ad2(&theta, x), &w);
    let closed = hyper_dexpinv(&theta, &w).unwrap();
    assert!(series.sub(&closed).max_abs() < 1e-9);
}

#[test]
fn bracket_is_the_negative_of_the_spherical_one() {
    use symmflow_core::sphere::sphere_triple;
    let u = vector(&[0.3, -0.2, 0.5, 0.0]);
    let v = vector(&[-0.7, 0.1, 0.2, 0.0]);
    let w = vector(&[0.4, 0.4, -0.9, 0.0]);
    assert!(close(&hyper_triple(&u, &v, &w), &sphere_triple(&u, &v, &w).scaled(-1.0), 1e-16));
    let o = vector(&[0.0, 0.0, 1.0]);
    let e1 = vector(&[1.0, 0.0, 0.0]);
    let e2 = vector(&[0.0, 1.0, 0.0]);
    let oracle = triple_bracket_oracle(|x| hyper_hat(&o, x), &o, &e2, &e1, &e1);
    assert!(close(&oracle, &e2, 1e-15));
}
