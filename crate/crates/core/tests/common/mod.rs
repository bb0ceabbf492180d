#![allow(dead_code)]

use symmflow_core::hyperbolic::HyperPoint;
use symmflow_core::linalg::{minkowski, Matrix, Vector};

pub fn vector(xs: &[f64]) -> Vector {
    Vector::new(xs.to_vec())
}

pub fn close(a: &Vector, b: &Vector, tol: f64) -> bool {
    a.sub(b).max_abs() <= tol
}

/// A unit vector from raw coordinates; `None` when too close to zero.
pub fn unit(raw: &[f64]) -> Option<Vector> {
    let v = vector(raw);
    let n = v.norm();
    (n > 1e-3).then(|| v.scaled(1.0 / n))
}

/// Euclidean projection onto `T_y Sⁿ`.
pub fn sphere_tangent(y: &Vector, raw: &[f64]) -> Vector {
    let w = vector(raw);
    let mut out = w.clone();
    out.axpy(-w.dot(y), y);
    out
}

/// A tangent at the base point `e_n`: the raw space part with a zero appended.
pub fn at_pole(raw: &[f64]) -> Vector {
    let mut v = raw.to_vec();
    v.push(0.0);
    Vector::new(v)
}

pub fn hyper_point(space: &[f64]) -> Vector {
    HyperPoint::lift(space).into_vector()
}

/// Minkowski projection onto `T_y Hⁿ`.
pub fn hyper_tangent(y: &Vector, raw: &[f64]) -> Vector {
    let w = vector(raw);
    let mut out = w.clone();
    out.axpy(-minkowski(y, &w).unwrap(), y);
    out
}

pub fn symmetric(n: usize, raw: &[f64]) -> Matrix {
    Matrix::from_fn(n, n, |i, j| raw[i * n + j]).symmetrized()
}

pub fn skew(n: usize, raw: &[f64]) -> Matrix {
    let a = Matrix::from_fn(n, n, |i, j| raw[i * n + j]);
    a.sub(&a.transpose()).scaled(0.5)
}

/// The `k`-th chunk of length `len`.
pub fn block(raw: &[f64], len: usize, k: usize) -> &[f64] {
    &raw[k * len..(k + 1) * len]
}

/// `v` rescaled to Euclidean length `len` (zero stays zero).
pub fn with_norm(v: Vector, len: f64) -> Vector {
    let n = v.norm();
    if n < 1e-12 {
        return v;
    }
    v.scaled(len / n)
}
