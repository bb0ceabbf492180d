//! Small dense real linear algebra.
//!
//! Everything here is sized for the geometries in this crate: vectors of a
//! few dozen entries and square matrices up to roughly 50×50. Matrices are
//! stored row-major.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// A fixed-length real vector.
#[derive(Clone, PartialEq, Default)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(entries: Vec<f64>) -> Self {
        Vector(entries)
    }

    pub fn zeros(len: usize) -> Self {
        Vector(vec![0.0; len])
    }

    /// The `i`-th standard basis vector of length `len`.
    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.0[i] = 1.0;
        v
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        debug_assert_eq!(self.len(), other.len());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// `self += alpha * x`
    pub fn axpy(&mut self, alpha: f64, x: &Vector) {
        debug_assert_eq!(self.len(), x.len());
        for (a, b) in self.0.iter_mut().zip(&x.0) {
            *a += alpha * b;
        }
    }

    pub fn scaled(&self, alpha: f64) -> Vector {
        Vector(self.0.iter().map(|x| alpha * x).collect())
    }

    pub fn add(&self, other: &Vector) -> Vector {
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    /// `alpha * self + beta * other`
    pub fn lincomb(alpha: f64, x: &Vector, beta: f64, y: &Vector) -> Vector {
        Vector(
            x.0.iter()
                .zip(&y.0)
                .map(|(a, b)| alpha * a + beta * b)
                .collect(),
        )
    }

    /// The outer product `self * otherᵀ`.
    pub fn outer(&self, other: &Vector) -> Matrix {
        Matrix::from_fn(self.len(), other.len(), |i, j| self.0[i] * other.0[j])
    }
}

impl From<Vec<f64>> for Vector {
    fn from(v: Vec<f64>) -> Self {
        Vector(v)
    }
}

impl Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for Vector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.0).finish()
    }
}

/// A dense `rows × cols` real matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { diag[i] } else { 0.0 })
    }

    /// Builds a matrix from row slices. Panics if the rows are ragged.
    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self::from_fn(r, c, |i, j| rows[i][j])
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn diagonal(&self) -> Vector {
        Vector::new((0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect())
    }

    pub fn column(&self, j: usize) -> Vector {
        Vector::new((0..self.rows).map(|i| self[(i, j)]).collect())
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &Vector) -> Vector {
        assert_eq!(self.cols, v.len(), "matvec dimension mismatch");
        Vector::new(
            (0..self.rows)
                .map(|i| {
                    self.data[i * self.cols..(i + 1) * self.cols]
                        .iter()
                        .zip(v.iter())
                        .map(|(a, b)| a * b)
                        .sum()
                })
                .collect(),
        )
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scaled(&self, alpha: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| alpha * x).collect(),
        }
    }

    /// `self += alpha * x`
    pub fn axpy(&mut self, alpha: f64, x: &Matrix) {
        assert_eq!((self.rows, self.cols), (x.rows, x.cols));
        for (a, b) in self.data.iter_mut().zip(&x.data) {
            *a += alpha * b;
        }
    }

    /// The commutator `self·other − other·self`.
    pub fn commutator(&self, other: &Matrix) -> Matrix {
        self.matmul(other).sub(&other.matmul(self))
    }

    /// `(self + selfᵀ) / 2`
    pub fn symmetrized(&self) -> Matrix {
        assert!(self.is_square());
        Matrix::from_fn(self.rows, self.cols, |i, j| {
            0.5 * (self[(i, j)] + self[(j, i)])
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `max |a_ij − a_ji|`
    pub fn asymmetry(&self) -> f64 {
        let mut r = 0.0f64;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                r = r.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        r
    }

    fn zip_with(&self, other: &Matrix, f: impl Fn(f64, f64) -> f64) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        }
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[f64]> = self.data.chunks(self.cols.max(1)).collect();
        f.debug_list().entries(rows).finish()
    }
}

/// A square matrix with `a_ij == a_ji` exactly.
#[derive(Clone, PartialEq, Debug)]
pub struct SymMatrix(Matrix);

impl SymMatrix {
    /// Accepts `m` only if it is square and exactly symmetric.
    pub fn new(m: Matrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.rows(),
                found: m.cols(),
            });
        }
        let residual = m.asymmetry();
        if residual != 0.0 {
            return Err(Error::SymmetryViolation { residual });
        }
        Ok(SymMatrix(m))
    }

    /// Averages `m` with its transpose.
    pub fn from_symmetrized(m: &Matrix) -> Self {
        SymMatrix(m.symmetrized())
    }

    pub fn identity(n: usize) -> Self {
        SymMatrix(Matrix::identity(n))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        SymMatrix(Matrix::from_diagonal(diag))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }
}

pub const JACOBI_TOLERANCE: f64 = 1e-14;
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// Returns eigenvalues in ascending order and the matrix whose columns are
/// the matching orthonormal eigenvectors, so `A = V diag(λ) Vᵀ`.
pub fn sym_eig(a: &SymMatrix) -> Result<(Vector, Matrix)> {
    let n = a.dim();
    let mut w = a.as_matrix().clone();
    if !w.is_finite() {
        return Err(Error::NumericalFailure(
            "non-finite entry in eigenvalue input".into(),
        ));
    }
    let mut v = Matrix::identity(n);
    let scale = w.frobenius();

    let off_norm = |m: &Matrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += 2.0 * m[(i, j)] * m[(i, j)];
            }
        }
        s.sqrt()
    };

    let mut converged = scale == 0.0;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if converged || off_norm(&w) <= JACOBI_TOLERANCE * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = w[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (w[(q, q)] - w[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = w[(k, p)];
                    let akq = w[(k, q)];
                    w[(k, p)] = c * akp - s * akq;
                    w[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = w[(p, k)];
                    let aqk = w[(q, k)];
                    w[(p, k)] = c * apk - s * aqk;
                    w[(q, k)] = s * apk + c * aqk;
                }
                w[(p, q)] = 0.0;
                w[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged && off_norm(&w) > JACOBI_TOLERANCE * scale {
        return Err(Error::NumericalFailure(format!(
            "Jacobi eigenvalue iteration did not converge in {JACOBI_MAX_SWEEPS} sweeps"
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| w[(i, i)].total_cmp(&w[(j, j)]));
    let values = Vector::new(order.iter().map(|&i| w[(i, i)]).collect());
    let vectors = Matrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok((values, vectors))
}

/// `V diag(f(λ)) Vᵀ` for a symmetric eigendecomposition.
fn spectral_apply(values: &Vector, vectors: &Matrix, f: impl Fn(f64) -> f64) -> Matrix {
    let n = values.len();
    let fl: Vec<f64> = values.iter().map(|&l| f(l)).collect();
    let mut out = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let mut s = 0.0;
            for k in 0..n {
                s += vectors[(i, k)] * fl[k] * vectors[(j, k)];
            }
            out[(i, j)] = s;
            out[(j, i)] = s;
        }
    }
    out
}

const TAYLOR_TERMS: usize = 16;
const SCALED_NORM: f64 = 0.5;

/// Matrix exponential by scaling and squaring of a fixed-order Taylor series.
pub fn mat_exp(a: &Matrix) -> Result<Matrix> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            found: a.cols(),
        });
    }
    let n = a.rows();
    let norm = a.norm1();
    if !norm.is_finite() {
        return Err(Error::NumericalFailure(
            "non-finite entry in matrix exponential input".into(),
        ));
    }
    let squarings = if norm > SCALED_NORM {
        (norm / SCALED_NORM).log2().ceil() as i32
    } else {
        0
    };
    let b = a.scaled(0.5f64.powi(squarings));

    // Horner form: I + B(I + B/2(I + B/3(...)))
    let mut acc = Matrix::identity(n);
    for k in (1..=TAYLOR_TERMS).rev() {
        let mut next = b.matmul(&acc).scaled(1.0 / k as f64);
        for i in 0..n {
            next[(i, i)] += 1.0;
        }
        acc = next;
    }
    for _ in 0..squarings {
        acc = acc.matmul(&acc);
    }
    Ok(acc)
}

fn pd_threshold(values: &Vector) -> f64 {
    1e-13 * values.max_abs()
}

pub(crate) fn check_positive(values: &Vector) -> Result<()> {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let threshold = pd_threshold(values);
    if values.is_empty() || min <= threshold || !min.is_finite() {
        return Err(Error::NonPositiveDefinite {
            min_eigenvalue: min,
            threshold,
        });
    }
    Ok(())
}

/// The unique symmetric positive definite square root.
pub fn spd_sqrt(a: &SymMatrix) -> Result<SymMatrix> {
    spd_sqrt_and_inverse(a).map(|(root, _)| root)
}

/// The SPD square root and its inverse from one eigendecomposition.
pub fn spd_sqrt_and_inverse(a: &SymMatrix) -> Result<(SymMatrix, SymMatrix)> {
    if a.dim() == 0 {
        return Err(Error::NonPositiveDefinite {
            min_eigenvalue: f64::NAN,
            threshold: 0.0,
        });
    }
    let (values, vectors) = sym_eig(a)?;
    check_positive(&values)?;
    let root = spectral_apply(&values, &vectors, f64::sqrt);
    let inv_root = spectral_apply(&values, &vectors, |l| 1.0 / l.sqrt());
    Ok((SymMatrix(root), SymMatrix(inv_root)))
}

/// Polar decomposition `A = Q P` with `Q` orthogonal and `P` SPD.
pub fn polar_decomposition(a: &Matrix) -> Result<(Matrix, SymMatrix)> {
    let gram = SymMatrix::from_symmetrized(&a.transpose().matmul(a));
    let (p, p_inv) = spd_sqrt_and_inverse(&gram)?;
    let q = a.matmul(p_inv.as_matrix());
    Ok((q, p))
}

/// The Minkowski form `y_t z_t − y_s·z_s`, with the time coordinate last.
pub fn minkowski(y: &Vector, z: &Vector) -> Result<f64> {
    if y.len() != z.len() {
        return Err(Error::DimensionMismatch {
            expected: y.len(),
            found: z.len(),
        });
    }
    if y.is_empty() {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: 0,
        });
    }
    Ok(minkowski_unchecked(y, z))
}

pub(crate) fn minkowski_unchecked(y: &Vector, z: &Vector) -> f64 {
    let n = y.len() - 1;
    let space: f64 = y.as_slice()[..n]
        .iter()
        .zip(&z.as_slice()[..n])
        .map(|(a, b)| a * b)
        .sum();
    y[n] * z[n] - space
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lcg_matrix(n: usize, seed: u64) -> Matrix {
        let mut state = seed;
        Matrix::from_fn(n, n, |_, _| {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        })
    }

    fn random_sym(n: usize, seed: u64) -> SymMatrix {
        SymMatrix::from_symmetrized(&lcg_matrix(n, seed))
    }

    fn orthogonality_defect(v: &Matrix) -> f64 {
        v.transpose()
            .matmul(v)
            .sub(&Matrix::identity(v.rows()))
            .max_abs()
    }

    #[test]
    fn eig_of_diagonal_sorts_ascending() {
        let (l, v) = sym_eig(&SymMatrix::from_diagonal(&[3.0, 1.0])).unwrap();
        assert_eq!(l.as_slice(), &[1.0, 3.0]);
        assert_eq!(v, Matrix::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]));
    }

    #[test]
    fn eig_of_identity() {
        let (l, v) = sym_eig(&SymMatrix::identity(3)).unwrap();
        assert_eq!(l.as_slice(), &[1.0, 1.0, 1.0]);
        assert!(orthogonality_defect(&v) <= 1e-12);
    }

    #[test]
    fn eig_reconstructs_random_symmetric() {
        for (n, seed) in [(5, 1), (8, 2), (12, 3)] {
            let a = random_sym(n, seed);
            let (l, v) = sym_eig(&a).unwrap();
            let recon = v
                .matmul(&Matrix::from_diagonal(l.as_slice()))
                .matmul(&v.transpose());
            let scale = a.as_matrix().max_abs();
            assert!(recon.sub(a.as_matrix()).max_abs() <= 1e-12 * scale);
            assert!(orthogonality_defect(&v) <= 1e-12);
            assert!(l.as_slice().windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn eig_rejects_non_finite() {
        let a = SymMatrix::from_diagonal(&[1.0, f64::NAN]);
        assert!(matches!(sym_eig(&a), Err(Error::NumericalFailure(_))));
    }

    #[test]
    fn exp_of_zero_and_diagonal() {
        assert_eq!(mat_exp(&Matrix::zeros(3, 3)).unwrap(), Matrix::identity(3));
        let e = mat_exp(&Matrix::from_diagonal(&[1.0, 2.0])).unwrap();
        let expected = Matrix::from_diagonal(&[1f64.exp(), 2f64.exp()]);
        assert!(e.sub(&expected).max_abs() <= 1e-13 * expected.max_abs());
    }

    #[test]
    fn exp_matches_rodrigues_for_rotation_generator() {
        // hat map of v at the north pole, |v| = pi/3
        let phi = std::f64::consts::FRAC_PI_3;
        let v = Vector::new(vec![phi * 0.6, phi * 0.8, 0.0]);
        let o = Vector::unit(3, 2);
        let hat = v.outer(&o).sub(&o.outer(&v));
        let half = phi / 2.0;
        let rodrigues = Matrix::identity(3)
            .add(&hat.scaled(phi.sin() / phi))
            .add(&hat.matmul(&hat).scaled(0.5 * (half.sin() / half).powi(2)));
        let e = mat_exp(&hat).unwrap();
        assert!(e.sub(&rodrigues).max_abs() <= 1e-13);
    }

    #[test]
    fn exp_inverse_pair() {
        for seed in 0..10 {
            let a = lcg_matrix(4, seed);
            let a = a.scaled(5.0 / a.frobenius());
            let prod = mat_exp(&a.scaled(-1.0))
                .unwrap()
                .matmul(&mat_exp(&a).unwrap());
            assert!(prod.sub(&Matrix::identity(4)).max_abs() <= 1e-12);
        }
    }

    #[test]
    fn exp_rejects_rectangular() {
        assert!(matches!(
            mat_exp(&Matrix::zeros(2, 3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn sqrt_simple_cases() {
        let r = spd_sqrt(&SymMatrix::from_diagonal(&[4.0, 9.0])).unwrap();
        assert!(r
            .as_matrix()
            .sub(&Matrix::from_diagonal(&[2.0, 3.0]))
            .max_abs()
            <= 1e-15);
        let r = spd_sqrt(&SymMatrix::identity(4)).unwrap();
        assert_eq!(r.as_matrix(), &Matrix::identity(4));
    }

    #[test]
    fn sqrt_of_random_spd() {
        let b = lcg_matrix(4, 7);
        let a = SymMatrix::from_symmetrized(&b.matmul(&b.transpose()).add(&Matrix::identity(4)));
        let r = spd_sqrt(&a).unwrap();
        let scale = a.as_matrix().max_abs();
        let sq = r.as_matrix().matmul(r.as_matrix());
        assert!(sq.sub(a.as_matrix()).max_abs() <= 1e-11 * scale);
        let comm = r.as_matrix().commutator(a.as_matrix());
        assert!(comm.max_abs() <= 1e-11 * scale * scale);
        let (l, _) = sym_eig(&r).unwrap();
        assert!(l[0] > 0.0);
    }

    #[test]
    fn sqrt_rejects_indefinite() {
        let err = spd_sqrt(&SymMatrix::from_diagonal(&[1.0, -1.0])).unwrap_err();
        assert!(matches!(err, Error::NonPositiveDefinite { .. }));
        let err = spd_sqrt(&SymMatrix::from_diagonal(&[1.0, 1e-15])).unwrap_err();
        assert!(matches!(err, Error::NonPositiveDefinite { .. }));
    }

    #[test]
    fn polar_factors() {
        let a = lcg_matrix(3, 11).add(&Matrix::identity(3).scaled(2.0));
        let (q, p) = polar_decomposition(&a).unwrap();
        assert!(orthogonality_defect(&q) <= 1e-12);
        assert!(q.matmul(p.as_matrix()).sub(&a).max_abs() <= 1e-12);
    }

    #[test]
    fn minkowski_examples() {
        let t = Vector::new(vec![0.0, 0.0, 1.0]);
        assert_eq!(minkowski(&t, &t).unwrap(), 1.0);
        let x = Vector::new(vec![1.0, 0.0, 0.0]);
        assert_eq!(minkowski(&x, &x).unwrap(), -1.0);
        let y = Vector::new(vec![1f64.sinh(), 0.0, 1f64.cosh()]);
        assert!((minkowski(&y, &y).unwrap() - 1.0).abs() <= 1e-15);
        assert!(matches!(
            minkowski(&t, &Vector::zeros(2)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn sym_matrix_requires_exact_symmetry() {
        let m = Matrix::from_rows(&[&[1.0, 2.0], &[2.0 + 1e-15, 1.0]]);
        assert!(matches!(
            SymMatrix::new(m.clone()),
            Err(Error::SymmetryViolation { .. })
        ));
        assert!(SymMatrix::new(m.symmetrized()).is_ok());
    }
}
