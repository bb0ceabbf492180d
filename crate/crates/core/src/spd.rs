//! Symmetric positive definite matrices with `x·y = x y⁻¹ x`, base point
//! `o = I` and tangent space the symmetric matrices.
//!
//! Steps work at `o`: a point `y = s²` is pulled back by `Q_s⁻¹ = s⁻¹ · s⁻¹`,
//! so stages are symmetric matrices and `Exp` is the matrix exponential.

use crate::error::{Error, Result};
use crate::linalg::{
    check_positive, mat_exp, polar_decomposition, spd_sqrt, spd_sqrt_and_inverse, sym_eig,
    Matrix, SymMatrix,
};
use crate::series::DexpinvSeries;
use crate::space::{
    finish_point, integrate_with, solve_stages, weighted_increment, FieldProbe, StepOptions,
    StepRecord, SymmetricSpace, Tangent,
};
use crate::tableau::ButcherTableau;

/// Relative skew part tolerated in a field value.
pub const FIELD_SYMMETRY_TOLERANCE: f64 = 1e-10;
const POINT_SYMMETRY_TOLERANCE: f64 = 1e-12;
/// Largest allowed gap between the reused polar root and a fresh one.
pub const ROOT_REUSE_TOLERANCE: f64 = 1e-10;

/// An SPD matrix. May carry round-off asymmetry up to `1e-12`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdPoint(Matrix);

impl SpdPoint {
    pub fn new(y: Matrix) -> Result<Self> {
        if !y.is_square() {
            return Err(Error::DimensionMismatch {
                expected: y.rows(),
                found: y.cols(),
            });
        }
        let residual = y.asymmetry();
        if !(residual <= POINT_SYMMETRY_TOLERANCE * y.max_abs().max(1.0)) {
            return Err(Error::SymmetryViolation { residual });
        }
        let (values, _) = sym_eig(&SymMatrix::from_symmetrized(&y))?;
        check_positive(&values)?;
        Ok(SpdPoint(y))
    }

    pub fn identity(n: usize) -> Self {
        SpdPoint(Matrix::identity(n))
    }

    pub(crate) fn from_raw(y: Matrix) -> Self {
        SpdPoint(y)
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

    pub fn to_sym(&self) -> SymMatrix {
        SymMatrix::from_symmetrized(&self.0)
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(sym_eig(&self.to_sym())?.0.into_vec())
    }
}

/// `Q_s y = s y s`, symmetrized.
pub fn spd_quadratic(s: &Matrix, y: &Matrix) -> Result<Matrix> {
    if s.rows() != y.rows() || !s.is_square() || !y.is_square() {
        return Err(Error::DimensionMismatch {
            expected: s.rows(),
            found: y.rows(),
        });
    }
    Ok(s.matmul(y).matmul(s).symmetrized())
}

/// `[V, W, Z] = ¼ [[V, W], Z]`
pub fn spd_triple(v: &Matrix, w: &Matrix, z: &Matrix) -> Matrix {
    v.commutator(w).commutator(z).scaled(0.25)
}

/// `ad²_θ W = ¼ [[W, θ], θ]`
pub fn spd_ad2(theta: &Matrix, w: &Matrix) -> Matrix {
    spd_triple(w, theta, theta)
}

/// The square root of the next point: the polar part of any `A` with
/// `AᵀA = y`, which is the unique SPD root.
pub fn spd_sqrt_update(y_next: &SpdPoint) -> Result<SymMatrix> {
    spd_sqrt(&y_next.to_sym())
}

/// How the square root `s_ℓ = √y_ℓ` is obtained on each step.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum SqrtPolicy {
    /// Eigendecomposition of every `y_ℓ`.
    #[default]
    Recompute,
    /// `s_{ℓ+1} = P` from the polar decomposition `exp(θ/2) s_ℓ = U P`,
    /// checked against a fresh root.
    PolarReuse,
}

/// A point together with its square root and the inverse root.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdFrame {
    pub y: SpdPoint,
    pub s: Matrix,
    pub s_inv: Matrix,
}

impl SpdFrame {
    pub fn new(y: &SpdPoint) -> Result<Self> {
        let (s, s_inv) = spd_sqrt_and_inverse(&y.to_sym())?;
        Ok(SpdFrame {
            y: y.clone(),
            s: s.into_matrix(),
            s_inv: s_inv.into_matrix(),
        })
    }
}

/// `exp(−θ/2)` for a stage `θ`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfExp(Matrix);

fn check_field_symmetry(f: &Matrix) -> Result<Matrix> {
    let residual = f.sub(&f.transpose()).frobenius();
    if residual > FIELD_SYMMETRY_TOLERANCE * f.frobenius() {
        return Err(Error::SymmetryViolation { residual });
    }
    Ok(f.symmetrized())
}

fn check_dim(n: usize, m: &Matrix) -> Result<()> {
    if m.rows() != n || m.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: m.rows(),
        });
    }
    Ok(())
}

/// `n × n` SPD matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdManifold {
    n: usize,
    series: DexpinvSeries,
    sqrt_policy: SqrtPolicy,
}

impl SpdManifold {
    /// Uses the one-term `dExp⁻¹` series.
    pub fn new(n: usize) -> Self {
        SpdManifold {
            n,
            series: DexpinvSeries::for_order(4),
            sqrt_policy: SqrtPolicy::Recompute,
        }
    }

    pub fn with_series(mut self, series: DexpinvSeries) -> Self {
        self.series = series;
        self
    }

    pub fn with_sqrt_policy(mut self, policy: SqrtPolicy) -> Self {
        self.sqrt_policy = policy;
        self
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn series(&self) -> &DexpinvSeries {
        &self.series
    }

    fn dexpinv(&self, theta: &Matrix, w: &Matrix) -> Matrix {
        self.series.apply(|x| spd_ad2(theta, x), w).symmetrized()
    }
}

impl SymmetricSpace for SpdManifold {
    type Point = SpdPoint;
    type Tangent = Matrix;
    type Base = SpdFrame;
    type Midpoint = HalfExp;

    fn base_at(&self, y: &SpdPoint) -> Result<SpdFrame> {
        check_dim(self.n, y.as_matrix())?;
        SpdFrame::new(y)
    }

    fn base_point(&self, base: &SpdFrame) -> SpdPoint {
        base.y.clone()
    }

    fn zero_tangent(&self, _base: &SpdFrame) -> Matrix {
        Matrix::zeros(self.n, self.n)
    }

    fn exp_at(&self, base: &SpdFrame, v: &Matrix) -> Result<SpdPoint> {
        let e = mat_exp(v)?.symmetrized();
        Ok(SpdPoint::from_raw(spd_quadratic(&base.s, &e)?))
    }

    fn exp_half_at(&self, _base: &SpdFrame, v: &Matrix, _full: &SpdPoint) -> Result<HalfExp> {
        Ok(HalfExp(mat_exp(&v.scaled(-0.5))?.symmetrized()))
    }

    fn transport_inv_at(
        &self,
        base: &SpdFrame,
        _theta: &Matrix,
        mid: &HalfExp,
        w: &Matrix,
    ) -> Result<Matrix> {
        let pulled = self.pull_back_at(base, w)?;
        spd_quadratic(&mid.0, &pulled)
    }

    fn pull_back_at(&self, base: &SpdFrame, w: &Matrix) -> Result<Matrix> {
        let w = check_field_symmetry(w)?;
        spd_quadratic(&base.s_inv, &w)
    }

    fn dexpinv_at(&self, _base: &SpdFrame, theta: &Matrix, w: &Matrix) -> Result<Matrix> {
        Ok(self.dexpinv(theta, w))
    }

    fn triple(&self, _base: &SpdFrame, u: &Matrix, v: &Matrix, w: &Matrix) -> Matrix {
        spd_triple(u, v, w)
    }

    fn project_tangent(&self, _at: &SpdPoint, w: &Matrix) -> Matrix {
        w.symmetrized()
    }

    fn invariant_residual(&self, y: &SpdPoint) -> f64 {
        y.as_matrix().asymmetry()
    }

    fn renormalize(&self, y: &SpdPoint) -> SpdPoint {
        SpdPoint::from_raw(y.as_matrix().symmetrized())
    }
}

/// One step of the canonical SPD integrator from a prepared frame.
///
/// Returns the next point, its record, and with [`SqrtPolicy::PolarReuse`]
/// the frame for the following step.
pub fn csgi_step_frame(
    space: &SpdManifold,
    tableau: &ButcherTableau,
    field: &dyn Fn(&SpdPoint) -> Matrix,
    frame: &SpdFrame,
    h: f64,
    options: StepOptions,
) -> Result<(SpdPoint, StepRecord, Option<SpdFrame>)> {
    let n = space.n;
    check_dim(n, frame.y.as_matrix())?;
    let (s, s_inv) = (&frame.s, &frame.s_inv);
    let project = |p: &SpdPoint, w: &Matrix| space.project_tangent(p, w);
    let project: &dyn Fn(&SpdPoint, &Matrix) -> Matrix = &project;
    let mut probe = FieldProbe::new(field, options.diagnostics.then_some(project));
    let zero = Matrix::zeros(n, n);

    let (k, thetas, iterations) = solve_stages(tableau, &zero, |theta| {
        if theta.is_exact_zero() {
            let f = check_field_symmetry(&probe.eval(&frame.y)?)?;
            return Ok(s_inv.matmul(&f).matmul(s_inv).scaled(h).symmetrized());
        }
        let half = mat_exp(&theta.scaled(0.5))?.symmetrized();
        let half_inv = mat_exp(&theta.scaled(-0.5))?.symmetrized();
        let a = half.matmul(s);
        let u = SpdPoint::from_raw(a.transpose().matmul(&a).symmetrized());
        let f = check_field_symmetry(&probe.eval(&u)?)?;
        let b = s_inv.matmul(&half_inv);
        let ki = b.transpose().matmul(&f).matmul(&b).scaled(h).symmetrized();
        Ok(space.dexpinv(theta, &ki))
    })?;

    let theta = weighted_increment(tableau, &zero, &k);
    let a = mat_exp(&theta.scaled(0.5))?.symmetrized().matmul(s);
    let raw = SpdPoint::from_raw(a.transpose().matmul(&a));
    let (next, residual, renormalized) = finish_point(space, raw)?;

    let next_frame = match space.sqrt_policy {
        SqrtPolicy::Recompute => None,
        SqrtPolicy::PolarReuse => {
            let (u, p) = polar_decomposition(&a)?;
            let p = p.into_matrix();
            let half_inv = mat_exp(&theta.scaled(-0.5))?.symmetrized();
            let p_inv = s_inv.matmul(&half_inv).matmul(&u).symmetrized();
            let fresh = spd_sqrt_update(&next)?;
            let gap = p.sub(fresh.as_matrix()).max_abs();
            if !(gap <= ROOT_REUSE_TOLERANCE * p.max_abs().max(1.0)) {
                return Err(Error::NumericalFailure(format!(
                    "reused square root differs from the fresh root by {gap:e}"
                )));
            }
            Some(SpdFrame {
                y: next.clone(),
                s: p,
                s_inv: p_inv,
            })
        }
    };

    Ok((
        next,
        StepRecord {
            step: 0,
            h,
            stage_norms: thetas.iter().map(Tangent::norm).collect(),
            residual,
            renormalized,
            fixed_point_iterations: iterations,
            discarded_normal: probe.discarded,
        },
        next_frame,
    ))
}

/// One step of the canonical SPD integrator from `y`.
pub fn csgi_step(
    space: &SpdManifold,
    tableau: &ButcherTableau,
    field: &dyn Fn(&SpdPoint) -> Matrix,
    y: &SpdPoint,
    h: f64,
    options: StepOptions,
) -> Result<(SpdPoint, StepRecord)> {
    check_dim(space.n, y.as_matrix())?;
    let frame = SpdFrame::new(y)?;
    csgi_step_frame(space, tableau, field, &frame, h, options).map(|(y, r, _)| (y, r))
}

/// `n_steps` steps of [`csgi_step`], honouring the square-root policy.
pub fn csgi_integrate(
    space: &SpdManifold,
    tableau: &ButcherTableau,
    field: &dyn Fn(&SpdPoint) -> Matrix,
    y0: &SpdPoint,
    h: f64,
    n_steps: usize,
    options: StepOptions,
) -> Result<(Vec<SpdPoint>, Vec<StepRecord>)> {
    check_dim(space.n, y0.as_matrix())?;
    let mut carried: Option<SpdFrame> = None;
    integrate_with(y0, n_steps, |y| {
        let frame = match carried.take() {
            Some(frame) => frame,
            None => SpdFrame::new(y)?,
        };
        let (next, record, next_frame) =
            csgi_step_frame(space, tableau, field, &frame, h, options)?;
        carried = next_frame;
        Ok((next, record))
    })
}
