//! Hyperbolic space `Hⁿ` as the upper sheet of `⟨z, z⟩ = 1` in Minkowski
//! space, `⟨y, z⟩ = y_t z_t − y_s·z_s`, with the time coordinate last.
//!
//! Tangent vectors at `y` are the `w` with `⟨w, y⟩ = 0`; they are spacelike,
//! so `φ = √(−⟨θ, θ⟩)` is the geodesic length of a stage `θ`.

use crate::error::{Error, Result};
use crate::linalg::{minkowski_unchecked as mink, spd_sqrt, Matrix, SymMatrix, Vector};
use crate::series::{
    phi_over_sinh_minus_one, sinh_over, sinh_over_minus_one, DexpinvPolicy,
};
use crate::space::{
    finish_point, integrate_with, solve_stages, weighted_increment, FieldProbe, StepOptions,
    StepRecord, SymmetricSpace, Tangent,
};
use crate::tableau::ButcherTableau;

/// Longest admissible stage; coordinates grow like `e^φ`.
pub const MAX_STAGE_LENGTH: f64 = 30.0;
const SPACELIKE_SLACK: f64 = 1e-12;
const POINT_TOLERANCE: f64 = 1e-10;

/// A point of the upper sheet: `|⟨y,y⟩ − 1| ≤ 1e-10` and `y_t > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperPoint(Vector);

impl HyperPoint {
    pub fn new(y: Vector) -> Result<Self> {
        if y.len() < 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: y.len(),
            });
        }
        let residual = (mink(&y, &y) - 1.0).abs();
        if !(residual <= POINT_TOLERANCE) || !(y[y.len() - 1] > 0.0) {
            return Err(Error::NumericalFailure(format!(
                "point is not on the upper hyperboloid sheet (residual {residual:e})"
            )));
        }
        Ok(HyperPoint(y))
    }

    /// The point `(s; √(1 + sᵀs))` over a space part `s`.
    pub fn lift(space: &[f64]) -> Self {
        let s2: f64 = space.iter().map(|x| x * x).sum();
        let mut v = space.to_vec();
        v.push((1.0 + s2).sqrt());
        HyperPoint(Vector::new(v))
    }

    /// The base point `o = (0, …, 0, 1)`.
    pub fn origin(n: usize) -> Self {
        HyperPoint(Vector::unit(n + 1, n))
    }

    pub(crate) fn from_raw(y: Vector) -> Self {
        HyperPoint(y)
    }

    pub fn as_vector(&self) -> &Vector {
        &self.0
    }

    pub fn into_vector(self) -> Vector {
        self.0
    }

    pub fn time(&self) -> f64 {
        self.0[self.0.len() - 1]
    }
}

/// `J = diag(−1, …, −1, +1)`
pub fn minkowski_metric(dim: usize) -> Matrix {
    let mut d = vec![-1.0; dim];
    d[dim - 1] = 1.0;
    Matrix::from_diagonal(&d)
}

/// Geodesic length `√(−⟨v,v⟩)` of a tangent vector.
pub fn tangent_length(v: &Vector) -> Result<f64> {
    let q = -mink(v, v);
    if q < -SPACELIKE_SLACK * v.dot(v) {
        return Err(Error::NonSpacelikeTangent(-q));
    }
    Ok(q.max(0.0).sqrt())
}

/// `Exp_base(v) = (sinh φ/φ) v + cosh φ · base`
pub fn hyper_exp(base: &Vector, v: &Vector) -> Result<Vector> {
    let phi = tangent_length(v)?;
    if phi == 0.0 {
        return Ok(base.clone());
    }
    Ok(Vector::lincomb(sinh_over(phi), v, phi.cosh(), base))
}

/// `Exp_base(θ/2) = (sinh(φ/2)/φ) θ + cosh(φ/2) · base`
pub fn hyper_midpoint(base: &Vector, theta: &Vector) -> Result<Vector> {
    let phi = tangent_length(theta)?;
    if phi == 0.0 {
        return Ok(base.clone());
    }
    let half = 0.5 * phi;
    Ok(Vector::lincomb(0.5 * sinh_over(half), theta, half.cosh(), base))
}

/// The point reflection `σ_s = 2s⟨s,·⟩ − I`.
pub fn hyper_sigma(s: &Vector) -> Matrix {
    let js = minkowski_metric(s.len()).matvec(s);
    let mut m = s.outer(&js).scaled(2.0);
    for i in 0..s.len() {
        m[(i, i)] -= 1.0;
    }
    m
}

/// `Q_s = σ_s σ_o` with `σ_o = J`.
pub fn hyper_quadratic(s: &Vector) -> Matrix {
    hyper_sigma(s).matmul(&minkowski_metric(s.len()))
}

/// The block form of `Q_s`:
/// `[[I + 2 s_s s_sᵀ, 2 s_t s_s], [2 s_t s_sᵀ, 1 + 2 s_sᵀ s_s]]`.
pub fn hyper_quadratic_block(s: &Vector) -> Matrix {
    let n = s.len() - 1;
    let st = s[n];
    let ss2: f64 = (0..n).map(|i| s[i] * s[i]).sum();
    Matrix::from_fn(n + 1, n + 1, |i, j| match (i == n, j == n) {
        (false, false) => (if i == j { 1.0 } else { 0.0 }) + 2.0 * s[i] * s[j],
        (false, true) => 2.0 * st * s[i],
        (true, false) => 2.0 * st * s[j],
        (true, true) => 1.0 + 2.0 * ss2,
    })
}

/// The Lorentz boost `S = [[√(I + s sᵀ), s], [sᵀ, √(1 + sᵀs)]]` moving `o` to
/// the point over the space part `s`.
pub fn lorentz_boost(space: &[f64]) -> Result<Matrix> {
    let n = space.len();
    let s = Vector::new(space.to_vec());
    let mut top = s.outer(&s);
    for i in 0..n {
        top[(i, i)] += 1.0;
    }
    let top = spd_sqrt(&SymMatrix::from_symmetrized(&top))?;
    let st = (1.0 + s.dot(&s)).sqrt();
    Ok(Matrix::from_fn(n + 1, n + 1, |i, j| match (i == n, j == n) {
        (false, false) => top.as_matrix()[(i, j)],
        (false, true) => space[i],
        (true, false) => space[j],
        (true, true) => st,
    }))
}

/// `Γ_θ⁻¹ w = w − 2 s⟨s, w⟩` with `s = Exp(θ/2)`.
pub fn hyper_transport_inv(mid: &Vector, w: &Vector) -> Vector {
    let mut out = w.clone();
    out.axpy(-2.0 * mink(mid, w), mid);
    out
}

/// `w + c π_θ^⊥ w` with the Minkowski projection
/// `π_θ^⊥ w = w − ⟨θ,w⟩/⟨θ,θ⟩ θ`.
fn scale_normal_part(theta: &Vector, phi: f64, coeff: f64, w: &Vector) -> Vector {
    let unit = theta.scaled(1.0 / phi); // ⟨unit, unit⟩ = −1
    let mut normal = w.clone();
    normal.axpy(mink(&unit, w), &unit);
    let mut out = w.clone();
    out.axpy(coeff, &normal);
    out
}

/// `dExp⁻¹_θ w = w + (φ/sinh φ − 1) π_θ^⊥ w`
pub fn hyper_dexpinv(theta: &Vector, w: &Vector) -> Result<Vector> {
    let phi = tangent_length(theta)?;
    if phi == 0.0 {
        return Ok(w.clone());
    }
    Ok(scale_normal_part(theta, phi, phi_over_sinh_minus_one(phi), w))
}

/// The forward map `dExp_θ w = w + (sinh φ/φ − 1) π_θ^⊥ w`.
pub fn hyper_dexp(theta: &Vector, w: &Vector) -> Result<Vector> {
    let phi = tangent_length(theta)?;
    if phi == 0.0 {
        return Ok(w.clone());
    }
    Ok(scale_normal_part(theta, phi, sinh_over_minus_one(phi), w))
}

/// `[u, v, w] = ⟨w, u⟩ v − ⟨v, w⟩ u`.
///
/// At `o` this is `((vᵀw) I − v wᵀ) u` in the Euclidean dot of the space
/// parts, the negative of the spherical bracket.
pub fn hyper_triple(u: &Vector, v: &Vector, w: &Vector) -> Vector {
    Vector::lincomb(mink(w, u), v, -mink(v, w), u)
}

/// `ad²_θ w = [w, θ, θ]`
pub fn hyper_ad2(theta: &Vector, w: &Vector) -> Vector {
    hyper_triple(w, theta, theta)
}

/// The hat map `v̂ = v⟨o,·⟩ − o⟨v,·⟩`, a boost generator with `v̂ o = v`.
pub fn hyper_hat(o: &Vector, v: &Vector) -> Matrix {
    let j = minkowski_metric(o.len());
    v.outer(&j.matvec(o)).sub(&o.outer(&j.matvec(v)))
}

fn reject_long_stage(phi: f64) -> Result<()> {
    if phi > MAX_STAGE_LENGTH {
        return Err(Error::StepTooLarge {
            norm: phi,
            limit: MAX_STAGE_LENGTH,
        });
    }
    Ok(())
}

/// `Hⁿ` with the chosen `dExp⁻¹` evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperboloid {
    n: usize,
    dexpinv: DexpinvPolicy,
}

impl Hyperboloid {
    pub fn new(n: usize) -> Self {
        Hyperboloid {
            n,
            dexpinv: DexpinvPolicy::ClosedForm,
        }
    }

    pub fn with_dexpinv(mut self, policy: DexpinvPolicy) -> Self {
        self.dexpinv = policy;
        self
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn check_len(&self, y: &Vector) -> Result<()> {
        if y.len() != self.n + 1 {
            return Err(Error::DimensionMismatch {
                expected: self.n + 1,
                found: y.len(),
            });
        }
        Ok(())
    }

    fn apply_dexpinv(&self, theta: &Vector, w: &Vector) -> Result<Vector> {
        match &self.dexpinv {
            DexpinvPolicy::ClosedForm => hyper_dexpinv(theta, w),
            DexpinvPolicy::Truncated(series) => Ok(series.apply(|x| hyper_ad2(theta, x), w)),
        }
    }
}

impl SymmetricSpace for Hyperboloid {
    type Point = HyperPoint;
    type Tangent = Vector;
    type Base = Vector;
    type Midpoint = Vector;

    fn base_at(&self, y: &HyperPoint) -> Result<Vector> {
        self.check_len(y.as_vector())?;
        Ok(y.as_vector().clone())
    }

    fn base_point(&self, base: &Vector) -> HyperPoint {
        HyperPoint::from_raw(base.clone())
    }

    fn zero_tangent(&self, base: &Vector) -> Vector {
        Vector::zeros(base.len())
    }

    fn validate_stage(&self, _base: &Vector, theta: &Vector) -> Result<()> {
        reject_long_stage(tangent_length(theta)?)
    }

    fn exp_at(&self, base: &Vector, v: &Vector) -> Result<HyperPoint> {
        hyper_exp(base, v).map(HyperPoint::from_raw)
    }

    fn exp_half_at(&self, base: &Vector, v: &Vector, _full: &HyperPoint) -> Result<Vector> {
        hyper_midpoint(base, v)
    }

    fn transport_inv_at(&self, _: &Vector, _: &Vector, mid: &Vector, w: &Vector) -> Result<Vector> {
        Ok(hyper_transport_inv(mid, w))
    }

    fn pull_back_at(&self, _base: &Vector, w: &Vector) -> Result<Vector> {
        Ok(w.clone())
    }

    fn dexpinv_at(&self, _base: &Vector, theta: &Vector, w: &Vector) -> Result<Vector> {
        self.apply_dexpinv(theta, w)
    }

    fn triple(&self, _base: &Vector, u: &Vector, v: &Vector, w: &Vector) -> Vector {
        hyper_triple(u, v, w)
    }

    fn project_tangent(&self, at: &HyperPoint, w: &Vector) -> Vector {
        let y = at.as_vector();
        let mut out = w.clone();
        out.axpy(-mink(y, w) / mink(y, y), y);
        out
    }

    fn invariant_residual(&self, y: &HyperPoint) -> f64 {
        let v = y.as_vector();
        (mink(v, v) - 1.0).abs()
    }

    fn renormalize(&self, y: &HyperPoint) -> HyperPoint {
        let v = y.as_vector();
        HyperPoint::from_raw(v.scaled(1.0 / mink(v, v).sqrt()))
    }
}

/// One step of the canonical hyperbolic integrator from `y`, written out
/// directly in Minkowski-space vector operations.
pub fn chi_step(
    space: &Hyperboloid,
    tableau: &ButcherTableau,
    field: &dyn Fn(&HyperPoint) -> Vector,
    y: &HyperPoint,
    h: f64,
    options: StepOptions,
) -> Result<(HyperPoint, StepRecord)> {
    let yl = y.as_vector();
    space.check_len(yl)?;
    let project = |p: &HyperPoint, w: &Vector| space.project_tangent(p, w);
    let project: &dyn Fn(&HyperPoint, &Vector) -> Vector = &project;
    let mut probe = FieldProbe::new(field, options.diagnostics.then_some(project));
    let zero = Vector::zeros(yl.len());

    let (k, thetas, iterations) = solve_stages(tableau, &zero, |theta| {
        let phi = tangent_length(theta)?;
        if phi == 0.0 {
            return Ok(probe.eval(y)?.scaled(h));
        }
        reject_long_stage(phi)?;
        let u = Vector::lincomb(sinh_over(phi), theta, phi.cosh(), yl);
        let half = 0.5 * phi;
        let s = Vector::lincomb(0.5 * sinh_over(half), theta, half.cosh(), yl);
        let v = probe.eval(&HyperPoint::from_raw(u))?.scaled(h);
        let mut ki = v.clone();
        ki.axpy(-2.0 * mink(&s, &v), &s);
        space.apply_dexpinv(theta, &ki)
    })?;

    let theta = weighted_increment(tableau, &zero, &k);
    reject_long_stage(tangent_length(&theta)?)?;
    let raw = HyperPoint::from_raw(hyper_exp(yl, &theta)?);
    let (next, residual, renormalized) = finish_point(space, raw)?;
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
    ))
}

/// `n_steps` steps of [`chi_step`].
pub fn chi_integrate(
    space: &Hyperboloid,
    tableau: &ButcherTableau,
    field: &dyn Fn(&HyperPoint) -> Vector,
    y0: &HyperPoint,
    h: f64,
    n_steps: usize,
    options: StepOptions,
) -> Result<(Vec<HyperPoint>, Vec<StepRecord>)> {
    integrate_with(y0, n_steps, |y| chi_step(space, tableau, field, y, h, options))
}
