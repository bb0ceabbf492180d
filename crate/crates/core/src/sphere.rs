//! The unit sphere `Sⁿ ⊂ ℝⁿ⁺¹` with the reflection product
//! `x·y = 2xxᵀy − y`, and its canonical integrator.
//!
//! All operations are `O(n)`: the exponential, transport and `dExp⁻¹` are
//! Rodrigues-type closed forms in the plane spanned by the base point and
//! the stage direction.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::series::{phi_over_sin_minus_one, sin_over, sin_over_minus_one, DexpinvPolicy};
use crate::space::{
    finish_point, integrate_with, solve_stages, weighted_increment, FieldProbe, StepOptions,
    StepRecord, SymmetricSpace, Tangent,
};
use crate::tableau::ButcherTableau;

/// Stages at or beyond this geodesic length are rejected.
pub const MAX_STAGE_ANGLE: f64 = PI - 1e-6;
const MIDPOINT_FLOOR: f64 = 1e-8;
const POINT_TOLERANCE: f64 = 1e-10;

/// A point with `|yᵀy − 1| ≤ 1e-10`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpherePoint(Vector);

impl SpherePoint {
    pub fn new(y: Vector) -> Result<Self> {
        if y.len() < 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: y.len(),
            });
        }
        let residual = (y.dot(&y) - 1.0).abs();
        if !(residual <= POINT_TOLERANCE) {
            return Err(Error::NumericalFailure(format!(
                "point is off the unit sphere by {residual:e}"
            )));
        }
        Ok(SpherePoint(y))
    }

    /// Normalizes a non-zero vector onto the sphere.
    pub fn normalized(y: Vector) -> Result<Self> {
        let n = y.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::NumericalFailure("cannot normalize vector".into()));
        }
        SpherePoint::new(y.scaled(1.0 / n))
    }

    pub(crate) fn from_raw(y: Vector) -> Self {
        SpherePoint(y)
    }

    /// The north pole `(0, …, 0, 1) ∈ Sⁿ`.
    pub fn north_pole(n: usize) -> Self {
        SpherePoint(Vector::unit(n + 1, n))
    }

    pub fn as_vector(&self) -> &Vector {
        &self.0
    }

    pub fn into_vector(self) -> Vector {
        self.0
    }
}

/// `Exp_base(v) = (sin φ/φ) v + cos φ · base`, `φ = ‖v‖`.
pub fn sphere_exp(base: &Vector, v: &Vector) -> Vector {
    let phi = v.norm();
    if phi == 0.0 {
        return base.clone();
    }
    Vector::lincomb(sin_over(phi), v, phi.cos(), base)
}

/// The point reflection `σ_x = 2xxᵀ − I`.
pub fn sphere_sigma(x: &Vector) -> Matrix {
    let mut m = x.outer(x).scaled(2.0);
    for i in 0..x.len() {
        m[(i, i)] -= 1.0;
    }
    m
}

/// `σ_x y = 2x(xᵀy) − y`, the symmetric product `x·y`.
pub fn sphere_product(x: &Vector, y: &Vector) -> Vector {
    Vector::lincomb(2.0 * x.dot(y), x, -1.0, y)
}

/// The quadratic representation `Q_x = σ_x σ_o` for base point `o`.
pub fn sphere_quadratic(x: &Vector, o: &Vector) -> Matrix {
    sphere_sigma(x).matmul(&sphere_sigma(o))
}

/// The geodesic midpoint between `base` and `e = Exp_base(θ)`, as
/// `(e + base)/‖e + base‖`.
pub fn sphere_midpoint(base: &Vector, e: &Vector) -> Result<Vector> {
    let sum = e.add(base);
    let n = sum.norm();
    if n < MIDPOINT_FLOOR {
        return Err(Error::MidpointUndefined(n));
    }
    Ok(sum.scaled(1.0 / n))
}

/// `Γ_θ⁻¹ w = w − 2 s (sᵀw)` with `s` the geodesic midpoint.
pub fn sphere_transport_inv(mid: &Vector, w: &Vector) -> Vector {
    let mut out = w.clone();
    out.axpy(-2.0 * mid.dot(w), mid);
    out
}

fn reject_long_stage(phi: f64) -> Result<()> {
    if !(phi < MAX_STAGE_ANGLE) {
        return Err(Error::StepTooLarge {
            norm: phi,
            limit: MAX_STAGE_ANGLE,
        });
    }
    Ok(())
}

/// `w + c(φ) π_θ^⊥ w` with `π^⊥` the projection orthogonal to `θ`.
fn scale_normal_part(theta: &Vector, phi: f64, coeff: f64, w: &Vector) -> Vector {
    let unit = theta.scaled(1.0 / phi);
    let mut normal = w.clone();
    normal.axpy(-unit.dot(w), &unit);
    let mut out = w.clone();
    out.axpy(coeff, &normal);
    out
}

/// `dExp⁻¹_θ w = w + (φ/sin φ − 1) π_θ^⊥ w`, `φ = ‖θ‖ < π`.
pub fn sphere_dexpinv(theta: &Vector, w: &Vector) -> Result<Vector> {
    let phi = theta.norm();
    if phi == 0.0 {
        return Ok(w.clone());
    }
    reject_long_stage(phi)?;
    Ok(scale_normal_part(theta, phi, phi_over_sin_minus_one(phi), w))
}

/// The forward map `dExp_θ w = w + (sin φ/φ − 1) π_θ^⊥ w`.
pub fn sphere_dexp(theta: &Vector, w: &Vector) -> Vector {
    let phi = theta.norm();
    if phi == 0.0 {
        return w.clone();
    }
    scale_normal_part(theta, phi, sin_over_minus_one(phi), w)
}

/// `[u, v, w] = (v wᵀ − (vᵀw) I) u`
pub fn sphere_triple(u: &Vector, v: &Vector, w: &Vector) -> Vector {
    Vector::lincomb(w.dot(u), v, -v.dot(w), u)
}

/// `ad²_θ w = [w, θ, θ]`
pub fn sphere_ad2(theta: &Vector, w: &Vector) -> Vector {
    sphere_triple(w, theta, theta)
}

/// The hat map `v̂ = v oᵀ − o vᵀ`, the rotation generator with `v̂ o = v`.
pub fn sphere_hat(o: &Vector, v: &Vector) -> Matrix {
    v.outer(o).sub(&o.outer(v))
}

/// `Sⁿ` with the chosen `dExp⁻¹` evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct Sphere {
    n: usize,
    dexpinv: DexpinvPolicy,
}

impl Sphere {
    pub fn new(n: usize) -> Self {
        Sphere {
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

    pub fn dexpinv_policy(&self) -> &DexpinvPolicy {
        &self.dexpinv
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
            DexpinvPolicy::ClosedForm => sphere_dexpinv(theta, w),
            DexpinvPolicy::Truncated(series) => Ok(series.apply(|x| sphere_ad2(theta, x), w)),
        }
    }
}

impl SymmetricSpace for Sphere {
    type Point = SpherePoint;
    type Tangent = Vector;
    type Base = Vector;
    type Midpoint = Vector;

    fn base_at(&self, y: &SpherePoint) -> Result<Vector> {
        self.check_len(y.as_vector())?;
        Ok(y.as_vector().clone())
    }

    fn base_point(&self, base: &Vector) -> SpherePoint {
        SpherePoint::from_raw(base.clone())
    }

    fn zero_tangent(&self, base: &Vector) -> Vector {
        Vector::zeros(base.len())
    }

    fn validate_stage(&self, _base: &Vector, theta: &Vector) -> Result<()> {
        reject_long_stage(theta.norm())
    }

    fn exp_at(&self, base: &Vector, v: &Vector) -> Result<SpherePoint> {
        Ok(SpherePoint::from_raw(sphere_exp(base, v)))
    }

    fn exp_half_at(&self, base: &Vector, _v: &Vector, full: &SpherePoint) -> Result<Vector> {
        sphere_midpoint(base, full.as_vector())
    }

    fn transport_inv_at(&self, _: &Vector, _: &Vector, mid: &Vector, w: &Vector) -> Result<Vector> {
        Ok(sphere_transport_inv(mid, w))
    }

    fn pull_back_at(&self, _base: &Vector, w: &Vector) -> Result<Vector> {
        Ok(w.clone())
    }

    fn dexpinv_at(&self, _base: &Vector, theta: &Vector, w: &Vector) -> Result<Vector> {
        self.apply_dexpinv(theta, w)
    }

    fn triple(&self, _base: &Vector, u: &Vector, v: &Vector, w: &Vector) -> Vector {
        sphere_triple(u, v, w)
    }

    fn project_tangent(&self, at: &SpherePoint, w: &Vector) -> Vector {
        let y = at.as_vector();
        let mut out = w.clone();
        out.axpy(-y.dot(w) / y.dot(y), y);
        out
    }

    fn invariant_residual(&self, y: &SpherePoint) -> f64 {
        let v = y.as_vector();
        (v.dot(v) - 1.0).abs()
    }

    fn renormalize(&self, y: &SpherePoint) -> SpherePoint {
        let v = y.as_vector();
        SpherePoint::from_raw(v.scaled(1.0 / v.norm()))
    }
}

/// One step of the canonical spherical integrator from `y`.
///
/// A direct transcription of the spherical algorithm that does not go
/// through [`SymmetricSpace`]; it must agree with
/// [`crate::space::cssi_step`] on a [`Sphere`].
pub fn csi_step(
    sphere: &Sphere,
    tableau: &ButcherTableau,
    field: &dyn Fn(&SpherePoint) -> Vector,
    y: &SpherePoint,
    h: f64,
    options: StepOptions,
) -> Result<(SpherePoint, StepRecord)> {
    let yl = y.as_vector();
    sphere.check_len(yl)?;
    let project = |p: &SpherePoint, w: &Vector| sphere.project_tangent(p, w);
    let project: &dyn Fn(&SpherePoint, &Vector) -> Vector = &project;
    let mut probe = FieldProbe::new(field, options.diagnostics.then_some(project));
    let zero = Vector::zeros(yl.len());

    let (k, thetas, iterations) = solve_stages(tableau, &zero, |theta| {
        let phi = theta.norm();
        if phi == 0.0 {
            return Ok(probe.eval(y)?.scaled(h));
        }
        reject_long_stage(phi)?;
        let e = Vector::lincomb(sin_over(phi), theta, phi.cos(), yl);
        let s = sphere_midpoint(yl, &e)?;
        let v = probe.eval(&SpherePoint::from_raw(e))?.scaled(h);
        let mut ki = v.clone();
        ki.axpy(-2.0 * s.dot(&v), &s);
        sphere.apply_dexpinv(theta, &ki)
    })?;

    let theta = weighted_increment(tableau, &zero, &k);
    reject_long_stage(theta.norm())?;
    let raw = SpherePoint::from_raw(sphere_exp(yl, &theta));
    let (next, residual, renormalized) = finish_point(sphere, raw)?;
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

/// `n_steps` steps of [`csi_step`].
pub fn csi_integrate(
    sphere: &Sphere,
    tableau: &ButcherTableau,
    field: &dyn Fn(&SpherePoint) -> Vector,
    y0: &SpherePoint,
    h: f64,
    n_steps: usize,
    options: StepOptions,
) -> Result<(Vec<SpherePoint>, Vec<StepRecord>)> {
    integrate_with(y0, n_steps, |y| csi_step(sphere, tableau, field, y, h, options))
}
