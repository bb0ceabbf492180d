//! The pointed symmetric space contract and the canonical Runge–Kutta loop
//! built on it.
//!
//! A step from `y` works in the tangent space at a base attached to `y`:
//! stages `θ_i = Σ_j a_ij K̃_j` are mapped to the manifold with `Exp`, the
//! vector field there is carried back by inverse parallel transport, and the
//! `dExp⁻¹` correction turns it into a stage increment `K̃_i`. The step
//! ends at `Exp(Σ_j b_j K̃_j)`.

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::series::DexpinvSeries;
use crate::tableau::ButcherTableau;

/// Vector-space operations on tangent vectors.
pub trait Tangent: Clone {
    fn zero_like(&self) -> Self;
    /// `self += alpha * x`
    fn axpy(&mut self, alpha: f64, x: &Self);
    fn scaled(&self, alpha: f64) -> Self;
    /// Euclidean (Frobenius) norm of the ambient representation.
    fn norm(&self) -> f64;
    fn max_abs_diff(&self, other: &Self) -> f64;
    fn is_exact_zero(&self) -> bool;
}

impl Tangent for Vector {
    fn zero_like(&self) -> Self {
        Vector::zeros(self.len())
    }
    fn axpy(&mut self, alpha: f64, x: &Self) {
        Vector::axpy(self, alpha, x)
    }
    fn scaled(&self, alpha: f64) -> Self {
        Vector::scaled(self, alpha)
    }
    fn norm(&self) -> f64 {
        Vector::norm(self)
    }
    fn max_abs_diff(&self, other: &Self) -> f64 {
        self.sub(other).max_abs()
    }
    fn is_exact_zero(&self) -> bool {
        self.iter().all(|&x| x == 0.0)
    }
}

impl Tangent for Matrix {
    fn zero_like(&self) -> Self {
        Matrix::zeros(self.rows(), self.cols())
    }
    fn axpy(&mut self, alpha: f64, x: &Self) {
        Matrix::axpy(self, alpha, x)
    }
    fn scaled(&self, alpha: f64) -> Self {
        Matrix::scaled(self, alpha)
    }
    fn norm(&self) -> f64 {
        self.frobenius()
    }
    fn max_abs_diff(&self, other: &Self) -> f64 {
        self.sub(other).max_abs()
    }
    fn is_exact_zero(&self) -> bool {
        self.as_slice().iter().all(|&x| x == 0.0)
    }
}

/// Operations a geometry supplies to the canonical integrator.
///
/// `Base` is whatever the geometry needs to work at a point: the point
/// itself for the sphere and hyperboloid, the point together with its square
/// root for SPD matrices. Tangent vectors passed with a base live in the
/// tangent space that base trivializes.
pub trait SymmetricSpace {
    type Point: Clone;
    type Tangent: Tangent;
    type Base;
    /// Data describing `Exp(θ/2)`, consumed by the inverse transport.
    type Midpoint;

    fn base_at(&self, y: &Self::Point) -> Result<Self::Base>;

    /// The point the base is attached to.
    fn base_point(&self, base: &Self::Base) -> Self::Point;

    /// The zero tangent at `base`.
    fn zero_tangent(&self, base: &Self::Base) -> Self::Tangent;

    /// Rejects stages the geometry cannot evaluate (e.g. ‖θ‖ ≥ π on the sphere).
    fn validate_stage(&self, _base: &Self::Base, _theta: &Self::Tangent) -> Result<()> {
        Ok(())
    }

    fn exp_at(&self, base: &Self::Base, v: &Self::Tangent) -> Result<Self::Point>;

    /// `Exp(v/2)`; `full` is the already computed `Exp(v)`.
    fn exp_half_at(
        &self,
        base: &Self::Base,
        v: &Self::Tangent,
        full: &Self::Point,
    ) -> Result<Self::Midpoint>;

    /// `Γ_θ⁻¹ w` for an ambient vector `w` tangent at `Exp(θ)`.
    fn transport_inv_at(
        &self,
        base: &Self::Base,
        theta: &Self::Tangent,
        mid: &Self::Midpoint,
        w: &Self::Tangent,
    ) -> Result<Self::Tangent>;

    /// The θ = 0 case of `transport_inv_at`: carries an ambient vector at
    /// the base point into the trivialized tangent space.
    fn pull_back_at(&self, base: &Self::Base, w: &Self::Tangent) -> Result<Self::Tangent>;

    fn dexpinv_at(
        &self,
        base: &Self::Base,
        theta: &Self::Tangent,
        w: &Self::Tangent,
    ) -> Result<Self::Tangent>;

    /// The Lie triple bracket `[u, v, w]`.
    fn triple(
        &self,
        base: &Self::Base,
        u: &Self::Tangent,
        v: &Self::Tangent,
        w: &Self::Tangent,
    ) -> Self::Tangent;

    /// `dExp⁻¹` through a truncated series in `ad²_θ = [·, θ, θ]`.
    fn dexpinv_series_at(
        &self,
        base: &Self::Base,
        series: &DexpinvSeries,
        theta: &Self::Tangent,
        w: &Self::Tangent,
    ) -> Self::Tangent {
        series.apply(|x| self.triple(base, x, theta, theta), w)
    }

    /// Orthogonal projection of an ambient vector onto `T_at M`.
    fn project_tangent(&self, at: &Self::Point, w: &Self::Tangent) -> Self::Tangent;

    /// Distance of `y` from the manifold in the geometry's own measure.
    fn invariant_residual(&self, y: &Self::Point) -> f64;

    /// Cheap map back onto the manifold.
    fn renormalize(&self, y: &Self::Point) -> Self::Point;
}

/// Residual above which a step result is pushed back onto the manifold.
pub const RENORMALIZE_THRESHOLD: f64 = 1e-12;
/// Residual every trajectory point must meet after correction.
pub const MANIFOLD_TOLERANCE: f64 = 1e-10;
/// Relative normal component tolerated when diagnostics check the field.
pub const TANGENCY_TOLERANCE: f64 = 1e-10;
pub const FIXED_POINT_TOLERANCE: f64 = 1e-14;
pub const FIXED_POINT_MAX_ITERATIONS: usize = 50;

/// Per-step diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    pub h: f64,
    pub stage_norms: Vec<f64>,
    /// Manifold residual of the raw step result, before any correction.
    pub residual: f64,
    pub renormalized: bool,
    /// Zero for explicit tableaus.
    pub fixed_point_iterations: usize,
    /// Largest normal component removed from the field (diagnostics only).
    pub discarded_normal: f64,
}

/// Runs the stage recursion for one step.
///
/// `stage` maps `θ_i` to `K̃_i`. Returns the `K̃_i`, the `θ_i` and the number
/// of fixed-point sweeps used (zero for explicit tableaus).
pub(crate) fn solve_stages<T: Tangent>(
    tableau: &ButcherTableau,
    zero: &T,
    mut stage: impl FnMut(&T) -> Result<T>,
) -> Result<(Vec<T>, Vec<T>, usize)> {
    let r = tableau.stages();
    let combine = |row: usize, k: &[T]| -> T {
        let mut theta = zero.clone();
        for (j, kj) in k.iter().enumerate() {
            let a = tableau.a(row, j);
            if a != 0.0 {
                theta.axpy(a, kj);
            }
        }
        theta
    };

    if tableau.is_explicit() {
        let mut k: Vec<T> = Vec::with_capacity(r);
        let mut thetas = Vec::with_capacity(r);
        for i in 0..r {
            let theta = combine(i, &k);
            k.push(stage(&theta)?);
            thetas.push(theta);
        }
        return Ok((k, thetas, 0));
    }

    let mut thetas = vec![zero.clone(); r];
    let mut change = f64::INFINITY;
    for iteration in 1..=FIXED_POINT_MAX_ITERATIONS {
        let k: Vec<T> = thetas.iter().map(&mut stage).collect::<Result<_>>()?;
        let next_thetas: Vec<T> = (0..r).map(|i| combine(i, &k)).collect();
        change = next_thetas
            .iter()
            .zip(&thetas)
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max);
        thetas = next_thetas;
        if !change.is_finite() {
            break;
        }
        if change <= FIXED_POINT_TOLERANCE {
            // one more evaluation so the K̃ belong to the converged stages
            let k = thetas.iter().map(&mut stage).collect::<Result<_>>()?;
            return Ok((k, thetas, iteration));
        }
    }
    Err(Error::FixedPointDivergence {
        iterations: FIXED_POINT_MAX_ITERATIONS,
        change,
    })
}

/// `Σ_j b_j K̃_j`
pub(crate) fn weighted_increment<T: Tangent>(tableau: &ButcherTableau, zero: &T, k: &[T]) -> T {
    let mut theta = zero.clone();
    for (b, kj) in tableau.weights().iter().zip(k) {
        theta.axpy(*b, kj);
    }
    theta
}

/// Applies the renormalization policy to a raw step result.
pub(crate) fn finish_point<S: SymmetricSpace + ?Sized>(
    space: &S,
    raw: S::Point,
) -> Result<(S::Point, f64, bool)> {
    let residual = space.invariant_residual(&raw);
    if !residual.is_finite() {
        return Err(Error::NumericalFailure("non-finite step result".into()));
    }
    if residual <= RENORMALIZE_THRESHOLD {
        return Ok((raw, residual, false));
    }
    let fixed = space.renormalize(&raw);
    let after = space.invariant_residual(&fixed);
    if !(after <= MANIFOLD_TOLERANCE) {
        return Err(Error::NumericalFailure(format!(
            "manifold residual {after:e} after renormalization"
        )));
    }
    Ok((fixed, residual, true))
}

/// Field evaluation with the optional tangency diagnostics.
pub(crate) struct FieldProbe<'a, P, T> {
    field: &'a dyn Fn(&P) -> T,
    project: Option<&'a dyn Fn(&P, &T) -> T>,
    pub discarded: f64,
}

impl<'a, P, T: Tangent> FieldProbe<'a, P, T> {
    pub fn new(field: &'a dyn Fn(&P) -> T, project: Option<&'a dyn Fn(&P, &T) -> T>) -> Self {
        FieldProbe {
            field,
            project,
            discarded: 0.0,
        }
    }

    pub fn eval(&mut self, p: &P) -> Result<T> {
        let raw = (self.field)(p);
        let Some(project) = self.project else {
            return Ok(raw);
        };
        let projected = project(p, &raw);
        let mut normal = raw.clone();
        normal.axpy(-1.0, &projected);
        let defect = normal.norm();
        self.discarded = self.discarded.max(defect);
        if defect > TANGENCY_TOLERANCE * raw.norm().max(1.0) {
            return Err(Error::NonTangentField(defect));
        }
        Ok(projected)
    }
}

/// Options shared by every stepper.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepOptions {
    /// Project field values onto the tangent space and record what was removed.
    pub diagnostics: bool,
}

/// One canonical step of size `h` from `y`, rebasing at `y`.
pub fn cssi_step<S: SymmetricSpace>(
    space: &S,
    tableau: &ButcherTableau,
    field: &dyn Fn(&S::Point) -> S::Tangent,
    y: &S::Point,
    h: f64,
    options: StepOptions,
) -> Result<(S::Point, StepRecord)> {
    let base = space.base_at(y)?;
    let zero = space.zero_tangent(&base);
    let project = |p: &S::Point, w: &S::Tangent| space.project_tangent(p, w);
    let project: &dyn Fn(&S::Point, &S::Tangent) -> S::Tangent = &project;
    let mut probe = FieldProbe::new(field, options.diagnostics.then_some(project));

    let (k, thetas, iterations) = solve_stages(tableau, &zero, |theta| {
        if theta.is_exact_zero() {
            let v = probe.eval(&space.base_point(&base))?.scaled(h);
            return space.pull_back_at(&base, &v);
        }
        space.validate_stage(&base, theta)?;
        let e = space.exp_at(&base, theta)?;
        let mid = space.exp_half_at(&base, theta, &e)?;
        let v = probe.eval(&e)?.scaled(h);
        let kk = space.transport_inv_at(&base, theta, &mid, &v)?;
        space.dexpinv_at(&base, theta, &kk)
    })?;

    let theta = weighted_increment(tableau, &zero, &k);
    space.validate_stage(&base, &theta)?;
    let raw = space.exp_at(&base, &theta)?;
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

/// Repeats a stepper `n_steps` times, numbering records and attaching the
/// step index to errors.
pub fn integrate_with<P: Clone>(
    y0: &P,
    n_steps: usize,
    mut step: impl FnMut(&P) -> Result<(P, StepRecord)>,
) -> Result<(Vec<P>, Vec<StepRecord>)> {
    let mut trajectory = Vec::with_capacity(n_steps + 1);
    let mut records = Vec::with_capacity(n_steps);
    trajectory.push(y0.clone());
    for l in 0..n_steps {
        let (next, mut record) = step(&trajectory[l]).map_err(|e| e.at_step(l))?;
        record.step = l;
        trajectory.push(next);
        records.push(record);
    }
    Ok((trajectory, records))
}

/// `n_steps` canonical steps of size `h` starting at `y0`.
pub fn integrate<S: SymmetricSpace>(
    space: &S,
    tableau: &ButcherTableau,
    field: &dyn Fn(&S::Point) -> S::Tangent,
    y0: &S::Point,
    h: f64,
    n_steps: usize,
    options: StepOptions,
) -> Result<(Vec<S::Point>, Vec<StepRecord>)> {
    integrate_with(y0, n_steps, |y| {
        cssi_step(space, tableau, field, y, h, options)
    })
}

/// Residuals of the three Lie triple system axioms:
/// `‖[x,x,z]‖`, `‖[x,y,z] + [y,z,x] + [z,x,y]‖`, and the derivation
/// (Leibniz) identity of `[x,y,·]` applied to `[z,t,w]`.
pub fn lts_axiom_residuals<T: Tangent>(
    triple: impl Fn(&T, &T, &T) -> T,
    x: &T,
    y: &T,
    z: &T,
    t: &T,
    w: &T,
) -> (f64, f64, f64) {
    let r1 = triple(x, x, z).norm();

    let mut cyclic = triple(x, y, z);
    cyclic.axpy(1.0, &triple(y, z, x));
    cyclic.axpy(1.0, &triple(z, x, y));
    let r2 = cyclic.norm();

    let mut leibniz = triple(x, y, &triple(z, t, w));
    leibniz.axpy(-1.0, &triple(&triple(x, y, z), t, w));
    leibniz.axpy(-1.0, &triple(z, &triple(x, y, t), w));
    leibniz.axpy(-1.0, &triple(z, t, &triple(x, y, w)));
    let r3 = leibniz.norm();

    (r1, r2, r3)
}

/// The triple bracket computed as `[[û, v̂], ŵ] o` from a hat map.
pub fn triple_bracket_oracle(
    hat: impl Fn(&Vector) -> Matrix,
    o: &Vector,
    u: &Vector,
    v: &Vector,
    w: &Vector,
) -> Vector {
    let (hu, hv, hw) = (hat(u), hat(v), hat(w));
    hu.commutator(&hv).commutator(&hw).matvec(o)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tableau::builtin_tableau;

    /// The real line with `x·y = 2x − y`: every operation is the identity.
    struct Line;

    impl SymmetricSpace for Line {
        type Point = Vector;
        type Tangent = Vector;
        type Base = Vector;
        type Midpoint = ();

        fn base_at(&self, y: &Vector) -> Result<Vector> {
            Ok(y.clone())
        }
        fn base_point(&self, base: &Vector) -> Vector {
            base.clone()
        }
        fn zero_tangent(&self, base: &Vector) -> Vector {
            Vector::zeros(base.len())
        }
        fn exp_at(&self, base: &Vector, v: &Vector) -> Result<Vector> {
            Ok(base.add(v))
        }
        fn exp_half_at(&self, _: &Vector, _: &Vector, _: &Vector) -> Result<()> {
            Ok(())
        }
        fn transport_inv_at(&self, _: &Vector, _: &Vector, _: &(), w: &Vector) -> Result<Vector> {
            Ok(w.clone())
        }
        fn pull_back_at(&self, _: &Vector, w: &Vector) -> Result<Vector> {
            Ok(w.clone())
        }
        fn dexpinv_at(&self, _: &Vector, _: &Vector, w: &Vector) -> Result<Vector> {
            Ok(w.clone())
        }
        fn triple(&self, base: &Vector, _: &Vector, _: &Vector, _: &Vector) -> Vector {
            Vector::zeros(base.len())
        }
        fn project_tangent(&self, _: &Vector, w: &Vector) -> Vector {
            w.clone()
        }
        fn invariant_residual(&self, _: &Vector) -> f64 {
            0.0
        }
        fn renormalize(&self, y: &Vector) -> Vector {
            y.clone()
        }
    }

    #[test]
    fn flat_space_reduces_to_classical_rk() {
        // y' = y, one rk4 step reproduces the degree-4 Taylor polynomial
        let t = builtin_tableau("rk4").unwrap();
        let y0 = Vector::new(vec![1.0]);
        let f = |y: &Vector| y.clone();
        let (y1, rec) = cssi_step(&Line, &t, &f, &y0, 0.1, StepOptions::default()).unwrap();
        let h: f64 = 0.1;
        let taylor = 1.0 + h + h * h / 2.0 + h.powi(3) / 6.0 + h.powi(4) / 24.0;
        assert!((y1[0] - taylor).abs() < 1e-15);
        assert_eq!(rec.stage_norms[0], 0.0);
    }

    #[test]
    fn implicit_midpoint_on_linear_problem() {
        // y' = -y: implicit midpoint gives (1 - h/2) / (1 + h/2)
        let t = builtin_tableau("implicit_midpoint").unwrap();
        let f = |y: &Vector| y.scaled(-1.0);
        let (y1, rec) =
            cssi_step(&Line, &t, &f, &Vector::new(vec![1.0]), 0.1, StepOptions::default())
                .unwrap();
        assert!((y1[0] - 0.95 / 1.05).abs() < 1e-14);
        assert!(rec.fixed_point_iterations > 0);
    }

    #[test]
    fn implicit_divergence_is_reported() {
        let t = builtin_tableau("implicit_midpoint").unwrap();
        let f = |y: &Vector| y.scaled(-100.0);
        let err = cssi_step(&Line, &t, &f, &Vector::new(vec![1.0]), 1.0, StepOptions::default())
            .unwrap_err();
        assert!(matches!(err, Error::FixedPointDivergence { .. }));
    }

    #[test]
    fn integrate_zero_steps() {
        let t = builtin_tableau("euler").unwrap();
        let f = |y: &Vector| y.clone();
        let y0 = Vector::new(vec![2.0]);
        let (traj, recs) = integrate(&Line, &t, &f, &y0, 0.1, 0, StepOptions::default()).unwrap();
        assert_eq!(traj, vec![y0]);
        assert!(recs.is_empty());
    }

    #[test]
    fn step_errors_carry_index() {
        let t = builtin_tableau("euler").unwrap();
        let f = |y: &Vector| y.clone();
        let y0 = Vector::new(vec![1.0]);
        let mut calls = 0;
        let err = integrate_with(&y0, 5, |y| {
            calls += 1;
            if calls == 3 {
                return Err(Error::StepTooLarge { norm: 4.0, limit: 3.0 });
            }
            cssi_step(&Line, &t, &f, y, 0.1, StepOptions::default())
        })
        .unwrap_err();
        assert!(matches!(err, Error::AtStep { step: 2, .. }));
        assert!(matches!(err.root(), Error::StepTooLarge { .. }));
    }

    #[test]
    fn lts_residuals_of_zero_bracket() {
        let z = Vector::zeros(2);
        let v = Vector::new(vec![1.0, 2.0]);
        let (a, b, c) = lts_axiom_residuals(|_, _, _| z.clone(), &v, &v, &v, &v, &v);
        assert_eq!((a, b, c), (0.0, 0.0, 0.0));
    }
}
