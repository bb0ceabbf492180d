//! Built-in test problems.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use symmflow_core::hyperbolic::{minkowski_metric, HyperPoint};
use symmflow_core::linalg::{mat_exp, minkowski, Matrix, Vector};
use symmflow_core::spd::SpdPoint;
use symmflow_core::sphere::SpherePoint;

use crate::error::{HarnessError, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceKind {
    Sphere,
    Hyperbolic,
    Spd,
}

impl SpaceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SpaceKind::Sphere => "sphere",
            SpaceKind::Hyperbolic => "hyperbolic",
            SpaceKind::Spd => "spd",
        }
    }

    pub fn default_dim(self) -> usize {
        match self {
            SpaceKind::Sphere | SpaceKind::Hyperbolic => 2,
            SpaceKind::Spd => 3,
        }
    }

    pub fn problems(self) -> &'static [&'static str] {
        match self {
            SpaceKind::Sphere => &["rigid_body", "rotation"],
            SpaceKind::Hyperbolic => &["lorentz_linear"],
            SpaceKind::Spd => &["double_bracket", "constant_field"],
        }
    }
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SpaceKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sphere" => Ok(SpaceKind::Sphere),
            "hyperbolic" => Ok(SpaceKind::Hyperbolic),
            "spd" => Ok(SpaceKind::Spd),
            _ => Err(HarnessError::InvalidSpec(format!("unknown space `{s}`"))),
        }
    }
}

/// What to integrate: geometry, problem name, dimension, horizon, seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub space: SpaceKind,
    pub problem: String,
    /// Manifold dimension (`n` for Sⁿ and Hⁿ, matrix size for SPD).
    pub n: usize,
    pub t_end: f64,
    pub seed: u64,
    /// Rigid-body inertia diagonal.
    #[serde(default)]
    pub inertia: Option<[f64; 3]>,
    /// Rotation axis for `rotation` on S².
    #[serde(default)]
    pub axis: Option<[f64; 3]>,
}

impl ProblemSpec {
    pub fn new(space: SpaceKind, problem: &str) -> Self {
        ProblemSpec {
            space,
            problem: problem.to_string(),
            n: space.default_dim(),
            t_end: 1.0,
            seed: rng::DEFAULT_SEED,
            inertia: None,
            axis: None,
        }
    }

    pub fn with_dim(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn with_horizon(mut self, t_end: f64) -> Self {
        self.t_end = t_end;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.space.problems().contains(&self.problem.as_str()) {
            return Err(HarnessError::UnknownProblem {
                space: self.space.to_string(),
                problem: self.problem.clone(),
            });
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(HarnessError::InvalidSpec(format!("horizon T = {}", self.t_end)));
        }
        if self.n == 0 {
            return Err(HarnessError::InvalidSpec("dimension must be positive".into()));
        }
        let finite = |p: &Option<[f64; 3]>| p.map_or(true, |v| v.iter().all(|x| x.is_finite()));
        if !finite(&self.inertia) || !finite(&self.axis) {
            return Err(HarnessError::InvalidSpec("non-finite parameter".into()));
        }
        let needs_s2 = matches!(self.problem.as_str(), "rigid_body")
            || (self.problem == "rotation" && self.axis.is_some());
        if needs_s2 && self.n != 2 {
            return Err(HarnessError::InvalidSpec(format!(
                "{} is defined on S² only",
                self.problem
            )));
        }
        if let Some(i) = self.inertia {
            if i.iter().any(|&x| x <= 0.0) {
                return Err(HarnessError::InvalidSpec("inertia must be positive".into()));
            }
        }
        Ok(())
    }
}

pub type Field<P, T> = Box<dyn Fn(&P) -> T + Send + Sync>;
pub type Exact<P> = Box<dyn Fn(f64) -> Result<P> + Send + Sync>;

/// A quantity the exact flow conserves.
pub struct Invariant<P> {
    pub name: &'static str,
    pub value: Box<dyn Fn(&P) -> Vec<f64> + Send + Sync>,
}

pub struct Instance<P, T> {
    pub y0: P,
    pub field: Field<P, T>,
    pub exact: Option<Exact<P>>,
    pub invariant: Option<Invariant<P>>,
}

pub enum Problem {
    Sphere(Instance<SpherePoint, Vector>),
    Hyperbolic(Instance<HyperPoint, Vector>),
    Spd(Instance<SpdPoint, Matrix>),
}

impl Problem {
    pub fn has_exact(&self) -> bool {
        match self {
            Problem::Sphere(i) => i.exact.is_some(),
            Problem::Hyperbolic(i) => i.exact.is_some(),
            Problem::Spd(i) => i.exact.is_some(),
        }
    }
}

/// The cross-product matrix `[a]×`.
pub fn cross_matrix(a: &[f64; 3]) -> Matrix {
    Matrix::from_rows(&[&[0.0, -a[2], a[1]], &[a[2], 0.0, -a[0]], &[-a[1], a[0], 0.0]])
}

const DEFAULT_INERTIA: [f64; 3] = [1.0, 2.0, 3.0];
const DEFAULT_AXIS: [f64; 3] = [0.3, -0.4, 0.9];
const SPHERE_Y0: [f64; 3] = [0.6, 0.0, 0.8];

fn sphere_start(spec: &ProblemSpec) -> Result<SpherePoint> {
    let y = if spec.n == 2 {
        Vector::new(SPHERE_Y0.to_vec())
    } else {
        rng::unit_vector(&mut rng::stream(spec.seed, "sphere.y0"), spec.n + 1)
    };
    Ok(SpherePoint::new(y)?)
}

fn linear_exact<P: 'static>(
    generator: Matrix,
    y0: Vector,
    wrap: fn(Vector) -> symmflow_core::Result<P>,
) -> Exact<P> {
    Box::new(move |t| Ok(wrap(mat_exp(&generator.scaled(t))?.matvec(&y0))?))
}

pub fn build(spec: &ProblemSpec) -> Result<Problem> {
    spec.validate()?;
    match (spec.space, spec.problem.as_str()) {
        (SpaceKind::Sphere, "rigid_body") => {
            let inertia = spec.inertia.unwrap_or(DEFAULT_INERTIA);
            let inv = [1.0 / inertia[0], 1.0 / inertia[1], 1.0 / inertia[2]];
            let field: Field<SpherePoint, Vector> = Box::new(move |y| {
                let y = y.as_vector();
                let w = [y[0] * inv[0], y[1] * inv[1], y[2] * inv[2]];
                Vector::new(vec![
                    y[1] * w[2] - y[2] * w[1],
                    y[2] * w[0] - y[0] * w[2],
                    y[0] * w[1] - y[1] * w[0],
                ])
            });
            let energy = Invariant {
                name: "energy",
                value: Box::new(move |y: &SpherePoint| {
                    let y = y.as_vector();
                    vec![0.5 * (0..3).map(|i| y[i] * y[i] * inv[i]).sum::<f64>()]
                }),
            };
            Ok(Problem::Sphere(Instance {
                y0: sphere_start(spec)?,
                field,
                exact: None,
                invariant: Some(energy),
            }))
        }
        (SpaceKind::Sphere, "rotation") => {
            let a = if spec.n == 2 {
                cross_matrix(&spec.axis.unwrap_or(DEFAULT_AXIS))
            } else {
                rng::skew(&mut rng::stream(spec.seed, "sphere.rotation"), spec.n + 1, 1.0)
            };
            let y0 = sphere_start(spec)?;
            let gen = a.clone();
            Ok(Problem::Sphere(Instance {
                exact: Some(linear_exact(a, y0.as_vector().clone(), SpherePoint::normalized)),
                y0,
                field: Box::new(move |y| gen.matvec(y.as_vector())),
                invariant: None,
            }))
        }
        (SpaceKind::Hyperbolic, "lorentz_linear") => {
            let dim = spec.n + 1;
            let k = rng::skew(&mut rng::stream(spec.seed, "hyperbolic.omega"), dim, 1.0);
            let omega = minkowski_metric(dim).matmul(&k);
            let space = rng::uniform_vec(&mut rng::stream(spec.seed, "hyperbolic.v"), spec.n, 0.5);
            let y0 = HyperPoint::lift(&space);
            let gen = omega.clone();
            let rescale: fn(Vector) -> symmflow_core::Result<HyperPoint> = |v| {
                let q = minkowski(&v, &v)?;
                HyperPoint::new(v.scaled(1.0 / q.sqrt()))
            };
            Ok(Problem::Hyperbolic(Instance {
                exact: Some(linear_exact(omega, y0.as_vector().clone(), rescale)),
                y0,
                field: Box::new(move |y| gen.matvec(y.as_vector())),
                invariant: None,
            }))
        }
        (SpaceKind::Spd, "double_bracket") => {
            let n = spec.n;
            let big_n = Matrix::from_diagonal(&(1..=n).map(|i| i as f64).collect::<Vec<_>>());
            let b = rng::square(&mut rng::stream(spec.seed, "spd.y0"), n, 0.5);
            let y0 = b.matmul(&b.transpose()).add(&Matrix::identity(n).scaled(0.5));
            let y0 = SpdPoint::new(y0.symmetrized())?;
            let invariant = Invariant {
                name: "eigenvalues",
                value: Box::new(|y: &SpdPoint| {
                    y.eigenvalues().unwrap_or_else(|_| vec![f64::NAN; y.dim()])
                }),
            };
            Ok(Problem::Spd(Instance {
                y0,
                field: Box::new(move |y| {
                    let y = y.as_matrix();
                    y.commutator(&y.commutator(&big_n))
                }),
                exact: None,
                invariant: Some(invariant),
            }))
        }
        (SpaceKind::Spd, "constant_field") => {
            let n = spec.n;
            let c = rng::symmetric(&mut rng::stream(spec.seed, "spd.field"), n, 0.5 / n as f64);
            let b = rng::square(&mut rng::stream(spec.seed, "spd.y0"), n, 0.5);
            let y0 = b.matmul(&b.transpose()).add(&Matrix::identity(n).scaled(2.0));
            let y0 = SpdPoint::new(y0.symmetrized())?;
            let (start, gen) = (y0.as_matrix().clone(), c.clone());
            Ok(Problem::Spd(Instance {
                y0,
                field: Box::new(move |_| c.clone()),
                exact: Some(Box::new(move |t| {
                    Ok(SpdPoint::new(start.add(&gen.scaled(t)).symmetrized())?)
                })),
                invariant: None,
            }))
        }
        _ => Err(HarnessError::UnknownProblem {
            space: spec.space.to_string(),
            problem: spec.problem.clone(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use symmflow_core::space::{SymmetricSpace, TANGENCY_TOLERANCE};
    use symmflow_core::sphere::Sphere;

    #[test]
    fn every_builtin_builds() {
        for space in [SpaceKind::Sphere, SpaceKind::Hyperbolic, SpaceKind::Spd] {
            for name in space.problems() {
                let spec = ProblemSpec::new(space, name);
                assert!(build(&spec).is_ok(), "{space} {name}");
            }
        }
    }

    #[test]
    fn unknown_problem_is_rejected() {
        let spec = ProblemSpec::new(SpaceKind::Spd, "rigid_body");
        assert!(matches!(build(&spec), Err(HarnessError::UnknownProblem { .. })));
        let spec = ProblemSpec::new(SpaceKind::Sphere, "rigid_body").with_dim(3);
        assert!(matches!(build(&spec), Err(HarnessError::InvalidSpec(_))));
    }

    #[test]
    fn fields_are_tangent_at_the_start() {
        let spec = ProblemSpec::new(SpaceKind::Sphere, "rotation").with_dim(5);
        let Problem::Sphere(inst) = build(&spec).unwrap() else { panic!() };
        let f = (inst.field)(&inst.y0);
        let sphere = Sphere::new(5);
        let normal = f.sub(&sphere.project_tangent(&inst.y0, &f)).norm();
        assert!(normal <= TANGENCY_TOLERANCE);

        let spec = ProblemSpec::new(SpaceKind::Hyperbolic, "lorentz_linear").with_dim(4);
        let Problem::Hyperbolic(inst) = build(&spec).unwrap() else { panic!() };
        let f = (inst.field)(&inst.y0);
        assert!(minkowski(&f, inst.y0.as_vector()).unwrap().abs() <= 1e-12);
    }

    #[test]
    fn exact_solutions_start_at_y0() {
        let spec = ProblemSpec::new(SpaceKind::Spd, "constant_field");
        let Problem::Spd(inst) = build(&spec).unwrap() else { panic!() };
        let e0 = (inst.exact.as_ref().unwrap())(0.0).unwrap();
        assert_eq!(e0.as_matrix(), inst.y0.as_matrix());
    }

    #[test]
    fn seeds_change_random_problems() {
        let a = ProblemSpec::new(SpaceKind::Hyperbolic, "lorentz_linear").with_seed(1);
        let b = a.clone().with_seed(2);
        let (Problem::Hyperbolic(ia), Problem::Hyperbolic(ib)) = (build(&a).unwrap(), build(&b).unwrap()) else {
            panic!()
        };
        assert_ne!(ia.y0, ib.y0);
    }
}
