//! Self-checks behind `symmflow check`: LTS axioms, closed forms against
//! matrix oracles, geometric identities, generic/specialized agreement and
//! the step-size guard.

use std::fmt;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use symmflow_core::hyperbolic::*;
use symmflow_core::linalg::{mat_exp, minkowski, sym_eig, Matrix, SymMatrix, Vector};
use symmflow_core::series::DexpinvSeries;
use symmflow_core::space::{cssi_step, lts_axiom_residuals, triple_bracket_oracle, StepOptions, SymmetricSpace};
use symmflow_core::spd::{spd_triple, SpdFrame, SpdManifold, SpdPoint};
use symmflow_core::sphere::*;
use symmflow_core::tableau::builtin_tableau;
use symmflow_core::Error;

use crate::problem::{build, Problem, ProblemSpec, SpaceKind};
use crate::rng;

pub const SAMPLES: usize = 100;
pub const ORACLE_TOLERANCE: f64 = 1e-12;
pub const LTS_TOLERANCE: f64 = 1e-12;
pub const AGREEMENT_TOLERANCE: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub samples: usize,
    /// Largest residual seen.
    pub worst: f64,
    pub tolerance: f64,
}

impl CheckOutcome {
    fn new(name: &str, samples: usize, worst: f64, tolerance: f64) -> Self {
        CheckOutcome {
            name: name.to_string(),
            samples,
            worst,
            tolerance,
        }
    }

    pub fn passed(&self) -> bool {
        self.worst <= self.tolerance
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} (worst {:.3e}, tolerance {:.1e}, {} samples)",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.worst,
            self.tolerance,
            self.samples
        )
    }
}

/// Worst value of `f` over `SAMPLES` draws; NaN counts as infinitely bad.
fn worst_of(mut rng: ChaCha8Rng, mut f: impl FnMut(&mut ChaCha8Rng, usize) -> f64) -> f64 {
    (0..SAMPLES)
        .map(|i| {
            let v = f(&mut rng, i);
            if v.is_nan() {
                f64::INFINITY
            } else {
                v
            }
        })
        .fold(0.0, f64::max)
}

/// Dimensions 2..=8 in turn.
fn dim(i: usize, max: usize) -> usize {
    2 + i % (max - 1)
}

fn sphere_tangent(rng: &mut ChaCha8Rng, y: &Vector) -> Vector {
    let w = Vector::new(rng::uniform_vec(rng, y.len(), 1.0));
    let mut out = w.clone();
    out.axpy(-w.dot(y), y);
    out
}

fn hyper_point(rng: &mut ChaCha8Rng, n: usize) -> Vector {
    HyperPoint::lift(&rng::uniform_vec(rng, n, 1.0)).into_vector()
}

fn hyper_tangent(rng: &mut ChaCha8Rng, y: &Vector) -> Vector {
    let w = Vector::new(rng::uniform_vec(rng, y.len(), 1.0));
    let mut out = w.clone();
    out.axpy(-minkowski(y, &w).unwrap_or(f64::NAN), y);
    out
}

fn unit(v: Vector) -> Vector {
    let n = v.norm();
    if n == 0.0 {
        v
    } else {
        v.scaled(1.0 / n)
    }
}

/// Rescales a hyperbolic tangent to geodesic length `len`.
fn hyper_length(v: Vector, len: f64) -> Vector {
    let l = (-minkowski(&v, &v).unwrap_or(f64::NAN)).max(0.0).sqrt();
    if l == 0.0 {
        v
    } else {
        v.scaled(len / l)
    }
}

fn rel_err(got: &Vector, want: &Vector) -> f64 {
    got.sub(want).max_abs() / want.max_abs().max(1.0)
}

fn lts_worst<T: symmflow_core::space::Tangent>(
    triple: impl Fn(&T, &T, &T) -> T,
    xs: &[T],
) -> f64 {
    let (r1, r2, r3) = lts_axiom_residuals(triple, &xs[0], &xs[1], &xs[2], &xs[3], &xs[4]);
    r1.max(r2).max(r3)
}

/// The three Lie triple system axioms on unit-size random inputs.
pub fn lts_suite(seed: u64) -> Vec<CheckOutcome> {
    let sphere = worst_of(rng::stream(seed, "check.lts.sphere"), |rng, i| {
        let n = dim(i, 8);
        let y = rng::unit_vector(rng, n + 1);
        let xs: Vec<Vector> = (0..5).map(|_| unit(sphere_tangent(rng, &y))).collect();
        lts_worst(sphere_triple, &xs)
    });
    let hyper = worst_of(rng::stream(seed, "check.lts.hyperbolic"), |rng, i| {
        let n = dim(i, 8);
        let y = hyper_point(rng, n);
        let xs: Vec<Vector> = (0..5).map(|_| unit(hyper_tangent(rng, &y))).collect();
        lts_worst(hyper_triple, &xs)
    });
    let spd = worst_of(rng::stream(seed, "check.lts.spd"), |rng, i| {
        let n = dim(i, 6);
        let xs: Vec<Matrix> = (0..5)
            .map(|_| {
                let m = rng::symmetric(rng, n, 1.0);
                m.scaled(1.0 / m.frobenius())
            })
            .collect();
        lts_worst(spd_triple, &xs)
    });
    vec![
        CheckOutcome::new("lts axioms sphere", SAMPLES, sphere, LTS_TOLERANCE),
        CheckOutcome::new("lts axioms hyperbolic", SAMPLES, hyper, LTS_TOLERANCE),
        CheckOutcome::new("lts axioms spd", SAMPLES, spd, LTS_TOLERANCE),
    ]
}

/// Closed forms against matrix-exponential and hat-map commutator oracles.
///
/// Errors are measured relative to `max(1, ‖reference‖_max)`.
pub fn oracle_suite(seed: u64) -> Vec<CheckOutcome> {
    let series = DexpinvSeries::new(40);

    let sphere_exp_err = worst_of(rng::stream(seed, "check.oracle.sphere.exp"), |rng, i| {
        let y = rng::unit_vector(rng, dim(i, 8) + 1);
        let v = unit(sphere_tangent(rng, &y)).scaled(rng.gen_range(0.0..3.0));
        let oracle = mat_exp(&sphere_hat(&y, &v)).map(|e| e.matvec(&y));
        oracle.map_or(f64::INFINITY, |o| rel_err(&sphere_exp(&y, &v), &o))
    });
    let sphere_triple_err = worst_of(rng::stream(seed, "check.oracle.sphere.triple"), |rng, i| {
        let y = rng::unit_vector(rng, dim(i, 8) + 1);
        let (u, v, w) = (sphere_tangent(rng, &y), sphere_tangent(rng, &y), sphere_tangent(rng, &y));
        let oracle = triple_bracket_oracle(|x| sphere_hat(&y, x), &y, &u, &v, &w);
        rel_err(&sphere_triple(&u, &v, &w), &oracle)
    });
    let sphere_dexpinv_err = worst_of(rng::stream(seed, "check.oracle.sphere.dexpinv"), |rng, i| {
        let y = rng::unit_vector(rng, dim(i, 8) + 1);
        let theta = unit(sphere_tangent(rng, &y)).scaled(rng.gen_range(0.0..1.5));
        let w = sphere_tangent(rng, &y);
        let oracle = series.apply(
            |x: &Vector| triple_bracket_oracle(|z| sphere_hat(&y, z), &y, x, &theta, &theta),
            &w,
        );
        sphere_dexpinv(&theta, &w).map_or(f64::INFINITY, |d| rel_err(&d, &oracle))
    });

    let hyper_exp_err = worst_of(rng::stream(seed, "check.oracle.hyperbolic.exp"), |rng, i| {
        let y = hyper_point(rng, dim(i, 8));
        let v = hyper_length(hyper_tangent(rng, &y), rng.gen_range(0.0..2.0));
        let got = hyper_exp(&y, &v);
        let oracle = mat_exp(&hyper_hat(&y, &v)).map(|e| e.matvec(&y));
        match (got, oracle) {
            (Ok(g), Ok(o)) => rel_err(&g, &o),
            _ => f64::INFINITY,
        }
    });
    let hyper_triple_err = worst_of(rng::stream(seed, "check.oracle.hyperbolic.triple"), |rng, i| {
        let y = hyper_point(rng, dim(i, 8));
        let (u, v, w) = (hyper_tangent(rng, &y), hyper_tangent(rng, &y), hyper_tangent(rng, &y));
        let oracle = triple_bracket_oracle(|x| hyper_hat(&y, x), &y, &u, &v, &w);
        rel_err(&hyper_triple(&u, &v, &w), &oracle)
    });
    let hyper_dexpinv_err = worst_of(rng::stream(seed, "check.oracle.hyperbolic.dexpinv"), |rng, i| {
        let y = hyper_point(rng, dim(i, 8));
        let theta = hyper_length(hyper_tangent(rng, &y), rng.gen_range(0.0..1.5));
        let w = hyper_tangent(rng, &y);
        let oracle = series.apply(
            |x: &Vector| triple_bracket_oracle(|z| hyper_hat(&y, z), &y, x, &theta, &theta),
            &w,
        );
        hyper_dexpinv(&theta, &w).map_or(f64::INFINITY, |d| rel_err(&d, &oracle))
    });

    vec![
        CheckOutcome::new("sphere exp vs matrix exponential", SAMPLES, sphere_exp_err, ORACLE_TOLERANCE),
        CheckOutcome::new("sphere triple bracket vs commutators", SAMPLES, sphere_triple_err, ORACLE_TOLERANCE),
        CheckOutcome::new("sphere dexpinv vs commutator series", SAMPLES, sphere_dexpinv_err, ORACLE_TOLERANCE),
        CheckOutcome::new("hyperbolic exp vs matrix exponential", SAMPLES, hyper_exp_err, ORACLE_TOLERANCE),
        CheckOutcome::new("hyperbolic triple bracket vs commutators", SAMPLES, hyper_triple_err, ORACLE_TOLERANCE),
        CheckOutcome::new("hyperbolic dexpinv vs commutator series", SAMPLES, hyper_dexpinv_err, ORACLE_TOLERANCE),
    ]
}

/// Quadratic representation, transport isometry, Lorentz boosts and the
/// SPD transport identity.
pub fn identity_suite(seed: u64) -> Vec<CheckOutcome> {
    let sphere_q = worst_of(rng::stream(seed, "check.identity.sphere.q"), |rng, i| {
        let y = rng::unit_vector(rng, dim(i, 8) + 1);
        let theta = unit(sphere_tangent(rng, &y)).scaled(rng.gen_range(0.0..3.0));
        let end = sphere_exp(&y, &theta);
        match sphere_midpoint(&y, &end) {
            Ok(s) => rel_err(&sphere_sigma(&s).matmul(&sphere_sigma(&y)).matvec(&y), &end),
            Err(_) => f64::INFINITY,
        }
    });
    let sphere_transport = worst_of(rng::stream(seed, "check.identity.sphere.transport"), |rng, i| {
        let y = rng::unit_vector(rng, dim(i, 8) + 1);
        let theta = unit(sphere_tangent(rng, &y)).scaled(rng.gen_range(0.0..3.0));
        let end = sphere_exp(&y, &theta);
        let w = sphere_tangent(rng, &end);
        match sphere_midpoint(&y, &end) {
            Ok(s) => {
                let back = sphere_transport_inv(&s, &w);
                (back.norm() - w.norm()).abs().max(back.dot(&y).abs())
            }
            Err(_) => f64::INFINITY,
        }
    });
    let hyper_q = worst_of(rng::stream(seed, "check.identity.hyperbolic.q"), |rng, i| {
        let n = dim(i, 8);
        let s = hyper_point(rng, n);
        let q = hyper_quadratic(&s);
        let a = Vector::new(rng::uniform_vec(rng, n + 1, 1.0));
        let b = Vector::new(rng::uniform_vec(rng, n + 1, 1.0));
        let before = minkowski(&a, &b).unwrap_or(f64::NAN);
        let after = minkowski(&q.matvec(&a), &q.matvec(&b)).unwrap_or(f64::NAN);
        let block = q.sub(&hyper_quadratic_block(&s)).max_abs();
        ((before - after).abs().max(block)) / q.max_abs().powi(2)
    });
    let boosts = worst_of(rng::stream(seed, "check.identity.hyperbolic.boost"), |rng, i| {
        let n = dim(i, 8);
        let space = rng::uniform_vec(rng, n, 1.0);
        let Ok(s) = lorentz_boost(&space) else { return f64::INFINITY };
        let det = match sym_eig(&SymMatrix::from_symmetrized(&s)) {
            Ok((eigs, _)) => eigs.iter().product::<f64>(),
            Err(_) => f64::NAN,
        };
        let so = s.matvec(&Vector::unit(n + 1, n));
        let on_sheet = (minkowski(&so, &so).unwrap_or(f64::NAN) - 1.0).abs();
        let q = hyper_quadratic_block(&so);
        let square = s.matmul(&s).sub(&q).max_abs() / q.max_abs();
        let j = minkowski_metric(n + 1);
        let lorentz = s.transpose().matmul(&j).matmul(&s).sub(&j).max_abs() / s.max_abs().powi(2);
        s.asymmetry().max((det - 1.0).abs()).max(on_sheet).max(square).max(lorentz)
    });
    let spd_gamma = worst_of(rng::stream(seed, "check.identity.spd.gamma"), |rng, i| {
        let n = dim(i, 6);
        let b = rng::square(rng, n, 1.0);
        let y = b.matmul(&b.transpose()).add(&Matrix::identity(n)).symmetrized();
        let (Ok(y), theta, f) = (SpdPoint::new(y), rng::symmetric(rng, n, 0.5), rng::symmetric(rng, n, 1.0)) else {
            return f64::INFINITY;
        };
        let space = SpdManifold::new(n);
        let Ok(frame) = SpdFrame::new(&y) else { return f64::INFINITY };
        let k = space
            .exp_half_at(&frame, &theta, &y)
            .and_then(|mid| space.transport_inv_at(&frame, &theta, &mid, &f));
        let (Ok(k), Ok(half)) = (k, mat_exp(&theta.scaled(0.5))) else { return f64::INFINITY };
        let forward = half.matmul(&k).matmul(&half);
        let pulled = frame.s_inv.matmul(&f).matmul(&frame.s_inv);
        forward.sub(&pulled).max_abs() / pulled.max_abs().max(1.0)
    });
    let coefficients = {
        let c = DexpinvSeries::new(3);
        let c = c.coefficients();
        (c[0] + 1.0 / 6.0)
            .abs()
            .max((c[1] - 7.0 / 360.0).abs())
            .max((c[2] + 31.0 / 15120.0).abs())
    };
    vec![
        CheckOutcome::new("sphere exp is Q of the midpoint", SAMPLES, sphere_q, ORACLE_TOLERANCE),
        CheckOutcome::new("sphere transport isometry", SAMPLES, sphere_transport, ORACLE_TOLERANCE),
        CheckOutcome::new("hyperbolic Q is a Minkowski isometry", SAMPLES, hyper_q, ORACLE_TOLERANCE),
        CheckOutcome::new("hyperbolic boost polar statement", SAMPLES, boosts, ORACLE_TOLERANCE),
        CheckOutcome::new("spd stage formula vs transport", SAMPLES, spd_gamma, ORACLE_TOLERANCE),
        CheckOutcome::new("dexpinv series coefficients", 1, coefficients, 1e-17),
    ]
}

/// Largest per-step gap between the generic stepper and the hand-written
/// sphere and hyperboloid steppers on the same inputs.
pub fn agreement_suite(seed: u64) -> Vec<CheckOutcome> {
    let opts = StepOptions::default();
    let steps = 100;
    let h = 0.05;
    let mut sphere_worst = 0.0f64;
    let mut hyper_worst = 0.0f64;
    let rigid = ProblemSpec::new(SpaceKind::Sphere, "rigid_body").with_seed(seed);
    let lorentz = ProblemSpec::new(SpaceKind::Hyperbolic, "lorentz_linear").with_seed(seed);
    let (Ok(Problem::Sphere(rb)), Ok(Problem::Hyperbolic(lz))) = (build(&rigid), build(&lorentz)) else {
        return vec![CheckOutcome::new("generic vs specialized", 0, f64::INFINITY, AGREEMENT_TOLERANCE)];
    };
    for name in ["euler", "heun2", "kutta3", "rk4", "implicit_midpoint"] {
        let tableau = builtin_tableau(name).expect("builtin");
        let sphere = Sphere::new(2);
        let mut y = rb.y0.clone();
        for _ in 0..steps {
            let a = csi_step(&sphere, &tableau, &*rb.field, &y, h, opts);
            let b = cssi_step(&sphere, &tableau, &*rb.field, &y, h, opts);
            let (Ok((a, _)), Ok((b, _))) = (a, b) else {
                sphere_worst = f64::INFINITY;
                break;
            };
            sphere_worst = sphere_worst.max(a.as_vector().sub(b.as_vector()).max_abs());
            y = a;
        }
        let hyp = Hyperboloid::new(2);
        let mut y = lz.y0.clone();
        for _ in 0..steps {
            let a = chi_step(&hyp, &tableau, &*lz.field, &y, h, opts);
            let b = cssi_step(&hyp, &tableau, &*lz.field, &y, h, opts);
            let (Ok((a, _)), Ok((b, _))) = (a, b) else {
                hyper_worst = f64::INFINITY;
                break;
            };
            let scale = a.as_vector().max_abs().max(1.0);
            hyper_worst = hyper_worst.max(a.as_vector().sub(b.as_vector()).max_abs() / scale);
            y = a;
        }
    }
    vec![
        CheckOutcome::new("generic vs specialized sphere steps", 5 * steps, sphere_worst, AGREEMENT_TOLERANCE),
        CheckOutcome::new("generic vs specialized hyperbolic steps", 5 * steps, hyper_worst, AGREEMENT_TOLERANCE),
    ]
}

/// A huge step on the sphere must fail with `StepTooLarge`, the same way
/// every time.
pub fn guard_check() -> CheckOutcome {
    let spec = ProblemSpec::new(SpaceKind::Sphere, "rotation");
    let Ok(Problem::Sphere(inst)) = build(&spec) else {
        return CheckOutcome::new("sphere step guard", 0, f64::INFINITY, 0.0);
    };
    let tableau = builtin_tableau("rk4").expect("builtin");
    let sphere = Sphere::new(2);
    let attempt = || csi_step(&sphere, &tableau, &*inst.field, &inst.y0, 100.0, StepOptions::default());
    let generic = || cssi_step(&sphere, &tableau, &*inst.field, &inst.y0, 100.0, StepOptions::default());
    let outcomes = [attempt(), attempt(), generic()];
    let errors: Vec<Option<Error>> = outcomes.into_iter().map(|r| r.err()).collect();
    let all_guarded = errors.iter().all(|e| matches!(e, Some(Error::StepTooLarge { .. })));
    let deterministic = errors[0] == errors[1];
    let worst = if all_guarded && deterministic { 0.0 } else { 1.0 };
    CheckOutcome::new("sphere step guard", 3, worst, 0.0)
}

pub fn all_checks(seed: u64) -> Vec<CheckOutcome> {
    let mut out = lts_suite(seed);
    out.extend(oracle_suite(seed));
    out.extend(identity_suite(seed));
    out.extend(agreement_suite(seed));
    out.push(guard_check());
    out
}
