//! Convergence-order studies.

use serde::Serialize;
use symmflow_core::tableau::{builtin_tableau, ButcherTableau};

use crate::error::{HarnessError, Result};
use crate::problem::{build, Problem, ProblemSpec, SpaceKind};
use crate::run::{distance, exact_endpoint, solve, Method};

/// Refinement of the self-reference relative to the finest step.
pub const REFERENCE_REFINEMENT: f64 = 16.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceKind {
    Exact,
    /// rk4 run at `h_min / 16`.
    SelfReference,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub h: Vec<f64>,
    pub errors: Vec<f64>,
    /// `log(e_i / e_{i+1}) / log(h_i / h_{i+1})` for consecutive pairs.
    pub pair_orders: Vec<f64>,
    /// Least-squares slope of `log e` against `log h`.
    pub fitted_order: f64,
    pub reference: ReferenceKind,
}

/// Least-squares slope of `log y` against `log x`.
pub fn fitted_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

pub fn pair_orders(h: &[f64], errors: &[f64]) -> Vec<f64> {
    h.windows(2)
        .zip(errors.windows(2))
        .map(|(h, e)| (e[0] / e[1]).ln() / (h[0] / h[1]).ln())
        .collect()
}

fn check_grid(h_list: &[f64]) -> Result<()> {
    if h_list.len() < 2 {
        return Err(HarnessError::InvalidStudy("need at least two step sizes".into()));
    }
    if h_list.iter().any(|h| !(h.is_finite() && *h > 0.0)) {
        return Err(HarnessError::InvalidStudy("step sizes must be positive".into()));
    }
    if h_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(HarnessError::InvalidStudy("step sizes must be strictly decreasing".into()));
    }
    Ok(())
}

fn reference_endpoint(problem: &Problem, spec: &ProblemSpec, h_min: f64) -> Result<(Vec<f64>, ReferenceKind)> {
    if let Some(exact) = exact_endpoint(problem, spec.t_end) {
        return Ok((exact?, ReferenceKind::Exact));
    }
    let rk4 = builtin_tableau("rk4")?;
    let method = Method {
        tableau: &rk4,
        // a long series so the SPD reference is not limited by truncation
        dexpinv_terms: (spec.space == SpaceKind::Spd).then_some(6),
        diagnostics: false,
    };
    let h_ref = h_min / REFERENCE_REFINEMENT;
    solve(problem, spec.space, &spec.problem, method, h_ref, spec.t_end)
        .map(|s| (s.endpoint().to_vec(), ReferenceKind::SelfReference))
        .map_err(|e| HarnessError::ReferenceUnavailable(format!("reference run at h = {h_ref:e} failed: {e}")))
}

/// Endpoint errors of `tableau` on `spec` for each step in `h_list`.
///
/// The step sizes run on separate threads.
pub fn converge(
    spec: &ProblemSpec,
    tableau: &ButcherTableau,
    dexpinv_terms: Option<usize>,
    h_list: &[f64],
) -> Result<ConvergenceReport> {
    check_grid(h_list)?;
    if spec.t_end <= 0.0 {
        return Err(HarnessError::InvalidStudy("horizon must be positive".into()));
    }
    let problem = build(spec)?;
    let h_min = *h_list.last().unwrap();
    let (reference, kind) = reference_endpoint(&problem, spec, h_min)?;
    let method = Method {
        tableau,
        dexpinv_terms,
        diagnostics: false,
    };

    let runs: Vec<Result<(f64, f64)>> = std::thread::scope(|scope| {
        let handles: Vec<_> = h_list
            .iter()
            .map(|&h| {
                let (problem, reference) = (&problem, &reference);
                scope.spawn(move || {
                    let sol = solve(problem, spec.space, &spec.problem, method, h, spec.t_end)?;
                    Ok((sol.summary.h, distance(sol.endpoint(), reference)))
                })
            })
            .collect();
        handles.into_iter().map(|t| t.join().expect("convergence worker panicked")).collect()
    });
    let (h, errors): (Vec<f64>, Vec<f64>) = runs.into_iter().collect::<Result<Vec<_>>>()?.into_iter().unzip();
    if let Some(i) = errors.iter().position(|e| !(e.is_finite() && *e > 0.0)) {
        return Err(HarnessError::InvalidStudy(format!(
            "endpoint error {} at h = {} cannot be used for an order fit",
            errors[i], h[i]
        )));
    }
    Ok(ConvergenceReport {
        pair_orders: pair_orders(&h, &errors),
        fitted_order: fitted_slope(&h, &errors),
        h,
        errors,
        reference: kind,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_a_power_law() {
        let h = [0.1, 0.05, 0.025];
        let e: Vec<f64> = h.iter().map(|x: &f64| 3.0 * x.powi(4)).collect();
        assert!((fitted_slope(&h, &e) - 4.0).abs() < 1e-12);
        let p = pair_orders(&h, &e);
        assert!(p.iter().all(|o| (o - 4.0).abs() < 1e-12));
    }

    #[test]
    fn grid_must_decrease() {
        let spec = ProblemSpec::new(SpaceKind::Sphere, "rotation");
        let rk4 = builtin_tableau("rk4").unwrap();
        for bad in [&[0.1][..], &[0.05, 0.1], &[0.1, -0.05]] {
            assert!(matches!(converge(&spec, &rk4, None, bad), Err(HarnessError::InvalidStudy(_))));
        }
    }

    #[test]
    fn euler_is_first_order() {
        let spec = ProblemSpec::new(SpaceKind::Hyperbolic, "lorentz_linear");
        let euler = builtin_tableau("euler").unwrap();
        let r = converge(&spec, &euler, None, &[0.02, 0.01, 0.005, 0.0025]).unwrap();
        assert_eq!(r.reference, ReferenceKind::Exact);
        assert!((r.fitted_order - 1.0).abs() <= 0.2, "{r:?}");
    }

    #[test]
    fn double_bracket_uses_self_reference() {
        let spec = ProblemSpec::new(SpaceKind::Spd, "double_bracket");
        let heun = builtin_tableau("heun2").unwrap();
        let r = converge(&spec, &heun, None, &[0.1, 0.05, 0.025]).unwrap();
        assert_eq!(r.reference, ReferenceKind::SelfReference);
        assert!((r.fitted_order - 2.0).abs() <= 0.3, "{r:?}");
    }

    #[test]
    fn failing_reference_is_reported() {
        let spec = ProblemSpec::new(SpaceKind::Sphere, "rigid_body").with_horizon(1.0);
        let rk4 = builtin_tableau("rk4").unwrap();
        let mut spec = spec;
        spec.inertia = Some([1e-9, 2.0, 3.0]);
        let err = converge(&spec, &rk4, None, &[100.0, 50.0]).unwrap_err();
        assert!(matches!(err, HarnessError::ReferenceUnavailable(_)), "{err}");
    }
}
