//! Running a problem with a chosen method and summarizing the trajectory.

use serde::Serialize;
use symmflow_core::hyperbolic::{chi_integrate, HyperPoint, Hyperboloid};
use symmflow_core::linalg::minkowski;
use symmflow_core::series::{DexpinvPolicy, DexpinvSeries};
use symmflow_core::space::{StepOptions, StepRecord};
use symmflow_core::spd::{csgi_integrate, SpdManifold, SpdPoint};
use symmflow_core::sphere::{csi_integrate, Sphere, SpherePoint};
use symmflow_core::tableau::ButcherTableau;

use crate::error::{HarnessError, Result};
use crate::problem::{Instance, Problem, SpaceKind};

/// Ambient coordinates and manifold residual of a trajectory point.
pub trait Observe {
    fn coords(&self) -> Vec<f64>;
    fn manifold_residual(&self) -> f64;
    fn min_eigenvalue(&self) -> Option<f64> {
        None
    }
}

impl Observe for SpherePoint {
    fn coords(&self) -> Vec<f64> {
        self.as_vector().as_slice().to_vec()
    }
    fn manifold_residual(&self) -> f64 {
        (self.as_vector().norm() - 1.0).abs()
    }
}

impl Observe for HyperPoint {
    fn coords(&self) -> Vec<f64> {
        self.as_vector().as_slice().to_vec()
    }
    fn manifold_residual(&self) -> f64 {
        let v = self.as_vector();
        minkowski(v, v).map_or(f64::INFINITY, |q| (q - 1.0).abs())
    }
}

impl Observe for SpdPoint {
    fn coords(&self) -> Vec<f64> {
        self.as_matrix().as_slice().to_vec()
    }
    fn manifold_residual(&self) -> f64 {
        self.as_matrix().asymmetry()
    }
    fn min_eigenvalue(&self) -> Option<f64> {
        Some(self.eigenvalues().map_or(f64::NAN, |e| e[0]))
    }
}

/// CSV column names after `t`.
pub fn coordinate_columns(space: SpaceKind, n: usize) -> Vec<String> {
    match space {
        SpaceKind::Sphere | SpaceKind::Hyperbolic => (0..=n).map(|i| format!("y{i}")).collect(),
        SpaceKind::Spd => (0..n)
            .flat_map(|i| (0..n).map(move |j| format!("m{i}{j}")))
            .collect(),
    }
}

/// Step count and effective step for a horizon.
///
/// When `h` does not divide `t_end` the count is rounded and `h` adjusted.
pub fn step_grid(t_end: f64, h: f64) -> Result<(usize, f64)> {
    if !(h.is_finite() && h > 0.0) {
        return Err(HarnessError::InvalidSpec(format!("step size h = {h}")));
    }
    if t_end == 0.0 {
        return Ok((0, h));
    }
    let steps = ((t_end / h).round() as usize).max(1);
    let h_eff = t_end / steps as f64;
    if (h_eff - h).abs() > 1e-12 * h {
        log::warn!("h = {h} does not divide T = {t_end}; using {steps} steps of {h_eff}");
    }
    Ok((steps, h_eff))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Method<'a> {
    pub tableau: &'a ButcherTableau,
    /// `None` uses the closed form (sphere, hyperbolic) or the default
    /// truncation for the tableau order (SPD).
    pub dexpinv_terms: Option<usize>,
    pub diagnostics: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub space: String,
    pub problem: String,
    pub method: String,
    pub steps: usize,
    pub h: f64,
    /// Largest manifold residual over the trajectory.
    pub max_residual: f64,
    /// Largest residual of a raw step result, before renormalization.
    pub max_raw_residual: f64,
    pub renormalizations: usize,
    pub max_discarded_normal: f64,
    pub invariant: Option<String>,
    pub invariant_drift: Option<f64>,
    pub min_eigenvalue: Option<f64>,
    pub endpoint_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub columns: Vec<String>,
    pub times: Vec<f64>,
    pub coords: Vec<Vec<f64>>,
    pub records: Vec<StepRecord>,
    pub summary: RunSummary,
}

impl Solution {
    pub fn endpoint(&self) -> &[f64] {
        self.coords.last().expect("trajectory contains y0")
    }
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn sphere_policy(terms: Option<usize>) -> DexpinvPolicy {
    terms.map_or(DexpinvPolicy::ClosedForm, DexpinvPolicy::truncated)
}

fn summarize<P: Observe, T>(
    inst: &Instance<P, T>,
    trajectory: &[P],
    records: Vec<StepRecord>,
    h: f64,
    t_end: f64,
    label: (&str, &str, &str),
) -> Result<Solution> {
    let columns = Vec::new();
    let times = (0..trajectory.len())
        .map(|l| if l + 1 == trajectory.len() && l > 0 { t_end } else { l as f64 * h })
        .collect();
    let coords: Vec<Vec<f64>> = trajectory.iter().map(Observe::coords).collect();
    let max_residual = trajectory
        .iter()
        .map(Observe::manifold_residual)
        .fold(0.0, f64::max);
    let max_raw_residual = records.iter().map(|r| r.residual).fold(max_residual, f64::max);
    let min_eigenvalue = trajectory
        .iter()
        .filter_map(Observe::min_eigenvalue)
        .reduce(f64::min);
    let (invariant, invariant_drift) = match &inst.invariant {
        Some(inv) => {
            let start = (inv.value)(&trajectory[0]);
            let drift = trajectory
                .iter()
                .map(|y| distance_max(&(inv.value)(y), &start))
                .fold(0.0, f64::max);
            (Some(inv.name.to_string()), Some(drift))
        }
        None => (None, None),
    };
    let endpoint_error = match &inst.exact {
        Some(exact) => {
            let reference = exact(t_end)?.coords();
            Some(distance(coords.last().unwrap(), &reference))
        }
        None => None,
    };
    let summary = RunSummary {
        space: label.0.to_string(),
        problem: label.1.to_string(),
        method: label.2.to_string(),
        steps: records.len(),
        h,
        max_residual,
        max_raw_residual,
        renormalizations: records.iter().filter(|r| r.renormalized).count(),
        max_discarded_normal: records.iter().map(|r| r.discarded_normal).fold(0.0, f64::max),
        invariant,
        invariant_drift,
        min_eigenvalue,
        endpoint_error,
    };
    Ok(Solution {
        columns,
        times,
        coords,
        records,
        summary,
    })
}

fn distance_max(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Integrates `problem` over `[0, t_end]` with step `h`.
pub fn solve(
    problem: &Problem,
    space: SpaceKind,
    name: &str,
    method: Method<'_>,
    h: f64,
    t_end: f64,
) -> Result<Solution> {
    let (steps, h) = step_grid(t_end, h)?;
    let options = StepOptions {
        diagnostics: method.diagnostics,
    };
    let tableau = method.tableau;
    let label = (space.as_str(), name, tableau.name());
    let mut solution = match problem {
        Problem::Sphere(inst) => {
            let n = inst.y0.as_vector().len() - 1;
            let sphere = Sphere::new(n).with_dexpinv(sphere_policy(method.dexpinv_terms));
            let (traj, recs) = csi_integrate(&sphere, tableau, &*inst.field, &inst.y0, h, steps, options)?;
            let mut s = summarize(inst, &traj, recs, h, t_end, label)?;
            s.columns = coordinate_columns(space, n);
            s
        }
        Problem::Hyperbolic(inst) => {
            let n = inst.y0.as_vector().len() - 1;
            let hyp = Hyperboloid::new(n).with_dexpinv(sphere_policy(method.dexpinv_terms));
            let (traj, recs) = chi_integrate(&hyp, tableau, &*inst.field, &inst.y0, h, steps, options)?;
            let mut s = summarize(inst, &traj, recs, h, t_end, label)?;
            s.columns = coordinate_columns(space, n);
            s
        }
        Problem::Spd(inst) => {
            let n = inst.y0.dim();
            let series = match method.dexpinv_terms {
                Some(k) => DexpinvSeries::new(k),
                None => DexpinvSeries::for_order(tableau.declared_order()),
            };
            let spd = SpdManifold::new(n).with_series(series);
            let (traj, recs) = csgi_integrate(&spd, tableau, &*inst.field, &inst.y0, h, steps, options)?;
            let mut s = summarize(inst, &traj, recs, h, t_end, label)?;
            s.columns = coordinate_columns(space, n);
            s
        }
    };
    solution.summary.h = h;
    Ok(solution)
}

/// Exact endpoint at `t_end`, when the problem has one.
pub fn exact_endpoint(problem: &Problem, t_end: f64) -> Option<Result<Vec<f64>>> {
    fn eval<P: Observe, T>(inst: &Instance<P, T>, t: f64) -> Option<Result<Vec<f64>>> {
        inst.exact.as_ref().map(|e| e(t).map(|p| p.coords()))
    }
    match problem {
        Problem::Sphere(i) => eval(i, t_end),
        Problem::Hyperbolic(i) => eval(i, t_end),
        Problem::Spd(i) => eval(i, t_end),
    }
}
