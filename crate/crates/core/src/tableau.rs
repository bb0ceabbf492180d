//! Butcher tableaus and rooted-tree order conditions.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Residual bound for an order condition to count as satisfied.
pub const ORDER_TOLERANCE: f64 = 1e-13;
const WEIGHT_SUM_TOLERANCE: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableauKind {
    Explicit,
    Implicit,
}

/// Coefficients `{a_ij}`, `{b_j}` of an `r`-stage Runge–Kutta method.
///
/// Abscissae are not stored; the order conditions use the row sums of `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct ButcherTableau {
    name: String,
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    kind: TableauKind,
    declared_order: usize,
}

impl ButcherTableau {
    /// Validates shapes, the weight sum and every order condition up to
    /// `declared_order` (capped at 4).
    pub fn new(
        name: impl Into<String>,
        a: Vec<Vec<f64>>,
        b: Vec<f64>,
        declared_order: usize,
    ) -> Result<Self> {
        let name = name.into();
        let r = b.len();
        if r == 0 {
            return Err(Error::InvalidTableau(format!("{name}: no stages")));
        }
        if a.len() != r || a.iter().any(|row| row.len() != r) {
            return Err(Error::InvalidTableau(format!(
                "{name}: coefficient matrix must be {r}x{r}"
            )));
        }
        if a.iter().flatten().chain(&b).any(|x| !x.is_finite()) {
            return Err(Error::InvalidTableau(format!("{name}: non-finite coefficient")));
        }
        if declared_order == 0 {
            return Err(Error::InvalidTableau(format!("{name}: order must be positive")));
        }
        let weight_sum: f64 = b.iter().sum();
        if (weight_sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::InvalidTableau(format!(
                "{name}: weights sum to {weight_sum}"
            )));
        }
        let explicit = (0..r).all(|i| (i..r).all(|j| a[i][j] == 0.0));
        let kind = if explicit {
            TableauKind::Explicit
        } else {
            TableauKind::Implicit
        };
        let tableau = ButcherTableau {
            name,
            a,
            b,
            kind,
            declared_order,
        };
        if let Some(bad) = check_order_conditions(&tableau, declared_order)
            .into_iter()
            .find(|c| c.residual > ORDER_TOLERANCE)
        {
            return Err(Error::InvalidTableau(format!(
                "{}: order condition {} violated by {:e}",
                tableau.name, bad.name, bad.residual
            )));
        }
        Ok(tableau)
    }

    pub fn builtin(name: BuiltinTableau) -> Self {
        use BuiltinTableau::*;
        let (a, b, p) = match name {
            Euler => (vec![vec![0.0]], vec![1.0], 1),
            Heun2 => (
                vec![vec![0.0, 0.0], vec![1.0, 0.0]],
                vec![0.5, 0.5],
                2,
            ),
            Kutta3 => (
                vec![
                    vec![0.0, 0.0, 0.0],
                    vec![0.5, 0.0, 0.0],
                    vec![-1.0, 2.0, 0.0],
                ],
                vec![1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0],
                3,
            ),
            Rk4 => (
                vec![
                    vec![0.0, 0.0, 0.0, 0.0],
                    vec![0.5, 0.0, 0.0, 0.0],
                    vec![0.0, 0.5, 0.0, 0.0],
                    vec![0.0, 0.0, 1.0, 0.0],
                ],
                vec![1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0],
                4,
            ),
            ImplicitMidpoint => (vec![vec![0.5]], vec![1.0], 2),
        };
        Self::new(name.as_str(), a, b, p).expect("builtin tableau is valid")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn stages(&self) -> usize {
        self.b.len()
    }

    pub fn a(&self, i: usize, j: usize) -> f64 {
        self.a[i][j]
    }

    pub fn weights(&self) -> &[f64] {
        &self.b
    }

    pub fn kind(&self) -> TableauKind {
        self.kind
    }

    pub fn is_explicit(&self) -> bool {
        self.kind == TableauKind::Explicit
    }

    pub fn declared_order(&self) -> usize {
        self.declared_order
    }

    /// Row sums `c_i = Σ_j a_ij`.
    pub fn abscissae(&self) -> Vec<f64> {
        self.a.iter().map(|row| row.iter().sum()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BuiltinTableau {
    Euler,
    Heun2,
    Kutta3,
    Rk4,
    ImplicitMidpoint,
}

impl BuiltinTableau {
    pub const ALL: [BuiltinTableau; 5] = [
        BuiltinTableau::Euler,
        BuiltinTableau::Heun2,
        BuiltinTableau::Kutta3,
        BuiltinTableau::Rk4,
        BuiltinTableau::ImplicitMidpoint,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BuiltinTableau::Euler => "euler",
            BuiltinTableau::Heun2 => "heun2",
            BuiltinTableau::Kutta3 => "kutta3",
            BuiltinTableau::Rk4 => "rk4",
            BuiltinTableau::ImplicitMidpoint => "implicit_midpoint",
        }
    }
}

impl fmt::Display for BuiltinTableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BuiltinTableau {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BuiltinTableau::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::UnknownTableau(s.to_string()))
    }
}

/// Looks a builtin tableau up by name.
pub fn builtin_tableau(name: &str) -> Result<ButcherTableau> {
    name.parse().map(ButcherTableau::builtin)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderCondition {
    pub name: &'static str,
    pub order: usize,
    /// Absolute difference between the tableau sum and the tree value.
    pub residual: f64,
}

/// Residuals of all rooted-tree order conditions through order `min(p, 4)`.
pub fn check_order_conditions(t: &ButcherTableau, p: usize) -> Vec<OrderCondition> {
    let r = t.stages();
    let b = &t.b;
    let c = t.abscissae();
    let ac: Vec<f64> = (0..r)
        .map(|i| (0..r).map(|j| t.a[i][j] * c[j]).sum())
        .collect();
    let ac2: Vec<f64> = (0..r)
        .map(|i| (0..r).map(|j| t.a[i][j] * c[j] * c[j]).sum())
        .collect();
    let aac: Vec<f64> = (0..r)
        .map(|i| (0..r).map(|j| t.a[i][j] * ac[j]).sum())
        .collect();
    let weighted = |f: &dyn Fn(usize) -> f64| (0..r).map(|i| b[i] * f(i)).sum::<f64>();

    let all = [
        ("sum b", 1, weighted(&|_| 1.0), 1.0),
        ("sum b c", 2, weighted(&|i| c[i]), 0.5),
        ("sum b c^2", 3, weighted(&|i| c[i] * c[i]), 1.0 / 3.0),
        ("sum b a c", 3, weighted(&|i| ac[i]), 1.0 / 6.0),
        ("sum b c^3", 4, weighted(&|i| c[i] * c[i] * c[i]), 0.25),
        ("sum b c a c", 4, weighted(&|i| c[i] * ac[i]), 0.125),
        ("sum b a c^2", 4, weighted(&|i| ac2[i]), 1.0 / 12.0),
        ("sum b a a c", 4, weighted(&|i| aac[i]), 1.0 / 24.0),
    ];
    all.into_iter()
        .filter(|(_, order, _, _)| *order <= p.min(4))
        .map(|(name, order, value, exact)| OrderCondition {
            name,
            order,
            residual: (value - exact).abs(),
        })
        .collect()
}
