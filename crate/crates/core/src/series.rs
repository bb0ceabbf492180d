//! Scalar kernels shared by the constant-curvature geometries and the
//! truncated `dExp⁻¹` series.

/// Below this angle the ratio functions switch to their Taylor polynomials.
pub const PHI_SMALL: f64 = 1e-4;

/// `sin φ / φ`
pub fn sin_over(phi: f64) -> f64 {
    if phi.abs() < PHI_SMALL {
        let p2 = phi * phi;
        1.0 - p2 / 6.0 + p2 * p2 / 120.0
    } else {
        phi.sin() / phi
    }
}

/// `sinh φ / φ`
pub fn sinh_over(phi: f64) -> f64 {
    if phi.abs() < PHI_SMALL {
        let p2 = phi * phi;
        1.0 + p2 / 6.0 + p2 * p2 / 120.0
    } else {
        phi.sinh() / phi
    }
}

/// `φ / sin φ − 1`
pub fn phi_over_sin_minus_one(phi: f64) -> f64 {
    if phi.abs() < PHI_SMALL {
        let p2 = phi * phi;
        p2 / 6.0 + 7.0 * p2 * p2 / 360.0
    } else {
        phi / phi.sin() - 1.0
    }
}

/// `φ / sinh φ − 1`
pub fn phi_over_sinh_minus_one(phi: f64) -> f64 {
    if phi.abs() < PHI_SMALL {
        let p2 = phi * phi;
        -p2 / 6.0 + 7.0 * p2 * p2 / 360.0
    } else {
        phi / phi.sinh() - 1.0
    }
}

/// `sin φ / φ − 1`
pub fn sin_over_minus_one(phi: f64) -> f64 {
    if phi.abs() < PHI_SMALL {
        let p2 = phi * phi;
        -p2 / 6.0 + p2 * p2 / 120.0
    } else {
        phi.sin() / phi - 1.0
    }
}

/// `sinh φ / φ − 1`
pub fn sinh_over_minus_one(phi: f64) -> f64 {
    if phi.abs() < PHI_SMALL {
        let p2 = phi * phi;
        p2 / 6.0 + p2 * p2 / 120.0
    } else {
        phi.sinh() / phi - 1.0
    }
}

/// Truncation of `√x / sinh √x = 1 + Σ_{n≥1} c_n xⁿ`.
///
/// Applied to `x = ad²_θ = [·, θ, θ]` this is `dExp⁻¹_θ`.
#[derive(Debug, Clone, PartialEq)]
pub struct DexpinvSeries {
    coefficients: Vec<f64>,
}

impl DexpinvSeries {
    /// Keeps the first `terms` non-constant coefficients.
    pub fn new(terms: usize) -> Self {
        // Invert sinh√x/√x = Σ_k x^k / (2k+1)! as a power series.
        let mut forward = Vec::with_capacity(terms + 1);
        let mut factorial = 1.0;
        forward.push(1.0);
        for k in 1..=terms {
            factorial *= ((2 * k) * (2 * k + 1)) as f64;
            forward.push(1.0 / factorial);
        }
        let mut inverse = vec![1.0];
        for n in 1..=terms {
            let c: f64 = (1..=n).map(|k| forward[k] * inverse[n - k]).sum();
            inverse.push(-c);
        }
        inverse.remove(0);
        DexpinvSeries {
            coefficients: inverse,
        }
    }

    /// Default truncation for a method of order `p`.
    ///
    /// The term `xⁿ` perturbs a stage by `O(h^{2n+1})`, so terms with
    /// `2n + 1 ≤ p` are kept.
    pub fn for_order(p: usize) -> Self {
        Self::new(p.saturating_sub(1) / 2)
    }

    pub fn terms(&self) -> usize {
        self.coefficients.len()
    }

    /// `c_1, …, c_terms`
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// `w + Σ_n c_n ad2ⁿ(w)`
    pub fn apply<T: crate::space::Tangent>(&self, ad2: impl Fn(&T) -> T, w: &T) -> T {
        let mut out = w.clone();
        let mut power = w.clone();
        for &c in &self.coefficients {
            power = ad2(&power);
            out.axpy(c, &power);
        }
        out
    }
}

/// How `dExp⁻¹` is evaluated on the constant-curvature spaces.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum DexpinvPolicy {
    /// The exact trigonometric/hyperbolic closed form.
    #[default]
    ClosedForm,
    /// The series in `ad²_θ` truncated after the given number of terms;
    /// zero terms means no correction at all.
    Truncated(DexpinvSeries),
}

impl DexpinvPolicy {
    pub fn truncated(terms: usize) -> Self {
        DexpinvPolicy::Truncated(DexpinvSeries::new(terms))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leading_coefficients() {
        let s = DexpinvSeries::new(3);
        let c = s.coefficients();
        assert!((c[0] + 1.0 / 6.0).abs() < 1e-17);
        assert!((c[1] - 7.0 / 360.0).abs() < 1e-17);
        assert!((c[2] + 31.0 / 15120.0).abs() < 1e-18);
    }

    #[test]
    fn coefficients_match_bernoulli_form() {
        // c_n = -(2^{2n} - 2) B_{2n} / (2n)!
        let bernoulli = [
            1.0 / 6.0,
            -1.0 / 30.0,
            1.0 / 42.0,
            -1.0 / 30.0,
            5.0 / 66.0,
            -691.0 / 2730.0,
            7.0 / 6.0,
        ];
        let s = DexpinvSeries::new(bernoulli.len());
        let mut factorial = 1.0;
        for (i, b) in bernoulli.iter().enumerate() {
            let n = i + 1;
            factorial *= ((2 * n - 1) * (2 * n)) as f64;
            let expected = -(4f64.powi(n as i32) - 2.0) * b / factorial;
            let got = s.coefficients()[i];
            assert!(
                (got - expected).abs() <= 1e-14 * expected.abs(),
                "n={n}: {got} vs {expected}"
            );
        }
    }

    #[test]
    fn scalar_series_reproduces_phi_over_sinh() {
        let s = DexpinvSeries::new(40);
        for phi in [0.1f64, 0.5, 1.0, 2.0] {
            let x = phi * phi;
            let sum: f64 = 1.0
                + s.coefficients()
                    .iter()
                    .enumerate()
                    .map(|(i, c)| c * x.powi(i as i32 + 1))
                    .sum::<f64>();
            assert!((sum - phi / phi.sinh()).abs() < 1e-12, "phi={phi}");
        }
    }

    #[test]
    fn default_truncation_per_order() {
        assert_eq!(DexpinvSeries::for_order(1).terms(), 0);
        assert_eq!(DexpinvSeries::for_order(2).terms(), 0);
        assert_eq!(DexpinvSeries::for_order(3).terms(), 1);
        assert_eq!(DexpinvSeries::for_order(4).terms(), 1);
    }

    #[test]
    fn ratio_branches_are_continuous() {
        for f in [
            sin_over as fn(f64) -> f64,
            sinh_over,
            phi_over_sin_minus_one,
            phi_over_sinh_minus_one,
            sin_over_minus_one,
            sinh_over_minus_one,
        ] {
            let below = f(PHI_SMALL * (1.0 - 1e-9));
            let above = f(PHI_SMALL * (1.0 + 1e-9));
            assert!((below - above).abs() <= 1e-15, "{below} vs {above}");
        }
        assert_eq!(sin_over(0.0), 1.0);
        assert_eq!(phi_over_sin_minus_one(0.0), 0.0);
    }
}
