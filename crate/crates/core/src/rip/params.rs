//! Exponent parameters for the conditional flat-RIP argument.
//!
//! The conditions checked here, by name:
//!
//! * `alpha_range`: `0 < alpha < 1/2`
//! * `beta0_positive`: `beta0 > 0`
//! * `alpha_plus_two_beta0`: `alpha + 2 beta0 < 1/2`
//! * `eps_order`: `0 <= eps1 < eps2 < beta0`
//! * `tau_lower`: `max(alpha + beta0, (1 - eps1)/2 - beta0) < tau`
//! * `tau_upper`: `tau < 1/2 - eps2`
//! * `gamma_exceeds_half`: `(tau + beta0) / (1 - eps1) > 1/2`

use serde::Serialize;

use crate::field::PrimeField;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalysisParams {
    pub alpha: f64,
    pub beta0: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub tau: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamViolation {
    pub condition: &'static str,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamReport {
    pub ok: bool,
    pub params: AnalysisParams,
    /// Open interval of admissible `tau` for the given `alpha, beta0, eps1, eps2`.
    pub tau_interval: (f64, f64),
    /// `(tau + beta0) / (1 - eps1)`, the sparsity exponent relative to `M`.
    pub gamma: Option<f64>,
    pub violations: Vec<ParamViolation>,
}

/// `(lower, upper)` such that admissible `tau` satisfy `lower < tau < upper`.
pub fn tau_interval(alpha: f64, beta0: f64, eps1: f64, eps2: f64) -> (f64, f64) {
    let lower = (alpha + beta0).max((1.0 - eps1) / 2.0 - beta0);
    (lower, 0.5 - eps2)
}

/// True when `alpha, beta0, eps1, eps2` satisfy the three structural
/// conditions (everything except the choice of `tau`).
pub fn structural_conditions_hold(alpha: f64, beta0: f64, eps1: f64, eps2: f64) -> bool {
    alpha > 0.0
        && alpha < 0.5
        && beta0 > 0.0
        && alpha + 2.0 * beta0 < 0.5
        && 0.0 <= eps1
        && eps1 < eps2
        && eps2 < beta0
}

pub fn validate_params(params: AnalysisParams) -> ParamReport {
    let AnalysisParams { alpha, beta0, eps1, eps2, tau } = params;
    let mut violations = Vec::new();
    let fail = |violations: &mut Vec<ParamViolation>, condition: &'static str, detail: String| {
        violations.push(ParamViolation { condition, detail });
    };
    let finite = [alpha, beta0, eps1, eps2, tau].iter().all(|v| v.is_finite());
    if !finite {
        fail(&mut violations, "finite", "all parameters must be finite".into());
    }
    if !(alpha > 0.0 && alpha < 0.5) {
        fail(&mut violations, "alpha_range", format!("need 0 < alpha < 1/2, got alpha = {alpha}"));
    }
    if !(beta0 > 0.0) {
        fail(&mut violations, "beta0_positive", format!("need beta0 > 0, got {beta0}"));
    }
    if !(alpha + 2.0 * beta0 < 0.5) {
        fail(
            &mut violations,
            "alpha_plus_two_beta0",
            format!("need alpha + 2 beta0 < 1/2, got {}", alpha + 2.0 * beta0),
        );
    }
    if !(0.0 <= eps1 && eps1 < eps2 && eps2 < beta0) {
        fail(
            &mut violations,
            "eps_order",
            format!("need 0 <= eps1 < eps2 < beta0, got eps1 = {eps1}, eps2 = {eps2}, beta0 = {beta0}"),
        );
    }
    let (lower, upper) = tau_interval(alpha, beta0, eps1, eps2);
    if !(lower < tau) {
        fail(&mut violations, "tau_lower", format!("need tau > {lower}, got {tau}"));
    }
    if !(tau < upper) {
        fail(&mut violations, "tau_upper", format!("need tau < {upper}, got {tau}"));
    }
    let gamma = (eps1 < 1.0).then(|| (tau + beta0) / (1.0 - eps1));
    if violations.is_empty() && gamma.is_none_or(|g| !(g > 0.5)) {
        fail(&mut violations, "gamma_exceeds_half", format!("need gamma > 1/2, got {gamma:?}"));
    }
    ParamReport {
        ok: violations.is_empty(),
        params,
        tau_interval: (lower, upper),
        gamma: if violations.is_empty() { gamma } else { None },
        violations,
    }
}

/// Whether `p - 1` has the factor `k` with `p^eps1 < k <= p^eps2`.
pub fn prime_condition_holds(field: &PrimeField, k: u64, eps1: f64, eps2: f64) -> bool {
    let p = field.modulus() as f64;
    field.check_divisor(k).is_ok() && (k as f64) > p.powf(eps1) && (k as f64) <= p.powf(eps2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn params(alpha: f64, beta0: f64, eps1: f64, eps2: f64, tau: f64) -> AnalysisParams {
        AnalysisParams { alpha, beta0, eps1, eps2, tau }
    }

    fn names(r: &ParamReport) -> Vec<&'static str> {
        r.violations.iter().map(|v| v.condition).collect()
    }

    #[test]
    fn accepts_feasible_point() {
        let r = validate_params(params(0.1, 0.15, 0.0, 0.05, 0.44));
        assert!(r.ok, "{r:?}");
        assert_abs_diff_eq!(r.gamma.unwrap(), 0.59, epsilon = 1e-12);
        assert_abs_diff_eq!(r.tau_interval.0, 0.35, epsilon = 1e-12);
        assert_abs_diff_eq!(r.tau_interval.1, 0.45, epsilon = 1e-12);
    }

    #[test]
    fn rejects_large_beta0() {
        let r = validate_params(params(0.2, 0.2, 0.0, 0.05, 0.44));
        assert!(!r.ok);
        assert!(names(&r).contains(&"alpha_plus_two_beta0"));
        assert_eq!(r.gamma, None);
    }

    #[test]
    fn rejects_eps_order() {
        let r = validate_params(params(0.1, 0.15, 0.1, 0.05, 0.44));
        assert!(names(&r).contains(&"eps_order"));
    }

    #[test]
    fn rejects_tau_outside_interval() {
        assert!(names(&validate_params(params(0.1, 0.15, 0.0, 0.05, 0.30))).contains(&"tau_lower"));
        assert!(names(&validate_params(params(0.1, 0.15, 0.0, 0.05, 0.46))).contains(&"tau_upper"));
        assert!(names(&validate_params(params(0.0, 0.15, 0.0, 0.05, 0.44))).contains(&"alpha_range"));
        assert!(names(&validate_params(params(0.1, f64::NAN, 0.0, 0.05, 0.44))).contains(&"finite"));
    }

    #[test]
    fn prime_condition() {
        let f = PrimeField::new(101).unwrap();
        // 101^0.3 = 3.99, 101^0.5 = 10.05
        assert!(prime_condition_holds(&f, 5, 0.3, 0.5));
        assert!(prime_condition_holds(&f, 10, 0.3, 0.5));
        assert!(!prime_condition_holds(&f, 2, 0.3, 0.5));
        assert!(!prime_condition_holds(&f, 20, 0.3, 0.5));
        assert!(!prime_condition_holds(&f, 7, 0.3, 0.5));
    }
}
