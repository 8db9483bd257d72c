//! Additive and multiplicative characters of F_p and their Gauss sums.
//!
//! Angles are reduced with integer arithmetic before conversion to floating
//! point, so two evaluations at the same angle are bit-identical. Every sum
//! runs over `x = 0, 1, ..., p - 1` in that order.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::PrimeField;

/// Complex values of characters and character sums.
pub type ComplexValue = Complex64;

/// `exp(2 pi i * num / den)` with `num` already reduced into `0..den`.
#[inline]
pub fn root_of_unity(num: u64, den: u64) -> ComplexValue {
    debug_assert!(num < den);
    let (s, c) = (TAU * num as f64 / den as f64).sin_cos();
    ComplexValue::new(c, s)
}

/// The canonical additive character `psi(x) = exp(2 pi i x / p)`.
#[inline]
pub fn additive_char(field: &PrimeField, x: i64) -> ComplexValue {
    root_of_unity(field.reduce(x), field.modulus())
}

/// A multiplicative character `chi_k^h`: `g^t -> exp(2 pi i h t / k)`,
/// extended by `chi(0) = 0`.
#[derive(Debug, Clone, Copy)]
pub struct MultCharSpec<'a> {
    field: &'a PrimeField,
    k: u64,
    h: i64,
}

impl<'a> MultCharSpec<'a> {
    /// `k` must divide `p - 1`. Any integer exponent is accepted; `h = 0 mod k`
    /// gives the trivial character.
    pub fn new(field: &'a PrimeField, k: u64, h: i64) -> Result<Self> {
        field.check_divisor(k)?;
        Ok(Self { field, k, h })
    }

    pub fn field(&self) -> &'a PrimeField {
        self.field
    }

    pub fn order(&self) -> u64 {
        self.k
    }

    pub fn exponent(&self) -> i64 {
        self.h
    }

    /// `h mod k` in `0..k`.
    pub fn reduced_exponent(&self) -> u64 {
        self.h.rem_euclid(self.k as i64) as u64
    }

    pub fn is_trivial(&self) -> bool {
        self.reduced_exponent() == 0
    }

    /// `chi_k^{-h}`.
    pub fn inverse(&self) -> Self {
        Self { h: -self.h, ..*self }
    }

    pub(crate) fn require_nontrivial(&self, what: &'static str) -> Result<()> {
        if self.is_trivial() {
            return Err(Error::TrivialCharacter { what, k: self.k, h: self.h });
        }
        Ok(())
    }

    /// Character value at `x`; zero when `x = 0 mod p`.
    #[inline]
    pub fn value(&self, x: i64) -> ComplexValue {
        match self.field.dlog(self.field.reduce(x)) {
            None => ComplexValue::new(0.0, 0.0),
            Some(t) => {
                let num = (self.reduced_exponent() as u128 * t as u128 % self.k as u128) as u64;
                root_of_unity(num, self.k)
            }
        }
    }

    /// Values at `0, 1, ..., p - 1`.
    pub fn table(&self) -> Vec<ComplexValue> {
        (0..self.field.modulus() as i64).map(|x| self.value(x)).collect()
    }

    /// `G(a, chi) = sum_x chi(x) psi(a x)` by direct summation.
    pub fn gauss_sum(&self, a: i64) -> ComplexValue {
        let p = self.field.modulus();
        let a = self.field.reduce(a);
        (0..p)
            .map(|x| self.value(x as i64) * root_of_unity(crate::field::mul_mod(a, x, p), p))
            .sum()
    }
}

/// `G_k(a) = sum_x psi(a x^k)` by direct summation.
pub fn power_gauss_sum(field: &PrimeField, k: u64, a: i64) -> Result<ComplexValue> {
    field.check_divisor(k)?;
    let p = field.modulus();
    let a = field.reduce(a);
    Ok((0..p)
        .map(|x| root_of_unity(crate::field::mul_mod(a, field.pow(x, k), p), p))
        .sum())
}

/// Both sides of the decomposition of `G_k(a)` into ordinary Gauss sums.
#[derive(Debug, Clone, Serialize)]
pub struct GaussIdentityCheck {
    pub p: u64,
    pub k: u64,
    pub a: u64,
    /// `G_k(a)` by direct summation.
    pub power_sum: ComplexValue,
    /// `sum_{h=1}^{k-1} G(a, chi_k^h)`.
    pub twisted_form: ComplexValue,
    /// `sum_{h=1}^{k-1} chi_k^{-h}(a) G(chi_k^h)`.
    pub conjugate_form: ComplexValue,
    /// `|power_sum - conjugate_form|`.
    pub residual: f64,
    /// `|power_sum - twisted_form|`.
    pub twisted_residual: f64,
    /// `|twisted_form - conjugate_form|`.
    pub forms_distance: f64,
}

impl GaussIdentityCheck {
    pub fn max_residual(&self) -> f64 {
        self.residual.max(self.twisted_residual).max(self.forms_distance)
    }
}

/// Evaluates `G_k(a)` directly and through both Gauss-sum expansions.
///
/// Needs `k >= 2`, `k | p - 1` and `a != 0 mod p`.
pub fn verify_gauss_identity(field: &PrimeField, k: u64, a: i64) -> Result<GaussIdentityCheck> {
    field.check_divisor(k)?;
    if k < 2 {
        return Err(Error::InvalidOrder { p: field.modulus(), k, reason: "order must be at least 2" });
    }
    let a_red = field.reduce(a);
    if a_red == 0 {
        return Err(Error::ZeroElement { what: "the Gauss-sum decomposition of G_k(a)" });
    }
    let power_sum = power_gauss_sum(field, k, a)?;
    let mut twisted_form = ComplexValue::new(0.0, 0.0);
    let mut conjugate_form = ComplexValue::new(0.0, 0.0);
    for h in 1..k as i64 {
        let chi = MultCharSpec::new(field, k, h)?;
        twisted_form += chi.gauss_sum(a);
        conjugate_form += chi.inverse().value(a) * chi.gauss_sum(1);
    }
    Ok(GaussIdentityCheck {
        p: field.modulus(),
        k,
        a: a_red,
        power_sum,
        twisted_form,
        conjugate_form,
        residual: (power_sum - conjugate_form).norm(),
        twisted_residual: (power_sum - twisted_form).norm(),
        forms_distance: (twisted_form - conjugate_form).norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn f(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn additive_examples() {
        let f13 = f(13);
        assert_eq!(additive_char(&f13, 0), ComplexValue::new(1.0, 0.0));
        assert_eq!(additive_char(&f13, 13), ComplexValue::new(1.0, 0.0));
        assert_eq!(additive_char(&f13, -12), additive_char(&f13, 1));
        let z = additive_char(&f(3), 1);
        assert_abs_diff_eq!(z.re, -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(z.im, 0.866_025_403_784_438_6, epsilon = 1e-15);
    }

    #[test]
    fn additive_is_homomorphism() {
        for p in [3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31] {
            let fp = f(p);
            for x in 0..p as i64 {
                for y in 0..p as i64 {
                    let lhs = additive_char(&fp, x + y);
                    let rhs = additive_char(&fp, x) * additive_char(&fp, y);
                    assert!((lhs - rhs).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn mult_char_examples() {
        let f13 = f(13);
        let chi = MultCharSpec::new(&f13, 2, 1).unwrap();
        assert_eq!(chi.value(0), ComplexValue::new(0.0, 0.0));
        assert_eq!(chi.value(1), ComplexValue::new(1.0, 0.0));
        assert_abs_diff_eq!(chi.value(4).re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(chi.value(4).im, 0.0, epsilon = 1e-15);
        // 2 is a generator, so it is a non-residue.
        assert_abs_diff_eq!(chi.value(2).re, -1.0, epsilon = 1e-15);
        assert!(MultCharSpec::new(&f13, 5, 1).is_err());
    }

    #[test]
    fn mult_char_properties() {
        for p in [5u64, 7, 13, 31] {
            let fp = f(p);
            for k in crate::field::divisors(p - 1) {
                for h in -(k as i64)..=(k as i64) {
                    let chi = MultCharSpec::new(&fp, k, h).unwrap();
                    let inv = chi.inverse();
                    for x in 1..p as i64 {
                        assert!((chi.value(x).norm() - 1.0).abs() < 1e-12);
                        assert!((inv.value(x) - chi.value(x).conj()).norm() < 1e-12);
                        for y in 1..p as i64 {
                            let lhs = chi.value(x * y);
                            assert!((lhs - chi.value(x) * chi.value(y)).norm() < 1e-12);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn gauss_sum_examples() {
        let f13 = f(13);
        let chi = MultCharSpec::new(&f13, 3, 1).unwrap();
        assert_abs_diff_eq!(chi.gauss_sum(1).norm(), 13f64.sqrt(), epsilon = 1e-9);
        assert!(chi.gauss_sum(0).norm() < 1e-12);

        let f5 = f(5);
        let legendre = MultCharSpec::new(&f5, 2, 1).unwrap();
        let g = legendre.gauss_sum(1);
        assert_abs_diff_eq!(g.re, 5f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(g.im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn trivial_gauss_sums() {
        let f13 = f(13);
        let trivial = MultCharSpec::new(&f13, 3, 3).unwrap();
        assert!(trivial.is_trivial());
        // sum over nonzero x of psi(x) = -1; at a = 0 every nonzero term is 1.
        assert!((trivial.gauss_sum(1) - ComplexValue::new(-1.0, 0.0)).norm() < 1e-12);
        assert!((trivial.gauss_sum(0) - ComplexValue::new(12.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn power_gauss_sum_examples() {
        let f5 = f(5);
        assert_eq!(power_gauss_sum(&f5, 2, 0).unwrap(), ComplexValue::new(5.0, 0.0));
        let g = power_gauss_sum(&f5, 2, 1).unwrap();
        assert_abs_diff_eq!(g.re, 5f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(g.im, 0.0, epsilon = 1e-12);

        // Frozen from an independent 13-term summation.
        let g = power_gauss_sum(&f(13), 3, 1).unwrap();
        assert_abs_diff_eq!(g.re, 1.821_671_664_892_652_3, epsilon = 1e-12);
        assert_abs_diff_eq!(g.im, 0.0, epsilon = 1e-12);
        assert!(power_gauss_sum(&f(13), 5, 1).is_err());
    }

    #[test]
    fn identity_examples() {
        for (p, k, a) in [(13u64, 2u64, 1i64), (13, 3, 5), (29, 4, 17)] {
            let check = verify_gauss_identity(&f(p), k, a).unwrap();
            assert!(check.residual < 1e-9, "{check:?}");
            assert!(check.twisted_residual < 1e-9);
            assert!(check.forms_distance < 1e-9);
        }
    }

    #[test]
    fn identity_rejects_bad_input() {
        let f13 = f(13);
        assert!(matches!(verify_gauss_identity(&f13, 3, 13), Err(Error::ZeroElement { .. })));
        assert!(matches!(verify_gauss_identity(&f13, 5, 1), Err(Error::NotDivisor { .. })));
        assert!(matches!(verify_gauss_identity(&f13, 1, 1), Err(Error::InvalidOrder { .. })));
    }

    #[test]
    fn equal_angles_are_bit_identical() {
        let f13 = f(13);
        let chi = MultCharSpec::new(&f13, 4, 1).unwrap();
        let chi5 = MultCharSpec::new(&f13, 4, 5).unwrap();
        for x in 0..13 {
            assert_eq!(chi.value(x), chi5.value(x));
        }
    }
}
