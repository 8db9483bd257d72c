//! Step-by-step check of the bound on `|<sum_I phi_i, sum_J phi_j>|` for the
//! power-residue matrix, going through the Gauss-sum expansion of each inner
//! product:
//!
//! ```text
//! (a) |<sum_I phi_i, sum_J phi_j>|
//! (b) = (1/p) |sum_h G(chi^h) sum_{i,j} chi^{-h}(a_i - a_j)|
//! (c) <= (1/p) sum_h |G(chi^h)| |sum_{i,j} chi^{-h}(a_i - a_j)|
//! (d) = (1/sqrt p) sum_h |sum_{i,j} chi^{-h}(a_i - a_j)|
//! ```

use serde::Serialize;

use crate::characters::{ComplexValue, MultCharSpec};
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::matrix::{SensingMatrix, Variant};
use crate::rip::flat::{check_disjoint, cross_inner};

pub const CHAIN_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SquareRootConsequence {
    pub tau: f64,
    /// Every `|sum chi^{-h}(a_i - a_j)| <= p^tau sqrt(|I||J|)`.
    pub premise_holds: bool,
    /// `(k - 1) p^(tau - 1/2) sqrt(|I||J|)`.
    pub bound: f64,
    /// Checked only when the premise holds.
    pub holds: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainReport {
    pub p: u64,
    pub k: u64,
    pub set_i: Vec<usize>,
    pub set_j: Vec<usize>,
    pub line_a: f64,
    pub line_b: f64,
    pub line_c: f64,
    pub line_d: f64,
    /// `|sum_{i,j} chi^{-h}(a_i - a_j)|` for `h = 1..k-1`.
    pub character_sums: Vec<f64>,
    /// `|a - b|`.
    pub residual_ab: f64,
    /// `c - b`, nonnegative up to rounding.
    pub slack_bc: f64,
    /// `|c - d|`.
    pub residual_cd: f64,
    pub scale: f64,
    pub holds: bool,
    pub square_root: Option<SquareRootConsequence>,
}

/// Computes all four lines for disjoint nonempty column sets of a
/// power-residue matrix. `tau` optionally adds the conditional check of the
/// final `(k - 1) p^(tau - 1/2)` bound.
pub fn verify_inner_product_chain(
    matrix: &SensingMatrix,
    field: &PrimeField,
    set_i: &[usize],
    set_j: &[usize],
    tau: Option<f64>,
) -> Result<ChainReport> {
    if matrix.variant() != Variant::PowerResidue {
        return Err(Error::WrongVariant);
    }
    if matrix.p() != field.modulus() {
        return Err(Error::InvalidParameter(format!(
            "matrix is over F_{} but field is F_{}",
            matrix.p(),
            field.modulus()
        )));
    }
    check_disjoint(matrix.cols(), set_i, set_j)?;
    let p = field.modulus();
    let k = matrix.k();
    let pf = p as f64;

    let line_a = cross_inner(matrix, set_i, set_j)?.norm();
    let mut expansion = ComplexValue::new(0.0, 0.0);
    let mut line_c = 0.0;
    let mut character_sums = Vec::with_capacity(k.saturating_sub(1) as usize);
    for h in 1..k as i64 {
        let chi = MultCharSpec::new(field, k, h)?;
        let inv = chi.inverse();
        let gauss = chi.gauss_sum(1);
        let mut sum = ComplexValue::new(0.0, 0.0);
        for &i in set_i {
            let ai = matrix.column_labels()[i] as i64;
            for &j in set_j {
                sum += inv.value(ai - matrix.column_labels()[j] as i64);
            }
        }
        expansion += gauss * sum;
        line_c += gauss.norm() * sum.norm();
        character_sums.push(sum.norm());
    }
    let line_b = expansion.norm() / pf;
    line_c /= pf;
    let line_d = character_sums.iter().sum::<f64>() / pf.sqrt();

    let scale = ((set_i.len() * set_j.len()) as f64).sqrt();
    let tol = CHAIN_TOLERANCE * scale;
    let residual_ab = (line_a - line_b).abs();
    let slack_bc = line_c - line_b;
    let residual_cd = (line_c - line_d).abs();
    let holds = residual_ab <= tol && slack_bc >= -tol && residual_cd <= tol;

    let square_root = tau.map(|tau| {
        let per_term = pf.powf(tau) * scale;
        let premise_holds = character_sums.iter().all(|&s| s <= per_term + tol);
        let bound = (k - 1) as f64 * pf.powf(tau - 0.5) * scale;
        SquareRootConsequence {
            tau,
            premise_holds,
            bound,
            holds: premise_holds.then(|| line_a <= bound + tol),
        }
    });

    Ok(ChainReport {
        p,
        k,
        set_i: set_i.to_vec(),
        set_j: set_j.to_vec(),
        line_a,
        line_b,
        line_c,
        line_d,
        character_sums,
        residual_ab,
        slack_bc,
        residual_cd,
        scale,
        holds,
        square_root,
    })
}
