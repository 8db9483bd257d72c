//! Sensing matrices built from k-th power residues, and the Paley matrix.
//!
//! Columns are indexed from 0 and column `i` corresponds to the field element
//! `a = i`, so the first column belongs to `a = 0`. Row 0 is the constant row
//! `1/sqrt(p)`; row `1 + l` carries the `l`-th smallest k-th power residue.
//!
//! Inner products conjugate the second argument:
//! `<u, v> = sum_m u[m] * conj(v[m])`.

use nalgebra::{DMatrix, DVectorView};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::characters::{additive_char, ComplexValue};
use crate::error::{Error, Result};
use crate::field::{kth_power_residues, PrimeField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    PowerResidue,
    Paley,
}

impl Variant {
    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::PowerResidue => "powerresidue",
            Variant::Paley => "paley",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "powerresidue" => Ok(Variant::PowerResidue),
            "paley" => Ok(Variant::Paley),
            other => Err(Error::InvalidParameter(format!("unknown variant {other:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SensingMatrix {
    entries: DMatrix<Complex64>,
    p: u64,
    k: u64,
    variant: Variant,
    /// Field element `a_i` of each power-residue column (length `p`; the
    /// extra Paley column has no label).
    column_labels: Vec<u64>,
    /// `0` followed by the sorted residues `b_1 < b_2 < ...`.
    row_labels: Vec<u64>,
}

/// Highest off-diagonal Gram magnitude and the first pair `(i, j)`, `i < j`,
/// attaining it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Coherence {
    pub mu: f64,
    pub i: usize,
    pub j: usize,
}

impl SensingMatrix {
    /// The `(p + k - 1)/k x p` matrix with entries `sqrt(k/p) psi(b_l a_i)`
    /// under a constant first row of `1/sqrt(p)`.
    ///
    /// Any divisor `k` of `p - 1` is accepted. `k = 1` produces a square
    /// matrix and is only useful as a degenerate test case.
    pub fn power_residue(field: &PrimeField, k: u64) -> Result<Self> {
        let residues = kth_power_residues(field, k)?;
        let p = field.modulus();
        let m = residues.len() + 1;
        let n = p as usize;
        let head = 1.0 / (p as f64).sqrt();
        let scale = (k as f64 / p as f64).sqrt();
        let entries = DMatrix::from_fn(m, n, |row, col| {
            if row == 0 {
                Complex64::new(head, 0.0)
            } else {
                let b = residues.elements[row - 1];
                additive_char(field, (b * col as u64 % p) as i64) * scale
            }
        });
        let mut row_labels = Vec::with_capacity(m);
        row_labels.push(0);
        row_labels.extend_from_slice(&residues.elements);
        Ok(Self {
            entries,
            p,
            k,
            variant: Variant::PowerResidue,
            column_labels: (0..p).collect(),
            row_labels,
        })
    }

    /// The `(p + 1)/2 x (p + 1)` Paley matrix: the quadratic-residue matrix
    /// with `[i^r, 0, ..., 0]^T` appended, `r = 0` for `p = 1 mod 4` and
    /// `r = 1` for `p = 3 mod 4`.
    pub fn paley(field: &PrimeField) -> Result<Self> {
        let base = Self::power_residue(field, 2)?;
        let (m, n) = base.entries.shape();
        let lead = if field.modulus() % 4 == 1 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 1.0)
        };
        let mut entries = base.entries.insert_column(n, Complex64::new(0.0, 0.0));
        entries[(0, n)] = lead;
        debug_assert_eq!(entries.shape(), (m, n + 1));
        Ok(Self { entries, variant: Variant::Paley, ..base })
    }

    /// Rebuilds a matrix from raw entries and metadata; used by the file reader.
    pub(crate) fn from_parts(
        entries: DMatrix<Complex64>,
        p: u64,
        k: u64,
        variant: Variant,
        column_labels: Vec<u64>,
        row_labels: Vec<u64>,
    ) -> Self {
        Self { entries, p, k, variant, column_labels, row_labels }
    }

    pub fn rows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn cols(&self) -> usize {
        self.entries.ncols()
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn column_labels(&self) -> &[u64] {
        &self.column_labels
    }

    pub fn row_labels(&self) -> &[u64] {
        &self.row_labels
    }

    /// Field element of column `i`, `None` for the appended Paley column.
    pub fn column_label(&self, i: usize) -> Option<u64> {
        self.column_labels.get(i).copied()
    }

    /// True for the single-row-of-residues `k = 1` construction.
    pub fn is_degenerate(&self) -> bool {
        self.k == 1
    }

    pub fn column(&self, i: usize) -> DVectorView<'_, Complex64> {
        self.entries.column(i)
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.cols() {
            return Err(Error::IndexOutOfRange { index: i, n: self.cols() });
        }
        Ok(())
    }

    /// `<phi_i, phi_j>` by direct summation over the rows.
    pub fn inner_product(&self, i: usize, j: usize) -> Result<ComplexValue> {
        self.check_index(i)?;
        self.check_index(j)?;
        Ok(self.inner_unchecked(i, j))
    }

    #[inline]
    pub(crate) fn inner_unchecked(&self, i: usize, j: usize) -> ComplexValue {
        self.entries
            .column(i)
            .iter()
            .zip(self.entries.column(j).iter())
            .map(|(u, v)| u * v.conj())
            .sum()
    }

    /// Full Gram matrix with `G[(i, j)] = <phi_i, phi_j>`.
    pub fn gram(&self) -> DMatrix<Complex64> {
        self.entries.transpose() * self.entries.conjugate()
    }

    pub fn column_norms(&self) -> Vec<f64> {
        self.entries.column_iter().map(|c| c.norm()).collect()
    }

    /// Coherence over all pairs `i < j`; ties go to the lexicographically
    /// smallest pair.
    pub fn coherence(&self) -> Coherence {
        let n = self.cols();
        let row_best: Vec<Option<(f64, usize)>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut best: Option<(f64, usize)> = None;
                for j in i + 1..n {
                    let v = self.inner_unchecked(i, j).norm();
                    if best.is_none_or(|(b, _)| v > b) {
                        best = Some((v, j));
                    }
                }
                best
            })
            .collect();
        let mut out = Coherence { mu: 0.0, i: 0, j: 0 };
        let mut found = false;
        for (i, best) in row_best.into_iter().enumerate() {
            if let Some((v, j)) = best {
                if !found || v > out.mu {
                    out = Coherence { mu: v, i, j };
                    found = true;
                }
            }
        }
        out
    }

    /// `N / M`.
    pub fn compression_ratio(&self) -> f64 {
        self.cols() as f64 / self.rows() as f64
    }

    /// Welch lower bound for this matrix's shape.
    pub fn welch_bound(&self) -> f64 {
        welch_bound(self.rows(), self.cols()).expect("constructed matrices have M <= N")
    }
}

/// `sqrt((N - M) / (M (N - 1)))`; zero when `M = N` and, by convention, when `N = 1`.
pub fn welch_bound(m: usize, n: usize) -> Result<f64> {
    if m == 0 || m > n {
        return Err(Error::InvalidParameter(format!(
            "Welch bound needs 1 <= M <= N, got M = {m}, N = {n}"
        )));
    }
    if n == 1 || m == n {
        return Ok(0.0);
    }
    Ok(((n - m) as f64 / (m as f64 * (n - 1) as f64)).sqrt())
}
