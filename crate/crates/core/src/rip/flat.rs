//! Flat-RIP constants, RIP constants and the flat-to-RIP conversion.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{SensingMatrix, Variant};
use crate::sampling::{binomial, for_each_subset, sample_disjoint_pair, trial_rng};

/// Multiplier in the flat-RIP to RIP conversion `delta = 150 theta ln K`.
pub const FLAT_TO_RIP_CONSTANT: f64 = 150.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    Exhaustive,
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlatRipReport {
    pub p: u64,
    pub k: u64,
    pub variant: Variant,
    #[serde(rename = "K")]
    pub sparsity: usize,
    /// Largest `|<sum_I phi_i, sum_J phi_j>| / sqrt(|I||J|)` found.
    pub theta: f64,
    pub witness_i: Vec<usize>,
    pub witness_j: Vec<usize>,
    pub mode: SearchMode,
    /// Sampled results only bound the true constant from below.
    pub lower_bound_only: bool,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    /// Number of ordered `(I, J)` pairs the exhaustive bound covers, or the
    /// number of sampled pairs.
    pub pairs_covered: u128,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RipDeltaReport {
    pub p: u64,
    pub k: u64,
    pub variant: Variant,
    #[serde(rename = "K")]
    pub sparsity: usize,
    pub delta: f64,
    pub support: Vec<usize>,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub supports_examined: u128,
}

/// `|<sum_{i in I} phi_i, sum_{j in J} phi_j>| / sqrt(|I||J|)` from the
/// column sums.
pub fn flat_ratio(matrix: &SensingMatrix, set_i: &[usize], set_j: &[usize]) -> Result<f64> {
    Ok(cross_inner(matrix, set_i, set_j)?.norm() / ((set_i.len() * set_j.len()) as f64).sqrt())
}

/// `<sum_{i in I} phi_i, sum_{j in J} phi_j>` with validated, disjoint,
/// nonempty index sets.
pub fn cross_inner(matrix: &SensingMatrix, set_i: &[usize], set_j: &[usize]) -> Result<Complex64> {
    check_disjoint(matrix.cols(), set_i, set_j)?;
    let sum_cols = |set: &[usize]| {
        let mut acc = vec![Complex64::new(0.0, 0.0); matrix.rows()];
        for &c in set {
            for (a, v) in acc.iter_mut().zip(matrix.column(c).iter()) {
                *a += v;
            }
        }
        acc
    };
    let (u, v) = (sum_cols(set_i), sum_cols(set_j));
    Ok(u.iter().zip(&v).map(|(x, y)| x * y.conj()).sum())
}

pub(crate) fn check_disjoint(n: usize, set_i: &[usize], set_j: &[usize]) -> Result<()> {
    if set_i.is_empty() || set_j.is_empty() {
        return Err(Error::InvalidSubsets("index sets must be nonempty".into()));
    }
    for set in [set_i, set_j] {
        if let Some(&bad) = set.iter().find(|&&x| x >= n) {
            return Err(Error::IndexOutOfRange { index: bad, n });
        }
        let mut sorted = set.to_vec();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidSubsets("repeated index".into()));
        }
    }
    if let Some(x) = set_i.iter().find(|x| set_j.contains(x)) {
        return Err(Error::InvalidSubsets(format!("index {x} appears in both sets")));
    }
    Ok(())
}

/// Ordered pairs of disjoint nonempty subsets with sizes at most `sparsity`.
pub fn flat_pair_count(n: usize, sparsity: usize) -> u128 {
    let mut total: u128 = 0;
    for a in 1..=sparsity.min(n) {
        for b in 1..=sparsity.min(n - a) {
            let term = binomial(n as u64, a as u64).saturating_mul(binomial((n - a) as u64, b as u64));
            total = total.saturating_add(term);
        }
    }
    total
}

#[derive(Debug, Clone)]
struct Best {
    ratio: f64,
    set_i: Vec<usize>,
    set_j: Vec<usize>,
}

/// Exact flat-RIP constant: the maximum over all disjoint nonempty `I, J`
/// of size at most `sparsity`.
///
/// The ratio is symmetric in `(I, J)`, so only pairs with `min I < min J`
/// are visited; these include the lexicographically smallest maximiser,
/// which is the reported witness.
pub fn flat_rip_exhaustive(matrix: &SensingMatrix, sparsity: usize, budget: u128) -> Result<FlatRipReport> {
    let n = matrix.cols();
    if sparsity == 0 || n < 2 {
        return Err(Error::InvalidParameter("flat RIP needs K >= 1 and N >= 2".into()));
    }
    let required = flat_pair_count(n, sparsity);
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let gram = matrix.gram();
    let rows: Vec<Vec<Complex64>> = (0..n).map(|i| gram.row(i).iter().copied().collect()).collect();

    let per_first: Vec<Option<Best>> = (0..n)
        .into_par_iter()
        .map(|first| {
            let mut best: Option<Best> = None;
            let tail: Vec<usize> = (first + 1..n).collect();
            let mut row_sum = rows[first].clone();
            let mut set_i = vec![first];
            search_from(&rows, &tail, sparsity, &mut set_i, &mut row_sum, &mut best);
            best
        })
        .collect();

    let best = per_first
        .into_iter()
        .flatten()
        .fold(None::<Best>, |acc, b| match acc {
            Some(a) if a.ratio >= b.ratio => Some(a),
            _ => Some(b),
        })
        .expect("N >= 2 gives at least one pair");
    Ok(FlatRipReport {
        p: matrix.p(),
        k: matrix.k(),
        variant: matrix.variant(),
        sparsity,
        theta: best.ratio,
        witness_i: best.set_i,
        witness_j: best.set_j,
        mode: SearchMode::Exhaustive,
        lower_bound_only: false,
        trials: None,
        seed: None,
        pairs_covered: required,
    })
}

/// Visits the current `I` (whose row sums are in `row_sum`), every `J` drawn
/// from indices above `min I`, then every extension of `I` by an element of
/// `extend`.
fn search_from(
    rows: &[Vec<Complex64>],
    extend: &[usize],
    sparsity: usize,
    set_i: &mut Vec<usize>,
    row_sum: &mut Vec<Complex64>,
    best: &mut Option<Best>,
) {
    let first = set_i[0];
    let candidates: Vec<usize> = (first + 1..rows.len()).filter(|j| !set_i.contains(j)).collect();
    let size_i = set_i.len();
    let mut acc: Vec<Complex64> = Vec::with_capacity(sparsity + 1);
    acc.push(Complex64::new(0.0, 0.0));
    for_each_subset(&candidates, sparsity, &mut |set_j| {
        acc.truncate(set_j.len());
        let s = acc[set_j.len() - 1] + row_sum[*set_j.last().unwrap()];
        acc.push(s);
        let ratio = s.norm() / ((size_i * set_j.len()) as f64).sqrt();
        if best.as_ref().is_none_or(|b| ratio > b.ratio) {
            *best = Some(Best { ratio, set_i: set_i.clone(), set_j: set_j.to_vec() });
        }
        true
    });

    if size_i == sparsity {
        return;
    }
    for (pos, &next) in extend.iter().enumerate() {
        set_i.push(next);
        for (r, g) in row_sum.iter_mut().zip(&rows[next]) {
            *r += g;
        }
        search_from(rows, &extend[pos + 1..], sparsity, set_i, row_sum, best);
        for (r, g) in row_sum.iter_mut().zip(&rows[next]) {
            *r -= g;
        }
        set_i.pop();
    }
}

/// Largest flat ratio over `trials` random disjoint pairs; a lower bound on
/// the true constant.
pub fn flat_rip_sampled(matrix: &SensingMatrix, sparsity: usize, trials: u64, seed: u64) -> Result<FlatRipReport> {
    let n = matrix.cols();
    if sparsity == 0 || n < 2 || trials == 0 {
        return Err(Error::InvalidParameter("sampled flat RIP needs K >= 1, N >= 2 and trials >= 1".into()));
    }
    let results: Vec<Best> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            let a = rand::Rng::random_range(&mut rng, 1..=sparsity.min(n - 1));
            let b = rand::Rng::random_range(&mut rng, 1..=sparsity.min(n - a));
            let (set_i, set_j) = sample_disjoint_pair(&mut rng, n, a, b);
            let ratio = flat_ratio(matrix, &set_i, &set_j).expect("sampled sets are valid");
            Best { ratio, set_i, set_j }
        })
        .collect();
    let best = results
        .into_iter()
        .reduce(|a, b| if b.ratio > a.ratio { b } else { a })
        .expect("trials >= 1");
    Ok(FlatRipReport {
        p: matrix.p(),
        k: matrix.k(),
        variant: matrix.variant(),
        sparsity,
        theta: best.ratio,
        witness_i: best.set_i,
        witness_j: best.set_j,
        mode: SearchMode::Sampled,
        lower_bound_only: true,
        trials: Some(trials),
        seed: Some(seed),
        pairs_covered: trials as u128,
    })
}

/// Spectral deviation `max(lambda_max - 1, 1 - lambda_min)` of the Gram
/// matrix restricted to `support`, with the two extreme eigenvalues.
pub fn support_deviation(gram: &DMatrix<Complex64>, support: &[usize]) -> (f64, f64, f64) {
    let s = support.len();
    let sub = DMatrix::from_fn(s, s, |r, c| gram[(support[r], support[c])]);
    let eig = SymmetricEigen::new(sub).eigenvalues;
    let lo = eig.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    ((hi - 1.0).max(1.0 - lo), lo, hi)
}

/// Smallest `delta` for which every `sparsity`-sparse vector satisfies the
/// RIP inequality, by eigen-decomposition of every `sparsity x sparsity`
/// principal Gram submatrix.
///
/// Only supports of size exactly `min(sparsity, N)` are visited: by
/// eigenvalue interlacing a smaller support never has a larger deviation
/// than any support containing it.
pub fn rip_delta_exhaustive(matrix: &SensingMatrix, sparsity: usize, budget: u128) -> Result<RipDeltaReport> {
    let n = matrix.cols();
    if sparsity == 0 {
        return Err(Error::InvalidParameter("RIP constant needs K >= 1".into()));
    }
    let size = sparsity.min(n);
    let required = binomial(n as u64, size as u64);
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let gram = matrix.gram();
    let per_first: Vec<Option<(f64, Vec<usize>, f64, f64)>> = (0..=n - size)
        .into_par_iter()
        .map(|first| {
            let mut best: Option<(f64, Vec<usize>, f64, f64)> = None;
            let rest: Vec<usize> = (first + 1..n).collect();
            let mut check = |support: Vec<usize>| {
                let (dev, lo, hi) = support_deviation(&gram, &support);
                if best.as_ref().is_none_or(|b| dev > b.0) {
                    best = Some((dev, support, lo, hi));
                }
            };
            if size == 1 {
                check(vec![first]);
            } else {
                for_each_subset(&rest, size - 1, &mut |tail| {
                    if tail.len() == size - 1 {
                        let mut support = Vec::with_capacity(size);
                        support.push(first);
                        support.extend_from_slice(tail);
                        check(support);
                        false
                    } else {
                        true
                    }
                });
            }
            best
        })
        .collect();
    let (delta, support, lambda_min, lambda_max) = per_first
        .into_iter()
        .flatten()
        .reduce(|a, b| if b.0 > a.0 { b } else { a })
        .expect("at least one support");
    Ok(RipDeltaReport {
        p: matrix.p(),
        k: matrix.k(),
        variant: matrix.variant(),
        sparsity,
        delta,
        support,
        lambda_min,
        lambda_max,
        supports_examined: required,
    })
}

/// `150 theta ln K`, the RIP constant implied by a `(K, theta)` flat RIP.
pub fn rip_from_flat(theta: f64, sparsity: usize) -> Result<f64> {
    if sparsity < 2 {
        return Err(Error::InvalidParameter(format!(
            "flat-to-RIP conversion needs K >= 2 (ln K > 0), got K = {sparsity}"
        )));
    }
    if !(theta >= 0.0) {
        return Err(Error::InvalidParameter(format!("theta must be nonnegative, got {theta}")));
    }
    Ok(FLAT_TO_RIP_CONSTANT * theta * (sparsity as f64).ln())
}
