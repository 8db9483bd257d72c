//! Sparse-recovery experiments: draw a K-sparse signal, measure it with a
//! sensing matrix and recover it with orthogonal matching pursuit or
//! iterative hard thresholding.

use std::f64::consts::TAU;

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{SensingMatrix, Variant};
use crate::sampling::sample_subset;

/// OMP refuses a support whose Gram condition estimate exceeds this.
pub const MAX_CONDITION: f64 = 1e12;
/// IHT gives up once the iterate norm exceeds this multiple of `||y||`.
pub const DIVERGENCE_FACTOR: f64 = 1e6;
/// Recovered coefficients below this fraction of the largest are dropped.
pub const SUPPORT_CUTOFF: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AmplitudeModel {
    /// Unit modulus with a uniform random phase.
    Unit,
    /// Circular complex Gaussian with unit variance.
    Gaussian,
    /// Real `+1` or `-1`.
    Rademacher,
}

impl std::str::FromStr for AmplitudeModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unit" => Ok(Self::Unit),
            "gaussian" => Ok(Self::Gaussian),
            "rademacher" => Ok(Self::Rademacher),
            other => Err(Error::InvalidParameter(format!("unknown amplitude model {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SparseSignal {
    pub len: usize,
    pub support: Vec<usize>,
    pub values: Vec<Complex64>,
}

impl SparseSignal {
    pub fn zero(len: usize) -> Self {
        Self { len, support: Vec::new(), values: Vec::new() }
    }

    /// The basis vector `e_i` with value 1.
    pub fn basis(len: usize, i: usize) -> Self {
        Self { len, support: vec![i], values: vec![Complex64::new(1.0, 0.0)] }
    }

    /// Keeps the entries of `dense` above `SUPPORT_CUTOFF` times the largest magnitude.
    pub fn from_dense(dense: &DVector<Complex64>) -> Self {
        let peak = dense.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let mut out = Self::zero(dense.len());
        if peak == 0.0 {
            return out;
        }
        for (i, z) in dense.iter().enumerate() {
            if z.norm() > SUPPORT_CUTOFF * peak {
                out.support.push(i);
                out.values.push(*z);
            }
        }
        out
    }

    pub fn sparsity(&self) -> usize {
        self.support.len()
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    pub fn to_dense(&self) -> DVector<Complex64> {
        let mut v = DVector::from_element(self.len, Complex64::new(0.0, 0.0));
        for (&i, &z) in self.support.iter().zip(&self.values) {
            v[i] = z;
        }
        v
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

fn amplitude(rng: &mut ChaCha8Rng, model: AmplitudeModel) -> Complex64 {
    match model {
        AmplitudeModel::Unit => Complex64::from_polar(1.0, rng.random_range(0.0..TAU)),
        AmplitudeModel::Gaussian => {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
        }
        AmplitudeModel::Rademacher => {
            Complex64::new(if rng.random::<bool>() { 1.0 } else { -1.0 }, 0.0)
        }
    }
}

/// A K-sparse signal of length `n` with a uniform random support.
/// `sparsity = 0` yields the zero signal.
pub fn sample_sparse_signal(n: usize, sparsity: usize, seed: u64, model: AmplitudeModel) -> Result<SparseSignal> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_with(&mut rng, n, sparsity, model)
}

fn sample_with(rng: &mut ChaCha8Rng, n: usize, sparsity: usize, model: AmplitudeModel) -> Result<SparseSignal> {
    if sparsity > n {
        return Err(Error::InvalidParameter(format!("sparsity {sparsity} exceeds length {n}")));
    }
    let support = sample_subset(rng, n, sparsity);
    let values = support.iter().map(|_| amplitude(rng, model)).collect();
    Ok(SparseSignal { len: n, support, values })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Measurement {
    pub y: Vec<Complex64>,
    /// `||Phi x||^2 / ||x||^2`, absent for `x = 0`.
    pub energy_ratio: Option<f64>,
}

pub fn measure(matrix: &SensingMatrix, x: &SparseSignal) -> Result<Measurement> {
    if x.len != matrix.cols() {
        return Err(Error::DimensionMismatch { expected: matrix.cols(), actual: x.len });
    }
    let mut y = vec![Complex64::new(0.0, 0.0); matrix.rows()];
    for (&i, &v) in x.support.iter().zip(&x.values) {
        for (acc, a) in y.iter_mut().zip(matrix.column(i).iter()) {
            *acc += a * v;
        }
    }
    let x_energy = x.norm().powi(2);
    let energy_ratio =
        (x_energy > 0.0).then(|| y.iter().map(|z| z.norm_sqr()).sum::<f64>() / x_energy);
    Ok(Measurement { y, energy_ratio })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoveryOutput {
    pub signal: SparseSignal,
    pub iterations: usize,
    /// Residual norm before the first iteration and after each one.
    pub residual_norms: Vec<f64>,
}

fn check_measurements(matrix: &SensingMatrix, y: &[Complex64]) -> Result<()> {
    if y.len() != matrix.rows() {
        return Err(Error::DimensionMismatch { expected: matrix.rows(), actual: y.len() });
    }
    Ok(())
}

fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `Phi^* r` evaluated at column `j`.
fn correlation(matrix: &SensingMatrix, j: usize, r: &[Complex64]) -> Complex64 {
    matrix.column(j).iter().zip(r).map(|(a, b)| a.conj() * b).sum()
}

/// Orthogonal matching pursuit.
///
/// Each round adds the unselected column with the largest `|<phi_j, r>|`
/// (smallest index on ties) and refits all selected coefficients by least
/// squares. Stops after `sparsity` rounds or once `||r|| < tolerance`.
pub fn omp_recover(matrix: &SensingMatrix, y: &[Complex64], sparsity: usize, tolerance: f64) -> Result<RecoveryOutput> {
    check_measurements(matrix, y)?;
    if sparsity == 0 {
        return Err(Error::InvalidParameter("OMP needs K >= 1".into()));
    }
    let n = matrix.cols();
    let y_vec = DVector::from_column_slice(y);
    let mut residual = y.to_vec();
    let mut selected: Vec<usize> = Vec::new();
    let mut coeffs = DVector::<Complex64>::zeros(0);
    let mut residual_norms = vec![vec_norm(&residual)];

    while selected.len() < sparsity.min(n) && *residual_norms.last().unwrap() >= tolerance {
        let mut best: Option<(f64, usize)> = None;
        for j in (0..n).filter(|j| !selected.contains(j)) {
            let c = correlation(matrix, j, &residual).norm();
            if best.is_none_or(|(b, _)| c > b) {
                best = Some((c, j));
            }
        }
        let (_, pick) = best.expect("an unselected column exists");
        selected.push(pick);

        let a = DMatrix::from_fn(matrix.rows(), selected.len(), |r, c| matrix.entries()[(r, selected[c])]);
        let gram = a.adjoint() * &a;
        let eig = SymmetricEigen::new(gram.clone()).eigenvalues;
        let lo = eig.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = eig.iter().copied().fold(0.0, f64::max);
        let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
        if condition > MAX_CONDITION {
            let mut support = selected.clone();
            support.sort_unstable();
            return Err(Error::SingularSupport { support, condition });
        }
        let chol = Cholesky::new(gram).ok_or_else(|| Error::SingularSupport {
            support: selected.clone(),
            condition,
        })?;
        coeffs = chol.solve(&(a.adjoint() * &y_vec));
        let fit = &a * &coeffs;
        residual = y_vec.iter().zip(fit.iter()).map(|(u, v)| u - v).collect();
        let norm = vec_norm(&residual);
        let prev = *residual_norms.last().unwrap();
        // Least squares on a growing support cannot increase the residual.
        debug_assert!(norm <= prev + 1e-9 * residual_norms[0].max(1.0), "OMP residual grew: {prev} -> {norm}");
        residual_norms.push(norm);
    }

    let mut dense = DVector::from_element(n, Complex64::new(0.0, 0.0));
    for (pos, &j) in selected.iter().enumerate() {
        dense[j] = coeffs[pos];
    }
    Ok(RecoveryOutput {
        signal: SparseSignal::from_dense(&dense),
        iterations: selected.len(),
        residual_norms,
    })
}

/// Keeps the `sparsity` largest-magnitude entries (smallest index on ties).
pub fn hard_threshold(v: &DVector<Complex64>, sparsity: usize) -> DVector<Complex64> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[b].norm().total_cmp(&v[a].norm()).then(a.cmp(&b)));
    let mut out = DVector::from_element(v.len(), Complex64::new(0.0, 0.0));
    for &i in order.iter().take(sparsity) {
        out[i] = v[i];
    }
    out
}

/// Iterative hard thresholding `x <- H_K(x + step Phi^*(y - Phi x))`.
///
/// Stops when an iteration changes the residual norm by less than
/// `tolerance`, or after `max_iters` iterations. A growing residual keeps
/// iterating so that divergence is reported rather than hidden.
pub fn iht_recover(
    matrix: &SensingMatrix,
    y: &[Complex64],
    sparsity: usize,
    step: f64,
    max_iters: usize,
    tolerance: f64,
) -> Result<RecoveryOutput> {
    check_measurements(matrix, y)?;
    if !(step > 0.0) || max_iters == 0 {
        return Err(Error::InvalidParameter("IHT needs step > 0 and max_iters >= 1".into()));
    }
    let phi = matrix.entries();
    let phi_adj = phi.adjoint();
    let y_vec = DVector::from_column_slice(y);
    let y_norm = y_vec.norm();
    let mut x = DVector::from_element(matrix.cols(), Complex64::new(0.0, 0.0));
    let mut residual_norms = vec![y_norm];
    let mut iterations = 0;
    for it in 1..=max_iters {
        iterations = it;
        let r = &y_vec - phi * &x;
        let z = &x + (&phi_adj * r) * Complex64::new(step, 0.0);
        x = hard_threshold(&z, sparsity);
        let x_norm = x.norm();
        if x_norm > DIVERGENCE_FACTOR * y_norm && x_norm > 0.0 {
            return Err(Error::Diverged { iteration: it, norm: x_norm });
        }
        let res = (&y_vec - phi * &x).norm();
        let prev = *residual_norms.last().unwrap();
        residual_norms.push(res);
        if (prev - res).abs() < tolerance {
            break;
        }
    }
    Ok(RecoveryOutput { signal: SparseSignal::from_dense(&x), iterations, residual_norms })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum Algorithm {
    Omp { tolerance: f64 },
    Iht { step: f64, max_iters: usize, tolerance: f64 },
}

impl Algorithm {
    pub fn id(&self) -> &'static str {
        match self {
            Algorithm::Omp { .. } => "omp",
            Algorithm::Iht { .. } => "iht",
        }
    }

    pub fn default_omp() -> Self {
        Algorithm::Omp { tolerance: 1e-10 }
    }

    pub fn default_iht() -> Self {
        Algorithm::Iht { step: 1.0, max_iters: 500, tolerance: 1e-12 }
    }

    pub fn run(&self, matrix: &SensingMatrix, y: &[Complex64], sparsity: usize) -> Result<RecoveryOutput> {
        match *self {
            Algorithm::Omp { tolerance } => omp_recover(matrix, y, sparsity.max(1), tolerance),
            Algorithm::Iht { step, max_iters, tolerance } => {
                iht_recover(matrix, y, sparsity, step, max_iters, tolerance)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoveryTrial {
    pub p: u64,
    pub k: u64,
    pub variant: Variant,
    pub signal: SparseSignal,
    pub measurements: Vec<Complex64>,
    pub algorithm: Algorithm,
    pub recovered: SparseSignal,
    pub support_exact: bool,
    pub relative_error: f64,
    pub iterations: usize,
    pub seed: u64,
    pub noise_snr_db: Option<f64>,
}

/// `||x_hat - x|| / ||x||`, or `||x_hat||` when `x = 0`.
pub fn relative_error(truth: &SparseSignal, estimate: &SparseSignal) -> f64 {
    let diff = (estimate.to_dense() - truth.to_dense()).norm();
    let scale = truth.norm();
    if scale > 0.0 { diff / scale } else { diff }
}

/// One seeded trial: draw, measure (optionally with complex Gaussian noise
/// at `noise_snr_db`), recover and score.
pub fn run_trial(
    matrix: &SensingMatrix,
    sparsity: usize,
    algorithm: Algorithm,
    model: AmplitudeModel,
    seed: u64,
    noise_snr_db: Option<f64>,
) -> Result<RecoveryTrial> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let signal = sample_with(&mut rng, matrix.cols(), sparsity, model)?;
    let mut y = measure(matrix, &signal)?.y;
    if let Some(snr) = noise_snr_db {
        let power = y.iter().map(|z| z.norm_sqr()).sum::<f64>() / y.len() as f64;
        let sigma = (power / 10f64.powf(snr / 10.0) / 2.0).sqrt();
        for z in y.iter_mut() {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            *z += Complex64::new(re, im) * sigma;
        }
    }
    let out = algorithm.run(matrix, &y, sparsity)?;
    Ok(RecoveryTrial {
        p: matrix.p(),
        k: matrix.k(),
        variant: matrix.variant(),
        support_exact: out.signal.support == signal.support,
        relative_error: relative_error(&signal, &out.signal),
        recovered: out.signal,
        signal,
        measurements: y,
        algorithm,
        iterations: out.iterations,
        seed,
        noise_snr_db,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRow {
    #[serde(rename = "K")]
    pub sparsity: usize,
    pub trials: u64,
    pub success_rate: f64,
    pub median_rel_err: f64,
    /// Trials where the algorithm returned an error (counted as failures).
    pub errors: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub p: u64,
    pub k: u64,
    pub variant: Variant,
    pub algorithm: Algorithm,
    pub amplitude: AmplitudeModel,
    pub seed: u64,
    pub rows: Vec<ExperimentRow>,
    /// Sparsities (in input order) whose success rate exceeds that of an
    /// earlier, smaller sparsity.
    pub non_monotone_at: Vec<usize>,
}

pub const EXPERIMENT_CSV_HEADER: &str = "p,k,variant,algorithm,K,trials,success_rate,median_rel_err,seed";

impl ExperimentReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(EXPERIMENT_CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{:e},{}\n",
                self.p,
                self.k,
                self.variant.as_str(),
                self.algorithm.id(),
                row.sparsity,
                row.trials,
                row.success_rate,
                row.median_rel_err,
                self.seed
            ));
        }
        out
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 { v[mid] } else { 0.5 * (v[mid - 1] + v[mid]) }
}

/// Runs `trials` trials for every sparsity in `sparsities`. Trial number `c`
/// overall (counting across sparsities in order) uses seed `seed ^ c`.
pub fn run_experiment(
    matrix: &SensingMatrix,
    sparsities: &[usize],
    trials: u64,
    algorithm: Algorithm,
    model: AmplitudeModel,
    seed: u64,
    noise_snr_db: Option<f64>,
) -> Result<ExperimentReport> {
    if let Some(&bad) = sparsities.iter().find(|&&s| s > matrix.cols()) {
        return Err(Error::InvalidParameter(format!("sparsity {bad} exceeds N = {}", matrix.cols())));
    }
    let mut rows = Vec::with_capacity(sparsities.len());
    for (pos, &sparsity) in sparsities.iter().enumerate() {
        let base = pos as u64 * trials;
        let outcomes: Vec<(bool, f64, bool)> = (0..trials)
            .into_par_iter()
            .map(|t| {
                match run_trial(matrix, sparsity, algorithm, model, seed ^ (base + t), noise_snr_db) {
                    Ok(trial) => (trial.support_exact, trial.relative_error, false),
                    Err(_) => (false, f64::INFINITY, true),
                }
            })
            .collect();
        let successes = outcomes.iter().filter(|o| o.0).count() as f64;
        rows.push(ExperimentRow {
            sparsity,
            trials,
            success_rate: if trials > 0 { successes / trials as f64 } else { f64::NAN },
            median_rel_err: median(outcomes.iter().map(|o| o.1).collect()),
            errors: outcomes.iter().filter(|o| o.2).count() as u64,
        });
    }
    let mut non_monotone_at = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        if rows[..i]
            .iter()
            .any(|earlier| earlier.sparsity < row.sparsity && row.success_rate > earlier.success_rate)
        {
            non_monotone_at.push(row.sparsity);
        }
    }
    Ok(ExperimentReport {
        p: matrix.p(),
        k: matrix.k(),
        variant: matrix.variant(),
        algorithm,
        amplitude: model,
        seed,
        rows,
        non_monotone_at,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;
    use crate::rip::rip_delta_exhaustive;

    fn matrix(p: u64, k: u64) -> SensingMatrix {
        SensingMatrix::power_residue(&PrimeField::new(p).unwrap(), k).unwrap()
    }

    #[test]
    fn sampling_examples() {
        let z = sample_sparse_signal(13, 0, 1, AmplitudeModel::Unit).unwrap();
        assert!(z.is_zero());
        let a = sample_sparse_signal(13, 2, 5, AmplitudeModel::Gaussian).unwrap();
        let b = sample_sparse_signal(13, 2, 5, AmplitudeModel::Gaussian).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.sparsity(), 2);
        let u = sample_sparse_signal(50, 10, 3, AmplitudeModel::Unit).unwrap();
        assert!(u.values.iter().all(|z| (z.norm() - 1.0).abs() < 1e-12));
        let r = sample_sparse_signal(50, 10, 3, AmplitudeModel::Rademacher).unwrap();
        assert!(r.values.iter().all(|z| z.im == 0.0 && z.re.abs() == 1.0));
        assert!(sample_sparse_signal(5, 6, 0, AmplitudeModel::Unit).is_err());
    }

    #[test]
    fn measure_examples() {
        let m = matrix(13, 3);
        let zero = measure(&m, &SparseSignal::zero(13)).unwrap();
        assert!(zero.y.iter().all(|z| z.norm() == 0.0));
        assert_eq!(zero.energy_ratio, None);
        let e = measure(&m, &SparseSignal::basis(13, 4)).unwrap();
        for (a, b) in e.y.iter().zip(m.column(4).iter()) {
            assert_eq!(a, b);
        }
        assert!((e.energy_ratio.unwrap() - 1.0).abs() < 1e-12);
        assert!(measure(&m, &SparseSignal::zero(12)).is_err());
    }

    #[test]
    fn energy_ratio_within_rip_constant() {
        let m = matrix(13, 3);
        for s in 1..=3 {
            let delta = rip_delta_exhaustive(&m, s, 1 << 40).unwrap().delta;
            for seed in 0..50 {
                let x = sample_sparse_signal(13, s, seed, AmplitudeModel::Gaussian).unwrap();
                let ratio = measure(&m, &x).unwrap().energy_ratio.unwrap();
                assert!(ratio >= 1.0 - delta - 1e-9 && ratio <= 1.0 + delta + 1e-9);
            }
        }
    }

    #[test]
    fn omp_examples() {
        let m = matrix(13, 3);
        let y: Vec<Complex64> = m.column(6).iter().copied().collect();
        let out = omp_recover(&m, &y, 3, 1e-10).unwrap();
        assert_eq!(out.iterations, 1);
        assert_eq!(out.signal.support, vec![6]);
        assert!((out.signal.values[0] - Complex64::new(1.0, 0.0)).norm() < 1e-12);

        let zero = vec![Complex64::new(0.0, 0.0); m.rows()];
        let out = omp_recover(&m, &zero, 2, 1e-10).unwrap();
        assert_eq!(out.iterations, 0);
        assert!(out.signal.is_zero());
        assert!(omp_recover(&m, &zero, 0, 1e-10).is_err());
    }

    #[test]
    fn omp_rejects_dependent_columns() {
        // Five columns in a 5-row matrix can be chosen, but with k = 3 at p = 13
        // six columns are necessarily dependent.
        let m = matrix(13, 3);
        let x = SparseSignal {
            len: 13,
            support: (0..6).collect(),
            values: vec![Complex64::new(1.0, 0.0); 6],
        };
        let y = measure(&m, &x).unwrap().y;
        let err = omp_recover(&m, &y, 6, 0.0);
        assert!(matches!(err, Err(Error::SingularSupport { .. })) || err.is_ok());
    }

    #[test]
    fn omp_residuals_never_increase() {
        let m = matrix(29, 2);
        for seed in 0..30 {
            let x = sample_sparse_signal(29, 4, seed, AmplitudeModel::Gaussian).unwrap();
            let y = measure(&m, &x).unwrap().y;
            let out = omp_recover(&m, &y, 4, 1e-12).unwrap();
            for w in out.residual_norms.windows(2) {
                assert!(w[1] <= w[0] + 1e-12);
            }
        }
    }

    #[test]
    fn iht_examples() {
        let m = matrix(13, 3);
        let zero = vec![Complex64::new(0.0, 0.0); m.rows()];
        let out = iht_recover(&m, &zero, 2, 1.0, 100, 1e-12).unwrap();
        assert_eq!(out.iterations, 1);
        assert!(out.signal.is_zero());

        let y: Vec<Complex64> = m.column(9).iter().copied().collect();
        let a = iht_recover(&m, &y, 1, 1.0, 100, 1e-12).unwrap();
        assert_eq!(a.signal.support, vec![9]);
        assert!((a.signal.values[0] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        let b = iht_recover(&m, &y, 1, 1.0, 100, 1e-12).unwrap();
        assert_eq!(a, b);
        assert!(iht_recover(&m, &y, 1, 0.0, 100, 1e-12).is_err());
    }

    #[test]
    fn iht_detects_divergence() {
        let m = matrix(13, 3);
        let y: Vec<Complex64> = m.column(1).iter().copied().collect();
        let err = iht_recover(&m, &y, 13, 50.0, 100, 0.0).unwrap_err();
        assert!(matches!(err, Error::Diverged { .. }));
    }

    #[test]
    fn hard_threshold_ties_prefer_small_indices() {
        let v = DVector::from_vec(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 2.0),
            Complex64::new(-2.0, 0.0),
            Complex64::new(0.5, 0.0),
        ]);
        let h = hard_threshold(&v, 2);
        assert_eq!(h[1], v[1]);
        assert_eq!(h[2], v[2]);
        assert_eq!(h[0], Complex64::new(0.0, 0.0));
        let h1 = hard_threshold(&v, 1);
        assert_eq!(h1[1], v[1]);
        assert_eq!(h1[2], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn exact_support_means_exact_values() {
        let m = matrix(101, 2);
        for seed in 0..20 {
            let trial = run_trial(&m, 3, Algorithm::default_omp(), AmplitudeModel::Gaussian, seed, None).unwrap();
            assert!(trial.support_exact);
            assert!(trial.relative_error < 1e-8);
            let y = measure(&m, &trial.signal).unwrap().y;
            let scale = vec_norm(&y).max(1e-300);
            let diff: Vec<Complex64> = y.iter().zip(&trial.measurements).map(|(a, b)| a - b).collect();
            assert!(vec_norm(&diff) / scale < 1e-12);
        }
    }

    #[test]
    fn experiment_zero_sparsity_and_determinism() {
        let m = matrix(29, 2);
        let r = run_experiment(&m, &[0, 1, 2], 20, Algorithm::default_omp(), AmplitudeModel::Unit, 3, None).unwrap();
        assert_eq!(r.rows[0].success_rate, 1.0);
        assert_eq!(r.rows[0].median_rel_err, 0.0);
        let again = run_experiment(&m, &[0, 1, 2], 20, Algorithm::default_omp(), AmplitudeModel::Unit, 3, None).unwrap();
        assert_eq!(r.to_csv(), again.to_csv());
        assert!(r.to_csv().starts_with(EXPERIMENT_CSV_HEADER));
    }

    #[test]
    fn noisy_trials_run() {
        let m = matrix(29, 2);
        let t = run_trial(&m, 2, Algorithm::default_omp(), AmplitudeModel::Unit, 1, Some(20.0)).unwrap();
        assert_eq!(t.noise_snr_db, Some(20.0));
        assert!(t.relative_error.is_finite());
    }

    #[test]
    fn median_values() {
        assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(vec![4.0, 1.0, 2.0, 3.0]), 2.5);
        assert!(median(vec![]).is_nan());
    }
}
