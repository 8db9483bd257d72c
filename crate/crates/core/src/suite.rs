//! Invariant sweep over every odd prime `p <= p_max` and every order `k | p - 1`.

use rayon::prelude::*;
use serde::Serialize;

use crate::characters::{power_gauss_sum, verify_gauss_identity, ComplexValue, MultCharSpec};
use crate::error::{Error, Result};
use crate::field::{divisors, is_prime, kth_power_residues, prime_factors, PrimeField};
use crate::matrix::SensingMatrix;
use crate::rip::chain::verify_inner_product_chain;
use crate::sampling::{sample_disjoint_pair, trial_rng};

/// Largest `p_max` the sweep accepts.
pub const MAX_SUITE_PRIME: u64 = 1000;
/// Absolute tolerance, scaled per check as documented on [`CHECK_NAMES`].
pub const SUITE_TOLERANCE: f64 = 1e-9;
/// Random disjoint column-set pairs fed to the chain check per matrix.
pub const CHAIN_SAMPLES: u64 = 8;

/// Checks in report order.
///
/// * `field`: generator order, dlog round trip, residue sets equal `{g^(kt)}`
/// * `gauss_magnitude`: `||G(chi)| - sqrt p| < tol sqrt p`
/// * `gauss_identity`: residual `< tol sqrt(p) k`
/// * `unit_columns`: column norms within `tol` of 1, Paley included
/// * `inner_product`: `|<phi_i, phi_j> - G_k(a_i - a_j)/p| < tol`
/// * `coherence`: `mu = 1/sqrt p` for `k = 2`, `mu <= (k-1)/sqrt p`, `mu >= Welch`
/// * `chain`: the Gauss-sum chain for sampled disjoint column sets
pub const CHECK_NAMES: [&str; 7] = [
    "field",
    "gauss_magnitude",
    "gauss_identity",
    "unit_columns",
    "inner_product",
    "coherence",
    "chain",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteCheck {
    pub name: &'static str,
    pub checked: u64,
    pub failures: u64,
    /// Largest residual seen, relative to the check's tolerance scale.
    pub worst_residual: f64,
    pub worst_witness: Option<String>,
    pub first_failure: Option<String>,
}

impl SuiteCheck {
    fn new(name: &'static str) -> Self {
        Self { name, checked: 0, failures: 0, worst_residual: 0.0, worst_witness: None, first_failure: None }
    }

    /// Records one evaluation: `residual` fails when it exceeds `limit`
    /// (NaN always fails).
    fn record(&mut self, residual: f64, limit: f64, witness: impl FnOnce() -> String) {
        self.checked += 1;
        let failed = !(residual <= limit);
        let worse = residual > self.worst_residual;
        if !failed && !worse {
            return;
        }
        let w = witness();
        if failed {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(w.clone());
            }
        }
        if worse {
            self.worst_residual = residual;
            self.worst_witness = Some(w);
        }
    }

    fn pass_fail(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.record(if ok { 0.0 } else { f64::INFINITY }, 0.0, witness);
    }

    fn merge(&mut self, other: SuiteCheck) {
        self.checked += other.checked;
        self.failures += other.failures;
        if other.worst_residual > self.worst_residual {
            self.worst_residual = other.worst_residual;
            self.worst_witness = other.worst_witness;
        }
        if self.first_failure.is_none() {
            self.first_failure = other.first_failure;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub p_max: u64,
    pub primes: Vec<u64>,
    pub matrices: u64,
    pub tolerance: f64,
    pub checks: Vec<SuiteCheck>,
    pub passed: bool,
}

impl SuiteReport {
    pub fn check(&self, name: &str) -> Option<&SuiteCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn empty_checks() -> Vec<SuiteCheck> {
    CHECK_NAMES.iter().map(|&n| SuiteCheck::new(n)).collect()
}

/// Runs every check for one prime. Returns the per-check tallies and the
/// number of matrices built.
fn sweep_prime(p: u64) -> Result<(Vec<SuiteCheck>, u64)> {
    let mut checks = empty_checks();
    let field = PrimeField::new(p)?;
    let sqrt_p = (p as f64).sqrt();
    let tol = SUITE_TOLERANCE;
    let g = field.generator();
    let [c_field, c_mag, c_id, c_unit, c_inner, c_coh, c_chain] = &mut checks[..] else {
        unreachable!()
    };

    for q in prime_factors(p - 1) {
        c_field.pass_fail(field.pow(g, (p - 1) / q) != 1, || format!("p={p} g={g} q={q}"));
    }
    for t in 0..p - 1 {
        let x = field.gen_pow(t);
        c_field.pass_fail(field.dlog(x) == Some(t), || format!("p={p} t={t}"));
    }

    let mut matrices = 0;
    for k in divisors(p - 1).into_iter().filter(|&k| k >= 2) {
        let residues = kth_power_residues(&field, k)?;
        let mut expected: Vec<u64> = (0..(p - 1) / k).map(|t| field.gen_pow(k * t)).collect();
        expected.sort_unstable();
        c_field.pass_fail(residues.elements == expected, || format!("p={p} k={k} residues"));

        for h in 1..k as i64 {
            let gs = MultCharSpec::new(&field, k, h)?.gauss_sum(1);
            c_mag.record((gs.norm() - sqrt_p).abs() / sqrt_p, tol, || format!("p={p} k={k} h={h}"));
        }
        for a in 1..p as i64 {
            let r = verify_gauss_identity(&field, k, a)?.max_residual() / (sqrt_p * k as f64);
            c_id.record(r, tol, || format!("p={p} k={k} a={a}"));
        }

        let m = SensingMatrix::power_residue(&field, k)?;
        matrices += 1;
        for (i, n) in m.column_norms().into_iter().enumerate() {
            c_unit.record((n - 1.0).abs(), tol, || format!("p={p} k={k} column={i}"));
        }

        let table: Vec<ComplexValue> =
            (0..p as i64).map(|a| power_gauss_sum(&field, k, a)).collect::<Result<_>>()?;
        let gram = m.gram();
        for i in 0..m.cols() {
            for j in i + 1..m.cols() {
                let a = field.reduce(m.column_labels()[i] as i64 - m.column_labels()[j] as i64);
                let r = (gram[(i, j)] - table[a as usize] / p as f64).norm();
                c_inner.record(r, tol, || format!("p={p} k={k} i={i} j={j}"));
            }
        }

        let coh = m.coherence();
        if k == 2 {
            c_coh.record((coh.mu - 1.0 / sqrt_p).abs(), tol, || format!("p={p} k=2 mu={}", coh.mu));
        }
        c_coh.record(coh.mu - (k - 1) as f64 / sqrt_p, tol, || format!("p={p} k={k} mu={} upper", coh.mu));
        c_coh.record(m.welch_bound() - coh.mu, tol, || format!("p={p} k={k} mu={} welch", coh.mu));

        let n = m.cols();
        for t in 0..CHAIN_SAMPLES {
            let mut rng = trial_rng(p << 20 | k, t);
            let a = 1 + (t as usize % 4).min(n / 2 - 1);
            let b = 1 + ((t as usize / 4) % 4).min(n / 2 - 1);
            let (set_i, set_j) = sample_disjoint_pair(&mut rng, n, a, b);
            let r = verify_inner_product_chain(&m, &field, &set_i, &set_j, None)?;
            let worst = (r.residual_ab.max(r.residual_cd).max(-r.slack_bc)) / r.scale;
            c_chain.record(worst, tol, || format!("p={p} k={k} I={set_i:?} J={set_j:?}"));
        }
    }

    let paley = SensingMatrix::paley(&field)?;
    matrices += 1;
    for (i, n) in paley.column_norms().into_iter().enumerate() {
        c_unit.record((n - 1.0).abs(), tol, || format!("p={p} paley column={i}"));
    }
    let coh = paley.coherence();
    c_coh.record(paley.welch_bound() - coh.mu, tol, || format!("p={p} paley mu={} welch", coh.mu));

    Ok((checks, matrices))
}

/// Full sweep for all odd primes `p <= p_max`. Deterministic; primes run in
/// parallel and are merged in ascending order.
pub fn run_suite(p_max: u64) -> Result<SuiteReport> {
    if p_max < 3 {
        return Err(Error::InvalidParameter(format!("p_max must be >= 3, got {p_max}")));
    }
    if p_max > MAX_SUITE_PRIME {
        return Err(Error::BudgetExceeded { required: p_max as u128, budget: MAX_SUITE_PRIME as u128 });
    }
    let primes: Vec<u64> = (3..=p_max).filter(|&n| is_prime(n)).collect();
    let parts: Vec<(Vec<SuiteCheck>, u64)> =
        primes.par_iter().map(|&p| sweep_prime(p)).collect::<Result<_>>()?;
    let mut checks = empty_checks();
    let mut matrices = 0;
    for (part, count) in parts {
        matrices += count;
        for (acc, c) in checks.iter_mut().zip(part) {
            acc.merge(c);
        }
    }
    let passed = checks.iter().all(|c| c.failures == 0);
    Ok(SuiteReport { p_max, primes, matrices, tolerance: SUITE_TOLERANCE, checks, passed })
}
