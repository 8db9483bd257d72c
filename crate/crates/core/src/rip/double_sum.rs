//! Double character sums `sum_{s in S, t in T} chi(s - t)` and the two
//! bounds they are tested against: the cancellation property P(alpha, beta)
//! for large sets and the square-root bound `p^tau sqrt(|S||T|)` for sets of
//! size at most `p^(tau + beta)`.
//!
//! Small primes say nothing about an asymptotic statement. Every report
//! carries `asymptotic_caveat = true` and violations are data, not refutations.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::characters::{ComplexValue, MultCharSpec};
use crate::error::{Error, Result};
use crate::sampling::{binomial, for_each_subset, sample_subset, trial_rng};

/// Relative slack allowed when comparing a measured sum with its bound.
pub const BOUND_TOLERANCE: f64 = 1e-9;

/// Witness pairs kept per size class in addition to the worst one.
pub const MAX_RECORDED_VIOLATIONS: usize = 8;

pub fn character_double_sum(spec: &MultCharSpec<'_>, set_s: &[u64], set_t: &[u64]) -> ComplexValue {
    let mut total = ComplexValue::new(0.0, 0.0);
    for &s in set_s {
        for &t in set_t {
            total += spec.value(s as i64 - t as i64);
        }
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundKind {
    /// `measured <= p^-beta |S||T|` for `|S|, |T| > p^alpha`.
    PropertyP { alpha: f64, beta: f64 },
    /// `measured <= p^tau sqrt(|S||T|)` for `|S|, |T| <= p^(tau + beta)`.
    SquareRoot { alpha: f64, beta: f64, tau: f64 },
}

/// Which branch of the square-root bound's case analysis a pair falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ProofCase {
    /// `|S||T| <= p^(2 tau)`.
    #[serde(rename = "1")]
    SmallProduct,
    /// Larger set above `p^tau`, smaller set at most `p^alpha`.
    #[serde(rename = "2.1")]
    SmallPartner,
    /// Both sets above `p^alpha`; relies on P(alpha, beta).
    #[serde(rename = "2.2")]
    LargeSets,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainStep {
    pub claim: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl ChainStep {
    fn le(claim: &'static str, lhs: f64, rhs: f64, scale: f64) -> Self {
        Self { claim, lhs, rhs, holds: lhs <= rhs + BOUND_TOLERANCE * scale.max(1.0) }
    }

    fn lt(claim: &'static str, lhs: f64, rhs: f64) -> Self {
        Self { claim, lhs, rhs, holds: lhs < rhs }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DoubleSumReport {
    pub p: u64,
    pub k: u64,
    pub h: i64,
    pub size_s: usize,
    pub size_t: usize,
    /// `|sum chi(s - t)|` for the witness pair (the worst pair of the class).
    pub measured: f64,
    pub bound: f64,
    pub bound_kind: BoundKind,
    pub satisfied: bool,
    pub witness_s: Vec<u64>,
    pub witness_t: Vec<u64>,
    /// Pairs of this size class that were evaluated.
    pub pairs_checked: u64,
    pub violations: u64,
    /// Further violating pairs, at most [`MAX_RECORDED_VIOLATIONS`].
    pub other_violations: Vec<(Vec<u64>, Vec<u64>)>,
    pub case: Option<ProofCase>,
    pub chain: Vec<ChainStep>,
    /// Premise whose failure explains a violation, if any.
    pub failed_premise: Option<&'static str>,
    pub asymptotic_caveat: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropertyMode {
    /// Every pair of subsets with sizes in `(p^alpha, max_size]`.
    Exhaustive { max_size: Option<usize>, budget: u128 },
    Sampled { trials: u64, seed: u64 },
}

/// Smallest integer strictly above `p^alpha`.
fn first_size_above(p: u64, alpha: f64) -> usize {
    let threshold = (p as f64).powf(alpha);
    let mut n = threshold.floor() as usize;
    while (n as f64) <= threshold {
        n += 1;
    }
    n
}

#[derive(Debug, Clone)]
struct ClassStats {
    worst_ratio: f64,
    measured: f64,
    witness: (Vec<usize>, Vec<usize>),
    pairs: u64,
    violations: u64,
    recorded: Vec<(Vec<usize>, Vec<usize>)>,
}

impl ClassStats {
    fn new(measured: f64, ratio: f64, s: &[usize], t: &[usize]) -> Self {
        Self {
            worst_ratio: ratio,
            measured,
            witness: (s.to_vec(), t.to_vec()),
            pairs: 0,
            violations: 0,
            recorded: Vec::new(),
        }
    }

    fn observe(&mut self, measured: f64, ratio: f64, violated: bool, s: &[usize], t: &[usize]) {
        self.pairs += 1;
        if ratio > self.worst_ratio {
            self.worst_ratio = ratio;
            self.measured = measured;
            self.witness = (s.to_vec(), t.to_vec());
        }
        if violated {
            self.violations += 1;
            if self.recorded.len() < MAX_RECORDED_VIOLATIONS {
                self.recorded.push((s.to_vec(), t.to_vec()));
            }
        }
    }

    fn merge(&mut self, other: ClassStats) {
        if other.worst_ratio > self.worst_ratio {
            self.worst_ratio = other.worst_ratio;
            self.measured = other.measured;
            self.witness = other.witness;
        }
        self.pairs += other.pairs;
        self.violations += other.violations;
        let room = MAX_RECORDED_VIOLATIONS - self.recorded.len();
        self.recorded.extend(other.recorded.into_iter().take(room));
    }
}

type ClassMap = BTreeMap<(usize, usize), ClassStats>;

fn record(map: &mut ClassMap, p: u64, beta: f64, s: &[usize], t: &[usize], sum: ComplexValue) {
    let size = (s.len() * t.len()) as f64;
    let measured = sum.norm();
    let bound = (p as f64).powf(-beta) * size;
    let violated = measured > bound + BOUND_TOLERANCE * size;
    map.entry((s.len(), t.len()))
        .or_insert_with(|| ClassStats::new(measured, measured / size, s, t))
        .observe(measured, measured / size, violated, s, t);
}

fn merge_maps(into: &mut ClassMap, from: ClassMap) {
    for (key, stats) in from {
        match into.get_mut(&key) {
            Some(existing) => existing.merge(stats),
            None => {
                into.insert(key, stats);
            }
        }
    }
}

/// Tests P(alpha, beta) for `spec` on pairs `S, T` with `|S|, |T| > p^alpha`,
/// reporting one entry per size class `(|S|, |T|)` with its worst pair.
pub fn test_property_p(
    spec: &MultCharSpec<'_>,
    alpha: f64,
    beta: f64,
    mode: PropertyMode,
) -> Result<Vec<DoubleSumReport>> {
    spec.require_nontrivial("P(alpha, beta)")?;
    if !(alpha > 0.0 && alpha <= 1.0) || !(beta >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < alpha <= 1 and beta >= 0, got alpha = {alpha}, beta = {beta}"
        )));
    }
    let field = spec.field();
    let p = field.modulus();
    let n = p as usize;
    let min_size = first_size_above(p, alpha);
    if min_size > n {
        return Err(Error::InvalidParameter(format!(
            "no subset of F_{p} has more than p^alpha = {:.4} elements",
            (p as f64).powf(alpha)
        )));
    }
    let table = spec.table();
    let chi_diff = |s: usize, t: usize| table[(s + n - t) % n];

    let classes = match mode {
        PropertyMode::Exhaustive { max_size, budget } => {
            let max_size = max_size.unwrap_or(n).min(n);
            if max_size < min_size {
                return Err(Error::InvalidParameter(format!(
                    "max size {max_size} is below the threshold size {min_size}"
                )));
            }
            let per_side: u128 = (min_size..=max_size).map(|a| binomial(p, a as u64)).sum();
            let required = per_side.saturating_mul(per_side);
            if required > budget {
                return Err(Error::BudgetExceeded { required, budget });
            }
            let mut sets_s: Vec<Vec<usize>> = Vec::new();
            let universe: Vec<usize> = (0..n).collect();
            for_each_subset(&universe, max_size, &mut |s| {
                if s.len() >= min_size {
                    sets_s.push(s.to_vec());
                }
                true
            });
            let partials: Vec<ClassMap> = sets_s
                .par_iter()
                .map(|s| {
                    let row: Vec<ComplexValue> =
                        (0..n).map(|t| s.iter().map(|&x| chi_diff(x, t)).sum()).collect();
                    let mut map = ClassMap::new();
                    let mut acc = vec![ComplexValue::new(0.0, 0.0)];
                    for_each_subset(&universe, max_size, &mut |t| {
                        acc.truncate(t.len());
                        let sum = acc[t.len() - 1] + row[*t.last().unwrap()];
                        acc.push(sum);
                        if t.len() >= min_size {
                            record(&mut map, p, beta, s, t, sum);
                        }
                        true
                    });
                    map
                })
                .collect();
            let mut all = ClassMap::new();
            for m in partials {
                merge_maps(&mut all, m);
            }
            all
        }
        PropertyMode::Sampled { trials, seed } => {
            let partials: Vec<ClassMap> = (0..trials)
                .into_par_iter()
                .map(|trial| {
                    let mut rng = trial_rng(seed, trial);
                    let draw = |rng: &mut crate::sampling::TrialRng| {
                        if trial % 2 == 0 {
                            (min_size + rng.random_range(0..=2)).min(n)
                        } else {
                            rng.random_range(min_size..=n)
                        }
                    };
                    let a = draw(&mut rng);
                    let b = draw(&mut rng);
                    let s = sample_subset(&mut rng, n, a);
                    let t = sample_subset(&mut rng, n, b);
                    let sum = s.iter().flat_map(|&x| t.iter().map(move |&y| (x, y)))
                        .map(|(x, y)| chi_diff(x, y))
                        .sum();
                    let mut map = ClassMap::new();
                    record(&mut map, p, beta, &s, &t, sum);
                    map
                })
                .collect();
            let mut all = ClassMap::new();
            for m in partials {
                merge_maps(&mut all, m);
            }
            all
        }
    };

    let to_field = |v: &[usize]| v.iter().map(|&x| x as u64).collect::<Vec<u64>>();
    Ok(classes
        .into_iter()
        .map(|((a, b), stats)| {
            let bound = (p as f64).powf(-beta) * (a * b) as f64;
            DoubleSumReport {
                p,
                k: spec.order(),
                h: spec.exponent(),
                size_s: a,
                size_t: b,
                measured: stats.measured,
                bound,
                bound_kind: BoundKind::PropertyP { alpha, beta },
                satisfied: stats.violations == 0,
                witness_s: to_field(&stats.witness.0),
                witness_t: to_field(&stats.witness.1),
                pairs_checked: stats.pairs,
                violations: stats.violations,
                other_violations: stats
                    .recorded
                    .iter()
                    .map(|(s, t)| (to_field(s), to_field(t)))
                    .collect(),
                case: None,
                chain: Vec::new(),
                failed_premise: None,
                asymptotic_caveat: true,
            }
        })
        .collect())
}

/// Exponents for the square-root bound; `alpha + beta < tau < 1/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SquareRootParams {
    pub alpha: f64,
    pub beta: f64,
    pub tau: f64,
}

impl SquareRootParams {
    pub fn validate(&self) -> Result<()> {
        let SquareRootParams { alpha, beta, tau } = *self;
        let mut failures = Vec::new();
        if !(alpha > 0.0 && alpha < 0.5) {
            failures.push(format!("alpha_range: need 0 < alpha < 1/2, got {alpha}"));
        }
        if !(beta > 0.0) {
            failures.push(format!("beta_positive: need beta > 0, got {beta}"));
        }
        if !(alpha + beta < tau) {
            failures.push(format!("tau_lower: need alpha + beta < tau, got {} >= {tau}", alpha + beta));
        }
        if !(tau < 0.5) {
            failures.push(format!("tau_upper: need tau < 1/2, got {tau}"));
        }
        if failures.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(failures.join("; ")))
        }
    }
}

/// Evaluates the square-root bound and the case-specific chain of
/// inequalities for one pair of sets.
pub fn square_root_check(
    spec: &MultCharSpec<'_>,
    params: SquareRootParams,
    set_s: &[u64],
    set_t: &[u64],
) -> Result<DoubleSumReport> {
    params.validate()?;
    spec.require_nontrivial("the square-root double-sum bound")?;
    if set_s.is_empty() || set_t.is_empty() {
        return Err(Error::InvalidSubsets("S and T must be nonempty".into()));
    }
    let p = spec.field().modulus();
    let pf = p as f64;
    let SquareRootParams { alpha, beta, tau } = params;
    let max_size = pf.powf(tau + beta);
    if set_s.len() as f64 > max_size || set_t.len() as f64 > max_size {
        return Err(Error::InvalidSubsets(format!(
            "sizes must be at most p^(tau + beta) = {max_size:.4}"
        )));
    }

    let measured = character_double_sum(spec, set_s, set_t).norm();
    let product = (set_s.len() * set_t.len()) as f64;
    let root = product.sqrt();
    let bound = pf.powf(tau) * root;
    let satisfied = measured <= bound + BOUND_TOLERANCE * product.max(1.0);

    // Order so that `larger` is the set exceeding p^tau in case 2.
    let (larger, smaller) = if set_s.len() >= set_t.len() {
        (set_s.len() as f64, set_t.len() as f64)
    } else {
        (set_t.len() as f64, set_s.len() as f64)
    };
    let mut chain = vec![ChainStep::le("measured <= |S||T|", measured, product, product)];
    let mut failed_premise = None;
    let case = if product <= pf.powf(2.0 * tau) {
        chain.push(ChainStep::le("|S||T| <= p^tau sqrt(|S||T|)", product, bound, product));
        ProofCase::SmallProduct
    } else if smaller <= pf.powf(alpha) {
        let mid = pf.powf((tau + alpha + beta) / 2.0);
        chain.push(ChainStep::lt("larger set > p^tau", pf.powf(tau), larger));
        chain.push(ChainStep::le(
            "|S||T| <= p^((tau+alpha+beta)/2) sqrt(|S||T|)",
            product,
            mid * root,
            product,
        ));
        chain.push(ChainStep::lt("p^((tau+alpha+beta)/2) < p^tau", mid, pf.powf(tau)));
        ProofCase::SmallPartner
    } else {
        let cancel = pf.powf(-beta) * product;
        chain.push(ChainStep::lt("both sets > p^alpha", pf.powf(alpha), smaller));
        let premise = ChainStep::le("measured <= p^-beta |S||T|  [P(alpha, beta)]", measured, cancel, product);
        if !premise.holds {
            failed_premise = Some("P(alpha, beta)");
        }
        chain.push(premise);
        chain.push(ChainStep::le("p^-beta |S||T| <= p^tau sqrt(|S||T|)", cancel, bound, product));
        ProofCase::LargeSets
    };

    Ok(DoubleSumReport {
        p,
        k: spec.order(),
        h: spec.exponent(),
        size_s: set_s.len(),
        size_t: set_t.len(),
        measured,
        bound,
        bound_kind: BoundKind::SquareRoot { alpha, beta, tau },
        satisfied,
        witness_s: set_s.to_vec(),
        witness_t: set_t.to_vec(),
        pairs_checked: 1,
        violations: u64::from(!satisfied),
        other_violations: Vec::new(),
        case: Some(case),
        chain,
        failed_premise,
        asymptotic_caveat: true,
    })
}

/// Samples `trials` pairs with sizes uniform in `1..=floor(p^(tau + beta))`
/// and checks the square-root bound on each.
pub fn verify_square_root_bound(
    spec: &MultCharSpec<'_>,
    params: SquareRootParams,
    trials: u64,
    seed: u64,
) -> Result<Vec<DoubleSumReport>> {
    params.validate()?;
    spec.require_nontrivial("the square-root double-sum bound")?;
    let p = spec.field().modulus();
    let n = p as usize;
    let max_size = ((p as f64).powf(params.tau + params.beta).floor() as usize).min(n);
    if max_size == 0 {
        return Err(Error::InvalidParameter("p^(tau + beta) < 1 leaves no admissible sets".into()));
    }
    (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, trial);
            let a = rng.random_range(1..=max_size);
            let b = rng.random_range(1..=max_size);
            let s: Vec<u64> = sample_subset(&mut rng, n, a).into_iter().map(|x| x as u64).collect();
            let t: Vec<u64> = sample_subset(&mut rng, n, b).into_iter().map(|x| x as u64).collect();
            square_root_check(spec, params, &s, &t)
        })
        .collect()
}
