//! Primes `p <= x` for which `p - 1` has a divisor in `(x^eps1, x^eps2]`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Largest sieve bound accepted.
pub const MAX_SIEVE: u64 = 100_000_000;
/// Smallest `x` accepted by the density report (so that `ln x > 1`).
pub const MIN_DENSITY_X: u64 = 10;

/// All primes `<= x`, ascending. Odd-only sieve of Eratosthenes.
pub fn sieve_primes(x: u64) -> Result<Vec<u64>> {
    if x < 2 {
        return Err(Error::InvalidParameter(format!("sieve bound must be >= 2, got {x}")));
    }
    if x > MAX_SIEVE {
        return Err(Error::BudgetExceeded { required: x as u128, budget: MAX_SIEVE as u128 });
    }
    // slot i stands for 2i + 1
    let slots = (x as usize - 1) / 2 + 1;
    let mut composite = vec![false; slots];
    composite[0] = true;
    let mut i = 1;
    while (2 * i + 1) * (2 * i + 1) <= x as usize {
        if !composite[i] {
            let step = 2 * i + 1;
            let mut j = (step * step) / 2;
            while j < slots {
                composite[j] = true;
                j += step;
            }
        }
        i += 1;
    }
    let mut primes = Vec::with_capacity(slots / 8 + 1);
    primes.push(2);
    primes.extend(
        composite.iter().enumerate().filter(|(_, c)| !**c).map(|(i, _)| 2 * i as u64 + 1),
    );
    Ok(primes)
}

/// `eps` as `num / den` with `den <= 64`, when it is that close to one.
fn as_small_rational(eps: f64) -> Option<(u32, u32)> {
    (1..=64u32).find_map(|den| {
        let num = (eps * den as f64).round();
        ((eps - num / den as f64).abs() < 1e-12 && num >= 0.0).then_some((num as u32, den))
    })
}

/// `floor(x^eps)`. When `x^eps` lies within `1e-9` of an integer `c` and
/// `eps` is a small rational `a/b`, the result is settled exactly by
/// comparing `c^b` against `x^a`.
pub fn floor_power(x: u64, eps: f64) -> u64 {
    let f = (x as f64).powf(eps);
    let near = f.round();
    if (f - near).abs() < 1e-9 * near.max(1.0) && near >= 1.0 {
        if let Some((num, den)) = as_small_rational(eps) {
            let c = near as u64;
            if let (Some(lhs), Some(rhs)) = ((c as u128).checked_pow(den), (x as u128).checked_pow(num)) {
                return if lhs <= rhs { c } else { c - 1 };
            }
        }
    }
    f.floor() as u64
}

/// Integer thresholds `(lo, hi)`: a factor `k` qualifies iff `lo < k <= hi`.
pub fn factor_thresholds(x: u64, eps1: f64, eps2: f64) -> (u64, u64) {
    (floor_power(x, eps1), floor_power(x, eps2))
}

fn check_eps(eps1: f64, eps2: f64) -> Result<()> {
    if !(0.0 <= eps1 && eps1 < eps2 && eps2 <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "need 0 <= eps1 < eps2 <= 1, got eps1 = {eps1}, eps2 = {eps2}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShiftedPrimeHit {
    pub p: u64,
    /// Smallest qualifying divisor of `p - 1`.
    pub k: u64,
    /// All qualifying divisors, ascending.
    pub all_valid_factors: Vec<u64>,
}

/// Divisors of `n` in ascending order; `primes` must cover `sqrt(n)`.
fn divisors_with(n: u64, primes: &[u64]) -> Vec<u64> {
    let mut rest = n;
    let mut divs = vec![1u64];
    for &q in primes {
        if q * q > rest {
            break;
        }
        if rest % q != 0 {
            continue;
        }
        let mut e = 0;
        while rest % q == 0 {
            rest /= q;
            e += 1;
        }
        let base = divs.len();
        let mut pw = 1;
        for _ in 0..e {
            pw *= q;
            for i in 0..base {
                divs.push(divs[i] * pw);
            }
        }
    }
    if rest > 1 {
        let base = divs.len();
        for i in 0..base {
            divs.push(divs[i] * rest);
        }
    }
    divs.sort_unstable();
    divs
}

fn hit_for(p: u64, primes: &[u64], lo: u64, hi: u64) -> Option<ShiftedPrimeHit> {
    if lo >= hi {
        return None;
    }
    let factors: Vec<u64> =
        divisors_with(p - 1, primes).into_iter().filter(|&d| d > lo && d <= hi).collect();
    (!factors.is_empty()).then(|| ShiftedPrimeHit { p, k: factors[0], all_valid_factors: factors })
}

fn hits_among(primes: &[u64], lo: u64, hi: u64) -> Vec<ShiftedPrimeHit> {
    primes
        .par_iter()
        .filter(|&&p| p > 2)
        .filter_map(|&p| hit_for(p, primes, lo, hi))
        .collect()
}

/// Hits for every odd prime `p <= x`, in ascending `p`.
pub fn primes_with_factor_in_range(x: u64, eps1: f64, eps2: f64) -> Result<Vec<ShiftedPrimeHit>> {
    check_eps(eps1, eps2)?;
    let primes = sieve_primes(x.max(2))?;
    let (lo, hi) = factor_thresholds(x, eps1, eps2);
    Ok(hits_among(&primes, lo, hi))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityRow {
    pub x: u64,
    pub eps1: f64,
    pub eps2: f64,
    pub hits: u64,
    pub x_over_logx: f64,
    /// `hits / (x / ln x)`.
    pub ratio: f64,
}

/// Hit counts against `x / ln x`. The sieve runs once, up to the largest `x`.
pub fn shifted_prime_density(x_values: &[u64], eps1: f64, eps2: f64) -> Result<Vec<DensityRow>> {
    check_eps(eps1, eps2)?;
    if let Some(&bad) = x_values.iter().find(|&&x| x < MIN_DENSITY_X) {
        return Err(Error::InvalidParameter(format!("x must be >= {MIN_DENSITY_X}, got {bad}")));
    }
    let Some(&top) = x_values.iter().max() else {
        return Ok(Vec::new());
    };
    let primes = sieve_primes(top)?;
    Ok(x_values
        .iter()
        .map(|&x| {
            let upto = &primes[..primes.partition_point(|&q| q <= x)];
            let (lo, hi) = factor_thresholds(x, eps1, eps2);
            let hits = upto
                .par_iter()
                .filter(|&&p| p > 2 && hit_for(p, upto, lo, hi).is_some())
                .count() as u64;
            let x_over_logx = x as f64 / (x as f64).ln();
            DensityRow { x, eps1, eps2, hits, x_over_logx, ratio: hits as f64 / x_over_logx }
        })
        .collect())
}

pub const DENSITY_CSV_HEADER: &str = "x,eps1,eps2,hits,x_over_logx,ratio";
pub const HITS_CSV_HEADER: &str = "p,k";

pub fn density_csv(rows: &[DensityRow]) -> String {
    let mut out = format!("{DENSITY_CSV_HEADER}\n");
    for r in rows {
        out.push_str(&format!("{},{},{},{},{},{}\n", r.x, r.eps1, r.eps2, r.hits, r.x_over_logx, r.ratio));
    }
    out
}

pub fn hits_csv(hits: &[ShiftedPrimeHit]) -> String {
    let mut out = format!("{HITS_CSV_HEADER}\n");
    for h in hits {
        out.push_str(&format!("{},{}\n", h.p, h.k));
    }
    out
}
