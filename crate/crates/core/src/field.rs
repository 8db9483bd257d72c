//! Exact arithmetic in the prime field F_p.
//!
//! Everything here is integer arithmetic: primality, primitive roots, the
//! discrete-log table used by character evaluation, divisors and the sets of
//! nonzero k-th powers that label the rows of the sensing matrices.

use crate::error::{Error, Result};

/// Largest modulus for which [`PrimeField`] will build its lookup tables.
pub const MAX_FIELD_MODULUS: u64 = 1 << 31;

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic primality test for any `u64`.
///
/// Miller-Rabin with the first twelve prime bases, which has no
/// pseudoprimes below 3.3 * 10^24.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &b in &BASES {
        if n % b == 0 {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Distinct prime factors of `n`, ascending.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// All positive divisors of `n` in increasing order. `divisors(0)` is empty.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d != n / d {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

fn require_odd_prime(p: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p == 2 {
        return Err(Error::NotOddPrime(p));
    }
    Ok(())
}

/// Smallest positive generator of F_p^*.
///
/// A candidate `g` is accepted when `g^((p-1)/q) != 1` for every prime `q | p-1`.
pub fn primitive_root(p: u64) -> Result<u64> {
    require_odd_prime(p)?;
    let order = p - 1;
    let factors = prime_factors(order);
    (2..p)
        .find(|&g| factors.iter().all(|&q| pow_mod(g, order / q, p) != 1))
        .ok_or(Error::NotPrime(p))
}

/// The prime field F_p together with its smallest primitive root and a full
/// discrete-logarithm table.
#[derive(Debug, Clone)]
pub struct PrimeField {
    p: u64,
    g: u64,
    /// `dlog[x]` for `x` in `1..p`; slot 0 is unused.
    dlog: Vec<u32>,
    /// `powers[t] = g^t mod p` for `t` in `0..p-1`.
    powers: Vec<u32>,
}

impl PrimeField {
    /// Builds the field for an odd prime `p`, walking the powers of `g` once
    /// to fill both lookup tables.
    pub fn new(p: u64) -> Result<Self> {
        require_odd_prime(p)?;
        if p > MAX_FIELD_MODULUS {
            return Err(Error::InvalidParameter(format!(
                "p = {p} exceeds the table limit {MAX_FIELD_MODULUS}"
            )));
        }
        let g = primitive_root(p)?;
        let n = (p - 1) as usize;
        let mut dlog = vec![u32::MAX; p as usize];
        let mut powers = Vec::with_capacity(n);
        let mut x = 1u64;
        for t in 0..n {
            powers.push(x as u32);
            dlog[x as usize] = t as u32;
            x = x * g % p;
        }
        debug_assert_eq!(x, 1);
        Ok(Self { p, g, dlog, powers })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn generator(&self) -> u64 {
        self.g
    }

    /// Order of the multiplicative group, `p - 1`.
    pub fn group_order(&self) -> u64 {
        self.p - 1
    }

    /// Reduces any integer into `0..p`.
    #[inline]
    pub fn reduce(&self, x: i64) -> u64 {
        x.rem_euclid(self.p as i64) as u64
    }

    /// Exponent `t` with `g^t = x`, or `None` for `x = 0 (mod p)`.
    #[inline]
    pub fn dlog(&self, x: u64) -> Option<u64> {
        let x = x % self.p;
        (x != 0).then(|| self.dlog[x as usize] as u64)
    }

    /// `g^t mod p` for any exponent.
    #[inline]
    pub fn gen_pow(&self, t: u64) -> u64 {
        self.powers[(t % (self.p - 1)) as usize] as u64
    }

    pub fn pow(&self, x: u64, e: u64) -> u64 {
        pow_mod(x, e, self.p)
    }

    /// Checks `k | p - 1` and `k >= 1`.
    pub fn check_divisor(&self, k: u64) -> Result<()> {
        if k == 0 || (self.p - 1) % k != 0 {
            return Err(Error::NotDivisor { p: self.p, k });
        }
        Ok(())
    }
}

/// The nonzero k-th powers of F_p, sorted ascending so that `elements[l]` is
/// the (l+1)-th smallest residue.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueSet {
    pub p: u64,
    pub k: u64,
    pub elements: Vec<u64>,
}

impl ResidueSet {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, x: u64) -> bool {
        self.elements.binary_search(&(x % self.p)).is_ok()
    }
}

/// The set `{x^k : x in F_p^*}`, computed as `{g^(k t) : 0 <= t < (p-1)/k}`.
pub fn kth_power_residues(field: &PrimeField, k: u64) -> Result<ResidueSet> {
    field.check_divisor(k)?;
    let count = field.group_order() / k;
    let mut elements: Vec<u64> = (0..count).map(|t| field.gen_pow(k * t)).collect();
    elements.sort_unstable();
    Ok(ResidueSet { p: field.modulus(), k, elements })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    fn order_by_brute_force(g: u64, p: u64) -> u64 {
        let mut x = g % p;
        let mut ord = 1;
        while x != 1 {
            x = x * g % p;
            ord += 1;
        }
        ord
    }

    #[test]
    fn primality_examples() {
        assert!(is_prime(13));
        assert!(!is_prime(1));
        assert!(!is_prime(561));
        assert!(!is_prime(0));
        assert!(is_prime(2));
        assert!(is_prime(18_446_744_073_709_551_557));
        assert!(!is_prime(3_215_031_751));
    }

    #[test]
    fn primality_matches_trial_division() {
        for n in 0..20_000 {
            assert_eq!(is_prime(n), trial_division(n), "n = {n}");
        }
    }

    #[test]
    fn primitive_root_examples() {
        assert_eq!(primitive_root(3).unwrap(), 2);
        assert_eq!(primitive_root(13).unwrap(), 2);
        assert_eq!(primitive_root(7).unwrap(), 3);
        assert_eq!(primitive_root(12), Err(Error::NotPrime(12)));
        assert_eq!(primitive_root(2), Err(Error::NotOddPrime(2)));
    }

    #[test]
    fn primitive_root_is_smallest_generator() {
        for p in (3..400).filter(|&p| is_prime(p)) {
            let g = primitive_root(p).unwrap();
            assert_eq!(order_by_brute_force(g, p), p - 1);
            for c in 2..g {
                assert!(order_by_brute_force(c, p) < p - 1);
            }
        }
    }

    #[test]
    fn field_tables() {
        let f = PrimeField::new(13).unwrap();
        assert_eq!(f.generator(), 2);
        assert_eq!(f.dlog(1), Some(0));
        assert_eq!(f.dlog(2), Some(1));
        assert_eq!(f.dlog(6), Some(5));
        assert_eq!(f.dlog(0), None);
        assert_eq!(f.dlog(13), None);
        for t in 0..12 {
            assert_eq!(f.dlog(f.gen_pow(t)), Some(t));
        }
        assert!(matches!(PrimeField::new(15), Err(Error::NotPrime(15))));
    }

    #[test]
    fn generator_covers_group() {
        for p in [3u64, 5, 7, 13, 29, 101] {
            let f = PrimeField::new(p).unwrap();
            let mut seen: Vec<u64> = (0..p - 1).map(|t| f.gen_pow(t)).collect();
            seen.sort_unstable();
            assert_eq!(seen, (1..p).collect::<Vec<_>>());
        }
    }

    #[test]
    fn residue_examples() {
        let f13 = PrimeField::new(13).unwrap();
        assert_eq!(kth_power_residues(&f13, 1).unwrap().elements, (1..13).collect::<Vec<_>>());
        assert_eq!(kth_power_residues(&f13, 3).unwrap().elements, vec![1, 5, 8, 12]);
        let f5 = PrimeField::new(5).unwrap();
        assert_eq!(kth_power_residues(&f5, 2).unwrap().elements, vec![1, 4]);
        assert_eq!(
            kth_power_residues(&f13, 5),
            Err(Error::NotDivisor { p: 13, k: 5 })
        );
    }

    #[test]
    fn residues_match_direct_powering() {
        for p in [5u64, 7, 13, 31, 61, 101] {
            let f = PrimeField::new(p).unwrap();
            for k in divisors(p - 1) {
                let set = kth_power_residues(&f, k).unwrap();
                let mut direct: Vec<u64> = (1..p).map(|x| pow_mod(x, k, p)).collect();
                direct.sort_unstable();
                direct.dedup();
                assert_eq!(set.elements, direct);
                assert_eq!(set.len() as u64 * k, p - 1);
            }
        }
    }

    #[test]
    fn minus_one_is_square_iff_p_is_1_mod_4() {
        for p in (3..300).filter(|&p| is_prime(p)) {
            let f = PrimeField::new(p).unwrap();
            let squares = kth_power_residues(&f, 2).unwrap();
            assert_eq!(squares.contains(p - 1), p % 4 == 1, "p = {p}");
        }
    }

    #[test]
    fn divisor_examples() {
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(1), vec![1]);
        assert_eq!(divisors(30), vec![1, 2, 3, 5, 6, 10, 15, 30]);
        assert_eq!(divisors(49), vec![1, 7, 49]);
    }
}
