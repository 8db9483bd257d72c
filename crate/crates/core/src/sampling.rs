//! Seeded subset sampling shared by the analysis and recovery harnesses.
//!
//! Trial `t` of a run seeded with `s` draws from its own ChaCha8 stream seeded
//! with `s ^ t`, so any trial can be replayed on its own and parallel
//! execution order never changes a result.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TrialRng = ChaCha8Rng;

pub fn trial_rng(seed: u64, trial: u64) -> TrialRng {
    ChaCha8Rng::seed_from_u64(seed ^ trial)
}

/// Uniform `size`-subset of `0..n` via a partial Fisher-Yates shuffle, sorted.
pub fn sample_subset(rng: &mut TrialRng, n: usize, size: usize) -> Vec<usize> {
    assert!(size <= n, "subset size {size} exceeds universe {n}");
    let mut pool: Vec<usize> = (0..n).collect();
    let (chosen, _) = pool.partial_shuffle(rng, size);
    let mut out = chosen.to_vec();
    out.sort_unstable();
    out
}

/// Disjoint subsets of sizes `a` and `b`: draw `a + b` distinct indices, then
/// split them in draw order.
pub fn sample_disjoint_pair(
    rng: &mut TrialRng,
    n: usize,
    a: usize,
    b: usize,
) -> (Vec<usize>, Vec<usize>) {
    assert!(a + b <= n, "cannot draw {a} + {b} distinct indices from {n}");
    let mut pool: Vec<usize> = (0..n).collect();
    let (chosen, _) = pool.partial_shuffle(rng, a + b);
    let mut first = chosen[..a].to_vec();
    let mut second = chosen[a..].to_vec();
    first.sort_unstable();
    second.sort_unstable();
    (first, second)
}

/// Binomial coefficient, saturating at `u128::MAX`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) is exact at every step.
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Calls `visit` on every increasing sequence drawn from `candidates` with
/// length in `1..=max_len`, in lexicographic order. `visit` receives the
/// current sequence and returns whether to descend further.
pub fn for_each_subset<F>(candidates: &[usize], max_len: usize, visit: &mut F)
where
    F: FnMut(&[usize]) -> bool,
{
    fn rec<F: FnMut(&[usize]) -> bool>(
        candidates: &[usize],
        start: usize,
        max_len: usize,
        stack: &mut Vec<usize>,
        visit: &mut F,
    ) {
        for pos in start..candidates.len() {
            stack.push(candidates[pos]);
            if visit(stack) && stack.len() < max_len {
                rec(candidates, pos + 1, max_len, stack, visit);
            }
            stack.pop();
        }
    }
    let mut stack = Vec::with_capacity(max_len);
    rec(candidates, 0, max_len, &mut stack, visit);
}
