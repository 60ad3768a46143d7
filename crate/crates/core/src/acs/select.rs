use rand::distributions::Open01;
use rand::Rng;

use crate::error::{Error, Result};

/// Exploit-or-explore choice over a nonnegative mass vector.
///
/// Draws `g` uniformly in (0, 1). When `g > threshold` the index of the
/// largest mass is returned, otherwise a roulette wheel spin picks an index
/// with probability proportional to its mass.
pub fn select<R: Rng + ?Sized>(p: &[f64], threshold: f64, rng: &mut R) -> Result<usize> {
    let g: f64 = rng.sample(Open01);
    if g > threshold {
        select_with(p, threshold, g, 0.0)
    } else {
        let u: f64 = rng.sample(Open01);
        select_with(p, threshold, g, u)
    }
}

/// [`select`] with the two uniform draws supplied by the caller. `u` is only
/// consulted on the roulette branch.
pub fn select_with(p: &[f64], threshold: f64, g: f64, u: f64) -> Result<usize> {
    let total: f64 = p.iter().sum();
    if total.is_nan() || total <= 0.0 {
        return Err(Error::NoCandidate);
    }
    if g > threshold {
        Ok(argmax(p))
    } else {
        Ok(roulette(p, total, u))
    }
}

/// Index of the largest entry; ties go to the lowest index.
pub(crate) fn argmax(p: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in p.iter().enumerate().skip(1) {
        if v > p[best] {
            best = i;
        }
    }
    best
}

fn roulette(p: &[f64], total: f64, u: f64) -> usize {
    let target = u * total;
    let mut cumulative = 0.0;
    let mut last_positive = 0;
    for (i, &v) in p.iter().enumerate() {
        if v <= 0.0 {
            continue;
        }
        cumulative += v;
        last_positive = i;
        if cumulative >= target {
            return i;
        }
    }
    // rounding left the cumulative sum a hair under the target
    last_positive
}
