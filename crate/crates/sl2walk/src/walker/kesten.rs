//! Exact return probabilities of the simple random walk on the free
//! group F_k, via dynamic programming over the distance from the
//! identity in the 2k-regular tree.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::WalkError;

/// 2 sqrt(2k - 1) / (2k): the norm of the walk operator on F_k.
pub fn tree_spectral_radius(k: usize) -> f64 {
    let d = 2.0 * k as f64;
    2.0 * (d - 1.0).sqrt() / d
}

/// mu^{(2l)}(e) for l = 1..l_max, exact.
///
/// From distance d > 0 one of the 2k letters moves toward the identity
/// and 2k - 1 move away; from d = 0 all moves go to distance 1.
pub fn kesten_return_profile(k: usize, l_max: usize) -> Result<Vec<BigRational>, WalkError> {
    if k < 2 {
        return Err(WalkError::Budget(
            "free rank must be at least 2".into(),
        ));
    }
    let steps = 2 * l_max;
    if steps > 4000 {
        return Err(WalkError::Budget(format!(
            "walk length {steps} beyond the DP budget"
        )));
    }
    let d = BigRational::from_integer(BigUint::from(2 * k).into());
    let back = BigRational::one() / d.clone();
    let fwd = BigRational::from_integer(BigUint::from(2 * k - 1).into()) / d;

    let mut dist = vec![BigRational::zero(); steps + 1];
    dist[0] = BigRational::one();
    let mut out = Vec::with_capacity(l_max);
    for step in 1..=steps {
        let mut next = vec![BigRational::zero(); steps + 1];
        for (j, w) in dist.iter().enumerate().take(step) {
            if w.is_zero() {
                continue;
            }
            if j == 0 {
                next[1] += w;
            } else {
                next[j - 1] += w * &back;
                next[j + 1] += w * &fwd;
            }
        }
        dist = next;
        if step % 2 == 0 {
            out.push(dist[0].clone());
        }
    }
    Ok(out)
}

pub fn rational_to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
