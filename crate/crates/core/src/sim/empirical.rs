//! Plug-in mutual information from paired sample counts, reported together
//! with the classical worst-case bias of the plug-in estimator.

use std::f64::consts::LN_2;

use super::SimError;
use crate::tol;

/// An empirical mutual-information estimate in bits.
///
/// The plug-in estimate is biased upward; `bias_bound` is the
/// `(|A||B| - 1) / (2 S ln 2)` first-order bound on that bias, so
/// `mi - bias_bound` is the honest "at least" reading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiEstimate {
    pub mi: f64,
    pub bias_bound: f64,
    pub samples: u64,
}

/// MI of the empirical joint built from `counts`, laid out as
/// `counts[a * b_size + b]`.
pub fn empirical_mi_from_counts(
    counts: &[u64],
    a_size: usize,
    b_size: usize,
) -> Result<MiEstimate, SimError> {
    assert_eq!(counts.len(), a_size * b_size, "count table shape");
    let total: u64 = counts.iter().sum();
    if total < tol::MIN_MI_SAMPLES {
        return Err(SimError::TooFewSamples {
            got: total,
            min: tol::MIN_MI_SAMPLES,
        });
    }
    let s = total as f64;
    let mut a_marg = vec![0u64; a_size];
    let mut b_marg = vec![0u64; b_size];
    for a in 0..a_size {
        for b in 0..b_size {
            a_marg[a] += counts[a * b_size + b];
            b_marg[b] += counts[a * b_size + b];
        }
    }
    let h = |c: u64| {
        if c == 0 {
            0.0
        } else {
            let p = c as f64 / s;
            -p * p.log2()
        }
    };
    let ha: f64 = a_marg.iter().map(|&c| h(c)).sum();
    let hb: f64 = b_marg.iter().map(|&c| h(c)).sum();
    let hab: f64 = counts.iter().map(|&c| h(c)).sum();
    let mi = (ha + hb - hab).max(0.0);
    let bias_bound = ((a_size * b_size - 1) as f64) / (2.0 * s * LN_2);
    Ok(MiEstimate {
        mi,
        bias_bound,
        samples: total,
    })
}

/// Convenience over raw `(a, b)` pairs.
pub fn empirical_mi_from_pairs(
    pairs: impl IntoIterator<Item = (usize, usize)>,
    a_size: usize,
    b_size: usize,
) -> Result<MiEstimate, SimError> {
    let mut counts = vec![0u64; a_size * b_size];
    for (a, b) in pairs {
        counts[a * b_size + b] += 1;
    }
    empirical_mi_from_counts(&counts, a_size, b_size)
}
