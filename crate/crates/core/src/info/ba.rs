//! Capacity of a single discrete memoryless channel by the classic
//! alternating maximization. Each iteration yields a lower bound (the
//! current mutual information) and an upper bound (the largest per-input
//! divergence); the run stops when they pinch to the requested gap, so the
//! returned value carries a computable error certificate.

use super::InfoError;
use crate::net::DmcTable;
use crate::tol;

#[derive(Debug, Clone)]
pub struct BaOptions {
    /// Stop once `upper - lower < gap` (bits).
    pub gap: f64,
    pub max_iters: usize,
    /// Starting input distribution; uniform when `None`. Must be strictly
    /// positive — a zero stays zero under the multiplicative update.
    pub initial: Option<Vec<f64>>,
}

impl Default for BaOptions {
    fn default() -> Self {
        BaOptions {
            gap: tol::BA_DEFAULT_GAP,
            max_iters: tol::BA_DEFAULT_MAX_ITERS,
            initial: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BaResult {
    /// Final lower bound; within `gap` of the true capacity.
    pub capacity: f64,
    /// Input distribution achieving `capacity`.
    pub input: Vec<f64>,
    pub iterations: usize,
    /// Final `upper - lower`.
    pub gap: f64,
    /// Per-iteration `(lower, upper)` bounds, for convergence checks.
    pub bounds: Vec<(f64, f64)>,
}

/// Runs the iteration on a single-edge channel.
pub fn blahut_arimoto(ch: &DmcTable, opts: &BaOptions) -> Result<BaResult, InfoError> {
    if ch.input_sizes().len() != 1 {
        return Err(InfoError::NotSingleEdge);
    }
    let n_in = ch.n_inputs();
    let n_out = ch.n_outputs();

    let mut p = match &opts.initial {
        None => vec![1.0 / n_in as f64; n_in],
        Some(init) => {
            if init.len() != n_in || init.iter().any(|&v| !v.is_finite() || v <= 0.0) {
                return Err(InfoError::BadInitial);
            }
            let sum: f64 = init.iter().sum();
            init.iter().map(|v| v / sum).collect()
        }
    };

    let mut q = vec![0.0; n_out];
    let mut c = vec![0.0; n_in];
    let mut bounds = Vec::new();

    for iter in 1..=opts.max_iters {
        for y in 0..n_out {
            q[y] = (0..n_in).map(|x| p[x] * ch.prob(x, y)).sum();
        }
        for x in 0..n_in {
            // D( Q(.|x) || q ) in bits; q[y] > 0 wherever Q(y|x) > 0
            // because p stays strictly positive.
            let mut d = 0.0;
            for y in 0..n_out {
                let w = ch.prob(x, y);
                if w > 0.0 {
                    d += w * (w / q[y]).log2();
                }
            }
            c[x] = d;
        }
        let lower: f64 = (0..n_in).map(|x| p[x] * c[x]).sum();
        let upper = c.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        bounds.push((lower, upper));
        if upper - lower < opts.gap {
            return Ok(BaResult {
                capacity: lower,
                input: p,
                iterations: iter,
                gap: upper - lower,
                bounds,
            });
        }
        let mut z = 0.0;
        for x in 0..n_in {
            p[x] *= c[x].exp2();
            z += p[x];
        }
        for v in &mut p {
            *v /= z;
        }
    }

    let &(lower, upper) = bounds.last().expect("max_iters >= 1");
    Err(InfoError::NoConvergence {
        gap: upper - lower,
        iters: opts.max_iters,
    })
}
