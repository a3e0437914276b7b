//! Exact finite distributions over mixed-radix index spaces, entropy, and
//! conditional mutual information by explicit marginalization.

use super::InfoError;
use crate::net::idx;
use crate::tol;

/// A joint probability table over axes of the given sizes, stored
/// row-major with the first axis most significant. Normalized on
/// construction under the same policy as channel rows: sums further than
/// [`tol::ROW_SUM_REJECT`] from 1 are rejected, closer ones renormalized.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    shape: Vec<usize>,
    p: Vec<f64>,
}

impl Distribution {
    pub fn new(shape: Vec<usize>, mut p: Vec<f64>) -> Result<Self, InfoError> {
        let total = idx::checked_product(&shape).ok_or(InfoError::TooLarge {
            entries: usize::MAX,
        })?;
        if total > tol::TABLE_CAP {
            return Err(InfoError::TooLarge { entries: total });
        }
        if p.len() != total || shape.iter().any(|&s| s == 0) {
            return Err(InfoError::Shape);
        }
        for (k, &v) in p.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(InfoError::BadProb(k));
            }
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > tol::ROW_SUM_REJECT {
            return Err(InfoError::BadSum(sum));
        }
        for v in &mut p {
            *v /= sum;
        }
        Ok(Distribution { shape, p })
    }

    pub fn uniform(shape: Vec<usize>) -> Result<Self, InfoError> {
        let total = idx::checked_product(&shape).ok_or(InfoError::TooLarge {
            entries: usize::MAX,
        })?;
        if total == 0 || total > tol::TABLE_CAP {
            return Err(InfoError::Shape);
        }
        let p = vec![1.0 / total as f64; total];
        Ok(Distribution { shape, p })
    }

    pub fn point_mass(shape: Vec<usize>, at: &[usize]) -> Result<Self, InfoError> {
        if at.len() != shape.len() || at.iter().zip(&shape).any(|(&a, &s)| a >= s) {
            return Err(InfoError::PointOutOfRange);
        }
        let total = idx::checked_product(&shape).ok_or(InfoError::TooLarge {
            entries: usize::MAX,
        })?;
        if total > tol::TABLE_CAP {
            return Err(InfoError::TooLarge { entries: total });
        }
        let mut p = vec![0.0; total];
        p[idx::index_of(at, &shape)] = 1.0;
        Ok(Distribution { shape, p })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn probs(&self) -> &[f64] {
        &self.p
    }

    pub fn prob(&self, at: &[usize]) -> f64 {
        self.p[idx::index_of(at, &self.shape)]
    }

    /// Marginal onto `axes` (kept in the given order, no duplicates).
    pub fn marginal(&self, axes: &[usize]) -> Result<Distribution, InfoError> {
        check_axes(axes, self.shape.len())?;
        let out_shape: Vec<usize> = axes.iter().map(|&a| self.shape[a]).collect();
        let out_len = idx::product(&out_shape).max(1);
        let mut out = vec![0.0; out_len];
        let mut digits = vec![0usize; self.shape.len()];
        for &v in &self.p {
            let mut k = 0;
            for &a in axes {
                k = k * self.shape[a] + digits[a];
            }
            out[k] += v;
            idx::advance(&mut digits, &self.shape);
        }
        Ok(Distribution {
            shape: if axes.is_empty() { vec![1] } else { out_shape },
            p: out,
        })
    }

    pub fn entropy_bits(&self) -> f64 {
        entropy(self)
    }
}

fn check_axes(axes: &[usize], n_axes: usize) -> Result<(), InfoError> {
    let mut seen = vec![false; n_axes];
    for &a in axes {
        if a >= n_axes {
            return Err(InfoError::AxisOutOfRange(a, n_axes));
        }
        if seen[a] {
            return Err(InfoError::AxisOverlap(a));
        }
        seen[a] = true;
    }
    Ok(())
}

/// Shannon entropy in bits, with `0 log 0 = 0`.
pub fn entropy(d: &Distribution) -> f64 {
    entropy_of(&d.p)
}

fn entropy_of(p: &[f64]) -> f64 {
    let mut h = 0.0;
    for &v in p {
        if v > 0.0 {
            h -= v * v.log2();
        }
    }
    h
}

/// `I(A; B | C)` in bits over a joint table, with the three groups given as
/// disjoint axis sets. Axes in no group are marginalized out. Computed as
/// `H(A,C) + H(B,C) - H(A,B,C) - H(C)` from exact marginals accumulated in
/// a single pass over the table.
pub fn conditional_mi(
    joint: &Distribution,
    a: &[usize],
    b: &[usize],
    c: &[usize],
) -> Result<f64, InfoError> {
    let n_axes = joint.shape.len();
    let mut owner = vec![0u8; n_axes]; // 0 none, 1 a, 2 b, 3 c
    for (tag, group) in [(1u8, a), (2, b), (3, c)] {
        for &ax in group {
            if ax >= n_axes {
                return Err(InfoError::AxisOutOfRange(ax, n_axes));
            }
            if owner[ax] != 0 {
                return Err(InfoError::AxisOverlap(ax));
            }
            owner[ax] = tag;
        }
    }

    // Sorted unions; order inside a marginal does not change its entropy.
    let union = |tags: &[u8]| -> Vec<usize> {
        (0..n_axes).filter(|&ax| tags.contains(&owner[ax])).collect()
    };
    let groups = [union(&[1, 3]), union(&[2, 3]), union(&[1, 2, 3]), union(&[3])];

    let mut tables: Vec<Vec<f64>> = groups
        .iter()
        .map(|g| {
            let len: usize = g.iter().map(|&ax| joint.shape[ax]).product::<usize>().max(1);
            vec![0.0; len]
        })
        .collect();

    let mut digits = vec![0usize; n_axes];
    for &v in &joint.p {
        for (g, table) in groups.iter().zip(tables.iter_mut()) {
            let mut k = 0;
            for &ax in g {
                k = k * joint.shape[ax] + digits[ax];
            }
            table[k] += v;
        }
        idx::advance(&mut digits, &joint.shape);
    }

    let h: Vec<f64> = tables.iter().map(|t| entropy_of(t)).collect();
    let mi = h[0] + h[1] - h[2] - h[3];
    // Exact value is nonnegative; tiny negatives are cancellation noise.
    Ok(mi.max(0.0))
}
