//! Mixed-radix index arithmetic shared by channel tables and joint
//! distributions. Convention: the *first* axis is the most significant
//! digit (row-major).

pub fn product(sizes: &[usize]) -> usize {
    sizes.iter().product()
}

pub fn checked_product(sizes: &[usize]) -> Option<usize> {
    sizes.iter().try_fold(1usize, |a, &s| a.checked_mul(s))
}

/// Flat index of a digit vector.
pub fn index_of(digits: &[usize], sizes: &[usize]) -> usize {
    debug_assert_eq!(digits.len(), sizes.len());
    let mut k = 0;
    for (d, s) in digits.iter().zip(sizes) {
        debug_assert!(d < s);
        k = k * s + d;
    }
    k
}

/// Digit vector of a flat index.
pub fn digits_of(mut k: usize, sizes: &[usize]) -> Vec<usize> {
    let mut out = vec![0; sizes.len()];
    for (slot, &s) in out.iter_mut().zip(sizes).rev() {
        *slot = k % s;
        k /= s;
    }
    out
}

/// Advances `digits` to the next index in row-major order; returns false
/// after wrapping past the last one.
pub fn advance(digits: &mut [usize], sizes: &[usize]) -> bool {
    for i in (0..digits.len()).rev() {
        digits[i] += 1;
        if digits[i] < sizes[i] {
            return true;
        }
        digits[i] = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_and_orders_first_axis_most_significant() {
        let sizes = [2, 3, 2];
        for k in 0..product(&sizes) {
            let d = digits_of(k, &sizes);
            assert_eq!(index_of(&d, &sizes), k);
        }
        assert_eq!(digits_of(0, &sizes), vec![0, 0, 0]);
        assert_eq!(digits_of(1, &sizes), vec![0, 0, 1]);
        assert_eq!(digits_of(6, &sizes), vec![1, 0, 0]);
    }

    #[test]
    fn advance_walks_every_index_once() {
        let sizes = [3, 2];
        let mut d = vec![0, 0];
        let mut seen = vec![index_of(&d, &sizes)];
        while advance(&mut d, &sizes) {
            seen.push(index_of(&d, &sizes));
        }
        assert_eq!(seen, (0..6).collect::<Vec<_>>());
    }
}
