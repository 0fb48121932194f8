//! Small floating-point helpers for the no_std build.

/// `x^k` by binary exponentiation.
#[inline]
pub(crate) fn powi(x: f64, k: u32) -> f64 {
    let mut base = x;
    let mut e = k;
    let mut acc = 1.0;
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    acc
}

/// Sums terms smallest-magnitude first with Neumaier compensation.
pub(crate) fn ordered_sum(terms: &mut [f64]) -> f64 {
    terms.sort_unstable_by(|a, b| a.abs().total_cmp(&b.abs()));
    let mut sum = 0.0;
    let mut comp = 0.0;
    for &t in terms.iter() {
        let s = sum + t;
        if sum.abs() >= t.abs() {
            comp += (sum - s) + t;
        } else {
            comp += (t - s) + sum;
        }
        sum = s;
    }
    sum + comp
}

#[inline]
pub(crate) fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powi_matches_repeated_product() {
        assert_eq!(powi(2.0, 10), 1024.0);
        assert_eq!(powi(-1.5, 3), -3.375);
        assert_eq!(powi(7.0, 0), 1.0);
    }

    #[test]
    fn ordered_sum_recovers_cancellation() {
        let mut t = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(ordered_sum(&mut t), 2.0);
    }
}
