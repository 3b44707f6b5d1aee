//! Problem-size bookkeeping for the two hierarchies.
//!
//! These are the sizes the constraint builders actually allocate for a generic
//! polynomial (every coefficient allowed to be nonzero). Polynomials with
//! structural zeros can end up with smaller blocks.

use crate::polyalg::{binomial, Support};

/// Side of the Gram matrix for `(1 + x² + y²)^b f` with `deg f = degree`.
pub fn reznick_gram_side(degree: usize, b: usize) -> usize {
    let d = (degree + 2 * b).div_ceil(2);
    binomial(d + 2, 2) as usize
}

/// Scalar SDP variables of one Reznick level (upper triangle of the Gram matrix).
pub fn reznick_variable_count(degree: usize, b: usize) -> usize {
    let n = reznick_gram_side(degree, b);
    n * (n + 1) / 2
}

/// Real-polynomial degree of a witness with the given support.
pub fn real_degree(support: Support, degree: usize) -> usize {
    match support {
        Support::Total => degree,
        Support::Box => 2 * degree,
    }
}

/// Half-degrees `t_s` of the angular polynomials `q_s` after `b` Pascal steps.
pub fn pfr_half_degrees(support: Support, degree: usize, b: usize) -> Vec<usize> {
    let top = real_degree(support, degree);
    let base: Vec<usize> = (0..=top)
        .map(|s| match support {
            Support::Total => s,
            Support::Box => s.min(top - s),
        })
        .collect();
    (0..=(top + b))
        .map(|s| {
            (s.saturating_sub(b)..=s.min(top))
                .map(|i| base[i])
                .max()
                .unwrap_or(0)
        })
        .collect()
}

/// Scalar SDP variables of one PFR level. Complex coefficients double each
/// Toeplitz block through the real embedding.
pub fn pfr_variable_count(support: Support, degree: usize, b: usize, complex: bool) -> usize {
    pfr_half_degrees(support, degree, b)
        .into_iter()
        .map(|t| {
            let n = if complex { 2 * (t + 1) } else { t + 1 };
            n * (n + 1) / 2
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_half_degrees_plateau() {
        // m = 2, b = 1: base (0,1,2,1,0) → (0,1,2,2,1,0)
        assert_eq!(pfr_half_degrees(Support::Box, 2, 1), vec![0, 1, 2, 2, 1, 0]);
        assert_eq!(pfr_half_degrees(Support::Total, 2, 1), vec![0, 1, 2, 2]);
    }

    #[test]
    fn motzkin_reznick_sizes() {
        assert_eq!(reznick_gram_side(6, 0), 10);
        assert_eq!(reznick_gram_side(6, 1), 15);
        assert_eq!(reznick_variable_count(6, 1), 120);
    }
}
