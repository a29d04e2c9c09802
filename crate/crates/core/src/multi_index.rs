//! Multi-indices `alpha in Z_+^n`.
//!
//! Enumeration order is graded lexicographic: grades `|alpha| = 0, 1, 2, ...`
//! in turn, and within a grade lexicographically decreasing, so grade 2 in
//! two variables is `(2,0), (1,1), (0,2)`.

use alloc::vec::Vec;

use crate::math::{exp, ln, ln_factorial};

/// All `alpha` with `|alpha| = grade`, in decreasing lexicographic order.
pub fn compositions(n: usize, grade: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let mut current = alloc::vec![0; n];
    fill(&mut current, 0, grade, &mut out);
    out
}

fn fill(current: &mut [usize], pos: usize, remaining: usize, out: &mut Vec<Vec<usize>>) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(current.to_vec());
        return;
    }
    for first in (0..=remaining).rev() {
        current[pos] = first;
        fill(current, pos + 1, remaining - first, out);
    }
    current[pos] = 0;
}

/// All `alpha` with `|alpha| <= max_order`, graded.
pub fn graded(n: usize, max_order: usize) -> Vec<Vec<usize>> {
    (0..=max_order).flat_map(|g| compositions(n, g)).collect()
}

pub fn order(alpha: &[usize]) -> usize {
    alpha.iter().sum()
}

/// `sum_{|alpha| = grade} 1/alpha!` by enumeration.
pub fn multinomial_sum(n: usize, grade: usize) -> f64 {
    compositions(n, grade).iter().map(|alpha| exp(-alpha.iter().map(|&a| ln_factorial(a)).sum::<f64>())).sum()
}

/// `n^grade / grade!`, the closed form of [`multinomial_sum`].
pub fn multinomial_closed_form(n: usize, grade: usize) -> f64 {
    exp(grade as f64 * ln(n as f64) - ln_factorial(grade))
}

/// `sum_{|alpha| = grade} grade!/alpha!` in exact integer arithmetic;
/// `None` on overflow.
pub fn multinomial_count(n: usize, grade: usize) -> Option<u128> {
    compositions(n, grade).iter().try_fold(0u128, |acc, alpha| {
        let mut coeff: u128 = 1;
        let mut used = 0usize;
        for &a in alpha {
            // C(used + a, a), built incrementally so every step is exact
            for i in 1..=a {
                coeff = coeff.checked_mul((used + i) as u128)? / i as u128;
            }
            used += a;
        }
        acc.checked_add(coeff)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grade_two_in_two_variables() {
        assert_eq!(compositions(2, 2), alloc::vec![alloc::vec![2, 0], alloc::vec![1, 1], alloc::vec![0, 2]]);
        assert_eq!(graded(2, 1), alloc::vec![alloc::vec![0, 0], alloc::vec![1, 0], alloc::vec![0, 1]]);
    }

    #[test]
    fn composition_counts() {
        // C(N + n - 1, n - 1)
        assert_eq!(compositions(3, 5).len(), 21);
        assert_eq!(compositions(1, 7).len(), 1);
        assert_eq!(compositions(4, 0).len(), 1);
    }

    #[test]
    fn multinomial_examples() {
        assert!((multinomial_sum(1, 6) - 1.0 / 720.0).abs() < 1e-18);
        assert!((multinomial_sum(2, 3) - 4.0 / 3.0).abs() < 1e-15);
        assert!((multinomial_sum(3, 5) - 2.025).abs() < 1e-14);
        assert!((multinomial_closed_form(3, 5) - 2.025).abs() < 1e-14);
    }

    #[test]
    fn multinomial_count_is_power() {
        for n in 1..=4usize {
            for g in 0..=12u32 {
                assert_eq!(multinomial_count(n, g as usize), Some((n as u128).pow(g)));
            }
        }
    }
}
