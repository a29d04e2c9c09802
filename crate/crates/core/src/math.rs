//! Scalar helpers shared by the rest of the crate.
//!
//! Transcendental functions go through `libm` so results do not depend on
//! whether `std` is linked.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub const E: f64 = core::f64::consts::E;
pub const PI: f64 = core::f64::consts::PI;

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub fn cosh(x: f64) -> f64 {
    libm::cosh(x)
}

#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub fn powi(x: f64, k: usize) -> f64 {
    let mut acc = 1.0;
    for _ in 0..k {
        acc *= x;
    }
    acc
}

/// `ln |x|`, with `ln 0 = -inf`.
#[inline]
pub fn ln_abs(x: f64) -> f64 {
    if x == 0.0 {
        f64::NEG_INFINITY
    } else {
        ln(x.abs())
    }
}

pub fn norm(x: &[f64]) -> f64 {
    sqrt(x.iter().map(|v| v * v).sum())
}

/// Table of `ln k!` for `k = 0..=k_max`, built by cumulative summation of
/// `ln j` so that differences of entries are exact logarithms.
#[derive(Debug, Clone, PartialEq)]
pub struct LnFactorial {
    table: Vec<f64>,
}

impl LnFactorial {
    pub fn new(k_max: usize) -> Self {
        let mut table = Vec::with_capacity(k_max + 1);
        let mut acc = 0.0;
        table.push(0.0);
        for j in 1..=k_max {
            acc += ln(j as f64);
            table.push(acc);
        }
        LnFactorial { table }
    }

    #[inline]
    pub fn get(&self, k: usize) -> f64 {
        self.table[k]
    }

    pub fn k_max(&self) -> usize {
        self.table.len() - 1
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.table
    }
}

/// `ln k!` by direct summation. Prefer [`LnFactorial`] for repeated use.
pub fn ln_factorial(k: usize) -> f64 {
    (1..=k).map(|j| ln(j as f64)).sum()
}

/// `ln alpha!` for a multi-index.
pub fn ln_multi_factorial(alpha: &[usize]) -> f64 {
    alpha.iter().map(|&a| ln_factorial(a)).sum()
}

/// Neumaier's compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Compensated summation applied to real and imaginary parts separately.
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// `i^k`.
#[inline]
pub fn i_pow(k: usize) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// `count` points spaced evenly in `ln r` between `lo` and `hi` (inclusive).
pub fn log_space(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (a, b) = (ln(lo), ln(hi));
    lin_space(a, b, count).into_iter().map(exp).collect()
}

/// `count` evenly spaced points in `[lo, hi]` (inclusive).
pub fn lin_space(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => alloc::vec![lo],
        _ => {
            let step = (hi - lo) / (count - 1) as f64;
            (0..count).map(|i| if i + 1 == count { hi } else { lo + step * i as f64 }).collect()
        }
    }
}

/// Deterministic source of random unit directions.
pub struct DirectionSampler {
    rng: ChaCha8Rng,
}

impl DirectionSampler {
    pub fn new(seed: u64) -> Self {
        DirectionSampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// A unit vector drawn uniformly from the sphere by rejection from the cube.
    pub fn unit_vector(&mut self, n: usize) -> Vec<f64> {
        loop {
            let v: Vec<f64> = (0..n).map(|_| 2.0 * self.uniform() - 1.0).collect();
            let r = norm(&v);
            if r > 1e-3 && r <= 1.0 {
                return v.into_iter().map(|c| c / r).collect();
            }
        }
    }

    pub fn unit_vectors(&mut self, n: usize, count: usize) -> Vec<Vec<f64>> {
        (0..count).map(|_| self.unit_vector(n)).collect()
    }
}

/// Signed axis directions and the two main-diagonal directions of `R^n`.
pub fn axis_and_diagonal_directions(n: usize) -> Vec<Vec<f64>> {
    let mut dirs = Vec::with_capacity(2 * n + 2);
    for j in 0..n {
        for sign in [1.0, -1.0] {
            let mut e = alloc::vec![0.0; n];
            e[j] = sign;
            dirs.push(e);
        }
    }
    if n > 1 {
        let d = 1.0 / sqrt(n as f64);
        dirs.push(alloc::vec![d; n]);
        dirs.push(alloc::vec![-d; n]);
    }
    dirs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_factorial_table_matches_known_values() {
        let t = LnFactorial::new(20);
        assert_eq!(t.get(0), 0.0);
        assert_eq!(t.get(1), 0.0);
        assert!((t.get(5) - 4.787_491_742_782_046).abs() < 1e-14);
        assert!((t.get(20) - 42.335_616_460_753_485).abs() < 1e-12);
        assert_eq!(t.get(20), ln_factorial(20));
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::new();
        s.add(1.0);
        for _ in 0..10 {
            s.add(1e-17);
        }
        s.add(-1.0);
        assert!((s.value() - 1e-16).abs() < 1e-30);
    }

    #[test]
    fn lin_space_hits_endpoints() {
        let v = lin_space(-6.0, 6.0, 121);
        assert_eq!(v[0], -6.0);
        assert_eq!(v[120], 6.0);
        assert!((v[60]).abs() < 1e-15);
    }

    #[test]
    fn directions_are_unit_and_reproducible() {
        let a = DirectionSampler::new(7).unit_vectors(3, 32);
        let b = DirectionSampler::new(7).unit_vectors(3, 32);
        assert_eq!(a, b);
        for d in &a {
            assert!((norm(d) - 1.0).abs() < 1e-12);
        }
    }
}
