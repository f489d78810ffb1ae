//! Monic (probabilists') Hermite polynomials.
//!
//! With this normalization `I_k(1_A^{⊗k}) = |A|^{k/2} H_k(W(A)/√|A|)`, which
//! is how multiple integrals of step kernels are evaluated.

use crate::error::{Error, Result};

/// Largest degree accepted by [`hermite_eval`].
pub const MAX_DEGREE: usize = 64;

/// `H_k(x)` from `H_0 = 1`, `H_1 = x`, `H_{k+1} = x H_k - k H_{k-1}`.
pub fn hermite_eval(k: usize, x: f64) -> Result<f64> {
    if k > MAX_DEGREE {
        return Err(Error::OrderTooLarge {
            order: k,
            limit: MAX_DEGREE,
        });
    }
    let mut table = [0.0; MAX_DEGREE + 1];
    hermite_table(x, &mut table[..=k]);
    Ok(table[k])
}

/// Fills `out[j] = H_j(x)` for `j < out.len()`.
#[inline]
pub fn hermite_table(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() > 1 {
        out[1] = x;
    }
    for k in 1..out.len().saturating_sub(1) {
        out[k + 1] = x * out[k] - k as f64 * out[k - 1];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn low_degrees() {
        assert_eq!(hermite_eval(0, 123.4).unwrap(), 1.0);
        assert_eq!(hermite_eval(2, 2.0).unwrap(), 3.0);
        assert_eq!(hermite_eval(3, 1.0).unwrap(), -2.0);
        assert!(hermite_eval(65, 0.0).is_err());
        assert!(hermite_eval(64, 0.5).unwrap().is_finite());
    }

    // Explicit coefficients of H_0..H_6.
    fn expanded(k: usize, x: f64) -> f64 {
        let x2 = x * x;
        match k {
            0 => 1.0,
            1 => x,
            2 => x2 - 1.0,
            3 => x * (x2 - 3.0),
            4 => x2 * x2 - 6.0 * x2 + 3.0,
            5 => x * (x2 * x2 - 10.0 * x2 + 15.0),
            6 => x2 * x2 * x2 - 15.0 * x2 * x2 + 45.0 * x2 - 15.0,
            _ => unreachable!(),
        }
    }

    #[test]
    fn recurrence_matches_expansion() {
        for k in 0..=6 {
            for i in 0..20 {
                let x = -4.0 + 0.41 * i as f64;
                let a = hermite_eval(k, x).unwrap();
                let b = expanded(k, x);
                assert!((a - b).abs() <= 1e-10 * b.abs().max(1.0), "k={k} x={x}");
            }
        }
    }

    #[test]
    fn gaussian_orthogonality() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let n = 1_000_000;
        let mut sums = [[0.0f64; 5]; 5];
        let mut squares = [[0.0f64; 5]; 5];
        let mut h = [0.0; 5];
        for _ in 0..n {
            let g: f64 = StandardNormal.sample(&mut rng);
            hermite_table(g, &mut h);
            for j in 0..5 {
                for k in 0..5 {
                    let p = h[j] * h[k];
                    sums[j][k] += p;
                    squares[j][k] += p * p;
                }
            }
        }
        let nf = n as f64;
        for j in 0..5 {
            for k in 0..5 {
                let mean = sums[j][k] / nf;
                let se = libm::sqrt((squares[j][k] / nf - mean * mean) / nf);
                let expected = if j == k {
                    crate::combinatorics::factorial(k)
                } else {
                    0.0
                };
                assert!(
                    (mean - expected).abs() <= 3.0 * se.max(1e-300),
                    "E[H{j} H{k}] = {mean}, expected {expected}, se {se}"
                );
            }
        }
    }
}
