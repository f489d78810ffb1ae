//! Sample means with standard errors and serial pathwise sample collection.

use alloc::vec::Vec;

use crate::chaos::CompiledExpansion;
use crate::error::{Error, Result};
use crate::grid::NoiseSource;

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: usize,
}

impl MeanEstimate {
    /// Mean and `s/√n` (unbiased `s`; zero error for a single value).
    /// Values are reduced in iteration order.
    pub fn from_values(values: impl IntoIterator<Item = f64>) -> Result<Self> {
        let mut n = 0usize;
        let mut mean = 0.0;
        let mut m2 = 0.0;
        for v in values {
            n += 1;
            let d = v - mean;
            mean += d / n as f64;
            m2 += d * (v - mean);
        }
        if n == 0 {
            return Err(Error::EmptySample);
        }
        let var = if n > 1 { m2 / (n - 1) as f64 } else { 0.0 };
        Ok(MeanEstimate {
            mean,
            std_error: libm::sqrt(var / n as f64),
            n_samples: n,
        })
    }

    /// Whether `target` lies within `k` standard errors of the mean.
    pub fn covers(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.std_error
    }
}

/// Mean of complex values `(re, im)` reported as a modulus.
///
/// The standard error is `√((s²_re + s²_im)/n)`, which bounds the
/// first-order error of the modulus in any direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexMean {
    pub re: f64,
    pub im: f64,
    pub modulus: f64,
    pub std_error: f64,
    pub n_samples: usize,
}

impl ComplexMean {
    pub fn from_values(values: &[(f64, f64)]) -> Result<Self> {
        let re = MeanEstimate::from_values(values.iter().map(|v| v.0))?;
        let im = MeanEstimate::from_values(values.iter().map(|v| v.1))?;
        Ok(ComplexMean {
            re: re.mean,
            im: im.mean,
            modulus: libm::hypot(re.mean, im.mean),
            std_error: libm::hypot(re.std_error, im.std_error),
            n_samples: re.n_samples,
        })
    }
}

/// Evaluates `f(k)` for `k in 0..n` in index order.
pub fn collect_samples<T>(n: usize, f: impl FnMut(u64) -> T) -> Vec<T> {
    (0..n as u64).map(f).collect()
}

/// Joint pathwise values `(X(ξ_k), Y(ξ_k))` for samples `k in 0..n`.
pub fn pathwise_pairs(
    x: &CompiledExpansion,
    y: &CompiledExpansion,
    noise: NoiseSource,
    n: usize,
) -> Result<Vec<(f64, f64)>> {
    x.grid().ensure_same(&y.grid())?;
    let grid = x.grid();
    Ok(collect_samples(n, |k| {
        let xi = noise.sample_increments(grid, k);
        (
            x.evaluate_increments(xi.increments()),
            y.evaluate_increments(xi.increments()),
        )
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_and_error() {
        let e = MeanEstimate::from_values([1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(e.mean, 2.5);
        // s² = 5/3
        assert!((e.std_error - libm::sqrt(5.0 / 3.0 / 4.0)).abs() < 1e-15);
        assert!(e.covers(2.5, 0.0));
        assert_eq!(MeanEstimate::from_values([]), Err(Error::EmptySample));
        assert_eq!(MeanEstimate::from_values([7.0]).unwrap().std_error, 0.0);
    }

    #[test]
    fn complex_mean_modulus() {
        let c = ComplexMean::from_values(&[(3.0, 4.0), (3.0, 4.0)]).unwrap();
        assert_eq!(c.modulus, 5.0);
        assert_eq!(c.std_error, 0.0);
    }
}
