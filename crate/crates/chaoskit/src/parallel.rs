//! Rayon drivers for the Monte Carlo estimators in `chaoskit-core`.
//!
//! Sample `k` always comes from stream `k` of the noise source and results
//! are collected in index order before any reduction, so every estimate is
//! bit-identical to the serial version regardless of thread count.

use chaoskit_core::chaos::{ChaosExpansion, CompiledExpansion};
use chaoskit_core::grid::NoiseSource;
use chaoskit_core::independence::{class_a_diagnostic_from_samples, ClassADiagnostic};
use chaoskit_core::sequences::{counterexample_sample, CounterexampleSample};
use chaoskit_core::stein::{
    conditional_residual_from_samples, criterion_functionals_from_samples, ConditionalResidual,
    CriterionFunctionals,
};
use chaoskit_core::Error;
use rayon::prelude::*;

use crate::error::Result;

pub fn par_collect<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    (0..n as u64).into_par_iter().map(f).collect()
}

/// Evaluates every expansion on each of `n` samples; row `k` holds the
/// values on sample `k`.
pub fn par_evaluate(
    expansions: &[&CompiledExpansion],
    noise: NoiseSource,
    n: usize,
) -> Result<Vec<Vec<f64>>> {
    let Some(first) = expansions.first() else {
        return Ok(vec![Vec::new(); n]);
    };
    let grid = first.grid();
    if let Some(other) = expansions.iter().find(|e| e.grid() != grid) {
        return Err(Error::GridMismatch {
            left: grid.cells(),
            right: other.grid().cells(),
        }
        .into());
    }
    Ok(par_collect(n, |k| {
        let xi = noise.sample_increments(grid, k);
        expansions
            .iter()
            .map(|e| e.evaluate_increments(xi.increments()))
            .collect()
    }))
}

pub fn par_pathwise_pairs(
    x: &CompiledExpansion,
    y: &CompiledExpansion,
    noise: NoiseSource,
    n: usize,
) -> Result<Vec<(f64, f64)>> {
    Ok(par_evaluate(&[x, y], noise, n)?
        .into_iter()
        .map(|row| (row[0], row[1]))
        .collect())
}

pub fn par_criterion_functionals(
    x: &ChaosExpansion,
    c: f64,
    t_grid: &[f64],
    z_grid: &[f64],
    n_samples: usize,
    noise: NoiseSource,
) -> Result<CriterionFunctionals> {
    let gx = x.gamma()?;
    let pairs = par_pathwise_pairs(&x.compile(), &gx.compile(), noise, n_samples)?;
    Ok(criterion_functionals_from_samples(
        &pairs, c, t_grid, z_grid,
    )?)
}

pub fn par_conditional_residual(
    x: &ChaosExpansion,
    c: f64,
    n_bins: usize,
    n_samples: usize,
    noise: NoiseSource,
) -> Result<ConditionalResidual> {
    let gx = x.gamma()?;
    let pairs = par_pathwise_pairs(&x.compile(), &gx.compile(), noise, n_samples)?;
    Ok(conditional_residual_from_samples(&pairs, c, n_bins)?)
}

pub fn par_class_a_diagnostic(
    x: &ChaosExpansion,
    y: &ChaosExpansion,
    t_grid: &[f64],
    n_samples: usize,
    noise: NoiseSource,
) -> Result<ClassADiagnostic> {
    let sum = x.add(y)?.compile();
    let mixed = x.cross_gamma(y)?.compile();
    let pairs = par_pathwise_pairs(&sum, &mixed, noise, n_samples)?;
    Ok(class_a_diagnostic_from_samples(&pairs, t_grid)?)
}

pub fn par_simulate_counterexample(
    path_steps: usize,
    n_samples: usize,
    noise: NoiseSource,
) -> Result<Vec<CounterexampleSample>> {
    par_collect(n_samples, |k| {
        counterexample_sample(path_steps, &mut noise.stream(k))
    })
    .into_iter()
    .map(|r| r.map_err(Into::into))
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use chaoskit_core::independence::class_a_diagnostic;
    use chaoskit_core::sequences::{half_support_second_chaos, simulate_counterexample, Side};
    use chaoskit_core::stein::{conditional_residual_estimate, criterion_functionals};

    #[test]
    fn parallel_matches_serial_bitwise() {
        let x = half_support_second_chaos(8, 0.5, Side::Left).unwrap();
        let y = half_support_second_chaos(8, 0.5, Side::Right).unwrap();
        let noise = NoiseSource::new(42);
        let (t, z) = ([0.5, 1.0, 2.0], [-1.0, 0.0, 1.0]);
        assert_eq!(
            par_criterion_functionals(&x, 0.5, &t, &z, 5000, noise).unwrap(),
            criterion_functionals(&x, 0.5, &t, &z, 5000, noise).unwrap()
        );
        assert_eq!(
            par_conditional_residual(&x, 0.5, 16, 5000, noise).unwrap(),
            conditional_residual_estimate(&x, 0.5, 16, 5000, noise).unwrap()
        );
        assert_eq!(
            par_class_a_diagnostic(&x, &x, &t, 2000, noise).unwrap(),
            class_a_diagnostic(&x, &x, &t, 2000, noise).unwrap()
        );
        assert_eq!(
            par_class_a_diagnostic(&x, &y, &t, 2000, noise).unwrap(),
            class_a_diagnostic(&x, &y, &t, 2000, noise).unwrap()
        );
        assert_eq!(
            par_simulate_counterexample(100, 500, noise).unwrap(),
            simulate_counterexample(100, 500, noise).unwrap()
        );
    }

    #[test]
    fn grid_mismatch_is_reported() {
        let a = half_support_second_chaos(2, 0.5, Side::Left)
            .unwrap()
            .compile();
        let b = half_support_second_chaos(3, 0.5, Side::Left)
            .unwrap()
            .compile();
        assert!(par_evaluate(&[&a, &b], NoiseSource::new(1), 3).is_err());
    }
}
