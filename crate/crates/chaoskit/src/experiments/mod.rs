//! The experiments selectable from the command line.

mod class_a;
mod counterexample;
mod decouple;
mod inspect;
mod three_way;

use std::time::Instant;

use chaoskit_core::chaos::ChaosExpansion;
use chaoskit_core::grid::NoiseSource;
use chaoskit_core::stein::{
    conditional_residual_from_samples, criterion_functionals_from_samples, fourth_moment_bound,
    kolmogorov_distance,
};

pub use class_a::run_class_a;
pub use counterexample::run_counterexample;
pub use decouple::run_decoupling;
pub use inspect::run_inspect;
pub use three_way::run_three_way;

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::error::{HarnessError, Result};
use crate::parallel::par_evaluate;
use crate::report::{ExactMoments, ExperimentReport, McDiagnostics, Record};

/// Relative tolerance for the exact additivity identities.
pub const ADDITIVITY_TOLERANCE: f64 = 1e-10;

/// Runs the configured experiment. `runtime_ms` is the only field that
/// differs between two runs of the same configuration.
pub fn run(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let start = Instant::now();
    let records = match config.experiment {
        ExperimentKind::Decouple => run_decoupling(config)?
            .into_iter()
            .map(Record::Decoupling)
            .collect(),
        ExperimentKind::Counterexample => vec![Record::Counterexample(run_counterexample(config)?)],
        ExperimentKind::ClassA => run_class_a(config)?
            .into_iter()
            .map(Record::ClassA)
            .collect(),
        ExperimentKind::ThreeWay => run_three_way(config)?
            .into_iter()
            .map(Record::ThreeWay)
            .collect(),
        ExperimentKind::Inspect => run_inspect(config)?
            .into_iter()
            .map(Record::Inspect)
            .collect(),
    };
    Ok(ExperimentReport {
        config: config.clone(),
        records,
        runtime_ms: start.elapsed().as_millis() as u64,
    })
}

/// Noise for schedule entry `n`, independent across entries.
pub(crate) fn noise_for(config: &ExperimentConfig, n: usize) -> NoiseSource {
    NoiseSource::new(config.seed).fork(n as u64)
}

pub(crate) fn exact_moments(x: &ChaosExpansion) -> Result<ExactMoments> {
    let variance = x.second_moment();
    Ok(ExactMoments {
        variance,
        fourth_cumulant: x.fourth_cumulant()?,
        gamma_residual: x.gamma_residual(variance)?,
        fourth_moment_bound: match x.single_chaos_order() {
            Some(_) => Some(fourth_moment_bound(x)?),
            None => None,
        },
    })
}

/// `|total - Σ parts| / |total|`, the relative additivity defect.
pub(crate) fn additivity_gap(total: f64, parts: &[f64]) -> f64 {
    let s: f64 = parts.iter().sum();
    let scale = total.abs().max(f64::MIN_POSITIVE);
    (total - s).abs() / scale
}

pub(crate) fn check_additivity(what: &str, n: usize, gap: f64) -> Result<()> {
    if gap > ADDITIVITY_TOLERANCE {
        return Err(HarnessError::IdentityViolated(format!(
            "{what} not additive at n = {n}: relative gap {gap:e}"
        )));
    }
    Ok(())
}

/// Monte Carlo diagnostics for several variables on one shared set of
/// samples. Variable `i` is compared against `targets[i]`.
pub(crate) fn mc_diagnostics(
    xs: &[&ChaosExpansion],
    targets: &[f64],
    config: &ExperimentConfig,
    noise: NoiseSource,
) -> Result<Vec<McDiagnostics>> {
    let gammas = xs
        .iter()
        .map(|x| x.gamma())
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let mut compiled = Vec::with_capacity(2 * xs.len());
    for (x, g) in xs.iter().zip(&gammas) {
        compiled.push(x.compile());
        compiled.push(g.compile());
    }
    let refs: Vec<_> = compiled.iter().collect();
    let rows = par_evaluate(&refs, noise, config.mc_samples)?;
    let mut out = Vec::with_capacity(xs.len());
    for (i, &c) in targets.iter().enumerate() {
        let pairs: Vec<(f64, f64)> = rows.iter().map(|r| (r[2 * i], r[2 * i + 1])).collect();
        let values: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let criteria =
            criterion_functionals_from_samples(&pairs, c, &config.t_grid, &config.z_grid)?;
        let conditional = conditional_residual_from_samples(&pairs, c, config.n_bins)?;
        out.push(McDiagnostics {
            kolmogorov: kolmogorov_distance(&values, c)?,
            criteria: (&criteria).into(),
            conditional: (&conditional).into(),
        });
    }
    Ok(out)
}
