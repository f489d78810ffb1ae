use chaoskit_core::grid::Grid;
use chaoskit_core::independence::{integrals_independent, strongly_independent};
use chaoskit_core::sequences::counterexample_first_chaos;
use chaoskit_core::stats::MeanEstimate;
use chaoskit_core::stein::kolmogorov_distance;

use super::noise_for;
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::parallel::par_simulate_counterexample;
use crate::report::{CounterexampleExact, CounterexampleMc, CounterexampleRecord};

fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    sab / (saa * sbb).sqrt()
}

/// Simulates the pair `(X, Y)` with standard normal marginals, zero
/// correlation and a shared first-chaos component, so that `X + Y` is not
/// normal. The first `n_schedule` entry is not used.
pub fn run_counterexample(config: &ExperimentConfig) -> Result<CounterexampleRecord> {
    let (fx, fy) = counterexample_first_chaos(Grid::new(2)?)?;
    let (kx, ky) = (
        fx.kernel(1).expect("first chaos"),
        fy.kernel(1).expect("first chaos"),
    );
    let exact = CounterexampleExact {
        first_chaos_contraction_norm: integrals_independent(kx, ky, None)?.norm,
        strongly_independent: strongly_independent(&fx, &fy, None)?.independent,
    };
    let samples =
        par_simulate_counterexample(config.path_steps, config.mc_samples, noise_for(config, 0))?;
    let xs: Vec<f64> = samples.iter().map(|s| s.x).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.y).collect();
    let sums: Vec<f64> = samples
        .iter()
        .map(|s| (s.x + s.y) / std::f64::consts::SQRT_2)
        .collect();
    let mc = CounterexampleMc {
        variance_x: MeanEstimate::from_values(xs.iter().map(|x| x * x))?.into(),
        variance_y: MeanEstimate::from_values(ys.iter().map(|y| y * y))?.into(),
        correlation: correlation(&xs, &ys),
        kolmogorov_x: kolmogorov_distance(&xs, 1.0)?,
        kolmogorov_y: kolmogorov_distance(&ys, 1.0)?,
        kolmogorov_sum: kolmogorov_distance(&sums, 1.0)?,
        projection_x: MeanEstimate::from_values(samples.iter().map(|s| s.x * s.upper_increment))?
            .into(),
        projection_y: MeanEstimate::from_values(samples.iter().map(|s| s.y * s.upper_increment))?
            .into(),
    };
    Ok(CounterexampleRecord {
        path_steps: config.path_steps,
        n_samples: config.mc_samples,
        exact,
        mc,
    })
}
