use chaoskit_core::sequences::{half_support_second_chaos, Side};

use super::noise_for;
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::parallel::par_class_a_diagnostic;
use crate::report::{ClassAExact, ClassAMc, ClassARecord};

/// Mixed Gamma diagnostic for the strongly independent couple
/// `(X_n, Y_n)` and for the dependent couple `(X_n, X_n)`.
pub fn run_class_a(config: &ExperimentConfig) -> Result<Vec<ClassARecord>> {
    let mut records = Vec::with_capacity(config.n_schedule.len());
    let mut dependent_grid = vec![0.0];
    dependent_grid.extend(config.t_grid.iter().copied().filter(|&t| t != 0.0));
    for &n in &config.n_schedule {
        let x = half_support_second_chaos(n, config.c1, Side::Left)?;
        let y = half_support_second_chaos(n, config.c2, Side::Right)?;
        let noise = noise_for(config, n);
        records.push(ClassARecord {
            n,
            exact: ClassAExact {
                independent_mixed_second_moment: x.cross_gamma(&y)?.second_moment(),
                dependent_mixed_mean: x.cross_gamma(&x)?.expectation(),
            },
            mc: ClassAMc {
                independent: (&par_class_a_diagnostic(
                    &x,
                    &y,
                    &config.t_grid,
                    config.mc_samples,
                    noise,
                )?)
                    .into(),
                dependent: (&par_class_a_diagnostic(
                    &x,
                    &x,
                    &dependent_grid,
                    config.mc_samples,
                    noise,
                )?)
                    .into(),
            },
        });
    }
    Ok(records)
}
