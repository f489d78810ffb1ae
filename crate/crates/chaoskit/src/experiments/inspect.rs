use super::{exact_moments, mc_diagnostics, noise_for};
use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::report::InspectRecord;

/// Exact moments and Monte Carlo diagnostics of the configured family,
/// once per `n_schedule` entry for sequences and once otherwise. The
/// target variance is the variable's own `E[X²]`.
pub fn run_inspect(config: &ExperimentConfig) -> Result<Vec<InspectRecord>> {
    let family = config
        .family
        .as_ref()
        .ok_or_else(|| HarnessError::Config("inspect needs a family".into()))?;
    let schedule: Vec<Option<usize>> = if family.is_sequence() {
        config.n_schedule.iter().map(|&n| Some(n)).collect()
    } else {
        vec![None]
    };
    let mut records = Vec::with_capacity(schedule.len());
    for n in schedule {
        let x = family.build(n.unwrap_or(0))?;
        x.ensure_centered()?;
        let exact = exact_moments(&x)?;
        let mc = mc_diagnostics(
            &[&x],
            &[exact.variance],
            config,
            noise_for(config, n.unwrap_or(0)),
        )?
        .pop()
        .expect("one diagnostic requested");
        records.push(InspectRecord {
            n,
            cells: x.grid().cells(),
            max_order: x.max_order(),
            exact,
            mc,
        });
    }
    Ok(records)
}
