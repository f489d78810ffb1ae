use chaoskit_core::grid::Grid;
use chaoskit_core::sequences::diagonal_second_chaos;

use super::{additivity_gap, check_additivity, exact_moments, mc_diagnostics, noise_for};
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::report::{ThreeWayExact, ThreeWayMc, ThreeWayRecord};

/// Three second-chaos variables on disjoint thirds of `3n` cells with
/// variances `split3`.
pub fn run_three_way(config: &ExperimentConfig) -> Result<Vec<ThreeWayRecord>> {
    let mut records = Vec::with_capacity(config.n_schedule.len());
    for &n in &config.n_schedule {
        let grid = Grid::new(3 * n)?;
        let parts = (0..3)
            .map(|k| diagonal_second_chaos(grid, k * n..(k + 1) * n, config.split3[k]))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let sum = parts[0].add(&parts[1])?.add(&parts[2])?;
        let summands = parts
            .iter()
            .map(exact_moments)
            .collect::<Result<Vec<_>>>()?;
        let total = exact_moments(&sum)?;
        let residual_gap = additivity_gap(
            total.gamma_residual,
            &summands
                .iter()
                .map(|e| e.gamma_residual)
                .collect::<Vec<_>>(),
        );
        let cumulant_gap = additivity_gap(
            total.fourth_cumulant,
            &summands
                .iter()
                .map(|e| e.fourth_cumulant)
                .collect::<Vec<_>>(),
        );
        check_additivity("gamma residual", n, residual_gap)?;
        check_additivity("fourth cumulant", n, cumulant_gap)?;
        let mut xs: Vec<_> = parts.iter().collect();
        xs.push(&sum);
        let mut targets = config.split3.to_vec();
        targets.push(config.split3.iter().sum());
        let mut mc = mc_diagnostics(&xs, &targets, config, noise_for(config, n))?;
        let mc_sum = mc.pop().expect("four diagnostics requested");
        records.push(ThreeWayRecord {
            n,
            exact: ThreeWayExact {
                summands,
                sum: total,
                residual_additivity_gap: residual_gap,
                cumulant_additivity_gap: cumulant_gap,
            },
            mc: ThreeWayMc {
                summands: mc,
                sum: mc_sum,
            },
        });
    }
    Ok(records)
}
