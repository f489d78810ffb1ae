use chaoskit_core::independence::strongly_independent;
use chaoskit_core::sequences::{half_support_second_chaos, Side};
use chaoskit_core::stein::fourth_moment_bound;

use super::{additivity_gap, check_additivity, exact_moments, mc_diagnostics, noise_for};
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::report::{DecouplingExact, DecouplingMc, DecouplingRecord};

/// `X_n` on the left half and `Y_n` on the right half of `2n` cells, with
/// variances `c1` and `c2`. Fails if the Gamma residual or the fourth
/// cumulant of `X_n + Y_n` is not additive to relative `1e-10`.
pub fn run_decoupling(config: &ExperimentConfig) -> Result<Vec<DecouplingRecord>> {
    let mut records = Vec::with_capacity(config.n_schedule.len());
    for &n in &config.n_schedule {
        let x = half_support_second_chaos(n, config.c1, Side::Left)?;
        let y = half_support_second_chaos(n, config.c2, Side::Right)?;
        let sum = x.add(&y)?;
        let (ex, ey, es) = (exact_moments(&x)?, exact_moments(&y)?, exact_moments(&sum)?);
        let residual_gap =
            additivity_gap(es.gamma_residual, &[ex.gamma_residual, ey.gamma_residual]);
        let cumulant_gap = additivity_gap(
            es.fourth_cumulant,
            &[ex.fourth_cumulant, ey.fourth_cumulant],
        );
        check_additivity("gamma residual", n, residual_gap)?;
        check_additivity("fourth cumulant", n, cumulant_gap)?;
        let exact = DecouplingExact {
            var_x: ex.variance,
            var_y: ey.variance,
            var_sum: es.variance,
            k4_x: ex.fourth_cumulant,
            k4_y: ey.fourth_cumulant,
            k4_sum: es.fourth_cumulant,
            gamma_residual_x: ex.gamma_residual,
            gamma_residual_y: ey.gamma_residual,
            gamma_residual_sum: es.gamma_residual,
            bound_x: fourth_moment_bound(&x)?,
            bound_y: fourth_moment_bound(&y)?,
            bound_sum: fourth_moment_bound(&sum)?,
            mixed_gamma_second_moment: x.cross_gamma(&y)?.second_moment(),
            strongly_independent: strongly_independent(&x, &y, None)?.independent,
            residual_additivity_gap: residual_gap,
            cumulant_additivity_gap: cumulant_gap,
        };
        let mut mc = mc_diagnostics(
            &[&x, &y, &sum],
            &[config.c1, config.c2, config.c1 + config.c2],
            config,
            noise_for(config, n),
        )?
        .into_iter();
        let (Some(mx), Some(my), Some(ms)) = (mc.next(), mc.next(), mc.next()) else {
            unreachable!("three diagnostics requested");
        };
        records.push(DecouplingRecord {
            n,
            exact,
            mc: DecouplingMc {
                dkol_x: mx.kolmogorov,
                dkol_y: my.kolmogorov,
                dkol_sum: ms.kolmogorov,
                criteria_x: mx.criteria,
                criteria_y: my.criteria,
                criteria_sum: ms.criteria,
                conditional_x: mx.conditional,
                conditional_y: my.conditional,
                conditional_sum: ms.conditional,
            },
        });
    }
    Ok(records)
}
