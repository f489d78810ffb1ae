//! Normal approximation tools: the Stein equation, Kolmogorov distance, the
//! fourth-cumulant bound, and Monte Carlo estimators of the Gamma-based
//! convergence functionals.

use alloc::vec::Vec;

use crate::chaos::ChaosExpansion;
use crate::error::{Error, Result};
use crate::grid::NoiseSource;
use crate::stats::{pathwise_pairs, ComplexMean, MeanEstimate};

const SQRT_2PI: f64 = 2.506_628_274_631_000_5;
const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;

/// Largest `|x|` and `|z|` accepted by [`stein_solution`].
pub const STEIN_GUARD: f64 = 40.0;

pub const DEFAULT_T_GRID: [f64; 3] = [0.5, 1.0, 2.0];
pub const DEFAULT_Z_GRID: [f64; 3] = [-1.0, 0.0, 1.0];
pub const DEFAULT_BINS: usize = 32;

/// Scaled complementary error function `e^{u²} erfc(u)` for `u >= 0`.
pub fn erfcx(u: f64) -> f64 {
    debug_assert!(u >= 0.0);
    if u < 5.0 {
        return libm::exp(u * u) * libm::erfc(u);
    }
    // erfc(u) e^{u²} √π = 1/(u + (1/2)/(u + 1/(u + (3/2)/(u + ...))))
    let mut tail = u;
    for k in (1..=60).rev() {
        tail = u + (k as f64 * 0.5) / tail;
    }
    FRAC_1_SQRT_PI / tail
}

/// `Φ(x) = P(N(0,1) <= x)`.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * core::f64::consts::FRAC_1_SQRT_2)
}

/// `1 - Φ(x)` without cancellation.
pub fn normal_sf(x: f64) -> f64 {
    0.5 * libm::erfc(x * core::f64::consts::FRAC_1_SQRT_2)
}

/// Bounded solution of `f'(x) - x f(x) = 1_{x <= z} - Φ(z)` and its
/// derivative.
///
/// `f_z(x) = √(2π) e^{x²/2} Φ(x) (1 - Φ(z))` for `x <= z` and
/// `√(2π) e^{x²/2} Φ(z) (1 - Φ(x))` for `x > z`. The Gaussian factors are
/// combined through [`erfcx`] so nothing overflows inside the guard. The
/// derivative comes from the equation itself.
pub fn stein_solution(z: f64, x: f64) -> Result<(f64, f64)> {
    for v in [z, x] {
        if !(v.abs() <= STEIN_GUARD) {
            return Err(Error::OutOfGuard {
                value: v,
                limit: STEIN_GUARD,
            });
        }
    }
    let s = core::f64::consts::FRAC_1_SQRT_2;
    let f = if x <= z {
        if x <= 0.0 {
            SQRT_2PI * 0.5 * erfcx(-x * s) * normal_sf(z)
        } else {
            SQRT_2PI * normal_cdf(x) * 0.5 * erfcx(z * s) * libm::exp(0.5 * (x * x - z * z))
        }
    } else if x >= 0.0 {
        SQRT_2PI * 0.5 * erfcx(x * s) * normal_cdf(z)
    } else {
        SQRT_2PI * normal_sf(x) * 0.5 * erfcx(-z * s) * libm::exp(0.5 * (x * x - z * z))
    };
    let indicator = if x <= z { 1.0 } else { 0.0 };
    Ok((f, x * f + indicator - normal_cdf(z)))
}

/// `sup_x |F_n(x) - Φ(x/√variance)|` for the empirical CDF `F_n` of
/// `samples`, checked on both sides of every jump.
pub fn kolmogorov_distance(samples: &[f64], variance: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    if !(variance > 0.0) {
        return Err(Error::InvalidArgument("variance must be positive"));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let scale = 1.0 / libm::sqrt(variance);
    Ok(sorted.iter().enumerate().fold(0.0, |acc: f64, (i, &x)| {
        let cdf = normal_cdf(x * scale);
        let below = (cdf - i as f64 / n).abs();
        let above = ((i + 1) as f64 / n - cdf).abs();
        acc.max(below).max(above)
    }))
}

/// `√|k₄(X)| / E[X²]` for a centered single-chaos `X`; dominates
/// `d_Kol(X, N(0, E[X²]))`.
pub fn fourth_moment_bound(x: &ChaosExpansion) -> Result<f64> {
    x.ensure_centered()?;
    if x.is_zero() {
        return Err(Error::ZeroVariance);
    }
    if x.single_chaos_order().is_none() {
        return Err(Error::NotSingleChaos);
    }
    let var = x.second_moment();
    Ok(libm::sqrt(x.fourth_cumulant()?.abs()) / var)
}

/// One Monte Carlo estimate of a criterion functional at `parameter`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriterionEstimate {
    pub value: f64,
    pub std_error: f64,
    pub n_samples: usize,
    pub parameter: f64,
}

/// Estimates of `|E[e^{itX}(c - G_X)]|` over a `t` grid and of
/// `E[f'_z(X)(c - G_X)]` over a `z` grid, all on the same samples.
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionFunctionals {
    pub characteristic: Vec<CriterionEstimate>,
    pub stein: Vec<CriterionEstimate>,
}

impl CriterionFunctionals {
    /// Largest `|value|` over both grids.
    pub fn max_abs(&self) -> f64 {
        self.characteristic
            .iter()
            .chain(&self.stein)
            .fold(0.0, |acc, e| acc.max(e.value.abs()))
    }
}

/// `|E[e^{itV} W]|` for each `t`, from samples `(V, W)`.
pub fn characteristic_functional(pairs: &[(f64, f64)], t: f64) -> Result<CriterionEstimate> {
    let weighted: Vec<(f64, f64)> = pairs
        .iter()
        .map(|&(v, w)| {
            let (s, c) = libm::sincos(t * v);
            (c * w, s * w)
        })
        .collect();
    let mean = ComplexMean::from_values(&weighted)?;
    Ok(CriterionEstimate {
        value: mean.modulus,
        std_error: mean.std_error,
        n_samples: mean.n_samples,
        parameter: t,
    })
}

/// Criterion functionals from pathwise samples `(X, G_X)`.
pub fn criterion_functionals_from_samples(
    samples: &[(f64, f64)],
    c: f64,
    t_grid: &[f64],
    z_grid: &[f64],
) -> Result<CriterionFunctionals> {
    if !(c > 0.0) {
        return Err(Error::InvalidArgument("c must be positive"));
    }
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    let residuals: Vec<(f64, f64)> = samples.iter().map(|&(x, g)| (x, c - g)).collect();
    let characteristic = t_grid
        .iter()
        .map(|&t| characteristic_functional(&residuals, t))
        .collect::<Result<Vec<_>>>()?;
    let mut stein = Vec::with_capacity(z_grid.len());
    for &z in z_grid {
        let mut values = Vec::with_capacity(residuals.len());
        for &(x, r) in &residuals {
            values.push(stein_solution(z, x)?.1 * r);
        }
        let e = MeanEstimate::from_values(values)?;
        stein.push(CriterionEstimate {
            value: e.mean,
            std_error: e.std_error,
            n_samples: e.n_samples,
            parameter: z,
        });
    }
    Ok(CriterionFunctionals {
        characteristic,
        stein,
    })
}

/// Draws `n_samples` realizations and estimates the criterion functionals
/// of `x` against the target variance `c`. `G_X` is expanded once and then
/// evaluated on each sample alongside `X`.
pub fn criterion_functionals(
    x: &ChaosExpansion,
    c: f64,
    t_grid: &[f64],
    z_grid: &[f64],
    n_samples: usize,
    noise: NoiseSource,
) -> Result<CriterionFunctionals> {
    let gx = x.gamma()?;
    let pairs = pathwise_pairs(&x.compile(), &gx.compile(), noise, n_samples)?;
    criterion_functionals_from_samples(&pairs, c, t_grid, z_grid)
}

/// Binned estimate of the size of `E[(c - G_X) | X]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalResidual {
    /// `√(Σ_b w_b μ_b²)` over bins with sample weight `w_b` and mean `μ_b`.
    pub value: f64,
    /// Delta-method standard error of `value`.
    pub std_error: f64,
    pub n_bins: usize,
    pub n_samples: usize,
}

/// Splits samples `(X, G_X)` into `n_bins` equal-count bins by `X`, averages
/// `c - G_X` inside each bin, and returns the weighted `L²` norm of the bin
/// means. This is an `L²` proxy for the conditional expectation, not its
/// almost-sure limit.
pub fn conditional_residual_from_samples(
    samples: &[(f64, f64)],
    c: f64,
    n_bins: usize,
) -> Result<ConditionalResidual> {
    if n_bins < 2 {
        return Err(Error::InvalidArgument("need at least two bins"));
    }
    if samples.len() < n_bins {
        return Err(Error::InvalidArgument("fewer samples than bins"));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
    if sorted[0].0 == sorted[sorted.len() - 1].0 {
        return Err(Error::DegenerateSample);
    }
    let n = sorted.len();
    let mut q = 0.0;
    let mut bins = Vec::with_capacity(n_bins);
    for b in 0..n_bins {
        let bin = &sorted[b * n / n_bins..(b + 1) * n / n_bins];
        let e = MeanEstimate::from_values(bin.iter().map(|&(_, g)| c - g))?;
        let w = bin.len() as f64 / n as f64;
        q += w * e.mean * e.mean;
        bins.push((w, e));
    }
    let value = libm::sqrt(q);
    let std_error = if value > 0.0 {
        let var_q: f64 = bins
            .iter()
            .map(|(w, e)| 4.0 * w * w * e.mean * e.mean * e.std_error * e.std_error)
            .sum();
        libm::sqrt(var_q) / (2.0 * value)
    } else {
        libm::sqrt(
            bins.iter()
                .map(|(w, e)| w * e.std_error * e.std_error)
                .sum::<f64>(),
        )
    };
    Ok(ConditionalResidual {
        value,
        std_error,
        n_bins,
        n_samples: n,
    })
}

pub fn conditional_residual_estimate(
    x: &ChaosExpansion,
    c: f64,
    n_bins: usize,
    n_samples: usize,
    noise: NoiseSource,
) -> Result<ConditionalResidual> {
    let gx = x.gamma()?;
    let pairs = pathwise_pairs(&x.compile(), &gx.compile(), noise, n_samples)?;
    conditional_residual_from_samples(&pairs, c, n_bins)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::kernel::StepKernel;
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn erfcx_branches_meet() {
        let direct = libm::exp(25.0) * libm::erfc(5.0);
        let mut tail = 5.0;
        for k in (1..=60).rev() {
            tail = 5.0 + (k as f64 * 0.5) / tail;
        }
        let cf = FRAC_1_SQRT_PI / tail;
        assert!((direct - cf).abs() <= 1e-13 * cf);
        // erfcx(u) ~ 1/(u√π) for large u
        let u = 28.0;
        assert!((erfcx(u) * u / FRAC_1_SQRT_PI - 1.0).abs() < 1e-3);
    }

    #[test]
    fn stein_residual_is_zero() {
        for z in [-2.0, -1.0, 0.0, 1.0, 2.0] {
            for i in 0..=160 {
                let x = -8.0 + 0.1 * i as f64;
                let (f, fp) = stein_solution(z, x).unwrap();
                let ind = if x <= z { 1.0 } else { 0.0 };
                assert!((fp - x * f - ind + normal_cdf(z)).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn stein_derivative_matches_finite_differences() {
        let h = 1e-5;
        for z in [-2.0, -1.0, 0.0, 1.0, 2.0] {
            for i in 0..160 {
                // offset keeps points away from the jump of f' at x = z
                let x = -8.0 + 0.05 + 0.1 * i as f64;
                let (_, fp) = stein_solution(z, x).unwrap();
                let up = stein_solution(z, x + h).unwrap().0;
                let down = stein_solution(z, x - h).unwrap().0;
                let fd = (up - down) / (2.0 * h);
                assert!((fd - fp).abs() <= 1e-6, "z={z} x={x}: {fd} vs {fp}");
            }
        }
    }

    #[test]
    fn stein_solution_at_origin() {
        let (f, _) = stein_solution(0.0, 0.0).unwrap();
        assert!((f - SQRT_2PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn stein_solution_tails() {
        // f_z(x) ~ Φ(z)/x as x → ∞ and ~ (1 - Φ(z))/|x| as x → -∞
        for z in [-1.0, 0.0, 1.0] {
            let (fp, _) = stein_solution(z, 38.0).unwrap();
            let (fm, _) = stein_solution(z, -38.0).unwrap();
            assert!(fp.is_finite() && fm.is_finite());
            assert!((38.0 * fp / normal_cdf(z) - 1.0).abs() < 1e-3);
            assert!((38.0 * fm / normal_sf(z) - 1.0).abs() < 1e-3);
            assert!(fp.abs() < stein_solution(z, 8.0).unwrap().0.abs());
        }
        assert!(stein_solution(0.0, 40.5).is_err());
        assert!(stein_solution(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn kolmogorov_examples() {
        assert_eq!(kolmogorov_distance(&[0.0; 10], 1.0).unwrap(), 0.5);
        assert_eq!(kolmogorov_distance(&[], 1.0), Err(Error::EmptySample));
        assert!(kolmogorov_distance(&[1.0], 0.0).is_err());

        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let xs: Vec<f64> = (0..100_000)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        assert!(kolmogorov_distance(&xs, 1.0).unwrap() <= 0.01);
        // sup |Φ(x) - Φ(x/2)| ≈ 0.161
        assert!(kolmogorov_distance(&xs, 4.0).unwrap() >= 0.1);

        let mut rev = xs.clone();
        rev.reverse();
        assert_eq!(
            kolmogorov_distance(&rev, 1.0).unwrap(),
            kolmogorov_distance(&xs, 1.0).unwrap()
        );
    }

    #[test]
    fn bound_rejects_bad_inputs() {
        let g = Grid::new(2).unwrap();
        let f1 = StepKernel::vector(g, &[1.0, 0.5]).unwrap();
        let x = ChaosExpansion::single(f1.clone()).unwrap();
        assert_eq!(fourth_moment_bound(&x).unwrap(), 0.0);
        assert_eq!(
            fourth_moment_bound(&ChaosExpansion::zero(g)),
            Err(Error::ZeroVariance)
        );
        let f2 = StepKernel::from_values(g, 2, alloc::vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        let mixed = x.add(&ChaosExpansion::single(f2).unwrap()).unwrap();
        assert_eq!(fourth_moment_bound(&mixed), Err(Error::NotSingleChaos));
    }

    fn first_chaos_with_unit_variance() -> ChaosExpansion {
        let g = Grid::new(4).unwrap();
        ChaosExpansion::single(StepKernel::vector(g, &[1.0; 4]).unwrap()).unwrap()
    }

    #[test]
    fn exactly_normal_case_gives_zero() {
        let x = first_chaos_with_unit_variance();
        let noise = NoiseSource::new(3);
        let cf =
            criterion_functionals(&x, 1.0, &DEFAULT_T_GRID, &DEFAULT_Z_GRID, 500, noise).unwrap();
        assert!(cf
            .characteristic
            .iter()
            .chain(&cf.stein)
            .all(|e| e.value == 0.0 && e.std_error == 0.0));
        let cr = conditional_residual_estimate(&x, 1.0, DEFAULT_BINS, 500, noise).unwrap();
        assert_eq!(cr.value, 0.0);
    }

    #[test]
    fn misspecified_variance_at_t_zero() {
        let x = first_chaos_with_unit_variance();
        let cf = criterion_functionals(&x, 1.75, &[0.0], &[], 100, NoiseSource::new(1)).unwrap();
        assert_eq!(cf.characteristic[0].value, 0.75);
        let cr = conditional_residual_estimate(&x, 1.75, 4, 100, NoiseSource::new(1)).unwrap();
        assert!((cr.value - 0.75).abs() < 1e-15);
    }

    #[test]
    fn conditional_residual_errors() {
        assert!(conditional_residual_from_samples(&[(1.0, 0.0); 10], 1.0, 2).is_err());
        assert!(matches!(
            conditional_residual_from_samples(&[(1.0, 0.0); 10], 1.0, 1),
            Err(Error::InvalidArgument(_))
        ));
        assert!(conditional_residual_from_samples(&[(1.0, 0.0), (2.0, 0.0)], 1.0, 3).is_err());
    }
}
