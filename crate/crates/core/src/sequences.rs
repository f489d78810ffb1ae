//! Benchmark sequences with known limits and the path simulation of an
//! independent pair that is not strongly independent.

use alloc::vec::Vec;
use core::ops::Range;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::chaos::ChaosExpansion;
use crate::error::{Error, Result};
use crate::grid::{Grid, NoiseSource};
use crate::kernel::StepKernel;
use crate::stats::collect_samples;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

/// `I_2(f)` with `f = a Σ_{i ∈ cells} 1_{A_i} ⊗ 1_{A_i}` and `a` chosen so
/// that `E[X²] = c`. Pathwise this is `√(c/(2k)) Σ_i H_2(ξ_i/√Δ)` over the
/// `k` cells: a normalized sum of centered chi-squares.
pub fn diagonal_second_chaos(grid: Grid, cells: Range<usize>, c: f64) -> Result<ChaosExpansion> {
    if cells.is_empty() || cells.end > grid.cells() {
        return Err(Error::InvalidArgument(
            "cell range empty or outside the grid",
        ));
    }
    if !(c > 0.0) {
        return Err(Error::InvalidArgument("variance must be positive"));
    }
    let k = cells.len() as f64;
    let a = libm::sqrt(c / (2.0 * k)) / grid.delta();
    let kernel = StepKernel::from_fn(grid, 2, |i| {
        if i[0] == i[1] && cells.contains(&i[0]) {
            a
        } else {
            0.0
        }
    })?;
    ChaosExpansion::single(kernel)
}

/// [`diagonal_second_chaos`] on a grid of `2·n_blocks` cells, supported on
/// the left or right half. Opposite sides are strongly independent and
/// `k₄ = 12c²/n_blocks`.
pub fn half_support_second_chaos(n_blocks: usize, c: f64, side: Side) -> Result<ChaosExpansion> {
    if n_blocks < 1 {
        return Err(Error::InvalidArgument("n_blocks must be at least 1"));
    }
    let grid = Grid::new(2 * n_blocks)?;
    let cells = match side {
        Side::Left => 0..n_blocks,
        Side::Right => n_blocks..2 * n_blocks,
    };
    diagonal_second_chaos(grid, cells, c)
}

/// `I_q(kernel)`, optionally rescaled so that `E[X²] = target`.
pub fn custom_single_chaos(
    kernel: StepKernel,
    normalize_to: Option<f64>,
) -> Result<ChaosExpansion> {
    if kernel.order() == 0 {
        return Err(Error::InvalidArgument("order must be at least 1"));
    }
    let x = ChaosExpansion::single(kernel)?;
    match normalize_to {
        None => Ok(x),
        Some(target) => {
            if !(target > 0.0) {
                return Err(Error::InvalidArgument(
                    "normalization target must be positive",
                ));
            }
            let v = x.second_moment();
            if v == 0.0 {
                return Err(Error::ZeroVariance);
            }
            Ok(x.scaled(libm::sqrt(target / v)))
        }
    }
}

/// First-chaos components of `X = (X₁+Y₁)/√2` and `Y = (X₁-Y₁)/√2` where
/// `X₁ = √2 I_1(1_{[1/2,1]})` and `Y₁` has no first-chaos component: both
/// equal `I_1(1_{[1/2,1]})`. Needs an even cell count.
pub fn counterexample_first_chaos(grid: Grid) -> Result<(ChaosExpansion, ChaosExpansion)> {
    if !grid.cells().is_multiple_of(2) {
        return Err(Error::InvalidArgument(
            "grid must have an even number of cells",
        ));
    }
    let half = grid.cells() / 2;
    let values: Vec<f64> = (0..grid.cells())
        .map(|i| if i >= half { 1.0 } else { 0.0 })
        .collect();
    let x = ChaosExpansion::single(StepKernel::vector(grid, &values)?)?;
    Ok((x.clone(), x))
}

/// One joint draw of the counterexample pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CounterexampleSample {
    pub x: f64,
    pub y: f64,
    /// `W(1) - W(1/2)`, the increment carrying the shared first chaos.
    pub upper_increment: f64,
    pub path_steps: usize,
}

fn check_path_steps(path_steps: usize) -> Result<()> {
    if path_steps < 100 {
        return Err(Error::InvalidArgument("path_steps must be at least 100"));
    }
    if !path_steps.is_multiple_of(2) {
        return Err(Error::InvalidArgument("path_steps must be even"));
    }
    Ok(())
}

/// Simulates `W` with `path_steps` Euler increments and returns
/// `X₁ = √2 (W(1) - W(1/2))`, `Y₁ = √2 Σ_{t_k < 1/2} sign(W_{t_k}) ΔW_k`
/// (left-point, `sign(0) = +1`), mixed into `X` and `Y`.
pub fn counterexample_sample<R: Rng + ?Sized>(
    path_steps: usize,
    rng: &mut R,
) -> Result<CounterexampleSample> {
    check_path_steps(path_steps)?;
    let sd = libm::sqrt(1.0 / path_steps as f64);
    let half = path_steps / 2;
    let mut w = 0.0f64;
    let mut sign_integral = 0.0;
    for _ in 0..half {
        let dw = sd * rng.sample::<f64, _>(StandardNormal);
        sign_integral += if w >= 0.0 { dw } else { -dw };
        w += dw;
    }
    let mid = w;
    for _ in half..path_steps {
        w += sd * rng.sample::<f64, _>(StandardNormal);
    }
    let sqrt2 = core::f64::consts::SQRT_2;
    let upper_increment = w - mid;
    let x1 = sqrt2 * upper_increment;
    let y1 = sqrt2 * sign_integral;
    Ok(CounterexampleSample {
        x: (x1 + y1) / sqrt2,
        y: (x1 - y1) / sqrt2,
        upper_increment,
        path_steps,
    })
}

/// `n_samples` independent draws; draw `k` uses stream `k` of `noise`.
pub fn simulate_counterexample(
    path_steps: usize,
    n_samples: usize,
    noise: NoiseSource,
) -> Result<Vec<CounterexampleSample>> {
    check_path_steps(path_steps)?;
    collect_samples(n_samples, |k| {
        counterexample_sample(path_steps, &mut noise.stream(k))
    })
    .into_iter()
    .collect()
}
