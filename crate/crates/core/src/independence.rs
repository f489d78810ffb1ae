//! Independence of multiple integrals through first contractions, strong
//! independence of expansions, and the mixed-Gamma diagnostic for class-𝒜
//! couples.

use alloc::vec::Vec;

use crate::chaos::ChaosExpansion;
use crate::error::{Error, Result};
use crate::grid::NoiseSource;
use crate::kernel::StepKernel;
use crate::stats::collect_samples;
use crate::stein::{characteristic_functional, CriterionEstimate};

/// Default witness tolerance, relative to `‖f‖‖g‖`.
pub const DEFAULT_RELATIVE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndependenceWitness {
    pub independent: bool,
    /// `‖f ⊗_1 g‖`.
    pub norm: f64,
    pub tolerance: f64,
}

/// `I_p(f)` and `I_q(g)` (`p, q >= 1`) are independent iff `f ⊗_1 g = 0`.
///
/// `tol` is an absolute bound on `‖f ⊗_1 g‖`; `None` means
/// `DEFAULT_RELATIVE_TOLERANCE · ‖f‖ ‖g‖`.
pub fn integrals_independent(
    f: &StepKernel,
    g: &StepKernel,
    tol: Option<f64>,
) -> Result<IndependenceWitness> {
    if f.order() == 0 || g.order() == 0 {
        return Err(Error::InvalidArgument(
            "independence criterion needs orders >= 1",
        ));
    }
    let norm = f.contract(g, 1)?.norm();
    let tolerance = tol.unwrap_or(DEFAULT_RELATIVE_TOLERANCE * f.norm() * g.norm());
    Ok(IndependenceWitness {
        independent: norm <= tolerance,
        norm,
        tolerance,
    })
}

/// Orders and first-contraction norm of one pair of chaos components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairWitness {
    pub order_x: usize,
    pub order_y: usize,
    pub norm: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrongIndependence {
    pub independent: bool,
    /// Pair with the largest contraction norm, if any pair was tested.
    pub worst: Option<PairWitness>,
}

/// Every nonzero component `I_n(f_n)` of `x` (`n >= 1`) independent of every
/// nonzero component `I_m(g_m)` of `y` (`m >= 1`).
pub fn strongly_independent(
    x: &ChaosExpansion,
    y: &ChaosExpansion,
    tol: Option<f64>,
) -> Result<StrongIndependence> {
    x.grid().ensure_same(&y.grid())?;
    let mut independent = true;
    let mut worst: Option<PairWitness> = None;
    for n in x.nonzero_orders().filter(|&n| n > 0) {
        for m in y.nonzero_orders().filter(|&m| m > 0) {
            let w = integrals_independent(&x.kernels()[n], &y.kernels()[m], tol)?;
            independent &= w.independent;
            if worst.is_none_or(|p| w.norm > p.norm) {
                worst = Some(PairWitness {
                    order_x: n,
                    order_y: m,
                    norm: w.norm,
                    tolerance: w.tolerance,
                });
            }
        }
    }
    Ok(StrongIndependence { independent, worst })
}

/// Estimates of `|E[e^{it(X+Y)} ⟨DX, D(-L)^{-1}Y⟩]|` over a `t` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassADiagnostic {
    pub max_modulus: f64,
    pub estimates: Vec<CriterionEstimate>,
}

impl ClassADiagnostic {
    /// Every modulus within `k` standard errors of zero.
    pub fn consistent_with_zero(&self, k: f64) -> bool {
        self.estimates.iter().all(|e| e.value <= k * e.std_error)
    }
}

/// Diagnostic from pathwise samples `(X + Y, ⟨DX, D(-L)^{-1}Y⟩)`.
pub fn class_a_diagnostic_from_samples(
    samples: &[(f64, f64)],
    t_grid: &[f64],
) -> Result<ClassADiagnostic> {
    let estimates = t_grid
        .iter()
        .map(|&t| characteristic_functional(samples, t))
        .collect::<Result<Vec<_>>>()?;
    let max_modulus = estimates.iter().fold(0.0, |acc: f64, e| acc.max(e.value));
    Ok(ClassADiagnostic {
        max_modulus,
        estimates,
    })
}

/// Necessary condition for `(X, Y)` in class 𝒜: the mixed Gamma term is
/// orthogonal to every `e^{it(X+Y)}`. A zero result is consistent with
/// membership but does not prove it.
pub fn class_a_diagnostic(
    x: &ChaosExpansion,
    y: &ChaosExpansion,
    t_grid: &[f64],
    n_samples: usize,
    noise: NoiseSource,
) -> Result<ClassADiagnostic> {
    let sum = x.add(y)?.compile();
    let mixed = x.cross_gamma(y)?.compile();
    let grid = x.grid();
    let samples = collect_samples(n_samples, |k| {
        let xi = noise.sample_increments(grid, k);
        (
            sum.evaluate_increments(xi.increments()),
            mixed.evaluate_increments(xi.increments()),
        )
    });
    class_a_diagnostic_from_samples(&samples, t_grid)
}
