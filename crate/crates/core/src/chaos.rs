//! Finite chaos expansions `X = Σ_{n=0}^{N} I_n(f_n)` with step kernels.
//!
//! Everything here is exact algebra on kernels except [`CompiledExpansion`],
//! which evaluates an expansion on one realization of the cell increments.
//! The Malliavin derivative, the Ornstein-Uhlenbeck generator and its
//! inverse never appear as standalone objects: they enter only through the
//! closed-form kernel maps [`ChaosExpansion::gamma`] and
//! [`ChaosExpansion::cross_gamma`].

use alloc::vec;
use alloc::vec::Vec;

use crate::combinatorics::{binomial, factorial};
use crate::error::{Error, Result};
use crate::grid::{GaussianSample, Grid};
use crate::hermite::hermite_table;
use crate::kernel::StepKernel;
use crate::multiset;

/// Highest chaos order any operation may produce.
pub const MAX_ORDER: usize = 8;

/// `Σ_n I_n(f_n)`; slot `n` holds the symmetric order-`n` kernel `f_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChaosExpansion {
    grid: Grid,
    kernels: Vec<StepKernel>,
}

impl ChaosExpansion {
    /// Builds an expansion from kernels listed by order (`kernels[n]` must
    /// have order `n`). Every kernel must be symmetric and live on `grid`.
    pub fn new(grid: Grid, kernels: Vec<StepKernel>) -> Result<Self> {
        if kernels.len() > MAX_ORDER + 1 {
            return Err(Error::OrderTooLarge {
                order: kernels.len() - 1,
                limit: MAX_ORDER,
            });
        }
        for (n, k) in kernels.iter().enumerate() {
            grid.ensure_same(&k.grid())?;
            if k.order() != n {
                return Err(Error::OrderMismatch {
                    left: n,
                    right: k.order(),
                });
            }
            if !k.is_symmetric() {
                return Err(Error::NotSymmetric {
                    deviation: k.asymmetry(),
                });
            }
        }
        let mut x = ChaosExpansion { grid, kernels };
        if x.kernels.is_empty() {
            x.kernels.push(StepKernel::scalar(grid, 0.0));
        }
        Ok(x)
    }

    pub fn zero(grid: Grid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: Grid, value: f64) -> Self {
        ChaosExpansion {
            grid,
            kernels: vec![StepKernel::scalar(grid, value)],
        }
    }

    /// `I_n(f)` for a symmetric kernel `f` of order `n`.
    pub fn single(kernel: StepKernel) -> Result<Self> {
        let grid = kernel.grid();
        let n = kernel.order();
        if n > MAX_ORDER {
            return Err(Error::OrderTooLarge {
                order: n,
                limit: MAX_ORDER,
            });
        }
        if !kernel.is_symmetric() {
            return Err(Error::NotSymmetric {
                deviation: kernel.asymmetry(),
            });
        }
        let mut kernels = Vec::with_capacity(n + 1);
        for k in 0..n {
            kernels.push(StepKernel::zeros(grid, k)?);
        }
        kernels.push(kernel);
        Ok(ChaosExpansion { grid, kernels })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    /// Highest stored order (trailing slots may be zero).
    pub fn max_order(&self) -> usize {
        self.kernels.len() - 1
    }

    pub fn kernel(&self, order: usize) -> Option<&StepKernel> {
        self.kernels.get(order)
    }

    pub fn kernels(&self) -> &[StepKernel] {
        &self.kernels
    }

    /// `E[X] = f_0`.
    pub fn expectation(&self) -> f64 {
        self.kernels[0].as_scalar()
    }

    /// Orders whose kernel is not identically zero.
    pub fn nonzero_orders(&self) -> impl Iterator<Item = usize> + '_ {
        self.kernels
            .iter()
            .enumerate()
            .filter(|(_, k)| !k.is_zero())
            .map(|(n, _)| n)
    }

    pub fn is_zero(&self) -> bool {
        self.nonzero_orders().next().is_none()
    }

    /// `Some(q)` when the only nonzero kernel has order `q >= 1`.
    pub fn single_chaos_order(&self) -> Option<usize> {
        let mut it = self.nonzero_orders();
        match (it.next(), it.next()) {
            (Some(q), None) if q >= 1 => Some(q),
            _ => None,
        }
    }

    /// Projection on the `n`-th chaos.
    pub fn component(&self, n: usize) -> Result<ChaosExpansion> {
        match self.kernels.get(n) {
            Some(k) if n > 0 => Self::single(k.clone()),
            Some(k) => Ok(Self::constant(self.grid, k.as_scalar())),
            None => Ok(Self::zero(self.grid)),
        }
    }

    pub fn ensure_centered(&self) -> Result<()> {
        let mean = self.expectation();
        if mean != 0.0 {
            return Err(Error::NotCentered { mean });
        }
        Ok(())
    }

    /// Drops trailing all-zero orders.
    pub fn trimmed(mut self) -> Self {
        while self.kernels.len() > 1 && self.kernels.last().is_some_and(StepKernel::is_zero) {
            self.kernels.pop();
        }
        self
    }

    /// `a·X + b·Y`.
    pub fn linear_combine(a: f64, x: &ChaosExpansion, b: f64, y: &ChaosExpansion) -> Result<Self> {
        x.grid.ensure_same(&y.grid)?;
        let top = x.max_order().max(y.max_order());
        let mut kernels = Vec::with_capacity(top + 1);
        for n in 0..=top {
            let k = match (x.kernels.get(n), y.kernels.get(n)) {
                (Some(f), Some(g)) => StepKernel::linear_combine(a, f, b, g)?,
                (Some(f), None) => f.scaled(a),
                (None, Some(g)) => g.scaled(b),
                (None, None) => unreachable!(),
            };
            kernels.push(k);
        }
        Ok(ChaosExpansion {
            grid: x.grid,
            kernels,
        })
    }

    pub fn add(&self, other: &ChaosExpansion) -> Result<Self> {
        Self::linear_combine(1.0, self, 1.0, other)
    }

    pub fn scaled(&self, a: f64) -> Self {
        ChaosExpansion {
            grid: self.grid,
            kernels: self.kernels.iter().map(|k| k.scaled(a)).collect(),
        }
    }

    /// `c - X`.
    pub fn subtracted_from(&self, c: f64) -> Self {
        let mut out = self.scaled(-1.0);
        out.kernels[0] = StepKernel::scalar(self.grid, c - self.expectation());
        out
    }

    /// `E[XY] = f_0 g_0 + Σ_{n≥1} n! ⟨f_n, g_n⟩`.
    pub fn expectation_of_product(&self, other: &ChaosExpansion) -> Result<f64> {
        self.grid.ensure_same(&other.grid)?;
        let mut total = 0.0;
        for (n, (f, g)) in self.kernels.iter().zip(&other.kernels).enumerate() {
            total += factorial(n) * f.inner_product(g)?;
        }
        Ok(total)
    }

    /// `E[X²]`, exact.
    pub fn second_moment(&self) -> f64 {
        self.kernels
            .iter()
            .enumerate()
            .map(|(n, f)| {
                let sum: f64 = f.values().iter().map(|v| v * v).sum();
                factorial(n) * sum * libm::pow(f.grid().delta(), n as f64)
            })
            .sum()
    }

    /// Chaos expansion of the product `XY`, from
    /// `I_p(f) I_q(g) = Σ_l l! C(p,l) C(q,l) I_{p+q-2l}(f ⊗̃_l g)`.
    pub fn multiply(&self, other: &ChaosExpansion) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        let top = self.max_order() + other.max_order();
        if top > MAX_ORDER {
            return Err(Error::OrderTooLarge {
                order: top,
                limit: MAX_ORDER,
            });
        }
        let mut acc = Accumulator::new(self.grid, top);
        for (p, f) in self.kernels.iter().enumerate() {
            if f.is_zero() {
                continue;
            }
            for (q, g) in other.kernels.iter().enumerate() {
                if g.is_zero() {
                    continue;
                }
                for l in 0..=p.min(q) {
                    let coef = factorial(l) * binomial(p, l) * binomial(q, l);
                    acc.add(coef, &f.contract(g, l)?)?;
                }
            }
        }
        acc.finish()
    }

    /// `⟨DX, D(-L)^{-1}Y⟩` as a chaos expansion.
    ///
    /// With `D_α I_n(f) = n I_{n-1}(f(·,α))` and
    /// `D_α (-L)^{-1} I_m(g) = I_{m-1}(g(·,α))`, each pair of components
    /// contributes `n Σ_{k<n∧m} k! C(n-1,k) C(m-1,k) I_{n+m-2-2k}(f ⊗̃_{k+1} g)`.
    /// Constant slots have zero derivative and do not contribute.
    pub fn cross_gamma(&self, other: &ChaosExpansion) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        let top = (self.max_order() + other.max_order()).saturating_sub(2);
        if top > MAX_ORDER {
            return Err(Error::OrderTooLarge {
                order: top,
                limit: MAX_ORDER,
            });
        }
        let mut acc = Accumulator::new(self.grid, top);
        for (n, f) in self.kernels.iter().enumerate().skip(1) {
            if f.is_zero() {
                continue;
            }
            for (m, g) in other.kernels.iter().enumerate().skip(1) {
                if g.is_zero() {
                    continue;
                }
                for k in 0..n.min(m) {
                    let coef = n as f64 * factorial(k) * binomial(n - 1, k) * binomial(m - 1, k);
                    acc.add(coef, &f.contract(g, k + 1)?)?;
                }
            }
        }
        acc.finish()
    }

    /// `G_X = ⟨DX, D(-L)^{-1}X⟩`.
    pub fn gamma(&self) -> Result<Self> {
        self.cross_gamma(self)
    }

    /// `E[(c - G_X)²]`, exact.
    pub fn gamma_residual(&self, c: f64) -> Result<f64> {
        Ok(self.gamma()?.subtracted_from(c).second_moment())
    }

    /// Fourth cumulant `E[X⁴] - 3 (E[X²])²` of a centered expansion.
    ///
    /// Single-chaos inputs use [`Self::fourth_cumulant_by_contractions`],
    /// which never forms the order-`2q` kernel of `X²`; anything else goes
    /// through [`Self::fourth_cumulant_by_product`].
    pub fn fourth_cumulant(&self) -> Result<f64> {
        self.ensure_centered()?;
        if self.single_chaos_order().is_some() {
            self.fourth_cumulant_by_contractions()
        } else {
            self.fourth_cumulant_by_product()
        }
    }

    /// `E[X⁴] - 3(E[X²])²` with `E[X⁴] = E[(X²)²]` read off the chaos
    /// expansion of `X²` by the isometry.
    pub fn fourth_cumulant_by_product(&self) -> Result<f64> {
        self.ensure_centered()?;
        let square = self.multiply(self)?;
        let var = self.second_moment();
        Ok(square.second_moment() - 3.0 * var * var)
    }

    /// For `X = I_q(f)`:
    /// `k₄ = (3/q) Σ_{r=1}^{q-1} r (r!)² C(q,r)⁴ (2q-2r)! ‖f ⊗̃_r f‖²`.
    pub fn fourth_cumulant_by_contractions(&self) -> Result<f64> {
        self.ensure_centered()?;
        let q = match self.single_chaos_order() {
            Some(q) => q,
            None if self.is_zero() => return Ok(0.0),
            None => return Err(Error::NotSingleChaos),
        };
        let f = &self.kernels[q];
        let mut total = 0.0;
        for r in 1..q {
            let norm = f.contract(f, r)?.symmetrized().norm();
            let rf = factorial(r);
            total += r as f64
                * rf
                * rf
                * libm::pow(binomial(q, r), 4.0)
                * factorial(2 * q - 2 * r)
                * norm
                * norm;
        }
        Ok(3.0 * total / q as f64)
    }

    /// Prepares the expansion for repeated pathwise evaluation.
    pub fn compile(&self) -> CompiledExpansion {
        CompiledExpansion::new(self)
    }

    /// `Σ_n I_n(f_n)` on one realization. Compiles on every call; use
    /// [`Self::compile`] inside sampling loops.
    pub fn evaluate(&self, sample: &GaussianSample) -> Result<f64> {
        self.compile().evaluate(sample)
    }
}

/// Per-order sums of unsymmetrized kernels; symmetrized once at the end.
struct Accumulator {
    grid: Grid,
    slots: Vec<Option<StepKernel>>,
}

impl Accumulator {
    fn new(grid: Grid, top: usize) -> Self {
        Accumulator {
            grid,
            slots: (0..=top).map(|_| None).collect(),
        }
    }

    fn add(&mut self, coef: f64, kernel: &StepKernel) -> Result<()> {
        match &mut self.slots[kernel.order()] {
            Some(k) => k.add_scaled(coef, kernel),
            slot @ None => {
                *slot = Some(kernel.scaled(coef));
                Ok(())
            }
        }
    }

    fn finish(self) -> Result<ChaosExpansion> {
        let grid = self.grid;
        let mut kernels = Vec::with_capacity(self.slots.len());
        for (n, slot) in self.slots.into_iter().enumerate() {
            kernels.push(match slot {
                Some(k) => k.symmetrized(),
                None => StepKernel::zeros(grid, n)?,
            });
        }
        Ok(ChaosExpansion { grid, kernels }.trimmed())
    }
}

#[derive(Debug, Clone, Copy)]
struct Term {
    coef: f64,
    start: u32,
    len: u32,
}

/// A chaos expansion flattened into a list of Hermite monomials.
///
/// For each order `n` and each multiset `M` of cells with distinct cells
/// `j_r` of multiplicity `k_r`, the term is
/// `(n! / Π k_r!) f(M) Π_r Δ^{k_r/2} H_{k_r}(ξ_{j_r}/√Δ)`. Zero kernel
/// entries produce no term.
#[derive(Debug, Clone)]
pub struct CompiledExpansion {
    grid: Grid,
    constant: f64,
    max_degree: usize,
    terms: Vec<Term>,
    factors: Vec<(u32, u8)>,
}

impl CompiledExpansion {
    pub fn new(x: &ChaosExpansion) -> Self {
        let grid = x.grid;
        let m = grid.cells();
        let sqrt_delta = libm::sqrt(grid.delta());
        let mut terms = Vec::new();
        let mut factors = Vec::new();
        let mut max_degree = 0;
        for (n, f) in x.kernels.iter().enumerate().skip(1) {
            if f.is_zero() {
                continue;
            }
            let scale = factorial(n) * libm::pow(sqrt_delta, n as f64);
            for (flat, runs) in multiset::sorted_tuples(m, n) {
                let v = f.values()[flat];
                if v == 0.0 {
                    continue;
                }
                let denom: f64 = runs.iter().map(|&(_, k)| factorial(k)).product();
                let start = factors.len() as u32;
                for &(cell, k) in &runs {
                    factors.push((cell as u32, k as u8));
                    max_degree = max_degree.max(k);
                }
                terms.push(Term {
                    coef: scale * v / denom,
                    start,
                    len: runs.len() as u32,
                });
            }
        }
        CompiledExpansion {
            grid,
            constant: x.expectation(),
            max_degree,
            terms,
            factors,
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    /// Number of Hermite monomials (excluding the constant).
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn evaluate(&self, sample: &GaussianSample) -> Result<f64> {
        self.grid.ensure_same(&sample.grid())?;
        Ok(self.evaluate_increments(sample.increments()))
    }

    /// Evaluates on raw increments; `increments.len()` must equal the cell
    /// count.
    pub fn evaluate_increments(&self, increments: &[f64]) -> f64 {
        debug_assert_eq!(increments.len(), self.grid.cells());
        if self.terms.is_empty() {
            return self.constant;
        }
        let width = self.max_degree + 1;
        let inv_sqrt_delta = 1.0 / libm::sqrt(self.grid.delta());
        let mut table = vec![0.0; increments.len() * width];
        for (row, &xi) in table.chunks_exact_mut(width).zip(increments) {
            hermite_table(xi * inv_sqrt_delta, row);
        }
        let mut total = self.constant;
        for t in &self.terms {
            let mut prod = t.coef;
            for &(cell, k) in &self.factors[t.start as usize..(t.start + t.len) as usize] {
                prod *= table[cell as usize * width + k as usize];
            }
            total += prod;
        }
        total
    }
}
