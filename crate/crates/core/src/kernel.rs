//! Dense step kernels on a [`Grid`] and their `L²` algebra.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::multiset;

/// Upper bound on the number of dense entries `m^order` of one kernel.
pub const MAX_ENTRIES: usize = 100_000_000;

/// Absolute tolerance used when checking that a kernel is symmetric.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// An order-`n` step function on `grid`, stored as a dense row-major array
/// with `m` entries per axis. Entry `(i_1, .., i_n)` is the value on
/// `A_{i_1} × .. × A_{i_n}`. Order 0 holds a single scalar.
#[derive(Debug, Clone, PartialEq)]
pub struct StepKernel {
    grid: Grid,
    order: usize,
    values: Vec<f64>,
}

pub(crate) fn dense_len(grid: Grid, order: usize) -> Result<usize> {
    let mut len = 1usize;
    for _ in 0..order {
        len = len
            .checked_mul(grid.cells())
            .filter(|&l| l <= MAX_ENTRIES)
            .ok_or(Error::KernelTooLarge {
                order,
                cells: grid.cells(),
            })?;
    }
    Ok(len)
}

impl StepKernel {
    pub fn zeros(grid: Grid, order: usize) -> Result<Self> {
        let len = dense_len(grid, order)?;
        Ok(StepKernel {
            grid,
            order,
            values: vec![0.0; len],
        })
    }

    /// Order-0 kernel holding the constant `value`.
    pub fn scalar(grid: Grid, value: f64) -> Self {
        StepKernel {
            grid,
            order: 0,
            values: vec![value],
        }
    }

    /// Wraps a row-major array as-is (no symmetrization).
    pub fn from_values(grid: Grid, order: usize, values: Vec<f64>) -> Result<Self> {
        let len = dense_len(grid, order)?;
        if values.len() != len {
            return Err(Error::LengthMismatch {
                expected: len,
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(StepKernel {
            grid,
            order,
            values,
        })
    }

    /// Builds the array entrywise from the cell indices.
    pub fn from_fn(grid: Grid, order: usize, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        let len = dense_len(grid, order)?;
        let mut digits = vec![0usize; order];
        let mut values = Vec::with_capacity(len);
        for flat in 0..len {
            multiset::decompose(flat, grid.cells(), &mut digits);
            values.push(f(&digits));
        }
        Self::from_values(grid, order, values)
    }

    /// First-order kernel with the given cell values.
    pub fn vector(grid: Grid, values: &[f64]) -> Result<Self> {
        Self::from_values(grid, 1, values.to_vec())
    }

    /// Symmetrization of an arbitrary dense array:
    /// `T̃(x_1..x_n) = (1/n!) Σ_σ T(x_σ(1)..x_σ(n))`.
    pub fn symmetrize(grid: Grid, order: usize, values: Vec<f64>) -> Result<Self> {
        Ok(Self::from_values(grid, order, values)?.symmetrized())
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Entry at the given cell multi-index.
    pub fn get(&self, index: &[usize]) -> f64 {
        debug_assert_eq!(index.len(), self.order);
        self.values[multiset::compose(index, self.grid.cells())]
    }

    /// The order-0 value. Panics for higher orders.
    pub fn as_scalar(&self) -> f64 {
        assert_eq!(self.order, 0, "as_scalar on an order-{} kernel", self.order);
        self.values[0]
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |acc: f64, v| acc.max(v.abs()))
    }

    /// Averages every entry over all rearrangements of its index tuple.
    ///
    /// Each dense entry is visited once: the mean over the distinct
    /// rearrangements of a multiset equals the mean over all `n!`
    /// permutations, since every distinct rearrangement is hit equally often.
    pub fn symmetrized(self) -> Self {
        if self.order < 2 {
            return self;
        }
        let m = self.grid.cells();
        let len = self.values.len();
        let mut scratch = vec![0usize; self.order];
        let mut canon = Vec::with_capacity(len);
        let mut sums = vec![0.0f64; len];
        let mut counts = vec![0u32; len];
        for (flat, &v) in self.values.iter().enumerate() {
            let c = multiset::canonical(flat, m, &mut scratch);
            sums[c] += v;
            counts[c] += 1;
            canon.push(c);
        }
        let values = canon.iter().map(|&c| sums[c] / counts[c] as f64).collect();
        StepKernel {
            grid: self.grid,
            order: self.order,
            values,
        }
    }

    /// Largest deviation of any entry from the entry at its sorted index.
    pub fn asymmetry(&self) -> f64 {
        if self.order < 2 {
            return 0.0;
        }
        let m = self.grid.cells();
        let mut scratch = vec![0usize; self.order];
        self.values
            .iter()
            .enumerate()
            .map(|(flat, &v)| (v - self.values[multiset::canonical(flat, m, &mut scratch)]).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_symmetric(&self) -> bool {
        self.asymmetry() <= SYMMETRY_TOLERANCE * self.max_abs().max(1.0)
    }

    /// `L²([0,1]^n)` inner product `Δ^n Σ f g`.
    pub fn inner_product(&self, other: &StepKernel) -> Result<f64> {
        self.ensure_compatible(other)?;
        let sum: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum();
        Ok(sum * libm::pow(self.grid.delta(), self.order as f64))
    }

    /// `L²` norm; never fails.
    pub fn norm(&self) -> f64 {
        let sum: f64 = self.values.iter().map(|v| v * v).sum();
        libm::sqrt(sum * libm::pow(self.grid.delta(), self.order as f64))
    }

    /// Entrywise `a·f + b·g`.
    pub fn linear_combine(a: f64, f: &StepKernel, b: f64, g: &StepKernel) -> Result<StepKernel> {
        f.ensure_compatible(g)?;
        let values = f
            .values
            .iter()
            .zip(&g.values)
            .map(|(x, y)| a * x + b * y)
            .collect();
        Ok(StepKernel {
            grid: f.grid,
            order: f.order,
            values,
        })
    }

    pub fn scaled(&self, a: f64) -> StepKernel {
        StepKernel {
            grid: self.grid,
            order: self.order,
            values: self.values.iter().map(|v| a * v).collect(),
        }
    }

    /// In-place `self += a·other`.
    pub fn add_scaled(&mut self, a: f64, other: &StepKernel) -> Result<()> {
        self.ensure_compatible(other)?;
        for (x, y) in self.values.iter_mut().zip(&other.values) {
            *x += a * y;
        }
        Ok(())
    }

    /// Contraction of the last `l` arguments of `self` against the last `l`
    /// arguments of `other`:
    ///
    /// `(f ⊗_l g)(s, t) = Δ^l Σ_u f(s, u) g(t, u)`
    ///
    /// which is the exact integral over the `l` shared variables for step
    /// functions. The result has order `p + q - 2l` with the `s` indices
    /// first, and is not symmetrized. `l = 0` is the tensor product.
    pub fn contract(&self, other: &StepKernel, l: usize) -> Result<StepKernel> {
        self.grid.ensure_same(&other.grid)?;
        let (p, q) = (self.order, other.order);
        if l > p.min(q) {
            return Err(Error::ContractionRange {
                index: l,
                left: p,
                right: q,
            });
        }
        let order = p + q - 2 * l;
        let out_len = dense_len(self.grid, order)?;
        let shared = dense_len(self.grid, l)?;
        let rows = self.values.len() / shared;
        let cols = other.values.len() / shared;
        debug_assert_eq!(rows * cols, out_len);
        let weight = libm::pow(self.grid.delta(), l as f64);
        let mut values = Vec::with_capacity(out_len);
        for r in 0..rows {
            let fr = &self.values[r * shared..(r + 1) * shared];
            for c in 0..cols {
                let gc = &other.values[c * shared..(c + 1) * shared];
                let dot: f64 = fr.iter().zip(gc).map(|(a, b)| a * b).sum();
                values.push(weight * dot);
            }
        }
        Ok(StepKernel {
            grid: self.grid,
            order,
            values,
        })
    }

    fn ensure_compatible(&self, other: &StepKernel) -> Result<()> {
        self.grid.ensure_same(&other.grid)?;
        if self.order != other.order {
            return Err(Error::OrderMismatch {
                left: self.order,
                right: other.order,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid(m: usize) -> Grid {
        Grid::new(m).unwrap()
    }

    #[test]
    fn symmetrize_examples() {
        let g = grid(3);
        let t = StepKernel::vector(g, &[1.0, -2.0, 5.0]).unwrap();
        assert_eq!(t.clone().symmetrized(), t);

        let s = StepKernel::symmetrize(grid(2), 2, vec![0.0, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(s.values(), &[0.0, 0.5, 0.5, 0.0]);
        assert_eq!(s.clone().symmetrized(), s);
    }

    #[test]
    fn symmetrize_order_three_by_permutation_average() {
        let g = grid(3);
        let raw = StepKernel::from_fn(g, 3, |i| {
            (i[0] * 9 + i[1] * 3 + i[2]) as f64 * 0.7 - 3.0 * i[2] as f64
        })
        .unwrap();
        let sym = raw.clone().symmetrized();
        let perms = [
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    let x = [a, b, c];
                    let avg: f64 = perms
                        .iter()
                        .map(|p| raw.get(&[x[p[0]], x[p[1]], x[p[2]]]))
                        .sum::<f64>()
                        / 6.0;
                    assert!((sym.get(&x) - avg).abs() < 1e-13);
                }
            }
        }
        assert!(sym.is_symmetric());
        assert!(!raw.is_symmetric());
    }

    #[test]
    fn contraction_examples() {
        let g = grid(2);
        let f = StepKernel::vector(g, &[1.0, 0.0]).unwrap();
        let h = StepKernel::vector(g, &[0.0, 1.0]).unwrap();
        let outer = f.contract(&h, 0).unwrap();
        assert_eq!(outer.order(), 2);
        assert_eq!(outer.values(), &[0.0, 1.0, 0.0, 0.0]);

        let c = f.contract(&f, 1).unwrap();
        assert_eq!(c.order(), 0);
        assert_eq!(c.as_scalar(), 0.5);

        let g4 = grid(4);
        let left = StepKernel::from_fn(g4, 2, |i| {
            if i[0] < 2 && i[1] < 2 {
                1.0 + i[0] as f64 + i[1] as f64
            } else {
                0.0
            }
        })
        .unwrap();
        let right =
            StepKernel::from_fn(g4, 2, |i| if i[0] >= 2 && i[1] >= 2 { 2.0 } else { 0.0 }).unwrap();
        assert!(left.contract(&right, 1).unwrap().is_zero());

        assert!(matches!(
            f.contract(&f, 2),
            Err(Error::ContractionRange { .. })
        ));
        let other = StepKernel::vector(grid(3), &[1.0, 1.0, 1.0]).unwrap();
        assert!(matches!(
            f.contract(&other, 1),
            Err(Error::GridMismatch { .. })
        ));
    }

    #[test]
    fn inner_product_examples() {
        let g = grid(2);
        let f = StepKernel::vector(g, &[1.0, 1.0]).unwrap();
        let z = StepKernel::zeros(g, 1).unwrap();
        assert_eq!(f.inner_product(&f).unwrap(), 1.0);
        assert_eq!(f.inner_product(&z).unwrap(), 0.0);
        assert_eq!(z.inner_product(&z).unwrap(), 0.0);
        assert!(f.inner_product(&f).unwrap() > 0.0);
        let f2 = StepKernel::zeros(g, 2).unwrap();
        assert!(matches!(
            f.inner_product(&f2),
            Err(Error::OrderMismatch { .. })
        ));
    }

    #[test]
    fn linear_combine_examples() {
        let g = grid(1);
        let one = StepKernel::vector(g, &[1.0]).unwrap();
        assert_eq!(
            StepKernel::linear_combine(2.0, &one, 3.0, &one)
                .unwrap()
                .values(),
            &[5.0]
        );
        let g3 = grid(3);
        let f = StepKernel::vector(g3, &[1.0, 2.0, 3.0]).unwrap();
        let z = StepKernel::zeros(g3, 1).unwrap();
        assert_eq!(StepKernel::linear_combine(1.0, &f, 0.0, &z).unwrap(), f);
        assert!(StepKernel::linear_combine(1.0, &f, -1.0, &f)
            .unwrap()
            .is_zero());
    }

    #[test]
    fn full_contraction_is_inner_product() {
        let g = grid(3);
        let f = StepKernel::from_fn(g, 2, |i| (i[0] + i[1]) as f64 - 1.5).unwrap();
        let h = StepKernel::from_fn(g, 2, |i| (i[0] * i[1]) as f64 + 0.25).unwrap();
        let c = f.contract(&h, 2).unwrap().as_scalar();
        assert!((c - f.inner_product(&h).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn size_guard() {
        let g = grid(64);
        assert!(matches!(
            StepKernel::zeros(g, 5),
            Err(Error::KernelTooLarge { .. })
        ));
        assert!(StepKernel::zeros(g, 4).is_ok());
        assert_eq!(
            StepKernel::from_values(grid(2), 1, vec![1.0]),
            Err(Error::LengthMismatch {
                expected: 2,
                found: 1
            })
        );
        assert_eq!(
            StepKernel::from_values(grid(1), 1, vec![f64::INFINITY]),
            Err(Error::NonFinite)
        );
    }

    fn kernel(m: usize, order: usize) -> impl Strategy<Value = StepKernel> {
        let len = m.pow(order as u32);
        proptest::collection::vec(-2.0f64..2.0, len)
            .prop_map(move |v| StepKernel::from_values(Grid::new(m).unwrap(), order, v).unwrap())
    }

    fn sym_kernel(m: usize, order: usize) -> impl Strategy<Value = StepKernel> {
        kernel(m, order).prop_map(StepKernel::symmetrized)
    }

    proptest! {
        #[test]
        fn symmetrize_is_idempotent(t in kernel(3, 3)) {
            let once = t.symmetrized();
            let twice = once.clone().symmetrized();
            for (a, b) in once.values().iter().zip(twice.values()) {
                prop_assert!((a - b).abs() <= 1e-12);
            }
            prop_assert!(once.is_symmetric());
        }

        #[test]
        fn symmetrized_contraction_norm_is_not_larger(
            f in sym_kernel(3, 2), g in sym_kernel(3, 3), l in 0usize..=2,
        ) {
            let c = f.contract(&g, l).unwrap();
            let s = c.clone().symmetrized();
            prop_assert!(s.norm() <= c.norm() * (1.0 + 1e-12) + 1e-15);
        }

        #[test]
        fn contraction_is_bilinear(
            f1 in sym_kernel(3, 2), f2 in sym_kernel(3, 2), g in sym_kernel(3, 2),
            a in -3.0f64..3.0, b in -3.0f64..3.0, l in 0usize..=2,
        ) {
            let lhs = StepKernel::linear_combine(a, &f1, b, &f2).unwrap().contract(&g, l).unwrap();
            let rhs = StepKernel::linear_combine(
                a, &f1.contract(&g, l).unwrap(), b, &f2.contract(&g, l).unwrap()).unwrap();
            for (x, y) in lhs.values().iter().zip(rhs.values()) {
                prop_assert!((x - y).abs() <= 1e-12 * (1.0 + y.abs()));
            }
            let rhs2 = StepKernel::linear_combine(
                a, &g.contract(&f1, l).unwrap(), b, &g.contract(&f2, l).unwrap()).unwrap();
            let lhs2 = g.contract(&StepKernel::linear_combine(a, &f1, b, &f2).unwrap(), l).unwrap();
            for (x, y) in lhs2.values().iter().zip(rhs2.values()) {
                prop_assert!((x - y).abs() <= 1e-12 * (1.0 + y.abs()));
            }
        }

        #[test]
        fn inner_product_is_symmetric_and_definite(f in kernel(4, 2), g in kernel(4, 2)) {
            let fg = f.inner_product(&g).unwrap();
            let gf = g.inner_product(&f).unwrap();
            prop_assert_eq!(fg, gf);
            prop_assert!(f.inner_product(&f).unwrap() >= 0.0);
            prop_assert_eq!(f.inner_product(&f).unwrap() == 0.0, f.is_zero());
        }
    }
}
