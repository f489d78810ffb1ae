//! Cell discretization of `[0, 1]` and reproducible Wiener increments.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// `m` equal cells `A_i = [i/m, (i+1)/m)` covering `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    cells: usize,
    delta: f64,
}

impl Grid {
    pub fn new(cells: usize) -> Result<Self> {
        if cells == 0 {
            return Err(Error::InvalidArgument("grid needs at least one cell"));
        }
        Ok(Grid {
            cells,
            delta: 1.0 / cells as f64,
        })
    }

    #[inline]
    pub fn cells(&self) -> usize {
        self.cells
    }

    /// Cell width `1/m`, computed once at construction.
    #[inline]
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Left-closed, right-open bounds of cell `i`.
    pub fn cell_bounds(&self, i: usize) -> (f64, f64) {
        let m = self.cells as f64;
        (i as f64 / m, (i + 1) as f64 / m)
    }

    pub(crate) fn ensure_same(&self, other: &Grid) -> Result<()> {
        if self.cells != other.cells {
            return Err(Error::GridMismatch {
                left: self.cells,
                right: other.cells,
            });
        }
        Ok(())
    }
}

/// One realization of the cell increments `W(A_i) ~ N(0, 1/m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianSample {
    grid: Grid,
    increments: Vec<f64>,
}

impl GaussianSample {
    /// Draws `m` independent `N(0, delta)` increments from `rng`.
    pub fn draw<R: Rng + ?Sized>(grid: Grid, rng: &mut R) -> Self {
        let scale = libm::sqrt(grid.delta());
        let increments = (0..grid.cells())
            .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
            .collect();
        GaussianSample { grid, increments }
    }

    pub fn from_increments(grid: Grid, increments: Vec<f64>) -> Result<Self> {
        if increments.len() != grid.cells() {
            return Err(Error::LengthMismatch {
                expected: grid.cells(),
                found: increments.len(),
            });
        }
        if increments.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(GaussianSample { grid, increments })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn increments(&self) -> &[f64] {
        &self.increments
    }
}

/// Master seed from which one independent random stream per sample index is
/// derived.
///
/// Stream `k` is a ChaCha8 generator keyed by the master seed with stream id
/// `k`, so sample `k` does not depend on how many other samples were drawn
/// before it or on which thread draws it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NoiseSource {
    seed: u64,
}

impl NoiseSource {
    pub const fn new(seed: u64) -> Self {
        NoiseSource { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Generator for sample `index`.
    pub fn stream(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        rng
    }

    /// An unrelated source for a sub-experiment labelled `tag`.
    pub fn fork(&self, tag: u64) -> NoiseSource {
        NoiseSource {
            seed: splitmix64(self.seed ^ splitmix64(tag.wrapping_add(0x5851_f42d_4c95_7f2d))),
        }
    }

    /// Increments of sample `index` on `grid`.
    pub fn sample_increments(&self, grid: Grid, index: u64) -> GaussianSample {
        GaussianSample::draw(grid, &mut self.stream(index))
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
