//! JSON formats for kernels and expansions.
//!
//! A kernel is `{"order": n, "m": m, "values": [...]}` with the `m^n` values
//! flattened row-major (last index fastest). An expansion is
//! `{"m": m, "kernels": [k_0, k_1, ...]}` where entry `n` is the order-`n`
//! kernel.

use std::path::Path;

use chaoskit_core::{ChaosExpansion, Grid, StepKernel};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelFile {
    pub order: usize,
    pub m: usize,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpansionFile {
    pub m: usize,
    pub kernels: Vec<KernelFile>,
}

impl From<&StepKernel> for KernelFile {
    fn from(k: &StepKernel) -> Self {
        KernelFile {
            order: k.order(),
            m: k.grid().cells(),
            values: k.values().to_vec(),
        }
    }
}

impl KernelFile {
    pub fn to_kernel(&self) -> Result<StepKernel> {
        let grid = Grid::new(self.m)?;
        Ok(StepKernel::from_values(
            grid,
            self.order,
            self.values.clone(),
        )?)
    }
}

impl From<&ChaosExpansion> for ExpansionFile {
    fn from(x: &ChaosExpansion) -> Self {
        ExpansionFile {
            m: x.grid().cells(),
            kernels: x.kernels().iter().map(KernelFile::from).collect(),
        }
    }
}

impl ExpansionFile {
    pub fn to_expansion(&self) -> Result<ChaosExpansion> {
        let grid = Grid::new(self.m)?;
        let mut kernels = Vec::with_capacity(self.kernels.len());
        for (n, k) in self.kernels.iter().enumerate() {
            if k.order != n {
                return Err(HarnessError::Config(format!(
                    "kernel at position {n} has order {}",
                    k.order
                )));
            }
            if k.m != self.m {
                return Err(HarnessError::Config(format!(
                    "kernel of order {n} has m = {}, expansion has m = {}",
                    k.m, self.m
                )));
            }
            kernels.push(k.to_kernel()?);
        }
        Ok(ChaosExpansion::new(grid, kernels)?)
    }
}

pub fn kernel_to_json(k: &StepKernel) -> Result<String> {
    Ok(serde_json::to_string_pretty(&KernelFile::from(k))?)
}

pub fn kernel_from_json(s: &str) -> Result<StepKernel> {
    serde_json::from_str::<KernelFile>(s)?.to_kernel()
}

pub fn expansion_to_json(x: &ChaosExpansion) -> Result<String> {
    Ok(serde_json::to_string_pretty(&ExpansionFile::from(x))?)
}

pub fn expansion_from_json(s: &str) -> Result<ChaosExpansion> {
    serde_json::from_str::<ExpansionFile>(s)?.to_expansion()
}

pub fn read_kernel(path: &Path) -> Result<StepKernel> {
    kernel_from_json(&std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?)
}

pub fn read_expansion(path: &Path) -> Result<ChaosExpansion> {
    expansion_from_json(&std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?)
}

pub fn write_kernel(path: &Path, k: &StepKernel) -> Result<()> {
    std::fs::write(path, kernel_to_json(k)?).map_err(|e| HarnessError::io(path, e))
}

pub fn write_expansion(path: &Path, x: &ChaosExpansion) -> Result<()> {
    std::fs::write(path, expansion_to_json(x)?).map_err(|e| HarnessError::io(path, e))
}
