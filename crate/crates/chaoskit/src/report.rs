//! Report records and their JSON and CSV serializations.
//!
//! Every record keeps exact quantities (computed from kernels) apart from
//! Monte Carlo estimates, which always carry a standard error.

use std::path::Path;

use chaoskit_core::independence::ClassADiagnostic;
use chaoskit_core::stats::MeanEstimate;
use chaoskit_core::stein::{ConditionalResidual, CriterionEstimate, CriterionFunctionals};
use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::{ExperimentConfig, OutputFormat};
use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

impl From<MeanEstimate> for Estimate {
    fn from(e: MeanEstimate) -> Self {
        Estimate {
            value: e.mean,
            std_error: e.std_error,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParameterEstimate {
    pub parameter: f64,
    pub value: f64,
    pub std_error: f64,
}

impl From<&CriterionEstimate> for ParameterEstimate {
    fn from(e: &CriterionEstimate) -> Self {
        ParameterEstimate {
            parameter: e.parameter,
            value: e.value,
            std_error: e.std_error,
        }
    }
}

fn sup_abs(v: &[CriterionEstimate]) -> f64 {
    v.iter().fold(0.0, |acc, e| acc.max(e.value.abs()))
}

fn parameter_estimates(v: &[CriterionEstimate]) -> Vec<ParameterEstimate> {
    v.iter().map(ParameterEstimate::from).collect()
}

/// Characteristic (indexed by `t`) and Stein (indexed by `z`) functionals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionReport {
    pub characteristic: Vec<ParameterEstimate>,
    pub stein: Vec<ParameterEstimate>,
    /// Largest `|value|` over the `t` grid.
    pub characteristic_sup: f64,
    /// Largest `|value|` over the `z` grid.
    pub stein_sup: f64,
}

impl From<&CriterionFunctionals> for CriterionReport {
    fn from(c: &CriterionFunctionals) -> Self {
        CriterionReport {
            characteristic: parameter_estimates(&c.characteristic),
            stein: parameter_estimates(&c.stein),
            characteristic_sup: sup_abs(&c.characteristic),
            stein_sup: sup_abs(&c.stein),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionalReport {
    pub value: f64,
    pub std_error: f64,
    pub n_bins: usize,
}

impl From<&ConditionalResidual> for ConditionalReport {
    fn from(c: &ConditionalResidual) -> Self {
        ConditionalReport {
            value: c.value,
            std_error: c.std_error,
            n_bins: c.n_bins,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassAReport {
    pub max_modulus: f64,
    pub estimates: Vec<ParameterEstimate>,
}

impl From<&ClassADiagnostic> for ClassAReport {
    fn from(d: &ClassADiagnostic) -> Self {
        ClassAReport {
            max_modulus: d.max_modulus,
            estimates: parameter_estimates(&d.estimates),
        }
    }
}

/// Exact moments of one centered variable. The bound is `None` off a
/// single chaos.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExactMoments {
    pub variance: f64,
    pub fourth_cumulant: f64,
    pub gamma_residual: f64,
    pub fourth_moment_bound: Option<f64>,
}

/// Monte Carlo diagnostics of one variable against its target variance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McDiagnostics {
    pub kolmogorov: f64,
    pub criteria: CriterionReport,
    pub conditional: ConditionalReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecouplingExact {
    pub var_x: f64,
    pub var_y: f64,
    pub var_sum: f64,
    pub k4_x: f64,
    pub k4_y: f64,
    pub k4_sum: f64,
    /// `E[(c1 - G_X)²]`.
    pub gamma_residual_x: f64,
    pub gamma_residual_y: f64,
    /// `E[(1 - G_{X+Y})²]`.
    pub gamma_residual_sum: f64,
    /// `√k₄ / E[X²]`.
    pub bound_x: f64,
    pub bound_y: f64,
    pub bound_sum: f64,
    pub mixed_gamma_second_moment: f64,
    pub strongly_independent: bool,
    pub residual_additivity_gap: f64,
    pub cumulant_additivity_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecouplingMc {
    pub dkol_x: f64,
    pub dkol_y: f64,
    pub dkol_sum: f64,
    pub criteria_x: CriterionReport,
    pub criteria_y: CriterionReport,
    pub criteria_sum: CriterionReport,
    pub conditional_x: ConditionalReport,
    pub conditional_y: ConditionalReport,
    pub conditional_sum: ConditionalReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecouplingRecord {
    pub n: usize,
    pub exact: DecouplingExact,
    pub mc: DecouplingMc,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleExact {
    /// `‖f ⊗₁ g‖` for the shared first-chaos kernels; nonzero.
    pub first_chaos_contraction_norm: f64,
    pub strongly_independent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleMc {
    pub variance_x: Estimate,
    pub variance_y: Estimate,
    pub correlation: f64,
    pub kolmogorov_x: f64,
    pub kolmogorov_y: f64,
    /// Distance of `(X + Y)/√2` to `N(0, 1)`.
    pub kolmogorov_sum: f64,
    /// `E[X (W(1) - W(1/2))]`, expected `1/2`.
    pub projection_x: Estimate,
    pub projection_y: Estimate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleRecord {
    pub path_steps: usize,
    pub n_samples: usize,
    pub exact: CounterexampleExact,
    pub mc: CounterexampleMc,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassAExact {
    pub independent_mixed_second_moment: f64,
    pub dependent_mixed_mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassAMc {
    pub independent: ClassAReport,
    /// Evaluated on `{0} ∪ t_grid` so the `t = 0` value `E[X²]` is visible.
    pub dependent: ClassAReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassARecord {
    pub n: usize,
    pub exact: ClassAExact,
    pub mc: ClassAMc,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThreeWayExact {
    pub summands: Vec<ExactMoments>,
    pub sum: ExactMoments,
    pub residual_additivity_gap: f64,
    pub cumulant_additivity_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThreeWayMc {
    pub summands: Vec<McDiagnostics>,
    pub sum: McDiagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThreeWayRecord {
    pub n: usize,
    pub exact: ThreeWayExact,
    pub mc: ThreeWayMc,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InspectRecord {
    /// `None` for fixed (non-sequence) families.
    pub n: Option<usize>,
    pub cells: usize,
    pub max_order: usize,
    pub exact: ExactMoments,
    pub mc: McDiagnostics,
}

// A report holds a handful of records, so the variant size gap is harmless.
#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Record {
    Decoupling(DecouplingRecord),
    Counterexample(CounterexampleRecord),
    ClassA(ClassARecord),
    ThreeWay(ThreeWayRecord),
    Inspect(InspectRecord),
}

impl Record {
    fn n(&self) -> Option<usize> {
        match self {
            Record::Decoupling(r) => Some(r.n),
            Record::Counterexample(_) => None,
            Record::ClassA(r) => Some(r.n),
            Record::ThreeWay(r) => Some(r.n),
            Record::Inspect(r) => r.n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub records: Vec<Record>,
    pub runtime_ms: u64,
}

impl ExperimentReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// One row per record. Nested fields become dotted column names and
    /// list entries are indexed, e.g. `mc.x.criteria.stein.0.value`.
    pub fn to_csv(&self) -> Result<String> {
        let mut rows = Vec::with_capacity(self.records.len());
        for r in &self.records {
            let mut flat = Map::new();
            flatten("", &serde_json::to_value(r)?, &mut flat);
            flat.remove("n");
            rows.push((r.n(), flat));
        }
        let mut header = vec!["experiment".to_string(), "n".to_string()];
        header.extend(
            rows.first()
                .map(|(_, f)| f.keys().cloned())
                .into_iter()
                .flatten(),
        );
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&header)?;
        for (n, flat) in &rows {
            let mut line = vec![
                self.config.experiment.name().to_string(),
                n.map(|n| n.to_string()).unwrap_or_default(),
            ];
            line.extend(header[2..].iter().map(|k| cell(flat.get(k))));
            w.write_record(&line)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn render(&self, format: OutputFormat) -> Result<String> {
        match format {
            OutputFormat::Json => self.to_json(),
            OutputFormat::Csv => self.to_csv(),
        }
    }

    pub fn write(&self, path: &Path, format: OutputFormat) -> Result<()> {
        std::fs::write(path, self.render(format)?).map_err(|e| HarnessError::io(path, e))
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Map<String, Value>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, v)| flatten(&key(k), v, out)),
        Value::Array(a) => a
            .iter()
            .enumerate()
            .for_each(|(i, v)| flatten(&key(&i.to_string()), v, out)),
        _ => {
            out.insert(prefix.to_string(), v.clone());
        }
    }
}

fn cell(v: Option<&Value>) -> String {
    match v {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(v) => v.to_string(),
    }
}
