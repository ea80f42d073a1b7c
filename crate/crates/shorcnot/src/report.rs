//! JSON report shapes.

use std::collections::BTreeMap;

use serde::Serialize;
use shorcnot_core::cost::{self, CostFormulaId, FitPoint, RuntimeEstimate, WindowPlan};
use shorcnot_core::modexp::{build_windowed_modexp, ModExpParams};
use shorcnot_core::numtheory::gcd;
use shorcnot_core::shor::{Attempt, Evaluation, FactorOutcome};
use shorcnot_core::sim::{Counterexample, VerifyReport};
use shorcnot_core::{Circuit, Error};

use crate::registry::{CircuitKind, CircuitSpec};

/// Widest modulus for which the cost report builds circuits to measure.
pub const MEASURE_MAX_N: usize = 10;

#[derive(Debug, Serialize)]
pub struct RegisterInfo {
    pub name: String,
    pub start: usize,
    pub len: usize,
    pub role: &'static str,
    pub initial: u64,
}

#[derive(Debug, Serialize)]
pub struct CircuitSummary {
    pub circuit: String,
    pub n: usize,
    pub num_qubits: usize,
    pub gates: usize,
    pub x: u64,
    pub cx: u64,
    pub ccx: u64,
    pub cnot_count: u64,
    pub normalized_cnot_count: u64,
    pub model: Option<u128>,
    pub registers: Vec<RegisterInfo>,
    /// CNOTs per label of the outermost blocks.
    pub blocks: BTreeMap<String, u64>,
}

impl CircuitSummary {
    pub fn new(name: &str, n: usize, c: &Circuit, model: Option<u128>) -> Self {
        let counts = c.gate_counts();
        let mut spans: Vec<_> = c.blocks().iter().collect();
        spans.sort_by_key(|b| (b.gates.start, std::cmp::Reverse(b.gates.end)));
        let mut blocks = BTreeMap::new();
        let mut covered = 0;
        for b in spans {
            // Only outermost blocks, so every gate is counted once.
            if b.gates.start < covered || b.gates.is_empty() {
                continue;
            }
            covered = b.gates.end;
            let cnots = shorcnot_core::circuit::cnot_count(&c.gates()[b.gates.clone()]);
            *blocks.entry(b.label.clone()).or_insert(0) += cnots;
        }
        Self {
            circuit: name.into(),
            n,
            num_qubits: c.num_qubits(),
            gates: c.len(),
            x: counts.x,
            cx: counts.cx,
            ccx: counts.ccx,
            cnot_count: c.cnot_count(),
            normalized_cnot_count: c.normalized_cnot_count(),
            model,
            registers: c
                .layout()
                .entries()
                .iter()
                .map(|r| RegisterInfo {
                    name: r.name.clone(),
                    start: r.start,
                    len: r.len,
                    role: r.role.as_str(),
                    initial: r.initial,
                })
                .collect(),
            blocks,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ModelMeasured {
    pub model: u128,
    /// Normalized count of a built instance, when one was built.
    pub measured: Option<u64>,
    pub measured_raw: Option<u64>,
}

#[derive(Debug, Serialize)]
pub struct WindowPlanReport {
    pub m: u64,
    pub window_count: u64,
    pub total_model: u128,
    pub total_measured: Option<u64>,
}

#[derive(Debug, Serialize)]
pub struct Totals {
    pub shor: u128,
    pub lower_bound: u128,
    pub qft: u128,
}

#[derive(Debug, Serialize)]
pub struct RuntimeReport {
    pub t_cnot: f64,
    pub coding_factor: f64,
    pub cnot_total: u128,
    pub seconds: f64,
    pub days: f64,
    pub years: f64,
}

impl From<RuntimeEstimate> for RuntimeReport {
    fn from(r: RuntimeEstimate) -> Self {
        Self {
            t_cnot: r.t_cnot,
            coding_factor: r.coding_factor,
            cnot_total: r.cnot_total,
            seconds: r.wall_time,
            days: r.days(),
            years: r.years(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct CostReport {
    pub n: u64,
    pub per_primitive: BTreeMap<&'static str, ModelMeasured>,
    pub window_plan: WindowPlanReport,
    pub totals: Option<Totals>,
    pub runtime: Option<RuntimeReport>,
}

/// Largest odd prime below `2^n`, falling back to the largest odd value.
pub fn representative_modulus(n: usize) -> u64 {
    let top = (1u64 << n) - 1;
    let is_prime = |v: u64| {
        v >= 2
            && (2..)
                .take_while(|d| d * d <= v)
                .all(|d| !v.is_multiple_of(d))
    };
    (3..=top)
        .rev()
        .step_by(2)
        .find(|&v| is_prime(v))
        .unwrap_or(top)
}

/// Smallest base in `[2, N)` coprime to `N`.
pub fn representative_base(modulus: u64) -> u64 {
    (2..modulus).find(|&a| gcd(a, modulus) == 1).unwrap_or(1)
}

pub fn primitive_entry(id: CostFormulaId, n: usize) -> Result<ModelMeasured, Error> {
    let model = cost::primitive_cnot_count(id, n as u64);
    let built = match CircuitKind::for_formula(id) {
        Some(kind) if (2..=MEASURE_MAX_N).contains(&n) => {
            let mut spec = CircuitSpec::new(kind, n).modulus(representative_modulus(n));
            spec.constant = Some(representative_modulus(n));
            Some(spec.build()?)
        }
        _ => None,
    };
    Ok(ModelMeasured {
        model,
        measured: built.as_ref().map(Circuit::normalized_cnot_count),
        measured_raw: built.as_ref().map(Circuit::cnot_count),
    })
}

/// Builds the exponentiation circuit at the plan's window and returns its
/// normalized count.
pub fn measure_modexp(n: usize, plan: &WindowPlan) -> Result<u64, Error> {
    let modulus = representative_modulus(n);
    let p = ModExpParams::new(n, modulus, representative_base(modulus), plan.m as usize)?;
    Ok(build_windowed_modexp(&p)?.normalized_cnot_count())
}

pub fn cost_report(n: u64, t_cnot: f64, coding_factor: f64) -> Result<CostReport, Error> {
    let mut per_primitive = BTreeMap::new();
    for id in CostFormulaId::ALL {
        per_primitive.insert(id.as_str(), primitive_entry(id, n as usize)?);
    }
    let plan = cost::optimal_window(n)?;
    let total_measured = if (2..=MEASURE_MAX_N as u64).contains(&n) {
        Some(measure_modexp(n as usize, &plan)?)
    } else {
        None
    };
    let (totals, runtime) = if n >= 2 {
        let totals = Totals {
            shor: cost::total_shor_count(n)?,
            lower_bound: cost::lower_bound_count(n)?,
            qft: cost::primitive_cnot_count(CostFormulaId::Qft2n, n),
        };
        let runtime = cost::runtime_estimate(n, t_cnot, coding_factor)?;
        (Some(totals), Some(runtime.into()))
    } else {
        (None, None)
    };
    Ok(CostReport {
        n,
        per_primitive,
        window_plan: WindowPlanReport {
            m: plan.m,
            window_count: plan.window_count,
            total_model: plan.cnot_total,
            total_measured,
        },
        totals,
        runtime,
    })
}

#[derive(Debug, Serialize)]
pub struct WindowRow {
    pub m: u64,
    pub total: u128,
}

#[derive(Debug, Serialize)]
pub struct OptimizeReport {
    pub n: u64,
    pub m: u64,
    pub window_count: u64,
    pub cnot_total: u128,
    pub candidates: Vec<WindowRow>,
}

pub fn optimize_report(n: u64) -> Result<OptimizeReport, Error> {
    let plan = cost::optimal_window(n)?;
    let candidates = (1..=2 * n)
        .map_while(|m| {
            cost::modexp_cnot_count(n, m)
                .ok()
                .filter(|&total| total <= u128::from(u64::MAX))
                .map(|total| WindowRow { m, total })
        })
        .collect();
    Ok(OptimizeReport {
        n,
        m: plan.m,
        window_count: plan.window_count,
        cnot_total: plan.cnot_total,
        candidates,
    })
}

#[derive(Debug, Serialize)]
pub struct FitPointReport {
    pub n: u64,
    pub x: f64,
    pub y: f64,
    pub residual: f64,
}

impl From<FitPoint> for FitPointReport {
    fn from(p: FitPoint) -> Self {
        Self {
            n: p.n,
            x: p.x,
            y: p.y,
            residual: p.residual,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct FitReport {
    pub coefficient: f64,
    pub reference: f64,
    pub relative_difference: f64,
    pub points: Vec<FitPointReport>,
}

pub fn fit_report(n_values: &[u64]) -> Result<FitReport, Error> {
    let fit = cost::fit_leading_coefficient(n_values)?;
    Ok(FitReport {
        coefficient: fit.coefficient,
        reference: cost::FIT_COEFFICIENT,
        relative_difference: fit.coefficient / cost::FIT_COEFFICIENT - 1.0,
        points: fit.points.into_iter().map(Into::into).collect(),
    })
}

#[derive(Debug, Serialize)]
pub struct EstimateReport {
    pub n: u64,
    #[serde(flatten)]
    pub runtime: RuntimeReport,
    pub lower_bound_cnots: u128,
}

#[derive(Debug, Serialize)]
pub struct CounterexampleReport {
    pub inputs: BTreeMap<String, u64>,
    pub register: String,
    pub expected: u64,
    pub actual: u64,
}

impl From<Counterexample> for CounterexampleReport {
    fn from(c: Counterexample) -> Self {
        Self {
            inputs: c.inputs.into_iter().collect(),
            register: c.register,
            expected: c.expected,
            actual: c.actual,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct VerifyOutput {
    pub circuit: String,
    pub n: usize,
    pub modulus: Option<u64>,
    pub exhaustive: bool,
    pub points: u64,
    pub passed: bool,
    pub failure: Option<CounterexampleReport>,
}

impl VerifyOutput {
    pub fn new(spec: &CircuitSpec, exhaustive: bool, r: VerifyReport) -> Self {
        Self {
            circuit: spec.kind.to_string(),
            n: spec.n,
            modulus: spec.modulus,
            exhaustive,
            points: r.points,
            passed: r.failure.is_none(),
            failure: r.failure.map(Into::into),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct AttemptReport {
    pub a: u64,
    pub common_factor: Option<u64>,
    pub evaluation: Option<&'static str>,
    pub samples: Vec<u64>,
    pub recovered_order: Option<u64>,
    pub factors: Option<(u64, u64)>,
}

fn evaluation_name(e: Evaluation) -> &'static str {
    match e {
        Evaluation::Circuit { .. } => "circuit",
        Evaluation::Classical => "classical",
    }
}

impl From<&Attempt> for AttemptReport {
    fn from(a: &Attempt) -> Self {
        Self {
            a: a.base,
            common_factor: a.common_factor,
            evaluation: a.run.as_ref().map(|r| evaluation_name(r.evaluation)),
            samples: a.run.as_ref().map_or_else(Vec::new, |r| r.samples.clone()),
            recovered_order: a.run.as_ref().and_then(|r| r.recovered_order),
            factors: a.factors,
        }
    }
}

/// Run record of a factoring session; the top-level fields describe the
/// last attempt.
#[derive(Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub struct FactorReport {
    #[serde(rename = "N")]
    pub modulus: u64,
    pub a: Option<u64>,
    pub n: usize,
    pub distribution_support: Vec<u64>,
    pub samples: Vec<u64>,
    pub recovered_order: Option<u64>,
    pub factors: Option<(u64, u64)>,
    pub attempts: Vec<AttemptReport>,
    pub circuit_attempts: usize,
}

impl From<&FactorOutcome> for FactorReport {
    fn from(o: &FactorOutcome) -> Self {
        let last = o.attempts.last();
        let run = last.and_then(|a| a.run.as_ref());
        Self {
            modulus: o.modulus,
            a: last.map(|a| a.base),
            n: shorcnot_core::numtheory::bit_length(o.modulus),
            distribution_support: run.map_or_else(Vec::new, |r| r.support(1e-12)),
            samples: run.map_or_else(Vec::new, |r| r.samples.clone()),
            recovered_order: run.and_then(|r| r.recovered_order),
            factors: o.factors,
            attempts: o.attempts.iter().map(Into::into).collect(),
            circuit_attempts: o
                .attempts
                .iter()
                .filter(|a| {
                    matches!(
                        a.run.as_ref().map(|r| r.evaluation),
                        Some(Evaluation::Circuit { .. })
                    )
                })
                .count(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn representatives() {
        assert_eq!(representative_modulus(4), 13);
        assert_eq!(representative_modulus(2), 3);
        assert_eq!(representative_modulus(8), 251);
        assert_eq!(representative_base(15), 2);
        assert_eq!(representative_base(9), 2);
    }

    #[test]
    fn cost_report_n4() {
        let r = cost_report(4, cost::DEFAULT_T_CNOT, 1.0).unwrap();
        assert_eq!(r.per_primitive["mod-add"].model, 260);
        assert_eq!(r.per_primitive["mod-add"].measured, Some(260));
        assert_eq!(r.per_primitive["qft-2n"].measured, None);
        assert_eq!(r.window_plan.total_model, 3484);
        assert!(r.window_plan.total_measured.is_some());
        let v = serde_json::to_value(&r).unwrap();
        assert!(v["runtime"]["seconds"].is_number());
    }
}
