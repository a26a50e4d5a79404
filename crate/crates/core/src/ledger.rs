//! DFT event accounting.
//!
//! Every transform in the crate reports itself here: one event per DFT of a
//! given order, tagged with the active stage and the series it belongs to.
//! Counts are converted to F(k)-units at report time, where a DFT of order
//! `q*k` contributes `q` units. One F(m)-unit is `m/k` F(k)-units, and an
//! M-unit is six F-units.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::block::BlockPlan;

/// Stage tag used when nothing more specific has been set.
pub const DEFAULT_STAGE: &str = "untagged";

/// Stage tags emitted by the fast algorithms, with their expected main-term
/// cost in F(m)-units. Bootstrap stages have no expected value.
pub const EXPECTED_STAGES: &[(&str, Option<f64>)] = &[
    ("bootstrap.E(n)", None),
    ("bootstrap.I(n)", None),
    ("exp.stage1", Some(13.0)),
    ("exp.log", Some(6.0)),
    ("exp.final", Some(4.0)),
    ("pow.s.first", Some(10.5)),
    ("pow.s.second", Some(10.0)),
    ("pow.f.first", Some(10.0)),
    ("pow.log", Some(6.0)),
    ("pow.final", Some(4.0)),
];

/// Label given to the inverse transform that restores the boundary block
/// `u_{-1}` in a triple middle product. It is a full-size inverse here, but a
/// half-size one would do, so reports show both readings.
pub const THETA_INVERSE: &str = "theta-inverse";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DftEvent {
    pub order: usize,
    pub stage: &'static str,
    pub label: &'static str,
}

/// Scalar arithmetic counters. These are kept apart from DFT units.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ScalarOps {
    pub add: u64,
    pub mul: u64,
    pub const_mul: u64,
}

impl ScalarOps {
    fn merge(&mut self, other: &ScalarOps) {
        self.add += other.add;
        self.mul += other.mul;
        self.const_mul += other.const_mul;
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostLedger {
    events: Vec<DftEvent>,
    scalar: BTreeMap<&'static str, ScalarOps>,
    stage: &'static str,
}

impl Default for CostLedger {
    fn default() -> Self {
        Self::new()
    }
}

/// F(k)-units contributed by one DFT of the given order.
pub fn units_of(order: usize, k: usize) -> f64 {
    order as f64 / k as f64
}

impl CostLedger {
    pub fn new() -> Self {
        CostLedger { events: Vec::new(), scalar: BTreeMap::new(), stage: DEFAULT_STAGE }
    }

    /// Sets the stage that subsequent events are attributed to and returns
    /// the previous one.
    pub fn set_stage(&mut self, stage: &'static str) -> &'static str {
        std::mem::replace(&mut self.stage, stage)
    }

    pub fn stage(&self) -> &'static str {
        self.stage
    }

    pub fn record_dft(&mut self, order: usize, stage: &'static str, label: &'static str) {
        self.events.push(DftEvent { order, stage, label });
    }

    /// Records a DFT event in the current stage.
    pub fn record(&mut self, order: usize, label: &'static str) {
        self.record_dft(order, self.stage, label);
    }

    pub fn count_add(&mut self, n: usize) {
        self.scalar.entry(self.stage).or_default().add += n as u64;
    }

    pub fn count_mul(&mut self, n: usize) {
        self.scalar.entry(self.stage).or_default().mul += n as u64;
    }

    pub fn count_const_mul(&mut self, n: usize) {
        self.scalar.entry(self.stage).or_default().const_mul += n as u64;
    }

    pub fn events(&self) -> &[DftEvent] {
        &self.events
    }

    pub fn dft_count(&self) -> usize {
        self.events.len()
    }

    pub fn scalar_ops(&self, stage: &str) -> ScalarOps {
        self.scalar.get(stage).copied().unwrap_or_default()
    }

    pub fn total_scalar_ops(&self) -> ScalarOps {
        let mut total = ScalarOps::default();
        for ops in self.scalar.values() {
            total.merge(ops);
        }
        total
    }

    /// Total F(k)-units over all events.
    pub fn units(&self, k: usize) -> f64 {
        self.events.iter().map(|e| units_of(e.order, k)).sum()
    }

    pub fn stage_units(&self, stage: &str, k: usize) -> f64 {
        self.events.iter().filter(|e| e.stage == stage).map(|e| units_of(e.order, k)).sum()
    }

    pub fn label_units(&self, stage: &str, label: &str, k: usize) -> f64 {
        self.events
            .iter()
            .filter(|e| e.stage == stage && e.label == label)
            .map(|e| units_of(e.order, k))
            .sum()
    }

    /// Number of events of the given order.
    pub fn order_count(&self, order: usize) -> usize {
        self.events.iter().filter(|e| e.order == order).count()
    }

    /// Stages in first-appearance order.
    pub fn stages(&self) -> Vec<&'static str> {
        let mut seen = Vec::new();
        for e in &self.events {
            if !seen.contains(&e.stage) {
                seen.push(e.stage);
            }
        }
        seen
    }

    /// Labels seen within a stage, in first-appearance order.
    pub fn labels(&self, stage: &str) -> Vec<&'static str> {
        let mut seen = Vec::new();
        for e in self.events.iter().filter(|e| e.stage == stage) {
            if !seen.contains(&e.label) {
                seen.push(e.label);
            }
        }
        seen
    }

    /// Appends another ledger's events and counters. Unit totals do not
    /// depend on merge order.
    pub fn merge(&mut self, other: &CostLedger) {
        self.events.extend(other.events.iter().cloned());
        for (stage, ops) in &other.scalar {
            self.scalar.entry(stage).or_default().merge(ops);
        }
    }
}

/// One row of a budget report.
#[derive(Clone, Debug, PartialEq)]
pub struct StageBudget {
    pub stage: &'static str,
    /// Expected main-term cost in F(m)-units, if the stage has one.
    pub expected: Option<f64>,
    /// Measured F(k)-units.
    pub units: f64,
    /// Measured units divided by `m/k`, i.e. in F(m)-units.
    pub per_fm: f64,
    /// As `per_fm`, counting each theta-inverse as a 2k-point transform.
    pub per_fm_theta2k: f64,
    pub scalar: ScalarOps,
    /// Sub-counters by series label, in F(m)-units.
    pub labels: Vec<(&'static str, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BudgetReport {
    pub k: usize,
    pub m: usize,
    pub n: usize,
    pub rows: Vec<StageBudget>,
}

/// Builds the per-stage table for a completed run. Known stages always get a
/// row, so an empty ledger yields an all-zero table.
pub fn report(ledger: &CostLedger, plan: &BlockPlan) -> BudgetReport {
    let k = plan.k;
    let ratio = plan.m as f64 / k as f64;
    let mut stages: Vec<(&'static str, Option<f64>)> = EXPECTED_STAGES.to_vec();
    for s in ledger.stages() {
        if !stages.iter().any(|(t, _)| *t == s) {
            stages.push((s, None));
        }
    }
    let rows = stages
        .into_iter()
        .map(|(stage, expected)| {
            let units = ledger.stage_units(stage, k);
            let theta = ledger.label_units(stage, THETA_INVERSE, k);
            let labels = ledger
                .labels(stage)
                .into_iter()
                .map(|l| (l, ledger.label_units(stage, l, k) / ratio))
                .collect();
            StageBudget {
                stage,
                expected,
                units,
                per_fm: units / ratio,
                per_fm_theta2k: (units - theta / 3.0) / ratio,
                scalar: ledger.scalar_ops(stage),
                labels,
            }
        })
        .collect();
    BudgetReport { k, m: plan.m, n: plan.n, rows }
}

impl BudgetReport {
    pub fn row(&self, stage: &str) -> Option<&StageBudget> {
        self.rows.iter().find(|r| r.stage == stage)
    }

    /// Sum of `per_fm` over the stages whose tag starts with `prefix`.
    pub fn total_per_fm(&self, prefix: &str) -> f64 {
        self.rows.iter().filter(|r| r.stage.starts_with(prefix)).map(|r| r.per_fm).sum()
    }

    /// Sum of the expected constants over the stages whose tag starts with
    /// `prefix`.
    pub fn total_expected(&self, prefix: &str) -> f64 {
        self.rows
            .iter()
            .filter(|r| r.stage.starts_with(prefix))
            .filter_map(|r| r.expected)
            .sum()
    }

    /// One stage per line: `stage expected units per_fm per_fm_theta2k`,
    /// tab separated, with `-` for a missing expectation.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# k={} n={} m={} m/k={}", self.k, self.n, self.m, self.m / self.k);
        let _ = writeln!(out, "stage\texpected\tunits\tper_fm\tper_fm_theta2k");
        for r in &self.rows {
            let expected = r.expected.map_or("-".to_string(), |e| format!("{e}"));
            let _ = writeln!(
                out,
                "{}\t{}\t{:.3}\t{:.4}\t{:.4}",
                r.stage, expected, r.units, r.per_fm, r.per_fm_theta2k
            );
        }
        out
    }

    /// `key=value` lines. Keys are `plan.k`, `plan.n`, `plan.m`, and for each
    /// stage `<stage>.expected`, `<stage>.units`, `<stage>.per_fm`,
    /// `<stage>.per_fm_theta2k`, `<stage>.scalar.{add,mul,const_mul}` and
    /// `<stage>.label.<label>`.
    pub fn to_key_values(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "plan.k={}", self.k);
        let _ = writeln!(out, "plan.n={}", self.n);
        let _ = writeln!(out, "plan.m={}", self.m);
        for r in &self.rows {
            let s = r.stage;
            if let Some(e) = r.expected {
                let _ = writeln!(out, "{s}.expected={e}");
            }
            let _ = writeln!(out, "{s}.units={}", r.units);
            let _ = writeln!(out, "{s}.per_fm={}", r.per_fm);
            let _ = writeln!(out, "{s}.per_fm_theta2k={}", r.per_fm_theta2k);
            let _ = writeln!(out, "{s}.scalar.add={}", r.scalar.add);
            let _ = writeln!(out, "{s}.scalar.mul={}", r.scalar.mul);
            let _ = writeln!(out, "{s}.scalar.const_mul={}", r.scalar.const_mul);
            for (label, v) in &r.labels {
                let _ = writeln!(out, "{s}.label.{label}={v}");
            }
        }
        out
    }
}
