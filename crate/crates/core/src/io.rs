//! JSON import and export for strategies, protocols and run reports.
//!
//! Complex numbers are `[re, im]` pairs and matrices are arrays of rows.
//! Every parser validates fully and reports malformed input as
//! [`Error::Parse`] or a contract violation; none of them panic.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::classical::ClassicalStrategy;
use crate::earac::{BellRacInstance, BipartiteStrategy};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, Ket};
use crate::measurement::{MeasurementFamily, Povm};
use crate::qcrac::PrepareAndMeasureProtocol;
use crate::scenario::Scenario;
use crate::tolerance;

/// Largest input accepted by the parsers, in bytes.
pub const MAX_INPUT_BYTES: usize = 16 << 20;

pub type ComplexJson = [f64; 2];
pub type MatrixJson = Vec<Vec<ComplexJson>>;
/// One POVM per setting, one matrix per outcome.
pub type FamilyJson = Vec<Vec<MatrixJson>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioJson {
    pub n: usize,
    pub d: usize,
}

impl From<Scenario> for ScenarioJson {
    fn from(s: Scenario) -> Self {
        Self { n: s.n, d: s.d }
    }
}

impl ScenarioJson {
    pub fn to_scenario(self) -> Result<Scenario> {
        Scenario::new(self.n, self.d)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyJson {
    pub scenario: ScenarioJson,
    pub dim_a: usize,
    pub dim_b: usize,
    pub state: Vec<ComplexJson>,
    pub alice: FamilyJson,
    pub bob: FamilyJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolJson {
    pub scenario: ScenarioJson,
    pub preparations: Vec<Vec<ComplexJson>>,
    pub measurements: FamilyJson,
}

fn complex_to_json(z: Complex64) -> ComplexJson {
    [z.re, z.im]
}

fn matrix_to_json(m: &ComplexMatrix) -> MatrixJson {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| complex_to_json(m[(i, j)])).collect())
        .collect()
}

fn family_to_json(f: &MeasurementFamily) -> FamilyJson {
    f.povms()
        .iter()
        .map(|p| p.elements().iter().map(matrix_to_json).collect())
        .collect()
}

fn ket_to_json(k: &Ket) -> Vec<ComplexJson> {
    k.amplitudes().iter().copied().map(complex_to_json).collect()
}

fn complex_from_json(z: ComplexJson, what: &str) -> Result<Complex64> {
    if !z[0].is_finite() || !z[1].is_finite() {
        return Err(Error::Parse(format!("{what}: non-finite entry")));
    }
    Ok(Complex64::new(z[0], z[1]))
}

fn ket_from_json(v: &[ComplexJson], what: &str) -> Result<Ket> {
    let amps = v
        .iter()
        .map(|&z| complex_from_json(z, what))
        .collect::<Result<Vec<_>>>()?;
    Ok(Ket::new(amps))
}

fn matrix_from_json(m: &MatrixJson, dim: usize, what: &str) -> Result<ComplexMatrix> {
    if m.len() != dim || m.iter().any(|row| row.len() != dim) {
        return Err(Error::Parse(format!("{what}: expected a {dim}x{dim} matrix")));
    }
    let data = m
        .iter()
        .flatten()
        .map(|&z| complex_from_json(z, what))
        .collect::<Result<Vec<_>>>()?;
    ComplexMatrix::from_vec(dim, dim, data)
}

fn family_from_json(f: &FamilyJson, settings: usize, outcomes: usize, dim: usize, who: &str) -> Result<MeasurementFamily> {
    if f.len() != settings {
        return Err(Error::Parse(format!(
            "{who}: expected {settings} settings, got {}",
            f.len()
        )));
    }
    let povms = f
        .iter()
        .enumerate()
        .map(|(s, elements)| {
            if elements.len() != outcomes {
                return Err(Error::Parse(format!(
                    "{who} setting {s}: expected {outcomes} outcomes, got {}",
                    elements.len()
                )));
            }
            let mats = elements
                .iter()
                .enumerate()
                .map(|(a, m)| matrix_from_json(m, dim, &format!("{who} setting {s} outcome {a}")))
                .collect::<Result<Vec<_>>>()?;
            Ok(Povm::new(mats))
        })
        .collect::<Result<Vec<_>>>()?;
    let family = MeasurementFamily::new(povms);
    family.validate_shape(settings, outcomes, dim)?;
    Ok(family)
}

fn check_size(input: &str) -> Result<()> {
    if input.len() > MAX_INPUT_BYTES {
        return Err(Error::Parse(format!(
            "input of {} bytes exceeds {MAX_INPUT_BYTES}",
            input.len()
        )));
    }
    Ok(())
}

fn check_local_dim(dim: usize, what: &str) -> Result<()> {
    if dim == 0 || dim > tolerance::MAX_EIG_DIM {
        return Err(Error::Parse(format!("{what} dimension {dim} out of range")));
    }
    Ok(())
}

impl StrategyJson {
    pub fn from_strategy(inst: &BellRacInstance, s: &BipartiteStrategy) -> Self {
        Self {
            scenario: inst.scenario.into(),
            dim_a: s.dim_a,
            dim_b: s.dim_b,
            state: ket_to_json(&s.state),
            alice: family_to_json(&s.alice),
            bob: family_to_json(&s.bob),
        }
    }

    pub fn to_strategy(&self) -> Result<(BellRacInstance, BipartiteStrategy)> {
        let inst = BellRacInstance::new(self.scenario.to_scenario()?);
        check_local_dim(self.dim_a, "Alice")?;
        check_local_dim(self.dim_b, "Bob")?;
        if self.dim_a * self.dim_b > tolerance::MAX_EIG_DIM || self.state.len() != self.dim_a * self.dim_b {
            return Err(Error::Parse(format!(
                "state of length {} does not fit local dimensions {}x{}",
                self.state.len(),
                self.dim_a,
                self.dim_b
            )));
        }
        let d = inst.outcomes();
        let s = BipartiteStrategy {
            state: ket_from_json(&self.state, "state")?,
            dim_a: self.dim_a,
            dim_b: self.dim_b,
            alice: family_from_json(&self.alice, inst.alice_settings(), d, self.dim_a, "Alice")?,
            bob: family_from_json(&self.bob, inst.bob_settings(), d, self.dim_b, "Bob")?,
        };
        s.validate(&inst)?;
        Ok((inst, s))
    }
}

impl ProtocolJson {
    pub fn from_protocol(p: &PrepareAndMeasureProtocol) -> Self {
        Self {
            scenario: p.scenario.into(),
            preparations: p.preparations.iter().map(ket_to_json).collect(),
            measurements: family_to_json(&p.measurements),
        }
    }

    pub fn to_protocol(&self) -> Result<PrepareAndMeasureProtocol> {
        let scenario = self.scenario.to_scenario()?;
        let d = scenario.d;
        check_local_dim(d, "message")?;
        if self.preparations.len() != scenario.strings() {
            return Err(Error::Parse(format!(
                "expected {} preparations, got {}",
                scenario.strings(),
                self.preparations.len()
            )));
        }
        let preparations = self
            .preparations
            .iter()
            .enumerate()
            .map(|(i, v)| ket_from_json(v, &format!("preparation {i}")))
            .collect::<Result<Vec<_>>>()?;
        let p = PrepareAndMeasureProtocol {
            scenario,
            preparations,
            measurements: family_from_json(&self.measurements, scenario.n, d, d, "measurement")?,
        };
        p.validate()?;
        Ok(p)
    }
}

fn from_json<T: for<'de> Deserialize<'de>>(input: &str) -> Result<T> {
    check_size(input)?;
    serde_json::from_str(input).map_err(|e| Error::Parse(e.to_string()))
}

pub fn parse_strategy(input: &str) -> Result<(BellRacInstance, BipartiteStrategy)> {
    from_json::<StrategyJson>(input)?.to_strategy()
}

pub fn strategy_to_json(inst: &BellRacInstance, s: &BipartiteStrategy) -> String {
    serde_json::to_string_pretty(&StrategyJson::from_strategy(inst, s)).expect("plain data serializes")
}

pub fn parse_protocol(input: &str) -> Result<PrepareAndMeasureProtocol> {
    from_json::<ProtocolJson>(input)?.to_protocol()
}

pub fn protocol_to_json(p: &PrepareAndMeasureProtocol) -> String {
    serde_json::to_string_pretty(&ProtocolJson::from_protocol(p)).expect("plain data serializes")
}

/// Whether a reported number came out of this code or is a published figure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValueKind {
    Computed,
    Reference,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportValue {
    /// 12 significant digits.
    pub decimal: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
    pub kind: ValueKind,
}

impl ReportValue {
    pub fn computed(v: f64) -> Self {
        Self {
            decimal: format_decimal(v),
            exact: None,
            kind: ValueKind::Computed,
        }
    }

    pub fn exact(numer: u64, denom: u64) -> Self {
        Self {
            decimal: format_decimal(numer as f64 / denom as f64),
            exact: Some(format!("{numer}/{denom}")),
            kind: ValueKind::Computed,
        }
    }

    pub fn reference(v: f64) -> Self {
        Self {
            decimal: format_decimal(v),
            exact: None,
            kind: ValueKind::Reference,
        }
    }

    pub fn value(&self) -> Result<f64> {
        let v: f64 = self
            .decimal
            .parse()
            .map_err(|_| Error::Parse(format!("bad decimal {:?}", self.decimal)))?;
        if !v.is_finite() {
            return Err(Error::Parse(format!("non-finite decimal {:?}", self.decimal)));
        }
        Ok(v)
    }
}

/// `v` with 12 significant digits in plain notation.
pub fn format_decimal(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (11 - magnitude).clamp(0, 40) as usize;
    format!("{v:.decimals$}")
}

/// Witness attached to a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Bipartite(StrategyJson),
    Protocol(ProtocolJson),
    Classical {
        scenario: ScenarioJson,
        strategy: ClassicalStrategy,
    },
}

impl Witness {
    pub fn validate(&self) -> Result<()> {
        match self {
            Witness::Bipartite(s) => s.to_strategy().map(|_| ()),
            Witness::Protocol(p) => p.to_protocol().map(|_| ()),
            Witness::Classical { scenario, strategy } => strategy.validate(scenario.to_scenario()?),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunReport {
    pub command: String,
    pub scenario: ScenarioJson,
    pub values: BTreeMap<String, ReportValue>,
    /// Free-text remarks: refused or failed engines, comparisons.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub notes: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub seed: u64,
    pub version: String,
    pub timing_seconds: f64,
}

impl RunReport {
    pub fn new(command: &str, scenario: Scenario, seed: u64) -> Self {
        Self {
            command: command.to_owned(),
            scenario: scenario.into(),
            values: BTreeMap::new(),
            notes: BTreeMap::new(),
            witness: None,
            seed,
            version: env!("CARGO_PKG_VERSION").to_owned(),
            timing_seconds: 0.0,
        }
    }

    pub fn insert(&mut self, name: &str, value: ReportValue) {
        self.values.insert(name.to_owned(), value);
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario.to_scenario()?;
        for v in self.values.values() {
            v.value()?;
        }
        if !self.timing_seconds.is_finite() || self.timing_seconds < 0.0 {
            return Err(Error::Parse("timing must be a non-negative number".into()));
        }
        if let Some(w) = &self.witness {
            w.validate()?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

pub fn parse_report(input: &str) -> Result<RunReport> {
    let r: RunReport = from_json(input)?;
    r.validate()?;
    Ok(r)
}
