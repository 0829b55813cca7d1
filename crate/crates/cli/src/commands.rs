use std::time::Instant;

use anyhow::{Context, Result};
use rac_core::classical::{classical_optimum, classical_value, WORK_CAP};
use rac_core::concat::{concat_success, extract_outcome_distribution};
use rac_core::earac::{
    bell_rac_value, earac_23_success, explicit_23_closed_form, explicit_23_instance, explicit_23_strategy,
    probability_table, BellRacInstance,
};
use rac_core::error::Error;
use rac_core::io::{parse_protocol, parse_report, parse_strategy, ProtocolJson, ReportValue, RunReport, StrategyJson, Witness};
use rac_core::qcrac::{optimize_protocol, mub_qcrac_protocol, qcrac_analytic, sequential_success};
use rac_core::reference::{self, CLASSICAL_4_3};
use rac_core::scenario::Scenario;
use rac_core::seesaw::{seesaw, SeesawConfig};

/// Value realized by the attached witness; `audit` recomputes it.
pub const WITNESS_VALUE: &str = "witness_value";

/// Largest disagreement `audit` tolerates between a report and its witness.
pub const AUDIT_TOLERANCE: f64 = 1e-10;

const QCRAC_SWEEPS: usize = 200;
const QCRAC_FLOOR: f64 = 1e-10;

fn timed(mut report: RunReport, start: Instant) -> RunReport {
    report.timing_seconds = start.elapsed().as_secs_f64();
    report
}

fn add_references(report: &mut RunReport, n: usize, d: usize) {
    if let Some(row) = reference::row(n, d) {
        report.insert("reference_classical", ReportValue::reference(row.classical));
        report.insert("reference_qcrac", ReportValue::reference(row.qcrac));
        report.insert("reference_earac_numerical", ReportValue::reference(row.earac_numerical));
        report.insert("reference_earac_upper", ReportValue::reference(row.earac_upper));
    }
}

fn ratio_value(r: &rac_core::classical::Rational) -> ReportValue {
    ReportValue::exact(*r.numer(), *r.denom())
}

pub fn earac_explicit(seed: u64) -> Result<RunReport> {
    let start = Instant::now();
    let inst = explicit_23_instance();
    let s = explicit_23_strategy();
    let value = earac_23_success()?;
    let mut r = RunReport::new("earac-explicit", inst.scenario, seed);
    r.insert("earac", ReportValue::computed(value));
    r.insert("earac_closed_form", ReportValue::computed(explicit_23_closed_form()));
    r.insert(WITNESS_VALUE, ReportValue::computed(value));
    r.insert("classical", ReportValue::exact(2, 3));
    r.witness = Some(Witness::Bipartite(StrategyJson::from_strategy(&inst, &s)));
    Ok(timed(r, start))
}

pub fn qcrac(n: usize, d: usize, restarts: usize, seed: u64) -> Result<RunReport> {
    let start = Instant::now();
    let sc = Scenario::new(n, d)?;
    let mut r = RunReport::new("qcrac", sc, seed);
    if n == 2 {
        let p = mub_qcrac_protocol(d)?;
        let v = sequential_success(&p)?;
        r.insert("qcrac_analytic", ReportValue::computed(qcrac_analytic(d)));
        r.insert("qcrac_protocol", ReportValue::computed(v));
        r.insert(WITNESS_VALUE, ReportValue::computed(v));
        r.witness = Some(Witness::Protocol(ProtocolJson::from_protocol(&p)));
    } else {
        let search = optimize_protocol(sc, restarts, QCRAC_SWEEPS, QCRAC_FLOOR, seed)?;
        r.insert("qcrac_seesaw", ReportValue::computed(search.value));
        r.insert(WITNESS_VALUE, ReportValue::computed(sequential_success(&search.protocol)?));
        r.witness = Some(Witness::Protocol(ProtocolJson::from_protocol(&search.protocol)));
    }
    add_references(&mut r, n, d);
    Ok(timed(r, start))
}

pub fn classical(n: usize, d: usize, seed: u64) -> Result<RunReport> {
    let start = Instant::now();
    let sc = Scenario::new(n, d)?;
    let opt = classical_optimum(sc)?;
    let mut r = RunReport::new("classical", sc, seed);
    r.insert("classical", ratio_value(&opt.value));
    r.insert(WITNESS_VALUE, ratio_value(&opt.value));
    r.witness = Some(Witness::Classical {
        scenario: sc.into(),
        strategy: opt.witness,
    });
    add_references(&mut r, n, d);
    Ok(timed(r, start))
}

pub fn seesaw_cmd(n: usize, d: usize, restarts: Option<usize>, seed: u64) -> Result<RunReport> {
    let start = Instant::now();
    let sc = Scenario::new(n, d)?;
    let inst = BellRacInstance::new(sc);
    let mut cfg = SeesawConfig::new(sc, seed);
    if let Some(k) = restarts {
        cfg.restarts = k;
    }
    let res = seesaw(&inst, &cfg)?;
    let mut r = RunReport::new("seesaw", sc, seed);
    r.insert("earac_seesaw", ReportValue::computed(res.best_value));
    r.insert(WITNESS_VALUE, ReportValue::computed(res.best_value));
    r.witness = Some(Witness::Bipartite(StrategyJson::from_strategy(&inst, &res.strategy)));
    add_references(&mut r, n, d);
    Ok(timed(r, start))
}

pub fn concat(seed: u64) -> Result<RunReport> {
    let start = Instant::now();
    let inst = explicit_23_instance();
    let dist = extract_outcome_distribution(&explicit_23_strategy(), &inst)?;
    let four = Scenario::new(4, 3)?;
    let mut r = RunReport::new("concat", four, seed);
    for (k, p) in dist.probs().iter().enumerate() {
        r.insert(&format!("displacement_{k}"), ReportValue::computed(*p));
    }
    let value = concat_success(&dist, &dist)?;
    r.insert("earac_concatenated", ReportValue::computed(value));
    let (num, den) = CLASSICAL_4_3;
    r.insert("reference_classical", ReportValue::reference(num as f64 / den as f64));
    match classical_optimum(four) {
        Ok(opt) => r.insert("classical", ratio_value(&opt.value)),
        Err(e) if e.is_too_large() => {}
        Err(e) => return Err(e.into()),
    }
    let bound = num as f64 / den as f64;
    let relation = if value > bound { ">" } else { "<=" };
    r.notes.insert(
        "comparison".into(),
        format!("concatenated {value:.6} {relation} classical {bound:.6} ({num}/{den})"),
    );
    Ok(timed(r, start))
}

/// One report per benchmark scenario. Failures of one engine are recorded
/// in that row and do not abort the others.
pub fn table1(restarts: Option<usize>, seed: u64) -> Result<Vec<RunReport>> {
    reference::TABLE
        .iter()
        .map(|row| {
            let start = Instant::now();
            let sc = Scenario::new(row.n, row.d)?;
            let mut r = RunReport::new("table1", sc, seed);
            match classical_optimum(sc) {
                Ok(opt) => r.insert("classical", ratio_value(&opt.value)),
                Err(e) => note_error(&mut r, "classical", &e),
            }
            if row.n == 2 {
                r.insert("qcrac_analytic", ReportValue::computed(qcrac_analytic(row.d)));
                match mub_qcrac_protocol(row.d).and_then(|p| sequential_success(&p)) {
                    Ok(v) => r.insert("qcrac_protocol", ReportValue::computed(v)),
                    Err(e) => note_error(&mut r, "qcrac_protocol", &e),
                }
            } else {
                match optimize_protocol(sc, restarts.unwrap_or(20), QCRAC_SWEEPS, QCRAC_FLOOR, seed) {
                    Ok(s) => r.insert("qcrac_seesaw", ReportValue::computed(s.value)),
                    Err(e) => note_error(&mut r, "qcrac_seesaw", &e),
                }
            }
            let mut cfg = SeesawConfig::new(sc, seed);
            if let Some(k) = restarts {
                cfg.restarts = k;
            }
            match seesaw(&BellRacInstance::new(sc), &cfg) {
                Ok(res) => r.insert("earac_seesaw", ReportValue::computed(res.best_value)),
                Err(e) => note_error(&mut r, "earac_seesaw", &e),
            }
            add_references(&mut r, row.n, row.d);
            Ok(timed(r, start))
        })
        .collect()
}

fn note_error(r: &mut RunReport, name: &str, e: &Error) {
    let reason = if e.is_too_large() {
        format!("refused: work estimate over {WORK_CAP}")
    } else {
        format!("failed: {e}")
    };
    r.notes.insert(name.to_owned(), reason);
}

/// Recomputes a report's witness value, or validates a bare strategy or
/// protocol file and reports the value it realizes.
pub fn audit(input: &str, seed: u64) -> Result<RunReport> {
    let start = Instant::now();
    let looks_like_report = serde_json::from_str::<serde_json::Value>(input)
        .ok()
        .and_then(|v| v.get("command").cloned())
        .is_some();
    if looks_like_report {
        let report = parse_report(input)?;
        let witness = report
            .witness
            .as_ref()
            .context("report carries no witness to audit")?;
        let recomputed = witness_value(witness)?;
        let claimed = report
            .values
            .get(WITNESS_VALUE)
            .context("report has no witness_value entry")?
            .value()?;
        let sc = report.scenario.to_scenario()?;
        let mut r = RunReport::new("audit", sc, seed);
        r.insert("claimed", ReportValue::computed(claimed));
        r.insert("recomputed", ReportValue::computed(recomputed));
        let gap = (claimed - recomputed).abs();
        r.insert("discrepancy", ReportValue::computed(gap));
        // The decimal field carries 12 significant digits.
        if gap > AUDIT_TOLERANCE.max(claimed.abs() * 1e-11) {
            return Err(Error::Consistency(format!(
                "witness realizes {recomputed}, report claims {claimed}"
            ))
            .into());
        }
        return Ok(timed(r, start));
    }
    if let Ok((inst, s)) = parse_strategy(input) {
        let v = bell_rac_value(&inst, &probability_table(&inst, &s)?)?;
        let mut r = RunReport::new("audit", inst.scenario, seed);
        r.insert("recomputed", ReportValue::computed(v));
        return Ok(timed(r, start));
    }
    let p = parse_protocol(input).context("input is not a report, strategy or protocol")?;
    let mut r = RunReport::new("audit", p.scenario, seed);
    r.insert("recomputed", ReportValue::computed(sequential_success(&p)?));
    Ok(timed(r, start))
}

fn witness_value(w: &Witness) -> Result<f64> {
    Ok(match w {
        Witness::Bipartite(s) => {
            let (inst, s) = s.to_strategy()?;
            bell_rac_value(&inst, &probability_table(&inst, &s)?)?
        }
        Witness::Protocol(p) => sequential_success(&p.to_protocol()?)?,
        Witness::Classical { scenario, strategy } => {
            let v = classical_value(strategy, scenario.to_scenario()?)?;
            *v.numer() as f64 / *v.denom() as f64
        }
    })
}
