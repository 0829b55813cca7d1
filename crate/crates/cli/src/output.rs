use std::fmt::Write as _;

use rac_core::io::{RunReport, ValueKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

pub fn render(reports: &[RunReport], format: Format, as_list: bool) -> String {
    match format {
        Format::Json if as_list => {
            let mut s = serde_json::to_string_pretty(reports).expect("plain data serializes");
            s.push('\n');
            s
        }
        Format::Json => reports
            .iter()
            .map(|r| r.to_json() + "\n")
            .collect(),
        Format::Csv if reports.iter().all(|r| r.command == "table1") => table_csv(reports),
        Format::Csv => values_csv(reports),
        Format::Pretty => pretty(reports),
    }
}

fn four(r: &RunReport, name: &str) -> String {
    r.values
        .get(name)
        .and_then(|v| v.value().ok())
        .map(|v| format!("{v:.4}"))
        .unwrap_or_default()
}

/// Table layout: one row per scenario, four-decimal columns.
fn table_csv(reports: &[RunReport]) -> String {
    let mut out = String::from("n,d,p_C,p_C_exact,p_Q,p_E_seesaw,p_E_num_reference,p_E_Q1ab_reference\n");
    for r in reports {
        let exact = r
            .values
            .get("classical")
            .and_then(|v| v.exact.clone())
            .unwrap_or_default();
        let pq = if r.values.contains_key("qcrac_protocol") {
            four(r, "qcrac_protocol")
        } else {
            four(r, "qcrac_seesaw")
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.scenario.n,
            r.scenario.d,
            four(r, "classical"),
            exact,
            pq,
            four(r, "earac_seesaw"),
            four(r, "reference_earac_numerical"),
            four(r, "reference_earac_upper"),
        );
    }
    out
}

fn values_csv(reports: &[RunReport]) -> String {
    let mut out = String::from("command,n,d,name,decimal,exact,kind\n");
    for r in reports {
        for (name, v) in &r.values {
            let kind = match v.kind {
                ValueKind::Computed => "computed",
                ValueKind::Reference => "reference",
            };
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.command,
                r.scenario.n,
                r.scenario.d,
                name,
                v.decimal,
                v.exact.as_deref().unwrap_or(""),
                kind
            );
        }
    }
    out
}

fn pretty(reports: &[RunReport]) -> String {
    let mut out = String::new();
    for r in reports {
        let _ = writeln!(
            out,
            "{} ({}, {})  seed {}  {:.2}s",
            r.command, r.scenario.n, r.scenario.d, r.seed, r.timing_seconds
        );
        for (name, v) in &r.values {
            let exact = v.exact.as_deref().map(|e| format!(" = {e}")).unwrap_or_default();
            let tag = if v.kind == ValueKind::Reference { "  [reference, not computed]" } else { "" };
            let _ = writeln!(out, "  {name:<28} {}{exact}{tag}", v.decimal);
        }
        for (name, note) in &r.notes {
            let _ = writeln!(out, "  {name:<28} {note}");
        }
    }
    out
}
