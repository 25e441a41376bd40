//! Reports and their JSON, markdown and CSV renderings.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::estimator::PhysicalEstimate;
use crate::job::JobSpec;
use crate::units::format_sig;

pub const TOOL: &str = "qre";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub job: JobSpec,
    pub application: String,
    pub estimates: Vec<PhysicalEstimate>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(
        job: JobSpec,
        application: String,
        estimates: Vec<PhysicalEstimate>,
        notes: Vec<String>,
    ) -> Self {
        Report {
            tool: TOOL.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            job,
            application,
            estimates,
            notes,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Md,
    Csv,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(Format::Json),
            "md" | "markdown" => Ok(Format::Md),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown format '{other}' (valid: json, md, csv)")),
        }
    }
}

pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => render_json(report),
        Format::Md => render_md(report),
        Format::Csv => render_csv(&report.estimates),
    }
}

pub fn render_json(report: &Report) -> String {
    let mut out = serde_json::to_string_pretty(report).expect("reports serialize");
    out.push('\n');
    out
}

/// Qubit counts in millions, as in `8.7M` or `0.11M`.
pub fn millions(q: u64) -> String {
    format!("{}M", format_sig(q as f64 / 1e6, 2))
}

pub fn percent(fraction: f64) -> String {
    if fraction == 0.0 {
        return "0%".to_string();
    }
    format!("{}%", format_sig(fraction * 100.0, 2))
}

/// `1.5e5` style with two significant figures.
pub fn sci(x: u64) -> String {
    if x < 1000 {
        return x.to_string();
    }
    let s = format!("{:.1e}", x as f64);
    s.replace(".0e", "e")
}

pub fn render_md(report: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "| application | qubit | Q | C_min | C | M | code | d | F | factory ratio | physical qubits | physical run time |"
    );
    let _ = writeln!(out, "|---|---|---|---|---|---|---|---|---|---|---|---|");
    for e in &report.estimates {
        let r = &e.requirements;
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} | {} | {} | {} | {} | {} | {} | {} | {} |",
            report.application,
            e.qubit,
            r.logical_qubits,
            sci(r.min_logical_steps),
            sci(e.c),
            sci(r.t_states),
            e.code,
            e.d,
            e.f,
            percent(e.factory_fraction),
            millions(e.q),
            e.t.human(2),
        );
    }
    out.push('\n');
    let _ = writeln!(
        out,
        "F counts factories each delivering the T states its final round yields in 99% of runs; \
         other output accounting conventions can shift F by ±1."
    );
    for note in &report.notes {
        let _ = writeln!(out, "\nNote: {note}");
    }
    out
}

const CSV_HEADER: [&str; 16] = [
    "qubit",
    "c_factor",
    "C",
    "code",
    "d",
    "n_d",
    "tau_d_ns",
    "F",
    "n_D",
    "tau_D_ns",
    "M_D",
    "P_T",
    "factory_fraction",
    "q",
    "t_ns",
    "t",
];

pub fn render_csv(estimates: &[PhysicalEstimate]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for e in estimates {
        let (n_factory, tau_factory, m_d, p_t) = match &e.factory {
            Some(f) => (
                f.qubits.to_string(),
                f.duration.as_ns().to_string(),
                f.output_states.to_string(),
                format!("{:e}", f.output_error),
            ),
            None => (String::new(), String::new(), String::new(), String::new()),
        };
        w.write_record([
            e.qubit.clone(),
            e.c_factor.to_string(),
            e.c.to_string(),
            e.code.clone(),
            e.d.to_string(),
            e.n_d.to_string(),
            e.tau_d.as_ns().to_string(),
            e.f.to_string(),
            n_factory,
            tau_factory,
            m_d,
            p_t,
            e.factory_fraction.to_string(),
            e.q.to_string(),
            e.t.as_ns().to_string(),
            e.t.human(2),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}
