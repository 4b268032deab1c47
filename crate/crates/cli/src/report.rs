use std::collections::BTreeMap;
use std::io::Write;

use hardy_aux::criteria::CriterionReport;
use serde::Serialize;
use serde_json::Value;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

/// One checked claim.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub claim: String,
    pub paper_ref: String,
    pub holds: bool,
    pub min_slack: Option<f64>,
    pub first_failure: Option<usize>,
    pub exploratory: bool,
    /// Scalar outputs attached to the verdict.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Verdict {
    pub fn flag(claim: impl Into<String>, paper_ref: impl Into<String>, holds: bool) -> Self {
        Self {
            claim: claim.into(),
            paper_ref: paper_ref.into(),
            holds,
            min_slack: None,
            first_failure: None,
            exploratory: false,
            values: BTreeMap::new(),
            note: None,
        }
    }

    pub fn from_report(claim: impl Into<String>, paper_ref: impl Into<String>, r: &CriterionReport) -> Self {
        Self {
            min_slack: Some(r.min_slack),
            first_failure: r.first_failure,
            exploratory: r.exploratory,
            note: Some(format!(
                "checked n = {}..={} (finite horizon), tail trend {:?}",
                r.first_index, r.last_index, r.tail_trend
            )),
            ..Self::flag(claim, paper_ref, r.holds)
        }
    }

    pub fn value(mut self, key: &str, v: f64) -> Self {
        self.values.insert(key.to_string(), v);
        self
    }

    pub fn exploratory(mut self, flag: bool) -> Self {
        self.exploratory = flag;
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub params: BTreeMap<String, Value>,
    pub n_max: Option<usize>,
    pub seed: Option<u64>,
    pub verdicts: Vec<Verdict>,
    /// Per-point rows for grid scans; written by the CSV format.
    #[serde(skip)]
    pub table: Option<Table>,
    pub wall_time: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            params: BTreeMap::new(),
            n_max: None,
            seed: None,
            verdicts: Vec::new(),
            table: None,
            wall_time: 0.0,
        }
    }

    pub fn param(&mut self, key: &str, v: impl Into<Value>) {
        self.params.insert(key.to_string(), v.into());
    }

    pub fn push(&mut self, v: Verdict) {
        self.verdicts.push(v);
    }

    pub fn all_hold(&self) -> bool {
        self.verdicts.iter().all(|v| v.holds)
    }

    /// Sorts verdicts by claim so the output does not depend on evaluation order.
    pub fn canonicalize(&mut self) {
        self.verdicts.sort_by(|a, b| a.claim.cmp(&b.claim));
    }

    pub fn write(&self, format: OutputFormat, out: &mut dyn Write) -> Result<(), CliError> {
        match format {
            OutputFormat::Json => {
                serde_json::to_writer_pretty(&mut *out, self)?;
                writeln!(out)?;
            }
            OutputFormat::Csv => self.write_csv(out)?,
            OutputFormat::Text => self.write_text(out)?,
        }
        Ok(())
    }

    fn write_csv(&self, out: &mut dyn Write) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(out);
        if let Some(t) = &self.table {
            w.write_record(&t.header)?;
            for row in &t.rows {
                w.write_record(row)?;
            }
        } else {
            w.write_record(["claim", "paper_ref", "holds", "min_slack", "first_failure", "exploratory", "values"])?;
            for v in &self.verdicts {
                let values = v
                    .values
                    .iter()
                    .map(|(k, x)| format!("{k}={x}"))
                    .collect::<Vec<_>>()
                    .join(";");
                w.write_record([
                    v.claim.clone(),
                    v.paper_ref.clone(),
                    v.holds.to_string(),
                    v.min_slack.map(|s| s.to_string()).unwrap_or_default(),
                    v.first_failure.map(|n| n.to_string()).unwrap_or_default(),
                    v.exploratory.to_string(),
                    values,
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    fn write_text(&self, out: &mut dyn Write) -> Result<(), CliError> {
        writeln!(out, "{}", self.command)?;
        for v in &self.verdicts {
            let status = if v.holds { "PASS" } else { "FAIL" };
            let mut line = format!("{status} {} [{}]", v.claim, v.paper_ref);
            if let Some(s) = v.min_slack {
                line.push_str(&format!(" min_slack={s:.6e}"));
            }
            if let Some(n) = v.first_failure {
                line.push_str(&format!(" first_failure={n}"));
            }
            for (k, x) in &v.values {
                line.push_str(&format!(" {k}={x}"));
            }
            if v.exploratory {
                line.push_str(" (exploratory)");
            }
            if let Some(note) = &v.note {
                line.push_str(&format!(" -- {note}"));
            }
            writeln!(out, "{line}")?;
        }
        let passed = self.verdicts.iter().filter(|v| v.holds).count();
        writeln!(
            out,
            "{passed}/{} verdicts hold ({:.3} s)",
            self.verdicts.len(),
            self.wall_time
        )?;
        Ok(())
    }
}
