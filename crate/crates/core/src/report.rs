//! Check records and their text, JSON and CSV renderings.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// informational record; never fails a report
    Note,
}

/// One checked case. Field names are a stable interface.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub suite: String,
    pub case: String,
    pub status: Status,
    pub max_deviation: f64,
    pub witness: Option<String>,
}

impl Record {
    pub fn check(suite: &str, case: impl Into<String>, max_deviation: f64, tol: f64, witness: Option<String>) -> Self {
        let status = if max_deviation < tol { Status::Pass } else { Status::Fail };
        Record { suite: suite.into(), case: case.into(), status, max_deviation, witness }
    }

    pub fn note(suite: &str, case: impl Into<String>, max_deviation: f64, witness: Option<String>) -> Self {
        Record { suite: suite.into(), case: case.into(), status: Status::Note, max_deviation, witness }
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown format `{other}` (text, json or csv)")),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub records: Vec<Record>,
}

impl Report {
    pub fn new(records: Vec<Record>) -> Self {
        Report { records }
    }

    pub fn extend(&mut self, records: impl IntoIterator<Item = Record>) {
        self.records.extend(records);
    }

    pub fn passed(&self) -> bool {
        self.records.iter().all(Record::passed)
    }

    pub fn first_failure(&self) -> Option<&Record> {
        self.records.iter().find(|r| !r.passed())
    }

    pub fn render(&self, format: Format) -> Result<String> {
        Ok(match format {
            Format::Text => self.to_text(),
            Format::Json => serde_json::to_string_pretty(&self.records)? + "\n",
            Format::Csv => self.to_csv(),
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut suite = "";
        for r in &self.records {
            if r.suite != suite {
                suite = &r.suite;
                let _ = writeln!(out, "[{suite}]");
            }
            let tag = match r.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Note => "NOTE",
            };
            let _ = write!(out, "  {tag}  {:<48} max_dev = {:.3e}", r.case, r.max_deviation);
            if let Some(w) = &r.witness {
                let _ = write!(out, "  at {w}");
            }
            out.push('\n');
        }
        let fails = self.records.iter().filter(|r| !r.passed()).count();
        let _ = writeln!(out, "{} records, {} failed", self.records.len(), fails);
        out
    }

    fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.records {
            let status = match r.status {
                Status::Pass => "pass",
                Status::Fail => "fail",
                Status::Note => "note",
            };
            w.write_record([&r.suite, &r.case, status, &format!("{:e}", r.max_deviation), r.witness.as_deref().unwrap_or("")])
                .expect("in-memory CSV");
        }
        let body = String::from_utf8(w.into_inner().expect("in-memory CSV")).expect("utf-8");
        format!("suite,case,status,max_deviation,witness\n{body}")
    }
}
