use std::fmt;
use std::io::{self, Write};

use clap::ValueEnum;
use hom_novikov::axioms::CheckReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Tsv,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Line {
    pub id: String,
    pub status: Status,
    pub detail: String,
}

/// Collected result lines; printed sorted by id.
#[derive(Default)]
pub struct Report {
    lines: Vec<Line>,
}

/// Tabs and newlines would break the one-record-per-line format.
fn flatten(s: &str) -> String {
    s.chars().map(|c| if c == '\t' || c == '\n' || c == '\r' { ' ' } else { c }).collect()
}

impl Report {
    pub fn push(&mut self, id: impl Into<String>, status: Status, detail: impl AsRef<str>) {
        self.lines.push(Line { id: id.into(), status, detail: flatten(detail.as_ref()) });
    }

    pub fn check(&mut self, id: impl Into<String>, r: &CheckReport) {
        if r.passed {
            self.push(id, Status::Pass, r.notes.join("; "));
        } else {
            self.push(id, Status::Fail, r.summary());
        }
    }

    pub fn failed(&self) -> bool {
        self.lines.iter().any(|l| l.status == Status::Fail)
    }

    pub fn write(&mut self, out: &mut impl Write, format: Format) -> io::Result<()> {
        self.lines.sort_by(|a, b| a.id.cmp(&b.id).then(a.status.cmp(&b.status)).then(a.detail.cmp(&b.detail)));
        for l in &self.lines {
            match format {
                Format::Tsv => writeln!(out, "RESULT\t{}\t{}\t{}", l.id, l.status, l.detail)?,
                Format::Text if l.detail.is_empty() => writeln!(out, "{:<4}  {}", l.status, l.id)?,
                Format::Text => writeln!(out, "{:<4}  {}  {}", l.status, l.id, l.detail)?,
            }
        }
        if format == Format::Text {
            let count = |s| self.lines.iter().filter(|l| l.status == s).count();
            writeln!(
                out,
                "{} passed, {} failed, {} skipped",
                count(Status::Pass),
                count(Status::Fail),
                count(Status::Skip)
            )?;
        }
        Ok(())
    }
}
