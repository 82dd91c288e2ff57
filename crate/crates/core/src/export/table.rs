use std::fmt::Write;

use crate::analysis::{ExceptionSummaryRow, HandlerSummaryRow, ModeServiceRow, ModeSwitchRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Markdown,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SummaryTable {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl SummaryTable {
    pub fn new(title: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            title: title.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// Appends a row.
    ///
    /// # Panics
    /// If the row length differs from the column count.
    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.columns.len(), "row width mismatch");
        self.rows.push(row);
    }
}

pub fn render_table(t: &SummaryTable, format: TableFormat) -> String {
    match format {
        TableFormat::Markdown => markdown(t),
        TableFormat::Csv => csv(t),
    }
}

fn markdown_cell(text: &str) -> String {
    text.replace('|', "\\|").replace('\n', "<br>")
}

fn markdown(t: &SummaryTable) -> String {
    let mut out = String::new();
    let line = |out: &mut String, cells: &mut dyn Iterator<Item = String>| {
        out.push('|');
        for cell in cells {
            write!(out, " {cell} |").unwrap();
        }
        out.push('\n');
    };
    line(&mut out, &mut t.columns.iter().map(|c| markdown_cell(c)));
    line(&mut out, &mut t.columns.iter().map(|_| "---".to_string()));
    for row in &t.rows {
        line(&mut out, &mut row.iter().map(|c| markdown_cell(c)));
    }
    out
}

fn csv(t: &SummaryTable) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(Vec::new());
    w.write_record(&t.columns).unwrap();
    for row in &t.rows {
        w.write_record(row).unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

fn list(items: &[String]) -> String {
    items.join(", ")
}

pub fn exception_table(title: &str, rows: &[ExceptionSummaryRow]) -> SummaryTable {
    let mut t = SummaryTable::new(
        title,
        &[
            "Exception",
            "Source Use Case",
            "Handlers",
            "Situation",
            "Participating Actors",
            "Paths",
        ],
    );
    for r in rows {
        let paths: Vec<String> = r.paths.iter().map(ToString::to_string).collect();
        t.push(vec![
            r.exception.clone(),
            r.source_use_case.clone(),
            list(&r.handlers),
            r.situation.clone(),
            list(&r.participating_actors),
            paths.join("\n"),
        ]);
    }
    t
}

pub fn handler_table(rows: &[HandlerSummaryRow]) -> SummaryTable {
    let mut t = SummaryTable::new(
        "Handler summary",
        &[
            "Handler",
            "Dependent Use Cases",
            "Handled Exceptions",
            "Actors",
            "Total Invocation Paths",
        ],
    );
    for r in rows {
        t.push(vec![
            r.handler.clone(),
            list(&r.dependent_use_cases),
            list(&r.handled_exceptions),
            list(&r.actors),
            r.total_invocation_paths.to_string(),
        ]);
    }
    t
}

pub fn mode_switch_table(rows: &[ModeSwitchRow]) -> SummaryTable {
    let mut t = SummaryTable::new(
        "Mode switches",
        &["Use Case", "Location", "From Mode", "To Mode"],
    );
    for r in rows {
        t.push(vec![
            r.use_case.clone(),
            r.location.to_string(),
            r.from_mode.clone(),
            r.to_mode.clone(),
        ]);
    }
    t
}

pub fn mode_service_table(rows: &[ModeServiceRow]) -> SummaryTable {
    let mut t = SummaryTable::new("Mode summary", &["Mode", "Kind", "Offered Services"]);
    for r in rows {
        t.push(vec![r.mode.clone(), r.kind.clone(), list(&r.services)]);
    }
    t
}
