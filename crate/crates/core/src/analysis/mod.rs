//! Invocation graph, path enumeration, and the generated summary tables.

mod exceptions;
mod graph;
mod modes;

pub use exceptions::{
    exception_summary, handler_summary, occurrences, ExceptionSummaryRow, HandlerSummaryRow,
    Occurrence, SummaryView, GLOBAL_SOURCE,
};
pub use graph::{enumerate_paths, AnalysisError, Edge, InvocationGraph, PathRecord};
pub use modes::{
    mode_service_table, mode_switch_table, ModeServiceRow, ModeSwitchRow, SwitchLocation,
};

use crate::diagnostic::Diagnostic;
use crate::model::ResolvedModel;

/// E015 for the first invocation cycle found, if any.
pub fn check_cycles(m: &ResolvedModel) -> Option<Diagnostic> {
    InvocationGraph::build(m)
        .find_cycle()
        .map(|e| e.to_diagnostic())
}

#[cfg(test)]
mod tests;
