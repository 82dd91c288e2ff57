use std::collections::BTreeSet;

use super::graph::{AnalysisError, InvocationGraph, PathRecord};
use crate::model::ResolvedModel;
use crate::syntax::{Endpoint, ExtensionBlock, Step, StepKind, UseCaseAst};

/// Source name used for rows describing global exceptions.
pub const GLOBAL_SOURCE: &str = "(global)";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SummaryView {
    Global,
    UseCase(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExceptionSummaryRow {
    /// Qualified name, e.g. `HardwareException::TagUnavailable`.
    pub exception: String,
    pub is_global: bool,
    pub source_use_case: String,
    pub handlers: Vec<String>,
    /// Guard of the raising block; for global rows, the guards of every
    /// raise site joined with `; `.
    pub situation: String,
    pub participating_actors: Vec<String>,
    pub paths: Vec<PathRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HandlerSummaryRow {
    pub handler: String,
    pub dependent_use_cases: Vec<String>,
    pub handled_exceptions: Vec<String>,
    /// Declared actors; names that appear in no ordinary use case carry a
    /// trailing `*`.
    pub actors: Vec<String>,
    pub total_invocation_paths: usize,
}

/// A resolved raise step together with where it sits.
#[derive(Debug, Clone, Copy)]
pub struct Occurrence<'m> {
    pub use_case: &'m UseCaseAst,
    pub exception: usize,
    pub step: &'m Step,
    pub block: Option<&'m ExtensionBlock>,
}

/// Every resolved raise step, in use case order and then step order.
pub fn occurrences(m: &ResolvedModel) -> Vec<Occurrence<'_>> {
    let mut out = Vec::new();
    for uc in &m.ast.use_cases {
        let main = uc.main.iter().flat_map(|s| &s.steps).map(|s| (s, None));
        let blocks = uc
            .blocks()
            .into_iter()
            .flat_map(|b| b.steps().map(move |s| (s, Some(b))));
        for (step, block) in main.chain(blocks) {
            let StepKind::Raise { exception } = &step.kind else {
                continue;
            };
            if let Some(index) = m.exception_index(exception) {
                out.push(Occurrence {
                    use_case: uc,
                    exception: index,
                    step,
                    block,
                });
            }
        }
    }
    out
}

/// Handlers whose contexts name exception `index`, in declaration order.
fn handlers_of(m: &ResolvedModel, index: usize) -> Vec<String> {
    m.ast
        .handlers()
        .filter(|h| {
            h.handler_contexts
                .iter()
                .any(|c| m.exception_index(&c.exception) == Some(index))
        })
        .map(|h| h.name.text.clone())
        .collect()
}

/// Actor endpoints of interactions inside the raising block and in the
/// steps it extends.
fn participating_actors(o: &Occurrence<'_>) -> Vec<String> {
    let Some(block) = o.block else {
        return Vec::new();
    };
    let anchored: Vec<_> = block
        .label
        .anchor()
        .map(|a| a.expand_range())
        .unwrap_or_default();
    let all_steps = o.use_case.steps();
    let mut inside = Vec::new();
    collect_block_steps(block, &mut inside);
    let steps = all_steps
        .iter()
        .copied()
        .filter(|s| anchored.contains(&s.label))
        .chain(inside);

    let mut out: Vec<String> = Vec::new();
    for step in steps {
        if let StepKind::Interaction { source, target, .. } = &step.kind {
            for endpoint in [source, target] {
                if let Endpoint::Actor(name) = endpoint {
                    if !out.contains(&name.text) {
                        out.push(name.text.clone());
                    }
                }
            }
        }
    }
    out
}

fn collect_block_steps<'a>(block: &'a ExtensionBlock, out: &mut Vec<&'a Step>) {
    out.extend(block.steps());
    for nested in block.nested() {
        collect_block_steps(nested, out);
    }
}

fn occurrence_row(
    m: &ResolvedModel,
    o: &Occurrence<'_>,
    paths: Vec<PathRecord>,
) -> ExceptionSummaryRow {
    ExceptionSummaryRow {
        exception: m.ast.exceptions[o.exception].qualified_name(),
        is_global: false,
        source_use_case: o.use_case.name.text.clone(),
        handlers: handlers_of(m, o.exception),
        situation: o.block.and_then(|b| b.guard.clone()).unwrap_or_default(),
        participating_actors: participating_actors(o),
        paths,
    }
}

fn global_rows(m: &ResolvedModel, occurrences: &[Occurrence<'_>]) -> Vec<ExceptionSummaryRow> {
    m.ast
        .exceptions
        .iter()
        .enumerate()
        .filter(|(i, e)| {
            e.is_global && m.exception_by_qualified_name.get(&e.qualified_name()) == Some(i)
        })
        .map(|(index, e)| {
            let sites: Vec<_> = occurrences
                .iter()
                .filter(|o| o.exception == index)
                .collect();
            let mut situations: Vec<String> = Vec::new();
            let mut actors: Vec<String> = Vec::new();
            for o in &sites {
                if let Some(guard) = o.block.and_then(|b| b.guard.clone()) {
                    if !situations.contains(&guard) {
                        situations.push(guard);
                    }
                }
                for a in participating_actors(o) {
                    if !actors.contains(&a) {
                        actors.push(a);
                    }
                }
            }
            ExceptionSummaryRow {
                exception: e.qualified_name(),
                is_global: true,
                source_use_case: GLOBAL_SOURCE.to_string(),
                handlers: handlers_of(m, index),
                situation: situations.join("; "),
                participating_actors: actors,
                paths: Vec::new(),
            }
        })
        .collect()
}

/// Exception summary table. The global view has one row per raise of a
/// non-global exception, with every root-to-source path; the use case view
/// keeps the occurrences reachable from that use case, with paths starting
/// there. Both views end with one row per global exception.
pub fn exception_summary(
    m: &ResolvedModel,
    view: &SummaryView,
) -> Result<Vec<ExceptionSummaryRow>, AnalysisError> {
    let g = InvocationGraph::build(m);
    if let Some(cycle) = g.find_cycle() {
        return Err(cycle);
    }
    let all = occurrences(m);
    let local = all
        .iter()
        .filter(|o| !m.ast.exceptions[o.exception].is_global);

    let mut rows = Vec::new();
    match view {
        SummaryView::Global => {
            for o in local {
                let name = &o.use_case.name.text;
                let paths = if g.contains(name) {
                    g.paths_to(name)?
                } else {
                    Vec::new()
                };
                rows.push(occurrence_row(m, o, paths));
            }
        }
        SummaryView::UseCase(root) => {
            if !g.contains(root) {
                return Err(AnalysisError::UnknownUseCase(root.clone()));
            }
            let reachable = m.reachable_use_cases(root);
            for o in local {
                let name = &o.use_case.name.text;
                if !g.contains(name) || !reachable.contains(name) {
                    continue;
                }
                rows.push(occurrence_row(m, o, g.paths_between(root, name)?));
            }
        }
    }
    rows.extend(global_rows(m, &all));
    Ok(rows)
}

/// One row per handler. The path total sums, over every raise of a handled
/// exception that lies within reach of a matching context use case, the
/// number of root-to-source paths of that raise.
pub fn handler_summary(m: &ResolvedModel) -> Result<Vec<HandlerSummaryRow>, AnalysisError> {
    let g = InvocationGraph::build(m);
    if let Some(cycle) = g.find_cycle() {
        return Err(cycle);
    }
    let all = occurrences(m);
    let ordinary_actors: BTreeSet<&str> = m
        .ast
        .non_handlers()
        .flat_map(UseCaseAst::actors)
        .map(|a| a.name.as_str())
        .collect();

    let mut rows = Vec::new();
    for h in m.ast.handlers() {
        let mut dependent_use_cases: Vec<String> = Vec::new();
        let mut handled_exceptions: Vec<String> = Vec::new();
        for ctx in &h.handler_contexts {
            if !dependent_use_cases.contains(&ctx.use_case.text) {
                dependent_use_cases.push(ctx.use_case.text.clone());
            }
            let q = ctx.exception.to_string();
            if !handled_exceptions.contains(&q) {
                handled_exceptions.push(q);
            }
        }

        let mut actors: Vec<String> = Vec::new();
        for a in h.actors() {
            let shown = if ordinary_actors.contains(a.name.as_str()) {
                a.name.text.clone()
            } else {
                format!("{}*", a.name)
            };
            if !actors.contains(&shown) {
                actors.push(shown);
            }
        }

        let mut total = 0;
        for o in &all {
            if m.ast.exceptions[o.exception].is_global {
                continue;
            }
            let source = &o.use_case.name.text;
            let covered = h.handler_contexts.iter().any(|ctx| {
                m.exception_index(&ctx.exception) == Some(o.exception)
                    && m.reachable_use_cases(ctx.use_case.as_str())
                        .contains(source)
            });
            if covered && g.contains(source) {
                total += g.paths_to(source)?.len();
            }
        }

        rows.push(HandlerSummaryRow {
            handler: h.name.text.clone(),
            dependent_use_cases,
            handled_exceptions,
            actors,
            total_invocation_paths: total,
        });
    }
    Ok(rows)
}
