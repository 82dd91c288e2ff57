//! Semantic rules over a resolved model.
//!
//! Every check is a pure function returning its own diagnostics; [`validate`]
//! concatenates and sorts them. Resolution diagnostics are not repeated here.

use std::collections::BTreeSet;

use crate::diagnostic::{sort_diagnostics, Code, Diagnostic};
use crate::model::ResolvedModel;
use crate::syntax::{
    ActorCategory, ActorType, BlockKind, Endpoint, ExceptionRef, ExtensionBlock, Level, Outcome,
    Step, StepKind, StepLabel, UseCaseAst,
};

pub fn validate(m: &ResolvedModel) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for uc in &m.ast.use_cases {
        out.extend(check_required_clauses(uc));
        out.extend(check_step_ordering(uc));
    }
    out.extend(check_interaction_endpoints(m));
    out.extend(check_actor_types(m));
    out.extend(check_multiplicity(m));
    out.extend(check_exception_rules(m));
    out.extend(check_outcomes(m));
    out.extend(check_mode_rules(m));
    sort_diagnostics(&mut out);
    out
}

/// E001 for each missing mandatory clause, reported at the use case name.
pub fn check_required_clauses(uc: &UseCaseAst) -> Vec<Diagnostic> {
    let mut missing = Vec::new();
    if uc.scope.is_none() {
        missing.push("scope");
    }
    if uc.level.is_none() {
        missing.push("level");
    }
    if uc.intention.is_none() {
        missing.push("intention");
    }
    if uc.multiplicity.is_none() {
        missing.push("multiplicity");
    }
    if uc.primary_actors.is_empty() {
        missing.push("primary actor");
    }
    if uc.is_handler && uc.handler_contexts.is_empty() {
        missing.push("contexts & exceptions");
    }
    if uc.main.is_none() {
        missing.push("main success scenario");
    }
    let what = if uc.is_handler { "handler" } else { "use case" };
    missing
        .into_iter()
        .map(|clause| {
            Diagnostic::new(
                Code::E001,
                uc.name.span.clone(),
                format!(
                    "{what} `{}` is missing the mandatory {clause} clause",
                    uc.name
                ),
            )
        })
        .collect()
}

/// E002 for steps whose label is not the successor of the previous step, and
/// for block labels used twice in one use case.
pub fn check_step_ordering(uc: &UseCaseAst) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if let Some(main) = &uc.main {
        let steps: Vec<&Step> = main.steps.iter().collect();
        out.extend(check_sequence(None, &steps));
    }
    let mut seen: BTreeSet<&StepLabel> = BTreeSet::new();
    for block in uc.blocks() {
        if !seen.insert(&block.label) {
            out.push(Diagnostic::new(
                Code::E002,
                block.label_span.clone(),
                format!(
                    "extension block `{}` is defined more than once",
                    block.label
                ),
            ));
        }
        let steps: Vec<&Step> = block.steps().collect();
        out.extend(check_sequence(Some(&block.label), &steps));
    }
    out
}

/// The label legally following `prev` in the sequence owned by `block`
/// (`None` for the main scenario).
pub fn legal_successor(block: Option<&StepLabel>, prev: Option<u32>) -> StepLabel {
    let n = prev.map_or(1, |p| p + 1);
    match block {
        None => StepLabel::main(n),
        Some(b) => b.block_step(n).unwrap_or_else(|| StepLabel::main(n)),
    }
}

fn check_sequence(block: Option<&StepLabel>, steps: &[&Step]) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut prev: Option<u32> = None;
    for step in steps {
        let expected = legal_successor(block, prev);
        if step.label != expected {
            out.push(
                Diagnostic::new(
                    Code::E002,
                    step.label_span.clone(),
                    format!(
                        "step `{}` is out of order; the next step must be `{expected}`",
                        step.label
                    ),
                )
                .with_suggestions([expected.to_string()]),
            );
        }
        prev = step.label.final_number().or(expected.final_number());
    }
    out
}

/// E010 for interaction steps of summary and user-goal use cases that do not
/// connect the system with one declared actor.
pub fn check_interaction_endpoints(m: &ResolvedModel) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for uc in &m.ast.use_cases {
        if !matches!(uc.level, Some(Level::Summary | Level::UserGoal)) {
            continue;
        }
        let declared: Vec<&str> = uc.actors().map(|a| a.name.as_str()).collect();
        for step in uc.steps() {
            let StepKind::Interaction { source, target, .. } = &step.kind else {
                continue;
            };
            let problem = match (source, target) {
                (Endpoint::System(_), Endpoint::System(_)) => {
                    Some("an interaction cannot have the system on both ends".to_string())
                }
                (Endpoint::Actor(a), Endpoint::Actor(b)) => Some(format!(
                    "interaction between `{a}` and `{b}` must involve the System"
                )),
                (Endpoint::System(_), Endpoint::Actor(a))
                | (Endpoint::Actor(a), Endpoint::System(_)) => {
                    if declared.contains(&a.as_str()) {
                        None
                    } else if declared.is_empty() {
                        Some(format!(
                            "actor `{a}` is not declared in use case `{}`, which declares no actors",
                            uc.name
                        ))
                    } else {
                        Some(format!(
                            "actor `{a}` is not declared in use case `{}`; declared actors: {}",
                            uc.name,
                            declared.join(", ")
                        ))
                    }
                }
            };
            if let Some(message) = problem {
                out.push(Diagnostic::new(Code::E010, step.span.clone(), message));
            }
        }
    }
    out
}

/// E005 for actor references with a missing or unknown category.
pub fn check_actor_types(m: &ResolvedModel) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for uc in &m.ast.use_cases {
        for actor in uc.actors() {
            let message = match &actor.category {
                ActorType::Known(_) => continue,
                ActorType::Missing => format!("actor `{}` has no type", actor.name),
                ActorType::Unknown(t) => {
                    format!(
                        "`{t}` is not an actor type (in `{}`)",
                        actor.qualified_name()
                    )
                }
            };
            let suggestions: Vec<String> = match m.actor_categories.get(&actor.name.text) {
                Some(c) => vec![format!("{}::{}", c.keyword(), actor.name)],
                None => ActorCategory::ALL
                    .iter()
                    .map(|c| format!("{}::{}", c.keyword(), actor.name))
                    .collect(),
            };
            out.push(
                Diagnostic::new(Code::E005, actor.span.clone(), message)
                    .with_suggestions(suggestions),
            );
        }
    }
    out
}

/// E006 when a bounded multiplicity has lower > upper.
pub fn check_multiplicity(m: &ResolvedModel) -> Vec<Diagnostic> {
    m.ast
        .use_cases
        .iter()
        .flat_map(UseCaseAst::actors)
        .filter_map(|actor| {
            let mult = actor.multiplicity?;
            let upper = mult.upper?;
            (mult.lower > upper).then(|| {
                Diagnostic::new(
                    Code::E006,
                    actor.span.clone(),
                    format!(
                        "multiplicity {mult} of `{}` has a lower bound above its upper bound",
                        actor.name
                    ),
                )
                .with_suggestions([format!("[{upper}..{}]", mult.lower)])
            })
        })
        .collect()
}

/// W001, E007, E008, E009 and W002.
pub fn check_exception_rules(m: &ResolvedModel) -> Vec<Diagnostic> {
    let mut out = Vec::new();

    let handled: BTreeSet<usize> = m
        .ast
        .handlers()
        .flat_map(|h| &h.handler_contexts)
        .filter_map(|ctx| m.exception_index(&ctx.exception))
        .collect();
    let mut raised: BTreeSet<usize> = BTreeSet::new();

    for uc in &m.ast.use_cases {
        for step in uc.steps() {
            let StepKind::Raise { exception } = &step.kind else {
                continue;
            };
            let Some(index) = m.exception_index(exception) else {
                continue;
            };
            raised.insert(index);
            if !handled.contains(&index) {
                out.push(Diagnostic::new(
                    Code::W001,
                    exception.span.clone(),
                    format!("exception `{exception}` is raised but never handled by any handler"),
                ));
            }
        }

        for block in uc.blocks() {
            if block.kind != BlockKind::Exceptional {
                continue;
            }
            let raises: Vec<_> = block.raised().collect();
            if raises.len() != 1 {
                out.push(Diagnostic::new(
                    Code::E008,
                    block.label_span.clone(),
                    format!(
                        "exceptional block `{}` must raise exactly one exception, found {}",
                        block.label,
                        raises.len()
                    ),
                ));
            } else if matches!(block.outcome, Outcome::Continue(_)) {
                let exception = raises[0];
                if m.exception_index(exception)
                    .is_some_and(|i| !handled.contains(&i))
                {
                    out.push(Diagnostic::new(
                        Code::E009,
                        block.outcome_span.clone(),
                        format!(
                            "block `{}` cannot continue: `{exception}` is never handled",
                            block.label
                        ),
                    ));
                }
            }
        }
    }

    for (index, exc) in m.ast.exceptions.iter().enumerate() {
        if raised.contains(&index) || !is_canonical(m, index) {
            continue;
        }
        if exc.is_global {
            if !handled.contains(&index) {
                out.push(Diagnostic::new(
                    Code::W001,
                    exc.span.clone(),
                    format!(
                        "global exception `{}` is never handled by any handler",
                        exc.qualified_name()
                    ),
                ));
            }
        } else {
            out.push(Diagnostic::new(
                Code::W002,
                exc.span.clone(),
                format!(
                    "exception `{}` is declared but never raised",
                    exc.qualified_name()
                ),
            ));
        }
    }

    for handler in m.ast.handlers() {
        for ctx in &handler.handler_contexts {
            let Some(index) = m.exception_index(&ctx.exception) else {
                continue;
            };
            if m.ast.exceptions[index].is_global || m.use_case(ctx.use_case.as_str()).is_none() {
                continue;
            }
            let reachable = m.reachable_use_cases(ctx.use_case.as_str());
            let occurs = reachable
                .iter()
                .filter_map(|name| m.use_case(name))
                .any(|uc| raises(uc).any(|s| m.exception_index(s) == Some(index)));
            if !occurs {
                out.push(Diagnostic::new(
                    Code::E007,
                    ctx.span.clone(),
                    format!(
                        "`{}` is never raised in `{}` or any use case it invokes",
                        ctx.exception, ctx.use_case
                    ),
                ));
            }
        }
    }
    out
}

/// True unless the exception at `index` lost a duplicate-name conflict.
fn is_canonical(m: &ResolvedModel, index: usize) -> bool {
    m.exception_by_qualified_name
        .get(&m.ast.exceptions[index].qualified_name())
        == Some(&index)
}

fn raises(uc: &UseCaseAst) -> impl Iterator<Item = &ExceptionRef> {
    uc.steps().into_iter().filter_map(|s| match &s.kind {
        StepKind::Raise { exception } => Some(exception),
        _ => None,
    })
}

/// E011 for main scenarios that do not end in success.
pub fn check_outcomes(m: &ResolvedModel) -> Vec<Diagnostic> {
    m.ast
        .use_cases
        .iter()
        .filter_map(|uc| {
            let main = uc.main.as_ref()?;
            (main.outcome != Outcome::Success).then(|| {
                Diagnostic::new(
                    Code::E011,
                    main.outcome_span.clone(),
                    format!(
                        "main success scenario of `{}` must end in success, not {}",
                        uc.name,
                        main.outcome.keyword()
                    ),
                )
                .with_suggestions(["outcome success"])
            })
        })
        .collect()
}

/// W003 for non-default modes that no mode switch ever enters.
pub fn check_mode_rules(m: &ResolvedModel) -> Vec<Diagnostic> {
    let mut targets: BTreeSet<&str> = BTreeSet::new();
    for uc in &m.ast.use_cases {
        if let Some(main) = &uc.main {
            targets.extend(main.entry_mode_switch.iter().map(|i| i.as_str()));
            targets.extend(main.exit_mode_switch.iter().map(|i| i.as_str()));
        }
        for block in uc.blocks() {
            targets.extend(block_switches(block));
        }
    }
    m.ast
        .modes
        .iter()
        .filter(|mode| !mode.is_default && !targets.contains(mode.name.as_str()))
        .map(|mode| {
            Diagnostic::new(
                Code::W003,
                mode.name.span.clone(),
                format!("mode `{}` is never switched to", mode.name),
            )
        })
        .collect()
}

fn block_switches(block: &ExtensionBlock) -> impl Iterator<Item = &str> {
    block
        .entry_mode_switch
        .iter()
        .chain(&block.exit_mode_switch)
        .map(|i| i.as_str())
}
