use std::collections::{BTreeMap, BTreeSet};

use super::{Binding, RefKind, ResolvedModel, Target};
use crate::diagnostic::{sort_diagnostics, Code, Diagnostic};
use crate::syntax::{
    ActorCategory, ActorType, AstModel, BlockItem, Endpoint, ExceptionRef, ExtensionBlock, Ident,
    LabelRef, Outcome, SourceSpan, Step, StepKind, StepLabel, UseCaseAst,
};

/// Builds symbol tables and binds every reference. Each unresolvable
/// reference produces exactly one diagnostic; resolution never aborts.
pub fn resolve(ast: AstModel) -> (ResolvedModel, Vec<Diagnostic>) {
    let mut r = Resolver {
        ast: &ast,
        diagnostics: Vec::new(),
        bindings: Vec::new(),
    };

    let use_case_by_name = r.table(ast.use_cases.iter().map(|uc| &uc.name), "use case");
    let mode_by_name = r.table(ast.modes.iter().map(|m| &m.name), "mode");
    let service_by_name = r.table(ast.services.iter().map(|s| &s.name), "service");

    let mut exception_by_qualified_name = BTreeMap::new();
    let mut exception_by_name: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, exc) in ast.exceptions.iter().enumerate() {
        if let Some(&first) = exception_by_name.get(exc.name.as_str()) {
            let prev = &ast.exceptions[first];
            r.diagnostics.push(
                Diagnostic::new(
                    Code::E014,
                    exc.span.clone(),
                    format!(
                        "exception name `{}` is already defined as `{}`",
                        exc.name,
                        prev.qualified_name()
                    ),
                )
                .with_related(prev.span.clone(), "first definition here"),
            );
            continue;
        }
        exception_by_name.insert(exc.name.as_str(), i);
        exception_by_qualified_name.insert(exc.qualified_name(), i);
    }

    let (actor_categories, declared_actors) = r.actors();

    let tables = Tables {
        use_cases: &use_case_by_name,
        exceptions: &exception_by_qualified_name,
        exception_names: &exception_by_name,
        modes: &mode_by_name,
        services: &service_by_name,
    };

    for mode in &ast.modes {
        for svc in &mode.offered_services {
            r.bind_or(
                tables.services,
                svc,
                RefKind::OfferedService,
                Target::Service,
                || {
                    Diagnostic::new(
                        Code::E013,
                        svc.span.clone(),
                        format!("mode `{}` offers undeclared service `{}`", mode.name, svc),
                    )
                },
            );
        }
    }
    for svc in &ast.services {
        for goal in &svc.goals {
            r.bind_or(
                tables.use_cases,
                goal,
                RefKind::ServiceGoal,
                Target::UseCase,
                || {
                    Diagnostic::new(
                        Code::E003,
                        goal.span.clone(),
                        format!(
                            "service `{}` provides undefined use case `{}`",
                            svc.name, goal
                        ),
                    )
                },
            );
        }
    }

    for (uc_index, uc) in ast.use_cases.iter().enumerate() {
        r.use_case(uc_index, uc, &tables, &declared_actors[uc_index]);
    }

    sort_diagnostics(&mut r.diagnostics);
    let bindings = r.bindings;
    let diagnostics = r.diagnostics;
    let model = ResolvedModel {
        use_case_by_name,
        exception_by_qualified_name,
        mode_by_name,
        service_by_name,
        actor_categories,
        declared_actors,
        bindings,
        ast,
    };
    (model, diagnostics)
}

struct Tables<'a> {
    use_cases: &'a BTreeMap<String, usize>,
    exceptions: &'a BTreeMap<String, usize>,
    exception_names: &'a BTreeMap<&'a str, usize>,
    modes: &'a BTreeMap<String, usize>,
    services: &'a BTreeMap<String, usize>,
}

struct Resolver<'a> {
    ast: &'a AstModel,
    diagnostics: Vec<Diagnostic>,
    bindings: Vec<Binding>,
}

type ActorTables = (
    BTreeMap<String, ActorCategory>,
    Vec<BTreeSet<(ActorCategory, String)>>,
);

impl<'a> Resolver<'a> {
    /// Name table where the first definition wins and later ones are E014.
    fn table<'i>(
        &mut self,
        names: impl Iterator<Item = &'i Ident>,
        what: &str,
    ) -> BTreeMap<String, usize> {
        let mut table: BTreeMap<String, usize> = BTreeMap::new();
        let mut first_spans: Vec<&SourceSpan> = Vec::new();
        for (i, name) in names.enumerate() {
            first_spans.push(&name.span);
            if let Some(&first) = table.get(&name.text) {
                self.diagnostics.push(
                    Diagnostic::new(
                        Code::E014,
                        name.span.clone(),
                        format!("{what} `{name}` is defined more than once"),
                    )
                    .with_related(first_spans[first].clone(), "first definition here"),
                );
            } else {
                table.insert(name.text.clone(), i);
            }
        }
        table
    }

    /// Global actor identities; a name reused with another category is E014.
    fn actors(&mut self) -> ActorTables {
        let mut categories: BTreeMap<String, ActorCategory> = BTreeMap::new();
        let mut first_site: BTreeMap<String, SourceSpan> = BTreeMap::new();
        let mut declared = Vec::new();
        for uc in &self.ast.use_cases {
            let mut set = BTreeSet::new();
            for actor in uc.actors() {
                let ActorType::Known(category) = actor.category else {
                    continue;
                };
                match categories.get(&actor.name.text) {
                    Some(&existing) if existing != category => {
                        self.diagnostics.push(
                            Diagnostic::new(
                                Code::E014,
                                actor.span.clone(),
                                format!(
                                    "actor `{}` is already declared as `{}::{}`",
                                    actor.name,
                                    existing.keyword(),
                                    actor.name
                                ),
                            )
                            .with_related(
                                first_site[&actor.name.text].clone(),
                                "first declaration here",
                            ),
                        );
                        continue;
                    }
                    Some(_) => {}
                    None => {
                        categories.insert(actor.name.text.clone(), category);
                        first_site.insert(actor.name.text.clone(), actor.span.clone());
                    }
                }
                set.insert((category, actor.name.text.clone()));
            }
            declared.push(set);
        }
        (categories, declared)
    }

    fn bind(&mut self, site: &SourceSpan, kind: RefKind, name: &str, target: Target) {
        self.bindings.push(Binding {
            site: site.clone(),
            kind,
            name: name.to_string(),
            target,
        });
    }

    fn bind_or(
        &mut self,
        table: &BTreeMap<String, usize>,
        name: &Ident,
        kind: RefKind,
        target: fn(usize) -> Target,
        missing: impl FnOnce() -> Diagnostic,
    ) {
        match table.get(&name.text) {
            Some(&i) => self.bind(&name.span, kind, &name.text, target(i)),
            None => self.diagnostics.push(missing()),
        }
    }

    fn exception(&mut self, r: &ExceptionRef, kind: RefKind, tables: &Tables<'_>) {
        let qualified = r.to_string();
        if let Some(&i) = tables.exceptions.get(&qualified) {
            self.bind(&r.span, kind, &qualified, Target::Exception(i));
            return;
        }
        let mut d = Diagnostic::new(
            Code::E004,
            r.span.clone(),
            format!("exception `{qualified}` is not defined in the header"),
        );
        if let Some(&i) = tables.exception_names.get(r.name.as_str()) {
            d = d.with_suggestions([self.ast.exceptions[i].qualified_name()]);
        } else {
            d = d.with_suggestions([format!(
                "add `exception {qualified}` to the exceptions block"
            )]);
        }
        self.diagnostics.push(d);
    }

    fn mode(&mut self, name: &Option<Ident>, tables: &Tables<'_>) {
        let Some(name) = name else { return };
        self.bind_or(
            tables.modes,
            name,
            RefKind::ModeSwitch,
            Target::Mode,
            || {
                let mut declared: Vec<&str> = tables.modes.keys().map(String::as_str).collect();
                declared.sort_unstable();
                Diagnostic::new(
                    Code::E013,
                    name.span.clone(),
                    format!("mode `{name}` is not declared"),
                )
                .with_suggestions(declared.into_iter().map(str::to_string))
            },
        );
    }

    fn use_case(
        &mut self,
        uc_index: usize,
        uc: &UseCaseAst,
        tables: &Tables<'_>,
        declared: &BTreeSet<(ActorCategory, String)>,
    ) {
        for ctx in &uc.handler_contexts {
            self.bind_or(
                tables.use_cases,
                &ctx.use_case,
                RefKind::ContextUseCase,
                Target::UseCase,
                || {
                    Diagnostic::new(
                        Code::E003,
                        ctx.use_case.span.clone(),
                        format!("context use case `{}` is not defined", ctx.use_case),
                    )
                },
            );
            self.exception(&ctx.exception, RefKind::ContextException, tables);
        }

        let labels: BTreeSet<&StepLabel> = uc.steps().into_iter().map(|s| &s.label).collect();
        let scope = StepScope {
            uc_index,
            labels: &labels,
            declared,
        };

        if let Some(main) = &uc.main {
            self.mode(&main.entry_mode_switch, tables);
            for step in &main.steps {
                self.step(step, &scope, tables);
            }
            self.mode(&main.exit_mode_switch, tables);
            self.outcome(&main.outcome, &scope);
            let parent: BTreeSet<&StepLabel> = main.steps.iter().map(|s| &s.label).collect();
            for block in &uc.extensions {
                self.block(block, &parent, &scope, tables);
            }
        } else {
            for block in &uc.extensions {
                self.block(block, &BTreeSet::new(), &scope, tables);
            }
        }
    }

    fn block(
        &mut self,
        block: &ExtensionBlock,
        parent: &BTreeSet<&StepLabel>,
        scope: &StepScope<'_>,
        tables: &Tables<'_>,
    ) {
        if let Some(anchor) = block.label.anchor() {
            let missing: Vec<StepLabel> = anchor
                .expand_range()
                .into_iter()
                .filter(|l| !parent.contains(l))
                .collect();
            if missing.is_empty() {
                for l in anchor.expand_range() {
                    self.bind(
                        &block.label_span,
                        RefKind::BlockAnchor,
                        &l.to_string(),
                        Target::Step {
                            use_case: scope.uc_index,
                            label: l,
                        },
                    );
                }
            } else {
                let list: Vec<String> = missing.iter().map(|l| format!("`{l}`")).collect();
                self.diagnostics.push(
                    Diagnostic::new(
                        Code::E012,
                        block.label_span.clone(),
                        format!(
                            "extension block `{}` extends step {} which does not exist in the enclosing sequence",
                            block.label,
                            list.join(", ")
                        ),
                    )
                    .with_suggestions(parent.iter().map(|l| l.to_string())),
                );
            }
        }

        self.mode(&block.entry_mode_switch, tables);
        let own: BTreeSet<&StepLabel> = block.steps().map(|s| &s.label).collect();
        for item in &block.body {
            match item {
                BlockItem::Step(step) => self.step(step, scope, tables),
                BlockItem::Block(nested) => self.block(nested, &own, scope, tables),
            }
        }
        self.mode(&block.exit_mode_switch, tables);
        self.outcome(&block.outcome, scope);
    }

    fn outcome(&mut self, outcome: &Outcome, scope: &StepScope<'_>) {
        if let Outcome::Continue(target) = outcome {
            self.step_ref(target, RefKind::ContinueTarget, scope);
        }
    }

    fn step_ref(&mut self, r: &LabelRef, kind: RefKind, scope: &StepScope<'_>) {
        if scope.labels.contains(&r.label) {
            self.bind(
                &r.span,
                kind,
                &r.label.to_string(),
                Target::Step {
                    use_case: scope.uc_index,
                    label: r.label.clone(),
                },
            );
        } else {
            self.diagnostics.push(Diagnostic::new(
                Code::E012,
                r.span.clone(),
                format!("step `{}` does not exist in this use case", r.label),
            ));
        }
    }

    fn step(&mut self, step: &Step, scope: &StepScope<'_>, tables: &Tables<'_>) {
        match &step.kind {
            StepKind::Invocation { target } => {
                self.bind_or(
                    tables.use_cases,
                    target,
                    RefKind::Invocation,
                    Target::UseCase,
                    || {
                        Diagnostic::new(
                            Code::E003,
                            target.span.clone(),
                            format!("invoked use case `{target}` is not defined"),
                        )
                    },
                );
            }
            StepKind::Raise { exception } => {
                self.exception(exception, RefKind::RaisedException, tables);
            }
            StepKind::Goto { target } => self.step_ref(target, RefKind::GotoTarget, scope),
            StepKind::Repeat { from, to } => {
                self.step_ref(from, RefKind::RepeatBound, scope);
                self.step_ref(to, RefKind::RepeatBound, scope);
            }
            StepKind::Interaction { source, target, .. } => {
                for endpoint in [source, target] {
                    let Endpoint::Actor(name) = endpoint else {
                        continue;
                    };
                    if let Some((category, _)) =
                        scope.declared.iter().find(|(_, n)| *n == name.text)
                    {
                        self.bind(
                            &name.span,
                            RefKind::InteractionEndpoint,
                            &name.text,
                            Target::Actor {
                                category: *category,
                                name: name.text.clone(),
                            },
                        );
                    }
                }
            }
            StepKind::Condition { .. } | StepKind::Internal { .. } => {}
        }
    }
}

struct StepScope<'a> {
    uc_index: usize,
    labels: &'a BTreeSet<&'a StepLabel>,
    declared: &'a BTreeSet<(ActorCategory, String)>,
}
