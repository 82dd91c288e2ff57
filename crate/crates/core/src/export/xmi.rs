//! XMI 2.0 export with one element per metamodel class:
//!
//! | element          | holds                                              |
//! |------------------|----------------------------------------------------|
//! | `Model`          | everything below                                   |
//! | `Mode`           | kind, default flag, `offers` idrefs to `Service`   |
//! | `Service`        | `provides` idrefs to use cases                     |
//! | `Exception`      | category and global flag                           |
//! | `Actor`          | category; one per distinct declared actor          |
//! | `UseCase`        | clauses, actor idrefs, `Step`s and blocks          |
//! | `Handler`        | as `UseCase`, plus `Context` children              |
//! | `Context`        | idrefs to the context use case and exception       |
//! | `MainScenario`   | mode switches, outcome, and `Step`s                |
//! | `Step`           | label, kind, and kind-specific idrefs              |
//! | `ExtensionBlock` | label, kind, guard, `extends` idrefs, outcome      |
//!
//! Identifiers are positional (`usecase-3`, `usecase-3-step-7`) so they stay
//! unique even in models with duplicate names.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::model::ResolvedModel;
use crate::syntax::{
    ActorRef, BlockItem, Endpoint, ExtensionBlock, Ident, Outcome, Scenario, Step, StepKind,
    StepLabel, UseCaseAst,
};

pub const XMI_NAMESPACE: &str = "http://ucm4iot/1.0";

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\n' => out.push_str("&#10;"),
            '\t' => out.push_str("&#9;"),
            c => out.push(c),
        }
    }
    out
}

struct Writer {
    out: String,
    depth: usize,
}

type Attrs<'a> = Vec<(&'a str, String)>;

impl Writer {
    fn open_tag(&mut self, name: &str, attrs: &Attrs<'_>, close: bool) {
        for _ in 0..self.depth {
            self.out.push_str("  ");
        }
        write!(self.out, "<{name}").unwrap();
        for (k, v) in attrs {
            write!(self.out, " {k}=\"{}\"", escape(v)).unwrap();
        }
        self.out.push_str(if close { "/>\n" } else { ">\n" });
        if !close {
            self.depth += 1;
        }
    }

    fn empty(&mut self, name: &str, attrs: Attrs<'_>) {
        self.open_tag(name, &attrs, true);
    }

    fn start(&mut self, name: &str, attrs: Attrs<'_>) {
        self.open_tag(name, &attrs, false);
    }

    fn end(&mut self, name: &str) {
        self.depth -= 1;
        for _ in 0..self.depth {
            self.out.push_str("  ");
        }
        writeln!(self.out, "</{name}>").unwrap();
    }
}

struct Ids<'m> {
    m: &'m ResolvedModel,
    actors: BTreeMap<String, String>,
}

impl Ids<'_> {
    fn use_case(&self, name: &Ident) -> Option<String> {
        self.m
            .use_case_by_name
            .get(&name.text)
            .map(|i| format!("usecase-{i}"))
    }

    fn mode(&self, name: &Ident) -> Option<String> {
        self.m
            .mode_by_name
            .get(&name.text)
            .map(|i| format!("mode-{i}"))
    }

    fn refs<'a>(
        &self,
        f: impl Fn(&Self, &'a Ident) -> Option<String>,
        names: &'a [Ident],
    ) -> String {
        names
            .iter()
            .filter_map(|n| f(self, n))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

pub fn export_xmi(m: &ResolvedModel) -> String {
    let ast = &m.ast;
    let mut w = Writer {
        out: String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"),
        depth: 0,
    };

    // Distinct actors by (category, name), in first-declaration order.
    let mut actor_list: Vec<&ActorRef> = Vec::new();
    let mut actors = BTreeMap::new();
    for a in ast.use_cases.iter().flat_map(UseCaseAst::actors) {
        let key = a.qualified_name();
        if let std::collections::btree_map::Entry::Vacant(slot) = actors.entry(key) {
            slot.insert(format!("actor-{}", actor_list.len()));
            actor_list.push(a);
        }
    }
    let ids = Ids { m, actors };

    w.start(
        "xmi:XMI",
        vec![
            ("xmi:version", "2.0".into()),
            ("xmlns:xmi", "http://www.omg.org/XMI".into()),
            ("xmlns", XMI_NAMESPACE.into()),
        ],
    );
    w.start(
        "Model",
        vec![("xmi:id", "model".into()), ("name", ast.name.text.clone())],
    );

    for (i, mode) in ast.modes.iter().enumerate() {
        w.empty(
            "Mode",
            vec![
                ("xmi:id", format!("mode-{i}")),
                ("name", mode.name.text.clone()),
                ("kind", mode.kind.keyword().into()),
                ("default", mode.is_default.to_string()),
                (
                    "offers",
                    ids.refs(
                        |ids, n| {
                            ids.m
                                .service_by_name
                                .get(&n.text)
                                .map(|i| format!("service-{i}"))
                        },
                        &mode.offered_services,
                    ),
                ),
            ],
        );
    }
    for (i, svc) in ast.services.iter().enumerate() {
        w.empty(
            "Service",
            vec![
                ("xmi:id", format!("service-{i}")),
                ("name", svc.name.text.clone()),
                ("provides", ids.refs(Ids::use_case, &svc.goals)),
            ],
        );
    }
    for (i, exc) in ast.exceptions.iter().enumerate() {
        w.empty(
            "Exception",
            vec![
                ("xmi:id", format!("exception-{i}")),
                ("name", exc.name.text.clone()),
                ("category", exc.category.keyword().into()),
                ("global", exc.is_global.to_string()),
            ],
        );
    }
    for a in &actor_list {
        let mut attrs = vec![
            ("xmi:id", ids.actors[&a.qualified_name()].clone()),
            ("name", a.name.text.clone()),
        ];
        if let Some(c) = Option::<String>::from(a.category.clone()) {
            attrs.push(("category", c));
        }
        w.empty("Actor", attrs);
    }

    for (i, uc) in ast.use_cases.iter().enumerate() {
        write_use_case(&mut w, &ids, i, uc);
    }

    w.end("Model");
    w.end("xmi:XMI");
    w.out
}

fn write_use_case(w: &mut Writer, ids: &Ids<'_>, index: usize, uc: &UseCaseAst) {
    let id = format!("usecase-{index}");
    let tag = if uc.is_handler { "Handler" } else { "UseCase" };
    let actor_refs = |list: &[ActorRef]| {
        list.iter()
            .map(|a| ids.actors[&a.qualified_name()].clone())
            .collect::<Vec<_>>()
            .join(" ")
    };
    let mut attrs: Attrs<'_> = vec![("xmi:id", id.clone()), ("name", uc.name.text.clone())];
    let optional = [
        ("scope", uc.scope.clone()),
        ("level", uc.level.map(|l| l.keyword().to_string())),
        ("intention", uc.intention.clone()),
        ("multiplicity", uc.multiplicity.clone()),
        ("precondition", uc.precondition.clone()),
        ("postcondition", uc.postcondition.clone()),
    ];
    attrs.extend(optional.into_iter().filter_map(|(k, v)| v.map(|v| (k, v))));
    for (k, list) in [
        ("primary", &uc.primary_actors),
        ("secondary", &uc.secondary_actors),
        ("facilitator", &uc.facilitator_actors),
    ] {
        if !list.is_empty() {
            attrs.push((k, actor_refs(list)));
        }
    }
    w.start(tag, attrs);

    for (n, ctx) in uc.handler_contexts.iter().enumerate() {
        let mut attrs: Attrs<'_> = vec![("xmi:id", format!("{id}-context-{n}"))];
        if let Some(target) = ids.use_case(&ctx.use_case) {
            attrs.push(("useCase", target));
        }
        if let Some(e) = ids.m.exception_index(&ctx.exception) {
            attrs.push(("exception", format!("exception-{e}")));
        }
        attrs.push(("useCaseName", ctx.use_case.text.clone()));
        attrs.push(("exceptionName", ctx.exception.to_string()));
        attrs.push(("relation", ctx.relation.keyword().into()));
        w.empty("Context", attrs);
    }

    // Step ids are positional; labels map to the first step carrying them.
    let steps = uc.steps();
    let mut step_ids: BTreeMap<&StepLabel, String> = BTreeMap::new();
    for (n, s) in steps.iter().enumerate() {
        step_ids
            .entry(&s.label)
            .or_insert_with(|| format!("{id}-step-{n}"));
    }
    let mut ctx = StepCtx {
        ids,
        prefix: id.clone(),
        step_ids: &step_ids,
        next_step: 0,
        next_block: 0,
    };

    if let Some(main) = &uc.main {
        write_scenario(w, &mut ctx, main);
    }
    for block in &uc.extensions {
        write_block(w, &mut ctx, block);
    }
    w.end(tag);
}

struct StepCtx<'a, 'm> {
    ids: &'a Ids<'m>,
    prefix: String,
    step_ids: &'a BTreeMap<&'a StepLabel, String>,
    next_step: usize,
    next_block: usize,
}

impl StepCtx<'_, '_> {
    fn label_ref(&self, label: &StepLabel) -> Option<String> {
        self.step_ids.get(label).cloned()
    }
}

fn mode_attrs<'a>(ctx: &StepCtx<'_, '_>, entry: &Option<Ident>, exit: &Option<Ident>) -> Attrs<'a> {
    let mut attrs = Vec::new();
    for (k, name_key, mode) in [
        ("entryMode", "entryModeName", entry),
        ("exitMode", "exitModeName", exit),
    ] {
        if let Some(mode) = mode {
            if let Some(id) = ctx.ids.mode(mode) {
                attrs.push((k, id));
            }
            attrs.push((name_key, mode.text.clone()));
        }
    }
    attrs
}

fn outcome_attrs<'a>(ctx: &StepCtx<'_, '_>, outcome: &Outcome) -> Attrs<'a> {
    let mut attrs = vec![("outcome", outcome.keyword().to_string())];
    if let Outcome::Continue(target) = outcome {
        attrs.push(("continueLabel", target.label.to_string()));
        if let Some(id) = ctx.label_ref(&target.label) {
            attrs.push(("continueTo", id));
        }
    }
    attrs
}

fn write_scenario(w: &mut Writer, ctx: &mut StepCtx<'_, '_>, main: &Scenario) {
    let mut attrs = vec![("xmi:id", format!("{}-main", ctx.prefix))];
    attrs.extend(mode_attrs(
        ctx,
        &main.entry_mode_switch,
        &main.exit_mode_switch,
    ));
    attrs.extend(outcome_attrs(ctx, &main.outcome));
    w.start("MainScenario", attrs);
    for step in &main.steps {
        write_step(w, ctx, step);
    }
    w.end("MainScenario");
}

fn write_block(w: &mut Writer, ctx: &mut StepCtx<'_, '_>, block: &ExtensionBlock) {
    let id = format!("{}-block-{}", ctx.prefix, ctx.next_block);
    ctx.next_block += 1;
    let mut attrs = vec![
        ("xmi:id", id),
        ("label", block.label.to_string()),
        (
            "kind",
            match block.kind {
                crate::syntax::BlockKind::Alternative => "alternative",
                crate::syntax::BlockKind::Exceptional => "exceptional",
            }
            .to_string(),
        ),
    ];
    if let Some(guard) = &block.guard {
        attrs.push(("guard", guard.clone()));
    }
    if let Some(anchor) = block.label.anchor() {
        let extends: Vec<String> = anchor
            .expand_range()
            .iter()
            .filter_map(|l| ctx.label_ref(l))
            .collect();
        attrs.push(("extends", extends.join(" ")));
    }
    attrs.extend(mode_attrs(
        ctx,
        &block.entry_mode_switch,
        &block.exit_mode_switch,
    ));
    attrs.extend(outcome_attrs(ctx, &block.outcome));
    w.start("ExtensionBlock", attrs);
    for item in &block.body {
        match item {
            BlockItem::Step(s) => write_step(w, ctx, s),
            BlockItem::Block(b) => write_block(w, ctx, b),
        }
    }
    w.end("ExtensionBlock");
}

fn endpoint(e: &Endpoint) -> String {
    e.name().to_string()
}

fn write_step(w: &mut Writer, ctx: &mut StepCtx<'_, '_>, step: &Step) {
    let id = format!("{}-step-{}", ctx.prefix, ctx.next_step);
    ctx.next_step += 1;
    let mut attrs = vec![
        ("xmi:id", id),
        ("label", step.label.to_string()),
        ("kind", step.kind.name().to_string()),
    ];
    match &step.kind {
        StepKind::Interaction {
            source,
            target,
            message,
        } => {
            attrs.push(("source", endpoint(source)));
            attrs.push(("target", endpoint(target)));
            attrs.push(("message", message.clone()));
        }
        StepKind::Invocation { target } => {
            attrs.push(("useCaseName", target.text.clone()));
            if let Some(id) = ctx.ids.use_case(target) {
                attrs.push(("invokes", id));
            }
        }
        StepKind::Condition { text } => attrs.push(("text", text.clone())),
        StepKind::Internal {
            description,
            timeout,
        } => {
            attrs.push(("description", description.clone()));
            if let Some(t) = timeout {
                attrs.push(("timeout", format!("{} {}", t.amount, t.unit.keyword())));
            }
        }
        StepKind::Goto { target } => {
            attrs.push(("targetLabel", target.label.to_string()));
            if let Some(id) = ctx.label_ref(&target.label) {
                attrs.push(("goesTo", id));
            }
        }
        StepKind::Repeat { from, to } => {
            attrs.push(("fromLabel", from.label.to_string()));
            attrs.push(("toLabel", to.label.to_string()));
            if let (Some(a), Some(b)) = (ctx.label_ref(&from.label), ctx.label_ref(&to.label)) {
                attrs.push(("repeats", format!("{a} {b}")));
            }
        }
        StepKind::Raise { exception } => {
            attrs.push(("exceptionName", exception.to_string()));
            if let Some(e) = ctx.ids.m.exception_index(exception) {
                attrs.push(("raises", format!("exception-{e}")));
            }
        }
    }
    w.empty("Step", attrs);
}
