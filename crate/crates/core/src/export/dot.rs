use std::collections::BTreeSet;
use std::fmt::Write;

use crate::model::ResolvedModel;
use crate::syntax::{StepKind, UseCaseAst};

fn quote(text: &str) -> String {
    let escaped = text
        .replace('\\', "\\\\")
        .replace('"', "\\\"")
        .replace('\n', "\\n");
    format!("\"{escaped}\"")
}

fn uc_node(name: &str) -> String {
    quote(&format!("uc:{name}"))
}

/// Extended use case diagram: use cases and handlers, actors linked to the
/// use cases declaring them, include edges for invocations, and handler
/// edges labelled with their interrupt relation.
pub fn export_dot(m: &ResolvedModel) -> String {
    let ast = &m.ast;
    let mut out = String::new();
    writeln!(out, "digraph {} {{", quote(&ast.name.text)).unwrap();
    out.push_str("  rankdir=LR;\n");

    let mut seen_nodes = BTreeSet::new();
    for uc in &ast.use_cases {
        if !seen_nodes.insert(uc.name.as_str()) {
            continue;
        }
        let style = if uc.is_handler { ", style=dashed" } else { "" };
        writeln!(
            out,
            "  {} [label={}, shape=ellipse{style}];",
            uc_node(&uc.name.text),
            quote(&uc.name.text)
        )
        .unwrap();
    }

    let mut actors: Vec<(String, String)> = Vec::new();
    for a in ast.use_cases.iter().flat_map(UseCaseAst::actors) {
        let category = Option::<String>::from(a.category.clone());
        let label = match category {
            Some(c) => format!("{}\n<<{c}>>", a.name),
            None => a.name.text.clone(),
        };
        if !actors.iter().any(|(n, _)| *n == a.name.text) {
            actors.push((a.name.text.clone(), label));
        }
    }
    for (name, label) in &actors {
        writeln!(
            out,
            "  {} [label={}, shape=box];",
            quote(&format!("actor:{name}")),
            quote(label)
        )
        .unwrap();
    }

    let mut edges: Vec<String> = Vec::new();
    let mut push = |edge: String| {
        if !edges.contains(&edge) {
            edges.push(edge);
        }
    };
    for uc in &ast.use_cases {
        for a in uc.actors() {
            push(format!(
                "  {} -> {} [arrowhead=none];",
                quote(&format!("actor:{}", a.name)),
                uc_node(&uc.name.text)
            ));
        }
    }
    for uc in &ast.use_cases {
        for step in uc.steps() {
            if let StepKind::Invocation { target } = &step.kind {
                if m.use_case_by_name.contains_key(&target.text) {
                    push(format!(
                        "  {} -> {} [label=\"<<include>>\", style=dashed];",
                        uc_node(&uc.name.text),
                        uc_node(&target.text)
                    ));
                }
            }
        }
    }
    for h in ast.handlers() {
        for ctx in &h.handler_contexts {
            if m.use_case_by_name.contains_key(&ctx.use_case.text) {
                push(format!(
                    "  {} -> {} [label={}, style=dashed];",
                    uc_node(&h.name.text),
                    uc_node(&ctx.use_case.text),
                    quote(ctx.relation.stereotype())
                ));
            }
        }
    }
    for e in edges {
        out.push_str(&e);
        out.push('\n');
    }
    out.push_str("}\n");
    out
}
