use std::path::Path;

use super::*;
use crate::compile;
use crate::Code;

fn model(src: &str) -> crate::ResolvedModel {
    let c = compile(src, Path::new("a.ucm"));
    c.model.expect("parses")
}

fn chain(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn graph(nodes: &[&str], edges: &[(&str, &str, &str)]) -> InvocationGraph {
    InvocationGraph::new(
        nodes.iter().map(|s| s.to_string()),
        edges
            .iter()
            .map(|(a, b, l)| (a.to_string(), b.to_string(), l.parse().unwrap())),
    )
}

#[test]
fn roots_and_trivial_paths() {
    let g = graph(&["A", "B"], &[]);
    assert_eq!(g.roots(), ["A", "B"]);
    let p = enumerate_paths(&g, "A").unwrap();
    assert_eq!(p.len(), 1);
    assert_eq!(p[0].use_cases, chain(&["A"]));
    assert!(p[0].via.is_empty());
}

#[test]
fn parallel_edges_give_separate_paths() {
    let g = graph(&["A", "B"], &[("A", "B", "2"), ("A", "B", "5")]);
    let p = enumerate_paths(&g, "B").unwrap();
    assert_eq!(p.len(), 2);
    assert_eq!(p[0].via[0].to_string(), "2");
    assert_eq!(p[1].via[0].to_string(), "5");
}

#[test]
fn diamond_paths_sorted() {
    let g = graph(
        &["R", "X", "A", "T"],
        &[
            ("R", "X", "1"),
            ("R", "A", "2"),
            ("X", "T", "1"),
            ("A", "T", "1"),
            ("R", "T", "3"),
        ],
    );
    let p: Vec<_> = enumerate_paths(&g, "T")
        .unwrap()
        .into_iter()
        .map(|p| p.to_string())
        .collect();
    assert_eq!(p, ["R -> A -> T", "R -> T", "R -> X -> T"]);
    assert_eq!(g.paths_between("X", "T").unwrap().len(), 1);
    assert!(g.paths_between("A", "X").unwrap().is_empty());
}

#[test]
fn cycles_are_reported() {
    let g = graph(
        &["A", "B", "C"],
        &[("A", "B", "1"), ("B", "C", "1"), ("C", "B", "1")],
    );
    let Err(AnalysisError::Cycle { witness, .. }) = enumerate_paths(&g, "C") else {
        panic!("expected a cycle");
    };
    assert_eq!(witness, chain(&["B", "C", "B"]));
    let selfloop = graph(&["A"], &[("A", "A", "1")]);
    assert!(selfloop.find_cycle().is_some());
}

#[test]
fn unknown_target() {
    let g = graph(&["A"], &[]);
    assert_eq!(
        enumerate_paths(&g, "Z"),
        Err(AnalysisError::UnknownUseCase("Z".into()))
    );
}

const SHOP: &str = r#"model Shop
modes {
  default normal Normal offers Selling
  emergency Fire
}
exceptions {
  exception HardwareException::Jam
  exception EnvironmentException::Smoke global
}
services { service Selling provides Top }
usecase Top {
  main {
    1. invoke Mid
    2. invoke Leaf
    outcome success
  }
  extensions {
    block 1a exceptional when "smoke seen" {
      mode switch: Fire
      1a1. raise EnvironmentException::Smoke
      outcome failure
    }
  }
}
usecase Mid { main { 1. invoke Leaf outcome success } }
usecase Leaf {
  primary: Human::Clerk
  main { 1. Clerk -> System : "scan" outcome success }
  extensions {
    block 1a exceptional when "scanner jammed" {
      1a1. System -> Clerk : "beep"
      1a2. raise HardwareException::Jam
      outcome failure
    }
  }
}
handler Fix {
  primary: Human::Tech, Human::Clerk
  contexts: Top on HardwareException::Jam interrupt-fail, Leaf on HardwareException::Jam interrupt-fail
  main { 1. Tech -> System : "fix" outcome success }
}
handler Evacuate {
  contexts: Top on EnvironmentException::Smoke interrupt-fail
  main { 1. internal "leave" mode switch: Normal outcome success }
}
"#;

#[test]
fn global_exception_summary() {
    let m = model(SHOP);
    let rows = exception_summary(&m, &SummaryView::Global).unwrap();
    assert_eq!(rows.len(), 2);
    let jam = &rows[0];
    assert_eq!(jam.exception, "HardwareException::Jam");
    assert_eq!(jam.source_use_case, "Leaf");
    assert_eq!(jam.handlers, ["Fix"]);
    assert_eq!(jam.situation, "scanner jammed");
    assert_eq!(jam.participating_actors, ["Clerk"]);
    let paths: Vec<_> = jam.paths.iter().map(|p| p.to_string()).collect();
    assert_eq!(paths, ["Top -> Leaf", "Top -> Mid -> Leaf"]);

    let smoke = &rows[1];
    assert!(smoke.is_global);
    assert_eq!(smoke.source_use_case, GLOBAL_SOURCE);
    assert_eq!(smoke.handlers, ["Evacuate"]);
    assert_eq!(smoke.situation, "smoke seen");
    assert!(smoke.paths.is_empty());
}

#[test]
fn use_case_view_reroots_paths() {
    let m = model(SHOP);
    let rows = exception_summary(&m, &SummaryView::UseCase("Mid".into())).unwrap();
    assert_eq!(rows[0].paths.len(), 1);
    assert_eq!(rows[0].paths[0].use_cases, chain(&["Mid", "Leaf"]));
    let leaf = exception_summary(&m, &SummaryView::UseCase("Leaf".into())).unwrap();
    assert_eq!(leaf[0].paths[0].use_cases, chain(&["Leaf"]));
    assert!(exception_summary(&m, &SummaryView::UseCase("Fix".into())).is_err());
}

#[test]
fn handler_rows() {
    let m = model(SHOP);
    let rows = handler_summary(&m).unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0].handler, "Fix");
    assert_eq!(rows[0].dependent_use_cases, chain(&["Top", "Leaf"]));
    assert_eq!(rows[0].handled_exceptions, ["HardwareException::Jam"]);
    assert_eq!(rows[0].actors, ["Tech*", "Clerk"]);
    // One occurrence, two paths, counted once despite two contexts.
    assert_eq!(rows[0].total_invocation_paths, 2);
    assert_eq!(rows[1].total_invocation_paths, 0);
}

#[test]
fn mode_tables() {
    let m = model(SHOP);
    let switches = mode_switch_table(&m);
    let shown: Vec<_> = switches
        .iter()
        .map(|r| {
            format!(
                "{} {} {}->{}",
                r.use_case, r.location, r.from_mode, r.to_mode
            )
        })
        .collect();
    assert_eq!(
        shown,
        [
            "Top block 1a begin Normal->Fire",
            "Evacuate main end Fire->Normal"
        ]
    );
    let services = mode_service_table(&m);
    assert_eq!(services.len(), 2);
    assert_eq!(services[0].services, ["Selling"]);
    assert_eq!(services[1].kind, "emergency");
    assert!(services[1].services.is_empty());
}

#[test]
fn cycle_diagnostic_from_model() {
    let src = "model M modes { } exceptions { }
usecase A { main { 1. invoke B outcome success } }
usecase B { main { 1. invoke A outcome success } }";
    let c = compile(src, Path::new("a.ucm"));
    let e015: Vec<_> = c
        .diagnostics
        .iter()
        .filter(|d| d.code == Code::E015)
        .collect();
    assert_eq!(e015.len(), 1);
    assert_eq!(e015[0].span.line, 3);
    assert!(c.blocks_analysis());
}
