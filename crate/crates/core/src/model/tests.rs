use std::path::Path;

use super::*;
use crate::diagnostic::Code;
use crate::syntax::parse;

fn resolved(src: &str) -> (ResolvedModel, Vec<crate::Diagnostic>) {
    let (ast, diags) = parse(src, Path::new("t.ucm"));
    assert!(diags.is_empty(), "{diags:#?}");
    resolve(ast.unwrap())
}

fn codes(diags: &[crate::Diagnostic]) -> Vec<Code> {
    diags.iter().map(|d| d.code).collect()
}

const HEADER: &str = "model M modes { default normal Normal } exceptions {\n  exception HardwareException::EntryFailure\n}\n";

#[test]
fn binds_declared_exception() {
    let src = format!(
        "{HEADER}usecase U {{ main {{ 1. raise HardwareException::EntryFailure outcome success }} }}"
    );
    let (model, diags) = resolved(&src);
    assert!(diags.is_empty(), "{diags:#?}");
    let b: Vec<_> = model.bindings_of(RefKind::RaisedException).collect();
    assert_eq!(b.len(), 1);
    assert_eq!(b[0].target, Target::Exception(0));
    assert_eq!(b[0].name, "HardwareException::EntryFailure");
}

#[test]
fn wrong_category_suggests_declared_one() {
    let src = format!(
        "{HEADER}usecase U {{ main {{ 1. raise SoftwareException::EntryFailure outcome success }} }}"
    );
    let (_, diags) = resolved(&src);
    assert_eq!(codes(&diags), [Code::E004]);
    assert_eq!(diags[0].suggestions, ["HardwareException::EntryFailure"]);
}

#[test]
fn unknown_invocation_is_e003() {
    let src = format!("{HEADER}usecase U {{ main {{ 1. invoke NoSuchUC outcome success }} }}");
    let (model, diags) = resolved(&src);
    assert_eq!(codes(&diags), [Code::E003]);
    assert!(diags[0].message.contains("NoSuchUC"));
    assert_eq!(model.bindings_of(RefKind::Invocation).count(), 0);
}

#[test]
fn exception_name_in_two_categories_is_e014() {
    let src = "model M modes { } exceptions {\n exception HardwareException::X\n exception SoftwareException::X\n}";
    let (_, diags) = resolved(src);
    assert_eq!(codes(&diags), [Code::E014]);
    assert_eq!(diags[0].span.line, 3);
}

#[test]
fn duplicate_use_cases_and_actor_categories() {
    let src = format!(
        "{HEADER}usecase U {{ primary: Human::Bob }}\nusecase U {{ }}\nusecase V {{ primary: Device::Bob }}"
    );
    let (model, diags) = resolved(&src);
    assert_eq!(codes(&diags), [Code::E014, Code::E014]);
    assert_eq!(model.use_case_by_name["U"], 0);
    assert_eq!(model.actor_categories["Bob"], ActorCategory::Human);
}

#[test]
fn mode_and_service_names() {
    let src = "model M modes { default normal Normal offers Ghost } exceptions { }\nservices { service S provides Nobody }\nusecase U { main { mode switch: Panic 1. internal \"x\" outcome success } }";
    let (_, diags) = resolved(src);
    assert_eq!(codes(&diags), [Code::E013, Code::E003, Code::E013]);
}

#[test]
fn step_references() {
    let src = format!(
        "{HEADER}usecase U {{ main {{ 1. internal \"a\" 2. goto 7 3. repeat 1-2 outcome success }}
  extensions {{
    block 2-3a alternative {{ 2-3a1. internal \"b\" outcome continue 1 }}
    block 9a alternative {{ 9a1. internal \"c\" outcome failure }}
  }} }}"
    );
    let (model, diags) = resolved(&src);
    assert_eq!(codes(&diags), [Code::E012, Code::E012]);
    assert!(diags[0].message.contains("`7`"));
    assert!(diags[1].message.contains("`9`"));
    assert_eq!(model.bindings_of(RefKind::BlockAnchor).count(), 2);
    assert_eq!(model.bindings_of(RefKind::RepeatBound).count(), 2);
    assert_eq!(model.bindings_of(RefKind::ContinueTarget).count(), 1);
}

#[test]
fn nested_block_anchor_is_checked_against_parent_block() {
    let src = format!(
        "{HEADER}usecase U {{ main {{ 1. internal \"a\" outcome success }}
  extensions {{
    block 1a alternative {{
      1a1. internal \"b\"
      block 1a2a alternative {{ 1a2a1. internal \"c\" outcome failure }}
      outcome failure
    }}
  }} }}"
    );
    let (_, diags) = resolved(&src);
    assert_eq!(codes(&diags), [Code::E012]);
}

#[test]
fn reachability() {
    let src = format!(
        "{HEADER}usecase A {{ main {{ 1. invoke B outcome success }} }}
usecase B {{ main {{ 1. invoke C outcome success }} }}
usecase C {{ main {{ 1. internal \"leaf\" outcome success }} }}"
    );
    let (model, diags) = resolved(&src);
    assert!(diags.is_empty());
    let names = |s: BTreeSet<String>| s.into_iter().collect::<Vec<_>>();
    assert_eq!(names(model.reachable_use_cases("C")), ["C"]);
    assert_eq!(names(model.reachable_use_cases("A")), ["A", "B", "C"]);
    assert!(model.reachable_use_cases("Z").is_empty());
}
