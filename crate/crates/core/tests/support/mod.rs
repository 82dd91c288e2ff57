//! Fixtures and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use ucm_core::{compile, Code, Compilation};

pub const SMARTSTORE: &str = include_str!(concat!(
    env!("CARGO_MANIFEST_DIR"),
    "/../../corpus/smartstore.ucm"
));
pub const FIREALARM: &str = include_str!(concat!(
    env!("CARGO_MANIFEST_DIR"),
    "/../../corpus/firealarm.ucm"
));

pub fn compile_corpus(name: &str, source: &str) -> Compilation {
    compile(source, Path::new(name))
}

/// Counts `A -> B :` steps outside handler blocks by scanning the text,
/// without going through the parser.
pub fn count_interactions_textually(source: &str) -> usize {
    let mut in_handler = false;
    let mut count = 0;
    for line in source.lines() {
        let trimmed = line.trim_start();
        if trimmed.starts_with("usecase ") {
            in_handler = false;
        } else if trimmed.starts_with("handler ") {
            in_handler = true;
        }
        if in_handler || !trimmed.starts_with(|c: char| c.is_ascii_digit()) {
            continue;
        }
        let Some((_, rest)) = trimmed.split_once(". ") else {
            continue;
        };
        let words: Vec<&str> = rest.split_whitespace().collect();
        if words.len() >= 4 && words[1] == "->" && words[3] == ":" {
            count += 1;
        }
    }
    count
}

/// The clean model every mutation starts from. It compiles with no
/// diagnostics at all.
pub const MUTATION_BASE: &str = r#"model Kiosk

modes {
  default normal Normal offers Sales
  emergency Evacuation offers Sales
}

exceptions {
  exception HardwareException::Jam
  exception EnvironmentException::Smoke global
}

services {
  service Sales provides Buy, Pay
}

usecase Buy {
  scope: "Kiosk"
  level: user-goal
  intention: "Customer buys an item"
  multiplicity: "One customer at a time"
  primary: Human::Customer[1..1]
  secondary: Sensor::Scanner
  main {
    1. Customer -> System : "selects an item"
    2. System -> Scanner : "scans the item"
    3. invoke Pay
    outcome success
  }
  extensions {
    block 2a exceptional when "the scanner jams" {
      2a1. raise HardwareException::Jam
      outcome continue 3
    }
    block 1-3a exceptional when "smoke is detected" {
      mode switch: Evacuation
      1-3a1. raise EnvironmentException::Smoke
      outcome failure
    }
  }
}

usecase Pay {
  scope: "Kiosk"
  level: sub-function
  intention: "Customer pays for the item"
  multiplicity: "One payment at a time"
  primary: Human::Customer
  main {
    1. Customer -> System : "taps a card"
    2. System -> Customer : "prints a receipt"
    outcome success
  }
}

handler Unjam {
  scope: "Kiosk"
  level: sub-function
  intention: "The scanner is cleared"
  multiplicity: "One at a time"
  primary: Human::Clerk
  contexts: Buy on HardwareException::Jam interrupt-continue
  main {
    1. System -> Clerk : "asks to clear the scanner"
    outcome success
  }
}

handler Evacuate {
  scope: "Kiosk"
  level: sub-function
  intention: "Everyone leaves"
  multiplicity: "One at a time"
  primary: Human::Customer
  contexts: Buy on EnvironmentException::Smoke interrupt-fail
  main {
    1. System -> Customer : "asks everyone to leave"
    mode switch: Normal
    outcome success
  }
}
"#;

/// One seeded defect: replace `find` (which must occur exactly once) with
/// `replace`; the result must report `code` at the offset of the `^` in
/// `at`, where `at` with the caret removed occurs exactly once in the
/// mutated text.
#[derive(Debug, Clone, Copy)]
pub struct Mutation {
    pub code: Code,
    pub what: &'static str,
    pub find: &'static str,
    pub replace: &'static str,
    pub at: &'static str,
}

impl Mutation {
    pub fn apply(&self) -> String {
        assert_eq!(
            MUTATION_BASE.matches(self.find).count(),
            1,
            "mutation anchor for {:?} must be unique",
            self.code
        );
        MUTATION_BASE.replacen(self.find, self.replace, 1)
    }

    pub fn expected_offset(&self, mutated: &str) -> usize {
        let caret = self.at.find('^').expect("caret in expected location");
        let needle = self.at.replacen('^', "", 1);
        let hits: Vec<usize> = mutated.match_indices(&needle).map(|(i, _)| i).collect();
        assert_eq!(hits.len(), 1, "expected location `{needle}` must be unique");
        hits[0] + caret
    }
}

pub const MUTATIONS: &[Mutation] = &[
    Mutation {
        code: Code::E000,
        what: "missing colon before an interaction message",
        find: r#"Scanner : "scans the item""#,
        replace: r#"Scanner "scans the item""#,
        at: r#"Scanner ^"scans the item""#,
    },
    Mutation {
        code: Code::E001,
        what: "use case without a scope",
        find: "  scope: \"Kiosk\"\n  level: user-goal\n",
        replace: "  level: user-goal\n",
        at: "usecase ^Buy {",
    },
    Mutation {
        code: Code::E002,
        what: "step numbering skips a number",
        find: "3. invoke Pay",
        replace: "4. invoke Pay",
        at: "^4. invoke Pay",
    },
    Mutation {
        code: Code::E003,
        what: "invocation of an undefined use case",
        find: "3. invoke Pay",
        replace: "3. invoke Payment",
        at: "invoke ^Payment",
    },
    Mutation {
        code: Code::E004,
        what: "raise of an undeclared exception",
        find: "2a1. raise HardwareException::Jam",
        replace: "2a1. raise HardwareException::Jammed",
        at: "raise ^HardwareException::Jammed",
    },
    Mutation {
        code: Code::E005,
        what: "actor with an unknown category",
        find: "secondary: Sensor::Scanner",
        replace: "secondary: Gadget::Scanner",
        at: "secondary: ^Gadget::Scanner",
    },
    Mutation {
        code: Code::E006,
        what: "multiplicity with lower bound above upper bound",
        find: "[1..1]",
        replace: "[3..1]",
        at: "primary: ^Human::Customer[3..1]",
    },
    Mutation {
        code: Code::E007,
        what: "handler context that cannot raise the exception",
        find: "contexts: Buy on HardwareException::Jam",
        replace: "contexts: Pay on HardwareException::Jam",
        at: "contexts: ^Pay on HardwareException::Jam",
    },
    Mutation {
        code: Code::E008,
        what: "exceptional block raising two exceptions",
        find: "      2a1. raise HardwareException::Jam\n",
        replace: "      2a1. raise HardwareException::Jam\n      2a2. raise EnvironmentException::Smoke\n",
        at: "block ^2a exceptional",
    },
    Mutation {
        code: Code::E009,
        what: "continue after an exception nobody handles",
        find: "contexts: Buy on HardwareException::Jam interrupt-continue",
        replace: "contexts: Buy on EnvironmentException::Smoke interrupt-continue",
        at: "^outcome continue 3",
    },
    Mutation {
        code: Code::E010,
        what: "interaction between two actors",
        find: r#"1. Customer -> System : "selects an item""#,
        replace: r#"1. Customer -> Scanner : "selects an item""#,
        at: "^1. Customer -> Scanner",
    },
    Mutation {
        code: Code::E011,
        what: "main scenario not ending in success",
        find: "    3. invoke Pay\n    outcome success",
        replace: "    3. invoke Pay\n    outcome abandoned",
        at: "^outcome abandoned",
    },
    Mutation {
        code: Code::E012,
        what: "continue at a step that does not exist",
        find: "outcome continue 3",
        replace: "outcome continue 7",
        at: "continue ^7",
    },
    Mutation {
        code: Code::E013,
        what: "switch to an undeclared mode",
        find: "mode switch: Evacuation",
        replace: "mode switch: Lockdown",
        at: "mode switch: ^Lockdown",
    },
    Mutation {
        code: Code::E014,
        what: "use case defined twice",
        find: "handler Unjam {",
        replace: "usecase Pay {\n  main {\n    outcome success\n  }\n}\n\nhandler Unjam {",
        at: "usecase ^Pay {\n  main",
    },
    Mutation {
        code: Code::E015,
        what: "invocation cycle",
        find: "    2. System -> Customer : \"prints a receipt\"\n",
        replace: "    2. System -> Customer : \"prints a receipt\"\n    3. invoke Buy\n",
        at: "^3. invoke Buy",
    },
    Mutation {
        code: Code::W001,
        what: "exception raised but never handled",
        find: "contexts: Buy on HardwareException::Jam interrupt-continue",
        replace: "contexts: Buy on EnvironmentException::Smoke interrupt-continue",
        at: "2a1. raise ^HardwareException::Jam",
    },
    Mutation {
        code: Code::W002,
        what: "declared exception never raised",
        find: "  exception HardwareException::Jam\n",
        replace: "  exception HardwareException::Jam\n  exception NetworkException::Offline\n",
        at: "^exception NetworkException::Offline",
    },
    Mutation {
        code: Code::W003,
        what: "mode nothing switches to",
        find: "      mode switch: Evacuation\n",
        replace: "",
        at: "emergency ^Evacuation",
    },
];

/// Outcome of checking one mutation: `Ok` or a description of the miss.
pub fn check_mutation(m: &Mutation) -> Result<(), String> {
    let mutated = m.apply();
    let expected = m.expected_offset(&mutated);
    let result = compile(&mutated, Path::new("mutant.ucm"));
    let hit = result
        .diagnostics
        .iter()
        .any(|d| d.code == m.code && d.span.start == expected);
    if hit {
        Ok(())
    } else {
        let got: Vec<String> = result
            .diagnostics
            .iter()
            .map(|d| format!("{:?}@{}..{}", d.code, d.span.start, d.span.end))
            .collect();
        Err(format!(
            "{:?} ({}): expected at offset {expected}, got [{}]",
            m.code,
            m.what,
            got.join(", ")
        ))
    }
}

/// Random DAG over nodes `n0..nk`, possibly with parallel edges. Edges
/// always go from a lower to a higher position in a shuffled order.
pub fn random_dag(rng: &mut impl Rng) -> (Vec<String>, Vec<(usize, usize)>) {
    let n = rng.gen_range(1..=12);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges = Vec::new();
    if n > 1 {
        for _ in 0..rng.gen_range(0..=20) {
            let i = rng.gen_range(0..n - 1);
            let j = rng.gen_range(i + 1..n);
            edges.push((order[i], order[j]));
        }
    }
    ((0..n).map(|i| format!("n{i}")).collect(), edges)
}

/// Every simple path from a node without predecessors to `target`, one per
/// distinct edge sequence, found by exhaustive forward search.
pub fn brute_force_paths(
    nodes: &[String],
    edges: &[(usize, usize)],
    target: usize,
) -> Vec<Vec<String>> {
    let mut succ: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut has_pred = vec![false; nodes.len()];
    for &(a, b) in edges {
        succ.entry(a).or_default().push(b);
        has_pred[b] = true;
    }
    fn search(
        v: usize,
        target: usize,
        succ: &BTreeMap<usize, Vec<usize>>,
        path: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if v == target {
            out.push(path.clone());
            return;
        }
        for &w in succ.get(&v).into_iter().flatten() {
            if path.contains(&w) {
                continue;
            }
            path.push(w);
            search(w, target, succ, path, out);
            path.pop();
        }
    }
    let mut found = Vec::new();
    for root in (0..nodes.len()).filter(|&v| !has_pred[v]) {
        search(root, target, &succ, &mut vec![root], &mut found);
    }
    let mut named: Vec<Vec<String>> = found
        .into_iter()
        .map(|p| p.into_iter().map(|v| nodes[v].clone()).collect())
        .collect();
    named.sort();
    named
}
