//! Compiler and static analyzer for UCM4IoT textual use-case models.
//!
//! The pipeline is `parse` → `resolve` → `validate`, after which the
//! `analysis` module produces exception, handler, and mode tables and the
//! `export` module serializes models and tables. [`compile`] runs the whole
//! front end in one call.

pub mod analysis;
pub mod diagnostic;
pub mod export;
pub mod model;
pub mod syntax;
pub mod validation;

use std::path::Path;

pub use diagnostic::{Code, Diagnostic, Severity};
pub use model::{resolve, ResolvedModel};
pub use syntax::{parse, parse_file, AstModel, SourceSpan, StepLabel};
pub use validation::validate;

/// Result of running parse, resolve, validate, and the cycle check.
#[derive(Debug, Clone)]
pub struct Compilation {
    /// `None` only when parsing failed.
    pub model: Option<ResolvedModel>,
    /// All diagnostics, sorted.
    pub diagnostics: Vec<Diagnostic>,
}

impl Compilation {
    pub fn has_errors(&self) -> bool {
        diagnostic::has_errors(&self.diagnostics)
    }

    pub fn has_warnings(&self) -> bool {
        self.diagnostics.iter().any(|d| !d.is_error())
    }

    /// True when references are unresolved or invocations are cyclic, so
    /// that generated tables would be meaningless.
    pub fn blocks_analysis(&self) -> bool {
        self.model.is_none()
            || self.diagnostics.iter().any(|d| {
                matches!(
                    d.code,
                    Code::E003 | Code::E004 | Code::E012 | Code::E013 | Code::E014 | Code::E015
                )
            })
    }
}

pub fn compile(source: &str, file: &Path) -> Compilation {
    let (ast, mut diagnostics) = parse(source, file);
    let Some(ast) = ast else {
        return Compilation {
            model: None,
            diagnostics,
        };
    };
    let (model, resolution) = resolve(ast);
    diagnostics.extend(resolution);
    diagnostics.extend(validate(&model));
    diagnostics.extend(analysis::check_cycles(&model));
    diagnostic::sort_diagnostics(&mut diagnostics);
    Compilation {
        model: Some(model),
        diagnostics,
    }
}
