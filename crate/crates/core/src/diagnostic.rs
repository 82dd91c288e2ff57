//! Diagnostics with stable codes.
//!
//! Every check in the crate reports through [`Diagnostic`]. Codes are part of
//! the public contract: scripts and tests match on them, so a code is never
//! renumbered or reused for a different rule.

use std::fmt;
use std::fmt::Write as _;

use serde::Serialize;

use crate::syntax::span::{normalize_newlines, LineIndex, SourceSpan};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

macro_rules! codes {
    ($($variant:ident => $text:literal, $summary:literal;)*) => {
        /// The diagnostic code catalog.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum Code {
            $($variant,)*
        }

        impl Code {
            pub const ALL: &'static [Code] = &[$(Code::$variant,)*];

            pub fn as_str(self) -> &'static str {
                match self {
                    $(Code::$variant => $text,)*
                }
            }

            /// One-line description of the rule behind the code.
            pub fn summary(self) -> &'static str {
                match self {
                    $(Code::$variant => $summary,)*
                }
            }
        }
    };
}

codes! {
    E000 => "E000", "syntax error";
    E001 => "E001", "missing mandatory clause";
    E002 => "E002", "step label out of order";
    E003 => "E003", "unresolved use case reference";
    E004 => "E004", "exception not defined in the header";
    E005 => "E005", "actor has a missing or unknown type";
    E006 => "E006", "multiplicity lower bound exceeds upper bound";
    E007 => "E007", "handled exception does not occur in the context use case";
    E008 => "E008", "exceptional block must raise exactly one exception";
    E009 => "E009", "exceptional block continues but the exception is never handled";
    E010 => "E010", "interaction must connect the System with a declared actor";
    E011 => "E011", "main success scenario must end in success";
    E012 => "E012", "unresolved step reference";
    E013 => "E013", "unresolved mode or service name";
    E014 => "E014", "duplicate definition";
    E015 => "E015", "use case invocation cycle";
    W001 => "W001", "raised exception is never handled";
    W002 => "W002", "declared exception is never raised";
    W003 => "W003", "mode is never switched to";
}

impl Code {
    pub fn severity(self) -> Severity {
        if self.as_str().starts_with('E') {
            Severity::Error
        } else {
            Severity::Warning
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for Code {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Related {
    pub span: SourceSpan,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub code: Code,
    pub message: String,
    pub span: SourceSpan,
    pub related: Vec<Related>,
    pub suggestions: Vec<String>,
}

impl Diagnostic {
    pub fn new(code: Code, span: SourceSpan, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
            span,
            related: Vec::new(),
            suggestions: Vec::new(),
        }
    }

    pub fn severity(&self) -> Severity {
        self.code.severity()
    }

    pub fn is_error(&self) -> bool {
        self.severity() == Severity::Error
    }

    pub fn with_suggestions<I, S>(mut self, suggestions: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.suggestions
            .extend(suggestions.into_iter().map(Into::into));
        self
    }

    pub fn with_related(mut self, span: SourceSpan, note: impl Into<String>) -> Self {
        self.related.push(Related {
            span,
            note: note.into(),
        });
        self
    }

    /// Ordering key used wherever diagnostic lists are sorted.
    pub fn sort_key(&self) -> (&std::path::Path, usize, Code) {
        (&self.span.file, self.span.start, self.code)
    }

    /// Renders the diagnostic with a source excerpt:
    ///
    /// ```text
    /// store.ucm:12:5: error[E004]: exception `X` is not defined in the header
    ///    |
    /// 12 | 3a1. raise HardwareException::X
    ///    |      ^^^^^
    ///    = help: ...
    /// ```
    pub fn render(&self, source: &str) -> String {
        let source = normalize_newlines(source);
        let index = LineIndex::new(&source);
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{}: {}[{}]: {}",
            self.span,
            self.code.severity(),
            self.code,
            self.message
        );
        excerpt(&mut out, &index, &self.span);
        for related in &self.related {
            let _ = writeln!(out, "   = note: {}: {}", related.span, related.note);
        }
        for suggestion in &self.suggestions {
            let _ = writeln!(out, "   = help: {suggestion}");
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "code": self.code,
            "severity": self.severity(),
            "message": self.message,
            "file": self.span.file.display().to_string(),
            "line": self.span.line,
            "column": self.span.column,
            "startOffset": self.span.start,
            "endOffset": self.span.end,
            "related": self.related.iter().map(|r| serde_json::json!({
                "file": r.span.file.display().to_string(),
                "line": r.span.line,
                "column": r.span.column,
                "note": r.note,
            })).collect::<Vec<_>>(),
            "suggestions": self.suggestions,
        })
    }
}

fn excerpt(out: &mut String, index: &LineIndex<'_>, span: &SourceSpan) {
    let Some(text) = index.line_text(span.line) else {
        return;
    };
    let gutter = span.line.to_string().len();
    let pad = " ".repeat(gutter);
    let line_chars = text.chars().count();
    let col = span.column.saturating_sub(1).min(line_chars);
    // Only underline within the first line of a multi-line span.
    let width = span.len().min(line_chars.saturating_sub(col)).max(1);
    let _ = writeln!(out, "{pad} |");
    let _ = writeln!(out, "{} | {}", span.line, text);
    let _ = writeln!(out, "{pad} | {}{}", " ".repeat(col), "^".repeat(width));
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {}[{}]: {}",
            self.span,
            self.severity(),
            self.code,
            self.message
        )
    }
}

/// Sorts diagnostics by (file, start offset, code) and drops exact duplicates.
pub fn sort_diagnostics(diagnostics: &mut Vec<Diagnostic>) {
    diagnostics.sort_by(|a, b| {
        a.sort_key()
            .cmp(&b.sort_key())
            .then_with(|| a.message.cmp(&b.message))
    });
    diagnostics.dedup();
}

pub fn has_errors(diagnostics: &[Diagnostic]) -> bool {
    diagnostics.iter().any(Diagnostic::is_error)
}
