//! Concrete syntax of `.ucm` files: lexer, parser, and the spanned AST.

pub mod ast;
pub mod label;
pub mod lexer;
pub mod parser;
pub mod span;

pub use ast::*;
pub use label::{LabelPart, StepLabel};
pub use parser::{parse, parse_file};
pub use span::SourceSpan;
