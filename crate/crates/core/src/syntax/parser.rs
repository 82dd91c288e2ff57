//! Recursive descent parser for `.ucm` sources.
//!
//! Parsing is all-or-nothing: the first syntax error aborts and no partial
//! tree is returned.

use std::path::Path;
use std::sync::Arc;

use super::ast::*;
use super::label::StepLabel;
use super::lexer::{tokenize, Token, TokenKind};
use super::span::{normalize_newlines, LineIndex, SourceSpan};
use crate::diagnostic::{Code, Diagnostic};

/// Parses `source` into a model. On failure the returned diagnostics hold a
/// single E000 and no model is produced.
pub fn parse(source: &str, file: &Path) -> (Option<AstModel>, Vec<Diagnostic>) {
    let text = normalize_newlines(source);
    let index = LineIndex::new(&text);
    let file: Arc<Path> = Arc::from(file);
    let tokens = match tokenize(&text) {
        Ok(tokens) => tokens,
        Err(e) => {
            let span = index.span(&file, e.start, e.end);
            return (None, vec![Diagnostic::new(Code::E000, span, e.message)]);
        }
    };
    let mut parser = Parser {
        tokens,
        pos: 0,
        index,
        file,
        expected: Vec::new(),
    };
    match parser.model() {
        Ok(model) => (Some(model), Vec::new()),
        Err(d) => (None, vec![*d]),
    }
}

/// Reads and parses a file. I/O failures are returned as `Err`, separately
/// from syntax diagnostics.
pub fn parse_file(path: &Path) -> std::io::Result<(Option<AstModel>, Vec<Diagnostic>)> {
    let source = std::fs::read_to_string(path)?;
    Ok(parse(&source, path))
}

type PResult<T> = Result<T, Box<Diagnostic>>;

struct Parser<'src> {
    tokens: Vec<Token>,
    pos: usize,
    index: LineIndex<'src>,
    file: Arc<Path>,
    /// Alternatives probed at the current position, for error messages.
    expected: Vec<String>,
}

const STEP_KEYWORDS: &[&str] = &["invoke", "condition", "internal", "goto", "repeat", "raise"];

impl Parser<'_> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn peek_at(&self, n: usize) -> &Token {
        let i = (self.pos + n).min(self.tokens.len() - 1);
        &self.tokens[i]
    }

    fn bump(&mut self) -> Token {
        let tok = self.tokens[self.pos].clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        self.expected.clear();
        tok
    }

    fn prev_end(&self) -> usize {
        if self.pos == 0 {
            0
        } else {
            self.tokens[self.pos - 1].end
        }
    }

    fn span(&self, start: usize, end: usize) -> SourceSpan {
        self.index.span(&self.file, start, end)
    }

    fn tok_span(&self, tok: &Token) -> SourceSpan {
        self.span(tok.start, tok.end)
    }

    /// Span from `start` to the end of the last consumed token.
    fn since(&self, start: usize) -> SourceSpan {
        self.span(start, self.prev_end().max(start))
    }

    fn error<T>(&mut self, expected: &str) -> PResult<T> {
        self.expected.push(expected.to_string());
        let mut expected = std::mem::take(&mut self.expected);
        expected.dedup();
        let tok = self.peek().clone();
        let list = match expected.as_slice() {
            [one] => one.clone(),
            many => format!("one of {}", many.join(", ")),
        };
        Err(Box::new(Diagnostic::new(
            Code::E000,
            self.tok_span(&tok),
            format!("expected {list}, found {}", tok.kind),
        )))
    }

    fn fail<T>(&self, span: SourceSpan, message: impl Into<String>) -> PResult<T> {
        Err(Box::new(Diagnostic::new(Code::E000, span, message)))
    }

    fn at_kw(&mut self, kw: &str) -> bool {
        if matches!(&self.peek().kind, TokenKind::Ident(s) if s == kw) {
            true
        } else {
            self.expected.push(format!("`{kw}`"));
            false
        }
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.at_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<Token> {
        if self.at_kw(kw) {
            Ok(self.bump())
        } else {
            self.error(&format!("`{kw}`"))
        }
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if &self.peek().kind == kind {
            self.bump();
            true
        } else {
            self.expected.push(kind.to_string());
            false
        }
    }

    fn expect(&mut self, kind: &TokenKind) -> PResult<Token> {
        if &self.peek().kind == kind {
            Ok(self.bump())
        } else {
            self.error(&kind.to_string())
        }
    }

    fn ident_token(&mut self, what: &str) -> PResult<(String, SourceSpan)> {
        if let TokenKind::Ident(s) = &self.peek().kind {
            let s = s.clone();
            let tok = self.bump();
            Ok((s, self.tok_span(&tok)))
        } else {
            self.error(what)
        }
    }

    /// A plain name: identifier without hyphens.
    fn name(&mut self, what: &str) -> PResult<Ident> {
        let (text, span) = self.ident_token(what)?;
        if text.contains('-') {
            return self.fail(span, format!("`{text}` is not a valid {what}"));
        }
        Ok(Ident::new(text, span))
    }

    /// One of a fixed set of keywords.
    fn choice<T>(
        &mut self,
        what: &str,
        pick: impl Fn(&str) -> Option<T>,
    ) -> PResult<(T, SourceSpan)> {
        if let TokenKind::Ident(s) = &self.peek().kind {
            if let Some(v) = pick(s) {
                let tok = self.bump();
                return Ok((v, self.tok_span(&tok)));
            }
        }
        self.error(what)
    }

    fn string(&mut self) -> PResult<String> {
        if let TokenKind::Str(s) = &self.peek().kind {
            let s = s.clone();
            self.bump();
            Ok(s)
        } else {
            self.error("string")
        }
    }

    fn integer(&mut self) -> PResult<u32> {
        if let TokenKind::Num(s) = &self.peek().kind {
            if let Ok(n) = s.parse::<u32>() {
                self.bump();
                return Ok(n);
            }
        }
        self.error("integer")
    }

    fn model(&mut self) -> PResult<AstModel> {
        let start = self.peek().start;
        self.expect_kw("model")?;
        let name = self.name("model name")?;

        let modes_start = self.expect_kw("modes")?.start;
        self.expect(&TokenKind::LBrace)?;
        let mut modes = Vec::new();
        while !self.eat(&TokenKind::RBrace) {
            modes.push(self.mode_decl()?);
        }
        let defaults = modes.iter().filter(|m| m.is_default).count();
        if !modes.is_empty() && defaults != 1 {
            let span = self.since(modes_start);
            return self.fail(
                span,
                format!("exactly one mode must be marked `default`, found {defaults}"),
            );
        }

        self.expect_kw("exceptions")?;
        self.expect(&TokenKind::LBrace)?;
        let mut exceptions = Vec::new();
        while !self.eat(&TokenKind::RBrace) {
            exceptions.push(self.exception_decl()?);
        }

        let mut services = Vec::new();
        if self.eat_kw("services") {
            self.expect(&TokenKind::LBrace)?;
            while !self.eat(&TokenKind::RBrace) {
                services.push(self.service_decl()?);
            }
        }

        let mut use_cases = Vec::new();
        loop {
            if self.at_kw("usecase") || self.at_kw("handler") {
                use_cases.push(self.use_case()?);
            } else if self.peek().kind == TokenKind::Eof {
                break;
            } else {
                return self.error("end of file");
            }
        }

        Ok(AstModel {
            name,
            modes,
            exceptions,
            services,
            use_cases,
            span: self.since(start),
        })
    }

    fn mode_decl(&mut self) -> PResult<ModeDecl> {
        let start = self.peek().start;
        let is_default = self.eat_kw("default");
        let (kind, _) = self.choice(
            "mode kind (`normal`, `degraded`, `restricted`, `emergency`)",
            ModeKind::from_keyword,
        )?;
        let name = self.name("mode name")?;
        let mut offered_services = Vec::new();
        if self.eat_kw("offers") {
            offered_services.push(self.name("service name")?);
            while self.eat(&TokenKind::Comma) {
                offered_services.push(self.name("service name")?);
            }
        }
        Ok(ModeDecl {
            name,
            kind,
            is_default,
            offered_services,
            span: self.since(start),
        })
    }

    fn exception_category(&mut self) -> PResult<ExceptionCategory> {
        self.choice("exception category", ExceptionCategory::from_keyword)
            .map(|(c, _)| c)
    }

    fn exception_ref(&mut self) -> PResult<ExceptionRef> {
        let start = self.peek().start;
        let category = self.exception_category()?;
        self.expect(&TokenKind::ColonColon)?;
        let name = self.name("exception name")?;
        Ok(ExceptionRef {
            category,
            name,
            span: self.since(start),
        })
    }

    fn exception_decl(&mut self) -> PResult<ExceptionDef> {
        let start = self.expect_kw("exception")?.start;
        let category = self.exception_category()?;
        self.expect(&TokenKind::ColonColon)?;
        let name = self.name("exception name")?;
        let is_global = self.eat_kw("global");
        Ok(ExceptionDef {
            category,
            name,
            is_global,
            span: self.since(start),
        })
    }

    fn service_decl(&mut self) -> PResult<ServiceDecl> {
        let start = self.expect_kw("service")?.start;
        let name = self.name("service name")?;
        self.expect_kw("provides")?;
        let mut goals = vec![self.name("use case name")?];
        while self.eat(&TokenKind::Comma) {
            goals.push(self.name("use case name")?);
        }
        Ok(ServiceDecl {
            name,
            goals,
            span: self.since(start),
        })
    }

    fn text_clause(&mut self, kw: &str) -> PResult<Option<String>> {
        if self.eat_kw(kw) {
            self.expect(&TokenKind::Colon)?;
            Ok(Some(self.string()?))
        } else {
            Ok(None)
        }
    }

    fn use_case(&mut self) -> PResult<UseCaseAst> {
        let start = self.peek().start;
        let is_handler = if self.eat_kw("handler") {
            true
        } else {
            self.expect_kw("usecase")?;
            false
        };
        let name = self.name("use case name")?;
        self.expect(&TokenKind::LBrace)?;

        let scope = self.text_clause("scope")?;
        let level = if self.eat_kw("level") {
            self.expect(&TokenKind::Colon)?;
            Some(
                self.choice(
                    "level (`summary`, `user-goal`, `sub-function`)",
                    Level::from_keyword,
                )?
                .0,
            )
        } else {
            None
        };
        let intention = self.text_clause("intention")?;
        let multiplicity = self.text_clause("multiplicity")?;

        let mut primary_actors = Vec::new();
        let mut secondary_actors = Vec::new();
        let mut facilitator_actors = Vec::new();
        loop {
            let target = if self.eat_kw("primary") {
                &mut primary_actors
            } else if self.eat_kw("secondary") {
                &mut secondary_actors
            } else if self.eat_kw("facilitator") {
                &mut facilitator_actors
            } else {
                break;
            };
            self.expect(&TokenKind::Colon)?;
            let mut list = vec![self.actor_ref()?];
            while self.eat(&TokenKind::Comma) {
                list.push(self.actor_ref()?);
            }
            target.extend(list);
        }

        let precondition = self.text_clause("precondition")?;
        let postcondition = self.text_clause("postcondition")?;

        let mut handler_contexts = Vec::new();
        if self.at_kw("contexts") {
            let tok = self.bump();
            if !is_handler {
                return self.fail(
                    self.tok_span(&tok),
                    "a `contexts` clause is only allowed in handler use cases",
                );
            }
            self.expect(&TokenKind::Colon)?;
            handler_contexts.push(self.handler_context()?);
            while self.eat(&TokenKind::Comma) {
                handler_contexts.push(self.handler_context()?);
            }
        }

        let main = if self.at_kw("main") {
            Some(self.main_scenario()?)
        } else {
            None
        };

        let mut extensions = Vec::new();
        if self.eat_kw("extensions") {
            self.expect(&TokenKind::LBrace)?;
            while !self.eat(&TokenKind::RBrace) {
                extensions.push(self.block()?);
            }
        }
        self.expect(&TokenKind::RBrace)?;

        Ok(UseCaseAst {
            name,
            is_handler,
            scope,
            level,
            intention,
            multiplicity,
            primary_actors,
            secondary_actors,
            facilitator_actors,
            precondition,
            postcondition,
            handler_contexts,
            main,
            extensions,
            span: self.since(start),
        })
    }

    fn actor_ref(&mut self) -> PResult<ActorRef> {
        let start = self.peek().start;
        let first = self.name("actor")?;
        let (category, name) = if self.eat(&TokenKind::ColonColon) {
            let name = self.name("actor name")?;
            (ActorType::from(Some(first.text)), name)
        } else {
            (ActorType::Missing, first)
        };
        let multiplicity = if self.eat(&TokenKind::LBracket) {
            let lower = self.integer()?;
            self.expect(&TokenKind::DotDot)?;
            let upper = if self.eat(&TokenKind::Star) {
                None
            } else {
                Some(self.integer()?)
            };
            self.expect(&TokenKind::RBracket)?;
            Some(Multiplicity { lower, upper })
        } else {
            None
        };
        Ok(ActorRef {
            category,
            name,
            multiplicity,
            span: self.since(start),
        })
    }

    fn handler_context(&mut self) -> PResult<HandlerContext> {
        let start = self.peek().start;
        let use_case = self.name("use case name")?;
        self.expect_kw("on")?;
        let exception = self.exception_ref()?;
        let (relation, _) =
            self.choice("`interrupt-continue` or `interrupt-fail`", |s| match s {
                "interrupt-continue" => Some(Relation::InterruptContinue),
                "interrupt-fail" => Some(Relation::InterruptFail),
                _ => None,
            })?;
        Ok(HandlerContext {
            use_case,
            exception,
            relation,
            span: self.since(start),
        })
    }

    fn mode_switch(&mut self) -> PResult<Option<Ident>> {
        if !self.eat_kw("mode") {
            return Ok(None);
        }
        self.expect_kw("switch")?;
        self.expect(&TokenKind::Colon)?;
        Ok(Some(self.name("mode name")?))
    }

    fn main_scenario(&mut self) -> PResult<Scenario> {
        let start = self.expect_kw("main")?.start;
        self.expect(&TokenKind::LBrace)?;
        let entry_mode_switch = self.mode_switch()?;
        let mut steps = Vec::new();
        while matches!(self.peek().kind, TokenKind::Num(_)) {
            steps.push(self.step()?);
        }
        self.expected.push("step label".into());
        let exit_mode_switch = self.mode_switch()?;
        let (outcome, outcome_span) = self.outcome()?;
        self.expect(&TokenKind::RBrace)?;
        Ok(Scenario {
            entry_mode_switch,
            steps,
            exit_mode_switch,
            outcome,
            outcome_span,
            span: self.since(start),
        })
    }

    fn block(&mut self) -> PResult<ExtensionBlock> {
        let start = self.expect_kw("block")?.start;
        let (label, label_span) = self.label(true)?;
        if !label.is_block_label() {
            return self.fail(
                label_span,
                format!("block label `{label}` must end with a letter, e.g. `{label}a`"),
            );
        }
        let (kind, _) = self.choice("`alternative` or `exceptional`", |s| match s {
            "alternative" => Some(BlockKind::Alternative),
            "exceptional" => Some(BlockKind::Exceptional),
            _ => None,
        })?;
        let guard = if self.eat_kw("when") {
            Some(self.string()?)
        } else {
            None
        };
        self.expect(&TokenKind::LBrace)?;
        let entry_mode_switch = self.mode_switch()?;
        let mut body = Vec::new();
        loop {
            if matches!(self.peek().kind, TokenKind::Num(_)) {
                body.push(BlockItem::Step(self.step()?));
            } else if self.at_kw("block") {
                body.push(BlockItem::Block(self.block()?));
            } else {
                break;
            }
        }
        self.expected.push("step label".into());
        let exit_mode_switch = self.mode_switch()?;
        let (outcome, outcome_span) = self.outcome()?;
        self.expect(&TokenKind::RBrace)?;
        Ok(ExtensionBlock {
            label,
            kind,
            guard,
            entry_mode_switch,
            body,
            exit_mode_switch,
            outcome,
            label_span,
            outcome_span,
            span: self.since(start),
        })
    }

    fn outcome(&mut self) -> PResult<(Outcome, SourceSpan)> {
        let start = self.expect_kw("outcome")?.start;
        let outcome = if self.eat_kw("success") {
            Outcome::Success
        } else if self.eat_kw("failure") {
            Outcome::Failure
        } else if self.eat_kw("degraded") {
            Outcome::Degraded
        } else if self.eat_kw("abandoned") {
            Outcome::Abandoned
        } else if self.eat_kw("continue") {
            Outcome::Continue(self.label_ref()?)
        } else {
            return self.error("outcome");
        };
        Ok((outcome, self.since(start)))
    }

    /// Parses a step label. With `allow_range`, `2-6a` style anchors are
    /// accepted; the parts must be written without spaces.
    fn label(&mut self, allow_range: bool) -> PResult<(StepLabel, SourceSpan)> {
        let TokenKind::Num(first) = self.peek().kind.clone() else {
            return self.error("step label");
        };
        let tok = self.bump();
        let mut text = first;
        let mut end = tok.end;
        if allow_range
            && self.peek().kind == TokenKind::Minus
            && self.peek().start == end
            && matches!(self.peek_at(1).kind, TokenKind::Num(_))
            && self.peek_at(1).start == end + 1
        {
            self.bump();
            let next = self.bump();
            if let TokenKind::Num(rest) = &next.kind {
                text.push('-');
                text.push_str(rest);
            }
            end = next.end;
        }
        let span = self.span(tok.start, end);
        match text.parse::<StepLabel>() {
            Ok(label) => Ok((label, span)),
            Err(e) => self.fail(span, e.to_string()),
        }
    }

    fn label_ref(&mut self) -> PResult<LabelRef> {
        let (label, span) = self.label(false)?;
        Ok(LabelRef { label, span })
    }

    fn step(&mut self) -> PResult<Step> {
        let start = self.peek().start;
        let (label, label_span) = self.label(true)?;
        self.expect(&TokenKind::Dot)?;
        let kind = if self.eat_kw("invoke") {
            StepKind::Invocation {
                target: self.name("use case name")?,
            }
        } else if self.eat_kw("condition") {
            StepKind::Condition {
                text: self.string()?,
            }
        } else if self.eat_kw("internal") {
            let timeout = if self.eat_kw("timeout") {
                Some(self.timeout()?)
            } else {
                None
            };
            StepKind::Internal {
                timeout,
                description: self.string()?,
            }
        } else if self.eat_kw("goto") {
            StepKind::Goto {
                target: self.label_ref()?,
            }
        } else if self.eat_kw("repeat") {
            let from = self.label_ref()?;
            self.expect(&TokenKind::Minus)?;
            let to = self.label_ref()?;
            StepKind::Repeat { from, to }
        } else if self.eat_kw("raise") {
            StepKind::Raise {
                exception: self.exception_ref()?,
            }
        } else if matches!(&self.peek().kind, TokenKind::Ident(s) if !STEP_KEYWORDS.contains(&s.as_str()))
        {
            let source = self.endpoint()?;
            self.expect(&TokenKind::Arrow)?;
            let target = self.endpoint()?;
            self.expect(&TokenKind::Colon)?;
            StepKind::Interaction {
                source,
                target,
                message: self.string()?,
            }
        } else {
            return self.error("interaction (`Actor -> System : \"...\"`)");
        };
        Ok(Step {
            label,
            kind,
            label_span,
            span: self.since(start),
        })
    }

    fn endpoint(&mut self) -> PResult<Endpoint> {
        let id = self.name("`System` or actor name")?;
        Ok(if id.text == Endpoint::SYSTEM {
            Endpoint::System(id.span)
        } else {
            Endpoint::Actor(id)
        })
    }

    fn timeout(&mut self) -> PResult<Timeout> {
        let tok = self.peek().clone();
        let amount = match &tok.kind {
            TokenKind::Num(s) => match s.parse::<f64>() {
                Ok(v) if s.bytes().all(|b| b.is_ascii_digit() || b == b'.') => v,
                _ => return self.error("timeout amount"),
            },
            _ => return self.error("timeout amount"),
        };
        self.bump();
        if amount <= 0.0 {
            return self.fail(self.tok_span(&tok), "timeout amount must be positive");
        }
        let (unit, _) = self.choice("time unit (`ms`, `s`, `min`)", TimeUnit::from_keyword)?;
        Ok(Timeout { amount, unit })
    }
}
