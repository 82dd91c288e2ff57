//! Abstract syntax tree for `.ucm` models.
//!
//! The serde derives define the canonical JSON form (see `export::json`).
//! Spans are never serialized; an imported tree carries zero-length spans.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::label::StepLabel;
use super::span::SourceSpan;

/// A name together with the place it was written.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Ident {
    pub text: String,
    pub span: SourceSpan,
}

impl Ident {
    pub fn new(text: impl Into<String>, span: SourceSpan) -> Self {
        Self {
            text: text.into(),
            span,
        }
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl Serialize for Ident {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.text)
    }
}

impl<'de> Deserialize<'de> for Ident {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        if text.is_empty() {
            return Err(serde::de::Error::custom("identifier must not be empty"));
        }
        Ok(Ident::new(text, SourceSpan::default()))
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AstModel {
    pub name: Ident,
    pub modes: Vec<ModeDecl>,
    pub exceptions: Vec<ExceptionDef>,
    pub services: Vec<ServiceDecl>,
    #[serde(rename = "usecases")]
    pub use_cases: Vec<UseCaseAst>,
    #[serde(skip)]
    pub span: SourceSpan,
}

impl AstModel {
    pub fn default_mode(&self) -> Option<&ModeDecl> {
        self.modes.iter().find(|m| m.is_default)
    }

    pub fn use_case(&self, name: &str) -> Option<&UseCaseAst> {
        self.use_cases.iter().find(|uc| uc.name.text == name)
    }

    pub fn handlers(&self) -> impl Iterator<Item = &UseCaseAst> {
        self.use_cases.iter().filter(|uc| uc.is_handler)
    }

    pub fn non_handlers(&self) -> impl Iterator<Item = &UseCaseAst> {
        self.use_cases.iter().filter(|uc| !uc.is_handler)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeKind {
    Normal,
    Degraded,
    Restricted,
    Emergency,
}

impl ModeKind {
    pub fn from_keyword(word: &str) -> Option<Self> {
        Some(match word {
            "normal" => Self::Normal,
            "degraded" => Self::Degraded,
            "restricted" => Self::Restricted,
            "emergency" => Self::Emergency,
            _ => return None,
        })
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Self::Normal => "normal",
            Self::Degraded => "degraded",
            Self::Restricted => "restricted",
            Self::Emergency => "emergency",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ModeDecl {
    pub name: Ident,
    pub kind: ModeKind,
    pub is_default: bool,
    pub offered_services: Vec<Ident>,
    #[serde(skip)]
    pub span: SourceSpan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExceptionCategory {
    Hardware,
    Software,
    Network,
    Environment,
}

impl ExceptionCategory {
    pub const ALL: [ExceptionCategory; 4] = [
        Self::Hardware,
        Self::Software,
        Self::Network,
        Self::Environment,
    ];

    pub fn from_keyword(word: &str) -> Option<Self> {
        Some(match word {
            "HardwareException" => Self::Hardware,
            "SoftwareException" => Self::Software,
            "NetworkException" => Self::Network,
            "EnvironmentException" => Self::Environment,
            _ => return None,
        })
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Self::Hardware => "HardwareException",
            Self::Software => "SoftwareException",
            Self::Network => "NetworkException",
            Self::Environment => "EnvironmentException",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExceptionDef {
    pub category: ExceptionCategory,
    pub name: Ident,
    pub is_global: bool,
    #[serde(skip)]
    pub span: SourceSpan,
}

impl ExceptionDef {
    pub fn qualified_name(&self) -> String {
        format!("{}::{}", self.category.keyword(), self.name)
    }
}

/// A fully qualified exception occurrence, e.g. `HardwareException::TagUnavailable`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExceptionRef {
    pub category: ExceptionCategory,
    pub name: Ident,
    #[serde(skip)]
    pub span: SourceSpan,
}

impl fmt::Display for ExceptionRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}::{}", self.category.keyword(), self.name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ServiceDecl {
    pub name: Ident,
    pub goals: Vec<Ident>,
    #[serde(skip)]
    pub span: SourceSpan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ActorCategory {
    Human,
    Software,
    PhysicalEntity,
    Device,
    Sensor,
    Actuator,
    Tag,
    Reader,
}

impl ActorCategory {
    pub const ALL: [ActorCategory; 8] = [
        Self::Human,
        Self::Software,
        Self::PhysicalEntity,
        Self::Device,
        Self::Sensor,
        Self::Actuator,
        Self::Tag,
        Self::Reader,
    ];

    pub fn from_keyword(word: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.keyword() == word)
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Self::Human => "Human",
            Self::Software => "Software",
            Self::PhysicalEntity => "PhysicalEntity",
            Self::Device => "Device",
            Self::Sensor => "Sensor",
            Self::Actuator => "Actuator",
            Self::Tag => "Tag",
            Self::Reader => "Reader",
        }
    }

    /// Sensors, actuators, tags, and readers are kinds of device.
    pub fn is_device(self) -> bool {
        matches!(
            self,
            Self::Device | Self::Sensor | Self::Actuator | Self::Tag | Self::Reader
        )
    }

    /// The category used for type checking: device subcategories collapse
    /// to `Device`.
    pub fn base(self) -> Self {
        if self.is_device() {
            Self::Device
        } else {
            self
        }
    }
}

/// The type prefix written before an actor name. Invalid prefixes are kept
/// so that validation can report them.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "Option<String>", into = "Option<String>")]
pub enum ActorType {
    Known(ActorCategory),
    Unknown(String),
    Missing,
}

impl ActorType {
    pub fn category(&self) -> Option<ActorCategory> {
        match self {
            Self::Known(c) => Some(*c),
            _ => None,
        }
    }
}

impl From<Option<String>> for ActorType {
    fn from(text: Option<String>) -> Self {
        match text {
            None => Self::Missing,
            Some(t) => match ActorCategory::from_keyword(&t) {
                Some(c) => Self::Known(c),
                None => Self::Unknown(t),
            },
        }
    }
}

impl From<ActorType> for Option<String> {
    fn from(t: ActorType) -> Self {
        match t {
            ActorType::Known(c) => Some(c.keyword().to_string()),
            ActorType::Unknown(s) => Some(s),
            ActorType::Missing => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Multiplicity {
    pub lower: u32,
    /// `None` means unbounded (`*`).
    pub upper: Option<u32>,
}

impl fmt::Display for Multiplicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.upper {
            Some(u) => write!(f, "[{}..{}]", self.lower, u),
            None => write!(f, "[{}..*]", self.lower),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ActorRef {
    pub category: ActorType,
    pub name: Ident,
    pub multiplicity: Option<Multiplicity>,
    #[serde(skip)]
    pub span: SourceSpan,
}

impl ActorRef {
    pub fn qualified_name(&self) -> String {
        match &self.category {
            ActorType::Known(c) => format!("{}::{}", c.keyword(), self.name),
            ActorType::Unknown(t) => format!("{}::{}", t, self.name),
            ActorType::Missing => self.name.text.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Level {
    #[serde(rename = "summary")]
    Summary,
    #[serde(rename = "user-goal")]
    UserGoal,
    #[serde(rename = "sub-function")]
    SubFunction,
}

impl Level {
    pub fn from_keyword(word: &str) -> Option<Self> {
        Some(match word {
            "summary" => Self::Summary,
            "user-goal" => Self::UserGoal,
            "sub-function" => Self::SubFunction,
            _ => return None,
        })
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Self::Summary => "summary",
            Self::UserGoal => "user-goal",
            Self::SubFunction => "sub-function",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "interrupt-continue")]
    InterruptContinue,
    #[serde(rename = "interrupt-fail")]
    InterruptFail,
}

impl Relation {
    pub fn keyword(self) -> &'static str {
        match self {
            Self::InterruptContinue => "interrupt-continue",
            Self::InterruptFail => "interrupt-fail",
        }
    }

    /// Stereotype used on use case diagrams.
    pub fn stereotype(self) -> &'static str {
        match self {
            Self::InterruptContinue => "<<interrupt & continue>>",
            Self::InterruptFail => "<<interrupt & fail>>",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct HandlerContext {
    pub use_case: Ident,
    pub exception: ExceptionRef,
    pub relation: Relation,
    #[serde(skip)]
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct UseCaseAst {
    pub name: Ident,
    pub is_handler: bool,
    pub scope: Option<String>,
    pub level: Option<Level>,
    pub intention: Option<String>,
    pub multiplicity: Option<String>,
    pub primary_actors: Vec<ActorRef>,
    pub secondary_actors: Vec<ActorRef>,
    pub facilitator_actors: Vec<ActorRef>,
    pub precondition: Option<String>,
    pub postcondition: Option<String>,
    pub handler_contexts: Vec<HandlerContext>,
    pub main: Option<Scenario>,
    pub extensions: Vec<ExtensionBlock>,
    #[serde(skip)]
    pub span: SourceSpan,
}

impl UseCaseAst {
    /// Primary, secondary, then facilitator actors.
    pub fn actors(&self) -> impl Iterator<Item = &ActorRef> {
        self.primary_actors
            .iter()
            .chain(&self.secondary_actors)
            .chain(&self.facilitator_actors)
    }

    /// Every step of the use case in source order, main scenario first,
    /// then extension blocks depth-first.
    pub fn steps(&self) -> Vec<&Step> {
        let mut out = Vec::new();
        if let Some(main) = &self.main {
            out.extend(main.steps.iter());
        }
        for block in &self.extensions {
            block.collect_steps(&mut out);
        }
        out
    }

    /// Every extension block, depth-first in source order.
    pub fn blocks(&self) -> Vec<&ExtensionBlock> {
        let mut out = Vec::new();
        for block in &self.extensions {
            block.collect_blocks(&mut out);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Scenario {
    pub entry_mode_switch: Option<Ident>,
    pub steps: Vec<Step>,
    pub exit_mode_switch: Option<Ident>,
    pub outcome: Outcome,
    #[serde(skip)]
    pub outcome_span: SourceSpan,
    #[serde(skip)]
    pub span: SourceSpan,
}

/// A use of a step label, e.g. a `goto` target.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "StepLabel", into = "StepLabel")]
pub struct LabelRef {
    pub label: StepLabel,
    pub span: SourceSpan,
}

impl From<StepLabel> for LabelRef {
    fn from(label: StepLabel) -> Self {
        Self {
            label,
            span: SourceSpan::default(),
        }
    }
}

impl From<LabelRef> for StepLabel {
    fn from(r: LabelRef) -> Self {
        r.label
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeUnit {
    Ms,
    S,
    Min,
}

impl TimeUnit {
    pub fn from_keyword(word: &str) -> Option<Self> {
        Some(match word {
            "ms" => Self::Ms,
            "s" => Self::S,
            "min" => Self::Min,
            _ => return None,
        })
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Self::Ms => "ms",
            Self::S => "s",
            Self::Min => "min",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timeout {
    pub amount: f64,
    pub unit: TimeUnit,
}

/// One side of an interaction: the system under development or an actor
/// named by its unqualified name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "String", into = "String")]
pub enum Endpoint {
    System(SourceSpan),
    Actor(Ident),
}

impl Endpoint {
    pub const SYSTEM: &'static str = "System";

    pub fn is_system(&self) -> bool {
        matches!(self, Endpoint::System(_))
    }

    pub fn name(&self) -> &str {
        match self {
            Endpoint::System(_) => Self::SYSTEM,
            Endpoint::Actor(id) => &id.text,
        }
    }

    pub fn span(&self) -> &SourceSpan {
        match self {
            Endpoint::System(s) => s,
            Endpoint::Actor(id) => &id.span,
        }
    }
}

impl From<String> for Endpoint {
    fn from(s: String) -> Self {
        if s == Self::SYSTEM {
            Endpoint::System(SourceSpan::default())
        } else {
            Endpoint::Actor(Ident::new(s, SourceSpan::default()))
        }
    }
}

impl From<Endpoint> for String {
    fn from(e: Endpoint) -> Self {
        e.name().to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum StepKind {
    Interaction {
        source: Endpoint,
        target: Endpoint,
        message: String,
    },
    Invocation {
        target: Ident,
    },
    Condition {
        text: String,
    },
    Internal {
        description: String,
        timeout: Option<Timeout>,
    },
    #[serde(rename = "goto")]
    Goto {
        target: LabelRef,
    },
    #[serde(rename = "repeat")]
    Repeat {
        from: LabelRef,
        to: LabelRef,
    },
    #[serde(rename = "exception-raise")]
    Raise {
        exception: ExceptionRef,
    },
}

impl StepKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Interaction { .. } => "interaction",
            Self::Invocation { .. } => "invocation",
            Self::Condition { .. } => "condition",
            Self::Internal { .. } => "internal",
            Self::Goto { .. } | Self::Repeat { .. } => "control-flow",
            Self::Raise { .. } => "exception-raise",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub label: StepLabel,
    #[serde(flatten)]
    pub kind: StepKind,
    #[serde(skip)]
    pub label_span: SourceSpan,
    #[serde(skip)]
    pub span: SourceSpan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BlockKind {
    Alternative,
    Exceptional,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "item", rename_all = "lowercase")]
pub enum BlockItem {
    Step(Step),
    Block(ExtensionBlock),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExtensionBlock {
    pub label: StepLabel,
    pub kind: BlockKind,
    pub guard: Option<String>,
    pub entry_mode_switch: Option<Ident>,
    pub body: Vec<BlockItem>,
    pub exit_mode_switch: Option<Ident>,
    pub outcome: Outcome,
    #[serde(skip)]
    pub label_span: SourceSpan,
    #[serde(skip)]
    pub outcome_span: SourceSpan,
    #[serde(skip)]
    pub span: SourceSpan,
}

impl ExtensionBlock {
    /// Steps directly in this block, not in nested blocks.
    pub fn steps(&self) -> impl Iterator<Item = &Step> {
        self.body.iter().filter_map(|item| match item {
            BlockItem::Step(s) => Some(s),
            BlockItem::Block(_) => None,
        })
    }

    pub fn nested(&self) -> impl Iterator<Item = &ExtensionBlock> {
        self.body.iter().filter_map(|item| match item {
            BlockItem::Block(b) => Some(b),
            BlockItem::Step(_) => None,
        })
    }

    /// Raise steps directly in this block.
    pub fn raised(&self) -> impl Iterator<Item = &ExceptionRef> {
        self.steps().filter_map(|s| match &s.kind {
            StepKind::Raise { exception } => Some(exception),
            _ => None,
        })
    }

    fn collect_steps<'a>(&'a self, out: &mut Vec<&'a Step>) {
        for item in &self.body {
            match item {
                BlockItem::Step(s) => out.push(s),
                BlockItem::Block(b) => b.collect_steps(out),
            }
        }
    }

    fn collect_blocks<'a>(&'a self, out: &mut Vec<&'a ExtensionBlock>) {
        out.push(self);
        for nested in self.nested() {
            nested.collect_blocks(out);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "target", rename_all = "lowercase")]
pub enum Outcome {
    Success,
    Failure,
    Degraded,
    Abandoned,
    Continue(LabelRef),
}

impl Outcome {
    pub fn keyword(&self) -> &'static str {
        match self {
            Self::Success => "success",
            Self::Failure => "failure",
            Self::Degraded => "degraded",
            Self::Abandoned => "abandoned",
            Self::Continue(_) => "continue",
        }
    }
}

/// Resets every span in the tree to the default zero-length span, so that
/// trees from different sources can be compared structurally.
pub trait ClearSpans {
    fn clear_spans(&mut self);
}

impl ClearSpans for SourceSpan {
    fn clear_spans(&mut self) {
        *self = SourceSpan::default();
    }
}

impl ClearSpans for Ident {
    fn clear_spans(&mut self) {
        self.span.clear_spans();
    }
}

impl<T: ClearSpans> ClearSpans for Vec<T> {
    fn clear_spans(&mut self) {
        self.iter_mut().for_each(ClearSpans::clear_spans);
    }
}

impl<T: ClearSpans> ClearSpans for Option<T> {
    fn clear_spans(&mut self) {
        if let Some(v) = self {
            v.clear_spans();
        }
    }
}

impl ClearSpans for AstModel {
    fn clear_spans(&mut self) {
        self.name.clear_spans();
        self.modes.clear_spans();
        self.exceptions.clear_spans();
        self.services.clear_spans();
        self.use_cases.clear_spans();
        self.span.clear_spans();
    }
}

impl ClearSpans for ModeDecl {
    fn clear_spans(&mut self) {
        self.name.clear_spans();
        self.offered_services.clear_spans();
        self.span.clear_spans();
    }
}

impl ClearSpans for ExceptionDef {
    fn clear_spans(&mut self) {
        self.name.clear_spans();
        self.span.clear_spans();
    }
}

impl ClearSpans for ExceptionRef {
    fn clear_spans(&mut self) {
        self.name.clear_spans();
        self.span.clear_spans();
    }
}

impl ClearSpans for ServiceDecl {
    fn clear_spans(&mut self) {
        self.name.clear_spans();
        self.goals.clear_spans();
        self.span.clear_spans();
    }
}

impl ClearSpans for ActorRef {
    fn clear_spans(&mut self) {
        self.name.clear_spans();
        self.span.clear_spans();
    }
}

impl ClearSpans for HandlerContext {
    fn clear_spans(&mut self) {
        self.use_case.clear_spans();
        self.exception.clear_spans();
        self.span.clear_spans();
    }
}

impl ClearSpans for UseCaseAst {
    fn clear_spans(&mut self) {
        self.name.clear_spans();
        self.primary_actors.clear_spans();
        self.secondary_actors.clear_spans();
        self.facilitator_actors.clear_spans();
        self.handler_contexts.clear_spans();
        self.main.clear_spans();
        self.extensions.clear_spans();
        self.span.clear_spans();
    }
}

impl ClearSpans for Scenario {
    fn clear_spans(&mut self) {
        self.entry_mode_switch.clear_spans();
        self.steps.clear_spans();
        self.exit_mode_switch.clear_spans();
        self.outcome.clear_spans();
        self.outcome_span.clear_spans();
        self.span.clear_spans();
    }
}

impl ClearSpans for LabelRef {
    fn clear_spans(&mut self) {
        self.span.clear_spans();
    }
}

impl ClearSpans for Endpoint {
    fn clear_spans(&mut self) {
        match self {
            Endpoint::System(s) => s.clear_spans(),
            Endpoint::Actor(id) => id.clear_spans(),
        }
    }
}

impl ClearSpans for StepKind {
    fn clear_spans(&mut self) {
        match self {
            StepKind::Interaction { source, target, .. } => {
                source.clear_spans();
                target.clear_spans();
            }
            StepKind::Invocation { target } => target.clear_spans(),
            StepKind::Goto { target } => target.clear_spans(),
            StepKind::Repeat { from, to } => {
                from.clear_spans();
                to.clear_spans();
            }
            StepKind::Raise { exception } => exception.clear_spans(),
            StepKind::Condition { .. } | StepKind::Internal { .. } => {}
        }
    }
}

impl ClearSpans for Step {
    fn clear_spans(&mut self) {
        self.kind.clear_spans();
        self.label_span.clear_spans();
        self.span.clear_spans();
    }
}

impl ClearSpans for BlockItem {
    fn clear_spans(&mut self) {
        match self {
            BlockItem::Step(s) => s.clear_spans(),
            BlockItem::Block(b) => b.clear_spans(),
        }
    }
}

impl ClearSpans for ExtensionBlock {
    fn clear_spans(&mut self) {
        self.entry_mode_switch.clear_spans();
        self.body.clear_spans();
        self.exit_mode_switch.clear_spans();
        self.outcome.clear_spans();
        self.label_span.clear_spans();
        self.outcome_span.clear_spans();
        self.span.clear_spans();
    }
}

impl ClearSpans for Outcome {
    fn clear_spans(&mut self) {
        if let Outcome::Continue(target) = self {
            target.clear_spans();
        }
    }
}
