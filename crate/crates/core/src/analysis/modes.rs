use std::fmt;

use super::exceptions::occurrences;
use crate::model::ResolvedModel;
use crate::syntax::{BlockKind, ExtensionBlock, Ident, StepLabel, UseCaseAst};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SwitchLocation {
    MainBegin,
    MainEnd,
    BlockBegin(StepLabel),
    BlockEnd(StepLabel),
}

impl fmt::Display for SwitchLocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::MainBegin => f.write_str("main begin"),
            Self::MainEnd => f.write_str("main end"),
            Self::BlockBegin(l) => write!(f, "block {l} begin"),
            Self::BlockEnd(l) => write!(f, "block {l} end"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeSwitchRow {
    pub use_case: String,
    pub location: SwitchLocation,
    pub from_mode: String,
    pub to_mode: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeServiceRow {
    pub mode: String,
    pub kind: String,
    pub services: Vec<String>,
}

/// Mode in effect when a use case starts: the mode entered by the block
/// that raises a handler's triggering exception, otherwise the default.
fn initial_mode(m: &ResolvedModel, uc: &UseCaseAst) -> String {
    let default = m
        .ast
        .default_mode()
        .map(|d| d.name.text.clone())
        .unwrap_or_default();
    if !uc.is_handler {
        return default;
    }
    let all = occurrences(m);
    for ctx in &uc.handler_contexts {
        let Some(index) = m.exception_index(&ctx.exception) else {
            continue;
        };
        let reachable = m.reachable_use_cases(ctx.use_case.as_str());
        let switched = all
            .iter()
            .filter(|o| o.exception == index && reachable.contains(&o.use_case.name.text))
            .filter_map(|o| o.block)
            .filter(|b| b.kind == BlockKind::Exceptional)
            .find_map(|b| b.entry_mode_switch.as_ref().or(b.exit_mode_switch.as_ref()));
        if let Some(mode) = switched {
            return mode.text.clone();
        }
    }
    default
}

struct Rows<'a> {
    use_case: &'a str,
    rows: Vec<ModeSwitchRow>,
}

impl Rows<'_> {
    /// Records a switch from `current` and returns the mode after it.
    fn switch(&mut self, location: SwitchLocation, current: &str, to: Option<&Ident>) -> String {
        let Some(to) = to else {
            return current.to_string();
        };
        if to.text != current {
            self.rows.push(ModeSwitchRow {
                use_case: self.use_case.to_string(),
                location,
                from_mode: current.to_string(),
                to_mode: to.text.clone(),
            });
        }
        to.text.clone()
    }

    fn block(&mut self, block: &ExtensionBlock, entry: &str) {
        let current = self.switch(
            SwitchLocation::BlockBegin(block.label.clone()),
            entry,
            block.entry_mode_switch.as_ref(),
        );
        for nested in block.nested() {
            self.block(nested, &current);
        }
        self.switch(
            SwitchLocation::BlockEnd(block.label.clone()),
            &current,
            block.exit_mode_switch.as_ref(),
        );
    }
}

/// One row per mode switch that changes the mode, in source order. Blocks
/// start in the mode their parent sequence has after its entry switch.
pub fn mode_switch_table(m: &ResolvedModel) -> Vec<ModeSwitchRow> {
    let mut out = Vec::new();
    for uc in &m.ast.use_cases {
        let mut rows = Rows {
            use_case: &uc.name.text,
            rows: Vec::new(),
        };
        let initial = initial_mode(m, uc);
        let mut body_mode = initial.clone();
        if let Some(main) = &uc.main {
            body_mode = rows.switch(
                SwitchLocation::MainBegin,
                &initial,
                main.entry_mode_switch.as_ref(),
            );
            rows.switch(
                SwitchLocation::MainEnd,
                &body_mode,
                main.exit_mode_switch.as_ref(),
            );
        }
        for block in &uc.extensions {
            rows.block(block, &body_mode);
        }
        out.extend(rows.rows);
    }
    out
}

/// Modes with their kind and offered services, in declaration order.
pub fn mode_service_table(m: &ResolvedModel) -> Vec<ModeServiceRow> {
    m.ast
        .modes
        .iter()
        .map(|mode| ModeServiceRow {
            mode: mode.name.text.clone(),
            kind: mode.kind.keyword().to_string(),
            services: mode
                .offered_services
                .iter()
                .map(|s| s.text.clone())
                .collect(),
        })
        .collect()
}
