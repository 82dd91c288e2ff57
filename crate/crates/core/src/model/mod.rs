//! Name resolution: symbol tables and reference bindings over a parsed model.

mod resolve;

pub use resolve::resolve;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::syntax::{
    ActorCategory, AstModel, ExceptionRef, SourceSpan, StepKind, StepLabel, UseCaseAst,
};

/// What a reference site points at.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Target {
    UseCase(usize),
    Exception(usize),
    Mode(usize),
    Service(usize),
    Step {
        use_case: usize,
        label: StepLabel,
    },
    Actor {
        category: ActorCategory,
        name: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RefKind {
    Invocation,
    RaisedException,
    ContextUseCase,
    ContextException,
    ModeSwitch,
    OfferedService,
    ServiceGoal,
    GotoTarget,
    RepeatBound,
    ContinueTarget,
    BlockAnchor,
    InteractionEndpoint,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Binding {
    pub site: SourceSpan,
    pub kind: RefKind,
    pub name: String,
    pub target: Target,
}

/// A parsed model with its symbol tables and bound references. Immutable
/// once built.
#[derive(Debug, Clone)]
pub struct ResolvedModel {
    pub ast: AstModel,
    pub use_case_by_name: BTreeMap<String, usize>,
    pub exception_by_qualified_name: BTreeMap<String, usize>,
    pub mode_by_name: BTreeMap<String, usize>,
    pub service_by_name: BTreeMap<String, usize>,
    /// Actor name to category, first declaration wins.
    pub actor_categories: BTreeMap<String, ActorCategory>,
    /// Per use case (indexed like `ast.use_cases`), the declared actors.
    pub declared_actors: Vec<BTreeSet<(ActorCategory, String)>>,
    pub bindings: Vec<Binding>,
}

impl ResolvedModel {
    pub fn use_case(&self, name: &str) -> Option<&UseCaseAst> {
        self.use_case_by_name
            .get(name)
            .map(|&i| &self.ast.use_cases[i])
    }

    pub fn exception_index(&self, r: &ExceptionRef) -> Option<usize> {
        self.exception_by_qualified_name
            .get(&r.to_string())
            .copied()
    }

    pub fn is_global(&self, r: &ExceptionRef) -> bool {
        self.exception_index(r)
            .is_some_and(|i| self.ast.exceptions[i].is_global)
    }

    pub fn bindings_of(&self, kind: RefKind) -> impl Iterator<Item = &Binding> {
        self.bindings.iter().filter(move |b| b.kind == kind)
    }

    /// Use cases invoked directly by `use_case`, in step order, with the
    /// label of the invoking step.
    pub fn invocations<'a>(&self, use_case: &'a UseCaseAst) -> Vec<(usize, &'a StepLabel)> {
        use_case
            .steps()
            .into_iter()
            .filter_map(|step| match &step.kind {
                StepKind::Invocation { target } => self
                    .use_case_by_name
                    .get(&target.text)
                    .map(|&i| (i, &step.label)),
                _ => None,
            })
            .collect()
    }

    /// Transitive closure of the invocation relation from `root`, including
    /// `root` itself. Unknown roots give an empty set.
    pub fn reachable_use_cases(&self, root: &str) -> BTreeSet<String> {
        let mut seen = BTreeSet::new();
        let Some(&start) = self.use_case_by_name.get(root) else {
            return seen;
        };
        let mut visited = vec![false; self.ast.use_cases.len()];
        let mut queue = VecDeque::from([start]);
        visited[start] = true;
        while let Some(i) = queue.pop_front() {
            let uc = &self.ast.use_cases[i];
            seen.insert(uc.name.text.clone());
            for (callee, _) in self.invocations(uc) {
                if !visited[callee] {
                    visited[callee] = true;
                    queue.push_back(callee);
                }
            }
        }
        seen
    }
}

#[cfg(test)]
mod tests;
