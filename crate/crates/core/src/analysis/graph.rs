use std::collections::BTreeMap;
use std::fmt;

use crate::diagnostic::{Code, Diagnostic};
use crate::model::ResolvedModel;
use crate::syntax::{SourceSpan, StepKind, StepLabel};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub caller: usize,
    pub callee: usize,
    /// Label of the invoking step in the caller.
    pub step: StepLabel,
    pub span: SourceSpan,
}

/// A root-to-target sequence of use cases. `via[i]` is the step of
/// `use_cases[i]` that invokes `use_cases[i + 1]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PathRecord {
    pub use_cases: Vec<String>,
    pub via: Vec<StepLabel>,
}

impl fmt::Display for PathRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.use_cases.join(" -> "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnalysisError {
    #[error("invocation cycle: {}", .witness.join(" -> "))]
    Cycle {
        /// Use case names around the cycle; the first name is repeated last.
        witness: Vec<String>,
        span: SourceSpan,
    },
    #[error("`{0}` is not a use case in the invocation graph")]
    UnknownUseCase(String),
}

impl AnalysisError {
    pub fn to_diagnostic(&self) -> Diagnostic {
        match self {
            AnalysisError::Cycle { span, witness } => Diagnostic::new(
                Code::E015,
                span.clone(),
                format!(
                    "use case invocations form a cycle: {}",
                    witness.join(" -> ")
                ),
            ),
            AnalysisError::UnknownUseCase(name) => Diagnostic::new(
                Code::E003,
                SourceSpan::default(),
                format!("`{name}` is not a use case in the invocation graph"),
            ),
        }
    }
}

/// Directed multigraph of invocations between non-handler use cases.
#[derive(Debug, Clone, Default)]
pub struct InvocationGraph {
    nodes: Vec<String>,
    index: BTreeMap<String, usize>,
    edges: Vec<Edge>,
    outgoing: Vec<Vec<usize>>,
    incoming: Vec<Vec<usize>>,
}

impl InvocationGraph {
    /// Builds a graph from node names and `(caller, callee, step)` triples.
    /// Edges naming unknown nodes are dropped.
    pub fn new<N, E>(nodes: N, edges: E) -> Self
    where
        N: IntoIterator<Item = String>,
        E: IntoIterator<Item = (String, String, StepLabel)>,
    {
        let mut g = Self::with_nodes(nodes);
        for (caller, callee, step) in edges {
            g.add_edge(&caller, &callee, step, SourceSpan::default());
        }
        g
    }

    pub fn build(m: &ResolvedModel) -> Self {
        let mut g = Self::with_nodes(m.ast.non_handlers().map(|uc| uc.name.text.clone()));
        for uc in m.ast.non_handlers() {
            for step in uc.steps() {
                if let StepKind::Invocation { target } = &step.kind {
                    g.add_edge(
                        &uc.name.text,
                        &target.text,
                        step.label.clone(),
                        step.span.clone(),
                    );
                }
            }
        }
        g
    }

    fn with_nodes(nodes: impl IntoIterator<Item = String>) -> Self {
        let mut g = Self::default();
        for name in nodes {
            if g.index.contains_key(&name) {
                continue;
            }
            g.index.insert(name.clone(), g.nodes.len());
            g.nodes.push(name);
            g.outgoing.push(Vec::new());
            g.incoming.push(Vec::new());
        }
        g
    }

    fn add_edge(&mut self, caller: &str, callee: &str, step: StepLabel, span: SourceSpan) {
        let (Some(&a), Some(&b)) = (self.index.get(caller), self.index.get(callee)) else {
            return;
        };
        let id = self.edges.len();
        self.edges.push(Edge {
            caller: a,
            callee: b,
            step,
            span,
        });
        self.outgoing[a].push(id);
        self.incoming[b].push(id);
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn node_name(&self, i: usize) -> &str {
        &self.nodes[i]
    }

    pub fn roots(&self) -> Vec<&str> {
        (0..self.nodes.len())
            .filter(|&i| self.incoming[i].is_empty())
            .map(|i| self.nodes[i].as_str())
            .collect()
    }

    /// Finds some cycle, located at the invocation step that closes it.
    pub fn find_cycle(&self) -> Option<AnalysisError> {
        #[derive(Clone, Copy, PartialEq)]
        enum Color {
            White,
            Grey,
            Black,
        }
        let n = self.nodes.len();
        let mut color = vec![Color::White; n];
        for start in 0..n {
            if color[start] != Color::White {
                continue;
            }
            // Stack of (node, next outgoing position).
            let mut stack = vec![(start, 0usize)];
            color[start] = Color::Grey;
            while let Some(&mut (node, ref mut pos)) = stack.last_mut() {
                if let Some(&edge_id) = self.outgoing[node].get(*pos) {
                    *pos += 1;
                    let next = self.edges[edge_id].callee;
                    match color[next] {
                        Color::White => {
                            color[next] = Color::Grey;
                            stack.push((next, 0));
                        }
                        Color::Grey => {
                            let from = stack.iter().position(|&(v, _)| v == next).unwrap();
                            let mut witness: Vec<String> = stack[from..]
                                .iter()
                                .map(|&(v, _)| self.nodes[v].clone())
                                .collect();
                            witness.push(self.nodes[next].clone());
                            return Some(AnalysisError::Cycle {
                                witness,
                                span: self.edges[edge_id].span.clone(),
                            });
                        }
                        Color::Black => {}
                    }
                } else {
                    color[node] = Color::Black;
                    stack.pop();
                }
            }
        }
        None
    }

    /// All paths from any root to `target`, sorted by use case names and
    /// then by invoking step labels.
    pub fn paths_to(&self, target: &str) -> Result<Vec<PathRecord>, AnalysisError> {
        self.paths(None, target)
    }

    /// All paths from `from` to `to`. A node reaches itself by the one-element
    /// path.
    pub fn paths_between(&self, from: &str, to: &str) -> Result<Vec<PathRecord>, AnalysisError> {
        let source = *self
            .index
            .get(from)
            .ok_or_else(|| AnalysisError::UnknownUseCase(from.to_string()))?;
        self.paths(Some(source), to)
    }

    fn paths(&self, source: Option<usize>, target: &str) -> Result<Vec<PathRecord>, AnalysisError> {
        let target = *self
            .index
            .get(target)
            .ok_or_else(|| AnalysisError::UnknownUseCase(target.to_string()))?;
        if let Some(cycle) = self.find_cycle() {
            return Err(cycle);
        }
        // Walk backwards from the target; the graph is acyclic so every
        // walk is a simple path.
        let mut out = Vec::new();
        let mut nodes = vec![target];
        let mut edges: Vec<usize> = Vec::new();
        self.walk_back(source, &mut nodes, &mut edges, &mut out);
        out.sort();
        Ok(out)
    }

    fn walk_back(
        &self,
        source: Option<usize>,
        nodes: &mut Vec<usize>,
        edges: &mut Vec<usize>,
        out: &mut Vec<PathRecord>,
    ) {
        let head = *nodes.last().unwrap();
        let done = match source {
            Some(s) => head == s,
            None => self.incoming[head].is_empty(),
        };
        if done {
            out.push(PathRecord {
                use_cases: nodes.iter().rev().map(|&v| self.nodes[v].clone()).collect(),
                via: edges
                    .iter()
                    .rev()
                    .map(|&e| self.edges[e].step.clone())
                    .collect(),
            });
            return;
        }
        for &e in &self.incoming[head] {
            nodes.push(self.edges[e].caller);
            edges.push(e);
            self.walk_back(source, nodes, edges, out);
            nodes.pop();
            edges.pop();
        }
    }
}

/// All root-to-`target` paths in `g`.
pub fn enumerate_paths(
    g: &InvocationGraph,
    target: &str,
) -> Result<Vec<PathRecord>, AnalysisError> {
    g.paths_to(target)
}
