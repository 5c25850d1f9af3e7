//! Control flow model derived from the code model.
//!
//! One [`SubGraph`] per script body and per callable (function declaration
//! or lambda). Nodes point back to statements and call expressions; call
//! edges link a call node to the start node of the callable it hands a
//! lambda to.

mod build;
mod export;

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::code::NodeId;

pub use build::build_cfg;
pub use export::{export_graph, GraphFormat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum SubGraphKind {
    CodeBlock,
    Callable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum NodeKind {
    Start,
    End,
    Call,
    Selection,
    Statement,
}

impl NodeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::Start => "start",
            NodeKind::End => "end",
            NodeKind::Call => "call",
            NodeKind::Selection => "selection",
            NodeKind::Statement => "statement",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum EdgeKind {
    Seq,
    Call,
    CondTrue,
    CondFalse,
}

impl EdgeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeKind::Seq => "seq",
            EdgeKind::Call => "call",
            EdgeKind::CondTrue => "condTrue",
            EdgeKind::CondFalse => "condFalse",
        }
    }

    /// Traversal preference: call edges first, then the true branch, then
    /// the false branch, then plain sequence.
    fn rank(self) -> u8 {
        match self {
            EdgeKind::Call => 0,
            EdgeKind::CondTrue => 1,
            EdgeKind::CondFalse => 2,
            EdgeKind::Seq => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeRef {
    pub subgraph: usize,
    pub node: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EdgeRef {
    pub subgraph: usize,
    pub edge: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Node {
    pub kind: NodeKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stmt_ref: Option<NodeId>,
    /// Call expression of a call node, condition of a selection node.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expr_ref: Option<NodeId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<u32>,
    /// Set on the last node emitted for a statement; that node stands for
    /// the statement's own effect (binding, assignment, return).
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub stmt_tail: bool,
    pub outgoing: Vec<EdgeRef>,
    pub incoming: Vec<EdgeRef>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Edge {
    pub kind: EdgeKind,
    pub source: NodeRef,
    pub target: NodeRef,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expr_ref: Option<NodeId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SubGraph {
    pub kind: SubGraphKind,
    /// The code block this subgraph was built from.
    pub block_ref: NodeId,
    /// Relative path of the file the block lives in.
    pub file: String,
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
    pub start: NodeRef,
    pub end: NodeRef,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "camelCase")]
pub struct ControlFlowModel {
    pub subgraphs: Vec<SubGraph>,
}

impl ControlFlowModel {
    pub fn node(&self, r: NodeRef) -> &Node {
        &self.subgraphs[r.subgraph].nodes[r.node]
    }

    pub fn edge(&self, r: EdgeRef) -> &Edge {
        &self.subgraphs[r.subgraph].edges[r.edge]
    }

    pub fn node_refs(&self) -> impl Iterator<Item = NodeRef> + '_ {
        self.subgraphs.iter().enumerate().flat_map(|(s, g)| {
            (0..g.nodes.len()).map(move |n| NodeRef { subgraph: s, node: n })
        })
    }

    pub fn successors(&self, r: NodeRef) -> Vec<(EdgeKind, NodeRef)> {
        self.node(r)
            .outgoing
            .iter()
            .map(|e| {
                let e = self.edge(*e);
                (e.kind, e.target)
            })
            .collect()
    }

    pub fn predecessors(&self, r: NodeRef) -> Vec<(EdgeKind, NodeRef)> {
        self.node(r)
            .incoming
            .iter()
            .map(|e| {
                let e = self.edge(*e);
                (e.kind, e.source)
            })
            .collect()
    }

    /// Node emitted for a call expression.
    pub fn node_for_expr(&self, expr: NodeId) -> Option<NodeRef> {
        self.node_refs().find(|r| self.node(*r).kind == NodeKind::Call && self.node(*r).expr_ref == Some(expr))
    }

    /// Nodes referencing a statement, in emission order.
    pub fn nodes_for_stmt(&self, stmt: NodeId) -> Vec<NodeRef> {
        self.node_refs().filter(|r| self.node(*r).stmt_ref == Some(stmt)).collect()
    }

    /// Index from call expression id to its node.
    pub fn call_index(&self) -> BTreeMap<NodeId, NodeRef> {
        self.node_refs()
            .filter_map(|r| {
                let n = self.node(r);
                (n.kind == NodeKind::Call).then(|| n.expr_ref.map(|e| (e, r))).flatten()
            })
            .collect()
    }

    /// Nodes reachable from `from` (excluded), nearest first: the then-branch
    /// before the else-branch before the join, and callee subgraphs right
    /// after the call node handing them a lambda.
    pub fn forward_from(&self, from: NodeRef) -> Vec<NodeRef> {
        let mut order = self.ordered(from, |r| self.successors(r));
        order.retain(|r| *r != from);
        order
    }

    /// Nodes that reach `from` (excluded), nearest first.
    pub fn backward_from(&self, from: NodeRef) -> Vec<NodeRef> {
        let mut order = self.ordered(from, |r| self.predecessors(r));
        order.retain(|r| *r != from);
        order
    }

    /// Reverse postorder of an iterative depth-first search. Neighbours are
    /// pushed so that the most preferred one is explored last, which places
    /// it first in the reverse postorder.
    fn ordered(&self, from: NodeRef, next: impl Fn(NodeRef) -> Vec<(EdgeKind, NodeRef)>) -> Vec<NodeRef> {
        let mut seen: HashSet<NodeRef> = HashSet::new();
        let mut post = Vec::new();
        // (node, remaining neighbours)
        let mut stack: Vec<(NodeRef, Vec<NodeRef>)> = Vec::new();
        let neighbours = |r: NodeRef| {
            let mut n = next(r);
            // explore least preferred first; pop() takes from the back
            n.sort_by_key(|(k, _)| std::cmp::Reverse(k.rank()));
            n.into_iter().map(|(_, t)| t).rev().collect::<Vec<_>>()
        };
        seen.insert(from);
        stack.push((from, neighbours(from)));
        while let Some((node, pending)) = stack.last_mut() {
            match pending.pop() {
                Some(t) => {
                    if seen.insert(t) {
                        let n = neighbours(t);
                        stack.push((t, n));
                    }
                }
                None => {
                    post.push(*node);
                    stack.pop();
                }
            }
        }
        post.reverse();
        post
    }

    /// Structural well-formedness problems of every subgraph.
    pub fn check(&self) -> Vec<String> {
        let mut problems = Vec::new();
        for (i, g) in self.subgraphs.iter().enumerate() {
            let start = g.start;
            let end = g.end;
            if g.nodes[start.node].kind != NodeKind::Start || g.nodes[end.node].kind != NodeKind::End {
                problems.push(format!("subgraph {i}: bad start/end"));
            }
            let local_in = |n: usize| {
                g.nodes[n]
                    .incoming
                    .iter()
                    .filter(|e| self.edge(**e).kind != EdgeKind::Call)
                    .count()
            };
            if local_in(start.node) != 0 {
                problems.push(format!("subgraph {i}: start has incoming edges"));
            }
            if !g.nodes[end.node].outgoing.is_empty() {
                problems.push(format!("subgraph {i}: end has outgoing edges"));
            }
            let local = |r: NodeRef, dir: bool| -> HashSet<usize> {
                let mut seen = HashSet::new();
                let mut stack = vec![r.node];
                while let Some(n) = stack.pop() {
                    if !seen.insert(n) {
                        continue;
                    }
                    let nr = NodeRef { subgraph: i, node: n };
                    let nb = if dir { self.successors(nr) } else { self.predecessors(nr) };
                    for (k, t) in nb {
                        if k != EdgeKind::Call && t.subgraph == i {
                            stack.push(t.node);
                        }
                    }
                }
                seen
            };
            let fwd = local(start, true);
            let bwd = local(end, false);
            for n in 0..g.nodes.len() {
                if !fwd.contains(&n) {
                    problems.push(format!("subgraph {i}: node {n} unreachable from start"));
                }
                if !bwd.contains(&n) {
                    problems.push(format!("subgraph {i}: end unreachable from node {n}"));
                }
                let node = &g.nodes[n];
                let needs_ref = matches!(node.kind, NodeKind::Call | NodeKind::Selection | NodeKind::Statement);
                if needs_ref != node.stmt_ref.is_some() {
                    problems.push(format!("subgraph {i}: node {n} stmtRef mismatch"));
                }
            }
            for e in &g.edges {
                match e.kind {
                    EdgeKind::Call => {
                        let tg = &self.subgraphs[e.target.subgraph];
                        if tg.start != e.target {
                            problems.push(format!("subgraph {i}: call edge not into a start node"));
                        }
                    }
                    EdgeKind::CondTrue | EdgeKind::CondFalse => {
                        if self.node(e.source).kind != NodeKind::Selection {
                            problems.push(format!("subgraph {i}: branch edge not from a selection"));
                        }
                    }
                    EdgeKind::Seq => {}
                }
            }
        }
        problems
    }
}
