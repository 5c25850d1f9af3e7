use std::collections::{BTreeMap, HashSet};

use super::*;
use crate::code::visit::{expr_children, stmt_exprs, walk_stmts};
use crate::code::{CodeBlock, CodeModel, Expr, ExprKind, Statement, StmtKind};
use crate::error::{Error, Result};

/// Pending connection: the node and the kind of edge leaving it.
type Frontier = Vec<(usize, EdgeKind)>;

struct Builder<'m> {
    graphs: Vec<SubGraph>,
    file: &'m str,
    /// Function declarations of the current file by name.
    functions: BTreeMap<String, usize>,
    /// Plain calls by subgraph node, resolved once all functions are known.
    plain_calls: Vec<(NodeRef, String, NodeId)>,
}

/// Derive the control flow model of every file.
pub fn build_cfg(code: &CodeModel) -> Result<ControlFlowModel> {
    let mut graphs = Vec::new();
    for (path, cc) in code.files() {
        check_unique_ids(path, cc.body())?;
        let mut b = Builder {
            graphs,
            file: path,
            functions: BTreeMap::new(),
            plain_calls: Vec::new(),
        };
        for block in &cc.blocks {
            b.subgraph(SubGraphKind::CodeBlock, block);
        }
        b.link_functions();
        graphs = b.graphs;
    }
    Ok(ControlFlowModel { subgraphs: graphs })
}

fn check_unique_ids(path: &str, body: &CodeBlock) -> Result<()> {
    let mut seen = HashSet::new();
    let mut dup = None;
    walk_stmts(body, &mut |s| {
        if !seen.insert(s.id) {
            dup = Some(s.id);
        }
    });
    match dup {
        Some(id) => Err(Error::Model(format!("{path}: statement id {id} is not unique"))),
        None => Ok(()),
    }
}

/// Calls of an expression in evaluation order (receiver, arguments, then
/// the call itself), lambda bodies excluded.
fn calls_in_order<'a>(e: &'a Expr, out: &mut Vec<&'a Expr>) {
    for c in expr_children(e) {
        calls_in_order(c, out);
    }
    if matches!(e.kind, ExprKind::Call { .. }) {
        out.push(e);
    }
}

/// Lambdas of an expression together with the innermost call that takes
/// them as a direct argument.
fn lambdas_with_owner<'a>(e: &'a Expr, owner: Option<&'a Expr>, out: &mut Vec<(&'a Expr, Option<&'a Expr>)>) {
    match &e.kind {
        ExprKind::Lambda { .. } => out.push((e, owner)),
        ExprKind::Call { receiver, args, .. } => {
            if let Some(r) = receiver {
                lambdas_with_owner(r, owner, out);
            }
            for a in args {
                lambdas_with_owner(a, Some(e), out);
            }
        }
        _ => {
            for c in expr_children(e) {
                lambdas_with_owner(c, owner, out);
            }
        }
    }
}

impl<'m> Builder<'m> {
    fn add_node(&mut self, g: usize, kind: NodeKind, stmt: Option<&Statement>, expr: Option<NodeId>) -> usize {
        let nodes = &mut self.graphs[g].nodes;
        nodes.push(Node {
            kind,
            stmt_ref: stmt.map(|s| s.id),
            expr_ref: expr,
            line: stmt.map(|s| s.span.line),
            stmt_tail: false,
            outgoing: Vec::new(),
            incoming: Vec::new(),
        });
        nodes.len() - 1
    }

    fn add_edge(&mut self, kind: EdgeKind, source: NodeRef, target: NodeRef, expr: Option<NodeId>) {
        let g = &mut self.graphs[source.subgraph];
        if g.edges.iter().any(|e| e.kind == kind && e.source == source && e.target == target) {
            return;
        }
        g.edges.push(Edge {
            kind,
            source,
            target,
            expr_ref: expr,
        });
        let r = EdgeRef {
            subgraph: source.subgraph,
            edge: g.edges.len() - 1,
        };
        self.graphs[source.subgraph].nodes[source.node].outgoing.push(r);
        self.graphs[target.subgraph].nodes[target.node].incoming.push(r);
    }

    fn subgraph(&mut self, kind: SubGraphKind, block: &CodeBlock) -> usize {
        let g = self.graphs.len();
        self.graphs.push(SubGraph {
            kind,
            block_ref: block.id,
            file: self.file.to_string(),
            nodes: Vec::new(),
            edges: Vec::new(),
            start: NodeRef { subgraph: g, node: 0 },
            end: NodeRef { subgraph: g, node: 1 },
        });
        self.add_node(g, NodeKind::Start, None, None);
        self.add_node(g, NodeKind::End, None, None);
        let frontier = self.block(g, block, vec![(0, EdgeKind::Seq)]);
        self.connect_pending(g, &frontier, 1);
        g
    }

    fn connect_pending(&mut self, g: usize, frontier: &Frontier, target: usize) {
        for &(src, kind) in frontier {
            let cond = self.graphs[g].nodes[src].expr_ref;
            let expr = matches!(kind, EdgeKind::CondTrue | EdgeKind::CondFalse).then_some(cond).flatten();
            self.add_edge(
                kind,
                NodeRef { subgraph: g, node: src },
                NodeRef { subgraph: g, node: target },
                expr,
            );
        }
    }

    fn block(&mut self, g: usize, block: &CodeBlock, mut frontier: Frontier) -> Frontier {
        for stmt in &block.statements {
            if frontier.is_empty() {
                // unreachable: only hoisted functions survive
                if let StmtKind::FunctionDecl { name, body } = &stmt.variant {
                    let sg = self.subgraph(SubGraphKind::Callable, body);
                    self.functions.insert(name.clone(), sg);
                }
                continue;
            }
            frontier = self.statement(g, stmt, frontier);
        }
        frontier
    }

    /// Emit a chain of call nodes (or one node of `fallback` kind when the
    /// expressions hold no calls), then spawn subgraphs for the lambdas.
    /// Returns (first node, last node).
    fn chain(&mut self, g: usize, stmt: &Statement, exprs: &[&Expr], fallback: Option<NodeKind>, frontier: &Frontier) -> Option<(usize, usize)> {
        let mut calls = Vec::new();
        for e in exprs {
            calls_in_order(e, &mut calls);
        }
        let mut ids: Vec<(usize, NodeId)> = Vec::new();
        for c in &calls {
            let n = self.add_node(g, NodeKind::Call, Some(stmt), Some(c.id));
            ids.push((n, c.id));
            if let ExprKind::Call {
                receiver: None,
                method,
                ..
            } = &c.kind
            {
                self.plain_calls.push((NodeRef { subgraph: g, node: n }, method.clone(), c.id));
            }
        }
        if ids.is_empty() {
            let kind = fallback?;
            let n = self.add_node(g, kind, Some(stmt), None);
            ids.push((n, stmt.id));
        }
        let first = ids[0].0;
        let last = ids[ids.len() - 1].0;
        self.connect_pending(g, frontier, first);
        for w in ids.windows(2) {
            self.add_edge(
                EdgeKind::Seq,
                NodeRef { subgraph: g, node: w[0].0 },
                NodeRef { subgraph: g, node: w[1].0 },
                None,
            );
        }
        // lambdas passed along: one callable subgraph each
        let mut lambdas = Vec::new();
        for e in exprs {
            lambdas_with_owner(e, None, &mut lambdas);
        }
        for (lambda, owner) in lambdas {
            let ExprKind::Lambda { body, .. } = &lambda.kind else { continue };
            let src = owner
                .and_then(|o| ids.iter().find(|(_, id)| *id == o.id).map(|(n, _)| *n))
                .unwrap_or(last);
            let sg = self.subgraph(SubGraphKind::Callable, body);
            let start = self.graphs[sg].start;
            self.add_edge(
                EdgeKind::Call,
                NodeRef { subgraph: g, node: src },
                start,
                Some(owner.map(|o| o.id).unwrap_or(lambda.id)),
            );
        }
        Some((first, last))
    }

    fn statement(&mut self, g: usize, stmt: &Statement, frontier: Frontier) -> Frontier {
        match &stmt.variant {
            StmtKind::If {
                cond,
                then,
                otherwise,
            } => {
                let sel = self.condition(g, stmt, cond, &frontier);
                let t = self.block(g, then, vec![(sel, EdgeKind::CondTrue)]);
                let f = match otherwise {
                    Some(b) => self.block(g, b, vec![(sel, EdgeKind::CondFalse)]),
                    None => vec![(sel, EdgeKind::CondFalse)],
                };
                t.into_iter().chain(f).collect()
            }
            StmtKind::While { cond, body } => {
                let before = self.graphs[g].nodes.len();
                let sel = self.condition(g, stmt, cond, &frontier);
                // the loop re-enters at the first node of the condition
                let head = before;
                let tail = self.block(g, body, vec![(sel, EdgeKind::CondTrue)]);
                self.connect_pending(g, &tail, head);
                vec![(sel, EdgeKind::CondFalse)]
            }
            StmtKind::FunctionDecl { name, body } => {
                let (_, last) = self
                    .chain(g, stmt, &[], Some(NodeKind::Statement), &frontier)
                    .expect("fallback node");
                self.graphs[g].nodes[last].stmt_tail = true;
                let sg = self.subgraph(SubGraphKind::Callable, body);
                self.functions.insert(name.clone(), sg);
                vec![(last, EdgeKind::Seq)]
            }
            StmtKind::Return { .. } => {
                let exprs = stmt_exprs(stmt);
                let (_, last) = self
                    .chain(g, stmt, &exprs, Some(NodeKind::Statement), &frontier)
                    .expect("fallback node");
                self.graphs[g].nodes[last].stmt_tail = true;
                let end = self.graphs[g].end.node;
                self.add_edge(
                    EdgeKind::Seq,
                    NodeRef { subgraph: g, node: last },
                    NodeRef { subgraph: g, node: end },
                    None,
                );
                Vec::new()
            }
            _ => {
                let exprs = stmt_exprs(stmt);
                let (_, last) = self
                    .chain(g, stmt, &exprs, Some(NodeKind::Statement), &frontier)
                    .expect("fallback node");
                self.graphs[g].nodes[last].stmt_tail = true;
                vec![(last, EdgeKind::Seq)]
            }
        }
    }

    /// Calls of a condition followed by its selection node.
    fn condition(&mut self, g: usize, stmt: &Statement, cond: &Expr, frontier: &Frontier) -> usize {
        let mut frontier = frontier.clone();
        if let Some((_, last)) = self.chain(g, stmt, &[cond], None, &frontier) {
            frontier = vec![(last, EdgeKind::Seq)];
        }
        let sel = self.add_node(g, NodeKind::Selection, Some(stmt), Some(cond.id));
        self.graphs[g].nodes[sel].stmt_tail = true;
        self.connect_pending(g, &frontier, sel);
        sel
    }

    fn link_functions(&mut self) {
        let calls = std::mem::take(&mut self.plain_calls);
        for (node, name, expr) in calls {
            if let Some(&sg) = self.functions.get(&name) {
                let start = self.graphs[sg].start;
                self.add_edge(EdgeKind::Call, node, start, Some(expr));
            }
        }
    }
}
