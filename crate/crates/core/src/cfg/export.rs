use std::fmt::Write;

use super::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    Dot,
    GraphCypher,
}

pub fn export_graph(cfg: &ControlFlowModel, format: GraphFormat) -> String {
    match format {
        GraphFormat::Dot => dot(cfg),
        GraphFormat::GraphCypher => cypher(cfg),
    }
}

fn node_name(r: NodeRef) -> String {
    format!("n{}_{}", r.subgraph, r.node)
}

fn label(n: &Node) -> String {
    match n.line {
        Some(l) => format!("{}:{l}", n.kind.as_str()),
        None => format!("{}:", n.kind.as_str()),
    }
}

fn dot(cfg: &ControlFlowModel) -> String {
    let mut out = String::from("digraph cfg {\n");
    for (i, g) in cfg.subgraphs.iter().enumerate() {
        let kind = match g.kind {
            SubGraphKind::CodeBlock => "codeBlock",
            SubGraphKind::Callable => "callable",
        };
        writeln!(out, "  subgraph cluster_{i} {{").unwrap();
        writeln!(out, "    label=\"{kind} {i} ({})\";", g.file.replace('"', "\\\"")).unwrap();
        for (n, node) in g.nodes.iter().enumerate() {
            let shape = match node.kind {
                NodeKind::Start | NodeKind::End => "circle",
                NodeKind::Selection => "diamond",
                _ => "box",
            };
            writeln!(
                out,
                "    {} [label=\"{}\", shape={shape}];",
                node_name(NodeRef { subgraph: i, node: n }),
                label(node)
            )
            .unwrap();
        }
        out.push_str("  }\n");
    }
    for g in &cfg.subgraphs {
        for e in &g.edges {
            let style = match e.kind {
                EdgeKind::Call => ", style=dashed",
                _ => "",
            };
            writeln!(
                out,
                "  {} -> {} [label=\"{}\"{style}];",
                node_name(e.source),
                node_name(e.target),
                e.kind.as_str()
            )
            .unwrap();
        }
    }
    out.push_str("}\n");
    out
}

fn cypher(cfg: &ControlFlowModel) -> String {
    let mut out = String::new();
    for (i, g) in cfg.subgraphs.iter().enumerate() {
        for (n, node) in g.nodes.iter().enumerate() {
            let mut props = format!("subgraph: {i}, kind: '{}'", node.kind.as_str());
            if let Some(l) = node.line {
                write!(props, ", line: {l}").unwrap();
            }
            if let Some(s) = node.stmt_ref {
                write!(props, ", stmtRef: '{s}'").unwrap();
            }
            if let Some(e) = node.expr_ref {
                write!(props, ", exprRef: '{e}'").unwrap();
            }
            let label = match node.kind {
                NodeKind::Start => "Start",
                NodeKind::End => "End",
                NodeKind::Call => "Call",
                NodeKind::Selection => "Selection",
                NodeKind::Statement => "Statement",
            };
            writeln!(out, "CREATE ({}:{label} {{{props}}})", node_name(NodeRef { subgraph: i, node: n })).unwrap();
        }
    }
    for g in &cfg.subgraphs {
        for e in &g.edges {
            let rel = match e.kind {
                EdgeKind::Seq => "SEQ",
                EdgeKind::Call => "CALL",
                EdgeKind::CondTrue => "COND_TRUE",
                EdgeKind::CondFalse => "COND_FALSE",
            };
            let props = e.expr_ref.map(|x| format!(" {{exprRef: '{x}'}}")).unwrap_or_default();
            writeln!(out, "CREATE ({})-[:{rel}{props}]->({})", node_name(e.source), node_name(e.target)).unwrap();
        }
    }
    out
}
