//! The policy file format: one element per line, tab-separated fields,
//! policies separated by blank lines.
//!
//! ```text
//! # name: separation_of_duty
//! n1	class="user" && team=$R
//! n2	class="purchase"
//! n3	class="user" && team=$A	$A != $R
//! n1 -> n2	name="request"
//! n3 -> n2	name="approve"
//! ```

#![allow(clippy::tabs_in_doc_comments)]

use super::expr::Expr;
use super::parser::parse_predicate;
use super::policy::{NodeId, PolicyGraph};
use super::render::render_predicate;
use super::{ParseError, PolicyFileError};
use crate::value::is_valid_name;

/// Parses a policy file, naming policies `input:1`, `input:2`, ...
pub fn parse_policy_file(text: &str) -> Result<Vec<PolicyGraph>, PolicyFileError> {
    parse_policy_file_named(text, "input")
}

/// Parses a policy file, naming policies `<source>:<index>` unless a
/// `# name: X` comment inside the policy overrides it.
pub fn parse_policy_file_named(text: &str, source: &str) -> Result<Vec<PolicyGraph>, PolicyFileError> {
    let mut out = Vec::new();
    let mut current: Option<Builder> = None;
    for (i, raw) in text.split('\n').enumerate() {
        let line_no = i + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() {
            if let Some(b) = current.take() {
                out.push(b.finish());
            }
            continue;
        }
        let b = current.get_or_insert_with(|| Builder::new(format!("{source}:{}", out.len() + 1)));
        if let Some(comment) = line.trim_start().strip_prefix('#') {
            if let Some(name) = comment.trim_start().strip_prefix("name:") {
                b.explicit_name = Some(name.trim().to_string());
            }
            continue;
        }
        b.line(line, line_no)?;
    }
    if let Some(b) = current.take() {
        out.push(b.finish());
    }
    // a block made only of comments is not a policy
    out.retain(|p| p.node_count() > 0);
    Ok(out)
}

struct Builder {
    graph: PolicyGraph,
    explicit_name: Option<String>,
    explicit_nodes: Vec<bool>,
}

impl Builder {
    fn new(default_name: String) -> Self {
        Builder {
            graph: PolicyGraph::new(default_name),
            explicit_name: None,
            explicit_nodes: Vec::new(),
        }
    }

    fn finish(mut self) -> PolicyGraph {
        if let Some(n) = self.explicit_name {
            self.graph.name = n;
        }
        self.graph
    }

    fn node(&mut self, name: &str, line: usize) -> Result<NodeId, PolicyFileError> {
        if !is_valid_name(name) {
            return Err(PolicyFileError::Malformed {
                line,
                message: format!("invalid node name '{name}'"),
            });
        }
        if let Some(id) = self.graph.node_by_name(name) {
            return Ok(id);
        }
        self.explicit_nodes.push(false);
        Ok(self.graph.add_node(name, Expr::t(), Expr::t()))
    }

    fn line(&mut self, line: &str, line_no: usize) -> Result<(), PolicyFileError> {
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() > 3 {
            return Err(PolicyFileError::Malformed {
                line: line_no,
                message: "more than two predicates".into(),
            });
        }
        let mut offset = fields[0].chars().count() + 2;
        let mut preds = Vec::new();
        for field in &fields[1..] {
            if field.trim().is_empty() {
                return Err(PolicyFileError::Malformed {
                    line: line_no,
                    message: "empty predicate field".into(),
                });
            }
            let e = parse_predicate(field).map_err(|e| PolicyFileError::Predicate(e.relocate(line_no, offset - 1)))?;
            preds.push(e);
            offset += field.chars().count() + 1;
        }
        let mut preds = preds.into_iter();
        let domain = preds.next().unwrap_or_else(Expr::t);
        let requirement = preds.next().unwrap_or_else(Expr::t);

        let head = fields[0];
        if let Some((src, dst)) = head.split_once("->") {
            let src = self.node(src.trim(), line_no)?;
            let dst = self.node(dst.trim(), line_no)?;
            self.graph.add_edge(src, dst, domain, requirement);
        } else {
            let name = head.trim();
            let id = self.node(name, line_no)?;
            if std::mem::replace(&mut self.explicit_nodes[id.0], true) {
                return Err(PolicyFileError::DuplicateNode {
                    line: line_no,
                    name: name.to_string(),
                });
            }
            self.graph.set_node_predicates(id, domain, requirement);
        }
        Ok(())
    }
}

impl ParseError {
    /// Moves a single-line error to `line`, shifting its column by `col_offset`.
    fn relocate(self, line: usize, col_offset: usize) -> ParseError {
        match self {
            ParseError::Syntax { column, message, .. } => ParseError::Syntax {
                line,
                column: column + col_offset,
                message,
            },
            ParseError::UnterminatedString { column, .. } => ParseError::UnterminatedString {
                line,
                column: column + col_offset,
            },
            ParseError::UnknownOperator { column, token, .. } => ParseError::UnknownOperator {
                line,
                column: column + col_offset,
                token,
            },
        }
    }
}

fn predicates_field(domain: &Expr, requirement: &Expr) -> String {
    match (domain.is_true(), requirement.is_true()) {
        (true, true) => String::new(),
        (_, true) => format!("\t{}", render_predicate(domain)),
        _ => format!("\t{}\t{}", render_predicate(domain), render_predicate(requirement)),
    }
}

/// Renders policies in the file format. Every node gets a line so node
/// order survives a re-parse; each policy is preceded by a `# name:` line.
pub fn render_policy_file(policies: &[PolicyGraph]) -> String {
    let mut out = String::new();
    for (i, p) in policies.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        out.push_str(&format!("# name: {}\n", p.name));
        for (_, n) in p.nodes() {
            out.push_str(&n.name);
            out.push_str(&predicates_field(&n.domain, &n.requirement));
            out.push('\n');
        }
        for (_, e) in p.edges() {
            out.push_str(&format!("{} -> {}", p.node(e.src).name, p.node(e.dst).name));
            out.push_str(&predicates_field(&e.domain, &e.requirement));
            out.push('\n');
        }
    }
    out
}
