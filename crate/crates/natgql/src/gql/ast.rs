//! Parsed representation of the executable GQL subset: one linear MATCH
//! chain, WHERE comparisons with AND/OR, RETURN projections, LIMIT.

use serde::{Deserialize, Serialize};

use super::Dialect;

/// Longest supported MATCH chain, in edge patterns.
pub const MAX_PATTERN_EDGES: usize = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Literal {
    Str(String),
    Int(i64),
    Float(f64),
    Bool(bool),
}

impl Literal {
    pub fn to_value(&self) -> crate::graph::Value {
        match self {
            Literal::Str(s) => crate::graph::Value::Str(s.clone()),
            Literal::Int(i) => crate::graph::Value::Int(*i),
            Literal::Float(f) => crate::graph::Value::Float(*f),
            Literal::Bool(b) => crate::graph::Value::Bool(*b),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodePattern {
    pub variable: Option<String>,
    pub node_type: Option<String>,
    /// Inline `{prop: literal}` equality constraints.
    pub constraints: Vec<(String, Literal)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeDirection {
    /// `-[..]->`
    Forward,
    /// `<-[..]-`
    Backward,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgePattern {
    pub variable: Option<String>,
    pub edge_type: String,
    pub direction: EdgeDirection,
}

/// `variable.type.property` (canonical) or `variable.property` with the
/// type inferred from the pattern binding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropRef {
    pub variable: String,
    pub type_name: Option<String>,
    pub property: String,
}

impl PropRef {
    pub fn display(&self) -> String {
        match &self.type_name {
            Some(t) => format!("{}.{}.{}", self.variable, t, self.property),
            None => format!("{}.{}", self.variable, self.property),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CmpOp {
    Eq,
    Ne,
    Gt,
    Ge,
    Lt,
    Le,
}

impl CmpOp {
    pub fn symbol(&self, dialect: Dialect) -> &'static str {
        match (self, dialect) {
            (CmpOp::Eq, Dialect::Ngql) => "==",
            (CmpOp::Eq, Dialect::Cypher) => "=",
            (CmpOp::Ne, _) => "!=",
            (CmpOp::Gt, _) => ">",
            (CmpOp::Ge, _) => ">=",
            (CmpOp::Lt, _) => "<",
            (CmpOp::Le, _) => "<=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub prop: PropRef,
    pub op: CmpOp,
    pub value: Literal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum BoolExpr {
    Cmp(Comparison),
    And(Box<BoolExpr>, Box<BoolExpr>),
    Or(Box<BoolExpr>, Box<BoolExpr>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ReturnItem {
    Prop(PropRef),
    /// `count(prop)`; `None` is `count(*)`.
    Count(Option<PropRef>),
}

impl ReturnItem {
    pub fn display(&self) -> String {
        match self {
            ReturnItem::Prop(p) => p.display(),
            ReturnItem::Count(Some(p)) => format!("count({})", p.display()),
            ReturnItem::Count(None) => "count(*)".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GqlAst {
    pub dialect: Dialect,
    /// `nodes.len() == edges.len() + 1` always.
    pub nodes: Vec<NodePattern>,
    pub edges: Vec<EdgePattern>,
    pub where_clause: Option<BoolExpr>,
    pub distinct: bool,
    pub returns: Vec<ReturnItem>,
    pub limit: Option<usize>,
}

impl GqlAst {
    /// Number of edge patterns in the MATCH chain.
    pub fn hop_count(&self) -> usize {
        self.edges.len()
    }

    /// The node pattern a variable is bound to, if any.
    pub fn node_binding(&self, variable: &str) -> Option<&NodePattern> {
        self.nodes
            .iter()
            .find(|n| n.variable.as_deref() == Some(variable))
    }

    pub fn edge_binding(&self, variable: &str) -> Option<&EdgePattern> {
        self.edges
            .iter()
            .find(|e| e.variable.as_deref() == Some(variable))
    }

    pub fn where_comparisons(&self) -> Vec<&Comparison> {
        let mut out = Vec::new();
        fn visit<'a>(e: &'a BoolExpr, out: &mut Vec<&'a Comparison>) {
            match e {
                BoolExpr::Cmp(c) => out.push(c),
                BoolExpr::And(a, b) | BoolExpr::Or(a, b) => {
                    visit(a, out);
                    visit(b, out);
                }
            }
        }
        if let Some(w) = &self.where_clause {
            visit(w, &mut out);
        }
        out
    }
}
