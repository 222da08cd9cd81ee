//! Pattern-match executor over an in-memory [`PropertyGraph`].
//!
//! Matching follows the usual graph-query convention: node instances may
//! recur along a chain, edge instances may not. Row order is lexicographic
//! over projected values so results are reproducible.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::ast::*;
use crate::graph::{PropertyGraph, Value};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExecError {
    #[error("unknown node type `{0}`")]
    UnknownNodeType(String),
    #[error("unknown edge type `{0}`")]
    UnknownEdgeType(String),
    #[error("unknown property `{property}` on type `{type_name}`")]
    UnknownProperty { type_name: String, property: String },
    #[error("variable `{variable}` is bound to type `{bound}` but referenced as `{referenced}`")]
    TypeMismatch {
        variable: String,
        bound: String,
        referenced: String,
    },
    #[error("cannot compare {lhs} value of `{prop}` with {rhs} literal")]
    ValueTypeMismatch {
        prop: String,
        lhs: &'static str,
        rhs: &'static str,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl ResultTable {
    pub fn empty(columns: Vec<String>) -> Self {
        ResultTable {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Column-name → values mapping used by dataset Answer fields.
    pub fn to_answer_map(&self) -> BTreeMap<String, Vec<serde_json::Value>> {
        let mut out: BTreeMap<String, Vec<serde_json::Value>> = BTreeMap::new();
        for (ci, col) in self.columns.iter().enumerate() {
            let values = self.rows.iter().map(|r| r[ci].to_json()).collect();
            out.insert(col.clone(), values);
        }
        out
    }
}

struct Binding {
    nodes: Vec<usize>,
    edges: Vec<usize>,
}

pub fn execute(ast: &GqlAst, graph: &PropertyGraph) -> Result<ResultTable, ExecError> {
    validate_against_schema(ast, graph)?;

    let columns: Vec<String> = ast.returns.iter().map(|r| r.display()).collect();

    // Enumerate chain bindings.
    let mut bindings: Vec<Binding> = Vec::new();
    let starts: Vec<usize> = graph
        .nodes()
        .iter()
        .enumerate()
        .filter(|(_, n)| node_matches(n.node_type.as_str(), &n.properties, &ast.nodes[0]))
        .map(|(i, _)| i)
        .collect();
    for start in starts {
        extend(
            ast,
            graph,
            &mut Binding {
                nodes: vec![start],
                edges: vec![],
            },
            &mut bindings,
        )?;
    }

    // WHERE filter.
    let mut kept: Vec<&Binding> = Vec::new();
    for b in &bindings {
        let keep = match &ast.where_clause {
            Some(expr) => eval_expr(expr, ast, graph, b)?,
            None => true,
        };
        if keep {
            kept.push(b);
        }
    }

    // Projection, with implicit grouping when count() items are present.
    let has_count = ast
        .returns
        .iter()
        .any(|r| matches!(r, ReturnItem::Count(_)));
    let mut rows: Vec<Vec<Value>> = Vec::new();
    if has_count {
        // Group key = the non-count projections, in item order.
        let mut groups: Vec<(Vec<Value>, Vec<&Binding>)> = Vec::new();
        for b in &kept {
            let mut key = Vec::new();
            for item in &ast.returns {
                if let ReturnItem::Prop(p) = item {
                    key.push(resolve_prop(p, ast, graph, b)?);
                }
            }
            match groups.iter_mut().find(|(k, _)| k == &key) {
                Some((_, members)) => members.push(b),
                None => groups.push((key, vec![b])),
            }
        }
        if groups.is_empty() && ast.returns.iter().all(|r| matches!(r, ReturnItem::Count(_))) {
            // count() over no bindings is a single zero row.
            groups.push((Vec::new(), Vec::new()));
        }
        for (key, members) in groups {
            let mut row = Vec::new();
            let mut key_iter = key.into_iter();
            for item in &ast.returns {
                match item {
                    ReturnItem::Prop(_) => row.push(key_iter.next().expect("key arity")),
                    ReturnItem::Count(None) => row.push(Value::Int(members.len() as i64)),
                    ReturnItem::Count(Some(p)) => {
                        let mut n = 0i64;
                        for b in &members {
                            if resolve_prop(p, ast, graph, b)? != Value::Null {
                                n += 1;
                            }
                        }
                        row.push(Value::Int(n));
                    }
                }
            }
            rows.push(row);
        }
    } else {
        for b in &kept {
            let mut row = Vec::new();
            for item in &ast.returns {
                if let ReturnItem::Prop(p) = item {
                    row.push(resolve_prop(p, ast, graph, b)?);
                }
            }
            rows.push(row);
        }
    }

    rows.sort_by(|a, b| {
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| x.order_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    if ast.distinct {
        rows.dedup();
    }
    if let Some(limit) = ast.limit {
        rows.truncate(limit);
    }

    Ok(ResultTable { columns, rows })
}

fn extend(
    ast: &GqlAst,
    graph: &PropertyGraph,
    partial: &mut Binding,
    out: &mut Vec<Binding>,
) -> Result<(), ExecError> {
    let depth = partial.edges.len();
    if depth == ast.edges.len() {
        out.push(Binding {
            nodes: partial.nodes.clone(),
            edges: partial.edges.clone(),
        });
        return Ok(());
    }
    let edge_pat = &ast.edges[depth];
    let next_pat = &ast.nodes[depth + 1];
    let cur_id = graph.nodes()[*partial.nodes.last().expect("nonempty")].id.clone();
    let candidates: Vec<(usize, usize)> = match edge_pat.direction {
        EdgeDirection::Forward => graph
            .edges_from(&cur_id)
            .filter(|(_, e)| e.edge_type == edge_pat.edge_type)
            .map(|(ei, e)| (ei, node_index(graph, &e.dst)))
            .collect(),
        EdgeDirection::Backward => graph
            .edges_into(&cur_id)
            .filter(|(_, e)| e.edge_type == edge_pat.edge_type)
            .map(|(ei, e)| (ei, node_index(graph, &e.src)))
            .collect(),
    };
    for (ei, ni) in candidates {
        if partial.edges.contains(&ei) {
            continue;
        }
        let n = &graph.nodes()[ni];
        if !node_matches(&n.node_type, &n.properties, next_pat) {
            continue;
        }
        partial.edges.push(ei);
        partial.nodes.push(ni);
        extend(ast, graph, partial, out)?;
        partial.edges.pop();
        partial.nodes.pop();
    }
    Ok(())
}

fn node_index(graph: &PropertyGraph, id: &str) -> usize {
    graph
        .nodes()
        .iter()
        .position(|n| n.id == id)
        .expect("edge endpoints validated at load")
}

fn node_matches(node_type: &str, props: &BTreeMap<String, Value>, pat: &NodePattern) -> bool {
    if let Some(t) = &pat.node_type {
        if t != node_type {
            return false;
        }
    }
    for (prop, literal) in &pat.constraints {
        match props.get(prop) {
            Some(v) => {
                if !values_equal(v, &literal.to_value()) {
                    return false;
                }
            }
            None => return false,
        }
    }
    true
}

fn values_equal(a: &Value, b: &Value) -> bool {
    match (a.as_f64(), b.as_f64()) {
        (Some(x), Some(y)) => x == y,
        _ => match (a, b) {
            (Value::Str(x), Value::Str(y))
            | (Value::Date(x), Value::Date(y))
            | (Value::Str(x), Value::Date(y))
            | (Value::Date(x), Value::Str(y)) => x == y,
            _ => a == b,
        },
    }
}

fn eval_expr(
    expr: &BoolExpr,
    ast: &GqlAst,
    graph: &PropertyGraph,
    b: &Binding,
) -> Result<bool, ExecError> {
    match expr {
        BoolExpr::And(l, r) => Ok(eval_expr(l, ast, graph, b)? && eval_expr(r, ast, graph, b)?),
        BoolExpr::Or(l, r) => Ok(eval_expr(l, ast, graph, b)? || eval_expr(r, ast, graph, b)?),
        BoolExpr::Cmp(cmp) => {
            let lhs = resolve_prop(&cmp.prop, ast, graph, b)?;
            if lhs == Value::Null {
                return Ok(false);
            }
            let rhs = cmp.value.to_value();
            compare(&lhs, cmp.op, &rhs, &cmp.prop.display())
        }
    }
}

fn compare(lhs: &Value, op: CmpOp, rhs: &Value, prop: &str) -> Result<bool, ExecError> {
    use std::cmp::Ordering;
    let ord: Ordering = match (lhs.as_f64(), rhs.as_f64()) {
        (Some(x), Some(y)) => x
            .partial_cmp(&y)
            .expect("graph values are finite"),
        (None, None) => match (lhs, rhs) {
            (Value::Str(a), Value::Str(b))
            | (Value::Date(a), Value::Date(b))
            | (Value::Str(a), Value::Date(b))
            | (Value::Date(a), Value::Str(b)) => a.cmp(b),
            (Value::Bool(a), Value::Bool(b)) => {
                return match op {
                    CmpOp::Eq => Ok(a == b),
                    CmpOp::Ne => Ok(a != b),
                    _ => Err(ExecError::ValueTypeMismatch {
                        prop: prop.to_string(),
                        lhs: "boolean",
                        rhs: "boolean",
                    }),
                };
            }
            _ => {
                return Err(ExecError::ValueTypeMismatch {
                    prop: prop.to_string(),
                    lhs: lhs.kind_name(),
                    rhs: rhs.kind_name(),
                });
            }
        },
        _ => {
            return Err(ExecError::ValueTypeMismatch {
                prop: prop.to_string(),
                lhs: lhs.kind_name(),
                rhs: rhs.kind_name(),
            });
        }
    };
    Ok(match op {
        CmpOp::Eq => ord == Ordering::Equal,
        CmpOp::Ne => ord != Ordering::Equal,
        CmpOp::Gt => ord == Ordering::Greater,
        CmpOp::Ge => ord != Ordering::Less,
        CmpOp::Lt => ord == Ordering::Less,
        CmpOp::Le => ord != Ordering::Greater,
    })
}

fn resolve_prop(
    p: &PropRef,
    ast: &GqlAst,
    graph: &PropertyGraph,
    b: &Binding,
) -> Result<Value, ExecError> {
    // Node variable?
    for (pi, pat) in ast.nodes.iter().enumerate() {
        if pat.variable.as_deref() == Some(p.variable.as_str()) {
            let inst = &graph.nodes()[b.nodes[pi]];
            if let Some(t) = &p.type_name {
                if *t != inst.node_type {
                    return Err(ExecError::TypeMismatch {
                        variable: p.variable.clone(),
                        bound: inst.node_type.clone(),
                        referenced: t.clone(),
                    });
                }
            }
            return Ok(inst.properties.get(&p.property).cloned().unwrap_or(Value::Null));
        }
    }
    for (pi, pat) in ast.edges.iter().enumerate() {
        if pat.variable.as_deref() == Some(p.variable.as_str()) {
            let inst = &graph.edges()[b.edges[pi]];
            if let Some(t) = &p.type_name {
                if *t != inst.edge_type {
                    return Err(ExecError::TypeMismatch {
                        variable: p.variable.clone(),
                        bound: inst.edge_type.clone(),
                        referenced: t.clone(),
                    });
                }
            }
            return Ok(inst.properties.get(&p.property).cloned().unwrap_or(Value::Null));
        }
    }
    unreachable!("parser validates variable binding");
}

fn validate_against_schema(ast: &GqlAst, graph: &PropertyGraph) -> Result<(), ExecError> {
    let schema = graph.schema();
    for n in &ast.nodes {
        if let Some(t) = &n.node_type {
            let def = schema
                .node_type(t)
                .ok_or_else(|| ExecError::UnknownNodeType(t.clone()))?;
            for (prop, _) in &n.constraints {
                if !def.properties.iter().any(|p| &p.name == prop) {
                    return Err(ExecError::UnknownProperty {
                        type_name: t.clone(),
                        property: prop.clone(),
                    });
                }
            }
        }
    }
    for e in &ast.edges {
        if schema.edge_type(&e.edge_type).is_none() {
            return Err(ExecError::UnknownEdgeType(e.edge_type.clone()));
        }
    }
    // Property references: check statically where the pattern pins a type.
    let check = |p: &PropRef| -> Result<(), ExecError> {
        let bound_node = ast.node_binding(&p.variable);
        let bound_edge = ast.edge_binding(&p.variable);
        let (declared, type_name): (Option<&Vec<crate::schema::PropertyDef>>, Option<String>) =
            if let Some(np) = bound_node {
                let t = match (&p.type_name, &np.node_type) {
                    (Some(reffed), Some(patterned)) if reffed != patterned => {
                        return Err(ExecError::TypeMismatch {
                            variable: p.variable.clone(),
                            bound: patterned.clone(),
                            referenced: reffed.clone(),
                        });
                    }
                    (Some(reffed), _) => Some(reffed.clone()),
                    (None, t) => t.clone(),
                };
                match t {
                    Some(t) => {
                        let def = schema
                            .node_type(&t)
                            .ok_or_else(|| ExecError::UnknownNodeType(t.clone()))?;
                        (Some(&def.properties), Some(t))
                    }
                    None => (None, None),
                }
            } else if let Some(ep) = bound_edge {
                if let Some(reffed) = &p.type_name {
                    if reffed != &ep.edge_type {
                        return Err(ExecError::TypeMismatch {
                            variable: p.variable.clone(),
                            bound: ep.edge_type.clone(),
                            referenced: reffed.clone(),
                        });
                    }
                }
                let def = schema
                    .edge_type(&ep.edge_type)
                    .ok_or_else(|| ExecError::UnknownEdgeType(ep.edge_type.clone()))?;
                (Some(&def.properties), Some(ep.edge_type.clone()))
            } else {
                unreachable!("parser validates variable binding");
            };
        if let (Some(props), Some(t)) = (declared, type_name) {
            if !props.iter().any(|d| d.name == p.property) {
                return Err(ExecError::UnknownProperty {
                    type_name: t,
                    property: p.property.clone(),
                });
            }
        }
        Ok(())
    };
    for cmp in ast.where_comparisons() {
        check(&cmp.prop)?;
    }
    for item in &ast.returns {
        match item {
            ReturnItem::Prop(p) | ReturnItem::Count(Some(p)) => check(p)?,
            ReturnItem::Count(None) => {}
        }
    }
    Ok(())
}
