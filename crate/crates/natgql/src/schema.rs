//! Graph schema model: node/edge type definitions, schema file loading,
//! connected-subschema enumeration, and canonical prompt-text rendering.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SchemaError {
    #[error("schema parse error: {0}")]
    Parse(String),
    #[error("schema must declare at least one node type")]
    NoNodeTypes,
    #[error("empty name in {0}")]
    EmptyName(&'static str),
    #[error("duplicate node type `{0}`")]
    DuplicateNodeType(String),
    #[error("duplicate edge type `{0}`")]
    DuplicateEdgeType(String),
    #[error("duplicate property `{prop}` on `{owner}`")]
    DuplicateProperty { owner: String, prop: String },
    #[error("edge `{edge}` references unknown node type `{endpoint}`")]
    DanglingEndpoint { edge: String, endpoint: String },
    #[error("io error reading schema: {0}")]
    Io(#[from] std::io::Error),
}

/// Kind of a property value, shared by schema declarations and graph data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValueKind {
    String,
    Integer,
    Float,
    Boolean,
    Date,
}

impl fmt::Display for ValueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ValueKind::String => "string",
            ValueKind::Integer => "integer",
            ValueKind::Float => "float",
            ValueKind::Boolean => "boolean",
            ValueKind::Date => "date",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropertyDef {
    pub name: String,
    pub value_kind: ValueKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeTypeDef {
    pub name: String,
    #[serde(default)]
    pub properties: Vec<PropertyDef>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeTypeDef {
    pub name: String,
    pub src: String,
    pub dst: String,
    #[serde(default)]
    pub properties: Vec<PropertyDef>,
}

/// The full schema of a property graph: declared node and edge types.
///
/// Immutable after [`GraphSchema::load`]; all lookups and enumeration are
/// read-only and safe to share across threads.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSchema {
    pub node_types: Vec<NodeTypeDef>,
    pub edge_types: Vec<EdgeTypeDef>,
}

/// A connected subset of a schema, stored as node/edge type name sets.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ConnectedSubschema {
    pub nodes: BTreeSet<String>,
    pub edges: BTreeSet<String>,
}

impl ConnectedSubschema {
    pub fn new<N, E, S>(nodes: N, edges: E) -> Self
    where
        N: IntoIterator<Item = S>,
        E: IntoIterator<Item = S>,
        S: Into<String>,
    {
        ConnectedSubschema {
            nodes: nodes.into_iter().map(Into::into).collect(),
            edges: edges.into_iter().map(Into::into).collect(),
        }
    }

    /// Checks endpoint closure and connectivity against `schema`.
    pub fn is_valid(&self, schema: &GraphSchema) -> bool {
        if self.nodes.is_empty() {
            return false;
        }
        if !self.nodes.iter().all(|n| schema.node_type(n).is_some()) {
            return false;
        }
        for e in &self.edges {
            match schema.edge_type(e) {
                Some(def) => {
                    if !self.nodes.contains(&def.src) || !self.nodes.contains(&def.dst) {
                        return false;
                    }
                }
                None => return false,
            }
        }
        self.is_connected(schema)
    }

    fn is_connected(&self, schema: &GraphSchema) -> bool {
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        let start = match self.nodes.iter().next() {
            Some(n) => n.as_str(),
            None => return false,
        };
        let mut stack = vec![start];
        seen.insert(start);
        while let Some(cur) = stack.pop() {
            for e in &self.edges {
                let def = match schema.edge_type(e) {
                    Some(d) => d,
                    None => return false,
                };
                for next in [def.src.as_str(), def.dst.as_str()] {
                    let other = if next == cur {
                        if def.src == def.dst {
                            continue;
                        }
                        if def.src == cur {
                            def.dst.as_str()
                        } else {
                            def.src.as_str()
                        }
                    } else {
                        continue;
                    };
                    if self.nodes.contains(other) && seen.insert(other) {
                        stack.push(other);
                    }
                }
            }
        }
        seen.len() == self.nodes.len()
    }
}

impl GraphSchema {
    /// Parses and validates a schema from its JSON file content.
    pub fn from_json_str(source: &str) -> Result<Self, SchemaError> {
        let schema: GraphSchema =
            serde_json::from_str(source).map_err(|e| SchemaError::Parse(e.to_string()))?;
        schema.validate()?;
        Ok(schema)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, SchemaError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    /// Serializes back to the schema file format.
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("schema serialization cannot fail")
    }

    fn validate(&self) -> Result<(), SchemaError> {
        if self.node_types.is_empty() {
            return Err(SchemaError::NoNodeTypes);
        }
        let mut node_names = BTreeSet::new();
        for nt in &self.node_types {
            if nt.name.is_empty() {
                return Err(SchemaError::EmptyName("node type"));
            }
            if !node_names.insert(nt.name.as_str()) {
                return Err(SchemaError::DuplicateNodeType(nt.name.clone()));
            }
            check_properties(&nt.name, &nt.properties)?;
        }
        let mut edge_names = BTreeSet::new();
        for et in &self.edge_types {
            if et.name.is_empty() {
                return Err(SchemaError::EmptyName("edge type"));
            }
            if !edge_names.insert(et.name.as_str()) {
                return Err(SchemaError::DuplicateEdgeType(et.name.clone()));
            }
            check_properties(&et.name, &et.properties)?;
            for endpoint in [&et.src, &et.dst] {
                if !node_names.contains(endpoint.as_str()) {
                    return Err(SchemaError::DanglingEndpoint {
                        edge: et.name.clone(),
                        endpoint: endpoint.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn node_type(&self, name: &str) -> Option<&NodeTypeDef> {
        self.node_types.iter().find(|nt| nt.name == name)
    }

    pub fn edge_type(&self, name: &str) -> Option<&EdgeTypeDef> {
        self.edge_types.iter().find(|et| et.name == name)
    }

    /// The whole schema as one subschema (always valid when the schema
    /// graph is connected; used as the preprocessor fallback).
    pub fn as_subschema(&self) -> ConnectedSubschema {
        ConnectedSubschema {
            nodes: self.node_types.iter().map(|n| n.name.clone()).collect(),
            edges: self.edge_types.iter().map(|e| e.name.clone()).collect(),
        }
    }

    /// Canonical prompt rendering of the full schema.
    pub fn prompt_text(&self) -> String {
        self.render(None)
    }

    /// Canonical prompt rendering restricted to `sub`'s members.
    pub fn subschema_prompt_text(&self, sub: &ConnectedSubschema) -> String {
        self.render(Some(sub))
    }

    // Declaration order, so prompts stay stable when types are appended.
    fn render(&self, sub: Option<&ConnectedSubschema>) -> String {
        let mut out = String::from("Nodes:\n");
        for nt in &self.node_types {
            if let Some(s) = sub {
                if !s.nodes.contains(&nt.name) {
                    continue;
                }
            }
            out.push_str("  ");
            out.push_str(&nt.name);
            out.push_str(&render_props(&nt.properties));
            out.push('\n');
        }
        out.push_str("Edges:\n");
        for et in &self.edge_types {
            if let Some(s) = sub {
                if !s.edges.contains(&et.name) {
                    continue;
                }
            }
            out.push_str(&format!(
                "  ({})-[{}{}]->({})\n",
                et.src,
                et.name,
                render_props(&et.properties),
                et.dst
            ));
        }
        out
    }
}

fn render_props(props: &[PropertyDef]) -> String {
    if props.is_empty() {
        return String::new();
    }
    let inner: Vec<String> = props
        .iter()
        .map(|p| format!("{}: {}", p.name, p.value_kind))
        .collect();
    format!("({})", inner.join(", "))
}

fn check_properties(owner: &str, props: &[PropertyDef]) -> Result<(), SchemaError> {
    let mut seen = BTreeSet::new();
    for p in props {
        if p.name.is_empty() {
            return Err(SchemaError::EmptyName("property"));
        }
        if !seen.insert(p.name.as_str()) {
            return Err(SchemaError::DuplicateProperty {
                owner: owner.to_string(),
                prop: p.name.clone(),
            });
        }
    }
    Ok(())
}

/// Enumerates every connected subschema reachable as a path of
/// `0..=max_hops` schema edges, deduplicated as (node-set, edge-set) pairs.
///
/// Edges may be walked in either direction. A path never reuses an edge
/// type; a node type may recur only when reached over a fresh edge type
/// (this admits schema-level self-loops such as an industry→industry edge).
pub fn enumerate_subschemas(schema: &GraphSchema, max_hops: usize) -> Vec<ConnectedSubschema> {
    let mut found: BTreeSet<ConnectedSubschema> = BTreeSet::new();
    // Adjacency over edge types: type name -> (edge name, other endpoint).
    let mut adj: BTreeMap<&str, Vec<(&str, &str)>> = BTreeMap::new();
    for nt in &schema.node_types {
        adj.insert(nt.name.as_str(), Vec::new());
        found.insert(ConnectedSubschema::new([nt.name.as_str()], []));
    }
    for et in &schema.edge_types {
        adj.get_mut(et.src.as_str())
            .expect("validated schema")
            .push((et.name.as_str(), et.dst.as_str()));
        if et.src != et.dst {
            adj.get_mut(et.dst.as_str())
                .expect("validated schema")
                .push((et.name.as_str(), et.src.as_str()));
        }
    }

    let mut path_nodes: Vec<&str> = Vec::new();
    let mut path_edges: Vec<&str> = Vec::new();
    for nt in &schema.node_types {
        path_nodes.push(nt.name.as_str());
        walk(&adj, max_hops, &mut path_nodes, &mut path_edges, &mut found);
        path_nodes.pop();
    }
    found.into_iter().collect()
}

fn walk<'a>(
    adj: &BTreeMap<&'a str, Vec<(&'a str, &'a str)>>,
    max_hops: usize,
    path_nodes: &mut Vec<&'a str>,
    path_edges: &mut Vec<&'a str>,
    found: &mut BTreeSet<ConnectedSubschema>,
) {
    if path_edges.len() >= max_hops {
        return;
    }
    let cur = *path_nodes.last().expect("nonempty path");
    let neighbors = adj.get(cur).map(Vec::as_slice).unwrap_or(&[]);
    for &(edge, next) in neighbors {
        if path_edges.contains(&edge) {
            continue;
        }
        path_edges.push(edge);
        path_nodes.push(next);
        found.insert(ConnectedSubschema::new(
            path_nodes.iter().copied(),
            path_edges.iter().copied(),
        ));
        walk(adj, max_hops, path_nodes, path_edges, found);
        path_nodes.pop();
        path_edges.pop();
    }
}
