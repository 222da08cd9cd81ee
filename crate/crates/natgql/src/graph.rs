//! In-memory property graph: instance data bound to a [`GraphSchema`],
//! loaded from the graph data file format.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::schema::{GraphSchema, ValueKind};

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("graph parse error: {0}")]
    Parse(String),
    #[error("duplicate node id `{0}`")]
    DuplicateNodeId(String),
    #[error("node `{id}` has unknown type `{node_type}`")]
    UnknownNodeType { id: String, node_type: String },
    #[error("edge references unknown type `{0}`")]
    UnknownEdgeType(String),
    #[error("edge `{edge_type}` references missing node id `{id}`")]
    MissingEndpoint { edge_type: String, id: String },
    #[error("edge `{edge_type}` endpoint `{id}` has type `{found}`, schema requires `{required}`")]
    EndpointTypeMismatch {
        edge_type: String,
        id: String,
        found: String,
        required: String,
    },
    #[error("property `{prop}` on {owner} is not declared in the schema")]
    UndeclaredProperty { owner: String, prop: String },
    #[error("property `{prop}` on {owner} has kind {found}, schema requires {required}")]
    PropertyKindMismatch {
        owner: String,
        prop: String,
        found: String,
        required: ValueKind,
    },
    #[error("io error reading graph: {0}")]
    Io(#[from] std::io::Error),
}

/// A property value. `Null` only arises during query execution (missing
/// projection); it is not loadable from graph files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Null,
    Bool(bool),
    Int(i64),
    Float(f64),
    Str(String),
    Date(String),
}

impl Value {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Value::Null => "null",
            Value::Bool(_) => "boolean",
            Value::Int(_) => "integer",
            Value::Float(_) => "float",
            Value::Str(_) => "string",
            Value::Date(_) => "date",
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Int(i) => Some(*i as f64),
            Value::Float(f) => Some(*f),
            _ => None,
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Value::Null => 0,
            Value::Bool(_) => 1,
            Value::Int(_) => 2,
            Value::Float(_) => 3,
            Value::Str(_) => 4,
            Value::Date(_) => 5,
        }
    }

    /// Total order used only for deterministic row ordering.
    pub fn order_cmp(&self, other: &Value) -> Ordering {
        use Value::*;
        match (self, other) {
            (Bool(a), Bool(b)) => a.cmp(b),
            (Int(a), Int(b)) => a.cmp(b),
            (Float(a), Float(b)) => a.total_cmp(b),
            (Str(a), Str(b)) | (Date(a), Date(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Value::Null => serde_json::Value::Null,
            Value::Bool(b) => serde_json::Value::Bool(*b),
            Value::Int(i) => serde_json::json!(i),
            Value::Float(f) => serde_json::json!(f),
            Value::Str(s) | Value::Date(s) => serde_json::Value::String(s.clone()),
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawNode {
    id: String,
    #[serde(rename = "type")]
    node_type: String,
    #[serde(default)]
    properties: BTreeMap<String, serde_json::Value>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawGraph {
    nodes: Vec<RawNode>,
    edges: Vec<RawEdge>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawEdge {
    src: String,
    dst: String,
    #[serde(rename = "type")]
    edge_type: String,
    #[serde(default)]
    properties: BTreeMap<String, serde_json::Value>,
}

#[derive(Debug, Clone)]
pub struct NodeInstance {
    pub id: String,
    pub node_type: String,
    pub properties: BTreeMap<String, Value>,
}

#[derive(Debug, Clone)]
pub struct EdgeInstance {
    pub src: String,
    pub dst: String,
    pub edge_type: String,
    pub properties: BTreeMap<String, Value>,
}

/// Immutable instance graph validated against its schema. Indexes are
/// precomputed at load; all access afterwards is read-only.
#[derive(Debug, Clone)]
pub struct PropertyGraph {
    schema: GraphSchema,
    nodes: Vec<NodeInstance>,
    edges: Vec<EdgeInstance>,
    by_id: HashMap<String, usize>,
    by_type: HashMap<String, Vec<usize>>,
    out_edges: HashMap<String, Vec<usize>>,
    in_edges: HashMap<String, Vec<usize>>,
}

impl PropertyGraph {
    pub fn from_json_str(source: &str, schema: &GraphSchema) -> Result<Self, GraphError> {
        let raw: RawGraph =
            serde_json::from_str(source).map_err(|e| GraphError::Parse(e.to_string()))?;
        Self::build(raw, schema)
    }

    pub fn load(path: impl AsRef<Path>, schema: &GraphSchema) -> Result<Self, GraphError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text, schema)
    }

    fn build(raw: RawGraph, schema: &GraphSchema) -> Result<Self, GraphError> {
        let mut nodes = Vec::with_capacity(raw.nodes.len());
        let mut by_id = HashMap::new();
        let mut by_type: HashMap<String, Vec<usize>> = HashMap::new();
        for (idx, rn) in raw.nodes.into_iter().enumerate() {
            let def = schema
                .node_type(&rn.node_type)
                .ok_or_else(|| GraphError::UnknownNodeType {
                    id: rn.id.clone(),
                    node_type: rn.node_type.clone(),
                })?;
            let owner = format!("node `{}`", rn.id);
            let properties = coerce_properties(&owner, rn.properties, &def.properties)?;
            if by_id.insert(rn.id.clone(), idx).is_some() {
                return Err(GraphError::DuplicateNodeId(rn.id));
            }
            by_type.entry(rn.node_type.clone()).or_default().push(idx);
            nodes.push(NodeInstance {
                id: rn.id,
                node_type: rn.node_type,
                properties,
            });
        }

        let mut edges = Vec::with_capacity(raw.edges.len());
        let mut out_edges: HashMap<String, Vec<usize>> = HashMap::new();
        let mut in_edges: HashMap<String, Vec<usize>> = HashMap::new();
        for (idx, re) in raw.edges.into_iter().enumerate() {
            let def = schema
                .edge_type(&re.edge_type)
                .ok_or_else(|| GraphError::UnknownEdgeType(re.edge_type.clone()))?;
            for (id, required) in [(&re.src, &def.src), (&re.dst, &def.dst)] {
                let node_idx = *by_id.get(id).ok_or_else(|| GraphError::MissingEndpoint {
                    edge_type: re.edge_type.clone(),
                    id: id.clone(),
                })?;
                let found = &nodes[node_idx].node_type;
                if found != required {
                    return Err(GraphError::EndpointTypeMismatch {
                        edge_type: re.edge_type.clone(),
                        id: id.clone(),
                        found: found.clone(),
                        required: required.clone(),
                    });
                }
            }
            let owner = format!("edge `{}` ({} -> {})", re.edge_type, re.src, re.dst);
            let properties = coerce_properties(&owner, re.properties, &def.properties)?;
            out_edges.entry(re.src.clone()).or_default().push(idx);
            in_edges.entry(re.dst.clone()).or_default().push(idx);
            edges.push(EdgeInstance {
                src: re.src,
                dst: re.dst,
                edge_type: re.edge_type,
                properties,
            });
        }

        Ok(PropertyGraph {
            schema: schema.clone(),
            nodes,
            edges,
            by_id,
            by_type,
            out_edges,
            in_edges,
        })
    }

    pub fn schema(&self) -> &GraphSchema {
        &self.schema
    }

    pub fn nodes(&self) -> &[NodeInstance] {
        &self.nodes
    }

    pub fn edges(&self) -> &[EdgeInstance] {
        &self.edges
    }

    pub fn node_by_id(&self, id: &str) -> Option<&NodeInstance> {
        self.by_id.get(id).map(|&i| &self.nodes[i])
    }

    pub fn nodes_of_type(&self, node_type: &str) -> impl Iterator<Item = &NodeInstance> {
        self.by_type
            .get(node_type)
            .into_iter()
            .flatten()
            .map(move |&i| &self.nodes[i])
    }

    pub fn edges_from(&self, node_id: &str) -> impl Iterator<Item = (usize, &EdgeInstance)> {
        self.out_edges
            .get(node_id)
            .into_iter()
            .flatten()
            .map(move |&i| (i, &self.edges[i]))
    }

    pub fn edges_into(&self, node_id: &str) -> impl Iterator<Item = (usize, &EdgeInstance)> {
        self.in_edges
            .get(node_id)
            .into_iter()
            .flatten()
            .map(move |&i| (i, &self.edges[i]))
    }

    /// True when `literal` occurs as some string property value anywhere in
    /// the graph (used by error categorization for value-linking checks).
    pub fn contains_string_value(&self, literal: &str) -> bool {
        self.nodes
            .iter()
            .map(|n| &n.properties)
            .chain(self.edges.iter().map(|e| &e.properties))
            .flat_map(|props| props.values())
            .any(|v| matches!(v, Value::Str(s) | Value::Date(s) if s == literal))
    }
}

fn coerce_properties(
    owner: &str,
    raw: BTreeMap<String, serde_json::Value>,
    defs: &[crate::schema::PropertyDef],
) -> Result<BTreeMap<String, Value>, GraphError> {
    let mut out = BTreeMap::new();
    for (name, json) in raw {
        let def = defs.iter().find(|d| d.name == name).ok_or_else(|| {
            GraphError::UndeclaredProperty {
                owner: owner.to_string(),
                prop: name.clone(),
            }
        })?;
        let value = coerce_value(&json, def.value_kind).ok_or_else(|| {
            GraphError::PropertyKindMismatch {
                owner: owner.to_string(),
                prop: name.clone(),
                found: json_kind_name(&json).to_string(),
                required: def.value_kind,
            }
        })?;
        out.insert(name, value);
    }
    Ok(out)
}

fn coerce_value(json: &serde_json::Value, kind: ValueKind) -> Option<Value> {
    use serde_json::Value as J;
    match (kind, json) {
        (ValueKind::String, J::String(s)) => Some(Value::Str(s.clone())),
        (ValueKind::Date, J::String(s)) => Some(Value::Date(s.clone())),
        (ValueKind::Integer, J::Number(n)) => n.as_i64().map(Value::Int),
        (ValueKind::Float, J::Number(n)) => n.as_f64().filter(|f| f.is_finite()).map(Value::Float),
        (ValueKind::Boolean, J::Bool(b)) => Some(Value::Bool(*b)),
        _ => None,
    }
}

fn json_kind_name(json: &serde_json::Value) -> &'static str {
    use serde_json::Value as J;
    match json {
        J::Null => "null",
        J::Bool(_) => "boolean",
        J::Number(n) if n.is_i64() => "integer",
        J::Number(_) => "float",
        J::String(_) => "string",
        J::Array(_) => "array",
        J::Object(_) => "object",
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::schema::GraphSchema;

    pub(crate) fn fixture() -> (GraphSchema, PropertyGraph) {
        let schema =
            GraphSchema::load(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/schema.json"))
                .unwrap();
        let graph = PropertyGraph::load(
            concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/graph.json"),
            &schema,
        )
        .unwrap();
        (schema, graph)
    }

    #[test]
    fn loads_fixture_graph() {
        let (_, g) = fixture();
        assert_eq!(g.nodes().len(), 14);
        assert_eq!(g.edges().len(), 14);
        assert_eq!(g.nodes_of_type("industry").count(), 4);
        assert!(g.contains_string_value("梁东"));
        assert!(!g.contains_string_value("不存在"));
    }

    #[test]
    fn rejects_unknown_node_type() {
        let schema =
            GraphSchema::load(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/schema.json"))
                .unwrap();
        let err = PropertyGraph::from_json_str(
            r#"{"nodes": [{"id": "x", "type": "bond", "properties": {}}], "edges": []}"#,
            &schema,
        )
        .unwrap_err();
        assert!(matches!(err, GraphError::UnknownNodeType { .. }));
    }

    #[test]
    fn rejects_property_kind_mismatch() {
        let schema =
            GraphSchema::load(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/schema.json"))
                .unwrap();
        let err = PropertyGraph::from_json_str(
            r#"{"nodes": [{"id": "x", "type": "stock", "properties": {"price": "cheap"}}], "edges": []}"#,
            &schema,
        )
        .unwrap_err();
        assert!(matches!(err, GraphError::PropertyKindMismatch { .. }));
    }

    #[test]
    fn rejects_endpoint_type_mismatch() {
        let schema =
            GraphSchema::load(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/schema.json"))
                .unwrap();
        let err = PropertyGraph::from_json_str(
            r#"{
              "nodes": [
                {"id": "a", "type": "chairman", "properties": {"name": "x"}},
                {"id": "b", "type": "fund", "properties": {"name": "y"}}
              ],
              "edges": [{"src": "a", "dst": "b", "type": "is_chairman_of", "properties": {}}]
            }"#,
            &schema,
        )
        .unwrap_err();
        assert!(matches!(err, GraphError::EndpointTypeMismatch { .. }));
    }

    #[test]
    fn value_order_is_total_and_deterministic() {
        let mut vals = vec![
            Value::Str("b".into()),
            Value::Int(2),
            Value::Float(1.5),
            Value::Str("a".into()),
            Value::Null,
            Value::Bool(true),
        ];
        vals.sort_by(|a, b| a.order_cmp(b));
        let again = {
            let mut v = vals.clone();
            v.sort_by(|a, b| a.order_cmp(b));
            v
        };
        assert_eq!(vals, again);
        assert_eq!(vals[0], Value::Null);
    }
}
