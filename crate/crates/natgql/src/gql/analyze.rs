//! Schema-level analysis of parsed queries: which schema elements a query
//! touches, and how many hops it spans.

use thiserror::Error;

use super::ast::GqlAst;
use crate::schema::{ConnectedSubschema, GraphSchema};

#[derive(Debug, Error)]
pub enum AnalyzeError {
    #[error("query references unknown node type `{0}`")]
    UnknownNodeType(String),
    #[error("query references unknown edge type `{0}`")]
    UnknownEdgeType(String),
}

/// Node and edge types mentioned in the MATCH pattern, closed over edge
/// endpoints, as a [`ConnectedSubschema`]. This is the "golden related
/// schema" of a labeled query.
pub fn referenced_schema(
    ast: &GqlAst,
    schema: &GraphSchema,
) -> Result<ConnectedSubschema, AnalyzeError> {
    let mut sub = ConnectedSubschema::new::<_, _, String>([], []);
    for n in &ast.nodes {
        if let Some(t) = &n.node_type {
            if schema.node_type(t).is_none() {
                return Err(AnalyzeError::UnknownNodeType(t.clone()));
            }
            sub.nodes.insert(t.clone());
        }
    }
    for e in &ast.edges {
        let def = schema
            .edge_type(&e.edge_type)
            .ok_or_else(|| AnalyzeError::UnknownEdgeType(e.edge_type.clone()))?;
        sub.edges.insert(def.name.clone());
        sub.nodes.insert(def.src.clone());
        sub.nodes.insert(def.dst.clone());
    }
    Ok(sub)
}

/// Number of edge patterns in the MATCH chain.
pub fn hop_count(ast: &GqlAst) -> usize {
    ast.hop_count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gql::parse::parse;
    use crate::gql::GqlQuery;
    use crate::schema::GraphSchema;

    fn schema() -> GraphSchema {
        GraphSchema::load(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/schema.json")).unwrap()
    }

    const QID10_GQL: &str = "MATCH (c:chairman{name:'梁东'})-[:is_chairman_of]->(s:stock)-[:associate]->(i1:industry)-[:affect]->(i2:industry) RETURN i2.industry.name";

    #[test]
    fn qid10_references_expected_subschema() {
        let ast = parse(&GqlQuery::ngql(QID10_GQL)).unwrap();
        let sub = referenced_schema(&ast, &schema()).unwrap();
        assert_eq!(
            sub,
            ConnectedSubschema::new(
                ["chairman", "stock", "industry"],
                ["is_chairman_of", "associate", "affect"],
            )
        );
        assert_eq!(hop_count(&ast), 3);
    }

    #[test]
    fn single_node_query_has_zero_hops() {
        let ast = parse(&GqlQuery::ngql("MATCH (s:stock) RETURN s.stock.name")).unwrap();
        let sub = referenced_schema(&ast, &schema()).unwrap();
        assert_eq!(sub, ConnectedSubschema::new(["stock"], []));
        assert_eq!(hop_count(&ast), 0);
    }

    #[test]
    fn case_study_references_manage_and_hold() {
        let ast = parse(&GqlQuery::ngql(
            "MATCH (s:stock{name:'华强科技'})<-[h:hold]-(pof:fund)<-[:manage]-(fm:fund_manager) WHERE h.hold.position_ratio > 0.07 RETURN fm.fund_manager.name",
        ))
        .unwrap();
        let sub = referenced_schema(&ast, &schema()).unwrap();
        assert_eq!(
            sub,
            ConnectedSubschema::new(["fund_manager", "fund", "stock"], ["manage", "hold"])
        );
        assert_eq!(hop_count(&ast), 2);
    }

    #[test]
    fn unknown_edge_type_is_reported() {
        let ast = parse(&GqlQuery::ngql(
            "MATCH (s:stock)-[:issued_by]->(c:chairman) RETURN c.chairman.name",
        ))
        .unwrap();
        let err = referenced_schema(&ast, &schema()).unwrap_err();
        assert!(matches!(err, AnalyzeError::UnknownEdgeType(t) if t == "issued_by"));
    }

    #[test]
    fn untyped_nodes_are_closed_over_edge_endpoints() {
        let ast = parse(&GqlQuery::ngql(
            "MATCH (c)-[:is_chairman_of]->(s) RETURN s.stock.name",
        ))
        .unwrap();
        let sub = referenced_schema(&ast, &schema()).unwrap();
        assert_eq!(
            sub,
            ConnectedSubschema::new(["chairman", "stock"], ["is_chairman_of"])
        );
        assert!(sub.is_valid(&schema()));
    }
}
