//! Recursive-descent parser for the executable subset. Constructs outside
//! the subset produce a named unsupported-feature error, distinct from
//! plain syntax errors.

use thiserror::Error;

use super::ast::*;
use super::token::{tokenize, GqlToken, LexError, TokenKind};
use super::{Dialect, GqlQuery};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error("syntax error at offset {offset}: found {found}, expected {}", expected.join(" | "))]
    Syntax {
        offset: usize,
        found: String,
        expected: Vec<&'static str>,
    },
    #[error("unsupported feature: {0}")]
    Unsupported(String),
    #[error("variable `{0}` is not bound in the MATCH pattern")]
    UnboundVariable(String),
    #[error("pattern has {0} edges; at most {MAX_PATTERN_EDGES} are supported")]
    PatternTooLong(usize),
    #[error("duplicate variable `{0}` in pattern")]
    DuplicateVariable(String),
}

pub fn parse(query: &GqlQuery) -> Result<GqlAst, ParseError> {
    let tokens = tokenize(query)?;
    let mut p = Parser {
        tokens: &tokens,
        pos: 0,
        dialect: query.dialect,
    };
    let ast = p.statement()?;
    validate(&ast)?;
    Ok(ast)
}

struct Parser<'a> {
    tokens: &'a [GqlToken],
    pos: usize,
    dialect: Dialect,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a GqlToken> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<&'a GqlToken> {
        let t = self.tokens.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, expected: Vec<&'static str>) -> ParseError {
        match self.peek() {
            Some(t) => ParseError::Syntax {
                offset: t.offset,
                found: format!("`{}`", t.lexeme),
                expected,
            },
            None => ParseError::Syntax {
                offset: self.tokens.last().map(|t| t.offset + t.lexeme.len()).unwrap_or(0),
                found: "end of input".to_string(),
                expected,
            },
        }
    }

    fn expect_punct(&mut self, p: &'static str) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Punctuation && t.lexeme == p => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.err(vec![p])),
        }
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        matches!(self.peek(), Some(t) if t.kind == TokenKind::Punctuation && t.lexeme == p)
            && self.next().is_some()
    }

    fn eat_operator(&mut self, op: &str) -> bool {
        matches!(self.peek(), Some(t) if t.kind == TokenKind::Operator && t.lexeme == op)
            && self.next().is_some()
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        matches!(self.peek(), Some(t) if t.is_keyword(kw)) && self.next().is_some()
    }

    fn identifier(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Identifier => {
                self.pos += 1;
                Ok(t.lexeme.clone())
            }
            _ => Err(self.err(vec!["identifier"])),
        }
    }

    fn statement(&mut self) -> Result<GqlAst, ParseError> {
        match self.peek() {
            Some(t) if t.is_keyword("MATCH") => {}
            Some(t)
                if t.kind == TokenKind::Keyword
                    && matches!(t.lexeme.as_str(), "GO" | "FETCH" | "LOOKUP") =>
            {
                return Err(ParseError::Unsupported(format!(
                    "{} statements are tokenized for metrics but not executed",
                    t.lexeme
                )));
            }
            _ => return Err(self.err(vec!["MATCH"])),
        }
        self.next();

        let (nodes, edges) = self.pattern()?;

        if let Some(t) = self.peek() {
            if t.is_keyword("MATCH") {
                return Err(ParseError::Unsupported(
                    "multiple MATCH clauses".to_string(),
                ));
            }
            if t.kind == TokenKind::Punctuation && t.lexeme == "," {
                return Err(ParseError::Unsupported(
                    "multiple comma-separated patterns in one MATCH".to_string(),
                ));
            }
        }

        let where_clause = if self.eat_keyword("WHERE") {
            Some(self.or_expr()?)
        } else {
            None
        };

        if !self.eat_keyword("RETURN") {
            return Err(self.err(vec!["RETURN", "WHERE"]));
        }
        let distinct = self.eat_keyword("DISTINCT");
        let mut returns = vec![self.return_item()?];
        while self.eat_punct(",") {
            returns.push(self.return_item()?);
        }

        let limit = if self.eat_keyword("LIMIT") {
            match self.next() {
                Some(t) if t.kind == TokenKind::Literal => {
                    let n: usize = t.lexeme.parse().map_err(|_| ParseError::Syntax {
                        offset: t.offset,
                        found: format!("`{}`", t.lexeme),
                        expected: vec!["non-negative integer"],
                    })?;
                    Some(n)
                }
                _ => return Err(self.err(vec!["non-negative integer"])),
            }
        } else {
            None
        };

        self.eat_punct(";");
        if let Some(t) = self.peek() {
            if t.kind == TokenKind::Keyword
                && matches!(t.lexeme.as_str(), "ORDER" | "WITH" | "YIELD" | "UNION" | "SKIP")
            {
                return Err(ParseError::Unsupported(format!("{} clause", t.lexeme)));
            }
            return Err(self.err(vec!["end of statement"]));
        }

        Ok(GqlAst {
            dialect: self.dialect,
            nodes,
            edges,
            where_clause,
            distinct,
            returns,
            limit,
        })
    }

    fn pattern(&mut self) -> Result<(Vec<NodePattern>, Vec<EdgePattern>), ParseError> {
        let mut nodes = vec![self.node_pattern()?];
        let mut edges = Vec::new();
        loop {
            let direction = if self.eat_operator("-") {
                EdgeDirection::Forward
            } else if self.eat_operator("<-") {
                EdgeDirection::Backward
            } else {
                break;
            };
            self.expect_punct("[")?;
            let mut variable = None;
            if let Some(t) = self.peek() {
                if t.kind == TokenKind::Identifier {
                    variable = Some(self.identifier()?);
                }
            }
            if !self.eat_punct(":") {
                return Err(ParseError::Unsupported(
                    "edge pattern without an edge type".to_string(),
                ));
            }
            let edge_type = self.identifier()?;
            if self.eat_punct("{") {
                return Err(ParseError::Unsupported(
                    "inline property constraints on edge patterns".to_string(),
                ));
            }
            self.expect_punct("]")?;
            match direction {
                EdgeDirection::Forward => {
                    if !self.eat_operator("->") {
                        return Err(self.err(vec!["->"]));
                    }
                }
                EdgeDirection::Backward => {
                    if !self.eat_operator("-") {
                        return Err(self.err(vec!["-"]));
                    }
                }
            }
            edges.push(EdgePattern {
                variable,
                edge_type,
                direction,
            });
            nodes.push(self.node_pattern()?);
        }
        Ok((nodes, edges))
    }

    fn node_pattern(&mut self) -> Result<NodePattern, ParseError> {
        self.expect_punct("(")?;
        let mut variable = None;
        let mut node_type = None;
        if let Some(t) = self.peek() {
            if t.kind == TokenKind::Identifier {
                variable = Some(self.identifier()?);
            }
        }
        if self.eat_punct(":") {
            node_type = Some(self.identifier()?);
        }
        let mut constraints = Vec::new();
        if self.eat_punct("{") {
            loop {
                let prop = self.identifier()?;
                self.expect_punct(":")?;
                let value = self.literal()?;
                constraints.push((prop, value));
                if !self.eat_punct(",") {
                    break;
                }
            }
            self.expect_punct("}")?;
        }
        self.expect_punct(")")?;
        Ok(NodePattern {
            variable,
            node_type,
            constraints,
        })
    }

    fn literal(&mut self) -> Result<Literal, ParseError> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Literal => {
                self.pos += 1;
                Ok(decode_literal(&t.lexeme))
            }
            _ => Err(self.err(vec!["literal"])),
        }
    }

    fn or_expr(&mut self) -> Result<BoolExpr, ParseError> {
        let mut left = self.and_expr()?;
        while self.eat_keyword("OR") {
            let right = self.and_expr()?;
            left = BoolExpr::Or(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn and_expr(&mut self) -> Result<BoolExpr, ParseError> {
        let mut left = self.primary_expr()?;
        while self.eat_keyword("AND") {
            let right = self.primary_expr()?;
            left = BoolExpr::And(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn primary_expr(&mut self) -> Result<BoolExpr, ParseError> {
        if self.eat_punct("(") {
            let inner = self.or_expr()?;
            self.expect_punct(")")?;
            return Ok(inner);
        }
        let prop = self.prop_ref()?;
        let op = self.cmp_op()?;
        let value = self.literal()?;
        Ok(BoolExpr::Cmp(Comparison { prop, op, value }))
    }

    fn cmp_op(&mut self) -> Result<CmpOp, ParseError> {
        let t = match self.peek() {
            Some(t) if t.kind == TokenKind::Operator => t,
            _ => return Err(self.err(vec!["==", "!=", ">", ">=", "<", "<="])),
        };
        let op = match t.lexeme.as_str() {
            "==" => CmpOp::Eq,
            "=" => {
                // nGQL requires `==`; Cypher filters use single `=`.
                if self.dialect == Dialect::Ngql {
                    return Err(ParseError::Syntax {
                        offset: t.offset,
                        found: "`=`".to_string(),
                        expected: vec!["`==` (nGQL equality)"],
                    });
                }
                CmpOp::Eq
            }
            "!=" => CmpOp::Ne,
            ">" => CmpOp::Gt,
            ">=" => CmpOp::Ge,
            "<" => CmpOp::Lt,
            "<=" => CmpOp::Le,
            _ => return Err(self.err(vec!["==", "!=", ">", ">=", "<", "<="])),
        };
        self.pos += 1;
        Ok(op)
    }

    fn prop_ref(&mut self) -> Result<PropRef, ParseError> {
        let variable = self.identifier()?;
        self.expect_punct(".")?;
        let second = self.identifier()?;
        if self.eat_punct(".") {
            let property = self.identifier()?;
            Ok(PropRef {
                variable,
                type_name: Some(second),
                property,
            })
        } else {
            Ok(PropRef {
                variable,
                type_name: None,
                property: second,
            })
        }
    }

    fn return_item(&mut self) -> Result<ReturnItem, ParseError> {
        if self.eat_keyword("COUNT") {
            self.expect_punct("(")?;
            let inner = if self.eat_operator("*") {
                None
            } else {
                Some(self.prop_ref()?)
            };
            self.expect_punct(")")?;
            return Ok(ReturnItem::Count(inner));
        }
        Ok(ReturnItem::Prop(self.prop_ref()?))
    }
}

fn decode_literal(lexeme: &str) -> Literal {
    if lexeme == "true" {
        return Literal::Bool(true);
    }
    if lexeme == "false" {
        return Literal::Bool(false);
    }
    let first = lexeme.chars().next().unwrap_or('\0');
    if first == '\'' || first == '"' {
        return Literal::Str(unquote(lexeme));
    }
    if lexeme.contains('.') {
        if let Ok(f) = lexeme.parse::<f64>() {
            return Literal::Float(f);
        }
    }
    if let Ok(i) = lexeme.parse::<i64>() {
        return Literal::Int(i);
    }
    Literal::Str(lexeme.to_string())
}

/// Strips the surrounding quotes of a string-literal lexeme and resolves
/// backslash escapes. Shared with the metric normalization.
pub fn unquote(lexeme: &str) -> String {
    let chars: Vec<char> = lexeme.chars().collect();
    if chars.len() < 2 {
        return lexeme.to_string();
    }
    let mut out = String::new();
    let mut i = 1;
    while i < chars.len() - 1 {
        if chars[i] == '\\' && i + 1 < chars.len() - 1 {
            out.push(chars[i + 1]);
            i += 2;
        } else {
            out.push(chars[i]);
            i += 1;
        }
    }
    out
}

fn validate(ast: &GqlAst) -> Result<(), ParseError> {
    if ast.edges.len() > MAX_PATTERN_EDGES {
        return Err(ParseError::PatternTooLong(ast.edges.len()));
    }
    let mut bound: Vec<&str> = Vec::new();
    for n in &ast.nodes {
        if let Some(v) = &n.variable {
            if bound.contains(&v.as_str()) {
                return Err(ParseError::DuplicateVariable(v.clone()));
            }
            bound.push(v);
        }
    }
    for e in &ast.edges {
        if let Some(v) = &e.variable {
            if bound.contains(&v.as_str()) {
                return Err(ParseError::DuplicateVariable(v.clone()));
            }
            bound.push(v);
        }
    }
    let check = |prop: &PropRef| -> Result<(), ParseError> {
        if !bound.contains(&prop.variable.as_str()) {
            return Err(ParseError::UnboundVariable(prop.variable.clone()));
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

#[cfg(test)]
mod tests {
    use super::*;

    const QID10_GQL: &str = "MATCH (c:chairman{name:'梁东'})-[:is_chairman_of]->(s:stock)-[:associate]->(i1:industry)-[:affect]->(i2:industry) RETURN i2.industry.name";

    #[test]
    fn parses_qid10_chain() {
        let ast = parse(&GqlQuery::ngql(QID10_GQL)).unwrap();
        assert_eq!(ast.edges.len(), 3);
        assert_eq!(ast.nodes.len(), 4);
        assert_eq!(ast.returns.len(), 1);
        assert_eq!(ast.nodes[0].constraints[0].0, "name");
        assert_eq!(
            ast.nodes[0].constraints[0].1,
            Literal::Str("梁东".to_string())
        );
    }

    #[test]
    fn parses_single_node_query() {
        let ast = parse(&GqlQuery::ngql("MATCH (s:stock{name:'X'}) RETURN s.stock.code")).unwrap();
        assert_eq!(ast.hop_count(), 0);
    }

    #[test]
    fn ngql_rejects_single_equals() {
        let err = parse(&GqlQuery::ngql(
            "MATCH (a:stock)-[:associate]->(b:industry) WHERE a.stock.price = 1 RETURN b.industry.name",
        ))
        .unwrap_err();
        match err {
            ParseError::Syntax { found, .. } => assert_eq!(found, "`=`"),
            other => panic!("expected syntax error, got {other}"),
        }
    }

    #[test]
    fn cypher_accepts_single_equals() {
        let ast = parse(&GqlQuery::cypher(
            "MATCH (a:stock)-[:associate]->(b:industry) WHERE a.stock.price = 1 RETURN b.industry.name",
        ))
        .unwrap();
        assert_eq!(ast.where_comparisons()[0].op, CmpOp::Eq);
    }

    #[test]
    fn case_study_query_parses_with_backward_edges() {
        let ast = parse(&GqlQuery::ngql(
            "MATCH (s:stock{name:'华强科技'})<-[h:hold]-(pof:fund)<-[:manage]-(fm:fund_manager) WHERE h.hold.position_ratio > 0.07 RETURN fm.fund_manager.name",
        ))
        .unwrap();
        assert_eq!(ast.hop_count(), 2);
        assert_eq!(ast.edges[0].direction, EdgeDirection::Backward);
        assert_eq!(ast.edges[0].variable.as_deref(), Some("h"));
    }

    #[test]
    fn unsupported_features_are_distinguished() {
        let err = parse(&GqlQuery::ngql("MATCH (a:stock) MATCH (b:fund) RETURN a.stock.name"))
            .unwrap_err();
        assert!(matches!(err, ParseError::Unsupported(_)));
        let err = parse(&GqlQuery::ngql("GO FROM 'x' OVER hold YIELD hold.position_ratio"))
            .unwrap_err();
        assert!(matches!(err, ParseError::Unsupported(_)));
    }

    #[test]
    fn unbound_variable_is_rejected() {
        let err = parse(&GqlQuery::ngql("MATCH (a:stock) RETURN b.stock.name")).unwrap_err();
        assert!(matches!(err, ParseError::UnboundVariable(v) if v == "b"));
    }

    #[test]
    fn where_precedence_and_parens() {
        let ast = parse(&GqlQuery::ngql(
            "MATCH (s:stock) WHERE s.stock.price > 1 AND s.stock.price < 5 OR s.stock.code == 'X' RETURN s.stock.name",
        ))
        .unwrap();
        match ast.where_clause.unwrap() {
            BoolExpr::Or(left, _) => assert!(matches!(*left, BoolExpr::And(_, _))),
            other => panic!("expected OR at root, got {other:?}"),
        }
        let ast = parse(&GqlQuery::ngql(
            "MATCH (s:stock) WHERE s.stock.price > 1 AND (s.stock.price < 5 OR s.stock.code == 'X') RETURN s.stock.name",
        ))
        .unwrap();
        assert!(matches!(ast.where_clause.unwrap(), BoolExpr::And(_, _)));
    }

    #[test]
    fn count_and_distinct_projections() {
        let ast = parse(&GqlQuery::ngql(
            "MATCH (s:stock) RETURN DISTINCT s.stock.name, count(*) LIMIT 3",
        ))
        .unwrap();
        assert!(ast.distinct);
        assert_eq!(ast.limit, Some(3));
        assert!(matches!(ast.returns[1], ReturnItem::Count(None)));
    }

    #[test]
    fn pattern_longer_than_six_edges_is_rejected() {
        let mut q = String::from("MATCH (i0:industry)");
        for k in 1..=7 {
            q.push_str(&format!("-[:affect]->(i{k}:industry)"));
        }
        // Edge types repeat here, which the parser permits; only length is
        // capped. Use distinct variables to avoid the duplicate check.
        q.push_str(" RETURN i0.industry.name");
        let err = parse(&GqlQuery::ngql(q)).unwrap_err();
        assert!(matches!(err, ParseError::PatternTooLong(7)));
    }
}
