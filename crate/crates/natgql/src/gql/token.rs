//! Lossless GQL tokenizer shared by the parser and the exact-set-match
//! metric.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::GqlQuery;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LexError {
    #[error("empty query")]
    Empty,
    #[error("unterminated string literal starting at offset {0}")]
    UnterminatedString(usize),
    #[error("unexpected character `{ch}` at offset {offset}")]
    UnexpectedChar { ch: char, offset: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TokenKind {
    Keyword,
    Identifier,
    Literal,
    Operator,
    Punctuation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GqlToken {
    pub kind: TokenKind,
    pub lexeme: String,
    /// Byte offset of the lexeme start in the source text.
    pub offset: usize,
}

impl GqlToken {
    fn new(kind: TokenKind, lexeme: impl Into<String>, offset: usize) -> Self {
        GqlToken {
            kind,
            lexeme: lexeme.into(),
            offset,
        }
    }

    pub fn is_keyword(&self, kw: &str) -> bool {
        self.kind == TokenKind::Keyword && self.lexeme == kw
    }
}

/// Keywords recognized case-insensitively and canonicalized to upper case.
pub const KEYWORDS: &[&str] = &[
    "MATCH", "OPTIONAL", "WHERE", "RETURN", "WITH", "ORDER", "BY", "ASC", "DESC", "LIMIT", "SKIP",
    "GO", "FETCH", "LOOKUP", "YIELD", "FROM", "OVER", "STEPS", "REVERSELY", "BIDIRECT", "ON",
    "PROP", "AND", "OR", "NOT", "XOR", "IN", "CONTAINS", "STARTS", "ENDS", "IS", "NULL",
    "DISTINCT", "COUNT", "AS", "UNION", "UNWIND", "DELETE", "SET", "CREATE", "INSERT", "VERTEX",
    "EDGE", "UPTO", "LIKE",
];

fn keyword_canonical(word: &str) -> Option<&'static str> {
    let upper = word.to_ascii_uppercase();
    KEYWORDS.iter().find(|&&k| k == upper).copied()
}

/// Tokenizes a query. String literals keep their quotes verbatim;
/// whitespace is dropped; keywords are canonicalized to upper case.
pub fn tokenize(query: &GqlQuery) -> Result<Vec<GqlToken>, LexError> {
    tokenize_text(&query.text)
}

pub fn tokenize_text(text: &str) -> Result<Vec<GqlToken>, LexError> {
    if text.trim().is_empty() {
        return Err(LexError::Empty);
    }
    let bytes: Vec<char> = text.chars().collect();
    let mut offsets = Vec::with_capacity(bytes.len());
    {
        let mut off = 0;
        for ch in &bytes {
            offsets.push(off);
            off += ch.len_utf8();
        }
    }
    let mut tokens: Vec<GqlToken> = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i];
        let offset = offsets[i];
        if ch.is_whitespace() {
            i += 1;
            continue;
        }
        // Words: keywords, identifiers, boolean literals.
        if ch.is_ascii_alphabetic() || ch == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == '_') {
                i += 1;
            }
            let word: String = bytes[start..i].iter().collect();
            if word.eq_ignore_ascii_case("true") || word.eq_ignore_ascii_case("false") {
                tokens.push(GqlToken::new(
                    TokenKind::Literal,
                    word.to_ascii_lowercase(),
                    offset,
                ));
            } else if let Some(kw) = keyword_canonical(&word) {
                tokens.push(GqlToken::new(TokenKind::Keyword, kw, offset));
            } else {
                tokens.push(GqlToken::new(TokenKind::Identifier, word, offset));
            }
            continue;
        }
        // Numbers, with a sign folded in where a binary minus cannot occur.
        if ch.is_ascii_digit() || (ch == '-' && minus_starts_number(&bytes, i, tokens.last())) {
            let start = i;
            if ch == '-' {
                i += 1;
            }
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == '.' && i + 1 < bytes.len() && bytes[i + 1].is_ascii_digit() {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            let num: String = bytes[start..i].iter().collect();
            tokens.push(GqlToken::new(TokenKind::Literal, num, offset));
            continue;
        }
        // Strings: quotes preserved verbatim in the lexeme.
        if ch == '\'' || ch == '"' {
            let quote = ch;
            let start = i;
            i += 1;
            let mut closed = false;
            while i < bytes.len() {
                if bytes[i] == '\\' && i + 1 < bytes.len() {
                    i += 2;
                    continue;
                }
                if bytes[i] == quote {
                    closed = true;
                    i += 1;
                    break;
                }
                i += 1;
            }
            if !closed {
                return Err(LexError::UnterminatedString(offset));
            }
            let lit: String = bytes[start..i].iter().collect();
            tokens.push(GqlToken::new(TokenKind::Literal, lit, offset));
            continue;
        }
        // Multi-char operators, greedily.
        if i + 1 < bytes.len() {
            let pair: String = bytes[i..i + 2].iter().collect();
            if matches!(pair.as_str(), "==" | "!=" | ">=" | "<=" | "->" | "<-") {
                tokens.push(GqlToken::new(TokenKind::Operator, pair, offset));
                i += 2;
                continue;
            }
        }
        match ch {
            '=' | '>' | '<' | '-' | '*' | '+' | '/' | '!' => {
                tokens.push(GqlToken::new(TokenKind::Operator, ch.to_string(), offset));
                i += 1;
            }
            '(' | ')' | '[' | ']' | '{' | '}' | ':' | ',' | '.' | ';' | '|' => {
                tokens.push(GqlToken::new(TokenKind::Punctuation, ch.to_string(), offset));
                i += 1;
            }
            other => {
                return Err(LexError::UnexpectedChar { ch: other, offset });
            }
        }
    }
    if tokens.is_empty() {
        return Err(LexError::Empty);
    }
    Ok(tokens)
}

// A `-` begins a numeric literal only when followed by a digit and the
// previous token cannot end an expression operand.
fn minus_starts_number(chars: &[char], i: usize, prev: Option<&GqlToken>) -> bool {
    if i + 1 >= chars.len() || !chars[i + 1].is_ascii_digit() {
        return false;
    }
    match prev {
        None => true,
        Some(t) => match t.kind {
            TokenKind::Operator | TokenKind::Keyword => true,
            TokenKind::Punctuation => matches!(t.lexeme.as_str(), "(" | "[" | "{" | "," | ":"),
            TokenKind::Identifier | TokenKind::Literal => false,
        },
    }
}

/// Joins lexemes with single spaces (used by the lossless-retokenize
/// property and trace rendering).
pub fn join_lexemes(tokens: &[GqlToken]) -> String {
    tokens
        .iter()
        .map(|t| t.lexeme.as_str())
        .collect::<Vec<_>>()
        .join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gql::GqlQuery;

    #[test]
    fn tokenizes_masked_example() {
        let q = GqlQuery::ngql("MATCH (s:stock{name:'[s]'}) RETURN s.stock.code");
        let toks = tokenize(&q).unwrap();
        assert_eq!(toks[0].kind, TokenKind::Keyword);
        assert_eq!(toks[0].lexeme, "MATCH");
        assert_eq!(toks[1].lexeme, "(");
        assert_eq!(toks[2].kind, TokenKind::Identifier);
        assert_eq!(toks[2].lexeme, "s");
        let lit = toks.iter().find(|t| t.kind == TokenKind::Literal).unwrap();
        assert_eq!(lit.lexeme, "'[s]'");
    }

    #[test]
    fn empty_query_is_rejected() {
        assert_eq!(tokenize(&GqlQuery::ngql("  ")).unwrap_err(), LexError::Empty);
    }

    #[test]
    fn keywords_canonicalize_to_upper() {
        let toks = tokenize(&GqlQuery::ngql("return X")).unwrap();
        assert_eq!(toks[0].lexeme, "RETURN");
        assert_eq!(toks[1].lexeme, "X");
        assert_eq!(toks[1].kind, TokenKind::Identifier);
    }

    #[test]
    fn unterminated_string_reports_offset() {
        let err = tokenize(&GqlQuery::ngql("MATCH (s:stock{name:'oops")).unwrap_err();
        assert_eq!(err, LexError::UnterminatedString(20));
    }

    #[test]
    fn percent_is_a_lex_error() {
        let err = tokenize(&GqlQuery::ngql("WHERE h.hold.position_ratio > 7%")).unwrap_err();
        assert!(matches!(err, LexError::UnexpectedChar { ch: '%', .. }));
    }

    #[test]
    fn arrows_and_comparisons_disambiguate() {
        let toks = tokenize(&GqlQuery::ngql("(a)-[:r]->(b)<-[h:s]-(c) WHERE a.t.x < -1")).unwrap();
        let ops: Vec<&str> = toks
            .iter()
            .filter(|t| t.kind == TokenKind::Operator)
            .map(|t| t.lexeme.as_str())
            .collect();
        assert_eq!(ops, vec!["-", "->", "<-", "-", "<"]);
        let neg = toks.iter().find(|t| t.lexeme == "-1").unwrap();
        assert_eq!(neg.kind, TokenKind::Literal);
    }

    #[test]
    fn rejoined_lexemes_retokenize_identically() {
        let q = GqlQuery::ngql(
            "MATCH (c:chairman{name:'梁东'})-[:is_chairman_of]->(s:stock) WHERE s.stock.price >= 3.5 RETURN DISTINCT s.stock.name LIMIT 10",
        );
        let toks = tokenize(&q).unwrap();
        let rejoined = join_lexemes(&toks);
        let again = tokenize(&GqlQuery::ngql(rejoined)).unwrap();
        let a: Vec<(&TokenKind, &str)> = toks.iter().map(|t| (&t.kind, t.lexeme.as_str())).collect();
        let b: Vec<(&TokenKind, &str)> = again.iter().map(|t| (&t.kind, t.lexeme.as_str())).collect();
        assert_eq!(a, b);
    }
}
