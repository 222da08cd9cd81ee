//! GQL subset engine: tokenizer, parser, in-memory executor, masked-entity
//! filling, referenced-schema extraction, and hop counting.

pub mod ast;
pub mod exec;
pub mod mask;
pub mod parse;
pub mod token;

use serde::{Deserialize, Serialize};

/// Target dialect. The executor runs nGQL; Cypher differs only where the
/// tokenizer/parser must accept `=` as the equality operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dialect {
    #[default]
    Ngql,
    Cypher,
}

impl std::str::FromStr for Dialect {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ngql" => Ok(Dialect::Ngql),
            "cypher" => Ok(Dialect::Cypher),
            other => Err(format!("unknown dialect `{other}` (expected ngql|cypher)")),
        }
    }
}

/// A single GQL statement with its dialect.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GqlQuery {
    pub text: String,
    pub dialect: Dialect,
}

impl GqlQuery {
    pub fn ngql(text: impl Into<String>) -> Self {
        GqlQuery {
            text: text.into(),
            dialect: Dialect::Ngql,
        }
    }

    pub fn cypher(text: impl Into<String>) -> Self {
        GqlQuery {
            text: text.into(),
            dialect: Dialect::Cypher,
        }
    }
}
