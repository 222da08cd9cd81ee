//! natgql translates natural-language questions into graph query language
//! through a three-agent pipeline (preprocessor, generator, refiner), backed
//! by an in-memory nGQL-subset engine, an entity-alignment index, a dataset
//! construction pipeline, and an EM/EX evaluation harness. All LLM traffic
//! goes through a record/replay gateway so every run can be reproduced
//! byte-for-byte.

pub mod gql;
pub mod graph;
pub mod schema;

pub use graph::{PropertyGraph, Value};
pub use schema::{ConnectedSubschema, GraphSchema};
