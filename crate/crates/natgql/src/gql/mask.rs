//! Placeholder filling for masked questions and queries.
//!
//! A placeholder is a bracket span like `[c]` or `[s2]` whose body is a
//! short identifier. Edge patterns such as `[:hold]` or `[h:hold]` contain
//! `:` and are never mistaken for placeholders.

use std::collections::BTreeMap;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MaskError {
    #[error("unbound placeholders: {}", .0.join(", "))]
    Unbound(Vec<String>),
}

/// Returns all placeholders (with brackets) in their order of first
/// occurrence.
pub fn placeholders(text: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for ph in scan(text) {
        if !out.contains(&ph) {
            out.push(ph);
        }
    }
    out
}

/// Replaces every `[x]` placeholder using `bindings` (keys carry the
/// brackets). All placeholders must be bound; no other characters change.
pub fn fill_masked(text: &str, bindings: &BTreeMap<String, String>) -> Result<String, MaskError> {
    let found = placeholders(text);
    let unbound: Vec<String> = found
        .iter()
        .filter(|ph| !bindings.contains_key(*ph))
        .cloned()
        .collect();
    if !unbound.is_empty() {
        return Err(MaskError::Unbound(unbound));
    }
    let mut out = text.to_string();
    for ph in found {
        out = out.replace(&ph, &bindings[&ph]);
    }
    Ok(out)
}

/// Inverse of [`fill_masked`] for names that contain no brackets: replaces
/// each bound name back with its placeholder.
pub fn unfill(text: &str, bindings: &BTreeMap<String, String>) -> String {
    let mut out = text.to_string();
    for (ph, name) in bindings {
        out = out.replace(name.as_str(), ph.as_str());
    }
    out
}

fn scan(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if chars[i] == '[' {
            if let Some(end) = placeholder_end(&chars, i) {
                out.push(chars[i..=end].iter().collect());
                i = end + 1;
                continue;
            }
        }
        i += 1;
    }
    out
}

fn placeholder_end(chars: &[char], open: usize) -> Option<usize> {
    let mut j = open + 1;
    if j >= chars.len() || !chars[j].is_ascii_alphabetic() {
        return None;
    }
    while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
        j += 1;
    }
    if j < chars.len() && chars[j] == ']' && j > open + 1 && j - open <= 17 {
        Some(j)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bind(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect()
    }

    #[test]
    fn fills_masked_question() {
        let out = fill_masked(
            "What is the code of stock [s]?",
            &bind(&[("[s]", "华强科技")]),
        )
        .unwrap();
        assert_eq!(out, "What is the code of stock 华强科技?");
    }

    #[test]
    fn text_without_placeholders_is_unchanged() {
        let text = "MATCH (s:stock{name:'华强科技'}) RETURN s.stock.code";
        assert_eq!(fill_masked(text, &bind(&[])).unwrap(), text);
    }

    #[test]
    fn qid10_masked_gql_round_trips() {
        let masked = "MATCH (c:chairman{name:'[c]'})-[:is_chairman_of]->(s:stock)-[:associate]->(i1:industry)-[:affect]->(i2:industry) RETURN i2.industry.name";
        let filled = fill_masked(masked, &bind(&[("[c]", "梁东")])).unwrap();
        assert_eq!(
            filled,
            "MATCH (c:chairman{name:'梁东'})-[:is_chairman_of]->(s:stock)-[:associate]->(i1:industry)-[:affect]->(i2:industry) RETURN i2.industry.name"
        );
        assert_eq!(unfill(&filled, &bind(&[("[c]", "梁东")])), masked);
    }

    #[test]
    fn edge_patterns_are_not_placeholders() {
        let text = "MATCH (a)-[:hold]->(b)<-[h:manage]-(c) RETURN a.fund.name";
        assert!(placeholders(text).is_empty());
    }

    #[test]
    fn unbound_placeholder_is_listed() {
        let err = fill_masked("[a] and [b]", &bind(&[("[a]", "x")])).unwrap_err();
        assert_eq!(err, MaskError::Unbound(vec!["[b]".to_string()]));
    }

    proptest::proptest! {
        #[test]
        fn fill_then_unfill_is_identity(
            prefix in "[a-z ]{0,10}",
            name in "[\u{4e00}-\u{4eff}]{2,4}",
            suffix in "[a-z ]{0,10}",
        ) {
            // Names without brackets, distinct placeholder.
            let text = format!("{prefix}[s]{suffix}");
            let b = bind(&[("[s]", name.as_str())]);
            let filled = fill_masked(&text, &b).unwrap();
            // Only meaningful when the surrounding text does not contain the name.
            proptest::prop_assume!(!prefix.contains(&name) && !suffix.contains(&name));
            proptest::prop_assert_eq!(unfill(&filled, &b), text);
        }
    }
}
