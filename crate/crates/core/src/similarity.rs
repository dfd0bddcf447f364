//! Name similarity used to break ties between candidate object types.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};

/// Scores how close an attribute name is to an object-type name, in `[0, 1]`.
///
/// Implementations must be callable from several threads at once.
pub trait SimilarityProvider: Send + Sync + fmt::Debug {
    fn similarity(&self, attr: &str, object_type: &str) -> Result<f64>;
}

/// Splits a name into lowercase tokens on whitespace, punctuation and
/// camel-case boundaries (`orderID` -> `order`, `id`; `XMLFile` -> `xml`, `file`).
pub fn tokenize(name: &str) -> Vec<String> {
    let chars: Vec<char> = name.chars().collect();
    let mut tokens = Vec::new();
    let mut current = String::new();
    for (i, &c) in chars.iter().enumerate() {
        if !c.is_alphanumeric() {
            if !current.is_empty() {
                tokens.push(std::mem::take(&mut current));
            }
            continue;
        }
        if let Some(&prev) = i.checked_sub(1).and_then(|j| chars.get(j)) {
            let next = chars.get(i + 1).copied();
            let boundary = (prev.is_lowercase() && c.is_uppercase())
                || (prev.is_uppercase()
                    && c.is_uppercase()
                    && next.is_some_and(|n| n.is_lowercase()));
            if boundary && !current.is_empty() {
                tokens.push(std::mem::take(&mut current));
            }
        }
        current.extend(c.to_lowercase());
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

fn trigram_counts(name: &str) -> HashMap<String, f64> {
    let joined: Vec<char> = tokenize(name).join(" ").chars().collect();
    let mut counts = HashMap::new();
    if joined.is_empty() {
        return counts;
    }
    if joined.len() < 3 {
        counts.insert(joined.iter().collect(), 1.0);
        return counts;
    }
    for w in joined.windows(3) {
        *counts.entry(w.iter().collect()).or_insert(0.0) += 1.0;
    }
    counts
}

fn sparse_cosine(a: &HashMap<String, f64>, b: &HashMap<String, f64>) -> f64 {
    let norm = |m: &HashMap<String, f64>| m.values().map(|v| v * v).sum::<f64>().sqrt();
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    let dot: f64 = a
        .iter()
        .filter_map(|(k, va)| b.get(k).map(|vb| va * vb))
        .sum();
    (dot / (na * nb)).clamp(0.0, 1.0)
}

/// Offline default: cosine similarity of character-trigram frequency vectors
/// built from the lowercased, re-joined tokens of both names.
#[derive(Debug, Clone, Copy, Default)]
pub struct LexicalSimilarity;

impl SimilarityProvider for LexicalSimilarity {
    fn similarity(&self, attr: &str, object_type: &str) -> Result<f64> {
        Ok(sparse_cosine(
            &trigram_counts(attr),
            &trigram_counts(object_type),
        ))
    }
}

/// Cosine similarity over precomputed embedding vectors (name -> vector),
/// e.g. exported from a sentence-embedding model. Negative cosines clamp to 0.
#[derive(Debug, Clone, Default)]
pub struct EmbeddingSimilarity {
    vectors: HashMap<String, Vec<f64>>,
}

impl EmbeddingSimilarity {
    pub fn new(vectors: HashMap<String, Vec<f64>>) -> Self {
        EmbeddingSimilarity { vectors }
    }

    /// Loads a JSON object mapping names to arrays of numbers.
    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        Ok(Self::new(serde_json::from_slice(bytes)?))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&bytes)
    }

    fn vector(&self, name: &str) -> Result<&[f64]> {
        self.vectors
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::SimilarityProvider(format!("no embedding for `{name}`")))
    }
}

impl SimilarityProvider for EmbeddingSimilarity {
    fn similarity(&self, attr: &str, object_type: &str) -> Result<f64> {
        let (a, b) = (self.vector(attr)?, self.vector(object_type)?);
        if a.len() != b.len() {
            return Err(Error::SimilarityProvider(format!(
                "embedding dimensions differ for `{attr}` ({}) and `{object_type}` ({})",
                a.len(),
                b.len()
            )));
        }
        let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
        let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
        if na == 0.0 || nb == 0.0 {
            return Ok(0.0);
        }
        Ok((dot / (na * nb)).clamp(0.0, 1.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenizer_splits_camel_case_and_separators() {
        assert_eq!(tokenize("Customer Address"), ["customer", "address"]);
        assert_eq!(tokenize("customer_address"), ["customer", "address"]);
        assert_eq!(tokenize("customerAddress"), ["customer", "address"]);
        assert_eq!(tokenize("XMLFile"), ["xml", "file"]);
        assert_eq!(tokenize("org:resource"), ["org", "resource"]);
        assert!(tokenize("  ").is_empty());
    }

    #[test]
    fn lexical_is_symmetric_and_bounded() {
        let s = LexicalSimilarity;
        let ab = s.similarity("Order Price", "Order").unwrap();
        let ba = s.similarity("Order", "Order Price").unwrap();
        assert!((ab - ba).abs() < 1e-12);
        assert!((0.0..=1.0).contains(&ab));
        assert!((s.similarity("Orders", "orders").unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(s.similarity("", "Orders").unwrap(), 0.0);
    }

    #[test]
    fn formatting_variants_score_identically() {
        let s = LexicalSimilarity;
        let a = s.similarity("customer_address", "Customer").unwrap();
        let b = s.similarity("CustomerAddress", "Customer").unwrap();
        let c = s.similarity("Customer Address", "Customer").unwrap();
        assert_eq!(a, b);
        assert_eq!(b, c);
    }

    #[test]
    fn short_names_use_whole_string() {
        let s = LexicalSimilarity;
        assert!((s.similarity("ID", "id").unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(s.similarity("ID", "Orders").unwrap(), 0.0);
    }

    #[test]
    fn embeddings_cosine_and_missing_names() {
        let e = EmbeddingSimilarity::from_json(
            br#"{"Refund": [1.0, 0.0], "Orders": [1.0, 1.0], "Customers": [-1.0, 0.0]}"#,
        )
        .unwrap();
        let v = e.similarity("Refund", "Orders").unwrap();
        assert!((v - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert_eq!(e.similarity("Refund", "Customers").unwrap(), 0.0);
        assert!(matches!(
            e.similarity("Refund", "Items"),
            Err(Error::SimilarityProvider(_))
        ));
    }
}
