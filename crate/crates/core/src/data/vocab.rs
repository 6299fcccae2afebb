//! Vocabulary with reserved pad and unk ids.

use std::collections::HashMap;

/// Reserved id for the padding token (zero, non-trainable embedding row).
pub const PAD_ID: u32 = 0;
/// Reserved id for out-of-vocabulary tokens.
pub const UNK_ID: u32 = 1;

/// Bijective term <-> id map over non-reserved entries. Ids are assigned in
/// first-seen order, so construction is deterministic for a given stream.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    term_to_id: HashMap<String, u32>,
    id_to_term: Vec<String>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self {
            term_to_id: HashMap::new(),
            id_to_term: vec!["<pad>".to_string(), "<unk>".to_string()],
        }
    }

    /// Build from token streams in order.
    pub fn build<'a, I, S>(streams: I) -> Self
    where
        I: IntoIterator<Item = &'a [S]>,
        S: AsRef<str> + 'a,
    {
        let mut vocab = Self::new();
        for stream in streams {
            for token in stream {
                vocab.intern(token.as_ref());
            }
        }
        vocab
    }

    /// Insert a term if new; returns its id either way.
    pub fn intern(&mut self, term: &str) -> u32 {
        if let Some(&id) = self.term_to_id.get(term) {
            return id;
        }
        let id = self.id_to_term.len() as u32;
        self.id_to_term.push(term.to_string());
        self.term_to_id.insert(term.to_string(), id);
        id
    }

    /// Id of a term, falling back to unk.
    pub fn id(&self, term: &str) -> u32 {
        self.term_to_id.get(term).copied().unwrap_or(UNK_ID)
    }

    pub fn contains(&self, term: &str) -> bool {
        self.term_to_id.contains_key(term)
    }

    pub fn term(&self, id: u32) -> Option<&str> {
        self.id_to_term.get(id as usize).map(String::as_str)
    }

    /// Total size including the two reserved ids.
    pub fn len(&self) -> usize {
        self.id_to_term.len()
    }

    pub fn is_empty(&self) -> bool {
        self.id_to_term.len() <= 2
    }

    /// Map tokens to ids with unk fallback.
    pub fn encode<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<u32> {
        tokens.iter().map(|t| self.id(t.as_ref())).collect()
    }

    /// Terms in id order, reserved entries included.
    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.id_to_term.iter().map(String::as_str)
    }
}

impl Default for Vocabulary {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reserved_ids_are_distinct() {
        let v = Vocabulary::new();
        assert_eq!(v.len(), 2);
        assert_ne!(PAD_ID, UNK_ID);
        assert_eq!(v.term(PAD_ID), Some("<pad>"));
        assert_eq!(v.term(UNK_ID), Some("<unk>"));
    }

    #[test]
    fn first_seen_order_is_stable() {
        let streams: Vec<Vec<&str>> = vec![vec!["b", "a"], vec!["a", "c"]];
        let refs: Vec<&[&str]> = streams.iter().map(Vec::as_slice).collect();
        let v = Vocabulary::build(refs);
        assert_eq!(v.id("b"), 2);
        assert_eq!(v.id("a"), 3);
        assert_eq!(v.id("c"), 4);
    }

    #[test]
    fn unknown_terms_encode_to_unk() {
        let mut v = Vocabulary::new();
        v.intern("x");
        assert_eq!(v.encode(&["x", "nope"]), vec![2, UNK_ID]);
    }
}
