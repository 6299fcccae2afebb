//! Whitespace-free tokenization: lowercase, split on non-alphanumeric runs.

/// Lowercase the text and split it on runs of non-alphanumeric characters,
/// dropping empty pieces. Deterministic and total over UTF-8.
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lowercases_and_splits_punctuation() {
        assert_eq!(
            tokenize("The cat, the CAT!"),
            vec!["the", "cat", "the", "cat"]
        );
    }

    #[test]
    fn empty_text_yields_no_tokens() {
        assert!(tokenize("").is_empty());
        assert!(tokenize("  ,.;  ").is_empty());
    }

    #[test]
    fn digits_stay_inside_tokens() {
        assert_eq!(tokenize("a1-b2"), vec!["a1", "b2"]);
    }
}
