//! Lexicon-based sentiment annotation: per-term class distributions are
//! averaged over the tokens of a sentence.

use std::collections::HashMap;
use std::io::BufRead;
use std::path::Path;

use crate::annotate::labels::WeakLabel;
use crate::error::{Error, Result};

/// Number of sentiment classes: positive, negative, neutral.
pub const SENTIMENT_CLASSES: usize = 3;

/// Term -> normalized distribution over (positive, negative, neutral).
#[derive(Debug, Clone, Default)]
pub struct SentimentLexicon {
    entries: HashMap<String, [f64; SENTIMENT_CLASSES]>,
}

impl SentimentLexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, term: &str) -> Option<&[f64; SENTIMENT_CLASSES]> {
        self.entries.get(term)
    }

    /// Insert a term distribution; it must be non-negative and sum to 1
    /// within 1e-6.
    pub fn insert(&mut self, term: String, dist: [f64; SENTIMENT_CLASSES]) -> Result<()> {
        if dist.iter().any(|&p| p < 0.0) {
            return Err(Error::Validation(format!(
                "negative mass for term {term:?}"
            )));
        }
        let sum: f64 = dist.iter().sum();
        if (sum - 1.0).abs() > 1e-6 {
            return Err(Error::Validation(format!(
                "distribution for {term:?} sums to {sum}"
            )));
        }
        self.entries.insert(term, dist);
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64; SENTIMENT_CLASSES])> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Load from a TSV of `term<TAB>p_pos<TAB>p_neg<TAB>p_neu` lines.
    /// Lines starting with '#' and blank lines are ignored.
    pub fn load_tsv(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        let reader = std::io::BufReader::new(file);
        let mut lexicon = Self::new();
        for (idx, line) in reader.lines().enumerate() {
            let line_no = idx + 1;
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split('\t').collect();
            if fields.len() != 4 {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("expected 4 tab-separated fields, got {}", fields.len()),
                });
            }
            let mut dist = [0.0; SENTIMENT_CLASSES];
            for (slot, raw) in dist.iter_mut().zip(&fields[1..]) {
                *slot = raw.parse::<f64>().map_err(|e| Error::Parse {
                    line: line_no,
                    msg: format!("bad probability {raw:?}: {e}"),
                })?;
            }
            lexicon
                .insert(fields[0].to_string(), dist)
                .map_err(|e| Error::Parse {
                    line: line_no,
                    msg: e.to_string(),
                })?;
        }
        Ok(lexicon)
    }

    /// Write the TSV form, terms sorted for reproducible output.
    pub fn write_tsv(&self, path: &Path) -> Result<()> {
        use std::io::Write;
        let mut terms: Vec<&str> = self.entries.keys().map(String::as_str).collect();
        terms.sort_unstable();
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(out, "# term\tp_pos\tp_neg\tp_neu")?;
        for term in terms {
            let d = &self.entries[term];
            writeln!(out, "{term}\t{:.8}\t{:.8}\t{:.8}", d[0], d[1], d[2])?;
        }
        Ok(())
    }
}

/// Average the distributions of the tokens present in the lexicon. Tokens
/// without an entry are skipped; a sentence with no hits gets the uniform
/// distribution.
pub fn lexicon_annotate<S: AsRef<str>>(lexicon: &SentimentLexicon, sentence: &[S]) -> WeakLabel {
    let mut acc = [0.0; SENTIMENT_CLASSES];
    let mut hits = 0usize;
    for token in sentence {
        if let Some(dist) = lexicon.get(token.as_ref()) {
            for (a, &p) in acc.iter_mut().zip(dist) {
                *a += p;
            }
            hits += 1;
        }
    }
    if hits == 0 {
        return WeakLabel::Distribution(vec![1.0 / SENTIMENT_CLASSES as f64; SENTIMENT_CLASSES]);
    }
    WeakLabel::Distribution(acc.iter().map(|a| a / hits as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lexicon() -> SentimentLexicon {
        let mut lex = SentimentLexicon::new();
        lex.insert("good".into(), [0.8, 0.1, 0.1]).unwrap();
        lex.insert("bad".into(), [0.2, 0.3, 0.5]).unwrap();
        lex
    }

    #[test]
    fn averages_matched_tokens() {
        let label = lexicon_annotate(&lexicon(), &["good", "bad"]);
        let WeakLabel::Distribution(d) = label else {
            panic!()
        };
        assert!((d[0] - 0.5).abs() < 1e-12);
        assert!((d[1] - 0.2).abs() < 1e-12);
        assert!((d[2] - 0.3).abs() < 1e-12);
    }

    #[test]
    fn unmatched_tokens_are_skipped() {
        let label = lexicon_annotate(&lexicon(), &["good", "zzz"]);
        let WeakLabel::Distribution(d) = label else {
            panic!()
        };
        assert!((d[0] - 0.8).abs() < 1e-12);
    }

    #[test]
    fn no_hits_fall_back_to_uniform() {
        let label = lexicon_annotate(&lexicon(), &["zzz", "qqq"]);
        let WeakLabel::Distribution(d) = label else {
            panic!()
        };
        for p in d {
            assert!((p - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn random_sentences_match_naive_reaverage() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        let mut lex = SentimentLexicon::new();
        let mut vocab = Vec::new();
        for i in 0..30 {
            let raw: Vec<f64> = (0..3).map(|_| rng.random_range(0.01..1.0)).collect();
            let sum: f64 = raw.iter().sum();
            let term = format!("w{i}");
            lex.insert(term.clone(), [raw[0] / sum, raw[1] / sum, raw[2] / sum])
                .unwrap();
            vocab.push(term);
        }
        // half the sentence tokens miss the lexicon
        for _ in 0..50 {
            let len = rng.random_range(1..=10);
            let sentence: Vec<String> = (0..len)
                .map(|_| {
                    if rng.random::<f64>() < 0.5 {
                        vocab[rng.random_range(0..vocab.len())].clone()
                    } else {
                        format!("miss{}", rng.random_range(0..100))
                    }
                })
                .collect();
            let WeakLabel::Distribution(got) = lexicon_annotate(&lex, &sentence) else {
                panic!()
            };

            let matched: Vec<&[f64; 3]> = sentence.iter().filter_map(|t| lex.get(t)).collect();
            let want: Vec<f64> = if matched.is_empty() {
                vec![1.0 / 3.0; 3]
            } else {
                (0..3)
                    .map(|k| matched.iter().map(|d| d[k]).sum::<f64>() / matched.len() as f64)
                    .collect()
            };
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn tsv_round_trip() {
        let dir = std::env::temp_dir().join("cws_lex_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("lex.tsv");
        lexicon().write_tsv(&path).unwrap();
        let loaded = SentimentLexicon::load_tsv(&path).unwrap();
        assert_eq!(loaded.len(), 2);
        assert!((loaded.get("good").unwrap()[0] - 0.8).abs() < 1e-9);
    }

    #[test]
    fn malformed_tsv_line_reports_position() {
        let dir = std::env::temp_dir().join("cws_lex_test_bad");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.tsv");
        std::fs::write(&path, "# comment\ngood\t0.8\t0.1\t0.1\nbroken\t0.5\n").unwrap();
        match SentimentLexicon::load_tsv(&path) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
