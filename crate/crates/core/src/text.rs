//! Tokenization shared by lexicon matching and the value model.

use serde::{Deserialize, Serialize};
use unicode_segmentation::UnicodeSegmentation;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizerConfig {
    pub lowercase: bool,
    /// Highest n-gram order used by featurization; 1 means unigrams only.
    pub ngram_order: usize,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        TokenizerConfig {
            lowercase: true,
            ngram_order: 2,
        }
    }
}

/// Splits `text` on Unicode word boundaries. Words stay whole (including
/// inner apostrophes), each punctuation character becomes its own token and
/// whitespace is dropped.
pub fn tokenize(text: &str, config: &TokenizerConfig) -> Vec<String> {
    text.split_word_bounds()
        .filter(|seg| !seg.chars().all(char::is_whitespace))
        .flat_map(|seg| {
            if seg.chars().any(char::is_alphanumeric) {
                vec![seg.to_string()]
            } else {
                seg.chars()
                    .filter(|c| !c.is_whitespace())
                    .map(String::from)
                    .collect()
            }
        })
        .map(|tok| if config.lowercase { tok.to_lowercase() } else { tok })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        tokenize(s, &TokenizerConfig::default())
    }

    #[test]
    fn splits_simple_text() {
        assert_eq!(toks("I miss mom"), ["i", "miss", "mom"]);
        assert!(toks("").is_empty());
        assert!(toks("   \t\n").is_empty());
    }

    #[test]
    fn punctuation_is_standalone() {
        assert_eq!(toks("Hello, world!!"), ["hello", ",", "world", "!", "!"]);
        assert_eq!(toks("don't stop"), ["don't", "stop"]);
    }

    #[test]
    fn case_preserved_when_configured() {
        let cfg = TokenizerConfig {
            lowercase: false,
            ngram_order: 1,
        };
        assert_eq!(tokenize("Big Dog", &cfg), ["Big", "Dog"]);
    }
}
