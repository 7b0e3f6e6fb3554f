//! Hashed n-gram featurization.

use crate::text::TokenizerConfig;
use crate::value::ValueDimension;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// Seeded 64-bit FNV-1a. The seed is hashed in (little-endian) before the
/// payload, so the function is platform independent.
pub fn seeded_hash(seed: u64, bytes: &[u8]) -> u64 {
    let mut h = FNV_OFFSET;
    for b in seed.to_le_bytes().iter().chain(bytes) {
        h ^= *b as u64;
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

/// Feature indices of one (text, dimension) input: hashed n-grams plus the
/// dimension's prompt slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Features {
    pub ngrams: Vec<usize>,
    pub prompt: ValueDimension,
}

impl Features {
    /// Number of pooled vectors, counting the prompt.
    pub fn pooled_len(&self) -> usize {
        self.ngrams.len() + 1
    }
}

/// Hashes every n-gram of order 1..=`ngram_order` into `[0, hash_dim)`.
pub fn hash_ngrams(tokens: &[String], tokenizer: &TokenizerConfig, hash_dim: usize, hash_seed: u64) -> Vec<usize> {
    let mut out = Vec::new();
    let mut buf = String::new();
    for order in 1..=tokenizer.ngram_order.max(1) {
        for window in tokens.windows(order) {
            buf.clear();
            for (i, tok) in window.iter().enumerate() {
                if i > 0 {
                    buf.push('\u{1f}');
                }
                buf.push_str(tok);
            }
            out.push((seeded_hash(hash_seed, buf.as_bytes()) % hash_dim as u64) as usize);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &[&str]) -> Vec<String> {
        s.iter().map(|t| t.to_string()).collect()
    }

    #[test]
    fn reference_hash_values_are_stable() {
        // FNV-1a of the empty payload after an all-zero seed.
        let mut h = FNV_OFFSET;
        for _ in 0..8 {
            h = h.wrapping_mul(FNV_PRIME);
        }
        assert_eq!(seeded_hash(0, b""), h);
        assert_ne!(seeded_hash(0, b"a"), seeded_hash(1, b"a"));
    }

    #[test]
    fn unigrams_and_bigrams() {
        let cfg = TokenizerConfig::default();
        let idx = hash_ngrams(&toks(&["i", "miss", "mom"]), &cfg, 1 << 18, 7);
        assert_eq!(idx.len(), 3 + 2);
        assert_eq!(idx, hash_ngrams(&toks(&["i", "miss", "mom"]), &cfg, 1 << 18, 7));
        assert!(hash_ngrams(&[], &cfg, 64, 7).is_empty());
    }

    #[test]
    fn bigram_differs_from_concatenated_unigram() {
        let cfg = TokenizerConfig::default();
        let a = hash_ngrams(&toks(&["ab", "c"]), &cfg, 1 << 30, 1);
        let b = hash_ngrams(&toks(&["a", "bc"]), &cfg, 1 << 30, 1);
        assert_ne!(a[2], b[2]);
    }
}
