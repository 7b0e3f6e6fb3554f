//! Word-vector tables and nearest-neighbour lexicon expansion.

use std::collections::HashMap;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::curation::lexicon::{Lexicon, Tier};
use crate::error::{Error, Result};
use crate::value::ValueDimension;

/// Dense word vectors of a fixed dimension.
#[derive(Debug, Clone, Default)]
pub struct EmbeddingTable {
    dim: usize,
    words: Vec<String>,
    vectors: Vec<Vec<f64>>,
    norms: Vec<f64>,
    index: HashMap<String, usize>,
}

impl EmbeddingTable {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("embedding dimension must be ≥ 1".into()));
        }
        Ok(EmbeddingTable {
            dim,
            ..Default::default()
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Adds or replaces the vector for `word`.
    pub fn insert(&mut self, word: &str, vector: Vec<f64>) -> Result<()> {
        if vector.len() != self.dim {
            return Err(Error::InvalidInput(format!(
                "vector for {word:?} has length {}, table dimension is {}",
                vector.len(),
                self.dim
            )));
        }
        let norm = vector.iter().map(|x| x * x).sum::<f64>().sqrt();
        match self.index.get(word) {
            Some(&i) => {
                self.vectors[i] = vector;
                self.norms[i] = norm;
            }
            None => {
                self.index.insert(word.to_string(), self.words.len());
                self.words.push(word.to_string());
                self.vectors.push(vector);
                self.norms.push(norm);
            }
        }
        Ok(())
    }

    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.index.get(word).map(|&i| self.vectors[i].as_slice())
    }

    /// Cosine similarity; zero vectors have similarity 0 with everything.
    pub fn cosine(&self, a: &str, b: &str) -> Option<f64> {
        let (i, j) = (*self.index.get(a)?, *self.index.get(b)?);
        Some(self.cosine_idx(i, j))
    }

    fn cosine_idx(&self, i: usize, j: usize) -> f64 {
        let denom = self.norms[i] * self.norms[j];
        if denom == 0.0 {
            return 0.0;
        }
        let d: f64 = self.vectors[i]
            .iter()
            .zip(&self.vectors[j])
            .map(|(x, y)| x * y)
            .sum();
        d / denom
    }

    /// Up to `k` other words with similarity ≥ `min_sim`, most similar first,
    /// ties broken lexicographically. Words rejected by `skip` do not count
    /// towards `k`.
    pub fn nearest(
        &self,
        word: &str,
        k: usize,
        min_sim: f64,
        mut skip: impl FnMut(&str) -> bool,
    ) -> Vec<(String, f64)> {
        let Some(&i) = self.index.get(word) else {
            return Vec::new();
        };
        let mut cands: Vec<(usize, f64)> = (0..self.words.len())
            .filter(|&j| j != i)
            .map(|j| (j, self.cosine_idx(i, j)))
            .filter(|&(j, sim)| sim >= min_sim && !skip(&self.words[j]))
            .collect();
        cands.sort_by(|a, b| {
            b.1.total_cmp(&a.1)
                .then_with(|| self.words[a.0].cmp(&self.words[b.0]))
        });
        cands
            .into_iter()
            .take(k)
            .map(|(j, s)| (self.words[j].clone(), s))
            .collect()
    }

    /// Reads the plain word-vector text format: `word v1 … vD` per line, with
    /// an optional leading `count dim` header.
    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read(BufReader::new(file), path)
    }

    pub fn read(reader: impl BufRead, path: &Path) -> Result<Self> {
        let mut table: Option<EmbeddingTable> = None;
        for (n, line) in reader.lines().enumerate() {
            let line_no = n + 1;
            let line = line.map_err(|e| Error::io(path, e))?;
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.is_empty() {
                continue;
            }
            if n == 0 && fields.len() == 2 && fields.iter().all(|f| f.parse::<usize>().is_ok()) {
                let dim: usize = fields[1].parse().unwrap_or(0);
                table = Some(
                    EmbeddingTable::new(dim)
                        .map_err(|e| Error::parse(path, line_no, "dim", e.to_string()))?,
                );
                continue;
            }
            let (word, rest) = fields.split_first().expect("non-empty");
            let vector = rest
                .iter()
                .enumerate()
                .map(|(k, v)| {
                    v.parse::<f64>()
                        .map_err(|e| Error::parse(path, line_no, format!("v{}", k + 1), e.to_string()))
                })
                .collect::<Result<Vec<f64>>>()?;
            let t = match table.as_mut() {
                Some(t) => t,
                None => table.insert(
                    EmbeddingTable::new(vector.len())
                        .map_err(|e| Error::parse(path, line_no, "vector", e.to_string()))?,
                ),
            };
            t.insert(word, vector)
                .map_err(|e| Error::parse(path, line_no, "vector", e.to_string()))?;
        }
        table.ok_or_else(|| Error::parse(path, 1, "vector", "no vectors in file"))
    }
}

/// What an expansion pass skipped and added.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExpansionReport {
    /// Definitional keywords not found in the table.
    pub missing: Vec<(ValueDimension, String)>,
    /// Added neighbour, the keyword it came from, and its similarity.
    pub added: Vec<(ValueDimension, String, String, f64)>,
}

/// Adds up to `k` embedding neighbours (cosine ≥ `min_sim`) of every
/// definitional keyword to the embedding-neighbour tier of its dimension.
/// Words already present in any tier of that dimension are skipped.
pub fn expand_lexicon_embedding(
    lexicon: &Lexicon,
    table: &EmbeddingTable,
    k: usize,
    min_sim: f64,
) -> Result<(Lexicon, ExpansionReport)> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be ≥ 1".into()));
    }
    if !(-1.0..=1.0).contains(&min_sim) {
        return Err(Error::InvalidInput(format!("min_sim {min_sim} outside [-1, 1]")));
    }
    if table.is_empty() {
        return Err(Error::InvalidInput("embedding table is empty".into()));
    }
    let mut out = lexicon.clone();
    let mut report = ExpansionReport::default();
    for (dim, kw) in lexicon.iter() {
        for keyword in &kw.definitional {
            if table.get(keyword).is_none() {
                report.missing.push((dim, keyword.clone()));
                continue;
            }
            let current = out.dimension(dim);
            let found = table.nearest(keyword, k, min_sim, |w| current.contains(w));
            for (word, sim) in found {
                out.insert(dim, Tier::EmbeddingNeighbor, &word)?;
                report.added.push((dim, keyword.clone(), word, sim));
            }
        }
    }
    Ok((out, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn toy_table() -> EmbeddingTable {
        // cos(a, b) = 0.9, cos(a, c) = 0.1
        let mut t = EmbeddingTable::new(2).unwrap();
        t.insert("a", vec![1.0, 0.0]).unwrap();
        t.insert("b", vec![0.9, (1.0f64 - 0.81).sqrt()]).unwrap();
        t.insert("c", vec![0.1, (1.0f64 - 0.01).sqrt()]).unwrap();
        t
    }

    fn lex_with(dim: ValueDimension, word: &str) -> Lexicon {
        let mut lex = Lexicon::new();
        lex.insert(dim, Tier::Definitional, word).unwrap();
        lex
    }

    #[test]
    fn brute_force_cosines_match_toy_construction() {
        let t = toy_table();
        assert!((t.cosine("a", "b").unwrap() - 0.9).abs() < 1e-12);
        assert!((t.cosine("a", "c").unwrap() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn adds_only_close_neighbour() {
        let lex = lex_with(ValueDimension::Power, "a");
        let (out, report) = expand_lexicon_embedding(&lex, &toy_table(), 1, 0.5).unwrap();
        let added: Vec<_> = out.dimension(ValueDimension::Power).embedding_neighbor.iter().cloned().collect();
        assert_eq!(added, ["b"]);
        assert_eq!(report.added.len(), 1);
    }

    #[test]
    fn self_is_not_a_neighbour() {
        let mut t = EmbeddingTable::new(3).unwrap();
        t.insert("wealth", vec![1.0, 2.0, 3.0]).unwrap();
        let lex = lex_with(ValueDimension::Power, "wealth");
        let (out, _) = expand_lexicon_embedding(&lex, &t, 5, -1.0).unwrap();
        assert_eq!(out, lex);
    }

    #[test]
    fn strict_threshold_adds_nothing() {
        let lex = lex_with(ValueDimension::Power, "a");
        let (out, _) = expand_lexicon_embedding(&lex, &toy_table(), 3, 1.0).unwrap();
        assert_eq!(out, lex);
    }

    #[test]
    fn missing_keywords_are_reported() {
        let lex = lex_with(ValueDimension::Power, "zzz");
        let (out, report) = expand_lexicon_embedding(&lex, &toy_table(), 1, 0.0).unwrap();
        assert_eq!(out, lex);
        assert_eq!(report.missing, [(ValueDimension::Power, "zzz".to_string())]);
    }

    #[test]
    fn ties_break_lexicographically() {
        let mut t = EmbeddingTable::new(2).unwrap();
        t.insert("q", vec![1.0, 0.0]).unwrap();
        t.insert("zeta", vec![1.0, 1.0]).unwrap();
        t.insert("alpha", vec![1.0, 1.0]).unwrap();
        let lex = lex_with(ValueDimension::Power, "q");
        let (out, _) = expand_lexicon_embedding(&lex, &t, 1, 0.0).unwrap();
        assert!(out.dimension(ValueDimension::Power).embedding_neighbor.contains("alpha"));
    }

    #[test]
    fn reads_with_and_without_header() {
        let body = "2 3\nfoo 1 0 0\nbar 0 1 0.5\n";
        let t = EmbeddingTable::read(Cursor::new(body), Path::new("e.txt")).unwrap();
        assert_eq!((t.len(), t.dim()), (2, 3));
        let t = EmbeddingTable::read(Cursor::new("foo 1 0\nbar 0 1\n"), Path::new("e.txt")).unwrap();
        assert_eq!((t.len(), t.dim()), (2, 2));
        let err = EmbeddingTable::read(Cursor::new("foo 1 0\nbar 0 1 2\n"), Path::new("e.txt")).unwrap_err();
        assert!(err.to_string().contains("e.txt:2"));
        let err = EmbeddingTable::read(Cursor::new("foo 1 x\n"), Path::new("e.txt")).unwrap_err();
        assert!(err.to_string().contains("v2"));
    }
}
