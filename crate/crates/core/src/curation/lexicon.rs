//! Per-dimension keyword lexicons and scenario matching.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use crate::curation::stem::stem;
use crate::error::{Error, Result};
use crate::text::{tokenize, TokenizerConfig};
use crate::value::ValueDimension;

/// Keyword provenance within one dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tier {
    /// Words from the value's original definition.
    Definitional,
    /// Words found through the word-association service.
    Associated,
    /// Nearest neighbours of definitional words in an embedding space.
    EmbeddingNeighbor,
}

impl Tier {
    pub const ALL: [Tier; 3] = [Tier::Definitional, Tier::Associated, Tier::EmbeddingNeighbor];

    pub fn tag(self) -> &'static str {
        match self {
            Tier::Definitional => "definitional",
            Tier::Associated => "associated",
            Tier::EmbeddingNeighbor => "embedding_neighbor",
        }
    }

    fn from_tag(tag: &str) -> Option<Tier> {
        Tier::ALL.into_iter().find(|t| t.tag() == tag)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DimensionKeywords {
    pub definitional: BTreeSet<String>,
    pub associated: BTreeSet<String>,
    pub embedding_neighbor: BTreeSet<String>,
}

impl DimensionKeywords {
    pub fn tier(&self, tier: Tier) -> &BTreeSet<String> {
        match tier {
            Tier::Definitional => &self.definitional,
            Tier::Associated => &self.associated,
            Tier::EmbeddingNeighbor => &self.embedding_neighbor,
        }
    }

    fn tier_mut(&mut self, tier: Tier) -> &mut BTreeSet<String> {
        match tier {
            Tier::Definitional => &mut self.definitional,
            Tier::Associated => &mut self.associated,
            Tier::EmbeddingNeighbor => &mut self.embedding_neighbor,
        }
    }

    pub fn contains(&self, word: &str) -> bool {
        Tier::ALL.iter().any(|&t| self.tier(t).contains(word))
    }

    pub fn all(&self) -> impl Iterator<Item = &String> {
        self.definitional
            .iter()
            .chain(&self.associated)
            .chain(&self.embedding_neighbor)
    }

    pub fn len(&self) -> usize {
        self.definitional.len() + self.associated.len() + self.embedding_neighbor.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Keywords for every dimension, split into three disjoint tiers.
///
/// Entries are lowercase, trimmed and non-empty. A keyword may be a phrase of
/// several words; it cannot contain tabs, commas or `=`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    dims: BTreeMap<ValueDimension, DimensionKeywords>,
}

impl Default for Lexicon {
    fn default() -> Self {
        Lexicon {
            dims: ValueDimension::ALL
                .into_iter()
                .map(|d| (d, DimensionKeywords::default()))
                .collect(),
        }
    }
}

fn clean_keyword(word: &str) -> Result<String> {
    let w = word.trim().to_lowercase();
    if w.is_empty() {
        return Err(Error::InvalidInput("empty keyword".into()));
    }
    if w.contains(['\t', ',', '=', '\n', '\r']) {
        return Err(Error::InvalidInput(format!(
            "keyword {w:?} contains a reserved character"
        )));
    }
    Ok(w)
}

impl Lexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn dimension(&self, dim: ValueDimension) -> &DimensionKeywords {
        &self.dims[&dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = (ValueDimension, &DimensionKeywords)> {
        self.dims.iter().map(|(d, k)| (*d, k))
    }

    /// Adds a keyword to a tier. Returns `Ok(false)` when the keyword is
    /// already present in any tier of that dimension.
    pub fn insert(&mut self, dim: ValueDimension, tier: Tier, word: &str) -> Result<bool> {
        let w = clean_keyword(word)?;
        let entry = self.dims.get_mut(&dim).expect("all dimensions present");
        if entry.contains(&w) {
            return Ok(false);
        }
        entry.tier_mut(tier).insert(w);
        Ok(true)
    }

    pub fn is_empty(&self) -> bool {
        self.dims.values().all(DimensionKeywords::is_empty)
    }

    /// The keywords quoted in the ten value definitions, all definitional.
    pub fn builtin() -> Self {
        let mut lex = Lexicon::new();
        for (dim, words) in BUILTIN_DEFINITIONAL {
            for w in *words {
                lex.insert(*dim, Tier::Definitional, w)
                    .expect("builtin keywords are well-formed");
            }
        }
        lex
    }

    /// Canonical text form: one line per dimension in canonical order,
    /// `CODE\tdefinitional=a,b\tassociated=…\tembedding_neighbor=…`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (dim, kw) in &self.dims {
            out.push_str(dim.code());
            for tier in Tier::ALL {
                let words: Vec<&str> = kw.tier(tier).iter().map(String::as_str).collect();
                let _ = write!(out, "\t{}={}", tier.tag(), words.join(","));
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut lex = Lexicon::new();
        for (n, line) in text.lines().enumerate() {
            let line_no = n + 1;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split('\t');
            let code = fields.next().unwrap_or_default();
            let dim: ValueDimension = code
                .parse()
                .map_err(|e: Error| Error::parse(path, line_no, "dimension", e.to_string()))?;
            for field in fields {
                let (tag, words) = field.split_once('=').ok_or_else(|| {
                    Error::parse(path, line_no, field, "expected tier=word,word,…")
                })?;
                let tier = Tier::from_tag(tag)
                    .ok_or_else(|| Error::parse(path, line_no, tag, "unknown tier"))?;
                for w in words.split(',').filter(|w| !w.is_empty()) {
                    let added = lex
                        .insert(dim, tier, w)
                        .map_err(|e| Error::parse(path, line_no, tag, e.to_string()))?;
                    if !added {
                        return Err(Error::parse(
                            path,
                            line_no,
                            tag,
                            format!("keyword {w:?} appears in more than one tier"),
                        ));
                    }
                }
            }
        }
        Ok(lex)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

/// Precomputed stemmed keyword sequences for repeated matching.
#[derive(Debug, Clone)]
pub struct LexiconMatcher {
    tokenizer: TokenizerConfig,
    keywords: Vec<(ValueDimension, Vec<String>)>,
}

impl LexiconMatcher {
    pub fn new(lexicon: &Lexicon) -> Self {
        let tokenizer = TokenizerConfig {
            lowercase: true,
            ngram_order: 1,
        };
        let mut keywords = Vec::new();
        for (dim, kw) in lexicon.iter() {
            let mut seen = BTreeSet::new();
            for word in kw.all() {
                let stems: Vec<String> = tokenize(word, &tokenizer).iter().map(|t| stem(t)).collect();
                if !stems.is_empty() && seen.insert(stems.clone()) {
                    keywords.push((dim, stems));
                }
            }
        }
        LexiconMatcher {
            tokenizer,
            keywords,
        }
    }

    /// Dimensions with at least one keyword whose stem sequence occurs
    /// contiguously among the stemmed tokens of `text`.
    pub fn match_text(&self, text: &str) -> BTreeSet<ValueDimension> {
        let stems: Vec<String> = tokenize(text, &self.tokenizer).iter().map(|t| stem(t)).collect();
        let mut out = BTreeSet::new();
        for (dim, kw) in &self.keywords {
            if out.contains(dim) {
                continue;
            }
            if stems.windows(kw.len()).any(|w| w == kw.as_slice()) {
                out.insert(*dim);
            }
        }
        out
    }
}

pub fn match_scenario(text: &str, lexicon: &Lexicon) -> BTreeSet<ValueDimension> {
    LexiconMatcher::new(lexicon).match_text(text)
}

const BUILTIN_DEFINITIONAL: &[(ValueDimension, &[&str])] = &[
    (
        ValueDimension::SelfDirection,
        &[
            "independent", "thought", "action", "choosing", "creating", "exploring", "control",
            "mastery", "autonomy", "independence", "creativity", "freedom", "goals", "curious",
            "self-respect", "intelligent", "privacy",
        ],
    ),
    (
        ValueDimension::Stimulation,
        &[
            "excitement", "novelty", "challenge", "variety", "stimulation", "varied", "exciting",
            "daring", "adventure",
        ],
    ),
    (
        ValueDimension::Hedonism,
        &[
            "pleasure", "gratification", "sensuous", "enjoying", "enjoy", "self-indulgent",
            "hedonism",
        ],
    ),
    (
        ValueDimension::Achievement,
        &[
            "success", "competence", "competent", "performance", "ambitious", "successful",
            "capable", "influential", "intelligent", "self-respect", "social recognition",
            "approval",
        ],
    ),
    (
        ValueDimension::Power,
        &[
            "status", "prestige", "control", "dominance", "resources", "authority", "wealth",
            "social power", "public image", "social recognition", "power",
        ],
    ),
    (
        ValueDimension::Security,
        &[
            "safety", "harmony", "stability", "security", "social order", "family security",
            "national security", "clean", "reciprocation", "favors", "healthy", "moderate",
            "belonging",
        ],
    ),
    (
        ValueDimension::Conformity,
        &[
            "restraint", "norms", "expectations", "obedient", "self-discipline", "politeness",
            "honoring", "parents", "elders", "loyal", "responsible",
        ],
    ),
    (
        ValueDimension::Tradition,
        &[
            "respect", "commitment", "acceptance", "customs", "culture", "religion", "tradition",
            "humble", "devout", "portion", "moderate", "spiritual",
        ],
    ),
    (
        ValueDimension::Benevolence,
        &[
            "welfare", "helpful", "honest", "forgiving", "responsible", "loyal", "friendship",
            "love", "belonging", "meaning", "spiritual", "family",
        ],
    ),
    (
        ValueDimension::Universalism,
        &[
            "understanding", "appreciation", "tolerance", "protection", "nature", "broadminded",
            "social justice", "equality", "peace", "beauty", "wisdom", "environment",
            "inner harmony",
        ],
    ),
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_covers_every_dimension() {
        let lex = Lexicon::builtin();
        for (dim, kw) in lex.iter() {
            assert!(!kw.definitional.is_empty(), "{dim} has no keywords");
        }
    }

    #[test]
    fn matches_definitional_keyword() {
        let lex = Lexicon::builtin();
        let dims = match_scenario("I value my freedom and independence", &lex);
        assert!(dims.contains(&ValueDimension::SelfDirection));
    }

    #[test]
    fn matches_through_stems() {
        let lex = Lexicon::builtin();
        let dims = match_scenario("she obeyed her parents politely", &lex);
        assert!(dims.contains(&ValueDimension::Conformity));
    }

    #[test]
    fn no_match_without_overlap() {
        let mut lex = Lexicon::new();
        lex.insert(ValueDimension::Power, Tier::Definitional, "wealth").unwrap();
        assert!(match_scenario("the cat sat on the mat", &lex).is_empty());
    }

    #[test]
    fn phrase_keywords_need_contiguous_tokens() {
        let mut lex = Lexicon::new();
        lex.insert(ValueDimension::Security, Tier::Definitional, "national security").unwrap();
        assert!(match_scenario("worried about national security", &lex)
            .contains(&ValueDimension::Security));
        assert!(match_scenario("security is national", &lex).is_empty());
    }

    #[test]
    fn tiers_stay_disjoint() {
        let mut lex = Lexicon::new();
        assert!(lex.insert(ValueDimension::Power, Tier::Definitional, "Wealth").unwrap());
        assert!(!lex.insert(ValueDimension::Power, Tier::Associated, "wealth").unwrap());
        assert!(lex.insert(ValueDimension::Achievement, Tier::Associated, "wealth").unwrap());
        assert!(lex.insert(ValueDimension::Power, Tier::Associated, " ").is_err());
    }

    #[test]
    fn text_form_round_trips() {
        let mut lex = Lexicon::builtin();
        lex.insert(ValueDimension::Tradition, Tier::Associated, "custom").unwrap();
        lex.insert(ValueDimension::Tradition, Tier::EmbeddingNeighbor, "heritage").unwrap();
        let text = lex.to_text();
        let back = Lexicon::parse(&text, Path::new("mem")).unwrap();
        assert_eq!(back, lex);
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn parse_rejects_cross_tier_duplicates() {
        let text = "BEN\tdefinitional=kind\tassociated=kind\n";
        let err = Lexicon::parse(text, Path::new("lex.tsv")).unwrap_err();
        assert!(err.to_string().contains("lex.tsv:1"));
    }
}
