//! English stemming with an irregular-form lemma table layered in front.

use std::sync::OnceLock;

use rust_stemmers::{Algorithm, Stemmer};

/// Irregular and derivational forms the suffix stripper cannot reach.
const LEMMAS: &[(&str, &str)] = &[
    ("children", "child"),
    ("men", "man"),
    ("women", "woman"),
    ("people", "person"),
    ("mice", "mouse"),
    ("feet", "foot"),
    ("teeth", "tooth"),
    ("geese", "goose"),
    ("lives", "life"),
    ("wives", "wife"),
    ("knives", "knife"),
    ("went", "go"),
    ("gone", "go"),
    ("was", "be"),
    ("were", "be"),
    ("been", "be"),
    ("is", "be"),
    ("are", "be"),
    ("am", "be"),
    ("did", "do"),
    ("done", "do"),
    ("had", "have"),
    ("has", "have"),
    ("made", "make"),
    ("took", "take"),
    ("taken", "take"),
    ("gave", "give"),
    ("given", "give"),
    ("got", "get"),
    ("gotten", "get"),
    ("thought", "think"),
    ("brought", "bring"),
    ("bought", "buy"),
    ("taught", "teach"),
    ("sought", "seek"),
    ("fought", "fight"),
    ("felt", "feel"),
    ("kept", "keep"),
    ("left", "leave"),
    ("lost", "lose"),
    ("met", "meet"),
    ("paid", "pay"),
    ("said", "say"),
    ("sold", "sell"),
    ("told", "tell"),
    ("won", "win"),
    ("ate", "eat"),
    ("wrote", "write"),
    ("written", "write"),
    ("better", "good"),
    ("best", "good"),
    ("worse", "bad"),
    ("worst", "bad"),
    ("obedient", "obey"),
    ("obedience", "obey"),
    ("obediently", "obey"),
    ("humility", "humble"),
    ("wealthy", "wealth"),
    ("richer", "rich"),
    ("richest", "rich"),
];

fn stemmer() -> &'static Stemmer {
    static STEMMER: OnceLock<Stemmer> = OnceLock::new();
    STEMMER.get_or_init(|| Stemmer::create(Algorithm::English))
}

/// Lowercases, maps irregular forms through the lemma table, then strips
/// suffixes. Deterministic and idempotent on its own output for ordinary words.
pub fn stem(word: &str) -> String {
    let lower = word.to_lowercase();
    let base = LEMMAS
        .iter()
        .find(|(form, _)| *form == lower)
        .map_or(lower.as_str(), |(_, lemma)| lemma);
    stemmer().stem(base).into_owned()
}
