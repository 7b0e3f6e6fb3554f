//! Text exports for reward traces and speaker profiles.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::reward::matching::MatchResult;
use crate::reward::pipeline::{RankedCandidate, SpeakerProfile};
use crate::value::{ValueDimension, ValueVector};

/// Flags for turns that take an unusual path through the matching formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TurnNote {
    /// No persona dot product exceeded -1; the turn went to the sentinel bucket.
    Unmatched,
    /// `r` in (-1, 0): the negative exponent amplifies the magnitude past 1.
    NegativeAmplified,
    /// The term was bounded to [-1, 1].
    Clamped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TurnRecord {
    pub turn: usize,
    pub utterance: String,
    pub r: f64,
    pub m: Option<usize>,
    pub gamma: u32,
    pub term: f64,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<TurnNote>,
}

pub fn turn_records(result: &MatchResult, utterances: &[String]) -> Vec<TurnRecord> {
    (0..result.turns())
        .map(|t| {
            let r = result.r[t];
            let mut notes = Vec::new();
            if result.m[t].is_none() {
                notes.push(TurnNote::Unmatched);
            }
            if r < 0.0 && r > -1.0 {
                notes.push(TurnNote::NegativeAmplified);
            }
            if result.clamped[t] {
                notes.push(TurnNote::Clamped);
            }
            TurnRecord {
                turn: t + 1,
                utterance: utterances.get(t).cloned().unwrap_or_default(),
                r,
                m: result.m[t],
                gamma: result.gamma_for_turn(t),
                term: result.terms[t],
                notes,
            }
        })
        .collect()
}

/// Escapes tab, newline, carriage return and backslash for one TSV field.
pub fn escape_field(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

fn note_str(n: TurnNote) -> &'static str {
    match n {
        TurnNote::Unmatched => "unmatched",
        TurnNote::NegativeAmplified => "negative_amplified",
        TurnNote::Clamped => "clamped",
    }
}

/// TSV audit trail: one row per turn, then the persona exponents and `R`.
pub fn format_reward_trace(result: &MatchResult, utterances: &[String]) -> String {
    let mut out = String::from("turn\tutterance\tr\tm\tgamma\tterm\tnotes\n");
    for rec in turn_records(result, utterances) {
        let m = rec.m.map_or_else(|| "none".to_string(), |i| i.to_string());
        let notes: Vec<&str> = rec.notes.iter().map(|&n| note_str(n)).collect();
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            rec.turn,
            escape_field(&rec.utterance),
            rec.r,
            m,
            rec.gamma,
            rec.term,
            notes.join(",")
        )
        .unwrap();
    }
    let gammas: Vec<String> = result.gamma.iter().map(u32::to_string).collect();
    writeln!(out, "# gamma\t{}\tnone={}", gammas.join(","), result.gamma_none).unwrap();
    writeln!(out, "# R\t{}", result.reward).unwrap();
    out
}

fn vector_cells(v: &ValueVector) -> String {
    v.components().iter().map(f64::to_string).collect::<Vec<_>>().join("\t")
}

/// Profile row followed by one row per utterance, columns in canonical
/// dimension order.
pub fn format_profile(profile: &SpeakerProfile) -> String {
    let codes: Vec<&str> = ValueDimension::ALL.iter().map(|d| d.code()).collect();
    let mut out = format!("row\ttext\t{}\n", codes.join("\t"));
    writeln!(out, "profile\t\t{}", vector_cells(&profile.profile)).unwrap();
    for (text, v) in profile.utterances.iter().zip(&profile.per_utterance) {
        writeln!(out, "utterance\t{}\t{}", escape_field(text), vector_cells(v)).unwrap();
    }
    out
}

/// `dimension value` pairs for a radar plot.
pub fn format_radar(v: &ValueVector) -> String {
    let mut out = String::from("dimension\tvalue\n");
    for d in ValueDimension::ALL {
        writeln!(out, "{}\t{}", d.code(), v[d]).unwrap();
    }
    out
}

pub fn format_ranking(ranked: &[RankedCandidate]) -> String {
    let mut out = String::from("rank\tindex\tdelta_r\tcandidate\n");
    for (rank, c) in ranked.iter().enumerate() {
        writeln!(out, "{}\t{}\t{}\t{}", rank + 1, c.index, c.delta, escape_field(&c.text)).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reward::matching::match_values;
    use crate::value::ValueDimension::Security;

    #[test]
    fn trace_lists_every_turn() {
        let e = ValueVector::axis(Security);
        let res = match_values(&[e], &[e, e.negate()], false).unwrap();
        let text = format_reward_trace(&res, &["a\tb".into(), "c".into()]);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[1], "1\ta\\tb\t1\t1\t2\t1\t");
        assert_eq!(lines[2], "2\tc\t-1\tnone\t2\t-1\tunmatched");
        assert_eq!(lines[3], "# gamma\t2\tnone=2");
        assert_eq!(lines[4], "# R\t0");
    }

    #[test]
    fn radar_has_ten_rows() {
        let text = format_radar(&ValueVector::axis(Security));
        assert_eq!(text.lines().count(), 11);
        assert!(text.contains("SEC\t1\n"));
    }
}
