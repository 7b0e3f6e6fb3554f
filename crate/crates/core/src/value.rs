//! Value dimensions, utilities and value vectors.

use std::fmt;
use std::ops::Index;
use std::str::FromStr;

use serde::de::{self, Deserializer, MapAccess, SeqAccess, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

/// One of the ten basic human values.
///
/// Variants are declared in canonical order, which is the alphabetical order
/// of their short codes. Every serialized vector uses this order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ValueDimension {
    Achievement,
    Benevolence,
    Conformity,
    Hedonism,
    Power,
    Security,
    SelfDirection,
    Stimulation,
    Tradition,
    Universalism,
}

/// Higher-order grouping of the dimensions. Metadata only.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueGroup {
    OpennessToChange,
    SelfEnhancement,
    Conservation,
    SelfTranscendence,
}

impl ValueDimension {
    pub const COUNT: usize = 10;

    pub const ALL: [ValueDimension; 10] = [
        ValueDimension::Achievement,
        ValueDimension::Benevolence,
        ValueDimension::Conformity,
        ValueDimension::Hedonism,
        ValueDimension::Power,
        ValueDimension::Security,
        ValueDimension::SelfDirection,
        ValueDimension::Stimulation,
        ValueDimension::Tradition,
        ValueDimension::Universalism,
    ];

    /// Position in canonical order.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Self> {
        Self::ALL.get(index).copied()
    }

    pub fn code(self) -> &'static str {
        match self {
            ValueDimension::Achievement => "ACH",
            ValueDimension::Benevolence => "BEN",
            ValueDimension::Conformity => "CON",
            ValueDimension::Hedonism => "HED",
            ValueDimension::Power => "POW",
            ValueDimension::Security => "SEC",
            ValueDimension::SelfDirection => "SD",
            ValueDimension::Stimulation => "STI",
            ValueDimension::Tradition => "TRA",
            ValueDimension::Universalism => "UNI",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ValueDimension::Achievement => "ACHIEVEMENT",
            ValueDimension::Benevolence => "BENEVOLENCE",
            ValueDimension::Conformity => "CONFORMITY",
            ValueDimension::Hedonism => "HEDONISM",
            ValueDimension::Power => "POWER",
            ValueDimension::Security => "SECURITY",
            ValueDimension::SelfDirection => "SELF_DIRECTION",
            ValueDimension::Stimulation => "STIMULATION",
            ValueDimension::Tradition => "TRADITION",
            ValueDimension::Universalism => "UNIVERSALISM",
        }
    }

    pub fn group(self) -> ValueGroup {
        use ValueDimension::*;
        match self {
            SelfDirection | Stimulation => ValueGroup::OpennessToChange,
            Hedonism | Achievement | Power => ValueGroup::SelfEnhancement,
            Security | Conformity | Tradition => ValueGroup::Conservation,
            Benevolence | Universalism => ValueGroup::SelfTranscendence,
        }
    }
}

impl fmt::Display for ValueDimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for ValueDimension {
    type Err = Error;

    /// Accepts short codes or full names, case-insensitively. `-` and spaces
    /// are treated like `_` in names.
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_uppercase().replace(['-', ' '], "_");
        ValueDimension::ALL
            .into_iter()
            .find(|d| d.code() == key || d.name() == key)
            .ok_or_else(|| Error::UnknownDimension(s.to_string()))
    }
}

impl Serialize for ValueDimension {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.code())
    }
}

impl<'de> Deserialize<'de> for ValueDimension {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

/// A utility in `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Utility(f64);

impl Utility {
    pub const ZERO: Utility = Utility(0.0);

    pub fn new(value: f64) -> Result<Self> {
        if (-1.0..=1.0).contains(&value) {
            Ok(Utility(value))
        } else {
            Err(Error::InvalidInput(format!(
                "utility {value} outside [-1, 1]"
            )))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl From<Utility> for f64 {
    fn from(u: Utility) -> f64 {
        u.0
    }
}

/// Ten utilities, one per dimension, stored in canonical order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValueVector([f64; ValueDimension::COUNT]);

impl ValueVector {
    pub const ZERO: ValueVector = ValueVector([0.0; ValueDimension::COUNT]);

    /// Builds a vector from canonical-order components, each in `[-1, 1]`.
    pub fn new(components: [f64; ValueDimension::COUNT]) -> Result<Self> {
        for (dim, &c) in ValueDimension::ALL.iter().zip(components.iter()) {
            if !(-1.0..=1.0).contains(&c) {
                return Err(Error::InvalidInput(format!(
                    "component {dim} = {c} outside [-1, 1]"
                )));
            }
        }
        Ok(ValueVector(components))
    }

    /// Unit vector along one dimension.
    pub fn axis(dim: ValueDimension) -> Self {
        let mut c = [0.0; ValueDimension::COUNT];
        c[dim.index()] = 1.0;
        ValueVector(c)
    }

    pub fn from_fn(mut f: impl FnMut(ValueDimension) -> f64) -> Result<Self> {
        let mut c = [0.0; ValueDimension::COUNT];
        for dim in ValueDimension::ALL {
            c[dim.index()] = f(dim);
        }
        Self::new(c)
    }

    pub fn components(&self) -> &[f64; ValueDimension::COUNT] {
        &self.0
    }

    pub fn get(&self, dim: ValueDimension) -> Utility {
        Utility(self.0[dim.index()])
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0.0)
    }

    /// Component-wise negation.
    pub fn negate(&self) -> Self {
        ValueVector(self.0.map(|c| -c))
    }

    /// Scales by `factor`, rejecting results that leave `[-1, 1]`.
    pub fn scale(&self, factor: f64) -> Result<Self> {
        Self::new(self.0.map(|c| c * factor))
    }

    /// `true` when the norm is 1 within `tol`, or the vector is all zeros.
    pub fn is_normalized(&self, tol: f64) -> bool {
        self.is_zero() || (self.norm() - 1.0).abs() <= tol
    }

    /// Dimension with the largest component; first in canonical order on ties.
    pub fn argmax(&self) -> ValueDimension {
        let mut best = 0;
        for i in 1..ValueDimension::COUNT {
            if self.0[i] > self.0[best] {
                best = i;
            }
        }
        ValueDimension::ALL[best]
    }
}

impl Default for ValueVector {
    fn default() -> Self {
        ValueVector::ZERO
    }
}

impl Index<ValueDimension> for ValueVector {
    type Output = f64;

    fn index(&self, dim: ValueDimension) -> &f64 {
        &self.0[dim.index()]
    }
}

impl Serialize for ValueVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ValueVector {
    /// Accepts a ten-element array in canonical order or a code-keyed map
    /// with all ten dimensions present.
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct VectorVisitor;

        impl<'de> Visitor<'de> for VectorVisitor {
            type Value = ValueVector;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an array of ten reals or a map keyed by dimension code")
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<Self::Value, A::Error> {
                let mut c = [0.0; ValueDimension::COUNT];
                for (i, slot) in c.iter_mut().enumerate() {
                    *slot = seq
                        .next_element()?
                        .ok_or_else(|| de::Error::invalid_length(i, &self))?;
                }
                if seq.next_element::<f64>()?.is_some() {
                    return Err(de::Error::invalid_length(11, &self));
                }
                ValueVector::new(c).map_err(de::Error::custom)
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> std::result::Result<Self::Value, A::Error> {
                let mut c = [None; ValueDimension::COUNT];
                while let Some((key, value)) = map.next_entry::<String, f64>()? {
                    let dim: ValueDimension = key.parse().map_err(de::Error::custom)?;
                    if c[dim.index()].replace(value).is_some() {
                        return Err(de::Error::custom(format!("duplicate dimension {dim}")));
                    }
                }
                let mut out = [0.0; ValueDimension::COUNT];
                for dim in ValueDimension::ALL {
                    out[dim.index()] = c[dim.index()]
                        .ok_or_else(|| de::Error::custom(format!("missing dimension {dim}")))?;
                }
                ValueVector::new(out).map_err(de::Error::custom)
            }
        }

        deserializer.deserialize_any(VectorVisitor)
    }
}

/// Scales `v` to unit Euclidean norm. The zero vector is returned unchanged.
pub fn normalize(v: &ValueVector) -> ValueVector {
    normalize_raw(v.components())
}

/// Normalizes an unconstrained raw score vector (components may lie outside
/// `[-1, 1]`). All-zero input yields the zero vector.
pub fn normalize_raw(raw: &[f64; ValueDimension::COUNT]) -> ValueVector {
    let norm = raw.iter().map(|c| c * c).sum::<f64>().sqrt();
    if norm == 0.0 {
        return ValueVector::ZERO;
    }
    ValueVector(raw.map(|c| (c / norm).clamp(-1.0, 1.0)))
}

pub fn dot(a: &ValueVector, b: &ValueVector) -> f64 {
    a.0.iter().zip(b.0.iter()).map(|(x, y)| x * y).sum()
}

/// A single annotator's answer for one scenario and dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Vote {
    Yes,
    No,
    Unrelated,
}

impl Vote {
    pub const ALL: [Vote; 3] = [Vote::Yes, Vote::No, Vote::Unrelated];

    pub fn as_str(self) -> &'static str {
        match self {
            Vote::Yes => "yes",
            Vote::No => "no",
            Vote::Unrelated => "unrelated",
        }
    }

    pub fn utility(self) -> i8 {
        match self {
            Vote::Yes => 1,
            Vote::No => -1,
            Vote::Unrelated => 0,
        }
    }
}

impl FromStr for Vote {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "yes" => Ok(Vote::Yes),
            "no" => Ok(Vote::No),
            "unrelated" => Ok(Vote::Unrelated),
            _ => Err(Error::UnknownVote(s.to_string())),
        }
    }
}

/// Maps a vote string to its utility: yes → +1, no → -1, unrelated → 0.
pub fn quantize_vote(vote: &str) -> Result<i8> {
    vote.parse::<Vote>().map(Vote::utility)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Scenario {
    pub id: String,
    pub text: String,
}

impl Scenario {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Result<Self> {
        let text = text.into();
        if text.trim().is_empty() {
            return Err(Error::InvalidInput("scenario text is empty".into()));
        }
        Ok(Scenario { id: id.into(), text })
    }
}

/// One worker's vote on one scenario along one dimension.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Annotation {
    pub scenario_id: String,
    pub scenario_text: String,
    pub dimension: ValueDimension,
    pub worker_id: String,
    pub vote: Vote,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedSample {
    pub scenario: Scenario,
    pub dimension: ValueDimension,
    pub label: i8,
    pub agreement: u32,
}

impl AnnotatedSample {
    pub fn new(scenario: Scenario, dimension: ValueDimension, label: i8, agreement: u32) -> Result<Self> {
        if !(-1..=1).contains(&label) {
            return Err(Error::InvalidInput(format!("label {label} not in {{-1, 0, 1}}")));
        }
        Ok(AnnotatedSample {
            scenario,
            dimension,
            label,
            agreement,
        })
    }

    pub fn key(&self) -> (&str, ValueDimension) {
        (&self.scenario.id, self.dimension)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetSplit {
    pub train: Vec<AnnotatedSample>,
    pub valid: Vec<AnnotatedSample>,
    pub test: Vec<AnnotatedSample>,
    pub seed: u64,
}

impl DatasetSplit {
    pub fn counts(&self) -> (usize, usize, usize) {
        (self.train.len(), self.valid.len(), self.test.len())
    }
}
