//! Line-delimited record formats for annotations and samples, a plain text
//! scenario reader, and a column-mapped CSV adapter.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::value::{AnnotatedSample, Annotation, Scenario, ValueDimension, Vote};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub id: String,
    pub scenario: String,
    pub dimension_code: String,
    pub label: i8,
    pub agreement: u32,
}

impl From<&AnnotatedSample> for SampleRecord {
    fn from(s: &AnnotatedSample) -> Self {
        SampleRecord {
            id: s.scenario.id.clone(),
            scenario: s.scenario.text.clone(),
            dimension_code: s.dimension.code().to_string(),
            label: s.label,
            agreement: s.agreement,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub scenario_id: String,
    pub scenario_text: String,
    pub dimension_code: String,
    pub worker_id: String,
    pub vote: String,
}

impl From<&Annotation> for AnnotationRecord {
    fn from(a: &Annotation) -> Self {
        AnnotationRecord {
            scenario_id: a.scenario_id.clone(),
            scenario_text: a.scenario_text.clone(),
            dimension_code: a.dimension.code().to_string(),
            worker_id: a.worker_id.clone(),
            vote: a.vote.as_str().to_string(),
        }
    }
}

struct Fields<'a> {
    map: Map<String, Value>,
    path: &'a Path,
    line: usize,
}

impl<'a> Fields<'a> {
    fn parse(text: &str, path: &'a Path, line: usize) -> Result<Self> {
        match serde_json::from_str::<Value>(text) {
            Ok(Value::Object(map)) => Ok(Fields { map, path, line }),
            Ok(_) => Err(Error::parse(path, line, "<record>", "expected a JSON object")),
            Err(e) => Err(Error::parse(path, line, "<record>", e.to_string())),
        }
    }

    fn err(&self, field: &str, msg: impl Into<String>) -> Error {
        Error::parse(self.path, self.line, field, msg)
    }

    fn string(&self, field: &str) -> Result<String> {
        match self.map.get(field) {
            Some(Value::String(s)) => Ok(s.clone()),
            Some(Value::Number(n)) => Ok(n.to_string()),
            Some(_) => Err(self.err(field, "expected a string")),
            None => Err(self.err(field, "missing field")),
        }
    }

    fn integer(&self, field: &str) -> Result<i64> {
        self.map
            .get(field)
            .ok_or_else(|| self.err(field, "missing field"))?
            .as_i64()
            .ok_or_else(|| self.err(field, "expected an integer"))
    }

    fn dimension(&self, field: &str) -> Result<ValueDimension> {
        self.string(field)?
            .parse()
            .map_err(|e: Error| self.err(field, e.to_string()))
    }

    fn text(&self, field: &str) -> Result<String> {
        let s = self.string(field)?;
        if s.trim().is_empty() {
            return Err(self.err(field, "empty text"));
        }
        Ok(s)
    }
}

fn read_lines(path: &Path) -> Result<Vec<(usize, String)>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if !line.trim().is_empty() {
            out.push((n + 1, line));
        }
    }
    Ok(out)
}

pub fn parse_sample(text: &str, path: &Path, line: usize) -> Result<AnnotatedSample> {
    let f = Fields::parse(text, path, line)?;
    let label = f.integer("label")?;
    if !(-1..=1).contains(&label) {
        return Err(f.err("label", format!("{label} not in {{-1, 0, 1}}")));
    }
    let agreement = f.integer("agreement")?;
    let agreement = u32::try_from(agreement).map_err(|_| f.err("agreement", "must be ≥ 0"))?;
    Ok(AnnotatedSample {
        scenario: Scenario {
            id: f.string("id")?,
            text: f.text("scenario")?,
        },
        dimension: f.dimension("dimension_code")?,
        label: label as i8,
        agreement,
    })
}

pub fn parse_annotation(text: &str, path: &Path, line: usize) -> Result<Annotation> {
    let f = Fields::parse(text, path, line)?;
    let vote = f.string("vote")?;
    Ok(Annotation {
        scenario_id: f.string("scenario_id")?,
        scenario_text: f.text("scenario_text")?,
        dimension: f.dimension("dimension_code")?,
        worker_id: f.string("worker_id")?,
        vote: vote
            .parse::<Vote>()
            .map_err(|e| f.err("vote", e.to_string()))?,
    })
}

pub fn read_samples(path: &Path) -> Result<Vec<AnnotatedSample>> {
    read_lines(path)?
        .iter()
        .map(|(n, l)| parse_sample(l, path, *n))
        .collect()
}

pub fn read_annotations(path: &Path) -> Result<Vec<Annotation>> {
    read_lines(path)?
        .iter()
        .map(|(n, l)| parse_annotation(l, path, *n))
        .collect()
}

pub fn write_jsonl<T: Serialize>(path: &Path, records: impl IntoIterator<Item = T>) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    for r in records {
        serde_json::to_writer(&mut w, &r).map_err(|e| Error::Decode(e.to_string()))?;
        w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_samples(path: &Path, samples: &[AnnotatedSample]) -> Result<()> {
    write_jsonl(path, samples.iter().map(SampleRecord::from))
}

pub fn write_annotations(path: &Path, annotations: &[Annotation]) -> Result<()> {
    write_jsonl(path, annotations.iter().map(AnnotationRecord::from))
}

/// One scenario per non-blank line. A line `id<TAB>text` sets the id;
/// otherwise the id is the 1-based line number.
pub fn read_scenarios(path: &Path) -> Result<Vec<Scenario>> {
    read_lines(path)?
        .into_iter()
        .map(|(n, line)| {
            let (id, text) = match line.split_once('\t') {
                Some((id, text)) => (id.to_string(), text.to_string()),
                None => (n.to_string(), line),
            };
            Scenario::new(id, text).map_err(|e| Error::parse(path, n, "text", e.to_string()))
        })
        .collect()
}

/// Column mapping for comma-separated sample files of unknown layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CsvMapping {
    /// Column holding the scenario id; row numbers are used when absent.
    pub id: Option<String>,
    pub scenario: String,
    /// Column holding a dimension code or name.
    pub dimension: Option<String>,
    /// Dimension for every row, when the file has no dimension column.
    pub fixed_dimension: Option<String>,
    /// Column holding the label as -1/0/1 or yes/no/unrelated.
    pub label: String,
    pub agreement: Option<String>,
    #[serde(default = "default_delimiter")]
    pub delimiter: char,
}

fn default_delimiter() -> char {
    ','
}

pub fn read_mapped_csv(path: &Path, mapping: &CsvMapping) -> Result<Vec<AnnotatedSample>> {
    let fixed = mapping
        .fixed_dimension
        .as_deref()
        .map(str::parse::<ValueDimension>)
        .transpose()?;
    if fixed.is_none() && mapping.dimension.is_none() {
        return Err(Error::InvalidInput(
            "mapping needs either `dimension` or `fixed_dimension`".into(),
        ));
    }
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(mapping.delimiter as u8)
        .from_path(path)
        .map_err(|e| Error::parse(path, 1, "<header>", e.to_string()))?;
    let headers = reader
        .headers()
        .map_err(|e| Error::parse(path, 1, "<header>", e.to_string()))?
        .clone();
    let column = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::parse(path, 1, name, "column not found in header"))
    };
    let id_col = mapping.id.as_deref().map(column).transpose()?;
    let text_col = column(&mapping.scenario)?;
    let dim_col = mapping.dimension.as_deref().map(column).transpose()?;
    let label_col = column(&mapping.label)?;
    let agree_col = mapping.agreement.as_deref().map(column).transpose()?;

    let mut out = Vec::new();
    for (n, row) in reader.records().enumerate() {
        let line = n + 2;
        let row = row.map_err(|e| Error::parse(path, line, "<row>", e.to_string()))?;
        let get = |i: usize, name: &str| -> Result<&str> {
            row.get(i)
                .ok_or_else(|| Error::parse(path, line, name, "missing column"))
        };
        let id = match id_col {
            Some(i) => get(i, "id")?.to_string(),
            None => (n + 1).to_string(),
        };
        let text = get(text_col, &mapping.scenario)?;
        let scenario =
            Scenario::new(id, text).map_err(|e| Error::parse(path, line, &mapping.scenario, e.to_string()))?;
        let dimension = match (dim_col, fixed) {
            (Some(i), _) => {
                let name = mapping.dimension.as_deref().unwrap_or("dimension");
                let raw = get(i, name)?;
                raw.trim_matches(|c| c == '[' || c == ']')
                    .parse()
                    .map_err(|e: Error| Error::parse(path, line, name, e.to_string()))?
            }
            (None, Some(d)) => d,
            (None, None) => unreachable!("checked above"),
        };
        let raw_label = get(label_col, &mapping.label)?.trim();
        let label = match raw_label.parse::<f64>() {
            Ok(v) if v == -1.0 || v == 0.0 || v == 1.0 => v as i8,
            Ok(v) => {
                return Err(Error::parse(path, line, &mapping.label, format!("{v} not in {{-1, 0, 1}}")))
            }
            Err(_) => raw_label
                .parse::<Vote>()
                .map_err(|e| Error::parse(path, line, &mapping.label, e.to_string()))?
                .utility(),
        };
        let agreement = match agree_col {
            Some(i) => {
                let name = mapping.agreement.as_deref().unwrap_or("agreement");
                get(i, name)?
                    .trim()
                    .parse()
                    .map_err(|e: std::num::ParseIntError| Error::parse(path, line, name, e.to_string()))?
            }
            None => 0,
        };
        out.push(AnnotatedSample {
            scenario,
            dimension,
            label,
            agreement,
        });
    }
    Ok(out)
}
