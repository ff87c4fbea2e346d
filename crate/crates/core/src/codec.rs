//! JSON encodings for states, channels and reports.
//!
//! Matrices are arrays of rows, each entry an `[re, im]` pair. Floats are
//! written in shortest round-trip form, so parse ∘ emit is the identity.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::channels::KrausChannel;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};
use crate::paperlab::{Observed, ReproductionReport};
use crate::states::{MultipartiteState, PartySystem};

type MatrixJson = Vec<Vec<[f64; 2]>>;

fn matrix_to_json(m: &ComplexMatrix) -> MatrixJson {
    m.row_vecs()
        .into_iter()
        .map(|row| row.into_iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

fn matrix_from_json(rows: &MatrixJson) -> Result<ComplexMatrix> {
    let data: Vec<Vec<C64>> = rows
        .iter()
        .map(|r| r.iter().map(|&[re, im]| C64::new(re, im)).collect())
        .collect();
    ComplexMatrix::from_rows(&data)
}

fn parse_err(e: serde_json::Error) -> Error {
    Error::Parse(e.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemJson {
    pub labels: Vec<String>,
    pub dims: Vec<usize>,
}

impl SystemJson {
    fn from_system(s: &PartySystem) -> Self {
        SystemJson {
            labels: s.labels().to_vec(),
            dims: s.dims().to_vec(),
        }
    }

    fn to_system(&self) -> Result<PartySystem> {
        PartySystem::new(self.labels.clone(), self.dims.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateJson {
    pub labels: Vec<String>,
    pub dims: Vec<usize>,
    pub matrix: MatrixJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelJson {
    pub name: String,
    pub input: SystemJson,
    pub output: SystemJson,
    pub kraus: Vec<MatrixJson>,
}

pub fn state_to_json(state: &MultipartiteState) -> String {
    let doc = StateJson {
        labels: state.system().labels().to_vec(),
        dims: state.system().dims().to_vec(),
        matrix: matrix_to_json(state.matrix()),
    };
    serde_json::to_string_pretty(&doc).expect("finite numbers serialize")
}

/// Parses and validates a density operator.
pub fn state_from_json(text: &str) -> Result<MultipartiteState> {
    let doc: StateJson = serde_json::from_str(text).map_err(parse_err)?;
    let system = PartySystem::new(doc.labels, doc.dims)?;
    let matrix = matrix_from_json(&doc.matrix)?;
    MultipartiteState::new(system, matrix)
}

pub fn channel_to_json(ch: &KrausChannel) -> String {
    let doc = ChannelJson {
        name: ch.name().to_string(),
        input: SystemJson::from_system(ch.input()),
        output: SystemJson::from_system(ch.output()),
        kraus: ch.kraus().iter().map(matrix_to_json).collect(),
    };
    serde_json::to_string_pretty(&doc).expect("finite numbers serialize")
}

/// Parses a channel, checking shapes but not completeness.
pub fn channel_from_json(text: &str) -> Result<KrausChannel> {
    let doc: ChannelJson = serde_json::from_str(text).map_err(parse_err)?;
    let kraus = doc.kraus.iter().map(matrix_from_json).collect::<Result<Vec<_>>>()?;
    KrausChannel::new(doc.name, doc.input.to_system()?, doc.output.to_system()?, kraus)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub id: String,
    pub status: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub negative_control: bool,
    #[serde(default)]
    pub numbers: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool_version: String,
    pub command: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub headline: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    pub entries: Vec<ReportEntry>,
    pub overall: String,
    pub exit_code: i32,
}

impl Report {
    pub fn new(command: Vec<String>) -> Self {
        Report {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command,
            tolerance: None,
            headline: None,
            warnings: Vec::new(),
            entries: Vec::new(),
            overall: "pass".into(),
            exit_code: 0,
        }
    }

    /// Sets `overall` and `exit_code` (0 pass, 1 fail).
    pub fn finish(&mut self, pass: bool) {
        self.overall = if pass { "pass" } else { "fail" }.into();
        self.exit_code = if pass { 0 } else { 1 };
    }

    pub fn push(&mut self, id: impl Into<String>, pass: bool, numbers: impl IntoIterator<Item = (String, f64)>) {
        self.entries.push(ReportEntry {
            id: id.into(),
            status: if pass { "pass" } else { "fail" }.into(),
            description: String::new(),
            negative_control: false,
            numbers: finite_only(numbers),
        });
    }
}

fn finite_only(numbers: impl IntoIterator<Item = (String, f64)>) -> BTreeMap<String, f64> {
    numbers.into_iter().filter(|(_, v)| v.is_finite()).collect()
}

/// Flattens reproduction entries into report entries; the computed value and
/// the check bounds land in `numbers`.
pub fn entries_from_reproduction(report: &ReproductionReport) -> Vec<ReportEntry> {
    use crate::paperlab::Expectation;
    report
        .entries
        .iter()
        .map(|e| {
            let mut numbers = e.numbers.clone();
            match e.computed {
                Observed::Number(x) => numbers.insert("computed".into(), x),
                Observed::Flag(b) => numbers.insert("computed".into(), f64::from(u8::from(b))),
            };
            match e.expected {
                Expectation::Within { target, tolerance } => {
                    numbers.insert("expected".into(), target);
                    numbers.insert("tolerance".into(), tolerance);
                }
                Expectation::AtMost(b) => {
                    numbers.insert("upper_bound".into(), b);
                }
                Expectation::AtLeast(b) => {
                    numbers.insert("lower_bound".into(), b);
                }
                Expectation::Is(b) => {
                    numbers.insert("expected".into(), f64::from(u8::from(b)));
                }
            }
            ReportEntry {
                id: e.id.clone(),
                status: e.status().into(),
                description: e.description.clone(),
                negative_control: e.negative_control,
                numbers: finite_only(numbers),
            }
        })
        .collect()
}

pub fn report_to_json(report: &Report) -> String {
    serde_json::to_string_pretty(report).expect("finite numbers serialize")
}

pub fn report_from_json(text: &str) -> Result<Report> {
    serde_json::from_str(text).map_err(parse_err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paperlab::{build_paper_channel, paper_choi, reproduce_all, PaperChannel};

    #[test]
    fn channel_round_trip_is_exact() {
        let ch = build_paper_channel(PaperChannel::E2);
        let back = channel_from_json(&channel_to_json(&ch)).unwrap();
        assert_eq!(back, ch);
    }

    #[test]
    fn state_round_trip_is_exact() {
        let rho = paper_choi(&build_paper_channel(PaperChannel::E1)).unwrap();
        assert_eq!(state_from_json(&state_to_json(&rho)).unwrap(), rho);
    }

    #[test]
    fn imaginary_parts_always_written() {
        let rho = MultipartiteState::maximally_mixed(PartySystem::qubits(["A"]).unwrap());
        let text = state_to_json(&rho);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["matrix"][0][0], serde_json::json!([0.5, 0.0]));
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(state_from_json("{\"labels\": [\"A\"]"), Err(Error::Parse(_))));
        let ragged = r#"{"labels":["A"],"dims":[2],"matrix":[[[1,0]],[[0,0],[0,0]]]}"#;
        assert!(state_from_json(ragged).is_err());
        let not_state = r#"{"labels":["A"],"dims":[2],"matrix":[[[1,0],[0,0]],[[0,0],[1,0]]]}"#;
        assert!(matches!(state_from_json(not_state), Err(Error::InvalidState(_))));
        let extra = r#"{"labels":["A"],"dims":[2],"matrix":[],"x":1}"#;
        assert!(matches!(state_from_json(extra), Err(Error::Parse(_))));
    }

    #[test]
    fn report_round_trip() {
        let mut r = Report::new(vec!["reproduce".into()]);
        r.entries = entries_from_reproduction(&reproduce_all());
        r.headline = Some("x".into());
        r.finish(true);
        assert_eq!(report_from_json(&report_to_json(&r)).unwrap(), r);
    }
}
