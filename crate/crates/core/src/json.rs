//! JSON documents for frames, models, filtrations and verdicts.
//!
//! Output is canonical: points, pairs and valuation lists are sorted, and
//! `D` is omitted for frames without a second relation. Input keeps the
//! point order of the file.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::decide::Verdict;
use crate::filtration::FiltrationResult;
use crate::formula::FormulaSet;
use crate::kripke::{Frame, Model, SecondRelation};
use crate::morphism::PointMap;
use crate::{Error, PointSet, Result};

pub const INEQUALITY: &str = "inequality";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DiffDoc {
    /// Must be `"inequality"`.
    Marker(String),
    Pairs(Vec<(String, String)>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameDoc {
    pub points: Vec<String>,
    #[serde(rename = "R", default)]
    pub r: Vec<(String, String)>,
    #[serde(rename = "D", default, skip_serializing_if = "Option::is_none")]
    pub d: Option<DiffDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelDoc {
    #[serde(flatten)]
    pub frame: FrameDoc,
    #[serde(default)]
    pub valuation: BTreeMap<String, Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiltrationDoc {
    #[serde(flatten)]
    pub model: ModelDoc,
    pub classes: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictDoc {
    pub verdict: String,
    pub searched_to: usize,
    /// Whether the verdict is conclusive: always for a refutation, and for a
    /// theorem when the search reached the finite model property bound.
    pub exhaustive: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<FrameDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub valuation: Option<BTreeMap<String, Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sub_count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node_count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Any of the four document kinds, told apart by their keys.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WorkbenchDocument {
    Frame(FrameDoc),
    Model(ModelDoc),
    Filtration(FiltrationDoc),
    Verdict(VerdictDoc),
}

impl WorkbenchDocument {
    pub fn kind(&self) -> &'static str {
        match self {
            WorkbenchDocument::Frame(_) => "frame",
            WorkbenchDocument::Model(_) => "model",
            WorkbenchDocument::Filtration(_) => "filtration",
            WorkbenchDocument::Verdict(_) => "verdict",
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text)?;
        let has = |k: &str| value.get(k).is_some();
        Ok(if has("verdict") {
            WorkbenchDocument::Verdict(serde_json::from_value(value)?)
        } else if has("classes") {
            WorkbenchDocument::Filtration(serde_json::from_value(value)?)
        } else if has("valuation") {
            WorkbenchDocument::Model(serde_json::from_value(value)?)
        } else {
            WorkbenchDocument::Frame(serde_json::from_value(value)?)
        })
    }

    pub fn to_json(&self) -> String {
        let out = match self {
            WorkbenchDocument::Frame(d) => serde_json::to_string_pretty(d),
            WorkbenchDocument::Model(d) => serde_json::to_string_pretty(d),
            WorkbenchDocument::Filtration(d) => serde_json::to_string_pretty(d),
            WorkbenchDocument::Verdict(d) => serde_json::to_string_pretty(d),
        };
        out.expect("documents serialise")
    }
}

fn sorted_pairs(frame: &Frame, pairs: Vec<(usize, usize)>) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = pairs
        .into_iter()
        .map(|(i, j)| (frame.point(i).to_string(), frame.point(j).to_string()))
        .collect();
    out.sort();
    out
}

fn ids(frame: &Frame, set: &PointSet) -> Vec<String> {
    let mut out: Vec<String> = set.iter().map(|i| frame.point(i).to_string()).collect();
    out.sort();
    out
}

pub fn frame_to_doc(frame: &Frame) -> FrameDoc {
    let mut points = frame.points().to_vec();
    points.sort();
    let d = frame.d().map(|d| match d {
        SecondRelation::Inequality => DiffDoc::Marker(INEQUALITY.into()),
        SecondRelation::Explicit(_) => DiffDoc::Pairs(sorted_pairs(frame, frame.d_pairs())),
    });
    FrameDoc {
        points,
        r: sorted_pairs(frame, frame.r_pairs()),
        d,
    }
}

pub fn frame_from_doc(doc: &FrameDoc) -> Result<Frame> {
    let mut frame = Frame::new(doc.points.iter().cloned())?;
    for (a, b) in &doc.r {
        frame.add_edge(a, b)?;
    }
    match &doc.d {
        None => {}
        Some(DiffDoc::Marker(m)) if m == INEQUALITY => frame.set_inequality(),
        Some(DiffDoc::Marker(m)) => {
            return Err(Error::InvalidFrame(format!(
                "`D` must be \"{INEQUALITY}\" or a list of pairs, got \"{m}\""
            )))
        }
        Some(DiffDoc::Pairs(pairs)) => {
            frame.set_explicit_diff();
            for (a, b) in pairs {
                frame.add_diff_edge(a, b)?;
            }
        }
    }
    Ok(frame)
}

pub fn var_name(v: u32) -> String {
    format!("p{v}")
}

pub fn parse_var_name(name: &str) -> Result<u32> {
    name.strip_prefix('p')
        .filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
        .and_then(|d| d.parse().ok())
        .ok_or_else(|| Error::InvalidFrame(format!("bad variable name `{name}`")))
}

pub fn valuation_to_doc(
    frame: &Frame,
    valuation: &BTreeMap<u32, PointSet>,
) -> BTreeMap<String, Vec<String>> {
    valuation
        .iter()
        .map(|(&v, s)| (var_name(v), ids(frame, s)))
        .collect()
}

pub fn model_to_doc(m: &Model) -> ModelDoc {
    ModelDoc {
        frame: frame_to_doc(&m.frame),
        valuation: valuation_to_doc(&m.frame, m.valuation()),
    }
}

pub fn model_from_doc(doc: &ModelDoc) -> Result<Model> {
    let mut m = Model::new(frame_from_doc(&doc.frame)?);
    for (name, points) in &doc.valuation {
        m.set_ids(parse_var_name(name)?, points)?;
    }
    Ok(m)
}

pub fn filtration_to_doc(source: &Model, f: &FiltrationResult) -> FiltrationDoc {
    FiltrationDoc {
        model: model_to_doc(&f.quotient),
        classes: f.classes(source),
    }
}

/// Rebuilds a candidate filtration of `source` from a document, attaching
/// the given `gamma` and `psi`.
pub fn filtration_from_doc(
    source: &Model,
    doc: &FiltrationDoc,
    gamma: FormulaSet,
    psi: FormulaSet,
) -> Result<FiltrationResult> {
    let quotient = model_from_doc(&doc.model)?;
    let class_map = source
        .frame
        .points()
        .iter()
        .map(|p| {
            let class = doc
                .classes
                .get(p)
                .ok_or_else(|| Error::InvalidFrame(format!("point `{p}` has no class")))?;
            quotient.frame.index_of(class)
        })
        .collect::<Result<Vec<usize>>>()?;
    Ok(FiltrationResult {
        quotient,
        class_map,
        gamma,
        psi,
    })
}

pub fn verdict_to_doc(v: &Verdict) -> VerdictDoc {
    let mut doc = VerdictDoc {
        verdict: v.name().to_string(),
        searched_to: v.searched_to(),
        exhaustive: false,
        frame: None,
        valuation: None,
        point: None,
        sub_count: None,
        node_count: None,
        reason: None,
        note: None,
    };
    match v {
        Verdict::Refuted {
            frame,
            valuation,
            point,
            ..
        } => {
            doc.exhaustive = true;
            doc.frame = Some(frame_to_doc(frame));
            doc.valuation = Some(valuation_to_doc(frame, valuation));
            doc.point = Some(frame.point(*point).to_string());
        }
        Verdict::TheoremWithinBound {
            exhaustive,
            sub_count,
            node_count,
            note,
            ..
        } => {
            doc.exhaustive = *exhaustive;
            doc.sub_count = Some(*sub_count);
            doc.node_count = Some(*node_count);
            doc.note = note.clone();
        }
        Verdict::Unknown { reason, .. } => doc.reason = Some(reason.clone()),
    }
    doc
}

pub fn point_map_to_json(map: &PointMap) -> Value {
    serde_json::to_value(&map.mapping).expect("string map")
}

pub fn point_map_from_json(text: &str) -> Result<PointMap> {
    Ok(PointMap {
        mapping: serde_json::from_str(text)?,
    })
}

pub fn read_frame(text: &str) -> Result<Frame> {
    frame_from_doc(&serde_json::from_str(text)?)
}

pub fn read_model(text: &str) -> Result<Model> {
    model_from_doc(&serde_json::from_str(text)?)
}

pub fn write_frame(frame: &Frame) -> String {
    WorkbenchDocument::Frame(frame_to_doc(frame)).to_json()
}

pub fn write_model(m: &Model) -> String {
    WorkbenchDocument::Model(model_to_doc(m)).to_json()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_documents() {
        let text = r#"{"points": ["b", "a"], "R": [["b", "a"], ["a", "b"]], "D": "inequality"}"#;
        let f = read_frame(text).unwrap();
        assert_eq!(f.points(), &["b".to_string(), "a".to_string()]);
        assert!(f.has_inequality());
        let doc = frame_to_doc(&f);
        assert_eq!(doc.points, vec!["a", "b"]);
        assert_eq!(
            doc.r,
            vec![("a".into(), "b".into()), ("b".into(), "a".into())]
        );

        let plain = read_frame(r#"{"points": ["a"], "R": []}"#).unwrap();
        assert!(plain.d().is_none());
        assert!(!write_frame(&plain).contains("\"D\""));

        let explicit = read_frame(r#"{"points": ["a","b"], "R": [], "D": [["a","a"]]}"#).unwrap();
        assert_eq!(explicit.d_pairs(), vec![(0, 0)]);
        assert!(write_frame(&explicit).contains("\"D\": [\n    [\n      \"a\""));
    }

    #[test]
    fn bad_documents() {
        assert!(matches!(
            read_frame(r#"{"points": ["a"], "R": [], "D": "equality"}"#),
            Err(Error::InvalidFrame(_))
        ));
        assert!(matches!(
            read_frame(r#"{"points": ["a"], "R": [["a","z"]]}"#),
            Err(Error::UnknownPoint(_))
        ));
        assert!(matches!(
            read_frame(r#"{"points": []}"#),
            Err(Error::InvalidFrame(_))
        ));
        assert!(matches!(read_frame("[1, 2"), Err(Error::Json(_))));
        assert!(read_model(r#"{"points": ["a"], "valuation": {"q": ["a"]}}"#).is_err());
        assert!(read_model(r#"{"points": ["a"], "valuation": {"p0": ["b"]}}"#).is_err());
    }

    #[test]
    fn model_round_trip() {
        let text =
            r#"{"points": ["a", "b"], "R": [["a", "b"]], "valuation": {"p0": ["b"], "p3": []}}"#;
        let m = read_model(text).unwrap();
        assert_eq!(m.value(0), PointSet::from_indices(2, [1]));
        let doc = WorkbenchDocument::Model(model_to_doc(&m));
        assert_eq!(WorkbenchDocument::from_json(&doc.to_json()).unwrap(), doc);
    }

    #[test]
    fn kinds_are_detected() {
        let cases = [
            (r#"{"points": ["a"]}"#, "frame"),
            (r#"{"points": ["a"], "valuation": {}}"#, "model"),
            (
                r#"{"points": ["a"], "valuation": {}, "classes": {"a": "a"}}"#,
                "filtration",
            ),
            (
                r#"{"verdict": "unknown", "searched_to": 0, "exhaustive": false}"#,
                "verdict",
            ),
        ];
        for (text, kind) in cases {
            assert_eq!(WorkbenchDocument::from_json(text).unwrap().kind(), kind);
        }
    }

    #[test]
    fn verdict_documents() {
        let mut fr = Frame::with_size(2).unwrap();
        fr.add_edge_idx(1, 1);
        fr.set_inequality();
        let v = Verdict::Refuted {
            frame: fr,
            valuation: [(0, PointSet::from_indices(2, [1]))].into_iter().collect(),
            point: 0,
            size: 2,
        };
        let doc = verdict_to_doc(&v);
        assert_eq!(doc.verdict, "refuted");
        assert_eq!(doc.point.as_deref(), Some("x0"));
        assert_eq!(doc.valuation.unwrap()["p0"], vec!["x1"]);

        let v = Verdict::Unknown {
            searched_to: 3,
            reason: "cap".into(),
        };
        let text = WorkbenchDocument::Verdict(verdict_to_doc(&v)).to_json();
        assert!(!text.contains("frame"));
        assert!(text.contains("\"searched_to\": 3"));
    }
}
