//! The braid file: a word together with the strands, blocks and target it
//! was found for.
//!
//! ```json
//! { "k": 3, "leaves": [1, 1, 1, 1, 1, 1], "grouping": [[0], [1, 2], [3, 4], [5]],
//!   "word": [[1, 1], [2, -1]], "target": "P", "distance": 1.0e-1, ... }
//! ```
//!
//! Positions in `word` are 1-based positions among the blocks of `grouping`.
//! Fields after `distance` are extras; only `leakage`, `scheme`, `unitary`
//! and `segments` are read back.

use std::collections::BTreeMap;
use std::path::Path;

use anyonforge_core::assembly::{GateReport, Segment};
use anyonforge_core::braid::{BraidWord, Letter};
use anyonforge_core::code::SingleQubitScheme;
use anyonforge_core::grouping::Grouping;
use anyonforge_core::search::{CurvePoint, SearchConfig, SynthesisResult};
use anyonforge_core::target::{
    make_target_b1, make_target_b3, make_target_e, make_target_p, make_target_unitary, Objective, SynthesisTarget,
};
use anyonforge_core::{AnyonModel, CMatrix, Charge, C64};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::json::{self, Json};

#[derive(Debug, Clone, PartialEq)]
pub struct BraidFile {
    pub k: u32,
    pub leaves: Vec<Charge>,
    pub grouping: Vec<Vec<usize>>,
    pub word: BraidWord,
    pub target: String,
    pub distance: f64,
    pub leakage: Option<f64>,
    pub converged: Option<bool>,
    pub block_names: Vec<String>,
    pub scheme: Option<SingleQubitScheme>,
    /// The 2x2 matrix of a single-qubit target.
    pub unitary: Option<CMatrix>,
    pub sector_phases: BTreeMap<String, C64>,
    pub exchange_counts: Vec<(String, String, i64, u64)>,
    pub segments: Vec<Segment>,
    pub search: Option<SearchConfig>,
    pub curve: Vec<CurvePoint>,
}

pub fn scheme_name(s: SingleQubitScheme) -> &'static str {
    match s {
        SingleQubitScheme::FourAnyon => "four-anyon",
        SingleQubitScheme::ThreeAnyon => "three-anyon",
    }
}

pub fn parse_scheme(s: &str) -> Result<SingleQubitScheme> {
    match s {
        "four-anyon" | "four" | "4" => Ok(SingleQubitScheme::FourAnyon),
        "three-anyon" | "three" | "3" => Ok(SingleQubitScheme::ThreeAnyon),
        _ => Err(Error::Format(format!("unknown single-qubit scheme {s:?}"))),
    }
}

/// Parses `s1 s2' s1` style words; `e` or an empty string is the empty word.
pub fn parse_word(strands: usize, text: &str) -> Result<BraidWord> {
    let mut letters = Vec::new();
    for tok in text
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty() && *t != "e")
    {
        let (body, exponent) = match tok.strip_suffix('\'') {
            Some(b) => (b, -1),
            None => (tok, 1),
        };
        let position = body
            .strip_prefix('s')
            .and_then(|p| p.parse::<usize>().ok())
            .ok_or_else(|| Error::Format(format!("bad braid letter {tok:?}")))?;
        letters.push(Letter::new(position, exponent));
    }
    Ok(BraidWord::new(strands, letters)?)
}

fn word_json(w: &BraidWord) -> Json {
    Json::array(w.letters(), |l| {
        Json::Array(vec![Json::uint(l.position), Json::Int(i64::from(l.exponent))])
    })
}

fn search_json(c: &SearchConfig) -> Json {
    Json::object([
        ("max_length", Json::uint(c.max_length)),
        ("tol", Json::Float(c.tolerance)),
        ("phase_tol", Json::Float(c.phase_tolerance)),
        ("weave_only", Json::Bool(c.weave_only)),
        ("dedup", Json::Bool(c.dedup)),
    ])
}

pub fn curve_point_json(p: &CurvePoint) -> Json {
    Json::object([
        ("length", Json::uint(p.length)),
        ("best_distance", Json::Float(p.best_distance)),
        ("nodes_explored", Json::uint(p.nodes_explored)),
    ])
}

pub fn segments_json(segments: &[Segment]) -> Json {
    Json::array(segments, |s| {
        Json::object([
            ("name", Json::str(s.name.clone())),
            ("start", Json::uint(s.start)),
            ("len", Json::uint(s.len)),
        ])
    })
}

impl BraidFile {
    pub fn from_result(target: &SynthesisTarget, result: &SynthesisResult, search: Option<&SearchConfig>) -> Self {
        let unitary = match &target.objective {
            Objective::Unitary { matrix, .. } => Some(matrix.clone()),
            Objective::Sectors(_) => None,
        };
        Self {
            k: target.model.level(),
            leaves: target.basis.leaves().to_vec(),
            grouping: target.grouping.blocks(),
            word: result.braid.clone(),
            target: result.target.clone(),
            distance: result.distance,
            leakage: Some(result.leakage),
            converged: Some(result.converged),
            block_names: target.block_names.clone(),
            scheme: target.code.as_ref().and_then(|c| c.scheme()),
            unitary,
            sector_phases: result.sector_phases.clone(),
            exchange_counts: result
                .exchange_counts
                .iter()
                .map(|((x, y), c)| (x.clone(), y.clone(), c.signed, c.total))
                .collect(),
            segments: Vec::new(),
            search: search.copied(),
            curve: result.curve.clone(),
        }
    }

    /// The assembled word of a gate, on single strands.
    pub fn from_gate(k: u32, report: &GateReport) -> Self {
        Self {
            k,
            leaves: report.leaves.clone(),
            grouping: Grouping::singletons(report.leaves.len()).blocks(),
            word: report.word.clone(),
            target: report.gate.clone(),
            distance: report.distance_to_target,
            leakage: Some(report.leakage),
            converged: None,
            block_names: Vec::new(),
            scheme: None,
            unitary: None,
            sector_phases: report.diagonal_phases.clone(),
            exchange_counts: Vec::new(),
            segments: report.segments.clone(),
            search: None,
            curve: Vec::new(),
        }
    }

    pub fn to_json(&self) -> Json {
        let mut j = Json::object([
            ("k", Json::uint(self.k)),
            ("leaves", Json::charges(&self.leaves)),
            (
                "grouping",
                Json::array(&self.grouping, |b| Json::array(b, |&i| Json::uint(i))),
            ),
            ("word", word_json(&self.word)),
            ("target", Json::str(self.target.clone())),
            ("distance", Json::Float(self.distance)),
        ]);
        if let Some(l) = self.leakage {
            j.push("leakage", Json::Float(l));
        }
        if let Some(c) = self.converged {
            j.push("converged", Json::Bool(c));
        }
        j.push("length", Json::uint(self.word.len()));
        j.push("text", Json::str(self.word.to_string()));
        if !self.block_names.is_empty() {
            j.push("block_names", Json::array(&self.block_names, |n| Json::str(n.clone())));
        }
        if let Some(s) = self.scheme {
            j.push("scheme", Json::str(scheme_name(s)));
        }
        if let Some(u) = &self.unitary {
            j.push("unitary", Json::matrix(u));
        }
        if !self.sector_phases.is_empty() {
            j.push(
                "sector_phases",
                Json::object(self.sector_phases.iter().map(|(k, z)| (k.clone(), Json::complex(*z)))),
            );
        }
        if !self.exchange_counts.is_empty() {
            j.push(
                "exchange_counts",
                Json::array(&self.exchange_counts, |(x, y, signed, total)| {
                    Json::object([
                        ("blocks", Json::Array(vec![Json::str(x.clone()), Json::str(y.clone())])),
                        ("signed", Json::Int(*signed)),
                        ("total", Json::uint(*total)),
                    ])
                }),
            );
        }
        if !self.segments.is_empty() {
            j.push("segments", segments_json(&self.segments));
        }
        if let Some(c) = &self.search {
            j.push("search", search_json(c));
        }
        if !self.curve.is_empty() {
            j.push("curve", Json::array(&self.curve, curve_point_json));
        }
        j
    }

    pub fn parse(text: &str) -> Result<Self> {
        let v = json::parse(text)?;
        let k = u32::try_from(json::as_u64(json::field(&v, "k")?, "k")?)
            .map_err(|_| Error::Format("k out of range".into()))?;
        let leaves = json::as_charges(json::field(&v, "leaves")?, "leaves")?;
        let grouping = json::as_array(json::field(&v, "grouping")?, "grouping")?
            .iter()
            .map(|b| {
                json::as_array(b, "grouping block")?
                    .iter()
                    .map(|i| Ok(json::as_u64(i, "leaf index")? as usize))
                    .collect::<Result<Vec<usize>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let mut letters = Vec::new();
        for l in json::as_array(json::field(&v, "word")?, "word")? {
            match json::as_array(l, "letter")? {
                [p, e] => {
                    let p = json::as_u64(p, "position")? as usize;
                    let e = json::as_i64(e, "exponent")?;
                    if e != 1 && e != -1 {
                        return Err(Error::Format(format!("exponent {e} is not +1 or -1")));
                    }
                    letters.push(Letter::new(p, e as i8));
                }
                _ => return Err(Error::Format("letters are [position, exponent] pairs".into())),
            }
        }
        let word = BraidWord::new(grouping.len(), letters)?;
        let opt = |key: &str| v.get(key).filter(|x| !x.is_null());
        let segments = match opt("segments") {
            None => Vec::new(),
            Some(s) => json::as_array(s, "segments")?
                .iter()
                .map(|s| {
                    Ok(Segment {
                        name: json::as_str(json::field(s, "name")?, "segment name")?.to_string(),
                        start: json::as_u64(json::field(s, "start")?, "segment start")? as usize,
                        len: json::as_u64(json::field(s, "len")?, "segment length")? as usize,
                    })
                })
                .collect::<Result<_>>()?,
        };
        Ok(Self {
            k,
            leaves,
            grouping,
            word,
            target: json::as_str(json::field(&v, "target")?, "target")?.to_string(),
            distance: json::as_f64(json::field(&v, "distance")?, "distance")?,
            leakage: opt("leakage").map(|x| json::as_f64(x, "leakage")).transpose()?,
            converged: opt("converged").and_then(Value::as_bool),
            block_names: Vec::new(),
            scheme: opt("scheme")
                .map(|s| json::as_str(s, "scheme").and_then(parse_scheme))
                .transpose()?,
            unitary: opt("unitary").map(|u| json::as_matrix(u, "unitary")).transpose()?,
            sector_phases: BTreeMap::new(),
            exchange_counts: Vec::new(),
            segments,
            search: None,
            curve: Vec::new(),
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
    }

    /// Rebuilds the synthesis target this file was produced for and checks
    /// that the stored strands and blocks agree with it.
    pub fn target(&self, model: &AnyonModel) -> Result<SynthesisTarget> {
        let t = match self.target.as_str() {
            "P" => make_target_p(model)?,
            "B1" => make_target_b1(model)?,
            "B3" => make_target_b3(model)?,
            "E" => make_target_e(model)?,
            id => match &self.unitary {
                Some(u) => make_target_unitary(
                    model,
                    id,
                    self.scheme.unwrap_or(SingleQubitScheme::ThreeAnyon),
                    u.clone(),
                )?,
                None => return Err(Error::Format(format!("unknown target {id:?}"))),
            },
        };
        if t.basis.leaves() != self.leaves.as_slice() || t.grouping.blocks() != self.grouping {
            return Err(Error::Format(format!(
                "leaves or grouping do not match target {} at k = {}",
                t.id, self.k
            )));
        }
        Ok(t)
    }
}

/// CSV curve: `length,best_distance,nodes_explored,seconds`.
pub fn curve_csv(curve: &[CurvePoint], seconds: &[f64]) -> String {
    let mut out = String::from("length,best_distance,nodes_explored,seconds\n");
    for (i, p) in curve.iter().enumerate() {
        let s = seconds.get(i).map_or(String::new(), |s| format!("{s:.6}"));
        out.push_str(&format!(
            "{},{},{},{}\n",
            p.length,
            if p.best_distance.is_finite() {
                json::format_f64(p.best_distance)
            } else {
                "inf".into()
            },
            p.nodes_explored,
            s
        ));
    }
    out
}
