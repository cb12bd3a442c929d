//! JSON (and plain-text) views of models, bases, codes and gate reports.
//! Charges are written as twice-spin integers.

use std::fmt::Write;

use anyonforge_core::assembly::GateReport;
use anyonforge_core::code::CodeSpace;
use anyonforge_core::fusion::FusionBasis;
use anyonforge_core::{AnyonModel, CMatrix, Charge};

use crate::error::Result;
use crate::files::segments_json;
use crate::json::Json;

pub fn model_json(model: &AnyonModel) -> Result<Json> {
    let charges: Vec<Charge> = model.charges().collect();
    let mut qdims = Vec::new();
    for &c in &charges {
        qdims.push(Json::Float(model.qdim(c)?));
    }
    let mut fusion = Vec::new();
    for &a in &charges {
        for &b in charges.iter().filter(|&&b| b >= a) {
            fusion.push(Json::object([
                ("a", Json::uint(a.twice_spin())),
                ("b", Json::uint(b.twice_spin())),
                ("channels", Json::charges(&model.fuse(a, b)?)),
            ]));
        }
    }
    Ok(Json::object([
        ("k", Json::uint(model.level())),
        ("charges", Json::charges(&charges)),
        ("quantum_dimensions", Json::Array(qdims)),
        ("global_dimension", Json::Float(model.global_dimension_sq().sqrt())),
        ("fusion", Json::Array(fusion)),
    ]))
}

pub fn model_text(model: &AnyonModel) -> Result<String> {
    let mut out = String::new();
    let charges: Vec<Charge> = model.charges().collect();
    let names: Vec<String> = charges.iter().map(Charge::to_string).collect();
    let _ = writeln!(
        out,
        "SU(2)_{}: {} charges {}",
        model.level(),
        charges.len(),
        names.join(" ")
    );
    for &c in &charges {
        let _ = writeln!(out, "d({c}) = {:.12}", model.qdim(c)?);
    }
    let _ = writeln!(out, "D = {:.12}", model.global_dimension_sq().sqrt());
    for &a in &charges {
        for &b in charges.iter().filter(|&&b| b >= a) {
            let ch: Vec<String> = model.fuse(a, b)?.iter().map(Charge::to_string).collect();
            let _ = writeln!(out, "{a} x {b} = {}", ch.join(" + "));
        }
    }
    Ok(out)
}

pub fn basis_json(model: &AnyonModel, basis: &FusionBasis) -> Json {
    Json::object([
        ("k", Json::uint(model.level())),
        ("leaves", Json::charges(basis.leaves())),
        ("total", Json::uint(basis.total().twice_spin())),
        ("dim", Json::uint(basis.dim())),
        ("trees", Json::array(basis.trees(), |t| Json::charges(&t.internals))),
    ])
}

pub fn code_json(model: &AnyonModel, code: &CodeSpace) -> Json {
    let g = code.grouped();
    let tree = |i: usize| {
        let t = &g.trees()[i];
        Json::object([
            ("tree", Json::uint(i)),
            ("block_charges", Json::charges(&t.block_charges)),
            ("coarse_internals", Json::charges(&t.coarse_internals)),
        ])
    };
    let computational = Json::array(code.computational(), |(bits, i)| {
        let mut j = tree(*i);
        if let Json::Object(fields) = &mut j {
            fields.insert(
                0,
                (
                    "bits".into(),
                    Json::str(bits.iter().map(|b| char::from(b'0' + b)).collect::<String>()),
                ),
            );
        }
        j
    });
    let charges = code.charges();
    Json::object([
        ("k", Json::uint(model.level())),
        ("qubits", Json::uint(code.qubit_count())),
        ("a", Json::uint(charges.a.twice_spin())),
        ("b", Json::uint(charges.b.twice_spin())),
        ("leaves", Json::charges(code.basis().leaves())),
        (
            "grouping",
            Json::array(code.grouping().blocks(), |b| Json::array(b, Json::uint)),
        ),
        ("dim", Json::uint(code.dim())),
        ("computational", computational),
        ("non_computational", Json::array(code.non_computational(), |&i| tree(i))),
    ])
}

/// Matrix of a braid between two fine bases.
pub fn operator_json(word: &str, source: &FusionBasis, target: &FusionBasis, m: &CMatrix) -> Json {
    Json::object([
        ("word", Json::str(word)),
        ("source_leaves", Json::charges(source.leaves())),
        ("target_leaves", Json::charges(target.leaves())),
        (
            "target_trees",
            Json::array(target.trees(), |t| Json::charges(&t.internals)),
        ),
        ("matrix", Json::matrix(m)),
    ])
}

pub fn gate_report_json(k: u32, r: &GateReport, phase_slack: f64) -> Json {
    Json::object([
        ("gate", Json::str(r.gate.clone())),
        ("k", Json::uint(k)),
        ("leaves", Json::charges(&r.leaves)),
        ("distance_to_target", Json::Float(r.distance_to_target)),
        ("bound", Json::Float(r.bound)),
        ("within_bound", Json::Bool(r.within_bound(phase_slack))),
        ("leakage", Json::Float(r.leakage)),
        ("trivial_phase_deviation", Json::Float(r.trivial_phase_deviation)),
        ("phases_cancel", Json::Bool(r.phases_cancel(phase_slack))),
        ("off_diagonal", Json::Float(r.off_diagonal)),
        ("braid_length_total", Json::uint(r.braid_length_total)),
        (
            "component_budget",
            Json::array(&r.component_budget, |(n, d)| {
                Json::object([("name", Json::str(n.clone())), ("distance", Json::Float(*d))])
            }),
        ),
        ("segments", segments_json(&r.segments)),
        (
            "diagonal_phases",
            Json::object(r.diagonal_phases.iter().map(|(k, z)| (k.clone(), Json::complex(*z)))),
        ),
        ("logical_matrix", Json::matrix(&r.logical_matrix)),
        ("target_matrix", Json::matrix(&r.target_matrix)),
    ])
}

pub fn gate_report_text(r: &GateReport, phase_slack: f64) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "gate {}", r.gate);
    let _ = writeln!(
        out,
        "distance {:.6e} (bound {:.6e}, {})",
        r.distance_to_target,
        r.bound,
        if r.within_bound(phase_slack) { "ok" } else { "exceeded" }
    );
    let _ = writeln!(out, "leakage {:.6e}", r.leakage);
    let _ = writeln!(
        out,
        "trivial-sector phase deviation {:.6e} ({})",
        r.trivial_phase_deviation,
        if r.phases_cancel(phase_slack) {
            "cancelled"
        } else {
            "not cancelled"
        }
    );
    let _ = writeln!(out, "exchanges {}", r.braid_length_total);
    for (label, z) in &r.diagonal_phases {
        let _ = writeln!(out, "  |{label}> {:+.6} {:+.6}i", z.re, z.im);
    }
    out
}
