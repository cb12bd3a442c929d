//! Logical gates built from synthesized braids.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::braid::{evaluate, expand, BraidWord};
use crate::code::{leakage, multi_qubit_code, CodeSpace, QubitCharges};
use crate::error::{Error, Result};
use crate::fusion::FusionBasis;
use crate::grouping::Grouping;
use crate::linalg::{phase_aligned_residual, CMatrix, C64, ONE, ZERO};
use crate::model::{AnyonModel, Charge};
use crate::search::SynthesisResult;
use crate::target::make_target_e;

/// A named stretch of the assembled elementary word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub name: String,
    pub start: usize,
    pub len: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateReport {
    pub gate: String,
    /// Restriction of the braid to the logical space (outputs† U inputs).
    pub logical_matrix: CMatrix,
    pub target_matrix: CMatrix,
    pub distance_to_target: f64,
    pub leakage: f64,
    pub component_budget: Vec<(String, f64)>,
    /// Sum of the component distances.
    pub bound: f64,
    /// Elementary exchanges performed, summed over segments.
    pub braid_length_total: usize,
    pub leaves: Vec<Charge>,
    pub segments: Vec<Segment>,
    /// Segment words back to back, as elementary exchanges, freely reduced.
    /// Segment offsets count the unreduced exchanges.
    pub word: BraidWord,
    /// Largest `|L_jj - T_jj|` over inputs whose target phase is 1.
    pub trivial_phase_deviation: f64,
    /// Operator norm of the off-diagonal part of the logical matrix.
    pub off_diagonal: f64,
    pub diagonal_phases: BTreeMap<String, C64>,
}

impl GateReport {
    /// `distance_to_target <= bound` up to `slack`.
    pub fn within_bound(&self, slack: f64) -> bool {
        self.distance_to_target <= self.bound + slack
    }

    /// Whether every trivial sector kept phase 1 within the composed bound.
    pub fn phases_cancel(&self, slack: f64) -> bool {
        self.trivial_phase_deviation <= self.bound + slack
    }
}

/// `min_φ ‖U G_in - e^{iφ} G_out T‖_F / sqrt(2m)`, which is
/// `sqrt(1 - |tr(T† G_out† U G_in)| / m)` for unitary `U`.
pub fn gate_distance(u: &CMatrix, inputs: &CMatrix, outputs: &CMatrix, target: &CMatrix) -> f64 {
    let images = u * inputs;
    let reference = outputs * target;
    phase_aligned_residual(&images, &reference) / libm::sqrt(2.0 * inputs.cols().max(1) as f64)
}

fn diagonal_phase_target(n: usize, phase: C64) -> CMatrix {
    let dim = 1 << n;
    let mut d = vec![ONE; dim];
    d[dim - 1] = phase;
    CMatrix::diagonal(&d)
}

fn bits_label(bits: &[u8]) -> String {
    bits.iter().map(|b| char::from(b'0' + b)).collect()
}

fn off_diagonal_norm(l: &CMatrix) -> f64 {
    let mut o = l.clone();
    for i in 0..o.rows().min(o.cols()) {
        o[(i, i)] = ZERO;
    }
    o.operator_norm()
}

/// A component as block-level word on the two-qubit layout `[a1][q1][q2][a6]`.
fn two_qubit_component<'r>(r: &'r SynthesisResult, id: &str) -> Result<&'r BraidWord> {
    if r.target != id {
        return Err(Error::Assembly(format!("expected a {id} braid, got {}", r.target)));
    }
    let w = &r.braid;
    if w.strand_count() != 4 || w.letters().iter().any(|l| l.position > 2) {
        return Err(Error::Assembly(format!(
            "{id} must only exchange the blocks a1, q1, q2 of the two-qubit layout"
        )));
    }
    if w.permutation() != [0, 1, 2, 3] {
        return Err(Error::Assembly(format!(
            "{id} does not return the blocks to their places"
        )));
    }
    Ok(w)
}

struct Run {
    matrix: CMatrix,
    segments: Vec<Segment>,
    word: BraidWord,
    performed: usize,
}

fn run_segments(model: &AnyonModel, basis: &FusionBasis, parts: &[(String, BraidWord, Grouping)]) -> Result<Run> {
    let strands = basis.strand_count();
    let singletons = Grouping::singletons(strands);
    let mut matrix = CMatrix::identity(basis.dim());
    let mut segments = Vec::new();
    let mut word = BraidWord::empty(strands);
    let mut performed = 0;
    for (name, w, grouping) in parts {
        let fine = expand(w, grouping)?;
        let eval = evaluate(model, basis, &singletons, &fine)?;
        if eval.op.target.leaves() != basis.leaves() {
            return Err(Error::Assembly(format!(
                "segment {name} does not restore the leaf order"
            )));
        }
        matrix = &eval.op.matrix * &matrix;
        segments.push(Segment {
            name: name.clone(),
            start: performed,
            len: fine.len(),
        });
        performed += fine.len();
        word = word.concat(&fine)?;
    }
    Ok(Run {
        matrix,
        segments,
        word,
        performed,
    })
}

fn report(
    gate: &str,
    code: &CodeSpace,
    run: Run,
    target: CMatrix,
    component_budget: Vec<(String, f64)>,
) -> Result<GateReport> {
    let g = code.computational_isometry();
    let logical = code.logical(&run.matrix)?;
    let distance_to_target = gate_distance(&run.matrix, &g, &g, &target);
    let leak = leakage(&run.matrix, code)?;
    let mut trivial: f64 = 0.0;
    let mut diagonal_phases = BTreeMap::new();
    for (j, (bits, _)) in code.computational().iter().enumerate() {
        diagonal_phases.insert(bits_label(bits), logical[(j, j)]);
        if target[(j, j)] == ONE {
            trivial = trivial.max((logical[(j, j)] - ONE).norm());
        }
    }
    let bound = component_budget.iter().map(|(_, d)| d).sum();
    Ok(GateReport {
        gate: gate.to_string(),
        off_diagonal: off_diagonal_norm(&logical),
        logical_matrix: logical,
        target_matrix: target,
        distance_to_target,
        leakage: leak.leakage_norm,
        component_budget,
        bound,
        braid_length_total: run.performed,
        leaves: code.basis().leaves().to_vec(),
        segments: run.segments,
        word: run.word,
        trivial_phase_deviation: trivial,
        diagonal_phases,
    })
}

/// Controlled-Z from a phase-gate braid P on the six-anyon register.
pub fn assemble_controlled_phase(model: &AnyonModel, p: &SynthesisResult) -> Result<GateReport> {
    let w = two_qubit_component(p, "P")?;
    let code = multi_qubit_code(model, 2, QubitCharges::for_level(model.level()))?;
    let grouping = code.grouping().clone();
    let run = run_segments(model, code.basis(), &[("P".into(), w.clone(), grouping)])?;
    report(
        "cz",
        &code,
        run,
        diagonal_phase_target(2, -ONE),
        vec![("P".into(), p.distance)],
    )
}

/// Controlled-controlled-Z on the eight-anyon register from B1, P and B3:
/// `B1; P'; B1^-1; B3; P'^-1; B3^-1`, where P' is P acting on the composite
/// `[q1 q2]` and `q3`. With `truncated` only the first three braids run.
pub fn assemble_ccz(
    model: &AnyonModel,
    b1: &SynthesisResult,
    p: &SynthesisResult,
    b3: &SynthesisResult,
    truncated: bool,
) -> Result<GateReport> {
    let wb1 = two_qubit_component(b1, "B1")?;
    let wp = two_qubit_component(p, "P")?;
    let wb3 = two_qubit_component(b3, "B3")?;
    let code = multi_qubit_code(model, 3, QubitCharges::for_level(model.level()))?;
    let fine_blocks = Grouping::from_sizes(&[1, 2, 2, 2, 1])?;
    let joined = Grouping::from_sizes(&[1, 4, 2, 1])?;
    let on_five = |w: &BraidWord| BraidWord::new(5, w.letters().iter().copied());
    let mut parts = vec![
        ("B1".to_string(), on_five(wb1)?, fine_blocks.clone()),
        ("P".to_string(), wp.clone(), joined.clone()),
        ("B1^-1".to_string(), on_five(&wb1.inverse())?, fine_blocks.clone()),
    ];
    let mut budget = vec![
        ("B1".to_string(), b1.distance),
        ("P".to_string(), p.distance),
        ("B1^-1".to_string(), b1.distance),
    ];
    if !truncated {
        parts.extend([
            ("B3".to_string(), on_five(wb3)?, fine_blocks.clone()),
            ("P^-1".to_string(), wp.inverse(), joined),
            ("B3^-1".to_string(), on_five(&wb3.inverse())?, fine_blocks),
        ]);
        budget.extend([
            ("B3".to_string(), b3.distance),
            ("P^-1".to_string(), p.distance),
            ("B3^-1".to_string(), b3.distance),
        ]);
    }
    let run = run_segments(model, code.basis(), &parts)?;
    let gate = if truncated { "ccz-truncated" } else { "ccz" };
    report(gate, &code, run, diagonal_phase_target(3, -ONE), budget)
}

/// Distance to CZ (`gate = "cz"`) or CCZ (`"ccz"`, `"ccz-truncated"`) and
/// leakage of an elementary-exchange word on the matching register.
pub fn evaluate_gate(model: &AnyonModel, gate: &str, word: &BraidWord) -> Result<(f64, f64)> {
    let qubits = match gate {
        "cz" => 2,
        "ccz" | "ccz-truncated" => 3,
        _ => return Err(Error::Assembly(format!("no register defined for gate {gate}"))),
    };
    let code = multi_qubit_code(model, qubits, QubitCharges::for_level(model.level()))?;
    let strands = code.basis().strand_count();
    let eval = evaluate(model, code.basis(), &Grouping::singletons(strands), word)?;
    if eval.op.target.leaves() != code.basis().leaves() {
        return Err(Error::Assembly(format!("word does not restore the {gate} register")));
    }
    let g = code.computational_isometry();
    let d = gate_distance(&eval.op.matrix, &g, &g, &diagonal_phase_target(qubits, -ONE));
    Ok((d, leakage(&eval.op.matrix, &code)?.leakage_norm))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConversionDirection {
    /// Two four-anyon qubits into the six-anyon register.
    Merge,
    /// The reverse.
    Split,
    /// Merge, keep only the six-anyon code space, then split.
    RoundTrip,
}

/// Register conversion with the anyon-exchange braid E.
pub fn convert_registers(
    model: &AnyonModel,
    direction: ConversionDirection,
    e: &SynthesisResult,
) -> Result<GateReport> {
    if e.target != "E" {
        return Err(Error::Assembly(format!("expected an E braid, got {}", e.target)));
    }
    let t = make_target_e(model)?;
    let w = &e.braid;
    if w.strand_count() != t.block_count() || w.permutation() != [0, 3, 1, 2] {
        return Err(Error::Assembly("E must carry [b6 b7 a8] next to [a1 b2 b3]".into()));
    }
    let forward = evaluate(model, &t.basis, &t.grouping, w)?;
    let after = forward.grouping.clone();
    let backward = evaluate(model, &forward.op.target, &after, &w.inverse())?;

    let (u, inputs, outputs, start_leaves) = match direction {
        ConversionDirection::Merge => (forward.op.matrix.clone(), &t.inputs, &t.outputs, t.basis.leaves()),
        ConversionDirection::Split => (
            backward.op.matrix.clone(),
            &t.outputs,
            &t.inputs,
            forward.op.target.leaves(),
        ),
        ConversionDirection::RoundTrip => (
            &(&backward.op.matrix * &(&t.outputs * &t.outputs.adjoint())) * &forward.op.matrix,
            &t.inputs,
            &t.inputs,
            t.basis.leaves(),
        ),
    };
    let id4 = CMatrix::identity(4);
    let logical = &(&outputs.adjoint() * &u) * inputs;
    let images = &u * inputs;
    let leak = images.sub(&(outputs * &(&outputs.adjoint() * &images))).operator_norm();
    let mut diagonal_phases = BTreeMap::new();
    for (j, label) in t.input_labels.iter().enumerate() {
        diagonal_phases.insert(label.clone(), logical[(j, j)]);
    }
    let (gate, budget, word) = match direction {
        ConversionDirection::Merge => ("merge", vec![("E".to_string(), e.distance)], w.clone()),
        ConversionDirection::Split => ("split", vec![("E^-1".to_string(), e.distance)], w.inverse()),
        ConversionDirection::RoundTrip => (
            "merge-split",
            vec![("E".to_string(), e.distance), ("E^-1".to_string(), e.distance)],
            w.concat(&w.inverse())?,
        ),
    };
    let segment_len = expand(w, &t.grouping)?.len();
    let segments: Vec<Segment> = budget
        .iter()
        .enumerate()
        .map(|(i, (name, _))| Segment {
            name: name.clone(),
            start: i * segment_len,
            len: segment_len,
        })
        .collect();
    let start_grouping = match direction {
        ConversionDirection::Split => after,
        _ => t.grouping.clone(),
    };
    let fine = expand(&word, &start_grouping)?;
    // The logical identity is only defined up to a global phase.
    let tr = logical.trace();
    let global = if tr.norm() > 0.0 { tr / tr.norm() } else { ONE };
    let trivial = (0..4).map(|j| (logical[(j, j)] - global).norm()).fold(0.0, f64::max);
    Ok(GateReport {
        gate: gate.to_string(),
        distance_to_target: gate_distance(&u, inputs, outputs, &id4),
        off_diagonal: off_diagonal_norm(&logical),
        logical_matrix: logical,
        target_matrix: id4,
        leakage: leak,
        bound: budget.iter().map(|(_, d)| d).sum(),
        component_budget: budget,
        braid_length_total: segments.iter().map(|s| s.len).sum(),
        leaves: start_leaves.to_vec(),
        segments,
        word: fine,
        trivial_phase_deviation: trivial,
        diagonal_phases,
    })
}
