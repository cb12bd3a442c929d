//! What a braid has to implement.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::code::{multi_qubit_code, single_qubit_code, CodeSpace, QubitCharges, SingleQubitScheme};
use crate::error::{Error, Result};
use crate::fusion::FusionBasis;
use crate::grouping::{regroup, Grouping};
use crate::linalg::{inner, phase_aligned_residual, CMatrix, C64, ONE, ZERO};
use crate::model::{AnyonModel, Charge};

/// How the overlap `z = <out|U|in>` of a sector is judged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhasePolicy {
    /// `z` must equal this phase; penalty `sqrt(2 max(0, 1 - Re(conj(t) z)))`.
    Fixed(C64),
    /// Any phase is fine; penalty `sqrt(2 max(0, 1 - |z|))`.
    Free,
    /// Same penalty as `Free`; the phase is removed later by the inverse braid.
    CancelWithPartner,
}

impl PhasePolicy {
    pub const MUST_BE_ONE: Self = Self::Fixed(ONE);

    /// `min ‖image - t·want‖` over the phases `t` the policy allows. For unit
    /// vectors this is `sqrt(2 - 2 Re(conj(t) z))` with `z = <want|image>`.
    pub fn penalty(self, image: &[C64], want: &[C64]) -> f64 {
        let t = match self {
            Self::Fixed(t) => t,
            Self::Free | Self::CancelWithPartner => {
                let z = inner(want, image);
                if z.norm() > 0.0 {
                    z / z.norm()
                } else {
                    ONE
                }
            }
        };
        norm_of_difference(image, want, t)
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Fixed(t) if t == ONE => "must_be_one",
            Self::Fixed(_) => "fixed",
            Self::Free => "free",
            Self::CancelWithPartner => "must_cancel_with_partner",
        }
    }
}

fn norm_of_difference(x: &[C64], y: &[C64], t: C64) -> f64 {
    libm::sqrt(x.iter().zip(y).map(|(a, b)| (a - t * b).norm_sqr()).sum())
}

/// Input column `input` must land on output column `output`.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorRule {
    pub label: String,
    pub input: usize,
    pub output: usize,
    pub policy: PhasePolicy,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Objective {
    /// `max` of the rule penalties.
    Sectors(Vec<SectorRule>),
    /// `outputs† U inputs` should equal `matrix` up to a global phase; scored
    /// like [`crate::braid::distance`].
    Unitary {
        matrix: CMatrix,
        /// `outputs · matrix`.
        reference: CMatrix,
    },
}

impl Objective {
    pub fn unitary(outputs: &CMatrix, matrix: CMatrix) -> Self {
        Self::Unitary {
            reference: outputs * &matrix,
            matrix,
        }
    }
}

/// Phase of a one-dimensional sector that is a pure function of how often
/// two blocks were exchanged: `base^signed_count`.
#[derive(Debug, Clone, PartialEq)]
pub struct Winding {
    pub label: String,
    pub blocks: (usize, usize),
    pub base: C64,
    pub order: u64,
    pub policy: PhasePolicy,
}

impl Winding {
    pub fn phase(&self, signed: i64) -> C64 {
        let n = signed.rem_euclid(self.order as i64) as i32;
        self.base.powi(n)
    }

    pub fn penalty(&self, signed: i64) -> f64 {
        self.policy.penalty(&[self.phase(signed)], &[ONE])
    }
}

/// Which block arrangements count as a finished braid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FinalArrangement {
    /// Block ids, left to right.
    Order(Vec<usize>),
    /// Any order with these leaf charges (identical anyons are interchangeable).
    Leaves(Vec<Charge>),
}

#[derive(Debug, Clone)]
pub struct SynthesisTarget {
    pub id: String,
    pub model: AnyonModel,
    /// Fine basis before the braid.
    pub basis: FusionBasis,
    /// Blocks the braid letters exchange.
    pub grouping: Grouping,
    pub block_names: Vec<String>,
    /// Block positions (1-based) letters may use.
    pub positions: Vec<usize>,
    /// The one block allowed to move in a weave.
    pub mobile: Option<usize>,
    pub final_arrangement: FinalArrangement,
    /// Fine basis × m, one column per relevant input state.
    pub inputs: CMatrix,
    pub input_labels: Vec<String>,
    /// Final fine basis × m', allowed output states.
    pub outputs: CMatrix,
    pub objective: Objective,
    pub windings: Vec<Winding>,
    /// The code the gate acts on, for leakage reports.
    pub code: Option<CodeSpace>,
}

/// Numbers derived from a braid's matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Assessment {
    pub distance: f64,
    /// Operator norm of the part of `U inputs` outside the span of `outputs`.
    pub leakage: f64,
    pub sector_phases: BTreeMap<String, C64>,
}

impl SynthesisTarget {
    pub fn block_count(&self) -> usize {
        self.grouping.block_count()
    }

    pub fn accepts(&self, order: &[usize], leaves: &[Charge]) -> bool {
        match &self.final_arrangement {
            FinalArrangement::Order(o) => o == order,
            FinalArrangement::Leaves(l) => l == leaves,
        }
    }

    /// Score of `images = U · inputs` (in the final fine basis).
    pub fn score(&self, images: &CMatrix) -> f64 {
        match &self.objective {
            Objective::Sectors(rules) => {
                let mut image = Vec::with_capacity(images.rows());
                let mut want = Vec::with_capacity(images.rows());
                rules
                    .iter()
                    .map(|r| {
                        image.clear();
                        want.clear();
                        image.extend((0..images.rows()).map(|i| images[(i, r.input)]));
                        want.extend((0..images.rows()).map(|i| self.outputs[(i, r.output)]));
                        r.policy.penalty(&image, &want)
                    })
                    .fold(0.0, f64::max)
            }
            Objective::Unitary { reference, .. } => {
                phase_aligned_residual(images, reference) / libm::sqrt(2.0 * images.cols().max(1) as f64)
            }
        }
    }

    fn overlap(&self, output: usize, images: &CMatrix, input: usize) -> C64 {
        (0..images.rows())
            .map(|r| self.outputs[(r, output)].conj() * images[(r, input)])
            .sum()
    }

    /// Full assessment of a braid matrix `u` (start fine basis → final fine basis).
    pub fn assess(&self, u: &CMatrix) -> Result<Assessment> {
        if u.cols() != self.inputs.rows() || u.rows() != self.outputs.rows() {
            return Err(Error::DimensionMismatch {
                expected: self.inputs.rows(),
                found: u.cols(),
            });
        }
        let images = u * &self.inputs;
        let distance = self.score(&images);
        let projected = &self.outputs * &(&self.outputs.adjoint() * &images);
        let leakage = images.sub(&projected).operator_norm();
        let mut sector_phases = BTreeMap::new();
        match &self.objective {
            Objective::Sectors(rules) => {
                for r in rules {
                    sector_phases.insert(r.label.clone(), self.overlap(r.output, &images, r.input));
                }
            }
            Objective::Unitary { .. } => {
                for (j, label) in self.input_labels.iter().enumerate() {
                    sector_phases.insert(label.clone(), self.overlap(j, &images, j));
                }
            }
        }
        Ok(Assessment {
            distance,
            leakage,
            sector_phases,
        })
    }

    /// Lower bound on the score from exchange counts alone.
    pub fn winding_bound(&self, signed: &[i64]) -> f64 {
        self.windings
            .iter()
            .zip(signed)
            .map(|(w, &s)| w.penalty(s))
            .fold(0.0, f64::max)
    }

    /// Largest `|phase - t|` over sectors whose phase is fixed to `t`.
    pub fn fixed_phase_deviation(&self, sector_phases: &BTreeMap<String, C64>) -> f64 {
        let Objective::Sectors(rules) = &self.objective else {
            return 0.0;
        };
        rules
            .iter()
            .filter_map(|r| match r.policy {
                PhasePolicy::Fixed(t) => Some(sector_phases.get(&r.label).map_or(f64::INFINITY, |z| (z - t).norm())),
                _ => None,
            })
            .fold(0.0, f64::max)
    }

    /// Whether every winding phase is within `tol` of its required value.
    pub fn windings_pass(&self, signed: &[i64], tol: f64) -> bool {
        self.windings.iter().zip(signed).all(|(w, &s)| w.penalty(s) < tol)
    }
}

fn bits_label(bits: &[u8]) -> String {
    bits.iter().map(|b| char::from(b'0' + b)).collect()
}

fn two_qubit_setup(model: &AnyonModel) -> Result<(CodeSpace, QubitCharges)> {
    let charges = QubitCharges::for_level(model.level());
    let code = multi_qubit_code(model, 2, charges)?;
    Ok((code, charges))
}

fn two_qubit_frame(model: &AnyonModel, id: &str, code: &CodeSpace) -> SynthesisTarget {
    let inputs = code.computational_isometry();
    let input_labels = code.computational().iter().map(|(b, _)| bits_label(b)).collect();
    SynthesisTarget {
        id: id.to_string(),
        model: model.clone(),
        basis: code.basis().clone(),
        grouping: code.grouping().clone(),
        block_names: ["a1", "q1", "q2", "a6"].iter().map(|s| s.to_string()).collect(),
        positions: vec![1, 2],
        mobile: Some(0),
        final_arrangement: FinalArrangement::Order(vec![0, 1, 2, 3]),
        outputs: inputs.clone(),
        inputs,
        input_labels,
        objective: Objective::Sectors(Vec::new()),
        windings: Vec::new(),
        code: Some(code.clone()),
    }
}

/// Single-qubit phase gate on q2 controlled by q1: phases 1, 1, 1, -1 on
/// |00>, |01>, |10>, |11>, with only a1 moving around q1 and q2.
pub fn make_target_p(model: &AnyonModel) -> Result<SynthesisTarget> {
    let (code, charges) = two_qubit_setup(model)?;
    let mut t = two_qubit_frame(model, "P", &code);
    let rules = t
        .input_labels
        .iter()
        .enumerate()
        .map(|(j, label)| SectorRule {
            label: label.clone(),
            input: j,
            output: j,
            policy: if label == "11" {
                PhasePolicy::Fixed(-ONE)
            } else {
                PhasePolicy::MUST_BE_ONE
            },
        })
        .collect();
    t.objective = Objective::Sectors(rules);

    let a = charges.a;
    let base = model
        .symbols()
        .r(a, Charge::ONE, a)
        .ok_or_else(|| Error::Target("a cannot fuse with a charge-1 block back to a".into()))?;
    let order = crate::symbols::r_symbol_order(model.level(), a, Charge::ONE, a).unwrap_or(1);
    t.windings = vec![
        Winding {
            label: "10".into(),
            blocks: (0, 1),
            base,
            order,
            policy: PhasePolicy::MUST_BE_ONE,
        },
        Winding {
            label: "01".into(),
            blocks: (0, 2),
            base,
            order,
            policy: PhasePolicy::MUST_BE_ONE,
        },
    ];
    Ok(t)
}

/// Braid that takes |11> into the state where q1 and q2 jointly carry
/// `joint` (1 for B1, 0 for B3), phases free.
pub fn make_target_aggregation(model: &AnyonModel, joint: Charge) -> Result<SynthesisTarget> {
    let (code, charges) = two_qubit_setup(model)?;
    let id = if joint == Charge::ONE { "B1" } else { "B3" };
    let mut t = two_qubit_frame(model, id, &code);
    let a = charges.a;
    if !model.admissible(Charge::ONE, Charge::ONE, joint) || !model.admissible(a, joint, a) {
        return Err(Error::Target(format!(
            "SU(2)_{} has no (1,1) state with q1 q2 fused to {joint}",
            model.level()
        )));
    }
    let grouped = code.grouped();
    let q = Charge::ONE;
    let block = model
        .symbols()
        .f_block(a, q, q, a)
        .ok_or_else(|| Error::Target("no F-move for the (1,1) sector".into()))?;
    let col = block
        .col_index(joint)
        .ok_or_else(|| Error::Target(format!("{joint} is not a channel of the (1,1) sector")))?;
    let mut w = vec![ZERO; code.basis().dim()];
    for (row, &x) in block.rows.iter().enumerate() {
        let idx = grouped
            .find(&[a, q, q, a], &[a, x, a, Charge::VACUUM])
            .ok_or_else(|| Error::Target("missing (1,1) basis state".into()))?;
        let coeff = block.matrix[(row, col)].conj();
        for (wi, vi) in w.iter_mut().zip(grouped.vector(idx)) {
            *wi += coeff * vi;
        }
    }
    let eleven = t.input_labels.iter().position(|l| l == "11").expect("two-qubit code");
    let mut outs: Vec<Vec<C64>> = (0..t.outputs.cols()).map(|j| t.outputs.column(j)).collect();
    outs[eleven] = w;
    t.outputs = CMatrix::from_columns(code.basis().dim(), &outs);
    t.objective = Objective::Sectors(
        t.input_labels
            .iter()
            .enumerate()
            .map(|(j, label)| SectorRule {
                label: label.clone(),
                input: j,
                output: j,
                policy: PhasePolicy::CancelWithPartner,
            })
            .collect(),
    );
    Ok(t)
}

pub fn make_target_b1(model: &AnyonModel) -> Result<SynthesisTarget> {
    make_target_aggregation(model, Charge::ONE)
}

pub fn make_target_b3(model: &AnyonModel) -> Result<SynthesisTarget> {
    make_target_aggregation(model, Charge::VACUUM)
}

/// Leaf order of the product register `a1 b2 b3 a4 | a5 b6 b7 a8` and the
/// blocks `[a1 b2 b3] [a4] [a5] [b6 b7 a8]` that the exchange gate moves.
pub fn exchange_layout(charges: QubitCharges) -> (Vec<Charge>, Grouping) {
    let QubitCharges { a, b } = charges;
    let leaves = vec![a, b, b, a, a, b, b, a];
    let grouping = Grouping::from_sizes(&[3, 1, 1, 3]).expect("fixed layout");
    (leaves, grouping)
}

/// Anyon-exchange gate: two four-anyon qubits `(a1 q1 a4)(a5 q2 a8)` become
/// the six-anyon register on `a1 b2 b3 b6 b7 a8` with `(a4 a5)` fused to 0.
pub fn make_target_e(model: &AnyonModel) -> Result<SynthesisTarget> {
    let charges = QubitCharges::for_level(model.level());
    let QubitCharges { a, b } = charges;
    let (leaves, grouping) = exchange_layout(charges);
    let basis = FusionBasis::enumerate(model, &leaves, Charge::VACUUM)?;
    let product = regroup(model, &basis, &Grouping::from_sizes(&[1, 2, 1, 1, 2, 1])?)?;
    let final_leaves = vec![a, b, b, b, b, a, a, a];
    let final_basis = FusionBasis::enumerate(model, &final_leaves, Charge::VACUUM)?;
    let dense = regroup(model, &final_basis, &Grouping::from_sizes(&[1, 2, 2, 1, 1, 1])?)?;

    let v = Charge::VACUUM;
    let mut ins = Vec::new();
    let mut outs = Vec::new();
    let mut labels = Vec::new();
    for q1 in [v, Charge::ONE] {
        for q2 in [v, Charge::ONE] {
            let i = product
                .find(&[a, q1, a, a, q2, a], &[a, a, v, a, a, v])
                .ok_or_else(|| Error::Target("product register lacks a logical state".into()))?;
            let o = dense
                .find(&[a, q1, q2, a, a, a], &[a, a, a, v, a, v])
                .ok_or_else(|| Error::Target("dense register lacks a logical state".into()))?;
            ins.push(product.vector(i));
            outs.push(dense.vector(o));
            labels.push(bits_label(&[u8::from(q1 == Charge::ONE), u8::from(q2 == Charge::ONE)]));
        }
    }
    let mut t = SynthesisTarget {
        id: "E".into(),
        model: model.clone(),
        inputs: CMatrix::from_columns(basis.dim(), &ins),
        outputs: CMatrix::from_columns(final_basis.dim(), &outs),
        basis,
        grouping,
        block_names: ["a1b2b3", "a4", "a5", "b6b7a8"].iter().map(|s| s.to_string()).collect(),
        positions: vec![1, 2, 3],
        mobile: Some(3),
        final_arrangement: FinalArrangement::Order(vec![0, 3, 1, 2]),
        input_labels: labels,
        objective: Objective::Unitary {
            matrix: CMatrix::identity(4),
            reference: CMatrix::zeros(0, 0),
        },
        windings: Vec::new(),
        code: None,
    };
    t.objective = Objective::unitary(&t.outputs, CMatrix::identity(4));
    Ok(t)
}

/// An exact single-qubit unitary (rows and columns ordered |0>, |1>).
pub fn make_target_unitary(
    model: &AnyonModel,
    id: &str,
    scheme: SingleQubitScheme,
    unitary: CMatrix,
) -> Result<SynthesisTarget> {
    if unitary.rows() != 2 || !unitary.is_unitary(1e-12) {
        return Err(Error::Target("single-qubit target must be a 2x2 unitary".into()));
    }
    let charges = QubitCharges::for_level(model.level());
    let code = single_qubit_code(model, scheme, charges)?;
    let positions = match scheme {
        SingleQubitScheme::FourAnyon => vec![1, 2, 3],
        SingleQubitScheme::ThreeAnyon => vec![1, 2],
    };
    let inputs = code.computational_isometry();
    let objective = Objective::unitary(&inputs, unitary);
    Ok(SynthesisTarget {
        id: id.to_string(),
        model: model.clone(),
        basis: code.basis().clone(),
        grouping: Grouping::singletons(4),
        block_names: ["a1", "b2", "b3", "a4"].iter().map(|s| s.to_string()).collect(),
        positions,
        mobile: None,
        final_arrangement: FinalArrangement::Leaves(code.basis().leaves().to_vec()),
        outputs: inputs.clone(),
        inputs,
        input_labels: vec!["0".into(), "1".into()],
        objective,
        windings: Vec::new(),
        code: Some(code),
    })
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_major(2, 2, vec![ZERO, ONE, ONE, ZERO]).expect("2x2")
}

/// Logical NOT on the single-qubit code.
pub fn make_target_not(model: &AnyonModel, scheme: SingleQubitScheme) -> Result<SynthesisTarget> {
    make_target_unitary(model, "NOT", scheme, pauli_x())
}

/// Checks the column vectors of a target are orthonormal.
pub fn frame_residual(m: &CMatrix) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.cols() {
        for j in 0..m.cols() {
            let z = inner(&m.column(i), &m.column(j));
            let want = if i == j { ONE } else { ZERO };
            worst = worst.max((z - want).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frames_are_orthonormal() {
        for k in [2, 3, 5, 8] {
            let m = AnyonModel::new(k).unwrap();
            let mut targets = vec![
                make_target_p(&m).unwrap(),
                make_target_b3(&m).unwrap(),
                make_target_e(&m).unwrap(),
            ];
            if k > 2 {
                targets.push(make_target_b1(&m).unwrap());
            }
            for t in targets {
                assert!(frame_residual(&t.inputs) < 1e-12, "{} inputs k={k}", t.id);
                assert!(frame_residual(&t.outputs) < 1e-12, "{} outputs k={k}", t.id);
            }
        }
    }

    #[test]
    fn b1_needs_a_joint_charge_one() {
        let m = AnyonModel::new(2).unwrap();
        assert!(matches!(make_target_b1(&m), Err(Error::Target(_))));
    }

    #[test]
    fn identity_scores_per_target() {
        let m = AnyonModel::new(3).unwrap();
        let p = make_target_p(&m).unwrap();
        // Only the |11> phase is wrong.
        assert!((p.score(&p.inputs) - 2.0).abs() < 1e-12);
        let b3 = make_target_b3(&m).unwrap();
        let s = b3.assess(&CMatrix::identity(b3.basis.dim())).unwrap();
        assert!(s.distance > 0.1);
        assert!(s.leakage > 0.1);
        let not = make_target_not(&m, SingleQubitScheme::ThreeAnyon).unwrap();
        assert!((not.score(&not.inputs) - 1.0).abs() < 1e-12);
        let id = make_target_unitary(&m, "I", SingleQubitScheme::ThreeAnyon, CMatrix::identity(2)).unwrap();
        assert_eq!(id.score(&id.inputs), 0.0);
    }

    #[test]
    fn winding_phases_follow_the_order() {
        let m = AnyonModel::new(3).unwrap();
        let p = make_target_p(&m).unwrap();
        let w = &p.windings[0];
        assert_eq!(w.order, 10);
        assert!(w.penalty(10) < 1e-12);
        assert!(w.penalty(-20) < 1e-12);
        assert!(w.penalty(3) > 0.5);
        assert!(p.windings_pass(&[0, 10], 1e-9));
        assert!(!p.windings_pass(&[1, 0], 1e-9));
    }

    #[test]
    fn non_unitary_targets_are_rejected() {
        let m = AnyonModel::new(3).unwrap();
        let bad = CMatrix::from_row_major(2, 2, vec![ONE, ONE, ZERO, ONE]).unwrap();
        assert!(make_target_unitary(&m, "bad", SingleQubitScheme::FourAnyon, bad).is_err());
    }
}
