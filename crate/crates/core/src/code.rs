//! Qubit encodings in fusion spaces.
//!
//! An n-qubit register uses leaves `a, b, b, ..., b, a` (2n+2 anyons, total
//! charge 0). Qubit i is the fusion channel (0 or 1) of the pair
//! `(b_{2i}, b_{2i+1})`; a basis state is computational when every pair is in
//! channel 0 or 1 and the running charge after each pair is back to `a`:
//!
//! ```text
//! |q1 q2⟩ = |(((a (bb)^{q1})^a (bb)^{q2})^a a)^0⟩
//! ```
//!
//! Everything else (for example the `(a (bb)^1)^{3/2}` intermediate at k > 2)
//! is non-computational.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fusion::FusionBasis;
use crate::grouping::{regroup, GroupedBasis, Grouping};
use crate::linalg::{CMatrix, C64};
use crate::model::{AnyonModel, Charge};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingleQubitScheme {
    FourAnyon,
    /// `(a (bb)^q)^{a}`; stored as the four-anyon code whose last anyon is
    /// never braided.
    ThreeAnyon,
}

/// Charges of the outer (`a`) and paired (`b`) anyons.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QubitCharges {
    pub a: Charge,
    pub b: Charge,
}

impl Default for QubitCharges {
    fn default() -> Self {
        Self {
            a: Charge::HALF,
            b: Charge::HALF,
        }
    }
}

impl QubitCharges {
    pub fn new(a: Charge, b: Charge) -> Self {
        Self { a, b }
    }

    /// The charge choice used for each level by default: spin-1/2 everywhere
    /// except k = 8, where `b = 1`.
    pub fn for_level(level: u32) -> Self {
        if level == 8 {
            Self::new(Charge::HALF, Charge::ONE)
        } else {
            Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeafRole {
    Outer,
    Paired,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CodeLayout {
    pub roles: Vec<LeafRole>,
    /// Block index (in the code grouping) holding each qubit's pair.
    pub qubit_blocks: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CodeSpace {
    grouped: GroupedBasis,
    computational: Vec<(Vec<u8>, usize)>,
    non_computational: Vec<usize>,
    layout: CodeLayout,
    charges: QubitCharges,
    scheme: Option<SingleQubitScheme>,
}

impl CodeSpace {
    pub fn grouped(&self) -> &GroupedBasis {
        &self.grouped
    }

    pub fn basis(&self) -> &FusionBasis {
        self.grouped.fine()
    }

    pub fn grouping(&self) -> &Grouping {
        self.grouped.grouping()
    }

    /// `(bit-string, grouped tree index)`, sorted by bit-string with qubit 1
    /// most significant.
    pub fn computational(&self) -> &[(Vec<u8>, usize)] {
        &self.computational
    }

    pub fn non_computational(&self) -> &[usize] {
        &self.non_computational
    }

    pub fn layout(&self) -> &CodeLayout {
        &self.layout
    }

    pub fn charges(&self) -> QubitCharges {
        self.charges
    }

    pub fn scheme(&self) -> Option<SingleQubitScheme> {
        self.scheme
    }

    pub fn qubit_count(&self) -> usize {
        self.layout.qubit_blocks.len()
    }

    pub fn dim(&self) -> usize {
        self.grouped.dim()
    }

    /// Fine-basis vector of a computational state.
    pub fn logical_state(&self, bits: &[u8]) -> Option<Vec<C64>> {
        self.computational
            .iter()
            .find(|(b, _)| b == bits)
            .map(|&(_, idx)| self.grouped.vector(idx))
    }

    /// Fine dimension × 2^n matrix of computational states.
    pub fn computational_isometry(&self) -> CMatrix {
        let cols: Vec<Vec<C64>> = self
            .computational
            .iter()
            .map(|&(_, i)| self.grouped.vector(i))
            .collect();
        CMatrix::from_columns(self.basis().dim(), &cols)
    }

    pub fn non_computational_isometry(&self) -> CMatrix {
        let cols: Vec<Vec<C64>> = self.non_computational.iter().map(|&i| self.grouped.vector(i)).collect();
        CMatrix::from_columns(self.basis().dim(), &cols)
    }

    /// Projector onto the computational subspace, in fine coordinates.
    pub fn computational_projector(&self) -> CMatrix {
        let g = self.computational_isometry();
        &g * &g.adjoint()
    }

    pub fn non_computational_projector(&self) -> CMatrix {
        let g = self.non_computational_isometry();
        &g * &g.adjoint()
    }

    /// Restriction of a fine-basis operator to the computational subspace.
    pub fn logical(&self, u: &CMatrix) -> Result<CMatrix> {
        self.check_dim(u)?;
        let g = self.computational_isometry();
        Ok(&(&g.adjoint() * u) * &g)
    }

    fn check_dim(&self, u: &CMatrix) -> Result<()> {
        let d = self.basis().dim();
        if u.rows() != d || u.cols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: if u.rows() != d { u.rows() } else { u.cols() },
            });
        }
        Ok(())
    }
}

/// One logical qubit in four (or, equivalently, three) anyons.
pub fn single_qubit_code(model: &AnyonModel, scheme: SingleQubitScheme, charges: QubitCharges) -> Result<CodeSpace> {
    let mut code = build_register(model, 1, charges)?;
    code.scheme = Some(scheme);
    Ok(code)
}

/// n logical qubits in 2n + 2 anyons with total charge 0.
pub fn multi_qubit_code(model: &AnyonModel, qubits: usize, charges: QubitCharges) -> Result<CodeSpace> {
    if qubits == 0 {
        return Err(Error::Encoding("need at least one qubit".into()));
    }
    build_register(model, qubits, charges)
}

fn build_register(model: &AnyonModel, qubits: usize, charges: QubitCharges) -> Result<CodeSpace> {
    let QubitCharges { a, b } = charges;
    model.check(a)?;
    model.check(b)?;
    let bb = model.fuse(b, b)?;
    if !(bb.contains(&Charge::VACUUM) && bb.contains(&Charge::ONE)) {
        return Err(Error::Encoding(format!(
            "{b} x {b} = {bb:?} lacks the 0 and 1 channels a qubit needs"
        )));
    }
    if !model.admissible(a, Charge::ONE, a) || !model.admissible(a, a, Charge::VACUUM) {
        return Err(Error::Encoding(format!(
            "outer charge {a} cannot absorb a charge-1 pair and close to total 0"
        )));
    }

    let mut leaves = vec![a];
    let mut roles = vec![LeafRole::Outer];
    for _ in 0..qubits {
        leaves.extend([b, b]);
        roles.extend([LeafRole::Paired, LeafRole::Paired]);
    }
    leaves.push(a);
    roles.push(LeafRole::Outer);

    let basis = FusionBasis::enumerate(model, &leaves, Charge::VACUUM)?;
    let mut sizes = vec![1];
    sizes.extend(core::iter::repeat_n(2, qubits));
    sizes.push(1);
    let grouping = Grouping::from_sizes(&sizes)?;
    let grouped = regroup(model, &basis, &grouping)?;

    let mut computational = Vec::new();
    let mut non_computational = Vec::new();
    for (idx, tree) in grouped.trees().iter().enumerate() {
        let qs = &tree.block_charges[1..=qubits];
        let is_bit = |c: &Charge| *c == Charge::VACUUM || *c == Charge::ONE;
        let running_ok = tree.coarse_internals[1..=qubits].iter().all(|&y| y == a);
        if qs.iter().all(is_bit) && running_ok {
            let bits: Vec<u8> = qs.iter().map(|c| u8::from(*c == Charge::ONE)).collect();
            computational.push((bits, idx));
        } else {
            non_computational.push(idx);
        }
    }
    computational.sort();
    if computational.len() != 1 << qubits {
        return Err(Error::Encoding(format!(
            "found {} computational states, expected {}",
            computational.len(),
            1usize << qubits
        )));
    }
    Ok(CodeSpace {
        grouped,
        computational,
        non_computational,
        layout: CodeLayout {
            roles,
            qubit_blocks: (1..=qubits).collect(),
        },
        charges,
        scheme: None,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeakageReport {
    /// Operator norm of (non-computational projector)·U·(computational projector).
    pub leakage_norm: f64,
    pub worst_input: Vec<u8>,
    /// Diagonal element of U on every one-dimensional sector, keyed by block charges.
    pub sector_phases: BTreeMap<Vec<Charge>, C64>,
}

/// Leakage of a fine-basis operator out of the computational subspace.
pub fn leakage(u: &CMatrix, code: &CodeSpace) -> Result<LeakageReport> {
    code.check_dim(u)?;
    let gc = code.computational_isometry();
    let gn = code.non_computational_isometry();
    let leak = &(&gn.adjoint() * u) * &gc;
    let leakage_norm = leak.operator_norm();

    let mut worst = 0;
    let mut worst_norm = -1.0;
    for (j, _) in code.computational.iter().enumerate() {
        let col: f64 = (0..leak.rows()).map(|r| leak[(r, j)].norm_sqr()).sum();
        if col > worst_norm + 1e-15 {
            worst_norm = col;
            worst = j;
        }
    }

    let grouped = code.grouped();
    let mut sector_phases = BTreeMap::new();
    for (charges, idx) in grouped.sectors() {
        if let [i] = idx[..] {
            let v = grouped.vector(i);
            let uv = u.mul_vec(&v);
            sector_phases.insert(charges, crate::linalg::inner(&v, &uv));
        }
    }
    Ok(LeakageReport {
        leakage_norm,
        worst_input: code.computational[worst].0.clone(),
        sector_phases,
    })
}
