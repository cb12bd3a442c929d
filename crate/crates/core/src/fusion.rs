//! Left-comb fusion-tree bases and the elementary braid generators acting on them.
//!
//! A tree over leaves `l_0 .. l_{n-1}` is the nested bracket
//! `(((l_0 l_1)^{x_1} l_2)^{x_2} ... l_{n-1})^{x_{n-1}}`; we store the internal
//! charges `x_0 = l_0, x_1, ..., x_{n-1}` so that `x_{n-1}` is the total charge.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64, ZERO};
use crate::model::{AnyonModel, Charge};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FusionTree {
    pub leaves: Vec<Charge>,
    pub internals: Vec<Charge>,
}

impl FusionTree {
    pub fn total(&self) -> Charge {
        *self.internals.last().expect("fusion trees have at least one leaf")
    }

    /// Checks every vertex of the tree against the fusion rules.
    pub fn is_admissible(&self, model: &AnyonModel) -> bool {
        self.leaves.len() == self.internals.len()
            && !self.leaves.is_empty()
            && self.internals[0] == self.leaves[0]
            && self
                .internals
                .windows(2)
                .zip(&self.leaves[1..])
                .all(|(x, &l)| model.admissible(x[0], l, x[1]))
    }
}

/// Every admissible left-comb tree for fixed leaves and total charge,
/// ordered lexicographically by internal charges.
#[derive(Debug, Clone, PartialEq)]
pub struct FusionBasis {
    leaves: Vec<Charge>,
    total: Charge,
    trees: Vec<FusionTree>,
    index: BTreeMap<Vec<Charge>, usize>,
}

impl FusionBasis {
    pub fn enumerate(model: &AnyonModel, leaves: &[Charge], total: Charge) -> Result<Self> {
        if leaves.is_empty() {
            return Err(Error::InvalidGrouping("a fusion basis needs at least one leaf".into()));
        }
        for &l in leaves {
            model.check(l)?;
        }
        model.check(total)?;

        let mut trees = Vec::new();
        let mut path = Vec::with_capacity(leaves.len());
        path.push(leaves[0]);
        extend(model, leaves, total, &mut path, &mut trees);

        let index = trees
            .iter()
            .enumerate()
            .map(|(i, t)| (t.internals.clone(), i))
            .collect();
        Ok(Self {
            leaves: leaves.to_vec(),
            total,
            trees,
            index,
        })
    }

    pub fn leaves(&self) -> &[Charge] {
        &self.leaves
    }

    pub fn total(&self) -> Charge {
        self.total
    }

    pub fn trees(&self) -> &[FusionTree] {
        &self.trees
    }

    pub fn dim(&self) -> usize {
        self.trees.len()
    }

    pub fn strand_count(&self) -> usize {
        self.leaves.len()
    }

    pub fn index_of(&self, internals: &[Charge]) -> Option<usize> {
        self.index.get(internals).copied()
    }
}

fn extend(model: &AnyonModel, leaves: &[Charge], total: Charge, path: &mut Vec<Charge>, out: &mut Vec<FusionTree>) {
    let depth = path.len();
    if depth == leaves.len() {
        if path[depth - 1] == total {
            out.push(FusionTree {
                leaves: leaves.to_vec(),
                internals: path.clone(),
            });
        }
        return;
    }
    let prev = path[depth - 1];
    for x in model.channels(prev, leaves[depth]) {
        path.push(x);
        extend(model, leaves, total, path, out);
        path.pop();
    }
}

/// Unit vector in a fusion space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub basis: FusionBasis,
    pub amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn basis_state(basis: FusionBasis, index: usize) -> Self {
        let mut amplitudes = alloc::vec![ZERO; basis.dim()];
        amplitudes[index] = C64::new(1.0, 0.0);
        Self { basis, amplitudes }
    }

    pub fn norm(&self) -> f64 {
        linalg::norm(&self.amplitudes)
    }

    /// Applies a braid operator whose source leaves match this state.
    pub fn apply(&self, op: &BraidOperator) -> Result<Self> {
        if op.source_leaves != self.basis.leaves || op.matrix.cols() != self.basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: op.matrix.cols(),
                found: self.basis.dim(),
            });
        }
        Ok(Self {
            basis: op.target.clone(),
            amplitudes: op.matrix.mul_vec(&self.amplitudes),
        })
    }
}

/// Matrix of a braid from the basis over `source_leaves` to `target`.
///
/// Exchanging strands permutes their charges, so source and target leaves
/// differ whenever the exchanged charges differ.
#[derive(Debug, Clone, PartialEq)]
pub struct BraidOperator {
    pub source_leaves: Vec<Charge>,
    pub target: FusionBasis,
    pub matrix: CMatrix,
}

/// Elementary exchange σ_i of strands `i` and `i + 1` (1-based, counterclockwise),
/// or its inverse.
///
/// In the left-comb basis the pair is first F-moved into a definite channel,
/// multiplied by `R`, and moved back with the leaves swapped.
pub fn braid_generator(
    model: &AnyonModel,
    basis: &FusionBasis,
    position: usize,
    inverse: bool,
) -> Result<BraidOperator> {
    let n = basis.strand_count();
    if position == 0 || position >= n {
        return Err(Error::PositionOutOfRange { position, strands: n });
    }
    if inverse {
        let mut swapped = basis.leaves.clone();
        swapped.swap(position - 1, position);
        let back = FusionBasis::enumerate(model, &swapped, basis.total)?;
        let fwd = braid_generator(model, &back, position, false)?;
        return Ok(BraidOperator {
            source_leaves: basis.leaves.clone(),
            target: back,
            matrix: fwd.matrix.adjoint(),
        });
    }

    let p = position - 1;
    let mut swapped = basis.leaves.clone();
    swapped.swap(p, p + 1);
    let target = FusionBasis::enumerate(model, &swapped, basis.total)?;
    let (lp, lq) = (basis.leaves[p], basis.leaves[p + 1]);
    let sym = model.symbols();
    let r = |c: Charge| sym.r(lp, lq, c).unwrap_or(ZERO);

    let mut matrix = CMatrix::zeros(target.dim(), basis.dim());
    let mut key: Vec<Charge> = Vec::with_capacity(n);
    for (col, tree) in basis.trees.iter().enumerate() {
        let x = &tree.internals;
        if p == 0 {
            key.clear();
            key.extend_from_slice(x);
            key[0] = lq;
            if let Some(row) = target.index_of(&key) {
                matrix[(row, col)] = r(x[1]);
            }
            continue;
        }
        let (left, mid, right) = (x[p - 1], x[p], x[p + 1]);
        let Some(f_in) = sym.f_block(left, lp, lq, right) else {
            continue;
        };
        let f_out = sym.f_block(left, lq, lp, right);
        let Some(r_in) = f_in.row_index(mid) else {
            continue;
        };
        for e_new in model.channels(left, lq) {
            if !model.admissible(e_new, lp, right) {
                continue;
            }
            key.clear();
            key.extend_from_slice(x);
            key[p] = e_new;
            let Some(row) = target.index_of(&key) else {
                continue;
            };
            let f_out = f_out.expect("target tree exists, so the block is admissible");
            let r_out = f_out.row_index(e_new).expect("admissible row");
            let mut amp = ZERO;
            for (c_in, &f) in f_in.cols.iter().enumerate() {
                if let Some(c_out) = f_out.col_index(f) {
                    amp += f_in.matrix[(r_in, c_in)] * r(f) * f_out.matrix[(r_out, c_out)].conj();
                }
            }
            matrix[(row, col)] = amp;
        }
    }
    Ok(BraidOperator {
        source_leaves: basis.leaves.clone(),
        target,
        matrix,
    })
}
