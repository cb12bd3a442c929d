//! Composite anyons: contiguous blocks of strands treated as single objects.
//!
//! A [`GroupedBasis`] labels states by the charge and internal left-comb tree
//! of every block plus a coarse left-comb tree over the block charges. Its
//! isometry into the fine left-comb basis is assembled from F-moves.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use crate::error::{Error, Result};
use crate::fusion::{braid_generator, BraidOperator, FusionBasis};
use crate::linalg::{CMatrix, C64};
use crate::model::{AnyonModel, Charge};

/// Ordered partition of the strands into contiguous blocks.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Grouping {
    sizes: Vec<usize>,
    block_charges: Vec<Option<Charge>>,
}

impl Grouping {
    pub fn from_sizes(sizes: &[usize]) -> Result<Self> {
        if sizes.is_empty() || sizes.contains(&0) {
            return Err(Error::InvalidGrouping("blocks must be nonempty".into()));
        }
        Ok(Self {
            sizes: sizes.to_vec(),
            block_charges: vec![None; sizes.len()],
        })
    }

    /// One block per strand.
    pub fn singletons(strands: usize) -> Self {
        Self {
            sizes: vec![1; strands],
            block_charges: vec![None; strands],
        }
    }

    /// Builds a grouping from explicit leaf-index lists, which must be
    /// contiguous, in order, disjoint and cover `0..strands`.
    pub fn from_blocks(blocks: &[Vec<usize>], strands: usize) -> Result<Self> {
        let mut next = 0;
        let mut sizes = Vec::with_capacity(blocks.len());
        for b in blocks {
            if b.is_empty() {
                return Err(Error::InvalidGrouping("empty block".into()));
            }
            for (off, &leaf) in b.iter().enumerate() {
                if leaf != next + off {
                    return Err(Error::InvalidGrouping(format!(
                        "block {b:?} is not the contiguous run starting at leaf {next}"
                    )));
                }
            }
            next += b.len();
            sizes.push(b.len());
        }
        if next != strands {
            return Err(Error::InvalidGrouping(format!(
                "blocks cover {next} leaves, basis has {strands}"
            )));
        }
        Self::from_sizes(&sizes)
    }

    /// Restricts block `block` to a definite charge sector.
    pub fn with_block_charge(mut self, block: usize, charge: Charge) -> Self {
        self.block_charges[block] = Some(charge);
        self
    }

    pub fn block_count(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn block_charges(&self) -> &[Option<Charge>] {
        &self.block_charges
    }

    pub fn strand_count(&self) -> usize {
        self.sizes.iter().sum()
    }

    pub fn block_range(&self, block: usize) -> Range<usize> {
        let start: usize = self.sizes[..block].iter().sum();
        start..start + self.sizes[block]
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        (0..self.block_count()).map(|b| self.block_range(b).collect()).collect()
    }

    /// Block index of every strand.
    pub fn strand_owners(&self) -> Vec<usize> {
        self.sizes
            .iter()
            .enumerate()
            .flat_map(|(b, &s)| core::iter::repeat_n(b, s))
            .collect()
    }

    /// The grouping after blocks `position - 1` and `position` (1-based) trade places.
    pub fn exchanged(&self, position: usize) -> Self {
        let mut g = self.clone();
        g.sizes.swap(position - 1, position);
        g.block_charges.swap(position - 1, position);
        g
    }

    /// 1-based elementary positions (with inverse flags) whose product is the
    /// exchange of blocks `position - 1` and `position`.
    ///
    /// Every strand of the right block crosses every strand of the left one,
    /// all with the same orientation, and each block keeps its internal order.
    pub fn exchange_letters(&self, position: usize, inverse: bool) -> Result<Vec<(usize, bool)>> {
        if position == 0 || position >= self.block_count() {
            return Err(Error::PositionOutOfRange {
                position,
                strands: self.block_count(),
            });
        }
        // The clockwise exchange undoes the counterclockwise exchange of the
        // swapped blocks.
        let (m, n) = if inverse {
            (self.sizes[position], self.sizes[position - 1])
        } else {
            (self.sizes[position - 1], self.sizes[position])
        };
        let s = self.block_range(position - 1).start;
        let mut letters = Vec::with_capacity(m * n);
        for j in 0..n {
            for g in (s + j..s + j + m).rev() {
                letters.push((g + 1, false));
            }
        }
        if inverse {
            letters.reverse();
            for l in &mut letters {
                l.1 = true;
            }
        }
        Ok(letters)
    }
}

/// A basis state of the grouped description.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct GroupedTree {
    pub block_charges: Vec<Charge>,
    /// Left-comb internal charges inside each block.
    pub block_internals: Vec<Vec<Charge>>,
    /// Left-comb internal charges over the block charges.
    pub coarse_internals: Vec<Charge>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupedBasis {
    fine: FusionBasis,
    grouping: Grouping,
    trees: Vec<GroupedTree>,
    /// Fine-dimension × grouped-dimension; column j is grouped tree j.
    isometry: CMatrix,
}

impl GroupedBasis {
    pub fn fine(&self) -> &FusionBasis {
        &self.fine
    }

    pub fn grouping(&self) -> &Grouping {
        &self.grouping
    }

    pub fn trees(&self) -> &[GroupedTree] {
        &self.trees
    }

    pub fn dim(&self) -> usize {
        self.trees.len()
    }

    pub fn isometry(&self) -> &CMatrix {
        &self.isometry
    }

    /// Fine-basis coordinates of grouped tree `index`.
    pub fn vector(&self, index: usize) -> Vec<C64> {
        self.isometry.column(index)
    }

    /// Change of basis from fine coordinates to grouped coordinates.
    pub fn to_grouped(&self) -> CMatrix {
        self.isometry.adjoint()
    }

    pub fn find(&self, block_charges: &[Charge], coarse_internals: &[Charge]) -> Option<usize> {
        self.trees
            .iter()
            .position(|t| t.block_charges == block_charges && t.coarse_internals == coarse_internals)
    }

    /// Grouped tree indices for every block-charge assignment.
    pub fn sectors(&self) -> BTreeMap<Vec<Charge>, Vec<usize>> {
        let mut out: BTreeMap<Vec<Charge>, Vec<usize>> = BTreeMap::new();
        for (i, t) in self.trees.iter().enumerate() {
            out.entry(t.block_charges.clone()).or_default().push(i);
        }
        out
    }
}

/// Builds the grouped basis of `basis` under `grouping`.
///
/// Without definite block charges the isometry is square and unitary; with
/// them it spans the chosen sectors only.
pub fn regroup(model: &AnyonModel, basis: &FusionBasis, grouping: &Grouping) -> Result<GroupedBasis> {
    if grouping.strand_count() != basis.strand_count() {
        return Err(Error::InvalidGrouping(format!(
            "grouping covers {} strands, basis has {}",
            grouping.strand_count(),
            basis.strand_count()
        )));
    }
    let leaves = basis.leaves();
    let block_states: Vec<Vec<Vec<Charge>>> = (0..grouping.block_count())
        .map(|b| {
            let r = grouping.block_range(b);
            let mut states = Vec::new();
            for total in model.charges() {
                if grouping.block_charges[b].is_some_and(|c| c != total) {
                    continue;
                }
                let sub = FusionBasis::enumerate(model, &leaves[r.clone()], total)?;
                states.extend(sub.trees().iter().map(|t| t.internals.clone()));
            }
            Ok(states)
        })
        .collect::<Result<_>>()?;

    let mut trees = Vec::new();
    let mut chosen = Vec::new();
    let mut coarse = Vec::new();
    collect_trees(
        model,
        &block_states,
        basis.total(),
        &mut chosen,
        &mut coarse,
        &mut trees,
    );
    trees.sort();

    let mut columns = Vec::with_capacity(trees.len());
    for t in &trees {
        columns.push(fine_vector(model, basis, grouping, t)?);
    }
    let isometry = CMatrix::from_columns(basis.dim(), &columns);
    Ok(GroupedBasis {
        fine: basis.clone(),
        grouping: grouping.clone(),
        trees,
        isometry,
    })
}

fn collect_trees(
    model: &AnyonModel,
    block_states: &[Vec<Vec<Charge>>],
    total: Charge,
    chosen: &mut Vec<Vec<Charge>>,
    coarse: &mut Vec<Charge>,
    out: &mut Vec<GroupedTree>,
) {
    let j = chosen.len();
    if j == block_states.len() {
        if coarse.last() == Some(&total) {
            out.push(GroupedTree {
                block_charges: chosen.iter().map(|s| *s.last().unwrap()).collect(),
                block_internals: chosen.clone(),
                coarse_internals: coarse.clone(),
            });
        }
        return;
    }
    for state in &block_states[j] {
        let c = *state.last().unwrap();
        let next: Vec<Charge> = match coarse.last() {
            None => vec![c],
            Some(&prev) => model.channels(prev, c).collect(),
        };
        chosen.push(state.clone());
        for y in next {
            coarse.push(y);
            collect_trees(model, block_states, total, chosen, coarse, out);
            coarse.pop();
        }
        chosen.pop();
    }
}

/// Fine left-comb coordinates of one grouped tree.
fn fine_vector(model: &AnyonModel, basis: &FusionBasis, grouping: &Grouping, tree: &GroupedTree) -> Result<Vec<C64>> {
    // Partial left-comb expansions: fine internals so far -> amplitude.
    let mut partial: Vec<(Vec<Charge>, C64)> = vec![(tree.block_internals[0].clone(), C64::new(1.0, 0.0))];
    for b in 1..grouping.block_count() {
        let leaves = &basis.leaves()[grouping.block_range(b)];
        let x = tree.coarse_internals[b - 1];
        let y = tree.coarse_internals[b];
        let expansion = absorb(model, x, leaves, &tree.block_internals[b], y);
        let mut next = Vec::with_capacity(partial.len() * expansion.len());
        for (prefix, amp) in &partial {
            for (tail, c) in &expansion {
                let mut v = prefix.clone();
                v.extend_from_slice(tail);
                next.push((v, amp * c));
            }
        }
        partial = next;
    }
    let mut out = vec![C64::new(0.0, 0.0); basis.dim()];
    for (internals, amp) in partial {
        let idx = basis.index_of(&internals).ok_or_else(|| {
            Error::InvalidGrouping(format!("expansion produced a tree outside the basis: {internals:?}"))
        })?;
        out[idx] += amp;
    }
    Ok(out)
}

/// Expresses `(X Z^{c})^{y}`, where `Z` is the left comb over `leaves` with
/// internals `z` (so `c = z.last()`), as left-comb continuations of a
/// prefix of charge `x`: one `(w_0, ..., w_{m-1} = y)` list per term.
///
/// Peels the last leaf off `Z` with an inverse F-move,
/// `|X (Z' l)_c; y⟩ = Σ_w conj([F^{X Z' l}_y]_{wc}) |(X Z')_w l; y⟩`,
/// and recurses on `(X Z')_w`.
fn absorb(model: &AnyonModel, x: Charge, leaves: &[Charge], z: &[Charge], y: Charge) -> Vec<(Vec<Charge>, C64)> {
    let m = z.len();
    if m == 1 {
        return vec![(vec![y], C64::new(1.0, 0.0))];
    }
    let (z_head, c, l) = (z[m - 2], z[m - 1], leaves[m - 1]);
    let Some(blk) = model.symbols().f_block(x, z_head, l, y) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for &w in &blk.rows {
        let coeff = blk.entry(w, c).conj();
        if coeff.norm() == 0.0 {
            continue;
        }
        for (mut head, amp) in absorb(model, x, &leaves[..m - 1], &z[..m - 1], w) {
            head.push(y);
            out.push((head, amp * coeff));
        }
    }
    out
}

/// Exchange of two whole blocks, as a product of elementary exchanges.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeOperator {
    pub op: BraidOperator,
    /// Grouping of the target basis.
    pub grouping: Grouping,
}

/// Exchange of blocks `position - 1` and `position` (1-based block position).
///
/// With singleton blocks this is exactly [`braid_generator`].
pub fn composite_braid_generator(
    model: &AnyonModel,
    basis: &FusionBasis,
    grouping: &Grouping,
    position: usize,
    inverse: bool,
) -> Result<CompositeOperator> {
    if grouping.strand_count() != basis.strand_count() {
        return Err(Error::InvalidGrouping("grouping does not match basis".into()));
    }
    let letters = grouping.exchange_letters(position, inverse)?;
    let mut iter = letters.into_iter();
    let (p0, inv0) = iter.next().expect("blocks are nonempty");
    let mut acc = braid_generator(model, basis, p0, inv0)?;
    for (p, inv) in iter {
        let step = braid_generator(model, &acc.target, p, inv)?;
        acc = BraidOperator {
            source_leaves: acc.source_leaves,
            target: step.target,
            matrix: &step.matrix * &acc.matrix,
        };
    }
    Ok(CompositeOperator {
        op: acc,
        grouping: grouping.exchanged(position),
    })
}
