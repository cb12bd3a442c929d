//! Braid words and their matrix representations.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::fusion::{BraidOperator, FusionBasis};
use crate::grouping::{composite_braid_generator, Grouping};
use crate::linalg::{phase_aligned_residual, CMatrix};
use crate::model::{AnyonModel, Charge};

/// σ_position^exponent with exponent ±1. Positions are 1-based.
///
/// Letters order by position first, then exponent (−1 before +1); this is the
/// lexicographic order used to break ties between equally good braids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub position: usize,
    pub exponent: i8,
}

impl Letter {
    pub const fn new(position: usize, exponent: i8) -> Self {
        Self { position, exponent }
    }

    pub const fn inverse(self) -> Self {
        Self {
            position: self.position,
            exponent: -self.exponent,
        }
    }

    pub fn is_inverse(self) -> bool {
        self.exponent < 0
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent > 0 {
            write!(f, "s{}", self.position)
        } else {
            write!(f, "s{}'", self.position)
        }
    }
}

/// A freely reduced braid word on `strand_count` strands (or blocks).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BraidWord {
    strand_count: usize,
    letters: Vec<Letter>,
}

impl BraidWord {
    pub fn empty(strand_count: usize) -> Self {
        Self {
            strand_count,
            letters: Vec::new(),
        }
    }

    /// Validates positions and exponents, then freely reduces.
    pub fn new(strand_count: usize, letters: impl IntoIterator<Item = Letter>) -> Result<Self> {
        let mut w = Self::empty(strand_count);
        for l in letters {
            w.push(l)?;
        }
        Ok(w)
    }

    /// Appends a letter, cancelling it against a trailing inverse.
    pub fn push(&mut self, letter: Letter) -> Result<()> {
        if letter.position == 0 || letter.position >= self.strand_count {
            return Err(Error::PositionOutOfRange {
                position: letter.position,
                strands: self.strand_count,
            });
        }
        if letter.exponent != 1 && letter.exponent != -1 {
            return Err(Error::Config("braid exponents must be +1 or -1".into()));
        }
        if self.letters.last() == Some(&letter.inverse()) {
            self.letters.pop();
        } else {
            self.letters.push(letter);
        }
        Ok(())
    }

    pub fn strand_count(&self) -> usize {
        self.strand_count
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Self {
        Self {
            strand_count: self.strand_count,
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// `self` followed by `other`.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        if self.strand_count != other.strand_count {
            return Err(Error::DimensionMismatch {
                expected: self.strand_count,
                found: other.strand_count,
            });
        }
        let mut w = self.clone();
        for &l in &other.letters {
            w.push(l)?;
        }
        Ok(w)
    }

    /// Permutation induced on strands: `result[slot]` is the original index
    /// of the strand that ends up in `slot`.
    pub fn permutation(&self) -> Vec<usize> {
        let mut at: Vec<usize> = (0..self.strand_count).collect();
        for l in &self.letters {
            at.swap(l.position - 1, l.position);
        }
        at
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "e");
        }
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Result of evaluating a word whose letters exchange whole blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    /// Matrix from the starting fine basis to `op.target`.
    pub op: BraidOperator,
    /// Block layout after the braid.
    pub grouping: Grouping,
}

/// Ordered product of (composite) generator matrices: letter `j` is applied
/// after letter `j - 1`, so the result is `G_n ⋯ G_1`.
///
/// Positions refer to block positions of the current grouping, which is
/// tracked as blocks move.
pub fn evaluate(model: &AnyonModel, basis: &FusionBasis, grouping: &Grouping, word: &BraidWord) -> Result<Evaluation> {
    if word.strand_count() != grouping.block_count() {
        return Err(Error::DimensionMismatch {
            expected: grouping.block_count(),
            found: word.strand_count(),
        });
    }
    let mut cache: BTreeMap<(Vec<Charge>, Vec<usize>, Letter), CMatrix> = BTreeMap::new();
    let mut current = basis.clone();
    let mut layout = grouping.clone();
    let mut acc = CMatrix::identity(basis.dim());
    let mut scratch = CMatrix::zeros(0, 0);
    for &letter in word.letters() {
        let key = (current.leaves().to_vec(), layout.sizes().to_vec(), letter);
        let step = match cache.get(&key) {
            Some(m) => {
                let mut next_leaves = current.leaves().to_vec();
                permute_blocks(&mut next_leaves, &layout, letter.position);
                let next = FusionBasis::enumerate(model, &next_leaves, basis.total())?;
                (m.clone(), next)
            }
            None => {
                let c = composite_braid_generator(model, &current, &layout, letter.position, letter.is_inverse())?;
                cache.insert(key, c.op.matrix.clone());
                (c.op.matrix, c.op.target)
            }
        };
        step.0.mul_into(&acc, &mut scratch);
        core::mem::swap(&mut acc, &mut scratch);
        current = step.1;
        layout = layout.exchanged(letter.position);
    }
    Ok(Evaluation {
        op: BraidOperator {
            source_leaves: basis.leaves().to_vec(),
            target: current,
            matrix: acc,
        },
        grouping: layout,
    })
}

/// Rewrites a block-level word as elementary exchanges of single strands.
pub fn expand(word: &BraidWord, grouping: &Grouping) -> Result<BraidWord> {
    if word.strand_count() != grouping.block_count() {
        return Err(Error::DimensionMismatch {
            expected: grouping.block_count(),
            found: word.strand_count(),
        });
    }
    let mut layout = grouping.clone();
    let mut out = BraidWord::empty(grouping.strand_count());
    for l in word.letters() {
        for (p, inverse) in layout.exchange_letters(l.position, l.is_inverse())? {
            out.push(Letter::new(p, if inverse { -1 } else { 1 }))?;
        }
        layout = layout.exchanged(l.position);
    }
    Ok(out)
}

/// Leaf charges after blocks `position - 1` and `position` trade places.
pub(crate) fn permute_blocks(leaves: &mut [Charge], grouping: &Grouping, position: usize) {
    let left = grouping.block_range(position - 1);
    let right = grouping.block_range(position);
    leaves[left.start..right.end].rotate_left(left.len());
}

/// Global-phase-invariant distance `sqrt(max(0, 1 - |tr(U†V)| / dim))` between
/// unitaries, computed as `min_φ ‖U - e^{iφ}V‖_F / sqrt(2 dim)`.
pub fn distance(u: &CMatrix, v: &CMatrix) -> Result<f64> {
    if u.rows() != v.rows() || u.cols() != v.cols() {
        return Err(Error::DimensionMismatch {
            expected: u.rows(),
            found: v.rows(),
        });
    }
    let dim = u.cols().max(1) as f64;
    Ok(phase_aligned_residual(u, v) / libm::sqrt(2.0 * dim))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ExchangeCount {
    /// Sum of exponents.
    pub signed: i64,
    /// Number of letters.
    pub total: u64,
}

/// Exchanges between every pair of blocks. `owners[i]` is the block of the
/// object initially at slot `i`; exchanges inside one block are not counted.
pub fn exchange_counts(word: &BraidWord, owners: &[usize]) -> Result<BTreeMap<(usize, usize), ExchangeCount>> {
    if owners.len() != word.strand_count() {
        return Err(Error::DimensionMismatch {
            expected: word.strand_count(),
            found: owners.len(),
        });
    }
    let mut at = owners.to_vec();
    let mut out: BTreeMap<(usize, usize), ExchangeCount> = BTreeMap::new();
    for l in word.letters() {
        let (x, y) = (at[l.position - 1], at[l.position]);
        if x != y {
            let e = out.entry((x.min(y), x.max(y))).or_default();
            e.signed += i64::from(l.exponent);
            e.total += 1;
        }
        at.swap(l.position - 1, l.position);
    }
    Ok(out)
}

/// Largest Yang–Baxter or far-commutativity residual over every leaf
/// sequence of 2..=`max_strands` strands drawn from `charges`, every total
/// charge and both orientations. Also returns the number of relations checked.
pub fn braid_relation_residual(model: &AnyonModel, max_strands: usize, charges: &[Charge]) -> Result<(f64, usize)> {
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for n in 2..=max_strands {
        let mut digits = vec![0usize; n];
        loop {
            let leaves: Vec<Charge> = digits.iter().map(|&d| charges[d]).collect();
            for total in model.charges() {
                let basis = FusionBasis::enumerate(model, &leaves, total)?;
                if basis.dim() == 0 {
                    continue;
                }
                let singletons = Grouping::singletons(n);
                let mut relation = |lhs: &[Letter], rhs: &[Letter]| -> Result<()> {
                    let l = evaluate(model, &basis, &singletons, &BraidWord::new(n, lhs.iter().copied())?)?;
                    let r = evaluate(model, &basis, &singletons, &BraidWord::new(n, rhs.iter().copied())?)?;
                    if l.op.target.leaves() != r.op.target.leaves() {
                        worst = f64::INFINITY;
                    } else {
                        worst = worst.max(l.op.matrix.sub(&r.op.matrix).frobenius_norm());
                    }
                    checked += 1;
                    Ok(())
                };
                for i in 1..n {
                    for e in [1, -1] {
                        let a = Letter::new(i, e);
                        if i + 1 < n {
                            let b = Letter::new(i + 1, e);
                            relation(&[a, b, a], &[b, a, b])?;
                        }
                        for j in i + 2..n {
                            let b = Letter::new(j, e);
                            relation(&[a, b], &[b, a])?;
                        }
                    }
                }
            }
            let Some(d) = digits.iter().position(|&d| d + 1 < charges.len()) else {
                break;
            };
            digits[d] += 1;
            digits[..d].fill(0);
        }
    }
    Ok((worst, checked))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn braid_relations_hold_for_small_systems() {
        let m = AnyonModel::new(3).unwrap();
        let (worst, checked) = braid_relation_residual(&m, 4, &[Charge::HALF, Charge::ONE]).unwrap();
        assert!(checked > 100);
        assert!(worst < 1e-10);
    }

    #[test]
    fn words_are_freely_reduced() {
        let w = BraidWord::new(
            3,
            [
                Letter::new(1, 1),
                Letter::new(2, 1),
                Letter::new(2, -1),
                Letter::new(1, 1),
            ],
        )
        .unwrap();
        assert_eq!(w.letters(), &[Letter::new(1, 1), Letter::new(1, 1)]);
        assert!(BraidWord::new(3, [Letter::new(3, 1)]).is_err());
        assert!(BraidWord::new(3, [Letter::new(1, 2)]).is_err());
    }

    #[test]
    fn word_times_inverse_is_empty() {
        let w = BraidWord::new(4, [Letter::new(1, 1), Letter::new(3, -1), Letter::new(2, 1)]).unwrap();
        assert!(w.concat(&w.inverse()).unwrap().is_empty());
    }

    #[test]
    fn empty_word_is_the_identity() {
        let m = AnyonModel::new(3).unwrap();
        let b = FusionBasis::enumerate(&m, &[Charge::HALF; 4], Charge::VACUUM).unwrap();
        let e = evaluate(&m, &b, &Grouping::singletons(4), &BraidWord::empty(4)).unwrap();
        assert_eq!(e.op.matrix, CMatrix::identity(2));
    }

    #[test]
    fn distance_examples() {
        let x = CMatrix::from_row_major(
            2,
            2,
            vec![
                num_complex::Complex64::new(0.0, 0.0),
                num_complex::Complex64::new(1.0, 0.0),
                num_complex::Complex64::new(1.0, 0.0),
                num_complex::Complex64::new(0.0, 0.0),
            ],
        )
        .unwrap();
        let id = CMatrix::identity(2);
        assert_eq!(distance(&id, &id).unwrap(), 0.0);
        assert!((distance(&id, &x).unwrap() - 1.0).abs() < 1e-15);
        let phased = x.scale(num_complex::Complex64::from_polar(1.0, 0.7));
        assert!(distance(&x, &phased).unwrap() < 1e-15);
        assert!(distance(&id, &CMatrix::identity(3)).is_err());
    }

    #[test]
    fn expansion_matches_block_evaluation() {
        let m = AnyonModel::new(3).unwrap();
        let b = FusionBasis::enumerate(&m, &[Charge::HALF; 6], Charge::VACUUM).unwrap();
        let g = Grouping::from_sizes(&[1, 2, 2, 1]).unwrap();
        let w = BraidWord::new(
            4,
            [
                Letter::new(1, 1),
                Letter::new(2, -1),
                Letter::new(3, 1),
                Letter::new(1, -1),
            ],
        )
        .unwrap();
        let fine = expand(&w, &g).unwrap();
        assert_eq!(fine.len(), 2 + 2 + 1 + 4);
        let coarse = evaluate(&m, &b, &g, &w).unwrap();
        let direct = evaluate(&m, &b, &Grouping::singletons(6), &fine).unwrap();
        assert!(coarse.op.matrix.max_abs_diff(&direct.op.matrix) < 1e-12);
    }

    #[test]
    fn counting_block_exchanges() {
        let w = BraidWord::new(3, [Letter::new(1, 1), Letter::new(1, 1)]).unwrap();
        let c = exchange_counts(&w, &[0, 1, 2]).unwrap();
        assert_eq!(c[&(0, 1)], ExchangeCount { signed: 2, total: 2 });
        assert!(exchange_counts(&BraidWord::empty(3), &[0, 1, 2]).unwrap().is_empty());
        // Exchanges inside a block are ignored.
        let c = exchange_counts(&w, &[0, 0, 1]).unwrap();
        assert!(c.is_empty());
    }
}
