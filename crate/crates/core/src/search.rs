//! Exhaustive braid search.
//!
//! Words are enumerated depth-first in letter order, one exact length at a
//! time, over block-level letters. Only the target's input columns are
//! propagated. A length's subtree can be split by prefix; results combine
//! with [`DepthOutcome::merge`] in prefix order, so any partition gives the
//! same answer.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::braid::{evaluate, exchange_counts, permute_blocks, BraidWord, ExchangeCount, Letter};
use crate::error::{Error, Result};
use crate::fusion::FusionBasis;
use crate::grouping::{composite_braid_generator, Grouping};
use crate::linalg::{CMatrix, C64};
use crate::model::Charge;
use crate::target::SynthesisTarget;

/// Winding-bound pruning keeps a word unless it is worse by more than this.
const PRUNE_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    pub max_length: usize,
    pub tolerance: f64,
    pub phase_tolerance: f64,
    /// Only letters that move the target's mobile block.
    pub weave_only: bool,
    /// Skip words where far-commuting letters appear in decreasing position order.
    pub dedup: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            max_length: 12,
            tolerance: 1e-9,
            phase_tolerance: 1e-9,
            weave_only: true,
            dedup: false,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_length < 1 {
            return Err(Error::Config("max_length must be at least 1".into()));
        }
        if !(self.tolerance > 0.0 && self.phase_tolerance > 0.0) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub letters: Vec<Letter>,
    pub score: f64,
}

/// Scores in the same bucket of this width count as equal when ranking, so
/// rounding noise cannot make a longer, equivalent word win.
pub const SCORE_RESOLUTION: f64 = 1e-12;

fn score_bucket(score: f64) -> i64 {
    if score.is_finite() {
        libm::round(score / SCORE_RESOLUTION) as i64
    } else {
        i64::MAX
    }
}

impl Candidate {
    /// Lower score (to [`SCORE_RESOLUTION`]), then shorter, then
    /// lexicographically smaller.
    pub fn cmp_rank(&self, other: &Self) -> Ordering {
        score_bucket(self.score)
            .cmp(&score_bucket(other.score))
            .then(self.letters.len().cmp(&other.letters.len()))
            .then_with(|| self.letters.cmp(&other.letters))
            .then(self.score.total_cmp(&other.score))
    }
}

fn keep_better(slot: &mut Option<Candidate>, c: Candidate) {
    match slot {
        Some(s) if s.cmp_rank(&c) != Ordering::Greater => {}
        _ => *slot = Some(c),
    }
}

/// Result of enumerating the words of one length (or a prefix subtree of them).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DepthOutcome {
    /// Words of this length that were enumerated.
    pub nodes: u64,
    /// Words whose matrix score was computed.
    pub evaluated: u64,
    pub best: Option<Candidate>,
}

impl DepthOutcome {
    pub fn merge(mut self, other: DepthOutcome) -> Self {
        self.nodes += other.nodes;
        self.evaluated += other.evaluated;
        if let Some(c) = other.best {
            keep_better(&mut self.best, c);
        }
        self
    }
}

struct Move {
    letter: Letter,
    next: usize,
    matrix: CMatrix,
    windings: Vec<(usize, i64)>,
}

struct Arrangement {
    accepting: bool,
    moves: Vec<Move>,
}

/// The graph of reachable block arrangements with their generator matrices.
pub struct SearchSpace<'t> {
    target: &'t SynthesisTarget,
    arrangements: Vec<Arrangement>,
    dedup: bool,
}

impl<'t> SearchSpace<'t> {
    pub fn new(target: &'t SynthesisTarget, config: &SearchConfig) -> Result<Self> {
        let blocks = target.grouping.block_count();
        for &p in &target.positions {
            if p == 0 || p >= blocks {
                return Err(Error::PositionOutOfRange {
                    position: p,
                    strands: blocks,
                });
            }
        }
        let mobile = if config.weave_only { target.mobile } else { None };
        let mut positions = target.positions.clone();
        positions.sort_unstable();
        positions.dedup();

        let block_leaves: Vec<Vec<Charge>> = (0..blocks)
            .map(|b| target.basis.leaves()[target.grouping.block_range(b)].to_vec())
            .collect();
        let mut orders: Vec<Vec<usize>> = vec![(0..blocks).collect()];
        let mut index: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        index.insert(orders[0].clone(), 0);
        let mut arrangements = Vec::new();
        let mut i = 0;
        while i < orders.len() {
            let order = orders[i].clone();
            let leaves: Vec<Charge> = order.iter().flat_map(|&b| block_leaves[b].iter().copied()).collect();
            let sizes: Vec<usize> = order.iter().map(|&b| block_leaves[b].len()).collect();
            let grouping = Grouping::from_sizes(&sizes)?;
            let basis = FusionBasis::enumerate(&target.model, &leaves, target.basis.total())?;
            let mut moves = Vec::new();
            for &p in &positions {
                let (x, y) = (order[p - 1], order[p]);
                if mobile.is_some_and(|m| x != m && y != m) {
                    continue;
                }
                let mut next_order = order.clone();
                next_order.swap(p - 1, p);
                let next = *index.entry(next_order.clone()).or_insert_with(|| {
                    orders.push(next_order);
                    orders.len() - 1
                });
                for exponent in [-1i8, 1] {
                    let op = composite_braid_generator(&target.model, &basis, &grouping, p, exponent < 0)?;
                    let windings = target
                        .windings
                        .iter()
                        .enumerate()
                        .filter(|(_, w)| (w.blocks == (x, y)) || (w.blocks == (y, x)))
                        .map(|(wi, _)| (wi, i64::from(exponent)))
                        .collect();
                    moves.push(Move {
                        letter: Letter::new(p, exponent),
                        next,
                        matrix: op.op.matrix,
                        windings,
                    });
                }
            }
            arrangements.push(Arrangement {
                accepting: target.accepts(&order, &leaves),
                moves,
            });
            i += 1;
        }
        Ok(Self {
            target,
            arrangements,
            dedup: config.dedup,
        })
    }

    pub fn target(&self) -> &SynthesisTarget {
        self.target
    }

    pub fn arrangement_count(&self) -> usize {
        self.arrangements.len()
    }

    fn allowed(&self, last: Option<Letter>, letter: Letter) -> bool {
        match last {
            None => true,
            Some(l) => l != letter.inverse() && !(self.dedup && l.position >= letter.position + 2),
        }
    }

    /// All admissible words of exactly `depth` letters, in search order.
    pub fn prefixes(&self, depth: usize) -> Vec<Vec<Letter>> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        self.collect_prefixes(0, depth, &mut path, &mut out);
        out
    }

    fn collect_prefixes(&self, state: usize, left: usize, path: &mut Vec<Letter>, out: &mut Vec<Vec<Letter>>) {
        if left == 0 {
            out.push(path.clone());
            return;
        }
        for mv in &self.arrangements[state].moves {
            if self.allowed(path.last().copied(), mv.letter) {
                path.push(mv.letter);
                self.collect_prefixes(mv.next, left - 1, path, out);
                path.pop();
            }
        }
    }

    /// Enumerates the words of exactly `length` letters that start with
    /// `prefix`. Words whose winding phases alone already score worse than
    /// `incumbent` are counted but not evaluated.
    pub fn explore(&self, length: usize, prefix: &[Letter], incumbent: f64) -> DepthOutcome {
        let mut out = DepthOutcome::default();
        if prefix.len() > length {
            return out;
        }
        let mut state = 0;
        let mut images = self.target.inputs.clone();
        let mut scratch = CMatrix::zeros(0, 0);
        let mut counts = vec![0i64; self.target.windings.len()];
        let mut last = None;
        for &letter in prefix {
            let Some(mv) = self.arrangements[state].moves.iter().find(|m| m.letter == letter) else {
                return out;
            };
            if !self.allowed(last, letter) {
                return out;
            }
            mv.matrix.mul_into(&images, &mut scratch);
            core::mem::swap(&mut images, &mut scratch);
            for &(w, d) in &mv.windings {
                counts[w] += d;
            }
            state = mv.next;
            last = Some(letter);
        }
        let left = length - prefix.len();
        let mut buffers: Vec<CMatrix> = (0..left).map(|_| CMatrix::zeros(0, 0)).collect();
        let mut path = prefix.to_vec();
        self.descend(
            state,
            left,
            &images,
            &mut buffers,
            &mut path,
            &mut counts,
            incumbent,
            &mut out,
        );
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn descend(
        &self,
        state: usize,
        left: usize,
        images: &CMatrix,
        buffers: &mut [CMatrix],
        path: &mut Vec<Letter>,
        counts: &mut [i64],
        incumbent: f64,
        out: &mut DepthOutcome,
    ) {
        let arr = &self.arrangements[state];
        if left == 0 {
            out.nodes += 1;
            if !arr.accepting || self.target.winding_bound(counts) > incumbent + PRUNE_MARGIN {
                return;
            }
            out.evaluated += 1;
            let score = self.target.score(images);
            keep_better(
                &mut out.best,
                Candidate {
                    letters: path.clone(),
                    score,
                },
            );
            return;
        }
        let (buf, rest) = buffers.split_first_mut().expect("one buffer per level");
        for mv in &arr.moves {
            if !self.allowed(path.last().copied(), mv.letter) {
                continue;
            }
            mv.matrix.mul_into(images, buf);
            for &(w, d) in &mv.windings {
                counts[w] += d;
            }
            path.push(mv.letter);
            self.descend(mv.next, left - 1, buf, rest, path, counts, incumbent, out);
            path.pop();
            for &(w, d) in &mv.windings {
                counts[w] -= d;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub length: usize,
    /// Best score over all words up to this length (infinite if none qualified).
    pub best_distance: f64,
    pub nodes_explored: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisResult {
    pub target: String,
    pub braid: BraidWord,
    pub distance: f64,
    pub leakage: f64,
    pub sector_phases: BTreeMap<String, C64>,
    pub exchange_counts: BTreeMap<(String, String), ExchangeCount>,
    pub converged: bool,
    pub curve: Vec<CurvePoint>,
}

/// Sequential search.
pub fn search(target: &SynthesisTarget, config: &SearchConfig) -> Result<SynthesisResult> {
    search_with(target, config, |space, length, incumbent| {
        Ok(space.explore(length, &[], incumbent))
    })
}

/// Iterative deepening with a caller-supplied way of exploring one length,
/// e.g. splitting it over prefixes on several threads.
///
/// Stops after the first length whose best word scores within tolerance; the
/// result counts as converged only if its fixed sector phases are also within
/// the phase tolerance.
pub fn search_with<F>(target: &SynthesisTarget, config: &SearchConfig, mut explore: F) -> Result<SynthesisResult>
where
    F: FnMut(&SearchSpace<'_>, usize, f64) -> Result<DepthOutcome>,
{
    config.validate()?;
    let space = SearchSpace::new(target, config)?;
    let mut best: Option<Candidate> = None;
    let mut curve = Vec::with_capacity(config.max_length + 1);
    let mut converged = false;
    for length in 0..=config.max_length {
        let incumbent = best.as_ref().map_or(f64::INFINITY, |c| c.score);
        let outcome = explore(&space, length, incumbent)?;
        if let Some(c) = outcome.best {
            keep_better(&mut best, c);
        }
        let best_distance = best.as_ref().map_or(f64::INFINITY, |c| c.score);
        curve.push(CurvePoint {
            length,
            best_distance,
            nodes_explored: outcome.nodes,
        });
        if best_distance <= config.tolerance {
            converged = true;
            break;
        }
    }
    let best = best.ok_or_else(|| {
        Error::Target("no braid within the length budget returns the blocks to the required arrangement".into())
    })?;
    let word = BraidWord::new(target.block_count(), best.letters)?;
    let mut result = describe(target, &word)?;
    result.converged = converged && target.fixed_phase_deviation(&result.sector_phases) < config.phase_tolerance;
    result.curve = curve;
    Ok(result)
}

/// Evaluates `word` against `target` from scratch.
pub fn describe(target: &SynthesisTarget, word: &BraidWord) -> Result<SynthesisResult> {
    let eval = evaluate(&target.model, &target.basis, &target.grouping, word)?;
    let order = word.permutation();
    let leaves = eval.op.target.leaves();
    if !target.accepts(&order, leaves) {
        return Err(Error::Target(alloc::format!(
            "braid {word} leaves the blocks in order {order:?}, not the required arrangement"
        )));
    }
    let a = target.assess(&eval.op.matrix)?;
    Ok(SynthesisResult {
        target: target.id.clone(),
        braid: word.clone(),
        distance: a.distance,
        leakage: a.leakage,
        sector_phases: a.sector_phases,
        exchange_counts: named_exchange_counts(target, word)?,
        converged: a.distance <= SearchConfig::default().tolerance,
        curve: Vec::new(),
    })
}

pub fn named_exchange_counts(
    target: &SynthesisTarget,
    word: &BraidWord,
) -> Result<BTreeMap<(String, String), ExchangeCount>> {
    let owners: Vec<usize> = (0..target.block_count()).collect();
    Ok(exchange_counts(word, &owners)?
        .into_iter()
        .map(|((x, y), c)| ((target.block_names[x].clone(), target.block_names[y].clone()), c))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Verification {
    pub distance: f64,
    pub leakage: f64,
    pub max_deviation: f64,
    pub matches: bool,
}

/// Recomputes a result's distance and leakage from its braid.
pub fn verify(target: &SynthesisTarget, result: &SynthesisResult, tol: f64) -> Result<Verification> {
    if result.target != target.id {
        return Err(Error::Target(alloc::format!(
            "result is for target {}, not {}",
            result.target,
            target.id
        )));
    }
    let fresh = describe(target, &result.braid)?;
    let dev = (fresh.distance - result.distance)
        .abs()
        .max((fresh.leakage - result.leakage).abs());
    Ok(Verification {
        distance: fresh.distance,
        leakage: fresh.leakage,
        max_deviation: dev,
        matches: dev <= tol,
    })
}

/// Leaf charges of `target` after the blocks are rearranged by `word`.
pub fn final_leaves(target: &SynthesisTarget, word: &BraidWord) -> Vec<Charge> {
    let mut leaves = target.basis.leaves().to_vec();
    let mut grouping = target.grouping.clone();
    for l in word.letters() {
        permute_blocks(&mut leaves, &grouping, l.position);
        grouping = grouping.exchanged(l.position);
    }
    leaves
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::SingleQubitScheme;
    use crate::model::AnyonModel;
    use crate::target::{make_target_p, make_target_unitary};

    #[test]
    fn identity_target_gives_the_empty_word() {
        let m = AnyonModel::new(3).unwrap();
        let t = make_target_unitary(&m, "I", SingleQubitScheme::ThreeAnyon, CMatrix::identity(2)).unwrap();
        let r = search(&t, &SearchConfig::default()).unwrap();
        assert!(r.braid.is_empty());
        assert_eq!(r.distance, 0.0);
        assert!(r.converged);
        assert_eq!(r.curve.len(), 1);
    }

    #[test]
    fn full_search_counts_freely_reduced_words() {
        let m = AnyonModel::new(3).unwrap();
        let t = make_target_unitary(&m, "I", SingleQubitScheme::FourAnyon, CMatrix::identity(2)).unwrap();
        let space = SearchSpace::new(
            &t,
            &SearchConfig {
                weave_only: false,
                ..Default::default()
            },
        )
        .unwrap();
        for len in 1..=6u32 {
            let n = space.explore(len as usize, &[], f64::INFINITY).nodes;
            assert_eq!(n, 6 * 5u64.pow(len - 1));
        }
    }

    #[test]
    fn weave_counts() {
        let m = AnyonModel::new(3).unwrap();
        let t = make_target_p(&m).unwrap();
        let space = SearchSpace::new(&t, &SearchConfig::default()).unwrap();
        assert_eq!(space.arrangement_count(), 3);
        for len in 1..=10u32 {
            let n = space.explore(len as usize, &[], f64::INFINITY).nodes;
            assert_eq!(n, 2 * 3u64.pow(len / 2), "length {len}");
        }
    }

    #[test]
    fn prefix_split_matches_whole_tree() {
        let m = AnyonModel::new(3).unwrap();
        let t = make_target_unitary(&m, "NOT", SingleQubitScheme::FourAnyon, crate::target::pauli_x()).unwrap();
        let space = SearchSpace::new(
            &t,
            &SearchConfig {
                weave_only: false,
                ..Default::default()
            },
        )
        .unwrap();
        let whole = space.explore(6, &[], f64::INFINITY);
        let split = space
            .prefixes(2)
            .iter()
            .map(|p| space.explore(6, p, f64::INFINITY))
            .fold(DepthOutcome::default(), DepthOutcome::merge);
        assert_eq!(whole, split);
    }

    #[test]
    fn results_reverify() {
        let m = AnyonModel::new(3).unwrap();
        let t = make_target_p(&m).unwrap();
        let r = search(
            &t,
            &SearchConfig {
                max_length: 8,
                ..Default::default()
            },
        )
        .unwrap();
        let v = verify(&t, &r, 1e-12).unwrap();
        assert!(v.matches, "{v:?}");
        let last = r.curve.last().unwrap();
        assert!((last.best_distance - r.distance).abs() < 1e-12);
    }

    #[test]
    fn bad_configs_are_rejected() {
        let m = AnyonModel::new(3).unwrap();
        let t = make_target_p(&m).unwrap();
        for c in [
            SearchConfig {
                max_length: 0,
                ..Default::default()
            },
            SearchConfig {
                tolerance: 0.0,
                ..Default::default()
            },
            SearchConfig {
                phase_tolerance: -1.0,
                ..Default::default()
            },
        ] {
            assert!(matches!(search(&t, &c), Err(Error::Config(_))));
        }
    }
}
