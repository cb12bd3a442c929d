//! Iterative-deepening search spread over threads.
//!
//! Each length is split into prefix subtrees that workers claim from a shared
//! counter. Subtree outcomes are merged with the search's total order on
//! candidates, so the answer does not depend on the worker count or on which
//! worker finished first.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use anyonforge_core::search::{search_with, DepthOutcome, SearchConfig, SearchSpace, SynthesisResult};
use anyonforge_core::target::SynthesisTarget;

use crate::error::Result;

/// Subtrees per worker to aim for when choosing the split depth.
const SUBTREES_PER_WORKER: usize = 8;

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn explore_length(space: &SearchSpace<'_>, length: usize, incumbent: f64, workers: usize) -> DepthOutcome {
    if workers <= 1 || length == 0 {
        return space.explore(length, &[], incumbent);
    }
    let mut depth = 1;
    let mut prefixes = space.prefixes(depth);
    while prefixes.len() < SUBTREES_PER_WORKER * workers && depth < length {
        depth += 1;
        prefixes = space.prefixes(depth);
    }
    let next = AtomicUsize::new(0);
    let outcomes: Vec<DepthOutcome> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers.min(prefixes.len()))
            .map(|_| {
                s.spawn(|| {
                    let mut acc = DepthOutcome::default();
                    loop {
                        let i = next.fetch_add(1, Ordering::Relaxed);
                        let Some(p) = prefixes.get(i) else { break };
                        acc = acc.merge(space.explore(length, p, incumbent));
                    }
                    acc
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("search worker panicked"))
            .collect()
    });
    outcomes.into_iter().fold(DepthOutcome::default(), DepthOutcome::merge)
}

/// Runs the search on `workers` threads. Also returns the wall time spent on
/// each length of the curve.
pub fn search_parallel(
    target: &SynthesisTarget,
    config: &SearchConfig,
    workers: usize,
) -> Result<(SynthesisResult, Vec<f64>)> {
    let mut seconds = Vec::new();
    let result = search_with(target, config, |space, length, incumbent| {
        let start = Instant::now();
        let out = explore_length(space, length, incumbent, workers);
        seconds.push(start.elapsed().as_secs_f64());
        Ok(out)
    })?;
    Ok((result, seconds))
}

#[cfg(test)]
mod tests {
    use super::*;
    use anyonforge_core::search::search;
    use anyonforge_core::target::make_target_e;
    use anyonforge_core::AnyonModel;

    #[test]
    fn worker_count_does_not_change_the_answer() {
        let m = AnyonModel::new(3).unwrap();
        let t = make_target_e(&m).unwrap();
        let config = SearchConfig {
            max_length: 6,
            weave_only: false,
            ..SearchConfig::default()
        };
        let serial = search(&t, &config).unwrap();
        for workers in [1, 2, 5] {
            let (r, seconds) = search_parallel(&t, &config, workers).unwrap();
            assert_eq!(r, serial);
            assert_eq!(seconds.len(), r.curve.len());
        }
    }
}
