//! Monotone simplification: breadth-first search of the exchange/cyclic class
//! at fixed arc index, destabilising as soon as any class member allows it.
//!
//! Search nodes are grids up to rotation of the torus, so cyclic
//! permutations never produce a new node on their own. They appear in logs
//! only to bring a wrapped pair of lines together before an exchange.

use std::collections::{BTreeMap, HashSet, VecDeque};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{GridDiagram, SplitCertificate};
use crate::moves::{self, enumerate_moves, GridMove, MoveKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Goal {
    /// Stop at the trivial grid.
    Trivial,
    /// Stop at a disconnected grid.
    Split,
    /// Destabilise as far as the search allows.
    Reduce,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub node_budget: u64,
    pub stabilize_slack: usize,
    pub goal: Goal,
    pub record_moves: bool,
    /// Reserved for randomised tie-breaking; the default order ignores it.
    pub seed: u64,
    pub workers: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            node_budget: 1_000_000,
            stabilize_slack: 0,
            goal: Goal::Trivial,
            record_moves: true,
            seed: 0,
            workers: 1,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("node_budget must be at least 1")]
    ZeroBudget,
    #[error("workers must be at least 1")]
    ZeroWorkers,
}

impl SearchConfig {
    pub fn check(&self) -> Result<(), ConfigError> {
        if self.node_budget == 0 {
            return Err(ConfigError::ZeroBudget);
        }
        if self.workers == 0 {
            return Err(ConfigError::ZeroWorkers);
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Status {
    Trivial,
    Disconnected { certificate: SplitCertificate },
    /// The whole class at the final arc index was searched without finding
    /// a destabilisation. This is not a claim that the link is knotted.
    Exhausted { class_size: u64 },
    BudgetExceeded,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplificationResult {
    #[serde(rename = "final")]
    pub final_grid: GridDiagram,
    pub move_log: Vec<GridMove>,
    pub status: Status,
    pub counters: BTreeMap<MoveKind, u64>,
    pub nodes_explored: u64,
}

impl SimplificationResult {
    pub fn goal_reached(&self) -> bool {
        matches!(self.status, Status::Trivial | Status::Disconnected { .. })
    }
}

/// Edges out of a node: each is a short move sequence ending in a grid.
fn neighbours(g: &GridDiagram, floor: usize, top: usize) -> Vec<(Vec<GridMove>, GridDiagram)> {
    let n = g.n();
    let mut out = Vec::with_capacity(2 * n + 1);
    let mut push = |steps: Vec<GridMove>| {
        if let Ok(h) = moves::replay(g, &steps) {
            out.push((steps, h));
        }
    };
    for c in 0..n - 1 {
        push(vec![GridMove::ExchangeCols { c }]);
    }
    if n > 2 {
        push(vec![GridMove::CyclicCols { shift: 1 }, GridMove::ExchangeCols { c: 0 }]);
    }
    for r in 0..n - 1 {
        push(vec![GridMove::ExchangeRows { r }]);
    }
    if n > 2 {
        push(vec![GridMove::CyclicRows { shift: 1 }, GridMove::ExchangeRows { r: 0 }]);
    }
    if n < top {
        for m in enumerate_moves(g, &[MoveKind::Stabilize]) {
            push(vec![m]);
        }
    }
    if n > floor {
        for m in enumerate_moves(g, &[MoveKind::Destabilize]) {
            push(vec![m]);
        }
    }
    out
}

struct Node {
    parent: Option<usize>,
    via: Vec<GridMove>,
}

/// What a search level reports about one dequeued grid.
struct Probe {
    split: Option<SplitCertificate>,
    reduction: Option<Vec<GridMove>>,
    next: Vec<(Vec<GridMove>, GridDiagram)>,
}

enum LevelOutcome {
    /// Path from the level start to a grid, then a reduction or nothing.
    Found { path: Vec<GridMove>, status: Option<Status> },
    Exhausted { class_size: u64 },
    Budget,
}

struct Level<'a> {
    cfg: &'a SearchConfig,
    top: usize,
    floor: usize,
    explored: &'a mut u64,
}

impl Level<'_> {
    fn probe(&self, g: &GridDiagram) -> Probe {
        let split = if self.cfg.goal == Goal::Split { g.is_disconnected() } else { None };
        let reduction = if g.n() == self.floor { moves::find_reduction(g) } else { None };
        let next = if split.is_some() || reduction.is_some() {
            Vec::new()
        } else {
            neighbours(g, self.floor, self.top)
        };
        Probe { split, reduction, next }
    }

    fn path(nodes: &[Node], mut i: usize) -> Vec<GridMove> {
        let mut rev = Vec::new();
        loop {
            let node = &nodes[i];
            rev.extend(node.via.iter().rev().copied());
            match node.parent {
                Some(p) => i = p,
                None => break,
            }
        }
        rev.reverse();
        rev
    }

    /// Layered search from `start`. Layers are probed in parallel and merged
    /// in order, so the outcome does not depend on the worker count.
    fn run(&mut self, start: &GridDiagram) -> LevelOutcome {
        let mut seen: HashSet<Vec<u8>> = HashSet::new();
        let mut nodes = vec![Node { parent: None, via: Vec::new() }];
        seen.insert(start.canonical_key());
        *self.explored += 1;
        let mut layer: Vec<(usize, GridDiagram)> = vec![(0, start.clone())];
        let mut truncated = false;
        while !layer.is_empty() {
            let probes: Vec<Probe> = if self.cfg.workers > 1 {
                layer.par_iter().map(|(_, g)| self.probe(g)).collect()
            } else {
                layer.iter().map(|(_, g)| self.probe(g)).collect()
            };
            for ((idx, _), p) in layer.iter().zip(&probes) {
                if let Some(certificate) = p.split {
                    let path = Self::path(&nodes, *idx);
                    return LevelOutcome::Found { path, status: Some(Status::Disconnected { certificate }) };
                }
                if let Some(steps) = &p.reduction {
                    let mut path = Self::path(&nodes, *idx);
                    path.extend(steps.iter().copied());
                    return LevelOutcome::Found { path, status: None };
                }
            }
            let mut next_layer = Vec::new();
            'merge: for ((idx, _), p) in layer.iter().zip(probes) {
                for (via, h) in p.next {
                    let key = h.canonical_key();
                    if seen.contains(&key) {
                        continue;
                    }
                    if *self.explored >= self.cfg.node_budget {
                        truncated = true;
                        break 'merge;
                    }
                    seen.insert(key);
                    *self.explored += 1;
                    nodes.push(Node { parent: Some(*idx), via });
                    next_layer.push((nodes.len() - 1, h));
                }
            }
            layer = next_layer;
        }
        if truncated {
            LevelOutcome::Budget
        } else {
            LevelOutcome::Exhausted { class_size: seen.len() as u64 }
        }
    }
}

fn finish(
    g: &GridDiagram,
    cur: GridDiagram,
    log: Vec<GridMove>,
    status: Status,
    explored: u64,
    cfg: &SearchConfig,
) -> SimplificationResult {
    debug_assert_eq!(moves::replay(g, &log).as_ref(), Ok(&cur));
    let mut counters = BTreeMap::new();
    for m in &log {
        *counters.entry(m.kind()).or_default() += 1;
    }
    SimplificationResult {
        final_grid: cur,
        move_log: if cfg.record_moves { log } else { Vec::new() },
        status,
        counters,
        nodes_explored: explored,
    }
}

/// Simplifies `g` by repeated class search and destabilisation. With
/// `stabilize_slack = 0` the arc index never increases along the log.
pub fn simplify(g: &GridDiagram, cfg: &SearchConfig) -> SimplificationResult {
    if cfg.workers > 1 {
        if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build() {
            return pool.install(|| simplify_levels(g, cfg));
        }
    }
    simplify_levels(g, cfg)
}

fn simplify_levels(g: &GridDiagram, cfg: &SearchConfig) -> SimplificationResult {
    let top = g.n() + cfg.stabilize_slack;
    let mut cur = g.clone();
    let mut log: Vec<GridMove> = Vec::new();
    let mut explored = 0u64;
    loop {
        if cfg.goal == Goal::Trivial && cur.n() == 2 {
            return finish(g, cur, log, Status::Trivial, explored, cfg);
        }
        if cfg.goal == Goal::Split {
            if let Some(certificate) = cur.is_disconnected() {
                return finish(g, cur, log, Status::Disconnected { certificate }, explored, cfg);
            }
        }
        if cur.n() == 2 {
            // Nothing destabilises below arc index 2.
            return finish(g, cur, log, Status::Exhausted { class_size: 1 }, explored, cfg);
        }
        let floor = cur.n();
        let outcome = Level { cfg, top, floor, explored: &mut explored }.run(&cur);
        match outcome {
            LevelOutcome::Found { path, status } => {
                cur = moves::replay(&cur, &path).expect("search paths replay");
                log.extend(path);
                if let Some(status) = status {
                    return finish(g, cur, log, status, explored, cfg);
                }
            }
            LevelOutcome::Exhausted { class_size } => {
                return finish(g, cur, log, Status::Exhausted { class_size }, explored, cfg);
            }
            LevelOutcome::Budget => return finish(g, cur, log, Status::BudgetExceeded, explored, cfg),
        }
    }
}

/// [`simplify`] with the disconnection goal.
pub fn split_search(g: &GridDiagram, cfg: &SearchConfig) -> SimplificationResult {
    let cfg = SearchConfig { goal: Goal::Split, ..cfg.clone() };
    simplify(g, &cfg)
}

/// Breadth-first walk of the exchange/cyclic class of a grid, one
/// representative per rotation orbit, in a fixed order.
pub struct ClassIter {
    queue: VecDeque<GridDiagram>,
    seen: HashSet<Vec<u8>>,
}

impl Iterator for ClassIter {
    type Item = GridDiagram;

    fn next(&mut self) -> Option<GridDiagram> {
        let g = self.queue.pop_front()?;
        for (_, h) in neighbours(&g, g.n(), 0) {
            if self.seen.insert(h.canonical_key()) {
                self.queue.push_back(h);
            }
        }
        Some(g)
    }
}

pub fn class_enumerate(g: &GridDiagram) -> ClassIter {
    let mut seen = HashSet::new();
    seen.insert(g.canonical_key());
    ClassIter { queue: VecDeque::from([g.clone()]), seen }
}

/// Applies `k` random legal moves to the trivial grid, keeping `n <= max_n`.
/// Each step picks a move kind uniformly among those with a legal move, then
/// a move of that kind.
pub fn scramble(seed: u64, k: usize, max_n: usize) -> (GridDiagram, Vec<GridMove>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = GridDiagram::trivial();
    let mut log = Vec::with_capacity(k);
    for _ in 0..k {
        let mut by_kind: BTreeMap<MoveKind, Vec<GridMove>> = BTreeMap::new();
        let mut kinds = vec![MoveKind::CyclicCols, MoveKind::CyclicRows, MoveKind::ExchangeCols, MoveKind::ExchangeRows];
        kinds.push(MoveKind::Destabilize);
        if g.n() < max_n {
            kinds.push(MoveKind::Stabilize);
        }
        for m in enumerate_moves(&g, &kinds) {
            by_kind.entry(m.kind()).or_default().push(m);
        }
        let groups: Vec<&Vec<GridMove>> = by_kind.values().collect();
        let group = groups[rng.gen_range(0..groups.len())];
        let m = *group.choose(&mut rng).expect("groups are non-empty");
        g = moves::apply(&g, &m).expect("enumerated moves are legal");
        log.push(m);
    }
    (g, log)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g3() -> GridDiagram {
        GridDiagram::new(vec![1, 0, 2], vec![0, 2, 1]).unwrap()
    }

    fn g5() -> GridDiagram {
        GridDiagram::new(vec![1, 2, 3, 4, 0], vec![3, 4, 0, 1, 2]).unwrap()
    }

    #[test]
    fn trivial_is_immediate() {
        let r = simplify(&GridDiagram::trivial(), &SearchConfig::default());
        assert_eq!(r.status, Status::Trivial);
        assert!(r.move_log.is_empty());
    }

    #[test]
    fn g3_destabilises_once() {
        let r = simplify(&g3(), &SearchConfig::default());
        assert_eq!(r.status, Status::Trivial);
        assert_eq!(r.final_grid.n(), 2);
        assert_eq!(r.counters.get(&MoveKind::Destabilize), Some(&1));
        assert_eq!(moves::replay(&g3(), &r.move_log).unwrap(), r.final_grid);
    }

    #[test]
    fn trefoil_class_is_exhausted() {
        // Every adjacent pair of lines interleaves, so the class is a single
        // orbit.
        assert_eq!(class_enumerate(&g5()).count(), 1);
        let r = simplify(&g5(), &SearchConfig::default());
        let Status::Exhausted { class_size } = r.status else { panic!("{:?}", r.status) };
        assert_eq!(class_size, class_enumerate(&g5()).count() as u64);
        assert!(r.move_log.is_empty());
    }

    #[test]
    fn trivial_class_has_one_member() {
        assert_eq!(class_enumerate(&GridDiagram::trivial()).count(), 1);
    }

    #[test]
    fn budget_is_a_status() {
        // A two-component unlink never reaches the trivial grid, and its
        // class at arc index 4 has more than three members.
        let g = GridDiagram::new(vec![0, 2, 1, 3], vec![2, 0, 3, 1]).unwrap();
        let cfg = SearchConfig { node_budget: 3, ..SearchConfig::default() };
        assert_eq!(simplify(&g, &cfg).status, Status::BudgetExceeded);
        let r = simplify(&g, &SearchConfig::default());
        assert!(matches!(r.status, Status::Exhausted { .. }), "{:?}", r.status);
    }

    #[test]
    fn scramble_is_seeded() {
        assert_eq!(scramble(9, 12, 7), scramble(9, 12, 7));
        let (g, log) = scramble(9, 12, 7);
        assert_eq!(moves::replay(&GridDiagram::trivial(), &log).unwrap(), g);
        assert!(g.n() <= 7);
    }
}
