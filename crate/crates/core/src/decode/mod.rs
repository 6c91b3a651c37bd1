//! Cyclone decoder.
//!
//! Received symbols become clauses. The single rule peels size-1 clauses and
//! reduces every clause that mentions the decoded index. The double rule
//! looks at the graph formed by size-2 clauses: once a component holds a
//! cycle, the cycle is contracted to a pair of parallel edges, which are then
//! solved with a binomial division. Both rules repeat until neither changes
//! anything.

mod clause;
mod pairgraph;

use std::collections::{HashSet, VecDeque};

pub use clause::{edge_contract, parallel_edge_resolve, parallel_is_redundant, Clause, ParallelOutcome};
pub use pairgraph::ComponentRecord;

use pairgraph::PairGraph;

use crate::encode::{derive_clause_spec, ClauseSpec, CodeConfig};
use crate::error::{Error, Result};
use crate::ring::{pad, unpad, DataSymbol, GhostVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecoderOptions {
    /// Resolve cyclic components of the size-2 clause graph. Without it the
    /// decoder is a plain peeling (LT) decoder.
    pub double_rule: bool,
}

impl Default for DecoderOptions {
    fn default() -> Self {
        Self { double_rule: true }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DecodeStats {
    pub symbols_read: u64,
    /// Clauses dropped without contributing a data symbol.
    pub redundant: u64,
    pub double_rule_attempts: u64,
    /// Attempts that hit dependent parallel edges.
    pub double_rule_failures: u64,
    pub components_resolved: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Progress {
    pub decoded: usize,
    pub symbols_read: u64,
    pub redundant: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SlotState {
    /// Size 3 or more.
    Pending,
    /// Size 1, queued for output.
    Ripple,
    /// Size 2, registered in the pair graph.
    Edge,
    Dead,
}

#[derive(Debug, Clone, Copy)]
struct CycleEdge {
    clause: u32,
    from: usize,
    to: usize,
}

#[derive(Debug, Clone)]
pub struct DecoderSession {
    cfg: CodeConfig,
    options: DecoderOptions,
    decoded: Vec<Option<GhostVector>>,
    decode_log: Vec<usize>,
    clauses: Vec<Clause>,
    states: Vec<SlotState>,
    adjacency: Vec<Vec<u32>>,
    ripple: VecDeque<u32>,
    graph: PairGraph,
    seen: HashSet<u64>,
    stats: DecodeStats,
    truth: Option<Vec<DataSymbol>>,
    local_id: Vec<u32>,
}

impl DecoderSession {
    pub fn new(cfg: CodeConfig) -> Self {
        Self::with_options(cfg, DecoderOptions::default())
    }

    /// A peeling-only decoder.
    pub fn lt(cfg: CodeConfig) -> Self {
        Self::with_options(cfg, DecoderOptions { double_rule: false })
    }

    pub fn with_options(cfg: CodeConfig, options: DecoderOptions) -> Self {
        let n = cfg.n();
        Self {
            options,
            decoded: vec![None; n],
            decode_log: Vec::new(),
            clauses: Vec::new(),
            states: Vec::new(),
            adjacency: vec![Vec::new(); n],
            ripple: VecDeque::new(),
            graph: PairGraph::new(n),
            seen: HashSet::new(),
            stats: DecodeStats::default(),
            truth: None,
            local_id: vec![u32::MAX; n],
            cfg,
        }
    }

    /// Checks every clause and decoded value against `data` after each
    /// operation, panicking on the first violation. Slow; for tests.
    pub fn with_ground_truth(mut self, data: Vec<DataSymbol>) -> Self {
        assert_eq!(data.len(), self.cfg.n());
        self.truth = Some(data);
        self
    }

    pub fn config(&self) -> &CodeConfig {
        &self.cfg
    }

    pub fn options(&self) -> DecoderOptions {
        self.options
    }

    pub fn stats(&self) -> DecodeStats {
        self.stats
    }

    pub fn progress(&self) -> Progress {
        Progress {
            decoded: self.decode_log.len(),
            symbols_read: self.stats.symbols_read,
            redundant: self.stats.redundant,
        }
    }

    pub fn decoded_count(&self) -> usize {
        self.decode_log.len()
    }

    pub fn is_complete(&self) -> bool {
        self.decode_log.len() == self.cfg.n()
    }

    pub fn is_decoded(&self, index: usize) -> bool {
        self.decoded[index].is_some()
    }

    /// Indices in the order they were decoded.
    pub fn decode_order(&self) -> &[usize] {
        &self.decode_log
    }

    pub fn decoded_symbol(&self, index: usize) -> Option<DataSymbol> {
        self.decoded[index].as_ref().map(unpad)
    }

    /// All data symbols, once every index is decoded.
    pub fn decoded_data(&self) -> Option<Vec<DataSymbol>> {
        self.decoded.iter().map(|d| d.as_ref().map(unpad)).collect()
    }

    /// Reads code symbol `ell` and runs the decoder to its fixpoint.
    /// Returns how many data symbols became known.
    pub fn receive(&mut self, ell: u64, y: &DataSymbol) -> Result<usize> {
        self.read_symbol(ell, y)?;
        Ok(self.run_fixpoint()?.len())
    }

    /// Stores code symbol `ell` as a clause, reduced against the data
    /// already decoded. Call [`run_fixpoint`](Self::run_fixpoint) to act on it.
    pub fn read_symbol(&mut self, ell: u64, y: &DataSymbol) -> Result<()> {
        let spec = derive_clause_spec(&self.cfg, ell);
        self.read_clause(&spec, y)
    }

    /// [`read_symbol`](Self::read_symbol) with externally derived clause
    /// parameters.
    pub fn read_clause(&mut self, spec: &ClauseSpec, y: &DataSymbol) -> Result<()> {
        if y.w() != self.cfg.w() {
            return Err(Error::WidthMismatch {
                expected: self.cfg.w() as usize,
                actual: y.w() as usize,
            });
        }
        if let Some(bad) = spec.terms.iter().find(|t| t.index >= self.cfg.n()) {
            return Err(Error::InvalidConfig(format!(
                "clause index {} out of range for n = {}",
                bad.index,
                self.cfg.n()
            )));
        }
        if !self.seen.insert(spec.ell) {
            return Err(Error::DuplicateSymbol { ell: spec.ell });
        }
        self.stats.symbols_read += 1;
        let mut clause = Clause::read(spec, y);
        for t in &spec.terms {
            if let Some(v) = &self.decoded[t.index] {
                clause.monomial_reduce(t.index, v, 0);
            }
        }
        let id = self.clauses.len() as u32;
        for t in clause.terms() {
            self.adjacency[t.index].push(id);
        }
        self.clauses.push(clause);
        self.states.push(SlotState::Pending);
        self.route(id)?;
        self.verify();
        Ok(())
    }

    /// Alternates the single and double rule until neither makes progress.
    /// Returns the indices decoded during this call.
    pub fn run_fixpoint(&mut self) -> Result<Vec<usize>> {
        let start = self.decode_log.len();
        loop {
            let single = self.apply_single_rule()?;
            let double = self.options.double_rule && self.apply_double_rule()?;
            self.verify();
            if !single && !double {
                break;
            }
        }
        Ok(self.decode_log[start..].to_vec())
    }

    fn apply_single_rule(&mut self) -> Result<bool> {
        let mut changed = false;
        while let Some(id) = self.ripple.pop_front() {
            if self.states[id as usize] != SlotState::Ripple {
                continue;
            }
            let (index, value) = self.clauses[id as usize].output().expect("ripple holds size-1 clauses");
            self.kill(id);
            self.set_decoded(index, value)?;
            changed = true;
        }
        Ok(changed)
    }

    fn apply_double_rule(&mut self) -> Result<bool> {
        let mut changed = false;
        while let Some(candidate) = self.graph.pop_candidate() {
            let root = self.graph.find(candidate);
            if !self.graph.record(root).has_cycle() {
                continue;
            }
            let (decoded, dropped) = self.resolve_component(root)?;
            changed |= dropped;
            if decoded {
                // Drain the ripple before looking at other components.
                return Ok(true);
            }
        }
        Ok(changed)
    }

    /// Works on one component with non-negative excess until it decodes or
    /// becomes a tree. Returns (decoded something, dropped redundant edges).
    fn resolve_component(&mut self, root: usize) -> Result<(bool, bool)> {
        let mut dropped = false;
        while self.graph.record(root).has_cycle() {
            self.stats.double_rule_attempts += 1;
            let cycle = self.find_cycle(root);
            debug_assert!(cycle.len() >= 2);
            match self.contract_cycle(&cycle)? {
                ParallelOutcome::Resolved { a, b } => {
                    self.stats.components_resolved += 1;
                    self.set_decoded(a.0, a.1)?;
                    if self.decoded[b.0].is_none() {
                        self.set_decoded(b.0, b.1)?;
                    }
                    return Ok((true, dropped));
                }
                ParallelOutcome::Redundant => {
                    self.stats.double_rule_failures += 1;
                    self.stats.redundant += 1;
                    let youngest = cycle
                        .iter()
                        .map(|e| e.clause)
                        .max_by_key(|&id| self.clauses[id as usize].ell())
                        .expect("non-empty cycle");
                    let any_end = self.clauses[youngest as usize].terms()[0].index;
                    self.graph.remove_edge(any_end);
                    self.kill(youngest);
                    dropped = true;
                }
            }
        }
        Ok((false, dropped))
    }

    /// One cycle of the component rooted at `root`, as edges `v0 -> v1 ->
    /// ... -> v0`, found via a spanning tree built by iterative DFS.
    fn find_cycle(&mut self, root: usize) -> Vec<CycleEdge> {
        let states = &self.states;
        let list = self.graph.edge_list_mut(root);
        list.retain(|&id| states[id as usize] == SlotState::Edge);
        let edge_ids = list.clone();

        let mut nodes: Vec<usize> = Vec::new();
        let mut ends: Vec<(u32, u32)> = Vec::with_capacity(edge_ids.len());
        for &id in &edge_ids {
            let terms = self.clauses[id as usize].terms();
            let mut local = [0u32; 2];
            for (slot, t) in local.iter_mut().zip(terms) {
                if self.local_id[t.index] == u32::MAX {
                    self.local_id[t.index] = nodes.len() as u32;
                    nodes.push(t.index);
                }
                *slot = self.local_id[t.index];
            }
            ends.push((local[0], local[1]));
        }
        for &v in &nodes {
            self.local_id[v] = u32::MAX;
        }

        // Compressed adjacency: (edge position, neighbour).
        let q = nodes.len();
        let mut offsets = vec![0usize; q + 1];
        for &(a, b) in &ends {
            offsets[a as usize + 1] += 1;
            offsets[b as usize + 1] += 1;
        }
        for i in 0..q {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut adj = vec![(0u32, 0u32); offsets[q]];
        for (e, &(a, b)) in ends.iter().enumerate() {
            adj[fill[a as usize]] = (e as u32, b);
            fill[a as usize] += 1;
            adj[fill[b as usize]] = (e as u32, a);
            fill[b as usize] += 1;
        }

        const NONE: u32 = u32::MAX;
        let mut parent = vec![NONE; q];
        let mut parent_edge = vec![NONE; q];
        let mut depth = vec![0u32; q];
        let mut visited = vec![false; q];
        let mut stack = Vec::new();
        let mut back = None;
        'outer: for start in 0..q {
            if visited[start] {
                continue;
            }
            visited[start] = true;
            stack.push(start as u32);
            while let Some(u) = stack.pop() {
                let u = u as usize;
                for &(e, v) in &adj[offsets[u]..offsets[u + 1]] {
                    if e == parent_edge[u] {
                        continue;
                    }
                    let v = v as usize;
                    if visited[v] {
                        back = Some((u, v, e));
                        break 'outer;
                    }
                    visited[v] = true;
                    parent[v] = u as u32;
                    parent_edge[v] = e;
                    depth[v] = depth[u] + 1;
                    stack.push(v as u32);
                }
            }
        }
        let (u, v, closing) = back.expect("component with non-negative excess has a cycle");

        // Tree paths from u and v up to their common ancestor.
        let (mut x, mut y) = (u, v);
        let mut up_u = vec![x];
        let mut up_v = vec![y];
        while depth[x] > depth[y] {
            x = parent[x] as usize;
            up_u.push(x);
        }
        while depth[y] > depth[x] {
            y = parent[y] as usize;
            up_v.push(y);
        }
        while x != y {
            x = parent[x] as usize;
            up_u.push(x);
            y = parent[y] as usize;
            up_v.push(y);
        }
        up_v.pop();
        let ring: Vec<usize> = up_u.into_iter().chain(up_v.into_iter().rev()).collect();

        let mut cycle = Vec::with_capacity(ring.len());
        for pair in ring.windows(2) {
            let (from, to) = (pair[0], pair[1]);
            let e = if parent[from] as usize == to && parent_edge[from] != NONE {
                parent_edge[from]
            } else {
                parent_edge[to]
            };
            cycle.push(CycleEdge {
                clause: edge_ids[e as usize],
                from: nodes[from],
                to: nodes[to],
            });
        }
        cycle.push(CycleEdge {
            clause: edge_ids[closing as usize],
            from: nodes[v],
            to: nodes[u],
        });
        cycle
    }

    /// Contracts edges 1.. of the cycle into one edge parallel to edge 0 and
    /// resolves the pair.
    fn contract_cycle(&self, cycle: &[CycleEdge]) -> Result<ParallelOutcome> {
        let first = &self.clauses[cycle[0].clause as usize];
        let mut path = self.clauses[cycle[1].clause as usize].clone();
        for e in &cycle[2..] {
            let next = &self.clauses[e.clause as usize];
            path = edge_contract(&path, next, e.from).expect("cycle nodes are distinct");
        }
        debug_assert!(path.contains(cycle[0].from) && path.contains(cycle[0].to));
        parallel_edge_resolve(first, &path)
    }

    fn set_decoded(&mut self, index: usize, value: GhostVector) -> Result<()> {
        debug_assert!(!value.ghost_bit());
        if let Some(existing) = &self.decoded[index] {
            if *existing != value {
                return Err(Error::Corruption(format!(
                    "data symbol {index} decoded to two different values"
                )));
            }
            return Ok(());
        }
        if let Some(truth) = &self.truth {
            assert_eq!(unpad(&value), truth[index], "wrong value decoded for index {index}");
        }
        self.decoded[index] = Some(value);
        self.decode_log.push(index);
        self.graph.remove_node(index);
        let adjacent = std::mem::take(&mut self.adjacency[index]);
        for id in adjacent {
            if self.states[id as usize] == SlotState::Dead {
                continue;
            }
            let was_edge = self.states[id as usize] == SlotState::Edge;
            let value = self.decoded[index].as_ref().expect("just stored");
            if !self.clauses[id as usize].monomial_reduce(index, value, 0) {
                continue;
            }
            if was_edge {
                let other = self.clauses[id as usize].terms()[0].index;
                self.graph.remove_edge(other);
            }
            self.route(id)?;
        }
        Ok(())
    }

    fn route(&mut self, id: u32) -> Result<()> {
        let clause = &self.clauses[id as usize];
        match clause.k() {
            0 => {
                if !unpad(clause.g()).is_zero() {
                    return Err(Error::Corruption(format!(
                        "code symbol {} contradicts the decoded data",
                        clause.ell()
                    )));
                }
                self.stats.redundant += 1;
                self.kill(id);
            }
            1 => {
                self.states[id as usize] = SlotState::Ripple;
                self.ripple.push_back(id);
            }
            2 => {
                let (a, b) = (clause.terms()[0].index, clause.terms()[1].index);
                debug_assert_ne!(a, b);
                self.states[id as usize] = SlotState::Edge;
                self.graph.add_edge(id, a, b);
            }
            _ => self.states[id as usize] = SlotState::Pending,
        }
        Ok(())
    }

    fn kill(&mut self, id: u32) {
        self.states[id as usize] = SlotState::Dead;
        self.clauses[id as usize].clear();
    }

    fn verify(&mut self) {
        if self.truth.is_some() {
            if let Err(msg) = self.check_invariants() {
                panic!("decoder invariant violated: {msg}");
            }
        }
    }

    /// Recounts the pair graph from scratch and, with ground truth attached,
    /// checks every live clause.
    pub fn check_invariants(&mut self) -> std::result::Result<(), String> {
        let n = self.cfg.n();
        if let Some(truth) = &self.truth {
            for (id, c) in self.clauses.iter().enumerate() {
                if self.states[id] != SlotState::Dead && !c.holds_for(truth) {
                    return Err(format!("clause from symbol {} fails the invariant", c.ell()));
                }
            }
        }
        for (id, c) in self.clauses.iter().enumerate() {
            if self.states[id] != SlotState::Dead && c.terms().iter().any(|t| self.decoded[t.index].is_some()) {
                if self.states[id] != SlotState::Ripple {
                    return Err(format!("clause {id} still mentions a decoded index"));
                }
            }
        }
        // Component counts only settle once the ripple is drained.
        if !self.ripple.iter().any(|&id| self.states[id as usize] == SlotState::Ripple) {
            let mut expected = vec![ComponentRecord::default(); n];
            for i in (0..n).filter(|&i| self.decoded[i].is_none()) {
                let r = self.graph.find(i);
                expected[r].nodes += 1;
            }
            for id in 0..self.clauses.len() {
                if self.states[id] == SlotState::Edge {
                    let a = self.clauses[id].terms()[0].index;
                    let r = self.graph.find(a);
                    expected[r].edges += 1;
                }
            }
            for r in 0..n {
                if self.graph.find(r) == r {
                    let got = self.graph.record(r);
                    if got != expected[r] {
                        return Err(format!("component {r}: recorded {got:?}, recount {:?}", expected[r]));
                    }
                    if got.edges > 0 && got.nodes == 0 {
                        return Err(format!("component {r} has edges but no nodes"));
                    }
                }
            }
        }
        debug_assert_eq!(self.graph.len(), n);
        Ok(())
    }
}

/// Pads a decoded symbol back into the ring; helper for callers holding
/// external values.
pub fn monomial_of(x: &DataSymbol) -> GhostVector {
    pad(x)
}
