//! Connected components of the size-2 clause graph.
//!
//! Nodes are data indices; every live size-2 clause over undecoded indices is
//! an edge. Components are tracked with union-find, and the root of each set
//! carries node and edge counts plus the clause ids of its edges. A component
//! contains a cycle exactly when its excess `edges - nodes` is non-negative.

/// Node and edge counts of one component.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ComponentRecord {
    pub nodes: usize,
    pub edges: usize,
}

impl ComponentRecord {
    pub fn excess(&self) -> isize {
        self.edges as isize - self.nodes as isize
    }

    /// True when the component holds a cycle the double rule can work on.
    pub fn has_cycle(&self) -> bool {
        self.nodes > 0 && self.excess() >= 0
    }
}

#[derive(Debug, Clone)]
pub(crate) struct PairGraph {
    parent: Vec<u32>,
    rank: Vec<u8>,
    records: Vec<ComponentRecord>,
    edges: Vec<Vec<u32>>,
    candidates: Vec<u32>,
}

impl PairGraph {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
            rank: vec![0; n],
            records: vec![ComponentRecord { nodes: 1, edges: 0 }; n],
            edges: vec![Vec::new(); n],
            candidates: Vec::new(),
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let grand = self.parent[self.parent[x] as usize];
            self.parent[x] = grand;
            x = grand as usize;
        }
        x
    }

    pub fn record(&mut self, x: usize) -> ComponentRecord {
        let r = self.find(x);
        self.records[r]
    }

    pub fn add_edge(&mut self, clause: u32, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        let root = if ra == rb {
            ra
        } else {
            let (big, small) = match self.rank[ra].cmp(&self.rank[rb]) {
                std::cmp::Ordering::Less => (rb, ra),
                std::cmp::Ordering::Greater => (ra, rb),
                std::cmp::Ordering::Equal => {
                    self.rank[ra] += 1;
                    (ra, rb)
                }
            };
            self.parent[small] = big as u32;
            let moved = self.records[small];
            self.records[big].nodes += moved.nodes;
            self.records[big].edges += moved.edges;
            self.records[small] = ComponentRecord::default();
            let mut list = std::mem::take(&mut self.edges[small]);
            if list.len() > self.edges[big].len() {
                std::mem::swap(&mut list, &mut self.edges[big]);
            }
            self.edges[big].extend(list);
            big
        };
        self.records[root].edges += 1;
        self.edges[root].push(clause);
        if self.records[root].has_cycle() {
            self.candidates.push(root as u32);
        }
    }

    /// An edge touching `a` left the graph.
    pub fn remove_edge(&mut self, a: usize) {
        let r = self.find(a);
        debug_assert!(self.records[r].edges > 0);
        self.records[r].edges -= 1;
    }

    /// Node `a` was decoded.
    pub fn remove_node(&mut self, a: usize) {
        let r = self.find(a);
        debug_assert!(self.records[r].nodes > 0);
        self.records[r].nodes -= 1;
        if self.records[r].has_cycle() {
            self.candidates.push(r as u32);
        }
    }

    /// Clause ids registered at the component of `x`; may include clauses
    /// that have since left the graph.
    pub fn edge_list_mut(&mut self, x: usize) -> &mut Vec<u32> {
        let r = self.find(x);
        &mut self.edges[r]
    }

    pub fn pop_candidate(&mut self) -> Option<usize> {
        self.candidates.pop().map(|r| r as usize)
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_then_cycle() {
        let mut g = PairGraph::new(4);
        g.add_edge(0, 0, 1);
        g.add_edge(1, 1, 2);
        assert_eq!(g.record(2), ComponentRecord { nodes: 3, edges: 2 });
        assert_eq!(g.record(0).excess(), -1);
        assert!(g.pop_candidate().is_none());
        g.add_edge(2, 2, 0);
        assert!(g.record(1).has_cycle());
        let c = g.pop_candidate().unwrap();
        assert_eq!(g.find(c), g.find(0));
        assert_eq!(g.record(3), ComponentRecord { nodes: 1, edges: 0 });
        let mut ids = g.edge_list_mut(0).clone();
        ids.sort_unstable();
        assert_eq!(ids, vec![0, 1, 2]);
    }

    #[test]
    fn parallel_pair_is_a_cycle() {
        let mut g = PairGraph::new(2);
        g.add_edge(0, 0, 1);
        g.add_edge(1, 1, 0);
        assert_eq!(g.record(0).excess(), 0);
        g.remove_edge(1);
        assert_eq!(g.record(0).excess(), -1);
        g.remove_node(0);
        g.remove_node(1);
        assert!(!g.record(0).has_cycle());
    }
}
