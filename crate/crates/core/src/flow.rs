//! Dinic max-flow over any ordered additive capacity type, plus feasible
//! flows with lower bounds.
//!
//! Used with exact rationals for the Rado allocator and with `i64` for the
//! combinatorial steps (factors of bipartite multigraphs, Latin rectangle
//! extension).

use std::collections::VecDeque;
use std::ops::{Add, Sub};

use num_traits::Zero;

/// Capacity type: anything with `0`, `+`, `-` and a total-enough order.
pub trait Capacity: Clone + PartialOrd + Zero + Add<Output = Self> + Sub<Output = Self> {}

impl<T> Capacity for T where T: Clone + PartialOrd + Zero + Add<Output = T> + Sub<Output = T> {}

#[derive(Clone, Debug)]
struct Arc<C> {
    to: usize,
    rev: usize,
    cap: C,
    original: C,
}

/// Handle returned by [`FlowNetwork::add_edge`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EdgeId {
    from: usize,
    slot: usize,
}

#[derive(Clone, Debug)]
pub struct FlowNetwork<C> {
    graph: Vec<Vec<Arc<C>>>,
}

impl<C: Capacity> FlowNetwork<C> {
    pub fn new(nodes: usize) -> Self {
        FlowNetwork { graph: vec![Vec::new(); nodes] }
    }

    pub fn node_count(&self) -> usize {
        self.graph.len()
    }

    pub fn add_node(&mut self) -> usize {
        self.graph.push(Vec::new());
        self.graph.len() - 1
    }

    pub fn add_edge(&mut self, from: usize, to: usize, cap: C) -> EdgeId {
        let slot = self.graph[from].len();
        let rev = self.graph[to].len() + usize::from(from == to);
        self.graph[from].push(Arc { to, rev, cap: cap.clone(), original: cap });
        self.graph[to].push(Arc { to: from, rev: slot, cap: C::zero(), original: C::zero() });
        EdgeId { from, slot }
    }

    /// Flow currently routed through an edge.
    pub fn flow(&self, e: EdgeId) -> C {
        let arc = &self.graph[e.from][e.slot];
        arc.original.clone() - arc.cap.clone()
    }

    fn levels(&self, s: usize, t: usize) -> Option<Vec<usize>> {
        let mut level = vec![usize::MAX; self.graph.len()];
        level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for arc in &self.graph[u] {
                if level[arc.to] == usize::MAX && arc.cap > C::zero() {
                    level[arc.to] = level[u] + 1;
                    queue.push_back(arc.to);
                }
            }
        }
        (level[t] != usize::MAX).then_some(level)
    }

    fn augment(&mut self, u: usize, t: usize, limit: C, level: &[usize], next: &mut [usize]) -> C {
        if u == t {
            return limit;
        }
        while next[u] < self.graph[u].len() {
            let i = next[u];
            let (to, cap) = {
                let arc = &self.graph[u][i];
                (arc.to, arc.cap.clone())
            };
            if cap > C::zero() && level[to] == level[u] + 1 {
                let want = if cap < limit { cap } else { limit.clone() };
                let pushed = self.augment(to, t, want, level, next);
                if pushed > C::zero() {
                    let rev = self.graph[u][i].rev;
                    let fwd = self.graph[u][i].cap.clone() - pushed.clone();
                    self.graph[u][i].cap = fwd;
                    let back = self.graph[to][rev].cap.clone() + pushed.clone();
                    self.graph[to][rev].cap = back;
                    return pushed;
                }
            }
            next[u] += 1;
        }
        C::zero()
    }

    /// Maximum `s`–`t` flow; may be called again after adding edges.
    pub fn max_flow(&mut self, s: usize, t: usize) -> C {
        let mut total = C::zero();
        // sum of capacities out of s bounds every augmenting amount
        let bound = self.graph[s].iter().fold(C::zero(), |acc, a| acc + a.cap.clone());
        while let Some(level) = self.levels(s, t) {
            let mut next = vec![0; self.graph.len()];
            loop {
                let pushed = self.augment(s, t, bound.clone(), &level, &mut next);
                if pushed > C::zero() {
                    total = total + pushed;
                } else {
                    break;
                }
            }
        }
        total
    }

    /// Nodes reachable from `s` in the residual graph (source side of a
    /// minimum cut after [`max_flow`](Self::max_flow)).
    pub fn residual_reachable(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.graph.len()];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for arc in &self.graph[u] {
                if !seen[arc.to] && arc.cap > C::zero() {
                    seen[arc.to] = true;
                    stack.push(arc.to);
                }
            }
        }
        seen
    }
}

/// Edge of a [`BoundedFlow`] problem: flow must lie in `[lower, upper]`.
#[derive(Clone, Debug)]
pub struct BoundedEdge {
    pub from: usize,
    pub to: usize,
    pub lower: i64,
    pub upper: i64,
}

/// Integer circulation/flow with lower bounds, solved by the standard
/// reduction to a single max-flow.
#[derive(Clone, Debug, Default)]
pub struct BoundedFlow {
    nodes: usize,
    edges: Vec<BoundedEdge>,
}

impl BoundedFlow {
    pub fn new(nodes: usize) -> Self {
        BoundedFlow { nodes, edges: Vec::new() }
    }

    pub fn add_edge(&mut self, from: usize, to: usize, lower: i64, upper: i64) -> usize {
        debug_assert!(0 <= lower && lower <= upper);
        self.edges.push(BoundedEdge { from, to, lower, upper });
        self.edges.len() - 1
    }

    /// A feasible `s`–`t` flow (any value), or `None` when the bounds cannot
    /// be met. Returns the flow on every edge in insertion order.
    pub fn solve(&self, s: usize, t: usize) -> Option<Vec<i64>> {
        let n = self.nodes;
        let (super_s, super_t) = (n, n + 1);
        let mut net = FlowNetwork::<i64>::new(n + 2);
        let mut excess = vec![0i64; n];
        let mut ids = Vec::with_capacity(self.edges.len());
        for e in &self.edges {
            ids.push(net.add_edge(e.from, e.to, e.upper - e.lower));
            excess[e.to] += e.lower;
            excess[e.from] -= e.lower;
        }
        let total_upper: i64 = self.edges.iter().map(|e| e.upper).sum();
        net.add_edge(t, s, total_upper.max(1));
        let mut demand = 0;
        for (v, &x) in excess.iter().enumerate() {
            if x > 0 {
                net.add_edge(super_s, v, x);
                demand += x;
            } else if x < 0 {
                net.add_edge(v, super_t, -x);
            }
        }
        if net.max_flow(super_s, super_t) != demand {
            return None;
        }
        Some(self.edges.iter().zip(ids).map(|(e, id)| e.lower + net.flow(id)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Rational, Scalar};

    #[test]
    fn classic_example() {
        // CLRS figure 26.1, max flow 23
        let mut net = FlowNetwork::<i64>::new(6);
        for &(u, v, c) in &[
            (0, 1, 16),
            (0, 2, 13),
            (1, 3, 12),
            (2, 1, 4),
            (2, 4, 14),
            (3, 2, 9),
            (3, 5, 20),
            (4, 3, 7),
            (4, 5, 4),
        ] {
            net.add_edge(u, v, c);
        }
        assert_eq!(net.max_flow(0, 5), 23);
        let cut = net.residual_reachable(0);
        assert!(cut[0] && !cut[5]);
    }

    #[test]
    fn rational_capacities() {
        let mut net = FlowNetwork::<Rational>::new(4);
        let a = net.add_edge(0, 1, Rational::ratio(1, 3));
        net.add_edge(0, 2, Rational::ratio(1, 2));
        net.add_edge(1, 3, Rational::ratio(1, 1));
        net.add_edge(2, 3, Rational::ratio(1, 4));
        assert_eq!(net.max_flow(0, 3), Rational::ratio(7, 12));
        assert_eq!(net.flow(a), Rational::ratio(1, 3));
    }

    #[test]
    fn lower_bounds() {
        // s -> a -> t with lower bound 2 on a->t but capacity 1 on s->a
        let mut p = BoundedFlow::new(3);
        p.add_edge(0, 1, 0, 1);
        p.add_edge(1, 2, 2, 3);
        assert!(p.solve(0, 2).is_none());

        let mut p = BoundedFlow::new(4);
        p.add_edge(0, 1, 0, 5);
        p.add_edge(0, 2, 0, 5);
        p.add_edge(1, 3, 3, 3);
        p.add_edge(2, 3, 1, 4);
        let f = p.solve(0, 3).unwrap();
        assert_eq!(f[2], 3);
        assert!(f[3] >= 1 && f[3] <= 4);
        assert_eq!(f[0], 3);
        assert_eq!(f[1], f[3]);
    }
}
