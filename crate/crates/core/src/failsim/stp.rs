use std::collections::{BTreeMap, BTreeSet};

use super::graph::{LogicalGraph, NodeKind};
use crate::plant::Id;
use crate::scalar::Scalar;

/// Single-instance spanning tree over every connected component.
#[derive(Debug, Clone, PartialEq)]
pub struct SpanningTree<S> {
    /// One root per component, in ascending (priority, id) order of roots.
    pub roots: Vec<Id>,
    /// Node -> (parent, edge, root path cost). Roots have no entry.
    pub parent: BTreeMap<Id, (Id, Id, S)>,
    pub active: BTreeSet<Id>,
    pub blocking: BTreeSet<Id>,
}

impl<S: Scalar> SpanningTree<S> {
    pub fn root_of_component(&self, node: &str) -> Option<&str> {
        let mut cur = node;
        let mut steps = 0;
        while let Some((p, _, _)) = self.parent.get(cur) {
            cur = p;
            steps += 1;
            if steps > self.parent.len() {
                return None;
            }
        }
        self.roots.iter().find(|r| *r == cur).map(|r| r.as_str())
    }
}

/// Computes the active topology.
///
/// Each component's root is its core with the lowest (priority, id), or its
/// lowest (priority, id) node when it holds no core. Every other node keeps
/// the edge minimizing (root path cost through the neighbor, neighbor id,
/// edge id). All remaining usable edges block.
pub fn spanning_tree<S: Scalar>(graph: &LogicalGraph<S>) -> SpanningTree<S> {
    let adj = graph.adjacency();
    let rank: BTreeMap<&str, (bool, u32)> = graph
        .nodes
        .iter()
        .filter(|n| n.alive)
        .map(|n| (n.id.as_str(), (n.kind != NodeKind::Core, n.priority)))
        .collect();

    let mut seen: BTreeSet<&str> = BTreeSet::new();
    let mut roots = Vec::new();
    let mut parent = BTreeMap::new();
    let mut active = BTreeSet::new();

    for &start in adj.keys() {
        if seen.contains(start) {
            continue;
        }
        let mut component = vec![start];
        seen.insert(start);
        let mut i = 0;
        while i < component.len() {
            for e in &adj[component[i]] {
                let nb = e.other(component[i]);
                if seen.insert(nb) {
                    component.push(nb);
                }
            }
            i += 1;
        }
        let root = *component
            .iter()
            .min_by(|x, y| (rank[*x], *x).cmp(&(rank[*y], *y)))
            .expect("component is non-empty");
        roots.push(root);

        // Dijkstra on path cost, ties settled by node id.
        let mut dist: BTreeMap<&str, S> = BTreeMap::new();
        let mut done: BTreeSet<&str> = BTreeSet::new();
        dist.insert(root, S::zero());
        loop {
            let next = dist
                .iter()
                .filter(|(n, _)| !done.contains(*n))
                .min_by(|(na, da), (nb, db)| {
                    da.partial_cmp(db)
                        .unwrap_or(std::cmp::Ordering::Equal)
                        .then_with(|| na.cmp(nb))
                })
                .map(|(n, d)| (*n, *d));
            let Some((u, du)) = next else { break };
            done.insert(u);
            for e in &adj[u] {
                let v = e.other(u);
                let cand = du + e.cost;
                if !done.contains(v) && dist.get(v).is_none_or(|&dv| cand < dv) {
                    dist.insert(v, cand);
                }
            }
        }

        for &n in &component {
            if n == root {
                continue;
            }
            let best = adj[n]
                .iter()
                .map(|e| {
                    let nb = e.other(n);
                    (dist[nb] + e.cost, nb, e.id.as_str())
                })
                .min_by(|a, b| {
                    a.0.partial_cmp(&b.0)
                        .unwrap_or(std::cmp::Ordering::Equal)
                        .then_with(|| a.1.cmp(b.1))
                        .then_with(|| a.2.cmp(b.2))
                })
                .expect("non-root node in a component has an edge");
            active.insert(best.2.to_string());
            parent.insert(n.to_string(), (best.1.to_string(), best.2.to_string(), best.0));
        }
    }

    let mut sorted_roots: Vec<&str> = roots;
    sorted_roots.sort_by(|x, y| (rank[*x], *x).cmp(&(rank[*y], *y)));
    let blocking = adj
        .values()
        .flatten()
        .map(|e| e.id.clone())
        .filter(|id| !active.contains(id))
        .collect();
    SpanningTree {
        roots: sorted_roots.into_iter().map(str::to_string).collect(),
        parent,
        active,
        blocking,
    }
}
