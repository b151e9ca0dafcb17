//! Finite weighted graphs with the shortest-path metric.
//!
//! Construction validates that weights are positive and finite and that the
//! graph is connected, so distance queries are total afterwards. Ties among
//! shortest paths are broken toward the smaller predecessor index, which
//! makes extracted paths deterministic.

use crate::error::{Error, Result};
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

#[derive(Debug, Clone, Copy, PartialEq)]
struct HeapEntry {
    dist: f64,
    node: usize,
    pred: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Min-heap on (dist, node, pred); weights are validated finite so
        // partial_cmp cannot fail.
        other
            .dist
            .partial_cmp(&self.dist)
            .unwrap()
            .then_with(|| other.node.cmp(&self.node))
            .then_with(|| other.pred.cmp(&self.pred))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Result of one single-source shortest-path sweep.
#[derive(Debug, Clone)]
pub struct ShortestPaths {
    pub source: usize,
    pub dist: Vec<f64>,
    pub pred: Vec<usize>,
}

impl ShortestPaths {
    /// Node sequence from the source to `target`, inclusive.
    pub fn path_to(&self, target: usize) -> Vec<usize> {
        let mut nodes = vec![target];
        let mut cur = target;
        while cur != self.source {
            cur = self.pred[cur];
            nodes.push(cur);
        }
        nodes.reverse();
        nodes
    }
}

#[derive(Debug)]
pub struct GraphModel {
    /// Compressed adjacency: for node u, neighbors live in
    /// `targets[offsets[u]..offsets[u+1]]` with matching `weights`.
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<f64>,
    node_count: usize,
    /// Small memo of full single-source sweeps keyed by source node.
    cache: Mutex<SweepCache>,
}

#[derive(Debug, Default)]
struct SweepCache {
    map: HashMap<usize, Arc<ShortestPaths>>,
    order: Vec<usize>,
}

const CACHE_CAP: usize = 128;

impl GraphModel {
    /// Build from an undirected edge list. Each `(a, b, w)` is inserted in
    /// both directions; duplicate edges keep the smallest weight.
    pub fn from_edges(node_count: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        if node_count == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); node_count];
        for &(a, b, w) in edges {
            if a >= node_count || b >= node_count {
                return Err(Error::EdgeOutOfRange {
                    a,
                    b,
                    nodes: node_count,
                });
            }
            if w <= 0.0 || !w.is_finite() {
                return Err(Error::NonPositiveWeight { a, b, weight: w });
            }
            adj[a].push((b, w));
            adj[b].push((a, w));
        }
        for list in &mut adj {
            list.sort_by(|p, q| p.0.cmp(&q.0).then(p.1.partial_cmp(&q.1).unwrap()));
            list.dedup_by(|next, prev| {
                if next.0 == prev.0 {
                    // Keep the smaller weight, which sorts first.
                    true
                } else {
                    false
                }
            });
        }
        let mut offsets = Vec::with_capacity(node_count + 1);
        let mut targets = Vec::new();
        let mut weights = Vec::new();
        offsets.push(0);
        for list in &adj {
            for &(v, w) in list {
                targets.push(v);
                weights.push(w);
            }
            offsets.push(targets.len());
        }
        let graph = GraphModel {
            offsets,
            targets,
            weights,
            node_count,
            cache: Mutex::new(SweepCache::default()),
        };
        graph.check_connected()?;
        Ok(graph)
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.offsets[u]..self.offsets[u + 1];
        range.map(move |k| (self.targets[k], self.weights[k]))
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn max_edge_weight(&self) -> f64 {
        self.weights.iter().cloned().fold(0.0, f64::max)
    }

    fn check_connected(&self) -> Result<()> {
        let mut seen = vec![false; self.node_count];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for (v, _) in self.neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        if count != self.node_count {
            let missing = seen.iter().position(|s| !s).unwrap();
            return Err(Error::DisconnectedGraph { root: 0, missing });
        }
        Ok(())
    }

    /// Full single-source sweep, memoized. The returned distances are exact
    /// shortest-path sums; predecessors realize the tie-broken paths.
    pub fn sweep_from(&self, source: usize) -> Arc<ShortestPaths> {
        {
            let cache = self.cache.lock().unwrap();
            if let Some(hit) = cache.map.get(&source) {
                return Arc::clone(hit);
            }
        }
        let sweep = Arc::new(self.dijkstra(source, None));
        let mut cache = self.cache.lock().unwrap();
        if cache.map.len() >= CACHE_CAP {
            if let Some(old) = cache.order.first().cloned() {
                cache.order.remove(0);
                cache.map.remove(&old);
            }
        }
        cache.order.push(source);
        cache.map.insert(source, Arc::clone(&sweep));
        sweep
    }

    /// Distance between two nodes.
    pub fn distance(&self, a: usize, b: usize) -> f64 {
        if a == b {
            return 0.0;
        }
        {
            let cache = self.cache.lock().unwrap();
            if let Some(hit) = cache.map.get(&a) {
                return hit.dist[b];
            }
            if let Some(hit) = cache.map.get(&b) {
                return hit.dist[a];
            }
        }
        self.sweep_from(a).dist[b]
    }

    /// Single-pair distance with early termination; does not touch the memo.
    pub fn distance_early_exit(&self, a: usize, b: usize) -> f64 {
        if a == b {
            return 0.0;
        }
        let sweep = self.dijkstra(a, Some(b));
        sweep.dist[b]
    }

    /// Distance from every node to the nearest of the given sources, via
    /// one sweep seeded with all of them. Used to certify how well a node
    /// sample covers the graph.
    pub fn distances_to_set(&self, sources: &[usize]) -> Vec<f64> {
        let mut dist = vec![f64::INFINITY; self.node_count];
        let mut done = vec![false; self.node_count];
        let mut heap = BinaryHeap::new();
        for &s in sources {
            if dist[s] > 0.0 {
                dist[s] = 0.0;
                heap.push(HeapEntry {
                    dist: 0.0,
                    node: s,
                    pred: s,
                });
            }
        }
        while let Some(HeapEntry { dist: d, node: u, .. }) = heap.pop() {
            if done[u] {
                continue;
            }
            done[u] = true;
            for (v, w) in self.neighbors(u) {
                let nd = d + w;
                if nd < dist[v] {
                    dist[v] = nd;
                    heap.push(HeapEntry {
                        dist: nd,
                        node: v,
                        pred: u,
                    });
                }
            }
        }
        dist
    }

    fn dijkstra(&self, source: usize, stop_at: Option<usize>) -> ShortestPaths {
        let mut dist = vec![f64::INFINITY; self.node_count];
        let mut pred = vec![usize::MAX; self.node_count];
        let mut done = vec![false; self.node_count];
        let mut heap = BinaryHeap::new();
        dist[source] = 0.0;
        pred[source] = source;
        heap.push(HeapEntry {
            dist: 0.0,
            node: source,
            pred: source,
        });
        while let Some(HeapEntry { dist: d, node: u, .. }) = heap.pop() {
            if done[u] {
                continue;
            }
            done[u] = true;
            if stop_at == Some(u) {
                break;
            }
            for (v, w) in self.neighbors(u) {
                let nd = d + w;
                if nd < dist[v] {
                    dist[v] = nd;
                    pred[v] = u;
                    heap.push(HeapEntry {
                        dist: nd,
                        node: v,
                        pred: u,
                    });
                } else if nd == dist[v] && !done[v] && u < pred[v] {
                    // Equal-length alternative through a smaller index:
                    // prefer it so extracted paths are deterministic.
                    pred[v] = u;
                    heap.push(HeapEntry {
                        dist: nd,
                        node: v,
                        pred: u,
                    });
                }
            }
        }
        ShortestPaths { source, dist, pred }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_graph(n: usize) -> GraphModel {
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1, 1.0)).collect();
        GraphModel::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn path_graph_distances_are_index_differences() {
        let g = path_graph(10);
        assert_eq!(g.distance(0, 9), 9.0);
        assert_eq!(g.distance(3, 5), 2.0);
    }

    #[test]
    fn disconnected_graph_is_rejected() {
        let err = GraphModel::from_edges(4, &[(0, 1, 1.0), (2, 3, 1.0)]).unwrap_err();
        match err {
            Error::DisconnectedGraph { missing, .. } => {
                assert!(missing == 2 || missing == 3, "unexpected witness {missing}")
            }
            other => panic!("expected DisconnectedGraph, got {other}"),
        }
    }

    #[test]
    fn non_positive_weight_is_rejected() {
        let err = GraphModel::from_edges(2, &[(0, 1, 0.0)]).unwrap_err();
        assert!(matches!(err, Error::NonPositiveWeight { .. }), "got {err}");
        let err = GraphModel::from_edges(2, &[(0, 1, -2.0)]).unwrap_err();
        assert!(matches!(err, Error::NonPositiveWeight { .. }), "got {err}");
    }

    #[test]
    fn tie_break_prefers_smaller_predecessor() {
        // Two equal-length routes 0-1-3 and 0-2-3; path extraction should
        // route through node 1.
        let g = GraphModel::from_edges(
            4,
            &[(0, 1, 1.0), (0, 2, 1.0), (1, 3, 1.0), (2, 3, 1.0)],
        )
        .unwrap();
        let sweep = g.sweep_from(0);
        assert_eq!(sweep.path_to(3), vec![0, 1, 3]);
    }

    #[test]
    fn early_exit_matches_full_sweep() {
        let g = GraphModel::from_edges(
            5,
            &[
                (0, 1, 0.5),
                (1, 2, 0.25),
                (2, 3, 1.5),
                (3, 4, 0.125),
                (0, 4, 4.0),
                (1, 3, 1.0),
            ],
        )
        .unwrap();
        for a in 0..5 {
            for b in 0..5 {
                let full = g.sweep_from(a).dist[b];
                let fast = g.distance_early_exit(a, b);
                assert_eq!(full, fast, "mismatch at ({a}, {b})");
            }
        }
    }
}
