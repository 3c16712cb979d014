//! Routes and candidate-route generation.
//!
//! Candidates are the `k` loop-free routes that come first in the order
//! (hop count, node sequence). They are produced with Yen's algorithm; the
//! spur search returns the lexicographically smallest among the minimum-hop
//! paths, which keeps Yen exact under that total order.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::topology::{DirectedLink, LightpathRequest, LinkId, Topology};

pub const DEFAULT_CANDIDATE_ROUTES: usize = 3;

/// A directed node path `[v0, ..., vh]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Route(Vec<usize>);

impl Route {
    /// Wraps a node sequence without checking it; see [`Route::link_ids`].
    pub fn new(nodes: Vec<usize>) -> Self {
        Self(nodes)
    }

    pub fn nodes(&self) -> &[usize] {
        &self.0
    }

    pub fn hops(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn source(&self) -> Option<usize> {
        self.0.first().copied()
    }

    pub fn destination(&self) -> Option<usize> {
        self.0.last().copied()
    }

    /// Nodes strictly between the endpoints.
    pub fn interior(&self) -> &[usize] {
        if self.0.len() <= 2 {
            &[]
        } else {
            &self.0[1..self.0.len() - 1]
        }
    }

    pub fn links(&self) -> impl Iterator<Item = DirectedLink> + '_ {
        self.0.windows(2).map(|w| DirectedLink::new(w[0], w[1]))
    }

    /// Validates the route as a simple path of `topology` and returns the
    /// ids of its directed links in travel order.
    pub fn link_ids(&self, topology: &Topology) -> Result<Vec<LinkId>> {
        if self.0.len() < 2 {
            return Err(Error::RouteTooShort);
        }
        let mut seen = HashSet::with_capacity(self.0.len());
        for &v in &self.0 {
            if v >= topology.node_count() {
                return Err(Error::NodeOutOfRange {
                    node: v,
                    node_count: topology.node_count(),
                });
            }
            if !seen.insert(v) {
                return Err(Error::RepeatedNode(v));
            }
        }
        self.0
            .windows(2)
            .map(|w| topology.link_id(w[0], w[1]).ok_or(Error::NotAdjacent(w[0], w[1])))
            .collect()
    }

    /// Hop-index ranges of the converter-delimited segments. A new segment
    /// starts after every interior node that is a converter in `topology`.
    pub fn segment_spans(&self, topology: &Topology) -> Vec<Range<usize>> {
        let mut spans = Vec::new();
        let mut start = 0;
        for (hop, &node) in self.0.iter().enumerate().take(self.hops()).skip(1) {
            if topology.is_converter(node) {
                spans.push(start..hop);
                start = hop;
            }
        }
        spans.push(start..self.hops());
        spans
    }

    /// Whether some interior node of the route is a converter.
    pub fn transits_converter(&self, topology: &Topology) -> bool {
        self.interior().iter().any(|&v| topology.is_converter(v))
    }
}

impl From<Vec<usize>> for Route {
    fn from(nodes: Vec<usize>) -> Self {
        Self(nodes)
    }
}

/// Up to `k` loop-free routes for the request, ascending by hop count with
/// ties broken by node sequence. Empty when no path exists.
pub fn k_shortest_routes(topology: &Topology, request: &LightpathRequest, k: usize) -> Vec<Route> {
    k_shortest_paths(topology, request.source, request.destination, k)
}

pub fn k_shortest_paths(topology: &Topology, source: usize, target: usize, k: usize) -> Vec<Route> {
    let n = topology.node_count();
    if k == 0 || source >= n || target >= n || source == target {
        return Vec::new();
    }
    let no_nodes = vec![false; n];
    let Some(first) = spur_path(topology, source, target, &no_nodes, &HashSet::new()) else {
        return Vec::new();
    };

    let mut accepted: Vec<Vec<usize>> = vec![first];
    let mut candidates: BTreeSet<(usize, Vec<usize>)> = BTreeSet::new();
    while accepted.len() < k {
        let previous = accepted.last().unwrap().clone();
        for i in 0..previous.len() - 1 {
            let spur = previous[i];
            let root = &previous[..=i];

            let mut blocked_links = HashSet::new();
            for path in &accepted {
                if path.len() > i + 1 && &path[..=i] == root {
                    blocked_links.insert((path[i], path[i + 1]));
                }
            }
            let mut blocked_nodes = vec![false; n];
            for &v in &root[..i] {
                blocked_nodes[v] = true;
            }

            if let Some(tail) = spur_path(topology, spur, target, &blocked_nodes, &blocked_links) {
                let mut full = root[..i].to_vec();
                full.extend(tail);
                candidates.insert((full.len() - 1, full));
            }
        }
        match candidates.pop_first() {
            Some((_, path)) => accepted.push(path),
            None => break,
        }
    }
    accepted.into_iter().map(Route).collect()
}

/// Minimum-hop path from `from` to `to`, lexicographically smallest among
/// equals, avoiding blocked nodes and blocked directed links.
fn spur_path(
    topology: &Topology,
    from: usize,
    to: usize,
    blocked_nodes: &[bool],
    blocked_links: &HashSet<(usize, usize)>,
) -> Option<Vec<usize>> {
    let n = topology.node_count();
    // hop distance to `to`, searched backwards over usable links
    let mut dist = vec![usize::MAX; n];
    dist[to] = 0;
    let mut queue = VecDeque::from([to]);
    while let Some(v) = queue.pop_front() {
        for &u in topology.neighbors(v) {
            if blocked_nodes[u] || dist[u] != usize::MAX || blocked_links.contains(&(u, v)) {
                continue;
            }
            dist[u] = dist[v] + 1;
            queue.push_back(u);
        }
    }
    if dist[from] == usize::MAX {
        return None;
    }

    let mut path = vec![from];
    let mut current = from;
    while current != to {
        let next = topology
            .neighbors(current)
            .iter()
            .copied()
            .find(|&v| {
                !blocked_nodes[v]
                    && dist[v] != usize::MAX
                    && dist[v] + 1 == dist[current]
                    && !blocked_links.contains(&(current, v))
            })
            .expect("distance labels admit a descent");
        path.push(next);
        current = next;
    }
    Some(path)
}
