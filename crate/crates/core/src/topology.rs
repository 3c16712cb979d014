//! Physical network model: nodes, undirected fiber links, wavelengths per
//! fiber and the set of nodes equipped with wavelength converters.
//!
//! Every undirected edge carries one fiber per direction, so the occupancy
//! model works on [`DirectedLink`]s. Each directed link gets a dense index
//! ([`LinkId`]) used by the occupancy tables in [`crate::state`].

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense index of a directed link inside a [`Topology`].
pub type LinkId = usize;

pub const DEFAULT_WAVELENGTHS: usize = 40;

/// Identity of a lightpath. A lightpath is named after the request it serves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LightpathId(pub u64);

impl fmt::Display for LightpathId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DirectedLink {
    pub from: usize,
    pub to: usize,
}

impl DirectedLink {
    pub fn new(from: usize, to: usize) -> Self {
        Self { from, to }
    }

    pub fn reversed(self) -> Self {
        Self::new(self.to, self.from)
    }
}

/// Ordered origin-destination pair. The demand set is a multiset: the same
/// pair may be requested many times under different ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LightpathRequest {
    pub id: LightpathId,
    #[serde(rename = "src")]
    pub source: usize,
    #[serde(rename = "dst")]
    pub destination: usize,
}

impl LightpathRequest {
    pub fn new(id: u64, source: usize, destination: usize) -> Self {
        Self {
            id: LightpathId(id),
            source,
            destination,
        }
    }
}

/// Unvalidated topology description, as read from disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawTopology {
    pub nodes: usize,
    #[serde(default = "default_wavelengths")]
    pub wavelengths: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default)]
    pub converters: Vec<usize>,
}

fn default_wavelengths() -> usize {
    DEFAULT_WAVELENGTHS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTopology", into = "RawTopology")]
pub struct Topology {
    node_count: usize,
    edges: Vec<(usize, usize)>,
    wavelengths: usize,
    converters: BTreeSet<usize>,
    adjacency: Vec<Vec<usize>>,
    // node_count * node_count table, row = from, column = to
    link_index: Vec<Option<LinkId>>,
    links: Vec<DirectedLink>,
}

/// Checks a raw description and builds the indexed topology.
pub fn validate_topology(raw: &RawTopology) -> Result<Topology> {
    Topology::new(
        raw.nodes,
        raw.edges.iter().map(|&[a, b]| (a, b)),
        raw.wavelengths,
        raw.converters.iter().copied(),
    )
}

impl TryFrom<RawTopology> for Topology {
    type Error = Error;

    fn try_from(raw: RawTopology) -> Result<Self> {
        validate_topology(&raw)
    }
}

impl From<Topology> for RawTopology {
    fn from(t: Topology) -> Self {
        RawTopology {
            nodes: t.node_count,
            wavelengths: t.wavelengths,
            edges: t.edges.iter().map(|&(a, b)| [a, b]).collect(),
            converters: t.converters.iter().copied().collect(),
        }
    }
}

impl Topology {
    pub fn new(
        node_count: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        wavelengths: usize,
        converters: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        if node_count < 2 {
            return Err(Error::TooFewNodes(node_count));
        }
        if wavelengths < 1 {
            return Err(Error::NoWavelengths);
        }
        let check = |node: usize| {
            if node < node_count {
                Ok(())
            } else {
                Err(Error::NodeOutOfRange { node, node_count })
            }
        };

        let mut seen = HashSet::new();
        let mut edge_list = Vec::new();
        let mut adjacency = vec![Vec::new(); node_count];
        let mut link_index = vec![None; node_count * node_count];
        let mut links = Vec::new();
        for (a, b) in edges {
            check(a)?;
            check(b)?;
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(Error::DuplicateEdge(a, b));
            }
            edge_list.push((a, b));
            adjacency[a].push(b);
            adjacency[b].push(a);
            link_index[a * node_count + b] = Some(links.len());
            links.push(DirectedLink::new(a, b));
            link_index[b * node_count + a] = Some(links.len());
            links.push(DirectedLink::new(b, a));
        }
        for neighbours in &mut adjacency {
            neighbours.sort_unstable();
        }

        let converters: BTreeSet<usize> = converters.into_iter().collect();
        for &c in &converters {
            check(c)?;
        }

        Ok(Self {
            node_count,
            edges: edge_list,
            wavelengths,
            converters,
            adjacency,
            link_index,
            links,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// Undirected edges in input order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn wavelengths(&self) -> usize {
        self.wavelengths
    }

    pub fn converters(&self) -> &BTreeSet<usize> {
        &self.converters
    }

    pub fn is_converter(&self, node: usize) -> bool {
        self.converters.contains(&node)
    }

    /// Neighbours of `node` in ascending order.
    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    pub fn are_adjacent(&self, a: usize, b: usize) -> bool {
        self.link_id(a, b).is_some()
    }

    /// Number of directed links (twice the number of edges).
    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    pub fn link(&self, id: LinkId) -> DirectedLink {
        self.links[id]
    }

    pub fn link_id(&self, from: usize, to: usize) -> Option<LinkId> {
        if from >= self.node_count || to >= self.node_count {
            return None;
        }
        self.link_index[from * self.node_count + to]
    }

    /// Same graph with a different converter set.
    pub fn with_converters(&self, converters: impl IntoIterator<Item = usize>) -> Result<Self> {
        let converters: BTreeSet<usize> = converters.into_iter().collect();
        if let Some(&node) = converters.iter().find(|&&c| c >= self.node_count) {
            return Err(Error::NodeOutOfRange {
                node,
                node_count: self.node_count,
            });
        }
        Ok(Self {
            converters,
            ..self.clone()
        })
    }

    pub fn without_converters(&self) -> Self {
        Self {
            converters: BTreeSet::new(),
            ..self.clone()
        }
    }

    /// Checks every request against this topology and rejects repeated ids.
    pub fn validate_requests(&self, requests: &[LightpathRequest]) -> Result<()> {
        let mut ids = HashSet::new();
        for r in requests {
            for node in [r.source, r.destination] {
                if node >= self.node_count {
                    return Err(Error::NodeOutOfRange {
                        node,
                        node_count: self.node_count,
                    });
                }
            }
            if r.source == r.destination {
                return Err(Error::DegenerateRequest(r.id));
            }
            if !ids.insert(r.id) {
                return Err(Error::DuplicateRequestId(r.id));
            }
        }
        Ok(())
    }
}
