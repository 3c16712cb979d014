//! Solutions and the independent solution checker.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::state::SegmentedAssignment;
use crate::topology::{DirectedLink, LightpathId, LightpathRequest, Topology};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Solution {
    pub objective: usize,
    pub established: Vec<SegmentedAssignment>,
    pub failed: Vec<LightpathId>,
}

impl Solution {
    /// Builds a solution with `objective = established.len()`, both lists
    /// sorted by request id.
    pub fn new(mut established: Vec<SegmentedAssignment>, mut failed: Vec<LightpathId>) -> Self {
        established.sort_by_key(|a| a.lightpath);
        failed.sort();
        Self {
            objective: established.len(),
            established,
            failed,
        }
    }

    pub fn is_established(&self, id: LightpathId) -> bool {
        self.established.iter().any(|a| a.lightpath == id)
    }
}

/// Violation categories reported by [`validate_solution`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ViolationKind {
    /// (a) two lightpaths on the same directed link and wavelength
    SharedWavelength,
    /// (b) wavelength change at a non-converter node, or out-of-range wavelength
    Continuity,
    /// (c) route is not a valid simple path for its request, or segments do not tile it
    InvalidRoute,
    /// (d) objective differs from the number of established lightpaths
    ObjectiveMismatch,
    /// (e) request missing, repeated, or unknown
    Coverage,
}

impl ViolationKind {
    pub fn code(self) -> char {
        match self {
            Self::SharedWavelength => 'a',
            Self::Continuity => 'b',
            Self::InvalidRoute => 'c',
            Self::ObjectiveMismatch => 'd',
            Self::Coverage => 'e',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) {}", self.kind.code(), self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn count(&self, kind: ViolationKind) -> usize {
        self.violations.iter().filter(|v| v.kind == kind).count()
    }

    fn push(&mut self, kind: ViolationKind, message: String) {
        self.violations.push(Violation { kind, message });
    }
}

/// Checks a solution from first principles. Continuity is judged against
/// the converter set of `topology`. Nothing here reuses the occupancy
/// tables of [`crate::state`].
pub fn validate_solution(
    topology: &Topology,
    requests: &[LightpathRequest],
    solution: &Solution,
) -> ValidationReport {
    use ViolationKind::*;
    let mut report = ValidationReport::default();
    let by_id: HashMap<LightpathId, &LightpathRequest> = requests.iter().map(|r| (r.id, r)).collect();
    let mut holders: BTreeMap<(DirectedLink, usize), LightpathId> = BTreeMap::new();

    for a in &solution.established {
        let id = a.lightpath;
        let nodes = a.route.nodes();

        let mut route_ok = nodes.len() >= 2;
        if !route_ok {
            report.push(InvalidRoute, format!("lightpath {id}: route has fewer than two nodes"));
        }
        let mut seen = vec![false; topology.node_count()];
        for &v in nodes {
            if v >= topology.node_count() {
                report.push(InvalidRoute, format!("lightpath {id}: node {v} out of range"));
                route_ok = false;
            } else if std::mem::replace(&mut seen[v], true) {
                report.push(InvalidRoute, format!("lightpath {id}: node {v} repeated"));
                route_ok = false;
            }
        }
        for w in nodes.windows(2) {
            if !topology.are_adjacent(w[0], w[1]) {
                report.push(InvalidRoute, format!("lightpath {id}: {} and {} not adjacent", w[0], w[1]));
                route_ok = false;
            }
        }
        if let Some(r) = by_id.get(&id) {
            if nodes.first() != Some(&r.source) || nodes.last() != Some(&r.destination) {
                report.push(
                    InvalidRoute,
                    format!("lightpath {id}: route does not join {} to {}", r.source, r.destination),
                );
            }
        }

        let route_links: Vec<DirectedLink> = nodes.windows(2).map(|w| DirectedLink::new(w[0], w[1])).collect();
        let tiled: Vec<DirectedLink> = a.segments.iter().flat_map(|s| s.links.iter().copied()).collect();
        if tiled != route_links || a.segments.iter().any(|s| s.links.is_empty()) {
            report.push(InvalidRoute, format!("lightpath {id}: segments do not tile the route"));
            route_ok = false;
        }

        for s in &a.segments {
            if s.wavelength >= topology.wavelengths() {
                report.push(
                    Continuity,
                    format!("lightpath {id}: wavelength {} out of range", s.wavelength),
                );
            }
        }
        for pair in a.segments.windows(2) {
            let (Some(last), Some(_)) = (pair[0].links.last(), pair[1].links.first()) else {
                continue;
            };
            let node = last.to;
            if pair[0].wavelength != pair[1].wavelength && !topology.is_converter(node) {
                report.push(
                    Continuity,
                    format!(
                        "lightpath {id}: wavelength {} -> {} at non-converter node {node}",
                        pair[0].wavelength, pair[1].wavelength
                    ),
                );
            }
        }

        if route_ok {
            for s in &a.segments {
                for &link in &s.links {
                    if let Some(&other) = holders.get(&(link, s.wavelength)) {
                        report.push(
                            SharedWavelength,
                            format!(
                                "lightpaths {other} and {id} share {}->{} on wavelength {}",
                                link.from, link.to, s.wavelength
                            ),
                        );
                    } else {
                        holders.insert((link, s.wavelength), id);
                    }
                }
            }
        }
    }

    if solution.objective != solution.established.len() {
        report.push(
            ObjectiveMismatch,
            format!(
                "objective {} but {} lightpaths established",
                solution.objective,
                solution.established.len()
            ),
        );
    }

    let mut covered: BTreeMap<LightpathId, usize> = BTreeMap::new();
    for id in solution
        .established
        .iter()
        .map(|a| a.lightpath)
        .chain(solution.failed.iter().copied())
    {
        *covered.entry(id).or_default() += 1;
    }
    for (&id, &count) in &covered {
        if !by_id.contains_key(&id) {
            report.push(Coverage, format!("request {id} is not in the request set"));
        } else if count > 1 {
            report.push(Coverage, format!("request {id} covered {count} times"));
        }
    }
    for r in requests {
        if !covered.contains_key(&r.id) {
            report.push(Coverage, format!("request {} not covered", r.id));
        }
    }
    report
}
