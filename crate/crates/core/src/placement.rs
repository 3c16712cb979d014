//! Bottleneck converter placement.
//!
//! Solve without converters, count how many established lightpaths transit
//! each node, put a converter on the busiest node and solve again with
//! converter-aware route probabilities. Repeats once per requested
//! converter.

use std::collections::BTreeSet;

use crate::bco::{solve_with_state, Mode, SolverConfig};
use crate::error::{Error, Result};
use crate::solution::Solution;
use crate::state::NetworkState;
use crate::topology::{LightpathRequest, Topology};

/// Per-node count of established lightpaths passing through the node as
/// an interior (transit) node. Endpoints are not counted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitCensus {
    counts: Vec<usize>,
}

impl TransitCensus {
    pub fn from_counts(counts: Vec<usize>) -> Self {
        Self { counts }
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn count(&self, node: usize) -> usize {
        self.counts[node]
    }

    /// Busiest node outside `exclude`, smallest index on ties. When no
    /// candidate carries transit traffic the smallest-index candidate of
    /// degree at least 2 is returned (or the smallest candidate overall)
    /// with `no_transit` set. `None` if every node is excluded.
    pub fn bottleneck(&self, topology: &Topology, exclude: &BTreeSet<usize>) -> Option<Bottleneck> {
        let candidates = || (0..self.counts.len()).filter(|v| !exclude.contains(v));
        let busiest = candidates().fold(None, |best: Option<usize>, v| match best {
            Some(b) if self.counts[b] >= self.counts[v] => Some(b),
            _ => Some(v),
        })?;
        if self.counts[busiest] > 0 {
            return Some(Bottleneck {
                node: busiest,
                no_transit: false,
            });
        }
        let node = candidates()
            .find(|&v| v < topology.node_count() && topology.degree(v) >= 2)
            .unwrap_or(busiest);
        Some(Bottleneck { node, no_transit: true })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bottleneck {
    pub node: usize,
    /// Set when no node carried transit traffic and the fallback was used.
    pub no_transit: bool,
}

pub fn transit_census(node_count: usize, solution: &Solution) -> TransitCensus {
    let mut counts = vec![0; node_count];
    for a in &solution.established {
        for &v in a.route.interior() {
            counts[v] += 1;
        }
    }
    TransitCensus { counts }
}

/// Bottleneck of `census` over all nodes.
pub fn select_bottleneck(census: &TransitCensus, topology: &Topology) -> Bottleneck {
    census
        .bottleneck(topology, &BTreeSet::new())
        .expect("census covers at least one node")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlacementPass {
    /// Converters in force while this pass was solved.
    pub converters: BTreeSet<usize>,
    pub objective: usize,
    pub census: Vec<usize>,
    pub chosen: Bottleneck,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlacementOutcome {
    pub solution: Solution,
    pub converters: BTreeSet<usize>,
    pub passes: Vec<PlacementPass>,
}

impl PlacementOutcome {
    /// Objectives of every placement pass followed by the final solve.
    pub fn objectives(&self) -> Vec<usize> {
        self.passes
            .iter()
            .map(|p| p.objective)
            .chain(std::iter::once(self.solution.objective))
            .collect()
    }

    pub fn no_transit(&self) -> bool {
        self.passes.iter().any(|p| p.chosen.no_transit)
    }
}

pub fn place_and_solve(
    topology: &Topology,
    requests: &[LightpathRequest],
    config: &SolverConfig,
    converter_count: usize,
) -> Result<PlacementOutcome> {
    place_and_solve_with_state(topology, requests, None, config, converter_count)
}

/// Placement loop starting from the converters already in `topology`
/// (normally none). Each placement pass runs
/// [`SolverConfig::effective_placement_iterations`] flights; the final
/// solve runs the full `iterations`.
pub fn place_and_solve_with_state(
    topology: &Topology,
    requests: &[LightpathRequest],
    initial: Option<&NetworkState>,
    config: &SolverConfig,
    converter_count: usize,
) -> Result<PlacementOutcome> {
    if converter_count > topology.node_count() {
        return Err(Error::TooManyConverters {
            count: converter_count,
            node_count: topology.node_count(),
        });
    }
    config.validate()?;

    let mode_for = |converters: &BTreeSet<usize>| {
        if converters.is_empty() {
            Mode::Basic
        } else {
            Mode::Prob
        }
    };
    let mut converters = topology.converters().clone();
    let mut passes = Vec::new();
    for _ in 0..converter_count {
        let pass_config = SolverConfig {
            mode: mode_for(&converters),
            iterations: config.effective_placement_iterations(),
            ..config.clone()
        };
        let current = topology.with_converters(converters.iter().copied())?;
        let solution = solve_with_state(&current, requests, initial, &pass_config)?;
        let census = transit_census(topology.node_count(), &solution);
        let Some(chosen) = census.bottleneck(topology, &converters) else {
            break;
        };
        passes.push(PlacementPass {
            converters: converters.clone(),
            objective: solution.objective,
            census: census.counts,
            chosen,
        });
        converters.insert(chosen.node);
    }

    let final_config = config.with_mode(mode_for(&converters));
    let current = topology.with_converters(converters.iter().copied())?;
    let solution = solve_with_state(&current, requests, initial, &final_config)?;
    Ok(PlacementOutcome {
        solution,
        converters,
        passes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bco::solve;
    use crate::route::Route;
    use crate::state::SegmentedAssignment;
    use crate::topology::LightpathId;

    fn sol(routes: &[&[usize]]) -> Solution {
        Solution::new(
            routes
                .iter()
                .enumerate()
                .map(|(i, r)| SegmentedAssignment::continuous(LightpathId(i as u64), Route::new(r.to_vec()), 0))
                .collect(),
            vec![],
        )
    }

    fn star() -> Topology {
        Topology::new(5, [(0, 1), (0, 2), (0, 3), (0, 4)], 4, []).unwrap()
    }

    #[test]
    fn star_census_counts_hub() {
        let c = transit_census(5, &sol(&[&[1, 0, 2], &[2, 0, 3], &[3, 0, 4], &[4, 0, 1]]));
        assert_eq!(c.counts(), &[4, 0, 0, 0, 0]);
        assert_eq!(select_bottleneck(&c, &star()), Bottleneck { node: 0, no_transit: false });
    }

    #[test]
    fn single_hop_census_is_zero() {
        let c = transit_census(5, &sol(&[&[0, 1], &[2, 0]]));
        assert!(c.counts().iter().all(|&n| n == 0));
    }

    #[test]
    fn path_census() {
        let c = transit_census(4, &sol(&[&[0, 1, 2], &[1, 2, 3]]));
        assert_eq!(c.counts(), &[0, 1, 1, 0]);
    }

    #[test]
    fn bottleneck_ties_and_fallback() {
        let t = Topology::new(3, [(0, 1), (1, 2)], 2, []).unwrap();
        assert_eq!(
            select_bottleneck(&TransitCensus::from_counts(vec![4, 0, 0]), &t).node,
            0
        );
        let tie = Topology::new(3, [(0, 1), (1, 2), (0, 2)], 2, []).unwrap();
        assert_eq!(
            select_bottleneck(&TransitCensus::from_counts(vec![0, 3, 3]), &tie),
            Bottleneck { node: 1, no_transit: false }
        );
        assert_eq!(
            select_bottleneck(&TransitCensus::from_counts(vec![0, 0, 0]), &t),
            Bottleneck { node: 1, no_transit: true }
        );
        let excl: BTreeSet<usize> = [1].into();
        assert_eq!(
            TransitCensus::from_counts(vec![0, 5, 2]).bottleneck(&t, &excl),
            Some(Bottleneck { node: 2, no_transit: false })
        );
        let all: BTreeSet<usize> = [0, 1, 2].into();
        assert_eq!(TransitCensus::from_counts(vec![0, 5, 2]).bottleneck(&t, &all), None);
    }

    fn star_requests() -> Vec<LightpathRequest> {
        let mut r = Vec::new();
        for s in 1..5 {
            for d in 1..5 {
                if s != d {
                    r.push(LightpathRequest::new(r.len() as u64, s, d));
                }
            }
        }
        r
    }

    #[test]
    fn zero_converters_matches_basic_solve() {
        let t = star();
        let config = SolverConfig { seed: 3, ..SolverConfig::default() };
        let out = place_and_solve(&t, &star_requests(), &config, 0).unwrap();
        let basic = solve(&t, &star_requests(), &config.with_mode(Mode::Basic)).unwrap();
        assert_eq!(out.solution, basic);
        assert!(out.converters.is_empty());
        assert!(out.passes.is_empty());
    }

    #[test]
    fn star_places_converter_at_hub() {
        let t = star();
        let config = SolverConfig { seed: 3, ..SolverConfig::default() };
        let out = place_and_solve(&t, &star_requests(), &config, 1).unwrap();
        assert_eq!(out.converters, [0].into());
        assert_eq!(out.objectives().len(), 2);
        let again = place_and_solve(&t, &star_requests(), &config, 1).unwrap();
        assert_eq!(out, again);
    }

    #[test]
    fn too_many_converters() {
        let t = star();
        assert_eq!(
            place_and_solve(&t, &[], &SolverConfig::default(), 6),
            Err(Error::TooManyConverters { count: 6, node_count: 5 })
        );
        let out = place_and_solve(&t, &[], &SolverConfig::default(), 5).unwrap();
        assert_eq!(out.converters.len(), 5);
    }
}
