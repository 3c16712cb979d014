//! Exact solver for desk-size instances.
//!
//! Depth-first over the requests in input order. Each request is either
//! skipped or served on one of its `k` candidate routes (the same generator
//! the heuristic uses) with any combination of per-segment wavelengths.
//! Branches that cannot beat the incumbent are cut, and wavelengths not yet
//! used anywhere are treated as interchangeable: only the lowest unused one
//! is tried.

use std::ops::Range;

use crate::error::{Error, Result};
use crate::route::{k_shortest_routes, Route};
use crate::solution::Solution;
use crate::state::{NetworkState, SegmentedAssignment};
use crate::topology::{LightpathRequest, LinkId, Topology};

pub const DEFAULT_SEARCH_LIMIT: f64 = 1e7;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub optimum: usize,
    pub witness: Solution,
    /// Search nodes visited.
    pub explored: u64,
}

/// Raw size of the search space: product over requests of
/// `1 + sum over candidates of W^segments`.
pub fn search_space(topology: &Topology, requests: &[LightpathRequest], candidate_k: usize) -> f64 {
    let w = topology.wavelengths() as f64;
    requests
        .iter()
        .map(|r| {
            1.0 + k_shortest_routes(topology, r, candidate_k)
                .iter()
                .map(|route| w.powi(route.segment_spans(topology).len() as i32))
                .sum::<f64>()
        })
        .product()
}

/// Maximum number of simultaneously establishable lightpaths, refusing
/// instances whose raw search space exceeds [`DEFAULT_SEARCH_LIMIT`].
pub fn exhaustive_optimum(
    topology: &Topology,
    requests: &[LightpathRequest],
    candidate_k: usize,
) -> Result<OracleResult> {
    exhaustive_optimum_with(topology, requests, candidate_k, None, DEFAULT_SEARCH_LIMIT)
}

/// As [`exhaustive_optimum`], starting from the occupancy in `initial` and
/// with an explicit search-space limit.
pub fn exhaustive_optimum_with(
    topology: &Topology,
    requests: &[LightpathRequest],
    candidate_k: usize,
    initial: Option<&NetworkState>,
    limit: f64,
) -> Result<OracleResult> {
    topology.validate_requests(requests)?;
    let size = search_space(topology, requests, candidate_k);
    if size > limit {
        return Err(Error::SearchSpaceExceeded { size, limit });
    }
    let state = match initial {
        Some(s) if !s.fits(topology) => {
            return Err(Error::InvalidConfig("initial state does not match the topology".into()))
        }
        Some(s) => s.clone(),
        None => NetworkState::new(topology),
    };

    let options = requests
        .iter()
        .map(|r| {
            k_shortest_routes(topology, r, candidate_k)
                .into_iter()
                .map(|route| {
                    Ok(RouteOption {
                        links: route.link_ids(topology)?,
                        spans: route.segment_spans(topology),
                        route,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let wavelengths = topology.wavelengths();
    let mut label_uses = vec![0usize; wavelengths];
    for link in 0..topology.link_count() {
        for (w, uses) in label_uses.iter_mut().enumerate() {
            if !state.is_free(link, w) {
                *uses += 1;
            }
        }
    }

    let mut search = Search {
        topology,
        options: &options,
        state,
        label_uses,
        current: vec![None; requests.len()],
        best: 0,
        best_choice: vec![None; requests.len()],
        explored: 0,
    };
    search.visit(0, 0);

    let mut established = Vec::new();
    let mut failed = Vec::new();
    for (i, (r, choice)) in requests.iter().zip(&search.best_choice).enumerate() {
        match choice {
            Some((c, ws)) => established.push(SegmentedAssignment::from_route(
                topology,
                r.id,
                options[i][*c].route.clone(),
                ws,
            )?),
            None => failed.push(r.id),
        }
    }
    Ok(OracleResult {
        optimum: search.best,
        witness: Solution::new(established, failed),
        explored: search.explored,
    })
}

struct RouteOption {
    route: Route,
    links: Vec<LinkId>,
    spans: Vec<Range<usize>>,
}

type Choice = Option<(usize, Vec<usize>)>;

struct Search<'a> {
    topology: &'a Topology,
    options: &'a [Vec<RouteOption>],
    state: NetworkState,
    // number of occupied slots per wavelength
    label_uses: Vec<usize>,
    current: Vec<Choice>,
    best: usize,
    best_choice: Vec<Choice>,
    explored: u64,
}

impl Search<'_> {
    fn visit(&mut self, request: usize, established: usize) {
        self.explored += 1;
        if request == self.options.len() {
            if established > self.best {
                self.best = established;
                self.best_choice = self.current.clone();
            }
            return;
        }
        if established + (self.options.len() - request) <= self.best {
            return;
        }
        for c in 0..self.options[request].len() {
            let mut picked = Vec::new();
            self.assign_segments(request, established, c, 0, &mut picked);
        }
        self.visit(request + 1, established);
    }

    fn assign_segments(&mut self, request: usize, established: usize, c: usize, segment: usize, picked: &mut Vec<usize>) {
        let option = &self.options[request][c];
        if segment == option.spans.len() {
            let slots: Vec<(LinkId, usize)> = option
                .spans
                .iter()
                .zip(picked.iter())
                .flat_map(|(span, &w)| option.links[span.clone()].iter().map(move |&l| (l, w)))
                .collect();
            let id = crate::topology::LightpathId(request as u64);
            self.state
                .commit_slots(self.topology, id, &slots)
                .expect("candidate wavelengths are free");
            for &(_, w) in &slots {
                self.label_uses[w] += 1;
            }
            self.current[request] = Some((c, picked.clone()));
            self.visit(request + 1, established + 1);
            self.current[request] = None;
            for &(_, w) in &slots {
                self.label_uses[w] -= 1;
            }
            self.state.clear_slots(&slots);
            return;
        }
        let free = self.state.free_on_links(&option.links[option.spans[segment].clone()]);
        // earlier segments of this lightpath count as used labels too
        let fresh = (0..self.label_uses.len()).find(|&w| self.label_uses[w] == 0 && !picked.contains(&w));
        let candidates: Vec<usize> = free
            .iter()
            .filter(|&w| self.label_uses[w] > 0 || picked.contains(&w) || Some(w) == fresh)
            .collect();
        for w in candidates {
            picked.push(w);
            self.assign_segments(request, established, c, segment + 1, picked);
            picked.pop();
        }
    }
}
