//! Bee colony optimization for static RWA.
//!
//! A colony of `bees` agents builds complete solutions in parallel. Each
//! flight alternates a forward pass, in which every bee tries to establish
//! up to `stage_size` more lightpaths, with a backward pass, in which bees
//! compare partial solutions and the weaker ones may abandon theirs and
//! follow a loyal recruiter. The best complete solution over `iterations`
//! flights is returned.
//!
//! Route choice is stochastic with utility
//!
//! ```text
//! U_r = (H_min / H_r)^alpha * ((F_r + 1) / (W + 1))^beta * gamma^c_r
//! ```
//!
//! where `H_r` is the hop count, `F_r` the number of free wavelengths on the
//! tightest segment and `c_r` is 1 when an interior node of the route holds
//! a converter. Wavelengths are assigned first-fit per segment.

use std::collections::HashMap;
use std::ops::Range;
use std::sync::Arc;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::route::{k_shortest_routes, Route, DEFAULT_CANDIDATE_ROUTES};
use crate::solution::Solution;
use crate::state::{NetworkState, SegmentedAssignment};
use crate::topology::{LightpathRequest, LinkId, Topology};
use crate::wavelength::WavelengthSet;

/// Algorithm variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Converters ignored, strict end-to-end wavelength continuity, no bonus.
    Basic,
    /// Converter-aware route probabilities on a given converter set.
    Prob,
    /// Bottleneck converter placement followed by a converter-aware solve.
    Full,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Basic, Mode::Prob, Mode::Full];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Basic => "basic",
            Mode::Prob => "prob",
            Mode::Full => "full",
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "basic" => Ok(Mode::Basic),
            "prob" => Ok(Mode::Prob),
            "full" => Ok(Mode::Full),
            other => Err(format!("unknown mode {other:?} (expected basic, prob or full)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Colony size.
    pub bees: usize,
    /// Requests attempted per bee in one forward pass.
    pub stage_size: usize,
    /// Candidate routes per request.
    pub candidate_routes: usize,
    /// Number of complete flights.
    pub iterations: usize,
    /// Hop-count exponent of the route utility.
    pub alpha: f64,
    /// Free-wavelength exponent of the route utility.
    pub beta: f64,
    /// Utility multiplier for routes that transit a converter. Forced to 1 in basic mode.
    pub gamma: f64,
    pub seed: u64,
    pub mode: Mode,
    /// Converters placed by full mode.
    pub converter_count: usize,
    /// Flights per placement (census) pass in full mode; `None` means
    /// `max(1, iterations / 5)`.
    pub placement_iterations: Option<usize>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            bees: 10,
            stage_size: 5,
            candidate_routes: DEFAULT_CANDIDATE_ROUTES,
            iterations: 50,
            alpha: 1.0,
            beta: 1.0,
            gamma: 1.5,
            seed: 0,
            mode: Mode::Full,
            converter_count: 1,
            placement_iterations: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::InvalidConfig(msg.to_owned()));
        if self.bees < 1 {
            return fail("bees must be at least 1");
        }
        if self.stage_size < 1 {
            return fail("stage_size must be at least 1");
        }
        if self.candidate_routes < 1 {
            return fail("candidate_routes must be at least 1");
        }
        if self.iterations < 1 {
            return fail("iterations must be at least 1");
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) || !(self.beta >= 0.0 && self.beta.is_finite()) {
            return fail("alpha and beta must be finite and non-negative");
        }
        if !(self.gamma >= 1.0 && self.gamma.is_finite()) {
            return fail("gamma must be finite and at least 1");
        }
        if self.placement_iterations == Some(0) {
            return fail("placement_iterations must be at least 1");
        }
        Ok(())
    }

    pub fn with_mode(&self, mode: Mode) -> Self {
        Self { mode, ..self.clone() }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }

    pub fn effective_gamma(&self) -> f64 {
        if self.mode == Mode::Basic {
            1.0
        } else {
            self.gamma
        }
    }

    pub fn effective_placement_iterations(&self) -> usize {
        self.placement_iterations.unwrap_or((self.iterations / 5).max(1))
    }
}

/// The topology a mode actually routes on: basic mode drops every converter.
pub fn routing_topology(topology: &Topology, mode: Mode) -> Topology {
    match mode {
        Mode::Basic => topology.without_converters(),
        Mode::Prob | Mode::Full => topology.clone(),
    }
}

/// A candidate route prepared against one routing topology.
#[derive(Debug, Clone)]
struct Candidate {
    route: Route,
    links: Vec<LinkId>,
    spans: Vec<Range<usize>>,
    transits_converter: bool,
}

impl Candidate {
    fn prepare(topology: &Topology, route: Route) -> Result<Self> {
        Ok(Self {
            links: route.link_ids(topology)?,
            spans: route.segment_spans(topology),
            transits_converter: route.transits_converter(topology),
            route,
        })
    }

    fn free_sets(&self, state: &NetworkState) -> Vec<WavelengthSet> {
        self.spans
            .iter()
            .map(|span| state.free_on_links(&self.links[span.clone()]))
            .collect()
    }
}

/// A feasible candidate with its selection probability.
#[derive(Debug, Clone)]
struct Choice {
    candidate: usize,
    probability: f64,
    free: Vec<WavelengthSet>,
}

fn choices(state: &NetworkState, candidates: &[Candidate], config: &SolverConfig) -> Vec<Choice> {
    let mut feasible: Vec<(usize, Vec<WavelengthSet>)> = candidates
        .iter()
        .enumerate()
        .map(|(i, c)| (i, c.free_sets(state)))
        .filter(|(_, free)| free.iter().all(|s| !s.is_empty()))
        .collect();
    if feasible.is_empty() {
        return Vec::new();
    }
    let min_hops = feasible
        .iter()
        .map(|(i, _)| candidates[*i].route.hops())
        .min()
        .unwrap() as f64;
    let wavelengths = state.wavelengths() as f64;
    let gamma = config.effective_gamma();
    let utilities: Vec<f64> = feasible
        .iter()
        .map(|(i, free)| {
            let c = &candidates[*i];
            let bottleneck = free.iter().map(WavelengthSet::len).min().unwrap() as f64;
            let hop_term = (min_hops / c.route.hops() as f64).powf(config.alpha);
            let free_term = ((bottleneck + 1.0) / (wavelengths + 1.0)).powf(config.beta);
            let bonus = if c.transits_converter { gamma } else { 1.0 };
            hop_term * free_term * bonus
        })
        .collect();
    let total: f64 = utilities.iter().sum();
    feasible
        .drain(..)
        .zip(utilities)
        .map(|((candidate, free), u)| Choice {
            candidate,
            probability: u / total,
            free,
        })
        .collect()
}

/// Selection probability of each feasible candidate, as `(index into
/// candidates, probability)`. Infeasible candidates are left out; an empty
/// result means the request cannot be served in `state`.
pub fn route_choice_distribution(
    state: &NetworkState,
    topology: &Topology,
    candidates: &[Route],
    config: &SolverConfig,
) -> Result<Vec<(usize, f64)>> {
    let routing = routing_topology(topology, config.mode);
    let prepared = candidates
        .iter()
        .map(|r| Candidate::prepare(&routing, r.clone()))
        .collect::<Result<Vec<_>>>()?;
    Ok(choices(state, &prepared, config)
        .into_iter()
        .map(|c| (c.candidate, c.probability))
        .collect())
}

/// Lowest free wavelength on each converter-delimited segment of `route`.
pub fn assign_wavelengths_first_fit(
    state: &NetworkState,
    topology: &Topology,
    route: &Route,
    lightpath: crate::topology::LightpathId,
) -> Result<SegmentedAssignment> {
    let wavelengths = state
        .free_wavelengths_per_segment(topology, route)?
        .iter()
        .map(|s| s.first().ok_or(Error::RouteInfeasible))
        .collect::<Result<Vec<_>>>()?;
    SegmentedAssignment::from_route(topology, lightpath, route.clone(), &wavelengths)
}

/// Uniform draw among the not yet attempted requests; the drawn entry is
/// removed from `unattempted`.
pub fn select_request<R: Rng + ?Sized>(unattempted: &mut Vec<usize>, rng: &mut R) -> usize {
    assert!(!unattempted.is_empty(), "no request left to select");
    let i = rng.gen_range(0..unattempted.len());
    unattempted.swap_remove(i)
}

/// One bee's partial solution.
#[derive(Debug, Clone)]
pub struct BeeState {
    pub state: NetworkState,
    /// Indices into the request list not visited yet.
    pub unattempted: Vec<usize>,
    pub established: Vec<Arc<SegmentedAssignment>>,
    /// Indices into the request list that could not be served.
    pub failed: Vec<usize>,
}

impl BeeState {
    pub fn objective(&self) -> usize {
        self.established.len()
    }

    pub fn attempted(&self) -> usize {
        self.established.len() + self.failed.len()
    }
}

/// Loyalty probability of a bee with normalized objective `normalized`
/// after forward pass `u` (1-based).
pub fn loyalty_probability(normalized: f64, best_normalized: f64, u: usize) -> f64 {
    (-(best_normalized - normalized) / u as f64).exp()
}

/// Min-max normalization; every value becomes 1 when all are equal.
pub fn normalize_objectives(objectives: &[usize]) -> Vec<f64> {
    let (Some(&min), Some(&max)) = (objectives.iter().min(), objectives.iter().max()) else {
        return Vec::new();
    };
    if min == max {
        return vec![1.0; objectives.len()];
    }
    let spread = (max - min) as f64;
    objectives.iter().map(|&c| (c - min) as f64 / spread).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BackwardOutcome {
    pub loyal: Vec<bool>,
    /// For each bee, the recruiter it copied from, if it was not loyal.
    pub recruited_from: Vec<Option<usize>>,
}

/// Loyalty decision and recruitment. Non-loyal bees replace their partial
/// solution with a copy of a loyal bee's, chosen with probability
/// proportional to the recruiter's normalized objective.
pub fn backward_pass<T: Clone, R: Rng + ?Sized>(
    population: &mut [T],
    objectives: &[usize],
    u: usize,
    rng: &mut R,
) -> BackwardOutcome {
    assert_eq!(population.len(), objectives.len());
    let normalized = normalize_objectives(objectives);
    let best = normalized.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut loyal: Vec<bool> = normalized
        .iter()
        .map(|&o| rng.gen::<f64>() < loyalty_probability(o, best, u))
        .collect();
    if !loyal.iter().any(|&l| l) {
        if let Some(i) = normalized.iter().position(|&o| o == best) {
            loyal[i] = true;
        }
    }

    let recruiters: Vec<usize> = (0..population.len()).filter(|&i| loyal[i]).collect();
    let weights: Vec<f64> = recruiters.iter().map(|&i| normalized[i]).collect();
    let picker = WeightedIndex::new(&weights).ok();
    let mut recruited_from = vec![None; population.len()];
    for bee in 0..population.len() {
        if loyal[bee] {
            continue;
        }
        let pick = match &picker {
            Some(p) => p.sample(rng),
            None => rng.gen_range(0..recruiters.len()),
        };
        recruited_from[bee] = Some(recruiters[pick]);
    }
    // recruiters are loyal, so their states are untouched by this loop
    for (bee, source) in recruited_from.iter().enumerate() {
        if let Some(source) = *source {
            population[bee] = population[source].clone();
        }
    }
    BackwardOutcome { loyal, recruited_from }
}

/// A prepared instance: routing topology, requests and candidate routes.
pub struct Colony<'a> {
    topology: Topology,
    requests: &'a [LightpathRequest],
    candidates: Vec<Arc<[Candidate]>>,
    initial: NetworkState,
    config: SolverConfig,
}

impl<'a> Colony<'a> {
    pub fn new(
        topology: &Topology,
        requests: &'a [LightpathRequest],
        initial: Option<&NetworkState>,
        config: &SolverConfig,
    ) -> Result<Self> {
        config.validate()?;
        topology.validate_requests(requests)?;
        let routing = routing_topology(topology, config.mode);
        let initial = match initial {
            Some(s) if !s.fits(topology) => {
                return Err(Error::InvalidConfig("initial state does not match the topology".into()))
            }
            Some(s) => s.clone(),
            None => NetworkState::new(topology),
        };

        let mut by_pair: HashMap<(usize, usize), Arc<[Candidate]>> = HashMap::new();
        let mut candidates = Vec::with_capacity(requests.len());
        for r in requests {
            let entry = match by_pair.get(&(r.source, r.destination)) {
                Some(c) => c.clone(),
                None => {
                    let prepared: Arc<[Candidate]> = k_shortest_routes(&routing, r, config.candidate_routes)
                        .into_iter()
                        .map(|route| Candidate::prepare(&routing, route))
                        .collect::<Result<Vec<_>>>()?
                        .into();
                    by_pair.insert((r.source, r.destination), prepared.clone());
                    prepared
                }
            };
            candidates.push(entry);
        }
        Ok(Self {
            topology: routing,
            requests,
            candidates,
            initial,
            config: config.clone(),
        })
    }

    pub fn routing_topology(&self) -> &Topology {
        &self.topology
    }

    pub fn fresh_bee(&self) -> BeeState {
        BeeState {
            state: self.initial.clone(),
            unattempted: (0..self.requests.len()).collect(),
            established: Vec::new(),
            failed: Vec::new(),
        }
    }

    /// Attempts `min(stage_size, remaining)` requests. Each is either
    /// established on a sampled feasible candidate or marked failed.
    pub fn forward_pass<R: Rng + ?Sized>(&self, bee: &mut BeeState, rng: &mut R) {
        let stages = self.config.stage_size.min(bee.unattempted.len());
        for _ in 0..stages {
            let index = select_request(&mut bee.unattempted, rng);
            let candidates = &self.candidates[index];
            let mut options = choices(&bee.state, candidates, &self.config);
            let chosen = match options.len() {
                0 => {
                    bee.failed.push(index);
                    continue;
                }
                1 => options.pop().unwrap(),
                _ => {
                    let dist = WeightedIndex::new(options.iter().map(|c| c.probability))
                        .expect("utilities are positive");
                    options.swap_remove(dist.sample(rng))
                }
            };

            let candidate = &candidates[chosen.candidate];
            let wavelengths: Vec<usize> = chosen.free.iter().map(|s| s.first().unwrap()).collect();
            let slots: Vec<(LinkId, usize)> = candidate
                .spans
                .iter()
                .zip(&wavelengths)
                .flat_map(|(span, &w)| candidate.links[span.clone()].iter().map(move |&l| (l, w)))
                .collect();
            let lightpath = self.requests[index].id;
            bee.state
                .commit_slots(&self.topology, lightpath, &slots)
                .expect("first-fit picks free slots");
            let assignment =
                SegmentedAssignment::from_route(&self.topology, lightpath, candidate.route.clone(), &wavelengths)
                    .expect("one wavelength per span");
            bee.established.push(Arc::new(assignment));
        }
    }

    /// Runs `iterations` flights and returns the best bee found.
    pub fn run(&self) -> BeeState {
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        let mut best: Option<BeeState> = None;
        for _ in 0..self.config.iterations {
            let mut bees = vec![self.fresh_bee(); self.config.bees];
            let mut u = 0;
            loop {
                u += 1;
                for bee in bees.iter_mut() {
                    self.forward_pass(bee, &mut rng);
                }
                if bees[0].unattempted.is_empty() {
                    break;
                }
                let objectives: Vec<usize> = bees.iter().map(BeeState::objective).collect();
                backward_pass(&mut bees, &objectives, u, &mut rng);
            }
            // first bee wins ties
            let champion = bees
                .into_iter()
                .reduce(|a, b| if b.objective() > a.objective() { b } else { a })
                .unwrap();
            if best.as_ref().is_none_or(|b| champion.objective() > b.objective()) {
                best = Some(champion);
            }
            if best.as_ref().unwrap().objective() == self.requests.len() {
                break;
            }
        }
        best.unwrap_or_else(|| self.fresh_bee())
    }

    pub fn to_solution(&self, bee: &BeeState) -> Solution {
        Solution::new(
            bee.established.iter().map(|a| (**a).clone()).collect(),
            bee.failed.iter().map(|&i| self.requests[i].id).collect(),
        )
    }
}

/// Solves with the converters of `topology` (ignored in basic mode). Full
/// mode's placement loop lives in [`crate::placement::place_and_solve`];
/// here `Mode::Full` behaves like `Mode::Prob`.
pub fn solve(topology: &Topology, requests: &[LightpathRequest], config: &SolverConfig) -> Result<Solution> {
    solve_with_state(topology, requests, None, config)
}

/// As [`solve`], starting from pre-established occupancy in `initial`.
pub fn solve_with_state(
    topology: &Topology,
    requests: &[LightpathRequest],
    initial: Option<&NetworkState>,
    config: &SolverConfig,
) -> Result<Solution> {
    let colony = Colony::new(topology, requests, initial, config)?;
    let best = colony.run();
    Ok(colony.to_solution(&best))
}
