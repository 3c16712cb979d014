//! Random instances and the three-variant comparison experiment.
//!
//! Every run index gets its own topology, demand set and solver seed, all
//! derived from the master seed. The three modes see bit-identical
//! instances for the same run index.

use std::collections::BTreeSet;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bco::{solve, Mode, SolverConfig};
use crate::error::{Error, Result};
use crate::placement::place_and_solve;
use crate::solution::{validate_solution, Solution};
use crate::topology::{LightpathRequest, Topology, DEFAULT_WAVELENGTHS};

/// SplitMix64 finalizer, used to derive independent seeds from a master seed.
pub fn mix_seed(seed: u64) -> u64 {
    let mut z = seed.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter().fold(mix_seed(master), |acc, &p| mix_seed(acc ^ mix_seed(p)))
}

/// Connected random graph: a uniform random spanning tree (decoded from a
/// random Prüfer sequence) plus uniformly drawn extra edges up to
/// `floor(nodes * avg_degree / 2)` edges.
pub fn generate_topology(nodes: usize, avg_degree: f64, wavelengths: usize, seed: u64) -> Result<Topology> {
    let infeasible = Error::InfeasibleDegree {
        nodes,
        degree: avg_degree,
    };
    if nodes < 2 || !avg_degree.is_finite() {
        return Err(infeasible);
    }
    let target = (nodes as f64 * avg_degree / 2.0 + 1e-9).floor() as usize;
    if target < nodes - 1 || target > nodes * (nodes - 1) / 2 {
        return Err(infeasible);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = random_tree(nodes, &mut rng);
    let present: BTreeSet<(usize, usize)> = edges.iter().copied().collect();
    let mut extra: Vec<(usize, usize)> = (0..nodes)
        .flat_map(|a| (a + 1..nodes).map(move |b| (a, b)))
        .filter(|e| !present.contains(e))
        .collect();
    extra.shuffle(&mut rng);
    edges.extend(extra.into_iter().take(target - edges.len()));
    edges.sort_unstable();
    Topology::new(nodes, edges, wavelengths, [])
}

fn random_tree(nodes: usize, rng: &mut impl Rng) -> Vec<(usize, usize)> {
    if nodes == 2 {
        return vec![(0, 1)];
    }
    let prufer: Vec<usize> = (0..nodes - 2).map(|_| rng.gen_range(0..nodes)).collect();
    let mut degree = vec![1usize; nodes];
    for &v in &prufer {
        degree[v] += 1;
    }
    let mut leaves: BTreeSet<usize> = (0..nodes).filter(|&v| degree[v] == 1).collect();
    let mut edges = Vec::with_capacity(nodes - 1);
    for &v in &prufer {
        let leaf = leaves.pop_first().expect("a tree always has a leaf");
        edges.push((leaf.min(v), leaf.max(v)));
        degree[v] -= 1;
        if degree[v] == 1 {
            leaves.insert(v);
        }
    }
    let last: Vec<usize> = leaves.into_iter().collect();
    edges.push((last[0], last[1]));
    edges
}

/// `count` ordered pairs drawn uniformly with replacement, ids `0..count`.
pub fn generate_requests(nodes: usize, count: usize, seed: u64) -> Vec<LightpathRequest> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|id| {
            let source = rng.gen_range(0..nodes);
            let mut destination = rng.gen_range(0..nodes - 1);
            if destination >= source {
                destination += 1;
            }
            LightpathRequest::new(id as u64, source, destination)
        })
        .collect()
}

/// Converter set handed to `prob` mode in the experiment: the node of
/// highest degree, smallest index on ties.
pub fn structural_converter(topology: &Topology) -> usize {
    (0..topology.node_count())
        .max_by_key(|&v| (topology.degree(v), std::cmp::Reverse(v)))
        .unwrap()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentPlan {
    pub sizes: Vec<usize>,
    pub repetitions: usize,
    pub avg_degree: f64,
    /// Requests per ordered node pair: `m = demand_per_pair * N * (N - 1)`.
    pub demand_per_pair: usize,
    pub wavelengths: usize,
    pub solver: SolverConfig,
    pub master_seed: u64,
}

impl Default for ExperimentPlan {
    fn default() -> Self {
        Self {
            sizes: (6..=11).collect(),
            repetitions: 30,
            avg_degree: 3.0,
            demand_per_pair: 10,
            wavelengths: DEFAULT_WAVELENGTHS,
            solver: SolverConfig::default(),
            master_seed: 0,
        }
    }
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<()> {
        if self.repetitions < 2 {
            return Err(Error::InvalidConfig("repetitions must be at least 2".into()));
        }
        if let Some(&n) = self.sizes.iter().find(|&&n| n < 2) {
            return Err(Error::InvalidConfig(format!("size {n} is below 2 nodes")));
        }
        if self.wavelengths < 1 {
            return Err(Error::NoWavelengths);
        }
        self.solver.validate()
    }

    pub fn request_count(&self, nodes: usize) -> usize {
        self.demand_per_pair * nodes * (nodes - 1)
    }

    pub fn instance(&self, nodes: usize, run: usize) -> Result<Instance> {
        let base = derive_seed(self.master_seed, &[nodes as u64, run as u64]);
        let topology_seed = derive_seed(base, &[1]);
        let requests_seed = derive_seed(base, &[2]);
        let solver_seed = derive_seed(base, &[3]);
        Ok(Instance {
            topology: generate_topology(nodes, self.avg_degree, self.wavelengths, topology_seed)?,
            requests: generate_requests(nodes, self.request_count(nodes), requests_seed),
            topology_seed,
            requests_seed,
            solver_seed,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub topology: Topology,
    pub requests: Vec<LightpathRequest>,
    pub topology_seed: u64,
    pub requests_seed: u64,
    pub solver_seed: u64,
}

/// Result of one mode on one instance.
#[derive(Debug, Clone)]
pub struct ModeRun {
    pub solution: Solution,
    pub converters: BTreeSet<usize>,
    pub no_transit: bool,
}

/// Runs one mode on one instance. `prob` gets [`structural_converter`],
/// `full` places `config.converter_count` converters.
pub fn run_mode(instance: &Instance, mode: Mode, config: &SolverConfig) -> Result<ModeRun> {
    let config = config.with_mode(mode).with_seed(instance.solver_seed);
    match mode {
        Mode::Basic => Ok(ModeRun {
            solution: solve(&instance.topology, &instance.requests, &config)?,
            converters: BTreeSet::new(),
            no_transit: false,
        }),
        Mode::Prob => {
            let converters: BTreeSet<usize> = [structural_converter(&instance.topology)].into();
            let topology = instance.topology.with_converters(converters.iter().copied())?;
            Ok(ModeRun {
                solution: solve(&topology, &instance.requests, &config)?,
                converters,
                no_transit: false,
            })
        }
        Mode::Full => {
            let out = place_and_solve(&instance.topology, &instance.requests, &config, config.converter_count)?;
            Ok(ModeRun {
                no_transit: out.no_transit(),
                solution: out.solution,
                converters: out.converters,
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub nodes: usize,
    pub mode: Mode,
    pub run: usize,
    pub topology_seed: u64,
    pub requests_seed: u64,
    pub solver_seed: u64,
    pub requests: usize,
    pub objective: usize,
    pub converters: Vec<usize>,
    pub no_transit: bool,
    pub violations: usize,
    pub time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub nodes: usize,
    pub mode: Mode,
    pub mean: f64,
    pub variance: f64,
    pub time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub rows: Vec<ExperimentRow>,
    pub runs: Vec<RunRecord>,
}

/// Mean and sample (n - 1) variance; variance is 0 for fewer than two values.
pub fn mean_and_variance(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let variance = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, variance)
}

/// Aggregates records into one row per `(nodes, mode)`, sorted.
pub fn summarize(runs: &[RunRecord]) -> Vec<ExperimentRow> {
    let keys: BTreeSet<(usize, Mode)> = runs.iter().map(|r| (r.nodes, r.mode)).collect();
    keys.into_iter()
        .map(|(nodes, mode)| {
            let group: Vec<&RunRecord> = runs.iter().filter(|r| r.nodes == nodes && r.mode == mode).collect();
            let objectives: Vec<f64> = group.iter().map(|r| r.objective as f64).collect();
            let (mean, variance) = mean_and_variance(&objectives);
            let time_s = group.iter().map(|r| r.time_s).sum::<f64>() / group.len() as f64;
            ExperimentRow {
                nodes,
                mode,
                mean,
                variance,
                time_s,
            }
        })
        .collect()
}

pub fn run_experiment(plan: &ExperimentPlan) -> Result<ExperimentReport> {
    plan.validate()?;
    let jobs: Vec<(usize, usize)> = plan
        .sizes
        .iter()
        .flat_map(|&n| (0..plan.repetitions).map(move |run| (n, run)))
        .collect();

    let per_job: Vec<Vec<RunRecord>> = jobs
        .par_iter()
        .map(|&(nodes, run)| {
            let instance = plan.instance(nodes, run)?;
            Mode::ALL
                .iter()
                .map(|&mode| {
                    let started = Instant::now();
                    let result = run_mode(&instance, mode, &plan.solver)?;
                    let time_s = started.elapsed().as_secs_f64();
                    let checked = instance.topology.with_converters(result.converters.iter().copied())?;
                    let violations = validate_solution(&checked, &instance.requests, &result.solution)
                        .violations
                        .len();
                    Ok(RunRecord {
                        nodes,
                        mode,
                        run,
                        topology_seed: instance.topology_seed,
                        requests_seed: instance.requests_seed,
                        solver_seed: instance.solver_seed,
                        requests: instance.requests.len(),
                        objective: result.solution.objective,
                        converters: result.converters.into_iter().collect(),
                        no_transit: result.no_transit,
                        violations,
                        time_s,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let mut runs: Vec<RunRecord> = per_job.into_iter().flatten().collect();
    runs.sort_by_key(|r| (r.nodes, r.mode, r.run));
    Ok(ExperimentReport {
        rows: summarize(&runs),
        runs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn connected(t: &Topology) -> bool {
        let mut seen = vec![false; t.node_count()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &u in t.neighbors(v) {
                if !std::mem::replace(&mut seen[u], true) {
                    stack.push(u);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    #[test]
    fn two_nodes_single_edge() {
        let t = generate_topology(2, 1.0, 40, 5).unwrap();
        assert_eq!(t.edges(), &[(0, 1)]);
    }

    #[test]
    fn six_nodes_degree_three() {
        for seed in 0..50 {
            let t = generate_topology(6, 3.0, 40, seed).unwrap();
            assert_eq!(t.edges().len(), 9);
            assert!(connected(&t));
        }
    }

    #[test]
    fn generation_is_deterministic() {
        assert_eq!(
            generate_topology(9, 3.0, 8, 77).unwrap(),
            generate_topology(9, 3.0, 8, 77).unwrap()
        );
        assert_eq!(generate_requests(9, 30, 4), generate_requests(9, 30, 4));
        assert_ne!(generate_requests(9, 30, 4), generate_requests(9, 30, 5));
    }

    #[test]
    fn infeasible_degrees() {
        assert!(matches!(generate_topology(6, 1.0, 4, 0), Err(Error::InfeasibleDegree { .. })));
        assert!(matches!(generate_topology(4, 4.0, 4, 0), Err(Error::InfeasibleDegree { .. })));
        assert!(generate_topology(4, 3.0, 4, 0).is_ok());
    }

    #[test]
    fn requests_shape() {
        assert!(generate_requests(5, 0, 1).is_empty());
        let r = generate_requests(2, 4, 9);
        assert_eq!(r.len(), 4);
        assert!(r.iter().all(|q| (q.source, q.destination) == (0, 1) || (q.source, q.destination) == (1, 0)));
    }

    #[test]
    fn sample_variance() {
        assert_eq!(mean_and_variance(&[10.0, 12.0]), (11.0, 2.0));
    }

    #[test]
    fn structural_converter_picks_max_degree() {
        let t = Topology::new(4, [(0, 1), (1, 2), (1, 3), (2, 3)], 2, []).unwrap();
        assert_eq!(structural_converter(&t), 1);
    }

    #[test]
    fn small_experiment_rows_and_pairing() {
        let plan = ExperimentPlan {
            sizes: vec![5],
            repetitions: 2,
            demand_per_pair: 1,
            wavelengths: 4,
            solver: SolverConfig {
                iterations: 5,
                ..SolverConfig::default()
            },
            ..ExperimentPlan::default()
        };
        let report = run_experiment(&plan).unwrap();
        assert_eq!(report.rows.len(), 3);
        assert_eq!(report.runs.len(), 6);
        assert!(report.runs.iter().all(|r| r.violations == 0));
        for run in 0..2 {
            let seeds: BTreeSet<_> = report
                .runs
                .iter()
                .filter(|r| r.run == run)
                .map(|r| (r.topology_seed, r.requests_seed, r.solver_seed))
                .collect();
            assert_eq!(seeds.len(), 1);
        }
        assert_eq!(summarize(&report.runs), report.rows);
    }
}
