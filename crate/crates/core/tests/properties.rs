//! Property tests for the model invariants, cross-checked against
//! brute-force references written here.

use std::collections::BTreeSet;

use bco_rwa::bco::{backward_pass, route_choice_distribution, BeeState, Colony};
use bco_rwa::bench::{generate_requests, generate_topology};
use bco_rwa::placement::transit_census;
use bco_rwa::{
    exhaustive_optimum_with, k_shortest_routes, solve, validate_solution, LightpathId, LightpathRequest, Mode,
    NetworkState, Route, SegmentedAssignment, Solution, SolverConfig, Topology,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Every simple path from `s` to `t` by exhaustive DFS.
fn all_simple_paths(t: &Topology, s: usize, d: usize) -> Vec<Vec<usize>> {
    fn go(t: &Topology, d: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let v = *path.last().unwrap();
        if v == d {
            out.push(path.clone());
            return;
        }
        for &u in t.neighbors(v) {
            if !path.contains(&u) {
                path.push(u);
                go(t, d, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(t, d, &mut vec![s], &mut out);
    out
}

fn arb_topology(max_nodes: usize) -> impl Strategy<Value = Topology> {
    (2..=max_nodes, 1usize..4, any::<u64>()).prop_map(|(n, w, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if rand::Rng::gen_bool(&mut rng, 0.5) {
                    edges.push((a, b));
                }
            }
        }
        Topology::new(n, edges, w, []).unwrap()
    })
}

fn optimum(t: &Topology, requests: &[LightpathRequest]) -> bco_rwa::OracleResult {
    exhaustive_optimum_with(t, requests, 3, None, f64::INFINITY).unwrap()
}

fn random_solution_instance(seed: u64, nodes: usize, m: usize, w: usize) -> (Topology, Vec<LightpathRequest>) {
    let degree = 2.0 + (seed % 3) as f64 * 0.5;
    let t = generate_topology(nodes, degree, w, seed).unwrap();
    (t, generate_requests(nodes, m, seed ^ 0xabc))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn k_shortest_matches_enumeration(t in arb_topology(7), k in 1usize..6, s in 0usize..7, d in 0usize..7) {
        let n = t.node_count();
        let (s, d) = (s % n, d % n);
        prop_assume!(s != d);
        let mut expected = all_simple_paths(&t, s, d);
        expected.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
        expected.truncate(k);
        let got: Vec<Vec<usize>> = k_shortest_routes(&t, &LightpathRequest::new(0, s, d), k)
            .into_iter()
            .map(|r| r.nodes().to_vec())
            .collect();
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn commit_release_sequences_keep_exclusivity(seed in any::<u64>(), ops in 1usize..40) {
        let t = generate_topology(6, 2.5, 3, seed).unwrap().with_converters([2, 4]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut state = NetworkState::new(&t);
        let mut live: Vec<SegmentedAssignment> = Vec::new();
        for step in 0..ops {
            if !live.is_empty() && rand::Rng::gen_bool(&mut rng, 0.3) {
                let victim = live.swap_remove(rand::Rng::gen_range(&mut rng, 0..live.len()));
                state.release(victim.lightpath).unwrap();
            } else {
                let s = rand::Rng::gen_range(&mut rng, 0..6);
                let d = (s + rand::Rng::gen_range(&mut rng, 1..6)) % 6;
                let routes = k_shortest_routes(&t, &LightpathRequest::new(0, s, d), 3);
                let route = routes[rand::Rng::gen_range(&mut rng, 0..routes.len())].clone();
                let spans = route.segment_spans(&t).len();
                let ws: Vec<usize> = (0..spans).map(|_| rand::Rng::gen_range(&mut rng, 0..3)).collect();
                let a = SegmentedAssignment::from_route(&t, LightpathId(step as u64), route, &ws).unwrap();
                let before = state.clone();
                match state.commit(&t, &a) {
                    Ok(()) => live.push(a),
                    Err(_) => prop_assert_eq!(&state, &before),
                }
            }
            // occupancy must equal the union of live assignments, slot for slot
            let mut expected = NetworkState::new(&t);
            for a in &live {
                expected.commit(&t, a).unwrap();
            }
            prop_assert_eq!(&state, &expected);
        }
        for a in &live {
            state.release(a.lightpath).unwrap();
        }
        prop_assert!(state.is_empty());
    }

    #[test]
    fn directions_are_independent(seed in any::<u64>()) {
        let t = generate_topology(5, 2.4, 2, seed).unwrap();
        let (a, b) = t.edges()[0];
        let mut state = NetworkState::new(&t);
        state.commit(&t, &SegmentedAssignment::continuous(LightpathId(1), Route::new(vec![a, b]), 0)).unwrap();
        prop_assert!(state.is_free(t.link_id(b, a).unwrap(), 0));
        state.commit(&t, &SegmentedAssignment::continuous(LightpathId(2), Route::new(vec![b, a]), 0)).unwrap();
    }

    #[test]
    fn distribution_is_normalized(seed in any::<u64>(), fill in 0usize..30, gamma in 1.0f64..4.0, alpha in 0.0f64..3.0, beta in 0.0f64..3.0) {
        let t = generate_topology(7, 3.0, 4, seed).unwrap().with_converters([seed as usize % 7]).unwrap();
        let requests = generate_requests(7, fill, seed);
        let config = SolverConfig { alpha, beta, gamma, mode: Mode::Prob, ..SolverConfig::default() };
        let partial = solve(&t, &requests, &SolverConfig { iterations: 1, ..config.clone() }).unwrap();
        let mut state = NetworkState::new(&t);
        for a in &partial.established {
            state.commit(&t, a).unwrap();
        }
        for s in 0..7 {
            for d in 0..7 {
                if s == d { continue; }
                let routes = k_shortest_routes(&t, &LightpathRequest::new(0, s, d), 3);
                let p = route_choice_distribution(&state, &t, &routes, &config).unwrap();
                if !p.is_empty() {
                    let total: f64 = p.iter().map(|(_, q)| q).sum();
                    prop_assert!((total - 1.0).abs() < 1e-9);
                    prop_assert!(p.iter().all(|&(_, q)| q > 0.0));
                }
            }
        }
    }

    #[test]
    fn census_matches_recount(seed in any::<u64>()) {
        let (t, requests) = random_solution_instance(seed, 8, 40, 3);
        let s = solve(&t, &requests, &SolverConfig { iterations: 3, seed, mode: Mode::Basic, ..SolverConfig::default() }).unwrap();
        let census = transit_census(t.node_count(), &s);
        for v in 0..t.node_count() {
            let recount = s.established.iter().filter(|a| {
                let n = a.route.nodes();
                n[1..n.len() - 1].contains(&v)
            }).count();
            prop_assert_eq!(census.count(v), recount);
            prop_assert!(census.count(v) <= s.objective);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn solver_output_is_valid_deterministic_and_bounded(seed in any::<u64>(), mode_i in 0usize..3, m in 0usize..9) {
        let (t, requests) = random_solution_instance(seed, 5, m, 2);
        let t = t.with_converters([seed as usize % 5]).unwrap();
        let mode = Mode::ALL[mode_i];
        let config = SolverConfig { seed, mode, iterations: 8, ..SolverConfig::default() };
        let a = solve(&t, &requests, &config).unwrap();
        let b = solve(&t, &requests, &config).unwrap();
        prop_assert_eq!(&a, &b);
        let judged = if mode == Mode::Basic { t.without_converters() } else { t.clone() };
        let report = validate_solution(&judged, &requests, &a);
        prop_assert!(report.is_clean(), "{:?}", report);
        prop_assert!(a.objective <= requests.len());
        let opt = optimum(&judged, &requests).optimum;
        prop_assert!(a.objective <= opt);
    }

    #[test]
    fn recruitment_copies_stay_consistent(seed in any::<u64>()) {
        let (t, requests) = random_solution_instance(seed, 7, 60, 3);
        let t = t.with_converters([1]).unwrap();
        let config = SolverConfig { seed, mode: Mode::Prob, bees: 6, stage_size: 4, ..SolverConfig::default() };
        let colony = Colony::new(&t, &requests, None, &config).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut bees = vec![colony.fresh_bee(); config.bees];
        for u in 1..=5 {
            for bee in bees.iter_mut() {
                let start = bee.objective();
                colony.forward_pass(bee, &mut rng);
                prop_assert!(bee.objective() >= start);
                prop_assert_eq!(bee.attempted(), 4 * u);
            }
            let objectives: Vec<usize> = bees.iter().map(BeeState::objective).collect();
            backward_pass(&mut bees, &objectives, u, &mut rng);
            for bee in &bees {
                let attempted: BTreeSet<usize> = (0..requests.len()).filter(|i| !bee.unattempted.contains(i)).collect();
                let subset: Vec<LightpathRequest> = attempted.iter().map(|&i| requests[i]).collect();
                let partial = colony.to_solution(bee);
                prop_assert!(validate_solution(&t, &subset, &partial).is_clean());
                let mut rebuilt = NetworkState::new(&t);
                for a in &partial.established {
                    rebuilt.commit(&t, a).unwrap();
                }
                prop_assert_eq!(&rebuilt, &bee.state);
            }
        }
    }

    #[test]
    fn oracle_dominates_and_is_monotone(seed in any::<u64>(), m in 1usize..7) {
        let (t, requests) = random_solution_instance(seed, 5, m, 2);
        let v = seed as usize % 5;
        let none = optimum(&t, &requests);
        let one = optimum(&t.with_converters([v]).unwrap(), &requests);
        let all = optimum(&t.with_converters(0..5).unwrap(), &requests);
        prop_assert!(none.optimum <= one.optimum && one.optimum <= all.optimum);
        prop_assert!(validate_solution(&t, &requests, &none.witness).is_clean());
        prop_assert_eq!(none.witness.objective, none.optimum);
    }
}

#[test]
fn oracle_agrees_with_plain_enumeration() {
    // independent reference: try every (skip | route x wavelength) per request without pruning
    fn brute(t: &Topology, requests: &[LightpathRequest], i: usize, state: &mut NetworkState) -> usize {
        if i == requests.len() {
            return 0;
        }
        let mut best = brute(t, requests, i + 1, state);
        for route in k_shortest_routes(t, &requests[i], 3) {
            let spans = route.segment_spans(t).len();
            let combos = t.wavelengths().pow(spans as u32);
            for code in 0..combos {
                let ws: Vec<usize> = (0..spans).map(|j| code / t.wavelengths().pow(j as u32) % t.wavelengths()).collect();
                let a = SegmentedAssignment::from_route(t, requests[i].id, route.clone(), &ws).unwrap();
                if state.commit(t, &a).is_ok() {
                    best = best.max(1 + brute(t, requests, i + 1, state));
                    state.release(a.lightpath).unwrap();
                }
            }
        }
        best
    }
    for seed in 0..25u64 {
        let (t, requests) = random_solution_instance(seed, 5, 5, 2);
        let t = if seed % 2 == 0 { t.with_converters([seed as usize % 5]).unwrap() } else { t };
        let expected = brute(&t, &requests, 0, &mut NetworkState::new(&t));
        assert_eq!(optimum(&t, &requests).optimum, expected, "seed {seed}");
    }
}

#[test]
fn solution_json_round_trip() {
    let (t, requests) = random_solution_instance(3, 6, 20, 4);
    let s = solve(&t, &requests, &SolverConfig::default()).unwrap();
    let text = serde_json::to_string(&s).unwrap();
    let back: Solution = serde_json::from_str(&text).unwrap();
    assert_eq!(back, s);
}
