mod common;

use nisim::gauss::Correlation;
use nisim::netsearch::*;
use nisim::stability::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rho(r: f64) -> Correlation {
    Correlation::new(r).unwrap()
}

fn sample_simplex(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..m).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
    let s: f64 = raw.iter().sum();
    raw.iter().map(|x| x / s).collect()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

#[test]
fn net_examples() {
    let net = simplex_net(2, 1.0).unwrap();
    assert!(net.len() <= 25);
    for want in [[1.0, 0.0], [0.0, 1.0], [0.5, 0.5]] {
        assert!(net.points().iter().any(|p| p.coords() == want));
    }
    let net = simplex_net(2, 0.5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..10_000 {
        let x = sample_simplex(&mut rng, 2);
        assert!(dist(net.points()[net.nearest(&x)].coords(), &x) <= 0.25);
    }
    assert!(simplex_net(1, 0.5).is_err());
    assert!(simplex_net(2, 0.0).is_err());
    assert!(simplex_net(2, 2.0).is_err());
    assert!(matches!(simplex_net(6, 1e-4), Err(nisim::Error::BudgetExceeded { .. })));
}

#[test]
fn net_covering_and_size() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for m in 2..=5 {
        for eps in [1.5, 0.8, 0.3] {
            let net = simplex_net(m, eps).unwrap();
            assert!((net.len() as f64) <= (1.0 + 4.0 / eps).powi(m as i32));
            for i in 0..m {
                assert!(net.points().iter().any(|p| p.coords()[i] == 1.0));
            }
            for _ in 0..10_000 {
                let x = sample_simplex(&mut rng, m);
                // brute-force nearest as an oracle
                let d = net.points().iter().map(|p| dist(p.coords(), &x)).fold(f64::INFINITY, f64::min);
                assert!(d <= eps / 2.0 + 1e-12, "m={m} eps={eps}: {d}");
                assert!((dist(net.points()[net.nearest(&x)].coords(), &x) - d).abs() < 1e-15);
            }
        }
    }
}

fn three_point_net() -> SimplexNet {
    let net = simplex_net(2, 1.0).unwrap();
    assert_eq!(net.len(), 3);
    net
}

#[test]
fn enumeration_examples() {
    let net = three_point_net();
    // one cell: a 1-D grid has at least three cells, so count functions on a single cell via digits
    let g1 = CellGrid::new(1, 4.0, 1).unwrap();
    let all: Vec<_> = enumerate_cell_functions(g1, &net, usize::MAX).collect();
    assert_eq!(all.len(), 27);

    let mut s = enumerate_cell_functions(g1, &net, 5);
    let first: Vec<_> = s.by_ref().collect();
    assert_eq!(first.len(), 5);
    assert!(s.truncated());
    assert_eq!(first, all[..5].to_vec());

    let mut s = enumerate_cell_functions(g1, &net, 27);
    assert_eq!(s.by_ref().count(), 27);
    assert!(!s.truncated());
    assert_eq!(s.total(), Some(27));
}

#[test]
fn enumeration_is_lexicographic_without_duplicates() {
    let net = three_point_net();
    let g = CellGrid::new(1, 4.0, 1).unwrap();
    let mut s = enumerate_cell_functions(g, &net, usize::MAX);
    let mut seen = Vec::new();
    while let Some(d) = s.next_digits() {
        seen.push(d);
    }
    assert_eq!(seen.len(), 27);
    assert!(seen.windows(2).all(|w| w[0] < w[1]));
    // the last cell is the fastest digit
    assert_eq!(seen[1], vec![0, 0, 1]);
    assert_eq!(seen[3], vec![0, 1, 0]);
}

#[test]
fn separation_examples() {
    let g = CellGrid::new(1, 4.0, 2).unwrap();
    let net = simplex_net(3, 0.6).unwrap();
    let consts: Vec<_> = net.points().iter().map(|p| CellFunction::constant(g, p)).collect();
    let min_gap = (0..net.len())
        .flat_map(|i| (i + 1..net.len()).map(move |j| (i, j)))
        .map(|(i, j)| dist(net.points()[i].coords(), net.points()[j].coords()))
        .fold(f64::INFINITY, f64::min);
    let kept = separated_set(consts.clone(), 4, 0.9 * min_gap).unwrap();
    assert_eq!(kept.len(), consts.len());

    let dup = vec![consts[0].clone(), consts[0].clone()];
    assert_eq!(separated_set(dup, 4, 1e-9).unwrap().len(), 1);
}

#[test]
fn separation_matches_bruteforce_oracle() {
    let net = three_point_net();
    let g = CellGrid::new(1, 4.0, 1).unwrap();
    let all: Vec<_> = enumerate_cell_functions(g, &net, usize::MAX).collect();
    let coeffs: Vec<_> = all.iter().map(|f| hermite_coeffs(f, default_degree_cap(0.3, rho(0.5))).unwrap()).collect();
    let cap = coeffs[0].cap();
    // oracle: greedy replay using a precomputed pairwise distance matrix
    let n = all.len();
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            d[i][j] = coeffs[i].table().iter().zip(coeffs[j].table()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        }
    }
    let mut oracle: Vec<usize> = Vec::new();
    for i in 0..n {
        if oracle.iter().all(|&k| d[i][k] >= 0.3) {
            oracle.push(i);
        }
    }
    let kept = separated_set(all.clone(), cap, 0.3).unwrap();
    assert_eq!(kept.len(), oracle.len());
    for ((f, _), &i) in kept.iter().zip(&oracle) {
        assert_eq!(f, &all[i]);
    }
    // maximality and separation
    for i in 0..n {
        let close = oracle.iter().any(|&k| d[i][k] < 0.3);
        assert!(close || oracle.contains(&i));
    }
    for &a in &oracle {
        for &b in &oracle {
            assert!(a == b || d[a][b] >= 0.3);
        }
    }
}

fn config_1d(eps: f64, cells: usize) -> SearchConfig {
    SearchConfig {
        epsilon: eps,
        net_epsilon: Some(eps / 2.0),
        domain_dimension: Some(1),
        cells_per_axis: cells,
        budget: 512,
        ..SearchConfig::default()
    }
}

#[test]
fn product_target_is_simulatable() {
    let t = DistributionMatrix::product(&[0.3, 0.7], &[0.6, 0.4]).unwrap();
    let cfg = SearchConfig { epsilon: 0.05, net_epsilon: Some(0.02), cells_per_axis: 2, budget: 256, ..SearchConfig::default() };
    for r in [0.5, -0.8] {
        let d = decide_gaussian(&t, rho(r), &cfg).unwrap();
        assert_eq!(d.verdict, Verdict::Simulatable);
        assert!(d.best_distance < 1e-9, "{}", d.best_distance);
    }
}

#[test]
fn borell_extremal_point_is_simulatable() {
    let t = DistributionMatrix::new(vec![vec![1.0 / 3.0, 1.0 / 6.0], vec![1.0 / 6.0, 1.0 / 3.0]]).unwrap();
    let d = decide_gaussian(&t, rho(0.5), &config_1d(0.05, 32)).unwrap();
    assert_eq!(d.verdict, Verdict::Simulatable);
    let (f, g) = d.witness.unwrap();
    // matched half-lines: f and g agree on most of the Gaussian mass
    let probs = axis_probabilities(f.grid());
    let agree: f64 = (0..f.grid().cell_count())
        .map(|c| probs[c] * (1.0 - 0.5 * common::max_abs_diff(f.cell_value(c), g.cell_value(c)) * 2.0).max(0.0))
        .sum();
    assert!(agree > 0.8, "{agree}");
}

#[test]
fn infeasible_target_is_never_simulatable() {
    let t = DistributionMatrix::new(vec![vec![0.45, 0.05], vec![0.05, 0.45]]).unwrap();
    let d = decide_gaussian(&t, rho(0.5), &config_1d(0.05, 32)).unwrap();
    assert_ne!(d.verdict, Verdict::Simulatable);
    assert!(d.best_distance > 0.05);
}

#[test]
fn epsilon_must_be_below_rho() {
    let t = DistributionMatrix::product(&[0.5, 0.5], &[0.5, 0.5]).unwrap();
    let cfg = SearchConfig { epsilon: 0.6, ..SearchConfig::default() };
    assert!(matches!(decide_gaussian(&t, rho(0.5), &cfg), Err(nisim::Error::EpsilonNotBelowRho { .. })));
    let cfg = SearchConfig { budget: 0, ..SearchConfig::default() };
    assert!(decide_gaussian(&t, rho(0.5), &cfg).is_err());
}

#[test]
fn simulatable_witness_survives_montecarlo() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..3 {
        let a: f64 = rng.random_range(0.3..0.7);
        let b = borell_bounds(a, a, rho(0.5)).unwrap();
        let c = 0.5 * (b.c_lo + b.c_hi);
        let t = DistributionMatrix::new(vec![vec![c, a - c], vec![a - c, 1.0 - 2.0 * a + c]]).unwrap();
        let d = decide_gaussian(&t, rho(0.5), &config_1d(0.05, 32)).unwrap();
        assert_eq!(d.verdict, Verdict::Simulatable);
        let (f, g) = d.witness.as_ref().unwrap();
        let est = crho_montecarlo(f, g, rho(0.5), 1_000_000, 5).unwrap();
        let tv = tv_distance(&est.matrix, &t).unwrap();
        assert!(tv <= 0.05 + 4.0 * est.max_std_err());
        let recomputed = tv_distance(&crho_quadrature(f, g, rho(0.5), 16).unwrap(), &t).unwrap();
        assert!((recomputed - d.best_distance).abs() < 1e-10);
    }
}

#[test]
fn borell_interior_targets_are_found() {
    let eps = 0.05;
    for a in [0.5, 0.35] {
        let b = borell_bounds(a, 0.5, rho(0.5)).unwrap();
        let (lo, hi) = (b.c_lo + eps, b.c_hi - eps);
        for i in 0..4 {
            let c = lo + (hi - lo) * i as f64 / 3.0;
            let t = DistributionMatrix::new(vec![vec![c, a - c], vec![0.5 - c, 0.5 - a + c]]).unwrap();
            let d = decide_gaussian(&t, rho(0.5), &config_1d(eps, 32)).unwrap();
            assert_eq!(d.verdict, Verdict::Simulatable, "a={a} c={c}: {}", d.best_distance);
        }
    }
}

#[test]
fn decisions_are_deterministic() {
    let t = DistributionMatrix::new(vec![vec![0.3, 0.2], vec![0.15, 0.35]]).unwrap();
    let cfg = config_1d(0.05, 16);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| serde_json::to_string(&decide_gaussian(&t, rho(0.6), &cfg).unwrap()).unwrap())
    };
    let one = run(1);
    assert_eq!(one, run(3));
    assert_eq!(one, run(1));
}

#[test]
fn decision_json_round_trip() {
    let t = DistributionMatrix::new(vec![vec![0.3, 0.2], vec![0.15, 0.35]]).unwrap();
    let d = decide_gaussian(&t, rho(0.6), &config_1d(0.05, 8)).unwrap();
    let s = serde_json::to_string(&d).unwrap();
    let back: GaussianDecision = serde_json::from_str(&s).unwrap();
    assert_eq!(back, d);
    assert_eq!(serde_json::to_string(&back).unwrap(), s);
    assert!(s.contains("\"verdict\":\"SIMULATABLE\""));
}

fn exhaustive(eps: f64, cells: usize, net_eps: f64) -> SearchConfig {
    SearchConfig {
        epsilon: eps,
        separation: Some(0.0),
        net_epsilon: Some(net_eps),
        domain_dimension: Some(1),
        cells_per_axis: cells,
        budget: 1_000_000,
        polish: false,
        structured_seeds: false,
        ..SearchConfig::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn refinement_never_hurts(seed in any::<u64>(), r in prop_oneof![-0.8f64..-0.2, 0.2f64..0.8]) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw: Vec<f64> = (0..4).map(|_| rng.random::<f64>()).collect();
        let s: f64 = raw.iter().sum();
        let t = DistributionMatrix::from_entries(2, raw.iter().map(|x| x / s).collect()).unwrap();
        // nets N=2 ⊂ N=4 and grids c=1 ⊂ c=2 are nested
        let base = decide_gaussian(&t, rho(r), &exhaustive(0.1, 1, 1.0)).unwrap();
        let finer_net = decide_gaussian(&t, rho(r), &exhaustive(0.1, 1, 0.4)).unwrap();
        let finer_grid = decide_gaussian(&t, rho(r), &exhaustive(0.1, 2, 1.0)).unwrap();
        prop_assert!(!base.truncated && !finer_net.truncated && !finer_grid.truncated);
        prop_assert_eq!(finer_net.config.net_resolution, 4);
        prop_assert!(finer_net.best_distance <= base.best_distance + 1e-9);
        prop_assert!(finer_grid.best_distance <= base.best_distance + 1e-9);
        // exhaustive search examines every pair
        prop_assert_eq!(base.candidates_examined, 27 * 27);
    }
}
