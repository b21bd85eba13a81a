use nisim::gauss::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn rho(r: f64) -> Correlation {
    Correlation::new(r).unwrap()
}

// erf by its Maclaurin series, summed until terms vanish
fn erf_series(x: f64) -> f64 {
    let mut term = x;
    let mut sum = x;
    let mut n = 0.0;
    loop {
        n += 1.0;
        term *= -x * x / n;
        let add = term / (2.0 * n + 1.0);
        sum += add;
        if add.abs() < 1e-18 {
            break;
        }
    }
    sum * 2.0 / std::f64::consts::PI.sqrt()
}

fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn double_factorial(n: u32) -> f64 {
    (1..=n).rev().step_by(2).map(f64::from).product::<f64>().max(1.0)
}

fn gaussian_moment(a: u32) -> f64 {
    if a % 2 == 1 {
        0.0
    } else if a == 0 {
        1.0
    } else {
        double_factorial(a - 1)
    }
}

#[test]
fn cdf_examples() {
    assert_eq!(normal_cdf(0.0).unwrap(), 0.5);
    assert!((normal_cdf(10.0).unwrap() - 1.0).abs() < 1e-12);
    let oracle = 0.5 * (1.0 + erf_series(1.959964 / 2f64.sqrt()));
    assert!((oracle - 0.975).abs() < 1e-6);
    assert!((normal_cdf(1.959964).unwrap() - oracle).abs() < 1e-12);
}

#[test]
fn cdf_matches_series() {
    for i in -40..=40 {
        let x = i as f64 * 0.1;
        let oracle = 0.5 * (1.0 + erf_series(x / 2f64.sqrt()));
        assert!((normal_cdf(x).unwrap() - oracle).abs() < 1e-12, "x = {x}");
    }
}

#[test]
fn quantile_examples() {
    assert_eq!(normal_quantile(0.5).unwrap(), 0.0);
    let x = normal_quantile(normal_cdf(1.3).unwrap()).unwrap();
    assert!((x - 1.3).abs() < 1e-10);
    let oracle = bisect(-10.0, 10.0, |x| normal_cdf(x).unwrap() - 0.975);
    assert!((oracle - 1.959964).abs() < 1e-6);
    assert!((normal_quantile(0.975).unwrap() - oracle).abs() < 1e-10);
    assert!(normal_quantile(0.0).is_err());
    assert!(normal_quantile(1.0).is_err());
    assert!(normal_quantile(1.5).is_err());
}

#[test]
fn hermite_examples() {
    let q = quadrature_rule(1, 10).unwrap();
    let zero = MultiIndex::zero(3);
    assert_eq!(hermite_orthonormal(&zero, &[0.3, -2.0, 7.0]).unwrap(), 1.0);
    let j1 = MultiIndex::new(vec![1]).unwrap();
    assert_eq!(hermite_orthonormal(&j1, &[2.0]).unwrap(), 2.0);
    let j2 = MultiIndex::new(vec![2]).unwrap();
    assert!(hermite_orthonormal(&j2, &[1.0]).unwrap().abs() < 1e-15);
    let norm = q.integrate(|x| hermite_orthonormal(&j2, x).unwrap().powi(2));
    assert!((norm - 1.0).abs() < 1e-12);
}

#[test]
fn hermite_gram_is_identity() {
    for k in 1..=2 {
        let rule = quadrature_rule(k, 8).unwrap();
        let idx = MultiIndex::up_to_degree(k, 4);
        for a in &idx {
            for b in &idx {
                let g = rule.integrate(|x| hermite_orthonormal(a, x).unwrap() * hermite_orthonormal(b, x).unwrap());
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((g - want).abs() < 1e-8, "{a:?} {b:?}: {g}");
            }
        }
    }
}

#[test]
fn quadrature_examples() {
    let r = quadrature_rule(1, 2).unwrap();
    assert!((r.integrate(|x| x[0] * x[0]) - 1.0).abs() < 1e-15);
    let r = quadrature_rule(2, 4).unwrap();
    assert!((r.integrate(|x| x[0] * x[0] * x[1] * x[1]) - 1.0).abs() < 1e-12);
    let r = quadrature_rule(1, 8).unwrap();
    assert!((gaussian_moment(8) - 105.0).abs() < 1e-12);
    assert!((r.integrate(|x| x[0].powi(8)) - 105.0).abs() < 1e-9);
}

#[test]
fn quadrature_weights_sum_to_one() {
    for (k, q) in [(1, 1), (1, 7), (2, 12), (3, 6), (8, 2)] {
        let r = quadrature_rule(k, q).unwrap();
        let s: f64 = r.weights().iter().sum();
        assert!((s - 1.0).abs() < 1e-12, "k={k} q={q}: {s}");
        assert!(r.weights().iter().all(|&w| w > 0.0));
    }
}

#[test]
fn quadrature_budget() {
    assert!(matches!(quadrature_rule(9, 5), Err(nisim::Error::BudgetExceeded { .. })));
    assert!(QuadratureRule::gauss_hermite_with_budget(2, 10, 99).is_err());
}

#[test]
fn ou_examples() {
    let rule = quadrature_rule(2, 10).unwrap();
    let r = rho(0.6);
    for x in [[0.0, 0.0], [1.5, -2.0], [3.0, 0.1]] {
        assert!((ou_apply(|_| 1.0, r, &x, &rule).unwrap() - 1.0).abs() < 1e-12);
        let avg = rule.integrate(|y| (y[0] - 0.3).powi(2) * y[1].exp());
        let got = ou_apply(|y| (y[0] - 0.3).powi(2) * y[1].exp(), rho(0.0), &x, &rule).unwrap();
        assert!((got - avg).abs() < 1e-12);
    }
    assert!(ou_apply(|_| 1.0, r, &[0.0], &rule).is_err());
}

fn eigen_error(k: usize, r: f64) -> f64 {
    let rule = quadrature_rule(k, 8).unwrap();
    let mut worst: f64 = 0.0;
    for j in MultiIndex::up_to_degree(k, 6) {
        let lam = r.powi(j.degree() as i32);
        for x in rule.nodes() {
            let got = ou_apply(|y| hermite_orthonormal(&j, y).unwrap(), rho(r), x, &rule).unwrap();
            let want = lam * hermite_orthonormal(&j, x).unwrap();
            worst = worst.max((got - want).abs());
        }
    }
    worst
}

#[test]
fn ou_eigenrelation() {
    for k in 1..=2 {
        for r in [-0.7, 0.3, 0.9] {
            let e = eigen_error(k, r);
            assert!(e <= 1e-8, "k={k} rho={r}: {e}");
        }
    }
}

#[test]
fn ou_semigroup() {
    let rule = quadrature_rule(1, 8).unwrap();
    let poly = |y: &[f64]| 0.5 - y[0] + 2.0 * y[0].powi(2) - 0.3 * y[0].powi(3) + 0.1 * y[0].powi(4);
    let (r1, r2) = (0.8, -0.45);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let z: f64 = StandardNormal.sample(&mut rng);
        let x = 2.0 * z;
        let inner = |y: &[f64]| ou_apply(poly, rho(r2), y, &rule).unwrap();
        let lhs = ou_apply(inner, rho(r1), &[x], &rule).unwrap();
        let rhs = ou_apply(poly, rho(r1 * r2), &[x], &rule).unwrap();
        assert!((lhs - rhs).abs() < 1e-6);
    }
}

#[test]
fn kernel_examples() {
    let r0 = rho(0.0);
    let g = gauss_kernel(&[0.4, -1.0], &[2.0, 0.5], r0).unwrap();
    let want = std_pdf(0.4) * std_pdf(-1.0) * std_pdf(2.0) * std_pdf(0.5);
    assert!((g - want).abs() < 1e-16);

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let r = rho(0.95 * (2.0 * rand::Rng::random::<f64>(&mut rng) - 1.0));
        let x: Vec<f64> = (0..2).map(|_| StandardNormal.sample(&mut rng)).collect();
        let y: Vec<f64> = (0..2).map(|_| StandardNormal.sample(&mut rng)).collect();
        let a = gauss_kernel(&x, &y, r).unwrap();
        let b = gauss_kernel(&y, &x, r).unwrap();
        assert!(a > 0.0);
        assert!((a - b).abs() < 1e-14);
    }
    assert!(gauss_kernel(&[0.0], &[0.0, 1.0], r0).is_err());
}

#[test]
fn kernel_integrates_to_one() {
    let (x, w) = gauss_legendre_1d(40);
    // composite rule on [-12, 12] with unit panels
    let mut nodes = Vec::new();
    for p in 0..24 {
        let mid = -12.0 + p as f64 + 0.5;
        for (xi, wi) in x.iter().zip(&w) {
            nodes.push((mid + 0.5 * xi, 0.5 * wi));
        }
    }
    for r in [0.5, -0.8] {
        let mut total = 0.0;
        for &(a, wa) in &nodes {
            for &(b, wb) in &nodes {
                total += wa * wb * gauss_kernel(&[a], &[b], rho(r)).unwrap();
            }
        }
        assert!((total - 1.0).abs() < 1e-6, "rho {r}: {total}");
    }
}

#[test]
fn bvn_examples() {
    let r = rho(0.5);
    for (s, t) in [(0.3, -1.0), (2.0, 0.5)] {
        let got = bvn_orthant(s, t, rho(0.0)).unwrap();
        assert!((got - normal_cdf(s).unwrap() * normal_cdf(t).unwrap()).abs() < 1e-15);
    }
    // Monte Carlo oracle with 10^7 pairs
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let n = 10_000_000;
    let sig = (1.0f64 - 0.25).sqrt();
    let mut hits = 0u64;
    for _ in 0..n {
        let x: f64 = StandardNormal.sample(&mut rng);
        let z: f64 = StandardNormal.sample(&mut rng);
        if x <= 0.0 && 0.5 * x + sig * z <= 0.0 {
            hits += 1;
        }
    }
    let mc = hits as f64 / n as f64;
    let got = bvn_orthant(0.0, 0.0, r).unwrap();
    assert!((mc - got).abs() < 5e-4);
    assert!((got - (0.25 + 0.5f64.asin() / (2.0 * std::f64::consts::PI))).abs() < 1e-12);

    for (s, t) in [(0.3, 0.8), (-1.0, 0.2), (1.5, 1.5)] {
        let got = bvn_orthant(s, t, rho(0.9999)).unwrap();
        assert!((got - normal_cdf(f64::min(s, t)).unwrap()).abs() < 1e-2);
    }
}

#[test]
fn bvn_against_univariate_integral() {
    // independent oracle: direct 1-D integral over the other variable with a fine trapezoid
    for &(s, t, r) in &[(0.7, -0.4, 0.35), (-1.2, 1.9, -0.8), (2.5, 2.0, 0.95), (-3.0, -2.5, 0.6)] {
        let sig = (1.0f64 - r * r).sqrt();
        let n = 200_000;
        let lo = -12.0;
        let h = (t - lo) / n as f64;
        let mut acc = 0.0;
        for i in 0..=n {
            let y = lo + h * i as f64;
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            acc += w * std_pdf(y) * normal_cdf((s - r * y) / sig).unwrap();
        }
        let oracle = acc * h;
        let got = bvn_orthant(s, t, rho(r)).unwrap();
        assert!((got - oracle).abs() < 1e-9, "({s},{t},{r}): {got} vs {oracle}");
    }
}

proptest! {
    #[test]
    fn quadrature_exact_on_monomials(q in 1usize..10, a in 0u32..20, b in 0u32..20) {
        let a = a % (2 * q as u32);
        let b = b % (2 * q as u32);
        let rule = quadrature_rule(2, q).unwrap();
        let got = rule.integrate(|x| x[0].powi(a as i32) * x[1].powi(b as i32));
        let want = gaussian_moment(a) * gaussian_moment(b);
        // odd moments cancel only up to rounding of the absolute moment
        let scale = gaussian_moment(a + a % 2) * gaussian_moment(b + b % 2);
        prop_assert!((got - want).abs() <= 1e-9 * scale.max(1.0));
    }

    #[test]
    fn cdf_is_monotone_and_symmetric(x in -30.0f64..30.0, dx in 0.0f64..5.0) {
        let a = normal_cdf(x).unwrap();
        let b = normal_cdf(x + dx).unwrap();
        prop_assert!(a <= b);
        prop_assert!((normal_cdf(-x).unwrap() - (1.0 - a)).abs() <= 1e-14);
    }

    #[test]
    fn quantile_round_trip(p in 1e-12f64..(1.0 - 1e-12)) {
        let x = normal_quantile(p).unwrap();
        prop_assert!((normal_cdf(x).unwrap() - p).abs() <= 1e-10);
    }

    #[test]
    fn bvn_reflection(s in -4.0f64..4.0, t in -4.0f64..4.0, r in -0.98f64..0.98) {
        let lhs = bvn_orthant(s, t, rho(r)).unwrap();
        let rhs = normal_cdf(s).unwrap() - bvn_orthant(s, -t, rho(-r)).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-9);
    }

    #[test]
    fn bvn_within_frechet(s in -9.0f64..9.0, t in -9.0f64..9.0, r in -0.999f64..0.999) {
        let v = bvn_orthant(s, t, rho(r)).unwrap();
        let (ps, pt) = (normal_cdf(s).unwrap(), normal_cdf(t).unwrap());
        prop_assert!(v >= (ps + pt - 1.0).max(0.0) - 1e-15 && v <= ps.min(pt));
    }
}
