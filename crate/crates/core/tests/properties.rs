mod common;

use proptest::prelude::*;
use stcp::ncp::{self, NcpKind};
use stcp::simplex;
use stcp::{CheckOptions, ResidualConfig, SampleSpace, SolverOptions, Tensor};

fn shape() -> impl Strategy<Value = (usize, usize, u64)> {
    (2usize..=4, 2usize..=4, any::<u64>())
}

fn random_space(seed: u64, order: usize, dim: usize, n: usize) -> SampleSpace {
    let mut r = common::rng(seed);
    let pairs = (0..n)
        .map(|_| {
            (
                common::random_tensor(&mut r, order, dim, 0.6),
                common::random_vec(&mut r, dim, -1.0, 1.0),
            )
        })
        .collect();
    SampleSpace::uniform(pairs).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn contraction_is_homogeneous((order, dim, seed) in shape(), t in -3.0f64..3.0) {
        let mut r = common::rng(seed);
        let a = common::random_tensor(&mut r, order, dim, 0.6);
        let x = common::random_vec(&mut r, dim, -1.0, 1.0);
        let tx: Vec<f64> = x.iter().map(|v| t * v).collect();
        let lhs = a.contract_to_vector(&tx).unwrap();
        let scale = t.powi(order as i32 - 1);
        let rhs: Vec<f64> = a.contract_to_vector(&x).unwrap().iter().map(|v| scale * v).collect();
        prop_assert!(common::dist_inf(&lhs, &rhs) <= 1e-10 * (1.0 + common::max_abs(&rhs)));
    }

    #[test]
    fn scalar_contraction_is_inner_product((order, dim, seed) in shape()) {
        let mut r = common::rng(seed);
        let a = common::random_tensor(&mut r, order, dim, 0.6);
        let x = common::random_vec(&mut r, dim, -2.0, 2.0);
        let y = a.contract_to_vector(&x).unwrap();
        let inner: f64 = x.iter().zip(&y).map(|(p, q)| p * q).sum();
        let s = a.contract_to_scalar(&x).unwrap();
        prop_assert!((s - inner).abs() <= 1e-12 * (1.0 + s.abs()));
    }

    #[test]
    fn ncp_functions_vanish_exactly_on_complementarity(a in 0.0f64..10.0, b in 0.0f64..10.0, pick in any::<bool>()) {
        let (a, b) = if pick { (a, 0.0) } else { (0.0, b) };
        prop_assert_eq!(ncp::phi(NcpKind::Min, a, b), 0.0);
        prop_assert!(ncp::fischer_burmeister(a, b).abs() <= 1e-15 * (1.0 + a + b));
    }

    #[test]
    fn ncp_functions_are_nonzero_off_complementarity(a in -10.0f64..10.0, b in -10.0f64..10.0) {
        let complementary = a >= 0.0 && b >= 0.0 && a * b == 0.0;
        prop_assume!(!complementary);
        prop_assert!(ncp::phi(NcpKind::Min, a, b) != 0.0);
        prop_assert!(ncp::fischer_burmeister(a, b) != 0.0);
    }

    #[test]
    fn smoothed_min_is_within_mu(a in -10.0f64..10.0, b in -10.0f64..10.0, mu in 1e-6f64..1.0) {
        let s = ncp::smoothed_min(a, b, mu);
        prop_assert!(s <= a.min(b) + 1e-15);
        prop_assert!(a.min(b) - s <= mu + 1e-12);
    }

    #[test]
    fn mixture_objective_is_weight_linear(seed in any::<u64>(), w in 0.05f64..0.95) {
        let s1 = random_space(seed, 3, 3, 2);
        let s2 = random_space(seed ^ 0x5555, 3, 3, 3);
        let mix = SampleSpace::mixture(&[(w, &s1), (1.0 - w, &s2)]).unwrap();
        let x = common::random_vec(&mut common::rng(seed), 3, 0.0, 1.5);
        for config in [ResidualConfig::min(), ResidualConfig::fb()] {
            let g = stcp::erm_objective(&mix, &x, &config).unwrap().value;
            let want = w * stcp::erm_objective(&s1, &x, &config).unwrap().value
                + (1.0 - w) * stcp::erm_objective(&s2, &x, &config).unwrap().value;
            prop_assert!((g - want).abs() <= 1e-12 * (1.0 + want));
        }
    }

    #[test]
    fn objective_is_nonnegative_and_matches_oracle((order, dim, seed) in shape()) {
        let space = random_space(seed, order, dim, 3);
        let x = common::random_vec(&mut common::rng(seed), dim, -1.0, 2.0);
        let g = stcp::erm_objective(&space, &x, &ResidualConfig::min()).unwrap().value;
        prop_assert!(g >= 0.0);
        let direct = common::direct_min_objective(&space, &x);
        prop_assert!((g - direct).abs() <= 1e-10 * (1.0 + direct));
        prop_assert!(stcp::erm_objective(&space, &x, &ResidualConfig::fb()).unwrap().value >= 0.0);
    }

    #[test]
    fn merit_zero_set_is_scale_invariant(seed in any::<u64>(), t in 0.01f64..100.0) {
        // With q = 0, min(x, A x^{N-1}) = 0 at x iff it is zero at t x.
        let mut r = common::rng(seed);
        let a = common::random_tensor(&mut r, 3, 3, 0.5);
        let space = common::zero_q(a.clone());
        let degenerate = stcp::check_r0(&a, &CheckOptions { random_starts: 20, ..CheckOptions::default() });
        if let Some(w) = degenerate.witness {
            let tw: Vec<f64> = w.iter().map(|v| t * v).collect();
            let g = stcp::objective::erm_value(&space, &tw, &ResidualConfig::min()).unwrap();
            prop_assert!(g <= 1e-10 * (1.0 + t.powi(4)));
        }
        // A point is exactly complementary at x and at t x together.
        let x = simplex::random_simplex_point(3, seed, 0);
        let g1 = stcp::objective::erm_value(&space, &x, &ResidualConfig::min()).unwrap();
        let tx: Vec<f64> = x.iter().map(|v| t * v).collect();
        let gt = stcp::objective::erm_value(&space, &tx, &ResidualConfig::min()).unwrap();
        prop_assert_eq!(g1 == 0.0, gt == 0.0);
    }

    #[test]
    fn simplex_samples_are_feasible(dim in 2usize..8, seed in any::<u64>(), k in 0usize..100) {
        let x = simplex::random_simplex_point(dim, seed, k);
        prop_assert!(x.iter().all(|v| *v >= 0.0));
        prop_assert!((x.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert_eq!(x, simplex::random_simplex_point(dim, seed, k));
    }

    #[test]
    fn sampling_is_counter_based(seed in any::<u64>(), n in 2usize..20) {
        let spec = stcp::io::builtin_example("example4_1", 3, 3).unwrap().generator_spec().unwrap().unwrap();
        let big = stcp::stochastic::materialize(&spec, n, seed).unwrap();
        let small = stcp::stochastic::materialize(&spec, n - 1, seed).unwrap();
        for (a, b) in small.realizations().iter().zip(big.realizations()) {
            prop_assert_eq!(&a.tensor, &b.tensor);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn solver_iterates_stay_feasible_and_trace_is_monotone(seed in any::<u64>(), fb in any::<bool>()) {
        let space = random_space(seed, 3, 3, 2);
        let config = if fb { ResidualConfig::fb() } else { ResidualConfig::min() };
        let opts = SolverOptions { max_iterations: 200, multistart_count: 3, seed, ..SolverOptions::default() };
        let res = stcp::solve_erm(&space, &config, &opts).unwrap();
        prop_assert!(res.x_star.iter().all(|v| *v >= 0.0));
        for s in &res.starts {
            prop_assert!(s.x.iter().all(|v| *v >= 0.0));
            prop_assert!(res.objective <= s.objective);
        }
        for w in res.trace.windows(2) {
            prop_assert!(w[1].1 <= w[0].1);
            prop_assert!(w[1].0 > w[0].0);
        }
        let exact = stcp::objective::erm_value(&space, &res.x_star, &ResidualConfig { smoothing_mu: 0.0, ..config }).unwrap();
        prop_assert_eq!(exact, res.objective);
        let again = stcp::solve_erm(&space, &config, &opts).unwrap();
        prop_assert_eq!(again, res);
    }

    #[test]
    fn checker_is_deterministic(seed in any::<u64>()) {
        let a = common::random_tensor(&mut common::rng(seed), 3, 3, 0.5);
        let opts = CheckOptions { random_starts: 30, seed, ..CheckOptions::default() };
        prop_assert_eq!(stcp::check_r0(&a, &opts), stcp::check_r0(&a, &opts));
    }
}

#[test]
fn identity_tensor_is_never_complementary_on_the_simplex() {
    let t = Tensor::identity(3, 4).unwrap();
    let space = common::zero_q(t);
    for k in 0..200 {
        let x = simplex::random_simplex_point(4, 3, k);
        assert!(stcp::objective::erm_value(&space, &x, &ResidualConfig::min()).unwrap() > 0.0);
    }
}
