use mrf_learn::chain::{labeled_walk, one_step_oracle};
use mrf_learn::graph::Graph;
use mrf_learn::io::{model_to_text, parse_model, parse_walk_csv, walk_to_csv};
use mrf_learn::learners::noise::noise_sensitivity_exact;
use mrf_learn::model::{hamming_distance, ColoringModel, Dynamics, IsingModel, MrfModel};
use mrf_learn::rng::RngStream;
use mrf_learn::spectral::{fourier_coefficients, inner_product_pi, ExactChain};
use proptest::prelude::*;

const CAP: usize = 1 << 12;

/// Random Ising model on at most 6 sites: edge subset, couplings, field, dynamics.
fn ising() -> impl Strategy<Value = MrfModel> {
    (2usize..=6)
        .prop_flat_map(|n| {
            let pairs = n * (n - 1) / 2;
            (
                Just(n),
                prop::collection::vec(any::<bool>(), pairs),
                prop::collection::vec(0.0f64..1.5, pairs),
                -0.5f64..0.5,
                any::<bool>(),
            )
        })
        .prop_map(|(n, keep, betas, field, lazy)| {
            let all: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
            let mut edges = Vec::new();
            let mut beta = Vec::new();
            for ((e, k), b) in all.into_iter().zip(keep).zip(betas) {
                if k {
                    edges.push(e);
                    beta.push(b);
                }
            }
            // Edges are generated in sorted order, so `beta` lines up with `g.edges()`.
            let g = Graph::new(n, edges).unwrap();
            let dynamics = if lazy { Dynamics::LazyHeatBath } else { Dynamics::HeatBath };
            MrfModel::Ising(IsingModel::new(g, beta, field).unwrap().with_dynamics(dynamics))
        })
}

fn coloring() -> impl Strategy<Value = MrfModel> {
    (3usize..=5, 0usize..3).prop_map(|(q, shape)| {
        let g = match shape {
            0 => Graph::cycle(5).unwrap(),
            1 => Graph::complete(3).unwrap(),
            _ => Graph::grid(2, 2).unwrap(),
        };
        MrfModel::Coloring(ColoringModel::new(g, q).unwrap())
    })
}

fn any_model() -> impl Strategy<Value = MrfModel> {
    prop_oneof![ising(), coloring()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rows_are_stochastic_and_reversible(model in any_model()) {
        let chain = ExactChain::new(&model, CAP).unwrap();
        prop_assert!((chain.pi.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for a in 0..chain.p.len() {
            let mut total = 0.0;
            for (b, pab) in chain.p.row(a) {
                prop_assert!(pab >= 0.0);
                total += pab;
                let lhs = chain.pi[a] * pab;
                let rhs = chain.pi[b] * chain.p.get(b, a);
                prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.max(rhs));
            }
            prop_assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn lazy_dynamics_hold_half_the_mass(model in ising()) {
        let MrfModel::Ising(m) = &model else { unreachable!() };
        let chain = ExactChain::new(&model, CAP).unwrap();
        if m.dynamics() == Dynamics::LazyHeatBath {
            for a in 0..chain.p.len() {
                prop_assert!(chain.p.get(a, a) >= 0.5 - 1e-15);
            }
        }
    }

    #[test]
    fn eigenvectors_are_pi_orthonormal_and_parseval_holds(model in any_model(), seed in any::<u64>()) {
        let chain = ExactChain::new(&model, CAP).unwrap();
        let spec = chain.spectrum().unwrap();
        let lam = spec.eigenvalues();
        prop_assert!((lam[0] - 1.0).abs() < 1e-10);
        prop_assert!(lam.iter().all(|&l| (-1.0 - 1e-10..=1.0 + 1e-10).contains(&l)));
        prop_assert!(lam.windows(2).all(|w| w[0] >= w[1] - 1e-12));
        let k = spec.len().min(6);
        for i in 0..k {
            for j in 0..k {
                let ip = inner_product_pi(spec.eigenvector(i), spec.eigenvector(j), spec.pi());
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((ip - want).abs() < 1e-9, "<v{}, v{}> = {}", i, j, ip);
            }
        }
        let mut rng = RngStream::new(seed, 0);
        let f: Vec<f64> = (0..spec.len()).map(|_| if rng.coin() { 1.0 } else { -1.0 }).collect();
        let mass: f64 = fourier_coefficients(&f, &spec).iter().map(|c| c * c).sum();
        prop_assert!((mass - 1.0).abs() < 1e-9);
    }

    #[test]
    fn steps_change_at_most_one_site_and_stay_in_support(model in any_model(), seed in any::<u64>()) {
        let chain = ExactChain::new(&model, CAP).unwrap();
        let oracle = one_step_oracle(&model);
        let mut rng = RngStream::new(seed, 1);
        let mut x = chain.support().state(rng.below(chain.support().len())).into_inner();
        for _ in 0..200 {
            let before = x.clone();
            oracle.step_in_place(&mut x, &mut rng);
            prop_assert!(hamming_distance(&before, &x).unwrap() <= 1);
            prop_assert!(model.in_support(&x));
        }
    }

    #[test]
    fn lazy_noise_sensitivity_is_nondecreasing_and_at_most_half(model in ising(), seed in any::<u64>()) {
        let MrfModel::Ising(m) = &model else { unreachable!() };
        prop_assume!(m.dynamics() == Dynamics::LazyHeatBath);
        let chain = ExactChain::new(&model, CAP).unwrap();
        let spec = chain.spectrum().unwrap();
        let mut rng = RngStream::new(seed, 2);
        let f: Vec<f64> = (0..spec.len()).map(|_| if rng.coin() { 1.0 } else { -1.0 }).collect();
        let mut last = 0.0;
        for t in 0..12 {
            let ns = noise_sensitivity_exact(&spec, &f, t as f64).unwrap().ns;
            prop_assert!(ns >= last - 1e-12);
            // Lazy eigenvalues are nonnegative, so every term of the expansion is too.
            prop_assert!(ns <= 0.5 + 1e-12);
            last = ns;
        }
    }

    #[test]
    fn model_text_round_trips(model in any_model()) {
        let text = model_to_text(&model);
        prop_assert_eq!(model_to_text(&parse_model(&text).unwrap()), text);
    }

    #[test]
    fn walk_dumps_round_trip(model in any_model(), seed in any::<u64>(), len in 0usize..60) {
        let chain = ExactChain::new(&model, CAP).unwrap();
        let oracle = one_step_oracle(&model);
        let mut rng = RngStream::new(seed, 3);
        let start = chain.support().state(rng.below(chain.support().len()));
        let walk = labeled_walk(&oracle, |x| if x[0] == x[1] { 1 } else { -1 }, &start, len, &mut rng);
        let back = parse_walk_csv(&walk_to_csv(&walk, model.alphabet()), model.alphabet()).unwrap();
        prop_assert_eq!(back.states, walk.states);
        prop_assert_eq!(back.labels, walk.labels);
    }
}
