//! Sampling layer checked against the analytic laws.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

use bellmean::axis::random_axis;
use bellmean::chsh::{lhv_sign_monte_carlo, TERMS};
use bellmean::dichotomic::{chi_square, measurement_counts};
use bellmean::sampling::{batched_counts, rng_from_seed};
use bellmean::*;
use rand::RngCore;

/// Upper 0.001 quantile of χ² with one degree of freedom.
const CHI2_1DOF_999: f64 = 10.828;

#[test]
fn measure_frequency_on_equator() {
    let state = ElementaryState::unit(UnitAxis::Z, Sign::Plus);
    let trials = 1_000_000;
    let [plus, _] = measurement_counts(&state, &UnitAxis::X, trials, 2);
    let freq = plus as f64 / trials as f64;
    let sigma = (0.25 / trials as f64).sqrt();
    assert!((freq - 0.5).abs() < 3.0 * sigma, "{freq}");
}

#[test]
fn chi_square_goodness_of_fit_over_seed_grid() {
    for seed in 0..8u64 {
        for theta in [0.3, FRAC_PI_3, FRAC_PI_2, 2.5] {
            let state = ElementaryState::unit(UnitAxis::Z, Sign::Plus);
            let m = make_axis(theta, 0.2).unwrap();
            let counts = measurement_counts(&state, &m, 50_000, seed);
            let chi2 = chi_square(counts, &transition_probability(&state, &m));
            assert!(chi2 < CHI2_1DOF_999, "seed {seed} theta {theta}: {chi2}");
        }
    }
}

#[test]
fn minus_state_sampling_follows_swapped_law() {
    let state = ElementaryState::new(UnitAxis::Z, Sign::Minus, 2.0).unwrap();
    let m = make_axis(FRAC_PI_3, 0.0).unwrap();
    let counts = measurement_counts(&state, &m, 200_000, 31);
    assert!(chi_square(counts, &transition_probability(&state, &m)) < CHI2_1DOF_999);
    assert!(counts[1] > counts[0]);
}

#[test]
fn stokes_estimates() {
    let n = 1_000_000;
    let rec = stokes_experiment(&UnitAxis::Z, &UnitAxis::X, n, 17).unwrap();
    assert!(rec.estimate.abs() <= 3.3 / (n as f64).sqrt());
    assert_eq!(rec.n_events(), n);
    let tilted = make_axis(FRAC_PI_3, 1.0).unwrap();
    let rec = stokes_experiment(&UnitAxis::Z, &tilted, n, 18).unwrap();
    assert!((rec.estimate - 0.5).abs() < 3.0 * rec.stderr);
    assert!((rec.stderr - ((1.0 - rec.estimate.powi(2)) / n as f64).sqrt()).abs() < 1e-12);
}

#[test]
fn stokes_is_reproducible_and_thread_independent() {
    let run = || stokes_experiment(&UnitAxis::Z, &UnitAxis::X, 300_001, 99).unwrap();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    assert_eq!(pool.install(run), run());
}

#[test]
fn singlet_marginals_are_uniform() {
    let mut rng = rng_from_seed(6);
    let trials = 1_000_000u64;
    for _ in 0..3 {
        let (n, m) = (random_axis(&mut rng), random_axis(&mut rng));
        let counts = batched_counts(rng.next_u64(), &[], trials, |r, len| {
            let mut c = [0u64; 2];
            for _ in 0..len {
                let (v1, v2) = sample_singlet_pair(&n, &m, r);
                c[0] += (v1 == Sign::Plus) as u64;
                c[1] += (v2 == Sign::Plus) as u64;
            }
            c
        });
        let sigma = (0.25 / trials as f64).sqrt();
        for c in counts {
            assert!((c as f64 / trials as f64 - 0.5).abs() < 4.0 * sigma);
        }
    }
}

#[test]
fn sampled_correlator_tracks_minus_cosine() {
    for i in 0..20 {
        let theta = PI * i as f64 / 19.0;
        let cfg = ChshConfig::uniform(UnitAxis::Z);
        let cfg = ChshConfig {
            m: make_axis(theta, 0.0).unwrap(),
            ..cfg
        };
        let mc = monte_carlo_chsh(&cfg, &CorrelatorModel::QuantumSinglet, 100_000, i).unwrap();
        // term 0 is E(n, m)
        let expected = -theta.cos();
        let tol = 4.0 * mc.stderrs[0].max(1e-12);
        assert!(
            (mc.correlations[0] - expected).abs() <= tol,
            "theta {theta}: {} vs {expected}",
            mc.correlations[0]
        );
    }
}

#[test]
fn sign_model_closed_form_matches_integration() {
    let mut rng = rng_from_seed(1234);
    for k in 0..10 {
        let (n, m) = (random_axis(&mut rng), random_axis(&mut rng));
        let (estimate, stderr) = lhv_sign_monte_carlo(&n, &m, 1_000_000, k).unwrap();
        let closed = lhv_sign_correlator(&n, &m);
        assert!(
            (estimate - closed).abs() < 4.0 * stderr,
            "{estimate} ± {stderr} vs {closed}"
        );
    }
    assert!(lhv_sign_monte_carlo(&UnitAxis::Z, &UnitAxis::X, 0, 1).is_err());
}

#[test]
fn orthogonal_configuration_averages_to_zero() {
    let cfg = ChshConfig {
        n: UnitAxis::Z,
        n_prime: UnitAxis::Z,
        m: UnitAxis::X,
        m_prime: UnitAxis::Y,
    };
    let mc = monte_carlo_chsh(&cfg, &CorrelatorModel::QuantumSinglet, 200_000, 5).unwrap();
    assert!(mc.analytic.b_value.abs() < 1e-15);
    assert!(mc.estimate.abs() < 4.0 * mc.stderr);
}

#[test]
fn monte_carlo_of_local_models_stays_local() {
    let cfg = ChshConfig::canonical();
    let mc = monte_carlo_chsh(&cfg, &CorrelatorModel::LhvSign, 200_000, 8).unwrap();
    assert!((mc.estimate - mc.analytic.b_value).abs() < 4.0 * mc.stderr);
    let strategy = DeterministicStrategy::all()[5];
    let mc = monte_carlo_chsh(&cfg, &CorrelatorModel::LhvDeterministic(strategy), 1000, 8).unwrap();
    assert_eq!(mc.estimate, strategy.b_value());
    assert_eq!(TERMS.len(), 4);
}

#[test]
fn repeated_measurement_is_deterministic() {
    let mut rng = rng_from_seed(10);
    for _ in 0..10_000 {
        let s = ElementaryState::unit(random_axis(&mut rng), Sign::Plus);
        let axis = random_axis(&mut rng);
        assert!(bellmean::dichotomic::repeat_measurement(
            &s, &axis, &mut rng
        ));
    }
}
