//! Exit criteria. Prints one PASS/FAIL line per criterion and exits non-zero
//! if any fails.

use std::f64::consts::{PI, SQRT_2};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use bellmean::axis::{random_axis, random_rotation};
use bellmean::dichotomic::repeat_measurement;
use bellmean::oracle::{singlet_projection_check, spin_half_probability, spin_one_probability};
use bellmean::sampling::rng_from_seed;
use bellmean::*;
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn grid() -> Vec<f64> {
    (0..50).map(|i| PI * i as f64 / 49.0).collect()
}

const SIGNS: [Sign; 2] = [Sign::Plus, Sign::Minus];

fn chsh_violation() -> Outcome {
    let start = Instant::now();
    let cfg = ChshConfig::canonical();
    let analytic = chsh_value(&cfg, &CorrelatorModel::QuantumSinglet);
    let analytic_err = (analytic.b_value.abs() - 2.0 * SQRT_2).abs();
    let mc = monte_carlo_chsh(&cfg, &CorrelatorModel::QuantumSinglet, 1_000_000, 2717)
        .map_err(|e| e.to_string())?;
    let mc_dev = (mc.estimate - analytic.b_value).abs();
    let elapsed = start.elapsed();
    check(
        analytic_err < 1e-12
            && analytic.violates
            && mc_dev <= 4.0 * mc.stderr
            && elapsed < Duration::from_secs(10),
        format!(
            "|B| = {:.12} (err {analytic_err:.1e}); MC {:.6} ± {:.6} (dev {:.2}σ); {:.2?}",
            analytic.b_value.abs(),
            mc.estimate,
            mc.stderr,
            mc_dev / mc.stderr,
            elapsed
        ),
    )
}

fn lhv_bound() -> Outcome {
    let scan = lhv_deterministic_scan();
    let all_pm2 = scan.rows.len() == 16 && scan.rows.iter().all(|(_, b)| *b == 2.0 || *b == -2.0);
    let mut rng = rng_from_seed(42);
    let strategies = DeterministicStrategy::all();
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        // every other mixture concentrates on at most three strategies
        let sparse = rng.random_bool(0.5);
        let weights: Vec<f64> = (0..16)
            .map(|_| {
                if sparse && rng.random_bool(0.85) {
                    0.0
                } else {
                    rng.random::<f64>()
                }
            })
            .collect();
        if weights.iter().sum::<f64>() == 0.0 {
            continue;
        }
        let total: f64 = weights.iter().sum();
        let parts = weights
            .iter()
            .zip(&strategies)
            .map(|(w, s)| (w / total, *s))
            .collect();
        let model = CorrelatorModel::mixture(parts).map_err(|e| e.to_string())?;
        let cfg = ChshConfig {
            n: random_axis(&mut rng),
            n_prime: random_axis(&mut rng),
            m: random_axis(&mut rng),
            m_prime: random_axis(&mut rng),
        };
        worst = worst.max(chsh_value(&cfg, &model).b_value.abs());
    }
    check(
        all_pm2 && scan.max_abs_b == 2.0 && worst <= 2.0 + 1e-12,
        format!(
            "16 strategies, max |B| = {}; worst mixture {worst:.15}",
            scan.max_abs_b
        ),
    )
}

fn qubit_probabilities() -> Outcome {
    let mut rng = rng_from_seed(3);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let (n, m) = (random_axis(&mut rng), random_axis(&mut rng));
        for k in SIGNS {
            let d = transition_probability(&ElementaryState::unit(n, k), &m);
            for j in SIGNS {
                worst = worst.max((d.get(j) - spin_half_probability(&n, k, &m, j)).abs());
            }
        }
    }
    check(
        worst < 1e-12,
        format!("max |engine - oracle| = {worst:.2e}"),
    )
}

fn variance_constancy() -> Outcome {
    let mut rng = rng_from_seed(4);
    let mut worst_moment: f64 = 0.0;
    for _ in 0..1000 {
        let a = rng.random_range(0.1..10.0);
        let s = ElementaryState::new(random_axis(&mut rng), SIGNS[rng.random_range(0..2)], a)
            .map_err(|e| e.to_string())?;
        worst_moment =
            worst_moment.max((second_moment(&s, &random_axis(&mut rng)) - a * a).abs() / (a * a));
    }
    let mut worst_j2: f64 = 0.0;
    for _ in 0..100 {
        let a = rng.random_range(0.1..10.0);
        let s = ElementaryState::new(random_axis(&mut rng), Sign::Plus, a)
            .map_err(|e| e.to_string())?;
        let frame = Frame::from_rotation(&random_rotation(&mut rng)).map_err(|e| e.to_string())?;
        worst_j2 = worst_j2.max((j_squared(&s, &frame) - 3.0 * a * a).abs() / (a * a));
    }
    check(
        worst_moment < 1e-12 && worst_j2 < 1e-12,
        format!("max rel. dev: <(J·m)²> {worst_moment:.2e}, <J²> {worst_j2:.2e}"),
    )
}

fn composite_tables() -> Outcome {
    let mut worst_oracle: f64 = 0.0;
    let mut worst_sum: f64 = 0.0;
    for theta in grid() {
        let m = make_axis(theta, 0.0).map_err(|e| e.to_string())?;
        for k in Level::ALL {
            let t = transition_table(&CompositeState::unit(UnitAxis::Z, k), &m);
            worst_sum = worst_sum.max((t.sum() - 1.0).abs());
            for j in Level::ALL {
                let oracle =
                    spin_one_probability(k.label(), j.label(), theta).map_err(|e| e.to_string())?;
                worst_oracle = worst_oracle.max((t.get(j) - oracle).abs());
            }
        }
    }
    check(
        worst_oracle < 1e-10 && worst_sum < 1e-12,
        format!("max |table - d¹²| = {worst_oracle:.2e}; max |Σ-1| = {worst_sum:.2e}"),
    )
}

fn inconsistency() -> Outcome {
    let mut rng = rng_from_seed(6);
    let zero = CompositeState::unit(UnitAxis::Z, Level::Zero);
    let mut worst_principled: f64 = 0.0;
    let mut worst_mixture: f64 = 0.0;
    for _ in 0..100 {
        let frame = Frame::from_rotation(&random_rotation(&mut rng)).map_err(|e| e.to_string())?;
        for k in Level::ALL {
            let j2 = j_squared_composite(
                &CompositeState::unit(UnitAxis::Z, k),
                &frame,
                CompositeModel::Principled,
            )
            .map_err(|e| e.to_string())?;
            worst_principled = worst_principled.max((j2 - 8.0).abs());
        }
        let mixed = j_squared_composite(&zero, &frame, CompositeModel::Mixture)
            .map_err(|e| e.to_string())?;
        worst_mixture = worst_mixture.max((mixed - 4.0).abs());
    }
    let plus = j_squared_composite(
        &CompositeState::unit(UnitAxis::Z, Level::Plus2),
        &Frame::CANONICAL,
        CompositeModel::Principled,
    )
    .map_err(|e| e.to_string())?;
    let mixed = j_squared_composite(&zero, &Frame::CANONICAL, CompositeModel::Mixture)
        .map_err(|e| e.to_string())?;
    let mut worst_factor: f64 = 0.0;
    for theta in grid() {
        let m = make_axis(theta, 0.0).map_err(|e| e.to_string())?;
        let principled = transition_table(&zero, &m).p_plus2;
        let mixture = mixture_transition_table(&zero, &m)
            .map_err(|e| e.to_string())?
            .p_plus2;
        worst_factor = worst_factor.max((principled - 2.0 * mixture).abs());
    }
    check(
        worst_principled < 1e-10 && worst_mixture < 1e-10 && (plus - mixed).abs() > 1.0 && worst_factor < 1e-12,
        format!(
            "principled <J²> = 8 (dev {worst_principled:.1e}), mixture <J²> = 4 (dev {worst_mixture:.1e}), \
             {mixed} != {plus}; factor-two dev {worst_factor:.1e}"
        ),
    )
}

fn tensor_path() -> Outcome {
    let zero = CompositeState::unit(UnitAxis::Z, Level::Zero);
    let mut worst: f64 = 0.0;
    for theta in grid() {
        let m33 = rotated_m33(&zero, theta).map_err(|e| e.to_string())?;
        worst = worst.max((m33 - 4.0 * theta.sin().powi(2)).abs());
    }
    check(worst < 1e-12, format!("max |M'33 - 4 sin²θ| = {worst:.2e}"))
}

fn reversibility() -> Outcome {
    let mut rng = rng_from_seed(8);
    let mut worst_qubit: f64 = 0.0;
    let mut worst_composite: f64 = 0.0;
    for _ in 0..1000 {
        let (n, m) = (random_axis(&mut rng), random_axis(&mut rng));
        for k in SIGNS {
            let forward = transition_probability(&ElementaryState::unit(n, k), &m);
            for j in SIGNS {
                let back = transition_probability(&ElementaryState::unit(n, j), &m).get(k);
                let swapped = transition_probability(&ElementaryState::unit(m, j), &n).get(k);
                worst_qubit = worst_qubit
                    .max((forward.get(j) - back).abs())
                    .max((forward.get(j) - swapped).abs());
            }
        }
        for k in Level::ALL {
            let forward = transition_table(&CompositeState::unit(n, k), &m);
            for j in Level::ALL {
                let back = transition_table(&CompositeState::unit(n, j), &m).get(k);
                let swapped = transition_table(&CompositeState::unit(m, j), &n).get(k);
                worst_composite = worst_composite
                    .max((forward.get(j) - back).abs())
                    .max((forward.get(j) - swapped).abs());
            }
        }
    }
    check(
        worst_qubit < 1e-12 && worst_composite < 1e-12,
        format!("max asymmetry: qubit {worst_qubit:.2e}, composite {worst_composite:.2e}"),
    )
}

fn stokes_convergence() -> Outcome {
    let start = Instant::now();
    let n = 1_000_000u64;
    let bound = 3.3 / (n as f64).sqrt();
    let mut within = 0;
    for seed in 0..100 {
        let rec =
            stokes_experiment(&UnitAxis::Z, &UnitAxis::X, n, seed).map_err(|e| e.to_string())?;
        within += (rec.estimate.abs() <= bound) as u32;
    }
    let elapsed = start.elapsed();
    check(
        within >= 99 && elapsed < Duration::from_secs(30),
        format!("{within}/100 seeds within {bound:.1e}; {elapsed:.2?}"),
    )
}

fn projection_postulate() -> Outcome {
    let mut rng = rng_from_seed(10);
    let state = ElementaryState::unit(UnitAxis::Z, Sign::Plus);
    let mut repeats = 0u32;
    let trials = 100_000;
    for _ in 0..trials {
        let axis = random_axis(&mut rng);
        repeats += repeat_measurement(&state, &axis, &mut rng) as u32;
    }
    check(
        repeats == trials,
        format!("{repeats}/{trials} repeated outcomes"),
    )
}

fn singlet_invariance() -> Outcome {
    let mut rng = rng_from_seed(11);
    let mut worst_stats: f64 = 0.0;
    let mut worst_overlap: f64 = 0.0;
    for _ in 0..1000 {
        let axis = random_axis(&mut rng);
        let (mean, j2) = singlet_statistics(&axis);
        worst_stats = worst_stats.max(mean.abs()).max(j2.abs());
        worst_overlap = worst_overlap.max((singlet_projection_check(&axis) - 1.0).abs());
    }
    check(
        worst_stats < 1e-12 && worst_overlap < 1e-12,
        format!("max |stat| = {worst_stats:.2e}; max |overlap - 1| = {worst_overlap:.2e}"),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("1 chsh violation", chsh_violation),
        ("2 lhv bound", lhv_bound),
        ("3 qubit probabilities", qubit_probabilities),
        ("4 variance constancy", variance_constancy),
        ("5 composite tables", composite_tables),
        ("6 inconsistency reproduction", inconsistency),
        ("7 tensor path", tensor_path),
        ("8 reversibility", reversibility),
        ("9 stokes convergence", stokes_convergence),
        ("10 projection postulate", projection_postulate),
        ("11 singlet invariance", singlet_invariance),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS  criterion {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  criterion {name}: {detail}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
