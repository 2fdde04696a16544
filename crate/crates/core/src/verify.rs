//! Oracle-equivalence and invariant sweep over all engines.

use std::f64::consts::{PI, SQRT_2};

use serde::Serialize;

use crate::axis::{angle_between, make_axis, random_axis, random_rotation, Frame};
use crate::chsh::{chsh_value, lhv_deterministic_scan, ChshConfig, CorrelatorModel};
use crate::composite::{
    j_squared_composite, mixture_transition_table, product_transition_table, rotated_m33,
    singlet_statistics, transition_table, CompositeModel, CompositeState, Level,
};
use crate::dichotomic::{
    expectation, j_squared, second_moment, transition_probability, ElementaryState, Sign,
};
use crate::oracle::{singlet_projection_check, spin_half_probability, spin_one_probability};
use crate::sampling::rng_from_seed;

pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Seed of the configurations sampled by [`run`].
pub const SWEEP_SEED: u64 = 0x5eed_b175;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub max_deviation: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub tolerance: f64,
    pub passed: bool,
    pub checks: Vec<CheckOutcome>,
    pub failures: Vec<&'static str>,
}

struct Sweep {
    tolerance: f64,
    checks: Vec<CheckOutcome>,
}

impl Sweep {
    fn record(&mut self, name: &'static str, deviations: impl IntoIterator<Item = f64>) {
        let max_deviation =
            deviations.into_iter().fold(
                0.0,
                |acc: f64, d| if d.is_nan() { f64::NAN } else { acc.max(d) },
            );
        let passed = max_deviation <= self.tolerance;
        self.checks.push(CheckOutcome {
            name,
            max_deviation,
            passed,
        });
    }
}

const SIGNS: [Sign; 2] = [Sign::Plus, Sign::Minus];

/// Runs every check and compares its largest deviation with `tolerance`.
pub fn run(tolerance: f64) -> VerifyReport {
    let mut rng = rng_from_seed(SWEEP_SEED);
    let pairs: Vec<_> = (0..1000)
        .map(|_| (random_axis(&mut rng), random_axis(&mut rng)))
        .collect();
    let grid: Vec<f64> = (0..50).map(|i| PI * i as f64 / 49.0).collect();
    let mut sweep = Sweep {
        tolerance,
        checks: Vec::new(),
    };

    sweep.record(
        "qubit_oracle_agreement",
        pairs.iter().flat_map(|(n, m)| {
            SIGNS.into_iter().flat_map(move |k| {
                let dist = transition_probability(&ElementaryState::unit(*n, k), m);
                SIGNS.map(|j| (dist.get(j) - spin_half_probability(n, k, m, j)).abs())
            })
        }),
    );
    sweep.record(
        "qubit_normalization",
        pairs.iter().flat_map(|(n, m)| {
            SIGNS.map(|k| {
                let d = transition_probability(&ElementaryState::unit(*n, k), m);
                (d.p_plus + d.p_minus - 1.0).abs()
            })
        }),
    );
    sweep.record(
        "qubit_reversibility",
        pairs.iter().flat_map(|(n, m)| {
            let forward = transition_probability(&ElementaryState::unit(*n, Sign::Plus), m);
            let backward = transition_probability(&ElementaryState::unit(*n, Sign::Minus), m);
            let swapped = transition_probability(&ElementaryState::unit(*m, Sign::Plus), n);
            [
                (forward.p_minus - backward.p_plus).abs(),
                (forward.p_plus - swapped.p_plus).abs(),
            ]
        }),
    );
    sweep.record(
        "qubit_mean_constraint",
        pairs.iter().map(|(n, m)| {
            let state = ElementaryState::unit(*n, Sign::Plus);
            let d = transition_probability(&state, m);
            (d.p_plus - d.p_minus - n.dot(m)).abs() + (expectation(&state, m) - n.dot(m)).abs()
        }),
    );
    let rotations: Vec<_> = (0..100).map(|_| random_rotation(&mut rng)).collect();
    sweep.record(
        "qubit_variance_constancy",
        pairs
            .iter()
            .zip(rotations.iter().cycle())
            .map(|((n, m), r)| {
                let state = ElementaryState::unit(*n, Sign::Minus);
                let frame = Frame::from_rotation(r).expect("rotation matrix");
                (second_moment(&state, m) - 1.0).abs() + (j_squared(&state, &frame) - 3.0).abs()
            }),
    );

    sweep.record(
        "composite_oracle_agreement",
        grid.iter().flat_map(|&theta| {
            let m = make_axis(theta, 0.0).expect("finite");
            Level::ALL.into_iter().flat_map(move |k| {
                let table =
                    transition_table(&CompositeState::unit(crate::axis::UnitAxis::Z, k), &m);
                Level::ALL.map(|j| {
                    let oracle =
                        spin_one_probability(k.label(), j.label(), theta).expect("valid labels");
                    (table.get(j) - oracle).abs()
                })
            })
        }),
    );
    sweep.record(
        "composite_normalization",
        pairs.iter().flat_map(|(n, m)| {
            let mut d: Vec<f64> = Level::ALL
                .iter()
                .map(|&k| (transition_table(&CompositeState::unit(*n, k), m).sum() - 1.0).abs())
                .collect();
            let zero = CompositeState::unit(*n, Level::Zero);
            d.push(
                (mixture_transition_table(&zero, m)
                    .expect("zero state")
                    .sum()
                    - 1.0)
                    .abs(),
            );
            d
        }),
    );
    sweep.record(
        "composite_reversibility",
        pairs.iter().flat_map(|(n, m)| {
            Level::ALL.into_iter().flat_map(move |k| {
                let forward = transition_table(&CompositeState::unit(*n, k), m);
                Level::ALL.map(|j| {
                    (forward.get(j) - transition_table(&CompositeState::unit(*n, j), m).get(k))
                        .abs()
                })
            })
        }),
    );
    sweep.record(
        "composite_factor_two",
        pairs.iter().map(|(n, m)| {
            let zero = CompositeState::unit(*n, Level::Zero);
            let principled = transition_table(&zero, m).p_plus2;
            let mixture = mixture_transition_table(&zero, m)
                .expect("zero state")
                .p_plus2;
            (principled - 2.0 * mixture).abs()
        }),
    );
    sweep.record(
        "composite_product_rows",
        pairs.iter().flat_map(|(n, m)| {
            [Level::Plus2, Level::Minus2].map(|k| {
                let s = CompositeState::unit(*n, k);
                let direct = transition_table(&s, m);
                let product = product_transition_table(&s, m).expect("±2 state");
                Level::ALL
                    .iter()
                    .map(|&j| (direct.get(j) - product.get(j)).abs())
                    .fold(0.0, f64::max)
            })
        }),
    );
    let zero_z = CompositeState::unit(crate::axis::UnitAxis::Z, Level::Zero);
    sweep.record(
        "tensor_rotated_m33",
        grid.iter().map(|&theta| {
            (rotated_m33(&zero_z, theta).expect("zero state") - 4.0 * theta.sin().powi(2)).abs()
        }),
    );
    sweep.record(
        "composite_j_squared",
        rotations.iter().flat_map(|r| {
            let frame = Frame::from_rotation(r).expect("rotation matrix");
            let mut d: Vec<f64> = Level::ALL
                .iter()
                .map(|&k| {
                    let j2 = j_squared_composite(
                        &CompositeState::unit(crate::axis::UnitAxis::Z, k),
                        &frame,
                        CompositeModel::Principled,
                    );
                    (j2.expect("principled") - 8.0).abs()
                })
                .collect();
            d.push(
                (j_squared_composite(&zero_z, &frame, CompositeModel::Mixture)
                    .expect("zero state")
                    - 4.0)
                    .abs(),
            );
            d
        }),
    );
    sweep.record(
        "singlet_invariance",
        pairs.iter().map(|(n, _)| {
            let (mean, j2) = singlet_statistics(n);
            mean.abs() + j2.abs() + (singlet_projection_check(n) - 1.0).abs()
        }),
    );
    sweep.record(
        "relative_angle_only",
        pairs
            .iter()
            .zip(rotations.iter().cycle())
            .map(|((n, m), r)| {
                let (rn, rm) = (
                    n.rotate(r).expect("rotation"),
                    m.rotate(r).expect("rotation"),
                );
                let before = transition_probability(&ElementaryState::unit(*n, Sign::Plus), m);
                let after = transition_probability(&ElementaryState::unit(rn, Sign::Plus), &rm);
                (before.p_plus - after.p_plus).abs()
                    + (angle_between(n, m) - angle_between(&rn, &rm)).abs()
            }),
    );

    let canonical = chsh_value(&ChshConfig::canonical(), &CorrelatorModel::QuantumSinglet);
    let scan = lhv_deterministic_scan();
    sweep.record(
        "chsh_bounds",
        [
            (canonical.b_value.abs() - 2.0 * SQRT_2).abs(),
            (scan.max_abs_b - 2.0).abs(),
            scan.rows
                .iter()
                .map(|(_, b)| (b.abs() - 2.0).abs())
                .fold(0.0, f64::max),
        ],
    );

    let failures = sweep
        .checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.name)
        .collect::<Vec<_>>();
    VerifyReport {
        tolerance,
        passed: failures.is_empty(),
        checks: sweep.checks,
        failures,
    }
}
