//! The elementary two-outcome system.
//!
//! A state prepared with outcome `±a` along `n̂` and measured along `m̂` must
//! give outcomes in `{±a}` while reproducing the classical projection
//! `±a cosθ` on average. Together with normalization this fixes
//! `P(n̂+ : m̂+) = cos²(θ/2)` and `P(n̂+ : m̂-) = sin²(θ/2)`.

use rand::Rng;
use serde::{Serialize, Serializer};

use crate::axis::{angle_between, Frame, UnitAxis};
use crate::error::{Error, Result};
use crate::sampling::{self, batched_counts};

/// A dichotomic outcome label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl TryFrom<i64> for Sign {
    type Error = Error;

    fn try_from(label: i64) -> Result<Self> {
        match label {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            other => Err(Error::InvalidLabel(other)),
        }
    }
}

pub(crate) fn check_magnitude(a: f64) -> Result<f64> {
    if a.is_finite() && a > 0.0 {
        Ok(a)
    } else {
        Err(Error::BadMagnitude(a))
    }
}

/// Outcome `sign · a` obtained along `axis`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementaryState {
    axis: UnitAxis,
    sign: Sign,
    a: f64,
}

impl ElementaryState {
    pub fn new(axis: UnitAxis, sign: Sign, a: f64) -> Result<Self> {
        Ok(ElementaryState {
            axis,
            sign,
            a: check_magnitude(a)?,
        })
    }

    /// Unit-magnitude state.
    pub fn unit(axis: UnitAxis, sign: Sign) -> Self {
        ElementaryState { axis, sign, a: 1.0 }
    }

    pub fn axis(&self) -> UnitAxis {
        self.axis
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn a(&self) -> f64 {
        self.a
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BinaryDistribution {
    pub p_plus: f64,
    pub p_minus: f64,
}

impl BinaryDistribution {
    pub fn get(&self, sign: Sign) -> f64 {
        match sign {
            Sign::Plus => self.p_plus,
            Sign::Minus => self.p_minus,
        }
    }
}

pub fn transition_probability(
    prepared: &ElementaryState,
    measured_axis: &UnitAxis,
) -> BinaryDistribution {
    let half = 0.5 * angle_between(&prepared.axis, measured_axis);
    let along = half.cos().powi(2);
    let against = half.sin().powi(2);
    match prepared.sign {
        Sign::Plus => BinaryDistribution {
            p_plus: along,
            p_minus: against,
        },
        Sign::Minus => BinaryDistribution {
            p_plus: against,
            p_minus: along,
        },
    }
}

/// `⟨J·m̂⟩ = sign · a · cosθ`.
pub fn expectation(prepared: &ElementaryState, measured_axis: &UnitAxis) -> f64 {
    prepared.sign.value() * prepared.a * angle_between(&prepared.axis, measured_axis).cos()
}

/// `Σ_α (αa)² P(n̂β : m̂α)`, which collapses to `a²` for every pair of axes.
pub fn second_moment(prepared: &ElementaryState, measured_axis: &UnitAxis) -> f64 {
    let p = transition_probability(prepared, measured_axis);
    let a2 = prepared.a * prepared.a;
    a2 * p.p_plus + a2 * p.p_minus
}

/// `⟨J²⟩` as the sum of second moments over three orthogonal axes.
pub fn j_squared(prepared: &ElementaryState, frame: &Frame) -> f64 {
    frame
        .axes()
        .iter()
        .map(|e| second_moment(prepared, e))
        .sum()
}

/// Samples one outcome along `axis`. The returned state is the projection
/// onto the observed outcome, so repeating the measurement is deterministic.
pub fn measure<R: Rng + ?Sized>(
    state: &ElementaryState,
    axis: &UnitAxis,
    rng: &mut R,
) -> (f64, ElementaryState) {
    let p = transition_probability(state, axis);
    let sign = if rng.random::<f64>() < p.p_plus {
        Sign::Plus
    } else {
        Sign::Minus
    };
    let post = ElementaryState {
        axis: *axis,
        sign,
        a: state.a,
    };
    (sign.value() * state.a, post)
}

/// Counts of single-quantum detections in the two output ports of an
/// analyzer, with the Stokes-parameter estimate `(n₊ - n₋)/N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StokesRecord {
    pub n_plus: u64,
    pub n_minus: u64,
    pub estimate: f64,
    pub stderr: f64,
    pub seed: u64,
}

impl StokesRecord {
    pub fn from_counts(n_plus: u64, n_minus: u64, seed: u64) -> Result<Self> {
        let n = n_plus + n_minus;
        if n == 0 {
            return Err(Error::Domain(
                "a Stokes record needs at least one event".into(),
            ));
        }
        let (estimate, stderr) = binomial_mean(n_plus, n_minus);
        Ok(StokesRecord {
            n_plus,
            n_minus,
            estimate,
            stderr,
            seed,
        })
    }

    pub fn n_events(&self) -> u64 {
        self.n_plus + self.n_minus
    }
}

/// Mean of ±1 outcomes and its normal-approximation standard error.
pub(crate) fn binomial_mean(n_plus: u64, n_minus: u64) -> (f64, f64) {
    let n = (n_plus + n_minus) as f64;
    let estimate = (n_plus as f64 - n_minus as f64) / n;
    let stderr = ((1.0 - estimate * estimate).max(0.0) / n).sqrt();
    (estimate, stderr)
}

impl Serialize for StokesRecord {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Counts {
            plus: u64,
            minus: u64,
        }
        #[derive(Serialize)]
        struct Wire {
            seed: u64,
            n_events: u64,
            counts: Counts,
            estimate: f64,
            stderr: f64,
        }
        Wire {
            seed: self.seed,
            n_events: self.n_events(),
            counts: Counts {
                plus: self.n_plus,
                minus: self.n_minus,
            },
            estimate: self.estimate,
            stderr: self.stderr,
        }
        .serialize(serializer)
    }
}

/// Counts `+`/`-` outcomes of `trials` independent measurements of one state.
pub fn measurement_counts(
    state: &ElementaryState,
    axis: &UnitAxis,
    trials: u64,
    seed: u64,
) -> [u64; 2] {
    batched_counts(seed, &[], trials, |rng, n| {
        let mut counts = [0u64; 2];
        for _ in 0..n {
            match measure(state, axis, rng).1.sign {
                Sign::Plus => counts[0] += 1,
                Sign::Minus => counts[1] += 1,
            }
        }
        counts
    })
}

/// Sends `n_events` quanta prepared along `prep_axis` through an analyzer
/// along `measure_axis`, one at a time.
pub fn stokes_experiment(
    prep_axis: &UnitAxis,
    measure_axis: &UnitAxis,
    n_events: u64,
    seed: u64,
) -> Result<StokesRecord> {
    if n_events == 0 {
        return Err(Error::Domain("n_events must be at least 1".into()));
    }
    let state = ElementaryState::unit(*prep_axis, Sign::Plus);
    let [plus, minus] = measurement_counts(&state, measure_axis, n_events, seed);
    StokesRecord::from_counts(plus, minus, seed)
}

/// Measures twice along the same axis and reports whether the outcomes agree.
pub fn repeat_measurement<R: Rng + ?Sized>(
    state: &ElementaryState,
    axis: &UnitAxis,
    rng: &mut R,
) -> bool {
    let (first, post) = measure(state, axis, rng);
    let (second, _) = measure(&post, axis, rng);
    first == second
}

/// Pearson statistic for observed `[+, -]` counts against a distribution.
/// Cells with zero expected probability contribute nothing when empty and
/// make the statistic infinite otherwise.
pub fn chi_square(counts: [u64; 2], dist: &BinaryDistribution) -> f64 {
    let n = (counts[0] + counts[1]) as f64;
    [dist.p_plus, dist.p_minus]
        .iter()
        .zip(counts)
        .map(|(&p, observed)| {
            let expected = p * n;
            if expected == 0.0 {
                if observed == 0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                (observed as f64 - expected).powi(2) / expected
            }
        })
        .sum()
}

/// Seed of the `index`-th replicate of an experiment.
pub fn replicate_seed(master: u64, index: u64) -> u64 {
    sampling::derive_seed(master, &[u64::MAX, index])
}
