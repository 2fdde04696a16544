//! CHSH experiments on pairs with zero total angular momentum.
//!
//! Observer 1 picks analyzer `n` or `n'`, observer 2 picks `m` or `m'`, and
//! `B = [v₁(n) + v₁(n')] v₂(m) + [v₁(n) - v₁(n')] v₂(m')`. Expanded,
//! `⟨B⟩ = E(n,m) + E(n',m) + E(n,m') - E(n',m')`.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, UnitSphere};
use serde::{Deserialize, Serialize};

use crate::axis::{angle_between, make_axis, UnitAxis};
use crate::dichotomic::{binomial_mean, Sign};
use crate::error::{Error, Result};
use crate::sampling::batched_counts;

/// Bound obeyed by every local deterministic strategy and mixture thereof.
pub const LOCAL_BOUND: f64 = 2.0;

/// Slack used when deciding whether a value breaks the local bound.
pub const VIOLATION_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AliceSetting {
    N,
    NPrime,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BobSetting {
    M,
    MPrime,
}

/// The four terms of `⟨B⟩` in output order, with their signs.
pub const TERMS: [(AliceSetting, BobSetting, f64); 4] = [
    (AliceSetting::N, BobSetting::M, 1.0),
    (AliceSetting::NPrime, BobSetting::M, 1.0),
    (AliceSetting::N, BobSetting::MPrime, 1.0),
    (AliceSetting::NPrime, BobSetting::MPrime, -1.0),
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshConfig {
    pub n: UnitAxis,
    pub n_prime: UnitAxis,
    pub m: UnitAxis,
    pub m_prime: UnitAxis,
}

impl ChshConfig {
    /// Coplanar axes 45° apart in the order `n'`, `m`, `n`, `m'`.
    pub fn canonical() -> Self {
        let deg = |d: f64| make_axis(d.to_radians(), 0.0).expect("finite angle");
        ChshConfig {
            n_prime: deg(0.0),
            m: deg(45.0),
            n: deg(90.0),
            m_prime: deg(135.0),
        }
    }

    /// All four analyzers along one axis.
    pub fn uniform(axis: UnitAxis) -> Self {
        ChshConfig {
            n: axis,
            n_prime: axis,
            m: axis,
            m_prime: axis,
        }
    }

    pub fn alice(&self, setting: AliceSetting) -> &UnitAxis {
        match setting {
            AliceSetting::N => &self.n,
            AliceSetting::NPrime => &self.n_prime,
        }
    }

    pub fn bob(&self, setting: BobSetting) -> &UnitAxis {
        match setting {
            BobSetting::M => &self.m,
            BobSetting::MPrime => &self.m_prime,
        }
    }
}

/// Predetermined ±1 answers for each of the four analyzer settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DeterministicStrategy {
    pub v1n: Sign,
    pub v1np: Sign,
    pub v2m: Sign,
    pub v2mp: Sign,
}

impl DeterministicStrategy {
    /// All 16 strategies; bit `k` of the index set means `-1` for the
    /// `k`-th of `(v1n, v1np, v2m, v2mp)`.
    pub fn all() -> Vec<DeterministicStrategy> {
        let bit = |i: u8, k: u8| {
            if i >> k & 1 == 1 {
                Sign::Minus
            } else {
                Sign::Plus
            }
        };
        (0..16u8)
            .map(|i| DeterministicStrategy {
                v1n: bit(i, 3),
                v1np: bit(i, 2),
                v2m: bit(i, 1),
                v2mp: bit(i, 0),
            })
            .collect()
    }

    pub fn alice(&self, setting: AliceSetting) -> Sign {
        match setting {
            AliceSetting::N => self.v1n,
            AliceSetting::NPrime => self.v1np,
        }
    }

    pub fn bob(&self, setting: BobSetting) -> Sign {
        match setting {
            BobSetting::M => self.v2m,
            BobSetting::MPrime => self.v2mp,
        }
    }

    /// `B` evaluated in its factored form.
    pub fn b_value(&self) -> f64 {
        let (n, np, m, mp) = (
            self.v1n.value(),
            self.v1np.value(),
            self.v2m.value(),
            self.v2mp.value(),
        );
        (n + np) * m + (n - np) * mp
    }

    pub fn values(&self) -> [i8; 4] {
        [self.v1n, self.v1np, self.v2m, self.v2mp].map(|s| s.value() as i8)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CorrelatorModel {
    /// `⟨v₁(n) v₂(m)⟩ = -n·m`.
    QuantumSinglet,
    /// `v₁ = sign(n·λ)`, `v₂ = -sign(m·λ)` with `λ` uniform on the sphere.
    LhvSign,
    LhvDeterministic(DeterministicStrategy),
    /// Convex combination of deterministic strategies.
    LhvMixture(Vec<(f64, DeterministicStrategy)>),
}

impl CorrelatorModel {
    pub fn mixture(weights: Vec<(f64, DeterministicStrategy)>) -> Result<Self> {
        if weights.is_empty() || weights.iter().any(|(w, _)| !w.is_finite() || *w < 0.0) {
            return Err(Error::Domain(
                "mixture weights must be non-negative and finite".into(),
            ));
        }
        let total: f64 = weights.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!(
                "mixture weights sum to {total}, not 1"
            )));
        }
        Ok(CorrelatorModel::LhvMixture(weights))
    }

    pub fn name(&self) -> &'static str {
        match self {
            CorrelatorModel::QuantumSinglet => "quantum",
            CorrelatorModel::LhvSign => "lhv-sign",
            CorrelatorModel::LhvDeterministic(_) => "lhv-deterministic",
            CorrelatorModel::LhvMixture(_) => "lhv-mixture",
        }
    }

    pub fn is_local(&self) -> bool {
        !matches!(self, CorrelatorModel::QuantumSinglet)
    }

    pub fn correlation(&self, config: &ChshConfig, alice: AliceSetting, bob: BobSetting) -> f64 {
        let (n, m) = (config.alice(alice), config.bob(bob));
        match self {
            CorrelatorModel::QuantumSinglet => quantum_correlator(n, m),
            CorrelatorModel::LhvSign => lhv_sign_correlator(n, m),
            CorrelatorModel::LhvDeterministic(s) => s.alice(alice).value() * s.bob(bob).value(),
            CorrelatorModel::LhvMixture(parts) => parts
                .iter()
                .map(|(w, s)| w * s.alice(alice).value() * s.bob(bob).value())
                .sum(),
        }
    }

    /// Draws one pair of outcomes for the given settings.
    pub fn sample<R: Rng + ?Sized>(
        &self,
        config: &ChshConfig,
        alice: AliceSetting,
        bob: BobSetting,
        rng: &mut R,
    ) -> (Sign, Sign) {
        let (n, m) = (config.alice(alice), config.bob(bob));
        match self {
            CorrelatorModel::QuantumSinglet => sample_singlet_pair(n, m, rng),
            CorrelatorModel::LhvSign => sample_lhv_sign_pair(n, m, rng),
            CorrelatorModel::LhvDeterministic(s) => (s.alice(alice), s.bob(bob)),
            CorrelatorModel::LhvMixture(parts) => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                let mut chosen = &parts[parts.len() - 1].1;
                for (w, s) in parts {
                    acc += w;
                    if u < acc {
                        chosen = s;
                        break;
                    }
                }
                (chosen.alice(alice), chosen.bob(bob))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChshResult {
    pub b_value: f64,
    pub violates: bool,
    /// `[E(n,m), E(n',m), E(n,m'), E(n',m')]`.
    pub correlations: [f64; 4],
}

impl ChshResult {
    pub fn from_correlations(correlations: [f64; 4]) -> Self {
        let b_value = TERMS
            .iter()
            .zip(correlations)
            .map(|((_, _, s), e)| s * e)
            .sum::<f64>();
        ChshResult {
            b_value,
            violates: b_value.abs() > LOCAL_BOUND + VIOLATION_SLACK,
            correlations,
        }
    }
}

pub fn quantum_correlator(n: &UnitAxis, m: &UnitAxis) -> f64 {
    -n.dot(m)
}

/// Closed form `-1 + 2θ/π` of the sign model.
pub fn lhv_sign_correlator(n: &UnitAxis, m: &UnitAxis) -> f64 {
    -1.0 + 2.0 * angle_between(n, m) / PI
}

pub fn chsh_value(config: &ChshConfig, model: &CorrelatorModel) -> ChshResult {
    ChshResult::from_correlations(
        TERMS.map(|(alice, bob, _)| model.correlation(config, alice, bob)),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct LhvScan {
    pub rows: Vec<(DeterministicStrategy, f64)>,
    pub max_abs_b: f64,
    pub argmax: Vec<DeterministicStrategy>,
}

/// Evaluates `B` for every deterministic strategy through `chsh_value`.
/// The analyzer axes are irrelevant to a deterministic model.
pub fn lhv_deterministic_scan() -> LhvScan {
    let config = ChshConfig::canonical();
    let rows: Vec<_> = DeterministicStrategy::all()
        .into_iter()
        .map(|s| {
            (
                s,
                chsh_value(&config, &CorrelatorModel::LhvDeterministic(s)).b_value,
            )
        })
        .collect();
    let max_abs_b = rows.iter().map(|(_, b)| b.abs()).fold(0.0, f64::max);
    let argmax = rows
        .iter()
        .filter(|(_, b)| b.abs() == max_abs_b)
        .map(|(s, _)| *s)
        .collect();
    LhvScan {
        rows,
        max_abs_b,
        argmax,
    }
}

/// Joint law `P(v₁, v₂) = (1 - v₁ v₂ cosθ)/4`, indexed `[v₁][v₂]` with
/// index 0 for `+1`. It has uniform marginals and `⟨v₁v₂⟩ = -n·m`.
pub fn singlet_joint_law(n: &UnitAxis, m: &UnitAxis) -> [[f64; 2]; 2] {
    let c = angle_between(n, m).cos();
    let same = (1.0 - c) / 4.0;
    let opposite = (1.0 + c) / 4.0;
    [[same, opposite], [opposite, same]]
}

pub fn sample_singlet_pair<R: Rng + ?Sized>(
    n: &UnitAxis,
    m: &UnitAxis,
    rng: &mut R,
) -> (Sign, Sign) {
    let law = singlet_joint_law(n, m);
    let u: f64 = rng.random();
    let cut_1 = law[0][0];
    let cut_2 = cut_1 + law[0][1];
    let cut_3 = cut_2 + law[1][0];
    if u < cut_1 {
        (Sign::Plus, Sign::Plus)
    } else if u < cut_2 {
        (Sign::Plus, Sign::Minus)
    } else if u < cut_3 || law[1][1] == 0.0 {
        (Sign::Minus, Sign::Plus)
    } else {
        (Sign::Minus, Sign::Minus)
    }
}

fn sign_of(x: f64) -> Sign {
    if x >= 0.0 {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

pub fn sample_lhv_sign_pair<R: Rng + ?Sized>(
    n: &UnitAxis,
    m: &UnitAxis,
    rng: &mut R,
) -> (Sign, Sign) {
    let [x, y, z]: [f64; 3] = UnitSphere.sample(rng);
    let lambda = nalgebra::Vector3::new(x, y, z);
    (
        sign_of(n.as_vector().dot(&lambda)),
        sign_of(m.as_vector().dot(&lambda)).flip(),
    )
}

/// Tallies `[same, opposite]` outcome pairs for one pair of settings.
fn product_counts(
    config: &ChshConfig,
    model: &CorrelatorModel,
    alice: AliceSetting,
    bob: BobSetting,
    trials: u64,
    seed: u64,
    stream: u64,
) -> [u64; 2] {
    batched_counts(seed, &[stream], trials, |rng, len| {
        let mut counts = [0u64; 2];
        for _ in 0..len {
            let (v1, v2) = model.sample(config, alice, bob, rng);
            counts[(v1 != v2) as usize] += 1;
        }
        counts
    })
}

/// Monte Carlo integration of the sign model over `λ`.
pub fn lhv_sign_monte_carlo(
    n: &UnitAxis,
    m: &UnitAxis,
    samples: u64,
    seed: u64,
) -> Result<(f64, f64)> {
    if samples == 0 {
        return Err(Error::Domain("at least one sample is required".into()));
    }
    let config = ChshConfig {
        n: *n,
        n_prime: *n,
        m: *m,
        m_prime: *m,
    };
    let [same, opposite] = product_counts(
        &config,
        &CorrelatorModel::LhvSign,
        AliceSetting::N,
        BobSetting::M,
        samples,
        seed,
        0,
    );
    Ok(binomial_mean(same, opposite))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloChsh {
    pub estimate: f64,
    pub stderr: f64,
    pub correlations: [f64; 4],
    pub stderrs: [f64; 4],
    pub trials_per_pair: u64,
    pub seed: u64,
    pub analytic: ChshResult,
}

/// Estimates the four correlations by sampling. Term `k` draws from batch
/// stream `k`, so the result depends only on `seed`.
pub fn monte_carlo_chsh(
    config: &ChshConfig,
    model: &CorrelatorModel,
    trials_per_pair: u64,
    seed: u64,
) -> Result<MonteCarloChsh> {
    if trials_per_pair == 0 {
        return Err(Error::Domain("trials_per_pair must be at least 1".into()));
    }
    let mut correlations = [0.0; 4];
    let mut stderrs = [0.0; 4];
    for (k, (alice, bob, _)) in TERMS.iter().enumerate() {
        let [same, opposite] =
            product_counts(config, model, *alice, *bob, trials_per_pair, seed, k as u64);
        (correlations[k], stderrs[k]) = binomial_mean(same, opposite);
    }
    let sampled = ChshResult::from_correlations(correlations);
    let stderr = stderrs.iter().map(|s| s * s).sum::<f64>().sqrt();
    Ok(MonteCarloChsh {
        estimate: sampled.b_value,
        stderr,
        correlations,
        stderrs,
        trials_per_pair,
        seed,
        analytic: chsh_value(config, model),
    })
}
