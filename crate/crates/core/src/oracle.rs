//! Hilbert-space cross-check: transition probabilities as squared amplitudes.
//!
//! Nothing in the engines calls into this module. Spin-½ states use
//! `(cos θ/2, e^{iφ} sin θ/2)` for the `+` outcome, with `θ, φ` the polar
//! angles of the axis in the frame `complete_frame(ẑ)`, and
//! `(-e^{-iφ} sin θ/2, cos θ/2)` for `-`. Spin-1 amplitudes come from
//! exponentiating the `J_y` generator numerically.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use serde::Serialize;

use crate::axis::{complete_frame, UnitAxis};
use crate::composite::Level;
use crate::dichotomic::Sign;
use crate::error::{Error, Result};

pub type ComplexAmplitude = Complex64;

/// A normalized state vector in two or three dimensions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpinState {
    components: Vec<(f64, f64)>,
}

impl SpinState {
    pub fn new(components: Vec<ComplexAmplitude>) -> Result<Self> {
        if !(2..=3).contains(&components.len()) {
            return Err(Error::Domain("spin states have dimension 2 or 3".into()));
        }
        if components
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::NonFinite("amplitude"));
        }
        let norm: f64 = components.iter().map(|c| c.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("state has squared norm {norm}")));
        }
        Ok(SpinState {
            components: components.iter().map(|c| (c.re, c.im)).collect(),
        })
    }

    pub fn dimension(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> Vec<ComplexAmplitude> {
        self.components
            .iter()
            .map(|&(re, im)| Complex64::new(re, im))
            .collect()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &SpinState) -> ComplexAmplitude {
        self.components()
            .iter()
            .zip(other.components())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Multiplies every component by `e^{iα}`.
    pub fn with_phase(&self, alpha: f64) -> SpinState {
        let phase = Complex64::from_polar(1.0, alpha);
        let components = self
            .components()
            .into_iter()
            .map(|c| c * phase)
            .map(|c| (c.re, c.im))
            .collect();
        SpinState { components }
    }
}

fn oracle_angles(axis: &UnitAxis) -> (f64, f64) {
    let frame = complete_frame(&UnitAxis::Z);
    let v = axis.as_vector();
    let (x, y, z) = (
        v.dot(frame.e1.as_vector()),
        v.dot(frame.e2.as_vector()),
        v.dot(frame.e3.as_vector()),
    );
    (x.hypot(y).atan2(z), y.atan2(x))
}

pub fn spin_half_state(axis: &UnitAxis, sign: Sign) -> SpinState {
    let (theta, phi) = oracle_angles(axis);
    let (s, c) = (0.5 * theta).sin_cos();
    let components = match sign {
        Sign::Plus => vec![Complex64::new(c, 0.0), Complex64::from_polar(s, phi)],
        Sign::Minus => vec![-Complex64::from_polar(s, -phi), Complex64::new(c, 0.0)],
    };
    SpinState::new(components).expect("normalized by construction")
}

/// `|⟨m̂ j | n̂ k⟩|²`.
pub fn spin_half_probability(
    prep_axis: &UnitAxis,
    prep_sign: Sign,
    meas_axis: &UnitAxis,
    meas_sign: Sign,
) -> f64 {
    spin_half_state(meas_axis, meas_sign)
        .inner(&spin_half_state(prep_axis, prep_sign))
        .norm_sqr()
}

/// `J_y` for spin 1 in the basis `m = +1, 0, -1`.
fn spin_one_jy() -> Matrix3<Complex64> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let i = Complex64::new(0.0, r);
    let z = Complex64::new(0.0, 0.0);
    // (J₊ - J₋)/(2i) with ⟨m+1|J₊|m⟩ = √2
    Matrix3::new(z, -i, z, i, z, -i, z, i, z)
}

/// Wigner rotation `exp(-iθ J_y)` in the basis `m = +1, 0, -1`.
pub fn spin_one_rotation(theta: f64) -> Matrix3<Complex64> {
    (spin_one_jy() * Complex64::new(0.0, -theta)).exp()
}

fn basis_index(level: Level) -> usize {
    (1 - level.magnetic()) as usize
}

/// `|d¹_{m'm}(θ)|²` from the numerically exponentiated generator.
pub fn spin_one_probability(prep_level: i64, meas_level: i64, theta: f64) -> Result<f64> {
    let prep = Level::try_from(prep_level)?;
    let meas = Level::try_from(meas_level)?;
    if !theta.is_finite() {
        return Err(Error::NonFinite("theta"));
    }
    let d = spin_one_rotation(theta);
    Ok(d[(basis_index(meas), basis_index(prep))].norm_sqr())
}

fn kron(a: &SpinState, b: &SpinState) -> [Complex64; 4] {
    let (a, b) = (a.components(), b.components());
    [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]]
}

fn singlet_in(axis: &UnitAxis) -> [Complex64; 4] {
    let up = spin_half_state(axis, Sign::Plus);
    let down = spin_half_state(axis, Sign::Minus);
    let ud = kron(&up, &down);
    let du = kron(&down, &up);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    [0, 1, 2, 3].map(|k| (ud[k] - du[k]) * r)
}

/// Squared overlap between `ψ⁻` built in the `ẑ` basis and `ψ⁻` built in
/// the eigenbasis of `axis`.
pub fn singlet_projection_check(axis: &UnitAxis) -> f64 {
    let reference = singlet_in(&UnitAxis::Z);
    let rotated = singlet_in(axis);
    reference
        .iter()
        .zip(rotated.iter())
        .map(|(a, b)| a.conj() * b)
        .sum::<Complex64>()
        .norm_sqr()
}

/// Spin-½ amplitudes of both outcomes along `axis`, for debugging dumps.
#[derive(Debug, Clone, Serialize)]
pub struct AmplitudeRow {
    pub axis: UnitAxis,
    pub plus: SpinState,
    pub minus: SpinState,
}

pub fn amplitude_table(axes: &[UnitAxis]) -> Vec<AmplitudeRow> {
    axes.iter()
        .map(|a| AmplitudeRow {
            axis: *a,
            plus: spin_half_state(a, Sign::Plus),
            minus: spin_half_state(a, Sign::Minus),
        })
        .collect()
}

/// Expectation `⟨ψ|σ·v|ψ⟩` of a spin-½ state, used to check that states
/// point where they should.
pub fn bloch_vector(state: &SpinState) -> Result<Vector3<f64>> {
    if state.dimension() != 2 {
        return Err(Error::Domain("Bloch vectors exist for spin ½ only".into()));
    }
    let c = state.components();
    let off = c[0].conj() * c[1];
    Ok(Vector3::new(
        2.0 * off.re,
        2.0 * off.im,
        c[0].norm_sqr() - c[1].norm_sqr(),
    ))
}
