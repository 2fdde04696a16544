//! The composite system made of two elementary ones.
//!
//! Measured along any axis it gives `+2a`, `0` or `-2a`. The `±2` rows
//! follow from the product of two independent elementary transitions. The
//! zero row is the subtle one: an equal mixture of `|+⟩|-⟩` and `|-⟩|+⟩`
//! breaks the rotational invariance of `⟨J²⟩`, while treating the second
//! moments as a rank-2 tensor gives `P(n̂0 : m̂±2) = ½ sin²θ`.

use std::fmt;
use std::str::FromStr;

use nalgebra::Matrix3;
use serde::{Serialize, Serializer};

use crate::axis::{angle_between, complete_frame, rotation_about, Frame, UnitAxis};
use crate::chsh::singlet_joint_law;
use crate::dichotomic::{check_magnitude, transition_probability, ElementaryState, Sign};
use crate::error::{Error, Result};

/// Outcome labels of the composite system, measured values `label · a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    Plus2,
    Zero,
    Minus2,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::Plus2, Level::Zero, Level::Minus2];

    pub fn label(self) -> i64 {
        match self {
            Level::Plus2 => 2,
            Level::Zero => 0,
            Level::Minus2 => -2,
        }
    }

    /// Magnetic quantum number `label / 2`.
    pub fn magnetic(self) -> i64 {
        self.label() / 2
    }

    pub fn reversed(self) -> Level {
        match self {
            Level::Plus2 => Level::Minus2,
            Level::Zero => Level::Zero,
            Level::Minus2 => Level::Plus2,
        }
    }

    pub fn key(self) -> &'static str {
        match self {
            Level::Plus2 => "+2",
            Level::Zero => "0",
            Level::Minus2 => "-2",
        }
    }
}

impl TryFrom<i64> for Level {
    type Error = Error;

    fn try_from(label: i64) -> Result<Self> {
        match label {
            2 => Ok(Level::Plus2),
            0 => Ok(Level::Zero),
            -2 => Ok(Level::Minus2),
            other => Err(Error::InvalidLabel(other)),
        }
    }
}

impl Serialize for Level {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_i64(self.label())
    }
}

/// Which rule supplies the zero-outcome row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompositeModel {
    /// Rank-2 tensor transformation of the second moments.
    Principled,
    /// Equal classical mixture of the two subsystem assignments.
    Mixture,
}

impl CompositeModel {
    pub fn name(self) -> &'static str {
        match self {
            CompositeModel::Principled => "principled",
            CompositeModel::Mixture => "mixture",
        }
    }
}

impl fmt::Display for CompositeModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CompositeModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "principled" => Ok(CompositeModel::Principled),
            "mixture" => Ok(CompositeModel::Mixture),
            other => Err(Error::Domain(format!("unknown composite model `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompositeState {
    axis: UnitAxis,
    level: Level,
    a: f64,
}

impl CompositeState {
    pub fn new(axis: UnitAxis, level: Level, a: f64) -> Result<Self> {
        Ok(CompositeState {
            axis,
            level,
            a: check_magnitude(a)?,
        })
    }

    pub fn unit(axis: UnitAxis, level: Level) -> Self {
        CompositeState {
            axis,
            level,
            a: 1.0,
        }
    }

    pub fn axis(&self) -> UnitAxis {
        self.axis
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn a(&self) -> f64 {
        self.a
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TernaryDistribution {
    pub p_plus2: f64,
    pub p_zero: f64,
    pub p_minus2: f64,
}

impl TernaryDistribution {
    pub fn get(&self, level: Level) -> f64 {
        match level {
            Level::Plus2 => self.p_plus2,
            Level::Zero => self.p_zero,
            Level::Minus2 => self.p_minus2,
        }
    }

    pub fn sum(&self) -> f64 {
        self.p_plus2 + self.p_zero + self.p_minus2
    }

    fn reversed(self) -> Self {
        TernaryDistribution {
            p_plus2: self.p_minus2,
            p_zero: self.p_zero,
            p_minus2: self.p_plus2,
        }
    }
}

impl Serialize for TernaryDistribution {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(Some(3))?;
        for level in Level::ALL {
            map.serialize_entry(level.key(), &self.get(level))?;
        }
        map.end()
    }
}

/// Transition table under the tensor rule.
pub fn transition_table(
    prepared: &CompositeState,
    measured_axis: &UnitAxis,
) -> TernaryDistribution {
    let theta = angle_between(&prepared.axis, measured_axis);
    let c = theta.cos();
    let s2 = theta.sin().powi(2);
    let aligned = TernaryDistribution {
        p_plus2: (1.0 + c).powi(2) / 4.0,
        p_zero: 0.5 * s2,
        p_minus2: (1.0 - c).powi(2) / 4.0,
    };
    match prepared.level {
        Level::Plus2 => aligned,
        Level::Minus2 => aligned.reversed(),
        Level::Zero => TernaryDistribution {
            p_plus2: 0.5 * s2,
            p_zero: c * c,
            p_minus2: 0.5 * s2,
        },
    }
}

/// Elementary transition probabilities `(P(·:m̂+), P(·:m̂-))` of one subsystem.
fn elementary(axis: &UnitAxis, sign: Sign, measured_axis: &UnitAxis) -> (f64, f64) {
    let p = transition_probability(&ElementaryState::unit(*axis, sign), measured_axis);
    (p.p_plus, p.p_minus)
}

/// Distribution of the summed outcome of two independent subsystems
/// prepared with signs `first` and `second` along `axis`.
fn independent_pair(
    axis: &UnitAxis,
    first: Sign,
    second: Sign,
    measured_axis: &UnitAxis,
) -> TernaryDistribution {
    let (p1_plus, p1_minus) = elementary(axis, first, measured_axis);
    let (p2_plus, p2_minus) = elementary(axis, second, measured_axis);
    TernaryDistribution {
        p_plus2: p1_plus * p2_plus,
        p_zero: p1_plus * p2_minus + p1_minus * p2_plus,
        p_minus2: p1_minus * p2_minus,
    }
}

/// `±2` rows built as products of two elementary transitions.
pub fn product_transition_table(
    prepared: &CompositeState,
    measured_axis: &UnitAxis,
) -> Result<TernaryDistribution> {
    let sign = match prepared.level {
        Level::Plus2 => Sign::Plus,
        Level::Minus2 => Sign::Minus,
        Level::Zero => {
            return Err(Error::Domain(
                "the product construction applies to the ±2 outcomes only".into(),
            ));
        }
    };
    Ok(independent_pair(&prepared.axis, sign, sign, measured_axis))
}

/// Zero row of the rejected mixture model: a 50/50 mixture of the two
/// orderings `|+⟩₁|-⟩₂` and `|-⟩₁|+⟩₂`.
pub fn mixture_transition_table(
    prepared: &CompositeState,
    measured_axis: &UnitAxis,
) -> Result<TernaryDistribution> {
    if prepared.level != Level::Zero {
        return Err(Error::Domain(
            "the mixture model only describes the zero outcome".into(),
        ));
    }
    let up_down = independent_pair(&prepared.axis, Sign::Plus, Sign::Minus, measured_axis);
    let down_up = independent_pair(&prepared.axis, Sign::Minus, Sign::Plus, measured_axis);
    let p_plus2 = 0.5 * (up_down.p_plus2 + down_up.p_plus2);
    let p_minus2 = 0.5 * (up_down.p_minus2 + down_up.p_minus2);
    Ok(TernaryDistribution {
        p_plus2,
        p_zero: 1.0 - p_plus2 - p_minus2,
        p_minus2,
    })
}

/// Table under `model`. The mixture model only differs on the zero row; its
/// `±2` rows are the same independent-product rows as the principled model.
pub fn model_transition_table(
    prepared: &CompositeState,
    measured_axis: &UnitAxis,
    model: CompositeModel,
) -> TernaryDistribution {
    match (model, prepared.level) {
        (CompositeModel::Mixture, Level::Zero) => {
            mixture_transition_table(prepared, measured_axis).expect("zero level")
        }
        _ => transition_table(prepared, measured_axis),
    }
}

/// Second moments `⟨J_i J_j⟩` as a symmetric 3×3 tensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondMomentTensor(Matrix3<f64>);

impl SecondMomentTensor {
    pub fn new(m: Matrix3<f64>) -> Result<Self> {
        if (m - m.transpose()).amax() > 1e-12 {
            return Err(Error::Domain(
                "second-moment tensor must be symmetric".into(),
            ));
        }
        Ok(SecondMomentTensor(m))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    /// Components in a frame rotated by `rotation`: `Rᵀ M R`.
    pub fn conjugate(&self, rotation: &Matrix3<f64>) -> SecondMomentTensor {
        SecondMomentTensor(rotation.transpose() * self.0 * rotation)
    }
}

/// `⟨(J·m̂)²⟩ = (2a)² (P₊₂ + P₋₂)`.
fn axis_second_moment(table: &TernaryDistribution, a: f64) -> f64 {
    4.0 * a * a * (table.p_plus2 + table.p_minus2)
}

/// Second-moment tensor in the frame whose third axis is the preparation axis.
///
/// For the zero state `M₃₃ = 0` is forced by the certain zero outcome, the
/// trace is the rotation invariant `8a²` and axial symmetry splits the rest
/// evenly. The `±2` diagonal is read off the `±2` transition rows.
pub fn tensor_for_state(prepared: &CompositeState) -> SecondMomentTensor {
    let a2 = prepared.a * prepared.a;
    let diagonal = match prepared.level {
        Level::Zero => {
            let m33 = 0.0;
            let transverse = 0.5 * (8.0 * a2 - m33);
            [transverse, transverse, m33]
        }
        Level::Plus2 | Level::Minus2 => {
            let frame = complete_frame(&prepared.axis);
            frame
                .axes()
                .map(|e| axis_second_moment(&transition_table(prepared, &e), prepared.a))
        }
    };
    SecondMomentTensor(Matrix3::from_diagonal(&diagonal.into()))
}

/// `M'₃₃` after tilting the measurement axis by `theta` away from the
/// preparation axis, by conjugating the tensor with the rotation matrix.
pub fn rotated_m33(prepared: &CompositeState, theta: f64) -> Result<f64> {
    if prepared.level != Level::Zero {
        return Err(Error::Domain(
            "rotated_m33 is defined for the zero state".into(),
        ));
    }
    if !theta.is_finite() {
        return Err(Error::NonFinite("theta"));
    }
    let rotation = rotation_about(&UnitAxis::Y, theta);
    Ok(tensor_for_state(prepared).conjugate(&rotation).get(2, 2))
}

/// `⟨J²⟩` summed over the three frame axes with the table of `model`.
pub fn j_squared_composite(
    prepared: &CompositeState,
    frame: &Frame,
    model: CompositeModel,
) -> Result<f64> {
    if model == CompositeModel::Mixture && prepared.level != Level::Zero {
        return Err(Error::Domain(
            "the mixture model only describes the zero outcome".into(),
        ));
    }
    Ok(frame
        .axes()
        .iter()
        .map(|e| axis_second_moment(&model_transition_table(prepared, e, model), prepared.a))
        .sum())
}

/// Components `⟨J·e_i⟩ = 2a (P₊₂ - P₋₂)` over the frame axes.
pub fn mean_vector(prepared: &CompositeState, frame: &Frame) -> [f64; 3] {
    frame.axes().map(|e| {
        let t = transition_table(prepared, &e);
        2.0 * prepared.a * (t.p_plus2 - t.p_minus2)
    })
}

/// `(⟨ψ⁻|J·m̂|ψ⁻⟩, ⟨ψ⁻|J²|ψ⁻⟩)` for the singlet, from its joint outcome law
/// with both analyzers along each axis of the frame built on `axis`.
pub fn singlet_statistics(axis: &UnitAxis) -> (f64, f64) {
    let moments = |e: &UnitAxis| {
        let law = singlet_joint_law(e, e);
        let mut first = 0.0;
        let mut second = 0.0;
        for (i, v1) in [1.0, -1.0].iter().enumerate() {
            for (j, v2) in [1.0, -1.0].iter().enumerate() {
                let total = v1 + v2;
                first += law[i][j] * total;
                second += law[i][j] * total * total;
            }
        }
        (first, second)
    };
    let (expectation, _) = moments(axis);
    let j_squared = complete_frame(axis)
        .axes()
        .iter()
        .map(|e| moments(e).1)
        .sum();
    (expectation, j_squared)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::axis::make_axis;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_6};

    fn at(theta: f64) -> UnitAxis {
        make_axis(theta, 0.0).unwrap()
    }

    fn close(t: TernaryDistribution, expected: [f64; 3], tol: f64) {
        let got = [t.p_plus2, t.p_zero, t.p_minus2];
        for (g, e) in got.iter().zip(expected) {
            assert!((g - e).abs() < tol, "{got:?} vs {expected:?}");
        }
    }

    #[test]
    fn principled_table_examples() {
        let plus = CompositeState::unit(UnitAxis::Z, Level::Plus2);
        let zero = CompositeState::unit(UnitAxis::Z, Level::Zero);
        close(transition_table(&plus, &at(0.0)), [1.0, 0.0, 0.0], 1e-15);
        close(
            transition_table(&plus, &at(FRAC_PI_2)),
            [0.25, 0.5, 0.25],
            1e-15,
        );
        close(
            transition_table(&zero, &at(FRAC_PI_2)),
            [0.5, 0.0, 0.5],
            1e-15,
        );
        close(
            transition_table(&zero, &at(FRAC_PI_4)),
            [0.25, 0.5, 0.25],
            1e-15,
        );
        let minus = CompositeState::unit(UnitAxis::Z, Level::Minus2);
        close(transition_table(&minus, &at(0.0)), [0.0, 0.0, 1.0], 1e-15);
    }

    #[test]
    fn mixture_table_examples() {
        let zero = CompositeState::unit(UnitAxis::Z, Level::Zero);
        close(
            mixture_transition_table(&zero, &at(0.0)).unwrap(),
            [0.0, 1.0, 0.0],
            1e-15,
        );
        close(
            mixture_transition_table(&zero, &at(FRAC_PI_2)).unwrap(),
            [0.25, 0.5, 0.25],
            1e-15,
        );
        close(
            mixture_transition_table(&zero, &at(FRAC_PI_4)).unwrap(),
            [0.125, 0.75, 0.125],
            1e-15,
        );
        let plus = CompositeState::unit(UnitAxis::Z, Level::Plus2);
        assert!(mixture_transition_table(&plus, &at(0.3)).is_err());
    }

    #[test]
    fn product_rows_reject_zero_state() {
        let zero = CompositeState::unit(UnitAxis::Z, Level::Zero);
        assert!(product_transition_table(&zero, &UnitAxis::X).is_err());
    }

    #[test]
    fn tensor_examples() {
        let zero = tensor_for_state(&CompositeState::unit(UnitAxis::Z, Level::Zero));
        assert_eq!(
            *zero.matrix(),
            Matrix3::from_diagonal(&[4.0, 4.0, 0.0].into())
        );
        let plus = tensor_for_state(&CompositeState::unit(UnitAxis::Z, Level::Plus2));
        let expected = Matrix3::from_diagonal(&[2.0, 2.0, 4.0].into());
        assert!((plus.matrix() - expected).amax() < 1e-12);
        for level in Level::ALL {
            let t = tensor_for_state(&CompositeState::unit(make_axis(0.4, 1.3).unwrap(), level));
            assert!((t.trace() - 8.0).abs() < 1e-12);
        }
        let scaled = tensor_for_state(&CompositeState::new(UnitAxis::Z, Level::Zero, 0.5).unwrap());
        assert!((scaled.trace() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rotated_m33_examples() {
        let zero = CompositeState::unit(UnitAxis::Z, Level::Zero);
        assert!(rotated_m33(&zero, 0.0).unwrap().abs() < 1e-15);
        assert!((rotated_m33(&zero, FRAC_PI_2).unwrap() - 4.0).abs() < 1e-12);
        assert!((rotated_m33(&zero, FRAC_PI_6).unwrap() - 1.0).abs() < 1e-12);
        let plus = CompositeState::unit(UnitAxis::Z, Level::Plus2);
        assert!(rotated_m33(&plus, 0.1).is_err());
    }

    #[test]
    fn j_squared_models() {
        for level in Level::ALL {
            let s = CompositeState::unit(UnitAxis::Z, level);
            let j2 =
                j_squared_composite(&s, &Frame::CANONICAL, CompositeModel::Principled).unwrap();
            assert!((j2 - 8.0).abs() < 1e-12);
        }
        let zero = CompositeState::unit(UnitAxis::Z, Level::Zero);
        let j2 = j_squared_composite(&zero, &Frame::CANONICAL, CompositeModel::Mixture).unwrap();
        assert!((j2 - 4.0).abs() < 1e-12);
        let plus = CompositeState::unit(UnitAxis::Z, Level::Plus2);
        assert!(j_squared_composite(&plus, &Frame::CANONICAL, CompositeModel::Mixture).is_err());
    }

    #[test]
    fn singlet_is_null_along_axes() {
        for axis in [UnitAxis::Z, UnitAxis::X, make_axis(2.0, -0.3).unwrap()] {
            assert_eq!(singlet_statistics(&axis), (0.0, 0.0));
        }
    }

    #[test]
    fn level_labels() {
        for level in Level::ALL {
            assert_eq!(Level::try_from(level.label()).unwrap(), level);
        }
        assert_eq!(Level::try_from(1), Err(Error::InvalidLabel(1)));
        assert_eq!(
            "mixture".parse::<CompositeModel>().unwrap(),
            CompositeModel::Mixture
        );
        assert!("other".parse::<CompositeModel>().is_err());
    }

    #[test]
    fn table_json_keys() {
        let t = TernaryDistribution {
            p_plus2: 0.25,
            p_zero: 0.5,
            p_minus2: 0.25,
        };
        assert_eq!(
            serde_json::to_string(&t).unwrap(),
            r#"{"+2":0.25,"0":0.5,"-2":0.25}"#
        );
    }
}
