//! Unit directions on the sphere and orthonormal frames built from them.

use std::fmt;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Allowed residual of `|v|² - 1` for a constructed axis.
pub const UNIT_TOLERANCE: f64 = 1e-12;

/// Inputs whose norm deviates from 1 by less than this are renormalized;
/// anything further off is rejected.
pub const RENORMALIZE_LIMIT: f64 = 1e-6;

/// A unit 3-vector. Every measurement direction in the crate is one of these.
#[derive(Clone, Copy, PartialEq)]
pub struct UnitAxis(Vector3<f64>);

impl UnitAxis {
    pub const X: UnitAxis = UnitAxis(Vector3::new(1.0, 0.0, 0.0));
    pub const Y: UnitAxis = UnitAxis(Vector3::new(0.0, 1.0, 0.0));
    pub const Z: UnitAxis = UnitAxis(Vector3::new(0.0, 0.0, 1.0));

    /// Builds an axis from Cartesian components, renormalizing small drift.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        Self::from_vector(Vector3::new(x, y, z))
    }

    pub fn from_vector(v: Vector3<f64>) -> Result<Self> {
        if !v.iter().all(|c| c.is_finite()) {
            return Err(Error::NonFinite("axis component"));
        }
        let norm = v.norm();
        if (norm - 1.0).abs() >= RENORMALIZE_LIMIT {
            return Err(Error::NotUnit { norm });
        }
        Ok(UnitAxis(v / norm))
    }

    /// Normalizes an arbitrary non-zero finite vector.
    pub fn normalize(v: Vector3<f64>) -> Result<Self> {
        if !v.iter().all(|c| c.is_finite()) {
            return Err(Error::NonFinite("axis component"));
        }
        let norm = v.norm();
        if norm == 0.0 {
            return Err(Error::NotUnit { norm });
        }
        Ok(UnitAxis(v / norm))
    }

    pub fn x(&self) -> f64 {
        self.0.x
    }

    pub fn y(&self) -> f64 {
        self.0.y
    }

    pub fn z(&self) -> f64 {
        self.0.z
    }

    pub fn to_array(&self) -> [f64; 3] {
        [self.0.x, self.0.y, self.0.z]
    }

    pub fn as_vector(&self) -> &Vector3<f64> {
        &self.0
    }

    pub fn dot(&self, other: &UnitAxis) -> f64 {
        self.0.dot(&other.0)
    }

    pub fn neg(&self) -> UnitAxis {
        UnitAxis(-self.0)
    }

    /// Applies an orthogonal matrix. The result is renormalized.
    pub fn rotate(&self, rotation: &Matrix3<f64>) -> Result<UnitAxis> {
        UnitAxis::from_vector(rotation * self.0)
    }

    /// Polar angle from +z and azimuth from +x, both in radians.
    pub fn spherical(&self) -> (f64, f64) {
        let rho = self.0.x.hypot(self.0.y);
        (rho.atan2(self.0.z), self.0.y.atan2(self.0.x))
    }
}

impl fmt::Debug for UnitAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UnitAxis({}, {}, {})", self.0.x, self.0.y, self.0.z)
    }
}

/// `(sinθ cosφ, sinθ sinφ, cosθ)`.
pub fn make_axis(theta: f64, phi: f64) -> Result<UnitAxis> {
    if !theta.is_finite() || !phi.is_finite() {
        return Err(Error::NonFinite("angle"));
    }
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    UnitAxis::from_vector(Vector3::new(st * cp, st * sp, ct))
}

/// Angle in `[0, π]` between two axes, via `atan2(|a×b|, a·b)`.
pub fn angle_between(a: &UnitAxis, b: &UnitAxis) -> f64 {
    a.0.cross(&b.0).norm().atan2(a.0.dot(&b.0))
}

/// A right-handed orthonormal triad.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub e1: UnitAxis,
    pub e2: UnitAxis,
    pub e3: UnitAxis,
}

impl Frame {
    pub const CANONICAL: Frame = Frame {
        e1: UnitAxis::X,
        e2: UnitAxis::Y,
        e3: UnitAxis::Z,
    };

    /// Validates orthonormality and handedness of three axes.
    pub fn new(e1: UnitAxis, e2: UnitAxis, e3: UnitAxis) -> Result<Self> {
        let frame = Frame { e1, e2, e3 };
        frame.check()?;
        Ok(frame)
    }

    /// Frame whose axes are the columns of `rotation`.
    pub fn from_rotation(rotation: &Matrix3<f64>) -> Result<Self> {
        Frame::new(
            UnitAxis::from_vector(rotation.column(0).into())?,
            UnitAxis::from_vector(rotation.column(1).into())?,
            UnitAxis::from_vector(rotation.column(2).into())?,
        )
    }

    pub fn axes(&self) -> [UnitAxis; 3] {
        [self.e1, self.e2, self.e3]
    }

    /// Matrix with the frame axes as columns.
    pub fn matrix(&self) -> Matrix3<f64> {
        Matrix3::from_columns(&[self.e1.0, self.e2.0, self.e3.0])
    }

    fn check(&self) -> Result<()> {
        let tol = UNIT_TOLERANCE;
        let [a, b, c] = self.axes();
        if a.dot(&b).abs() > tol || a.dot(&c).abs() > tol || b.dot(&c).abs() > tol {
            return Err(Error::Domain("frame axes are not orthogonal".into()));
        }
        if (a.0.cross(&b.0) - c.0).amax() > tol {
            return Err(Error::Domain("frame is not right-handed".into()));
        }
        Ok(())
    }
}

/// Deterministic right-handed frame with the given third axis.
///
/// Gram-Schmidt is seeded with the coordinate axis least aligned with `e3`;
/// ties go to the lowest index, so `ẑ` yields the canonical frame.
pub fn complete_frame(e3: &UnitAxis) -> Frame {
    let v = e3.0;
    let mut seed_index = 0;
    for i in 1..3 {
        if v[i].abs() < v[seed_index].abs() {
            seed_index = i;
        }
    }
    let mut seed = Vector3::zeros();
    seed[seed_index] = 1.0;
    let e1 = (seed - v * v.dot(&seed)).normalize();
    let e2 = v.cross(&e1).normalize();
    // re-orthogonalize to keep the handedness residual at rounding level
    let e1 = e2.cross(&v).normalize();
    Frame {
        e1: UnitAxis(e1),
        e2: UnitAxis(e2),
        e3: *e3,
    }
}

/// Uniformly distributed axis.
pub fn random_axis<R: rand::Rng + ?Sized>(rng: &mut R) -> UnitAxis {
    use rand_distr::Distribution;
    let [x, y, z]: [f64; 3] = rand_distr::UnitSphere.sample(rng);
    UnitAxis::normalize(Vector3::new(x, y, z)).expect("sphere sample is finite and non-zero")
}

/// Uniformly distributed proper rotation, as a matrix.
pub fn random_rotation<R: rand::Rng + ?Sized>(rng: &mut R) -> Matrix3<f64> {
    let axis = random_axis(rng);
    let angle = rng.random_range(0.0..std::f64::consts::TAU);
    rotation_about(&axis, angle)
}

/// Rotation by `angle` about `axis` (right-hand rule).
pub fn rotation_about(axis: &UnitAxis, angle: f64) -> Matrix3<f64> {
    nalgebra::Rotation3::from_axis_angle(&nalgebra::Unit::new_unchecked(axis.0), angle).into_inner()
}

impl Serialize for UnitAxis {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_array().serialize(serializer)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum AxisRepr {
    Cartesian([f64; 3]),
    Spherical { theta: f64, phi: f64 },
}

impl<'de> Deserialize<'de> for UnitAxis {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let axis = match AxisRepr::deserialize(deserializer)? {
            AxisRepr::Cartesian([x, y, z]) => UnitAxis::new(x, y, z),
            AxisRepr::Spherical { theta, phi } => make_axis(theta, phi),
        };
        axis.map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn assert_axis(a: UnitAxis, expected: [f64; 3]) {
        for (got, want) in a.to_array().iter().zip(expected) {
            assert!((got - want).abs() < 1e-15, "{a:?} vs {expected:?}");
        }
    }

    #[test]
    fn make_axis_poles_and_equator() {
        assert_axis(make_axis(0.0, 0.0).unwrap(), [0.0, 0.0, 1.0]);
        assert_axis(make_axis(FRAC_PI_2, 0.0).unwrap(), [1.0, 0.0, 0.0]);
        assert_axis(make_axis(FRAC_PI_2, FRAC_PI_2).unwrap(), [0.0, 1.0, 0.0]);
    }

    #[test]
    fn make_axis_rejects_non_finite() {
        assert_eq!(make_axis(f64::NAN, 0.0), Err(Error::NonFinite("angle")));
        assert!(make_axis(0.0, f64::INFINITY).is_err());
    }

    #[test]
    fn constructor_renormalizes_drift_and_rejects_bad_norms() {
        let a = UnitAxis::new(1.0 + 1e-9, 0.0, 0.0).unwrap();
        assert_eq!(a.x(), 1.0);
        assert!(matches!(
            UnitAxis::new(1.1, 0.0, 0.0),
            Err(Error::NotUnit { .. })
        ));
        assert!(UnitAxis::new(0.0, 0.0, 0.0).is_err());
        assert!(UnitAxis::new(f64::NAN, 0.0, 1.0).is_err());
    }

    #[test]
    fn angle_between_special_cases() {
        let z = UnitAxis::Z;
        assert_eq!(angle_between(&z, &z), 0.0);
        assert!((angle_between(&z, &UnitAxis::X) - FRAC_PI_2).abs() < 1e-15);
        assert!((angle_between(&z, &z.neg()) - PI).abs() < 1e-15);
    }

    #[test]
    fn complete_frame_canonical_and_degenerate_inputs() {
        let f = complete_frame(&UnitAxis::Z);
        assert_eq!(f, Frame::CANONICAL);
        for e3 in [UnitAxis::X, UnitAxis::Z.neg(), UnitAxis::Y.neg()] {
            let f = complete_frame(&e3);
            assert!(Frame::new(f.e1, f.e2, f.e3).is_ok(), "{f:?}");
            assert_eq!(f.e3, e3);
        }
    }

    #[test]
    fn json_forms() {
        let a: UnitAxis = serde_json::from_str("[0, 0, 1]").unwrap();
        assert_eq!(a, UnitAxis::Z);
        let b: UnitAxis =
            serde_json::from_str(r#"{"theta": 1.5707963267948966, "phi": 0}"#).unwrap();
        assert!((b.x() - 1.0).abs() < 1e-15);
        assert_eq!(
            serde_json::to_string(&UnitAxis::X).unwrap(),
            "[1.0,0.0,0.0]"
        );
        assert!(serde_json::from_str::<UnitAxis>("[2, 0, 0]").is_err());
    }
}
