//! Angle and axis arguments.
//!
//! Angles always carry a unit: `45deg`, `0.25pi`, `1.2rad`. Axes are one of
//! `x y z -x -y -z`, a `theta,phi` pair of angles, a JSON array `[x,y,z]`
//! or a JSON object `{"theta": .., "phi": ..}` in radians.

use std::f64::consts::PI;

use bellmean::{make_axis, UnitAxis};

pub fn parse_angle(text: &str) -> Result<f64, String> {
    let text = text.trim();
    let (number, scale) =
        if let Some(n) = text.strip_suffix("deg").or_else(|| text.strip_suffix('°')) {
            (n, PI / 180.0)
        } else if let Some(n) = text.strip_suffix("rad") {
            (n, 1.0)
        } else if let Some(n) = text.strip_suffix("pi") {
            (n, PI)
        } else {
            return Err(format!(
                "angle `{text}` needs a unit suffix: deg, rad or pi"
            ));
        };
    let number = number.trim();
    // a lone `pi` means one half-turn
    let value: f64 = if number.is_empty() && scale == PI {
        1.0
    } else {
        number
            .parse()
            .map_err(|_| format!("cannot read `{number}` as a number"))?
    };
    let radians = value * scale;
    if radians.is_finite() {
        Ok(radians)
    } else {
        Err(format!("angle `{text}` is not finite"))
    }
}

pub fn parse_axis(text: &str) -> Result<UnitAxis, String> {
    let text = text.trim();
    match text {
        "x" | "+x" => return Ok(UnitAxis::X),
        "y" | "+y" => return Ok(UnitAxis::Y),
        "z" | "+z" => return Ok(UnitAxis::Z),
        "-x" => return Ok(UnitAxis::X.neg()),
        "-y" => return Ok(UnitAxis::Y.neg()),
        "-z" => return Ok(UnitAxis::Z.neg()),
        _ => {}
    }
    if text.starts_with('[') || text.starts_with('{') {
        return serde_json::from_str(text).map_err(|e| format!("malformed axis `{text}`: {e}"));
    }
    let (theta, phi) = text
        .split_once(',')
        .ok_or_else(|| format!("axis `{text}` is not x/y/z, theta,phi or JSON"))?;
    make_axis(parse_angle(theta)?, parse_angle(phi)?).map_err(|e| e.to_string())
}
