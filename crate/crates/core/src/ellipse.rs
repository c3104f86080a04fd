//! Geometry of the received polarization ellipse.
//!
//! The superposed field is `a_x E1 cos(t) + a_y E2 cos(t + delta)` with
//! `XPD = (E1 / E2)^2`, where `a_x` is the -45 degree axis and `a_y` the +45
//! degree axis. The rotation angle is measured from `a_x`; it lies in
//! (-90, 90] and reaches 45 degrees at `XPD = 1`.

use crate::error::{Error, Result};
use crate::polmath::{rx_projection, AngleDeg, Ratio};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipseQuery {
    /// Instantaneous XPD `(E1 / E2)^2`.
    pub xpd: Ratio,
    /// Phase difference between the two received components.
    pub delta: AngleDeg,
    /// Receive antenna angle, needed only for [`received_power`].
    pub rx_angle: Option<AngleDeg>,
}

impl EllipseQuery {
    pub fn new(xpd: Ratio, delta: AngleDeg) -> Self {
        EllipseQuery {
            xpd,
            delta,
            rx_angle: None,
        }
    }

    pub fn with_rx_angle(mut self, rx_angle: AngleDeg) -> Self {
        self.rx_angle = Some(rx_angle);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipseParams {
    pub theta: AngleDeg,
    pub ecc_sq: f64,
}

fn positive_xpd(xpd: Ratio) -> Result<()> {
    match xpd {
        Ratio::Finite(v) if v > 0.0 => Ok(()),
        Ratio::Infinite => Ok(()),
        _ => Err(Error::Domain(format!("XPD must be positive, got {xpd}"))),
    }
}

/// `theta = 1/2 atan2(2 cos(delta), sqrt(XPD) - 1/sqrt(XPD))` in degrees.
///
/// The two-argument arctangent makes `XPD = 1` land on +-45 degrees (sign of
/// `cos(delta)`) instead of dividing by zero.
pub fn rotation_angle(xpd: Ratio, delta: AngleDeg) -> Result<AngleDeg> {
    positive_xpd(xpd)?;
    let cos_d = delta.radians().cos();
    let den = match xpd {
        Ratio::Finite(x) => {
            let s = x.sqrt();
            s - 1.0 / s
        }
        Ratio::Infinite => f64::INFINITY,
    };
    let two_theta = (2.0 * cos_d).atan2(den).to_degrees();
    Ok(AngleDeg(0.5 * two_theta))
}

fn clamp_unit(v: f64) -> Result<f64> {
    if v.is_nan() || !(-1e-9..=1.0 + 1e-9).contains(&v) {
        return Err(Error::Domain(format!(
            "squared eccentricity {v} outside [0, 1]: inconsistent (XPD, theta) pair"
        )));
    }
    Ok(v.clamp(0.0, 1.0))
}

/// Squared eccentricity from XPD and rotation angle,
/// `2 (XPD - 1) sec(2 theta) / (1 - sec(2 theta) + XPD (1 + sec(2 theta)))`.
///
/// Evaluated as `2 (XPD - 1) / ((XPD + 1) cos(2 theta) + XPD - 1)`, which is
/// the same expression multiplied through by `cos(2 theta)`. At `XPD = 1`
/// with `theta = +-45` the value depends on `delta` alone; use
/// [`ellipse_params`] there.
pub fn ecc_sq_from_xpd(xpd: Ratio, theta: AngleDeg) -> Result<f64> {
    positive_xpd(xpd)?;
    let cos2 = (2.0 * theta.radians()).cos();
    let value = match xpd {
        Ratio::Infinite => 2.0 / (cos2 + 1.0),
        Ratio::Finite(x) => {
            let num = 2.0 * (x - 1.0);
            let den = (x + 1.0) * cos2 + (x - 1.0);
            if num == 0.0 && den.abs() < 1e-12 {
                return Err(Error::Domain(
                    "XPD = 1 at theta = 45 degrees is indeterminate without the phase difference"
                        .into(),
                ));
            }
            num / den
        }
    };
    clamp_unit(value)
}

/// Squared eccentricity from rotation angle and phase difference,
/// `2 |cos(delta) sec(2 theta)| / (sqrt(cos^2(delta) + tan^2(2 theta)) + |cos(delta) sec(2 theta)|)`.
///
/// The magnitude keeps the relation valid on both branches of the rotation
/// angle (XPD above and below one). `cos(delta) = 0` loses the XPD
/// information entirely and is a domain error; use [`ecc_sq_from_xpd`].
pub fn ecc_sq_from_theta(theta: AngleDeg, delta: AngleDeg) -> Result<f64> {
    let c = delta.radians().cos().abs();
    if c < 1e-12 {
        return Err(Error::Domain(
            "cos(delta) = 0: eccentricity is not determined by theta; use ecc_sq_from_xpd".into(),
        ));
    }
    // multiplied through by |cos(2 theta)|: tan^2 cos^2 = sin^2
    let (sin2, cos2) = (2.0 * theta.radians()).sin_cos();
    let root = (c * c * cos2 * cos2 + sin2 * sin2).sqrt();
    clamp_unit(2.0 * c / (root + c))
}

/// Rotation angle and squared eccentricity for a query, including the
/// `XPD = 1` point where the eccentricity is `2|cos d| / (1 + |cos d|)`.
pub fn ellipse_params(q: &EllipseQuery) -> Result<EllipseParams> {
    let theta = rotation_angle(q.xpd, q.delta)?;
    let ecc_sq = if q.xpd == Ratio::ONE {
        let c = q.delta.radians().cos().abs();
        2.0 * c / (1.0 + c)
    } else {
        ecc_sq_from_xpd(q.xpd, theta)?
    };
    Ok(EllipseParams { theta, ecc_sq })
}

/// Normalized power picked up by a linear antenna at `q.rx_angle`, for a
/// fixed total received power split as `E1^2 = XPD / (1 + XPD)`,
/// `E2^2 = 1 / (1 + XPD)`.
///
/// Projecting the field onto the antenna gives a sinusoid with squared
/// amplitude
/// `p_x^2 E1^2 + p_y^2 E2^2 + 2 p_x p_y E1 E2 cos(delta)`,
/// where `(p_x, p_y)` comes from [`rx_projection`]. The result is 1 when the
/// field is linear and aligned with the antenna.
pub fn received_power(q: &EllipseQuery) -> Result<f64> {
    positive_xpd(q.xpd)?;
    let rx = q
        .rx_angle
        .ok_or_else(|| Error::Domain("received_power needs an Rx antenna angle".into()))?;
    let (px, py) = rx_projection(rx);
    let p = match q.xpd {
        Ratio::Infinite => px * px,
        Ratio::Finite(x) => {
            let cos_d = q.delta.radians().cos();
            (px * px * x + py * py + 2.0 * px * py * cos_d * x.sqrt()) / (1.0 + x)
        }
    };
    Ok(p.clamp(0.0, 1.0))
}
