//! Scalar polarization helpers: dB conversion, the Rx-antenna angle to XPD
//! mapping and the uniform linear array factor.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};

/// Non-negative linear power ratio (XPD, XPR and friends).
///
/// `Infinite` is an explicit sentinel for pure copolarization, e.g. a receive
/// antenna at exactly -45 degrees or a cross branch carrying no energy. It is
/// only ever constructed on purpose; [`Ratio::new`] rejects non-finite input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ratio {
    Finite(f64),
    Infinite,
}

impl Ratio {
    pub const ZERO: Ratio = Ratio::Finite(0.0);
    pub const ONE: Ratio = Ratio::Finite(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value >= 0.0 {
            Ok(Ratio::Finite(value))
        } else {
            Err(Error::Domain(format!(
                "ratio must be finite and non-negative, got {value}"
            )))
        }
    }

    /// `num / den` for non-negative powers. A zero denominator yields the
    /// `Infinite` sentinel.
    pub fn from_powers(num: f64, den: f64) -> Self {
        debug_assert!(num >= 0.0 && den >= 0.0);
        if den == 0.0 {
            Ratio::Infinite
        } else {
            Ratio::Finite(num / den)
        }
    }

    pub fn from_db(db: f64) -> Result<Self> {
        Ratio::new(db_to_linear(db)?)
    }

    /// Linear value; the sentinel maps to `f64::INFINITY`.
    pub fn value(self) -> f64 {
        match self {
            Ratio::Finite(v) => v,
            Ratio::Infinite => f64::INFINITY,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Ratio::Infinite)
    }

    pub fn is_positive_finite(self) -> bool {
        matches!(self, Ratio::Finite(v) if v > 0.0)
    }

    pub fn to_db(self) -> Result<f64> {
        match self {
            Ratio::Finite(v) => linear_to_db(v),
            Ratio::Infinite => Err(Error::Domain(
                "cannot express the infinite ratio sentinel in dB".into(),
            )),
        }
    }

    /// Natural log, with `0 -> -inf` and the sentinel mapped to `+inf`.
    pub fn ln(self) -> f64 {
        self.value().ln()
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ratio::Finite(v) => write!(f, "{v}"),
            Ratio::Infinite => f.write_str("inf"),
        }
    }
}

/// Distance between two ratios in the log domain, `|ln a - ln b|`.
///
/// Two equal sentinels (or two zeros) are at distance zero; any other pairing
/// with a zero or infinite operand is infinitely far.
pub fn log_distance(a: Ratio, b: Ratio) -> f64 {
    let (la, lb) = (a.ln(), b.ln());
    if la == lb {
        0.0
    } else {
        (la - lb).abs()
    }
}

/// Angle in degrees.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct AngleDeg(pub f64);

impl AngleDeg {
    pub fn degrees(self) -> f64 {
        self.0
    }

    pub fn radians(self) -> f64 {
        self.0.to_radians()
    }

    /// Receive-antenna angles are only defined modulo 180 degrees; this maps
    /// onto the canonical range (-90, 90].
    pub fn canonical_rx(self) -> AngleDeg {
        let r = self.0.rem_euclid(180.0);
        AngleDeg(if r > 90.0 { r - 180.0 } else { r })
    }

    /// Phase differences live in (-180, 180].
    pub fn canonical_phase(self) -> AngleDeg {
        let r = self.0.rem_euclid(360.0);
        AngleDeg(if r > 180.0 { r - 360.0 } else { r })
    }
}

impl From<f64> for AngleDeg {
    fn from(deg: f64) -> Self {
        AngleDeg(deg)
    }
}

impl fmt::Display for AngleDeg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}°", self.0)
    }
}

pub fn db_to_linear(db: f64) -> Result<f64> {
    if !db.is_finite() {
        return Err(Error::Domain(format!("dB value must be finite, got {db}")));
    }
    Ok(10f64.powf(db / 10.0))
}

pub fn linear_to_db(value: f64) -> Result<f64> {
    if !(value > 0.0) || !value.is_finite() {
        return Err(Error::Domain(format!(
            "dB conversion needs a positive finite value, got {value}"
        )));
    }
    Ok(10.0 * value.log10())
}

/// Projection of a receive antenna at `rx_angle` onto the (-45, +45) degree
/// polarization axes, as `(p_x, p_y) = (sin(45 - phi), cos(45 - phi))`.
///
/// With this convention `p_x^2 / p_y^2` equals [`rx_antenna_xpd`].
pub fn rx_projection(rx_angle: AngleDeg) -> (f64, f64) {
    let offset = (45.0 - rx_angle.canonical_rx().0).to_radians();
    offset.sin_cos()
}

/// XPD seen by a single polarized receive antenna, `tan^2(45 - phi)`.
pub fn rx_antenna_xpd(rx_angle: AngleDeg) -> Ratio {
    let phi = rx_angle.canonical_rx().0;
    if phi == -45.0 {
        return Ratio::Infinite;
    }
    let t = (45.0 - phi).to_radians().tan();
    Ratio::Finite(t * t)
}

/// Uniform linear array geometry for [`array_factor`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayGeometry {
    pub n_elements: usize,
    pub element_spacing_over_wavelength: f64,
    /// Progressive phase shift between neighbouring elements, radians.
    pub progressive_phase: f64,
    /// Angle between the array line and the propagation direction, radians.
    pub propagation_angle: f64,
}

impl ArrayGeometry {
    pub fn validate(&self) -> Result<()> {
        if self.n_elements == 0 {
            return Err(Error::Config("array needs at least one element".into()));
        }
        if !(self.element_spacing_over_wavelength > 0.0) {
            return Err(Error::Config(format!(
                "element spacing must be positive, got {}",
                self.element_spacing_over_wavelength
            )));
        }
        Ok(())
    }

    /// Total inter-element phase `psi = 2 pi (d / lambda) cos(theta) + zeta`.
    pub fn psi(&self) -> f64 {
        2.0 * PI * self.element_spacing_over_wavelength * self.propagation_angle.cos()
            + self.progressive_phase
    }
}

pub fn array_factor(geometry: &ArrayGeometry) -> Result<f64> {
    geometry.validate()?;
    Ok(array_factor_at(geometry.n_elements, geometry.psi()))
}

/// `sin(N psi / 2) / sin(psi / 2)`, continuous through the grating lobes.
pub fn array_factor_at(n_elements: usize, psi: f64) -> f64 {
    let n = n_elements as f64;
    let half = 0.5 * psi;
    let den = half.sin();
    if den.abs() < 1e-12 {
        // psi = 2 pi m: the limit is N cos(N pi m) / cos(pi m) = N (-1)^(m (N - 1)).
        let m = (psi / (2.0 * PI)).round() as i64;
        let odd = (m.rem_euclid(2) == 1) && n_elements % 2 == 0;
        return if odd { -n } else { n };
    }
    (n * half).sin() / den
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn db_anchors() {
        assert_eq!(db_to_linear(0.0).unwrap(), 1.0);
        assert!(close(db_to_linear(5.48).unwrap(), 3.5318, 1e-4));
        assert!(close(db_to_linear(-4.15).unwrap(), 0.38459, 1e-5));
        assert!(linear_to_db(0.0).is_err());
        assert!(Ratio::Infinite.to_db().is_err());
        assert!(db_to_linear(f64::NAN).is_err());
    }

    #[test]
    fn rx_xpd_anchors() {
        assert!(close(rx_antenna_xpd(AngleDeg(45.0)).value(), 0.0, 1e-30));
        assert!(close(rx_antenna_xpd(AngleDeg(-22.5)).value(), 5.828, 1e-3));
        assert!(close(rx_antenna_xpd(AngleDeg(0.0)).value(), 1.0, 1e-12));
        assert_eq!(rx_antenna_xpd(AngleDeg(-45.0)), Ratio::Infinite);
        // 135 is the same antenna as -45
        assert_eq!(rx_antenna_xpd(AngleDeg(135.0)), Ratio::Infinite);
    }

    #[test]
    fn canonical_ranges() {
        assert_eq!(AngleDeg(90.0).canonical_rx().0, 90.0);
        assert_eq!(AngleDeg(-90.0).canonical_rx().0, 90.0);
        assert_eq!(AngleDeg(100.0).canonical_rx().0, -80.0);
        assert_eq!(AngleDeg(-180.0).canonical_phase().0, 180.0);
        assert_eq!(AngleDeg(270.0).canonical_phase().0, -90.0);
    }

    #[test]
    fn projection_matches_rx_xpd() {
        for phi in [-80.0, -30.0, 0.0, 10.0, 44.0, 70.0] {
            let (px, py) = rx_projection(AngleDeg(phi));
            let xpd = rx_antenna_xpd(AngleDeg(phi)).value();
            assert!(close(px * px / (py * py), xpd, 1e-9 * xpd.max(1.0)));
            assert!(close(px * px + py * py, 1.0, 1e-15));
        }
    }

    #[test]
    fn array_factor_anchors() {
        let g = |n, zeta| ArrayGeometry {
            n_elements: n,
            element_spacing_over_wavelength: 0.5,
            progressive_phase: zeta,
            propagation_angle: PI / 2.0,
        };
        assert!(close(array_factor(&g(1, 1.234)).unwrap(), 1.0, 1e-12));
        assert_eq!(array_factor(&g(8, 0.0)).unwrap(), 8.0);
        assert!(close(array_factor_at(2, PI), 0.0, 1e-15));
        assert!(close(array_factor_at(8, 1e-9), 8.0, 1e-9));
        // continuous through the first grating lobe for even N
        assert!(close(array_factor_at(4, 2.0 * PI), -4.0, 0.0));
        assert!(close(array_factor_at(4, 2.0 * PI + 1e-7), -4.0, 1e-6));
        assert!(array_factor(&ArrayGeometry { n_elements: 0, ..g(1, 0.0) }).is_err());
    }

    #[test]
    fn log_distance_edges() {
        assert_eq!(log_distance(Ratio::Infinite, Ratio::Infinite), 0.0);
        assert_eq!(log_distance(Ratio::ZERO, Ratio::ZERO), 0.0);
        assert_eq!(log_distance(Ratio::ONE, Ratio::Infinite), f64::INFINITY);
        assert!(close(
            log_distance(Ratio::Finite(std::f64::consts::E), Ratio::ONE),
            1.0,
            1e-15
        ));
    }
}
