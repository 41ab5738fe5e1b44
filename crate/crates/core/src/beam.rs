//! Compliant beams modelled as rigid links on torsional springs.

use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use libm::asin;

use crate::error::ModelError;
use crate::geometry::{surface_frame, EllipseBody, Heading, Side, Vec2};

/// Material and geometry of one grass-like beam.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSpec {
    /// Flexural modulus [Pa].
    pub modulus: f64,
    /// Width [m].
    pub width: f64,
    /// Free length [m].
    pub length: f64,
    /// Thickness [m].
    pub thickness: f64,
    pub mu_k: f64,
    pub mu_s: f64,
    /// Largest admitted angular deflection [rad].
    pub max_deflection: f64,
}

impl BeamSpec {
    pub fn new(
        modulus: f64,
        width: f64,
        length: f64,
        thickness: f64,
        mu_k: f64,
        mu_s: f64,
    ) -> Result<Self, ModelError> {
        let spec = Self {
            modulus,
            width,
            length,
            thickness,
            mu_k,
            mu_s,
            max_deflection: FRAC_PI_2,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_max_deflection(mut self, max: f64) -> Result<Self, ModelError> {
        self.max_deflection = max;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        for (name, v) in [
            ("modulus", self.modulus),
            ("width", self.width),
            ("length", self.length),
            ("thickness", self.thickness),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(ModelError::InvalidParameter { name, value: v });
            }
        }
        for (name, v) in [("mu_k", self.mu_k), ("mu_s", self.mu_s)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(ModelError::InvalidParameter { name, value: v });
            }
        }
        if self.thickness >= self.length {
            return Err(ModelError::InvalidParameter { name: "thickness", value: self.thickness });
        }
        if self.mu_k > self.mu_s {
            return Err(ModelError::FrictionOrder { mu_k: self.mu_k, mu_s: self.mu_s });
        }
        if !(self.max_deflection > 0.0 && self.max_deflection <= FRAC_PI_2) {
            return Err(ModelError::InvalidParameter {
                name: "max_deflection",
                value: self.max_deflection,
            });
        }
        Ok(())
    }

    /// Same beam with sliding friction replaced (static friction raised if needed).
    pub fn with_mu_k(mut self, mu_k: f64) -> Self {
        self.mu_k = mu_k;
        if self.mu_s < mu_k {
            self.mu_s = mu_k;
        }
        self
    }

    /// Tip force per radian of deflection, `k_t / L` [N/rad].
    pub fn tip_rate(&self) -> f64 {
        torsional_stiffness(self) / self.length
    }
}

impl Default for BeamSpec {
    /// Sheet fiberglass flap, 3 cm x 2.7 cm x 0.012 cm.
    fn default() -> Self {
        Self {
            modulus: 5.3e9,
            width: 0.03,
            length: 0.027,
            thickness: 1.2e-4,
            mu_k: 0.53,
            mu_s: 0.7,
            max_deflection: FRAC_PI_2,
        }
    }
}

/// Contact state of one beam against the shell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactResult {
    /// 1-based beam index along the channel.
    pub beam_index: usize,
    /// Parametric contact angle on the shell.
    pub phi: f64,
    /// Horizontal contact location [m].
    pub x_i: f64,
    pub delta_theta: f64,
    /// Force on the shell [N].
    pub force: Vec2,
    pub saturated: bool,
}

/// `k_t = E I / L` with `I = w t^3 / 12`.
pub fn torsional_stiffness(spec: &BeamSpec) -> f64 {
    let area_moment = spec.width * spec.thickness * spec.thickness * spec.thickness / 12.0;
    spec.modulus * area_moment / spec.length
}

/// Clamped angular deflection of a beam.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Deflection {
    pub angle: f64,
    pub saturated: bool,
}

/// `asin((x_i - l_i) / L)` clamped at pi/2.
pub fn angular_deflection(x_i: f64, l_i: f64, length: f64) -> Result<Deflection, ModelError> {
    clamped_deflection(x_i - l_i, length, FRAC_PI_2)
        .map_err(|_| ModelError::TrailingContact { x_i, l_i })
}

/// Deflection for a tip displaced `offset` along the direction of travel.
///
/// Offsets within `1e-12 L` behind the base are rounding noise and map to
/// zero; anything further back is an inconsistent contact.
pub fn clamped_deflection(offset: f64, length: f64, max: f64) -> Result<Deflection, ModelError> {
    if offset < -1e-12 * length {
        return Err(ModelError::TrailingContact { x_i: offset, l_i: 0.0 });
    }
    let ratio = (offset / length).max(0.0);
    if ratio >= 1.0 {
        return Ok(Deflection { angle: max, saturated: true });
    }
    let angle = asin(ratio);
    if angle >= max {
        Ok(Deflection { angle: max, saturated: true })
    } else {
        Ok(Deflection { angle, saturated: false })
    }
}

/// Force on a shell moving forward from a top-side beam, directed along the
/// edge of the sliding friction cone around the inward normal.
pub fn beam_force(delta_theta: f64, phi: f64, spec: &BeamSpec, body: &EllipseBody) -> Vec2 {
    contact_force(delta_theta, phi, spec, body, Side::Top, Heading::Forward)
}

/// General form of [`beam_force`]: the friction tangent is oriented against
/// the shell's direction of travel.
pub fn contact_force(
    delta_theta: f64,
    phi: f64,
    spec: &BeamSpec,
    body: &EllipseBody,
    side: Side,
    heading: Heading,
) -> Vec2 {
    let (normal, tangent) = surface_frame(phi, body);
    let tangent = if side.sign() * heading.sign() < 0.0 { -tangent } else { tangent };
    (normal + tangent * spec.mu_k) * (spec.tip_rate() * delta_theta)
}

/// Beam pivots `l_i = (l_channel / n)(i - 1)`.
pub fn beam_base_positions(n: usize, l_channel: f64) -> Vec<f64> {
    let spacing = l_channel / n as f64;
    (0..n).map(|i| spacing * i as f64).collect()
}
