//! Planar ellipse geometry for the robot shell.
//!
//! The shell is an ellipse centred at `(x_r, 0)` with its major semi-axis
//! along the channel (`x`) and minor semi-axis across it (`y`). Points on the
//! boundary are addressed by the parametric angle `phi`:
//! `(r_x cos phi + x_r, r_y sin phi)`.

use core::f64::consts::PI;
use core::ops::{Add, Mul, Neg, Sub};

use libm::{cos, hypot, sin, sqrt};

use crate::error::ModelError;

/// Grid resolution used by [`contact_angle`] to bracket intersections.
pub const DEFAULT_ROOT_GRID: usize = 720;

/// A point or vector in the channel plane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

pub type Point2 = Vec2;

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the planar cross product.
    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        hypot(self.x, self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn mirror_y(self) -> Vec2 {
        Vec2::new(self.x, -self.y)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, rhs: f64) -> Vec2 {
        Vec2::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Rigid elliptical shell and its position along the channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipseBody {
    r_x: f64,
    r_y: f64,
    x_r: f64,
    mass: f64,
}

impl EllipseBody {
    /// Half of the 18 cm overall robot length.
    pub const DEFAULT_R_X: f64 = 0.09;
    /// Half of the 10 cm contact width implied by the width/deflection table.
    pub const DEFAULT_R_Y: f64 = 0.05;
    pub const DEFAULT_MASS: f64 = 0.087;

    pub fn new(r_x: f64, r_y: f64, x_r: f64, mass: f64) -> Result<Self, ModelError> {
        let positive = |name: &'static str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(ModelError::InvalidParameter { name, value: v })
            }
        };
        positive("r_x", r_x)?;
        positive("r_y", r_y)?;
        positive("mass", mass)?;
        if !x_r.is_finite() {
            return Err(ModelError::InvalidParameter { name: "x_r", value: x_r });
        }
        if r_x < r_y {
            return Err(ModelError::AxisOrder { r_x, r_y });
        }
        Ok(Self { r_x, r_y, x_r, mass })
    }

    pub fn r_x(&self) -> f64 {
        self.r_x
    }

    pub fn r_y(&self) -> f64 {
        self.r_y
    }

    pub fn x_r(&self) -> f64 {
        self.x_r
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Same shell moved to a new centre position.
    pub fn at(&self, x_r: f64) -> Self {
        Self { x_r, ..*self }
    }

    /// Implicit form `((x - x_r)/r_x)^2 + (y/r_y)^2`; `< 1` inside.
    pub fn implicit(&self, p: Point2) -> f64 {
        let u = (p.x - self.x_r) / self.r_x;
        let v = p.y / self.r_y;
        u * u + v * v
    }
}

impl Default for EllipseBody {
    fn default() -> Self {
        Self {
            r_x: Self::DEFAULT_R_X,
            r_y: Self::DEFAULT_R_Y,
            x_r: 0.0,
            mass: Self::DEFAULT_MASS,
        }
    }
}

/// Boundary point at parametric angle `phi`.
pub fn ellipse_point(phi: f64, body: &EllipseBody) -> Result<Point2, ModelError> {
    if !phi.is_finite() {
        return Err(ModelError::NonFinite("phi"));
    }
    Ok(point_unchecked(phi, body))
}

#[inline]
fn point_unchecked(phi: f64, body: &EllipseBody) -> Point2 {
    Vec2::new(body.r_x * cos(phi) + body.x_r, body.r_y * sin(phi))
}

/// Inward unit normal and backward-pointing unit tangent at `phi`.
///
/// Both vectors share the normaliser `sqrt(r_y^2 cos^2 + r_x^2 sin^2)`,
/// which is the length of the un-normalised numerators.
pub fn surface_frame(phi: f64, body: &EllipseBody) -> (Vec2, Vec2) {
    frame_from_trig(cos(phi), sin(phi), body)
}

#[inline]
fn frame_from_trig(c: f64, s: f64, body: &EllipseBody) -> (Vec2, Vec2) {
    let a = body.r_y * c;
    let b = body.r_x * s;
    let norm = sqrt(a * a + b * b);
    let normal = Vec2::new(-a / norm, -b / norm);
    let tangent = Vec2::new(-b / norm, a / norm);
    (normal, tangent)
}

/// Strict interior test; boundary points are outside.
pub fn contains(p: Point2, body: &EllipseBody) -> bool {
    body.implicit(p) < 1.0
}

/// Which wall a beam hangs from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Base above the shell (`y > 0`), tip hanging toward `-y`.
    Top,
    /// Mirror image below the shell.
    Bottom,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Top => 1.0,
            Side::Bottom => -1.0,
        }
    }
}

/// Direction the shell travels along the channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Heading {
    #[default]
    Forward,
    Backward,
}

impl Heading {
    pub fn sign(self) -> f64 {
        match self {
            Heading::Forward => 1.0,
            Heading::Backward => -1.0,
        }
    }
}

/// Outcome of locating a beam tip on the shell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TipContact {
    /// Undeflected tip lies outside the shell.
    Free,
    /// Tip rests on the boundary at this parametric angle.
    Touching(f64),
    /// The beam cannot reach an admissible boundary point: its base is
    /// inside the shell or the fully swept tip is still inside.
    Saturated,
}

impl TipContact {
    pub fn angle(self) -> Option<f64> {
        match self {
            TipContact::Touching(phi) => Some(phi),
            _ => None,
        }
    }
}

/// Precomputed `(cos, sin)` table over `[0, pi]` shared by repeated
/// root searches.
#[derive(Debug, Clone)]
pub struct AngleGrid {
    phi: alloc::vec::Vec<f64>,
    trig: alloc::vec::Vec<(f64, f64)>,
}

impl AngleGrid {
    pub fn new(samples: usize) -> Self {
        let samples = samples.max(2);
        let last = (samples - 1) as f64;
        let phi: alloc::vec::Vec<f64> = (0..samples).map(|k| PI * (k as f64) / last).collect();
        let trig = phi.iter().map(|&p| (cos(p), sin(p))).collect();
        Self { phi, trig }
    }

    pub fn len(&self) -> usize {
        self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi.is_empty()
    }
}

impl Default for AngleGrid {
    fn default() -> Self {
        Self::new(DEFAULT_ROOT_GRID)
    }
}

/// Contact angle of a top-side beam for a shell moving forward.
///
/// `base` is the beam pivot, `length` the free beam length. Returns the
/// intersection of the circle of radius `length` about `base` with the
/// upper half of the ellipse that lies furthest forward.
pub fn contact_angle(base: Point2, length: f64, body: &EllipseBody) -> Result<TipContact, ModelError> {
    if !(length.is_finite() && length > 0.0) {
        return Err(ModelError::InvalidParameter { name: "length", value: length });
    }
    if !(base.is_finite() && base.y > 0.0) {
        return Err(ModelError::InvalidParameter { name: "base.y", value: base.y });
    }
    Ok(ContactSolver::new(AngleGrid::default()).solve(
        base,
        length,
        body,
        Side::Top,
        Heading::Forward,
        core::f64::consts::FRAC_PI_2,
    ))
}

/// Root finder for beam-tip / shell intersections.
///
/// Sign changes of `|p(phi) - base| - L` are bracketed on a uniform grid
/// and bisected to machine resolution. Grid-local minima that touch zero
/// are refined separately so tangential contacts are not lost.
#[derive(Debug, Clone, Default)]
pub struct ContactSolver {
    grid: AngleGrid,
}

const TANGENCY_TOL: f64 = 1e-12;

impl ContactSolver {
    pub fn new(grid: AngleGrid) -> Self {
        Self { grid }
    }

    pub fn grid(&self) -> &AngleGrid {
        &self.grid
    }

    /// Locate the contact of a beam hanging from `side`, for a shell moving
    /// along `heading`. The returned angle is the signed parametric angle
    /// (negative on the bottom side). `max_sweep` is the largest beam
    /// rotation admitted before the contact is reported as saturated.
    pub fn solve(
        &self,
        base: Point2,
        length: f64,
        body: &EllipseBody,
        side: Side,
        heading: Heading,
        max_sweep: f64,
    ) -> TipContact {
        let sy = side.sign();
        let hx = heading.sign();
        let tip = Vec2::new(base.x, base.y - sy * length);
        if body.implicit(tip) > 1.0 {
            return TipContact::Free;
        }
        let swept = Vec2::new(
            base.x + hx * length * sin(max_sweep),
            base.y - sy * length * cos(max_sweep),
        );
        if contains(base, body) || contains(swept, body) {
            return TipContact::Saturated;
        }

        // Work in the frame where the beam hangs from the top; the bottom
        // side is the same problem with y negated.
        let by = sy * base.y;
        let dist = |c: f64, s: f64| {
            hypot(body.r_x * c + body.x_r - base.x, body.r_y * s - by) - length
        };
        let eval = |phi: f64| dist(cos(phi), sin(phi));

        let mut best: Option<(f64, f64)> = None; // (hx * x, phi)
        let mut consider = |phi: f64| {
            let key = hx * (body.r_x * cos(phi) + body.x_r);
            match best {
                Some((k, _)) if k >= key => {}
                _ => best = Some((key, phi)),
            }
        };

        let n = self.grid.len();
        let values: alloc::vec::Vec<f64> = self.grid.trig.iter().map(|&(c, s)| dist(c, s)).collect();
        for k in 0..n {
            let fk = values[k];
            if fk == 0.0 {
                consider(self.grid.phi[k]);
                continue;
            }
            if k + 1 < n {
                let fn_ = values[k + 1];
                if fn_ != 0.0 && (fk < 0.0) != (fn_ < 0.0) {
                    consider(bisect(&eval, self.grid.phi[k], self.grid.phi[k + 1], fk));
                }
            }
            if k > 0 && k + 1 < n && fk > 0.0 && fk <= values[k - 1] && fk <= values[k + 1] {
                let (phi, fmin) = golden_min(&eval, self.grid.phi[k - 1], self.grid.phi[k + 1]);
                if fmin <= TANGENCY_TOL * length {
                    consider(phi);
                }
            }
        }

        match best {
            Some((_, phi)) => TipContact::Touching(sy * phi),
            None => TipContact::Saturated,
        }
    }
}

/// Bisection on a bracket `[lo, hi]` with `f(lo) = f_lo` of opposite sign
/// to `f(hi)`, run until the midpoint no longer moves.
fn bisect<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64, mut f_lo: f64) -> f64 {
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return mid;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
}

fn golden_min<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..80 {
        if b - a < 1e-14 {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}
