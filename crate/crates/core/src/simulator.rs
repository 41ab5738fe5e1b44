//! Quasi-static sweep of the shell through a channel of compliant beams.
//!
//! Beams hang from two walls at `y = +-(b/2 + L)` so that undeflected tips
//! sit at `y = +-b/2`. By default only the top wall is solved and the result
//! doubled; [`Sides::Explicit`] solves both walls independently.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use libm::floor;

use crate::beam::{clamped_deflection, contact_force, BeamSpec, ContactResult, Deflection};
use crate::error::ModelError;
use crate::geometry::{contains, AngleGrid, ContactSolver, EllipseBody, Heading, Side, TipContact, Vec2};

/// Beam channel layout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSpec {
    /// Beams per wall.
    pub n: usize,
    pub l_channel: f64,
    /// Tip-to-tip gap; `None` runs the shell with no beams at all.
    pub width: Option<f64>,
    pub spacing_override: Option<f64>,
    /// Position of the first beam base.
    pub origin: f64,
    pub beam: BeamSpec,
}

impl Default for ChannelSpec {
    fn default() -> Self {
        Self {
            n: 11,
            l_channel: 0.28,
            width: Some(0.04),
            spacing_override: None,
            origin: 0.0,
            beam: BeamSpec::default(),
        }
    }
}

impl ChannelSpec {
    pub fn new(n: usize, l_channel: f64, width: Option<f64>, beam: BeamSpec) -> Result<Self, ModelError> {
        let spec = Self { n, l_channel, width, beam, ..Self::default() };
        spec.validate()?;
        Ok(spec)
    }

    pub fn free() -> Self {
        Self { width: None, ..Self::default() }
    }

    pub fn with_spacing(mut self, spacing: f64) -> Self {
        self.spacing_override = Some(spacing);
        self
    }

    pub fn with_origin(mut self, origin: f64) -> Self {
        self.origin = origin;
        self
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.n == 0 {
            return Err(ModelError::InvalidParameter { name: "n", value: 0.0 });
        }
        if !(self.l_channel.is_finite() && self.l_channel > 0.0) {
            return Err(ModelError::InvalidParameter { name: "l_channel", value: self.l_channel });
        }
        if let Some(b) = self.width {
            if !(b.is_finite() && b >= 0.0) {
                return Err(ModelError::InvalidParameter { name: "width", value: b });
            }
        }
        if let Some(s) = self.spacing_override {
            if !(s.is_finite() && s > 0.0) {
                return Err(ModelError::InvalidParameter { name: "spacing", value: s });
            }
        }
        if !self.origin.is_finite() {
            return Err(ModelError::NonFinite("origin"));
        }
        self.beam.validate()
    }

    pub fn spacing(&self) -> f64 {
        self.spacing_override.unwrap_or(self.l_channel / self.n as f64)
    }

    pub fn base_positions(&self) -> Vec<f64> {
        let s = self.spacing();
        (0..self.n).map(|i| self.origin + s * i as f64).collect()
    }

    /// Height of the wall carrying the top beam pivots.
    pub fn wall_y(&self) -> Option<f64> {
        self.width.map(|b| 0.5 * b + self.beam.length)
    }
}

/// How the two walls are resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sides {
    /// Solve the top wall and double the drag.
    #[default]
    Mirrored,
    /// Solve each wall on its own.
    Explicit,
}

/// Reusable contact evaluator for one channel and shell.
#[derive(Debug, Clone)]
pub struct ChannelModel {
    channel: ChannelSpec,
    body: EllipseBody,
    bases: Vec<f64>,
    solver: ContactSolver,
}

impl ChannelModel {
    pub fn new(channel: ChannelSpec, body: EllipseBody) -> Result<Self, ModelError> {
        channel.validate()?;
        Ok(Self {
            bases: ChannelSpec { origin: 0.0, ..channel }.base_positions(),
            channel,
            body,
            solver: ContactSolver::new(AngleGrid::default()),
        })
    }

    pub fn channel(&self) -> &ChannelSpec {
        &self.channel
    }

    pub fn body(&self) -> &EllipseBody {
        &self.body
    }

    /// Contacting beams on one wall with the shell centred at `x_r`.
    pub fn contacts(&self, x_r: f64, side: Side, heading: Heading) -> Vec<ContactResult> {
        let mut out = self.contacts_local(x_r - self.channel.origin, side, heading);
        out.iter_mut().for_each(|c| c.x_i += self.channel.origin);
        out
    }

    // Geometry is solved relative to the first beam so that moving the
    // channel does not perturb the arithmetic.
    fn contacts_local(&self, x_r: f64, side: Side, heading: Heading) -> Vec<ContactResult> {
        let Some(wall) = self.channel.wall_y() else {
            return Vec::new();
        };
        let body = self.body.at(x_r);
        let beam = &self.channel.beam;
        let hx = heading.sign();
        let mut out = Vec::new();
        for (i, &l_i) in self.bases.iter().enumerate() {
            let base = Vec2::new(l_i, side.sign() * wall);
            // A tip resting on the boundary carries no load.
            if !contains(Vec2::new(l_i, side.sign() * (wall - beam.length)), &body) {
                continue;
            }
            let hit = self.solver.solve(base, beam.length, &body, side, heading, beam.max_deflection);
            let (phi, x_i, deflection) = match hit {
                TipContact::Free => continue,
                TipContact::Touching(phi) => {
                    let x_i = body.r_x() * libm::cos(phi) + x_r;
                    // The furthest root along the heading never trails the
                    // forward-swept arc crossing, so this cannot fail.
                    let d = clamped_deflection(hx * (x_i - l_i), beam.length, beam.max_deflection)
                        .unwrap_or(Deflection { angle: 0.0, saturated: false });
                    (phi, x_i, d)
                }
                TipContact::Saturated => {
                    let x_i = l_i + hx * beam.length * libm::sin(beam.max_deflection);
                    let c = ((x_i - x_r) / body.r_x()).clamp(-1.0, 1.0);
                    let phi = side.sign() * libm::acos(c);
                    (phi, x_i, Deflection { angle: beam.max_deflection, saturated: true })
                }
            };
            out.push(ContactResult {
                beam_index: i + 1,
                phi,
                x_i,
                delta_theta: deflection.angle,
                force: contact_force(deflection.angle, phi, beam, &body, side, heading),
                saturated: deflection.saturated,
            });
        }
        out
    }

    /// One sweep sample at `x_r`.
    pub fn sample(&self, x_r: f64, t: f64, heading: Heading, sides: Sides) -> ForceSample {
        let mut s = self.sample_local(x_r - self.channel.origin, t, heading, sides);
        s.x_r = x_r;
        s.contacts.iter_mut().for_each(|c| c.x_i += self.channel.origin);
        s
    }

    fn sample_local(&self, x_r: f64, t: f64, heading: Heading, sides: Sides) -> ForceSample {
        let hx = heading.sign();
        match sides {
            Sides::Mirrored => {
                let contacts = self.contacts_local(x_r, Side::Top, heading);
                let f_drag = hx * net_drag(&contacts);
                ForceSample { x_r, t, f_drag, f_lateral: 0.0, contact_count: contacts.len(), contacts }
            }
            Sides::Explicit => {
                let mut contacts = self.contacts_local(x_r, Side::Top, heading);
                contacts.extend(self.contacts_local(x_r, Side::Bottom, heading));
                let fx: f64 = contacts.iter().map(|c| c.force.x).sum();
                let fy: f64 = contacts.iter().map(|c| c.force.y).sum();
                ForceSample {
                    x_r,
                    t,
                    f_drag: -hx * fx,
                    f_lateral: fy,
                    contact_count: contacts.len(),
                    contacts,
                }
            }
        }
    }

    /// Sweep range `[origin - r_x - L, origin + l_channel + r_x + L]`.
    pub fn sweep_range(&self) -> (f64, f64) {
        let (lo, hi) = self.local_sweep_range();
        (self.channel.origin + lo, self.channel.origin + hi)
    }

    fn local_sweep_range(&self) -> (f64, f64) {
        let margin = self.body.r_x() + self.channel.beam.length;
        (-margin, self.channel.l_channel + margin)
    }

    /// Centre positions for which the whole shell lies between the first
    /// and last beam pivot.
    pub fn plateau_range(&self) -> Option<(f64, f64)> {
        let first = *self.bases.first()?;
        let last = *self.bases.last()?;
        let lo = first + self.body.r_x();
        let hi = last - self.body.r_x();
        (lo <= hi).then_some((lo + self.channel.origin, hi + self.channel.origin))
    }
}

/// Top-wall contact set for a shell moving forward.
pub fn contact_set(x_r: f64, channel: &ChannelSpec, body: &EllipseBody) -> Result<Vec<ContactResult>, ModelError> {
    Ok(ChannelModel::new(*channel, *body)?.contacts(x_r, Side::Top, Heading::Forward))
}

/// Drag from one wall's contacts, doubled for the mirror wall and reported
/// positive when it resists forward motion.
pub fn net_drag(contacts: &[ContactResult]) -> f64 {
    -2.0 * contacts.iter().map(|c| c.force.x).sum::<f64>()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForceSample {
    pub x_r: f64,
    pub t: f64,
    /// Resistance along the direction of travel [N].
    pub f_drag: f64,
    /// Net lateral force; zero by construction for [`Sides::Mirrored`].
    pub f_lateral: f64,
    pub contact_count: usize,
    pub contacts: Vec<ContactResult>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    pub dx: f64,
    pub v: f64,
    pub heading: Heading,
    pub sides: Sides,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self { dx: 1e-3, v: 0.05, heading: Heading::Forward, sides: Sides::Mirrored }
    }
}

/// Position-indexed simulation output.
#[derive(Debug, Clone, PartialEq)]
pub struct ForceTrace {
    pub samples: Vec<ForceSample>,
    pub dx: f64,
    pub v: f64,
    /// Centre positions with the shell fully among the beams.
    pub plateau: Option<(f64, f64)>,
}

/// Summary over the plateau of a trace.
#[derive(Debug, Clone, PartialEq)]
pub struct PlateauStats {
    pub mean_drag: f64,
    pub min_drag: f64,
    pub max_drag: f64,
    pub contact_counts: BTreeSet<usize>,
    pub samples: usize,
}

impl ForceTrace {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn plateau_samples(&self) -> impl Iterator<Item = &ForceSample> {
        let (lo, hi) = self.plateau.unwrap_or((f64::INFINITY, f64::NEG_INFINITY));
        self.samples.iter().filter(move |s| s.x_r >= lo && s.x_r <= hi)
    }

    pub fn plateau_stats(&self) -> Option<PlateauStats> {
        let mut sum = 0.0;
        let mut n = 0usize;
        let mut min_drag = f64::INFINITY;
        let mut max_drag = f64::NEG_INFINITY;
        let mut counts = BTreeSet::new();
        for s in self.plateau_samples() {
            sum += s.f_drag;
            n += 1;
            min_drag = min_drag.min(s.f_drag);
            max_drag = max_drag.max(s.f_drag);
            counts.insert(s.contact_count);
        }
        (n > 0).then(|| PlateauStats {
            mean_drag: sum / n as f64,
            min_drag,
            max_drag,
            contact_counts: counts,
            samples: n,
        })
    }

    pub fn max_contact_count(&self) -> usize {
        self.samples.iter().map(|s| s.contact_count).max().unwrap_or(0)
    }

    /// Mean drag over samples with centre in `[lo, hi]`.
    pub fn mean_drag_between(&self, lo: f64, hi: f64) -> Option<f64> {
        let (sum, n) = self
            .samples
            .iter()
            .filter(|s| s.x_r >= lo && s.x_r <= hi)
            .fold((0.0, 0usize), |(a, n), s| (a + s.f_drag, n + 1));
        (n > 0).then(|| sum / n as f64)
    }

    /// Work against drag over the whole sweep, trapezoidal in position.
    pub fn work(&self) -> f64 {
        self.samples
            .windows(2)
            .map(|w| 0.5 * (w[0].f_drag + w[1].f_drag) * (w[1].x_r - w[0].x_r).abs())
            .sum()
    }
}

/// Forward sweep with the top wall mirrored.
pub fn sweep(channel: &ChannelSpec, body: &EllipseBody, dx: f64, v: f64) -> Result<ForceTrace, ModelError> {
    sweep_with(channel, body, &SweepOptions { dx, v, ..SweepOptions::default() })
}

pub fn sweep_with(channel: &ChannelSpec, body: &EllipseBody, opts: &SweepOptions) -> Result<ForceTrace, ModelError> {
    if !(opts.dx.is_finite() && opts.dx > 0.0) {
        return Err(ModelError::InvalidParameter { name: "dx", value: opts.dx });
    }
    if !(opts.v.is_finite() && opts.v > 0.0) {
        return Err(ModelError::InvalidParameter { name: "v", value: opts.v });
    }
    let model = ChannelModel::new(*channel, *body)?;
    let (lo, hi) = model.local_sweep_range();
    let origin = channel.origin;
    // Tolerate representation error so that an exact multiple of dx keeps
    // its final sample.
    let steps = floor((hi - lo) / opts.dx * (1.0 + 1e-12)) as usize;
    let samples = (0..=steps)
        .map(|k| {
            let travelled = opts.dx * k as f64;
            let x_local = match opts.heading {
                Heading::Forward => lo + travelled,
                Heading::Backward => hi - travelled,
            };
            let mut s = model.sample_local(x_local, travelled / opts.v, opts.heading, opts.sides);
            s.x_r = origin + x_local;
            s.contacts.iter_mut().for_each(|c| c.x_i += origin);
            s
        })
        .collect();
    Ok(ForceTrace { samples, dx: opts.dx, v: opts.v, plateau: model.plateau_range() })
}
