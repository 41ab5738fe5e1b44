//! Run configuration: a TOML file layered over built-in defaults, with
//! command-line flags applied last.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use terradyn_core::presets::{deflection_for_width, width_for_deflection};
use terradyn_core::{BeamSpec, ChannelSpec, EllipseBody, Heading, ModelError, Preset, Sides, SweepOptions, WindowParams};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub body: BodyConfig,
    pub beam: BeamConfig,
    pub channel: ChannelConfig,
    pub sweep: SweepConfig,
    pub analysis: AnalysisConfig,
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BodyConfig {
    pub r_x: f64,
    pub r_y: f64,
    pub mass: f64,
}

impl Default for BodyConfig {
    fn default() -> Self {
        let b = EllipseBody::default();
        Self { r_x: b.r_x(), r_y: b.r_y(), mass: b.mass() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BeamConfig {
    pub modulus: f64,
    pub width: f64,
    pub length: f64,
    pub thickness: f64,
    pub mu_s: f64,
    pub mu_k: f64,
    pub max_deflection: f64,
}

impl Default for BeamConfig {
    fn default() -> Self {
        let b = BeamSpec::default();
        Self {
            modulus: b.modulus,
            width: b.width,
            length: b.length,
            thickness: b.thickness,
            mu_s: b.mu_s,
            mu_k: b.mu_k,
            max_deflection: b.max_deflection,
        }
    }
}

/// Channel geometry. Give the maximum deflection `deflection` or the
/// tip-to-tip `width`, or set `free` for a run with no beams. With none
/// of them the 3 cm channel is used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelConfig {
    pub n: usize,
    pub l_channel: f64,
    pub deflection: Option<f64>,
    pub width: Option<f64>,
    pub free: bool,
    pub spacing: Option<f64>,
    pub origin: f64,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        let c = ChannelSpec::default();
        Self {
            n: c.n,
            l_channel: c.l_channel,
            deflection: None,
            width: None,
            free: false,
            spacing: None,
            origin: c.origin,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SidesName {
    #[default]
    Mirrored,
    Explicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HeadingName {
    #[default]
    Forward,
    Backward,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub dx: f64,
    pub v: f64,
    pub sides: SidesName,
    pub heading: HeadingName,
}

impl Default for SweepConfig {
    fn default() -> Self {
        let s = SweepOptions::default();
        Self { dx: s.dx, v: s.v, sides: SidesName::Mirrored, heading: HeadingName::Forward }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    pub threshold: f64,
    pub hysteresis: f64,
    pub min_duration: f64,
    pub g: f64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        let w = WindowParams::default();
        Self {
            threshold: w.threshold,
            hysteresis: w.hysteresis,
            min_duration: w.min_duration,
            g: terradyn_core::metrics::STANDARD_GRAVITY,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub directory: PathBuf,
    pub formats: Vec<Format>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { directory: PathBuf::from("out"), formats: vec![Format::Csv, Format::Json, Format::Svg] }
    }
}

impl OutputConfig {
    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }
}

/// Core model inputs derived from a validated config.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub body: EllipseBody,
    pub channel: ChannelSpec,
    pub sweep: SweepOptions,
    pub window: WindowParams,
    pub g: f64,
}

impl RunConfig {
    pub fn from_toml(text: &str, path: &Path) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let line = e.span().map(|s| text[..s.start].matches('\n').count() as u64 + 1).unwrap_or(0);
            Error::parse(path, line, e.message().to_string())
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text, path)
    }

    /// Replace the channel condition with a named preset.
    pub fn set_preset(&mut self, preset: Preset) {
        self.channel.free = preset == Preset::Free;
        self.channel.deflection = preset.deflection();
        self.channel.width = None;
    }

    /// Tip-to-tip width, or `None` for a free run.
    pub fn channel_width(&self) -> Result<Option<f64>> {
        let c = &self.channel;
        let r_y = self.body.r_y;
        if c.free {
            if c.deflection.is_some() || c.width.is_some() {
                return Err(Error::config("channel.free", "cannot be combined with deflection or width"));
            }
            return Ok(None);
        }
        let b = match (c.deflection, c.width) {
            (None, None) => width_for_deflection(Preset::D3.deflection().unwrap_or_default(), r_y),
            (Some(d), None) => {
                finite("channel.deflection", d)?;
                width_for_deflection(d, r_y)
            }
            (None, Some(b)) => b,
            (Some(d), Some(b)) => {
                finite("channel.deflection", d)?;
                finite("channel.width", b)?;
                if (width_for_deflection(d, r_y) - b).abs() > 1e-9 {
                    return Err(Error::config(
                        "channel.width",
                        format!(
                            "width {b} disagrees with deflection {d} (expected {} for r_y = {r_y}); give only one",
                            width_for_deflection(d, r_y)
                        ),
                    ));
                }
                b
            }
        };
        if !(b.is_finite() && b >= 0.0) {
            return Err(Error::config("channel.width", format!("must be a non-negative width, got {b}")));
        }
        Ok(Some(b))
    }

    /// Maximum beam deflection of the channel [m], `None` for a free run.
    pub fn deflection(&self) -> Result<Option<f64>> {
        Ok(self.channel_width()?.map(|b| deflection_for_width(b, self.body.r_y)))
    }

    pub fn resolve(&self) -> Result<Resolved> {
        let b = &self.body;
        let body = EllipseBody::new(b.r_x, b.r_y, 0.0, b.mass).map_err(|e| keyed("body", e))?;
        let bc = &self.beam;
        let beam = BeamSpec::new(bc.modulus, bc.width, bc.length, bc.thickness, bc.mu_k, bc.mu_s)
            .and_then(|s| s.with_max_deflection(bc.max_deflection))
            .map_err(|e| keyed("beam", e))?;
        let c = &self.channel;
        finite("channel.origin", c.origin)?;
        let channel = ChannelSpec {
            n: c.n,
            l_channel: c.l_channel,
            width: self.channel_width()?,
            spacing_override: c.spacing,
            origin: c.origin,
            beam,
        };
        channel.validate().map_err(|e| keyed("channel", e))?;
        positive("sweep.dx", self.sweep.dx)?;
        positive("sweep.v", self.sweep.v)?;
        let sweep = SweepOptions {
            dx: self.sweep.dx,
            v: self.sweep.v,
            heading: match self.sweep.heading {
                HeadingName::Forward => Heading::Forward,
                HeadingName::Backward => Heading::Backward,
            },
            sides: match self.sweep.sides {
                SidesName::Mirrored => Sides::Mirrored,
                SidesName::Explicit => Sides::Explicit,
            },
        };
        let a = &self.analysis;
        positive("analysis.threshold", a.threshold)?;
        non_negative("analysis.hysteresis", a.hysteresis)?;
        if a.hysteresis >= a.threshold {
            return Err(Error::config("analysis.hysteresis", "must be below analysis.threshold"));
        }
        non_negative("analysis.min_duration", a.min_duration)?;
        positive("analysis.g", a.g)?;
        let window = WindowParams { threshold: a.threshold, hysteresis: a.hysteresis, min_duration: a.min_duration };
        Ok(Resolved { body, channel, sweep, window, g: a.g })
    }
}

fn keyed(section: &str, e: ModelError) -> Error {
    let field = match &e {
        ModelError::InvalidParameter { name, .. } | ModelError::NonFinite(name) => *name,
        ModelError::AxisOrder { .. } => "r_x",
        ModelError::FrictionOrder { .. } => "mu_k",
        ModelError::TrailingContact { .. } => "",
    };
    Error::config(format!("{section}.{field}"), e.to_string())
}

fn finite(key: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::config(key, format!("must be finite, got {v}")))
    }
}

fn positive(key: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::config(key, format!("must be positive, got {v}")))
    }
}

fn non_negative(key: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::config(key, format!("must be non-negative, got {v}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<RunConfig> {
        RunConfig::from_toml(text, Path::new("test.toml"))
    }

    #[test]
    fn empty_file_is_default_d3() {
        let cfg = parse("").unwrap();
        assert_eq!(cfg, RunConfig::default());
        let r = cfg.resolve().unwrap();
        assert!((r.channel.width.unwrap() - 0.04).abs() < 1e-15);
    }

    #[test]
    fn width_and_deflection_must_agree() {
        assert!(parse("[channel]\ndeflection = 0.02\nwidth = 0.06\n").unwrap().resolve().is_ok());
        let err = parse("[channel]\ndeflection = 0.02\nwidth = 0.05\n").unwrap().resolve().unwrap_err();
        assert!(err.to_string().contains("channel.width"), "{err}");
    }

    #[test]
    fn unknown_keys_are_named_with_line() {
        let err = parse("[beam]\nlength = 0.027\nstiffnes = 3\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("test.toml:3") && msg.contains("stiffnes"), "{msg}");
    }

    #[test]
    fn invalid_values_name_their_key() {
        let err = parse("[beam]\nmodulus = -1.0\n").unwrap().resolve().unwrap_err();
        assert!(err.to_string().contains("beam.modulus"), "{err}");
        let err = parse("[body]\nr_x = 0.01\n").unwrap().resolve().unwrap_err();
        assert!(err.to_string().contains("body.r_x"), "{err}");
        let err = parse("[sweep]\ndx = 0\n").unwrap().resolve().unwrap_err();
        assert!(err.to_string().contains("sweep.dx"), "{err}");
    }

    #[test]
    fn presets_replace_channel_condition() {
        let mut cfg = parse("[channel]\nwidth = 0.07\n").unwrap();
        cfg.set_preset(Preset::D1);
        assert!((cfg.channel_width().unwrap().unwrap() - 0.08).abs() < 1e-15);
        cfg.set_preset(Preset::Free);
        assert_eq!(cfg.channel_width().unwrap(), None);
    }

    #[test]
    fn free_conflicts_with_geometry() {
        assert!(parse("[channel]\nfree = true\nwidth = 0.04\n").unwrap().resolve().is_err());
    }
}
