//! Named channel conditions: maximum beam deflection and the matching
//! tip-to-tip width for a shell of half-width `r_y` (`b = 2 r_y - 2 d`).

use core::fmt;
use core::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Preset {
    Free,
    D0,
    D1,
    D2,
    D3,
}

impl Preset {
    pub const ALL: [Preset; 5] = [Preset::Free, Preset::D0, Preset::D1, Preset::D2, Preset::D3];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Free => "free",
            Preset::D0 => "d0",
            Preset::D1 => "d1",
            Preset::D2 => "d2",
            Preset::D3 => "d3",
        }
    }

    /// Maximum deflection [m]; `None` outside the beam track.
    pub fn deflection(self) -> Option<f64> {
        match self {
            Preset::Free => None,
            Preset::D0 => Some(0.0),
            Preset::D1 => Some(0.01),
            Preset::D2 => Some(0.02),
            Preset::D3 => Some(0.03),
        }
    }

    pub fn width(self, r_y: f64) -> Option<f64> {
        self.deflection().map(|d| width_for_deflection(d, r_y))
    }
}

pub fn width_for_deflection(d: f64, r_y: f64) -> f64 {
    2.0 * r_y - 2.0 * d
}

pub fn deflection_for_width(b: f64, r_y: f64) -> f64 {
    r_y - 0.5 * b
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownPreset;

impl fmt::Display for UnknownPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("unknown preset (expected free, d0, d1, d2 or d3)")
    }
}

impl core::error::Error for UnknownPreset {}

impl FromStr for Preset {
    type Err = UnknownPreset;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or(UnknownPreset)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn widths_match_table() {
        let widths: [Option<f64>; 5] = Preset::ALL.map(|p| p.width(0.05));
        assert_eq!(widths[0], None);
        for (w, expect) in widths[1..].iter().zip([0.10, 0.08, 0.06, 0.04]) {
            assert!((w.unwrap() - expect).abs() < 1e-15);
        }
        assert!((deflection_for_width(0.04, 0.05) - 0.03).abs() < 1e-15);
    }

    #[test]
    fn parse_names() {
        assert_eq!("D3".parse::<Preset>(), Ok(Preset::D3));
        assert_eq!("free".parse::<Preset>(), Ok(Preset::Free));
        assert!("d4".parse::<Preset>().is_err());
    }
}
