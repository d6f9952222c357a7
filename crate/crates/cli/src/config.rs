//! Run configuration: a flat key/value TOML file with sections, overridable
//! by command-line flags. No executable content; every accepted key is
//! listed in the grammar below.
//!
//! ```toml
//! [model]
//! preset = "IV"        # single-interface | I | II | III | IV | ideal | custom
//! omega-p = 1.38e16    # plasma frequency, rad/s
//! gamma = 0.0          # relaxation, rad/s; > 0 switches plasma -> Drude
//! eps = 2.25           # constant permittivity (presets I, II, custom)
//! mu = 1.0             # constant permeability (presets I, II, custom)
//!
//! [geometry]           # exactly one of the two keys
//! L = 6.3              # dimensionless width 2 a omega_p / c
//! # gap-nm = 100.0     # mirror separation d = 2a, nanometres
//!
//! [grid]
//! q = "0.1:2:16"              # a:b:n inclusive linear grid of k / k_p
//! separations-nm = "10:1000:10"  # a:b:n log-spaced separations
//!
//! [output]
//! format = "csv"       # csv | json
//! out = "table.csv"    # omit to write to stdout
//!
//! [verify]
//! tol = 1e-3
//! ```

use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use casimir_modes::consts::C;
use casimir_modes::dielectric::{Medium, PermittivityModel};
use casimir_modes::scattering::LayerConfig;

use crate::table::Format;

/// Which stack the run describes. `Ideal` is the perfect-mirror surrogate
/// accepted only by the force/energy commands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PresetChoice {
    SingleInterface,
    I,
    II,
    III,
    IV,
    Ideal,
    Custom,
}

impl PresetChoice {
    pub fn label(self) -> &'static str {
        match self {
            Self::SingleInterface => "single-interface",
            Self::I => "I",
            Self::II => "II",
            Self::III => "III",
            Self::IV => "IV",
            Self::Ideal => "ideal",
            Self::Custom => "custom",
        }
    }
}

impl std::str::FromStr for PresetChoice {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single-interface" => Ok(Self::SingleInterface),
            "I" | "i" | "1" => Ok(Self::I),
            "II" | "ii" | "2" => Ok(Self::II),
            "III" | "iii" | "3" => Ok(Self::III),
            "IV" | "iv" | "4" => Ok(Self::IV),
            "ideal" => Ok(Self::Ideal),
            "custom" => Ok(Self::Custom),
            other => bail!(
                "unknown preset {other:?} (expected single-interface, I, II, III, IV, ideal \
                 or custom)"
            ),
        }
    }
}

/// Exactly one way of fixing the gap size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Geometry {
    /// Dimensionless width `L = 2 a omega_p / c`.
    DimensionlessWidth(f64),
    /// Mirror separation `d = 2a` in metres.
    Separation(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub preset: PresetChoice,
    /// Plasma frequency (rad/s) for presets III/IV and the dimensionless
    /// scales.
    pub omega_p: f64,
    /// Drude relaxation (rad/s); zero means the lossless plasma model.
    pub gamma: f64,
    /// Constant permittivity for presets I/II/custom.
    pub eps: f64,
    /// Constant permeability for presets I/II/custom.
    pub mu: f64,
    pub geometry: Geometry,
    /// Dimensionless transverse wavenumbers `q = k/k_p`, sorted ascending.
    pub q_grid: Vec<f64>,
    /// Separations `d` in metres for force/energy scans, sorted ascending.
    pub separations: Vec<f64>,
    pub format: Format,
    pub out: Option<PathBuf>,
    /// Verification tolerance.
    pub tol: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            preset: PresetChoice::IV,
            omega_p: 1.38e16,
            gamma: 0.0,
            eps: 2.25,
            mu: 1.0,
            geometry: Geometry::DimensionlessWidth(6.3),
            q_grid: linear_grid(0.1, 2.0, 16),
            separations: log_grid(10e-9, 1e-6, 10),
            format: Format::Csv,
            out: None,
            tol: 1e-3,
        }
    }
}

impl RunConfig {
    /// Merge a TOML file into the defaults. Unknown keys are rejected.
    pub fn from_toml(text: &str) -> Result<Self> {
        let value: toml::Value = text.parse().context("config file is not valid TOML")?;
        let mut cfg = Self::default();
        let table = value.as_table().ok_or_else(|| anyhow!("config root must be a table"))?;
        for (section, body) in table {
            let body = body
                .as_table()
                .ok_or_else(|| anyhow!("section [{section}] must be a table"))?;
            for (key, v) in body {
                cfg.apply(section, key, v)?;
            }
        }
        Ok(cfg)
    }

    fn apply(&mut self, section: &str, key: &str, v: &toml::Value) -> Result<()> {
        let num = || -> Result<f64> {
            v.as_float()
                .or_else(|| v.as_integer().map(|i| i as f64))
                .ok_or_else(|| anyhow!("[{section}] {key} must be a number"))
        };
        let text = || -> Result<&str> {
            v.as_str().ok_or_else(|| anyhow!("[{section}] {key} must be a string"))
        };
        match (section, key) {
            ("model", "preset") => self.preset = text()?.parse()?,
            ("model", "omega-p") => self.omega_p = num()?,
            ("model", "gamma") => self.gamma = num()?,
            ("model", "eps") => self.eps = num()?,
            ("model", "mu") => self.mu = num()?,
            ("geometry", "L") => self.geometry = Geometry::DimensionlessWidth(num()?),
            ("geometry", "gap-nm") => self.geometry = Geometry::Separation(num()? * 1e-9),
            ("grid", "q") => self.q_grid = parse_linear_grid(text()?)?,
            ("grid", "separations-nm") => {
                let (a, b, n) = parse_grid_spec(text()?)?;
                self.separations = log_grid(a * 1e-9, b * 1e-9, n);
            }
            ("output", "format") => self.format = text()?.parse()?,
            ("output", "out") => self.out = Some(PathBuf::from(text()?)),
            ("verify", "tol") => self.tol = num()?,
            _ => bail!("unknown config key [{section}] {key}"),
        }
        Ok(())
    }

    /// Enforce the cross-field invariants after all overrides are applied.
    pub fn validate(&self) -> Result<()> {
        if !(self.omega_p > 0.0) {
            bail!("omega-p must be positive");
        }
        if self.gamma < 0.0 {
            bail!("gamma must be non-negative");
        }
        match self.geometry {
            Geometry::DimensionlessWidth(l) if !(l > 0.0) => bail!("L must be positive"),
            Geometry::Separation(d) if !(d > 0.0) => bail!("gap-nm must be positive"),
            _ => {}
        }
        for (name, grid) in [("q", &self.q_grid), ("separations", &self.separations)] {
            if grid.is_empty() {
                bail!("{name} grid must be non-empty");
            }
            if grid.iter().any(|v| !v.is_finite() || *v <= 0.0) {
                bail!("{name} grid entries must be positive finite numbers");
            }
            if grid.windows(2).any(|w| w[0] >= w[1]) {
                bail!("{name} grid must be strictly increasing");
            }
        }
        if !(self.tol > 0.0) {
            bail!("tol must be positive");
        }
        Ok(())
    }

    /// Half-gap `a` in metres.
    pub fn half_gap(&self) -> f64 {
        match self.geometry {
            Geometry::DimensionlessWidth(l) => 0.5 * l * C / self.omega_p,
            Geometry::Separation(d) => 0.5 * d,
        }
    }

    /// The layer stack, or an error for the ideal surrogate (which has no
    /// material description).
    pub fn layer_config(&self) -> Result<LayerConfig> {
        let a = self.half_gap();
        let metal = || -> Result<Medium> {
            let model = if self.gamma > 0.0 {
                PermittivityModel::drude(self.omega_p, self.gamma)?
            } else {
                PermittivityModel::plasma(self.omega_p)?
            };
            Ok(Medium::new(model, 1.0)?)
        };
        let cfg = match self.preset {
            PresetChoice::SingleInterface => {
                LayerConfig::single_interface(metal()?, Medium::vacuum(), a)?
            }
            PresetChoice::I => LayerConfig::preset_i(self.eps, self.mu, a)?,
            PresetChoice::II => LayerConfig::preset_ii(self.eps, self.mu, a)?,
            PresetChoice::III => {
                if self.gamma > 0.0 {
                    LayerConfig::custom(Medium::vacuum(), metal()?, a)?
                } else {
                    LayerConfig::preset_iii(self.omega_p, a)?
                }
            }
            PresetChoice::IV => {
                if self.gamma > 0.0 {
                    LayerConfig::custom(metal()?, Medium::vacuum(), a)?
                } else {
                    LayerConfig::preset_iv(self.omega_p, a)?
                }
            }
            PresetChoice::Custom => {
                let outer = Medium::new(PermittivityModel::Constant(self.eps), self.mu)?;
                LayerConfig::custom(outer, Medium::vacuum(), a)?
            }
            PresetChoice::Ideal => {
                bail!("the ideal-mirror surrogate has no material stack; use force/energy")
            }
        };
        Ok(cfg)
    }

    /// Canonical one-line rendering, the input of [`Self::hash`]. Every
    /// field appears; absent options render as `-`.
    pub fn canonical_string(&self) -> String {
        let geometry = match self.geometry {
            Geometry::DimensionlessWidth(l) => format!("L={l:.17e}"),
            Geometry::Separation(d) => format!("d={d:.17e}"),
        };
        let grid = |g: &[f64]| {
            g.iter().map(|v| format!("{v:.17e}")).collect::<Vec<_>>().join(" ")
        };
        format!(
            "preset={} omega_p={:.17e} gamma={:.17e} eps={:.17e} mu={:.17e} {} q=[{}] \
             separations=[{}] format={:?} tol={:.17e}",
            self.preset.label(),
            self.omega_p,
            self.gamma,
            self.eps,
            self.mu,
            geometry,
            grid(&self.q_grid),
            grid(&self.separations),
            self.format,
            self.tol,
        )
    }

    /// FNV-1a hash of the canonical string; stamped into output metadata so
    /// tables can be traced back to their configuration.
    pub fn hash(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in self.canonical_string().bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        h
    }
}

/// `n` points from `a` to `b` inclusive, linear spacing.
pub fn linear_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// `n` points from `a` to `b` inclusive, logarithmic spacing.
pub fn log_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![a];
    }
    let (la, lb) = (a.ln(), b.ln());
    (0..n).map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// Parse `a:b:n` into its parts.
pub fn parse_grid_spec(s: &str) -> Result<(f64, f64, usize)> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        bail!("grid spec {s:?} must have the form a:b:n");
    }
    let a: f64 = parts[0].parse().context("grid start")?;
    let b: f64 = parts[1].parse().context("grid end")?;
    let n: usize = parts[2].parse().context("grid count")?;
    if n == 0 {
        bail!("grid spec {s:?} has zero points");
    }
    if n > 1 && !(b > a) {
        bail!("grid spec {s:?} must increase");
    }
    Ok((a, b, n))
}

/// Parse `a:b:n` into an inclusive linear grid.
pub fn parse_linear_grid(s: &str) -> Result<Vec<f64>> {
    let (a, b, n) = parse_grid_spec(s)?;
    Ok(linear_grid(a, b, n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip_and_overrides() {
        let cfg = RunConfig::from_toml(
            "[model]\npreset = \"III\"\nomega-p = 1.0e16\n\n[geometry]\nL = 0.63\n\n\
             [grid]\nq = \"0.5:1.5:3\"\n\n[output]\nformat = \"json\"\n",
        )
        .unwrap();
        assert_eq!(cfg.preset, PresetChoice::III);
        assert_eq!(cfg.geometry, Geometry::DimensionlessWidth(0.63));
        assert_eq!(cfg.q_grid, vec![0.5, 1.0, 1.5]);
        assert_eq!(cfg.format, Format::Json);
        cfg.validate().unwrap();
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(RunConfig::from_toml("[model]\nbogus = 1\n").is_err());
        assert!(RunConfig::from_toml("[exec]\ncmd = \"rm\"\n").is_err());
    }

    #[test]
    fn validation_catches_bad_grids() {
        let mut cfg = RunConfig::default();
        cfg.q_grid = vec![];
        assert!(cfg.validate().is_err());
        cfg.q_grid = vec![2.0, 1.0];
        assert!(cfg.validate().is_err());
        cfg.q_grid = vec![1.0, 2.0];
        cfg.validate().unwrap();
    }

    #[test]
    fn hash_tracks_config_changes() {
        let a = RunConfig::default();
        let mut b = RunConfig::default();
        assert_eq!(a.hash(), b.hash());
        b.tol = 1e-4;
        assert_ne!(a.hash(), b.hash());
    }

    #[test]
    fn geometry_conversions() {
        let mut cfg = RunConfig::default();
        cfg.geometry = Geometry::DimensionlessWidth(6.3);
        let a = cfg.half_gap();
        assert!((2.0 * a * cfg.omega_p / C - 6.3).abs() < 1e-12);
        cfg.geometry = Geometry::Separation(100e-9);
        assert_eq!(cfg.half_gap(), 50e-9);
    }
}
