//! Scenario files (TOML) and CSV emission.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mass_transport::{Station, DEFAULT_DEPTHS_IN_WAVELENGTHS};
use crate::model::{BetaWarning, PhysicalConstants, WaveConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveSection {
    /// m
    pub wavelength: f64,
    /// m/s
    pub c0: f64,
    /// m
    pub r0: f64,
}

/// Optional overrides of the planetary constants.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub earth_radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Grids {
    /// Latitudes, m.
    pub s: Vec<f64>,
    /// Fixed depths for mean flows, m (must lie below the trough).
    pub z0: Vec<f64>,
    /// Lower labels of the truncated flux columns, m.
    pub r_tilde: Vec<f64>,
    /// Truncation depths for the full-flux fit, m. Empty means 5, 10, 20
    /// and 50 wavelengths.
    pub depths: Vec<f64>,
    pub stations: Vec<String>,
}

impl Default for Grids {
    fn default() -> Self {
        Self {
            s: vec![0.0, 5e4],
            z0: vec![-100.0, -50.0, -30.0, -20.0],
            r_tilde: vec![-12.0, -8.0],
            depths: Vec::new(),
            stations: vec!["crest".into(), "trough".into()],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Quadrature tolerance relative to the phase speed.
    pub quad_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { quad_rel: crate::mean_flow::DEFAULT_REL_TOL }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrajectorySection {
    /// Starting point, m.
    pub x: f64,
    pub z: f64,
    pub s: f64,
    pub periods: f64,
    pub steps_per_period: usize,
}

impl Default for TrajectorySection {
    fn default() -> Self {
        Self { x: 0.0, z: -10.0, s: 0.0, periods: 1.0, steps_per_period: 1000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SurfaceSection {
    /// Samples per wavelength.
    pub samples: usize,
}

impl Default for SurfaceSection {
    fn default() -> Self {
        Self { samples: 64 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: PathBuf::from("out") }
    }
}

/// Everything a CLI run needs, read from one TOML file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub wave: WaveSection,
    #[serde(default)]
    pub constants: ConstantsSection,
    #[serde(default)]
    pub grids: Grids,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub trajectory: TrajectorySection,
    #[serde(default)]
    pub surface: SurfaceSection,
    #[serde(default)]
    pub output: OutputSection,
}

/// Reading or writing a scenario failed.
#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{0}")]
    Invalid(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl ScenarioConfig {
    /// Reference scenario: 100 m waves, `r0 = -5 m`, no current.
    pub fn reference() -> Self {
        Self {
            wave: WaveSection { wavelength: 100.0, c0: 0.0, r0: -5.0 },
            constants: ConstantsSection::default(),
            grids: Grids::default(),
            tolerances: Tolerances::default(),
            trajectory: TrajectorySection::default(),
            surface: SurfaceSection::default(),
            output: OutputSection::default(),
        }
    }

    pub fn from_toml_str(text: &str, origin: &Path) -> std::result::Result<Self, ScenarioError> {
        let cfg: Self = toml::from_str(text)
            .map_err(|e| ScenarioError::Parse { path: origin.to_path_buf(), message: e.to_string() })?;
        cfg.check_grids()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> std::result::Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ScenarioError::Read { path: path.to_path_buf(), source })?;
        Self::from_toml_str(&text, path)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    /// Grids must be nonempty and sorted ascending; stations must parse.
    pub fn check_grids(&self) -> std::result::Result<(), ScenarioError> {
        let g = &self.grids;
        for (name, grid) in [("s", &g.s), ("z0", &g.z0), ("r_tilde", &g.r_tilde)] {
            if grid.is_empty() {
                return Err(ScenarioError::Invalid(format!("grids.{name} is empty")));
            }
            if grid.windows(2).any(|w| !(w[0] <= w[1])) {
                return Err(ScenarioError::Invalid(format!("grids.{name} is not sorted ascending")));
            }
        }
        if g.depths.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(ScenarioError::Invalid("grids.depths is not strictly increasing".into()));
        }
        if g.stations.is_empty() {
            return Err(ScenarioError::Invalid("grids.stations is empty".into()));
        }
        for st in &g.stations {
            st.parse::<Station>().map_err(|e| ScenarioError::Invalid(e.to_string()))?;
        }
        if self.surface.samples == 0 || self.trajectory.steps_per_period == 0 {
            return Err(ScenarioError::Invalid("sample counts must be positive".into()));
        }
        Ok(())
    }

    pub fn constants(&self) -> Result<(PhysicalConstants, Option<BetaWarning>)> {
        let c = &self.constants;
        let omega = c.omega.unwrap_or(PhysicalConstants::OMEGA);
        let g = c.g.unwrap_or(PhysicalConstants::G);
        let radius = c.earth_radius.unwrap_or(PhysicalConstants::EARTH_RADIUS);
        match c.beta {
            Some(beta) => PhysicalConstants::with_supplied_beta(omega, g, radius, beta),
            None => Ok((PhysicalConstants::new(omega, g, radius)?, None)),
        }
    }

    /// The wave configuration without validation.
    pub fn wave_config_unchecked(&self) -> Result<WaveConfig> {
        let (pc, _) = self.constants()?;
        Ok(WaveConfig::unchecked(self.wave.wavelength, self.wave.c0, self.wave.r0, pc))
    }

    pub fn wave_config(&self) -> Result<WaveConfig> {
        let (pc, _) = self.constants()?;
        WaveConfig::new(self.wave.wavelength, self.wave.c0, self.wave.r0, pc)
    }

    pub fn stations(&self) -> Vec<Station> {
        self.grids.stations.iter().filter_map(|s| s.parse().ok()).collect()
    }

    pub fn depths(&self) -> Vec<f64> {
        if self.grids.depths.is_empty() {
            DEFAULT_DEPTHS_IN_WAVELENGTHS.iter().map(|n| n * self.wave.wavelength).collect()
        } else {
            self.grids.depths.clone()
        }
    }
}

/// Format a number with 17 significant digits (round-trips any f64).
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

/// A CSV table: header row with units, then data rows.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_to<W: Write>(&self, out: W) -> std::result::Result<(), ScenarioError> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_file(&self, path: &Path) -> std::result::Result<(), ScenarioError> {
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        self.write_to(std::fs::File::create(path)?)
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    /// Parse CSV text produced by [`Table::write_to`].
    pub fn parse(text: &str) -> std::result::Result<Self, ScenarioError> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
        let header = r.headers()?.iter().map(str::to_string).collect();
        let rows = r
            .records()
            .map(|rec| rec.map(|rec| rec.iter().map(str::to_string).collect()))
            .collect::<std::result::Result<Vec<Vec<String>>, _>>()?;
        Ok(Self { header, rows })
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.header.iter().position(|h| h == name)?;
        self.rows.iter().map(|r| r[idx].parse().ok()).collect()
    }
}

impl From<Error> for ScenarioError {
    fn from(e: Error) -> Self {
        ScenarioError::Invalid(e.to_string())
    }
}
