//! Scenario files.
//!
//! A scenario is one JSON document. Every field has a default, so `{}` is a
//! complete scenario; unknown fields are rejected. Lengths and angles carry
//! their unit in the field name (`altitude_km`, `alpha_x_deg`).

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::constellation::ConstellationConfig;
use crate::planner::{PlannerSettings, DEFAULT_IMPULSE_EPOCHS, DEFAULT_MIN_SEPARATION_M, DEFAULT_TIME_LIMIT_S};
use crate::relmotion::{ChiefOrbit, DriftScale};
use crate::scheduler::{
    ObservationTarget, SchedulerSettings, TimeGrid, DEFAULT_DESAT_IMPULSE_NS, DEFAULT_DESAT_THRESHOLD,
    DEFAULT_EXACT_CAP, DEFAULT_KAPPA_MNMS_PER_DEG, DEFAULT_MAX_OFF_NADIR_DEG, DEFAULT_SLOT_S,
};
use crate::upkeep::{CorrectionScheme, UpkeepModel, DEFAULT_RECONFIG_FRACTION};

pub const SCHEMA_VERSION: u32 = 1;

/// A scenario file problem, located by its field path.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("{path}: {message}")]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    pub fn field(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    /// Drives deployment dispersion and generated targets (ChaCha8).
    pub seed: u64,
    pub chief: ChiefConfig,
    pub constellation: ConstellationConfig,
    pub deployment: DeploymentConfig,
    pub drift: DriftConfig,
    pub planner: PlannerConfig,
    pub upkeep: UpkeepConfig,
    pub scheduler: SchedulerConfig,
    pub simulate: SimulateConfig,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            seed: 42,
            chief: ChiefConfig::default(),
            constellation: ConstellationConfig::default(),
            deployment: DeploymentConfig::default(),
            drift: DriftConfig::default(),
            planner: PlannerConfig::default(),
            upkeep: UpkeepConfig::default(),
            scheduler: SchedulerConfig::default(),
            simulate: SimulateConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChiefConfig {
    pub altitude_km: f64,
}

impl Default for ChiefConfig {
    fn default() -> Self {
        Self { altitude_km: 400.0 }
    }
}

/// Deputies start at rest, scattered uniformly in a cube centred on the chief.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DeploymentConfig {
    pub cube_side_m: f64,
    pub min_separation_m: f64,
}

impl Default for DeploymentConfig {
    fn default() -> Self {
        Self {
            cube_side_m: 50.0,
            min_separation_m: 2.0 * DEFAULT_MIN_SEPARATION_M,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DriftConfig {
    pub radii_m: Vec<f64>,
    pub alpha_x_deg: Vec<f64>,
}

impl Default for DriftConfig {
    fn default() -> Self {
        Self {
            radii_m: std::iter::once(0.0).chain(default_sweep()).collect(),
            alpha_x_deg: vec![0.0, 45.0, 90.0, 135.0],
        }
    }
}

fn default_sweep() -> Vec<f64> {
    (1..=10).map(|k| 100.0 * k as f64).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlannerConfig {
    pub time_limit_s: f64,
    pub impulse_epochs: usize,
    pub min_separation_m: f64,
    pub sweep_radii_m: Vec<f64>,
    /// Fleet that is planned, counted across all tracks.
    pub fleet_index: usize,
    /// Target plane for `reconfig-plan`. The default is the PCO wheel plane
    /// turned 90 degrees about the along-track axis.
    pub reconfig_plane_normal: [f64; 3],
    /// Defaults to the constellation wheel radius.
    pub reconfig_radius_m: Option<f64>,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            time_limit_s: DEFAULT_TIME_LIMIT_S,
            impulse_epochs: DEFAULT_IMPULSE_EPOCHS,
            min_separation_m: DEFAULT_MIN_SEPARATION_M,
            sweep_radii_m: default_sweep(),
            fleet_index: 0,
            reconfig_plane_normal: [1.0, 0.0, 2.0],
            reconfig_radius_m: None,
        }
    }
}

impl PlannerConfig {
    pub fn settings(&self) -> PlannerSettings {
        PlannerSettings {
            time_limit_s: self.time_limit_s,
            impulse_epochs: self.impulse_epochs,
            min_separation_m: self.min_separation_m,
        }
    }

    pub fn reconfig_normal(&self) -> Vector3<f64> {
        Vector3::from(self.reconfig_plane_normal)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct UpkeepConfig {
    pub scheme: CorrectionScheme,
    pub corrections_per_orbit: u32,
    pub drift_scale: DriftScale,
    pub alpha_x_deg: f64,
    pub radii_m: Vec<f64>,
    pub reconfig_fraction: f64,
    /// Propulsion units to budget; empty means the whole catalog.
    pub propulsion_options: Vec<String>,
    /// Quoted per-satellite initialization cost for the reference rows.
    pub reference_init_ns: Option<f64>,
    /// Quoted annual upkeep for the reference rows.
    pub reference_annual_ns: Option<f64>,
}

impl Default for UpkeepConfig {
    fn default() -> Self {
        Self {
            scheme: CorrectionScheme::CancelAndRestore,
            corrections_per_orbit: 1,
            drift_scale: DriftScale::SemiMajorAxis,
            alpha_x_deg: 0.0,
            radii_m: vec![100.0, 1000.0],
            reconfig_fraction: DEFAULT_RECONFIG_FRACTION,
            propulsion_options: Vec::new(),
            reference_init_ns: Some(3.9),
            reference_annual_ns: Some(31.0),
        }
    }
}

impl UpkeepConfig {
    pub fn model(&self, mass_kg: f64) -> UpkeepModel {
        UpkeepModel {
            correction_scheme: self.scheme,
            corrections_per_orbit: self.corrections_per_orbit,
            mass_kg,
            drift_scale: self.drift_scale,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverChoice {
    /// Exact under the size cap, greedy above it.
    #[default]
    Auto,
    Exact,
    Greedy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SchedulerConfig {
    pub slot_s: f64,
    pub horizon_slots: usize,
    pub max_off_nadir_deg: f64,
    pub kappa_mnms_per_deg: f64,
    pub desat_threshold: f64,
    pub desat_impulse_ns: f64,
    pub exact_cap: usize,
    pub solver: SolverChoice,
    /// Fleets taking part, counted across all tracks; empty means all.
    pub fleets: Vec<usize>,
    pub track_spacing_km: f64,
    /// Explicit targets; when empty, `random_targets` are generated from the seed.
    pub targets: Vec<ObservationTarget>,
    pub random_targets: usize,
}

impl Default for SchedulerConfig {
    fn default() -> Self {
        Self {
            slot_s: DEFAULT_SLOT_S,
            horizon_slots: 20,
            max_off_nadir_deg: DEFAULT_MAX_OFF_NADIR_DEG,
            kappa_mnms_per_deg: DEFAULT_KAPPA_MNMS_PER_DEG,
            desat_threshold: DEFAULT_DESAT_THRESHOLD,
            desat_impulse_ns: DEFAULT_DESAT_IMPULSE_NS,
            exact_cap: DEFAULT_EXACT_CAP,
            solver: SolverChoice::Auto,
            fleets: vec![0, 1],
            track_spacing_km: 0.0,
            targets: Vec::new(),
            random_targets: 5,
        }
    }
}

impl SchedulerConfig {
    pub fn settings(&self) -> SchedulerSettings {
        SchedulerSettings {
            max_off_nadir_rad: self.max_off_nadir_deg.to_radians(),
            kappa_mnms_per_deg: self.kappa_mnms_per_deg,
            desat_threshold: self.desat_threshold,
            desat_impulse_ns: self.desat_impulse_ns,
            exact_cap: self.exact_cap,
        }
    }

    pub fn grid(&self) -> TimeGrid {
        TimeGrid::new(self.slot_s, self.horizon_slots)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateConfig {
    pub orbits: u32,
    /// Run a reconfiguration onto the planner's target plane after initialization.
    pub reconfigure: bool,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            orbits: 1,
            reconfigure: false,
        }
    }
}

fn positive(path: &str, v: f64) -> Result<(), ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::field(path, format!("must be positive, got {v}")))
    }
}

fn non_negative(path: &str, v: f64) -> Result<(), ConfigError> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::field(path, format!("must be non-negative, got {v}")))
    }
}

impl ScenarioConfig {
    /// Parses and validates a scenario document.
    pub fn from_json_str(text: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let config: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let path = if path == "." { "$".to_string() } else { path };
            ConfigError::field(path, e.into_inner().to_string())
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::field("$", format!("cannot read {}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(ConfigError::field(
                "schema_version",
                format!("unsupported version {}, expected {SCHEMA_VERSION}", self.schema_version),
            ));
        }
        positive("chief.altitude_km", self.chief.altitude_km)?;
        positive("deployment.cube_side_m", self.deployment.cube_side_m)?;
        non_negative("deployment.min_separation_m", self.deployment.min_separation_m)?;
        for (i, r) in self.drift.radii_m.iter().enumerate() {
            non_negative(&format!("drift.radii_m[{i}]"), *r)?;
        }
        let p = &self.planner;
        positive("planner.time_limit_s", p.time_limit_s)?;
        if p.impulse_epochs < 2 {
            return Err(ConfigError::field("planner.impulse_epochs", "needs at least 2 epochs"));
        }
        non_negative("planner.min_separation_m", p.min_separation_m)?;
        if self.deployment.min_separation_m < p.min_separation_m {
            return Err(ConfigError::field(
                "deployment.min_separation_m",
                format!(
                    "{} m deploys satellites inside the {} m planner keep-out",
                    self.deployment.min_separation_m, p.min_separation_m
                ),
            ));
        }
        for (i, r) in p.sweep_radii_m.iter().enumerate() {
            positive(&format!("planner.sweep_radii_m[{i}]"), *r)?;
        }
        if p.reconfig_plane_normal[2] == 0.0 {
            return Err(ConfigError::field(
                "planner.reconfig_plane_normal",
                "needs a non-zero cross-track component",
            ));
        }
        if let Some(r) = p.reconfig_radius_m {
            positive("planner.reconfig_radius_m", r)?;
        }
        let u = &self.upkeep;
        if u.corrections_per_orbit < 1 {
            return Err(ConfigError::field("upkeep.corrections_per_orbit", "must be at least 1"));
        }
        if !(0.0..=1.0).contains(&u.reconfig_fraction) {
            return Err(ConfigError::field("upkeep.reconfig_fraction", "must lie in [0, 1]"));
        }
        for (i, r) in u.radii_m.iter().enumerate() {
            non_negative(&format!("upkeep.radii_m[{i}]"), *r)?;
        }
        for (i, name) in u.propulsion_options.iter().enumerate() {
            if crate::constellation::find_propulsion(name).is_none() {
                return Err(ConfigError::field(
                    format!("upkeep.propulsion_options[{i}]"),
                    format!("unknown propulsion unit {name:?}"),
                ));
            }
        }
        if let Some(v) = u.reference_annual_ns {
            positive("upkeep.reference_annual_ns", v)?;
        }
        if let Some(v) = u.reference_init_ns {
            non_negative("upkeep.reference_init_ns", v)?;
        }
        let s = &self.scheduler;
        positive("scheduler.slot_s", s.slot_s)?;
        if !(s.max_off_nadir_deg > 0.0 && s.max_off_nadir_deg < 90.0) {
            return Err(ConfigError::field("scheduler.max_off_nadir_deg", "must lie in (0, 90)"));
        }
        non_negative("scheduler.kappa_mnms_per_deg", s.kappa_mnms_per_deg)?;
        non_negative("scheduler.desat_impulse_ns", s.desat_impulse_ns)?;
        if !(s.desat_threshold > 0.0 && s.desat_threshold <= 1.0) {
            return Err(ConfigError::field("scheduler.desat_threshold", "must lie in (0, 1]"));
        }
        for (i, t) in s.targets.iter().enumerate() {
            if !(t.window_s[1] > t.window_s[0]) {
                return Err(ConfigError::field(format!("scheduler.targets[{i}].window_s"), "window is empty"));
            }
            if !(t.priority > 0.0) {
                return Err(ConfigError::field(format!("scheduler.targets[{i}].priority"), "must be positive"));
            }
        }
        let fleets: usize = self.constellation.tracks.iter().map(|t| t.fleets).sum();
        if p.fleet_index >= fleets.max(1) {
            return Err(ConfigError::field(
                "planner.fleet_index",
                format!("only {fleets} fleets are configured"),
            ));
        }
        for (i, f) in s.fleets.iter().enumerate() {
            if *f >= fleets {
                return Err(ConfigError::field(
                    format!("scheduler.fleets[{i}]"),
                    format!("only {fleets} fleets are configured"),
                ));
            }
        }
        Ok(())
    }

    pub fn chief_orbit(&self) -> Result<ChiefOrbit, ConfigError> {
        ChiefOrbit::from_altitude(self.chief.altitude_km * 1e3)
            .map_err(|e| ConfigError::field("chief.altitude_km", e.to_string()))
    }

    /// Compact JSON of the fully defaulted config; the hashed form.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("scenario config always serializes")
    }

    /// Hex SHA-256 of [`ScenarioConfig::canonical_json`].
    pub fn config_hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_json().as_bytes()))
    }
}
