//! Constellation data model: sensors, bus budgets, wheel fleets and
//! strings-of-pearls, plus the validation rules that a usable layout must
//! satisfy.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::ConfigError;
use crate::relmotion::{pco_plane_normal, ChiefOrbit, RelMotionError, RelativeOrbitParams};

pub const MIN_WHEEL_RADIUS_M: f64 = 100.0;
pub const MAX_WHEEL_RADIUS_M: f64 = 1000.0;
pub const MIN_PEARL_SEPARATION_M: f64 = 100e3;
pub const MAX_PEARL_SEPARATION_M: f64 = 300e3;
pub const DEFAULT_MASS_KG: f64 = 10.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstellationError {
    #[error("fleet {fleet} has no deputies")]
    EmptyFleet { fleet: u32 },
    #[error(transparent)]
    Geometry(#[from] RelMotionError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SensorKind {
    RgbNarrow,
    RgbWide,
    SwirNarrow,
    SwirWide,
    RgbPolarized,
    Tir,
    DoasO2H2o,
    NadirRedExtra,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Swath {
    Narrow,
    Wide,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SensorCategory {
    Required,
    Desirable,
}

impl SensorKind {
    pub const ALL: [SensorKind; 8] = [
        SensorKind::RgbNarrow,
        SensorKind::RgbWide,
        SensorKind::SwirNarrow,
        SensorKind::SwirWide,
        SensorKind::RgbPolarized,
        SensorKind::Tir,
        SensorKind::DoasO2H2o,
        SensorKind::NadirRedExtra,
    ];

    /// The four imagers every fleet must carry.
    pub const REQUIRED: [SensorKind; 4] = [
        SensorKind::RgbNarrow,
        SensorKind::RgbWide,
        SensorKind::SwirNarrow,
        SensorKind::SwirWide,
    ];

    pub fn swath(self) -> Swath {
        match self {
            SensorKind::RgbWide | SensorKind::SwirWide | SensorKind::DoasO2H2o => Swath::Wide,
            _ => Swath::Narrow,
        }
    }

    /// Extra red nadir cameras are part of the required stereo rule.
    pub fn category(self) -> SensorCategory {
        match self {
            SensorKind::RgbPolarized | SensorKind::Tir | SensorKind::DoasO2H2o => {
                SensorCategory::Desirable
            }
            _ => SensorCategory::Required,
        }
    }

    pub fn channels(self) -> &'static [&'static str] {
        match self {
            SensorKind::RgbNarrow | SensorKind::RgbWide => &["red", "green", "blue"],
            SensorKind::SwirNarrow | SensorKind::SwirWide => &["1240", "1640", "2130"],
            SensorKind::RgbPolarized => &["red+45", "green+45", "blue+45", "red-45", "green-45", "blue-45"],
            SensorKind::Tir => &["tir-window"],
            SensorKind::DoasO2H2o => &["765", "continuum", "936"],
            SensorKind::NadirRedExtra => &["red"],
        }
    }

    pub fn is_core_imager(self) -> bool {
        Self::REQUIRED.contains(&self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropulsionSpec {
    pub name: String,
    pub total_impulse_ns: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdcsSpec {
    pub name: String,
    pub pointing_accuracy_deg: f64,
    pub momentum_capacity_mnms: f64,
    pub max_slew_rate_deg_s: f64,
}

/// Component catalog entries selectable by name.
pub fn propulsion_catalog() -> Vec<PropulsionSpec> {
    vec![
        PropulsionSpec {
            name: "VACCO MIPS".into(),
            total_impulse_ns: 250.0,
        },
        PropulsionSpec {
            name: "Aerojet MPS-120".into(),
            total_impulse_ns: 800.0,
        },
        PropulsionSpec {
            name: "VACCO C-POD".into(),
            total_impulse_ns: 186.0,
        },
    ]
}

pub fn adcs_catalog() -> Vec<AdcsSpec> {
    vec![AdcsSpec {
        name: "BCT XACT-100".into(),
        pointing_accuracy_deg: 0.003,
        momentum_capacity_mnms: 100.0,
        max_slew_rate_deg_s: 1.0,
    }]
}

pub fn find_propulsion(name: &str) -> Option<PropulsionSpec> {
    propulsion_catalog().into_iter().find(|p| p.name == name)
}

pub fn find_adcs(name: &str) -> Option<AdcsSpec> {
    adcs_catalog().into_iter().find(|a| a.name == name)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SatId(pub u32);

impl fmt::Display for SatId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sat-{:04}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Chief,
    Deputy,
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("{sat} needs {requested_ns:.4} Ns but only {remaining_ns:.4} Ns remain")]
pub struct BudgetExceeded {
    pub sat: SatId,
    pub requested_ns: f64,
    pub remaining_ns: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NanoSat {
    pub id: SatId,
    pub role: Role,
    pub sensor: Option<SensorKind>,
    pub mass_kg: f64,
    pub propulsion: PropulsionSpec,
    pub adcs: AdcsSpec,
    pub fuel_used_ns: f64,
    pub wheel_momentum_mnms: f64,
    pub rel_orbit: RelativeOrbitParams,
}

impl NanoSat {
    pub fn remaining_impulse_ns(&self) -> f64 {
        self.propulsion.total_impulse_ns - self.fuel_used_ns
    }

    /// Debits impulse from the propulsion budget; nothing changes on failure.
    pub fn debit(&mut self, impulse_ns: f64) -> Result<(), BudgetExceeded> {
        let remaining = self.remaining_impulse_ns();
        if impulse_ns > remaining {
            return Err(BudgetExceeded {
                sat: self.id,
                requested_ns: impulse_ns,
                remaining_ns: remaining,
            });
        }
        self.fuel_used_ns += impulse_ns;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fleet {
    pub id: u32,
    pub chief: NanoSat,
    pub deputies: Vec<NanoSat>,
    pub wheel_radius_m: f64,
    pub wheel_plane: Vector3<f64>,
    /// Along-track position of the wheel centre relative to the lead pearl.
    pub along_track_offset_m: f64,
    pub phase_along_track_rad: f64,
}

impl Fleet {
    pub fn satellites(&self) -> impl Iterator<Item = &NanoSat> {
        std::iter::once(&self.chief).chain(self.deputies.iter())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StringOfPearls {
    pub fleets: Vec<Fleet>,
    /// Gap between consecutive fleets; one shorter than `fleets`.
    pub separations_m: Vec<f64>,
    /// Index of the nadir-looking wheel.
    pub nadir_fleet: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constellation {
    pub chief_orbit: ChiefOrbit,
    pub tracks: Vec<StringOfPearls>,
    /// Ground pixel the pointing accuracy must support.
    pub pixel_size_m: f64,
}

impl Constellation {
    pub fn fleets(&self) -> impl Iterator<Item = &Fleet> {
        self.tracks.iter().flat_map(|t| t.fleets.iter())
    }

    pub fn satellites(&self) -> impl Iterator<Item = &NanoSat> {
        self.fleets().flat_map(|f| f.satellites())
    }

    pub fn satellite_count(&self) -> usize {
        self.satellites().count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("constellation serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

fn default_tracks() -> Vec<TrackConfig> {
    vec![TrackConfig::default()]
}
fn default_radius() -> f64 {
    100.0
}
fn default_propulsion() -> String {
    "VACCO MIPS".into()
}
fn default_adcs() -> String {
    "BCT XACT-100".into()
}
fn default_mass() -> f64 {
    DEFAULT_MASS_KG
}
fn default_pixel() -> f64 {
    50.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrackConfig {
    #[serde(default = "TrackConfig::default_fleets")]
    pub fleets: usize,
    #[serde(default = "TrackConfig::default_deputies")]
    pub deputies_per_fleet: usize,
    /// Explicit gaps between consecutive fleets; generated when absent.
    #[serde(default)]
    pub separations_km: Option<Vec<f64>>,
    #[serde(default)]
    pub nadir_fleet: Option<usize>,
}

impl TrackConfig {
    fn default_fleets() -> usize {
        10
    }
    fn default_deputies() -> usize {
        10
    }
}

impl Default for TrackConfig {
    fn default() -> Self {
        Self {
            fleets: Self::default_fleets(),
            deputies_per_fleet: Self::default_deputies(),
            separations_km: None,
            nadir_fleet: None,
        }
    }
}

/// Layout of the constellation as written in a scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstellationConfig {
    #[serde(default = "default_tracks")]
    pub tracks: Vec<TrackConfig>,
    #[serde(default = "default_radius")]
    pub wheel_radius_m: f64,
    #[serde(default)]
    pub wheel_plane_normal: Option<[f64; 3]>,
    /// Keys are `"<track>/<fleet>"`; values list deputy sensors in order.
    #[serde(default)]
    pub sensor_assignment: BTreeMap<String, Vec<SensorKind>>,
    #[serde(default = "default_propulsion")]
    pub propulsion: String,
    #[serde(default = "default_adcs")]
    pub adcs: String,
    #[serde(default = "default_mass")]
    pub mass_kg: f64,
    #[serde(default)]
    pub max_slew_rate_deg_s: Option<f64>,
    #[serde(default = "default_pixel")]
    pub pixel_size_m: f64,
}

impl Default for ConstellationConfig {
    fn default() -> Self {
        Self {
            tracks: default_tracks(),
            wheel_radius_m: default_radius(),
            wheel_plane_normal: None,
            sensor_assignment: BTreeMap::new(),
            propulsion: default_propulsion(),
            adcs: default_adcs(),
            mass_kg: default_mass(),
            max_slew_rate_deg_s: None,
            pixel_size_m: default_pixel(),
        }
    }
}

/// Gaps growing linearly from 100 km next to the nadir wheel to 300 km at the
/// outermost pair.
pub fn default_separations_m(fleets: usize, nadir: usize) -> Vec<f64> {
    if fleets < 2 {
        return Vec::new();
    }
    let centre = nadir as f64;
    let dist: Vec<f64> = (0..fleets - 1)
        .map(|i| (i as f64 + 0.5 - centre).abs())
        .collect();
    let lo = dist.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = dist.iter().cloned().fold(0.0, f64::max);
    dist.iter()
        .map(|d| {
            if hi > lo {
                MIN_PEARL_SEPARATION_M
                    + (MAX_PEARL_SEPARATION_M - MIN_PEARL_SEPARATION_M) * (d - lo) / (hi - lo)
            } else {
                MIN_PEARL_SEPARATION_M
            }
        })
        .collect()
}

/// Deputy sensors used when the scenario gives no explicit list: the four
/// core imagers, the red stereo cameras around the nadir wheel, then the
/// desirable instruments, cycling.
pub fn default_sensor_pattern(deputies: usize, fleet_index: usize, nadir: usize) -> Vec<SensorKind> {
    let mut out: Vec<SensorKind> = SensorKind::REQUIRED.to_vec();
    let extra = match fleet_index.abs_diff(nadir) {
        0 => 2,
        1 => 1,
        _ => 0,
    };
    out.extend(std::iter::repeat_n(SensorKind::NadirRedExtra, extra));
    let filler = [
        SensorKind::RgbPolarized,
        SensorKind::Tir,
        SensorKind::DoasO2H2o,
        SensorKind::RgbNarrow,
        SensorKind::RgbWide,
        SensorKind::SwirNarrow,
        SensorKind::SwirWide,
    ];
    let mut k = 0;
    while out.len() < deputies {
        out.push(filler[k % filler.len()]);
        k += 1;
    }
    out.truncate(deputies);
    out
}

/// Builds a fully populated constellation; deterministic in its inputs.
pub fn build_constellation(
    config: &ConstellationConfig,
    chief_orbit: ChiefOrbit,
) -> Result<Constellation, ConfigError> {
    let propulsion = find_propulsion(&config.propulsion).ok_or_else(|| {
        ConfigError::field(
            "constellation.propulsion",
            format!("unknown propulsion unit {:?}", config.propulsion),
        )
    })?;
    let mut adcs = find_adcs(&config.adcs).ok_or_else(|| {
        ConfigError::field("constellation.adcs", format!("unknown ADCS unit {:?}", config.adcs))
    })?;
    if let Some(rate) = config.max_slew_rate_deg_s {
        if !(rate > 0.0) {
            return Err(ConfigError::field(
                "constellation.max_slew_rate_deg_s",
                "must be positive",
            ));
        }
        adcs.max_slew_rate_deg_s = rate;
    }
    let radius = config.wheel_radius_m;
    if !(MIN_WHEEL_RADIUS_M..=MAX_WHEEL_RADIUS_M).contains(&radius) {
        return Err(ConfigError::field(
            "constellation.wheel_radius_m",
            format!("{radius} m is outside [100, 1000] m"),
        ));
    }
    if !(config.mass_kg > 0.0) {
        return Err(ConfigError::field("constellation.mass_kg", "must be positive"));
    }
    if !(config.pixel_size_m > 0.0) {
        return Err(ConfigError::field("constellation.pixel_size_m", "must be positive"));
    }
    let plane = match config.wheel_plane_normal {
        Some(n) => {
            let v = Vector3::new(n[0], n[1], n[2]);
            if !(v.norm() > 0.0) || !v.iter().all(|c| c.is_finite()) {
                return Err(ConfigError::field(
                    "constellation.wheel_plane_normal",
                    "must be a finite nonzero vector",
                ));
            }
            v.normalize()
        }
        None => pco_plane_normal(),
    };
    for key in config.sensor_assignment.keys() {
        let ok = key
            .split_once('/')
            .and_then(|(t, f)| Some((t.parse::<usize>().ok()?, f.parse::<usize>().ok()?)))
            .is_some_and(|(t, f)| t < config.tracks.len() && f < config.tracks[t].fleets);
        if !ok {
            return Err(ConfigError::field(
                format!("constellation.sensor_assignment.{key}"),
                "key must name an existing \"<track>/<fleet>\"",
            ));
        }
    }

    let sat = |id: u32, role: Role, sensor: Option<SensorKind>, rel_orbit: RelativeOrbitParams| NanoSat {
        id: SatId(id),
        role,
        sensor,
        mass_kg: config.mass_kg,
        propulsion: propulsion.clone(),
        adcs: adcs.clone(),
        fuel_used_ns: 0.0,
        wheel_momentum_mnms: 0.0,
        rel_orbit,
    };

    let mut next_id = 0u32;
    let mut fleet_id = 0u32;
    let mut tracks = Vec::with_capacity(config.tracks.len());
    for (ti, track) in config.tracks.iter().enumerate() {
        let path = format!("constellation.tracks[{ti}]");
        let nadir = track.nadir_fleet.unwrap_or(track.fleets / 2);
        if track.fleets > 0 && nadir >= track.fleets {
            return Err(ConfigError::field(
                format!("{path}.nadir_fleet"),
                format!("{nadir} is not a fleet index (track has {})", track.fleets),
            ));
        }
        let separations = match &track.separations_km {
            Some(km) => {
                if km.len() != track.fleets.saturating_sub(1) {
                    return Err(ConfigError::field(
                        format!("{path}.separations_km"),
                        format!("expected {} gaps, found {}", track.fleets.saturating_sub(1), km.len()),
                    ));
                }
                if let Some(i) = km.iter().position(|s| !(*s > 0.0)) {
                    return Err(ConfigError::field(
                        format!("{path}.separations_km[{i}]"),
                        "must be positive",
                    ));
                }
                km.iter().map(|s| s * 1e3).collect()
            }
            None => default_separations_m(track.fleets, nadir),
        };

        let mut fleets = Vec::with_capacity(track.fleets);
        let mut offset = 0.0;
        for fi in 0..track.fleets {
            if fi > 0 {
                offset -= separations[fi - 1];
            }
            let sensors = config
                .sensor_assignment
                .get(&format!("{ti}/{fi}"))
                .cloned()
                .unwrap_or_else(|| default_sensor_pattern(track.deputies_per_fleet, fi, nadir));
            if sensors.len() != track.deputies_per_fleet {
                return Err(ConfigError::field(
                    format!("constellation.sensor_assignment.{ti}/{fi}"),
                    format!(
                        "lists {} sensors for {} deputies",
                        sensors.len(),
                        track.deputies_per_fleet
                    ),
                ));
            }
            let chief = sat(next_id, Role::Chief, None, RelativeOrbitParams::default());
            next_id += 1;
            let count = track.deputies_per_fleet;
            let mut deputies = Vec::with_capacity(count);
            for (k, sensor) in sensors.into_iter().enumerate() {
                let phase = TAU * k as f64 / count as f64;
                let orbit = RelativeOrbitParams::in_plane(radius, phase, &plane).map_err(|e| {
                    ConfigError::field("constellation.wheel_plane_normal", e.to_string())
                })?;
                deputies.push(sat(next_id, Role::Deputy, Some(sensor), orbit));
                next_id += 1;
            }
            fleets.push(Fleet {
                id: fleet_id,
                chief,
                deputies,
                wheel_radius_m: radius,
                wheel_plane: plane,
                along_track_offset_m: offset,
                phase_along_track_rad: offset / chief_orbit.semi_major_axis_m,
            });
            fleet_id += 1;
        }
        tracks.push(StringOfPearls {
            fleets,
            separations_m: separations,
            nadir_fleet: nadir,
        });
    }

    Ok(Constellation {
        chief_orbit,
        tracks,
        pixel_size_m: config.pixel_size_m,
    })
}

/// PCO-style slots of the fleet's wheel, evenly phased and lying in its plane.
pub fn wheel_slots(fleet: &Fleet) -> Result<Vec<RelativeOrbitParams>, ConstellationError> {
    slots_for(fleet.id, fleet.deputies.len(), fleet.wheel_radius_m, &fleet.wheel_plane)
}

pub fn slots_for(
    fleet: u32,
    count: usize,
    radius_m: f64,
    plane: &Vector3<f64>,
) -> Result<Vec<RelativeOrbitParams>, ConstellationError> {
    if count == 0 {
        return Err(ConstellationError::EmptyFleet { fleet });
    }
    (0..count)
        .map(|k| {
            let phase = TAU * k as f64 / count as f64;
            Ok(RelativeOrbitParams::in_plane(radius_m, phase, plane)?)
        })
        .collect()
}

/// Time between nadir looks of two pearls `separation_m` apart on the ground track.
pub fn nadir_revisit_delay(separation_m: f64, chief: &ChiefOrbit) -> f64 {
    separation_m / chief.ground_speed_mps()
}

/// Ground footprint of the pointing error at nadir (m).
pub fn pointing_error_footprint_m(adcs: &AdcsSpec, chief: &ChiefOrbit) -> f64 {
    adcs.pointing_accuracy_deg.to_radians() * chief.altitude_m()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FindingCode {
    MissingRequiredSensor,
    ChiefCarriesSensor,
    StereoCamerasMissing,
    SeparationOutOfBand,
    FleetCountUnusual,
    EmptyTrack,
    PointingTooCoarse,
    WheelRadiusOutOfRange,
    UnevenPhasing,
    FuelOverdrawn,
    MomentumOutOfRange,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    pub severity: Severity,
    pub code: FindingCode,
    pub subject: String,
    pub message: String,
}

impl Finding {
    fn error(code: FindingCode, subject: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Error,
            code,
            subject: subject.into(),
            message: message.into(),
        }
    }

    fn warning(code: FindingCode, subject: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Warning,
            code,
            subject: subject.into(),
            message: message.into(),
        }
    }
}

fn fleet_label(track: usize, fleet: &Fleet) -> String {
    format!("track {track} fleet {}", fleet.id)
}

/// Checks the layout rules; problems come back as findings, never as errors.
pub fn validate(constellation: &Constellation) -> Vec<Finding> {
    let mut out = Vec::new();
    let chief_orbit = &constellation.chief_orbit;

    for (ti, track) in constellation.tracks.iter().enumerate() {
        let n = track.fleets.len();
        if n == 0 {
            out.push(Finding::warning(
                FindingCode::EmptyTrack,
                format!("track {ti}"),
                "track has no fleets",
            ));
        } else if !(5..=20).contains(&n) {
            out.push(Finding::warning(
                FindingCode::FleetCountUnusual,
                format!("track {ti}"),
                format!("{n} fleets; a track is expected to hold about 10"),
            ));
        }
        for (i, sep) in track.separations_m.iter().enumerate() {
            if !(MIN_PEARL_SEPARATION_M..=MAX_PEARL_SEPARATION_M).contains(sep) {
                out.push(Finding::warning(
                    FindingCode::SeparationOutOfBand,
                    format!("track {ti} gap {i}"),
                    format!("separation {:.1} km is outside [100, 300] km", sep / 1e3),
                ));
            }
        }

        for (fi, fleet) in track.fleets.iter().enumerate() {
            let label = fleet_label(ti, fleet);
            let kinds: Vec<SensorKind> = fleet.deputies.iter().filter_map(|d| d.sensor).collect();
            for required in SensorKind::REQUIRED {
                if !kinds.contains(&required) {
                    out.push(Finding::error(
                        FindingCode::MissingRequiredSensor,
                        label.clone(),
                        format!("{label} carries no {required:?} sensor"),
                    ));
                }
            }
            let stereo_needed = match fi.abs_diff(track.nadir_fleet) {
                0 => 2,
                1 => 1,
                _ => 0,
            };
            let stereo = kinds.iter().filter(|k| **k == SensorKind::NadirRedExtra).count();
            if stereo < stereo_needed {
                out.push(Finding::error(
                    FindingCode::StereoCamerasMissing,
                    label.clone(),
                    format!("{label} has {stereo} extra red cameras, needs {stereo_needed}"),
                ));
            }
            if fleet.chief.sensor.is_some() || fleet.chief.role != Role::Chief {
                out.push(Finding::error(
                    FindingCode::ChiefCarriesSensor,
                    fleet.chief.id.to_string(),
                    format!("chief of {label} must not carry a science sensor"),
                ));
            }
            if !(MIN_WHEEL_RADIUS_M..=MAX_WHEEL_RADIUS_M).contains(&fleet.wheel_radius_m) {
                out.push(Finding::error(
                    FindingCode::WheelRadiusOutOfRange,
                    label.clone(),
                    format!("wheel radius {} m outside [100, 1000] m", fleet.wheel_radius_m),
                ));
            }
            let phases: Vec<f64> = fleet.deputies.iter().map(|d| d.rel_orbit.alpha_x_rad).collect();
            if phases.len() > 1 {
                let gap = TAU / phases.len() as f64;
                let mut sorted = phases.clone();
                sorted.sort_by(f64::total_cmp);
                let uneven = sorted.windows(2).any(|w| (w[1] - w[0] - gap).abs() > 1e-9)
                    || (sorted[0] + TAU - sorted[sorted.len() - 1] - gap).abs() > 1e-9;
                if uneven {
                    out.push(Finding::error(
                        FindingCode::UnevenPhasing,
                        label.clone(),
                        "deputies are not evenly phased on the wheel",
                    ));
                }
            }
            for sat in fleet.satellites() {
                if sat.fuel_used_ns > sat.propulsion.total_impulse_ns {
                    out.push(Finding::error(
                        FindingCode::FuelOverdrawn,
                        sat.id.to_string(),
                        format!(
                            "used {:.3} Ns of {:.1} Ns",
                            sat.fuel_used_ns, sat.propulsion.total_impulse_ns
                        ),
                    ));
                }
                if !(0.0..=sat.adcs.momentum_capacity_mnms).contains(&sat.wheel_momentum_mnms) {
                    out.push(Finding::error(
                        FindingCode::MomentumOutOfRange,
                        sat.id.to_string(),
                        format!("wheel momentum {:.3} mNms", sat.wheel_momentum_mnms),
                    ));
                }
            }
        }
    }

    let mut seen: Vec<&AdcsSpec> = Vec::new();
    for sat in constellation.satellites() {
        if seen.contains(&&sat.adcs) {
            continue;
        }
        seen.push(&sat.adcs);
        let footprint = pointing_error_footprint_m(&sat.adcs, chief_orbit);
        if footprint > constellation.pixel_size_m {
            out.push(Finding::error(
                FindingCode::PointingTooCoarse,
                sat.adcs.name.clone(),
                format!(
                    "pointing error footprint {footprint:.1} m exceeds the {:.1} m pixel",
                    constellation.pixel_size_m
                ),
            ));
        }
    }
    out
}

pub fn has_errors(findings: &[Finding]) -> bool {
    findings.iter().any(|f| f.severity == Severity::Error)
}
