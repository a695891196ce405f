//! Linearized relative motion about a circular chief orbit.
//!
//! The frame is the usual Hill/LVLH frame centred on the chief: `x` points
//! radially away from Earth, `y` along the orbital velocity and `z` along the
//! orbit angular momentum. Propagation uses the closed-form
//! Clohessy-Wiltshire solution; perturbations are not modelled; the only
//! secular along-track effect in this crate comes from the curvature drift
//! formulas at the bottom of this module.

use std::f64::consts::{PI, TAU};

use nalgebra::{Matrix6, Vector3, Vector6};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Earth gravitational parameter (m^3/s^2).
pub const EARTH_MU: f64 = 3.986_004_418e14;
/// Earth equatorial radius (m).
pub const EARTH_RADIUS: f64 = 6.378_137e6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RelMotionError {
    #[error("semi-major axis {semi_major_axis_m} m is not above the Earth radius {earth_radius_m} m")]
    OrbitBelowSurface {
        semi_major_axis_m: f64,
        earth_radius_m: f64,
    },
    #[error("impulse {index} is earlier than the impulse before it")]
    UnsortedImpulses { index: usize },
    #[error("impulse {index} at t={time_s} s lies outside the propagation window")]
    ImpulseOutsideWindow { index: usize, time_s: f64 },
    #[error("wheel plane normal {normal:?} has no cross-track component; no bounded orbit lies in that plane")]
    EdgeOnWheelPlane { normal: [f64; 3] },
}

/// Reference circular orbit defining the LVLH frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiefOrbit {
    pub semi_major_axis_m: f64,
    pub mu_m3s2: f64,
    pub earth_radius_m: f64,
}

impl ChiefOrbit {
    /// Circular Earth orbit with the given semi-major axis.
    pub fn new(semi_major_axis_m: f64) -> Result<Self, RelMotionError> {
        Self::with_constants(semi_major_axis_m, EARTH_MU, EARTH_RADIUS)
    }

    pub fn with_constants(
        semi_major_axis_m: f64,
        mu_m3s2: f64,
        earth_radius_m: f64,
    ) -> Result<Self, RelMotionError> {
        if !(semi_major_axis_m > earth_radius_m) {
            return Err(RelMotionError::OrbitBelowSurface {
                semi_major_axis_m,
                earth_radius_m,
            });
        }
        Ok(Self {
            semi_major_axis_m,
            mu_m3s2,
            earth_radius_m,
        })
    }

    pub fn from_altitude(altitude_m: f64) -> Result<Self, RelMotionError> {
        Self::new(EARTH_RADIUS + altitude_m)
    }

    /// Mean motion n = sqrt(mu / a^3) in rad/s.
    pub fn mean_motion(&self) -> f64 {
        (self.mu_m3s2 / self.semi_major_axis_m.powi(3)).sqrt()
    }

    pub fn period_s(&self) -> f64 {
        TAU / self.mean_motion()
    }

    pub fn altitude_m(&self) -> f64 {
        self.semi_major_axis_m - self.earth_radius_m
    }

    /// Speed of the sub-satellite point over a non-rotating Earth (m/s).
    pub fn ground_speed_mps(&self) -> f64 {
        self.mean_motion() * self.earth_radius_m
    }
}

/// Which length stands in for `a` in the drift formulas.
///
/// `SemiMajorAxis` is the dimensionally standard reading and the default.
/// `Altitude` takes `a` as the height above the surface, which yields drifts
/// roughly seventeen times larger at 400 km.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriftScale {
    #[default]
    SemiMajorAxis,
    Altitude,
}

impl DriftScale {
    pub fn length_m(self, chief: &ChiefOrbit) -> f64 {
        match self {
            DriftScale::SemiMajorAxis => chief.semi_major_axis_m,
            DriftScale::Altitude => chief.altitude_m(),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            DriftScale::SemiMajorAxis => "semi_major_axis",
            DriftScale::Altitude => "altitude",
        }
    }
}

/// Position and velocity relative to the chief, in the LVLH frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LvlhState {
    pub position_m: Vector3<f64>,
    pub velocity_mps: Vector3<f64>,
    /// Time since scenario start.
    pub epoch_s: f64,
}

impl LvlhState {
    pub fn new(position_m: Vector3<f64>, velocity_mps: Vector3<f64>, epoch_s: f64) -> Self {
        Self {
            position_m,
            velocity_mps,
            epoch_s,
        }
    }

    pub fn at_rest(position_m: Vector3<f64>, epoch_s: f64) -> Self {
        Self::new(position_m, Vector3::zeros(), epoch_s)
    }

    pub fn origin(epoch_s: f64) -> Self {
        Self::at_rest(Vector3::zeros(), epoch_s)
    }

    pub fn to_vector(&self) -> Vector6<f64> {
        Vector6::new(
            self.position_m.x,
            self.position_m.y,
            self.position_m.z,
            self.velocity_mps.x,
            self.velocity_mps.y,
            self.velocity_mps.z,
        )
    }

    pub fn from_vector(v: &Vector6<f64>, epoch_s: f64) -> Self {
        Self::new(
            Vector3::new(v[0], v[1], v[2]),
            Vector3::new(v[3], v[4], v[5]),
            epoch_s,
        )
    }
}

/// An instantaneous velocity change.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Impulse {
    pub time_s: f64,
    pub delta_v_mps: Vector3<f64>,
}

impl Impulse {
    pub fn new(time_s: f64, delta_v_mps: Vector3<f64>) -> Self {
        Self {
            time_s,
            delta_v_mps,
        }
    }

    pub fn magnitude_mps(&self) -> f64 {
        self.delta_v_mps.norm()
    }
}

/// Magnitude-phase description of a periodic relative orbit:
///
/// ```text
/// x = rho_x sin(n t + alpha_x)
/// y = rho_y cos(n t + alpha_y) + y_offset
/// z = rho_z sin(n t + alpha_z)
/// ```
///
/// A bounded Clohessy-Wiltshire orbit always has `rho_y = 2 rho_x` and
/// `alpha_y = alpha_x`; the fields are kept independent so arbitrary
/// parameter sets can be fed to the drift formula.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RelativeOrbitParams {
    pub rho_x_m: f64,
    pub rho_y_m: f64,
    pub rho_z_m: f64,
    pub alpha_x_rad: f64,
    pub alpha_y_rad: f64,
    pub alpha_z_rad: f64,
    pub y_offset_m: f64,
}

/// Wraps an angle into [0, 2pi).
pub fn normalize_angle(angle: f64) -> f64 {
    let wrapped = angle.rem_euclid(TAU);
    if wrapped >= TAU {
        0.0
    } else {
        wrapped
    }
}

/// Normal of the plane containing every projected circular orbit.
pub fn pco_plane_normal() -> Vector3<f64> {
    Vector3::new(2.0, 0.0, -1.0).normalize()
}

impl RelativeOrbitParams {
    /// Projected circular orbit of radius `rho`: `y^2 + z^2 = rho^2` at all times.
    pub fn pco(rho_m: f64, phase_rad: f64) -> Self {
        let phase = normalize_angle(phase_rad);
        Self {
            rho_x_m: rho_m / 2.0,
            rho_y_m: rho_m,
            rho_z_m: rho_m,
            alpha_x_rad: phase,
            alpha_y_rad: phase,
            alpha_z_rad: phase,
            y_offset_m: 0.0,
        }
    }

    /// Bounded orbit in the plane with the given normal, sharing the PCO's
    /// radial/along-track ellipse (`rho_x = rho/2`, `rho_y = rho`).
    ///
    /// The cross-track motion is `z = p x + q y` with `p = -n_x/n_z` and
    /// `q = -n_y/n_z`; planes with `n_z = 0` are rejected.
    pub fn in_plane(
        rho_m: f64,
        phase_rad: f64,
        normal: &Vector3<f64>,
    ) -> Result<Self, RelMotionError> {
        let unit = normal.normalize();
        if !(unit.z.abs() > 1e-9) {
            return Err(RelMotionError::EdgeOnWheelPlane {
                normal: [normal.x, normal.y, normal.z],
            });
        }
        let p = -unit.x / unit.z;
        let q = -unit.y / unit.z;
        let rho_z = rho_m * (0.5 * p).hypot(q);
        let shift = if rho_z > 0.0 { q.atan2(0.5 * p) } else { 0.0 };
        let phase = normalize_angle(phase_rad);
        Ok(Self {
            rho_x_m: rho_m / 2.0,
            rho_y_m: rho_m,
            rho_z_m: rho_z,
            alpha_x_rad: phase,
            alpha_y_rad: phase,
            alpha_z_rad: normalize_angle(phase + shift),
            y_offset_m: 0.0,
        })
    }

    /// Multiplies every amplitude and the along-track offset by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        Self {
            rho_x_m: self.rho_x_m * k,
            rho_y_m: self.rho_y_m * k,
            rho_z_m: self.rho_z_m * k,
            y_offset_m: self.y_offset_m * k,
            ..*self
        }
    }
}

/// Closed-form Clohessy-Wiltshire state-transition matrix over `dt` seconds.
pub fn hcw_stm(chief: &ChiefOrbit, dt: f64) -> Matrix6<f64> {
    let n = chief.mean_motion();
    let nt = n * dt;
    let (s, c) = nt.sin_cos();
    #[rustfmt::skip]
    let stm = Matrix6::new(
        4.0 - 3.0 * c,        0.0, 0.0, s / n,               2.0 * (1.0 - c) / n,       0.0,
        6.0 * (s - nt),       1.0, 0.0, -2.0 * (1.0 - c) / n, (4.0 * s - 3.0 * nt) / n, 0.0,
        0.0,                  0.0, c,   0.0,                 0.0,                       s / n,
        3.0 * n * s,          0.0, 0.0, c,                   2.0 * s,                   0.0,
        -6.0 * n * (1.0 - c), 0.0, 0.0, -2.0 * s,            4.0 * c - 3.0,             0.0,
        0.0,                  0.0, -n * s, 0.0,              0.0,                       c,
    );
    stm
}

/// Propagates `state` by `dt` seconds, applying each impulse at its epoch.
///
/// Impulses must be sorted and lie inside `[state.epoch_s, state.epoch_s + dt]`.
/// An impulse exactly at the end of the window is applied to the returned state.
pub fn propagate(
    state: &LvlhState,
    chief: &ChiefOrbit,
    dt: f64,
    impulses: &[Impulse],
) -> Result<LvlhState, RelMotionError> {
    let start = state.epoch_s;
    let end = start + dt;
    let slack = 1e-9 * (1.0 + end.abs());
    for (index, imp) in impulses.iter().enumerate() {
        if imp.time_s < start - slack || imp.time_s > end + slack {
            return Err(RelMotionError::ImpulseOutsideWindow {
                index,
                time_s: imp.time_s,
            });
        }
        if index > 0 && imp.time_s < impulses[index - 1].time_s {
            return Err(RelMotionError::UnsortedImpulses { index });
        }
    }

    let mut x = state.to_vector();
    let mut t = start;
    for imp in impulses {
        let hop = (imp.time_s - t).max(0.0);
        if hop > 0.0 {
            x = hcw_stm(chief, hop) * x;
        }
        t = t.max(imp.time_s);
        x[3] += imp.delta_v_mps.x;
        x[4] += imp.delta_v_mps.y;
        x[5] += imp.delta_v_mps.z;
    }
    let remaining = end - t;
    if remaining > 0.0 {
        x = hcw_stm(chief, remaining) * x;
    }
    Ok(LvlhState::from_vector(&x, end))
}

/// Evaluates the magnitude-phase form at `phase_time_s`.
pub fn params_to_state(
    params: &RelativeOrbitParams,
    chief: &ChiefOrbit,
    phase_time_s: f64,
) -> LvlhState {
    let n = chief.mean_motion();
    let (sx, cx) = (n * phase_time_s + params.alpha_x_rad).sin_cos();
    let (sy, cy) = (n * phase_time_s + params.alpha_y_rad).sin_cos();
    let (sz, cz) = (n * phase_time_s + params.alpha_z_rad).sin_cos();
    LvlhState::new(
        Vector3::new(
            params.rho_x_m * sx,
            params.rho_y_m * cy + params.y_offset_m,
            params.rho_z_m * sz,
        ),
        Vector3::new(
            n * params.rho_x_m * cx,
            -n * params.rho_y_m * sy,
            n * params.rho_z_m * cz,
        ),
        phase_time_s,
    )
}

/// A state split into its bounded periodic part and its secular terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitDecomposition {
    /// Bounded part; `y_offset_m` is the along-track centre at the state's epoch.
    pub params: RelativeOrbitParams,
    /// Constant radial offset of the centre of motion.
    pub radial_offset_m: f64,
    /// Secular along-track rate caused by the radial offset (zero for drift-free states).
    pub secular_drift_mps: f64,
}

/// Splits any state into bounded and secular parts; nothing is rejected.
pub fn decompose_state(state: &LvlhState, chief: &ChiefOrbit) -> OrbitDecomposition {
    let n = chief.mean_motion();
    let t = state.epoch_s;
    let r = state.position_m;
    let v = state.velocity_mps;

    // vy + 2 n x vanishes for drift-free motion
    let mismatch = v.y + 2.0 * n * r.x;
    let radial_offset = 2.0 * mismatch / n;
    let x_osc = r.x - radial_offset;

    let rho_x = x_osc.hypot(v.x / n);
    let phase_x = x_osc.atan2(v.x / n);
    let rho_z = r.z.hypot(v.z / n);
    let phase_z = r.z.atan2(v.z / n);
    let rho_y = 2.0 * rho_x;

    OrbitDecomposition {
        params: RelativeOrbitParams {
            rho_x_m: rho_x,
            rho_y_m: rho_y,
            rho_z_m: rho_z,
            alpha_x_rad: normalize_angle(phase_x - n * t),
            alpha_y_rad: normalize_angle(phase_x - n * t),
            alpha_z_rad: normalize_angle(phase_z - n * t),
            y_offset_m: r.y - rho_y * phase_x.cos(),
        },
        radial_offset_m: radial_offset,
        secular_drift_mps: -3.0 * mismatch,
    }
}

/// Magnitude-phase parameters of the bounded part of `state`.
pub fn state_to_params(state: &LvlhState, chief: &ChiefOrbit) -> RelativeOrbitParams {
    decompose_state(state, chief).params
}

/// True when `vy = -2 n x` holds within `1e-9 n |x|`.
pub fn is_drift_free(state: &LvlhState, chief: &ChiefOrbit) -> bool {
    let n = chief.mean_motion();
    let mismatch = state.velocity_mps.y + 2.0 * n * state.position_m.x;
    mismatch.abs() <= 1e-9 * n * state.position_m.x.abs().max(f64::MIN_POSITIVE)
}

/// Along-track drift rate (m/s) of a satellite relative to the wheel centre,
/// using the chief semi-major axis for `a`.
pub fn drift_rate(params: &RelativeOrbitParams, chief: &ChiefOrbit) -> f64 {
    drift_rate_scaled(params, chief, DriftScale::SemiMajorAxis)
}

/// Drift rate `-(3n / 2a)(2 rx^2 + 2 ry^2 + rz^2 + 6 rx ry cos ax + 3 rx^2 cos 2ax)`.
pub fn drift_rate_scaled(params: &RelativeOrbitParams, chief: &ChiefOrbit, scale: DriftScale) -> f64 {
    let n = chief.mean_motion();
    let a = scale.length_m(chief);
    let (rx, ry, rz) = (params.rho_x_m, params.rho_y_m, params.rho_z_m);
    let ax = params.alpha_x_rad;
    let bracket = 2.0 * rx * rx
        + 2.0 * ry * ry
        + rz * rz
        + 6.0 * rx * ry * ax.cos()
        + 3.0 * rx * rx * (2.0 * ax).cos();
    -(3.0 * n / (2.0 * a)) * bracket
}

/// Linear along-track drift per orbit (m) of a PCO of radius `rho_m`.
pub fn drift_per_orbit_pco(rho_m: f64, alpha_x_rad: f64, chief: &ChiefOrbit) -> f64 {
    drift_per_orbit_pco_scaled(rho_m, alpha_x_rad, chief, DriftScale::SemiMajorAxis)
}

/// `-(9 pi rho^2 / 2a)(2 + cos 2 alpha_x)`.
pub fn drift_per_orbit_pco_scaled(
    rho_m: f64,
    alpha_x_rad: f64,
    chief: &ChiefOrbit,
    scale: DriftScale,
) -> f64 {
    let a = scale.length_m(chief);
    -(9.0 * PI * rho_m * rho_m / (2.0 * a)) * (2.0 + (2.0 * alpha_x_rad).cos())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn leo() -> ChiefOrbit {
        ChiefOrbit::new(6.778e6).unwrap()
    }

    fn rel_err(a: &LvlhState, b: &LvlhState) -> f64 {
        let dp = (a.position_m - b.position_m).norm() / b.position_m.norm().max(1e-12);
        let dv = (a.velocity_mps - b.velocity_mps).norm() / b.velocity_mps.norm().max(1e-12);
        dp.max(dv)
    }

    #[test]
    fn orbit_below_surface_is_rejected() {
        assert!(matches!(
            ChiefOrbit::new(6.0e6),
            Err(RelMotionError::OrbitBelowSurface { .. })
        ));
    }

    #[test]
    fn mean_motion_and_period_agree() {
        let chief = leo();
        let n = (EARTH_MU / 6.778e6_f64.powi(3)).sqrt();
        assert_relative_eq!(chief.mean_motion(), n, max_relative = 1e-12);
        assert_relative_eq!(chief.period_s() * n, TAU, max_relative = 1e-12);
    }

    #[test]
    fn stm_at_zero_is_identity() {
        assert_eq!(hcw_stm(&leo(), 0.0), Matrix6::identity());
    }

    #[test]
    fn stm_is_periodic_for_bounded_states() {
        let chief = leo();
        let start = params_to_state(&RelativeOrbitParams::pco(250.0, 1.1), &chief, 0.0);
        let back = hcw_stm(&chief, chief.period_s()) * start.to_vector();
        let err = (back - start.to_vector()).norm() / start.to_vector().norm();
        assert!(err < 1e-9, "relative error {err}");
    }

    #[test]
    fn quarter_period_advances_pco_phase() {
        let chief = leo();
        let start = params_to_state(&RelativeOrbitParams::pco(100.0, 0.0), &chief, 0.0);
        let expected = params_to_state(&RelativeOrbitParams::pco(100.0, PI / 2.0), &chief, 0.0);
        let out = propagate(&start, &chief, chief.period_s() / 4.0, &[]).unwrap();
        assert!(rel_err(&out, &expected) < 1e-9);
    }

    #[test]
    fn zero_dt_without_impulses_is_identity() {
        let chief = leo();
        let s = LvlhState::new(Vector3::new(1.0, 2.0, 3.0), Vector3::new(0.1, 0.2, 0.3), 5.0);
        assert_eq!(propagate(&s, &chief, 0.0, &[]).unwrap(), s);
    }

    #[test]
    fn impulse_at_start_only_changes_velocity() {
        let chief = leo();
        let s = LvlhState::at_rest(Vector3::new(10.0, -4.0, 2.0), 100.0);
        let dv = Vector3::new(0.01, -0.02, 0.005);
        let out = propagate(&s, &chief, 0.0, &[Impulse::new(100.0, dv)]).unwrap();
        assert_eq!(out.position_m, s.position_m);
        assert_eq!(out.velocity_mps, dv);
    }

    #[test]
    fn unsorted_impulses_are_rejected() {
        let chief = leo();
        let s = LvlhState::origin(0.0);
        let imps = [
            Impulse::new(20.0, Vector3::x()),
            Impulse::new(10.0, Vector3::y()),
        ];
        assert_eq!(
            propagate(&s, &chief, 30.0, &imps),
            Err(RelMotionError::UnsortedImpulses { index: 1 })
        );
        let late = [Impulse::new(40.0, Vector3::x())];
        assert!(matches!(
            propagate(&s, &chief, 30.0, &late),
            Err(RelMotionError::ImpulseOutsideWindow { index: 0, .. })
        ));
    }

    #[test]
    fn zero_amplitudes_give_origin() {
        let s = params_to_state(&RelativeOrbitParams::default(), &leo(), 123.0);
        assert_eq!(s.position_m, Vector3::zeros());
        assert_eq!(s.velocity_mps, Vector3::zeros());
    }

    #[test]
    fn pco_keeps_constant_projected_radius() {
        let chief = leo();
        let params = RelativeOrbitParams::pco(100.0, 0.0);
        for k in 0..50 {
            let s = params_to_state(&params, &chief, k as f64 * 97.0);
            let r2 = s.position_m.y.powi(2) + s.position_m.z.powi(2);
            assert_relative_eq!(r2, 100.0 * 100.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn in_plane_with_pco_normal_is_pco() {
        let a = RelativeOrbitParams::in_plane(300.0, 0.7, &pco_plane_normal()).unwrap();
        let b = RelativeOrbitParams::pco(300.0, 0.7);
        assert_relative_eq!(a.rho_z_m, b.rho_z_m, max_relative = 1e-12);
        assert_relative_eq!(a.alpha_z_rad, b.alpha_z_rad, epsilon = 1e-12);
    }

    #[test]
    fn in_plane_orbit_stays_in_plane() {
        let chief = leo();
        let normal = Vector3::new(1.0, 0.4, 2.0).normalize();
        let params = RelativeOrbitParams::in_plane(150.0, 2.0, &normal).unwrap();
        for k in 0..40 {
            let s = params_to_state(&params, &chief, k as f64 * 131.0);
            assert!(s.position_m.dot(&normal).abs() < 1e-9);
        }
        assert!(matches!(
            RelativeOrbitParams::in_plane(100.0, 0.0, &Vector3::y()),
            Err(RelMotionError::EdgeOnWheelPlane { .. })
        ));
    }

    #[test]
    fn drifting_state_is_decomposed() {
        let chief = leo();
        let n = chief.mean_motion();
        let bounded = params_to_state(&RelativeOrbitParams::pco(80.0, 0.3), &chief, 0.0);
        assert!(is_drift_free(&bounded, &chief));
        let mut drifting = bounded;
        drifting.velocity_mps.y += 0.01;
        assert!(!is_drift_free(&drifting, &chief));
        let d = decompose_state(&drifting, &chief);
        assert_relative_eq!(d.secular_drift_mps, -0.03, max_relative = 1e-12);
        assert_relative_eq!(d.radial_offset_m, 0.02 / n, max_relative = 1e-12);
        // the secular rate is what one period of propagation shows
        let later = propagate(&drifting, &chief, chief.period_s(), &[]).unwrap();
        let dy = later.position_m.y - drifting.position_m.y;
        assert_relative_eq!(dy, d.secular_drift_mps * chief.period_s(), max_relative = 1e-9);
    }

    #[test]
    fn drift_rate_reference_value() {
        // -(3n/2a) * (2*50^2 + 2*100^2 + 100^2 + 0 - 3*50^2) = -(3n/2a) * 27500
        let chief = leo();
        let params = RelativeOrbitParams {
            rho_x_m: 50.0,
            rho_y_m: 100.0,
            rho_z_m: 100.0,
            alpha_x_rad: PI / 2.0,
            ..Default::default()
        };
        let expected = -1.5 * chief.mean_motion() / 6.778e6 * 27_500.0;
        assert_relative_eq!(drift_rate(&params, &chief), expected, max_relative = 1e-12);
        assert_relative_eq!(drift_rate(&params, &chief), -6.886e-6, max_relative = 1e-3);
    }

    #[test]
    fn drift_per_orbit_reference_values() {
        let chief = leo();
        assert_eq!(drift_per_orbit_pco(0.0, 0.3, &chief), 0.0);
        let semi = drift_per_orbit_pco(100.0, 0.0, &chief);
        assert_relative_eq!(semi, -0.062_57, max_relative = 1e-3);
        let alt = drift_per_orbit_pco_scaled(100.0, 0.0, &chief, DriftScale::Altitude);
        assert_relative_eq!(alt, -1.0603, max_relative = 1e-3);
        let ratio = drift_per_orbit_pco(1000.0, 0.4, &chief) / drift_per_orbit_pco(100.0, 0.4, &chief);
        assert_relative_eq!(ratio, 100.0, max_relative = 1e-14);
    }

    fn bounded_params() -> impl Strategy<Value = RelativeOrbitParams> {
        (1.0..1000.0f64, 1.0..1000.0f64, 0.0..TAU, 0.0..TAU, -500.0..500.0f64).prop_map(
            |(rho_x, rho_z, ax, az, off)| RelativeOrbitParams {
                rho_x_m: rho_x,
                rho_y_m: 2.0 * rho_x,
                rho_z_m: rho_z,
                alpha_x_rad: ax,
                alpha_y_rad: ax,
                alpha_z_rad: az,
                y_offset_m: off,
            },
        )
    }

    fn angle_gap(a: f64, b: f64) -> f64 {
        let d = (a - b).rem_euclid(TAU);
        d.min(TAU - d)
    }

    proptest! {
        #[test]
        fn params_state_round_trip(p in bounded_params(), t in 0.0..20_000.0f64) {
            let chief = leo();
            let s = params_to_state(&p, &chief, t);
            prop_assert!(is_drift_free(&s, &chief) || s.position_m.x.abs() < 1e-6);
            let d = decompose_state(&s, &chief);
            let q = d.params;
            prop_assert!((q.rho_x_m - p.rho_x_m).abs() <= 1e-9 * p.rho_x_m);
            prop_assert!((q.rho_y_m - p.rho_y_m).abs() <= 1e-9 * p.rho_y_m);
            prop_assert!((q.rho_z_m - p.rho_z_m).abs() <= 1e-9 * p.rho_z_m);
            prop_assert!(angle_gap(q.alpha_x_rad, p.alpha_x_rad) < 1e-9);
            prop_assert!(angle_gap(q.alpha_z_rad, p.alpha_z_rad) < 1e-9);
            prop_assert!((q.y_offset_m - p.y_offset_m).abs() < 1e-9 * p.rho_y_m.max(p.y_offset_m.abs()));
            let back = params_to_state(&q, &chief, t);
            prop_assert!(rel_err(&back, &s) < 1e-9);
        }

        #[test]
        fn stm_semigroup(dt1 in -8000.0..8000.0f64, dt2 in -8000.0..8000.0f64) {
            let chief = leo();
            let composed = hcw_stm(&chief, dt2) * hcw_stm(&chief, dt1);
            let direct = hcw_stm(&chief, dt1 + dt2);
            let scale = direct.abs().max().max(1.0);
            prop_assert!((composed - direct).abs().max() <= 1e-10 * scale);
        }

        #[test]
        fn drift_formulas_are_quadratic(p in bounded_params(), k in 0.1..10.0f64) {
            let chief = leo();
            let base = drift_rate(&p, &chief);
            let scaled = drift_rate(&p.scaled(k), &chief);
            prop_assert!((scaled - k * k * base).abs() <= 1e-12 * scaled.abs().max(1e-300));
            let rho = p.rho_y_m;
            let d1 = drift_per_orbit_pco(rho, p.alpha_x_rad, &chief);
            let d2 = drift_per_orbit_pco(k * rho, p.alpha_x_rad, &chief);
            prop_assert!((d2 - k * k * d1).abs() <= 1e-12 * d2.abs());
        }

        #[test]
        fn drift_free_state_matches_its_params(p in bounded_params(), t in 0.0..6000.0f64) {
            let chief = leo();
            let s = params_to_state(&p, &chief, t);
            let from_state = drift_rate(&state_to_params(&s, &chief), &chief);
            let from_params = drift_rate(&p, &chief);
            prop_assert!((from_state - from_params).abs() <= 1e-12_f64.max(1e-9 * from_params.abs()));
        }
    }

    #[test]
    fn pco_rate_over_one_period_versus_per_orbit_formula() {
        // Integrating the rate formula over a period with the PCO parameters
        // gives (2/3)(3.5 + 3 cos a + 0.75 cos 2a)/(2 + cos 2a) times the
        // per-orbit formula; the two are not interchangeable.
        let chief = leo();
        for k in 0..12 {
            let alpha = k as f64 * TAU / 12.0;
            let params = RelativeOrbitParams::pco(100.0, alpha);
            let integrated = drift_rate(&params, &chief) * chief.period_s();
            let per_orbit = drift_per_orbit_pco(100.0, alpha, &chief);
            let expected = (2.0 / 3.0) * (3.5 + 3.0 * alpha.cos() + 0.75 * (2.0 * alpha).cos())
                / (2.0 + (2.0 * alpha).cos());
            assert_relative_eq!(integrated / per_orbit, expected, max_relative = 1e-12);
        }
    }
}
