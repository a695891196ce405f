//! Station-keeping impulse budgets and mission lifetime.
//!
//! The drift formulas in [`crate::relmotion`] say how fast a wheel member slides
//! along-track; an [`UpkeepModel`] turns that into propellant by assuming a
//! correction law. Two laws are offered so results can be bracketed.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constellation::{PropulsionSpec, DEFAULT_MASS_KG};
use crate::relmotion::{
    drift_per_orbit_pco_scaled, drift_rate_scaled, ChiefOrbit, DriftScale, RelativeOrbitParams,
};

pub const SECONDS_PER_YEAR: f64 = 365.25 * 86_400.0;
pub const DEFAULT_RECONFIG_FRACTION: f64 = 1.0 / 3.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum UpkeepError {
    #[error("annual upkeep must be positive, got {annual_ns} Ns")]
    NonpositiveUpkeep { annual_ns: f64 },
    #[error("corrections_per_orbit must be at least 1")]
    NoCorrections,
    #[error("reconfiguration fraction {0} is outside [0, 1]")]
    BadFraction(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrectionScheme {
    /// Each correction cancels the along-track distance accumulated since the
    /// last one and restores the slot: two burns per correction, each sized to
    /// undo that distance over one orbit.
    #[default]
    CancelAndRestore,
    /// Each correction nulls the instantaneous along-track drift velocity.
    RateNull,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UpkeepModel {
    pub correction_scheme: CorrectionScheme,
    pub corrections_per_orbit: u32,
    pub mass_kg: f64,
    pub drift_scale: DriftScale,
}

impl Default for UpkeepModel {
    fn default() -> Self {
        Self {
            correction_scheme: CorrectionScheme::CancelAndRestore,
            corrections_per_orbit: 1,
            mass_kg: DEFAULT_MASS_KG,
            drift_scale: DriftScale::SemiMajorAxis,
        }
    }
}

impl UpkeepModel {
    pub fn check(&self) -> Result<(), UpkeepError> {
        if self.corrections_per_orbit == 0 {
            return Err(UpkeepError::NoCorrections);
        }
        Ok(())
    }
}

/// Impulse (Ns) spent per orbit to keep a PCO member of radius `rho_m` in its slot.
pub fn impulse_per_orbit(rho_m: f64, alpha_x_rad: f64, chief: &ChiefOrbit, model: &UpkeepModel) -> f64 {
    match model.correction_scheme {
        CorrectionScheme::CancelAndRestore => {
            let drift = drift_per_orbit_pco_scaled(rho_m, alpha_x_rad, chief, model.drift_scale);
            2.0 * model.mass_kg * drift.abs() / chief.period_s()
        }
        CorrectionScheme::RateNull => {
            let params = RelativeOrbitParams::pco(rho_m, alpha_x_rad);
            let rate = drift_rate_scaled(&params, chief, model.drift_scale);
            f64::from(model.corrections_per_orbit) * model.mass_kg * rate.abs()
        }
    }
}

pub fn orbits_per_year(chief: &ChiefOrbit) -> f64 {
    SECONDS_PER_YEAR / chief.period_s()
}

/// Annual station-keeping impulse (Ns/yr).
pub fn annual_budget(rho_m: f64, alpha_x_rad: f64, chief: &ChiefOrbit, model: &UpkeepModel) -> f64 {
    annual_budget_over(rho_m, alpha_x_rad, chief, model, SECONDS_PER_YEAR)
}

/// Station-keeping impulse over a span of `span_s` seconds.
pub fn annual_budget_over(
    rho_m: f64,
    alpha_x_rad: f64,
    chief: &ChiefOrbit,
    model: &UpkeepModel,
    span_s: f64,
) -> f64 {
    impulse_per_orbit(rho_m, alpha_x_rad, chief, model) * (span_s / chief.period_s())
}

/// Years of station keeping left once the initialization cost and the
/// reconfiguration reserve are taken out of the propulsion budget.
pub fn mission_lifetime(
    propulsion: &PropulsionSpec,
    init_cost_ns: f64,
    annual_upkeep_ns: f64,
    reconfig_fraction: f64,
) -> Result<f64, UpkeepError> {
    if !(annual_upkeep_ns > 0.0) {
        return Err(UpkeepError::NonpositiveUpkeep {
            annual_ns: annual_upkeep_ns,
        });
    }
    if !(0.0..=1.0).contains(&reconfig_fraction) {
        return Err(UpkeepError::BadFraction(reconfig_fraction));
    }
    let total = propulsion.total_impulse_ns;
    let left = total - init_cost_ns - reconfig_fraction * total;
    Ok((left / annual_upkeep_ns).max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Allocation {
    pub init_ns: f64,
    pub reconfig_reserve_ns: f64,
    pub upkeep_ns: f64,
}

impl Allocation {
    pub fn total_ns(&self) -> f64 {
        self.init_ns + self.reconfig_reserve_ns + self.upkeep_ns
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetReport {
    pub propulsion: String,
    pub total_impulse_ns: f64,
    pub rho_m: f64,
    pub impulse_per_orbit_ns: f64,
    pub impulse_per_year_ns: f64,
    pub lifetime_years: f64,
    pub allocation: Allocation,
    pub notes: Vec<String>,
}

/// Budget for one propulsion option.
///
/// `annual_override_ns` replaces the model's annual figure, e.g. to evaluate a
/// quoted upkeep number directly. Allocation entries are clamped in order
/// (init, reserve, upkeep) so they never exceed the total.
#[allow(clippy::too_many_arguments)]
pub fn budget_report(
    propulsion: &PropulsionSpec,
    rho_m: f64,
    alpha_x_rad: f64,
    chief: &ChiefOrbit,
    model: &UpkeepModel,
    init_cost_ns: f64,
    reconfig_fraction: f64,
    annual_override_ns: Option<f64>,
) -> Result<BudgetReport, UpkeepError> {
    model.check()?;
    let per_orbit = impulse_per_orbit(rho_m, alpha_x_rad, chief, model);
    let per_year = annual_override_ns.unwrap_or(per_orbit * orbits_per_year(chief));
    let lifetime = mission_lifetime(propulsion, init_cost_ns, per_year, reconfig_fraction)?;

    let total = propulsion.total_impulse_ns;
    let init = init_cost_ns.clamp(0.0, total);
    let reserve = (reconfig_fraction * total).min(total - init);
    let upkeep = (per_year * lifetime).clamp(0.0, total - init - reserve);

    let mut notes = Vec::new();
    if annual_override_ns.is_some() {
        notes.push("annual upkeep taken from the configured override, not the drift model".to_string());
        notes.push("the override is read as Ns of impulse even when quoted in Nm, which is a torque unit".to_string());
    }
    if init_cost_ns > total {
        notes.push(format!("initialization cost {init_cost_ns:.3} Ns exceeds the total impulse"));
    }

    Ok(BudgetReport {
        propulsion: propulsion.name.clone(),
        total_impulse_ns: total,
        rho_m,
        impulse_per_orbit_ns: per_orbit,
        impulse_per_year_ns: per_year,
        lifetime_years: lifetime,
        allocation: Allocation {
            init_ns: init,
            reconfig_reserve_ns: reserve,
            upkeep_ns: upkeep,
        },
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constellation::find_propulsion;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn leo() -> ChiefOrbit {
        ChiefOrbit::new(6.778e6).unwrap()
    }

    fn mips() -> PropulsionSpec {
        find_propulsion("VACCO MIPS").unwrap()
    }

    #[test]
    fn zero_radius_costs_nothing() {
        for scheme in [CorrectionScheme::CancelAndRestore, CorrectionScheme::RateNull] {
            let model = UpkeepModel {
                correction_scheme: scheme,
                ..Default::default()
            };
            assert_eq!(impulse_per_orbit(0.0, 0.3, &leo(), &model), 0.0);
        }
    }

    #[test]
    fn per_orbit_matches_hand_chain() {
        let chief = leo();
        let a: f64 = 6.778e6;
        let n = (3.986_004_418e14 / a.powi(3)).sqrt();
        let period = 2.0 * PI / n;
        let drift = 9.0 * PI * 100.0 * 100.0 / (2.0 * a) * 3.0;
        let expected = 2.0 * 10.0 * drift / period;
        let got = impulse_per_orbit(100.0, 0.0, &chief, &UpkeepModel::default());
        assert!((got - expected).abs() <= 1e-12 * expected);
    }

    #[test]
    fn radius_ratio_gives_hundredfold_cost() {
        let chief = leo();
        for scheme in [CorrectionScheme::CancelAndRestore, CorrectionScheme::RateNull] {
            let model = UpkeepModel {
                correction_scheme: scheme,
                ..Default::default()
            };
            let r = annual_budget(1000.0, 0.0, &chief, &model) / annual_budget(100.0, 0.0, &chief, &model);
            assert!((r - 100.0).abs() <= 1e-12, "{r}");
        }
    }

    #[test]
    fn zero_length_span_is_free() {
        assert_eq!(annual_budget_over(100.0, 0.0, &leo(), &UpkeepModel::default(), 0.0), 0.0);
    }

    #[test]
    fn quoted_inputs_give_about_five_years() {
        let years = mission_lifetime(&mips(), 3.9, 31.0, DEFAULT_RECONFIG_FRACTION).unwrap();
        assert!((years - 5.2).abs() < 0.5, "{years}");
        let big = find_propulsion("Aerojet MPS-120").unwrap();
        let years = mission_lifetime(&big, 3.9, 31.0, DEFAULT_RECONFIG_FRACTION).unwrap();
        assert!(years > 10.0 && (years - 17.08).abs() < 0.05, "{years}");
    }

    #[test]
    fn huge_upkeep_exhausts_lifetime() {
        let y = mission_lifetime(&mips(), 3.9, 1e300, DEFAULT_RECONFIG_FRACTION).unwrap();
        assert!(y < 1e-290);
        assert!(matches!(
            mission_lifetime(&mips(), 3.9, 0.0, DEFAULT_RECONFIG_FRACTION),
            Err(UpkeepError::NonpositiveUpkeep { .. })
        ));
        assert_eq!(mission_lifetime(&mips(), 400.0, 1.0, DEFAULT_RECONFIG_FRACTION).unwrap(), 0.0);
    }

    #[test]
    fn altitude_reading_lands_near_quoted_upkeep() {
        let model = UpkeepModel {
            drift_scale: DriftScale::Altitude,
            ..Default::default()
        };
        let chief = ChiefOrbit::from_altitude(400e3).unwrap();
        let annual = annual_budget(100.0, 0.0, &chief, &model);
        assert!(annual > 3.1 && annual < 310.0, "{annual}");
    }

    #[test]
    fn report_clamps_allocation() {
        let chief = leo();
        let r = budget_report(&mips(), 100.0, 0.0, &chief, &UpkeepModel::default(), 3.9, 1.0 / 3.0, Some(31.0))
            .unwrap();
        assert!(r.allocation.total_ns() <= r.total_impulse_ns + 1e-9);
        assert!(r.notes.iter().any(|n| n.contains("Nm")));
        let r = budget_report(&mips(), 100.0, 0.0, &chief, &UpkeepModel::default(), 500.0, 0.5, None).unwrap();
        assert_eq!(r.lifetime_years, 0.0);
        assert!(r.allocation.total_ns() <= r.total_impulse_ns);
    }

    proptest! {
        #[test]
        fn lifetime_monotone(total in 50.0..2000.0f64, extra in 0.0..500.0f64,
                             init in 0.0..10.0f64, upkeep in 0.1..100.0f64, more in 0.0..50.0f64,
                             frac in 0.0..0.9f64, dfrac in 0.0..0.1f64) {
            let p = |t: f64| PropulsionSpec { name: "x".into(), total_impulse_ns: t };
            let base = mission_lifetime(&p(total), init, upkeep, frac).unwrap();
            prop_assert!(base >= 0.0);
            prop_assert!(mission_lifetime(&p(total + extra), init, upkeep, frac).unwrap() >= base);
            prop_assert!(mission_lifetime(&p(total), init, upkeep + more, frac).unwrap() <= base);
            prop_assert!(mission_lifetime(&p(total), init, upkeep, frac + dfrac).unwrap() <= base);
        }

        #[test]
        fn annual_budget_is_quadratic(rho in 1.0..1000.0f64, k in 0.1..10.0f64, ax in 0.0..std::f64::consts::TAU) {
            let chief = leo();
            let m = UpkeepModel::default();
            let b = annual_budget(rho, ax, &chief, &m);
            let s = annual_budget(k * rho, ax, &chief, &m);
            prop_assert!((s - k * k * b).abs() <= 1e-12 * s);
        }

        #[test]
        fn allocation_never_exceeds_total(init in 0.0..400.0f64, frac in 0.0..1.0f64, annual in 0.01..100.0f64) {
            let r = budget_report(&mips(), 100.0, 0.0, &leo(), &UpkeepModel::default(), init, frac, Some(annual)).unwrap();
            prop_assert!(r.allocation.total_ns() <= r.total_impulse_ns * (1.0 + 1e-12));
            prop_assert!(r.allocation.upkeep_ns >= 0.0 && r.allocation.reconfig_reserve_ns >= 0.0);
        }
    }
}
