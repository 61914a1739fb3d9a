//! Equation-of-state oracle, state algebra and admissibility tests.
//!
//! States carry the conserved unknowns `(rho, mom, e_mech, e_rad)` in the
//! units of the benchmark suite: g/cm³, g/(cm²·sh), GJ/cm³ and GJ/cm³.
//! The oracle is an ideal gas with covolume `b` and a zero cold curve.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Conserved unknowns at one degree of freedom.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FullState {
    pub rho: f64,
    pub mom: f64,
    pub e_mech: f64,
    pub e_rad: f64,
}

impl FullState {
    pub const fn new(rho: f64, mom: f64, e_mech: f64, e_rad: f64) -> Self {
        Self {
            rho,
            mom,
            e_mech,
            e_rad,
        }
    }

    /// Builds a state from primitive variables `(rho, v, T, E_r)`.
    pub fn from_primitive(rho: f64, velocity: f64, temperature: f64, e_rad: f64, params: &OracleParams) -> Self {
        let e = params.internal_energy_from_temperature(rho, temperature);
        Self {
            rho,
            mom: rho * velocity,
            e_mech: rho * (e + 0.5 * velocity * velocity),
            e_rad,
        }
    }

    #[inline]
    pub fn velocity(&self) -> f64 {
        self.mom / self.rho
    }

    #[inline]
    pub fn kinetic_energy(&self) -> f64 {
        0.5 * self.mom * self.mom / self.rho
    }

    /// Internal energy per unit volume, `E_m - ½ rho v²`.
    #[inline]
    pub fn internal_energy(&self) -> f64 {
        self.e_mech - self.kinetic_energy()
    }

    /// Specific internal energy `e(U)`.
    #[inline]
    pub fn specific_internal_energy(&self) -> f64 {
        self.internal_energy() / self.rho
    }

    #[inline]
    pub fn total_energy(&self) -> f64 {
        self.e_mech + self.e_rad
    }

    pub fn is_finite(&self) -> bool {
        self.rho.is_finite() && self.mom.is_finite() && self.e_mech.is_finite() && self.e_rad.is_finite()
    }

    pub(crate) fn scaled_add(&self, weight: f64, other: &FullState, other_weight: f64) -> FullState {
        FullState {
            rho: weight * self.rho + other_weight * other.rho,
            mom: weight * self.mom + other_weight * other.mom,
            e_mech: weight * self.e_mech + other_weight * other.e_mech,
            e_rad: weight * self.e_rad + other_weight * other.e_rad,
        }
    }
}

/// Unknowns of the radiation-pressure stage: `e_t = E_r + ½ rho v²`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ReducedState {
    pub rho: f64,
    pub mom: f64,
    pub e_t: f64,
}

impl ReducedState {
    #[inline]
    pub fn velocity(&self) -> f64 {
        self.mom / self.rho
    }

    /// Radiation energy recovered from `e_t`.
    #[inline]
    pub fn e_rad(&self) -> f64 {
        self.e_t - 0.5 * self.mom * self.mom / self.rho
    }

    #[inline]
    pub fn radiation_pressure(&self) -> f64 {
        self.e_rad() / 3.0
    }
}

/// Drops the internal energy: `E_t = E_r + ½ rho v²`.
pub fn reduce(u: &FullState) -> ReducedState {
    ReducedState {
        rho: u.rho,
        mom: u.mom,
        e_t: u.e_rad + u.kinetic_energy(),
    }
}

/// Rebuilds a full state from a reduced one and a frozen internal energy `eps0`.
pub fn expand(w: &ReducedState, eps0: f64) -> FullState {
    let kinetic = 0.5 * w.mom * w.mom / w.rho;
    FullState {
        rho: w.rho,
        mom: w.mom,
        e_mech: eps0 + kinetic,
        e_rad: w.e_t - kinetic,
    }
}

/// `base^exponent`, using repeated multiplication for integer and
/// half-integer exponents of moderate size.
fn power(base: f64, exponent: f64) -> f64 {
    let whole = exponent as i32;
    if whole as f64 == exponent {
        return match whole {
            0 => 1.0,
            1 => base,
            2 => base * base,
            3 => base * base * base,
            _ => base.powi(whole),
        };
    }
    let twice = 2.0 * exponent;
    if twice as i32 as f64 == twice {
        let root = base.sqrt();
        let integer = power(base, exponent.trunc());
        if exponent > 0.0 {
            integer * root
        } else {
            integer / root
        }
    } else {
        base.powf(exponent)
    }
}

/// Cross-section law `sigma(rho, T)` in 1/cm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OpacityLaw {
    Constant {
        sigma: f64,
    },
    /// `sigma0 * (rho / rho_ref)^rho_exponent * (t_ref / T)^t_exponent`.
    PowerLaw {
        sigma0: f64,
        rho_ref: f64,
        rho_exponent: f64,
        t_ref: f64,
        t_exponent: f64,
    },
}

impl OpacityLaw {
    #[inline]
    pub fn evaluate(&self, rho: f64, temperature: f64) -> Result<f64> {
        match *self {
            OpacityLaw::Constant { sigma } => Ok(sigma),
            OpacityLaw::PowerLaw {
                sigma0,
                rho_ref,
                rho_exponent,
                t_ref,
                t_exponent,
            } => {
                if t_exponent > 0.0 && temperature <= 0.0 {
                    return Err(Error::SingularOpacity { temperature });
                }
                let rho_factor = if rho_exponent == 0.0 {
                    1.0
                } else {
                    power(rho / rho_ref, rho_exponent)
                };
                let t_factor = if t_exponent == 0.0 {
                    1.0
                } else {
                    power(t_ref / temperature, t_exponent)
                };
                Ok(sigma0 * rho_factor * t_factor)
            }
        }
    }

    /// `d sigma / dT` at fixed density.
    pub fn temperature_derivative(&self, rho: f64, temperature: f64) -> Result<f64> {
        Ok(self.evaluate_with_derivative(rho, temperature)?.1)
    }

    /// `(sigma, d sigma / dT)` at fixed density.
    #[inline]
    pub fn evaluate_with_derivative(&self, rho: f64, temperature: f64) -> Result<(f64, f64)> {
        match *self {
            OpacityLaw::Constant { sigma } => Ok((sigma, 0.0)),
            OpacityLaw::PowerLaw { t_exponent, .. } => {
                let sigma = self.evaluate(rho, temperature)?;
                let derivative = if t_exponent == 0.0 {
                    0.0
                } else {
                    -t_exponent * sigma / temperature
                };
                Ok((sigma, derivative))
            }
        }
    }
}

/// Ideal-gas oracle with covolume plus the gray radiation constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleParams {
    pub gamma: f64,
    /// Rescaled average heat capacity, GJ/(keV·g).
    pub cv_tilde: f64,
    /// Covolume, cm³/g.
    pub b: f64,
    /// Rescaled radiation constant, GJ/(cm³·keV⁴).
    pub a_r: f64,
    /// Speed of light, cm/sh.
    pub c_light: f64,
    pub sigma_a: OpacityLaw,
    pub sigma_t: OpacityLaw,
}

impl OracleParams {
    pub fn validate(&self) -> Result<()> {
        let checks = [
            (self.gamma > 1.0, "gamma must exceed 1"),
            (self.cv_tilde > 0.0, "cv_tilde must be positive"),
            (self.b >= 0.0, "covolume must be nonnegative"),
            (self.a_r > 0.0, "a_r must be positive"),
            (self.c_light > 0.0, "c_light must be positive"),
        ];
        for (ok, msg) in checks {
            if !ok {
                return Err(Error::Config(msg.to_string()));
            }
        }
        Ok(())
    }

    /// Cold curve; identically zero for the ideal gas.
    #[inline]
    pub fn cold_energy(&self, _rho: f64) -> f64 {
        0.0
    }

    /// Average heat capacity at constant volume; constant for the ideal gas.
    #[inline]
    pub fn heat_capacity(&self, _rho: f64, _temperature: f64) -> f64 {
        self.cv_tilde
    }

    #[inline]
    pub fn internal_energy_from_temperature(&self, rho: f64, temperature: f64) -> f64 {
        self.heat_capacity(rho, temperature) * temperature + self.cold_energy(rho)
    }

    /// Pressure from `(rho, e)` without admissibility checks.
    #[inline]
    pub fn pressure_from(&self, rho: f64, e: f64) -> f64 {
        (self.gamma - 1.0) * rho * (e - self.cold_energy(rho)) / (1.0 - self.b * rho)
    }

    /// Temperature from `(rho, e)` without admissibility checks.
    #[inline]
    pub fn temperature_from(&self, rho: f64, e: f64) -> f64 {
        (e - self.cold_energy(rho)) / self.cv_tilde
    }

    /// Squared sound speed of the covolume gas.
    #[inline]
    pub fn sound_speed_sq(&self, rho: f64, p: f64) -> f64 {
        self.gamma * p / (rho * (1.0 - self.b * rho))
    }
}

/// Conditions defining the sets B(b) and A(b).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    NonFinite,
    NonPositiveDensity,
    MaximumCompressibility,
    BelowColdCurve,
    NonPositiveRadiationEnergy,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdmissibilityReport {
    pub in_b: bool,
    pub in_a: bool,
    pub violated: Vec<Violation>,
}

impl AdmissibilityReport {
    pub fn describe(&self) -> String {
        let names: Vec<_> = self.violated.iter().map(|v| format!("{v:?}")).collect();
        names.join(", ")
    }
}

/// Membership in B(b) and A(b) with strict inequalities.
pub fn check_admissible(u: &FullState, params: &OracleParams) -> AdmissibilityReport {
    check_admissible_with_tolerance(u, params, 0.0)
}

/// Same as [`check_admissible`] but every inequality is relaxed by `tolerance`.
/// Only meant for diagnostics; the solver itself always uses zero.
pub fn check_admissible_with_tolerance(u: &FullState, params: &OracleParams, tolerance: f64) -> AdmissibilityReport {
    let mut violated = Vec::new();
    if !u.is_finite() {
        violated.push(Violation::NonFinite);
        return AdmissibilityReport {
            in_b: false,
            in_a: false,
            violated,
        };
    }
    if u.rho <= -tolerance {
        violated.push(Violation::NonPositiveDensity);
    }
    if 1.0 - params.b * u.rho <= -tolerance {
        violated.push(Violation::MaximumCompressibility);
    }
    // e(U) is only meaningful for positive density.
    if u.rho > 0.0 {
        if u.specific_internal_energy() - params.cold_energy(u.rho) <= -tolerance {
            violated.push(Violation::BelowColdCurve);
        }
    } else {
        violated.push(Violation::BelowColdCurve);
    }
    let in_b = violated.is_empty();
    if u.e_rad <= -tolerance {
        violated.push(Violation::NonPositiveRadiationEnergy);
    }
    AdmissibilityReport {
        in_b,
        in_a: violated.is_empty(),
        violated,
    }
}

pub(crate) fn require_in_b(u: &FullState, params: &OracleParams) -> Result<()> {
    let report = check_admissible(u, params);
    if report.in_b {
        Ok(())
    } else {
        Err(Error::Inadmissible {
            node: None,
            reason: report.describe(),
        })
    }
}

/// Mechanical pressure `p = (γ-1) rho e / (1 - b rho)`.
pub fn pressure(u: &FullState, params: &OracleParams) -> Result<f64> {
    require_in_b(u, params)?;
    Ok(params.pressure_from(u.rho, u.specific_internal_energy()))
}

/// Temperature in keV, `T = (e - e_cold) / c_v`.
pub fn temperature(u: &FullState, params: &OracleParams) -> Result<f64> {
    require_in_b(u, params)?;
    Ok(params.temperature_from(u.rho, u.specific_internal_energy()))
}

/// `(sigma_a, sigma_t)` in 1/cm.
pub fn opacities(rho: f64, temperature: f64, params: &OracleParams) -> Result<(f64, f64)> {
    Ok((
        params.sigma_a.evaluate(rho, temperature)?,
        params.sigma_t.evaluate(rho, temperature)?,
    ))
}
