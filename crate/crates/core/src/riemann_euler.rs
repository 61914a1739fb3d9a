//! Upper bound on the maximum wave speed of the Euler Riemann problem with a
//! passively advected radiation energy.
//!
//! Each side is extended with `Gamma = rho + p (1 - b rho) / e`, which turns
//! the problem into a two-gamma covolume gas Riemann problem. The contact
//! pressure is bracketed from both sides and the extreme wave speeds are
//! evaluated at the upper end of the bracket.

use crate::bracket::concave_increasing_root_from;
use crate::error::{Error, Result};
use crate::thermo::{check_admissible, FullState, OracleParams};

const REL_TOL: f64 = 1e-12;
const MAX_ITER: usize = 100;

/// State augmented with the extension variable `Gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtendedState {
    pub rho: f64,
    pub mom_n: f64,
    pub e_mech: f64,
    pub e_rad: f64,
    pub gamma_big: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveType {
    Shock,
    Rarefaction,
    Vacuum,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveSpeedBound {
    pub lambda_max: f64,
    /// Upper end of the bracket on the contact pressure.
    pub p_star: f64,
    pub wave_types: (WaveType, WaveType),
}

/// Normal projection for the unit direction `n = ±1`; the identity up to the
/// sign of the momentum in one dimension.
pub fn project_pi1(u: &FullState, n: f64) -> FullState {
    FullState {
        mom: u.mom * n,
        ..*u
    }
}

/// Lifts an admissible state by appending `Gamma`.
pub fn extend(u: &FullState, params: &OracleParams) -> Result<ExtendedState> {
    let side = Side::from_state(u, params)?;
    Ok(ExtendedState {
        rho: u.rho,
        mom_n: u.mom,
        e_mech: u.e_mech,
        e_rad: u.e_rad,
        gamma_big: side.gamma * u.rho,
    })
}

/// Drops `Gamma`; a left inverse of [`extend`].
pub fn restrict(w: &ExtendedState) -> FullState {
    FullState {
        rho: w.rho,
        mom: w.mom_n,
        e_mech: w.e_mech,
        e_rad: w.e_rad,
    }
}

/// Primitive data of one side with its local ratio of specific heats.
#[derive(Debug, Clone, Copy)]
struct Side {
    rho: f64,
    v: f64,
    p: f64,
    gamma: f64,
    b: f64,
    c: f64,
}

impl Side {
    fn from_state(u: &FullState, params: &OracleParams) -> Result<Self> {
        let report = check_admissible(u, params);
        if !report.in_a {
            return Err(Error::Inadmissible {
                node: None,
                reason: report.describe(),
            });
        }
        let e = u.specific_internal_energy();
        let p = params.pressure_from(u.rho, e);
        let covol = 1.0 - params.b * u.rho;
        let gamma = 1.0 + p * covol / (u.rho * e);
        Ok(Side {
            rho: u.rho,
            v: u.velocity(),
            p,
            gamma,
            b: params.b,
            c: (gamma * p / (u.rho * covol)).sqrt(),
        })
    }

    fn covolume(&self) -> f64 {
        1.0 - self.b * self.rho
    }

    fn shock_a(&self) -> f64 {
        2.0 * self.covolume() / ((self.gamma + 1.0) * self.rho)
    }

    /// Velocity increment across the wave and its derivative in `p`.
    fn wave(&self, p: f64) -> (f64, f64) {
        if p > self.p {
            let a = self.shock_a();
            let b = (self.gamma - 1.0) / (self.gamma + 1.0) * self.p;
            let root = (a / (p + b)).sqrt();
            let value = (p - self.p) * root;
            let deriv = root * (1.0 - 0.5 * (p - self.p) / (p + b));
            (value, deriv)
        } else {
            let q = (self.gamma - 1.0) / (2.0 * self.gamma);
            let k = 2.0 * self.c * self.covolume() / (self.gamma - 1.0);
            let scaled = (p / self.p).powf(q);
            let value = k * (scaled - 1.0);
            let deriv = k * q * scaled / p;
            (value, deriv)
        }
    }

    /// Speed factor `W(p*)` such that the outer wave moves at `v ∓ c W`.
    fn speed_factor(&self, p_star: f64) -> f64 {
        let excess = ((p_star - self.p) / self.p).max(0.0);
        (1.0 + (self.gamma + 1.0) / (2.0 * self.gamma) * excess).sqrt()
    }

    fn wave_type(&self, p_star: f64) -> WaveType {
        if p_star > self.p {
            WaveType::Shock
        } else {
            WaveType::Rarefaction
        }
    }
}

struct Problem {
    left: Side,
    right: Side,
}

impl Problem {
    fn new(ul: &FullState, ur: &FullState, params: &OracleParams) -> Result<Self> {
        Ok(Problem {
            left: Side::from_state(ul, params)?,
            right: Side::from_state(ur, params)?,
        })
    }

    fn phi(&self, p: f64) -> (f64, f64) {
        let (fl, dl) = self.left.wave(p);
        let (fr, dr) = self.right.wave(p);
        (fl + fr + (self.right.v - self.left.v), dl + dr)
    }

    /// Contact pressure when both waves are rarefactions and both sides share
    /// the same exponent, where the pressure function inverts in closed form.
    fn two_rarefaction_pressure(&self) -> Option<f64> {
        let (l, r) = (&self.left, &self.right);
        if l.gamma != r.gamma {
            return None;
        }
        let q = (l.gamma - 1.0) / (2.0 * l.gamma);
        let k = |s: &Side| 2.0 * s.c * s.covolume() / (s.gamma - 1.0);
        let (kl, kr) = (k(l), k(r));
        let numerator = kl + kr - (r.v - l.v);
        let denominator = kl * l.p.powf(-q) + kr * r.p.powf(-q);
        Some((numerator / denominator).powf(1.0 / q))
    }

    /// Two-shock majorant of the contact pressure.
    fn majorant(&self) -> f64 {
        let sl = (0.5 * self.left.shock_a()).sqrt();
        let sr = (0.5 * self.right.shock_a()).sqrt();
        let a = sl + sr;
        let b = self.right.v - self.left.v;
        let c = -(sl * self.left.p + sr * self.right.p);
        let x = (-b + (b * b - 4.0 * a * c).sqrt()) / (2.0 * a);
        let p_max = self.left.p.max(self.right.p);
        p_max.max(x * x)
    }
}

/// Guaranteed bound on the largest wave speed of the Riemann problem with
/// left state `ul` and right state `ur` along the direction `+1`.
pub fn lambda_max_euler(ul: &FullState, ur: &FullState, params: &OracleParams) -> Result<WaveSpeedBound> {
    let problem = Problem::new(ul, ur, params)?;
    let (l, r) = (&problem.left, &problem.right);

    if problem.phi(0.0).0 >= 0.0 {
        let lambda_l = l.v - l.c;
        let lambda_r = r.v + r.c;
        return Ok(WaveSpeedBound {
            lambda_max: lambda_l.abs().max(lambda_r.abs()),
            p_star: 0.0,
            wave_types: (WaveType::Vacuum, WaveType::Vacuum),
        });
    }

    let p_min = l.p.min(r.p);
    let p_max = l.p.max(r.p);
    let at_min = problem.phi(p_min);
    let bracket = if at_min.0 >= 0.0 {
        if let Some(p_star) = problem.two_rarefaction_pressure() {
            // Both outer waves are rarefaction heads moving at `v ∓ c`.
            return Ok(WaveSpeedBound {
                lambda_max: (l.v - l.c).abs().max((r.v + r.c).abs()),
                p_star: p_star.clamp(0.0, p_min),
                wave_types: (WaveType::Rarefaction, WaveType::Rarefaction),
            });
        }
        concave_increasing_root_from(|p| problem.phi(p), (0.0, problem.phi(0.0)), (p_min, at_min), REL_TOL, MAX_ITER)
    } else {
        let at_max = problem.phi(p_max);
        if at_max.0 >= 0.0 {
            concave_increasing_root_from(|p| problem.phi(p), (p_min, at_min), (p_max, at_max), REL_TOL, MAX_ITER)
        } else {
            let upper = problem.majorant();
            concave_increasing_root_from(|p| problem.phi(p), (p_max, at_max), (upper, problem.phi(upper)), REL_TOL, MAX_ITER)
        }
    };
    let p_star = bracket.hi;

    let lambda_l = l.v - l.c * l.speed_factor(p_star);
    let lambda_r = r.v + r.c * r.speed_factor(p_star);
    Ok(WaveSpeedBound {
        lambda_max: lambda_l.abs().max(lambda_r.abs()),
        p_star,
        wave_types: (l.wave_type(p_star), r.wave_type(p_star)),
    })
}

/// Cheap upper bound on the contact pressure obtained by assuming two shocks.
pub fn two_shock_majorant(ul: &FullState, ur: &FullState, params: &OracleParams) -> Result<f64> {
    Ok(Problem::new(ul, ur, params)?.majorant())
}
