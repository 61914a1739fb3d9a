//! Benchmark configurations: Marshak wave, steady radiative shocks and a
//! one-dimensional ICF-like implosion, plus reference-profile ingestion.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::Mesh1D;
use crate::hyperbolic::{HydroBoundaries, HydroBoundary};
use crate::parabolic::{RadiationBoundaries, RadiationBoundary};
use crate::thermo::{check_admissible, FullState, OpacityLaw, OracleParams};

/// Physical constants of the benchmark suite (cm, g, sh, keV, GJ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitConstants {
    /// Speed of light, cm/sh.
    pub c_light: f64,
    /// Rescaled radiation constant, GJ/(cm³·keV⁴).
    pub a_r: f64,
    /// Rescaled heat capacity, GJ/(keV·g).
    pub cv_tilde: f64,
    pub gamma: f64,
}

impl UnitConstants {
    pub const STANDARD: UnitConstants = UnitConstants {
        c_light: 2.99792458e2,
        a_r: 1.3720172e-2,
        cv_tilde: 0.15,
        gamma: 5.0 / 3.0,
    };

    /// Ideal gas without covolume using the same law for both cross-sections.
    pub fn params(&self, opacity: OpacityLaw) -> OracleParams {
        OracleParams {
            gamma: self.gamma,
            cv_tilde: self.cv_tilde,
            b: 0.0,
            a_r: self.a_r,
            c_light: self.c_light,
            sigma_a: opacity,
            sigma_t: opacity,
        }
    }
}

/// Shipped scenario identifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScenarioId {
    Marshak,
    Shock(ShockCase),
    Icf1d,
}

impl ScenarioId {
    pub const ALL: [ScenarioId; 8] = [
        ScenarioId::Marshak,
        ScenarioId::Shock(ShockCase::Mach1_2),
        ScenarioId::Shock(ShockCase::Mach3),
        ScenarioId::Shock(ShockCase::Mach3Variable),
        ScenarioId::Shock(ShockCase::Mach10),
        ScenarioId::Shock(ShockCase::Mach30),
        ScenarioId::Shock(ShockCase::Mach50),
        ScenarioId::Icf1d,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ScenarioId::Marshak => "marshak",
            ScenarioId::Shock(case) => case.name(),
            ScenarioId::Icf1d => "icf1d",
        }
    }
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScenarioId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| {
                let known: Vec<&str> = ScenarioId::ALL.iter().map(|id| id.name()).collect();
                Error::Config(format!("unknown scenario `{s}` (known: {})", known.join(", ")))
            })
    }
}

/// Steady radiative-shock configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ShockCase {
    Mach1_2,
    Mach3,
    /// Mach 3 with the density- and temperature-dependent opacity.
    Mach3Variable,
    Mach10,
    Mach30,
    Mach50,
}

/// Reference density and temperature of the upstream state.
const SHOCK_RHO_REF: f64 = 1.0;
const SHOCK_T_REF: f64 = 0.1;

impl ShockCase {
    pub fn name(&self) -> &'static str {
        match self {
            ShockCase::Mach1_2 => "mach1.2",
            ShockCase::Mach3 => "mach3",
            ShockCase::Mach3Variable => "mach3-var",
            ShockCase::Mach10 => "mach10",
            ShockCase::Mach30 => "mach30",
            ShockCase::Mach50 => "mach50",
        }
    }

    pub fn mach(&self) -> f64 {
        match self {
            ShockCase::Mach1_2 => 1.2,
            ShockCase::Mach3 | ShockCase::Mach3Variable => 3.0,
            ShockCase::Mach10 => 10.0,
            ShockCase::Mach30 => 30.0,
            ShockCase::Mach50 => 50.0,
        }
    }

    pub fn domain(&self) -> (f64, f64) {
        match self {
            ShockCase::Mach1_2 | ShockCase::Mach3 => (-0.02, 0.02),
            ShockCase::Mach3Variable => (-0.3, 0.3),
            ShockCase::Mach10 => (-2.0, 5.0),
            ShockCase::Mach30 => (-0.1, 0.4),
            ShockCase::Mach50 => (-0.1, 0.6),
        }
    }

    pub fn t_final(&self) -> f64 {
        match self {
            ShockCase::Mach1_2 | ShockCase::Mach3 | ShockCase::Mach30 => 1.0,
            ShockCase::Mach3Variable | ShockCase::Mach50 => 10.0,
            ShockCase::Mach10 => 50.0,
        }
    }

    pub fn gamma(&self) -> f64 {
        match self {
            ShockCase::Mach50 => 1.2,
            _ => 5.0 / 3.0,
        }
    }

    pub fn opacity(&self) -> OpacityLaw {
        match self {
            ShockCase::Mach3Variable | ShockCase::Mach10 => OpacityLaw::PowerLaw {
                sigma0: 500.0,
                rho_ref: SHOCK_RHO_REF,
                rho_exponent: 1.0,
                t_ref: SHOCK_T_REF,
                t_exponent: 3.5,
            },
            _ => OpacityLaw::Constant { sigma: 500.0 },
        }
    }

    pub fn params(&self) -> OracleParams {
        UnitConstants {
            gamma: self.gamma(),
            ..UnitConstants::STANDARD
        }
        .params(self.opacity())
    }
}

/// Primitive description `(rho, v, T, E_r)` of a state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Primitive {
    pub rho: f64,
    pub v: f64,
    pub t: f64,
    pub e_rad: f64,
}

impl Primitive {
    pub fn to_state(&self, params: &OracleParams) -> FullState {
        FullState::from_primitive(self.rho, self.v, self.t, self.e_rad, params)
    }
}

/// A fully specified initial-boundary value problem on a given mesh.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub id: ScenarioId,
    pub mesh: Mesh1D,
    pub params: OracleParams,
    pub initial: Vec<FullState>,
    pub hydro_boundaries: HydroBoundaries,
    pub radiation_boundaries: RadiationBoundaries,
    /// When false only the parabolic stage runs.
    pub hydro_enabled: bool,
    pub t_final: f64,
    pub cfl: f64,
    /// Reference cross-section and radiation energy of the Newton tolerance.
    pub sigma_ref: f64,
    pub er_ref: f64,
}

impl Scenario {
    /// Checks the initial data node by node.
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.initial.len() != self.mesh.len() {
            return Err(Error::Config("initial field does not match the mesh".into()));
        }
        for (i, s) in self.initial.iter().enumerate() {
            let report = check_admissible(s, &self.params);
            if !report.in_a {
                return Err(Error::Inadmissible {
                    node: Some(i),
                    reason: report.describe(),
                });
            }
        }
        Ok(())
    }
}

/// Builds any shipped scenario; radiative shocks use `profile` when given
/// and the Rankine-Hugoniot step otherwise.
pub fn build_scenario(id: ScenarioId, n_points: usize, profile: Option<&ReferenceProfile>) -> Result<Scenario> {
    match id {
        ScenarioId::Marshak => marshak_scenario(n_points),
        ScenarioId::Shock(case) => radiative_shock_scenario(case, n_points, profile),
        ScenarioId::Icf1d => icf1d_scenario(n_points),
    }
}

/// Radiation front driven into cold matter at rest; hydrodynamics frozen.
pub fn marshak_scenario(n_points: usize) -> Result<Scenario> {
    let k = UnitConstants::STANDARD;
    let t_ref = 1.0;
    let params = k.params(OpacityLaw::PowerLaw {
        sigma0: 300.0,
        rho_ref: 1.0,
        rho_exponent: 0.0,
        t_ref,
        t_exponent: 3.0,
    });
    let mesh = Mesh1D::uniform(0.0, 0.025, n_points)?;
    let t0 = 0.01;
    let cold = Primitive {
        rho: 2.0,
        v: 0.0,
        t: t0,
        e_rad: k.a_r * t0.powi(4),
    };
    let e_boundary = k.a_r * t_ref.powi(4);
    Ok(Scenario {
        id: ScenarioId::Marshak,
        initial: vec![cold.to_state(&params); mesh.len()],
        mesh,
        params,
        hydro_boundaries: HydroBoundaries::FREE,
        radiation_boundaries: RadiationBoundaries {
            left: RadiationBoundary::Dirichlet(e_boundary),
            right: RadiationBoundary::Neumann,
        },
        hydro_enabled: false,
        t_final: 0.02,
        cfl: 0.25,
        sigma_ref: 300.0,
        er_ref: e_boundary,
    })
}

/// Far-field states of a steady radiative shock in equilibrium on both sides.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShockJump {
    pub upstream: Primitive,
    pub downstream: Primitive,
}

/// Upstream state at the reference density and temperature moving at
/// `mach` times the gas sound speed, and the downstream state satisfying the
/// jump conditions of mass, momentum (gas plus radiation pressure) and
/// total energy with the radiation enthalpy `4/3 E_r` advected.
pub fn rankine_hugoniot(mach: f64, params: &OracleParams) -> Result<ShockJump> {
    if !(mach > 1.0) {
        return Err(Error::Config(format!("shock Mach number must exceed 1, got {mach}")));
    }
    let a_r = params.a_r;
    let gm1 = params.gamma - 1.0;
    let state = |rho: f64, t: f64| {
        let e = params.cv_tilde * t;
        let p = gm1 * rho * e;
        (e, p)
    };
    let rho0 = SHOCK_RHO_REF;
    let t0 = SHOCK_T_REF;
    let (e0, p0) = state(rho0, t0);
    let u0 = mach * (params.gamma * p0 / rho0).sqrt();
    let er0 = a_r * t0.powi(4);
    let j = rho0 * u0;
    let momentum0 = j * u0 + p0 + er0 / 3.0;
    let energy0 = j * (e0 + p0 / rho0 + 0.5 * u0 * u0) + u0 * 4.0 / 3.0 * er0;

    // Temperature closing the momentum balance at downstream speed u1.
    let temperature_at = |u1: f64| -> f64 {
        let rho1 = j / u1;
        let target = momentum0 - j * u1;
        let total_pressure = |t: f64| rho1 * gm1 * params.cv_tilde * t + a_r * t.powi(4) / 3.0;
        let mut hi = t0;
        while total_pressure(hi) < target {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if total_pressure(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let energy_residual = |u1: f64| -> f64 {
        let t1 = temperature_at(u1);
        let rho1 = j / u1;
        let (e1, p1) = state(rho1, t1);
        let er1 = a_r * t1.powi(4);
        j * (e1 + p1 / rho1 + 0.5 * u1 * u1) + u1 * 4.0 / 3.0 * er1 - energy0
    };

    // The compressive root lies below u0 and above u0 divided by the larger
    // of the gas and radiation-dominated compression limits.
    let samples = 4000;
    let max_compression = 7.0f64.max((params.gamma + 1.0) / gm1);
    let lo_u = u0 / max_compression;
    let hi_u = u0 * (1.0 - 1e-6);
    let du = (hi_u - lo_u) / samples as f64;
    let mut a = lo_u;
    let mut fa = energy_residual(a);
    let mut bracket = None;
    for k in 1..=samples {
        let b = lo_u + du * k as f64;
        let fb = energy_residual(b);
        if fa == 0.0 || fa.signum() != fb.signum() {
            bracket = Some((a, b, fa));
            break;
        }
        a = b;
        fa = fb;
    }
    let (mut lo, mut hi, f_lo) = bracket.ok_or_else(|| Error::Config(format!("no shock solution at Mach {mach}")))?;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if energy_residual(mid).signum() == f_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let u1 = 0.5 * (lo + hi);
    let t1 = temperature_at(u1);
    Ok(ShockJump {
        upstream: Primitive {
            rho: rho0,
            v: u0,
            t: t0,
            e_rad: er0,
        },
        downstream: Primitive {
            rho: j / u1,
            v: u1,
            t: t1,
            e_rad: a_r * t1.powi(4),
        },
    })
}

/// Steady shock at `x = 0` with upstream flow entering from the left.
///
/// With a reference profile the initial data interpolate it and the boundary
/// states are its endpoint values; otherwise the far-field jump is used as a
/// step initial condition.
pub fn radiative_shock_scenario(case: ShockCase, n_points: usize, profile: Option<&ReferenceProfile>) -> Result<Scenario> {
    let params = case.params();
    let (x_lo, x_hi) = case.domain();
    let mesh = Mesh1D::uniform(x_lo, x_hi, n_points)?;
    let initial: Vec<Primitive> = match profile {
        Some(profile) => mesh.nodes().iter().map(|&x| profile.interpolate(x)).collect(),
        None => {
            let jump = rankine_hugoniot(case.mach(), &params)?;
            mesh.nodes()
                .iter()
                .map(|&x| if x < 0.0 { jump.upstream } else { jump.downstream })
                .collect()
        }
    };
    let left = initial[0];
    let right = initial[initial.len() - 1];
    let initial: Vec<FullState> = initial.iter().map(|p| p.to_state(&params)).collect();
    Ok(Scenario {
        id: ScenarioId::Shock(case),
        hydro_boundaries: HydroBoundaries {
            left: HydroBoundary::Dirichlet(initial[0]),
            right: HydroBoundary::Dirichlet(initial[initial.len() - 1]),
        },
        radiation_boundaries: RadiationBoundaries {
            left: RadiationBoundary::Dirichlet(left.e_rad),
            right: RadiationBoundary::Dirichlet(right.e_rad),
        },
        mesh,
        initial,
        hydro_enabled: true,
        t_final: case.t_final(),
        cfl: 1.0,
        sigma_ref: params.sigma_a.evaluate(SHOCK_RHO_REF, SHOCK_T_REF)?,
        er_ref: left.e_rad.max(right.e_rad),
        params,
    })
}

/// Pellet with a dense shell driven by radiation through the boundary.
pub fn icf1d_scenario(n_points: usize) -> Result<Scenario> {
    let k = UnitConstants::STANDARD;
    let sigma_ref = 5e3;
    let params = k.params(OpacityLaw::PowerLaw {
        sigma0: sigma_ref,
        rho_ref: 1.0,
        rho_exponent: 1.0,
        t_ref: 1.0,
        t_exponent: 0.0,
    });
    let r_ext = 0.6;
    let (r_int, r_sh) = (0.13, 0.15);
    let (rho_int, rho_sh, rho_ext) = (5e-4, 3.5, 1e-4);
    let t_int = 2.6e-6;
    let t_ref: f64 = 0.25;
    let e_drive = k.a_r * t_ref.powi(4);
    let mesh = Mesh1D::uniform(-r_ext, r_ext, n_points)?;
    let initial = mesh
        .nodes()
        .iter()
        .map(|&x| {
            let r = x.abs();
            let p = if r < r_int {
                Primitive {
                    rho: rho_int,
                    v: 0.0,
                    t: t_int,
                    e_rad: k.a_r * t_int.powi(4),
                }
            } else if r < r_sh {
                let t = rho_int / rho_sh * t_int;
                Primitive {
                    rho: rho_sh,
                    v: 0.0,
                    t,
                    e_rad: k.a_r * t.powi(4),
                }
            } else {
                Primitive {
                    rho: rho_ext,
                    v: 0.0,
                    t: rho_int / rho_ext * t_int,
                    e_rad: e_drive,
                }
            };
            p.to_state(&params)
        })
        .collect();
    Ok(Scenario {
        id: ScenarioId::Icf1d,
        mesh,
        params,
        initial,
        hydro_boundaries: HydroBoundaries::both(HydroBoundary::Slip),
        radiation_boundaries: RadiationBoundaries {
            left: RadiationBoundary::Dirichlet(e_drive),
            right: RadiationBoundary::Dirichlet(e_drive),
        },
        hydro_enabled: true,
        t_final: 4.0,
        cfl: 1.0,
        sigma_ref,
        er_ref: e_drive,
    })
}

/// Sampled profile with columns `x, rho, v, T, Er`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReferenceProfile {
    pub x: Vec<f64>,
    pub rho: Vec<f64>,
    pub v: Vec<f64>,
    pub t: Vec<f64>,
    pub e_rad: Vec<f64>,
}

const PROFILE_COLUMNS: [&str; 5] = ["x", "rho", "v", "T", "Er"];

impl ReferenceProfile {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Samples a nodal field on its mesh.
    pub fn from_field(mesh: &Mesh1D, u: &[FullState], params: &OracleParams) -> Self {
        let mut profile = ReferenceProfile::default();
        for (&x, s) in mesh.nodes().iter().zip(u) {
            profile.x.push(x);
            profile.rho.push(s.rho);
            profile.v.push(s.velocity());
            profile.t.push(params.temperature_from(s.rho, s.specific_internal_energy()));
            profile.e_rad.push(s.e_rad);
        }
        profile
    }

    /// Parses the CSV format; `#` lines before the header are skipped and
    /// columns other than the five profile columns are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (header_line, header) = loop {
            match lines.next() {
                Some((_, l)) if l.trim_start().starts_with('#') => continue,
                Some(found) => break found,
                None => {
                    return Err(Error::Parse {
                        line: 0,
                        message: "missing header".into(),
                    })
                }
            }
        };
        let names: Vec<&str> = header.split(',').map(str::trim).collect();
        let mut index = [0usize; 5];
        for (slot, want) in index.iter_mut().zip(PROFILE_COLUMNS) {
            *slot = names.iter().position(|n| *n == want).ok_or_else(|| Error::Parse {
                line: header_line + 1,
                message: format!("header lacks column `{want}`"),
            })?;
        }

        let mut profile = ReferenceProfile::default();
        for (line_index, line) in lines {
            let line_no = line_index + 1;
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != names.len() {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected {} fields, found {}", names.len(), fields.len()),
                });
            }
            let mut values = [0.0; 5];
            for (value, &col) in values.iter_mut().zip(&index) {
                *value = fields[col].parse().map_err(|e| Error::Parse {
                    line: line_no,
                    message: format!("column `{}`: {e}", names[col]),
                })?;
            }
            let [x, rho, v, t, e_rad] = values;
            if let Some(&prev) = profile.x.last() {
                if !(x > prev) {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("x = {x} does not increase"),
                    });
                }
            }
            if !(rho > 0.0 && t > 0.0 && e_rad > 0.0 && v.is_finite()) {
                return Err(Error::Parse {
                    line: line_no,
                    message: "inadmissible sample (need rho, T, Er > 0)".into(),
                });
            }
            profile.x.push(x);
            profile.rho.push(rho);
            profile.v.push(v);
            profile.t.push(t);
            profile.e_rad.push(e_rad);
        }
        if profile.len() < 2 {
            return Err(Error::Parse {
                line: header_line + 1,
                message: "a profile needs at least two samples".into(),
            });
        }
        Ok(profile)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(out, "{}", PROFILE_COLUMNS.join(","))?;
        for k in 0..self.len() {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                self.x[k], self.rho[k], self.v[k], self.t[k], self.e_rad[k]
            )?;
        }
        out.flush()?;
        Ok(())
    }

    /// Piecewise-linear interpolation, clamped to the end samples.
    pub fn interpolate(&self, x: f64) -> Primitive {
        let sample = |k: usize| Primitive {
            rho: self.rho[k],
            v: self.v[k],
            t: self.t[k],
            e_rad: self.e_rad[k],
        };
        let last = self.len() - 1;
        if x <= self.x[0] {
            return sample(0);
        }
        if x >= self.x[last] {
            return sample(last);
        }
        let k = self.x.partition_point(|&xk| xk <= x) - 1;
        if self.x[k] == x {
            return sample(k);
        }
        let w = (x - self.x[k]) / (self.x[k + 1] - self.x[k]);
        let lerp = |a: &[f64]| a[k] + w * (a[k + 1] - a[k]);
        Primitive {
            rho: lerp(&self.rho),
            v: lerp(&self.v),
            t: lerp(&self.t),
            e_rad: lerp(&self.e_rad),
        }
    }
}
