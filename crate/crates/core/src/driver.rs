//! Time loop, error metrics, convergence tables and field output.

use std::io::Write;
use std::path::Path;

use crate::conservation::{magnitudes, totals, Conserved};
use crate::error::{Error, Result};
use crate::grid::{build_ops, Mesh1D};
use crate::hyperbolic::{additive_combine, check_field, compute_dt, compute_viscosities};
use crate::parabolic::{parabolic_step, ParabolicConfig};
use crate::scenarios::{build_scenario, ReferenceProfile, Scenario, ScenarioId};
use crate::thermo::{FullState, OracleParams};

/// Controls of a single simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub cfl: f64,
    pub t_final: f64,
    /// Relative Picard tolerance.
    pub eps: f64,
    /// Verify admissibility of every intermediate field.
    pub check_idp: bool,
    pub max_steps: usize,
}

impl RunConfig {
    /// Defaults taken from the scenario.
    pub fn for_scenario(scenario: &Scenario) -> Self {
        RunConfig {
            cfl: scenario.cfl,
            t_final: scenario.t_final,
            eps: ParabolicConfig::default().eps_picard,
            check_idp: false,
            max_steps: usize::MAX,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::Config(format!("cfl must lie in (0, 1], got {}", self.cfl)));
        }
        if !(self.eps > 0.0) {
            return Err(Error::Config(format!("eps must be positive, got {}", self.eps)));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(Error::Config(format!("final time must be finite and nonnegative, got {}", self.t_final)));
        }
        Ok(())
    }
}

/// Per-step record written to the diagnostics stream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepDiagnostics {
    pub step: usize,
    /// Time at the end of the step.
    pub t: f64,
    pub dt: f64,
    pub dt1: f64,
    pub dt2: f64,
    pub theta: f64,
    pub picard_iterations: usize,
    /// Change of the totals not explained by the boundary influx, relative
    /// to `Σ m_i |u_i|` at the start of the step.
    pub drift: Conserved,
    /// Amount entering through the boundary during the step.
    pub influx: Conserved,
    pub rho_min: f64,
    pub rho_max: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub er_min: f64,
    pub er_max: f64,
}

impl StepDiagnostics {
    pub const CSV_HEADER: &'static str = "step,t,dt,dt1,dt2,theta,picard,drift_mass,drift_momentum,drift_energy,\
influx_mass,influx_momentum,influx_energy,rho_min,rho_max,T_min,T_max,Er_min,Er_max";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{:e},{:e},{:e},{:e},{:e},{},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
            self.step,
            self.t,
            self.dt,
            self.dt1,
            self.dt2,
            self.theta,
            self.picard_iterations,
            self.drift.mass,
            self.drift.momentum,
            self.drift.energy,
            self.influx.mass,
            self.influx.momentum,
            self.influx.energy,
            self.rho_min,
            self.rho_max,
            self.t_min,
            self.t_max,
            self.er_min,
            self.er_max
        )
    }
}

/// Final state of a run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub u: Vec<FullState>,
    pub t: f64,
    pub steps: usize,
    /// Largest per-step drift of each conserved quantity.
    pub max_drift: Conserved,
}

fn temperatures(u: &[FullState], params: &OracleParams) -> Vec<f64> {
    u.iter()
        .map(|s| params.temperature_from(s.rho, s.specific_internal_energy()))
        .collect()
}

fn with_step(step: usize, time: f64) -> impl Fn(Error) -> Error {
    move |source| Error::Step {
        step,
        time,
        source: Box::new(source),
    }
}

/// Advances the scenario to the final time, calling `observer` after every
/// step with its diagnostics and the new field.
pub fn time_loop<F>(scenario: &Scenario, cfg: &RunConfig, mut observer: F) -> Result<RunOutput>
where
    F: FnMut(&StepDiagnostics, &[FullState]) -> Result<()>,
{
    cfg.validate()?;
    scenario.validate()?;
    let params = &scenario.params;
    let mesh = &scenario.mesh;
    let ops = build_ops(mesh);
    let pcfg = ParabolicConfig {
        eps_picard: cfg.eps,
        sigma_ref: scenario.sigma_ref,
        er_ref: scenario.er_ref,
        ..ParabolicConfig::default()
    };

    let mut u = scenario.initial.clone();
    let mut t = 0.0;
    let mut step = 0;
    let mut max_drift = Conserved::default();
    while t < cfg.t_final && step < cfg.max_steps {
        let ctx = with_step(step + 1, t);
        let remaining = cfg.t_final - t;
        let (u_h, dt, sizes, mut influx) = if scenario.hydro_enabled {
            let h = additive_combine(&u, &ops, params, cfg.cfl, &scenario.hydro_boundaries, Some(remaining)).map_err(&ctx)?;
            if cfg.check_idp {
                check_field(&h.u1, params).map_err(&ctx)?;
                check_field(&h.u2, params).map_err(&ctx)?;
                check_field(&h.u_h, params).map_err(&ctx)?;
            }
            (h.u_h, h.dt, h.sizes, h.influx)
        } else {
            let visc = compute_viscosities(&u, &ops, params).map_err(&ctx)?;
            let sizes = compute_dt(&visc, &ops, cfg.cfl).map_err(&ctx)?;
            let frozen: Vec<FullState> = u.iter().map(|s| FullState { mom: 0.0, ..*s }).collect();
            let dt = sizes.dt.min(remaining);
            let influx = totals(&frozen, &ops.mass) - totals(&u, &ops.mass);
            (frozen, dt, sizes, influx)
        };
        let t_n = temperatures(&u, params);
        let mut out = parabolic_step(&u_h, &t_n, mesh, &ops.mass, &scenario.radiation_boundaries, params, dt, &pcfg).map_err(&ctx)?;
        influx.energy += out.energy_influx;
        // Prescribed boundary states are restored after the parabolic stage
        // as well, so the next step starts from a consistent temperature.
        influx += scenario.hydro_boundaries.apply(&mut out.u, &ops.mass);
        if cfg.check_idp {
            check_field(&out.u, params).map_err(&ctx)?;
        }

        let change = totals(&out.u, &ops.mass) - totals(&u, &ops.mass) - influx;
        let drift = change.abs().relative_to(magnitudes(&u, &ops.mass));
        max_drift = Conserved {
            mass: max_drift.mass.max(drift.mass),
            momentum: max_drift.momentum.max(drift.momentum),
            energy: max_drift.energy.max(drift.energy),
        };

        step += 1;
        t = if dt >= remaining { cfg.t_final } else { t + dt };
        u = out.u;
        let minmax = |f: &dyn Fn(usize) -> f64| {
            (0..u.len()).map(f).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
        };
        let (rho_min, rho_max) = minmax(&|i| u[i].rho);
        let temp = temperatures(&u, params);
        let (t_min, t_max) = minmax(&|i| temp[i]);
        let (er_min, er_max) = minmax(&|i| u[i].e_rad);
        let diag = StepDiagnostics {
            step,
            t,
            dt,
            dt1: sizes.dt1,
            dt2: sizes.dt2,
            theta: sizes.theta,
            picard_iterations: out.picard_iterations,
            drift,
            influx,
            rho_min,
            rho_max,
            t_min,
            t_max,
            er_min,
            er_max,
        };
        observer(&diag, &u)?;
    }
    Ok(RunOutput {
        u,
        t,
        steps: step,
        max_drift,
    })
}

/// Runs without observing intermediate steps.
pub fn run(scenario: &Scenario, cfg: &RunConfig) -> Result<RunOutput> {
    time_loop(scenario, cfg, |_, _| Ok(()))
}

/// Trapezoidal integral of nodal values.
fn trapezoid(mesh: &Mesh1D, f: impl Fn(usize) -> f64) -> f64 {
    (0..mesh.n_cells()).map(|k| 0.5 * mesh.cell_size(k) * (f(k) + f(k + 1))).sum()
}

/// Sum of the relative L¹ errors of density, momentum, mechanical energy and
/// radiation energy of `u` against `reference`, both sampled on `mesh`.
///
/// A component whose reference norm vanishes contributes nothing when the
/// discrepancy vanishes too and is an error otherwise.
pub fn composite_l1_error(u: &[FullState], reference: &[FullState], mesh: &Mesh1D) -> Result<f64> {
    type Component = (&'static str, fn(&FullState) -> f64);
    let components: [Component; 4] = [
        ("rho", |s| s.rho),
        ("momentum", |s| s.mom),
        ("e_mech", |s| s.e_mech),
        ("e_rad", |s| s.e_rad),
    ];
    let mut total = 0.0;
    for (name, q) in components {
        let norm = trapezoid(mesh, |i| q(&reference[i]).abs());
        let diff = trapezoid(mesh, |i| (q(&u[i]) - q(&reference[i])).abs());
        if norm > 0.0 {
            total += diff / norm;
        } else if diff > 0.0 {
            return Err(Error::ZeroReferenceNorm(name));
        }
    }
    Ok(total)
}

/// Reference profile interpolated to the nodes of `mesh`.
pub fn sample_reference(profile: &ReferenceProfile, mesh: &Mesh1D, params: &OracleParams) -> Vec<FullState> {
    mesh.nodes().iter().map(|&x| profile.interpolate(x).to_state(params)).collect()
}

/// One line of a convergence table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub points: usize,
    pub h: f64,
    pub error: f64,
    /// `log(e_coarse / e_fine) / log(h_coarse / h_fine)` against the previous row.
    pub rate: Option<f64>,
}

/// Observed rates between consecutive `(points, h, error)` entries.
pub fn convergence_table(entries: &[(usize, f64, f64)]) -> Vec<ConvergenceRow> {
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(entries.len());
    for &(points, h, error) in entries {
        let rate = rows.last().map(|prev| (prev.error / error).ln() / (prev.h / h).ln());
        rows.push(ConvergenceRow { points, h, error, rate });
    }
    rows
}

/// Where the errors of a convergence study are measured against.
#[derive(Debug, Clone, Copy)]
pub enum ReferenceSource<'a> {
    /// External profile; it also provides the initial data of radiative shocks.
    Profile(&'a ReferenceProfile),
    /// The run on the finest listed mesh serves as reference for the others.
    SelfReference,
}

/// Overrides applied to the scenario defaults of every run of a study.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunOverrides {
    pub cfl: Option<f64>,
    pub t_final: Option<f64>,
    pub eps: Option<f64>,
    pub check_idp: bool,
}

impl RunOverrides {
    pub fn apply(&self, scenario: &Scenario) -> RunConfig {
        let base = RunConfig::for_scenario(scenario);
        RunConfig {
            cfl: self.cfl.unwrap_or(base.cfl),
            t_final: self.t_final.unwrap_or(base.t_final),
            eps: self.eps.unwrap_or(base.eps),
            check_idp: self.check_idp,
            ..base
        }
    }
}

/// Result of a convergence study.
#[derive(Debug, Clone)]
pub struct ConvergenceStudy {
    pub rows: Vec<ConvergenceRow>,
    /// Profile the errors were measured against.
    pub reference: ReferenceProfile,
    /// Point count of the reference run in self-reference mode.
    pub reference_points: Option<usize>,
}

/// Runs the scenario on every mesh and tabulates the composite errors.
///
/// In self-reference mode the largest point count is run first and the
/// remaining meshes are measured against its final field. `on_run` sees
/// every finished run, the reference run included.
pub fn convergence_study<F>(
    id: ScenarioId,
    points: &[usize],
    reference: ReferenceSource<'_>,
    overrides: &RunOverrides,
    mut on_run: F,
) -> Result<ConvergenceStudy>
where
    F: FnMut(&Scenario, &RunOutput) -> Result<()>,
{
    let mut points = points.to_vec();
    points.sort_unstable();
    points.dedup();
    let (profile, reference_points, initial_profile) = match reference {
        ReferenceSource::Profile(p) => (p.clone(), None, Some(p)),
        ReferenceSource::SelfReference => {
            let finest = points.pop().ok_or_else(|| Error::Config("no mesh sizes given".into()))?;
            let scenario = build_scenario(id, finest, None)?;
            let out = run(&scenario, &overrides.apply(&scenario))?;
            on_run(&scenario, &out)?;
            (ReferenceProfile::from_field(&scenario.mesh, &out.u, &scenario.params), Some(finest), None)
        }
    };
    if points.len() < 2 {
        return Err(Error::Config("a convergence study needs at least two measured meshes".into()));
    }
    let mut entries = Vec::with_capacity(points.len());
    for &n in &points {
        let scenario = build_scenario(id, n, initial_profile)?;
        let out = run(&scenario, &overrides.apply(&scenario))?;
        on_run(&scenario, &out)?;
        let exact = sample_reference(&profile, &scenario.mesh, &scenario.params);
        let error = composite_l1_error(&out.u, &exact, &scenario.mesh)?;
        entries.push((n, scenario.mesh.length() / scenario.mesh.n_cells() as f64, error));
    }
    Ok(ConvergenceStudy {
        rows: convergence_table(&entries),
        reference: profile,
        reference_points,
    })
}

/// Writes `x,rho,v,T,Er,Em,p` with 17 significant digits per value.
pub fn dump_fields(u: &[FullState], mesh: &Mesh1D, params: &OracleParams, path: &Path) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "x,rho,v,T,Er,Em,p")?;
    for (&x, s) in mesh.nodes().iter().zip(u) {
        let e = s.specific_internal_energy();
        writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            x,
            s.rho,
            s.velocity(),
            params.temperature_from(s.rho, e),
            s.e_rad,
            s.e_mech,
            params.pressure_from(s.rho, e)
        )?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::{HydroBoundaries, HydroBoundary};
    use crate::parabolic::{RadiationBoundaries, RadiationBoundary};
    use crate::scenarios::{marshak_scenario, UnitConstants};
    use crate::thermo::OpacityLaw;
    use approx::assert_relative_eq;

    fn equilibrium_scenario(n: usize, v: f64) -> Scenario {
        let params = UnitConstants::STANDARD.params(OpacityLaw::Constant { sigma: 500.0 });
        let t = 0.3;
        let state = FullState::from_primitive(1.5, v, t, params.a_r * t.powi(4), &params);
        Scenario {
            id: ScenarioId::Icf1d,
            mesh: Mesh1D::uniform(0.0, 1.0, n).unwrap(),
            params,
            initial: vec![state; n],
            hydro_boundaries: HydroBoundaries::both(HydroBoundary::Dirichlet(state)),
            radiation_boundaries: RadiationBoundaries {
                left: RadiationBoundary::Dirichlet(state.e_rad),
                right: RadiationBoundary::Dirichlet(state.e_rad),
            },
            hydro_enabled: true,
            t_final: 0.5,
            cfl: 1.0,
            sigma_ref: 500.0,
            er_ref: state.e_rad,
        }
    }

    #[test]
    fn zero_final_time_returns_initial_data() {
        let s = marshak_scenario(17).unwrap();
        let cfg = RunConfig {
            t_final: 0.0,
            ..RunConfig::for_scenario(&s)
        };
        let out = run(&s, &cfg).unwrap();
        assert_eq!(out.steps, 0);
        assert_eq!(out.u, s.initial);
    }

    #[test]
    fn uniform_equilibrium_is_preserved() {
        let s = equilibrium_scenario(33, 0.0);
        let cfg = RunConfig {
            check_idp: true,
            ..RunConfig::for_scenario(&s)
        };
        let out = run(&s, &cfg).unwrap();
        assert_eq!(out.t, 0.5);
        for (a, b) in out.u.iter().zip(&s.initial) {
            assert!((a.rho - b.rho).abs() <= 1e-13 * b.rho);
            assert!(a.mom.abs() <= 1e-13);
            assert!((a.e_mech - b.e_mech).abs() <= 1e-13 * b.e_mech);
            assert!((a.e_rad - b.e_rad).abs() <= 1e-13 * b.e_rad);
        }
    }

    #[test]
    fn last_step_lands_on_final_time() {
        let s = equilibrium_scenario(9, 0.1);
        let mut times = Vec::new();
        let cfg = RunConfig {
            t_final: 0.0123,
            ..RunConfig::for_scenario(&s)
        };
        let out = time_loop(&s, &cfg, |d, _| {
            times.push((d.t, d.dt, d.dt1, d.dt2, d.theta));
            Ok(())
        })
        .unwrap();
        assert_eq!(out.t, 0.0123);
        assert_eq!(times.last().unwrap().0, 0.0123);
        for &(_, dt, dt1, dt2, theta) in &times[..times.len() - 1] {
            assert_relative_eq!(dt, dt1 * dt2 / (dt1 + dt2), max_relative = 1e-14);
            assert_relative_eq!(theta, dt2 / (dt1 + dt2), max_relative = 1e-14);
        }
    }

    #[test]
    fn observer_errors_abort() {
        let s = equilibrium_scenario(9, 0.0);
        let r = time_loop(&s, &RunConfig::for_scenario(&s), |_, _| Err(Error::Config("stop".into())));
        assert!(matches!(r, Err(Error::Config(_))));
    }

    #[test]
    fn config_validation() {
        let s = equilibrium_scenario(9, 0.0);
        for cfg in [
            RunConfig { cfl: 0.0, ..RunConfig::for_scenario(&s) },
            RunConfig { cfl: 1.5, ..RunConfig::for_scenario(&s) },
            RunConfig { eps: 0.0, ..RunConfig::for_scenario(&s) },
        ] {
            assert!(matches!(run(&s, &cfg), Err(Error::Config(_))));
        }
    }

    #[test]
    fn composite_error_rules() {
        let mesh = Mesh1D::uniform(0.0, 2.0, 11).unwrap();
        let reference = vec![FullState::new(2.0, 1.0, 3.0, 0.5); 11];
        assert_eq!(composite_l1_error(&reference, &reference, &mesh).unwrap(), 0.0);
        let scaled: Vec<FullState> = reference.iter().map(|s| FullState { rho: 1.1 * s.rho, ..*s }).collect();
        assert_relative_eq!(composite_l1_error(&scaled, &reference, &mesh).unwrap(), 0.1, max_relative = 1e-12);

        let at_rest = vec![FullState::new(2.0, 0.0, 3.0, 0.5); 11];
        assert_eq!(composite_l1_error(&at_rest, &at_rest, &mesh).unwrap(), 0.0);
        let moving: Vec<FullState> = at_rest.iter().map(|s| FullState { mom: 1e-3, ..*s }).collect();
        assert!(matches!(composite_l1_error(&moving, &at_rest, &mesh), Err(Error::ZeroReferenceNorm("momentum"))));
    }

    #[test]
    fn trapezoid_weights_boundary_nodes_by_half() {
        let mesh = Mesh1D::new(vec![0.0, 1.0, 3.0]).unwrap();
        let reference = vec![FullState::new(1.0, 1.0, 1.0, 1.0); 3];
        let mut u = reference.clone();
        u[0].rho = 2.0;
        // |Δρ| integrates to 0.5 over a reference norm of 3.
        assert_relative_eq!(composite_l1_error(&u, &reference, &mesh).unwrap(), 0.5 / 3.0, max_relative = 1e-15);
    }

    #[test]
    fn rates_between_consecutive_rows() {
        let rows = convergence_table(&[(65, 1.0 / 64.0, 4e-2), (129, 1.0 / 128.0, 2e-2), (257, 1.0 / 256.0, 2e-2)]);
        assert_eq!(rows[0].rate, None);
        assert_relative_eq!(rows[1].rate.unwrap(), 1.0, max_relative = 1e-14);
        assert_eq!(rows[2].rate.unwrap(), 0.0);
    }

    #[test]
    fn dump_round_trips_through_profile_loader() {
        let s = equilibrium_scenario(7, 0.25);
        let mut u = s.initial.clone();
        u[3].rho *= 3.0;
        u[3].mom *= 3.0;
        u[3].e_mech *= 3.0;
        u[3].e_rad = 1e-30;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("fields.csv");
        dump_fields(&u, &s.mesh, &s.params, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 1 + 7);
        let profile = ReferenceProfile::load(&path).unwrap();
        assert_eq!(profile.x, s.mesh.nodes());
        for (i, s) in u.iter().enumerate() {
            assert_eq!(profile.rho[i], s.rho);
            assert_eq!(profile.e_rad[i], s.e_rad);
            assert_eq!(profile.v[i], s.velocity());
        }
    }

    #[test]
    fn self_referenced_study_converges_on_short_marshak_run() {
        let overrides = RunOverrides {
            t_final: Some(2e-3),
            ..RunOverrides::default()
        };
        let mut runs = Vec::new();
        let study = convergence_study(ScenarioId::Marshak, &[33, 65, 129, 17], ReferenceSource::SelfReference, &overrides, |s, out| {
            runs.push((s.mesh.len(), out.t));
            Ok(())
        })
        .unwrap();
        assert_eq!(study.reference_points, Some(129));
        assert_eq!(runs[0], (129, 2e-3));
        let errors: Vec<f64> = study.rows.iter().map(|r| r.error).collect();
        assert_eq!(study.rows.iter().map(|r| r.points).collect::<Vec<_>>(), vec![17, 33, 65]);
        assert!(errors[0] > errors[1] && errors[1] > errors[2], "{errors:?}");
    }
}
