//! Linearized backward-Euler step for radiation diffusion and the
//! matter-radiation energy exchange.
//!
//! A Picard loop alternates between the linear solve for `E_r^{n+1}` at a
//! frozen temperature estimate `T*` and a nodewise Newton update of `T*`.
//! The new temperature is then recovered from the affine closure evaluated
//! with the estimate used in the last linear solve, which makes the step
//! conservative whatever the Picard tolerance.

use crate::error::{Error, Result};
use crate::grid::{assemble_stiffness_into, Mesh1D, StiffnessMatrix};
use crate::linalg::Tridiagonal;
use crate::thermo::{FullState, OracleParams};

/// Radiation boundary treatment at one end of the domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadiationBoundary {
    /// Zero normal flux; the natural condition of the weak form.
    Neumann,
    /// Prescribed radiation energy density.
    Dirichlet(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiationBoundaries {
    pub left: RadiationBoundary,
    pub right: RadiationBoundary,
}

impl RadiationBoundaries {
    pub const NEUMANN: RadiationBoundaries = RadiationBoundaries {
        left: RadiationBoundary::Neumann,
        right: RadiationBoundary::Neumann,
    };

    fn dirichlet_value(&self, node: usize, n: usize) -> Option<f64> {
        let bc = if node == 0 {
            self.left
        } else if node + 1 == n {
            self.right
        } else {
            return None;
        };
        match bc {
            RadiationBoundary::Dirichlet(value) => Some(value),
            RadiationBoundary::Neumann => None,
        }
    }
}

/// Tolerances and budgets of the Picard and Newton iterations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParabolicConfig {
    /// Relative ℓ¹ change of `T*` at which the Picard loop stops.
    pub eps_picard: f64,
    /// Reference absorption cross-section for the Newton tolerance.
    pub sigma_ref: f64,
    /// Reference radiation energy for the Newton tolerance.
    pub er_ref: f64,
    pub max_picard: usize,
    pub max_newton: usize,
}

impl Default for ParabolicConfig {
    fn default() -> Self {
        ParabolicConfig {
            eps_picard: 1e-5,
            sigma_ref: 1.0,
            er_ref: 1.0,
            max_picard: 200,
            max_newton: 50,
        }
    }
}

impl ParabolicConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps_picard > 0.0 && self.sigma_ref > 0.0 && self.er_ref > 0.0) {
            return Err(Error::Config("parabolic tolerances must be positive".into()));
        }
        if self.max_picard == 0 || self.max_newton == 0 {
            return Err(Error::Config("iteration budgets must be positive".into()));
        }
        Ok(())
    }

    /// Residual tolerance of the Newton solve for `T*`.
    pub fn newton_tolerance(&self, dt: f64, params: &OracleParams) -> f64 {
        self.eps_picard * dt * self.sigma_ref * params.c_light * self.er_ref
    }
}

/// Per-node data of the intermediate state that the parabolic step needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeData {
    pub rho: f64,
    /// Internal energy density `ρ c_v(T^h) T^h`.
    pub eps: f64,
    pub t_h: f64,
    pub e_rad: f64,
}

impl NodeData {
    pub fn from_state(u: &FullState, params: &OracleParams) -> Self {
        let eps = u.internal_energy();
        NodeData {
            rho: u.rho,
            eps,
            t_h: params.temperature_from(u.rho, eps / u.rho),
            e_rad: u.e_rad,
        }
    }
}

/// Coefficients shared by the linear system and the temperature closure.
struct Exchange {
    /// `Δt σ_a(T*) c`.
    rate: f64,
    /// `ρ c_v(T*) + Δt σ_a c a_r T*³`.
    denom: f64,
    /// `ρ c_v(T*)`.
    heat_star: f64,
    /// `a_r T*³`.
    emission: f64,
}

fn exchange(node: &NodeData, t_star: f64, params: &OracleParams, dt: f64) -> Result<Exchange> {
    let sigma_a = params.sigma_a.evaluate(node.rho, t_star)?;
    let rate = dt * sigma_a * params.c_light;
    let heat_star = node.rho * params.heat_capacity(node.rho, t_star);
    let emission = params.a_r * t_star * t_star * t_star;
    Ok(Exchange {
        rate,
        denom: heat_star + rate * emission,
        heat_star,
        emission,
    })
}

/// Solves the M-matrix system for `E_r^{n+1}` at the temperature estimate `t_star`.
pub fn solve_radiation_system(
    nodes: &[NodeData],
    t_star: &[f64],
    mass: &[f64],
    stiffness: &StiffnessMatrix,
    boundaries: &RadiationBoundaries,
    params: &OracleParams,
    dt: f64,
) -> Result<Vec<f64>> {
    let mut solver = RadiationSolver::default();
    let mut e = Vec::new();
    solver.solve(nodes, t_star, mass, stiffness, boundaries, params, dt, &mut e)?;
    Ok(e)
}

/// Storage for repeated radiation solves on one mesh.
#[derive(Debug, Default)]
struct RadiationSolver {
    reaction: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    rhs: Vec<f64>,
    residual: Vec<f64>,
    lu: Tridiagonal,
}

impl RadiationSolver {
    #[allow(clippy::too_many_arguments)]
    fn solve(
        &mut self,
        nodes: &[NodeData],
        t_star: &[f64],
        mass: &[f64],
        stiffness: &StiffnessMatrix,
        boundaries: &RadiationBoundaries,
        params: &OracleParams,
        dt: f64,
        e: &mut Vec<f64>,
    ) -> Result<()> {
        let n = nodes.len();
        for buffer in [&mut self.reaction, &mut self.lower, &mut self.upper, &mut self.rhs] {
            buffer.resize(n, 0.0);
        }
        for i in 0..n {
            self.lower[i] = if i > 0 { dt * stiffness.off[i - 1] } else { 0.0 };
            self.upper[i] = if i + 1 < n { dt * stiffness.off[i] } else { 0.0 };
            if let Some(value) = boundaries.dirichlet_value(i, n) {
                self.reaction[i] = 1.0;
                self.lower[i] = 0.0;
                self.upper[i] = 0.0;
                self.rhs[i] = value;
                continue;
            }
            let node = &nodes[i];
            let x = exchange(node, t_star[i], params, dt).map_err(|e| e.at_node(i))?;
            let inv_denom = 1.0 / x.denom;
            self.reaction[i] = mass[i] * (1.0 + x.rate * x.heat_star * inv_denom);
            self.rhs[i] = mass[i] * (node.e_rad + x.rate * node.eps * inv_denom * x.emission);
        }
        let lu = &mut self.lu;
        lu.refactor_m_matrix(&self.lower, &self.upper, &self.reaction)?;
        e.clear();
        e.extend_from_slice(&self.rhs);
        lu.solve_in_place(e);

        // One refinement sweep with the residual written in flux form,
        // `reaction_i E_i + Σ_j w_ij (E_i - E_j)`, whose rounding error scales
        // with the differences of E rather than with E itself. This keeps the
        // energy balance at round-off level even for very stiff diffusion.
        self.residual.clear();
        self.residual.extend((0..n).map(|i| {
            let mut applied = self.reaction[i] * e[i];
            if i > 0 {
                applied -= self.lower[i] * (e[i] - e[i - 1]);
            }
            if i + 1 < n {
                applied -= self.upper[i] * (e[i] - e[i + 1]);
            }
            self.rhs[i] - applied
        }));
        lu.solve_in_place(&mut self.residual);
        for (value, delta) in e.iter_mut().zip(&self.residual) {
            *value += delta;
        }
        Ok(())
    }
}

/// Residual of the nonlinear equation for `T*` and its derivative.
fn newton_residual(node: &NodeData, e_rad_new: f64, t: f64, params: &OracleParams, dt: f64) -> Result<(f64, f64)> {
    let heat = node.rho * params.heat_capacity(node.rho, t);
    let (sigma, dsigma) = params.sigma_a.evaluate_with_derivative(node.rho, t)?;
    let t3 = t * t * t;
    let imbalance = params.a_r * t3 * t - e_rad_new;
    let k = dt * params.c_light;
    let value = heat * (t - node.t_h) + k * sigma * imbalance;
    let deriv = heat + k * (dsigma * imbalance + sigma * 4.0 * params.a_r * t3);
    Ok((value, deriv))
}

const T_FLOOR: f64 = 1e-14;

/// Safeguarded Newton solve of `ρ c_v (T - T^h) + Δt σ_a(T) c (a_r T⁴ - E) = 0`.
///
/// The residual is increasing in `T`; every evaluation tightens a bracket and
/// Newton steps leaving it are replaced by bisection (geometric while the
/// bracket spans several decades).
pub fn newton_t_star(
    node_index: usize,
    initial: f64,
    e_rad_new: f64,
    node: &NodeData,
    params: &OracleParams,
    dt: f64,
    tol: f64,
    max_iter: usize,
) -> Result<f64> {
    let mut lo = T_FLOOR;
    let mut hi = 2.0 * node.t_h.max((e_rad_new.max(0.0) / params.a_r).sqrt().sqrt());
    let mut t = initial.clamp(lo, hi);
    let mut step_before_last = hi - lo;
    let mut last_step = step_before_last;
    let mut last_residual = f64::INFINITY;
    for _ in 0..max_iter {
        let (r, dr) = newton_residual(node, e_rad_new, t, params, dt).map_err(|e| e.at_node(node_index))?;
        last_residual = r;
        if r.abs() <= tol {
            return Ok(t);
        }
        if r < 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            return Ok(t);
        }
        let newton = t - r / dr;
        // Newton is kept only while it stays inside the bracket and its steps
        // shrink at least geometrically.
        let fast = (t - newton).abs() <= 0.5 * step_before_last;
        let next = if dr > 0.0 && newton > lo && newton < hi && fast {
            newton
        } else if hi > 10.0 * lo {
            (lo * hi).sqrt()
        } else {
            0.5 * (lo + hi)
        };
        if next <= lo || next >= hi {
            return Ok(t);
        }
        step_before_last = last_step;
        last_step = (next - t).abs();
        t = next;
    }
    Err(Error::NewtonDiverged {
        node: node_index,
        iterations: max_iter,
        residual: last_residual,
    })
}

/// `T^{n+1} = (ρ c_v(T^h) T^h + Δt σ_a c E) / (ρ c_v(T*) + Δt σ_a c a_r T*³)`.
pub fn temperature_closure(node: &NodeData, t_star_old: f64, e_rad_new: f64, params: &OracleParams, dt: f64) -> Result<f64> {
    let x = exchange(node, t_star_old, params, dt)?;
    Ok((node.eps + x.rate * e_rad_new) / x.denom)
}

/// Outcome of one parabolic step.
#[derive(Debug, Clone)]
pub struct ParabolicOutcome {
    pub u: Vec<FullState>,
    pub temperature: Vec<f64>,
    /// Temperature estimate used in the last linear solve.
    pub t_star: Vec<f64>,
    pub picard_iterations: usize,
    pub picard_residual: f64,
    /// Total energy entering through Dirichlet rows.
    pub energy_influx: f64,
    /// `min_i min(E_r,i^h, a_r T*_i³ T_i^h)`, the guaranteed floor of `E_r^{n+1}`.
    pub e_rad_floor: f64,
}

/// Picard loop, temperature closure and reassembly of the full state.
pub fn parabolic_step(
    u_h: &[FullState],
    t_n: &[f64],
    mesh: &Mesh1D,
    mass: &[f64],
    boundaries: &RadiationBoundaries,
    params: &OracleParams,
    dt: f64,
    cfg: &ParabolicConfig,
) -> Result<ParabolicOutcome> {
    let n = u_h.len();
    let nodes: Vec<NodeData> = u_h.iter().map(|s| NodeData::from_state(s, params)).collect();
    let rho: Vec<f64> = nodes.iter().map(|d| d.rho).collect();
    let tol = cfg.newton_tolerance(dt, params);

    let mut t_star: Vec<f64> = t_n.to_vec();
    let mut t_old = vec![0.0; n];
    let mut e_new = Vec::with_capacity(n);
    let mut stiffness = StiffnessMatrix {
        diag: Vec::with_capacity(n),
        off: Vec::with_capacity(n),
    };
    let mut solver = RadiationSolver::default();
    let mut picard_residual = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < cfg.max_picard {
        iterations += 1;
        assemble_stiffness_into(mesh, &rho, &t_star, params, &mut stiffness)?;
        solver.solve(&nodes, &t_star, mass, &stiffness, boundaries, params, dt, &mut e_new)?;
        std::mem::swap(&mut t_star, &mut t_old);
        let mut change = 0.0;
        let mut scale = 0.0;
        for i in 0..n {
            let t = newton_t_star(i, t_old[i], e_new[i], &nodes[i], params, dt, tol, cfg.max_newton)?;
            change += (t - t_old[i]).abs();
            scale += t_old[i].abs();
            t_star[i] = t;
        }
        picard_residual = change / scale;
        if picard_residual <= cfg.eps_picard {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::PicardDiverged {
            iterations,
            residual: picard_residual,
        });
    }
    let t_used = t_old;

    let mut u = Vec::with_capacity(n);
    let mut temperature = Vec::with_capacity(n);
    let mut e_rad_floor = f64::INFINITY;
    for i in 0..n {
        let node = &nodes[i];
        let t_new = temperature_closure(node, t_used[i], e_new[i], params, dt).map_err(|e| e.at_node(i))?;
        let s = &u_h[i];
        let eps_new = node.rho * (params.heat_capacity(node.rho, t_used[i]) * t_new + params.cold_energy(node.rho));
        u.push(FullState {
            rho: s.rho,
            mom: s.mom,
            e_mech: eps_new + s.kinetic_energy(),
            e_rad: e_new[i],
        });
        temperature.push(t_new);
        e_rad_floor = e_rad_floor.min(node.e_rad.min(params.a_r * t_used[i].powi(3) * node.t_h));
    }

    let k_e = stiffness.apply(&e_new);
    let mut energy_influx = 0.0;
    for i in [0, n - 1] {
        if boundaries.dirichlet_value(i, n).is_some() {
            let delta = (u[i].e_mech + u[i].e_rad) - (u_h[i].e_mech + u_h[i].e_rad);
            energy_influx += mass[i] * delta + dt * k_e[i];
        }
    }

    Ok(ParabolicOutcome {
        u,
        temperature,
        t_star: t_used,
        picard_iterations: iterations,
        picard_residual,
        energy_influx,
        e_rad_floor,
    })
}
