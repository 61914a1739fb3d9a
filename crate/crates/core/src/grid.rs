//! Continuous piecewise-linear finite elements on a 1D mesh: lumped masses,
//! gradient coefficients, stencils and the diffusion stiffness.

use crate::error::{Error, Result};
use crate::thermo::OracleParams;

/// Strictly increasing node coordinates, in cm.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh1D {
    nodes: Vec<f64>,
}

impl Mesh1D {
    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 3 {
            return Err(Error::Mesh(format!("need at least 3 nodes, got {}", nodes.len())));
        }
        if let Some(k) = nodes.iter().position(|x| !x.is_finite()) {
            return Err(Error::Mesh(format!("node {k} is not finite")));
        }
        if let Some(k) = nodes.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::Mesh(format!("nodes {k} and {} are not strictly increasing", k + 1)));
        }
        Ok(Self { nodes })
    }

    /// `n_points` equispaced nodes on `[x_lo, x_hi]`.
    pub fn uniform(x_lo: f64, x_hi: f64, n_points: usize) -> Result<Self> {
        if n_points < 3 {
            return Err(Error::Mesh(format!("need at least 3 nodes, got {n_points}")));
        }
        if !(x_hi > x_lo) {
            return Err(Error::Mesh(format!("empty domain ({x_lo}, {x_hi})")));
        }
        let h = (x_hi - x_lo) / (n_points - 1) as f64;
        let mut nodes: Vec<f64> = (0..n_points).map(|i| x_lo + i as f64 * h).collect();
        nodes[n_points - 1] = x_hi;
        Self::new(nodes)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Length of cell `k` joining nodes `k` and `k + 1`.
    #[inline]
    pub fn cell_size(&self, k: usize) -> f64 {
        self.nodes[k + 1] - self.nodes[k]
    }

    pub fn n_cells(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn boundary_nodes(&self) -> [usize; 2] {
        [0, self.nodes.len() - 1]
    }

    pub fn is_boundary(&self, i: usize) -> bool {
        i == 0 || i + 1 == self.nodes.len()
    }

    pub fn length(&self) -> f64 {
        self.nodes[self.nodes.len() - 1] - self.nodes[0]
    }
}

/// Lumped masses and gradient coefficients of the P1 space.
///
/// The 1D stencil of node `i` is `{i-1, i, i+1}` clipped to the mesh, so the
/// coefficients are stored as three bands: `c_left[i] = c_{i,i-1}`,
/// `c_diag[i] = c_{ii}`, `c_right[i] = c_{i,i+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteOps {
    pub mass: Vec<f64>,
    pub c_left: Vec<f64>,
    pub c_diag: Vec<f64>,
    pub c_right: Vec<f64>,
}

impl DiscreteOps {
    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    /// Neighbours `j != i` of node `i`.
    pub fn neighbours(&self, i: usize) -> impl Iterator<Item = usize> {
        let n = self.mass.len();
        let left = (i > 0).then(|| i - 1);
        let right = (i + 1 < n).then_some(i + 1);
        left.into_iter().chain(right)
    }

    /// `c_ij` for `j` in the stencil of `i`, zero otherwise.
    pub fn c(&self, i: usize, j: usize) -> f64 {
        if j == i {
            self.c_diag[i]
        } else if j + 1 == i {
            self.c_left[i]
        } else if j == i + 1 {
            self.c_right[i]
        } else {
            0.0
        }
    }

    /// Edge coefficient `c_{i,i+1}` (equal to `-c_{i+1,i}` for P1).
    #[inline]
    pub fn edge_c(&self, edge: usize) -> f64 {
        self.c_right[edge]
    }
}

/// Builds lumped masses and the gradient coefficients of the P1 space.
pub fn build_ops(mesh: &Mesh1D) -> DiscreteOps {
    let n = mesh.len();
    let mut mass = vec![0.0; n];
    let mut c_left = vec![0.0; n];
    let mut c_right = vec![0.0; n];
    for k in 0..mesh.n_cells() {
        let half = 0.5 * mesh.cell_size(k);
        mass[k] += half;
        mass[k + 1] += half;
        c_right[k] = 0.5;
        c_left[k + 1] = -0.5;
    }
    let c_diag = (0..n).map(|i| -(c_left[i] + c_right[i])).collect();
    DiscreteOps {
        mass,
        c_left,
        c_diag,
        c_right,
    }
}

/// Symmetric tridiagonal stiffness: `off[k] = k_{k,k+1}` and `diag[i] = k_ii`.
#[derive(Debug, Clone, PartialEq)]
pub struct StiffnessMatrix {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl StiffnessMatrix {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.diag[i]
        } else if j == i + 1 {
            self.off[i]
        } else if i == j + 1 {
            self.off[j]
        } else {
            0.0
        }
    }

    /// Returns `K x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        let mut y: Vec<f64> = (0..n).map(|i| self.diag[i] * x[i]).collect();
        for (k, &off) in self.off.iter().enumerate() {
            y[k] += off * x[k + 1];
            y[k + 1] += off * x[k];
        }
        y
    }

    /// Row `i` of `K x`.
    pub fn apply_row(&self, i: usize, x: &[f64]) -> f64 {
        let mut acc = self.diag[i] * x[i];
        if i > 0 {
            acc += self.off[i - 1] * x[i - 1];
        }
        if i < self.off.len() {
            acc += self.off[i] * x[i + 1];
        }
        acc
    }
}

/// Diffusion stiffness `k_ij = ∫ c/(3 σ_t) φ_i' φ_j'` with the coefficient
/// integrated by the trapezoidal rule, i.e. the cell mean of the nodal values
/// of `c/(3 σ_t(rho_i, T_i))`.
pub fn assemble_stiffness(
    mesh: &Mesh1D,
    rho: &[f64],
    temperature: &[f64],
    params: &OracleParams,
) -> Result<StiffnessMatrix> {
    let mut k = StiffnessMatrix {
        diag: Vec::new(),
        off: Vec::new(),
    };
    assemble_stiffness_into(mesh, rho, temperature, params, &mut k)?;
    Ok(k)
}

fn nodal_inverse_sigma(rho: &[f64], temperature: &[f64], params: &OracleParams) -> Result<Vec<f64>> {
    rho.iter()
        .zip(temperature)
        .enumerate()
        .map(|(i, (&r, &t))| {
            let sigma_t = params.sigma_t.evaluate(r, t)?;
            if sigma_t > 0.0 {
                Ok(1.0 / sigma_t)
            } else {
                Err(Error::Assembly(format!("sigma_t = {sigma_t} at node {i}")))
            }
        })
        .collect()
}

/// [`assemble_stiffness`] writing into existing storage.
pub fn assemble_stiffness_into(
    mesh: &Mesh1D,
    rho: &[f64],
    temperature: &[f64],
    params: &OracleParams,
    k: &mut StiffnessMatrix,
) -> Result<()> {
    let n = mesh.len();
    if rho.len() != n || temperature.len() != n {
        return Err(Error::Assembly(format!(
            "field lengths ({}, {}) do not match {n} nodes",
            rho.len(),
            temperature.len()
        )));
    }
    k.diag.clear();
    k.diag.resize(n, 0.0);
    k.off.clear();
    k.off.resize(n - 1, 0.0);
    let inv_sigma = nodal_inverse_sigma(rho, temperature, params)?;
    for c in 0..mesh.n_cells() {
        let coeff = 0.5 * (inv_sigma[c] + inv_sigma[c + 1]) * params.c_light / 3.0 / mesh.cell_size(c);
        k.off[c] = -coeff;
        k.diag[c] += coeff;
        k.diag[c + 1] += coeff;
    }
    Ok(())
}
