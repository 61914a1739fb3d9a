//! Contact pressure and wave-speed bound for the Riemann problem of the
//! radiation-pressure subsystem, where the pressure is `p = E_r / 3`.

use crate::bracket::concave_increasing_root_from;
use crate::thermo::ReducedState;

const REL_TOL: f64 = 1e-14;
const MAX_ITER: usize = 200;

/// Primitive data `(rho, v, p)` on one side of the interface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadSide {
    pub rho: f64,
    pub v: f64,
    pub p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadRiemannInput {
    pub left: RadSide,
    pub right: RadSide,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadCase {
    Vacuum,
    TwoExpansion,
    Mixed,
    TwoShock,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadRiemannSolution {
    pub p_star: f64,
    pub case: RadCase,
    pub lambda_l_minus: f64,
    pub lambda_r_plus: f64,
    pub mu_max: f64,
}

/// Normal projection of a reduced state for the direction `n = ±1`.
pub fn project_pi2(w: &ReducedState, n: f64) -> RadSide {
    let v = w.velocity();
    RadSide {
        rho: w.rho,
        v: v * n,
        p: w.radiation_pressure(),
    }
}

/// Velocity increment across the wave connecting a side `(rho_z, p_z)` to
/// the pressure `p`.
pub fn wave_function_f(p: f64, rho_z: f64, p_z: f64) -> f64 {
    wave(p, rho_z, p_z).0
}

fn wave(p: f64, rho_z: f64, p_z: f64) -> (f64, f64) {
    if p >= p_z {
        let s = (6.0 / rho_z).sqrt();
        let sum = p + p_z;
        if sum == 0.0 {
            return (0.0, f64::INFINITY);
        }
        let root = sum.sqrt();
        let value = s * (p - p_z) / root;
        let deriv = s * (0.5 * p + 1.5 * p_z) / (sum * root);
        (value, deriv)
    } else {
        let s = (12.0 / rho_z).sqrt();
        let sp = p.sqrt();
        (s * (sp - p_z.sqrt()), 0.5 * s / sp)
    }
}

impl RadRiemannInput {
    pub fn phi(&self, p: f64) -> f64 {
        self.phi_with_derivative(p).0
    }

    fn phi_with_derivative(&self, p: f64) -> (f64, f64) {
        let (fl, dl) = wave(p, self.left.rho, self.left.p);
        let (fr, dr) = wave(p, self.right.rho, self.right.p);
        (fl + fr + (self.right.v - self.left.v), dl + dr)
    }

    /// Upper bound on the contact pressure when both waves are shocks.
    pub fn two_shock_majorant(&self) -> f64 {
        let sl = (3.0 / self.left.rho).sqrt();
        let sr = (3.0 / self.right.rho).sqrt();
        let a = sl + sr;
        let b = self.right.v - self.left.v;
        let c = -(sl * self.left.p + sr * self.right.p);
        let x = (-b + (b * b - 4.0 * a * c).sqrt()) / (2.0 * a);
        x * x
    }

    fn mirrored(&self) -> RadRiemannInput {
        RadRiemannInput {
            left: RadSide {
                v: -self.right.v,
                ..self.right
            },
            right: RadSide {
                v: -self.left.v,
                ..self.left
            },
        }
    }
}

/// Solves for the contact pressure and the extreme wave speeds.
pub fn solve_p_star(input: &RadRiemannInput) -> RadRiemannSolution {
    let (l, r) = (input.left, input.right);
    let p_min = l.p.min(r.p);
    let p_max = l.p.max(r.p);
    let expansion_room = (12.0 * l.p / l.rho).sqrt() + (12.0 * r.p / r.rho).sqrt();

    let (case, p_star) = if r.v - l.v > expansion_room {
        (RadCase::Vacuum, 0.0)
    } else {
        let eval = |p: f64| input.phi_with_derivative(p);
        let at_min = eval(p_min);
        if at_min.0 > 0.0 {
            let num = l.v - r.v + expansion_room;
            let den = (12.0 / l.rho).sqrt() + (12.0 / r.rho).sqrt();
            let x = (num / den).max(0.0);
            (RadCase::TwoExpansion, x * x)
        } else {
            let at_max = eval(p_max);
            if at_max.0 >= 0.0 {
                let b = concave_increasing_root_from(eval, (p_min, at_min), (p_max, at_max), REL_TOL, MAX_ITER);
                (RadCase::Mixed, b.hi)
            } else {
                let upper = input.two_shock_majorant().max(p_max);
                let b = concave_increasing_root_from(eval, (p_max, at_max), (upper, eval(upper)), REL_TOL, MAX_ITER);
                (RadCase::TwoShock, b.hi)
            }
        }
    };

    let lambda_l_minus = -((l.p + p_star.max(l.p)) / (6.0 * l.rho)).sqrt();
    let lambda_r_plus = ((r.p + p_star.max(r.p)) / (6.0 * r.rho)).sqrt();
    RadRiemannSolution {
        p_star,
        case,
        lambda_l_minus,
        lambda_r_plus,
        mu_max: (-lambda_l_minus).max(lambda_r_plus),
    }
}

/// Same as [`solve_p_star`] on the mirrored problem; used to check symmetry.
pub fn solve_mirrored(input: &RadRiemannInput) -> RadRiemannSolution {
    solve_p_star(&input.mirrored())
}
