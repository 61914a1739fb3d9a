//! Mass, momentum and total-energy bookkeeping.

use std::ops::{Add, AddAssign, Mul, Sub};

use crate::thermo::FullState;

/// Mass, momentum and total energy (`E_m + E_r`) carried by a field or a flux.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Conserved {
    pub mass: f64,
    pub momentum: f64,
    pub energy: f64,
}

impl Conserved {
    pub fn of_state(u: &FullState) -> Self {
        Conserved {
            mass: u.rho,
            momentum: u.mom,
            energy: u.e_mech + u.e_rad,
        }
    }

    pub fn abs(self) -> Self {
        Conserved {
            mass: self.mass.abs(),
            momentum: self.momentum.abs(),
            energy: self.energy.abs(),
        }
    }

    pub fn max_component(self) -> f64 {
        self.mass.max(self.momentum).max(self.energy)
    }

    /// Component-wise `self / scale`, with zero scales mapped to zero.
    pub fn relative_to(self, scale: Conserved) -> Conserved {
        let div = |a: f64, b: f64| if b > 0.0 { a / b } else { a.abs() };
        Conserved {
            mass: div(self.mass, scale.mass),
            momentum: div(self.momentum, scale.momentum),
            energy: div(self.energy, scale.energy),
        }
    }
}

impl Add for Conserved {
    type Output = Conserved;
    fn add(self, o: Conserved) -> Conserved {
        Conserved {
            mass: self.mass + o.mass,
            momentum: self.momentum + o.momentum,
            energy: self.energy + o.energy,
        }
    }
}

impl AddAssign for Conserved {
    fn add_assign(&mut self, o: Conserved) {
        *self = *self + o;
    }
}

impl Sub for Conserved {
    type Output = Conserved;
    fn sub(self, o: Conserved) -> Conserved {
        Conserved {
            mass: self.mass - o.mass,
            momentum: self.momentum - o.momentum,
            energy: self.energy - o.energy,
        }
    }
}

impl Mul<f64> for Conserved {
    type Output = Conserved;
    fn mul(self, s: f64) -> Conserved {
        Conserved {
            mass: self.mass * s,
            momentum: self.momentum * s,
            energy: self.energy * s,
        }
    }
}

/// `Σ m_i u_i`.
pub fn totals(u: &[FullState], mass: &[f64]) -> Conserved {
    u.iter()
        .zip(mass)
        .fold(Conserved::default(), |acc, (s, &m)| acc + Conserved::of_state(s) * m)
}

/// `Σ m_i |u_i|`, the scale against which drifts are measured.
pub fn magnitudes(u: &[FullState], mass: &[f64]) -> Conserved {
    u.iter()
        .zip(mass)
        .fold(Conserved::default(), |acc, (s, &m)| acc + Conserved::of_state(s).abs() * m)
}

/// Relative change of the totals not explained by the recorded influx.
pub fn relative_drift(before: &[FullState], after: &[FullState], mass: &[f64], influx: Conserved) -> Conserved {
    let change = totals(after, mass) - totals(before, mass) - influx;
    change.abs().relative_to(magnitudes(before, mass))
}
