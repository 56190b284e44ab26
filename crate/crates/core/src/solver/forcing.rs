use crate::grid::{Field, GridSpec};

/// Extra source for the vorticity equation, optionally with its own wall flux.
pub trait Forcing: Send + Sync {
    /// Source `S(t, x, y)` added to the right-hand side.
    fn vorticity_source(&self, t: f64, grid: &GridSpec) -> Field;

    /// Replacement for the Bernoulli wall flux `K(t, x)`.
    fn wall_flux(&self, _t: f64, _xs: &[f64]) -> Option<Vec<f64>> {
        None
    }
}

/// Manufactured solution `w* = e^{-t} 1.5 (1 + y)^{-5/2} (1 + a sin x)`
/// for the flow `U = 1`.
///
/// The profile satisfies the power-law top condition with `sigma = 5/2`
/// exactly, so the only error left is discretization error.
#[derive(Debug, Clone, Copy)]
pub struct Manufactured {
    pub eps: f64,
    pub amp: f64,
    pub y_max: f64,
}

impl Manufactured {
    pub fn new(eps: f64, y_max: f64) -> Self {
        Manufactured {
            eps,
            amp: 0.05,
            y_max,
        }
    }

    /// Top-boundary exponent matched by the profile.
    pub const SIGMA: f64 = 2.5;

    fn a(&self, t: f64, x: f64) -> (f64, f64, f64) {
        let e = (-t).exp();
        (
            e * (1.0 + self.amp * x.sin()),
            e * self.amp * x.cos(),
            -e * self.amp * x.sin(),
        )
    }

    fn phi(y: f64) -> (f64, f64, f64) {
        let z = 1.0 + y;
        (1.5 * z.powf(-2.5), -3.75 * z.powf(-3.5), 13.125 * z.powf(-4.5))
    }

    /// `Phi = int_y^{y_max} phi`.
    fn big_phi(&self, y: f64) -> f64 {
        (1.0 + y).powf(-1.5) - (1.0 + self.y_max).powf(-1.5)
    }

    /// `Psi = int_0^y Phi`.
    fn psi(&self, y: f64) -> f64 {
        2.0 * (1.0 - (1.0 + y).powf(-0.5)) - y * (1.0 + self.y_max).powf(-1.5)
    }

    pub fn exact_w(&self, t: f64, grid: GridSpec) -> Field {
        Field::from_fn(grid, |x, y| self.a(t, x).0 * Self::phi(y).0)
    }

    pub fn exact_u(&self, t: f64, grid: GridSpec) -> Field {
        Field::from_fn(grid, |x, y| 1.0 - self.a(t, x).0 * self.big_phi(y))
    }

    pub fn exact_v(&self, t: f64, grid: GridSpec) -> Field {
        Field::from_fn(grid, |x, y| self.a(t, x).1 * self.psi(y))
    }

    /// Source of the velocity form whose y-derivative is the vorticity source.
    pub fn momentum_source(&self, t: f64, grid: GridSpec) -> Field {
        let e2 = self.eps * self.eps;
        Field::from_fn(grid, |x, y| {
            let (a, ax, axx) = self.a(t, x);
            let (p, dp, _) = Self::phi(y);
            let big = self.big_phi(y);
            -(1.0 - a * big) * ax * big + a * ax * self.psi(y) * p + e2 * axx * big - a * dp
        })
    }
}

impl Forcing for Manufactured {
    fn vorticity_source(&self, t: f64, grid: &GridSpec) -> Field {
        let e2 = self.eps * self.eps;
        Field::from_fn(*grid, |x, y| {
            let (a, ax, axx) = self.a(t, x);
            let (p, dp, ddp) = Self::phi(y);
            (1.0 - a * self.big_phi(y)) * ax * p + a * ax * self.psi(y) * dp - e2 * axx * p - a * ddp
        })
    }

    fn wall_flux(&self, t: f64, xs: &[f64]) -> Option<Vec<f64>> {
        Some(xs.iter().map(|&x| self.a(t, x).0 * Self::phi(0.0).1).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vorticity_source_is_y_derivative_of_momentum_source() {
        let m = Manufactured::new(0.1, 30.0);
        let err = |ny| {
            let g = GridSpec::new(16, ny, 30.0).unwrap();
            let dr = crate::grid::deriv_y(&m.momentum_source(0.2, g), 1).unwrap();
            (&dr - &m.vorticity_source(0.2, &g)).max_abs()
        };
        let (coarse, fine) = (err(1024), err(2048));
        assert!(fine < 3e-2, "{fine}");
        assert!((3.5..=4.5).contains(&(coarse / fine)), "{}", coarse / fine);
    }

    #[test]
    fn exact_fields_are_consistent() {
        let m = Manufactured::new(0.0, 30.0);
        let g = GridSpec::new(16, 64, 30.0).unwrap();
        let u = m.exact_u(0.0, g);
        assert!(u.row(64).iter().all(|&v| (v - 1.0).abs() < 1e-15));
        assert!(m.exact_v(0.0, g).row(0).iter().all(|&v| v == 0.0));
        let flux = m.wall_flux(0.0, &[0.0]).unwrap()[0];
        assert!((flux + 3.75).abs() < 1e-15);
    }
}
