//! Time integration of the regularized vorticity system with recovery of
//! `(u, v, b)` after every step.

mod forcing;
mod params;
mod state;
mod stepper;
mod tridiag;

pub use forcing::{Forcing, Manufactured};
pub use params::{Params, TopBoundary};
pub use state::{
    divergence_residual, init_from_profile, recover_b, recover_u, recover_v, InitialProfile, State,
};
pub use stepper::{step, Stepper};
pub use tridiag::Tridiagonal;

use crate::error::{Error, Result};
use crate::grid::{deriv_x, deriv_y, Field};
use crate::outer::OuterFlow;

/// Pointwise residual of the velocity form
/// `u_t + u u_x + v u_y - (U - u) - u_yy - eps^2 u_xx + d_x P^eps`
/// at the midpoint of two consecutive snapshots.
pub fn residual_momentum(prev: &State, next: &State, outer: &OuterFlow, p: &Params) -> Result<Field> {
    let dt = next.t - prev.t;
    if !(dt > 0.0) {
        return Err(Error::DegenerateInput(
            "snapshots must be strictly increasing in time".into(),
        ));
    }
    let g = *prev.grid();
    let tm = 0.5 * (prev.t + next.t);
    let u = prev.u.zip_map(&next.u, |a, b| 0.5 * (a + b));
    let v = prev.v.zip_map(&next.v, |a, b| 0.5 * (a + b));
    let ut = next.u.zip_map(&prev.u, |a, b| (a - b) / dt);
    let ux = deriv_x(&u, 1)?;
    let uxx = deriv_x(&u, 2)?;
    let uy = deriv_y(&u, 1)?;
    let uyy = deriv_y(&u, 2)?;
    let xs = g.x_nodes();
    let big_u: Vec<f64> = xs.iter().map(|&x| outer.u_at(tm, x, 0, 0)).collect();
    let px = outer.pressure_gradient(tm, &xs, p.eps);
    let e2 = p.eps * p.eps;
    let n = g.ny_nodes();
    let mut out = Field::zeros(g);
    for i in 0..g.nx {
        let col = out.column_mut(i);
        for (j, r) in col.iter_mut().enumerate() {
            let k = i * n + j;
            let uu = u.values()[k];
            *r = ut.values()[k] + uu * ux.values()[k] + v.values()[k] * uy.values()[k]
                - (big_u[i] - uu)
                - uyy.values()[k]
                - e2 * uxx.values()[k]
                + px[i];
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    #[test]
    fn trivial_residual_vanishes() {
        let g = GridSpec::new(16, 64, 30.0).unwrap();
        let outer = OuterFlow::constant(0.0);
        let p = Params::default();
        let a = State::from_vorticity(Field::zeros(g), &outer, 0.0, &p);
        let b = State::from_vorticity(Field::zeros(g), &outer, 0.1, &p);
        assert_eq!(residual_momentum(&a, &b, &outer, &p).unwrap().max_abs(), 0.0);
        assert!(residual_momentum(&a, &a, &outer, &p).is_err());
    }
}
