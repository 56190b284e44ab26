use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{cum_integral_y, deriv_x, tail_integral_y, Field, GridSpec};
use crate::outer::OuterFlow;

use super::Params;

/// Time-stamped solution with velocities and magnetic field re-derived
/// from the vorticity.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub t: f64,
    pub w: Field,
    pub u: Field,
    pub v: Field,
    /// `None` when `sigma <= 2` makes `int (U - u)` diverge.
    pub b: Option<Field>,
}

impl State {
    /// Builds the full state from `w` by the recovery relations.
    pub fn from_vorticity(w: Field, outer: &OuterFlow, t: f64, p: &Params) -> State {
        let u = recover_u(&w, outer, t);
        let v = recover_v(&u);
        let b = recover_b(&u, outer, t, p.sigma).ok();
        State { t, w, u, v, b }
    }

    pub fn grid(&self) -> &GridSpec {
        self.w.grid()
    }

    pub fn is_finite(&self) -> bool {
        self.w.is_finite()
            && self.u.is_finite()
            && self.v.is_finite()
            && self.b.as_ref().is_none_or(Field::is_finite)
    }

    /// `U(t, x)` sampled on the grid x-nodes.
    pub fn outer_profile(&self, outer: &OuterFlow) -> Vec<f64> {
        outer.eval_u(self.t, &self.grid().x_nodes(), 0, 0).unwrap_or_else(|_| {
            self.grid()
                .x_nodes()
                .iter()
                .map(|&x| outer.u_at(self.t, x, 0, 0))
                .collect()
        })
    }
}

/// Built-in initial vorticity families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialProfile {
    /// `w0 = amplitude * U(0, x) (sigma - 1) (1 + y)^{-sigma}`.
    PowerLaw {
        #[serde(default = "unit")]
        amplitude: f64,
    },
}

fn unit() -> f64 {
    1.0
}

impl Default for InitialProfile {
    fn default() -> Self {
        InitialProfile::PowerLaw { amplitude: 1.0 }
    }
}

impl InitialProfile {
    pub fn scaled(&self, factor: f64) -> Self {
        match *self {
            InitialProfile::PowerLaw { amplitude } => InitialProfile::PowerLaw {
                amplitude: amplitude * factor,
            },
        }
    }

    pub fn vorticity(&self, grid: GridSpec, outer: &OuterFlow, p: &Params) -> Result<Field> {
        match *self {
            InitialProfile::PowerLaw { amplitude } => {
                let xs = grid.x_nodes();
                let u_min = outer.min_u(0.0, &xs);
                let floor = amplitude * u_min * (p.sigma - 1.0);
                if !(u_min > 0.0) || floor < 2.0 * p.delta {
                    return Err(Error::InvalidInitialData(format!(
                        "amplitude * min U (sigma - 1) = {floor} is below 2 delta = {}",
                        2.0 * p.delta
                    )));
                }
                let sigma = p.sigma;
                Ok(Field::from_fn(grid, |x, y| {
                    amplitude * outer.u_at(0.0, x, 0, 0) * (sigma - 1.0) * (1.0 + y).powf(-sigma)
                }))
            }
        }
    }
}

/// Initial state from a built-in profile.
pub fn init_from_profile(
    grid: GridSpec,
    outer: &OuterFlow,
    p: &Params,
    profile: InitialProfile,
) -> Result<State> {
    grid.validate()?;
    p.validate()?;
    let w = profile.vorticity(grid, outer, p)?;
    Ok(State::from_vorticity(w, outer, 0.0, p))
}

/// `u = U - int_y^{y_max} w`; equals `U` at the top node.
pub fn recover_u(w: &Field, outer: &OuterFlow, t: f64) -> Field {
    let g = *w.grid();
    let big_u: Vec<f64> = g.x_nodes().iter().map(|&x| outer.u_at(t, x, 0, 0)).collect();
    let mut u = tail_integral_y(w);
    for (i, &ui) in big_u.iter().enumerate() {
        u.column_mut(i).iter_mut().for_each(|v| *v = ui - *v);
    }
    u
}

/// `v = -int_0^y d_x u`; zero at the wall.
pub fn recover_v(u: &Field) -> Field {
    let dxu = deriv_x(u, 1).expect("first derivative is always supported");
    let mut v = cum_integral_y(&dxu);
    v.values_mut().iter_mut().for_each(|x| *x = -*x);
    v
}

/// `b = B - int_y^{y_max} (U - u)`.
pub fn recover_b(u: &Field, outer: &OuterFlow, t: f64, sigma: f64) -> Result<Field> {
    if sigma <= 2.0 {
        return Err(Error::MagneticRecoveryUnavailable { sigma });
    }
    let g = *u.grid();
    let xs = g.x_nodes();
    let big_u: Vec<f64> = xs.iter().map(|&x| outer.u_at(t, x, 0, 0)).collect();
    let deficit = Field::from_x_profile(g, &big_u).zip_map(u, |a, b| a - b);
    let mut b = tail_integral_y(&deficit);
    for (i, &x) in xs.iter().enumerate() {
        let bi = outer.b_at(t, x);
        b.column_mut(i).iter_mut().for_each(|v| *v = bi - *v);
    }
    Ok(b)
}

/// Largest nodal residual of the trapezoid-paired divergence
/// `(v_j - v_{j-1}) / dy + (d_x u_j + d_x u_{j-1}) / 2`.
pub fn divergence_residual(u: &Field, v: &Field) -> f64 {
    let g = *u.grid();
    let dxu = deriv_x(u, 1).expect("first derivative is always supported");
    let dy = g.dy();
    let mut worst: f64 = 0.0;
    for i in 0..g.nx {
        let (cv, cu) = (v.column(i), dxu.column(i));
        worst = worst.max(cv[0].abs());
        for j in 1..=g.ny {
            let r = (cv[j] - cv[j - 1]) / dy + 0.5 * (cu[j] + cu[j - 1]);
            worst = worst.max(r.abs());
        }
    }
    worst
}
