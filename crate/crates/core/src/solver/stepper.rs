use crate::error::{Error, Result};
use crate::grid::{deriv_x, deriv_y, Field, GridSpec};
use crate::outer::OuterFlow;
use crate::par;

use super::forcing::Forcing;
use super::tridiag::Tridiagonal;
use super::{Params, State, TopBoundary};

/// Three-band representation of `L_h = -1 + d_yy` with the boundary closures
/// folded in (the wall flux enters separately as a source).
#[derive(Debug, Clone)]
struct Operator {
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
    dirichlet_top: bool,
}

impl Operator {
    fn new(grid: &GridSpec, p: &Params) -> Self {
        let n = grid.ny_nodes();
        let inv = 1.0 / (grid.dy() * grid.dy());
        let mut lower = vec![inv; n];
        let mut diag = vec![-1.0 - 2.0 * inv; n];
        let mut upper = vec![inv; n];
        lower[0] = 0.0;
        upper[0] = 2.0 * inv;
        upper[n - 1] = 0.0;
        lower[n - 1] = 2.0 * inv;
        let dirichlet_top = p.top == TopBoundary::Dirichlet;
        if !dirichlet_top {
            diag[n - 1] -= 2.0 * p.sigma / ((1.0 + grid.y_max) * grid.dy());
        }
        Operator {
            lower,
            diag,
            upper,
            dirichlet_top,
        }
    }

    fn apply_at(&self, w: &[f64], j: usize) -> f64 {
        let n = w.len();
        let mut r = self.diag[j] * w[j];
        if j > 0 {
            r += self.lower[j] * w[j - 1];
        }
        if j + 1 < n {
            r += self.upper[j] * w[j + 1];
        }
        r
    }

    /// Factors `I - (dt / 2) L_h`.
    fn crank_nicolson(&self, dt: f64) -> Tridiagonal {
        let h = 0.5 * dt;
        let n = self.diag.len();
        let lower: Vec<f64> = self.lower.iter().map(|v| -h * v).collect();
        let mut diag: Vec<f64> = self.diag.iter().map(|v| 1.0 - h * v).collect();
        let mut upper: Vec<f64> = self.upper.iter().map(|v| -h * v).collect();
        let mut lower = lower;
        if self.dirichlet_top {
            lower[n - 1] = 0.0;
            diag[n - 1] = 1.0;
            upper[n - 1] = 0.0;
        }
        Tridiagonal::factor(&lower, &diag, &upper).expect("I - dt/2 L_h is diagonally dominant")
    }
}

/// IMEX integrator: Crank-Nicolson on `-w + d_yy w`, Adams-Bashforth 2 on
/// advection, the `eps^2 d_xx` term and any source (forward Euler on the
/// first step).
pub struct Stepper<'a> {
    grid: GridSpec,
    params: Params,
    outer: &'a OuterFlow,
    forcing: Option<&'a dyn Forcing>,
    op: Operator,
    matrix: Tridiagonal,
    previous: Option<Field>,
    xs: Vec<f64>,
}

impl<'a> Stepper<'a> {
    pub fn new(grid: GridSpec, params: Params, outer: &'a OuterFlow) -> Result<Self> {
        grid.validate()?;
        params.validate()?;
        let op = Operator::new(&grid, &params);
        let matrix = op.crank_nicolson(params.dt);
        Ok(Stepper {
            grid,
            params,
            outer,
            forcing: None,
            op,
            matrix,
            previous: None,
            xs: grid.x_nodes(),
        })
    }

    pub fn with_forcing(mut self, forcing: &'a dyn Forcing) -> Self {
        self.forcing = Some(forcing);
        self
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    /// Forgets the Adams-Bashforth history.
    pub fn reset(&mut self) {
        self.previous = None;
    }

    /// `cfl * min(dx / max|u|, dy / max|v|)`.
    pub fn admissible_dt(&self, state: &State) -> f64 {
        let cu = self.grid.dx() / state.u.max_abs();
        let cv = self.grid.dy() / state.v.max_abs();
        self.params.cfl * cu.min(cv)
    }

    fn wall_flux(&self, t: f64) -> Vec<f64> {
        self.forcing
            .and_then(|f| f.wall_flux(t, &self.xs))
            .unwrap_or_else(|| self.outer.boundary_flux_k(t, &self.xs, self.params.eps))
    }

    fn explicit_terms(&self, state: &State) -> Field {
        let dxw = deriv_x(&state.w, 1).expect("order 1");
        let dyw = deriv_y(&state.w, 1).expect("order 1");
        let dxxw = deriv_x(&state.w, 2).expect("order 2");
        let e2 = self.params.eps * self.params.eps;
        let n = self.grid.ny_nodes();
        let source = self.forcing.map(|f| f.vorticity_source(state.t, &self.grid));
        let mut out = Field::zeros(self.grid);
        let (u, v) = (state.u.values(), state.v.values());
        let (a, b, c) = (dxw.values(), dyw.values(), dxxw.values());
        let s = source.as_ref().map(|f| f.values());
        par::for_each_column(out.values_mut(), n, |i, col| {
            let off = i * n;
            for (j, o) in col.iter_mut().enumerate() {
                let k = off + j;
                *o = -u[k] * a[k] - v[k] * b[k] + e2 * c[k] + s.map_or(0.0, |s| s[k]);
            }
        });
        out
    }

    /// Advances `state` by one step of `params.dt`.
    pub fn step(&mut self, state: &State) -> Result<State> {
        let dt = self.params.dt;
        let admissible = self.admissible_dt(state);
        if dt > admissible * (1.0 + 1e-12) {
            return Err(Error::StepRejected { dt, admissible });
        }
        let explicit = self.explicit_terms(state);
        let extrapolated = match &self.previous {
            Some(prev) => explicit.zip_map(prev, |e, p| 1.5 * e - 0.5 * p),
            None => explicit.clone(),
        };
        let t_next = state.t + dt;
        let k_now = self.wall_flux(state.t);
        let k_next = self.wall_flux(t_next);
        let dy = self.grid.dy();
        let n = self.grid.ny_nodes();
        let op = &self.op;
        let matrix = &self.matrix;
        let w_old = state.w.values();
        let ex = extrapolated.values();
        let mut w_new = Field::zeros(self.grid);
        par::for_each_column(w_new.values_mut(), n, |i, col| {
            let w = &w_old[i * n..(i + 1) * n];
            let e = &ex[i * n..(i + 1) * n];
            for j in 0..n {
                col[j] = w[j] + 0.5 * dt * op.apply_at(w, j) + dt * e[j];
            }
            col[0] -= dt * (k_now[i] + k_next[i]) / dy;
            if op.dirichlet_top {
                col[n - 1] = 0.0;
            }
            matrix.solve_in_place(col);
        });
        if !w_new.is_finite() {
            return Err(Error::NumericalBlowup { t: t_next });
        }
        self.previous = Some(explicit);
        let next = State::from_vorticity(w_new, self.outer, t_next, &self.params);
        if !next.is_finite() {
            return Err(Error::NumericalBlowup { t: t_next });
        }
        Ok(next)
    }
}

/// One forward-Euler-started IMEX step with a fresh history.
pub fn step(state: &State, outer: &OuterFlow, p: &Params) -> Result<State> {
    Stepper::new(*state.grid(), *p, outer)?.step(state)
}
