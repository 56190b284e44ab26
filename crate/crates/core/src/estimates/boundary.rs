//! Odd y-derivatives of the vorticity at the wall, expressed through the
//! wall flux `K = d_x P^eps - U` and lower-order traces.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{deriv_x, YStencil};
use crate::outer::OuterFlow;
use crate::solver::{Params, State};

/// Formula value and one-sided finite-difference value of `d_y^n w|_{y=0}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryCheck {
    pub order: usize,
    pub formula: Vec<f64>,
    pub numeric: Vec<f64>,
    /// `max_x |formula - numeric|`
    pub residual: f64,
}

fn is_x_independent(state: &State) -> bool {
    let g = state.grid();
    let first = state.w.column(0);
    let scale = state.w.max_abs().max(1e-300);
    (1..g.nx).all(|i| {
        state
            .w
            .column(i)
            .iter()
            .zip(first)
            .all(|(a, b)| (a - b).abs() <= 1e-12 * scale)
    })
}

/// Orders 1 and 3 hold for any data; order 5 is only available for
/// x-independent flow and state, where `d_y^5 w|_0 = (d_t + 1)^2 K`.
pub fn boundary_derivative(
    state: &State,
    outer: &OuterFlow,
    p: &Params,
    order: usize,
) -> Result<BoundaryCheck> {
    let g = *state.grid();
    let xs = g.x_nodes();
    let t = state.t;
    let eps = p.eps;
    let formula: Vec<f64> = match order {
        1 => xs.iter().map(|&x| outer.flux_at(t, x, eps, 0, 0)).collect(),
        3 => {
            let wx = deriv_x(&state.w, 1)?;
            xs.iter()
                .enumerate()
                .map(|(i, &x)| {
                    outer.flux_at(t, x, eps, 0, 1) - eps * eps * outer.flux_at(t, x, eps, 2, 0)
                        + outer.flux_at(t, x, eps, 0, 0)
                        + state.w.at(i, 0) * wx.at(i, 0)
                })
                .collect()
        }
        5 => {
            if !outer.is_x_independent() || !is_x_independent(state) {
                return Err(Error::UnsupportedCase(
                    "order-5 wall reduction is only available for x-independent data".into(),
                ));
            }
            xs.iter()
                .map(|&x| {
                    outer.flux_at(t, x, eps, 0, 2)
                        + 2.0 * outer.flux_at(t, x, eps, 0, 1)
                        + outer.flux_at(t, x, eps, 0, 0)
                })
                .collect()
        }
        _ => {
            return Err(Error::UnsupportedCase(format!(
                "wall reduction of order {order}; supported orders are 1, 3, 5"
            )))
        }
    };
    let stencil = YStencil::new(order, g.dy());
    let numeric: Vec<f64> = (0..g.nx).map(|i| stencil.at_wall(state.w.column(i))).collect();
    let residual = formula
        .iter()
        .zip(&numeric)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    Ok(BoundaryCheck {
        order,
        formula,
        numeric,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Field, GridSpec};
    use crate::solver::{init_from_profile, InitialProfile};

    #[test]
    fn constant_flow_formulas() {
        let g = GridSpec::new(16, 128, 30.0).unwrap();
        let outer = OuterFlow::constant(1.0);
        let p = Params {
            eps: 0.0,
            ..Params::default()
        };
        let s = init_from_profile(g, &outer, &p, InitialProfile::default()).unwrap();
        for order in [1, 3, 5] {
            let b = boundary_derivative(&s, &outer, &p, order).unwrap();
            assert!(b.formula.iter().all(|&v| v == -1.0), "order {order}");
        }
    }

    #[test]
    fn unsupported_cases() {
        let g = GridSpec::new(16, 128, 30.0).unwrap();
        let outer = OuterFlow::sinusoidal(0.1);
        let p = Params::default();
        let s = init_from_profile(g, &outer, &p, InitialProfile::default()).unwrap();
        assert!(matches!(
            boundary_derivative(&s, &outer, &p, 5),
            Err(Error::UnsupportedCase(_))
        ));
        assert!(boundary_derivative(&s, &outer, &p, 2).is_err());
        let flat = OuterFlow::constant(1.0);
        let w = Field::from_fn(g, |x, y| (1.0 + 0.1 * x.sin()) * (-y).exp());
        let s = State::from_vorticity(w, &flat, 0.0, &p);
        assert!(boundary_derivative(&s, &flat, &p, 5).is_err());
    }
}
