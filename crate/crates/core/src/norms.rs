//! Weighted Sobolev functionals of the vorticity: `H^{s,gamma}`, the
//! cancellation norm `H^{s,gamma}_g`, the good unknowns `g_k`, the pointwise
//! sum `I` and membership in the monotone class.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{deriv_x, deriv_y, weighted_l2_squared, Field};
use crate::outer::OuterFlow;
use crate::solver::{Params, State};

/// Multi-indices `(a1, a2)` with `a1 + a2 <= s`, ordered by total order.
pub fn multi_indices(s: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for total in 0..=s {
        for a1 in (0..=total).rev() {
            out.push((a1, total - a1));
        }
    }
    out
}

/// Squared weighted terms `||(1+y)^{gamma + a2} D^a f||^2` for `|a| <= s`.
pub fn hs_components(f: &Field, s: usize, gamma: f64) -> Result<Vec<((usize, usize), f64)>> {
    let mut out = Vec::new();
    for a1 in 0..=s {
        let fx = deriv_x(f, a1)?;
        for a2 in 0..=(s - a1) {
            let d = deriv_y(&fx, a2)?;
            out.push(((a1, a2), weighted_l2_squared(&d, gamma + a2 as f64)));
        }
    }
    out.sort_by_key(|&((a1, a2), _)| (a1 + a2, std::cmp::Reverse(a1)));
    Ok(out)
}

pub fn norm_hs_gamma(f: &Field, s: usize, gamma: f64) -> Result<f64> {
    Ok(hs_components(f, s, gamma)?
        .iter()
        .map(|(_, v)| v)
        .sum::<f64>()
        .sqrt())
}

/// Minimum of `(1 + y)^sigma w` and the node where it is attained.
pub fn sigma_floor_at(w: &Field, sigma: f64) -> (f64, usize, usize) {
    let g = w.grid();
    let weights: Vec<f64> = g.y_nodes().iter().map(|y| (1.0 + y).powf(sigma)).collect();
    let mut best = (f64::INFINITY, 0, 0);
    for i in 0..g.nx {
        for (j, (v, wt)) in w.column(i).iter().zip(&weights).enumerate() {
            let val = v * wt;
            if val < best.0 {
                best = (val, i, j);
            }
        }
    }
    best
}

/// `min (1 + y)^sigma w` over the grid (signed).
pub fn sigma_floor(w: &Field, sigma: f64) -> f64 {
    sigma_floor_at(w, sigma).0
}

/// Fails with `MonotonicityLost` if `(1 + y)^sigma w` drops below `delta / 2`.
pub fn floor_guard(state: &State, p: &Params) -> Result<()> {
    let (value, i, j) = sigma_floor_at(&state.w, p.sigma);
    let floor = p.w_floor();
    if value >= floor {
        Ok(())
    } else {
        let g = state.grid();
        Err(Error::MonotonicityLost {
            t: state.t,
            x: g.x(i),
            y: g.y(j),
            value,
            floor,
        })
    }
}

/// `u - U(t, .)`.
pub fn velocity_deficit(state: &State, outer: &OuterFlow) -> Field {
    state.u.sub_x_profile(&state.outer_profile(outer))
}

/// `g_k = d_x^k w - (d_y w / w) d_x^k (u - U)`.
pub fn g_k(state: &State, outer: &OuterFlow, k: usize, p: &Params) -> Result<Field> {
    floor_guard(state, p)?;
    let a = deriv_y(&state.w, 1)?.zip_map(&state.w, |dw, w| dw / w);
    let dxw = deriv_x(&state.w, k)?;
    let dxd = deriv_x(&velocity_deficit(state, outer), k)?;
    Ok(dxw.zip_map(&(&a * &dxd), |x, y| x - y))
}

/// Squared components of `H^{s,gamma}_g`: the `(s, 0)` slot holds
/// `||(1+y)^gamma g_s||^2`.
pub fn hs_g_components(
    state: &State,
    outer: &OuterFlow,
    p: &Params,
) -> Result<Vec<((usize, usize), f64)>> {
    let gs = g_k(state, outer, p.s, p)?;
    let mut comps = hs_components(&state.w, p.s, p.gamma)?;
    for (alpha, v) in comps.iter_mut() {
        if *alpha == (p.s, 0) {
            *v = weighted_l2_squared(&gs, p.gamma);
        }
    }
    Ok(comps)
}

pub fn norm_hs_gamma_g(state: &State, outer: &OuterFlow, p: &Params) -> Result<f64> {
    Ok(hs_g_components(state, outer, p)?
        .iter()
        .map(|(_, v)| v)
        .sum::<f64>()
        .sqrt())
}

/// `I = sum_{|a| <= 2} ((1+y)^{sigma + a2} D^a w)^2`, pointwise.
pub fn pointwise_i(w: &Field, sigma: f64) -> Result<Field> {
    let mut total = Field::zeros(*w.grid());
    for (a1, a2) in multi_indices(2) {
        let d = deriv_y(&deriv_x(w, a1)?, a2)?.weighted(sigma + a2 as f64);
        total = total.zip_map(&d, |acc, v| acc + v * v);
    }
    Ok(total)
}

/// Result of testing the three defining conditions of `H^{s,gamma}_{sigma,delta}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Membership {
    pub in_space: bool,
    pub floor: f64,
    /// `floor - delta`
    pub floor_margin: f64,
    pub i_sup: f64,
    /// `1 / delta^2 - I_sup`
    pub i_margin: f64,
    pub norm: f64,
    pub norm_finite: bool,
    /// Largest `delta` for which the state is a member:
    /// `min(floor, 1 / sqrt(I_sup))`.
    pub delta_eff: f64,
}

pub fn membership_check(state: &State, p: &Params) -> Result<Membership> {
    let floor = sigma_floor(&state.w, p.sigma);
    let i_sup = pointwise_i(&state.w, p.sigma)?.max();
    let norm = norm_hs_gamma(&state.w, p.s, p.gamma)?;
    let bound = 1.0 / (p.delta * p.delta);
    let norm_finite = norm.is_finite();
    let floor_ok = floor >= p.delta;
    let i_ok = i_sup <= bound;
    Ok(Membership {
        in_space: floor_ok && i_ok && norm_finite,
        floor,
        floor_margin: floor - p.delta,
        i_sup,
        i_margin: bound - i_sup,
        norm,
        norm_finite,
        delta_eff: floor.min(1.0 / i_sup.sqrt()),
    })
}

/// Per-time norm summary written to the diagnostics table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormReport {
    pub h_s_gamma: f64,
    pub h_s_gamma_g: f64,
    pub u_minus_u_outer: f64,
    pub sigma_floor: f64,
    pub i_sup: f64,
    pub components: Vec<((usize, usize), f64)>,
    pub g_components: Vec<(usize, f64)>,
}

pub fn norm_report(state: &State, outer: &OuterFlow, p: &Params) -> Result<NormReport> {
    let components = hs_components(&state.w, p.s, p.gamma)?;
    let h2: f64 = components.iter().map(|(_, v)| v).sum();
    let mut g_components = Vec::with_capacity(p.s + 1);
    for k in 0..=p.s {
        g_components.push((k, weighted_l2_squared(&g_k(state, outer, k, p)?, p.gamma).sqrt()));
    }
    let gs = g_components[p.s].1;
    let top = components
        .iter()
        .find(|(a, _)| *a == (p.s, 0))
        .map_or(0.0, |(_, v)| *v);
    let hg2 = (h2 - top + gs * gs).max(0.0);
    let deficit = velocity_deficit(state, outer);
    Ok(NormReport {
        h_s_gamma: h2.sqrt(),
        h_s_gamma_g: hg2.sqrt(),
        u_minus_u_outer: norm_hs_gamma(&deficit, p.s, p.gamma - 1.0)?,
        sigma_floor: sigma_floor(&state.w, p.sigma),
        i_sup: pointwise_i(&state.w, p.sigma)?.max(),
        components,
        g_components,
    })
}
