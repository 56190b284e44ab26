//! Difference quantity `g = (w1 - w2) - (d_y w2 / w2)(u1 - u2)` of two
//! solutions and its Gronwall growth.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{deriv_y, weighted_l2};
use crate::norms::floor_guard;
use crate::solver::{Params, State};

/// Threshold on `max ||g||` in the uniqueness branch.
pub const UNIQUENESS_TOLERANCE: f64 = 1e-10;

/// Unweighted `L^2` norm of `g`; `state2` must pass the floor guard.
pub fn perturbation_gbar(state1: &State, state2: &State, p: &Params) -> Result<f64> {
    floor_guard(state2, p)?;
    if state1.grid() != state2.grid() {
        return Err(Error::InvalidGrid("states live on different grids".into()));
    }
    let a2 = deriv_y(&state2.w, 1)?.zip_map(&state2.w, |d, w| d / w);
    let dw = &state1.w - &state2.w;
    let du = &state1.u - &state2.u;
    let g = dw.zip_map(&(&a2 * &du), |x, y| x - y);
    Ok(weighted_l2(&g, 0.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GronwallFit {
    /// Smallest `C >= 0` with `||g(t)||^2 <= ||g(0)||^2 e^{C t}`; zero in
    /// the uniqueness branch.
    pub c: f64,
    pub uniqueness_branch: bool,
    pub max_gbar: f64,
    pub pass: bool,
}

pub fn gronwall_check(ts: &[f64], gbar: &[f64]) -> Result<GronwallFit> {
    if ts.len() < 3 || ts.len() != gbar.len() {
        return Err(Error::DegenerateInput(
            "Gronwall fit needs at least three matched samples".into(),
        ));
    }
    let max_gbar = gbar.iter().cloned().fold(0.0, f64::max);
    if gbar[0] == 0.0 {
        return Ok(GronwallFit {
            c: 0.0,
            uniqueness_branch: true,
            max_gbar,
            pass: max_gbar <= UNIQUENESS_TOLERANCE,
        });
    }
    let g0 = gbar[0] * gbar[0];
    let mut c: f64 = 0.0;
    for (&t, &g) in ts.iter().zip(gbar).skip(1) {
        if t > ts[0] {
            c = c.max((g * g / g0).ln() / (t - ts[0]));
        }
    }
    Ok(GronwallFit {
        c,
        uniqueness_branch: false,
        max_gbar,
        pass: c.is_finite(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{deriv_y, GridSpec};
    use crate::outer::OuterFlow;
    use crate::solver::{init_from_profile, InitialProfile};

    fn base(ny: usize) -> (State, OuterFlow, Params) {
        let g = GridSpec::new(8, ny, 30.0).unwrap();
        let outer = OuterFlow::constant(1.0);
        let p = Params::default();
        let s = init_from_profile(g, &outer, &p, InitialProfile::default()).unwrap();
        (s, outer, p)
    }

    #[test]
    fn identical_states_give_zero() {
        let (s, _, p) = base(128);
        assert_eq!(perturbation_gbar(&s, &s, &p).unwrap(), 0.0);
    }

    #[test]
    fn kernel_direction_is_annihilated() {
        let (s2, _, p) = base(256);
        let c = 0.3;
        let mut s1 = s2.clone();
        s1.u = &s2.u + &s2.w.scale(c);
        s1.w = &s2.w + &deriv_y(&s2.w, 1).unwrap().scale(c);
        let g = perturbation_gbar(&s1, &s2, &p).unwrap();
        assert!(g < 1e-12, "{g}");
    }

    #[test]
    fn amplitude_perturbation_matches_closed_form() {
        let (s2, outer, p) = base(4096);
        let g = *s2.grid();
        let s1 = init_from_profile(g, &outer, &p, InitialProfile::PowerLaw { amplitude: 1.01 }).unwrap();
        let num = perturbation_gbar(&s1, &s2, &p).unwrap();
        // g = 0.01 [-(1+y)^{-2.5} + 2.5 * 31^{-1.5} (1+y)^{-1}] with x-measure 2 pi
        let tail = 2.5 * 31f64.powf(-1.5);
        let n = 200_000;
        let h = 30.0 / n as f64;
        let mut sum = 0.0;
        for j in 0..=n {
            let y = j as f64 * h;
            let v = 0.01 * (-(1.0 + y).powf(-2.5) + tail / (1.0 + y));
            let wgt = if j == 0 || j == n { 0.5 } else { 1.0 };
            sum += wgt * v * v * h;
        }
        let exact = (2.0 * std::f64::consts::PI * sum).sqrt();
        assert!((num - exact).abs() < 1e-3 * exact, "{num} vs {exact}");
    }

    #[test]
    fn gronwall_examples() {
        let ts = [0.0, 0.1, 0.2, 0.3];
        let gbar: Vec<f64> = ts.iter().map(|t: &f64| 0.5 * t.exp()).collect();
        let fit = gronwall_check(&ts, &gbar).unwrap();
        assert!((fit.c - 2.0).abs() < 1e-12);
        assert!(fit.pass && !fit.uniqueness_branch);
        let fit = gronwall_check(&ts, &[0.0, 1e-14, 0.0, 2e-14]).unwrap();
        assert!(fit.uniqueness_branch && fit.pass);
        let fit = gronwall_check(&ts, &[0.0, 1e-3, 0.0, 0.0]).unwrap();
        assert!(!fit.pass);
        assert!(gronwall_check(&ts[..2], &gbar[..2]).is_err());
    }
}
