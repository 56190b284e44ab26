//! Time-dependent bounds: the forcing functional `F(t)`, the Riccati-type
//! a-priori curve, the energy-rate fit, existence times and the
//! maximum-principle envelopes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::outer::OuterFlow;

use super::CheckVerdict;

fn unit() -> f64 {
    1.0
}

/// Constants of `F(t) = C_P (1 + ||d_x^{s+1} U||_inf)^s + C_s sum_l ||d_t^l K||^2_{H^{s-2l}}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForcingConstants {
    #[serde(default = "unit")]
    pub c_p: f64,
    #[serde(default = "unit")]
    pub c_s: f64,
}

impl Default for ForcingConstants {
    fn default() -> Self {
        ForcingConstants { c_p: 1.0, c_s: 1.0 }
    }
}

/// Sample count for periodic quadrature of trigonometric polynomials; the
/// rectangle rule is exact below half this wavenumber.
fn quadrature_points(outer: &OuterFlow) -> usize {
    (8 * (outer.max_wavenumber() as usize + 1)).max(256)
}

/// `F(t)` with `K = d_x P^eps - U`, using `x_length` as the period of `T`.
pub fn f_of_t(t: f64, s: usize, eps: f64, outer: &OuterFlow, consts: ForcingConstants, x_length: f64) -> f64 {
    let n = quadrature_points(outer);
    let dx = x_length / n as f64;
    let xs: Vec<f64> = (0..n).map(|i| i as f64 * dx).collect();
    let sup = xs
        .iter()
        .map(|&x| outer.u_at(t, x, s + 1, 0).abs())
        .fold(0.0, f64::max);
    let poly = consts.c_p * (1.0 + sup).powi(s as i32);
    let mut sobolev = 0.0;
    for l in 0..=s / 2 {
        for j in 0..=(s - 2 * l) {
            sobolev += xs
                .iter()
                .map(|&x| outer.flux_at(t, x, eps, j, l).powi(2))
                .sum::<f64>()
                * dx;
        }
    }
    poly + consts.c_s * sobolev
}

/// Trapezoidal cumulative integral on the sample times.
pub fn cumulative_trapezoid(ts: &[f64], values: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; ts.len()];
    for i in 1..ts.len() {
        out[i] = out[i - 1] + 0.5 * (ts[i] - ts[i - 1]) * (values[i] + values[i - 1]);
    }
    out
}

/// Value of `(E0 + int F) {1 - C (s/2 - 1) (E0 + int F)^{(s-2)/2} t}^{-2/(s-2)}`
/// and the time at which the brace vanishes.
pub fn apriori_bound(e0: f64, c: f64, s: usize, f_integral: f64, t: f64) -> Result<(f64, f64)> {
    let base = e0 + f_integral;
    let half = s as f64 / 2.0 - 1.0;
    let rate = c * half * base.powf(half);
    let blowup_time = if rate > 0.0 { 1.0 / rate } else { f64::INFINITY };
    let brace = 1.0 - rate * t;
    if brace <= 0.0 {
        return Err(Error::BoundExpired { blowup_time });
    }
    Ok((base * brace.powf(-1.0 / half), blowup_time))
}

/// Centered differences in the interior, one-sided at the ends.
pub fn time_derivative(ts: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = ts.len();
    if n < 2 {
        return vec![0.0; n];
    }
    (0..n)
        .map(|i| {
            let (a, b) = if i == 0 {
                (0, 1)
            } else if i == n - 1 {
                (n - 2, n - 1)
            } else {
                (i - 1, i + 1)
            };
            (ys[b] - ys[a]) / (ts[b] - ts[a])
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyFit {
    /// Smallest `C >= 0` with `rate <= C ||w||^s + F` at every sample.
    pub c: f64,
    pub rates: Vec<f64>,
    /// `min_i (C ||w_i||^s + F_i - rate_i)`
    pub margin: f64,
    pub verdicts: Vec<CheckVerdict>,
}

/// Fits `C` in `rate <= C ||w||^s + F` for given rates.
pub fn fit_energy_constant(ts: &[f64], rates: &[f64], hg: &[f64], f: &[f64], s: usize) -> EnergyFit {
    let n = rates.len();
    let mut c: f64 = 0.0;
    for i in 0..n {
        let excess = rates[i] - f[i];
        if excess > 0.0 {
            c = c.max(excess / hg[i].powi(s as i32));
        }
    }
    let rhs: Vec<f64> = (0..n).map(|i| c * hg[i].powi(s as i32) + f[i]).collect();
    let margin = (0..n).map(|i| rhs[i] - rates[i]).fold(f64::INFINITY, f64::min);
    let verdicts = (0..n)
        .map(|i| CheckVerdict::new(format!("energy_rate(t={})", ts[i]), rates[i], rhs[i], 1e-12))
        .collect();
    EnergyFit {
        c,
        rates: rates.to_vec(),
        margin,
        verdicts,
    }
}

/// Fits the energy inequality `d/dt ||w||^2_{Hg} <= C ||w||^s_{Hg} + F(t)`.
pub fn energy_rate_check(ts: &[f64], hg: &[f64], f: &[f64], s: usize) -> Result<EnergyFit> {
    if ts.len() < 3 {
        return Err(Error::DegenerateInput(
            "energy fit needs at least three samples".into(),
        ));
    }
    let squares: Vec<f64> = hg.iter().map(|v| v * v).collect();
    let rates = time_derivative(ts, &squares);
    Ok(fit_energy_constant(ts, &rates, hg, f, s))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExistenceTimes {
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
    pub t: f64,
}

/// Existence times of the three continuation steps.
pub fn existence_time(w0: f64, m: f64, delta: f64, c: f64, c2: f64, s: usize) -> ExistenceTimes {
    let sf = s as f64;
    let t1 = (3.0 * w0 * w0 / (c * m))
        .min((1.0 - 2f64.powf(2.0 - sf)) / (2f64.powf(sf - 2.0) * c * w0.powf(sf - 2.0)));
    let n = 1.0 + 4.0 * w0 + m;
    let ln2 = std::f64::consts::LN_2;
    let t2 = t1
        .min(1.0 / (64.0 * delta * delta * c2 * (1.0 + 4.0 * w0) * w0 * w0))
        .min(ln2 / (c * n));
    let t3 = t1
        .min(delta / (8.0 * c2 * w0))
        .min(1.0 / (6.0 * c * n))
        .min(ln2 / (c * n));
    ExistenceTimes {
        t1,
        t2,
        t3,
        t: t1.min(t2).min(t3),
    }
}

/// Upper envelope for `||I(t)||_inf`.
pub fn envelope_upper(i0: f64, c: f64, w: f64, g: f64, t: f64) -> f64 {
    i0.max(6.0 * c * c * w * w) * (c * (1.0 + g) * t).exp()
}

/// Upper envelope for `||I(t)||_inf` available when `s >= 6`.
pub fn envelope_upper_high(i0: f64, c: f64, w: f64, g: f64, t: f64) -> f64 {
    (i0 + c * (1.0 + w) * w * w * t) * (c * (1.0 + g) * t).exp()
}

/// Lower envelope for `min (1 + y)^sigma w`: the product of the two
/// bracketed factors, each clamped at zero.
pub fn envelope_lower(floor0: f64, c: f64, w: f64, g: f64, t: f64) -> f64 {
    let a = c * (1.0 + g) * t;
    let damping = (1.0 - a * a.exp()).max(0.0);
    let drift = (floor0 - c * w * t).max(0.0);
    damping * drift
}

/// Running supremum.
pub fn running_sup(values: &[f64]) -> Vec<f64> {
    let mut best = f64::NEG_INFINITY;
    values
        .iter()
        .map(|&v| {
            best = best.max(v);
            best
        })
        .collect()
}

/// Smallest `C >= 0` for which the `s >= 4` upper envelope dominates every
/// measured `I_sup`, found by bisection on each sample.
pub fn fit_envelope_constant(ts: &[f64], hg: &[f64], us: &[f64], i_sup: &[f64]) -> f64 {
    let big_w = running_sup(hg);
    let sup_us = running_sup(us);
    let i0 = i_sup[0];
    let mut c: f64 = 0.0;
    for i in 0..ts.len() {
        let g = big_w[i] + sup_us[i];
        let covers = |c: f64| envelope_upper(i0, c, big_w[i], g, ts[i]) >= i_sup[i];
        if covers(c) {
            continue;
        }
        let mut hi = c.max(1e-12);
        while !covers(hi) {
            hi *= 2.0;
            if !hi.is_finite() {
                return f64::INFINITY;
            }
        }
        let mut lo = c;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if covers(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        c = hi;
    }
    c
}

/// Envelope curves and verdicts along a series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Envelopes {
    pub upper: Vec<f64>,
    pub upper_high: Option<Vec<f64>>,
    pub lower: Vec<f64>,
    pub big_g: Vec<f64>,
    pub big_w: Vec<f64>,
    pub upper_verdicts: Vec<CheckVerdict>,
    pub lower_verdicts: Vec<CheckVerdict>,
}

/// Evaluates the envelopes with constant `c` on a series of
/// `(t, ||w||_{Hg}, ||d_x^s U||, I_sup, sigma_floor)` samples.
pub fn max_principle_envelopes(
    ts: &[f64],
    hg: &[f64],
    us: &[f64],
    i_sup: &[f64],
    floor: &[f64],
    c: f64,
    s: usize,
) -> Envelopes {
    let big_w = running_sup(hg);
    let sup_us = running_sup(us);
    let big_g: Vec<f64> = big_w.iter().zip(&sup_us).map(|(a, b)| a + b).collect();
    let n = ts.len();
    let upper: Vec<f64> = (0..n)
        .map(|i| envelope_upper(i_sup[0], c, big_w[i], big_g[i], ts[i]))
        .collect();
    let upper_high = (s >= 6).then(|| {
        (0..n)
            .map(|i| envelope_upper_high(i_sup[0], c, big_w[i], big_g[i], ts[i]))
            .collect()
    });
    let lower: Vec<f64> = (0..n)
        .map(|i| envelope_lower(floor[0], c, big_w[i], big_g[i], ts[i]))
        .collect();
    let upper_verdicts = (0..n)
        .map(|i| CheckVerdict::new(format!("I_sup(t={})", ts[i]), i_sup[i], upper[i], 1e-12))
        .collect();
    let lower_verdicts = (0..n)
        .map(|i| CheckVerdict::new(format!("floor(t={})", ts[i]), lower[i], floor[i], 1e-12))
        .collect();
    Envelopes {
        upper,
        upper_high,
        lower,
        big_g,
        big_w,
        upper_verdicts,
        lower_verdicts,
    }
}
