//! Closed-form outer flow `U(t, x)`, far-field magnetic field `B(t, x)`,
//! and the pressure gradient given by the regularized Bernoulli law.
//!
//! Every quantity is a finite sum of separable terms
//! `amp * T(t) * X(k x)` with `X` a sine or cosine and `T` constant,
//! exponential or monomial, so all derivatives are exact.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Oscillating factor in x.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Sin,
    #[default]
    Cos,
}

/// Time dependence of a term.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeMode {
    #[default]
    Const,
    /// `exp(-a t)`
    Exp { a: f64 },
    /// `t^m`
    Poly { m: u32 },
}

impl TimeMode {
    fn derivative(&self, t: f64, l: usize) -> f64 {
        match *self {
            TimeMode::Const => {
                if l == 0 {
                    1.0
                } else {
                    0.0
                }
            }
            TimeMode::Exp { a } => (-a).powi(l as i32) * (-a * t).exp(),
            TimeMode::Poly { m } => {
                let m = m as usize;
                if l > m {
                    return 0.0;
                }
                let falling: f64 = ((m - l + 1)..=m).map(|v| v as f64).product();
                falling * t.powi((m - l) as i32)
            }
        }
    }

    fn is_const(&self) -> bool {
        matches!(self, TimeMode::Const) || matches!(self, TimeMode::Exp { a } if *a == 0.0)
            || matches!(self, TimeMode::Poly { m: 0 })
    }
}

/// `amp * T(t) * X(k x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub amp: f64,
    #[serde(default)]
    pub k: u32,
    #[serde(default)]
    pub phase: Phase,
    #[serde(default)]
    pub t_mode: TimeMode,
}

impl Term {
    pub fn constant(amp: f64) -> Self {
        Term {
            amp,
            k: 0,
            phase: Phase::Cos,
            t_mode: TimeMode::Const,
        }
    }

    pub fn sin(amp: f64, k: u32) -> Self {
        Term {
            amp,
            k,
            phase: Phase::Sin,
            t_mode: TimeMode::Const,
        }
    }

    pub fn cos(amp: f64, k: u32) -> Self {
        Term {
            amp,
            k,
            phase: Phase::Cos,
            t_mode: TimeMode::Const,
        }
    }

    pub fn with_time(mut self, t_mode: TimeMode) -> Self {
        self.t_mode = t_mode;
        self
    }

    fn space_derivative(&self, x: f64, n: usize) -> f64 {
        let k = self.k as f64;
        if self.k == 0 {
            return match (self.phase, n) {
                (Phase::Cos, 0) => 1.0,
                _ => 0.0,
            };
        }
        let arg = k * x;
        let shift = match self.phase {
            Phase::Sin => 0,
            Phase::Cos => 1,
        };
        let base = match (n + shift) % 4 {
            0 => arg.sin(),
            1 => arg.cos(),
            2 => -arg.sin(),
            _ => -arg.cos(),
        };
        k.powi(n as i32) * base
    }

    fn eval(&self, t: f64, x: f64, k: usize, l: usize) -> f64 {
        self.amp * self.t_mode.derivative(t, l) * self.space_derivative(x, k)
    }
}

fn sum_terms(terms: &[Term], t: f64, x: f64, k: usize, l: usize) -> f64 {
    terms.iter().map(|term| term.eval(t, x, k, l)).sum()
}

fn binomial(n: usize, r: usize) -> f64 {
    (0..r).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn default_u() -> Vec<Term> {
    vec![Term::constant(1.0)]
}

fn default_b() -> Vec<Term> {
    vec![Term::constant(1.0)]
}

fn default_max_k() -> usize {
    6
}

fn default_max_l() -> usize {
    3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OuterFlow {
    #[serde(default = "default_u")]
    pub u: Vec<Term>,
    #[serde(default = "default_b")]
    pub b: Vec<Term>,
    #[serde(skip, default = "default_max_k")]
    max_k: usize,
    #[serde(skip, default = "default_max_l")]
    max_l: usize,
}

impl Default for OuterFlow {
    fn default() -> Self {
        OuterFlow::new(default_u(), default_b())
    }
}

impl OuterFlow {
    pub fn new(u: Vec<Term>, b: Vec<Term>) -> Self {
        OuterFlow {
            u,
            b,
            max_k: default_max_k(),
            max_l: default_max_l(),
        }
    }

    /// `U = c`, `B = 1`.
    pub fn constant(c: f64) -> Self {
        OuterFlow::new(vec![Term::constant(c)], default_b())
    }

    /// `U = 1 + amp sin x`, steady, `B = 1`.
    pub fn sinusoidal(amp: f64) -> Self {
        OuterFlow::new(vec![Term::constant(1.0), Term::sin(amp, 1)], default_b())
    }

    /// Sets the public derivative limits `k <= s + 2`, `l <= s/2 + 1`.
    pub fn with_norm_order(mut self, s: usize) -> Self {
        self.max_k = s + 2;
        self.max_l = s / 2 + 1;
        self
    }

    pub fn is_x_independent(&self) -> bool {
        self.u.iter().all(|t| t.k == 0)
    }

    pub fn is_steady(&self) -> bool {
        self.u.iter().all(|t| t.t_mode.is_const())
    }

    fn check(&self, k: usize, l: usize) -> Result<()> {
        if k > self.max_k {
            return Err(Error::UnsupportedOrder {
                order: k,
                max: self.max_k,
            });
        }
        if l > self.max_l {
            return Err(Error::UnsupportedOrder {
                order: l,
                max: self.max_l,
            });
        }
        Ok(())
    }

    /// `d_t^l d_x^k U(t, x)` at a point, without order limits.
    pub fn u_at(&self, t: f64, x: f64, k: usize, l: usize) -> f64 {
        sum_terms(&self.u, t, x, k, l)
    }

    pub fn b_at(&self, t: f64, x: f64) -> f64 {
        sum_terms(&self.b, t, x, 0, 0)
    }

    /// `d_t^l d_x^k U` sampled at `xs`.
    pub fn eval_u(&self, t: f64, xs: &[f64], k: usize, l: usize) -> Result<Vec<f64>> {
        self.check(k, l)?;
        Ok(xs.iter().map(|&x| self.u_at(t, x, k, l)).collect())
    }

    pub fn eval_b(&self, t: f64, xs: &[f64]) -> Vec<f64> {
        xs.iter().map(|&x| self.b_at(t, x)).collect()
    }

    /// `d_t^l d_x^k` of `d_x P^eps = -U_t - U U_x + eps^2 U_xx`.
    pub fn pressure_gradient_at(&self, t: f64, x: f64, eps: f64, k: usize, l: usize) -> f64 {
        let mut convective = 0.0;
        for a in 0..=l {
            for b in 0..=k {
                convective += binomial(l, a)
                    * binomial(k, b)
                    * self.u_at(t, x, b, a)
                    * self.u_at(t, x, k - b + 1, l - a);
            }
        }
        -self.u_at(t, x, k, l + 1) - convective + eps * eps * self.u_at(t, x, k + 2, l)
    }

    pub fn pressure_gradient(&self, t: f64, xs: &[f64], eps: f64) -> Vec<f64> {
        xs.iter()
            .map(|&x| self.pressure_gradient_at(t, x, eps, 0, 0))
            .collect()
    }

    /// `d_t^l d_x^k K` with `K = d_x P^eps - U`.
    pub fn flux_at(&self, t: f64, x: f64, eps: f64, k: usize, l: usize) -> f64 {
        self.pressure_gradient_at(t, x, eps, k, l) - self.u_at(t, x, k, l)
    }

    /// Wall flux `K(t, x)` sampled at `xs`.
    pub fn boundary_flux_k(&self, t: f64, xs: &[f64], eps: f64) -> Vec<f64> {
        xs.iter().map(|&x| self.flux_at(t, x, eps, 0, 0)).collect()
    }

    pub fn min_u(&self, t: f64, xs: &[f64]) -> f64 {
        xs.iter()
            .map(|&x| self.u_at(t, x, 0, 0))
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest wavenumber present in `U` or `B`.
    pub fn max_wavenumber(&self) -> u32 {
        self.u.iter().chain(&self.b).map(|t| t.k).max().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn xs() -> Vec<f64> {
        (0..64).map(|i| 2.0 * PI * i as f64 / 64.0).collect()
    }

    #[test]
    fn constant_flow_has_no_derivatives() {
        let o = OuterFlow::constant(1.0);
        for k in 0..=6 {
            for l in 0..=3 {
                if k + l > 0 {
                    assert!(o.eval_u(0.3, &xs(), k, l).unwrap().iter().all(|&v| v == 0.0));
                }
            }
        }
        assert!(o.pressure_gradient(0.0, &xs(), 0.3).iter().all(|&v| v == 0.0));
        assert!(o.boundary_flux_k(0.0, &xs(), 0.0).iter().all(|&v| v == -1.0));
    }

    #[test]
    fn sinusoidal_derivatives() {
        let o = OuterFlow::sinusoidal(0.1);
        let d = o.eval_u(0.0, &xs(), 1, 0).unwrap();
        for (x, v) in xs().iter().zip(d) {
            assert!((v - 0.1 * x.cos()).abs() < 1e-15);
        }
        let d4 = o.eval_u(0.0, &xs(), 4, 0).unwrap();
        for (x, v) in xs().iter().zip(d4) {
            assert!((v - 0.1 * x.sin()).abs() < 1e-15);
        }
    }

    #[test]
    fn time_derivatives() {
        let o = OuterFlow::new(
            vec![
                Term::constant(1.0),
                Term::sin(0.1, 1).with_time(TimeMode::Exp { a: 1.0 }),
            ],
            vec![],
        );
        let t = 0.4;
        let d = o.eval_u(t, &xs(), 0, 1).unwrap();
        for (x, v) in xs().iter().zip(d) {
            assert!((v + 0.1 * (-t).exp() * x.sin()).abs() < 1e-15);
        }
        assert!(!o.is_steady());
        let p = TimeMode::Poly { m: 3 };
        assert_eq!(p.derivative(2.0, 0), 8.0);
        assert_eq!(p.derivative(2.0, 1), 12.0);
        assert_eq!(p.derivative(2.0, 3), 6.0);
        assert_eq!(p.derivative(2.0, 4), 0.0);
    }

    #[test]
    fn bernoulli_pressure() {
        let o = OuterFlow::sinusoidal(0.1);
        let p0 = o.pressure_gradient(0.0, &xs(), 0.0);
        let p1 = o.pressure_gradient(0.0, &xs(), 0.1);
        let k0 = o.boundary_flux_k(0.0, &xs(), 0.0);
        for (i, x) in xs().iter().enumerate() {
            let u = 1.0 + 0.1 * x.sin();
            let expect = -u * 0.1 * x.cos();
            assert!((p0[i] - expect).abs() < 1e-12);
            assert!((p1[i] - (expect - 0.01 * 0.1 * x.sin())).abs() < 1e-12);
            assert!((k0[i] - (expect - u)).abs() < 1e-12);
        }
        let zero = OuterFlow::constant(0.0);
        assert!(zero.boundary_flux_k(0.0, &xs(), 0.2).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn pressure_derivatives_match_finite_differences() {
        let o = OuterFlow::new(
            vec![
                Term::constant(1.0),
                Term::sin(0.2, 1).with_time(TimeMode::Exp { a: 0.5 }),
                Term::cos(0.05, 2).with_time(TimeMode::Poly { m: 2 }),
            ],
            vec![],
        );
        let (t, x, eps, h) = (0.3, 0.7, 0.1, 1e-4);
        let dt = (o.pressure_gradient_at(t + h, x, eps, 0, 0)
            - o.pressure_gradient_at(t - h, x, eps, 0, 0))
            / (2.0 * h);
        assert!((dt - o.pressure_gradient_at(t, x, eps, 0, 1)).abs() < 1e-7);
        let dx = (o.pressure_gradient_at(t, x + h, eps, 1, 1)
            - o.pressure_gradient_at(t, x - h, eps, 1, 1))
            / (2.0 * h);
        assert!((dx - o.pressure_gradient_at(t, x, eps, 2, 1)).abs() < 1e-7);
    }

    #[test]
    fn order_limits() {
        let o = OuterFlow::constant(1.0).with_norm_order(4);
        assert!(o.eval_u(0.0, &xs(), 6, 3).is_ok());
        assert!(matches!(
            o.eval_u(0.0, &xs(), 7, 0),
            Err(Error::UnsupportedOrder { order: 7, max: 6 })
        ));
        assert!(o.eval_u(0.0, &xs(), 0, 4).is_err());
    }

    #[test]
    fn serde_shape() {
        let o: OuterFlow = serde_json::from_str(
            r#"{"u":[{"amp":1.0},{"amp":0.1,"k":1,"phase":"sin","t_mode":{"exp":{"a":1.0}}}]}"#,
        )
        .unwrap();
        assert_eq!(o.u[1].t_mode, TimeMode::Exp { a: 1.0 });
        assert_eq!(o.b, default_b());
        let back: OuterFlow = serde_json::from_str(&serde_json::to_string(&o).unwrap()).unwrap();
        assert_eq!(back, o);
    }
}
