use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Far-field closure for `w` at `y = y_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TopBoundary {
    /// Robin condition `d_y w = -sigma w / (1 + y_max)`, exact for
    /// `(1 + y)^{-sigma}` tails.
    #[default]
    PowerLawDecay,
    /// `w(y_max) = 0`.
    Dirichlet,
}

fn d_s() -> usize {
    4
}
fn d_gamma() -> f64 {
    1.0
}
fn d_sigma() -> f64 {
    2.5
}
fn d_delta() -> f64 {
    0.1
}
fn d_eps() -> f64 {
    0.1
}
fn d_dt() -> f64 {
    0.005
}
fn d_cfl() -> f64 {
    0.5
}
fn d_t_end() -> f64 {
    0.1
}

/// Physical, norm and time-stepping parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default = "d_s")]
    pub s: usize,
    #[serde(default = "d_gamma")]
    pub gamma: f64,
    #[serde(default = "d_sigma")]
    pub sigma: f64,
    #[serde(default = "d_delta")]
    pub delta: f64,
    #[serde(default = "d_eps")]
    pub eps: f64,
    #[serde(default = "d_dt")]
    pub dt: f64,
    #[serde(default = "d_cfl")]
    pub cfl: f64,
    #[serde(default = "d_t_end")]
    pub t_end: f64,
    #[serde(default)]
    pub top: TopBoundary,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            s: d_s(),
            gamma: d_gamma(),
            sigma: d_sigma(),
            delta: d_delta(),
            eps: d_eps(),
            dt: d_dt(),
            cfl: d_cfl(),
            t_end: d_t_end(),
            top: TopBoundary::default(),
        }
    }
}

impl Params {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::InvalidParams(m.to_string()));
        if self.s < 4 || !self.s.is_multiple_of(2) {
            return fail("s must be even and >= 4");
        }
        if !(self.gamma >= 1.0) {
            return fail("gamma must be >= 1");
        }
        if !(self.sigma > self.gamma + 0.5) {
            return fail("sigma must exceed gamma + 1/2");
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return fail("delta must lie in (0, 1)");
        }
        if !(self.eps >= 0.0) || !self.eps.is_finite() {
            return fail("eps must be >= 0");
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return fail("dt must be positive");
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return fail("cfl must lie in (0, 1]");
        }
        if !(self.t_end >= 0.0) || !self.t_end.is_finite() {
            return fail("t_end must be >= 0");
        }
        Ok(())
    }

    /// Lower bound on `(1 + y)^sigma w` below which `d_y w / w` is not trusted.
    pub fn w_floor(&self) -> f64 {
        0.5 * self.delta
    }

    /// Number of steps needed to reach `t_end`.
    pub fn n_steps(&self) -> usize {
        let n = self.t_end / self.dt;
        let r = n.round();
        if (n - r).abs() < 1e-9 * n.max(1.0) {
            r as usize
        } else {
            n.ceil() as usize
        }
    }
}
