//! Discrete geometry on `T x [0, y_max]`: derivative stencils, trapezoidal
//! quadrature and weighted inner products.
//!
//! Fields are stored x-major: the `ny + 1` samples of one x-column are
//! contiguous, so every y-operation (stencils, cumulative integrals,
//! tridiagonal solves) works on a contiguous slice.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;

/// Highest derivative order a grid accepts unless configured otherwise.
pub const DEFAULT_MAX_ORDER: usize = 8;

fn default_x_length() -> f64 {
    2.0 * PI
}

fn default_nx() -> usize {
    64
}

fn default_ny() -> usize {
    128
}

fn default_y_max() -> f64 {
    30.0
}

fn default_max_order() -> usize {
    DEFAULT_MAX_ORDER
}

/// Periodic-in-x, truncated half-line-in-y tensor mesh.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default = "default_nx")]
    pub nx: usize,
    #[serde(default = "default_ny")]
    pub ny: usize,
    #[serde(default = "default_x_length")]
    pub x_length: f64,
    #[serde(default = "default_y_max")]
    pub y_max: f64,
    #[serde(default = "default_max_order")]
    pub max_order: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            nx: default_nx(),
            ny: default_ny(),
            x_length: default_x_length(),
            y_max: default_y_max(),
            max_order: DEFAULT_MAX_ORDER,
        }
    }
}

impl GridSpec {
    pub fn new(nx: usize, ny: usize, y_max: f64) -> Result<Self> {
        let g = GridSpec {
            nx,
            ny,
            y_max,
            ..GridSpec::default()
        };
        g.validate()?;
        Ok(g)
    }

    pub fn with_max_order(mut self, max_order: usize) -> Self {
        self.max_order = max_order;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx < 8 || !self.nx.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "nx must be even and >= 8 (got {})",
                self.nx
            )));
        }
        if self.ny < 16 {
            return Err(Error::InvalidGrid(format!(
                "ny must be >= 16 (got {})",
                self.ny
            )));
        }
        if !(self.y_max >= 10.0) || !self.y_max.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "y_max must be >= 10 (got {})",
                self.y_max
            )));
        }
        if !(self.x_length > 0.0) || !self.x_length.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "x_length must be positive (got {})",
                self.x_length
            )));
        }
        if self.ny + 1 < self.max_order + 2 {
            return Err(Error::InvalidGrid(format!(
                "ny = {} is too small for derivative order {}",
                self.ny, self.max_order
            )));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        self.x_length / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        self.y_max / self.ny as f64
    }

    /// Number of y nodes, `ny + 1`.
    pub fn ny_nodes(&self) -> usize {
        self.ny + 1
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny_nodes()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.dx()
    }

    pub fn y(&self, j: usize) -> f64 {
        if j == self.ny {
            self.y_max
        } else {
            j as f64 * self.dy()
        }
    }

    pub fn x_nodes(&self) -> Vec<f64> {
        (0..self.nx).map(|i| self.x(i)).collect()
    }

    pub fn y_nodes(&self) -> Vec<f64> {
        (0..=self.ny).map(|j| self.y(j)).collect()
    }

    /// Trapezoidal weights in y (without the dx factor).
    pub fn y_weights(&self) -> Vec<f64> {
        trapezoid_weights(self.ny, self.dy())
    }

    fn check_order(&self, k: usize) -> Result<()> {
        if k > self.max_order {
            Err(Error::UnsupportedOrder {
                order: k,
                max: self.max_order,
            })
        } else {
            Ok(())
        }
    }
}

fn trapezoid_weights(ny: usize, dy: f64) -> Vec<f64> {
    let mut w = vec![dy; ny + 1];
    w[0] = 0.5 * dy;
    w[ny] = 0.5 * dy;
    w
}

/// Scalar samples on a [`GridSpec`], x-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: GridSpec,
    values: Vec<f64>,
}

impl Field {
    pub fn zeros(grid: GridSpec) -> Self {
        Field {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn constant(grid: GridSpec, c: f64) -> Self {
        Field {
            grid,
            values: vec![c; grid.len()],
        }
    }

    pub fn from_fn<F: Fn(f64, f64) -> f64>(grid: GridSpec, f: F) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..grid.nx {
            let x = grid.x(i);
            for j in 0..=grid.ny {
                values.push(f(x, grid.y(j)));
            }
        }
        Field { grid, values }
    }

    pub fn from_values(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Field { grid, values })
    }

    /// Broadcasts an x-profile along y.
    pub fn from_x_profile(grid: GridSpec, profile: &[f64]) -> Self {
        assert_eq!(profile.len(), grid.nx, "x-profile length mismatch");
        let mut f = Field::zeros(grid);
        for (i, &p) in profile.iter().enumerate() {
            f.column_mut(i).fill(p);
        }
        f
    }

    /// Broadcasts a y-profile along x.
    pub fn from_y_profile(grid: GridSpec, profile: &[f64]) -> Self {
        assert_eq!(profile.len(), grid.ny_nodes(), "y-profile length mismatch");
        let mut f = Field::zeros(grid);
        for i in 0..grid.nx {
            f.column_mut(i).copy_from_slice(profile);
        }
        f
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn column(&self, i: usize) -> &[f64] {
        let n = self.grid.ny_nodes();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn column_mut(&mut self, i: usize) -> &mut [f64] {
        let n = self.grid.ny_nodes();
        &mut self.values[i * n..(i + 1) * n]
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.ny_nodes() + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let n = self.grid.ny_nodes();
        self.values[i * n + j] = v;
    }

    /// Values at a fixed y-node, one per x-node.
    pub fn row(&self, j: usize) -> Vec<f64> {
        (0..self.grid.nx).map(|i| self.at(i, j)).collect()
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Field {
        Field {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise map with access to the node coordinates.
    pub fn map_with_coords<F: Fn(f64, f64, f64) -> f64>(&self, f: F) -> Field {
        let mut out = self.clone();
        let n = self.grid.ny_nodes();
        for i in 0..self.grid.nx {
            let x = self.grid.x(i);
            for j in 0..n {
                out.values[i * n + j] = f(x, self.grid.y(j), self.values[i * n + j]);
            }
        }
        out
    }

    pub fn zip_map<F: Fn(f64, f64) -> f64>(&self, other: &Field, f: F) -> Field {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        Field {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn scale(&self, c: f64) -> Field {
        self.map(|v| c * v)
    }

    /// Subtracts an x-profile from every column.
    pub fn sub_x_profile(&self, profile: &[f64]) -> Field {
        assert_eq!(profile.len(), self.grid.nx, "x-profile length mismatch");
        let mut out = self.clone();
        for (i, &p) in profile.iter().enumerate() {
            out.column_mut(i).iter_mut().for_each(|v| *v -= p);
        }
        out
    }

    /// Multiplies every node by `(1 + y)^lambda`.
    pub fn weighted(&self, lambda: f64) -> Field {
        let weights: Vec<f64> = self
            .grid
            .y_nodes()
            .iter()
            .map(|y| (1.0 + y).powf(lambda))
            .collect();
        let mut out = self.clone();
        for i in 0..self.grid.nx {
            out.column_mut(i)
                .iter_mut()
                .zip(&weights)
                .for_each(|(v, w)| *v *= w);
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

impl Add for &Field {
    type Output = Field;
    fn add(self, rhs: &Field) -> Field {
        self.zip_map(rhs, |a, b| a + b)
    }
}

impl Sub for &Field {
    type Output = Field;
    fn sub(self, rhs: &Field) -> Field {
        self.zip_map(rhs, |a, b| a - b)
    }
}

impl Mul for &Field {
    type Output = Field;
    fn mul(self, rhs: &Field) -> Field {
        self.zip_map(rhs, |a, b| a * b)
    }
}

impl Neg for &Field {
    type Output = Field;
    fn neg(self) -> Field {
        self.map(|v| -v)
    }
}

// ---------------------------------------------------------------------------
// Finite-difference weights
// ---------------------------------------------------------------------------

/// Fornberg's recursion: weights `c[k][j]` approximating the `k`-th
/// derivative at `z` from samples at `nodes[j]`, for all `k <= m`.
pub fn fornberg_weights(z: f64, nodes: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; n]; m + 1];
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - z;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Second-order accurate stencil for the `k`-th y-derivative on a uniform
/// grid: centred in the interior, one-sided (k + 2 points) near the ends.
#[derive(Debug, Clone)]
pub struct YStencil {
    order: usize,
    half: usize,
    interior: Vec<f64>,
    lower: Vec<Vec<f64>>,
    upper: Vec<Vec<f64>>,
    window: usize,
}

impl YStencil {
    pub fn new(order: usize, dy: f64) -> Self {
        let half = order.div_ceil(2);
        let scale = dy.powi(order as i32);
        let central: Vec<f64> = (0..=2 * half).map(|m| m as f64 - half as f64).collect();
        let interior = fornberg_weights(0.0, &central, order)[order]
            .iter()
            .map(|w| w / scale)
            .collect();
        let window = order + 2;
        let offsets: Vec<f64> = (0..window).map(|m| m as f64).collect();
        let lower = (0..half)
            .map(|j| {
                fornberg_weights(j as f64, &offsets, order)[order]
                    .iter()
                    .map(|w| w / scale)
                    .collect()
            })
            .collect();
        // upper[r] serves node ny - r, window ending at ny
        let upper = (0..half)
            .map(|r| {
                let z = (window - 1 - r) as f64;
                fornberg_weights(z, &offsets, order)[order]
                    .iter()
                    .map(|w| w / scale)
                    .collect()
            })
            .collect();
        YStencil {
            order,
            half,
            interior,
            lower,
            upper,
            window,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Weights used at the wall node `y = 0` (window starting at node 0).
    pub fn wall_weights(&self) -> &[f64] {
        if self.half == 0 {
            &self.interior
        } else {
            &self.lower[0]
        }
    }

    pub fn apply(&self, f: &[f64], out: &mut [f64]) {
        let n = f.len();
        if self.order == 0 {
            out.copy_from_slice(f);
            return;
        }
        let h = self.half;
        let top = n - self.window;
        for (j, o) in out.iter_mut().enumerate() {
            *o = if j < h {
                dot(&self.lower[j], &f[..self.window])
            } else if j + h >= n {
                dot(&self.upper[n - 1 - j], &f[top..])
            } else {
                dot(&self.interior, &f[j - h..=j + h])
            };
        }
    }

    /// Derivative at the wall node only.
    pub fn at_wall(&self, f: &[f64]) -> f64 {
        if self.order == 0 {
            return f[0];
        }
        dot(&self.lower[0], &f[..self.window])
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

// ---------------------------------------------------------------------------
// Derivatives
// ---------------------------------------------------------------------------

const D1_X: [f64; 4] = [1.0, -8.0, 8.0, -1.0];

fn deriv_x_once(f: &Field) -> Field {
    let g = *f.grid();
    let nx = g.nx;
    let n = g.ny_nodes();
    let inv = 1.0 / (12.0 * g.dx());
    let src = f.values();
    let mut out = Field::zeros(g);
    par::for_each_column(out.values_mut(), n, |i, col| {
        let im2 = (i + nx - 2) % nx;
        let im1 = (i + nx - 1) % nx;
        let ip1 = (i + 1) % nx;
        let ip2 = (i + 2) % nx;
        let (a, b, c, d) = (
            &src[im2 * n..(im2 + 1) * n],
            &src[im1 * n..(im1 + 1) * n],
            &src[ip1 * n..(ip1 + 1) * n],
            &src[ip2 * n..(ip2 + 1) * n],
        );
        for j in 0..n {
            col[j] = (D1_X[0] * a[j] + D1_X[1] * b[j] + D1_X[2] * c[j] + D1_X[3] * d[j]) * inv;
        }
    });
    out
}

/// k-th periodic x-derivative: the fourth-order central difference applied
/// `k` times.
pub fn deriv_x(f: &Field, k: usize) -> Result<Field> {
    f.grid().check_order(k)?;
    let mut out = f.clone();
    for _ in 0..k {
        out = deriv_x_once(&out);
    }
    Ok(out)
}

/// k-th y-derivative with second-order stencils at every node.
pub fn deriv_y(f: &Field, k: usize) -> Result<Field> {
    let g = *f.grid();
    g.check_order(k)?;
    if k == 0 {
        return Ok(f.clone());
    }
    let stencil = YStencil::new(k, g.dy());
    let n = g.ny_nodes();
    let src = f.values();
    let mut out = Field::zeros(g);
    par::for_each_column(out.values_mut(), n, |i, col| {
        stencil.apply(&src[i * n..(i + 1) * n], col);
    });
    Ok(out)
}

/// `D^alpha = d_x^{alpha.0} d_y^{alpha.1}`.
pub fn d_alpha(f: &Field, alpha: (usize, usize)) -> Result<Field> {
    let g = f.grid();
    g.check_order(alpha.0 + alpha.1)?;
    deriv_y(&deriv_x(f, alpha.0)?, alpha.1)
}

/// k-th derivative of a periodic x-profile (same stencil as [`deriv_x`]).
pub fn deriv_x_profile(profile: &[f64], dx: f64, k: usize) -> Vec<f64> {
    let n = profile.len();
    let mut cur = profile.to_vec();
    let inv = 1.0 / (12.0 * dx);
    for _ in 0..k {
        cur = (0..n)
            .map(|i| {
                (D1_X[0] * cur[(i + n - 2) % n]
                    + D1_X[1] * cur[(i + n - 1) % n]
                    + D1_X[2] * cur[(i + 1) % n]
                    + D1_X[3] * cur[(i + 2) % n])
                    * inv
            })
            .collect();
    }
    cur
}

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

/// Per-column trapezoidal `int_y^{y_max} f`; zero at the top node.
pub fn tail_integral_y(f: &Field) -> Field {
    let g = *f.grid();
    let n = g.ny_nodes();
    let dy = g.dy();
    let src = f.values();
    let mut out = Field::zeros(g);
    par::for_each_column(out.values_mut(), n, |i, col| {
        tail_integral_column(&src[i * n..(i + 1) * n], dy, col);
    });
    out
}

/// Per-column trapezoidal `int_0^y f`; zero at the wall.
pub fn cum_integral_y(f: &Field) -> Field {
    let g = *f.grid();
    let n = g.ny_nodes();
    let dy = g.dy();
    let src = f.values();
    let mut out = Field::zeros(g);
    par::for_each_column(out.values_mut(), n, |i, col| {
        cum_integral_column(&src[i * n..(i + 1) * n], dy, col);
    });
    out
}

pub(crate) fn tail_integral_column(f: &[f64], dy: f64, out: &mut [f64]) {
    let n = f.len();
    out[n - 1] = 0.0;
    for j in (0..n - 1).rev() {
        out[j] = out[j + 1] + 0.5 * dy * (f[j] + f[j + 1]);
    }
}

pub(crate) fn cum_integral_column(f: &[f64], dy: f64, out: &mut [f64]) {
    out[0] = 0.0;
    for j in 1..f.len() {
        out[j] = out[j - 1] + 0.5 * dy * (f[j - 1] + f[j]);
    }
}

/// `sqrt( int int (1+y)^{2 lambda} f^2 dx dy )`, trapezoidal in y,
/// periodic rectangle rule in x.
pub fn weighted_l2(f: &Field, lambda: f64) -> f64 {
    weighted_l2_squared(f, lambda).sqrt()
}

pub fn weighted_l2_squared(f: &Field, lambda: f64) -> f64 {
    let g = f.grid();
    let n = g.ny_nodes();
    let wy: Vec<f64> = g
        .y_weights()
        .iter()
        .zip(g.y_nodes())
        .map(|(w, y)| w * (1.0 + y).powf(2.0 * lambda))
        .collect();
    let vals = f.values();
    let total = par::ordered_sum(g.nx, |i| {
        vals[i * n..(i + 1) * n]
            .iter()
            .zip(&wy)
            .map(|(v, w)| w * v * v)
            .sum::<f64>()
    });
    total * g.dx()
}

/// Unweighted `L^2(T)` norm of a periodic x-profile.
pub fn l2_x(profile: &[f64], dx: f64) -> f64 {
    (profile.iter().map(|v| v * v).sum::<f64>() * dx).sqrt()
}

/// A y-profile on a uniform grid over `[0, y_max]` with unit x-measure.
#[derive(Debug, Clone, PartialEq)]
pub struct YProfile {
    pub values: Vec<f64>,
    pub y_max: f64,
}

impl YProfile {
    pub fn from_fn<F: Fn(f64) -> f64>(ny: usize, y_max: f64, f: F) -> Self {
        let dy = y_max / ny as f64;
        YProfile {
            values: (0..=ny).map(|j| f(j as f64 * dy)).collect(),
            y_max,
        }
    }

    pub fn ny(&self) -> usize {
        self.values.len() - 1
    }

    pub fn dy(&self) -> f64 {
        self.y_max / self.ny() as f64
    }

    pub fn y(&self, j: usize) -> f64 {
        j as f64 * self.dy()
    }

    pub fn deriv(&self, k: usize) -> YProfile {
        let mut out = vec![0.0; self.values.len()];
        YStencil::new(k, self.dy()).apply(&self.values, &mut out);
        YProfile {
            values: out,
            y_max: self.y_max,
        }
    }

    pub fn weighted_l2(&self, lambda: f64) -> f64 {
        let w = trapezoid_weights(self.ny(), self.dy());
        self.values
            .iter()
            .enumerate()
            .map(|(j, v)| w[j] * (1.0 + self.y(j)).powf(2.0 * lambda) * v * v)
            .sum::<f64>()
            .sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(nx: usize, ny: usize) -> GridSpec {
        GridSpec::new(nx, ny, 30.0).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(7, 128, 30.0).is_err());
        assert!(GridSpec::new(10, 128, 30.0).is_ok());
        assert!(GridSpec::new(64, 8, 30.0).is_err());
        assert!(GridSpec::new(64, 128, 5.0).is_err());
        let g = grid(64, 128);
        assert_eq!(g.y(128), 30.0);
        assert!((g.dx() - 2.0 * PI / 64.0).abs() < 1e-15);
    }

    #[test]
    fn fornberg_reproduces_classic_stencils() {
        let c = fornberg_weights(0.0, &[-1.0, 0.0, 1.0], 2);
        assert_eq!(c[1], vec![-0.5, 0.0, 0.5]);
        assert_eq!(c[2], vec![1.0, -2.0, 1.0]);
        let one_sided = fornberg_weights(0.0, &[0.0, 1.0, 2.0], 1);
        assert_eq!(one_sided[1], vec![-1.5, 2.0, -0.5]);
    }

    #[test]
    fn deriv_x_sine() {
        let g = grid(64, 16);
        let f = Field::from_fn(g, |x, _| x.sin());
        let d1 = deriv_x(&f, 1).unwrap();
        let d2 = deriv_x(&f, 2).unwrap();
        let e1 = d1.map_with_coords(|x, _, v| v - x.cos()).max_abs();
        let e2 = d2.map_with_coords(|x, _, v| v + x.sin()).max_abs();
        assert!(e1 <= 1e-4, "{e1}");
        assert!(e2 <= 1e-3, "{e2}");
    }

    #[test]
    fn deriv_x_constant_is_zero() {
        let f = Field::constant(grid(64, 16), 3.7);
        assert!(deriv_x(&f, 1).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn deriv_x_fourth_order_self_convergence() {
        let err = |nx| {
            let f = Field::from_fn(grid(nx, 16), |x, _| (2.0 * x).sin());
            deriv_x(&f, 1)
                .unwrap()
                .map_with_coords(|x, _, v| v - 2.0 * (2.0 * x).cos())
                .max_abs()
        };
        let ratio = err(32) / err(64);
        assert!((12.0..=20.0).contains(&ratio), "{ratio}");
    }

    #[test]
    fn deriv_y_exponential() {
        let g = grid(8, 128);
        let f = Field::from_fn(g, |_, y| (-y).exp());
        let d = deriv_y(&f, 1).unwrap();
        let err = d.map_with_coords(|_, y, v| v + (-y).exp());
        let near_wall = (0..3).map(|j| err.at(0, j).abs()).fold(0.0, f64::max);
        let interior = (3..128).map(|j| err.at(0, j).abs()).fold(0.0, f64::max);
        assert!(near_wall <= 5e-2, "{near_wall}");
        assert!(interior <= 1e-2, "{interior}");
    }

    #[test]
    fn deriv_y_exact_on_quadratics() {
        let g = grid(8, 32);
        let lin = Field::from_fn(g, |_, y| 2.5 * y - 1.0);
        let d = deriv_y(&lin, 1).unwrap();
        assert!(d.map(|v| v - 2.5).max_abs() < 1e-12);
        let quad = Field::from_fn(g, |_, y| y * y);
        let d2 = deriv_y(&quad, 2).unwrap();
        assert!(d2.map(|v| v - 2.0).max_abs() < 1e-10);
    }

    #[test]
    fn deriv_y_second_order_self_convergence() {
        let exact = |y: f64| 8.75 * (1.0 + y).powf(-4.5);
        let err = |ny| {
            let f = Field::from_fn(grid(8, ny), |_, y| (1.0 + y).powf(-2.5));
            deriv_y(&f, 2)
                .unwrap()
                .map_with_coords(|_, y, v| v - exact(y))
                .max_abs()
        };
        let ratio = err(1024) / err(2048);
        assert!((3.5..=4.5).contains(&ratio), "{ratio}");
        for k in 1..=5 {
            let errk = |ny| {
                let f = Field::from_fn(grid(8, ny), |_, y| (-0.5 * y).exp());
                let c = (-0.5f64).powi(k as i32);
                deriv_y(&f, k)
                    .unwrap()
                    .map_with_coords(|_, y, v| v - c * (-0.5 * y).exp())
                    .max_abs()
            };
            let r = errk(128) / errk(256);
            assert!((3.5..=4.5).contains(&r), "k={k}: {r}");
        }
    }

    #[test]
    fn unsupported_order() {
        let f = Field::zeros(grid(8, 32));
        assert!(matches!(
            deriv_y(&f, 9),
            Err(Error::UnsupportedOrder { order: 9, max: 8 })
        ));
        assert!(matches!(deriv_x(&f, 9), Err(Error::UnsupportedOrder { .. })));
        assert!(d_alpha(&f, (5, 4)).is_err());
    }

    #[test]
    fn mixed_derivative_and_commutation() {
        let g = grid(64, 256);
        let f = Field::from_fn(g, |x, y| x.sin() * (-y).exp());
        assert_eq!(d_alpha(&f, (0, 0)).unwrap(), f);
        let d = d_alpha(&f, (1, 1)).unwrap();
        let err = d.map_with_coords(|x, y, v| v + x.cos() * (-y).exp()).max_abs();
        assert!(err < 2e-2, "{err}");
        let yx = deriv_x(&deriv_y(&f, 1).unwrap(), 1).unwrap();
        assert!((&d - &yx).max_abs() <= 1e-10);
    }

    #[test]
    fn integrals() {
        let g = grid(8, 256);
        let f = Field::from_fn(g, |_, y| (1.0 + y).powf(-2.5));
        let tail = tail_integral_y(&f);
        let exact = (1.0 - 31f64.powf(-1.5)) / 1.5;
        // trapezoid bias at this resolution is dy^2/12 * |f'(0)|
        let bias = g.dy().powi(2) / 12.0 * 2.5;
        assert!((tail.at(0, 0) - exact).abs() <= 1.1 * bias);
        assert_eq!(tail.at(3, 256), 0.0);

        let fine = grid(8, 4096);
        let tail = tail_integral_y(&Field::from_fn(fine, |_, y| (1.0 + y).powf(-2.5)));
        assert!((tail.at(0, 0) - exact).abs() <= 1e-4);

        let one = Field::constant(g, 1.0);
        let cum = cum_integral_y(&one);
        for j in 0..=256 {
            assert!((cum.at(0, j) - g.y(j)).abs() < 1e-12);
        }
        assert_eq!(tail_integral_y(&Field::zeros(g)).max_abs(), 0.0);

        let e = Field::from_fn(g, |_, y| (-y).exp());
        let c = cum_integral_y(&e);
        let err = c.map_with_coords(|_, y, v| v - (1.0 - (-y).exp())).max_abs();
        assert!(err < g.dy().powi(2) / 10.0, "{err}");
        let t = tail_integral_y(&e);
        let err = t.map_with_coords(|_, y, v| v - ((-y).exp() - (-30f64).exp())).max_abs();
        assert!(err < g.dy().powi(2) / 10.0, "{err}");
        let total = c.at(0, 256);
        for j in 0..=256 {
            assert!((c.at(0, j) + t.at(0, j) - total).abs() < 1e-14);
        }
    }

    #[test]
    fn cum_integral_inverts_deriv_y() {
        let g = grid(8, 256);
        let f = Field::from_fn(g, |_, y| (-0.7 * y).exp() * (1.0 + y).cos());
        let back = deriv_y(&cum_integral_y(&f), 1).unwrap();
        let err = (1..256)
            .map(|j| (back.at(0, j) - f.at(0, j)).abs())
            .fold(0.0, f64::max);
        assert!(err < g.dy().powi(2), "{err}");
    }

    #[test]
    fn weighted_l2_values() {
        let fine = grid(16, 512);
        let f = Field::from_fn(fine, |_, y| (1.0 + y).powf(-2.5));
        let exact = (2.0 * PI * (1.0 - 31f64.powi(-2)) / 2.0).sqrt();
        assert!((weighted_l2(&f, 1.0) - exact).abs() <= 5e-3);
        assert!((exact - PI.sqrt()).abs() < 1e-3);
        assert_eq!(weighted_l2(&Field::zeros(fine), 1.0), 0.0);
        let a = weighted_l2(&f.scale(-3.0), 0.5);
        assert!((a - 3.0 * weighted_l2(&f, 0.5)).abs() < 1e-12);
    }

    #[test]
    fn pure_operations_are_bit_identical() {
        let g = grid(32, 64);
        let f = Field::from_fn(g, |x, y| x.cos() * (1.0 + y).recip());
        assert_eq!(deriv_x(&f, 3).unwrap(), deriv_x(&f, 3).unwrap());
        assert_eq!(weighted_l2(&f, 1.0).to_bits(), weighted_l2(&f, 1.0).to_bits());
    }
}
