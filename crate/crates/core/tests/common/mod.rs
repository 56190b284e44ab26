//! Oracles shared by the integration tests.

use hartmann_core::grid::{weighted_l2, GridSpec};
use hartmann_core::outer::OuterFlow;
use hartmann_core::solver::{Manufactured, Params, State, Stepper};

/// L2 error of the manufactured solution at t = 0.1 on a 32 x ny grid.
pub fn mms_error(ny: usize, dt: f64) -> f64 {
    let g = GridSpec::new(32, ny, 30.0).unwrap();
    let outer = OuterFlow::constant(1.0);
    let p = Params {
        dt,
        t_end: 0.1,
        ..Params::default()
    };
    let m = Manufactured::new(p.eps, g.y_max);
    let mut st = Stepper::new(g, p, &outer).unwrap().with_forcing(&m);
    let mut s = State::from_vorticity(m.exact_w(0.0, g), &outer, 0.0, &p);
    for n in 0..p.n_steps() {
        s = st.step(&s).unwrap();
        s.t = (n + 1) as f64 * dt;
    }
    weighted_l2(&(&s.w - &m.exact_w(s.t, g)), 0.0)
}

/// Independent 1D Crank-Nicolson reference for `w_t = -w + w_yy`,
/// `w_y(0) = k`, `w_y(Y) = -sigma w / (1 + Y)`, assembled as a dense matrix
/// and solved by Gaussian elimination with partial pivoting.
pub fn reference_1d(w: &[f64], dy: f64, dt: f64, k: f64, sigma: f64, y_max: f64) -> Vec<f64> {
    let n = w.len();
    let inv = 1.0 / (dy * dy);
    let mut l = vec![vec![0.0; n]; n];
    for j in 0..n {
        l[j][j] = -1.0 - 2.0 * inv;
        if j > 0 {
            l[j][j - 1] = inv;
        }
        if j + 1 < n {
            l[j][j + 1] = inv;
        }
    }
    // ghost nodes: w_{-1} = w_1 - 2 dy k, w_{N+1} = w_{N-1} - 2 dy sigma w_N / (1 + Y)
    l[0][1] = 2.0 * inv;
    l[n - 1][n - 2] = 2.0 * inv;
    l[n - 1][n - 1] -= 2.0 * sigma / ((1.0 + y_max) * dy);
    let flux = -2.0 * k / dy;

    let h = 0.5 * dt;
    let mut a = vec![vec![0.0; n]; n];
    let mut b = vec![0.0; n];
    for r in 0..n {
        let lw: f64 = (0..n).map(|c| l[r][c] * w[c]).sum();
        b[r] = w[r] + h * lw;
        for c in 0..n {
            a[r][c] = if r == c { 1.0 } else { 0.0 } - h * l[r][c];
        }
    }
    b[0] += 2.0 * h * flux;

    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))
            .unwrap();
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            if f != 0.0 {
                let (top, bottom) = a.split_at_mut(r);
                for (x, y) in bottom[0][c..].iter_mut().zip(&top[c][c..]) {
                    *x -= f * y;
                }
                b[r] -= f * b[c];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}
