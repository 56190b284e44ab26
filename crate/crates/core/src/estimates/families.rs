//! Seeded random families of smooth test functions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::grid::{Field, GridSpec, YProfile};
use crate::outer::OuterFlow;
use crate::solver::{Params, State};

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Random `e^{-a y} (c0 + c1 sin(b y + phi) + c2 y)` with `a in [0.5, 2]`.
pub fn decaying_profiles(seed: u64, count: usize, ny: usize, y_max: f64) -> Vec<YProfile> {
    let mut r = rng(seed, 1);
    (0..count)
        .map(|_| {
            let a = r.gen_range(0.5..2.0);
            let b = r.gen_range(0.0..3.0);
            let phi = r.gen_range(0.0..std::f64::consts::TAU);
            let c0 = r.gen_range(-1.0..1.0);
            let c1 = r.gen_range(-1.0..1.0);
            let c2 = r.gen_range(-1.0..1.0);
            YProfile::from_fn(ny, y_max, move |y| {
                (-a * y).exp() * (c0 + c1 * (b * y + phi).sin() + c2 * y)
            })
        })
        .collect()
}

/// Random profiles with `f(0) = 0`: `(1 - e^{-b y}) (1 + y)^{-p} (c0 + c1 cos(k y))`.
pub fn zero_trace_profiles(seed: u64, count: usize, ny: usize, y_max: f64) -> Vec<YProfile> {
    let mut r = rng(seed, 2);
    (0..count)
        .map(|_| {
            let b = r.gen_range(0.3..3.0);
            let p = r.gen_range(0.0..2.0);
            let c0 = r.gen_range(0.5..1.5);
            let c1 = r.gen_range(-0.5..0.5);
            let k = r.gen_range(0.0..2.0);
            YProfile::from_fn(ny, y_max, move |y| {
                (1.0 - (-b * y).exp()) * (1.0 + y).powf(-p) * (c0 + c1 * (k * y).cos())
            })
        })
        .collect()
}

/// Coefficients of a band-limited field; sampled on any grid by [`BandLimited::field`].
#[derive(Debug, Clone, PartialEq)]
pub struct BandLimited {
    modes: Vec<(u32, f64, f64)>,
    decay: f64,
    shift: f64,
}

impl BandLimited {
    pub fn field(&self, grid: GridSpec) -> Field {
        Field::from_fn(grid, |x, y| {
            let angular: f64 = self
                .modes
                .iter()
                .map(|&(k, a, b)| a * (k as f64 * x).cos() + b * (k as f64 * x).sin())
                .sum();
            angular * (-self.decay * y).exp() * (1.0 + self.shift * y)
        })
    }
}

/// Random fields with x-wavenumbers up to 3 and exponential decay in y.
pub fn band_limited_family(seed: u64, count: usize) -> Vec<BandLimited> {
    let mut r = rng(seed, 3);
    (0..count)
        .map(|_| BandLimited {
            modes: (0..=3)
                .map(|k| (k, r.gen_range(-1.0..1.0), if k == 0 { 0.0 } else { r.gen_range(-1.0..1.0) }))
                .collect(),
            decay: r.gen_range(0.7..1.5),
            shift: r.gen_range(0.0..0.5),
        })
        .collect()
}

/// A positive monotone vorticity profile with a controlled power-law tail:
/// `w = A U(x) (1+y)^{-sigma} (1 + c e^{-b y}) (1 + e cos x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileMember {
    pub amplitude: f64,
    pub bump: f64,
    pub rate: f64,
    pub wobble: f64,
}

impl ProfileMember {
    pub fn state(&self, grid: GridSpec, outer: &OuterFlow, p: &Params) -> State {
        let sigma = p.sigma;
        let m = *self;
        let w = Field::from_fn(grid, |x, y| {
            m.amplitude
                * outer.u_at(0.0, x, 0, 0)
                * (1.0 + y).powf(-sigma)
                * (1.0 + m.bump * (-m.rate * y).exp())
                * (1.0 + m.wobble * x.cos())
        });
        State::from_vorticity(w, outer, 0.0, p)
    }
}

/// Ten members satisfying the `sigma`-floor for the default `delta`.
pub fn profile_family(seed: u64, count: usize) -> Vec<ProfileMember> {
    let mut r = rng(seed, 4);
    (0..count)
        .map(|_| ProfileMember {
            amplitude: r.gen_range(1.0..2.0),
            bump: r.gen_range(0.0..0.5),
            rate: r.gen_range(0.5..1.5),
            wobble: r.gen_range(0.0..0.2),
        })
        .collect()
}

/// Convenience: membership-passing states from [`profile_family`].
pub fn profile_states(
    seed: u64,
    count: usize,
    grid: GridSpec,
    outer: &OuterFlow,
    p: &Params,
) -> Result<Vec<State>> {
    grid.validate()?;
    Ok(profile_family(seed, count)
        .iter()
        .map(|m| m.state(grid, outer, p))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn families_are_reproducible() {
        let a = decaying_profiles(7, 5, 64, 20.0);
        let b = decaying_profiles(7, 5, 64, 20.0);
        assert_eq!(a, b);
        let c = decaying_profiles(8, 5, 64, 20.0);
        assert_ne!(a, c);
        assert_eq!(band_limited_family(3, 4), band_limited_family(3, 4));
    }

    #[test]
    fn zero_trace_profiles_vanish_at_wall() {
        for f in zero_trace_profiles(1, 20, 64, 20.0) {
            assert_eq!(f.values[0], 0.0);
        }
    }

    #[test]
    fn profile_members_clear_the_floor() {
        let g = GridSpec::new(16, 128, 30.0).unwrap();
        let outer = OuterFlow::sinusoidal(0.1);
        let p = Params::default();
        for s in profile_states(11, 10, g, &outer, &p).unwrap() {
            assert!(crate::norms::sigma_floor(&s.w, p.sigma) > p.delta);
        }
    }
}
