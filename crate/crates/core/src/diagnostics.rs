//! Time-stepping drivers that sample norms and evaluate the estimate checks
//! along a trajectory, plus the regularization sweep and twin-run studies.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimates::{
    apriori_bound, boundary_derivative, cumulative_trapezoid, energy_rate_check, existence_time,
    f_of_t, fit_envelope_constant, gronwall_check, max_principle_envelopes, outer_derivative_l2, perturbation_gbar,
    time_derivative, CheckVerdict, Envelopes, ExistenceTimes, ForcingConstants, GronwallFit,
};
use crate::grid::{weighted_l2, GridSpec};
use crate::norms::{floor_guard, norm_report, NormReport};
use crate::outer::OuterFlow;
use crate::par;
use crate::solver::{init_from_profile, InitialProfile, Params, State, Stepper};

/// Why a trajectory ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Completed,
    MonotonicityLost,
    NumericalBlowup,
    StepRejected,
}

impl StopReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            StopReason::Completed => "completed",
            StopReason::MonotonicityLost => "monotonicity_lost",
            StopReason::NumericalBlowup => "numerical_blowup",
            StopReason::StepRejected => "step_rejected",
        }
    }

    fn from_error(e: &Error) -> Option<Self> {
        match e {
            Error::MonotonicityLost { .. } => Some(StopReason::MonotonicityLost),
            Error::NumericalBlowup { .. } => Some(StopReason::NumericalBlowup),
            Error::StepRejected { .. } => Some(StopReason::StepRejected),
            _ => None,
        }
    }
}

/// End of a trajectory: the last state reached and the stop cause.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub last: State,
    pub steps: usize,
    pub stop: StopReason,
    pub error: Option<Error>,
}

/// Advances `initial` for `p.n_steps()` steps, calling `observe` at step 0
/// and every `record_every` steps. The floor guard runs after every step.
/// Trajectory-ending failures are reported in the result; any other error
/// (including one from `observe`) is returned.
pub fn evolve<F>(
    initial: State,
    outer: &OuterFlow,
    p: &Params,
    record_every: usize,
    mut observe: F,
) -> Result<Trajectory>
where
    F: FnMut(usize, &State) -> Result<()>,
{
    let record_every = record_every.max(1);
    let mut stepper = Stepper::new(*initial.grid(), *p, outer)?;
    let n = p.n_steps();
    let mut state = initial;
    let guarded = |s: &State| floor_guard(s, p);
    let fail = |state: State, steps: usize, e: Error| match StopReason::from_error(&e) {
        Some(stop) => Ok(Trajectory {
            last: state,
            steps,
            stop,
            error: Some(e),
        }),
        None => Err(e),
    };
    if let Err(e) = guarded(&state) {
        return fail(state, 0, e);
    }
    observe(0, &state)?;
    for k in 1..=n {
        match stepper.step(&state).and_then(|s| guarded(&s).map(|_| s)) {
            Ok(next) => state = next,
            Err(e) => return fail(state, k - 1, e),
        }
        if k % record_every == 0 {
            observe(k, &state)?;
        }
    }
    Ok(Trajectory {
        last: state,
        steps: n,
        stop: StopReason::Completed,
        error: None,
    })
}

/// Raw per-sample measurements.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    pub norms: NormReport,
    /// `||d_x^s U(t)||_{L^2(T)}`
    pub outer_s: f64,
    pub boundary_resid_1: f64,
    pub boundary_resid_3: f64,
}

pub fn sample(state: &State, outer: &OuterFlow, p: &Params) -> Result<Sample> {
    Ok(Sample {
        t: state.t,
        norms: norm_report(state, outer, p)?,
        outer_s: outer_derivative_l2(state, outer, p.s),
        boundary_resid_1: boundary_derivative(state, outer, p, 1)?.residual,
        boundary_resid_3: boundary_derivative(state, outer, p, 3)?.residual,
    })
}

/// One row of the diagnostics table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub norms: NormReport,
    pub energy_rate: f64,
    pub f_value: f64,
    /// `+inf` once the a-priori curve has expired.
    pub apriori_bound: f64,
    pub envelope_upper: f64,
    pub envelope_lower: f64,
    pub big_g: f64,
    pub big_w: f64,
    pub boundary_resid_1: f64,
    pub boundary_resid_3: f64,
}

/// Fitted constants and derived times of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fits {
    /// Energy constant; zero when fewer than three samples exist.
    pub c_energy: f64,
    pub energy_margin: f64,
    /// Maximum-principle constant: smallest `C` whose upper envelope covers
    /// every measured `I_sup`.
    pub c_envelope: f64,
    pub e0: f64,
    pub blowup_time: f64,
    pub sup_f: f64,
    pub existence: ExistenceTimes,
}

/// Records, fits and verdicts computed from a series of samples.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub records: Vec<DiagnosticsRecord>,
    pub fits: Fits,
    /// Envelopes with `c_envelope`.
    pub envelopes: Envelopes,
    /// Envelopes with the energy constant `c_energy`.
    pub energy_envelopes: Envelopes,
    pub energy_verdicts: Vec<CheckVerdict>,
    /// `||w(t)||^2_{Hg} <= apriori_bound(t)` for samples with `t <= 0.9 blowup_time`.
    pub apriori_verdicts: Vec<CheckVerdict>,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub analysis: Analysis,
    pub trajectory: Trajectory,
}

impl RunReport {
    pub fn stop(&self) -> StopReason {
        self.trajectory.stop
    }

    pub fn records(&self) -> &[DiagnosticsRecord] {
        &self.analysis.records
    }
}

/// Post-processes samples into records, fits and envelopes.
pub fn assemble(
    samples: &[Sample],
    outer: &OuterFlow,
    p: &Params,
    grid: &GridSpec,
    consts: ForcingConstants,
) -> Analysis {
    let ts: Vec<f64> = samples.iter().map(|s| s.t).collect();
    let hg: Vec<f64> = samples.iter().map(|s| s.norms.h_s_gamma_g).collect();
    let fs: Vec<f64> = ts
        .iter()
        .map(|&t| f_of_t(t, p.s, p.eps, outer, consts, grid.x_length))
        .collect();
    let (rates, c, margin, energy_verdicts) = match energy_rate_check(&ts, &hg, &fs, p.s) {
        Ok(fit) => (fit.rates, fit.c, fit.margin, fit.verdicts),
        Err(_) => {
            let sq: Vec<f64> = hg.iter().map(|v| v * v).collect();
            (time_derivative(&ts, &sq), 0.0, f64::NAN, Vec::new())
        }
    };
    let f_int = cumulative_trapezoid(&ts, &fs);
    let e0 = hg.first().map_or(0.0, |v| v * v);
    let mut blowup_time = f64::INFINITY;
    let bounds: Vec<f64> = ts
        .iter()
        .zip(&f_int)
        .map(|(&t, &fi)| match apriori_bound(e0, c, p.s, fi, t) {
            Ok((b, _)) => b,
            Err(_) => f64::INFINITY,
        })
        .collect();
    if let Some(&fi) = f_int.last() {
        blowup_time = match apriori_bound(e0, c, p.s, fi, 0.0) {
            Ok((_, tb)) => tb,
            Err(Error::BoundExpired { blowup_time }) => blowup_time,
            Err(_) => f64::NAN,
        };
    }
    let apriori_verdicts = ts
        .iter()
        .enumerate()
        .filter(|(i, &t)| {
            let tb = apriori_bound(e0, c, p.s, f_int[*i], 0.0).map_or(0.0, |(_, tb)| tb);
            t <= 0.9 * tb
        })
        .map(|(i, &t)| CheckVerdict::new(format!("apriori(t={t})"), hg[i] * hg[i], bounds[i], 1e-12))
        .collect();
    let us: Vec<f64> = samples.iter().map(|s| s.outer_s).collect();
    let i_sup: Vec<f64> = samples.iter().map(|s| s.norms.i_sup).collect();
    let floor: Vec<f64> = samples.iter().map(|s| s.norms.sigma_floor).collect();
    let c_envelope = fit_envelope_constant(&ts, &hg, &us, &i_sup);
    let envelopes = max_principle_envelopes(&ts, &hg, &us, &i_sup, &floor, c_envelope, p.s);
    let energy_envelopes = max_principle_envelopes(&ts, &hg, &us, &i_sup, &floor, c, p.s);
    let sup_f = fs.iter().cloned().fold(0.0, f64::max);
    let w0 = hg.first().copied().unwrap_or(0.0);
    let fits = Fits {
        c_energy: c,
        energy_margin: margin,
        c_envelope,
        e0,
        blowup_time,
        sup_f,
        existence: existence_time(w0, sup_f, p.delta, c, c, p.s),
    };
    let records = samples
        .iter()
        .enumerate()
        .map(|(i, s)| DiagnosticsRecord {
            t: s.t,
            norms: s.norms.clone(),
            energy_rate: rates[i],
            f_value: fs[i],
            apriori_bound: bounds[i],
            envelope_upper: envelopes.upper[i],
            envelope_lower: envelopes.lower[i],
            big_g: envelopes.big_g[i],
            big_w: envelopes.big_w[i],
            boundary_resid_1: s.boundary_resid_1,
            boundary_resid_3: s.boundary_resid_3,
        })
        .collect();
    Analysis {
        records,
        fits,
        envelopes,
        energy_envelopes,
        energy_verdicts,
        apriori_verdicts,
    }
}

/// Runs from `initial` and evaluates all trajectory checks.
pub fn run(
    initial: State,
    outer: &OuterFlow,
    p: &Params,
    record_every: usize,
    consts: ForcingConstants,
) -> Result<RunReport> {
    let grid = *initial.grid();
    let mut samples = Vec::new();
    let trajectory = evolve(initial, outer, p, record_every, |_, s| {
        samples.push(sample(s, outer, p)?);
        Ok(())
    })?;
    Ok(RunReport {
        analysis: assemble(&samples, outer, p, &grid, consts),
        trajectory,
    })
}

/// One row of the regularization sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub eps_a: f64,
    pub eps_b: f64,
    /// `||w^{eps_a} - w^{eps_b}||_{L^2}` at the common end time.
    pub difference: f64,
    /// Ratio to the next row's difference, if any.
    pub ratio: Option<f64>,
    /// `log2` of `ratio`.
    pub order: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    /// Per member: `None` on success, the error text otherwise.
    pub failures: Vec<(f64, Option<String>)>,
    pub t_end: f64,
}

impl SweepReport {
    pub fn complete(&self) -> bool {
        self.failures.iter().all(|(_, f)| f.is_none())
    }
}

/// Runs one member per `eps` from the same initial data and tabulates
/// successive end-time differences. Members run concurrently.
pub fn epsilon_sweep(
    grid: GridSpec,
    p: &Params,
    outer: &OuterFlow,
    profile: InitialProfile,
    eps_list: &[f64],
) -> Result<SweepReport> {
    let members = par::run_members(eps_list.to_vec(), |eps| {
        let q = Params { eps, ..*p };
        let init = init_from_profile(grid, outer, &q, profile)?;
        let traj = evolve(init, outer, &q, usize::MAX, |_, _| Ok(()))?;
        match traj.error {
            Some(e) => Err(e),
            None => Ok(traj.last),
        }
    });
    let failures: Vec<(f64, Option<String>)> = eps_list
        .iter()
        .zip(&members)
        .map(|(&e, m)| (e, m.as_ref().err().map(|e| e.to_string())))
        .collect();
    let mut diffs = Vec::new();
    for i in 0..eps_list.len().saturating_sub(1) {
        match (&members[i], &members[i + 1]) {
            (Ok(a), Ok(b)) => diffs.push(Some(weighted_l2(&(&a.w - &b.w), 0.0))),
            _ => diffs.push(None),
        }
    }
    let rows = diffs
        .iter()
        .enumerate()
        .filter_map(|(i, d)| {
            let d = (*d)?;
            let ratio = diffs.get(i + 1).copied().flatten().map(|n| d / n);
            Some(SweepRow {
                eps_a: eps_list[i],
                eps_b: eps_list[i + 1],
                difference: d,
                ratio,
                order: ratio.map(f64::log2),
            })
        })
        .collect();
    Ok(SweepReport {
        rows,
        failures,
        t_end: p.n_steps() as f64 * p.dt,
    })
}

#[derive(Debug, Clone)]
pub struct PerturbReport {
    pub ts: Vec<f64>,
    pub gbar: Vec<f64>,
    pub fit: Option<GronwallFit>,
    pub failures: Vec<Option<String>>,
}

/// Twin runs from the profile with amplitudes `1` and `1 + amplitude`,
/// comparing them at every recorded step. Both members run concurrently.
pub fn perturbation_study(
    grid: GridSpec,
    p: &Params,
    outer: &OuterFlow,
    profile: InitialProfile,
    amplitude: f64,
    record_every: usize,
) -> Result<PerturbReport> {
    let twins = par::run_members(vec![1.0 + amplitude, 1.0], |factor| {
        let init = init_from_profile(grid, outer, p, profile.scaled(factor))?;
        let mut states = Vec::new();
        let traj = evolve(init, outer, p, record_every, |_, s| {
            states.push(s.clone());
            Ok(())
        })?;
        match traj.error {
            Some(e) => Err(e),
            None => Ok(states),
        }
    });
    let failures: Vec<Option<String>> = twins
        .iter()
        .map(|m| m.as_ref().err().map(|e| e.to_string()))
        .collect();
    let (ts, gbar) = match (&twins[0], &twins[1]) {
        (Ok(a), Ok(b)) => {
            let mut ts = Vec::with_capacity(a.len());
            let mut g = Vec::with_capacity(a.len());
            for (s1, s2) in a.iter().zip(b) {
                ts.push(s2.t);
                g.push(perturbation_gbar(s1, s2, p)?);
            }
            (ts, g)
        }
        _ => (Vec::new(), Vec::new()),
    };
    let fit = gronwall_check(&ts, &gbar).ok();
    Ok(PerturbReport {
        ts,
        gbar,
        fit,
        failures,
    })
}
