use std::fs;
use std::path::Path;

use crate::diagnostics::{epsilon_sweep, perturbation_study, run, RunReport, StopReason};
use crate::error::{Error, Result};
use crate::estimates::suite::{
    all_hard_pass, embedding_suite, equivalence_suite, hardy_suite, membership_rows, slot_identity,
    velocity_suite, RowKind, SuiteRow,
};
use crate::estimates::CheckVerdict;
use crate::solver::init_from_profile;

use super::{RunConfig, Scenario, Snapshot};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_MONOTONICITY: i32 = 2;
pub const EXIT_BLOWUP: i32 = 3;
pub const EXIT_MEMBER: i32 = 4;
pub const EXIT_VERDICT: i32 = 5;

const DEFAULT_EPS_LIST: [f64; 3] = [0.2, 0.1, 0.05];
const DEFAULT_AMPLITUDE: f64 = 0.01;
const RATIO_WINDOW: (f64, f64) = (2.5, 6.0);
const IDENTICAL: f64 = 1e-12;

pub const DIAGNOSTICS_COLUMNS: [&str; 16] = [
    "t",
    "h_s_gamma",
    "h_s_gamma_g",
    "u_minus_U",
    "sigma_floor",
    "I_sup",
    "energy_rate",
    "F",
    "apriori_bound",
    "envelope_upper",
    "envelope_lower",
    "G",
    "W",
    "boundary_resid_1",
    "boundary_resid_3",
    "stop_reason",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Run,
    Check,
    Sweep,
    Perturb,
}

/// Maps a trajectory stop reason to the process exit status.
pub fn exit_code_for(stop: StopReason) -> i32 {
    match stop {
        StopReason::Completed => EXIT_OK,
        StopReason::MonotonicityLost => EXIT_MONOTONICITY,
        StopReason::NumericalBlowup | StopReason::StepRejected => EXIT_BLOWUP,
    }
}

fn num(v: f64) -> String {
    format!("{v}")
}

fn writer(dir: &Path, name: &str) -> Result<csv::Writer<fs::File>> {
    Ok(csv::Writer::from_path(dir.join(name))?)
}

fn write_rows(dir: &Path, name: &str, rows: &[SuiteRow]) -> Result<()> {
    let mut w = writer(dir, name)?;
    w.write_record(["suite", "name", "kind", "lhs", "rhs", "ratio", "pass", "tolerance", "note"])?;
    for r in rows {
        let kind = match r.kind {
            RowKind::Hard => "hard",
            RowKind::Measured => "measured",
            RowKind::Skipped => "skipped",
        };
        let pass = r.pass.map_or(String::new(), |p| p.to_string());
        w.write_record([
            r.suite.as_str(),
            &r.name,
            kind,
            &num(r.lhs),
            &num(r.rhs),
            &num(r.ratio),
            &pass,
            &num(r.tolerance),
            &r.note,
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn write_pairs(dir: &Path, name: &str, pairs: &[(&str, String)]) -> Result<()> {
    let mut w = writer(dir, name)?;
    w.write_record(["key", "value"])?;
    for (k, v) in pairs {
        w.write_record([*k, v.as_str()])?;
    }
    w.flush()?;
    Ok(())
}

fn write_diagnostics(dir: &Path, name: &str, report: &RunReport) -> Result<()> {
    let mut w = writer(dir, name)?;
    w.write_record(DIAGNOSTICS_COLUMNS)?;
    let n = report.records().len();
    for (i, r) in report.records().iter().enumerate() {
        let stop = if i + 1 == n { report.stop().as_str() } else { "" };
        w.write_record([
            num(r.t),
            num(r.norms.h_s_gamma),
            num(r.norms.h_s_gamma_g),
            num(r.norms.u_minus_u_outer),
            num(r.norms.sigma_floor),
            num(r.norms.i_sup),
            num(r.energy_rate),
            num(r.f_value),
            num(r.apriori_bound),
            num(r.envelope_upper),
            num(r.envelope_lower),
            num(r.big_g),
            num(r.big_w),
            num(r.boundary_resid_1),
            num(r.boundary_resid_3),
            stop.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn run_rows(report: &RunReport) -> Vec<SuiteRow> {
    let a = &report.analysis;
    let hard = |suite: &str, vs: &[CheckVerdict]| -> Vec<SuiteRow> {
        vs.iter().cloned().map(|v| SuiteRow::hard(suite, v)).collect()
    };
    let mut rows = hard("energy", &a.energy_verdicts);
    rows.extend(hard("apriori", &a.apriori_verdicts));
    rows.extend(hard("envelope_upper", &a.envelopes.upper_verdicts));
    rows.extend(hard("envelope_lower", &a.envelopes.lower_verdicts));
    for (suite, vs) in [
        ("envelope_upper_energy_c", &a.energy_envelopes.upper_verdicts),
        ("envelope_lower_energy_c", &a.energy_envelopes.lower_verdicts),
    ] {
        rows.extend(vs.iter().cloned().map(|v| {
            let mut r = SuiteRow::hard(suite, v);
            r.kind = RowKind::Measured;
            r
        }));
    }
    rows
}

/// Time-steps the configured problem and writes the diagnostics table,
/// fits, verdicts and snapshots.
pub fn run_command(cfg: &RunConfig, out: &Path) -> Result<i32> {
    fs::create_dir_all(out)?;
    let init = init_from_profile(cfg.grid, &cfg.outer_flow, &cfg.params, cfg.initial)?;
    if cfg.output.snapshots {
        Snapshot::from_state(&init, &cfg.params).save(&out.join("snapshot_initial.bin"))?;
    }
    let report = run(init, &cfg.outer_flow, &cfg.params, cfg.record_every, cfg.constants)?;
    write_diagnostics(out, &cfg.output.diagnostics, &report)?;
    let f = &report.analysis.fits;
    let e = &f.existence;
    write_pairs(
        out,
        &cfg.output.fits,
        &[
            ("c_energy", num(f.c_energy)),
            ("energy_margin", num(f.energy_margin)),
            ("c_envelope", num(f.c_envelope)),
            ("e0", num(f.e0)),
            ("blowup_time", num(f.blowup_time)),
            ("sup_f", num(f.sup_f)),
            ("t1", num(e.t1)),
            ("t2", num(e.t2)),
            ("t3", num(e.t3)),
            ("t", num(e.t)),
            ("stop_reason", report.stop().as_str().to_string()),
            ("steps", report.trajectory.steps.to_string()),
            (
                "error",
                report.trajectory.error.as_ref().map_or(String::new(), |e| e.to_string()),
            ),
        ],
    )?;
    write_rows(out, &cfg.output.verdicts, &run_rows(&report))?;
    if cfg.output.snapshots {
        Snapshot::from_state(&report.trajectory.last, &cfg.params).save(&out.join("snapshot_final.bin"))?;
    }
    Ok(exit_code_for(report.stop()))
}

/// Runs the property suites and writes the verdict table.
pub fn check_command(cfg: &RunConfig, out: &Path) -> Result<i32> {
    fs::create_dir_all(out)?;
    let (outer, p, s) = (&cfg.outer_flow, &cfg.params, &cfg.checks);
    let state = init_from_profile(cfg.grid, outer, p, cfg.initial)?;
    let mut rows = hardy_suite(cfg.seed, s)?;
    rows.extend(embedding_suite(cfg.seed, cfg.grid, s)?);
    rows.push(slot_identity(&state, outer, p)?);
    rows.extend(equivalence_suite(cfg.seed, cfg.grid, outer, p, s)?);
    rows.extend(velocity_suite(&state, outer, p)?);
    rows.extend(membership_rows(&state, p)?);
    write_rows(out, &cfg.output.verdicts, &rows)?;
    Ok(if all_hard_pass(&rows) { EXIT_OK } else { EXIT_VERDICT })
}

/// Regularization sweep with successive-difference ratios.
pub fn sweep_command(cfg: &RunConfig, out: &Path) -> Result<i32> {
    fs::create_dir_all(out)?;
    let eps_list = match &cfg.scenario {
        Scenario::Sweep { eps_list } => eps_list.clone(),
        _ => DEFAULT_EPS_LIST.to_vec(),
    };
    let rep = epsilon_sweep(cfg.grid, &cfg.params, &cfg.outer_flow, cfg.initial, &eps_list)?;
    let mut w = writer(out, &cfg.output.table)?;
    w.write_record(["eps_a", "eps_b", "t", "difference", "ratio", "order"])?;
    for r in &rep.rows {
        let opt = |v: Option<f64>| v.map_or(String::new(), num);
        w.write_record([num(r.eps_a), num(r.eps_b), num(rep.t_end), num(r.difference), opt(r.ratio), opt(r.order)])?;
    }
    w.flush()?;
    let mut rows: Vec<SuiteRow> = rep
        .failures
        .iter()
        .map(|(eps, f)| {
            let ok = f.is_none();
            let mut r = SuiteRow::hard(
                "sweep_member",
                CheckVerdict::new(format!("eps={eps}"), if ok { 0.0 } else { 1.0 }, 0.0, 0.0),
            );
            r.note = f.clone().unwrap_or_default();
            r
        })
        .collect();
    let identical = rep.rows.iter().all(|r| r.difference <= IDENTICAL);
    for r in &rep.rows {
        if let Some(ratio) = r.ratio {
            let mut row = SuiteRow::hard(
                "sweep_ratio",
                CheckVerdict::new(format!("eps={}/{}", r.eps_a, r.eps_b), ratio, RATIO_WINDOW.1, 0.0),
            );
            row.pass = Some(identical || (ratio >= RATIO_WINDOW.0 && ratio <= RATIO_WINDOW.1));
            if identical {
                row.note = "all differences below 1e-12".into();
            }
            rows.push(row);
        }
    }
    write_rows(out, &cfg.output.verdicts, &rows)?;
    Ok(if !rep.complete() {
        EXIT_MEMBER
    } else if all_hard_pass(&rows) {
        EXIT_OK
    } else {
        EXIT_VERDICT
    })
}

/// Twin runs and the Gronwall fit of the difference quantity.
pub fn perturb_command(cfg: &RunConfig, out: &Path) -> Result<i32> {
    fs::create_dir_all(out)?;
    let amplitude = match cfg.scenario {
        Scenario::Perturb { amplitude } => amplitude,
        _ => DEFAULT_AMPLITUDE,
    };
    let rep = perturbation_study(cfg.grid, &cfg.params, &cfg.outer_flow, cfg.initial, amplitude, cfg.record_every)?;
    let mut w = writer(out, &cfg.output.table)?;
    w.write_record(["t", "gbar"])?;
    for (t, g) in rep.ts.iter().zip(&rep.gbar) {
        w.write_record([num(*t), num(*g)])?;
    }
    w.flush()?;
    let failed = rep.failures.iter().any(Option::is_some);
    let mut pairs = vec![("amplitude", num(amplitude))];
    if let Some(fit) = &rep.fit {
        pairs.push(("c_gronwall", num(fit.c)));
        pairs.push(("uniqueness_branch", fit.uniqueness_branch.to_string()));
        pairs.push(("max_gbar", num(fit.max_gbar)));
        pairs.push(("pass", fit.pass.to_string()));
    }
    let notes: Vec<String> = rep.failures.iter().flatten().cloned().collect();
    pairs.push(("failures", notes.join("; ")));
    write_pairs(out, &cfg.output.fits, &pairs)?;
    Ok(if failed {
        EXIT_MEMBER
    } else if rep.fit.as_ref().is_some_and(|f| f.pass) {
        EXIT_OK
    } else {
        EXIT_VERDICT
    })
}

/// Runs `command` and converts failures into exit status `1` with a message
/// on stderr.
pub fn execute(command: Command, cfg: &RunConfig, out: &Path) -> i32 {
    let result = match command {
        Command::Run => run_command(cfg, out),
        Command::Check => check_command(cfg, out),
        Command::Sweep => sweep_command(cfg, out),
        Command::Perturb => perturb_command(cfg, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::MonotonicityLost { .. } => EXIT_MONOTONICITY,
                Error::NumericalBlowup { .. } | Error::StepRejected { .. } => EXIT_BLOWUP,
                _ => EXIT_IO,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_config;

    fn read(path: &Path) -> String {
        fs::read_to_string(path).unwrap()
    }

    #[test]
    fn zero_horizon_run_writes_one_row() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = parse_config(r#"{"grid": {"nx": 16, "ny": 64}, "params": {"t_end": 0}}"#).unwrap();
        assert_eq!(run_command(&cfg, dir.path()).unwrap(), EXIT_OK);
        let text = read(&dir.path().join("diagnostics.csv"));
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), DIAGNOSTICS_COLUMNS.join(","));
        assert_eq!(lines.count(), 1);
        let snap = Snapshot::load(&dir.path().join("snapshot_final.bin")).unwrap();
        assert_eq!(snap.t, 0.0);
    }

    #[test]
    fn oversized_step_keeps_partial_output() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = parse_config(r#"{"grid": {"nx": 16, "ny": 64}, "params": {"dt": 0.5, "t_end": 1}}"#).unwrap();
        assert_eq!(run_command(&cfg, dir.path()).unwrap(), EXIT_BLOWUP);
        let text = read(&dir.path().join("diagnostics.csv"));
        assert!(text.lines().last().unwrap().ends_with("step_rejected"));
    }

    #[test]
    fn amplitude_zero_perturbation_takes_uniqueness_branch() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = parse_config(
            r#"{"grid": {"nx": 16, "ny": 64}, "params": {"t_end": 0.02}, "scenario": {"perturb": {"amplitude": 0}}}"#,
        )
        .unwrap();
        assert_eq!(perturb_command(&cfg, dir.path()).unwrap(), EXIT_OK);
        assert!(read(&dir.path().join("fits.csv")).contains("uniqueness_branch,true"));
    }

    #[test]
    fn unwritable_output_is_an_io_failure() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        fs::write(&blocker, b"x").unwrap();
        let cfg = parse_config(r#"{"grid": {"nx": 16, "ny": 64}, "params": {"t_end": 0}}"#).unwrap();
        assert_eq!(execute(Command::Run, &cfg, &blocker.join("sub")), EXIT_IO);
    }
}
