//! Property suites over randomized families and a reference state, flattened
//! into uniform table rows.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::norms::{hs_components, hs_g_components, membership_check};
use crate::outer::OuterFlow;
use crate::solver::{Params, State};

use super::families::{band_limited_family, decaying_profiles, profile_states, zero_trace_profiles};
use super::{
    embedding_check, equivalence_check, hardy_check_profile, velocity_bounds_check, CheckVerdict,
    HardyVariant, MeasuredRatio,
};

/// Sizes and exponents of the randomized suites.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SuiteSettings {
    pub decay_lambdas: Vec<f64>,
    pub trace_lambdas: Vec<f64>,
    pub decay_count: usize,
    pub trace_count: usize,
    pub embedding_count: usize,
    pub family_count: usize,
    /// Resolution and extent of the 1D profiles in the Hardy suite.
    pub profile_ny: usize,
    pub profile_y_max: f64,
    pub hardy_tolerance: f64,
    /// Allowed relative drift of measured maxima between two grids.
    pub stability: f64,
}

impl Default for SuiteSettings {
    fn default() -> Self {
        SuiteSettings {
            decay_lambdas: vec![0.0, 0.5, 1.0, 2.0],
            trace_lambdas: vec![-1.0, -2.0],
            decay_count: 100,
            trace_count: 50,
            embedding_count: 50,
            family_count: 10,
            profile_ny: 4096,
            profile_y_max: 40.0,
            hardy_tolerance: 1e-3,
            stability: 0.2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowKind {
    /// A verdict that decides the exit status.
    Hard,
    /// A reported quantity without a fixed threshold.
    Measured,
    /// A requested case that does not apply.
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteRow {
    pub suite: String,
    pub name: String,
    pub kind: RowKind,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub pass: Option<bool>,
    pub tolerance: f64,
    pub note: String,
}

impl SuiteRow {
    pub fn hard(suite: &str, v: CheckVerdict) -> Self {
        SuiteRow {
            suite: suite.into(),
            name: v.name,
            kind: RowKind::Hard,
            lhs: v.lhs,
            rhs: v.rhs,
            ratio: v.ratio,
            pass: Some(v.pass),
            tolerance: v.tolerance,
            note: String::new(),
        }
    }

    pub fn measured(suite: &str, m: MeasuredRatio) -> Self {
        SuiteRow {
            suite: suite.into(),
            name: m.name,
            kind: RowKind::Measured,
            lhs: f64::NAN,
            rhs: f64::NAN,
            ratio: m.value,
            pass: None,
            tolerance: f64::NAN,
            note: String::new(),
        }
    }

    fn skipped(suite: &str, name: String, note: String) -> Self {
        SuiteRow {
            suite: suite.into(),
            name,
            kind: RowKind::Skipped,
            lhs: f64::NAN,
            rhs: f64::NAN,
            ratio: f64::NAN,
            pass: None,
            tolerance: f64::NAN,
            note,
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }
}

/// True when every hard row passes.
pub fn all_hard_pass(rows: &[SuiteRow]) -> bool {
    rows.iter()
        .filter(|r| r.kind == RowKind::Hard)
        .all(|r| r.pass == Some(true))
}

fn hardy_rows(
    rows: &mut Vec<SuiteRow>,
    profiles: &[crate::grid::YProfile],
    lambdas: &[f64],
    variant: HardyVariant,
    tol: f64,
) -> Result<()> {
    for &lambda in lambdas {
        for (idx, f) in profiles.iter().enumerate() {
            match hardy_check_profile(f, lambda, variant, tol) {
                Ok(mut v) => {
                    v.name = format!("{}#{idx}", v.name);
                    rows.push(SuiteRow::hard("hardy", v));
                }
                Err(e @ (Error::UnsupportedExponent(_) | Error::HypothesisFailed(_))) => {
                    rows.push(SuiteRow::skipped("hardy", format!("hardy(lambda={lambda})#{idx}"), e.to_string()));
                    if matches!(e, Error::UnsupportedExponent(_)) {
                        break;
                    }
                }
                Err(e) => return Err(e),
            }
        }
    }
    Ok(())
}

/// Hardy inequality on random decaying and zero-trace profiles.
pub fn hardy_suite(seed: u64, s: &SuiteSettings) -> Result<Vec<SuiteRow>> {
    let mut rows = Vec::new();
    let decay = decaying_profiles(seed, s.decay_count, s.profile_ny, s.profile_y_max);
    hardy_rows(&mut rows, &decay, &s.decay_lambdas, HardyVariant::Decay, s.hardy_tolerance)?;
    let trace = zero_trace_profiles(seed, s.trace_count, s.profile_ny, s.profile_y_max);
    hardy_rows(&mut rows, &trace, &s.trace_lambdas, HardyVariant::ZeroTrace, s.hardy_tolerance)?;
    Ok(rows)
}

fn refined(g: GridSpec) -> GridSpec {
    GridSpec {
        nx: 2 * g.nx,
        ny: 2 * g.ny,
        ..g
    }
}

fn stability_row(suite: &str, name: &str, coarse: f64, fine: f64, tol: f64) -> SuiteRow {
    let drift = (fine / coarse - 1.0).abs();
    SuiteRow::hard(suite, CheckVerdict::new(format!("{name} stability"), drift, tol, 0.0))
        .with_note(format!("max ratio {coarse} -> {fine}"))
}

/// Maximum embedding ratio over a band-limited family on `grid` and on the
/// grid refined twice in each direction.
pub fn embedding_suite(seed: u64, grid: GridSpec, s: &SuiteSettings) -> Result<Vec<SuiteRow>> {
    let family = band_limited_family(seed, s.embedding_count);
    let mut maxima = [0.0f64; 2];
    let mut rows = Vec::new();
    for (slot, g) in [grid, refined(grid)].into_iter().enumerate() {
        for (idx, f) in family.iter().enumerate() {
            let mut m = embedding_check(&f.field(g))?;
            maxima[slot] = maxima[slot].max(m.value);
            m.name = format!("embedding#{idx} ny={}", g.ny);
            rows.push(SuiteRow::measured("embedding", m));
        }
    }
    rows.push(SuiteRow::hard(
        "embedding",
        CheckVerdict::new("embedding max finite", maxima[0].max(maxima[1]), f64::MAX, 0.0),
    ));
    rows.push(stability_row("embedding", "embedding max", maxima[0], maxima[1], s.stability));
    Ok(rows)
}

/// Norm-equivalence checks on a profile family on two grids.
pub fn equivalence_suite(
    seed: u64,
    grid: GridSpec,
    outer: &OuterFlow,
    p: &Params,
    s: &SuiteSettings,
) -> Result<Vec<SuiteRow>> {
    let mut rows = Vec::new();
    let mut lower = [0.0f64; 2];
    let mut upper = [0.0f64; 2];
    let mut reverse = [0.0f64; 2];
    for (slot, g) in [grid, refined(grid)].into_iter().enumerate() {
        for (idx, state) in profile_states(seed, s.family_count, g, outer, p)?.iter().enumerate() {
            let tag = format!("#{idx} ny={}", g.ny);
            rows.push(slot_identity(state, outer, p)?.tagged(&tag));
            let rep = equivalence_check(state, outer, p)?;
            for mut v in rep.g_bounds {
                v.name = format!("{}{tag}", v.name);
                rows.push(SuiteRow::hard("equivalence", v));
            }
            lower[slot] = lower[slot].max(rep.lower_ratio.value);
            upper[slot] = upper[slot].max(rep.upper_ratio.value);
            for mut r in rep.reverse_g_ratios {
                reverse[slot] = reverse[slot].max(r.value);
                r.name = format!("{}{tag}", r.name);
                rows.push(SuiteRow::measured("equivalence", r));
            }
            for mut r in [rep.lower_ratio, rep.upper_ratio] {
                r.name = format!("{}{tag}", r.name);
                rows.push(SuiteRow::measured("equivalence", r));
            }
        }
    }
    rows.push(stability_row("equivalence", "equivalence_lower max", lower[0], lower[1], s.stability));
    rows.push(stability_row("equivalence", "equivalence_upper max", upper[0], upper[1], s.stability));
    rows.push(stability_row("equivalence", "g_reverse max", reverse[0], reverse[1], s.stability));
    Ok(rows)
}

trait Tagged {
    fn tagged(self, tag: &str) -> Self;
}

impl Tagged for SuiteRow {
    fn tagged(mut self, tag: &str) -> Self {
        self.name = format!("{}{tag}", self.name);
        self
    }
}

/// Every slot other than `(s, 0)` agrees between the two norms; the
/// `(s, 0)` slot of the g-norm is `||(1+y)^gamma g_s||^2`.
pub fn slot_identity(state: &State, outer: &OuterFlow, p: &Params) -> Result<SuiteRow> {
    let plain = hs_components(&state.w, p.s, p.gamma)?;
    let gnorm = hs_g_components(state, outer, p)?;
    let total: f64 = plain.iter().map(|(_, v)| v).sum();
    let mismatch = plain
        .iter()
        .zip(&gnorm)
        .filter(|((a, _), _)| *a != (p.s, 0))
        .map(|((a, x), (b, y))| if a == b { (x - y).abs() } else { f64::INFINITY })
        .fold(0.0, f64::max);
    Ok(SuiteRow::hard(
        "norms",
        CheckVerdict::new("slot identity", mismatch, 1e-12 * total.max(1.0), 0.0),
    ))
}

/// Velocity bounds on `state`.
pub fn velocity_suite(state: &State, outer: &OuterFlow, p: &Params) -> Result<Vec<SuiteRow>> {
    let vb = velocity_bounds_check(state, outer, p)?;
    let mut rows: Vec<SuiteRow> = vb.verdicts.into_iter().map(|v| SuiteRow::hard("velocity", v)).collect();
    rows.extend(vb.ratios.into_iter().map(|r| SuiteRow::measured("velocity", r)));
    Ok(rows)
}

/// Membership margins of `state`; reported, not asserted.
pub fn membership_rows(state: &State, p: &Params) -> Result<Vec<SuiteRow>> {
    let m = membership_check(state, p)?;
    let row = |name: &str, v: f64| SuiteRow::measured("membership", MeasuredRatio::new(name, v, 1.0));
    Ok(vec![
        row("floor", m.floor),
        row("floor_margin", m.floor_margin),
        row("i_sup", m.i_sup),
        row("i_margin", m.i_margin),
        row("delta_eff", m.delta_eff),
        row("in_space", if m.in_space { 1.0 } else { 0.0 }),
    ])
}
