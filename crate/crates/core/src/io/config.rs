use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimates::suite::SuiteSettings;
use crate::estimates::ForcingConstants;
use crate::grid::GridSpec;
use crate::outer::OuterFlow;
use crate::solver::{InitialProfile, Params};

/// What a configuration asks the tool to do.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Scenario {
    #[default]
    Run,
    Check,
    Sweep { eps_list: Vec<f64> },
    Perturb { amplitude: f64 },
}

fn one() -> usize {
    1
}

/// Output file names inside the output directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputPaths {
    pub diagnostics: String,
    pub verdicts: String,
    pub fits: String,
    pub table: String,
    /// Write initial and final snapshots in `run`.
    pub snapshots: bool,
}

impl Default for OutputPaths {
    fn default() -> Self {
        OutputPaths {
            diagnostics: "diagnostics.csv".into(),
            verdicts: "verdicts.csv".into(),
            fits: "fits.csv".into(),
            table: "table.csv".into(),
            snapshots: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub outer_flow: OuterFlow,
    #[serde(default)]
    pub initial: InitialProfile,
    #[serde(default)]
    pub scenario: Scenario,
    #[serde(default = "one")]
    pub record_every: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub constants: ForcingConstants,
    #[serde(default)]
    pub checks: SuiteSettings,
    #[serde(default)]
    pub output: OutputPaths,
}

impl Default for RunConfig {
    fn default() -> Self {
        parse_config("{}").expect("defaults are valid")
    }
}

fn invalid(path: &str, e: Error) -> Error {
    let message = match e {
        Error::InvalidParams(m) | Error::InvalidGrid(m) => m,
        other => other.to_string(),
    };
    Error::Config {
        path: path.into(),
        message,
    }
}

/// Parses and validates a JSON configuration, filling defaults.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let mut cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| Error::Config {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    cfg.grid.validate().map_err(|e| invalid("grid", e))?;
    cfg.params.validate().map_err(|e| invalid("params", e))?;
    if cfg.record_every == 0 {
        return Err(invalid(
            "record_every",
            Error::InvalidParams("record_every must be >= 1".into()),
        ));
    }
    match &cfg.scenario {
        Scenario::Sweep { eps_list } if eps_list.is_empty() || eps_list.iter().any(|e| !(*e >= 0.0)) => {
            return Err(invalid(
                "scenario.sweep.eps_list",
                Error::InvalidParams("eps_list must be a non-empty list of values >= 0".into()),
            ))
        }
        Scenario::Perturb { amplitude } if !(amplitude.is_finite() && *amplitude > -1.0) => {
            return Err(invalid(
                "scenario.perturb.amplitude",
                Error::InvalidParams("amplitude must be finite and > -1".into()),
            ))
        }
        _ => {}
    }
    cfg.outer_flow = cfg.outer_flow.with_norm_order(cfg.params.s);
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_gives_defaults() {
        let c = parse_config("{}").unwrap();
        assert_eq!((c.grid.nx, c.grid.ny, c.grid.y_max), (64, 128, 30.0));
        assert_eq!(c.params, Params::default());
        assert_eq!(c.scenario, Scenario::Run);
        assert_eq!(c.record_every, 1);
        assert_eq!(c.params.cfl, 0.5);
    }

    #[test]
    fn hypothesis_gates() {
        let e = parse_config(r#"{"params": {"sigma": 1.4, "gamma": 1}}"#).unwrap_err();
        assert!(e.to_string().contains("sigma must exceed gamma + 1/2"), "{e}");
        let e = parse_config(r#"{"params": {"s": 5}}"#).unwrap_err();
        assert!(e.to_string().contains("s must be even and >= 4"), "{e}");
    }

    #[test]
    fn schema_errors_carry_a_path() {
        match parse_config(r#"{"params": {"sigma": "big"}}"#).unwrap_err() {
            Error::Config { path, .. } => assert_eq!(path, "params.sigma"),
            e => panic!("{e}"),
        }
        match parse_config(r#"{"grid": {"nx": 64, "bogus": 1}}"#).unwrap_err() {
            Error::Config { path, .. } => assert!(path.starts_with("grid"), "{path}"),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn scenarios_parse() {
        let c = parse_config(r#"{"scenario": {"sweep": {"eps_list": [0.2, 0.1]}}}"#).unwrap();
        assert_eq!(c.scenario, Scenario::Sweep { eps_list: vec![0.2, 0.1] });
        let c = parse_config(r#"{"scenario": {"perturb": {"amplitude": 0.01}}}"#).unwrap();
        assert_eq!(c.scenario, Scenario::Perturb { amplitude: 0.01 });
        let c = parse_config(r#"{"scenario": "check", "seed": 9}"#).unwrap();
        assert_eq!(c.scenario, Scenario::Check);
        assert!(parse_config(r#"{"scenario": {"sweep": {"eps_list": []}}}"#).is_err());
    }
}
