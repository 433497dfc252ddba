//! One-parameter sweeps around a base configuration.

use serde::{Deserialize, Serialize};

use nlkdv::scheme::suggest_dt;
use nlkdv::Config;

use crate::catalog::{Analysis, DtSource, ExperimentSpec, RunSpec, SweepAxis, SweepParam};
use crate::error::{CliError, Result};

/// How the time step follows a change of `delta` or `n_points`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DtRule {
    /// Keep the base step.
    #[default]
    Keep,
    /// Keep `dt * delta` of the base configuration.
    Product,
    /// Use `suggest_dt` for every run.
    Suggest,
}

impl std::str::FromStr for DtRule {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "keep" => Ok(DtRule::Keep),
            "product" => Ok(DtRule::Product),
            "suggest" => Ok(DtRule::Suggest),
            _ => Err(CliError::UnknownName { what: "dt rule", given: s.into(), expected: "keep, product, suggest" }),
        }
    }
}

/// Analyses of every sweep: they fill the sweep table.
pub const SWEEP_ANALYSES: [Analysis; 2] = [Analysis::Ripple, Analysis::Oscillation];

/// Builds the experiment with one run of `base` per value of `param`.
pub fn sweep_spec(base: &Config, param: SweepParam, values: &[f64], dt_rule: DtRule) -> Result<ExperimentSpec> {
    if values.is_empty() {
        return Err(CliError::EmptySweep);
    }
    let bad = |value: f64, reason: &str| CliError::SweepValue { param: param.to_string(), value, reason: reason.into() };
    let mut runs = Vec::with_capacity(values.len());
    for &value in values {
        if !(value > 0.0 && value.is_finite()) {
            return Err(bad(value, "values must be positive"));
        }
        let mut config = base.clone();
        match param {
            SweepParam::Delta => config.delta = value,
            SweepParam::Dt => config.dt = value,
            SweepParam::NPoints => {
                if value.fract() != 0.0 || value > u32::MAX as f64 {
                    return Err(bad(value, "n_points must be an integer"));
                }
                config.grid.n_points = value as usize;
            }
        }
        let mut dt_source = DtSource::Manual;
        if param != SweepParam::Dt {
            match dt_rule {
                DtRule::Keep => {}
                DtRule::Product => {
                    if !(base.delta > 0.0 && config.delta > 0.0) {
                        return Err(bad(value, "the product rule needs positive delta"));
                    }
                    let product = base.dt * base.delta;
                    config.dt = product / config.delta;
                    dt_source = DtSource::DeltaProduct { product };
                }
                DtRule::Suggest => {
                    config.dt = suggest_dt(&config).map_err(|e| bad(value, &e.to_string()))?;
                    dt_source = DtSource::Suggested;
                }
            }
        }
        runs.push(RunSpec { label: format!("{param}={value:e}"), config, dt_source, steady_tol: None });
    }
    let spec = ExperimentSpec {
        id: format!("sweep-{param}"),
        description: format!("sweep of {param} over {} values", values.len()),
        runs,
        analyses: SWEEP_ANALYSES.to_vec(),
        sweep: Some(SweepAxis { param, values: values.to_vec() }),
    };
    spec.validate()?;
    Ok(spec)
}

/// Parses `v1,v2,...`.
pub fn parse_values(text: &str) -> Result<Vec<f64>> {
    let values = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| CliError::UnknownName { what: "number", given: s.into(), expected: "decimal numbers" })
        })
        .collect::<Result<Vec<_>>>()?;
    if values.is_empty() {
        return Err(CliError::EmptySweep);
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::find;

    fn base() -> Config {
        find("fig-ex1.1").unwrap().runs[0].config.clone()
    }

    #[test]
    fn empty_sweep_is_an_error() {
        assert!(matches!(sweep_spec(&base(), SweepParam::Delta, &[], DtRule::Keep), Err(CliError::EmptySweep)));
        assert!(matches!(parse_values(" , "), Err(CliError::EmptySweep)));
    }

    #[test]
    fn delta_sweep_with_product_rule_reproduces_the_family() {
        let s = sweep_spec(&base(), SweepParam::Delta, &[5e-3, 5e-4, 5e-5], DtRule::Product).unwrap();
        let family = find("fig-ex1.1").unwrap();
        for (a, b) in s.runs.iter().zip(&family.runs) {
            assert_eq!(a.config.delta, b.config.delta);
            assert!((a.config.dt - b.config.dt).abs() <= 1e-15 * b.config.dt);
        }
    }

    #[test]
    fn invalid_values() {
        assert!(sweep_spec(&base(), SweepParam::Dt, &[-1.0], DtRule::Keep).is_err());
        assert!(sweep_spec(&base(), SweepParam::NPoints, &[100.5], DtRule::Keep).is_err());
        assert!(sweep_spec(&base(), SweepParam::NPoints, &[3.0], DtRule::Keep).is_err());
        assert_eq!(parse_values("1e-3, 2").unwrap(), vec![1e-3, 2.0]);
        assert!(parse_values("1e-3,x").is_err());
        assert!("bogus".parse::<SweepParam>().is_err());
        assert_eq!("n_points".parse::<SweepParam>().unwrap(), SweepParam::NPoints);
    }
}
