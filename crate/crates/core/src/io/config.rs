use crate::error::Result;
use crate::experiment::RunConfig;

/// Parses and validates a JSON run configuration. Unknown keys are rejected and omitted
/// numerics take their defaults.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let config: RunConfig = serde_json::from_str(text)?;
    config.validate()?;
    Ok(config)
}

pub fn to_json(config: &RunConfig) -> String {
    serde_json::to_string_pretty(config).expect("run configs always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::experiment::Well;
    use crate::propagator::StepScheme;

    #[test]
    fn minimal_document_gets_defaults() {
        let c = parse_config(r#"{"alpha": 0.0005, "beta": 0.0001, "epsilon": 2.0, "tau_max": 2500}"#).unwrap();
        assert_eq!(c.grid.n_points, 2048);
        assert_eq!(c.grid.x_max, 16.0);
        assert_eq!(c.dtau, 0.002);
        assert_eq!(c.record_stride_tau, 0.5);
        assert_eq!(c.scheme, StepScheme::SplitStepFourier);
        assert_eq!(c.initial.well, Well::Left);
        assert_eq!(c.initial.width, 1.0);
        assert_eq!(c.snapshot_times(), vec![0.0, 625.0, 1250.0, 1875.0, 2500.0]);
    }

    #[test]
    fn full_document() {
        let c = parse_config(
            r#"{"alpha": 0.0005, "beta": 0.0001, "epsilon": 1.7, "tau_max": 10,
                "dtau": 0.001, "grid": {"x_max": 12, "n_points": 1024},
                "scheme": "crank-nicolson", "record_stride_tau": 0.25,
                "snapshot_taus": [0, 5], "initial": {"well": "right", "width": 0.8}}"#,
        )
        .unwrap();
        assert_eq!(c.scheme, StepScheme::CrankNicolson);
        assert_eq!(c.initial.well, Well::Right);
        assert_eq!(c.snapshot_times(), vec![0.0, 5.0]);
        assert_eq!(parse_config(&to_json(&c)).unwrap(), c);
    }

    #[test]
    fn rejects_beta_at_or_above_alpha() {
        let err = parse_config(r#"{"alpha": 0.0005, "beta": 0.0005, "epsilon": 2.0, "tau_max": 10}"#).unwrap_err();
        assert!(matches!(&err, Error::Config { key, .. } if key == "beta"));
        assert!(err.to_string().contains("beta"));
    }

    #[test]
    fn rejects_unknown_keys() {
        let err = parse_config(r#"{"alpha": 0.0005, "beta": 0.0001, "epsilon": 2.0, "tau_max": 10, "omega": 1}"#).unwrap_err();
        assert!(matches!(err, Error::Parse(_)));
        assert!(err.to_string().contains("omega"));
        let nested = parse_config(r#"{"alpha": 0.0005, "beta": 0.0001, "epsilon": 2.0, "tau_max": 10, "grid": {"points": 64}}"#);
        assert!(nested.unwrap_err().to_string().contains("points"));
    }

    #[test]
    fn rejects_malformed() {
        assert!(matches!(parse_config("{alpha: 1"), Err(Error::Parse(_))));
        assert!(parse_config(r#"{"alpha": 0.0005}"#).is_err());
        assert!(parse_config(r#"{"alpha": 0.0005, "beta": 0.0001, "epsilon": 2.0, "tau_max": 10, "scheme": "rk4"}"#).is_err());
    }
}
