//! Sweep engine: one row per (grid point, scheme), evaluated concurrently
//! across grid points and ordered deterministically by (grid index, scheme
//! position).

use rayon::prelude::*;

use sarlab_core::attacks::apply_attack;
use sarlab_core::channel::{CorrelationModel, QMode, ScenarioParams};
use sarlab_core::error::Error;
use sarlab_core::gaussian::Bits;
use sarlab_core::lep::lep_combine;
use sarlab_core::oracle::{
    mc_gaussian_measures, mc_pla_rate, mc_quantized_cond_entropy, mc_quantized_cond_entropy_scalar,
    mc_quantized_lower_bound, sample_scalar_eve, sample_scenario, McEstimate, MeasureRequest,
    SampleColumn, SampleSet,
};
use sarlab_core::sar::{choose_vsat, QuantizerSpec, SarValue, SchemeKind};
use sarlab_core::scheme::{EvalPoint, SchemeRegistry};

use crate::config::{frame_to_t, Axis, ExperimentConfig};
use crate::CliError;

/// Evaluation status of one CSV row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RowStatus {
    Ok,
    /// The scheme is not defined for this point (for example the quantized
    /// rate on a time-varying channel); not a process failure.
    Unsupported,
    Error(String),
}

impl RowStatus {
    pub fn as_csv(&self) -> &str {
        match self {
            RowStatus::Ok => "ok",
            RowStatus::Unsupported => "unsupported",
            RowStatus::Error(_) => "error",
        }
    }
}

/// One output row of a sweep.
#[derive(Clone, Debug)]
pub struct Row {
    pub sweep_axis: String,
    pub sweep_value: f64,
    pub scheme: String,
    /// Verification frame `2t + 1`.
    pub frame: usize,
    pub value: Option<Bits>,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub status: RowStatus,
    pub oracle_estimate: Option<f64>,
    pub oracle_stderr: Option<f64>,
}

struct PointSetup {
    params: ScenarioParams,
    t: usize,
    attack: sarlab_core::attacks::AttackSpec,
}

/// Applies the sweep axis to the base configuration.
fn setup_point(cfg: &ExperimentConfig, axis: Axis, value: f64) -> Result<PointSetup, CliError> {
    let mut params = cfg.params.clone();
    let mut t = cfg.t;
    let mut attack = cfg.attack;
    match axis {
        Axis::Alpha => {
            params.alpha_a = value;
            params.alpha_b = value;
        }
        Axis::Frame => {
            t = frame_to_t(value)?;
        }
        Axis::Doppler => {
            params.correlation = CorrelationModel::Jakes { fd_t: value };
            if params.q_mode == QMode::Constant && cfg.params.is_time_invariant() {
                // The frozen-q convention belongs to the frozen channel;
                // sweeping the Doppler redraws q per frame unless the
                // configuration explicitly says otherwise.
                params.q_mode = QMode::IidPerFrame;
            }
        }
        Axis::AttackPower => {
            attack = attack.with_power(value);
        }
    }
    Ok(PointSetup { params, t, attack })
}

fn core_error_row_status(e: &Error) -> RowStatus {
    match e {
        Error::UnsupportedModel(_) => RowStatus::Unsupported,
        other => RowStatus::Error(other.to_string()),
    }
}

/// Runs the configured sweep (or the single configured point when no sweep
/// is given) and returns the ordered rows.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Vec<Row>, CliError> {
    let registry = SchemeRegistry::builtin();
    for name in &cfg.schemes {
        if registry.get(name).is_none() {
            return Err(CliError::Config(format!(
                "unknown scheme `{name}`; available: {}",
                registry.names().join(", ")
            )));
        }
    }

    let (axis_name, grid): (String, Vec<f64>) = match &cfg.sweep {
        Some(s) => (s.axis.as_str().to_string(), s.grid.clone()),
        None => ("point".to_string(), vec![0.0]),
    };
    let axis = cfg.sweep.as_ref().map(|s| s.axis);

    let results: Vec<Result<Vec<Row>, CliError>> = grid
        .par_iter()
        .enumerate()
        .map(|(idx, &value)| -> Result<Vec<Row>, CliError> {
            let setup = match axis {
                Some(a) => setup_point(cfg, a, value)?,
                None => PointSetup {
                    params: cfg.params.clone(),
                    t: cfg.t,
                    attack: cfg.attack,
                },
            };
            evaluate_point(cfg, &registry, &axis_name, value, idx, setup)
        })
        .collect();

    let mut rows = Vec::new();
    for r in results {
        rows.extend(r?);
    }
    Ok(rows)
}

fn evaluate_point(
    cfg: &ExperimentConfig,
    registry: &SchemeRegistry,
    axis_name: &str,
    value: f64,
    grid_idx: usize,
    setup: PointSetup,
) -> Result<Vec<Row>, CliError> {
    let (params, adjustment) =
        apply_attack(&setup.params, &setup.attack).map_err(|e| CliError::Config(e.to_string()))?;
    let quantizer = choose_vsat(&params, cfg.p_sat)
        .ok()
        .and_then(|v| QuantizerSpec::new(cfg.bits, v).ok());

    let mut pt = EvalPoint::new(params.clone(), setup.t);
    pt.quantizer = quantizer.clone();
    pt.quad = cfg.quad;
    pt.lep_adjustment = adjustment;

    // One sample set per grid point feeds every scheme's oracle column.
    let oracle_set = if cfg.oracle.enabled {
        let seed = cfg
            .oracle
            .seed
            .wrapping_add((grid_idx as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        Some(build_oracle_set(&pt, cfg, seed)?)
    } else {
        None
    };

    let mut rows = Vec::with_capacity(cfg.schemes.len());
    for name in &cfg.schemes {
        let scheme = registry.get(name).expect("validated above");
        let frame = 2 * setup.t + 1;
        let mut row = Row {
            sweep_axis: axis_name.to_string(),
            sweep_value: value,
            scheme: name.clone(),
            frame,
            value: None,
            lower: None,
            upper: None,
            status: RowStatus::Ok,
            oracle_estimate: None,
            oracle_stderr: None,
        };
        match scheme.evaluate(&pt) {
            Ok(result) => {
                match result.value {
                    SarValue::Point(b) => row.value = Some(b),
                    SarValue::Bounds { lower, upper } => {
                        row.lower = Some(lower);
                        row.upper = Some(upper);
                    }
                }
                if let Some(set) = &oracle_set {
                    if let Some(est) = oracle_estimate(name, &pt, cfg, set) {
                        row.oracle_estimate = Some(est.estimate);
                        row.oracle_stderr = Some(est.std_err);
                    }
                }
            }
            Err(e) => row.status = core_error_row_status(&e),
        }
        rows.push(row);
    }
    Ok(rows)
}

enum OracleSet {
    /// Full generative sampling of `(x1, y2, x2t1, z(2t))`.
    Full(SampleSet),
    /// Scalar-Eve sampling used for attack-transformed scenarios, plus the
    /// adjusted residual power it was drawn with.
    Scalar(SampleSet, f64),
}

fn build_oracle_set(
    pt: &EvalPoint,
    cfg: &ExperimentConfig,
    seed: u64,
) -> Result<OracleSet, CliError> {
    if pt.lep_adjustment.is_identity() {
        let set = sample_scenario(&pt.params, pt.t, cfg.oracle.n_samples, seed)
            .map_err(|e| CliError::Numeric(e.to_string()))?;
        Ok(OracleSet::Full(set))
    } else {
        let lep = lep_combine(&pt.params, pt.t, 1).map_err(|e| CliError::Numeric(e.to_string()))?;
        let sigma_z2 = lep.sigma_z2 / pt.lep_adjustment.sigma_z2_divisor;
        let set = sample_scalar_eve(&pt.params, sigma_z2, cfg.oracle.n_samples, seed)
            .map_err(|e| CliError::Numeric(e.to_string()))?;
        Ok(OracleSet::Scalar(set, sigma_z2))
    }
}

/// Monte-Carlo counterpart of each scheme's value; `None` when the scheme
/// has nothing to estimate (the infinite continuous rate).
fn oracle_estimate(
    scheme: &str,
    pt: &EvalPoint,
    cfg: &ExperimentConfig,
    set: &OracleSet,
) -> Option<McEstimate> {
    let (samples, z_cols): (&SampleSet, Vec<SampleColumn>) = match set {
        OracleSet::Full(s) => (s, (0..s.z.len()).map(SampleColumn::Z).collect()),
        OracleSet::Scalar(s, _) => (s, vec![SampleColumn::Z(0)]),
    };
    let kind = match scheme {
        "scbca" => SchemeKind::Scbca,
        "acbca" => SchemeKind::Acbca,
        "acbca_lower" => SchemeKind::AcbcaLower,
        "pla" => SchemeKind::Pla,
        "pla_upper" => SchemeKind::PlaUpper,
        _ => return None,
    };
    match kind {
        SchemeKind::Scbca => mc_gaussian_measures(
            samples,
            &MeasureRequest::CondMi(vec![SampleColumn::X1], vec![SampleColumn::Y2], z_cols),
        )
        .ok(),
        SchemeKind::Acbca => {
            let quant = pt.quantizer.as_ref()?;
            match set {
                OracleSet::Full(s) => {
                    if pt.params.alpha_a == 0.0 && pt.params.alpha_b == 0.0 {
                        return None; // conditioning is vacuous; nothing scalar to form
                    }
                    let lep = lep_combine(&pt.params, pt.t, 2).ok()?;
                    mc_quantized_cond_entropy(s, quant, &lep, pt.params.sigma_y2).ok()
                }
                OracleSet::Scalar(_, sigma_z2) => mc_quantized_cond_entropy_scalar(
                    &pt.params,
                    *sigma_z2,
                    quant,
                    cfg.oracle.n_samples,
                    cfg.oracle.seed ^ 0x5eed,
                )
                .ok(),
            }
        }
        SchemeKind::AcbcaLower => {
            let quant = pt.quantizer.as_ref()?;
            mc_quantized_lower_bound(samples, quant).ok()
        }
        SchemeKind::Pla => mc_pla_rate(samples).ok(),
        SchemeKind::PlaUpper => mc_gaussian_measures(
            samples,
            &MeasureRequest::CondMi(vec![SampleColumn::X1], vec![SampleColumn::X2t1], z_cols),
        )
        .ok(),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::build_config;

    #[test]
    fn single_point_produces_one_row_per_scheme() {
        let cfg = build_config(None, &[]).unwrap();
        let rows = run_sweep(&cfg).unwrap();
        assert_eq!(rows.len(), 5);
        assert!(rows.iter().all(|r| r.sweep_axis == "point"));
        assert!(rows.iter().all(|r| r.status == RowStatus::Ok));
        assert_eq!(rows[0].frame, 3);
    }

    #[test]
    fn unsupported_combinations_become_row_status() {
        let cfg = build_config(
            Some("correlation = jakes\nfdt = 0.05\nschemes = acbca,pla\n"),
            &[],
        )
        .unwrap();
        let rows = run_sweep(&cfg).unwrap();
        assert_eq!(rows[0].status, RowStatus::Unsupported);
        assert_eq!(rows[1].status, RowStatus::Ok);
    }

    #[test]
    fn rows_are_ordered_by_grid_then_scheme() {
        let cfg =
            build_config(Some("sweep = alpha:0:0.4:0.2\nschemes = pla,scbca\n"), &[]).unwrap();
        let rows = run_sweep(&cfg).unwrap();
        let got: Vec<(f64, String)> = rows
            .iter()
            .map(|r| (r.sweep_value, r.scheme.clone()))
            .collect();
        assert_eq!(
            got,
            vec![
                (0.0, "pla".into()),
                (0.0, "scbca".into()),
                (0.2, "pla".into()),
                (0.2, "scbca".into()),
                (0.4, "pla".into()),
                (0.4, "scbca".into()),
            ]
        );
    }

    #[test]
    fn unknown_scheme_is_a_config_error() {
        let cfg = build_config(Some("schemes = scbca,mystery\n"), &[]).unwrap();
        assert!(matches!(run_sweep(&cfg), Err(CliError::Config(_))));
    }

    #[test]
    fn oracle_columns_appear_when_enabled() {
        let cfg = build_config(
            Some(
                "oracle = on\noracle_n = 20000\nschemes = scbca,pla,acbca_lower,acbca_continuous\n",
            ),
            &[],
        )
        .unwrap();
        let rows = run_sweep(&cfg).unwrap();
        assert!(rows[0].oracle_estimate.is_some());
        assert!(rows[1].oracle_estimate.is_some());
        assert!(rows[2].oracle_estimate.is_some());
        assert!(
            rows[2].oracle_stderr.unwrap() > 1e-4,
            "the histogram-entropy noise must show in the standard error"
        );
        assert!(
            rows[3].oracle_estimate.is_none(),
            "infinite rate has no estimate"
        );
    }
}
