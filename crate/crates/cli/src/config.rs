//! Flat key/value experiment configuration, read from a file and overridden
//! by `--key value` command-line pairs. Power quantities ending in `_db` are
//! converted as `linear = 10^(dB/10)`.
//!
//! Recognized keys (all optional, defaults in parentheses):
//!
//! ```text
//! alpha (0.4)            sets alpha_a and alpha_b together
//! alpha_a, alpha_b       individual overrides
//! sigma_x_db (-10)       or sigma_x2 (linear)
//! sigma_y_db (-10)       or sigma_y2
//! sigma_v_db (-10)       both Eve sides; sigma_va_db/sigma_vb_db or
//!                        sigma_va2/sigma_vb2 for one side
//! correlation (time_invariant)   time_invariant | jakes | table:1,0.9,...
//! fdt (0)                normalized Doppler for the jakes model
//! q_mode                 constant | iid (default: constant when
//!                        time-invariant, iid otherwise)
//! frame (3)              verification frame 2t+1 (odd, >= 3); or t
//! sweep                  axis:start:stop:step or axis:v1,v2,...
//!                        axis in {alpha, frame, doppler, attack_power}
//! schemes (scbca,acbca,acbca_lower,pla,pla_upper)
//! bits (3)               quantizer bits
//! p_sat (0.01)           per-component saturation probability
//! hermite_order (64)
//! attack (none)          none | pc | an
//! attack_power (0)       sigma_G^2 for pc, sigma_N^2 for an
//! oracle (off)           on | off: append Monte-Carlo estimate columns
//! oracle_n (1000000)
//! oracle_seed (42)
//! csv                    output path (required by the sweep subcommand)
//! svg                    optional plot path
//! ```

use std::collections::BTreeMap;
use std::path::PathBuf;

use sarlab_core::attacks::{AttackKind, AttackSpec};
use sarlab_core::channel::{CorrelationModel, QMode, ScenarioParams};
use sarlab_core::numerics::QuadratureSpec;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    Alpha,
    Frame,
    Doppler,
    AttackPower,
}

impl Axis {
    pub fn as_str(self) -> &'static str {
        match self {
            Axis::Alpha => "alpha",
            Axis::Frame => "frame",
            Axis::Doppler => "doppler",
            Axis::AttackPower => "attack_power",
        }
    }

    fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "alpha" => Ok(Axis::Alpha),
            "frame" => Ok(Axis::Frame),
            "doppler" => Ok(Axis::Doppler),
            "attack_power" => Ok(Axis::AttackPower),
            other => Err(CliError::Config(format!(
                "unknown sweep axis `{other}` (alpha, frame, doppler, attack_power)"
            ))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub axis: Axis,
    pub grid: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct OracleCfg {
    pub enabled: bool,
    pub n_samples: usize,
    pub seed: u64,
}

/// A fully validated experiment description.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub params: ScenarioParams,
    /// Frame parameter: verification at frame `2t + 1`.
    pub t: usize,
    pub sweep: Option<SweepSpec>,
    pub schemes: Vec<String>,
    pub bits: u32,
    pub p_sat: f64,
    pub quad: QuadratureSpec,
    pub attack: AttackSpec,
    pub oracle: OracleCfg,
    pub csv_path: Option<PathBuf>,
    pub svg_path: Option<PathBuf>,
}

fn parse_kv_text(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::Config(format!(
                "line {}: expected `key = value`, got `{line}`",
                lineno + 1
            )));
        };
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

/// Applies `--key value` override pairs on top of the file keys.
fn apply_overrides(
    map: &mut BTreeMap<String, String>,
    overrides: &[String],
) -> Result<(), CliError> {
    let mut it = overrides.iter();
    while let Some(flag) = it.next() {
        let Some(key) = flag.strip_prefix("--") else {
            return Err(CliError::Config(format!(
                "expected `--key value` overrides, got `{flag}`"
            )));
        };
        let Some(value) = it.next() else {
            return Err(CliError::Config(format!("override `{flag}` has no value")));
        };
        map.insert(key.to_string(), value.clone());
    }
    Ok(())
}

fn take_f64(map: &BTreeMap<String, String>, key: &str) -> Result<Option<f64>, CliError> {
    match map.get(key) {
        None => Ok(None),
        Some(v) => v
            .parse::<f64>()
            .map(Some)
            .map_err(|_| CliError::Config(format!("`{key}` is not a number: `{v}`"))),
    }
}

fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Resolves a noise power from its `_db` or linear key, with a default in dB.
fn noise_power(
    map: &BTreeMap<String, String>,
    db_key: &str,
    lin_key: &str,
    default_db: f64,
) -> Result<f64, CliError> {
    match (take_f64(map, db_key)?, take_f64(map, lin_key)?) {
        (Some(_), Some(_)) => Err(CliError::Config(format!(
            "`{db_key}` and `{lin_key}` are mutually exclusive"
        ))),
        (Some(db), None) => Ok(db_to_linear(db)),
        (None, Some(lin)) => Ok(lin),
        (None, None) => Ok(db_to_linear(default_db)),
    }
}

fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let grid: Vec<f64> = if spec.contains(',') {
        spec.split(',')
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::Config(format!("bad grid value `{v}`")))
            })
            .collect::<Result<_, _>>()?
    } else {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(CliError::Config(format!(
                "grid `{spec}` must be start:stop:step or a comma list"
            )));
        }
        let nums: Vec<f64> = parts
            .iter()
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| CliError::Config(format!("bad grid number `{v}`")))
            })
            .collect::<Result<_, _>>()?;
        let (start, stop, step) = (nums[0], nums[1], nums[2]);
        if !(step > 0.0) || stop < start {
            return Err(CliError::Config(format!(
                "grid `{spec}` must ascend with a positive step"
            )));
        }
        let count = ((stop - start) / step + 0.5).floor() as usize + 1;
        (0..count).map(|i| start + i as f64 * step).collect()
    };
    if grid.is_empty() {
        return Err(CliError::Config("empty sweep grid".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::Config(
            "sweep grid must be strictly increasing".into(),
        ));
    }
    Ok(grid)
}

/// Builds the experiment description from file text plus overrides.
pub fn build_config(
    file_text: Option<&str>,
    overrides: &[String],
) -> Result<ExperimentConfig, CliError> {
    let mut map = match file_text {
        Some(text) => parse_kv_text(text)?,
        None => BTreeMap::new(),
    };
    apply_overrides(&mut map, overrides)?;

    let known = [
        "alpha",
        "alpha_a",
        "alpha_b",
        "sigma_x_db",
        "sigma_x2",
        "sigma_y_db",
        "sigma_y2",
        "sigma_v_db",
        "sigma_va_db",
        "sigma_vb_db",
        "sigma_va2",
        "sigma_vb2",
        "correlation",
        "fdt",
        "q_mode",
        "frame",
        "t",
        "sweep",
        "schemes",
        "bits",
        "p_sat",
        "hermite_order",
        "attack",
        "attack_power",
        "oracle",
        "oracle_n",
        "oracle_seed",
        "csv",
        "svg",
    ];
    for key in map.keys() {
        if !known.contains(&key.as_str()) {
            return Err(CliError::Config(format!("unknown key `{key}`")));
        }
    }

    let alpha = take_f64(&map, "alpha")?.unwrap_or(0.4);
    let alpha_a = take_f64(&map, "alpha_a")?.unwrap_or(alpha);
    let alpha_b = take_f64(&map, "alpha_b")?.unwrap_or(alpha);

    let sigma_x2 = noise_power(&map, "sigma_x_db", "sigma_x2", -10.0)?;
    let sigma_y2 = noise_power(&map, "sigma_y_db", "sigma_y2", -10.0)?;
    let v_default_db = take_f64(&map, "sigma_v_db")?.unwrap_or(-10.0);
    let sigma_va2 = match (take_f64(&map, "sigma_va_db")?, take_f64(&map, "sigma_va2")?) {
        (Some(db), None) => db_to_linear(db),
        (None, Some(lin)) => lin,
        (None, None) => db_to_linear(v_default_db),
        _ => {
            return Err(CliError::Config(
                "`sigma_va_db` and `sigma_va2` are mutually exclusive".into(),
            ))
        }
    };
    let sigma_vb2 = match (take_f64(&map, "sigma_vb_db")?, take_f64(&map, "sigma_vb2")?) {
        (Some(db), None) => db_to_linear(db),
        (None, Some(lin)) => lin,
        (None, None) => db_to_linear(v_default_db),
        _ => {
            return Err(CliError::Config(
                "`sigma_vb_db` and `sigma_vb2` are mutually exclusive".into(),
            ))
        }
    };

    let fdt = take_f64(&map, "fdt")?.unwrap_or(0.0);
    let correlation = match map.get("correlation").map(String::as_str) {
        None | Some("time_invariant") => CorrelationModel::TimeInvariant,
        Some("jakes") => CorrelationModel::Jakes { fd_t: fdt },
        Some(t) if t.starts_with("table:") => {
            let vals: Vec<f64> = t["table:".len()..]
                .split(',')
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| CliError::Config(format!("bad table entry `{v}`")))
                })
                .collect::<Result<_, _>>()?;
            CorrelationModel::Table(vals)
        }
        Some(other) => {
            return Err(CliError::Config(format!(
                "unknown correlation model `{other}`"
            )))
        }
    };

    let q_mode = match map.get("q_mode").map(String::as_str) {
        Some("constant") => QMode::Constant,
        Some("iid") => QMode::IidPerFrame,
        Some(other) => return Err(CliError::Config(format!("unknown q_mode `{other}`"))),
        None => {
            if correlation == CorrelationModel::TimeInvariant {
                QMode::Constant
            } else {
                QMode::IidPerFrame
            }
        }
    };

    let params = ScenarioParams {
        sigma_x2,
        sigma_y2,
        sigma_va2,
        sigma_vb2,
        alpha_a,
        alpha_b,
        correlation,
        q_mode,
    };
    params
        .validate()
        .map_err(|e| CliError::Config(e.to_string()))?;

    let t = match (take_f64(&map, "frame")?, take_f64(&map, "t")?) {
        (Some(_), Some(_)) => {
            return Err(CliError::Config(
                "`frame` and `t` are mutually exclusive".into(),
            ))
        }
        (Some(frame), None) => frame_to_t(frame)?,
        (None, Some(tv)) => {
            if tv < 1.0 || tv.fract() != 0.0 {
                return Err(CliError::Config(format!(
                    "`t` must be an integer >= 1, got {tv}"
                )));
            }
            tv as usize
        }
        (None, None) => 1,
    };

    let sweep = match map.get("sweep") {
        None => None,
        Some(spec) => {
            let Some((axis, grid_spec)) = spec.split_once(':') else {
                return Err(CliError::Config(format!(
                    "sweep `{spec}` must be axis:grid"
                )));
            };
            let axis = Axis::parse(axis.trim())?;
            let grid = parse_grid(grid_spec.trim())?;
            if axis == Axis::Frame {
                for v in &grid {
                    frame_to_t(*v)?;
                }
            }
            Some(SweepSpec { axis, grid })
        }
    };

    let schemes: Vec<String> = map
        .get("schemes")
        .map(String::as_str)
        .unwrap_or("scbca,acbca,acbca_lower,pla,pla_upper")
        .split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect();
    if schemes.is_empty() {
        return Err(CliError::Config("no schemes selected".into()));
    }

    let bits = match take_f64(&map, "bits")? {
        None => 3,
        Some(b) if b >= 0.0 && b.fract() == 0.0 && b <= 20.0 => b as u32,
        Some(b) => {
            return Err(CliError::Config(format!(
                "`bits` must be an integer in 0..=20, got {b}"
            )))
        }
    };
    let p_sat = take_f64(&map, "p_sat")?.unwrap_or(0.01);
    if !(p_sat > 0.0 && p_sat < 1.0) {
        return Err(CliError::Config(format!(
            "`p_sat` must lie in (0,1), got {p_sat}"
        )));
    }

    let hermite_order = match take_f64(&map, "hermite_order")? {
        None => 64,
        Some(h) if h >= 8.0 && h.fract() == 0.0 => h as usize,
        Some(h) => {
            return Err(CliError::Config(format!(
                "`hermite_order` must be an integer >= 8, got {h}"
            )))
        }
    };
    let quad = QuadratureSpec::new(hermite_order, 8.0, 1e-6)
        .map_err(|e| CliError::Config(e.to_string()))?;

    let attack_power = take_f64(&map, "attack_power")?.unwrap_or(0.0);
    let attack = match map.get("attack").map(String::as_str) {
        None | Some("none") => AttackSpec::none(),
        Some("pc") => AttackSpec::pilot_contamination(attack_power),
        Some("an") => AttackSpec::artificial_noise(attack_power),
        Some(other) => return Err(CliError::Config(format!("unknown attack `{other}`"))),
    };
    if let Some(s) = &sweep {
        if s.axis == Axis::AttackPower && attack.kind == AttackKind::None {
            return Err(CliError::Config(
                "an attack_power sweep needs `attack = pc` or `attack = an`".into(),
            ));
        }
    }

    let oracle = OracleCfg {
        enabled: match map.get("oracle").map(String::as_str) {
            None | Some("off") => false,
            Some("on") => true,
            Some(other) => {
                return Err(CliError::Config(format!(
                    "`oracle` must be on or off, got `{other}`"
                )))
            }
        },
        n_samples: match take_f64(&map, "oracle_n")? {
            None => 1_000_000,
            Some(n) if n >= 1000.0 && n.fract() == 0.0 => n as usize,
            Some(n) => {
                return Err(CliError::Config(format!(
                    "`oracle_n` must be an integer >= 1000, got {n}"
                )))
            }
        },
        seed: match take_f64(&map, "oracle_seed")? {
            None => 42,
            Some(s) if s >= 0.0 && s.fract() == 0.0 => s as u64,
            Some(s) => {
                return Err(CliError::Config(format!(
                    "`oracle_seed` must be a nonnegative integer, got {s}"
                )))
            }
        },
    };

    Ok(ExperimentConfig {
        params,
        t,
        sweep,
        schemes,
        bits,
        p_sat,
        quad,
        attack,
        oracle,
        csv_path: map.get("csv").map(PathBuf::from),
        svg_path: map.get("svg").map(PathBuf::from),
    })
}

pub fn frame_to_t(frame: f64) -> Result<usize, CliError> {
    if frame.fract() != 0.0 || frame < 3.0 || (frame as usize) % 2 == 0 {
        return Err(CliError::Config(format!(
            "verification frames are odd integers >= 3, got {frame}"
        )));
    }
    Ok((frame as usize - 1) / 2)
}

/// Loads and resolves a configuration file plus overrides.
pub fn load_config(
    path: &std::path::Path,
    overrides: &[String],
) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    build_config(Some(&text), overrides)
}
