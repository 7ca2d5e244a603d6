//! Scenario description and covariance construction for the reciprocal
//! Rayleigh AWGN channel model.
//!
//! Per channel use, the legitimate estimates are
//! `x(t) = h(t) + sigma_x w_x(t)` at Bob and `y(t) = h(t) + sigma_y w_y(t)`
//! at Alice, with `h` a zero-mean unit-power circularly-symmetric complex
//! Gaussian process whose frame-lag autocorrelation is `rho(l)`. Eve's
//! estimates are correlated copies,
//! `v_A(t) = alpha_a h(t) + sqrt(1 - alpha_a^2) q_A(t) + sigma_va w(t)` when
//! Alice transmits (odd frames) and the `alpha_b` analogue when Bob transmits
//! (even frames); the auxiliary processes `q_A`, `q_B` carry the part of
//! Eve's channel that is independent of the legitimate one. Her stacked
//! observation after frame `2t` is
//! `z(2t) = [v_A(1), v_B(2), ..., v_A(2t-1), v_B(2t)]`.
//!
//! Every covariance entry is derived from this generative model rather than
//! from tabulated special cases, and the Monte-Carlo sampler in
//! [`crate::oracle`] draws from the same equations, so the two sides check
//! each other.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{bessel_j0, HermitianMatrix};

/// Frame-lag autocorrelation model for the channel process `h`.
#[derive(Clone, Debug, PartialEq)]
pub enum CorrelationModel {
    /// `rho(l) = 1` for every lag: the channel never changes.
    TimeInvariant,
    /// Jakes fading, `rho(l) = J0(2 pi fd_t l)` with `fd_t` the normalized
    /// Doppler frequency (Doppler times frame duration).
    Jakes { fd_t: f64 },
    /// Explicit table of correlations by absolute lag; `table[0]` must be 1.
    Table(Vec<f64>),
}

impl CorrelationModel {
    pub fn validate(&self) -> Result<()> {
        match self {
            CorrelationModel::TimeInvariant => Ok(()),
            CorrelationModel::Jakes { fd_t } => {
                if fd_t.is_finite() && *fd_t >= 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidParam(format!(
                        "jakes normalized doppler must be finite and >= 0, got {fd_t}"
                    )))
                }
            }
            CorrelationModel::Table(table) => {
                if table.is_empty() {
                    return Err(Error::InvalidParam("empty correlation table".into()));
                }
                if table[0] != 1.0 {
                    return Err(Error::InvalidParam(format!(
                        "correlation table must start with 1 at lag 0, got {}",
                        table[0]
                    )));
                }
                if let Some(bad) = table.iter().find(|v| !v.is_finite() || v.abs() > 1.0) {
                    return Err(Error::InvalidParam(format!(
                        "correlation table entries must lie in [-1, 1], got {bad}"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Autocorrelation at the given frame lag; real and even in the lag.
    pub fn rho(&self, lag: i64) -> Result<f64> {
        match self {
            CorrelationModel::TimeInvariant => Ok(1.0),
            CorrelationModel::Jakes { fd_t } => {
                bessel_j0(2.0 * std::f64::consts::PI * fd_t * lag.unsigned_abs() as f64)
            }
            CorrelationModel::Table(table) => {
                let idx = lag.unsigned_abs() as usize;
                table.get(idx).copied().ok_or(Error::TableOutOfRange {
                    lag,
                    len: table.len(),
                })
            }
        }
    }
}

/// Evaluates a correlation model at a frame lag.
pub fn rho_eval(model: &CorrelationModel, lag: i64) -> Result<f64> {
    model.rho(lag)
}

/// Whether the auxiliary processes `q_A`, `q_B` are frozen across frames or
/// redrawn independently each frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QMode {
    /// One realization reused at every frame; required when the channel
    /// itself is time-invariant.
    Constant,
    /// Fresh realization per frame, so same-side off-diagonal covariance
    /// entries carry no `q` contribution.
    IidPerFrame,
}

/// Full second-order description of a scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioParams {
    /// Bob's estimation-noise power (linear).
    pub sigma_x2: f64,
    /// Alice's estimation-noise power (linear).
    pub sigma_y2: f64,
    /// Eve's noise power on Alice-side estimates.
    pub sigma_va2: f64,
    /// Eve's noise power on Bob-side estimates.
    pub sigma_vb2: f64,
    /// Correlation of Eve's Alice-side estimates with the channel.
    pub alpha_a: f64,
    /// Correlation of Eve's Bob-side estimates with the channel.
    pub alpha_b: f64,
    pub correlation: CorrelationModel,
    pub q_mode: QMode,
}

impl ScenarioParams {
    /// Time-invariant scenario with the common defaults: all noise powers
    /// equal, both correlation coefficients equal.
    pub fn time_invariant(alpha: f64, noise_power: f64) -> Self {
        Self {
            sigma_x2: noise_power,
            sigma_y2: noise_power,
            sigma_va2: noise_power,
            sigma_vb2: noise_power,
            alpha_a: alpha,
            alpha_b: alpha,
            correlation: CorrelationModel::TimeInvariant,
            q_mode: QMode::Constant,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("sigma_x2", self.sigma_x2),
            ("sigma_y2", self.sigma_y2),
            ("sigma_va2", self.sigma_va2),
            ("sigma_vb2", self.sigma_vb2),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidParam(format!(
                    "{name} must be finite and >= 0, got {v}"
                )));
            }
        }
        for (name, a) in [("alpha_a", self.alpha_a), ("alpha_b", self.alpha_b)] {
            if !a.is_finite() || a.abs() > 1.0 {
                return Err(Error::InvalidParam(format!(
                    "{name} must lie in [-1, 1], got {a}"
                )));
            }
        }
        self.correlation.validate()?;
        if self.correlation == CorrelationModel::TimeInvariant && self.q_mode != QMode::Constant {
            return Err(Error::InvalidParam(
                "a time-invariant channel freezes q_A and q_B; q_mode must be constant".into(),
            ));
        }
        Ok(())
    }

    pub fn is_time_invariant(&self) -> bool {
        self.correlation == CorrelationModel::TimeInvariant
    }

    /// Eve-side correlation coefficient in frame `frame` (1-based): Alice
    /// transmits in odd frames, Bob in even frames.
    pub fn alpha_at(&self, frame: usize) -> f64 {
        if frame % 2 == 1 {
            self.alpha_a
        } else {
            self.alpha_b
        }
    }

    /// Eve-side noise power in frame `frame`.
    pub fn sigma_v2_at(&self, frame: usize) -> f64 {
        if frame % 2 == 1 {
            self.sigma_va2
        } else {
            self.sigma_vb2
        }
    }

    pub fn rho(&self, lag: i64) -> Result<f64> {
        self.correlation.rho(lag)
    }
}

/// All covariance objects needed to analyse a scenario at a given frame
/// parameter `t` (Eve holds the `2t` observations `z(2t)`, the verification
/// frame is `2t + 1`).
#[derive(Clone, Debug)]
pub struct CovarianceBundle {
    pub t: usize,
    /// `E[z z^H]`, dimension `2t`.
    pub rz: HermitianMatrix,
    /// `E[x(1) z_l^*]` for each entry of `z`.
    pub rx1: Vec<Complex64>,
    /// `E[y(2) z_l^*]`.
    pub ry2: Vec<Complex64>,
    /// `E[x(2t+1) z_l^*]`.
    pub rx2t1: Vec<Complex64>,
    /// `E[x(1) y(2)^*] = rho(1)`.
    pub rho_xy: Complex64,
    /// `E[x(2t+1) x(1)^*] = rho(2t)`.
    pub rho_xx: Complex64,
    /// `1 + sigma_x2`.
    pub var_x: f64,
    /// `1 + sigma_y2`.
    pub var_y: f64,
}

/// Builds every covariance entry of the scenario from the generative model.
///
/// Entry `l` of `z` (1-based) is Eve's frame-`l` estimate: Alice-side for odd
/// `l`, Bob-side for even `l`. Same-side off-diagonal entries pick up a
/// `(1 - alpha^2)` term when `q_mode` is constant.
pub fn build_covariances(params: &ScenarioParams, t: usize) -> Result<CovarianceBundle> {
    params.validate()?;
    if t < 1 {
        return Err(Error::InvalidParam("t must be at least 1".into()));
    }
    let n = 2 * t;
    let q_term = |frame_m: usize, frame_n: usize| -> f64 {
        // q_A couples Alice-side frames, q_B couples Bob-side frames; only
        // the constant mode correlates distinct frames.
        if frame_m % 2 != frame_n % 2 {
            return 0.0;
        }
        if frame_m == frame_n || params.q_mode == QMode::Constant {
            let a = params.alpha_at(frame_m);
            1.0 - a * a
        } else {
            0.0
        }
    };

    let mut rz_entries = vec![vec![0.0_f64; n]; n];
    for m in 1..=n {
        for nn in m..=n {
            let rho = params.rho((m as i64) - (nn as i64))?;
            let mut v = params.alpha_at(m) * params.alpha_at(nn) * rho;
            if m % 2 == nn % 2 {
                v += q_term(m, nn);
            }
            if m == nn {
                v += params.sigma_v2_at(m);
            }
            rz_entries[m - 1][nn - 1] = v;
            rz_entries[nn - 1][m - 1] = v;
        }
    }
    let rz = HermitianMatrix::from_real_fn(n, |i, j| rz_entries[i][j]);

    let cross = |frame_obs: usize| -> Result<Vec<Complex64>> {
        (1..=n)
            .map(|l| {
                let rho = params.rho(frame_obs as i64 - l as i64)?;
                Ok(Complex64::new(params.alpha_at(l) * rho, 0.0))
            })
            .collect()
    };

    Ok(CovarianceBundle {
        t,
        rz,
        rx1: cross(1)?,
        ry2: cross(2)?,
        rx2t1: cross(2 * t + 1)?,
        rho_xy: Complex64::new(params.rho(1)?, 0.0),
        rho_xx: Complex64::new(params.rho(2 * t as i64)?, 0.0),
        var_x: 1.0 + params.sigma_x2,
        var_y: 1.0 + params.sigma_y2,
    })
}

impl CovarianceBundle {
    pub fn z_dim(&self) -> usize {
        2 * self.t
    }

    /// Joint covariance of `[x(1), y(2), z]`, in that order.
    pub fn joint_x1_y2_z(&self) -> HermitianMatrix {
        let n = self.z_dim();
        HermitianMatrix::from_fn(n + 2, |i, j| {
            // j >= i by construction
            match (i, j) {
                (0, 0) => Complex64::new(self.var_x, 0.0),
                (1, 1) => Complex64::new(self.var_y, 0.0),
                (0, 1) => self.rho_xy,
                (0, _) => self.rx1[j - 2],
                (1, _) => self.ry2[j - 2],
                _ => self.rz.get(i - 2, j - 2),
            }
        })
    }

    /// Joint covariance of `[x(1), x(2t+1), z]`, in that order.
    pub fn joint_x1_x2t1_z(&self) -> HermitianMatrix {
        let n = self.z_dim();
        HermitianMatrix::from_fn(n + 2, |i, j| match (i, j) {
            (0, 0) | (1, 1) => Complex64::new(self.var_x, 0.0),
            (0, 1) => self.rho_xx.conj(),
            (0, _) => self.rx1[j - 2],
            (1, _) => self.rx2t1[j - 2],
            _ => self.rz.get(i - 2, j - 2),
        })
    }
}
