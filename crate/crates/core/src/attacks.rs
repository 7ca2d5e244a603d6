//! Active attacks during the association phase, expressed as scenario
//! transforms.
//!
//! * Pilot contamination: Eve superimposes scaled pilots so both legitimate
//!   parties estimate channel-plus-interference. After renormalizing, the
//!   model is unchanged except that `sigma_x^2` and `sigma_y^2` shrink by
//!   `1 + sigma_G^2`, and Eve's scalar estimate keeps unit gain with its
//!   residual power shrunk by the same factor.
//! * Artificial noise: Eve radiates noise while the legitimate parties
//!   estimate, adding `sigma_N^2` to both their estimation noise powers and
//!   leaving her own side untouched.
//!
//! Both attacks are defined on time-invariant channels.

use crate::channel::ScenarioParams;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AttackKind {
    None,
    PilotContamination,
    ArtificialNoise,
}

/// Attack selection with its power knob; only the field matching `kind` is
/// read.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AttackSpec {
    pub kind: AttackKind,
    /// Power of the superimposed channel in the pilot-contamination attack.
    pub sigma_g2: f64,
    /// Noise power added at each legitimate receiver by the artificial-noise
    /// attack.
    pub sigma_n2: f64,
}

impl AttackSpec {
    pub fn none() -> Self {
        Self {
            kind: AttackKind::None,
            sigma_g2: 0.0,
            sigma_n2: 0.0,
        }
    }

    pub fn pilot_contamination(sigma_g2: f64) -> Self {
        Self {
            kind: AttackKind::PilotContamination,
            sigma_g2,
            sigma_n2: 0.0,
        }
    }

    pub fn artificial_noise(sigma_n2: f64) -> Self {
        Self {
            kind: AttackKind::ArtificialNoise,
            sigma_g2: 0.0,
            sigma_n2,
        }
    }

    /// The swept power knob of the active attack.
    pub fn power(&self) -> f64 {
        match self.kind {
            AttackKind::None => 0.0,
            AttackKind::PilotContamination => self.sigma_g2,
            AttackKind::ArtificialNoise => self.sigma_n2,
        }
    }

    pub fn with_power(mut self, p: f64) -> Self {
        match self.kind {
            AttackKind::None => {}
            AttackKind::PilotContamination => self.sigma_g2 = p,
            AttackKind::ArtificialNoise => self.sigma_n2 = p,
        }
        self
    }
}

/// How an attack reshapes Eve's scalar estimate on top of the parameter
/// transform.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LepAdjustment {
    /// Eve's residual power is divided by this factor.
    pub sigma_z2_divisor: f64,
}

impl LepAdjustment {
    pub fn identity() -> Self {
        Self {
            sigma_z2_divisor: 1.0,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.sigma_z2_divisor == 1.0
    }
}

/// Applies an association-phase attack, returning the transformed scenario
/// and the adjustment to apply to Eve's scalar estimate.
pub fn apply_attack(
    params: &ScenarioParams,
    atk: &AttackSpec,
) -> Result<(ScenarioParams, LepAdjustment)> {
    params.validate()?;
    match atk.kind {
        AttackKind::None => Ok((params.clone(), LepAdjustment::identity())),
        AttackKind::PilotContamination => {
            require_time_invariant(params, "pilot contamination")?;
            if !(atk.sigma_g2 >= 0.0 && atk.sigma_g2.is_finite()) {
                return Err(Error::InvalidParam(format!(
                    "sigma_g2 must be finite and >= 0, got {}",
                    atk.sigma_g2
                )));
            }
            let scale = 1.0 + atk.sigma_g2;
            let mut out = params.clone();
            out.sigma_x2 /= scale;
            out.sigma_y2 /= scale;
            Ok((
                out,
                LepAdjustment {
                    sigma_z2_divisor: scale,
                },
            ))
        }
        AttackKind::ArtificialNoise => {
            require_time_invariant(params, "artificial noise")?;
            if !(atk.sigma_n2 >= 0.0 && atk.sigma_n2.is_finite()) {
                return Err(Error::InvalidParam(format!(
                    "sigma_n2 must be finite and >= 0, got {}",
                    atk.sigma_n2
                )));
            }
            let mut out = params.clone();
            out.sigma_x2 += atk.sigma_n2;
            out.sigma_y2 += atk.sigma_n2;
            Ok((out, LepAdjustment::identity()))
        }
    }
}

fn require_time_invariant(params: &ScenarioParams, what: &str) -> Result<()> {
    if params.is_time_invariant() {
        Ok(())
    } else {
        Err(Error::UnsupportedModel(format!(
            "the {what} attack is defined on time-invariant channels"
        )))
    }
}
