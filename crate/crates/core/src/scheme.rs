//! Authentication schemes behind a common trait, registered by name.
//!
//! Each scheme variant evaluates one rate (or bound pair) at a fully
//! specified point: post-attack scenario parameters, frame parameter,
//! quantizer and quadrature settings. The registry maps the stable names
//! used by configuration files and the CSV output onto trait objects, so the
//! sweep driver selects strategies at runtime without knowing their shape.

use crate::attacks::LepAdjustment;
use crate::channel::ScenarioParams;
use crate::error::{Error, Result};
use crate::lep::{lep_combine, lep_pick_for_scbca};
use crate::numerics::QuadratureSpec;
use crate::sar::{
    acbca_sar_continuous, acbca_sar_lower_bound, acbca_sar_lower_bound_with_eve,
    acbca_sar_quantized, acbca_sar_quantized_with_sigma, pla_sar, pla_sar_upper,
    pla_sar_upper_with_eve, pla_sar_with_eve, scbca_sar_bounds, scbca_sar_bounds_with_eve, EveMode,
    QuantizerSpec, SarResult, ScalarEve,
};

/// A fully resolved evaluation point handed to a scheme.
#[derive(Clone, Debug)]
pub struct EvalPoint {
    /// Scenario parameters after any attack transform.
    pub params: ScenarioParams,
    /// Frame parameter: Eve holds `2t` observations, verification happens at
    /// frame `2t + 1`.
    pub t: usize,
    /// Quantizer for the A-CBCA variants.
    pub quantizer: Option<QuantizerSpec>,
    pub quad: QuadratureSpec,
    /// Attack adjustment to Eve's scalar estimate; identity when no attack
    /// is active.
    pub lep_adjustment: LepAdjustment,
}

impl EvalPoint {
    pub fn new(params: ScenarioParams, t: usize) -> Self {
        Self {
            params,
            t,
            quantizer: None,
            quad: QuadratureSpec::default(),
            lep_adjustment: LepAdjustment::identity(),
        }
    }

    /// Scalar Eve description for attack-adjusted evaluation, targeting the
    /// given frame.
    fn scalar_eve(&self, target: usize) -> Result<ScalarEve> {
        let lep = lep_combine(&self.params, self.t, target)?;
        Ok(ScalarEve::from_lep(&lep).with_sigma_divided_by(self.lep_adjustment.sigma_z2_divisor))
    }

    fn quantizer(&self) -> Result<&QuantizerSpec> {
        self.quantizer.as_ref().ok_or_else(|| {
            Error::InvalidParam("this scheme needs a quantizer (bits and saturation)".into())
        })
    }
}

/// One authentication strategy evaluated at a point.
pub trait AuthScheme: Send + Sync {
    /// Stable name used in configuration files and CSV rows.
    fn name(&self) -> &'static str;
    fn evaluate(&self, pt: &EvalPoint) -> Result<SarResult>;
}

struct Scbca;

impl AuthScheme for Scbca {
    fn name(&self) -> &'static str {
        "scbca"
    }

    fn evaluate(&self, pt: &EvalPoint) -> Result<SarResult> {
        if pt.lep_adjustment.is_identity() {
            scbca_sar_bounds(&pt.params, pt.t, EveMode::FullZ)
        } else {
            // Attack transforms act on Eve's scalar estimate; for the
            // time-invariant channels attacks run on, the scalar is a
            // sufficient statistic, so nothing is lost.
            let lep = lep_pick_for_scbca(&pt.params, pt.t)?;
            let eve =
                ScalarEve::from_lep(&lep).with_sigma_divided_by(pt.lep_adjustment.sigma_z2_divisor);
            scbca_sar_bounds_with_eve(&pt.params, pt.t, &eve)
        }
    }
}

struct Acbca;

impl AuthScheme for Acbca {
    fn name(&self) -> &'static str {
        "acbca"
    }

    fn evaluate(&self, pt: &EvalPoint) -> Result<SarResult> {
        let quant = pt.quantizer()?;
        if pt.lep_adjustment.is_identity() {
            acbca_sar_quantized(&pt.params, pt.t, quant, &pt.quad)
        } else {
            let eve = pt.scalar_eve(2)?;
            acbca_sar_quantized_with_sigma(&pt.params, pt.t, eve.sigma_z2, quant, &pt.quad)
        }
    }
}

struct AcbcaLower;

impl AuthScheme for AcbcaLower {
    fn name(&self) -> &'static str {
        "acbca_lower"
    }

    fn evaluate(&self, pt: &EvalPoint) -> Result<SarResult> {
        let quant = pt.quantizer()?;
        if pt.lep_adjustment.is_identity() {
            acbca_sar_lower_bound(&pt.params, pt.t, quant)
        } else {
            let eve = pt.scalar_eve(2)?;
            acbca_sar_lower_bound_with_eve(&pt.params, pt.t, quant, &eve)
        }
    }
}

struct AcbcaContinuous;

impl AuthScheme for AcbcaContinuous {
    fn name(&self) -> &'static str {
        "acbca_continuous"
    }

    fn evaluate(&self, pt: &EvalPoint) -> Result<SarResult> {
        Ok(acbca_sar_continuous(pt.t))
    }
}

struct Pla;

impl AuthScheme for Pla {
    fn name(&self) -> &'static str {
        "pla"
    }

    fn evaluate(&self, pt: &EvalPoint) -> Result<SarResult> {
        if pt.lep_adjustment.is_identity() {
            pla_sar(&pt.params, pt.t)
        } else {
            let eve = pt.scalar_eve(1)?;
            pla_sar_with_eve(&pt.params, pt.t, &eve)
        }
    }
}

struct PlaUpper;

impl AuthScheme for PlaUpper {
    fn name(&self) -> &'static str {
        "pla_upper"
    }

    fn evaluate(&self, pt: &EvalPoint) -> Result<SarResult> {
        if pt.lep_adjustment.is_identity() {
            pla_sar_upper(&pt.params, pt.t)
        } else {
            let eve = pt.scalar_eve(1)?;
            pla_sar_upper_with_eve(&pt.params, pt.t, &eve)
        }
    }
}

/// Name-keyed registry of the built-in schemes.
pub struct SchemeRegistry {
    entries: Vec<Box<dyn AuthScheme>>,
}

impl SchemeRegistry {
    pub fn builtin() -> Self {
        Self {
            entries: vec![
                Box::new(Scbca),
                Box::new(Acbca),
                Box::new(AcbcaLower),
                Box::new(AcbcaContinuous),
                Box::new(Pla),
                Box::new(PlaUpper),
            ],
        }
    }

    pub fn register(&mut self, scheme: Box<dyn AuthScheme>) {
        self.entries.push(scheme);
    }

    pub fn get(&self, name: &str) -> Option<&dyn AuthScheme> {
        self.entries
            .iter()
            .find(|s| s.name() == name)
            .map(|b| b.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|s| s.name()).collect()
    }
}

impl Default for SchemeRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::Bits;
    use crate::sar::SarValue;

    #[test]
    fn registry_resolves_all_builtin_names() {
        let reg = SchemeRegistry::builtin();
        for name in [
            "scbca",
            "acbca",
            "acbca_lower",
            "acbca_continuous",
            "pla",
            "pla_upper",
        ] {
            assert!(reg.get(name).is_some(), "missing {name}");
        }
        assert!(reg.get("nope").is_none());
    }

    #[test]
    fn schemes_evaluate_at_a_plain_point() {
        let reg = SchemeRegistry::builtin();
        let mut pt = EvalPoint::new(ScenarioParams::time_invariant(0.4, 0.1), 1);
        pt.quantizer = Some(QuantizerSpec::new(3, 1.9).unwrap());
        for name in reg.names() {
            let r = reg.get(name).unwrap().evaluate(&pt).unwrap();
            assert_eq!(r.frame, 3);
            match r.value {
                SarValue::Point(Bits::Finite(v)) => assert!(v >= 0.0),
                SarValue::Point(Bits::Infinite) => assert_eq!(name, "acbca_continuous"),
                SarValue::Bounds { lower, upper } => {
                    assert!(lower >= 0.0 && lower <= upper + 1e-9, "{name}")
                }
            }
        }
    }

    #[test]
    fn acbca_without_quantizer_is_rejected() {
        let reg = SchemeRegistry::builtin();
        let pt = EvalPoint::new(ScenarioParams::time_invariant(0.4, 0.1), 1);
        assert!(reg.get("acbca").unwrap().evaluate(&pt).is_err());
    }
}
