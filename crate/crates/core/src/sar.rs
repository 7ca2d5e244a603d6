//! Secure authentication rates of the three schemes at verification frame
//! `2t + 1`, with Eve holding the `2t` observations `z(2t)`.
//!
//! * S-CBCA: secret-key-capacity bounds
//!   `I(x(1); y(2)) - min(I(x(1); z), I(y(2); z)) <= R <= min(I(x(1); y(2)),
//!   I(x(1); y(2) | z))`, the lower bound clamped at zero.
//! * A-CBCA: infinite for continuous key extraction; for a uniform
//!   quantizer the rate is the doubled quantized conditional entropy
//!   `2 H(<Re y(2)> | Re zhat)` evaluated by nested Gauss-Hermite
//!   quadrature, plus a data-processing lower bound
//!   `max(0, 2 H(<Re y(2)>) - I(y(2); z))`.
//! * PLA: the KL divergence between the legitimate joint of
//!   `(x(2t+1), x(1))` and the joint induced by an attacker that draws the
//!   verification estimate from the legitimate conditional given her own
//!   observations, computed by partitioning the joint precision matrices,
//!   with the conditional-mutual-information upper bound
//!   `I(x(1); x(2t+1) | z)`.
//!
//! Attack transforms replace `z` by Eve's scalar estimate (exact for the
//! time-invariant channels attacks are defined on); the `*_with_eve`
//! variants accept that scalar description.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::channel::{build_covariances, CovarianceBundle, ScenarioParams};
use crate::error::{Error, Result};
use crate::gaussian::{conditional_mi, mutual_information, Bits};
use crate::lep::{lep_combine, lep_pick_for_scbca, LepEstimate};
use crate::numerics::{gauss_hermite, q_function, q_inverse, HermitianMatrix, QuadratureSpec};

/// Uniform scalar quantizer with `2^bits` levels saturating at `±v_sat`.
/// Interior thresholds sit at `-v_sat + i delta`; the edge cells extend to
/// infinity so every input lands somewhere.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantizerSpec {
    pub bits: u32,
    pub v_sat: f64,
    pub delta: f64,
    interior: Vec<f64>,
}

impl QuantizerSpec {
    pub fn new(bits: u32, v_sat: f64) -> Result<Self> {
        if !(v_sat > 0.0 && v_sat.is_finite()) {
            return Err(Error::InvalidParam(format!(
                "v_sat must be positive and finite, got {v_sat}"
            )));
        }
        if bits > 20 {
            return Err(Error::InvalidParam(format!(
                "quantizers beyond 20 bits are not supported, got {bits}"
            )));
        }
        let levels = 1usize << bits;
        let delta = 2.0 * v_sat / levels as f64;
        let interior = (1..levels).map(|i| -v_sat + i as f64 * delta).collect();
        Ok(Self {
            bits,
            v_sat,
            delta,
            interior,
        })
    }

    pub fn levels(&self) -> usize {
        1usize << self.bits
    }

    pub fn interior_thresholds(&self) -> &[f64] {
        &self.interior
    }

    /// Cell `i` spans `(lower, upper]` with unbounded edge cells.
    pub fn cell_bounds(&self, i: usize) -> (f64, f64) {
        let lo = if i == 0 {
            f64::NEG_INFINITY
        } else {
            self.interior[i - 1]
        };
        let hi = if i + 1 == self.levels() {
            f64::INFINITY
        } else {
            self.interior[i]
        };
        (lo, hi)
    }

    /// Index of the cell containing `x`.
    pub fn cell_of(&self, x: f64) -> usize {
        self.interior.iter().take_while(|&&th| x > th).count()
    }

    /// Probability mass of every cell under `N(mean, sd^2)`. Cells whose
    /// nearest edge lies beyond `tail_bound` standard deviations from the
    /// mean are truncated to zero; `sd = 0` degenerates to an indicator.
    pub fn gaussian_cell_masses(&self, mean: f64, sd: f64, tail_bound: f64) -> Vec<f64> {
        let m = self.levels();
        let mut out = vec![0.0; m];
        if sd == 0.0 {
            out[self.cell_of(mean)] = 1.0;
            return out;
        }
        for (i, slot) in out.iter_mut().enumerate() {
            let (lo, hi) = self.cell_bounds(i);
            if lo > mean + tail_bound * sd || hi < mean - tail_bound * sd {
                continue;
            }
            let q_lo = if lo == f64::NEG_INFINITY {
                1.0
            } else {
                q_function((lo - mean) / sd).unwrap_or(0.0)
            };
            let q_hi = if hi == f64::INFINITY {
                0.0
            } else {
                q_function((hi - mean) / sd).unwrap_or(0.0)
            };
            *slot = (q_lo - q_hi).max(0.0);
        }
        out
    }
}

/// Scheme identifiers, stable across the registry, the CLI and the CSV
/// output.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    Scbca,
    Acbca,
    AcbcaLower,
    AcbcaContinuous,
    Pla,
    PlaUpper,
}

impl SchemeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SchemeKind::Scbca => "scbca",
            SchemeKind::Acbca => "acbca",
            SchemeKind::AcbcaLower => "acbca_lower",
            SchemeKind::AcbcaContinuous => "acbca_continuous",
            SchemeKind::Pla => "pla",
            SchemeKind::PlaUpper => "pla_upper",
        }
    }
}

/// A secure-authentication-rate value at a verification frame, in bits per
/// channel use: a point value (possibly the infinity sentinel) or a
/// lower/upper pair for the bounded scheme.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SarResult {
    pub scheme: SchemeKind,
    /// Verification frame index `2t + 1`.
    pub frame: usize,
    pub value: SarValue,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SarValue {
    Point(Bits),
    Bounds { lower: f64, upper: f64 },
}

impl SarValue {
    pub fn point(self) -> Option<Bits> {
        match self {
            SarValue::Point(b) => Some(b),
            SarValue::Bounds { .. } => None,
        }
    }

    pub fn bounds(self) -> Option<(f64, f64)> {
        match self {
            SarValue::Bounds { lower, upper } => Some((lower, upper)),
            SarValue::Point(_) => None,
        }
    }
}

/// How Eve's side information enters the S-CBCA bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EveMode {
    /// The full observation stack `z(2t)`.
    FullZ,
    /// The scalar combiner output picked to hurt the secret-key bound most.
    Lep,
}

/// Second-order description of a scalar Eve observation
/// `zhat = h(k) + residual`: its residual power and exact correlations with
/// the legitimate estimates.
#[derive(Clone, Copy, Debug)]
pub struct ScalarEve {
    pub sigma_z2: f64,
    pub corr_to_x1: Complex64,
    pub corr_to_y2: Complex64,
    pub corr_to_x2t1: Complex64,
}

impl ScalarEve {
    pub fn from_lep(lep: &LepEstimate) -> Self {
        Self {
            sigma_z2: lep.sigma_z2,
            corr_to_x1: lep.corr_to_x1,
            corr_to_y2: lep.corr_to_y2,
            corr_to_x2t1: lep.corr_to_x2t1,
        }
    }

    /// Residual power scaled by an attack adjustment.
    pub fn with_sigma_divided_by(mut self, divisor: f64) -> Self {
        self.sigma_z2 /= divisor;
        self
    }

    pub fn variance(&self) -> f64 {
        1.0 + self.sigma_z2
    }
}

fn frame_of(t: usize) -> usize {
    2 * t + 1
}

// === S-CBCA =================================================================

/// Secret-key-capacity bounds on the S-CBCA rate at frame `2t + 1`.
pub fn scbca_sar_bounds(params: &ScenarioParams, t: usize, eve: EveMode) -> Result<SarResult> {
    match eve {
        EveMode::FullZ => {
            let bundle = build_covariances(params, t)?;
            let joint = bundle.joint_x1_y2_z();
            let z: Vec<usize> = (2..2 + bundle.z_dim()).collect();
            scbca_from_joint(&joint, &z, t)
        }
        EveMode::Lep => {
            let lep = lep_pick_for_scbca(params, t)?;
            scbca_sar_bounds_with_eve(params, t, &ScalarEve::from_lep(&lep))
        }
    }
}

/// S-CBCA bounds with Eve reduced to a scalar estimate (used for the
/// explicit LEP mode and for attack-transformed scenarios).
pub fn scbca_sar_bounds_with_eve(
    params: &ScenarioParams,
    t: usize,
    eve: &ScalarEve,
) -> Result<SarResult> {
    let joint = scalar_joint_x1_y2(params, eve)?;
    scbca_from_joint(&joint, &[2], t)
}

fn scbca_from_joint(joint: &HermitianMatrix, z: &[usize], t: usize) -> Result<SarResult> {
    let i_xy = match mutual_information(joint, &[0], &[1])? {
        Bits::Finite(v) => v,
        Bits::Infinite => {
            return Err(Error::IllPosed(
                "legitimate estimates are deterministically linked".into(),
            ))
        }
    };
    let i_xz = mutual_information(joint, &[0], z)?;
    let i_yz = mutual_information(joint, &[1], z)?;
    let i_cond = conditional_mi(joint, &[0], &[1], z)?;
    let leak = i_xz.min(i_yz);
    let lower = match leak {
        Bits::Finite(v) => (i_xy - v).max(0.0),
        Bits::Infinite => 0.0,
    };
    let upper = match i_cond {
        Bits::Finite(v) => i_xy.min(v),
        Bits::Infinite => i_xy,
    };
    Ok(SarResult {
        scheme: SchemeKind::Scbca,
        frame: frame_of(t),
        value: SarValue::Bounds {
            lower: lower.min(upper),
            upper,
        },
    })
}

/// Joint covariance of `[x(1), y(2), zhat]`.
fn scalar_joint_x1_y2(params: &ScenarioParams, eve: &ScalarEve) -> Result<HermitianMatrix> {
    params.validate()?;
    let rho_xy = params.rho(1)?;
    let (var_x, var_y) = (1.0 + params.sigma_x2, 1.0 + params.sigma_y2);
    Ok(HermitianMatrix::from_fn(3, |i, j| match (i, j) {
        (0, 0) => Complex64::new(var_x, 0.0),
        (1, 1) => Complex64::new(var_y, 0.0),
        (2, 2) => Complex64::new(eve.variance(), 0.0),
        (0, 1) => Complex64::new(rho_xy, 0.0),
        (0, 2) => eve.corr_to_x1.conj(),
        (1, 2) => eve.corr_to_y2.conj(),
        _ => unreachable!(),
    }))
}

// === A-CBCA =================================================================

/// Continuous key extraction: the rate diverges, represented by the explicit
/// infinity sentinel.
pub fn acbca_sar_continuous(t: usize) -> SarResult {
    SarResult {
        scheme: SchemeKind::AcbcaContinuous,
        frame: frame_of(t),
        value: SarValue::Point(Bits::Infinite),
    }
}

/// Saturation level such that each real component of `y(2)` saturates with
/// probability `p_sat`: `v_sat = Q^{-1}(p_sat / 2) sqrt((1 + sigma_y^2) / 2)`.
pub fn choose_vsat(params: &ScenarioParams, p_sat: f64) -> Result<f64> {
    params.validate()?;
    if !(p_sat > 0.0 && p_sat < 1.0) {
        return Err(Error::InvalidParam(format!(
            "p_sat must lie in (0, 1), got {p_sat}"
        )));
    }
    Ok(q_inverse(p_sat / 2.0)? * ((1.0 + params.sigma_y2) / 2.0).sqrt())
}

/// Quantized A-CBCA rate `2 H(<Re y(2)> | Re zhat(2t))` via nested
/// Gauss-Hermite quadrature, with Eve's scalar estimate targeting frame 2.
///
/// Only defined for time-invariant channels. The result is validated by an
/// order-doubling check and reported at the doubled order.
pub fn acbca_sar_quantized(
    params: &ScenarioParams,
    t: usize,
    quant: &QuantizerSpec,
    quad: &QuadratureSpec,
) -> Result<SarResult> {
    params.validate()?;
    if !params.is_time_invariant() {
        return Err(Error::UnsupportedModel(
            "the quantized rate integral assumes a time-invariant channel".into(),
        ));
    }
    let sigma_z2 = if params.alpha_a == 0.0 && params.alpha_b == 0.0 {
        // Eve observes nothing correlated: conditioning is vacuous.
        None
    } else {
        Some(lep_combine(params, t, 2)?.sigma_z2)
    };
    let rate = quantized_rate(params.sigma_y2, sigma_z2, quant, quad)?;
    Ok(SarResult {
        scheme: SchemeKind::Acbca,
        frame: frame_of(t),
        value: SarValue::Point(Bits::Finite(rate)),
    })
}

/// Quantized A-CBCA rate with an externally supplied residual power for
/// Eve's scalar estimate (attack-transformed scenarios).
pub fn acbca_sar_quantized_with_sigma(
    params: &ScenarioParams,
    t: usize,
    sigma_z2: f64,
    quant: &QuantizerSpec,
    quad: &QuadratureSpec,
) -> Result<SarResult> {
    params.validate()?;
    let rate = quantized_rate(params.sigma_y2, Some(sigma_z2), quant, quad)?;
    Ok(SarResult {
        scheme: SchemeKind::Acbca,
        frame: frame_of(t),
        value: SarValue::Point(Bits::Finite(rate)),
    })
}

fn quantized_rate(
    sigma_y2: f64,
    sigma_z2: Option<f64>,
    quant: &QuantizerSpec,
    quad: &QuadratureSpec,
) -> Result<f64> {
    if quant.levels() == 1 {
        return Ok(0.0);
    }
    let h1 = quantized_cond_entropy(sigma_y2, sigma_z2, quant, quad)?;
    let doubled = quad.with_order(2 * quad.hermite_order);
    let h2 = quantized_cond_entropy(sigma_y2, sigma_z2, quant, &doubled)?;
    if (h2 - h1).abs() > quad.rel_tol * h2.abs().max(1.0) {
        return Err(Error::QuadratureNonConvergence(format!(
            "order {} -> {} moved the entropy from {h1} to {h2}",
            quad.hermite_order, doubled.hermite_order
        )));
    }
    Ok((2.0 * h2).max(0.0))
}

/// Per-component quantized conditional entropy `H(<Re y(2)> | Re zhat)` in
/// bits. `sigma_z2 = None` means Eve is independent (unconditional entropy).
fn quantized_cond_entropy(
    sigma_y2: f64,
    sigma_z2: Option<f64>,
    quant: &QuantizerSpec,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let tail = quad.tail_bound;
    let entropy_of = |masses: &[f64]| -> f64 {
        -masses
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| p * p.log2())
            .sum::<f64>()
    };
    let sigma_z2 = match sigma_z2 {
        None => {
            // Unconditional: <Re y(2)> with Re y ~ N(0, (1 + sigma_y^2)/2).
            let sd = ((1.0 + sigma_y2) / 2.0).sqrt();
            return Ok(entropy_of(&quant.gaussian_cell_masses(0.0, sd, tail)));
        }
        Some(s) => s,
    };

    let y_sd = (sigma_y2 / 2.0).sqrt();
    if sigma_z2 == 0.0 {
        // Eve observes Re h exactly: average the conditional entropy over
        // the channel prior.
        if y_sd == 0.0 {
            return Ok(0.0);
        }
        return gauss_hermite(
            |h| entropy_of(&quant.gaussian_cell_masses(h, y_sd, tail)),
            0.0,
            0.5,
            quad,
        );
    }

    // Outer integral over b = Re zhat ~ N(0, (1 + sigma_z^2)/2); inner
    // integral over the channel posterior Re h | b, then the interval masses
    // of Re y given the channel. The inner quadrature runs once per outer
    // node and accumulates all cell masses in the same pass.
    let var_b = (1.0 + sigma_z2) / 2.0;
    let post_var = sigma_z2 / (2.0 * (1.0 + sigma_z2));
    let m = quant.levels();
    let inner_scale = (2.0 * post_var).sqrt();
    let nodes = gh_nodes_normalized(quad.hermite_order);
    let inner = |b: f64| -> f64 {
        let mu = b / (1.0 + sigma_z2);
        let mut masses = vec![0.0_f64; m];
        for &(x, w) in nodes.iter() {
            let h = mu + inner_scale * x;
            for (mi, val) in quant
                .gaussian_cell_masses(h, y_sd, tail)
                .into_iter()
                .enumerate()
            {
                masses[mi] += w * val;
            }
        }
        entropy_of(&masses)
    };
    gauss_hermite(inner, 0.0, var_b, quad)
}

/// Gauss-Hermite nodes with weights normalized to sum to one, for
/// vector-valued inner integrands.
fn gh_nodes_normalized(order: usize) -> Vec<(f64, f64)> {
    let mut nodes = Vec::with_capacity(order);
    crate::numerics::for_each_gh_node(order, |x, w| nodes.push((x, w)));
    nodes
}

/// Mutual information between one scalar and the observation stack `z`,
/// with `za = E[z a^*]`: `-log2(1 - za^H R_z^{-1} za / var_a)`. The stack is
/// projected onto its support first, so degenerate stacks (perfectly
/// informed Eve) stay well-defined; a fully explained scalar comes out
/// infinite.
fn mi_scalar_vs_stack(var_a: f64, za: &DVector<Complex64>, rz: &HermitianMatrix) -> Result<Bits> {
    let eig = rz.eigen("eve observation covariance");
    let (rz_r, za_r) = if eig.rank() == rz.dim() {
        (rz.clone(), za.clone())
    } else {
        let basis = eig.range_basis();
        let m = basis.adjoint() * rz.as_dmatrix() * &basis;
        (
            HermitianMatrix::from_fn(m.nrows(), |i, j| m[(i, j)]),
            basis.adjoint() * za,
        )
    };
    let u = rz_r.eigen("eve observation covariance").solve(&za_r)?;
    let explained: f64 = za_r
        .iter()
        .zip(u.iter())
        .map(|(a, b)| (a.conj() * b).re)
        .sum();
    let remainder = 1.0 - explained / var_a;
    if remainder <= 1e-12 {
        Ok(Bits::Infinite)
    } else {
        Ok(Bits::Finite(-remainder.log2()))
    }
}

/// Data-processing lower bound on the quantized A-CBCA rate:
/// `max(0, 2 H(<Re y(2)>) - I(y(2); z(2t)))`.
pub fn acbca_sar_lower_bound(
    params: &ScenarioParams,
    t: usize,
    quant: &QuantizerSpec,
) -> Result<SarResult> {
    let bundle = build_covariances(params, t)?;
    let zy2 = DVector::from_fn(bundle.z_dim(), |i, _| bundle.ry2[i].conj());
    let i_yz = mi_scalar_vs_stack(bundle.var_y, &zy2, &bundle.rz)?;
    acbca_lower_from_mi(params, t, quant, i_yz)
}

/// Same bound with Eve reduced to a scalar estimate.
pub fn acbca_sar_lower_bound_with_eve(
    params: &ScenarioParams,
    t: usize,
    quant: &QuantizerSpec,
    eve: &ScalarEve,
) -> Result<SarResult> {
    let joint = scalar_joint_x1_y2(params, eve)?;
    let i_yz = mutual_information(&joint, &[1], &[2])?;
    acbca_lower_from_mi(params, t, quant, i_yz)
}

fn acbca_lower_from_mi(
    params: &ScenarioParams,
    t: usize,
    quant: &QuantizerSpec,
    i_yz: Bits,
) -> Result<SarResult> {
    let sd = ((1.0 + params.sigma_y2) / 2.0).sqrt();
    let masses = quant.gaussian_cell_masses(0.0, sd, 8.0);
    let h_u = -masses
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.log2())
        .sum::<f64>();
    let value = match i_yz {
        Bits::Finite(v) => (2.0 * h_u - v).max(0.0),
        Bits::Infinite => 0.0,
    };
    Ok(SarResult {
        scheme: SchemeKind::AcbcaLower,
        frame: frame_of(t),
        value: SarValue::Point(Bits::Finite(value)),
    })
}

// === PLA ====================================================================

/// Eve's observation stack as the PLA algebra sees it: covariance plus the
/// cross-correlations `E[z x(1)^*]` and `E[z x(2t+1)^*]`. Degenerate stacks
/// are projected onto their support first, which is exact for conditioning.
struct EveSystem {
    rz: HermitianMatrix,
    zx1: DVector<Complex64>,
    zx2t1: DVector<Complex64>,
}

impl EveSystem {
    fn from_bundle(bundle: &CovarianceBundle) -> Self {
        let n = bundle.z_dim();
        let zx1 = DVector::from_fn(n, |i, _| bundle.rx1[i].conj());
        let zx2t1 = DVector::from_fn(n, |i, _| bundle.rx2t1[i].conj());
        let sys = EveSystem {
            rz: bundle.rz.clone(),
            zx1,
            zx2t1,
        };
        sys.reduced()
    }

    fn from_scalar(eve: &ScalarEve) -> Self {
        EveSystem {
            rz: HermitianMatrix::from_diagonal(&[eve.variance()]),
            zx1: DVector::from_vec(vec![eve.corr_to_x1]),
            zx2t1: DVector::from_vec(vec![eve.corr_to_x2t1]),
        }
    }

    /// Projects a rank-deficient stack onto the eigen-directions that carry
    /// signal; conditioning on the projection equals conditioning on the
    /// original almost surely.
    fn reduced(self) -> Self {
        let eig = self.rz.eigen("eve observation covariance");
        if eig.rank() == self.rz.dim() {
            return self;
        }
        let basis = eig.range_basis();
        let rz = {
            let m = basis.adjoint() * self.rz.as_dmatrix() * &basis;
            HermitianMatrix::from_fn(m.nrows(), |i, j| m[(i, j)])
        };
        EveSystem {
            zx1: basis.adjoint() * &self.zx1,
            zx2t1: basis.adjoint() * &self.zx2t1,
            rz,
        }
    }
}

/// PLA rate from the partitioned precision matrices of `(x(1), z)` and
/// `(x(2t+1), z)`: the attack joint's precision is assembled from the
/// Schur-complement blocks, and the rate is the Gaussian KL divergence of
/// the legitimate joint against it.
fn pla_rate(var_x: f64, rho_xx: Complex64, sys: &EveSystem) -> Result<f64> {
    let eig = sys.rz.eigen("eve observation covariance");
    let u = eig.solve(&sys.zx1)?;
    let w = eig.solve(&sys.zx2t1)?;
    let explained = |v: &DVector<Complex64>, sol: &DVector<Complex64>| -> f64 {
        v.iter()
            .zip(sol.iter())
            .map(|(a, b)| (a.conj() * b).re)
            .sum()
    };
    let s1 = var_x - explained(&sys.zx1, &u);
    let s2 = var_x - explained(&sys.zx2t1, &w);
    if !(s1 > 1e-12 * var_x) {
        return Err(Error::SingularMatrix {
            role: "reference conditional (x(1) given z)".into(),
        });
    }
    if !(s2 > 1e-12 * var_x) {
        return Err(Error::SingularMatrix {
            role: "verification conditional (x(2t+1) given z)".into(),
        });
    }
    let dim = sys.rz.dim();
    let w_inv = eig.inverse()?;
    let e_mat = HermitianMatrix::from_fn(dim, |i, j| {
        w_inv.get(i, j) + u[i] * u[j].conj() / s1 + w[i] * w[j].conj() / s2
    });
    let e_eig = e_mat.eigen("attack precision core (E)");
    let eu = e_eig.solve(&u)?;
    let ew = e_eig.solve(&w)?;
    let quad = |a: &DVector<Complex64>, b: &DVector<Complex64>| -> Complex64 {
        a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
    };
    // Precision matrix of the attack joint (x(2t+1), x(1)).
    let b11 = 1.0 / s2 - quad(&w, &ew).re / (s2 * s2);
    let b22 = 1.0 / s1 - quad(&u, &eu).re / (s1 * s1);
    let b12 = -quad(&w, &eu) / (s1 * s2);
    let det_bracket = b11 * b22 - b12.norm_sqr();
    if !(det_bracket > 0.0) || b11 <= 0.0 {
        return Err(Error::SingularMatrix {
            role: "attack joint (V)".into(),
        });
    }
    let det_r0 = var_x * var_x - rho_xx.norm_sqr();
    if !(det_r0 > 1e-12 * var_x * var_x) {
        return Err(Error::SingularMatrix {
            role: "legitimate joint (x(2t+1), x(1))".into(),
        });
    }
    // KL(R0 || bracket^{-1}) = tr(bracket R0) - 2 - ln det(R0 bracket).
    let trace = var_x * (b11 + b22) + 2.0 * (b12 * rho_xx.conj()).re;
    let nats = trace - 2.0 - (det_r0 * det_bracket).ln();
    if nats < -1e-9 {
        return Err(Error::IllPosed(format!("PLA rate came out {nats} nats")));
    }
    Ok(nats.max(0.0) / std::f64::consts::LN_2)
}

/// PLA rate at frame `2t + 1` against an attacker using the full
/// observation stack.
pub fn pla_sar(params: &ScenarioParams, t: usize) -> Result<SarResult> {
    let bundle = build_covariances(params, t)?;
    let sys = EveSystem::from_bundle(&bundle);
    let rate = pla_rate(bundle.var_x, bundle.rho_xx, &sys)?;
    Ok(SarResult {
        scheme: SchemeKind::Pla,
        frame: frame_of(t),
        value: SarValue::Point(Bits::Finite(rate)),
    })
}

/// PLA rate with Eve reduced to a scalar estimate.
pub fn pla_sar_with_eve(params: &ScenarioParams, t: usize, eve: &ScalarEve) -> Result<SarResult> {
    params.validate()?;
    let rho_xx = Complex64::new(params.rho(2 * t as i64)?, 0.0);
    let sys = EveSystem::from_scalar(eve);
    let rate = pla_rate(1.0 + params.sigma_x2, rho_xx, &sys)?;
    Ok(SarResult {
        scheme: SchemeKind::Pla,
        frame: frame_of(t),
        value: SarValue::Point(Bits::Finite(rate)),
    })
}

/// Upper bound `I(x(1); x(2t+1) | z(2t))` on the PLA rate.
pub fn pla_sar_upper(params: &ScenarioParams, t: usize) -> Result<SarResult> {
    let bundle = build_covariances(params, t)?;
    let joint = bundle.joint_x1_x2t1_z();
    let z: Vec<usize> = (2..2 + bundle.z_dim()).collect();
    let v = conditional_mi(&joint, &[0], &[1], &z)?;
    Ok(SarResult {
        scheme: SchemeKind::PlaUpper,
        frame: frame_of(t),
        value: SarValue::Point(v),
    })
}

/// Upper bound with Eve reduced to a scalar estimate.
pub fn pla_sar_upper_with_eve(
    params: &ScenarioParams,
    t: usize,
    eve: &ScalarEve,
) -> Result<SarResult> {
    params.validate()?;
    let rho_xx = params.rho(2 * t as i64)?;
    let var_x = 1.0 + params.sigma_x2;
    let joint = HermitianMatrix::from_fn(3, |i, j| match (i, j) {
        (0, 0) | (1, 1) => Complex64::new(var_x, 0.0),
        (2, 2) => Complex64::new(eve.variance(), 0.0),
        (0, 1) => Complex64::new(rho_xx, 0.0),
        (0, 2) => eve.corr_to_x1.conj(),
        (1, 2) => eve.corr_to_x2t1.conj(),
        _ => unreachable!(),
    });
    let v = conditional_mi(&joint, &[0], &[1], &[2])?;
    Ok(SarResult {
        scheme: SchemeKind::PlaUpper,
        frame: frame_of(t),
        value: SarValue::Point(v),
    })
}
