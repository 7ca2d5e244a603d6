//! Information measures on zero-mean jointly Gaussian complex vectors
//! described by covariance blocks.
//!
//! The circularly-symmetric complex convention is used throughout: a
//! `k`-dimensional vector with covariance `R` has differential entropy
//! `log2 det((pi e)^k R)`, so mutual information between index blocks reduces
//! to `log2 det R_A + log2 det R_B - log2 det R_AB` and the constant in the
//! KL divergence at `k = 2` is `-2`. All rates are in bits.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::numerics::HermitianMatrix;

/// A rate or information value in bits, with an explicit infinity for
/// quantities that genuinely diverge (continuous-alphabet secrecy, singular
/// joints between nonsingular marginals). Infinity is kept out of the
/// intermediate floating-point algebra so it survives serialization intact.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Bits {
    Finite(f64),
    Infinite,
}

impl Bits {
    pub fn finite(self) -> Option<f64> {
        match self {
            Bits::Finite(v) => Some(v),
            Bits::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Bits::Infinite)
    }

    pub fn min(self, other: Bits) -> Bits {
        match (self, other) {
            (Bits::Finite(a), Bits::Finite(b)) => Bits::Finite(a.min(b)),
            (Bits::Finite(a), Bits::Infinite) | (Bits::Infinite, Bits::Finite(a)) => {
                Bits::Finite(a)
            }
            (Bits::Infinite, Bits::Infinite) => Bits::Infinite,
        }
    }
}

impl PartialOrd for Bits {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Bits::Finite(a), Bits::Finite(b)) => a.partial_cmp(b),
            (Bits::Infinite, Bits::Infinite) => Some(Ordering::Equal),
            (Bits::Infinite, Bits::Finite(_)) => Some(Ordering::Greater),
            (Bits::Finite(_), Bits::Infinite) => Some(Ordering::Less),
        }
    }
}

impl std::fmt::Display for Bits {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Bits::Finite(v) => write!(f, "{v}"),
            Bits::Infinite => write!(f, "inf"),
        }
    }
}

/// A zero-mean jointly Gaussian vector partitioned into named blocks.
#[derive(Clone, Debug)]
pub struct JointGaussian {
    pub cov: HermitianMatrix,
    pub block_sizes: Vec<usize>,
}

impl JointGaussian {
    pub fn new(cov: HermitianMatrix, block_sizes: Vec<usize>) -> Result<Self> {
        let total: usize = block_sizes.iter().sum();
        if total != cov.dim() {
            return Err(Error::InvalidParam(format!(
                "block sizes sum to {total} but the covariance has dimension {}",
                cov.dim()
            )));
        }
        if block_sizes.iter().any(|&s| s == 0) {
            return Err(Error::InvalidParam("empty block".into()));
        }
        Ok(Self { cov, block_sizes })
    }

    /// Index set of block `b`.
    pub fn block(&self, b: usize) -> Vec<usize> {
        let start: usize = self.block_sizes[..b].iter().sum();
        (start..start + self.block_sizes[b]).collect()
    }

    /// `I(block a; block b)` by block number.
    pub fn mutual_information(&self, a: usize, b: usize) -> Result<Bits> {
        mutual_information(&self.cov, &self.block(a), &self.block(b))
    }

    /// `I(block a; block b | block c)` by block number.
    pub fn conditional_mi(&self, a: usize, b: usize, c: usize) -> Result<Bits> {
        conditional_mi(&self.cov, &self.block(a), &self.block(b), &self.block(c))
    }
}

fn check_disjoint(sets: &[&[usize]], dim: usize) -> Result<()> {
    let mut seen = vec![false; dim];
    for set in sets {
        for &i in *set {
            if i >= dim {
                return Err(Error::InvalidParam(format!(
                    "index {i} out of range for dimension {dim}"
                )));
            }
            if seen[i] {
                return Err(Error::InvalidParam(format!(
                    "index {i} appears in more than one block"
                )));
            }
            seen[i] = true;
        }
    }
    Ok(())
}

/// Log-determinant classified by invertibility: `None` means the block is
/// numerically singular.
fn logdet_or_singular(cov: &HermitianMatrix, idx: &[usize], role: &str) -> Option<f64> {
    let eig = cov.submatrix(idx).eigen(role);
    eig.logdet().ok()
}

/// Mutual information `I(A; B)` in bits between two disjoint index blocks of
/// a zero-mean joint Gaussian.
///
/// Returns [`Bits::Infinite`] when the joint block covariance is singular
/// while both marginals are invertible (a deterministic linear relation
/// across the blocks); errors when a marginal itself is singular, since the
/// quantity is then ill-posed at this representation.
pub fn mutual_information(cov: &HermitianMatrix, a: &[usize], b: &[usize]) -> Result<Bits> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidParam("empty index block".into()));
    }
    check_disjoint(&[a, b], cov.dim())?;
    // Index sets are canonicalized so I(A; B) and I(B; A) factor the exact
    // same submatrices and agree bit for bit.
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_unstable();
    b.sort_unstable();
    let ld_a = logdet_or_singular(cov, &a, "block A");
    let ld_b = logdet_or_singular(cov, &b, "block B");
    let mut joint: Vec<usize> = a.iter().chain(b.iter()).copied().collect();
    joint.sort_unstable();
    let ld_ab = logdet_or_singular(cov, &joint, "joint block");
    match (ld_a, ld_b, ld_ab) {
        (Some(la), Some(lb), Some(lab)) => {
            let bits = (la + lb - lab) / std::f64::consts::LN_2;
            if bits < -1e-9 {
                return Err(Error::IllPosed(format!(
                    "mutual information came out {bits} bits"
                )));
            }
            Ok(Bits::Finite(bits.max(0.0)))
        }
        (Some(_), Some(_), None) => Ok(Bits::Infinite),
        (la, lb, _) => {
            let bad = match (la, lb) {
                (None, None) => "both marginal blocks",
                (None, _) => "the first marginal block",
                _ => "the second marginal block",
            };
            Err(Error::IllPosed(format!(
                "{bad} and the joint covariance are singular (indices {a:?} / {b:?})"
            )))
        }
    }
}

/// Conditional mutual information `I(A; B | C)` via the chain rule
/// `I(A; B, C) - I(A; C)`. Small negative differences (floating noise) are
/// clamped to zero; an infinite-minus-infinite difference is rejected.
pub fn conditional_mi(
    cov: &HermitianMatrix,
    a: &[usize],
    b: &[usize],
    c: &[usize],
) -> Result<Bits> {
    check_disjoint(&[a, b, c], cov.dim())?;
    if c.is_empty() {
        return mutual_information(cov, a, b);
    }
    let bc: Vec<usize> = b.iter().chain(c.iter()).copied().collect();
    let i_abc = mutual_information(cov, a, &bc)?;
    let i_ac = mutual_information(cov, a, c)?;
    match (i_abc, i_ac) {
        (Bits::Finite(x), Bits::Finite(y)) => {
            let d = x - y;
            if d < -1e-9 {
                Err(Error::IllPosed(format!(
                    "conditional mutual information came out {d} bits"
                )))
            } else {
                Ok(Bits::Finite(d.max(0.0)))
            }
        }
        (Bits::Infinite, Bits::Finite(_)) => Ok(Bits::Infinite),
        (_, Bits::Infinite) => Err(Error::IllPosed(
            "conditioning information is itself infinite".into(),
        )),
    }
}

/// KL divergence `D(p || q)` in bits between zero-mean circularly-symmetric
/// complex Gaussians with covariances `p_cov` and `q_cov`:
/// `[tr(q^-1 p) - k - ln det(p q^-1)] / ln 2`.
pub fn kl_zero_mean_gaussians(p_cov: &HermitianMatrix, q_cov: &HermitianMatrix) -> Result<f64> {
    let k = p_cov.dim();
    if q_cov.dim() != k {
        return Err(Error::InvalidParam(format!(
            "KL dimensions differ: {k} vs {}",
            q_cov.dim()
        )));
    }
    let q_eig = q_cov.eigen("q_cov");
    let q_inv = q_eig.inverse()?;
    let ld_q = q_eig.logdet()?;
    let ld_p = p_cov.eigen("p_cov").logdet()?;
    let prod = q_inv.as_dmatrix() * p_cov.as_dmatrix();
    let trace: f64 = (0..k).map(|i| prod[(i, i)].re).sum();
    let nats = trace - k as f64 - (ld_p - ld_q);
    if nats < -1e-9 {
        return Err(Error::IllPosed(format!(
            "KL divergence came out {nats} nats"
        )));
    }
    Ok(nats.max(0.0) / std::f64::consts::LN_2)
}
