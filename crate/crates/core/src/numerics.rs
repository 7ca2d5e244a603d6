//! Special functions, Gauss-Hermite quadrature, and small dense Hermitian
//! linear algebra.
//!
//! All covariance matrices handled by this crate are Hermitian with dimension
//! of a few tens at most, so a dense eigendecomposition is the single
//! factorization used for positive-definiteness checks, log-determinants,
//! inverses and rank/range questions. Matrices that fail a required
//! factorization surface a [`Error::SingularMatrix`] naming the matrix role
//! rather than returning garbage: the physically interesting corner cases
//! (perfectly informed eavesdropper, noise-free estimates) produce genuinely
//! singular covariances.

use std::collections::HashMap;
use std::f64::consts::{PI, SQRT_2};
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Condition number above which a matrix is treated as singular.
pub const COND_LIMIT: f64 = 1e12;

/// Relative eigenvalue threshold below which a direction is treated as part
/// of the null space when computing ranks and range projections.
pub const RANK_TOL: f64 = 1e-12;

/// Gaussian tail probability `P(N(0,1) > x)`.
///
/// Computed through the complementary error function, which stays accurate
/// deep in the tail where the saturation-level selection needs it.
pub fn q_function(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::NonFinite { what: "q_function" });
    }
    Ok(0.5 * libm::erfc(x / SQRT_2))
}

/// Inverse of [`q_function`] on (0, 1).
///
/// Bisection on the monotone tail probability; the result satisfies
/// `q_function(q_inverse(p)) = p` to better than 1e-9 relative.
pub fn q_inverse(p: f64) -> Result<f64> {
    if !p.is_finite() || p <= 0.0 || p >= 1.0 {
        return Err(Error::InvalidParam(format!(
            "q_inverse requires p in (0, 1), got {p}"
        )));
    }
    let (mut lo, mut hi) = (-40.0_f64, 40.0_f64);
    // 200 halvings take the bracket width below 1e-58; q is strictly
    // decreasing so the midpoint test never stalls.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if q_function(mid)? > p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 * lo.abs().max(1.0) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Zero-order Bessel function of the first kind, `J0(x)`.
pub fn bessel_j0(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::NonFinite { what: "bessel_j0" });
    }
    Ok(libm::j0(x))
}

/// Controls for the Gauss-Hermite quadrature used by the quantized-rate
/// integrals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSpec {
    /// Gauss-Hermite node count.
    pub hermite_order: usize,
    /// Truncation of tail contributions, in standard deviations: quantizer
    /// cells lying entirely beyond this distance are assigned zero mass.
    pub tail_bound: f64,
    /// Relative tolerance for the order-doubling convergence check.
    pub rel_tol: f64,
}

impl QuadratureSpec {
    pub fn new(hermite_order: usize, tail_bound: f64, rel_tol: f64) -> Result<Self> {
        if hermite_order < 8 {
            return Err(Error::InvalidParam(format!(
                "hermite_order must be at least 8, got {hermite_order}"
            )));
        }
        if !(tail_bound > 0.0) {
            return Err(Error::InvalidParam(format!(
                "tail_bound must be positive, got {tail_bound}"
            )));
        }
        if !(rel_tol > 0.0 && rel_tol <= 1e-2) {
            return Err(Error::InvalidParam(format!(
                "rel_tol must lie in (0, 1e-2], got {rel_tol}"
            )));
        }
        Ok(Self {
            hermite_order,
            tail_bound,
            rel_tol,
        })
    }

    /// Same spec with a different node count (used by convergence checks).
    pub fn with_order(mut self, order: usize) -> Self {
        self.hermite_order = order;
        self
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            hermite_order: 64,
            tail_bound: 8.0,
            rel_tol: 1e-5,
        }
    }
}

struct GhRule {
    nodes: Vec<f64>,
    /// Physicists' weights; they sum to sqrt(pi).
    weights: Vec<f64>,
}

/// Hermite functions `phi_k(x) = p_k(x) exp(-x^2/2)` for the orthonormal
/// polynomials `p_k` of the weight `exp(-x^2)`, for `k = 0..=n`. Bounded for
/// all arguments, so the recurrence never overflows.
fn hermite_functions(n: usize, x: f64) -> Vec<f64> {
    let mut phi = Vec::with_capacity(n + 1);
    phi.push(PI.powf(-0.25) * (-0.5 * x * x).exp());
    if n >= 1 {
        phi.push(x * SQRT_2 * phi[0]);
    }
    for k in 1..n {
        let next = x * (2.0 / (k as f64 + 1.0)).sqrt() * phi[k]
            - ((k as f64) / (k as f64 + 1.0)).sqrt() * phi[k - 1];
        phi.push(next);
    }
    phi
}

/// Nodes and weights for the physicists' Gauss-Hermite rule. Initial nodes
/// come from the eigenvalues of the symmetric tridiagonal Jacobi matrix
/// (Golub-Welsch); each is polished by two Newton steps on the degree-`n`
/// orthonormal polynomial, and the weight is its Christoffel number
/// `1 / sum_k p_k(x)^2`, which keeps full relative precision even at the
/// extreme nodes. Rules are cached per order.
fn gh_rule(order: usize) -> Arc<GhRule> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GhRule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(rule) = cache.lock().unwrap().get(&order) {
        return rule.clone();
    }

    let mut jacobi = DMatrix::<f64>::zeros(order, order);
    for i in 0..order - 1 {
        let off = ((i + 1) as f64 / 2.0).sqrt();
        jacobi[(i, i + 1)] = off;
        jacobi[(i + 1, i)] = off;
    }
    let eig = jacobi.symmetric_eigen();
    let mut nodes: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    nodes.sort_by(f64::total_cmp);

    let mut weights = Vec::with_capacity(order);
    for x in nodes.iter_mut() {
        for _ in 0..2 {
            let phi = hermite_functions(order, *x);
            // p_n'(x) = sqrt(2n) p_{n-1}(x); the exp(-x^2/2) factors cancel
            // in the Newton step.
            let deriv = (2.0 * order as f64).sqrt() * phi[order - 1];
            if deriv != 0.0 {
                *x -= phi[order] / deriv;
            }
        }
        // sum_k p_k(x)^2 = exp(x^2) sum_k phi_k(x)^2, so the Christoffel
        // weight 1 / sum_k p_k(x)^2 is exp(-x^2) / sum_k phi_k(x)^2.
        let phi = hermite_functions(order - 1, *x);
        let sum_sq: f64 = phi.iter().map(|p| p * p).sum();
        weights.push((-*x * *x).exp() / sum_sq);
    }
    let rule = Arc::new(GhRule { nodes, weights });
    cache.lock().unwrap().insert(order, rule.clone());
    rule
}

/// Visits the Gauss-Hermite nodes of the given order with weights
/// normalized to sum to one (probabilists' view of the rule).
pub(crate) fn for_each_gh_node<F: FnMut(f64, f64)>(order: usize, mut f: F) {
    let rule = gh_rule(order);
    let inv_sqrt_pi = 1.0 / PI.sqrt();
    for (x, w) in rule.nodes.iter().zip(rule.weights.iter()) {
        f(*x, w * inv_sqrt_pi);
    }
}

/// Expectation of `f` under a real Gaussian with the given mean and variance,
/// by Gauss-Hermite quadrature at `spec.hermite_order` nodes.
pub fn gauss_hermite<F: Fn(f64) -> f64>(
    f: F,
    mean: f64,
    variance: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if !(variance > 0.0) {
        return Err(Error::InvalidParam(format!(
            "gauss_hermite requires variance > 0, got {variance}"
        )));
    }
    let rule = gh_rule(spec.hermite_order);
    let scale = (2.0 * variance).sqrt();
    let inv_sqrt_pi = 1.0 / PI.sqrt();
    let mut acc = 0.0;
    for (x, w) in rule.nodes.iter().zip(rule.weights.iter()) {
        acc += w * inv_sqrt_pi * f(mean + scale * x);
    }
    Ok(acc)
}

/// A dense Hermitian matrix, stored fully populated with the conjugate
/// symmetry enforced at construction time.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    m: DMatrix<Complex64>,
}

impl HermitianMatrix {
    /// Builds from a generator consulted on the upper triangle (`i <= j`);
    /// the lower triangle is mirrored conjugate and diagonal imaginary parts
    /// are dropped, so the invariant holds exactly.
    pub fn from_fn<F: Fn(usize, usize) -> Complex64>(dim: usize, f: F) -> Self {
        let mut m = DMatrix::<Complex64>::zeros(dim, dim);
        for i in 0..dim {
            for j in i..dim {
                let v = f(i, j);
                if i == j {
                    m[(i, j)] = Complex64::new(v.re, 0.0);
                } else {
                    m[(i, j)] = v;
                    m[(j, i)] = v.conj();
                }
            }
        }
        Self { m }
    }

    /// Builds from a real symmetric generator.
    pub fn from_real_fn<F: Fn(usize, usize) -> f64>(dim: usize, f: F) -> Self {
        Self::from_fn(dim, |i, j| Complex64::new(f(i, j), 0.0))
    }

    /// Validates an explicit row-major entry list for exact conjugate
    /// symmetry.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != dim {
                return Err(Error::InvalidParam(format!(
                    "row {i} has length {} in a {dim}-dimensional matrix",
                    r.len()
                )));
            }
        }
        for i in 0..dim {
            for j in 0..dim {
                if rows[i][j] != rows[j][i].conj() {
                    return Err(Error::InvalidParam(format!(
                        "entry ({i},{j}) is not the conjugate of ({j},{i})"
                    )));
                }
            }
        }
        Ok(Self::from_fn(dim, |i, j| rows[i][j]))
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            m: DMatrix::identity(dim, dim),
        }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        Self::from_real_fn(diag.len(), |i, j| if i == j { diag[i] } else { 0.0 })
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.m[(i, j)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    /// Principal submatrix on the given index set, in the given order.
    pub fn submatrix(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), |i, j| self.m[(idx[i], idx[j])])
    }

    /// Sum of diagonal entries (real for a Hermitian matrix).
    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.m[(i, i)].re).sum()
    }

    /// Frobenius distance to another matrix, for test tolerances.
    pub fn frobenius_distance(&self, other: &Self) -> f64 {
        (&self.m - &other.m).norm()
    }

    /// Eigendecomposition; `role` labels the matrix in any downstream error.
    pub fn eigen(&self, role: &str) -> HermitianEigen {
        let eig = self.m.clone().symmetric_eigen();
        let dim = self.dim();
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = DMatrix::from_fn(dim, dim, |r, c| eig.eigenvectors[(r, order[c])]);
        HermitianEigen {
            role: role.to_string(),
            values,
            vectors,
        }
    }
}

/// Eigendecomposition of a [`HermitianMatrix`], eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    role: String,
    values: Vec<f64>,
    vectors: DMatrix<Complex64>,
}

impl HermitianEigen {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.values
    }

    pub fn lambda_min(&self) -> f64 {
        self.values[0]
    }

    pub fn lambda_max(&self) -> f64 {
        *self.values.last().unwrap()
    }

    /// Positive semidefiniteness up to the numerical slack
    /// `lambda_min >= -1e-9 * lambda_max`.
    pub fn is_psd(&self) -> bool {
        self.lambda_min() >= -1e-9 * self.lambda_max().max(0.0)
    }

    /// True when the matrix cannot be inverted at working precision.
    pub fn is_singular(&self) -> bool {
        let max = self.lambda_max();
        self.lambda_min() <= 0.0 || max <= 0.0 || max / self.lambda_min() > COND_LIMIT
    }

    fn require_invertible(&self) -> Result<()> {
        if self.is_singular() {
            Err(Error::SingularMatrix {
                role: self.role.clone(),
            })
        } else {
            Ok(())
        }
    }

    /// Natural-log determinant; fails for singular input.
    pub fn logdet(&self) -> Result<f64> {
        self.require_invertible()?;
        Ok(self.values.iter().map(|l| l.ln()).sum())
    }

    /// Inverse, rebuilt as an exactly Hermitian matrix.
    pub fn inverse(&self) -> Result<HermitianMatrix> {
        self.require_invertible()?;
        let dim = self.dim();
        let inv = DMatrix::from_fn(dim, dim, |r, c| {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..dim {
                acc += self.vectors[(r, k)] * self.vectors[(c, k)].conj() / self.values[k];
            }
            acc
        });
        Ok(HermitianMatrix::from_fn(dim, |i, j| inv[(i, j)]))
    }

    /// Solves `A x = b` for invertible `A`.
    pub fn solve(&self, b: &DVector<Complex64>) -> Result<DVector<Complex64>> {
        self.require_invertible()?;
        let coeffs = self.vectors.adjoint() * b;
        let scaled = DVector::from_fn(self.dim(), |i, _| coeffs[i] / self.values[i]);
        Ok(&self.vectors * scaled)
    }

    /// Number of eigenvalues above `RANK_TOL` relative to the largest.
    pub fn rank(&self) -> usize {
        let max = self.lambda_max();
        if max <= 0.0 {
            return 0;
        }
        self.values.iter().filter(|&&l| l > RANK_TOL * max).count()
    }

    /// Orthonormal basis (as columns) of the numerically significant range.
    pub fn range_basis(&self) -> DMatrix<Complex64> {
        let max = self.lambda_max();
        let dim = self.dim();
        let keep: Vec<usize> = (0..dim)
            .filter(|&i| max > 0.0 && self.values[i] > RANK_TOL * max)
            .collect();
        DMatrix::from_fn(dim, keep.len(), |r, c| self.vectors[(r, keep[c])])
    }

    /// Positive-semidefinite square root `V sqrt(max(lambda, 0)) V^H`,
    /// clamping the tiny negative eigenvalues a PSD matrix picks up in
    /// floating point.
    pub fn psd_sqrt(&self) -> DMatrix<Complex64> {
        let dim = self.dim();
        DMatrix::from_fn(dim, dim, |r, c| {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..dim {
                let s = self.values[k].max(0.0).sqrt();
                acc += self.vectors[(r, k)] * self.vectors[(c, k)].conj() * s;
            }
            acc
        })
    }

    /// Orthogonal projection of `v` onto the numerical null space.
    pub fn null_projection(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        let max = self.lambda_max();
        let dim = self.dim();
        let mut out = DVector::from_element(dim, Complex64::new(0.0, 0.0));
        for k in 0..dim {
            if max <= 0.0 || self.values[k] <= RANK_TOL * max {
                let col = self.vectors.column(k);
                let coeff: Complex64 = col.iter().zip(v.iter()).map(|(u, x)| u.conj() * x).sum();
                for r in 0..dim {
                    out[r] += self.vectors[(r, k)] * coeff;
                }
            }
        }
        out
    }
}

/// Bundled determinant/inverse/trace of a positive-definite Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianOps {
    pub logdet: f64,
    pub inverse: HermitianMatrix,
    pub trace: f64,
}

/// Log-determinant, inverse and trace in one factorization. `role` names the
/// matrix in the singularity error.
pub fn hermitian_ops(m: &HermitianMatrix, role: &str) -> Result<HermitianOps> {
    let eig = m.eigen(role);
    Ok(HermitianOps {
        logdet: eig.logdet()?,
        inverse: eig.inverse()?,
        trace: m.trace(),
    })
}
