//! Seeded Monte-Carlo sampler and estimators that independently validate the
//! closed forms in the rest of the crate.
//!
//! # Random stream accounting
//!
//! Reproducibility across runs and shard layouts comes from a counter-based
//! generator: every latent process of the generative model owns a stream
//! keyed by `(seed, process kind, frame index)`, and sample `i` of a stream
//! reads the two 64-bit words at counters `2i` and `2i + 1`, whatever order
//! the samples are materialized in. Words come from the SplitMix64 output
//! permutation applied to `stream_key + counter * GOLDEN`, so any sample of
//! any column can be regenerated in isolation.
//!
//! A complex standard Gaussian consumes exactly two uniforms: with `u1, u2`
//! in (0, 1), the sample is `sqrt(-ln u1) * exp(2 pi i u2)`, which has unit
//! power split evenly across the real and imaginary parts.

use num_complex::Complex64;

use crate::channel::{CorrelationModel, QMode, ScenarioParams};
use crate::error::{Error, Result};
use crate::gaussian;
use crate::lep::LepEstimate;
use crate::numerics::HermitianMatrix;
use crate::sar::QuantizerSpec;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 output permutation, used as a counter-indexed PRF.
fn mix(mut x: u64) -> u64 {
    x ^= x >> 30;
    x = x.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x ^= x >> 27;
    x = x.wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^= x >> 31;
    x
}

/// Latent processes of the generative model, each with its own stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Stream {
    /// Channel innovation for frame `f`.
    H(usize),
    /// Alice-side auxiliary process at frame `f` (0 when constant).
    QA(usize),
    /// Bob-side auxiliary process at frame `f` (0 when constant).
    QB(usize),
    /// Bob's estimation noise at frame `f`.
    WX(usize),
    /// Alice's estimation noise at frame `f`.
    WY(usize),
    /// Eve's estimation noise, Alice side, frame `f`.
    WVA(usize),
    /// Eve's estimation noise, Bob side, frame `f`.
    WVB(usize),
    /// Extra stream for derived samplers (scalar Eve estimates, attacks).
    Aux(usize),
}

impl Stream {
    fn key(self, seed: u64) -> u64 {
        let (salt, frame) = match self {
            Stream::H(f) => (1, f),
            Stream::QA(f) => (2, f),
            Stream::QB(f) => (3, f),
            Stream::WX(f) => (4, f),
            Stream::WY(f) => (5, f),
            Stream::WVA(f) => (6, f),
            Stream::WVB(f) => (7, f),
            Stream::Aux(f) => (8, f),
        };
        mix(seed ^ mix((salt as u64) << 32 | frame as u64))
    }
}

/// Uniform in (0, 1), never exactly 0 or 1.
fn unit(word: u64) -> f64 {
    ((word >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Sample `i` of a stream: a zero-mean unit-power circularly-symmetric
/// complex Gaussian from the two words at counters `2i` and `2i + 1`.
fn standard_complex(key: u64, i: usize) -> Complex64 {
    let c = 2 * i as u64;
    let u1 = unit(mix(key.wrapping_add(c.wrapping_mul(GOLDEN))));
    let u2 = unit(mix(key.wrapping_add((c + 1).wrapping_mul(GOLDEN))));
    let r = (-u1.ln()).sqrt();
    let theta = 2.0 * std::f64::consts::PI * u2;
    Complex64::new(r * theta.cos(), r * theta.sin())
}

/// Addresses one observable column of a [`SampleSet`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SampleColumn {
    X1,
    Y2,
    X2t1,
    /// Entry `l` (0-based) of `z(2t)`.
    Z(usize),
}

/// Columns of generated samples for one scenario.
pub struct SampleSet {
    pub seed: u64,
    pub n_samples: usize,
    pub t: usize,
    pub x1: Vec<Complex64>,
    pub y2: Vec<Complex64>,
    pub x2t1: Vec<Complex64>,
    pub z: Vec<Vec<Complex64>>,
    /// Latent channel per frame 1..=2t+1.
    pub h: Vec<Vec<Complex64>>,
}

impl SampleSet {
    pub fn column(&self, c: SampleColumn) -> &[Complex64] {
        match c {
            SampleColumn::X1 => &self.x1,
            SampleColumn::Y2 => &self.y2,
            SampleColumn::X2t1 => &self.x2t1,
            SampleColumn::Z(l) => &self.z[l],
        }
    }

    /// Zero-mean sample covariance `E[a b^*]` with a ten-way batch standard
    /// error (standard deviation of batch means over sqrt(10)).
    pub fn cov_with_stderr(&self, a: SampleColumn, b: SampleColumn) -> (Complex64, f64) {
        let xa = self.column(a);
        let xb = self.column(b);
        let n = self.n_samples;
        let mut batch = [Complex64::new(0.0, 0.0); 10];
        for (i, (va, vb)) in xa.iter().zip(xb.iter()).enumerate() {
            batch[i * 10 / n.max(1)] += va * vb.conj();
        }
        let total: Complex64 = batch.iter().sum();
        let mean = total / n as f64;
        let mut var = 0.0;
        for (k, s) in batch.iter().enumerate() {
            let lo = k * n / 10;
            let hi = (k + 1) * n / 10;
            let bm = s / ((hi - lo).max(1) as f64);
            var += (bm - mean).norm_sqr();
        }
        let se = (var / 10.0).sqrt() / 10.0_f64.sqrt();
        (mean, se)
    }
}

/// Square root of the frame-correlation matrix for frames `1..=frames`,
/// through the eigendecomposition; fails if a table model produces an
/// indefinite Toeplitz matrix or runs out of lags.
fn correlation_sqrt(model: &CorrelationModel, frames: usize) -> Result<Vec<Vec<f64>>> {
    for lag in 0..frames as i64 {
        model.rho(lag)?;
    }
    let toeplitz =
        HermitianMatrix::from_real_fn(frames, |i, j| model.rho((i as i64) - (j as i64)).unwrap());
    let eig = toeplitz.eigen("frame-correlation");
    if !eig.is_psd() {
        return Err(Error::InvalidParam(
            "frame-correlation matrix is not positive semidefinite".into(),
        ));
    }
    let root = eig.psd_sqrt();
    Ok((0..frames)
        .map(|r| (0..frames).map(|c| root[(r, c)].re).collect())
        .collect())
}

/// Draws `n_samples` realizations of every observable and latent column of
/// the scenario at frame parameter `t`.
pub fn sample_scenario(
    params: &ScenarioParams,
    t: usize,
    n_samples: usize,
    seed: u64,
) -> Result<SampleSet> {
    params.validate()?;
    if t < 1 || n_samples < 1 {
        return Err(Error::InvalidParam(
            "sample_scenario needs t >= 1 and n_samples >= 1".into(),
        ));
    }
    let frames = 2 * t + 1;
    let time_invariant = params.is_time_invariant();

    // Channel process: a single draw for time-invariant channels, otherwise
    // frame innovations colored by the square root of the Toeplitz
    // correlation matrix.
    let root = if time_invariant {
        None
    } else {
        Some(correlation_sqrt(&params.correlation, frames)?)
    };

    let h_keys: Vec<u64> = (1..=frames).map(|f| Stream::H(f).key(seed)).collect();
    let qa_key_for = |frame: usize| {
        Stream::QA(if params.q_mode == QMode::Constant {
            0
        } else {
            frame
        })
        .key(seed)
    };
    let qb_key_for = |frame: usize| {
        Stream::QB(if params.q_mode == QMode::Constant {
            0
        } else {
            frame
        })
        .key(seed)
    };
    let wx1 = Stream::WX(1).key(seed);
    let wx_last = Stream::WX(frames).key(seed);
    let wy2 = Stream::WY(2).key(seed);
    let wva: Vec<u64> = (1..=2 * t).map(|f| Stream::WVA(f).key(seed)).collect();
    let wvb: Vec<u64> = (1..=2 * t).map(|f| Stream::WVB(f).key(seed)).collect();

    let mut set = SampleSet {
        seed,
        n_samples,
        t,
        x1: Vec::with_capacity(n_samples),
        y2: Vec::with_capacity(n_samples),
        x2t1: Vec::with_capacity(n_samples),
        z: vec![Vec::with_capacity(n_samples); 2 * t],
        h: vec![Vec::with_capacity(n_samples); frames],
    };

    let sx = params.sigma_x2.sqrt();
    let sy = params.sigma_y2.sqrt();
    let sva = params.sigma_va2.sqrt();
    let svb = params.sigma_vb2.sqrt();
    let ga = (1.0 - params.alpha_a * params.alpha_a).max(0.0).sqrt();
    let gb = (1.0 - params.alpha_b * params.alpha_b).max(0.0).sqrt();

    let mut h_frame = vec![Complex64::new(0.0, 0.0); frames];
    for i in 0..n_samples {
        if let Some(root) = &root {
            let innov: Vec<Complex64> = h_keys.iter().map(|k| standard_complex(*k, i)).collect();
            for (f, hf) in h_frame.iter_mut().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, g) in innov.iter().enumerate() {
                    acc += root[f][j] * g;
                }
                *hf = acc;
            }
        } else {
            let h0 = standard_complex(h_keys[0], i);
            h_frame.iter_mut().for_each(|hf| *hf = h0);
        }

        set.x1.push(h_frame[0] + sx * standard_complex(wx1, i));
        set.y2.push(h_frame[1] + sy * standard_complex(wy2, i));
        set.x2t1
            .push(h_frame[frames - 1] + sx * standard_complex(wx_last, i));

        for l in 1..=2 * t {
            let hf = h_frame[l - 1];
            let v = if l % 2 == 1 {
                params.alpha_a * hf
                    + ga * standard_complex(qa_key_for(l), i)
                    + sva * standard_complex(wva[l - 1], i)
            } else {
                params.alpha_b * hf
                    + gb * standard_complex(qb_key_for(l), i)
                    + svb * standard_complex(wvb[l - 1], i)
            };
            set.z[l - 1].push(v);
        }
        for (f, hf) in h_frame.iter().enumerate() {
            set.h[f].push(*hf);
        }
    }
    Ok(set)
}

/// Which Gaussian information measure to estimate from samples.
pub enum MeasureRequest {
    /// `I(A; B)` between two column groups.
    Mi(Vec<SampleColumn>, Vec<SampleColumn>),
    /// `I(A; B | C)`.
    CondMi(Vec<SampleColumn>, Vec<SampleColumn>, Vec<SampleColumn>),
    /// `D(first || second)` between the fitted joints of two column groups
    /// of equal size.
    Kl(Vec<SampleColumn>, Vec<SampleColumn>),
}

/// A Monte-Carlo estimate with its ten-way batch standard error.
#[derive(Clone, Copy, Debug)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_err: f64,
}

fn fit_covariance(set: &SampleSet, cols: &[SampleColumn], lo: usize, hi: usize) -> HermitianMatrix {
    let k = cols.len();
    let slices: Vec<&[Complex64]> = cols.iter().map(|c| set.column(*c)).collect();
    let mut acc = vec![vec![Complex64::new(0.0, 0.0); k]; k];
    for i in lo..hi {
        for a in 0..k {
            let va = slices[a][i];
            for b in a..k {
                acc[a][b] += va * slices[b][i].conj();
            }
        }
    }
    let inv_n = 1.0 / (hi - lo) as f64;
    HermitianMatrix::from_fn(k, |a, b| acc[a][b] * inv_n)
}

fn batched<F: Fn(usize, usize) -> Result<f64>>(n: usize, f: F) -> Result<McEstimate> {
    let estimate = f(0, n)?;
    let mut batch = Vec::with_capacity(10);
    for k in 0..10 {
        let lo = k * n / 10;
        let hi = (k + 1) * n / 10;
        if hi > lo {
            batch.push(f(lo, hi)?);
        }
    }
    let m = batch.iter().sum::<f64>() / batch.len() as f64;
    let var = batch.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / batch.len() as f64;
    Ok(McEstimate {
        estimate,
        std_err: (var / batch.len() as f64).sqrt(),
    })
}

/// Plug-in estimate of a Gaussian information measure: fit the zero-mean
/// sample covariance, then evaluate the same closed form the analysis uses.
/// The standard error comes from re-estimating on ten contiguous batches.
pub fn mc_gaussian_measures(set: &SampleSet, request: &MeasureRequest) -> Result<McEstimate> {
    match request {
        MeasureRequest::Mi(a, b) => {
            let cols: Vec<SampleColumn> = a.iter().chain(b.iter()).copied().collect();
            let ia: Vec<usize> = (0..a.len()).collect();
            let ib: Vec<usize> = (a.len()..cols.len()).collect();
            batched(set.n_samples, |lo, hi| {
                let cov = fit_covariance(set, &cols, lo, hi);
                gaussian::mutual_information(&cov, &ia, &ib)?
                    .finite()
                    .ok_or_else(|| Error::IllPosed("infinite MI from fitted covariance".into()))
            })
        }
        MeasureRequest::CondMi(a, b, c) => {
            let cols: Vec<SampleColumn> =
                a.iter().chain(b.iter()).chain(c.iter()).copied().collect();
            let ia: Vec<usize> = (0..a.len()).collect();
            let ib: Vec<usize> = (a.len()..a.len() + b.len()).collect();
            let ic: Vec<usize> = (a.len() + b.len()..cols.len()).collect();
            batched(set.n_samples, |lo, hi| {
                let cov = fit_covariance(set, &cols, lo, hi);
                gaussian::conditional_mi(&cov, &ia, &ib, &ic)?
                    .finite()
                    .ok_or_else(|| Error::IllPosed("infinite conditional MI from fit".into()))
            })
        }
        MeasureRequest::Kl(p, q) => {
            if p.len() != q.len() {
                return Err(Error::InvalidParam(
                    "KL request needs equal-size column groups".into(),
                ));
            }
            batched(set.n_samples, |lo, hi| {
                let cp = fit_covariance(set, p, lo, hi);
                let cq = fit_covariance(set, q, lo, hi);
                gaussian::kl_zero_mean_gaussians(&cp, &cq)
            })
        }
    }
}

/// Semi-analytic Monte-Carlo estimate of the doubled quantized conditional
/// entropy `2 H(<Re y(2)> | Re zhat)`: for every sample, form
/// `b = Re(combiner . z)`, evaluate the conditional interval masses of the
/// quantizer analytically, and average the per-sample entropies.
pub fn mc_quantized_cond_entropy(
    set: &SampleSet,
    quant: &QuantizerSpec,
    lep: &LepEstimate,
    sigma_y2: f64,
) -> Result<McEstimate> {
    if lep.combiner.len() != set.z.len() {
        return Err(Error::InvalidParam(format!(
            "combiner length {} does not match z dimension {}",
            lep.combiner.len(),
            set.z.len()
        )));
    }
    let b_samples: Vec<f64> = (0..set.n_samples)
        .map(|i| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (c, col) in lep.combiner.iter().zip(set.z.iter()) {
                acc += c.conj() * col[i];
            }
            acc.re
        })
        .collect();
    quantized_cond_entropy_from_eve_samples(&b_samples, quant, lep.sigma_z2, sigma_y2)
}

/// Same estimator, but with the scalar Eve observation sampled directly as
/// `Re(h) + noise`; used to validate attack-transformed scenarios where the
/// scalar estimate is the model.
pub fn mc_quantized_cond_entropy_scalar(
    params: &ScenarioParams,
    sigma_z2: f64,
    quant: &QuantizerSpec,
    n_samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    let hk = Stream::H(1).key(seed);
    let wk = Stream::Aux(1).key(seed);
    let sz = (sigma_z2 / 2.0).sqrt();
    let b: Vec<f64> = (0..n_samples)
        .map(|i| {
            let h = standard_complex(hk, i).re;
            h + sz * (2.0_f64).sqrt() * standard_complex(wk, i).re
        })
        .collect();
    quantized_cond_entropy_from_eve_samples(&b, quant, sigma_z2, params.sigma_y2)
}

fn quantized_cond_entropy_from_eve_samples(
    b_samples: &[f64],
    quant: &QuantizerSpec,
    sigma_z2: f64,
    sigma_y2: f64,
) -> Result<McEstimate> {
    if quant.levels() == 1 {
        return Ok(McEstimate {
            estimate: 0.0,
            std_err: 0.0,
        });
    }
    let var_b = (1.0 + sigma_z2) / 2.0;
    // Given b, Re h is Gaussian with these posterior moments, and Re y adds
    // an independent half-variance noise; the interval masses are exact
    // Gaussian tail differences.
    let post_var = sigma_z2 / (2.0 * (1.0 + sigma_z2));
    let total_sd = (post_var + sigma_y2 / 2.0).sqrt();
    let per_sample = |b: f64| -> f64 {
        let mu = b * 0.5 / var_b;
        if total_sd == 0.0 {
            return 0.0;
        }
        let masses = quant.gaussian_cell_masses(mu, total_sd, 8.0);
        -2.0 * masses
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| p * p.log2())
            .sum::<f64>()
    };
    batched(b_samples.len(), |lo, hi| {
        Ok(b_samples[lo..hi]
            .iter()
            .map(|&b| per_sample(b))
            .sum::<f64>()
            / (hi - lo) as f64)
    })
}

/// Monte-Carlo counterpart of the data-processing lower bound on the
/// quantized rate: per batch, the histogram entropy of the quantized real
/// part of `y(2)` doubled, minus the plug-in mutual information between
/// `y(2)` and the observation stack, clamped at zero.
pub fn mc_quantized_lower_bound(set: &SampleSet, quant: &QuantizerSpec) -> Result<McEstimate> {
    let z_cols: Vec<SampleColumn> = (0..set.z.len()).map(SampleColumn::Z).collect();
    let cols: Vec<SampleColumn> = std::iter::once(SampleColumn::Y2)
        .chain(z_cols.iter().copied())
        .collect();
    let iz: Vec<usize> = (1..cols.len()).collect();
    batched(set.n_samples, |lo, hi| {
        let cov = fit_covariance(set, &cols, lo, hi);
        let mi = gaussian::mutual_information(&cov, &[0], &iz)?
            .finite()
            .ok_or_else(|| Error::IllPosed("infinite MI from fitted covariance".into()))?;
        let mut counts = vec![0u64; quant.levels()];
        for v in &set.y2[lo..hi] {
            counts[quant.cell_of(v.re)] += 1;
        }
        let n = (hi - lo) as f64;
        let h: f64 = counts
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let f = c as f64 / n;
                -f * f.log2()
            })
            .sum();
        Ok((2.0 * h - mi).max(0.0))
    })
}

/// Plug-in estimate of the PLA rate: fit the joint covariance of
/// `(x(2t+1), x(1), z)` from samples, derive from it both the legitimate
/// joint and the joint an attacker induces by drawing the verification
/// estimate from the conditional given `z` (whose cross-covariance is
/// `r_{x2}^H R_z^{-1} r_{x1}` with every factor fitted), and take the
/// Gaussian KL divergence between the two fits.
pub fn mc_pla_rate(set: &SampleSet) -> Result<McEstimate> {
    let mut cols = vec![SampleColumn::X2t1, SampleColumn::X1];
    cols.extend((0..set.z.len()).map(SampleColumn::Z));
    batched(set.n_samples, |lo, hi| {
        let cov = fit_covariance(set, &cols, lo, hi);
        let zdim = set.z.len();
        let rz = cov.submatrix(&(2..2 + zdim).collect::<Vec<_>>());
        let eig = rz.eigen("fitted z covariance");
        let zx1 = nalgebra::DVector::from_fn(zdim, |i, _| cov.get(2 + i, 1));
        let zx2 = nalgebra::DVector::from_fn(zdim, |i, _| cov.get(2 + i, 0));
        let u = eig.solve(&zx1)?;
        let c12: Complex64 = zx2.iter().zip(u.iter()).map(|(a, b)| a.conj() * b).sum();
        let legit = cov.submatrix(&[0, 1]);
        let attack = HermitianMatrix::from_fn(2, |i, j| match (i, j) {
            (0, 0) => cov.get(0, 0),
            (1, 1) => cov.get(1, 1),
            (0, 1) => c12,
            _ => unreachable!(),
        });
        gaussian::kl_zero_mean_gaussians(&legit, &attack)
    })
}

/// Samples of the scalar-Eve model `(x1, y2, x2t1, zhat)` for time-invariant
/// scenarios: `zhat = h + sigma_z w` with residual noise independent of the
/// legitimate estimates (exact for time-invariant channels).
pub fn sample_scalar_eve(
    params: &ScenarioParams,
    sigma_z2: f64,
    n_samples: usize,
    seed: u64,
) -> Result<SampleSet> {
    if !params.is_time_invariant() {
        return Err(Error::UnsupportedModel(
            "scalar-Eve sampling assumes a time-invariant channel".into(),
        ));
    }
    let mut set = sample_scenario(params, 1, n_samples, seed)?;
    let wk = Stream::Aux(2).key(seed);
    let sz = sigma_z2.sqrt();
    let zhat: Vec<Complex64> = (0..n_samples)
        .map(|i| set.h[0][i] + sz * standard_complex(wk, i))
        .collect();
    set.z = vec![zhat];
    Ok(set)
}
