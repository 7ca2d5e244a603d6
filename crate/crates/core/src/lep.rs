//! Eve's linear processing: the unit-gain MMSE combination of all her
//! channel estimates into a scalar surrogate of the legitimate channel.
//!
//! With `beta(k) = E[z h^*(k)]`, the stacked observation decomposes as
//! `z = beta(k) h(k) + s` with residual covariance
//! `R_s = R_z - beta beta^H`. The combiner minimizes the residual power
//! `c^H R_s c` subject to unit gain `c^H beta = 1`, giving
//! `c = R_s^{-1} beta / (beta^H R_s^{-1} beta)` and residual power
//! `sigma_z^2 = 1 / (beta^H R_s^{-1} beta)`. Degenerate residual covariances
//! (a perfectly informed Eve) are handled exactly through the null space: if
//! `beta` has a component the residual cannot touch, the combiner lives
//! there and the residual power is zero.
//!
//! For time-invariant channels the scalar estimate is a sufficient statistic
//! of `z` for everything the legitimate users hold, so replacing `z` by it
//! loses nothing; for time-varying channels it is a deliberate simplification
//! of Eve's processing.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::channel::{build_covariances, CovarianceBundle, ScenarioParams};
use crate::error::{Error, Result};
use crate::gaussian::mutual_information;
use crate::numerics::HermitianMatrix;

/// Statistics of Eve's scalar estimate `zhat = h(k) + residual`.
#[derive(Clone, Debug)]
pub struct LepEstimate {
    /// Which legitimate frame's channel the combiner targets (1 or 2).
    pub target_frame: usize,
    /// Combiner weights; `zhat = combiner^H z`.
    pub combiner: Vec<Complex64>,
    /// Residual noise power of the unit-gain estimate.
    pub sigma_z2: f64,
    /// `E[zhat y(2)^*]`.
    pub corr_to_y2: Complex64,
    /// `E[zhat x(1)^*]`.
    pub corr_to_x1: Complex64,
    /// `E[zhat x(2t+1)^*]`.
    pub corr_to_x2t1: Complex64,
}

/// Correlation of `z` with the targeted channel coefficient `h(k)`:
/// `beta_l(k) = alpha_side(l) rho(k - l)`.
fn beta_vector(params: &ScenarioParams, t: usize, k: usize) -> Result<DVector<Complex64>> {
    let n = 2 * t;
    let mut beta = DVector::from_element(n, Complex64::new(0.0, 0.0));
    for l in 1..=n {
        let rho = params.rho(k as i64 - l as i64)?;
        beta[l - 1] = Complex64::new(params.alpha_at(l) * rho, 0.0);
    }
    Ok(beta)
}

/// Unit-gain MMSE combiner and residual power for a residual covariance
/// `r_s` and signature `beta`. Exact on rank-deficient residuals.
fn constrained_mmse(
    r_s: &HermitianMatrix,
    beta: &DVector<Complex64>,
    role: &str,
) -> Result<(DVector<Complex64>, f64)> {
    let norm2: f64 = beta.iter().map(|b| b.norm_sqr()).sum();
    if norm2 <= 0.0 {
        return Err(Error::NoObservableSignal);
    }
    let eig = r_s.eigen(role);
    let beta_null = eig.null_projection(beta);
    let null_power: f64 = beta_null.iter().map(|b| b.norm_sqr()).sum();
    if null_power > 1e-12 * norm2 {
        // Part of the target is observed noise-free: point the combiner
        // there and the residual vanishes.
        let c = beta_null.map(|v| v / null_power);
        return Ok((c, 0.0));
    }
    let u = eig.solve(beta).map_err(|_| Error::SingularMatrix {
        role: role.to_string(),
    })?;
    let denom: f64 = beta
        .iter()
        .zip(u.iter())
        .map(|(b, ui)| (b.conj() * ui).re)
        .sum();
    if !(denom > 0.0) {
        return Err(Error::SingularMatrix {
            role: role.to_string(),
        });
    }
    let c = u.map(|v| v / denom);
    Ok((c, 1.0 / denom))
}

fn combine_from_bundle(
    params: &ScenarioParams,
    bundle: &CovarianceBundle,
    k: usize,
) -> Result<LepEstimate> {
    let t = bundle.t;
    let beta = beta_vector(params, t, k)?;
    let n = 2 * t;
    let r_s = HermitianMatrix::from_fn(n, |i, j| bundle.rz.get(i, j) - beta[i] * beta[j].conj());
    let (c, sigma_z2) = constrained_mmse(&r_s, &beta, "eve residual covariance")?;
    // E[zhat a^*] = c^H E[z a^*]; the bundle stores E[a z_l^*].
    let corr = |r: &[Complex64]| -> Complex64 {
        c.iter()
            .zip(r.iter())
            .map(|(ci, ri)| ci.conj() * ri.conj())
            .sum()
    };
    Ok(LepEstimate {
        target_frame: k,
        combiner: c.iter().copied().collect(),
        sigma_z2,
        corr_to_y2: corr(&bundle.ry2),
        corr_to_x1: corr(&bundle.rx1),
        corr_to_x2t1: corr(&bundle.rx2t1),
    })
}

/// Scalar MMSE estimate of `h(k)` from all of Eve's observations up to
/// frame `2t`.
pub fn lep_combine(params: &ScenarioParams, t: usize, k: usize) -> Result<LepEstimate> {
    params.validate()?;
    if !(k == 1 || k == 2) {
        return Err(Error::InvalidParam(format!(
            "the combiner targets frame 1 or 2, got {k}"
        )));
    }
    let bundle = build_covariances(params, t)?;
    combine_from_bundle(params, &bundle, k)
}

/// Picks the candidate scalar estimate (targeting frame 1 or 2) that
/// minimizes `min(I(x(1); zhat), I(y(2); zhat))`, i.e. the one most damaging
/// to the secret-key lower bound. Ties break toward frame 1.
pub fn lep_pick_for_scbca(params: &ScenarioParams, t: usize) -> Result<LepEstimate> {
    params.validate()?;
    let bundle = build_covariances(params, t)?;
    let mut best: Option<(f64, LepEstimate)> = None;
    for k in [1usize, 2] {
        let est = combine_from_bundle(params, &bundle, k)?;
        let score = scbca_score(&bundle, &est)?;
        let better = match &best {
            None => true,
            Some((s, _)) => score < s - 1e-12,
        };
        if better {
            best = Some((score, est));
        }
    }
    Ok(best.unwrap().1)
}

fn scbca_score(bundle: &CovarianceBundle, est: &LepEstimate) -> Result<f64> {
    let var_zhat = 1.0 + est.sigma_z2;
    let mi_with = |var_a: f64, corr: Complex64| -> Result<f64> {
        let cov = HermitianMatrix::from_fn(2, |i, j| match (i, j) {
            (0, 0) => Complex64::new(var_a, 0.0),
            (1, 1) => Complex64::new(var_zhat, 0.0),
            _ => corr.conj(), // E[a zhat^*]
        });
        match mutual_information(&cov, &[0], &[1])? {
            crate::gaussian::Bits::Finite(v) => Ok(v),
            crate::gaussian::Bits::Infinite => Ok(f64::INFINITY),
        }
    };
    let ix = mi_with(bundle.var_x, est.corr_to_x1)?;
    let iy = mi_with(bundle.var_y, est.corr_to_y2)?;
    Ok(ix.min(iy))
}

/// Residual coefficients of the auxiliary processes in Eve's estimate once a
/// time-invariant channel has been observed forever: averaging kills her
/// estimation noise, so `zhat = h + ca q_A + cb q_B` with the returned
/// coefficients.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeInvariantResidual {
    pub residual_qa_coeff: f64,
    pub residual_qb_coeff: f64,
}

pub fn lep_time_invariant_limit(params: &ScenarioParams) -> Result<TimeInvariantResidual> {
    params.validate()?;
    if !params.is_time_invariant() {
        return Err(Error::UnsupportedModel(
            "the long-observation limit assumes a time-invariant channel".into(),
        ));
    }
    let ga2 = 1.0 - params.alpha_a * params.alpha_a;
    let gb2 = 1.0 - params.alpha_b * params.alpha_b;
    // Averaged observations: noise-free copies alpha h + sqrt(1 - alpha^2) q.
    let r_s = HermitianMatrix::from_diagonal(&[ga2, gb2]);
    let beta = DVector::from_vec(vec![
        Complex64::new(params.alpha_a, 0.0),
        Complex64::new(params.alpha_b, 0.0),
    ]);
    let (c, _sigma) = constrained_mmse(&r_s, &beta, "averaged residual covariance")?;
    Ok(TimeInvariantResidual {
        residual_qa_coeff: (c[0].conj() * ga2.sqrt()).re,
        residual_qb_coeff: (c[1].conj() * gb2.sqrt()).re,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{CorrelationModel, QMode};
    use crate::oracle::sample_scenario;

    fn unit_gain_error(params: &ScenarioParams, t: usize, k: usize) -> f64 {
        let est = lep_combine(params, t, k).unwrap();
        let beta = beta_vector(params, t, k).unwrap();
        let gain: Complex64 = est
            .combiner
            .iter()
            .zip(beta.iter())
            .map(|(c, b)| c.conj() * b)
            .sum();
        (gain - Complex64::new(1.0, 0.0)).norm()
    }

    #[test]
    fn unit_gain_holds() {
        let p = ScenarioParams::time_invariant(0.4, 0.1);
        for t in 1..=4 {
            assert!(unit_gain_error(&p, t, 1) < 1e-9);
            assert!(unit_gain_error(&p, t, 2) < 1e-9);
        }
        let jakes = ScenarioParams {
            correlation: CorrelationModel::Jakes { fd_t: 0.07 },
            q_mode: QMode::IidPerFrame,
            alpha_a: 0.8,
            alpha_b: 0.3,
            ..ScenarioParams::time_invariant(0.4, 0.1)
        };
        assert!(unit_gain_error(&jakes, 3, 1) < 1e-9);
    }

    #[test]
    fn perfect_observation_gives_exact_estimate() {
        let mut p = ScenarioParams::time_invariant(1.0, 0.1);
        p.sigma_va2 = 0.0;
        p.sigma_vb2 = 0.0;
        for t in [1usize, 3] {
            let est = lep_combine(&p, t, 1).unwrap();
            assert_eq!(est.sigma_z2, 0.0);
            assert!((est.corr_to_x1.re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_alpha_has_no_observable_signal() {
        let p = ScenarioParams::time_invariant(0.0, 0.1);
        assert!(matches!(
            lep_combine(&p, 1, 1),
            Err(Error::NoObservableSignal)
        ));
    }

    /// Monte-Carlo residual power of the combiner on one scenario, with its
    /// ten-batch standard error.
    fn mc_residual_power(
        p: &ScenarioParams,
        t: usize,
        k: usize,
        n: usize,
        seed: u64,
    ) -> (f64, f64, f64) {
        let est = lep_combine(p, t, k).unwrap();
        let set = sample_scenario(p, t, n, seed).unwrap();
        let mut batches = [0.0_f64; 10];
        for i in 0..n {
            let mut zhat = Complex64::new(0.0, 0.0);
            for (c, col) in est.combiner.iter().zip(set.z.iter()) {
                zhat += c.conj() * col[i];
            }
            let err = zhat - set.h[k - 1][i];
            batches[i * 10 / n] += err.norm_sqr();
        }
        let mean: f64 = batches.iter().sum::<f64>() / n as f64;
        let bm: Vec<f64> = batches.iter().map(|b| b / (n as f64 / 10.0)).collect();
        let bmean = bm.iter().sum::<f64>() / 10.0;
        let var = bm.iter().map(|v| (v - bmean) * (v - bmean)).sum::<f64>() / 10.0;
        (est.sigma_z2, mean, (var / 10.0).sqrt())
    }

    #[test]
    fn sigma_z2_matches_mc_oracle() {
        let p = ScenarioParams::time_invariant(0.4, 0.1);
        let (want, mean, se) = mc_residual_power(&p, 1, 1, 1_000_000, 31);
        assert!(
            (mean - want).abs() <= 3.0 * se,
            "{mean} vs {want} (se {se})"
        );
    }

    #[test]
    fn sigma_z2_matches_mc_across_random_scenarios() {
        let mut state = 0x51317_u64;
        let mut next = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64 + 0.5) / (1u64 << 53) as f64
        };
        for trial in 0..20 {
            let jakes = trial % 2 == 1;
            let mut p = ScenarioParams {
                sigma_x2: 0.02 + 0.5 * next(),
                sigma_y2: 0.02 + 0.5 * next(),
                sigma_va2: 0.02 + 0.5 * next(),
                sigma_vb2: 0.02 + 0.5 * next(),
                alpha_a: 0.85 * (2.0 * next() - 1.0),
                alpha_b: 0.85 * (2.0 * next() - 1.0),
                correlation: CorrelationModel::TimeInvariant,
                q_mode: QMode::Constant,
            };
            if jakes {
                p.correlation = CorrelationModel::Jakes {
                    fd_t: 0.01 + 0.15 * next(),
                };
                p.q_mode = QMode::IidPerFrame;
            }
            if p.alpha_a.abs() < 0.05 && p.alpha_b.abs() < 0.05 {
                continue;
            }
            let t = 1 + trial % 3;
            let k = 1 + trial % 2;
            let (want, mean, se) = mc_residual_power(&p, t, k, 100_000, 600 + trial as u64);
            assert!(
                (mean - want).abs() <= 3.0 * se,
                "trial {trial}: {mean} vs {want} (se {se})"
            );
        }
    }

    #[test]
    fn more_observations_never_hurt() {
        let p = ScenarioParams::time_invariant(0.4, 0.1);
        let mut prev = f64::INFINITY;
        for t in 1..=10 {
            let s = lep_combine(&p, t, 1).unwrap().sigma_z2;
            assert!(s <= prev + 1e-12, "t = {t}: {s} > {prev}");
            prev = s;
        }
    }

    #[test]
    fn time_invariant_matches_averaging_construction() {
        // Averaging the per-side observations and then combining the two
        // averages must reproduce the full-stack combiner exactly when the
        // channel (and q) are frozen.
        let p = ScenarioParams::time_invariant(0.6, 0.2);
        for t in [2usize, 5] {
            let full = lep_combine(&p, t, 1).unwrap();
            let ga2 = 1.0 - p.alpha_a * p.alpha_a;
            let gb2 = 1.0 - p.alpha_b * p.alpha_b;
            let r_s = HermitianMatrix::from_real_fn(2, |i, j| {
                if i == j {
                    let (g2, sv) = if i == 0 {
                        (ga2, p.sigma_va2)
                    } else {
                        (gb2, p.sigma_vb2)
                    };
                    g2 + sv / t as f64
                } else {
                    0.0
                }
            });
            let beta = DVector::from_vec(vec![
                Complex64::new(p.alpha_a, 0.0),
                Complex64::new(p.alpha_b, 0.0),
            ]);
            let (_, sigma) = constrained_mmse(&r_s, &beta, "avg").unwrap();
            assert!(
                (sigma - full.sigma_z2).abs() < 1e-9,
                "t = {t}: {sigma} vs {}",
                full.sigma_z2
            );
        }
    }

    #[test]
    fn scbca_pick_matches_enumeration() {
        let cases = [
            ScenarioParams {
                correlation: CorrelationModel::Jakes { fd_t: 0.1 },
                q_mode: QMode::IidPerFrame,
                alpha_a: 0.8,
                alpha_b: 0.1,
                ..ScenarioParams::time_invariant(0.4, 0.1)
            },
            ScenarioParams {
                correlation: CorrelationModel::Jakes { fd_t: 0.1 },
                q_mode: QMode::IidPerFrame,
                alpha_a: 0.0,
                alpha_b: 0.6,
                ..ScenarioParams::time_invariant(0.4, 0.1)
            },
        ];
        for p in cases {
            let t = 2;
            let bundle = build_covariances(&p, t).unwrap();
            let picked = lep_pick_for_scbca(&p, t).unwrap();
            let mut scores = Vec::new();
            for k in [1usize, 2] {
                let est = combine_from_bundle(&p, &bundle, k).unwrap();
                scores.push((k, scbca_score(&bundle, &est).unwrap()));
            }
            let best = scores.iter().min_by(|a, b| a.1.total_cmp(&b.1)).unwrap().0;
            assert_eq!(picked.target_frame, best, "scores {scores:?}");
        }
    }

    #[test]
    fn symmetric_scenario_ties_toward_frame_one() {
        let p = ScenarioParams::time_invariant(0.5, 0.1);
        let est = lep_pick_for_scbca(&p, 2).unwrap();
        assert_eq!(est.target_frame, 1);
    }

    #[test]
    fn long_observation_limit_cases() {
        // alpha = 1: the q terms vanish entirely.
        let p = ScenarioParams::time_invariant(1.0, 0.1);
        let lim = lep_time_invariant_limit(&p).unwrap();
        assert_eq!(lim.residual_qa_coeff, 0.0);
        assert_eq!(lim.residual_qb_coeff, 0.0);

        // Symmetric alpha: equal coefficients.
        let p = ScenarioParams::time_invariant(0.6, 0.1);
        let lim = lep_time_invariant_limit(&p).unwrap();
        assert!((lim.residual_qa_coeff - lim.residual_qb_coeff).abs() < 1e-12);

        // alpha_a = 1, alpha_b = 0.5: the noise-free side wins outright.
        let mut p = ScenarioParams::time_invariant(0.5, 0.1);
        p.alpha_a = 1.0;
        let lim = lep_time_invariant_limit(&p).unwrap();
        assert_eq!(lim.residual_qa_coeff, 0.0);
        assert_eq!(lim.residual_qb_coeff, 0.0);
    }

    #[test]
    fn long_observation_limit_matches_grid_search() {
        // Brute-force oracle: minimize the residual power of a unit-gain
        // 2-vector combiner on a refined grid.
        let mut p = ScenarioParams::time_invariant(0.0, 0.1);
        p.alpha_a = 0.9;
        p.alpha_b = 0.5;
        let lim = lep_time_invariant_limit(&p).unwrap();

        let ga2 = 1.0 - p.alpha_a * p.alpha_a;
        let gb2 = 1.0 - p.alpha_b * p.alpha_b;
        // Unit gain: ca alpha_a + cb alpha_b = 1; parametrize by ca.
        let cost = |ca: f64| -> f64 {
            let cb = (1.0 - ca * p.alpha_a) / p.alpha_b;
            ca * ca * ga2 + cb * cb * gb2
        };
        let (mut lo, mut hi) = (-10.0, 10.0);
        for _ in 0..200 {
            let m1 = lo + (hi - lo) / 3.0;
            let m2 = hi - (hi - lo) / 3.0;
            if cost(m1) < cost(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        let ca = 0.5 * (lo + hi);
        let cb = (1.0 - ca * p.alpha_a) / p.alpha_b;
        assert!((lim.residual_qa_coeff - ca * ga2.sqrt()).abs() < 1e-6);
        assert!((lim.residual_qb_coeff - cb * gb2.sqrt()).abs() < 1e-6);
    }
}
