//! Self-check suite: crosses the closed forms against the seeded
//! Monte-Carlo oracle and prints one line per check.

use sarlab_core::channel::{build_covariances, ScenarioParams};
use sarlab_core::gaussian::{mutual_information, Bits};
use sarlab_core::lep::lep_combine;
use sarlab_core::numerics::QuadratureSpec;
use sarlab_core::oracle::{
    mc_gaussian_measures, mc_pla_rate, mc_quantized_cond_entropy, sample_scenario, MeasureRequest,
    SampleColumn,
};
use sarlab_core::sar::{acbca_sar_quantized, choose_vsat, pla_sar, QuantizerSpec, SarValue};

struct Check {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn three_sigma(name: &'static str, got: f64, est: f64, se: f64) -> Check {
    let tol = 3.0 * se.max(1e-4);
    Check {
        name,
        passed: (got - est).abs() <= tol,
        detail: format!("analysis {got:.6} vs oracle {est:.6} (3se = {tol:.2e})"),
    }
}

/// Runs every self-check at the given sample count and seed; returns true
/// when all pass.
pub fn run(n_samples: usize, seed: u64) -> bool {
    let params = ScenarioParams::time_invariant(0.4, 0.1);
    let t = 1;
    let mut checks: Vec<Check> = Vec::new();

    let set = sample_scenario(&params, t, n_samples, seed).expect("sampling");
    let bundle = build_covariances(&params, t).expect("covariances");

    // covariance entries against sample covariances
    {
        let (est, se) = set.cov_with_stderr(SampleColumn::Z(0), SampleColumn::Z(1));
        let want = bundle.rz.get(0, 1).re;
        checks.push(three_sigma("covariance: eve cross-entry", want, est.re, se));
        let (est, se) = set.cov_with_stderr(SampleColumn::X1, SampleColumn::Y2);
        checks.push(three_sigma(
            "covariance: legitimate pair",
            bundle.rho_xy.re,
            est.re,
            se,
        ));
    }

    // mutual information between the legitimate estimates
    {
        let joint = bundle.joint_x1_y2_z();
        let Bits::Finite(want) = mutual_information(&joint, &[0], &[1]).expect("mi") else {
            panic!("finite expected")
        };
        let est = mc_gaussian_measures(
            &set,
            &MeasureRequest::Mi(vec![SampleColumn::X1], vec![SampleColumn::Y2]),
        )
        .expect("mc mi");
        checks.push(three_sigma(
            "mutual information: x(1) vs y(2)",
            want,
            est.estimate,
            est.std_err,
        ));
    }

    // scalar combiner residual power
    {
        let lep = lep_combine(&params, t, 1).expect("combiner");
        let mut batches = [0.0_f64; 10];
        for i in 0..n_samples {
            let mut zhat = sarlab_core::Complex64::new(0.0, 0.0);
            for (c, col) in lep.combiner.iter().zip(set.z.iter()) {
                zhat += c.conj() * col[i];
            }
            batches[i * 10 / n_samples] += (zhat - set.h[0][i]).norm_sqr();
        }
        let est: f64 = batches.iter().sum::<f64>() / n_samples as f64;
        let bm: Vec<f64> = batches
            .iter()
            .map(|b| b / (n_samples as f64 / 10.0))
            .collect();
        let mean = bm.iter().sum::<f64>() / 10.0;
        let var = bm.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / 10.0;
        checks.push(three_sigma(
            "combiner residual power",
            lep.sigma_z2,
            est,
            (var / 10.0).sqrt(),
        ));
    }

    // quantized conditional entropy: quadrature vs semi-analytic sampling
    {
        let quant = QuantizerSpec::new(3, choose_vsat(&params, 0.01).expect("vsat")).expect("q");
        let quad = QuadratureSpec::default();
        let r = acbca_sar_quantized(&params, t, &quant, &quad).expect("quantized rate");
        let SarValue::Point(Bits::Finite(got)) = r.value else {
            panic!("finite expected")
        };
        let lep = lep_combine(&params, t, 2).expect("combiner");
        let est =
            mc_quantized_cond_entropy(&set, &quant, &lep, params.sigma_y2).expect("mc entropy");
        checks.push(three_sigma(
            "quantized conditional entropy",
            got,
            est.estimate,
            est.std_err,
        ));
    }

    // channel-signature rate against the plug-in estimate
    {
        let SarValue::Point(Bits::Finite(got)) = pla_sar(&params, t).expect("pla").value else {
            panic!("finite expected")
        };
        let est = mc_pla_rate(&set).expect("mc pla");
        checks.push(three_sigma(
            "channel-signature rate",
            got,
            est.estimate,
            est.std_err,
        ));
    }

    let mut all = true;
    for c in &checks {
        println!(
            "[{}] {}: {}",
            if c.passed { "ok" } else { "FAIL" },
            c.name,
            c.detail
        );
        all &= c.passed;
    }
    println!(
        "{} of {} checks passed (n = {n_samples}, seed = {seed})",
        checks.iter().filter(|c| c.passed).count(),
        checks.len()
    );
    all
}

#[cfg(test)]
mod tests {
    #[test]
    fn validation_suite_passes_at_moderate_sample_count() {
        assert!(super::run(200_000, 42));
    }
}
