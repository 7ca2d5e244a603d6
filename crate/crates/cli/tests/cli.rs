//! End-to-end behavior of the `sarlab` binary: exit codes, stdout layout,
//! and file outputs.

use std::path::PathBuf;
use std::process::{Command, Output};

fn sarlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sarlab"))
        .args(args)
        .output()
        .expect("spawn sarlab")
}

fn tmp(name: &str) -> PathBuf {
    std::env::temp_dir().join(name)
}

#[test]
fn point_prints_csv_to_stdout() {
    let out = sarlab(&["point", "--alpha", "0.4"]);
    assert!(out.status.success(), "{out:?}");
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "sweep_axis,sweep_value,scheme,frame,value,lower,upper,status,oracle_estimate,oracle_stderr"
    );
    assert_eq!(text.lines().count(), 6, "header plus five schemes");
    assert!(text.contains("point,0.000000000,scbca,3,"));
}

#[test]
fn continuous_scheme_serializes_inf() {
    let out = sarlab(&["point", "--schemes", "acbca_continuous"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains(",acbca_continuous,3,inf,"), "{text}");
}

#[test]
fn missing_config_file_is_a_config_error() {
    let out = sarlab(&["sweep", "/nonexistent/config.conf"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bad_key_is_a_config_error() {
    let out = sarlab(&["point", "--no_such_key", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unknown_command_exits_one() {
    let out = sarlab(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn degenerate_covariance_is_a_numerical_failure() {
    // A perfectly informed eavesdropper makes the full observation stack
    // singular; the secret-key bounds propagate that as a per-row error and
    // the process reports a numerical failure.
    let csv = tmp("sarlab_degenerate.csv");
    let out = sarlab(&[
        "point",
        "--alpha",
        "1.0",
        "--sigma_va2",
        "0",
        "--sigma_vb2",
        "0",
        "--schemes",
        "scbca",
    ]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");
    let _ = std::fs::remove_file(csv);
}

#[test]
fn sweep_writes_csv_and_svg() {
    let csv = tmp("sarlab_cli_smoke.csv");
    let svg = tmp("sarlab_cli_smoke.svg");
    let config = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../configs/alpha_sweep.conf"
    );
    let out = sarlab(&[
        "sweep",
        config,
        "--sweep",
        "alpha:0:0.4:0.2",
        "--csv",
        csv.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 1 + 3 * 5);
    assert!(text.contains("alpha,0.200000000,pla,3,"));
    let svg_text = std::fs::read_to_string(&svg).unwrap();
    assert!(svg_text.starts_with("<svg"));
    assert!(svg_text.contains("<polyline"));
    let _ = std::fs::remove_file(csv);
    let _ = std::fs::remove_file(svg);
}

#[test]
fn unsupported_rows_do_not_fail_the_process() {
    let csv = tmp("sarlab_cli_unsupported.csv");
    let config = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../configs/doppler_sweep.conf"
    );
    let out = sarlab(&[
        "sweep",
        config,
        "--sweep",
        "doppler:0.01,0.05",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.contains(",acbca,3,,,,unsupported,,"), "{text}");
    assert!(text.contains(",pla,3,"));
    let _ = std::fs::remove_file(csv);
}

#[test]
fn validate_passes_at_small_sample_count() {
    let out = sarlab(&["validate", "--n", "100000", "--seed", "42"]);
    assert!(out.status.success(), "{out:?}");
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("[ok]"));
    assert!(text.contains("checks passed"));
}
