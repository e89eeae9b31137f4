//! End-to-end tests of the `pic` binary: spawn the real executable, check
//! exit codes, and parse its CSV/JSON output back through the library.

use std::fs::File;
use std::path::Path;
use std::process::{Command, Output};
use std::sync::Arc;

use pic_core::io::{read_json, read_sweep_json, BinaryReport, PmfReport, ValidateReport};
use pic_core::{binary_capacity, make_context, ChannelParams, ScaledLevy};

fn pic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pic"))
        .args(args)
        .output()
        .expect("failed to spawn the pic binary")
}

fn stdout_of(out: &Output) -> String {
    assert!(
        out.status.success(),
        "pic exited {:?}; stderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).expect("stdout is not utf-8")
}

#[test]
fn channel_csv_matches_the_reference_case() {
    let out = pic(&[
        "channel", "--alpha", "1", "--beta", "1", "--lambda", "5", "--eta", "1", "--c", "1",
        "--rho", "0.5",
    ]);
    let text = stdout_of(&out);
    let meta: Vec<&str> = text.lines().filter(|l| l.starts_with('#')).collect();
    assert!(
        meta.contains(&"# m_rho=10"),
        "expected m_rho=10 in metadata, got {meta:?}"
    );
    assert!(
        meta.contains(&"# theta=5.0000000000000000e-1"),
        "expected theta=0.5 in metadata, got {meta:?}"
    );
    let rows: Vec<Vec<f64>> = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert!(rows.len() == 11, "expected 11 rows, got {}", rows.len());
    for (x, row) in rows.iter().enumerate() {
        assert!(row.len() == 11, "row {x} has {} columns", row.len());
        let sum: f64 = row.iter().sum();
        assert!(
            (sum - 1.0).abs() < 1e-12,
            "row {x} sums to {sum}, not 1"
        );
    }
    assert!(
        rows[0][0] == 1.0 && rows[0][1..].iter().all(|&p| p == 0.0),
        "input 0 must map to output 0 with certainty"
    );
}

#[test]
fn validate_check_round_trips_the_channel_file_bit_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let chan = dir.path().join("chan.csv");
    let base = [
        "--alpha", "0.9", "--beta", "0.8", "--lambda", "6", "--eta", "0.7", "--c", "1.3",
        "--rho", "0.35",
    ];
    let out = pic(&[&["channel"], &base[..], &["--out", chan.to_str().unwrap()]].concat());
    assert!(out.status.success(), "channel export failed");

    let report_path = dir.path().join("validate.json");
    let out = pic(&[
        &["validate"],
        &base[..],
        &[
            "--trials", "20000", "--seed", "7", "--check", chan.to_str().unwrap(), "--out",
            report_path.to_str().unwrap(),
        ],
    ]
    .concat());
    assert!(
        out.status.success(),
        "validate --check exited {:?}; stderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    let report: ValidateReport = read_json(&mut File::open(&report_path).unwrap()).unwrap();
    assert!(report.check_bit_exact == Some(true), "reload was not bit-exact");
    assert!(report.pass, "validation did not pass: {report:?}");
    assert!(report.rows_exceeding == 0, "tv bound exceeded: {report:?}");
}

#[test]
fn identical_invocations_write_identical_bytes() {
    let args = [
        "sweep", "--lambda", "4", "--eta", "0.6", "--c", "1", "--grid-n", "8", "--tol-bits",
        "1e-8",
    ];
    let a = pic(&args);
    let b = pic(&args);
    assert!(a.status.success() && b.status.success(), "sweep failed");
    assert!(a.stdout == b.stdout, "reruns differ");
    let c = pic(&[&args[..], &["--threads", "2"]].concat());
    assert!(
        c.status.success() && c.stdout == a.stdout,
        "output depends on the thread count"
    );
}

#[test]
fn usage_errors_exit_two() {
    let cases: &[&[&str]] = &[
        // a rho list with no entries
        &["sweep", "--lambda", "5", "--rhos", " , "],
        // both parameterizations of the arrival law at once
        &["binary", "--eta", "0.5", "--l", "1", "--d", "1", "--r", "1", "--rho", "0.1"],
        // rho missing entirely
        &["binary", "--lambda", "5"],
        // geometry form missing one of its three lengths
        &["binary", "--l", "1", "--d", "1", "--rho", "0.1"],
        // zero-point grid
        &["sweep", "--lambda", "5", "--grid-n", "0"],
    ];
    for args in cases {
        let out = pic(args);
        assert!(
            out.status.code() == Some(2),
            "{args:?} exited {:?}, want 2",
            out.status.code()
        );
        assert!(
            !out.stderr.is_empty(),
            "{args:?} printed nothing to stderr"
        );
    }
}

#[test]
fn domain_errors_exit_one_with_a_message() {
    let cases: &[&[&str]] = &[
        &["binary", "--lambda=-3", "--eta", "0.5", "--rho", "0.1"],
        // rho at or above the capture probability is unreachable
        &["capacity", "--lambda", "5", "--eta", "0.4", "--rho", "0.4"],
    ];
    for args in cases {
        let out = pic(args);
        assert!(
            out.status.code() == Some(1),
            "{args:?} exited {:?}, want 1",
            out.status.code()
        );
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(
            err.starts_with("error:"),
            "{args:?} stderr does not explain: {err}"
        );
    }
}

#[test]
fn sweep_json_has_both_modes_and_binary_never_beats_ba() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.json");
    let out = pic(&[
        "sweep", "--lambda", "5", "--eta", "1", "--c", "1", "--rhos", "0.1,0.3,0.5", "--mode",
        "both", "--no-refine", "--tol-bits", "1e-9", "--out", path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "sweep failed: {:?}", out.status.code());
    let report = read_sweep_json(&path).unwrap();
    assert!(report.points.len() == 6, "3 rhos x 2 modes, got {}", report.points.len());
    assert!(
        report.best_index < report.points.len(),
        "best_index out of bounds"
    );
    assert!(
        report.grid.spacing == "explicit" && report.grid.n == 3,
        "grid metadata wrong: {:?}",
        report.grid
    );
    for pair in report.points.chunks(2) {
        let (bin, ba) = (&pair[0], &pair[1]);
        assert!(
            bin.mode == "binary" && ba.mode == "ba" && bin.rho == ba.rho,
            "points are not sorted binary-then-ba per rho"
        );
        // the ba value is a certified lower bound, so allow its bracket width
        assert!(
            ba.mi_bits >= bin.mi_bits - (1e-9 + ba.gap_bits),
            "ba below the binary restriction at rho {}: {} < {}",
            bin.rho,
            ba.mi_bits,
            bin.mi_bits
        );
    }
}

#[test]
fn config_file_fills_gaps_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("pic.conf");
    std::fs::write(
        &conf,
        "lambda = 6\neta=0.7   # trailing comment\nc=1.25\nrho=0.5\nbeta=0.9\n",
    )
    .unwrap();
    let path = dir.path().join("binary.json");
    let out = pic(&[
        "binary", "--config", conf.to_str().unwrap(), "--rho", "0.3", "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "binary with config failed");
    let report: BinaryReport = read_json(&mut File::open(&path).unwrap()).unwrap();
    assert!(report.rho == 0.3, "flag must override the config rho");
    assert!(
        report.params.lambda == 6.0 && report.params.beta == 0.9 && report.params.c == 1.25,
        "config values were not picked up: {:?}",
        report.params
    );
    assert!(report.params.alpha == 1.0, "unset alpha must default to 1");
}

#[test]
fn pmf_masses_form_a_distribution_on_the_alphabet() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pmf.json");
    let out = pic(&[
        "pmf", "--lambda", "5", "--eta", "1", "--c", "1", "--rhos", "0.5", "--no-refine",
        "--out", path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "pmf failed: {:?}", out.status.code());
    let report: PmfReport = read_json(&mut File::open(&path).unwrap()).unwrap();
    let total: f64 = report.point.pmf_sparse.iter().map(|&(_, p)| p).sum();
    assert!(
        (total - 1.0).abs() < 1e-9,
        "pmf masses sum to {total}, not 1"
    );
    assert!(
        report
            .point
            .pmf_sparse
            .iter()
            .all(|&(x, p)| x <= report.point.m_rho && p > 0.0),
        "pmf has symbols outside the alphabet or non-positive mass"
    );
}

#[test]
fn binary_report_matches_the_library_bit_for_bit() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("binary.json");
    let out = pic(&[
        "binary", "--alpha", "0.9", "--beta", "0.8", "--lambda", "6", "--eta", "0.7", "--c",
        "1.3", "--rho", "0.35", "--out", path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "binary failed");
    let report: BinaryReport = read_json(&mut File::open(&path).unwrap()).unwrap();

    let law = ScaledLevy::<f64>::new(0.7, 1.3).unwrap();
    let params = ChannelParams::new(0.9, 0.8, 6.0, Arc::new(law)).unwrap();
    let ctx = make_context(&params, 0.35).unwrap();
    let bc = binary_capacity(&ctx);
    assert!(
        report.phi.to_bits() == bc.phi.to_bits()
            && report.xi_star.to_bits() == bc.xi_star.to_bits()
            && report.mi_bits.to_bits() == bc.mi_bits.to_bits(),
        "CLI numbers drifted from the library: {report:?} vs {bc:?}"
    );
}

#[test]
fn validate_failure_exits_one_but_still_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("validate.json");
    // 400 trials cannot hit a 1e-4 tv bound; the report must say so
    let out = pic(&[
        "validate", "--lambda", "5", "--eta", "1", "--c", "1", "--rho", "0.5", "--trials",
        "400", "--seed", "3", "--tv-bound", "1e-4", "--out", path.to_str().unwrap(),
    ]);
    assert!(
        out.status.code() == Some(1),
        "expected exit 1, got {:?}",
        out.status.code()
    );
    let report: ValidateReport = read_json(&mut File::open(&path).unwrap()).unwrap();
    assert!(!report.pass && report.rows_exceeding > 0, "report does not record the failure");
}

#[test]
fn geometry_form_matches_the_equivalent_eta_c_form() {
    // l=2, d=0.5, r=3: eta = r/(l+r) = 0.6, c = l^2/(2 d) = 4
    let a = pic(&["binary", "--l", "2", "--d", "0.5", "--r", "3", "--rho", "0.2"]);
    let b = pic(&["binary", "--eta", "0.6", "--c", "4", "--rho", "0.2"]);
    let (a, b) = (stdout_of(&a), stdout_of(&b));
    assert!(a == b, "geometry form and direct form disagree:\n{a}\nvs\n{b}");
}

fn read_to_string(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn format_csv_and_out_file_agree_with_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let args = [
        "sweep", "--lambda", "4", "--eta", "0.6", "--c", "1", "--rhos", "0.2,0.4", "--mode",
        "binary", "--no-refine", "--format", "csv",
    ];
    let on_stdout = stdout_of(&pic(&args));
    let out = pic(&[&args[..], &["--out", path.to_str().unwrap()]].concat());
    assert!(out.status.success(), "sweep to file failed");
    assert!(
        read_to_string(&path) == on_stdout,
        "--out file differs from stdout"
    );
    let header = "rho,tau,theta,m_rho,mi_bits,rate,rate_normalized,gap_bits,converged,mode";
    assert!(
        on_stdout.lines().any(|l| l == header),
        "csv header missing or wrong"
    );
}
