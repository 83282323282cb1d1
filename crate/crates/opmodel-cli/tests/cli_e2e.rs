//! End-to-end checks of the binary: exit codes, determinism, input
//! validation, and file outputs.

use std::io::Write as _;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_opmodel"));
    // Keep the environment from leaking a seed into the assertions below.
    c.env_remove("OPMODEL_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is utf-8")
}

fn stderr_str(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is utf-8")
}

#[test]
fn verdict_exit_codes() {
    assert_eq!(
        run(&["embed-check", "--preset", "cayley"]).status.code(),
        Some(0)
    );
    assert_eq!(
        run(&["embed-check", "--preset", "sic"]).status.code(),
        Some(1)
    );
    assert_eq!(
        run(&["ext-check", "--preset", "ptrace"]).status.code(),
        Some(0)
    );
    assert_eq!(
        run(&["ext-check", "--preset", "mb", "--mesh", "64"])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        run(&["ext-check", "--preset", "inverse-cayley"])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        run(&["tomography", "--trials", "20"]).status.code(),
        Some(0)
    );
    assert_eq!(
        run(&["gleason-effects", "--dims", "2", "--trials", "5"])
            .status
            .code(),
        Some(0)
    );
}

#[test]
fn reports_are_byte_identical_without_timestamps() {
    for args in [
        vec!["chsh", "--sweep", "300", "--no-timestamp"],
        vec!["embed-check", "--preset", "sic", "--json", "--no-timestamp"],
        vec!["mb", "--mesh", "64", "--no-timestamp"],
        vec![
            "wigner",
            "--state",
            "hermite1",
            "--grid",
            "64",
            "--no-timestamp",
            "--json",
        ],
        vec![
            "gleason-effects",
            "--dims",
            "2",
            "--trials",
            "3",
            "--no-timestamp",
        ],
    ] {
        let first = run(&args);
        let second = run(&args);
        assert_eq!(first.status.code(), second.status.code());
        assert_eq!(
            stdout_str(&first),
            stdout_str(&second),
            "output of {args:?} is not deterministic"
        );
        assert!(!stdout_str(&first).is_empty());
    }
}

#[test]
fn timestamp_header_appears_only_by_default() {
    let with = stdout_str(&run(&["chsh"]));
    assert!(with.contains("# generated-unix "));
    let without = stdout_str(&run(&["chsh", "--no-timestamp"]));
    assert!(!without.contains("# generated-unix"));
    assert!(without.starts_with("# opmodel chsh\n"));
}

#[test]
fn json_envelope_has_schema_and_command() {
    let out = run(&["tomography", "--trials", "10", "--json", "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_str(&out);
    assert!(text.contains("\"schema\": \"opmodel/1\""));
    assert!(text.contains("\"command\": \"tomography\""));
    assert!(text.contains("\"failures\": 0"));
    assert!(!text.contains("unix_time"));

    let stamped = stdout_str(&run(&["tomography", "--trials", "10", "--json"]));
    assert!(stamped.contains("\"unix_time\""));
}

#[test]
fn malformed_map_files_exit_2_with_location() {
    let dir = tempfile::tempdir().unwrap();

    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, "{ \"schema\": \"opmodel/1\", \"source\": ").unwrap();
    let out = run(&["embed-check", "--map", broken.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_str(&out);
    assert!(
        err.contains("line") && err.contains("column"),
        "missing location: {err}"
    );

    let unknown_field = dir.path().join("extra.json");
    std::fs::write(
        &unknown_field,
        r#"{ "schema": "opmodel/1", "source": {"kind": "qubit"}, "target": {"kind": "qubit"},
            "matrix": [[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]], "surprise": true }"#,
    )
    .unwrap();
    let out = run(&["embed-check", "--map", unknown_field.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_str(&out).contains("surprise"));

    let wrong_schema = dir.path().join("schema.json");
    std::fs::write(
        &wrong_schema,
        r#"{ "schema": "opmodel/999", "source": {"kind": "qubit"}, "target": {"kind": "qubit"},
            "matrix": [[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]] }"#,
    )
    .unwrap();
    let out = run(&["embed-check", "--map", wrong_schema.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_str(&out).contains("unsupported schema"));

    let missing = dir.path().join("nope.json");
    let out = run(&["embed-check", "--map", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn effect_files_are_validated() {
    let dir = tempfile::tempdir().unwrap();

    // A projection along a tilted axis is accepted.
    let tilted = dir.path().join("tilted.json");
    std::fs::write(
        &tilted,
        r#"{ "schema": "opmodel/1", "a0": 1.0, "a": [0.6, 0.0, 0.8] }"#,
    )
    .unwrap();
    let out = run(&["mb", "--mesh", "64", "--effect", tilted.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));

    // A fuzzy effect is a valid effect but not a projection, so there is no
    // sharp lift to profile.
    let fuzzy = dir.path().join("fuzzy.json");
    std::fs::write(
        &fuzzy,
        r#"{ "schema": "opmodel/1", "a0": 1.0, "a": [0.2, 0.0, 0.3] }"#,
    )
    .unwrap();
    let out = run(&["mb", "--mesh", "64", "--effect", fuzzy.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_str(&out).contains("projection"));

    // Out-of-range coordinates are rejected as effects outright.
    let invalid = dir.path().join("invalid.json");
    std::fs::write(
        &invalid,
        r#"{ "schema": "opmodel/1", "a0": 3.0, "a": [0.0, 0.0, 0.0] }"#,
    )
    .unwrap();
    let out = run(&["mb", "--mesh", "64", "--effect", invalid.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    // Unknown fields are rejected like everywhere else.
    let extra = dir.path().join("extra.json");
    std::fs::write(
        &extra,
        r#"{ "schema": "opmodel/1", "a0": 1.0, "a": [0.0, 0.0, 1.0], "surprise": 1 }"#,
    )
    .unwrap();
    let out = run(&["mb", "--mesh", "64", "--effect", extra.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_str(&out).contains("surprise"));
}

#[test]
fn strict_tolerances_demote_verdicts_to_inconclusive() {
    // At an absurdly large tolerance no certificate margin is decisive any
    // more, so the not-good verdict degrades honestly instead of flipping.
    let out = run(&[
        "embed-check",
        "--preset",
        "sic",
        "--tol",
        "10",
        "--no-timestamp",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout_str(&out).contains("verdict: inconclusive"));

    // And a tolerance below float resolution cannot confirm a good verdict.
    let out = run(&[
        "embed-check",
        "--preset",
        "cayley",
        "--tol",
        "1e-18",
        "--no-timestamp",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout_str(&out).contains("verdict: inconclusive"));

    // The default tolerance leaves both presets decisive.
    assert_eq!(
        run(&["embed-check", "--preset", "cayley", "--tol", "1e-8"])
            .status
            .code(),
        Some(0)
    );
}

#[test]
fn a_valid_identity_map_file_is_good() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("identity.json");
    let mut f = std::fs::File::create(&path).unwrap();
    write!(
        f,
        r#"{{ "schema": "opmodel/1",
             "source": {{"kind": "qubit"}},
             "target": {{"kind": "qubit"}},
             "matrix": [[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]] }}"#
    )
    .unwrap();
    drop(f);
    let out = run(&[
        "embed-check",
        "--map",
        path.to_str().unwrap(),
        "--no-timestamp",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_str(&out).contains("verdict: good"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(
        run(&["ext-check", "--preset", "mb", "--mesh", "3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["mb", "--mesh", "2"]).status.code(), Some(2));
    assert_eq!(run(&["chsh", "--angles", "10,20"]).status.code(), Some(2));
    assert_eq!(run(&["chsh", "--angles", "a,b,c,d"]).status.code(), Some(2));
    assert_eq!(run(&["chsh", "--sweep", "0"]).status.code(), Some(2));
    assert_eq!(run(&["wigner", "--grid", "7"]).status.code(), Some(2));
    assert_eq!(
        run(&["wigner", "--state", "mixed", "--weight", "1.5"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["gleason-effects", "--dims", "1"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["mb", "--effect", "no-such-file.json"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["embed-check", "--preset", "cayley", "--tol=0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["embed-check", "--preset", "cayley", "--tol=nan"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(run(&["embed-check"]).status.code(), Some(2));
    // Conflicting selectors are refused, not silently resolved.
    assert_eq!(
        run(&["embed-check", "--preset", "sic", "--map", "x.json"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn seed_env_and_flag_precedence() {
    let env_run = |seed: &str, args: &[&str]| -> String {
        let out = bin()
            .env("OPMODEL_SEED", seed)
            .args(args)
            .output()
            .expect("binary runs");
        stdout_str(&out)
    };
    let args = ["chsh", "--sweep", "500", "--no-timestamp"];

    let a = env_run("11", &args);
    let b = env_run("11", &args);
    let c = env_run("22", &args);
    assert_eq!(a, b, "same env seed must reproduce");
    assert_ne!(a, c, "different env seeds must change the sweep");

    // An explicit flag wins over the environment.
    let flagged = bin()
        .env("OPMODEL_SEED", "22")
        .args(args)
        .arg("--seed")
        .arg("11")
        .output()
        .unwrap();
    assert_eq!(stdout_str(&flagged), a);

    // A malformed environment seed is a usage error.
    let bad = bin()
        .env("OPMODEL_SEED", "zzz")
        .args(["tomography"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(stderr_str(&bad).contains("OPMODEL_SEED"));
}

#[test]
fn csv_outputs_are_written_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();

    let wigner_csv = dir.path().join("table.csv");
    let out = run(&[
        "wigner",
        "--state",
        "mixed",
        "--weight",
        "0.75",
        "--grid",
        "64",
        "--out",
        wigner_csv.to_str().unwrap(),
        "--no-timestamp",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let table = std::fs::read_to_string(&wigner_csv).unwrap();
    let mut lines = table.lines();
    assert_eq!(lines.next(), Some("q,p,value"));
    assert_eq!(table.lines().count(), 64 * 64 + 1);
    // A three-to-one excited mixture keeps a genuinely negative region.
    assert!(stdout_str(&out).contains("minimum entry: -0.159"));

    let mb_csv = dir.path().join("hist.csv");
    let first = run(&[
        "mb",
        "--mesh",
        "100",
        "--csv",
        mb_csv.to_str().unwrap(),
        "--no-timestamp",
    ]);
    assert_eq!(first.status.code(), Some(0));
    let hist_a = std::fs::read_to_string(&mb_csv).unwrap();
    let second = run(&[
        "mb",
        "--mesh",
        "100",
        "--csv",
        mb_csv.to_str().unwrap(),
        "--no-timestamp",
    ]);
    assert_eq!(second.status.code(), Some(0));
    let hist_b = std::fs::read_to_string(&mb_csv).unwrap();
    assert_eq!(hist_a, hist_b);
    assert_eq!(hist_a.lines().next(), Some("bin_low,bin_high,count"));
    assert_eq!(hist_a.lines().count(), 11);
    // The equal-area mesh spreads the lift uniformly, ten points per decile.
    let counts: Vec<&str> = hist_a
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap())
        .collect();
    assert_eq!(counts, vec!["10"; 10]);
}

#[test]
fn angle_presets_reach_the_ceiling() {
    let out = run(&["chsh", "--angles", "0,90,45,135", "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_str(&out);
    assert!(text.contains("s value: 2.82842712"));
    assert!(text.contains("exceeds sign bound: true"));

    let tame = stdout_str(&run(&["chsh", "--angles", "0,0,0,0", "--no-timestamp"]));
    assert!(tame.contains("s value: 2\n"));
    assert!(tame.contains("exceeds sign bound: false"));

    // Perpendicular pairs sit exactly at the sign-combination bound too.
    let perp = stdout_str(&run(&["chsh", "--angles", "0,90,0,90", "--no-timestamp"]));
    assert!(perp.contains("s value: 2\n"));
    assert!(perp.contains("exceeds sign bound: false"));

    // Naming the default geometry explicitly changes nothing.
    let named = run(&["chsh", "--preset", "tsirelson", "--no-timestamp"]);
    assert_eq!(named.status.code(), Some(0));
    assert_eq!(
        stdout_str(&named),
        stdout_str(&run(&["chsh", "--no-timestamp"]))
    );
    let clash = run(&["chsh", "--preset", "tsirelson", "--angles", "0,90,45,135"]);
    assert_eq!(clash.status.code(), Some(2));
}
