use std::process::{Command, Output};

fn genlag(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_genlag"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(o: &Output) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_reader(o.stdout.as_slice());
    r.records()
        .map(|rec| rec.unwrap().iter().map(str::to_string).collect())
        .collect()
}

#[test]
fn eval_ground_state_matches_closed_value() {
    let o = genlag(&[
        "eval", "--family", "2", "--j", "0", "--mu", "2", "--nu", "-1", "--x", "1.0",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("i,j,mu,nu,x,value\n"));
    let rows = csv_rows(&o);
    assert_eq!(rows.len(), 1);
    let v: f64 = rows[0][5].parse().unwrap();
    let expect = std::f64::consts::PI.sqrt() / 2.0 * (-1.0f64).exp();
    assert!((v - expect).abs() <= 1e-14 * expect, "{v} vs {expect}");
}

#[test]
fn norms_suite_gives_five_passing_rows() {
    let o = genlag(&[
        "verify", "--suite", "norms", "--mu", "2", "--nu", "-1", "--jmax", "4",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&o);
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r[4] == "true"));
}

#[test]
fn registry_family_two_lists_four_algebras() {
    let o = genlag(&["registry", "--list", "--family", "II"]);
    assert_eq!(o.status.code(), Some(0));
    let labels: Vec<String> = csv_rows(&o).into_iter().map(|r| r[0].clone()).collect();
    assert_eq!(labels, ["II.2", "II.3", "II.4", "II.5"]);
}

#[test]
fn floats_carry_seventeen_significant_digits() {
    let o = genlag(&[
        "eval", "--family", "1", "--j", "2", "--mu", "1", "--nu", "-1", "--x", "0.3,2.5",
    ]);
    for r in csv_rows(&o) {
        let mantissa = r[5].split('e').next().unwrap().replace(['-', '.'], "");
        assert_eq!(mantissa.len(), 17, "{}", r[5]);
    }
}

#[test]
fn output_is_byte_identical_across_runs() {
    let args = ["verify", "--suite", "rank2", "--seed", "7"];
    let a = genlag(&args);
    let b = genlag(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let args = ["verify", "--suite", "eigen", "--workers", "3"];
    assert_eq!(
        genlag(&args).stdout,
        genlag(&["verify", "--suite", "eigen", "--workers", "1"]).stdout
    );
}

#[test]
fn validation_errors_exit_with_two() {
    let cases: [&[&str]; 5] = [
        &[
            "eval", "--family", "2", "--j", "0", "--mu", "2", "--nu", "-1", "--x", "-1",
        ],
        &[
            "eval", "--family", "2", "--j", "0", "--mu", "-2", "--nu", "-1", "--x", "1",
        ],
        &["verify", "--suite", "closed", "--mu", "1", "--nu", "1"],
        &["verify", "--suite", "nonsense"],
        &[
            "transform",
            "--mu",
            "1",
            "--nu",
            "0",
            "--input-profile",
            "expr",
            "--x",
            "1",
        ],
    ];
    for args in cases {
        assert_eq!(genlag(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn json_rows_keep_column_order() {
    let o = genlag(&[
        "rank2",
        "--p",
        "2",
        "--q",
        "4",
        "--check",
        "intertwiner",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let first = v.as_array().unwrap()[0].as_object().unwrap();
    let keys: Vec<&str> = first.keys().map(String::as_str).collect();
    assert_eq!(keys, ["check_id", "params", "residual", "tol", "pass"]);
}

#[test]
fn transform_of_lambda_profile_is_an_eigenfunction() {
    let o = genlag(&[
        "transform",
        "--mu",
        "1",
        "--nu",
        "-1",
        "--input-profile",
        "lambda2:1",
        "--x",
        "0.7,1.9",
    ]);
    assert_eq!(o.status.code(), Some(0));
    for r in csv_rows(&o) {
        let x: f64 = r[0].parse().unwrap();
        let tf: f64 = r[1].parse().unwrap();
        let e = genlag(&[
            "eval", "--family", "2", "--j", "1", "--mu", "1", "--nu", "-1", "--x", &r[0],
        ]);
        let f: f64 = csv_rows(&e)[0][5].parse().unwrap();
        assert!(
            (tf + f).abs() <= 1e-8 * f.abs().max(1.0),
            "x={x}: {tf} vs {}",
            -f
        );
    }
}

#[test]
fn expr_profile_matches_direct_transform() {
    let a = genlag(&[
        "transform",
        "--mu",
        "1",
        "--nu",
        "-1",
        "--input-profile",
        "expr",
        "--expr",
        "y * math::exp(-y)",
        "--x",
        "0.5",
    ]);
    let v: f64 = csv_rows(&a)[0][1].parse().unwrap();
    let x: f64 = 0.5;
    let expect = (-x).exp() * (2.0 - x);
    assert!((v - expect).abs() <= 1e-8, "{v} vs {expect}");
}
