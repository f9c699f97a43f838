use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;
use specdist::{line_triple, Algebra};
use specdist_cli::gen;
use specdist_cli::io::{matrix_from_json, CertificateFile, ProblemFile, SolverOverrides};

fn specdist(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_specdist"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut pipe = child.stdin.take().unwrap();
    pipe.write_all(stdin.unwrap_or("").as_bytes()).unwrap();
    drop(pipe);
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn real(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

const SIGMA_Z_PAIR: &str = r#"{
  "triple": {"n": 2, "N": 1, "algebra": "full",
             "L": [[[[1, 0], [0, 0]], [[0, 0], [-1, 0]]]]},
  "rho1": [[[1, 0], [0, 0]], [[0, 0], [0, 0]]],
  "rho2": [[[0, 0], [0, 0]], [[0, 0], [1, 0]]]
}"#;

#[test]
fn two_point_unit_scale() {
    let file = gen::two_point(1.0).unwrap().to_json();
    let out = specdist(&["distance", "-"], Some(&file));
    assert_eq!(out.status.code(), Some(0));
    let c = json(&out);
    assert_eq!(c["status"], "Converged");
    for key in ["lower", "upper"] {
        assert!((real(&c[key]) - 1.0).abs() <= 1e-6, "{key} = {}", c[key]);
    }
    assert_eq!(c["connected"], false);
    assert_eq!(c["kernel_dimension"], 2);
}

#[test]
fn generated_two_point_at_lambda_two() {
    let gen_out = specdist(&["gen", "two-point", "--lambda", "2"], None);
    assert_eq!(gen_out.status.code(), Some(0));
    let out = specdist(&["distance", "-"], Some(std::str::from_utf8(&gen_out.stdout).unwrap()));
    assert_eq!(out.status.code(), Some(0));
    let c = json(&out);
    assert!((real(&c["lower"]) - 0.5).abs() <= 1e-6);
    assert!((real(&c["upper"]) - 0.5).abs() <= 1e-6);
}

#[test]
fn equal_states_are_at_zero_distance() {
    let mut file: Value = serde_json::from_str(&gen::two_point(1.0).unwrap().to_json()).unwrap();
    file["rho2"] = file["rho1"].clone();
    let out = specdist(&["distance", "-"], Some(&file.to_string()));
    assert_eq!(out.status.code(), Some(0));
    let c = json(&out);
    assert_eq!(c["status"], "ZeroDistance");
    assert_eq!(real(&c["upper"]), 0.0);
}

#[test]
fn kernel_violation_exits_with_infinite() {
    let out = specdist(&["distance", "-"], Some(SIGMA_Z_PAIR));
    assert_eq!(out.status.code(), Some(2));
    let c = json(&out);
    assert_eq!(c["status"], "Infinite");
    assert!(c["lower"].is_null() && c["upper"].is_null());
    assert!(c["primal_witness"].is_null() && c["dual_witness"].is_null());
}

#[test]
fn iteration_cap_exits_with_max_iter() {
    let file = gen::random(5, 3, 11, Algebra::Full).unwrap().to_json();
    let out = specdist(&["distance", "-", "--max-iter", "2", "--tol", "1e-14"], Some(&file));
    assert_eq!(out.status.code(), Some(3));
    let c = json(&out);
    assert_eq!(c["status"], "MaxIter");
    assert_eq!(c["iterations"], 2);
    assert!(real(&c["lower"]) <= real(&c["upper"]));
}

#[test]
fn malformed_input_reports_position_and_field() {
    let bad = r#"{"triple": {"n": 2, "N": 1, "algebra": "full",
        "L": [[[[1, 0], [0, 0]], [[0, 0], [-1, "x"]]]]}}"#;
    let out = specdist(&["check", "-"], Some(bad));
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 2"), "{err}");
    assert!(err.contains("triple.L[0][1][1][1]"), "{err}");

    let mut nonhermitian: Value = serde_json::from_str(SIGMA_Z_PAIR).unwrap();
    nonhermitian["triple"]["L"][0][0][1] = serde_json::json!([1, 0]);
    let out = specdist(&["distance", "-"], Some(&nonhermitian.to_string()));
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("triple.L[0]"));

    let out = specdist(&["distance", "/nonexistent/problem.json"], None);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn invalid_state_is_rejected() {
    let mut file: Value = serde_json::from_str(SIGMA_Z_PAIR).unwrap();
    file["rho1"] = serde_json::json!([[[2, 0], [0, 0]], [[0, 0], [0, 0]]]);
    let out = specdist(&["distance", "-"], Some(&file.to_string()));
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("rho1"));
}

#[test]
fn random_generation_is_byte_identical() {
    let args = ["gen", "random", "--n", "4", "--N", "2", "--seed", "7"];
    let first = specdist(&args, None);
    let second = specdist(&args, None);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    let other = specdist(&["gen", "random", "--n", "4", "--N", "2", "--seed", "8"], None);
    assert_ne!(first.stdout, other.stdout);
}

#[test]
fn generated_random_problems_converge() {
    for (n, blocks, seed) in [(2, 2, 1), (4, 2, 7), (6, 3, 3), (8, 4, 5)] {
        let file = gen::random(n, blocks, seed, Algebra::Full).unwrap().to_json();
        let out = specdist(&["distance", "-"], Some(&file));
        assert_eq!(out.status.code(), Some(0), "n={n} N={blocks}");
        let c = json(&out);
        assert_eq!(c["connected"], true);
        let (lo, hi) = (real(&c["lower"]), real(&c["upper"]));
        assert!((hi - lo) / hi.max(1.0) <= 1e-7);
    }
}

#[test]
fn generated_line_matches_line_triple() {
    let out = specdist(
        &["gen", "line", "--positions", "0,1,3", "--mu", "1,0,0", "--nu", "0,0.5,0.5"],
        None,
    );
    assert_eq!(out.status.code(), Some(0));
    let file = ProblemFile::parse(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    let p = file.validate(&SolverOverrides::default()).unwrap();
    assert_eq!(p.triple, line_triple(&[0.0, 1.0, 3.0]).unwrap());
    // W1(δ₀, ½δ₁ + ½δ₃) = 2
    let out = specdist(&["distance", "-"], Some(std::str::from_utf8(&out.stdout).unwrap()));
    let c = json(&out);
    assert!((real(&c["lower"]) - 2.0).abs() <= 1e-6 && (real(&c["upper"]) - 2.0).abs() <= 1e-6);

    let out = specdist(&["gen", "line", "--positions", "0,1", "--mu", "1,0,0", "--nu", "0,1"], None);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn invalid_generator_parameters() {
    assert_eq!(specdist(&["gen", "two-point", "--lambda", "-1"], None).status.code(), Some(1));
    assert_eq!(specdist(&["gen", "random", "--n", "0", "--N", "2"], None).status.code(), Some(1));
    assert_eq!(specdist(&["gen", "line", "--positions", "0,0", "--mu", "1,0", "--nu", "0,1"], None).status.code(), Some(1));
}

#[test]
fn problem_files_round_trip_bit_exact() {
    for seed in 0..5 {
        let file = gen::random(3, 2, seed, Algebra::Full).unwrap();
        let text = file.to_json();
        let back = ProblemFile::parse(&text).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.to_json(), text);
        let p = back.validate(&SolverOverrides::default()).unwrap();
        let (a, _) = p.states.unwrap();
        let raw = matrix_from_json(file.rho1.as_ref().unwrap(), 3, "rho1").unwrap();
        for (x, y) in a.as_matrix().as_slice().iter().zip(raw.as_slice()) {
            assert_eq!(x.re.to_bits(), y.re.to_bits());
            assert_eq!(x.im.to_bits(), y.im.to_bits());
        }
    }
}

#[test]
fn certificates_round_trip_bit_exact() {
    let file = gen::random(4, 2, 3, Algebra::Full).unwrap().to_json();
    let out = specdist(&["distance", "-"], Some(&file));
    let text = std::str::from_utf8(&out.stdout).unwrap().trim_end();
    let cert = CertificateFile::parse(text).unwrap();
    assert_eq!(cert.to_json(), text);
    assert_eq!(CertificateFile::parse(&cert.to_json()).unwrap(), cert);

    let out = specdist(&["distance", "-"], Some(SIGMA_Z_PAIR));
    let text = std::str::from_utf8(&out.stdout).unwrap().trim_end();
    let cert = CertificateFile::parse(text).unwrap();
    assert_eq!(cert.upper.0, f64::INFINITY);
    assert_eq!(cert.to_json(), text);
}

#[test]
fn overrides_take_precedence_over_file_settings() {
    let mut file: Value = serde_json::from_str(&gen::random(4, 2, 2, Algebra::Full).unwrap().to_json()).unwrap();
    file["solver"] = serde_json::json!({"max_iter": 1});
    let text = file.to_string();
    assert_eq!(specdist(&["distance", "-", "--tol", "1e-14"], Some(&text)).status.code(), Some(3));
    let out = specdist(&["distance", "-", "--max-iter", "200000", "--anti-hermitian"], Some(&text));
    assert_eq!(out.status.code(), Some(0));
    file["solver"] = serde_json::json!({"tol_gap": -1.0});
    assert_eq!(specdist(&["distance", "-"], Some(&file.to_string())).status.code(), Some(1));
}

#[test]
fn check_reports_connectivity_and_gate() {
    let generic = gen::random(4, 2, 9, Algebra::Full).unwrap().to_json();
    let r = json(&specdist(&["check", "-"], Some(&generic)));
    assert_eq!(r["connected"], true);
    assert_eq!(r["kernel_dimension"], 1);
    assert_eq!(r["finite"], true);

    let mut sx: Value = serde_json::from_str(&gen::two_point(1.0).unwrap().to_json()).unwrap();
    sx.as_object_mut().unwrap().remove("rho1");
    sx.as_object_mut().unwrap().remove("rho2");
    let r = json(&specdist(&["check", "-"], Some(&sx.to_string())));
    assert_eq!(r["connected"], false);
    assert_eq!(r["kernel_dimension"], 2);
    assert!(r.get("finite").is_none());

    let out = specdist(&["check", "-"], Some(SIGMA_Z_PAIR));
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["finite"], false);
    assert!((real(&r["pairing"]) - 2.0).abs() <= 1e-12);
    let witness = &r["kernel_witness"];
    assert!((real(&witness[0][0][0]) - 1.0).abs() <= 1e-12);
    assert!((real(&witness[1][1][0]) + 1.0).abs() <= 1e-12);

    assert_eq!(specdist(&["check", "-"], Some("{")).status.code(), Some(1));
}

#[test]
fn w1_examples() {
    let d = |mu: &str, nu: &str| {
        let out = specdist(&["w1", mu, nu], None);
        assert_eq!(out.status.code(), Some(0));
        real(&json(&out)["distance"])
    };
    assert_eq!(d("[[0, 1]]", "[[1, 1]]"), 1.0);
    assert_eq!(d("[[0, 1]]", "[[-1, 0.5], [1, 0.5]]"), 1.0);
    assert_eq!(d("[[0, 0.25], [2, 0.75]]", "[[0, 0.25], [2, 0.75]]"), 0.0);
}

#[test]
fn w1_reads_files_and_dumps_the_potential() {
    let dir = tempfile::tempdir().unwrap();
    let mu = dir.path().join("mu.json");
    std::fs::write(&mu, "[[0, 0.5], [3, 0.5]]").unwrap();
    let pot = dir.path().join("phi.json");
    let out = specdist(
        &["w1", mu.to_str().unwrap(), "[[1, 1]]", "--potential", pot.to_str().unwrap()],
        None,
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(real(&json(&out)["distance"]), 1.5);
    let phi: Value = serde_json::from_str(&std::fs::read_to_string(&pot).unwrap()).unwrap();
    let breaks: Vec<f64> = phi["breakpoints"].as_array().unwrap().iter().map(real).collect();
    let slopes: Vec<f64> = phi["slopes"].as_array().unwrap().iter().map(real).collect();
    assert_eq!(breaks, [0.0, 1.0, 3.0]);
    assert_eq!(slopes, [1.0, -1.0]);
}

#[test]
fn w1_rejects_invalid_measures() {
    for (mu, nu) in [("[[0, -0.5], [1, 1.5]]", "[[0, 1]]"), ("[[0, 0.5]]", "[[0, 1]]"), ("[[0, 1]", "[[0, 1]]")] {
        assert_eq!(specdist(&["w1", mu, nu], None).status.code(), Some(1), "{mu}");
    }
}
