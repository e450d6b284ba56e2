//! End-to-end checks of the command-line surface: output formats, exit
//! codes, and determinism of the report command.

use std::process::{Command, Output};

fn cellint(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cellint"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

#[test]
fn enumerate_8_json_has_17_lines() {
    let out = cellint(&["enumerate", "8", "--json"]);
    assert!(out.status.success());
    let lines: Vec<&str> = stdout(&out).lines().collect();
    assert_eq!(lines.len(), 17);
    let first: serde_json::Value = serde_json::from_str(lines[0]).unwrap();
    assert_eq!(first["n"], 8);
    assert!(first["rep"].is_string());
    assert!(first["dual_rep"].is_string());
    assert!(first["self_dual"].is_boolean());
}

#[test]
fn enumerate_text_format() {
    let out = cellint(&["enumerate", "5"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let line = text.lines().next().unwrap();
    assert!(line.starts_with("5;"), "line = {line}");
    let word = line.split(';').nth(1).unwrap();
    assert_eq!(word.split(',').count(), 5);
}

#[test]
fn convergent_witness_message() {
    let out = cellint(&["convergent", "2,4,1,3,6,8,5,7"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "false (witness block {1,2,3,4})");
    let out = cellint(&["convergent", "5,2,4,1,3"]);
    assert_eq!(stdout(&out).trim(), "true");
}

#[test]
fn dual_command() {
    let a = cellint(&["dual", "7,2,4,1,6,3,5"]);
    let b = cellint(&["classify", "7,2,5,1,4,6,3"]);
    let dual_rep = stdout(&a).trim().to_string();
    assert!(stdout(&b).contains(&format!("class   {dual_rep}")));
}

#[test]
fn eval_then_fit_roundtrip() {
    // eval n=5, N=3 at 40 digits, then fit over {1, zeta2}: the Apery pair
    // (b_3, -a_3) = (8705/36, -147).
    let out = cellint(&["eval", "--config", "5,2,4,1,3", "--n-power", "3", "--digits", "40", "--json"]);
    assert!(out.status.success(), "eval failed: {}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    let value = v["value"].as_str().unwrap();
    let out = cellint(&["fit", "--value", value, "--basis", "1,zeta2", "--digits", "40", "--json"]);
    assert!(out.status.success(), "fit failed: {}", String::from_utf8_lossy(&out.stderr));
    let f: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    let coeffs: Vec<&str> =
        f["coeffs"].as_array().unwrap().iter().map(|c| c.as_str().unwrap()).collect();
    assert_eq!(coeffs, vec!["8705/36", "-147"]);
}

#[test]
fn report_appendix2_is_byte_identical_across_runs() {
    for n in ["5", "6", "7", "8"] {
        let a = cellint(&["report-appendix2", n]);
        let b = cellint(&["report-appendix2", n]);
        assert!(a.status.success());
        assert_eq!(stdout(&a), stdout(&b), "report n={n} not deterministic");
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn mc_deterministic_under_seed() {
    let args = ["mc", "--config", "7,2,4,1,6,3,5", "--samples", "65536", "--seed", "9"];
    let a = cellint(&args);
    let b = cellint(&args);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn exit_codes() {
    // Usage error: unknown flag.
    let out = cellint(&["enumerate", "--bogus"]);
    assert_eq!(out.status.code(), Some(1));
    // Precondition violation: evaluating a divergent configuration.
    let out = cellint(&["eval", "--config", "1,2,3,4,5", "--digits", "15"]);
    assert_eq!(out.status.code(), Some(2));
    // Refused fit: precision below the floor for the basis size.
    let out = cellint(&["fit", "--value", "1.5", "--basis", "1,zeta2", "--digits", "12"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn product_command_reproduces_8pi1() {
    let out = cellint(&[
        "product",
        "--pair1", "1,2,3,4,5;2,4,1,3,5",
        "--pair2", "11,12,13,14,15,16;16,12,14,11,15,13",
        "--t1", "3,4,5",
        "--t2", "14,11,15",
        "--check-pullback", "1",
        "--json",
    ]);
    assert!(out.status.success(), "product failed: {}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    let class = v["class"].as_str().unwrap();
    // Same class as the first n=8 entry.
    let reference = cellint(&["classify", "8,2,4,1,5,7,3,6", "--json"]);
    let r: serde_json::Value = serde_json::from_str(stdout(&reference).trim()).unwrap();
    assert_eq!(class, r["rep"].as_str().unwrap());
    assert!(v["pullback_sign"].as_i64().is_some());
}

#[test]
fn integrand_text_contains_factors() {
    let out = cellint(&["integrand", "5,2,4,1,3", "--frame", "cubical", "--n-power", "2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("(1-x1..x2)"), "text = {text}");
}

#[test]
fn recur_zeta3_terms_and_diagnostics() {
    let out = cellint(&["recur", "zeta3", "--terms", "3", "--diagnostics", "--digits", "40"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("a = 73"), "missing a_2: {text}");
    assert!(text.contains("e^3 epsilon"), "missing diagnostics: {text}");
    assert!(text.contains("< 1: true"));
}

#[test]
fn discover_from_stdin() {
    use std::io::Write;
    use std::process::Stdio;
    // Feed the squares of a geometric sequence: u_{n+1} - 4 u_n = 0.
    let mut child = Command::new(env!("CARGO_BIN_EXE_cellint"))
        .args(["discover", "--order", "1", "--degree", "0"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let terms: Vec<String> = (0..12u32).map(|k| 4u64.pow(k).to_string()).collect();
    child.stdin.as_mut().unwrap().write_all(terms.join("\n").as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("p_0") && text.contains("p_1"), "{text}");
}
