use std::fs;
use std::path::Path;

use tempfile::TempDir;
use worstcase::cli::run_with;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("worstcase").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn field(out: &str, key: &str) -> String {
    out.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no {key} in {out}"))
        .to_string()
}

fn num(out: &str, key: &str) -> f64 {
    field(out, key).parse().unwrap()
}

fn preset(dir: &Path, name: &str) -> String {
    let path = dir.join(format!("{name}.csv"));
    let p = path.to_str().unwrap().to_string();
    assert_eq!(run(&["preset", "--name", name, "--out", &p]).0, 0);
    p
}

#[test]
fn vk_reports_closed_form() {
    let dir = TempDir::new().unwrap();
    let s = preset(dir.path(), "burg2r");
    let (code, out, _) = run(&["vk", "--scenario", &s, "--divergence", "burg", "--k", "1.0"]);
    assert_eq!(code, 0);
    assert!((num(&out, "v") - (-1.5f64).exp()).abs() < 1e-5);
    assert_eq!(field(&out, "is_density"), "false");
    let (_, out, _) = run(&["vk", "--scenario", &s, "--divergence", "burg"]);
    assert_eq!(out, "k_max=inf\n");
}

#[test]
fn classify_reports_threshold() {
    let dir = TempDir::new().unwrap();
    let s = preset(dir.path(), "burg2r");
    let (code, out, _) = run(&["classify", "--scenario", &s, "--divergence", "burg", "--k", "0.1"]);
    assert_eq!(code, 0);
    assert_eq!(field(&out, "regime"), "CRITICAL");
    assert!((num(&out, "k_critical") - (2f64.ln() - 0.5)).abs() < 1e-6);
    assert_eq!(field(&out, "wcd_at_k"), "true");

    let s = preset(dir.path(), "never-breg");
    let (_, out, _) = run(&["classify", "--scenario", &s, "--divergence", "burg", "--bregman"]);
    assert_eq!(field(&out, "regime"), "NEVER_WCD_OBSERVED");
}

#[test]
fn single_atom_file_is_rejected() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("one.csv");
    fs::write(&path, "node_id,coordinate,weight,payoff,p0\na,0,1,0,1\n").unwrap();
    let (code, _, err) = run(&[
        "vk",
        "--scenario",
        path.to_str().unwrap(),
        "--divergence",
        "kl",
        "--k",
        "0.1",
    ]);
    assert_eq!(code, 1);
    assert!(err.contains("validation"));
}

#[test]
fn usage_errors_and_help() {
    assert_eq!(run(&["vk", "--divergence", "kl"]).0, 1);
    assert_eq!(run(&["vk", "--scenario", "x.csv", "--divergence", "tv"]).0, 1);
    assert_eq!(
        run(&["vk", "--scenario", "/nonexistent/x.csv", "--divergence", "kl"]).0,
        1
    );
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("gcurve"));
}

#[test]
fn wlambda_and_localiser() {
    let dir = TempDir::new().unwrap();
    let s = preset(dir.path(), "kl2pt");
    let (code, out, _) = run(&["wlambda", "--scenario", &s, "--divergence", "kl", "--lambda", "1"]);
    assert_eq!(code, 0);
    assert!((num(&out, "W") - 0.379885).abs() < 1e-6);

    let q = dir.path().join("q.csv");
    let (code, _, _) = run(&[
        "localiser",
        "--scenario",
        &s,
        "--divergence",
        "kl",
        "--k",
        "0.2",
        "--out",
        q.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let text = fs::read_to_string(&q).unwrap();
    assert!(text.starts_with("node_id,coordinate,q_hat\na,0,"));
    assert_eq!(text.lines().count(), 3);

    let (code, _, _) = run(&[
        "localiser",
        "--scenario",
        &s,
        "--divergence",
        "kl",
        "--k",
        "5",
        "--out",
        q.to_str().unwrap(),
    ]);
    assert_eq!(code, 1);
}

#[test]
fn certify_exit_codes() {
    let dir = TempDir::new().unwrap();
    let s = preset(dir.path(), "burg2r");
    let space = worstcase::io::parse_scenario(&fs::read_to_string(&s).unwrap()).unwrap();
    let p = dir.path().join("p.csv");
    fs::write(&p, worstcase::io::write_density(&space, space.default_density())).unwrap();
    let p = p.to_str().unwrap();
    let base = [
        "certify",
        "--scenario",
        &s,
        "--divergence",
        "burg",
        "--p",
        p,
        "--k",
        "1",
    ];
    let (code, out, _) = run(&[&base[..], &["--eps", "0.45", "--gamma", "0"]].concat());
    assert_eq!(code, 0);
    assert!((num(&out, "bregman_to_localiser") - 0.987793).abs() < 1e-4);
    assert!((num(&out, "bound") - 2.016760).abs() < 1e-5);
    assert_eq!(field(&out, "is_awcd"), "true");

    // ε = 0.1 gives bound 0.448 < B; p0 is then not an almost worst case.
    let (code, out, _) = run(&[&base[..], &["--eps", "0.1", "--gamma", "0"]].concat());
    assert_eq!(code, 3);
    assert_eq!(field(&out, "bound_holds"), "false");
    assert_eq!(field(&out, "is_awcd"), "false");
}

#[test]
fn curves_are_deterministic_and_convex() {
    let dir = TempDir::new().unwrap();
    let s = preset(dir.path(), "burg2r");
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let args = [
            "gcurve",
            "--scenario",
            &s,
            "--divergence",
            "burg",
            "--theta2-from",
            "-10",
            "--theta2-to",
            "1",
        ];
        let (code, stdout, _) = run(&[&args[..], &["--steps", "44", "--out", out.to_str().unwrap()]].concat());
        assert_eq!(code, 0);
        assert_eq!(stdout, "points=45\n");
    }
    let text = fs::read(&a).unwrap();
    assert_eq!(text, fs::read(&b).unwrap());
    assert!(String::from_utf8(text)
        .unwrap()
        .starts_with("theta2,G,theta1_star,case,mass,payoff_moment\n"));
    let (code, out, _) = run(&["check", "--curve", a.to_str().unwrap()]);
    assert_eq!((code, out.as_str()), (0, "points=45\nconvex=true\n"));

    let bad = dir.path().join("bad.csv");
    fs::write(
        &bad,
        "theta2,G,theta1_star,case,mass,payoff_moment\n-2,0,0,INTERIOR,1,0\n-1,5,0,INTERIOR,1,0\n0,0,0,INTERIOR,1,0\n",
    )
    .unwrap();
    let (code, out, _) = run(&["check", "--curve", bad.to_str().unwrap()]);
    assert_eq!(code, 3);
    assert!(out.contains("violation_at=-1"));

    let f = dir.path().join("f.csv");
    let args = [
        "fcurve",
        "--scenario",
        &s,
        "--divergence",
        "burg",
        "--b-from",
        "0.1",
        "--b-to",
        "0.6",
    ];
    let (code, _, _) = run(&[&args[..], &["--steps", "5", "--out", f.to_str().unwrap()]].concat());
    assert_eq!(code, 0);
    let text = fs::read_to_string(&f).unwrap();
    assert_eq!(text.lines().count(), 7);
    assert!(text.starts_with("b,F\n0.1,1.80258509"));
}
