use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lightcone")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

#[test]
fn member_examples() {
    let o = run(&["member", "--envelope", "mu-cone", "--mu", "1", "--z", "2,0;0,1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["verdict"], "inside");
    let o = run(&["member", "--envelope", "shell", "--m", "1", "--z", "0.5,0;0,0"]);
    assert_eq!(json(&o)["verdict"], "excluded");
    let o = run(&["member", "--region", r#"{"type":"DoubleCone","a":[-1,0],"b":[0,0]}"#, "--p", "-0.5,0"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["verdict"], "inside");
    assert!(v["margin"].as_f64().unwrap() > 0.0);
}

#[test]
fn region_points_with_imaginary_part_use_the_search() {
    let o = run(&["member", "--region", r#"{"type":"MuCone","mu":1}"#, "--z", "0.5,0;0,1"]);
    assert_eq!(json(&o)["verdict"], "excluded");
    let o = run(&["member", "--region", r#"{"type":"MuCone","mu":1}"#, "--z", "0.5,0;1,0"]);
    assert_eq!(json(&o)["verdict"], "inside");
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["member", "--region", r#"{"type":"Nope"}"#, "--p", "0,0"]).status.code(), Some(2));
    assert_eq!(run(&["member", "--envelope", "mu-cone", "--z", "1,0"]).status.code(), Some(2));
    assert_eq!(run(&["member", "--envelope", "mu-cone", "--mu", "1", "--z", "1;0"]).status.code(), Some(2));
    assert_eq!(run(&["slice", "--envelope", "shell", "--m", "1", "--res", "1"]).status.code(), Some(2));
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
    let o = run(&["member", "--envelope", "extension", "--a", "1", "--c=-0.5,-0.1", "--d", "1,0.2", "--p", "0,0.1"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(run(&["continue", "--nodes", "96"]).status.code(), Some(1));
    assert_eq!(run(&["oracle", "nope"]).status.code(), Some(2));
}

#[test]
fn slice_examples() {
    let o = run(&[
        "slice",
        "--envelope",
        "band",
        "--m1",
        "1",
        "--m2",
        "3",
        "--y",
        "0,0.5",
        "--x0",
        "-2,2",
        "--x1",
        "-2,2",
        "--res",
        "5",
        "--format",
        "csv",
    ]);
    let s = stdout(&o);
    let mut lines = s.lines();
    assert_eq!(lines.next(), Some("x0,x1,verdict,margin"));
    assert_eq!(s.lines().count(), 26);
    assert!(s.lines().any(|l| l.starts_with("2.0,0.0,inside,")), "{s}");

    let o = run(&[
        "slice",
        "--envelope",
        "mu-cone",
        "--mu",
        "1",
        "--y",
        "0,1",
        "--x0",
        "-2,2",
        "--x1",
        "-1,1",
        "--res",
        "5",
        "--format",
        "csv",
    ]);
    for l in stdout(&o).lines().skip(1) {
        let f: Vec<&str> = l.split(',').collect();
        let x0: f64 = f[0].parse().unwrap();
        let want = if x0 == 1.0 {
            "boundary"
        } else if x0 > 1.0 {
            "inside"
        } else {
            "excluded"
        };
        assert_eq!(f[2], want, "{l}");
    }

    // at y = 0 the slice is the region itself
    let r = r#"{"type":"DoubleCone","a":[-1,0],"b":[1,0]}"#;
    let o = run(&["slice", "--region", r, "--x0", "-1.5,1.5", "--x1", "-1.5,1.5", "--res", "7", "--format", "json"]);
    let v = json(&o);
    for cell in v.as_array().unwrap() {
        let (t, x) = (cell["x0"].as_f64().unwrap(), cell["x1"].as_f64().unwrap());
        let inside = t.abs() + x.abs() < 1.0;
        assert_eq!(cell["verdict"] == "inside", inside, "{cell}");
    }
}

#[test]
fn output_is_deterministic() {
    let args = [
        "slice",
        "--region",
        r#"{"type":"MuCone","mu":1}"#,
        "--y",
        "0,0.7",
        "--res",
        "6",
        "--format",
        "csv",
        "--seed",
        "3",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    let dir = std::env::temp_dir().join(format!("lightcone-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("slice.csv");
    let mut with_out = args.to_vec();
    let p = path.to_str().unwrap();
    with_out.extend(["--out", p]);
    let c = Command::new(env!("CARGO_BIN_EXE_lightcone"))
        .args(&with_out)
        .env("LIGHTCONE_ENV_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(c.status.code(), Some(0));
    assert!(c.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), a.stdout);
    std::fs::remove_dir_all(&dir).unwrap();

    let o1 = run(&["oracle", "pflug", "--n", "500", "--seed", "9"]);
    let o2 = run(&["oracle", "pflug", "--n", "500", "--seed", "9"]);
    assert_eq!(o1.stdout, o2.stdout);
}

#[test]
fn thread_variable_is_validated() {
    let o = Command::new(env!("CARGO_BIN_EXE_lightcone"))
        .args(["massgap", "--m", "1", "--m1", "2"])
        .env("LIGHTCONE_ENV_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn massgap_examples() {
    let v = json(&run(&["massgap", "--m", "1", "--m1", "2", "--theta", "2"]));
    let w = v["witness"].as_array().unwrap();
    assert!((w[0].as_f64().unwrap() + 1.762196).abs() < 1e-6);
    assert!((w[1].as_f64().unwrap() + 3.626860).abs() < 1e-6);
    assert!((v["q_square"].as_f64().unwrap() - (5.0 - 4.0 * 2f64.cosh())).abs() < 1e-12);

    let v = json(&run(&["massgap", "--m", "1", "--m1", "2"]));
    assert!(v["q_square"].as_f64().unwrap() < 0.0);
    let v = json(&run(&["massgap", "--m", "1", "--m1", "inf"]));
    assert!(v["witness"].is_null());
    let v = json(&run(&["massgap", "--m", "2", "--m1", "3", "--s", "1,0"]));
    assert!(v["q_square"].as_f64().unwrap() < 0.0);
    assert_eq!(run(&["massgap", "--m", "2", "--m1", "1"]).status.code(), Some(2));
}

#[test]
fn oracle_examples() {
    let o = run(&["oracle", "mu-cone", "--n", "1000", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["passed"], true);
    assert_eq!(v["config_digest"].as_str().unwrap().len(), 64);
    assert!(v.get("wall_time_s").is_none());
    let o = run(&["oracle", "inversion", "--n", "100000"]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["oracle", "band-boundary", "--grid", "50"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(json(&o)["checks"][0]["max_deviation"].as_f64().unwrap() <= 1e-6);
    let o = run(&["oracle", "massgap", "--timing", "--format", "csv"]);
    assert!(stdout(&o).starts_with("suite,passed,checks,failures,max_deviation\nmassgap,true,"));
}

#[test]
fn transform_examples() {
    let v = json(&run(&["transform", "--z", "2,0"]));
    assert_eq!(v["image"]["re"][0].as_f64(), Some(-0.5));
    let v = json(&run(&["transform", "--map", "line", "--sigma", "0", "--c", "2", "--mu", "1"]));
    assert_eq!(v["center"][0].as_f64(), Some(1.0));
    assert_eq!(v["lam"].as_f64(), Some(1.0));
    assert_eq!(run(&["transform", "--z", "1,1"]).status.code(), Some(2));
}

#[test]
fn continue_runs_the_suite() {
    let o = run(&["continue"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert!(v["max_error"].as_f64().unwrap() <= 1e-6);
    assert!(v["doubling_ratio"].as_f64().unwrap() >= 4.0);
    assert_eq!(run(&["continue", "--slope", "1"]).status.code(), Some(2));
}
