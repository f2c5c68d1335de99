use bikegeo_cli::args::parse_config;
use bikegeo_cli::config::{Command as Cmd, Format, RunConfig};
use bikegeo_cli::export::{Cell, Table};
use proptest::prelude::*;
use proptest::test_runner::RngSeed;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bikegeo(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bikegeo"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("BIKEGEO_OUT")
        .output()
        .unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap()
}

fn column(t: &Table, name: &str) -> Vec<Cell> {
    let j = t.columns.iter().position(|c| c == name).unwrap();
    t.rows.iter().map(|r| r[j].clone()).collect()
}

fn float(c: &Cell) -> f64 {
    match c {
        Cell::Float(x) => *x,
        Cell::Int(i) => *i as f64,
        other => panic!("not numeric: {other:?}"),
    }
}

#[test]
fn config_round_trips_through_json() {
    let mut cfg = RunConfig::new(Cmd::Correspond);
    cfg.curve = Some("ellipse:a=2,b=1".into());
    cfg.ell = vec![0.1, 1.0 / 3.0, std::f64::consts::PI];
    cfg.lambda = vec![-0.7, 1e-300];
    cfg.k = Some(2);
    cfg.n = Some(5);
    cfg.tol = 1.234_567_890_123_456_7e-9;
    cfg.seed = u64::MAX;
    cfg.format = Format::Json;
    let back = RunConfig::from_json(&cfg.to_json()).unwrap();
    assert_eq!(back, cfg);
    assert!(RunConfig::from_json("{\"command\":\"fly\"}").is_err());
}

#[test]
fn validation_rejects_bad_numbers() {
    let ok = RunConfig::new(Cmd::Simulate);
    assert!(ok.validate().is_ok());
    let cases: Vec<Box<dyn Fn(&mut RunConfig)>> = vec![
        Box::new(|c| c.ell = vec![1.0, -1.0]),
        Box::new(|c| c.ell = vec![f64::NAN]),
        Box::new(|c| c.eps = vec![0.0]),
        Box::new(|c| c.lambda = vec![f64::INFINITY]),
        Box::new(|c| c.samples = 3),
        Box::new(|c| c.tol = 0.0),
        Box::new(|c| c.folds = 0),
        Box::new(|c| {
            c.k = Some(2);
            c.n = Some(4)
        }),
        Box::new(|c| {
            c.k = Some(4);
            c.n = Some(4)
        }),
        Box::new(|c| {
            c.curve = Some("circle".into());
            c.curve_file = Some("x.csv".into())
        }),
    ];
    for f in cases {
        let mut c = ok.clone();
        f(&mut c);
        assert!(c.validate().is_err(), "{c:?}");
    }
}

#[test]
fn argv_parses_into_config() {
    let cfg = parse_config(["bikegeo", "correspond", "--ell", "0.5,1.5", "--lambda", "-0.3,0.7", "--k", "1", "--n", "4", "--format", "json", "--out", "x"]).unwrap();
    assert_eq!(cfg.command, Cmd::Correspond);
    assert_eq!(cfg.ell, vec![0.5, 1.5]);
    assert_eq!(cfg.lambda, vec![-0.3, 0.7]);
    assert_eq!((cfg.k, cfg.n), (Some(1), Some(4)));
    assert_eq!(cfg.format, Format::Json);
    assert_eq!(cfg.samples, 1024);
    assert_eq!(cfg.tol, 1e-6);
    assert!(parse_config(["bikegeo", "simulate", "--nope"]).is_err());
    assert!(parse_config(["bikegeo", "fly"]).is_err());
    assert!(parse_config(["bikegeo", "simulate", "--format", "xml"]).is_err());
}

#[test]
fn empty_table_is_header_only() {
    let t = Table::new(&["a", "b"]);
    assert_eq!(t.to_csv(), "a,b\n");
    let back = Table::from_csv(&t.to_csv()).unwrap();
    assert!(back.rows.is_empty() && back.columns == t.columns);
    assert!(Table::from_json(&t.to_json()).unwrap().same(&t));
}

#[test]
fn mixed_record_shapes_are_rejected() {
    let mut t = Table::new(&["a", "b"]);
    t.push(vec![1.0.into(), 2.0.into()]).unwrap();
    assert!(t.push(vec![1.0.into()]).is_err());
    assert!(t.push(vec![1.0.into(), "x".into()]).is_err());
}

#[test]
fn floats_print_with_seventeen_significant_digits() {
    let mut t = Table::new(&["x"]);
    t.push(vec![0.1.into()]).unwrap();
    assert_eq!(t.to_csv(), "x\n1.0000000000000001e-1\n");
}

fn arb_table() -> impl Strategy<Value = Table> {
    let cell = prop_oneof![
        any::<f64>().prop_map(Cell::Float),
        any::<i64>().prop_map(Cell::Int),
        any::<bool>().prop_map(Cell::Bool),
        "s[a-z ]{0,8}".prop_map(Cell::Text),
    ];
    (1usize..5, 0usize..6).prop_flat_map(move |(w, h)| {
        let kinds = prop::collection::vec(0u8..4, w);
        (kinds, prop::collection::vec(prop::collection::vec(cell.clone(), w), h))
    })
    .prop_map(|(kinds, rows)| {
        let cols: Vec<String> = (0..kinds.len()).map(|i| format!("c{i}")).collect();
        let mut t = Table::new(&cols);
        for row in rows {
            let fixed: Vec<Cell> = row
                .into_iter()
                .zip(&kinds)
                .enumerate()
                .map(|(i, (c, k))| match (k, c) {
                    (0, Cell::Float(x)) => Cell::Float(x),
                    (0, _) => Cell::Float(i as f64 + 0.25),
                    (1, Cell::Int(x)) => Cell::Int(x),
                    (1, _) => Cell::Int(i as i64),
                    (2, Cell::Bool(x)) => Cell::Bool(x),
                    (2, _) => Cell::Bool(true),
                    (_, Cell::Text(s)) => Cell::Text(s),
                    (_, _) => Cell::Text("t".into()),
                })
                .collect();
            t.push(fixed).unwrap();
        }
        t
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, rng_seed: RngSeed::Fixed(5), failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn csv_and_json_round_trip_bit_exactly(t in arb_table()) {
        let csv = Table::from_csv(&t.to_csv()).unwrap();
        prop_assert!(csv.same(&t));
        let json = Table::from_json(&t.to_json()).unwrap();
        prop_assert!(json.same(&t));
        let cross = Table::from_csv(&Table::from_json(&csv.to_json()).unwrap().to_csv()).unwrap();
        prop_assert!(cross.same(&t));
    }
}

#[test]
fn help_lists_every_flag() {
    for sub in ["simulate", "monodromy", "planimeter", "correspond", "zindler", "integrals", "akns", "wegner", "rolling", "selftest"] {
        let out = Command::new(env!("CARGO_BIN_EXE_bikegeo")).args([sub, "--help"]).output().unwrap();
        assert!(out.status.success());
        let text = String::from_utf8(out.stdout).unwrap();
        for flag in ["--curve", "--curve-file", "--folds", "--ell", "--eps", "--lambda", "--k", "--n", "--samples", "--tol", "--out", "--seed", "--format"] {
            assert!(text.contains(&format!("{flag} ")) || text.contains(&format!("{flag}\n")), "{sub} help lacks {flag}");
        }
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(bikegeo(&["simulate", "--bogus"], dir.path()).status.code(), Some(2));
    assert_eq!(bikegeo(&["simulate", "--ell", "-1"], dir.path()).status.code(), Some(2));
    assert_eq!(bikegeo(&["simulate", "--curve", "spiral"], dir.path()).status.code(), Some(2));
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "t,x1,x2\n0,1\n").unwrap();
    assert_eq!(bikegeo(&["simulate", "--curve-file", bad.to_str().unwrap()], dir.path()).status.code(), Some(2));
    assert_eq!(bikegeo(&["simulate", "--curve-file", "/nonexistent/curve.csv"], dir.path()).status.code(), Some(2));
    let out = bikegeo(&["rolling", "--curve", "circle", "--ell", "0.8"], &dir.path().join("ok"));
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn contraction_failure_exits_with_numerical_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = bikegeo(&["integrals", "--curve", "circle", "--ell", "0.2,1.5"], dir.path());
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("env-out");
    let out = Command::new(env!("CARGO_BIN_EXE_bikegeo"))
        .args(["zindler", "--k", "1", "--n", "3"])
        .env("BIKEGEO_OUT", &target)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(target.join("zindler.csv").exists());
    let flag = dir.path().join("flag-out");
    let out = Command::new(env!("CARGO_BIN_EXE_bikegeo"))
        .args(["zindler", "--k", "1", "--n", "3", "--out", flag.to_str().unwrap()])
        .env("BIKEGEO_OUT", &target)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(flag.join("zindler.csv").exists());
}

#[test]
fn monodromy_of_triple_circle_at_exceptional_length() {
    let dir = tempfile::tempdir().unwrap();
    let ell = format!("{}", 2.0 / 3f64.sqrt());
    let out = bikegeo(&["monodromy", "--curve", "circle", "--folds", "3", "--ell", &format!("0.5,1,{ell}")], dir.path());
    assert!(out.status.success());
    let t = Table::from_csv(&read(dir.path(), "monodromy.csv")).unwrap();
    let classes: Vec<Cell> = column(&t, "class");
    assert_eq!(classes, vec![Cell::Text("hyperbolic".into()), Cell::Text("parabolic".into()), Cell::Text("elliptic".into())]);
    let tr = float(&column(&t, "trace_re")[2]);
    assert!(tr.abs() < 1e-6, "half-turn rotation expected, trace {tr}");
    assert!(read(dir.path(), "monodromy_report.json").contains("\"class\""));
}

#[test]
fn zindler_one_four_roots() {
    let dir = tempfile::tempdir().unwrap();
    let out = bikegeo(&["zindler", "--k", "1", "--n", "4", "--format", "json"], dir.path());
    assert!(out.status.success());
    let rep: serde_json::Value = serde_json::from_str(&read(dir.path(), "zindler_report.json")).unwrap();
    let rho: Vec<f64> = rep["rotation_numbers"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert_eq!(rho.len(), 2);
    assert!((rho[0] - 0.366).abs() < 5e-4 && (rho[1] - 0.634).abs() < 5e-4, "{rho:?}");
    assert!(rep["certificates"].as_array().unwrap().iter().all(|c| c["passed"] == true));
    let t = Table::from_json(&read(dir.path(), "zindler.json")).unwrap();
    assert_eq!(t.rows.len(), 2);
}

#[test]
fn rotation_number_table_matches_published_values() {
    let dir = tempfile::tempdir().unwrap();
    assert!(bikegeo(&["zindler"], dir.path()).status.success());
    let t = Table::from_csv(&read(dir.path(), "zindler_table.csv")).unwrap();
    let published: [(i64, i64, &[f64]); 11] = [
        (1, 3, &[0.5]),
        (1, 4, &[0.37]),
        (1, 5, &[0.29, 0.5]),
        (2, 5, &[0.31]),
        (3, 5, &[0.5]),
        (1, 6, &[0.24, 0.41]),
        (1, 7, &[0.21, 0.35, 0.5]),
        (2, 7, &[0.21, 0.37]),
        (3, 7, &[0.23, 0.5]),
        (4, 7, &[0.35]),
        (5, 7, &[0.5]),
    ];
    for (k, n, want) in published {
        let got: Vec<f64> = t
            .rows
            .iter()
            .filter(|r| r[0] == Cell::Int(k) && r[1] == Cell::Int(n))
            .map(|r| float(&r[3]))
            .filter(|r| *r <= 0.5 + 1e-12)
            .collect();
        assert_eq!(got.len(), want.len(), "({k},{n}) {got:?}");
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() <= 0.005 + 1e-12, "({k},{n}) {g} vs {w}");
        }
    }
}

#[test]
fn curve_file_round_trip_through_simulate() {
    let dir = tempfile::tempdir().unwrap();
    assert!(bikegeo(&["wegner", "--samples", "512"], &dir.path().join("w")).status.success());
    let file = dir.path().join("w").join("wegner_curve.csv");
    assert!(dir.path().join("w").join("wegner_curve.csv.json").exists());
    let out = bikegeo(&["simulate", "--curve-file", file.to_str().unwrap(), "--ell", "0.5"], &dir.path().join("s"));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let t = Table::from_csv(&read(&dir.path().join("s"), "simulate.csv")).unwrap();
    assert!(t.rows.len() >= 512);
}

#[test]
fn every_subcommand_writes_its_declared_files() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&[&str], &[&str]); 9] = [
        (&["simulate"], &["simulate.csv", "simulate_report.json"]),
        (&["monodromy"], &["monodromy.csv", "monodromy_report.json"]),
        (&["planimeter"], &["planimeter.csv", "planimeter_report.json"]),
        (&["correspond", "--folds", "6", "--ell", "1.1547005383792515,1.0606601717798212", "--lambda", "0.5"], &["correspond.csv", "correspond_partner_1.csv", "correspond_partner_2.csv", "correspond_bianchi.json", "correspond_conjugacy.csv"]),
        (&["zindler", "--k", "1", "--n", "4"], &["zindler.csv", "zindler_report.json"]),
        (&["integrals", "--curve", "circle", "--ell", "0.1,0.2"], &["integrals.txt", "integrals_terms.json", "integrals_numeric.csv", "integrals_unstable.csv"]),
        (&["akns"], &["akns.csv", "akns_report.json"]),
        (&["wegner"], &["wegner_curve.csv", "wegner_params.json", "wegner_report.json", "wegner_profile.csv"]),
        (&["rolling"], &["rolling.csv", "rolling_body_track_1.csv"]),
    ];
    for (i, (args, files)) in cases.iter().enumerate() {
        let d = dir.path().join(format!("{i}"));
        let out = bikegeo(args, &d);
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        for f in *files {
            assert!(d.join(f).exists(), "{args:?} missing {f}");
        }
        let leftovers: Vec<_> = fs::read_dir(&d).unwrap().filter_map(|e| e.ok()).filter(|e| e.file_name().to_string_lossy().starts_with(".tmp")).collect();
        assert!(leftovers.is_empty());
    }
}

#[test]
fn correspondence_and_akns_residuals_are_small() {
    let dir = tempfile::tempdir().unwrap();
    assert!(bikegeo(&["correspond", "--folds", "2", "--ell", "1.1547005383792515"], dir.path()).status.success());
    let t = Table::from_csv(&read(dir.path(), "correspond.csv")).unwrap();
    assert_eq!(column(&t, "within_tol"), vec![Cell::Bool(true)]);
    assert_eq!(column(&t, "partner_closed"), vec![Cell::Bool(true)]);
    let d2 = dir.path().join("akns");
    assert!(bikegeo(&["akns", "--lambda", "0", "--eps", "1,0.5"], &d2).status.success());
    let rep: serde_json::Value = serde_json::from_str(&read(&d2, "akns_report.json")).unwrap();
    for r in rep.as_array().unwrap() {
        assert!(r["distance_law_residual"].as_f64().unwrap() < 1e-8);
        for k in ["chord", "tangency", "glide"] {
            assert!(r["correspondence_residuals"][k].as_f64().unwrap() < 1e-6, "{r}");
        }
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for args in [&["simulate", "--seed", "42", "--curve", "helix"][..], &["planimeter", "--format", "json"][..], &["integrals"][..]] {
        let (a, b) = (dir.path().join("a"), dir.path().join("b"));
        assert!(bikegeo(args, &a).status.success());
        assert!(bikegeo(args, &b).status.success());
        for e in fs::read_dir(&a).unwrap() {
            let name = e.unwrap().file_name();
            assert_eq!(fs::read(a.join(&name)).unwrap(), fs::read(b.join(&name)).unwrap(), "{args:?} {name:?}");
        }
        fs::remove_dir_all(&a).unwrap();
        fs::remove_dir_all(&b).unwrap();
    }
}

#[test]
fn csv_column_with_mixed_parses_reads_as_text() {
    let t = Table::from_csv("label,x\n1,2.5e0\nab,1.0e0\n").unwrap();
    assert_eq!(t.rows[0][0], Cell::Text("1".into()));
    assert_eq!(t.rows[1][0], Cell::Text("ab".into()));
    assert_eq!(t.rows[1][1], Cell::Float(1.0));
}
