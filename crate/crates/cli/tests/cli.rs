use etcrit_cli::run_with;

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn run(args: &[&str]) -> Run {
    let mut argv = vec!["etcrit".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_with(argv, &mut out, &mut err);
    Run {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn csv_rows(text: &str) -> Vec<std::collections::HashMap<String, String>> {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let headers = rd.headers().unwrap().clone();
    rd.records()
        .map(|r| {
            headers
                .iter()
                .map(String::from)
                .zip(r.unwrap().iter().map(String::from))
                .collect()
        })
        .collect()
}

#[test]
fn two_body_critical_coupling() {
    let r = run(&[
        "crit-id",
        "--well",
        "exponential",
        "--mu",
        "1",
        "--mass",
        "1",
        "--N",
        "2",
        "--state",
        "ground",
        "--D",
        "3",
    ]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert!(r.out.contains("4.156"), "{}", r.out);
}

#[test]
fn weak_source_is_unbound() {
    let r = run(&[
        "crit-mixed",
        "--Na",
        "2",
        "--ma",
        "1",
        "--mb",
        "inf",
        "--well-aa",
        "exponential",
        "--well-ab",
        "exponential",
        "--mu",
        "1",
        "--hold",
        "gab=0.2",
        "--solve",
        "gaa",
    ]);
    assert_eq!(r.code, 2);
    assert!(r.err.contains("unbound"));
    assert!(r.out.contains("unbound"));
}

#[test]
fn usage_errors_exit_one() {
    let r = run(&["crit-id", "--well", "exponential", "--mu", "0"]);
    assert_eq!(r.code, 1);
    assert!(r.err.contains("mu"));
    assert_eq!(
        run(&["crit-mixed", "--Na", "2", "--gaa", "1", "--gab", "1"]).code,
        1
    );
    assert_eq!(
        run(&[
            "crit-mixed",
            "--Na",
            "2",
            "--hold",
            "gab=1",
            "--solve",
            "gab"
        ])
        .code,
        1
    );
    assert_eq!(run(&["crit-id", "--N"]).code, 1);
    assert_eq!(run(&["scan", "--vary", "N=2,3", "validate"]).code, 1);
    assert_eq!(run(&["scan", "--vary", "nonsense=1", "crit-id"]).code, 1);
    assert_eq!(run(&["--help"]).code, 0);
}

#[test]
fn static_source_crossing() {
    let r = run(&[
        "crit-mixed",
        "--Na",
        "2",
        "--mb",
        "inf",
        "--hold",
        "gab=2.078",
        "--output",
        "json",
    ]);
    assert_eq!(r.code, 0, "{}", r.err);
    let v: serde_json::Value = serde_json::from_str(&r.out).unwrap();
    assert!(v[0]["gaa"].as_f64().unwrap().abs() < 0.005);
    assert_eq!(v[0]["solve"], "gaa");
}

#[test]
fn mass_scan_and_csv_round_trip() {
    let r = run(&[
        "scan",
        "--vary",
        "m=0.5,1,2,5",
        "crit-mixed",
        "--Na",
        "10",
        "--g",
        "0.7556989192",
        "--output",
        "csv",
    ]);
    assert_eq!(r.code, 0, "{}", r.err);
    let rows = csv_rows(&r.out);
    assert_eq!(rows.len(), 4);
    let h: f64 = rows[1]["gab"].parse().unwrap();
    assert!((h - 0.756).abs() < 0.001);
    let hs: Vec<f64> = rows.iter().map(|r| r["gab"].parse().unwrap()).collect();
    assert!(hs.windows(2).all(|w| w[1] < w[0]), "{hs:?}");

    let mut rd = csv::Reader::from_reader(r.out.as_bytes());
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(rd.headers().unwrap()).unwrap();
    for rec in rd.records() {
        w.write_record(&rec.unwrap()).unwrap();
    }
    assert_eq!(String::from_utf8(w.into_inner().unwrap()).unwrap(), r.out);
}

#[test]
fn source_strength_scan_records_unbound_points() {
    let r = run(&[
        "scan",
        "--vary",
        "h=0.2:3:0.2",
        "crit-mixed",
        "--Na",
        "2",
        "--mb",
        "inf",
        "--solve",
        "gaa",
        "--output",
        "csv",
    ]);
    assert_eq!(r.code, 0, "{}", r.err);
    let rows = csv_rows(&r.out);
    assert_eq!(rows.len(), 15);
    for row in &rows {
        let h: f64 = row["vary_h"].parse().unwrap();
        if h < 0.5 {
            assert_eq!(row["status"], "unbound");
            assert_eq!(row["gaa"], "");
        } else {
            assert_eq!(row["status"], "ok");
        }
    }
    let g = |h: &str| -> f64 {
        rows.iter().find(|r| r["vary_h"] == h).unwrap()["gaa"]
            .parse()
            .unwrap()
    };
    assert!(g("2") > 0.0 && g("2.2") < 0.0);
}

#[test]
fn json_rows_share_fields() {
    let r = run(&[
        "scan",
        "--vary",
        "N=2,3,4",
        "--vary",
        "method=plain,improved",
        "crit-id",
        "--output",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&r.out).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 6);
    let keys = |i: usize| {
        rows[i]
            .as_object()
            .unwrap()
            .keys()
            .cloned()
            .collect::<Vec<_>>()
    };
    assert!((1..6).all(|i| keys(i) == keys(0)));
}

#[test]
fn two_body_table_scan() {
    let r = run(&[
        "scan",
        "--vary",
        "n=0,1,2",
        "--vary",
        "l=0,1,2",
        "--vary",
        "method=plain,improved,oracle",
        "crit-id",
        "--N",
        "2",
        "--output",
        "csv",
    ]);
    let rows = csv_rows(&r.out);
    assert_eq!(rows.len(), 27);
    let get = |n: &str, l: &str, m: &str| -> f64 {
        let row = rows
            .iter()
            .find(|r| r["vary_n"] == n && r["vary_l"] == l && r["vary_method"] == m)
            .unwrap();
        row["g_crit"].parse().unwrap()
    };
    assert!((get("1", "1", "plain") - 37.4).abs() <= 0.05);
    assert!((get("1", "0", "improved") - 16.0).abs() <= 0.05);
    assert!((get("2", "2", "oracle") - 48.1).abs() / 48.1 < 0.01);
}

#[test]
fn energies_and_oracle() {
    let r = run(&[
        "energy-id",
        "--N",
        "2",
        "--g",
        "40",
        "--l",
        "1",
        "--output",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&r.out).unwrap();
    assert!((v[0]["energy"].as_f64().unwrap() + 8.56).abs() < 0.005);
    let r = run(&["energy-id", "--N", "2", "--g", "40", "--n", "2"]);
    assert_eq!(r.code, 2);
    let r = run(&["oracle", "--g", "40", "--l", "3", "--output", "json"]);
    let v: serde_json::Value = serde_json::from_str(&r.out).unwrap();
    assert!((v[0]["energy"].as_f64().unwrap() + 1.55).abs() < 0.0155);
    let r = run(&["oracle", "--g", "1", "--l", "0"]);
    assert_eq!(r.code, 2);
    let r = run(&[
        "energy-mixed",
        "--Na",
        "2",
        "--mb",
        "inf",
        "--gaa",
        "0",
        "--gab",
        "3",
    ]);
    assert_eq!(r.code, 0);
}

#[test]
fn config_file_and_output_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("fig3.conf");
    std::fs::write(
        &cfg,
        "# static source\nNa = 2\nmb = inf\nhold = gab=0.2\noutput = csv\n",
    )
    .unwrap();
    let r = run(&["crit-mixed", "--config", cfg.to_str().unwrap()]);
    assert_eq!(r.code, 2);
    assert!(r.out.starts_with("Na,"));
    // explicit flags override the file
    let out = dir.path().join("out.csv");
    let r = run(&[
        "crit-mixed",
        "--config",
        cfg.to_str().unwrap(),
        "--output-path",
        out.to_str().unwrap(),
        "--hold",
        "gab=2.078",
    ]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert!(r.out.is_empty());
    assert!(std::fs::read_to_string(&out).unwrap().contains("2.078"));
    let r = run(&[
        "crit-mixed",
        "--config",
        cfg.to_str().unwrap(),
        "--mb",
        "5",
        "--output-path",
        out.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 2);
    assert!(r.out.is_empty());
    assert!(std::fs::read_to_string(&out).unwrap().contains(",5,"));

    let scan_cfg = dir.path().join("scan.conf");
    std::fs::write(&scan_cfg, "vary = gab=2,3\nNa = 2\nmb = inf\nsolve = gaa\n").unwrap();
    let r = run(&[
        "scan",
        "--config",
        scan_cfg.to_str().unwrap(),
        "crit-mixed",
        "--output",
        "csv",
    ]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert_eq!(csv_rows(&r.out).len(), 2);
}

#[test]
fn validate_reports_every_criterion() {
    let r = run(&["validate", "--perturb", "1=1e-6"]);
    assert_eq!(r.code, 1);
    let lines: Vec<&str> = r.out.lines().collect();
    assert_eq!(lines.len(), 10);
    assert!(lines[0].starts_with("[FAIL]  1"));
    assert!(lines[1].starts_with("[PASS]  2"));
}
