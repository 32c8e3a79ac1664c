use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

use tilescope::report::sha256_hex;
use tilescope_core::bundled;
use tilescope_core::fusion::build_supertile;

fn tilescope(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tilescope"))
        .args(args)
        .env_remove("TILESCOPE_TILE_BUDGET")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn help_and_version_succeed() {
    assert_eq!(tilescope(&["--help"]).status.code(), Some(0));
    assert_eq!(tilescope(&["render", "--help"]).status.code(), Some(0));
    let v = tilescope(&["--version"]);
    assert_eq!(v.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&v.stdout).contains(env!("CARGO_PKG_VERSION")));
}

#[test]
fn usage_errors_name_the_flag() {
    let out = tilescope(&["sizes", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--bogus"));
    let out = tilescope(&["sizes", "--n", "many"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--n"));
    let out = tilescope(&["sizes", "--rule", "/no/such/file.rule"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--rule"));
    let out = tilescope(&["build", "--n", "2", "--label", "z"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--label"));
    assert_eq!(tilescope(&[]).status.code(), Some(2));
}

#[test]
fn budget_comes_from_the_environment() {
    let run = |budget: &str| {
        Command::new(env!("CARGO_BIN_EXE_tilescope"))
            .args(["build", "--n", "4"])
            .env("TILESCOPE_TILE_BUDGET", budget)
            .output()
            .unwrap()
    };
    let out = run("1000");
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("budget"));
    assert_eq!(run("1600").status.code(), Some(0));
    let out = run("lots");
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("TILESCOPE_TILE_BUDGET"));
    let flag = tilescope(&["build", "--n", "4", "--budget", "10"]);
    assert_eq!(flag.status.code(), Some(2));
}

#[test]
fn sizes_report_is_exact_and_stable() {
    let a = tilescope(&["sizes", "--rule", "frank-dpv", "--n", "30"]);
    let b = tilescope(&["sizes", "--rule", "frank-dpv", "--n", "30"]);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let r = json(&a);
    assert_eq!(r["schema"], "tilescope-report/1");
    assert_eq!(r["source"]["sha256"], sha256_hex(bundled::FRANK_DPV_RULE.as_bytes()));
    assert!(r.get("timing_ms").is_none());
    let (mut w, mut v) = (1u64, 1u64);
    for row in r["result"]["rows"].as_array().unwrap() {
        assert_eq!(row["values"]["W"], w.to_string());
        assert_eq!(row["values"]["V"], v.to_string());
        assert_eq!(row["gcd"], "1");
        assert_eq!(row["residues"]["3"]["W"], 1);
        (w, v) = (w + 3 * v, w);
    }
    assert_eq!(r["result"]["rows"][30]["values"]["W"], "108412748857");
}

#[test]
fn timing_is_opt_in() {
    let r = json(&tilescope(&["sizes", "--n", "3", "--timing"]));
    assert!(r["timing_ms"].is_u64());
}

#[test]
fn cohomology_of_the_bottom_rows() {
    let out = tilescope(&["cohomology", "--subst", "north"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = json(&out);
    assert_eq!(r["result"]["char_poly"], "x^4 - 4x^2 - 3x");
    assert_eq!(r["result"]["h1_rank"], 4);
    assert_eq!(r["result"]["an_dimension"], 0);
    assert_eq!(r["result"]["bd"]["edges"], serde_json::json!(["a.a", "a.d", "c.a", "c.d"]));
}

#[test]
fn rule_files_are_hashed() {
    let path = scratch("copy.rule");
    let text = format!("# a copy\n{}", bundled::EXAMPLE2_RULE);
    std::fs::write(&path, &text).unwrap();
    let out = tilescope(&["validate", "--rule", path.to_str().unwrap(), "--depth", "6"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(json(&out)["source"]["sha256"], sha256_hex(text.as_bytes()));
}

#[test]
fn broken_rules_fail_verification() {
    // the second child of `a` moved right by one leaves a gap and an overflow
    let text = bundled::EXAMPLE2_RULE.replacen("b at (W, H)", "b at (W + 1, H)", 1);
    assert_ne!(text, bundled::EXAMPLE2_RULE);
    let path = scratch("broken.rule");
    std::fs::write(&path, &text).unwrap();
    let out = tilescope(&["validate", "--rule", path.to_str().unwrap(), "--depth", "3"]);
    assert_eq!(out.status.code(), Some(1));
    let r = json(&out);
    assert_eq!(r["passed"], false);
    assert!(!r["violations"].as_array().unwrap().is_empty());
    assert!(stderr(&out).contains("violated"));
}

#[test]
fn render_counts_match_the_tree() {
    let svg = scratch("p3a.svg");
    let out_json = scratch("p3a.json");
    let out = tilescope(&[
        "render", "--label", "a", "--n", "3", "--outline", "1,2", "--svg", svg.to_str().unwrap(), "--out",
        out_json.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&out_json).unwrap()).unwrap();
    let p = build_supertile(&bundled::frank_dpv(), "a", 3).unwrap();
    assert_eq!(r["result"]["tiles"], 361);
    assert_eq!(r["result"]["outlines"]["1"]["drawn"], p.nodes_at_level(1).unwrap().len());
    assert_eq!(r["result"]["outlines"]["2"]["drawn"], p.nodes_at_level(2).unwrap().len());
    let text = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(r["result"]["svg_sha256"], sha256_hex(text.as_bytes()));

    let to_stdout = tilescope(&["render", "--n", "3", "--outline", "1,2"]);
    assert_eq!(to_stdout.stdout, text.as_bytes());

    let bad = tilescope(&["render", "--n", "3", "--outline", "3"]);
    assert_eq!(bad.status.code(), Some(2));
    let huge = tilescope(&["render", "--n", "6", "--pixel-budget", "1000"]);
    assert_eq!(huge.status.code(), Some(2));
    assert!(stderr(&huge).contains("pixel"));
}

#[test]
fn align_reports_a_path() {
    let svg = scratch("p4a-path.svg");
    let out = tilescope(&["align", "--n", "4", "--m", "1", "--mu", "2", "--nu", "-3", "--svg", svg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = json(&out);
    assert_eq!(r["result"]["graph"]["connected"], true);
    let d = &r["result"]["path"]["displacement"];
    assert_eq!(d["holds"], true);
    assert_eq!(d["expected"], d["integral"]);
    assert!(std::fs::read_to_string(&svg).unwrap().contains("class=\"path\""));
    let missing = tilescope(&["align", "--n", "4", "--m", "1", "--from", "3,3"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(stderr(&missing).contains("--from"));
}

#[test]
fn smaller_commands_run() {
    let out = tilescope(&["offsets", "--m", "1", "--max-level", "6", "--brute-level", "5"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(json(&out)["result"]["levels"].as_array().unwrap().len(), 5);

    let out = tilescope(&["discrepancy", "--k-max", "12", "--fit-lo", "4", "--fit-hi", "12", "--patch-level", "5"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(json(&out)["result"]["fault_lines"]["count"].as_u64().unwrap() > 0);

    let out = tilescope(&["spectrum", "--n", "4", "--rho", "2", "--step", "0.05"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(json(&out)["result"]["integer_points_survive"], true);

    let out = tilescope(&["shear-witness", "--offsets", "0,1000", "--max-level", "7", "--catalog-level", "6"]);
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
    let w = json(&out)["result"]["witnesses"].clone();
    assert_eq!((w[0]["offset"].clone(), w[0]["found"].clone(), w[0]["legal"].clone()), (0.into(), true.into(), true.into()));
    assert_eq!(w[1]["found"], false);

    let grid = scratch("p2a.txt");
    let out = tilescope(&["build", "--n", "2", "--grid", grid.to_str().unwrap()]);
    assert_eq!(json(&out)["result"]["tiles"], "49");
    assert_eq!(std::fs::read_to_string(&grid).unwrap().lines().count(), 7);

    let out = tilescope(&["report-all", "--only", "2,5"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(json(&out)["result"]["criteria"].as_array().unwrap().len(), 2);
    assert_eq!(tilescope(&["report-all", "--only", "99"]).status.code(), Some(2));
}
