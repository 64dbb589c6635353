use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use treefn::{compose_on_tree, parse_tree, LayeredNetwork, PolyDecomposition, RatPoly};

fn treefn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_treefn"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("treefn-cli-{}-{name}", std::process::id()));
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn gf2_non_example_is_rejected() {
    let out = treefn(&[
        "check",
        "--tree",
        "((x,y),z)",
        "--poly",
        "x1*x2*x3 + x1 + x2 + x3",
        "--mode",
        "gf2",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["result"], "not a member");

    let text = treefn(&[
        "check",
        "--tree",
        "((x,y),z)",
        "--poly",
        "x1*x2*x3 + x1 + x2 + x3",
        "--mode",
        "gf2",
        "--output",
        "text",
    ]);
    assert_eq!(String::from_utf8_lossy(&text.stdout).trim(), "not a member");
}

#[test]
fn gf2_member_is_accepted() {
    let out = treefn(&[
        "check",
        "--tree",
        "((x,y),z)",
        "--poly",
        "x1*x2 + x3",
        "--mode",
        "gf2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["member"], true);
}

#[test]
fn worked_distance() {
    let out = treefn(&[
        "distance",
        "--tree",
        "((x,y),(z,w))",
        "--tree",
        "(((x,y),z),w)",
    ]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["intersection"], 296);
    assert_eq!(v["distance"], "224/520");
    assert_eq!(v["decimal"], 0.4308);
}

#[test]
fn gamma_of_two() {
    let out = treefn(&["bounds", "--gamma", "2", "--output", "text"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "6");
    assert_eq!(
        stdout_json(&treefn(&["bounds", "--gamma", "2"]))["gamma"],
        "6"
    );
}

#[test]
fn bounds_combine() {
    let v = stdout_json(&treefn(&[
        "bounds",
        "--burnside",
        "3",
        "--threshold",
        "3",
        "2",
    ]));
    assert_eq!(v["burnside"], "46");
    assert_eq!(v["threshold"], 4);
}

#[test]
fn count_only_matches_listing() {
    let count = stdout_json(&treefn(&[
        "enumerate",
        "--tree",
        "((x,y),(z,w))",
        "--count-only",
    ]));
    let full = stdout_json(&treefn(&["enumerate", "--tree", "((x,y),(z,w))"]));
    assert_eq!(count["size"], "520");
    assert_eq!(full["size"], 520);
    assert_eq!(full["members"].as_array().unwrap().len(), 520);
}

#[test]
fn json_tree_argument() {
    let a = stdout_json(&treefn(&[
        "enumerate",
        "--tree",
        "((a,b),c)",
        "--count-only",
    ]));
    let b = stdout_json(&treefn(&[
        "enumerate",
        "--tree",
        r#"{"node":[{"node":[{"leaf":"a"},{"leaf":"b"}]},{"leaf":"c"}]}"#,
        "--count-only",
    ]));
    assert_eq!(a, b);
}

#[test]
fn outputs_are_deterministic() {
    let runs = [
        vec!["distance-matrix", "--n", "4"],
        vec![
            "decompose",
            "--tree",
            "((x,y),z)",
            "--poly",
            "x1^2*x2^2 + 3*x3",
            "--mode",
            "rat",
        ],
        vec!["enumerate", "--tree", "((x,y),z)"],
    ];
    for args in runs {
        let a = treefn(&args);
        let b = treefn(&args);
        assert!(a.status.success(), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn distance_matrix_shape() {
    let v = stdout_json(&treefn(&["distance-matrix", "--n", "4"]));
    let m = v["matrix"].as_array().unwrap();
    assert_eq!(m.len(), 15);
    assert!(m.iter().enumerate().all(|(k, row)| row[k] == "0/520"));
    assert!(m
        .iter()
        .flat_map(|r| r.as_array().unwrap())
        .any(|c| c == "224/520"));
}

#[test]
fn rational_decomposition_recomposes() {
    let t = parse_tree("((x,y),z)").unwrap();
    let out = treefn(&[
        "decompose",
        "--tree",
        "((x,y),z)",
        "--poly",
        "x1^2*x2^2 + 3*x3",
        "--mode",
        "rat",
    ]);
    assert!(out.status.success());
    let d = PolyDecomposition::from_json(&stdout_json(&out), &t).unwrap();
    let f = RatPoly::parse("x1^2*x2^2 + 3*x3", 3).unwrap();
    assert_eq!(compose_on_tree(&t, &d.nodes).unwrap(), f);
}

#[test]
fn rational_check_and_reduced() {
    let bad = treefn(&[
        "check",
        "--tree",
        "((x,y),z)",
        "--poly",
        "x1*x2*x3 + x1 + x2 + x3",
        "--mode",
        "rat",
    ]);
    assert_eq!(bad.status.code(), Some(1));
    assert_eq!(stdout_json(&bad)["holds"], false);
    let good = treefn(&[
        "check",
        "--tree",
        "(((x,y),z),w)",
        "--poly",
        "x1*x2 + x3 + x4",
        "--mode",
        "rat",
        "--reduced",
    ]);
    assert_eq!(good.status.code(), Some(0));
    assert_eq!(
        stdout_json(&good)["identities"].as_array().unwrap().len(),
        3
    );
}

#[test]
fn gf2_decomposition_of_non_member_fails() {
    let out = treefn(&[
        "decompose",
        "--tree",
        "((x,y),z)",
        "--poly",
        "x1*x2*x3 + x1 + x2 + x3",
        "--mode",
        "gf2",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout_json(&out)["error"]["kind"].is_string());
}

#[test]
fn reconstruct_from_listing() {
    let listing = treefn(&["enumerate", "--tree", "((x,y),(z,w))", "--output", "text"]);
    let path = scratch("space.txt", &String::from_utf8(listing.stdout).unwrap());
    let v = stdout_json(&treefn(&[
        "reconstruct",
        "--space",
        path.to_str().unwrap(),
        "--n",
        "4",
    ]));
    assert_eq!(v["tree"], "((x1,x2),(x3,x4))");

    let broken = scratch("broken.txt", "0000\n0001\n");
    let out = treefn(&[
        "reconstruct",
        "--space",
        broken.to_str().unwrap(),
        "--n",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn tenn_report() {
    let net = r#"{"inputs":["x","y","z"],"layers":[[{"id":"h1","in":["x","y"]},{"id":"h2","in":["x","z"]}],[{"id":"o","in":["h1","h2"]}]]}"#;
    assert!(LayeredNetwork::parse(net).is_ok());
    let path = scratch("net.json", net);
    let v = stdout_json(&treefn(&["tenn", "--network", path.to_str().unwrap()]));
    assert_eq!(v["tree"], "((x,y),(x,z))");
    assert_eq!(v["leaf_count"], 4);
    assert_eq!(v["bounds"]["certified_bound"], "256");
}

#[test]
fn input_errors_exit_two_with_json_on_stderr() {
    for args in [
        vec![
            "check",
            "--tree",
            "((x,y),z)",
            "--poly",
            "x4",
            "--mode",
            "gf2",
        ],
        vec![
            "check", "--tree", "((x,y),z", "--poly", "x1", "--mode", "gf2",
        ],
        vec!["bounds", "--gamma", "1"],
        vec!["distance", "--tree", "(x,y)"],
        vec!["tenn", "--network", "/nonexistent/net.json"],
    ] {
        let out = treefn(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let err: Value = serde_json::from_slice(&out.stderr).expect("JSON error");
        assert!(err["error"]["kind"].is_string(), "{args:?}");
        assert!(err["error"]["message"].is_string(), "{args:?}");
    }
}
