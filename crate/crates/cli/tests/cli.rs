use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;

use clap::CommandFactory;
use housing_cli::{run, Cli, REGISTRY};
use housing_core::fixtures;
use serde_json::Value;
use tempfile::TempDir;

struct Files {
    dir: TempDir,
    intro: PathBuf,
    table: PathBuf,
}

fn files() -> Files {
    let dir = tempfile::tempdir().unwrap();
    let intro = dir.path().join("intro.txt");
    let table = dir.path().join("table1.txt");
    std::fs::write(&intro, fixtures::intro_profile().to_text()).unwrap();
    std::fs::write(&table, fixtures::table1_profile().to_text()).unwrap();
    Files { dir, intro, table }
}

fn substitute(f: &Files, args: &[&str]) -> Vec<String> {
    let checkpoint = f.dir.path().join(format!("cp-{}.json", args.join("_").len()));
    args.iter()
        .map(|a| match *a {
            "{intro}" => f.intro.display().to_string(),
            "{table}" => f.table.display().to_string(),
            "{checkpoint}" => checkpoint.display().to_string(),
            other => other.to_string(),
        })
        .collect()
}

fn housing(args: &[String]) -> (i32, String, String) {
    let out = run(std::iter::once("housing".to_string()).chain(args.iter().cloned()));
    (out.code, out.stdout, out.stderr)
}

fn json_result(args: &[String]) -> Value {
    let (code, stdout, stderr) = housing(args);
    assert_eq!(code, 0, "{args:?}: {stderr}");
    serde_json::from_str(&stdout).unwrap()
}

fn args(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

fn path(p: &Path) -> String {
    p.display().to_string()
}

fn ints(v: &Value) -> Vec<u64> {
    v.as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect()
}

#[test]
fn allocate_intro_profile() {
    let f = files();
    let r = json_result(&args(&["allocate", "--input", &path(&f.intro)]));
    assert_eq!(r["schema_version"], 1);
    assert_eq!(ints(&r["result"]["goods"]), [1, 3, 2]);
    assert_eq!(ints(&r["result"]["ranks"]), [2, 1, 1]);
    assert_eq!(r["result"]["method"], "stable");
    assert_eq!(r["config"]["command"]["name"], "allocate");
}

#[test]
fn stats_rank_sum_n3() {
    let r = json_result(&args(&["stats", "rank-sum", "--n", "3"]));
    assert_eq!(r["result"]["value"]["exact"], "13/3");
    assert_eq!(r["result"]["value"]["decimal"], "4.33333333333");
}

#[test]
fn bijection_on_table() {
    let f = files();
    let r = json_result(&args(&[
        "bijection",
        "pi-to-sigma",
        "--input",
        &path(&f.table),
        "--perm",
        "5,3,4,9,1,8,2,7,6",
    ]));
    assert_eq!(ints(&r["result"]["sigma"]), [5, 7, 9, 2, 1, 8, 6, 4, 3]);
    assert_eq!(r["result"]["consistent"], true);
    let back = json_result(&args(&[
        "bijection",
        "sigma-to-pi",
        "--input",
        &path(&f.table),
        "--perm",
        "5,7,9,2,1,8,6,4,3",
    ]));
    assert_eq!(ints(&back["result"]["pi"]), [5, 3, 4, 9, 1, 8, 2, 7, 6]);
}

const LIBRARY_OPERATIONS: &[&str] = &[
    "stable_allocation",
    "stable_allocation_with",
    "uniform_hash_allocation",
    "is_core_allocation",
    "is_locally_optimal",
    "priority_reconstruction",
    "shuffle_profile",
    "random_profile",
    "pi_to_sigma",
    "sigma_to_pi",
    "is_consistent",
    "TruncatedTableau",
    "expected_rank_sum",
    "expected_square_sum",
    "rank_sum_second_moment",
    "rank_sum_variance",
    "expected_rank_variance",
    "rank_product_coeff",
    "expected_rank_poly",
    "expected_square_poly",
    "max_rank_at_most",
    "max_rank_half_limit",
    "stirling_cycle",
    "harmonic",
    "q_exceed",
    "weighted_q_sum",
    "binomial",
    "exhaustive_rank_distribution",
    "monte_carlo_summary",
    "total_marriage_rank_sum",
    "conjecture_scan",
    "run_marriage_totals_checkpointed",
    "girls_canonical_form",
    "girls_isomorphism_classes",
    "gale_shapley_male_optimal",
    "boys_matrix_at",
];

#[test]
fn registry_covers_every_operation_and_subcommand() {
    for op in LIBRARY_OPERATIONS {
        assert!(REGISTRY.iter().any(|r| r.name == *op), "{op} is not reachable");
    }
    let f = files();
    for op in REGISTRY {
        let (code, _, stderr) = housing(&substitute(&f, op.example));
        assert_eq!(code, 0, "{}: {stderr}", op.name);
    }
    // every leaf subcommand is exercised by some registry entry
    let cli = Cli::command();
    for sub in cli.get_subcommands() {
        let leaves: Vec<Vec<&str>> = if sub.has_subcommands() {
            sub.get_subcommands().map(|s| vec![sub.get_name(), s.get_name()]).collect()
        } else {
            vec![vec![sub.get_name()]]
        };
        for leaf in leaves {
            assert!(
                REGISTRY.iter().any(|r| r.example.starts_with(&leaf)
                    || (leaf == ["check"] && r.example.starts_with(&["verify"]))),
                "{leaf:?} has no registry entry"
            );
        }
    }
}

fn flatten(v: &Value, prefix: &str, out: &mut BTreeMap<String, Value>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) if !m.is_empty() => m.iter().for_each(|(k, c)| flatten(c, &key(k), out)),
        Value::Array(a) if !a.is_empty() => a.iter().enumerate().for_each(|(i, c)| flatten(c, &key(&i.to_string()), out)),
        leaf => {
            out.insert(prefix.to_string(), leaf.clone());
        }
    }
}

fn same_value(json: &Value, text: &str) -> bool {
    match json {
        Value::String(s) => s == text,
        Value::Null => text == "null",
        Value::Bool(b) => text.parse::<bool>() == Ok(*b),
        // serde_json's default float parser may be one ulp off
        Value::Number(n) => match (text.parse::<f64>(), n.as_f64()) {
            (Ok(a), Some(b)) => a == b || (a - b).abs() <= 1e-15 * a.abs().max(b.abs()),
            _ => false,
        },
        Value::Array(_) => text == "[]",
        Value::Object(_) => text == "{}",
    }
}

#[test]
fn csv_and_json_carry_the_same_content() {
    let f = files();
    let cases: Vec<Vec<String>> = vec![
        args(&["allocate", "--input", &path(&f.intro), "--priority", "3,2,1"]),
        args(&["stats", "poly", "--n", "4"]),
        args(&["stats", "max-rank-cdf", "--n", "5"]),
        args(&["check", "--input", &path(&f.intro), "--goods", "1,2,3"]),
        args(&["simulate", "--n", "4", "--samples", "500", "--seed", "9"]),
        args(&["marriage", "total", "--girls", "cyclic", "--n", "3"]),
        args(&["enumerate", "--n", "2"]),
    ];
    for case in cases {
        let json: Value = serde_json::from_str(&housing(&case).1).unwrap();
        let mut csv_args = case.clone();
        csv_args.extend(args(&["--format", "csv"]));
        let (code, csv_text, _) = housing(&csv_args);
        assert_eq!(code, 0);
        let mut reader = csv::Reader::from_reader(csv_text.as_bytes());
        assert_eq!(reader.headers().unwrap(), vec!["key", "value"]);
        let rows: BTreeMap<String, String> = reader
            .records()
            .map(|r| {
                let r = r.unwrap();
                (r[0].to_string(), r[1].to_string())
            })
            .collect();
        let mut leaves = BTreeMap::new();
        flatten(&json, "", &mut leaves);
        assert_eq!(leaves.len(), rows.len(), "{case:?}");
        for (k, v) in &leaves {
            let text = &rows[k];
            if k == "config.format" {
                assert_eq!(text, "csv");
                continue;
            }
            assert!(same_value(v, text), "{case:?} {k}: {v} vs {text}");
        }
    }
}

fn binary(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_housing")).args(args).env_clear().output().unwrap()
}

#[test]
fn identical_config_gives_identical_bytes() {
    for a in [
        &["simulate", "--n", "7", "--samples", "3000", "--seed", "42", "--method", "hash", "--priority", "7,6,5,4,3,2,1"][..],
        &["simulate", "--n", "4", "--samples", "3000", "--seed", "42", "--method", "marriage-random-girls", "--format", "csv"],
        &["generate", "--n", "6", "--seed", "123"],
        &["marriage", "scan", "--n", "3"],
    ] {
        let one = binary(a);
        let two = binary(a);
        assert!(one.status.success());
        assert_eq!(one.stdout, two.stdout, "{a:?}");
    }
    // the worker count changes only the recorded config
    let strip = |o: std::process::Output| {
        let mut v: Value = serde_json::from_slice(&o.stdout).unwrap();
        v["config"]["workers"] = Value::Null;
        v
    };
    let a = ["simulate", "--n", "5", "--samples", "5000", "--seed", "3"];
    let w1 = strip(binary(&[&a[..], &["--workers", "1"]].concat()));
    let w3 = strip(binary(&[&a[..], &["--workers", "3"]].concat()));
    assert_eq!(w1, w3);
}

#[test]
fn exit_codes() {
    let f = files();
    let intro = path(&f.intro);
    let bad = f.dir.path().join("bad.txt");
    std::fs::write(&bad, "3\n1 2 3\n1 1 2\n3 2 1\n").unwrap();
    let cases: &[(&[&str], i32)] = &[
        (&["allocate", "--input", &intro], 0),
        (&["allocate", "--input", "/nonexistent/profile.txt"], 1),
        (&["allocate", "--input", &path(&bad)], 1),
        (&["allocate", "--input", &intro, "--priority", "1,2"], 1),
        (&["marriage", "total", "--girls", "cyclic", "--n", "5"], 1),
        (&["enumerate", "--n", "6"], 1),
        (&["marriage", "run", "--girls", "cyclic", "--n", "5", "--checkpoint", "/nonexistent/cp.json"], 1),
        (&["marriage", "run", "--girls", "cyclic", "--n", "7", "--long-run", "--checkpoint", "/nonexistent/cp.json"], 1),
        (&["simulate", "--n", "3", "--samples", "10"], 2),
        (&["generate", "--n", "3"], 2),
        (&["allocate", "--input", &intro, "--priority", "1,1,2"], 2),
        (&["stats", "q", "--n", "3", "--k", "2"], 2),
        (&["marriage", "total", "--girls", "cyclic"], 2),
        (&["frobnicate"], 2),
        (&["--workers", "0", "stats", "rank-sum", "--n", "2"], 2),
        (&["--help"], 0),
    ];
    for (a, code) in cases {
        let out = binary(a);
        assert_eq!(out.status.code(), Some(*code), "{a:?}: {}", String::from_utf8_lossy(&out.stderr));
        if *code != 0 {
            assert!(out.stdout.is_empty());
            assert!(!out.stderr.is_empty());
        }
    }
}

#[test]
fn generated_profile_file_round_trips() {
    let f = files();
    let out = f.dir.path().join("gen.txt");
    let g = json_result(&args(&["generate", "--n", "6", "--seed", "11", "--output", &path(&out)]));
    let a = json_result(&args(&["allocate", "--input", &path(&out)]));
    assert_eq!(a["result"]["n"], 6);
    let text = std::fs::read_to_string(&out).unwrap();
    let p = housing_core::PreferenceProfile::parse(&text).unwrap();
    assert_eq!(serde_json::to_value(p.to_vecs()).unwrap(), g["result"]["profile"]);

    let shuffled = f.dir.path().join("shuffled.txt");
    json_result(&args(&["shuffle", "--input", &path(&out), "--sigma", "2,3,1,6,5,4", "--output", &path(&shuffled)]));
    let s = housing_core::PreferenceProfile::parse(&std::fs::read_to_string(&shuffled).unwrap()).unwrap();
    assert_eq!(s.row(2), p.row(1));
}

#[test]
fn checkpointed_run_resumes_to_the_full_total() {
    let f = files();
    let cp = path(&f.dir.path().join("cp.json"));
    let base = ["marriage", "run", "--girls", "cyclic", "--n", "4", "--checkpoint", &cp, "--chunk-size", "100000"];
    let first = json_result(&args(&[&base[..], &["--max-chunks", "1"]].concat()));
    assert_eq!(first["result"]["complete"], false);
    assert_eq!(first["result"]["completed"], 100_000);
    let done = json_result(&args(&base));
    assert_eq!(done["result"]["complete"], true);
    assert_eq!(done["result"]["zero_based"], "884224");
    let total = json_result(&args(&["marriage", "total", "--girls", "cyclic", "--n", "4"]));
    assert_eq!(total["result"]["total"], "884224");
    assert_eq!(total["result"]["convention"], "zero-based");
    assert_eq!(total["result"]["one_based"], done["result"]["one_based"]);
}

#[test]
fn scan_reports_cyclic_maximum() {
    let r = json_result(&args(&["marriage", "scan", "--n", "3"]));
    assert_eq!(r["result"]["cyclic_is_max"], true);
    assert_eq!(r["result"]["max"]["total_zero_based"], "306");
    assert_eq!(r["result"]["equal_lists_is_min"], true);
}

#[test]
fn enumerate_reports_equality() {
    let r = json_result(&args(&["enumerate", "--n", "3", "--all-priorities"]));
    assert_eq!(r["result"]["all_equal"], true);
    assert_eq!(r["result"]["hash"].as_array().unwrap().len(), 6);
    assert_eq!(r["result"]["mean_rank_sum"]["exact"], "13/3");
    assert_eq!(r["result"]["mean_matches_closed_form"], true);
}
