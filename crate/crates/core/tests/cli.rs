use std::path::PathBuf;
use std::process::Command;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use dieudonne::cli::{run, Outcome};
use dieudonne::dieudonne::{random_symplectic_base_change, DieudonneModule, ModuleFile, NormalFormCoeffs};
use dieudonne::witt::{make_context, WittElement};

fn cli(args: &[&str]) -> Outcome {
    run(std::iter::once("dieudonne").chain(args.iter().copied()))
}

fn json_of(out: &Outcome) -> Value {
    assert_eq!(out.code, 0, "stderr: {}", out.stderr);
    serde_json::from_str(&out.stdout).unwrap()
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("dieudonne-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn admissible_counts() {
    assert_eq!(json_of(&cli(&["admissible", "--f", "3", "--r", "2"]))["count"], 7);
    assert_eq!(json_of(&cli(&["admissible", "--f", "1", "--r", "1"]))["count"], 2);
    let below = json_of(&cli(&["admissible", "--f", "3", "--r", "2", "--below", "1/3,1/3,2/3,2/3"]));
    assert_eq!(below["count"], 3);
    let slopes: Vec<&str> = below["polygons"].as_array().unwrap().iter().map(|p| p["slopes"].as_str().unwrap()).collect();
    assert_eq!(slopes, vec!["1/2,1/2,1/2,1/2 x3", "1/3,1/2,1/2,2/3 x3", "1/3,1/3,2/3,2/3 x3"]);
}

#[test]
fn invalid_input_exits_two() {
    assert_eq!(cli(&["admissible", "--f", "0", "--r", "2"]).code, 2);
    assert_eq!(cli(&["admissible", "--f", "3"]).code, 2);
    assert_eq!(cli(&["strata", "--f", "3", "--r", "2", "--beta", "0,1/7,1"]).code, 2);
    assert_eq!(cli(&["frobnicate"]).code, 2);
    let out = cli(&["np", "/nonexistent/module.json"]);
    assert_eq!(out.code, 2);
    assert!(out.stdout.is_empty());
}

#[test]
fn np_methods() {
    let ss = temp_file("ss.json", r#"{"p": 2, "f": 3, "r": 2, "m": 3, "N": 40}"#);
    let v = json_of(&cli(&["np", ss.to_str().unwrap()]));
    assert_eq!(v["agree"], true);
    assert_eq!(v["ch"]["slopes"], "1/2,1/2,1/2,1/2 x3");
    assert_eq!(v["ch"]["polygon"], json!({"segments": [[1, 2, 12]]}));

    let g1 = temp_file("g1.json", r#"{"p": 3, "f": 1, "r": 1, "m": 1, "N": 6}"#);
    let v = json_of(&cli(&["np", g1.to_str().unwrap(), "--method", "both"]));
    assert_eq!(v["oracle"]["polygon"], json!({"segments": [[1, 2, 2]]}));

    let bad = temp_file("bad.json", r#"{"p": 2, "f": 1, "r": 2, "m": 1, "N": 8, "a": [[2, 2, 2]]}"#);
    let out = cli(&["np", bad.to_str().unwrap(), "--method", "ch"]);
    assert_eq!(out.code, 3);
    assert!(out.stderr.contains("oracle"));
    assert_eq!(json_of(&cli(&["np", bad.to_str().unwrap(), "--method", "oracle"]))["oracle"]["slopes"], "1/2,1/2,1/2,1/2 x1");
}

#[test]
fn strata_dimensions() {
    let v = json_of(&cli(&["strata", "--f", "3", "--r", "2"]));
    assert_eq!(v["dim"], 4);
    assert_eq!(v["S"], json!(["t0,22", "t1,22", "t2,21", "t2,22"]));
    assert_eq!(json_of(&cli(&["strata", "--f", "2", "--r", "3"]))["dim"], 6);
    assert_eq!(json_of(&cli(&["strata", "--f", "3", "--r", "2", "--beta", "0,0,1,1"]))["dim"], 9);
    let text = cli(&["strata", "--f", "3", "--r", "2", "--text"]);
    assert!(text.stdout.contains("[t2,21]"));
}

#[test]
fn normal_form_command() {
    let ctx = make_context(3, 2, 12).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let base = NormalFormCoeffs::random(&ctx, 2, 1, &mut rng);
    let nf = temp_file("nf.json", &serde_json::to_string(&ModuleFile::from_coeffs(&base)).unwrap());
    let v = json_of(&cli(&["normal-form", nf.to_str().unwrap()]));
    let basis = v["change_of_basis"].as_array().unwrap();
    let (one, zero) = (WittElement::one(&ctx).to_string(), WittElement::zero(&ctx).to_string());
    for (i, row) in basis.iter().enumerate() {
        for (j, e) in row.as_array().unwrap().iter().enumerate() {
            assert_eq!(e.as_str().unwrap(), if i == j { &one } else { &zero });
        }
    }

    let module = DieudonneModule::from_normal_form(&base).unwrap();
    let moved = module.apply_base_change(&random_symplectic_base_change(&ctx, 2, 1, &mut rng)).unwrap();
    let path = temp_file("moved.json", &serde_json::to_string(&ModuleFile::from_module(&moved)).unwrap());
    let v = json_of(&cli(&["normal-form", path.to_str().unwrap(), "--no-basis"]));
    assert!(v.get("change_of_basis").is_none());
    let out_file: ModuleFile = serde_json::from_value(v["coeffs"].clone()).unwrap();
    let result = out_file.to_module().unwrap();
    assert_eq!(result.a_type(), module.a_type());

    let ord = DieudonneModule::ordinary(&ctx, 2, 1).unwrap();
    let path = temp_file("ord.json", &serde_json::to_string(&ModuleFile::from_module(&ord)).unwrap());
    assert_eq!(cli(&["normal-form", path.to_str().unwrap()]).code, 2);
}

#[test]
fn deform_reports() {
    let args = ["deform", "--f", "3", "--r", "2", "--beta", "0,1/3,2/3,1", "--trials", "20", "--seed", "7"];
    let a = cli(&args);
    let b = cli(&args);
    assert_eq!(a, b);
    let v = json_of(&a);
    assert_eq!(v["trials"], 20);
    assert_eq!(v["below_beta"], 0);
    assert_eq!(v["seed"], 7);
    assert!(v["hit_rate"].as_f64().unwrap() >= 0.95);

    let empty = json_of(&cli(&["deform", "--f", "3", "--r", "2", "--trials", "0"]));
    assert_eq!(empty["trials"], 0);
    assert_eq!(empty["polygons_observed"], json!([]));
}

#[test]
fn deform_chain() {
    let chain = temp_file(
        "chain.json",
        r#"{"f": 3, "r": 2, "chain": ["1/2,1/2,1/2,1/2", "1/3,1/2,1/2,2/3", "1/3,1/3,2/3,2/3", "0,1/2,1/2,1", "0,1/3,2/3,1", "0,0,1,1"]}"#,
    );
    let v = json_of(&cli(&["deform", "--chain", chain.to_str().unwrap()]));
    let dims: Vec<u64> = v["strata"].as_array().unwrap().iter().map(|s| s["dim"].as_u64().unwrap()).collect();
    assert_eq!(dims, vec![4, 5, 6, 7, 8, 9]);

    let bare = temp_file("bare.json", r#"["0,0,1,1", "1/2,1/2,1/2,1/2"]"#);
    let out = cli(&["deform", "--f", "3", "--r", "2", "--chain", bare.to_str().unwrap()]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("not strictly decreasing"));
}

#[test]
fn output_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("dieudonne-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("admissible.json");
    let out = cli(&["admissible", "--f", "2", "--r", "2", "--output", path.to_str().unwrap()]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["f"], 2);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_dieudonne");
    let ok = Command::new(bin).args(["admissible", "--f", "3", "--r", "2", "--text"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(String::from_utf8(ok.stdout).unwrap().lines().filter(|l| !l.starts_with('(')).count(), 7);
    let bad = Command::new(bin).args(["strata", "--f", "3", "--r", "2", "--beta", "1"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(bad.stdout.is_empty());
}
