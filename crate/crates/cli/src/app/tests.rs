use std::fs;
use std::path::Path;

use super::{run, Io};
use crate::witness::Witness;

struct Output {
    code: u8,
    stdout: String,
    stderr: String,
}

fn sperner(args: &[&str]) -> Output {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(std::iter::once("sperner").chain(args.iter().copied()), &mut Io { out: &mut out, err: &mut err });
    Output { code, stdout: String::from_utf8(out).unwrap(), stderr: String::from_utf8(err).unwrap() }
}

fn code(o: &Output) -> i32 {
    o.code as i32
}

fn stdout(o: &Output) -> String {
    o.stdout.clone()
}

fn stderr(o: &Output) -> String {
    o.stderr.clone()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_owned()
}

#[test]
fn construct_then_verify_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 6] = [
        &["product", "--n", "6", "--k", "3", "--segments", "2,2,2"],
        &["product", "--n", "8", "--k", "3"],
        &["sum", "--n", "4", "--k", "3"],
        &["pair-product", "--n", "5"],
        &["pair-sum", "--n", "5"],
        &["conjecture", "--n", "6", "--k", "3"],
    ];
    for (i, args) in cases.iter().enumerate() {
        let out = path(dir.path(), &format!("w{i}.json"));
        let mut full = vec!["construct"];
        full.extend_from_slice(args);
        full.extend_from_slice(&["--out", &out]);
        let o = sperner(&full);
        assert_eq!(code(&o), 0, "{args:?}: {}", stderr(&o));
        let v = sperner(&["verify", &out]);
        assert_eq!(code(&v), 0, "{args:?}");
        assert!(stdout(&v).starts_with("VALID"));
        let text = fs::read_to_string(&out).unwrap();
        assert_eq!(Witness::parse(&text).unwrap().to_json(), text, "{args:?}");
    }
}

#[test]
fn construct_reports_sizes_and_writes_json_to_stdout() {
    let o = sperner(&["construct", "sum", "--n", "4", "--k", "3"]);
    assert_eq!(code(&o), 0);
    let w = Witness::parse(&stdout(&o)).unwrap();
    assert_eq!(w.measures.sum, 8);
    assert!(stderr(&o).contains("sum: 8"));
    assert!(stderr(&o).contains("SIGMA_UPPER"));
}

#[test]
fn example_product_listing() {
    let o = sperner(&["construct", "product", "--n", "6", "--k", "3", "--segments", "2,2,2"]);
    let w = Witness::parse(&stdout(&o)).unwrap();
    let fams: Vec<Vec<Vec<u32>>> =
        w.tuple().unwrap().families().iter().map(|f| f.iter().map(|m| m.elements()).collect()).collect();
    // Each family: X_i on its own block, Y_j on the others.
    assert_eq!(fams[0][0], vec![2, 4]);
    assert_eq!(fams.iter().map(Vec::len).collect::<Vec<_>>(), [8, 8, 8]);
    assert_eq!(w.measures.product.to_string(), "512");
}

#[test]
fn precondition_errors_exit_two() {
    let o = sperner(&["construct", "product", "--n", "2", "--k", "3"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("error:"));
    assert_eq!(code(&sperner(&["construct", "sum", "--n", "4", "--k", "3", "--a", "1"])), 2);
    assert_eq!(code(&sperner(&["table", "comp", "--n", "6"])), 2);
    assert_eq!(code(&sperner(&["search", "pi", "--n", "6", "--k", "3", "--mode", "exact"])), 2);
    assert_eq!(code(&sperner(&["search", "pi", "--n", "4", "--k", "1"])), 2);
    assert_eq!(code(&sperner(&["frobnicate"])), 2);
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = path(dir.path(), "bad.json");
    let mk = |families: &str| {
        format!(
            "{{\"schema_version\":1,\"n\":2,\"k\":2,\"encoding\":\"elements\",\"families\":{families},\
             \"measures\":{{\"sum\":2,\"product\":1}},\
             \"provenance\":{{\"source\":\"search\",\"method\":\"manual\"}},\"created\":\"2026-01-01T00:00:00Z\"}}"
        )
    };
    fs::write(&bad, mk("[[[1]],[[1,2]]]")).unwrap();
    let o = sperner(&["verify", &bad]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("INVALID"));
    assert!(stderr(&o).contains("family 1 member {1} ⊆ family 2 member {1,2}"), "{}", stderr(&o));

    fs::write(&bad, mk("[[[1]],[]]")).unwrap();
    let o = sperner(&["verify", &bad]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("families must be non-empty"));

    fs::write(&bad, mk("[[[1]],[[2]]]")).unwrap();
    assert_eq!(code(&sperner(&["verify", &bad])), 0);

    fs::write(&bad, "not json").unwrap();
    assert_eq!(code(&sperner(&["verify", &bad])), 2);
    assert_eq!(code(&sperner(&["verify", &path(dir.path(), "missing.json")])), 2);
}

#[test]
fn search_exit_codes_and_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "s.json");
    let o = sperner(&["search", "sigma", "--n", "4", "--k", "2", "--mode", "exact", "--out", &out]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("value: 10"));
    assert!(stdout(&o).contains("optimal: true"));
    assert_eq!(code(&sperner(&["verify", &out])), 0);

    // A tiny node budget cannot finish n = 5; best-so-far is still written.
    let o = sperner(&["search", "pi", "--n", "5", "--k", "3", "--budget-nodes", "10", "--out", &out]);
    assert_eq!(code(&o), 3);
    assert!(stdout(&o).contains("optimal: false"));
    assert_eq!(code(&sperner(&["verify", &out])), 0);

    let o = sperner(&["search", "pi", "--n", "5", "--k", "4", "--mode", "heuristic", "--seed", "1", "--target", "108"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stderr(&o).contains("target 108: met"));
}

#[test]
fn thread_count_does_not_change_the_witness() {
    let fams = |o: &Output| Witness::parse(&stdout(o)).unwrap().families;
    let a = sperner(&["search", "pi", "--n", "4", "--k", "3", "--threads", "1"]);
    let b = sperner(&["search", "pi", "--n", "4", "--k", "3", "--threads", "3"]);
    assert_eq!(fams(&a), fams(&b));
}

#[test]
fn help_goes_to_stdout() {
    let o = sperner(&["--help"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("construct"));
}

#[test]
fn tables() {
    let o = sperner(&["table", "comp", "--n", "4"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 17);
    assert!(text.lines().nth(1).unwrap().starts_with("4,1,7,7,true,"));

    let o = sperner(&["table", "bounds", "--n", "8", "--k", "2..4"]);
    let text = stdout(&o);
    assert!(text.starts_with("n,k,bound_id,value,applicable\n"));
    assert!(text.contains("8,2,SIGMA_LOWER_SIMPLIFIED,210,true"));
    assert!(text.contains("8,2,SIGMA_UPPER,226,true"));
    assert!(text.contains("8,4,"));

    let o = sperner(&["table", "comp", "--n", "2", "--format", "json"]);
    let rows: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 4);
}

#[test]
fn bounds_command() {
    let o = sperner(&["bounds", "--n", "4", "--k", "3", "--m", "4"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("PI_UPPER               16384/729"));
    assert!(text.contains("COMP_LOWER             12"));
    let o = sperner(&["bounds", "--n", "4", "--k", "3", "--ell", "1", "--format", "csv"]);
    assert!(stdout(&o).contains("4,3,ANTICHAIN_COMP,10,true"));
}
