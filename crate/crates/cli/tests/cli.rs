use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name].iter().collect();
    p.to_str().unwrap().to_string()
}

fn aut(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aut")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn identity_times_identity_is_identity() {
    let id = fixture("id.elem");
    let o = aut(&["elem", "mul", &id, &id]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "elem { q = 2; scalar = 1; window = []; core = [] }\n");
}

#[test]
fn periodic_examples_pass_the_comparator() {
    let o = aut(&["invariant", "compare", &fixture("q1.pre"), &fixture("q2.pre")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("verdict=passes"));
}

#[test]
fn small_chain_over_f3_is_rejected_as_input() {
    let o = aut(&["lab", "simplicity", "--q", "3", "--inner", "0..1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("hypothesis violated"), "{}", stderr(&o));
}

#[test]
fn non_strongly_convex_window_is_an_input_error() {
    let dir = std::env::temp_dir().join(format!("aut-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("gap.elem");
    std::fs::write(&bad, "elem { q = 2; scalar = 1; window = [1, 3]; core = [[1,0],[0,1]] }\n").unwrap();
    let o = aut(&["elem", "inv", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("not strongly convex"), "{}", stderr(&o));
    assert!(stderr(&o).contains("gap.elem"));
}

#[test]
fn printed_elements_parse_back() {
    let dir = std::env::temp_dir().join(format!("aut-cli-rt-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let o = aut(&["elem", "commutator", &fixture("upper.elem"), &fixture("swap.elem")]);
    assert_eq!(o.status.code(), Some(0));
    let path = dir.join("c.elem");
    std::fs::write(&path, stdout(&o)).unwrap();
    let inv = aut(&["elem", "inv", path.to_str().unwrap()]);
    std::fs::write(&path, stdout(&inv)).unwrap();
    let back = aut(&["elem", "inv", path.to_str().unwrap()]);
    assert_eq!(stdout(&back), stdout(&o));
}

#[test]
fn triangular_inverse_rejects_non_upper_elements() {
    assert_eq!(aut(&["elem", "inv-tri", &fixture("upper.elem")]).status.code(), Some(0));
    assert_eq!(aut(&["elem", "inv-tri", &fixture("swap.elem")]).status.code(), Some(2));
}

#[test]
fn enumeration_matches_order_formula() {
    let o = aut(&["trunc", "enumerate", "--q", "3", "--region", "0..3", "--spec", &fixture("pairs.pre")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let line = stdout(&o);
    assert!(line.contains("match=true"), "{line}");
    assert!(line.starts_with("config=q3:"));
}

#[test]
fn negative_regions_are_accepted() {
    let o = aut(&["trunc", "index", "--q", "3", "--outer", "-1..2", "--inner", "0..1"]);
    assert_eq!(stdout(&o), "config=q3:[-1,0,1,2] index=12\n");
}

#[test]
fn normal_closure_of_a_transvection_contains_sl() {
    let o = aut(&["trunc", "normal-closure", &fixture("transvection5.mat")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("order=120 contains_sl=true"), "{}", stdout(&o));
}

#[test]
fn closure_reports_generator_hashes() {
    let o = aut(&["trunc", "closure", &fixture("upper_gens.mat")]);
    let line = stdout(&o);
    let gens = line.split_whitespace().find_map(|w| w.strip_prefix("generators=")).unwrap();
    assert_eq!(gens.split(',').count(), 2);
    assert!(line.trim_end().ends_with("order=8"));
}

#[test]
fn lab_output_is_deterministic_and_summarized() {
    let args = ["lab", "quasicentre", "--q", "2", "--inner", "0..1", "--seed", "7"];
    let a = aut(&args);
    let b = aut(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).lines().last().unwrap().starts_with("suite=quasicentre cases="));
}

#[test]
fn example_family_checks_base_shape() {
    let o = aut(&["lab", "examples", "--family", "B(0)", "--inner", "-2..2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = aut(&["lab", "examples", "--family", "H", "--inner", "0..3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(aut(&["elem"]).status.code(), Some(2));
    assert_eq!(aut(&["trunc", "order", "--q", "6", "--region", "0..1"]).status.code(), Some(2));
}
