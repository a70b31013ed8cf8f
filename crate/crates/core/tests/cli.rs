//! End-to-end tests of the command line front end, run in process through
//! `cli::run_slice` so exit codes and both output streams can be checked.

use conesig::cli::{check_document, run_slice};
use conesig::simplicial::{product_facets, simplex_facets, sphere_facets};

const HOPF: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/hopf.toml");
const RAW_HOPF: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/raw_hopf.toml");

fn temp_doc(name: &str, text: &str) -> String {
    let path = std::env::temp_dir().join(format!("conesig-{}-{name}", std::process::id()));
    std::fs::write(&path, text).expect("write temp document");
    path.to_str().expect("utf8 temp path").to_string()
}

fn facet_list(facets: &[Vec<u32>]) -> String {
    let rows: Vec<String> = facets
        .iter()
        .map(|f| {
            let items: Vec<String> = f.iter().map(u32::to_string).collect();
            format!("[{}]", items.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

#[test]
fn shift_is_zero_for_c_one_on_an_odd_fiber() {
    let (code, out, err) = run_slice(&["shift", "--c", "1", "--f", "5"]);
    assert_eq!(code, 0, "stderr: {err}");
    assert_eq!(
        out,
        "shift: f = 5, c = 1\n\
         \x20 survival threshold  3\n\
         \x20 kept fiber degrees  3\n\
         \x20 derived shift k     0\n\
         \x20 published shift k   0\n\
         \x20 weight index        2\n"
    );
}

#[test]
fn shift_reports_the_even_fiber_discrepancy() {
    let (code, out, _) = run_slice(&["shift", "--c", "1/3", "--f", "4", "--format", "machine"]);
    assert_eq!(code, 0);
    assert_eq!(
        out,
        "shift f=4 c=1/3 cutoff_value=7/2 kept=4 normative=1 literal=2 discrepancy=1 weight_index=0\n"
    );
    let (code, out, _) = run_slice(&["shift", "--c", "1/3", "--f", "4"]);
    assert_eq!(code, 0);
    assert!(out.contains("derived shift k     1"), "out: {out}");
    assert!(out.contains("published shift k   2"), "out: {out}");
    assert!(out.contains("off by 1"), "out: {out}");
}

#[test]
fn shift_rejects_nonpositive_c() {
    let (code, out, err) = run_slice(&["shift", "--c", "0", "--f", "3"]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert_eq!(err, "error: c = 0 out of range: need 0 < c <= 1\n");
}

#[test]
fn circle_bundle_document_tables_are_fully_reported() {
    let (code, out, err) = run_slice(&["ih-table", "--input", HOPF, "--format", "machine"]);
    assert_eq!(code, 0, "stderr: {err}");
    let want = "\
command name=ih-table b=2 f=1 n=4 k=0
total variant=abs-q degree=0 dim=1
total variant=abs-q degree=1 dim=0
total variant=abs-q degree=2 dim=1
total variant=abs-q degree=3 dim=0
slot variant=abs-q i=0 j=0 dim=1 summands=E(0,0):1
slot variant=abs-q i=1 j=0 dim=0 summands=E(1,0):0
slot variant=abs-q i=2 j=0 dim=1 summands=E(2,0):0+im_d2(0,1):1
total variant=rel-q degree=0 dim=0
total variant=rel-q degree=1 dim=0
total variant=rel-q degree=2 dim=1
total variant=rel-q degree=3 dim=0
total variant=rel-q degree=4 dim=1
slot variant=rel-q i=0 j=2 dim=1 summands=E(0,1):0+im_d2(0,1)*:1
slot variant=rel-q i=1 j=2 dim=0 summands=E(1,1):0
slot variant=rel-q i=2 j=2 dim=1 summands=E(2,1):1
total variant=rel-p degree=0 dim=0
total variant=rel-p degree=1 dim=0
total variant=rel-p degree=2 dim=1
total variant=rel-p degree=3 dim=0
total variant=rel-p degree=4 dim=1
slot variant=rel-p i=0 j=2 dim=1 summands=E(0,1):0+im_d2(0,1)*:1
slot variant=rel-p i=1 j=2 dim=0 summands=E(1,1):0
slot variant=rel-p i=2 j=2 dim=1 summands=E(2,1):1
middle-total k=0 dim=1
middle i=0 j=2 dim=1 summands=im_d2(0,1):1
";
    assert_eq!(out, want);
}

#[test]
fn raw_grid_form_matches_the_named_form() {
    let named = run_slice(&["ih-table", "--input", HOPF, "--format", "machine"]);
    let raw = run_slice(&["ih-table", "--input", RAW_HOPF, "--format", "machine"]);
    assert_eq!(named, raw);
}

#[test]
fn identical_inputs_give_byte_identical_output() {
    for args in [
        vec!["ih-table", "--input", HOPF],
        vec!["signature", "--input", HOPF, "--format", "machine"],
        vec!["verify", "duality", "--seed", "7", "--format", "machine"],
    ] {
        assert_eq!(run_slice(&args), run_slice(&args), "args: {args:?}");
    }
}

#[test]
fn coned_circle_bundle_document_has_signature_one() {
    let (code, out, err) = run_slice(&["signature", "--input", HOPF, "--format", "machine"]);
    assert_eq!(code, 0, "stderr: {err}");
    assert_eq!(
        out,
        "command name=signature b=2 f=1 n=4 k=0\n\
         interior pos=0 neg=0 zero=0 value=0 rank=0\n\
         tau s=2 value=1\n\
         signature k=0 tau_sum=1 end_correction=-1 global=1\n"
    );
    // The same weight spelled as a scaling parameter.
    let (code, out, _) = run_slice(&["signature", "--input", HOPF, "--c", "1"]);
    assert_eq!(code, 0);
    assert!(out.contains("global          1"), "out: {out}");
}

#[test]
fn trivial_product_document_has_zero_signature() {
    let facets = product_facets(&simplex_facets(3), &sphere_facets(1));
    let text = format!(
        "[simplicial]\nvertices = 12\nfacets = {}\n\n\
         [bundle]\nbase = \"sphere 2\"\nfiber = \"sphere 1\"\n",
        facet_list(&facets)
    );
    let path = temp_doc("trivial.toml", &text);
    let (code, out, err) = run_slice(&["signature", "--input", &path, "--format", "machine"]);
    std::fs::remove_file(&path).ok();
    assert_eq!(code, 0, "stderr: {err}");
    assert!(
        out.ends_with("signature k=0 tau_sum=0 end_correction=0 global=0\n"),
        "out: {out}"
    );
}

#[test]
fn negative_weights_are_accepted_on_the_command_line() {
    let (code, out, err) = run_slice(&["ih-table", "--input", HOPF, "--k", "-1", "--format", "machine"]);
    assert_eq!(code, 0, "stderr: {err}");
    assert!(out.starts_with("command name=ih-table b=2 f=1 n=4 k=-1\n"), "out: {out}");
}

#[test]
fn weight_can_come_from_the_document_and_flags_win() {
    let text = "[bundle]\nbase = \"sphere 2\"\nfiber = \"sphere 1\"\n\n\
                [[bundle.diff]]\npage = 2\nsource = [0, 1]\nmatrix = [[\"1\"]]\n\n\
                [parameters]\nk = 1\n";
    let path = temp_doc("param.toml", text);
    let (code, out, _) = run_slice(&["ih-table", "--input", &path, "--format", "machine"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("command name=ih-table b=2 f=1 n=4 k=1\n"), "out: {out}");
    let (code, out, _) =
        run_slice(&["ih-table", "--input", &path, "--k", "0", "--format", "machine"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("command name=ih-table b=2 f=1 n=4 k=0\n"), "out: {out}");
    std::fs::remove_file(&path).ok();
}

#[test]
fn weight_given_both_ways_is_an_input_error() {
    let (code, out, err) = run_slice(&["signature", "--input", HOPF, "--c", "1", "--k", "0"]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert_eq!(err, "error: both k and c were given; pick one\n");
}

#[test]
fn document_without_a_bundle_section_is_an_input_error() {
    let path = temp_doc("nobundle.toml", "[simplicial]\nfacets = [[0, 1, 2, 3]]\n");
    let (code, _, err) = run_slice(&["ih-table", "--input", &path]);
    std::fs::remove_file(&path).ok();
    assert_eq!(code, 2);
    assert_eq!(err, "error: document has no bundle section\n");
}

#[test]
fn odd_dimensional_document_is_an_input_error() {
    let text = "[simplicial]\nvertices = 4\nfacets = [[0, 1, 2, 3]]\n\n\
                [bundle]\nbase = \"sphere 2\"\nfiber = \"point\"\n";
    let path = temp_doc("odd.toml", text);
    let (code, _, err) = run_slice(&["signature", "--input", &path]);
    std::fs::remove_file(&path).ok();
    assert_eq!(code, 2);
    assert!(err.contains("even dimension"), "stderr: {err}");
}

#[test]
fn missing_input_file_is_an_input_error() {
    let (code, _, err) = run_slice(&["ih-table", "--input", "/nonexistent/x.toml"]);
    assert_eq!(code, 2);
    assert!(err.starts_with("error: /nonexistent/x.toml: "), "stderr: {err}");
}

#[test]
fn oracle_suite_passes_a_hundred_cases() {
    let (code, out, _) =
        run_slice(&["verify", "oracle", "--seed", "7", "--format", "machine"]);
    assert_eq!(code, 0);
    assert!(out.ends_with("summary suite=oracle pass=100 fail=0 total=100\n"), "out: {out}");
}

#[test]
fn quick_suites_pass() {
    for suite in ["novikov", "hodge-consistency"] {
        let (code, out, _) = run_slice(&["verify", suite]);
        assert_eq!(code, 0, "suite {suite}: {out}");
        assert!(out.contains(" pass\n"), "suite {suite}: {out}");
        assert!(!out.contains("FAIL"), "suite {suite}: {out}");
    }
}

#[test]
fn document_checker_accepts_the_fixtures() {
    for path in [HOPF, RAW_HOPF] {
        let text = std::fs::read_to_string(path).expect("fixture");
        let summary = check_document(&text).expect("fixture should validate");
        assert!(summary.contains("global signature 1"), "summary: {summary}");
    }
}

#[test]
fn document_checker_enforces_size_caps() {
    let wide = "[simplicial]\nfacets = [[0, 1, 2, 3, 4, 5, 6, 7, 8]]\n";
    let err = check_document(wide).expect_err("nine-vertex facet is over the cap");
    assert!(err.contains("cap"), "err: {err}");
    let huge_ring = "[bundle]\nbase = \"sphere 31\"\nfiber = \"point\"\n";
    let err = check_document(huge_ring).expect_err("large named ring is over the cap");
    assert!(err.contains("cap"), "err: {err}");
}

#[test]
fn document_checker_reports_parse_errors() {
    let err = check_document("[simplicial\n").expect_err("broken toml");
    assert!(err.starts_with("parse: "), "err: {err}");
    let err = check_document("[simplicial]\nvertices = 2\nfacets = [[0, 1, 2]]\n")
        .expect_err("vertex out of bounds");
    assert!(err.starts_with("input: "), "err: {err}");
}
