//! The checked-in fuzz corpus must keep exercising both the accept and reject paths.

use std::fs;
use std::path::Path;

use symdomain::json::{bisympl_from_json, element_from_json, two_form_from_json};

fn corpus(target: &str) -> Vec<(String, String)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut out: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read_to_string(&p).unwrap(),
            )
        })
        .collect();
    out.sort();
    out
}

fn check(target: &str, parses: impl Fn(&str) -> bool) {
    for (name, text) in corpus(target) {
        let expect_ok = !(name.starts_with("bad_") || name == "overflow");
        assert_eq!(parses(&text), expect_ok, "{target}/{name}");
    }
}

#[test]
fn element_seeds() {
    check("element_json", |s| element_from_json(s).is_ok());
}

#[test]
fn two_form_seeds() {
    check("two_form_json", |s| two_form_from_json(s).is_ok());
}

#[test]
fn bisympl_seeds() {
    check("bisympl_json", |s| bisympl_from_json(s).is_ok());
}
