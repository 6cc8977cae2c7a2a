use std::ffi::{c_char, CStr, CString};
use std::ptr;

use epirules_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(s: *mut c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_owned();
    epr_string_free(s);
    out
}

unsafe fn last_error() -> String {
    CStr::from_ptr(epr_last_error()).to_str().unwrap().to_owned()
}

const CONFIG: &str = r#"{
    "value_set": ["0", "0.25", "0.5", "0.75", "1"],
    "tuples": [{"target": "Dw6", "influencers": ["Dw2", "Dw5", "Dw3"], "relations": [1, 1, 0]}],
    "tau_support": "0.2",
    "tau_confidence": "0.5",
    "seed": 1
}"#;

const TABLE: &str = "id,Dw6,Dw2,Dw5,Dw3\n004,0.2,0.3,0.3,0.3\n026,0.4,0.6,0.3,0.6\n111,0.6,0.1,0.6,0.2\n";

#[test]
fn value_set_and_nearest() {
    unsafe {
        let mut set = ptr::null_mut();
        assert_eq!(
            epr_value_set_from_json(c(r#"["0","0.25","0.5","0.75","1"]"#).as_ptr(), &mut set),
            EprStatus::Ok
        );
        assert_eq!(epr_value_set_len(set), 5);
        let mut n = 0;
        assert_eq!(epr_nearest(set, 30, &mut n), EprStatus::Ok);
        assert_eq!(n, 50);
        assert_eq!(epr_nearest(set, 80, &mut n), EprStatus::Ok);
        assert_eq!(n, 75);
        assert_eq!(epr_nearest(set, 101, &mut n), EprStatus::Value);
        epr_value_set_free(set);

        let mut bad = ptr::null_mut();
        assert_eq!(
            epr_value_set_from_json(c(r#"["0","0.3","1"]"#).as_ptr(), &mut bad),
            EprStatus::Parse
        );
        assert!(bad.is_null());
        assert!(!last_error().is_empty());
    }
}

#[test]
fn rule_round_trip() {
    unsafe {
        let mut rule = ptr::null_mut();
        let text = "p(Dw2) > 0.5 & p(Dw5) <= 0.5 -> p(Dw6) < 0.25";
        assert_eq!(epr_rule_parse(c(text).as_ptr(), &mut rule), EprStatus::Ok);
        let mut out = ptr::null_mut();
        assert_eq!(epr_rule_format(rule, &mut out), EprStatus::Ok);
        let formatted = take(out);
        let mut again = ptr::null_mut();
        assert_eq!(epr_rule_parse(c(&formatted).as_ptr(), &mut again), EprStatus::Ok);
        assert_eq!(epr_rule_to_json(rule, &mut out), EprStatus::Ok);
        let a = take(out);
        assert_eq!(epr_rule_to_json(again, &mut out), EprStatus::Ok);
        assert_eq!(a, take(out));
        epr_rule_free(rule);
        epr_rule_free(again);

        assert_eq!(epr_rule_parse(c("p(A) >").as_ptr(), &mut rule), EprStatus::Parse);
    }
}

#[test]
fn learn_and_audit() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.csv");
    std::fs::write(&path, TABLE).unwrap();
    unsafe {
        let mut data = ptr::null_mut();
        assert_eq!(
            epr_dataset_load_csv(c(path.to_str().unwrap()).as_ptr(), 0, &mut data),
            EprStatus::Ok
        );
        assert_eq!(epr_dataset_len(data), 3);
        let mut cfg = ptr::null_mut();
        assert_eq!(epr_config_from_json(c(CONFIG).as_ptr(), &mut cfg), EprStatus::Ok);

        let mut rules = ptr::null_mut();
        assert_eq!(epr_learn(cfg, data, &mut rules), EprStatus::Ok);
        let n = epr_rule_set_len(rules);
        assert!(n > 0);
        let mut out = ptr::null_mut();
        for i in 0..n {
            assert_eq!(epr_rule_set_get_text(rules, i, &mut out), EprStatus::Ok);
            assert!(take(out).contains("-> p(Dw6)"));
        }
        assert_eq!(epr_rule_set_get_text(rules, n, &mut out), EprStatus::Value);

        assert_eq!(epr_rule_set_to_json(rules, &mut out), EprStatus::Ok);
        let json = take(out);
        assert_eq!(epr_audit_json(c(&json).as_ptr(), cfg, &mut out), EprStatus::Ok);
        let report: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        assert_eq!(report["irrational"], 0);

        let flagged = r#"["p(Dw2) > 0.5 & p(Dw3) < 0.5 & p(Dw5) > 0.5 -> p(Dw6) < 0.5"]"#;
        assert_eq!(epr_audit_json(c(flagged).as_ptr(), cfg, &mut out), EprStatus::Ok);
        let report: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        assert_eq!(report["irrational"], 1);

        epr_rule_set_free(rules);
        epr_config_free(cfg);
        epr_dataset_free(data);
    }
}

#[test]
fn error_statuses() {
    unsafe {
        let mut data = ptr::null_mut();
        assert_eq!(
            epr_dataset_load_csv(c("/nonexistent/x.csv").as_ptr(), 0, &mut data),
            EprStatus::Io
        );
        assert_eq!(epr_dataset_load_csv(ptr::null(), 0, &mut data), EprStatus::NullPointer);
        let mut cfg = ptr::null_mut();
        assert_eq!(
            epr_config_from_json(c(r#"{"value_set": []}"#).as_ptr(), &mut cfg),
            EprStatus::Config
        );
        let invalid = [0xffu8, 0xfe, 0];
        assert_eq!(
            epr_config_from_json(invalid.as_ptr().cast(), &mut cfg),
            EprStatus::InvalidUtf8
        );
        let mut rules = ptr::null_mut();
        assert_eq!(epr_learn(ptr::null(), ptr::null(), &mut rules), EprStatus::NullPointer);
        assert_eq!(last_error(), "config is null");
        epr_string_free(ptr::null_mut());
        epr_rule_set_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_every_export() {
    let header = include_str!("../include/epirules.h");
    let source = include_str!("../src/lib.rs");
    let exports: Vec<&str> = source
        .split("extern \"C\" fn ")
        .skip(1)
        .map(|s| s.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 20);
    for name in exports {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
}
