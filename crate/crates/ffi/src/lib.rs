//! C ABI over the `epirules` rule learner.
//!
//! Every function returns an [`EprStatus`]; on failure the message is
//! available from [`epr_last_error`] on the same thread. Handles are opaque
//! and released with their matching `_free` function. Strings returned
//! through out-parameters are owned by the caller and released with
//! [`epr_string_free`].

use std::cell::RefCell;
use std::collections::BTreeSet;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use epirules::dataset::{ingest_csv, DataError, Dataset};
use epirules::language::{format_rule, parse_rule, Rule};
use epirules::pipeline::{audit_rules, learn, parse_rules_json, ExperimentConfig};
use epirules::value::{nearest, RestrictedValueSet, Value};
use epirules::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EprStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Value = 4,
    Io = 5,
    Data = 6,
    Config = 7,
    Panic = 8,
}

pub struct EprValueSet(RestrictedValueSet);
pub struct EprRule(Rule);
pub struct EprDataset(Dataset);
pub struct EprConfig(ExperimentConfig);
pub struct EprRuleSet(Vec<Rule>);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(EprStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Value(_) | Error::Decimal(_) => EprStatus::Value,
            Error::Rule(_) | Error::Json(_) => EprStatus::Parse,
            Error::Io(_) | Error::Data(DataError::Io(_)) => EprStatus::Io,
            Error::Data(_) | Error::Csv(_) | Error::Synth(_) => EprStatus::Data,
            Error::Config(_) | Error::Model(_) | Error::Rationality(_) | Error::Semantics(_) => EprStatus::Config,
        };
        Failure(status, e.to_string())
    }
}

fn fail<E: Into<Error>>(e: E) -> Failure {
    Failure::from(e.into())
}

fn set_last_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(text));
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> EprStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => EprStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(&message);
            status
        }
        Err(_) => {
            set_last_error("panic inside epirules");
            EprStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure(EprStatus::NullPointer, format!("{what} is null")))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(EprStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(EprStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(EprStatus::NullPointer, "output pointer is null".into()));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_handle<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    put(out, Box::into_raw(Box::new(value)))
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|_| Failure(EprStatus::InvalidUtf8, "string contains NUL".into()))?;
    put(out, c.into_raw())
}

unsafe fn free<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Message for the most recent failure on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn epr_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn epr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a JSON array of decimal strings such as `["0","0.5","1"]`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn epr_value_set_from_json(json: *const c_char, out: *mut *mut EprValueSet) -> EprStatus {
    guard(|| {
        let set: RestrictedValueSet = serde_json::from_str(text(json, "json")?).map_err(fail)?;
        put_handle(out, EprValueSet(set))
    })
}

/// # Safety
/// `set` must be null or a handle from [`epr_value_set_from_json`].
#[no_mangle]
pub unsafe extern "C" fn epr_value_set_free(set: *mut EprValueSet) {
    free(set)
}

/// # Safety
/// `set` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn epr_value_set_len(set: *const EprValueSet) -> usize {
    set.as_ref().map_or(0, |s| s.0.len())
}

/// Nearest value in the set, both sides counted in hundredths.
///
/// # Safety
/// `set` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn epr_nearest(set: *const EprValueSet, hundredths: u32, out: *mut u32) -> EprStatus {
    guard(|| {
        let set = borrow(set, "value set")?;
        let v = Value::new(hundredths).map_err(fail)?;
        put(out, nearest(v, &set.0).map_err(fail)?.numerator())
    })
}

/// # Safety
/// `text_form` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn epr_rule_parse(text_form: *const c_char, out: *mut *mut EprRule) -> EprStatus {
    guard(|| put_handle(out, EprRule(parse_rule(text(text_form, "rule")?).map_err(fail)?)))
}

/// # Safety
/// `rule` must be null or a handle from [`epr_rule_parse`].
#[no_mangle]
pub unsafe extern "C" fn epr_rule_free(rule: *mut EprRule) {
    free(rule)
}

/// # Safety
/// `rule` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn epr_rule_format(rule: *const EprRule, out: *mut *mut c_char) -> EprStatus {
    guard(|| put_string(out, format_rule(&borrow(rule, "rule")?.0)))
}

/// # Safety
/// `rule` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn epr_rule_to_json(rule: *const EprRule, out: *mut *mut c_char) -> EprStatus {
    guard(|| put_string(out, serde_json::to_string(&borrow(rule, "rule")?.0).map_err(fail)?))
}

/// Loads a CSV file. `scale_points` of 0 reads values as probabilities;
/// otherwise cells are Likert ratings on that many points.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn epr_dataset_load_csv(
    path: *const c_char,
    scale_points: i64,
    out: *mut *mut EprDataset,
) -> EprStatus {
    guard(|| {
        let scale = (scale_points != 0).then_some(scale_points);
        put_handle(out, EprDataset(ingest_csv(text(path, "path")?, scale).map_err(fail)?))
    })
}

/// # Safety
/// `dataset` must be null or a handle from [`epr_dataset_load_csv`].
#[no_mangle]
pub unsafe extern "C" fn epr_dataset_free(dataset: *mut EprDataset) {
    free(dataset)
}

/// # Safety
/// `dataset` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn epr_dataset_len(dataset: *const EprDataset) -> usize {
    dataset.as_ref().map_or(0, |d| d.0.len())
}

/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn epr_config_from_json(json: *const c_char, out: *mut *mut EprConfig) -> EprStatus {
    guard(|| {
        put_handle(
            out,
            EprConfig(ExperimentConfig::from_json(text(json, "json")?).map_err(fail)?),
        )
    })
}

/// # Safety
/// `config` must be null or a handle from [`epr_config_from_json`].
#[no_mangle]
pub unsafe extern "C" fn epr_config_free(config: *mut EprConfig) {
    free(config)
}

/// Learns rules for every configured tuple, treating the whole dataset as
/// the training split.
///
/// # Safety
/// `config` and `dataset` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn epr_learn(
    config: *const EprConfig,
    dataset: *const EprDataset,
    out: *mut *mut EprRuleSet,
) -> EprStatus {
    guard(|| {
        let cfg = &borrow(config, "config")?.0;
        let data = &borrow(dataset, "dataset")?.0;
        cfg.check_schema(data.arguments()).map_err(fail)?;
        let mut rules = BTreeSet::new();
        for (tuple, rel) in &cfg.tuples {
            rules.extend(learn(data, tuple, rel, cfg).map_err(Failure::from)?);
        }
        put_handle(out, EprRuleSet(rules.into_iter().collect()))
    })
}

/// # Safety
/// `set` must be null or a handle from [`epr_learn`].
#[no_mangle]
pub unsafe extern "C" fn epr_rule_set_free(set: *mut EprRuleSet) {
    free(set)
}

/// # Safety
/// `set` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn epr_rule_set_len(set: *const EprRuleSet) -> usize {
    set.as_ref().map_or(0, |s| s.0.len())
}

/// # Safety
/// `set` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn epr_rule_set_get_text(
    set: *const EprRuleSet,
    index: usize,
    out: *mut *mut c_char,
) -> EprStatus {
    guard(|| {
        let set = borrow(set, "rule set")?;
        let rule = set.0.get(index).ok_or_else(|| {
            Failure(
                EprStatus::Value,
                format!("index {index} out of range for {} rules", set.0.len()),
            )
        })?;
        put_string(out, format_rule(rule))
    })
}

/// # Safety
/// `set` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn epr_rule_set_to_json(set: *const EprRuleSet, out: *mut *mut c_char) -> EprStatus {
    guard(|| put_string(out, serde_json::to_string(&borrow(set, "rule set")?.0).map_err(fail)?))
}

/// Irrationality audit of a rules JSON document against the configured
/// tuples; writes the report as JSON.
///
/// # Safety
/// `rules_json` must be a NUL-terminated string; `config` must be a live
/// handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn epr_audit_json(
    rules_json: *const c_char,
    config: *const EprConfig,
    out: *mut *mut c_char,
) -> EprStatus {
    guard(|| {
        let rules = parse_rules_json(text(rules_json, "rules json")?).map_err(fail)?;
        let report = audit_rules(&rules, &borrow(config, "config")?.0.tuples).map_err(Failure::from)?;
        put_string(out, serde_json::to_string(&report).map_err(fail)?)
    })
}
