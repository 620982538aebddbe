use std::ffi::{CStr, CString};
use std::ptr;

use stcode_ffi::*;

const REPEATED_Z: &str = "QUBITS 1\nM Z0\nTICK\nM Z0\n";

fn parse(text: &str) -> *mut StcCircuit {
    let t = CString::new(text).unwrap();
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { stc_circuit_parse(t.as_ptr(), &mut c) }, StcStatus::Ok);
    assert!(!c.is_null());
    c
}

fn last_error() -> String {
    let p = stc_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

fn take_string(p: *mut std::ffi::c_char) -> String {
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned();
    unsafe { stc_string_free(p) };
    s
}

#[test]
fn circuit_round_trip() {
    let c = parse(REPEATED_Z);
    unsafe {
        assert_eq!(stc_circuit_num_qubits(c), 1);
        assert_eq!(stc_circuit_depth(c), 2);
        assert_eq!(stc_circuit_num_measurements(c), 2);
        let text = take_string(stc_circuit_to_text(c));
        let again = parse(&text);
        assert_eq!(take_string(stc_circuit_to_text(again)), text);
        stc_circuit_free(again);
        stc_circuit_free(c);
    }
}

#[test]
fn parse_errors_set_status_and_message() {
    let bad = CString::new("QUBITS 1\nFROB 0\n").unwrap();
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { stc_circuit_parse(bad.as_ptr(), &mut c) }, StcStatus::ParseError);
    assert!(c.is_null());
    assert!(last_error().contains("line 2"), "{}", last_error());

    let overlap = CString::new("QUBITS 2\nCX 0 1\nH 1\n").unwrap();
    assert_eq!(unsafe { stc_circuit_parse(overlap.as_ptr(), &mut c) }, StcStatus::ValidationError);

    assert_eq!(unsafe { stc_circuit_parse(ptr::null(), &mut c) }, StcStatus::NullArgument);
    let ok = CString::new(REPEATED_Z).unwrap();
    assert_eq!(unsafe { stc_circuit_parse(ok.as_ptr(), ptr::null_mut()) }, StcStatus::NullArgument);
    let _ = unsafe { stc_circuit_parse(ok.as_ptr(), &mut c) };
    assert!(stc_last_error_message().is_null());
    unsafe { stc_circuit_free(c) };
}

#[test]
fn outcome_code_queries() {
    let c = parse(REPEATED_Z);
    let mut oc = ptr::null_mut();
    unsafe {
        assert_eq!(stc_outcome_code_compute(c, &mut oc), StcStatus::Ok);
        assert_eq!((stc_outcome_code_m(oc), stc_outcome_code_k(oc), stc_outcome_code_r(oc)), (2, 1, 1));
        let mut u = [9u8; 2];
        let mut b = 9u8;
        assert_eq!(stc_outcome_code_check(oc, 0, u.as_mut_ptr(), 2, &mut b), StcStatus::Ok);
        assert_eq!((u, b), ([1, 1], 0));
        assert_eq!(stc_outcome_code_check(oc, 1, u.as_mut_ptr(), 2, &mut b), StcStatus::OutOfRange);
        assert_eq!(stc_outcome_code_check(oc, 0, u.as_mut_ptr(), 3, &mut b), StcStatus::DimensionMismatch);

        let mut s = [0u8; 1];
        assert_eq!(stc_outcome_code_syndrome(oc, [1u8, 0].as_ptr(), 2, s.as_mut_ptr(), 1), StcStatus::Ok);
        assert_eq!(s, [1]);
        assert_eq!(stc_outcome_code_syndrome(oc, [1u8, 1].as_ptr(), 2, s.as_mut_ptr(), 1), StcStatus::Ok);
        assert_eq!(s, [0]);
        assert_eq!(
            stc_outcome_code_syndrome(oc, [1u8].as_ptr(), 1, s.as_mut_ptr(), 1),
            StcStatus::DimensionMismatch
        );
        let json = take_string(stc_outcome_code_to_json(oc));
        assert!(json.contains("\"schema_version\": 1"));
        stc_outcome_code_free(oc);
        stc_circuit_free(c);
    }
}

#[test]
fn spacetime_code_queries() {
    let c = parse(REPEATED_Z);
    let mut code = ptr::null_mut();
    unsafe {
        assert_eq!(stc_spacetime_code_build(c, &mut code), StcStatus::Ok);
        assert_eq!(stc_spacetime_code_num_qubits(code), 3);
        assert_eq!(stc_spacetime_code_r(code), 1);
        assert_eq!(stc_spacetime_code_num_logicals(code), 2);
        let stab = take_string(stc_spacetime_code_stabilizer(code, 0));
        assert_eq!(stab, "1.5:Z0");
        assert!(stc_spacetime_code_stabilizer(code, 1).is_null());

        let mut s = [0u8; 1];
        let f = CString::new("1.5:X0").unwrap();
        assert_eq!(stc_spacetime_code_syndrome(code, f.as_ptr(), s.as_mut_ptr(), 1), StcStatus::Ok);
        assert_eq!(s, [1]);
        let bad = CString::new("9.5:X0").unwrap();
        let st = stc_spacetime_code_syndrome(code, bad.as_ptr(), s.as_mut_ptr(), 1);
        assert_ne!(st, StcStatus::Ok);
        assert!(!last_error().is_empty());

        let alist = take_string(stc_spacetime_code_to_alist(code));
        assert!(alist.starts_with("6 1\n"));
        assert!(take_string(stc_spacetime_code_to_json(code)).contains("\"N\": 3"));
        stc_spacetime_code_free(code);
        stc_circuit_free(c);
    }
}

#[test]
fn simulate_is_deterministic() {
    let c = parse("QUBITS 2\nM Z0\nM Z1\nTICK\nCX 0 1\nTICK\nM Z1\nM Z0\n");
    let mut a = StcTrialReport::default();
    let mut b = StcTrialReport::default();
    unsafe {
        assert_eq!(stc_simulate(c, 0.01, 1, 500, 42, &mut a), StcStatus::Ok);
        assert_eq!(stc_simulate(c, 0.01, 1, 500, 42, &mut b), StcStatus::Ok);
        assert_eq!(a, b);
        assert_eq!(a.trials, 500);
        assert_eq!(a.successes + a.outcome_failures + a.residual_failures, 500);
        let mut z = StcTrialReport::default();
        assert_eq!(stc_simulate(c, 0.0, 1, 100, 1, &mut z), StcStatus::Ok);
        assert_eq!(z.successes, 100);
        assert_eq!(stc_simulate(c, 0.01, 1, 10, 1, ptr::null_mut()), StcStatus::NullArgument);
        stc_circuit_free(c);
    }
}

#[test]
fn free_functions_accept_null() {
    unsafe {
        stc_circuit_free(ptr::null_mut());
        stc_outcome_code_free(ptr::null_mut());
        stc_spacetime_code_free(ptr::null_mut());
        stc_string_free(ptr::null_mut());
    }
}

#[test]
fn status_strings() {
    let s = unsafe { CStr::from_ptr(stc_status_string(StcStatus::BudgetExceeded)) };
    assert_eq!(s.to_str().unwrap(), "budget exceeded");
}

#[test]
fn header_declares_exports() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/stcode.h")).unwrap();
    for name in [
        "stc_circuit_parse",
        "stc_circuit_free",
        "stc_outcome_code_compute",
        "stc_outcome_code_syndrome",
        "stc_spacetime_code_build",
        "stc_spacetime_code_syndrome",
        "stc_simulate",
        "stc_last_error_message",
        "typedef struct StcCircuit StcCircuit",
        "STC_STATUS_PARSE_ERROR = 3",
    ] {
        assert!(h.contains(name), "missing {name}");
    }
}
