use std::ffi::{CStr, CString};
use std::ptr;

use invquot_ffi::*;

const ROT4: &str = r#"{"name": "rot4", "dimension": 2, "conductor": 4, "field": "real",
                      "generators": [[["0", "-1"], ["1", "0"]]]}"#;

fn last_error() -> String {
    unsafe { CStr::from_ptr(iq_last_error()) }.to_str().unwrap().to_owned()
}

#[test]
fn version_is_nonempty() {
    let v = unsafe { CStr::from_ptr(iq_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn representation_and_invariants_round_trip() {
    let json = CString::new(ROT4).unwrap();
    let mut rep = ptr::null_mut();
    unsafe {
        assert_eq!(iq_representation_from_json(json.as_ptr(), &mut rep), IqStatus::Ok);
        let mut order = 0usize;
        assert_eq!(iq_representation_order(rep, &mut order), IqStatus::Ok);
        assert_eq!(order, 4);

        let mut basis = ptr::null_mut();
        assert_eq!(iq_invariants_compute(rep, 0, &mut basis), IqStatus::Ok);
        let mut len = 0usize;
        assert_eq!(iq_invariants_len(basis, &mut len), IqStatus::Ok);
        assert_eq!(len, 3);
        let mut degrees = [0u32; 3];
        assert_eq!(iq_invariants_degrees(basis, degrees.as_mut_ptr(), 3), IqStatus::Ok);
        assert_eq!(degrees, [2, 4, 4]);
        let mut small = [0u32; 2];
        assert_eq!(iq_invariants_degrees(basis, small.as_mut_ptr(), 2), IqStatus::InvalidInput);

        let mut text = ptr::null_mut();
        assert_eq!(iq_invariants_to_json(basis, &mut text), IqStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(CStr::from_ptr(text).to_str().unwrap()).unwrap();
        assert_eq!(v["degrees"], serde_json::json!([2, 4, 4]));
        iq_string_free(text);
        iq_invariants_free(basis);
        iq_representation_free(rep);
    }
}

#[test]
fn errors_set_status_and_message() {
    let bad = CString::new(r#"{"name": "x", "dimension": 2, "conductor": 1, "field": "real", "generators": [[["1", "0"], ["0"]]]}"#).unwrap();
    let mut rep = ptr::null_mut();
    unsafe {
        assert_eq!(iq_representation_from_json(bad.as_ptr(), &mut rep), IqStatus::InvalidInput);
        assert!(rep.is_null());
        assert!(last_error().contains("row 1"), "{}", last_error());
        assert_eq!(iq_representation_from_json(ptr::null(), &mut rep), IqStatus::NullPointer);
        let mut order = 0usize;
        assert_eq!(iq_representation_order(ptr::null(), &mut order), IqStatus::NullPointer);
        let infinite = CString::new(r#"{"name": "x", "dimension": 1, "conductor": 1, "field": "real", "generators": [["2"]]}"#).unwrap();
        assert_eq!(iq_representation_from_json(infinite.as_ptr(), &mut rep), IqStatus::InvalidInput);
        // a success clears the message
        let ok = CString::new(ROT4).unwrap();
        assert_eq!(iq_representation_from_json(ok.as_ptr(), &mut rep), IqStatus::Ok);
        assert_eq!(last_error(), "");
        iq_representation_free(rep);
        iq_representation_free(ptr::null_mut());
        iq_string_free(ptr::null_mut());
    }
}

#[test]
fn run_reports_exit_codes() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/corpus/");
    let call = |args: serde_json::Value| -> (i32, String) {
        let a = CString::new(args.to_string()).unwrap();
        let mut code = -1;
        let mut text = ptr::null_mut();
        unsafe {
            assert_eq!(iq_run(a.as_ptr(), &mut code, &mut text), IqStatus::Ok);
            let s = CStr::from_ptr(text).to_str().unwrap().to_owned();
            iq_string_free(text);
            (code, s)
        }
    };
    let (code, text) = call(serde_json::json!(["quasi-iso", format!("{}negI.json", dir), format!("{}reflX.json", dir)]));
    assert_eq!(code, 1);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["results"]["verdict"], "none");
    let (code, _) = call(serde_json::json!(["invariants", format!("{}zk4.json", dir)]));
    assert_eq!(code, 0);
    let (code, text) = call(serde_json::json!(["nonsense"]));
    assert_eq!(code, 2);
    assert!(text.contains("nonsense"));
    let bad = CString::new("not json").unwrap();
    let (mut code, mut out) = (0, ptr::null_mut());
    assert_eq!(unsafe { iq_run(bad.as_ptr(), &mut code, &mut out) }, IqStatus::InvalidInput);
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/invquot.h")).unwrap();
    for name in [
        "iq_version",
        "iq_last_error",
        "iq_representation_from_json",
        "iq_representation_free",
        "iq_invariants_compute",
        "iq_invariants_to_json",
        "iq_run",
        "iq_string_free",
        "IQ_STATUS_OK",
        "typedef struct IqRepresentation IqRepresentation",
    ] {
        assert!(header.contains(name), "{} missing", name);
    }
}
