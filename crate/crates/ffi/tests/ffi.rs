use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use bibnet_ffi::*;

const SAMPLE: &str = "paper_id,entity_id\np1,a1\np1,a2\np1,a3\np2,a1\np2,a3\np3,a2\np3,a4\n";

unsafe fn records(text: &str) -> *mut BibnetRecords {
    let mut out = ptr::null_mut();
    assert_eq!(
        bibnet_records_parse_csv(text.as_ptr(), text.len(), &mut out),
        BibnetStatus::Ok
    );
    out
}

unsafe fn incidence(text: &str, counting: BibnetCounting) -> *mut BibnetIncidence {
    let r = records(text);
    let mut a = ptr::null_mut();
    assert_eq!(
        bibnet_incidence_build(r, counting, &mut a),
        BibnetStatus::Ok
    );
    bibnet_records_free(r);
    a
}

unsafe fn last_error() -> String {
    CStr::from_ptr(bibnet_last_error())
        .to_string_lossy()
        .into_owned()
}

unsafe fn take_string(p: *mut std::ffi::c_char) -> String {
    let s = CStr::from_ptr(p).to_string_lossy().into_owned();
    bibnet_string_free(p);
    s
}

#[test]
fn fractional_pipeline() {
    unsafe {
        let a = incidence(SAMPLE, BibnetCounting::FractionalEqual);
        let (mut i, mut j) = (0, 0);
        assert_eq!(bibnet_incidence_shape(a, &mut i, &mut j), BibnetStatus::Ok);
        assert_eq!((i, j), (4, 3));
        let mut v = 0.0;
        assert_eq!(bibnet_incidence_get(a, 0, 0, &mut v), BibnetStatus::Ok);
        assert!((v - 1.0 / 3.0).abs() < 1e-15);
        let mut mass = 0.0;
        assert_eq!(bibnet_incidence_mass(a, &mut mass), BibnetStatus::Ok);
        assert!((mass - 3.0).abs() < 1e-9);

        let mut id = ptr::null_mut();
        assert_eq!(bibnet_incidence_row_id(a, 3, &mut id), BibnetStatus::Ok);
        assert_eq!(take_string(id), "a4");

        let mut b = ptr::null_mut();
        assert_eq!(bibnet_network_project(a, &mut b), BibnetStatus::Ok);
        assert_eq!(bibnet_network_size(b), 4);
        assert_eq!(bibnet_network_get(b, 1, 3, &mut v), BibnetStatus::Ok);
        assert_eq!(v, 0.25);
        assert_eq!(bibnet_network_mass(b, &mut mass), BibnetStatus::Ok);
        assert!((mass - 3.0).abs() < 1e-9);
        let (mut d, mut u) = (0.0, 0.0);
        assert_eq!(
            bibnet_network_decompose(b, &mut d, &mut u),
            BibnetStatus::Ok
        );
        assert!((d - 4.0 / 3.0).abs() < 1e-12 && (u - 5.0 / 6.0).abs() < 1e-12);

        let mut text = ptr::null_mut();
        assert_eq!(
            bibnet_network_export(b, BibnetFormat::Pajek, true, &mut text),
            BibnetStatus::Ok
        );
        assert!(take_string(text).starts_with("*Vertices 4\n"));

        let mut audit = std::mem::zeroed::<BibnetAudit>();
        assert_eq!(bibnet_audit(a, 1e-9, &mut audit), BibnetStatus::Ok);
        assert!(audit.conserved);
        assert_eq!(audit.expected, 3);
        assert_eq!(audit.column_violations, 0);

        bibnet_network_free(b);
        bibnet_incidence_free(a);
    }
}

#[test]
fn full_counting_audit_fails() {
    unsafe {
        let a = incidence(SAMPLE, BibnetCounting::Full);
        let mut audit = std::mem::zeroed::<BibnetAudit>();
        assert_eq!(bibnet_audit(a, 1e-9, &mut audit), BibnetStatus::Ok);
        assert!(!audit.conserved);
        assert_eq!(audit.network_mass, 17.0);
        assert_eq!(audit.column_violations, 3);

        let mut text = ptr::null_mut();
        assert_eq!(bibnet_audit_render(a, 1e-9, &mut text), BibnetStatus::Ok);
        assert!(take_string(text).contains("conserved=false\n"));
        bibnet_incidence_free(a);
    }
}

#[test]
fn aggregation_through_handles() {
    unsafe {
        let a = incidence(SAMPLE, BibnetCounting::FractionalEqual);
        let text = "entity_id,group_id\na1,g1\na2,g2\na3,g1\na4,g2\n";
        let mut map = ptr::null_mut();
        assert_eq!(
            bibnet_map_parse(
                text.as_ptr(),
                text.len(),
                BibnetLevel::Author,
                BibnetLevel::Institute,
                &mut map
            ),
            BibnetStatus::Ok
        );
        let mut g = ptr::null_mut();
        assert_eq!(bibnet_incidence_aggregate(a, map, &mut g), BibnetStatus::Ok);
        let mut v = 0.0;
        assert_eq!(bibnet_incidence_get(g, 0, 0, &mut v), BibnetStatus::Ok);
        assert!((v - 2.0 / 3.0).abs() < 1e-12);

        let mut wrong = ptr::null_mut();
        assert_eq!(
            bibnet_map_parse(
                text.as_ptr(),
                text.len(),
                BibnetLevel::Country,
                BibnetLevel::Journal,
                &mut wrong
            ),
            BibnetStatus::Ok
        );
        let mut out = ptr::null_mut();
        assert_eq!(
            bibnet_incidence_aggregate(a, wrong, &mut out),
            BibnetStatus::Aggregation
        );
        assert!(last_error().contains("level"));

        bibnet_map_free(wrong);
        bibnet_map_free(map);
        bibnet_incidence_free(g);
        bibnet_incidence_free(a);
    }
}

#[test]
fn errors_set_status_and_message() {
    unsafe {
        let text = "paper_id,entity_id\np1,a1\np2,a1\np1,a2\n";
        let mut out = ptr::null_mut();
        assert_eq!(
            bibnet_records_parse_csv(text.as_ptr(), text.len(), &mut out),
            BibnetStatus::Parse
        );
        assert!(out.is_null());
        assert!(last_error().contains("line 4"));

        assert_eq!(
            bibnet_incidence_build(ptr::null(), BibnetCounting::Full, &mut ptr::null_mut()),
            BibnetStatus::NullPointer
        );
        assert_eq!(
            bibnet_records_parse_csv(SAMPLE.as_ptr(), SAMPLE.len(), ptr::null_mut()),
            BibnetStatus::NullPointer
        );

        let a = incidence(SAMPLE, BibnetCounting::FractionalEqual);
        let mut v = 0.0;
        assert_eq!(
            bibnet_incidence_get(a, 9, 0, &mut v),
            BibnetStatus::OutOfRange
        );
        let mut audit = std::mem::zeroed::<BibnetAudit>();
        assert_eq!(
            bibnet_audit(a, -1.0, &mut audit),
            BibnetStatus::InvalidArgument
        );
        bibnet_incidence_free(a);

        let s = CStr::from_ptr(bibnet_status_str(BibnetStatus::Parse));
        assert_eq!(s.to_str().unwrap(), "parse error");
    }
}

#[test]
fn jsonl_records() {
    unsafe {
        let text = "{\"paper_id\":\"p\",\"contributors\":[\"a\",\"b\"],\"weights\":[0.6,0.6]}\n";
        let mut out = ptr::null_mut();
        assert_eq!(
            bibnet_records_parse_jsonl(text.as_ptr(), text.len(), &mut out),
            BibnetStatus::Parse
        );
        let text = CString::new("{\"paper_id\":\"p\",\"contributors\":[\"a\"]}").unwrap();
        let bytes = text.as_bytes();
        assert_eq!(
            bibnet_records_parse_jsonl(bytes.as_ptr(), bytes.len(), &mut out),
            BibnetStatus::Ok
        );
        assert_eq!(bibnet_records_len(out), 1);
        bibnet_records_free(out);
    }
}

fn target_dir() -> PathBuf {
    // tests run from <target>/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_header_and_staticlib() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let lib = target_dir().join("libbibnet_ffi.a");
    if !lib.exists() {
        eprintln!("skipping: {} not built", lib.display());
        return;
    }
    let out_dir = std::env::temp_dir().join(format!("bibnet-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&out_dir).unwrap();
    let exe = out_dir.join("smoke");
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(manifest.join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .arg("-o")
        .arg(&exe)
        .status();
    let status = match status {
        Ok(s) => s,
        Err(e) => {
            eprintln!("skipping: no C compiler ({e})");
            return;
        }
    };
    assert!(status.success(), "C smoke test failed to compile");
    let run = Command::new(&exe).output().unwrap();
    assert!(
        run.status.success(),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    assert_eq!(String::from_utf8_lossy(&run.stdout), "ok\n");
}
