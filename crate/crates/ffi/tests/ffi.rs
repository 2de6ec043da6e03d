use std::ffi::{c_char, CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use unibasis_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as c_char; 512];
    unsafe {
        ub_last_error_message(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

fn weyl(d: usize) -> *mut UbBasis {
    let mut b = ptr::null_mut();
    assert_eq!(unsafe { ub_basis_weyl(d, &mut b) }, UbStatus::Ok);
    assert!(!b.is_null());
    b
}

fn scheme(basis: *const UbBasis, mode: UbMode) -> *mut UbScheme {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { ub_scheme_build(basis, mode, &mut s) }, UbStatus::Ok);
    s
}

fn fourier(d: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * d * d);
    for j in 0..d {
        for k in 0..d {
            let angle = 2.0 * std::f64::consts::PI * (j * k) as f64 / d as f64;
            out.push(angle.cos());
            out.push(angle.sin());
        }
    }
    out
}

#[test]
fn weyl_basis_round_trip_through_handles() {
    let b = weyl(3);
    unsafe {
        assert_eq!(ub_basis_dim(b), 3);
        assert_eq!(ub_basis_len(b), 9);
        let mut dev = f64::NAN;
        assert_eq!(ub_basis_verify_orthonormal(b, &mut dev), UbStatus::Ok);
        assert!(dev < 1e-10);
        assert_eq!(ub_basis_verify_depolarizer(b, &mut dev), UbStatus::Ok);
        assert!(dev < 1e-10);

        let mut el = vec![0.0; 18];
        assert_eq!(ub_basis_element(b, 0, el.as_mut_ptr(), el.len()), UbStatus::Ok);
        // Element 0 is the identity.
        for (n, v) in el.chunks(2).enumerate() {
            let expected = if n % 4 == 0 { 1.0 } else { 0.0 };
            assert!((v[0] - expected).abs() < 1e-15 && v[1].abs() < 1e-15);
        }
        assert_eq!(
            ub_basis_element(b, 9, el.as_mut_ptr(), el.len()),
            UbStatus::InvalidArgument
        );
        assert_eq!(ub_basis_element(b, 0, el.as_mut_ptr(), 4), UbStatus::BufferTooSmall);
        assert!(last_error().contains("18"));
        ub_basis_free(b);
    }
}

#[test]
fn schemes_verify_and_swap() {
    let b = weyl(2);
    let s = scheme(b, UbMode::Teleportation);
    unsafe {
        let mut tele = f64::NAN;
        let mut dense = f64::NAN;
        let mut p = vec![0.0; 16];
        assert_eq!(ub_scheme_verify_teleportation(s, &mut tele), UbStatus::Ok);
        assert_eq!(
            ub_scheme_verify_dense_coding(s, &mut dense, p.as_mut_ptr(), p.len()),
            UbStatus::Ok
        );
        assert!(tele < 1e-10 && dense < 1e-10);
        for x in 0..4 {
            for y in 0..4 {
                let expected = if x == y { 1.0 } else { 0.0 };
                assert!((p[x * 4 + y] - expected).abs() < 1e-10);
            }
        }

        let mut swapped = ptr::null_mut();
        assert_eq!(ub_scheme_swap_roles(s, &mut swapped), UbStatus::Ok);
        let mut mode = UbMode::Teleportation;
        assert_eq!(ub_scheme_mode(swapped, &mut mode), UbStatus::Ok);
        assert_eq!(mode, UbMode::DenseCoding);

        let mut extracted = ptr::null_mut();
        assert_eq!(ub_scheme_extract_basis(s, &mut extracted), UbStatus::Ok);
        let mut dev = f64::NAN;
        assert_eq!(ub_basis_verify_orthonormal(extracted, &mut dev), UbStatus::Ok);
        assert!(dev < 1e-10);

        ub_basis_free(extracted);
        ub_scheme_free(swapped);
        ub_scheme_free(s);
        ub_basis_free(b);
    }
}

#[test]
fn teleport_through_the_abi() {
    let b = weyl(2);
    let s = scheme(b, UbMode::Teleportation);
    unsafe {
        // ρ = |+⟩⟨+|
        let rho = [0.5, 0.0, 0.5, 0.0, 0.5, 0.0, 0.5, 0.0];
        let mut out = [0.0; 8];
        let mut probs = [0.0; 4];
        assert_eq!(
            ub_scheme_teleport(s, rho.as_ptr(), out.as_mut_ptr(), probs.as_mut_ptr()),
            UbStatus::Ok
        );
        for (a, b) in rho.iter().zip(&out) {
            assert!((a - b).abs() < 1e-10);
        }
        for p in probs {
            assert!((p - 0.25).abs() < 1e-10);
        }
        let not_a_state = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0];
        assert_eq!(
            ub_scheme_teleport(s, not_a_state.as_ptr(), out.as_mut_ptr(), probs.as_mut_ptr()),
            UbStatus::NotDensityOperator
        );
        ub_scheme_free(s);
        ub_basis_free(b);
    }
}

#[test]
fn perturbed_resource_fails_both_verifiers() {
    let b = weyl(2);
    let s = scheme(b, UbMode::Teleportation);
    let p: f64 = 0.9;
    let amp = [p.sqrt(), 0.0, 0.0, (1.0 - p).sqrt()];
    let mut omega = vec![0.0; 32];
    for i in 0..4 {
        for j in 0..4 {
            omega[2 * (i * 4 + j)] = amp[i] * amp[j];
        }
    }
    unsafe {
        let mut bad = ptr::null_mut();
        assert_eq!(ub_scheme_with_resource(s, omega.as_ptr(), &mut bad), UbStatus::Ok);
        let (mut tele, mut dense) = (0.0, 0.0);
        ub_scheme_verify_teleportation(bad, &mut tele);
        ub_scheme_verify_dense_coding(bad, &mut dense, ptr::null_mut(), 0);
        let floor = (1.0 - 2.0 * (p * (1.0 - p)).sqrt()) / 4.0 * 0.5;
        assert!(tele >= floor && dense >= floor);
        let mut extracted = ptr::null_mut();
        assert_eq!(ub_scheme_extract_basis(bad, &mut extracted), UbStatus::SchemeInvalid);
        assert!(extracted.is_null());
        ub_scheme_free(bad);
        ub_scheme_free(s);
        ub_basis_free(b);
    }
}

#[test]
fn shift_multiply_and_tensor() {
    let d = 3;
    let latin: Vec<usize> = (0..d * d).map(|n| (n / d + n % d) % d).collect();
    let hs: Vec<f64> = (0..d).flat_map(|_| fourier(d)).collect();
    unsafe {
        let mut b = ptr::null_mut();
        assert_eq!(
            ub_basis_shift_multiply(d, latin.as_ptr(), hs.as_ptr(), 1e-10, &mut b),
            UbStatus::Ok,
            "{}",
            last_error()
        );
        let w = weyl(2);
        let mut t = ptr::null_mut();
        assert_eq!(ub_basis_tensor(w, b, &mut t), UbStatus::Ok);
        assert_eq!(ub_basis_dim(t), 6);
        let mut dev = f64::NAN;
        ub_basis_verify_orthonormal(t, &mut dev);
        assert!(dev < 1e-10);

        let not_latin = vec![0usize; d * d];
        let mut bad = ptr::null_mut();
        assert_eq!(
            ub_basis_shift_multiply(d, not_latin.as_ptr(), hs.as_ptr(), 1e-10, &mut bad),
            UbStatus::DesignInvalid
        );
        assert!(bad.is_null());
        ub_basis_free(t);
        ub_basis_free(w);
        ub_basis_free(b);
    }
}

#[test]
fn explicit_elements_are_validated() {
    let b = weyl(2);
    unsafe {
        let mut data = vec![0.0; 32];
        for x in 0..4 {
            ub_basis_element(b, x, data[8 * x..].as_mut_ptr(), 8);
        }
        let mut copy = ptr::null_mut();
        assert_eq!(ub_basis_from_elements(2, data.as_ptr(), 1e-10, &mut copy), UbStatus::Ok);
        data[2] += 0.01;
        let mut bad = ptr::null_mut();
        assert_ne!(ub_basis_from_elements(2, data.as_ptr(), 1e-10, &mut bad), UbStatus::Ok);
        assert!(!last_error().is_empty());
        ub_basis_free(copy);
        ub_basis_free(b);
    }
}

#[test]
fn json_round_trip() {
    let b = weyl(2);
    let s = scheme(b, UbMode::DenseCoding);
    unsafe {
        let mut text = ptr::null_mut();
        assert_eq!(ub_scheme_to_json(s, &mut text), UbStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(ub_scheme_from_json(text, &mut back), UbStatus::Ok);
        let mut mode = UbMode::Teleportation;
        ub_scheme_mode(back, &mut mode);
        assert_eq!(mode, UbMode::DenseCoding);
        let mut wrong_kind = ptr::null_mut();
        assert_eq!(ub_basis_from_json(text, &mut wrong_kind), UbStatus::InvalidArgument);
        ub_string_free(text);

        assert_eq!(ub_basis_to_json(b, &mut text), UbStatus::Ok);
        let mut b2 = ptr::null_mut();
        assert_eq!(ub_basis_from_json(text, &mut b2), UbStatus::Ok);
        assert_eq!(ub_basis_len(b2), 4);
        ub_string_free(text);

        let garbage = CString::new("{\"v\": 1, \"kind\":").unwrap();
        assert_eq!(ub_basis_from_json(garbage.as_ptr(), &mut b2), UbStatus::ParseError);
        assert!(last_error().contains("line"));

        ub_basis_free(b2);
        ub_scheme_free(back);
        ub_scheme_free(s);
        ub_basis_free(b);
    }
}

#[test]
fn errors_and_null_handling() {
    unsafe {
        let mut count = 0u64;
        assert_eq!(ub_count_normalized_latin(4, &mut count), UbStatus::Ok);
        assert_eq!(count, 4);
        assert_eq!(last_error(), "");
        assert_eq!(ub_count_normalized_latin(6, &mut count), UbStatus::DimensionTooLarge);
        assert!(!last_error().is_empty());
        assert_eq!(ub_count_normalized_latin(4, ptr::null_mut()), UbStatus::NullPointer);

        let mut dev = 0.0;
        assert_eq!(
            ub_basis_verify_orthonormal(ptr::null(), &mut dev),
            UbStatus::NullPointer
        );
        assert_eq!(ub_basis_dim(ptr::null()), 0);
        let mut b = ptr::null_mut();
        assert_eq!(ub_basis_weyl(0, &mut b), UbStatus::InvalidArgument);
        assert_eq!(ub_basis_from_json(ptr::null(), &mut b), UbStatus::NullPointer);
        ub_basis_free(ptr::null_mut());
        ub_scheme_free(ptr::null_mut());
        ub_string_free(ptr::null_mut());

        // Truncating copy still reports the full length.
        ub_count_normalized_latin(6, &mut count);
        let mut small = [0 as c_char; 4];
        let full = ub_last_error_message(small.as_mut_ptr(), small.len());
        assert!(full > 3);
        assert_eq!(CStr::from_ptr(small.as_ptr()).to_bytes().len(), 3);

        let v = CStr::from_ptr(ub_version()).to_str().unwrap();
        assert_eq!(v, env!("CARGO_PKG_VERSION"));
    }
}

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn find_staticlib() -> Option<PathBuf> {
    // tests run from target/<profile>/deps/
    let exe = std::env::current_exe().ok()?;
    let profile_dir = exe.parent()?.parent()?;
    let lib = profile_dir.join("libunibasis_ffi.a");
    lib.exists().then_some(lib)
}

fn has_compiler(cc: &str) -> bool {
    Command::new(cc)
        .arg("--version")
        .output()
        .is_ok_and(|o| o.status.success())
}

#[test]
fn checked_in_header_matches_exports() {
    let header = std::fs::read_to_string(crate_dir().join("include/unibasis.h")).unwrap();
    for name in [
        "ub_last_error_message",
        "ub_version",
        "ub_string_free",
        "ub_count_normalized_latin",
        "ub_basis_weyl",
        "ub_basis_shift_multiply",
        "ub_basis_from_elements",
        "ub_basis_from_json",
        "ub_basis_to_json",
        "ub_basis_tensor",
        "ub_basis_dim",
        "ub_basis_len",
        "ub_basis_element",
        "ub_basis_verify_orthonormal",
        "ub_basis_verify_depolarizer",
        "ub_basis_free",
        "ub_scheme_build",
        "ub_scheme_from_json",
        "ub_scheme_to_json",
        "ub_scheme_dim",
        "ub_scheme_mode",
        "ub_scheme_swap_roles",
        "ub_scheme_with_resource",
        "ub_scheme_verify_teleportation",
        "ub_scheme_verify_dense_coding",
        "ub_scheme_teleport",
        "ub_scheme_extract_basis",
        "ub_scheme_free",
    ] {
        assert!(header.contains(&format!("{}(", name)), "{} missing from header", name);
    }
    assert!(header.contains("typedef struct UbBasis UbBasis;"));
    assert!(header.contains("UB_STATUS_OK = 0"));
}

#[test]
fn c_program_links_against_staticlib() {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if !has_compiler(&cc) {
        eprintln!("no C compiler ({}); skipping C link test", cc);
        return;
    }
    let lib = find_staticlib().expect("libunibasis_ffi.a next to the test binary");
    let dir = tempfile_dir();
    let exe = dir.join("smoke");
    let status = Command::new(&cc)
        .arg(crate_dir().join("tests/c/smoke.c"))
        .arg("-I")
        .arg(crate_dir().join("include"))
        .arg("-Wall")
        .arg("-Werror")
        .arg("-o")
        .arg(&exe)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(
        out.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stdout).contains("count=56"));
}

fn tempfile_dir() -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("ffi-c-smoke");
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
