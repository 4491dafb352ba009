use std::ffi::CStr;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use su3cs_ffi::*;

fn c(re: f64, im: f64) -> Su3Complex {
    Su3Complex { re, im }
}

fn last_error() -> String {
    let p = su3_last_error();
    assert!(!p.is_null(), "an error message is set");
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn rep(j1: u32) -> *mut Su3Rep {
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { su3_rep_new(j1, &mut r) }, Su3Status::Ok);
    r
}

#[test]
fn rep_dimension_and_labels() {
    let r = rep(4);
    let mut dim = 0usize;
    unsafe {
        assert_eq!(su3_rep_dim(r, &mut dim), Su3Status::Ok);
        assert_eq!(dim, 15);
        let (mut j2, mut j3) = (0u32, 0u32);
        assert_eq!(su3_rep_labels(r, 14, &mut j2, &mut j3), Su3Status::Ok);
        assert_eq!((j2, j3), (4, 4));
        assert_eq!(su3_rep_labels(r, 15, &mut j2, &mut j3), Su3Status::OutOfRange);
        su3_rep_free(r);
        su3_rep_free(ptr::null_mut());
    }
    assert!(su3_last_error().is_null() || !last_error().is_empty());
}

#[test]
fn null_and_range_errors_set_messages() {
    unsafe {
        assert_eq!(su3_rep_new(2, ptr::null_mut()), Su3Status::NullPointer);
        assert!(last_error().contains("NULL"));
        let mut r = ptr::null_mut();
        assert_eq!(su3_rep_new(SU3_MAX_J1 + 1, &mut r), Su3Status::InvalidArgument);
        assert!(r.is_null());
        assert_eq!(su3_rep_dim(ptr::null(), &mut 0), Su3Status::NullPointer);
    }
    let r = rep(1);
    unsafe {
        assert_eq!(su3_rep_dim(r, &mut 0), Su3Status::Ok);
        assert!(su3_last_error().is_null(), "success clears the message");
        su3_rep_free(r);
    }
}

#[test]
fn generator_matrix_is_row_major_and_checked() {
    let r = rep(1);
    let mut buf = vec![Su3Complex::default(); 9];
    unsafe {
        assert_eq!(su3_generator_matrix(r, Su3Generator::H1 as u32, buf.as_mut_ptr(), 8), Su3Status::BufferTooSmall);
        assert_eq!(su3_generator_matrix(r, 9, buf.as_mut_ptr(), 9), Su3Status::InvalidArgument);
        assert_eq!(su3_generator_matrix(r, Su3Generator::E1 as u32, buf.as_mut_ptr(), 9), Su3Status::Ok);
        let mut f1 = vec![Su3Complex::default(); 9];
        assert_eq!(su3_generator_matrix(r, Su3Generator::F1 as u32, f1.as_mut_ptr(), 9), Su3Status::Ok);
        for i in 0..3 {
            for j in 0..3 {
                let (e, f) = (buf[i * 3 + j], f1[j * 3 + i]);
                assert_eq!((e.re, -e.im), (f.re, f.im), "e1 and f1 are adjoint");
            }
        }
        su3_rep_free(r);
    }
}

#[test]
fn displaced_state_extracts_as_coherent() {
    let r = rep(3);
    unsafe {
        let mut st = ptr::null_mut();
        assert_eq!(su3_displaced_state(r, c(0.3, -0.2), c(0.1, 0.4), &mut st), Su3Status::Ok);
        let (mut z1, mut z2, mut d) = (Su3Complex::default(), Su3Complex::default(), f64::NAN);
        assert_eq!(su3_extract_zeta(st, &mut z1, &mut z2, &mut d), Su3Status::Ok);
        assert!(d < 1e-10);
        let mut rebuilt = ptr::null_mut();
        assert_eq!(su3_coherent_state(r, z1, z2, &mut rebuilt), Su3Status::Ok);
        let mut a = vec![Su3Complex::default(); 10];
        let mut b = vec![Su3Complex::default(); 10];
        assert_eq!(su3_state_amplitudes(st, a.as_mut_ptr(), 10), Su3Status::Ok);
        assert_eq!(su3_state_amplitudes(rebuilt, b.as_mut_ptr(), 10), Su3Status::Ok);
        let overlap: f64 = {
            let (mut re, mut im) = (0.0, 0.0);
            for (x, y) in a.iter().zip(&b) {
                re += x.re * y.re + x.im * y.im;
                im += x.re * y.im - x.im * y.re;
            }
            (re * re + im * im).sqrt()
        };
        assert!((overlap - 1.0).abs() < 1e-10);
        su3_state_free(st);
        su3_state_free(rebuilt);
        su3_rep_free(r);
    }
}

#[test]
fn non_coherent_state_is_reported() {
    let r = rep(2);
    unsafe {
        // Equal superposition of the two single-excitation vectors off the basepoint.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let amps = [c(0.0, 0.0), c(s, 0.0), c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let mut st = ptr::null_mut();
        assert_eq!(su3_state_from_amplitudes(r, amps.as_ptr(), 6, &mut st), Su3Status::Ok);
        let (mut z1, mut z2, mut d) = (Su3Complex::default(), Su3Complex::default(), 0.0);
        assert_eq!(su3_extract_zeta(st, &mut z1, &mut z2, &mut d), Su3Status::NotCoherent);
        assert!(last_error().contains("not coherent"));
        let mut wrong = ptr::null_mut();
        assert_eq!(su3_state_from_amplitudes(r, amps.as_ptr(), 5, &mut wrong), Su3Status::DimensionMismatch);
        assert!(wrong.is_null());
        su3_state_free(st);
        su3_rep_free(r);
    }
}

#[test]
fn intelligent_spectrum_round_trip() {
    let r = rep(1);
    unsafe {
        let mut sp = ptr::null_mut();
        assert_eq!(su3_solve_intelligent(r, 4, c(0.5, 0.0), &mut sp), Su3Status::InvalidArgument);
        assert_eq!(su3_solve_intelligent(r, 1, c(0.5, 0.0), &mut sp), Su3Status::Ok);
        let mut n = 0usize;
        assert_eq!(su3_spectrum_len(sp, &mut n), Su3Status::Ok);
        assert_eq!(n, 3);
        let mut nilpotent = true;
        assert_eq!(su3_spectrum_nilpotent(sp, &mut nilpotent), Su3Status::Ok);
        assert!(!nilpotent);
        let mut lambdas = Vec::new();
        for k in 0..n {
            let mut e = Su3Eigenstate::default();
            assert_eq!(su3_spectrum_entry(sp, k, &mut e), Su3Status::Ok);
            assert!(e.has_lambda_prime);
            lambdas.push(e.lambda.re);
            let mut st = ptr::null_mut();
            assert_eq!(su3_spectrum_state(sp, k, &mut st), Su3Status::Ok);
            let mut m = Su3MomentReport::default();
            assert_eq!(su3_uncertainty_report(st, 1, &mut m), Su3Status::Ok);
            assert!((m.sr_lhs - m.sr_rhs).abs() < 1e-12, "intelligent state saturates SR");
            su3_state_free(st);
        }
        lambdas.sort_by(f64::total_cmp);
        let s = 0.75f64.sqrt();
        for (got, want) in lambdas.iter().zip([-s, 0.0, s]) {
            assert!((got - want).abs() < 1e-12);
        }
        let mut e = Su3Eigenstate::default();
        assert_eq!(su3_spectrum_entry(sp, n, &mut e), Su3Status::OutOfRange);
        su3_spectrum_free(sp);

        assert_eq!(su3_solve_intelligent(r, 2, c(1.0, 0.0), &mut sp), Su3Status::Ok);
        let mut nilpotent = false;
        assert_eq!(su3_spectrum_nilpotent(sp, &mut nilpotent), Su3Status::Ok);
        assert!(nilpotent);
        su3_spectrum_free(sp);
        su3_rep_free(r);
    }
}

#[test]
fn moment_check_within_tolerance() {
    let mut res = f64::NAN;
    unsafe {
        assert_eq!(su3_moment_check(10, 4, &mut res), Su3Status::Ok);
        assert!(res <= 1e-8);
        assert_eq!(su3_moment_check(3, 4, &mut res), Su3Status::InvalidArgument);
    }
    let v = unsafe { CStr::from_ptr(su3_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include").join("su3cs.h")
}

#[test]
fn header_declares_every_export() {
    let h = std::fs::read_to_string(header()).unwrap();
    let src = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("src/lib.rs")).unwrap();
    let exported: Vec<&str> = src
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exported.len() >= 20, "{exported:?}");
    for name in exported {
        assert!(h.contains(&format!("{name}(")), "{name} missing from header");
    }
    for item in ["typedef struct Su3Rep Su3Rep;", "SU3_STATUS_OK = 0", "SU3_GENERATOR_H3 = 8", "SU3_MAX_J1"] {
        assert!(h.contains(item), "{item}");
    }
}

/// Compiles and runs a small C program against the static library when a C
/// compiler is available.
#[test]
fn c_program_links_and_runs() {
    let Ok(cc) = which_cc() else {
        eprintln!("no C compiler found; skipping the C link check");
        return;
    };
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(Path::parent).unwrap();
    let lib = profile_dir.join("libsu3cs_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built; skipping the C link check", lib.display());
        return;
    }
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR"));
    let src = dir.join("smoke.c");
    std::fs::write(
        &src,
        r#"
#include <stdio.h>
#include "su3cs.h"
int main(void) {
    Su3Rep *rep = NULL;
    if (su3_rep_new(4, &rep) != SU3_STATUS_OK) return 1;
    size_t dim = 0;
    if (su3_rep_dim(rep, &dim) != SU3_STATUS_OK || dim != 15) return 2;
    Su3Spectrum *sp = NULL;
    Su3Complex alpha = {0.3, 0.4};
    if (su3_solve_intelligent(rep, 3, alpha, &sp) != SU3_STATUS_OK) return 3;
    size_t n = 0;
    su3_spectrum_len(sp, &n);
    if (su3_solve_intelligent(rep, 7, alpha, NULL) != SU3_STATUS_INVALID_ARGUMENT) return 4;
    if (su3_last_error() == NULL) return 5;
    printf("%zu\n", n);
    su3_spectrum_free(sp);
    su3_rep_free(rep);
    return 0;
}
"#,
    )
    .unwrap();
    let bin = dir.join("smoke");
    let status = Command::new(&cc)
        .arg(&src)
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "smoke program exited with {:?}", out.status);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "15");
}

fn which_cc() -> Result<String, ()> {
    for cc in ["cc", "gcc", "clang"] {
        if Command::new(cc).arg("--version").output().is_ok_and(|o| o.status.success()) {
            return Ok(cc.to_string());
        }
    }
    Err(())
}
