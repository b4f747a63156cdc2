use std::ffi::CStr;
use std::ptr;

use thz_isac_ffi::*;

fn last_error() -> String {
    let p = thz_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn params(kind: ThzWaveformKind, m: usize, n: usize) -> ThzWaveformParams {
    let mut p = std::mem::MaybeUninit::uninit();
    assert_eq!(unsafe { thz_waveform_default_params(kind, m, n, p.as_mut_ptr()) }, ThzStatus::Ok);
    unsafe { p.assume_init() }
}

fn new_waveform(p: &ThzWaveformParams) -> *mut ThzWaveform {
    let mut wf = ptr::null_mut();
    assert_eq!(unsafe { thz_waveform_new(p, &mut wf) }, ThzStatus::Ok);
    assert!(!wf.is_null());
    wf
}

#[test]
fn default_params_follow_the_reference_setup() {
    let p = params(ThzWaveformKind::Otfs, 64, 16);
    assert_eq!(p.cp_len, 16);
    assert_eq!(p.qam_order, 4);
    assert_eq!(p.carrier_hz, 0.3e12);
    assert_eq!(p.subcarrier_spacing_hz, 1.92e6);
}

#[test]
fn frame_round_trip_through_handles() {
    let wf = new_waveform(&params(ThzWaveformKind::DftsOfdm, 64, 16));
    assert_eq!(unsafe { thz_waveform_frame_len(wf) }, 16 * 80);
    let mut frame = ptr::null_mut();
    assert_eq!(unsafe { thz_modulate_random(wf, 3, &mut frame) }, ThzStatus::Ok);
    let len = unsafe { thz_frame_len(frame) };
    assert_eq!(len, 1280);
    let mut buf = vec![ThzComplex { re: 0.0, im: 0.0 }; len];
    assert_eq!(unsafe { thz_frame_samples(frame, buf.as_mut_ptr(), len) }, ThzStatus::Ok);
    let power: f64 = buf.iter().map(|z| z.re * z.re + z.im * z.im).sum::<f64>() / len as f64;
    assert!((power - 1.0).abs() < 0.2, "{power}");

    let mut short = vec![ThzComplex { re: 0.0, im: 0.0 }; len - 1];
    assert_eq!(
        unsafe { thz_frame_samples(frame, short.as_mut_ptr(), len - 1) },
        ThzStatus::BufferTooSmall
    );
    assert!(last_error().contains("1280"));

    let mut papr = 0.0;
    assert_eq!(unsafe { thz_papr_db(buf.as_ptr(), len, 4, &mut papr) }, ThzStatus::Ok);
    assert!(papr > 0.0 && papr < 15.0);
    unsafe {
        thz_frame_free(frame);
        thz_waveform_free(wf);
    }
}

#[test]
fn same_seed_gives_identical_frames() {
    let wf = new_waveform(&params(ThzWaveformKind::Ofdm, 16, 4));
    let grab = |seed| {
        let mut f = ptr::null_mut();
        assert_eq!(unsafe { thz_modulate_random(wf, seed, &mut f) }, ThzStatus::Ok);
        let len = unsafe { thz_frame_len(f) };
        let mut buf = vec![ThzComplex { re: 0.0, im: 0.0 }; len];
        unsafe {
            thz_frame_samples(f, buf.as_mut_ptr(), len);
            thz_frame_free(f);
        }
        buf
    };
    assert_eq!(grab(9), grab(9));
    assert_ne!(grab(9), grab(10));
    unsafe { thz_waveform_free(wf) };
}

#[test]
fn explicit_bits_are_length_checked() {
    let wf = new_waveform(&params(ThzWaveformKind::Otfs, 16, 4));
    let need = unsafe { thz_waveform_payload_bits(wf) };
    assert_eq!(need, 128);
    let bits = vec![1u8; need];
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { thz_modulate_bits(wf, bits.as_ptr(), need, &mut f) }, ThzStatus::Ok);
    unsafe { thz_frame_free(f) };
    let mut f = ptr::null_mut();
    assert_eq!(
        unsafe { thz_modulate_bits(wf, bits.as_ptr(), need - 2, &mut f) },
        ThzStatus::InvalidArgument
    );
    assert!(f.is_null());
    unsafe { thz_waveform_free(wf) };
}

#[test]
fn invalid_parameters_are_reported() {
    let mut p = params(ThzWaveformKind::Ofdm, 64, 16);
    p.subcarriers = 48;
    let mut wf = ptr::null_mut();
    assert_eq!(unsafe { thz_waveform_new(&p, &mut wf) }, ThzStatus::InvalidArgument);
    assert!(wf.is_null());
    assert!(!last_error().is_empty());

    let mut p = params(ThzWaveformKind::Ofdm, 64, 16);
    p.qam_order = 8;
    assert_eq!(unsafe { thz_waveform_new(&p, &mut wf) }, ThzStatus::InvalidArgument);
    assert!(last_error().contains('8'));
}

#[test]
fn null_pointers_are_rejected() {
    let p = params(ThzWaveformKind::Ofdm, 16, 4);
    assert_eq!(unsafe { thz_waveform_new(ptr::null(), ptr::null_mut()) }, ThzStatus::NullPointer);
    assert_eq!(unsafe { thz_waveform_new(&p, ptr::null_mut()) }, ThzStatus::NullPointer);
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { thz_modulate_random(ptr::null(), 1, &mut f) }, ThzStatus::NullPointer);
    assert_eq!(unsafe { thz_waveform_frame_len(ptr::null()) }, 0);
    assert_eq!(unsafe { thz_frame_len(ptr::null()) }, 0);
    let mut v = 0.0;
    assert_eq!(unsafe { thz_papr_db(ptr::null(), 4, 1, &mut v) }, ThzStatus::NullPointer);
    unsafe {
        thz_waveform_free(ptr::null_mut());
        thz_frame_free(ptr::null_mut());
    }
}

#[test]
fn papr_checks_samples() {
    let flat = [ThzComplex { re: 1.0, im: 0.0 }; 8];
    let mut v = -1.0;
    assert_eq!(unsafe { thz_papr_db(flat.as_ptr(), 8, 1, &mut v) }, ThzStatus::Ok);
    assert!(v.abs() < 1e-12);
    let bad = [ThzComplex { re: f64::NAN, im: 0.0 }; 4];
    assert_eq!(unsafe { thz_papr_db(bad.as_ptr(), 4, 1, &mut v) }, ThzStatus::Numeric);
    assert_eq!(unsafe { thz_papr_db(flat.as_ptr(), 0, 1, &mut v) }, ThzStatus::InvalidArgument);
    assert_eq!(unsafe { thz_papr_db(flat.as_ptr(), 8, 0, &mut v) }, ThzStatus::InvalidArgument);
}

#[test]
fn sensing_trial_finds_the_target() {
    let wf = new_waveform(&params(ThzWaveformKind::Otfs, 64, 16));
    let mut r = ThzSensingResult::default();
    assert_eq!(
        unsafe { thz_sensing_trial(wf, 10.0, 5.0, f64::NAN, 4, &mut r) },
        ThzStatus::Ok
    );
    assert!((r.range_m - 10.0).abs() < 1e-3, "{r:?}");
    assert_eq!(
        unsafe { thz_sensing_trial(wf, -1.0, 0.0, 30.0, 4, &mut r) },
        ThzStatus::InvalidArgument
    );
    unsafe { thz_waveform_free(wf) };
}

#[test]
fn version_is_a_c_string() {
    let v = unsafe { CStr::from_ptr(thz_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_export() {
    let header = include_str!("../include/thz_isac.h");
    let source = include_str!("../src/lib.rs");
    let exports: Vec<&str> = source
        .split("extern \"C\" fn ")
        .skip(1)
        .map(|s| s.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 12);
    for name in exports {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
    for ty in ["ThzStatus", "ThzWaveform", "ThzFrame", "ThzComplex", "ThzWaveformParams", "ThzSensingResult"] {
        assert!(header.contains(&format!("typedef struct {ty}")) || header.contains(&format!("typedef enum {ty}")));
    }
}
