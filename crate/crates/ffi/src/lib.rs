//! C interface to the `thz-isac` simulator.
//!
//! Every function returns a [`ThzStatus`] or a plain value, never unwinds
//! across the boundary, and records a message retrievable with
//! [`thz_last_error`] on the calling thread when it fails. Handles are
//! opaque; each `*_new`/`*_modulate_*` result must be released with the
//! matching `*_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use thz_isac::channel::SensingScenario;
use thz_isac::metrics::papr_db;
use thz_isac::numerics::{ModOrder, SimRng};
use thz_isac::sensing::sensing_trial;
use thz_isac::waveform::{modulate, random_frame, Frame, PilotPattern, WaveformConfig, WaveformKind};
use thz_isac::{Error, C64};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThzStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Precondition = 3,
    Numeric = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThzWaveformKind {
    Ofdm = 0,
    DftsOfdm = 1,
    Otfs = 2,
    DftsOtfs = 3,
}

impl From<ThzWaveformKind> for WaveformKind {
    fn from(k: ThzWaveformKind) -> Self {
        match k {
            ThzWaveformKind::Ofdm => WaveformKind::Ofdm,
            ThzWaveformKind::DftsOfdm => WaveformKind::DftsOfdm,
            ThzWaveformKind::Otfs => WaveformKind::Otfs,
            ThzWaveformKind::DftsOtfs => WaveformKind::DftsOtfs,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThzComplex {
    pub re: f64,
    pub im: f64,
}

/// Waveform parameters. Fill with [`thz_waveform_default_params`] and
/// adjust.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThzWaveformParams {
    pub kind: ThzWaveformKind,
    pub subcarriers: usize,
    pub symbols: usize,
    pub subcarrier_spacing_hz: f64,
    pub carrier_hz: f64,
    pub cp_len: usize,
    /// 4 or 16.
    pub qam_order: u32,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ThzSensingResult {
    pub range_m: f64,
    pub velocity_mps: f64,
    pub peak_snr_db: f64,
}

/// Opaque waveform configuration.
pub struct ThzWaveform {
    cfg: WaveformConfig,
}

/// Opaque modulated frame.
pub struct ThzFrame {
    frame: Frame,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = CString::new(msg).ok());
}

fn status_of(err: &Error) -> ThzStatus {
    match err {
        Error::Precondition(_) => ThzStatus::Precondition,
        e if e.is_numeric() => ThzStatus::Numeric,
        _ => ThzStatus::InvalidArgument,
    }
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), ThzStatus>) -> ThzStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ThzStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => {
            set_last_error("internal panic");
            ThzStatus::Panic
        }
    }
}

fn fail(err: Error) -> ThzStatus {
    set_last_error(err.to_string());
    status_of(&err)
}

fn null(what: &str) -> ThzStatus {
    set_last_error(format!("{what} is null"));
    ThzStatus::NullPointer
}

/// Message describing the last failure on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn thz_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn thz_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Default parameters: 0.3 THz carrier, 1.92 MHz spacing, cyclic prefix of
/// a quarter symbol, 4-QAM.
///
/// # Safety
/// `out` must be null or point to writable memory for one
/// `ThzWaveformParams`.
#[no_mangle]
pub unsafe extern "C" fn thz_waveform_default_params(
    kind: ThzWaveformKind,
    subcarriers: usize,
    symbols: usize,
    out: *mut ThzWaveformParams,
) -> ThzStatus {
    if out.is_null() {
        return null("out");
    }
    let cfg = WaveformConfig::new(kind.into(), subcarriers, symbols);
    // SAFETY: caller guarantees `out` is writable; checked non-null above
    unsafe {
        out.write(ThzWaveformParams {
            kind,
            subcarriers,
            symbols,
            subcarrier_spacing_hz: cfg.subcarrier_spacing_hz,
            carrier_hz: cfg.carrier_hz,
            cp_len: cfg.cp_len,
            qam_order: cfg.mod_order.order(),
        });
    }
    ThzStatus::Ok
}

/// Validates `params` and allocates a waveform handle.
///
/// # Safety
/// `params` must be null or point to an initialized `ThzWaveformParams`;
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn thz_waveform_new(params: *const ThzWaveformParams, out: *mut *mut ThzWaveform) -> ThzStatus {
    if params.is_null() {
        return null("params");
    }
    if out.is_null() {
        return null("out");
    }
    guard(|| {
        // SAFETY: non-null and initialized per the contract
        let p = unsafe { *params };
        let mod_order = ModOrder::from_order(p.qam_order).map_err(fail)?;
        let mut cfg = WaveformConfig::new(p.kind.into(), p.subcarriers, p.symbols);
        cfg.subcarrier_spacing_hz = p.subcarrier_spacing_hz;
        cfg.carrier_hz = p.carrier_hz;
        cfg.cp_len = p.cp_len;
        cfg.mod_order = mod_order;
        cfg.validate().map_err(fail)?;
        // SAFETY: `out` checked non-null
        unsafe { out.write(Box::into_raw(Box::new(ThzWaveform { cfg }))) };
        Ok(())
    })
}

/// # Safety
/// `wf` must be null or a handle from [`thz_waveform_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn thz_waveform_free(wf: *mut ThzWaveform) {
    if !wf.is_null() {
        // SAFETY: allocated by Box::into_raw in thz_waveform_new
        drop(unsafe { Box::from_raw(wf) });
    }
}

/// Samples per frame including cyclic prefixes; 0 for a null handle.
///
/// # Safety
/// `wf` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn thz_waveform_frame_len(wf: *const ThzWaveform) -> usize {
    // SAFETY: null or live per the contract
    unsafe { wf.as_ref() }.map_or(0, |w| w.cfg.frame_len())
}

/// Payload bits carried by one frame without pilots; 0 for a null handle.
///
/// # Safety
/// `wf` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn thz_waveform_payload_bits(wf: *const ThzWaveform) -> usize {
    // SAFETY: null or live per the contract
    unsafe { wf.as_ref() }.map_or(0, |w| w.cfg.grid_len() * w.cfg.mod_order.bits_per_symbol())
}

fn boxed_frame(frame: Frame, out: *mut *mut ThzFrame) {
    // SAFETY: callers check `out` for null before building the frame
    unsafe { out.write(Box::into_raw(Box::new(ThzFrame { frame }))) };
}

/// Modulates a frame of uniformly random payload bits drawn from `seed`.
///
/// # Safety
/// `wf` must be null or a live handle; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn thz_modulate_random(wf: *const ThzWaveform, seed: u64, out: *mut *mut ThzFrame) -> ThzStatus {
    // SAFETY: null or live per the contract
    let Some(wf) = (unsafe { wf.as_ref() }) else {
        return null("waveform");
    };
    if out.is_null() {
        return null("out");
    }
    guard(|| {
        let frame = random_frame(&wf.cfg, &PilotPattern::none(&wf.cfg), &mut SimRng::new(seed)).map_err(fail)?;
        boxed_frame(frame, out);
        Ok(())
    })
}

/// Modulates exactly [`thz_waveform_payload_bits`] bits, one bit (0 or 1)
/// per byte.
///
/// # Safety
/// `wf` must be null or a live handle; `bits` must be null or readable for
/// `len` bytes; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn thz_modulate_bits(
    wf: *const ThzWaveform,
    bits: *const u8,
    len: usize,
    out: *mut *mut ThzFrame,
) -> ThzStatus {
    // SAFETY: null or live per the contract
    let Some(wf) = (unsafe { wf.as_ref() }) else {
        return null("waveform");
    };
    if bits.is_null() {
        return null("bits");
    }
    if out.is_null() {
        return null("out");
    }
    guard(|| {
        // SAFETY: readable for `len` bytes per the contract
        let bits = unsafe { std::slice::from_raw_parts(bits, len) };
        let frame = modulate(bits, &PilotPattern::none(&wf.cfg), &wf.cfg).map_err(fail)?;
        boxed_frame(frame, out);
        Ok(())
    })
}

/// # Safety
/// `frame` must be null or a live frame handle.
#[no_mangle]
pub unsafe extern "C" fn thz_frame_len(frame: *const ThzFrame) -> usize {
    // SAFETY: null or live per the contract
    unsafe { frame.as_ref() }.map_or(0, |f| f.frame.samples.len())
}

/// Copies the frame's time samples into `buf`, which must hold at least
/// [`thz_frame_len`] elements.
///
/// # Safety
/// `frame` must be null or live; `buf` must be null or writable for
/// `capacity` elements.
#[no_mangle]
pub unsafe extern "C" fn thz_frame_samples(frame: *const ThzFrame, buf: *mut ThzComplex, capacity: usize) -> ThzStatus {
    // SAFETY: null or live per the contract
    let Some(frame) = (unsafe { frame.as_ref() }) else {
        return null("frame");
    };
    if buf.is_null() {
        return null("buf");
    }
    let samples = frame.frame.samples.as_slice();
    if capacity < samples.len() {
        set_last_error(format!("buffer holds {capacity} samples, frame has {}", samples.len()));
        return ThzStatus::BufferTooSmall;
    }
    // SAFETY: writable for `capacity >= samples.len()` elements
    let dst = unsafe { std::slice::from_raw_parts_mut(buf, samples.len()) };
    for (d, s) in dst.iter_mut().zip(samples) {
        *d = ThzComplex { re: s.re, im: s.im };
    }
    ThzStatus::Ok
}

/// # Safety
/// `frame` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn thz_frame_free(frame: *mut ThzFrame) {
    if !frame.is_null() {
        // SAFETY: allocated by Box::into_raw in boxed_frame
        drop(unsafe { Box::from_raw(frame) });
    }
}

/// PAPR in dB of `len` samples after `oversample`× band-limited
/// interpolation.
///
/// # Safety
/// `samples` must be null or readable for `len` elements; `out` must be
/// null or writable.
#[no_mangle]
pub unsafe extern "C" fn thz_papr_db(
    samples: *const ThzComplex,
    len: usize,
    oversample: usize,
    out: *mut f64,
) -> ThzStatus {
    if samples.is_null() {
        return null("samples");
    }
    if out.is_null() {
        return null("out");
    }
    guard(|| {
        // SAFETY: readable for `len` elements per the contract
        let src = unsafe { std::slice::from_raw_parts(samples, len) };
        let x: Vec<C64> = src.iter().map(|z| C64::new(z.re, z.im)).collect();
        if x.is_empty() {
            return Err(fail(Error::Sizing("no samples".into())));
        }
        if x.iter().any(|z| !z.is_finite()) {
            return Err(fail(Error::NonFinite("non-finite sample".into())));
        }
        let v = papr_db(&x, oversample).map_err(fail)?;
        // SAFETY: `out` checked non-null
        unsafe { out.write(v) };
        Ok(())
    })
}

/// One monostatic sensing trial against a point target with the
/// waveform's own estimator. Pass NaN for `snr_db` to disable noise.
///
/// # Safety
/// `wf` must be null or a live handle; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn thz_sensing_trial(
    wf: *const ThzWaveform,
    range_m: f64,
    velocity_mps: f64,
    snr_db: f64,
    seed: u64,
    out: *mut ThzSensingResult,
) -> ThzStatus {
    // SAFETY: null or live per the contract
    let Some(wf) = (unsafe { wf.as_ref() }) else {
        return null("waveform");
    };
    if out.is_null() {
        return null("out");
    }
    guard(|| {
        let scenario = SensingScenario::new(range_m, velocity_mps).map_err(fail)?;
        let snr = (!snr_db.is_nan()).then_some(snr_db);
        let est = sensing_trial(&wf.cfg, &scenario, snr, &mut SimRng::new(seed)).map_err(fail)?;
        // SAFETY: `out` checked non-null
        unsafe {
            out.write(ThzSensingResult {
                range_m: est.range_m,
                velocity_mps: est.velocity_mps,
                peak_snr_db: est.peak_snr_db,
            })
        };
        Ok(())
    })
}
