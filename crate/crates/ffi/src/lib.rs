//! C interface to the surp codec.
//!
//! All functions return a [`SurpStatus`]; on failure a message is kept in
//! thread-local storage and can be read with [`surp_last_error`]. Results
//! come back as opaque handles that the caller releases with the matching
//! `*_free` function. Pointers handed out by accessors stay valid until the
//! handle is freed.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use surp::codec::Beta;
use surp::{Error, IndexCodec, NormalizedVector, StopRule, SurpConfig, Variant};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SurpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DataError = 3,
    Invariant = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SurpVariant {
    Laplacian = 1,
    Exponential = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SurpIndexCodec {
    Raw = 0,
    Unary = 1,
    GolombPermuted = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SurpStopKind {
    Iterations = 0,
    TargetSparsity = 1,
    TargetDistortion = 2,
}

/// Encoder settings. Fill with [`surp_encode_options_default`] first.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct SurpEncodeOptions {
    /// A [`SurpVariant`] value.
    pub variant: u32,
    /// A [`SurpIndexCodec`] value.
    pub index_codec: u32,
    /// `ln n` when zero or negative.
    pub beta: f64,
    /// Estimated from the input when zero or negative.
    pub lambda0: f64,
    pub seed: u64,
    /// A [`SurpStopKind`] value.
    pub stop_kind: u32,
    /// Iteration count, sparsity or distortion, depending on `stop_kind`.
    pub stop_value: f64,
}

/// Result of [`surp_encode`].
pub struct SurpEncoded {
    container: Vec<u8>,
    reconstruction: Vec<f64>,
    iterations: u64,
    refreshes: u64,
}

/// Result of [`surp_decode`].
pub struct SurpDecoded {
    reconstruction: Vec<f64>,
    iterations: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SurpStatus {
    match e {
        Error::InvalidParameter(_) => SurpStatus::InvalidArgument,
        Error::Invariant(_) => SurpStatus::Invariant,
        _ => SurpStatus::DataError,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (SurpStatus, String)>) -> SurpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SurpStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside surp".into());
            SurpStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (SurpStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (SurpStatus, String) {
    (SurpStatus::NullPointer, format!("{what} is null"))
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn surp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn surp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Laplacian, raw indices, automatic β and λ₀, seed 0, 1000 iterations.
///
/// # Safety
/// `opts` must be null or point to writable memory for one options struct.
#[no_mangle]
pub unsafe extern "C" fn surp_encode_options_default(opts: *mut SurpEncodeOptions) -> SurpStatus {
    guard(|| {
        if opts.is_null() {
            return Err(null("opts"));
        }
        opts.write(SurpEncodeOptions {
            variant: SurpVariant::Laplacian as u32,
            index_codec: SurpIndexCodec::Raw as u32,
            beta: 0.0,
            lambda0: 0.0,
            seed: 0,
            stop_kind: SurpStopKind::Iterations as u32,
            stop_value: 1000.0,
        });
        Ok(())
    })
}

fn bad(what: &str, v: u32) -> (SurpStatus, String) {
    (SurpStatus::InvalidArgument, format!("unknown {what} {v}"))
}

fn config(o: &SurpEncodeOptions) -> Result<SurpConfig, (SurpStatus, String)> {
    let variant = match o.variant {
        1 => Variant::Laplacian,
        2 => Variant::Exponential,
        v => return Err(bad("variant", v)),
    };
    let index_codec = match o.index_codec {
        0 => IndexCodec::Raw,
        1 => IndexCodec::Unary,
        2 => IndexCodec::GolombPermuted,
        v => return Err(bad("index codec", v)),
    };
    let stop = match o.stop_kind {
        0 => {
            if !(o.stop_value >= 0.0 && o.stop_value.fract() == 0.0 && o.stop_value < 2f64.powi(64)) {
                return Err((
                    SurpStatus::InvalidArgument,
                    format!("iteration count must be a nonnegative integer, got {}", o.stop_value),
                ));
            }
            StopRule::Iterations(o.stop_value as u64)
        }
        1 => StopRule::TargetSparsity(o.stop_value),
        2 => StopRule::TargetDistortion(o.stop_value),
        v => return Err(bad("stop kind", v)),
    };
    Ok(SurpConfig {
        variant,
        beta: if o.beta > 0.0 { Beta::Fixed(o.beta) } else { Beta::Auto },
        lambda0: (o.lambda0 > 0.0).then_some(o.lambda0),
        seed: o.seed,
        stop,
        index_codec,
    })
}

/// Encode `n` values as a single segment, without renormalizing them.
///
/// # Safety
/// `values` must point to `n` readable doubles, `opts` to a valid options
/// struct (null selects the defaults) and `out` to writable storage for
/// one handle pointer.
#[no_mangle]
pub unsafe extern "C" fn surp_encode(
    values: *const f64,
    n: usize,
    opts: *const SurpEncodeOptions,
    out: *mut *mut SurpEncoded,
) -> SurpStatus {
    guard(|| {
        if values.is_null() {
            return Err(null("values"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        out.write(ptr::null_mut());
        let mut defaults = std::mem::MaybeUninit::uninit();
        let opts = if opts.is_null() {
            surp_encode_options_default(defaults.as_mut_ptr());
            defaults.assume_init()
        } else {
            *opts
        };
        let cfg = config(&opts)?;
        let nv = NormalizedVector::from_raw(slice::from_raw_parts(values, n).to_vec());
        let enc = surp::encode(&nv, &cfg).map_err(lib_err)?;
        let handle = Box::new(SurpEncoded {
            iterations: enc.trace.iterations(),
            refreshes: enc.trace.refresh_count,
            container: enc.container,
            reconstruction: enc.reconstruction,
        });
        out.write(Box::into_raw(handle));
        Ok(())
    })
}

/// Container bytes of an encode.
///
/// # Safety
/// `h` must be a live handle from [`surp_encode`]; `data` and `len` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn surp_encoded_bytes(
    h: *const SurpEncoded,
    data: *mut *const u8,
    len: *mut usize,
) -> SurpStatus {
    guard(|| {
        let h = h.as_ref().ok_or_else(|| null("handle"))?;
        if data.is_null() || len.is_null() {
            return Err(null("output pointer"));
        }
        data.write(h.container.as_ptr());
        len.write(h.container.len());
        Ok(())
    })
}

/// The encoder's reconstruction, `n` doubles.
///
/// # Safety
/// As for [`surp_encoded_bytes`].
#[no_mangle]
pub unsafe extern "C" fn surp_encoded_reconstruction(
    h: *const SurpEncoded,
    data: *mut *const f64,
    len: *mut usize,
) -> SurpStatus {
    guard(|| {
        let h = h.as_ref().ok_or_else(|| null("handle"))?;
        if data.is_null() || len.is_null() {
            return Err(null("output pointer"));
        }
        data.write(h.reconstruction.as_ptr());
        len.write(h.reconstruction.len());
        Ok(())
    })
}

/// Iterations and refreshes of an encode.
///
/// # Safety
/// `h` must be a live handle; each output pointer may be null.
#[no_mangle]
pub unsafe extern "C" fn surp_encoded_stats(
    h: *const SurpEncoded,
    iterations: *mut u64,
    refreshes: *mut u64,
) -> SurpStatus {
    guard(|| {
        let h = h.as_ref().ok_or_else(|| null("handle"))?;
        if let Some(p) = iterations.as_mut() {
            *p = h.iterations;
        }
        if let Some(p) = refreshes.as_mut() {
            *p = h.refreshes;
        }
        Ok(())
    })
}

/// # Safety
/// `h` must be null or a handle from [`surp_encode`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn surp_encoded_free(h: *mut SurpEncoded) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Decode a container.
///
/// # Safety
/// `bytes` must point to `len` readable bytes and `out` to writable storage
/// for one handle pointer.
#[no_mangle]
pub unsafe extern "C" fn surp_decode(
    bytes: *const u8,
    len: usize,
    out: *mut *mut SurpDecoded,
) -> SurpStatus {
    guard(|| {
        if bytes.is_null() {
            return Err(null("bytes"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        out.write(ptr::null_mut());
        let dec = surp::decode(slice::from_raw_parts(bytes, len)).map_err(lib_err)?;
        out.write(Box::into_raw(Box::new(SurpDecoded {
            iterations: dec.trace.iterations(),
            reconstruction: dec.reconstruction,
        })));
        Ok(())
    })
}

/// Decoded values in the coded domain, `n` doubles.
///
/// # Safety
/// `h` must be a live handle from [`surp_decode`]; `data` and `len` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn surp_decoded_values(
    h: *const SurpDecoded,
    data: *mut *const f64,
    len: *mut usize,
) -> SurpStatus {
    guard(|| {
        let h = h.as_ref().ok_or_else(|| null("handle"))?;
        if data.is_null() || len.is_null() {
            return Err(null("output pointer"));
        }
        data.write(h.reconstruction.as_ptr());
        len.write(h.reconstruction.len());
        Ok(())
    })
}

/// Iterations replayed by the decoder.
///
/// # Safety
/// `h` must be a live handle and `iterations` writable.
#[no_mangle]
pub unsafe extern "C" fn surp_decoded_iterations(
    h: *const SurpDecoded,
    iterations: *mut u64,
) -> SurpStatus {
    guard(|| {
        let h = h.as_ref().ok_or_else(|| null("handle"))?;
        if iterations.is_null() {
            return Err(null("iterations"));
        }
        iterations.write(h.iterations);
        Ok(())
    })
}

/// # Safety
/// `h` must be null or a handle from [`surp_decode`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn surp_decoded_free(h: *mut SurpDecoded) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}
