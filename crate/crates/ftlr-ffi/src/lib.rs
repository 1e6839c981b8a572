//! C ABI for the tracking toolkit. Trackers are opaque handles created from
//! an 8-bit grayscale frame plus an initial box; every call reports an
//! [`FtlrStatus`] and leaves a thread-local message retrievable with
//! [`ftlr_last_error_message`]. No call unwinds across the boundary.

use ftlr::config::{apply_tracker_keys, KeyValues};
use ftlr::geom::{BoundingBox, Frame};
use ftlr::tracker::{Tracker, TrackerConfig, Variant};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

/// Result code of every API call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FtlrStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidArgument = 2,
    InvalidFrame = 3,
    TrackerError = 4,
    Panic = 5,
}

/// Axis-aligned box in frame pixels; `x`/`y` is the top-left corner.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct FtlrBox {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

/// Outcome of one tracking step.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct FtlrStepResult {
    pub bbox: FtlrBox,
    /// 1 when the confidence gate accepted the correlation peak.
    pub confident: u8,
    /// Peak ratio the decision was made on; infinity when no second peak
    /// exists, 0 when the response was degenerate.
    pub ratio: f64,
    /// 1 when the backup tracker supplied the box.
    pub used_backup: u8,
}

/// Opaque tracker handle.
pub struct FtlrTracker {
    inner: Tracker,
    next_index: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

/// Message for the most recent failure on this thread. The pointer stays
/// valid until the next API call on the same thread.
#[no_mangle]
pub extern "C" fn ftlr_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ftlr_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

fn guard<F: FnOnce() -> FtlrStatus>(f: F) -> FtlrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            FtlrStatus::Panic
        }
    }
}

fn frame_from_raw(pixels: *const u8, width: u32, height: u32, index: usize) -> Result<Frame, FtlrStatus> {
    if pixels.is_null() {
        set_error("pixels must not be null");
        return Err(FtlrStatus::NullArgument);
    }
    let len = width as usize * height as usize;
    let bytes = unsafe { std::slice::from_raw_parts(pixels, len) };
    Frame::from_luma8(width as usize, height as usize, bytes, index).map_err(|e| {
        set_error(&e.to_string());
        FtlrStatus::InvalidFrame
    })
}

fn bbox_from(b: FtlrBox) -> Result<BoundingBox, FtlrStatus> {
    BoundingBox::new(b.x, b.y, b.w, b.h).map_err(|e| {
        set_error(&e.to_string());
        FtlrStatus::InvalidArgument
    })
}

/// Creates a tracker from the first frame (8-bit grayscale, row-major) and
/// the initial box. `config_text` may be null for defaults, or hold the same
/// `key=value` lines the CLI accepts (one per line, `\n`-separated).
///
/// # Safety
/// `pixels` must point to `width * height` readable bytes; `out_tracker`
/// must be a valid pointer. The returned handle must be released with
/// [`ftlr_tracker_free`].
#[no_mangle]
pub unsafe extern "C" fn ftlr_tracker_new(
    pixels: *const u8,
    width: u32,
    height: u32,
    init_box: FtlrBox,
    config_text: *const c_char,
    out_tracker: *mut *mut FtlrTracker,
) -> FtlrStatus {
    guard(|| {
        if out_tracker.is_null() {
            set_error("out_tracker must not be null");
            return FtlrStatus::NullArgument;
        }
        let frame = match frame_from_raw(pixels, width, height, 1) {
            Ok(f) => f,
            Err(status) => return status,
        };
        let b0 = match bbox_from(init_box) {
            Ok(b) => b,
            Err(status) => return status,
        };
        let mut config = TrackerConfig::default();
        if !config_text.is_null() {
            let text = match unsafe { CStr::from_ptr(config_text) }.to_str() {
                Ok(t) => t,
                Err(_) => {
                    set_error("config_text is not valid UTF-8");
                    return FtlrStatus::InvalidArgument;
                }
            };
            let parsed = KeyValues::parse(text)
                .and_then(|mut kv| apply_tracker_keys(&mut config, &mut kv).map(|()| kv));
            match parsed {
                Ok(kv) => {
                    if let Err(e) = kv.reject_leftovers() {
                        set_error(&e.to_string());
                        return FtlrStatus::InvalidArgument;
                    }
                }
                Err(e) => {
                    set_error(&e.to_string());
                    return FtlrStatus::InvalidArgument;
                }
            }
        }
        match Tracker::new(&frame, b0, config) {
            Ok(inner) => {
                let handle = Box::new(FtlrTracker {
                    inner,
                    next_index: 2,
                });
                unsafe { *out_tracker = Box::into_raw(handle) };
                FtlrStatus::Ok
            }
            Err(e) => {
                set_error(&e.to_string());
                FtlrStatus::TrackerError
            }
        }
    })
}

unsafe fn step_impl(
    tracker: *mut FtlrTracker,
    pixels: *const u8,
    width: u32,
    height: u32,
    gt: Option<FtlrBox>,
    out_result: *mut FtlrStepResult,
) -> FtlrStatus {
    if tracker.is_null() || out_result.is_null() {
        set_error("tracker and out_result must not be null");
        return FtlrStatus::NullArgument;
    }
    let handle = unsafe { &mut *tracker };
    let frame = match frame_from_raw(pixels, width, height, handle.next_index) {
        Ok(f) => f,
        Err(status) => return status,
    };
    let gt_box = match gt {
        Some(b) => match bbox_from(b) {
            Ok(b) => Some(b),
            Err(status) => return status,
        },
        None => None,
    };
    match handle.inner.step(&frame, gt_box.as_ref()) {
        Ok(outcome) => {
            handle.next_index += 1;
            unsafe {
                *out_result = FtlrStepResult {
                    bbox: FtlrBox {
                        x: outcome.bbox.x,
                        y: outcome.bbox.y,
                        w: outcome.bbox.w,
                        h: outcome.bbox.h,
                    },
                    confident: outcome.decision.confident as u8,
                    ratio: outcome.decision.ratio,
                    used_backup: outcome.used_backup as u8,
                };
            }
            FtlrStatus::Ok
        }
        Err(e) => {
            set_error(&e.to_string());
            FtlrStatus::TrackerError
        }
    }
}

/// Advances the tracker by one frame.
///
/// # Safety
/// `tracker` must come from [`ftlr_tracker_new`] and not be freed; `pixels`
/// must point to `width * height` readable bytes; `out_result` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ftlr_tracker_step(
    tracker: *mut FtlrTracker,
    pixels: *const u8,
    width: u32,
    height: u32,
    out_result: *mut FtlrStepResult,
) -> FtlrStatus {
    guard(|| unsafe { step_impl(tracker, pixels, width, height, None, out_result) })
}

/// Advances one frame supplying ground truth, required by the `ftlr_gt`
/// variant.
///
/// # Safety
/// Same contract as [`ftlr_tracker_step`].
#[no_mangle]
pub unsafe extern "C" fn ftlr_tracker_step_with_gt(
    tracker: *mut FtlrTracker,
    pixels: *const u8,
    width: u32,
    height: u32,
    gt: FtlrBox,
    out_result: *mut FtlrStepResult,
) -> FtlrStatus {
    guard(|| unsafe { step_impl(tracker, pixels, width, height, Some(gt), out_result) })
}

/// Current variant name of a live tracker, as a static string.
///
/// # Safety
/// `tracker` must be a live handle from [`ftlr_tracker_new`].
#[no_mangle]
pub unsafe extern "C" fn ftlr_tracker_variant(tracker: *const FtlrTracker) -> *const c_char {
    if tracker.is_null() {
        return ptr::null();
    }
    let handle = unsafe { &*tracker };
    let name: &'static [u8] = match handle.inner.config().variant {
        Variant::Baseline => b"baseline\0",
        Variant::Ftlr0 => b"ftlr_0\0",
        Variant::Ftlr1 => b"ftlr_1\0",
        Variant::Ftlr => b"ftlr\0",
        Variant::FtlrSa => b"ftlr_sa\0",
        Variant::FtlrGt => b"ftlr_gt\0",
    };
    name.as_ptr() as *const c_char
}

/// Releases a tracker handle. Passing null is a no-op.
///
/// # Safety
/// `tracker` must come from [`ftlr_tracker_new`] and must not be used after
/// this call.
#[no_mangle]
pub unsafe extern "C" fn ftlr_tracker_free(tracker: *mut FtlrTracker) {
    if !tracker.is_null() {
        drop(unsafe { Box::from_raw(tracker) });
    }
}
