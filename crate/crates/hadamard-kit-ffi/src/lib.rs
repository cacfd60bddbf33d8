//! C ABI for the Hadamard-product toolkit.
//!
//! Objects cross the boundary as opaque handles created and released by the
//! `hk_*_new` / `hk_*_free` pairs. Fallible calls return an [`HkStatus`];
//! the most recent error message is kept per thread and can be read with
//! [`hk_last_error_message`]. Strings returned by the library must be
//! released with [`hk_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};

use num_complex::Complex64;

use hadamard_kit::error::Error;
use hadamard_kit::functions::FunctionDef;
use hadamard_kit::hadamard::{
    commutativity_defect, hadamard_at, pohlen_at, residue_zero_loop,
};
use hadamard_kit::sets::{
    convolvable, preset, star_eligible, strongly_convolvable, StarSet, StarSetRecord,
};

/// Status codes returned by fallible calls.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HkStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// Arguments were malformed (bad UTF-8, bad JSON, unknown preset, ...).
    InvalidArgument = 2,
    /// The operation is undefined for these inputs (domain error).
    DomainError = 3,
    /// A numeric tolerance could not be met.
    NumericError = 4,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap();
    });
}

fn status_of(err: &Error) -> HkStatus {
    match err.exit_code() {
        3 => HkStatus::NumericError,
        _ => HkStatus::DomainError,
    }
}

fn fail(err: &Error) -> HkStatus {
    set_error(&err.to_string());
    status_of(err)
}

/// Opaque handle: a closed subset of C* as a union of log-polar boxes.
pub struct HkStarSet(StarSet);

/// Opaque handle: a holomorphic function with its declared singular set.
pub struct HkFunction(FunctionDef);

/// Library version string; a static, do not free.
#[no_mangle]
pub extern "C" fn hk_version() -> *const c_char {
    concat!("hadamard-kit ", env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message of the most recent error on this thread; valid until the next
/// failing call on the same thread. Do not free.
#[no_mangle]
pub extern "C" fn hk_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Release a string returned by the library.
///
/// # Safety
/// `s` must come from this library and not have been freed before.
#[no_mangle]
pub unsafe extern "C" fn hk_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

unsafe fn cstr<'a>(ptr: *const c_char) -> Option<&'a str> {
    if ptr.is_null() {
        return None;
    }
    CStr::from_ptr(ptr).to_str().ok()
}

/// Parse a star set from its JSON record
/// `{ "label": ..., "boxes": [ { "rho": [lo, hi], "arc": ... } ] }`.
/// Returns null on failure (see `hk_last_error_message`).
///
/// # Safety
/// `json` must be a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn hk_starset_parse_json(json: *const c_char) -> *mut HkStarSet {
    let Some(text) = cstr(json) else {
        set_error("null or non-UTF-8 json argument");
        return std::ptr::null_mut();
    };
    let record: StarSetRecord = match serde_json::from_str(text) {
        Ok(r) => r,
        Err(e) => {
            set_error(&e.to_string());
            return std::ptr::null_mut();
        }
    };
    match record.into_set() {
        Ok(s) => Box::into_raw(Box::new(HkStarSet(s))),
        Err(e) => {
            set_error(&e.to_string());
            std::ptr::null_mut()
        }
    }
}

/// Build a named preset such as `ray(3.1415, 1.0)` or `disk_complement(2.0)`.
///
/// # Safety
/// `spec` must be a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn hk_starset_preset(spec: *const c_char) -> *mut HkStarSet {
    let Some(text) = cstr(spec) else {
        set_error("null or non-UTF-8 preset argument");
        return std::ptr::null_mut();
    };
    match preset(text) {
        Ok(s) => Box::into_raw(Box::new(HkStarSet(s))),
        Err(e) => {
            set_error(&e.to_string());
            std::ptr::null_mut()
        }
    }
}

/// Serialize a star set to its JSON record. Free with `hk_string_free`.
///
/// # Safety
/// `set` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn hk_starset_to_json(set: *const HkStarSet) -> *mut c_char {
    if set.is_null() {
        set_error("null set");
        return std::ptr::null_mut();
    }
    let record = StarSetRecord::from_set(&(*set).0);
    let json = serde_json::to_string(&record).unwrap_or_default();
    CString::new(json).map(CString::into_raw).unwrap_or(std::ptr::null_mut())
}

/// # Safety
/// `set` must be a live handle from this library (or null).
#[no_mangle]
pub unsafe extern "C" fn hk_starset_free(set: *mut HkStarSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Exact product set; null on failure.
///
/// # Safety
/// Both arguments must be live handles.
#[no_mangle]
pub unsafe extern "C" fn hk_starset_product(
    a: *const HkStarSet,
    b: *const HkStarSet,
) -> *mut HkStarSet {
    if a.is_null() || b.is_null() {
        set_error("null set");
        return std::ptr::null_mut();
    }
    match (*a).0.product(&(*b).0) {
        Ok(p) => Box::into_raw(Box::new(HkStarSet(p))),
        Err(e) => {
            set_error(&e.to_string());
            std::ptr::null_mut()
        }
    }
}

/// Exact inverse set {z : 1/z in S}.
///
/// # Safety
/// `a` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn hk_starset_inverse(a: *const HkStarSet) -> *mut HkStarSet {
    if a.is_null() {
        set_error("null set");
        return std::ptr::null_mut();
    }
    Box::into_raw(Box::new(HkStarSet((*a).0.inverse())))
}

/// Exact scaled set z*S for nonzero z = re + i*im.
///
/// # Safety
/// `a` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn hk_starset_scale(
    a: *const HkStarSet,
    re: f64,
    im: f64,
) -> *mut HkStarSet {
    if a.is_null() {
        set_error("null set");
        return std::ptr::null_mut();
    }
    let z = Complex64::new(re, im);
    if z.norm() == 0.0 {
        set_error("scale factor must be nonzero");
        return std::ptr::null_mut();
    }
    Box::into_raw(Box::new(HkStarSet((*a).0.scale(z))))
}

/// Membership within tolerance `tol` in cylinder coordinates.
///
/// # Safety
/// `a` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn hk_starset_contains(
    a: *const HkStarSet,
    re: f64,
    im: f64,
    tol: f64,
    out: *mut bool,
) -> HkStatus {
    if a.is_null() || out.is_null() {
        set_error("null argument");
        return HkStatus::NullArgument;
    }
    *out = (*a).0.contains(Complex64::new(re, im), tol);
    HkStatus::Ok
}

/// Properness: the boxes do not cover the whole cylinder.
///
/// # Safety
/// `a` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn hk_starset_is_proper(a: *const HkStarSet, out: *mut bool) -> HkStatus {
    if a.is_null() || out.is_null() {
        set_error("null argument");
        return HkStatus::NullArgument;
    }
    *out = (*a).0.is_proper();
    HkStatus::Ok
}

macro_rules! pair_predicate {
    ($(#[$doc:meta])* $name:ident, $f:path) => {
        $(#[$doc])*
        /// # Safety
        /// All pointers must be valid.
        #[no_mangle]
        pub unsafe extern "C" fn $name(
            a: *const HkStarSet,
            b: *const HkStarSet,
            out: *mut bool,
        ) -> HkStatus {
            if a.is_null() || b.is_null() || out.is_null() {
                set_error("null argument");
                return HkStatus::NullArgument;
            }
            *out = $f(&(*a).0, &(*b).0);
            HkStatus::Ok
        }
    };
}

pair_predicate!(
    /// Star-eligibility of the closed sets.
    hk_star_eligible,
    star_eligible
);
pair_predicate!(
    /// Convolvability of the closed sets.
    hk_convolvable,
    convolvable
);
pair_predicate!(
    /// Strong convolvability of the closed sets.
    hk_strongly_convolvable,
    strongly_convolvable
);

/// Build a function from expression text and a singular set (cloned); the
/// `vanishes_at_inf` assertion is verified when testable. Null on failure.
///
/// # Safety
/// `expr` must be NUL-terminated; `singular` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn hk_function_new(
    expr: *const c_char,
    singular: *const HkStarSet,
    vanishes_at_inf: bool,
) -> *mut HkFunction {
    let Some(text) = cstr(expr) else {
        set_error("null or non-UTF-8 expression");
        return std::ptr::null_mut();
    };
    if singular.is_null() {
        set_error("null singular set");
        return std::ptr::null_mut();
    }
    match FunctionDef::from_text(text, (*singular).0.clone(), vanishes_at_inf) {
        Ok(f) => Box::into_raw(Box::new(HkFunction(f))),
        Err(e) => {
            set_error(&e.to_string());
            std::ptr::null_mut()
        }
    }
}

/// # Safety
/// `f` must be a live handle from this library (or null).
#[no_mangle]
pub unsafe extern "C" fn hk_function_free(f: *mut HkFunction) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

unsafe fn write_value(
    out_re: *mut f64,
    out_im: *mut f64,
    r: Result<Complex64, Error>,
) -> HkStatus {
    match r {
        Ok(v) => {
            *out_re = v.re;
            *out_im = v.im;
            HkStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Evaluate the function at z = re + i*im.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn hk_function_eval(
    f: *const HkFunction,
    re: f64,
    im: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> HkStatus {
    if f.is_null() || out_re.is_null() || out_im.is_null() {
        set_error("null argument");
        return HkStatus::NullArgument;
    }
    write_value(out_re, out_im, (*f).0.eval(Complex64::new(re, im)))
}

/// Generalized Hadamard product (f1 * f2)(z).
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn hk_hadamard_at(
    f1: *const HkFunction,
    f2: *const HkFunction,
    re: f64,
    im: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> HkStatus {
    if f1.is_null() || f2.is_null() || out_re.is_null() || out_im.is_null() {
        set_error("null argument");
        return HkStatus::NullArgument;
    }
    write_value(
        out_re,
        out_im,
        hadamard_at(&(*f1).0, &(*f2).0, Complex64::new(re, im)),
    )
}

/// Table-based product of Pohlen type.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn hk_pohlen_at(
    f1: *const HkFunction,
    f2: *const HkFunction,
    re: f64,
    im: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> HkStatus {
    if f1.is_null() || f2.is_null() || out_re.is_null() || out_im.is_null() {
        set_error("null argument");
        return HkStatus::NullArgument;
    }
    write_value(
        out_re,
        out_im,
        pohlen_at(&(*f1).0, &(*f2).0, Complex64::new(re, im)),
    )
}

/// (f1 * f2 - f2 * f1)(z).
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn hk_commutativity_defect(
    f1: *const HkFunction,
    f2: *const HkFunction,
    re: f64,
    im: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> HkStatus {
    if f1.is_null() || f2.is_null() || out_re.is_null() || out_im.is_null() {
        set_error("null argument");
        return HkStatus::NullArgument;
    }
    write_value(
        out_re,
        out_im,
        commutativity_defect(&(*f1).0, &(*f2).0, Complex64::new(re, im)),
    )
}

/// Small-circle residue probe at radius r around 0; equals f1(0) f2(inf)
/// for admissible inputs.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn hk_residue_zero_loop(
    f1: *const HkFunction,
    f2: *const HkFunction,
    re: f64,
    im: f64,
    r: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> HkStatus {
    if f1.is_null() || f2.is_null() || out_re.is_null() || out_im.is_null() {
        set_error("null argument");
        return HkStatus::NullArgument;
    }
    if !(r > 0.0) {
        set_error("radius must be positive");
        return HkStatus::InvalidArgument;
    }
    write_value(
        out_re,
        out_im,
        residue_zero_loop(&(*f1).0, &(*f2).0, Complex64::new(re, im), r),
    )
}
