//! C ABI over `metric-embed`.
//!
//! Objects are opaque heap handles created by `me_*_new`/`me_*_embed`/`*_verify`
//! and released with the matching `*_free`. Every fallible call returns an
//! [`MeStatus`]; on failure [`me_last_error`] describes the cause for the
//! calling thread. Output pointers are written only on success.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use metric_embed::ambient::BlockIsoModel;
use metric_embed::io::to_json_string;
use metric_embed::{
    gamma_bound, pair_index, series_constant, verify_lp, verify_proper, BoundsReport, Error, Exponent,
    FiniteMetricSpace, LpEmbedding, LpParams, LpPointSet, PointedSpace, ProperEmbedding, ThetaMode,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeStatus {
    Ok = 0,
    NullPointer = 1,
    /// The input is not a metric space (asymmetric, triangle violation, ...).
    InvalidMetric = 2,
    InvalidArgument = 3,
    /// The construction could not be carried out on this input.
    Unsupported = 4,
    Panic = 255,
}

/// A validated finite metric space.
pub struct MeSpace(FiniteMetricSpace);

pub struct MeProperEmbedding(ProperEmbedding);

pub struct MeLpEmbedding(LpEmbedding);

/// Outcome of a pairwise bound check.
pub struct MeReport(BoundsReport);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> MeStatus {
    match e {
        Error::NotSquare { .. }
        | Error::EmptyMatrix
        | Error::NonFiniteEntry(..)
        | Error::NegativeEntry(..)
        | Error::NonzeroDiagonal(_)
        | Error::AsymmetricMatrix(..)
        | Error::CoincidentPoints(..)
        | Error::TriangleViolation(..) => MeStatus::InvalidMetric,
        Error::AnnulusOutOfRange { .. } | Error::TooFewPoints(_) | Error::SizeCapExceeded { .. } => {
            MeStatus::Unsupported
        }
        _ => MeStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), MeStatus>) -> MeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MeStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            MeStatus::Panic
        }
    }
}

trait OrStatus<T> {
    fn or_status(self) -> Result<T, MeStatus>;
}

impl<T> OrStatus<T> for metric_embed::Result<T> {
    fn or_status(self) -> Result<T, MeStatus> {
        self.map_err(|e| {
            set_error(&e.to_string());
            status_of(&e)
        })
    }
}

fn null() -> MeStatus {
    set_error("null pointer argument");
    MeStatus::NullPointer
}

unsafe fn out_ptr<'a, T>(p: *mut T) -> Result<&'a mut T, MeStatus> {
    p.as_mut().ok_or_else(null)
}

unsafe fn in_ref<'a, T>(p: *const T) -> Result<&'a T, MeStatus> {
    p.as_ref().ok_or_else(null)
}

unsafe fn slice<'a>(p: *const f64, len: usize) -> Result<&'a [f64], MeStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null());
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn release<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Message for the last failed call on this thread. Valid until the next
/// failing call on the same thread; never null.
#[no_mangle]
pub extern "C" fn me_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Validates a row-major `n x n` distance matrix.
///
/// # Safety
/// `dist` must point to `n * n` readable doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn me_space_new(dist: *const f64, n: usize, out: *mut *mut MeSpace) -> MeStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let cells = n.checked_mul(n).ok_or_else(|| {
            set_error("matrix size overflows");
            MeStatus::InvalidArgument
        })?;
        let flat = slice(dist, cells)?;
        let rows: Vec<Vec<f64>> = flat.chunks(n.max(1)).map(<[f64]>::to_vec).collect();
        let space = FiniteMetricSpace::new(&rows).or_status()?;
        *out = Box::into_raw(Box::new(MeSpace(space)));
        Ok(())
    })
}

/// # Safety
/// `space` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn me_space_len(space: *const MeSpace) -> usize {
    space.as_ref().map_or(0, |s| s.0.len())
}

/// # Safety
/// `space` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn me_space_free(space: *mut MeSpace) {
    release(space)
}

/// Builds the dyadic Fréchet embedding of `space` pointed at `basepoint`.
/// With `seeded` set the block factors are drawn from `[1/2, 1]` using
/// `seed`; otherwise every factor is 1.
///
/// # Safety
/// `space` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn me_proper_embed(
    space: *const MeSpace,
    basepoint: usize,
    seeded: bool,
    seed: u64,
    out: *mut *mut MeProperEmbedding,
) -> MeStatus {
    guard(|| {
        let space = in_ref(space)?;
        let out = out_ptr(out)?;
        let iso = if seeded {
            BlockIsoModel::seeded(seed, 0.5, 1.0).or_status()?
        } else {
            BlockIsoModel::exact()
        };
        let domain = PointedSpace::new(space.0.clone(), basepoint).or_status()?;
        let emb = ProperEmbedding::with_defaults(domain, iso).or_status()?;
        *out = Box::into_raw(Box::new(MeProperEmbedding(emb)));
        Ok(())
    })
}

/// # Safety
/// `emb` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn me_proper_image_distance(
    emb: *const MeProperEmbedding,
    a: usize,
    b: usize,
    out: *mut f64,
) -> MeStatus {
    guard(|| {
        let emb = &in_ref(emb)?.0;
        let out = out_ptr(out)?;
        emb.domain().space().check_index(a).or_status()?;
        emb.domain().space().check_index(b).or_status()?;
        *out = emb.image_distance(a, b);
        Ok(())
    })
}

/// Truncated weight sum used in the upper bound `9 C_trunc d`.
///
/// # Safety
/// `emb` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn me_proper_c_trunc(emb: *const MeProperEmbedding, out: *mut f64) -> MeStatus {
    guard(|| {
        *out_ptr(out)? = in_ref(emb)?.0.params().c_trunc();
        Ok(())
    })
}

/// # Safety
/// `emb` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn me_proper_verify(emb: *const MeProperEmbedding, out: *mut *mut MeReport) -> MeStatus {
    guard(|| {
        let emb = in_ref(emb)?;
        let out = out_ptr(out)?;
        let report = verify_proper(&emb.0).or_status()?;
        *out = Box::into_raw(Box::new(MeReport(report)));
        Ok(())
    })
}

/// # Safety
/// `emb` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn me_proper_free(emb: *mut MeProperEmbedding) {
    release(emb)
}

/// Embeds `n` points of dimension `dim` (row-major) under the `lp` distance.
/// `p` may be `INFINITY`. With `random_theta` set the block factors are
/// drawn from `[1/(1+delta), 1]` using `seed`.
///
/// # Safety
/// `points` must point to `n * dim` readable doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn me_lp_embed(
    points: *const f64,
    n: usize,
    dim: usize,
    p: f64,
    basepoint: usize,
    delta: f64,
    lambda_sim: f64,
    random_theta: bool,
    seed: u64,
    out: *mut *mut MeLpEmbedding,
) -> MeStatus {
    guard(|| {
        let out = out_ptr(out)?;
        if dim == 0 {
            set_error("dimension must be positive");
            return Err(MeStatus::InvalidArgument);
        }
        let cells = n.checked_mul(dim).ok_or_else(|| {
            set_error("point array size overflows");
            MeStatus::InvalidArgument
        })?;
        let flat = slice(points, cells)?;
        let rows = flat.chunks(dim).map(<[f64]>::to_vec).collect();
        let set = LpPointSet::new(Exponent::new(p).or_status()?, rows, basepoint).or_status()?;
        let theta = if random_theta { ThetaMode::Random } else { ThetaMode::Exact };
        let params = LpParams::new(delta, lambda_sim, theta, seed).or_status()?;
        let emb = LpEmbedding::build(&set, params).or_status()?;
        *out = Box::into_raw(Box::new(MeLpEmbedding(emb)));
        Ok(())
    })
}

/// `|f(a) - f(b)|` for the normalized point set.
///
/// # Safety
/// `emb` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn me_lp_image_distance(emb: *const MeLpEmbedding, a: usize, b: usize, out: *mut f64) -> MeStatus {
    guard(|| {
        let emb = &in_ref(emb)?.0;
        let out = out_ptr(out)?;
        let len = emb.set().len();
        if let Some(&index) = [a, b].iter().find(|&&i| i >= len) {
            return Err(Error::IndexOutOfRange { index, len }).or_status();
        }
        *out = emb.image_distance(a, b);
        Ok(())
    })
}

/// # Safety
/// `emb` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn me_lp_verify(emb: *const MeLpEmbedding, out: *mut *mut MeReport) -> MeStatus {
    guard(|| {
        let emb = in_ref(emb)?;
        let out = out_ptr(out)?;
        let report = verify_lp(&emb.0).or_status()?;
        *out = Box::into_raw(Box::new(MeReport(report)));
        Ok(())
    })
}

/// # Safety
/// `emb` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn me_lp_free(emb: *mut MeLpEmbedding) {
    release(emb)
}

/// True when every pair satisfied the envelope.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn me_report_passed(report: *const MeReport) -> bool {
    report.as_ref().is_some_and(|r| r.0.passed())
}

/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn me_report_pair_count(report: *const MeReport) -> usize {
    report.as_ref().map_or(0, |r| r.0.pair_count())
}

/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn me_report_failed_count(report: *const MeReport) -> usize {
    report.as_ref().map_or(0, |r| r.0.failed_count())
}

/// Smallest `|f(a)-f(b)| - lower(d)` over all pairs, or NaN with no pairs.
///
/// # Safety
/// `report` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn me_report_worst_lower_slack(report: *const MeReport, out: *mut f64) -> MeStatus {
    guard(|| {
        *out_ptr(out)? = in_ref(report)?.0.worst_lower_slack.map_or(f64::NAN, |s| s.value);
        Ok(())
    })
}

/// Smallest `upper(d) - |f(a)-f(b)|` over all pairs, or NaN with no pairs.
///
/// # Safety
/// `report` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn me_report_worst_upper_slack(report: *const MeReport, out: *mut f64) -> MeStatus {
    guard(|| {
        *out_ptr(out)? = in_ref(report)?.0.worst_upper_slack.map_or(f64::NAN, |s| s.value);
        Ok(())
    })
}

/// Full report as JSON. Release the string with [`me_string_free`].
///
/// # Safety
/// `report` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn me_report_to_json(report: *const MeReport, out: *mut *mut c_char) -> MeStatus {
    guard(|| {
        let report = in_ref(report)?;
        let out = out_ptr(out)?;
        let text = CString::new(to_json_string(&report.0)).expect("JSON has no interior NUL");
        *out = text.into_raw();
        Ok(())
    })
}

/// # Safety
/// `report` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn me_report_free(report: *mut MeReport) {
    release(report)
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn me_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Lower envelope `gamma(t)` for `t > 0`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn me_gamma_bound(t: f64, out: *mut f64) -> MeStatus {
    guard(|| {
        *out_ptr(out)? = gamma_bound(t).or_status()?;
        Ok(())
    })
}

/// Sum of `1 / (m^2 + 1)` over all integers `m`.
#[no_mangle]
pub extern "C" fn me_series_constant() -> f64 {
    series_constant()
}

/// Block index of `(n, k)`, `k >= 1`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn me_pair_index(n: i64, k: i64, out: *mut u64) -> MeStatus {
    guard(|| {
        *out_ptr(out)? = pair_index(n, k).or_status()?;
        Ok(())
    })
}
