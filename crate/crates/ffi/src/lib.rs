//! C interface to the fitting library.
//!
//! Every entry point returns an [`ArnoldiStatus`]; on failure the message is
//! available from [`arnoldi_last_error`] on the same thread. Models are
//! opaque handles released with [`arnoldi_model_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use arnoldi_lsq::{
    fit_poly, fit_rational, fit_sobolev_poly, fit_sobolev_rational, DenseVector, Error, FitModel, NodeSet, PoleSchedule,
};
use num_complex::Complex64;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArnoldiComplex {
    pub re: f64,
    pub im: f64,
}

impl From<ArnoldiComplex> for Complex64 {
    fn from(z: ArnoldiComplex) -> Self {
        Complex64::new(z.re, z.im)
    }
}

impl From<Complex64> for ArnoldiComplex {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArnoldiKind {
    Poly = 0,
    SobolevPoly = 1,
    Rational = 2,
    SobolevRational = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArnoldiStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Breakdown = 3,
    PoleEqualsNode = 4,
    EvaluationAtPole = 5,
    NonFinite = 6,
    Panic = 7,
}

impl From<&Error> for ArnoldiStatus {
    fn from(err: &Error) -> Self {
        match err {
            Error::Breakdown { .. } | Error::PencilDegenerate { .. } => Self::Breakdown,
            Error::PoleEqualsNode { .. } => Self::PoleEqualsNode,
            Error::EvaluationAtPole { .. } => Self::EvaluationAtPole,
            Error::NonFinite(_) => Self::NonFinite,
            _ => Self::InvalidInput,
        }
    }
}

/// Opaque fitted model.
pub struct ArnoldiModel(FitModel);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let text = CString::new(message.replace('\0', " ")).expect("interior nul bytes removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(text));
}

fn guard(body: impl FnOnce() -> Result<(), (ArnoldiStatus, String)>) -> ArnoldiStatus {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
    let outcome = catch_unwind(AssertUnwindSafe(body)).unwrap_or_else(|payload| {
        let text = payload
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| payload.downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "panic".into());
        Err((ArnoldiStatus::Panic, text))
    });
    match outcome {
        Ok(()) => ArnoldiStatus::Ok,
        Err((status, message)) => {
            set_last_error(message);
            status
        }
    }
}

fn lib_err(err: Error) -> (ArnoldiStatus, String) {
    ((&err).into(), err.to_string())
}

fn null(name: &str) -> (ArnoldiStatus, String) {
    (ArnoldiStatus::NullPointer, format!("{name} is null"))
}

/// Borrow `len` items, allowing a null pointer only when `len == 0`.
unsafe fn view<'a, T>(ptr: *const T, len: usize, name: &str) -> Result<&'a [T], (ArnoldiStatus, String)> {
    match (ptr.is_null(), len) {
        (_, 0) => Ok(&[]),
        (true, _) => Err(null(name)),
        // SAFETY: the caller guarantees `len` readable items behind `ptr`.
        (false, _) => Ok(unsafe { slice::from_raw_parts(ptr, len) }),
    }
}

fn complex(values: &[ArnoldiComplex]) -> Vec<Complex64> {
    values.iter().map(|&z| z.into()).collect()
}

/// Fits a model of `kind` and stores a new handle in `*out_model`.
///
/// `nodes` and `weights` hold `m` entries. `orders` holds `m` derivative
/// orders or is null for plain data. `f` holds one entry per data row, per
/// node the highest derivative first. `poles` holds `n` entries for the
/// rational kinds and is ignored otherwise.
///
/// # Safety
/// Every non-null pointer must reference the stated number of readable
/// items, and `out_model` must be writable.
#[no_mangle]
pub unsafe extern "C" fn arnoldi_fit(
    kind: ArnoldiKind,
    nodes: *const ArnoldiComplex,
    weights: *const ArnoldiComplex,
    orders: *const usize,
    m: usize,
    f: *const ArnoldiComplex,
    f_len: usize,
    n: usize,
    poles: *const ArnoldiComplex,
    reorth_passes: usize,
    out_model: *mut *mut ArnoldiModel,
) -> ArnoldiStatus {
    guard(|| {
        if out_model.is_null() {
            return Err(null("out_model"));
        }
        // SAFETY: pointer contracts are forwarded to the caller.
        let (z, w, rows) = unsafe { (view(nodes, m, "nodes")?, view(weights, m, "weights")?, view(f, f_len, "f")?) };
        let orders = if orders.is_null() {
            vec![0; m]
        } else {
            // SAFETY: as above.
            unsafe { view(orders, m, "orders")? }.to_vec()
        };
        let set = NodeSet::with_derivatives(complex(z), complex(w), orders, None).map_err(lib_err)?;
        let data = DenseVector::new(complex(rows)).map_err(lib_err)?;
        let schedule = || -> Result<PoleSchedule, (ArnoldiStatus, String)> {
            // SAFETY: as above.
            let xi = unsafe { view(poles, n, "poles")? };
            PoleSchedule::from_poles(&complex(xi)).map_err(lib_err)
        };
        let model = match kind {
            ArnoldiKind::Poly => fit_poly(&set, &data, n, reorth_passes).map(|(m, _)| m.into_fit_model()),
            ArnoldiKind::SobolevPoly => {
                fit_sobolev_poly(&set, &data, n, reorth_passes).map(|(m, _)| m.into_fit_model())
            }
            ArnoldiKind::Rational => {
                fit_rational(&set, &data, &schedule()?, reorth_passes).map(|(m, _)| m.into_fit_model())
            }
            ArnoldiKind::SobolevRational => {
                fit_sobolev_rational(&set, &data, &schedule()?, reorth_passes).map(|(m, _)| m.into_fit_model())
            }
        }
        .map_err(lib_err)?;
        // SAFETY: checked non-null above.
        unsafe { *out_model = Box::into_raw(Box::new(ArnoldiModel(model))) };
        Ok(())
    })
}

/// Evaluates the model and derivatives up to `order` at `count` points.
/// `out` receives `count * (order + 1)` values, per point the highest
/// derivative first.
///
/// # Safety
/// `model` must come from [`arnoldi_fit`] and not be freed; `points` must
/// hold `count` items and `out` must have room for `count * (order + 1)`.
#[no_mangle]
pub unsafe extern "C" fn arnoldi_eval(
    model: *const ArnoldiModel,
    points: *const ArnoldiComplex,
    count: usize,
    order: usize,
    out: *mut ArnoldiComplex,
) -> ArnoldiStatus {
    guard(|| {
        // SAFETY: the caller guarantees a live handle.
        let model = unsafe { model.as_ref() }.ok_or_else(|| null("model"))?;
        // SAFETY: as above.
        let xs = complex(unsafe { view(points, count, "points")? });
        let total =
            count.checked_mul(order + 1).ok_or((ArnoldiStatus::InvalidInput, "output size overflows".to_string()))?;
        if out.is_null() && total > 0 {
            return Err(null("out"));
        }
        let values = model.0.evaluate(&xs, &vec![order; count]).map_err(lib_err)?;
        for (i, v) in values.iter().enumerate() {
            // SAFETY: `out` has room for `total` items and `values.len() == total`.
            unsafe { *out.add(i) = (*v).into() };
        }
        Ok(())
    })
}

/// Degree of the model, or 0 for a null handle.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn arnoldi_model_degree(model: *const ArnoldiModel) -> usize {
    // SAFETY: the caller guarantees a live handle or null.
    unsafe { model.as_ref() }.map_or(0, |m| m.0.degree())
}

/// Releases a model; null is ignored.
///
/// # Safety
/// `model` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn arnoldi_model_free(model: *mut ArnoldiModel) {
    if !model.is_null() {
        // SAFETY: ownership returns from the caller.
        drop(unsafe { Box::from_raw(model) });
    }
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn arnoldi_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}
