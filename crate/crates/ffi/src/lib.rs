//! C ABI over `lqt-core`.
//!
//! Objects cross the boundary as opaque handles created by `lqt_*_new`-style
//! functions and released with the matching `lqt_*_free`. Matrices are
//! row-major; Hermitian operators are interleaved `(re, im)` pairs. Qubits are
//! numbered from 0.
//!
//! Every fallible function returns an [`LqtStatus`]. On failure the message is
//! kept per thread and can be read with [`lqt_last_error_message`]. Panics are
//! caught and reported as `LQT_STATUS_PANIC`.

use lqt_core::algebra::{exp_generator, quantum_generator, GeneratorMatrix, TransformMatrix};
use lqt_core::classify::{classify_generator_with, ClassificationResult, ClassifyOptions, Verdict};
use lqt_core::constraints::{first_order_nullspace, range_check, SamplingPlan};
use lqt_core::demos::negative_probability_demo;
use lqt_core::tensor::{
    bloch_from_hermitian, check_no_signalling, hermitian_from_bloch, outcome_probability, product_effect,
    product_vector, BlochTensor, BlochVector3, HermitianOperator,
};
use lqt_core::{CMatrix, Error, RMatrix, C64};
use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LqtStatus {
    Ok = 0,
    NullPointer = 1,
    /// Wrong shape, length or qubit count.
    Shape = 2,
    /// Input is not a valid representation (non-Hermitian, not unitary, ...).
    Representation = 3,
    InvalidArgument = 4,
    Numerical = 5,
    Io = 6,
    Parse = 7,
    Panic = 8,
    /// An output buffer is shorter than required.
    BufferTooSmall = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LqtVerdict {
    Local = 0,
    QuantumEntanglerPlus = 1,
    PartialTransposeEntanglerMinus = 2,
    Inadmissible = 3,
}

/// A Bloch tensor (state or unnormalized operator).
pub struct LqtBloch(BlochTensor);

/// A generator acting on Bloch tensors.
pub struct LqtGenerator(GeneratorMatrix);

/// A finite transformation acting on Bloch tensors.
pub struct LqtTransform(TransformMatrix);

/// The result of [`lqt_classify`].
pub struct LqtClassification(ClassificationResult);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(LqtStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Shape(_) | Error::DimensionMismatch { .. } => LqtStatus::Shape,
            Error::Representation(_)
            | Error::NotUnitary { .. }
            | Error::NotSpecialOrthogonal { .. }
            | Error::Unnormalized(_)
            | Error::BlochNorm { .. }
            | Error::SupportLeakage(_) => LqtStatus::Representation,
            Error::InvalidArgument(_) => LqtStatus::InvalidArgument,
            Error::Singular | Error::Numerical(_) => LqtStatus::Numerical,
            Error::Io(_) => LqtStatus::Io,
            Error::Parse(_) => LqtStatus::Parse,
        };
        Failure(status, e.to_string())
    }
}

type FfiResult = Result<(), Failure>;

fn null(what: &str) -> Failure {
    Failure(LqtStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> FfiResult) -> LqtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LqtStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            LqtStatus::Panic
        }
    }
}

unsafe fn input<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if p.is_null() {
        if len == 0 {
            return Ok(&[]);
        }
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn emit<T>(out: *mut *mut T, value: T) -> FfiResult {
    if out.is_null() {
        return Err(null("output handle"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn write_out<T: Copy>(out: *mut T, value: T, what: &str) -> FfiResult {
    if out.is_null() {
        return Err(null(what));
    }
    *out = value;
    Ok(())
}

unsafe fn copy_to(out: *mut f64, len: usize, values: &[f64]) -> FfiResult {
    if out.is_null() {
        return Err(null("output buffer"));
    }
    if len < values.len() {
        return Err(Failure(
            LqtStatus::BufferTooSmall,
            format!("buffer holds {len} values, {} needed", values.len()),
        ));
    }
    ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
    Ok(())
}

fn vectors(flat: &[f64]) -> Vec<BlochVector3> {
    flat.chunks_exact(3)
        .map(|c| BlochVector3::new(c[0], c[1], c[2]))
        .collect()
}

fn square_side(len: usize, what: &str) -> Result<usize, Failure> {
    let side = (len as f64).sqrt().round() as usize;
    if side * side != len {
        return Err(Failure(
            LqtStatus::Shape,
            format!("{what} length {len} is not a square"),
        ));
    }
    Ok(side)
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). `needed` (optional) receives the full length
/// including the terminator, or 0 when there is no error.
///
/// # Safety
/// `buf` must be writable for `len` bytes or null with `len == 0`; `needed`
/// must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn lqt_last_error_message(buf: *mut c_char, len: usize, needed: *mut usize) -> LqtStatus {
    let msg = LAST_ERROR.with(|e| e.borrow().clone());
    let bytes = msg.as_ref().map_or(&[][..], |m| m.as_bytes_with_nul());
    if !needed.is_null() {
        *needed = bytes.len();
    }
    if len == 0 || buf.is_null() {
        return if bytes.is_empty() || !needed.is_null() {
            LqtStatus::Ok
        } else {
            LqtStatus::BufferTooSmall
        };
    }
    if bytes.is_empty() {
        *buf = 0;
        return LqtStatus::Ok;
    }
    let n = bytes.len().min(len);
    ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
    *buf.add(n - 1) = 0;
    if n < bytes.len() {
        LqtStatus::BufferTooSmall
    } else {
        LqtStatus::Ok
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn lqt_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Bloch tensor of a `dim x dim` Hermitian operator given as `2 dim²`
/// interleaved `(re, im)` values, row-major.
///
/// # Safety
/// `re_im` must point to `2 * dim * dim` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lqt_bloch_from_hermitian(re_im: *const f64, dim: usize, out: *mut *mut LqtBloch) -> LqtStatus {
    guard(|| {
        let data = input(re_im, 2 * dim * dim, "re_im")?;
        let entries: Vec<C64> = data.chunks_exact(2).map(|c| C64::new(c[0], c[1])).collect();
        let op = HermitianOperator::new(CMatrix::from_row_slice(dim, dim, &entries))?;
        emit(out, LqtBloch(bloch_from_hermitian(&op)))
    })
}

/// Bloch tensor from its `4^n` coefficients.
///
/// # Safety
/// `coeffs` must point to `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lqt_bloch_new(coeffs: *const f64, len: usize, out: *mut *mut LqtBloch) -> LqtStatus {
    guard(|| {
        let data = input(coeffs, len, "coeffs")?;
        emit(out, LqtBloch(BlochTensor::new(data.to_vec())?))
    })
}

/// Product tensor `v(a1, .., an)` from `n` Bloch vectors stored as `3n`
/// doubles. Each vector must have norm at most 1.
///
/// # Safety
/// `vectors3` must point to `3 * n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lqt_bloch_product(vectors3: *const f64, n: usize, out: *mut *mut LqtBloch) -> LqtStatus {
    guard(|| {
        let data = input(vectors3, 3 * n, "vectors")?;
        emit(out, LqtBloch(product_vector(&vectors(data))?))
    })
}

/// Number of coefficients (`4^n`); 0 for a null handle.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lqt_bloch_len(r: *const LqtBloch) -> usize {
    r.as_ref().map_or(0, |r| r.0.coeffs().len())
}

/// Copies the coefficients into `out` (at least `lqt_bloch_len` values).
///
/// # Safety
/// `r` must be a live handle; `out` must be writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn lqt_bloch_coeffs(r: *const LqtBloch, out: *mut f64, len: usize) -> LqtStatus {
    guard(|| {
        let r = handle(r, "bloch")?;
        copy_to(out, len, r.0.coeffs().as_slice())
    })
}

/// Writes the Hermitian operator as `2 * 4^n` interleaved `(re, im)` values.
///
/// # Safety
/// `r` must be a live handle; `out` must be writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn lqt_bloch_to_hermitian(r: *const LqtBloch, out: *mut f64, len: usize) -> LqtStatus {
    guard(|| {
        let r = handle(r, "bloch")?;
        let m = hermitian_from_bloch(&r.0).into_matrix();
        let flat: Vec<f64> = m
            .row_iter()
            .flat_map(|row| row.iter().flat_map(|z| [z.re, z.im]).collect::<Vec<_>>())
            .collect();
        copy_to(out, len, &flat)
    })
}

/// No-signalling check of a state; `deviation` receives the largest marginal
/// deviation and `passed` whether it is within `tol`.
///
/// # Safety
/// `r` must be a live handle; `deviation` and `passed` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lqt_bloch_check_no_signalling(
    r: *const LqtBloch,
    tol: f64,
    deviation: *mut f64,
    passed: *mut bool,
) -> LqtStatus {
    guard(|| {
        let r = handle(r, "bloch")?;
        let report = check_no_signalling(&r.0, tol);
        write_out(deviation, report.max_deviation, "deviation")?;
        write_out(passed, report.passed, "passed")
    })
}

/// # Safety
/// `r` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lqt_bloch_free(r: *mut LqtBloch) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Generator of `ρ ↦ [i P, ρ]` for the Pauli string `P` given by `n` indices
/// in `0..=3`.
///
/// # Safety
/// `gammas` must point to `n` bytes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lqt_generator_quantum(gammas: *const u8, n: usize, out: *mut *mut LqtGenerator) -> LqtStatus {
    guard(|| {
        let g = input(gammas, n, "gammas")?;
        emit(out, LqtGenerator(quantum_generator(g)?))
    })
}

/// Generator from a row-major `4^n x 4^n` matrix of `len` doubles.
///
/// # Safety
/// `data` must point to `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lqt_generator_new(data: *const f64, len: usize, out: *mut *mut LqtGenerator) -> LqtStatus {
    guard(|| {
        let d = input(data, len, "data")?;
        let side = square_side(len, "generator")?;
        emit(
            out,
            LqtGenerator(GeneratorMatrix::new(RMatrix::from_row_slice(side, side, d))?),
        )
    })
}

/// Number of qubits; 0 for a null handle.
///
/// # Safety
/// `x` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lqt_generator_qubits(x: *const LqtGenerator) -> usize {
    x.as_ref().map_or(0, |x| x.0.n())
}

/// Copies the row-major matrix (`16^n` values) into `out`.
///
/// # Safety
/// `x` must be a live handle; `out` must be writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn lqt_generator_data(x: *const LqtGenerator, out: *mut f64, len: usize) -> LqtStatus {
    guard(|| {
        let x = handle(x, "generator")?;
        let flat: Vec<f64> = x.0.matrix().transpose().as_slice().to_vec();
        copy_to(out, len, &flat)
    })
}

/// # Safety
/// `x` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lqt_generator_free(x: *mut LqtGenerator) {
    if !x.is_null() {
        drop(Box::from_raw(x));
    }
}

/// `exp(t X)`.
///
/// # Safety
/// `x` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lqt_transform_exp(x: *const LqtGenerator, t: f64, out: *mut *mut LqtTransform) -> LqtStatus {
    guard(|| {
        let x = handle(x, "generator")?;
        if !t.is_finite() {
            return Err(Failure(LqtStatus::InvalidArgument, format!("t = {t} is not finite")));
        }
        emit(out, LqtTransform(exp_generator(&x.0, t)))
    })
}

/// `H r` as a new tensor.
///
/// # Safety
/// `h` and `r` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lqt_transform_apply(
    h: *const LqtTransform,
    r: *const LqtBloch,
    out: *mut *mut LqtBloch,
) -> LqtStatus {
    guard(|| {
        let (h, r) = (handle(h, "transform")?, handle(r, "bloch")?);
        emit(out, LqtBloch(h.0.apply(&r.0)?))
    })
}

/// # Safety
/// `h` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lqt_transform_free(h: *mut LqtTransform) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// `pᵀ H r` for the product effect `p = 2^-n v(b1, .., bn)` given by `3n`
/// doubles. `h` may be null for the identity. The value is not clamped.
///
/// # Safety
/// `effect3` must point to `3 * n` doubles; `h` null or live; `r` live;
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lqt_outcome_probability(
    effect3: *const f64,
    n: usize,
    h: *const LqtTransform,
    r: *const LqtBloch,
    out: *mut f64,
) -> LqtStatus {
    guard(|| {
        let p = product_effect(&vectors(input(effect3, 3 * n, "effect")?))?;
        let r = handle(r, "bloch")?;
        let value = outcome_probability(&p, h.as_ref().map(|h| &h.0), &r.0)?;
        write_out(out, value, "out")
    })
}

/// Samples product states and effects and reports the largest excursion of
/// `2^-n v(b)ᵀ H v(a)` outside `[0, 1]`.
///
/// # Safety
/// `h` must be a live handle; `max_violation` and `passed` writable.
#[no_mangle]
pub unsafe extern "C" fn lqt_range_check(
    h: *const LqtTransform,
    samples: u64,
    seed: u64,
    tol: f64,
    max_violation: *mut f64,
    passed: *mut bool,
) -> LqtStatus {
    guard(|| {
        let h = handle(h, "transform")?;
        let report = range_check(&h.0, samples, seed, tol);
        write_out(max_violation, report.max_violation, "max_violation")?;
        write_out(passed, report.passed, "passed")
    })
}

/// Dimension of the first-order constraint nullspace for `n` qubits (paper
/// row plan) and its spectral gap.
///
/// # Safety
/// `dimension` must be writable; `gap` may be null.
#[no_mangle]
pub unsafe extern "C" fn lqt_nullspace_dimension(n: usize, dimension: *mut usize, gap: *mut f64) -> LqtStatus {
    guard(|| {
        let r = first_order_nullspace(n, SamplingPlan::Paper)?;
        write_out(dimension, r.dimension, "dimension")?;
        if !gap.is_null() {
            *gap = r.spectral_gap;
        }
        Ok(())
    })
}

/// Runs the negative-probability demonstration. Both outputs are optional.
///
/// # Safety
/// Each output must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn lqt_negativity_demo(min_eigenvalue: *mut f64, probability_00: *mut f64) -> LqtStatus {
    guard(|| {
        let cert = negative_probability_demo()?;
        if !min_eigenvalue.is_null() {
            *min_eigenvalue = cert.state.min_eigenvalue;
        }
        if !probability_00.is_null() {
            *probability_00 = cert.probability_00;
        }
        Ok(())
    })
}

/// Classifies a generator. `tol` is relative; `samples` random constraint
/// samples are drawn from `seed`.
///
/// # Safety
/// `x` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lqt_classify(
    x: *const LqtGenerator,
    tol: f64,
    seed: u64,
    samples: u64,
    out: *mut *mut LqtClassification,
) -> LqtStatus {
    guard(|| {
        let x = handle(x, "generator")?;
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Failure(
                LqtStatus::InvalidArgument,
                format!("tolerance must be positive, got {tol}"),
            ));
        }
        let opts = ClassifyOptions { tol, seed, samples };
        emit(out, LqtClassification(classify_generator_with(&x.0, &opts)?))
    })
}

/// # Safety
/// `c` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lqt_classification_verdict(c: *const LqtClassification, out: *mut LqtVerdict) -> LqtStatus {
    guard(|| {
        let c = handle(c, "classification")?;
        let v = match c.0.verdict {
            Verdict::Local => LqtVerdict::Local,
            Verdict::QuantumEntanglerPlus => LqtVerdict::QuantumEntanglerPlus,
            Verdict::PartialTransposeEntanglerMinus => LqtVerdict::PartialTransposeEntanglerMinus,
            Verdict::Inadmissible => LqtVerdict::Inadmissible,
        };
        write_out(out, v, "out")
    })
}

/// Entangled qubit pair, if the verdict has one. `p` and `q` are left
/// untouched when `has_pair` is false.
///
/// # Safety
/// `c` must be a live handle; the outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn lqt_classification_pair(
    c: *const LqtClassification,
    has_pair: *mut bool,
    p: *mut usize,
    q: *mut usize,
) -> LqtStatus {
    guard(|| {
        let c = handle(c, "classification")?;
        write_out(has_pair, c.0.pair.is_some(), "has_pair")?;
        if let Some([a, b]) = c.0.pair {
            write_out(p, a, "p")?;
            write_out(q, b, "q")?;
        }
        Ok(())
    })
}

/// `+1` or `-1` for entanglers, 0 otherwise.
///
/// # Safety
/// `c` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lqt_classification_sign(c: *const LqtClassification, out: *mut i8) -> LqtStatus {
    guard(|| {
        let c = handle(c, "classification")?;
        write_out(out, c.0.sign.unwrap_or(0), "out")
    })
}

/// Full result as JSON. Release the string with [`lqt_string_free`].
///
/// # Safety
/// `c` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lqt_classification_to_json(c: *const LqtClassification, out: *mut *mut c_char) -> LqtStatus {
    guard(|| {
        let c = handle(c, "classification")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let text = serde_json::to_string(&c.0).map_err(|e| Failure(LqtStatus::Parse, e.to_string()))?;
        let s = CString::new(text).map_err(|e| Failure(LqtStatus::Parse, e.to_string()))?;
        *out = s.into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lqt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `c` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lqt_classification_free(c: *mut LqtClassification) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}
