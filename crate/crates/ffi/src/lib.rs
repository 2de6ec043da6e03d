//! C ABI over `unibasis`.
//!
//! Objects cross the boundary as opaque handles (`UbBasis`, `UbScheme`)
//! that the caller releases with the matching `*_free` function. Every
//! fallible call returns a [`UbStatus`]; on failure a description is kept
//! per thread and can be fetched with [`ub_last_error_message`].
//!
//! Complex numbers are passed as interleaved `(re, im)` pairs of `double`,
//! matrices row-major. A `d x d` matrix therefore occupies `2 d²` doubles.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use unibasis::document::{DesignDocument, Payload};
use unibasis::{
    build_scheme, count_normalized_latin, extract_basis_from_scheme, shift_multiply_basis, swap_roles, teleport_state,
    tensor_bases, verify_dense_coding, verify_depolarizer, verify_orthonormal, verify_teleportation, weyl_basis,
    Complex64, ComplexMatrix, Error, HadamardMatrix, LatinSquare, Mode, TightScheme, UnitaryBasis,
};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    DesignInvalid = 4,
    NotUnitary = 5,
    NotDensityOperator = 6,
    SchemeInvalid = 7,
    DimensionTooLarge = 8,
    ParseError = 9,
    BufferTooSmall = 10,
    Panic = 11,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UbMode {
    Teleportation = 0,
    DenseCoding = 1,
}

impl From<UbMode> for Mode {
    fn from(m: UbMode) -> Mode {
        match m {
            UbMode::Teleportation => Mode::Teleportation,
            UbMode::DenseCoding => Mode::DenseCoding,
        }
    }
}

impl From<Mode> for UbMode {
    fn from(m: Mode) -> UbMode {
        match m {
            Mode::Teleportation => UbMode::Teleportation,
            Mode::DenseCoding => UbMode::DenseCoding,
        }
    }
}

/// Opaque unitary operator basis.
pub struct UbBasis {
    inner: UnitaryBasis,
}

/// Opaque tight teleportation / dense-coding scheme.
pub struct UbScheme {
    inner: TightScheme,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Failure(UbStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::DimensionMismatch(_) | Error::CountMismatch { .. } => UbStatus::DimensionMismatch,
            Error::DesignInvalid(_)
            | Error::SymbolOutOfRange { .. }
            | Error::NotUnimodular { .. }
            | Error::PeriodicityViolated { .. }
            | Error::BadPermutation { .. } => UbStatus::DesignInvalid,
            Error::NotUnitary { .. } | Error::NotUnitaryExtraction { .. } => UbStatus::NotUnitary,
            Error::NotDensityOperator(_) => UbStatus::NotDensityOperator,
            Error::SchemeInvalid { .. } => UbStatus::SchemeInvalid,
            Error::DimensionTooLarge { .. } => UbStatus::DimensionTooLarge,
            _ => UbStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn fail<T>(status: UbStatus, msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure(status, msg.into()))
}

/// Runs `f`, recording any error or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> UbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            clear_last_error();
            UbStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            UbStatus::Panic
        }
    }
}

unsafe fn as_ref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    if p.is_null() {
        fail(UbStatus::NullPointer, format!("{} is null", what))
    } else {
        Ok(&*p)
    }
}

unsafe fn out_ptr<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    if p.is_null() {
        fail(UbStatus::NullPointer, format!("{} is null", what))
    } else {
        Ok(&mut *p)
    }
}

unsafe fn input_slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return fail(UbStatus::NullPointer, format!("{} is null", what));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn output_slice<'a, T>(p: *mut T, len: usize, what: &str) -> Result<&'a mut [T], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return fail(UbStatus::NullPointer, format!("{} is null", what));
    }
    Ok(slice::from_raw_parts_mut(p, len))
}

unsafe fn input_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return fail(UbStatus::NullPointer, format!("{} is null", what));
    }
    CStr::from_ptr(p)
        .to_str()
        .or_else(|_| fail(UbStatus::InvalidArgument, format!("{} is not UTF-8", what)))
}

fn matrix_from_interleaved(d: usize, data: &[f64]) -> Result<ComplexMatrix, Failure> {
    let entries = data.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect();
    Ok(ComplexMatrix::new(d, d, entries)?)
}

fn write_interleaved(m: &ComplexMatrix, out: &mut [f64]) {
    for (slot, z) in out.chunks_exact_mut(2).zip(m.as_slice()) {
        slot[0] = z.re;
        slot[1] = z.im;
    }
}

fn positive_dim(d: usize) -> Result<(), Failure> {
    if d == 0 {
        fail(UbStatus::InvalidArgument, "dimension must be positive")
    } else {
        Ok(())
    }
}

fn parse_document(text: &str) -> Result<DesignDocument, Failure> {
    DesignDocument::from_json(text).or_else(|e| fail(UbStatus::ParseError, e.to_string()))
}

fn export_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .or_else(|_| fail(UbStatus::InvalidArgument, "string contains NUL"))
}

/// Copies the calling thread's last error message into `buf` (NUL
/// terminated, truncated to `len`). Returns the length of the full message
/// excluding the terminator, or 0 when there is none.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn ub_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| match e.borrow().as_ref() {
        None => {
            if !buf.is_null() && len > 0 {
                *buf = 0;
            }
            0
        }
        Some(msg) => {
            let bytes = msg.as_bytes();
            if !buf.is_null() && len > 0 {
                let n = bytes.len().min(len - 1);
                ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
                *buf.add(n) = 0;
            }
            bytes.len()
        }
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ub_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a pointer previously returned by this library.
#[no_mangle]
pub unsafe extern "C" fn ub_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Number of normalized Latin squares of order `d` (`d <= 5`).
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ub_count_normalized_latin(d: usize, out: *mut u64) -> UbStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = count_normalized_latin(d)?;
        Ok(())
    })
}

fn store_basis(out: &mut *mut UbBasis, inner: UnitaryBasis) {
    *out = Box::into_raw(Box::new(UbBasis { inner }));
}

/// Builds the Weyl (clock and shift) basis of dimension `d`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ub_basis_weyl(d: usize, out: *mut *mut UbBasis) -> UbStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        positive_dim(d)?;
        store_basis(out, weyl_basis(d));
        Ok(())
    })
}

/// Shift-and-multiply basis from a Latin square (`d²` symbols, row-major)
/// and `d` Hadamard matrices (`2 d³` doubles, matrix after matrix).
///
/// # Safety
/// `latin` must hold `d²` values and `hadamards` `2 d³` doubles; `out` must
/// be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ub_basis_shift_multiply(
    d: usize,
    latin: *const usize,
    hadamards: *const f64,
    tol: f64,
    out: *mut *mut UbBasis,
) -> UbStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        positive_dim(d)?;
        let grid_flat = input_slice(latin, d * d, "latin")?;
        let h_flat = input_slice(hadamards, 2 * d * d * d, "hadamards")?;
        let grid: Vec<Vec<usize>> = grid_flat.chunks(d).map(<[usize]>::to_vec).collect();
        let latin = LatinSquare::new(grid)?;
        let mut hs = Vec::with_capacity(d);
        for chunk in h_flat.chunks(2 * d * d) {
            hs.push(HadamardMatrix::new(matrix_from_interleaved(d, chunk)?, tol)?);
        }
        store_basis(out, shift_multiply_basis(&latin, &hs)?);
        Ok(())
    })
}

/// Basis from `d²` explicit matrices (`2 d⁴` doubles); validated to `tol`.
///
/// # Safety
/// `data` must hold `2 d⁴` doubles; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ub_basis_from_elements(
    d: usize,
    data: *const f64,
    tol: f64,
    out: *mut *mut UbBasis,
) -> UbStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        positive_dim(d)?;
        let flat = input_slice(data, 2 * d * d * d * d, "data")?;
        let elements = flat
            .chunks(2 * d * d)
            .map(|c| matrix_from_interleaved(d, c))
            .collect::<Result<Vec<_>, _>>()?;
        store_basis(out, UnitaryBasis::new(elements, tol)?);
        Ok(())
    })
}

/// Loads a `unitary_basis` JSON document.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ub_basis_from_json(json: *const c_char, out: *mut *mut UbBasis) -> UbStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        match parse_document(input_str(json, "json")?)?.payload {
            Payload::UnitaryBasis(b) => {
                store_basis(out, b);
                Ok(())
            }
            other => fail(
                UbStatus::InvalidArgument,
                format!("expected a unitary_basis document, found {}", other.kind()),
            ),
        }
    })
}

/// Serializes the basis as a JSON document; release with `ub_string_free`.
///
/// # Safety
/// `basis` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ub_basis_to_json(basis: *const UbBasis, out: *mut *mut c_char) -> UbStatus {
    guard(|| {
        let b = as_ref(basis, "basis")?;
        let out = out_ptr(out, "out")?;
        let doc = DesignDocument::new(Payload::UnitaryBasis(b.inner.clone()), "");
        *out = export_string(doc.to_json())?;
        Ok(())
    })
}

/// `U_x ⊗ V_y` with flat index `x * n2 + y`.
///
/// # Safety
/// `a` and `b` must be live handles; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ub_basis_tensor(a: *const UbBasis, b: *const UbBasis, out: *mut *mut UbBasis) -> UbStatus {
    guard(|| {
        let a = as_ref(a, "a")?;
        let b = as_ref(b, "b")?;
        let out = out_ptr(out, "out")?;
        store_basis(out, tensor_bases(&a.inner, &b.inner));
        Ok(())
    })
}

/// Dimension `d` of the underlying space; 0 for a null handle.
///
/// # Safety
/// `basis` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ub_basis_dim(basis: *const UbBasis) -> usize {
    basis.as_ref().map_or(0, |b| b.inner.dim())
}

/// Number of elements (`d²`); 0 for a null handle.
///
/// # Safety
/// `basis` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ub_basis_len(basis: *const UbBasis) -> usize {
    basis.as_ref().map_or(0, |b| b.inner.len())
}

/// Copies element `x` into `out` (`2 d²` doubles).
///
/// # Safety
/// `basis` must be a live handle; `out` must be valid for `out_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ub_basis_element(basis: *const UbBasis, x: usize, out: *mut f64, out_len: usize) -> UbStatus {
    guard(|| {
        let b = as_ref(basis, "basis")?;
        if x >= b.inner.len() {
            return fail(
                UbStatus::InvalidArgument,
                format!("element {} out of range (len {})", x, b.inner.len()),
            );
        }
        let d = b.inner.dim();
        if out_len < 2 * d * d {
            return fail(UbStatus::BufferTooSmall, format!("need {} doubles", 2 * d * d));
        }
        write_interleaved(b.inner.element(x), output_slice(out, out_len, "out")?);
        Ok(())
    })
}

/// Gram-matrix deviation `max |tr(U_x* U_y)/d - δ_xy|`.
///
/// # Safety
/// `basis` must be a live handle; `deviation` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ub_basis_verify_orthonormal(basis: *const UbBasis, deviation: *mut f64) -> UbStatus {
    guard(|| {
        let b = as_ref(basis, "basis")?;
        *out_ptr(deviation, "deviation")? = verify_orthonormal(&b.inner, 0.0).max_deviation;
        Ok(())
    })
}

/// Worst deviation of `Σ_x U_x* A U_x` from `d tr(A) 1` over matrix units.
///
/// # Safety
/// `basis` must be a live handle; `deviation` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ub_basis_verify_depolarizer(basis: *const UbBasis, deviation: *mut f64) -> UbStatus {
    guard(|| {
        let b = as_ref(basis, "basis")?;
        *out_ptr(deviation, "deviation")? = verify_depolarizer(&b.inner, &[], 0.0)?.max_deviation;
        Ok(())
    })
}

/// Releases a basis handle. Null is ignored.
///
/// # Safety
/// `basis` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ub_basis_free(basis: *mut UbBasis) {
    if !basis.is_null() {
        drop(Box::from_raw(basis));
    }
}

fn store_scheme(out: &mut *mut UbScheme, inner: TightScheme) {
    *out = Box::into_raw(Box::new(UbScheme { inner }));
}

/// Scheme with the canonical maximally entangled resource.
///
/// # Safety
/// `basis` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ub_scheme_build(basis: *const UbBasis, mode: UbMode, out: *mut *mut UbScheme) -> UbStatus {
    guard(|| {
        let b = as_ref(basis, "basis")?;
        let out = out_ptr(out, "out")?;
        store_scheme(out, build_scheme(&b.inner, mode.into()));
        Ok(())
    })
}

/// Loads a `scheme` JSON document.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ub_scheme_from_json(json: *const c_char, out: *mut *mut UbScheme) -> UbStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        match parse_document(input_str(json, "json")?)?.payload {
            Payload::Scheme(s) => {
                store_scheme(out, s);
                Ok(())
            }
            other => fail(
                UbStatus::InvalidArgument,
                format!("expected a scheme document, found {}", other.kind()),
            ),
        }
    })
}

/// Serializes the scheme as a JSON document; release with `ub_string_free`.
///
/// # Safety
/// `scheme` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ub_scheme_to_json(scheme: *const UbScheme, out: *mut *mut c_char) -> UbStatus {
    guard(|| {
        let s = as_ref(scheme, "scheme")?;
        let out = out_ptr(out, "out")?;
        let doc = DesignDocument::new(Payload::Scheme(s.inner.clone()), "");
        *out = export_string(doc.to_json())?;
        Ok(())
    })
}

/// Dimension `d`; 0 for a null handle.
///
/// # Safety
/// `scheme` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ub_scheme_dim(scheme: *const UbScheme) -> usize {
    scheme.as_ref().map_or(0, |s| s.inner.dim())
}

/// Mode the scheme is meant for.
///
/// # Safety
/// `scheme` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ub_scheme_mode(scheme: *const UbScheme, out: *mut UbMode) -> UbStatus {
    guard(|| {
        let s = as_ref(scheme, "scheme")?;
        *out_ptr(out, "out")? = s.inner.mode().into();
        Ok(())
    })
}

/// Same components, other mode.
///
/// # Safety
/// `scheme` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ub_scheme_swap_roles(scheme: *const UbScheme, out: *mut *mut UbScheme) -> UbStatus {
    guard(|| {
        let s = as_ref(scheme, "scheme")?;
        let out = out_ptr(out, "out")?;
        store_scheme(out, swap_roles(&s.inner));
        Ok(())
    })
}

/// Replaces the resource by the `d² x d²` density matrix `omega`
/// (`2 d⁴` doubles), producing a new handle.
///
/// # Safety
/// `scheme` must be a live handle, `omega` must hold `2 d⁴` doubles and
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ub_scheme_with_resource(
    scheme: *const UbScheme,
    omega: *const f64,
    out: *mut *mut UbScheme,
) -> UbStatus {
    guard(|| {
        let s = as_ref(scheme, "scheme")?;
        let out = out_ptr(out, "out")?;
        let n = s.inner.dim() * s.inner.dim();
        let m = matrix_from_interleaved(n, input_slice(omega, 2 * n * n, "omega")?)?;
        store_scheme(out, s.inner.with_resource(m)?);
        Ok(())
    })
}

/// Worst deviation of the teleportation identity over all matrix-unit pairs.
///
/// # Safety
/// `scheme` must be a live handle; `deviation` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ub_scheme_verify_teleportation(scheme: *const UbScheme, deviation: *mut f64) -> UbStatus {
    guard(|| {
        let s = as_ref(scheme, "scheme")?;
        *out_ptr(deviation, "deviation")? = verify_teleportation(&s.inner, 0.0).max_deviation;
        Ok(())
    })
}

/// `max |P - 1|` for the dense-coding probability matrix. When
/// `probabilities` is non-null, `P` is written there row-major (`d⁴`
/// doubles, `len` must be at least that).
///
/// # Safety
/// `scheme` must be a live handle; `deviation` must be valid for writes and
/// `probabilities` null or valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ub_scheme_verify_dense_coding(
    scheme: *const UbScheme,
    deviation: *mut f64,
    probabilities: *mut f64,
    len: usize,
) -> UbStatus {
    guard(|| {
        let s = as_ref(scheme, "scheme")?;
        let deviation = out_ptr(deviation, "deviation")?;
        let verdict = verify_dense_coding(&s.inner, 0.0);
        if !probabilities.is_null() {
            let rows = verdict.probabilities.unwrap_or_default();
            let n = rows.len() * rows.len();
            if len < n {
                return fail(UbStatus::BufferTooSmall, format!("need {} doubles", n));
            }
            let out = output_slice(probabilities, len, "probabilities")?;
            for (slot, p) in out.iter_mut().zip(rows.iter().flatten()) {
                *slot = *p;
            }
        }
        *deviation = verdict.max_deviation;
        Ok(())
    })
}

/// Runs the protocol on the `d x d` density operator `rho` (`2 d²`
/// doubles). Bob's averaged output goes to `out_rho` (`2 d²` doubles) and
/// the outcome probabilities to `out_probabilities` (`d²` doubles).
///
/// # Safety
/// `scheme` must be a live handle and all buffers sized as described.
#[no_mangle]
pub unsafe extern "C" fn ub_scheme_teleport(
    scheme: *const UbScheme,
    rho: *const f64,
    out_rho: *mut f64,
    out_probabilities: *mut f64,
) -> UbStatus {
    guard(|| {
        let s = as_ref(scheme, "scheme")?;
        let d = s.inner.dim();
        let rho = matrix_from_interleaved(d, input_slice(rho, 2 * d * d, "rho")?)?;
        let out_rho = output_slice(out_rho, 2 * d * d, "out_rho")?;
        let out_p = output_slice(out_probabilities, d * d, "out_probabilities")?;
        let run = teleport_state(&s.inner, &rho)?;
        write_interleaved(&run.output, out_rho);
        out_p.copy_from_slice(&run.outcome_probabilities);
        Ok(())
    })
}

/// Recovers a unitary basis from a scheme that passes its verifier.
///
/// # Safety
/// `scheme` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ub_scheme_extract_basis(scheme: *const UbScheme, out: *mut *mut UbBasis) -> UbStatus {
    guard(|| {
        let s = as_ref(scheme, "scheme")?;
        let out = out_ptr(out, "out")?;
        store_basis(out, extract_basis_from_scheme(&s.inner)?);
        Ok(())
    })
}

/// Releases a scheme handle. Null is ignored.
///
/// # Safety
/// `scheme` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ub_scheme_free(scheme: *mut UbScheme) {
    if !scheme.is_null() {
        drop(Box::from_raw(scheme));
    }
}
