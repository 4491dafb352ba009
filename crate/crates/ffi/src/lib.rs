//! C ABI for `su3cs`.
//!
//! Objects cross the boundary as opaque handles created by `su3_*_new` or
//! a constructor and released by the matching `su3_*_free`. Every fallible
//! call returns a [`Su3Status`]; on failure a message is available from
//! [`su3_last_error`] on the same thread. Panics never unwind into C: they are
//! caught and reported as [`Su3Status::Panic`].
//!
//! Matrices are written row-major. Complex numbers are [`Su3Complex`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use su3cs::analytics::uncertainty_report;
use su3cs::coherent::{coherent_state, displaced_state, extract_zeta_with_distance, moment_check};
use su3cs::coherent::{CoherentParams, DisplacementParams};
use su3cs::intelligent::{solve_intelligent, AlphaParam, IntelligentSpectrum, PairIndex};
use su3cs::rep::generator;
use su3cs::{DVector, Error, GeneratorId, RepSpace, StateVector, C64};

/// Largest `j1` accepted; the dimension grows quadratically.
pub const SU3_MAX_J1: u32 = 200;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Su3Status {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    DegenerateAlpha = 4,
    NotCoherent = 5,
    Numerical = 6,
    BufferTooSmall = 7,
    OutOfRange = 8,
    Panic = 9,
}

/// Generator indices accepted where a `uint32_t generator` is expected.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Su3Generator {
    E1 = 0,
    E2 = 1,
    E3 = 2,
    F1 = 3,
    F2 = 4,
    F3 = 5,
    H1 = 6,
    H2 = 7,
    H3 = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Su3Complex {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for Su3Complex {
    fn from(z: C64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<Su3Complex> for C64 {
    fn from(z: Su3Complex) -> Self {
        C64::new(z.re, z.im)
    }
}

/// Moments of the quadratures `(p_i, q_i)` in a state.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Su3MomentReport {
    pub mean_p: f64,
    pub mean_q: f64,
    pub var_p: f64,
    pub var_q: f64,
    /// `<c> / 2`.
    pub cov: f64,
    /// `<c>`, the full anticommutator expectation.
    pub cov_total: f64,
    pub mean_h: f64,
    pub delta: f64,
    pub sr_lhs: f64,
    pub sr_rhs: f64,
}

/// One eigenstate of a solved spectrum, without its amplitudes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Su3Eigenstate {
    pub lambda: Su3Complex,
    /// Meaningful only when `has_lambda_prime` is set.
    pub lambda_prime: Su3Complex,
    pub has_lambda_prime: bool,
    pub block: u32,
    pub eigenspace: usize,
    pub multiplicity: usize,
}

/// Opaque representation handle.
pub struct Su3Rep(RepSpace);

/// Opaque state handle.
pub struct Su3State(StateVector);

/// Opaque intelligent-state spectrum handle.
pub struct Su3Spectrum(IntelligentSpectrum);

struct Fail {
    status: Su3Status,
    message: String,
}

impl Fail {
    fn new(status: Su3Status, message: impl Into<String>) -> Self {
        Self { status, message: message.into() }
    }
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::DimensionMismatch { .. } | Error::RepMismatch { .. } => Su3Status::DimensionMismatch,
            Error::NotCoherent { .. } | Error::ZeroLeadingAmplitude { .. } => Su3Status::NotCoherent,
            Error::DegenerateAlpha { .. } => Su3Status::DegenerateAlpha,
            Error::InvalidArgument(_) => Su3Status::InvalidArgument,
            Error::Quadrature(_)
            | Error::NonTerminating(_)
            | Error::NormZero
            | Error::DegenerateDelta(_)
            | Error::Eigensolver(_) => Su3Status::Numerical,
        };
        Fail::new(status, e.to_string())
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: Option<String>) {
    let c = message.map(|m| CString::new(m.replace('\0', " ")).expect("interior NULs removed"));
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> Su3Status {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error(None);
            Su3Status::Ok
        }
        Ok(Err(fail)) => {
            set_last_error(Some(fail.message));
            fail.status
        }
        Err(payload) => {
            let what = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(Some(format!("internal panic: {what}")));
            Su3Status::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, name: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| Fail::new(Su3Status::NullPointer, format!("{name} is NULL")))
}

unsafe fn put<T>(p: *mut T, name: &str, value: T) -> Result<(), Fail> {
    if p.is_null() {
        return Err(Fail::new(Su3Status::NullPointer, format!("{name} is NULL")));
    }
    p.write(value);
    Ok(())
}

/// Boxes `value` into a new handle; `out` is checked first so nothing leaks.
unsafe fn give<T>(out: *mut *mut T, value: impl FnOnce() -> Result<T, Fail>) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::new(Su3Status::NullPointer, "out is NULL"));
    }
    out.write(Box::into_raw(Box::new(value()?)));
    Ok(())
}

unsafe fn slice_mut<'a, T>(p: *mut T, len: usize, need: usize, name: &str) -> Result<&'a mut [T], Fail> {
    if p.is_null() {
        return Err(Fail::new(Su3Status::NullPointer, format!("{name} is NULL")));
    }
    if len < need {
        return Err(Fail::new(Su3Status::BufferTooSmall, format!("{name} holds {len} entries, {need} needed")));
    }
    Ok(std::slice::from_raw_parts_mut(p, need))
}

fn pair_index(pair: u32) -> Result<PairIndex, Fail> {
    u8::try_from(pair)
        .ok()
        .and_then(|p| PairIndex::try_from(p).ok())
        .ok_or_else(|| Fail::new(Su3Status::InvalidArgument, format!("pair must be 1, 2 or 3, got {pair}")))
}

/// Message of the last failed call on this thread, or NULL after a success.
/// The pointer stays valid until the next `su3_*` call on the same thread.
#[no_mangle]
pub extern "C" fn su3_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn su3_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version contains a NUL"),
    };
    VERSION.as_ptr()
}

/// Creates the representation with `j1` quanta.
///
/// # Safety
/// `out` must be NULL or valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn su3_rep_new(j1: u32, out: *mut *mut Su3Rep) -> Su3Status {
    guard(|| {
        if j1 > SU3_MAX_J1 {
            return Err(Fail::new(Su3Status::InvalidArgument, format!("j1 = {j1} exceeds {SU3_MAX_J1}")));
        }
        give(out, || Ok(Su3Rep(RepSpace::new(j1))))
    })
}

/// Releases a representation; NULL is ignored.
///
/// # Safety
/// `rep` must be NULL or a handle from `su3_rep_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn su3_rep_free(rep: *mut Su3Rep) {
    if !rep.is_null() {
        drop(Box::from_raw(rep));
    }
}

/// Dimension `(j1+1)(j1+2)/2`.
///
/// # Safety
/// `rep` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn su3_rep_dim(rep: *const Su3Rep, out: *mut usize) -> Su3Status {
    guard(|| put(out, "out", borrow(rep, "rep")?.0.dim()))
}

/// Labels `(j2, j3)` of basis vector `index`.
///
/// # Safety
/// `rep` must be a live handle; `j2` and `j3` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn su3_rep_labels(rep: *const Su3Rep, index: usize, j2: *mut u32, j3: *mut u32) -> Su3Status {
    guard(|| {
        let rep = &borrow(rep, "rep")?.0;
        if index >= rep.dim() {
            return Err(Fail::new(Su3Status::OutOfRange, format!("index {index} >= dimension {}", rep.dim())));
        }
        let (a, b) = rep.labels(index);
        put(j2, "j2", a)?;
        put(j3, "j3", b)
    })
}

/// Writes the `dim x dim` matrix of a generator (see [`Su3Generator`]) row-major.
///
/// # Safety
/// `rep` must be a live handle; `out` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn su3_generator_matrix(
    rep: *const Su3Rep,
    generator_index: u32,
    out: *mut Su3Complex,
    len: usize,
) -> Su3Status {
    guard(|| {
        let rep = &borrow(rep, "rep")?.0;
        let id = *GeneratorId::ALL.get(generator_index as usize).ok_or_else(|| {
            Fail::new(Su3Status::InvalidArgument, format!("generator index {generator_index} is not in 0..=8"))
        })?;
        let n = rep.dim();
        let dst = slice_mut(out, len, n * n, "out")?;
        let m = generator(rep, id);
        for r in 0..n {
            for c in 0..n {
                dst[r * n + c] = m.matrix()[(r, c)].into();
            }
        }
        Ok(())
    })
}

/// Normalized coherent state at projective coordinates `(zeta1, zeta2)`.
///
/// # Safety
/// `rep` must be a live handle; `out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn su3_coherent_state(
    rep: *const Su3Rep,
    zeta1: Su3Complex,
    zeta2: Su3Complex,
    out: *mut *mut Su3State,
) -> Su3Status {
    guard(|| {
        let rep = &borrow(rep, "rep")?.0;
        give(out, || Ok(Su3State(coherent_state(rep, CoherentParams::new(zeta1.into(), zeta2.into())))))
    })
}

/// Highest-weight state displaced by `exp(z1 f1 + z2 f3 - h.c.)`.
///
/// # Safety
/// `rep` must be a live handle; `out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn su3_displaced_state(
    rep: *const Su3Rep,
    z1: Su3Complex,
    z2: Su3Complex,
    out: *mut *mut Su3State,
) -> Su3Status {
    guard(|| {
        let rep = &borrow(rep, "rep")?.0;
        give(out, || Ok(Su3State(displaced_state(rep, DisplacementParams::new(z1.into(), z2.into())))))
    })
}

/// State from `len` amplitudes in basis order; `len` must equal the dimension.
///
/// # Safety
/// `rep` must be a live handle; `amplitudes` valid for `len` reads; `out`
/// valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn su3_state_from_amplitudes(
    rep: *const Su3Rep,
    amplitudes: *const Su3Complex,
    len: usize,
    out: *mut *mut Su3State,
) -> Su3Status {
    guard(|| {
        let rep = &borrow(rep, "rep")?.0;
        if amplitudes.is_null() {
            return Err(Fail::new(Su3Status::NullPointer, "amplitudes is NULL"));
        }
        let src = std::slice::from_raw_parts(amplitudes, len);
        give(out, || {
            Ok(Su3State(StateVector::new(rep, DVector::from_iterator(len, src.iter().map(|&z| C64::from(z))))?))
        })
    })
}

/// Releases a state; NULL is ignored.
///
/// # Safety
/// `state` must be NULL or a live state handle.
#[no_mangle]
pub unsafe extern "C" fn su3_state_free(state: *mut Su3State) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Number of amplitudes.
///
/// # Safety
/// `state` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn su3_state_dim(state: *const Su3State, out: *mut usize) -> Su3Status {
    guard(|| put(out, "out", borrow(state, "state")?.0.dim()))
}

/// Copies the amplitudes into `out`.
///
/// # Safety
/// `state` must be a live handle; `out` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn su3_state_amplitudes(state: *const Su3State, out: *mut Su3Complex, len: usize) -> Su3Status {
    guard(|| {
        let amps = borrow(state, "state")?.0.amplitudes();
        let dst = slice_mut(out, len, amps.len(), "out")?;
        for (d, &z) in dst.iter_mut().zip(amps.iter()) {
            *d = z.into();
        }
        Ok(())
    })
}

/// Recovers `(zeta1, zeta2)` of a coherent state and the reconstruction
/// distance. Fails with `NOT_COHERENT` when the state is off the manifold.
///
/// # Safety
/// `state` must be a live handle; output pointers valid for writes.
#[no_mangle]
pub unsafe extern "C" fn su3_extract_zeta(
    state: *const Su3State,
    zeta1: *mut Su3Complex,
    zeta2: *mut Su3Complex,
    distance: *mut f64,
) -> Su3Status {
    guard(|| {
        let e = extract_zeta_with_distance(&borrow(state, "state")?.0)?;
        put(zeta1, "zeta1", e.params.zeta1.into())?;
        put(zeta2, "zeta2", e.params.zeta2.into())?;
        put(distance, "distance", e.distance)
    })
}

/// Eigenstates of `(1+alpha) e_i + (1-alpha) f_i` for `pair` in 1..=3.
/// Degenerate `alpha = +-1` succeeds with only kernel vectors.
///
/// # Safety
/// `rep` must be a live handle; `out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn su3_solve_intelligent(
    rep: *const Su3Rep,
    pair: u32,
    alpha: Su3Complex,
    out: *mut *mut Su3Spectrum,
) -> Su3Status {
    guard(|| {
        let rep = &borrow(rep, "rep")?.0;
        let pair = pair_index(pair)?;
        give(out, || Ok(Su3Spectrum(solve_intelligent(rep, pair, AlphaParam::new(alpha.into())?)?)))
    })
}

/// Releases a spectrum; NULL is ignored.
///
/// # Safety
/// `spectrum` must be NULL or a live spectrum handle.
#[no_mangle]
pub unsafe extern "C" fn su3_spectrum_free(spectrum: *mut Su3Spectrum) {
    if !spectrum.is_null() {
        drop(Box::from_raw(spectrum));
    }
}

/// Number of eigenstates held.
///
/// # Safety
/// `spectrum` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn su3_spectrum_len(spectrum: *const Su3Spectrum, out: *mut usize) -> Su3Status {
    guard(|| put(out, "out", borrow(spectrum, "spectrum")?.0.states.len()))
}

/// Whether `alpha = +-1` made the operator nilpotent.
///
/// # Safety
/// `spectrum` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn su3_spectrum_nilpotent(spectrum: *const Su3Spectrum, out: *mut bool) -> Su3Status {
    guard(|| put(out, "out", borrow(spectrum, "spectrum")?.0.nilpotent))
}

/// Spectral norm of the operator that was diagonalized.
///
/// # Safety
/// `spectrum` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn su3_spectrum_operator_norm(spectrum: *const Su3Spectrum, out: *mut f64) -> Su3Status {
    guard(|| put(out, "out", borrow(spectrum, "spectrum")?.0.operator_norm))
}

/// Eigenvalue data of entry `index` (ordered by block, then `lambda'`).
///
/// # Safety
/// `spectrum` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn su3_spectrum_entry(
    spectrum: *const Su3Spectrum,
    index: usize,
    out: *mut Su3Eigenstate,
) -> Su3Status {
    guard(|| {
        let sp = &borrow(spectrum, "spectrum")?.0;
        let st = sp.states.get(index).ok_or_else(|| {
            Fail::new(Su3Status::OutOfRange, format!("index {index} >= {} eigenstates", sp.states.len()))
        })?;
        put(
            out,
            "out",
            Su3Eigenstate {
                lambda: st.lambda.into(),
                lambda_prime: st.lambda_prime.unwrap_or_default().into(),
                has_lambda_prime: st.lambda_prime.is_some(),
                block: st.block,
                eigenspace: st.eigenspace,
                multiplicity: st.multiplicity,
            },
        )
    })
}

/// New state handle holding a copy of eigenstate `index`.
///
/// # Safety
/// `spectrum` must be a live handle; `out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn su3_spectrum_state(
    spectrum: *const Su3Spectrum,
    index: usize,
    out: *mut *mut Su3State,
) -> Su3Status {
    guard(|| {
        let sp = &borrow(spectrum, "spectrum")?.0;
        let st = sp.states.get(index).ok_or_else(|| {
            Fail::new(Su3Status::OutOfRange, format!("index {index} >= {} eigenstates", sp.states.len()))
        })?;
        give(out, || Ok(Su3State(st.state.clone())))
    })
}

/// Quadrature moments of a normalized state for `pair` in 1..=3.
///
/// # Safety
/// `state` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn su3_uncertainty_report(
    state: *const Su3State,
    pair: u32,
    out: *mut Su3MomentReport,
) -> Su3Status {
    guard(|| {
        let st = &borrow(state, "state")?.0;
        let pair = pair_index(pair)?;
        if (st.norm() - 1.0).abs() > 1e-10 {
            return Err(Fail::new(Su3Status::InvalidArgument, format!("state norm {} is not 1", st.norm())));
        }
        let m = uncertainty_report(st, pair);
        put(
            out,
            "out",
            Su3MomentReport {
                mean_p: m.mean_p,
                mean_q: m.mean_q,
                var_p: m.var_p,
                var_q: m.var_q,
                cov: m.cov,
                cov_total: m.cov_total,
                mean_h: m.mean_h,
                delta: m.delta,
                sr_lhs: m.sr_lhs,
                sr_rhs: m.sr_rhs,
            },
        )
    })
}

/// Residual of the `n`-th radial moment of the weight for `j`, `0 <= n <= j`.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn su3_moment_check(j: u32, n: u32, out: *mut f64) -> Su3Status {
    guard(|| put(out, "out", moment_check(j, n)?))
}
