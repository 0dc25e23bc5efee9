//! C ABI over the `contact-gabor` library.
//!
//! Charts, signals and windows are opaque heap handles created by `cg_*_new`
//! style constructors and released with the matching `cg_*_free`. Every
//! fallible call returns a `CgStatus`; on failure the message is kept per
//! thread and can be copied out with `cg_last_error_message`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use contact_gabor::bargmann::embedding_check;
use contact_gabor::contact::{contact_frame, CospherePoint, FrameStructure, ReebMethod};
use contact_gabor::gabor::{
    corollary_frame_certificate, detect_boundary_normal, frame_bounds_estimate, CertificateStatus, DetectionParams,
    FrameGridParams, WindowSpec,
};
use contact_gabor::lattice::{build_lattice_frame, LatticeSpec};
use contact_gabor::lift::SignalOnB;
use contact_gabor::manifold::RiemannianChart;
use contact_gabor::Error;
use nalgebra::DMatrix;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    ShapeMismatch = 3,
    MetricDegenerate = 4,
    ChartExit = 5,
    MissingParameter = 6,
    ReebDegenerate = 7,
    FiniteDifference = 8,
    BudgetExceeded = 9,
    WindowDegenerate = 10,
    DegenerateLattice = 11,
    IterationLimit = 12,
    DegenerateConstraint = 13,
    Panic = 14,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CgCertificate {
    FrameCertified = 0,
    Unknown = 1,
    NotApplicable = 2,
}

impl From<CertificateStatus> for CgCertificate {
    fn from(s: CertificateStatus) -> Self {
        match s {
            CertificateStatus::FrameCertified => CgCertificate::FrameCertified,
            CertificateStatus::Unknown => CgCertificate::Unknown,
            CertificateStatus::NotApplicable => CgCertificate::NotApplicable,
        }
    }
}

pub struct CgChart(RiemannianChart);
pub struct CgSignal(SignalOnB);
pub struct CgWindow(WindowSpec);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> CgStatus {
    match e {
        Error::MetricDegenerate { .. } => CgStatus::MetricDegenerate,
        Error::ChartExit { .. } => CgStatus::ChartExit,
        Error::MissingParameter(_) => CgStatus::MissingParameter,
        Error::ReebDegenerate { .. } => CgStatus::ReebDegenerate,
        Error::FiniteDifference { .. } => CgStatus::FiniteDifference,
        Error::BudgetExceeded { .. } => CgStatus::BudgetExceeded,
        Error::WindowDegenerate { .. } => CgStatus::WindowDegenerate,
        Error::ShapeMismatch(_) => CgStatus::ShapeMismatch,
        Error::DegenerateLattice => CgStatus::DegenerateLattice,
        Error::IterationLimit { .. } => CgStatus::IterationLimit,
        Error::DegenerateConstraint => CgStatus::DegenerateConstraint,
        Error::InvalidInput(_) => CgStatus::InvalidInput,
    }
}

enum Fail {
    Null(&'static str),
    Core(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

/// Runs `f`, records any failure and maps it to a status code.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> CgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            CgStatus::Ok
        }
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            CgStatus::NullPointer
        }
        Ok(Err(Fail::Core(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            CgStatus::Panic
        }
    }
}

unsafe fn slice_in<'a>(p: *const f64, len: usize, what: &'static str) -> Result<&'a [f64], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn obj<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail::Null(what))
}

unsafe fn emit<T>(p: *mut *mut T, value: T) -> Result<(), Fail> {
    let slot = out(p, "output handle")?;
    *slot = Box::into_raw(Box::new(value));
    Ok(())
}

/// Copies the calling thread's last error message into `buf` (NUL-terminated, truncated to `len`).
/// Returns the full message length without the terminator, or 0 if there is none.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn cg_last_error_message(buf: *mut c_char, len: usize) -> usize {
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

/// Flat torus with the given radii (one per dimension).
///
/// # Safety
/// `radii` must point to `n` doubles; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cg_chart_flat_torus(radii: *const f64, n: usize, out: *mut *mut CgChart) -> CgStatus {
    guard(|| {
        let r = slice_in(radii, n, "radii")?;
        emit(out, CgChart(RiemannianChart::flat_torus(r)?))
    })
}

/// Round 2-sphere in (polar, azimuth) coordinates.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cg_chart_round_sphere(radius: f64, out: *mut *mut CgChart) -> CgStatus {
    guard(|| emit(out, CgChart(RiemannianChart::round_sphere(radius)?)))
}

/// Dimension of the chart, 0 for a null handle.
///
/// # Safety
/// `chart` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cg_chart_dim(chart: *const CgChart) -> usize {
    chart.as_ref().map_or(0, |c| c.0.dim())
}

/// # Safety
/// `chart` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cg_chart_free(chart: *mut CgChart) {
    if !chart.is_null() {
        drop(Box::from_raw(chart));
    }
}

/// Indicator of ⟨normal, b⟩ < offset.
///
/// # Safety
/// `normal` must point to `n` doubles; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cg_signal_half_space(
    normal: *const f64,
    n: usize,
    offset: f64,
    out: *mut *mut CgSignal,
) -> CgStatus {
    guard(|| {
        let v = slice_in(normal, n, "normal")?;
        emit(out, CgSignal(SignalOnB::half_space(v.to_vec(), offset)))
    })
}

/// Indicator of the geodesic ball of `radius` around `center`.
///
/// # Safety
/// `chart` must be a live handle, `center` must point to `n` doubles, `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cg_signal_ball(
    chart: *const CgChart,
    center: *const f64,
    n: usize,
    radius: f64,
    out: *mut *mut CgSignal,
) -> CgStatus {
    guard(|| {
        let c = obj(chart, "chart")?;
        let p = slice_in(center, n, "center")?;
        if n != c.0.dim() {
            return Err(Error::ShapeMismatch(format!("center has {n} coordinates, chart has {}", c.0.dim())).into());
        }
        emit(out, CgSignal(SignalOnB::ball(&c.0, p.to_vec(), radius)))
    })
}

/// Band of `width` around ⟨normal, θ⟩ ≡ level on the torus, or its complement.
///
/// # Safety
/// `normal` must point to `n` doubles; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cg_signal_torus_band(
    normal: *const f64,
    n: usize,
    level: f64,
    width: f64,
    complement: bool,
    out: *mut *mut CgSignal,
) -> CgStatus {
    guard(|| {
        let v = slice_in(normal, n, "normal")?;
        emit(out, CgSignal(SignalOnB::torus_band(v.to_vec(), level, width, complement)))
    })
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cg_signal_constant(value: f64, out: *mut *mut CgSignal) -> CgStatus {
    guard(|| emit(out, CgSignal(SignalOnB::constant(value))))
}

/// # Safety
/// `signal` must be a live handle, `b` must point to `n` doubles, `value` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cg_signal_eval(
    signal: *const CgSignal,
    b: *const f64,
    n: usize,
    value: *mut f64,
) -> CgStatus {
    guard(|| {
        let s = obj(signal, "signal")?;
        let b = slice_in(b, n, "point")?;
        *out(value, "value")? = s.0.eval(b);
        Ok(())
    })
}

/// # Safety
/// `signal` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cg_signal_free(signal: *mut CgSignal) {
    if !signal.is_null() {
        drop(Box::from_raw(signal));
    }
}

/// Window with A = a·Id in dimension n.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cg_window_scalar(n: usize, a: f64, out: *mut *mut CgWindow) -> CgStatus {
    guard(|| {
        if n == 0 {
            return Err(Error::InvalidInput("window dimension must be positive".into()).into());
        }
        let w = WindowSpec::scalar(n, a);
        w.at(&vec![0.0; n])?;
        emit(out, CgWindow(w))
    })
}

/// Window with a constant matrix A given row-major as n×n doubles.
///
/// # Safety
/// `a` must point to `n*n` doubles; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cg_window_matrix(a: *const f64, n: usize, out: *mut *mut CgWindow) -> CgStatus {
    guard(|| {
        if n == 0 {
            return Err(Error::InvalidInput("window dimension must be positive".into()).into());
        }
        let v = slice_in(a, n * n, "matrix")?;
        let w = WindowSpec::matrix(DMatrix::from_row_slice(n, n, v));
        w.at(&vec![0.0; n])?;
        emit(out, CgWindow(w))
    })
}

/// # Safety
/// `window` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cg_window_free(window: *mut CgWindow) {
    if !window.is_null() {
        drop(Box::from_raw(window));
    }
}

/// Separable-lattice certificate: certified when 0 < b_i < 1 and b_i = ±c_i for all i
/// on an orthonormal separable frame.
///
/// # Safety
/// `b` and `c` must each point to `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn cg_frame_certificate(
    b: *const f64,
    c: *const f64,
    n: usize,
    orthonormal_separable: bool,
) -> CgCertificate {
    match (slice_in(b, n, "b"), slice_in(c, n, "c")) {
        (Ok(b), Ok(c)) => corollary_frame_certificate(b, c, orthonormal_separable).into(),
        _ => CgCertificate::NotApplicable,
    }
}

/// Largest singular value ρ of the Fock embedding for the SPD matrix `a` (row-major n×n),
/// and whether ρ ≤ 1.
///
/// # Safety
/// `a` must point to `n*n` doubles; `rho` and `embeds` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn cg_embedding_check(a: *const f64, n: usize, rho: *mut f64, embeds: *mut bool) -> CgStatus {
    guard(|| {
        let v = slice_in(a, n * n, "matrix")?;
        if n == 0 {
            return Err(Error::InvalidInput("matrix dimension must be positive".into()).into());
        }
        let (r, e) = embedding_check(&DMatrix::from_row_slice(n, n, v))?;
        *out(rho, "rho")? = r;
        *out(embeds, "embeds")? = e;
        Ok(())
    })
}

/// Boundary normal of `signal` at base point `b`.
///
/// Writes the g*-unit normal (one representative of ±p) to `normal_out` (n doubles),
/// the |O| contrast, and whether the contrast is below the no-boundary threshold.
/// `fiber_nodes = 0` keeps the default resolution.
///
/// # Safety
/// Handles must be live; `b` and `normal_out` must point to `n` doubles; the remaining outputs must be valid.
#[no_mangle]
pub unsafe extern "C" fn cg_detect_boundary(
    signal: *const CgSignal,
    chart: *const CgChart,
    window: *const CgWindow,
    b: *const f64,
    n: usize,
    fiber_nodes: usize,
    normal_out: *mut f64,
    contrast: *mut f64,
    no_boundary: *mut bool,
) -> CgStatus {
    guard(|| {
        let s = obj(signal, "signal")?;
        let c = obj(chart, "chart")?;
        let w = obj(window, "window")?;
        if n != c.0.dim() {
            return Err(Error::ShapeMismatch(format!("point has {n} coordinates, chart has {}", c.0.dim())).into());
        }
        let coords = slice_in(b, n, "point")?;
        if normal_out.is_null() {
            return Err(Fail::Null("normal_out"));
        }
        let contrast = out(contrast, "contrast")?;
        let no_boundary = out(no_boundary, "no_boundary")?;
        let mut params = DetectionParams::default();
        if fiber_nodes > 0 {
            params.fiber_nodes = fiber_nodes;
        }
        let d = detect_boundary_normal(&s.0, &c.0, &c.0.point(coords)?, &w.0, &params)?;
        slice::from_raw_parts_mut(normal_out, n).copy_from_slice(&d.normal);
        *contrast = d.contrast;
        *no_boundary = d.no_boundary;
        Ok(())
    })
}

/// Frame bounds of the lattice with translation scale `alpha` and modulation scale `beta`
/// on a one-dimensional chart, at base coordinate `base` and truncation `k`.
///
/// # Safety
/// Handles must be live; the outputs must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn cg_frame_bounds_1d(
    chart: *const CgChart,
    window: *const CgWindow,
    base: f64,
    alpha: f64,
    beta: f64,
    k: usize,
    lower: *mut f64,
    upper: *mut f64,
    certificate: *mut CgCertificate,
) -> CgStatus {
    guard(|| {
        let c = obj(chart, "chart")?;
        let w = obj(window, "window")?;
        if c.0.dim() != 1 {
            return Err(Error::ShapeMismatch(format!("expected a 1-dimensional chart, got {}", c.0.dim())).into());
        }
        let (lower, upper, certificate) = (out(lower, "lower")?, out(upper, "upper")?, out(certificate, "certificate")?);
        let m = CospherePoint::normalized(&c.0, c.0.point(&[base])?, &[1.0])?;
        let frame = contact_frame(&c.0, &m, &FrameStructure::Standard, ReebMethod::Auto)?;
        let lattice = build_lattice_frame(&frame, &LatticeSpec::uniform(1, alpha, beta, k))?;
        let r = frame_bounds_estimate(&c.0, &w.0, &lattice, k, &FrameGridParams::default())?;
        *lower = r.lower_bound;
        *upper = r.upper_bound;
        *certificate = r.certificate.into();
        Ok(())
    })
}
