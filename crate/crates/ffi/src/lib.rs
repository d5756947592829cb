//! C ABI for the `mechanics` engine.
//!
//! Systems and trajectories are opaque handles created and released by
//! this library. Every fallible call returns a [`MechStatus`]; on failure a
//! description is available from [`mech_last_error`] on the same thread.
//! Vector arguments point to `dim` doubles, where `dim` is the system
//! dimension.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mechanics::bundle::{Covector, SecondTangent, TangentVector};
use mechanics::expr::Params;
use mechanics::hamiltonian::{hamiltonian, legendre_invert_report, NewtonConfig};
use mechanics::integrator::{simulate_hamiltonian, simulate_lagrangian, ForceSchedule, Trajectory};
use mechanics::lagrangian::{euler_lagrange, legendre, solve_accel};
use mechanics::{Error, ExprError, LagrangianSystem};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MechStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    DomainError = 4,
    DimensionMismatch = 5,
    SingularMassMatrix = 6,
    NoConvergence = 7,
    GridMismatch = 8,
    BaseMismatch = 9,
    InvalidArgument = 10,
    Panic = 11,
}

/// Trajectory columns for [`mech_trajectory_copy`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MechField {
    Time = 0,
    Position = 1,
    Velocity = 2,
    Momentum = 3,
    Force = 4,
}

/// Which equations [`mech_simulate`] integrates.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MechPicture {
    Lagrangian = 0,
    Hamiltonian = 1,
}

/// Opaque Lagrangian system with its force form and parameters.
pub struct MechSystem {
    inner: LagrangianSystem,
}

/// Opaque sampled trajectory.
pub struct MechTrajectory {
    inner: Trajectory,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = text);
}

fn status_of(e: &Error) -> MechStatus {
    match e.root() {
        Error::Expr(ExprError::Domain { .. }) => MechStatus::DomainError,
        Error::Expr(_) => MechStatus::ParseError,
        Error::DimensionMismatch { .. } => MechStatus::DimensionMismatch,
        Error::SingularMassMatrix { .. } => MechStatus::SingularMassMatrix,
        Error::NoConvergence { .. } => MechStatus::NoConvergence,
        Error::GridMismatch(_) => MechStatus::GridMismatch,
        Error::BaseMismatch(_) => MechStatus::BaseMismatch,
        _ => MechStatus::InvalidArgument,
    }
}

struct Fail(MechStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(body: impl FnOnce() -> Result<(), Fail>) -> MechStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_last_error("");
            MechStatus::Ok
        }
        Ok(Err(Fail(status, message))) => {
            set_last_error(&message);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            MechStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(MechStatus::NullPointer, format!("{what} is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(MechStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn texts<'a>(p: *const *const c_char, n: usize, what: &str) -> Result<Vec<&'a str>, Fail> {
    if n == 0 {
        return Ok(Vec::new());
    }
    if p.is_null() {
        return Err(null(what));
    }
    (0..n).map(|i| text(*p.add(i), what)).collect()
}

unsafe fn slice<'a>(p: *const f64, n: usize, what: &str) -> Result<&'a [f64], Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

unsafe fn write_out(p: *mut f64, values: &[f64], what: &str) -> Result<(), Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    ptr::copy_nonoverlapping(values.as_ptr(), p, values.len());
    Ok(())
}

unsafe fn system<'a>(p: *const MechSystem) -> Result<&'a LagrangianSystem, Fail> {
    p.as_ref().map(|s| &s.inner).ok_or_else(|| null("system"))
}

/// Message describing the last failure on this thread; empty after a
/// success. Valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn mech_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Parses a system `L(x, v)` with `n_rho` force components (0 or `dim`)
/// and `n_params` named parameters.
///
/// # Safety
/// String arguments must be NUL-terminated; arrays must hold the stated
/// number of elements; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mech_system_new(
    dim: usize,
    lagrangian: *const c_char,
    rho: *const *const c_char,
    n_rho: usize,
    param_names: *const *const c_char,
    param_values: *const f64,
    n_params: usize,
    out: *mut *mut MechSystem,
) -> MechStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let l = text(lagrangian, "lagrangian")?;
        let r = texts(rho, n_rho, "rho")?;
        let names = texts(param_names, n_params, "param_names")?;
        let values = if n_params == 0 { &[][..] } else { slice(param_values, n_params, "param_values")? };
        let params: Params = names.iter().map(|n| n.to_string()).zip(values.iter().copied()).collect();
        let sys = LagrangianSystem::parse(dim, l, &r, params)?;
        *out = Box::into_raw(Box::new(MechSystem { inner: sys }));
        Ok(())
    })
}

/// Releases a system. Null is ignored.
///
/// # Safety
/// `sys` must come from [`mech_system_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn mech_system_free(sys: *mut MechSystem) {
    if !sys.is_null() {
        drop(Box::from_raw(sys));
    }
}

/// Dimension of the configuration space; 0 for a null handle.
///
/// # Safety
/// `sys` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mech_system_dim(sys: *const MechSystem) -> usize {
    sys.as_ref().map_or(0, |s| s.inner.dim())
}

/// Momentum `p = ∂L/∂v(x, v)`.
///
/// # Safety
/// Vector arguments must point to `dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn mech_legendre(
    sys: *const MechSystem,
    x: *const f64,
    v: *const f64,
    p_out: *mut f64,
) -> MechStatus {
    guard(|| {
        let sys = system(sys)?;
        let m = sys.dim();
        let tv = TangentVector { x: slice(x, m, "x")?.to_vec(), v: slice(v, m, "v")?.to_vec() };
        write_out(p_out, &legendre(sys, &tv)?.p, "p_out")
    })
}

/// Velocity with momentum `p` at `x`, by Newton iteration from zero.
/// `iterations_out` may be null.
///
/// # Safety
/// Vector arguments must point to `dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn mech_legendre_invert(
    sys: *const MechSystem,
    x: *const f64,
    p: *const f64,
    v_out: *mut f64,
    iterations_out: *mut usize,
) -> MechStatus {
    guard(|| {
        let sys = system(sys)?;
        let m = sys.dim();
        let cv = Covector { x: slice(x, m, "x")?.to_vec(), p: slice(p, m, "p")?.to_vec() };
        let inv = legendre_invert_report(sys, &cv, &NewtonConfig::default())?;
        write_out(v_out, &inv.velocity.v, "v_out")?;
        if !iterations_out.is_null() {
            *iterations_out = inv.iterations;
        }
        Ok(())
    })
}

/// External force needed for acceleration `a` at `(x, v)`.
///
/// # Safety
/// Vector arguments must point to `dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn mech_euler_lagrange(
    sys: *const MechSystem,
    x: *const f64,
    v: *const f64,
    a: *const f64,
    f_out: *mut f64,
) -> MechStatus {
    guard(|| {
        let sys = system(sys)?;
        let m = sys.dim();
        let s = SecondTangent {
            x: slice(x, m, "x")?.to_vec(),
            v: slice(v, m, "v")?.to_vec(),
            a: slice(a, m, "a")?.to_vec(),
        };
        write_out(f_out, &euler_lagrange(sys, &s)?.p, "f_out")
    })
}

/// Acceleration produced by force `f` at `(x, v)`.
///
/// # Safety
/// Vector arguments must point to `dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn mech_solve_accel(
    sys: *const MechSystem,
    x: *const f64,
    v: *const f64,
    f: *const f64,
    a_out: *mut f64,
) -> MechStatus {
    guard(|| {
        let sys = system(sys)?;
        let m = sys.dim();
        let xs = slice(x, m, "x")?.to_vec();
        let tv = TangentVector { x: xs.clone(), v: slice(v, m, "v")?.to_vec() };
        let force = Covector { x: xs, p: slice(f, m, "f")?.to_vec() };
        write_out(a_out, &solve_accel(sys, &tv, &force)?.a, "a_out")
    })
}

/// Hamiltonian `H(x, p)`.
///
/// # Safety
/// Vector arguments must point to `dim` doubles; `h_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mech_hamiltonian(
    sys: *const MechSystem,
    x: *const f64,
    p: *const f64,
    h_out: *mut f64,
) -> MechStatus {
    guard(|| {
        let sys = system(sys)?;
        let m = sys.dim();
        let cv = Covector { x: slice(x, m, "x")?.to_vec(), p: slice(p, m, "p")?.to_vec() };
        let h = hamiltonian(sys, &cv, &NewtonConfig::default())?;
        write_out(h_out, &[h], "h_out")
    })
}

/// Integrates from `(x0, v0)` over `[t0, t1]` with step `dt`. `zeta` holds
/// `dim` force expressions in `t` (using the system parameters), or is null
/// for no external force.
///
/// # Safety
/// Vector arguments must point to `dim` doubles; `zeta` must be null or
/// hold `dim` NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mech_simulate(
    sys: *const MechSystem,
    zeta: *const *const c_char,
    x0: *const f64,
    v0: *const f64,
    t0: f64,
    t1: f64,
    dt: f64,
    picture: MechPicture,
    out: *mut *mut MechTrajectory,
) -> MechStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let sys = system(sys)?;
        let m = sys.dim();
        let sched = if zeta.is_null() {
            ForceSchedule::zero(m)
        } else {
            ForceSchedule::parse(&texts(zeta, m, "zeta")?, sys.params().clone())?
        };
        let init = TangentVector { x: slice(x0, m, "x0")?.to_vec(), v: slice(v0, m, "v0")?.to_vec() };
        let traj = match picture {
            MechPicture::Lagrangian => simulate_lagrangian(sys, &sched, &init, t0, t1, dt)?,
            MechPicture::Hamiltonian => {
                let p0 = legendre(sys, &init)?;
                simulate_hamiltonian(sys, &sched, &p0, t0, t1, dt)?
            }
        };
        *out = Box::into_raw(Box::new(MechTrajectory { inner: traj }));
        Ok(())
    })
}

/// Number of samples; 0 for a null handle.
///
/// # Safety
/// `traj` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mech_trajectory_len(traj: *const MechTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.inner.len())
}

/// Copies one column into `buf`, row-major: `len` values for
/// `MECH_FIELD_TIME`, `len * dim` otherwise. `buf_len` is the capacity in
/// doubles.
///
/// # Safety
/// `buf` must hold `buf_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn mech_trajectory_copy(
    traj: *const MechTrajectory,
    field: MechField,
    buf: *mut f64,
    buf_len: usize,
) -> MechStatus {
    guard(|| {
        let t = &traj.as_ref().ok_or_else(|| null("trajectory"))?.inner;
        let values: Vec<f64> = match field {
            MechField::Time => t.t.clone(),
            MechField::Position => t.x.concat(),
            MechField::Velocity => t.v.concat(),
            MechField::Momentum => t.p.concat(),
            MechField::Force => t.f.concat(),
        };
        if buf_len < values.len() {
            return Err(Fail(
                MechStatus::DimensionMismatch,
                format!("buffer holds {buf_len} values, {} needed", values.len()),
            ));
        }
        write_out(buf, &values, "buf")
    })
}

/// Releases a trajectory. Null is ignored.
///
/// # Safety
/// `traj` must come from [`mech_simulate`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn mech_trajectory_free(traj: *mut MechTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}
