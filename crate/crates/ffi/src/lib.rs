//! C ABI for `sbcim`.
//!
//! Objects cross the boundary as opaque heap handles that the caller frees
//! with the matching `*_free` function. Every fallible call returns an
//! [`SbcimStatus`]; on failure a message is available from
//! [`sbcim_last_error`] on the same thread until the next failing call.
//! Panics are caught and reported as [`SbcimStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use sbcim::bench::{BenchConfig, Solver};
use sbcim::ising::{self, CouplingMatrix, ProblemInstance, SpinVector};
use sbcim::sb::TrialResult;
use sbcim::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SbcimStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    Validation = 4,
    Parse = 5,
    TooLarge = 6,
    MissingDenominator = 7,
    Io = 8,
    Config = 9,
    OutOfRange = 10,
    Panic = 11,
}

impl From<&Error> for SbcimStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::DimensionMismatch { .. } => SbcimStatus::DimensionMismatch,
            Error::InvalidArgument { .. } => SbcimStatus::InvalidArgument,
            Error::Validation(_) => SbcimStatus::Validation,
            Error::Parse { .. } => SbcimStatus::Parse,
            Error::TooLarge { .. } => SbcimStatus::TooLarge,
            Error::MissingDenominator(_) => SbcimStatus::MissingDenominator,
            Error::Io { .. } => SbcimStatus::Io,
            Error::Config(_) => SbcimStatus::Config,
        }
    }
}

/// A MAXCUT problem instance.
pub struct SbcimInstance(ProblemInstance);

/// A configured solver (engine, gains, noise and hardware blocks).
pub struct SbcimSolver(Solver);

/// The results of a batch of trials, in trial order.
pub struct SbcimTrials(Vec<TrialResult>);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(SbcimStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure((&e).into(), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(SbcimStatus::NullPointer, format!("`{what}` is null"))
}

fn out_of_range(what: &str) -> Failure {
    Failure(SbcimStatus::OutOfRange, format!("`{what}` out of range"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SbcimStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SbcimStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_error(format!("internal panic: {msg}"));
            SbcimStatus::Panic
        }
    }
}

unsafe fn as_ref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn c_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Failure(SbcimStatus::InvalidArgument, format!("`{what}` is not valid UTF-8")))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn fill<T: Copy>(src: &[T], dst: *mut T, capacity: usize, what: &str) -> Result<(), Failure> {
    if src.len() > capacity {
        return Err(Failure(
            SbcimStatus::InvalidArgument,
            format!("`{what}` holds {capacity} values, {} needed", src.len()),
        ));
    }
    if !src.is_empty() {
        if dst.is_null() {
            return Err(null(what));
        }
        ptr::copy_nonoverlapping(src.as_ptr(), dst, src.len());
    }
    Ok(())
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn sbcim_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Random binary instance with each edge present with probability `density`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sbcim_instance_random(
    n: usize,
    density: f64,
    seed: u64,
    out: *mut *mut SbcimInstance,
) -> SbcimStatus {
    guard(|| {
        let p = ising::random_graph(n, density, seed)?;
        write_out(out, Box::into_raw(Box::new(SbcimInstance(p))), "out")
    })
}

/// Instance from `edge_count` node pairs stored as `edges[2k], edges[2k+1]`.
///
/// # Safety
/// `edges` must point to `2 * edge_count` values and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn sbcim_instance_from_edges(
    n: usize,
    edges: *const u32,
    edge_count: usize,
    out: *mut *mut SbcimInstance,
) -> SbcimStatus {
    guard(|| {
        let flat = slice(edges, edge_count * 2, "edges")?;
        let pairs: Vec<(usize, usize)> = flat.chunks(2).map(|e| (e[0] as usize, e[1] as usize)).collect();
        let j = CouplingMatrix::from_edges(n, &pairs)?;
        let density = if n > 1 {
            pairs.len() as f64 / (n * (n - 1) / 2) as f64
        } else {
            0.0
        };
        let p = ProblemInstance::new(j, 0, density);
        write_out(out, Box::into_raw(Box::new(SbcimInstance(p))), "out")
    })
}

/// # Safety
/// `path` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sbcim_instance_load(path: *const c_char, out: *mut *mut SbcimInstance) -> SbcimStatus {
    guard(|| {
        let p = ising::load_instance(PathBuf::from(c_str(path, "path")?))?;
        write_out(out, Box::into_raw(Box::new(SbcimInstance(p))), "out")
    })
}

/// # Safety
/// `inst` must come from this library and `path` be nul-terminated.
#[no_mangle]
pub unsafe extern "C" fn sbcim_instance_save(inst: *const SbcimInstance, path: *const c_char) -> SbcimStatus {
    guard(|| {
        let inst = as_ref(inst, "inst")?;
        ising::save_instance(&inst.0, PathBuf::from(c_str(path, "path")?))?;
        Ok(())
    })
}

/// # Safety
/// `inst` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn sbcim_instance_free(inst: *mut SbcimInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Number of nodes, or 0 for a null handle.
///
/// # Safety
/// `inst` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn sbcim_instance_n(inst: *const SbcimInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.0.n())
}

/// Number of edges, or 0 for a null handle.
///
/// # Safety
/// `inst` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn sbcim_instance_edge_count(inst: *const SbcimInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.0.coupling.edge_count())
}

/// Stored best-known cut; `MissingDenominator` when none is recorded.
///
/// # Safety
/// `inst` must come from this library and `out` be valid.
#[no_mangle]
pub unsafe extern "C" fn sbcim_instance_best_known(inst: *const SbcimInstance, out: *mut u64) -> SbcimStatus {
    guard(|| {
        let inst = as_ref(inst, "inst")?;
        let cut = inst.0.best_known_cut().ok_or_else(|| {
            Failure(SbcimStatus::MissingDenominator, "instance has no best-known cut".into())
        })?;
        write_out(out, cut, "out")
    })
}

/// Cut size of `spins` (each +1 or -1).
///
/// # Safety
/// `spins` must point to `len` values and `out` be valid.
#[no_mangle]
pub unsafe extern "C" fn sbcim_cut_size(
    inst: *const SbcimInstance,
    spins: *const i8,
    len: usize,
    out: *mut u64,
) -> SbcimStatus {
    guard(|| {
        let inst = as_ref(inst, "inst")?;
        let x = SpinVector::new(slice(spins, len, "spins")?.to_vec())?;
        write_out(out, ising::cut_size(&inst.0.coupling, &x)?, "out")
    })
}

/// Exhaustive maximum cut. `spins_out` may be null; otherwise it receives
/// a witness of length `n` and `capacity` must be at least `n`.
///
/// # Safety
/// `spins_out` must hold `capacity` values when non-null; `cut_out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn sbcim_ground_state(
    inst: *const SbcimInstance,
    spins_out: *mut i8,
    capacity: usize,
    cut_out: *mut u64,
) -> SbcimStatus {
    guard(|| {
        let inst = as_ref(inst, "inst")?;
        let gs = ising::brute_force_ground_state(&inst.0.coupling)?;
        if !spins_out.is_null() {
            fill(gs.spins.as_slice(), spins_out, capacity, "spins_out")?;
        }
        write_out(cut_out, gs.cut, "cut_out")
    })
}

/// Solver with the built-in defaults (ideal engine, 20 iterations).
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn sbcim_solver_new_default(out: *mut *mut SbcimSolver) -> SbcimStatus {
    guard(|| {
        let s = Solver::from_config(&BenchConfig::default())?;
        write_out(out, Box::into_raw(Box::new(SbcimSolver(s))), "out")
    })
}

/// Solver from a TOML configuration document.
///
/// # Safety
/// `toml` must be nul-terminated and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn sbcim_solver_from_config(toml: *const c_char, out: *mut *mut SbcimSolver) -> SbcimStatus {
    guard(|| {
        let cfg = BenchConfig::parse(c_str(toml, "toml")?)?;
        let s = Solver::from_config(&cfg)?;
        write_out(out, Box::into_raw(Box::new(SbcimSolver(s))), "out")
    })
}

/// Solver from a TOML configuration file.
///
/// # Safety
/// `path` must be nul-terminated and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn sbcim_solver_from_config_file(
    path: *const c_char,
    out: *mut *mut SbcimSolver,
) -> SbcimStatus {
    guard(|| {
        let cfg = BenchConfig::load(PathBuf::from(c_str(path, "path")?))?;
        let s = Solver::from_config(&cfg)?;
        write_out(out, Box::into_raw(Box::new(SbcimSolver(s))), "out")
    })
}

/// Iterations per trial, or 0 for a null handle.
///
/// # Safety
/// `solver` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn sbcim_solver_iterations(solver: *const SbcimSolver) -> usize {
    solver.as_ref().map_or(0, |s| s.0.iterations())
}

/// # Safety
/// `solver` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn sbcim_solver_free(solver: *mut SbcimSolver) {
    if !solver.is_null() {
        drop(Box::from_raw(solver));
    }
}

/// Run `trials` trials; trial `t` uses a seed split from `base_seed`.
///
/// # Safety
/// Handles must come from this library and `out` be valid.
#[no_mangle]
pub unsafe extern "C" fn sbcim_solver_run(
    solver: *const SbcimSolver,
    inst: *const SbcimInstance,
    trials: usize,
    base_seed: u64,
    out: *mut *mut SbcimTrials,
) -> SbcimStatus {
    guard(|| {
        let solver = as_ref(solver, "solver")?;
        let inst = as_ref(inst, "inst")?;
        let results = solver.0.run(&inst.0, trials, base_seed)?;
        write_out(out, Box::into_raw(Box::new(SbcimTrials(results))), "out")
    })
}

/// Number of trials, or 0 for a null handle.
///
/// # Safety
/// `trials` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn sbcim_trials_count(trials: *const SbcimTrials) -> usize {
    trials.as_ref().map_or(0, |t| t.0.len())
}

unsafe fn trial<'a>(trials: *const SbcimTrials, index: usize) -> Result<&'a TrialResult, Failure> {
    as_ref(trials, "trials")?.0.get(index).ok_or_else(|| out_of_range("index"))
}

/// Best cut of trial `index` and the 0-based iteration where it first occurred.
///
/// # Safety
/// `trials` must come from this library; output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sbcim_trials_best(
    trials: *const SbcimTrials,
    index: usize,
    best_cut: *mut u64,
    best_iteration: *mut usize,
) -> SbcimStatus {
    guard(|| {
        let t = trial(trials, index)?;
        write_out(best_cut, t.best_cut, "best_cut")?;
        write_out(best_iteration, t.best_iteration, "best_iteration")
    })
}

/// Seed of trial `index`.
///
/// # Safety
/// `trials` must come from this library and `out` be valid.
#[no_mangle]
pub unsafe extern "C" fn sbcim_trials_seed(trials: *const SbcimTrials, index: usize, out: *mut u64) -> SbcimStatus {
    guard(|| write_out(out, trial(trials, index)?.seed, "out"))
}

/// Copy the cut after each iteration of trial `index` into `buf`; `len`
/// receives the trajectory length. With a null `buf` only `len` is written.
///
/// # Safety
/// `buf` must hold `capacity` values when non-null; `len` must be valid.
#[no_mangle]
pub unsafe extern "C" fn sbcim_trials_trajectory(
    trials: *const SbcimTrials,
    index: usize,
    buf: *mut u64,
    capacity: usize,
    len: *mut usize,
) -> SbcimStatus {
    guard(|| {
        let t = trial(trials, index)?;
        write_out(len, t.trajectory.len(), "len")?;
        if !buf.is_null() {
            fill(&t.trajectory, buf, capacity, "buf")?;
        }
        Ok(())
    })
}

/// Copy the final spins of trial `index` into `buf` (`capacity >= n`).
///
/// # Safety
/// `buf` must hold `capacity` values.
#[no_mangle]
pub unsafe extern "C" fn sbcim_trials_final_spins(
    trials: *const SbcimTrials,
    index: usize,
    buf: *mut i8,
    capacity: usize,
) -> SbcimStatus {
    guard(|| fill(trial(trials, index)?.final_spins.as_slice(), buf, capacity, "buf"))
}

/// # Safety
/// `trials` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn sbcim_trials_free(trials: *mut SbcimTrials) {
    if !trials.is_null() {
        drop(Box::from_raw(trials));
    }
}
