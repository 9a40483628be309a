//! C interface to `sparse-forest`.
//!
//! Forests live behind an opaque [`SfForest`] handle. Every fallible call
//! returns an [`SfStatus`]; on failure the message is available from
//! [`sf_last_error_message`] until the next failing call on the same thread.
//! Matrices are row-major `n × d` arrays of doubles.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;
use std::sync::Arc;

use sparse_forest::{fit, Dataset, Error, Forest, ForestConfig, SplitProbabilities};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SfStatus {
    Ok = 0,
    NullPointer = 1,
    Config = 2,
    Dimension = 3,
    Data = 4,
    Io = 5,
    Panic = 6,
}

/// Values of [`SfForestParams::policy`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SfPolicy {
    PurelyRandom = 0,
    Guided = 1,
    Cart = 2,
}

/// Fitting parameters. Zero in `m_try` or `target_leaves` selects the default
/// (`d` for the guided regime, `max(d/3, 1)` for CART; `ceil(n/5)` leaves).
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SfForestParams {
    /// One of the [`SfPolicy`] values.
    pub policy: u32,
    pub k_n: usize,
    pub trees: usize,
    pub m_try: usize,
    pub target_leaves: usize,
    pub seed: u64,
}

/// Opaque fitted forest.
pub struct SfForest {
    inner: Forest,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> SfStatus {
    match err {
        Error::Config(_) | Error::Domain(_) => SfStatus::Config,
        Error::Dimension { .. } => SfStatus::Dimension,
        Error::Data(_) | Error::Csv(_) => SfStatus::Data,
        Error::Io(_) => SfStatus::Io,
    }
}

struct NullPointer(&'static str);

enum Failure {
    Null(NullPointer),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<NullPointer> for Failure {
    fn from(e: NullPointer) -> Self {
        Failure::Null(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SfStatus::Ok,
        Ok(Err(Failure::Null(NullPointer(what)))) => {
            set_last_error(format!("null pointer: {what}"));
            SfStatus::NullPointer
        }
        Ok(Err(Failure::Lib(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_last_error("internal panic".into());
            SfStatus::Panic
        }
    }
}

unsafe fn slice_of<'a>(p: *const f64, len: usize, what: &'static str) -> Result<&'a [f64], NullPointer> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(NullPointer(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn dataset(x: *const f64, y: *const f64, n: usize, d: usize, what: &'static str) -> Result<Dataset, Failure> {
    let len = n.checked_mul(d).ok_or_else(|| Error::Config("n * d overflows".into()))?;
    let x = slice_of(x, len, what)?.to_vec();
    let y = slice_of(y, n, what)?.to_vec();
    Ok(Dataset::new(x, y, d)?)
}

/// Fits a forest on `n` rows of `d` covariates `x` with responses `y`.
///
/// `probs` (length `d`) sets the split probabilities of the purely random
/// regime and may be null for uniform. `split_x`/`split_y` (`split_n` rows) is
/// the independent sample of the guided regime and is ignored otherwise.
/// On success `*out` owns a new forest, to be released with [`sf_forest_free`].
///
/// # Safety
/// All non-null pointers must reference arrays of the stated lengths.
#[no_mangle]
pub unsafe extern "C" fn sf_forest_fit(
    x: *const f64,
    y: *const f64,
    n: usize,
    d: usize,
    params: *const SfForestParams,
    probs: *const f64,
    split_x: *const f64,
    split_y: *const f64,
    split_n: usize,
    out: *mut *mut SfForest,
) -> SfStatus {
    guard(|| {
        if out.is_null() {
            return Err(NullPointer("out").into());
        }
        *out = ptr::null_mut();
        let params = params.as_ref().ok_or(NullPointer("params"))?;
        let train = dataset(x, y, n, d, "x/y")?;
        let mut config = match params.policy {
            p if p == SfPolicy::PurelyRandom as u32 => {
                ForestConfig::purely_random(params.k_n, params.trees, params.seed)
            }
            p if p == SfPolicy::Guided as u32 => {
                let sample = dataset(split_x, split_y, split_n, d, "split_x/split_y")?;
                let m_try = if params.m_try == 0 { d } else { params.m_try };
                ForestConfig::guided(params.k_n, params.trees, m_try, Arc::new(sample), params.seed)
            }
            p if p == SfPolicy::Cart as u32 => {
                let m_try = if params.m_try == 0 { (d / 3).max(1) } else { params.m_try };
                ForestConfig::cart(params.trees, m_try, params.seed)
            }
            p => return Err(Error::Config(format!("unknown policy {p}")).into()),
        };
        if !probs.is_null() {
            config = config.with_probs(SplitProbabilities::new(slice_of(probs, d, "probs")?.to_vec())?);
        }
        if params.target_leaves > 0 {
            config = config.with_target_leaves(params.target_leaves);
        }
        let forest = fit(&config, train)?;
        *out = Box::into_raw(Box::new(SfForest { inner: forest }));
        Ok(())
    })
}

/// Writes one prediction per query row into `out` (length `n`).
///
/// # Safety
/// `forest` must come from [`sf_forest_fit`]; `x` holds `n * d` doubles and
/// `out` room for `n`.
#[no_mangle]
pub unsafe extern "C" fn sf_forest_predict(
    forest: *const SfForest,
    x: *const f64,
    n: usize,
    d: usize,
    out: *mut f64,
) -> SfStatus {
    guard(|| {
        let forest = forest.as_ref().ok_or(NullPointer("forest"))?;
        let expected = forest.inner.data().d();
        if d != expected {
            return Err(Error::Dimension { expected, got: d }.into());
        }
        let queries = slice_of(x, n * d, "x")?;
        if n > 0 && out.is_null() {
            return Err(NullPointer("out").into());
        }
        for (i, row) in queries.chunks_exact(d).enumerate() {
            *out.add(i) = forest.inner.predict(row);
        }
        Ok(())
    })
}

/// Writes the per-coordinate split totals (length `d`) into `out`.
///
/// # Safety
/// `forest` must come from [`sf_forest_fit`] and `out` have room for `d` values.
#[no_mangle]
pub unsafe extern "C" fn sf_forest_split_counts(forest: *const SfForest, out: *mut u64, d: usize) -> SfStatus {
    guard(|| {
        let forest = forest.as_ref().ok_or(NullPointer("forest"))?;
        let counts = forest.inner.split_counts();
        if d != counts.len() {
            return Err(Error::Dimension { expected: counts.len(), got: d }.into());
        }
        if out.is_null() {
            return Err(NullPointer("out").into());
        }
        ptr::copy_nonoverlapping(counts.as_ptr(), out, d);
        Ok(())
    })
}

/// Covariate dimension of a fitted forest, 0 for a null handle.
///
/// # Safety
/// `forest` must be null or come from [`sf_forest_fit`].
#[no_mangle]
pub unsafe extern "C" fn sf_forest_dimension(forest: *const SfForest) -> usize {
    forest.as_ref().map_or(0, |f| f.inner.data().d())
}

/// Number of trees, 0 for a null handle.
///
/// # Safety
/// `forest` must be null or come from [`sf_forest_fit`].
#[no_mangle]
pub unsafe extern "C" fn sf_forest_tree_count(forest: *const SfForest) -> usize {
    forest.as_ref().map_or(0, |f| f.inner.trees().len())
}

/// Releases a forest. Null is accepted.
///
/// # Safety
/// `forest` must be null or come from [`sf_forest_fit`], and not be used again.
#[no_mangle]
pub unsafe extern "C" fn sf_forest_free(forest: *mut SfForest) {
    if !forest.is_null() {
        drop(Box::from_raw(forest));
    }
}

/// Message of the last failed call on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn sf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
