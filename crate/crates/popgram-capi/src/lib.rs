//! C ABI over the popgram engine.
//!
//! Engines are opaque handles created by `popgram_engine_build` or
//! `popgram_engine_load` and released with `popgram_engine_free`. Every
//! fallible call returns a `PopgramStatus`; on failure a thread-local
//! message is retrievable once via `popgram_last_error_message` (free the
//! returned string with `popgram_string_free`). Scores cross the boundary
//! as exact numerator/denominator pairs.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use popgram::config::parse_tau;
use popgram::{
    artifact, Engine, EngineOptions, Error, IngestConfig, Level, PopulationStore, Schedule,
};

/// Opaque engine handle.
pub struct PopgramEngine {
    inner: Engine,
}

/// Status codes mirroring the library's error classes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PopgramStatus {
    Ok = 0,
    /// Invalid configuration or parameters.
    ConfigError = 1,
    /// Bad input data: unreadable corpus, corrupt artifact, unknown token.
    DataError = 2,
    /// A required pointer argument was null.
    NullArgument = 3,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 4,
    /// Internal invariant failure.
    Internal = 5,
}

/// One judgment. `score_*` and `coverage_*` are exact rationals;
/// `level` is the generality level index, or -1 when unsupported.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PopgramJudgment {
    pub score_num: u64,
    pub score_den: u64,
    pub coverage_num: u64,
    pub coverage_den: u64,
    pub level: i64,
    /// Weighted size of the same-length attested population.
    pub population: u64,
    /// Number of argmax support locations.
    pub supports: u64,
    /// Two or more distinct patterns achieve the maximal score.
    pub tie: bool,
    /// The candidate contains tokens outside the vocabulary.
    pub oov: bool,
}

/// Build options. Zero-valued numeric fields fall back to the defaults
/// (window 2, n-gram range 2..=5); `lowercase` is taken literally;
/// `schedule` and `tau` may be null for the defaults
/// ("3/4,1/2,1/4,0" and "all").
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PopgramOptions {
    pub window: u32,
    pub ngram_min: u32,
    pub ngram_max: u32,
    pub lowercase: bool,
    pub schedule: *const c_char,
    pub tau: *const c_char,
}

/// Engine counters for quick inspection.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PopgramInfo {
    pub tokens: u64,
    pub patterns: u64,
    pub total_tokens: u64,
    pub levels: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).ok();
    });
}

fn status_of(error: &Error) -> PopgramStatus {
    match error.exit_code() {
        1 => PopgramStatus::ConfigError,
        _ => PopgramStatus::DataError,
    }
}

fn fail(error: Error) -> PopgramStatus {
    let status = status_of(&error);
    set_error(error.to_string());
    status
}

/// # Safety
/// `ptr` must be null or a valid NUL-terminated string.
unsafe fn utf8_arg<'a>(ptr: *const c_char) -> Result<&'a str, PopgramStatus> {
    if ptr.is_null() {
        set_error("null string argument".to_string());
        return Err(PopgramStatus::NullArgument);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8".to_string());
        PopgramStatus::InvalidUtf8
    })
}

fn guarded<F: FnOnce() -> PopgramStatus>(body: F) -> PopgramStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic".to_string());
            PopgramStatus::Internal
        }
    }
}

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn popgram_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// The last error message raised on this thread, or null. The caller owns
/// the returned string and must release it with `popgram_string_free`.
#[no_mangle]
pub extern "C" fn popgram_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|slot| match slot.borrow().as_ref() {
        Some(message) => message.clone().into_raw(),
        None => std::ptr::null_mut(),
    })
}

/// # Safety
/// `s` must be a pointer previously returned by this library's string
/// functions, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn popgram_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

unsafe fn resolve_options(
    options: *const PopgramOptions,
) -> Result<(IngestConfig, EngineOptions), PopgramStatus> {
    let mut ingest = IngestConfig::default();
    let mut engine = EngineOptions::default();
    if options.is_null() {
        return Ok((ingest, engine));
    }
    let options = &*options;
    if options.window != 0 {
        engine.window = options.window as usize;
    }
    if options.ngram_min != 0 {
        ingest.ngram_min = options.ngram_min as usize;
    }
    if options.ngram_max != 0 {
        ingest.ngram_max = options.ngram_max as usize;
    }
    ingest.lowercase = options.lowercase;
    if !options.schedule.is_null() {
        let text = utf8_arg(options.schedule)?;
        match Schedule::parse(text) {
            Ok(schedule) => engine.schedule = schedule,
            Err(error) => return Err(fail(error)),
        }
    }
    if !options.tau.is_null() {
        let text = utf8_arg(options.tau)?;
        match parse_tau(text) {
            Ok(tau) => engine.tau = tau,
            Err(error) => return Err(fail(error)),
        }
    }
    Ok((ingest, engine))
}

/// Ingest a corpus file and build an engine.
///
/// # Safety
/// `corpus_path` must be a valid NUL-terminated string; `options` must be
/// null or point to a valid `PopgramOptions`; `out` must be a valid
/// pointer. On success `*out` owns the engine.
#[no_mangle]
pub unsafe extern "C" fn popgram_engine_build(
    corpus_path: *const c_char,
    options: *const PopgramOptions,
    out: *mut *mut PopgramEngine,
) -> PopgramStatus {
    guarded(|| {
        if out.is_null() {
            set_error("null output argument".to_string());
            return PopgramStatus::NullArgument;
        }
        let path = match utf8_arg(corpus_path) {
            Ok(p) => p,
            Err(status) => return status,
        };
        let (ingest, engine_options) = match resolve_options(options) {
            Ok(pair) => pair,
            Err(status) => return status,
        };
        let build = || -> Result<Engine, Error> {
            let file = std::fs::File::open(Path::new(path))?;
            let store = PopulationStore::ingest(std::io::BufReader::new(file), ingest)?;
            Engine::build(store, engine_options)
        };
        match build() {
            Ok(engine) => {
                *out = Box::into_raw(Box::new(PopgramEngine { inner: engine }));
                PopgramStatus::Ok
            }
            Err(error) => fail(error),
        }
    })
}

/// Load an engine from an index artifact.
///
/// # Safety
/// `path` must be a valid NUL-terminated string and `out` a valid pointer.
/// On success `*out` owns the engine.
#[no_mangle]
pub unsafe extern "C" fn popgram_engine_load(
    path: *const c_char,
    out: *mut *mut PopgramEngine,
) -> PopgramStatus {
    guarded(|| {
        if out.is_null() {
            set_error("null output argument".to_string());
            return PopgramStatus::NullArgument;
        }
        let path = match utf8_arg(path) {
            Ok(p) => p,
            Err(status) => return status,
        };
        match artifact::load(Path::new(path)) {
            Ok((engine, _)) => {
                *out = Box::into_raw(Box::new(PopgramEngine { inner: engine }));
                PopgramStatus::Ok
            }
            Err(error) => fail(error),
        }
    })
}

/// Write an engine to an index artifact (atomically).
///
/// # Safety
/// `engine` must be a live handle from this library; `path` must be a valid
/// NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn popgram_engine_save(
    engine: *const PopgramEngine,
    path: *const c_char,
    with_similarity_cache: bool,
) -> PopgramStatus {
    guarded(|| {
        if engine.is_null() {
            set_error("null engine handle".to_string());
            return PopgramStatus::NullArgument;
        }
        let path = match utf8_arg(path) {
            Ok(p) => p,
            Err(status) => return status,
        };
        match artifact::save(&(*engine).inner, with_similarity_cache, Path::new(path)) {
            Ok(()) => PopgramStatus::Ok,
            Err(error) => fail(error),
        }
    })
}

/// Release an engine handle. Null is a no-op.
///
/// # Safety
/// `engine` must be a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn popgram_engine_free(engine: *mut PopgramEngine) {
    if !engine.is_null() {
        drop(Box::from_raw(engine));
    }
}

/// Basic counters for a live engine.
///
/// # Safety
/// `engine` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn popgram_engine_info(
    engine: *const PopgramEngine,
    out: *mut PopgramInfo,
) -> PopgramStatus {
    guarded(|| {
        if engine.is_null() || out.is_null() {
            set_error("null argument".to_string());
            return PopgramStatus::NullArgument;
        }
        let inner = &(*engine).inner;
        *out = PopgramInfo {
            tokens: inner.store().vocabulary().len() as u64,
            patterns: inner.store().patterns().len() as u64,
            total_tokens: inner.store().total_tokens(),
            levels: inner.knowledge().hierarchy.level_count() as u64,
        };
        PopgramStatus::Ok
    })
}

/// Judge one whitespace-separated candidate sequence.
///
/// # Safety
/// `engine` must be a live handle, `candidate` a valid NUL-terminated
/// string, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn popgram_engine_score(
    engine: *const PopgramEngine,
    candidate: *const c_char,
    out: *mut PopgramJudgment,
) -> PopgramStatus {
    guarded(|| {
        if engine.is_null() || out.is_null() {
            set_error("null argument".to_string());
            return PopgramStatus::NullArgument;
        }
        let line = match utf8_arg(candidate) {
            Ok(l) => l,
            Err(status) => return status,
        };
        match (*engine).inner.judge_line(line) {
            Ok(judgment) => {
                *out = PopgramJudgment {
                    score_num: *judgment.nn_score.numer(),
                    score_den: *judgment.nn_score.denom(),
                    coverage_num: *judgment.coverage.numer(),
                    coverage_den: *judgment.coverage.denom(),
                    level: match judgment.level {
                        Level::At(l) => l as i64,
                        Level::Unsupported => -1,
                    },
                    population: judgment.population,
                    supports: judgment.supports.len() as u64,
                    tie: judgment.tied_support,
                    oov: judgment.oov,
                };
                PopgramStatus::Ok
            }
            Err(error) => fail(error),
        }
    })
}
