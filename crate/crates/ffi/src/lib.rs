//! C ABI over the `refdom` resolver.
//!
//! Handles are opaque and owned by the caller: everything returned by a
//! `*_new`/`*_load*` function must be released with the matching `*_free`.
//! Strings handed out by the library are NUL-terminated UTF-8 and must be
//! released with [`refdom_string_free`]. On failure a function returns a
//! non-zero [`RefdomStatus`] and the message is available from
//! [`refdom_last_error`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use refdom::engine::{EngineOptions, Session};
use refdom::trace::TraceRecord;
use refdom::{Error, KnowledgeBase};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RefdomStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Io = 3,
    /// Malformed JSON, or a knowledge base, lexicon or scene that fails validation.
    InvalidInput = 4,
    /// The utterance could not be tokenized or parsed.
    Parse = 5,
    /// The context model refused an update.
    Engine = 6,
    Panic = 7,
}

/// A loaded knowledge base (type hierarchy plus lexicon).
pub struct RefdomKb {
    inner: Arc<KnowledgeBase>,
}

/// A dialogue session: context model, optional scene, utterance counter.
pub struct RefdomSession {
    inner: Session,
    utterances: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("NUL bytes were replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(err: &Error) -> RefdomStatus {
    match err {
        Error::Io { .. } => RefdomStatus::Io,
        Error::UnknownToken { .. } | Error::NoParse { .. } => RefdomStatus::Parse,
        Error::Json { .. }
        | Error::Cycle(_)
        | Error::UnknownParent { .. }
        | Error::DuplicateType(_)
        | Error::DanglingPart { .. }
        | Error::Lexicon { .. }
        | Error::DuplicateEntity(_)
        | Error::InvalidParams(_)
        | Error::UnknownType(_)
        | Error::Gold { .. } => RefdomStatus::InvalidInput,
        _ => RefdomStatus::Engine,
    }
}

/// Runs `f`, recording any error or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), (RefdomStatus, String)>) -> RefdomStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RefdomStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside refdom");
            RefdomStatus::Panic
        }
    }
}

fn engine(err: Error) -> (RefdomStatus, String) {
    (status_of(&err), err.to_string())
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, (RefdomStatus, String)> {
    if p.is_null() {
        return Err((RefdomStatus::NullArgument, format!("`{name}` is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (RefdomStatus::InvalidUtf8, format!("`{name}` is not valid UTF-8")))
}

unsafe fn write_out<T>(out: *mut *mut T, value: *mut T) -> Result<(), (RefdomStatus, String)> {
    if out.is_null() {
        return Err((RefdomStatus::NullArgument, "output pointer is null".into()));
    }
    *out = value;
    Ok(())
}

/// Library version as a static NUL-terminated string. Do not free it.
#[no_mangle]
pub extern "C" fn refdom_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn refdom_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Loads a knowledge base from a JSON file.
///
/// # Safety
/// `path` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn refdom_kb_load(path: *const c_char, out: *mut *mut RefdomKb) -> RefdomStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        let kb = refdom::load_kb(path).map_err(engine)?;
        write_out(out, Box::into_raw(Box::new(RefdomKb { inner: Arc::new(kb) })))
    })
}

/// Builds a knowledge base from JSON text.
///
/// # Safety
/// `json` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn refdom_kb_from_json(json: *const c_char, out: *mut *mut RefdomKb) -> RefdomStatus {
    guard(|| {
        let json = str_arg(json, "json")?;
        let kb = KnowledgeBase::from_json(json).map_err(engine)?;
        write_out(out, Box::into_raw(Box::new(RefdomKb { inner: Arc::new(kb) })))
    })
}

/// # Safety
/// `kb` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn refdom_kb_free(kb: *mut RefdomKb) {
    if !kb.is_null() {
        drop(Box::from_raw(kb));
    }
}

/// Opens a session with default options. The session keeps its own
/// reference to the knowledge base, which may be freed afterwards.
///
/// # Safety
/// `kb` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn refdom_session_new(kb: *const RefdomKb, out: *mut *mut RefdomSession) -> RefdomStatus {
    guard(|| {
        let kb = kb
            .as_ref()
            .ok_or((RefdomStatus::NullArgument, "`kb` is null".to_string()))?;
        let session = Session::new(kb.inner.clone(), EngineOptions::default()).map_err(engine)?;
        write_out(
            out,
            Box::into_raw(Box::new(RefdomSession {
                inner: session,
                utterances: 0,
            })),
        )
    })
}

/// # Safety
/// `session` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn refdom_session_free(session: *mut RefdomSession) {
    if !session.is_null() {
        drop(Box::from_raw(session));
    }
}

unsafe fn session_mut<'a>(s: *mut RefdomSession) -> Result<&'a mut RefdomSession, (RefdomStatus, String)> {
    s.as_mut()
        .ok_or((RefdomStatus::NullArgument, "`session` is null".to_string()))
}

/// Loads scene entities (JSON text) into the session. Only one scene per session.
///
/// # Safety
/// `session` must be a live handle and `json` a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn refdom_session_load_scene(session: *mut RefdomSession, json: *const c_char) -> RefdomStatus {
    guard(|| {
        let s = session_mut(session)?;
        let json = str_arg(json, "json")?;
        s.inner.load_scene_str(json).map_err(engine)
    })
}

/// Interprets one utterance and writes a JSON object
/// `{"utt": n, "resolutions": [trace records], "groups": [...]}` to `out`.
/// Unresolvable expressions are reported with verdict `FAIL`, not as errors.
///
/// # Safety
/// `session` must be a live handle, `text` a valid NUL-terminated string,
/// `out` a valid pointer. Free the result with [`refdom_string_free`].
#[no_mangle]
pub unsafe extern "C" fn refdom_session_process(
    session: *mut RefdomSession,
    text: *const c_char,
    out: *mut *mut c_char,
) -> RefdomStatus {
    guard(|| {
        let s = session_mut(session)?;
        let text = str_arg(text, "text")?;
        if out.is_null() {
            return Err((RefdomStatus::NullArgument, "output pointer is null".into()));
        }
        let result = s.inner.process_text(text).map_err(engine)?;
        let utt = s.utterances;
        s.utterances += 1;
        let records: Vec<TraceRecord> = result
            .resolutions
            .iter()
            .enumerate()
            .map(|(a, r)| TraceRecord::new(utt, a, r))
            .collect();
        let json = serde_json::json!({
            "utt": utt,
            "resolutions": records,
            "groups": result.groups,
        })
        .to_string();
        let json = CString::new(json).map_err(|e| (RefdomStatus::Engine, e.to_string()))?;
        write_out(out, json.into_raw())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn refdom_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
