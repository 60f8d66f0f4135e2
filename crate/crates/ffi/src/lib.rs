//! C interface to the quartic engine.
//!
//! Objects cross the boundary as opaque handles created by `*_new` or
//! `*_from_json` functions and released with the matching `*_free`. Every
//! fallible call returns a [`QuarticStatus`]; on failure the message is kept
//! per thread and can be fetched with [`quartic_last_error_message`].
//! Strings returned by the library are owned by the caller and must be
//! released with [`quartic_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num::rational::Rational64;
use quartic::colour_kernel::{ModelSpec, Scaling};
use quartic::enumeration::{count_trees_closed_form, count_trees_enumerated};
use quartic::if_transform::{graph_to_map, map_to_graph};
use quartic::series_engine::{assemble_series, Observable};
use quartic::{ColouredGraph, Error, StrandedMap};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuarticStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidInput = 3,
    BudgetExceeded = 4,
    EngineError = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuarticFamily {
    Melonic = 0,
    FullQuartic = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuarticScaling {
    Invariant = 0,
    Enhanced = 1,
}

/// A model specification.
pub struct QuarticModel(ModelSpec);

/// A ciliated multicoloured map.
pub struct QuarticMap(StrandedMap);

/// A coloured Feynman graph.
pub struct QuarticGraph(ColouredGraph);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(QuarticStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::BudgetExceeded { .. } => QuarticStatus::BudgetExceeded,
            Error::Invalid(_)
            | Error::InvalidColourSet(_)
            | Error::MalformedGraph(_)
            | Error::MalformedMap(_)
            | Error::UnsupportedModel(_)
            | Error::UnsupportedBubble(_) => QuarticStatus::InvalidInput,
            _ => QuarticStatus::EngineError,
        };
        Failure(status, e.to_string())
    }
}

fn null() -> Failure {
    Failure(QuarticStatus::NullPointer, "null pointer argument".into())
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> QuarticStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QuarticStatus::Ok,
        Ok(Err(Failure(s, m))) => {
            set_error(m);
            s
        }
        Err(_) => {
            set_error("panic inside the quartic library".into());
            QuarticStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null());
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Failure(QuarticStatus::InvalidUtf8, "string is not UTF-8".into()))
}

unsafe fn write_out<T>(out: *mut T, v: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null());
    }
    out.write(v);
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|_| Failure(QuarticStatus::EngineError, "nul byte in output".into()))?;
    write_out(out, c.into_raw())
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(null)
}

fn json_err(e: serde_json::Error) -> Failure {
    Failure(QuarticStatus::InvalidInput, e.to_string())
}

/// Engine version as a static string; do not free.
#[no_mangle]
pub extern "C" fn quartic_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL. The caller frees it.
#[no_mangle]
pub extern "C" fn quartic_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null_mut(), |c| c.clone().into_raw()))
}

/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn quartic_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn quartic_model_new(
    family: QuarticFamily,
    scaling: QuarticScaling,
    rank: u32,
    out: *mut *mut QuarticModel,
) -> QuarticStatus {
    guard(|| {
        let scaling = match scaling {
            QuarticScaling::Invariant => Scaling::Invariant,
            QuarticScaling::Enhanced => Scaling::Enhanced,
        };
        let spec = match family {
            QuarticFamily::Melonic => ModelSpec::melonic(rank as usize, scaling)?,
            QuarticFamily::FullQuartic => ModelSpec::full_quartic(rank as usize, scaling)?,
        };
        write_out(out, Box::into_raw(Box::new(QuarticModel(spec))))
    })
}

/// Rank-4 field theory with derivative necklaces and covariance exponent `eta_num/eta_den`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn quartic_model_enhanced_tft(eta_num: i64, eta_den: i64, out: *mut *mut QuarticModel) -> QuarticStatus {
    guard(|| {
        if eta_den == 0 {
            return Err(Failure(QuarticStatus::InvalidInput, "zero denominator".into()));
        }
        let spec = ModelSpec::enhanced_tft(Rational64::new(eta_num, eta_den))?;
        write_out(out, Box::into_raw(Box::new(QuarticModel(spec))))
    })
}

/// # Safety
/// `m` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn quartic_model_free(m: *mut QuarticModel) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Parse a map from its JSON form.
///
/// # Safety
/// `json` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn quartic_map_from_json(json: *const c_char, out: *mut *mut QuarticMap) -> QuarticStatus {
    guard(|| {
        let m: StrandedMap = serde_json::from_str(read_str(json)?).map_err(json_err)?;
        write_out(out, Box::into_raw(Box::new(QuarticMap(m))))
    })
}

/// # Safety
/// `map` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn quartic_map_to_json(map: *const QuarticMap, out: *mut *mut c_char) -> QuarticStatus {
    guard(|| {
        let s = serde_json::to_string(&handle(map)?.0).map_err(json_err)?;
        write_string(out, s)
    })
}

/// # Safety
/// `m` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn quartic_map_free(m: *mut QuarticMap) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// # Safety
/// `json` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn quartic_graph_from_json(json: *const c_char, out: *mut *mut QuarticGraph) -> QuarticStatus {
    guard(|| {
        let g: ColouredGraph = serde_json::from_str(read_str(json)?).map_err(json_err)?;
        write_out(out, Box::into_raw(Box::new(QuarticGraph(g))))
    })
}

/// # Safety
/// `graph` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn quartic_graph_to_json(graph: *const QuarticGraph, out: *mut *mut c_char) -> QuarticStatus {
    guard(|| {
        let s = serde_json::to_string(&handle(graph)?.0).map_err(json_err)?;
        write_string(out, s)
    })
}

/// # Safety
/// `g` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn quartic_graph_free(g: *mut QuarticGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `graph` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn quartic_graph_to_map(graph: *const QuarticGraph, out: *mut *mut QuarticMap) -> QuarticStatus {
    guard(|| {
        let m = graph_to_map(&handle(graph)?.0)?;
        write_out(out, Box::into_raw(Box::new(QuarticMap(m))))
    })
}

/// # Safety
/// `map` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn quartic_map_to_graph(map: *const QuarticMap, out: *mut *mut QuarticGraph) -> QuarticStatus {
    guard(|| {
        let g = map_to_graph(&handle(map)?.0)?;
        write_out(out, Box::into_raw(Box::new(QuarticGraph(g))))
    })
}

/// Edges, cilia, internal faces and genus of a map. Any output pointer may be NULL.
///
/// # Safety
/// `map` must be a live handle; non-NULL outputs must be valid.
#[no_mangle]
pub unsafe extern "C" fn quartic_map_stats(
    map: *const QuarticMap,
    edges: *mut usize,
    cilia: *mut usize,
    internal_faces: *mut usize,
    genus: *mut usize,
) -> QuarticStatus {
    guard(|| {
        let m = &handle(map)?.0;
        for (p, v) in [
            (edges, m.n_edges()),
            (cilia, m.k()),
            (internal_faces, m.internal_faces()),
            (genus, m.genus()),
        ] {
            if !p.is_null() {
                p.write(v);
            }
        }
        Ok(())
    })
}

/// Exponent `Omega` of `N^(-Omega)` in the amplitude, as a fraction.
///
/// # Safety
/// Handles must be live and outputs valid.
#[no_mangle]
pub unsafe extern "C" fn quartic_map_omega(
    map: *const QuarticMap,
    model: *const QuarticModel,
    num: *mut i64,
    den: *mut i64,
) -> QuarticStatus {
    guard(|| {
        let w = handle(map)?.0.omega(&handle(model)?.0)?;
        write_out(num, *w.numer())?;
        write_out(den, *w.denom())
    })
}

/// Plane trees on `v` labelled vertices with `k` cilia and `q` colours, by
/// generation and by closed form, as decimal strings.
///
/// # Safety
/// Outputs must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn quartic_count_trees(
    v: u32,
    k: u32,
    q: u32,
    enumerated: *mut *mut c_char,
    closed_form: *mut *mut c_char,
) -> QuarticStatus {
    guard(|| {
        if enumerated.is_null() || closed_form.is_null() {
            return Err(null());
        }
        let a = count_trees_enumerated(v as usize, k as usize, q as usize)?;
        let b = count_trees_closed_form(v as usize, k as usize, q as usize);
        write_string(enumerated, a.to_string())?;
        write_string(closed_form, b.to_string())
    })
}

/// Connected vacuum series through `order`, one term per line as
/// `degrees;n_exponent;num/den`.
///
/// # Safety
/// `model` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn quartic_free_energy(model: *const QuarticModel, order: u32, out: *mut *mut c_char) -> QuarticStatus {
    guard(|| {
        let s = assemble_series(&Observable::FreeEnergy, &handle(model)?.0, order)?;
        let text: String = s
            .rows()
            .into_iter()
            .map(|r| {
                let d: Vec<String> = r.degrees.iter().map(|x| x.to_string()).collect();
                format!("{};{};{}/{}\n", d.join(" "), r.n_exponent, r.numerator, r.denominator)
            })
            .collect();
        write_string(out, text)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn take(s: *mut c_char) -> String {
        assert!(!s.is_null());
        let r = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
        unsafe { quartic_string_free(s) };
        r
    }

    const MAP: &str = r#"{"D":3,"half_edges":[{"id":0,"colours":[1]},{"id":1,"colours":[1]}],"cilia":[],"sigma":[[0,1]],"epsilon":[[0,1]]}"#;

    #[test]
    fn map_round_trip_and_stats() {
        let json = CString::new(MAP).unwrap();
        let mut m = ptr::null_mut();
        let mut model = ptr::null_mut();
        unsafe {
            assert_eq!(quartic_map_from_json(json.as_ptr(), &mut m), QuarticStatus::Ok);
            assert_eq!(quartic_model_new(QuarticFamily::Melonic, QuarticScaling::Invariant, 3, &mut model), QuarticStatus::Ok);
            let (mut e, mut f) = (0usize, 0usize);
            assert_eq!(quartic_map_stats(m, &mut e, ptr::null_mut(), &mut f, ptr::null_mut()), QuarticStatus::Ok);
            assert_eq!(e, 1);
            let (mut n, mut d) = (0i64, 0i64);
            assert_eq!(quartic_map_omega(m, model, &mut n, &mut d), QuarticStatus::Ok);
            let mut g = ptr::null_mut();
            assert_eq!(quartic_map_to_graph(m, &mut g), QuarticStatus::Ok);
            let mut back = ptr::null_mut();
            assert_eq!(quartic_graph_to_map(g, &mut back), QuarticStatus::Ok);
            let mut s = ptr::null_mut();
            assert_eq!(quartic_map_to_json(back, &mut s), QuarticStatus::Ok);
            let text = take(s);
            assert!(text.contains("half_edges"));
            quartic_graph_free(g);
            quartic_map_free(back);
            quartic_map_free(m);
            quartic_model_free(model);
        }
    }

    #[test]
    fn errors_are_reported() {
        let bad = CString::new("{not json").unwrap();
        let mut m = ptr::null_mut();
        unsafe {
            assert_eq!(quartic_map_from_json(bad.as_ptr(), &mut m), QuarticStatus::InvalidInput);
            assert!(m.is_null());
            assert!(!take(quartic_last_error_message()).is_empty());
            assert_eq!(quartic_map_from_json(ptr::null(), &mut m), QuarticStatus::NullPointer);
            let mut model = ptr::null_mut();
            assert_eq!(
                quartic_model_new(QuarticFamily::Melonic, QuarticScaling::Invariant, 1, &mut model),
                QuarticStatus::InvalidInput
            );
        }
    }

    #[test]
    fn tree_counts_agree() {
        let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
        unsafe {
            assert_eq!(quartic_count_trees(5, 1, 3, &mut a, &mut b), QuarticStatus::Ok);
        }
        assert_eq!(take(a), take(b));
    }

    #[test]
    fn free_energy_lines() {
        let mut model = ptr::null_mut();
        let mut s = ptr::null_mut();
        unsafe {
            assert_eq!(quartic_model_new(QuarticFamily::Melonic, QuarticScaling::Invariant, 3, &mut model), QuarticStatus::Ok);
            assert_eq!(quartic_free_energy(model, 1, &mut s), QuarticStatus::Ok);
            quartic_model_free(model);
        }
        let text = take(s);
        assert!(!text.is_empty() && text.lines().all(|l| l.split(';').count() == 3));
        let v = unsafe { CStr::from_ptr(quartic_version()) }.to_str().unwrap();
        assert_eq!(v, env!("CARGO_PKG_VERSION"));
    }
}
