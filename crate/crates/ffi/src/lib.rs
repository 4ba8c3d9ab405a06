//! C ABI for hamforge: opaque handles over parsed instances and Hamiltonians,
//! error codes, and a thread-local last-error message. The companion header
//! lives at include/hamforge.h.

use hamforge::apxsim::{self, ApxSimInstance, Verdict};
use hamforge::error::HamError;
use hamforge::operator::Hamiltonian;
use hamforge::spectral;
use hamforge::textio;
use libc::{c_char, c_double, c_int};
use std::cell::RefCell;
use std::ffi::{CStr, CString};

pub const HF_OK: c_int = 0;
pub const HF_ERR_ASSERTION: c_int = 1;
pub const HF_ERR_PARSE: c_int = 2;
pub const HF_ERR_CAP: c_int = 3;
pub const HF_ERR_ARGUMENT: c_int = 4;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let cleaned: String = msg.chars().filter(|&ch| ch != '\0').collect();
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(cleaned).unwrap());
}

fn code_of(e: &HamError) -> c_int {
    match e {
        HamError::Parse { .. } | HamError::InvalidInstance(_) | HamError::Io(_) => HF_ERR_PARSE,
        HamError::DimCap { .. } | HamError::DimOverflow | HamError::UnsupportedScale(_) => {
            HF_ERR_CAP
        }
        _ => HF_ERR_ASSERTION,
    }
}

fn fail(e: HamError) -> c_int {
    let code = code_of(&e);
    set_error(&e.to_string());
    code
}

/// An opaque APX-SIM instance handle.
pub struct HfInstance {
    inner: ApxSimInstance,
}

/// An opaque Hamiltonian handle.
pub struct HfHamiltonian {
    inner: Hamiltonian,
}

#[repr(C)]
pub struct HfSolveResult {
    pub lambda: c_double,
    pub residual: c_double,
    pub ground_obs: c_double,
    pub low_min_obs: c_double,
    pub low_max_obs: c_double,
    /// 1 = YES, 0 = NO, -1 = INVALID
    pub verdict: c_int,
}

unsafe fn str_arg<'a>(ptr: *const c_char) -> Result<&'a str, c_int> {
    if ptr.is_null() {
        set_error("null pointer argument");
        return Err(HF_ERR_ARGUMENT);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("argument is not valid UTF-8");
        HF_ERR_ARGUMENT
    })
}

/// Last error message for this thread; valid until the next failing call.
#[no_mangle]
pub extern "C" fn hf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parse an instance file (Hamiltonian + OBS + THRESH) into a handle.
///
/// # Safety
/// `text` must be a NUL-terminated UTF-8 string; `out` must be non-null.
#[no_mangle]
pub unsafe extern "C" fn hf_instance_parse(
    text: *const c_char,
    out: *mut *mut HfInstance,
) -> c_int {
    if out.is_null() {
        set_error("null output pointer");
        return HF_ERR_ARGUMENT;
    }
    let text = match str_arg(text) {
        Ok(t) => t,
        Err(code) => return code,
    };
    match apxsim::read_instance(text) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(HfInstance { inner }));
            HF_OK
        }
        Err(e) => fail(e),
    }
}

/// Serialize an instance handle back to its text format. The returned string
/// must be released with hf_string_free.
///
/// # Safety
/// `inst` must be a live handle from hf_instance_parse.
#[no_mangle]
pub unsafe extern "C" fn hf_instance_write(inst: *const HfInstance) -> *mut c_char {
    if inst.is_null() {
        set_error("null instance");
        return std::ptr::null_mut();
    }
    let text = apxsim::write_instance(&(*inst).inner);
    CString::new(text)
        .map(CString::into_raw)
        .unwrap_or(std::ptr::null_mut())
}

/// Ground energy, ground-state observable expectation and the scan verdict.
///
/// # Safety
/// `inst` must be a live handle; `out` must be non-null.
#[no_mangle]
pub unsafe extern "C" fn hf_instance_solve(
    inst: *const HfInstance,
    tol: c_double,
    out: *mut HfSolveResult,
) -> c_int {
    if inst.is_null() || out.is_null() {
        set_error("null pointer argument");
        return HF_ERR_ARGUMENT;
    }
    let inst = &(*inst).inner;
    let solve = || -> Result<HfSolveResult, HamError> {
        let r = spectral::min_eigenvalue(&inst.hamiltonian, tol)?;
        let ground_obs = spectral::expectation(&inst.observable, &r.ground_vector)?;
        let scan = apxsim::exhaustive_scan(inst)?;
        Ok(HfSolveResult {
            lambda: r.lambda_min,
            residual: r.residual,
            ground_obs,
            low_min_obs: scan.low_min_a,
            low_max_obs: scan.low_max_a,
            verdict: match scan.verdict {
                Verdict::Yes => 1,
                Verdict::No => 0,
                Verdict::Invalid => -1,
            },
        })
    };
    match solve() {
        Ok(r) => {
            *out = r;
            HF_OK
        }
        Err(e) => fail(e),
    }
}

/// # Safety
/// `inst` must be a handle from hf_instance_parse, or null.
#[no_mangle]
pub unsafe extern "C" fn hf_instance_free(inst: *mut HfInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Parse a plain Hamiltonian text file into a handle.
///
/// # Safety
/// `text` must be a NUL-terminated UTF-8 string; `out` must be non-null.
#[no_mangle]
pub unsafe extern "C" fn hf_hamiltonian_parse(
    text: *const c_char,
    out: *mut *mut HfHamiltonian,
) -> c_int {
    if out.is_null() {
        set_error("null output pointer");
        return HF_ERR_ARGUMENT;
    }
    let text = match str_arg(text) {
        Ok(t) => t,
        Err(code) => return code,
    };
    match textio::read_hamiltonian(text) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(HfHamiltonian { inner }));
            HF_OK
        }
        Err(e) => fail(e),
    }
}

/// Total Hilbert-space dimension of a parsed Hamiltonian.
///
/// # Safety
/// `h` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn hf_hamiltonian_dim(h: *const HfHamiltonian) -> u64 {
    if h.is_null() {
        return 0;
    }
    (*h).inner.dim() as u64
}

/// Minimum eigenvalue with a certified residual (dense under the cap, Lanczos
/// above it).
///
/// # Safety
/// `h` must be a live handle; `lambda` and `residual` must be non-null.
#[no_mangle]
pub unsafe extern "C" fn hf_hamiltonian_min_eigenvalue(
    h: *const HfHamiltonian,
    tol: c_double,
    lambda: *mut c_double,
    residual: *mut c_double,
) -> c_int {
    if h.is_null() || lambda.is_null() || residual.is_null() {
        set_error("null pointer argument");
        return HF_ERR_ARGUMENT;
    }
    match spectral::min_eigenvalue(&(*h).inner, tol) {
        Ok(r) => {
            *lambda = r.lambda_min;
            *residual = r.residual;
            HF_OK
        }
        Err(e) => fail(e),
    }
}

/// Triangle-inequality operator-norm bound of a Hamiltonian.
///
/// # Safety
/// `h` must be a live handle; `bound` must be non-null.
#[no_mangle]
pub unsafe extern "C" fn hf_hamiltonian_norm_bound(
    h: *const HfHamiltonian,
    bound: *mut c_double,
) -> c_int {
    if h.is_null() || bound.is_null() {
        set_error("null pointer argument");
        return HF_ERR_ARGUMENT;
    }
    match (*h).inner.norm_bound() {
        Ok(b) => {
            *bound = b;
            HF_OK
        }
        Err(e) => fail(e),
    }
}

/// # Safety
/// `h` must be a handle from hf_hamiltonian_parse, or null.
#[no_mangle]
pub unsafe extern "C" fn hf_hamiltonian_free(h: *mut HfHamiltonian) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Release a string returned by hf_instance_write.
///
/// # Safety
/// `s` must come from hf_instance_write, or be null.
#[no_mangle]
pub unsafe extern "C" fn hf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_solve_roundtrip() {
        // diag(0,1) with observable -Z and thresholds making it a YES instance
        let text = "SITE 0 2\nTERM 1 0\n(0,0) (0,0)\n(0,0) (1,0)\nOBS\nTERM -1 0\n(1,0) (0,0)\n(0,0) (-1,0)\nTHRESH -0.9 0.9 0.1\n";
        let ctext = CString::new(text).unwrap();
        let mut handle: *mut HfInstance = std::ptr::null_mut();
        let code = unsafe { hf_instance_parse(ctext.as_ptr(), &mut handle) };
        assert_eq!(code, HF_OK);
        let mut out = HfSolveResult {
            lambda: 0.0,
            residual: 0.0,
            ground_obs: 0.0,
            low_min_obs: 0.0,
            low_max_obs: 0.0,
            verdict: 9,
        };
        let code = unsafe { hf_instance_solve(handle, 1e-10, &mut out) };
        assert_eq!(code, HF_OK);
        assert!(out.lambda.abs() < 1e-12);
        assert!((out.ground_obs + 1.0).abs() < 1e-12);
        assert_eq!(out.verdict, 1);
        let written = unsafe { hf_instance_write(handle) };
        assert!(!written.is_null());
        let round = unsafe { CStr::from_ptr(written) }
            .to_str()
            .unwrap()
            .to_string();
        assert!(round.contains("THRESH -0.9 0.9 0.1"));
        unsafe {
            hf_string_free(written);
            hf_instance_free(handle);
        }
    }

    #[test]
    fn parse_error_sets_message() {
        let ctext = CString::new("SITE nonsense").unwrap();
        let mut handle: *mut HfInstance = std::ptr::null_mut();
        let code = unsafe { hf_instance_parse(ctext.as_ptr(), &mut handle) };
        assert_eq!(code, HF_ERR_PARSE);
        let msg = unsafe { CStr::from_ptr(hf_last_error()) }.to_str().unwrap();
        assert!(!msg.is_empty());
    }

    #[test]
    fn hamiltonian_handle_min_eig() {
        let text = "SITE 0 2\nTERM 1 0\n(1,0) (0,0)\n(0,0) (-1,0)\n";
        let ctext = CString::new(text).unwrap();
        let mut handle: *mut HfHamiltonian = std::ptr::null_mut();
        assert_eq!(
            unsafe { hf_hamiltonian_parse(ctext.as_ptr(), &mut handle) },
            HF_OK
        );
        assert_eq!(unsafe { hf_hamiltonian_dim(handle) }, 2);
        let (mut lam, mut res) = (0.0, 0.0);
        assert_eq!(
            unsafe { hf_hamiltonian_min_eigenvalue(handle, 1e-10, &mut lam, &mut res) },
            HF_OK
        );
        assert!((lam + 1.0).abs() < 1e-12);
        unsafe { hf_hamiltonian_free(handle) };
    }
}
