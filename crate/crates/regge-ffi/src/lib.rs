//! C ABI for the resonance-analysis core: opaque handles, integer status
//! codes, and a thread-local last-error message. The generated header lands
//! in `include/regge_ffi.h`.
//!
//! Conventions: every function returning `i32` yields `RG_OK` (0) on success
//! and a nonzero `RG_ERR_*` code on failure, with a UTF-8 description
//! retrievable via [`rg_last_error_message`] from the same thread. Pointers
//! returned through out-parameters stay owned by the library and must be
//! released with the matching `*_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::ptr;

use regge::amplitudes::{dcs_direct, fold, unfold, AngularGrid, FoldConfig, UnfoldConfig};
use regge::pade::{build_approximant, find_poles_zeros, Axis, PoleZeroConfig};
use regge::smatrix::{PartialWaveTable, UNITARITY_TOL};
use regge::synth::presets;
use regge::Complex64;

pub const RG_OK: i32 = 0;
pub const RG_ERR_VALIDATION: i32 = 2;
pub const RG_ERR_NUMERICAL: i32 = 3;
pub const RG_ERR_IO: i32 = 4;
pub const RG_ERR_NULL: i32 = 5;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let sanitized: String = msg.chars().map(|c| if c == '\0' { ' ' } else { c }).collect();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn fail(code: i32, msg: &str) -> i32 {
    set_error(msg);
    code
}

/// Message for the most recent failure on this thread; empty string when the
/// last call succeeded. The pointer stays valid until the next failing call
/// on the same thread.
#[no_mangle]
pub extern "C" fn rg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Opaque S-matrix table handle.
pub struct RgTable {
    inner: PartialWaveTable,
}

unsafe fn path_from(ptr: *const c_char) -> Result<&'static Path, i32> {
    if ptr.is_null() {
        return Err(RG_ERR_NULL);
    }
    match CStr::from_ptr(ptr).to_str() {
        Ok(s) => Ok(Path::new(s)),
        Err(_) => Err(RG_ERR_VALIDATION),
    }
}

unsafe fn load_table(
    path: *const c_char,
    out: *mut *mut RgTable,
    parser: fn(&Path) -> Result<PartialWaveTable, regge::smatrix::SmatrixError>,
) -> i32 {
    if out.is_null() {
        return fail(RG_ERR_NULL, "out handle is null");
    }
    *out = ptr::null_mut();
    let path = match path_from(path) {
        Ok(p) => p,
        Err(code) => return fail(code, "path is null or not UTF-8"),
    };
    let table = match parser(path) {
        Ok(t) => t,
        Err(e) => {
            let code = match &e {
                regge::smatrix::SmatrixError::Io(_) => RG_ERR_IO,
                _ => RG_ERR_VALIDATION,
            };
            return fail(code, &format!("{e}"));
        }
    };
    if let Err(e) = table.validate(UNITARITY_TOL) {
        return fail(RG_ERR_VALIDATION, &format!("{e}"));
    }
    *out = Box::into_raw(Box::new(RgTable { inner: table }));
    RG_OK
}

/// Load a CSV S-matrix table from `path` into a fresh handle.
///
/// # Safety
/// `path` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rg_table_load_csv(path: *const c_char, out: *mut *mut RgTable) -> i32 {
    load_table(path, out, |p| PartialWaveTable::load_csv(p))
}

/// Load a JSON S-matrix table from `path` into a fresh handle.
///
/// # Safety
/// `path` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rg_table_load_json(path: *const c_char, out: *mut *mut RgTable) -> i32 {
    load_table(path, out, |p| PartialWaveTable::load_json(p))
}

/// Release a table handle. Null is a no-op.
///
/// # Safety
/// `table` must be a handle from one of the loaders (or null), not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rg_table_free(table: *mut RgTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Largest tabulated J, or -1 on a null handle.
///
/// # Safety
/// `table` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn rg_table_jmax(table: *const RgTable) -> i64 {
    match table.as_ref() {
        Some(t) => t.inner.jmax as i64,
        None => -1,
    }
}

/// Number of tabulated energies, or -1 on a null handle.
///
/// # Safety
/// `table` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn rg_table_n_energies(table: *const RgTable) -> i64 {
    match table.as_ref() {
        Some(t) => t.inner.n_energies() as i64,
        None => -1,
    }
}

/// One extracted Regge pole.
#[repr(C)]
#[derive(Clone, Copy)]
pub struct RgPole {
    pub re_position: f64,
    pub im_position: f64,
    pub re_residue: f64,
    pub im_residue: f64,
    /// 1 when classified significant.
    pub significant: i32,
    /// 1 when part of a Froissart doublet.
    pub spurious: i32,
}

/// Regge poles of the table's `energy_index`-th energy. On success writes at
/// most `capacity` poles into `out_poles` and the full count into
/// `out_count`; the significant ones sort first, then by Re position.
///
/// # Safety
/// `table` must be a live handle; `out_poles` must point to `capacity`
/// writable elements; `out_count` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rg_poles_compute(
    table: *const RgTable,
    energy_index: usize,
    res_min: f64,
    im_max: f64,
    out_poles: *mut RgPole,
    capacity: usize,
    out_count: *mut usize,
) -> i32 {
    let t = match table.as_ref() {
        Some(t) => &t.inner,
        None => return fail(RG_ERR_NULL, "table handle is null"),
    };
    if out_count.is_null() || (capacity > 0 && out_poles.is_null()) {
        return fail(RG_ERR_NULL, "output pointer is null");
    }
    *out_count = 0;
    let pairs = match t.slice_at_energy(energy_index) {
        Ok(p) => p,
        Err(e) => return fail(RG_ERR_VALIDATION, &format!("{e}")),
    };
    let (nodes, values): (Vec<f64>, Vec<Complex64>) = pairs.into_iter().unzip();
    let approximant =
        match build_approximant(&nodes, &values, Axis::Lambda, t.energies_mev[energy_index]) {
            Ok(a) => a,
            Err(e) => return fail(RG_ERR_NUMERICAL, &format!("{e}")),
        };
    let mut cfg = PoleZeroConfig::for_jmax(t.jmax);
    if res_min >= 0.0 {
        cfg.res_min = res_min;
    }
    if im_max > 0.0 {
        cfg.im_max = im_max;
    }
    let set = match find_poles_zeros(&approximant, &cfg) {
        Ok(s) => s,
        Err(e) => return fail(RG_ERR_NUMERICAL, &format!("{e}")),
    };
    let mut poles = set.poles;
    poles.sort_by(|a, b| {
        (!a.significant, a.position.re)
            .partial_cmp(&(!b.significant, b.position.re))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    *out_count = poles.len();
    for (slot, p) in std::slice::from_raw_parts_mut(out_poles, capacity.min(poles.len()))
        .iter_mut()
        .zip(poles.iter())
    {
        *slot = RgPole {
            re_position: p.position.re,
            im_position: p.position.im,
            re_residue: p.residue.re,
            im_residue: p.residue.im,
            significant: p.significant as i32,
            spurious: p.spurious as i32,
        };
    }
    RG_OK
}

/// Direct partial-wave DCS at one energy over `n_theta` angles spanning
/// [theta_min_deg, theta_max_deg]; writes `n_theta` sigma values.
///
/// # Safety
/// `table` must be a live handle; `out_sigma` must point to `n_theta`
/// writable doubles.
#[no_mangle]
pub unsafe extern "C" fn rg_dcs_direct(
    table: *const RgTable,
    energy_index: usize,
    theta_min_deg: f64,
    theta_max_deg: f64,
    n_theta: usize,
    out_sigma: *mut f64,
) -> i32 {
    let t = match table.as_ref() {
        Some(t) => &t.inner,
        None => return fail(RG_ERR_NULL, "table handle is null"),
    };
    if out_sigma.is_null() {
        return fail(RG_ERR_NULL, "out_sigma is null");
    }
    if n_theta < 2 {
        return fail(RG_ERR_VALIDATION, "n_theta must be at least 2");
    }
    if energy_index >= t.n_energies() {
        return fail(RG_ERR_VALIDATION, "energy_index out of range");
    }
    let step = (theta_max_deg - theta_min_deg) / (n_theta - 1) as f64;
    let thetas: Vec<f64> =
        (0..n_theta).map(|i| (theta_min_deg + step * i as f64).to_radians()).collect();
    let grid = match AngularGrid::new(thetas) {
        Ok(g) => g,
        Err(e) => return fail(RG_ERR_VALIDATION, &format!("{e}")),
    };
    let dcs = match dcs_direct(t, &grid) {
        Ok(d) => d,
        Err(e) => return fail(RG_ERR_NUMERICAL, &format!("{e}")),
    };
    let out = std::slice::from_raw_parts_mut(out_sigma, n_theta);
    out.copy_from_slice(&dcs.sigma[energy_index]);
    RG_OK
}

/// Fold-back DCS at one energy: unfold with defaults wide enough for
/// `m_max`, then reassemble at `n_theta` angles spanning
/// [theta_min_deg, theta_max_deg]. Angles within the endpoint band are
/// evaluated through the endpoint series automatically.
///
/// # Safety
/// `table` must be a live handle; `out_sigma` must point to `n_theta`
/// writable doubles.
#[no_mangle]
pub unsafe extern "C" fn rg_fold_dcs(
    table: *const RgTable,
    energy_index: usize,
    m_max: i32,
    theta_min_deg: f64,
    theta_max_deg: f64,
    n_theta: usize,
    out_sigma: *mut f64,
) -> i32 {
    let t = match table.as_ref() {
        Some(t) => &t.inner,
        None => return fail(RG_ERR_NULL, "table handle is null"),
    };
    if out_sigma.is_null() {
        return fail(RG_ERR_NULL, "out_sigma is null");
    }
    if n_theta < 2 {
        return fail(RG_ERR_VALIDATION, "n_theta must be at least 2");
    }
    if energy_index >= t.n_energies() {
        return fail(RG_ERR_VALIDATION, "energy_index out of range");
    }
    let ucfg = UnfoldConfig { phi_step_deg: 5.0, ..UnfoldConfig::covering_m(m_max) };
    let unfolded = match unfold(t, &ucfg) {
        Ok(u) => u,
        Err(e) => return fail(RG_ERR_NUMERICAL, &format!("{e}")),
    };
    let step = (theta_max_deg - theta_min_deg) / (n_theta - 1) as f64;
    let thetas: Vec<f64> =
        (0..n_theta).map(|i| (theta_min_deg + step * i as f64).to_radians()).collect();
    let grid = match AngularGrid::new(thetas) {
        Ok(g) => g,
        Err(e) => return fail(RG_ERR_VALIDATION, &format!("{e}")),
    };
    let fcfg = FoldConfig { m_max, ..FoldConfig::default() };
    let folded = match fold(&unfolded, &grid, &fcfg) {
        Ok(f) => f,
        Err(e) => return fail(RG_ERR_NUMERICAL, &format!("{e}")),
    };
    let out = std::slice::from_raw_parts_mut(out_sigma, n_theta);
    for (ti, slot) in out.iter_mut().enumerate() {
        *slot = folded.sigma(energy_index, ti);
    }
    RG_OK
}

/// Generate a built-in synthetic model by preset name and write its table
/// (CSV) to `out_path`.
///
/// # Safety
/// `preset` and `out_path` must be valid NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn rg_synth_generate(preset: *const c_char, out_path: *const c_char) -> i32 {
    let name = match path_from(preset) {
        Ok(p) => p.to_string_lossy().into_owned(),
        Err(code) => return fail(code, "preset is null or not UTF-8"),
    };
    let out = match path_from(out_path) {
        Ok(p) => p,
        Err(code) => return fail(code, "out_path is null or not UTF-8"),
    };
    let model = match presets::by_name(&name) {
        Some(m) => m,
        None => return fail(RG_ERR_VALIDATION, &format!("unknown preset `{name}`")),
    };
    let table = match model.generate() {
        Ok(t) => t,
        Err(e) => return fail(RG_ERR_VALIDATION, &format!("{e}")),
    };
    match table.save_csv(out) {
        Ok(()) => RG_OK,
        Err(e) => fail(RG_ERR_IO, &format!("{e}")),
    }
}
