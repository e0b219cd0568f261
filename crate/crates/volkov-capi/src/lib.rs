//! C ABI for the plane-wave Dirac toolkit.
//!
//! Conventions: natural units (hbar = c = 1, energies in m), every function
//! returns an error code (`VK_OK` on success) and writes its results through
//! out-pointers. The mode table is an opaque handle created by
//! [`vk_mode_table_new`] and released by [`vk_mode_table_free`]. The last
//! error message of the calling thread is available through
//! [`vk_last_error`].

use std::cell::RefCell;
use std::ffi::CString;
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use volkov_core::algebra::FourMomentum;
use volkov_core::barrier::{scattering_coefficients, BarrierSpec, Segment};
use volkov_core::grid::{commensurate_volkov_grid, sample_volkov};
use volkov_core::modes::{mode_coefficients_quadrature, negative_energy_content, ModeTable};
use volkov_core::separation::split;
use volkov_core::volkov::{dirac_residual, volkov_eval, PlaneWaveFieldSpec, SpacetimePoint};
use volkov_core::Error;

/// Success.
pub const VK_OK: i32 = 0;
/// A required pointer argument was null.
pub const VK_ERR_NULL_POINTER: i32 = 1;
/// Input validation failed; see `vk_last_error`.
pub const VK_ERR_VALIDATION: i32 = 2;
/// A numerical guard tripped; see `vk_last_error`.
pub const VK_ERR_NUMERICAL: i32 = 3;
/// An internal panic was caught at the boundary.
pub const VK_ERR_PANIC: i32 = 4;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn code_of(err: &Error) -> i32 {
    match err {
        Error::Validation(_) => VK_ERR_VALIDATION,
        Error::Numerical(_) => VK_ERR_NUMERICAL,
        Error::Io(_) => VK_ERR_NUMERICAL,
    }
}

fn guard<F: FnOnce() -> i32>(f: F) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(code) => code,
        Err(_) => {
            set_error("internal panic caught at the C boundary");
            VK_ERR_PANIC
        }
    }
}

/// Opaque handle holding one plane-wave mode table.
pub struct VkModeTable {
    inner: ModeTable,
}

/// Version string of the library; static storage, do not free.
#[no_mangle]
pub extern "C" fn vk_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr() as *const c_char
}

/// Copy the calling thread's last error message (NUL-terminated) into `buf`.
/// Returns the number of bytes required including the terminator; when the
/// buffer is too small or null the message is left uncopied.
///
/// # Safety
/// `buf` must point to at least `cap` writable bytes, or be null.
#[no_mangle]
pub unsafe extern "C" fn vk_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let msg = slot.borrow();
        let bytes = msg.as_bytes_with_nul();
        if !buf.is_null() && cap >= bytes.len() {
            std::ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, bytes.len());
        }
        bytes.len()
    })
}

fn on_shell(px: f64, py: f64, pz: f64, m: f64) -> Result<FourMomentum, Error> {
    if m <= 0.0 {
        return Err(Error::Validation(format!("mass must be positive, got {m}")));
    }
    Ok(FourMomentum::on_shell(px, py, pz, m))
}

/// Evaluate the plane-wave Dirac wavefunction at one spacetime point.
/// Writes the four complex components into `out_re[0..4]`, `out_im[0..4]`.
///
/// # Safety
/// `out_re` and `out_im` must each point to 4 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn vk_volkov_eval(
    px: f64,
    py: f64,
    pz: f64,
    amplitude: f64,
    omega: f64,
    mass: f64,
    t: f64,
    x: f64,
    y: f64,
    z: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> i32 {
    guard(|| {
        if out_re.is_null() || out_im.is_null() {
            set_error("output pointers must not be null");
            return VK_ERR_NULL_POINTER;
        }
        let field = PlaneWaveFieldSpec::new(amplitude, omega);
        let result = on_shell(px, py, pz, mass).and_then(|p| {
            volkov_eval(&p, &field, &SpacetimePoint::new(t, x, y, z), mass)
        });
        match result {
            Ok(psi) => {
                for (i, c) in psi.0.iter().enumerate() {
                    *out_re.add(i) = c.re;
                    *out_im.add(i) = c.im;
                }
                VK_OK
            }
            Err(e) => {
                set_error(&e.to_string());
                code_of(&e)
            }
        }
    })
}

/// Finite-difference Dirac-equation residual of the wavefunction at one
/// point, with stencil step `h`.
///
/// # Safety
/// `out` must point to one writable double.
#[no_mangle]
pub unsafe extern "C" fn vk_dirac_residual(
    px: f64,
    py: f64,
    pz: f64,
    amplitude: f64,
    omega: f64,
    mass: f64,
    t: f64,
    x: f64,
    y: f64,
    z: f64,
    h: f64,
    out: *mut f64,
) -> i32 {
    guard(|| {
        if out.is_null() {
            set_error("output pointer must not be null");
            return VK_ERR_NULL_POINTER;
        }
        let field = PlaneWaveFieldSpec::new(amplitude, omega);
        let result = on_shell(px, py, pz, mass).and_then(|p| {
            dirac_residual(&p, &field, &SpacetimePoint::new(t, x, y, z), mass, h)
        });
        match result {
            Ok(r) => {
                *out = r;
                VK_OK
            }
            Err(e) => {
                set_error(&e.to_string());
                code_of(&e)
            }
        }
    })
}

/// Build the plane-wave mode ladder of the state (adaptive truncation).
/// On success `*out` owns the handle; release it with `vk_mode_table_free`.
///
/// # Safety
/// `out` must point to one writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn vk_mode_table_new(
    px: f64,
    py: f64,
    pz: f64,
    amplitude: f64,
    omega: f64,
    mass: f64,
    out: *mut *mut VkModeTable,
) -> i32 {
    guard(|| {
        if out.is_null() {
            set_error("output pointer must not be null");
            return VK_ERR_NULL_POINTER;
        }
        let field = PlaneWaveFieldSpec::new(amplitude, omega);
        let result = on_shell(px, py, pz, mass)
            .and_then(|p| mode_coefficients_quadrature(&p, &field, mass, None));
        match result {
            Ok(table) => {
                *out = Box::into_raw(Box::new(VkModeTable { inner: table }));
                VK_OK
            }
            Err(e) => {
                set_error(&e.to_string());
                code_of(&e)
            }
        }
    })
}

/// Number of ladder entries in the table.
///
/// # Safety
/// `table` must be a live handle from `vk_mode_table_new`; `out` must point
/// to one writable size slot.
#[no_mangle]
pub unsafe extern "C" fn vk_mode_table_len(
    table: *const VkModeTable,
    out: *mut usize,
) -> i32 {
    guard(|| {
        if table.is_null() || out.is_null() {
            set_error("null handle or output pointer");
            return VK_ERR_NULL_POINTER;
        }
        *out = (*table).inner.entries.len();
        VK_OK
    })
}

/// Read one ladder entry: index n, the shifted four-momentum
/// `out_q = (E, px, py, pz)` and the coefficient bispinor components.
///
/// # Safety
/// `table` must be a live handle; `out_q`, `out_w_re`, `out_w_im` must each
/// point to 4 writable doubles and `out_n` to one writable int.
#[no_mangle]
pub unsafe extern "C" fn vk_mode_table_entry(
    table: *const VkModeTable,
    index: usize,
    out_n: *mut i32,
    out_q: *mut f64,
    out_w_re: *mut f64,
    out_w_im: *mut f64,
) -> i32 {
    guard(|| {
        if table.is_null() || out_n.is_null() || out_q.is_null() || out_w_re.is_null()
            || out_w_im.is_null()
        {
            set_error("null handle or output pointer");
            return VK_ERR_NULL_POINTER;
        }
        let entries = &(*table).inner.entries;
        if index >= entries.len() {
            set_error(&format!(
                "entry index {index} out of range (len {})",
                entries.len()
            ));
            return VK_ERR_VALIDATION;
        }
        let e = &entries[index];
        *out_n = e.n;
        *out_q.add(0) = e.q.e;
        *out_q.add(1) = e.q.px;
        *out_q.add(2) = e.q.py;
        *out_q.add(3) = e.q.pz;
        for (i, c) in e.w.0.iter().enumerate() {
            *out_w_re.add(i) = c.re;
            *out_w_im.add(i) = c.im;
        }
        VK_OK
    })
}

/// Electron/positron content of the table: the sign-of-energy fraction and
/// the energy-projector fraction.
///
/// # Safety
/// `table` must be a live handle; the out-pointers must each point to one
/// writable double.
#[no_mangle]
pub unsafe extern "C" fn vk_mode_table_fractions(
    table: *const VkModeTable,
    out_sign: *mut f64,
    out_projector: *mut f64,
) -> i32 {
    guard(|| {
        if table.is_null() || out_sign.is_null() || out_projector.is_null() {
            set_error("null handle or output pointer");
            return VK_ERR_NULL_POINTER;
        }
        match negative_energy_content(&(*table).inner) {
            Ok((sign, projector)) => {
                *out_sign = sign;
                *out_projector = projector;
                VK_OK
            }
            Err(e) => {
                set_error(&e.to_string());
                code_of(&e)
            }
        }
    })
}

/// Release a mode-table handle. Null is accepted and ignored.
///
/// # Safety
/// `table` must be null or a handle from `vk_mode_table_new`, released at
/// most once.
#[no_mangle]
pub unsafe extern "C" fn vk_mode_table_free(table: *mut VkModeTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Sample the wave on a commensurate grid at time `t0`, split it with the
/// energy projectors and write the negative-frequency norm fraction.
///
/// # Safety
/// `out_fraction` must point to one writable double.
#[no_mangle]
pub unsafe extern "C" fn vk_separate_volkov(
    px: f64,
    py: f64,
    pz: f64,
    amplitude: f64,
    omega: f64,
    mass: f64,
    samples_per_omega: u32,
    t0: f64,
    out_fraction: *mut f64,
) -> i32 {
    guard(|| {
        if out_fraction.is_null() {
            set_error("output pointer must not be null");
            return VK_ERR_NULL_POINTER;
        }
        let field = PlaneWaveFieldSpec::new(amplitude, omega);
        let result = on_shell(px, py, pz, mass).and_then(|p| {
            let (grid, _) =
                commensurate_volkov_grid(&p, &field, mass, samples_per_omega as usize)?;
            let snap = sample_volkov(&p, &field, mass, grid, t0)?;
            let (_, _, report) = split(&snap)?;
            Ok(report.negative_fraction())
        });
        match result {
            Ok(fraction) => {
                *out_fraction = fraction;
                VK_OK
            }
            Err(e) => {
                set_error(&e.to_string());
                code_of(&e)
            }
        }
    })
}

/// Transfer-matrix scattering coefficients of a piecewise-constant barrier
/// at energy `e`: writes (T_lr, R_l, T_rl, R_r) into `out[0..4]`.
///
/// # Safety
/// `heights` and `widths` must point to `nseg` readable doubles each; `out`
/// must point to 4 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn vk_barrier_coefficients(
    heights: *const f64,
    widths: *const f64,
    nseg: usize,
    e: f64,
    out: *mut f64,
) -> i32 {
    guard(|| {
        if heights.is_null() || widths.is_null() || out.is_null() {
            set_error("null input or output pointer");
            return VK_ERR_NULL_POINTER;
        }
        let segments = (0..nseg)
            .map(|i| Segment {
                height: *heights.add(i),
                width: *widths.add(i),
            })
            .collect();
        let result = BarrierSpec::new(segments).and_then(|spec| scattering_coefficients(&spec, e));
        match result {
            Ok(c) => {
                *out.add(0) = c.t_lr;
                *out.add(1) = c.r_l;
                *out.add(2) = c.t_rl;
                *out.add(3) = c.r_r;
                VK_OK
            }
            Err(err) => {
                set_error(&err.to_string());
                code_of(&err)
            }
        }
    })
}
