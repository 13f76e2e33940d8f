//! C ABI over the phiqkd library.
//!
//! Every function returns a [`PhiqkdStatus`] and writes results through out
//! pointers. Aggregate results live behind opaque handles with explicit
//! `_free` functions. All panics are caught at the boundary.

use std::ffi::c_char;
use std::panic::{catch_unwind, UnwindSafe};

use phiqkd::gsd::{DiscriminationMetrics, SignalPair, TiltAngle, TiltedPovm};
use phiqkd::keyrate::{
    b92_secure_rate, binary_entropy, hoeffding_delta, key_rate_report, FiniteKeyParams,
};
use phiqkd::optimizer::{coverage, optimize_phi, phi_bound, theta_sweep, RateMode, ThetaSweepRow};
use phiqkd::simulator::{dilation_histogram, run_protocol, SimulationConfig};
use phiqkd::Error;

/// Result of every C API call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiqkdStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// An argument was outside its domain.
    InvalidArgument = 2,
    /// The computation has no result for these inputs (for example a
    /// missing crossing).
    NoResult = 3,
    /// Fewer sifted bits than the parameter-estimation sample needs.
    InsufficientSiftedBits = 4,
    /// An internal invariant failed.
    Internal = 5,
}

fn status_of(err: &Error) -> PhiqkdStatus {
    match err {
        Error::ThetaOutOfRange(_)
        | Error::TiltOutOfRange { .. }
        | Error::ZeroKet
        | Error::InvalidFiniteKeyParams(_)
        | Error::NonOrthonormalColumns { .. } => PhiqkdStatus::InvalidArgument,
        Error::NoBracket { .. } | Error::NoConclusiveOutcomes => PhiqkdStatus::NoResult,
        Error::InsufficientSiftedBits { .. } => PhiqkdStatus::InsufficientSiftedBits,
        Error::PovmNotPositive | Error::NotRankOne | Error::CompletionFailed => {
            PhiqkdStatus::Internal
        }
    }
}

fn guarded<F>(body: F) -> PhiqkdStatus
where
    F: FnOnce() -> PhiqkdStatus + UnwindSafe,
{
    catch_unwind(body).unwrap_or(PhiqkdStatus::Internal)
}

/// Correct, incorrect, and inconclusive outcome probabilities.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PhiqkdProbs {
    pub p_s: f64,
    pub p_e: f64,
    pub p_q: f64,
}

/// Finite-key security budget.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PhiqkdFiniteKeyParams {
    pub n_total: u64,
    pub n_test: u64,
    pub eps_pe: f64,
    pub eps_sec: f64,
    pub eps_cor: f64,
    pub ec_efficiency: f64,
}

impl PhiqkdFiniteKeyParams {
    fn to_core(self) -> Result<FiniteKeyParams, Error> {
        FiniteKeyParams::new(
            self.n_total,
            self.n_test,
            self.eps_pe,
            self.eps_sec,
            self.eps_cor,
            self.ec_efficiency,
        )
    }
}

/// Which key-rate figure to optimize.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiqkdRateMode {
    Asymptotic = 0,
    Finite = 1,
    Composable = 2,
}

impl From<PhiqkdRateMode> for RateMode {
    fn from(m: PhiqkdRateMode) -> Self {
        match m {
            PhiqkdRateMode::Asymptotic => RateMode::Asymptotic,
            PhiqkdRateMode::Finite => RateMode::Finite,
            PhiqkdRateMode::Composable => RateMode::Composable,
        }
    }
}

/// Flattened key-rate report at one operating point.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PhiqkdKeyRateReport {
    pub theta: f64,
    pub phi: f64,
    pub p_s: f64,
    pub p_e: f64,
    pub p_q: f64,
    pub eta: f64,
    pub qber: f64,
    pub delta: f64,
    pub q_worst: f64,
    pub h_qworst: f64,
    pub r_asymptotic: f64,
    pub r_finite: f64,
    pub key_length: f64,
    pub r_secure: f64,
    pub q_worst_clamped: bool,
    pub positive_asymptotic: bool,
    pub positive_finite: bool,
    pub positive_secure: bool,
}

/// Tally summary of one simulated protocol run.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PhiqkdSimulationSummary {
    pub n_correct: u64,
    pub n_incorrect: u64,
    pub n_inconclusive: u64,
    pub n_sifted: u64,
    pub q_hat: f64,
    pub delta: f64,
    pub q_worst_hat: f64,
    pub key_length: u64,
    pub r_secure: f64,
}

/// One overlap angle of a baseline-comparison sweep. Optional fields are
/// paired with presence flags.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PhiqkdSweepRow {
    pub theta: f64,
    pub phi_opt: f64,
    pub r_phiqkd: f64,
    pub r_b92: f64,
    pub difference: f64,
    pub improvement: f64,
    pub has_improvement: bool,
    pub phi_bound: f64,
    pub has_phi_bound: bool,
    pub coverage: f64,
}

/// Opaque tilted-measurement handle.
pub struct PhiqkdPovm {
    povm: TiltedPovm,
}

/// Opaque sweep-result handle.
pub struct PhiqkdSweep {
    rows: Vec<ThetaSweepRow>,
}

/// Library version as a NUL-terminated static string.
#[no_mangle]
pub extern "C" fn phiqkd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Human-readable description of a status code, as a static string.
#[no_mangle]
pub extern "C" fn phiqkd_status_message(status: PhiqkdStatus) -> *const c_char {
    let msg: &'static [u8] = match status {
        PhiqkdStatus::Ok => b"ok\0",
        PhiqkdStatus::NullPointer => b"null pointer argument\0",
        PhiqkdStatus::InvalidArgument => b"argument outside its domain\0",
        PhiqkdStatus::NoResult => b"no result exists for these inputs\0",
        PhiqkdStatus::InsufficientSiftedBits => b"not enough sifted bits for estimation\0",
        PhiqkdStatus::Internal => b"internal error\0",
    };
    msg.as_ptr() as *const c_char
}

/// Default finite-key budget (N = 10^6, n = 10^5, eps = 1e-10 each,
/// f = 1.15).
///
/// # Safety
/// `out` must point to a writable `PhiqkdFiniteKeyParams`.
#[no_mangle]
pub unsafe extern "C" fn phiqkd_finite_key_defaults(
    out: *mut PhiqkdFiniteKeyParams,
) -> PhiqkdStatus {
    if out.is_null() {
        return PhiqkdStatus::NullPointer;
    }
    let d = FiniteKeyParams::default();
    unsafe {
        *out = PhiqkdFiniteKeyParams {
            n_total: d.n_total,
            n_test: d.n_test,
            eps_pe: d.eps_pe,
            eps_sec: d.eps_sec,
            eps_cor: d.eps_cor,
            ec_efficiency: d.ec_efficiency,
        };
    }
    PhiqkdStatus::Ok
}

/// Shannon binary entropy in bits.
///
/// # Safety
/// `out` must point to a writable `double`.
#[no_mangle]
pub unsafe extern "C" fn phiqkd_binary_entropy(x: f64, out: *mut f64) -> PhiqkdStatus {
    if out.is_null() {
        return PhiqkdStatus::NullPointer;
    }
    if !(0.0..=1.0).contains(&x) {
        return PhiqkdStatus::InvalidArgument;
    }
    unsafe { *out = binary_entropy(x) };
    PhiqkdStatus::Ok
}

/// Hoeffding correction `sqrt(ln(2/eps_pe) / (2 n_test))`.
///
/// # Safety
/// `out` must point to a writable `double`.
#[no_mangle]
pub unsafe extern "C" fn phiqkd_hoeffding_delta(
    n_test: u64,
    eps_pe: f64,
    out: *mut f64,
) -> PhiqkdStatus {
    if out.is_null() {
        return PhiqkdStatus::NullPointer;
    }
    if n_test == 0 || !(eps_pe > 0.0 && eps_pe < 1.0) {
        return PhiqkdStatus::InvalidArgument;
    }
    unsafe { *out = hoeffding_delta(n_test, eps_pe) };
    PhiqkdStatus::Ok
}

fn with_pair_tilt<F>(theta: f64, phi: f64, f: F) -> PhiqkdStatus
where
    F: FnOnce(&SignalPair, TiltAngle) -> PhiqkdStatus + UnwindSafe,
{
    guarded(move || match SignalPair::new(theta) {
        Ok(sp) => match TiltAngle::new(&sp, phi) {
            Ok(t) => f(&sp, t),
            Err(e) => status_of(&e),
        },
        Err(e) => status_of(&e),
    })
}

/// Closed-form outcome probabilities at one operating point.
///
/// # Safety
/// `out` must point to a writable `PhiqkdProbs`.
#[no_mangle]
pub unsafe extern "C" fn phiqkd_outcome_probs(
    theta: f64,
    phi: f64,
    out: *mut PhiqkdProbs,
) -> PhiqkdStatus {
    if out.is_null() {
        return PhiqkdStatus::NullPointer;
    }
    with_pair_tilt(theta, phi, move |sp, t| {
        let p = sp.probs_closed(t);
        unsafe {
            *out = PhiqkdProbs {
                p_s: p.p_s,
                p_e: p.p_e,
                p_q: p.p_q,
            }
        };
        PhiqkdStatus::Ok
    })
}

/// Minimum-error discrimination probabilities for the pair.
///
/// # Safety
/// `out` must point to a writable `PhiqkdProbs`.
#[no_mangle]
pub unsafe extern "C" fn phiqkd_helstrom_probs(theta: f64, out: *mut PhiqkdProbs) -> PhiqkdStatus {
    if out.is_null() {
        return PhiqkdStatus::NullPointer;
    }
    guarded(move || match SignalPair::new(theta) {
        Ok(sp) => {
            let p = sp.helstrom_probs();
            unsafe {
                *out = PhiqkdProbs {
                    p_s: p.p_s,
                    p_e: p.p_e,
                    p_q: p.p_q,
                }
            };
            PhiqkdStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Accuracy and efficiency (percent) at one operating point.
///
/// # Safety
/// `chi` and `zeta` must point to writable `double`s.
#[no_mangle]
pub unsafe extern "C" fn phiqkd_metrics(
    theta: f64,
    phi: f64,
    chi: *mut f64,
    zeta: *mut f64,
) -> PhiqkdStatus {
    if chi.is_null() || zeta.is_null() {
        return PhiqkdStatus::NullPointer;
    }
    with_pair_tilt(
        theta,
        phi,
        move |sp, t| match DiscriminationMetrics::from_probs(&sp.probs_closed(t)) {
            Ok(m) => {
                unsafe {
                    *chi = m.chi;
                    *zeta = m.zeta;
                }
                PhiqkdStatus::Ok
            }
            Err(e) => status_of(&e),
        },
    )
}

/// Largest admissible tilt for the pair.
///
/// # Safety
/// `out` must point to a writable `double`.
#[no_mangle]
pub unsafe extern "C" fn phiqkd_phi_med(theta: f64, out: *mut f64) -> PhiqkdStatus {
    if out.is_null() {
        return PhiqkdStatus::NullPointer;
    }
    guarded(move || match SignalPair::new(theta) {
        Ok(sp) => {
            unsafe { *out = sp.phi_med() };
            PhiqkdStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Tilt where correct and inconclusive probabilities coincide.
///
/// # Safety
/// `out` must point to a writable `double`.
#[no_mangle]
pub unsafe extern "C" fn phiqkd_find_ctp(theta: f64, out: *mut f64) -> PhiqkdStatus {
    if out.is_null() {
        return PhiqkdStatus::NullPointer;
    }
    guarded(
        move || match SignalPair::new(theta).and_then(|sp| sp.find_ctp()) {
            Ok(phi) => {
                unsafe { *out = phi };
                PhiqkdStatus::Ok
            }
            Err(e) => status_of(&e),
        },
    )
}

/// Tilt where incorrect and inconclusive probabilities coincide.
///
/// # Safety
/// `out` must point to a writable `double`.
#[no_mangle]
pub unsafe extern "C" fn phiqkd_find_erp(theta: f64, out: *mut f64) -> PhiqkdStatus {
    if out.is_null() {
        return PhiqkdStatus::NullPointer;
    }
    guarded(
        move || match SignalPair::new(theta).and_then(|sp| sp.find_erp()) {
            Ok(phi) => {
                unsafe { *out = phi };
                PhiqkdStatus::Ok
            }
            Err(e) => status_of(&e),
        },
    )
}

/// Full key-rate report at one operating point.
///
/// # Safety
/// `params` and `out` must point to valid structs.
#[no_mangle]
pub unsafe extern "C" fn phiqkd_key_rate_report(
    theta: f64,
    phi: f64,
    params: *const PhiqkdFiniteKeyParams,
    out: *mut PhiqkdKeyRateReport,
) -> PhiqkdStatus {
    if params.is_null() || out.is_null() {
        return PhiqkdStatus::NullPointer;
    }
    let params = unsafe { *params };
    with_pair_tilt(theta, phi, move |sp, t| match params.to_core() {
        Ok(fk) => {
            let r = key_rate_report(sp, t, &fk);
            unsafe {
                *out = PhiqkdKeyRateReport {
                    theta: r.theta,
                    phi: r.phi,
                    p_s: r.probs.p_s,
                    p_e: r.probs.p_e,
                    p_q: r.probs.p_q,
                    eta: r.eta,
                    qber: r.qber,
                    delta: r.delta,
                    q_worst: r.q_worst,
                    h_qworst: r.h_qworst,
                    r_asymptotic: r.r_asymptotic,
                    r_finite: r.r_finite,
                    key_length: r.key_length,
                    r_secure: r.r_secure,
                    q_worst_clamped: r.q_worst_clamped,
                    positive_asymptotic: r.positive.asymptotic,
                    positive_finite: r.positive.finite,
                    positive_secure: r.positive.secure,
                };
            }
            PhiqkdStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Composable rate of the untilted baseline under the same budget.
///
/// # Safety
/// `params` and `out` must point to valid values.
#[no_mangle]
pub unsafe extern "C" fn phiqkd_b92_secure_rate(
    theta: f64,
    params: *const PhiqkdFiniteKeyParams,
    out: *mut f64,
) -> PhiqkdStatus {
    if params.is_null() || out.is_null() {
        return PhiqkdStatus::NullPointer;
    }
    let params = unsafe { *params };
    guarded(
        move || match SignalPair::new(theta).and_then(|sp| Ok((sp, params.to_core()?))) {
            Ok((sp, fk)) => {
                unsafe { *out = b92_secure_rate(&sp, &fk) };
                PhiqkdStatus::Ok
            }
            Err(e) => status_of(&e),
        },
    )
}

/// Tilt maximizing the requested rate, with the achieved rate.
///
/// # Safety
/// `params`, `phi_opt`, and `rate` must point to valid values.
#[no_mangle]
pub unsafe extern "C" fn phiqkd_optimize_phi(
    theta: f64,
    mode: PhiqkdRateMode,
    params: *const PhiqkdFiniteKeyParams,
    phi_opt: *mut f64,
    rate: *mut f64,
) -> PhiqkdStatus {
    if params.is_null() || phi_opt.is_null() || rate.is_null() {
        return PhiqkdStatus::NullPointer;
    }
    let params = unsafe { *params };
    guarded(
        move || match SignalPair::new(theta).and_then(|sp| Ok((sp, params.to_core()?))) {
            Ok((sp, fk)) => {
                let r = optimize_phi(&sp, mode.into(), &fk);
                unsafe {
                    *phi_opt = r.phi_opt;
                    *rate = r.rate;
                }
                PhiqkdStatus::Ok
            }
            Err(e) => status_of(&e),
        },
    )
}

/// Tilt past the optimum where the composable rate falls back to the
/// baseline. Returns `NoResult` when that crossing does not exist.
///
/// # Safety
/// `params` and `out` must point to valid values.
#[no_mangle]
pub unsafe extern "C" fn phiqkd_phi_bound(
    theta: f64,
    params: *const PhiqkdFiniteKeyParams,
    out: *mut f64,
) -> PhiqkdStatus {
    if params.is_null() || out.is_null() {
        return PhiqkdStatus::NullPointer;
    }
    let params = unsafe { *params };
    guarded(
        move || match SignalPair::new(theta).and_then(|sp| Ok((sp, params.to_core()?))) {
            Ok((sp, fk)) => match phi_bound(&sp, &fk) {
                Some(b) => {
                    unsafe { *out = b };
                    PhiqkdStatus::Ok
                }
                None => PhiqkdStatus::NoResult,
            },
            Err(e) => status_of(&e),
        },
    )
}

/// Percentage of the tilt domain where the composable rate beats the
/// baseline.
///
/// # Safety
/// `params` and `out` must point to valid values.
#[no_mangle]
pub unsafe extern "C" fn phiqkd_coverage(
    theta: f64,
    params: *const PhiqkdFiniteKeyParams,
    out: *mut f64,
) -> PhiqkdStatus {
    if params.is_null() || out.is_null() {
        return PhiqkdStatus::NullPointer;
    }
    let params = unsafe { *params };
    guarded(
        move || match SignalPair::new(theta).and_then(|sp| Ok((sp, params.to_core()?))) {
            Ok((sp, fk)) => {
                unsafe { *out = coverage(&sp, &fk) };
                PhiqkdStatus::Ok
            }
            Err(e) => status_of(&e),
        },
    )
}

/// Builds the tilted measurement and returns an opaque handle.
///
/// # Safety
/// `out` must point to a writable handle pointer. The handle must be
/// released with [`phiqkd_povm_free`].
#[no_mangle]
pub unsafe extern "C" fn phiqkd_povm_new(
    theta: f64,
    phi: f64,
    out: *mut *mut PhiqkdPovm,
) -> PhiqkdStatus {
    if out.is_null() {
        return PhiqkdStatus::NullPointer;
    }
    with_pair_tilt(theta, phi, move |sp, t| match sp.build_povm(t) {
        Ok(povm) => {
            let handle = Box::new(PhiqkdPovm { povm });
            unsafe { *out = Box::into_raw(handle) };
            PhiqkdStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Copies element `index` (0 = identifies the first signal, 1 = the second,
/// 2 = inconclusive) into `out` as row-major `[re, im]` pairs, 8 doubles.
///
/// # Safety
/// `handle` must come from [`phiqkd_povm_new`] and `out` must point to at
/// least 8 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn phiqkd_povm_element(
    handle: *const PhiqkdPovm,
    index: u32,
    out: *mut f64,
) -> PhiqkdStatus {
    if handle.is_null() || out.is_null() {
        return PhiqkdStatus::NullPointer;
    }
    let povm = unsafe { &(*handle).povm };
    let element = match index {
        0 => &povm.pi1,
        1 => &povm.pi2,
        2 => &povm.pi0,
        _ => return PhiqkdStatus::InvalidArgument,
    };
    let slice = unsafe { std::slice::from_raw_parts_mut(out, 8) };
    for r in 0..2 {
        for c in 0..2 {
            let e = element.entry(r, c);
            slice[(r * 2 + c) * 2] = e.re;
            slice[(r * 2 + c) * 2 + 1] = e.im;
        }
    }
    PhiqkdStatus::Ok
}

/// Releases a measurement handle. Null is ignored.
///
/// # Safety
/// `handle` must come from [`phiqkd_povm_new`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn phiqkd_povm_free(handle: *mut PhiqkdPovm) {
    if !handle.is_null() {
        drop(unsafe { Box::from_raw(handle) });
    }
}

/// Runs the seeded protocol simulation.
///
/// # Safety
/// `params` and `out` must point to valid values.
#[no_mangle]
pub unsafe extern "C" fn phiqkd_simulate(
    theta: f64,
    phi: f64,
    params: *const PhiqkdFiniteKeyParams,
    seed: u64,
    out: *mut PhiqkdSimulationSummary,
) -> PhiqkdStatus {
    if params.is_null() || out.is_null() {
        return PhiqkdStatus::NullPointer;
    }
    let params = unsafe { *params };
    guarded(move || {
        let fk = match params.to_core() {
            Ok(fk) => fk,
            Err(e) => return status_of(&e),
        };
        let cfg = SimulationConfig {
            theta,
            phi,
            fk,
            seed,
            shots: 0,
        };
        match run_protocol(&cfg) {
            Ok(s) => {
                unsafe {
                    *out = PhiqkdSimulationSummary {
                        n_correct: s.counts.correct,
                        n_incorrect: s.counts.incorrect,
                        n_inconclusive: s.counts.inconclusive,
                        n_sifted: s.n_sifted,
                        q_hat: s.q_hat,
                        delta: s.delta,
                        q_worst_hat: s.q_worst_hat,
                        key_length: s.key_length_hat,
                        r_secure: s.r_secure_hat,
                    };
                }
                PhiqkdStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Samples the dilation circuit; writes counts for the labels 00, 01, 10.
///
/// # Safety
/// `counts` must point to at least 3 writable `uint64_t`s.
#[no_mangle]
pub unsafe extern "C" fn phiqkd_dilation_histogram(
    theta: f64,
    phi: f64,
    seed: u64,
    shots: u64,
    counts: *mut u64,
) -> PhiqkdStatus {
    if counts.is_null() {
        return PhiqkdStatus::NullPointer;
    }
    guarded(move || {
        let cfg = SimulationConfig {
            theta,
            phi,
            fk: FiniteKeyParams::default(),
            seed,
            shots,
        };
        match dilation_histogram(&cfg) {
            Ok(h) => {
                let slice = unsafe { std::slice::from_raw_parts_mut(counts, 3) };
                slice.copy_from_slice(&h.counts);
                PhiqkdStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Runs a baseline-comparison sweep over `points` overlap angles uniformly
/// spanning `(theta_lo, theta_hi]` and returns an opaque handle.
///
/// # Safety
/// `params` and `out` must point to valid values. The handle must be
/// released with [`phiqkd_sweep_free`].
#[no_mangle]
pub unsafe extern "C" fn phiqkd_sweep_new(
    theta_lo: f64,
    theta_hi: f64,
    points: usize,
    params: *const PhiqkdFiniteKeyParams,
    out: *mut *mut PhiqkdSweep,
) -> PhiqkdStatus {
    if params.is_null() || out.is_null() {
        return PhiqkdStatus::NullPointer;
    }
    let ascending = theta_hi > theta_lo;
    if points == 0 || !ascending {
        return PhiqkdStatus::InvalidArgument;
    }
    let params = unsafe { *params };
    guarded(move || {
        let fk = match params.to_core() {
            Ok(fk) => fk,
            Err(e) => return status_of(&e),
        };
        let grid: Vec<f64> = (1..=points)
            .map(|i| theta_lo + (theta_hi - theta_lo) * i as f64 / points as f64)
            .collect();
        match theta_sweep(&grid, &fk) {
            Ok(rows) => {
                unsafe { *out = Box::into_raw(Box::new(PhiqkdSweep { rows })) };
                PhiqkdStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Number of rows held by a sweep handle.
///
/// # Safety
/// `handle` must come from [`phiqkd_sweep_new`].
#[no_mangle]
pub unsafe extern "C" fn phiqkd_sweep_len(handle: *const PhiqkdSweep) -> usize {
    if handle.is_null() {
        return 0;
    }
    unsafe { (*handle).rows.len() }
}

/// Copies row `index` out of a sweep handle.
///
/// # Safety
/// `handle` must come from [`phiqkd_sweep_new`] and `out` must point to a
/// writable `PhiqkdSweepRow`.
#[no_mangle]
pub unsafe extern "C" fn phiqkd_sweep_row(
    handle: *const PhiqkdSweep,
    index: usize,
    out: *mut PhiqkdSweepRow,
) -> PhiqkdStatus {
    if handle.is_null() || out.is_null() {
        return PhiqkdStatus::NullPointer;
    }
    let rows = unsafe { &(*handle).rows };
    let Some(r) = rows.get(index) else {
        return PhiqkdStatus::InvalidArgument;
    };
    unsafe {
        *out = PhiqkdSweepRow {
            theta: r.theta,
            phi_opt: r.phi_opt,
            r_phiqkd: r.r_phiqkd,
            r_b92: r.r_b92,
            difference: r.difference,
            improvement: r.improvement.unwrap_or(0.0),
            has_improvement: r.improvement.is_some(),
            phi_bound: r.phi_bound.unwrap_or(0.0),
            has_phi_bound: r.phi_bound.is_some(),
            coverage: r.coverage,
        };
    }
    PhiqkdStatus::Ok
}

/// Releases a sweep handle. Null is ignored.
///
/// # Safety
/// `handle` must come from [`phiqkd_sweep_new`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn phiqkd_sweep_free(handle: *mut PhiqkdSweep) {
    if !handle.is_null() {
        drop(unsafe { Box::from_raw(handle) });
    }
}
