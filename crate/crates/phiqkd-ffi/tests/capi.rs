//! Exercises the C ABI surface directly: status codes, out-pointer
//! contracts, and handle lifecycles.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::ffi::CStr;

use phiqkd_ffi::*;

fn defaults() -> PhiqkdFiniteKeyParams {
    let mut p = PhiqkdFiniteKeyParams {
        n_total: 0,
        n_test: 0,
        eps_pe: 0.0,
        eps_sec: 0.0,
        eps_cor: 0.0,
        ec_efficiency: 0.0,
    };
    let status = unsafe { phiqkd_finite_key_defaults(&mut p) };
    assert_eq!(status, PhiqkdStatus::Ok);
    p
}

#[test]
fn version_and_status_messages_are_c_strings() {
    let v = unsafe { CStr::from_ptr(phiqkd_version()) };
    assert!(!v.to_str().unwrap().is_empty());
    let m = unsafe { CStr::from_ptr(phiqkd_status_message(PhiqkdStatus::NoResult)) };
    assert!(m.to_str().unwrap().contains("no result"));
}

#[test]
fn defaults_match_the_documented_budget() {
    let p = defaults();
    assert_eq!(p.n_total, 1_000_000);
    assert_eq!(p.n_test, 100_000);
    assert_eq!(p.eps_pe, 1e-10);
    assert_eq!(p.ec_efficiency, 1.15);
}

#[test]
fn outcome_probs_and_null_contracts() {
    let mut probs = PhiqkdProbs {
        p_s: 0.0,
        p_e: 0.0,
        p_q: 0.0,
    };
    let status = unsafe { phiqkd_outcome_probs(FRAC_PI_4, 0.0, &mut probs) };
    assert_eq!(status, PhiqkdStatus::Ok);
    assert!((probs.p_s - 0.292893).abs() < 1e-6);
    assert_eq!(probs.p_e, 0.0);

    let status = unsafe { phiqkd_outcome_probs(FRAC_PI_4, 0.0, std::ptr::null_mut()) };
    assert_eq!(status, PhiqkdStatus::NullPointer);
    let status = unsafe { phiqkd_outcome_probs(9.0, 0.0, &mut probs) };
    assert_eq!(status, PhiqkdStatus::InvalidArgument);
    let status = unsafe { phiqkd_outcome_probs(FRAC_PI_4, 3.0, &mut probs) };
    assert_eq!(status, PhiqkdStatus::InvalidArgument);
}

#[test]
fn scalar_helpers() {
    let mut h = 0.0;
    assert_eq!(
        unsafe { phiqkd_binary_entropy(0.5, &mut h) },
        PhiqkdStatus::Ok
    );
    assert_eq!(h, 1.0);
    assert_eq!(
        unsafe { phiqkd_binary_entropy(1.5, &mut h) },
        PhiqkdStatus::InvalidArgument
    );

    let mut d = 0.0;
    assert_eq!(
        unsafe { phiqkd_hoeffding_delta(100_000, 1e-10, &mut d) },
        PhiqkdStatus::Ok
    );
    assert!((d - 0.010890).abs() < 1e-6);

    let mut pm = 0.0;
    assert_eq!(
        unsafe { phiqkd_phi_med(FRAC_PI_4, &mut pm) },
        PhiqkdStatus::Ok
    );
    assert!((pm - std::f64::consts::FRAC_PI_8).abs() < 1e-12);
}

#[test]
fn crossings_and_missing_results() {
    let mut phi = 0.0;
    assert_eq!(
        unsafe { phiqkd_find_ctp(FRAC_PI_4, &mut phi) },
        PhiqkdStatus::Ok
    );
    assert!((phi - 0.186997).abs() < 1e-5);
    assert_eq!(
        unsafe { phiqkd_find_erp(FRAC_PI_4, &mut phi) },
        PhiqkdStatus::Ok
    );
    assert!((phi - 0.356915).abs() < 1e-5);
    // No crossing exists for an orthogonal pair.
    assert_eq!(
        unsafe { phiqkd_find_ctp(FRAC_PI_2, &mut phi) },
        PhiqkdStatus::NoResult
    );
}

#[test]
fn key_rate_report_round_trip() {
    let params = defaults();
    let mut report = unsafe { std::mem::zeroed::<PhiqkdKeyRateReport>() };
    let status = unsafe { phiqkd_key_rate_report(FRAC_PI_4, 0.073953, &params, &mut report) };
    assert_eq!(status, PhiqkdStatus::Ok);
    assert!((report.key_length - 181_958.0).abs() < 200.0);
    assert!((report.r_secure - 0.181958).abs() < 2e-4);
    assert!(report.positive_secure);
    assert!(!report.q_worst_clamped);

    let mut baseline = 0.0;
    let status = unsafe { phiqkd_b92_secure_rate(FRAC_PI_4, &params, &mut baseline) };
    assert_eq!(status, PhiqkdStatus::Ok);
    assert!((baseline - 0.156862).abs() < 2e-4);
}

#[test]
fn optimizer_and_coverage() {
    let params = defaults();
    let (mut phi, mut rate) = (0.0, 0.0);
    let status = unsafe {
        phiqkd_optimize_phi(
            FRAC_PI_4,
            PhiqkdRateMode::Composable,
            &params,
            &mut phi,
            &mut rate,
        )
    };
    assert_eq!(status, PhiqkdStatus::Ok);
    assert!((phi - 0.073953).abs() < 5e-4);
    assert!((rate - 0.181958).abs() < 2e-4);

    let mut bound = 0.0;
    assert_eq!(
        unsafe { phiqkd_phi_bound(FRAC_PI_4, &params, &mut bound) },
        PhiqkdStatus::Ok
    );
    assert!((bound - 0.149123).abs() < 5e-4);
    // Deep in the no-key regime there is no crossing to report.
    assert_eq!(
        unsafe { phiqkd_phi_bound(0.05, &params, &mut bound) },
        PhiqkdStatus::NoResult
    );

    let mut cov = 0.0;
    assert_eq!(
        unsafe { phiqkd_coverage(FRAC_PI_4, &params, &mut cov) },
        PhiqkdStatus::Ok
    );
    assert!((cov - 37.97).abs() < 0.2);
}

#[test]
fn povm_handle_lifecycle() {
    let mut handle: *mut PhiqkdPovm = std::ptr::null_mut();
    let status = unsafe { phiqkd_povm_new(FRAC_PI_4, 0.1, &mut handle) };
    assert_eq!(status, PhiqkdStatus::Ok);
    assert!(!handle.is_null());

    let mut sum = [0.0f64; 8];
    for idx in 0..3u32 {
        let mut raw = [0.0f64; 8];
        let status = unsafe { phiqkd_povm_element(handle, idx, raw.as_mut_ptr()) };
        assert_eq!(status, PhiqkdStatus::Ok);
        for (s, r) in sum.iter_mut().zip(raw.iter()) {
            *s += r;
        }
    }
    // The elements sum to the identity.
    let identity = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0];
    for (got, expect) in sum.iter().zip(identity.iter()) {
        assert!((got - expect).abs() < 1e-12);
    }

    let status = unsafe { phiqkd_povm_element(handle, 3, sum.as_mut_ptr()) };
    assert_eq!(status, PhiqkdStatus::InvalidArgument);
    unsafe { phiqkd_povm_free(handle) };
    unsafe { phiqkd_povm_free(std::ptr::null_mut()) };
}

#[test]
fn simulation_matches_native_call_and_reports_shortfall() {
    let params = defaults();
    let mut summary = unsafe { std::mem::zeroed::<PhiqkdSimulationSummary>() };
    let status = unsafe { phiqkd_simulate(FRAC_PI_4, 0.073953, &params, 42, &mut summary) };
    assert_eq!(status, PhiqkdStatus::Ok);
    assert_eq!(
        summary.n_correct + summary.n_incorrect + summary.n_inconclusive,
        params.n_total
    );

    // Identical to the native API under the same seed.
    let native = phiqkd::simulator::run_protocol(&phiqkd::SimulationConfig {
        theta: FRAC_PI_4,
        phi: 0.073953,
        fk: phiqkd::FiniteKeyParams::default(),
        seed: 42,
        shots: 0,
    })
    .unwrap();
    assert_eq!(summary.n_sifted, native.n_sifted);
    assert_eq!(summary.key_length, native.key_length_hat);

    // Consuming more test bits than can sift is an explicit status.
    let mut tight = params;
    tight.n_total = 200_000;
    tight.n_test = 150_000;
    let status = unsafe { phiqkd_simulate(FRAC_PI_4, 0.0, &tight, 42, &mut summary) };
    assert_eq!(status, PhiqkdStatus::InsufficientSiftedBits);
}

#[test]
fn histogram_counts_every_shot() {
    let mut counts = [0u64; 3];
    let status =
        unsafe { phiqkd_dilation_histogram(FRAC_PI_4, 0.0, 9, 50_000, counts.as_mut_ptr()) };
    assert_eq!(status, PhiqkdStatus::Ok);
    assert_eq!(counts.iter().sum::<u64>(), 50_000);
    assert_eq!(counts[1], 0, "no incorrect outcomes at zero tilt");
}

#[test]
fn sweep_handle_lifecycle() {
    let params = defaults();
    let mut handle: *mut PhiqkdSweep = std::ptr::null_mut();
    let status = unsafe { phiqkd_sweep_new(0.7, 0.9, 4, &params, &mut handle) };
    assert_eq!(status, PhiqkdStatus::Ok);
    assert_eq!(unsafe { phiqkd_sweep_len(handle) }, 4);

    let mut row = unsafe { std::mem::zeroed::<PhiqkdSweepRow>() };
    let status = unsafe { phiqkd_sweep_row(handle, 3, &mut row) };
    assert_eq!(status, PhiqkdStatus::Ok);
    assert!((row.theta - 0.9).abs() < 1e-12);
    assert!(row.difference >= -1e-9);

    let status = unsafe { phiqkd_sweep_row(handle, 4, &mut row) };
    assert_eq!(status, PhiqkdStatus::InvalidArgument);
    unsafe { phiqkd_sweep_free(handle) };

    let status = unsafe { phiqkd_sweep_new(0.9, 0.7, 4, &params, &mut handle) };
    assert_eq!(status, PhiqkdStatus::InvalidArgument);
}

#[test]
fn generated_header_exists_and_declares_the_surface() {
    let header = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("include")
        .join("phiqkd.h");
    let text = std::fs::read_to_string(&header).expect("cbindgen header generated at build time");
    for symbol in [
        "phiqkd_outcome_probs",
        "phiqkd_key_rate_report",
        "phiqkd_optimize_phi",
        "phiqkd_simulate",
        "phiqkd_povm_new",
        "phiqkd_sweep_row",
        "PhiqkdStatus",
    ] {
        assert!(text.contains(symbol), "header is missing {symbol}");
    }
}
