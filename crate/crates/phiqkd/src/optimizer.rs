//! Tilt-angle optimization per key-rate mode, and overlap-angle sweeps
//! producing coverage, difference, and improvement analyses against the
//! untilted baseline.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::gsd::{SignalPair, TiltAngle};
use crate::keyrate::{
    asymptotic_rate, b92_secure_rate, finite_rate, key_rate_report, secure_rate, FiniteKeyParams,
    KeyRateReport,
};
use crate::numeric;

/// Points in the coarse scan that precedes golden-section refinement.
const SCAN_POINTS: usize = 2048;
/// Golden-section bracket width at termination.
const REFINE_TOL: f64 = 1e-9;
/// Baseline rates below this threshold make relative improvement
/// meaningless and are excluded from it.
pub const IMPROVEMENT_FLOOR: f64 = 0.001;

/// Which key-rate figure an optimization targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RateMode {
    Asymptotic,
    Finite,
    Composable,
}

impl RateMode {
    pub fn evaluate(&self, sp: &SignalPair, phi: TiltAngle, fk: &FiniteKeyParams) -> f64 {
        match self {
            RateMode::Asymptotic => asymptotic_rate(sp, phi),
            RateMode::Finite => finite_rate(sp, phi, fk),
            RateMode::Composable => secure_rate(sp, phi, fk),
        }
    }
}

impl std::fmt::Display for RateMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            RateMode::Asymptotic => "asymptotic",
            RateMode::Finite => "finite",
            RateMode::Composable => "composable",
        };
        f.write_str(s)
    }
}

/// Result of a tilt-angle optimization.
#[derive(Debug, Clone, Serialize)]
pub struct OptimumResult {
    pub mode: RateMode,
    pub theta: f64,
    pub phi_opt: f64,
    pub rate: f64,
    pub report: KeyRateReport,
}

/// Maximizes `f` over the tilt domain by a uniform coarse scan followed by
/// golden-section refinement around the best scan point. Returns the
/// maximizer; flat or everywhere-negative curves still yield the argmax.
fn maximize_over_tilt<F>(phi_max: f64, f: F) -> f64
where
    F: Fn(f64) -> f64,
{
    if phi_max <= 0.0 {
        return 0.0;
    }
    let step = phi_max / SCAN_POINTS as f64;
    let mut best_i = 0usize;
    let mut best_v = f64::NEG_INFINITY;
    for i in 0..=SCAN_POINTS {
        let v = f((i as f64 * step).min(phi_max));
        if v > best_v {
            best_v = v;
            best_i = i;
        }
    }
    let lo = step * best_i.saturating_sub(1) as f64;
    let hi = (step * (best_i + 1) as f64).min(phi_max);
    let refined = numeric::golden_max(lo, hi, &f, REFINE_TOL);
    // Keep whichever candidate actually evaluates best.
    let mut best = (best_v, (step * best_i as f64).min(phi_max));
    for cand in [refined, 0.0, phi_max] {
        let v = f(cand);
        if v > best.0 {
            best = (v, cand);
        }
    }
    best.1
}

/// Finds the tilt maximizing the requested rate for this signal pair.
pub fn optimize_phi(sp: &SignalPair, mode: RateMode, fk: &FiniteKeyParams) -> OptimumResult {
    let eval = |phi: f64| {
        let t = TiltAngle::new(sp, phi).expect("scan stays inside the tilt domain");
        mode.evaluate(sp, t, fk)
    };
    let phi_opt = maximize_over_tilt(sp.phi_med(), eval);
    let tilt = TiltAngle::new(sp, phi_opt).expect("optimum stays inside the tilt domain");
    OptimumResult {
        mode,
        theta: sp.theta(),
        phi_opt,
        rate: mode.evaluate(sp, tilt, fk),
        report: key_rate_report(sp, tilt, fk),
    }
}

/// Where the optimized composable rate stands relative to the baseline over
/// the tilt domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DominanceBound {
    /// The rate exceeds the baseline and falls back to it at this tilt.
    CrossesAt(f64),
    /// The rate never exceeds the baseline.
    NeverExceeds,
    /// The rate still meets or exceeds the baseline at the domain edge.
    NeverFallsBack,
}

/// Locates the first descending crossing of the composable rate through the
/// baseline rate, past the optimum.
pub fn dominance_bound(sp: &SignalPair, fk: &FiniteKeyParams) -> DominanceBound {
    let baseline = b92_secure_rate(sp, fk);
    let opt = optimize_phi(sp, RateMode::Composable, fk);
    if opt.rate <= baseline + 1e-12 {
        return DominanceBound::NeverExceeds;
    }
    let hi = sp.phi_med();
    let diff = |phi: f64| {
        let t = TiltAngle::new(sp, phi).expect("scan stays inside the tilt domain");
        secure_rate(sp, t, fk) - baseline
    };
    // Walk toward the domain edge and bracket the first sign change.
    let steps = 1024usize;
    let span = hi - opt.phi_opt;
    let mut prev = opt.phi_opt;
    for i in 1..=steps {
        let x = opt.phi_opt + span * i as f64 / steps as f64;
        if diff(x) <= 0.0 {
            let root = numeric::bisect(prev, x, diff, 1e-12, 200)
                .expect("sign change was just observed on this bracket");
            return DominanceBound::CrossesAt(root);
        }
        prev = x;
    }
    DominanceBound::NeverFallsBack
}

/// The tilt past the optimum where the composable rate falls back to the
/// baseline, if that crossing exists.
pub fn phi_bound(sp: &SignalPair, fk: &FiniteKeyParams) -> Option<f64> {
    match dominance_bound(sp, fk) {
        DominanceBound::CrossesAt(b) => Some(b),
        _ => None,
    }
}

/// Percentage of the tilt domain over which the composable rate beats the
/// baseline. Saturates at 100 when the rate dominates through the whole
/// domain (including the degenerate single-point domain at `theta = pi/2`),
/// and is 0 when the baseline is never exceeded.
pub fn coverage(sp: &SignalPair, fk: &FiniteKeyParams) -> f64 {
    let phi_max = sp.phi_med();
    if phi_max <= 0.0 {
        return 100.0;
    }
    match dominance_bound(sp, fk) {
        DominanceBound::CrossesAt(b) => 100.0 * b / phi_max,
        DominanceBound::NeverExceeds => 0.0,
        DominanceBound::NeverFallsBack => 100.0,
    }
}

/// One overlap angle's worth of sweep output.
#[derive(Debug, Clone, Serialize)]
pub struct ThetaSweepRow {
    pub theta: f64,
    pub phi_opt: f64,
    pub r_phiqkd: f64,
    pub r_b92: f64,
    pub difference: f64,
    /// Relative improvement in percent; absent when the baseline rate is
    /// below [`IMPROVEMENT_FLOOR`].
    pub improvement: Option<f64>,
    pub phi_bound: Option<f64>,
    pub coverage: f64,
}

/// Uniform overlap-angle grid on `(0.01, pi/2]`.
pub fn default_theta_grid(points: usize) -> Vec<f64> {
    let lo = 0.01;
    let hi = std::f64::consts::FRAC_PI_2;
    (1..=points)
        .map(|i| lo + (hi - lo) * i as f64 / points as f64)
        .collect()
}

fn sweep_row(theta: f64, fk: &FiniteKeyParams) -> Result<ThetaSweepRow> {
    let sp = SignalPair::new(theta)?;
    let opt = optimize_phi(&sp, RateMode::Composable, fk);
    let r_b92 = b92_secure_rate(&sp, fk);
    let difference = opt.rate - r_b92;
    let improvement = (r_b92 >= IMPROVEMENT_FLOOR).then(|| 100.0 * difference / r_b92);
    let phi_max = sp.phi_med();
    let (bound, cov) = if phi_max <= 0.0 {
        (None, 100.0)
    } else {
        match dominance_bound(&sp, fk) {
            DominanceBound::CrossesAt(b) => (Some(b), 100.0 * b / phi_max),
            DominanceBound::NeverExceeds => (None, 0.0),
            DominanceBound::NeverFallsBack => (None, 100.0),
        }
    };
    Ok(ThetaSweepRow {
        theta,
        phi_opt: opt.phi_opt,
        r_phiqkd: opt.rate,
        r_b92,
        difference,
        improvement,
        phi_bound: bound,
        coverage: cov,
    })
}

/// Evaluates one sweep row per grid angle. Rows are computed in parallel
/// and returned in input order.
pub fn theta_sweep(grid: &[f64], fk: &FiniteKeyParams) -> Result<Vec<ThetaSweepRow>> {
    grid.par_iter().map(|&theta| sweep_row(theta, fk)).collect()
}

/// Headline numbers extracted from a sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepLandmarks {
    /// Overlap angle and value of the largest rate difference.
    pub max_difference: (f64, f64),
    /// Overlap angle and value of the credible improvement peak: the
    /// interior local maximum of the improvement curve, away from the
    /// positivity-filter boundary where tiny baselines inflate the ratio.
    pub improvement_peak: Option<(f64, f64)>,
    /// Overlap angle and value of the largest optimal tilt.
    pub max_phi_opt: (f64, f64),
    /// Smallest overlap angle at which coverage saturates at 100%.
    pub coverage_saturation: Option<f64>,
}

/// Extracts and locally refines the sweep landmarks.
pub fn sweep_landmarks(rows: &[ThetaSweepRow], fk: &FiniteKeyParams) -> Result<SweepLandmarks> {
    assert!(rows.len() >= 3, "landmark extraction needs a dense sweep");

    let diff_at = |theta: f64| -> f64 {
        let sp = SignalPair::new(theta).expect("grid angle in range");
        optimize_phi(&sp, RateMode::Composable, fk).rate - b92_secure_rate(&sp, fk)
    };
    let improvement_at = |theta: f64| -> f64 {
        let sp = SignalPair::new(theta).expect("grid angle in range");
        let rb = b92_secure_rate(&sp, fk);
        let rp = optimize_phi(&sp, RateMode::Composable, fk).rate;
        100.0 * (rp - rb) / rb
    };
    let phi_opt_at = |theta: f64| -> f64 {
        let sp = SignalPair::new(theta).expect("grid angle in range");
        optimize_phi(&sp, RateMode::Composable, fk).phi_opt
    };

    let refine = |idx: usize, f: &dyn Fn(f64) -> f64| -> (f64, f64) {
        let lo = rows[idx.saturating_sub(1)].theta;
        let hi = rows[(idx + 1).min(rows.len() - 1)].theta;
        let t = numeric::golden_max(lo, hi, f, 1e-9);
        (t, f(t))
    };

    let max_diff_idx = rows
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.difference.total_cmp(&b.1.difference))
        .map(|(i, _)| i)
        .expect("nonempty sweep");
    let max_difference = refine(max_diff_idx, &diff_at);

    // Interior improvement peak: strictly above both neighbors, with both
    // neighbors inside the filtered region.
    let mut peak_idx: Option<usize> = None;
    for i in 1..rows.len() - 1 {
        if let (Some(prev), Some(cur), Some(next)) = (
            rows[i - 1].improvement,
            rows[i].improvement,
            rows[i + 1].improvement,
        ) {
            if cur > prev && cur > next {
                let better = peak_idx
                    .and_then(|j| rows[j].improvement)
                    .is_none_or(|best| cur > best);
                if better {
                    peak_idx = Some(i);
                }
            }
        }
    }
    let improvement_peak = peak_idx.map(|i| refine(i, &improvement_at));

    let max_phi_idx = rows
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.phi_opt.total_cmp(&b.1.phi_opt))
        .map(|(i, _)| i)
        .expect("nonempty sweep");
    let max_phi_opt = refine(max_phi_idx, &phi_opt_at);

    // First saturated row, refined by bisecting the saturation indicator
    // against the previous grid point.
    let saturated = |theta: f64| -> bool {
        let sp = SignalPair::new(theta).expect("grid angle in range");
        coverage(&sp, fk) >= 100.0 - 1e-9
    };
    let coverage_saturation = rows
        .iter()
        .position(|r| r.coverage >= 100.0 - 1e-9)
        .map(|i| {
            if i == 0 {
                return rows[0].theta;
            }
            let (mut lo, mut hi) = (rows[i - 1].theta, rows[i].theta);
            for _ in 0..40 {
                let mid = 0.5 * (lo + hi);
                if saturated(mid) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            hi
        });

    Ok(SweepLandmarks {
        max_difference,
        improvement_peak,
        max_phi_opt,
        coverage_saturation,
    })
}
