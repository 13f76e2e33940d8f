//! Key-rate figures of merit: asymptotic, finite-key, and composable, plus
//! the untilted two-state baseline under identical finite-key conditions.
//!
//! The asymptotic rate is the sifted-fraction-weighted difference between an
//! entropic bound on the eavesdropper's ignorance and the reconciliation
//! cost. Finite-key figures widen the estimated error rate by a Hoeffding
//! correction and charge for the sacrificed sample bits, the error-correction
//! leakage, and the composable security penalty.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gsd::{OutcomeProbs, SignalPair, TiltAngle};

/// Shannon binary entropy in bits, with `H(0) = H(1) = 0` by continuity.
///
/// Panics if `x` lies outside `[0, 1]`.
pub fn binary_entropy(x: f64) -> f64 {
    assert!(
        (0.0..=1.0).contains(&x),
        "binary_entropy: argument {x} outside [0, 1]"
    );
    if x == 0.0 || x == 1.0 {
        return 0.0;
    }
    -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
}

/// Quantum bit error rate among conclusive outcomes, `P_e / (1 - P_q)`.
pub fn qber(p: &OutcomeProbs) -> Result<f64> {
    let eta = p.eta();
    if eta <= 0.0 {
        return Err(Error::NoConclusiveOutcomes);
    }
    Ok(p.p_e / eta)
}

/// Hoeffding correction widening the estimated error rate to its worst case
/// with confidence `1 - eps_pe`: `sqrt(ln(2/eps_pe) / (2n))`.
pub fn hoeffding_delta(n_test: u64, eps_pe: f64) -> f64 {
    debug_assert!(n_test >= 1 && eps_pe > 0.0 && eps_pe < 1.0);
    let ln_term = std::f64::consts::LN_2 - eps_pe.ln();
    (ln_term / (2.0 * n_test as f64)).sqrt()
}

/// The finite-key security budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FiniteKeyParams {
    /// Total signals sent.
    pub n_total: u64,
    /// Sifted bits sacrificed for parameter estimation.
    pub n_test: u64,
    /// Failure probability of parameter estimation.
    pub eps_pe: f64,
    /// Secrecy failure probability.
    pub eps_sec: f64,
    /// Correctness failure probability.
    pub eps_cor: f64,
    /// Error-correction efficiency, at least 1.
    pub ec_efficiency: f64,
}

impl FiniteKeyParams {
    pub fn new(
        n_total: u64,
        n_test: u64,
        eps_pe: f64,
        eps_sec: f64,
        eps_cor: f64,
        ec_efficiency: f64,
    ) -> Result<Self> {
        let p = Self {
            n_total,
            n_test,
            eps_pe,
            eps_sec,
            eps_cor,
            ec_efficiency,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_test == 0 || self.n_test >= self.n_total {
            return Err(Error::InvalidFiniteKeyParams(
                "require 0 < n_test < n_total",
            ));
        }
        for eps in [self.eps_pe, self.eps_sec, self.eps_cor] {
            let in_range = eps > 0.0 && eps < 1.0;
            if !in_range {
                return Err(Error::InvalidFiniteKeyParams(
                    "failure probabilities must lie in (0, 1)",
                ));
            }
        }
        let efficient = self.ec_efficiency >= 1.0;
        if !efficient {
            return Err(Error::InvalidFiniteKeyParams(
                "error-correction efficiency must be >= 1",
            ));
        }
        Ok(())
    }

    /// Hoeffding correction for this budget.
    pub fn delta(&self) -> f64 {
        hoeffding_delta(self.n_test, self.eps_pe)
    }

    /// Composable security penalty `log2(2 / (eps_sec^2 eps_cor))` in bits.
    pub fn security_penalty(&self) -> f64 {
        1.0 - 2.0 * self.eps_sec.log2() - self.eps_cor.log2()
    }
}

impl Default for FiniteKeyParams {
    fn default() -> Self {
        Self {
            n_total: 1_000_000,
            n_test: 100_000,
            eps_pe: 1e-10,
            eps_sec: 1e-10,
            eps_cor: 1e-10,
            ec_efficiency: 1.15,
        }
    }
}

/// Preparation quality entering the key-rate formulas: `log2(1/c)`, with the
/// orthogonal-pair sentinel (`c = 0`) capped at one bit per signal.
pub fn preparation_quality(sp: &SignalPair) -> f64 {
    let c = sp.overlap_sq();
    if c == 0.0 {
        1.0
    } else {
        -c.log2()
    }
}

/// Clamps the worst-case error rate into the monotone regime of the binary
/// entropy. Returns the clamped value and whether clamping occurred.
fn worst_case_qber(q: f64, delta: f64) -> (f64, bool) {
    let raw = q + delta;
    if raw > 0.5 {
        (0.5, true)
    } else {
        (raw, false)
    }
}

/// Remaining-bit yield: `m * margin` when bits remain, with no credit from
/// double-negative products when the test sample already exceeds the sifted
/// count.
fn feasible_yield(remaining: f64, margin: f64) -> f64 {
    if remaining >= 0.0 {
        remaining * margin
    } else {
        remaining * margin.max(0.0)
    }
}

/// Devetak-Winter asymptotic rate `eta (q - 2 H(Q))` in bits per signal.
/// May be negative.
pub fn asymptotic_rate(sp: &SignalPair, phi: TiltAngle) -> f64 {
    let p = sp.probs_closed(phi);
    let eta = p.eta();
    let q_ber = p.p_e / eta;
    eta * (preparation_quality(sp) - 2.0 * binary_entropy(q_ber))
}

/// Finite-key rate `(eta - n/N)(q - 2 H(Q_worst))` in bits per signal, with
/// the eavesdropper bound evaluated at the worst-case error rate.
pub fn finite_rate(sp: &SignalPair, phi: TiltAngle, fk: &FiniteKeyParams) -> f64 {
    let p = sp.probs_closed(phi);
    let eta = p.eta();
    let q_ber = p.p_e / eta;
    let (q_worst, _) = worst_case_qber(q_ber, fk.delta());
    let margin = preparation_quality(sp) - 2.0 * binary_entropy(q_worst);
    feasible_yield(eta - fk.n_test as f64 / fk.n_total as f64, margin)
}

/// Composable key length for explicit sifted/test counts: remaining bits
/// times `q - (1 + f) H(Q_worst)`, minus the security penalty. Returned
/// unrounded; negative values are preserved.
pub fn key_length_from_counts(fk: &FiniteKeyParams, n_sifted: f64, q: f64, q_worst: f64) -> f64 {
    let h = binary_entropy(q_worst);
    let margin = q - (1.0 + fk.ec_efficiency) * h;
    feasible_yield(n_sifted - fk.n_test as f64, margin) - fk.security_penalty()
}

/// Composable secure key length at the expected sifted count `eta N`.
pub fn composable_key_length(sp: &SignalPair, phi: TiltAngle, fk: &FiniteKeyParams) -> f64 {
    let p = sp.probs_closed(phi);
    let eta = p.eta();
    let q_ber = p.p_e / eta;
    let (q_worst, _) = worst_case_qber(q_ber, fk.delta());
    key_length_from_counts(
        fk,
        eta * fk.n_total as f64,
        preparation_quality(sp),
        q_worst,
    )
}

/// Composable secure rate `l / N` in bits per signal.
pub fn secure_rate(sp: &SignalPair, phi: TiltAngle, fk: &FiniteKeyParams) -> f64 {
    composable_key_length(sp, phi, fk) / fk.n_total as f64
}

/// Composable rate of the untilted two-state baseline under the same
/// budget: `eta = 1 - cos(theta)`, zero intrinsic error, `Q_worst = delta`.
pub fn b92_secure_rate(sp: &SignalPair, fk: &FiniteKeyParams) -> f64 {
    let eta = 1.0 - sp.overlap();
    let (q_worst, _) = worst_case_qber(0.0, fk.delta());
    key_length_from_counts(
        fk,
        eta * fk.n_total as f64,
        preparation_quality(sp),
        q_worst,
    ) / fk.n_total as f64
}

/// Positivity of each key-rate figure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatePositivity {
    pub asymptotic: bool,
    pub finite: bool,
    pub secure: bool,
}

/// Full per-(theta, phi) record of probabilities, entropies, and rates.
#[derive(Debug, Clone, Serialize)]
pub struct KeyRateReport {
    pub theta: f64,
    pub phi: f64,
    pub probs: OutcomeProbs,
    pub eta: f64,
    pub qber: f64,
    pub delta: f64,
    pub q_worst: f64,
    pub q_worst_clamped: bool,
    pub h_qworst: f64,
    pub r_asymptotic: f64,
    pub r_finite: f64,
    pub key_length: f64,
    pub r_secure: f64,
    pub positive: RatePositivity,
}

/// Evaluates every figure of merit at one operating point.
pub fn key_rate_report(sp: &SignalPair, phi: TiltAngle, fk: &FiniteKeyParams) -> KeyRateReport {
    let probs = sp.probs_closed(phi);
    let eta = probs.eta();
    let q_ber = probs.p_e / eta;
    let delta = fk.delta();
    let (q_worst, q_worst_clamped) = worst_case_qber(q_ber, delta);
    let r_asymptotic = asymptotic_rate(sp, phi);
    let r_finite = finite_rate(sp, phi, fk);
    let key_length = composable_key_length(sp, phi, fk);
    let r_secure = key_length / fk.n_total as f64;
    KeyRateReport {
        theta: sp.theta(),
        phi: phi.radians(),
        probs,
        eta,
        qber: q_ber,
        delta,
        q_worst,
        q_worst_clamped,
        h_qworst: binary_entropy(q_worst),
        r_asymptotic,
        r_finite,
        key_length,
        r_secure,
        positive: RatePositivity {
            asymptotic: r_asymptotic > 0.0,
            finite: r_finite > 0.0,
            secure: key_length > 0.0,
        },
    }
}
