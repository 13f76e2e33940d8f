//! Generalized state discrimination for two equiprobable pure qubit states.
//!
//! A pair of signal states with overlap angle `theta` is measured with a
//! three-element POVM built from the orthogonal complements of the signal
//! states after tilting them symmetrically outward by an angle `phi`. The
//! tilt interpolates continuously between unambiguous discrimination
//! (`phi = 0`, no errors) and the minimum-error projective measurement
//! (`phi = pi/4 - theta/2`, no inconclusive outcomes).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric;
use crate::qmath::{Ket2, Op2};

/// Overlaps below this snap to exactly zero so that orthogonal signal pairs
/// carry an exact `c = 0` marker instead of squared rounding noise.
const OVERLAP_SNAP: f64 = 1e-12;

/// The two pure signal states, parameterized by the overlap angle `theta`.
///
/// The first state is pinned to `|0>` and the second to
/// `cos(theta)|0> + sin(theta)|1>`, so `|<psi1|psi2>| = cos(theta)`.
#[derive(Debug, Clone, Copy)]
pub struct SignalPair {
    theta: f64,
    psi1: Ket2,
    psi2: Ket2,
    /// Squared overlap `c = cos^2(theta)`; exactly zero for orthogonal pairs.
    c: f64,
    /// Preparation quality `q = log2(1/c)`, positive infinity when `c = 0`.
    q: f64,
}

impl SignalPair {
    pub fn new(theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta <= std::f64::consts::FRAC_PI_2) {
            return Err(Error::ThetaOutOfRange(theta));
        }
        let psi1 = Ket2::zero();
        let psi2 = Ket2::from_angle(theta);
        let mut overlap = psi1.inner(&psi2).norm();
        if overlap < OVERLAP_SNAP {
            overlap = 0.0;
        }
        let c = overlap * overlap;
        let q = if c == 0.0 { f64::INFINITY } else { -c.log2() };
        Ok(Self {
            theta,
            psi1,
            psi2,
            c,
            q,
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn psi1(&self) -> &Ket2 {
        &self.psi1
    }

    pub fn psi2(&self) -> &Ket2 {
        &self.psi2
    }

    /// `|<psi1|psi2>| = cos(theta)`.
    pub fn overlap(&self) -> f64 {
        self.c.sqrt()
    }

    /// Squared overlap `c`.
    pub fn overlap_sq(&self) -> f64 {
        self.c
    }

    /// Raw preparation quality `log2(1/c)`; positive infinity at `c = 0`.
    pub fn preparation_quality(&self) -> f64 {
        self.q
    }

    /// Largest admissible tilt: the angle at which the tilted states become
    /// orthogonal and the measurement turns projective.
    pub fn phi_med(&self) -> f64 {
        (std::f64::consts::FRAC_PI_4 - 0.5 * self.theta).max(0.0)
    }

    /// Signal states rotated outward by `phi`: the first by `-phi`, the
    /// second by `+phi`, widening the inner angle to `theta + 2 phi`.
    pub fn tilted_states(&self, phi: TiltAngle) -> (Ket2, Ket2) {
        let p = phi.radians();
        (Ket2::from_angle(-p), Ket2::from_angle(self.theta + p))
    }

    /// Builds the three-element tilted POVM at tilt `phi`.
    pub fn build_povm(&self, phi: TiltAngle) -> Result<TiltedPovm> {
        let (t1, t2) = self.tilted_states(phi);
        let overlap = t1.inner(&t2).norm();
        let weight = 1.0 / (1.0 + overlap);
        let dir1 = t2.orthogonal();
        let dir2 = t1.orthogonal();
        let pi1 = Op2::outer(&dir1).scaled(weight);
        let pi2 = Op2::outer(&dir2).scaled(weight);
        let pi0 = Op2::identity() - pi1 - pi2;
        if !pi0.is_psd(1e-12) {
            return Err(Error::PovmNotPositive);
        }
        debug_assert!((pi1 + pi2 + pi0).max_abs_diff(&Op2::identity()) < 1e-10);
        Ok(TiltedPovm {
            pi1,
            pi2,
            pi0,
            weight,
            dir1,
            dir2,
        })
    }

    /// Outcome probabilities in closed form.
    ///
    /// The inconclusive probability comes from completeness,
    /// `P_q = 1 - P_s - P_e`.
    pub fn probs_closed(&self, phi: TiltAngle) -> OutcomeProbs {
        let p = phi.radians();
        let denom = 1.0 + (self.theta + 2.0 * p).cos().abs();
        let p_s = (self.theta + p).sin().powi(2) / denom;
        let p_e = p.sin().powi(2) / denom;
        OutcomeProbs {
            p_s,
            p_e,
            p_q: 1.0 - p_s - p_e,
        }
    }

    /// Outcome probabilities from Born-rule expectations of the POVM
    /// elements, averaged over the two equiprobable signals.
    pub fn probs_operator(&self, povm: &TiltedPovm) -> OutcomeProbs {
        let p_s = 0.5 * (povm.pi1.expectation(&self.psi1) + povm.pi2.expectation(&self.psi2));
        let p_e = 0.5 * (povm.pi2.expectation(&self.psi1) + povm.pi1.expectation(&self.psi2));
        let p_q = 0.5 * (povm.pi0.expectation(&self.psi1) + povm.pi0.expectation(&self.psi2));
        OutcomeProbs { p_s, p_e, p_q }
    }

    /// Minimum-error (projective) discrimination probabilities for equal
    /// priors: `P_e = (1 - sin(theta))/2` with no inconclusive outcome.
    pub fn helstrom_probs(&self) -> OutcomeProbs {
        let s = self.theta.sin();
        OutcomeProbs {
            p_s: 0.5 * (1.0 + s),
            p_e: 0.5 * (1.0 - s),
            p_q: 0.0,
        }
    }

    /// Tilt at which correct and inconclusive probabilities coincide.
    pub fn find_ctp(&self) -> Result<f64> {
        self.crossing(|p| p.p_s - p.p_q)
    }

    /// Tilt at which incorrect and inconclusive probabilities coincide.
    pub fn find_erp(&self) -> Result<f64> {
        self.crossing(|p| p.p_e - p.p_q)
    }

    fn crossing<F>(&self, f: F) -> Result<f64>
    where
        F: Fn(&OutcomeProbs) -> f64,
    {
        let hi = self.phi_med() - 1e-6;
        if hi <= 1e-6 {
            return Err(Error::NoBracket { lo: 1e-6, hi });
        }
        numeric::bisect(
            1e-6,
            hi,
            |p| f(&self.probs_closed(TiltAngle(p))),
            1e-12,
            200,
        )
    }

    /// Rank-1 form of the inconclusive element: weight `w` and direction
    /// `|g>` with `Pi0 = w |g><g|`. The production path derives `Pi0` from
    /// completeness; this form exists for cross-checking it.
    pub fn inconclusive_projector_form(&self, phi: TiltAngle) -> Result<(f64, Ket2)> {
        let (t1, t2) = self.tilted_states(phi);
        let overlap = t1.inner(&t2).norm();
        let weight = 2.0 * overlap / (1.0 + overlap);
        let scale = 1.0 / (2.0 * (1.0 + overlap)).sqrt();
        let gamma = Ket2::new((t1.a0() + t2.a0()) * scale, (t1.a1() + t2.a1()) * scale)?;
        Ok((weight, gamma))
    }
}

/// A validated tilt angle for a given signal pair, in
/// `[0, pi/4 - theta/2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TiltAngle(f64);

impl TiltAngle {
    pub fn new(sp: &SignalPair, phi: f64) -> Result<Self> {
        let max = sp.phi_med();
        if !(-1e-15..=max + 1e-12).contains(&phi) {
            return Err(Error::TiltOutOfRange { phi, max });
        }
        Ok(Self(phi.clamp(0.0, max.max(0.0))))
    }

    pub fn zero() -> Self {
        Self(0.0)
    }

    pub fn radians(&self) -> f64 {
        self.0
    }
}

/// The tilted three-element POVM: `pi1` identifies the first signal, `pi2`
/// the second, `pi0` collects inconclusive outcomes.
#[derive(Debug, Clone)]
pub struct TiltedPovm {
    pub pi1: Op2,
    pub pi2: Op2,
    pub pi0: Op2,
    /// Shared rank-1 coefficient `1/(1 + |<psi2'|psi1'>|)`.
    weight: f64,
    /// Unit detection direction of `pi1` (orthogonal to the tilted second
    /// state).
    dir1: Ket2,
    /// Unit detection direction of `pi2`.
    dir2: Ket2,
}

impl TiltedPovm {
    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn dir1(&self) -> &Ket2 {
        &self.dir1
    }

    pub fn dir2(&self) -> &Ket2 {
        &self.dir2
    }

    /// Born probabilities `[<k|pi1|k>, <k|pi2|k>, <k|pi0|k>]` computed from
    /// the detection directions, so analytically vanishing terms come out
    /// as exact zeros. The inconclusive entry uses completeness.
    pub fn born_conditional(&self, k: &Ket2) -> [f64; 3] {
        let p1 = self.weight * self.dir1.inner(k).norm_sqr();
        let p2 = self.weight * self.dir2.inner(k).norm_sqr();
        [p1, p2, (1.0 - p1 - p2).max(0.0)]
    }
}

/// Correct, incorrect, and inconclusive outcome probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutcomeProbs {
    pub p_s: f64,
    pub p_e: f64,
    pub p_q: f64,
}

impl OutcomeProbs {
    /// Sifting efficiency `P_s + P_e = 1 - P_q`.
    pub fn eta(&self) -> f64 {
        self.p_s + self.p_e
    }
}

/// Accuracy and efficiency of a discrimination operating point, in percent.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DiscriminationMetrics {
    /// Correct detections among conclusive outcomes.
    pub chi: f64,
    /// Conclusive outcomes among all outcomes.
    pub zeta: f64,
}

impl DiscriminationMetrics {
    pub fn from_probs(p: &OutcomeProbs) -> Result<Self> {
        let conclusive = 1.0 - p.p_q;
        if conclusive <= 1e-15 {
            return Err(Error::NoConclusiveOutcomes);
        }
        Ok(Self {
            chi: 100.0 * p.p_s / conclusive,
            zeta: 100.0 * conclusive,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn pair(theta: f64) -> SignalPair {
        SignalPair::new(theta).unwrap()
    }

    fn tilt(sp: &SignalPair, phi: f64) -> TiltAngle {
        TiltAngle::new(sp, phi).unwrap()
    }

    #[test]
    fn signal_pair_at_quarter_pi() {
        let sp = pair(FRAC_PI_4);
        assert!((sp.overlap_sq() - 0.5).abs() < 1e-12);
        assert!((sp.preparation_quality() - 1.0).abs() < 1e-12);
        assert!(sp.psi2().inner(&Ket2::plus()).norm() > 1.0 - 1e-12);
    }

    #[test]
    fn signal_pair_orthogonal_sentinel() {
        let sp = pair(FRAC_PI_2);
        assert_eq!(sp.overlap_sq(), 0.0);
        assert!(sp.preparation_quality().is_infinite());
        assert!(sp.psi2().inner(&Ket2::one()).norm() > 1.0 - 1e-12);
        assert_eq!(sp.phi_med(), 0.0);
    }

    #[test]
    fn signal_pair_generic_overlap() {
        let sp = pair(0.3);
        assert!((sp.overlap_sq() - 0.3f64.cos().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn signal_pair_rejects_out_of_range() {
        assert!(SignalPair::new(0.0).is_err());
        assert!(SignalPair::new(FRAC_PI_2 + 0.01).is_err());
        assert!(SignalPair::new(-0.2).is_err());
    }

    #[test]
    fn zero_tilt_leaves_states_unchanged() {
        let sp = pair(FRAC_PI_4);
        let (t1, t2) = sp.tilted_states(TiltAngle::zero());
        assert!(t1.inner(sp.psi1()).norm() > 1.0 - 1e-12);
        assert!(t2.inner(sp.psi2()).norm() > 1.0 - 1e-12);
    }

    #[test]
    fn full_tilt_gives_orthogonal_states() {
        let sp = pair(FRAC_PI_4);
        let (t1, t2) = sp.tilted_states(tilt(&sp, sp.phi_med()));
        assert!(t1.inner(&t2).norm() < 1e-12);
    }

    #[test]
    fn tilted_overlap_matches_widened_angle() {
        let sp = pair(FRAC_PI_4);
        let (t1, t2) = sp.tilted_states(tilt(&sp, 0.1));
        let inner = t1.inner(&t2).norm();
        assert!((inner - (FRAC_PI_4 + 0.2).cos()).abs() < 1e-12);
        assert!((inner.acos() - 0.98540).abs() < 1e-5);
    }

    #[test]
    fn povm_at_zero_tilt_has_usd_coefficient() {
        let sp = pair(FRAC_PI_4);
        let povm = sp.build_povm(TiltAngle::zero()).unwrap();
        let expect = 1.0 / (1.0 + std::f64::consts::FRAC_1_SQRT_2);
        assert!((povm.weight() - expect).abs() < 1e-12);
        // pi1 is the scaled projector onto the complement of psi2.
        let proj = Op2::outer(&sp.psi2().orthogonal()).scaled(expect);
        assert!(povm.pi1.max_abs_diff(&proj) < 1e-12);
    }

    #[test]
    fn povm_for_orthogonal_pair_is_projective() {
        let sp = pair(FRAC_PI_2);
        let povm = sp.build_povm(TiltAngle::zero()).unwrap();
        assert!(povm.pi0.max_abs_diff(&Op2::zero()) < 1e-12);
    }

    #[test]
    fn povm_elements_complete_and_positive() {
        let sp = pair(FRAC_PI_4);
        let povm = sp.build_povm(tilt(&sp, 0.1)).unwrap();
        for e in [&povm.pi1, &povm.pi2, &povm.pi0] {
            assert!(e.is_psd(1e-12));
        }
        let sum = povm.pi1 + povm.pi2 + povm.pi0;
        assert!(sum.max_abs_diff(&Op2::identity()) < 1e-12);
        assert!(povm.pi1.det().norm() < 1e-12);
        assert!(povm.pi2.det().norm() < 1e-12);
    }

    #[test]
    fn povm_rejects_tilt_outside_domain() {
        let sp = pair(FRAC_PI_4);
        assert!(TiltAngle::new(&sp, sp.phi_med() + 0.05).is_err());
        assert!(TiltAngle::new(&sp, -0.05).is_err());
    }

    #[test]
    #[allow(clippy::approx_constant)] // reference literals, not constants
    fn closed_form_probabilities_at_reference_points() {
        let sp = pair(FRAC_PI_4);
        // Reference tables carry up to ~4e-6 of rounding drift in the
        // inconclusive column; 5e-6 absorbs it.
        let cases = [
            (0.0, (0.292893, 0.0, 0.707107)),
            (0.356915, (0.772152, 0.113924, 0.113924)),
            (0.073953, (0.359635, 0.003422, 0.636946)),
            (0.050389, (0.337118, 0.001554, 0.661328)),
        ];
        for (phi, (ps, pe, pq)) in cases {
            let p = sp.probs_closed(tilt(&sp, phi));
            assert!((p.p_s - ps).abs() < 5e-6, "P_s at phi={phi}: {}", p.p_s);
            assert!((p.p_e - pe).abs() < 5e-6, "P_e at phi={phi}: {}", p.p_e);
            assert!((p.p_q - pq).abs() < 5e-6, "P_q at phi={phi}: {}", p.p_q);
        }
    }

    #[test]
    fn operator_form_agrees_with_closed_form() {
        let sp = pair(FRAC_PI_4);
        for phi in [0.0, 0.05, 0.186997, 0.3, sp.phi_med()] {
            let t = tilt(&sp, phi);
            let povm = sp.build_povm(t).unwrap();
            let a = sp.probs_operator(&povm);
            let b = sp.probs_closed(t);
            assert!((a.p_s - b.p_s).abs() < 1e-12);
            assert!((a.p_e - b.p_e).abs() < 1e-12);
            assert!((a.p_q - b.p_q).abs() < 1e-12);
        }
    }

    #[test]
    fn operator_form_perfect_discrimination_at_pi_half() {
        let sp = pair(FRAC_PI_2);
        let povm = sp.build_povm(TiltAngle::zero()).unwrap();
        let p = sp.probs_operator(&povm);
        assert!((p.p_s - 1.0).abs() < 1e-12);
        assert!(p.p_e.abs() < 1e-12);
        assert!(p.p_q.abs() < 1e-12);
    }

    #[test]
    fn helstrom_reference_values() {
        let sp = pair(FRAC_PI_4);
        let p = sp.helstrom_probs();
        assert!((p.p_s - 0.8536).abs() < 1e-4);
        assert!((p.p_e - 0.1464).abs() < 1e-4);
        assert_eq!(p.p_q, 0.0);

        let p = pair(FRAC_PI_2).helstrom_probs();
        assert!((p.p_s - 1.0).abs() < 1e-12);

        let p = pair(0.3).helstrom_probs();
        assert!((p.p_e - 0.5 * (1.0 - 0.3f64.sin())).abs() < 1e-12);
    }

    #[test]
    fn closed_form_meets_helstrom_at_full_tilt() {
        for theta in [0.3, FRAC_PI_4, 1.2] {
            let sp = pair(theta);
            let p = sp.probs_closed(tilt(&sp, sp.phi_med()));
            let h = sp.helstrom_probs();
            assert!(p.p_q.abs() < 1e-12);
            assert!((p.p_s - h.p_s).abs() < 1e-12);
            assert!((p.p_e - h.p_e).abs() < 1e-12);
        }
    }

    #[test]
    fn ctp_crossing_at_quarter_pi() {
        let sp = pair(FRAC_PI_4);
        let phi = sp.find_ctp().unwrap();
        assert!((phi - 0.186997).abs() < 1e-5);
        let p = sp.probs_closed(tilt(&sp, phi));
        assert!((p.p_s - 0.487656).abs() < 1e-5);
        assert!((p.p_q - 0.487656).abs() < 1e-5);
        assert!((p.p_e - 0.024689).abs() < 1e-5);
    }

    #[test]
    fn erp_crossing_at_quarter_pi() {
        let sp = pair(FRAC_PI_4);
        let phi = sp.find_erp().unwrap();
        assert!((phi - 0.356915).abs() < 1e-5);
        let p = sp.probs_closed(tilt(&sp, phi));
        assert!((p.p_e - 0.113924).abs() < 1e-5);
        assert!((p.p_q - 0.113924).abs() < 1e-5);
    }

    #[test]
    fn crossing_residuals_are_tiny() {
        for theta in [0.6, 1.0] {
            let sp = pair(theta);
            let ctp = sp.find_ctp().unwrap();
            let erp = sp.find_erp().unwrap();
            let pc = sp.probs_closed(tilt(&sp, ctp));
            let pe = sp.probs_closed(tilt(&sp, erp));
            assert!((pc.p_s - pc.p_q).abs() < 1e-9);
            assert!((pe.p_e - pe.p_q).abs() < 1e-9);
        }
    }

    #[test]
    fn crossings_unavailable_for_orthogonal_pair() {
        let sp = pair(FRAC_PI_2);
        assert!(sp.find_ctp().is_err());
        assert!(sp.find_erp().is_err());
    }

    #[test]
    fn metrics_at_named_operating_points() {
        let sp = pair(FRAC_PI_4);
        let erp = sp.probs_closed(tilt(&sp, sp.find_erp().unwrap()));
        let m = DiscriminationMetrics::from_probs(&erp).unwrap();
        assert!((m.chi - 87.14).abs() < 0.02);
        assert!((m.zeta - 88.61).abs() < 0.02);

        let ctp = sp.probs_closed(tilt(&sp, sp.find_ctp().unwrap()));
        let m = DiscriminationMetrics::from_probs(&ctp).unwrap();
        assert!((m.chi - 95.18).abs() < 0.02);
        assert!((m.zeta - 51.23).abs() < 0.02);

        // The minimum-error point: chi equals 100 P_s since nothing is
        // discarded. 50 (1 + sin(pi/4)) = 85.3553...
        let m = DiscriminationMetrics::from_probs(&sp.helstrom_probs()).unwrap();
        assert!((m.chi - 85.355339).abs() < 1e-5);
        assert!((m.zeta - 100.0).abs() < 1e-12);
    }

    #[test]
    fn metrics_undefined_without_conclusive_outcomes() {
        let all_inconclusive = OutcomeProbs {
            p_s: 0.0,
            p_e: 0.0,
            p_q: 1.0,
        };
        assert!(DiscriminationMetrics::from_probs(&all_inconclusive).is_err());
    }

    #[test]
    fn inconclusive_element_matches_rank_one_form() {
        let sp = pair(FRAC_PI_4);
        for phi in [0.0, 0.1, 0.25] {
            let t = tilt(&sp, phi);
            let povm = sp.build_povm(t).unwrap();
            let (w, gamma) = sp.inconclusive_projector_form(t).unwrap();
            let rank_one = Op2::outer(&gamma).scaled(w);
            assert!(povm.pi0.max_abs_diff(&rank_one) < 1e-12);
        }
    }

    #[test]
    fn per_state_conditionals_match_expectations() {
        let sp = pair(0.9);
        let t = tilt(&sp, 0.08);
        let povm = sp.build_povm(t).unwrap();
        for k in [sp.psi1(), sp.psi2()] {
            let v = povm.born_conditional(k);
            assert!((v[0] - povm.pi1.expectation(k)).abs() < 1e-12);
            assert!((v[1] - povm.pi2.expectation(k)).abs() < 1e-12);
            assert!((v[2] - povm.pi0.expectation(k)).abs() < 1e-12);
        }
    }
}
