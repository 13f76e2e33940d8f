//! Seeded Monte Carlo execution of the protocol and a unitary-dilation
//! sampler for the two-qubit measurement circuit.
//!
//! # Reproducibility contract
//!
//! All sampling uses ChaCha8 keyed by the configured seed. Rounds are
//! generated in fixed chunks of 2^16, with chunk `i` drawing from stream
//! `i`; within a round the state bit is drawn first, then one uniform for
//! the outcome. Test-bit selection afterwards runs a partial Fisher-Yates
//! pass over the sifted indices on the reserved stream `u64::MAX`. Results
//! are therefore bit-identical for a given seed regardless of how many
//! threads participate.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gsd::{SignalPair, TiltAngle, TiltedPovm};
use crate::keyrate::{
    hoeffding_delta, key_length_from_counts, preparation_quality, FiniteKeyParams,
};
use crate::qmath::{complete_to_unitary, CVec4, Ket2, Op2, Unitary4};
use num_complex::Complex64;

/// Rounds (or shots) drawn per RNG stream.
const ROUNDS_PER_CHUNK: u64 = 1 << 16;
/// Stream reserved for test-bit selection.
const SELECTION_STREAM: u64 = u64::MAX;

/// Everything needed to reproduce one protocol run or histogram.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SimulationConfig {
    pub theta: f64,
    pub phi: f64,
    pub fk: FiniteKeyParams,
    pub seed: u64,
    /// Shot count for histogram mode.
    pub shots: u64,
}

/// Outcome tallies over all rounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OutcomeCounts {
    pub correct: u64,
    pub incorrect: u64,
    pub inconclusive: u64,
}

impl OutcomeCounts {
    pub fn total(&self) -> u64 {
        self.correct + self.incorrect + self.inconclusive
    }
}

/// Result of one simulated protocol run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationSummary {
    pub counts: OutcomeCounts,
    pub n_sifted: u64,
    /// Empirical error rate over the test sample.
    pub q_hat: f64,
    pub delta: f64,
    pub q_worst_hat: f64,
    /// Extractable key bits: the composable length at the empirical counts,
    /// floored and clamped at zero.
    pub key_length_hat: u64,
    pub r_secure_hat: f64,
}

fn chunk_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Per-state cumulative outcome thresholds: index 0 = correct, 1 = incorrect,
/// 2 = inconclusive.
fn event_tables(sp: &SignalPair, povm: &TiltedPovm) -> [[f64; 2]; 2] {
    let c1 = povm.born_conditional(sp.psi1());
    let c2 = povm.born_conditional(sp.psi2());
    // For the first state, "correct" is the first element; for the second,
    // the second element.
    [[c1[0], c1[0] + c1[1]], [c2[1], c2[1] + c2[0]]]
}

fn sample_outcome(thresholds: &[f64; 2], u: f64) -> u8 {
    if u < thresholds[0] {
        0
    } else if u < thresholds[1] {
        1
    } else {
        2
    }
}

/// Runs the protocol: per round, a uniformly random signal is prepared and
/// measured; inconclusive rounds are sifted out; `n_test` sifted positions
/// are sampled without replacement for parameter estimation; the composable
/// key length is accounted on the remaining bits.
pub fn run_protocol(cfg: &SimulationConfig) -> Result<SimulationSummary> {
    cfg.fk.validate()?;
    let sp = SignalPair::new(cfg.theta)?;
    let tilt = TiltAngle::new(&sp, cfg.phi)?;
    let povm = sp.build_povm(tilt)?;
    let tables = event_tables(&sp, &povm);

    let n_rounds = cfg.fk.n_total;
    let n_chunks = n_rounds.div_ceil(ROUNDS_PER_CHUNK);
    let outcomes: Vec<u8> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = chunk_rng(cfg.seed, chunk);
            let start = chunk * ROUNDS_PER_CHUNK;
            let len = ROUNDS_PER_CHUNK.min(n_rounds - start) as usize;
            let mut out = Vec::with_capacity(len);
            for _ in 0..len {
                let state = usize::from(rng.random::<bool>());
                let u: f64 = rng.random();
                out.push(sample_outcome(&tables[state], u));
            }
            out
        })
        .flatten()
        .collect();

    let mut counts = OutcomeCounts {
        correct: 0,
        incorrect: 0,
        inconclusive: 0,
    };
    let mut sifted: Vec<u32> = Vec::new();
    for (i, &o) in outcomes.iter().enumerate() {
        match o {
            0 => counts.correct += 1,
            1 => counts.incorrect += 1,
            _ => counts.inconclusive += 1,
        }
        if o != 2 {
            sifted.push(i as u32);
        }
    }
    let n_sifted = sifted.len() as u64;
    let n_test = cfg.fk.n_test;
    if n_sifted < n_test {
        return Err(Error::InsufficientSiftedBits {
            sifted: n_sifted,
            needed: n_test,
        });
    }

    // Partial Fisher-Yates over the sifted positions.
    let mut rng = chunk_rng(cfg.seed, SELECTION_STREAM);
    let len = sifted.len();
    let mut test_errors = 0u64;
    for i in 0..n_test as usize {
        let j = i + rng.random_range(0..len - i);
        sifted.swap(i, j);
        if outcomes[sifted[i] as usize] == 1 {
            test_errors += 1;
        }
    }

    let q_hat = test_errors as f64 / n_test as f64;
    let delta = hoeffding_delta(n_test, cfg.fk.eps_pe);
    let q_worst_hat = (q_hat + delta).min(0.5);
    let ell = key_length_from_counts(
        &cfg.fk,
        n_sifted as f64,
        preparation_quality(&sp),
        q_worst_hat,
    );
    let key_length_hat = ell.max(0.0).floor() as u64;

    Ok(SimulationSummary {
        counts,
        n_sifted,
        q_hat,
        delta,
        q_worst_hat,
        key_length_hat,
        r_secure_hat: key_length_hat as f64 / cfg.fk.n_total as f64,
    })
}

/// Two-qubit basis labels assigned to the three measurement events.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DilationOutcomeMap {
    pub correct: &'static str,
    pub incorrect: &'static str,
    pub inconclusive: &'static str,
}

impl Default for DilationOutcomeMap {
    fn default() -> Self {
        Self {
            correct: "00",
            incorrect: "01",
            inconclusive: "10",
        }
    }
}

/// Extracts the scaled rank-1 vector `u` with `m = |u><u|`.
///
/// Returns the zero vector for a vanishing element and an error when the
/// element has rank two.
fn rank_one_vector(m: &Op2) -> Result<[Complex64; 2]> {
    let trace = m.trace().re;
    if trace < 1e-14 {
        return Ok([Complex64::ZERO; 2]);
    }
    let col0 = [m.entry(0, 0), m.entry(1, 0)];
    let col1 = [m.entry(0, 1), m.entry(1, 1)];
    let n0 = (col0[0].norm_sqr() + col0[1].norm_sqr()).sqrt();
    let n1 = (col1[0].norm_sqr() + col1[1].norm_sqr()).sqrt();
    let (col, n) = if n0 >= n1 { (col0, n0) } else { (col1, n1) };
    let v = Ket2::new(col[0] / n, col[1] / n)?;
    let s = trace.sqrt();
    let u = [v.a0() * s, v.a1() * s];
    let rebuilt = Op2::outer(&v).scaled(trace);
    if m.max_abs_diff(&rebuilt) > 1e-10 {
        return Err(Error::NotRankOne);
    }
    Ok(u)
}

/// Dilates the rank-1 POVM into a unitary on system plus ancilla.
///
/// The isometry sends `|psi>` to `sum_i |label_i><u_i|psi>` where
/// `Pi_i = |u_i><u_i|`; completing its columns yields the circuit unitary.
/// Measuring both qubits of `U (|psi> x |0>)` reproduces the Born
/// probability of each element on the corresponding label.
pub fn neumark_unitary(povm: &TiltedPovm) -> Result<(Unitary4, DilationOutcomeMap)> {
    let w = povm.weight().sqrt();
    let u1 = [povm.dir1().a0() * w, povm.dir1().a1() * w];
    let u2 = [povm.dir2().a0() * w, povm.dir2().a1() * w];
    let u0 = rank_one_vector(&povm.pi0)?;

    // Basis index 2*ancilla + system; element labels 00, 01, 10 occupy
    // rows 0, 1, 2.
    let mut cols: Vec<CVec4> = Vec::with_capacity(2);
    for s in 0..2 {
        cols.push([u1[s].conj(), u2[s].conj(), u0[s].conj(), Complex64::ZERO]);
    }
    let unitary = complete_to_unitary(&cols)?;
    Ok((unitary, DilationOutcomeMap::default()))
}

/// Probabilities of the two-qubit labels `00, 01, 10, 11` when measuring
/// `U (|k> x |0>)` in the computational basis.
pub fn dilation_label_probs(u: &Unitary4, k: &Ket2) -> [f64; 4] {
    let embedded: CVec4 = [k.a0(), k.a1(), Complex64::ZERO, Complex64::ZERO];
    let out = u.apply(&embedded);
    [
        out[0].norm_sqr(),
        out[1].norm_sqr(),
        out[2].norm_sqr(),
        out[3].norm_sqr(),
    ]
}

/// Shot tallies per event label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DilationHistogram {
    pub map: DilationOutcomeMap,
    /// Counts in map order: correct, incorrect, inconclusive.
    pub counts: [u64; 3],
    pub shots: u64,
}

/// Samples the dilated measurement for signals drawn equiprobably and bins
/// shots by event label. Deterministic per seed under the same chunked
/// stream layout as [`run_protocol`].
pub fn dilation_histogram(cfg: &SimulationConfig) -> Result<DilationHistogram> {
    let sp = SignalPair::new(cfg.theta)?;
    let tilt = TiltAngle::new(&sp, cfg.phi)?;
    let povm = sp.build_povm(tilt)?;
    // The dilation reproduces the element probabilities exactly, so the
    // event distribution is the per-state conditional table.
    let tables = event_tables(&sp, &povm);

    let n_chunks = cfg.shots.div_ceil(ROUNDS_PER_CHUNK);
    let counts = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = chunk_rng(cfg.seed, chunk);
            let start = chunk * ROUNDS_PER_CHUNK;
            let len = ROUNDS_PER_CHUNK.min(cfg.shots - start);
            let mut c = [0u64; 3];
            for _ in 0..len {
                let state = usize::from(rng.random::<bool>());
                let u: f64 = rng.random();
                c[sample_outcome(&tables[state], u) as usize] += 1;
            }
            c
        })
        .reduce(|| [0u64; 3], |a, b| [a[0] + b[0], a[1] + b[1], a[2] + b[2]]);

    Ok(DilationHistogram {
        map: DilationOutcomeMap::default(),
        counts,
        shots: cfg.shots,
    })
}
