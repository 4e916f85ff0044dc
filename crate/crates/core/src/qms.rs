//! Minimum search over an encoded dataset: the prefix phase-flip oracle, the
//! address diffuser, Grover amplification, and the most-significant-bit
//! descent that drives them.
//!
//! The descent fixes the minimum's bits one at a time. For each position it
//! asks "does any stored value extend the accepted prefix with 0?" by
//! amplifying and measuring the branches whose value starts with the
//! candidate prefix; a verified hit accepts the 0, repeated misses fall back
//! to 1. After all data bits are fixed, the accepted prefix *is* the minimum.
//!
//! Maximum finding needs no machinery of its own: complement every value
//! within its `m`-bit width, search for the minimum, and complement the
//! result back.

use std::fmt;

use rand::{rngs::StdRng, Rng, SeedableRng};
use serde::{Serialize, Serializer};

use crate::baselines::QueryLedger;
use crate::error::Result;
use crate::qram::{build_ux, prepare, Dataset, QramCircuit};
use crate::statevector::{ControlSpec, GateOp, RegisterLayout, StateVector};

/// A candidate bit string over the data register's most significant qubits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Prefix {
    bits: u64,
    len: usize,
}

impl Prefix {
    pub fn empty() -> Self {
        Prefix { bits: 0, len: 0 }
    }

    /// The full `m`-bit pattern of a value, for exact-membership searches.
    pub fn full(value: u64, m: usize) -> Self {
        debug_assert!(m == 64 || value < 1 << m);
        Prefix { bits: value, len: m }
    }

    /// Parse from a string like `"0100"`. Panics on non-binary characters.
    pub fn from_bits(s: &str) -> Self {
        let mut p = Prefix::empty();
        for c in s.chars() {
            match c {
                '0' => p = p.extended(false),
                '1' => p = p.extended(true),
                other => panic!("prefix character {other:?} is not 0 or 1"),
            }
        }
        p
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn extended(&self, bit: bool) -> Self {
        assert!(self.len < 64);
        Prefix { bits: (self.bits << 1) | bit as u64, len: self.len + 1 }
    }

    /// Bit `j`, counted from the most significant end.
    pub fn bit(&self, j: usize) -> bool {
        assert!(j < self.len);
        (self.bits >> (self.len - 1 - j)) & 1 == 1
    }

    /// Does an `m`-bit value start with this prefix? The empty prefix
    /// matches everything.
    pub fn matches(&self, value: u64, m: usize) -> bool {
        assert!(self.len <= m && m <= 64);
        if self.len == 0 {
            return true;
        }
        value >> (m - self.len) == self.bits
    }

    /// The integer this prefix spells out; meaningful once `len == m`.
    pub fn value(&self) -> u64 {
        self.bits
    }
}

impl fmt::Display for Prefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.len {
            write!(f, "{}", u8::from(self.bit(j)))?;
        }
        Ok(())
    }
}

impl Serialize for Prefix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// How many Grover iterations each descent attempt runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum IterationMode {
    /// Always one iteration.
    #[serde(rename = "single")]
    SingleIteration,
    /// The count maximizing the closed-form success probability, with the
    /// marked count taken classically from the dataset (verification mode).
    #[serde(rename = "optimal")]
    OptimalForKnownT,
    /// Randomized schedule for an unknown marked count: attempt `j` draws
    /// uniformly from `[0, ⌈(6/5)^j⌉)`.
    #[serde(rename = "bbht")]
    RandomizedBbht,
}

/// Descent configuration. `retries` is the number of consecutive failed
/// measurements tolerated before a candidate prefix is abandoned.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct QmsConfig {
    pub retries: usize,
    #[serde(rename = "mode")]
    pub iteration_mode: IterationMode,
    #[serde(skip)]
    pub seed: u64,
    /// Optional known dataset value; its leading zeros are accepted without
    /// queries, since the minimum cannot exceed it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warm_start: Option<u64>,
}

impl Default for QmsConfig {
    fn default() -> Self {
        QmsConfig {
            retries: 3,
            iteration_mode: IterationMode::RandomizedBbht,
            seed: 0,
            warm_start: None,
        }
    }
}

impl QmsConfig {
    pub fn new(iteration_mode: IterationMode, seed: u64) -> Self {
        QmsConfig { iteration_mode, seed, ..Default::default() }
    }
}

/// Which way a descent step extended the accepted prefix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Branch {
    /// A measurement confirmed the candidate; the 0-extension stands.
    Accept0,
    /// Every attempt failed the prefix check; the bit is forced to 1.
    Fallback1,
}

/// Record of one descent step (one candidate prefix, over all its retries).
#[derive(Clone, Debug, Serialize)]
pub struct DescentStep {
    #[serde(rename = "prefix")]
    pub tried_prefix: Prefix,
    /// Classically computed marked count, recorded for trace verification.
    #[serde(rename = "t")]
    pub marked_count: usize,
    /// Iterations of the deciding attempt.
    #[serde(rename = "k")]
    pub grover_iterations: usize,
    pub measured_address: usize,
    pub measured_value: u64,
    pub branch: Branch,
    /// Oracle queries summed over every attempt of this step.
    #[serde(rename = "queries")]
    pub oracle_queries: usize,
}

/// Full execution record of one descent.
#[derive(Clone, Debug, Serialize)]
pub struct DescentTrace {
    pub steps: Vec<DescentStep>,
    pub result_value: u64,
    /// Every address holding the result, ascending; empty when the search
    /// failed badly enough to land on a value absent from the QRAM.
    pub result_addresses: Vec<usize>,
    pub total_queries: usize,
    pub config: QmsConfig,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

/// Addresses whose stored value begins with `prefix`, padding included.
pub fn marked_count(ds: &Dataset, prefix: &Prefix) -> usize {
    (0..ds.num_addresses())
        .filter(|&x| prefix.matches(ds.value_at(x), ds.m))
        .count()
}

/// Phase-flip oracle for one candidate prefix: a single multicontrolled-X
/// onto the |−⟩ ancilla, controlled on the leading data qubits with the
/// prefix bits as polarities. Kickback turns the flip into a −1 phase on
/// exactly the matching branches.
///
/// Panics on an empty prefix, which would mark every state.
pub fn build_prefix_oracle(prefix: &Prefix, layout: RegisterLayout) -> GateOp {
    assert!(!prefix.is_empty(), "an empty prefix would mark every state");
    assert!(prefix.len() <= layout.m, "prefix longer than the data register");
    let controls = (0..prefix.len())
        .map(|j| {
            if prefix.bit(j) {
                ControlSpec::on_one(layout.data_qubit(j))
            } else {
                ControlSpec::on_zero(layout.data_qubit(j))
            }
        })
        .collect();
    GateOp::mcx(controls, layout.ancilla_qubit())
}

/// Reflection about the uniform address superposition, identity on the data
/// register (equal to `2|s⟩⟨s| − I` up to a global sign). The central phase
/// flip lands on the all-zero address via zero-polarity controls and the
/// ancilla kickback.
pub fn build_diffuser(layout: RegisterLayout) -> Vec<GateOp> {
    let mut ops: Vec<GateOp> = layout.address_qubits().map(GateOp::h).collect();
    ops.push(GateOp::mcx(
        layout.address_qubits().map(ControlSpec::on_zero).collect(),
        layout.ancilla_qubit(),
    ));
    ops.extend(layout.address_qubits().map(GateOp::h));
    ops
}

/// Reflection about the full prepared state: uncompute the storage circuit,
/// diffuse the address register, recompute the storage.
///
/// Diffusing the address register alone would detach the branches from their
/// stored values once the registers are entangled, and the amplified
/// probabilities would stop following the closed-form Grover rotation.
/// Conjugating by the (self-inverse) storage circuit reflects about the
/// encoded superposition itself, which keeps the address–value correlation
/// intact and makes the marked-state probability exactly
/// `sin²((2k+1)·asin(√(t/N)))`.
pub fn reflect_about_prepared(circ: &QramCircuit) -> Vec<GateOp> {
    let layout = RegisterLayout::new(circ.n, circ.m);
    let mut ops = circ.ops.clone();
    ops.extend(build_diffuser(layout));
    ops.extend_from_slice(&circ.ops);
    ops
}

/// One amplification round: oracle phase flip, then the reflection about the
/// prepared state. Tallies one oracle query.
pub fn grover_iteration(
    state: &mut StateVector,
    oracle: &GateOp,
    reflection: &[GateOp],
    ledger: &mut QueryLedger,
) {
    state.apply(oracle);
    state.apply_all(reflection);
    ledger.count_oracle_queries(1);
}

/// Closed-form probability that measuring after `k` Grover iterations lands
/// on one of `t` marked states out of `n_states`.
pub fn success_probability(t: usize, n_states: usize, k: usize) -> f64 {
    assert!(n_states >= 1 && t <= n_states);
    if t == 0 {
        return 0.0;
    }
    let theta = (t as f64 / n_states as f64).sqrt().asin();
    ((2 * k + 1) as f64 * theta).sin().powi(2)
}

/// Iteration count maximizing the closed-form success probability for a
/// known marked count; `None` when nothing is marked. The two integer
/// neighbors of `(π/4)·√(N/t)` are compared and ties take the cheaper one,
/// so the result can be 0 ("measure without amplifying") when over half the
/// space is marked.
pub fn optimal_iterations(t: usize, n_states: usize) -> Option<usize> {
    if t == 0 {
        return None;
    }
    let raw = std::f64::consts::FRAC_PI_4 * (n_states as f64 / t as f64).sqrt();
    let lo = raw.floor() as usize;
    let hi = raw.ceil() as usize;
    if success_probability(t, n_states, hi) > success_probability(t, n_states, lo) {
        Some(hi)
    } else {
        Some(lo)
    }
}

/// Iterations for one attempt under the configured mode. `retry` is the
/// zero-based attempt index within the current descent step; only the
/// randomized schedule consumes it (and the generator).
pub fn iteration_count<R: Rng + ?Sized>(
    t_estimate: usize,
    n_states: usize,
    mode: IterationMode,
    retry: usize,
    rng: &mut R,
) -> Option<usize> {
    match mode {
        IterationMode::SingleIteration => Some(1),
        IterationMode::OptimalForKnownT => optimal_iterations(t_estimate, n_states),
        IterationMode::RandomizedBbht => {
            let bound = (6.0f64 / 5.0).powi(retry as i32).ceil() as usize;
            Some(rng.gen_range(0..bound.max(1)))
        }
    }
}

/// Run the full descent and return its execution trace.
///
/// Each step re-prepares the encoded state from scratch (measurement
/// destroys the previous one), amplifies the candidate's branches, measures
/// the whole machine, and checks the measured value against the candidate.
/// In [`IterationMode::OptimalForKnownT`] a step whose candidate marks
/// nothing performs a single confirming measurement instead of burning
/// retries.
pub fn run_descent(ds: &Dataset, cfg: &QmsConfig) -> Result<DescentTrace> {
    assert!(cfg.retries >= 1, "retries must be at least 1");
    let layout = ds.layout();
    let n_states = layout.num_addresses();
    let storage = build_ux(ds);
    let reflection = reflect_about_prepared(&storage);
    let mut rng = StdRng::seed_from_u64(cfg.seed);
    let mut ledger = QueryLedger::default();
    let mut steps = Vec::with_capacity(layout.m);
    let mut accepted = Prefix::empty();

    // A warm-start value bounds the minimum from above, so the minimum
    // provably shares its leading zeros; accept those bits without queries.
    if let Some(w) = cfg.warm_start {
        assert!(w < 1 << layout.m, "warm start {w} does not fit in {} bits", layout.m);
        for j in 0..layout.m {
            if (w >> (layout.m - 1 - j)) & 1 == 0 {
                accepted = accepted.extended(false);
            } else {
                break;
            }
        }
    }

    while accepted.len() < layout.m {
        let candidate = accepted.extended(false);
        let t = marked_count(ds, &candidate);
        let oracle = build_prefix_oracle(&candidate, layout);

        let mut step_queries = 0usize;
        let mut grover_iterations = 0usize;
        let mut measured_address = 0usize;
        let mut measured_value = 0u64;
        let mut matched = false;

        for retry in 0..cfg.retries {
            let planned = iteration_count(t, n_states, cfg.iteration_mode, retry, &mut rng);
            let k = planned.unwrap_or(0);
            let mut state = prepare(ds)?;
            for _ in 0..k {
                grover_iteration(&mut state, &oracle, &reflection, &mut ledger);
                step_queries += 1;
            }
            let outcome = state.measure_all(&mut rng);
            grover_iterations = k;
            measured_address = layout.address_of(outcome);
            measured_value = layout.value_of(outcome);
            matched = candidate.matches(measured_value, layout.m);
            if matched || planned.is_none() {
                break;
            }
        }

        steps.push(DescentStep {
            tried_prefix: candidate,
            marked_count: t,
            grover_iterations,
            measured_address,
            measured_value,
            branch: if matched { Branch::Accept0 } else { Branch::Fallback1 },
            oracle_queries: step_queries,
        });
        accepted = if matched { candidate } else { accepted.extended(true) };
    }

    let result_value = accepted.value();
    let result_addresses: Vec<usize> = (0..n_states)
        .filter(|&x| ds.value_at(x) == result_value)
        .collect();
    let warning = ds.is_all_padding().then(|| {
        format!(
            "every stored value equals the padding sentinel {}; the result cannot be \
             distinguished from padding",
            ds.pad_value
        )
    });

    Ok(DescentTrace {
        steps,
        result_value,
        result_addresses,
        total_queries: ledger.oracle_queries as usize,
        config: *cfg,
        seed: cfg.seed,
        warning,
    })
}

/// Search for an exact value with a full-width prefix: true iff some attempt
/// within the retry budget measures a branch holding `value`.
pub fn verify_membership(ds: &Dataset, value: u64, cfg: &QmsConfig) -> Result<bool> {
    assert!(value < 1 << ds.m, "value {value} does not fit in {} bits", ds.m);
    let layout = ds.layout();
    let n_states = layout.num_addresses();
    let full = Prefix::full(value, ds.m);
    let t = marked_count(ds, &full);
    let oracle = build_prefix_oracle(&full, layout);
    let reflection = reflect_about_prepared(&build_ux(ds));
    let mut rng = StdRng::seed_from_u64(cfg.seed);
    let mut ledger = QueryLedger::default();

    for retry in 0..cfg.retries {
        let planned = iteration_count(t, n_states, cfg.iteration_mode, retry, &mut rng);
        let k = planned.unwrap_or(0);
        let mut state = prepare(ds)?;
        for _ in 0..k {
            grover_iteration(&mut state, &oracle, &reflection, &mut ledger);
        }
        let outcome = state.measure_all(&mut rng);
        if layout.value_of(outcome) == value {
            return Ok(true);
        }
        if planned.is_none() {
            break;
        }
    }
    Ok(false)
}
