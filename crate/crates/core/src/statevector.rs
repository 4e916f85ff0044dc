//! Dense statevector simulator with exactly the gate set the search circuits
//! need: Hadamard, X, polarity-controlled multicontrolled-X, and seeded
//! computational-basis measurement.
//!
//! # Register convention
//!
//! Qubit 0 is the most significant bit of the basis-state index. A machine
//! of `n` address qubits and `m` data qubits is laid out top to bottom as
//! `[address (n) | data (m) | ancilla (1)]`, so a basis index decomposes as
//! `(address << (m + 1)) | (value << 1) | ancilla_bit`. [`RegisterLayout`]
//! captures this arithmetic so callers never touch raw shifts.

mod kernels;

use num_complex::Complex64;
use rand::Rng;
use rand::{rngs::StdRng, SeedableRng};

use crate::error::{Error, Result};

/// Hard cap on simulated qubits (16 bytes per amplitude; 26 qubits = 1 GiB).
pub const MAX_QUBITS: usize = 26;

/// Drift tolerance on the squared norm before measurement refuses a state.
const NORM_TOLERANCE: f64 = 1e-8;

/// Whether a control fires on |1⟩ or on |0⟩.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Polarity {
    ControlOnOne,
    ControlOnZero,
}

/// One control qubit of a multicontrolled gate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ControlSpec {
    pub qubit: usize,
    pub polarity: Polarity,
}

impl ControlSpec {
    pub fn on_one(qubit: usize) -> Self {
        ControlSpec { qubit, polarity: Polarity::ControlOnOne }
    }

    pub fn on_zero(qubit: usize) -> Self {
        ControlSpec { qubit, polarity: Polarity::ControlOnZero }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GateKind {
    H,
    X,
    Mcx,
}

/// A gate instance: kind, target, and (for MCX) its polarity controls.
#[derive(Clone, Debug, PartialEq)]
pub struct GateOp {
    pub kind: GateKind,
    pub target: usize,
    pub controls: Vec<ControlSpec>,
}

impl GateOp {
    pub fn h(target: usize) -> Self {
        GateOp { kind: GateKind::H, target, controls: Vec::new() }
    }

    pub fn x(target: usize) -> Self {
        GateOp { kind: GateKind::X, target, controls: Vec::new() }
    }

    /// Multicontrolled-X. Panics on duplicate controls or a target that is
    /// also a control.
    pub fn mcx(controls: Vec<ControlSpec>, target: usize) -> Self {
        for (i, c) in controls.iter().enumerate() {
            assert!(c.qubit != target, "mcx target {target} is also a control");
            assert!(
                controls[..i].iter().all(|prev| prev.qubit != c.qubit),
                "mcx control qubit {} listed twice",
                c.qubit
            );
        }
        GateOp { kind: GateKind::Mcx, target, controls }
    }

    fn max_qubit(&self) -> usize {
        self.controls
            .iter()
            .map(|c| c.qubit)
            .chain(std::iter::once(self.target))
            .max()
            .unwrap()
    }
}

/// Index arithmetic for the `[address | data | ancilla]` register layout.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RegisterLayout {
    /// Address-register width.
    pub n: usize,
    /// Data-register width.
    pub m: usize,
}

impl RegisterLayout {
    pub fn new(n: usize, m: usize) -> Self {
        RegisterLayout { n, m }
    }

    pub fn total_qubits(&self) -> usize {
        self.n + self.m + 1
    }

    pub fn num_addresses(&self) -> usize {
        1 << self.n
    }

    /// Address qubits are 0..n.
    pub fn address_qubits(&self) -> std::ops::Range<usize> {
        0..self.n
    }

    /// Data qubit `j` holds the j-th most significant value bit.
    pub fn data_qubit(&self, j: usize) -> usize {
        debug_assert!(j < self.m);
        self.n + j
    }

    pub fn ancilla_qubit(&self) -> usize {
        self.n + self.m
    }

    pub fn address_of(&self, index: usize) -> usize {
        index >> (self.m + 1)
    }

    pub fn value_of(&self, index: usize) -> u64 {
        ((index >> 1) & ((1 << self.m) - 1)) as u64
    }

    pub fn index_of(&self, address: usize, value: u64, ancilla: usize) -> usize {
        (address << (self.m + 1)) | ((value as usize) << 1) | ancilla
    }
}

/// Normalized complex amplitudes over `2^num_qubits` basis states.
#[derive(Clone, Debug)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    fn alloc(num_qubits: usize) -> Result<Vec<Complex64>> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(Error::ResourceLimit(format!(
                "cannot simulate {num_qubits} qubits (supported range: 1..={MAX_QUBITS})"
            )));
        }
        Ok(vec![Complex64::new(0.0, 0.0); 1 << num_qubits])
    }

    /// The computational basis state `|index⟩`.
    pub fn basis_state(num_qubits: usize, index: usize) -> Result<Self> {
        let mut amps = Self::alloc(num_qubits)?;
        assert!(index < amps.len(), "basis index {index} out of range");
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { num_qubits, amps })
    }

    /// The search machine's initial state: uniform superposition on the
    /// address register, all-zero data register, ancilla in |−⟩.
    pub fn new_uniform_with_ancilla(n: usize, m: usize) -> Result<Self> {
        assert!(n >= 1 && m >= 1, "register widths must be at least 1");
        let layout = RegisterLayout::new(n, m);
        let mut amps = Self::alloc(layout.total_qubits())?;
        // 1/sqrt(2^n) for the superposition times 1/sqrt(2) for |−⟩;
        // exact in binary floating point.
        let a = 0.5f64.powi(n as i32 + 1).sqrt();
        for address in 0..layout.num_addresses() {
            let base = layout.index_of(address, 0, 0);
            amps[base] = Complex64::new(a, 0.0);
            amps[base | 1] = Complex64::new(-a, 0.0);
        }
        Ok(StateVector { num_qubits: layout.total_qubits(), amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    /// Number of amplitudes (never zero).
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    /// Index-bit position of a qubit (qubit 0 is the most significant).
    fn bitpos(&self, qubit: usize) -> usize {
        assert!(qubit < self.num_qubits, "qubit {qubit} out of range");
        self.num_qubits - 1 - qubit
    }

    /// Apply one gate in place.
    pub fn apply(&mut self, op: &GateOp) {
        assert!(
            op.max_qubit() < self.num_qubits,
            "gate touches qubit {} but the state has {} qubits",
            op.max_qubit(),
            self.num_qubits
        );
        let target_pos = self.bitpos(op.target);
        match op.kind {
            GateKind::H => kernels::apply_h(&mut self.amps, target_pos),
            GateKind::X => kernels::apply_x(&mut self.amps, target_pos),
            GateKind::Mcx => {
                let mut ones = 0usize;
                let mut zeros = 0usize;
                for c in &op.controls {
                    match c.polarity {
                        Polarity::ControlOnOne => ones |= 1 << self.bitpos(c.qubit),
                        Polarity::ControlOnZero => zeros |= 1 << self.bitpos(c.qubit),
                    }
                }
                kernels::apply_mcx(&mut self.amps, ones, zeros, target_pos);
            }
        }
    }

    pub fn apply_all(&mut self, ops: &[GateOp]) {
        for op in ops {
            self.apply(op);
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        kernels::norm_sqr_sum(&self.amps)
    }

    /// Marginal distribution over the listed qubits; the first listed qubit
    /// becomes the most significant bit of the outcome index. Sums to 1 for
    /// a normalized state.
    pub fn probabilities(&self, qubits: &[usize]) -> Vec<f64> {
        assert!(!qubits.is_empty(), "qubit subset must be nonempty");
        let mut bitpos = Vec::with_capacity(qubits.len());
        for (i, &q) in qubits.iter().enumerate() {
            assert!(
                qubits[..i].iter().all(|&prev| prev != q),
                "qubit {q} listed twice"
            );
            bitpos.push(self.bitpos(q));
        }
        kernels::marginal(&self.amps, &bitpos)
    }

    /// Draw a basis index from the outcome distribution without collapsing.
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut last_nonzero = 0usize;
        for (i, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr();
            if p > 0.0 {
                last_nonzero = i;
            }
            acc += p;
            if acc > u {
                return i;
            }
        }
        // Rounding can leave acc marginally below u; fall back to the last
        // outcome that carries probability.
        last_nonzero
    }

    /// Measure every qubit in the computational basis, collapsing the state
    /// to the observed basis state. Panics if the state has drifted off
    /// normalization.
    pub fn measure_all<R: Rng + ?Sized>(&mut self, rng: &mut R) -> usize {
        let norm = self.norm_sqr();
        assert!(
            (norm - 1.0).abs() < NORM_TOLERANCE,
            "measurement on unnormalized state (|ψ|² = {norm})"
        );
        let outcome = self.sample_index(rng);
        self.amps.iter_mut().for_each(|a| *a = Complex64::new(0.0, 0.0));
        self.amps[outcome] = Complex64::new(1.0, 0.0);
        outcome
    }

    /// [`measure_all`](Self::measure_all) with a one-shot seeded generator.
    pub fn measure_all_seeded(&mut self, seed: u64) -> usize {
        let mut rng = StdRng::seed_from_u64(seed);
        self.measure_all(&mut rng)
    }
}
