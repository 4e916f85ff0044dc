//! QRAM synthesis: planning a dataset's register widths and building the
//! multicontrolled-X circuit that writes each value into the data register
//! entangled with its address.

use crate::error::{Error, Result};
use crate::statevector::{ControlSpec, GateOp, RegisterLayout, StateVector};

fn bit_width(value: u64) -> usize {
    (64 - value.leading_zeros() as usize).max(1)
}

fn address_width(len: usize) -> usize {
    let mut n = 0;
    while (1usize << n) < len {
        n += 1;
    }
    n.max(1)
}

/// A classical dataset planned for QRAM storage.
///
/// Addresses beyond the stored values are padded with the all-ones sentinel
/// `2^m - 1`, which can never win a minimum search unless every stored value
/// already equals it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dataset {
    values: Vec<u64>,
    /// Address-register width; `values.len() <= 2^n`.
    pub n: usize,
    /// Data-register width; every value is `< 2^m`.
    pub m: usize,
    /// Value stored at unoccupied addresses.
    pub pad_value: u64,
}

impl Dataset {
    /// Plan widths from the raw values: `m` is the bit width of the maximum,
    /// `n` the smallest address width that fits the list (both at least 1).
    pub fn plan(raw: &[u64]) -> Result<Self> {
        let max = raw
            .iter()
            .max()
            .ok_or_else(|| Error::InvalidInput("dataset is empty".into()))?;
        Self::with_width(raw, bit_width(*max) as u32)
    }

    /// Plan with an explicit data width (needed when several datasets must
    /// share one value scale, as in the K-means distance tables).
    pub fn with_width(raw: &[u64], m: u32) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::InvalidInput("dataset is empty".into()));
        }
        let m = m as usize;
        if m == 0 || m > 63 {
            return Err(Error::InvalidInput(format!(
                "data width {m} outside the supported 1..=63 bits"
            )));
        }
        let limit = 1u64 << m;
        if let Some(v) = raw.iter().find(|&&v| v >= limit) {
            return Err(Error::InvalidInput(format!(
                "value {v} does not fit in {m} bits"
            )));
        }
        Ok(Dataset {
            values: raw.to_vec(),
            n: address_width(raw.len()),
            m,
            pad_value: limit - 1,
        })
    }

    pub fn layout(&self) -> RegisterLayout {
        RegisterLayout::new(self.n, self.m)
    }

    /// The stored values, without padding.
    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn occupied_len(&self) -> usize {
        self.values.len()
    }

    pub fn num_addresses(&self) -> usize {
        1 << self.n
    }

    /// Value at an address, padded addresses included.
    pub fn value_at(&self, address: usize) -> u64 {
        self.values.get(address).copied().unwrap_or(self.pad_value)
    }

    /// True when every stored value equals the padding sentinel, in which
    /// case a minimum search cannot distinguish data from padding.
    pub fn is_all_padding(&self) -> bool {
        self.values.iter().all(|&v| v == self.pad_value)
    }
}

/// The value-storage circuit: one MCX per set bit per address, controls on
/// the full address register, target in the data register.
#[derive(Clone, Debug, PartialEq)]
pub struct QramCircuit {
    pub ops: Vec<GateOp>,
    pub n: usize,
    pub m: usize,
}

/// Address-register controls selecting basis state `address`.
fn address_controls(address: usize, n: usize) -> Vec<ControlSpec> {
    (0..n)
        .map(|i| {
            if (address >> (n - 1 - i)) & 1 == 1 {
                ControlSpec::on_one(i)
            } else {
                ControlSpec::on_zero(i)
            }
        })
        .collect()
}

/// Synthesize the storage operator for a planned dataset.
pub fn build_ux(ds: &Dataset) -> QramCircuit {
    let layout = ds.layout();
    let mut ops = Vec::new();
    for address in 0..ds.num_addresses() {
        let value = ds.value_at(address);
        for j in 0..ds.m {
            if (value >> (ds.m - 1 - j)) & 1 == 1 {
                ops.push(GateOp::mcx(
                    address_controls(address, ds.n),
                    layout.data_qubit(j),
                ));
            }
        }
    }
    QramCircuit { ops, n: ds.n, m: ds.m }
}

/// Apply a storage circuit to a freshly initialized state.
///
/// Panics when the state's register widths do not match the circuit.
pub fn encode(state: &mut StateVector, circ: &QramCircuit) {
    assert_eq!(
        state.num_qubits(),
        circ.n + circ.m + 1,
        "state has {} qubits but the circuit expects {}",
        state.num_qubits(),
        circ.n + circ.m + 1
    );
    state.apply_all(&circ.ops);
}

/// Initialize and encode: the full preparation every search attempt re-runs.
pub fn prepare(ds: &Dataset) -> Result<StateVector> {
    let mut state = StateVector::new_uniform_with_ancilla(ds.n, ds.m)?;
    encode(&mut state, &build_ux(ds));
    Ok(state)
}

/// Check that the conditional data distribution at every address is a point
/// mass on that address's stored value.
pub fn verify_roundtrip(state: &StateVector, ds: &Dataset) -> bool {
    let layout = ds.layout();
    let register: Vec<usize> = (0..layout.n + layout.m).collect();
    let joint = state.probabilities(&register);
    for address in 0..ds.num_addresses() {
        let base = address << ds.m;
        let total: f64 = joint[base..base + (1 << ds.m)].iter().sum();
        if total <= 0.0 {
            return false;
        }
        let stored = joint[base + ds.value_at(address) as usize];
        if stored / total <= 1.0 - 1e-10 {
            return false;
        }
    }
    true
}
