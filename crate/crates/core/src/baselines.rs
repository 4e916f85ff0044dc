//! Classical minimum-search references with comparison counters, a
//! query-count model of threshold-based quantum minimum finding, and the
//! benchmark sweep that compares them all against the descent.

use std::fmt::Write as _;
use std::path::Path;

use rand::{rngs::StdRng, Rng, SeedableRng};
#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::qms::{run_descent, QmsConfig};
use crate::qram::Dataset;
use crate::statevector::MAX_QUBITS;

/// Instrumentation counters shared by the quantum and classical paths.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct QueryLedger {
    /// Grover oracle applications.
    pub oracle_queries: u64,
    /// Classical value comparisons.
    pub comparisons: u64,
}

impl QueryLedger {
    pub fn count_oracle_queries(&mut self, k: u64) {
        self.oracle_queries += k;
    }

    pub fn count_comparisons(&mut self, k: u64) {
        self.comparisons += k;
    }
}

/// Linear scan, the optimal classical minimum finder: exactly `N − 1`
/// comparisons. Returns the minimum and its first index.
pub fn classical_min_scan(values: &[u64], ledger: &mut QueryLedger) -> Result<(u64, usize)> {
    let (&first, rest) = values
        .split_first()
        .ok_or_else(|| Error::InvalidInput("cannot scan an empty list".into()))?;
    let mut best = first;
    let mut best_index = 0;
    for (i, &v) in rest.iter().enumerate() {
        ledger.count_comparisons(1);
        if v < best {
            best = v;
            best_index = i + 1;
        }
    }
    Ok((best, best_index))
}

/// Pairwise tournament computing minimum and maximum together in
/// `⌈3N/2⌉ − 2` comparisons.
pub fn classical_minmax_pairwise(values: &[u64], ledger: &mut QueryLedger) -> Result<(u64, u64)> {
    if values.is_empty() {
        return Err(Error::InvalidInput("cannot scan an empty list".into()));
    }
    let (mut min, mut max, start) = if values.len().is_multiple_of(2) {
        ledger.count_comparisons(1);
        if values[0] <= values[1] {
            (values[0], values[1], 2)
        } else {
            (values[1], values[0], 2)
        }
    } else {
        (values[0], values[0], 1)
    };
    for pair in values[start..].chunks_exact(2) {
        ledger.count_comparisons(3);
        let (lo, hi) = if pair[0] <= pair[1] {
            (pair[0], pair[1])
        } else {
            (pair[1], pair[0])
        };
        if lo < min {
            min = lo;
        }
        if hi > max {
            max = hi;
        }
    }
    Ok((min, max))
}

/// Query-count model of threshold-descent minimum finding: each round
/// charges `⌈√(N/t)⌉` oracle queries for the `t` elements strictly below the
/// current threshold, then jumps to a uniformly random one of them. Stops
/// when nothing is below the threshold, which is then the true minimum.
///
/// This is an accounting model, not a circuit; it exists to put a
/// query-count curve next to the descent's.
pub fn durr_hoyer_reference(values: &[u64], seed: u64, ledger: &mut QueryLedger) -> Result<u64> {
    if values.is_empty() {
        return Err(Error::InvalidInput("cannot search an empty list".into()));
    }
    let mut rng = StdRng::seed_from_u64(seed);
    let mut threshold = values[rng.gen_range(0..values.len())];
    loop {
        let below: Vec<u64> = values.iter().copied().filter(|&v| v < threshold).collect();
        if below.is_empty() {
            return Ok(threshold);
        }
        let queries = (values.len() as f64 / below.len() as f64).sqrt().ceil() as u64;
        ledger.count_oracle_queries(queries);
        threshold = below[rng.gen_range(0..below.len())];
    }
}

/// One row of the complexity-comparison sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BenchRecord {
    /// Dataset size `N = 2^n`.
    pub n_states: usize,
    /// Value bit width.
    pub m: u32,
    /// Plain-scan comparisons: `N − 1`.
    pub classical_lo: u64,
    /// Pairwise min-max comparisons: `⌈3N/2⌉ − 2`.
    pub classical_hi: u64,
    /// Descent oracle queries, averaged over the trials.
    pub quantum_queries: f64,
    /// Bit-width constant of the run.
    pub c_q: u32,
}

/// Sweep dataset sizes `N = 2^n` for each address width in `n_range`,
/// running `trials` random `m`-bit datasets per width through the randomized
/// descent and the instrumented classical scans.
///
/// Trials derive their seeds as `seed + trial index`, so the sweep is
/// deterministic regardless of how the trials are scheduled.
pub fn bench_sweep(n_range: &[usize], m: u32, trials: usize, seed: u64) -> Result<Vec<BenchRecord>> {
    if n_range.is_empty() || trials == 0 {
        return Err(Error::InvalidInput("empty sweep".into()));
    }
    let mut widths = n_range.to_vec();
    widths.sort_unstable();
    widths.dedup();
    for &n in &widths {
        let total = n + m as usize + 1;
        if n == 0 || total > MAX_QUBITS {
            return Err(Error::ResourceLimit(format!(
                "address width {n} with {m}-bit values needs {total} qubits (cap {MAX_QUBITS})"
            )));
        }
    }

    let mut records = Vec::with_capacity(widths.len());
    for &n in &widths {
        let run_trial = |trial: usize| -> Result<(usize, u64, u64)> {
            let mut rng = StdRng::seed_from_u64(seed.wrapping_add(trial as u64));
            let values: Vec<u64> = (0..1usize << n)
                .map(|_| rng.gen_range(0..1u64 << m))
                .collect();
            let ds = Dataset::with_width(&values, m)?;
            let mut scan_ledger = QueryLedger::default();
            classical_min_scan(&values, &mut scan_ledger)?;
            let mut pairwise_ledger = QueryLedger::default();
            classical_minmax_pairwise(&values, &mut pairwise_ledger)?;
            let cfg = QmsConfig { seed: rng.gen(), ..Default::default() };
            let trace = run_descent(&ds, &cfg)?;
            Ok((
                trace.total_queries,
                scan_ledger.comparisons,
                pairwise_ledger.comparisons,
            ))
        };

        #[cfg(feature = "parallel")]
        let outcomes = (0..trials)
            .into_par_iter()
            .map(run_trial)
            .collect::<Result<Vec<_>>>()?;
        #[cfg(not(feature = "parallel"))]
        let outcomes = (0..trials).map(run_trial).collect::<Result<Vec<_>>>()?;

        let mean = outcomes.iter().map(|o| o.0 as f64).sum::<f64>() / trials as f64;
        records.push(BenchRecord {
            n_states: 1 << n,
            m,
            classical_lo: outcomes[0].1,
            classical_hi: outcomes[0].2,
            quantum_queries: mean,
            c_q: m,
        });
    }
    Ok(records)
}

/// Render sweep records as CSV: optional leading `#` metadata line, a fixed
/// header, one row per record.
pub fn format_bench_csv(records: &[BenchRecord], comment: Option<&str>) -> Result<String> {
    if records.is_empty() {
        return Err(Error::InvalidInput("no benchmark records to write".into()));
    }
    let mut out = String::new();
    if let Some(c) = comment {
        let _ = writeln!(out, "# {c}");
    }
    let _ = writeln!(out, "N,m,classical_lo,classical_hi,quantum_queries,c_q");
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{:.4},{}",
            r.n_states, r.m, r.classical_lo, r.classical_hi, r.quantum_queries, r.c_q
        );
    }
    Ok(out)
}

/// Write the CSV rendering to a file.
pub fn emit_bench_csv(records: &[BenchRecord], comment: Option<&str>, path: &Path) -> Result<()> {
    let csv = format_bench_csv(records, comment)?;
    std::fs::write(path, csv)?;
    Ok(())
}
