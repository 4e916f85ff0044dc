//! Amplitude-array kernels behind [`StateVector`](super::StateVector).
//!
//! Every kernel has a sequential form; with the `parallel` feature the large
//! cases dispatch to rayon. Parallel results are bit-identical to the
//! sequential ones: gate kernels touch disjoint amplitude pairs, and
//! reductions use a fixed chunk shape in both builds so floating-point
//! summation order never depends on the thread schedule.

use num_complex::Complex64;
#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Below this many amplitudes (or independent work items) dispatching to
/// rayon costs more than it saves, especially when benchmark trials or
/// per-point searches already occupy the pool; smaller states run their
/// gates sequentially inside whatever outer parallelism exists.
#[cfg(feature = "parallel")]
const PAR_MIN_LEN: usize = 1 << 18;

/// Fixed reduction chunk so sums are schedule-independent.
const SUM_CHUNK: usize = 1 << 12;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

#[inline(always)]
fn h_pair(a: &mut Complex64, b: &mut Complex64) {
    let (x, y) = (*a, *b);
    *a = (x + y) * FRAC_1_SQRT_2;
    *b = (x - y) * FRAC_1_SQRT_2;
}

fn h_block(chunk: &mut [Complex64], step: usize) {
    let (lo, hi) = chunk.split_at_mut(step);
    for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
        h_pair(a, b);
    }
}

/// Hadamard on the index bit at `bitpos`.
pub(crate) fn apply_h(amps: &mut [Complex64], bitpos: usize) {
    let step = 1usize << bitpos;
    #[cfg(feature = "parallel")]
    if amps.len() >= PAR_MIN_LEN {
        if step >= SUM_CHUNK {
            // Few huge blocks (high bit): split each block's halves into
            // matching sub-chunks so tasks stay coarse.
            for chunk in amps.chunks_mut(2 * step) {
                let (lo, hi) = chunk.split_at_mut(step);
                lo.par_chunks_mut(SUM_CHUNK)
                    .zip(hi.par_chunks_mut(SUM_CHUNK))
                    .for_each(|(l, h)| {
                        for (a, b) in l.iter_mut().zip(h.iter_mut()) {
                            h_pair(a, b);
                        }
                    });
            }
        } else {
            amps.par_chunks_mut(SUM_CHUNK)
                .for_each(|chunk| {
                    for block in chunk.chunks_mut(2 * step) {
                        h_block(block, step);
                    }
                });
        }
        return;
    }
    for chunk in amps.chunks_mut(2 * step) {
        h_block(chunk, step);
    }
}

fn x_block(chunk: &mut [Complex64], step: usize) {
    let (lo, hi) = chunk.split_at_mut(step);
    lo.swap_with_slice(hi);
}

/// Pauli-X on the index bit at `bitpos`.
pub(crate) fn apply_x(amps: &mut [Complex64], bitpos: usize) {
    let step = 1usize << bitpos;
    #[cfg(feature = "parallel")]
    if amps.len() >= PAR_MIN_LEN {
        if step >= SUM_CHUNK {
            for chunk in amps.chunks_mut(2 * step) {
                let (lo, hi) = chunk.split_at_mut(step);
                lo.par_chunks_mut(SUM_CHUNK)
                    .zip(hi.par_chunks_mut(SUM_CHUNK))
                    .for_each(|(l, h)| l.swap_with_slice(h));
            }
        } else {
            amps.par_chunks_mut(SUM_CHUNK).for_each(|chunk| {
                for block in chunk.chunks_mut(2 * step) {
                    x_block(block, step);
                }
            });
        }
        return;
    }
    for chunk in amps.chunks_mut(2 * step) {
        x_block(chunk, step);
    }
}

/// Multicontrolled-X as a conditional amplitude permutation.
///
/// `ones` / `zeros` are index-bit masks that must be 1 / 0 for the target
/// flip to fire; `tpos` is the target's index-bit position. The masks are
/// disjoint and exclude the target bit (enforced by the caller).
pub(crate) fn apply_mcx(amps: &mut [Complex64], ones: usize, zeros: usize, tpos: usize) {
    let tmask = 1usize << tpos;
    let fixed = ones | zeros | tmask;
    let free = (amps.len() - 1) & !fixed;

    #[cfg(feature = "parallel")]
    if (1usize << free.count_ones()) >= PAR_MIN_LEN {
        // Wide subcube: scan in fixed blocks, checking controls per index.
        let block = (2 * tmask).max(SUM_CHUNK);
        amps.par_chunks_mut(block).enumerate().for_each(|(ci, chunk)| {
            let base = ci * block;
            for start in (0..chunk.len()).step_by(2 * tmask) {
                for off in 0..tmask {
                    let i = base + start + off;
                    if i & ones == ones && i & zeros == 0 {
                        chunk.swap(start + off, start + off + tmask);
                    }
                }
            }
        });
        return;
    }

    // Narrow subcube: enumerate exactly the matching indices via the
    // submask-iteration trick; one swap per satisfied pair.
    let mut sub = 0usize;
    loop {
        let i = ones | sub;
        amps.swap(i, i | tmask);
        sub = sub.wrapping_sub(free) & free;
        if sub == 0 {
            break;
        }
    }
}

fn block_norm(chunk: &[Complex64]) -> f64 {
    chunk.iter().map(|a| a.norm_sqr()).sum()
}

/// Total squared norm, chunked so the summation order is fixed.
pub(crate) fn norm_sqr_sum(amps: &[Complex64]) -> f64 {
    #[cfg(feature = "parallel")]
    if amps.len() >= PAR_MIN_LEN {
        let partial: Vec<f64> = amps.par_chunks(SUM_CHUNK).map(block_norm).collect();
        return partial.iter().sum();
    }
    amps.chunks(SUM_CHUNK).map(block_norm).sum()
}

#[inline(always)]
fn extract_outcome(index: usize, bitpos: &[usize]) -> usize {
    let mut out = 0usize;
    for &bp in bitpos {
        out = (out << 1) | ((index >> bp) & 1);
    }
    out
}

fn block_marginal(base: usize, chunk: &[Complex64], bitpos: &[usize], out: &mut [f64]) {
    for (off, a) in chunk.iter().enumerate() {
        out[extract_outcome(base + off, bitpos)] += a.norm_sqr();
    }
}

/// Marginal probability table over the index bits listed in `bitpos`
/// (first entry becomes the most significant outcome bit).
pub(crate) fn marginal(amps: &[Complex64], bitpos: &[usize]) -> Vec<f64> {
    let out_len = 1usize << bitpos.len();
    // Large outcome tables would make per-chunk accumulators more expensive
    // than the scan itself; both builds then use the single-pass form.
    #[cfg(feature = "parallel")]
    if amps.len() >= PAR_MIN_LEN && out_len <= SUM_CHUNK {
        let partial: Vec<Vec<f64>> = amps
            .par_chunks(SUM_CHUNK)
            .enumerate()
            .map(|(ci, chunk)| {
                let mut local = vec![0.0; out_len];
                block_marginal(ci * SUM_CHUNK, chunk, bitpos, &mut local);
                local
            })
            .collect();
        let mut out = vec![0.0; out_len];
        for local in &partial {
            for (o, p) in out.iter_mut().zip(local.iter()) {
                *o += p;
            }
        }
        return out;
    }
    if out_len <= SUM_CHUNK {
        let mut out = vec![0.0; out_len];
        let mut partial = vec![0.0; out_len];
        for (ci, chunk) in amps.chunks(SUM_CHUNK).enumerate() {
            partial.iter_mut().for_each(|p| *p = 0.0);
            block_marginal(ci * SUM_CHUNK, chunk, bitpos, &mut partial);
            for (o, p) in out.iter_mut().zip(partial.iter()) {
                *o += p;
            }
        }
        out
    } else {
        let mut out = vec![0.0; out_len];
        block_marginal(0, amps, bitpos, &mut out);
        out
    }
}
