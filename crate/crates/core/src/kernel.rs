//! In-place amplitude kernels.
//!
//! All kernels take bit positions in the amplitude index (bit 0 is the least
//! significant). Each visits every amplitude exactly once, so a gate costs
//! O(2^n) with no auxiliary allocation.

use num_complex::Complex64;

/// Inserts a zero bit at `bit`, shifting the higher bits up by one.
#[inline(always)]
fn insert_zero(k: usize, bit: usize) -> usize {
    let low = k & ((1 << bit) - 1);
    ((k >> bit) << (bit + 1)) | low
}

/// Base indices with both `b0` and `b1` cleared, in increasing order.
#[inline(always)]
pub(crate) fn insert_two_zeros(k: usize, b0: usize, b1: usize) -> usize {
    let (lo, hi) = if b0 < b1 { (b0, b1) } else { (b1, b0) };
    insert_zero(insert_zero(k, lo), hi)
}

/// Flips `target` wherever `control` is set.
pub fn controlled_not(amps: &mut [Complex64], control: usize, target: usize) {
    let quarter = amps.len() >> 2;
    let (mc, mt) = (1 << control, 1 << target);
    for k in 0..quarter {
        let base = insert_two_zeros(k, control, target) | mc;
        amps.swap(base, base | mt);
    }
}

/// Exchanges the values of two bits.
pub fn swap_bits(amps: &mut [Complex64], a: usize, b: usize) {
    let quarter = amps.len() >> 2;
    let (ma, mb) = (1 << a, 1 << b);
    for k in 0..quarter {
        let base = insert_two_zeros(k, a, b);
        amps.swap(base | ma, base | mb);
    }
}

/// Applies the row-major 2×2 matrix `u` on `target`.
pub fn single_qubit(amps: &mut [Complex64], target: usize, u: &[[Complex64; 2]; 2]) {
    let half = amps.len() >> 1;
    let mt = 1 << target;
    for k in 0..half {
        let i0 = insert_zero(k, target);
        let i1 = i0 | mt;
        let (a, b) = (amps[i0], amps[i1]);
        amps[i0] = u[0][0] * a + u[0][1] * b;
        amps[i1] = u[1][0] * a + u[1][1] * b;
    }
}

/// The real self-inverse change of basis `|0⟩ ↔ |+⟩`, `|1⟩ ↔ |−⟩`.
pub fn hadamard(amps: &mut [Complex64], target: usize) {
    let half = amps.len() >> 1;
    let mt = 1 << target;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for k in 0..half {
        let i0 = insert_zero(k, target);
        let i1 = i0 | mt;
        let (a, b) = (amps[i0], amps[i1]);
        amps[i0] = (a + b) * r;
        amps[i1] = (a - b) * r;
    }
}
