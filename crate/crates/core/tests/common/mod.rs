#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub use rand::SeedableRng;
pub use unimeas::prelude::*;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> Amplitude {
    Amplitude::new(re, im)
}

pub fn gaussian(rng: &mut TestRng) -> Amplitude {
    c(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

/// Random normalized pair; each entry has modulus above `floor`.
pub fn pair(rng: &mut TestRng, floor: f64) -> (Amplitude, Amplitude) {
    loop {
        let (a, b) = (gaussian(rng), gaussian(rng));
        let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
        let (a, b) = (a / n, b / n);
        if a.norm() > floor && b.norm() > floor {
            return (a, b);
        }
    }
}

pub fn labels(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

pub fn register(names: &[String]) -> Register {
    Register::new(names.iter().map(String::as_str)).unwrap()
}

pub fn random_state(rng: &mut TestRng, reg: Register) -> PureState {
    let amps = (0..reg.dim()).map(|_| gaussian(rng)).collect();
    PureState::from_amplitudes(reg, amps).unwrap()
}

pub fn random_gate(rng: &mut TestRng, names: &[String], permutations_only: bool) -> GateOp {
    let n = names.len();
    let a = rng.random_range(0..n);
    let mut b = rng.random_range(0..n - 1);
    if b >= a {
        b += 1;
    }
    let kinds = if permutations_only { 3 } else { 4 };
    match rng.random_range(0..kinds) {
        0 => GateOp::imprint(&names[a], &names[b]),
        1 => GateOp::inverse_imprint(&names[a], &names[b]),
        2 => GateOp::swap(&names[a], &names[b]),
        _ => GateOp::rotate_basis(&names[a]),
    }
}

pub fn random_script(
    rng: &mut TestRng,
    names: &[String],
    len: usize,
    permutations_only: bool,
) -> Vec<GateOp> {
    (0..len)
        .map(|_| random_gate(rng, names, permutations_only))
        .collect()
}

/// Computational-basis index of `bits` (first entry is register position 0).
pub fn index_of(bits: &[usize]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | b)
}

pub fn basis_state(names: &[&str], bits: &[usize]) -> PureState {
    PureState::basis(
        Register::new(names.iter().copied()).unwrap(),
        index_of(bits),
    )
    .unwrap()
}

/// `|Ψ⟩ = ψ↑|↑↑⟩ + ψ↓|↓↓⟩` on two fresh labels.
pub fn correlated_pair(a: &str, b: &str, psi: (Amplitude, Amplitude)) -> PureState {
    make_ghz(&[a, b], psi).unwrap()
}

pub fn amplitudes_close(a: &PureState, b: &PureState, tol: f64) -> bool {
    a.register() == b.register()
        && a.amplitudes()
            .iter()
            .zip(b.amplitudes())
            .all(|(x, y)| (x - y).norm() <= tol)
}
