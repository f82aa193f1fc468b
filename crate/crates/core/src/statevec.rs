//! Labeled qubit registers and dense pure states.
//!
//! Register position 0 is the most significant bit of the amplitude index, so
//! a ket written left to right as `|s o e⟩` is index `s·4 + o·2 + e`.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernel;

pub type Amplitude = Complex64;

/// Branches whose amplitude modulus is at or below this value are absent.
pub const PRUNE_THRESHOLD: f64 = 1e-12;

/// Allowed deviation of the squared norm from 1.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Name of one subsystem, e.g. `s`, `o`, `e3` or `^1o1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label(String);

impl Label {
    pub fn new(name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        if name.is_empty() || name.chars().any(char::is_whitespace) {
            return Err(Error::InvalidLabel(name));
        }
        Ok(Label(name))
    }

    pub(crate) fn unvalidated(name: &str) -> Self {
        Label(name.to_string())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Label {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl TryFrom<&str> for Label {
    type Error = Error;

    fn try_from(value: &str) -> Result<Self> {
        Label::new(value)
    }
}

/// Ordered list of distinct labels; the order is the tensor order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Register {
    labels: Vec<Label>,
}

impl Register {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let labels = labels
            .into_iter()
            .map(|s| Label::new(s.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Self::from_labels(labels)
    }

    pub fn from_labels(labels: Vec<Label>) -> Result<Self> {
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::DuplicateLabel(l.0.clone()));
            }
        }
        Ok(Register { labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn contains(&self, label: &str) -> bool {
        self.labels.iter().any(|l| l.0 == label)
    }

    /// Position of `label` in tensor order.
    pub fn position(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l.0 == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// Bit index of `label` within the amplitude index.
    pub fn bit(&self, label: &str) -> Result<usize> {
        Ok(self.bit_of(self.position(label)?))
    }

    pub(crate) fn bit_of(&self, position: usize) -> usize {
        self.labels.len() - 1 - position
    }

    pub fn dim(&self) -> usize {
        1usize << self.labels.len()
    }
}

impl fmt::Display for Register {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.labels.iter().map(Label::as_str).collect();
        write!(f, "[{}]", names.join(", "))
    }
}

/// A normalized dense state vector over a labeled register.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    register: Register,
    amps: Vec<Amplitude>,
}

impl PureState {
    /// Builds a state from raw amplitudes, normalizing them.
    pub fn from_amplitudes(register: Register, amps: Vec<Amplitude>) -> Result<Self> {
        if amps.len() != register.dim() {
            return Err(Error::LengthMismatch {
                expected: register.dim(),
                found: amps.len(),
            });
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        let amps = amps.into_iter().map(|a| a / norm).collect();
        Ok(PureState { register, amps })
    }

    /// The computational basis state with amplitude index `index`.
    pub fn basis(register: Register, index: usize) -> Result<Self> {
        let dim = register.dim();
        if index >= dim {
            return Err(Error::LengthMismatch {
                expected: dim,
                found: index + 1,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(PureState { register, amps })
    }

    pub(crate) fn from_parts(register: Register, amps: Vec<Amplitude>) -> Self {
        debug_assert_eq!(amps.len(), register.dim());
        PureState { register, amps }
    }

    pub fn register(&self) -> &Register {
        &self.register
    }

    pub fn amplitudes(&self) -> &[Amplitude] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Amplitude] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Amplitude> {
        self.amps
    }

    pub fn num_qubits(&self) -> usize {
        self.register.len()
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Single-qubit reduced density matrix of `label`, row-major.
    pub fn reduced_density(&self, label: &str) -> Result<[[Complex64; 2]; 2]> {
        let mask = 1usize << self.register.bit(label)?;
        let mut rho = [[Complex64::new(0.0, 0.0); 2]; 2];
        for i0 in (0..self.amps.len()).filter(|i| i & mask == 0) {
            let (a, b) = (self.amps[i0], self.amps[i0 | mask]);
            rho[0][0] += a * a.conj();
            rho[0][1] += a * b.conj();
            rho[1][0] += b * a.conj();
            rho[1][1] += b * b.conj();
        }
        Ok(rho)
    }

    /// Branches in the computational basis.
    pub fn branches(&self) -> BranchSet {
        let basis = BasisChoice::uniform(&self.register, Basis::Z);
        branch_decompose(self, &basis).expect("uniform basis covers the register")
    }
}

/// Measurement basis of one subsystem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Basis {
    /// `{↑, ↓}`
    Z,
    /// `{→, ←}` with `|→⟩ = (|↑⟩+|↓⟩)/√2`, `|←⟩ = (|↑⟩−|↓⟩)/√2`
    X,
}

impl Basis {
    pub fn as_char(self) -> char {
        match self {
            Basis::Z => 'Z',
            Basis::X => 'X',
        }
    }

    /// Symbol carried by bit value `bit` in this basis.
    pub fn symbol(self, bit: bool) -> Symbol {
        match (self, bit) {
            (Basis::Z, false) => Symbol::Up,
            (Basis::Z, true) => Symbol::Down,
            (Basis::X, false) => Symbol::Right,
            (Basis::X, true) => Symbol::Left,
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Symbol {
    Up,
    Down,
    Right,
    Left,
}

impl Symbol {
    pub fn as_char(self) -> char {
        match self {
            Symbol::Up => '↑',
            Symbol::Down => '↓',
            Symbol::Right => '→',
            Symbol::Left => '←',
        }
    }

    pub fn from_char(c: char) -> Option<Symbol> {
        match c {
            '↑' => Some(Symbol::Up),
            '↓' => Some(Symbol::Down),
            '→' => Some(Symbol::Right),
            '←' => Some(Symbol::Left),
            _ => None,
        }
    }

    pub fn basis(self) -> Basis {
        match self {
            Symbol::Up | Symbol::Down => Basis::Z,
            Symbol::Right | Symbol::Left => Basis::X,
        }
    }

    /// Bit value of this symbol within its own basis.
    pub fn bit(self) -> bool {
        matches!(self, Symbol::Down | Symbol::Left)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// One basis selector per register position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisChoice(Vec<Basis>);

impl BasisChoice {
    pub fn new(per_qubit: Vec<Basis>) -> Self {
        BasisChoice(per_qubit)
    }

    pub fn uniform(register: &Register, basis: Basis) -> Self {
        BasisChoice(vec![basis; register.len()])
    }

    /// `default` everywhere except the listed labels.
    pub fn with_overrides<S: AsRef<str>>(
        register: &Register,
        default: Basis,
        overrides: &[(S, Basis)],
    ) -> Result<Self> {
        let mut per = vec![default; register.len()];
        for (label, basis) in overrides {
            per[register.position(label.as_ref())?] = *basis;
        }
        Ok(BasisChoice(per))
    }

    pub fn as_slice(&self) -> &[Basis] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    pub outcome: Vec<Symbol>,
    pub amplitude: Amplitude,
}

impl Branch {
    pub fn outcome_string(&self) -> String {
        self.outcome.iter().map(|s| s.as_char()).collect()
    }

    pub fn probability(&self) -> f64 {
        self.amplitude.norm_sqr()
    }
}

/// Product-basis expansion of a state, sorted by outcome string.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchSet {
    register: Register,
    basis: BasisChoice,
    branches: Vec<Branch>,
}

impl BranchSet {
    /// Assembles a branch set from explicit rows; rows are sorted and
    /// outcomes must be distinct and match the basis.
    pub fn from_branches(
        register: Register,
        basis: BasisChoice,
        mut branches: Vec<Branch>,
    ) -> Result<Self> {
        if basis.len() != register.len() {
            return Err(Error::LengthMismatch {
                expected: register.len(),
                found: basis.len(),
            });
        }
        for b in &branches {
            if b.outcome.len() != register.len() {
                return Err(Error::LengthMismatch {
                    expected: register.len(),
                    found: b.outcome.len(),
                });
            }
            if b.outcome
                .iter()
                .zip(basis.as_slice())
                .any(|(s, &bs)| s.basis() != bs)
            {
                return Err(Error::RegisterMismatch(format!(
                    "outcome {} does not match the basis choice",
                    b.outcome_string()
                )));
            }
        }
        branches.sort_by_cached_key(Branch::outcome_string);
        for w in branches.windows(2) {
            if w[0].outcome == w[1].outcome {
                return Err(Error::RegisterMismatch(format!(
                    "duplicate outcome {}",
                    w[0].outcome_string()
                )));
            }
        }
        Ok(BranchSet {
            register,
            basis,
            branches,
        })
    }

    pub fn register(&self) -> &Register {
        &self.register
    }

    pub fn basis(&self) -> &BasisChoice {
        &self.basis
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    pub fn total_probability(&self) -> f64 {
        self.branches.iter().map(Branch::probability).sum()
    }

    /// Amplitude of the branch with this outcome string, zero when absent.
    pub fn amplitude_of(&self, outcome: &str) -> Amplitude {
        self.branches
            .iter()
            .find(|b| b.outcome_string() == outcome)
            .map(|b| b.amplitude)
            .unwrap_or_default()
    }

    /// Symbol of `label` in `branch`.
    pub fn symbol(&self, branch: &Branch, label: &str) -> Result<Symbol> {
        Ok(branch.outcome[self.register.position(label)?])
    }

    /// Sums `amplitude · |outcome⟩` back into a computational-basis state.
    pub fn reconstruct(&self) -> Result<PureState> {
        let n = self.register.len();
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        for b in &self.branches {
            let mut idx = 0usize;
            for s in &b.outcome {
                idx = (idx << 1) | s.bit() as usize;
            }
            amps[idx] += b.amplitude;
        }
        // X-basis qubits carry |→⟩/|←⟩ coordinates; rotate them back.
        for (pos, basis) in self.basis.as_slice().iter().enumerate() {
            if *basis == Basis::X {
                kernel::hadamard(&mut amps, self.register.bit_of(pos));
            }
        }
        PureState::from_amplitudes(self.register.clone(), amps)
    }
}

fn pair_state(pair: (Amplitude, Amplitude)) -> Result<[Amplitude; 2]> {
    let (a, b) = pair;
    if ![a.re, a.im, b.re, b.im].iter().all(|x| x.is_finite()) {
        return Err(Error::NonFinite);
    }
    let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
    if norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok([a / norm, b / norm])
}

/// Tensor product of single-qubit states, one `(↑, ↓)` pair per label.
pub fn product_state(
    register: Register,
    per_qubit: &[(Amplitude, Amplitude)],
) -> Result<PureState> {
    if per_qubit.len() != register.len() {
        return Err(Error::LengthMismatch {
            expected: register.len(),
            found: per_qubit.len(),
        });
    }
    let mut amps = vec![Complex64::new(1.0, 0.0)];
    for &pair in per_qubit {
        let [up, down] = pair_state(pair)?;
        amps = amps.iter().flat_map(|&a| [a * up, a * down]).collect();
    }
    Ok(PureState::from_parts(register, amps))
}

/// `Σ_k χ_k |k…k⟩` over `labels`, normalized.
pub fn make_ghz<S: AsRef<str>>(
    labels: &[S],
    coefficients: (Amplitude, Amplitude),
) -> Result<PureState> {
    if labels.is_empty() {
        return Err(Error::EmptyLabels);
    }
    let register = Register::new(labels)?;
    let [up, down] = pair_state(coefficients)?;
    let mut amps = vec![Complex64::new(0.0, 0.0); register.dim()];
    amps[0] = up;
    amps[register.dim() - 1] += down;
    Ok(PureState::from_parts(register, amps))
}

/// `a ⊗ b` over the concatenated register.
pub fn tensor(a: &PureState, b: &PureState) -> Result<PureState> {
    let mut labels = a.register.labels.clone();
    labels.extend(b.register.labels.iter().cloned());
    let register = Register::from_labels(labels)?;
    let mut amps = Vec::with_capacity(a.dim() * b.dim());
    for &x in &a.amps {
        amps.extend(b.amps.iter().map(|&y| x * y));
    }
    Ok(PureState::from_parts(register, amps))
}

/// Expands `state` into product-basis branches under `basis`.
pub fn branch_decompose(state: &PureState, basis: &BasisChoice) -> Result<BranchSet> {
    let register = state.register();
    if basis.len() != register.len() {
        return Err(Error::LengthMismatch {
            expected: register.len(),
            found: basis.len(),
        });
    }
    let mut amps = state.amps.clone();
    for (pos, b) in basis.as_slice().iter().enumerate() {
        if *b == Basis::X {
            kernel::hadamard(&mut amps, register.bit_of(pos));
        }
    }
    let n = register.len();
    let branches = amps
        .iter()
        .enumerate()
        .filter(|(_, a)| a.norm() > PRUNE_THRESHOLD)
        .map(|(idx, &amplitude)| {
            let outcome = basis
                .as_slice()
                .iter()
                .enumerate()
                .map(|(pos, b)| b.symbol((idx >> (n - 1 - pos)) & 1 == 1))
                .collect();
            Branch { outcome, amplitude }
        })
        .collect();
    BranchSet::from_branches(register.clone(), basis.clone(), branches)
}

/// True iff the max-norm amplitude difference is within `tol`.
///
/// With `up_to_global_phase`, `b` is first rotated by the phase of `⟨b|a⟩`,
/// which is the minimizing phase whenever the states agree to within `tol`.
pub fn approx_eq(a: &PureState, b: &PureState, tol: f64, up_to_global_phase: bool) -> Result<bool> {
    Ok(max_deviation(a, b, up_to_global_phase)? <= tol)
}

/// Max-norm amplitude difference, optionally after phase alignment.
pub fn max_deviation(a: &PureState, b: &PureState, up_to_global_phase: bool) -> Result<f64> {
    if a.register != b.register {
        return Err(Error::RegisterMismatch(format!(
            "{} vs {}",
            a.register, b.register
        )));
    }
    let phase = if up_to_global_phase {
        let overlap: Complex64 = a.amps.iter().zip(&b.amps).map(|(x, y)| y.conj() * x).sum();
        if overlap.norm() > 0.0 {
            overlap / overlap.norm()
        } else {
            Complex64::new(1.0, 0.0)
        }
    } else {
        Complex64::new(1.0, 0.0)
    };
    Ok(a.amps
        .iter()
        .zip(&b.amps)
        .map(|(x, y)| (x - y * phase).norm())
        .fold(0.0, f64::max))
}

/// Shorthand for a real-valued amplitude.
pub fn re(x: f64) -> Amplitude {
    Complex64::new(x, 0.0)
}
