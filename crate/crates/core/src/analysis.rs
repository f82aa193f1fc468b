//! Correlation clusters, the integer correlation measure, and observer
//! agreement.
//!
//! A cluster is a tensor factor of the state with GHZ shape `Σ_k c_k |k…k⟩`.
//! A cluster of `m` members with two nonzero coefficients carries measure
//! `m − 1`; singletons and single-branch clusters carry nothing. The ledger is
//! defined only for states that split completely into clusters.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernel::insert_two_zeros;
use crate::statevec::{make_ghz, Amplitude, BranchSet, Label, PureState, Symbol};

/// Default detection tolerance.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationCluster {
    /// Members in register order.
    pub members: Vec<Label>,
    /// `(c_↑, c_↓)`, normalized, first nonzero entry real and positive.
    pub coefficients: [Amplitude; 2],
    /// Per-member bit flips mapping the factor onto `Σ_k c_k |k…k⟩`.
    /// Present only when detection ran with relabeling allowed.
    pub relabeling: Option<Vec<bool>>,
}

impl CorrelationCluster {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn measure(&self) -> usize {
        cluster_measure(self)
    }

    pub fn is_relabeled(&self) -> bool {
        self.relabeling
            .as_ref()
            .is_some_and(|flags| flags.iter().any(|&f| f))
    }

    /// The factor state this cluster describes, flips included.
    pub fn state(&self) -> Result<PureState> {
        let ghz = make_ghz(&self.members, (self.coefficients[0], self.coefficients[1]))?;
        let flip_mask = self
            .relabeling
            .iter()
            .flatten()
            .fold(0usize, |acc, &f| (acc << 1) | f as usize);
        let mut amps = vec![Complex64::new(0.0, 0.0); ghz.dim()];
        for (i, a) in ghz.amplitudes().iter().enumerate() {
            amps[i ^ flip_mask] = *a;
        }
        PureState::from_amplitudes(ghz.register().clone(), amps)
    }
}

/// Integer correlation carried by a cluster.
pub fn cluster_measure(c: &CorrelationCluster) -> usize {
    let nonzero = c
        .coefficients
        .iter()
        .filter(|a| a.norm() > DEFAULT_TOLERANCE)
        .count();
    if c.members.len() >= 2 && nonzero >= 2 {
        c.members.len() - 1
    } else {
        0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClusterDecomposition {
    pub clusters: Vec<CorrelationCluster>,
    /// Subsystems belonging to factors that are not GHZ-shaped.
    pub residual: Vec<Label>,
}

impl ClusterDecomposition {
    pub fn total_measure(&self) -> usize {
        self.clusters.iter().map(cluster_measure).sum()
    }

    pub fn is_normal_form(&self) -> bool {
        self.residual.is_empty()
    }

    pub fn cluster_of(&self, label: &str) -> Option<&CorrelationCluster> {
        self.clusters
            .iter()
            .find(|c| c.members.iter().any(|m| m.as_str() == label))
    }

    /// Member sets as plain strings, in cluster order.
    pub fn member_sets(&self) -> Vec<Vec<&str>> {
        self.clusters
            .iter()
            .map(|c| c.members.iter().map(Label::as_str).collect())
            .collect()
    }
}

/// Index tables splitting the amplitude index into a subset part and the rest.
struct Split {
    inner_bits: Vec<usize>,
    outer_bits: Vec<usize>,
    inner: Vec<usize>,
    outer: Vec<usize>,
}

impl Split {
    /// `positions` in the order that defines the local index (first = MSB).
    fn new(n: usize, positions: &[usize]) -> Self {
        let inner_bits: Vec<usize> = positions.iter().map(|&p| n - 1 - p).collect();
        let outer_bits: Vec<usize> = (0..n)
            .filter(|p| !positions.contains(p))
            .map(|p| n - 1 - p)
            .collect();
        Split {
            inner: scatter_table(&inner_bits),
            outer: scatter_table(&outer_bits),
            inner_bits,
            outer_bits,
        }
    }

    /// Local `(inner, outer)` coordinates of a global index.
    fn locate(&self, index: usize) -> (usize, usize) {
        (
            gather(&self.inner_bits, index),
            gather(&self.outer_bits, index),
        )
    }
}

fn gather(bits: &[usize], index: usize) -> usize {
    bits.iter()
        .fold(0usize, |acc, &b| (acc << 1) | ((index >> b) & 1))
}

/// `table[local]` = global index with the local bits (MSB first) placed at `bits`.
fn scatter_table(bits: &[usize]) -> Vec<usize> {
    let m = bits.len();
    (0..1usize << m)
        .map(|local| {
            bits.iter()
                .enumerate()
                .filter(|(k, _)| (local >> (m - 1 - k)) & 1 == 1)
                .fold(0usize, |acc, (_, &b)| acc | (1 << b))
        })
        .collect()
}

/// If `state` is (to `tol`) a product of a factor on `positions` and a factor
/// on the rest, returns the normalized factor on `positions`.
fn factor_out(state: &PureState, positions: &[usize], tol: f64) -> Option<Vec<Amplitude>> {
    let amps = state.amplitudes();
    let split = Split::new(state.num_qubits(), positions);
    let (p_idx, pivot) = amps
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm_sqr().total_cmp(&b.1.norm_sqr()))
        .map(|(i, a)| (i, *a))?;
    let (p, q) = split.locate(p_idx);
    let column: Vec<Amplitude> = split
        .inner
        .iter()
        .map(|&a| amps[a | split.outer[q]])
        .collect();
    let row: Vec<Amplitude> = split
        .outer
        .iter()
        .map(|&b| amps[split.inner[p] | b] / pivot)
        .collect();
    for (a, &ga) in split.inner.iter().enumerate() {
        for (b, &gb) in split.outer.iter().enumerate() {
            if (amps[ga | gb] - column[a] * row[b]).norm() > tol {
                return None;
            }
        }
    }
    let norm = column.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    Some(column.into_iter().map(|a| a / norm).collect())
}

/// Rotates `coeffs` so the first entry above `tol` is real and positive.
fn fix_phase(coeffs: &mut [Amplitude], tol: f64) {
    if let Some(lead) = coeffs.iter().find(|a| a.norm() > tol).copied() {
        let phase = lead.conj() / lead.norm();
        for c in coeffs.iter_mut() {
            *c *= phase;
        }
    }
}

/// GHZ shape of a factor vector over `m` qubits: coefficients and flips.
fn ghz_shape(
    v: &[Amplitude],
    tol: f64,
    allow_relabeling: bool,
) -> Option<([Amplitude; 2], Vec<bool>)> {
    let m = v.len().trailing_zeros() as usize;
    let mask = v.len() - 1;
    let support: Vec<usize> = (0..v.len()).filter(|&i| v[i].norm() > tol).collect();
    let anchor = match support.as_slice() {
        [x] => *x,
        [x, y] if *y == x ^ mask => *x,
        _ => return None,
    };
    // Representative with the first member unflipped.
    let top = 1usize << (m - 1);
    let base = if anchor & top == 0 {
        anchor
    } else {
        anchor ^ mask
    };
    if base != 0 && !allow_relabeling {
        return None;
    }
    let flips = (0..m).map(|k| (base >> (m - 1 - k)) & 1 == 1).collect();
    let mut coeffs = [v[base], v[base ^ mask]];
    fix_phase(&mut coeffs, tol);
    Some((coeffs, flips))
}

fn labels_at(state: &PureState, positions: &[usize]) -> Vec<Label> {
    let labels = state.register().labels();
    positions.iter().map(|&p| labels[p].clone()).collect()
}

/// Tests whether `labels` jointly form a GHZ-shaped tensor factor of `state`.
///
/// Unlike [`find_clusters`] the factor need not be irreducible: `|↑↑↑⟩`
/// passes with coefficients `(1, 0)`.
pub fn ghz_factor<S: AsRef<str>>(
    state: &PureState,
    labels: &[S],
    tol: f64,
    allow_relabeling: bool,
) -> Result<Option<CorrelationCluster>> {
    if labels.is_empty() {
        return Err(Error::EmptyLabels);
    }
    let reg = state.register();
    let mut positions = labels
        .iter()
        .map(|l| reg.position(l.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    for (i, p) in positions.iter().enumerate() {
        if positions[..i].contains(p) {
            return Err(Error::DuplicateLabel(labels[i].as_ref().to_string()));
        }
    }
    positions.sort_unstable();
    let Some(factor) = factor_out(state, &positions, tol) else {
        return Ok(None);
    };
    Ok(
        ghz_shape(&factor, tol, allow_relabeling).map(|(coefficients, flips)| CorrelationCluster {
            members: labels_at(state, &positions),
            coefficients,
            relabeling: allow_relabeling.then_some(flips),
        }),
    )
}

/// Whether the two-qubit marginal of bits `(bi, bj)` differs from the product
/// of its one-qubit marginals by more than `tol`.
#[allow(clippy::needless_range_loop)]
fn pair_correlated(amps: &[Amplitude], bi: usize, bj: usize, tol: f64) -> bool {
    let zero = Complex64::new(0.0, 0.0);
    let mut rho = [[zero; 4]; 4];
    let (mi, mj) = (1usize << bi, 1usize << bj);
    for k in 0..amps.len() >> 2 {
        let base = insert_two_zeros(k, bi, bj);
        let v = [
            amps[base],
            amps[base | mj],
            amps[base | mi],
            amps[base | mi | mj],
        ];
        for r in 0..4 {
            for c in r..4 {
                rho[r][c] += v[r] * v[c].conj();
            }
        }
    }
    for r in 0..4 {
        for c in 0..r {
            rho[r][c] = rho[c][r].conj();
        }
    }
    let mut rho_i = [[zero; 2]; 2];
    let mut rho_j = [[zero; 2]; 2];
    for a in 0..2 {
        for a2 in 0..2 {
            for b in 0..2 {
                rho_i[a][a2] += rho[2 * a + b][2 * a2 + b];
                rho_j[a][a2] += rho[2 * b + a][2 * b + a2];
            }
        }
    }
    (0..4).any(|r| {
        (0..4).any(|c| {
            let prod = rho_i[r >> 1][c >> 1] * rho_j[r & 1][c & 1];
            (rho[r][c] - prod).norm() > tol
        })
    })
}

fn find_root(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

/// All `k`-element subsets of `0..n`, in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Finest tensor factorization of `state` into position sets.
fn irreducible_factors(state: &PureState, tol: f64) -> Vec<Vec<usize>> {
    let n = state.num_qubits();
    let amps = state.amplitudes();
    let mut parent: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in i + 1..n {
            if find_root(&mut parent, i) == find_root(&mut parent, j) {
                continue;
            }
            if pair_correlated(amps, n - 1 - i, n - 1 - j, tol) {
                let (ri, rj) = (find_root(&mut parent, i), find_root(&mut parent, j));
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for p in 0..n {
        let root = find_root(&mut parent, p);
        match classes.iter_mut().find(|c| c[0] == root) {
            Some(c) => c.push(p),
            None => classes.push(vec![p]),
        }
    }

    // Pairwise independence is necessary but not sufficient for a split;
    // classes that do not factor out are merged with the fewest partners
    // that make them factor.
    let mut factors = Vec::new();
    let mut pending = Vec::new();
    for class in classes {
        if class.len() == n || factor_out(state, &class, tol).is_some() {
            factors.push(class);
        } else {
            pending.push(class);
        }
    }
    while !pending.is_empty() {
        let head = pending.remove(0);
        let mut merged = None;
        'search: for k in 1..pending.len() {
            for combo in combinations(pending.len(), k) {
                let mut set = head.clone();
                for &c in &combo {
                    set.extend(&pending[c]);
                }
                set.sort_unstable();
                if factor_out(state, &set, tol).is_some() {
                    merged = Some((set, combo));
                    break 'search;
                }
            }
        }
        match merged {
            Some((set, combo)) => {
                for &c in combo.iter().rev() {
                    pending.remove(c);
                }
                factors.push(set);
            }
            None => {
                let mut set = head;
                for class in pending.drain(..) {
                    set.extend(class);
                }
                set.sort_unstable();
                factors.push(set);
            }
        }
    }
    factors.sort_by_key(|f| f[0]);
    factors
}

/// Splits `state` into GHZ-shaped clusters plus a residual.
///
/// Each irreducible tensor factor becomes a cluster when it has GHZ shape
/// (after per-member bit flips if `allow_relabeling`); otherwise its members
/// go to the residual. Singleton factors are always clusters.
pub fn find_clusters(state: &PureState, tol: f64, allow_relabeling: bool) -> ClusterDecomposition {
    let mut clusters = Vec::new();
    let mut residual = Vec::new();
    for positions in irreducible_factors(state, tol) {
        let shaped = if positions.len() == state.num_qubits() {
            Some(state.amplitudes().to_vec())
        } else {
            factor_out(state, &positions, tol)
        }
        .and_then(|v| ghz_shape(&v, tol, allow_relabeling));
        match shaped {
            Some((coefficients, flips)) => clusters.push(CorrelationCluster {
                members: labels_at(state, &positions),
                coefficients,
                relabeling: allow_relabeling.then_some(flips),
            }),
            None => residual.extend(labels_at(state, &positions)),
        }
    }
    let reg = state.register();
    residual.sort_by_key(|l| reg.position(l.as_str()).unwrap_or(usize::MAX));
    ClusterDecomposition { clusters, residual }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LedgerEntry {
    pub tag: String,
    pub decomposition: ClusterDecomposition,
    pub total: usize,
}

/// Append-only record of correlation totals across a protocol.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationLedger {
    tol: f64,
    allow_relabeling: bool,
    entries: Vec<LedgerEntry>,
}

impl Default for CorrelationLedger {
    fn default() -> Self {
        CorrelationLedger::new(DEFAULT_TOLERANCE, true)
    }
}

impl CorrelationLedger {
    pub fn new(tol: f64, allow_relabeling: bool) -> Self {
        CorrelationLedger {
            tol,
            allow_relabeling,
            entries: Vec::new(),
        }
    }

    pub fn entries(&self) -> &[LedgerEntry] {
        &self.entries
    }

    pub fn totals(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.total).collect()
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn allows_relabeling(&self) -> bool {
        self.allow_relabeling
    }
}

/// Appends a snapshot of `state` to a copy of `ledger`.
pub fn ledger_record(
    ledger: &CorrelationLedger,
    state: &PureState,
    tag: &str,
) -> Result<CorrelationLedger> {
    let decomposition = find_clusters(state, ledger.tol, ledger.allow_relabeling);
    if !decomposition.is_normal_form() {
        return Err(Error::ResidualNonEmpty(
            decomposition
                .residual
                .iter()
                .map(Label::to_string)
                .collect(),
        ));
    }
    let mut next = ledger.clone();
    next.entries.push(LedgerEntry {
        tag: tag.to_string(),
        total: decomposition.total_measure(),
        decomposition,
    });
    Ok(next)
}

#[derive(Clone, Debug, PartialEq)]
pub struct AgreementRow {
    pub outcome: String,
    pub probability: f64,
    /// One flag per designated pair.
    pub agree: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AgreementReport {
    pub pairs: Vec<(Label, Label)>,
    pub rows: Vec<AgreementRow>,
    /// Probability of agreement, per pair.
    pub aggregate: Vec<f64>,
    /// Probability of disagreement, per pair.
    pub disagreement: Vec<f64>,
}

/// Per-branch comparison of the symbols recorded by each pair of subsystems.
pub fn agreement<S: AsRef<str>>(branches: &BranchSet, pairs: &[(S, S)]) -> Result<AgreementReport> {
    let reg = branches.register();
    let idx = pairs
        .iter()
        .map(|(a, b)| Ok((reg.position(a.as_ref())?, reg.position(b.as_ref())?)))
        .collect::<Result<Vec<_>>>()?;
    let labels = reg.labels();
    let mut aggregate = vec![0.0; pairs.len()];
    let mut disagreement = vec![0.0; pairs.len()];
    let rows = branches
        .branches()
        .iter()
        .map(|b| {
            let probability = b.probability();
            let agree: Vec<bool> = idx
                .iter()
                .map(|&(i, j)| b.outcome[i] == b.outcome[j])
                .collect();
            for (k, &ok) in agree.iter().enumerate() {
                if ok {
                    aggregate[k] += probability;
                } else {
                    disagreement[k] += probability;
                }
            }
            AgreementRow {
                outcome: b.outcome_string(),
                probability,
                agree,
            }
        })
        .collect();
    Ok(AgreementReport {
        pairs: idx
            .iter()
            .map(|&(i, j)| (labels[i].clone(), labels[j].clone()))
            .collect(),
        rows,
        aggregate,
        disagreement,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecordInference {
    Consistent(Symbol),
    Inconsistent,
}

impl std::fmt::Display for RecordInference {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RecordInference::Consistent(s) => write!(f, "{s}"),
            RecordInference::Inconsistent => f.write_str("inconsistent"),
        }
    }
}

/// The common symbol of the record subsystems in each branch.
pub fn recover_record<S: AsRef<str>>(
    branches: &BranchSet,
    records: &[S],
) -> Result<Vec<RecordInference>> {
    if records.is_empty() {
        return Err(Error::NoRecords);
    }
    let reg = branches.register();
    let idx = records
        .iter()
        .map(|r| reg.position(r.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    Ok(branches
        .branches()
        .iter()
        .map(|b| {
            let first = b.outcome[idx[0]];
            if idx.iter().all(|&i| b.outcome[i] == first) {
                RecordInference::Consistent(first)
            } else {
                RecordInference::Inconsistent
            }
        })
        .collect())
}
