mod common;

use common::*;
use proptest::prelude::*;
use unimeas::analysis::CorrelationLedger;
use unimeas::gates::apply_gate_in_place;

const PAULI_X: [[Amplitude; 2]; 2] = [
    [Amplitude::new(0.0, 0.0), Amplitude::new(1.0, 0.0)],
    [Amplitude::new(1.0, 0.0), Amplitude::new(0.0, 0.0)],
];

fn amp() -> impl Strategy<Value = Amplitude> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| c(a, b))
}

/// Normalized pair with both entries of modulus above `floor`.
fn pair_strategy(floor: f64) -> impl Strategy<Value = (Amplitude, Amplitude)> {
    (amp(), amp())
        .prop_filter("components above floor", move |(a, b)| {
            let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
            n > 1e-3 && a.norm() / n > floor && b.norm() / n > floor
        })
        .prop_map(|(a, b)| {
            let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
            (a / n, b / n)
        })
}

fn state_strategy(min: usize, max: usize) -> impl Strategy<Value = PureState> {
    (min..=max)
        .prop_flat_map(|n| proptest::collection::vec(amp(), 1 << n))
        .prop_filter("nonzero", |v| {
            v.iter().map(|a| a.norm_sqr()).sum::<f64>() > 1e-6
        })
        .prop_map(|v| {
            let n = v.len().trailing_zeros() as usize;
            PureState::from_amplitudes(register(&labels("q", n)), v).unwrap()
        })
}

/// A gate drawn from indices, resolved against an `n`-qubit register.
fn gate_from(kind: u8, a: usize, b: usize, n: usize) -> GateOp {
    let a = a % n;
    let b = (a + 1 + b % (n - 1)) % n;
    let (x, y) = (format!("q{a}"), format!("q{b}"));
    match kind % 4 {
        0 => GateOp::imprint(&x, &y),
        1 => GateOp::inverse_imprint(&x, &y),
        2 => GateOp::swap(&x, &y),
        _ => GateOp::rotate_basis(&x),
    }
}

fn script_strategy(max_len: usize) -> impl Strategy<Value = Vec<(u8, usize, usize)>> {
    proptest::collection::vec((any::<u8>(), any::<usize>(), any::<usize>()), 0..=max_len)
}

fn resolve(raw: &[(u8, usize, usize)], n: usize, permutations_only: bool) -> Vec<GateOp> {
    raw.iter()
        .map(|&(k, a, b)| {
            let k = if permutations_only { k % 3 } else { k };
            gate_from(k, a, b, n)
        })
        .collect()
}

fn max_diff(a: &PureState, b: &PureState) -> f64 {
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn gates_preserve_norm(state in state_strategy(2, 8), raw in script_strategy(20)) {
        let n = state.num_qubits();
        let mut st = state.clone();
        for g in resolve(&raw, n, false) {
            apply_gate_in_place(&mut st, &g).unwrap();
            prop_assert!((st.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn inverted_script_restores_state(state in state_strategy(2, 8), raw in script_strategy(20)) {
        let script = resolve(&raw, state.num_qubits(), false);
        let there = apply_script(&state, &script).unwrap();
        let back = apply_script(&there, &invert_script(&script)).unwrap();
        prop_assert!(max_diff(&back, &state) < 1e-10);
    }

    #[test]
    fn disjoint_gates_commute(state in state_strategy(4, 7), k1 in any::<u8>(), k2 in any::<u8>(), shift in 0usize..8) {
        let n = state.num_qubits();
        let q = |i: usize| format!("q{}", (i + shift) % n);
        let g1 = match k1 % 4 {
            0 => GateOp::imprint(&q(0), &q(1)),
            1 => GateOp::inverse_imprint(&q(1), &q(0)),
            2 => GateOp::swap(&q(0), &q(1)),
            _ => GateOp::rotate_basis(&q(0)),
        };
        let g2 = match k2 % 4 {
            0 => GateOp::imprint(&q(2), &q(3)),
            1 => GateOp::inverse_imprint(&q(3), &q(2)),
            2 => GateOp::swap(&q(2), &q(3)),
            _ => GateOp::rotate_basis(&q(3)),
        };
        let ab = apply_script(&state, &[g1.clone(), g2.clone()]).unwrap();
        let ba = apply_script(&state, &[g2, g1]).unwrap();
        prop_assert!(max_diff(&ab, &ba) < 1e-12);
    }

    #[test]
    fn swap_is_basis_independent(state in state_strategy(2, 6), a in any::<usize>(), b in any::<usize>()) {
        let n = state.num_qubits();
        let GateOp::Swap { a, b } = gate_from(2, a, b, n) else { unreachable!() };
        let (a, b) = (a.as_str(), b.as_str());
        let rot = [GateOp::rotate_basis(a), GateOp::rotate_basis(b)];
        let mut conj = rot.to_vec();
        conj.push(GateOp::swap(a, b));
        conj.extend(rot.clone());
        let plain = apply_script(&state, &[GateOp::swap(a, b)]).unwrap();
        let rotated = apply_script(&state, &conj).unwrap();
        prop_assert!(max_diff(&plain, &rotated) < 1e-12);
    }

    #[test]
    fn rotated_imprint_reverses_direction(state in state_strategy(2, 6), a in any::<usize>(), b in any::<usize>()) {
        let n = state.num_qubits();
        let GateOp::Imprint { source, target } = gate_from(0, a, b, n) else { unreachable!() };
        let (s, t) = (source.as_str(), target.as_str());
        let rot = [GateOp::rotate_basis(s), GateOp::rotate_basis(t)];
        let mut conj = rot.to_vec();
        conj.push(GateOp::imprint(s, t));
        conj.extend(rot.clone());
        let rotated = apply_script(&state, &conj).unwrap();
        let reversed = apply_script(&state, &[GateOp::imprint(t, s)]).unwrap();
        prop_assert!(max_diff(&rotated, &reversed) < 1e-12);
    }

    #[test]
    fn permutation_scripts_permute_basis_states(n in 2usize..=6, raw in script_strategy(20), idx in any::<usize>()) {
        let script = resolve(&raw, n, true);
        let reg = register(&labels("q", n));
        let idx = idx % reg.dim();
        let out = apply_script(&PureState::basis(reg, idx).unwrap(), &script).unwrap();
        let ones: Vec<&Amplitude> = out.amplitudes().iter().filter(|a| a.norm() != 0.0).collect();
        prop_assert_eq!(ones.len(), 1);
        prop_assert_eq!(*ones[0], c(1.0, 0.0));
    }

    #[test]
    fn ledger_is_conserved(n in 3usize..=10, psi in pair_strategy(1e-6), phi in pair_strategy(0.0), chi in pair_strategy(1e-6)) {
        let env: Vec<String> = (1..=n).map(|k| format!("e{k}")).collect();
        let so = product_state(Register::new(["s", "o"]).unwrap(), &[psi, phi]).unwrap();
        let start = tensor(&so, &make_ghz(&env, chi).unwrap()).unwrap();
        let out = corrected_measure(&start, &MeasurementSpec::new("s", "o", &env)).unwrap();
        let ledger = ledger_record(&CorrelationLedger::default(), &start, "before").unwrap();
        let ledger = ledger_record(&ledger, &out, "after").unwrap();
        prop_assert_eq!(ledger.totals(), vec![n - 1, n - 1]);
    }

    #[test]
    fn ghz_tensor_round_trips(sizes in proptest::collection::vec(1usize..=3, 1..=4), coeffs in proptest::collection::vec(pair_strategy(1e-3), 4)) {
        let mut next = 0;
        let mut state: Option<PureState> = None;
        let mut want = Vec::new();
        for (g, &m) in sizes.iter().enumerate() {
            let names: Vec<String> = (0..m).map(|i| format!("g{g}m{}", next + i)).collect();
            next += m;
            let part = make_ghz(&names, coeffs[g]).unwrap();
            state = Some(match state {
                None => part,
                Some(acc) => tensor(&acc, &part).unwrap(),
            });
            want.push(names);
        }
        let state = state.unwrap();
        let d = find_clusters(&state, 1e-9, false);
        let got: Vec<Vec<String>> = d
            .member_sets()
            .into_iter()
            .map(|s| s.into_iter().map(String::from).collect())
            .collect();
        prop_assert_eq!(got, want);
        prop_assert!(d.residual.is_empty());
        prop_assert_eq!(d.total_measure(), sizes.iter().map(|m| m - 1).sum::<usize>());
    }

    #[test]
    fn relabeling_is_symmetric(sizes in proptest::collection::vec(2usize..=3, 1..=3), coeffs in proptest::collection::vec(pair_strategy(1e-3), 3), flips in any::<u16>()) {
        let mut state: Option<PureState> = None;
        let mut next = 0;
        for (g, &m) in sizes.iter().enumerate() {
            let names: Vec<String> = (0..m).map(|i| format!("q{}", next + i)).collect();
            next += m;
            let part = make_ghz(&names, coeffs[g]).unwrap();
            state = Some(match state {
                None => part,
                Some(acc) => tensor(&acc, &part).unwrap(),
            });
        }
        let state = state.unwrap();
        let mut flipped = state.clone();
        for q in 0..next {
            if (flips >> q) & 1 == 1 {
                flipped = apply_single(&flipped, &format!("q{q}"), &PAULI_X).unwrap();
            }
        }
        let a = find_clusters(&state, 1e-9, true);
        let b = find_clusters(&flipped, 1e-9, true);
        prop_assert_eq!(a.member_sets(), b.member_sets());
        prop_assert_eq!(a.total_measure(), b.total_measure());
        prop_assert!(b.residual.is_empty());
        for cl in &b.clusters {
            let rebuilt = cl.state().unwrap();
            let labels: Vec<&str> = cl.members.iter().map(|l| l.as_str()).collect();
            let direct = unimeas::analysis::ghz_factor(&flipped, &labels, 1e-9, true).unwrap().unwrap();
            prop_assert!(approx_eq(&rebuilt, &direct.state().unwrap(), 1e-9, true).unwrap());
        }
    }

    #[test]
    fn cluster_measure_invariant_under_order_and_phase(m in 1usize..=6, pair in pair_strategy(0.0), phase in 0.0f64..std::f64::consts::TAU, rot in 0usize..6) {
        let members: Vec<Label> = (0..m).map(|i| Label::new(format!("x{i}")).unwrap()).collect();
        let base = CorrelationCluster { members: members.clone(), coefficients: [pair.0, pair.1], relabeling: None };
        let mut moved = base.clone();
        moved.members.rotate_left(rot % m);
        let p = Amplitude::from_polar(1.0, phase);
        moved.coefficients = [pair.0 * p, pair.1 * p];
        prop_assert_eq!(cluster_measure(&base), cluster_measure(&moved));
    }

    #[test]
    fn agreement_is_one_iff_all_branches_match(state in state_strategy(2, 5), a in any::<usize>(), b in any::<usize>()) {
        let n = state.num_qubits();
        let GateOp::Swap { a, b } = gate_from(2, a, b, n) else { unreachable!() };
        let set = state.branches();
        let rep = agreement(&set, &[(a.as_str(), b.as_str())]).unwrap();
        let all_match = set.branches().iter().all(|br| {
            set.symbol(br, a.as_str()).unwrap() == set.symbol(br, b.as_str()).unwrap()
        });
        prop_assert_eq!(all_match, rep.disagreement[0] == 0.0);
        if all_match {
            prop_assert!((rep.aggregate[0] - 1.0).abs() < 1e-9);
        }
        prop_assert!((rep.aggregate[0] + rep.disagreement[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn branch_expansion_reconstructs(state in state_strategy(1, 6), mask in any::<u8>()) {
        let per: Vec<Basis> = (0..state.num_qubits())
            .map(|p| if (mask >> p) & 1 == 1 { Basis::X } else { Basis::Z })
            .collect();
        let set = branch_decompose(&state, &BasisChoice::new(per)).unwrap();
        prop_assert!((set.total_probability() - 1.0).abs() < 1e-9);
        let back = set.reconstruct().unwrap();
        prop_assert!(max_deviation(&back, &state, false).unwrap() < 1e-10);
    }

    #[test]
    fn tensor_is_associative(a in state_strategy(1, 3), b in state_strategy(1, 3), cst in state_strategy(1, 3)) {
        let rename = |s: &PureState, p: &str| {
            let names: Vec<String> = (0..s.num_qubits()).map(|i| format!("{p}{i}")).collect();
            PureState::from_amplitudes(register(&names), s.amplitudes().to_vec()).unwrap()
        };
        let (a, b, cst) = (rename(&a, "a"), rename(&b, "b"), rename(&cst, "c"));
        let left = tensor(&tensor(&a, &b).unwrap(), &cst).unwrap();
        let right = tensor(&a, &tensor(&b, &cst).unwrap()).unwrap();
        prop_assert_eq!(left.register(), right.register());
        for (x, y) in left.amplitudes().iter().zip(right.amplitudes()) {
            prop_assert!((x - y).norm() <= 4.0 * f64::EPSILON * x.norm().max(f64::MIN_POSITIVE));
        }
    }
}

#[test]
fn tensor_is_exactly_associative_on_dyadic_amplitudes() {
    let dyadic = |names: &[&str], v: &[f64]| {
        PureState::from_amplitudes(
            Register::new(names.iter().copied()).unwrap(),
            v.iter().map(|&x| c(x, -x / 2.0)).collect(),
        )
        .unwrap()
    };
    // Norms are powers of two so normalization is exact.
    let a = dyadic(&["a"], &[0.5, 0.5]);
    let b = dyadic(&["b0", "b1"], &[0.25, 0.25, 0.25, 0.25]);
    let d = dyadic(&["d"], &[1.0, 0.0]);
    let left = tensor(&tensor(&a, &b).unwrap(), &d).unwrap();
    let right = tensor(&a, &tensor(&b, &d).unwrap()).unwrap();
    assert_eq!(left, right);
}

#[test]
fn imprint_depends_on_basis() {
    // |↓↑⟩: imprint a→b flips b; conjugated by rotations it does not.
    let start = basis_state(&["a", "b"], &[1, 0]);
    let plain = imprint(&start, "a", "b").unwrap();
    let rot = [GateOp::rotate_basis("a"), GateOp::rotate_basis("b")];
    let mut conj = rot.to_vec();
    conj.push(GateOp::imprint("a", "b"));
    conj.extend(rot);
    let rotated = apply_script(&start, &conj).unwrap();
    assert_eq!(plain, basis_state(&["a", "b"], &[1, 1]));
    assert!(max_diff(&rotated, &start) < 1e-15);
}
