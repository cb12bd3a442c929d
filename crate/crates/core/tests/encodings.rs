use anyonforge_core::braid::{evaluate, BraidWord, Letter};
use anyonforge_core::code::{leakage, multi_qubit_code, single_qubit_code, QubitCharges, SingleQubitScheme};
use anyonforge_core::grouping::Grouping;
use anyonforge_core::{AnyonModel, CMatrix, Charge, C64};
use proptest::prelude::*;

#[test]
fn registers_have_two_to_the_n_states() {
    for k in [2, 3, 5, 8] {
        let model = AnyonModel::new(k).unwrap();
        let charges = QubitCharges::for_level(k);
        for n in 1..=4 {
            let code = multi_qubit_code(&model, n, charges).unwrap();
            assert_eq!(code.computational().len(), 1 << n, "k={k} n={n}");
            assert_eq!(code.qubit_count(), n);
            let bits: Vec<Vec<u8>> = code.computational().iter().map(|(b, _)| b.clone()).collect();
            let mut sorted = bits.clone();
            sorted.sort();
            sorted.dedup();
            assert_eq!(sorted, bits);
            let g = code.computational_isometry();
            assert!((&g.adjoint() * &g).max_abs_diff(&CMatrix::identity(1 << n)) < 1e-12);
        }
        let single = single_qubit_code(&model, SingleQubitScheme::FourAnyon, charges).unwrap();
        assert_eq!(single.computational().len(), 2);
    }
}

#[test]
fn ising_registers_have_no_leakage_states() {
    let model = AnyonModel::new(2).unwrap();
    for n in 1..=4 {
        let code = multi_qubit_code(&model, n, QubitCharges::default()).unwrap();
        assert!(code.non_computational().is_empty());
    }
    let fib = multi_qubit_code(&AnyonModel::new(3).unwrap(), 2, QubitCharges::default()).unwrap();
    assert!(!fib.non_computational().is_empty());
}

/// Letters that bring the leaf sequence back to itself: equal neighbours
/// may be exchanged once, different ones only twice.
fn pure_letters(leaves: &[Charge], raw: &[(usize, bool)]) -> Vec<Letter> {
    let mut out = Vec::new();
    for &(p, inv) in raw {
        let p = p % (leaves.len() - 1) + 1;
        let l = Letter::new(p, if inv { -1 } else { 1 });
        out.push(l);
        if leaves[p - 1] != leaves[p] {
            out.push(l);
        }
    }
    out
}

fn braid_matrix(model: &AnyonModel, code: &anyonforge_core::code::CodeSpace, letters: Vec<Letter>) -> CMatrix {
    let n = code.basis().leaves().len();
    let w = BraidWord::new(n, letters).unwrap();
    let e = evaluate(model, code.basis(), &Grouping::singletons(n), &w).unwrap();
    assert_eq!(e.op.target.leaves(), code.basis().leaves());
    e.op.matrix
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn leakage_is_subadditive(
        k in prop::sample::select(vec![3u32, 5, 8]),
        a in prop::collection::vec((0usize..8, any::<bool>()), 0..8),
        b in prop::collection::vec((0usize..8, any::<bool>()), 0..8),
    ) {
        let model = AnyonModel::new(k).unwrap();
        let code = multi_qubit_code(&model, 2, QubitCharges::for_level(k)).unwrap();
        let leaves = code.basis().leaves().to_vec();
        let u = braid_matrix(&model, &code, pure_letters(&leaves, &a));
        let v = braid_matrix(&model, &code, pure_letters(&leaves, &b));
        let lu = leakage(&u, &code).unwrap().leakage_norm;
        let lv = leakage(&v, &code).unwrap().leakage_norm;
        let luv = leakage(&(&u * &v), &code).unwrap().leakage_norm;
        prop_assert!(luv <= lu + lv + 1e-12, "{luv} > {lu} + {lv}");
        prop_assert!(lu <= 1.0 + 1e-12);
    }
}

/// Braiding the two anyons of one qubit applies that qubit's pair phases and
/// leaves every other qubit alone.
#[test]
fn braids_inside_a_qubit_act_locally() {
    for k in [2, 3, 5, 8] {
        let model = AnyonModel::new(k).unwrap();
        let charges = QubitCharges::for_level(k);
        let code = multi_qubit_code(&model, 3, charges).unwrap();
        let b = charges.b;
        let r0 = model.symbols().r(b, b, Charge::VACUUM).unwrap();
        let r1 = model.symbols().r(b, b, Charge::ONE).unwrap();
        for qubit in 0..3 {
            let pos = 2 + 2 * qubit;
            let u = braid_matrix(&model, &code, vec![Letter::new(pos, 1)]);
            let report = leakage(&u, &code).unwrap();
            assert!(report.leakage_norm < 1e-12);
            let logical = code.logical(&u).unwrap();
            let phases: Vec<C64> = code
                .computational()
                .iter()
                .map(|(bits, _)| if bits[qubit] == 1 { r1 } else { r0 })
                .collect();
            assert!(
                logical.max_abs_diff(&CMatrix::diagonal(&phases)) < 1e-12,
                "k={k} qubit={qubit}"
            );
        }
    }
}

#[test]
fn exchanging_neighbouring_qubits_leaks_outside_ising() {
    let model = AnyonModel::new(3).unwrap();
    let code = multi_qubit_code(&model, 2, QubitCharges::for_level(3)).unwrap();
    let u = braid_matrix(&model, &code, vec![Letter::new(3, 1)]);
    assert!(leakage(&u, &code).unwrap().leakage_norm > 1e-3);
}
