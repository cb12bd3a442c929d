use anyonforge_core::braid::{distance, evaluate, BraidWord, Letter};
use anyonforge_core::fusion::{braid_generator, FusionBasis};
use anyonforge_core::grouping::Grouping;
use anyonforge_core::{AnyonModel, CMatrix, Charge};

/// Applies elementary letters to `basis`, following the leaf permutation.
fn product(model: &AnyonModel, basis: &FusionBasis, letters: &[(usize, bool)]) -> (CMatrix, Vec<Charge>) {
    let mut current = basis.clone();
    let mut m = CMatrix::identity(basis.dim());
    for &(p, inv) in letters {
        let g = braid_generator(model, &current, p, inv).unwrap();
        m = &g.matrix * &m;
        current = g.target;
    }
    (m, current.leaves().to_vec())
}

fn leaf_systems(max: usize) -> Vec<Vec<Charge>> {
    let mut out = Vec::new();
    for n in 2..=max {
        for mask in 0..(1u32 << n) {
            out.push(
                (0..n)
                    .map(|i| if mask >> i & 1 == 1 { Charge::ONE } else { Charge::HALF })
                    .collect(),
            );
        }
    }
    out
}

/// Yang–Baxter and far commutativity on every system of up to six strands
/// with charges 1/2 and 1, in every total-charge sector.
#[test]
fn braid_group_relations_hold() {
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for k in [2, 3, 5, 8] {
        let model = AnyonModel::new(k).unwrap();
        for leaves in leaf_systems(6) {
            let n = leaves.len();
            for total in model.charges() {
                let basis = FusionBasis::enumerate(&model, &leaves, total).unwrap();
                if basis.dim() == 0 {
                    continue;
                }
                for i in 1..n {
                    for inv in [false, true] {
                        if i + 1 < n {
                            let (l, ll) = product(&model, &basis, &[(i, inv), (i + 1, inv), (i, inv)]);
                            let (r, rl) = product(&model, &basis, &[(i + 1, inv), (i, inv), (i + 1, inv)]);
                            assert_eq!(ll, rl);
                            worst = worst.max(l.max_abs_diff(&r));
                            checked += 1;
                        }
                        for j in i + 2..n {
                            let (l, ll) = product(&model, &basis, &[(i, inv), (j, inv)]);
                            let (r, rl) = product(&model, &basis, &[(j, inv), (i, inv)]);
                            assert_eq!(ll, rl);
                            worst = worst.max(l.max_abs_diff(&r));
                            checked += 1;
                        }
                    }
                }
            }
        }
    }
    assert!(checked > 1000);
    assert!(worst < 1e-9, "largest braid relation residual {worst:e}");
}

#[test]
fn generators_are_unitary_and_invertible() {
    for k in [2, 3, 5, 8] {
        let model = AnyonModel::new(k).unwrap();
        for leaves in leaf_systems(5) {
            let basis = FusionBasis::enumerate(&model, &leaves, leaves[0]).unwrap();
            if basis.dim() == 0 {
                continue;
            }
            for i in 1..leaves.len() {
                let (m, _) = product(&model, &basis, &[(i, false)]);
                assert!(m.is_unitary(1e-10));
                let (back, back_leaves) = product(&model, &basis, &[(i, false), (i, true)]);
                assert_eq!(back_leaves, leaves);
                assert!(back.max_abs_diff(&CMatrix::identity(basis.dim())) < 1e-12);
            }
        }
    }
}

/// Two charge-1 strands at k = 3: the exchange eigenvalues in the channels
/// 0 and 1 differ by a tenth root of unity, so σ₁¹⁰ is a pure phase.
#[test]
fn fibonacci_exchange_has_period_ten() {
    let model = AnyonModel::new(3).unwrap();
    let leaves = [Charge::ONE, Charge::ONE];
    let power = |n: usize, total: Charge| {
        let basis = FusionBasis::enumerate(&model, &leaves, total).unwrap();
        let w = BraidWord::new(2, vec![Letter::new(1, 1); n]).unwrap();
        evaluate(&model, &basis, &Grouping::singletons(2), &w)
            .unwrap()
            .op
            .matrix[(0, 0)]
    };
    let direct_sum = |n: usize| CMatrix::diagonal(&[power(n, Charge::VACUUM), power(n, Charge::ONE)]);
    let id = CMatrix::identity(2);
    assert!(distance(&direct_sum(10), &id).unwrap() < 1e-9);
    for n in 1..10 {
        assert!(distance(&direct_sum(n), &id).unwrap() > 1e-3, "period divides {n}");
    }
}

/// Within a sector where both blocks have definite charge, exchanging a
/// single anyon with a pair acts like exchanging two anyons of those charges.
#[test]
fn composite_exchange_matches_coarse_exchange() {
    let model = AnyonModel::new(3).unwrap();
    let fine = FusionBasis::enumerate(&model, &[Charge::HALF; 3], Charge::HALF).unwrap();
    let grouping = Grouping::from_sizes(&[1, 2]).unwrap();
    let grouped = anyonforge_core::grouping::regroup(&model, &fine, &grouping).unwrap();
    let w = BraidWord::new(2, [Letter::new(1, 1)]).unwrap();
    let u = evaluate(&model, &fine, &grouping, &w).unwrap();
    let after = anyonforge_core::grouping::regroup(&model, &u.op.target, &u.grouping).unwrap();
    for (i, t) in grouped.trees().iter().enumerate() {
        let pair = t.block_charges[1];
        let image = u.op.matrix.mul_vec(&grouped.vector(i));
        let j = after.find(&[pair, Charge::HALF], &[pair, Charge::HALF]).unwrap();
        let z = anyonforge_core::linalg::inner(&after.vector(j), &image);
        let r = model.symbols().r(Charge::HALF, pair, Charge::HALF).unwrap();
        assert!((z - r).norm() < 1e-10, "block charge {pair}");
    }
}

/// A charge-0 block can be moved past anything without effect.
#[test]
fn vacuum_blocks_braid_trivially() {
    for k in [2, 3, 5] {
        let model = AnyonModel::new(k).unwrap();
        let fine = FusionBasis::enumerate(&model, &[Charge::HALF; 4], Charge::VACUUM).unwrap();
        let grouping = Grouping::from_sizes(&[1, 2, 1]).unwrap();
        let grouped = anyonforge_core::grouping::regroup(&model, &fine, &grouping).unwrap();
        let a = Charge::HALF;
        let phase = model.symbols().r(a, a, Charge::VACUUM).unwrap();
        let cases = [
            (
                vec![Letter::new(1, 1)],
                [Charge::VACUUM, a, a],
                anyonforge_core::linalg::ONE,
            ),
            (
                vec![Letter::new(2, -1)],
                [a, a, Charge::VACUUM],
                anyonforge_core::linalg::ONE,
            ),
            (
                vec![Letter::new(1, 1), Letter::new(2, 1)],
                [Charge::VACUUM, a, a],
                phase,
            ),
        ];
        for (word, charges, want) in cases {
            let w = BraidWord::new(3, word).unwrap();
            let u = evaluate(&model, &fine, &grouping, &w).unwrap();
            let i = grouped
                .trees()
                .iter()
                .position(|t| t.block_charges[1] == Charge::VACUUM)
                .unwrap();
            let image = u.op.matrix.mul_vec(&grouped.vector(i));
            let after = anyonforge_core::grouping::regroup(&model, &u.op.target, &u.grouping).unwrap();
            let j = after.trees().iter().position(|t| t.block_charges == charges).unwrap();
            let z = anyonforge_core::linalg::inner(&after.vector(j), &image);
            assert!((z - want).norm() < 1e-10, "k={k} z={z}");
        }
    }
}
