use anyonforge_core::braid::{distance, evaluate, expand, BraidWord, Letter};
use anyonforge_core::fusion::FusionBasis;
use anyonforge_core::grouping::Grouping;
use anyonforge_core::{AnyonModel, CMatrix, Charge};
use proptest::prelude::*;

fn word(strands: usize, raw: &[(usize, bool)]) -> BraidWord {
    let letters = raw
        .iter()
        .map(|&(p, inv)| Letter::new(p % (strands - 1) + 1, if inv { -1 } else { 1 }));
    BraidWord::new(strands, letters).unwrap()
}

fn leaves_from(mask: u8, n: usize) -> Vec<Charge> {
    (0..n)
        .map(|i| if mask >> i & 1 == 1 { Charge::ONE } else { Charge::HALF })
        .collect()
}

fn setup(k: u32, mask: u8, n: usize) -> Option<(AnyonModel, FusionBasis)> {
    let model = AnyonModel::new(k).unwrap();
    let leaves = leaves_from(mask, n);
    let total = model.charges().into_iter().find(|&c| {
        FusionBasis::enumerate(&model, &leaves, c)
            .map(|b| b.dim() > 1)
            .unwrap_or(false)
    })?;
    let basis = FusionBasis::enumerate(&model, &leaves, total).unwrap();
    Some((model, basis))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn evaluation_is_a_homomorphism(
        k in prop::sample::select(vec![2u32, 3, 5, 8]),
        mask in 0u8..32,
        a in prop::collection::vec((0usize..8, any::<bool>()), 0..8),
        b in prop::collection::vec((0usize..8, any::<bool>()), 0..8),
    ) {
        let Some((model, basis)) = setup(k, mask, 5) else { return Ok(()) };
        let g = Grouping::singletons(5);
        let (wa, wb) = (word(5, &a), word(5, &b));
        let first = evaluate(&model, &basis, &g, &wa).unwrap();
        let second = evaluate(&model, &first.op.target, &first.grouping, &wb).unwrap();
        let whole = evaluate(&model, &basis, &g, &wa.concat(&wb).unwrap()).unwrap();
        prop_assert_eq!(whole.op.target.leaves(), second.op.target.leaves());
        let composed = &second.op.matrix * &first.op.matrix;
        prop_assert!(whole.op.matrix.max_abs_diff(&composed) < 1e-9);
    }

    #[test]
    fn a_word_followed_by_its_inverse_is_the_identity(
        k in prop::sample::select(vec![2u32, 3, 5, 8]),
        mask in 0u8..64,
        raw in prop::collection::vec((0usize..8, any::<bool>()), 1..10),
    ) {
        let Some((model, basis)) = setup(k, mask, 6) else { return Ok(()) };
        let g = Grouping::singletons(6);
        let w = word(6, &raw);
        let there = evaluate(&model, &basis, &g, &w).unwrap();
        let back = evaluate(&model, &there.op.target, &there.grouping, &w.inverse()).unwrap();
        prop_assert_eq!(back.op.target.leaves(), basis.leaves());
        let round = &back.op.matrix * &there.op.matrix;
        prop_assert!(round.max_abs_diff(&CMatrix::identity(basis.dim())) < 1e-9);
        prop_assert!(there.op.matrix.is_unitary(1e-9));
    }

    #[test]
    fn block_words_equal_their_expansion(
        k in prop::sample::select(vec![2u32, 3, 5]),
        raw in prop::collection::vec((0usize..8, any::<bool>()), 0..6),
    ) {
        let model = AnyonModel::new(k).unwrap();
        let basis = FusionBasis::enumerate(&model, &[Charge::HALF; 6], Charge::VACUUM).unwrap();
        let g = Grouping::from_sizes(&[1, 2, 2, 1]).unwrap();
        let w = word(4, &raw);
        let blocks = evaluate(&model, &basis, &g, &w).unwrap();
        let fine = evaluate(&model, &basis, &Grouping::singletons(6), &expand(&w, &g).unwrap()).unwrap();
        prop_assert!(blocks.op.matrix.max_abs_diff(&fine.op.matrix) < 1e-9);
    }
}

#[test]
fn distance_ignores_global_phase() {
    let model = AnyonModel::new(5).unwrap();
    let (_, basis) = (
        0,
        FusionBasis::enumerate(&model, &[Charge::HALF; 4], Charge::VACUUM).unwrap(),
    );
    let w = BraidWord::new(4, [Letter::new(2, 1), Letter::new(1, -1), Letter::new(3, 1)]).unwrap();
    let u = evaluate(&model, &basis, &Grouping::singletons(4), &w)
        .unwrap()
        .op
        .matrix;
    let phased = u.scale(anyonforge_core::C64::from_polar(1.0, 0.7));
    assert!(distance(&u, &phased).unwrap() < 1e-12);
    assert!(distance(&u, &CMatrix::identity(basis.dim())).unwrap() > 1e-3);
}
