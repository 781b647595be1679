mod oracle;

use analogy_core::synth::{OffsetFixture, PairLayout};
use analogy_core::{
    compare_modes, evaluate, evaluate_top_k, Algorithm, AnalogyDataset, Category, ConstraintMode,
    Cutoff, EmbeddingSet, ShapeRules,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Top-1 answer by exhaustive scoring over the whole set.
fn oracle_top(set: &EmbeddingSet, q: &analogy_core::Quadruple, algorithm: Algorithm, mode: ConstraintMode) -> usize {
    let admitted: Vec<usize> = (0..set.len()).collect();
    let terms = (
        set.index_of(&q.a).unwrap(),
        set.index_of(&q.b).unwrap(),
        set.index_of(&q.c).unwrap(),
    );
    oracle::ranking(set, &admitted, terms, algorithm, mode)[0].0
}

#[test]
fn perfect_offset_fixture_scores_one() {
    let (set, ds) = OffsetFixture::default().build().unwrap();
    for q in ds.categories().iter().flat_map(|c| &c.quadruples) {
        let top = oracle_top(&set, q, Algorithm::CosAdd, ConstraintMode::ExcludeInputs);
        assert_eq!(set.token(top), q.d);
    }
    for algorithm in Algorithm::all() {
        let report = evaluate(&set.full_view(), &ds, algorithm, ConstraintMode::ExcludeInputs).unwrap();
        assert_eq!(report.micro, 1.0, "{algorithm}");
        assert_eq!(report.macro_avg, 1.0, "{algorithm}");
        assert_eq!(report.evaluated(), ds.len());
        assert_eq!(report.skipped_oov(), 0);
    }
}

#[test]
fn randomized_splits_keep_micro_macro_identities() {
    let fixture = OffsetFixture {
        categories: 4,
        pairs: 5,
        offset: 0.4,
        noise: 0.9,
        layout: PairLayout::Crossed,
        seed: 3,
    };
    let (set, ds) = fixture.build().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let all: Vec<_> = ds.categories().iter().flat_map(|c| c.quadruples.clone()).collect();

    for _ in 0..10 {
        let mut shuffled = all.clone();
        shuffled.shuffle(&mut rng);
        let n_cats = rng.random_range(1..6);
        let mut cuts: Vec<usize> = (0..n_cats - 1).map(|_| rng.random_range(1..shuffled.len())).collect();
        cuts.sort_unstable();
        cuts.dedup();
        let mut categories = Vec::new();
        let mut start = 0;
        for (k, end) in cuts.into_iter().chain([shuffled.len()]).enumerate() {
            categories.push(Category {
                name: format!("split-{k}"),
                quadruples: shuffled[start..end].to_vec(),
            });
            start = end;
        }
        let split = AnalogyDataset::new(categories).unwrap();

        for mode in [ConstraintMode::ExcludeInputs, ConstraintMode::Unconstrained] {
            let report = evaluate(&set.full_view(), &split, Algorithm::CosAdd, mode).unwrap();
            let (mut correct, mut evaluated, mut acc_sum) = (0, 0, 0.0);
            for (cat, score) in split.categories().iter().zip(&report.per_category) {
                let expected = cat
                    .quadruples
                    .iter()
                    .filter(|q| set.token(oracle_top(&set, q, Algorithm::CosAdd, mode)) == q.d)
                    .count();
                assert_eq!(score.correct, expected);
                assert_eq!(score.evaluated + score.skipped_oov, cat.quadruples.len());
                correct += score.correct;
                evaluated += score.evaluated;
                acc_sum += score.accuracy;
            }
            assert_eq!(report.micro, correct as f64 / evaluated as f64);
            let macro_expected = acc_sum / split.categories().len() as f64;
            assert!((report.macro_avg - macro_expected).abs() < 1e-15);
            assert!((0.0..=1.0).contains(&report.micro) && (0.0..=1.0).contains(&report.macro_avg));
        }
    }
}

#[test]
fn oov_skips_are_counted_exactly() {
    let (set, ds) = OffsetFixture::default().build().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut planted = Vec::new();
    let categories = ds
        .categories()
        .iter()
        .map(|c| {
            let mut quadruples = c.quadruples.clone();
            let k = rng.random_range(0..6);
            for j in 0..k {
                let mut q = quadruples[j % c.quadruples.len()].clone();
                match j % 4 {
                    0 => q.a = format!("unknown{j}"),
                    1 => q.b = format!("unknown{j}"),
                    2 => q.c = format!("unknown{j}"),
                    _ => q.d = format!("unknown{j}"),
                }
                quadruples.push(q);
            }
            planted.push(k);
            Category {
                name: c.name.clone(),
                quadruples,
            }
        })
        .collect();
    let ds = AnalogyDataset::new(categories).unwrap();
    let report = evaluate(&set.full_view(), &ds, Algorithm::CosAdd, ConstraintMode::ExcludeInputs).unwrap();
    for (score, k) in report.per_category.iter().zip(planted) {
        assert_eq!(score.skipped_oov, k);
        assert_eq!(score.accuracy, 1.0);
    }
}

#[test]
fn larger_cutoffs_never_evaluate_fewer() {
    let (set, ds) = OffsetFixture::default().build().unwrap();
    let mut last = 0;
    for k in [1, 5, 10, 15, 20, 25, 30] {
        let view = set.view(Cutoff::Top(k), ShapeRules::NONE).unwrap();
        let report = evaluate(&view, &ds, Algorithm::CosAdd, ConstraintMode::ExcludeInputs).unwrap();
        assert!(report.evaluated() >= last);
        assert_eq!(report.evaluated() + report.skipped_oov(), ds.len());
        last = report.evaluated();
    }
    assert_eq!(last, ds.len());
}

#[test]
fn small_offsets_make_unconstrained_return_b() {
    let fixture = OffsetFixture {
        categories: 3,
        pairs: 6,
        offset: 0.3,
        noise: 1.0,
        layout: PairLayout::Crossed,
        seed: 12,
    };
    let (set, ds) = fixture.build().unwrap();
    let rows = compare_modes(&set.full_view(), &ds, &[Algorithm::CosAdd]).unwrap();
    let row = &rows[0];
    assert_eq!(row.constrained.micro, 1.0);
    assert_eq!(row.constrained_errors.total(), 0);

    let errors = row.unconstrained_errors;
    assert_eq!(
        errors.total(),
        row.unconstrained.evaluated() - row.unconstrained.correct()
    );
    assert!(errors.returned_b > errors.returned_c + errors.returned_other, "{errors:?}");

    let oracle_b = ds
        .categories()
        .iter()
        .flat_map(|c| &c.quadruples)
        .filter(|q| set.token(oracle_top(&set, q, Algorithm::CosAdd, ConstraintMode::Unconstrained)) == q.b)
        .count();
    assert_eq!(errors.returned_b, oracle_b);
}

#[test]
fn top_k_accuracy_is_at_least_top_1() {
    let fixture = OffsetFixture {
        noise: 1.0,
        offset: 0.3,
        layout: PairLayout::Crossed,
        ..OffsetFixture::default()
    };
    let (set, ds) = fixture.build().unwrap();
    let view = set.full_view();
    let top1 = evaluate(&view, &ds, Algorithm::cosmul(), ConstraintMode::Unconstrained).unwrap();
    let top5 = evaluate_top_k(&view, &ds, Algorithm::cosmul(), ConstraintMode::Unconstrained, 5).unwrap();
    assert!(top5.micro >= top1.micro);
    assert_eq!(top5.top_k, 5);
}
