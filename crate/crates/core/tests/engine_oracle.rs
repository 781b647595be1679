mod oracle;

use analogy_core::engine::score::euclidean_distance;
use analogy_core::synth::random_set;
use analogy_core::{
    cosine, full_ranking, pair_search, rank_of, score_bolukbasi, score_cosadd, score_cosmul, solve,
    Algorithm, AnalogyQuery, ConstraintMode, Cutoff, EmbeddingSet, ShapeRules, VocabView,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MODES: [ConstraintMode; 2] = [ConstraintMode::ExcludeInputs, ConstraintMode::Unconstrained];

fn algorithms() -> Vec<Algorithm> {
    vec![
        Algorithm::CosAdd,
        Algorithm::cosmul(),
        Algorithm::CosMul {
            epsilon: 0.001,
            shifted: false,
        },
        Algorithm::bolukbasi(0.8),
        Algorithm::bolukbasi(1.0),
        Algorithm::bolukbasi(1.2),
    ]
}

fn query(set: &EmbeddingSet, (a, b, c): (usize, usize, usize), algorithm: Algorithm, mode: ConstraintMode) -> AnalogyQuery {
    AnalogyQuery::new(set.token(a), set.token(b), set.token(c))
        .algorithm(algorithm)
        .mode(mode)
}

fn check_against_oracle(view: &VocabView<'_>, terms: (usize, usize, usize)) {
    let set = view.base();
    let admitted: Vec<usize> = view.indices().collect();
    for algorithm in algorithms() {
        for mode in MODES {
            let q = query(set, terms, algorithm, mode);
            let expected = oracle::ranking(set, &admitted, terms, algorithm, mode);
            let got = full_ranking(view, &q).unwrap();
            assert_eq!(got.evaluated_count, expected.len());
            let got_order: Vec<usize> = got.candidates.iter().map(|c| c.index).collect();
            let expected_order: Vec<usize> = expected.iter().map(|e| e.0).collect();
            assert_eq!(got_order, expected_order, "{algorithm} {mode}");
            for (c, e) in got.candidates.iter().zip(&expected) {
                assert!((c.score - e.1).abs() < 1e-6, "{algorithm} {mode}: {} vs {}", c.score, e.1);
            }

            let top = solve(view, &q.clone().top_n(5)).unwrap();
            assert_eq!(top.candidates, got.candidates[..5.min(got.candidates.len())]);
        }
    }
}

#[test]
fn solve_matches_exhaustive_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (seed, (vocab, dim)) in [(50, 4), (100, 8), (200, 16), (60, 3)].into_iter().enumerate() {
        let set = random_set(vocab, dim, seed as u64);
        let view = set.full_view();
        for _ in 0..3 {
            let terms = (rng.random_range(0..vocab), rng.random_range(0..vocab), rng.random_range(0..vocab));
            check_against_oracle(&view, terms);
        }
    }
}

#[test]
fn solve_matches_reference_on_restricted_views() {
    let set = random_set(120, 6, 5);
    let view = set.view(Cutoff::Top(70), ShapeRules::NONE).unwrap();
    // c lies outside the view but is still a usable input.
    check_against_oracle(&view, (3, 10, 100));
}

#[test]
fn rank_of_agrees_with_reference_position() {
    let set = random_set(100, 8, 21);
    let view = set.full_view();
    let admitted: Vec<usize> = view.indices().collect();
    let terms = (4, 17, 33);
    for algorithm in algorithms() {
        for mode in MODES {
            let q = query(&set, terms, algorithm, mode);
            let expected = oracle::ranking(&set, &admitted, terms, algorithm, mode);
            for i in 0..set.len() {
                let pos = expected.iter().position(|e| e.0 == i).map(|p| p + 1);
                assert_eq!(rank_of(&view, &q, set.token(i)).unwrap(), pos);
            }
        }
    }
}

#[test]
fn pair_search_matches_quadratic_reference() {
    let set = random_set(60, 8, 3);
    let view = set.full_view();
    let admitted: Vec<usize> = view.indices().collect();
    for delta in [0.8, 1.0, 1.2] {
        let expected = oracle::pairs(&set, &admitted, 0, 1, delta);
        let got = pair_search(&view, set.token(0), set.token(1), delta, usize::MAX).unwrap();
        assert_eq!(got.len(), expected.len());
        for (g, e) in got.iter().zip(&expected) {
            assert_eq!((g.b_index, g.d_index), (e.0, e.1));
            assert!((g.score - e.2).abs() < 1e-6);
        }
        let limited = pair_search(&view, set.token(0), set.token(1), delta, 7).unwrap();
        assert_eq!(limited[..], got[..7]);
    }
}

#[test]
fn free_scoring_functions_match_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let set = random_set(400, 12, 8);
    for _ in 0..100 {
        let [a, b, c, d] = [(); 4].map(|_| set.vector(rng.random_range(0..set.len())));
        assert!((cosine(a, b).unwrap() - oracle::cos(a, b)).abs() < 1e-6);
        let expected = oracle::score(Algorithm::CosAdd, a, b, c, d);
        assert!((score_cosadd(a, b, c, d).unwrap() - expected).abs() < 1e-6);
        let expected = oracle::score(Algorithm::cosmul(), a, b, c, d);
        assert!((score_cosmul(a, b, c, d, 0.001).unwrap() - expected).abs() < 1e-6);
        for delta in [0.8, 1.0, 1.2] {
            let expected = oracle::score(Algorithm::bolukbasi(delta), a, b, c, d);
            assert!((score_bolukbasi(a, c, b, d, delta).unwrap() - expected).abs() < 1e-6);
        }
    }
}

#[test]
fn constrained_top_is_first_non_input_of_unconstrained_ranking() {
    for seed in 0..20 {
        let set = random_set(80, 6, 100 + seed);
        let view = set.full_view();
        for algorithm in algorithms() {
            let free = query(&set, (1, 2, 3), algorithm, ConstraintMode::Unconstrained);
            let full = full_ranking(&view, &free).unwrap();
            let first = full
                .candidates
                .iter()
                .find(|c| ![1, 2, 3].contains(&c.index))
                .unwrap();
            let constrained = solve(&view, &free.clone().mode(ConstraintMode::ExcludeInputs)).unwrap();
            assert_eq!(constrained.top().unwrap().index, first.index);
        }
    }
}

#[test]
fn shared_candidates_score_identically_across_modes() {
    let set = random_set(90, 5, 44);
    let view = set.full_view();
    for algorithm in algorithms() {
        let free = full_ranking(&view, &query(&set, (7, 8, 9), algorithm, ConstraintMode::Unconstrained)).unwrap();
        let constrained = full_ranking(&view, &query(&set, (7, 8, 9), algorithm, ConstraintMode::ExcludeInputs)).unwrap();
        assert!(constrained.evaluated_count <= free.evaluated_count);
        for c in &constrained.candidates {
            let f = free.candidates.iter().find(|f| f.index == c.index).unwrap();
            assert_eq!(f.score.to_bits(), c.score.to_bits());
        }
    }
}

#[test]
fn cosmul_scores_are_finite_and_non_negative() {
    for seed in 0..10 {
        let set = random_set(100, 4, seed);
        let q = query(&set, (0, 1, 2), Algorithm::cosmul(), ConstraintMode::Unconstrained);
        let full = full_ranking(&set.full_view(), &q).unwrap();
        assert!(full.candidates.iter().all(|c| c.score.is_finite() && c.score >= 0.0));
    }
}

#[test]
fn delta_one_is_sixty_degrees() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    for _ in 0..2000 {
        let dim = rng.random_range(2..10);
        let unit = |rng: &mut ChaCha8Rng| {
            let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.into_iter().map(|x| x / n).collect::<Vec<f64>>()
        };
        let (b, d) = (unit(&mut rng), unit(&mut rng));
        let dist = euclidean_distance(&b, &d);
        let cos = cosine(&b, &d).unwrap();
        if (dist - 1.0).abs() > 1e-9 {
            assert_eq!(dist <= 1.0, cos >= 0.5);
            checked += 1;
        }
    }
    assert!(checked > 1990);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn degenerate_cosadd_returns_b(seed in 0u64..10_000, a in 0usize..50, b in 0usize..50) {
        let set = random_set(50, 8, seed);
        let q = AnalogyQuery::new(set.token(a), set.token(b), set.token(a)).mode(ConstraintMode::Unconstrained);
        let list = solve(&set.full_view(), &q).unwrap();
        prop_assert_eq!(list.top().unwrap().index, b);
    }

    #[test]
    fn fixed_b_and_pair_scores_are_bitwise_equal(seed in 0u64..10_000, delta in 0.05f64..2.0) {
        let set = random_set(6, 4, seed);
        let view = set.full_view();
        let pairs = pair_search(&view, "w0", "w2", delta, usize::MAX).unwrap();
        let q = AnalogyQuery::new("w0", "w1", "w2")
            .algorithm(Algorithm::bolukbasi(delta))
            .mode(ConstraintMode::Unconstrained);
        let full = full_ranking(&view, &q).unwrap();
        for cand in &full.candidates {
            let via_pairs = pairs
                .iter()
                .find(|p| p.b_index == 1 && p.d_index == cand.index)
                .map_or(0.0, |p| p.score);
            prop_assert_eq!(via_pairs.to_bits(), cand.score.to_bits());
        }
    }

    #[test]
    fn results_are_sorted_with_consecutive_ranks(seed in 0u64..10_000, top_n in 1usize..40, alg in 0usize..6, free in any::<bool>()) {
        let set = random_set(30, 4, seed);
        let mode = if free { ConstraintMode::Unconstrained } else { ConstraintMode::ExcludeInputs };
        let q = query(&set, (0, 1, 2), algorithms()[alg], mode).top_n(top_n);
        let list = solve(&set.full_view(), &q).unwrap();
        prop_assert_eq!(list.candidates.len(), top_n.min(list.evaluated_count));
        for (i, c) in list.candidates.iter().enumerate() {
            prop_assert_eq!(c.rank, i + 1);
            if mode == ConstraintMode::ExcludeInputs {
                prop_assert!(c.index > 2);
            }
        }
        for w in list.candidates.windows(2) {
            prop_assert!(w[0].score >= w[1].score);
        }
    }
}
