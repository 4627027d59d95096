mod common;

use proptest::prelude::*;
use pulso_core::lexicon::{canonical_form, load_lexicon, LexiconPaths};
use pulso_core::nlp::analyze_text;
use pulso_core::stats::{correlation_test, pearson_r, regularized_incomplete_beta};
use pulso_core::synth::{generate, SynthConfig};
use pulso_core::{
    classify_candidate, national_shares, province_table, score_sentence, suggest_terms, tokenize,
    tweet_score, AggregateState, Lexicon, OfficialResult, ScorerOptions, SentimentLabel,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::function::beta::beta_reg;

use common::*;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn campaign_lexicon() -> Lexicon {
    load_lexicon(&LexiconPaths::in_dir(data_dir().join("lexicon"))).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn scorer_matches_oracle(seed in any::<u64>()) {
        let mut r = rng(seed);
        let model = random_lexicon(&mut r);
        let lexicon = model.build();
        let tokens = random_sentence(&mut r);
        let got = score_sentence(&tokens, &lexicon);
        prop_assert_eq!((got.attribute, got.score), oracle_score(&tokens, &model));
    }

    #[test]
    fn tokenizing_canonical_words_is_identity(seed in any::<u64>()) {
        let tokens = random_sentence(&mut rng(seed));
        prop_assert_eq!(tokenize(&tokens.join(" "), ScorerOptions::default()), tokens);
    }

    #[test]
    fn links_never_change_scores(seed in any::<u64>(), at in any::<prop::sample::Index>()) {
        let lexicon = campaign_lexicon();
        let mut words = random_sentence(&mut rng(seed));
        prop_assume!(!words.is_empty());
        let base = analyze_text(&words.join(" "), &lexicon, ScorerOptions::default());
        let i = at.index(words.len() + 1);
        words.insert(i, "https://t.co/Xy9".to_string());
        let with_link = analyze_text(&words.join(" "), &lexicon, ScorerOptions::default());
        prop_assert_eq!(base, with_link);
    }

    #[test]
    fn unknown_tokens_only_split_phrases(seed in any::<u64>()) {
        // appending words outside the lexicon never changes the score
        let lexicon = campaign_lexicon();
        let words = random_sentence(&mut rng(seed));
        prop_assume!(!words.is_empty());
        let base = analyze_text(&words.join(" "), &lexicon, ScorerOptions::default());
        let padded = format!("{} zzqx wpfk", words.join(" "));
        prop_assert_eq!(base, analyze_text(&padded, &lexicon, ScorerOptions::default()));
    }

    #[test]
    fn single_word_scores_ignore_order(seed in any::<u64>(), shuffle_seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let lexicon = Lexicon::from_entries(
            ["macri", "scioli"],
            [],
            ["gana", "futuro"],
            ["miedo", "ajuste"],
        )
        .unwrap();
        let mut words = random_sentence(&mut rng(seed));
        let a = score_sentence(&words, &lexicon).score;
        words.shuffle(&mut rng(shuffle_seed));
        prop_assert_eq!(a, score_sentence(&words, &lexicon).score);
    }

    #[test]
    fn tweet_score_invariances(
        mut scores in prop::collection::vec(-50i64..50, 0..30),
        k in 1i64..10_000,
        shuffle_seed in any::<u64>(),
    ) {
        use rand::seq::SliceRandom;
        let label = tweet_score(&scores);
        prop_assert_eq!(label.value(), scores.iter().sum::<i64>().signum() as i8);
        let scaled: Vec<i64> = scores.iter().map(|s| s * k).collect();
        prop_assert_eq!(tweet_score(&scaled), label);
        scores.shuffle(&mut rng(shuffle_seed));
        prop_assert_eq!(tweet_score(&scores), label);
    }

    #[test]
    fn monoid_laws(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b, c) = (random_state(&mut r), random_state(&mut r), random_state(&mut r));
        let m = |x: &AggregateState, y: &AggregateState| x.clone().merged(y);
        prop_assert_eq!(m(&a, &AggregateState::new()), a.clone());
        prop_assert_eq!(m(&a, &b), m(&b, &a));
        prop_assert_eq!(m(&m(&a, &b), &c), m(&a, &m(&b, &c)));
        prop_assert_eq!(
            m(&a, &b).considered_total(),
            a.considered_total() + b.considered_total()
        );
    }

    #[test]
    fn shares_sum_to_hundred_and_table_conserves_tweets(seed in any::<u64>()) {
        let mut r = rng(seed);
        let mut state = AggregateState::new();
        for _ in 0..300 {
            state.fold(&random_tweet(&mut r));
        }
        let official = [
            OfficialResult::new("Salta", 10, 20),
            OfficialResult::new("Córdoba", 30, 5),
            OfficialResult::new("Jujuy", 7, 7),
        ];
        let table = province_table(&state, &official);
        let row_sum: u64 = table.rows.iter().map(|row| row.tweets()).sum();
        prop_assert_eq!(row_sum, table.positive_total);
        prop_assert!(table.located_total <= table.positive_total);
        prop_assert_eq!(table.official_rows().count(), 3);
        if let Ok(sh) = national_shares(&state) {
            prop_assert!((sh.pct_macri + sh.pct_scioli - 100.0).abs() <= 1e-9);
            prop_assert_eq!(sh.n_macri + sh.n_scioli, table.positive_total);
            prop_assert!(sh.total <= state.total_with(SentimentLabel::Positivo));
        }
    }

    #[test]
    fn fold_equals_merge_of_parts(seed in any::<u64>(), cut in any::<prop::sample::Index>()) {
        let mut r = rng(seed);
        let tweets: Vec<_> = (0..200).map(|_| random_tweet(&mut r)).collect();
        let (left, right) = tweets.split_at(cut.index(tweets.len() + 1));
        let mut whole = AggregateState::new();
        whole.extend(&tweets);
        let mut a = AggregateState::new();
        a.extend(left);
        let mut b = AggregateState::new();
        b.extend(right);
        prop_assert_eq!(a.merged(&b), whole);
    }

    #[test]
    fn candidate_label_ignores_case(seed in any::<u64>(), text in "[ a-zA-ZáéíóúñÑ#@]{0,60}") {
        let recased = random_case(&mut rng(seed), &text);
        prop_assert_eq!(classify_candidate(&text), classify_candidate(&recased));
        for name in ["MACRI", "mAcRi", "Scioli"] {
            let with = format!("{text} {name}");
            prop_assert_eq!(
                classify_candidate(&with),
                classify_candidate(&random_case(&mut rng(seed), &with))
            );
        }
    }

    #[test]
    fn pearson_matches_exact_integer_oracle(
        pairs in prop::collection::vec((-1_000_000i64..1_000_000, -1_000_000i64..1_000_000), 2..=30)
    ) {
        let (x, y): (Vec<i64>, Vec<i64>) = pairs.into_iter().unzip();
        let xf: Vec<f64> = x.iter().map(|&v| v as f64).collect();
        let yf: Vec<f64> = y.iter().map(|&v| v as f64).collect();
        match exact_pearson(&x, &y) {
            Some(want) => {
                let got = pearson_r(&xf, &yf).unwrap();
                prop_assert!((got - want).abs() <= 1e-12, "got {got}, want {want}");
                prop_assert_eq!(got, pearson_r(&yf, &xf).unwrap());
            }
            None => prop_assert!(pearson_r(&xf, &yf).is_err()),
        }
    }

    #[test]
    fn pearson_affine_invariance(
        pairs in prop::collection::vec((-1000.0f64..1000.0, -1000.0f64..1000.0), 3..=30),
        scale in 0.01f64..100.0,
        shift in -1e4f64..1e4,
    ) {
        let (x, y): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let Ok(r) = pearson_r(&x, &y) else { return Ok(()) };
        let x2: Vec<f64> = x.iter().map(|v| v * scale + shift).collect();
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        prop_assert!((pearson_r(&x2, &y).unwrap() - r).abs() < 1e-9);
        prop_assert!((pearson_r(&neg, &y).unwrap() + r).abs() < 1e-12);
    }

    #[test]
    fn p_value_agrees_with_reference_beta(r in -0.999f64..0.999, n in 3usize..200) {
        let df = (n - 2) as f64;
        let ours = regularized_incomplete_beta(df / 2.0, 0.5, (1.0 - r) * (1.0 + r));
        let reference = beta_reg(df / 2.0, 0.5, (1.0 - r) * (1.0 + r));
        prop_assert!((ours - reference).abs() <= 1e-10 * reference.max(1e-300) + 1e-14,
            "ours {ours} reference {reference}");
    }

    #[test]
    fn p_value_decreases_with_strength(a in 0.0f64..0.99, b in 0.0f64..0.99, n in 4usize..60) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let p = |r: f64| {
            let df = (n - 2) as f64;
            regularized_incomplete_beta(df / 2.0, 0.5, (1.0 - r) * (1.0 + r))
        };
        prop_assert!(p(hi) <= p(lo) + 1e-15);
    }

    #[test]
    fn suggestions_exclude_lexicon_and_ignore_order(seed in any::<u64>(), k in 1usize..30) {
        use rand::seq::SliceRandom;
        let lexicon = campaign_lexicon();
        let mut texts: Vec<String> = generate(&SynthConfig::new(60, seed)).into_iter().map(|r| r.text).collect();
        let a = suggest_terms(texts.iter().map(String::as_str), &lexicon, k);
        prop_assert!(a.len() <= k);
        prop_assert!(a.iter().all(|t| !lexicon.contains(&canonical_form(&t.term))));
        texts.shuffle(&mut rng(seed ^ 1));
        prop_assert_eq!(a, suggest_terms(texts.iter().map(String::as_str), &lexicon, k));
    }

    #[test]
    fn lexicon_save_reload_is_stable(seed in any::<u64>()) {
        let lexicon = random_lexicon(&mut rng(seed)).build();
        let dir = tempfile::tempdir().unwrap();
        let paths = LexiconPaths::in_dir(dir.path());
        lexicon.save(&paths).unwrap();
        let reloaded = load_lexicon(&paths).unwrap();
        prop_assert_eq!(&reloaded, &lexicon);
        reloaded.save(&paths).unwrap();
        prop_assert_eq!(load_lexicon(&paths).unwrap(), lexicon);
    }
}

#[test]
fn correlation_of_exact_line_is_degenerate() {
    let x = [1.0, 2.0, 3.0, 4.0, 5.0];
    let y: Vec<f64> = x.iter().map(|v| 3.0 * v - 7.0).collect();
    let res = correlation_test(&x, &y).unwrap();
    assert_eq!((res.r, res.p_value, res.degenerate), (1.0, 0.0, true));
}

#[test]
fn desk_check_most_mentioned_term_ranks_first() {
    // a 100-tweet corpus where "Macri" is the most frequent word; with a
    // lexicon that does not know it, it must head the suggestions
    let mut texts = Vec::new();
    for i in 0..100 {
        let mut t = String::from("Macri");
        if i % 2 == 0 {
            t.push_str(" balotaje");
        }
        if i % 3 == 0 {
            t.push_str(" hoy Macri");
        }
        if i % 5 == 0 {
            t.push_str(" Scioli");
        }
        texts.push(t);
    }
    let lexicon = Lexicon::from_entries(["zzz"], [], [], []).unwrap();
    let top = suggest_terms(texts.iter().map(String::as_str), &lexicon, 3);
    assert_eq!(top[0].term, "Macri");
    assert_eq!(top[0].count, 134);
    assert_eq!(top[1].term, "balotaje");
}
