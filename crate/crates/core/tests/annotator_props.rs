//! Property suites for the weak annotators and confidence targets.

use proptest::prelude::*;

use cws_core::annotate::{
    bm25_score, build_index, confidence_target_class, confidence_target_rank, lexicon_annotate,
    pairwise_weak_label, Bm25Params, SentimentLexicon, WeakLabel,
};

proptest! {
    #[test]
    fn pairwise_labels_are_antisymmetric(
        a in 0.0f64..100.0,
        b in 0.0f64..100.0,
    ) {
        prop_assume!(a + b > 0.0);
        let WeakLabel::Scalar(fwd) = pairwise_weak_label(a, b).unwrap() else { unreachable!() };
        let WeakLabel::Scalar(rev) = pairwise_weak_label(b, a).unwrap() else { unreachable!() };
        prop_assert!((fwd + rev - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rank_confidence_targets_stay_in_unit_interval(
        y in 0.0f64..=1.0,
        w in 0.0f64..=1.0,
    ) {
        let c = confidence_target_rank(y, w).unwrap();
        prop_assert!((0.0..=1.0).contains(&c.0));
        if (y - w).abs() < 1e-15 {
            prop_assert!((c.0 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn class_confidence_targets_stay_in_unit_interval(
        raw_w in prop::collection::vec(0.01f64..1.0, 3),
        class in 0usize..3,
    ) {
        let sum: f64 = raw_w.iter().sum();
        let weak: Vec<f64> = raw_w.iter().map(|x| x / sum).collect();
        let mut truth = vec![0.0; 3];
        truth[class] = 1.0;
        let c = confidence_target_class(&truth, &weak).unwrap();
        prop_assert!((0.0..=1.0).contains(&c.0));
        let equal = confidence_target_class(&weak, &weak).unwrap();
        prop_assert!((equal.0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lexicon_annotations_are_normalized(
        entries in prop::collection::vec((0.01f64..1.0, 0.01f64..1.0, 0.01f64..1.0), 1..10),
        picks in prop::collection::vec(0usize..20, 1..12),
    ) {
        let mut lexicon = SentimentLexicon::new();
        for (i, (a, b, c)) in entries.iter().enumerate() {
            let sum = a + b + c;
            lexicon.insert(format!("w{i}"), [a / sum, b / sum, c / sum]).unwrap();
        }
        let sentence: Vec<String> = picks.iter().map(|p| format!("w{p}")).collect();
        let WeakLabel::Distribution(d) = lexicon_annotate(&lexicon, &sentence) else { unreachable!() };
        prop_assert!((d.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        prop_assert!(d.iter().all(|&p| p >= 0.0));
    }

    #[test]
    fn bm25_is_monotone_in_query_term_frequency(
        base_tf in 1usize..6,
        filler_len in 2usize..10,
        other_docs in 1usize..5,
    ) {
        // document d gets one more occurrence of the query term while its
        // length stays fixed; the score must not decrease
        let make_docs = |tf: usize| -> Vec<(String, Vec<String>)> {
            let mut docs = Vec::new();
            let mut tokens: Vec<String> = std::iter::repeat_n("q".to_string(), tf).collect();
            for i in 0..filler_len {
                tokens.push(format!("f{i}"));
            }
            docs.push(("d0".to_string(), tokens));
            for k in 0..other_docs {
                docs.push((format!("d{}", k + 1), vec!["x".to_string(), format!("f{k}")]));
            }
            docs
        };
        // swap one filler for the query term: same length, tf + 1
        let lo_docs = make_docs(base_tf);
        let mut hi_docs = lo_docs.clone();
        let pos = hi_docs[0].1.iter().position(|t| t.starts_with('f')).unwrap();
        hi_docs[0].1[pos] = "q".to_string();

        let params = Bm25Params::default();
        let lo = bm25_score(&build_index(&lo_docs).unwrap(), &params, &["q"], "d0").unwrap();
        let hi = bm25_score(&build_index(&hi_docs).unwrap(), &params, &["q"], "d0").unwrap();
        prop_assert!(hi >= lo - 1e-12, "tf {base_tf} -> {}: score {lo} -> {hi}", base_tf + 1);
    }
}
