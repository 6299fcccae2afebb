//! MAP, nDCG@k, and Macro-F1.

use crate::error::{Error, Result};
use crate::eval::ranked::{Qrels, RankedList};

/// Mean average precision over queries, binary relevance (grade >= 1),
/// truncated at `cutoff`. Average precision divides by the number of
/// relevant documents in the judgments. Queries with no relevant documents
/// are skipped.
pub fn mean_average_precision(runs: &[RankedList], qrels: &Qrels, cutoff: usize) -> Result<f64> {
    let mut total = 0.0;
    let mut evaluable = 0usize;
    for run in runs {
        let relevant_total = qrels.relevant_count(&run.query_id);
        if relevant_total == 0 {
            continue;
        }
        let mut hits = 0usize;
        let mut precision_sum = 0.0;
        for (rank0, doc) in run.doc_ids().take(cutoff).enumerate() {
            if qrels.grade(&run.query_id, doc) >= 1 {
                hits += 1;
                precision_sum += hits as f64 / (rank0 + 1) as f64;
            }
        }
        total += precision_sum / relevant_total as f64;
        evaluable += 1;
    }
    if evaluable == 0 {
        return Err(Error::DegenerateInput(
            "no query with relevant judgments".into(),
        ));
    }
    Ok(total / evaluable as f64)
}

/// Mean nDCG@k with gains 2^grade - 1 and log2(rank + 1) discounts. The
/// ideal ranking comes from the query's judged grades sorted descending.
/// A query whose ideal gain is zero contributes 0 and is counted.
pub fn ndcg_at_k(runs: &[RankedList], qrels: &Qrels, k: usize) -> Result<f64> {
    if runs.is_empty() {
        return Err(Error::DegenerateInput("no runs to evaluate".into()));
    }
    let mut total = 0.0;
    for run in runs {
        let dcg: f64 = run
            .doc_ids()
            .take(k)
            .enumerate()
            .map(|(rank0, doc)| {
                let g = qrels.grade(&run.query_id, doc);
                (2f64.powi(g as i32) - 1.0) / ((rank0 + 2) as f64).log2()
            })
            .sum();
        let mut grades: Vec<u32> = qrels
            .grades_for(&run.query_id)
            .iter()
            .map(|&(_, g)| g)
            .collect();
        grades.sort_unstable_by(|a, b| b.cmp(a));
        let idcg: f64 = grades
            .iter()
            .take(k)
            .enumerate()
            .map(|(rank0, &g)| (2f64.powi(g as i32) - 1.0) / ((rank0 + 2) as f64).log2())
            .sum();
        if idcg > 0.0 {
            total += dcg / idcg;
        }
    }
    Ok(total / runs.len() as f64)
}

/// Macro-averaged F1 over the chosen classes. Per-class F1 is 2PR/(P+R),
/// defined as 0 when the denominator is 0.
pub fn macro_f1(predictions: &[usize], gold: &[usize], classes: &[usize]) -> Result<f64> {
    if predictions.len() != gold.len() {
        return Err(Error::Shape(format!(
            "{} predictions against {} gold labels",
            predictions.len(),
            gold.len()
        )));
    }
    if classes.is_empty() {
        return Err(Error::Config("macro F1 needs at least one class".into()));
    }
    let mut sum = 0.0;
    for &class in classes {
        let tp = predictions
            .iter()
            .zip(gold)
            .filter(|&(&p, &g)| p == class && g == class)
            .count() as f64;
        let predicted = predictions.iter().filter(|&&p| p == class).count() as f64;
        let actual = gold.iter().filter(|&&g| g == class).count() as f64;
        let precision = if predicted > 0.0 { tp / predicted } else { 0.0 };
        let recall = if actual > 0.0 { tp / actual } else { 0.0 };
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        sum += f1;
    }
    Ok(sum / classes.len() as f64)
}

/// The two SemEval-convention classes (positive, negative) for Macro-F1.
pub const SEMEVAL_CLASSES: [usize; 2] = [0, 1];

#[cfg(test)]
mod tests {
    use super::*;

    fn run(q: &str, ids: &[&str]) -> RankedList {
        let scored: Vec<(String, f64)> = ids
            .iter()
            .enumerate()
            .map(|(i, d)| (d.to_string(), (ids.len() - i) as f64))
            .collect();
        RankedList::from_scores(q.to_string(), scored).unwrap()
    }

    #[test]
    fn relevant_first_is_perfect_ap() {
        let mut qrels = Qrels::new();
        qrels.insert("q1", "d1", 1);
        let runs = vec![run("q1", &["d1", "d2"])];
        assert!((mean_average_precision(&runs, &qrels, 1000).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn relevant_second_is_half_ap() {
        let mut qrels = Qrels::new();
        qrels.insert("q1", "d2", 1);
        let runs = vec![run("q1", &["d1", "d2"])];
        assert!((mean_average_precision(&runs, &qrels, 1000).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn perfect_ordering_is_ndcg_one() {
        let mut qrels = Qrels::new();
        qrels.insert("q1", "d1", 2);
        qrels.insert("q1", "d2", 1);
        qrels.insert("q1", "d3", 0);
        let runs = vec![run("q1", &["d1", "d2", "d3"])];
        assert!((ndcg_at_k(&runs, &qrels, 20).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn query_without_relevant_counts_as_zero_ndcg() {
        let mut qrels = Qrels::new();
        qrels.insert("q1", "d1", 1);
        qrels.insert("q2", "d9", 0);
        let runs = vec![run("q1", &["d1"]), run("q2", &["d1"])];
        // q1 scores 1, q2 contributes 0 but is counted
        assert!((ndcg_at_k(&runs, &qrels, 20).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn graded_ndcg_matches_hand_computed_table() {
        // run order: grades 1, 3, 0, 2 at ranks 1..4
        // DCG  = 1/log2(2) + 7/log2(3) + 0 + 3/log2(5)
        // IDCG = 7/log2(2) + 3/log2(3) + 1/log2(4)
        let mut qrels = Qrels::new();
        qrels.insert("q", "a", 1);
        qrels.insert("q", "b", 3);
        qrels.insert("q", "c", 0);
        qrels.insert("q", "d", 2);
        let runs = vec![run("q", &["a", "b", "c", "d"])];
        let dcg = 1.0 / 2f64.log2() + 7.0 / 3f64.log2() + 3.0 / 5f64.log2();
        let idcg = 7.0 / 2f64.log2() + 3.0 / 3f64.log2() + 1.0 / 4f64.log2();
        let want = dcg / idcg;
        assert!((ndcg_at_k(&runs, &qrels, 20).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn perfect_predictions_are_f1_one() {
        let gold = vec![0, 1, 2, 0, 1];
        assert!((macro_f1(&gold, &gold, &SEMEVAL_CLASSES).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn all_neutral_predictions_score_zero_over_polar_classes() {
        let gold = vec![0, 1, 0, 1];
        let pred = vec![2, 2, 2, 2];
        assert_eq!(macro_f1(&pred, &gold, &SEMEVAL_CLASSES).unwrap(), 0.0);
    }

    #[test]
    fn confusion_matrix_case_matches_hand_computed_values() {
        // gold:     0 0 0 1 1 2
        // pred:     0 1 0 1 0 2
        // class 0: tp 2, predicted 3, actual 3 -> P = R = 2/3, F1 = 2/3
        // class 1: tp 1, predicted 2, actual 2 -> P = R = 1/2, F1 = 1/2
        let gold = vec![0, 0, 0, 1, 1, 2];
        let pred = vec![0, 1, 0, 1, 0, 2];
        let got = macro_f1(&pred, &gold, &SEMEVAL_CLASSES).unwrap();
        assert!((got - (2.0 / 3.0 + 0.5) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn correct_neutrals_do_not_change_polar_f1() {
        let gold = vec![0, 1, 0];
        let pred = vec![0, 0, 0];
        let base = macro_f1(&pred, &gold, &SEMEVAL_CLASSES).unwrap();
        let gold2 = vec![0, 1, 0, 2, 2, 2];
        let pred2 = vec![0, 0, 0, 2, 2, 2];
        let extended = macro_f1(&pred2, &gold2, &SEMEVAL_CLASSES).unwrap();
        assert!((base - extended).abs() < 1e-12);
    }

    #[test]
    fn length_mismatch_is_shape_error() {
        assert!(matches!(
            macro_f1(&[0], &[0, 1], &SEMEVAL_CLASSES),
            Err(Error::Shape(_))
        ));
    }
}
