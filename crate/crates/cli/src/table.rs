//! Aligned plain-text results table, one row per model and a fixed
//! three-subset column layout. An SVM placeholder row keeps the layout
//! aligned with the conventional seven-method comparison even though no SVM
//! is trained here.

use formbench::metrics::{EvaluationReport, SplitReport};

/// Canonical row order; evaluated models slot in, anything else appends.
const CANONICAL: [&str; 7] = ["mlr", "plsr", "svm", "ann1", "rf", "knn", "dnn"];

fn display_name(name: &str) -> String {
    match name {
        "mlr" => "MLR".into(),
        "plsr" => "PLSR".into(),
        "svm" => "SVM".into(),
        "ann1" => "ANN".into(),
        "rf" => "RF".into(),
        "knn" => "k-NN".into(),
        n if n.starts_with("dnn") => "DNN".into(),
        other => other.to_uppercase(),
    }
}

fn canonical_rank(name: &str) -> usize {
    let key = if name.starts_with("dnn") { "dnn" } else { name };
    CANONICAL
        .iter()
        .position(|&c| c == key)
        .unwrap_or(CANONICAL.len())
}

fn cells(part: Option<&SplitReport>) -> [String; 3] {
    match part {
        Some(p) => [
            format!("{:.2}", p.accuracy * 100.0),
            format!("{:.4}", p.rmse),
            format!("{:.4}", p.mae),
        ],
        None => ["--".into(), "--".into(), "--".into()],
    }
}

pub fn render(rows: &[(String, EvaluationReport)]) -> String {
    let mut ordered: Vec<(usize, &String, Option<&EvaluationReport>)> = rows
        .iter()
        .map(|(name, report)| (canonical_rank(name), name, Some(report)))
        .collect();
    let svm = "svm".to_string();
    ordered.push((canonical_rank("svm"), &svm, None));
    ordered.sort_by_key(|(rank, _, _)| *rank);

    let header_groups = ["Training Set", "Validation Set", "Test Set"];
    let sub = ["Acc(%)", "RMSE", "MAE"];
    let name_w = 8;
    let cell_w = 8;

    let mut out = String::new();
    out.push_str(&format!("{:<name_w$}", "Model"));
    for g in header_groups {
        out.push_str(&format!("  {:<24}", g));
    }
    out.push('\n');
    out.push_str(&format!("{:<name_w$}", ""));
    for _ in header_groups {
        out.push_str("  ");
        for s in sub {
            out.push_str(&format!("{:<cell_w$}", s));
        }
    }
    out.push('\n');
    out.push_str(&"-".repeat(name_w + 3 * (2 + 3 * cell_w)));
    out.push('\n');

    for (_, name, report) in ordered {
        out.push_str(&format!("{:<name_w$}", display_name(name)));
        let parts: [Option<&SplitReport>; 3] = match report {
            Some(r) => [Some(&r.train), Some(&r.validation), r.test.as_ref()],
            None => [None, None, None],
        };
        for part in parts {
            out.push_str("  ");
            for cell in cells(part) {
                out.push_str(&format!("{:<cell_w$}", cell));
            }
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use formbench::metrics::SplitReport;

    fn report(acc: f64) -> EvaluationReport {
        let part = SplitReport {
            accuracy: acc,
            rmse: 0.1,
            mae: 0.05,
            records: vec![],
        };
        EvaluationReport {
            train: part.clone(),
            validation: part.clone(),
            test: Some(part),
        }
    }

    #[test]
    fn svm_placeholder_row_is_always_present() {
        let rows = vec![("dnn".to_string(), report(0.8))];
        let text = render(&rows);
        assert!(text.contains("SVM"));
        assert!(text.contains("DNN"));
        assert!(text.contains("80.00"));
        assert!(text.contains("--"));
    }

    #[test]
    fn canonical_order_holds() {
        let rows = vec![
            ("dnn-ofdf".to_string(), report(0.9)),
            ("mlr".to_string(), report(0.5)),
        ];
        let text = render(&rows);
        let mlr_at = text.find("MLR").unwrap();
        let svm_at = text.find("SVM").unwrap();
        let dnn_at = text.find("DNN").unwrap();
        assert!(mlr_at < svm_at && svm_at < dnn_at);
    }
}
