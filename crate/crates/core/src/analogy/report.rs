use std::fmt::Write;

use super::{AnalogyResult, FilterRow};

fn field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

/// `category,n,accuracy,mrr` rows followed by the `overall_accuracy`,
/// `overall_mrr` and `average_mrr` summary rows.
pub fn result_csv(r: &AnalogyResult) -> String {
    let mut out = String::from("category,n,accuracy,mrr\n");
    for c in &r.per_category {
        let _ = writeln!(out, "{},{},{},{}", field(&c.name), c.n_questions, c.accuracy, c.mrr);
    }
    let nonempty = r.per_category.iter().filter(|c| c.n_questions > 0).count();
    let _ = writeln!(out, "overall_accuracy,{},{},", r.n_questions, r.overall_accuracy);
    let _ = writeln!(out, "overall_mrr,{},,{}", r.n_questions, r.overall_mrr);
    let _ = writeln!(out, "average_mrr,{},,{}", nonempty, r.average_mrr);
    out
}

/// `category,original,restricted,ratio` table.
pub fn filter_report_csv(rows: &[FilterRow]) -> String {
    let mut out = String::from("category,original,restricted,ratio\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{}", field(&r.category), r.original, r.restricted, r.ratio);
    }
    out
}
