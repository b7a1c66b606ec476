//! Markdown report; sections follow the JSON row order.

use std::fmt::Write;

use insightrank_core::engine::Recommendations;

pub fn render(rec: &Recommendations) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# Insights for `{}`\n", rec.dataset);
    if !rec.filter.is_empty() {
        let _ = writeln!(
            out,
            "Filter: {}\n",
            rec.filter
                .iter()
                .map(|f| format!("`{f}`"))
                .collect::<Vec<_>>()
                .join(", ")
        );
    }
    if rec.empty {
        out.push_str("No insights found.\n");
        return out;
    }
    for (i, row) in rec.rows.iter().enumerate() {
        let _ = writeln!(
            out,
            "## {}. {} (Ψ = {:.4}, {} candidates)\n",
            i + 1,
            row.display_name,
            row.psi,
            row.candidate_pool_size
        );
        for ins in &row.insights {
            let _ = writeln!(out, "- {}", ins.chart.insight_sentence);
        }
        out.push_str("\n| # | attributes | chart | φ | φ′ | score | methods |\n");
        out.push_str("|---|---|---|---|---|---|---|\n");
        for ins in &row.insights {
            let methods: Vec<String> = ins
                .methods
                .iter()
                .map(|m| format!("{} {:.3}", m.method_id, m.normalized_mean))
                .collect();
            let chart = serde_json::to_value(ins.chart.chart_type)
                .ok()
                .and_then(|v| v.as_str().map(String::from))
                .unwrap_or_default();
            let _ = writeln!(
                out,
                "| {} | {} | {} | {:.4} | {:.4} | {:.4} | {} |",
                ins.rank,
                ins.combination.columns.join(" × "),
                chart,
                ins.phi,
                ins.penalized_phi,
                ins.score,
                methods.join(", ")
            );
        }
        out.push('\n');
    }
    out
}
