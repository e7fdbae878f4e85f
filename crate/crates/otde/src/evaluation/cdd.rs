//! Critical-difference diagram emission: a fixed-layout SVG plus a
//! machine-readable TSV of ranks and clique memberships.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::Result;
use crate::evaluation::ranks::RankTable;

const WIDTH: f64 = 640.0;
const MARGIN: f64 = 90.0;
const AXIS_Y: f64 = 50.0;

fn x_for_rank(rank: f64, max_rank: f64) -> f64 {
    if max_rank <= 1.0 {
        return WIDTH / 2.0;
    }
    MARGIN + (rank - 1.0) / (max_rank - 1.0) * (WIDTH - 2.0 * MARGIN)
}

/// Renders the rank axis, method labels at their average ranks, and
/// horizontal clique bars. Output is byte-stable for identical input.
fn render_svg(table: &RankTable, cliques: &[Vec<usize>]) -> String {
    let order = table.rank_order();
    let m = order.len();
    let max_rank = m as f64;
    let bars: Vec<&Vec<usize>> = cliques.iter().filter(|c| c.len() >= 2).collect();
    let bar_band = 8.0 + bars.len() as f64 * 9.0;
    let labels_top = AXIS_Y + bar_band + 14.0;
    let rows_per_side = m.div_ceil(2);
    let height = labels_top + rows_per_side as f64 * 18.0 + 20.0;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{height:.1}\" viewBox=\"0 0 {WIDTH} {height:.1}\">"
    );
    let _ = writeln!(
        svg,
        "  <style>text {{ font-family: monospace; font-size: 12px; }}</style>"
    );

    // Rank axis with integer ticks.
    let _ = writeln!(
        svg,
        "  <line x1=\"{:.1}\" y1=\"{AXIS_Y}\" x2=\"{:.1}\" y2=\"{AXIS_Y}\" stroke=\"black\"/>",
        x_for_rank(1.0, max_rank),
        x_for_rank(max_rank, max_rank)
    );
    for tick in 1..=m {
        let x = x_for_rank(tick as f64, max_rank);
        let _ = writeln!(
            svg,
            "  <line x1=\"{x:.1}\" y1=\"{:.1}\" x2=\"{x:.1}\" y2=\"{:.1}\" stroke=\"black\"/>",
            AXIS_Y - 4.0,
            AXIS_Y + 4.0
        );
        let _ = writeln!(
            svg,
            "  <text x=\"{x:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{tick}</text>",
            AXIS_Y - 8.0
        );
    }

    // Clique bars just below the axis.
    for (k, clique) in bars.iter().enumerate() {
        let lo = clique
            .iter()
            .map(|&i| table.average_ranks[i])
            .fold(f64::INFINITY, f64::min);
        let hi = clique
            .iter()
            .map(|&i| table.average_ranks[i])
            .fold(f64::NEG_INFINITY, f64::max);
        let y = AXIS_Y + 8.0 + k as f64 * 9.0;
        let _ = writeln!(
            svg,
            "  <line x1=\"{:.1}\" y1=\"{y:.1}\" x2=\"{:.1}\" y2=\"{y:.1}\" stroke=\"black\" stroke-width=\"4\"/>",
            x_for_rank(lo, max_rank) - 3.0,
            x_for_rank(hi, max_rank) + 3.0
        );
    }

    // Method labels: best half on the left, the rest on the right, each
    // with a connector from its rank position.
    for (slot, &method_idx) in order.iter().enumerate() {
        let rank = table.average_ranks[method_idx];
        let x = x_for_rank(rank, max_rank);
        let left = slot < rows_per_side;
        let row = if left { slot } else { slot - rows_per_side };
        let y = labels_top + row as f64 * 18.0;
        let label_x = if left { 8.0 } else { WIDTH - 8.0 };
        let anchor = if left { "start" } else { "end" };
        let elbow_x = if left { MARGIN - 10.0 } else { WIDTH - MARGIN + 10.0 };
        let _ = writeln!(
            svg,
            "  <polyline points=\"{x:.1},{:.1} {x:.1},{y:.1} {elbow_x:.1},{y:.1}\" fill=\"none\" stroke=\"black\"/>",
            AXIS_Y
        );
        let _ = writeln!(
            svg,
            "  <text x=\"{label_x:.1}\" y=\"{:.1}\" text-anchor=\"{anchor}\">{} ({:.3})</text>",
            y + 4.0,
            table.methods[method_idx],
            rank
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Tab-separated companion table: one row per method in rank order with
/// its average rank and comma-separated clique ids.
fn render_tsv(table: &RankTable, cliques: &[Vec<usize>]) -> String {
    let mut tsv = String::from("method\taverage_rank\tcliques\n");
    for &method_idx in &table.rank_order() {
        let ids: Vec<String> = cliques
            .iter()
            .enumerate()
            .filter(|(_, c)| c.contains(&method_idx))
            .map(|(k, _)| k.to_string())
            .collect();
        let _ = writeln!(
            tsv,
            "{}\t{:.4}\t{}",
            table.methods[method_idx],
            table.average_ranks[method_idx],
            if ids.is_empty() { "-".to_string() } else { ids.join(",") }
        );
    }
    tsv
}

/// Writes the diagram SVG at `path` and the rank/clique TSV next to it
/// (same stem, `.tsv` extension).
pub fn emit_cdd(table: &RankTable, cliques: &[Vec<usize>], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, render_svg(table, cliques))?;
    std::fs::write(path.with_extension("tsv"), render_tsv(table, cliques))?;
    Ok(())
}
