//! Text and JSON renderers for report trees and study results. Both are
//! deterministic byte-for-byte for identical input.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use opcost_core::cost::{lookup_cost, CostTable, MetricKind, Profile};
use opcost_core::counts::CountVector;
use opcost_core::report::{CohortScope, Recommendation, RecommendationCode, ReportNode};
use opcost_core::score::{CompositeResult, RawTotals};
use opcost_core::validate::{GridResult, SweepResult, WorkloadClass};
use serde::{Deserialize, Serialize};

use crate::study::StudyReport;
use crate::AppError;

pub const SCHEMA_VERSION: &str = "1";

/// Rule urgency: cost sinks warn, missed opportunities inform.
#[must_use]
pub fn severity(code: RecommendationCode) -> &'static str {
    match code {
        RecommendationCode::DivisionHeavy | RecommendationCode::MemoryEnergyHeavy => "warn",
        RecommendationCode::BranchHeavy | RecommendationCode::VectorizationCandidate => "info",
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct JsonRaw {
    pub cu: f64,
    pub eu_j: f64,
    pub co2_kg: f64,
    pub usd: f64,
}

impl From<&RawTotals> for JsonRaw {
    fn from(raw: &RawTotals) -> JsonRaw {
        JsonRaw {
            cu: raw.cu,
            eu_j: raw.eu,
            co2_kg: raw.co2,
            usd: raw.usd,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct JsonEvidence {
    pub measure: String,
    pub value: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct JsonRecommendation {
    pub rule: String,
    pub severity: String,
    pub message: String,
    pub evidence: JsonEvidence,
}

impl From<&Recommendation> for JsonRecommendation {
    fn from(rec: &Recommendation) -> JsonRecommendation {
        JsonRecommendation {
            rule: rec.code.name().to_owned(),
            severity: severity(rec.code).to_owned(),
            message: rec.message.clone(),
            evidence: JsonEvidence {
                measure: rec.evidence.measure.clone(),
                value: rec.evidence.value,
                threshold: rec.evidence.threshold,
            },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct JsonNode {
    pub level: String,
    pub name: String,
    pub counts: BTreeMap<String, u64>,
    pub raw: JsonRaw,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub score: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grade: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rating: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csc: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normalized: Option<JsonRaw>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub band: Option<(f64, f64)>,
    pub recommendations: Vec<JsonRecommendation>,
    pub children: Vec<JsonNode>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct JsonReport {
    pub schema_version: String,
    pub report: JsonNode,
}

fn counts_map(counts: &CountVector) -> BTreeMap<String, u64> {
    counts
        .iter_nonzero()
        .map(|(class, n)| (class.name().to_owned(), n))
        .collect()
}

fn json_node(node: &ReportNode) -> JsonNode {
    let result = node.result.as_ref();
    JsonNode {
        level: node.level.name().to_owned(),
        name: node.name.clone(),
        counts: counts_map(&node.counts),
        raw: JsonRaw::from(&node.raw),
        score: result.map(|r| r.efficiency_score),
        grade: result.map(|r| r.grade.name().to_owned()),
        rating: result.map(|r| r.rating.name().to_owned()),
        csc: result.map(|r| r.csc),
        normalized: result.map(|r| JsonRaw {
            cu: r.normalized.get(MetricKind::Cu),
            eu_j: r.normalized.get(MetricKind::Eu),
            co2_kg: r.normalized.get(MetricKind::Co2),
            usd: r.normalized.get(MetricKind::Usd),
        }),
        band: result.and_then(|r| r.band),
        recommendations: node
            .recommendations
            .iter()
            .map(JsonRecommendation::from)
            .collect(),
        children: node.children.iter().map(json_node).collect(),
    }
}

/// Serializes a report tree as the versioned JSON document.
pub fn report_json(root: &ReportNode) -> String {
    let doc = JsonReport {
        schema_version: SCHEMA_VERSION.to_owned(),
        report: json_node(root),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("report serializes");
    text.push('\n');
    text
}

/// Reads a rendered JSON report back.
pub fn parse_report(text: &str) -> Result<JsonReport, AppError> {
    serde_json::from_str(text).map_err(|e| AppError::data(format!("report document: {e}")))
}

/// A column-aligned table builder: pads every column to its widest cell.
struct Table {
    rows: Vec<Vec<String>>,
    right_align: Vec<bool>,
}

impl Table {
    fn new(right_align: &[bool]) -> Table {
        Table {
            rows: Vec::new(),
            right_align: right_align.to_vec(),
        }
    }

    fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.right_align.len());
        self.rows.push(cells);
    }

    fn render(&self, indent: usize, out: &mut String) {
        let columns = self.right_align.len();
        let mut widths = vec![0usize; columns];
        for row in &self.rows {
            for (idx, cell) in row.iter().enumerate() {
                widths[idx] = widths[idx].max(cell.chars().count());
            }
        }
        for row in &self.rows {
            let mut line = " ".repeat(indent);
            for (idx, cell) in row.iter().enumerate() {
                let pad = widths[idx].saturating_sub(cell.chars().count());
                if self.right_align[idx] {
                    line.push_str(&" ".repeat(pad));
                    line.push_str(cell);
                } else {
                    line.push_str(cell);
                    if idx + 1 < columns {
                        line.push_str(&" ".repeat(pad));
                    }
                }
                if idx + 1 < columns {
                    line.push_str("  ");
                }
            }
            out.push_str(line.trim_end());
            out.push('\n');
        }
    }
}

fn fmt_f64(value: f64) -> String {
    format!("{value}")
}

fn fmt_score(value: f64) -> String {
    format!("{value:.2}")
}

/// The top classes by compute-unit contribution under the table's
/// default tier priors, as `name share%` fragments.
fn top_classes(counts: &CountVector, table: &CostTable, keep: usize) -> String {
    let mut shares: Vec<(f64, &'static str)> = counts
        .iter_nonzero()
        .map(|(class, n)| {
            let cost = lookup_cost(table, class, None).expect("no explicit prior is passed");
            (n as f64 * cost.cu, class.name())
        })
        .collect();
    let total: f64 = shares.iter().map(|(cu, _)| cu).sum();
    if total <= 0.0 {
        return "none".to_owned();
    }
    shares.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .expect("costs are finite")
            .then(a.1.cmp(b.1))
    });
    shares
        .iter()
        .take(keep)
        .map(|(cu, name)| format!("{name} {:.1}%", 100.0 * cu / total))
        .collect::<Vec<_>>()
        .join(", ")
}

fn push_node_text(node: &ReportNode, table: &CostTable, depth: usize, out: &mut String) {
    let indent = " ".repeat(depth * 2);
    let mut line = format!("{indent}{} {}", node.level.name(), node.name);
    if let Some(result) = &node.result {
        let _ = write!(
            line,
            "  score {}  grade {}  rating {}",
            fmt_score(result.efficiency_score),
            result.grade.name(),
            result.rating.name()
        );
    }
    out.push_str(&line);
    out.push('\n');
    let _ = writeln!(
        out,
        "{indent}  ops {}  cu {}  eu_j {}  co2_kg {}  usd {}",
        node.counts.total(),
        fmt_f64(node.raw.cu),
        fmt_f64(node.raw.eu),
        fmt_f64(node.raw.co2),
        fmt_f64(node.raw.usd),
    );
    if !node.counts.is_empty() {
        let _ = writeln!(
            out,
            "{indent}  top classes: {}",
            top_classes(&node.counts, table, 3)
        );
    }
    for rec in &node.recommendations {
        let _ = writeln!(
            out,
            "{indent}  {} {}: {} ({} {:.4} vs threshold {:.4})",
            severity(rec.code),
            rec.code.name(),
            rec.message,
            rec.evidence.measure,
            rec.evidence.value,
            rec.evidence.threshold,
        );
    }
    for child in &node.children {
        push_node_text(child, table, depth + 1, out);
    }
}

fn collect_results<'a>(node: &'a ReportNode, into: &mut Vec<&'a CompositeResult>) {
    if let Some(result) = &node.result {
        into.push(result);
    }
    for child in &node.children {
        collect_results(child, into);
    }
}

/// Renders the human-readable report: a ranking table over the cohort,
/// then the indented tree with per-node details.
pub fn report_text(
    root: &ReportNode,
    table: &CostTable,
    profile: &Profile,
    scope: CohortScope,
) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "operation cost report  (architecture {}, profile {}, cohort {})",
        table.architecture(),
        profile.name(),
        scope.name()
    );
    out.push('\n');

    let mut results = Vec::new();
    collect_results(root, &mut results);
    if results.is_empty() {
        out.push_str("empty cohort: nothing to rank\n");
    } else {
        let owned: Vec<CompositeResult> = results.iter().map(|r| (*r).clone()).collect();
        let order = opcost_core::report::rank(&owned);
        let mut ranking = Table::new(&[true, false, true, false, false, true, true]);
        ranking.row(
            ["rank", "artifact", "score", "grade", "rating", "cu", "eu_j"]
                .map(String::from)
                .to_vec(),
        );
        for (position, &idx) in order.iter().enumerate() {
            let result = &owned[idx];
            ranking.row(vec![
                (position + 1).to_string(),
                result.artifact_id.clone(),
                fmt_score(result.efficiency_score),
                result.grade.name().to_owned(),
                result.rating.name().to_owned(),
                fmt_f64(result.raw.cu),
                fmt_f64(result.raw.eu),
            ]);
        }
        ranking.render(0, &mut out);
    }
    out.push('\n');
    push_node_text(root, table, 0, &mut out);
    out
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct JsonTargetStats {
    pub spearman: f64,
    pub kendall: f64,
    pub scale: f64,
    pub mae: f64,
    pub mape: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct JsonBaseline {
    pub baseline: String,
    pub time: JsonTargetStats,
    pub energy: JsonTargetStats,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct JsonSubset {
    pub workload: String,
    pub size: usize,
    pub time_spearman: f64,
    pub time_kendall: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct JsonRosterRow {
    pub name: String,
    pub workload: String,
    pub source: String,
    pub multiplier: u64,
    pub ops: u64,
    pub raw: JsonRaw,
    pub time_s: f64,
    pub energy_j: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct JsonSweepPoint {
    pub w: f64,
    pub csc_a: f64,
    pub csc_b: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct JsonSweep {
    pub artifact_a: String,
    pub artifact_b: String,
    pub metric: String,
    pub points: Vec<JsonSweepPoint>,
    pub crossovers: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct JsonStability {
    pub profile: String,
    pub trials: u32,
    pub flipped_fraction: f64,
    pub degenerate: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct JsonGridCell {
    pub eu_scale: f64,
    pub price_scale: f64,
    pub usd_leader: String,
    pub composite_leader: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct JsonGrid {
    pub eu_scales: Vec<f64>,
    pub price_scales: Vec<f64>,
    pub cells: Vec<JsonGridCell>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct JsonStudy {
    pub schema_version: String,
    pub seed: u64,
    pub roster: Vec<JsonRosterRow>,
    pub baselines: Vec<JsonBaseline>,
    pub subsets: Vec<JsonSubset>,
    pub sweep: JsonSweep,
    pub stability: Vec<JsonStability>,
    pub grid: JsonGrid,
}

fn workload_name(workload: WorkloadClass) -> &'static str {
    match workload {
        WorkloadClass::ComputeBound => "compute_bound",
        WorkloadClass::MemoryBound => "memory_bound",
        WorkloadClass::Mixed => "mixed",
    }
}

fn json_sweep(
    artifact_a: &str,
    artifact_b: &str,
    metric: MetricKind,
    result: &SweepResult,
) -> JsonSweep {
    JsonSweep {
        artifact_a: artifact_a.to_owned(),
        artifact_b: artifact_b.to_owned(),
        metric: metric.name().to_owned(),
        points: result
            .points
            .iter()
            .map(|p| JsonSweepPoint {
                w: p.weight,
                csc_a: p.csc_a,
                csc_b: p.csc_b,
            })
            .collect(),
        crossovers: result.crossovers.clone(),
    }
}

fn json_grid(grid: &GridResult) -> JsonGrid {
    JsonGrid {
        eu_scales: grid.eu_scales.clone(),
        price_scales: grid.price_scales.clone(),
        cells: grid
            .cells
            .iter()
            .map(|cell| JsonGridCell {
                eu_scale: cell.eu_scale,
                price_scale: cell.price_scale,
                usd_leader: cell.usd_leader.clone(),
                composite_leader: cell.composite_leader.clone(),
            })
            .collect(),
    }
}

fn json_study(study: &StudyReport) -> JsonStudy {
    JsonStudy {
        schema_version: SCHEMA_VERSION.to_owned(),
        seed: study.seed,
        roster: study
            .roster
            .iter()
            .zip(study.time_s.iter().zip(&study.energy_j))
            .map(|(row, (&time_s, &energy_j))| JsonRosterRow {
                name: row.name.clone(),
                workload: workload_name(row.workload).to_owned(),
                source: row.source.clone(),
                multiplier: row.multiplier,
                ops: row.count_total,
                raw: JsonRaw::from(&row.raw),
                time_s,
                energy_j,
            })
            .collect(),
        baselines: study
            .baselines
            .iter()
            .map(|b| JsonBaseline {
                baseline: b.baseline.name().to_owned(),
                time: JsonTargetStats {
                    spearman: b.time.spearman,
                    kendall: b.time.kendall,
                    scale: b.time.scale,
                    mae: b.time.mae,
                    mape: b.time.mape,
                },
                energy: JsonTargetStats {
                    spearman: b.energy.spearman,
                    kendall: b.energy.kendall,
                    scale: b.energy.scale,
                    mae: b.energy.mae,
                    mape: b.energy.mape,
                },
            })
            .collect(),
        subsets: study
            .subsets
            .iter()
            .map(|s| JsonSubset {
                workload: workload_name(s.workload).to_owned(),
                size: s.size,
                time_spearman: s.time_spearman,
                time_kendall: s.time_kendall,
            })
            .collect(),
        sweep: json_sweep(
            &study.sweep.artifact_a,
            &study.sweep.artifact_b,
            study.sweep.metric,
            &study.sweep.result,
        ),
        stability: study
            .stability
            .iter()
            .map(|s| JsonStability {
                profile: s.profile.clone(),
                trials: s.result.trials,
                flipped_fraction: s.result.flipped_fraction,
                degenerate: s.result.degenerate,
            })
            .collect(),
        grid: json_grid(&study.grid),
    }
}

/// Serializes a validation study as the versioned JSON document.
pub fn study_json(study: &StudyReport) -> String {
    let mut text = serde_json::to_string_pretty(&json_study(study)).expect("study serializes");
    text.push('\n');
    text
}

/// Renders the study summary for terminals.
pub fn study_text(study: &StudyReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "validation study  (seed {}, {} artifacts)",
        study.seed,
        study.roster.len()
    );
    out.push('\n');

    out.push_str("roster\n");
    let mut roster = Table::new(&[false, false, true, true, true, true]);
    roster.row(
        ["artifact", "workload", "ops", "cu", "time_s", "energy_j"]
            .map(String::from)
            .to_vec(),
    );
    for (row, (&time_s, &energy_j)) in study
        .roster
        .iter()
        .zip(study.time_s.iter().zip(&study.energy_j))
    {
        roster.row(vec![
            row.name.clone(),
            workload_name(row.workload).to_owned(),
            row.count_total.to_string(),
            fmt_f64(row.raw.cu),
            format!("{time_s:.6}"),
            format!("{energy_j:.6}"),
        ]);
    }
    roster.render(2, &mut out);
    out.push('\n');

    out.push_str("baseline accuracy\n");
    let mut accuracy = Table::new(&[false, false, true, true, true, true]);
    accuracy.row(
        ["baseline", "target", "spearman", "kendall", "mae", "mape%"]
            .map(String::from)
            .to_vec(),
    );
    for baseline in &study.baselines {
        for (target, stats) in [("time", &baseline.time), ("energy", &baseline.energy)] {
            accuracy.row(vec![
                baseline.baseline.name().to_owned(),
                target.to_owned(),
                format!("{:.4}", stats.spearman),
                format!("{:.4}", stats.kendall),
                format!("{:.6}", stats.mae),
                format!("{:.2}", stats.mape),
            ]);
        }
    }
    accuracy.render(2, &mut out);
    out.push('\n');

    out.push_str("model time correlation by workload\n");
    let mut subsets = Table::new(&[false, true, true, true]);
    subsets.row(
        ["workload", "size", "spearman", "kendall"]
            .map(String::from)
            .to_vec(),
    );
    for subset in &study.subsets {
        subsets.row(vec![
            workload_name(subset.workload).to_owned(),
            subset.size.to_string(),
            format!("{:.4}", subset.time_spearman),
            format!("{:.4}", subset.time_kendall),
        ]);
    }
    subsets.render(2, &mut out);
    out.push('\n');

    let sweep = &study.sweep;
    let _ = writeln!(
        out,
        "weight sweep: {} vs {} over {} weight {:.3}..{:.3} ({} points)",
        sweep.artifact_a,
        sweep.artifact_b,
        sweep.metric.name(),
        sweep.result.points.first().map_or(0.0, |p| p.weight),
        sweep.result.points.last().map_or(0.0, |p| p.weight),
        sweep.result.points.len(),
    );
    if sweep.result.crossovers.is_empty() {
        out.push_str("  no crossover: the leader holds over the whole range\n");
    } else {
        for w in &sweep.result.crossovers {
            let _ = writeln!(out, "  rank order flips at w = {w:.4}");
        }
    }
    out.push('\n');

    out.push_str("rank stability under +-20% weight noise\n");
    for entry in &study.stability {
        let _ = writeln!(
            out,
            "  {}: {:.4} flipped-pair fraction over {} trials{}",
            entry.profile,
            entry.result.flipped_fraction,
            entry.result.trials,
            if entry.result.degenerate {
                " (degenerate cohort)"
            } else {
                ""
            },
        );
    }
    out.push('\n');

    out.push_str(&grid_text(&study.grid));
    out
}

/// Renders the tariff grid as a composite-leader matrix.
pub fn grid_text(grid: &GridResult) -> String {
    let mut out = String::new();
    out.push_str("tariff robustness grid (composite leader; * marks a usd leader change)\n");
    let columns = grid.price_scales.len();
    let mut table = Table::new(&vec![false; columns + 1]);
    let mut header = vec!["eu\\price".to_owned()];
    header.extend(grid.price_scales.iter().map(|s| format!("{s:.3}")));
    table.row(header);
    let base_usd_leader = grid
        .cells
        .iter()
        .find(|c| c.eu_scale == 1.0 && c.price_scale == 1.0)
        .map(|c| c.usd_leader.clone());
    for (row_idx, eu_scale) in grid.eu_scales.iter().enumerate() {
        let mut cells = vec![format!("{eu_scale:.3}")];
        for col_idx in 0..columns {
            let cell = &grid.cells[row_idx * columns + col_idx];
            let marker = match &base_usd_leader {
                Some(base) if *base != cell.usd_leader => "*",
                _ => "",
            };
            cells.push(format!("{}{marker}", cell.composite_leader));
        }
        table.row(cells);
    }
    table.render(2, &mut out);
    out
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct JsonSweepDoc {
    pub schema_version: String,
    pub profile: String,
    pub sweep: JsonSweep,
}

/// Serializes a standalone sweep run.
pub fn sweep_json(
    profile: &Profile,
    artifact_a: &str,
    artifact_b: &str,
    metric: MetricKind,
    result: &SweepResult,
) -> String {
    let doc = JsonSweepDoc {
        schema_version: SCHEMA_VERSION.to_owned(),
        profile: profile.name().to_owned(),
        sweep: json_sweep(artifact_a, artifact_b, metric, result),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("sweep serializes");
    text.push('\n');
    text
}

/// Renders a standalone sweep run: the full curve, then any crossovers.
pub fn sweep_text(
    profile: &Profile,
    artifact_a: &str,
    artifact_b: &str,
    metric: MetricKind,
    result: &SweepResult,
) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "weight sweep of {} under profile {}\n  A = {artifact_a}\n  B = {artifact_b}\n",
        metric.name(),
        profile.name(),
    );
    let mut table = Table::new(&[true, true, true, false]);
    table.row(["w", "csc_a", "csc_b", "leader"].map(String::from).to_vec());
    for point in &result.points {
        let leader = match point.csc_a.partial_cmp(&point.csc_b) {
            Some(core::cmp::Ordering::Less) => "A",
            Some(core::cmp::Ordering::Greater) => "B",
            _ => "tie",
        };
        table.row(vec![
            format!("{:.4}", point.weight),
            format!("{:.6}", point.csc_a),
            format!("{:.6}", point.csc_b),
            leader.to_owned(),
        ]);
    }
    table.render(2, &mut out);
    out.push('\n');
    if result.crossovers.is_empty() {
        out.push_str("no crossover: one artifact leads over the whole range\n");
    } else {
        for w in &result.crossovers {
            let _ = writeln!(out, "rank order flips at w = {w:.4}");
        }
    }
    out
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct JsonGridDoc {
    pub schema_version: String,
    pub profile: String,
    pub grid: JsonGrid,
}

/// Serializes a standalone grid run.
pub fn grid_json(profile: &Profile, grid: &GridResult) -> String {
    let doc = JsonGridDoc {
        schema_version: SCHEMA_VERSION.to_owned(),
        profile: profile.name().to_owned(),
        grid: json_grid(grid),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("grid serializes");
    text.push('\n');
    text
}

fn csv_escape(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_owned()
    }
}

/// Sweep curve as `w,csc_a,csc_b` rows.
pub fn sweep_csv(result: &SweepResult) -> String {
    let mut out = String::from("w,csc_a,csc_b\n");
    for point in &result.points {
        let _ = writeln!(out, "{},{},{}", point.weight, point.csc_a, point.csc_b);
    }
    out
}

/// Grid cells as `eu_scale,price_scale,usd_leader,composite_leader` rows.
pub fn grid_csv(grid: &GridResult) -> String {
    let mut out = String::from("eu_scale,price_scale,usd_leader,composite_leader\n");
    for cell in &grid.cells {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            cell.eu_scale,
            cell.price_scale,
            csv_escape(&cell.usd_leader),
            csv_escape(&cell.composite_leader),
        );
    }
    out
}

/// The study's plottable data: the sweep curve, a blank line, then the
/// grid cells.
pub fn study_csv(study: &StudyReport) -> String {
    let mut out = sweep_csv(&study.sweep.result);
    out.push('\n');
    out.push_str(&grid_csv(&study.grid));
    out
}
