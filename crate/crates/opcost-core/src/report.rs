//! Report tree assembly, ranking, and recommendations.
//!
//! A report is a four-level tree: repository, module (first path segment,
//! `"."` for root-level files), file, function. Counts and raw totals roll
//! up exactly: every parent's totals are the sum of its children plus, for
//! file nodes, the file's top-level code. Composite results are attached
//! only at the cohort scope level; scoring needs a cohort to normalize
//! against, so repository and module nodes carry totals but no score.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::cost::{lookup_cost, CostTable, Group, InstructionClass, Profile, CLASS_COUNT};
use crate::counts::{ClassPriors, CountVector, ParsedFile, TierHints};
use crate::error::Error;
use crate::score::{score_cohort, Artifact, CompositeResult, GradeBands, RawTotals};

/// Tree depth of a report node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportLevel {
    Repository,
    Module,
    File,
    Function,
}

impl ReportLevel {
    #[must_use]
    pub fn name(self) -> &'static str {
        match self {
            ReportLevel::Repository => "repository",
            ReportLevel::Module => "module",
            ReportLevel::File => "file",
            ReportLevel::Function => "function",
        }
    }
}

/// Which level forms the scoring cohort.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CohortScope {
    Functions,
    Files,
}

impl CohortScope {
    #[must_use]
    pub fn name(self) -> &'static str {
        match self {
            CohortScope::Functions => "functions",
            CohortScope::Files => "files",
        }
    }

    #[must_use]
    pub fn from_name(name: &str) -> Option<CohortScope> {
        match name {
            "functions" => Some(CohortScope::Functions),
            "files" => Some(CohortScope::Files),
            _ => None,
        }
    }
}

/// One parsed file plus the repository-relative path it was found at.
/// Paths use `/` separators regardless of platform.
#[derive(Debug, Clone, PartialEq)]
pub struct FileEntry {
    pub path: String,
    pub parsed: ParsedFile,
}

/// Advice codes attached to report nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecommendationCode {
    DivisionHeavy,
    MemoryEnergyHeavy,
    BranchHeavy,
    VectorizationCandidate,
}

impl RecommendationCode {
    #[must_use]
    pub fn name(self) -> &'static str {
        match self {
            RecommendationCode::DivisionHeavy => "DIV_HEAVY",
            RecommendationCode::MemoryEnergyHeavy => "MEM_BOUND",
            RecommendationCode::BranchHeavy => "BRANCH_HEAVY",
            RecommendationCode::VectorizationCandidate => "SIMD_OPPORTUNITY",
        }
    }
}

/// The measured quantity a recommendation fired on.
#[derive(Debug, Clone, PartialEq)]
pub struct Evidence {
    pub measure: String,
    pub value: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Recommendation {
    pub code: RecommendationCode,
    pub message: String,
    pub evidence: Evidence,
}

/// Trigger levels for the recommendation rules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecommendThresholds {
    /// Share of total compute units spent in division.
    pub div_cu_share: f64,
    /// Share of total energy units spent in the memory group.
    pub mem_eu_share: f64,
    /// Share of total instruction count in the branch group.
    pub branch_count_share: f64,
    /// Scalar arithmetic count at which vectorization is suggested when no
    /// SIMD is present.
    pub simd_min_arith: u64,
}

impl Default for RecommendThresholds {
    fn default() -> RecommendThresholds {
        RecommendThresholds {
            div_cu_share: 0.2,
            mem_eu_share: 0.4,
            branch_count_share: 0.3,
            simd_min_arith: 16,
        }
    }
}

impl RecommendThresholds {
    pub fn validate(&self) -> Result<(), Error> {
        for (name, v) in [
            ("div_cu_share", self.div_cu_share),
            ("mem_eu_share", self.mem_eu_share),
            ("branch_count_share", self.branch_count_share),
        ] {
            if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                return Err(Error::invalid(format!(
                    "{name} must lie in [0, 1], got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Applies the advice rules to one node's counts. Nodes with no costed
/// work produce no advice.
#[must_use]
pub fn recommend(
    counts: &CountVector,
    priors: &ClassPriors,
    table: &CostTable,
    thresholds: &RecommendThresholds,
) -> Vec<Recommendation> {
    let mut per_class_cu = [0.0f64; CLASS_COUNT];
    let mut per_class_eu = [0.0f64; CLASS_COUNT];
    for (class, n) in counts.iter_nonzero() {
        let prior = if class.tierable() {
            priors.get(class)
        } else {
            None
        };
        let cost =
            lookup_cost(table, class, prior).expect("priors are only applied to tierable classes");
        per_class_cu[class.index()] = n as f64 * cost.cu;
        per_class_eu[class.index()] = n as f64 * cost.eu;
    }
    let total_cu: f64 = per_class_cu.iter().sum();
    let total_eu: f64 = per_class_eu.iter().sum();

    let mut advice = Vec::new();
    if total_cu > 0.0 {
        let div_share = per_class_cu[InstructionClass::ArithDiv.index()] / total_cu;
        if div_share > thresholds.div_cu_share {
            advice.push(Recommendation {
                code: RecommendationCode::DivisionHeavy,
                message: format!(
                    "division accounts for {:.1}% of compute units; consider strength reduction \
                     or hoisting reciprocals",
                    100.0 * div_share
                ),
                evidence: Evidence {
                    measure: "div_cu_share".into(),
                    value: div_share,
                    threshold: thresholds.div_cu_share,
                },
            });
        }
    }
    if total_eu > 0.0 {
        let mem_eu: f64 = InstructionClass::ALL
            .iter()
            .filter(|c| c.group() == Group::Memory)
            .map(|c| per_class_eu[c.index()])
            .sum();
        let mem_share = mem_eu / total_eu;
        if mem_share > thresholds.mem_eu_share {
            advice.push(Recommendation {
                code: RecommendationCode::MemoryEnergyHeavy,
                message: format!(
                    "memory operations consume {:.1}% of energy; consider improving locality or \
                     caching intermediates",
                    100.0 * mem_share
                ),
                evidence: Evidence {
                    measure: "mem_eu_share".into(),
                    value: mem_share,
                    threshold: thresholds.mem_eu_share,
                },
            });
        }
    }
    let total_count = counts.total();
    if total_count > 0 {
        let branch_share = counts.group_total(Group::Branch) as f64 / total_count as f64;
        if branch_share > thresholds.branch_count_share {
            advice.push(Recommendation {
                code: RecommendationCode::BranchHeavy,
                message: format!(
                    "branches are {:.1}% of all operations; consider flattening control flow",
                    100.0 * branch_share
                ),
                evidence: Evidence {
                    measure: "branch_count_share".into(),
                    value: branch_share,
                    threshold: thresholds.branch_count_share,
                },
            });
        }
    }
    let arith = counts.group_total(Group::Arith);
    let simd = counts.group_total(Group::Simd);
    if simd == 0 && arith >= thresholds.simd_min_arith && thresholds.simd_min_arith > 0 {
        advice.push(Recommendation {
            code: RecommendationCode::VectorizationCandidate,
            message: format!(
                "{arith} scalar arithmetic operations and no SIMD; consider vectorizing hot loops"
            ),
            evidence: Evidence {
                measure: "scalar_arith_count".into(),
                value: arith as f64,
                threshold: thresholds.simd_min_arith as f64,
            },
        });
    }
    advice
}

/// One node of the report tree.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportNode {
    pub level: ReportLevel,
    /// Repository name, module segment, file path, or `path::function`.
    pub name: String,
    pub counts: CountVector,
    pub raw: RawTotals,
    /// Present exactly on nodes at the cohort scope level.
    pub result: Option<CompositeResult>,
    pub recommendations: Vec<Recommendation>,
    pub children: Vec<ReportNode>,
}

fn module_of(path: &str) -> &str {
    match path.find('/') {
        Some(idx) => &path[..idx],
        None => ".",
    }
}

fn function_artifact_id(path: &str, function: &str) -> String {
    format!("{path}::{function}")
}

/// Builds the full report tree for a set of parsed files.
///
/// Files sort lexicographically by path and group under their first path
/// segment; functions keep source order. The cohort is every function
/// (or every file) in the input; an input with an empty cohort still
/// produces a tree, just with no composite results.
pub fn build_tree(
    files: &[FileEntry],
    table: &CostTable,
    profile: &Profile,
    scope: CohortScope,
    bands: &GradeBands,
    thresholds: &RecommendThresholds,
) -> Result<ReportNode, Error> {
    // Sorting by (module, path) keeps every module's files contiguous; a
    // plain path sort would not, because "." collects files from anywhere
    // in the lexicographic range.
    let mut ordered: Vec<&FileEntry> = files.iter().collect();
    ordered.sort_by(|a, b| {
        module_of(&a.path)
            .cmp(module_of(&b.path))
            .then_with(|| a.path.cmp(&b.path))
    });
    for (idx, entry) in ordered.iter().enumerate() {
        if idx > 0 && ordered[idx - 1].path == entry.path {
            return Err(Error::invalid(format!(
                "duplicate file path {:?}",
                entry.path
            )));
        }
    }

    let mut artifacts: Vec<Artifact> = Vec::new();
    for entry in &ordered {
        match scope {
            CohortScope::Functions => {
                for function in &entry.parsed.functions {
                    artifacts.push(Artifact {
                        id: function_artifact_id(&entry.path, &function.name),
                        counts: function.counts,
                        priors: function.hints.class_priors(table.default_prior()),
                    });
                }
            }
            CohortScope::Files => {
                artifacts.push(Artifact {
                    id: entry.path.clone(),
                    counts: entry.parsed.file_counts(),
                    priors: entry
                        .parsed
                        .file_hints()
                        .class_priors(table.default_prior()),
                });
            }
        }
    }

    let mut results: Vec<Option<CompositeResult>> = if artifacts.is_empty() {
        Vec::new()
    } else {
        score_cohort(&artifacts, table, profile, bands)?
            .into_iter()
            .map(Some)
            .collect()
    };
    // score_cohort preserves order, so results align with artifacts; take
    // them back out in the same traversal order used above.
    let mut next_result = 0usize;
    let mut take_result = |expected_id: &str| -> Option<CompositeResult> {
        let slot = results.get_mut(next_result)?;
        let taken = slot.take().expect("each result is taken once");
        debug_assert_eq!(taken.artifact_id, expected_id);
        next_result += 1;
        Some(taken)
    };

    let advise = |counts: &CountVector, hints: &TierHints| -> Vec<Recommendation> {
        recommend(
            counts,
            &hints.class_priors(table.default_prior()),
            table,
            thresholds,
        )
    };

    let mut modules: Vec<(ReportNode, TierHints)> = Vec::new();
    for entry in &ordered {
        let module_name = module_of(&entry.path);
        if modules.last().map(|(m, _)| m.name.as_str()) != Some(module_name) {
            modules.push((
                ReportNode {
                    level: ReportLevel::Module,
                    name: module_name.into(),
                    counts: CountVector::new(),
                    raw: RawTotals::default(),
                    result: None,
                    recommendations: Vec::new(),
                    children: Vec::new(),
                },
                TierHints::new(),
            ));
        }

        let mut function_nodes = Vec::with_capacity(entry.parsed.functions.len());
        let mut file_raw = RawTotals::default();
        for function in &entry.parsed.functions {
            let id = function_artifact_id(&entry.path, &function.name);
            let priors = function.hints.class_priors(table.default_prior());
            let result = match scope {
                CohortScope::Functions => take_result(&id),
                CohortScope::Files => None,
            };
            let raw = match &result {
                Some(r) => r.raw,
                None => crate::score::aggregate_raw(&function.counts, table, Some(&priors)),
            };
            file_raw.accumulate(&raw);
            function_nodes.push(ReportNode {
                level: ReportLevel::Function,
                name: id,
                counts: function.counts,
                raw,
                result,
                recommendations: advise(&function.counts, &function.hints),
                children: Vec::new(),
            });
        }
        let toplevel_priors = entry
            .parsed
            .toplevel_hints
            .class_priors(table.default_prior());
        let toplevel_raw = crate::score::aggregate_raw(
            &entry.parsed.toplevel_counts,
            table,
            Some(&toplevel_priors),
        );
        file_raw.accumulate(&toplevel_raw);

        let file_counts = entry.parsed.file_counts();
        let file_hints = entry.parsed.file_hints();
        let file_result = match scope {
            CohortScope::Files => take_result(&entry.path),
            CohortScope::Functions => None,
        };
        let file_node = ReportNode {
            level: ReportLevel::File,
            name: entry.path.clone(),
            counts: file_counts,
            raw: match &file_result {
                Some(r) => r.raw,
                None => file_raw,
            },
            result: file_result,
            recommendations: advise(&file_counts, &file_hints),
            children: function_nodes,
        };
        let (module, module_hints) = modules.last_mut().expect("module node was just ensured");
        module.counts.merge(&file_node.counts);
        module.raw.accumulate(&file_node.raw);
        module_hints.merge(&file_hints);
        module.children.push(file_node);
    }

    let mut root = ReportNode {
        level: ReportLevel::Repository,
        name: "repository".into(),
        counts: CountVector::new(),
        raw: RawTotals::default(),
        result: None,
        recommendations: Vec::new(),
        children: Vec::new(),
    };
    let mut root_hints = TierHints::new();
    for (module, module_hints) in &mut modules {
        root.counts.merge(&module.counts);
        root.raw.accumulate(&module.raw);
        root_hints.merge(module_hints);
        module.recommendations = advise(&module.counts, module_hints);
    }
    root.recommendations = advise(&root.counts, &root_hints);
    root.children = modules.into_iter().map(|(node, _)| node).collect();
    Ok(root)
}

/// Indices of `results` in rank order: efficiency score descending, then
/// raw compute units ascending, then id.
#[must_use]
pub fn rank(results: &[CompositeResult]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..results.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = &results[a];
        let rb = &results[b];
        rb.efficiency_score
            .partial_cmp(&ra.efficiency_score)
            .expect("scores are finite")
            .then_with(|| {
                ra.raw
                    .cu
                    .partial_cmp(&rb.raw.cu)
                    .expect("totals are finite")
            })
            .then_with(|| ra.artifact_id.cmp(&rb.artifact_id))
    });
    order
}

/// Depth-first walk over a report tree.
pub fn walk<'a>(node: &'a ReportNode, visit: &mut dyn FnMut(&'a ReportNode)) {
    visit(node);
    for child in &node.children {
        walk(child, visit);
    }
}
