//! Command execution: wires discovery, parsing, scoring, reporting, and
//! the study behind the resolved configuration.

use std::fs;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use opcost_core::cost::{CostTable, Profile};
use opcost_core::report::{build_tree, CohortScope, FileEntry, RecommendThresholds, ReportNode};
use opcost_core::score::{score_cohort, Artifact, CompositeResult, Grade, GradeBands, Rating};
use opcost_core::validate::{robustness_grid, weight_sweep};

use crate::config::{Command, Format, RunConfig, ThresholdOverrides};
use crate::discover::{self, DiscoveredFile};
use crate::render;
use crate::study::run_study;
use crate::table::{bundled_table, load_table_file, BUNDLED_ARCHITECTURES};
use crate::AppError;

/// Everything a run produced: the rendered report, an optional CSV
/// side-output, and any warnings for the error stream.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub output: String,
    pub csv: Option<(String, String)>,
    pub warnings: Vec<String>,
}

fn resolve_table(config: &RunConfig) -> Result<CostTable, AppError> {
    match &config.cost_table_path {
        Some(path) => load_table_file(Path::new(path)),
        None => bundled_table(&config.architecture).unwrap_or_else(|| {
            Err(AppError::usage(format!(
                "unknown architecture {:?}; bundled tables: {}",
                config.architecture,
                BUNDLED_ARCHITECTURES.join(", ")
            )))
        }),
    }
}

fn resolve_thresholds(
    overrides: &ThresholdOverrides,
) -> Result<(RecommendThresholds, GradeBands), AppError> {
    let mut thresholds = RecommendThresholds::default();
    if let Some(v) = overrides.div_cu_share {
        thresholds.div_cu_share = v;
    }
    if let Some(v) = overrides.mem_eu_share {
        thresholds.mem_eu_share = v;
    }
    if let Some(v) = overrides.branch_count_share {
        thresholds.branch_count_share = v;
    }
    if let Some(v) = overrides.simd_min_arith {
        thresholds.simd_min_arith = v;
    }
    thresholds
        .validate()
        .map_err(|e| AppError::usage(format!("invalid thresholds: {e}")))?;

    let mut bands = GradeBands::default();
    if let Some(grades) = &overrides.grades {
        for (name, &cut) in grades {
            let grade = Grade::from_name(name)
                .ok_or_else(|| AppError::usage(format!("unknown grade {name:?} in thresholds")))?;
            bands = bands
                .with_grade_threshold(grade, cut)
                .map_err(|e| AppError::usage(format!("invalid grade thresholds: {e}")))?;
        }
    }
    if let Some(ratings) = &overrides.ratings {
        for (name, &cut) in ratings {
            let rating = Rating::from_name(name)
                .ok_or_else(|| AppError::usage(format!("unknown rating {name:?} in thresholds")))?;
            bands = bands
                .with_rating_threshold(rating, cut)
                .map_err(|e| AppError::usage(format!("invalid rating thresholds: {e}")))?;
        }
    }
    Ok((thresholds, bands))
}

fn default_jobs() -> usize {
    thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

/// Parses the discovered files, fanning out over worker threads. Results
/// keep discovery order, so the thread count cannot change the output;
/// on failure the earliest file's error is reported.
fn load_entries(
    root: &str,
    files: &[DiscoveredFile],
    jobs: usize,
) -> Result<Vec<FileEntry>, AppError> {
    let workers = jobs.clamp(1, files.len().max(1));
    let slots: Vec<Mutex<Option<Result<FileEntry, AppError>>>> =
        files.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, Ordering::Relaxed);
                let Some(file) = files.get(idx) else { break };
                let loaded = discover::load_file(root.as_ref(), file);
                *slots[idx].lock().expect("slot lock is never poisoned") = Some(loaded);
            });
        }
    });
    slots
        .into_iter()
        .map(|slot| {
            slot.into_inner()
                .expect("slot lock is never poisoned")
                .expect("all slots filled")
        })
        .collect()
}

struct Sources {
    entries: Vec<FileEntry>,
    warnings: Vec<String>,
    root_is_file: bool,
}

fn load_sources(config: &RunConfig, root: &str) -> Result<Sources, AppError> {
    let include = discover::compile_globs(&config.include)?;
    let exclude = discover::compile_globs(&config.exclude)?;
    let discovery = discover::discover(root.as_ref(), &include, &exclude)?;
    let jobs = config.jobs.unwrap_or_else(default_jobs);
    let entries = load_entries(root, &discovery.files, jobs)?;
    Ok(Sources {
        entries,
        warnings: discovery.warnings,
        root_is_file: Path::new(root).is_file(),
    })
}

fn scope_for(config: &RunConfig, root_is_file: bool) -> CohortScope {
    config.cohort_scope.unwrap_or(if root_is_file {
        CohortScope::Functions
    } else {
        CohortScope::Files
    })
}

/// The scoring cohort matching `build_tree`'s artifact ids: one artifact
/// per function (`path::name`) or per file, with priors from the parsed
/// tier hints.
fn cohort_artifacts(entries: &[FileEntry], table: &CostTable, scope: CohortScope) -> Vec<Artifact> {
    let default_prior = table.default_prior();
    let mut artifacts = Vec::new();
    for entry in entries {
        match scope {
            CohortScope::Functions => {
                for function in &entry.parsed.functions {
                    artifacts.push(Artifact {
                        id: format!("{}::{}", entry.path, function.name),
                        counts: function.counts,
                        priors: function.hints.class_priors(default_prior),
                    });
                }
            }
            CohortScope::Files => {
                artifacts.push(Artifact {
                    id: entry.path.clone(),
                    counts: entry.parsed.file_counts(),
                    priors: entry.parsed.file_hints().class_priors(default_prior),
                });
            }
        }
    }
    artifacts
}

fn render_tree(
    root: &ReportNode,
    table: &CostTable,
    profile: &Profile,
    scope: CohortScope,
    format: Format,
) -> String {
    match format {
        Format::Text => render::report_text(root, table, profile, scope),
        Format::Json => render::report_json(root),
    }
}

fn run_analyze(
    config: &RunConfig,
    table: &CostTable,
    profile: &Profile,
) -> Result<Outcome, AppError> {
    let input = &config.inputs[0];
    let path = Path::new(input);
    if path.is_dir() {
        return Err(AppError::usage(format!(
            "{input}: is a directory; analyze takes one source file (use batch for trees)"
        )));
    }
    if discover::source_kind_of(input).is_none() {
        return Err(AppError::usage(format!(
            "{input}: unsupported file type; expected a .ll, .ptx, or .py source"
        )));
    }
    let sources = load_sources(config, input)?;
    let scope = config.cohort_scope.unwrap_or(CohortScope::Functions);
    let (thresholds, bands) = resolve_thresholds(&config.threshold_overrides)?;
    let root = build_tree(&sources.entries, table, profile, scope, &bands, &thresholds)?;
    Ok(Outcome {
        output: render_tree(&root, table, profile, scope, config.format),
        csv: None,
        warnings: sources.warnings,
    })
}

fn run_batch(
    config: &RunConfig,
    table: &CostTable,
    profile: &Profile,
) -> Result<Outcome, AppError> {
    let root_path = &config.inputs[0];
    let sources = load_sources(config, root_path)?;
    if sources.entries.is_empty() {
        return Err(AppError::data(format!(
            "{root_path}: no .ll, .ptx, or .py sources matched"
        )));
    }
    let scope = scope_for(config, sources.root_is_file);
    let (thresholds, bands) = resolve_thresholds(&config.threshold_overrides)?;
    let root = build_tree(&sources.entries, table, profile, scope, &bands, &thresholds)?;
    Ok(Outcome {
        output: render_tree(&root, table, profile, scope, config.format),
        csv: None,
        warnings: sources.warnings,
    })
}

fn run_validate(config: &RunConfig, table: &CostTable) -> Result<Outcome, AppError> {
    let study = run_study(table, config.seed)?;
    let output = match config.format {
        Format::Text => render::study_text(&study),
        Format::Json => render::study_json(&study),
    };
    let csv = config
        .csv_path
        .as_ref()
        .map(|path| (path.clone(), render::study_csv(&study)));
    Ok(Outcome {
        output,
        csv,
        warnings: Vec::new(),
    })
}

struct ScoredCohort {
    artifacts: Vec<Artifact>,
    results: Vec<CompositeResult>,
    warnings: Vec<String>,
}

fn scored_cohort(
    config: &RunConfig,
    table: &CostTable,
    profile: &Profile,
) -> Result<ScoredCohort, AppError> {
    let input = &config.inputs[0];
    let sources = load_sources(config, input)?;
    let scope = scope_for(config, sources.root_is_file);
    let artifacts = cohort_artifacts(&sources.entries, table, scope);
    if artifacts.is_empty() {
        return Err(AppError::data(format!(
            "{input}: the cohort is empty at scope {}",
            scope.name()
        )));
    }
    let results = score_cohort(&artifacts, table, profile, &GradeBands::default())?;
    Ok(ScoredCohort {
        artifacts,
        results,
        warnings: sources.warnings,
    })
}

fn find_result<'a>(
    results: &'a [CompositeResult],
    id: &str,
) -> Result<&'a CompositeResult, AppError> {
    results.iter().find(|r| r.artifact_id == id).ok_or_else(|| {
        let mut known: Vec<&str> = results.iter().map(|r| r.artifact_id.as_str()).collect();
        known.sort_unstable();
        let sample = known.iter().take(8).copied().collect::<Vec<_>>().join(", ");
        let more = if known.len() > 8 { ", ..." } else { "" };
        AppError::usage(format!(
            "artifact {id:?} is not in the cohort; known ids: {sample}{more}"
        ))
    })
}

fn run_sweep(
    config: &RunConfig,
    table: &CostTable,
    profile: &Profile,
) -> Result<Outcome, AppError> {
    let (id_a, id_b) = config
        .sweep_artifacts
        .as_ref()
        .expect("sweep always names two artifacts");
    let cohort = scored_cohort(config, table, profile)?;
    let norm_a = find_result(&cohort.results, id_a)?.normalized;
    let norm_b = find_result(&cohort.results, id_b)?.normalized;
    let options = config.sweep;
    let result = weight_sweep(
        norm_a,
        norm_b,
        options.metric,
        profile,
        options.range,
        options.steps,
    )?;
    let output = match config.format {
        Format::Text => render::sweep_text(profile, id_a, id_b, options.metric, &result),
        Format::Json => render::sweep_json(profile, id_a, id_b, options.metric, &result),
    };
    let csv = config
        .csv_path
        .as_ref()
        .map(|path| (path.clone(), render::sweep_csv(&result)));
    Ok(Outcome {
        output,
        csv,
        warnings: cohort.warnings,
    })
}

fn run_grid(config: &RunConfig, table: &CostTable, profile: &Profile) -> Result<Outcome, AppError> {
    let cohort = scored_cohort(config, table, profile)?;
    let options = config.grid;
    let grid = robustness_grid(
        &cohort.artifacts,
        table,
        profile,
        options.eu_range,
        options.price_range,
        options.eu_steps,
        options.price_steps,
    )?;
    let output = match config.format {
        Format::Text => render::grid_text(&grid),
        Format::Json => render::grid_json(profile, &grid),
    };
    let csv = config
        .csv_path
        .as_ref()
        .map(|path| (path.clone(), render::grid_csv(&grid)));
    Ok(Outcome {
        output,
        csv,
        warnings: cohort.warnings,
    })
}

/// Executes the configured command and returns its rendered outputs.
pub fn execute(config: &RunConfig) -> Result<Outcome, AppError> {
    let profile = config.profile.resolve()?;
    let table = resolve_table(config)?;
    match config.command {
        Command::Analyze => run_analyze(config, &table, &profile),
        Command::Batch => run_batch(config, &table, &profile),
        Command::Validate => run_validate(config, &table),
        Command::Sweep => run_sweep(config, &table, &profile),
        Command::Grid => run_grid(config, &table, &profile),
    }
}

/// Executes and delivers: the report to the output path or stdout, the
/// CSV to its path, warnings to stderr.
pub fn run(config: &RunConfig) -> Result<(), AppError> {
    let outcome = execute(config)?;
    for warning in &outcome.warnings {
        eprintln!("warning: {warning}");
    }
    if let Some((path, contents)) = &outcome.csv {
        fs::write(path, contents).map_err(|e| AppError::io(format!("{path}: {e}")))?;
    }
    match &config.output_path {
        Some(path) => {
            fs::write(path, &outcome.output).map_err(|e| AppError::io(format!("{path}: {e}")))?;
        }
        None => print!("{}", outcome.output),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::load_run_config;
    use std::collections::BTreeMap;
    use std::io::Write as _;

    fn corpus_dir() -> &'static str {
        concat!(env!("CARGO_MANIFEST_DIR"), "/corpus")
    }

    fn corpus_file(name: &str) -> String {
        format!("{}/{name}", corpus_dir())
    }

    fn run_tokens(tokens: &[&str]) -> Result<Outcome, AppError> {
        let config = load_run_config(
            std::iter::once("opcost").chain(tokens.iter().copied()),
            &BTreeMap::new(),
            None,
        )?;
        execute(&config)
    }

    #[test]
    fn analyze_scores_single_file_functions() {
        let path = corpus_file("pipeline.py");
        let outcome = run_tokens(&["analyze", &path, "--format", "json"]).unwrap();
        let doc = render::parse_report(&outcome.output).unwrap();
        assert_eq!(doc.schema_version, "1");
        let file = &doc.report.children[0].children[0];
        assert_eq!(file.children.len(), 3);
        assert!(file.children.iter().all(|f| f.score.is_some()));
    }

    #[test]
    fn analyze_rejects_directories_and_unknown_kinds() {
        let err = run_tokens(&["analyze", corpus_dir()]).unwrap_err();
        assert_eq!(err.exit_code(), 1);

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("notes.txt");
        fs::write(&path, "hello").unwrap();
        let err = run_tokens(&["analyze", path.to_str().unwrap()]).unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn analyze_missing_file_is_io_error() {
        let err = run_tokens(&["analyze", "no_such_file.ll"]).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn analyze_malformed_source_is_data_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("broken.py");
        let mut file = fs::File::create(&path).unwrap();
        writeln!(file, "def broken(:").unwrap();
        drop(file);
        let err = run_tokens(&["analyze", path.to_str().unwrap()]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn batch_scores_corpus_files() {
        let outcome = run_tokens(&["batch", corpus_dir(), "--format", "json"]).unwrap();
        let doc = render::parse_report(&outcome.output).unwrap();
        let module = &doc.report.children[0];
        assert_eq!(module.children.len(), 6);
        assert!(module.children.iter().all(|f| f.score.is_some()));
        assert!(module
            .children
            .iter()
            .all(|f| f.children.iter().all(|g| g.score.is_none())));
    }

    #[test]
    fn batch_is_deterministic_across_job_counts() {
        let single = run_tokens(&["batch", corpus_dir(), "--format", "json", "--jobs", "1"]);
        let many = run_tokens(&["batch", corpus_dir(), "--format", "json", "--jobs", "7"]);
        assert_eq!(single.unwrap().output, many.unwrap().output);
    }

    #[test]
    fn batch_include_exclude_filter_files() {
        let outcome = run_tokens(&[
            "batch",
            corpus_dir(),
            "--include",
            "*.py",
            "--format",
            "json",
        ])
        .unwrap();
        let doc = render::parse_report(&outcome.output).unwrap();
        let names: Vec<&str> = doc.report.children[0]
            .children
            .iter()
            .map(|f| f.name.as_str())
            .collect();
        assert_eq!(names, ["pipeline.py", "search.py"]);

        let err = run_tokens(&["batch", corpus_dir(), "--exclude", "*"]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn batch_empty_root_is_data_error() {
        let dir = tempfile::tempdir().unwrap();
        let err = run_tokens(&["batch", dir.path().to_str().unwrap()]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn validate_is_deterministic_and_writes_csv() {
        let dir = tempfile::tempdir().unwrap();
        let csv_path = dir.path().join("study.csv");
        let csv = csv_path.to_str().unwrap();
        let first =
            run_tokens(&["validate", "--seed", "7", "--format", "json", "--csv", csv]).unwrap();
        let second =
            run_tokens(&["validate", "--seed", "7", "--format", "json", "--csv", csv]).unwrap();
        assert_eq!(first.output, second.output);
        assert!(first
            .csv
            .as_ref()
            .is_some_and(|(path, text)| { path == csv && text.starts_with("w,csc_a,csc_b\n") }));
        let different = run_tokens(&["validate", "--seed", "8", "--format", "json"]).unwrap();
        assert_ne!(first.output, different.output);
    }

    #[test]
    fn sweep_runs_on_corpus_functions() {
        let path = corpus_file("sum_loop.ll");
        let a = "sum_loop.ll::sum_n";
        let b = "sum_loop.ll::ratio";
        let outcome =
            run_tokens(&["sweep", &path, a, b, "--metric", "cu", "--format", "json"]).unwrap();
        let doc: render::JsonSweepDoc = serde_json::from_str(&outcome.output).unwrap();
        assert_eq!(doc.sweep.points.len(), 121);
        assert_eq!(doc.sweep.artifact_a, a);

        let err = run_tokens(&["sweep", &path, a, "sum_loop.ll::nope"]).unwrap_err();
        assert_eq!(err.exit_code(), 1);
        assert!(err.to_string().contains("known ids"));
    }

    #[test]
    fn grid_runs_on_corpus_cohort() {
        let outcome =
            run_tokens(&["grid", corpus_dir(), "--grid", "3x3", "--format", "json"]).unwrap();
        let doc: render::JsonGridDoc = serde_json::from_str(&outcome.output).unwrap();
        assert_eq!(doc.grid.cells.len(), 9);
        let identity = doc
            .grid
            .cells
            .iter()
            .find(|c| c.eu_scale == 1.0 && c.price_scale == 1.0)
            .expect("odd grid contains the identity cell");
        assert!(!identity.composite_leader.is_empty());
    }

    #[test]
    fn unknown_architecture_lists_bundled_tables() {
        let path = corpus_file("pipeline.py");
        let err = run_tokens(&["analyze", &path, "--arch", "riscv"]).unwrap_err();
        assert_eq!(err.exit_code(), 1);
        assert!(err.to_string().contains("x86_64"));
    }

    #[test]
    fn threshold_overrides_flow_into_reports() {
        let config = load_run_config(
            [
                "opcost",
                "analyze",
                &corpus_file("pipeline.py"),
                "--format",
                "json",
            ],
            &BTreeMap::new(),
            Some(r#"{"thresholds": {"simd_min_arith": 1, "branch_count_share": 0.01}}"#),
        )
        .unwrap();
        let outcome = execute(&config).unwrap();
        assert!(outcome.output.contains("SIMD_OPPORTUNITY"));
        assert!(outcome.output.contains("BRANCH_HEAVY"));

        let config = load_run_config(
            ["opcost", "analyze", &corpus_file("pipeline.py")],
            &BTreeMap::new(),
            Some(r#"{"thresholds": {"grades": {"A+": 101.0}}}"#),
        )
        .unwrap();
        let err = execute(&config).unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }
}
