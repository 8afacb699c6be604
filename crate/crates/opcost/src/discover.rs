//! Source discovery: walks a tree, filters by extension and globs, and
//! dispatches each file to its parser.

use std::fs;
use std::path::{Component, Path};

use glob::{MatchOptions, Pattern};
use walkdir::WalkDir;

use opcost_core::counts::{ParsedFile, SourceKind};
use opcost_core::report::FileEntry;

use crate::error::AppError;
use crate::python::parse_python;

/// Relative '/'-separated path plus the parser it routes to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscoveredFile {
    pub path: String,
    pub kind: SourceKind,
}

/// Walk outcome. Warnings are non-fatal (unreadable directory entries,
/// non-UTF-8 names); the walk continues past them.
#[derive(Debug, Default)]
pub struct Discovery {
    pub files: Vec<DiscoveredFile>,
    pub warnings: Vec<String>,
}

pub fn source_kind_of(path: &str) -> Option<SourceKind> {
    let ext = Path::new(path).extension()?.to_str()?;
    match ext.to_ascii_lowercase().as_str() {
        "ll" => Some(SourceKind::LlvmIr),
        "ptx" => Some(SourceKind::Ptx),
        "py" => Some(SourceKind::Python),
        _ => None,
    }
}

/// Compiles user glob strings; a malformed pattern is a usage error.
pub fn compile_globs(patterns: &[String]) -> Result<Vec<Pattern>, AppError> {
    patterns
        .iter()
        .map(|p| Pattern::new(p).map_err(|e| AppError::usage(format!("invalid glob {p:?}: {e}"))))
        .collect()
}

/// `*` does not cross `/`, so `--include "*.py"` means top level only and
/// `--include "src/**"` means the src subtree.
const GLOB_OPTIONS: MatchOptions = MatchOptions {
    case_sensitive: true,
    require_literal_separator: true,
    require_literal_leading_dot: false,
};

fn matches_filters(path: &str, include: &[Pattern], exclude: &[Pattern]) -> bool {
    let included = include.is_empty() || include.iter().any(|p| p.matches_with(path, GLOB_OPTIONS));
    included && !exclude.iter().any(|p| p.matches_with(path, GLOB_OPTIONS))
}

/// Recursively collects source files under `root` in lexicographic
/// relative-path order. `root` may itself be a file. Include patterns
/// widen (any may match, empty means all), exclude patterns then narrow.
pub fn discover(
    root: &Path,
    include: &[Pattern],
    exclude: &[Pattern],
) -> Result<Discovery, AppError> {
    if !root.exists() {
        return Err(AppError::io(format!("{}: not found", root.display())));
    }
    let mut out = Discovery::default();

    for entry in WalkDir::new(root) {
        let entry = match entry {
            Ok(e) => e,
            Err(e) => {
                out.warnings.push(format!("skipping unreadable entry: {e}"));
                continue;
            }
        };
        if !entry.file_type().is_file() {
            continue;
        }
        let rel = entry
            .path()
            .strip_prefix(root)
            .expect("entry is under root");
        let rel = if rel.as_os_str().is_empty() {
            // root itself is a file
            Path::new(entry.path().file_name().expect("file has a name"))
        } else {
            rel
        };
        let Some(rel) = slash_path(rel) else {
            out.warnings.push(format!(
                "skipping non-UTF-8 path: {}",
                entry.path().display()
            ));
            continue;
        };
        let Some(kind) = source_kind_of(&rel) else {
            continue;
        };
        if matches_filters(&rel, include, exclude) {
            out.files.push(DiscoveredFile { path: rel, kind });
        }
    }

    out.files.sort_by(|a, b| a.path.cmp(&b.path));
    Ok(out)
}

fn slash_path(path: &Path) -> Option<String> {
    let mut parts = Vec::new();
    for component in path.components() {
        match component {
            Component::Normal(c) => parts.push(c.to_str()?),
            _ => return None,
        }
    }
    Some(parts.join("/"))
}

/// Parses already-loaded text for one source kind.
pub fn parse_text(kind: SourceKind, text: &str) -> Result<ParsedFile, opcost_core::Error> {
    match kind {
        SourceKind::LlvmIr => opcost_core::llvm::parse_llvm_ir(text),
        SourceKind::Ptx => opcost_core::ptx::parse_ptx(text),
        SourceKind::Python => parse_python(text),
    }
}

/// Reads and parses one discovered file. Read failures are I/O errors;
/// malformed content is a data error naming the file and line.
pub fn load_file(root: &Path, file: &DiscoveredFile) -> Result<FileEntry, AppError> {
    let full = if root.is_file() {
        root.to_path_buf()
    } else {
        root.join(&file.path)
    };
    let text =
        fs::read_to_string(&full).map_err(|e| AppError::io(format!("{}: {e}", full.display())))?;
    let parsed =
        parse_text(file.kind, &text).map_err(|e| AppError::data(format!("{}: {e}", file.path)))?;
    Ok(FileEntry {
        path: file.path.clone(),
        parsed,
    })
}
