//! Line-level PTX parser.
//!
//! Recognizes `.entry` and `.func` definitions, tracks brace depth through
//! their bodies, and classifies one instruction per statement line by its
//! dotted opcode token. Directive lines (leading `.`), labels, predicates
//! (`@%p`), and comments are skipped. Loads and stores record their
//! address-space hint (shared/const as L1, local as DRAM) alongside the
//! count. PTX has no executable module scope, so top-level counts stay zero.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::classify::classify_ptx_opcode;
use crate::counts::{CountVector, ParsedFile, ParsedFunction, SourceKind, TierHints};
use crate::error::Error;

/// Parses PTX assembly into per-function instruction counts.
pub fn parse_ptx(text: &str) -> Result<ParsedFile, Error> {
    let mut functions = Vec::new();
    let mut state = State::Toplevel;
    let mut in_block_comment = false;

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = strip_comments(raw_line, &mut in_block_comment);
        let line = line.trim();
        if line.is_empty() {
            continue;
        }

        state = match state {
            State::Toplevel => match function_intro(line) {
                Some(name) => {
                    let name = name.map_err(|message| Error::Parse {
                        line: line_no,
                        message,
                    })?;
                    let open = OpenFunction {
                        name,
                        line_start: line_no,
                        counts: CountVector::new(),
                        hints: TierHints::new(),
                        depth: brace_delta(line),
                    };
                    if open.depth > 0 {
                        State::Body(open)
                    } else {
                        State::Signature(open)
                    }
                }
                None => {
                    if line.contains('}') && !line.starts_with('.') {
                        return Err(Error::Parse {
                            line: line_no,
                            message: "closing brace outside any function".to_string(),
                        });
                    }
                    State::Toplevel
                }
            },
            State::Signature(mut open) => {
                open.depth += brace_delta(line);
                if open.depth > 0 {
                    State::Body(open)
                } else {
                    State::Signature(open)
                }
            }
            State::Body(mut open) => {
                let structural = line.starts_with('.')
                    || line.starts_with('{')
                    || line.starts_with('}')
                    || is_label(line);
                if !structural {
                    count_statement(line, &mut open);
                }
                open.depth += brace_delta(line);
                if open.depth <= 0 {
                    functions.push(ParsedFunction {
                        name: open.name,
                        line_start: open.line_start,
                        line_end: line_no,
                        counts: open.counts,
                        hints: open.hints,
                    });
                    State::Toplevel
                } else {
                    State::Body(open)
                }
            }
        };
    }

    match state {
        State::Toplevel => {}
        State::Signature(open) | State::Body(open) => {
            return Err(Error::Parse {
                line: open.line_start,
                message: format!("function {} has an unclosed body", open.name),
            });
        }
    }

    Ok(ParsedFile {
        kind: SourceKind::Ptx,
        functions,
        toplevel_counts: CountVector::new(),
        toplevel_hints: TierHints::new(),
    })
}

enum State {
    Toplevel,
    /// Saw the function introducer, waiting for the opening brace.
    Signature(OpenFunction),
    Body(OpenFunction),
}

struct OpenFunction {
    name: String,
    line_start: usize,
    counts: CountVector,
    hints: TierHints,
    depth: i32,
}

/// Removes `//` comments and `/* */` spans, carrying block-comment state
/// across lines.
fn strip_comments(line: &str, in_block: &mut bool) -> String {
    let mut out = String::with_capacity(line.len());
    let mut i = 0;
    while i < line.len() {
        if *in_block {
            match line[i..].find("*/") {
                Some(end) => {
                    *in_block = false;
                    i += end + 2;
                }
                None => return out,
            }
        } else if line[i..].starts_with("//") {
            return out;
        } else if line[i..].starts_with("/*") {
            *in_block = true;
            i += 2;
        } else {
            let c = line[i..].chars().next().expect("in-bounds index");
            out.push(c);
            i += c.len_utf8();
        }
    }
    out
}

fn is_label(line: &str) -> bool {
    line.ends_with(':') && !line.contains(char::is_whitespace)
}

fn brace_delta(line: &str) -> i32 {
    let mut delta = 0;
    for c in line.chars() {
        match c {
            '{' => delta += 1,
            '}' => delta -= 1,
            _ => {}
        }
    }
    delta
}

/// If the line introduces a function (`.entry` or `.func`), extracts its
/// name. Returns `Some(Err)` when the introducer is present but unnamed.
fn function_intro(line: &str) -> Option<Result<String, String>> {
    if !line.starts_with('.') {
        return None;
    }
    let keyword_end = [".entry", ".func"]
        .iter()
        .find_map(|kw| find_token(line, kw).map(|pos| pos + kw.len()))?;
    let mut rest = line[keyword_end..].trim_start();
    if rest.starts_with('(') {
        // skip the return-value group of .func
        let mut depth = 0;
        let mut end = rest.len();
        for (pos, c) in rest.char_indices() {
            match c {
                '(' => depth += 1,
                ')' => {
                    depth -= 1;
                    if depth == 0 {
                        end = pos + 1;
                        break;
                    }
                }
                _ => {}
            }
        }
        rest = rest[end..].trim_start();
    }
    let name: String = rest
        .chars()
        .take_while(|c| !c.is_whitespace() && *c != '(' && *c != '{')
        .collect();
    if name.is_empty() {
        Some(Err("function definition has no name".to_string()))
    } else {
        Some(Ok(name))
    }
}

/// Finds `needle` starting at a token boundary and not running into a
/// longer identifier.
fn find_token(haystack: &str, needle: &str) -> Option<usize> {
    let mut start = 0;
    while let Some(rel) = haystack[start..].find(needle) {
        let pos = start + rel;
        let before_ok = pos == 0
            || haystack[..pos]
                .chars()
                .next_back()
                .map(char::is_whitespace)
                .unwrap_or(true);
        let after = haystack[pos + needle.len()..].chars().next();
        let after_ok = after.map(|c| c.is_whitespace() || c == '(').unwrap_or(true);
        if before_ok && after_ok {
            return Some(pos);
        }
        start = pos + needle.len();
    }
    None
}

fn count_statement(line: &str, open: &mut OpenFunction) {
    let mut tokens = line.split_whitespace();
    let mut opcode = match tokens.next() {
        Some(t) => t,
        None => return,
    };
    if opcode.starts_with('@') {
        opcode = match tokens.next() {
            Some(t) => t,
            None => return,
        };
    }
    let opcode = opcode.trim_end_matches(';');
    if opcode.is_empty() {
        return;
    }
    let classified = classify_ptx_opcode(opcode);
    open.counts.increment(classified.class);
    if classified.class.tierable() {
        open.hints.record(classified.class, classified.hint);
    }
}
