//! Line-level LLVM IR parser.
//!
//! This is deliberately not a full IR grammar: it recognizes function
//! boundaries (`define ... {` to the matching `}`), strips comments and
//! labels, and classifies one instruction per remaining line by opcode
//! token. Multi-line constructs whose continuation lines carry no opcode
//! (switch case lists) are tracked via bracket depth and skipped. IR never
//! has executable code outside functions, so top-level counts stay zero.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::classify::classify_llvm_opcode;
use crate::cost::InstructionClass;
use crate::counts::{CountVector, ParsedFile, ParsedFunction, SourceKind, TierHints};
use crate::error::Error;

/// Value-less keyword tokens that may precede the operand list. Skipping
/// them lets the vector-type check see the first type operand.
const OPERAND_PREFIX_TOKENS: [&str; 14] = [
    "fast", "nnan", "ninf", "nsz", "arcp", "contract", "afn", "reassoc", "nuw", "nsw", "exact",
    "inbounds", "volatile", "atomic",
];

const CALL_PREFIX_TOKENS: [&str; 3] = ["tail", "musttail", "notail"];

/// Parses textual LLVM IR into per-function instruction counts.
///
/// Empty input (or input with no function bodies) yields a file with no
/// functions and all-zero counts. Structural damage, an unnamed `define`,
/// an unclosed body, or a stray closing brace, is a parse error carrying
/// the offending 1-based line number.
pub fn parse_llvm_ir(text: &str) -> Result<ParsedFile, Error> {
    let mut functions = Vec::new();
    let mut current: Option<OpenFunction> = None;

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = strip_comment(raw_line).trim();
        if line.is_empty() {
            continue;
        }

        match current.as_mut() {
            None => {
                if first_token(line) == Some("define") {
                    current = Some(OpenFunction {
                        name: define_name(line, line_no)?,
                        line_start: line_no,
                        counts: CountVector::new(),
                        hints: TierHints::new(),
                        bracket_depth: 0,
                    });
                    if !line.contains('{') {
                        return Err(Error::Parse {
                            line: line_no,
                            message: "define line is missing its opening brace".to_string(),
                        });
                    }
                } else if line == "}" {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "closing brace outside any function".to_string(),
                    });
                }
                // declare/target/attributes/metadata/globals carry no counts
            }
            Some(open) => {
                if open.bracket_depth > 0 {
                    open.bracket_depth += bracket_delta(line);
                    continue;
                }
                if line == "}" {
                    let open = current.take().expect("function is open");
                    functions.push(ParsedFunction {
                        name: open.name,
                        line_start: open.line_start,
                        line_end: line_no,
                        counts: open.counts,
                        hints: open.hints,
                    });
                    continue;
                }
                if is_label(line) {
                    continue;
                }
                if let Some(class) = classify_instruction_line(line) {
                    open.counts.increment(class);
                    if class.tierable() {
                        open.hints.record(class, None);
                    }
                    open.bracket_depth += bracket_delta(line);
                }
            }
        }
    }

    if let Some(open) = current {
        return Err(Error::Parse {
            line: open.line_start,
            message: format!("function @{} has an unclosed body", open.name),
        });
    }

    Ok(ParsedFile {
        kind: SourceKind::LlvmIr,
        functions,
        toplevel_counts: CountVector::new(),
        toplevel_hints: TierHints::new(),
    })
}

struct OpenFunction {
    name: String,
    line_start: usize,
    counts: CountVector,
    hints: TierHints,
    bracket_depth: i32,
}

fn strip_comment(line: &str) -> &str {
    match line.find(';') {
        Some(pos) => &line[..pos],
        None => line,
    }
}

fn first_token(line: &str) -> Option<&str> {
    line.split_whitespace().next()
}

/// A label is a single token ending in a colon (`entry:`, `42:`).
fn is_label(line: &str) -> bool {
    line.ends_with(':') && !line.contains(char::is_whitespace)
}

fn bracket_delta(line: &str) -> i32 {
    let mut delta = 0;
    for c in line.chars() {
        match c {
            '[' => delta += 1,
            ']' => delta -= 1,
            _ => {}
        }
    }
    delta
}

/// Extracts the `@name` from a define line. Quoted names keep their inner
/// text; unquoted names end at `(` or whitespace.
fn define_name(line: &str, line_no: usize) -> Result<String, Error> {
    let at = line.find('@').ok_or(Error::Parse {
        line: line_no,
        message: "define line has no @name".to_string(),
    })?;
    let rest = &line[at + 1..];
    let name = if let Some(stripped) = rest.strip_prefix('"') {
        match stripped.find('"') {
            Some(end) => &stripped[..end],
            None => {
                return Err(Error::Parse {
                    line: line_no,
                    message: "unterminated quoted function name".to_string(),
                })
            }
        }
    } else {
        rest.split(|c: char| c == '(' || c.is_whitespace())
            .next()
            .unwrap_or("")
    };
    if name.is_empty() {
        return Err(Error::Parse {
            line: line_no,
            message: "define line has an empty name".to_string(),
        });
    }
    Ok(name.to_string())
}

/// Classifies one instruction line, or `None` for lines that carry no
/// countable instruction.
fn classify_instruction_line(line: &str) -> Option<InstructionClass> {
    let tokens: Vec<&str> = line.split_whitespace().collect();
    let mut idx = 0;
    if tokens.len() >= 3 && tokens[1] == "=" {
        idx = 2;
    }
    while idx < tokens.len() && CALL_PREFIX_TOKENS.contains(&tokens[idx]) {
        idx += 1;
    }
    let opcode = tokens.get(idx)?;
    let class = classify_llvm_opcode(opcode);
    Some(promote_vector(class, &tokens, idx + 1))
}

/// Vector-typed arithmetic and memory ops move to their SIMD classes. The
/// first operand token after the opcode (and after any flag keywords)
/// starts with `<` exactly when the operation is vector-typed.
fn promote_vector(class: InstructionClass, tokens: &[&str], mut idx: usize) -> InstructionClass {
    let promoted = match class {
        InstructionClass::ArithAdd => InstructionClass::SimdAdd,
        InstructionClass::ArithSub => InstructionClass::SimdAdd,
        InstructionClass::ArithMul => InstructionClass::SimdMul,
        InstructionClass::MemLoad => InstructionClass::VecLoad,
        InstructionClass::MemStore => InstructionClass::VecStore,
        _ => return class,
    };
    while idx < tokens.len() && OPERAND_PREFIX_TOKENS.contains(&tokens[idx]) {
        idx += 1;
    }
    match tokens.get(idx) {
        Some(tok) if tok.starts_with('<') => promoted,
        _ => class,
    }
}
