//! Python source walker.
//!
//! Parses a module with `rustpython-parser` and folds the AST into the
//! same per-function count vectors the IR parsers produce. The mapping is
//! an abstract-operation count, not an attempt to model CPython bytecode:
//! each operator, comparison, branch head, call, and attribute/subscript
//! access contributes one node of the matching kind, plain name reads are
//! free, and a `for` head costs one branch plus one load per iteration
//! protocol step. Every counted load or store records an unhinted tier
//! observation so file-level priors stay well-defined.

use rustpython_parser::text_size::TextSize;
use rustpython_parser::{ast, Parse};

use opcost_core::classify::{classify_python_node, PyNodeKind};
use opcost_core::counts::{CountVector, ParsedFile, ParsedFunction, SourceKind, TierHints};
use opcost_core::Error;

/// Parses Python source into per-function counts plus module-level counts.
///
/// Function names are qualified with `.` through enclosing classes and
/// functions (`Outer.inner`). Decorators and default-argument expressions
/// execute at definition time, so they count toward the enclosing scope;
/// annotations are type-level and count nothing. A syntax error maps to
/// [`Error::Parse`] with the 1-based line of the offending offset.
pub fn parse_python(text: &str) -> Result<ParsedFile, Error> {
    let line_starts = build_line_starts(text);
    let module = ast::Suite::parse(text, "<input>").map_err(|e| Error::Parse {
        line: line_of(&line_starts, e.offset),
        message: e.error.to_string(),
    })?;

    let mut walker = Walker {
        line_starts: &line_starts,
        name_parts: Vec::new(),
        sinks: vec![Sink::default()],
        functions: Vec::new(),
    };
    walker.walk_body(&module);

    let Sink { counts, hints } = walker.sinks.pop().expect("toplevel sink");
    debug_assert!(walker.sinks.is_empty());
    Ok(ParsedFile {
        kind: SourceKind::Python,
        functions: walker.functions,
        toplevel_counts: counts,
        toplevel_hints: hints,
    })
}

/// Byte offsets of each line start; index i holds the start of line i+1.
fn build_line_starts(text: &str) -> Vec<usize> {
    let mut starts = vec![0];
    for (i, b) in text.bytes().enumerate() {
        if b == b'\n' {
            starts.push(i + 1);
        }
    }
    starts
}

fn line_of(line_starts: &[usize], offset: TextSize) -> usize {
    line_starts.partition_point(|&s| s <= offset.to_usize())
}

#[derive(Default)]
struct Sink {
    counts: CountVector,
    hints: TierHints,
}

struct Walker<'a> {
    line_starts: &'a [usize],
    name_parts: Vec<String>,
    /// Innermost entry receives counts; entry 0 is module level.
    sinks: Vec<Sink>,
    functions: Vec<ParsedFunction>,
}

impl Walker<'_> {
    fn bump(&mut self, kind: PyNodeKind) {
        let sink = self.sinks.last_mut().expect("sink stack never empty");
        for &class in classify_python_node(kind) {
            sink.counts.increment(class);
            if class.tierable() {
                sink.hints.record(class, None);
            }
        }
    }

    fn walk_body(&mut self, body: &[ast::Stmt]) {
        for stmt in body {
            self.walk_stmt(stmt);
        }
    }

    fn walk_stmt(&mut self, stmt: &ast::Stmt) {
        use ast::Stmt as S;
        match stmt {
            S::FunctionDef(f) => {
                self.enter_function(&f.name, f.range, &f.decorator_list, &f.args, &f.body)
            }
            S::AsyncFunctionDef(f) => {
                self.enter_function(&f.name, f.range, &f.decorator_list, &f.args, &f.body)
            }
            S::ClassDef(c) => {
                for d in &c.decorator_list {
                    self.visit_expr(d);
                }
                for base in &c.bases {
                    self.visit_expr(base);
                }
                for kw in &c.keywords {
                    self.visit_expr(&kw.value);
                }
                self.name_parts.push(c.name.to_string());
                self.walk_body(&c.body);
                self.name_parts.pop();
            }
            S::Return(r) => {
                self.bump(PyNodeKind::ReturnStmt);
                if let Some(value) = &r.value {
                    self.visit_expr(value);
                }
            }
            S::Delete(d) => {
                self.bump(PyNodeKind::OtherStmt);
                for target in &d.targets {
                    self.visit_expr(target);
                }
            }
            S::Assign(a) => {
                self.visit_expr(&a.value);
                for target in &a.targets {
                    self.bind_target(target);
                }
            }
            S::AugAssign(a) => {
                self.visit_expr(&a.value);
                self.visit_expr(&a.target);
                self.bump_store_head(&a.target);
                self.bump(bin_op_kind(a.op));
            }
            S::AnnAssign(a) => {
                if let Some(value) = &a.value {
                    self.visit_expr(value);
                    self.bind_target(&a.target);
                }
            }
            S::For(f) => {
                self.bump(PyNodeKind::ForLoop);
                self.visit_expr(&f.iter);
                self.walk_body(&f.body);
                self.walk_body(&f.orelse);
            }
            S::AsyncFor(f) => {
                self.bump(PyNodeKind::ForLoop);
                self.visit_expr(&f.iter);
                self.walk_body(&f.body);
                self.walk_body(&f.orelse);
            }
            S::While(w) => {
                self.bump(PyNodeKind::WhileBranch);
                self.visit_expr(&w.test);
                self.walk_body(&w.body);
                self.walk_body(&w.orelse);
            }
            S::If(i) => {
                self.bump(PyNodeKind::IfBranch);
                self.visit_expr(&i.test);
                self.walk_body(&i.body);
                self.walk_body(&i.orelse);
            }
            S::With(w) => {
                for item in &w.items {
                    self.visit_expr(&item.context_expr);
                }
                self.walk_body(&w.body);
            }
            S::AsyncWith(w) => {
                for item in &w.items {
                    self.visit_expr(&item.context_expr);
                }
                self.walk_body(&w.body);
            }
            S::Match(m) => {
                self.visit_expr(&m.subject);
                for case in &m.cases {
                    self.bump(PyNodeKind::IfBranch);
                    if let Some(guard) = &case.guard {
                        self.visit_expr(guard);
                    }
                    self.walk_body(&case.body);
                }
            }
            S::Raise(r) => {
                self.bump(PyNodeKind::OtherStmt);
                if let Some(exc) = &r.exc {
                    self.visit_expr(exc);
                }
                if let Some(cause) = &r.cause {
                    self.visit_expr(cause);
                }
            }
            S::Try(t) => {
                self.walk_body(&t.body);
                for handler in &t.handlers {
                    let ast::ExceptHandler::ExceptHandler(h) = handler;
                    self.walk_body(&h.body);
                }
                self.walk_body(&t.orelse);
                self.walk_body(&t.finalbody);
            }
            S::TryStar(t) => {
                self.walk_body(&t.body);
                for handler in &t.handlers {
                    let ast::ExceptHandler::ExceptHandler(h) = handler;
                    self.walk_body(&h.body);
                }
                self.walk_body(&t.orelse);
                self.walk_body(&t.finalbody);
            }
            S::Assert(a) => {
                self.bump(PyNodeKind::OtherStmt);
                self.visit_expr(&a.test);
                if let Some(msg) = &a.msg {
                    self.visit_expr(msg);
                }
            }
            S::Import(_) | S::ImportFrom(_) | S::Global(_) | S::Nonlocal(_) => {
                self.bump(PyNodeKind::OtherStmt);
            }
            S::Expr(e) => self.visit_expr(&e.value),
            S::Pass(_) => self.bump(PyNodeKind::PassStmt),
            S::Break(_) | S::Continue(_) => self.bump(PyNodeKind::OtherStmt),
            S::TypeAlias(_) => {}
        }
    }

    fn enter_function(
        &mut self,
        name: &ast::Identifier,
        range: rustpython_parser::text_size::TextRange,
        decorators: &[ast::Expr],
        args: &ast::Arguments,
        body: &[ast::Stmt],
    ) {
        for d in decorators {
            self.visit_expr(d);
        }
        self.visit_defaults(args);

        self.name_parts.push(name.to_string());
        let qualified = self.name_parts.join(".");
        // Reserve the slot up front so functions stay in definition order
        // even though a nested def finishes walking before its parent.
        let slot = self.functions.len();
        self.functions.push(ParsedFunction {
            name: qualified,
            line_start: line_of(self.line_starts, range.start()),
            line_end: line_of(self.line_starts, offset_before_end(range)),
            counts: CountVector::new(),
            hints: TierHints::new(),
        });

        self.sinks.push(Sink::default());
        self.walk_body(body);
        let Sink { counts, hints } = self.sinks.pop().expect("function sink");
        self.functions[slot].counts = counts;
        self.functions[slot].hints = hints;
        self.name_parts.pop();
    }

    /// Definition-time default values; annotations are skipped.
    fn visit_defaults(&mut self, args: &ast::Arguments) {
        for arg in args
            .posonlyargs
            .iter()
            .chain(&args.args)
            .chain(&args.kwonlyargs)
        {
            if let Some(default) = &arg.default {
                self.visit_expr(default);
            }
        }
    }

    /// Assignment target: one store per bound name, attribute, or
    /// subscript; container patterns recurse. Object and index expressions
    /// inside attribute/subscript targets still evaluate, so they are
    /// visited as reads.
    fn bind_target(&mut self, target: &ast::Expr) {
        use ast::Expr as E;
        match target {
            E::Name(_) => self.bump(PyNodeKind::NameAssign),
            E::Attribute(a) => {
                self.bump(PyNodeKind::AttributeWrite);
                self.visit_expr(&a.value);
            }
            E::Subscript(s) => {
                self.bump(PyNodeKind::SubscriptWrite);
                self.visit_expr(&s.value);
                self.visit_expr(&s.slice);
            }
            E::Tuple(t) => {
                for elt in &t.elts {
                    self.bind_target(elt);
                }
            }
            E::List(l) => {
                for elt in &l.elts {
                    self.bind_target(elt);
                }
            }
            E::Starred(s) => self.bind_target(&s.value),
            other => self.visit_expr(other),
        }
    }

    /// Store count for an augmented-assignment target. The inner object
    /// and index expressions were already visited on the read side, so
    /// only the outermost write is added here.
    fn bump_store_head(&mut self, target: &ast::Expr) {
        use ast::Expr as E;
        match target {
            E::Name(_) => self.bump(PyNodeKind::NameAssign),
            E::Attribute(_) => self.bump(PyNodeKind::AttributeWrite),
            E::Subscript(_) => self.bump(PyNodeKind::SubscriptWrite),
            _ => {}
        }
    }

    fn visit_expr(&mut self, expr: &ast::Expr) {
        use ast::Expr as E;
        match expr {
            E::BoolOp(b) => {
                let kind = match b.op {
                    ast::BoolOp::And => PyNodeKind::BoolAnd,
                    ast::BoolOp::Or => PyNodeKind::BoolOr,
                };
                // n operands chain through n-1 short-circuit ops.
                for _ in 1..b.values.len() {
                    self.bump(kind);
                }
                for value in &b.values {
                    self.visit_expr(value);
                }
            }
            E::NamedExpr(n) => {
                self.visit_expr(&n.value);
                self.bind_target(&n.target);
            }
            E::BinOp(b) => {
                self.bump(bin_op_kind(b.op));
                self.visit_expr(&b.left);
                self.visit_expr(&b.right);
            }
            E::UnaryOp(u) => {
                match u.op {
                    ast::UnaryOp::USub => self.bump(PyNodeKind::UnaryNeg),
                    ast::UnaryOp::Not => self.bump(PyNodeKind::UnaryNot),
                    ast::UnaryOp::Invert => self.bump(PyNodeKind::UnaryInvert),
                    ast::UnaryOp::UAdd => {}
                }
                self.visit_expr(&u.operand);
            }
            E::Lambda(l) => {
                self.visit_defaults(&l.args);
                self.visit_expr(&l.body);
            }
            E::IfExp(i) => {
                self.bump(PyNodeKind::TernaryBranch);
                self.visit_expr(&i.test);
                self.visit_expr(&i.body);
                self.visit_expr(&i.orelse);
            }
            E::Dict(d) => {
                for key in d.keys.iter().flatten() {
                    self.visit_expr(key);
                }
                for value in &d.values {
                    self.visit_expr(value);
                }
            }
            E::Set(s) => {
                for elt in &s.elts {
                    self.visit_expr(elt);
                }
            }
            E::ListComp(c) => {
                self.visit_generators(&c.generators);
                self.visit_expr(&c.elt);
            }
            E::SetComp(c) => {
                self.visit_generators(&c.generators);
                self.visit_expr(&c.elt);
            }
            E::DictComp(c) => {
                self.visit_generators(&c.generators);
                self.visit_expr(&c.key);
                self.visit_expr(&c.value);
            }
            E::GeneratorExp(c) => {
                self.visit_generators(&c.generators);
                self.visit_expr(&c.elt);
            }
            E::Await(a) => self.visit_expr(&a.value),
            E::Yield(y) => {
                if let Some(value) = &y.value {
                    self.visit_expr(value);
                }
            }
            E::YieldFrom(y) => self.visit_expr(&y.value),
            E::Compare(c) => {
                // a < b < c is two comparisons.
                for _ in &c.ops {
                    self.bump(PyNodeKind::Comparison);
                }
                self.visit_expr(&c.left);
                for comparator in &c.comparators {
                    self.visit_expr(comparator);
                }
            }
            E::Call(c) => {
                self.bump(PyNodeKind::CallExpr);
                // A bare-name callee is part of the call itself; anything
                // else (method lookup, computed callee) is evaluated.
                if !matches!(c.func.as_ref(), E::Name(_)) {
                    self.visit_expr(&c.func);
                }
                for arg in &c.args {
                    self.visit_expr(arg);
                }
                for kw in &c.keywords {
                    self.visit_expr(&kw.value);
                }
            }
            E::FormattedValue(f) => {
                self.visit_expr(&f.value);
                if let Some(spec) = &f.format_spec {
                    self.visit_expr(spec);
                }
            }
            E::JoinedStr(j) => {
                for value in &j.values {
                    self.visit_expr(value);
                }
            }
            E::Constant(_) | E::Name(_) => {}
            E::Attribute(a) => {
                self.bump(PyNodeKind::AttributeRead);
                self.visit_expr(&a.value);
            }
            E::Subscript(s) => {
                self.bump(PyNodeKind::SubscriptRead);
                self.visit_expr(&s.value);
                self.visit_expr(&s.slice);
            }
            E::Starred(s) => self.visit_expr(&s.value),
            E::List(l) => {
                for elt in &l.elts {
                    self.visit_expr(elt);
                }
            }
            E::Tuple(t) => {
                for elt in &t.elts {
                    self.visit_expr(elt);
                }
            }
            E::Slice(s) => {
                for part in [&s.lower, &s.upper, &s.step].into_iter().flatten() {
                    self.visit_expr(part);
                }
            }
        }
    }

    /// Each `for` clause costs like a loop head; each `if` clause is a
    /// branch. Comprehension targets bind loop variables, which are free.
    fn visit_generators(&mut self, generators: &[ast::Comprehension]) {
        for generator in generators {
            self.bump(PyNodeKind::ForLoop);
            self.visit_expr(&generator.iter);
            for cond in &generator.ifs {
                self.bump(PyNodeKind::ComprehensionCondition);
                self.visit_expr(cond);
            }
        }
    }
}

fn bin_op_kind(op: ast::Operator) -> PyNodeKind {
    match op {
        ast::Operator::Add => PyNodeKind::BinAdd,
        ast::Operator::Sub => PyNodeKind::BinSub,
        ast::Operator::Mult => PyNodeKind::BinMul,
        ast::Operator::MatMult => PyNodeKind::BinMatMul,
        ast::Operator::Div => PyNodeKind::BinDiv,
        ast::Operator::Mod => PyNodeKind::BinMod,
        ast::Operator::Pow => PyNodeKind::BinPow,
        ast::Operator::LShift => PyNodeKind::ShiftLeft,
        ast::Operator::RShift => PyNodeKind::ShiftRight,
        ast::Operator::BitOr => PyNodeKind::BitOr,
        ast::Operator::BitXor => PyNodeKind::BitXor,
        ast::Operator::BitAnd => PyNodeKind::BitAnd,
        ast::Operator::FloorDiv => PyNodeKind::BinFloorDiv,
    }
}

/// Last byte inside the range, so a def ending in a trailing newline still
/// reports the line its body ends on.
fn offset_before_end(range: rustpython_parser::text_size::TextRange) -> TextSize {
    let end = range.end().to_usize();
    TextSize::try_from(end.saturating_sub(1).max(range.start().to_usize()))
        .expect("offset fits u32: source was parsed from a str")
}
