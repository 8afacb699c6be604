//! Token-level classification: source-language opcodes and AST node kinds
//! to instruction classes.
//!
//! These functions are total. Anything unrecognized lands in
//! [`InstructionClass::Other`] rather than failing, so a parser never stops
//! on an exotic opcode.

use crate::cost::{InstructionClass, MemoryTier};

/// Classifies a scalar LLVM IR opcode.
///
/// Vector-typed arithmetic and memory operations are promoted to their SIMD
/// classes by the parser, which sees the operand types; this function is the
/// scalar mapping only.
#[must_use]
pub fn classify_llvm_opcode(opcode: &str) -> InstructionClass {
    match opcode {
        "add" | "fadd" => InstructionClass::ArithAdd,
        "sub" | "fsub" => InstructionClass::ArithSub,
        "mul" | "fmul" => InstructionClass::ArithMul,
        "sdiv" | "udiv" | "fdiv" | "srem" | "urem" | "frem" => InstructionClass::ArithDiv,
        "and" => InstructionClass::LogicAnd,
        "or" => InstructionClass::LogicOr,
        "xor" => InstructionClass::LogicXor,
        "shl" | "lshr" | "ashr" => InstructionClass::LogicShift,
        "load" => InstructionClass::MemLoad,
        "store" => InstructionClass::MemStore,
        "getelementptr" => InstructionClass::MemMove,
        "br" | "switch" => InstructionClass::BranchCond,
        "call" | "invoke" => InstructionClass::ControlCall,
        "icmp" | "fcmp" => InstructionClass::Cmp,
        _ => InstructionClass::Other,
    }
}

/// Result of classifying one full (dotted) PTX opcode token.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PtxClassification {
    pub class: InstructionClass,
    /// Address-space hint for loads/stores: shared/const state spaces hint
    /// L1, local hints DRAM; global and param carry no hint.
    pub hint: Option<MemoryTier>,
}

/// Classifies a PTX opcode token such as `ld.global.v4.f32` or `mad.lo.s32`.
///
/// The first dot-separated segment selects the class; for loads and stores
/// the remaining qualifiers select vector width (`.v2`/`.v4` promote to the
/// vector classes) and the address-space hint.
#[must_use]
pub fn classify_ptx_opcode(opcode: &str) -> PtxClassification {
    let mut segments = opcode.split('.');
    let root = segments.next().unwrap_or("");
    let class = match root {
        "add" | "addc" => InstructionClass::ArithAdd,
        "sub" | "subc" => InstructionClass::ArithSub,
        "mul" | "mul24" => InstructionClass::ArithMul,
        "mad" | "mad24" | "fma" | "mma" | "wmma" => InstructionClass::SimdFma,
        "div" | "rem" => InstructionClass::ArithDiv,
        "and" => InstructionClass::LogicAnd,
        "or" => InstructionClass::LogicOr,
        "xor" | "not" | "cnot" => InstructionClass::LogicXor,
        "shl" | "shr" => InstructionClass::LogicShift,
        "ld" => InstructionClass::MemLoad,
        "st" => InstructionClass::MemStore,
        "mov" => InstructionClass::MemMove,
        "bra" => InstructionClass::BranchJump,
        "setp" => InstructionClass::Cmp,
        "call" => InstructionClass::ControlCall,
        _ => InstructionClass::Other,
    };
    if !matches!(
        class,
        InstructionClass::MemLoad | InstructionClass::MemStore
    ) {
        return PtxClassification { class, hint: None };
    }
    let mut vector = false;
    let mut hint = None;
    for q in segments {
        match q {
            "v2" | "v4" => vector = true,
            "shared" | "const" => hint = Some(MemoryTier::L1),
            "local" => hint = Some(MemoryTier::Dram),
            _ => {}
        }
    }
    let class = match (class, vector) {
        (InstructionClass::MemLoad, true) => InstructionClass::VecLoad,
        (InstructionClass::MemStore, true) => InstructionClass::VecStore,
        (c, _) => c,
    };
    PtxClassification { class, hint }
}

/// Python constructs that contribute instruction counts.
///
/// The AST walker (which lives with the std-side Python frontend) reduces
/// every syntax node it visits to zero or more of these kinds; the mapping
/// from kind to instruction classes is fixed here.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PyNodeKind {
    BinAdd,
    BinSub,
    BinMul,
    BinDiv,
    BinFloorDiv,
    BinMod,
    BinPow,
    BinMatMul,
    BitAnd,
    BitOr,
    BitXor,
    ShiftLeft,
    ShiftRight,
    BoolAnd,
    BoolOr,
    UnaryNeg,
    UnaryNot,
    UnaryInvert,
    Comparison,
    SubscriptRead,
    AttributeRead,
    NameAssign,
    SubscriptWrite,
    AttributeWrite,
    IfBranch,
    WhileBranch,
    TernaryBranch,
    ComprehensionCondition,
    ForLoop,
    CallExpr,
    ReturnStmt,
    PassStmt,
    OtherStmt,
}

/// Instruction classes contributed by one Python node kind.
#[must_use]
pub fn classify_python_node(kind: PyNodeKind) -> &'static [InstructionClass] {
    use InstructionClass as C;
    match kind {
        PyNodeKind::BinAdd => &[C::ArithAdd],
        PyNodeKind::BinSub | PyNodeKind::UnaryNeg => &[C::ArithSub],
        PyNodeKind::BinMul | PyNodeKind::BinPow | PyNodeKind::BinMatMul => &[C::ArithMul],
        PyNodeKind::BinDiv | PyNodeKind::BinFloorDiv | PyNodeKind::BinMod => &[C::ArithDiv],
        PyNodeKind::BitAnd | PyNodeKind::BoolAnd => &[C::LogicAnd],
        PyNodeKind::BitOr | PyNodeKind::BoolOr => &[C::LogicOr],
        PyNodeKind::BitXor | PyNodeKind::UnaryNot | PyNodeKind::UnaryInvert => &[C::LogicXor],
        PyNodeKind::ShiftLeft | PyNodeKind::ShiftRight => &[C::LogicShift],
        PyNodeKind::Comparison => &[C::Cmp],
        PyNodeKind::SubscriptRead | PyNodeKind::AttributeRead => &[C::MemLoad],
        PyNodeKind::NameAssign | PyNodeKind::SubscriptWrite | PyNodeKind::AttributeWrite => {
            &[C::MemStore]
        }
        PyNodeKind::IfBranch
        | PyNodeKind::WhileBranch
        | PyNodeKind::TernaryBranch
        | PyNodeKind::ComprehensionCondition => &[C::BranchCond],
        PyNodeKind::ForLoop => &[C::BranchCond, C::MemLoad],
        PyNodeKind::CallExpr => &[C::ControlCall],
        PyNodeKind::ReturnStmt | PyNodeKind::PassStmt | PyNodeKind::OtherStmt => &[C::Other],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use InstructionClass as C;

    #[test]
    fn scalar_llvm_opcodes_map_to_their_classes() {
        assert_eq!(classify_llvm_opcode("add"), C::ArithAdd);
        assert_eq!(classify_llvm_opcode("fadd"), C::ArithAdd);
        assert_eq!(classify_llvm_opcode("fsub"), C::ArithSub);
        assert_eq!(classify_llvm_opcode("mul"), C::ArithMul);
        assert_eq!(classify_llvm_opcode("sdiv"), C::ArithDiv);
        assert_eq!(classify_llvm_opcode("urem"), C::ArithDiv);
        assert_eq!(classify_llvm_opcode("ashr"), C::LogicShift);
        assert_eq!(classify_llvm_opcode("load"), C::MemLoad);
        assert_eq!(classify_llvm_opcode("store"), C::MemStore);
        assert_eq!(classify_llvm_opcode("getelementptr"), C::MemMove);
        assert_eq!(classify_llvm_opcode("br"), C::BranchCond);
        assert_eq!(classify_llvm_opcode("switch"), C::BranchCond);
        assert_eq!(classify_llvm_opcode("invoke"), C::ControlCall);
        assert_eq!(classify_llvm_opcode("icmp"), C::Cmp);
        assert_eq!(classify_llvm_opcode("phi"), C::Other);
        assert_eq!(classify_llvm_opcode("ret"), C::Other);
        assert_eq!(classify_llvm_opcode("frobnicate"), C::Other);
        assert_eq!(classify_llvm_opcode(""), C::Other);
    }

    #[test]
    fn ptx_roots_map_and_qualifiers_are_ignored_for_compute_ops() {
        assert_eq!(classify_ptx_opcode("add.s64").class, C::ArithAdd);
        assert_eq!(classify_ptx_opcode("mul.wide.s32").class, C::ArithMul);
        assert_eq!(classify_ptx_opcode("mad.lo.s32").class, C::SimdFma);
        assert_eq!(classify_ptx_opcode("fma.rn.f32").class, C::SimdFma);
        assert_eq!(classify_ptx_opcode("div.rn.f32").class, C::ArithDiv);
        assert_eq!(classify_ptx_opcode("setp.ge.s32").class, C::Cmp);
        assert_eq!(classify_ptx_opcode("bra").class, C::BranchJump);
        assert_eq!(classify_ptx_opcode("mov.u32").class, C::MemMove);
        assert_eq!(classify_ptx_opcode("cvta.to.global.u64").class, C::Other);
        assert_eq!(classify_ptx_opcode("bar.sync").class, C::Other);
        assert_eq!(classify_ptx_opcode("ret").class, C::Other);
    }

    #[test]
    fn ptx_loads_and_stores_pick_up_vector_width_and_space_hints() {
        let ld = classify_ptx_opcode("ld.global.f32");
        assert_eq!((ld.class, ld.hint), (C::MemLoad, None));
        let ldv = classify_ptx_opcode("ld.global.v4.f32");
        assert_eq!((ldv.class, ldv.hint), (C::VecLoad, None));
        let lds = classify_ptx_opcode("ld.shared.f32");
        assert_eq!((lds.class, lds.hint), (C::MemLoad, Some(MemoryTier::L1)));
        let ldc = classify_ptx_opcode("ld.const.f64");
        assert_eq!(ldc.hint, Some(MemoryTier::L1));
        let ldl = classify_ptx_opcode("ld.local.u32");
        assert_eq!(ldl.hint, Some(MemoryTier::Dram));
        let ldp = classify_ptx_opcode("ld.param.u64");
        assert_eq!((ldp.class, ldp.hint), (C::MemLoad, None));
        let stv = classify_ptx_opcode("st.shared.v2.f32");
        assert_eq!((stv.class, stv.hint), (C::VecStore, Some(MemoryTier::L1)));
    }

    #[test]
    fn python_kinds_map_to_their_class_lists() {
        assert_eq!(classify_python_node(PyNodeKind::BinMul), &[C::ArithMul]);
        assert_eq!(classify_python_node(PyNodeKind::PassStmt), &[C::Other]);
        assert_eq!(
            classify_python_node(PyNodeKind::ForLoop),
            &[C::BranchCond, C::MemLoad]
        );
        assert_eq!(classify_python_node(PyNodeKind::Comparison), &[C::Cmp]);
        assert_eq!(
            classify_python_node(PyNodeKind::SubscriptRead),
            &[C::MemLoad]
        );
        assert_eq!(
            classify_python_node(PyNodeKind::AttributeWrite),
            &[C::MemStore]
        );
        assert_eq!(classify_python_node(PyNodeKind::BoolOr), &[C::LogicOr]);
    }
}
