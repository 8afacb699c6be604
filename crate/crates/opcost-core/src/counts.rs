//! Instruction-count vectors and the memory-tier hints parsers attach to
//! them.
//!
//! A [`CountVector`] holds one non-negative count per instruction class.
//! Parsers additionally record, for tierable classes only, how many of the
//! counted operations carried an address-space hint (L1-like or DRAM-like);
//! [`TierHints::effective_prior`] mixes those point masses with a table's
//! default prior, weighted by occurrence, so hinted and unhinted operations
//! of the same class can share one expected cost vector.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::cost::{Group, InstructionClass, MemoryTier, TierPrior, CLASS_COUNT};

/// Per-class occurrence counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountVector([u64; CLASS_COUNT]);

impl CountVector {
    #[must_use]
    pub fn new() -> CountVector {
        CountVector([0; CLASS_COUNT])
    }

    #[must_use]
    pub fn get(&self, class: InstructionClass) -> u64 {
        self.0[class.index()]
    }

    pub fn add(&mut self, class: InstructionClass, n: u64) {
        self.0[class.index()] += n;
    }

    pub fn increment(&mut self, class: InstructionClass) {
        self.add(class, 1);
    }

    pub fn merge(&mut self, other: &CountVector) {
        for i in 0..CLASS_COUNT {
            self.0[i] += other.0[i];
        }
    }

    /// Every count multiplied by `k`.
    #[must_use]
    pub fn scaled(&self, k: u64) -> CountVector {
        let mut out = *self;
        for v in out.0.iter_mut() {
            *v *= k;
        }
        out
    }

    #[must_use]
    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    #[must_use]
    pub fn group_total(&self, group: Group) -> u64 {
        InstructionClass::ALL
            .iter()
            .filter(|c| c.group() == group)
            .map(|c| self.get(*c))
            .sum()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|v| *v == 0)
    }

    /// Classes with non-zero counts, in canonical class order.
    pub fn iter_nonzero(&self) -> impl Iterator<Item = (InstructionClass, u64)> + '_ {
        InstructionClass::ALL
            .into_iter()
            .filter_map(|c| (self.get(c) > 0).then_some((c, self.get(c))))
    }
}

impl Default for CountVector {
    fn default() -> CountVector {
        CountVector::new()
    }
}

/// How many occurrences of one tierable class carried which hint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct HintCounts {
    pub l1: u64,
    pub dram: u64,
    pub unhinted: u64,
}

impl HintCounts {
    #[must_use]
    pub fn total(&self) -> u64 {
        self.l1 + self.dram + self.unhinted
    }
}

/// Address-space hints recorded per tierable class.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TierHints {
    map: BTreeMap<InstructionClass, HintCounts>,
}

impl TierHints {
    #[must_use]
    pub fn new() -> TierHints {
        TierHints::default()
    }

    /// Records one occurrence of `class`. `hint` must be `L1` or `Dram`
    /// when present; intermediate tiers are never hinted by source text.
    pub fn record(&mut self, class: InstructionClass, hint: Option<MemoryTier>) {
        debug_assert!(class.tierable(), "hints only apply to tierable classes");
        let entry = self.map.entry(class).or_default();
        match hint {
            Some(MemoryTier::L1) => entry.l1 += 1,
            Some(MemoryTier::Dram) => entry.dram += 1,
            Some(other) => {
                debug_assert!(false, "unexpected tier hint {}", other.name());
                entry.unhinted += 1;
            }
            None => entry.unhinted += 1,
        }
    }

    #[must_use]
    pub fn get(&self, class: InstructionClass) -> HintCounts {
        self.map.get(&class).copied().unwrap_or_default()
    }

    pub fn merge(&mut self, other: &TierHints) {
        for (class, counts) in &other.map {
            let entry = self.map.entry(*class).or_default();
            entry.l1 += counts.l1;
            entry.dram += counts.dram;
            entry.unhinted += counts.unhinted;
        }
    }

    #[must_use]
    pub fn scaled(&self, k: u64) -> TierHints {
        let mut out = self.clone();
        for counts in out.map.values_mut() {
            counts.l1 *= k;
            counts.dram *= k;
            counts.unhinted *= k;
        }
        out
    }

    /// Occurrence-weighted mix of hint point masses with `default`:
    /// `(n_l1 * L1 + n_dram * DRAM + n_unhinted * default) / n`.
    /// Returns `default` when the class was never recorded.
    #[must_use]
    pub fn effective_prior(&self, class: InstructionClass, default: TierPrior) -> TierPrior {
        let counts = self.get(class);
        let n = counts.total();
        if n == 0 {
            return default;
        }
        let n = n as f64;
        let d = default.probs();
        let mut probs = [0.0; 4];
        for tier in MemoryTier::ALL {
            let mut mass = counts.unhinted as f64 * d[tier.index()];
            if tier == MemoryTier::L1 {
                mass += counts.l1 as f64;
            }
            if tier == MemoryTier::Dram {
                mass += counts.dram as f64;
            }
            probs[tier.index()] = mass / n;
        }
        TierPrior::new(probs).expect("a mix of distributions is a distribution")
    }

    /// Effective priors for every class with at least one hinted occurrence.
    /// Classes whose occurrences are all unhinted are omitted: the table
    /// default applies to them unchanged.
    #[must_use]
    pub fn class_priors(&self, default: TierPrior) -> ClassPriors {
        let mut priors = ClassPriors::default();
        for (class, counts) in &self.map {
            if counts.l1 > 0 || counts.dram > 0 {
                priors.insert(*class, self.effective_prior(*class, default));
            }
        }
        priors
    }
}

/// Per-class tier priors, overriding a table's default during aggregation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ClassPriors {
    map: BTreeMap<InstructionClass, TierPrior>,
}

impl ClassPriors {
    pub fn insert(&mut self, class: InstructionClass, prior: TierPrior) {
        self.map.insert(class, prior);
    }

    #[must_use]
    pub fn get(&self, class: InstructionClass) -> Option<&TierPrior> {
        self.map.get(&class)
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// Source language of a parsed file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceKind {
    LlvmIr,
    Ptx,
    Python,
}

impl SourceKind {
    #[must_use]
    pub fn name(self) -> &'static str {
        match self {
            SourceKind::LlvmIr => "llvm-ir",
            SourceKind::Ptx => "ptx",
            SourceKind::Python => "python",
        }
    }
}

/// One function's counts, with its 1-based source line span.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedFunction {
    pub name: String,
    pub line_start: usize,
    pub line_end: usize,
    pub counts: CountVector,
    pub hints: TierHints,
}

/// A parsed source file: per-function counts plus whatever executable
/// content sits outside any function (always empty for IR and PTX).
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedFile {
    pub kind: SourceKind,
    pub functions: Vec<ParsedFunction>,
    pub toplevel_counts: CountVector,
    pub toplevel_hints: TierHints,
}

impl ParsedFile {
    /// Sum of all function counts plus top-level counts.
    #[must_use]
    pub fn file_counts(&self) -> CountVector {
        let mut total = self.toplevel_counts;
        for f in &self.functions {
            total.merge(&f.counts);
        }
        total
    }

    #[must_use]
    pub fn file_hints(&self) -> TierHints {
        let mut total = self.toplevel_hints.clone();
        for f in &self.functions {
            total.merge(&f.hints);
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_accumulate_and_merge() {
        let mut a = CountVector::new();
        a.add(InstructionClass::ArithAdd, 2);
        a.increment(InstructionClass::MemLoad);
        let mut b = CountVector::new();
        b.add(InstructionClass::MemLoad, 3);
        a.merge(&b);
        assert_eq!(a.get(InstructionClass::ArithAdd), 2);
        assert_eq!(a.get(InstructionClass::MemLoad), 4);
        assert_eq!(a.total(), 6);
        assert!(!a.is_empty());
        assert!(CountVector::new().is_empty());
    }

    #[test]
    fn group_totals_follow_class_groups() {
        let mut c = CountVector::new();
        c.add(InstructionClass::MemLoad, 2);
        c.add(InstructionClass::VecStore, 1);
        c.add(InstructionClass::MemMove, 4);
        c.add(InstructionClass::ArithDiv, 5);
        assert_eq!(c.group_total(Group::Memory), 7);
        assert_eq!(c.group_total(Group::Arith), 5);
        assert_eq!(c.group_total(Group::Simd), 0);
    }

    #[test]
    fn scaling_multiplies_every_count() {
        let mut c = CountVector::new();
        c.add(InstructionClass::Cmp, 3);
        let s = c.scaled(7);
        assert_eq!(s.get(InstructionClass::Cmp), 21);
        assert_eq!(s.total(), 21);
    }

    #[test]
    fn nonzero_iteration_is_in_canonical_order() {
        let mut c = CountVector::new();
        c.add(InstructionClass::Other, 1);
        c.add(InstructionClass::ArithAdd, 1);
        let order: Vec<_> = c.iter_nonzero().map(|(class, _)| class).collect();
        assert_eq!(
            order,
            alloc::vec![InstructionClass::ArithAdd, InstructionClass::Other]
        );
    }

    #[test]
    fn unhinted_occurrences_keep_the_default_prior() {
        let mut hints = TierHints::new();
        hints.record(InstructionClass::MemLoad, None);
        hints.record(InstructionClass::MemLoad, None);
        let default = TierPrior::default();
        assert_eq!(
            hints.effective_prior(InstructionClass::MemLoad, default),
            default
        );
        assert!(hints.class_priors(default).is_empty());
    }

    #[test]
    fn hint_mixing_weights_point_masses_by_occurrence() {
        let mut hints = TierHints::new();
        hints.record(InstructionClass::MemLoad, Some(MemoryTier::L1));
        hints.record(InstructionClass::MemLoad, Some(MemoryTier::Dram));
        hints.record(InstructionClass::MemLoad, None);
        hints.record(InstructionClass::MemLoad, None);
        let default = TierPrior::new([0.8, 0.1, 0.06, 0.04]).unwrap();
        let p = hints
            .effective_prior(InstructionClass::MemLoad, default)
            .probs();
        // (1*L1 + 1*DRAM + 2*default) / 4
        assert!((p[0] - (1.0 + 2.0 * 0.8) / 4.0).abs() < 1e-15);
        assert!((p[1] - (2.0 * 0.1) / 4.0).abs() < 1e-15);
        assert!((p[2] - (2.0 * 0.06) / 4.0).abs() < 1e-15);
        assert!((p[3] - (1.0 + 2.0 * 0.04) / 4.0).abs() < 1e-15);
    }

    #[test]
    fn all_l1_hints_give_a_point_mass() {
        let mut hints = TierHints::new();
        hints.record(InstructionClass::MemStore, Some(MemoryTier::L1));
        let p = hints.effective_prior(InstructionClass::MemStore, TierPrior::default());
        assert_eq!(p, TierPrior::point_mass(MemoryTier::L1));
        let priors = hints.class_priors(TierPrior::default());
        assert_eq!(priors.get(InstructionClass::MemStore), Some(&p));
        assert_eq!(priors.get(InstructionClass::MemLoad), None);
    }

    #[test]
    fn file_counts_sum_functions_and_toplevel() {
        let mut f1 = CountVector::new();
        f1.add(InstructionClass::ArithAdd, 1);
        let mut top = CountVector::new();
        top.add(InstructionClass::MemStore, 2);
        let file = ParsedFile {
            kind: SourceKind::Python,
            functions: alloc::vec![ParsedFunction {
                name: "f".into(),
                line_start: 1,
                line_end: 2,
                counts: f1,
                hints: TierHints::new(),
            }],
            toplevel_counts: top,
            toplevel_hints: TierHints::new(),
        };
        let total = file.file_counts();
        assert_eq!(total.get(InstructionClass::ArithAdd), 1);
        assert_eq!(total.get(InstructionClass::MemStore), 2);
    }
}
