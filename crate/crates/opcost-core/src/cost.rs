//! Cost tables, metric vectors, memory-tier priors, and weighting profiles.
//!
//! A cost table assigns every instruction class a vector of four per-execution
//! costs: compute units (CU), energy in joules (EU), CO2 in kilograms, and
//! monetary cost in USD. Load/store-like classes may additionally carry
//! per-memory-tier vectors; looking such a class up under a tier prior yields
//! the prior-weighted expectation.
//!
//! Invariants maintained by the constructors here:
//! - every cost component is finite and non-negative;
//! - a table always has a vector for every class (`other` is the fallback);
//! - tier vectors exist only for tierable classes;
//! - tier priors and profile weights are non-negative and sum to 1
//!   (within 1e-9);
//! - profile weights are strictly positive.

use alloc::borrow::ToOwned;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::Error;
use crate::fmath;

/// Joules per kilowatt-hour.
pub const JOULES_PER_KWH: f64 = 3.6e6;

/// Tolerance for "sums to one" checks on priors and profile weights.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

/// The four cost metrics, in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MetricKind {
    Cu,
    Eu,
    Co2,
    Usd,
}

impl MetricKind {
    pub const ALL: [MetricKind; 4] = [
        MetricKind::Cu,
        MetricKind::Eu,
        MetricKind::Co2,
        MetricKind::Usd,
    ];

    #[must_use]
    pub fn index(self) -> usize {
        match self {
            MetricKind::Cu => 0,
            MetricKind::Eu => 1,
            MetricKind::Co2 => 2,
            MetricKind::Usd => 3,
        }
    }

    #[must_use]
    pub fn name(self) -> &'static str {
        match self {
            MetricKind::Cu => "cu",
            MetricKind::Eu => "eu",
            MetricKind::Co2 => "co2",
            MetricKind::Usd => "usd",
        }
    }

    #[must_use]
    pub fn from_name(name: &str) -> Option<MetricKind> {
        Self::ALL.into_iter().find(|m| m.name() == name)
    }
}

/// Coarse instruction groups used for reporting and heuristics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Group {
    Arith,
    Logic,
    Memory,
    Branch,
    Control,
    Simd,
}

impl Group {
    #[must_use]
    pub fn name(self) -> &'static str {
        match self {
            Group::Arith => "arith",
            Group::Logic => "logic",
            Group::Memory => "memory",
            Group::Branch => "branch",
            Group::Control => "control",
            Group::Simd => "simd",
        }
    }
}

/// The canonical 21-class instruction taxonomy.
///
/// Class names are stable identifiers: they appear in cost-table documents,
/// report counts, and CSV exports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum InstructionClass {
    ArithAdd,
    ArithSub,
    ArithMul,
    ArithDiv,
    LogicAnd,
    LogicOr,
    LogicXor,
    LogicShift,
    MemMove,
    MemLoad,
    MemStore,
    BranchJump,
    BranchCond,
    ControlCall,
    Cmp,
    SimdAdd,
    SimdMul,
    SimdFma,
    VecLoad,
    VecStore,
    Other,
}

pub const CLASS_COUNT: usize = 21;

impl InstructionClass {
    pub const ALL: [InstructionClass; CLASS_COUNT] = [
        InstructionClass::ArithAdd,
        InstructionClass::ArithSub,
        InstructionClass::ArithMul,
        InstructionClass::ArithDiv,
        InstructionClass::LogicAnd,
        InstructionClass::LogicOr,
        InstructionClass::LogicXor,
        InstructionClass::LogicShift,
        InstructionClass::MemMove,
        InstructionClass::MemLoad,
        InstructionClass::MemStore,
        InstructionClass::BranchJump,
        InstructionClass::BranchCond,
        InstructionClass::ControlCall,
        InstructionClass::Cmp,
        InstructionClass::SimdAdd,
        InstructionClass::SimdMul,
        InstructionClass::SimdFma,
        InstructionClass::VecLoad,
        InstructionClass::VecStore,
        InstructionClass::Other,
    ];

    #[must_use]
    pub fn index(self) -> usize {
        Self::ALL
            .iter()
            .position(|c| *c == self)
            .unwrap_or(CLASS_COUNT - 1)
    }

    #[must_use]
    pub fn name(self) -> &'static str {
        match self {
            InstructionClass::ArithAdd => "arith_add",
            InstructionClass::ArithSub => "arith_sub",
            InstructionClass::ArithMul => "arith_mul",
            InstructionClass::ArithDiv => "arith_div",
            InstructionClass::LogicAnd => "logic_and",
            InstructionClass::LogicOr => "logic_or",
            InstructionClass::LogicXor => "logic_xor",
            InstructionClass::LogicShift => "logic_shift",
            InstructionClass::MemMove => "mem_move",
            InstructionClass::MemLoad => "mem_load",
            InstructionClass::MemStore => "mem_store",
            InstructionClass::BranchJump => "branch_jump",
            InstructionClass::BranchCond => "branch_cond",
            InstructionClass::ControlCall => "control_call",
            InstructionClass::Cmp => "cmp",
            InstructionClass::SimdAdd => "simd_add",
            InstructionClass::SimdMul => "simd_mul",
            InstructionClass::SimdFma => "simd_fma",
            InstructionClass::VecLoad => "vec_load",
            InstructionClass::VecStore => "vec_store",
            InstructionClass::Other => "other",
        }
    }

    #[must_use]
    pub fn from_name(name: &str) -> Option<InstructionClass> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }

    #[must_use]
    pub fn group(self) -> Group {
        match self {
            InstructionClass::ArithAdd
            | InstructionClass::ArithSub
            | InstructionClass::ArithMul
            | InstructionClass::ArithDiv => Group::Arith,
            InstructionClass::LogicAnd
            | InstructionClass::LogicOr
            | InstructionClass::LogicXor
            | InstructionClass::LogicShift
            | InstructionClass::Cmp => Group::Logic,
            InstructionClass::MemMove
            | InstructionClass::MemLoad
            | InstructionClass::MemStore
            | InstructionClass::VecLoad
            | InstructionClass::VecStore => Group::Memory,
            InstructionClass::BranchJump | InstructionClass::BranchCond => Group::Branch,
            InstructionClass::ControlCall | InstructionClass::Other => Group::Control,
            InstructionClass::SimdAdd | InstructionClass::SimdMul | InstructionClass::SimdFma => {
                Group::Simd
            }
        }
    }

    /// Whether the class may carry per-memory-tier cost vectors.
    #[must_use]
    pub fn tierable(self) -> bool {
        matches!(
            self,
            InstructionClass::MemLoad
                | InstructionClass::MemStore
                | InstructionClass::VecLoad
                | InstructionClass::VecStore
        )
    }
}

/// Per-execution cost of one instruction class across the four metrics.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CostVector {
    pub cu: f64,
    pub eu: f64,
    pub co2: f64,
    pub usd: f64,
}

impl CostVector {
    #[must_use]
    pub fn new(cu: f64, eu: f64, co2: f64, usd: f64) -> CostVector {
        CostVector { cu, eu, co2, usd }
    }

    #[must_use]
    pub fn get(&self, metric: MetricKind) -> f64 {
        match metric {
            MetricKind::Cu => self.cu,
            MetricKind::Eu => self.eu,
            MetricKind::Co2 => self.co2,
            MetricKind::Usd => self.usd,
        }
    }

    fn validate(&self, context: &str) -> Result<(), Error> {
        for metric in MetricKind::ALL {
            let v = self.get(metric);
            if !v.is_finite() || v < 0.0 {
                return Err(Error::table(format!(
                    "{context}: metric {} must be finite and non-negative, got {v}",
                    metric.name()
                )));
            }
        }
        Ok(())
    }
}

/// One `f64` per metric, indexed by [`MetricKind`]. Used for normalized
/// values and profile weights.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PerMetric(pub [f64; 4]);

impl PerMetric {
    #[must_use]
    pub fn get(&self, metric: MetricKind) -> f64 {
        self.0[metric.index()]
    }

    pub fn set(&mut self, metric: MetricKind, value: f64) {
        self.0[metric.index()] = value;
    }

    #[must_use]
    pub fn sum(&self) -> f64 {
        self.0[0] + self.0[1] + self.0[2] + self.0[3]
    }
}

/// Memory hierarchy levels for tierable classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MemoryTier {
    L1,
    L2,
    L3,
    Dram,
}

impl MemoryTier {
    pub const ALL: [MemoryTier; 4] = [
        MemoryTier::L1,
        MemoryTier::L2,
        MemoryTier::L3,
        MemoryTier::Dram,
    ];

    #[must_use]
    pub fn index(self) -> usize {
        match self {
            MemoryTier::L1 => 0,
            MemoryTier::L2 => 1,
            MemoryTier::L3 => 2,
            MemoryTier::Dram => 3,
        }
    }

    #[must_use]
    pub fn name(self) -> &'static str {
        match self {
            MemoryTier::L1 => "L1",
            MemoryTier::L2 => "L2",
            MemoryTier::L3 => "L3",
            MemoryTier::Dram => "DRAM",
        }
    }

    #[must_use]
    pub fn from_name(name: &str) -> Option<MemoryTier> {
        Self::ALL.into_iter().find(|t| t.name() == name)
    }
}

/// A probability distribution over memory tiers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TierPrior([f64; 4]);

impl TierPrior {
    /// Probabilities in L1, L2, L3, DRAM order; each in [0, 1], summing to 1
    /// within [`WEIGHT_SUM_TOLERANCE`].
    pub fn new(probs: [f64; 4]) -> Result<TierPrior, Error> {
        for (tier, p) in MemoryTier::ALL.iter().zip(probs.iter()) {
            if !p.is_finite() || *p < 0.0 || *p > 1.0 {
                return Err(Error::invalid(format!(
                    "tier prior {} must lie in [0, 1], got {p}",
                    tier.name()
                )));
            }
        }
        let sum = probs[0] + probs[1] + probs[2] + probs[3];
        if fmath::abs(sum - 1.0) > WEIGHT_SUM_TOLERANCE {
            return Err(Error::invalid(format!(
                "tier prior must sum to 1, got {sum}"
            )));
        }
        Ok(TierPrior(probs))
    }

    /// All probability mass on one tier.
    #[must_use]
    pub fn point_mass(tier: MemoryTier) -> TierPrior {
        let mut probs = [0.0; 4];
        probs[tier.index()] = 1.0;
        TierPrior(probs)
    }

    /// Coarse two-level prior: `hit` on L1, the remainder on DRAM.
    pub fn hit_miss(hit: f64) -> Result<TierPrior, Error> {
        if !hit.is_finite() || !(0.0..=1.0).contains(&hit) {
            return Err(Error::invalid(format!(
                "hit probability must lie in [0, 1], got {hit}"
            )));
        }
        TierPrior::new([hit, 0.0, 0.0, 1.0 - hit])
    }

    #[must_use]
    pub fn get(&self, tier: MemoryTier) -> f64 {
        self.0[tier.index()]
    }

    #[must_use]
    pub fn probs(&self) -> [f64; 4] {
        self.0
    }
}

impl Default for TierPrior {
    /// The bundled default: 90% L1, 6% L2, 3% L3, 1% DRAM.
    fn default() -> TierPrior {
        TierPrior([0.90, 0.06, 0.03, 0.01])
    }
}

/// Region parameters used to derive CO2 and USD columns from energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvironmentParams {
    pub carbon_intensity_kg_per_kwh: f64,
    pub price_per_kwh_usd: f64,
}

impl EnvironmentParams {
    pub fn validate(&self) -> Result<(), Error> {
        if !self.carbon_intensity_kg_per_kwh.is_finite() || self.carbon_intensity_kg_per_kwh < 0.0 {
            return Err(Error::table(format!(
                "carbon intensity must be finite and non-negative, got {}",
                self.carbon_intensity_kg_per_kwh
            )));
        }
        if !self.price_per_kwh_usd.is_finite() || self.price_per_kwh_usd < 0.0 {
            return Err(Error::table(format!(
                "energy price must be finite and non-negative, got {}",
                self.price_per_kwh_usd
            )));
        }
        Ok(())
    }
}

/// Kilograms of CO2 for `eu_joules` of energy at the given grid intensity.
#[must_use]
pub fn derive_co2(eu_joules: f64, carbon_intensity_kg_per_kwh: f64) -> f64 {
    eu_joules * carbon_intensity_kg_per_kwh / JOULES_PER_KWH
}

/// USD for `eu_joules` of energy at the given tariff.
#[must_use]
pub fn derive_usd(eu_joules: f64, price_per_kwh_usd: f64) -> f64 {
    eu_joules * price_per_kwh_usd / JOULES_PER_KWH
}

/// Table version, `MAJOR.MINOR.PATCH`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Version {
    pub major: u32,
    pub minor: u32,
    pub patch: u32,
}

impl Version {
    pub fn parse(text: &str) -> Result<Version, Error> {
        let mut parts = text.split('.');
        let mut next = |what: &str| -> Result<u32, Error> {
            parts
                .next()
                .ok_or_else(|| {
                    Error::table(format!("version {text:?} is missing its {what} component"))
                })?
                .parse::<u32>()
                .map_err(|_| {
                    Error::table(format!(
                        "version {text:?} has a non-numeric {what} component"
                    ))
                })
        };
        let major = next("major")?;
        let minor = next("minor")?;
        let patch = next("patch")?;
        if parts.next().is_some() {
            return Err(Error::table(format!(
                "version {text:?} has too many components"
            )));
        }
        Ok(Version {
            major,
            minor,
            patch,
        })
    }
}

impl core::fmt::Display for Version {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}.{}.{}", self.major, self.minor, self.patch)
    }
}

/// A cost component column is either authoritative table data or derived
/// from the EU column and the table's environment parameters. Derived
/// columns track energy when the table is rescaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CostChannel {
    Explicit,
    DerivedFromEu,
}

/// A possibly partial cost vector, as it appears in table documents.
/// `cu` and `eu` are mandatory for base entries; `co2`/`usd` may be absent
/// and derived from the environment.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PartialCostVector {
    pub cu: Option<f64>,
    pub eu: Option<f64>,
    pub co2: Option<f64>,
    pub usd: Option<f64>,
}

/// Plain-data description of a cost table, validated into a [`CostTable`]
/// by [`CostTable::from_spec`].
#[derive(Debug, Clone, Default)]
pub struct CostTableSpec {
    pub architecture: String,
    pub version: String,
    pub provenance: BTreeMap<String, String>,
    pub environment: Option<EnvironmentParams>,
    pub costs: BTreeMap<InstructionClass, PartialCostVector>,
    pub tier_costs: BTreeMap<InstructionClass, BTreeMap<MemoryTier, PartialCostVector>>,
    pub tier_prior: Option<TierPrior>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct ClassEntry {
    cost: CostVector,
    /// Present in the source document (false means fallback to `other`).
    explicit: bool,
    co2_channel: CostChannel,
    usd_channel: CostChannel,
}

/// A validated, fully materialized cost table.
#[derive(Debug, Clone, PartialEq)]
pub struct CostTable {
    architecture: String,
    version: Version,
    provenance: BTreeMap<String, String>,
    environment: Option<EnvironmentParams>,
    entries: [ClassEntry; CLASS_COUNT],
    tiers: [Option<[CostVector; 4]>; CLASS_COUNT],
    default_prior: TierPrior,
}

impl CostTable {
    /// Validates a spec and materializes the table.
    ///
    /// Rules enforced here:
    /// - `other` must be present; classes absent from the spec fall back to
    ///   its vector;
    /// - every provided component must be finite and non-negative;
    /// - base entries must provide `cu` and `eu`; absent `co2`/`usd` are
    ///   derived from the environment, and it is an error to omit them
    ///   without one;
    /// - tier vectors are only accepted for tierable classes, and inherit
    ///   unprovided components from the class base vector (derived channels
    ///   re-derive from the tier's EU instead).
    pub fn from_spec(spec: CostTableSpec) -> Result<CostTable, Error> {
        if spec.architecture.is_empty() {
            return Err(Error::table("architecture must be non-empty".to_owned()));
        }
        let version = Version::parse(&spec.version)?;
        if let Some(env) = &spec.environment {
            env.validate()?;
        }
        if !spec.costs.contains_key(&InstructionClass::Other) {
            return Err(Error::table(
                "class other must be present: it is the fallback for unlisted classes".to_owned(),
            ));
        }

        let resolve = |class: InstructionClass,
                       partial: &PartialCostVector|
         -> Result<ClassEntry, Error> {
            let context = format!("class {}", class.name());
            let cu = partial
                .cu
                .ok_or_else(|| Error::table(format!("{context}: metric cu is required")))?;
            let eu = partial
                .eu
                .ok_or_else(|| Error::table(format!("{context}: metric eu is required")))?;
            let mut co2_channel = CostChannel::Explicit;
            let co2 = match partial.co2 {
                Some(v) => v,
                None => {
                    let env = spec.environment.as_ref().ok_or_else(|| {
                        Error::table(format!(
                            "{context}: metric co2 is absent and no environment is given to derive it"
                        ))
                    })?;
                    co2_channel = CostChannel::DerivedFromEu;
                    derive_co2(eu, env.carbon_intensity_kg_per_kwh)
                }
            };
            let mut usd_channel = CostChannel::Explicit;
            let usd = match partial.usd {
                Some(v) => v,
                None => {
                    let env = spec.environment.as_ref().ok_or_else(|| {
                        Error::table(format!(
                            "{context}: metric usd is absent and no environment is given to derive it"
                        ))
                    })?;
                    usd_channel = CostChannel::DerivedFromEu;
                    derive_usd(eu, env.price_per_kwh_usd)
                }
            };
            let cost = CostVector::new(cu, eu, co2, usd);
            cost.validate(&context)?;
            Ok(ClassEntry {
                cost,
                explicit: true,
                co2_channel,
                usd_channel,
            })
        };

        let other_entry = resolve(
            InstructionClass::Other,
            &spec.costs[&InstructionClass::Other],
        )?;
        let mut entries = [other_entry; CLASS_COUNT];
        for class in InstructionClass::ALL {
            match spec.costs.get(&class) {
                Some(partial) => entries[class.index()] = resolve(class, partial)?,
                None => {
                    entries[class.index()] = ClassEntry {
                        explicit: false,
                        ..other_entry
                    };
                }
            }
        }

        let mut tiers: [Option<[CostVector; 4]>; CLASS_COUNT] = [None; CLASS_COUNT];
        for (class, overrides) in &spec.tier_costs {
            if !class.tierable() {
                return Err(Error::table(format!(
                    "class {} cannot carry tier costs: only loads and stores are tierable",
                    class.name()
                )));
            }
            let base = entries[class.index()];
            let mut vectors = [base.cost; 4];
            for tier in MemoryTier::ALL {
                let Some(partial) = overrides.get(&tier) else {
                    continue;
                };
                let context = format!("class {} tier {}", class.name(), tier.name());
                let eu = partial.eu.unwrap_or(base.cost.eu);
                let co2 = match partial.co2 {
                    Some(v) => v,
                    None => match (base.co2_channel, &spec.environment) {
                        (CostChannel::DerivedFromEu, Some(env)) => {
                            derive_co2(eu, env.carbon_intensity_kg_per_kwh)
                        }
                        _ => base.cost.co2,
                    },
                };
                let usd = match partial.usd {
                    Some(v) => v,
                    None => match (base.usd_channel, &spec.environment) {
                        (CostChannel::DerivedFromEu, Some(env)) => {
                            derive_usd(eu, env.price_per_kwh_usd)
                        }
                        _ => base.cost.usd,
                    },
                };
                let vector = CostVector::new(partial.cu.unwrap_or(base.cost.cu), eu, co2, usd);
                vector.validate(&context)?;
                vectors[tier.index()] = vector;
            }
            tiers[class.index()] = Some(vectors);
        }

        Ok(CostTable {
            architecture: spec.architecture,
            version,
            provenance: spec.provenance,
            environment: spec.environment,
            entries,
            tiers,
            default_prior: spec.tier_prior.unwrap_or_default(),
        })
    }

    #[must_use]
    pub fn architecture(&self) -> &str {
        &self.architecture
    }

    #[must_use]
    pub fn version(&self) -> Version {
        self.version
    }

    #[must_use]
    pub fn provenance(&self) -> &BTreeMap<String, String> {
        &self.provenance
    }

    #[must_use]
    pub fn environment(&self) -> Option<EnvironmentParams> {
        self.environment
    }

    #[must_use]
    pub fn default_prior(&self) -> TierPrior {
        self.default_prior
    }

    /// The class base vector, with absent classes resolved to `other`.
    #[must_use]
    pub fn base_cost(&self, class: InstructionClass) -> CostVector {
        self.entries[class.index()].cost
    }

    /// Whether the class had its own row in the source document.
    #[must_use]
    pub fn is_explicit(&self, class: InstructionClass) -> bool {
        self.entries[class.index()].explicit
    }

    #[must_use]
    pub fn co2_channel(&self, class: InstructionClass) -> CostChannel {
        self.entries[class.index()].co2_channel
    }

    #[must_use]
    pub fn usd_channel(&self, class: InstructionClass) -> CostChannel {
        self.entries[class.index()].usd_channel
    }

    /// The materialized tier vector, if the class carries tier costs.
    #[must_use]
    pub fn tier_cost(&self, class: InstructionClass, tier: MemoryTier) -> Option<CostVector> {
        self.tiers[class.index()].map(|vectors| vectors[tier.index()])
    }

    #[must_use]
    pub fn has_tier_costs(&self, class: InstructionClass) -> bool {
        self.tiers[class.index()].is_some()
    }
}

/// Effective per-execution cost of `class` under an optional tier prior.
///
/// Tierable classes with tier vectors return the prior-weighted expectation
/// (the table default prior when `prior` is `None`); tierable classes
/// without tier vectors return the base vector. Passing a prior for a
/// non-tierable class is an error.
pub fn lookup_cost(
    table: &CostTable,
    class: InstructionClass,
    prior: Option<&TierPrior>,
) -> Result<CostVector, Error> {
    if !class.tierable() {
        if prior.is_some() {
            return Err(Error::invalid(format!(
                "class {} is not tierable: a tier prior does not apply",
                class.name()
            )));
        }
        return Ok(table.base_cost(class));
    }
    let Some(vectors) = table.tiers[class.index()] else {
        return Ok(table.base_cost(class));
    };
    let default = table.default_prior();
    let prior = prior.unwrap_or(&default);
    let mut expected = CostVector::default();
    for tier in MemoryTier::ALL {
        let p = prior.get(tier);
        let v = vectors[tier.index()];
        expected.cu += p * v.cu;
        expected.eu += p * v.eu;
        expected.co2 += p * v.co2;
        expected.usd += p * v.usd;
    }
    Ok(expected)
}

/// Returns a copy of the table under scaled energy and tariff assumptions.
///
/// EU scales by `eu_scale`; CO2 tracks energy and scales by `eu_scale` too.
/// Explicit USD columns scale by `price_scale`; USD columns that were
/// derived from energy scale by `eu_scale * price_scale` (the bill tracks
/// both the consumption and the tariff). CU is untouched.
pub fn scale_table(table: &CostTable, eu_scale: f64, price_scale: f64) -> Result<CostTable, Error> {
    for (name, scale) in [("eu_scale", eu_scale), ("price_scale", price_scale)] {
        if !scale.is_finite() || scale <= 0.0 {
            return Err(Error::invalid(format!(
                "{name} must be finite and positive, got {scale}"
            )));
        }
    }
    let mut scaled = table.clone();
    let scale_vector = |v: &mut CostVector, usd_channel: CostChannel| {
        v.eu *= eu_scale;
        v.co2 *= eu_scale;
        v.usd *= match usd_channel {
            CostChannel::Explicit => price_scale,
            CostChannel::DerivedFromEu => eu_scale * price_scale,
        };
    };
    for class in InstructionClass::ALL {
        let usd_channel = scaled.entries[class.index()].usd_channel;
        scale_vector(&mut scaled.entries[class.index()].cost, usd_channel);
        if let Some(vectors) = scaled.tiers[class.index()].as_mut() {
            for v in vectors.iter_mut() {
                scale_vector(v, usd_channel);
            }
        }
    }
    if let Some(env) = scaled.environment.as_mut() {
        env.price_per_kwh_usd *= price_scale;
    }
    Ok(scaled)
}

/// A named weighting of the four metrics. Weights are strictly positive and
/// sum to 1 within [`WEIGHT_SUM_TOLERANCE`].
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    name: String,
    weights: PerMetric,
}

impl Profile {
    pub fn new(name: impl Into<String>, weights: PerMetric) -> Result<Profile, Error> {
        for metric in MetricKind::ALL {
            let w = weights.get(metric);
            if !w.is_finite() || w <= 0.0 {
                return Err(Error::invalid(format!(
                    "profile weight for {} must be positive, got {w}",
                    metric.name()
                )));
            }
        }
        let sum = weights.sum();
        if fmath::abs(sum - 1.0) > WEIGHT_SUM_TOLERANCE {
            return Err(Error::invalid(format!(
                "profile weights must sum to 1, got {sum}"
            )));
        }
        Ok(Profile {
            name: name.into(),
            weights,
        })
    }

    #[must_use]
    pub fn name(&self) -> &str {
        &self.name
    }

    #[must_use]
    pub fn weights(&self) -> PerMetric {
        self.weights
    }

    #[must_use]
    pub fn weight(&self, metric: MetricKind) -> f64 {
        self.weights.get(metric)
    }
}

pub const BUILTIN_PROFILE_NAMES: [&str; 4] = ["RESEARCH", "COMMERCIAL", "MOBILE", "HPC"];

/// The four built-in profiles, in CU, EU, CO2, USD weight order:
/// RESEARCH (0.4, 0.3, 0.25, 0.05), COMMERCIAL (0.3, 0.2, 0.2, 0.3),
/// MOBILE (0.25, 0.5, 0.15, 0.1), HPC (0.5, 0.3, 0.15, 0.05).
#[must_use]
pub fn builtin_profiles() -> Vec<Profile> {
    let make = |name: &str, w: [f64; 4]| {
        Profile::new(name, PerMetric(w)).expect("builtin profile weights are valid")
    };
    alloc::vec![
        make("RESEARCH", [0.4, 0.3, 0.25, 0.05]),
        make("COMMERCIAL", [0.3, 0.2, 0.2, 0.3]),
        make("MOBILE", [0.25, 0.5, 0.15, 0.1]),
        make("HPC", [0.5, 0.3, 0.15, 0.05]),
    ]
}

/// Case-insensitive lookup of a built-in profile.
#[must_use]
pub fn builtin_profile(name: &str) -> Option<Profile> {
    builtin_profiles()
        .into_iter()
        .find(|p| p.name().eq_ignore_ascii_case(name))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(actual: f64, expected: f64, what: &str) {
        let scale = expected.abs().max(1.0e-300);
        assert!(
            ((actual - expected) / scale).abs() <= 1e-12,
            "{what}: got {actual}, expected {expected}"
        );
    }

    fn simple_spec() -> CostTableSpec {
        let mut costs = BTreeMap::new();
        let full = |cu: f64, eu: f64, co2: f64, usd: f64| PartialCostVector {
            cu: Some(cu),
            eu: Some(eu),
            co2: Some(co2),
            usd: Some(usd),
        };
        costs.insert(
            InstructionClass::ArithAdd,
            full(1.0, 0.0001, 0.000027, 0.00001),
        );
        costs.insert(
            InstructionClass::MemLoad,
            full(3.0, 0.00025, 0.000069, 0.00003),
        );
        costs.insert(
            InstructionClass::Other,
            full(1.0, 0.0001, 0.000027, 0.00001),
        );
        let mut tier_costs = BTreeMap::new();
        let mut load_tiers = BTreeMap::new();
        load_tiers.insert(
            MemoryTier::L1,
            PartialCostVector {
                eu: Some(0.0001),
                ..Default::default()
            },
        );
        load_tiers.insert(
            MemoryTier::Dram,
            PartialCostVector {
                eu: Some(0.0005),
                ..Default::default()
            },
        );
        tier_costs.insert(InstructionClass::MemLoad, load_tiers);
        CostTableSpec {
            architecture: "x86_64".into(),
            version: "1.0.0".into(),
            costs,
            tier_costs,
            ..Default::default()
        }
    }

    #[test]
    fn class_names_round_trip() {
        for class in InstructionClass::ALL {
            assert_eq!(InstructionClass::from_name(class.name()), Some(class));
        }
        assert_eq!(InstructionClass::from_name("ADD"), None);
    }

    #[test]
    fn every_class_has_a_group_and_only_loads_and_stores_are_tierable() {
        let tierable: Vec<_> = InstructionClass::ALL
            .iter()
            .filter(|c| c.tierable())
            .collect();
        assert_eq!(tierable.len(), 4);
        assert_eq!(InstructionClass::Cmp.group(), Group::Logic);
        assert_eq!(InstructionClass::VecLoad.group(), Group::Memory);
        assert_eq!(InstructionClass::Other.group(), Group::Control);
    }

    #[test]
    fn derive_co2_matches_hand_computation() {
        // 0.0001 J at 0.475 kg/kWh: 0.0001 * 0.475 / 3.6e6
        assert_close(
            derive_co2(0.0001, 0.475),
            1.3194444444444445e-11,
            "derived co2",
        );
    }

    #[test]
    fn derive_usd_matches_hand_computation() {
        // 0.0001 J at 0.12 USD/kWh: 0.0001 * 0.12 / 3.6e6
        assert_close(
            derive_usd(0.0001, 0.12),
            3.3333333333333335e-12,
            "derived usd",
        );
    }

    #[test]
    fn version_parses_and_rejects_malformed_strings() {
        assert_eq!(
            Version::parse("1.0.0").unwrap(),
            Version {
                major: 1,
                minor: 0,
                patch: 0
            }
        );
        assert_eq!(Version::parse("2.13.4").unwrap().to_string(), "2.13.4");
        assert!(Version::parse("1.0").is_err());
        assert!(Version::parse("1.0.0.0").is_err());
        assert!(Version::parse("a.b.c").is_err());
        assert!(Version::parse("").is_err());
    }

    #[test]
    fn missing_other_class_is_rejected() {
        let mut spec = simple_spec();
        spec.costs.remove(&InstructionClass::Other);
        let err = CostTable::from_spec(spec).unwrap_err();
        assert!(
            matches!(err, Error::InvalidTable(ref m) if m.contains("other")),
            "{err}"
        );
    }

    #[test]
    fn negative_cost_is_rejected_naming_class_and_metric() {
        let mut spec = simple_spec();
        spec.costs.get_mut(&InstructionClass::ArithAdd).unwrap().eu = Some(-0.1);
        let err = CostTable::from_spec(spec).unwrap_err();
        let msg = alloc::format!("{err}");
        assert!(msg.contains("arith_add") && msg.contains("eu"), "{msg}");
    }

    #[test]
    fn tier_costs_on_non_tierable_class_are_rejected() {
        let mut spec = simple_spec();
        spec.tier_costs
            .insert(InstructionClass::ArithAdd, BTreeMap::new());
        assert!(CostTable::from_spec(spec).is_err());
    }

    #[test]
    fn absent_classes_fall_back_to_other() {
        let table = CostTable::from_spec(simple_spec()).unwrap();
        assert_eq!(
            table.base_cost(InstructionClass::SimdFma),
            table.base_cost(InstructionClass::Other)
        );
        assert!(!table.is_explicit(InstructionClass::SimdFma));
        assert!(table.is_explicit(InstructionClass::ArithAdd));
    }

    #[test]
    fn missing_co2_without_environment_is_rejected() {
        let mut spec = simple_spec();
        spec.costs.get_mut(&InstructionClass::ArithAdd).unwrap().co2 = None;
        assert!(CostTable::from_spec(spec).is_err());
    }

    #[test]
    fn missing_columns_derive_from_environment() {
        let mut spec = simple_spec();
        spec.environment = Some(EnvironmentParams {
            carbon_intensity_kg_per_kwh: 0.475,
            price_per_kwh_usd: 0.12,
        });
        let entry = spec.costs.get_mut(&InstructionClass::ArithAdd).unwrap();
        entry.co2 = None;
        entry.usd = None;
        let table = CostTable::from_spec(spec).unwrap();
        let add = table.base_cost(InstructionClass::ArithAdd);
        assert_close(add.co2, 1.3194444444444445e-11, "derived co2 column");
        assert_close(add.usd, 3.3333333333333335e-12, "derived usd column");
        assert_eq!(
            table.co2_channel(InstructionClass::ArithAdd),
            CostChannel::DerivedFromEu
        );
        assert_eq!(
            table.usd_channel(InstructionClass::ArithAdd),
            CostChannel::DerivedFromEu
        );
        assert_eq!(
            table.usd_channel(InstructionClass::Other),
            CostChannel::Explicit
        );
    }

    #[test]
    fn lookup_without_tier_costs_returns_the_base_vector() {
        let table = CostTable::from_spec(simple_spec()).unwrap();
        let v = lookup_cost(&table, InstructionClass::ArithAdd, None).unwrap();
        assert_eq!(v, CostVector::new(1.0, 0.0001, 0.000027, 0.00001));
        // mem_store is tierable but carries no tier vectors in this spec
        let store = lookup_cost(&table, InstructionClass::MemStore, None).unwrap();
        assert_eq!(store, table.base_cost(InstructionClass::MemStore));
    }

    #[test]
    fn lookup_with_hit_miss_prior_returns_the_expectation() {
        let table = CostTable::from_spec(simple_spec()).unwrap();
        let prior = TierPrior::hit_miss(0.9).unwrap();
        let v = lookup_cost(&table, InstructionClass::MemLoad, Some(&prior)).unwrap();
        // 0.9 * 0.0001 + 0.1 * 0.0005
        assert_close(v.eu, 0.00014000000000000001, "expected load energy");
        // tier overrides only replaced eu; cu stays at base
        assert_eq!(v.cu, 3.0);
    }

    #[test]
    fn lookup_uses_the_table_default_prior_when_none_is_given() {
        let table = CostTable::from_spec(simple_spec()).unwrap();
        let v = lookup_cost(&table, InstructionClass::MemLoad, None).unwrap();
        // 0.90 * 0.0001 + 0.06 * 0.00025 + 0.03 * 0.00025 + 0.01 * 0.0005
        assert_close(v.eu, 0.00011750000000000001, "default-prior load energy");
    }

    #[test]
    fn prior_on_non_tierable_class_is_an_error() {
        let table = CostTable::from_spec(simple_spec()).unwrap();
        let prior = TierPrior::default();
        assert!(lookup_cost(&table, InstructionClass::ArithAdd, Some(&prior)).is_err());
    }

    #[test]
    fn tier_prior_validation_rejects_bad_distributions() {
        assert!(TierPrior::new([0.5, 0.5, 0.5, -0.5]).is_err());
        assert!(TierPrior::new([0.5, 0.2, 0.2, 0.2]).is_err());
        assert!(TierPrior::new([0.9, 0.06, 0.03, 0.01]).is_ok());
        let sum: f64 = TierPrior::default().probs().iter().sum();
        assert!((sum - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn scaling_multiplies_energy_and_explicit_usd_independently() {
        let table = CostTable::from_spec(simple_spec()).unwrap();
        let cheaper = scale_table(&table, 1.0, 0.7).unwrap();
        assert_close(
            cheaper.base_cost(InstructionClass::ArithAdd).usd,
            7e-06,
            "scaled usd",
        );
        assert_eq!(cheaper.base_cost(InstructionClass::ArithAdd).eu, 0.0001);
        let hotter = scale_table(&table, 1.2, 1.0).unwrap();
        assert_close(
            hotter.base_cost(InstructionClass::ArithAdd).eu,
            0.00012,
            "scaled eu",
        );
        assert_close(
            hotter.base_cost(InstructionClass::ArithAdd).co2,
            0.000027 * 1.2,
            "co2 tracks energy",
        );
        assert_eq!(hotter.base_cost(InstructionClass::ArithAdd).usd, 0.00001);
    }

    #[test]
    fn identity_scaling_returns_an_identical_table() {
        let table = CostTable::from_spec(simple_spec()).unwrap();
        let same = scale_table(&table, 1.0, 1.0).unwrap();
        assert_eq!(table, same);
    }

    #[test]
    fn derived_usd_tracks_both_energy_and_tariff() {
        let mut spec = simple_spec();
        spec.environment = Some(EnvironmentParams {
            carbon_intensity_kg_per_kwh: 0.475,
            price_per_kwh_usd: 0.12,
        });
        spec.costs.get_mut(&InstructionClass::ArithAdd).unwrap().usd = None;
        let table = CostTable::from_spec(spec).unwrap();
        let base_usd = table.base_cost(InstructionClass::ArithAdd).usd;
        let scaled = scale_table(&table, 2.0, 3.0).unwrap();
        assert_close(
            scaled.base_cost(InstructionClass::ArithAdd).usd,
            base_usd * 6.0,
            "derived usd",
        );
        // the explicit usd column of `other` only sees the tariff factor
        assert_close(
            scaled.base_cost(InstructionClass::Other).usd,
            table.base_cost(InstructionClass::Other).usd * 3.0,
            "explicit usd",
        );
    }

    #[test]
    fn reciprocal_scaling_restores_the_table_within_tolerance() {
        let table = CostTable::from_spec(simple_spec()).unwrap();
        let back = scale_table(
            &scale_table(&table, 1.3, 0.4).unwrap(),
            1.0 / 1.3,
            1.0 / 0.4,
        )
        .unwrap();
        for class in InstructionClass::ALL {
            let a = table.base_cost(class);
            let b = back.base_cost(class);
            for metric in MetricKind::ALL {
                assert_close(b.get(metric), a.get(metric), class.name());
            }
        }
    }

    #[test]
    fn nonpositive_scales_are_rejected() {
        let table = CostTable::from_spec(simple_spec()).unwrap();
        assert!(scale_table(&table, 0.0, 1.0).is_err());
        assert!(scale_table(&table, 1.0, -2.0).is_err());
        assert!(scale_table(&table, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn builtin_profiles_match_their_published_weights() {
        let profiles = builtin_profiles();
        let expected: [(&str, [f64; 4]); 4] = [
            ("RESEARCH", [0.4, 0.3, 0.25, 0.05]),
            ("COMMERCIAL", [0.3, 0.2, 0.2, 0.3]),
            ("MOBILE", [0.25, 0.5, 0.15, 0.1]),
            ("HPC", [0.5, 0.3, 0.15, 0.05]),
        ];
        assert_eq!(profiles.len(), 4);
        for (profile, (name, weights)) in profiles.iter().zip(expected.iter()) {
            assert_eq!(profile.name(), *name);
            assert_eq!(profile.weights().0, *weights);
            assert!(
                (profile.weights().sum() - 1.0).abs() <= 1e-12,
                "{name} weight sum"
            );
        }
    }

    #[test]
    fn builtin_profile_lookup_is_case_insensitive() {
        assert_eq!(builtin_profile("research").unwrap().name(), "RESEARCH");
        assert_eq!(builtin_profile("HPC").unwrap().name(), "HPC");
        assert!(builtin_profile("DESKTOP").is_none());
    }

    #[test]
    fn profiles_reject_non_simplex_weights() {
        assert!(Profile::new("bad", PerMetric([0.5, 0.5, 0.5, 0.5])).is_err());
        assert!(Profile::new("bad", PerMetric([1.0, 0.0, 0.0, 0.0])).is_err());
        assert!(Profile::new("bad", PerMetric([0.7, 0.1, 0.1, -0.1])).is_err());
        assert!(Profile::new("ok", PerMetric([0.25, 0.25, 0.25, 0.25])).is_ok());
    }
}
