//! Cost-table JSON documents: loading, validation, and serialization.
//!
//! Documents key cost rows by canonical class name or by the conventional
//! uppercase mnemonic (ADD, MOV, LOAD, ...). Tier overrides nest under a
//! row and accept `hit`/`miss` as aliases for `l1`/`dram`. Serialization
//! emits canonical names only and omits everything the loader would
//! reconstruct identically: fallback rows, derived co2/usd columns, and
//! tier components equal to their inherited value.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use opcost_core::cost::{
    derive_co2, derive_usd, CostChannel, CostTable, CostTableSpec, EnvironmentParams,
    InstructionClass, MemoryTier, PartialCostVector, TierPrior,
};

use crate::error::AppError;

/// Architectures with a table compiled into the binary.
pub const BUNDLED_ARCHITECTURES: [&str; 1] = ["x86_64"];

const X86_64_TABLE: &str = include_str!("../data/x86_64.json");

/// The built-in table for `arch`, if one is bundled.
pub fn bundled_table(arch: &str) -> Option<Result<CostTable, AppError>> {
    match arch {
        "x86_64" => Some(load_table(X86_64_TABLE, "<bundled x86_64>")),
        _ => None,
    }
}

const MNEMONIC_ALIASES: [(&str, InstructionClass); 16] = [
    ("ADD", InstructionClass::ArithAdd),
    ("SUB", InstructionClass::ArithSub),
    ("MUL", InstructionClass::ArithMul),
    ("DIV", InstructionClass::ArithDiv),
    ("AND", InstructionClass::LogicAnd),
    ("OR", InstructionClass::LogicOr),
    ("XOR", InstructionClass::LogicXor),
    ("MOV", InstructionClass::MemMove),
    ("LOAD", InstructionClass::MemLoad),
    ("STORE", InstructionClass::MemStore),
    ("JMP", InstructionClass::BranchJump),
    ("CALL", InstructionClass::ControlCall),
    ("CMP", InstructionClass::Cmp),
    ("ADDPS", InstructionClass::SimdAdd),
    ("MULPS", InstructionClass::SimdMul),
    ("VMULPS", InstructionClass::SimdFma),
];

fn resolve_class(key: &str) -> Option<InstructionClass> {
    if let Some(class) = InstructionClass::from_name(key) {
        return Some(class);
    }
    let upper = key.to_ascii_uppercase();
    MNEMONIC_ALIASES
        .iter()
        .find(|(alias, _)| *alias == upper)
        .map(|(_, class)| *class)
}

fn tier_doc_key(tier: MemoryTier) -> &'static str {
    match tier {
        MemoryTier::L1 => "l1",
        MemoryTier::L2 => "l2",
        MemoryTier::L3 => "l3",
        MemoryTier::Dram => "dram",
    }
}

fn resolve_tier(key: &str) -> Option<MemoryTier> {
    let lower = key.to_ascii_lowercase();
    match lower.as_str() {
        "hit" => Some(MemoryTier::L1),
        "miss" => Some(MemoryTier::Dram),
        _ => MemoryTier::ALL
            .into_iter()
            .find(|t| tier_doc_key(*t) == lower),
    }
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct VectorDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    cu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    eu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    co2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    usd: Option<f64>,
}

impl VectorDoc {
    fn is_empty(&self) -> bool {
        self.cu.is_none() && self.eu.is_none() && self.co2.is_none() && self.usd.is_none()
    }

    fn into_partial(self) -> PartialCostVector {
        PartialCostVector {
            cu: self.cu,
            eu: self.eu,
            co2: self.co2,
            usd: self.usd,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct CostEntryDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    cu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    eu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    co2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    usd: Option<f64>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    tiers: BTreeMap<String, VectorDoc>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EnvironmentDoc {
    carbon_intensity_kg_per_kwh: f64,
    price_per_kwh_usd: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TierPriorDoc {
    l1: f64,
    l2: f64,
    l3: f64,
    dram: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableDoc {
    architecture: String,
    version: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    provenance: BTreeMap<String, serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    environment: Option<EnvironmentDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tier_prior: Option<TierPriorDoc>,
    costs: BTreeMap<String, CostEntryDoc>,
}

/// Parses and validates a cost-table document. `origin` names the source
/// in error messages (a path, or a marker for embedded data).
pub fn load_table(text: &str, origin: &str) -> Result<CostTable, AppError> {
    let doc: TableDoc = serde_json::from_str(text)
        .map_err(|e| AppError::data(format!("{origin}: invalid cost table: {e}")))?;

    let mut costs = BTreeMap::new();
    let mut tier_costs = BTreeMap::new();
    let mut seen: BTreeMap<InstructionClass, String> = BTreeMap::new();
    for (key, entry) in doc.costs {
        let class = resolve_class(&key).ok_or_else(|| {
            AppError::data(format!("{origin}: unknown instruction class {key:?}"))
        })?;
        if let Some(earlier) = seen.insert(class, key.clone()) {
            return Err(AppError::data(format!(
                "{origin}: rows {earlier:?} and {key:?} both name class {}",
                class.name()
            )));
        }
        let mut tiers = BTreeMap::new();
        for (tier_key, vector) in entry.tiers {
            let tier = resolve_tier(&tier_key).ok_or_else(|| {
                AppError::data(format!(
                    "{origin}: class {}: unknown memory tier {tier_key:?}",
                    class.name()
                ))
            })?;
            if tiers.insert(tier, vector.into_partial()).is_some() {
                return Err(AppError::data(format!(
                    "{origin}: class {}: tier {} appears twice",
                    class.name(),
                    tier.name()
                )));
            }
        }
        if !tiers.is_empty() {
            tier_costs.insert(class, tiers);
        }
        costs.insert(
            class,
            PartialCostVector {
                cu: entry.cu,
                eu: entry.eu,
                co2: entry.co2,
                usd: entry.usd,
            },
        );
    }

    let provenance = doc
        .provenance
        .into_iter()
        .map(|(k, v)| {
            let text = match v {
                serde_json::Value::String(s) => s,
                other => other.to_string(),
            };
            (k, text)
        })
        .collect();

    let spec = CostTableSpec {
        architecture: doc.architecture,
        version: doc.version,
        provenance,
        environment: doc.environment.map(|env| EnvironmentParams {
            carbon_intensity_kg_per_kwh: env.carbon_intensity_kg_per_kwh,
            price_per_kwh_usd: env.price_per_kwh_usd,
        }),
        costs,
        tier_costs,
        tier_prior: match doc.tier_prior {
            Some(p) => Some(
                TierPrior::new([p.l1, p.l2, p.l3, p.dram])
                    .map_err(|e| AppError::data(format!("{origin}: tier_prior: {e}")))?,
            ),
            None => None,
        },
    };
    CostTable::from_spec(spec).map_err(|e| AppError::data(format!("{origin}: {e}")))
}

/// Reads and parses a table from disk.
pub fn load_table_file(path: &std::path::Path) -> Result<CostTable, AppError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| AppError::io(format!("cannot read cost table {}: {e}", path.display())))?;
    load_table(&text, &path.display().to_string())
}

/// Serializes a table to its document form.
///
/// For any table built from a document or spec, loading the result yields
/// an equal table, including channel and fallback structure: derived
/// columns are omitted and re-derive to the same bits. Rescaled tables are
/// outside that guarantee, since scaling multiplies derived columns in
/// place rather than re-deriving them.
#[must_use]
pub fn serialize_table(table: &CostTable) -> String {
    let env = table.environment();
    let mut costs = BTreeMap::new();
    for class in InstructionClass::ALL {
        if !table.is_explicit(class) {
            continue;
        }
        let base = table.base_cost(class);
        let mut entry = CostEntryDoc {
            cu: Some(base.cu),
            eu: Some(base.eu),
            co2: (table.co2_channel(class) == CostChannel::Explicit).then_some(base.co2),
            usd: (table.usd_channel(class) == CostChannel::Explicit).then_some(base.usd),
            tiers: BTreeMap::new(),
        };
        if table.has_tier_costs(class) {
            for tier in MemoryTier::ALL {
                let v = table
                    .tier_cost(class, tier)
                    .expect("tier vectors are materialized");
                let inherited_co2 = match (table.co2_channel(class), env) {
                    (CostChannel::DerivedFromEu, Some(env)) => {
                        derive_co2(v.eu, env.carbon_intensity_kg_per_kwh)
                    }
                    _ => base.co2,
                };
                let inherited_usd = match (table.usd_channel(class), env) {
                    (CostChannel::DerivedFromEu, Some(env)) => {
                        derive_usd(v.eu, env.price_per_kwh_usd)
                    }
                    _ => base.usd,
                };
                let doc = VectorDoc {
                    cu: (v.cu != base.cu).then_some(v.cu),
                    eu: (v.eu != base.eu).then_some(v.eu),
                    co2: (v.co2 != inherited_co2).then_some(v.co2),
                    usd: (v.usd != inherited_usd).then_some(v.usd),
                };
                if !doc.is_empty() {
                    entry.tiers.insert(tier_doc_key(tier).to_string(), doc);
                }
            }
            // a class can carry tier vectors that all equal its base row;
            // an empty marker keeps that structure across a round trip
            if entry.tiers.is_empty() {
                entry.tiers.insert(
                    tier_doc_key(MemoryTier::L1).to_string(),
                    VectorDoc::default(),
                );
            }
        }
        costs.insert(class.name().to_string(), entry);
    }

    let prior = table.default_prior().probs();
    let doc = TableDoc {
        architecture: table.architecture().to_string(),
        version: table.version().to_string(),
        provenance: table
            .provenance()
            .iter()
            .map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone())))
            .collect(),
        environment: env.map(|env| EnvironmentDoc {
            carbon_intensity_kg_per_kwh: env.carbon_intensity_kg_per_kwh,
            price_per_kwh_usd: env.price_per_kwh_usd,
        }),
        tier_prior: Some(TierPriorDoc {
            l1: prior[0],
            l2: prior[1],
            l3: prior[2],
            dram: prior[3],
        }),
        costs,
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("document model always serializes");
    text.push('\n');
    text
}
