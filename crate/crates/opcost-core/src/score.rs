//! Raw cost aggregation, cohort normalization, composite scoring, and
//! grading.
//!
//! Pipeline: per-artifact counts fold into raw totals (one per metric) via
//! the cost table; a cohort's totals are min-max normalized per metric with
//! an epsilon-padded denominator; a profile's weights collapse the
//! normalized vector into a composite in [0, 1); the efficiency score is
//! `100 * (1 - composite)` rounded to two decimals, which the grade and
//! rating scales then band.
//!
//! Invariants:
//! - aggregation is additive: counts of a merged artifact aggregate to the
//!   sum of the parts' totals;
//! - normalized values lie in [0, 1) for members of the normalizing cohort;
//! - a cohort-wide dominator (minimal in every metric) scores 100.0 and a
//!   dominated artifact (maximal in every metric) rounds to 0.0;
//! - `band.0 <= csc <= band.1` whenever a band is present.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::cost::{
    lookup_cost, CostTable, InstructionClass, MemoryTier, MetricKind, PerMetric, Profile, TierPrior,
};
use crate::counts::{ClassPriors, CountVector};
use crate::error::Error;
use crate::fmath;

/// Denominator padding for min-max normalization.
pub const NORM_EPSILON: f64 = 1e-9;

/// Raw cost totals of one artifact across the four metrics.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RawTotals {
    pub cu: f64,
    pub eu: f64,
    pub co2: f64,
    pub usd: f64,
}

impl RawTotals {
    #[must_use]
    pub fn new(cu: f64, eu: f64, co2: f64, usd: f64) -> RawTotals {
        RawTotals { cu, eu, co2, usd }
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

    pub fn accumulate(&mut self, other: &RawTotals) {
        self.cu += other.cu;
        self.eu += other.eu;
        self.co2 += other.co2;
        self.usd += other.usd;
    }
}

/// An artifact to be scored: a name, its counts, and any per-class tier
/// priors its source hints produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub id: String,
    pub counts: CountVector,
    pub priors: ClassPriors,
}

impl Artifact {
    #[must_use]
    pub fn new(id: impl Into<String>, counts: CountVector) -> Artifact {
        Artifact {
            id: id.into(),
            counts,
            priors: ClassPriors::default(),
        }
    }
}

/// Folds counts into raw totals: for each class, count times the effective
/// cost vector. `priors` overrides the table's default tier prior per
/// class; entries for non-tierable classes are ignored.
#[must_use]
pub fn aggregate_raw(
    counts: &CountVector,
    table: &CostTable,
    priors: Option<&ClassPriors>,
) -> RawTotals {
    let mut totals = RawTotals::default();
    for (class, n) in counts.iter_nonzero() {
        let prior = if class.tierable() {
            priors.and_then(|p| p.get(class))
        } else {
            None
        };
        let cost =
            lookup_cost(table, class, prior).expect("priors are only applied to tierable classes");
        let n = n as f64;
        totals.cu += n * cost.cu;
        totals.eu += n * cost.eu;
        totals.co2 += n * cost.co2;
        totals.usd += n * cost.usd;
    }
    totals
}

/// A set of artifacts that normalize against each other.
#[derive(Debug, Clone, PartialEq)]
pub struct Cohort {
    members: Vec<(String, RawTotals)>,
}

impl Cohort {
    /// Member ids must be unique; totals must be finite.
    pub fn new(members: Vec<(String, RawTotals)>) -> Result<Cohort, Error> {
        for (idx, (id, totals)) in members.iter().enumerate() {
            if members[..idx].iter().any(|(other, _)| other == id) {
                return Err(Error::invalid(format!(
                    "duplicate artifact id {id:?} in cohort"
                )));
            }
            for metric in MetricKind::ALL {
                let v = totals.get(metric);
                if !v.is_finite() {
                    return Err(Error::invalid(format!(
                        "artifact {id:?} has a non-finite {} total",
                        metric.name()
                    )));
                }
            }
        }
        Ok(Cohort { members })
    }

    #[must_use]
    pub fn members(&self) -> &[(String, RawTotals)] {
        &self.members
    }

    #[must_use]
    pub fn len(&self) -> usize {
        self.members.len()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Per-metric minima and maxima over the cohort. Empty cohorts have no
    /// extrema.
    #[must_use]
    pub fn min_max(&self, metric: MetricKind) -> Option<(f64, f64)> {
        let mut iter = self.members.iter().map(|(_, t)| t.get(metric));
        let first = iter.next()?;
        let mut min = first;
        let mut max = first;
        for v in iter {
            min = min.min(v);
            max = max.max(v);
        }
        Some((min, max))
    }
}

/// `(x - min) / (max - min + epsilon)`: always well-defined, and always 0
/// when the cohort is degenerate in that metric.
#[must_use]
pub fn normalize_value(x: f64, min: f64, max: f64) -> f64 {
    (x - min) / (max - min + NORM_EPSILON)
}

/// Min-max normalizes every member against the cohort, preserving member
/// order. Errors on an empty cohort.
pub fn normalize_cohort(cohort: &Cohort) -> Result<Vec<PerMetric>, Error> {
    if cohort.is_empty() {
        return Err(Error::invalid("cannot normalize an empty cohort"));
    }
    let bounds: Vec<(f64, f64)> = MetricKind::ALL
        .iter()
        .map(|m| cohort.min_max(*m).expect("cohort is non-empty"))
        .collect();
    Ok(cohort
        .members
        .iter()
        .map(|(_, totals)| {
            let mut norm = PerMetric::default();
            for metric in MetricKind::ALL {
                let (min, max) = bounds[metric.index()];
                norm.set(metric, normalize_value(totals.get(metric), min, max));
            }
            norm
        })
        .collect())
}

/// Weighted sum of normalized values under a profile, in metric order.
#[must_use]
pub fn composite(norms: PerMetric, profile: &Profile) -> f64 {
    let mut csc = 0.0;
    for metric in MetricKind::ALL {
        csc += profile.weight(metric) * norms.get(metric);
    }
    csc
}

/// Letter grades, best to worst.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Grade {
    APlus,
    A,
    AMinus,
    BPlus,
    B,
    BMinus,
    CPlus,
    C,
    CMinus,
    D,
    F,
}

impl Grade {
    #[must_use]
    pub fn name(self) -> &'static str {
        match self {
            Grade::APlus => "A+",
            Grade::A => "A",
            Grade::AMinus => "A-",
            Grade::BPlus => "B+",
            Grade::B => "B",
            Grade::BMinus => "B-",
            Grade::CPlus => "C+",
            Grade::C => "C",
            Grade::CMinus => "C-",
            Grade::D => "D",
            Grade::F => "F",
        }
    }

    #[must_use]
    pub fn from_name(name: &str) -> Option<Grade> {
        [
            Grade::APlus,
            Grade::A,
            Grade::AMinus,
            Grade::BPlus,
            Grade::B,
            Grade::BMinus,
            Grade::CPlus,
            Grade::C,
            Grade::CMinus,
            Grade::D,
            Grade::F,
        ]
        .into_iter()
        .find(|g| g.name() == name)
    }
}

impl core::fmt::Display for Grade {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

/// Coarse quality ratings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Rating {
    Excellent,
    Good,
    Fair,
    Poor,
}

impl Rating {
    #[must_use]
    pub fn name(self) -> &'static str {
        match self {
            Rating::Excellent => "Excellent",
            Rating::Good => "Good",
            Rating::Fair => "Fair",
            Rating::Poor => "Poor",
        }
    }

    #[must_use]
    pub fn from_name(name: &str) -> Option<Rating> {
        [Rating::Excellent, Rating::Good, Rating::Fair, Rating::Poor]
            .into_iter()
            .find(|r| r.name() == name)
    }
}

impl core::fmt::Display for Rating {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

/// Score thresholds for grades and ratings. A score earns the first band
/// whose threshold it meets; `F` and `Poor` are the floors.
#[derive(Debug, Clone, PartialEq)]
pub struct GradeBands {
    grade_cuts: [(Grade, f64); 10],
    rating_cuts: [(Rating, f64); 3],
}

impl Default for GradeBands {
    fn default() -> GradeBands {
        GradeBands {
            grade_cuts: [
                (Grade::APlus, 97.0),
                (Grade::A, 93.0),
                (Grade::AMinus, 90.0),
                (Grade::BPlus, 87.0),
                (Grade::B, 83.0),
                (Grade::BMinus, 80.0),
                (Grade::CPlus, 77.0),
                (Grade::C, 73.0),
                (Grade::CMinus, 70.0),
                (Grade::D, 60.0),
            ],
            rating_cuts: [
                (Rating::Excellent, 90.0),
                (Rating::Good, 75.0),
                (Rating::Fair, 60.0),
            ],
        }
    }
}

impl GradeBands {
    /// Replaces one grade threshold. `F` has no threshold.
    pub fn with_grade_threshold(
        mut self,
        grade: Grade,
        threshold: f64,
    ) -> Result<GradeBands, Error> {
        let slot = self
            .grade_cuts
            .iter_mut()
            .find(|(g, _)| *g == grade)
            .ok_or_else(|| Error::invalid("grade F is the floor and has no threshold"))?;
        slot.1 = threshold;
        self.validate()?;
        Ok(self)
    }

    /// Replaces one rating threshold. `Poor` has no threshold.
    pub fn with_rating_threshold(
        mut self,
        rating: Rating,
        threshold: f64,
    ) -> Result<GradeBands, Error> {
        let slot = self
            .rating_cuts
            .iter_mut()
            .find(|(r, _)| *r == rating)
            .ok_or_else(|| Error::invalid("rating Poor is the floor and has no threshold"))?;
        slot.1 = threshold;
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<(), Error> {
        let check = |cuts: &[f64]| -> Result<(), Error> {
            for pair in cuts.windows(2) {
                if pair[0] <= pair[1] {
                    return Err(Error::invalid(format!(
                        "band thresholds must be strictly decreasing: {} then {}",
                        pair[0], pair[1]
                    )));
                }
            }
            for v in cuts {
                if !v.is_finite() || *v < 0.0 || *v > 100.0 {
                    return Err(Error::invalid(format!(
                        "band threshold {v} must lie in [0, 100]"
                    )));
                }
            }
            Ok(())
        };
        let grades: Vec<f64> = self.grade_cuts.iter().map(|(_, t)| *t).collect();
        let ratings: Vec<f64> = self.rating_cuts.iter().map(|(_, t)| *t).collect();
        check(&grades)?;
        check(&ratings)
    }

    #[must_use]
    pub fn grade_for(&self, score: f64) -> Grade {
        self.grade_cuts
            .iter()
            .find_map(|(grade, cut)| (score >= *cut).then_some(*grade))
            .unwrap_or(Grade::F)
    }

    #[must_use]
    pub fn rating_for(&self, score: f64) -> Rating {
        self.rating_cuts
            .iter()
            .find_map(|(rating, cut)| (score >= *cut).then_some(*rating))
            .unwrap_or(Rating::Poor)
    }

    #[must_use]
    pub fn grade_threshold(&self, grade: Grade) -> Option<f64> {
        self.grade_cuts
            .iter()
            .find(|(g, _)| *g == grade)
            .map(|(_, t)| *t)
    }

    #[must_use]
    pub fn rating_threshold(&self, rating: Rating) -> Option<f64> {
        self.rating_cuts
            .iter()
            .find(|(r, _)| *r == rating)
            .map(|(_, t)| *t)
    }
}

/// Rounds to two decimals, halves away from zero.
#[must_use]
pub fn round2(x: f64) -> f64 {
    fmath::round(x * 100.0) / 100.0
}

/// Score, grade, and rating derived from one composite value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreSummary {
    pub score: f64,
    pub grade: Grade,
    pub rating: Rating,
}

/// `100 * (1 - csc)` rounded to two decimals, then banded. `csc` must lie
/// in [0, 1].
pub fn efficiency_and_grade(csc: f64, bands: &GradeBands) -> Result<ScoreSummary, Error> {
    if !csc.is_finite() || !(0.0..=1.0).contains(&csc) {
        return Err(Error::invalid(format!(
            "composite must lie in [0, 1], got {csc}"
        )));
    }
    let score = round2(100.0 * (1.0 - csc));
    Ok(ScoreSummary {
        score,
        grade: bands.grade_for(score),
        rating: bands.rating_for(score),
    })
}

/// Everything scoring knows about one artifact.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeResult {
    pub artifact_id: String,
    pub raw: RawTotals,
    pub normalized: PerMetric,
    pub csc: f64,
    pub efficiency_score: f64,
    pub grade: Grade,
    pub rating: Rating,
    /// Composite under all-L1 and all-DRAM tier assumptions; brackets `csc`.
    pub band: Option<(f64, f64)>,
}

/// Scores a cohort of artifacts against one table and profile, preserving
/// input order. Every result carries its tier-uncertainty band.
pub fn score_cohort(
    artifacts: &[Artifact],
    table: &CostTable,
    profile: &Profile,
    bands: &GradeBands,
) -> Result<Vec<CompositeResult>, Error> {
    let members: Vec<(String, RawTotals)> = artifacts
        .iter()
        .map(|a| {
            (
                a.id.clone(),
                aggregate_raw(&a.counts, table, Some(&a.priors)),
            )
        })
        .collect();
    let cohort = Cohort::new(members)?;
    let norms = normalize_cohort(&cohort)?;

    let mut results = Vec::with_capacity(artifacts.len());
    for ((artifact, (id, raw)), normalized) in
        artifacts.iter().zip(cohort.members().iter()).zip(norms)
    {
        let csc = composite(normalized, profile);
        let summary = efficiency_and_grade(csc, bands)?;
        let band = uncertainty_band(artifact, table, &cohort, profile);
        results.push(CompositeResult {
            artifact_id: id.clone(),
            raw: *raw,
            normalized,
            csc,
            efficiency_score: summary.score,
            grade: summary.grade,
            rating: summary.rating,
            band: Some(band),
        });
    }
    Ok(results)
}

/// Composite range for one artifact when every tierable access is assumed
/// all-L1 versus all-DRAM, holding the cohort's normalization bounds at
/// their expected-cost values. The returned interval always contains the
/// expected composite.
#[must_use]
pub fn uncertainty_band(
    artifact: &Artifact,
    table: &CostTable,
    cohort: &Cohort,
    profile: &Profile,
) -> (f64, f64) {
    let scenario_csc = |tier: MemoryTier| -> f64 {
        let mut priors = ClassPriors::default();
        for class in InstructionClass::ALL {
            if class.tierable() {
                priors.insert(class, TierPrior::point_mass(tier));
            }
        }
        let totals = aggregate_raw(&artifact.counts, table, Some(&priors));
        let mut norm = PerMetric::default();
        for metric in MetricKind::ALL {
            let (min, max) = cohort.min_max(metric).expect("cohort is non-empty");
            norm.set(metric, normalize_value(totals.get(metric), min, max));
        }
        composite(norm, profile)
    };

    let expected_totals = aggregate_raw(&artifact.counts, table, Some(&artifact.priors));
    let mut expected_norm = PerMetric::default();
    for metric in MetricKind::ALL {
        let (min, max) = cohort.min_max(metric).expect("cohort is non-empty");
        expected_norm.set(
            metric,
            normalize_value(expected_totals.get(metric), min, max),
        );
    }
    let expected = composite(expected_norm, profile);

    let a = scenario_csc(MemoryTier::L1);
    let b = scenario_csc(MemoryTier::Dram);
    (a.min(b).min(expected), a.max(b).max(expected))
}
