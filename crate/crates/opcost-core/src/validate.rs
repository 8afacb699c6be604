//! Synthetic validation: simulated measurements, baseline predictors,
//! weight sweeps, weight-perturbation stability, and the tariff-robustness
//! grid.
//!
//! Everything here is seeded and produces bit-identical results for the
//! same inputs: the simulator uses one stream per run, the perturbation
//! study one counter-addressed stream per trial.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal};

use crate::cost::{scale_table, CostTable, Group, MetricKind, PerMetric, Profile};
use crate::error::Error;
use crate::report::rank;
use crate::score::{
    aggregate_raw, composite, score_cohort, Artifact, CompositeResult, GradeBands, RawTotals,
};

/// Seconds of simulated wall time per compute unit.
pub const SECONDS_PER_CU: f64 = 1e-3;
/// Relative noise applied to simulated time and energy.
pub const NOISE_SIGMA: f64 = 0.05;
/// Noise draws are rejected until their magnitude falls below this.
pub const NOISE_REJECT_LIMIT: f64 = 0.15;
/// Slowdown factor range applied to memory-bound workloads.
pub const MEMORY_PENALTY: (f64, f64) = (1.2, 1.8);

/// Behavioral class of a workload, inferred from its name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WorkloadClass {
    ComputeBound,
    MemoryBound,
    Mixed,
}

impl WorkloadClass {
    #[must_use]
    pub fn name(self) -> &'static str {
        match self {
            WorkloadClass::ComputeBound => "compute_bound",
            WorkloadClass::MemoryBound => "memory_bound",
            WorkloadClass::Mixed => "mixed",
        }
    }
}

/// Classifies by case-insensitive name fragments; compute markers win over
/// memory markers, anything unmarked is mixed.
#[must_use]
pub fn classify_workload(name: &str) -> WorkloadClass {
    let lower: String = name.chars().flat_map(char::to_lowercase).collect();
    const COMPUTE: [&str; 3] = ["loops", "factorial", "formula"];
    const MEMORY: [&str; 2] = ["sort", "search"];
    if COMPUTE.iter().any(|m| lower.contains(m)) {
        WorkloadClass::ComputeBound
    } else if MEMORY.iter().any(|m| lower.contains(m)) {
        WorkloadClass::MemoryBound
    } else {
        WorkloadClass::Mixed
    }
}

/// One simulated execution.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub id: String,
    pub workload: WorkloadClass,
    pub time_s: f64,
    pub energy_j: f64,
}

fn bounded_noise(rng: &mut ChaCha12Rng) -> f64 {
    let normal = Normal::new(0.0, NOISE_SIGMA).expect("constant sigma is valid");
    loop {
        let v = normal.sample(rng);
        if v.abs() < NOISE_REJECT_LIMIT {
            return v;
        }
    }
}

/// Simulates a measured run per artifact: time proportional to compute
/// units and energy proportional to energy units, both with bounded
/// multiplicative noise; memory-bound workloads additionally slow down by
/// a uniform penalty factor.
pub fn simulate(artifacts: &[(String, RawTotals)], seed: u64) -> Result<Vec<Measurement>, Error> {
    if artifacts.is_empty() {
        return Err(Error::invalid("nothing to simulate"));
    }
    for (id, raw) in artifacts {
        if !(raw.cu.is_finite() && raw.eu.is_finite()) || raw.cu < 0.0 || raw.eu < 0.0 {
            return Err(Error::invalid(format!(
                "artifact {id:?} has invalid totals"
            )));
        }
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    Ok(artifacts
        .iter()
        .map(|(id, raw)| {
            let workload = classify_workload(id);
            let time_noise = bounded_noise(&mut rng);
            let penalty = if workload == WorkloadClass::MemoryBound {
                rng.random_range(MEMORY_PENALTY.0..MEMORY_PENALTY.1)
            } else {
                1.0
            };
            let energy_noise = bounded_noise(&mut rng);
            Measurement {
                id: id.clone(),
                workload,
                time_s: SECONDS_PER_CU * raw.cu * (1.0 + time_noise) * penalty,
                energy_j: raw.eu * (1.0 + energy_noise),
            }
        })
        .collect())
}

/// Prediction strategies compared in a validation study.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Baseline {
    /// The full cost model: compute units predict time, energy units
    /// predict energy.
    Model,
    /// Flat instruction count predicts both.
    CountOnly,
    /// Instruction count with memory operations weighted ten-fold.
    MemoryWeighted,
    /// Monetary total predicts both.
    PriceProxy,
}

impl Baseline {
    pub const ALL: [Baseline; 4] = [
        Baseline::Model,
        Baseline::CountOnly,
        Baseline::MemoryWeighted,
        Baseline::PriceProxy,
    ];

    #[must_use]
    pub fn name(self) -> &'static str {
        match self {
            Baseline::Model => "MODEL",
            Baseline::CountOnly => "B1",
            Baseline::MemoryWeighted => "B2",
            Baseline::PriceProxy => "B3",
        }
    }
}

/// Per-artifact proxies for time and energy under one baseline.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub id: String,
    pub time_proxy: f64,
    pub energy_proxy: f64,
}

const MEMORY_WEIGHT: f64 = 10.0;

/// Evaluates one baseline over a set of artifacts.
#[must_use]
pub fn predict(kind: Baseline, artifacts: &[Artifact], table: &CostTable) -> Vec<Prediction> {
    artifacts
        .iter()
        .map(|artifact| {
            let (time_proxy, energy_proxy) = match kind {
                Baseline::Model => {
                    let raw = aggregate_raw(&artifact.counts, table, Some(&artifact.priors));
                    (raw.cu, raw.eu)
                }
                Baseline::CountOnly => {
                    let n = artifact.counts.total() as f64;
                    (n, n)
                }
                Baseline::MemoryWeighted => {
                    let memory = artifact.counts.group_total(Group::Memory) as f64;
                    let rest = (artifact.counts.total()
                        - artifact.counts.group_total(Group::Memory))
                        as f64;
                    let w = MEMORY_WEIGHT * memory + rest;
                    (w, w)
                }
                Baseline::PriceProxy => {
                    let raw = aggregate_raw(&artifact.counts, table, Some(&artifact.priors));
                    (raw.usd, raw.usd)
                }
            };
            Prediction {
                id: artifact.id.clone(),
                time_proxy,
                energy_proxy,
            }
        })
        .collect()
}

/// One evaluated sweep position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub weight: f64,
    pub csc_a: f64,
    pub csc_b: f64,
}

/// A sweep of one metric's weight with the others rescaled around it.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub metric: MetricKind,
    pub points: Vec<SweepPoint>,
    /// Weights at which the two composites change order. The composite
    /// difference is affine in the swept weight, so there is at most one
    /// unless the artifacts tie everywhere.
    pub crossovers: Vec<f64>,
}

fn sweep_weights(base: &Profile, metric: MetricKind, w: f64) -> PerMetric {
    let base_m = base.weight(metric);
    let mut weights = PerMetric::default();
    for other in MetricKind::ALL {
        let v = if other == metric {
            w
        } else {
            base.weight(other) * (1.0 - w) / (1.0 - base_m)
        };
        weights.set(other, v);
    }
    weights
}

fn weighted(norms: PerMetric, weights: PerMetric) -> f64 {
    let mut acc = 0.0;
    for metric in MetricKind::ALL {
        acc += weights.get(metric) * norms.get(metric);
    }
    acc
}

/// Sweeps `metric`'s weight across `range` at `steps` evenly spaced grid
/// points, holding the other weights in their base proportions, and
/// locates composite-order crossovers between two normalized artifacts.
pub fn weight_sweep(
    norm_a: PerMetric,
    norm_b: PerMetric,
    metric: MetricKind,
    base: &Profile,
    range: (f64, f64),
    steps: usize,
) -> Result<SweepResult, Error> {
    let (lo, hi) = range;
    if !(lo.is_finite() && hi.is_finite()) || !(0.0 < lo && lo < hi && hi < 1.0) {
        return Err(Error::invalid(format!(
            "sweep range must satisfy 0 < lo < hi < 1, got ({lo}, {hi})"
        )));
    }
    if steps < 2 {
        return Err(Error::invalid("a sweep needs at least two grid points"));
    }
    for (name, norms) in [("a", norm_a), ("b", norm_b)] {
        for m in MetricKind::ALL {
            let v = norms.get(m);
            if !v.is_finite() || v < 0.0 {
                return Err(Error::invalid(format!(
                    "normalized values of artifact {name} must be finite and non-negative"
                )));
            }
        }
    }

    let mut points = Vec::with_capacity(steps);
    for i in 0..steps {
        let t = i as f64 / (steps - 1) as f64;
        let w = lo * (1.0 - t) + hi * t;
        let weights = sweep_weights(base, metric, w);
        points.push(SweepPoint {
            weight: w,
            csc_a: weighted(norm_a, weights),
            csc_b: weighted(norm_b, weights),
        });
    }

    let mut crossovers = Vec::new();
    for i in 0..steps {
        let d = points[i].csc_a - points[i].csc_b;
        if d == 0.0 {
            let prev_nonzero = points[..i]
                .iter()
                .rev()
                .map(|p| p.csc_a - p.csc_b)
                .find(|d| *d != 0.0);
            let next_nonzero = points[i + 1..]
                .iter()
                .map(|p| p.csc_a - p.csc_b)
                .find(|d| *d != 0.0);
            // a grid point landing exactly on the root counts once, and
            // an everywhere-tied pair has no order to flip
            if prev_nonzero.is_some() || next_nonzero.is_some() {
                crossovers.push(points[i].weight);
            }
        } else if i > 0 {
            let prev = points[i - 1].csc_a - points[i - 1].csc_b;
            if prev != 0.0 && (prev > 0.0) != (d > 0.0) {
                let span = points[i].weight - points[i - 1].weight;
                crossovers.push(points[i - 1].weight + prev * span / (prev - d));
            }
        }
    }
    Ok(SweepResult {
        metric,
        points,
        crossovers,
    })
}

/// Outcome of a weight-perturbation stability study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityResult {
    /// Strictly inverted artifact pairs as a fraction of all pairs over
    /// all trials.
    pub flipped_fraction: f64,
    /// True when the baseline composites are all tied, which leaves no
    /// ordering to test.
    pub degenerate: bool,
    pub trials: u32,
}

/// Perturbs each profile weight by an independent uniform factor in
/// `[1 - magnitude, 1 + magnitude)`, renormalizes, and counts how often
/// artifact pairs change composite order relative to the unperturbed
/// weights. Trial `t` draws from stream `t` of the seeded generator.
pub fn perturbation_stability(
    norms: &[PerMetric],
    profile: &Profile,
    magnitude: f64,
    trials: u32,
    seed: u64,
) -> Result<StabilityResult, Error> {
    if norms.len() < 3 {
        return Err(Error::invalid("stability needs at least three artifacts"));
    }
    if !magnitude.is_finite() || !(0.0 < magnitude && magnitude < 1.0) {
        return Err(Error::invalid(format!(
            "perturbation magnitude must lie in (0, 1), got {magnitude}"
        )));
    }
    if trials == 0 {
        return Err(Error::invalid("stability needs at least one trial"));
    }
    for n in norms {
        for m in MetricKind::ALL {
            if !n.get(m).is_finite() {
                return Err(Error::invalid("normalized values must be finite"));
            }
        }
    }

    let base: Vec<f64> = norms.iter().map(|n| composite(*n, profile)).collect();
    if base.windows(2).all(|w| w[0] == w[1]) {
        return Ok(StabilityResult {
            flipped_fraction: 0.0,
            degenerate: true,
            trials,
        });
    }

    let n = norms.len();
    let pairs = (n * (n - 1) / 2) as u64;
    let mut inversions = 0u64;
    for trial in 0..trials {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(trial as u64);
        let mut weights = PerMetric::default();
        let mut sum = 0.0;
        for metric in MetricKind::ALL {
            let factor = rng.random_range(1.0 - magnitude..1.0 + magnitude);
            let w = profile.weight(metric) * factor;
            weights.set(metric, w);
            sum += w;
        }
        for metric in MetricKind::ALL {
            weights.set(metric, weights.get(metric) / sum);
        }
        let perturbed: Vec<f64> = norms.iter().map(|norm| weighted(*norm, weights)).collect();
        for i in 0..n {
            for j in (i + 1)..n {
                let before = base[i] - base[j];
                let after = perturbed[i] - perturbed[j];
                if before * after < 0.0 {
                    inversions += 1;
                }
            }
        }
    }
    Ok(StabilityResult {
        flipped_fraction: inversions as f64 / (trials as u64 * pairs) as f64,
        degenerate: false,
        trials,
    })
}

/// One evaluated grid cell.
#[derive(Debug, Clone, PartialEq)]
pub struct GridCell {
    pub eu_scale: f64,
    pub price_scale: f64,
    /// Artifact with the lowest monetary total, ties to the smaller id.
    pub usd_leader: String,
    /// Top-ranked artifact by composite.
    pub composite_leader: String,
    pub results: Vec<CompositeResult>,
}

/// A full tariff-robustness grid, cells in row-major order (energy scale
/// outer, price scale inner).
#[derive(Debug, Clone, PartialEq)]
pub struct GridResult {
    pub eu_scales: Vec<f64>,
    pub price_scales: Vec<f64>,
    pub cells: Vec<GridCell>,
}

pub const DEFAULT_EU_RANGE: (f64, f64) = (0.8, 1.2);
pub const DEFAULT_PRICE_RANGE: (f64, f64) = (0.7, 1.3);
pub const DEFAULT_GRID_STEPS: usize = 5;

fn axis(range: (f64, f64), steps: usize) -> Result<Vec<f64>, Error> {
    let (lo, hi) = range;
    if !(lo.is_finite() && hi.is_finite()) || lo <= 0.0 || lo > hi {
        return Err(Error::invalid(format!(
            "scale range must satisfy 0 < lo <= hi, got ({lo}, {hi})"
        )));
    }
    if steps == 0 {
        return Err(Error::invalid("a grid axis needs at least one point"));
    }
    if steps == 1 {
        return Ok(alloc::vec![(lo + hi) / 2.0]);
    }
    Ok((0..steps)
        .map(|i| {
            let t = i as f64 / (steps - 1) as f64;
            lo * (1.0 - t) + hi * t
        })
        .collect())
}

/// Rescores the cohort under every combination of energy and price scale
/// and records each cell's cheapest and top-ranked artifacts.
pub fn robustness_grid(
    artifacts: &[Artifact],
    table: &CostTable,
    profile: &Profile,
    eu_range: (f64, f64),
    price_range: (f64, f64),
    eu_steps: usize,
    price_steps: usize,
) -> Result<GridResult, Error> {
    if artifacts.is_empty() {
        return Err(Error::invalid("the grid needs at least one artifact"));
    }
    let eu_scales = axis(eu_range, eu_steps)?;
    let price_scales = axis(price_range, price_steps)?;
    let bands = GradeBands::default();

    let mut cells = Vec::with_capacity(eu_scales.len() * price_scales.len());
    for &e in &eu_scales {
        for &s in &price_scales {
            let scaled = scale_table(table, e, s)?;
            let results = score_cohort(artifacts, &scaled, profile, &bands)?;
            let usd_leader = results
                .iter()
                .min_by(|a, b| {
                    a.raw
                        .usd
                        .partial_cmp(&b.raw.usd)
                        .expect("totals are finite")
                        .then_with(|| a.artifact_id.cmp(&b.artifact_id))
                })
                .expect("cohort is non-empty")
                .artifact_id
                .clone();
            let composite_leader = results[rank(&results)[0]].artifact_id.clone();
            cells.push(GridCell {
                eu_scale: e,
                price_scale: s,
                usd_leader,
                composite_leader,
                results,
            });
        }
    }
    Ok(GridResult {
        eu_scales,
        price_scales,
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::{builtin_profile, CostTableSpec, InstructionClass, PartialCostVector};
    use crate::counts::CountVector;
    use alloc::collections::BTreeMap;
    use alloc::string::ToString;
    use alloc::vec;

    fn test_table() -> CostTable {
        let full = |cu: f64, eu: f64, co2: f64, usd: f64| PartialCostVector {
            cu: Some(cu),
            eu: Some(eu),
            co2: Some(co2),
            usd: Some(usd),
        };
        let mut costs = BTreeMap::new();
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
        CostTable::from_spec(CostTableSpec {
            architecture: "x86_64".into(),
            version: "1.0.0".into(),
            costs,
            ..Default::default()
        })
        .unwrap()
    }

    #[test]
    fn workload_markers_classify_names() {
        assert_eq!(classify_workload("Loops_Sum"), WorkloadClass::ComputeBound);
        assert_eq!(
            classify_workload("FACTORIAL_BIG"),
            WorkloadClass::ComputeBound
        );
        assert_eq!(
            classify_workload("formula_eval"),
            WorkloadClass::ComputeBound
        );
        assert_eq!(classify_workload("QuickSort"), WorkloadClass::MemoryBound);
        assert_eq!(
            classify_workload("binary_search"),
            WorkloadClass::MemoryBound
        );
        assert_eq!(classify_workload("Fft_Radix2"), WorkloadClass::Mixed);
        // compute markers take precedence over memory markers
        assert_eq!(
            classify_workload("sorted_formula"),
            WorkloadClass::ComputeBound
        );
    }

    #[test]
    fn simulation_is_deterministic_per_seed() {
        let artifacts = vec![
            ("Loops_A".to_string(), RawTotals::new(100.0, 0.5, 0.0, 0.0)),
            ("Sort_B".to_string(), RawTotals::new(200.0, 0.9, 0.0, 0.0)),
            ("Mix_C".to_string(), RawTotals::new(50.0, 0.2, 0.0, 0.0)),
        ];
        let a = simulate(&artifacts, 7).unwrap();
        let b = simulate(&artifacts, 7).unwrap();
        assert_eq!(a, b);
        let c = simulate(&artifacts, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn simulated_values_respect_noise_and_penalty_bounds() {
        let artifacts = vec![
            ("Loops_A".to_string(), RawTotals::new(100.0, 0.5, 0.0, 0.0)),
            ("Sort_B".to_string(), RawTotals::new(200.0, 0.9, 0.0, 0.0)),
        ];
        for seed in 0..50 {
            let ms = simulate(&artifacts, seed).unwrap();
            let compute = &ms[0];
            let ratio = compute.time_s / (SECONDS_PER_CU * 100.0);
            assert!(ratio > 0.85 && ratio < 1.15, "compute ratio {ratio}");
            let memory = &ms[1];
            let ratio = memory.time_s / (SECONDS_PER_CU * 200.0);
            assert!(
                ratio > 1.2 * 0.85 && ratio < 1.8 * 1.15,
                "memory ratio {ratio}"
            );
            for m in &ms {
                let eu = if m.id.starts_with("Loops") { 0.5 } else { 0.9 };
                let e_ratio = m.energy_j / eu;
                assert!(e_ratio > 0.85 && e_ratio < 1.15, "energy ratio {e_ratio}");
            }
        }
    }

    #[test]
    fn empty_simulation_is_invalid() {
        assert!(simulate(&[], 1).is_err());
    }

    #[test]
    fn baselines_compute_their_proxies() {
        let mut counts = CountVector::new();
        counts.add(InstructionClass::ArithAdd, 4);
        counts.add(InstructionClass::MemLoad, 2);
        let artifacts = vec![Artifact::new("x", counts)];
        let table = test_table();

        let model = predict(Baseline::Model, &artifacts, &table);
        assert_eq!(model[0].time_proxy, 4.0 + 2.0 * 3.0);
        assert!((model[0].energy_proxy - (4.0 * 0.0001 + 2.0 * 0.00025)).abs() < 1e-18);

        let b1 = predict(Baseline::CountOnly, &artifacts, &table);
        assert_eq!((b1[0].time_proxy, b1[0].energy_proxy), (6.0, 6.0));

        let b2 = predict(Baseline::MemoryWeighted, &artifacts, &table);
        assert_eq!(b2[0].time_proxy, 4.0 + 10.0 * 2.0);
        assert_eq!(b2[0].time_proxy, b2[0].energy_proxy);

        let b3 = predict(Baseline::PriceProxy, &artifacts, &table);
        assert!((b3[0].time_proxy - (4.0 * 0.00001 + 2.0 * 0.00003)).abs() < 1e-18);
        assert_eq!(b3[0].time_proxy, b3[0].energy_proxy);
    }

    #[test]
    fn sweep_finds_the_single_affine_crossover() {
        let norm_a = PerMetric([0.2, 0.8, 0.8, 0.8]);
        let norm_b = PerMetric([0.8, 0.3, 0.3, 0.3]);
        let research = builtin_profile("RESEARCH").unwrap();
        let sweep =
            weight_sweep(norm_a, norm_b, MetricKind::Cu, &research, (0.1, 0.7), 121).unwrap();
        assert_eq!(sweep.points.len(), 121);
        assert!((sweep.points[0].weight - 0.1).abs() < 1e-15);
        assert!((sweep.points[120].weight - 0.7).abs() < 1e-15);
        assert_eq!(
            sweep.crossovers.len(),
            1,
            "crossovers: {:?}",
            sweep.crossovers
        );
        // analytic root of (0.2 - 0.8) w + 0.5 (1 - w)
        assert!((sweep.crossovers[0] - 5.0 / 11.0).abs() < 1e-9);
    }

    #[test]
    fn sweep_weights_stay_on_the_simplex() {
        let research = builtin_profile("RESEARCH").unwrap();
        for i in 0..=10 {
            let w = 0.05 + 0.09 * i as f64;
            let weights = sweep_weights(&research, MetricKind::Eu, w);
            let sum: f64 = MetricKind::ALL.iter().map(|m| weights.get(*m)).sum();
            assert!((sum - 1.0).abs() < 1e-12, "sum {sum} at w {w}");
            assert!((weights.get(MetricKind::Eu) - w).abs() < 1e-15);
            for m in MetricKind::ALL {
                assert!(weights.get(m) > 0.0);
            }
            // untouched weights keep their base proportions
            let cu = weights.get(MetricKind::Cu);
            let co2 = weights.get(MetricKind::Co2);
            assert!((cu / co2 - 0.4 / 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn monotone_dominance_never_crosses() {
        let norm_a = PerMetric([0.1, 0.1, 0.1, 0.1]);
        let norm_b = PerMetric([0.9, 0.9, 0.9, 0.9]);
        let research = builtin_profile("RESEARCH").unwrap();
        let sweep =
            weight_sweep(norm_a, norm_b, MetricKind::Usd, &research, (0.2, 0.8), 61).unwrap();
        assert!(sweep.crossovers.is_empty());
    }

    #[test]
    fn identical_artifacts_tie_without_crossovers() {
        let norm = PerMetric([0.5, 0.5, 0.5, 0.5]);
        let research = builtin_profile("RESEARCH").unwrap();
        let sweep = weight_sweep(norm, norm, MetricKind::Cu, &research, (0.2, 0.8), 7).unwrap();
        assert!(sweep.crossovers.is_empty());
    }

    #[test]
    fn sweep_arguments_are_validated() {
        let n = PerMetric([0.5; 4]);
        let p = builtin_profile("RESEARCH").unwrap();
        assert!(weight_sweep(n, n, MetricKind::Cu, &p, (0.0, 0.7), 10).is_err());
        assert!(weight_sweep(n, n, MetricKind::Cu, &p, (0.7, 0.1), 10).is_err());
        assert!(weight_sweep(n, n, MetricKind::Cu, &p, (0.1, 1.0), 10).is_err());
        assert!(weight_sweep(n, n, MetricKind::Cu, &p, (0.1, 0.7), 1).is_err());
    }

    #[test]
    fn stability_is_deterministic_and_bounded() {
        let norms = vec![
            PerMetric([0.0, 0.1, 0.2, 0.0]),
            PerMetric([0.5, 0.5, 0.5, 0.5]),
            PerMetric([0.9, 1.0, 0.8, 1.0]),
        ];
        let profile = builtin_profile("RESEARCH").unwrap();
        let a = perturbation_stability(&norms, &profile, 0.2, 100, 42).unwrap();
        let b = perturbation_stability(&norms, &profile, 0.2, 100, 42).unwrap();
        assert_eq!(a, b);
        assert!(!a.degenerate);
        assert!((0.0..=1.0).contains(&a.flipped_fraction));
        // composites separated by ~0.4 cannot flip under 20% weight noise
        assert_eq!(a.flipped_fraction, 0.0);
    }

    #[test]
    fn near_ties_do_flip_under_large_perturbations() {
        let norms = vec![
            PerMetric([0.50, 0.48, 0.52, 0.50]),
            PerMetric([0.48, 0.52, 0.50, 0.50]),
            PerMetric([0.52, 0.50, 0.48, 0.50]),
        ];
        let profile = builtin_profile("RESEARCH").unwrap();
        let r = perturbation_stability(&norms, &profile, 0.5, 400, 11).unwrap();
        assert!(r.flipped_fraction > 0.0, "expected some inversions");
    }

    #[test]
    fn degenerate_cohorts_report_zero_flips() {
        let norms = vec![PerMetric([0.3; 4]); 3];
        let profile = builtin_profile("COMMERCIAL").unwrap();
        let r = perturbation_stability(&norms, &profile, 0.2, 10, 1).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.flipped_fraction, 0.0);
    }

    #[test]
    fn stability_arguments_are_validated() {
        let norms = vec![PerMetric([0.1; 4]); 3];
        let p = builtin_profile("RESEARCH").unwrap();
        assert!(perturbation_stability(&norms[..2], &p, 0.2, 10, 1).is_err());
        assert!(perturbation_stability(&norms, &p, 0.0, 10, 1).is_err());
        assert!(perturbation_stability(&norms, &p, 1.0, 10, 1).is_err());
        assert!(perturbation_stability(&norms, &p, 0.2, 0, 1).is_err());
    }

    #[test]
    fn default_grid_contains_the_identity_cell() {
        let mut a = CountVector::new();
        a.add(InstructionClass::ArithAdd, 10);
        let mut b = CountVector::new();
        b.add(InstructionClass::MemLoad, 10);
        let artifacts = vec![Artifact::new("adds", a), Artifact::new("loads", b)];
        let table = test_table();
        let profile = builtin_profile("COMMERCIAL").unwrap();
        let grid = robustness_grid(
            &artifacts,
            &table,
            &profile,
            DEFAULT_EU_RANGE,
            DEFAULT_PRICE_RANGE,
            DEFAULT_GRID_STEPS,
            DEFAULT_GRID_STEPS,
        )
        .unwrap();
        assert_eq!(grid.cells.len(), 25);
        assert!(grid.eu_scales.contains(&1.0));
        assert!(grid.price_scales.contains(&1.0));

        let identity = grid
            .cells
            .iter()
            .find(|c| c.eu_scale == 1.0 && c.price_scale == 1.0)
            .expect("identity cell");
        let unscaled = score_cohort(&artifacts, &table, &profile, &GradeBands::default()).unwrap();
        assert_eq!(identity.results, unscaled);
    }

    #[test]
    fn grid_leaders_follow_usd_and_composite() {
        let mut cheap = CountVector::new();
        cheap.add(InstructionClass::ArithAdd, 1);
        let mut dear = CountVector::new();
        dear.add(InstructionClass::MemLoad, 100);
        let artifacts = vec![Artifact::new("dear", dear), Artifact::new("cheap", cheap)];
        let grid = robustness_grid(
            &artifacts,
            &test_table(),
            &builtin_profile("RESEARCH").unwrap(),
            (1.0, 1.0),
            (1.0, 1.0),
            1,
            1,
        )
        .unwrap();
        assert_eq!(grid.cells.len(), 1);
        assert_eq!(grid.cells[0].usd_leader, "cheap");
        assert_eq!(grid.cells[0].composite_leader, "cheap");
    }

    #[test]
    fn single_artifact_grids_are_allowed() {
        let mut c = CountVector::new();
        c.add(InstructionClass::ArithAdd, 5);
        let artifacts = vec![Artifact::new("only", c)];
        let grid = robustness_grid(
            &artifacts,
            &test_table(),
            &builtin_profile("RESEARCH").unwrap(),
            (0.9, 1.1),
            (0.9, 1.1),
            3,
            3,
        )
        .unwrap();
        assert_eq!(grid.cells.len(), 9);
        for cell in &grid.cells {
            assert_eq!(cell.usd_leader, "only");
            assert_eq!(cell.composite_leader, "only");
        }
    }

    #[test]
    fn grid_arguments_are_validated() {
        let mut c = CountVector::new();
        c.add(InstructionClass::ArithAdd, 5);
        let artifacts = vec![Artifact::new("only", c)];
        let table = test_table();
        let p = builtin_profile("RESEARCH").unwrap();
        assert!(robustness_grid(&[], &table, &p, (0.8, 1.2), (0.7, 1.3), 5, 5).is_err());
        assert!(robustness_grid(&artifacts, &table, &p, (0.0, 1.2), (0.7, 1.3), 5, 5).is_err());
        assert!(robustness_grid(&artifacts, &table, &p, (1.2, 0.8), (0.7, 1.3), 5, 5).is_err());
        assert!(robustness_grid(&artifacts, &table, &p, (0.8, 1.2), (0.7, 1.3), 0, 5).is_err());
    }
}
