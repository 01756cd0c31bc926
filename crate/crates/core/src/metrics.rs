//! Aggregate benchmark scores.
//!
//! Six scores summarise an algorithm. Each reads a different slice of the
//! results:
//!
//! | score | datasets | per-episode value |
//! |-------|----------|-------------------|
//! | performance | random, mazes | [`ratio_score`] against the per-instance best |
//! | out_of_distribution | cities_tiles | same |
//! | cooperation | puzzles | same |
//! | scalability | warehouse | [`scalability`] over mean runtimes per agent count |
//! | coordination | random, mazes | [`coordination`] |
//! | pathfinding | cities | [`pathfinding`] against the shortest-path bound |
//!
//! "Best" is relative to the algorithms in the result set, so adding or
//! removing an algorithm can change everyone's ratio scores. Pathfinding
//! reports `optimal / actual`, so better paths score higher.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::env::Problem;
use crate::harness::EpisodeRecord;
use crate::maps_io::{DatasetTag, InstanceSpec};

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("reference value must be positive, got {0}")]
    NonPositiveBest(f64),
    #[error("value {value} is better than the reference best {best}")]
    BeatsBest { value: f64, best: f64 },
    #[error("no samples")]
    Empty,
    #[error("scalability needs at least two distinct agent counts")]
    SinglePoint,
    #[error("runtime must be positive, got {0}")]
    NonPositiveRuntime(f64),
    #[error("path cost {path_cost} is below the optimum {optimal_cost}")]
    BelowOptimal { path_cost: u64, optimal_cost: u64 },
    #[error("algorithms {first:?} and {second:?} were run on different {dataset} instances")]
    MismatchedInstances { first: String, second: String, dataset: &'static str },
    #[error("record for {0} lacks a shortest-path bound")]
    MissingLowerBound(String),
}

/// Score of one episode relative to the best result on its instance.
///
/// MAPF: `best / value` when solved, 0 otherwise (`value`, `best` are SoC).
/// LMAPF: `value / best` (throughputs).
pub fn ratio_score(value: f64, best: f64, problem: Problem, solved: bool) -> Result<f64, MetricError> {
    if best.is_nan() || best <= 0.0 {
        return Err(MetricError::NonPositiveBest(best));
    }
    match problem {
        Problem::Mapf if !solved => Ok(0.0),
        Problem::Mapf => {
            if value < best {
                return Err(MetricError::BeatsBest { value, best });
            }
            Ok(best / value)
        }
        Problem::Lmapf => {
            if value > best {
                return Err(MetricError::BeatsBest { value, best });
            }
            Ok(value.max(0.0) / best)
        }
    }
}

/// `1 - collisions / (agents * length)`, floored at 0.
pub fn coordination(collisions: u64, num_agents: usize, episode_length: u32) -> f64 {
    let denom = num_agents as f64 * episode_length as f64;
    if denom == 0.0 {
        return 1.0;
    }
    (1.0 - collisions as f64 / denom).max(0.0)
}

/// `optimal / actual` for a found path, 0 when none was found.
pub fn pathfinding(found: bool, path_cost: u64, optimal_cost: u64) -> Result<f64, MetricError> {
    if !found {
        return Ok(0.0);
    }
    if path_cost < optimal_cost {
        return Err(MetricError::BelowOptimal { path_cost, optimal_cost });
    }
    if path_cost == 0 {
        return Ok(1.0);
    }
    Ok(optimal_cost as f64 / path_cost as f64)
}

/// Mean and normal-approximation 95% half-width `1.96 * s / sqrt(n)`.
pub fn aggregate_ci(samples: &[f64]) -> Result<(f64, f64), MetricError> {
    if samples.is_empty() {
        return Err(MetricError::Empty);
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    if samples.len() == 1 {
        return Ok((mean, 0.0));
    }
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok((mean, 1.96 * var.sqrt() / n.sqrt()))
}

/// Pairwise scores `(t1 / t2) / (a1 / a2)` over consecutive agent counts,
/// where `t` is the mean runtime at that count.
pub fn scalability_pairs(runtimes: &[(usize, f64)]) -> Result<Vec<f64>, MetricError> {
    let mut by_count: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
    for &(agents, secs) in runtimes {
        if secs.is_nan() || secs <= 0.0 {
            return Err(MetricError::NonPositiveRuntime(secs));
        }
        let e = by_count.entry(agents).or_default();
        e.0 += secs;
        e.1 += 1;
    }
    if by_count.len() < 2 {
        return Err(MetricError::SinglePoint);
    }
    let means: Vec<(f64, f64)> = by_count.into_iter().map(|(a, (s, k))| (a as f64, s / k as f64)).collect();
    Ok(means.windows(2).map(|w| (w[0].1 / w[1].1) / (w[0].0 / w[1].0)).collect())
}

/// Geometric mean of [`scalability_pairs`]; 1.0 is linear scaling.
pub fn scalability(runtimes: &[(usize, f64)]) -> Result<f64, MetricError> {
    let pairs = scalability_pairs(runtimes)?;
    Ok((pairs.iter().map(|p| p.ln()).sum::<f64>() / pairs.len() as f64).exp())
}

/// Mean, CI half-width and sample count.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricValue {
    pub mean: f64,
    pub ci95: f64,
    pub samples: usize,
}

impl MetricValue {
    fn from_samples(samples: &[f64]) -> Result<Self, MetricError> {
        let (mean, ci95) = aggregate_ci(samples)?;
        Ok(Self { mean, ci95, samples: samples.len() })
    }
}

/// Which datasets a score reads.
pub fn metric_datasets(metric: &str) -> &'static [DatasetTag] {
    match metric {
        "performance" | "coordination" => &[DatasetTag::Random, DatasetTag::Mazes],
        "out_of_distribution" => &[DatasetTag::CitiesTiles],
        "cooperation" => &[DatasetTag::Puzzles],
        "scalability" => &[DatasetTag::Warehouse],
        "pathfinding" => &[DatasetTag::Cities],
        _ => &[],
    }
}

pub const METRIC_NAMES: [&str; 6] =
    ["performance", "out_of_distribution", "cooperation", "scalability", "coordination", "pathfinding"];

fn relevant<'a>(records: &'a [EpisodeRecord], tags: &[DatasetTag]) -> Vec<&'a EpisodeRecord> {
    records.iter().filter(|r| tags.contains(&r.instance.dataset_tag)).collect()
}

fn by_alias<'a>(records: &[&'a EpisodeRecord]) -> BTreeMap<&'a str, Vec<&'a EpisodeRecord>> {
    let mut out: BTreeMap<&str, Vec<&EpisodeRecord>> = BTreeMap::new();
    for r in records {
        out.entry(r.algorithm_alias.as_str()).or_default().push(r);
    }
    out
}

/// Best-relative ratio score per algorithm over the records of `tags`.
///
/// Every algorithm must have been run on the same instance multiset. A
/// failed record scores 0; so does everyone on an LMAPF instance where the
/// best throughput is 0, or a MAPF instance nobody solved.
pub fn meta_metric(
    records: &[EpisodeRecord],
    tags: &[DatasetTag],
) -> Result<BTreeMap<String, MetricValue>, MetricError> {
    let rel = relevant(records, tags);
    let groups = by_alias(&rel);
    check_same_instances(&groups, tags)?;

    let mut best: HashMap<&InstanceSpec, f64> = HashMap::new();
    for r in &rel {
        if r.error.is_some() {
            continue;
        }
        let spec = &r.instance;
        match spec.problem {
            Problem::Mapf if r.csr => {
                let e = best.entry(spec).or_insert(f64::INFINITY);
                *e = e.min(r.soc as f64);
            }
            Problem::Mapf => {}
            Problem::Lmapf => {
                let e = best.entry(spec).or_insert(0.0);
                *e = e.max(r.throughput);
            }
        }
    }
    let mut out = BTreeMap::new();
    for (alias, recs) in groups {
        let scores = recs
            .iter()
            .map(|r| {
                let b = best.get(&r.instance).copied().unwrap_or(0.0);
                if r.error.is_some() || b <= 0.0 || !b.is_finite() {
                    return Ok(0.0);
                }
                match r.instance.problem {
                    Problem::Mapf => ratio_score(r.soc as f64, b, Problem::Mapf, r.csr),
                    Problem::Lmapf => ratio_score(r.throughput, b, Problem::Lmapf, true),
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        out.insert(alias.to_string(), MetricValue::from_samples(&scores)?);
    }
    Ok(out)
}

fn check_same_instances(groups: &BTreeMap<&str, Vec<&EpisodeRecord>>, tags: &[DatasetTag]) -> Result<(), MetricError> {
    let key = |recs: &Vec<&EpisodeRecord>| {
        let mut v: Vec<String> =
            recs.iter().map(|r| r.instance.label() + &format!("/{}", r.instance.max_episode_steps)).collect();
        v.sort();
        v
    };
    let mut first: Option<(&str, Vec<String>)> = None;
    for (alias, recs) in groups {
        let k = key(recs);
        match &first {
            None => first = Some((alias, k)),
            Some((a0, k0)) if *k0 != k => {
                return Err(MetricError::MismatchedInstances {
                    first: a0.to_string(),
                    second: alias.to_string(),
                    dataset: tags.first().map_or("", |t| t.as_str()),
                })
            }
            _ => {}
        }
    }
    Ok(())
}

/// Mean coordination per algorithm over the records of `tags`.
pub fn coordination_metric(
    records: &[EpisodeRecord],
    tags: &[DatasetTag],
) -> Result<BTreeMap<String, MetricValue>, MetricError> {
    let rel = relevant(records, tags);
    let mut out = BTreeMap::new();
    for (alias, recs) in by_alias(&rel) {
        let samples: Vec<f64> = recs
            .iter()
            .filter(|r| r.error.is_none())
            .map(|r| coordination(r.collisions.total(), r.instance.num_agents, r.episode_length))
            .collect();
        if !samples.is_empty() {
            out.insert(alias.to_string(), MetricValue::from_samples(&samples)?);
        }
    }
    Ok(out)
}

/// Scalability per algorithm; the CI is taken over the pairwise scores.
pub fn scalability_metric(
    records: &[EpisodeRecord],
    tags: &[DatasetTag],
) -> Result<BTreeMap<String, MetricValue>, MetricError> {
    let rel = relevant(records, tags);
    let mut out = BTreeMap::new();
    for (alias, recs) in by_alias(&rel) {
        let runtimes: Vec<(usize, f64)> =
            recs.iter().filter(|r| r.error.is_none()).map(|r| (r.instance.num_agents, r.runtime_seconds)).collect();
        let pairs = match scalability_pairs(&runtimes) {
            Ok(p) => p,
            Err(MetricError::SinglePoint) => continue,
            Err(e) => return Err(e),
        };
        let geo = (pairs.iter().map(|p| p.ln()).sum::<f64>() / pairs.len() as f64).exp();
        let (_, ci95) = aggregate_ci(&pairs)?;
        out.insert(alias.to_string(), MetricValue { mean: geo, ci95, samples: pairs.len() });
    }
    Ok(out)
}

/// Pathfinding per algorithm over single-agent MAPF records of `tags`.
pub fn pathfinding_metric(
    records: &[EpisodeRecord],
    tags: &[DatasetTag],
) -> Result<BTreeMap<String, MetricValue>, MetricError> {
    let rel: Vec<&EpisodeRecord> = relevant(records, tags)
        .into_iter()
        .filter(|r| r.instance.num_agents == 1 && r.instance.problem == Problem::Mapf)
        .collect();
    let mut out = BTreeMap::new();
    for (alias, recs) in by_alias(&rel) {
        let samples = recs
            .iter()
            .map(|r| {
                if r.error.is_some() {
                    return Ok(0.0);
                }
                let optimal = r.lower_bound_soc.ok_or_else(|| MetricError::MissingLowerBound(r.instance.label()))?;
                pathfinding(r.csr, r.soc, optimal)
            })
            .collect::<Result<Vec<_>, _>>()?;
        out.insert(alias.to_string(), MetricValue::from_samples(&samples)?);
    }
    Ok(out)
}

/// All six scores for every algorithm that has the needed records.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    /// metric name -> algorithm alias -> value
    pub metrics: BTreeMap<String, BTreeMap<String, MetricValue>>,
    /// metric name -> dataset tags read
    pub datasets: BTreeMap<String, Vec<DatasetTag>>,
    pub algorithms: BTreeSet<String>,
}

pub fn compute_report(records: &[EpisodeRecord]) -> Result<MetricReport, MetricError> {
    let mut report = MetricReport {
        algorithms: records.iter().map(|r| r.algorithm_alias.clone()).collect(),
        ..MetricReport::default()
    };
    for name in METRIC_NAMES {
        let tags = metric_datasets(name);
        let values = match name {
            "performance" | "out_of_distribution" | "cooperation" => meta_metric(records, tags)?,
            "scalability" => scalability_metric(records, tags)?,
            "coordination" => coordination_metric(records, tags)?,
            "pathfinding" => pathfinding_metric(records, tags)?,
            _ => unreachable!(),
        };
        report.datasets.insert(name.to_string(), tags.to_vec());
        report.metrics.insert(name.to_string(), values);
    }
    Ok(report)
}

impl MetricReport {
    /// `algorithm,metric,mean,ci95,samples` rows.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["algorithm", "metric", "mean", "ci95", "samples"]).expect("in-memory write");
        for alg in &self.algorithms {
            for name in METRIC_NAMES {
                if let Some(v) = self.metrics.get(name).and_then(|m| m.get(alg)) {
                    w.write_record([
                        alg.as_str(),
                        name,
                        &v.mean.to_string(),
                        &v.ci95.to_string(),
                        &v.samples.to_string(),
                    ])
                    .expect("in-memory write");
                }
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }

    /// metric -> algorithm -> mean, for radar charts.
    pub fn radar(&self) -> BTreeMap<String, BTreeMap<String, f64>> {
        self.metrics
            .iter()
            .map(|(m, per_alg)| (m.clone(), per_alg.iter().map(|(a, v)| (a.clone(), v.mean)).collect()))
            .collect()
    }
}
