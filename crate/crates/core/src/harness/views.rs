use std::collections::BTreeMap;

use super::{EpisodeRecord, HarnessError};
use crate::maps_io::ViewConfig;
use crate::metrics::aggregate_ci;

/// Fields a view may group by.
pub const VIEW_FIELDS: [&str; 6] = ["algorithm", "dataset", "map_name", "num_agents", "seed", "problem"];

const VIEW_METRICS: [&str; 8] =
    ["soc", "makespan", "csr", "throughput", "goals_achieved", "collisions", "runtime_seconds", "episode_length"];

fn field(r: &EpisodeRecord, name: &str) -> String {
    match name {
        "algorithm" => r.algorithm_alias.clone(),
        "dataset" => r.instance.dataset_tag.as_str().to_string(),
        "map_name" => r.instance.map_name.clone(),
        "num_agents" => r.instance.num_agents.to_string(),
        "seed" => r.instance.seed.to_string(),
        "problem" => format!("{:?}", r.instance.problem).to_lowercase(),
        _ => unreachable!("validated field"),
    }
}

fn metric(r: &EpisodeRecord, name: &str) -> f64 {
    match name {
        "soc" => r.soc as f64,
        "makespan" => r.makespan as f64,
        "csr" => r.csr as u8 as f64,
        "throughput" => r.throughput,
        "goals_achieved" => r.goals_achieved as f64,
        "collisions" => r.collisions.total() as f64,
        "runtime_seconds" => r.runtime_seconds,
        "episode_length" => r.episode_length as f64,
        _ => unreachable!("validated metric"),
    }
}

/// CSV table of per-group means and 95% CI half-widths. Records with an
/// error are left out and counted in the `errors` column.
pub fn render_view(view: &ViewConfig, records: &[EpisodeRecord]) -> Result<String, HarnessError> {
    let bad = |message: String| HarnessError::View { view: view.name.clone(), message };
    let group_by: Vec<&str> =
        if view.group_by.is_empty() { vec!["algorithm"] } else { view.group_by.iter().map(String::as_str).collect() };
    let metrics: Vec<&str> = if view.metrics.is_empty() {
        vec!["soc", "csr", "throughput"]
    } else {
        view.metrics.iter().map(String::as_str).collect()
    };
    if let Some(f) = group_by.iter().find(|f| !VIEW_FIELDS.contains(f)) {
        return Err(bad(format!("cannot group by {f:?}; known fields: {}", VIEW_FIELDS.join(", "))));
    }
    if let Some(m) = metrics.iter().find(|m| !VIEW_METRICS.contains(m)) {
        return Err(bad(format!("unknown metric {m:?}; known: {}", VIEW_METRICS.join(", "))));
    }

    let mut groups: BTreeMap<Vec<String>, (Vec<&EpisodeRecord>, usize)> = BTreeMap::new();
    for r in records {
        let key = group_by.iter().map(|f| field(r, f)).collect();
        let entry = groups.entry(key).or_default();
        if r.error.is_some() {
            entry.1 += 1;
        } else {
            entry.0.push(r);
        }
    }

    let mut out = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = group_by.iter().map(|s| s.to_string()).collect();
    for m in &metrics {
        header.push(format!("{m}_mean"));
        header.push(format!("{m}_ci95"));
    }
    header.push("episodes".into());
    header.push("errors".into());
    out.write_record(&header).map_err(|e| bad(e.to_string()))?;
    for (key, (rows, errors)) in &groups {
        let mut line = key.clone();
        for m in &metrics {
            let samples: Vec<f64> = rows.iter().map(|r| metric(r, m)).collect();
            match aggregate_ci(&samples) {
                Ok((mean, hw)) => {
                    line.push(mean.to_string());
                    line.push(hw.to_string());
                }
                Err(_) => line.extend([String::new(), String::new()]),
            }
        }
        line.push(rows.len().to_string());
        line.push(errors.to_string());
        out.write_record(&line).map_err(|e| bad(e.to_string()))?;
    }
    let bytes = out.into_inner().map_err(|e| bad(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
