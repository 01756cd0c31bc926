use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{EpisodeRecord, HarnessError};

/// One JSON object per line.
pub fn write_records<W: Write>(records: &[EpisodeRecord], mut out: W) -> std::io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

/// Parses JSON Lines; blank lines are skipped, errors carry 1-based line numbers.
pub fn read_records<R: Read>(input: R) -> Result<Vec<EpisodeRecord>, HarnessError> {
    let mut records = Vec::new();
    for (i, line) in BufReader::new(input).lines().enumerate() {
        let line = line.map_err(|e| HarnessError::Malformed { line: i + 1, message: e.to_string() })?;
        if line.trim().is_empty() {
            continue;
        }
        let record =
            serde_json::from_str(&line).map_err(|e| HarnessError::Malformed { line: i + 1, message: e.to_string() })?;
        records.push(record);
    }
    Ok(records)
}

pub fn persist(records: &[EpisodeRecord], path: &Path) -> Result<(), HarnessError> {
    let io = |source| HarnessError::Io { path: path.display().to_string(), source };
    let file = File::create(path).map_err(io)?;
    write_records(records, BufWriter::new(file)).map_err(io)
}

pub fn load(path: &Path) -> Result<Vec<EpisodeRecord>, HarnessError> {
    let file = File::open(path).map_err(|source| HarnessError::Io { path: path.display().to_string(), source })?;
    read_records(file)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{CollisionSystem, CollisionTally, OnTarget, Problem};
    use crate::maps_io::{AlgorithmConfig, DatasetTag, InstanceSpec};

    fn synthetic(i: u64) -> EpisodeRecord {
        let spec = InstanceSpec {
            map_name: format!("m{i}"),
            seed: i,
            num_agents: (i % 7 + 1) as usize,
            max_episode_steps: 256,
            problem: if i % 2 == 0 { Problem::Mapf } else { Problem::Lmapf },
            dataset_tag: DatasetTag::Mazes,
            on_target: if i % 2 == 0 { OnTarget::Nothing } else { OnTarget::Restart },
            collision_system: CollisionSystem::BlockAll,
            obs_radius: 5,
        };
        let mut r = EpisodeRecord::failed(spec, &AlgorithmConfig::new("a", "astar"), String::new());
        r.error = (i % 10 == 0).then(|| format!("boom {i}"));
        r.soc = i * 3;
        r.throughput = i as f64 / 256.0 + 1e-13;
        r.runtime_seconds = 0.1 + i as f64 * 1e-7;
        r.collisions = CollisionTally { obstacle: i, vertex: 2 * i, edge: 3 };
        r.per_agent_goal_times = vec![Some(i as u32), None];
        r.lower_bound_soc = (i % 3 == 0).then_some(i);
        r
    }

    #[test]
    fn round_trip_thousand_records() {
        let records: Vec<_> = (0..1000).map(synthetic).collect();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.jsonl");
        persist(&records, &path).unwrap();
        assert_eq!(load(&path).unwrap(), records);
    }

    #[test]
    fn empty_and_truncated_files() {
        let mut buf = Vec::new();
        write_records(&[], &mut buf).unwrap();
        assert!(buf.is_empty());
        assert!(read_records(&buf[..]).unwrap().is_empty());

        write_records(&[synthetic(1), synthetic(2)], &mut buf).unwrap();
        let cut = &buf[..buf.len() - 20];
        match read_records(cut) {
            Err(HarnessError::Malformed { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected malformed line 2, got {other:?}"),
        }
    }

    #[test]
    fn field_names_on_the_wire() {
        let line = serde_json::to_string(&synthetic(3)).unwrap();
        for key in ["\"SoC\"", "\"algorithm_alias\"", "\"runtime_seconds\"", "\"per_agent_goal_times\"", "\"csr\""] {
            assert!(line.contains(key), "{key} missing in {line}");
        }
        assert!(!line.contains("\"error\""));
    }
}
