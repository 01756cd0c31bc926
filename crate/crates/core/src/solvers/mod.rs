//! Baseline policies.
//!
//! | name | policy |
//! |------|--------|
//! | `random` | uniform random actions, `params: {seed}` |
//! | `astar` | independent shortest paths |
//! | `greedy` | per-agent A* around visible agents |
//! | `prioritized` | windowed prioritized planning, `params: {window, horizon, replan_on_new_goal}` |

mod basic;
mod greedy;
mod prioritized;
mod reservation;
pub mod search;

use serde::de::DeserializeOwned;
use serde::Deserialize;
use thiserror::Error;

use crate::env::{Action, Env};
use crate::maps_io::AlgorithmConfig;

pub use basic::{RandomParams, RandomPolicy, ShortestPathPolicy};
pub use greedy::GreedyReplanPolicy;
pub use prioritized::{PrioritizedParams, PrioritizedPlanner};
pub use reservation::ReservationTable;
pub use search::{a_star, bfs_distances, path_cost, AStar, DistanceField, SearchError};

/// A decision maker for all agents of one episode.
pub trait Policy: Send {
    fn name(&self) -> &str;

    /// Forgets everything learned about the current episode.
    fn reset_states(&mut self);

    /// One action per agent for the current state of `env`.
    fn act(&mut self, env: &Env) -> Vec<Action>;
}

pub const POLICY_NAMES: [&str; 4] = ["random", "astar", "greedy", "prioritized"];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolicyError {
    #[error("unknown algorithm {0:?} (known: random, astar, greedy, prioritized)")]
    Unknown(String),
    #[error("bad params for {name}: {message}")]
    Params { name: String, message: String },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NoParams {}

fn params<T: DeserializeOwned>(cfg: &AlgorithmConfig) -> Result<T, PolicyError> {
    let value = match &cfg.params {
        serde_json::Value::Null => serde_json::json!({}),
        v => v.clone(),
    };
    serde_json::from_value(value).map_err(|e| PolicyError::Params { name: cfg.name.clone(), message: e.to_string() })
}

/// Builds the policy named in an `algorithms` entry.
pub fn make_policy(cfg: &AlgorithmConfig) -> Result<Box<dyn Policy>, PolicyError> {
    Ok(match cfg.name.as_str() {
        "random" => Box::new(RandomPolicy::new(params::<RandomParams>(cfg)?.seed)),
        "astar" => {
            params::<NoParams>(cfg)?;
            Box::new(ShortestPathPolicy::new())
        }
        "greedy" => {
            params::<NoParams>(cfg)?;
            Box::new(GreedyReplanPolicy::new())
        }
        "prioritized" => {
            let p: PrioritizedParams = params(cfg)?;
            p.validate().map_err(|message| PolicyError::Params { name: cfg.name.clone(), message })?;
            Box::new(PrioritizedPlanner::new(p))
        }
        other => return Err(PolicyError::Unknown(other.to_string())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn factory_names_and_params() {
        for name in POLICY_NAMES {
            assert_eq!(make_policy(&AlgorithmConfig::new("x", name)).unwrap().name(), name);
        }
        assert!(matches!(make_policy(&AlgorithmConfig::new("x", "lacam")), Err(PolicyError::Unknown(_))));
        let bad = AlgorithmConfig::new("x", "prioritized").with_params(json!({"window": 9, "horizon": 3}));
        assert!(matches!(make_policy(&bad), Err(PolicyError::Params { .. })));
        let typo = AlgorithmConfig::new("x", "random").with_params(json!({"sed": 1}));
        assert!(matches!(make_policy(&typo), Err(PolicyError::Params { .. })));
        let extra = AlgorithmConfig::new("x", "greedy").with_params(json!({"seed": 1}));
        assert!(make_policy(&extra).is_err());
        let ok = AlgorithmConfig::new("x", "prioritized").with_params(json!({"window": 2}));
        assert!(make_policy(&ok).is_ok());
    }
}
