//! Deterministic multi-agent pathfinding on 4-connected grids.
//!
//! The crate is organised around a simultaneous-move simulator ([`env`]) with
//! collision shielding, plus the tooling needed to benchmark solvers on it:
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`grid`] | `Pos`, `MapGrid` and connected-component labelling |
//! | [`env`] | `GridConfig`, `Env`, move resolution, episode indicators |
//! | [`obs`] | ego-centric observation tensors and global state export |
//! | [`mapgen`] | seeded random / maze / warehouse generators |
//! | [`maps_io`] | ASCII and MovingAI formats, registry, instance sampling, eval configs |
//! | [`solvers`] | baseline policies (random, shortest path, greedy replanning, prioritized planning) |
//! | [`metrics`] | the six aggregate benchmark scores with confidence intervals |
//! | [`harness`] | parallel suite execution, JSON Lines persistence, speed benchmark |
//! | [`viz`] | SVG frames, SVG animations and console rendering |
//!
//! ```
//! use gridmapf::env::{Action, Env, GridConfig};
//!
//! let config = GridConfig { width: 8, height: 8, density: 0.2, num_agents: 4, seed: 7, ..GridConfig::default() };
//! let mut env = Env::new(config).unwrap();
//! let outcome = env.step(&[Action::Up, Action::Wait, Action::Left, Action::Right]).unwrap();
//! assert_eq!(outcome.rewards.len(), 4);
//! ```

pub mod env;
pub mod grid;
pub mod harness;
pub mod mapgen;
pub mod maps_io;
pub mod metrics;
pub mod obs;
pub mod rng;
pub mod solvers;
pub mod viz;

pub use env::{Action, CollisionSystem, CollisionTally, Env, GridConfig, OnTarget, Problem};
pub use grid::{MapFamily, MapGrid, Pos};
