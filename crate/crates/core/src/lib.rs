//! Solver and equilibrium workbench for the selfish-cops, active-robber
//! pursuit game on finite graphs.
//!
//! `N − 1` cops and one robber move one at a time on a connected graph. Each
//! cop is a separate player who is rewarded when the robber is caught, more
//! so when it is among the capturing cops; the robber pays one at capture.
//! Rewards are discounted per turn by `γ`.
//!
//! The crate provides:
//! - [`graph`] and [`state`]: the graph, the dense state space and the
//!   transition function;
//! - [`payoffs`]: turn payoffs, parameter domains and exact rational forms;
//! - [`cr`]: exact capture times, cop numbers and discounted values of the
//!   game in which a single player moves every cop;
//! - [`equilibria`]: positional and threat-strategy equilibria, and their
//!   verifiers;
//! - [`simulate`]: traces, forced deviations and turn tables;
//! - [`scenario`]: self-describing game instances;
//! - [`analysis`]: selfish cop number, theorem suites, sweeps.
//!
//! All vertex ids and player indices are 0-based in the API and 1-based in
//! text input and output.

pub mod analysis;
pub mod cr;
pub mod equilibria;
pub mod graph;
pub mod payoffs;
pub mod profile;
pub mod scenario;
pub mod simulate;
pub mod state;

pub use cr::{CaptureTime, CaptureTimeTable};
pub use graph::{parse_graph, Graph, GraphError};
pub use payoffs::{EpsilonMode, GameParams, ParamError, Tolerances};
pub use profile::{PositionalProfile, Strategy};
pub use simulate::{SimError, Trace};
pub use state::{Action, GameState, StateError, StateId, StateSpace};
