//! Self-describing game instances: graph, players, parameters and start.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{parse_graph, Graph, GraphError};
use crate::payoffs::{validate_params, EpsilonMode, GameParams, ParamError, Tolerances};
use crate::state::{StateError, StateId, StateSpace};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("scenario needs exactly one of `graph` (inline edge list) or `graph_file`")]
    GraphSource,
    #[error("cannot read graph file {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("scenario needs `epsilon` or `split_equivalent: true`")]
    MissingEpsilon,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error(transparent)]
    State(#[from] StateError),
}

/// A game instance as written in a scenario file. Vertices and players in
/// `s0` are 1-based, e.g. `"6,1,4,1"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    /// Inline edge-list document.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<String>,
    /// Edge-list file, resolved relative to the scenario file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph_file: Option<PathBuf>,
    pub players: usize,
    pub gamma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub split_equivalent: bool,
    #[serde(default)]
    pub allow_extended_epsilon: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s0: Option<String>,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Optional sweep grid: discount factors and splits.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub gammas: Vec<f64>,
    pub epsilons: Vec<f64>,
}

/// A validated scenario with its graph loaded.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub graph: Graph,
    pub params: GameParams,
    pub space: StateSpace,
    pub s0: Option<StateId>,
    /// The scenario with the graph inlined, for echoing in reports.
    pub echo: Scenario,
}

impl Scenario {
    pub fn inline(graph: &Graph, params: &GameParams, s0: Option<String>) -> Self {
        Scenario {
            graph: Some(graph.to_edge_list()),
            graph_file: None,
            players: params.players,
            gamma: params.gamma,
            epsilon: params.epsilon_value(),
            split_equivalent: params.epsilon == EpsilonMode::SplitEquivalent,
            allow_extended_epsilon: params.allow_extended_epsilon,
            s0,
            tolerances: params.tol,
            grid: None,
        }
    }

    pub fn params(&self) -> Result<GameParams, ScenarioError> {
        let epsilon = if self.split_equivalent {
            EpsilonMode::SplitEquivalent
        } else {
            EpsilonMode::Fixed(self.epsilon.ok_or(ScenarioError::MissingEpsilon)?)
        };
        let params = GameParams {
            players: self.players,
            gamma: self.gamma,
            epsilon,
            allow_extended_epsilon: self.allow_extended_epsilon,
            tol: self.tolerances,
        };
        validate_params(&params)?;
        Ok(params)
    }

    pub fn load_graph(&self, base: Option<&Path>) -> Result<Graph, ScenarioError> {
        match (&self.graph, &self.graph_file) {
            (Some(text), None) => Ok(parse_graph(text)?),
            (None, Some(path)) => {
                let path = match base {
                    Some(dir) if path.is_relative() => dir.join(path),
                    _ => path.clone(),
                };
                let text = std::fs::read_to_string(&path)
                    .map_err(|source| ScenarioError::Io { path: path.clone(), source })?;
                Ok(parse_graph(&text)?)
            }
            _ => Err(ScenarioError::GraphSource),
        }
    }

    /// Loads and validates everything; `base` is the directory relative
    /// graph files are resolved against.
    pub fn resolve(&self, base: Option<&Path>) -> Result<Resolved, ScenarioError> {
        let graph = self.load_graph(base)?;
        let params = self.params()?;
        let space = StateSpace::new(&graph, self.players)?;
        let s0 = match &self.s0 {
            Some(text) => {
                let s = space.parse_state(text)?;
                if space.is_terminal(s) {
                    return Err(ParamError::TerminalStart.into());
                }
                Some(s)
            }
            None => None,
        };
        let mut echo = self.clone();
        echo.graph = Some(graph.to_edge_list());
        echo.graph_file = None;
        Ok(Resolved { graph, params, space, s0, echo })
    }
}
