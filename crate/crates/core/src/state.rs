//! Dense enumeration of game states, their classification, action sets and
//! the transition function.
//!
//! A non-terminal state `(x_1, ..., x_N, p)` is stored as the mixed-radix
//! index `((x_1 * V + x_2) * V + ... + x_N) * N + p` with 0-based vertices and
//! players; the terminal state takes the last index `N * V^N`. Players
//! `0..N-1` are cops and player `N-1` is the robber.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;

pub type StateId = usize;

/// Default cap on the number of states a space may hold.
pub const DEFAULT_STATE_CAP: usize = 50_000_000;

/// Cops are tracked in a `u32` capture mask.
pub const MAX_PLAYERS: usize = 33;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StateError {
    #[error("state space with {players} players on {vertices} vertices needs {states} states, above the cap of {cap}")]
    Capacity { players: usize, vertices: usize, states: u128, cap: usize },
    #[error("player count must be between 2 and {MAX_PLAYERS}, got {0}")]
    PlayerCount(usize),
    #[error("state {0} is not a state of this space")]
    InvalidState(String),
    #[error("illegal action {action} at state {state}")]
    IllegalAction { state: String, action: String },
    #[error("malformed state {0:?}: expected comma-separated 1-based positions followed by the mover")]
    Malformed(String),
}

/// A game position: every player's vertex plus the player to move, or the
/// absorbing terminal state.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GameState {
    Playing { positions: Vec<usize>, mover: usize },
    Terminal,
}

impl GameState {
    pub fn playing(positions: Vec<usize>, mover: usize) -> Self {
        GameState::Playing { positions, mover }
    }

    /// Parses the 1-based form `"x1,...,xN,p"` (spaces and surrounding
    /// parentheses allowed) or `"tau"`.
    pub fn parse(text: &str) -> Result<Self, StateError> {
        let t = text.trim().trim_start_matches('(').trim_end_matches(')').trim();
        if t.eq_ignore_ascii_case("tau") || t == "τ" {
            return Ok(GameState::Terminal);
        }
        let nums: Result<Vec<usize>, _> = t
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(str::parse::<usize>)
            .collect();
        let nums = nums.map_err(|_| StateError::Malformed(text.to_string()))?;
        if nums.len() < 3 || nums.contains(&0) {
            return Err(StateError::Malformed(text.to_string()));
        }
        let (mover, positions) = nums.split_last().expect("length checked");
        Ok(GameState::Playing { positions: positions.iter().map(|x| x - 1).collect(), mover: mover - 1 })
    }
}

impl fmt::Display for GameState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GameState::Terminal => write!(f, "τ"),
            GameState::Playing { positions, mover } => {
                write!(f, "(")?;
                for x in positions {
                    write!(f, "{},", x + 1)?;
                }
                write!(f, "{})", mover + 1)
            }
        }
    }
}

/// A player's move: a target vertex (possibly the current one), or the null
/// move available at capture and terminal states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Action {
    Move(usize),
    Null,
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Move(v) => write!(f, "{}", v + 1),
            Action::Null => write!(f, "λ"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Classification {
    NonCapture,
    /// 0-based indices of the cops sharing the robber's vertex.
    Capture(Vec<usize>),
    Terminal,
}

/// All states of the `N`-player game on a graph.
#[derive(Debug, Clone)]
pub struct StateSpace {
    graph: Graph,
    players: usize,
    vertices: usize,
    nonterminal: usize,
    strides: Vec<usize>,
    capture: Vec<u32>,
}

impl StateSpace {
    pub fn new(graph: &Graph, players: usize) -> Result<Self, StateError> {
        Self::with_cap(graph, players, DEFAULT_STATE_CAP)
    }

    pub fn with_cap(graph: &Graph, players: usize, cap: usize) -> Result<Self, StateError> {
        if !(2..=MAX_PLAYERS).contains(&players) {
            return Err(StateError::PlayerCount(players));
        }
        let vertices = graph.vertex_count();
        let total = (vertices as u128).checked_pow(players as u32).map(|p| p * players as u128 + 1);
        let capacity_error = || StateError::Capacity { players, vertices, states: total.unwrap_or(u128::MAX), cap };
        match total {
            Some(t) if t <= cap as u128 => {}
            _ => return Err(capacity_error()),
        }
        let nonterminal = total.expect("checked") as usize - 1;

        let mut strides = vec![0; players];
        let mut s = players;
        for i in (0..players).rev() {
            strides[i] = s;
            s *= vertices;
        }

        let robber = players - 1;
        let mut capture = vec![0u32; nonterminal];
        let mut positions = vec![0usize; players];
        for (combo, chunk) in capture.chunks_mut(players).enumerate() {
            let mut rest = combo;
            for i in (0..players).rev() {
                positions[i] = rest % vertices;
                rest /= vertices;
            }
            let mut mask = 0u32;
            for cop in 0..robber {
                if positions[cop] == positions[robber] {
                    mask |= 1 << cop;
                }
            }
            chunk.fill(mask);
        }

        Ok(StateSpace { graph: graph.clone(), players, vertices, nonterminal, strides, capture })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn players(&self) -> usize {
        self.players
    }

    pub fn cops(&self) -> usize {
        self.players - 1
    }

    pub fn robber(&self) -> usize {
        self.players - 1
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    /// Total number of states including the terminal state.
    pub fn len(&self) -> usize {
        self.nonterminal + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn terminal(&self) -> StateId {
        self.nonterminal
    }

    pub fn is_terminal(&self, s: StateId) -> bool {
        s == self.nonterminal
    }

    pub fn nonterminal_states(&self) -> std::ops::Range<StateId> {
        0..self.nonterminal
    }

    pub fn contains(&self, s: StateId) -> bool {
        s <= self.nonterminal
    }

    /// Bitmask of capturing cops; zero for non-capture and terminal states.
    pub fn capture_mask(&self, s: StateId) -> u32 {
        self.capture.get(s).copied().unwrap_or(0)
    }

    pub fn is_capture(&self, s: StateId) -> bool {
        self.capture_mask(s) != 0
    }

    /// Non-terminal and not a capture state.
    pub fn is_noncapture(&self, s: StateId) -> bool {
        s < self.nonterminal && self.capture[s] == 0
    }

    pub fn capturing_set(&self, s: StateId) -> Vec<usize> {
        let mask = self.capture_mask(s);
        (0..self.cops()).filter(|c| mask & (1 << c) != 0).collect()
    }

    pub fn classify(&self, s: StateId) -> Classification {
        if self.is_terminal(s) {
            Classification::Terminal
        } else if self.is_capture(s) {
            Classification::Capture(self.capturing_set(s))
        } else {
            Classification::NonCapture
        }
    }

    /// The player to move, `None` at the terminal state.
    pub fn mover(&self, s: StateId) -> Option<usize> {
        (s < self.nonterminal).then(|| s % self.players)
    }

    /// Mover of a non-terminal state; panics on the terminal state.
    pub fn mover_of(&self, s: StateId) -> usize {
        debug_assert!(s < self.nonterminal);
        s % self.players
    }

    pub fn position(&self, s: StateId, player: usize) -> usize {
        debug_assert!(s < self.nonterminal);
        (s / self.strides[player]) % self.vertices
    }

    pub fn positions(&self, s: StateId) -> Vec<usize> {
        (0..self.players).map(|i| self.position(s, i)).collect()
    }

    pub fn robber_position(&self, s: StateId) -> usize {
        self.position(s, self.robber())
    }

    pub fn state(&self, s: StateId) -> GameState {
        if self.is_terminal(s) {
            GameState::Terminal
        } else {
            GameState::Playing { positions: self.positions(s), mover: self.mover_of(s) }
        }
    }

    /// Index of a non-terminal configuration given 0-based positions and mover.
    pub fn id_of(&self, positions: &[usize], mover: usize) -> Result<StateId, StateError> {
        if positions.len() != self.players || mover >= self.players || positions.iter().any(|&x| x >= self.vertices) {
            return Err(StateError::InvalidState(
                GameState::Playing { positions: positions.to_vec(), mover }.to_string(),
            ));
        }
        let combo = positions.iter().fold(0, |acc, &x| acc * self.vertices + x);
        Ok(combo * self.players + mover)
    }

    pub fn index(&self, state: &GameState) -> Result<StateId, StateError> {
        match state {
            GameState::Terminal => Ok(self.terminal()),
            GameState::Playing { positions, mover } => self.id_of(positions, *mover),
        }
    }

    /// Parses a 1-based state string and returns its index.
    pub fn parse_state(&self, text: &str) -> Result<StateId, StateError> {
        self.index(&GameState::parse(text)?)
    }

    pub fn display(&self, s: StateId) -> String {
        self.state(s).to_string()
    }

    /// Same positions with a different mover.
    pub fn with_mover(&self, s: StateId, mover: usize) -> StateId {
        s - s % self.players + mover
    }

    /// Moves `player` to vertex `to` without changing the mover.
    pub fn with_position(&self, s: StateId, player: usize, to: usize) -> StateId {
        let from = self.position(s, player);
        let stride = self.strides[player];
        s + to * stride - from * stride
    }

    /// Successor of a non-capture state when the mover goes to `to`. The
    /// caller guarantees `to` is in the mover's closed neighborhood.
    pub fn successor(&self, s: StateId, to: usize) -> StateId {
        let p = self.mover_of(s);
        let moved = self.with_position(s, p, to);
        if p + 1 == self.players {
            moved - p
        } else {
            moved + 1
        }
    }

    /// The mover's options at a non-capture state, as `(target, successor)`
    /// pairs in ascending target order.
    pub fn moves(&self, s: StateId) -> impl Iterator<Item = (usize, StateId)> + '_ {
        let p = self.mover_of(s);
        let x = self.position(s, p);
        self.graph.closed_neighborhood(x).iter().map(move |&to| (to, self.successor(s, to)))
    }

    /// States whose single transition leads to `s`; only non-capture states
    /// are returned, since capture states always move to the terminal.
    pub fn predecessors(&self, s: StateId) -> impl Iterator<Item = StateId> + '_ {
        let valid = s < self.nonterminal;
        let (prev, base, x) = if valid {
            let prev = (self.mover_of(s) + self.players - 1) % self.players;
            let base = self.with_mover(s, prev);
            (prev, base, self.position(s, prev))
        } else {
            (0, 0, 0)
        };
        let nbrs: &[usize] = if valid { self.graph.closed_neighborhood(x) } else { &[] };
        nbrs.iter().map(move |&y| self.with_position(base, prev, y)).filter(move |&p| self.capture[p] == 0)
    }

    /// Action set of `player` at state `s`.
    pub fn actions(&self, s: StateId, player: usize) -> Vec<Action> {
        if !self.is_noncapture(s) {
            return vec![Action::Null];
        }
        let x = self.position(s, player);
        if self.mover_of(s) == player {
            self.graph.closed_neighborhood(x).iter().map(|&v| Action::Move(v)).collect()
        } else {
            vec![Action::Move(x)]
        }
    }

    /// The transition function driven by the mover's action.
    pub fn transition(&self, s: StateId, action: Action) -> Result<StateId, StateError> {
        if !self.contains(s) {
            return Err(StateError::InvalidState(format!("#{s}")));
        }
        let illegal = || StateError::IllegalAction { state: self.display(s), action: action.to_string() };
        if !self.is_noncapture(s) {
            return match action {
                Action::Null => Ok(self.terminal()),
                Action::Move(_) => Err(illegal()),
            };
        }
        match action {
            Action::Move(to) => {
                let x = self.position(s, self.mover_of(s));
                if to < self.vertices && (to == x || self.graph.is_adjacent(x, to)) {
                    Ok(self.successor(s, to))
                } else {
                    Err(illegal())
                }
            }
            Action::Null => Err(illegal()),
        }
    }
}
