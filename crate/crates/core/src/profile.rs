//! Strategy representations: positional profiles and the automaton trait
//! used by the simulator and the best-response verifiers.

use std::fmt::Debug;
use std::hash::Hash;

use crate::cr::CaptureTime;
use crate::payoffs::{capture_payoff, discount, GameParams};
use crate::state::{Action, StateError, StateId, StateSpace};

const NO_MOVE: u32 = u32::MAX;

/// A (possibly history-dependent) strategy profile driven by a finite mode.
///
/// At every non-capture state the mover's target vertex is a function of the
/// state and the current mode; after each move the mode is advanced from the
/// observed move. Positional profiles use the unit mode.
pub trait Strategy {
    type Mode: Clone + Eq + Hash + Debug;

    fn initial_mode(&self, space: &StateSpace, s0: StateId) -> Self::Mode;

    /// Target vertex (0-based) of the mover at non-capture state `s`.
    fn target(&self, space: &StateSpace, s: StateId, mode: &Self::Mode) -> usize;

    /// Mode after the mover at `s` went to `moved_to`.
    fn advance(&self, space: &StateSpace, s: StateId, mode: &Self::Mode, moved_to: usize) -> Self::Mode;

    /// Short label for trace output; `None` hides the mode.
    fn describe_mode(&self, _mode: &Self::Mode) -> Option<String> {
        None
    }
}

/// One target vertex per non-capture state, prescribed for that state's mover.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PositionalProfile {
    players: usize,
    targets: Vec<u32>,
}

/// Where deterministic positional play from a state ends up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// Reaches capture state `at` after `after` turns.
    Capture { after: u32, at: StateId },
    /// Enters a cycle of non-capture states.
    Cycle,
}

impl Outcome {
    pub fn capture_time(&self) -> CaptureTime {
        match self {
            Outcome::Capture { after, .. } => CaptureTime::Finite(*after),
            Outcome::Cycle => CaptureTime::Never,
        }
    }
}

impl PositionalProfile {
    /// Every mover stays in place.
    pub fn stay(space: &StateSpace) -> Self {
        Self::from_fn(space, |s| space.position(s, space.mover_of(s)))
    }

    /// Builds a profile from a target function evaluated at every
    /// non-capture state.
    pub fn from_fn(space: &StateSpace, mut f: impl FnMut(StateId) -> usize) -> Self {
        let mut targets = vec![NO_MOVE; space.len()];
        for s in space.nonterminal_states() {
            if space.is_noncapture(s) {
                targets[s] = f(s) as u32;
            }
        }
        PositionalProfile { players: space.players(), targets }
    }

    pub fn players(&self) -> usize {
        self.players
    }

    /// Prescribed target at `s`, `None` where only the null move exists.
    pub fn target_at(&self, s: StateId) -> Option<usize> {
        self.targets.get(s).filter(|&&t| t != NO_MOVE).map(|&t| t as usize)
    }

    pub fn action(&self, s: StateId) -> Action {
        self.target_at(s).map_or(Action::Null, Action::Move)
    }

    pub fn set(&mut self, s: StateId, to: usize) {
        assert_ne!(self.targets[s], NO_MOVE, "no move is prescribed at a capture or terminal state");
        self.targets[s] = to as u32;
    }

    /// Next state under the profile (capture and terminal states go to the
    /// terminal state).
    pub fn next(&self, space: &StateSpace, s: StateId) -> StateId {
        match self.target_at(s) {
            Some(to) => space.successor(s, to),
            None => space.terminal(),
        }
    }

    /// Checks that every prescribed target lies in the mover's closed
    /// neighborhood.
    pub fn validate(&self, space: &StateSpace) -> Result<(), StateError> {
        if self.targets.len() != space.len() || self.players != space.players() {
            return Err(StateError::Malformed("profile does not match the state space".into()));
        }
        for s in space.nonterminal_states() {
            if space.is_noncapture(s) {
                let to = self.targets[s];
                space.transition(s, Action::Move(to as usize))?;
            } else if self.targets[s] != NO_MOVE {
                return Err(StateError::IllegalAction { state: space.display(s), action: "move".into() });
            }
        }
        Ok(())
    }

    /// Replaces the targets of `player` by those of `other`.
    pub fn with_player_from(&self, space: &StateSpace, player: usize, other: &PositionalProfile) -> Self {
        let mut out = self.clone();
        for s in space.nonterminal_states() {
            if space.is_noncapture(s) && space.mover_of(s) == player {
                out.targets[s] = other.targets[s];
            }
        }
        out
    }

    /// Outcome of the play from every state, by walking the functional graph
    /// of the profile once.
    pub fn outcomes(&self, space: &StateSpace) -> Vec<Outcome> {
        const UNSEEN: u8 = 0;
        const ACTIVE: u8 = 1;
        const DONE: u8 = 2;
        let n = space.len();
        let mut out = vec![Outcome::Cycle; n];
        let mut mark = vec![UNSEEN; n];
        mark[space.terminal()] = DONE;
        for s in space.nonterminal_states() {
            if space.is_capture(s) {
                out[s] = Outcome::Capture { after: 0, at: s };
                mark[s] = DONE;
            }
        }
        let mut stack = Vec::new();
        for start in space.nonterminal_states() {
            if mark[start] != UNSEEN {
                continue;
            }
            let mut s = start;
            while mark[s] == UNSEEN {
                mark[s] = ACTIVE;
                stack.push(s);
                s = self.next(space, s);
            }
            // `s` is either resolved or lies on a cycle formed by the stack.
            let mut tail = if mark[s] == ACTIVE { Outcome::Cycle } else { out[s] };
            while let Some(p) = stack.pop() {
                tail = match tail {
                    Outcome::Capture { after, at } => Outcome::Capture { after: after + 1, at },
                    Outcome::Cycle => Outcome::Cycle,
                };
                out[p] = tail;
                mark[p] = DONE;
            }
        }
        out
    }

    /// Exact discounted payoff of every player from every state, as
    /// `values[player][state]`.
    pub fn payoffs(&self, space: &StateSpace, params: &GameParams) -> Vec<Vec<f64>> {
        let outcomes = self.outcomes(space);
        (0..space.players())
            .map(|m| {
                let mut v: Vec<f64> = outcomes
                    .iter()
                    .map(|o| match *o {
                        Outcome::Capture { after, at } => {
                            discount(params.gamma, CaptureTime::Finite(after))
                                * capture_payoff(params, space.capture_mask(at), m)
                        }
                        Outcome::Cycle => 0.0,
                    })
                    .collect();
                v[space.terminal()] = 0.0;
                v
            })
            .collect()
    }
}

impl Strategy for PositionalProfile {
    type Mode = ();

    fn initial_mode(&self, _: &StateSpace, _: StateId) {}

    fn target(&self, _: &StateSpace, s: StateId, _: &()) -> usize {
        self.target_at(s).expect("target requested at a non-capture state")
    }

    fn advance(&self, _: &StateSpace, _: StateId, _: &(), _: usize) {}
}
