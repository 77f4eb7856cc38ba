//! Deterministic play-out of strategy profiles, with capture detection,
//! non-capture certification by revisits, and forced deviations.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::cr::CaptureTime;
use crate::payoffs::{total_payoff, GameParams, ParamError};
use crate::profile::Strategy;
use crate::state::{Action, StateId, StateSpace};

/// Safety net for externally supplied strategies; built-in strategies are
/// finite-mode automata and always terminate by capture or revisit first.
pub const DEFAULT_TURN_CAP: u32 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("play cannot start from the terminal state")]
    InitialTerminal,
    #[error("illegal move {action} by player {mover} at {state} (turn {turn})")]
    IllegalMove { turn: u32, mover: usize, state: String, action: String },
    #[error("deviation plan names turn {turn}, but player {mover} moves then")]
    PlanMismatch { turn: u32, mover: usize },
    #[error(transparent)]
    Payoff(#[from] ParamError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Captured,
    /// A (state, mode) pair repeated without capture in between.
    CycleCertified,
    /// Inconclusive: the turn cap was reached.
    TurnCapHit,
}

/// One turn of play. `t` is the index of the resulting state; players and
/// vertices are 1-based.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Step {
    pub t: u32,
    pub mover: usize,
    pub action: String,
    pub state: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trace {
    pub initial: String,
    pub steps: Vec<Step>,
    pub capture_time: CaptureTime,
    /// 1-based capturing cops; empty without capture.
    pub capturing_set: Vec<usize>,
    pub termination: Termination,
    #[serde(skip)]
    states: Vec<StateId>,
    #[serde(skip)]
    capture_mask: u32,
}

impl Trace {
    /// Visited states `s_0, s_1, …` in order.
    pub fn states(&self) -> &[StateId] {
        &self.states
    }

    pub fn capture_mask(&self) -> u32 {
        self.capture_mask
    }

    pub fn last_state(&self) -> StateId {
        *self.states.last().expect("a trace holds its initial state")
    }

    pub fn is_captured(&self) -> bool {
        self.termination == Termination::Captured
    }
}

/// Plays `strategy` from `s0` until capture, a certified cycle, or the cap.
pub fn run<S: Strategy>(space: &StateSpace, strategy: &S, s0: StateId, turn_cap: u32) -> Result<Trace, SimError> {
    play(space, strategy, s0, turn_cap, None)
}

/// Like [`run`], but `deviator` follows `plan` (turn index of the move →
/// target vertex, 0-based) wherever it is defined. Revisits only certify a
/// cycle once the plan is exhausted.
pub fn run_with_forced_deviation<S: Strategy>(
    space: &StateSpace,
    strategy: &S,
    deviator: usize,
    plan: &BTreeMap<u32, usize>,
    s0: StateId,
    turn_cap: u32,
) -> Result<Trace, SimError> {
    play(space, strategy, s0, turn_cap, Some((deviator, plan)))
}

fn play<S: Strategy>(
    space: &StateSpace,
    strategy: &S,
    s0: StateId,
    turn_cap: u32,
    forced: Option<(usize, &BTreeMap<u32, usize>)>,
) -> Result<Trace, SimError> {
    if !space.contains(s0) || space.is_terminal(s0) {
        return Err(SimError::InitialTerminal);
    }
    let plan_end = forced.and_then(|(_, p)| p.keys().next_back().copied()).unwrap_or(0);
    let mut s = s0;
    let mut mode = strategy.initial_mode(space, s0);
    let mut seen = HashSet::new();
    let mut steps = Vec::new();
    let mut states = vec![s0];
    let mut t = 0u32;
    let termination = loop {
        if space.is_capture(s) {
            break Termination::Captured;
        }
        if t >= turn_cap {
            break Termination::TurnCapHit;
        }
        if t >= plan_end && !seen.insert((s, mode.clone())) {
            break Termination::CycleCertified;
        }
        let mover = space.mover_of(s);
        let planned = forced.and_then(|(who, plan)| plan.get(&(t + 1)).map(|&to| (who, to)));
        let target = match planned {
            Some((who, to)) if who == mover => to,
            Some(_) => return Err(SimError::PlanMismatch { turn: t + 1, mover: mover + 1 }),
            None => strategy.target(space, s, &mode),
        };
        let next = space.transition(s, Action::Move(target)).map_err(|_| SimError::IllegalMove {
            turn: t + 1,
            mover: mover + 1,
            state: space.display(s),
            action: Action::Move(target).to_string(),
        })?;
        mode = strategy.advance(space, s, &mode, target);
        t += 1;
        s = next;
        states.push(s);
        steps.push(Step {
            t,
            mover: mover + 1,
            action: Action::Move(target).to_string(),
            state: space.display(s),
            mode: strategy.describe_mode(&mode),
        });
    };
    let captured = termination == Termination::Captured;
    Ok(Trace {
        initial: space.display(s0),
        steps,
        capture_time: match termination {
            Termination::Captured => CaptureTime::Finite(t),
            _ => CaptureTime::Never,
        },
        capturing_set: if captured { space.capturing_set(s).iter().map(|c| c + 1).collect() } else { Vec::new() },
        termination,
        states,
        capture_mask: if captured { space.capture_mask(s) } else { 0 },
    })
}

/// Discounted payoff of every player for a terminated trace.
pub fn payoffs_of(params: &GameParams, trace: &Trace) -> Result<Vec<f64>, SimError> {
    (0..params.players).map(|n| total_payoff(params, trace, n).map_err(SimError::from)).collect()
}

/// Fixed-width turn table: one column per turn, one row per player giving
/// the player's vertex after that turn.
pub fn render_turn_table(space: &StateSpace, trace: &Trace) -> String {
    let mut labels: Vec<String> = vec!["Turn".into()];
    labels.extend((1..space.players()).map(|c| format!("C{c} vertex")));
    labels.push("R vertex".into());
    let mut rows: Vec<Vec<String>> = vec![Vec::new(); labels.len()];
    for (t, &s) in trace.states().iter().enumerate() {
        rows[0].push(t.to_string());
        for (p, row) in rows.iter_mut().skip(1).enumerate() {
            row.push((space.position(s, p) + 1).to_string());
        }
    }
    let label_width = labels.iter().map(|l| l.chars().count()).max().unwrap_or(0);
    let cell_width = rows.iter().flatten().map(String::len).max().unwrap_or(1);
    let mut out = String::new();
    for (label, row) in labels.iter().zip(&rows) {
        let pad = label_width - label.chars().count();
        let _ = write!(out, "{label}{}", " ".repeat(pad));
        for cell in row {
            let _ = write!(out, " | {cell:>cell_width$}");
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::profile::PositionalProfile;

    #[test]
    fn frozen_play_is_certified() {
        let sp = StateSpace::new(&Graph::cycle(4), 3).unwrap();
        let prof = PositionalProfile::stay(&sp);
        let s0 = sp.parse_state("1,1,3,1").unwrap();
        let tr = run(&sp, &prof, s0, DEFAULT_TURN_CAP).unwrap();
        assert_eq!(tr.termination, Termination::CycleCertified);
        assert_eq!(tr.capture_time, CaptureTime::Never);
        let p = GameParams::new(3, 0.9, 0.25).unwrap();
        assert_eq!(payoffs_of(&p, &tr).unwrap(), vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn capture_at_start() {
        let sp = StateSpace::new(&Graph::path(3), 2).unwrap();
        let prof = PositionalProfile::stay(&sp);
        let s0 = sp.parse_state("2,2,2").unwrap();
        let tr = run(&sp, &prof, s0, 10).unwrap();
        assert_eq!(tr.capture_time, CaptureTime::Finite(0));
        assert_eq!(tr.capturing_set, vec![1]);
        assert!(tr.steps.is_empty());
        assert!(run(&sp, &prof, sp.terminal(), 10).is_err());
    }

    #[test]
    fn cap_and_plan_errors() {
        let sp = StateSpace::new(&Graph::path(3), 2).unwrap();
        let prof = PositionalProfile::stay(&sp);
        let s0 = sp.parse_state("1,3,1").unwrap();
        let tr = run(&sp, &prof, s0, 0).unwrap();
        assert_eq!(tr.termination, Termination::TurnCapHit);
        let p = GameParams::new(2, 0.5, 0.0).unwrap();
        assert!(payoffs_of(&p, &tr).is_err());
        // cop moves at turn 1; the robber cannot be forced then
        let plan = BTreeMap::from([(1, 1)]);
        assert!(matches!(
            run_with_forced_deviation(&sp, &prof, 1, &plan, s0, 100),
            Err(SimError::PlanMismatch { turn: 1, mover: 1 })
        ));
        let plan = BTreeMap::from([(1, 2)]);
        assert!(matches!(run_with_forced_deviation(&sp, &prof, 0, &plan, s0, 100), Err(SimError::IllegalMove { .. })));
        // forced walk 1→2→3 catches the staying robber at turn 3
        let plan = BTreeMap::from([(1, 1), (3, 2)]);
        let tr = run_with_forced_deviation(&sp, &prof, 0, &plan, s0, 100).unwrap();
        assert_eq!(tr.capture_time, CaptureTime::Finite(3));
        assert!((payoffs_of(&p, &tr).unwrap()[0] - 0.125).abs() < 1e-15);
    }

    #[test]
    fn table_layout() {
        let sp = StateSpace::new(&Graph::path(3), 2).unwrap();
        let prof = PositionalProfile::stay(&sp);
        let s0 = sp.parse_state("1,3,1").unwrap();
        let plan = BTreeMap::from([(1, 1), (3, 2)]);
        let tr = run_with_forced_deviation(&sp, &prof, 0, &plan, s0, 100).unwrap();
        let table = render_turn_table(&sp, &tr);
        assert_eq!(table, "Turn      | 0 | 1 | 2 | 3\nC1 vertex | 1 | 2 | 2 | 3\nR vertex  | 3 | 3 | 3 | 3\n");
    }
}
