use std::collections::HashSet;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use super::auxiliary::{solve_aux_games, AuxSolution};
use super::best_response::single_controller_values;
use crate::cr::CaptureTime;
use crate::payoffs::{capture_payoff, discount, GameParams};
use crate::profile::{PositionalProfile, Strategy};
use crate::state::{StateId, StateSpace};

/// Shared mode of the threat automata. Moves are observed by everyone, so
/// every player's automaton is in the same mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ThreatMode {
    Cooperative,
    /// Everyone else punishes the given player, forever.
    Punishing(usize),
}

impl fmt::Display for ThreatMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThreatMode::Cooperative => f.write_str("cooperative"),
            ThreatMode::Punishing(m) => write!(f, "punishing player {}", m + 1),
        }
    }
}

/// Cooperative positional play, backed by a punishment for each possible
/// deviator: after the first observed deviation by `m`, every other player
/// switches to the coalition strategy of `m`'s auxiliary game, while `m`
/// itself keeps to the cooperative part.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreatProfile {
    pub cooperative: PositionalProfile,
    /// `punishments[m]` prescribes the coalition's moves against `m`.
    pub punishments: Vec<PositionalProfile>,
}

impl ThreatProfile {
    /// The standard threat profile: each player cooperates by playing its
    /// own optimal strategy of its auxiliary game.
    pub fn from_aux(space: &StateSpace, aux: &[AuxSolution]) -> Self {
        let cooperative = PositionalProfile::from_fn(space, |s| {
            aux[space.mover_of(s)].strategy.target_at(s).expect("non-capture state")
        });
        ThreatProfile { cooperative, punishments: aux.iter().map(|a| a.strategy.clone()).collect() }
    }

    /// Same punishments around a different cooperative part.
    pub fn with_cooperative(&self, cooperative: PositionalProfile) -> Self {
        ThreatProfile { cooperative, punishments: self.punishments.clone() }
    }
}

impl Strategy for ThreatProfile {
    type Mode = ThreatMode;

    fn initial_mode(&self, _: &StateSpace, _: StateId) -> ThreatMode {
        ThreatMode::Cooperative
    }

    fn target(&self, space: &StateSpace, s: StateId, mode: &ThreatMode) -> usize {
        let mover = space.mover_of(s);
        let part = match *mode {
            ThreatMode::Punishing(m) if m != mover => &self.punishments[m],
            _ => &self.cooperative,
        };
        part.target_at(s).expect("target requested at a non-capture state")
    }

    fn advance(&self, space: &StateSpace, s: StateId, mode: &ThreatMode, moved_to: usize) -> ThreatMode {
        match mode {
            ThreatMode::Cooperative if self.cooperative.target_at(s) != Some(moved_to) => {
                ThreatMode::Punishing(space.mover_of(s))
            }
            m => *m,
        }
    }

    fn describe_mode(&self, mode: &ThreatMode) -> Option<String> {
        Some(mode.to_string())
    }
}

/// Solves the auxiliary games and assembles the standard threat profile.
pub fn build_threat_profile(space: &StateSpace, params: &GameParams) -> ThreatProfile {
    ThreatProfile::from_aux(space, &solve_aux_games(space, params))
}

/// Deviation analysis for one initial state.
#[derive(Debug, Clone, Serialize)]
pub struct ThreatCheck {
    pub s0: String,
    /// Capture time of cooperative play.
    pub capture_time: CaptureTime,
    pub payoffs: Vec<f64>,
    /// Per player: best one-shot deviation followed by optimal play against
    /// the punishment, minus the cooperative payoff (zero if no deviation
    /// helps).
    pub gains: Vec<f64>,
}

impl ThreatCheck {
    pub fn max_gain(&self) -> f64 {
        self.gains.iter().copied().fold(0.0, f64::max)
    }
}

/// Caches, for every player, its optimal value against its punishment.
/// Once punished, the deviator faces fixed positional strategies, so the
/// value of any deviation is one discounted lookup in that table.
#[derive(Debug, Clone)]
pub struct ThreatVerifier {
    punished: Vec<Vec<f64>>,
}

impl ThreatVerifier {
    pub fn new(space: &StateSpace, params: &GameParams, punishments: &[PositionalProfile]) -> Self {
        let punished = (0..space.players())
            .into_par_iter()
            .map(|n| single_controller_values(space, params, n, &punishments[n]).values)
            .collect();
        ThreatVerifier { punished }
    }

    /// Value player `n` secures from `s` once everyone else punishes it.
    pub fn punished_value(&self, n: usize, s: StateId) -> f64 {
        self.punished[n][s]
    }

    /// Walks the cooperative path from `s0` (until capture or a revisit) and
    /// prices every one-shot deviation along it.
    pub fn check(
        &self,
        space: &StateSpace,
        params: &GameParams,
        cooperative: &PositionalProfile,
        s0: StateId,
    ) -> ThreatCheck {
        let players = space.players();
        let mut best_deviation = vec![f64::NEG_INFINITY; players];
        let mut seen = HashSet::new();
        let mut s = s0;
        let mut t: u32 = 0;
        while space.is_noncapture(s) && seen.insert(s) {
            let n = space.mover_of(s);
            let prescribed = cooperative.target_at(s).expect("non-capture state");
            let factor = params.gamma.powi(t as i32 + 1);
            for (to, next) in space.moves(s) {
                if to != prescribed {
                    let value = factor * self.punished[n][next];
                    best_deviation[n] = best_deviation[n].max(value);
                }
            }
            s = space.successor(s, prescribed);
            t += 1;
        }
        let capture_time = if space.is_capture(s) { CaptureTime::Finite(t) } else { CaptureTime::Never };
        let mask = if space.is_capture(s) { space.capture_mask(s) } else { 0 };
        let payoffs: Vec<f64> =
            (0..players).map(|n| discount(params.gamma, capture_time) * capture_payoff(params, mask, n)).collect();
        let gains = (0..players).map(|n| (best_deviation[n] - payoffs[n]).max(0.0)).collect();
        ThreatCheck { s0: space.display(s0), capture_time, payoffs, gains }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ThreatReport {
    pub starts_checked: usize,
    /// Per player: largest deviation gain over all checked initial states.
    pub max_gains: Vec<f64>,
    pub failing_starts: Vec<String>,
    /// Whether cooperative play captures from every checked initial state.
    pub captures_everywhere: bool,
    pub is_ne: bool,
    pub tol: f64,
}

/// Checks the threat profile from every non-terminal initial state.
pub fn verify_threat_ne(space: &StateSpace, params: &GameParams, threat: &ThreatProfile, tol: f64) -> ThreatReport {
    let verifier = ThreatVerifier::new(space, params, &threat.punishments);
    let checks: Vec<ThreatCheck> = space
        .nonterminal_states()
        .into_par_iter()
        .map(|s| verifier.check(space, params, &threat.cooperative, s))
        .collect();
    summarize(&checks, space.players(), tol)
}

pub(super) fn summarize(checks: &[ThreatCheck], players: usize, tol: f64) -> ThreatReport {
    let mut max_gains = vec![0.0f64; players];
    let mut failing_starts = Vec::new();
    let mut captures_everywhere = true;
    for c in checks {
        for (m, g) in max_gains.iter_mut().zip(&c.gains) {
            *m = m.max(*g);
        }
        if c.max_gain() > tol {
            failing_starts.push(c.s0.clone());
        }
        captures_everywhere &= c.capture_time.is_finite();
    }
    ThreatReport {
        starts_checked: checks.len(),
        max_gains,
        is_ne: failing_starts.is_empty(),
        failing_starts,
        captures_everywhere,
        tol,
    }
}
