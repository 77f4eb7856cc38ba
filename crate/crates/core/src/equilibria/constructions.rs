use std::collections::VecDeque;
use std::fmt;

use serde::Serialize;

use super::positional::cr_optimal_profile;
use super::threat::{build_threat_profile, summarize, ThreatCheck, ThreatProfile, ThreatReport, ThreatVerifier};
use super::{unilateral_gaps, EquilibriumError};
use crate::cr::{exact_capture_times, optimal_profile, t_n_max, CaptureTime, CaptureTimeTable};
use crate::payoffs::{validate_params, GameParams};
use crate::profile::{PositionalProfile, Strategy};
use crate::simulate::{run, Termination, DEFAULT_TURN_CAP};
use crate::state::{StateId, StateSpace};

/// Which cooperative part a capturing threat equilibrium uses from a given
/// initial state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ThreatVariant {
    /// Optimal joint pursuit and optimal evasion.
    OptimalPursuit,
    /// Each player's own auxiliary-game strategy.
    Standard,
}

/// Threat equilibria that capture: cooperative play is optimal pursuit and
/// evasion, backed by the auxiliary-game punishments. From initial states
/// where this fails the one-shot deviation test but the standard threat
/// profile captures, the standard profile is used instead.
#[derive(Debug, Clone)]
pub struct CapturingThreatNe {
    pub optimal: ThreatProfile,
    pub standard: ThreatProfile,
    verifier: ThreatVerifier,
    variants: Vec<ThreatVariant>,
}

impl CapturingThreatNe {
    pub fn variant_at(&self, s0: StateId) -> ThreatVariant {
        self.variants[s0]
    }

    pub fn profile_for(&self, s0: StateId) -> &ThreatProfile {
        match self.variants[s0] {
            ThreatVariant::OptimalPursuit => &self.optimal,
            ThreatVariant::Standard => &self.standard,
        }
    }

    pub fn check(&self, space: &StateSpace, params: &GameParams, s0: StateId) -> ThreatCheck {
        self.verifier.check(space, params, &self.profile_for(s0).cooperative, s0)
    }

    /// Number of initial states served by the standard profile.
    pub fn standard_count(&self) -> usize {
        self.variants.iter().filter(|&&v| v == ThreatVariant::Standard).count()
    }

    /// Deviation check from every initial state.
    pub fn verify(&self, space: &StateSpace, params: &GameParams, tol: f64) -> ThreatReport {
        use rayon::prelude::*;
        let checks: Vec<ThreatCheck> =
            space.nonterminal_states().into_par_iter().map(|s| self.check(space, params, s)).collect();
        summarize(&checks, space.players(), tol)
    }
}

/// Requires the `N − 1` cops to capture from every state of the graph.
pub fn build_capturing_threat_ne(
    space: &StateSpace,
    params: &GameParams,
) -> Result<CapturingThreatNe, EquilibriumError> {
    validate_params(params)?;
    params.check_players(space)?;
    let table = exact_capture_times(space);
    if !t_n_max(space, &table).is_finite() {
        return Err(EquilibriumError::Precondition(format!(
            "the cop number exceeds {}: the robber escapes from {}",
            space.cops(),
            first_escape(space, &table).map_or_else(|| "some state".into(), |s| space.display(s))
        )));
    }
    let standard = build_threat_profile(space, params);
    let optimal = standard.with_cooperative(optimal_profile(space, &table));
    let verifier = ThreatVerifier::new(space, params, &standard.punishments);
    let tol = params.tol.ne_gap;
    let variants = space
        .nonterminal_states()
        .map(|s| {
            let hat = verifier.check(space, params, &optimal.cooperative, s);
            if hat.max_gain() <= tol {
                return ThreatVariant::OptimalPursuit;
            }
            let std = verifier.check(space, params, &standard.cooperative, s);
            if std.capture_time.is_finite() && std.max_gain() <= tol {
                ThreatVariant::Standard
            } else {
                ThreatVariant::OptimalPursuit
            }
        })
        .collect();
    Ok(CapturingThreatNe { optimal, standard, verifier, variants })
}

fn first_escape(space: &StateSpace, table: &CaptureTimeTable) -> Option<StateId> {
    space.nonterminal_states().find(|&s| space.is_noncapture(s) && !table.get(s).is_finite())
}

/// Robber's mode in the non-capturing construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RobberMode {
    /// No cop has moved yet; the robber stays.
    Waiting,
    /// Cop `k` moved first; the robber evades it as in the one-cop game.
    Evading(usize),
}

impl fmt::Display for RobberMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RobberMode::Waiting => f.write_str("waiting"),
            RobberMode::Evading(k) => write!(f, "evading C{}", k + 1),
        }
    }
}

/// Cops that only ever regroup, and a robber that sits still until some cop
/// moves and then evades that cop optimally.
///
/// A cop standing with every other cop stays; otherwise it takes a shortest
/// path step towards the nearest cop not on its vertex (lowest index on
/// ties). Stacked cops therefore never move, and a cop that breaks away is
/// followed, so the cops effectively act as a single cop.
#[derive(Debug, Clone)]
pub struct NonCapturingNe {
    pub s0: StateId,
    dist: Vec<Vec<usize>>,
    one_cop: StateSpace,
    evasion: PositionalProfile,
}

impl NonCapturingNe {
    fn merge_target(&self, space: &StateSpace, s: StateId, cop: usize) -> usize {
        let x = space.position(s, cop);
        let goal = (0..space.cops())
            .filter(|&c| c != cop)
            .map(|c| space.position(s, c))
            .filter(|&z| z != x)
            .min_by_key(|&z| self.dist[x][z]);
        match goal {
            None => x,
            Some(z) => step_towards(space, &self.dist, x, z),
        }
    }
}

fn step_towards(space: &StateSpace, dist: &[Vec<usize>], from: usize, to: usize) -> usize {
    let d = dist[from][to];
    *space
        .graph()
        .closed_neighborhood(from)
        .iter()
        .find(|&&v| dist[v][to] + 1 == d)
        .expect("connected graph has a shortest-path step")
}

impl Strategy for NonCapturingNe {
    type Mode = RobberMode;

    fn initial_mode(&self, _: &StateSpace, _: StateId) -> RobberMode {
        RobberMode::Waiting
    }

    fn target(&self, space: &StateSpace, s: StateId, mode: &RobberMode) -> usize {
        let mover = space.mover_of(s);
        if mover != space.robber() {
            return self.merge_target(space, s, mover);
        }
        let y = space.robber_position(s);
        match *mode {
            RobberMode::Waiting => y,
            RobberMode::Evading(k) => {
                let t = self.one_cop.id_of(&[space.position(s, k), y], 1).expect("valid positions");
                self.evasion.target_at(t).unwrap_or(y)
            }
        }
    }

    fn advance(&self, space: &StateSpace, s: StateId, mode: &RobberMode, moved_to: usize) -> RobberMode {
        let mover = space.mover_of(s);
        match mode {
            RobberMode::Waiting if mover != space.robber() && moved_to != space.position(s, mover) => {
                RobberMode::Evading(mover)
            }
            m => *m,
        }
    }

    fn describe_mode(&self, mode: &RobberMode) -> Option<String> {
        Some(mode.to_string())
    }
}

/// Builds the construction from `s0` (all cops on one vertex, first cop to
/// move, robber escaping a single cop), or from the first such state in
/// index order when `s0` is `None`.
pub fn build_noncapturing_ne(space: &StateSpace, s0: Option<StateId>) -> Result<NonCapturingNe, EquilibriumError> {
    let graph = space.graph();
    let one_cop = StateSpace::new(graph, 2)?;
    let table = exact_capture_times(&one_cop);
    let escapes = |x: usize, y: usize| {
        let t = one_cop.id_of(&[x, y], 0).expect("valid positions");
        one_cop.is_noncapture(t) && !table.get(t).is_finite()
    };
    let s0 = match s0 {
        Some(s) => {
            if !space.is_noncapture(s) || space.mover_of(s) != 0 {
                return Err(EquilibriumError::Precondition(format!(
                    "{} is not a non-capture state with the first cop to move",
                    space.display(s)
                )));
            }
            let x = space.position(s, 0);
            if (1..space.cops()).any(|c| space.position(s, c) != x) {
                return Err(EquilibriumError::Precondition(format!("cops are not stacked in {}", space.display(s))));
            }
            if !escapes(x, space.robber_position(s)) {
                return Err(EquilibriumError::Precondition(format!("a single cop captures from {}", space.display(s))));
            }
            s
        }
        None => {
            let n = graph.vertex_count();
            let (x, y) =
                (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).find(|&(x, y)| escapes(x, y)).ok_or_else(|| {
                    EquilibriumError::NotApplicable("one cop captures from every start (cop number 1)".into())
                })?;
            let mut positions = vec![x; space.players()];
            positions[space.robber()] = y;
            space.id_of(&positions, 0)?
        }
    };
    Ok(NonCapturingNe { s0, dist: graph.distance_matrix(), evasion: optimal_profile(&one_cop, &table), one_cop })
}

#[derive(Debug, Clone, Serialize)]
pub struct NonCapturingVerification {
    pub s0: String,
    pub termination: Termination,
    pub capture_time: CaptureTime,
    pub gains: Vec<f64>,
    pub is_ne: bool,
}

/// Plays the construction and computes every player's best unilateral
/// deviation against the others' automata.
pub fn verify_noncapturing_ne(
    space: &StateSpace,
    params: &GameParams,
    ne: &NonCapturingNe,
    tol: f64,
) -> Result<NonCapturingVerification, EquilibriumError> {
    let trace = run(space, ne, ne.s0, DEFAULT_TURN_CAP)?;
    let gains = unilateral_gaps(space, params, ne, ne.s0)?;
    let is_ne = trace.termination == Termination::CycleCertified && gains.iter().all(|&g| g <= tol);
    Ok(NonCapturingVerification {
        s0: space.display(ne.s0),
        termination: trace.termination,
        capture_time: trace.capture_time,
        gains,
        is_ne,
    })
}

/// A start from which the robber, playing optimal evasion, is never caught
/// whatever the cops do.
#[derive(Debug, Clone, Serialize)]
pub struct EscapeCertificate {
    pub s0: String,
    #[serde(skip)]
    pub state: StateId,
    /// States reachable from `s0` under arbitrary cop moves and optimal
    /// evasion; none is a capture state.
    pub reachable_states: usize,
}

/// Looks for a start with the first cop to move from which the `N − 1` cops
/// cannot capture, and certifies it by exploring every cop behavior against
/// the canonical optimal evasion.
pub fn robber_escape_certificate(space: &StateSpace) -> Option<EscapeCertificate> {
    let table = exact_capture_times(space);
    let evasion = optimal_profile(space, &table);
    let robber = space.robber();
    let s0 = space
        .nonterminal_states()
        .find(|&s| space.is_noncapture(s) && space.mover_of(s) == 0 && !table.get(s).is_finite())?;
    let mut seen = vec![false; space.len()];
    let mut queue = VecDeque::from([s0]);
    seen[s0] = true;
    let mut count = 0;
    while let Some(s) = queue.pop_front() {
        count += 1;
        if !space.is_noncapture(s) {
            return None;
        }
        let nexts: Vec<StateId> = if space.mover_of(s) == robber {
            vec![evasion.next(space, s)]
        } else {
            space.moves(s).map(|(_, t)| t).collect()
        };
        for t in nexts {
            if !seen[t] {
                seen[t] = true;
                queue.push_back(t);
            }
        }
    }
    Some(EscapeCertificate { s0: space.display(s0), state: s0, reachable_states: count })
}

/// Cops chase the robber greedily along shortest paths (lowest vertex on
/// ties); the robber follows a positional profile. Optionally one cop makes
/// a fixed first move before chasing.
#[derive(Debug, Clone)]
pub struct PursuitProfile {
    dist: Vec<Vec<usize>>,
    robber: PositionalProfile,
    detour: Option<(usize, usize)>,
}

impl PursuitProfile {
    pub fn greedy(space: &StateSpace, robber: PositionalProfile) -> Self {
        PursuitProfile { dist: space.graph().distance_matrix(), robber, detour: None }
    }

    /// Greedy cops against the canonical optimal evasion.
    pub fn against_optimal_robber(space: &StateSpace) -> Self {
        Self::greedy(space, cr_optimal_profile(space))
    }

    /// `cop`'s first move goes to `vertex`.
    pub fn with_detour(mut self, cop: usize, vertex: usize) -> Self {
        self.detour = Some((cop, vertex));
        self
    }
}

impl Strategy for PursuitProfile {
    /// Whether the detour has been taken.
    type Mode = bool;

    fn initial_mode(&self, _: &StateSpace, _: StateId) -> bool {
        false
    }

    fn target(&self, space: &StateSpace, s: StateId, done: &bool) -> usize {
        let mover = space.mover_of(s);
        if mover == space.robber() {
            return self.robber.target_at(s).expect("non-capture state");
        }
        match self.detour {
            Some((cop, v)) if cop == mover && !done => v,
            _ => step_towards(space, &self.dist, space.position(s, mover), space.robber_position(s)),
        }
    }

    fn advance(&self, space: &StateSpace, s: StateId, done: &bool, _: usize) -> bool {
        *done || self.detour.is_some_and(|(cop, _)| cop == space.mover_of(s))
    }
}
