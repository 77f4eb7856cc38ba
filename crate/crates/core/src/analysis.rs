//! Experiments over parameter grids: the selfish cop number, theorem
//! suites with replayable counterexamples, the split-equivalent payoff
//! battery, CSV sweeps and the delayed-capture worked example.
//!
//! Claims quantified over a continuum of `(gamma, eps)` are only ever
//! *sampled* on a finite grid; reports say so in their `scope` field.

use std::collections::HashSet;
use std::fmt::{self, Write as _};
use std::io;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cr::{cop_number, exact_capture_times, t_n_max, CaptureTime, CopNumber};
use crate::equilibria::{
    build_capturing_threat_ne, build_noncapturing_ne, build_threat_profile, check_cr_optimal_ne, cr_optimal_profile,
    robber_escape_certificate, solve_positional_ne, verify_noncapturing_ne, verify_positional_ne, EquilibriumError,
    EscapeCertificate, PursuitProfile, ThreatVerifier,
};
use crate::graph::Graph;
use crate::payoffs::exact::{greater, ExactParams};
use crate::payoffs::{symbolic_total, GameParams, ParamError};
use crate::profile::{Outcome, PositionalProfile};
use crate::scenario::{Scenario, ScenarioError};
use crate::simulate::{payoffs_of, render_turn_table, run, SimError, Trace, DEFAULT_TURN_CAP};
use crate::state::{StateError, StateId, StateSpace};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error(transparent)]
    Equilibrium(#[from] EquilibriumError),
    #[error(transparent)]
    Simulation(#[from] SimError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("csv output failed: {0}")]
    Csv(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl From<csv::Error> for AnalysisError {
    fn from(e: csv::Error) -> Self {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => AnalysisError::Io(io),
            other => AnalysisError::Csv(format!("{other:?}")),
        }
    }
}

/// Discount factors of the default grid; 0.99 probes the near-undiscounted
/// regime.
pub const DEFAULT_GAMMAS: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.99];

/// Grid points closer than this to the boundary `gamma = eps/(1-eps)` are
/// dropped from default grids.
pub const BOUNDARY_EXCLUSION: f64 = 1e-6;

/// A Cartesian `(gamma, eps)` grid with an optional list of 1-based initial
/// states (all non-terminal states when `None`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub gammas: Vec<f64>,
    pub epsilons: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub starts: Option<Vec<String>>,
    #[serde(default)]
    pub exclude_boundary: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridPoint {
    pub gamma: f64,
    pub epsilon: f64,
    pub omega_tilde: bool,
}

impl SweepGrid {
    /// Five discount factors against five evenly spaced splits covering
    /// `[0, 1/(N-1)]`, both endpoints included.
    pub fn default_for(players: usize) -> Self {
        let max = 1.0 / (players - 1) as f64;
        SweepGrid {
            gammas: DEFAULT_GAMMAS.to_vec(),
            epsilons: (0..5).map(|i| max * i as f64 / 4.0).collect(),
            starts: None,
            exclude_boundary: true,
        }
    }

    pub fn new(gammas: Vec<f64>, epsilons: Vec<f64>) -> Self {
        SweepGrid { gammas, epsilons, starts: None, exclude_boundary: false }
    }

    /// Points in row-major order (`gamma` outer).
    pub fn points(&self) -> Vec<GridPoint> {
        let mut out = Vec::new();
        for &gamma in &self.gammas {
            for &epsilon in &self.epsilons {
                if self.exclude_boundary
                    && epsilon < 1.0
                    && (gamma - epsilon / (1.0 - epsilon)).abs() < BOUNDARY_EXCLUSION
                {
                    continue;
                }
                out.push(GridPoint { gamma, epsilon, omega_tilde: crate::payoffs::in_omega_tilde(gamma, epsilon) });
            }
        }
        out
    }

    /// Parameters for every point, validated for `players`.
    pub fn params(&self, players: usize, allow_extended: bool) -> Result<Vec<GameParams>, ParamError> {
        self.points()
            .into_iter()
            .map(|p| {
                let params = GameParams {
                    players,
                    gamma: p.gamma,
                    epsilon: crate::payoffs::EpsilonMode::Fixed(p.epsilon),
                    allow_extended_epsilon: allow_extended,
                    tol: Default::default(),
                };
                crate::payoffs::validate_params(&params).map(|_| params)
            })
            .collect()
    }

    pub fn start_states(&self, space: &StateSpace) -> Result<Vec<StateId>, StateError> {
        match &self.starts {
            None => Ok(space.nonterminal_states().collect()),
            Some(list) => list
                .iter()
                .map(|text| {
                    let s = space.parse_state(text)?;
                    if space.is_terminal(s) {
                        Err(StateError::InvalidState(text.clone()))
                    } else {
                        Ok(s)
                    }
                })
                .collect(),
        }
    }
}

// ---------------------------------------------------------------------------
// Selfish cop number

#[derive(Debug, Clone, Serialize)]
pub struct CapturingCheck {
    pub gamma: f64,
    pub epsilon: f64,
    pub starts_checked: usize,
    pub is_ne: bool,
    pub captures_everywhere: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SelfishVerification {
    /// With `c` cops: a capturing threat equilibrium from every start, per
    /// sampled grid point.
    pub capturing: Vec<CapturingCheck>,
    /// Cops in the escape check, `c - 1`.
    pub escape_cops: usize,
    /// With `c - 1 >= 1` cops: a start from which no equilibrium captures.
    pub escape: Option<EscapeCertificate>,
    pub contradiction: bool,
    pub scope: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SelfishCopNumber {
    /// Equal to the cop number; `None` if that exceeds `max_cops`.
    pub value: Option<usize>,
    pub cop_number: CopNumber,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<SelfishVerification>,
}

/// The selfish cop number. Its value is the cop number; with `verify`, both
/// directions are exercised: capturing threat equilibria with `c` cops on
/// the sampled grid and every start, and an escape certificate with `c - 1`
/// cops.
pub fn selfish_cop_number(graph: &Graph, max_cops: usize, verify: bool) -> Result<SelfishCopNumber, AnalysisError> {
    let cop_number = cop_number(graph, max_cops)?;
    let verification = match (verify, cop_number.value) {
        (true, Some(c)) => Some(verify_selfish(graph, c)?),
        _ => None,
    };
    Ok(SelfishCopNumber { value: cop_number.value, cop_number, verification })
}

fn verify_selfish(graph: &Graph, c: usize) -> Result<SelfishVerification, AnalysisError> {
    let players = c + 1;
    let space = StateSpace::new(graph, players)?;
    let grid = SweepGrid::default_for(players);
    let mut capturing = Vec::new();
    for params in grid.params(players, false)? {
        let ne = build_capturing_threat_ne(&space, &params)?;
        let report = ne.verify(&space, &params, params.tol.ne_gap);
        capturing.push(CapturingCheck {
            gamma: params.gamma,
            epsilon: params.epsilon_value().unwrap_or(0.0),
            starts_checked: report.starts_checked,
            is_ne: report.is_ne,
            captures_everywhere: report.captures_everywhere,
        });
    }
    let escape = if c >= 2 { robber_escape_certificate(&StateSpace::new(graph, c)?) } else { None };
    let contradiction = capturing.iter().any(|x| !(x.is_ne && x.captures_everywhere)) || (c >= 2 && escape.is_none());
    let scope = format!(
        "sampled: {} (gamma, eps) points with {c} cop(s), all {} starts; escape with {} cop(s) {}",
        capturing.len(),
        space.len() - 1,
        c - 1,
        if c >= 2 { "certified exhaustively over all cop behaviors" } else { "is vacuous (no cops)" }
    );
    Ok(SelfishVerification { capturing, escape_cops: c - 1, escape, contradiction, scope })
}

// ---------------------------------------------------------------------------
// Theorem suites

/// Claims relating equilibria of the selfish game to the cop number `c` of
/// the graph, for `N` players.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremId {
    /// `c = 1`: every equilibrium captures, from every start.
    CopWinAllNeCapture,
    /// `c <= N-1`: a capturing equilibrium exists from every start.
    CapturingNeExists,
    /// `c <= N-1`, `gamma < eps/(1-eps)`: the optimal pursuit/evasion
    /// profile is an equilibrium from every start.
    OmegaTildeCrOptimal,
    /// `c >= 2`: some start admits a non-capturing equilibrium.
    NonCapturingNeExists,
    /// `c >= N`: from some start no equilibrium captures.
    RobberEscapes,
}

impl TheoremId {
    pub const ALL: [TheoremId; 5] = [
        TheoremId::CopWinAllNeCapture,
        TheoremId::CapturingNeExists,
        TheoremId::OmegaTildeCrOptimal,
        TheoremId::NonCapturingNeExists,
        TheoremId::RobberEscapes,
    ];

    pub fn claim(self) -> &'static str {
        match self {
            TheoremId::CopWinAllNeCapture => "c = 1 implies every equilibrium is capturing from every start",
            TheoremId::CapturingNeExists => "c <= N-1 implies a capturing equilibrium exists from every start",
            TheoremId::OmegaTildeCrOptimal => {
                "c <= N-1 and gamma < eps/(1-eps) imply optimal pursuit/evasion is an equilibrium from every start"
            }
            TheoremId::NonCapturingNeExists => "c >= 2 implies a non-capturing equilibrium exists from some start",
            TheoremId::RobberEscapes => "c >= N implies every equilibrium is non-capturing from some start",
        }
    }

    /// Whether the hypothesis holds for cop number `c` (`None`: larger than
    /// `N - 1`).
    pub fn applies(self, c: Option<usize>, players: usize) -> bool {
        let within = c.is_some_and(|c| c < players);
        match self {
            TheoremId::CopWinAllNeCapture => c == Some(1),
            TheoremId::CapturingNeExists => within,
            TheoremId::OmegaTildeCrOptimal => within,
            TheoremId::NonCapturingNeExists => c.is_none_or(|c| c >= 2),
            TheoremId::RobberEscapes => !within,
        }
    }

    /// Whether the claim is only made for points inside the restricted
    /// domain.
    pub fn needs_omega_tilde(self) -> bool {
        self == TheoremId::OmegaTildeCrOptimal
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TheoremId::CopWinAllNeCapture => "cop_win_all_ne_capture",
            TheoremId::CapturingNeExists => "capturing_ne_exists",
            TheoremId::OmegaTildeCrOptimal => "omega_tilde_cr_optimal",
            TheoremId::NonCapturingNeExists => "non_capturing_ne_exists",
            TheoremId::RobberEscapes => "robber_escapes",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
}

/// Result of checking one claim at one grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceOutcome {
    pub gamma: f64,
    pub epsilon: Option<f64>,
    pub pass: bool,
    pub starts_checked: usize,
    /// First start (1-based) where the claim failed.
    pub failing_start: Option<String>,
    /// Profiles that were built and checked.
    pub profiles: Vec<String>,
    pub detail: String,
}

/// Everything needed to rerun a failed instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub theorem: TheoremId,
    pub scenario: Scenario,
    pub profile: String,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct TheoremReport {
    pub theorem: TheoremId,
    pub claim: String,
    pub cop_number: Option<usize>,
    pub applicable: bool,
    pub scope: String,
    pub verdict: Verdict,
    pub instances: Vec<InstanceOutcome>,
    pub counterexamples: Vec<Counterexample>,
}

/// Checks one claim at one parameter point, regardless of whether the
/// graph satisfies its hypothesis. Deterministic: rerunning the same inputs
/// gives the same outcome.
pub fn check_instance(theorem: TheoremId, space: &StateSpace, params: &GameParams) -> InstanceOutcome {
    let mut out = InstanceOutcome {
        gamma: params.gamma,
        epsilon: params.epsilon_value(),
        pass: true,
        starts_checked: space.len() - 1,
        failing_start: None,
        profiles: Vec::new(),
        detail: String::new(),
    };
    let fail = |out: &mut InstanceOutcome, start: Option<String>, detail: String| {
        if out.pass {
            out.pass = false;
            out.failing_start = start;
            out.detail = detail;
        }
    };
    match theorem {
        TheoremId::CopWinAllNeCapture => {
            out.profiles.push("standard threat".into());
            let threat = build_threat_profile(space, params);
            let verifier = ThreatVerifier::new(space, params, &threat.punishments);
            for s in space.nonterminal_states() {
                let check = verifier.check(space, params, &threat.cooperative, s);
                if check.max_gain() <= params.tol.ne_gap && !check.capture_time.is_finite() {
                    fail(&mut out, Some(check.s0), "standard threat equilibrium does not capture".into());
                }
            }
            match build_capturing_threat_ne(space, params) {
                Ok(ne) => {
                    out.profiles.push("capturing threat".into());
                    for s in space.nonterminal_states() {
                        let check = ne.check(space, params, s);
                        if check.max_gain() <= params.tol.ne_gap && !check.capture_time.is_finite() {
                            fail(&mut out, Some(check.s0), "capturing threat equilibrium does not capture".into());
                        }
                    }
                }
                Err(e) => fail(&mut out, None, format!("capturing threat construction unavailable: {e}")),
            }
            match solve_positional_ne(space, params) {
                Ok(ne) => {
                    out.profiles.push("positional".into());
                    let outcomes = ne.profile.outcomes(space);
                    if let Some(s) = space.nonterminal_states().find(|&s| outcomes[s] == Outcome::Cycle) {
                        fail(&mut out, Some(space.display(s)), "positional equilibrium does not capture".into());
                    }
                }
                Err(e) => out.profiles.push(format!("positional ({e})")),
            }
            out.profiles.push("cr-optimal".into());
            let optimal = cr_optimal_profile(space);
            let verification = verify_positional_ne(space, params, &optimal, params.tol.ne_gap);
            let outcomes = optimal.outcomes(space);
            if let Some(s) =
                space.nonterminal_states().find(|&s| verification.is_ne_from(s) && outcomes[s] == Outcome::Cycle)
            {
                fail(&mut out, Some(space.display(s)), "optimal profile is an equilibrium but does not capture".into());
            }
            match build_noncapturing_ne(space, None) {
                Err(EquilibriumError::NotApplicable(_)) => {}
                Ok(ne) => fail(
                    &mut out,
                    Some(space.display(ne.s0)),
                    "non-capturing construction applies on a cop-win graph".into(),
                ),
                Err(e) => fail(&mut out, None, e.to_string()),
            }
        }
        TheoremId::CapturingNeExists => {
            out.profiles.push("capturing threat".into());
            match build_capturing_threat_ne(space, params) {
                Ok(ne) => {
                    for s in space.nonterminal_states() {
                        let check = ne.check(space, params, s);
                        if check.max_gain() > params.tol.ne_gap {
                            let detail = format!("deviation gains {:e}", check.max_gain());
                            fail(&mut out, Some(check.s0), detail);
                        } else if !check.capture_time.is_finite() {
                            fail(&mut out, Some(check.s0), "cooperative play does not capture".into());
                        }
                    }
                }
                Err(e) => fail(&mut out, None, e.to_string()),
            }
        }
        TheoremId::OmegaTildeCrOptimal => {
            out.profiles.push("cr-optimal".into());
            match check_cr_optimal_ne(space, params) {
                Ok(report) => {
                    if let Some(s) = report.failing_starts.first() {
                        fail(&mut out, Some(s.clone()), format!("largest deviation gain {:e}", report.max_gap));
                    }
                }
                Err(e) => fail(&mut out, None, e.to_string()),
            }
        }
        TheoremId::NonCapturingNeExists => {
            out.profiles.push("non-capturing".into());
            out.starts_checked = 1;
            match build_noncapturing_ne(space, None)
                .and_then(|ne| verify_noncapturing_ne(space, params, &ne, params.tol.ne_gap))
            {
                Ok(v) if v.is_ne => out.detail = format!("non-capturing equilibrium from {}", v.s0),
                Ok(v) => fail(
                    &mut out,
                    Some(v.s0),
                    format!(
                        "termination {:?}, largest gain {:e}",
                        v.termination,
                        v.gains.iter().copied().fold(0.0, f64::max)
                    ),
                ),
                Err(e) => fail(&mut out, None, e.to_string()),
            }
        }
        TheoremId::RobberEscapes => {
            out.starts_checked = 1;
            match robber_escape_certificate(space) {
                Some(cert) => {
                    out.profiles.push("optimal evasion".into());
                    // Consistency: the equilibrium we can build from there
                    // must indeed be non-capturing.
                    out.profiles.push("standard threat".into());
                    let threat = build_threat_profile(space, params);
                    let verifier = ThreatVerifier::new(space, params, &threat.punishments);
                    let check = verifier.check(space, params, &threat.cooperative, cert.state);
                    if check.capture_time.is_finite() && check.max_gain() <= params.tol.ne_gap {
                        fail(
                            &mut out,
                            Some(cert.s0.clone()),
                            "a capturing equilibrium exists from the escape start".into(),
                        );
                    } else {
                        out.detail = format!(
                            "robber escapes from {} ({} reachable states, none capturing)",
                            cert.s0, cert.reachable_states
                        );
                    }
                }
                None => fail(&mut out, None, "no start lets the robber escape every cop behavior".into()),
            }
        }
    }
    out
}

/// Runs every claim whose hypothesis the graph satisfies (and records the
/// others as not applicable) over the grid, exhaustively in the start
/// state where the claim quantifies over all starts.
pub fn theorem_suite(graph: &Graph, players: usize, grid: &SweepGrid) -> Result<Vec<TheoremReport>, AnalysisError> {
    let space = StateSpace::new(graph, players)?;
    let c = cop_number(graph, players - 1)?.value;
    let all_params = grid.params(players, false)?;
    let mut reports = Vec::new();
    for theorem in TheoremId::ALL {
        let applicable = theorem.applies(c, players);
        let params: Vec<&GameParams> =
            all_params.iter().filter(|p| !theorem.needs_omega_tilde() || p.in_omega_tilde() == Some(true)).collect();
        let instances: Vec<InstanceOutcome> =
            if applicable { params.iter().map(|p| check_instance(theorem, &space, p)).collect() } else { Vec::new() };
        let counterexamples = instances
            .iter()
            .zip(&params)
            .filter(|(i, _)| !i.pass)
            .map(|(i, p)| Counterexample {
                theorem,
                scenario: Scenario::inline(graph, p, i.failing_start.clone()),
                profile: i.profiles.join(", "),
                detail: i.detail.clone(),
            })
            .collect::<Vec<_>>();
        let verdict = if !applicable {
            Verdict::NotApplicable
        } else if counterexamples.is_empty() {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        let starts = match theorem {
            TheoremId::NonCapturingNeExists | TheoremId::RobberEscapes => "one exhibited start".to_string(),
            _ => format!("all {} starts", space.len() - 1),
        };
        let scope = format!(
            "sampled: {} (gamma, eps) grid points{}, {starts}; cop number {}",
            instances.len(),
            if theorem.needs_omega_tilde() { " inside the restricted domain" } else { "" },
            c.map_or_else(|| format!(">= {players}"), |c| c.to_string())
        );
        reports.push(TheoremReport {
            theorem,
            claim: theorem.claim().into(),
            cop_number: c,
            applicable,
            scope,
            verdict,
            instances,
            counterexamples,
        });
    }
    Ok(reports)
}

/// Reruns a counterexample from its embedded scenario.
pub fn replay(counterexample: &Counterexample) -> Result<InstanceOutcome, AnalysisError> {
    let resolved = counterexample.scenario.resolve(None)?;
    Ok(check_instance(counterexample.theorem, &resolved.space, &resolved.params))
}

// ---------------------------------------------------------------------------
// Split-equivalent payoff battery

#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    pub players: usize,
    pub gamma: f64,
    pub seed: u64,
    pub trials: usize,
    pub captured_trials: usize,
    /// Trials where the one-controller play differed from the multi-player
    /// play.
    pub path_mismatches: usize,
    /// Trials where the cops' payoff sum differed from the one-controller
    /// payoff (exact rational comparison).
    pub payoff_mismatches: usize,
    /// Same for the robber's payoff.
    pub robber_mismatches: usize,
    /// Whether the optimal profile is an equilibrium from every start; `None`
    /// when the cops cannot capture from everywhere.
    pub cr_optimal_is_ne: Option<bool>,
    pub cr_optimal_max_gap: Option<f64>,
}

impl EquivalenceReport {
    pub fn passed(&self) -> bool {
        self.path_mismatches == 0
            && self.payoff_mismatches == 0
            && self.robber_mismatches == 0
            && self.cr_optimal_is_ne != Some(false)
    }
}

/// A positional profile choosing a uniformly random legal move at every
/// non-capture state.
pub fn random_profile(space: &StateSpace, rng: &mut impl Rng) -> PositionalProfile {
    PositionalProfile::from_fn(space, |s| {
        let options = space.graph().closed_neighborhood(space.position(s, space.mover_of(s)));
        options[rng.gen_range(0..options.len())]
    })
}

/// Plays the profile as the two-sided game in which one controller moves
/// every cop token: returns the visited states (ending with the capture
/// state or the first repeated state) and the capture time.
fn one_controller_play(space: &StateSpace, profile: &PositionalProfile, s0: StateId) -> (Vec<StateId>, CaptureTime) {
    let mut states = vec![s0];
    let mut seen = HashSet::from([s0]);
    let mut s = s0;
    loop {
        if space.is_capture(s) {
            let t = states.len() as u32 - 1;
            return (states, CaptureTime::Finite(t));
        }
        let controller_target = profile.target_at(s).expect("non-capture state");
        s = space.successor(s, controller_target);
        states.push(s);
        if !seen.insert(s) {
            return (states, CaptureTime::Never);
        }
    }
}

/// Random profiles and starts under the split-equivalent rule: the cops'
/// summed payoff must equal the single-controller payoff `gamma^T` exactly,
/// and the robber's must match. Also verifies the optimal profile.
pub fn payoff_equivalence_check(
    graph: &Graph,
    players: usize,
    trials: usize,
    seed: u64,
    gamma: f64,
) -> Result<EquivalenceReport, AnalysisError> {
    use num::{BigRational, Zero};

    let space = StateSpace::new(graph, players)?;
    let params = GameParams::split_equivalent(players, gamma)?;
    let exact = ExactParams::from_params(&params);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = EquivalenceReport {
        players,
        gamma,
        seed,
        trials,
        captured_trials: 0,
        path_mismatches: 0,
        payoff_mismatches: 0,
        robber_mismatches: 0,
        cr_optimal_is_ne: None,
        cr_optimal_max_gap: None,
    };
    for _ in 0..trials {
        let profile = random_profile(&space, &mut rng);
        let s0 = rng.gen_range(0..space.len() - 1);
        let trace = run(&space, &profile, s0, DEFAULT_TURN_CAP)?;
        let (cr_states, cr_time) = one_controller_play(&space, &profile, s0);
        if cr_states != trace.states() || cr_time != trace.capture_time {
            report.path_mismatches += 1;
        }
        let mask = trace.capture_mask();
        let cop_sum: BigRational = (0..space.cops()).map(|n| exact.total(trace.capture_time, mask, n)).sum();
        let cr_value = match cr_time {
            CaptureTime::Finite(t) => num::pow(exact.gamma.clone(), t as usize),
            CaptureTime::Never => BigRational::zero(),
        };
        if cop_sum != cr_value {
            report.payoff_mismatches += 1;
        }
        if exact.total(trace.capture_time, mask, space.robber()) != -cr_value.clone() {
            report.robber_mismatches += 1;
        }
        if trace.is_captured() {
            report.captured_trials += 1;
        }
    }
    if t_n_max(&space, &exact_capture_times(&space)).is_finite() {
        let v = verify_positional_ne(&space, &params, &cr_optimal_profile(&space), params.tol.ne_gap);
        report.cr_optimal_is_ne = Some(v.is_ne);
        report.cr_optimal_max_gap = Some(v.max_gap());
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Sweeps

/// One CSV row of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub gamma: f64,
    pub epsilon: f64,
    pub s0: String,
    pub omega_tilde: bool,
    /// Empty when the cops cannot capture from everywhere.
    pub cr_optimal_is_ne: Option<bool>,
    pub max_gap: Option<f64>,
    /// Capture time of the capturing threat equilibrium (the standard
    /// threat profile when no capturing one exists).
    pub threat_capture_time: CaptureTime,
}

/// Classifies the optimal profile and the threat equilibrium at every grid
/// point and start. Rows are ordered by grid point, then start.
pub fn sweep(graph: &Graph, players: usize, grid: &SweepGrid) -> Result<Vec<SweepRow>, AnalysisError> {
    let space = StateSpace::new(graph, players)?;
    let starts = grid.start_states(&space)?;
    let cop_win = t_n_max(&space, &exact_capture_times(&space)).is_finite();
    let params = grid.params(players, false)?;
    let blocks: Vec<Result<Vec<SweepRow>, AnalysisError>> = params
        .par_iter()
        .map(|params| {
            let epsilon = params.epsilon_value().expect("grid points carry a fixed split");
            let omega_tilde = params.in_omega_tilde() == Some(true);
            let (verification, threat_time): (_, Box<dyn Fn(StateId) -> CaptureTime + Sync>) = if cop_win {
                let optimal = verify_positional_ne(&space, params, &cr_optimal_profile(&space), params.tol.ne_gap);
                let ne = build_capturing_threat_ne(&space, params)?;
                let space = &space;
                (Some(optimal), Box::new(move |s| ne.check(space, params, s).capture_time))
            } else {
                let threat = build_threat_profile(&space, params);
                let verifier = ThreatVerifier::new(&space, params, &threat.punishments);
                let space = &space;
                (None, Box::new(move |s| verifier.check(space, params, &threat.cooperative, s).capture_time))
            };
            Ok(starts
                .iter()
                .map(|&s| SweepRow {
                    gamma: params.gamma,
                    epsilon,
                    s0: space.display(s),
                    omega_tilde,
                    cr_optimal_is_ne: verification.as_ref().map(|v| v.is_ne_from(s)),
                    max_gap: verification.as_ref().map(|v| v.max_gap_from(s).max(0.0)),
                    threat_capture_time: threat_time(s),
                })
                .collect())
        })
        .collect();
    let mut rows = Vec::new();
    for block in blocks {
        rows.extend(block?);
    }
    Ok(rows)
}

/// Writes rows as CSV with the header
/// `gamma,epsilon,s0,omega_tilde,cr_optimal_is_ne,max_gap,threat_capture_time`.
pub fn write_sweep_csv<W: io::Write>(rows: &[SweepRow], out: W) -> Result<(), AnalysisError> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Delayed-capture example

/// Initial state of the worked example: cops at 6 and 1, robber at 4, first
/// cop to move.
pub const EXAMPLE_START: &str = "6,1,4,1";

/// 0-based (cop, vertex) of the retreat that delays capture: the first cop
/// steps to vertex 7 instead of approaching.
pub const EXAMPLE_DETOUR: (usize, usize) = (0, 6);

#[derive(Debug, Clone, Serialize)]
pub struct ExampleTrace {
    pub table: String,
    pub capture_time: CaptureTime,
    pub capturing_set: Vec<usize>,
    pub symbolic_payoffs: Vec<String>,
    pub payoffs: Vec<f64>,
    pub trace: Trace,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExampleReport {
    pub gamma: f64,
    pub epsilon: f64,
    pub s0: String,
    pub cooperative: ExampleTrace,
    pub deviation: ExampleTrace,
    /// `(eps/(1-eps))^(1/(T_dev - T_coop))`: the first cop profits from the
    /// retreat iff `gamma` exceeds it.
    pub threshold: f64,
    /// Exact rational comparison of the first cop's two payoffs.
    pub deviation_profitable: bool,
    pub predicted_by_threshold: bool,
    pub consistent: bool,
}

impl ExampleReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (title, t) in [("Greedy pursuit", &self.cooperative), ("First cop retreats first", &self.deviation)] {
            let _ = writeln!(out, "{title} from s0 = ({}):", self.s0);
            out.push_str(&t.table);
            let captors: Vec<String> = t.capturing_set.iter().map(|c| format!("C{c}")).collect();
            let _ = writeln!(out, "T_C = {}, captured by {}", t.capture_time, captors.join(", "));
            for (n, (sym, val)) in t.symbolic_payoffs.iter().zip(&t.payoffs).enumerate() {
                let who = if n + 1 == t.payoffs.len() { "R".to_string() } else { format!("C{}", n + 1) };
                let _ = writeln!(out, "  Q({who}) = {sym} = {val:.6}");
            }
            out.push('\n');
        }
        let _ = writeln!(
            out,
            "gamma = {}, eps = {}: threshold (eps/(1-eps))^(1/{}) = {:.6}",
            self.gamma,
            self.epsilon,
            self.exponent(),
            self.threshold
        );
        let _ = writeln!(
            out,
            "{}: retreat {} for C1 ({:.6} vs {:.6}), {} with gamma {} threshold",
            if self.consistent { "PASS" } else { "FAIL" },
            if self.deviation_profitable { "is profitable" } else { "is not profitable" },
            self.deviation.payoffs[0],
            self.cooperative.payoffs[0],
            if self.consistent { "consistent" } else { "inconsistent" },
            if self.predicted_by_threshold { ">" } else { "<=" },
        );
        out
    }

    fn exponent(&self) -> u32 {
        match (self.deviation.capture_time, self.cooperative.capture_time) {
            (CaptureTime::Finite(a), CaptureTime::Finite(b)) => a - b,
            _ => 0,
        }
    }
}

fn example_trace(space: &StateSpace, params: &GameParams, trace: Trace) -> Result<ExampleTrace, AnalysisError> {
    let t = trace.capture_time.finite().unwrap_or(0);
    let mask = trace.capture_mask();
    Ok(ExampleTrace {
        table: render_turn_table(space, &trace),
        capture_time: trace.capture_time,
        capturing_set: trace.capturing_set.clone(),
        symbolic_payoffs: (0..space.players()).map(|n| symbolic_total(space.players(), mask, n, t, false)).collect(),
        payoffs: payoffs_of(params, &trace)?,
        trace,
    })
}

/// Replays the delayed-capture example on its 9-vertex graph: greedy
/// shortest-path cops against optimal evasion, then the same with the first
/// cop retreating once, and decides exactly whether the retreat pays.
pub fn reproduce_example(gamma: f64, epsilon: f64) -> Result<ExampleReport, AnalysisError> {
    let graph = Graph::delayed_capture_example();
    let space = StateSpace::new(&graph, 3)?;
    let params = GameParams::new(3, gamma, epsilon)?;
    let s0 = space.parse_state(EXAMPLE_START)?;
    let pursuit = PursuitProfile::against_optimal_robber(&space);
    let cooperative = example_trace(&space, &params, run(&space, &pursuit, s0, DEFAULT_TURN_CAP)?)?;
    let (cop, vertex) = EXAMPLE_DETOUR;
    let deviation =
        example_trace(&space, &params, run(&space, &pursuit.with_detour(cop, vertex), s0, DEFAULT_TURN_CAP)?)?;

    let exact = ExactParams::from_params(&params);
    let coop_c1 = exact.total(cooperative.capture_time, cooperative.trace.capture_mask(), 0);
    let dev_c1 = exact.total(deviation.capture_time, deviation.trace.capture_mask(), 0);
    let deviation_profitable = greater(&dev_c1, &coop_c1);

    let gap = match (deviation.capture_time, cooperative.capture_time) {
        (CaptureTime::Finite(a), CaptureTime::Finite(b)) if a > b => (a - b) as f64,
        _ => f64::NAN,
    };
    let threshold = (epsilon / (1.0 - epsilon)).powf(1.0 / gap);
    let predicted_by_threshold = gamma > threshold;
    Ok(ExampleReport {
        gamma,
        epsilon,
        s0: EXAMPLE_START.into(),
        consistent: deviation_profitable == predicted_by_threshold,
        cooperative,
        deviation,
        threshold,
        deviation_profitable,
        predicted_by_threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_spans_the_split_range() {
        let g = SweepGrid::default_for(3);
        assert_eq!(g.epsilons, vec![0.0, 0.125, 0.25, 0.375, 0.5]);
        assert_eq!(g.points().len(), 25);
        assert!(g.params(3, false).is_ok());
        let g4 = SweepGrid::default_for(4);
        assert!((g4.epsilons[4] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn boundary_points_are_dropped() {
        let mut g = SweepGrid::new(vec![1.0 / 3.0, 0.5], vec![0.25]);
        assert_eq!(g.points().len(), 2);
        g.exclude_boundary = true;
        let pts = g.points();
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].gamma, 0.5);
    }

    #[test]
    fn example_threshold_flips_the_verdict() {
        let hi = reproduce_example(0.9, 0.25).unwrap();
        assert!(hi.deviation_profitable && hi.consistent);
        let lo = reproduce_example(0.8, 0.25).unwrap();
        assert!(!lo.deviation_profitable && lo.consistent);
        let wide = reproduce_example(0.9, 0.45).unwrap();
        assert!(!wide.deviation_profitable && wide.consistent);
        assert!(hi.render().contains("PASS"));
    }

    #[test]
    fn replay_reproduces_a_failure() {
        // Outside the restricted domain the optimal profile need not be an
        // equilibrium; this instance is a genuine failure of that check.
        let graph = Graph::delayed_capture_example();
        let space = StateSpace::new(&graph, 3).unwrap();
        let params = GameParams::new(3, 0.9, 0.25).unwrap();
        let out = check_instance(TheoremId::OmegaTildeCrOptimal, &space, &params);
        assert!(!out.pass);
        let cex = Counterexample {
            theorem: TheoremId::OmegaTildeCrOptimal,
            scenario: Scenario::inline(&graph, &params, out.failing_start.clone()),
            profile: out.profiles.join(", "),
            detail: out.detail.clone(),
        };
        let text = serde_json::to_string(&cex).unwrap();
        let back: Counterexample = serde_json::from_str(&text).unwrap();
        assert_eq!(replay(&back).unwrap(), out);
    }

    #[test]
    fn sweep_rows_cover_grid_and_starts() {
        let mut grid = SweepGrid::new(vec![0.5], vec![0.0, 0.5]);
        grid.starts = Some(vec!["1,1,3,1".into(), "1,2,4,3".into()]);
        let rows = sweep(&Graph::cycle(4), 3, &grid).unwrap();
        assert_eq!(rows.len(), 4);
        let mut buf = Vec::new();
        write_sweep_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("gamma,epsilon,s0,omega_tilde,cr_optimal_is_ne,max_gap,threat_capture_time\n"));
        assert_eq!(text.lines().count(), 5);
    }
}
