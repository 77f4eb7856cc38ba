use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};

use rayon::prelude::*;
use serde::Serialize;

use super::best_response::single_controller_values;
use super::{EquilibriumError, NonConvergence};
use crate::cr::{exact_capture_times, improves, optimal_profile, sweep_bound, t_n_max};
use crate::payoffs::{turn_payoff, validate_params, GameParams};
use crate::profile::PositionalProfile;
use crate::state::{StateId, StateSpace};

/// Result of checking a positional profile against every unilateral
/// deviation, from every initial state.
#[derive(Debug, Clone, Serialize)]
pub struct PositionalVerification {
    /// Per player: largest gain of a best response over all initial states.
    pub gaps: Vec<f64>,
    /// Per player: an initial state attaining that gain.
    pub worst_states: Vec<String>,
    pub is_ne: bool,
    pub tol: f64,
    #[serde(skip)]
    state_gaps: Vec<Vec<f64>>,
}

impl PositionalVerification {
    pub fn gap_at(&self, player: usize, s: StateId) -> f64 {
        self.state_gaps[player][s]
    }

    /// Largest gain of any player when play starts at `s`.
    pub fn max_gap_from(&self, s: StateId) -> f64 {
        self.state_gaps.iter().map(|g| g[s]).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_ne_from(&self, s: StateId) -> bool {
        self.max_gap_from(s) <= self.tol
    }

    pub fn max_gap(&self) -> f64 {
        self.gaps.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Freezes all but one player at a time and compares the frozen player's
/// optimal MDP value with what the profile pays it.
pub fn verify_positional_ne(
    space: &StateSpace,
    params: &GameParams,
    profile: &PositionalProfile,
    tol: f64,
) -> PositionalVerification {
    let u = profile.payoffs(space, params);
    let state_gaps: Vec<Vec<f64>> = (0..space.players())
        .into_par_iter()
        .map(|n| {
            let best = single_controller_values(space, params, n, profile);
            best.values.iter().zip(&u[n]).map(|(b, v)| b - v).collect()
        })
        .collect();
    let mut gaps = Vec::new();
    let mut worst_states = Vec::new();
    for g in &state_gaps {
        let (arg, max) =
            g.iter().enumerate().fold((0, f64::NEG_INFINITY), |acc, (s, &x)| if x > acc.1 { (s, x) } else { acc });
        gaps.push(max);
        worst_states.push(space.display(arg));
    }
    let is_ne = gaps.iter().all(|&g| g <= tol);
    PositionalVerification { gaps, worst_states, is_ne, tol, state_gaps }
}

/// Largest violation of the equilibrium equations by `(profile, values)`:
/// the prescribed move must attain the mover's maximum of `γ·u(successor)`
/// and every player's value must equal the discounted value of the
/// prescribed successor (the turn payoff at capture states).
pub fn equation_residual(
    space: &StateSpace,
    params: &GameParams,
    profile: &PositionalProfile,
    values: &[Vec<f64>],
) -> f64 {
    let gamma = params.gamma;
    let mut worst: f64 = 0.0;
    for s in 0..space.len() {
        if space.is_terminal(s) {
            for u in values {
                worst = worst.max(u[s].abs());
            }
        } else if space.is_capture(s) {
            for (m, u) in values.iter().enumerate() {
                worst = worst.max((u[s] - turn_payoff(space, params, s, m)).abs());
            }
        } else {
            let n = space.mover_of(s);
            let next = profile.next(space, s);
            let best = space.moves(s).map(|(_, t)| gamma * values[n][t]).fold(f64::NEG_INFINITY, f64::max);
            worst = worst.max(best - gamma * values[n][next]);
            for u in values {
                worst = worst.max((u[s] - gamma * u[next]).abs());
            }
        }
    }
    worst
}

/// Whether no mover can strictly improve on its prescribed move, judged by
/// the scale-free comparison used for every argmax. Unlike the absolute
/// equation residual this also sees payoffs far below the tolerance.
fn is_greedy(space: &StateSpace, params: &GameParams, profile: &PositionalProfile, values: &[Vec<f64>]) -> bool {
    space.nonterminal_states().filter(|&s| space.is_noncapture(s)).all(|s| {
        let n = space.mover_of(s);
        let prescribed = params.gamma * values[n][profile.next(space, s)];
        space.moves(s).all(|(_, t)| !improves(params.gamma * values[n][t], prescribed))
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PositionalNe {
    #[serde(skip)]
    pub profile: PositionalProfile,
    /// Exact payoffs of the profile, `values[player][state]`.
    #[serde(skip)]
    pub values: Vec<Vec<f64>>,
    pub sweeps: usize,
    /// Sup-norm change of the last sweep.
    pub iteration_residual: f64,
    pub equation_residual: f64,
    pub verification: PositionalVerification,
}

struct Sweep {
    values: Vec<Vec<f64>>,
    targets: Vec<u32>,
}

/// One synchronous sweep: every mover picks the first move maximizing its
/// own discounted successor value, and all players inherit the discounted
/// values of the chosen successor.
fn sweep(space: &StateSpace, params: &GameParams, boundary: &[Vec<f64>], u: &[Vec<f64>]) -> Sweep {
    let players = space.players();
    let mut values = vec![vec![0.0; space.len()]; players];
    let mut targets = vec![u32::MAX; space.len()];
    for s in space.nonterminal_states() {
        if space.is_capture(s) {
            for m in 0..players {
                values[m][s] = boundary[m][s];
            }
            continue;
        }
        let n = space.mover_of(s);
        let mut best: Option<(usize, usize, f64)> = None;
        for (to, next) in space.moves(s) {
            let x = params.gamma * u[n][next];
            if best.is_none_or(|(_, _, b)| improves(x, b)) {
                best = Some((to, next, x));
            }
        }
        let (to, next, _) = best.expect("closed neighborhoods are non-empty");
        targets[s] = to as u32;
        for m in 0..players {
            values[m][s] = params.gamma * u[m][next];
        }
    }
    Sweep { values, targets }
}

fn fingerprint(targets: &[u32], values: &[Vec<f64>]) -> u64 {
    let mut h = DefaultHasher::new();
    targets.hash(&mut h);
    for v in values {
        for x in v {
            x.to_bits().hash(&mut h);
        }
    }
    h.finish()
}

fn profile_from_targets(space: &StateSpace, targets: &[u32]) -> PositionalProfile {
    PositionalProfile::from_fn(space, |s| targets[s] as usize)
}

/// Iterates the equilibrium equations from zero values. Convergence needs a
/// small value change and an unchanged profile for several sweeps; the
/// profile is then re-evaluated exactly, checked against the equation
/// system and verified against all unilateral deviations. Nothing
/// unverified is ever returned.
pub fn solve_positional_ne(space: &StateSpace, params: &GameParams) -> Result<PositionalNe, EquilibriumError> {
    validate_params(params)?;
    params.check_players(space)?;
    let tol = params.tol.value;
    let cap = params.tol.sweep_cap.unwrap_or(10 * sweep_bound(params.gamma, tol));
    let boundary: Vec<Vec<f64>> =
        (0..space.players()).map(|m| (0..space.len()).map(|s| turn_payoff(space, params, s, m)).collect()).collect();

    let mut u = vec![vec![0.0; space.len()]; space.players()];
    let mut targets: Vec<u32> = Vec::new();
    let mut stable = 0;
    let mut sweeps = 0;
    let mut residual = f64::INFINITY;
    let mut seen: HashMap<u64, usize> = HashMap::new();
    loop {
        if sweeps >= cap {
            return Err(EquilibriumError::NonConvergence { sweeps, witness: NonConvergence::CapHit { residual } });
        }
        let next = sweep(space, params, &boundary, &u);
        residual = u.iter().zip(&next.values).map(|(a, b)| crate::cr::sup_distance(a, b)).fold(0.0, f64::max);
        stable = if next.targets == targets { stable + 1 } else { 0 };
        u = next.values;
        targets = next.targets;
        sweeps += 1;

        if residual <= tol && stable >= params.tol.stable_sweeps {
            let profile = profile_from_targets(space, &targets);
            let exact = profile.payoffs(space, params);
            let equation_residual = equation_residual(space, params, &profile, &exact);
            if equation_residual <= tol && is_greedy(space, params, &profile, &exact) {
                let verification = verify_positional_ne(space, params, &profile, params.tol.ne_gap);
                if !verification.is_ne {
                    return Err(EquilibriumError::NotAnEquilibrium {
                        max_gap: verification.max_gap(),
                        residual: equation_residual,
                    });
                }
                return Ok(PositionalNe {
                    profile,
                    values: exact,
                    sweeps,
                    iteration_residual: residual,
                    equation_residual,
                    verification,
                });
            }
            // Under its exact values the candidate is not greedy: iterated
            // values on non-capturing cycles only decay towards zero, and
            // values below the tolerance may not have propagated yet.
            // Continue from the exact values.
            u = exact;
            stable = 0;
            continue;
        }

        let key = fingerprint(&targets, &u);
        if let Some(&first) = seen.get(&key) {
            if sweeps - first > 1 {
                return Err(EquilibriumError::NonConvergence {
                    sweeps,
                    witness: NonConvergence::Cycle { first_seen: first, period: sweeps - first },
                });
            }
        }
        seen.insert(key, sweeps);
    }
}

/// The canonical optimal profile of the game in which one player moves all
/// cops (see [`crate::cr::optimal_profile`]).
pub fn cr_optimal_profile(space: &StateSpace) -> PositionalProfile {
    optimal_profile(space, &exact_capture_times(space))
}

#[derive(Debug, Clone, Serialize)]
pub struct CrOptimalReport {
    pub omega_tilde: Option<bool>,
    pub starts_checked: usize,
    /// Initial states from which some player gains more than the tolerance.
    pub failing_starts: Vec<String>,
    pub max_gap: f64,
    pub is_ne_everywhere: bool,
    pub verification: PositionalVerification,
}

/// Verifies the canonical optimal pursuit/evasion profile as an equilibrium
/// from every initial state. Requires the cops to capture from everywhere.
pub fn check_cr_optimal_ne(space: &StateSpace, params: &GameParams) -> Result<CrOptimalReport, EquilibriumError> {
    let report = validate_params(params)?;
    params.check_players(space)?;
    let table = exact_capture_times(space);
    if !t_n_max(space, &table).is_finite() {
        return Err(EquilibriumError::Precondition(format!(
            "{} cops cannot capture from every state of this graph",
            space.cops()
        )));
    }
    let profile = optimal_profile(space, &table);
    let verification = verify_positional_ne(space, params, &profile, params.tol.ne_gap);
    let failing_starts: Vec<String> =
        space.nonterminal_states().filter(|&s| !verification.is_ne_from(s)).map(|s| space.display(s)).collect();
    Ok(CrOptimalReport {
        omega_tilde: report.omega_tilde,
        starts_checked: space.len() - 1,
        is_ne_everywhere: failing_starts.is_empty(),
        failing_starts,
        max_gap: verification.max_gap(),
        verification,
    })
}
