use std::collections::HashMap;

use crate::cr::{iterate_to_fixpoint, ValueSolution};
use crate::payoffs::{turn_payoff, GameParams};
use crate::profile::{PositionalProfile, Strategy};
use crate::simulate::{payoffs_of, run, SimError, DEFAULT_TURN_CAP};
use crate::state::StateSpace;

/// Optimal values of `player` when everyone else follows the positional
/// profile `others`: a deterministic MDP, solved by value iteration from
/// zero. Payoffs of a single player never change sign, so the iteration is
/// monotone and reaches its fixed point exactly.
pub fn single_controller_values(
    space: &StateSpace,
    params: &GameParams,
    player: usize,
    others: &PositionalProfile,
) -> ValueSolution {
    let gamma = params.gamma;
    let boundary: Vec<f64> = (0..space.len()).map(|s| turn_payoff(space, params, s, player)).collect();
    iterate_to_fixpoint(space.len(), gamma, params.tol.value, |values| {
        let mut next = vec![0.0; space.len()];
        for s in space.nonterminal_states() {
            next[s] = if space.is_capture(s) {
                boundary[s]
            } else if space.mover_of(s) == player {
                gamma * space.moves(s).map(|(_, t)| values[t]).fold(f64::NEG_INFINITY, f64::max)
            } else {
                gamma * values[others.next(space, s)]
            };
        }
        next
    })
}

/// Best payoff `player` can secure from `s0` against the other players'
/// automata, by value iteration over the reachable (state, mode) pairs.
pub fn best_response_value<S: Strategy>(
    space: &StateSpace,
    params: &GameParams,
    strategy: &S,
    player: usize,
    s0: usize,
) -> f64 {
    let mut index: HashMap<(usize, S::Mode), usize> = HashMap::new();
    let mut nodes: Vec<(usize, S::Mode)> = Vec::new();
    let mut succ: Vec<Vec<usize>> = Vec::new();
    let start = (s0, strategy.initial_mode(space, s0));
    index.insert(start.clone(), 0);
    nodes.push(start);
    let mut i = 0;
    while i < nodes.len() {
        let (s, mode) = nodes[i].clone();
        let mut out = Vec::new();
        if space.is_noncapture(s) {
            let mover = space.mover_of(s);
            let mut visit = |to: usize| {
                let key = (space.successor(s, to), strategy.advance(space, s, &mode, to));
                let id = *index.entry(key.clone()).or_insert_with(|| {
                    nodes.push(key);
                    nodes.len() - 1
                });
                out.push(id);
            };
            if mover == player {
                for &to in space.graph().closed_neighborhood(space.position(s, mover)) {
                    visit(to);
                }
            } else {
                visit(strategy.target(space, s, &mode));
            }
        }
        succ.push(out);
        i += 1;
    }

    let gamma = params.gamma;
    let boundary: Vec<f64> = nodes.iter().map(|(s, _)| turn_payoff(space, params, *s, player)).collect();
    let solution = iterate_to_fixpoint(nodes.len(), gamma, params.tol.value, |values| {
        (0..nodes.len())
            .map(|i| {
                if succ[i].is_empty() {
                    boundary[i]
                } else {
                    gamma * succ[i].iter().map(|&j| values[j]).fold(f64::NEG_INFINITY, f64::max)
                }
            })
            .collect()
    });
    solution.values[0]
}

/// Per-player gain of the best unilateral deviation from `strategy` at `s0`.
pub fn unilateral_gaps<S: Strategy>(
    space: &StateSpace,
    params: &GameParams,
    strategy: &S,
    s0: usize,
) -> Result<Vec<f64>, SimError> {
    let trace = run(space, strategy, s0, DEFAULT_TURN_CAP)?;
    let payoffs = payoffs_of(params, &trace)?;
    Ok((0..space.players()).map(|n| best_response_value(space, params, strategy, n, s0) - payoffs[n]).collect())
}
