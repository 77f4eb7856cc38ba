use rayon::prelude::*;

use crate::cr::{ValueSolution, ZeroSumGame};
use crate::payoffs::{turn_payoff, GameParams};
use crate::profile::PositionalProfile;
use crate::state::{StateId, StateSpace};

/// Solution of the zero-sum game in which `player` maximizes its own payoff
/// and a coalition moving every other token minimizes it.
#[derive(Debug, Clone)]
pub struct AuxSolution {
    pub player: usize,
    pub values: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
    /// Greedy strategies of both sides: at `player`'s states its own optimal
    /// move, elsewhere the coalition's.
    pub strategy: PositionalProfile,
}

fn game<'a>(
    space: &'a StateSpace,
    params: &'a GameParams,
    player: usize,
) -> ZeroSumGame<'a, impl Fn(StateId) -> f64 + 'a, impl Fn(usize) -> bool> {
    ZeroSumGame {
        space,
        gamma: params.gamma,
        boundary: move |s| turn_payoff(space, params, s, player),
        maximizes: move |m| m == player,
    }
}

/// One application of the auxiliary game's Bellman operator.
pub fn aux_bellman(space: &StateSpace, params: &GameParams, player: usize, v: &[f64]) -> Vec<f64> {
    game(space, params, player).bellman(v)
}

pub fn solve_aux_game(space: &StateSpace, params: &GameParams, player: usize) -> AuxSolution {
    let g = game(space, params, player);
    let ValueSolution { values, iterations, residual } = g.solve(params.tol.value);
    let strategy = g.greedy_profile(&values);
    AuxSolution { player, values, iterations, residual, strategy }
}

/// All `N` auxiliary games; they are independent and solved in parallel.
pub fn solve_aux_games(space: &StateSpace, params: &GameParams) -> Vec<AuxSolution> {
    (0..space.players()).into_par_iter().map(|n| solve_aux_game(space, params, n)).collect()
}
