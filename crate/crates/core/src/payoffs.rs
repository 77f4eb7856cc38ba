//! Turn payoffs, discounted totals and the admissible parameter domains.

use num::{BigInt, BigRational, One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cr::CaptureTime;
use crate::simulate::{Termination, Trace};
use crate::state::{StateId, StateSpace};

/// Payoff equality tolerance for float comparisons.
pub const PAYOFF_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamError {
    #[error("discount factor gamma = {0} must lie in the open interval (0, 1)")]
    Gamma(f64),
    #[error("epsilon = {epsilon} must lie in [0, {max}]")]
    Epsilon { epsilon: f64, max: f64 },
    #[error("player count {0} must be at least 2")]
    Players(usize),
    #[error("parameters are for {params} players but the state space has {space}")]
    PlayerMismatch { params: usize, space: usize },
    #[error("trace is inconclusive (turn cap hit); no payoff is defined")]
    Inconclusive,
    #[error("the initial state must not be the terminal state")]
    TerminalStart,
}

/// How the capture reward is split between cops.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpsilonMode {
    /// Capturing cops share `1 - eps`, non-capturing cops share `eps`.
    Fixed(f64),
    /// Every cop receives `1/(N-1)` at every capture, whoever captures.
    SplitEquivalent,
}

/// Numeric tolerances and iteration caps shared by the solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Sup-norm residual at which value iteration stops.
    pub value: f64,
    /// Largest best-response gain still accepted as an equilibrium.
    pub ne_gap: f64,
    /// Sweep cap for the positional-equilibrium iteration; `None` derives it
    /// from the contraction bound.
    pub sweep_cap: Option<usize>,
    /// Consecutive sweeps with an unchanged profile required for convergence.
    pub stable_sweeps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { value: 1e-10, ne_gap: 1e-8, sweep_cap: None, stable_sweeps: 3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameParams {
    pub players: usize,
    pub gamma: f64,
    pub epsilon: EpsilonMode,
    #[serde(default)]
    pub allow_extended_epsilon: bool,
    #[serde(default)]
    pub tol: Tolerances,
}

/// Informational result of parameter validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ParamReport {
    /// Membership in the restricted domain `gamma < eps / (1 - eps)`;
    /// `None` in split-equivalent mode.
    pub omega_tilde: Option<bool>,
}

impl GameParams {
    pub fn new(players: usize, gamma: f64, epsilon: f64) -> Result<Self, ParamError> {
        let p = GameParams {
            players,
            gamma,
            epsilon: EpsilonMode::Fixed(epsilon),
            allow_extended_epsilon: false,
            tol: Tolerances::default(),
        };
        validate_params(&p)?;
        Ok(p)
    }

    pub fn split_equivalent(players: usize, gamma: f64) -> Result<Self, ParamError> {
        let p = GameParams {
            players,
            gamma,
            epsilon: EpsilonMode::SplitEquivalent,
            allow_extended_epsilon: false,
            tol: Tolerances::default(),
        };
        validate_params(&p)?;
        Ok(p)
    }

    pub fn with_tolerances(mut self, tol: Tolerances) -> Self {
        self.tol = tol;
        self
    }

    pub fn epsilon_value(&self) -> Option<f64> {
        match self.epsilon {
            EpsilonMode::Fixed(e) => Some(e),
            EpsilonMode::SplitEquivalent => None,
        }
    }

    pub fn max_epsilon(&self) -> f64 {
        if self.allow_extended_epsilon {
            1.0
        } else {
            1.0 / (self.players - 1) as f64
        }
    }

    /// Strict `gamma < eps/(1-eps)`; the boundary is outside.
    pub fn in_omega_tilde(&self) -> Option<bool> {
        self.epsilon_value().map(|e| in_omega_tilde(self.gamma, e))
    }

    pub fn check_players(&self, space: &StateSpace) -> Result<(), ParamError> {
        if self.players == space.players() {
            Ok(())
        } else {
            Err(ParamError::PlayerMismatch { params: self.players, space: space.players() })
        }
    }

    /// Reward of a cop at a capture state with `capturing` capturing cops.
    pub fn cop_share(&self, capturing: usize, is_capturing: bool) -> f64 {
        let cops = self.players - 1;
        if capturing == 0 {
            return 0.0;
        }
        match self.epsilon {
            EpsilonMode::SplitEquivalent => 1.0 / cops as f64,
            EpsilonMode::Fixed(_) if capturing == cops => 1.0 / cops as f64,
            EpsilonMode::Fixed(e) if is_capturing => (1.0 - e) / capturing as f64,
            EpsilonMode::Fixed(e) => e / (cops - capturing) as f64,
        }
    }
}

/// At `eps = 1` the bound is `+inf` and every `gamma` qualifies.
pub fn in_omega_tilde(gamma: f64, epsilon: f64) -> bool {
    gamma < epsilon / (1.0 - epsilon)
}

pub fn validate_params(params: &GameParams) -> Result<ParamReport, ParamError> {
    if params.players < 2 {
        return Err(ParamError::Players(params.players));
    }
    if !(params.gamma > 0.0 && params.gamma < 1.0) {
        return Err(ParamError::Gamma(params.gamma));
    }
    if let EpsilonMode::Fixed(e) = params.epsilon {
        let max = params.max_epsilon();
        if !(0.0..=max).contains(&e) {
            return Err(ParamError::Epsilon { epsilon: e, max });
        }
    }
    Ok(ParamReport { omega_tilde: params.in_omega_tilde() })
}

/// Payoff `q^n(s)` of player `n` at state `s`.
pub fn turn_payoff(space: &StateSpace, params: &GameParams, s: StateId, n: usize) -> f64 {
    capture_payoff(params, space.capture_mask(s), n)
}

/// Turn payoff at a state with the given capture mask.
pub fn capture_payoff(params: &GameParams, mask: u32, n: usize) -> f64 {
    if mask == 0 {
        return 0.0;
    }
    if n == params.players - 1 {
        return -1.0;
    }
    params.cop_share(mask.count_ones() as usize, mask & (1 << n) != 0)
}

/// `gamma^t`, with an infinite capture time mapped to zero.
pub fn discount(gamma: f64, t: CaptureTime) -> f64 {
    match t {
        CaptureTime::Finite(t) => gamma.powi(t as i32),
        CaptureTime::Never => 0.0,
    }
}

/// Discounted total `Q^n` of a terminated trace. Only the capture state
/// carries a non-zero turn payoff, so the sum collapses to one term.
pub fn total_payoff(params: &GameParams, trace: &Trace, n: usize) -> Result<f64, ParamError> {
    match trace.termination {
        Termination::TurnCapHit => Err(ParamError::Inconclusive),
        Termination::CycleCertified => Ok(0.0),
        Termination::Captured => {
            Ok(discount(params.gamma, trace.capture_time) * capture_payoff(params, trace.capture_mask(), n))
        }
    }
}

/// Human-readable split of one player at a capture, e.g. `(1−ε)` or `ε/2`.
pub fn symbolic_share(players: usize, mask: u32, n: usize, split_equivalent: bool) -> String {
    let cops = players - 1;
    if n == cops {
        return "−1".into();
    }
    let k = mask.count_ones() as usize;
    if split_equivalent || k == cops {
        return if cops == 1 { "1".into() } else { format!("1/{cops}") };
    }
    if mask & (1 << n) != 0 {
        if k == 1 {
            "(1−ε)".into()
        } else {
            format!("(1−ε)/{k}")
        }
    } else if cops - k == 1 {
        "ε".into()
    } else {
        format!("ε/{}", cops - k)
    }
}

/// Symbolic total payoff such as `γ^5·ε` or `−γ^13`.
pub fn symbolic_total(players: usize, mask: u32, n: usize, t: u32, split_equivalent: bool) -> String {
    let share = symbolic_share(players, mask, n, split_equivalent);
    match share.as_str() {
        "−1" => format!("−γ^{t}"),
        "1" => format!("γ^{t}"),
        s => format!("γ^{t}·{s}"),
    }
}

/// Exact rational arithmetic for the closed-form payoffs. Floats are
/// converted by their exact binary expansion.
pub mod exact {
    use super::*;

    pub fn rational(x: f64) -> BigRational {
        BigRational::from_float(x).expect("finite float")
    }

    #[derive(Debug, Clone)]
    pub struct ExactParams {
        pub players: usize,
        pub gamma: BigRational,
        pub epsilon: Option<BigRational>,
    }

    impl ExactParams {
        pub fn from_params(p: &GameParams) -> Self {
            ExactParams { players: p.players, gamma: rational(p.gamma), epsilon: p.epsilon_value().map(rational) }
        }

        pub fn share(&self, mask: u32, n: usize) -> BigRational {
            let cops = self.players - 1;
            let k = mask.count_ones() as usize;
            let int = |v: usize| BigRational::from_integer(BigInt::from(v));
            if k == 0 {
                return BigRational::zero();
            }
            if n == cops {
                return -BigRational::one();
            }
            match &self.epsilon {
                None => BigRational::one() / int(cops),
                Some(_) if k == cops => BigRational::one() / int(cops),
                Some(e) if mask & (1 << n) != 0 => (BigRational::one() - e) / int(k),
                Some(e) => e / int(cops - k),
            }
        }

        pub fn total(&self, t: CaptureTime, mask: u32, n: usize) -> BigRational {
            match t {
                CaptureTime::Never => BigRational::zero(),
                CaptureTime::Finite(t) => num::pow(self.gamma.clone(), t as usize) * self.share(mask, n),
            }
        }
    }

    /// `true` iff `a > b` exactly.
    pub fn greater(a: &BigRational, b: &BigRational) -> bool {
        (a - b).is_positive()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= PAYOFF_TOL
    }

    #[test]
    fn three_player_splits() {
        let sp = StateSpace::new(&Graph::path(4), 3).unwrap();
        let p = GameParams::new(3, 0.9, 0.25).unwrap();
        // C2 alone on the robber
        let s = sp.parse_state("1,3,3,1").unwrap();
        assert!(close(turn_payoff(&sp, &p, s, 0), 0.25));
        assert!(close(turn_payoff(&sp, &p, s, 1), 0.75));
        assert!(close(turn_payoff(&sp, &p, s, 2), -1.0));
        let both = sp.parse_state("2,2,2,3").unwrap();
        assert!(close(turn_payoff(&sp, &p, both, 0), 0.5));
        assert!(close(turn_payoff(&sp, &p, both, 1), 0.5));
        let none = sp.parse_state("1,2,3,3").unwrap();
        assert!((0..3).all(|n| turn_payoff(&sp, &p, none, n) == 0.0));
        assert!((0..3).all(|n| turn_payoff(&sp, &p, sp.terminal(), n) == 0.0));
    }

    #[test]
    fn four_player_splits() {
        let sp = StateSpace::new(&Graph::path(3), 4).unwrap();
        let p = GameParams::new(4, 0.5, 0.3).unwrap();
        let s = sp.parse_state("2,1,3,2,1").unwrap();
        assert!(close(turn_payoff(&sp, &p, s, 0), 0.7));
        assert!(close(turn_payoff(&sp, &p, s, 1), 0.15));
        assert!(close(turn_payoff(&sp, &p, s, 2), 0.15));
        let q = GameParams::split_equivalent(4, 0.5).unwrap();
        for n in 0..3 {
            assert!(close(turn_payoff(&sp, &q, s, n), 1.0 / 3.0));
        }
    }

    #[test]
    fn validation() {
        let p = GameParams::new(3, 0.9, 0.25).unwrap();
        assert_eq!(validate_params(&p).unwrap().omega_tilde, Some(false));
        let p = GameParams::new(3, 0.2, 0.5).unwrap();
        assert_eq!(validate_params(&p).unwrap().omega_tilde, Some(true));
        assert!(matches!(GameParams::new(3, 1.0, 0.25), Err(ParamError::Gamma(_))));
        assert!(matches!(GameParams::new(3, 0.0, 0.25), Err(ParamError::Gamma(_))));
        assert!(matches!(GameParams::new(3, 0.5, 0.6), Err(ParamError::Epsilon { .. })));
        assert!(GameParams::new(3, 0.5, 0.0).is_ok());
        assert!(GameParams::new(4, 0.5, 1.0 / 3.0).is_ok());
        let mut ext = GameParams::new(3, 0.5, 0.5).unwrap();
        ext.epsilon = EpsilonMode::Fixed(0.9);
        assert!(validate_params(&ext).is_err());
        ext.allow_extended_epsilon = true;
        assert!(validate_params(&ext).is_ok());
    }

    #[test]
    fn omega_tilde_boundary_is_excluded() {
        // eps/(1-eps) = 1/3 exactly representable as the same float expression
        let e = 0.25;
        let g = e / (1.0 - e);
        assert!(!in_omega_tilde(g, e));
        assert!(in_omega_tilde(g - 1e-9, e));
        assert!(!in_omega_tilde(0.5, 0.0));
    }

    #[test]
    fn symbolic_forms() {
        assert_eq!(symbolic_total(3, 0b10, 0, 5, false), "γ^5·ε");
        assert_eq!(symbolic_total(3, 0b10, 1, 5, false), "γ^5·(1−ε)");
        assert_eq!(symbolic_total(3, 0b10, 2, 5, false), "−γ^5");
        assert_eq!(symbolic_total(3, 0b11, 0, 2, false), "γ^2·1/2");
        assert_eq!(symbolic_total(4, 0b001, 2, 3, false), "γ^3·ε/2");
        assert_eq!(symbolic_total(2, 0b1, 0, 3, false), "γ^3");
    }

    #[test]
    fn exact_shares_sum_to_zero() {
        let p = GameParams::new(4, 0.9, 0.2).unwrap();
        let x = exact::ExactParams::from_params(&p);
        for mask in 1u32..8 {
            let sum: BigRational = (0..4).map(|n| x.share(mask, n)).sum();
            assert!(sum.is_zero(), "mask {mask:b}");
        }
    }
}
