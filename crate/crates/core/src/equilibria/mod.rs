//! Nash equilibria of the multi-player game: the positional equation system,
//! auxiliary zero-sum games, threat-strategy equilibria, the constructive
//! capturing and non-capturing equilibria, and exact verifiers for all of
//! them.
//!
//! Every argmax scans moves in ascending vertex order and keeps the first
//! maximizer (see [`crate::cr::improves`]).

mod auxiliary;
mod best_response;
mod constructions;
mod positional;
mod threat;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::payoffs::ParamError;
use crate::simulate::SimError;
use crate::state::StateError;

pub use auxiliary::{aux_bellman, solve_aux_game, solve_aux_games, AuxSolution};
pub use best_response::{best_response_value, single_controller_values, unilateral_gaps};
pub use constructions::{
    build_capturing_threat_ne, build_noncapturing_ne, robber_escape_certificate, verify_noncapturing_ne,
    CapturingThreatNe, EscapeCertificate, NonCapturingNe, NonCapturingVerification, PursuitProfile, RobberMode,
    ThreatVariant,
};
pub use positional::{
    check_cr_optimal_ne, cr_optimal_profile, equation_residual, solve_positional_ne, verify_positional_ne,
    CrOptimalReport, PositionalNe, PositionalVerification,
};
pub use threat::{
    build_threat_profile, verify_threat_ne, ThreatCheck, ThreatMode, ThreatProfile, ThreatReport, ThreatVerifier,
};

/// Why the positional iteration stopped without an equilibrium.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NonConvergence {
    /// The sweep cap was reached.
    CapHit { residual: f64 },
    /// The exact same profile and values recurred.
    Cycle { first_seen: usize, period: usize },
}

impl fmt::Display for NonConvergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NonConvergence::CapHit { residual } => write!(f, "sweep cap hit with residual {residual:e}"),
            NonConvergence::Cycle { first_seen, period } => {
                write!(f, "profile cycle of period {period} first seen at sweep {first_seen}")
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum EquilibriumError {
    #[error("positional equilibrium iteration did not converge after {sweeps} sweeps: {witness}")]
    NonConvergence { sweeps: usize, witness: NonConvergence },
    #[error("converged profile fails verification: largest gain {max_gap:e}, equation residual {residual:e}")]
    NotAnEquilibrium { max_gap: f64, residual: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Simulation(#[from] SimError),
}
