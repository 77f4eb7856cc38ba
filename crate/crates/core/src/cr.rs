//! The modified cops-and-robber game: one cop-player moves every cop token,
//! the robber plays against it. Exact capture times by backward labeling,
//! cop numbers, optimal positional strategies and the discounted value.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::graph::Graph;
use crate::profile::PositionalProfile;
use crate::state::{StateError, StateId, StateSpace};

/// Capture time in turns; `Never` means the robber evades forever.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaptureTime {
    Finite(u32),
    Never,
}

impl CaptureTime {
    pub fn is_finite(&self) -> bool {
        matches!(self, CaptureTime::Finite(_))
    }

    pub fn finite(&self) -> Option<u32> {
        match self {
            CaptureTime::Finite(t) => Some(*t),
            CaptureTime::Never => None,
        }
    }
}

impl fmt::Display for CaptureTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CaptureTime::Finite(t) => write!(f, "{t}"),
            CaptureTime::Never => f.write_str("∞"),
        }
    }
}

/// Serialized as an integer, or the string `"inf"`.
impl Serialize for CaptureTime {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            CaptureTime::Finite(t) => s.serialize_u32(*t),
            CaptureTime::Never => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for CaptureTime {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(u32),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(t) => Ok(CaptureTime::Finite(t)),
            Repr::Text(t) if t == "inf" || t == "∞" => Ok(CaptureTime::Never),
            Repr::Text(t) => Err(serde::de::Error::custom(format!("invalid capture time {t:?}"))),
        }
    }
}

const UNLABELED: u32 = u32::MAX;

/// Optimal capture time of every state under optimal play of both sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaptureTimeTable {
    times: Vec<u32>,
}

impl CaptureTimeTable {
    pub fn get(&self, s: StateId) -> CaptureTime {
        match self.times[s] {
            UNLABELED => CaptureTime::Never,
            t => CaptureTime::Finite(t),
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = CaptureTime> + '_ {
        (0..self.times.len()).map(|s| self.get(s))
    }
}

/// Backward labeling from the capture states. Cop-mover states are labeled
/// by their first labeled successor, robber-mover states once every
/// successor is labeled; processing in breadth-first order makes these the
/// minimum and maximum respectively. The terminal state is unlabeled, which
/// matches its zero discounted value.
pub fn exact_capture_times(space: &StateSpace) -> CaptureTimeTable {
    let robber = space.robber();
    let mut times = vec![UNLABELED; space.len()];
    let mut pending: Vec<u32> = vec![0; space.len()];
    let mut queue = VecDeque::new();
    for s in space.nonterminal_states() {
        if space.is_capture(s) {
            times[s] = 0;
            queue.push_back(s);
        } else if space.mover_of(s) == robber {
            pending[s] = space.graph().closed_neighborhood(space.robber_position(s)).len() as u32;
        }
    }
    while let Some(s) = queue.pop_front() {
        let next = times[s] + 1;
        for p in space.predecessors(s) {
            if times[p] != UNLABELED {
                continue;
            }
            if space.mover_of(p) == robber {
                pending[p] -= 1;
                if pending[p] > 0 {
                    continue;
                }
            }
            times[p] = next;
            queue.push_back(p);
        }
    }
    CaptureTimeTable { times }
}

/// Largest optimal capture time over the non-capture states.
pub fn t_n_max(space: &StateSpace, table: &CaptureTimeTable) -> CaptureTime {
    space
        .nonterminal_states()
        .filter(|&s| space.is_noncapture(s))
        .map(|s| table.get(s))
        .max()
        .unwrap_or(CaptureTime::Finite(0))
}

/// The canonical optimal positional strategies read off the table: cop
/// tokens take the first move minimizing the successor's capture time, the
/// robber the first move maximizing it.
pub fn optimal_profile(space: &StateSpace, table: &CaptureTimeTable) -> PositionalProfile {
    let robber = space.robber();
    PositionalProfile::from_fn(space, |s| {
        let maximize = space.mover_of(s) == robber;
        let mut best: Option<(usize, CaptureTime)> = None;
        for (to, next) in space.moves(s) {
            let t = table.get(next);
            let better = match best {
                None => true,
                Some((_, b)) => (maximize && t > b) || (!maximize && t < b),
            };
            if better {
                best = Some((to, t));
            }
        }
        best.expect("closed neighborhoods are non-empty").0
    })
}

/// Everything the cop-number search learned for one cop count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CopCountVerdict {
    pub cops: usize,
    pub states: usize,
    /// Largest optimal capture time over non-capture states.
    pub t_max: CaptureTime,
    /// A non-capture state from which the robber evades forever, if any.
    pub escape_witness: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CopNumber {
    /// `None` when no cop count up to the limit suffices.
    pub value: Option<usize>,
    pub max_cops: usize,
    pub certificate: Vec<CopCountVerdict>,
}

pub fn cop_count_verdict(space: &StateSpace) -> CopCountVerdict {
    let table = exact_capture_times(space);
    let witness = space
        .nonterminal_states()
        .find(|&s| space.is_noncapture(s) && !table.get(s).is_finite())
        .map(|s| space.display(s));
    CopCountVerdict { cops: space.cops(), states: space.len(), t_max: t_n_max(space, &table), escape_witness: witness }
}

/// Least `k <= max_cops` for which `k` cops capture from every start.
pub fn cop_number(graph: &Graph, max_cops: usize) -> Result<CopNumber, StateError> {
    cop_number_with_cap(graph, max_cops, crate::state::DEFAULT_STATE_CAP)
}

pub fn cop_number_with_cap(graph: &Graph, max_cops: usize, cap: usize) -> Result<CopNumber, StateError> {
    let mut certificate = Vec::new();
    for k in 1..=max_cops {
        let space = StateSpace::with_cap(graph, k + 1, cap)?;
        let verdict = cop_count_verdict(&space);
        let done = verdict.t_max.is_finite();
        certificate.push(verdict);
        if done {
            return Ok(CopNumber { value: Some(k), max_cops, certificate });
        }
    }
    Ok(CopNumber { value: None, max_cops, certificate })
}

/// Ordering used for every float argmax: `a` beats `best` only by a margin
/// relative to their magnitude, so rescaling all payoffs by a positive
/// constant never changes the chosen action.
pub fn improves(a: f64, best: f64) -> bool {
    a - best > 1e-12 * a.abs().max(best.abs())
}

/// A two-player zero-sum discounted game on the state graph: boundary
/// values on capture states, and at every non-capture state the mover
/// either maximizes or minimizes the discounted successor value.
pub struct ZeroSumGame<'a, B, M> {
    pub space: &'a StateSpace,
    pub gamma: f64,
    /// Value at a capture state.
    pub boundary: B,
    /// Whether the given mover maximizes.
    pub maximizes: M,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValueSolution {
    pub values: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
}

/// `⌈log(tol(1−γ))/log γ⌉` plus a margin: the contraction bound on the number
/// of sweeps needed to reach `tol`.
pub fn sweep_bound(gamma: f64, tol: f64) -> usize {
    let n = ((tol * (1.0 - gamma)).ln() / gamma.ln()).ceil();
    n.max(1.0) as usize + 16
}

impl<B, M> ZeroSumGame<'_, B, M>
where
    B: Fn(StateId) -> f64,
    M: Fn(usize) -> bool,
{
    /// One synchronous application of the Bellman operator.
    pub fn bellman(&self, v: &[f64]) -> Vec<f64> {
        let space = self.space;
        let mut out = vec![0.0; space.len()];
        for s in space.nonterminal_states() {
            out[s] = if space.is_capture(s) {
                (self.boundary)(s)
            } else {
                let maximize = (self.maximizes)(space.mover_of(s));
                let mut best = if maximize { f64::NEG_INFINITY } else { f64::INFINITY };
                for (_, next) in space.moves(s) {
                    let x = v[next];
                    if (maximize && x > best) || (!maximize && x < best) {
                        best = x;
                    }
                }
                self.gamma * best
            };
        }
        out
    }

    /// Value iteration from zero; see [`iterate_to_fixpoint`].
    pub fn solve(&self, tol: f64) -> ValueSolution {
        iterate_to_fixpoint(self.space.len(), self.gamma, tol, |v| self.bellman(v))
    }

    /// Greedy positional strategies for both sides with canonical ties.
    pub fn greedy_profile(&self, values: &[f64]) -> PositionalProfile {
        let space = self.space;
        PositionalProfile::from_fn(space, |s| {
            let maximize = (self.maximizes)(space.mover_of(s));
            let mut best: Option<(usize, f64)> = None;
            for (to, next) in space.moves(s) {
                let x = self.gamma * values[next];
                let better = match best {
                    None => true,
                    Some((_, b)) => {
                        if maximize {
                            improves(x, b)
                        } else {
                            improves(-x, -b)
                        }
                    }
                };
                if better {
                    best = Some((to, x));
                }
            }
            best.expect("closed neighborhoods are non-empty").0
        })
    }
}

/// Iterates `step` from the zero vector. Rewards sit only on absorbing
/// states, so iteration normally reaches an exact floating-point fixpoint
/// after about as many sweeps as the longest optimal capture; it stops
/// there. Stopping at a small residual instead would leave values of order
/// `gamma^T` below the tolerance unpropagated (zero), and greedy strategies
/// read off them would be arbitrary. The cap is the contraction bound for
/// `tol`, or the state count if larger; the residual is reported.
pub fn iterate_to_fixpoint(
    len: usize,
    gamma: f64,
    tol: f64,
    mut step: impl FnMut(&[f64]) -> Vec<f64>,
) -> ValueSolution {
    let cap = sweep_bound(gamma, tol).max(len + 2);
    let mut values = vec![0.0; len];
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    while iterations < cap {
        let next = step(&values);
        residual = sup_distance(&next, &values);
        values = next;
        iterations += 1;
        if residual == 0.0 {
            break;
        }
    }
    ValueSolution { values, iterations, residual }
}

pub fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Discounted value of the modified game for the cop-player: one at capture,
/// `γ·max` at cop turns, `γ·min` at robber turns.
pub fn discounted_cr_value(space: &StateSpace, gamma: f64, tol: f64) -> ValueSolution {
    let robber = space.robber();
    ZeroSumGame { space, gamma, boundary: |_| 1.0, maximizes: |m: usize| m != robber }.solve(tol)
}
