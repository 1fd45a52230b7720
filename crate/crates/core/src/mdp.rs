//! Exact representation and solution of finite-horizon tabular MDPs.
//!
//! Everything here is deterministic: policy evaluation and value
//! iteration share one backup routine, so evaluating the greedy policy
//! returned by [`value_iteration`] reproduces the optimal values
//! bit-for-bit.

use ndarray::{s, Array1, Array2, Array3, ArrayView1};
use std::fmt;

/// Tolerance for simplex membership checks on kernel rows and the
/// initial distribution.
pub const SIMPLEX_TOL: f64 = 1e-9;

/// A finite-horizon tabular MDP.
///
/// Transitions and rewards are indexed `(state, action, next_state)`.
/// Stage-`H` values default to zero; domains with known terminal
/// payoffs set `terminal_values` instead of folding them into rewards.
#[derive(Debug, Clone)]
pub struct TabularMdp {
    pub num_states: usize,
    pub num_actions: usize,
    /// Kernel rows: `transitions[[s, a, s']]` is the probability of
    /// landing in `s'` after taking `a` in `s`.
    pub transitions: Array3<f64>,
    /// `rewards[[s, a, s']]` is earned on that same transition.
    pub rewards: Array3<f64>,
    pub initial_dist: Array1<f64>,
    pub horizon: usize,
    pub discount: f64,
    /// Values collected at stage `H` in the final state.
    pub terminal_values: Array1<f64>,
}

impl TabularMdp {
    pub fn new(
        transitions: Array3<f64>,
        rewards: Array3<f64>,
        initial_dist: Array1<f64>,
        horizon: usize,
    ) -> Self {
        let (num_states, num_actions, next) = transitions.dim();
        assert_eq!(next, num_states, "kernel must be (S, A, S)");
        assert_eq!(rewards.dim(), transitions.dim(), "rewards must be (S, A, S)");
        assert_eq!(initial_dist.len(), num_states);
        assert!(horizon >= 1, "horizon must be at least 1");
        Self {
            num_states,
            num_actions,
            transitions,
            rewards,
            initial_dist,
            horizon,
            discount: 1.0,
            terminal_values: Array1::zeros(num_states),
        }
    }

    pub fn with_discount(mut self, discount: f64) -> Self {
        assert!((0.0..=1.0).contains(&discount), "discount must be in [0, 1]");
        self.discount = discount;
        self
    }

    pub fn with_terminal_values(mut self, terminal_values: Array1<f64>) -> Self {
        assert_eq!(terminal_values.len(), self.num_states);
        self.terminal_values = terminal_values;
        self
    }

    pub fn kernel_row(&self, state: usize, action: usize) -> ArrayView1<'_, f64> {
        self.transitions.slice(s![state, action, ..])
    }

    pub fn reward_row(&self, state: usize, action: usize) -> ArrayView1<'_, f64> {
        self.rewards.slice(s![state, action, ..])
    }
}

/// The known part of an environment: everything except the kernel.
///
/// Learning agents treat rewards, the initial distribution, the
/// horizon, and terminal values as given, and only estimate
/// transitions. Assembling a `KnownModel` with any kernel yields a
/// planning MDP.
#[derive(Debug, Clone)]
pub struct KnownModel {
    pub num_states: usize,
    pub num_actions: usize,
    pub rewards: Array3<f64>,
    pub initial_dist: Array1<f64>,
    pub horizon: usize,
    pub discount: f64,
    pub terminal_values: Array1<f64>,
}

impl KnownModel {
    pub fn from_mdp(mdp: &TabularMdp) -> Self {
        Self {
            num_states: mdp.num_states,
            num_actions: mdp.num_actions,
            rewards: mdp.rewards.clone(),
            initial_dist: mdp.initial_dist.clone(),
            horizon: mdp.horizon,
            discount: mdp.discount,
            terminal_values: mdp.terminal_values.clone(),
        }
    }

    /// Combine the known quantities with a transition kernel.
    pub fn assemble(&self, transitions: Array3<f64>) -> TabularMdp {
        TabularMdp::new(
            transitions,
            self.rewards.clone(),
            self.initial_dist.clone(),
            self.horizon,
        )
        .with_discount(self.discount)
        .with_terminal_values(self.terminal_values.clone())
    }
}

/// A nonstationary policy: one action per `(stage, state)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Policy {
    /// Indexed `[stage, state]`, stages `0..H`.
    pub actions: Array2<usize>,
}

impl Policy {
    pub fn new(actions: Array2<usize>) -> Self {
        Self { actions }
    }

    pub fn horizon(&self) -> usize {
        self.actions.nrows()
    }

    pub fn num_states(&self) -> usize {
        self.actions.ncols()
    }

    pub fn action(&self, stage: usize, state: usize) -> usize {
        self.actions[[stage, state]]
    }
}

/// Stage-indexed state values, `values[[h, s]]` for `h = 0..=H`.
/// Row `H` holds the terminal values.
#[derive(Debug, Clone, PartialEq)]
pub struct StageValues {
    pub values: Array2<f64>,
}

impl StageValues {
    pub fn horizon(&self) -> usize {
        self.values.nrows() - 1
    }

    pub fn stage(&self, h: usize) -> ArrayView1<'_, f64> {
        self.values.slice(s![h, ..])
    }

    /// The stage vectors that multiply kernel rows in a backward pass:
    /// stages `1..=H`, in stage order.
    pub fn successor_stages(&self) -> Vec<Array1<f64>> {
        (1..=self.horizon()).map(|h| self.stage(h).to_owned()).collect()
    }
}

/// A single violated invariant found by [`validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    RowSum { state: usize, action: usize, sum: f64 },
    NegativeMass { state: usize, action: usize, next_state: usize, value: f64 },
    NonFiniteReward { state: usize, action: usize, next_state: usize },
    InitialDistSum { sum: f64 },
    NegativeInitialMass { state: usize, value: f64 },
    NonFiniteTerminalValue { state: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::RowSum { state, action, sum } => {
                write!(f, "row sum {sum} at ({state},{action})")
            }
            Violation::NegativeMass { state, action, next_state, value } => {
                write!(f, "negative mass {value} at ({state},{action}) -> {next_state}")
            }
            Violation::NonFiniteReward { state, action, next_state } => {
                write!(f, "non-finite reward at ({state},{action}) -> {next_state}")
            }
            Violation::InitialDistSum { sum } => {
                write!(f, "initial distribution sums to {sum}")
            }
            Violation::NegativeInitialMass { state, value } => {
                write!(f, "negative initial mass {value} at state {state}")
            }
            Violation::NonFiniteTerminalValue { state } => {
                write!(f, "non-finite terminal value at state {state}")
            }
        }
    }
}

/// Outcome of [`validate`]: empty means the MDP is well-formed.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Diagnostic check of all structural invariants: kernel rows on the
/// simplex, initial distribution normalized, rewards finite.
pub fn validate(mdp: &TabularMdp) -> ValidationReport {
    let mut violations = Vec::new();
    for state in 0..mdp.num_states {
        for action in 0..mdp.num_actions {
            let row = mdp.kernel_row(state, action);
            let sum: f64 = row.sum();
            if (sum - 1.0).abs() > SIMPLEX_TOL {
                violations.push(Violation::RowSum { state, action, sum });
            }
            for (next_state, &value) in row.iter().enumerate() {
                if value < -SIMPLEX_TOL {
                    violations.push(Violation::NegativeMass { state, action, next_state, value });
                }
                if !mdp.rewards[[state, action, next_state]].is_finite() {
                    violations.push(Violation::NonFiniteReward { state, action, next_state });
                }
            }
        }
    }
    let p0_sum: f64 = mdp.initial_dist.sum();
    if (p0_sum - 1.0).abs() > SIMPLEX_TOL {
        violations.push(Violation::InitialDistSum { sum: p0_sum });
    }
    for (state, &value) in mdp.initial_dist.iter().enumerate() {
        if value < -SIMPLEX_TOL {
            violations.push(Violation::NegativeInitialMass { state, value });
        }
    }
    for (state, &value) in mdp.terminal_values.iter().enumerate() {
        if !value.is_finite() {
            violations.push(Violation::NonFiniteTerminalValue { state });
        }
    }
    ValidationReport { violations }
}

/// One-step expected backup: sum over next states of
/// `p * (r + discount * v_next)`. Shared by policy evaluation and
/// value iteration so greedy policies evaluate to their planning
/// values exactly.
#[inline]
fn backup(
    kernel_row: ArrayView1<'_, f64>,
    reward_row: ArrayView1<'_, f64>,
    next_values: ArrayView1<'_, f64>,
    discount: f64,
) -> f64 {
    let mut total = 0.0;
    for ((&p, &r), &v) in kernel_row.iter().zip(reward_row.iter()).zip(next_values.iter()) {
        total += p * (r + discount * v);
    }
    total
}

/// Backward-recursion evaluation of a fixed nonstationary policy.
pub fn policy_evaluation(mdp: &TabularMdp, policy: &Policy) -> StageValues {
    assert_eq!(
        (policy.horizon(), policy.num_states()),
        (mdp.horizon, mdp.num_states),
        "policy dimensions must match (H, S)"
    );
    let horizon = mdp.horizon;
    let mut values = Array2::zeros((horizon + 1, mdp.num_states));
    values.slice_mut(s![horizon, ..]).assign(&mdp.terminal_values);
    for h in (0..horizon).rev() {
        let next = values.slice(s![h + 1, ..]).to_owned();
        for state in 0..mdp.num_states {
            let action = policy.action(h, state);
            assert!(action < mdp.num_actions, "invalid action index in policy");
            values[[h, state]] = backup(
                mdp.kernel_row(state, action),
                mdp.reward_row(state, action),
                next.view(),
                mdp.discount,
            );
        }
    }
    StageValues { values }
}

/// Exact finite-horizon value iteration. Ties in the argmax break
/// toward the lowest action index.
pub fn value_iteration(mdp: &TabularMdp) -> (StageValues, Policy) {
    let horizon = mdp.horizon;
    let mut values = Array2::zeros((horizon + 1, mdp.num_states));
    values.slice_mut(s![horizon, ..]).assign(&mdp.terminal_values);
    let mut actions = Array2::zeros((horizon, mdp.num_states));
    for h in (0..horizon).rev() {
        let next = values.slice(s![h + 1, ..]).to_owned();
        for state in 0..mdp.num_states {
            let mut best_value = f64::NEG_INFINITY;
            let mut best_action = 0;
            for action in 0..mdp.num_actions {
                let q = backup(
                    mdp.kernel_row(state, action),
                    mdp.reward_row(state, action),
                    next.view(),
                    mdp.discount,
                );
                if q > best_value {
                    best_value = q;
                    best_action = action;
                }
            }
            values[[h, state]] = best_value;
            actions[[h, state]] = best_action;
        }
    }
    (StageValues { values }, Policy::new(actions))
}

/// Expected return of a policy from the initial distribution:
/// `sum_s p0(s) * V_0(s)`.
pub fn expected_return(mdp: &TabularMdp, policy: &Policy) -> f64 {
    let values = policy_evaluation(mdp, policy);
    initial_dot(&mdp.initial_dist, values.stage(0))
}

/// Optimal expected return from the initial distribution.
pub fn optimal_return(mdp: &TabularMdp) -> f64 {
    let (values, _) = value_iteration(mdp);
    initial_dot(&mdp.initial_dist, values.stage(0))
}

/// `p0 . v`, kept as one routine so every return computation shares
/// the same summation order.
pub fn initial_dot(initial_dist: &Array1<f64>, stage_zero: ArrayView1<'_, f64>) -> f64 {
    let mut total = 0.0;
    for (&p, &v) in initial_dist.iter().zip(stage_zero.iter()) {
        total += p * v;
    }
    total
}
