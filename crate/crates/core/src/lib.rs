//! Tabular finite-horizon MDP exploration toolkit.
//!
//! The crate provides exact solvers for small tabular MDPs, a
//! Dirichlet-multinomial posterior over unknown transition kernels,
//! several constructions of per-(state, action) plausibility sets
//! (Hoeffding, Bayesian credible, BayesUCRL, and value-function-guided
//! sets), episodic exploration agents built on top of them, and a
//! simulation harness that turns all of it into cumulative-regret
//! curves.

pub mod agents;
pub mod ambiguity;
pub mod domains;
pub mod harness;
pub mod lp;
pub mod mdp;
pub mod ofvf;
pub mod posterior;
pub mod seeding;

pub use agents::{plan_episode, AgentKind, AgentSpec, PlanInputs, PlannedEpisode};
pub use ambiguity::{
    bayes_credible_radius, bayes_ucrl_radius, hoeffding_radius, optimistic_l1_response,
    optimistic_value_iteration, Direction, L1Ball, PlausibilityCollection,
};
pub use domains::{DomainName, DomainSpec};
pub use harness::{
    episode_regret, run_experiment, simulate_episode, EpisodeRecord, ExperimentOutcome,
    ExperimentSetup, RegretCurve,
};
pub use mdp::{
    expected_return, policy_evaluation, validate, value_iteration, KnownModel, Policy,
    StageValues, TabularMdp, ValidationReport,
};
pub use ofvf::{
    check_condition, minimax_l1_center, ofvf_construct, quantile_offset, Hyperplane, OfvfCaps,
    OfvfResult, ValueSet,
};
pub use posterior::{DirichletPosterior, TransitionSampleBatch};
