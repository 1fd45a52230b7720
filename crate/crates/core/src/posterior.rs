//! Dirichlet-multinomial model of an unknown transition kernel.
//!
//! Each `(state, action)` row carries an independent Dirichlet
//! distribution whose concentration vector is the prior plus observed
//! transition counts. Sampling draws per-coordinate Gamma variates and
//! normalizes, which is exact and deterministic given the generator
//! stream.

use ndarray::{s, Array1, Array2, Array3};
use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::mdp::{KnownModel, TabularMdp};

/// Per-(state, action) Dirichlet concentrations over next states.
#[derive(Debug, Clone)]
pub struct DirichletPosterior {
    alpha: Array3<f64>,
    prior_alpha: Array3<f64>,
}

impl DirichletPosterior {
    /// Uninformative prior: all concentrations equal to one.
    pub fn uniform_prior(num_states: usize, num_actions: usize) -> Self {
        assert!(num_states >= 1 && num_actions >= 1, "dimensions must be positive");
        let alpha = Array3::from_elem((num_states, num_actions, num_states), 1.0);
        Self { prior_alpha: alpha.clone(), alpha }
    }

    /// Build from explicit concentrations; the prior is taken to be the
    /// given array (zero observed counts).
    pub fn from_alpha(alpha: Array3<f64>) -> Self {
        assert!(alpha.iter().all(|&a| a > 0.0), "concentrations must be positive");
        Self { prior_alpha: alpha.clone(), alpha }
    }

    pub fn num_states(&self) -> usize {
        self.alpha.dim().0
    }

    pub fn num_actions(&self) -> usize {
        self.alpha.dim().1
    }

    /// Record one observed transition `s --a--> s'`.
    pub fn record_transition(&mut self, state: usize, action: usize, next_state: usize) {
        assert!(
            state < self.num_states() && action < self.num_actions() && next_state < self.num_states(),
            "transition coordinates out of range"
        );
        self.alpha[[state, action, next_state]] += 1.0;
    }

    /// Number of observed transitions out of `(state, action)`.
    pub fn observation_count(&self, state: usize, action: usize) -> f64 {
        let obs = &self.alpha.slice(s![state, action, ..]) - &self.prior_alpha.slice(s![state, action, ..]);
        obs.sum()
    }

    /// Observed transition counts out of `(state, action)`.
    pub fn observed_counts(&self, state: usize, action: usize) -> Array1<f64> {
        (&self.alpha.slice(s![state, action, ..]) - &self.prior_alpha.slice(s![state, action, ..])).to_owned()
    }

    /// Posterior mean row: `alpha / sum(alpha)`.
    pub fn posterior_mean(&self, state: usize, action: usize) -> Array1<f64> {
        let row = self.alpha.slice(s![state, action, ..]);
        let total = row.sum();
        row.mapv(|a| a / total)
    }

    /// Full posterior-mean kernel.
    pub fn mean_kernel(&self) -> Array3<f64> {
        let (num_states, num_actions, _) = self.alpha.dim();
        let mut kernel = Array3::zeros(self.alpha.dim());
        for state in 0..num_states {
            for action in 0..num_actions {
                kernel
                    .slice_mut(s![state, action, ..])
                    .assign(&self.posterior_mean(state, action));
            }
        }
        kernel
    }

    /// One Dirichlet draw for a single kernel row.
    pub fn sample_row<R: Rng>(&self, state: usize, action: usize, rng: &mut R) -> Array1<f64> {
        sample_dirichlet(self.alpha.slice(s![state, action, ..]).as_slice().unwrap(), rng)
    }

    /// A batch of independent posterior draws for one `(state, action)`.
    pub fn sample_transitions<R: Rng>(
        &self,
        state: usize,
        action: usize,
        num_samples: usize,
        rng: &mut R,
    ) -> TransitionSampleBatch {
        assert!(num_samples >= 1, "need at least one sample");
        let num_states = self.num_states();
        let mut samples = Array2::zeros((num_samples, num_states));
        for i in 0..num_samples {
            let draw = self.sample_row(state, action, rng);
            samples.slice_mut(s![i, ..]).assign(&draw);
        }
        TransitionSampleBatch { state, action, samples }
    }

    /// Sample a complete MDP: every kernel row is an independent
    /// posterior draw; rewards, initial distribution, horizon, and
    /// terminal values come from the known model.
    pub fn sample_mdp<R: Rng>(&self, known: &KnownModel, rng: &mut R) -> TabularMdp {
        let (num_states, num_actions, _) = self.alpha.dim();
        assert_eq!(known.num_states, num_states);
        assert_eq!(known.num_actions, num_actions);
        let mut transitions = Array3::zeros(self.alpha.dim());
        for state in 0..num_states {
            for action in 0..num_actions {
                let row = self.sample_row(state, action, rng);
                transitions.slice_mut(s![state, action, ..]).assign(&row);
            }
        }
        known.assemble(transitions)
    }

    /// Copy with all concentrations (prior included) multiplied by
    /// `factor`, i.e. the same mean with `factor` times the evidence.
    pub fn sharpened(&self, factor: f64) -> Self {
        assert!(factor > 0.0);
        Self {
            alpha: self.alpha.mapv(|a| a * factor),
            prior_alpha: self.prior_alpha.mapv(|a| a * factor),
        }
    }
}

/// Monte Carlo draws of one transition row.
#[derive(Debug, Clone)]
pub struct TransitionSampleBatch {
    pub state: usize,
    pub action: usize,
    /// Row `i` is one probability vector over next states.
    pub samples: Array2<f64>,
}

impl TransitionSampleBatch {
    pub fn len(&self) -> usize {
        self.samples.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.nrows() == 0
    }

    pub fn sample(&self, i: usize) -> ndarray::ArrayView1<'_, f64> {
        self.samples.slice(s![i, ..])
    }

    /// L1 distances from every sample to `center`.
    pub fn l1_distances(&self, center: &Array1<f64>) -> Vec<f64> {
        (0..self.len())
            .map(|i| {
                self.sample(i)
                    .iter()
                    .zip(center.iter())
                    .map(|(a, b)| (a - b).abs())
                    .sum()
            })
            .collect()
    }

    /// Dot products `v . sample_i` for every sample.
    pub fn projections(&self, v: &Array1<f64>) -> Vec<f64> {
        (0..self.len()).map(|i| self.sample(i).dot(v)).collect()
    }
}

/// Dirichlet draw by normalized per-coordinate Gamma variates.
fn sample_dirichlet<R: Rng>(alpha: &[f64], rng: &mut R) -> Array1<f64> {
    let mut draw = Array1::zeros(alpha.len());
    let mut total = 0.0;
    for (out, &a) in draw.iter_mut().zip(alpha.iter()) {
        let g = Gamma::new(a, 1.0).expect("positive shape").sample(rng);
        *out = g;
        total += g;
    }
    if total > 0.0 {
        draw.mapv_inplace(|g| g / total);
    } else {
        // All Gamma draws underflowed (possible only for vanishing
        // concentrations): fall back to a point mass on the largest.
        let argmax = alpha
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        draw.fill(0.0);
        draw[argmax] = 1.0;
    }
    draw
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeding::derive_rng;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    #[test]
    fn uniform_prior_shape_and_mean() {
        let post = DirichletPosterior::uniform_prior(3, 2);
        for state in 0..3 {
            for action in 0..2 {
                let mean = post.posterior_mean(state, action);
                for &m in mean.iter() {
                    assert_abs_diff_eq!(m, 1.0 / 3.0, epsilon = 1e-12);
                }
                assert_eq!(post.observation_count(state, action), 0.0);
            }
        }
    }

    #[test]
    fn record_transition_increments_one_count() {
        let mut post = DirichletPosterior::uniform_prior(3, 1);
        post.record_transition(0, 0, 2);
        assert_eq!(post.observation_count(0, 0), 1.0);
        let mean = post.posterior_mean(0, 0);
        assert_abs_diff_eq!(mean[0], 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(mean[1], 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(mean[2], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn conjugacy_is_exact() {
        let mut post = DirichletPosterior::uniform_prior(4, 1);
        let counts = [3usize, 0, 7, 2];
        for (next, &c) in counts.iter().enumerate() {
            for _ in 0..c {
                post.record_transition(0, 0, next);
            }
        }
        let mean = post.posterior_mean(0, 0);
        let total: f64 = 4.0 + counts.iter().sum::<usize>() as f64;
        for (next, &c) in counts.iter().enumerate() {
            assert_eq!(mean[next], (1.0 + c as f64) / total);
        }
        let sum: f64 = mean.sum();
        assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-12);
    }

    #[test]
    #[should_panic(expected = "out of range")]
    fn out_of_range_coordinates_panic() {
        let mut post = DirichletPosterior::uniform_prior(3, 1);
        post.record_transition(0, 0, 3);
    }

    #[test]
    fn monte_carlo_mean_matches_analytic() {
        let post = DirichletPosterior::from_alpha(Array3::from_elem((2, 1, 2), 2.0));
        let mut rng = derive_rng(11, &[1]);
        let batch = post.sample_transitions(0, 0, 100_000, &mut rng);
        let empirical = batch.samples.mean_axis(ndarray::Axis(0)).unwrap();
        assert_abs_diff_eq!(empirical[0], 0.5, epsilon = 0.01);
        assert_abs_diff_eq!(empirical[1], 0.5, epsilon = 0.01);
    }

    #[test]
    fn huge_concentration_concentrates() {
        let mut alpha = Array3::zeros((2, 1, 2));
        alpha[[0, 0, 0]] = 1e9;
        alpha[[0, 0, 1]] = 1.0;
        alpha[[1, 0, 0]] = 1.0;
        alpha[[1, 0, 1]] = 1e9;
        let post = DirichletPosterior::from_alpha(alpha);
        let mut rng = derive_rng(5, &[2]);
        let batch = post.sample_transitions(0, 0, 100, &mut rng);
        for i in 0..batch.len() {
            assert!(batch.sample(i)[0] > 0.999);
        }
    }

    #[test]
    fn same_seed_identical_batch() {
        let post = DirichletPosterior::uniform_prior(4, 1);
        let mut rng_a = derive_rng(9, &[3]);
        let mut rng_b = derive_rng(9, &[3]);
        let a = post.sample_transitions(0, 0, 50, &mut rng_a);
        let b = post.sample_transitions(0, 0, 50, &mut rng_b);
        assert_eq!(a.samples, b.samples);
    }

    #[test]
    fn sampled_mdp_is_valid_and_seed_sensitive() {
        let post = DirichletPosterior::uniform_prior(3, 2);
        let known = KnownModel {
            num_states: 3,
            num_actions: 2,
            rewards: Array3::zeros((3, 2, 3)),
            initial_dist: array![1.0, 0.0, 0.0],
            horizon: 4,
            discount: 1.0,
            terminal_values: Array1::zeros(3),
        };
        let mdp_a = post.sample_mdp(&known, &mut derive_rng(1, &[0]));
        let mdp_b = post.sample_mdp(&known, &mut derive_rng(2, &[0]));
        assert!(crate::mdp::validate(&mdp_a).is_valid());
        assert_ne!(mdp_a.transitions, mdp_b.transitions);
    }

    #[test]
    fn sharpened_posterior_tracks_mean_in_l1() {
        let post = DirichletPosterior::uniform_prior(3, 1);
        let sharp = post.sharpened(1e9);
        let mut rng = derive_rng(3, &[7]);
        let row = sharp.sample_row(0, 0, &mut rng);
        let mean = sharp.posterior_mean(0, 0);
        let l1: f64 = row.iter().zip(mean.iter()).map(|(a, b)| (a - b).abs()).sum();
        assert!(l1 < 1e-3);
    }

    #[test]
    fn posterior_mean_approaches_empirical_frequency() {
        // Draw synthetic transitions from a fixed row and compare the
        // posterior mean against the empirical frequency.
        let truth = [0.6, 0.3, 0.1];
        let mut post = DirichletPosterior::uniform_prior(3, 1);
        let mut rng = derive_rng(21, &[4]);
        let n = 10_000;
        let mut counts = [0usize; 3];
        for _ in 0..n {
            let u: f64 = rng.gen();
            let next = if u < truth[0] {
                0
            } else if u < truth[0] + truth[1] {
                1
            } else {
                2
            };
            counts[next] += 1;
            post.record_transition(0, 0, next);
        }
        let mean = post.posterior_mean(0, 0);
        let l1: f64 = (0..3)
            .map(|i| (mean[i] - counts[i] as f64 / n as f64).abs())
            .sum();
        assert!(l1 < 0.05, "posterior mean should track the empirical frequency, l1 = {l1}");
    }

    #[test]
    fn coverage_fraction_is_monotone_in_radius() {
        let post = DirichletPosterior::uniform_prior(4, 1);
        let mut rng = derive_rng(17, &[8]);
        let batch = post.sample_transitions(0, 0, 10_000, &mut rng);
        let center = post.posterior_mean(0, 0);
        let distances = batch.l1_distances(&center);
        let fraction = |radius: f64| {
            distances.iter().filter(|&&d| d <= radius).count() as f64 / distances.len() as f64
        };
        let mut previous = 0.0;
        for step in 0..=20 {
            let current = fraction(step as f64 * 0.1);
            assert!(current >= previous);
            previous = current;
        }
        assert_eq!(previous, 1.0);
    }
}
