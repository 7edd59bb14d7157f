//! Monte Carlo estimators for the same statistics the analytic layer
//! computes in closed form: empirical connection probability, ergodic rate,
//! and mean degree, each with a standard error.
//!
//! # Sampling protocol
//!
//! One trial draws one network realization on a disk of radius `R` centered
//! on the receiver: an interferer count from a Poisson law of mean
//! `rho pi R^2`, then the tagged link's fading, then for each interferer —
//! in order — its radius, arrival angle, orientation, and fading. Radii use
//! the inverse-CDF map `R sqrt(1 - u)` so a sampled interferer can land on
//! the disk boundary but never exactly on the receiver, where zero-offset
//! path loss is singular; fadings use `-ln(1 - u)`, clamped to the smallest
//! positive double so downstream products stay nonzero.
//!
//! # Determinism
//!
//! Trial `k` of a run seeded with `s` draws from a ChaCha8 stream cipher
//! keyed by `s` with stream index `k`. Estimates are therefore bit-identical
//! for identical configurations regardless of how trials are scheduled
//! across worker threads: parallelism only distributes the trial indices,
//! and the reduction always walks trials in index order on one thread.
//! The exact byte-to-sample mapping is additionally pinned by the locked
//! versions of the random-number dependencies.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{
    received_power, sinr, AntennaPattern, Interferer, LinkGeometry, NetworkRealization,
    SystemParams,
};

/// Everything a simulation run depends on: the sampling window, the trial
/// budget, the seed, and the system being simulated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationConfig {
    /// Radius of the sampling disk around the receiver (> 0). The disk
    /// stands in for the infinite plane of the analysis; radius 8 keeps the
    /// truncation bias well below Monte Carlo noise at default parameters.
    pub disk_radius: f64,
    /// Number of independent realizations to average (>= 1).
    pub trials: u64,
    /// Master seed; every trial derives its own stream from it.
    pub rng_seed: u64,
    /// System parameters shared by all nodes.
    pub params: SystemParams,
    /// Pattern transmitted by every node, tagged and interfering alike.
    pub tx_pattern: AntennaPattern,
    /// Pattern of the receiving antenna at the origin.
    pub rx_pattern: AntennaPattern,
}

impl Default for SimulationConfig {
    /// Disk radius 8 and 30000 trials — the experiment protocol's
    /// defaults — with default system parameters, isotropic patterns, and
    /// seed 0.
    fn default() -> Self {
        SimulationConfig {
            disk_radius: 8.0,
            trials: 30_000,
            rng_seed: 0,
            params: SystemParams::default(),
            tx_pattern: AntennaPattern::isotropic(),
            rx_pattern: AntennaPattern::isotropic(),
        }
    }
}

impl SimulationConfig {
    /// Checks the window, budget, parameters, and patterns.
    pub fn validate(&self) -> Result<()> {
        if !(self.disk_radius > 0.0) || !self.disk_radius.is_finite() {
            return Err(Error::invalid("disk_radius", "must be positive and finite"));
        }
        if self.trials == 0 {
            return Err(Error::invalid("trials", "must be at least 1"));
        }
        self.params.validate()?;
        self.tx_pattern.validate()?;
        self.rx_pattern.validate()?;
        Ok(())
    }
}

/// A Monte Carlo point estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateWithError {
    /// Sample mean across trials.
    pub estimate: f64,
    /// Sample standard deviation divided by the square root of the trial
    /// count (zero when only one trial ran).
    pub std_error: f64,
    /// Number of trials behind the estimate.
    pub trials_used: u64,
}

/// Mean-degree estimate together with the auxiliary connected-fraction
/// estimate (the per-realization share of transmitters that reach the
/// receiver; zero in empty realizations).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeEstimate {
    /// Mean number of decodable transmitters per realization.
    pub degree: EstimateWithError,
    /// Mean decodable fraction of the transmitters present.
    pub connected_fraction: EstimateWithError,
}

/// Independent generator for one trial: the master seed keys the cipher and
/// the trial index selects its stream, so distinct trials never share
/// output and any trial is reproducible in isolation.
fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Unit-mean exponential draw by inverse CDF, clamped away from zero.
#[inline]
fn unit_exponential<R: Rng>(rng: &mut R) -> f64 {
    let u: f64 = rng.gen();
    (-(1.0 - u).ln()).max(f64::MIN_POSITIVE)
}

/// Draws one network realization: the interferer field on the disk plus the
/// tagged link's fading, in the documented order.
pub fn sample_realization<R: Rng>(
    config: &SimulationConfig,
    tagged: &LinkGeometry,
    rng: &mut R,
) -> NetworkRealization {
    let mean_count = config.params.density * PI * config.disk_radius * config.disk_radius;
    let count = if mean_count > 0.0 {
        // Mean > 0 makes the distribution constructor infallible.
        Poisson::new(mean_count).expect("positive Poisson mean").sample(rng) as u64
    } else {
        0
    };
    let tagged_fading = unit_exponential(rng);
    let mut interferers = Vec::with_capacity(count as usize);
    for _ in 0..count {
        let u: f64 = rng.gen();
        let distance = config.disk_radius * (1.0 - u).sqrt();
        let angular_position = 2.0 * PI * rng.gen::<f64>();
        let orientation = 2.0 * PI * rng.gen::<f64>();
        let fading = unit_exponential(rng);
        interferers.push(Interferer {
            link: LinkGeometry {
                distance,
                angular_position,
                orientation,
            },
            fading,
        });
    }
    NetworkRealization {
        tagged_link: *tagged,
        tagged_fading,
        interferers,
    }
}

/// Runs the per-trial sampler across the trial budget (in parallel when a
/// thread pool is available) and collects outcomes in trial order.
fn collect_trials<T, F>(config: &SimulationConfig, sample: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng) -> T + Sync,
{
    (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(config.rng_seed, trial);
            sample(&mut rng)
        })
        .collect()
}

/// Sequential two-pass mean and Bessel-corrected standard error. Running
/// this on the index-ordered trial vector (never tree-reduced) keeps the
/// result bit-identical across thread counts.
fn summarize(values: &[f64]) -> EstimateWithError {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std_error = if values.len() < 2 {
        0.0
    } else {
        let sum_squared = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>();
        (sum_squared / (n - 1.0)).sqrt() / n.sqrt()
    };
    EstimateWithError {
        estimate: mean,
        std_error,
        trials_used: values.len() as u64,
    }
}

/// Shared estimator preamble: a valid configuration, a meaningful channel,
/// and a tagged link strictly inside the sampling window.
fn check_tagged_inputs(config: &SimulationConfig, tagged: &LinkGeometry) -> Result<()> {
    config.validate()?;
    tagged.validate()?;
    if config.params.noise == 0.0 && config.params.orthogonality == 0.0 {
        return Err(Error::Domain {
            what: "noise and orthogonality are both zero: every link connects with \
                   probability 1 and network statistics diverge"
                .to_string(),
        });
    }
    if tagged.distance >= config.disk_radius {
        return Err(Error::invalid(
            "distance",
            "tagged link must lie strictly inside the sampling disk",
        ));
    }
    if tagged.distance == 0.0 && config.params.pathloss_offset == 0.0 {
        return Err(Error::SingularInput {
            what: "tagged link at zero distance with zero path-loss offset".to_string(),
        });
    }
    Ok(())
}

/// Empirical probability that the tagged link's SINR reaches the threshold:
/// successful trials over total trials, with binomial standard error.
///
/// Ties count as successes (the threshold is a `>=` comparison).
pub fn estimate_connection_probability(
    config: &SimulationConfig,
    tagged: &LinkGeometry,
) -> Result<EstimateWithError> {
    check_tagged_inputs(config, tagged)?;
    let outcomes = collect_trials(config, |rng| {
        let realization = sample_realization(config, tagged, rng);
        let ratio = sinr(&realization, &config.params, &config.tx_pattern, &config.rx_pattern)
            .expect("sampled distances are strictly positive");
        if ratio >= config.params.threshold {
            1.0
        } else {
            0.0
        }
    });
    Ok(summarize(&outcomes))
}

/// Empirical ergodic rate of the tagged link: the sample mean of
/// `ln(1 + SINR)` across trials, in nats per channel use.
pub fn estimate_data_rate(
    config: &SimulationConfig,
    tagged: &LinkGeometry,
) -> Result<EstimateWithError> {
    check_tagged_inputs(config, tagged)?;
    let rates = collect_trials(config, |rng| {
        let realization = sample_realization(config, tagged, rng);
        let ratio = sinr(&realization, &config.params, &config.tx_pattern, &config.rx_pattern)
            .expect("sampled distances are strictly positive");
        ratio.ln_1p()
    });
    Ok(summarize(&rates))
}

/// Empirical mean degree: the average over realizations of how many
/// transmitters in the disk the origin receiver can decode, where each
/// candidate's interference sums every other transmitter's received power.
///
/// The estimate is a count, not a fraction, matching the definition of the
/// degree as an expected number of decodable neighbors.
pub fn estimate_mean_degree(config: &SimulationConfig) -> Result<EstimateWithError> {
    Ok(estimate_mean_degree_detailed(config)?.degree)
}

/// [`estimate_mean_degree`] plus the auxiliary connected-fraction estimate,
/// at no extra sampling cost.
pub fn estimate_mean_degree_detailed(config: &SimulationConfig) -> Result<DegreeEstimate> {
    config.validate()?;
    if config.params.noise == 0.0 && config.params.orthogonality == 0.0 {
        return Err(Error::Domain {
            what: "noise and orthogonality are both zero: every link connects with \
                   probability 1 and network statistics diverge"
                .to_string(),
        });
    }
    // The tagged link plays no role in the degree count; the placeholder
    // only keeps the realization sampler's draw order identical across all
    // estimators.
    let placeholder = LinkGeometry {
        distance: 0.0,
        angular_position: 0.0,
        orientation: 0.0,
    };
    let params = config.params;
    let samples = collect_trials(config, |rng| {
        let realization = sample_realization(config, &placeholder, rng);
        let powers: Vec<f64> = realization
            .interferers
            .iter()
            .map(|interferer| {
                received_power(
                    &params,
                    &interferer.link,
                    interferer.fading,
                    &config.tx_pattern,
                    &config.rx_pattern,
                )
                .expect("sampled distances are strictly positive")
            })
            .collect();
        let total_power: f64 = powers.iter().sum();
        let connected = powers
            .iter()
            .filter(|&&power| {
                // Interference excludes the candidate itself; the clamp
                // absorbs cancellation when one transmitter dominates.
                let interference = (total_power - power).max(0.0);
                power / (params.noise + params.orthogonality * interference)
                    >= params.threshold
            })
            .count();
        let fraction = if powers.is_empty() {
            0.0
        } else {
            connected as f64 / powers.len() as f64
        };
        (connected as f64, fraction)
    });
    let counts: Vec<f64> = samples.iter().map(|&(count, _)| count).collect();
    let fractions: Vec<f64> = samples.iter().map(|&(_, fraction)| fraction).collect();
    Ok(DegreeEstimate {
        degree: summarize(&counts),
        connected_fraction: summarize(&fractions),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config(trials: u64, seed: u64) -> SimulationConfig {
        SimulationConfig {
            trials,
            rng_seed: seed,
            ..SimulationConfig::default()
        }
    }

    fn broadside_link(distance: f64) -> LinkGeometry {
        LinkGeometry {
            distance,
            angular_position: 0.0,
            orientation: PI,
        }
    }

    #[test]
    fn identical_configurations_give_bit_identical_estimates() {
        let config = small_config(400, 17);
        let link = broadside_link(0.4);
        let first = estimate_connection_probability(&config, &link).unwrap();
        let second = estimate_connection_probability(&config, &link).unwrap();
        assert_eq!(first, second);
        let degree_one = estimate_mean_degree(&config).unwrap();
        let degree_two = estimate_mean_degree(&config).unwrap();
        assert_eq!(degree_one, degree_two);
    }

    #[test]
    fn different_seeds_give_different_estimates() {
        let link = broadside_link(0.4);
        let first = estimate_data_rate(&small_config(400, 1), &link).unwrap();
        let second = estimate_data_rate(&small_config(400, 2), &link).unwrap();
        assert_ne!(first.estimate, second.estimate);
    }

    #[test]
    fn same_seed_reproduces_the_same_realization() {
        let config = small_config(1, 99);
        let link = broadside_link(0.5);
        let first = sample_realization(&config, &link, &mut trial_rng(99, 0));
        let second = sample_realization(&config, &link, &mut trial_rng(99, 0));
        assert_eq!(first, second);
        let other_trial = sample_realization(&config, &link, &mut trial_rng(99, 1));
        assert_ne!(first, other_trial);
    }

    #[test]
    fn interferer_count_has_the_poisson_mean() {
        let config = small_config(1, 7);
        let link = broadside_link(0.5);
        let draws = 2_000;
        let mut total = 0usize;
        for trial in 0..draws {
            let realization = sample_realization(&config, &link, &mut trial_rng(7, trial));
            total += realization.interferers.len();
        }
        let mean = total as f64 / draws as f64;
        let expected = PI * 64.0;
        // Standard error of the mean count is sqrt(mean/draws) ~ 0.32.
        assert!(
            (mean - expected).abs() < 3.0 * (expected / draws as f64).sqrt(),
            "sample mean {mean} too far from {expected}"
        );
    }

    #[test]
    fn sampled_geometry_stays_inside_the_disk_and_off_the_origin() {
        let config = small_config(1, 3);
        let link = broadside_link(0.5);
        let realization = sample_realization(&config, &link, &mut trial_rng(3, 0));
        assert!(!realization.interferers.is_empty());
        for interferer in &realization.interferers {
            assert!(interferer.link.distance > 0.0);
            assert!(interferer.link.distance <= config.disk_radius);
            assert!((0.0..2.0 * PI).contains(&interferer.link.angular_position));
            assert!((0.0..2.0 * PI).contains(&interferer.link.orientation));
            assert!(interferer.fading > 0.0);
        }
    }

    #[test]
    fn zero_density_realizations_are_empty_and_degree_is_zero() {
        let mut config = small_config(50, 5);
        config.params.density = 0.0;
        let link = broadside_link(0.5);
        let realization = sample_realization(&config, &link, &mut trial_rng(5, 0));
        assert!(realization.interferers.is_empty());
        let estimate = estimate_mean_degree(&config).unwrap();
        assert_eq!(estimate.estimate, 0.0);
        assert_eq!(estimate.std_error, 0.0);
    }

    #[test]
    fn interference_free_estimates_match_the_noise_tail() {
        // With zero orthogonality the success indicator depends only on the
        // tagged fading; the mean must sit within 3 standard errors of the
        // exponential tail probability.
        let mut config = small_config(4_000, 11);
        config.params.orthogonality = 0.0;
        let link = broadside_link(1.0);
        let estimate = estimate_connection_probability(&config, &link).unwrap();
        let expected = (-1.0f64).exp();
        assert!(
            (estimate.estimate - expected).abs() <= 3.0 * estimate.std_error,
            "estimate {} +- {} vs {expected}",
            estimate.estimate,
            estimate.std_error
        );
    }

    #[test]
    fn near_zero_distance_always_connects() {
        let config = small_config(200, 23);
        let link = broadside_link(1e-6);
        let estimate = estimate_connection_probability(&config, &link).unwrap();
        assert_eq!(estimate.estimate, 1.0);
        assert_eq!(estimate.std_error, 0.0);
    }

    #[test]
    fn single_trial_has_zero_standard_error() {
        let config = small_config(1, 31);
        let estimate = estimate_data_rate(&config, &broadside_link(0.4)).unwrap();
        assert_eq!(estimate.std_error, 0.0);
        assert_eq!(estimate.trials_used, 1);
    }

    #[test]
    fn estimators_reject_invalid_inputs() {
        let config = small_config(100, 1);
        // Tagged link outside the window.
        assert!(estimate_connection_probability(&config, &broadside_link(9.0)).is_err());
        // Zero-distance singular link.
        assert!(estimate_data_rate(&config, &broadside_link(0.0)).is_err());
        // Degenerate channel.
        let mut degenerate = config;
        degenerate.params.noise = 0.0;
        degenerate.params.orthogonality = 0.0;
        assert!(estimate_connection_probability(&degenerate, &broadside_link(0.4)).is_err());
        assert!(estimate_mean_degree(&degenerate).is_err());
        // Empty trial budget.
        let mut empty = config;
        empty.trials = 0;
        assert!(estimate_mean_degree(&empty).is_err());
    }

    #[test]
    fn degree_detail_reports_consistent_fraction() {
        let config = small_config(300, 41);
        let detail = estimate_mean_degree_detailed(&config).unwrap();
        assert!(detail.degree.estimate > 0.0);
        assert!(detail.connected_fraction.estimate > 0.0);
        assert!(detail.connected_fraction.estimate <= 1.0);
        // With ~201 transmitters per realization the fraction is roughly
        // degree / 201, far below 1.
        assert!(detail.connected_fraction.estimate < detail.degree.estimate);
    }
}
