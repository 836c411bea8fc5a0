//! Synthetic scored streams.
//!
//! Labels are Bernoulli with the configured positive rate. Positive scores
//! are drawn from N(0, 1) and negative scores from N(separation, 1), so the
//! long-run AUC is `Phi(separation / sqrt(2))`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::model::{Label, LabeledScore};

#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    pub events: usize,
    pub positive_rate: f64,
    pub separation: f64,
    pub seed: u64,
    /// Round scores to this many decimals, producing ties.
    pub decimals: Option<u32>,
}

impl GenConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(0.0..=1.0).contains(&self.positive_rate) {
            return Err(format!("positive rate {} not in [0, 1]", self.positive_rate));
        }
        if !self.separation.is_finite() {
            return Err(format!("separation {} is not finite", self.separation));
        }
        if self.decimals.is_some_and(|d| d > 12) {
            return Err("at most 12 decimals".to_string());
        }
        Ok(())
    }

    /// Separation whose long-run AUC equals `auc`.
    pub fn separation_for_auc(auc: f64) -> f64 {
        std::f64::consts::SQRT_2 * inverse_normal_cdf(auc)
    }
}

pub fn synthetic_stream(config: &GenConfig) -> impl Iterator<Item = LabeledScore> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let GenConfig {
        events,
        positive_rate,
        separation,
        decimals,
        ..
    } = *config;
    let scale = decimals.map(|d| 10f64.powi(d as i32));
    (0..events).map(move |_| {
        let label = if rng.random_bool(positive_rate) {
            Label::Positive
        } else {
            Label::Negative
        };
        let noise: f64 = StandardNormal.sample(&mut rng);
        let mut score = match label {
            Label::Positive => noise,
            Label::Negative => separation + noise,
        };
        if let Some(scale) = scale {
            score = (score * scale).round() / scale;
        }
        LabeledScore::new(score, label).expect("normal draws are finite")
    })
}

fn inverse_normal_cdf(p: f64) -> f64 {
    Normal::standard().inverse_cdf(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::exact_auc;

    fn cfg(events: usize, rate: f64, sep: f64, seed: u64) -> GenConfig {
        GenConfig {
            events,
            positive_rate: rate,
            separation: sep,
            seed,
            decimals: None,
        }
    }

    #[test]
    fn zero_separation_is_chance() {
        let events: Vec<_> = synthetic_stream(&cfg(100_000, 0.3, 0.0, 1)).collect();
        let auc = exact_auc(&events).value().unwrap();
        assert!((auc - 0.5).abs() <= 0.02, "{auc}");
    }

    #[test]
    fn large_separation_is_perfect() {
        let events: Vec<_> = synthetic_stream(&cfg(20_000, 0.5, 40.0, 2)).collect();
        assert_eq!(exact_auc(&events).value(), Some(1.0));
    }

    #[test]
    fn separation_hits_target_auc() {
        for target in [0.6, 0.8, 0.95] {
            let sep = GenConfig::separation_for_auc(target);
            let events: Vec<_> = synthetic_stream(&cfg(50_000, 0.4, sep, 9)).collect();
            let auc = exact_auc(&events).value().unwrap();
            assert!((auc - target).abs() < 0.01, "{target} -> {auc}");
        }
    }

    #[test]
    fn same_seed_same_stream() {
        let a: Vec<_> = synthetic_stream(&cfg(1000, 0.2, 1.0, 5)).collect();
        let b: Vec<_> = synthetic_stream(&cfg(1000, 0.2, 1.0, 5)).collect();
        let c: Vec<_> = synthetic_stream(&cfg(1000, 0.2, 1.0, 6)).collect();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn rounding_creates_ties() {
        let mut config = cfg(2000, 0.5, 1.0, 5);
        config.decimals = Some(1);
        let events: Vec<_> = synthetic_stream(&config).collect();
        let mut scores: Vec<_> = events.iter().map(|e| e.score).collect();
        scores.sort();
        scores.dedup();
        assert!(scores.len() < 200);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(cfg(10, 1.5, 0.0, 0).validate().is_err());
        assert!(cfg(10, -0.1, 0.0, 0).validate().is_err());
        assert!(cfg(10, 0.5, f64::NAN, 0).validate().is_err());
        assert!(cfg(10, 0.5, 1.0, 0).validate().is_ok());
    }

    #[test]
    fn inverse_cdf_reference_points() {
        assert!(inverse_normal_cdf(0.5).abs() < 1e-9);
        assert!((inverse_normal_cdf(0.975) - 1.959963985).abs() < 1e-6);
        assert!((inverse_normal_cdf(0.01) + 2.326347874).abs() < 1e-6);
    }
}
