//! Timing of the compressed estimator against exact recomputation.

use std::fmt;
use std::hint::black_box;
use std::time::Instant;

use crate::error::AucError;
use crate::estimator::EstimatorConfig;
use crate::model::{AucRatio, LabeledScore};
use crate::window::{ExactWindow, SlidingAucEstimator};

use super::relative_error;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub events: usize,
    pub window: usize,
    pub epsilon: String,
    pub approx_seconds: f64,
    pub exact_seconds: f64,
    pub approx_events_per_sec: f64,
    pub exact_events_per_sec: f64,
    pub speedup: f64,
    pub mean_compressed_len: f64,
    pub avg_rel_error: f64,
    pub max_rel_error: f64,
}

/// Runs both pipelines over the same in-memory events, one after the other.
/// Each pipeline pushes every event and then asks for the window's AUC.
pub fn bench(events: &[LabeledScore], window: usize, config: EstimatorConfig) -> Result<BenchReport, AucError> {
    let mut approx_out: Vec<Option<AucRatio>> = Vec::with_capacity(events.len());
    let mut compressed_total: u64 = 0;
    let mut approx = SlidingAucEstimator::new(window, config)?;
    let start = Instant::now();
    for &e in events {
        approx.push(e);
        approx_out.push(approx.estimate_ratio());
        compressed_total += approx.compressed_len() as u64;
    }
    let approx_seconds = start.elapsed().as_secs_f64();
    black_box(&approx_out);

    let mut exact_out: Vec<Option<AucRatio>> = Vec::with_capacity(events.len());
    let mut exact = ExactWindow::new(window)?;
    let start = Instant::now();
    for &e in events {
        exact.push(e);
        exact_out.push(exact.exact_ratio());
    }
    let exact_seconds = start.elapsed().as_secs_f64();
    black_box(&exact_out);

    let (mut sum, mut max, mut defined) = (0.0f64, 0.0f64, 0usize);
    for (a, e) in approx_out.iter().zip(&exact_out) {
        if let (Some(a), Some(e)) = (a, e) {
            let rel = relative_error(a.value(), e.value());
            sum += rel;
            max = max.max(rel);
            defined += 1;
        }
    }

    let n = events.len().max(1) as f64;
    let rate = |secs: f64| if secs > 0.0 { events.len() as f64 / secs } else { f64::INFINITY };
    Ok(BenchReport {
        events: events.len(),
        window,
        epsilon: config.epsilon.to_string(),
        approx_seconds,
        exact_seconds,
        approx_events_per_sec: rate(approx_seconds),
        exact_events_per_sec: rate(exact_seconds),
        speedup: exact_seconds / approx_seconds,
        mean_compressed_len: compressed_total as f64 / n,
        avg_rel_error: if defined > 0 { sum / defined as f64 } else { 0.0 },
        max_rel_error: max,
    })
}

impl fmt::Display for BenchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "events={}", self.events)?;
        writeln!(f, "window={}", self.window)?;
        writeln!(f, "epsilon={}", self.epsilon)?;
        writeln!(f, "approx_events_per_sec={:.1}", self.approx_events_per_sec)?;
        writeln!(f, "exact_events_per_sec={:.1}", self.exact_events_per_sec)?;
        writeln!(f, "speedup={:.3}", self.speedup)?;
        writeln!(f, "mean_compressed_len={:.3}", self.mean_compressed_len)?;
        writeln!(f, "avg_rel_error={:e}", self.avg_rel_error)?;
        write!(f, "max_rel_error={:e}", self.max_rel_error)
    }
}
