//! The full QNR computation and the random-sampling baseline.

use std::f64::consts::{PI, SQRT_2, TAU};
use std::time::{Duration, Instant};

use rand::Rng;

use crate::error::{Error, Result};
use crate::grid::{grid_select, should_escalate_with, GridOptions, PointCloud};
use crate::kernel::{eigen2x2, normalize_angle, reduce, split_by_alpha, ObjectiveParams};
use crate::linalg::{rng_from_seed, sample_unit_pair, BlockMatrix, UnitPair, C64};
use crate::seeker::{seek_boundary, SeekConfig};

/// When the outer loop of [`compute_qnr`] ends.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StopRule {
    /// Wall clock, checked after every seek direction.
    Time(Duration),
    /// A fixed number of outer iterations, independent of timing.
    OuterIterations(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct DriverConfig {
    pub alpha: f64,
    pub stop: StopRule,
    pub initial_samples: usize,
    pub boxes_initial: usize,
    pub directions_per_start: usize,
    /// `i_max` is the number of seek iterations per direction.
    pub seek: SeekConfig,
    pub seed: u64,
    pub escalation_ratio: f64,
    pub escalation_factor: f64,
    pub grid: GridOptions,
    /// Stop once the stored pairs would exceed this many bytes.
    pub max_pair_bytes: usize,
}

impl DriverConfig {
    pub fn new(stop: StopRule, seed: u64) -> Self {
        Self {
            alpha: 0.0,
            stop,
            initial_samples: 256,
            boxes_initial: 20,
            directions_per_start: 5,
            seek: SeekConfig::default(),
            seed,
            escalation_ratio: 0.99,
            escalation_factor: SQRT_2,
            grid: GridOptions::default(),
            max_pair_bytes: 1 << 30,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.into()));
        if self.initial_samples < 1 {
            return bad("initial_samples must be at least 1");
        }
        if self.directions_per_start < 1 {
            return bad("directions_per_start must be at least 1");
        }
        if self.boxes_initial < 2 {
            return bad("boxes_initial must be at least 2");
        }
        if let StopRule::Time(d) = self.stop {
            if d.is_zero() {
                return bad("time budget must be positive");
            }
        }
        if !self.alpha.is_finite() {
            return bad("alpha must be finite");
        }
        if !(self.escalation_factor >= 1.0) {
            return bad("escalation_factor must be at least 1");
        }
        self.seek.validate()
    }
}

/// Per-pass progress record.
#[derive(Clone, Debug, PartialEq)]
pub struct PassReport {
    pub iteration: usize,
    /// 0 for the `W` pass, 1 for the `W~` pass.
    pub pass: usize,
    pub boxes: usize,
    pub starts: usize,
    pub penalty: f64,
    pub cloud_len: usize,
    pub elapsed: Duration,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    Time,
    Iterations,
    Memory,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunStats {
    pub outer_iterations: usize,
    pub seeks: usize,
    pub boxes: [usize; 2],
    pub elapsed: Duration,
    pub stopped_by: StopReason,
}

fn push_pair(cloud: &mut PointCloud, block: &BlockMatrix, pair: &UnitPair, alpha: f64) -> Result<()> {
    let split = split_by_alpha(eigen2x2(&reduce(block, pair)?), alpha);
    cloud.push(split.lambda_alpha, split.lambda_alpha_pi, pair);
    Ok(())
}

/// Random seed phase followed by alternating grid passes over `W` and
/// `W~`, each start seeking the boundary in `directions_per_start`
/// rotated frames.
pub fn compute_qnr(block: &BlockMatrix, cfg: &DriverConfig) -> Result<PointCloud> {
    compute_qnr_traced(block, cfg, |_| {}).map(|(cloud, _)| cloud)
}

pub fn compute_qnr_traced(
    block: &BlockMatrix,
    cfg: &DriverConfig,
    mut on_pass: impl FnMut(&PassReport),
) -> Result<(PointCloud, RunStats)> {
    cfg.validate()?;
    let clock = Instant::now();
    let mut rng = rng_from_seed(cfg.seed);
    let mut cloud = PointCloud::with_pairs(block.n1(), block.n2());
    for _ in 0..cfg.initial_samples {
        let pair = sample_unit_pair(block.n1(), block.n2(), &mut rng);
        push_pair(&mut cloud, block, &pair, cfg.alpha)?;
    }

    let pair_bytes = block.dim() * std::mem::size_of::<C64>();
    let max_pairs = (cfg.max_pair_bytes / pair_bytes.max(1)).max(cfg.initial_samples);
    let mut boxes = [cfg.boxes_initial; 2];
    let mut counters = [0usize; 2];
    let mut seeks = 0;
    let mut iteration = 0;
    let stopped_by = 'outer: loop {
        if let StopRule::OuterIterations(n) = cfg.stop {
            if iteration >= n {
                break StopReason::Iterations;
            }
        }
        for (pass, shift) in [(0usize, 0.0), (1, PI)] {
            let component = if pass == 0 { &cloud.w } else { &cloud.w_tilde };
            let selection = grid_select(component, boxes[pass], iteration, &cfg.grid)?;
            let store = cloud.pairs.as_ref().expect("driver clouds keep pairs");
            let starts: Vec<(UnitPair, C64)> = selection.start_pairs(store).collect();
            for (start, lambda0) in &starts {
                let theta0 = rng.random::<f64>() * TAU;
                for l in 0..cfg.directions_per_start {
                    let theta = theta0 + l as f64 * TAU / cfg.directions_per_start as f64;
                    let rot = C64::from_polar(1.0, theta);
                    let rotated = block.scaled(rot);
                    let params = ObjectiveParams::new(normalize_angle(cfg.alpha + shift - theta), rot * lambda0, selection.penalty)?;
                    for pair in seek_boundary(&rotated, start, &params, &cfg.seek) {
                        push_pair(&mut cloud, block, &pair, cfg.alpha)?;
                    }
                    seeks += 1;
                    if let StopRule::Time(budget) = cfg.stop {
                        if clock.elapsed() > budget {
                            break 'outer StopReason::Time;
                        }
                    }
                    if cloud.len() > max_pairs {
                        break 'outer StopReason::Memory;
                    }
                }
            }
            let current = selection.starts.len();
            if should_escalate_with(counters[pass], current, cfg.escalation_ratio) {
                boxes[pass] = (cfg.escalation_factor * boxes[pass] as f64) as usize;
            }
            counters[pass] = current;
            on_pass(&PassReport {
                iteration,
                pass,
                boxes: selection.boxes_per_side,
                starts: current,
                penalty: selection.penalty,
                cloud_len: cloud.len(),
                elapsed: clock.elapsed(),
            });
            // a pass without starts never reaches the per-direction check
            if let StopRule::Time(budget) = cfg.stop {
                if clock.elapsed() > budget {
                    break 'outer StopReason::Time;
                }
            }
        }
        iteration += 1;
    };
    let stats = RunStats { outer_iterations: iteration, seeks, boxes, elapsed: clock.elapsed(), stopped_by };
    Ok((cloud, stats))
}

/// How much work the sampling baseline does.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SampleBudget {
    Count(usize),
    Time(Duration),
}

const TIME_CHECK_EVERY: usize = 1024;

/// Uniform random pairs, reduced and split by `alpha`. With
/// `keep_pairs = false` only the eigenvalues are stored.
pub fn random_sampling_baseline(block: &BlockMatrix, budget: SampleBudget, alpha: f64, seed: u64, keep_pairs: bool) -> PointCloud {
    let mut rng = rng_from_seed(seed);
    let mut cloud = if keep_pairs { PointCloud::with_pairs(block.n1(), block.n2()) } else { PointCloud::points_only() };
    let clock = Instant::now();
    let mut drawn = 0usize;
    loop {
        match budget {
            SampleBudget::Count(n) if drawn >= n => break,
            SampleBudget::Time(d) if drawn % TIME_CHECK_EVERY == 0 && clock.elapsed() > d => break,
            _ => {}
        }
        let pair = sample_unit_pair(block.n1(), block.n2(), &mut rng);
        push_pair(&mut cloud, block, &pair, alpha).expect("sampled pairs match the block");
        drawn += 1;
    }
    cloud
}
