//! Concentration of the randomly sampled reduced matrices around their
//! mean `E M = diag(tr A / n1, tr D / n2)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::PointCloud;
use crate::kernel::{eigen2x2, reduce, split_by_alpha, Reduced2x2};
use crate::linalg::{operator_norm, sample_unit_pair, worker_rng, BlockMatrix, C64};

/// Mean of `M_{x,y}` over independent uniform unit vectors. The
/// off-diagonal entries average to zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpectedReduced {
    pub ea: C64,
    pub ed: C64,
}

impl ExpectedReduced {
    pub fn as_reduced(&self) -> Reduced2x2 {
        Reduced2x2::new(self.ea, C64::new(0.0, 0.0), C64::new(0.0, 0.0), self.ed)
    }

    pub fn spectrum(&self) -> Vec<C64> {
        eigenvalue_set(&self.as_reduced())
    }
}

pub fn expected_reduced(block: &BlockMatrix) -> ExpectedReduced {
    ExpectedReduced { ea: block.a().trace() / block.n1() as f64, ed: block.d().trace() / block.n2() as f64 }
}

/// Eigenvalues as a set: a double root appears once.
pub fn eigenvalue_set(m: &Reduced2x2) -> Vec<C64> {
    let [l0, l1] = eigen2x2(m);
    if l0 == l1 {
        vec![l0]
    } else {
        vec![l0, l1]
    }
}

/// `sup_{k in K} inf_{l in L} |k - l|`.
pub fn one_sided_distance(k: &[C64], l: &[C64]) -> f64 {
    k.iter()
        .map(|p| l.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

/// Hausdorff distance of two finite point sets.
pub fn hausdorff(k: &[C64], l: &[C64]) -> Result<f64> {
    if k.is_empty() || l.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(one_sided_distance(k, l).max(one_sided_distance(l, k)))
}

/// `(d_H(sigma(M1), sigma(M2)), sqrt((|M1| + |M2|) |M1 - M2|))`; the
/// first never exceeds the second.
pub fn perturbation_bound(m1: &Reduced2x2, m2: &Reduced2x2) -> (f64, f64) {
    let lhs = hausdorff(&eigenvalue_set(m1), &eigenvalue_set(m2)).expect("spectra are non-empty");
    let rhs = ((m1.norm() + m2.norm()) * m1.sub(m2).norm()).sqrt();
    (lhs, rhs)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConcentrationConfig {
    /// Total dimensions, strictly increasing.
    pub dims: Vec<usize>,
    pub samples_per_dim: usize,
    pub epsilons: Vec<f64>,
    pub seed: u64,
    /// Sampled eigenvalues kept per dimension for plotting.
    pub keep_points: usize,
}

impl ConcentrationConfig {
    pub fn new(dims: Vec<usize>, samples_per_dim: usize, epsilons: Vec<f64>, seed: u64) -> Self {
        Self { dims, samples_per_dim, epsilons, seed, keep_points: 0 }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.dims.is_empty() {
            return bad("at least one dimension is required".into());
        }
        if self.dims.windows(2).any(|w| w[0] >= w[1]) {
            return bad(format!("dimensions must be strictly increasing: {:?}", self.dims));
        }
        if self.samples_per_dim < 1000 {
            return bad(format!("at least 1000 samples per dimension are required, got {}", self.samples_per_dim));
        }
        if self.epsilons.is_empty() || self.epsilons.iter().any(|e| !e.is_finite() || *e < 0.0) {
            return bad("thresholds must be finite and nonnegative".into());
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConcentrationReport {
    pub dims: Vec<usize>,
    /// `min(n1, n2)` per dimension.
    pub n0: Vec<usize>,
    pub norms: Vec<f64>,
    pub epsilons: Vec<f64>,
    /// `exceedance[i][j]`: fraction of samples at `dims[i]` whose spectrum
    /// lies farther than `epsilons[j]` from that of the mean.
    pub exceedance: Vec<Vec<f64>>,
    pub samples_per_dim: usize,
    /// Per threshold: least-squares slope of `ln(exceedance)` against
    /// `n0` over the nonzero fractions; absent below two such points.
    pub fitted_decay: Vec<Option<f64>>,
    pub seed: u64,
}

/// Least-squares slope of `y` on `x`; `None` without two distinct `x`.
pub fn least_squares_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() < 2 {
        return None;
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    Some(sxy / sxx)
}

/// For each dimension, sample uniform pairs and tabulate how often the
/// reduced spectrum strays from the spectrum of `E M` by more than each
/// threshold. Returns the report and, per dimension, up to
/// `keep_points` sampled eigenvalue pairs.
pub fn concentration_experiment(
    family: impl Fn(usize) -> Result<BlockMatrix>,
    cfg: &ConcentrationConfig,
) -> Result<(ConcentrationReport, Vec<PointCloud>)> {
    cfg.validate()?;
    let mut report = ConcentrationReport {
        dims: cfg.dims.clone(),
        n0: Vec::new(),
        norms: Vec::new(),
        epsilons: cfg.epsilons.clone(),
        exceedance: Vec::new(),
        samples_per_dim: cfg.samples_per_dim,
        fitted_decay: Vec::new(),
        seed: cfg.seed,
    };
    let mut clouds = Vec::new();
    for (index, &dim) in cfg.dims.iter().enumerate() {
        let block = family(dim)?;
        let target = expected_reduced(&block).spectrum();
        let mut rng = worker_rng(cfg.seed, index as u64);
        let mut counts = vec![0usize; cfg.epsilons.len()];
        let mut cloud = PointCloud::points_only();
        for s in 0..cfg.samples_per_dim {
            let pair = sample_unit_pair(block.n1(), block.n2(), &mut rng);
            let m = reduce(&block, &pair)?;
            let d = hausdorff(&eigenvalue_set(&m), &target)?;
            for (count, eps) in counts.iter_mut().zip(&cfg.epsilons) {
                if d > *eps {
                    *count += 1;
                }
            }
            if s < cfg.keep_points {
                let split = split_by_alpha(eigen2x2(&m), 0.0);
                cloud.w.push(split.lambda_alpha);
                cloud.w_tilde.push(split.lambda_alpha_pi);
            }
        }
        report.n0.push(block.n1().min(block.n2()));
        report.norms.push(operator_norm(&block.assemble()));
        report.exceedance.push(counts.iter().map(|c| *c as f64 / cfg.samples_per_dim as f64).collect());
        clouds.push(cloud);
    }
    for j in 0..cfg.epsilons.len() {
        let (x, y): (Vec<f64>, Vec<f64>) = report
            .n0
            .iter()
            .zip(&report.exceedance)
            .filter(|(_, row)| row[j] > 0.0)
            .map(|(n0, row)| (*n0 as f64, row[j].ln()))
            .unzip();
        report.fitted_decay.push(least_squares_slope(&x, &y));
    }
    Ok((report, clouds))
}
