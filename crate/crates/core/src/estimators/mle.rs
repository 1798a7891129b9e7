//! Maximum-likelihood estimation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::metrology::{fisher_information, ProbabilityModel};

use super::report::{EstimationReport, EstimatorKind};
use super::sampling::{log_likelihood_counts, sample_stream, OutcomeSample};
use super::{Domain, EstimatorError, Result};

const GOLDEN: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MleOptions {
    pub grid_points: usize,
    pub refine_tol: f64,
}

impl Default for MleOptions {
    fn default() -> Self {
        Self {
            grid_points: 512,
            refine_tol: 1e-7,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MleResult {
    pub estimate: f64,
    pub log_likelihood: f64,
    /// The maximum lies on an end of the domain.
    pub boundary: bool,
}

/// Arg-max of the log-likelihood on `domain`: the best point of an
/// equally spaced grid, refined by golden-section search between its
/// neighbours.
pub fn mle(model: &ProbabilityModel, sample: &OutcomeSample, domain: Domain, opts: &MleOptions) -> Result<MleResult> {
    mle_counts(model, &sample.counts(), domain, opts)
}

pub(crate) fn mle_counts(
    model: &ProbabilityModel,
    counts: &[u64],
    domain: Domain,
    opts: &MleOptions,
) -> Result<MleResult> {
    if opts.grid_points < 3 {
        return Err(EstimatorError::Grid {
            min: 3,
            found: opts.grid_points,
        });
    }
    let ll = |phi: f64| log_likelihood_counts(model, counts, phi);
    let grid = domain.linspace(opts.grid_points);
    let (best, _) =
        grid.iter().map(|&g| ll(g)).enumerate().fold(
            (0, f64::NEG_INFINITY),
            |acc, (i, v)| if v > acc.1 { (i, v) } else { acc },
        );
    let a = grid[best.saturating_sub(1)];
    let b = grid[(best + 1).min(grid.len() - 1)];
    let estimate = golden_max(&ll, a, b, opts.refine_tol);
    let edge = 2.0 * opts.refine_tol;
    Ok(MleResult {
        estimate,
        log_likelihood: ll(estimate),
        boundary: estimate - domain.lo <= edge || domain.hi - estimate <= edge,
    })
}

/// Golden-section maximisation of a unimodal `f` on `[a, b]`; the ends are
/// candidates too, so a maximum on the boundary is found exactly.
fn golden_max(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let (lo, hi) = (a, b);
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = f(d);
        }
    }
    let mid = 0.5 * (a + b);
    [lo, hi, mid]
        .into_iter()
        .map(|x| (x, f(x)))
        .fold(
            (mid, f64::NEG_INFINITY),
            |acc, (x, v)| if v > acc.1 { (x, v) } else { acc },
        )
        .0
}

/// Repeats `sample → mle` for `trials` independent streams.
pub fn mle_monte_carlo(
    model: &ProbabilityModel,
    theta_true: f64,
    m: usize,
    trials: usize,
    seed: u64,
    domain: Domain,
    opts: &MleOptions,
) -> Result<EstimationReport> {
    if trials == 0 {
        return Err(EstimatorError::Count("trials"));
    }
    let results = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let s = sample_stream(model, theta_true, m, seed, t)?;
            mle(model, &s, domain, opts)
        })
        .collect::<Result<Vec<_>>>()?;
    let crlb = 1.0 / (m as f64 * fisher_information(model, theta_true).fi);
    let hits = results.iter().filter(|r| r.boundary).count();
    let mut report = EstimationReport::from_estimates(
        EstimatorKind::MaximumLikelihood,
        theta_true,
        m,
        seed,
        results.iter().map(|r| r.estimate).collect(),
        crlb,
    );
    report.boundary_hits = hits;
    Ok(report)
}
