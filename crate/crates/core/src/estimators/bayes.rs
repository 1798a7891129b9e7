//! Bayesian phase estimation on a grid.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::export::{csv_table, sig17};
use crate::metrology::{fisher_information, ProbabilityModel};

use super::report::{EstimationReport, EstimatorKind};
use super::sampling::{log_likelihood_counts, sample_stream, OutcomeSample};
use super::{Domain, EstimatorError, Result};

pub const DEFAULT_POSTERIOR_POINTS: usize = 2048;
/// Largest allowed ratio of the posterior density at either border to its
/// maximum for [`bayes_variance_bound`].
pub const BORDER_RATIO: f64 = 1e-6;

const BISECTION_STEPS: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Prior {
    /// Uniform on the domain.
    Flat,
    Gaussian {
        mean: f64,
        sd: f64,
    },
    /// Unnormalised density given at the grid points.
    Tabulated {
        values: Vec<f64>,
    },
}

impl Prior {
    pub fn tag(&self) -> &'static str {
        match self {
            Prior::Flat => "flat",
            Prior::Gaussian { .. } => "gaussian",
            Prior::Tabulated { .. } => "tabulated",
        }
    }

    fn log_density(&self, grid: &[f64]) -> Result<Vec<f64>> {
        let values: Vec<f64> = match self {
            Prior::Flat => vec![1.0; grid.len()],
            Prior::Gaussian { mean, sd } => {
                if !(sd.is_finite() && *sd > 0.0) {
                    return Err(EstimatorError::Prior);
                }
                return Ok(grid.iter().map(|x| -0.5 * ((x - mean) / sd).powi(2)).collect());
            }
            Prior::Tabulated { values } => {
                if values.len() != grid.len() {
                    return Err(EstimatorError::Prior);
                }
                values.clone()
            }
        };
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) || values.iter().all(|&v| v == 0.0) {
            return Err(EstimatorError::Prior);
        }
        Ok(values.iter().map(|v| v.ln()).collect())
    }
}

/// Posterior density tabulated on an equally spaced grid; the trapezoidal
/// integral of `density` is one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorDistribution {
    pub grid: Vec<f64>,
    pub density: Vec<f64>,
    pub prior: String,
}

impl PosteriorDistribution {
    fn step(&self) -> f64 {
        self.grid[1] - self.grid[0]
    }

    /// Trapezoidal `∫ f(φ) P(φ) dφ`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        trapezoid(
            self.step(),
            self.grid.iter().zip(&self.density).map(|(&x, &p)| f(x) * p),
        )
    }

    pub fn mean(&self) -> f64 {
        self.integrate(|x| x)
    }

    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        self.integrate(|x| (x - mu).powi(2))
    }

    /// Grid point of largest density.
    pub fn map(&self) -> f64 {
        let k = self
            .density
            .iter()
            .enumerate()
            .fold(0, |best, (i, &p)| if p > self.density[best] { i } else { best });
        self.grid[k]
    }

    /// Mass below `x` for the piecewise-linear density.
    pub fn cdf(&self, x: f64) -> f64 {
        let h = self.step();
        let (lo, hi) = (self.grid[0], *self.grid.last().expect("non-empty grid"));
        if x <= lo {
            return 0.0;
        }
        if x >= hi {
            return self.integrate(|_| 1.0);
        }
        let i = (((x - lo) / h) as usize).min(self.grid.len() - 2);
        let mut mass = 0.0;
        for k in 0..i {
            mass += 0.5 * h * (self.density[k] + self.density[k + 1]);
        }
        let t = x - self.grid[i];
        let slope = (self.density[i + 1] - self.density[i]) / h;
        mass + self.density[i] * t + 0.5 * slope * t * t
    }

    /// `grid_phi,posterior_density` rows.
    pub fn to_csv(&self) -> String {
        csv_table(
            &["grid_phi", "posterior_density"],
            self.grid
                .iter()
                .zip(&self.density)
                .map(|(&x, &p)| vec![sig17(x), sig17(p)]),
        )
    }
}

fn trapezoid(h: f64, values: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.collect();
    let n = v.len();
    h * (v.iter().sum::<f64>() - 0.5 * (v[0] + v[n - 1]))
}

/// `P(φ|ε) ∝ P(ε|φ) P(φ)` on `grid_points` equally spaced points spanning
/// `domain`, computed in log space with the maximum subtracted.
pub fn bayes_posterior(
    model: &ProbabilityModel,
    sample: &OutcomeSample,
    domain: Domain,
    prior: &Prior,
    grid_points: usize,
) -> Result<PosteriorDistribution> {
    posterior_counts(model, &sample.counts(), domain, prior, grid_points)
}

fn posterior_counts(
    model: &ProbabilityModel,
    counts: &[u64],
    domain: Domain,
    prior: &Prior,
    grid_points: usize,
) -> Result<PosteriorDistribution> {
    if grid_points < 3 {
        return Err(EstimatorError::Grid {
            min: 3,
            found: grid_points,
        });
    }
    let grid = domain.linspace(grid_points);
    let log_prior = prior.log_density(&grid)?;
    let log_post: Vec<f64> = grid
        .iter()
        .zip(&log_prior)
        .map(|(&phi, lp)| lp + log_likelihood_counts(model, counts, phi))
        .collect();
    let max = log_post.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return Err(EstimatorError::Underflow);
    }
    let raw: Vec<f64> = log_post.iter().map(|l| (l - max).exp()).collect();
    let norm = trapezoid(grid[1] - grid[0], raw.iter().copied());
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(EstimatorError::Underflow);
    }
    Ok(PosteriorDistribution {
        grid,
        density: raw.iter().map(|p| p / norm).collect(),
        prior: prior.tag().to_string(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CredibleInterval {
    pub center: f64,
    pub half_width: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PosteriorSummary {
    pub mean: f64,
    pub map: f64,
    pub variance: f64,
    pub credible: CredibleInterval,
}

/// Moments of the posterior and the symmetric interval around its mean
/// holding `mass` of the probability.
pub fn posterior_summaries(post: &PosteriorDistribution, mass: f64) -> PosteriorSummary {
    let mean = post.mean();
    PosteriorSummary {
        mean,
        map: post.map(),
        variance: post.variance(),
        credible: credible_interval(post, mean, mass),
    }
}

/// Smallest `Δ` with `∫_{c−Δ}^{c+Δ} P = mass`, found by bisection.
pub fn credible_interval(post: &PosteriorDistribution, center: f64, mass: f64) -> CredibleInterval {
    let lo = post.grid[0];
    let hi = *post.grid.last().expect("non-empty grid");
    let inside = |d: f64| post.cdf(center + d) - post.cdf(center - d);
    let (mut a, mut b) = (0.0, (center - lo).max(hi - center));
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (a + b);
        if inside(mid) < mass {
            a = mid;
        } else {
            b = mid;
        }
        if b - a < 1e-15 {
            break;
        }
    }
    CredibleInterval {
        center,
        half_width: 0.5 * (a + b),
        mass,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BayesBound {
    /// `G = ∫ (∂_φ P)² / P dφ`.
    pub g: f64,
    /// `1/G`.
    pub bound: f64,
    pub posterior_variance: f64,
    /// Posterior variance is at least the bound, up to one percent of grid
    /// discretisation slack.
    pub satisfied: bool,
}

/// Lower bound `1/G` on the posterior variance. The derivative is taken by
/// finite differences on the grid. The bound assumes the posterior vanishes
/// at both ends of the domain, which is checked first.
pub fn bayes_variance_bound(post: &PosteriorDistribution) -> Result<BayesBound> {
    let p = &post.density;
    let n = p.len();
    let max = p.iter().copied().fold(0.0, f64::max);
    let (left, right) = (p[0] / max, p[n - 1] / max);
    if left > BORDER_RATIO || right > BORDER_RATIO {
        return Err(EstimatorError::BorderSupport { left, right });
    }
    let h = post.step();
    let integrand = (0..n).map(|i| {
        let d = if i == 0 {
            (p[1] - p[0]) / h
        } else if i == n - 1 {
            (p[n - 1] - p[n - 2]) / h
        } else {
            (p[i + 1] - p[i - 1]) / (2.0 * h)
        };
        if p[i] > max * 1e-300 {
            d * d / p[i]
        } else {
            0.0
        }
    });
    let g = trapezoid(h, integrand);
    let bound = 1.0 / g;
    let posterior_variance = post.variance();
    Ok(BayesBound {
        g,
        bound,
        posterior_variance,
        satisfied: posterior_variance >= bound * 0.99,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BayesHarnessReport {
    /// Posterior means as estimates.
    pub estimates: EstimationReport,
    pub mean_posterior_variance: f64,
    /// Average of `G` over trials whose posterior vanishes at the borders.
    pub mean_g: f64,
    /// `1 / Σ_ε P(ε|θ) G(ε)`, estimated by the trial average.
    pub averaged_bound: f64,
    pub border_violations: usize,
}

#[allow(clippy::too_many_arguments)]
pub fn bayes_monte_carlo(
    model: &ProbabilityModel,
    theta_true: f64,
    m: usize,
    trials: usize,
    seed: u64,
    domain: Domain,
    prior: &Prior,
    grid_points: usize,
) -> Result<BayesHarnessReport> {
    if trials == 0 {
        return Err(EstimatorError::Count("trials"));
    }
    let runs = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let s = sample_stream(model, theta_true, m, seed, t)?;
            let post = bayes_posterior(model, &s, domain, prior, grid_points)?;
            let g = bayes_variance_bound(&post).ok().map(|b| b.g);
            Ok((post.mean(), post.variance(), g))
        })
        .collect::<Result<Vec<_>>>()?;
    let crlb = 1.0 / (m as f64 * fisher_information(model, theta_true).fi);
    let gs: Vec<f64> = runs.iter().filter_map(|r| r.2).collect();
    let mean_g = gs.iter().sum::<f64>() / gs.len() as f64;
    Ok(BayesHarnessReport {
        estimates: EstimationReport::from_estimates(
            EstimatorKind::PosteriorMean,
            theta_true,
            m,
            seed,
            runs.iter().map(|r| r.0).collect(),
            crlb,
        ),
        mean_posterior_variance: runs.iter().map(|r| r.1).sum::<f64>() / trials as f64,
        mean_g,
        averaged_bound: 1.0 / mean_g,
        border_violations: trials - gs.len(),
    })
}
