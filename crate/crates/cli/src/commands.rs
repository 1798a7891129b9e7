//! One function per subcommand. Each returns a JSON result value and the
//! CSV rendering of the same run.

use phase_metrology::estimators::{
    bayes_monte_carlo, bayes_posterior, bayes_variance_bound, default_domain, is_reflection_symmetric, mle_monte_carlo,
    moments_monte_carlo, posterior_summaries, sample, Domain, EstimationReport, EstimatorError, MleOptions,
    OutcomeSample,
};
use phase_metrology::export::{csv_table, sig17};
use phase_metrology::metrology::{
    bound_heisenberg, bound_shot_noise, fisher_information, optimal_axis, qfi_state, quantum_cramer_rao, Povm,
    ProbabilityModel,
};
use phase_metrology::probes::QuantumState;
use phase_metrology::spinspace::{SpinAxis, SpinSpace};
use phase_metrology::witness::{entanglement_depth, squeezing, squeezing_fisher_check, AxisTriple, FisherSource};
use serde_json::{json, Value};

use crate::config::{PovmKind, RunConfig};
use crate::CliError;

/// Above this fraction of boundary estimates an MLE run is reported as failed.
const MAX_BOUNDARY_FRACTION: f64 = 0.5;

pub struct Output {
    pub result: Value,
    pub csv: String,
}

fn probe(cfg: &RunConfig) -> Result<QuantumState, CliError> {
    let space = SpinSpace::new(cfg.n_particles).map_err(|e| CliError::Config(e.to_string()))?;
    cfg.probe.build(space).map_err(|e| CliError::Config(e.to_string()))
}

fn model(cfg: &RunConfig, state: &QuantumState) -> Result<ProbabilityModel, CliError> {
    let povm = match cfg.povm {
        PovmKind::Counting => Povm::number_counting(state.space()),
        PovmKind::Projection => {
            let pure = state
                .as_pure()
                .ok_or_else(|| CliError::Config("the projection POVM needs a pure probe".into()))?;
            Povm::probe_projection(&pure)
        }
    };
    ProbabilityModel::new(state.clone(), cfg.axis, povm).map_err(|e| CliError::Config(e.to_string()))
}

/// Estimation interval. Models that cannot distinguish `θ` from `−θ` need
/// an explicit one, since the choice of branch is the user's.
fn domain(cfg: &RunConfig, model: &ProbabilityModel) -> Result<Domain, CliError> {
    match cfg.domain {
        Some(d) => Ok(d),
        None if is_reflection_symmetric(model) => Err(CliError::Config(format!(
            "P(ε|θ) is even in θ for this probe and measurement; pass --domain (for example 0:{})",
            default_domain(model).hi
        ))),
        None => Ok(default_domain(model)),
    }
}

fn shots(cfg: &RunConfig) -> usize {
    cfg.m as usize
}

/// Quantum Fisher information of the probe for the configured axis, scaled
/// by the generator spread.
fn qfi_scaled(cfg: &RunConfig, state: &QuantumState, axis: SpinAxis) -> f64 {
    qfi_state(state, axis) * cfg.h_range * cfg.h_range
}

fn estimator_error(e: EstimatorError) -> CliError {
    match e {
        EstimatorError::Underflow | EstimatorError::OutOfRange { .. } => CliError::Statistical(e.to_string()),
        other => CliError::Config(other.to_string()),
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn opt(x: Option<f64>) -> String {
    x.map(sig17).unwrap_or_default()
}

pub fn bounds(cfg: &RunConfig) -> Result<Output, CliError> {
    let state = probe(cfg)?;
    let fq = qfi_scaled(cfg, &state, cfg.axis);
    let sn = bound_shot_noise(cfg.n_particles, cfg.m, cfg.h_range);
    let hl = bound_heisenberg(cfg.n_particles, cfg.m, cfg.h_range);
    let qcr = quantum_cramer_rao(cfg.m, fq);
    Ok(Output {
        result: json!({
            "probe": cfg.probe.kind(),
            "n_particles": cfg.n_particles,
            "m": cfg.m,
            "qfi": fq,
            "shot_noise": sn,
            "heisenberg": hl,
            "quantum_cramer_rao": qcr,
        }),
        csv: csv_table(
            &["n", "m", "qfi", "shot_noise", "heisenberg", "quantum_cramer_rao"],
            [vec![
                cfg.n_particles.to_string(),
                cfg.m.to_string(),
                sig17(fq),
                sig17(sn),
                sig17(hl),
                sig17(qcr),
            ]],
        ),
    })
}

pub fn fisher_scan(cfg: &RunConfig) -> Result<Output, CliError> {
    let state = probe(cfg)?;
    let model = model(cfg, &state)?;
    let fq = qfi_state(&state, cfg.axis);
    let four_var = 4.0 * state.variance(state.space().op_j(cfg.axis).matrix());
    let rows: Vec<_> = cfg
        .thetas()
        .into_iter()
        .map(|t| {
            let r = fisher_information(&model, t);
            (t, r.fi, r.limit_point())
        })
        .collect();
    let csv = csv_table(
        &["theta", "fisher", "qfi", "four_var_jn", "limit_point"],
        rows.iter().map(|&(t, f, lim)| {
            vec![
                sig17(t),
                sig17(f),
                sig17(fq),
                sig17(four_var),
                u8::from(lim).to_string(),
            ]
        }),
    );
    let result = json!({
        "qfi": fq,
        "four_var_jn": four_var,
        "rows": rows
            .iter()
            .map(|&(t, f, lim)| json!({"theta": t, "fisher": f, "limit_point": lim}))
            .collect::<Vec<_>>(),
    });
    Ok(Output { result, csv })
}

pub fn qfi(cfg: &RunConfig) -> Result<Output, CliError> {
    let state = probe(cfg)?;
    let fq = qfi_scaled(cfg, &state, cfg.axis);
    let (best, best_fq) = optimal_axis(&state).map_err(|e| CliError::Config(e.to_string()))?;
    let best_fq = best_fq * cfg.h_range * cfg.h_range;
    let b = best.vector();
    Ok(Output {
        result: json!({
            "axis": cfg.axis,
            "qfi": fq,
            "optimal_axis": best,
            "optimal_qfi": best_fq,
            "useful_entanglement": fq > cfg.n_particles as f64 * cfg.h_range * cfg.h_range,
        }),
        csv: csv_table(
            &["n", "qfi", "optimal_qfi", "optimal_nx", "optimal_ny", "optimal_nz"],
            [vec![
                cfg.n_particles.to_string(),
                sig17(fq),
                sig17(best_fq),
                sig17(b.x),
                sig17(b.y),
                sig17(b.z),
            ]],
        ),
    })
}

pub fn mle(cfg: &RunConfig) -> Result<Output, CliError> {
    let state = probe(cfg)?;
    let model = model(cfg, &state)?;
    let dom = domain(cfg, &model)?;
    let report = mle_monte_carlo(
        &model,
        cfg.theta,
        shots(cfg),
        cfg.trials,
        cfg.seed,
        dom,
        &MleOptions::default(),
    )
    .map_err(estimator_error)?;
    if report.boundary_fraction() > MAX_BOUNDARY_FRACTION {
        return Err(CliError::Statistical(format!(
            "{} of {} maximum-likelihood estimates sit on the domain boundary [{}, {}]",
            report.boundary_hits, report.trials, dom.lo, dom.hi
        )));
    }
    Ok(Output {
        result: json!({ "domain": dom, "report": report }),
        csv: report.to_csv(),
    })
}

pub fn bayes(cfg: &RunConfig) -> Result<Output, CliError> {
    let state = probe(cfg)?;
    let model = model(cfg, &state)?;
    let dom = domain(cfg, &model)?;
    let data = if cfg.m == 0 {
        OutcomeSample::from_outcomes(&model, Vec::new())
    } else {
        sample(&model, cfg.theta, shots(cfg), cfg.seed)
    }
    .map_err(estimator_error)?;
    let post = bayes_posterior(&model, &data, dom, &cfg.prior, cfg.posterior_points).map_err(estimator_error)?;
    let summary = posterior_summaries(&post, cfg.credible_mass);
    let bound = bayes_variance_bound(&post).ok();
    let harness = if cfg.m == 0 {
        None
    } else {
        Some(
            bayes_monte_carlo(
                &model,
                cfg.theta,
                shots(cfg),
                cfg.trials,
                cfg.seed,
                dom,
                &cfg.prior,
                cfg.posterior_points,
            )
            .map_err(estimator_error)?,
        )
    };
    Ok(Output {
        result: json!({
            "domain": dom,
            "counts": data.counts(),
            "summary": summary,
            "bound": bound,
            "harness": harness,
        }),
        csv: post.to_csv(),
    })
}

pub fn moments(cfg: &RunConfig) -> Result<Output, CliError> {
    let state = probe(cfg)?;
    let model = model(cfg, &state)?;
    let dom = domain(cfg, &model)?;
    let observable = state.space().op_j(cfg.observable);
    let report: EstimationReport =
        moments_monte_carlo(&model, &observable, cfg.theta, shots(cfg), cfg.trials, cfg.seed, dom)
            .map_err(estimator_error)?;
    let predicted = opt(report.prediction);
    let csv = csv_table(
        &["trial", "estimate", "predicted_variance"],
        report
            .estimates
            .iter()
            .enumerate()
            .map(|(i, &e)| vec![i.to_string(), sig17(e), predicted.clone()]),
    );
    Ok(Output {
        result: json!({ "domain": dom, "observable": cfg.observable, "report": report }),
        csv,
    })
}

pub fn depth(cfg: &RunConfig) -> Result<Output, CliError> {
    let (value, source) = match cfg.fisher_value {
        Some(f) => (f, FisherSource::Classical),
        None => (qfi_scaled(cfg, &probe(cfg)?, cfg.axis), FisherSource::Quantum),
    };
    let report =
        entanglement_depth(value, cfg.n_particles, cfg.h_range, source).map_err(|e| CliError::Config(e.to_string()))?;
    Ok(Output {
        csv: report.staircase_csv(),
        result: to_value(&report),
    })
}

pub fn squeeze(cfg: &RunConfig) -> Result<Output, CliError> {
    let state = probe(cfg)?;
    let axes = AxisTriple::from_mean_spin(&state, cfg.axis).ok_or_else(|| {
        CliError::Config("mean spin vanishes, so squeezing parameters are undefined for this probe".into())
    })?;
    let report = squeezing(&state, axes);
    let check = squeezing_fisher_check(&state, axes).ok();
    Ok(Output {
        csv: csv_table(
            &[
                "n",
                "variance_n1",
                "mean_n2",
                "mean_n3",
                "xi_r_squared",
                "xi_r_prime_squared",
            ],
            [vec![
                report.n_particles.to_string(),
                sig17(report.variance_n1),
                sig17(report.mean_n2),
                sig17(report.mean_n3),
                opt(report.xi_r_squared),
                opt(report.xi_r_prime_squared),
            ]],
        ),
        result: json!({ "report": report, "fisher_check": check }),
    })
}
