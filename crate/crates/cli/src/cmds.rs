//! Subcommand argument sets (clap), their config-file mirrors (strict
//! serde), and execution. Flags override config values; config values
//! override defaults.

use std::fs;

use clap::Args;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use renyicert_core::divergence::{DivergenceMethod, DivergenceOrder};
use renyicert_core::measure::{MetricSpec, Point, ProbabilityMeasure};
use renyicert_core::mechanisms::{BaseClassifier, LabelBudget, OutputMeasure, ProbabilisticMapping};
use renyicert_core::privacy::{self, CertMetric, DpVerdict};
use renyicert_core::robustness::{
    self, AttackBudget, DivergenceKind, RiskBudget, RobustnessReport, RobustnessVerdict,
};
use renyicert_core::{equivalence, kl_divergence, max_divergence, renyi_divergence};

use crate::errors::{
    json_input_error, CliError, CliResult, EXIT_INCONCLUSIVE, EXIT_OK, EXIT_VIOLATED,
};
use crate::io;

// ---------------------------------------------------------------------------
// config plumbing

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    subcommand: String,
    #[serde(default)]
    params: Value,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    output: Option<String>,
}

fn load_config<P: DeserializeOwned + Default>(
    path: &Option<String>,
    expected: &str,
) -> CliResult<(P, Option<u64>, Option<String>)> {
    let Some(path) = path else {
        return Ok((P::default(), None, None));
    };
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("config: cannot read '{path}': {e}")))?;
    let cfg: ConfigFile =
        serde_json::from_str(&text).map_err(|e| json_input_error("config", e))?;
    if cfg.subcommand != expected {
        return Err(CliError::Input(format!(
            "config: subcommand '{}' does not match '{expected}'",
            cfg.subcommand
        )));
    }
    let params: P = if cfg.params.is_null() {
        P::default()
    } else {
        serde_json::from_value(cfg.params).map_err(|e| json_input_error("config params", e))?
    };
    Ok((params, cfg.seed, cfg.output))
}

/// A JSON-typed argument: inline JSON text / file path on the CLI, or a
/// string-or-object in the config file.
fn json_arg<T: DeserializeOwned>(
    what: &str,
    cli: &Option<String>,
    cfg: Option<&Value>,
) -> CliResult<T> {
    match (cli, cfg) {
        (Some(s), _) => io::load_json_arg(what, s),
        (None, Some(Value::String(s))) => io::load_json_arg(what, s),
        (None, Some(v)) => serde_json::from_value(v.clone())
            .map_err(|e| json_input_error(&format!("config {what}"), e)),
        (None, None) => Err(CliError::Usage(format!("--{what} is required"))),
    }
}

fn require<T>(v: Option<T>, flag: &str) -> CliResult<T> {
    v.ok_or_else(|| CliError::Usage(format!("--{flag} is required")))
}

fn parse_order(s: &str) -> CliResult<DivergenceOrder> {
    s.parse()
        .map_err(|e: renyicert_core::Error| CliError::Usage(e.to_string()))
}

fn dp_exit(verdict: DpVerdict) -> u8 {
    match verdict {
        DpVerdict::Holds => EXIT_OK,
        DpVerdict::Violated => EXIT_VIOLATED,
        DpVerdict::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

fn pick_output(cli: Option<String>, cfg: Option<String>) -> Option<String> {
    cli.or(cfg)
}

// ---------------------------------------------------------------------------
// divergence

#[derive(Args)]
pub struct DivergenceArgs {
    /// Config file providing defaults for any flag not given.
    #[arg(long)]
    pub config: Option<String>,
    /// First measure: inline JSON or a path.
    #[arg(long)]
    pub m1: Option<String>,
    /// Second measure: inline JSON or a path.
    #[arg(long)]
    pub m2: Option<String>,
    /// Order: a number > 1, "kl", or "max".
    #[arg(long)]
    pub order: Option<String>,
    /// auto | quadrature | mc
    #[arg(long)]
    pub method: Option<String>,
    /// Monte Carlo sample count.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
struct DivergenceParams {
    m1: Option<Value>,
    m2: Option<Value>,
    order: Option<String>,
    method: Option<String>,
    n: Option<usize>,
    seed: Option<u64>,
}

pub fn divergence(args: DivergenceArgs, output: Option<String>) -> CliResult<u8> {
    let (cfg, cfg_seed, cfg_out) = load_config::<DivergenceParams>(&args.config, "divergence")?;
    let m1: ProbabilityMeasure = json_arg("m1", &args.m1, cfg.m1.as_ref())?;
    let m2: ProbabilityMeasure = json_arg("m2", &args.m2, cfg.m2.as_ref())?;
    let order = parse_order(&require(args.order.or(cfg.order), "order")?)?;
    let method = args.method.or(cfg.method).unwrap_or_else(|| "auto".into());
    let n = args.n.or(cfg.n).unwrap_or(100_000);
    let seed = args.seed.or(cfg.seed).or(cfg_seed).unwrap_or(0);

    let (result, stochastic) = match method.as_str() {
        "auto" => (renyi_divergence(&m1, &m2, order)?, false),
        "quadrature" => match order {
            DivergenceOrder::Finite(l) => (renyicert_core::renyi_quadrature(&m1, &m2, l)?, false),
            DivergenceOrder::Kl => (kl_divergence(&m1, &m2)?, false),
            DivergenceOrder::Max => (max_divergence(&m1, &m2)?, false),
        },
        "mc" => {
            let DivergenceOrder::Finite(l) = order else {
                return Err(CliError::Usage(
                    "--method mc requires a finite --order".into(),
                ));
            };
            (renyicert_core::renyi_monte_carlo(&m1, &m2, l, n, seed)?, true)
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown --method '{other}' (auto | quadrature | mc)"
            )))
        }
    };

    let mut out = io::to_value(&result);
    if stochastic || result.method == DivergenceMethod::MonteCarlo {
        out["seed"] = json!(seed);
        out["n"] = json!(n);
    }
    io::emit(&out, pick_output(output, cfg_out).as_deref())?;
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// apply

#[derive(Args)]
pub struct ApplyArgs {
    #[arg(long)]
    pub config: Option<String>,
    /// Mapping: inline JSON or a path.
    #[arg(long)]
    pub mapping: Option<String>,
    /// Input point: comma-separated coordinates, or an index for finite
    /// mappings.
    #[arg(long)]
    pub x: Option<String>,
    /// Also compute the label distribution: exact | mc
    #[arg(long)]
    pub labels: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
struct ApplyParams {
    mapping: Option<Value>,
    x: Option<String>,
    labels: Option<String>,
    n: Option<usize>,
    seed: Option<u64>,
}

pub fn apply(args: ApplyArgs, output: Option<String>) -> CliResult<u8> {
    let (cfg, cfg_seed, cfg_out) = load_config::<ApplyParams>(&args.config, "apply")?;
    let mapping: ProbabilisticMapping = json_arg("mapping", &args.mapping, cfg.mapping.as_ref())?;
    let x = io::parse_point(
        &require(args.x.or(cfg.x), "x")?,
        mapping.domain_size().is_some(),
    )?;
    let out_measure = mapping.apply(&x)?;
    let mut out = json!({ "output": output_measure_value(&out_measure) });

    let labels = args.labels.or(cfg.labels);
    if let Some(mode) = labels {
        let n = args.n.or(cfg.n).unwrap_or(100_000);
        let seed = args.seed.or(cfg.seed).or(cfg_seed).unwrap_or(0);
        let budget = match mode.as_str() {
            "exact" => LabelBudget::Exact,
            "mc" => LabelBudget::MonteCarlo { n, seed },
            other => {
                return Err(CliError::Usage(format!(
                    "unknown --labels mode '{other}' (exact | mc)"
                )))
            }
        };
        let est = mapping.label_distribution(&x, budget)?;
        out["label_distribution"] = io::to_value(&est);
        if let LabelBudget::MonteCarlo { n, seed } = budget {
            out["seed"] = json!(seed);
            out["n"] = json!(n);
        }
    }
    io::emit(&out, pick_output(output, cfg_out).as_deref())?;
    Ok(EXIT_OK)
}

fn output_measure_value(m: &OutputMeasure) -> Value {
    match m {
        OutputMeasure::Exact(measure) => io::to_value(measure),
        OutputMeasure::Pushforward { base, noise, center } => json!({
            "pushforward": { "base": io::to_value(base), "noise": io::to_value(noise), "center": center }
        }),
    }
}

// ---------------------------------------------------------------------------
// certify-rdp

#[derive(Args)]
pub struct CertifyRdpArgs {
    #[arg(long)]
    pub config: Option<String>,
    #[arg(long)]
    pub mapping: Option<String>,
    /// l1 | l2 | linf | hamming | discrete
    #[arg(long)]
    pub metric: Option<String>,
    #[arg(long)]
    pub dimension: Option<usize>,
    /// Explicit finite metric: JSON file with {"distances": [[...]]}.
    #[arg(long)]
    pub metric_table: Option<String>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Order: a number > 1, "kl", or "max".
    #[arg(long)]
    pub lambda: Option<String>,
    /// Target epsilon; when present the exit code reports the verdict.
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
struct CertifyRdpParams {
    mapping: Option<Value>,
    metric: Option<String>,
    dimension: Option<usize>,
    metric_table: Option<String>,
    alpha: Option<f64>,
    lambda: Option<String>,
    epsilon: Option<f64>,
    seed: Option<u64>,
}

pub fn certify_rdp(args: CertifyRdpArgs, output: Option<String>) -> CliResult<u8> {
    let (cfg, cfg_seed, cfg_out) = load_config::<CertifyRdpParams>(&args.config, "certify-rdp")?;
    let mapping: ProbabilisticMapping = json_arg("mapping", &args.mapping, cfg.mapping.as_ref())?;
    let metric = io::build_metric(
        args.metric.or(cfg.metric).as_deref(),
        args.dimension.or(cfg.dimension),
        args.metric_table.or(cfg.metric_table).as_deref(),
        &mapping,
    )?;
    let alpha = require(args.alpha.or(cfg.alpha), "alpha")?;
    let lambda = parse_order(&require(args.lambda.or(cfg.lambda), "lambda")?)?;
    let seed = args.seed.or(cfg.seed).or(cfg_seed).unwrap_or(0);
    let epsilon = args.epsilon.or(cfg.epsilon);

    let certificate = privacy::certify_rdp(&mapping, &metric, alpha, lambda, seed)?;
    let mut out = json!({ "certificate": io::to_value(&certificate), "seed": seed });
    let code = match epsilon {
        None => EXIT_OK,
        Some(eps) => {
            let verdict = privacy::verdict_against(&certificate, eps);
            out["verdict"] = io::to_value(&verdict);
            out["epsilon_target"] = json!(eps);
            dp_exit(verdict)
        }
    };
    io::emit(&out, pick_output(output, cfg_out).as_deref())?;
    Ok(code)
}

// ---------------------------------------------------------------------------
// certify-dp

#[derive(Args)]
pub struct CertifyDpArgs {
    #[arg(long)]
    pub config: Option<String>,
    /// Finite-table mapping over the databases.
    #[arg(long)]
    pub mapping: Option<String>,
    /// JSON file: an array of databases, each an array of record ids.
    #[arg(long)]
    pub databases: Option<String>,
    #[arg(long)]
    pub epsilon: Option<f64>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
struct CertifyDpParams {
    mapping: Option<Value>,
    databases: Option<Value>,
    epsilon: Option<f64>,
}

pub fn certify_dp(args: CertifyDpArgs, output: Option<String>) -> CliResult<u8> {
    let (cfg, _seed, cfg_out) = load_config::<CertifyDpParams>(&args.config, "certify-dp")?;
    let mapping: ProbabilisticMapping = json_arg("mapping", &args.mapping, cfg.mapping.as_ref())?;
    let databases: Vec<Vec<u64>> = json_arg("databases", &args.databases, cfg.databases.as_ref())?;
    let epsilon = require(args.epsilon.or(cfg.epsilon), "epsilon")?;
    let outcome = privacy::certify_classical_dp(&mapping, &databases, epsilon)?;
    let out = json!({
        "verdict": io::to_value(&outcome.verdict),
        "certificate": io::to_value(&outcome.certificate),
        "epsilon_target": epsilon,
    });
    io::emit(&out, pick_output(output, cfg_out).as_deref())?;
    Ok(dp_exit(outcome.verdict))
}

// ---------------------------------------------------------------------------
// attack

#[derive(Args)]
pub struct AttackArgs {
    #[arg(long)]
    pub config: Option<String>,
    /// Base classifier: inline JSON or a path.
    #[arg(long)]
    pub classifier: Option<String>,
    #[arg(long)]
    pub x: Option<String>,
    #[arg(long)]
    pub metric: Option<String>,
    #[arg(long)]
    pub dimension: Option<usize>,
    #[arg(long)]
    pub max_radius: Option<f64>,
    #[arg(long)]
    pub resolution: Option<f64>,
    #[arg(long)]
    pub directions: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
struct AttackParams {
    classifier: Option<Value>,
    x: Option<String>,
    metric: Option<String>,
    dimension: Option<usize>,
    max_radius: Option<f64>,
    resolution: Option<f64>,
    directions: Option<usize>,
    seed: Option<u64>,
}

pub fn attack(args: AttackArgs, output: Option<String>) -> CliResult<u8> {
    let (cfg, cfg_seed, cfg_out) = load_config::<AttackParams>(&args.config, "attack")?;
    let classifier: BaseClassifier =
        json_arg("classifier", &args.classifier, cfg.classifier.as_ref())?;
    let finite = classifier.domain_size().is_some();
    let x = io::parse_point(&require(args.x.or(cfg.x), "x")?, finite)?;
    let kind = require(args.metric.or(cfg.metric), "metric")?
        .parse()
        .map_err(|e: renyicert_core::Error| CliError::Usage(e.to_string()))?;
    let dimension = args
        .dimension
        .or(cfg.dimension)
        .or(classifier.input_dim())
        .unwrap_or(1);
    let metric = MetricSpec::new(kind, dimension).map_err(|e| CliError::Usage(e.to_string()))?;
    let seed = args.seed.or(cfg.seed).or(cfg_seed).unwrap_or(0);
    let budget = AttackBudget {
        max_radius: require(args.max_radius.or(cfg.max_radius), "max-radius")?,
        resolution: args.resolution.or(cfg.resolution).unwrap_or(1e-3),
        directions: args.directions.or(cfg.directions).unwrap_or(64),
        seed,
    };
    let result = robustness::craft_adversarial(&classifier, &x, &metric, &budget)?;
    let out = json!({
        "found": result.example.is_some(),
        "constant": result.constant,
        "search": io::to_value(&result.search),
        "example": result.example.as_ref().map(io::to_value),
        "seed": seed,
    });
    io::emit(&out, pick_output(output, cfg_out).as_deref())?;
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// robustness

#[derive(Args)]
pub struct RobustnessArgs {
    #[arg(long)]
    pub config: Option<String>,
    #[arg(long)]
    pub mapping: Option<String>,
    /// Dataset: CSV (a point per row, optional `w` column) or a JSON
    /// DataDistribution.
    #[arg(long)]
    pub data: Option<String>,
    #[arg(long)]
    pub metric: Option<String>,
    #[arg(long)]
    pub dimension: Option<usize>,
    #[arg(long)]
    pub metric_table: Option<String>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Divergence threshold for generalized robustness (default 0.5 for the
    /// trivial distance).
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Divergence: a number > 1, "kl", "max", or "trivial". Omit for plain
    /// prediction-change risk of a deterministic mapping.
    #[arg(long)]
    pub lambda: Option<String>,
    /// Target gamma; when present the exit code reports the verdict.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Draws when the data distribution is a sampler.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub resolution: Option<f64>,
    #[arg(long)]
    pub directions: Option<usize>,
    #[arg(long)]
    pub sup_steps: Option<usize>,
    /// Evaluate input-noise mappings on Monte Carlo label distributions
    /// with this many draws per point.
    #[arg(long)]
    pub label_mc: Option<usize>,
    /// Bypass analytic ball bounds; use the grid + quadrature path.
    #[arg(long)]
    pub force_numeric: bool,
    /// Write per-point results (x-id, worst divergence, witness) to this CSV.
    #[arg(long)]
    pub per_point: Option<String>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
struct RobustnessParams {
    mapping: Option<Value>,
    data: Option<String>,
    metric: Option<String>,
    dimension: Option<usize>,
    metric_table: Option<String>,
    alpha: Option<f64>,
    epsilon: Option<f64>,
    lambda: Option<String>,
    gamma: Option<f64>,
    samples: Option<usize>,
    seed: Option<u64>,
    resolution: Option<f64>,
    directions: Option<usize>,
    sup_steps: Option<usize>,
    label_mc: Option<usize>,
    force_numeric: Option<bool>,
    per_point: Option<String>,
}

pub fn robustness(args: RobustnessArgs, output: Option<String>) -> CliResult<u8> {
    let (cfg, cfg_seed, cfg_out) = load_config::<RobustnessParams>(&args.config, "robustness")?;
    let mapping: ProbabilisticMapping = json_arg("mapping", &args.mapping, cfg.mapping.as_ref())?;
    let finite = mapping.domain_size().is_some();
    let data = io::load_data(&require(args.data.or(cfg.data), "data")?, finite)?;
    let alpha = require(args.alpha.or(cfg.alpha), "alpha")?;
    let seed = args.seed.or(cfg.seed).or(cfg_seed).unwrap_or(0);
    let per_point_path = args.per_point.or(cfg.per_point);
    let budget = RiskBudget {
        data_samples: args.samples.or(cfg.samples).unwrap_or(1000),
        seed,
        resolution: args.resolution.or(cfg.resolution).unwrap_or(1e-3),
        directions: args.directions.or(cfg.directions).unwrap_or(64),
        sup_steps: args.sup_steps.or(cfg.sup_steps).unwrap_or(64),
        force_numeric: args.force_numeric || cfg.force_numeric.unwrap_or(false),
        label_mc: args.label_mc.or(cfg.label_mc),
        collect_per_point: per_point_path.is_some(),
    };
    let lambda = args.lambda.or(cfg.lambda);
    let epsilon = args.epsilon.or(cfg.epsilon);
    let gamma = args.gamma.or(cfg.gamma);

    let mut report = match &lambda {
        None => {
            if epsilon.is_some() {
                return Err(CliError::Usage(
                    "--epsilon needs --lambda (an order, \"max\", \"kl\" or \"trivial\")".into(),
                ));
            }
            let ProbabilisticMapping::Deterministic { base } = &mapping else {
                return Err(CliError::Usage(
                    "prediction-change risk applies to deterministic mappings; \
                     pass --lambda for generalized robustness"
                        .into(),
                ));
            };
            let CertMetric::Spec(spec) = io::build_metric(
                args.metric.or(cfg.metric).as_deref(),
                args.dimension.or(cfg.dimension),
                args.metric_table.or(cfg.metric_table).as_deref(),
                &mapping,
            )?
            else {
                return Err(CliError::Usage(
                    "prediction-change risk needs a --metric, not a metric table".into(),
                ));
            };
            robustness::prediction_change_risk(base, &data, &spec, alpha, &budget)?
        }
        Some(kind_text) => {
            let kind: DivergenceKind = kind_text
                .parse()
                .map_err(|e: renyicert_core::Error| CliError::Usage(e.to_string()))?;
            let epsilon = match (epsilon, kind) {
                (Some(e), _) => e,
                (None, DivergenceKind::Trivial) => 0.5,
                (None, _) => {
                    return Err(CliError::Usage(
                        "--epsilon is required for a divergence order".into(),
                    ))
                }
            };
            let metric = io::build_metric(
                args.metric.or(cfg.metric).as_deref(),
                args.dimension.or(cfg.dimension),
                args.metric_table.or(cfg.metric_table).as_deref(),
                &mapping,
            )?;
            robustness::check_generalized_robustness(
                &mapping, &data, &metric, alpha, epsilon, kind, &budget,
            )?
        }
    };

    if let Some(path) = &per_point_path {
        write_per_point_csv(path, &report)?;
    }
    report.per_point = None; // the CSV carries the detail

    let mut out = io::to_value(&report);
    out["seed"] = json!(seed);
    let code = match gamma {
        None => EXIT_OK,
        Some(g) => {
            let verdict = robustness::verdict_against_gamma(&report, g);
            out["verdict"] = io::to_value(&verdict);
            out["gamma_target"] = json!(g);
            match verdict {
                RobustnessVerdict::Robust => EXIT_OK,
                RobustnessVerdict::NotRobust => EXIT_VIOLATED,
                RobustnessVerdict::Inconclusive => EXIT_INCONCLUSIVE,
            }
        }
    };
    io::emit(&out, pick_output(output, cfg_out).as_deref())?;
    Ok(code)
}

fn write_per_point_csv(path: &str, report: &RobustnessReport) -> CliResult<()> {
    let Some(per_point) = &report.per_point else {
        return Ok(());
    };
    let mut writer = csv::Writer::from_path(path)
        .map_err(|e| CliError::Input(format!("cannot write '{path}': {e}")))?;
    writer
        .write_record(["x-id", "worst_divergence_found", "witness_xprime"])
        .map_err(|e| CliError::Input(e.to_string()))?;
    for rec in per_point {
        let witness = match &rec.witness {
            None => String::new(),
            Some(Point::Finite { index, .. }) => format!("i:{index}"),
            Some(Point::Continuous { coords, .. }) => coords
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(";"),
        };
        let worst = rec
            .worst_divergence
            .map(|d| d.to_string())
            .unwrap_or_default();
        writer
            .write_record([rec.index.to_string(), worst, witness])
            .map_err(|e| CliError::Input(e.to_string()))?;
    }
    writer.flush().map_err(|e| CliError::Input(e.to_string()))
}

// ---------------------------------------------------------------------------
// equivalence

#[derive(Args)]
pub struct EquivalenceArgs {
    #[arg(long)]
    pub config: Option<String>,
    /// Number of random instances to sweep.
    #[arg(long)]
    pub sweep: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub min_size: Option<usize>,
    #[arg(long)]
    pub max_size: Option<usize>,
    /// Comma-separated orders, e.g. "1.5,2,8,max".
    #[arg(long)]
    pub lambdas: Option<String>,
    /// Comma-separated epsilon values.
    #[arg(long)]
    pub epsilons: Option<String>,
    /// Evaluate a single serialized instance instead of sweeping.
    #[arg(long)]
    pub instance: Option<String>,
    /// Directory for disagreement dumps.
    #[arg(long)]
    pub out_dir: Option<String>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
struct EquivalenceParams {
    sweep: Option<usize>,
    seed: Option<u64>,
    min_size: Option<usize>,
    max_size: Option<usize>,
    lambdas: Option<String>,
    epsilons: Option<String>,
    instance: Option<String>,
    out_dir: Option<String>,
}

pub fn equivalence(args: EquivalenceArgs, output: Option<String>) -> CliResult<u8> {
    let (cfg, cfg_seed, cfg_out) = load_config::<EquivalenceParams>(&args.config, "equivalence")?;
    let out_path = pick_output(output, cfg_out);

    if let Some(path) = args.instance.or(cfg.instance) {
        let instance: equivalence::FiniteInstance = io::load_json_arg("instance", &path)?;
        let verdict = equivalence::evaluate_claim(&instance)?;
        let agree = verdict.agree;
        io::emit(&io::to_value(&verdict), out_path.as_deref())?;
        return Ok(if agree { EXIT_OK } else { EXIT_VIOLATED });
    }

    let n = require(args.sweep.or(cfg.sweep), "sweep")?;
    let seed = args.seed.or(cfg.seed).or(cfg_seed).unwrap_or(0);
    let min_size = args.min_size.or(cfg.min_size).unwrap_or(2);
    let max_size = args.max_size.or(cfg.max_size).unwrap_or(8);
    let orders = parse_order_list(
        &args
            .lambdas
            .or(cfg.lambdas)
            .unwrap_or_else(|| "1.1,1.5,2,4,8,32,max".into()),
    )?;
    let epsilons = parse_f64_list(
        &args
            .epsilons
            .or(cfg.epsilons)
            .unwrap_or_else(|| "0.01,0.1,1,10".into()),
    )?;
    let out_dir = args
        .out_dir
        .or(cfg.out_dir)
        .unwrap_or_else(|| "./disagreements".into());

    let summary =
        equivalence::random_instance_sweep(n, seed, (min_size, max_size), &orders, &epsilons)?;

    let mut files = Vec::new();
    for disagreement in &summary.disagreements {
        let body = serde_json::to_string_pretty(disagreement)
            .expect("disagreements serialize");
        let hash = Sha256::digest(body.as_bytes());
        let name = format!("{out_dir}/{:016x}.json", u64::from_be_bytes(hash[..8].try_into().unwrap()));
        fs::create_dir_all(&out_dir)
            .map_err(|e| CliError::Input(format!("cannot create '{out_dir}': {e}")))?;
        fs::write(&name, body)
            .map_err(|e| CliError::Input(format!("cannot write '{name}': {e}")))?;
        files.push(name);
    }

    let out = json!({
        "n_instances": summary.n_instances,
        "agree_count": summary.agree_count,
        "disagreement_files": files,
        "seed": seed,
    });
    io::emit(&out, out_path.as_deref())?;
    Ok(if summary.agree_count == summary.n_instances {
        EXIT_OK
    } else {
        EXIT_VIOLATED
    })
}

fn parse_order_list(text: &str) -> CliResult<Vec<DivergenceOrder>> {
    text.split(',')
        .map(|s| parse_order(s.trim()))
        .collect()
}

fn parse_f64_list(text: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("bad number '{s}'")))
        })
        .collect()
}

// ---------------------------------------------------------------------------
// sweep-report

#[derive(Args)]
pub struct SweepReportArgs {
    #[arg(long)]
    pub config: Option<String>,
    /// Robustness report JSON files to collate.
    #[arg(long, num_args = 1..)]
    pub inputs: Option<Vec<String>>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
struct SweepReportParams {
    inputs: Option<Vec<String>>,
}

pub fn sweep_report(args: SweepReportArgs, output: Option<String>) -> CliResult<u8> {
    let (cfg, _seed, cfg_out) = load_config::<SweepReportParams>(&args.config, "sweep-report")?;
    let inputs = require(args.inputs.or(cfg.inputs), "inputs")?;
    if inputs.is_empty() {
        return Err(CliError::Usage("--inputs needs at least one file".into()));
    }
    let mut rows = Vec::new();
    for path in &inputs {
        let report: RobustnessReport = io::load_json_arg("report", path)?;
        rows.push([
            report.divergence.to_string(),
            report.alpha.to_string(),
            report.epsilon.map(|e| e.to_string()).unwrap_or_default(),
            report.gamma_hat.to_string(),
        ]);
    }
    let mut csv_text = String::from("lambda,alpha,epsilon,gamma_hat\n");
    for row in rows {
        csv_text.push_str(&row.join(","));
        csv_text.push('\n');
    }
    match pick_output(output, cfg_out) {
        None => print!("{csv_text}"),
        Some(path) => fs::write(&path, csv_text)
            .map_err(|e| CliError::Input(format!("cannot write '{path}': {e}")))?,
    }
    Ok(EXIT_OK)
}
