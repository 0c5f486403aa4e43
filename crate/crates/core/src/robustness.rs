//! Attack crafting, prediction-change risk, classic (alpha, gamma)
//! robustness, and generalized (alpha, epsilon, gamma) robustness of
//! probabilistic mappings.
//!
//! Ball membership is closed (d <= alpha). Existence searches inside the
//! ball are exhaustive on finite spaces and exact for 1-D thresholds and
//! binary linear classifiers under L2; elsewhere a direction-grid search is
//! used, which can only under-report gamma (the report's `ball_search` says
//! which case applies).

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::divergence::{
    renyi_divergence, renyi_quadrature, trivial_distance, DivergenceOrder,
};
use crate::error::{Error, Result};
use crate::measure::{MetricKind, MetricSpec, Point, ProbabilityMeasure};
use crate::mechanisms::{BaseClassifier, LabelBudget, NoiseKind, ProbabilisticMapping};
use crate::privacy::{label_measures, CertMetric};
use crate::rng;
use crate::stats::clopper_pearson;

/// Distribution the data points are drawn from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", content = "params", rename_all = "snake_case")]
pub enum DataDistribution {
    FiniteWeighted { points: Vec<Point>, weights: Vec<f64> },
    Sampler { family: SamplerFamily },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SamplerFamily {
    UniformBox { lo: Vec<f64>, hi: Vec<f64> },
    Gaussian { mean: Vec<f64>, sigma: f64 },
}

impl DataDistribution {
    pub fn uniform_over(points: Vec<Point>) -> Self {
        let w = 1.0 / points.len() as f64;
        let weights = vec![w; points.len()];
        DataDistribution::FiniteWeighted { points, weights }
    }

    /// Points, weights and whether the data was sampled (so gamma carries a
    /// binomial confidence interval) rather than enumerated.
    fn resolve(&self, n_samples: usize, seed: u64) -> Result<(Vec<Point>, Vec<f64>, bool)> {
        match self {
            DataDistribution::FiniteWeighted { points, weights } => {
                if points.is_empty() || points.len() != weights.len() {
                    return Err(Error::invalid("finite data needs matching points/weights"));
                }
                if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
                    return Err(Error::invalid("data weights must be nonnegative"));
                }
                let total: f64 = weights.iter().sum();
                if (total - 1.0).abs() > crate::measure::SUM_TOLERANCE {
                    return Err(Error::invalid("data weights must sum to 1"));
                }
                Ok((points.clone(), weights.clone(), false))
            }
            DataDistribution::Sampler { family } => {
                if n_samples == 0 {
                    return Err(Error::invalid("sampler data needs a positive sample budget"));
                }
                let mut r = rng::stream(seed, 0);
                let points = (0..n_samples)
                    .map(|_| family.draw(&mut r))
                    .collect::<Result<Vec<_>>>()?;
                let w = 1.0 / n_samples as f64;
                Ok((points, vec![w; n_samples], true))
            }
        }
    }
}

impl SamplerFamily {
    fn draw<R: Rng>(&self, r: &mut R) -> Result<Point> {
        match self {
            SamplerFamily::UniformBox { lo, hi } => {
                if lo.len() != hi.len() || lo.is_empty() || lo.len() > 2 {
                    return Err(Error::invalid("uniform box sampler is 1-D or 2-D"));
                }
                let coords = lo
                    .iter()
                    .zip(hi)
                    .map(|(&a, &b)| a + (b - a) * r.gen::<f64>())
                    .collect();
                Ok(Point::continuous(coords))
            }
            SamplerFamily::Gaussian { mean, sigma } => {
                if mean.is_empty() || mean.len() > 2 {
                    return Err(Error::invalid("gaussian sampler is 1-D or 2-D"));
                }
                let coords = mean
                    .iter()
                    .map(|m| m + sigma * r.sample::<f64, _>(rand_distr::StandardNormal))
                    .collect();
                Ok(Point::continuous(coords))
            }
        }
    }
}

/// Budget for the minimal-perturbation search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttackBudget {
    pub max_radius: f64,
    /// Radius grid resolution for the direction search.
    pub resolution: f64,
    /// Number of search directions in dimension > 1.
    pub directions: usize,
    pub seed: u64,
}

impl Default for AttackBudget {
    fn default() -> Self {
        AttackBudget {
            max_radius: 1.0,
            resolution: 1e-3,
            directions: 64,
            seed: 0,
        }
    }
}

/// Budget shared by the risk/robustness estimators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskBudget {
    /// Draws when the data distribution is a sampler.
    pub data_samples: usize,
    pub seed: u64,
    pub resolution: f64,
    pub directions: usize,
    /// Radius steps of the in-ball divergence sup grid.
    pub sup_steps: usize,
    /// Bypass analytic ball bounds and use the grid + quadrature path.
    pub force_numeric: bool,
    /// Evaluate input-noise mappings on the label pushforward with this many
    /// Monte Carlo draws per point, instead of on the raw noise measures.
    pub label_mc: Option<usize>,
    pub collect_per_point: bool,
}

impl Default for RiskBudget {
    fn default() -> Self {
        RiskBudget {
            data_samples: 1000,
            seed: 0,
            resolution: 1e-3,
            directions: 64,
            sup_steps: 64,
            force_numeric: false,
            label_mc: None,
            collect_per_point: false,
        }
    }
}

impl RiskBudget {
    fn attack(&self, max_radius: f64) -> AttackBudget {
        AttackBudget {
            max_radius,
            resolution: self.resolution,
            directions: self.directions,
            seed: self.seed,
        }
    }
}

/// A label-changing perturbation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdversarialExample {
    pub origin: Point,
    /// The perturbed input attaining the change (origin + tau on continuous
    /// spaces, another index on finite ones).
    pub witness: Point,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<Vec<f64>>,
    pub distance: f64,
    pub label_before: usize,
    pub label_after: usize,
}

/// How the ball was searched, and with what guarantee.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum BallSearch {
    /// Full loop over a finite space: exact.
    Exhaustive,
    /// 1-D bisection, optimal to 1e-9.
    Bisection,
    /// Point-to-hyperplane formula, exact (verified by evaluation).
    Boundary,
    /// Direction grid with radius refinement: failures under-report, so
    /// gamma is a lower bound.
    Grid { resolution: f64, directions: usize },
    /// Certified closed-form ball supremum: exact.
    Analytic,
}

impl BallSearch {
    pub fn is_exact(&self) -> bool {
        !matches!(self, BallSearch::Grid { .. })
    }
}

/// Outcome of one minimal-perturbation search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackSearchResult {
    pub example: Option<AdversarialExample>,
    /// The classifier cannot change label anywhere.
    pub constant: bool,
    pub search: BallSearch,
}

/// Divergence used by generalized robustness: a Renyi order or the trivial
/// 0/1 distance on measures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DivergenceKind {
    Order(DivergenceOrder),
    Trivial,
}

impl std::fmt::Display for DivergenceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DivergenceKind::Order(o) => o.fmt(f),
            DivergenceKind::Trivial => write!(f, "trivial"),
        }
    }
}

impl std::str::FromStr for DivergenceKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("trivial") {
            Ok(DivergenceKind::Trivial)
        } else {
            Ok(DivergenceKind::Order(s.parse()?))
        }
    }
}

impl Serialize for DivergenceKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            DivergenceKind::Trivial => s.serialize_str("trivial"),
            DivergenceKind::Order(o) => o.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for DivergenceKind {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        if v == serde_json::Value::String("trivial".into()) {
            return Ok(DivergenceKind::Trivial);
        }
        Ok(DivergenceKind::Order(
            serde_json::from_value(v).map_err(serde::de::Error::custom)?,
        ))
    }
}

/// Per-data-point detail for report dumps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerPointRecord {
    pub index: usize,
    pub exceeded: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_divergence: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Point>,
}

/// Estimate of gamma for (alpha[, epsilon]) robustness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessReport {
    pub alpha: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    pub gamma_hat: f64,
    pub ci95: (f64, f64),
    pub n_data: usize,
    pub ball_search: BallSearch,
    pub divergence: DivergenceKind,
    /// True when the data was sampled rather than enumerated.
    pub sampled_data: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_point: Option<Vec<PerPointRecord>>,
}

/// Verdict of a robustness check against a target gamma.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RobustnessVerdict {
    Robust,
    NotRobust,
    /// gamma sits inside the sampled confidence interval.
    Inconclusive,
}

/// Minimal label-changing perturbation of `x` under `metric`, or `None` if no
/// change exists within the budget's radius.
pub fn craft_adversarial(
    h: &BaseClassifier,
    x: &Point,
    metric: &MetricSpec,
    budget: &AttackBudget,
) -> Result<AttackSearchResult> {
    h.validate()?;
    let label = h.predict(x)?;
    if h.is_constant() {
        return Ok(AttackSearchResult {
            example: None,
            constant: true,
            search: BallSearch::Exhaustive,
        });
    }
    match h {
        BaseClassifier::Table { labels, .. } => {
            craft_on_table(labels, x, label, metric, budget.max_radius)
        }
        BaseClassifier::Threshold1D { cut } => craft_threshold(h, *cut, x, label, metric, budget),
        BaseClassifier::Linear { weights, bias } => {
            if weights.len() == 2 && metric.kind == MetricKind::L2 {
                craft_binary_linear(h, weights, bias, x, label, budget)
            } else {
                craft_by_direction_grid(h, x, label, metric, budget)
            }
        }
    }
}

fn craft_on_table(
    labels: &[usize],
    x: &Point,
    label: usize,
    metric: &MetricSpec,
    max_radius: f64,
) -> Result<AttackSearchResult> {
    let mut best: Option<(usize, f64)> = None;
    for (j, &lj) in labels.iter().enumerate() {
        if lj == label {
            continue;
        }
        let d = metric.distance(x, &Point::finite(j))?;
        if d <= max_radius && best.is_none_or(|(_, bd)| d < bd) {
            best = Some((j, d));
        }
    }
    Ok(AttackSearchResult {
        example: best.map(|(j, d)| AdversarialExample {
            origin: x.clone(),
            witness: Point::finite(j),
            tau: None,
            distance: d,
            label_before: label,
            label_after: labels[j],
        }),
        constant: false,
        search: BallSearch::Exhaustive,
    })
}

fn example_along(
    h: &BaseClassifier,
    x: &Point,
    label: usize,
    tau: Vec<f64>,
    distance: f64,
) -> Result<AdversarialExample> {
    let coords = x.coords().expect("continuous attack");
    let witness = Point::continuous(coords.iter().zip(&tau).map(|(a, b)| a + b).collect());
    let after = h.predict(&witness)?;
    debug_assert_ne!(after, label);
    Ok(AdversarialExample {
        origin: x.clone(),
        witness,
        tau: Some(tau),
        distance,
        label_before: label,
        label_after: after,
    })
}

fn craft_threshold(
    h: &BaseClassifier,
    cut: f64,
    x: &Point,
    label: usize,
    metric: &MetricSpec,
    budget: &AttackBudget,
) -> Result<AttackSearchResult> {
    let coords = x
        .coords()
        .ok_or_else(|| Error::Domain("threshold attack needs coordinates".into()))?;
    if coords.len() != 1 || metric.dimension != 1 {
        return Err(Error::Domain("threshold classifier is one-dimensional".into()));
    }
    if matches!(metric.kind, MetricKind::Hamming | MetricKind::Discrete) {
        return Err(Error::invalid(
            "attack search needs a norm metric on continuous inputs",
        ));
    }
    let xv = coords[0];
    let r = budget.max_radius;
    // All 1-D norms coincide with |tau|.
    let found = if label == 0 {
        // the cut itself flips (x >= cut is label 1): distance attained.
        let gap = cut - xv;
        (gap <= r).then_some((cut, gap))
    } else {
        // need x' strictly below the cut: bisect the crossing overshoot.
        let gap = xv - cut;
        if gap >= r {
            None
        } else {
            let mut lo = gap; // does not cross
            let mut hi = (gap + 1e-6).min(r); // crosses (strictly past the cut)
            debug_assert_eq!(h.predict(&Point::scalar(xv - hi))?, 0);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if h.predict(&Point::scalar(xv - mid))? != label {
                    hi = mid;
                } else {
                    lo = mid;
                }
                if hi - lo < 1e-12 {
                    break;
                }
            }
            Some((xv - hi, hi))
        }
    };
    let example = match found {
        None => None,
        Some((target, dist)) => Some(example_along(h, x, label, vec![target - xv], dist)?),
    };
    Ok(AttackSearchResult {
        example,
        constant: false,
        search: BallSearch::Bisection,
    })
}

fn craft_binary_linear(
    h: &BaseClassifier,
    weights: &[Vec<f64>],
    bias: &[f64],
    x: &Point,
    label: usize,
    budget: &AttackBudget,
) -> Result<AttackSearchResult> {
    let coords = x
        .coords()
        .ok_or_else(|| Error::Domain("linear attack needs coordinates".into()))?;
    let dw: Vec<f64> = weights[1].iter().zip(&weights[0]).map(|(a, b)| a - b).collect();
    let db = bias[1] - bias[0];
    let norm = dw.iter().map(|v| v * v).sum::<f64>().sqrt();
    debug_assert!(norm > 0.0, "constant classifiers are handled earlier");
    let s: f64 = dw.iter().zip(coords).map(|(w, c)| w * c).sum::<f64>() + db;
    let boundary_dist = s.abs() / norm;
    let r = budget.max_radius;
    // label 1 (s > 0): the boundary point ties and ties go to label 0, so
    // the distance |s|/||dw|| is attained (up to round-off in the
    // projection). label 0: the crossing must be strict. Either way the
    // crossing is verified by evaluation and nudged past round-off when
    // needed.
    let dir: Vec<f64> = dw
        .iter()
        .map(|w| if label == 1 { -w / norm } else { w / norm })
        .collect();
    let t = {
        let mut cand = boundary_dist;
        let mut slack = (boundary_dist * 1e-14).max(1e-15);
        loop {
            let probe: Vec<f64> = coords.iter().zip(&dir).map(|(c, d)| c + cand * d).collect();
            if h.predict(&Point::continuous(probe))? != label {
                break cand;
            }
            cand = boundary_dist + slack;
            slack *= 8.0;
            if cand > r.max(boundary_dist * 2.0) + 1.0 {
                // numerically unreachable boundary
                return Ok(AttackSearchResult {
                    example: None,
                    constant: false,
                    search: BallSearch::Boundary,
                });
            }
        }
    };
    let example = if t <= r {
        let tau: Vec<f64> = dir.iter().map(|d| d * t).collect();
        Some(example_along(h, x, label, tau, t)?)
    } else {
        None
    };
    Ok(AttackSearchResult {
        example,
        constant: false,
        search: BallSearch::Boundary,
    })
}

/// Deterministic direction set: canonical axes first, then seeded random
/// unit vectors of the metric's norm.
fn direction_set(dim: usize, kind: MetricKind, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    if matches!(kind, MetricKind::Hamming | MetricKind::Discrete) {
        return Err(Error::invalid(
            "attack search needs a norm metric on continuous inputs",
        ));
    }
    let mut dirs = Vec::with_capacity(count.max(2 * dim));
    for d in 0..dim {
        for sign in [1.0, -1.0] {
            let mut u = vec![0.0; dim];
            u[d] = sign;
            dirs.push(u);
        }
    }
    let mut r = rng::stream(seed, 1);
    while dirs.len() < count.max(2 * dim) {
        let raw: Vec<f64> = (0..dim)
            .map(|_| r.sample::<f64, _>(rand_distr::StandardNormal))
            .collect();
        let norm = match kind {
            MetricKind::L2 => raw.iter().map(|v| v * v).sum::<f64>().sqrt(),
            MetricKind::L1 => raw.iter().map(|v| v.abs()).sum(),
            MetricKind::Linf => raw.iter().map(|v| v.abs()).fold(0.0, f64::max),
            _ => unreachable!(),
        };
        if norm > 0.0 {
            dirs.push(raw.iter().map(|v| v / norm).collect());
        }
    }
    Ok(dirs)
}

fn craft_by_direction_grid(
    h: &BaseClassifier,
    x: &Point,
    label: usize,
    metric: &MetricSpec,
    budget: &AttackBudget,
) -> Result<AttackSearchResult> {
    let coords = x
        .coords()
        .ok_or_else(|| Error::Domain("grid attack needs coordinates".into()))?;
    let dim = coords.len();
    let r = budget.max_radius;
    let steps = ((r / budget.resolution).ceil() as usize).clamp(1, 4096);
    let mut dirs = direction_set(dim, metric.kind, budget.directions, budget.seed)?;
    // For linear classifiers the pairwise weight differences are the useful
    // crossing directions; add them so the grid search is near-exact.
    if let BaseClassifier::Linear { weights, .. } = h {
        for i in 0..weights.len() {
            for j in (i + 1)..weights.len() {
                let raw: Vec<f64> = weights[i].iter().zip(&weights[j]).map(|(a, b)| a - b).collect();
                let norm = match metric.kind {
                    MetricKind::L2 => raw.iter().map(|v| v * v).sum::<f64>().sqrt(),
                    MetricKind::L1 => raw.iter().map(|v| v.abs()).sum(),
                    MetricKind::Linf => raw.iter().map(|v| v.abs()).fold(0.0, f64::max),
                    _ => 0.0,
                };
                if norm > 0.0 {
                    dirs.push(raw.iter().map(|v| v / norm).collect());
                    dirs.push(raw.iter().map(|v| -v / norm).collect());
                }
            }
        }
    }

    let probe = |t: f64, u: &[f64]| -> Result<usize> {
        let p: Vec<f64> = coords.iter().zip(u).map(|(c, d)| c + t * d).collect();
        h.predict(&Point::continuous(p))
    };

    let mut best: Option<(f64, Vec<f64>)> = None;
    for u in &dirs {
        let mut prev = 0.0;
        for k in 1..=steps {
            let t = r * k as f64 / steps as f64;
            if best.as_ref().is_some_and(|(bt, _)| *bt <= prev) {
                break; // cannot improve along this direction
            }
            if probe(t, u)? != label {
                // refine the crossing radius in (prev, t]
                let mut lo = prev;
                let mut hi = t;
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if probe(mid, u)? != label {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                    if hi - lo < 1e-12 {
                        break;
                    }
                }
                if best.as_ref().is_none_or(|(bt, _)| hi < *bt) {
                    best = Some((hi, u.clone()));
                }
                break;
            }
            prev = t;
        }
    }

    let search = BallSearch::Grid {
        resolution: r / steps as f64,
        directions: dirs.len(),
    };
    let example = match best {
        Some((t, u)) if t <= r => {
            let tau: Vec<f64> = u.iter().map(|d| d * t).collect();
            Some(example_along(h, x, label, tau, t)?)
        }
        _ => None,
    };
    Ok(AttackSearchResult {
        example,
        constant: false,
        search,
    })
}

/// Probability mass of data points whose alpha-ball contains a label change.
pub fn prediction_change_risk(
    h: &BaseClassifier,
    data: &DataDistribution,
    metric: &MetricSpec,
    alpha: f64,
    budget: &RiskBudget,
) -> Result<RobustnessReport> {
    if alpha.is_nan() || alpha <= 0.0 {
        return Err(Error::invalid("prediction-change risk needs alpha > 0"));
    }
    let (points, weights, sampled) = data.resolve(budget.data_samples, budget.seed)?;
    let attack = budget.attack(alpha);
    let mut gamma = 0.0;
    let mut changed_count = 0u64;
    let mut search = None;
    let mut per_point = budget.collect_per_point.then(Vec::new);
    for (i, (x, w)) in points.iter().zip(&weights).enumerate() {
        let result = craft_adversarial(h, x, metric, &attack)?;
        let found = result.example.is_some();
        if found {
            gamma += w;
            changed_count += 1;
        }
        search.get_or_insert(result.search);
        if let Some(pp) = per_point.as_mut() {
            pp.push(PerPointRecord {
                index: i,
                exceeded: found,
                worst_divergence: Some(if found { 1.0 } else { 0.0 }),
                witness: result.example.map(|e| e.witness),
            });
        }
    }
    let ci95 = if sampled {
        clopper_pearson(changed_count, points.len() as u64, 0.95)
    } else {
        (gamma, gamma)
    };
    Ok(RobustnessReport {
        alpha,
        epsilon: None,
        gamma_hat: gamma,
        ci95,
        n_data: points.len(),
        ball_search: search.unwrap_or(BallSearch::Exhaustive),
        divergence: DivergenceKind::Trivial,
        sampled_data: sampled,
        per_point,
    })
}

/// (alpha, gamma)-robustness decision with a CI-aware verdict.
pub fn check_classic_robustness(
    h: &BaseClassifier,
    data: &DataDistribution,
    metric: &MetricSpec,
    alpha: f64,
    gamma: f64,
    budget: &RiskBudget,
) -> Result<(RobustnessVerdict, RobustnessReport)> {
    let report = prediction_change_risk(h, data, metric, alpha, budget)?;
    Ok((verdict_against_gamma(&report, gamma), report))
}

/// Decision implied by a report for a target gamma, inconclusive when gamma
/// falls inside a sampled confidence interval.
pub fn verdict_against_gamma(report: &RobustnessReport, gamma: f64) -> RobustnessVerdict {
    let (lo, hi) = report.ci95;
    if report.sampled_data && lo < gamma && gamma < hi {
        RobustnessVerdict::Inconclusive
    } else if report.gamma_hat <= gamma {
        RobustnessVerdict::Robust
    } else {
        RobustnessVerdict::NotRobust
    }
}

/// D-(alpha, epsilon, gamma) generalized robustness: the probability mass of
/// data points x for which some x' in B(x, alpha) pushes
/// D(M(x'), M(x)) above epsilon.
pub fn check_generalized_robustness(
    mapping: &ProbabilisticMapping,
    data: &DataDistribution,
    metric: &CertMetric,
    alpha: f64,
    epsilon: f64,
    kind: DivergenceKind,
    budget: &RiskBudget,
) -> Result<RobustnessReport> {
    mapping.validate()?;
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::invalid("alpha must be finite and >= 0"));
    }
    if epsilon.is_nan() {
        return Err(Error::invalid("epsilon must not be NaN"));
    }

    if let Some(size) = mapping.domain_size() {
        return generalized_on_finite(mapping, size, data, metric, alpha, epsilon, kind, budget);
    }

    let spec = match metric {
        CertMetric::Spec(s) => *s,
        CertMetric::Table(_) => {
            return Err(Error::invalid(
                "metric tables apply to finite input spaces only",
            ))
        }
    };

    match mapping {
        ProbabilisticMapping::InputNoise { .. } => {
            generalized_input_noise(mapping, data, spec, alpha, epsilon, kind, budget)
        }
        ProbabilisticMapping::Deterministic { base } => {
            generalized_via_label_change(mapping, base, data, spec, alpha, epsilon, kind, budget)
        }
        ProbabilisticMapping::OutputNoise { base, .. } => {
            generalized_via_label_change(mapping, base, data, spec, alpha, epsilon, kind, budget)
        }
        ProbabilisticMapping::FiniteTable { .. } => unreachable!("finite tables handled above"),
    }
}

#[allow(clippy::too_many_arguments)]
fn generalized_on_finite(
    mapping: &ProbabilisticMapping,
    size: usize,
    data: &DataDistribution,
    metric: &CertMetric,
    alpha: f64,
    epsilon: f64,
    kind: DivergenceKind,
    budget: &RiskBudget,
) -> Result<RobustnessReport> {
    let (points, weights, sampled) = data.resolve(budget.data_samples, budget.seed)?;
    let rows = label_measures(mapping, size)?;
    let dist = |i: usize, j: usize| -> Result<f64> {
        match metric {
            CertMetric::Table(t) => {
                if t.size() != size {
                    Err(Error::invalid("metric table size mismatch"))
                } else {
                    Ok(t.distance(i, j))
                }
            }
            CertMetric::Spec(s) => s.distance(&Point::finite(i), &Point::finite(j)),
        }
    };

    let mut gamma = 0.0;
    let mut exceeded_count = 0u64;
    let mut per_point = budget.collect_per_point.then(Vec::new);
    for (pi, (x, w)) in points.iter().zip(&weights).enumerate() {
        let i = x
            .index()
            .ok_or_else(|| Error::invalid("finite-space data must be index points"))?;
        if i >= size {
            return Err(Error::Domain(format!("data index {i} outside space of size {size}")));
        }
        let mut worst = 0.0f64;
        let mut witness = None;
        for j in 0..size {
            if dist(i, j)? > alpha {
                continue;
            }
            let d = match kind {
                DivergenceKind::Trivial => trivial_distance(&rows[j], &rows[i])? as f64,
                DivergenceKind::Order(order) => {
                    renyi_divergence(&rows[j], &rows[i], order)?.value
                }
            };
            if d > worst {
                worst = d;
                witness = Some(Point::finite(j));
            }
        }
        let exceeded = worst > epsilon;
        if exceeded {
            gamma += w;
            exceeded_count += 1;
        }
        if let Some(pp) = per_point.as_mut() {
            pp.push(PerPointRecord {
                index: pi,
                exceeded,
                worst_divergence: Some(worst),
                witness,
            });
        }
    }
    let ci95 = if sampled {
        clopper_pearson(exceeded_count, points.len() as u64, 0.95)
    } else {
        (gamma, gamma)
    };
    Ok(RobustnessReport {
        alpha,
        epsilon: Some(epsilon),
        gamma_hat: gamma,
        ci95,
        n_data: points.len(),
        ball_search: BallSearch::Exhaustive,
        divergence: kind,
        sampled_data: sampled,
        per_point,
    })
}

/// Deterministic / output-noise mappings over continuous bases: the output
/// measure depends on x only through h(x), so the in-ball divergence sup
/// reduces to the labels reachable inside the ball.
#[allow(clippy::too_many_arguments)]
fn generalized_via_label_change(
    mapping: &ProbabilisticMapping,
    base: &BaseClassifier,
    data: &DataDistribution,
    spec: MetricSpec,
    alpha: f64,
    epsilon: f64,
    kind: DivergenceKind,
    budget: &RiskBudget,
) -> Result<RobustnessReport> {
    let (points, weights, sampled) = data.resolve(budget.data_samples, budget.seed)?;
    let attack = budget.attack(alpha);
    let mut gamma = 0.0;
    let mut exceeded_count = 0u64;
    let mut search = None;
    let mut per_point = budget.collect_per_point.then(Vec::new);
    for (pi, (x, w)) in points.iter().zip(&weights).enumerate() {
        let result = craft_adversarial(base, x, &spec, &attack)?;
        search.get_or_insert(result.search);
        let (worst, witness) = match &result.example {
            None => (0.0, None),
            Some(ex) => {
                let mx = mapping.label_distribution(x, LabelBudget::Exact)?.dist.as_measure();
                let mxp = mapping
                    .label_distribution(&ex.witness, LabelBudget::Exact)?
                    .dist
                    .as_measure();
                let d = match kind {
                    DivergenceKind::Trivial => trivial_distance(&mxp, &mx)? as f64,
                    DivergenceKind::Order(order) => renyi_divergence(&mxp, &mx, order)?.value,
                };
                (d, Some(ex.witness.clone()))
            }
        };
        let exceeded = worst > epsilon;
        if exceeded {
            gamma += w;
            exceeded_count += 1;
        }
        if let Some(pp) = per_point.as_mut() {
            pp.push(PerPointRecord {
                index: pi,
                exceeded,
                worst_divergence: Some(worst),
                witness,
            });
        }
    }
    let ci95 = if sampled {
        clopper_pearson(exceeded_count, points.len() as u64, 0.95)
    } else {
        (gamma, gamma)
    };
    Ok(RobustnessReport {
        alpha,
        epsilon: Some(epsilon),
        gamma_hat: gamma,
        ci95,
        n_data: points.len(),
        ball_search: search.unwrap_or(BallSearch::Exhaustive),
        divergence: kind,
        sampled_data: sampled,
        per_point,
    })
}

#[allow(clippy::too_many_arguments)]
fn generalized_input_noise(
    mapping: &ProbabilisticMapping,
    data: &DataDistribution,
    spec: MetricSpec,
    alpha: f64,
    epsilon: f64,
    kind: DivergenceKind,
    budget: &RiskBudget,
) -> Result<RobustnessReport> {
    let (points, weights, sampled) = data.resolve(budget.data_samples, budget.seed)?;
    let (noise, _base) = match mapping {
        ProbabilisticMapping::InputNoise { noise, base } => (noise, base),
        _ => unreachable!(),
    };

    if let Some(mc_n) = budget.label_mc {
        return generalized_label_mc(
            mapping, &points, &weights, sampled, spec, alpha, epsilon, kind, budget, mc_n,
        );
    }

    // Raw-mechanism evaluation: M(x) is the noise measure centered at x.
    let analytic_sup: Option<f64> = match (kind, noise, spec.kind, budget.force_numeric) {
        (DivergenceKind::Trivial, _, _, _) => {
            // distinct centers give distinct measures; the trivial distance
            // hits 1 anywhere else in the ball.
            Some(if alpha > 0.0 { 1.0 } else { 0.0 })
        }
        (
            DivergenceKind::Order(order),
            NoiseKind::Gaussian { sigma },
            MetricKind::L2,
            false,
        ) => Some(match order {
            DivergenceOrder::Finite(l) => l * alpha * alpha / (2.0 * sigma * sigma),
            DivergenceOrder::Kl => alpha * alpha / (2.0 * sigma * sigma),
            DivergenceOrder::Max => {
                if alpha > 0.0 {
                    f64::INFINITY
                } else {
                    0.0
                }
            }
        }),
        _ => None,
    };

    if let Some(sup) = analytic_sup {
        // The ball supremum is the same for every center x.
        let exceeded = sup > epsilon;
        let gamma: f64 = if exceeded { 1.0 } else { 0.0 };
        let per_point = budget.collect_per_point.then(|| {
            points
                .iter()
                .enumerate()
                .map(|(i, _)| PerPointRecord {
                    index: i,
                    exceeded,
                    worst_divergence: Some(sup),
                    witness: None,
                })
                .collect()
        });
        return Ok(RobustnessReport {
            alpha,
            epsilon: Some(epsilon),
            gamma_hat: gamma,
            ci95: (gamma, gamma),
            n_data: points.len(),
            ball_search: BallSearch::Analytic,
            divergence: kind,
            sampled_data: sampled,
            per_point,
        });
    }

    // Numeric path: direction/radius grid over the ball, divergence between
    // raw noise measures by quadrature (finite orders) or exact sup
    // analysis (max/kl limits are delegated to the divergence module).
    let order = match kind {
        DivergenceKind::Order(o) => o,
        DivergenceKind::Trivial => unreachable!("trivial handled analytically"),
    };
    let dim = spec.dimension;
    let dirs = direction_set(dim, spec.kind, budget.directions, budget.seed)?;
    let steps = budget.sup_steps.max(1);
    let mut gamma = 0.0;
    let mut exceeded_count = 0u64;
    let mut per_point = budget.collect_per_point.then(Vec::new);
    for (pi, (x, w)) in points.iter().zip(&weights).enumerate() {
        let coords = x
            .coords()
            .ok_or_else(|| Error::invalid("input-noise data must be coordinate points"))?;
        let mx = noise.measure_at(coords);
        let mut worst = 0.0f64;
        let mut witness = None;
        for u in &dirs {
            for k in 1..=steps {
                let t = alpha * k as f64 / steps as f64;
                let xp: Vec<f64> = coords.iter().zip(u).map(|(c, d)| c + t * d).collect();
                let mxp = noise.measure_at(&xp);
                let d = match order {
                    DivergenceOrder::Finite(l) => renyi_quadrature(&mxp, &mx, l)?.value,
                    other => renyi_divergence(&mxp, &mx, other)?.value,
                };
                if d > worst {
                    worst = d;
                    witness = Some(Point::continuous(xp));
                }
            }
        }
        let exceeded = worst > epsilon;
        if exceeded {
            gamma += w;
            exceeded_count += 1;
        }
        if let Some(pp) = per_point.as_mut() {
            pp.push(PerPointRecord {
                index: pi,
                exceeded,
                worst_divergence: Some(worst),
                witness,
            });
        }
    }
    let ci95 = if sampled {
        clopper_pearson(exceeded_count, points.len() as u64, 0.95)
    } else {
        (gamma, gamma)
    };
    Ok(RobustnessReport {
        alpha,
        epsilon: Some(epsilon),
        gamma_hat: gamma,
        ci95,
        n_data: points.len(),
        ball_search: BallSearch::Grid {
            resolution: alpha / steps as f64,
            directions: dirs.len(),
        },
        divergence: kind,
        sampled_data: sampled,
        per_point,
    })
}

/// Label-pushforward evaluation with Monte Carlo label distributions: points
/// whose divergence interval straddles epsilon are inconclusive and counted
/// pessimistically into the upper confidence bound.
#[allow(clippy::too_many_arguments)]
fn generalized_label_mc(
    mapping: &ProbabilisticMapping,
    points: &[Point],
    weights: &[f64],
    sampled: bool,
    spec: MetricSpec,
    alpha: f64,
    epsilon: f64,
    kind: DivergenceKind,
    budget: &RiskBudget,
    mc_n: usize,
) -> Result<RobustnessReport> {
    let order = match kind {
        DivergenceKind::Order(o) => o,
        DivergenceKind::Trivial => {
            return Err(Error::invalid(
                "trivial distance is not estimable from Monte Carlo label distributions",
            ))
        }
    };
    let dirs = direction_set(spec.dimension, spec.kind, budget.directions, budget.seed)?;
    let steps = budget.sup_steps.max(1);
    let mut decisive = 0.0;
    let mut inconclusive = 0.0;
    let mut per_point = budget.collect_per_point.then(Vec::new);
    for (pi, (x, w)) in points.iter().zip(weights).enumerate() {
        let coords = x
            .coords()
            .ok_or_else(|| Error::invalid("input-noise data must be coordinate points"))?;
        let est_x = mapping.label_distribution(
            x,
            LabelBudget::MonteCarlo { n: mc_n, seed: budget.seed ^ (pi as u64) },
        )?;
        let mut exceeds_lo = false; // some candidate decisively exceeds
        let mut exceeds_hi = false; // some candidate might exceed
        let mut worst = 0.0f64;
        let mut witness = None;
        'ball: for u in &dirs {
            for k in 1..=steps {
                let t = alpha * k as f64 / steps as f64;
                let xpv: Vec<f64> = coords.iter().zip(u).map(|(c, d)| c + t * d).collect();
                let xp = Point::continuous(xpv);
                let est_xp = mapping.label_distribution(
                    &xp,
                    LabelBudget::MonteCarlo {
                        n: mc_n,
                        seed: budget.seed ^ (pi as u64) ^ 0x5bd1e995,
                    },
                )?;
                let (dlo, dhat, dhi) = divergence_interval(&est_xp, &est_x, order)?;
                if dhat > worst {
                    worst = dhat;
                    witness = Some(xp.clone());
                }
                if dlo > epsilon {
                    exceeds_lo = true;
                    exceeds_hi = true;
                    break 'ball;
                }
                if dhi > epsilon {
                    exceeds_hi = true;
                }
            }
        }
        if exceeds_lo {
            decisive += w;
        } else if exceeds_hi {
            inconclusive += w;
        }
        if let Some(pp) = per_point.as_mut() {
            pp.push(PerPointRecord {
                index: pi,
                exceeded: exceeds_lo,
                worst_divergence: Some(worst),
                witness,
            });
        }
    }
    let _ = sampled;
    Ok(RobustnessReport {
        alpha,
        epsilon: Some(epsilon),
        gamma_hat: decisive,
        ci95: (decisive, (decisive + inconclusive).min(1.0)),
        n_data: points.len(),
        ball_search: BallSearch::Grid {
            resolution: alpha / steps as f64,
            directions: dirs.len(),
        },
        divergence: kind,
        sampled_data: sampled,
        per_point,
    })
}

/// (lower, point, upper) for the divergence between two Monte Carlo label
/// estimates, from their per-label Clopper-Pearson intervals evaluated at
/// renormalized interval corners.
fn divergence_interval(
    a: &crate::mechanisms::LabelEstimate,
    b: &crate::mechanisms::LabelEstimate,
    order: DivergenceOrder,
) -> Result<(f64, f64, f64)> {
    let point = renyi_divergence(&a.dist.as_measure(), &b.dist.as_measure(), order)?.value;
    let (ca, cb) = match (&a.ci95, &b.ci95) {
        (Some(ca), Some(cb)) => (ca, cb),
        _ => return Ok((point, point, point)),
    };
    let n = ca.len();
    let corner = |ci: &Vec<(f64, f64)>, mask: u32| -> Result<ProbabilityMeasure> {
        let mut probs: Vec<f64> = (0..n)
            .map(|i| {
                if mask >> i & 1 == 1 {
                    ci[i].1
                } else {
                    ci[i].0
                }
            })
            .collect();
        let total: f64 = probs.iter().sum();
        if total <= 0.0 {
            return Err(Error::invalid("degenerate corner"));
        }
        probs.iter_mut().for_each(|p| *p /= total);
        Ok(ProbabilityMeasure::Categorical { probs })
    };
    let mut lo = point;
    let mut hi = point;
    // full corner sweep for small label counts, sampled corners otherwise
    let masks: Vec<(u32, u32)> = if n <= 4 {
        (0..1u32 << n)
            .flat_map(|ma| (0..1u32 << n).map(move |mb| (ma, mb)))
            .collect()
    } else {
        let mut r = rng::stream(0xC0FFEE, 0);
        (0..64)
            .map(|_| (r.gen::<u32>() & ((1 << n.min(31)) - 1), r.gen::<u32>() & ((1 << n.min(31)) - 1)))
            .collect()
    };
    for (ma, mb) in masks {
        let d = renyi_divergence(&corner(ca, ma)?, &corner(cb, mb)?, order)?.value;
        lo = lo.min(d);
        hi = hi.max(d);
    }
    Ok((lo, point, hi))
}
