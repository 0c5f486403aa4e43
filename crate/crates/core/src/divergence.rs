//! Renyi divergence D_lambda between measures, its KL (lambda -> 1) and
//! max-divergence (lambda -> infinity) limits, and the trivial 0/1 distance.
//!
//! Finite-support pairs are enumerated exactly in the log domain. Equal-sigma
//! Gaussian pairs use the closed form lambda*d^2/(2 sigma^2), which the test
//! suite validates against the quadrature oracle before anything relies on
//! it. Remaining continuous pairs go through adaptive Simpson quadrature on a
//! truncated window, one dimension at a time (the divergence of a product
//! measure is the sum of the per-dimension divergences). An independent
//! Monte Carlo estimator with a bootstrap confidence bound cross-checks every
//! other method.
//!
//! All values are natural-log (nats). Infinite divergences are an explicit
//! `f64::INFINITY`, never a large float.

use rayon::prelude::*;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::measure::{check_density_pair, supports_dominate, ProbabilityMeasure, SUM_TOLERANCE};
use crate::quad;
use crate::rng;
use crate::stats::log_sum_exp;

/// Lambda grid used for sup/limit sweeps and reports.
pub const LAMBDA_GRID: [f64; 9] = [1.01, 1.1, 1.5, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0];

/// Conservative absolute error bound attached to quadrature results
/// (tolerance 1e-10 plus window-truncation margin).
pub const QUAD_ERROR_BOUND: f64 = 1e-8;

/// Divergence order: a finite lambda > 1, or one of the two limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DivergenceOrder {
    Finite(f64),
    Kl,
    Max,
}

impl DivergenceOrder {
    pub fn finite(lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 1.0) {
            return Err(Error::invalid(format!(
                "finite Renyi order requires lambda > 1, got {lambda}"
            )));
        }
        Ok(DivergenceOrder::Finite(lambda))
    }
}

impl std::fmt::Display for DivergenceOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DivergenceOrder::Finite(l) => write!(f, "{l}"),
            DivergenceOrder::Kl => write!(f, "kl"),
            DivergenceOrder::Max => write!(f, "max"),
        }
    }
}

impl std::str::FromStr for DivergenceOrder {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "kl" => Ok(DivergenceOrder::Kl),
            "max" | "inf" | "infinity" => Ok(DivergenceOrder::Max),
            other => {
                let lambda: f64 = other
                    .parse()
                    .map_err(|_| Error::invalid(format!("unparseable order '{s}'")))?;
                DivergenceOrder::finite(lambda)
            }
        }
    }
}

// JSON form: a bare number for finite orders, "kl"/"max" for the limits.
impl Serialize for DivergenceOrder {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            DivergenceOrder::Finite(l) => serializer.serialize_f64(*l),
            DivergenceOrder::Kl => serializer.serialize_str("kl"),
            DivergenceOrder::Max => serializer.serialize_str("max"),
        }
    }
}

impl<'de> Deserialize<'de> for DivergenceOrder {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(deserializer)?;
        match &v {
            serde_json::Value::Number(n) => {
                let l = n.as_f64().ok_or_else(|| D::Error::custom("bad order"))?;
                DivergenceOrder::finite(l).map_err(D::Error::custom)
            }
            serde_json::Value::String(s) => s.parse().map_err(D::Error::custom),
            _ => Err(D::Error::custom("order must be a number > 1, \"kl\" or \"max\"")),
        }
    }
}

/// How a divergence value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DivergenceMethod {
    ClosedForm,
    Quadrature,
    Enumeration,
    MonteCarlo,
}

/// A computed divergence: nonnegative (tiny negative round-off is clamped to
/// zero), possibly infinite, with an error bound where the method has one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceResult {
    #[serde(with = "crate::jsonf")]
    pub value: f64,
    pub method: DivergenceMethod,
    pub error_bound: Option<f64>,
}

impl DivergenceResult {
    fn new(value: f64, method: DivergenceMethod, error_bound: Option<f64>) -> Self {
        debug_assert!(
            method == DivergenceMethod::MonteCarlo || value >= -1e-9,
            "deterministic divergence went negative: {value}"
        );
        DivergenceResult {
            value: if value < 0.0 { 0.0 } else { value },
            method,
            error_bound,
        }
    }

    pub fn is_infinite(&self) -> bool {
        self.value == f64::INFINITY
    }
}

/// D_lambda(m1, m2) for any order, dispatching per measure family.
pub fn renyi_divergence(
    m1: &ProbabilityMeasure,
    m2: &ProbabilityMeasure,
    order: DivergenceOrder,
) -> Result<DivergenceResult> {
    match order {
        DivergenceOrder::Kl => kl_divergence(m1, m2),
        DivergenceOrder::Max => max_divergence(m1, m2),
        DivergenceOrder::Finite(lambda) => finite_order(m1, m2, lambda),
    }
}

fn finite_order(
    m1: &ProbabilityMeasure,
    m2: &ProbabilityMeasure,
    lambda: f64,
) -> Result<DivergenceResult> {
    check_density_pair(m1, m2)?;
    if lambda.is_nan() || lambda <= 1.0 {
        return Err(Error::invalid("finite Renyi order requires lambda > 1"));
    }
    if m1 == m2 {
        return Ok(DivergenceResult::new(0.0, family_method(m1), None));
    }
    use ProbabilityMeasure::*;
    match (m1, m2) {
        (Categorical { probs: p }, Categorical { probs: q }) => {
            Ok(categorical_renyi(p, q, lambda))
        }
        (
            IsotropicGaussian { mean: m1v, sigma: s1 },
            IsotropicGaussian { mean: m2v, sigma: s2 },
        ) => {
            if s1 == s2 {
                let d2: f64 = m1v.iter().zip(m2v).map(|(a, b)| (a - b) * (a - b)).sum();
                let value = lambda * d2 / (2.0 * s1 * s1);
                Ok(DivergenceResult::new(value, DivergenceMethod::ClosedForm, None))
            } else if lambda / (s1 * s1) + (1.0 - lambda) / (s2 * s2) <= 0.0 {
                // The integrand's Gaussian tail flips sign: mass escapes.
                Ok(DivergenceResult::new(
                    f64::INFINITY,
                    DivergenceMethod::Quadrature,
                    None,
                ))
            } else {
                let total: f64 = m1v
                    .iter()
                    .zip(m2v)
                    .map(|(&a, &b)| renyi_1d_quadrature(gauss1(a, *s1), gauss1(b, *s2), lambda, gaussian_window(a, *s1, b, *s2, lambda)))
                    .sum();
                Ok(DivergenceResult::new(
                    total,
                    DivergenceMethod::Quadrature,
                    Some(QUAD_ERROR_BOUND * m1v.len() as f64),
                ))
            }
        }
        (ProductLaplace { loc: l1, scale: b1 }, ProductLaplace { loc: l2, scale: b2 }) => {
            let tail_rate = lambda / b1 + (1.0 - lambda) / b2;
            if tail_rate <= 0.0 {
                return Ok(DivergenceResult::new(
                    f64::INFINITY,
                    DivergenceMethod::Quadrature,
                    None,
                ));
            }
            let total: f64 = l1
                .iter()
                .zip(l2)
                .map(|(&a, &b)| {
                    renyi_1d_quadrature_laplace(
                        a,
                        *b1,
                        b,
                        *b2,
                        lambda,
                        laplace_window(a, *b1, b, *b2, tail_rate),
                    )
                })
                .sum();
            Ok(DivergenceResult::new(
                total,
                DivergenceMethod::Quadrature,
                Some(QUAD_ERROR_BOUND * l1.len() as f64),
            ))
        }
        _ => unreachable!("check_density_pair admits only same-family density pairs"),
    }
}

/// Finite-order divergence for a continuous pair via quadrature, bypassing
/// any closed form. This is the oracle the closed forms are validated
/// against; certification code also uses it to cross-check analytic bounds.
pub fn renyi_quadrature(
    m1: &ProbabilityMeasure,
    m2: &ProbabilityMeasure,
    lambda: f64,
) -> Result<DivergenceResult> {
    check_density_pair(m1, m2)?;
    if lambda.is_nan() || lambda <= 1.0 {
        return Err(Error::invalid("quadrature oracle requires lambda > 1"));
    }
    use ProbabilityMeasure::*;
    match (m1, m2) {
        (
            IsotropicGaussian { mean: m1v, sigma: s1 },
            IsotropicGaussian { mean: m2v, sigma: s2 },
        ) => {
            if lambda / (s1 * s1) + (1.0 - lambda) / (s2 * s2) <= 0.0 {
                return Ok(DivergenceResult::new(
                    f64::INFINITY,
                    DivergenceMethod::Quadrature,
                    None,
                ));
            }
            let total: f64 = m1v
                .iter()
                .zip(m2v)
                .map(|(&a, &b)| {
                    renyi_1d_quadrature(
                        gauss1(a, *s1),
                        gauss1(b, *s2),
                        lambda,
                        gaussian_window(a, *s1, b, *s2, lambda),
                    )
                })
                .sum();
            Ok(DivergenceResult::new(
                total,
                DivergenceMethod::Quadrature,
                Some(QUAD_ERROR_BOUND * m1v.len() as f64),
            ))
        }
        (ProductLaplace { .. }, ProductLaplace { .. }) => finite_order(m1, m2, lambda),
        _ => Err(Error::unsupported(
            "quadrature oracle applies to continuous pairs",
        )),
    }
}

/// KL divergence: the lambda -> 1 limit.
pub fn kl_divergence(
    m1: &ProbabilityMeasure,
    m2: &ProbabilityMeasure,
) -> Result<DivergenceResult> {
    check_density_pair(m1, m2)?;
    if m1 == m2 {
        return Ok(DivergenceResult::new(0.0, family_method(m1), None));
    }
    use ProbabilityMeasure::*;
    match (m1, m2) {
        (Categorical { probs: p }, Categorical { probs: q }) => {
            let mut total = 0.0;
            for (&pi, &qi) in p.iter().zip(q) {
                if pi > 0.0 {
                    if qi == 0.0 {
                        return Ok(DivergenceResult::new(
                            f64::INFINITY,
                            DivergenceMethod::Enumeration,
                            None,
                        ));
                    }
                    total += pi * (pi.ln() - qi.ln());
                }
            }
            Ok(DivergenceResult::new(total, DivergenceMethod::Enumeration, None))
        }
        (
            IsotropicGaussian { mean: m1v, sigma: s1 },
            IsotropicGaussian { mean: m2v, sigma: s2 },
        ) => {
            if s1 == s2 {
                let d2: f64 = m1v.iter().zip(m2v).map(|(a, b)| (a - b) * (a - b)).sum();
                Ok(DivergenceResult::new(
                    d2 / (2.0 * s1 * s1),
                    DivergenceMethod::ClosedForm,
                    None,
                ))
            } else {
                // the KL integrand is weighted by g1 alone, so the window
                // only needs to cover the first measure's support
                let total: f64 = m1v
                    .iter()
                    .zip(m2v)
                    .map(|(&a, &b)| {
                        kl_1d_quadrature(gauss1(a, *s1), gauss1(b, *s2), (a - 15.0 * s1, a + 15.0 * s1))
                    })
                    .sum();
                Ok(DivergenceResult::new(
                    total,
                    DivergenceMethod::Quadrature,
                    Some(QUAD_ERROR_BOUND * m1v.len() as f64),
                ))
            }
        }
        (ProductLaplace { loc: l1, scale: b1 }, ProductLaplace { loc: l2, scale: b2 }) => {
            let total: f64 = l1
                .iter()
                .zip(l2)
                .map(|(&a, &b)| {
                    kl_1d_quadrature(laplace1(a, *b1), laplace1(b, *b2), (a - 50.0 * b1, a + 50.0 * b1))
                })
                .sum();
            Ok(DivergenceResult::new(
                total,
                DivergenceMethod::Quadrature,
                Some(QUAD_ERROR_BOUND * l1.len() as f64),
            ))
        }
        _ => unreachable!("check_density_pair admits only same-family density pairs"),
    }
}

/// Max divergence D_inf: the supremum over outputs of the log density ratio.
pub fn max_divergence(
    m1: &ProbabilityMeasure,
    m2: &ProbabilityMeasure,
) -> Result<DivergenceResult> {
    check_density_pair(m1, m2)?;
    if m1 == m2 {
        return Ok(DivergenceResult::new(0.0, family_method(m1), None));
    }
    use ProbabilityMeasure::*;
    match (m1, m2) {
        (Categorical { probs: p }, Categorical { probs: q }) => {
            if !supports_dominate(m1, m2)? {
                return Ok(DivergenceResult::new(
                    f64::INFINITY,
                    DivergenceMethod::Enumeration,
                    None,
                ));
            }
            let sup = p
                .iter()
                .zip(q)
                .filter(|(&pi, _)| pi > 0.0)
                .map(|(&pi, &qi)| pi.ln() - qi.ln())
                .fold(f64::NEG_INFINITY, f64::max);
            Ok(DivergenceResult::new(sup, DivergenceMethod::Enumeration, None))
        }
        (
            IsotropicGaussian { mean: m1v, sigma: s1 },
            IsotropicGaussian { mean: m2v, sigma: s2 },
        ) => {
            // Per-dimension log-ratio is a quadratic; its sup is infinite
            // unless sigma1 < sigma2, or the measures coincide on that axis.
            let mut total = 0.0;
            for (&a, &b) in m1v.iter().zip(m2v) {
                if s1 > s2 || (s1 == s2 && a != b) {
                    return Ok(DivergenceResult::new(
                        f64::INFINITY,
                        DivergenceMethod::ClosedForm,
                        None,
                    ));
                }
                if s1 < s2 {
                    let inv = 1.0 / (s2 * s2) - 1.0 / (s1 * s1); // < 0
                    let y = (b / (s2 * s2) - a / (s1 * s1)) / inv;
                    total += (s2 / s1).ln() - (y - a) * (y - a) / (2.0 * s1 * s1)
                        + (y - b) * (y - b) / (2.0 * s2 * s2);
                }
            }
            Ok(DivergenceResult::new(total, DivergenceMethod::ClosedForm, None))
        }
        (ProductLaplace { loc: l1, scale: b1 }, ProductLaplace { loc: l2, scale: b2 }) => {
            if b1 > b2 {
                return Ok(DivergenceResult::new(
                    f64::INFINITY,
                    DivergenceMethod::ClosedForm,
                    None,
                ));
            }
            // Piecewise-linear log-ratio with nonpositive tail slopes:
            // per-dimension sup sits at one of the two kinks.
            let mut total = 0.0;
            for (&a, &b) in l1.iter().zip(l2) {
                let f = |y: f64| (b2 / b1).ln() + (y - b).abs() / b2 - (y - a).abs() / b1;
                total += f(a).max(f(b));
            }
            Ok(DivergenceResult::new(total, DivergenceMethod::ClosedForm, None))
        }
        _ => unreachable!("check_density_pair admits only same-family density pairs"),
    }
}

/// Independent stochastic estimate of D_lambda from `n` draws of `m2`:
/// (1/(lambda-1)) log( (1/n) sum exp(lambda * log g1/g2) ), evaluated with
/// log-sum-exp so overflow cannot occur. `error_bound` is the percentile
/// bootstrap 95% half-width over 200 resamples. Estimates of the
/// nonnegative divergence are clamped at zero.
pub fn renyi_monte_carlo(
    m1: &ProbabilityMeasure,
    m2: &ProbabilityMeasure,
    lambda: f64,
    n: usize,
    seed: u64,
) -> Result<DivergenceResult> {
    check_density_pair(m1, m2)?;
    if lambda.is_nan() || lambda <= 1.0 {
        return Err(Error::invalid("Monte Carlo estimator requires lambda > 1"));
    }
    if n < 1000 {
        return Err(Error::invalid("Monte Carlo estimator requires n >= 1000"));
    }
    if m1.is_finite_support() && !supports_dominate(m1, m2)? {
        // m1 charges points m2 never produces: the integral is infinite and
        // no sample from m2 can witness it.
        return Ok(DivergenceResult::new(
            f64::INFINITY,
            DivergenceMethod::MonteCarlo,
            Some(0.0),
        ));
    }

    // lambda * log-ratio at each draw, chunked so the draw sequence (and
    // therefore the estimate) is independent of worker-thread count.
    let n_chunks = n.div_ceil(rng::CHUNK);
    let scaled: Vec<f64> = (0..n_chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut r = rng::stream(seed, c as u64);
            let take = rng::CHUNK.min(n - c * rng::CHUNK);
            let mut vals = Vec::with_capacity(take);
            for _ in 0..take {
                let y = m2.draw(&mut r);
                let lr = crate::measure::log_density_ratio(m1, m2, &y)
                    .expect("density pair already checked");
                vals.push(lambda * lr);
            }
            vals
        })
        .collect();

    let ln_n = (n as f64).ln();
    let point = (log_sum_exp(&scaled) - ln_n) / (lambda - 1.0);

    // Percentile bootstrap on precomputed shifted weights; resamples only
    // index and sum, which keeps 200 x n affordable.
    let shift = scaled.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let estimate_from_weight_sum = |sum: f64| -> f64 {
        if sum <= 0.0 {
            return 0.0;
        }
        (shift + sum.ln() - ln_n) / (lambda - 1.0)
    };
    let (lo, hi) = if shift == f64::NEG_INFINITY {
        (0.0, 0.0)
    } else {
        let weights: Vec<f64> = scaled.iter().map(|&s| (s - shift).exp()).collect();
        let resamples = 200;
        let mut stats: Vec<f64> = (0..resamples)
            .into_par_iter()
            .map(|rix| {
                let mut r = rng::stream(seed, rng::BOOTSTRAP_STREAM_BASE + rix as u64);
                let mut sum = 0.0;
                for _ in 0..n {
                    sum += weights[rand::Rng::gen_range(&mut r, 0..n)];
                }
                estimate_from_weight_sum(sum)
            })
            .collect();
        stats.sort_by(|a, b| a.total_cmp(b));
        (stats[4], stats[194]) // 2.5% / 97.5% of 200
    };

    Ok(DivergenceResult::new(
        point.max(0.0),
        DivergenceMethod::MonteCarlo,
        Some(((hi - lo) / 2.0).max(f64::EPSILON)),
    ))
}

/// Trivial 0/1 distance: 0 iff the measures are equal, 1 elsewhere.
/// Finite-support measures compare atom-by-atom within 1e-12; parametric
/// families compare parameters.
pub fn trivial_distance(m1: &ProbabilityMeasure, m2: &ProbabilityMeasure) -> Result<u8> {
    m1.validate()?;
    m2.validate()?;
    use ProbabilityMeasure::*;
    match (m1.is_finite_support(), m2.is_finite_support()) {
        (true, true) => {
            let a = m1.finite_atoms().unwrap();
            let b = m2.finite_atoms().unwrap();
            Ok(if atoms_equal(&a, &b) { 0 } else { 1 })
        }
        (false, false) => match (m1, m2) {
            (IsotropicGaussian { .. }, IsotropicGaussian { .. })
            | (ProductLaplace { .. }, ProductLaplace { .. }) => {
                Ok(if m1 == m2 { 0 } else { 1 })
            }
            _ => Err(Error::unsupported(
                "trivial distance across continuous families",
            )),
        },
        _ => Err(Error::unsupported(
            "trivial distance between finite-support and continuous measures",
        )),
    }
}

fn atoms_equal(a: &[(crate::measure::Atom, f64)], b: &[(crate::measure::Atom, f64)]) -> bool {
    let covered = |from: &[(crate::measure::Atom, f64)], to: &[(crate::measure::Atom, f64)]| {
        from.iter().all(|(atom, w)| {
            let other = to
                .iter()
                .find(|(batom, _)| batom.matches(atom))
                .map(|(_, bw)| *bw)
                .unwrap_or(0.0);
            (w - other).abs() <= SUM_TOLERANCE
        })
    };
    covered(a, b) && covered(b, a)
}

// ---------------------------------------------------------------------------
// internals

fn family_method(m: &ProbabilityMeasure) -> DivergenceMethod {
    if m.is_finite_support() {
        DivergenceMethod::Enumeration
    } else {
        DivergenceMethod::ClosedForm
    }
}

fn categorical_renyi(p: &[f64], q: &[f64], lambda: f64) -> DivergenceResult {
    let mut terms = Vec::with_capacity(p.len());
    for (&pi, &qi) in p.iter().zip(q) {
        if pi > 0.0 {
            if qi == 0.0 {
                return DivergenceResult::new(f64::INFINITY, DivergenceMethod::Enumeration, None);
            }
            terms.push(lambda * pi.ln() + (1.0 - lambda) * qi.ln());
        }
    }
    let value = log_sum_exp(&terms) / (lambda - 1.0);
    DivergenceResult::new(value, DivergenceMethod::Enumeration, None)
}

fn gauss1(mean: f64, sigma: f64) -> impl Fn(f64) -> f64 {
    let norm = sigma.ln() + 0.5 * (2.0 * std::f64::consts::PI).ln();
    move |y: f64| -0.5 * (y - mean) * (y - mean) / (sigma * sigma) - norm
}

fn laplace1(loc: f64, scale: f64) -> impl Fn(f64) -> f64 {
    let norm = (2.0 * scale).ln();
    move |y: f64| -(y - loc).abs() / scale - norm
}

/// Integration window for a 1-D Gaussian pair. The integrand
/// g1^lambda g2^(1-lambda) is itself a scaled Gaussian with precision
/// `rate` centered on the tilted point, so the window tracks exactly that:
/// the feature and the window scale together and the panel grid always
/// resolves it. Callers check rate > 0 (mass escape) first.
fn gaussian_window(m1: f64, s1: f64, m2: f64, s2: f64, lambda: f64) -> (f64, f64) {
    let rate = lambda / (s1 * s1) + (1.0 - lambda) / (s2 * s2);
    debug_assert!(rate > 0.0, "integrability must be checked before integrating");
    let tilted = (lambda * m1 / (s1 * s1) + (1.0 - lambda) * m2 / (s2 * s2)) / rate;
    let half = (90.0 / rate).sqrt();
    (tilted - half, tilted + half)
}

/// Integration window for a 1-D Laplace pair: the integrand tail decays like
/// exp(-rate * |y|), so reach far enough that the truncated mass is
/// negligible at the 1e-10 tolerance.
fn laplace_window(l1: f64, b1: f64, l2: f64, b2: f64, tail_rate: f64) -> (f64, f64) {
    let spread = b1.max(b2);
    let half = (10.0 * spread).max(45.0 / tail_rate);
    (l1.min(l2) - half, l1.max(l2) + half)
}

fn renyi_1d_quadrature(
    lg1: impl Fn(f64) -> f64,
    lg2: impl Fn(f64) -> f64,
    lambda: f64,
    (a, b): (f64, f64),
) -> f64 {
    let log_f = |y: f64| lambda * lg1(y) + (1.0 - lambda) * lg2(y);
    let log_integral = quad::log_integral_exp(&log_f, a, b, quad::DEFAULT_TOL);
    log_integral / (lambda - 1.0)
}

/// Laplace pairs have a piecewise-linear log-integrand whose peak sits at a
/// kink; integrating each linear segment separately puts every peak on a
/// probe point, so sharp boundary layers at large lambda cannot hide inside
/// a panel.
fn renyi_1d_quadrature_laplace(
    loc1: f64,
    b1: f64,
    loc2: f64,
    b2: f64,
    lambda: f64,
    (a, b): (f64, f64),
) -> f64 {
    let lg1 = laplace1(loc1, b1);
    let lg2 = laplace1(loc2, b2);
    let log_f = |y: f64| lambda * lg1(y) + (1.0 - lambda) * lg2(y);
    let mut cuts = vec![a, loc1.min(loc2).clamp(a, b), loc1.max(loc2).clamp(a, b), b];
    cuts.dedup();
    let segment_logs: Vec<f64> = cuts
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| quad::log_integral_exp(&log_f, w[0], w[1], quad::DEFAULT_TOL))
        .collect();
    log_sum_exp(&segment_logs) / (lambda - 1.0)
}

fn kl_1d_quadrature(
    lg1: impl Fn(f64) -> f64,
    lg2: impl Fn(f64) -> f64,
    (a, b): (f64, f64),
) -> f64 {
    let f = |y: f64| {
        let l1 = lg1(y);
        if l1 == f64::NEG_INFINITY {
            0.0
        } else {
            l1.exp() * (l1 - lg2(y))
        }
    };
    quad::paneled_simpson(&f, a, b, quad::DEFAULT_TOL)
}
