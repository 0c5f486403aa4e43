//! Probabilistic mappings: deterministic base classifiers, input- and
//! output-noise wrappers around them, and fully tabular mechanisms on finite
//! input spaces.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erf;

use crate::error::{Error, Result};
use crate::measure::{LabelDistribution, Point, ProbabilityMeasure, SUM_TOLERANCE};
use crate::rng;
use crate::stats::clopper_pearson;

/// A deterministic classifier h : X -> {0, ..., N-1}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BaseClassifier {
    /// Row-per-label scores w_i . x + b_i; argmax with ties going to the
    /// lowest label index.
    Linear { weights: Vec<Vec<f64>>, bias: Vec<f64> },
    /// Binary rule on the line: label 1 iff x >= cut.
    #[serde(rename = "threshold1d")]
    Threshold1D { cut: f64 },
    /// Total lookup over a finite input space 0..|X|-1.
    Table { labels: Vec<usize>, num_labels: usize },
}

impl BaseClassifier {
    pub fn validate(&self) -> Result<()> {
        match self {
            BaseClassifier::Linear { weights, bias } => {
                if weights.len() < 2 || weights.len() != bias.len() {
                    return Err(Error::invalid(
                        "linear classifier needs >= 2 label rows with matching bias",
                    ));
                }
                let k = weights[0].len();
                if k == 0 || weights.iter().any(|w| w.len() != k) {
                    return Err(Error::invalid("linear weight rows must share a dimension >= 1"));
                }
                if weights.iter().flatten().any(|w| !w.is_finite())
                    || bias.iter().any(|b| !b.is_finite())
                {
                    return Err(Error::invalid("linear parameters must be finite"));
                }
                Ok(())
            }
            BaseClassifier::Threshold1D { cut } => {
                if !cut.is_finite() {
                    return Err(Error::invalid("threshold cut must be finite"));
                }
                Ok(())
            }
            BaseClassifier::Table { labels, num_labels } => {
                if labels.is_empty() || *num_labels < 2 {
                    return Err(Error::invalid("table classifier needs inputs and >= 2 labels"));
                }
                if labels.iter().any(|l| l >= num_labels) {
                    return Err(Error::invalid("table label outside declared range"));
                }
                Ok(())
            }
        }
    }

    pub fn num_labels(&self) -> usize {
        match self {
            BaseClassifier::Linear { weights, .. } => weights.len(),
            BaseClassifier::Threshold1D { .. } => 2,
            BaseClassifier::Table { num_labels, .. } => *num_labels,
        }
    }

    /// Input dimension for continuous-input classifiers.
    pub fn input_dim(&self) -> Option<usize> {
        match self {
            BaseClassifier::Linear { weights, .. } => Some(weights[0].len()),
            BaseClassifier::Threshold1D { .. } => Some(1),
            BaseClassifier::Table { .. } => None,
        }
    }

    /// Size of the finite input space, for table classifiers.
    pub fn domain_size(&self) -> Option<usize> {
        match self {
            BaseClassifier::Table { labels, .. } => Some(labels.len()),
            _ => None,
        }
    }

    pub fn predict(&self, x: &Point) -> Result<usize> {
        match self {
            BaseClassifier::Linear { weights, bias } => {
                let coords = x
                    .coords()
                    .ok_or_else(|| Error::Domain("linear classifier needs coordinates".into()))?;
                if coords.len() != weights[0].len() {
                    return Err(Error::Domain(format!(
                        "input dimension {} != classifier dimension {}",
                        coords.len(),
                        weights[0].len()
                    )));
                }
                let mut best = 0usize;
                let mut best_score = f64::NEG_INFINITY;
                for (i, (w, b)) in weights.iter().zip(bias).enumerate() {
                    let s: f64 = w.iter().zip(coords).map(|(wi, xi)| wi * xi).sum::<f64>() + b;
                    if s > best_score {
                        best = i;
                        best_score = s;
                    }
                }
                Ok(best)
            }
            BaseClassifier::Threshold1D { cut } => {
                let coords = x
                    .coords()
                    .ok_or_else(|| Error::Domain("threshold classifier needs coordinates".into()))?;
                if coords.len() != 1 {
                    return Err(Error::Domain("threshold classifier is one-dimensional".into()));
                }
                Ok(if coords[0] >= *cut { 1 } else { 0 })
            }
            BaseClassifier::Table { labels, .. } => {
                let i = x
                    .index()
                    .ok_or_else(|| Error::Domain("table classifier needs a finite index".into()))?;
                labels
                    .get(i)
                    .copied()
                    .ok_or_else(|| Error::Domain(format!("index {i} outside table domain")))
            }
        }
    }

    /// True when the predicted label cannot change anywhere on the domain.
    pub fn is_constant(&self) -> bool {
        match self {
            BaseClassifier::Table { labels, .. } => labels.windows(2).all(|w| w[0] == w[1]),
            BaseClassifier::Threshold1D { .. } => false,
            // Over an unbounded domain the argmax varies iff two weight rows
            // differ; equal rows leave a constant score gap.
            BaseClassifier::Linear { weights, .. } => {
                weights.windows(2).all(|w| w[0] == w[1])
            }
        }
    }
}

/// Input-noise family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseKind {
    Gaussian { sigma: f64 },
    Laplace { b: f64 },
}

impl NoiseKind {
    fn validate(&self) -> Result<()> {
        let ok = match self {
            NoiseKind::Gaussian { sigma } => sigma.is_finite() && *sigma > 0.0,
            NoiseKind::Laplace { b } => b.is_finite() && *b > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid("noise scale must be finite and > 0"))
        }
    }

    /// The noise measure centered at `center`.
    pub fn measure_at(&self, center: &[f64]) -> ProbabilityMeasure {
        match self {
            NoiseKind::Gaussian { sigma } => ProbabilityMeasure::IsotropicGaussian {
                mean: center.to_vec(),
                sigma: *sigma,
            },
            NoiseKind::Laplace { b } => ProbabilityMeasure::ProductLaplace {
                loc: center.to_vec(),
                scale: *b,
            },
        }
    }
}

/// A probabilistic mapping M : X -> P(Y).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", content = "params", rename_all = "snake_case")]
pub enum ProbabilisticMapping {
    /// Noise added to x before the base classifier; the output measure lives
    /// on the label space.
    InputNoise { base: BaseClassifier, noise: NoiseKind },
    /// Deterministic prediction post-processed by a row-stochastic channel.
    OutputNoise {
        base: BaseClassifier,
        flip_matrix: Vec<Vec<f64>>,
    },
    /// Explicit categorical output row per finite input index.
    FiniteTable { table: Vec<Vec<f64>> },
    /// The base classifier itself: x maps to a Dirac at h(x).
    Deterministic { base: BaseClassifier },
}

/// The measure a mapping assigns to one input: either a concrete measure on
/// the label space, or the symbolic pushforward of an input-noise mechanism
/// (noise measure on X composed with the base classifier).
#[derive(Debug, Clone, PartialEq)]
pub enum OutputMeasure {
    Exact(ProbabilityMeasure),
    Pushforward {
        base: BaseClassifier,
        noise: NoiseKind,
        center: Vec<f64>,
    },
}

impl OutputMeasure {
    pub fn as_exact(&self) -> Option<&ProbabilityMeasure> {
        match self {
            OutputMeasure::Exact(m) => Some(m),
            OutputMeasure::Pushforward { .. } => None,
        }
    }

    /// `n` label draws from the output measure.
    pub fn sample(&self, seed: u64, n: usize) -> Result<Vec<Point>> {
        match self {
            OutputMeasure::Exact(m) => m.sample(seed, n),
            OutputMeasure::Pushforward { base, noise, center } => {
                let noise_measure = noise.measure_at(center);
                let inputs = noise_measure.sample(seed, n)?;
                inputs
                    .iter()
                    .map(|p| base.predict(p).map(Point::finite))
                    .collect()
            }
        }
    }
}

/// Evaluation budget for [`ProbabilisticMapping::label_distribution`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum LabelBudget {
    Exact,
    MonteCarlo { n: usize, seed: u64 },
}

/// A label distribution together with how it was obtained; Monte Carlo
/// estimates carry per-label Clopper-Pearson 95% intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelEstimate {
    pub dist: LabelDistribution,
    pub exact: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ci95: Option<Vec<(f64, f64)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
}

impl ProbabilisticMapping {
    pub fn validate(&self) -> Result<()> {
        match self {
            ProbabilisticMapping::InputNoise { base, noise } => {
                base.validate()?;
                noise.validate()?;
                if base.input_dim().is_none() {
                    return Err(Error::invalid(
                        "input noise requires a continuous-input base classifier",
                    ));
                }
                Ok(())
            }
            ProbabilisticMapping::OutputNoise { base, flip_matrix } => {
                base.validate()?;
                let n = base.num_labels();
                if flip_matrix.len() != n {
                    return Err(Error::invalid("flip matrix must have one row per label"));
                }
                for row in flip_matrix {
                    if row.len() != n {
                        return Err(Error::invalid("flip matrix must be square"));
                    }
                    if row.iter().any(|p| !p.is_finite() || *p < 0.0) {
                        return Err(Error::invalid("flip matrix entries must be nonnegative"));
                    }
                    let s: f64 = row.iter().sum();
                    if (s - 1.0).abs() > SUM_TOLERANCE {
                        return Err(Error::invalid("flip matrix rows must sum to 1"));
                    }
                }
                Ok(())
            }
            ProbabilisticMapping::FiniteTable { table } => {
                if table.is_empty() {
                    return Err(Error::invalid("finite table must be non-empty"));
                }
                let n = table[0].len();
                for row in table {
                    if row.len() != n {
                        return Err(Error::invalid("finite table rows must share a length"));
                    }
                    ProbabilityMeasure::categorical(row.clone())?;
                }
                Ok(())
            }
            ProbabilisticMapping::Deterministic { base } => base.validate(),
        }
    }

    pub fn num_labels(&self) -> usize {
        match self {
            ProbabilisticMapping::InputNoise { base, .. }
            | ProbabilisticMapping::OutputNoise { base, .. }
            | ProbabilisticMapping::Deterministic { base } => base.num_labels(),
            ProbabilisticMapping::FiniteTable { table } => table[0].len(),
        }
    }

    /// Size of the finite input space, when there is one.
    pub fn domain_size(&self) -> Option<usize> {
        match self {
            ProbabilisticMapping::FiniteTable { table } => Some(table.len()),
            ProbabilisticMapping::InputNoise { .. } => None,
            ProbabilisticMapping::OutputNoise { base, .. }
            | ProbabilisticMapping::Deterministic { base } => base.domain_size(),
        }
    }

    /// The output measure M(x).
    pub fn apply(&self, x: &Point) -> Result<OutputMeasure> {
        self.validate()?;
        x.validate()?;
        match self {
            ProbabilisticMapping::Deterministic { base } => {
                Ok(OutputMeasure::Exact(ProbabilityMeasure::dirac(Point::finite(
                    base.predict(x)?,
                ))))
            }
            ProbabilisticMapping::FiniteTable { table } => {
                let i = x
                    .index()
                    .ok_or_else(|| Error::Domain("finite table needs an index input".into()))?;
                let row = table
                    .get(i)
                    .ok_or_else(|| Error::Domain(format!("index {i} outside table domain")))?;
                Ok(OutputMeasure::Exact(categorical_or_dirac(row)))
            }
            ProbabilisticMapping::OutputNoise { base, flip_matrix } => {
                let label = base.predict(x)?;
                Ok(OutputMeasure::Exact(categorical_or_dirac(
                    &flip_matrix[label],
                )))
            }
            ProbabilisticMapping::InputNoise { base, noise } => {
                let coords = x
                    .coords()
                    .ok_or_else(|| Error::Domain("input noise needs coordinates".into()))?;
                if Some(coords.len()) != base.input_dim() {
                    return Err(Error::Domain("input dimension mismatch".into()));
                }
                Ok(OutputMeasure::Pushforward {
                    base: base.clone(),
                    noise: noise.clone(),
                    center: coords.to_vec(),
                })
            }
        }
    }

    /// The raw mechanism measure on the input space, for input-noise
    /// mappings: x maps to noise centered at x. This is the output measure
    /// used for privacy certification of the mechanism itself.
    pub fn raw_noise_measure(&self, x: &Point) -> Result<Option<ProbabilityMeasure>> {
        match self {
            ProbabilisticMapping::InputNoise { noise, .. } => {
                let coords = x
                    .coords()
                    .ok_or_else(|| Error::Domain("input noise needs coordinates".into()))?;
                Ok(Some(noise.measure_at(coords)))
            }
            _ => Ok(None),
        }
    }

    /// The pushforward distribution over labels at `x`.
    ///
    /// `Exact` is available whenever the measure is already categorical, and
    /// for 1-D threshold classifiers under Gaussian/Laplace input noise
    /// (noise CDF evaluated at the cut). Anything else needs `MonteCarlo`.
    pub fn label_distribution(&self, x: &Point, budget: LabelBudget) -> Result<LabelEstimate> {
        let out = self.apply(x)?;
        match budget {
            LabelBudget::Exact => match &out {
                OutputMeasure::Exact(m) => Ok(exact_estimate(m, self.num_labels())?),
                OutputMeasure::Pushforward { base, noise, center } => match base {
                    BaseClassifier::Threshold1D { cut } => {
                        let p1 = prob_at_least(noise, center[0], *cut);
                        Ok(LabelEstimate {
                            dist: LabelDistribution::new(vec![1.0 - p1, p1])?,
                            exact: true,
                            ci95: None,
                            n: None,
                        })
                    }
                    _ => Err(Error::Capability(
                        "exact label distribution is unavailable for this variant; use Monte Carlo"
                            .into(),
                    )),
                },
            },
            LabelBudget::MonteCarlo { n, seed } => {
                if n == 0 {
                    return Err(Error::invalid("Monte Carlo budget must be >= 1"));
                }
                let counts = monte_carlo_counts(&out, self.num_labels(), n, seed)?;
                let probs: Vec<f64> = counts.iter().map(|&c| c as f64 / n as f64).collect();
                let ci95 = counts
                    .iter()
                    .map(|&c| clopper_pearson(c, n as u64, 0.95))
                    .collect();
                Ok(LabelEstimate {
                    dist: LabelDistribution::new(probs)?,
                    exact: false,
                    ci95: Some(ci95),
                    n: Some(n),
                })
            }
        }
    }
}

fn categorical_or_dirac(row: &[f64]) -> ProbabilityMeasure {
    if let Some(i) = row.iter().position(|&p| p == 1.0) {
        ProbabilityMeasure::dirac(Point::finite(i))
    } else {
        ProbabilityMeasure::Categorical { probs: row.to_vec() }
    }
}

fn exact_estimate(m: &ProbabilityMeasure, num_labels: usize) -> Result<LabelEstimate> {
    let probs = match m {
        ProbabilityMeasure::Categorical { probs } => probs.clone(),
        ProbabilityMeasure::Dirac { point } => {
            let i = point
                .index()
                .ok_or_else(|| Error::invalid("label Dirac must sit on an index"))?;
            let mut probs = vec![0.0; num_labels];
            probs[i] = 1.0;
            probs
        }
        _ => return Err(Error::Capability("output measure is not on the label space".into())),
    };
    Ok(LabelEstimate {
        dist: LabelDistribution::new(probs)?,
        exact: true,
        ci95: None,
        n: None,
    })
}

/// P(center + Z >= cut) for 1-D noise Z.
fn prob_at_least(noise: &NoiseKind, center: f64, cut: f64) -> f64 {
    let t = cut - center;
    match noise {
        NoiseKind::Gaussian { sigma } => {
            // 1 - Phi(t / sigma)
            0.5 * (1.0 - erf(t / (sigma * std::f64::consts::SQRT_2)))
        }
        NoiseKind::Laplace { b } => {
            if t < 0.0 {
                1.0 - 0.5 * (t / b).exp()
            } else {
                0.5 * (-t / b).exp()
            }
        }
    }
}

/// Label counts over `n` draws, chunked so the result does not depend on the
/// number of worker threads.
fn monte_carlo_counts(
    out: &OutputMeasure,
    num_labels: usize,
    n: usize,
    seed: u64,
) -> Result<Vec<u64>> {
    let n_chunks = n.div_ceil(rng::CHUNK);
    let partials: Vec<Result<Vec<u64>>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut r = rng::stream(seed, c as u64);
            let take = rng::CHUNK.min(n - c * rng::CHUNK);
            let mut counts = vec![0u64; num_labels];
            match out {
                OutputMeasure::Exact(m) => {
                    for _ in 0..take {
                        let y = m.draw(&mut r);
                        let i = y
                            .index()
                            .ok_or_else(|| Error::invalid("label draw must be an index"))?;
                        counts[i] += 1;
                    }
                }
                OutputMeasure::Pushforward { base, noise, center } => {
                    let noise_measure = noise.measure_at(center);
                    for _ in 0..take {
                        let xp = noise_measure.draw(&mut r);
                        counts[base.predict(&xp)?] += 1;
                    }
                }
            }
            Ok(counts)
        })
        .collect();
    let mut total = vec![0u64; num_labels];
    for p in partials {
        for (t, c) in total.iter_mut().zip(p?) {
            *t += c;
        }
    }
    Ok(total)
}
