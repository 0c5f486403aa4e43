//! Machine-check of the equivalence between gamma = 0 generalized
//! robustness and almost-sure Renyi privacy, by exhaustive evaluation of
//! both sides on finite instances plus a randomized falsification sweep.
//!
//! Quantifier reading: "almost surely private" anchors the pair condition at
//! x in supp(data) with x' ranging over the ENTIRE space, and evaluates the
//! divergence in the robustness definition's order D(M(x'), M(x)). Under
//! this reading the two sides are the same predicate, evaluated here through
//! two independent code paths (the robustness mass loop and the privacy sup
//! loop), so any disagreement flags an implementation fault. The
//! bidirectional-divergence variant used by privacy certificates is also
//! reported, surfacing the direction sensitivity instead of hiding it.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::divergence::DivergenceOrder;
use crate::error::{Error, Result};
use crate::measure::Point;
use crate::mechanisms::ProbabilisticMapping;
use crate::privacy::{label_measures, sup_over_finite_pairs, CertMetric, MetricTable, PairDirection};
use crate::robustness::{
    check_generalized_robustness, DataDistribution, DivergenceKind, RiskBudget,
};
use crate::rng;

/// A fully-enumerable (X, d_X, M, D_X, lambda, epsilon, alpha) tuple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteInstance {
    pub metric: MetricTable,
    /// Must be a finite-table mapping over the same index space.
    pub mapping: ProbabilisticMapping,
    /// Data weights over indices 0..size; the support is where they are
    /// positive.
    pub data_weights: Vec<f64>,
    pub lambda: DivergenceOrder,
    pub epsilon: f64,
    pub alpha: f64,
}

impl FiniteInstance {
    pub fn validate(&self) -> Result<()> {
        let size = self.metric.size();
        self.mapping.validate()?;
        match &self.mapping {
            ProbabilisticMapping::FiniteTable { table } if table.len() == size => {}
            ProbabilisticMapping::FiniteTable { .. } => {
                return Err(Error::invalid("mapping table size != metric size"))
            }
            _ => return Err(Error::invalid("instance mapping must be a finite table")),
        }
        if self.data_weights.len() != size {
            return Err(Error::invalid("data weights must cover the index space"));
        }
        if self.data_weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::invalid("data weights must be nonnegative"));
        }
        let total: f64 = self.data_weights.iter().sum();
        if (total - 1.0).abs() > crate::measure::SUM_TOLERANCE {
            return Err(Error::invalid("data weights must sum to 1"));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::invalid("alpha must be finite and >= 0"));
        }
        if self.epsilon.is_nan() {
            return Err(Error::invalid("epsilon must not be NaN"));
        }
        Ok(())
    }

    pub fn size(&self) -> usize {
        self.metric.size()
    }
}

/// Both sides of the claim on one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceVerdict {
    /// gamma = 0 under D(M(x'), M(x)) over balls around supp(data).
    pub robust_side: bool,
    /// Pair condition at the adopted reading (anchor in supp, x' anywhere,
    /// robustness divergence order).
    pub private_side: bool,
    /// Pair condition with the certificate convention (max over both
    /// divergence directions); can differ from `private_side` when an
    /// off-support x' sees the anchor asymmetrically.
    pub private_side_bidirectional: bool,
    pub agree: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<(usize, usize)>,
    pub interpretation_note: String,
}

const READING_NOTE: &str = "almost-sure privacy read as: for every x in supp(data) and every x' \
     in the full space with d(x,x') <= alpha, D(M(x'), M(x)) <= epsilon; \
     identical quantifiers to gamma = 0 generalized robustness";

/// Evaluate both sides of the claim by full enumeration.
pub fn evaluate_claim(instance: &FiniteInstance) -> Result<EquivalenceVerdict> {
    instance.validate()?;
    let size = instance.size();

    // Robustness side: gamma over the data distribution, x' from the FULL
    // space (off-support points are eligible witnesses).
    let data = DataDistribution::FiniteWeighted {
        points: (0..size).map(Point::finite).collect(),
        weights: instance.data_weights.clone(),
    };
    let report = check_generalized_robustness(
        &instance.mapping,
        &data,
        &CertMetric::Table(instance.metric.clone()),
        instance.alpha,
        instance.epsilon,
        DivergenceKind::Order(instance.lambda),
        &RiskBudget::default(),
    )?;
    let robust_side = report.gamma_hat == 0.0;

    // Privacy side: sup of the pair divergence, anchors restricted to the
    // data support.
    let rows = label_measures(&instance.mapping, size)?;
    let anchors: Vec<bool> = instance.data_weights.iter().map(|&w| w > 0.0).collect();
    let dist = |i: usize, j: usize| Ok(instance.metric.distance(i, j));
    let (sup_adopted, witness_adopted) = sup_over_finite_pairs(
        &rows,
        dist,
        instance.alpha,
        instance.lambda,
        Some(&anchors),
        PairDirection::FromOther,
    )?;
    let private_side = sup_adopted <= instance.epsilon;
    let (sup_both, witness_both) = sup_over_finite_pairs(
        &rows,
        dist,
        instance.alpha,
        instance.lambda,
        Some(&anchors),
        PairDirection::Both,
    )?;
    let private_side_bidirectional = sup_both <= instance.epsilon;

    let witness = if !private_side {
        witness_adopted
    } else if !private_side_bidirectional {
        witness_both
    } else {
        None
    };

    let mut note = READING_NOTE.to_string();
    if private_side != private_side_bidirectional {
        note.push_str(
            "; NOTE: the bidirectional certificate convention disagrees on this instance \
             (an off-support x' sees an anchor asymmetrically)",
        );
    }

    Ok(EquivalenceVerdict {
        robust_side,
        private_side,
        private_side_bidirectional,
        agree: robust_side == private_side,
        witness,
        interpretation_note: note,
    })
}

/// A disagreement is an instance whose two sides differ; the sweep preserves
/// it verbatim for inspection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Disagreement {
    pub instance: FiniteInstance,
    pub verdict: EquivalenceVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub n_instances: usize,
    pub agree_count: usize,
    pub disagreements: Vec<Disagreement>,
}

/// Evaluate the claim on `n_instances` random finite instances (sizes within
/// `size_range`, orders from `orders`, epsilons from `epsilons`). Any
/// disagreement is returned in full.
pub fn random_instance_sweep(
    n_instances: usize,
    seed: u64,
    size_range: (usize, usize),
    orders: &[DivergenceOrder],
    epsilons: &[f64],
) -> Result<SweepSummary> {
    let (min_size, max_size) = size_range;
    if n_instances == 0 {
        return Ok(SweepSummary {
            n_instances: 0,
            agree_count: 0,
            disagreements: Vec::new(),
        });
    }
    if min_size < 2 || max_size < min_size {
        return Err(Error::invalid("instance sizes must satisfy 2 <= min <= max"));
    }
    if max_size > 12 {
        return Err(Error::invalid("sweep instances are capped at size 12"));
    }
    if orders.is_empty() || epsilons.is_empty() {
        return Err(Error::invalid("sweep needs orders and epsilons"));
    }

    let results: Vec<(FiniteInstance, EquivalenceVerdict)> = (0..n_instances)
        .into_par_iter()
        .map(|k| {
            let instance = random_instance(seed, k as u64, min_size, max_size, orders, epsilons)?;
            let verdict = evaluate_claim(&instance)?;
            Ok((instance, verdict))
        })
        .collect::<Result<_>>()?;

    let mut agree_count = 0;
    let mut disagreements = Vec::new();
    for (instance, verdict) in results {
        if verdict.agree {
            agree_count += 1;
        } else {
            disagreements.push(Disagreement { instance, verdict });
        }
    }
    Ok(SweepSummary {
        n_instances,
        agree_count,
        disagreements,
    })
}

fn random_instance(
    seed: u64,
    k: u64,
    min_size: usize,
    max_size: usize,
    orders: &[DivergenceOrder],
    epsilons: &[f64],
) -> Result<FiniteInstance> {
    let mut r = rng::stream(seed, k + 1);
    let size = r.gen_range(min_size..=max_size);

    // Metric: either distances of random points in the plane, or a scaled
    // discrete metric. Both satisfy the triangle inequality by construction.
    let metric = if r.gen::<f64>() < 0.6 {
        let scale = 0.5 + 2.0 * r.gen::<f64>();
        let pts: Vec<(f64, f64)> = (0..size).map(|_| (r.gen(), r.gen())).collect();
        let distances = (0..size)
            .map(|i| {
                (0..size)
                    .map(|j| {
                        if i == j {
                            0.0
                        } else {
                            let dx = pts[i].0 - pts[j].0;
                            let dy = pts[i].1 - pts[j].1;
                            scale * (dx * dx + dy * dy).sqrt()
                        }
                    })
                    .collect()
            })
            .collect();
        MetricTable::new(distances)?
    } else {
        let scale = 0.5 + 1.5 * r.gen::<f64>();
        let distances = (0..size)
            .map(|i| {
                (0..size)
                    .map(|j| if i == j { 0.0 } else { scale })
                    .collect()
            })
            .collect();
        MetricTable::new(distances)?
    };

    // Mapping rows: random simplexes, occasionally with structural zeros so
    // infinite divergences get exercised.
    let n_outputs = r.gen_range(2..=4usize);
    let table: Vec<Vec<f64>> = (0..size)
        .map(|_| {
            let mut row: Vec<f64> = (0..n_outputs)
                .map(|_| {
                    if r.gen::<f64>() < 0.2 {
                        0.0
                    } else {
                        r.gen::<f64>().max(1e-4)
                    }
                })
                .collect();
            let total: f64 = row.iter().sum();
            if total == 0.0 {
                row = vec![1.0 / n_outputs as f64; n_outputs];
            } else {
                row.iter_mut().for_each(|p| *p /= total);
            }
            row
        })
        .collect();

    // Data support: a random non-empty subset.
    let mut mask: Vec<bool> = (0..size).map(|_| r.gen::<f64>() < 0.7).collect();
    if !mask.iter().any(|&m| m) {
        mask[r.gen_range(0..size)] = true;
    }
    let raw: Vec<f64> = mask
        .iter()
        .map(|&m| if m { 0.05 + r.gen::<f64>() } else { 0.0 })
        .collect();
    let total: f64 = raw.iter().sum();
    let data_weights = raw.iter().map(|w| w / total).collect();

    let lambda = orders[r.gen_range(0..orders.len())];
    let epsilon = epsilons[r.gen_range(0..epsilons.len())];
    let diameter = metric.diameter();
    let alpha = match r.gen::<f64>() {
        v if v < 0.15 => 0.0,
        v if v < 0.80 => r.gen::<f64>() * diameter,
        _ => diameter * (1.0 + r.gen::<f64>()),
    };

    Ok(FiniteInstance {
        metric,
        mapping: ProbabilisticMapping::FiniteTable { table },
        data_weights,
        lambda,
        epsilon,
        alpha,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_point_instance(epsilon: f64) -> FiniteInstance {
        FiniteInstance {
            metric: MetricTable::discrete(2),
            mapping: ProbabilisticMapping::FiniteTable {
                table: vec![vec![0.9, 0.1], vec![0.1, 0.9]],
            },
            data_weights: vec![0.5, 0.5],
            lambda: DivergenceOrder::Finite(2.0),
            epsilon,
            alpha: 1.0,
        }
    }

    #[test]
    fn constant_mapping_is_robust_and_private() {
        let inst = FiniteInstance {
            metric: MetricTable::discrete(3),
            mapping: ProbabilisticMapping::FiniteTable {
                table: vec![vec![0.5, 0.5]; 3],
            },
            data_weights: vec![1.0 / 3.0; 3],
            lambda: DivergenceOrder::Finite(2.0),
            epsilon: 0.0,
            alpha: 1.0,
        };
        let v = evaluate_claim(&inst).unwrap();
        assert!(v.robust_side && v.private_side && v.agree);
        assert!(v.witness.is_none());
    }

    #[test]
    fn two_point_frozen_divergence_drives_both_sides() {
        // D_2([.9,.1] || [.1,.9]) = ln(0.81/0.1 + 0.01/0.9) = 2.0932348638121717
        let v = evaluate_claim(&two_point_instance(0.1)).unwrap();
        assert!(!v.robust_side && !v.private_side && v.agree);
        assert_eq!(v.witness, Some((0, 1)));
        // still above 1.5: both sides remain false
        let v = evaluate_claim(&two_point_instance(1.5)).unwrap();
        assert!(!v.robust_side && !v.private_side && v.agree);
        // above the divergence: both sides true
        let v = evaluate_claim(&two_point_instance(2.2)).unwrap();
        assert!(v.robust_side && v.private_side && v.agree);
    }

    #[test]
    fn off_support_point_constrains_only_as_witness() {
        // M(0) = [.5,.5], M(1) = [.9,.1]; supp(data) = {0}.
        // Checked direction D(M(1) || M(0)) = 0.4947 <= 0.7, so both sides
        // hold; the reverse direction 1.0217 > 0.7 would only matter if the
        // off-support x = 1 could anchor the pair condition.
        let inst = FiniteInstance {
            metric: MetricTable::discrete(2),
            mapping: ProbabilisticMapping::FiniteTable {
                table: vec![vec![0.5, 0.5], vec![0.9, 0.1]],
            },
            data_weights: vec![1.0, 0.0],
            lambda: DivergenceOrder::Finite(2.0),
            epsilon: 0.7,
            alpha: 1.0,
        };
        let v = evaluate_claim(&inst).unwrap();
        assert!(v.robust_side && v.private_side && v.agree);
        // the bidirectional certificate convention sees the asymmetry
        assert!(!v.private_side_bidirectional);
        assert!(v.interpretation_note.contains("bidirectional"));
    }

    #[test]
    fn ball_saturation_beyond_the_diameter() {
        let far = FiniteInstance {
            metric: MetricTable::new(vec![
                vec![0.0, 1.0, 2.0],
                vec![1.0, 0.0, 1.0],
                vec![2.0, 1.0, 0.0],
            ])
            .unwrap(),
            mapping: ProbabilisticMapping::FiniteTable {
                table: vec![vec![0.9, 0.1], vec![0.9, 0.1], vec![0.1, 0.9]],
            },
            data_weights: vec![1.0, 0.0, 0.0],
            lambda: DivergenceOrder::Finite(2.0),
            epsilon: 1.0,
            alpha: 1.0,
        };
        // only the far point (distance 2) violates: within alpha=1 both
        // sides hold
        let v = evaluate_claim(&far).unwrap();
        assert!(v.robust_side && v.private_side);
        // alpha beyond the diameter saturates the ball and flips both sides
        let saturated = FiniteInstance { alpha: 5.0, ..far };
        let v = evaluate_claim(&saturated).unwrap();
        assert!(!v.robust_side && !v.private_side && v.agree);
    }

    #[test]
    fn epsilon_surrogate_above_max_ratio_forces_both_sides_true() {
        // max over pairs of D_2 is 2.0933; any epsilon above it passes
        let v = evaluate_claim(&two_point_instance(2.31)).unwrap();
        assert!(v.robust_side && v.private_side && v.agree);
    }

    #[test]
    fn empty_sweep_is_empty() {
        let s = random_instance_sweep(0, 1, (2, 8), &[DivergenceOrder::Finite(2.0)], &[0.1])
            .unwrap();
        assert_eq!(s.n_instances, 0);
        assert_eq!(s.agree_count, 0);
    }

    #[test]
    fn small_sweep_agrees_and_is_deterministic() {
        let orders = [
            DivergenceOrder::Finite(1.5),
            DivergenceOrder::Finite(2.0),
            DivergenceOrder::Max,
        ];
        let eps = [0.01, 0.1, 1.0, 10.0];
        let s = random_instance_sweep(50, 123, (2, 6), &orders, &eps).unwrap();
        assert_eq!(s.agree_count, 50, "disagreements: {:?}", s.disagreements);
        let again = random_instance_sweep(50, 123, (2, 6), &orders, &eps).unwrap();
        assert_eq!(s, again);
    }

    #[test]
    fn invalid_instances_are_rejected() {
        let mut inst = two_point_instance(0.1);
        inst.data_weights = vec![0.5, 0.6];
        assert!(evaluate_claim(&inst).is_err());
        let mut inst = two_point_instance(0.1);
        inst.mapping = ProbabilisticMapping::FiniteTable {
            table: vec![vec![1.0, 0.0]],
        };
        assert!(evaluate_claim(&inst).is_err());
    }
}
