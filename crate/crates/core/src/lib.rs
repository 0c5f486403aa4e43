//! Probabilistic mappings, Renyi divergences between their output measures,
//! and certification of (Renyi-)differential privacy and generalized
//! adversarial robustness, including an exhaustive finite-instance checker
//! for the equivalence between the two notions.
//!
//! All stochastic operations take explicit seeds and are deterministic for a
//! fixed seed, independent of worker-thread count.

pub mod divergence;
pub mod equivalence;
pub mod error;
pub mod jsonf;
pub mod measure;
pub mod mechanisms;
pub mod privacy;
pub mod quad;
pub mod rng;
pub mod robustness;
pub mod stats;

pub use divergence::{
    kl_divergence, max_divergence, renyi_divergence, renyi_monte_carlo, renyi_quadrature,
    trivial_distance, DivergenceMethod, DivergenceOrder, DivergenceResult,
};
pub use equivalence::{evaluate_claim, random_instance_sweep, EquivalenceVerdict, FiniteInstance};
pub use error::{Error, Result};
pub use measure::{
    LabelDistribution, MetricKind, MetricSpec, Point, ProbabilityMeasure, SUM_TOLERANCE,
};
pub use mechanisms::{
    BaseClassifier, LabelBudget, LabelEstimate, NoiseKind, OutputMeasure, ProbabilisticMapping,
};
pub use privacy::{
    certify_classical_dp, certify_metric_dp, certify_rdp, CertMethod, CertMetric, DpOutcome,
    DpVerdict, MetricTable, RdpCertificate,
};
pub use robustness::{
    check_classic_robustness, check_generalized_robustness, craft_adversarial,
    prediction_change_risk, AdversarialExample, AttackBudget, AttackSearchResult, BallSearch,
    DataDistribution, DivergenceKind, RobustnessReport, RobustnessVerdict,
};
