//! Numerical toolkit for symmetric pure-jump Levy operators: density
//! profiles, characteristic exponents, exponential moments, heat kernels
//! and resolvents, decay-rate analysis, and one-dimensional Schrodinger
//! bound states built on top of the resolvent.

pub mod config;
pub mod decay;
pub mod error;
pub mod expmom;
pub mod kernels;
pub mod model;
pub mod profile;
pub mod profile_analysis;
pub mod quad;
pub mod schrodinger;
pub mod special;

pub use decay::{
    fit_exponential_rate, fit_powerlaw, ratio_report, transition_sweep, ComparabilityReport,
    DecayFit, TransitionCurve,
};
pub use error::{Error, Result};
pub use model::{ClosedFormPsi, EvalMethod, LevyModel, PsiEvaluation, ScalingEstimate};
pub use profile::{stable_normalization, ProfileSpec};
pub use schrodinger::{
    bs_curve, bs_eigenvalue, find_bound_state, ground_state_profile_report, BirmanSchwingerCurve,
    BoundState, BoundStateOutcome, PotentialSpec,
};
pub use profile_analysis::{
    classify_profile, comparability_constant, kf, subexp_bound_certificate, KfReport,
    ProfileClass, ProfileClassification, SubexpCertificate, Trend,
};
