//! Closed-form solutions, barriers, and constant schedules.

pub mod barenblatt;
pub mod barrier;
pub mod fields;
pub mod schedule;

pub use barenblatt::{normalize_mass, BarenblattFast, Formulation, ProfileBounds};
pub use barrier::{barrier_feasibility, BarrierBranch, FeasibilityReport};
pub use fields::{
    eval_critical_tail, make_plateau_tail, BarrierSub, BernoulliSuper, KMSimilarity,
    PlateauTailDatum, PseudoBarenblattCritical, TypeIIVeryFast,
};
pub use schedule::{lemma42_schedule, Lemma42Schedule};
