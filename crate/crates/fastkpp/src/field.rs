//! A tagged union over every closed-form space-time field in the crate,
//! used by the solver's Dirichlet boundary mode, the ordering audits, and
//! the `evaluate` CLI subcommand.

use crate::analytic::{
    BarenblattFast, BarrierSub, BernoulliSuper, KMSimilarity, PlateauTailDatum,
    PseudoBarenblattCritical, TypeIIVeryFast,
};
use crate::error::Result;

#[derive(Debug, Clone, serde::Serialize)]
pub enum AnalyticField {
    Barenblatt(BarenblattFast),
    Bernoulli(BernoulliSuper),
    Km(KMSimilarity),
    Barrier(BarrierSub),
    /// Time-independent plateau-tail datum.
    PlateauTail(PlateauTailDatum),
    PseudoBarenblatt(PseudoBarenblattCritical),
    TypeII(TypeIIVeryFast),
    /// `coeff * r^{exponent}`, time-independent (far-field pin for the
    /// p-Laplacian runs).
    PowerLaw { coeff: f64, exponent: f64 },
    /// Evaluate the inner field at `t + dt_offset`.
    Shifted { field: Box<AnalyticField>, dt_offset: f64 },
    /// Scale the inner field by `exp(rate * t)`.
    ExpScaled { field: Box<AnalyticField>, rate: f64 },
}

impl AnalyticField {
    pub fn eval(&self, r: f64, t: f64) -> Result<f64> {
        match self {
            AnalyticField::Barenblatt(b) => b.eval(r, t),
            AnalyticField::Bernoulli(b) => b.eval(r, t),
            AnalyticField::Km(k) => Ok(k.eval(r, t)),
            AnalyticField::Barrier(b) => Ok(b.eval(r, t)),
            AnalyticField::PlateauTail(d) => Ok(d.eval(r)),
            AnalyticField::PseudoBarenblatt(p) => Ok(p.eval(r, t)),
            AnalyticField::TypeII(f) => f.eval(r, t),
            AnalyticField::PowerLaw { coeff, exponent } => Ok(coeff * r.powf(*exponent)),
            AnalyticField::Shifted { field, dt_offset } => field.eval(r, t + dt_offset),
            AnalyticField::ExpScaled { field, rate } => {
                Ok((rate * t).exp() * field.eval(r, t)?)
            }
        }
    }
}
