//! Evaluation of the first- and second-eigenvalue upper bounds for `J_s`.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::HypersurfaceModel;
use crate::spectrum::{js_spectrum, DEFAULT_CUTOFF};

/// A bound passes when `computed <= bound + PASS_TOL`.
pub const PASS_TOL: f64 = 1e-10;
/// `|slack|` below this is reported as equality.
pub const EQUALITY_TOL: f64 = 1e-10;
/// Tolerance for deciding `r = 1`.
pub const UNIT_SCALAR_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Theorem {
    /// `lambda_1 <= -n(n-1) r sqrt(r-1)` for `r > 1`.
    #[serde(rename = "T1.1")]
    FirstEigenvalueScalarAboveOne,
    /// `lambda_1 <= -2n(n-1) min|H|` for `r = 1`, `H_3 != 0`.
    #[serde(rename = "T1.2")]
    FirstEigenvalueUnitScalar,
    /// `lambda_2 <= 0` for `r > 1`, `n >= 5`.
    #[serde(rename = "T1.3")]
    SecondEigenvalueScalarAboveOne,
    /// `lambda_2 <= -(n(n-1)(n-2)/2) min|H_3|` for `r = 1`, `n >= 5`.
    #[serde(rename = "T1.4")]
    SecondEigenvalueUnitScalar,
    /// `lambda_2 <= n(n-1)((r-1)^2/H + ((n-2)/2) H_3 - (n(r-1)/2) H)` for `r > 1`.
    #[serde(rename = "R4.1")]
    RefinedSecondEigenvalue,
}

impl Theorem {
    pub const ALL: [Theorem; 5] = [
        Theorem::FirstEigenvalueScalarAboveOne,
        Theorem::FirstEigenvalueUnitScalar,
        Theorem::SecondEigenvalueScalarAboveOne,
        Theorem::SecondEigenvalueUnitScalar,
        Theorem::RefinedSecondEigenvalue,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Theorem::FirstEigenvalueScalarAboveOne => "T1.1",
            Theorem::FirstEigenvalueUnitScalar => "T1.2",
            Theorem::SecondEigenvalueScalarAboveOne => "T1.3",
            Theorem::SecondEigenvalueUnitScalar => "T1.4",
            Theorem::RefinedSecondEigenvalue => "R4.1",
        }
    }

    /// Index of the eigenvalue the bound constrains.
    pub fn eigen_index(self) -> usize {
        match self {
            Theorem::FirstEigenvalueScalarAboveOne | Theorem::FirstEigenvalueUnitScalar => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub bound_value: f64,
    pub computed_value: f64,
    /// `bound_value - computed_value`.
    pub slack: f64,
    pub pass: bool,
    pub equality: bool,
}

impl BoundCheck {
    pub fn new(bound_value: f64, computed_value: f64) -> Self {
        let slack = bound_value - computed_value;
        Self {
            bound_value,
            computed_value,
            slack,
            pass: computed_value <= bound_value + PASS_TOL,
            equality: slack.abs() < EQUALITY_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum BoundVerdict {
    Checked(BoundCheck),
    Skipped { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub model: HypersurfaceModel,
    pub theorem: Theorem,
    pub verdict: BoundVerdict,
}

impl BoundReport {
    pub fn check(&self) -> Option<&BoundCheck> {
        match &self.verdict {
            BoundVerdict::Checked(c) => Some(c),
            BoundVerdict::Skipped { .. } => None,
        }
    }
}

/// Compares `lambda_1(J_s)` and `lambda_2(J_s)` of a model against every
/// bound whose hypotheses the model meets. Bounds whose hypotheses fail are
/// returned as skipped with the reason.
///
/// The models are homogeneous, so `min |H|`, `max H_3` and friends are the
/// constant values of `H` and `H_3`.
pub fn evaluate_bounds(model: &HypersurfaceModel) -> Result<Vec<BoundReport>> {
    let inv = model.geometry()?;
    let n = inv.n;
    let nf = n as f64;
    let r = inv.r;
    let above_one = r > 1.0 + UNIT_SCALAR_TOL;
    let unit = (r - 1.0).abs() <= UNIT_SCALAR_TOL;
    let h3_nonzero = inv.h3.abs() > UNIT_SCALAR_TOL;
    let spectrum = js_spectrum(model, DEFAULT_CUTOFF);

    let reports = Theorem::ALL
        .iter()
        .map(|&theorem| {
            let skip = |reason: String| BoundVerdict::Skipped { reason };
            let hypothesis = match theorem {
                Theorem::FirstEigenvalueScalarAboveOne => {
                    (!above_one).then(|| format!("needs r > 1, model has r = {r}"))
                }
                Theorem::FirstEigenvalueUnitScalar => (!(unit && h3_nonzero))
                    .then(|| format!("needs r = 1 and H3 != 0, model has r = {r}, H3 = {}", inv.h3)),
                Theorem::SecondEigenvalueScalarAboveOne | Theorem::RefinedSecondEigenvalue => {
                    (!(above_one && n >= 5))
                        .then(|| format!("needs r > 1 and n >= 5, model has r = {r}, n = {n}"))
                }
                Theorem::SecondEigenvalueUnitScalar => (!(unit && h3_nonzero && n >= 5)).then(|| {
                    format!(
                        "needs r = 1, H3 != 0 and n >= 5, model has r = {r}, H3 = {}, n = {n}",
                        inv.h3
                    )
                }),
            };
            let verdict = match (hypothesis, &spectrum) {
                (Some(reason), _) => skip(reason),
                (None, Err(e)) => skip(e.to_string()),
                (None, Ok(spec)) => {
                    let computed = spec
                        .eigenvalue(theorem.eigen_index())
                        .expect("default cutoff yields two eigenvalues");
                    let bound = match theorem {
                        Theorem::FirstEigenvalueScalarAboveOne => -nf * (nf - 1.0) * r * (r - 1.0).sqrt(),
                        Theorem::FirstEigenvalueUnitScalar => -2.0 * nf * (nf - 1.0) * inv.h.abs(),
                        Theorem::SecondEigenvalueScalarAboveOne => 0.0,
                        Theorem::SecondEigenvalueUnitScalar => {
                            -nf * (nf - 1.0) * (nf - 2.0) / 2.0 * inv.h3.abs()
                        }
                        Theorem::RefinedSecondEigenvalue => {
                            let h2 = r - 1.0;
                            nf * (nf - 1.0)
                                * (h2 * h2 / inv.h + (nf - 2.0) / 2.0 * inv.h3 - nf * h2 / 2.0 * inv.h)
                        }
                    };
                    BoundVerdict::Checked(BoundCheck::new(bound, computed))
                }
            };
            BoundReport {
                model: *model,
                theorem,
                verdict,
            }
        })
        .collect();
    Ok(reports)
}
