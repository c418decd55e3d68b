use serde::{Deserialize, Serialize};

use super::ball::BallPoint;
use super::centering::centering_solve;
use super::lemmas::lemma36_rhs;
use super::sample::SampledHypersurface;
use crate::bounds::UNIT_SCALAR_TOL;
use crate::curvature::invariants_from_curvatures;
use crate::error::{Error, Result};
use crate::model::HypersurfaceModel;
use crate::quadrature::fsum;
use crate::spectrum::{js_spectrum, DEFAULT_CUTOFF};

/// One inequality `lhs <= rhs` of the chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainStep {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`
    pub slack: f64,
    pub pass: bool,
}

impl ChainStep {
    fn new(name: &str, lhs: f64, rhs: f64, allowance: f64) -> Self {
        Self {
            name: name.to_string(),
            lhs,
            rhs,
            slack: rhs - lhs,
            pass: lhs <= rhs + allowance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinMaxReport {
    pub point: BallPoint,
    pub iterations: usize,
    pub volume: f64,
    pub lambda2: f64,
    /// `sum_A int (J_s f^A) f^A`
    pub rayleigh: f64,
    /// `n(n-1) int (H_2^2/H + ((n-2)/2) H_3 - n H H_2 / 2)`
    pub lemma_bound: f64,
    /// `(n(n-1)(n-2)/2) max H_3 Vol` when `r = 1`, otherwise
    /// `n(n-1) int (n H_2 / 2)(H_2/H - H)`.
    pub closing_bound: f64,
    pub steps: Vec<ChainStep>,
    pub pass: bool,
}

/// Runs the second-eigenvalue argument on a sampled model: centers the
/// coordinate functions against `u`, then checks
/// `lambda_2 Vol <= sum_A int (J_s f^A) f^A <= lemma bound <= closing bound <= target Vol`,
/// each within `tol * Vol`. The target is `0` for `r > 1` and
/// `-(n(n-1)(n-2)/2) min |H_3|` for `r = 1`.
pub fn minmax_chain_check(sample: &SampledHypersurface, u: &[f64], tol: f64) -> Result<MinMaxReport> {
    let centering = centering_solve(sample, u, tol)?;
    let g = centering.point;
    let vol = sample.total_weight();
    let n = sample.n();
    let nf = n as f64;
    let lambda2 = js_spectrum(sample.model(), DEFAULT_CUTOFF)?
        .lambda2()
        .expect("default cutoff yields two eigenvalues");
    let rayleigh = lemma36_rhs(sample, &g)?;

    let invs = sample
        .samples()
        .iter()
        .map(|s| invariants_from_curvatures(&s.shape))
        .collect::<Result<Vec<_>>>()?;
    if let Some(bad) = invs.iter().find(|i| i.h <= 0.0) {
        return Err(Error::Orientation(bad.h));
    }
    let weights = sample.samples().iter().map(|s| s.weight);
    let lemma_bound = nf
        * (nf - 1.0)
        * fsum(weights.clone().zip(&invs).map(|(w, i)| {
            w * (i.h2 * i.h2 / i.h + (nf - 2.0) / 2.0 * i.h3 - nf * i.h * i.h2 / 2.0)
        }));
    let unit = invs.iter().all(|i| (i.r - 1.0).abs() <= UNIT_SCALAR_TOL);
    let c3 = nf * (nf - 1.0) * (nf - 2.0) / 2.0;
    let (closing_bound, target) = if unit {
        let max_h3 = invs.iter().map(|i| i.h3).fold(f64::NEG_INFINITY, f64::max);
        let min_abs_h3 = invs.iter().map(|i| i.h3.abs()).fold(f64::INFINITY, f64::min);
        (c3 * max_h3 * vol, -c3 * min_abs_h3 * vol)
    } else {
        let closing = nf
            * (nf - 1.0)
            * fsum(weights.zip(&invs).map(|(w, i)| w * nf * i.h2 / 2.0 * (i.h2 / i.h - i.h)));
        (closing, 0.0)
    };
    let allowance = tol * vol;
    let steps = vec![
        ChainStep::new("min-max", lambda2 * vol, rayleigh, allowance),
        ChainStep::new("gradient estimate", rayleigh, lemma_bound, allowance),
        ChainStep::new("curvature estimate", lemma_bound, closing_bound, allowance),
        ChainStep::new("conclusion", closing_bound, target, allowance),
    ];
    let pass = steps.iter().all(|s| s.pass);
    Ok(MinMaxReport {
        point: g,
        iterations: centering.iterations,
        volume: vol,
        lambda2,
        rayleigh,
        lemma_bound,
        closing_bound,
        steps,
        pass,
    })
}

/// For a Clifford model at the critical radius, compares `lambda_2(J_s)` with
/// the eigenvalue the ambient coordinates carry. Since `H_2 = 0` there,
/// `box x_A = -n(n-1) H x_A`, so `J_s x_A = (n(n-1)H - (n(n-1)H + nHS - f_3)) x_A`.
/// Returns the largest of `|lambda_2 - (n(n-1)(n-2)/2) H_3|`, the gap between
/// that coordinate eigenvalue and `lambda_2`, and `n(n-1)|H_2|`.
pub fn position_eigenfunction_check(model: &HypersurfaceModel) -> Result<f64> {
    if !matches!(model, HypersurfaceModel::Clifford { .. }) {
        return Err(Error::Hypothesis("coordinate eigenfunctions need a Clifford model".into()));
    }
    let inv = model.geometry()?;
    if (inv.r - 1.0).abs() > UNIT_SCALAR_TOL || inv.h2.abs() > UNIT_SCALAR_TOL {
        return Err(Error::Hypothesis(format!(
            "needs r = 1 and H2 = 0, model has r = {}, H2 = {}",
            inv.r, inv.h2
        )));
    }
    let nf = inv.n as f64;
    let lambda2 = js_spectrum(model, DEFAULT_CUTOFF)?
        .lambda2()
        .expect("default cutoff yields two eigenvalues");
    let coordinate = nf * (nf - 1.0) * inv.h - model.jacobi_order0()?;
    let closed = nf * (nf - 1.0) * (nf - 2.0) / 2.0 * inv.h3;
    Ok((lambda2 - closed)
        .abs()
        .max((coordinate - lambda2).abs())
        .max(nf * (nf - 1.0) * inv.h2.abs()))
}
