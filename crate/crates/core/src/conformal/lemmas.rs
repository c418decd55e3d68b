use serde::{Deserialize, Serialize};

use super::ball::{dot, moebius_map, BallPoint};
use super::sample::{Sample, SampledHypersurface};
use crate::curvature::{
    invariants_from_curvatures, jacobi_order0_reduced, lemma38_pointwise, rho_quadratic_form,
    CurvatureInvariants, PrincipalCurvatures,
};
use crate::error::{Error, Result};
use crate::quadrature::fsum;

/// Step of the geodesic finite differences in [`support_hessian_check`].
pub const HESSIAN_STEP: f64 = 1e-4;
/// Allowed excess of `lhs` over `rhs` in [`lemma37_gap`], relative to the volume.
pub const GAP_SLACK: f64 = 1e-9;

fn check_ball(sample: &SampledHypersurface, g: &BallPoint) -> Result<()> {
    if g.dim() != sample.ambient_dim() {
        return Err(Error::Dimension(format!(
            "ball point of dimension {} for a hypersurface in R^{}",
            g.dim(),
            sample.ambient_dim()
        )));
    }
    Ok(())
}

fn invariants(s: &Sample) -> Result<CurvatureInvariants> {
    invariants_from_curvatures(&s.shape)
}

fn positive_mean_curvature(s: &Sample) -> Result<CurvatureInvariants> {
    let inv = invariants(s)?;
    if inv.h <= 0.0 {
        return Err(Error::Orientation(inv.h));
    }
    Ok(inv)
}

/// Quantities attached to `g` at one sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RhoPoint {
    /// `<x, g>`
    pub f: f64,
    /// `<e_{n+1}, g>`
    pub gtilde: f64,
    /// `-ln(lambda) - ln(1 + f)`
    pub rho: f64,
    /// `rho_i = -f_i/(1 + f)` with `f_i = <g, e_i>`.
    pub grad_rho: Vec<f64>,
}

/// Per-sample conformal data of `F_g`; `e^{2 rho}` is the conformal factor.
pub fn rho_field(sample: &SampledHypersurface, g: &BallPoint) -> Result<Vec<RhoPoint>> {
    check_ball(sample, g)?;
    let ln_lambda = g.lambda().ln();
    Ok(sample
        .samples()
        .iter()
        .map(|s| {
            let f = dot(&s.x, g.g());
            RhoPoint {
                f,
                gtilde: dot(&s.normal, g.g()),
                rho: -ln_lambda - f.ln_1p(),
                grad_rho: s.tangent_frame.iter().map(|e| -dot(e, g.g()) / (1.0 + f)).collect(),
            }
        })
        .collect())
}

/// Coordinates `f^A = <E^A, F_g(x)>` of the transformed samples.
pub fn test_functions(sample: &SampledHypersurface, g: &BallPoint) -> Result<Vec<Vec<f64>>> {
    check_ball(sample, g)?;
    sample.samples().iter().map(|s| moebius_map(g, &s.x)).collect()
}

/// Worst finite-difference residual of the support-function calculus for the
/// height `f = <a, x>` and the normal height `g~ = <a, e_{n+1}>`:
/// `f_i = <a, e_i>`, `f_ij = g~ h_ij - f delta_ij`, `g~_i = -h_ij f_j` and
/// `g~_jk = -g~ h_ij h_ik + f h_jk`, each checked in every principal frame.
///
/// Derivatives are taken along geodesics of the hypersurface; mixed second
/// derivatives come from polarization.
pub fn support_hessian_check(sample: &SampledHypersurface, a: &[f64]) -> Result<f64> {
    if a.len() != sample.ambient_dim() {
        return Err(Error::Dimension(format!(
            "direction of length {} in R^{}",
            a.len(),
            sample.ambient_dim()
        )));
    }
    let n = sample.n();
    let h = HESSIAN_STEP;
    let mut worst: f64 = 0.0;
    for (idx, s) in sample.samples().iter().enumerate() {
        let f0 = dot(a, &s.x);
        let g0 = dot(a, &s.normal);
        let heights = |coeffs: &[f64], t: f64| -> Result<(f64, f64)> {
            let (x, nu) = sample.geodesic(idx, coeffs, t)?;
            Ok((dot(a, &x), dot(a, &nu)))
        };
        // second derivative along the geodesic with velocity `coeffs`
        let second = |coeffs: &[f64]| -> Result<(f64, f64)> {
            let (fp, gp) = heights(coeffs, h)?;
            let (fm, gm) = heights(coeffs, -h)?;
            Ok(((fp - 2.0 * f0 + fm) / (h * h), (gp - 2.0 * g0 + gm) / (h * h)))
        };
        let unit = |i: usize| -> Vec<f64> {
            let mut v = vec![0.0; n];
            v[i] = 1.0;
            v
        };
        for i in 0..n {
            let ki = s.shape[i];
            let ai = dot(a, &s.tangent_frame[i]);
            let (fp, gp) = heights(&unit(i), h)?;
            let (fm, gm) = heights(&unit(i), -h)?;
            worst = worst.max(((fp - fm) / (2.0 * h) - ai).abs());
            worst = worst.max(((gp - gm) / (2.0 * h) + ki * ai).abs());
            let (fii, gii) = second(&unit(i))?;
            worst = worst.max((fii - (g0 * ki - f0)).abs());
            worst = worst.max((gii - (-g0 * ki * ki + f0 * ki)).abs());
            for j in i + 1..n {
                let mut plus = unit(i);
                plus[j] = 1.0;
                let mut minus = unit(i);
                minus[j] = -1.0;
                let (fpp, gpp) = second(&plus)?;
                let (fmm, gmm) = second(&minus)?;
                worst = worst.max(((fpp - fmm) / 4.0).abs());
                worst = worst.max(((gpp - gmm) / 4.0).abs());
            }
        }
    }
    Ok(worst)
}

/// `int n(n-1) H (1 - |g|^2)/(<x,g> + 1)^2 - int (n(n-1)/2)(2H - (n-2)H_3 + n H H_2)`,
/// the value of `sum_A int (J_s f^A) f^A` for the test functions of `F_g`.
pub fn lemma36_rhs(sample: &SampledHypersurface, g: &BallPoint) -> Result<f64> {
    check_ball(sample, g)?;
    let terms = sample
        .samples()
        .iter()
        .map(|s| {
            let inv = invariants(s)?;
            let nf = inv.n as f64;
            let cf = g.conformal_factor(&s.x);
            Ok(s.weight * (nf * (nf - 1.0) * inv.h * cf - jacobi_order0_reduced(&inv)))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(fsum(terms))
}

/// Both sides of the conformal-factor inequality and its equality defect.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lemma37Gap {
    /// `int H (1 - |g|^2)/(<x,g> + 1)^2`
    pub lhs: f64,
    /// `int (H + H_2^2/H) - int [H |grad rho|^2 - (2/(n(n-1))) (nH delta_ij - h_ij) rho_i rho_j]`
    pub rhs: f64,
    /// `int (H_2 + g~ H/(1 + f))^2 / H`
    pub equality_defect: f64,
}

impl Lemma37Gap {
    /// `|lhs - (rhs - equality_defect)|`
    pub fn identity_residual(&self) -> f64 {
        (self.lhs - (self.rhs - self.equality_defect)).abs()
    }
}

pub fn lemma37_gap(sample: &SampledHypersurface, g: &BallPoint) -> Result<Lemma37Gap> {
    let field = rho_field(sample, g)?;
    let mut lhs = Vec::with_capacity(field.len());
    let mut rhs = Vec::with_capacity(field.len());
    let mut defect = Vec::with_capacity(field.len());
    for (s, p) in sample.samples().iter().zip(&field) {
        let inv = positive_mean_curvature(s)?;
        let w = s.weight;
        lhs.push(w * inv.h * g.conformal_factor(&s.x));
        let q = rho_quadratic_form(&s.shape, inv.h, &p.grad_rho);
        rhs.push(w * (inv.h + inv.h2 * inv.h2 / inv.h - q));
        let e = inv.h2 + p.gtilde * inv.h / (1.0 + p.f);
        defect.push(w * e * e / inv.h);
    }
    let gap = Lemma37Gap {
        lhs: fsum(lhs),
        rhs: fsum(rhs),
        equality_defect: fsum(defect),
    };
    if gap.lhs > gap.rhs + GAP_SLACK * sample.total_weight().max(1.0) {
        return Err(Error::InternalConsistency(format!(
            "conformal-factor inequality fails: lhs {} > rhs {}",
            gap.lhs, gap.rhs
        )));
    }
    Ok(gap)
}

/// Per-sample values of the gradient form `H |grad rho|^2 - (2/(n(n-1))) (nH delta_ij - h_ij) rho_i rho_j`.
pub fn lemma38_integrand(sample: &SampledHypersurface, g: &BallPoint) -> Result<Vec<f64>> {
    if sample.n() < 5 {
        return Err(Error::Hypothesis(format!(
            "gradient inequality needs n >= 5, got n = {}",
            sample.n()
        )));
    }
    let field = rho_field(sample, g)?;
    sample
        .samples()
        .iter()
        .zip(&field)
        .map(|(s, p)| lemma38_pointwise(&PrincipalCurvatures::new(s.shape.clone())?, &p.grad_rho))
        .collect()
}

/// Quadrature of [`lemma38_integrand`].
pub fn lemma38_integral(sample: &SampledHypersurface, g: &BallPoint) -> Result<f64> {
    let values = lemma38_integrand(sample, g)?;
    Ok(fsum(sample.samples().iter().zip(values).map(|(s, v)| s.weight * v)))
}
