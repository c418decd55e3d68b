use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::ball::{dot, moebius_map, BallPoint};
use super::sample::SampledHypersurface;
use crate::error::{Error, Result};
use crate::quadrature::CompensatedSum;

pub const JACOBIAN_STEP: f64 = 1e-6;
pub const MAX_ITERATIONS: usize = 200;
/// Iterates are projected into `|g| <= BALL_CAP`.
pub const BALL_CAP: f64 = 1.0 - 1e-6;
pub const START_CAP: f64 = 0.9;
pub const MIN_TOL: f64 = 1e-12;
const MAX_HALVINGS: usize = 60;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Centering {
    pub point: BallPoint,
    /// Newton steps taken.
    pub iterations: usize,
    /// `|sum_i w_i u_i F_g(x_i)|` at the returned point.
    pub residual: f64,
    /// `sum_i w_i u_i`
    pub mass: f64,
}

fn project(mut g: Vec<f64>) -> Vec<f64> {
    let len = dot(&g, &g).sqrt();
    if len > BALL_CAP {
        g.iter_mut().for_each(|v| *v *= BALL_CAP / len);
    }
    g
}

fn residual_vector(sample: &SampledHypersurface, u: &[f64], g: &BallPoint) -> Vec<f64> {
    let dim = sample.ambient_dim();
    let mut acc = vec![CompensatedSum::default(); dim];
    for (s, ui) in sample.samples().iter().zip(u) {
        let image = moebius_map(g, &s.x).expect("dimensions checked");
        for (a, v) in acc.iter_mut().zip(image) {
            a.add(s.weight * ui * v);
        }
    }
    acc.iter().map(|a| a.value()).collect()
}

/// Finds `g` with `sum_i w_i u_i F_g(x_i) = 0` by damped Newton with a
/// central-difference Jacobian, starting from the normalized negative
/// weighted centroid.
pub fn centering_solve(sample: &SampledHypersurface, u: &[f64], tol: f64) -> Result<Centering> {
    if u.len() != sample.len() {
        return Err(Error::Dimension(format!(
            "{} weights for {} samples",
            u.len(),
            sample.len()
        )));
    }
    if let Some(bad) = u.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::Weight(format!("weights must be positive, found {bad}")));
    }
    if !(tol >= MIN_TOL) || !tol.is_finite() {
        return Err(Error::Parameter(format!("tolerance must be at least {MIN_TOL}, got {tol}")));
    }
    let dim = sample.ambient_dim();
    let mut mass = CompensatedSum::default();
    let mut centroid = vec![CompensatedSum::default(); dim];
    for (s, ui) in sample.samples().iter().zip(u) {
        mass.add(s.weight * ui);
        for (c, xa) in centroid.iter_mut().zip(&s.x) {
            c.add(s.weight * ui * xa);
        }
    }
    let mass = mass.value();
    let mut g0: Vec<f64> = centroid.iter().map(|c| -c.value() / mass).collect();
    let len = dot(&g0, &g0).sqrt();
    if len > START_CAP {
        g0.iter_mut().for_each(|v| *v *= START_CAP / len);
    }

    let target = tol * mass;
    let mut g = BallPoint::new(g0)?;
    let mut res = residual_vector(sample, u, &g);
    let mut res_norm = dot(&res, &res).sqrt();
    let mut iterations = 0;
    while res_norm > target {
        if iterations == MAX_ITERATIONS {
            return Err(Error::NonConvergence {
                iterations,
                residual: res_norm / mass,
            });
        }
        iterations += 1;
        let mut jac = DMatrix::zeros(dim, dim);
        for j in 0..dim {
            let shifted = |sign: f64| -> Option<BallPoint> {
                let mut p = g.g().to_vec();
                p[j] += sign * JACOBIAN_STEP;
                BallPoint::new(p).ok()
            };
            let (plus, minus) = (shifted(1.0), shifted(-1.0));
            let (hi, lo, width) = match (plus, minus) {
                (Some(p), Some(m)) => (residual_vector(sample, u, &p), residual_vector(sample, u, &m), 2.0),
                (Some(p), None) => (residual_vector(sample, u, &p), res.clone(), 1.0),
                (None, Some(m)) => (res.clone(), residual_vector(sample, u, &m), 1.0),
                (None, None) => unreachable!("projected iterates keep a margin from the sphere"),
            };
            for a in 0..dim {
                jac[(a, j)] = (hi[a] - lo[a]) / (width * JACOBIAN_STEP);
            }
        }
        let rhs = -DVector::from_column_slice(&res);
        let step = jac.lu().solve(&rhs).unwrap_or_else(|| rhs / mass);

        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let trial: Vec<f64> = g.g().iter().zip(step.iter()).map(|(gi, si)| gi + alpha * si).collect();
            let candidate = BallPoint::new(project(trial))?;
            let r = residual_vector(sample, u, &candidate);
            let rn = dot(&r, &r).sqrt();
            if rn < res_norm {
                accepted = Some((candidate, r, rn));
                break;
            }
            alpha *= 0.5;
        }
        match accepted {
            Some((candidate, r, rn)) => {
                g = candidate;
                res = r;
                res_norm = rn;
            }
            None => {
                return Err(Error::NonConvergence {
                    iterations,
                    residual: res_norm / mass,
                })
            }
        }
    }
    Ok(Centering {
        point: g,
        iterations,
        residual: res_norm,
        mass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::lemmas::test_functions;
    use crate::conformal::sample::sample_model;
    use crate::model::HypersurfaceModel;
    use crate::quadrature::fsum;

    fn tilted(sample: &SampledHypersurface, a: &[f64]) -> Vec<f64> {
        sample.samples().iter().map(|s| 1.0 + 0.5 * dot(&s.x, a)).collect()
    }

    #[test]
    fn symmetric_weights_give_the_origin() {
        let sample = sample_model(&HypersurfaceModel::critical_clifford(5, 1).unwrap(), 64).unwrap();
        let u = vec![1.0; sample.len()];
        let c = centering_solve(&sample, &u, 1e-8).unwrap();
        assert!(c.point.norm() <= 1e-10);
        assert!(c.residual <= 1e-8 * c.mass);
    }

    #[test]
    fn tilted_weights_converge_and_residual_is_confirmed() {
        let sample = sample_model(&HypersurfaceModel::critical_clifford(5, 1).unwrap(), 64).unwrap();
        let a = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        let u = tilted(&sample, &a);
        let c = centering_solve(&sample, &u, 1e-8).unwrap();
        assert!(c.point.norm() > 1e-3);
        assert!(c.iterations <= 25);
        // independent re-evaluation through the test functions
        let f = test_functions(&sample, &c.point).unwrap();
        for comp in 0..7 {
            let total = fsum(sample.samples().iter().zip(&u).zip(&f).map(|((s, ui), fa)| s.weight * ui * fa[comp]));
            assert!(total.abs() <= 1e-8 * c.mass);
        }
    }

    #[test]
    fn permutation_invariance() {
        let sample = sample_model(&HypersurfaceModel::critical_clifford(5, 2).unwrap(), 32).unwrap();
        let a = [0.0, 0.6, 0.0, 0.0, 0.8, 0.0, 0.0];
        let u = tilted(&sample, &a);
        let c = centering_solve(&sample, &u, 1e-10).unwrap();
        let len = sample.len();
        let order: Vec<usize> = (0..len).map(|i| (i * 7919 + 13) % len).collect();
        let mut seen = vec![false; len];
        order.iter().for_each(|&i| seen[i] = true);
        assert!(seen.iter().all(|&s| s));
        let permuted = sample.permuted(&order).unwrap();
        let pu: Vec<f64> = order.iter().map(|&i| u[i]).collect();
        let cp = centering_solve(&permuted, &pu, 1e-10).unwrap();
        for (x, y) in c.point.g().iter().zip(cp.point.g()) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn umbilical_centers_on_the_axis() {
        let model = HypersurfaceModel::umbilical(5, 2.0).unwrap();
        let sample = sample_model(&model, 64).unwrap();
        let u = vec![1.0; sample.len()];
        let c = centering_solve(&sample, &u, 1e-8).unwrap();
        let b = 0.5f64.sqrt();
        assert!((c.point.g()[6] + b).abs() < 1e-8);
        assert!(c.point.g()[..6].iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn invalid_inputs() {
        let sample = sample_model(&HypersurfaceModel::critical_clifford(5, 1).unwrap(), 8).unwrap();
        let mut u = vec![1.0; sample.len()];
        u[3] = 0.0;
        assert!(matches!(centering_solve(&sample, &u, 1e-8), Err(Error::Weight(_))));
        assert!(matches!(centering_solve(&sample, &u[1..], 1e-8), Err(Error::Dimension(_))));
        let u = vec![1.0; sample.len()];
        assert!(matches!(centering_solve(&sample, &u, 1e-13), Err(Error::Parameter(_))));
    }
}
