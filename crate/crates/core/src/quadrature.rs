//! Quadrature on round spheres.
//!
//! `S^d` for `d >= 2` uses a product rule in hyperspherical coordinates:
//! Gauss-Gegenbauer nodes in each of the `d - 1` polar angles (weight
//! `(1 - t^2)^{(d-j-1)/2}` in `t = cos(phi_j)`) and an equispaced azimuth.
//! With `q` polar nodes and `2q` azimuth nodes the rule integrates every
//! polynomial of degree `<= 2q - 1` exactly and is invariant under the
//! antipodal map. The circle uses the trapezoid rule.

use std::f64::consts::PI;

use crate::discrete::{smallest_eigenvalues, TridiagonalOperator};
use crate::error::{Error, Result};

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Self::default();
        iter.into_iter().for_each(|v| acc.add(v));
        acc
    }
}

/// Compensated sum of an iterator.
pub fn fsum(iter: impl IntoIterator<Item = f64>) -> f64 {
    iter.into_iter().collect::<CompensatedSum>().value()
}

/// `int_{-1}^{1} (1 - t^2)^alpha dt` for `alpha` a non-negative multiple of 1/2.
fn gegenbauer_mass(alpha: f64) -> f64 {
    let twice = (2.0 * alpha).round() as i64;
    let mut mass = if twice % 2 == 0 { 2.0 } else { PI / 2.0 };
    let mut a = if twice % 2 == 0 { 0.0 } else { 0.5 };
    while a + 0.25 < alpha {
        a += 1.0;
        mass *= 2.0 * a / (2.0 * a + 1.0);
    }
    mass
}

/// Gauss rule with `count` nodes for the weight `(1 - t^2)^alpha` on `[-1, 1]`,
/// where `alpha` is a non-negative multiple of 1/2.
///
/// Nodes are eigenvalues of the Jacobi matrix (found by Sturm bisection and
/// polished by Newton steps on the orthonormal polynomial); weights are the
/// Christoffel numbers `1 / sum_k p_k(t)^2`.
pub fn gegenbauer_rule(count: usize, alpha: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if count == 0 {
        return Err(Error::Parameter("Gauss rule needs at least one node".into()));
    }
    if !(alpha >= 0.0) || ((2.0 * alpha).round() - 2.0 * alpha).abs() > 1e-12 {
        return Err(Error::Parameter(format!(
            "Gegenbauer exponent must be a non-negative multiple of 1/2, got {alpha}"
        )));
    }
    let lambda = alpha + 0.5;
    let beta_sqrt: Vec<f64> = (1..=count)
        .map(|k| {
            let kf = k as f64;
            (kf * (kf + 2.0 * lambda - 1.0) / (4.0 * (kf + lambda) * (kf + lambda - 1.0))).sqrt()
        })
        .collect();
    let mass = gegenbauer_mass(alpha);
    if count == 1 {
        return Ok((vec![0.0], vec![mass]));
    }
    let jacobi =
        TridiagonalOperator::symmetric(vec![0.0; count], beta_sqrt[..count - 1].to_vec())?;
    let mut nodes = smallest_eigenvalues(&jacobi, count)?;

    // orthonormal p_0..p_count and derivative of p_count at t
    let eval = |t: f64| -> (f64, f64, f64) {
        let mut p_prev = 0.0;
        let mut p = 1.0 / mass.sqrt();
        let mut d_prev = 0.0;
        let mut d = 0.0;
        let mut christoffel = p * p;
        for k in 0..count {
            let b_prev = if k == 0 { 0.0 } else { beta_sqrt[k - 1] };
            let p_next = (t * p - b_prev * p_prev) / beta_sqrt[k];
            let d_next = (p + t * d - b_prev * d_prev) / beta_sqrt[k];
            p_prev = p;
            p = p_next;
            d_prev = d;
            d = d_next;
            if k + 1 < count {
                christoffel += p * p;
            }
        }
        (p, d, christoffel)
    };
    for t in nodes.iter_mut() {
        for _ in 0..3 {
            let (p, d, _) = eval(*t);
            if d != 0.0 {
                *t -= p / d;
            }
        }
    }
    // exact symmetry about the origin
    for i in 0..count / 2 {
        let avg = 0.5 * (nodes[count - 1 - i] - nodes[i]);
        nodes[i] = -avg;
        nodes[count - 1 - i] = avg;
    }
    if count % 2 == 1 {
        nodes[count / 2] = 0.0;
    }
    let weights: Vec<f64> = nodes.iter().map(|&t| 1.0 / eval(t).2).collect();
    Ok((nodes, weights))
}

/// Volume of the round sphere `S^d(radius)`.
pub fn sphere_volume(dim: usize, radius: f64) -> f64 {
    // |S^0| = 2, |S^1| = 2 pi, |S^d| = 2 pi |S^{d-2}| / (d - 1)
    let mut vol = if dim.is_multiple_of(2) { 2.0 } else { 2.0 * PI };
    let mut d = if dim.is_multiple_of(2) { 0 } else { 1 };
    while d < dim {
        d += 2;
        vol *= 2.0 * PI / (d as f64 - 1.0);
    }
    vol * radius.powi(dim as i32)
}

/// Nodes on the unit sphere `S^d` in `R^{d+1}` with weights summing to `|S^d|`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereRule {
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl SphereRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Trapezoid rule with `count` equispaced nodes on the unit circle.
    pub fn circle(count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::Parameter(format!("circle rule needs >= 2 nodes, got {count}")));
        }
        let w = 2.0 * PI / count as f64;
        let points = (0..count)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / count as f64;
                vec![t.cos(), t.sin()]
            })
            .collect();
        Ok(Self {
            dim: 1,
            points,
            weights: vec![w; count],
        })
    }

    /// Product Gauss rule on `S^dim`, exact for polynomials of degree `<= 2q - 1`.
    pub fn product(dim: usize, q: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Parameter("sphere dimension must be >= 1".into()));
        }
        if q == 0 {
            return Err(Error::Parameter("need at least one node per angle".into()));
        }
        if dim == 1 {
            return Self::circle(2 * q);
        }
        let polar: Vec<(Vec<f64>, Vec<f64>)> = (1..dim)
            .map(|j| gegenbauer_rule(q, (dim - j - 1) as f64 / 2.0))
            .collect::<Result<_>>()?;
        let azimuth = Self::circle(2 * q)?;
        let total = q.pow(dim as u32 - 1) * azimuth.len();
        let mut points = Vec::with_capacity(total);
        let mut weights = Vec::with_capacity(total);
        let mut idx = vec![0usize; dim - 1];
        loop {
            let mut head = Vec::with_capacity(dim + 1);
            let mut scale = 1.0;
            let mut weight = 1.0;
            for (j, &i) in idx.iter().enumerate() {
                let t = polar[j].0[i];
                head.push(scale * t);
                scale *= (1.0 - t * t).max(0.0).sqrt();
                weight *= polar[j].1[i];
            }
            for (p, w) in azimuth.points.iter().zip(&azimuth.weights) {
                let mut point = head.clone();
                point.push(scale * p[0]);
                point.push(scale * p[1]);
                points.push(point);
                weights.push(weight * w);
            }
            // odometer over the polar indices
            let mut j = dim - 1;
            loop {
                if j == 0 {
                    return Ok(Self {
                        dim,
                        points,
                        weights,
                    });
                }
                j -= 1;
                idx[j] += 1;
                if idx[j] < q {
                    break;
                }
                idx[j] = 0;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_matches_tabulated_nodes() {
        let (t, w) = gegenbauer_rule(3, 0.0).unwrap();
        let r = (0.6f64).sqrt();
        assert!((t[0] + r).abs() < 1e-15 && t[1] == 0.0 && (t[2] - r).abs() < 1e-15);
        assert!((w[0] - 5.0 / 9.0).abs() < 1e-14 && (w[1] - 8.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn gegenbauer_rules_integrate_monomials() {
        // int (1-t^2)^a t^{2j} dt = B(j + 1/2, a + 1), checked against a fine composite midpoint oracle
        for &alpha in &[0.0, 0.5, 1.0, 1.5, 2.0] {
            let (t, w) = gegenbauer_rule(5, alpha).unwrap();
            for deg in 0..10 {
                let got = fsum(t.iter().zip(&w).map(|(t, w)| w * t.powi(deg)));
                let m = 200_000;
                let want = fsum((0..m).map(|i| {
                    let x = -1.0 + (i as f64 + 0.5) * 2.0 / m as f64;
                    (1.0 - x * x).powf(alpha) * x.powi(deg) * 2.0 / m as f64
                }));
                let tol = if alpha == 0.0 || alpha >= 1.0 { 1e-9 } else { 1e-6 };
                assert!((got - want).abs() < tol, "alpha {alpha} deg {deg}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn sphere_volumes() {
        assert!((sphere_volume(1, 1.0) - 2.0 * PI).abs() < 1e-15);
        assert!((sphere_volume(2, 1.0) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_volume(3, 1.0) - 2.0 * PI * PI).abs() < 1e-14);
        assert!((sphere_volume(4, 1.0) - 8.0 * PI * PI / 3.0).abs() < 1e-13);
    }

    #[test]
    fn product_rule_moments() {
        for dim in 2..=5 {
            let rule = SphereRule::product(dim, 3).unwrap();
            let vol = sphere_volume(dim, 1.0);
            assert!((fsum(rule.weights.iter().copied()) - vol).abs() < 1e-12 * vol);
            for p in &rule.points {
                let norm: f64 = p.iter().map(|v| v * v).sum();
                assert!((norm - 1.0).abs() < 1e-14);
            }
            // first moments vanish, second moments are vol/(d+1) on the diagonal
            for a in 0..=dim {
                let first = fsum(rule.points.iter().zip(&rule.weights).map(|(p, w)| w * p[a]));
                assert!(first.abs() < 1e-13);
                for b in 0..=dim {
                    let second = fsum(rule.points.iter().zip(&rule.weights).map(|(p, w)| w * p[a] * p[b]));
                    let want = if a == b { vol / (dim as f64 + 1.0) } else { 0.0 };
                    assert!((second - want).abs() < 1e-12, "dim {dim} ({a},{b})");
                }
                // fourth moment <x_a^4> = 3 vol / ((d+1)(d+3))
                let fourth = fsum(rule.points.iter().zip(&rule.weights).map(|(p, w)| w * p[a].powi(4)));
                let want = 3.0 * vol / ((dim as f64 + 1.0) * (dim as f64 + 3.0));
                assert!((fourth - want).abs() < 1e-12, "dim {dim}");
            }
        }
    }

    #[test]
    fn product_rule_is_antipodal() {
        let rule = SphereRule::product(4, 4).unwrap();
        for (p, w) in rule.points.iter().zip(&rule.weights) {
            let found = rule.points.iter().zip(&rule.weights).any(|(o, wo)| {
                (wo - w).abs() < 1e-14 && o.iter().zip(p).all(|(a, b)| (a + b).abs() < 1e-12)
            });
            assert!(found);
        }
    }

    #[test]
    fn compensated_sum_is_accurate() {
        let values = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(fsum(values), 2.0);
    }
}
