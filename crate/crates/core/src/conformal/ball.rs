use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Points with `|g| >= 1 - BALL_MARGIN` are rejected.
pub const BALL_MARGIN: f64 = 1e-12;

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// A point `g` of the open unit ball together with
/// `lambda = (1 - |g|^2)^{-1/2}` and `mu = (lambda - 1)/|g|^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct BallPoint {
    g: Vec<f64>,
    lambda: f64,
    mu: f64,
}

impl BallPoint {
    pub fn new(g: Vec<f64>) -> Result<Self> {
        if g.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parameter("ball point has non-finite entries".into()));
        }
        let sq = dot(&g, &g);
        if sq.sqrt() >= 1.0 - BALL_MARGIN {
            return Err(Error::BallViolation(sq.sqrt()));
        }
        let lambda = 1.0 / (1.0 - sq).sqrt();
        // (lambda - 1)/|g|^2 = lambda^2/(1 + lambda), with no cancellation at g = 0
        let mu = lambda * lambda / (1.0 + lambda);
        Ok(Self { g, lambda, mu })
    }

    pub fn origin(dim: usize) -> Self {
        Self {
            g: vec![0.0; dim],
            lambda: 1.0,
            mu: 0.5,
        }
    }

    pub fn g(&self) -> &[f64] {
        &self.g
    }

    pub fn dim(&self) -> usize {
        self.g.len()
    }

    pub fn norm(&self) -> f64 {
        norm(&self.g)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// `(1 - |g|^2)/(<p,g> + 1)^2`, the conformal factor of `F_g` at `p`.
    pub fn conformal_factor(&self, p: &[f64]) -> f64 {
        let t = dot(p, &self.g) + 1.0;
        1.0 / (self.lambda * self.lambda * t * t)
    }

    fn check_dim(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.g.len() {
            return Err(Error::Dimension(format!(
                "vector of length {} against ball point of dimension {}",
                v.len(),
                self.g.len()
            )));
        }
        Ok(())
    }
}

impl TryFrom<Vec<f64>> for BallPoint {
    type Error = Error;

    fn try_from(g: Vec<f64>) -> Result<Self> {
        Self::new(g)
    }
}

impl From<BallPoint> for Vec<f64> {
    fn from(b: BallPoint) -> Self {
        b.g
    }
}

/// `F_g(p) = (p + (mu <p,g> + lambda) g) / (lambda (<p,g> + 1))`.
pub fn moebius_map(g: &BallPoint, p: &[f64]) -> Result<Vec<f64>> {
    g.check_dim(p)?;
    let pg = dot(p, &g.g);
    let denom = g.lambda * (pg + 1.0);
    let coef = g.mu * pg + g.lambda;
    Ok(p.iter().zip(&g.g).map(|(pi, gi)| (pi + coef * gi) / denom).collect())
}

/// The differential of `F_g` at `p` applied to a tangent vector `v`.
pub fn moebius_differential(g: &BallPoint, p: &[f64], v: &[f64]) -> Result<Vec<f64>> {
    g.check_dim(p)?;
    g.check_dim(v)?;
    let t = dot(p, &g.g) + 1.0;
    let vg = dot(v, &g.g);
    let lam = g.lambda;
    // (1 - lambda)/|g|^2 = -mu
    let scale = 1.0 / (lam * lam * t * t);
    Ok((0..p.len())
        .map(|i| scale * (lam * t * v[i] - lam * vg * p[i] - g.mu * vg * g.g[i]))
        .collect())
}
