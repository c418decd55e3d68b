//! The two homogeneous model families: totally umbilical spheres and
//! Clifford products `S^m(c) x S^{n-m}(sqrt(1-c^2))`.

use serde::{Deserialize, Serialize};

use crate::curvature::{
    jacobi_order0, scalar_curvature, CurvatureInvariants, PrincipalCurvatures,
};
use crate::error::{Error, Result};
use crate::spectrum::{self, DEFAULT_CUTOFF};

/// Clifford products with `|n c^2 - m|` below this are treated as minimal.
pub const DEGENERACY_TOL: f64 = 1e-8;

/// A homogeneous hypersurface of the unit sphere `S^{n+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", try_from = "RawModel")]
pub enum HypersurfaceModel {
    /// Totally umbilical, non-totally-geodesic sphere with scalar curvature `n(n-1)r`.
    Umbilical { n: usize, r: f64 },
    /// `S^m(c) x S^{n-m}(sqrt(1-c^2))`.
    Clifford { n: usize, m: usize, c: f64 },
}

#[derive(Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
enum RawModel {
    Umbilical { n: usize, r: f64 },
    Clifford { n: usize, m: usize, c: f64 },
}

impl TryFrom<RawModel> for HypersurfaceModel {
    type Error = Error;

    fn try_from(raw: RawModel) -> Result<Self> {
        match raw {
            RawModel::Umbilical { n, r } => Self::umbilical(n, r),
            RawModel::Clifford { n, m, c } => Self::clifford(n, m, c),
        }
    }
}

fn check_split(n: usize, m: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::Parameter(format!("need n >= 3, got {n}")));
    }
    if m < 1 || m + 2 > n {
        return Err(Error::Parameter(format!(
            "need 1 <= m <= n-2, got n = {n}, m = {m}"
        )));
    }
    Ok(())
}

/// Radius `c` of the first factor at which the Clifford product has `r = 1`:
/// `c^2 = ((n-1)m + sqrt((n-1)m(n-m))) / (n(n-1))`.
pub fn critical_radius(n: usize, m: usize) -> Result<f64> {
    check_split(n, m)?;
    let (nf, mf) = (n as f64, m as f64);
    let c2 = ((nf - 1.0) * mf + ((nf - 1.0) * mf * (nf - mf)).sqrt()) / (nf * (nf - 1.0));
    Ok(c2.sqrt())
}

impl HypersurfaceModel {
    pub fn umbilical(n: usize, r: f64) -> Result<Self> {
        let model = Self::Umbilical { n, r };
        model.validate()?;
        Ok(model)
    }

    pub fn clifford(n: usize, m: usize, c: f64) -> Result<Self> {
        let model = Self::Clifford { n, m, c };
        model.validate()?;
        Ok(model)
    }

    /// Clifford product at the critical radius.
    pub fn critical_clifford(n: usize, m: usize) -> Result<Self> {
        Self::clifford(n, m, critical_radius(n, m)?)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Umbilical { n, r } => {
                if n < 3 {
                    return Err(Error::Parameter(format!("need n >= 3, got {n}")));
                }
                if !(r > 1.0) || !r.is_finite() {
                    return Err(Error::DegenerateModel(format!(
                        "umbilical model needs r > 1, got {r}"
                    )));
                }
            }
            Self::Clifford { n, m, c } => {
                check_split(n, m)?;
                if !(c > 0.0 && c < 1.0) {
                    return Err(Error::Parameter(format!("need 0 < c < 1, got {c}")));
                }
                let defect = n as f64 * c * c - m as f64;
                if defect.abs() < DEGENERACY_TOL {
                    return Err(Error::DegenerateModel(format!(
                        "n c^2 = m makes the mean curvature vanish (n c^2 - m = {defect:e})"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        match *self {
            Self::Umbilical { n, .. } | Self::Clifford { n, .. } => n,
        }
    }

    /// `m` for Clifford products.
    pub fn split(&self) -> Option<usize> {
        match *self {
            Self::Umbilical { .. } => None,
            Self::Clifford { m, .. } => Some(m),
        }
    }

    /// `c` for Clifford products, `r` for umbilical spheres.
    pub fn shape_parameter(&self) -> f64 {
        match *self {
            Self::Umbilical { r, .. } => r,
            Self::Clifford { c, .. } => c,
        }
    }

    /// `+1` when the outward choice of normal already gives `H > 0`.
    ///
    /// Clifford products with `n c^2 < m` have negative mean curvature for the
    /// normal `(sqrt(1-c^2)/c x_1, -c/sqrt(1-c^2) x_2)`; their curvatures are
    /// negated so that `H > 0` throughout.
    pub fn orientation(&self) -> f64 {
        match *self {
            Self::Umbilical { .. } => 1.0,
            Self::Clifford { n, m, c } => {
                if n as f64 * c * c > m as f64 {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }

    /// Principal curvatures with the orientation fixed by `H > 0`.
    pub fn principal_curvatures(&self) -> PrincipalCurvatures {
        let k = match *self {
            Self::Umbilical { n, r } => vec![(r - 1.0).sqrt(); n],
            Self::Clifford { n, m, c } => {
                let s = (1.0 - c * c).sqrt();
                let sign = self.orientation();
                let mut k = vec![-sign * s / c; m];
                k.resize(n, sign * c / s);
                k
            }
        };
        PrincipalCurvatures::new(k).expect("model dimensions are validated")
    }

    /// Closed-form curvature invariants of the model.
    pub fn geometry(&self) -> Result<CurvatureInvariants> {
        self.validate()?;
        let inv = match *self {
            Self::Umbilical { n, r } => {
                let h = (r - 1.0).sqrt();
                let nf = n as f64;
                CurvatureInvariants {
                    n,
                    h,
                    h2: h * h,
                    h3: h * h * h,
                    s: nf * h * h,
                    f3: nf * h * h * h,
                    r,
                }
            }
            Self::Clifford { n, m, c } => {
                let (nf, mf) = (n as f64, m as f64);
                let c2 = c * c;
                let s2 = 1.0 - c2;
                let s = s2.sqrt();
                let h = (nf * c2 - mf) / (c * nf * s);
                let sq = mf * s2 / c2 + (nf - mf) * c2 / s2;
                let f3 = -mf * s2 * s / (c2 * c) + (nf - mf) * c2 * c / (s2 * s);
                // elementary symmetric sums of m copies of a and n-m copies of b
                let (a, b) = (-s / c, c / s);
                let (p, q) = (mf, nf - mf);
                let e2 = p * (p - 1.0) / 2.0 * a * a + p * q * a * b + q * (q - 1.0) / 2.0 * b * b;
                let e3 = p * (p - 1.0) * (p - 2.0) / 6.0 * a.powi(3)
                    + p * (p - 1.0) / 2.0 * q * a * a * b
                    + p * q * (q - 1.0) / 2.0 * a * b * b
                    + q * (q - 1.0) * (q - 2.0) / 6.0 * b.powi(3);
                let inv = CurvatureInvariants {
                    n,
                    h,
                    h2: e2 * 2.0 / (nf * (nf - 1.0)),
                    h3: e3 * 6.0 / (nf * (nf - 1.0) * (nf - 2.0)),
                    s: sq,
                    f3,
                    r: scalar_curvature(n, h, sq),
                };
                if self.orientation() < 0.0 {
                    inv.reoriented()
                } else {
                    inv
                }
            }
        };
        Ok(inv)
    }

    /// Zero-order coefficient `n(n-1)H + nHS - f_3` of `J_s` on the model.
    pub fn jacobi_order0(&self) -> Result<f64> {
        jacobi_order0(&self.geometry()?)
    }

    /// Coefficients of `Box` on each sphere factor: `nH - k` for the factor's
    /// principal curvature `k`. Umbilical spheres have a single factor.
    pub fn box_coefficients(&self) -> Result<Vec<f64>> {
        let inv = self.geometry()?;
        let nh = inv.n as f64 * inv.h;
        let k = self.principal_curvatures();
        let k = k.as_slice();
        Ok(match *self {
            Self::Umbilical { .. } => vec![nh - k[0]],
            Self::Clifford { n, .. } => vec![nh - k[0], nh - k[n - 1]],
        })
    }
}

/// Residuals of the four critical-radius identities for `(n, m)`:
///
/// 0. difference of the two branch values of `lambda_2(Box)`;
/// 1. `jacobi_order0 - 2n(n-1)H`;
/// 2. `lambda_2(J_s) + n(n-1)H`;
/// 3. `lambda_2(J_s) - (n(n-1)(n-2)/2) H_3`.
pub fn verify_critical_identities(n: usize, m: usize) -> Result<[f64; 4]> {
    let model = HypersurfaceModel::critical_clifford(n, m)?;
    let inv = model.geometry()?;
    let nf = n as f64;
    let coeffs = model.box_coefficients()?;
    let (c, mf) = (model.shape_parameter(), m as f64);
    let branch1 = coeffs[0] * mf / (c * c);
    let branch2 = coeffs[1] * (nf - mf) / (1.0 - c * c);
    let order0 = jacobi_order0(&inv)?;
    let lambda2 = spectrum::js_spectrum(&model, DEFAULT_CUTOFF)?
        .lambda2()
        .expect("cutoff >= 1 yields a second eigenvalue");
    Ok([
        (branch1 - branch2).abs(),
        (order0 - 2.0 * nf * (nf - 1.0) * inv.h).abs(),
        (lambda2 + nf * (nf - 1.0) * inv.h).abs(),
        (lambda2 - nf * (nf - 1.0) * (nf - 2.0) / 2.0 * inv.h3).abs(),
    ])
}
