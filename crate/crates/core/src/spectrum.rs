//! Closed-form spectra of `Delta`, `Box` and `J_s` on the model families.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::HypersurfaceModel;

/// Default harmonic degree cutoff for spectrum enumeration.
pub const DEFAULT_CUTOFF: usize = 3;

/// Eigenvalues closer than this (relative to `max(1, |lambda|)`) are merged.
const MERGE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorKind {
    Laplacian,
    Box,
    Jacobi,
}

/// Eigenvalues with multiplicity, sorted ascending.
///
/// Sign conventions: `Delta f + lambda f = 0`, `Box f + lambda f = 0`,
/// `J_s f = lambda f`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    entries: Vec<(f64, usize)>,
    operator: OperatorKind,
    cutoff: String,
}

impl Spectrum {
    /// Sorts the pairs and merges numerically equal eigenvalues.
    pub fn from_pairs(
        mut pairs: Vec<(f64, usize)>,
        operator: OperatorKind,
        cutoff: impl Into<String>,
    ) -> Self {
        pairs.retain(|&(_, mult)| mult > 0);
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut entries: Vec<(f64, usize)> = Vec::with_capacity(pairs.len());
        for (value, mult) in pairs {
            match entries.last_mut() {
                Some(last) if (value - last.0).abs() <= MERGE_TOL * value.abs().max(1.0) => {
                    last.1 += mult;
                }
                _ => entries.push((value, mult)),
            }
        }
        Self {
            entries,
            operator,
            cutoff: cutoff.into(),
        }
    }

    pub fn entries(&self) -> &[(f64, usize)] {
        &self.entries
    }

    pub fn operator(&self) -> OperatorKind {
        self.operator
    }

    pub fn cutoff(&self) -> &str {
        &self.cutoff
    }

    /// Number of eigenvalues counted with multiplicity.
    pub fn len(&self) -> usize {
        self.entries.iter().map(|e| e.1).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `index`-th eigenvalue (1-based) of the multiset.
    pub fn eigenvalue(&self, index: usize) -> Option<f64> {
        let mut seen = 0;
        for &(value, mult) in &self.entries {
            seen += mult;
            if index >= 1 && index <= seen {
                return Some(value);
            }
        }
        None
    }

    pub fn lambda1(&self) -> Option<f64> {
        self.eigenvalue(1)
    }

    /// Second entry of the multiset; equals the smallest eigenvalue above
    /// `lambda_1` whenever `lambda_1` is simple.
    pub fn lambda2(&self) -> Option<f64> {
        self.eigenvalue(2)
    }

    fn mapped(&self, f: impl Fn(f64) -> f64, operator: OperatorKind) -> Self {
        Self::from_pairs(
            self.entries.iter().map(|&(v, m)| (f(v), m)).collect(),
            operator,
            self.cutoff.clone(),
        )
    }
}

/// Number of linearly independent spherical harmonics of degree `l` on `S^k`.
pub fn harmonic_multiplicity(k_dim: usize, l: usize) -> usize {
    let choose = |a: usize, b: usize| -> usize {
        if b > a {
            return 0;
        }
        (0..b).fold(1usize, |acc, i| acc * (a - i) / (i + 1))
    };
    let total = choose(l + k_dim, k_dim);
    if l >= 2 {
        total - choose(l + k_dim - 2, k_dim)
    } else {
        total
    }
}

/// Spectrum of the Laplacian on the round sphere `S^k(c)`: `l(l+k-1)/c^2`
/// for harmonic degrees `l = 0..=l_max`.
pub fn sphere_laplace_spectrum(k_dim: usize, c: f64, l_max: usize) -> Result<Spectrum> {
    if k_dim < 1 {
        return Err(Error::Parameter("sphere dimension must be >= 1".into()));
    }
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::Parameter(format!("sphere radius must be positive, got {c}")));
    }
    let pairs = (0..=l_max)
        .map(|l| {
            let lf = l as f64;
            (lf * (lf + k_dim as f64 - 1.0) / (c * c), harmonic_multiplicity(k_dim, l))
        })
        .collect();
    Ok(Spectrum::from_pairs(
        pairs,
        OperatorKind::Laplacian,
        format!("harmonic degree <= {l_max}"),
    ))
}

/// Spectrum of the Cheng-Yau operator `Box` on a model.
///
/// On a Clifford product `Box = (nH - k_1) Delta_1 + (nH - k_n) Delta_2`, so
/// its eigenvalues are all sums of scaled factor eigenvalues with product
/// multiplicities. On an umbilical sphere `Box = (n-1) H Delta`.
pub fn box_spectrum(model: &HypersurfaceModel, l_max: usize) -> Result<Spectrum> {
    let coeffs = model.box_coefficients()?;
    if let Some(bad) = coeffs.iter().find(|a| !(**a > 0.0)) {
        return Err(Error::Ellipticity(format!(
            "Box has non-positive coefficient {bad} on {model:?}"
        )));
    }
    let cutoff = format!("harmonic degree <= {l_max} on each factor");
    Ok(match *model {
        HypersurfaceModel::Umbilical { n, r } => {
            let lap = sphere_laplace_spectrum(n, 1.0 / r.sqrt(), l_max)?;
            let scaled = lap.mapped(|v| coeffs[0] * v, OperatorKind::Box);
            Spectrum { cutoff, ..scaled }
        }
        HypersurfaceModel::Clifford { n, m, c } => {
            let first = sphere_laplace_spectrum(m, c, l_max)?;
            let second = sphere_laplace_spectrum(n - m, (1.0 - c * c).sqrt(), l_max)?;
            let mut pairs = Vec::new();
            for &(a, ma) in first.entries() {
                for &(b, mb) in second.entries() {
                    pairs.push((coeffs[0] * a + coeffs[1] * b, ma * mb));
                }
            }
            Spectrum::from_pairs(pairs, OperatorKind::Box, cutoff)
        }
    })
}

/// Spectrum of the Jacobi operator `J_s = -Box - (n(n-1)H + nHS - f_3)`.
pub fn js_spectrum(model: &HypersurfaceModel, l_max: usize) -> Result<Spectrum> {
    let order0 = model.jacobi_order0()?;
    Ok(box_spectrum(model, l_max)?.mapped(|v| v - order0, OperatorKind::Jacobi))
}
