//! Finite-difference confirmation of the model spectra.
//!
//! The lowest non-zero eigenvalue of the Laplacian on `S^k(c)` is attained by
//! zonal harmonics, so it suffices to discretize the singular Sturm-Liouville
//! operator
//!
//! ```text
//! -(1 / (c^2 sin^{k-1} t)) d/dt (sin^{k-1} t du/dt),   t in (0, pi)
//! ```
//!
//! on a cell-centered grid in flux form. The pole faces carry zero weight for
//! `k >= 2`, which gives the natural no-flux condition, and constants stay in
//! the kernel exactly. The resulting matrix `W^{-1} K` is symmetrized by the
//! diagonal similarity `W^{1/2}` and solved by Sturm-sequence bisection.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::HypersurfaceModel;

/// Width of the final bisection bracket.
pub const BISECTION_WIDTH: f64 = 1e-12;
/// Smallest grid accepted by [`discrete_clifford_lambda2`].
pub const MIN_CLIFFORD_CELLS: usize = 64;

const PIVOT_GUARD: f64 = 1e-300;

/// Uniform cell-centered grid on the polar angle of `S^k(c)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZonalGrid {
    k_dim: usize,
    c: f64,
    cells: usize,
}

impl ZonalGrid {
    pub fn new(k_dim: usize, c: f64, cells: usize) -> Result<Self> {
        if k_dim < 2 {
            return Err(Error::Parameter(format!(
                "zonal grid needs sphere dimension >= 2, got {k_dim}"
            )));
        }
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::Parameter(format!("radius must be positive, got {c}")));
        }
        if cells < 16 {
            return Err(Error::Resolution(format!("need at least 16 cells, got {cells}")));
        }
        Ok(Self { k_dim, c, cells })
    }

    pub fn k_dim(&self) -> usize {
        self.k_dim
    }

    pub fn radius(&self) -> f64 {
        self.c
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn spacing(&self) -> f64 {
        PI / self.cells as f64
    }

    /// Cell center `(i + 1/2) h` for zero-based `i`.
    pub fn node(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.cells).map(|i| self.node(i)).collect()
    }
}

/// Symmetric tridiagonal matrix together with the inner-product weights of
/// the operator it represents.
///
/// The original operator is `A = W^{-1/2} T W^{1/2}` where `T` is the stored
/// symmetric matrix and `W = diag(inner_weights)`; `A` is self-adjoint in the
/// `W`-weighted inner product and has the same spectrum as `T`.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalOperator {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
    inner_weights: Vec<f64>,
}

impl TridiagonalOperator {
    /// Plain symmetric tridiagonal matrix with unit weights.
    pub fn symmetric(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        let weights = vec![1.0; diag.len()];
        Self::with_weights(diag, offdiag, weights)
    }

    pub fn with_weights(diag: Vec<f64>, offdiag: Vec<f64>, inner_weights: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || offdiag.len() + 1 != diag.len() || inner_weights.len() != diag.len() {
            return Err(Error::Parameter(format!(
                "inconsistent tridiagonal sizes: {} diagonal, {} off-diagonal, {} weights",
                diag.len(),
                offdiag.len(),
                inner_weights.len()
            )));
        }
        if inner_weights.iter().any(|w| !(*w > 0.0)) {
            return Err(Error::Weight("inner-product weights must be positive".into()));
        }
        Ok(Self {
            diag,
            offdiag,
            inner_weights,
        })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    pub fn inner_weights(&self) -> &[f64] {
        &self.inner_weights
    }

    /// Applies the original (weighted) operator `A` to `u`.
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let sqrt_w: Vec<f64> = self.inner_weights.iter().map(|w| w.sqrt()).collect();
        let v: Vec<f64> = u.iter().zip(&sqrt_w).map(|(a, b)| a * b).collect();
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut acc = self.diag[i] * v[i];
                if i > 0 {
                    acc += self.offdiag[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    acc += self.offdiag[i] * v[i + 1];
                }
                acc / sqrt_w[i]
            })
            .collect()
    }

    /// Number of eigenvalues strictly below `x` (negative pivots of `T - x`).
    pub fn sturm_count(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = self.diag[0] - x;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.len() {
            let prev = if q.abs() < PIVOT_GUARD {
                PIVOT_GUARD.copysign(q)
            } else {
                q
            };
            q = self.diag[i] - x - self.offdiag[i - 1] * self.offdiag[i - 1] / prev;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin enclosure of the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.offdiag[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.offdiag[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    fn scaled(mut self, factor: f64) -> Self {
        self.diag.iter_mut().for_each(|v| *v *= factor);
        self.offdiag.iter_mut().for_each(|v| *v *= factor);
        self
    }
}

/// Flux-form discretization of the zonal Laplacian on `S^k(c)`.
///
/// The unit-radius operator is assembled first and then scaled by `1/c^2`,
/// so radius scaling is exact in the discrete spectrum.
pub fn zonal_laplacian(grid: &ZonalGrid) -> TridiagonalOperator {
    let n = grid.cells;
    let h = grid.spacing();
    let p = (grid.k_dim - 1) as i32;
    let face = |j: usize| (j as f64 * h).sin().powi(p);
    let cell: Vec<f64> = (0..n).map(|i| grid.node(i).sin().powi(p)).collect();
    let h2 = h * h;
    let diag: Vec<f64> = (0..n)
        .map(|i| (face(i) + face(i + 1)) / (h2 * cell[i]))
        .collect();
    let offdiag: Vec<f64> = (0..n - 1)
        .map(|i| -face(i + 1) / (h2 * (cell[i] * cell[i + 1]).sqrt()))
        .collect();
    let ck = grid.c.powi(grid.k_dim as i32);
    let weights = cell.iter().map(|w| w * h * ck).collect();
    TridiagonalOperator {
        diag,
        offdiag,
        inner_weights: weights,
    }
    .scaled(1.0 / (grid.c * grid.c))
}

/// The `count` smallest eigenvalues in ascending order, each bracketed by
/// Sturm bisection to [`BISECTION_WIDTH`].
pub fn smallest_eigenvalues(op: &TridiagonalOperator, count: usize) -> Result<Vec<f64>> {
    if count > op.len() {
        return Err(Error::Parameter(format!(
            "requested {count} eigenvalues of a {}x{} matrix",
            op.len(),
            op.len()
        )));
    }
    let (lo0, hi0) = op.gershgorin();
    let pad = 1e-12 * lo0.abs().max(hi0.abs()).max(1.0);
    let mut out = Vec::with_capacity(count);
    let mut floor = lo0 - pad;
    for k in 0..count {
        let (mut lo, mut hi) = (floor, hi0 + pad);
        while hi - lo > BISECTION_WIDTH {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if op.sturm_count(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let value = 0.5 * (lo + hi);
        out.push(value);
        floor = lo;
    }
    Ok(out)
}

/// First non-zero eigenvalue of the discrete zonal Laplacian on `S^k(c)`.
pub fn zonal_lambda2(k_dim: usize, c: f64, cells: usize) -> Result<f64> {
    let op = zonal_laplacian(&ZonalGrid::new(k_dim, c, cells)?);
    Ok(smallest_eigenvalues(&op, 2)?[1])
}

/// `lambda_2(J_s)` of a Clifford product with the factor Laplacians replaced
/// by their discrete zonal counterparts.
///
/// A circle factor (`m = 1`) uses its exact first non-zero eigenvalue
/// `1/c^2`; its zonal weight is trivial and the boundary conditions are
/// periodic, so the sphere solver does not apply.
pub fn discrete_clifford_lambda2(n: usize, m: usize, c: f64, cells: usize) -> Result<f64> {
    if cells < MIN_CLIFFORD_CELLS {
        return Err(Error::Resolution(format!(
            "need at least {MIN_CLIFFORD_CELLS} cells, got {cells}"
        )));
    }
    let model = HypersurfaceModel::clifford(n, m, c)?;
    let coeffs = model.box_coefficients()?;
    if let Some(bad) = coeffs.iter().find(|a| !(**a > 0.0)) {
        return Err(Error::Ellipticity(format!("Box has non-positive coefficient {bad}")));
    }
    let first = if m == 1 {
        1.0 / (c * c)
    } else {
        zonal_lambda2(m, c, cells)?
    };
    let second = zonal_lambda2(n - m, (1.0 - c * c).sqrt(), cells)?;
    let box_lambda2 = (coeffs[0] * first).min(coeffs[1] * second);
    Ok(box_lambda2 - model.jacobi_order0()?)
}

/// Least-squares slope of `-log(error)` against `log(cells)`.
pub fn observed_order(samples: &[(usize, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .map(|&(n, e)| ((n as f64).ln(), e.abs().ln()))
        .collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    -sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::{js_spectrum, DEFAULT_CUTOFF};

    #[test]
    fn grid_layout() {
        let g = ZonalGrid::new(3, 1.0, 16).unwrap();
        let nodes = g.nodes();
        assert!(nodes[0] > 0.0 && *nodes.last().unwrap() < PI);
        assert!((nodes[1] - nodes[0] - g.spacing()).abs() < 1e-15);
        assert!(ZonalGrid::new(3, 1.0, 8).is_err());
        assert!(ZonalGrid::new(1, 1.0, 32).is_err());
    }

    #[test]
    fn trivial_matrices() {
        let op = TridiagonalOperator::symmetric(vec![1.0; 5], vec![0.0; 4]).unwrap();
        let ev = smallest_eigenvalues(&op, 3).unwrap();
        for v in ev {
            assert!((v - 1.0).abs() < 1e-12);
        }
        let op = TridiagonalOperator::symmetric(vec![2.0, 2.0], vec![1.0]).unwrap();
        let ev = smallest_eigenvalues(&op, 2).unwrap();
        assert!((ev[0] - 1.0).abs() < 1e-12 && (ev[1] - 3.0).abs() < 1e-12);
        assert!(matches!(smallest_eigenvalues(&op, 3), Err(Error::Parameter(_))));
    }

    #[test]
    fn free_chain_matches_closed_form() {
        // d = 0, e = -1: eigenvalues 2 cos(k pi / (N + 1))
        let n = 40;
        let op = TridiagonalOperator::symmetric(vec![0.0; n], vec![-1.0; n - 1]).unwrap();
        let ev = smallest_eigenvalues(&op, n).unwrap();
        let mut exact: Vec<f64> = (1..=n)
            .map(|k| 2.0 * (k as f64 * PI / (n as f64 + 1.0)).cos())
            .collect();
        exact.sort_by(f64::total_cmp);
        for (a, b) in ev.iter().zip(&exact) {
            assert!((a - b).abs() < 1e-11);
        }
        assert!(ev.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn constants_are_in_the_kernel() {
        for k in 2..=6 {
            let op = zonal_laplacian(&ZonalGrid::new(k, 0.7, 64).unwrap());
            let au = op.apply(&vec![1.0; 64]);
            let scale = op.diag().iter().fold(0.0f64, |a, b| a.max(b.abs()));
            assert!(au.iter().all(|v| v.abs() < 1e-12 * scale));
        }
    }

    #[test]
    fn unit_two_sphere() {
        let op = zonal_laplacian(&ZonalGrid::new(2, 1.0, 400).unwrap());
        let ev = smallest_eigenvalues(&op, 2).unwrap();
        assert!(ev[0].abs() < 1e-10, "{}", ev[0]);
        assert!((ev[1] - 2.0).abs() < 1e-3);
        let op = zonal_laplacian(&ZonalGrid::new(2, 1.0, 800).unwrap());
        let ev = smallest_eigenvalues(&op, 4).unwrap();
        for (v, want) in ev.iter().zip([0.0, 2.0, 6.0, 12.0]) {
            assert!((v - want).abs() < 5e-3);
        }
    }

    #[test]
    fn scaled_spheres() {
        let lam = zonal_lambda2(4, 0.6f64.sqrt(), 400).unwrap();
        assert!((lam - 4.0 / 0.6).abs() < 2e-3);
        let lam = zonal_lambda2(2, 2.0, 400).unwrap();
        assert!((lam - 0.5).abs() < 1e-3);
    }

    #[test]
    fn radius_scaling_is_exact() {
        let unit = smallest_eigenvalues(&zonal_laplacian(&ZonalGrid::new(3, 1.0, 128).unwrap()), 4).unwrap();
        let c = 1.7;
        let big = smallest_eigenvalues(&zonal_laplacian(&ZonalGrid::new(3, c, 128).unwrap()), 4).unwrap();
        for (a, b) in unit.iter().zip(&big) {
            assert!((a / (c * c) - b).abs() < 1e-11 * a.max(1.0));
        }
    }

    #[test]
    fn sturm_counts_match_requested_eigenvalues() {
        let op = zonal_laplacian(&ZonalGrid::new(4, 1.0, 200).unwrap());
        let ev = smallest_eigenvalues(&op, 6).unwrap();
        for (k, v) in ev.iter().enumerate() {
            assert_eq!(op.sturm_count(*v + 1e-6), k + 1);
            assert_eq!(op.sturm_count(*v - 1e-6), k);
        }
    }

    #[test]
    fn discrete_clifford_matches_closed_form() {
        for (n, m) in [(5, 1), (6, 2)] {
            let model = HypersurfaceModel::critical_clifford(n, m).unwrap();
            let exact = js_spectrum(&model, DEFAULT_CUTOFF).unwrap().lambda2().unwrap();
            let got = discrete_clifford_lambda2(n, m, model.shape_parameter(), 800).unwrap();
            assert!((got - exact).abs() < 2e-3, "{n} {m}: {got} vs {exact}");
        }
        assert!(matches!(
            discrete_clifford_lambda2(5, 1, 0.6324555, 32),
            Err(Error::Resolution(_))
        ));
    }

    #[test]
    fn discrete_clifford_converges_at_second_order() {
        let c = crate::model::critical_radius(5, 1).unwrap();
        let errs: Vec<(usize, f64)> = [200, 400, 800]
            .iter()
            .map(|&cells| {
                let v = discrete_clifford_lambda2(5, 1, c, cells).unwrap();
                (cells, v + 20.0 / 6f64.sqrt())
            })
            .collect();
        let order = observed_order(&errs);
        assert!((order - 2.0).abs() < 0.3, "{order} from {errs:?}");
    }
}
