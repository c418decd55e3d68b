//! Symmetric functions of principal curvatures.
//!
//! Everything here is a pure function of the principal curvatures
//! `k_1, ..., k_n` at a single point: the normalized mean curvatures
//! `H`, `H_2`, `H_3`, the power sums `S = sum k_i^2` and `f_3 = sum k_i^3`,
//! the normalized scalar curvature `r` given by the Gauss relation
//! `n(n-1)r = n(n-1) + n^2 H^2 - S`, and the zero-order coefficient of the
//! Jacobi operator `J_s = -Box - (n(n-1)H + nHS - f_3)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for comparing two algebraic routes to the same value.
pub const CROSS_FORM_TOL: f64 = 1e-10;

/// Slack allowed on the Gauss constraint `n^2 H^2 - S >= 0`.
pub const GAUSS_CONSTRAINT_SLACK: f64 = 1e-9;

/// The principal curvatures at one point of an `n`-dimensional hypersurface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct PrincipalCurvatures {
    k: Vec<f64>,
}

impl PrincipalCurvatures {
    pub fn new(k: Vec<f64>) -> Result<Self> {
        if k.len() < 3 {
            return Err(Error::Dimension(format!(
                "need at least 3 principal curvatures, got {}",
                k.len()
            )));
        }
        if let Some(bad) = k.iter().find(|v| !v.is_finite()) {
            return Err(Error::Parameter(format!(
                "principal curvature {bad} is not finite"
            )));
        }
        Ok(Self { k })
    }

    /// `n` copies of `value`.
    pub fn umbilic(n: usize, value: f64) -> Result<Self> {
        Self::new(vec![value; n])
    }

    pub fn dim(&self) -> usize {
        self.k.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.k
    }

    pub fn negated(&self) -> Self {
        Self {
            k: self.k.iter().map(|v| -v).collect(),
        }
    }

    pub fn invariants(&self) -> CurvatureInvariants {
        CurvatureInvariants::from_curvatures(self)
    }
}

impl TryFrom<Vec<f64>> for PrincipalCurvatures {
    type Error = Error;

    fn try_from(k: Vec<f64>) -> Result<Self> {
        Self::new(k)
    }
}

impl From<PrincipalCurvatures> for Vec<f64> {
    fn from(k: PrincipalCurvatures) -> Self {
        k.k
    }
}

/// Curvature invariants of one point (or of a homogeneous model).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureInvariants {
    pub n: usize,
    /// Mean curvature `H`.
    pub h: f64,
    /// Second mean curvature `H_2`.
    pub h2: f64,
    /// Third mean curvature `H_3`.
    pub h3: f64,
    /// Squared norm of the second fundamental form.
    pub s: f64,
    /// `sum k_i^3`.
    pub f3: f64,
    /// Normalized scalar curvature.
    pub r: f64,
}

impl CurvatureInvariants {
    pub fn from_curvatures(k: &PrincipalCurvatures) -> Self {
        let n = k.dim();
        let nf = n as f64;
        // e[j] is the j-th elementary symmetric polynomial of the curvatures seen so far.
        let mut e = [1.0, 0.0, 0.0, 0.0];
        let mut s = 0.0;
        let mut f3 = 0.0;
        for &ki in k.as_slice() {
            for j in (1..=3).rev() {
                e[j] += ki * e[j - 1];
            }
            s += ki * ki;
            f3 += ki * ki * ki;
        }
        let h = e[1] / nf;
        let h2 = e[2] / binomial2(nf);
        let h3 = e[3] / binomial3(nf);
        let r = scalar_curvature(n, h, s);
        Self {
            n,
            h,
            h2,
            h3,
            s,
            f3,
            r,
        }
    }

    /// Residual of `n(n-1)r - n(n-1) - n^2 H^2 + S`, scaled by `max(1, S)`.
    pub fn gauss_residual(&self) -> f64 {
        let nf = self.n as f64;
        let lhs = nf * (nf - 1.0) * self.r - nf * (nf - 1.0) - nf * nf * self.h * self.h + self.s;
        lhs.abs() / self.s.max(1.0)
    }

    /// Residual of `S = n^2 H^2 - n(n-1) H_2`, scaled by `max(1, S)`.
    pub fn newton_s_residual(&self) -> f64 {
        (newton_s(self.n, self.h, self.h2) - self.s).abs() / self.s.max(1.0)
    }

    /// Same invariants for the opposite choice of unit normal.
    pub fn reoriented(&self) -> Self {
        Self {
            h: -self.h,
            h3: -self.h3,
            f3: -self.f3,
            ..*self
        }
    }
}

fn binomial2(n: f64) -> f64 {
    n * (n - 1.0) / 2.0
}

fn binomial3(n: f64) -> f64 {
    n * (n - 1.0) * (n - 2.0) / 6.0
}

/// Gauss relation solved for `r`.
pub fn scalar_curvature(n: usize, h: f64, s: f64) -> f64 {
    let nf = n as f64;
    1.0 + (nf * nf * h * h - s) / (nf * (nf - 1.0))
}

/// Invariants of a raw curvature list; fails for `n < 3` or non-finite entries.
pub fn invariants_from_curvatures(k: &[f64]) -> Result<CurvatureInvariants> {
    PrincipalCurvatures::new(k.to_vec()).map(|k| k.invariants())
}

/// `f_3` recovered from `H`, `H_2`, `H_3` by Newton's identities.
pub fn newton_f3(n: usize, h: f64, h2: f64, h3: f64) -> f64 {
    let nf = n as f64;
    nf.powi(3) * h.powi(3) + nf * (nf - 1.0) * (nf - 2.0) / 2.0 * h3
        - 3.0 * nf * nf * (nf - 1.0) / 2.0 * h * h2
}

/// `S` recovered from `H` and `H_2` by Newton's identities.
pub fn newton_s(n: usize, h: f64, h2: f64) -> f64 {
    let nf = n as f64;
    nf * nf * h * h - nf * (nf - 1.0) * h2
}

/// Zero-order coefficient of `J_s` in the reduced form
/// `(n(n-1)/2)(2H - (n-2)H_3 + n H H_2)`.
pub fn jacobi_order0_reduced(inv: &CurvatureInvariants) -> f64 {
    let nf = inv.n as f64;
    nf * (nf - 1.0) / 2.0 * (2.0 * inv.h - (nf - 2.0) * inv.h3 + nf * inv.h * inv.h2)
}

/// Zero-order coefficient `n(n-1)H + nHS - f_3` of the Jacobi operator.
///
/// The value is cross-checked against [`jacobi_order0_reduced`]; a relative
/// disagreement above [`CROSS_FORM_TOL`] means the invariants were not built
/// from a single curvature vector and is reported as an error.
pub fn jacobi_order0(inv: &CurvatureInvariants) -> Result<f64> {
    let nf = inv.n as f64;
    let a = nf * (nf - 1.0) * inv.h;
    let b = nf * inv.h * inv.s;
    let direct = a + b - inv.f3;
    let reduced = jacobi_order0_reduced(inv);
    let scale = a.abs().max(b.abs()).max(inv.f3.abs()).max(reduced.abs());
    if (direct - reduced).abs() > CROSS_FORM_TOL * scale + f64::MIN_POSITIVE {
        return Err(Error::InternalConsistency(format!(
            "zero-order coefficient forms disagree: {direct} vs {reduced}"
        )));
    }
    Ok(direct)
}

/// `H |grad rho|^2 - (2/(n(n-1))) sum_i (nH - k_i) rho_i^2` in a principal frame.
///
/// No hypotheses are checked; see [`lemma38_pointwise`] for the guarded form.
pub fn rho_quadratic_form(k: &[f64], h: f64, grad_rho: &[f64]) -> f64 {
    let nf = k.len() as f64;
    let c = 2.0 / (nf * (nf - 1.0));
    k.iter()
        .zip(grad_rho)
        .map(|(&ki, &ri)| (h - c * (nf * h - ki)) * ri * ri)
        .sum()
}

/// Pointwise integrand of the gradient inequality for `n >= 5`, evaluated in
/// its diagonal form `(2/(n(n-1))) sum_i rho_i^2 ((n(n-3)/2) H + k_i)`.
pub fn lemma38_pointwise(k: &PrincipalCurvatures, grad_rho: &[f64]) -> Result<f64> {
    let n = k.dim();
    if n < 5 {
        return Err(Error::Hypothesis(format!(
            "pointwise gradient inequality needs n >= 5, got n = {n}"
        )));
    }
    if grad_rho.len() != n {
        return Err(Error::Dimension(format!(
            "gradient has {} components, expected {n}",
            grad_rho.len()
        )));
    }
    let nf = n as f64;
    let h = k.as_slice().iter().sum::<f64>() / nf;
    if h <= 0.0 {
        return Err(Error::Orientation(h));
    }
    let s: f64 = k.as_slice().iter().map(|v| v * v).sum();
    let gap = nf * nf * h * h - s;
    if gap < -GAUSS_CONSTRAINT_SLACK * s.max(1.0) {
        return Err(Error::Precondition(format!(
            "Gauss constraint n^2 H^2 - S >= 0 violated ({gap:e})"
        )));
    }
    let c = 2.0 / (nf * (nf - 1.0));
    let shift = nf * (nf - 3.0) / 2.0 * h;
    Ok(c * k
        .as_slice()
        .iter()
        .zip(grad_rho)
        .map(|(&ki, &ri)| ri * ri * (shift + ki))
        .sum::<f64>())
}

/// Deterministic curvature vector with `H > 0` and
/// `n^2 H^2 - S = n(n-1)(r-1)`, for driving property checks.
///
/// Writes `k = H 1 + t z` with `z` a unit trace-free direction; the constraint
/// then fixes `t^2 = n(n-1)(H^2 - (r-1))`, so `H` is drawn above `sqrt(r-1)`.
pub fn gauss_constraint_sampler(n: usize, r: f64, seed: u64) -> Result<PrincipalCurvatures> {
    if n < 3 {
        return Err(Error::Dimension(format!("sampler needs n >= 3, got {n}")));
    }
    if !(r >= 1.0) || !r.is_finite() {
        return Err(Error::UnsupportedRegime(format!(
            "sampler needs r >= 1, got {r}"
        )));
    }
    let nf = n as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let floor = (r - 1.0).sqrt();
    let h = floor.max(0.05) + rng.random_range(0.0..2.0);
    let t = (nf * (nf - 1.0) * (h * h - (r - 1.0))).max(0.0).sqrt();
    let z = loop {
        let mut z: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let mean = z.iter().sum::<f64>() / nf;
        z.iter_mut().for_each(|v| *v -= mean);
        let norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 1e-6 {
            z.iter_mut().for_each(|v| *v /= norm);
            break z;
        }
    };
    PrincipalCurvatures::new(z.iter().map(|zi| h + t * zi).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Elementary symmetric sums by enumerating every index subset.
    fn brute_elementary(k: &[f64]) -> [f64; 4] {
        let n = k.len();
        let mut e = [0.0; 4];
        for mask in 0u32..(1 << n) {
            let size = mask.count_ones() as usize;
            if size <= 3 {
                let prod: f64 = (0..n)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| k[i])
                    .product();
                e[size] += prod;
            }
        }
        e
    }

    fn clifford_5_1() -> Vec<f64> {
        let c2: f64 = 0.4;
        let a = -((1.0 - c2) / c2).sqrt();
        let b = (c2 / (1.0 - c2)).sqrt();
        vec![a, b, b, b, b]
    }

    #[test]
    fn umbilical_unit_curvatures() {
        let inv = invariants_from_curvatures(&[1.0; 5]).unwrap();
        assert_eq!(inv.h, 1.0);
        assert!((inv.h2 - 1.0).abs() < 1e-15);
        assert!((inv.h3 - 1.0).abs() < 1e-15);
        assert_eq!(inv.s, 5.0);
        assert_eq!(inv.f3, 5.0);
        assert!((inv.r - 2.0).abs() < 1e-15);
    }

    #[test]
    fn one_to_five_matches_subset_enumeration() {
        let k = [1.0, 2.0, 3.0, 4.0, 5.0];
        let e = brute_elementary(&k);
        // frozen from the enumeration oracle: e1 = 15, e2 = 85, e3 = 225
        assert_eq!(e, [1.0, 15.0, 85.0, 225.0]);
        let inv = invariants_from_curvatures(&k).unwrap();
        assert!((inv.h - 3.0).abs() < 1e-14);
        assert!((inv.h2 - 8.5).abs() < 1e-13);
        assert!((inv.h3 - 22.5).abs() < 1e-12);
        assert_eq!(inv.s, 55.0);
        assert_eq!(inv.f3, 225.0);
        assert!((inv.r - 9.5).abs() < 1e-13);
    }

    #[test]
    fn clifford_curvatures_have_zero_h2() {
        let k = clifford_5_1();
        let inv = invariants_from_curvatures(&k).unwrap();
        let e = brute_elementary(&k);
        assert!((inv.h - 0.4082483).abs() < 1e-7);
        assert!(inv.h2.abs() < 1e-9);
        assert!((inv.h3 - e[3] / 10.0).abs() < 1e-14);
        assert!((inv.h3 + 0.2721655).abs() < 1e-7);
        assert!((inv.s - 4.1666667).abs() < 1e-7);
        assert!((inv.r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_short_vectors() {
        assert!(matches!(
            invariants_from_curvatures(&[1.0, 2.0]),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            invariants_from_curvatures(&[1.0, f64::NAN, 2.0]),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn totally_geodesic_is_accepted() {
        let inv = invariants_from_curvatures(&[0.0; 5]).unwrap();
        assert_eq!(inv.r, 1.0);
        assert_eq!(jacobi_order0(&inv).unwrap(), 0.0);
    }

    #[test]
    fn newton_formulas() {
        assert!((newton_f3(5, 1.0, 1.0, 1.0) - 5.0).abs() < 1e-12);
        assert!((newton_f3(5, 3.0, 8.5, 22.5) - 225.0).abs() < 1e-10);
        let h = 1.0 / 6f64.sqrt();
        let k = clifford_5_1();
        let f3: f64 = k.iter().map(|v| v.powi(3)).sum();
        assert!((f3 - 0.3402069).abs() < 1e-7);
        assert!((newton_f3(5, h, 0.0, -2.0 * h / 3.0) - f3).abs() < 1e-12);
        assert_eq!(newton_s(5, 1.0, 1.0), 5.0);
        assert_eq!(newton_s(5, 3.0, 8.5), 55.0);
        assert!((newton_s(5, 0.4082483, 0.0) - 4.1666667).abs() < 1e-6);
    }

    #[test]
    fn jacobi_coefficient_examples() {
        let umb = invariants_from_curvatures(&[1.0; 5]).unwrap();
        assert!((jacobi_order0(&umb).unwrap() - 40.0).abs() < 1e-12);
        let cl = invariants_from_curvatures(&clifford_5_1()).unwrap();
        let expect = 2.0 * 20.0 / 6f64.sqrt();
        assert!((jacobi_order0(&cl).unwrap() - expect).abs() < 1e-12);
        assert!((expect - 16.3299316).abs() < 1e-7);
    }

    #[test]
    fn inconsistent_invariants_are_rejected() {
        let mut inv = invariants_from_curvatures(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        inv.f3 += 1.0;
        assert!(matches!(
            jacobi_order0(&inv),
            Err(Error::InternalConsistency(_))
        ));
    }

    #[test]
    fn lemma38_examples() {
        let umb = PrincipalCurvatures::umbilic(5, 1.0).unwrap();
        let v = lemma38_pointwise(&umb, &[1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert!((v - 0.6).abs() < 1e-15);

        let cl = PrincipalCurvatures::new(clifford_5_1()).unwrap();
        let v = lemma38_pointwise(&cl, &[1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert!((v - 0.0816497).abs() < 1e-7);
        assert_eq!(lemma38_pointwise(&cl, &[0.0; 5]).unwrap(), 0.0);
    }

    #[test]
    fn lemma38_diagonal_form_matches_direct_form() {
        let k = gauss_constraint_sampler(7, 1.3, 11).unwrap();
        let rho = [0.3, -1.0, 0.2, 0.5, 0.0, 2.0, -0.7];
        let h = k.invariants().h;
        let direct = rho_quadratic_form(k.as_slice(), h, &rho);
        let diag = lemma38_pointwise(&k, &rho).unwrap();
        assert!((direct - diag).abs() < 1e-12 * direct.abs().max(1.0));
    }

    #[test]
    fn lemma38_errors() {
        let small = PrincipalCurvatures::umbilic(4, 1.0).unwrap();
        assert!(matches!(
            lemma38_pointwise(&small, &[0.0; 4]),
            Err(Error::Hypothesis(_))
        ));
        let neg = PrincipalCurvatures::umbilic(5, -1.0).unwrap();
        assert!(matches!(
            lemma38_pointwise(&neg, &[0.0; 5]),
            Err(Error::Orientation(_))
        ));
        // H > 0 but S > n^2 H^2
        let spread = PrincipalCurvatures::new(vec![10.0, -9.0, 0.1, 0.1, 0.1]).unwrap();
        assert!(matches!(
            lemma38_pointwise(&spread, &[0.0; 5]),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn sampler_meets_constraint() {
        for (n, r, seed) in [(5, 1.0, 3), (5, 2.0, 42), (6, 1.5, 7)] {
            let k = gauss_constraint_sampler(n, r, seed).unwrap();
            let nf = n as f64;
            let sum: f64 = k.as_slice().iter().sum();
            let s: f64 = k.as_slice().iter().map(|v| v * v).sum();
            assert!(sum > 0.0);
            let gap = sum * sum - s;
            assert!((gap - nf * (nf - 1.0) * (r - 1.0)).abs() < 1e-10, "{gap}");
        }
    }

    #[test]
    fn sampler_is_deterministic_and_guards_regime() {
        assert_eq!(
            gauss_constraint_sampler(8, 1.2, 5).unwrap(),
            gauss_constraint_sampler(8, 1.2, 5).unwrap()
        );
        assert!(matches!(
            gauss_constraint_sampler(5, 0.9, 1),
            Err(Error::UnsupportedRegime(_))
        ));
        assert!(matches!(
            gauss_constraint_sampler(2, 1.5, 1),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn serde_rejects_short_vectors() {
        let ok: PrincipalCurvatures = serde_json::from_str("[1.0, 2.0, 3.0]").unwrap();
        assert_eq!(ok.dim(), 3);
        assert!(serde_json::from_str::<PrincipalCurvatures>("[1.0]").is_err());
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        fn curvature_vec() -> impl Strategy<Value = Vec<f64>> {
            (3usize..=12).prop_flat_map(|n| proptest::collection::vec(-5.0f64..5.0, n))
        }

        proptest! {
            #[test]
            fn newton_identities_hold(k in curvature_vec()) {
                let inv = invariants_from_curvatures(&k).unwrap();
                let f3_scale = k.iter().map(|v| v.abs().powi(3)).sum::<f64>().max(1.0);
                prop_assert!((newton_f3(inv.n, inv.h, inv.h2, inv.h3) - inv.f3).abs() <= 1e-10 * f3_scale);
                prop_assert!(inv.newton_s_residual() <= 1e-12);
                prop_assert!(inv.gauss_residual() <= 1e-12);
                prop_assert!(inv.s >= inv.n as f64 * inv.h * inv.h - 1e-12 * inv.s.max(1.0));
            }

            #[test]
            fn maclaurin_inequalities_on_sampler(n in 3usize..=12, r in 1.0f64..3.0, seed in any::<u64>()) {
                let inv = gauss_constraint_sampler(n, r, seed).unwrap().invariants();
                prop_assert!(inv.h > 0.0);
                prop_assert!(inv.h2 >= -1e-12);
                let scale = inv.h.powi(3).max(1.0);
                prop_assert!(inv.h2 <= inv.h * inv.h + 1e-12 * scale);
                prop_assert!(inv.h3 <= inv.h2 * inv.h2 / inv.h + 1e-10 * scale);
            }

            #[test]
            fn jacobi_forms_agree(n in 3usize..=12, r in 1.0f64..3.0, seed in any::<u64>()) {
                let inv = gauss_constraint_sampler(n, r, seed).unwrap().invariants();
                prop_assert!(jacobi_order0(&inv).is_ok());
            }
        }
    }
}
