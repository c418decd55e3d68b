use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use scalarspec::bounds::UNIT_SCALAR_TOL;
use scalarspec::conformal::{
    centering_solve, lemma36_rhs, lemma37_gap, lemma38_integral, lemma38_integrand,
    minmax_chain_check, position_eigenfunction_check, sample_model, support_hessian_check,
    BallPoint, SampledHypersurface,
};
use scalarspec::discrete::{discrete_clifford_lambda2, observed_order};
use scalarspec::model::verify_critical_identities;
use scalarspec::quadrature::sphere_volume;
use scalarspec::spectrum::{box_spectrum, js_spectrum, DEFAULT_CUTOFF};
use scalarspec::{evaluate_bounds, BoundVerdict, HypersurfaceModel, Theorem};

use crate::config::SweepConfig;
use crate::report::{Row, RowKey, RunReport};
use crate::UsageError;

/// Sampled suites visit dimensions up to this value.
pub const SAMPLED_N_MAX: usize = 6;
/// Required lower bound for the gradient integral, relative to the volume.
pub const GRADIENT_INTEGRAL_TOL: f64 = 1e-9;
/// Required lower bound for the gradient integrand at every sample.
pub const GRADIENT_POINTWISE_TOL: f64 = 1e-12;
/// `|g|` below this counts as the origin.
pub const ORIGIN_TOL: f64 = 1e-10;
pub const THREADS_VAR: &str = "SCALARSPEC_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Identities,
    Bounds,
    Lemmas,
    Discrete,
    Center,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Identities => "identities",
            Suite::Bounds => "bounds",
            Suite::Lemmas => "lemmas",
            Suite::Discrete => "discrete",
            Suite::Center => "center",
            Suite::All => "all",
        }
    }

    fn parts(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![
                Suite::Identities,
                Suite::Bounds,
                Suite::Lemmas,
                Suite::Discrete,
                Suite::Center,
            ],
            s => vec![s],
        }
    }
}

fn key(suite: &'static str, model: &HypersurfaceModel) -> RowKey {
    let (case, m) = match *model {
        HypersurfaceModel::Umbilical { .. } => ("umbilical".to_string(), None),
        HypersurfaceModel::Clifford { m, .. } => {
            let critical = model.geometry().map(|g| (g.r - 1.0).abs() <= UNIT_SCALAR_TOL).unwrap_or(false);
            (if critical { "clifford critical" } else { "clifford" }.to_string(), Some(m))
        }
    };
    RowKey {
        suite,
        case,
        n: model.n(),
        m,
        c_or_r: Some(model.shape_parameter()),
    }
}

fn model_rng(seed: u64, model: &HypersurfaceModel) -> ChaCha8Rng {
    let salt = (model.n() as u64) << 48 ^ (model.split().unwrap_or(0) as u64) << 40 ^ model.shape_parameter().to_bits();
    ChaCha8Rng::seed_from_u64(seed ^ salt)
}

fn random_direction(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
    let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / len).collect()
}

/// The four critical-radius residuals of a Clifford split.
pub fn identity_rows(n: usize, m: usize, tol: f64) -> Vec<Row> {
    let model = match HypersurfaceModel::critical_clifford(n, m) {
        Ok(model) => model,
        Err(e) => {
            let k = RowKey {
                suite: "identities",
                case: "clifford critical".into(),
                n,
                m: Some(m),
                c_or_r: None,
            };
            return vec![k.failure("critical identities", &e.to_string())];
        }
    };
    let k = key("identities", &model);
    match verify_critical_identities(n, m) {
        Ok(residuals) => ["box branch gap", "zero-order closed form", "lambda2 + n(n-1)H", "lambda2 - H3 form"]
            .iter()
            .zip(residuals)
            .map(|(q, r)| k.target(q, r, 0.0, tol))
            .collect(),
        Err(e) => vec![k.failure("critical identities", &e.to_string())],
    }
}

fn expects_equality(model: &HypersurfaceModel, theorem: Theorem) -> bool {
    match model {
        HypersurfaceModel::Umbilical { .. } => true,
        HypersurfaceModel::Clifford { .. } => {
            matches!(theorem, Theorem::FirstEigenvalueUnitScalar | Theorem::SecondEigenvalueUnitScalar)
                && model.geometry().map(|g| (g.r - 1.0).abs() <= UNIT_SCALAR_TOL).unwrap_or(false)
        }
    }
}

/// Every applicable eigenvalue bound, plus an equality row where the model is
/// an equality case of that bound.
pub fn bound_rows(model: &HypersurfaceModel, tol: f64) -> Vec<Row> {
    let k = key("bounds", model);
    let reports = match evaluate_bounds(model) {
        Ok(r) => r,
        Err(e) => return vec![k.failure("bounds", &e.to_string())],
    };
    let mut rows = Vec::new();
    for report in reports {
        let tag = report.theorem.tag();
        if let BoundVerdict::Checked(c) = report.verdict {
            rows.push(k.upper(tag, c.computed_value, c.bound_value, tol));
            if expects_equality(model, report.theorem) {
                rows.push(k.target(&format!("{tag} equality"), c.computed_value, c.bound_value, tol));
            }
        }
    }
    rows
}

fn closed_volume(model: &HypersurfaceModel) -> f64 {
    match *model {
        HypersurfaceModel::Umbilical { n, r } => sphere_volume(n, 1.0 / r.sqrt()),
        HypersurfaceModel::Clifford { n, m, c } => {
            sphere_volume(m, c) * sphere_volume(n - m, (1.0 - c * c).sqrt())
        }
    }
}

fn lemma_rows_for(k: &RowKey, model: &HypersurfaceModel, sample: &SampledHypersurface, config: &SweepConfig) -> Vec<Row> {
    let tol = config.tolerance("lemmas");
    let mut rows = Vec::new();
    let vol = sample.total_weight();
    let dim = sample.ambient_dim();
    rows.push(k.target("volume ratio", vol / closed_volume(model), 1.0, tol));

    let mut rng = model_rng(config.seed, model);
    let origin = BallPoint::origin(dim);
    let g = BallPoint::new(random_direction(&mut rng, dim).into_iter().map(|x| 0.3 * x).collect())
        .expect("radius 0.3 is inside the ball");
    let a = random_direction(&mut rng, dim);

    match (model.geometry(), lemma36_rhs(sample, &origin)) {
        (Ok(inv), Ok(value)) => {
            let nf = inv.n as f64;
            let closed = match model.jacobi_order0() {
                Ok(z) => nf * (nf - 1.0) * inv.h - z,
                Err(e) => return vec![k.failure("rayleigh sum at origin", &e.to_string())],
            };
            rows.push(k.target("rayleigh sum at origin / vol", value / vol, closed, tol * closed.abs().max(1.0)));
        }
        (Err(e), _) | (_, Err(e)) => rows.push(k.failure("rayleigh sum at origin", &e.to_string())),
    }

    match lemma37_gap(sample, &g) {
        Ok(gap) => {
            rows.push(k.upper("conformal factor inequality / vol", gap.lhs / vol, gap.rhs / vol, tol));
            rows.push(k.target(
                "conformal factor identity / vol",
                gap.lhs / vol,
                (gap.rhs - gap.equality_defect) / vol,
                tol * (gap.lhs / vol).abs().max(1.0),
            ));
        }
        Err(e) => rows.push(k.failure("conformal factor", &e.to_string())),
    }

    if model.n() >= 5 {
        match (lemma38_integral(sample, &g), lemma38_integrand(sample, &g)) {
            (Ok(integral), Ok(values)) => {
                rows.push(k.lower("gradient integral / vol", integral / vol, 0.0, GRADIENT_INTEGRAL_TOL));
                let min = values.iter().copied().fold(f64::INFINITY, f64::min);
                rows.push(k.lower("gradient integrand min", min, 0.0, GRADIENT_POINTWISE_TOL));
            }
            (Err(e), _) | (_, Err(e)) => rows.push(k.failure("gradient integral", &e.to_string())),
        }
        let u = vec![1.0; sample.len()];
        match minmax_chain_check(sample, &u, config.tolerance("center")) {
            Ok(report) => {
                for step in &report.steps {
                    let scale = step.lhs.abs().max(step.rhs.abs()).max(vol);
                    rows.push(k.upper(&format!("chain {}", step.name), step.lhs / scale, step.rhs / scale, tol));
                }
            }
            Err(e) => rows.push(k.failure("chain", &e.to_string())),
        }
    }

    match support_hessian_check(sample, &a) {
        Ok(res) => rows.push(k.upper("support hessian residual", res, 0.0, config.tolerance("hessian"))),
        Err(e) => rows.push(k.failure("support hessian residual", &e.to_string())),
    }

    if matches!(model, HypersurfaceModel::Clifford { .. }) && k.case == "clifford critical" {
        match position_eigenfunction_check(model) {
            Ok(res) => rows.push(k.upper("coordinate eigenvalue residual", res, 0.0, config.tolerance("identities"))),
            Err(e) => rows.push(k.failure("coordinate eigenvalue residual", &e.to_string())),
        }
    }
    rows
}

/// Quadrature checks of the conformal identities and the min-max chain.
pub fn lemma_rows(model: &HypersurfaceModel, config: &SweepConfig) -> Vec<Row> {
    let k = key("lemmas", model);
    match sample_model(model, config.resolution) {
        Ok(sample) => lemma_rows_for(&k, model, &sample, config),
        Err(e) => vec![k.failure("sampling", &e.to_string())],
    }
}

/// Discrete `lambda_2(J_s)` on each grid, compared with the closed form at
/// the finest grid, and the observed order of convergence.
pub fn discrete_rows(model: &HypersurfaceModel, grids: &[usize], config: &SweepConfig) -> Vec<Row> {
    let k = key("discrete", model);
    let HypersurfaceModel::Clifford { n, m, c } = *model else {
        return vec![k.failure("discrete lambda2", "the discrete suite needs a Clifford model")];
    };
    let exact = match js_spectrum(model, DEFAULT_CUTOFF) {
        Ok(s) => s.lambda2().expect("default cutoff yields two eigenvalues"),
        Err(e) => return vec![k.failure("discrete lambda2", &e.to_string())],
    };
    let mut grids = grids.to_vec();
    grids.sort_unstable();
    grids.dedup();
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for &cells in &grids {
        match discrete_clifford_lambda2(n, m, c, cells) {
            Ok(v) => {
                rows.push(k.info(&format!("lambda2 N={cells}"), v));
                errors.push((cells, v - exact));
            }
            Err(e) => return vec![k.failure(&format!("lambda2 N={cells}"), &e.to_string())],
        }
    }
    let finest = errors.last().expect("grid list is non-empty");
    rows.push(k.target("lambda2 finest", finest.1 + exact, exact, config.tolerance("discrete")));
    if errors.len() >= 2 {
        if errors.iter().any(|(_, e)| *e == 0.0) {
            rows.push(k.failure("observed order", "discretization error vanished"));
        } else {
            rows.push(k.target("observed order", observed_order(&errors), 2.0, config.tolerance("order")));
        }
    }
    rows
}

/// Centering with constant and with tilted weights.
pub fn center_rows(model: &HypersurfaceModel, config: &SweepConfig) -> Vec<Row> {
    let k = key("center", model);
    let sample = match sample_model(model, config.resolution) {
        Ok(s) => s,
        Err(e) => return vec![k.failure("sampling", &e.to_string())],
    };
    let tol = config.tolerance("center");
    let max_iter = config.tolerance("iterations");
    let mut rng = model_rng(config.seed, model);
    let a = random_direction(&mut rng, sample.ambient_dim());
    let constant = vec![1.0; sample.len()];
    let tilted: Vec<f64> = sample
        .samples()
        .iter()
        .map(|s| 1.0 + 0.5 * s.x.iter().zip(&a).map(|(x, y)| x * y).sum::<f64>())
        .collect();
    let mut rows = Vec::new();
    for (label, u) in [("constant", &constant), ("tilted", &tilted)] {
        match centering_solve(&sample, u, tol) {
            Ok(c) => {
                rows.push(k.upper(&format!("{label} residual / mass"), c.residual / c.mass, 0.0, tol));
                rows.push(k.upper(&format!("{label} iterations"), c.iterations as f64, max_iter, 0.0));
                let norm = c.point.norm();
                // Clifford products are symmetric under x -> -x, so constant weights center at the origin
                if label == "constant" && matches!(model, HypersurfaceModel::Clifford { .. }) {
                    rows.push(k.upper("constant |g|", norm, 0.0, ORIGIN_TOL));
                } else {
                    rows.push(k.info(&format!("{label} |g|"), norm));
                }
            }
            Err(e) => rows.push(k.failure(&format!("{label} centering"), &e.to_string())),
        }
    }
    rows
}

/// Box and Jacobi spectra of one model up to the harmonic degree `cutoff`.
pub fn spectrum_rows(model: &HypersurfaceModel, cutoff: usize) -> Vec<Row> {
    let mut k = key("spectra", model);
    let mut rows = Vec::new();
    for (label, spectrum) in [("box", box_spectrum(model, cutoff)), ("jacobi", js_spectrum(model, cutoff))] {
        k.case = format!("{} {label}", key("spectra", model).case);
        match spectrum {
            Ok(s) => {
                for (i, (value, mult)) in s.entries().iter().enumerate() {
                    rows.push(k.info(&format!("eigenvalue {}", i + 1), *value));
                    rows.push(k.info(&format!("multiplicity {}", i + 1), *mult as f64));
                }
            }
            Err(e) => rows.push(k.failure("spectrum", &e.to_string())),
        }
    }
    rows
}

#[derive(Debug, Clone, Copy)]
enum Cell {
    Identity(usize, usize),
    Bounds(HypersurfaceModel),
    Lemmas(HypersurfaceModel),
    Discrete(HypersurfaceModel),
    Center(HypersurfaceModel),
}

fn cells(config: &SweepConfig, suite: Suite) -> Vec<Cell> {
    let mut cells = Vec::new();
    let ns = config.n_min..=config.n_max;
    let critical = |n: usize| -> Vec<HypersurfaceModel> {
        config
            .m_policy
            .splits(n)
            .into_iter()
            .filter_map(|m| HypersurfaceModel::critical_clifford(n, m).ok())
            .collect()
    };
    let umbilical = |n: usize| -> Vec<HypersurfaceModel> {
        config
            .r_list
            .iter()
            .filter_map(|&r| HypersurfaceModel::umbilical(n, r).ok())
            .collect()
    };
    for part in suite.parts() {
        for n in ns.clone() {
            match part {
                Suite::Identities => cells.extend(config.m_policy.splits(n).into_iter().map(|m| Cell::Identity(n, m))),
                Suite::Bounds => {
                    cells.extend(umbilical(n).into_iter().chain(critical(n)).map(Cell::Bounds));
                }
                Suite::Lemmas if n <= SAMPLED_N_MAX => {
                    cells.extend(critical(n).into_iter().chain(umbilical(n)).map(Cell::Lemmas));
                }
                Suite::Discrete => cells.extend(critical(n).into_iter().map(Cell::Discrete)),
                Suite::Center if n <= SAMPLED_N_MAX => {
                    cells.extend(critical(n).into_iter().chain(umbilical(n)).map(Cell::Center));
                }
                _ => {}
            }
        }
    }
    cells
}

fn run_cell(config: &SweepConfig, cell: Cell) -> Vec<Row> {
    match cell {
        Cell::Identity(n, m) => identity_rows(n, m, config.tolerance("identities")),
        Cell::Bounds(model) => bound_rows(&model, config.tolerance("bounds")),
        Cell::Lemmas(model) => lemma_rows(&model, config),
        Cell::Discrete(model) => discrete_rows(&model, &config.grid_sizes, config),
        Cell::Center(model) => center_rows(&model, config),
    }
}

/// Thread count from the environment; `0` or unset means automatic.
pub fn thread_limit() -> Result<usize, UsageError> {
    match std::env::var(THREADS_VAR) {
        Err(_) => Ok(0),
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| UsageError(format!("{THREADS_VAR} must be a non-negative integer, got {v:?}"))),
    }
}

/// Runs rows-producing work on a pool honouring the thread limit.
pub fn in_pool<T: Send>(work: impl FnOnce() -> T + Send) -> Result<T, UsageError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_limit()?)
        .build()
        .map_err(|e| UsageError(format!("cannot start worker threads: {e}")))?;
    Ok(pool.install(work))
}

pub fn run_suite(config: &SweepConfig, suite: Suite) -> Result<RunReport, UsageError> {
    config.validate()?;
    let start = Instant::now();
    let cells = cells(config, suite);
    let rows: Vec<Row> = in_pool(|| {
        cells
            .par_iter()
            .map(|&cell| run_cell(config, cell))
            .collect::<Vec<_>>()
            .concat()
    })?;
    Ok(RunReport::new(suite.name(), rows, start.elapsed().as_secs_f64()))
}
