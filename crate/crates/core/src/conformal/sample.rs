use serde::{Deserialize, Serialize};

use super::ball::dot;
use crate::error::{Error, Result};
use crate::model::HypersurfaceModel;
use crate::quadrature::{fsum, SphereRule};

/// Upper limit on the number of quadrature nodes of a sampled hypersurface.
pub const MAX_SAMPLES: usize = 4_000_000;
/// Tolerance used when validating imported samples.
pub const IMPORT_TOL: f64 = 1e-10;

/// One round-sphere factor `S^dim(radius)` of the embedding. Its coordinates
/// occupy `dim + 1` consecutive ambient slots starting at `offset`; the unit
/// normal restricted to the block is `normal_coef * omega`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Factor {
    dim: usize,
    radius: f64,
    normal_coef: f64,
    offset: usize,
}

/// `x = (r_1 omega_1, ..., tail)`, `e_{n+1} = (nu_1 omega_1, ..., tail_normal)`.
#[derive(Debug, Clone, PartialEq)]
struct Embedding {
    ambient: usize,
    factors: Vec<Factor>,
    tail: Option<(f64, f64)>,
}

impl Embedding {
    fn of(model: &HypersurfaceModel) -> Self {
        let n = model.n();
        match *model {
            HypersurfaceModel::Umbilical { r, .. } => {
                let a = 1.0 / r.sqrt();
                let b = (1.0 - 1.0 / r).sqrt();
                Self {
                    ambient: n + 2,
                    factors: vec![Factor {
                        dim: n,
                        radius: a,
                        normal_coef: -b,
                        offset: 0,
                    }],
                    tail: Some((b, a)),
                }
            }
            HypersurfaceModel::Clifford { m, c, .. } => {
                let s = (1.0 - c * c).sqrt();
                let sigma = model.orientation();
                Self {
                    ambient: n + 2,
                    factors: vec![
                        Factor {
                            dim: m,
                            radius: c,
                            normal_coef: sigma * s,
                            offset: 0,
                        },
                        Factor {
                            dim: n - m,
                            radius: s,
                            normal_coef: -sigma * c,
                            offset: m + 1,
                        },
                    ],
                    tail: None,
                }
            }
        }
    }

    #[cfg(test)]
    fn curvatures(&self) -> Vec<f64> {
        self.factors
            .iter()
            .flat_map(|f| std::iter::repeat_n(-f.normal_coef / f.radius, f.dim))
            .collect()
    }

    fn point(&self, omegas: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
        let mut x = vec![0.0; self.ambient];
        let mut normal = vec![0.0; self.ambient];
        for (f, w) in self.factors.iter().zip(omegas) {
            for (i, wi) in w.iter().enumerate() {
                x[f.offset + i] = f.radius * wi;
                normal[f.offset + i] = f.normal_coef * wi;
            }
        }
        if let Some((xt, nt)) = self.tail {
            x[self.ambient - 1] = xt;
            normal[self.ambient - 1] = nt;
        }
        (x, normal)
    }

    fn omegas(&self, x: &[f64]) -> Vec<Vec<f64>> {
        self.factors
            .iter()
            .map(|f| {
                let block = &x[f.offset..f.offset + f.dim + 1];
                let len = dot(block, block).sqrt();
                block.iter().map(|v| v / len).collect()
            })
            .collect()
    }

    /// Orthonormal tangent frame at `x`, grouped by factor.
    fn frame(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let mut frame = Vec::new();
        for (f, w) in self.factors.iter().zip(self.omegas(x)) {
            for t in householder_complement(&w) {
                let mut e = vec![0.0; self.ambient];
                e[f.offset..f.offset + f.dim + 1].copy_from_slice(&t);
                frame.push(e);
            }
        }
        frame
    }
}

/// Orthonormal basis of the complement of the unit vector `w`, taken from the
/// columns of the Householder reflection that sends the first axis to `w`.
fn householder_complement(w: &[f64]) -> Vec<Vec<f64>> {
    let sign = if w[0] >= 0.0 { 1.0 } else { -1.0 };
    let mut v = w.to_vec();
    v[0] += sign;
    let vv = dot(&v, &v);
    (1..w.len())
        .map(|j| {
            let mut col: Vec<f64> = v.iter().map(|vi| -2.0 * v[j] * vi / vv).collect();
            col[j] += 1.0;
            col
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub x: Vec<f64>,
    pub normal: Vec<f64>,
    pub weight: f64,
    /// `n` orthonormal tangent vectors diagonalizing the shape operator.
    pub tangent_frame: Vec<Vec<f64>>,
    /// Principal curvatures aligned with `tangent_frame`.
    pub shape: Vec<f64>,
}

/// A model hypersurface with a product quadrature rule attached.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledHypersurface {
    model: HypersurfaceModel,
    embedding: Embedding,
    samples: Vec<Sample>,
    total_weight: f64,
}

#[derive(Serialize, Deserialize)]
struct SampleRecord {
    x: Vec<f64>,
    normal: Vec<f64>,
    w: f64,
    k: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct SampleDocument {
    model: HypersurfaceModel,
    samples: Vec<SampleRecord>,
}

/// Samples a model with a product rule. Circle factors take `resolution`
/// trapezoid nodes; a factor `S^d` with `d >= 2` takes the product Gauss rule
/// with `max(2, resolution / 16)` nodes per polar angle.
pub fn sample_model(model: &HypersurfaceModel, resolution: usize) -> Result<SampledHypersurface> {
    model.validate()?;
    if resolution < 4 || !resolution.is_multiple_of(2) {
        return Err(Error::Parameter(format!(
            "resolution must be even and at least 4, got {resolution}"
        )));
    }
    let embedding = Embedding::of(model);
    let q = (resolution / 16).max(2);
    let mut count = 1usize;
    for f in &embedding.factors {
        let nodes = if f.dim == 1 {
            Some(resolution)
        } else {
            q.checked_pow(f.dim as u32 - 1).and_then(|v| v.checked_mul(2 * q))
        };
        count = nodes.and_then(|v| count.checked_mul(v)).unwrap_or(usize::MAX);
    }
    if count > MAX_SAMPLES {
        return Err(Error::Parameter(format!(
            "resolution {resolution} needs {count} samples for this model, limit is {MAX_SAMPLES}"
        )));
    }
    let rules: Vec<SphereRule> = embedding
        .factors
        .iter()
        .map(|f| {
            if f.dim == 1 {
                SphereRule::circle(resolution)
            } else {
                SphereRule::product(f.dim, q)
            }
        })
        .collect::<Result<_>>()?;
    let shape = model.principal_curvatures().as_slice().to_vec();
    let scale: f64 = embedding
        .factors
        .iter()
        .map(|f| f.radius.powi(f.dim as i32))
        .product();

    let mut samples = Vec::with_capacity(count);
    let mut idx = vec![0usize; rules.len()];
    'outer: loop {
        let omegas: Vec<Vec<f64>> = rules.iter().zip(&idx).map(|(r, &i)| r.points[i].clone()).collect();
        let weight = scale * rules.iter().zip(&idx).map(|(r, &i)| r.weights[i]).product::<f64>();
        let (x, normal) = embedding.point(&omegas);
        let tangent_frame = embedding.frame(&x);
        samples.push(Sample {
            x,
            normal,
            weight,
            tangent_frame,
            shape: shape.clone(),
        });
        let mut j = rules.len();
        loop {
            if j == 0 {
                break 'outer;
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < rules[j].len() {
                break;
            }
            idx[j] = 0;
        }
    }
    Ok(SampledHypersurface::assemble(*model, embedding, samples))
}

impl SampledHypersurface {
    fn assemble(model: HypersurfaceModel, embedding: Embedding, samples: Vec<Sample>) -> Self {
        let total_weight = fsum(samples.iter().map(|s| s.weight));
        Self {
            model,
            embedding,
            samples,
            total_weight,
        }
    }

    pub fn model(&self) -> &HypersurfaceModel {
        &self.model
    }

    pub fn n(&self) -> usize {
        self.model.n()
    }

    /// Dimension `n + 2` of the ambient Euclidean space.
    pub fn ambient_dim(&self) -> usize {
        self.embedding.ambient
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    /// Quadrature of a per-sample quantity.
    pub fn integrate(&self, f: impl Fn(&Sample) -> f64) -> f64 {
        fsum(self.samples.iter().map(|s| s.weight * f(s)))
    }

    /// The same samples in a different order.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.samples.len()];
        if order.len() != seen.len() || order.iter().any(|&i| i >= seen.len() || std::mem::replace(&mut seen[i], true)) {
            return Err(Error::Parameter("order is not a permutation of the samples".into()));
        }
        let samples = order.iter().map(|&i| self.samples[i].clone()).collect();
        Ok(Self::assemble(self.model, self.embedding.clone(), samples))
    }

    /// Position and unit normal at time `t` along the geodesic leaving sample
    /// `index` with velocity `sum_i coeffs[i] e_i` in the sample's frame.
    pub fn geodesic(&self, index: usize, coeffs: &[f64], t: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        let sample = self
            .samples
            .get(index)
            .ok_or_else(|| Error::Parameter(format!("no sample {index}")))?;
        if coeffs.len() != sample.tangent_frame.len() {
            return Err(Error::Dimension(format!(
                "expected {} frame coefficients, got {}",
                sample.tangent_frame.len(),
                coeffs.len()
            )));
        }
        let mut velocity = vec![0.0; self.embedding.ambient];
        for (c, e) in coeffs.iter().zip(&sample.tangent_frame) {
            for (v, ei) in velocity.iter_mut().zip(e) {
                *v += c * ei;
            }
        }
        let omegas: Vec<Vec<f64>> = self
            .embedding
            .factors
            .iter()
            .zip(self.embedding.omegas(&sample.x))
            .map(|(f, w)| {
                let block = &velocity[f.offset..f.offset + f.dim + 1];
                let speed = dot(block, block).sqrt();
                if speed == 0.0 {
                    return w;
                }
                let angle = speed * t / f.radius;
                let (sn, cs) = angle.sin_cos();
                w.iter().zip(block).map(|(wi, vi)| cs * wi + sn * vi / speed).collect()
            })
            .collect();
        Ok(self.embedding.point(&omegas))
    }

    pub fn to_json(&self) -> String {
        let doc = SampleDocument {
            model: self.model,
            samples: self
                .samples
                .iter()
                .map(|s| SampleRecord {
                    x: s.x.clone(),
                    normal: s.normal.clone(),
                    w: s.weight,
                    k: s.shape.clone(),
                })
                .collect(),
        };
        serde_json::to_string(&doc).expect("sample document serializes")
    }

    /// Reads a sample document. Positions must lie on the model, normals must
    /// match the model's normal field and curvatures must match its shape
    /// operator; frames are rebuilt from the positions.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SampleDocument =
            serde_json::from_str(text).map_err(|e| Error::Parameter(format!("invalid sample document: {e}")))?;
        doc.model.validate()?;
        let embedding = Embedding::of(&doc.model);
        let shape = doc.model.principal_curvatures().as_slice().to_vec();
        let n = doc.model.n();
        let mut samples = Vec::with_capacity(doc.samples.len());
        for (i, rec) in doc.samples.into_iter().enumerate() {
            if rec.x.len() != n + 2 || rec.normal.len() != n + 2 || rec.k.len() != n {
                return Err(Error::Dimension(format!("sample {i} has wrong field lengths")));
            }
            if !(rec.w > 0.0 && rec.w.is_finite()) {
                return Err(Error::Parameter(format!("sample {i} has weight {}", rec.w)));
            }
            let (x, normal) = embedding.point(&embedding.omegas(&rec.x));
            let off = |a: &[f64], b: &[f64]| a.iter().zip(b).any(|(u, v)| (u - v).abs() > IMPORT_TOL);
            if off(&x, &rec.x) || off(&normal, &rec.normal) || off(&shape, &rec.k) {
                return Err(Error::Parameter(format!("sample {i} does not lie on the model")));
            }
            let tangent_frame = embedding.frame(&rec.x);
            samples.push(Sample {
                x: rec.x,
                normal: rec.normal,
                weight: rec.w,
                tangent_frame,
                shape: rec.k,
            });
        }
        Ok(Self::assemble(doc.model, embedding, samples))
    }
}
