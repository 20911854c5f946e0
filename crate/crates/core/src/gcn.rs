//! A two-layer graph convolutional network with a logistic head, its exact
//! backward pass, BCE loss, and an Adam optimizer.
//!
//! ```text
//! H1 = act(Â X W1)
//! p  = σ(Â H1 W2)
//! ```
//!
//! `Â = D̃^{-1/2} (A + I) D̃^{-1/2}` is the self-loop augmented, symmetrically
//! normalized adjacency. No bias terms.

use ndarray::{Array1, Array2, Axis};
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng;

pub const MODEL_FORMAT_VERSION: u32 = 1;
pub const DEFAULT_HIDDEN: usize = 64;
pub const BCE_EPSILON: f64 = 1e-7;

/// Sparse symmetric `Â` in CSR form.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalizedAdjacency {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl NormalizedAdjacency {
    pub fn new(g: &Graph) -> Self {
        let n = g.num_vertices();
        let self_loop_degree: Vec<f64> = (0..n).map(|v| (g.degree(v) + 1) as f64).collect();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::with_capacity(n + 2 * g.num_edges());
        let mut vals = Vec::with_capacity(n + 2 * g.num_edges());
        row_ptr.push(0);
        for i in 0..n {
            let nbrs = g.neighbors(i);
            let split = nbrs.partition_point(|&j| j < i);
            let row = nbrs[..split]
                .iter()
                .chain(std::iter::once(&i))
                .chain(&nbrs[split..]);
            for &j in row {
                cols.push(j);
                vals.push(1.0 / (self_loop_degree[i] * self_loop_degree[j]).sqrt());
            }
            row_ptr.push(cols.len());
        }
        NormalizedAdjacency {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `Â · m` for an `n × c` dense matrix.
    pub fn apply(&self, m: &Array2<f64>) -> Array2<f64> {
        assert_eq!(m.nrows(), self.n, "operand rows must match Â");
        let mut out = Array2::zeros(m.raw_dim());
        for i in 0..self.n {
            let mut row = out.row_mut(i);
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                row.scaled_add(self.vals[k], &m.row(self.cols[k]));
            }
        }
        out
    }

    pub fn apply_vec(&self, v: &Array1<f64>) -> Array1<f64> {
        assert_eq!(v.len(), self.n, "operand length must match Â");
        Array1::from_shape_fn(self.n, |i| {
            (self.row_ptr[i]..self.row_ptr[i + 1])
                .map(|k| self.vals[k] * v[self.cols[k]])
                .sum()
        })
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let mut d = Array2::zeros((self.n, self.n));
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                d[[i, self.cols[k]]] = self.vals[k];
            }
        }
        d
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Tanh,
    /// No inter-layer nonlinearity.
    None,
}

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::Tanh => z.tanh(),
            Activation::None => z,
        }
    }

    /// Derivative expressed through the pre-activation `z` and output `a`.
    fn derivative(self, z: f64, a: f64) -> f64 {
        match self {
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => 1.0 - a * a,
            Activation::None => 1.0,
        }
    }
}

impl std::str::FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "relu" => Ok(Activation::Relu),
            "tanh" => Ok(Activation::Tanh),
            "none" => Ok(Activation::None),
            other => Err(Error::InvalidParameter(format!(
                "unknown activation `{other}`"
            ))),
        }
    }
}

pub fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GcnModel {
    /// `input_dim × hidden`.
    pub w1: Array2<f64>,
    /// `hidden × 1`.
    pub w2: Array2<f64>,
    pub hidden_act: Activation,
    pub seed: u64,
}

/// Intermediates of one forward pass.
#[derive(Clone, Debug)]
pub struct ForwardCache {
    ax: Array2<f64>,
    z1: Array2<f64>,
    h1: Array2<f64>,
    ah1: Array2<f64>,
    p: Array1<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gradients {
    pub w1: Array2<f64>,
    pub w2: Array2<f64>,
}

impl GcnModel {
    /// Glorot-uniform weights drawn from the seeded stream, `W1` first.
    pub fn init(input_dim: usize, hidden: usize, hidden_act: Activation, seed: u64) -> Result<Self> {
        if input_dim == 0 || hidden == 0 {
            return Err(Error::InvalidParameter(format!(
                "layer sizes must be positive (input {input_dim}, hidden {hidden})"
            )));
        }
        let mut rng = rng::from_seed(seed);
        let mut glorot = |rows: usize, cols: usize| {
            let bound = (6.0 / (rows + cols) as f64).sqrt();
            Array2::from_shape_simple_fn((rows, cols), || rng.gen_range(-bound..=bound))
        };
        let w1 = glorot(input_dim, hidden);
        let w2 = glorot(hidden, 1);
        Ok(GcnModel {
            w1,
            w2,
            hidden_act,
            seed,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.w1.nrows()
    }

    pub fn hidden(&self) -> usize {
        self.w1.ncols()
    }

    pub fn forward(&self, adj: &NormalizedAdjacency, x: &Array2<f64>) -> Result<(Vec<f64>, ForwardCache)> {
        if x.nrows() != adj.len() {
            return Err(Error::Dimension {
                expected: adj.len(),
                got: x.nrows(),
            });
        }
        if x.ncols() != self.input_dim() {
            return Err(Error::Dimension {
                expected: self.input_dim(),
                got: x.ncols(),
            });
        }
        let ax = adj.apply(x);
        let z1 = ax.dot(&self.w1);
        let act = self.hidden_act;
        let h1 = z1.mapv(|z| act.apply(z));
        let ah1 = adj.apply(&h1);
        let z2 = ah1.dot(&self.w2).remove_axis(Axis(1));
        let p = z2.mapv(logistic);
        if !p.iter().all(|v| v.is_finite()) || !z1.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite {
                context: "forward pass".into(),
            });
        }
        let out = p.to_vec();
        Ok((out, ForwardCache { ax, z1, h1, ah1, p }))
    }

    /// Reverse-mode gradients of a loss `L(p)` given `dL/dp`.
    pub fn backward(&self, adj: &NormalizedAdjacency, cache: &ForwardCache, dl_dp: &[f64]) -> Result<Gradients> {
        self.backward_with_input(adj, cache, dl_dp).map(|(g, _)| g)
    }

    /// Like [`GcnModel::backward`], also returning `dL/dX` for trainable
    /// node embeddings.
    pub fn backward_with_input(
        &self,
        adj: &NormalizedAdjacency,
        cache: &ForwardCache,
        dl_dp: &[f64],
    ) -> Result<(Gradients, Array2<f64>)> {
        if dl_dp.len() != cache.p.len() {
            return Err(Error::Dimension {
                expected: cache.p.len(),
                got: dl_dp.len(),
            });
        }
        if cache.h1.ncols() != self.hidden() || cache.ax.ncols() != self.input_dim() {
            return Err(Error::Dimension {
                expected: self.hidden(),
                got: cache.h1.ncols(),
            });
        }
        let dz2 = Array1::from_shape_fn(dl_dp.len(), |i| {
            let p = cache.p[i];
            dl_dp[i] * p * (1.0 - p)
        });
        let dz2_col = dz2.insert_axis(Axis(1));
        let dw2 = cache.ah1.t().dot(&dz2_col);
        // dH1 = Âᵀ dZ2 W2ᵀ, and Â is symmetric.
        let dh1 = adj.apply(&dz2_col.dot(&self.w2.t()));
        let act = self.hidden_act;
        let mut dz1 = dh1;
        ndarray::Zip::from(&mut dz1)
            .and(&cache.z1)
            .and(&cache.h1)
            .for_each(|d, &z, &a| *d *= act.derivative(z, a));
        let dw1 = cache.ax.t().dot(&dz1);
        let dx = adj.apply(&dz1.dot(&self.w1.t()));
        Ok((Gradients { w1: dw1, w2: dw2 }, dx))
    }

    pub fn to_file(&self, metadata: TrainingMetadata) -> ModelFile {
        ModelFile {
            format_version: MODEL_FORMAT_VERSION,
            input_dim: self.input_dim(),
            hidden: self.hidden(),
            activation: self.hidden_act,
            seed: self.seed,
            w1: self.w1.iter().copied().collect(),
            w2: self.w2.iter().copied().collect(),
            metadata,
        }
    }

    pub fn from_file(file: &ModelFile) -> Result<Self> {
        if file.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::InvalidParameter(format!(
                "unsupported model format version {}",
                file.format_version
            )));
        }
        let w1 = Array2::from_shape_vec((file.input_dim, file.hidden), file.w1.clone()).map_err(|_| {
            Error::Dimension {
                expected: file.input_dim * file.hidden,
                got: file.w1.len(),
            }
        })?;
        let w2 = Array2::from_shape_vec((file.hidden, 1), file.w2.clone()).map_err(|_| Error::Dimension {
            expected: file.hidden,
            got: file.w2.len(),
        })?;
        if !w1.iter().chain(w2.iter()).all(|v| v.is_finite()) {
            return Err(Error::NonFinite {
                context: "model parameters".into(),
            });
        }
        Ok(GcnModel {
            w1,
            w2,
            hidden_act: file.activation,
            seed: file.seed,
        })
    }
}

/// Column matrix from scalar node features.
pub fn feature_matrix(values: &[f64]) -> Array2<f64> {
    Array2::from_shape_vec((values.len(), 1), values.to_vec()).expect("column shape")
}

/// Mean binary cross-entropy with `p` clamped to `[ε, 1-ε]`, and its
/// gradient with respect to the unclamped `p`.
pub fn bce_loss(p: &[f64], y: &[f64]) -> Result<(f64, Vec<f64>)> {
    if p.len() != y.len() {
        return Err(Error::Dimension {
            expected: p.len(),
            got: y.len(),
        });
    }
    if p.is_empty() {
        return Err(Error::InvalidParameter("BCE over zero nodes".into()));
    }
    let n = p.len() as f64;
    let mut loss = 0.0;
    let mut grad = Vec::with_capacity(p.len());
    for (&pi, &yi) in p.iter().zip(y) {
        let clamped = pi.clamp(BCE_EPSILON, 1.0 - BCE_EPSILON);
        loss -= yi * clamped.ln() + (1.0 - yi) * (1.0 - clamped).ln();
        let g = if clamped == pi {
            (-yi / pi + (1.0 - yi) / (1.0 - pi)) / n
        } else {
            0.0
        };
        grad.push(g);
    }
    Ok((loss / n, grad))
}

/// Adam with bias correction over a fixed list of matrix parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct Adam {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    step: u64,
    moments: Vec<(Array2<f64>, Array2<f64>)>,
}

impl Adam {
    /// Optimizer for `W1` and `W2` of `model`.
    pub fn new(model: &GcnModel, lr: f64) -> Self {
        Self::for_shapes(&[model.w1.dim(), model.w2.dim()], lr)
    }

    pub fn for_shapes(shapes: &[(usize, usize)], lr: f64) -> Self {
        Adam {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            step: 0,
            moments: shapes
                .iter()
                .map(|&s| (Array2::zeros(s), Array2::zeros(s)))
                .collect(),
        }
    }

    pub fn steps_taken(&self) -> u64 {
        self.step
    }

    pub fn step(&mut self, model: &mut GcnModel, grads: &Gradients) -> Result<()> {
        self.step_params(&mut [&mut model.w1, &mut model.w2], &[&grads.w1, &grads.w2])
    }

    /// One update of every parameter; `params` and `grads` follow the
    /// order the optimizer was built with.
    pub fn step_params(&mut self, params: &mut [&mut Array2<f64>], grads: &[&Array2<f64>]) -> Result<()> {
        let shapes_match = params.len() == self.moments.len()
            && grads.len() == self.moments.len()
            && params
                .iter()
                .zip(grads)
                .zip(&self.moments)
                .all(|((p, g), (m, _))| p.dim() == m.dim() && g.dim() == m.dim());
        if !shapes_match {
            return Err(Error::Dimension {
                expected: self.moments.iter().map(|(m, _)| m.len()).sum(),
                got: grads.iter().map(|g| g.len()).sum(),
            });
        }
        if !grads.iter().all(|g| g.iter().all(|v| v.is_finite())) {
            return Err(Error::NonFinite {
                context: "optimizer gradient".into(),
            });
        }
        self.step += 1;
        let t = self.step as i32;
        let (b1, b2, eps, lr) = (self.beta1, self.beta2, self.eps, self.lr);
        let c1 = 1.0 - b1.powi(t);
        let c2 = 1.0 - b2.powi(t);
        for ((param, grad), (m, v)) in params.iter_mut().zip(grads).zip(&mut self.moments) {
            ndarray::Zip::from(&mut **param)
                .and(*grad)
                .and(m)
                .and(v)
                .for_each(|w, &g, m, v| {
                    *m = b1 * *m + (1.0 - b1) * g;
                    *v = b2 * *v + (1.0 - b2) * g * g;
                    *w -= lr * (*m / c1) / ((*v / c2).sqrt() + eps);
                });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainingMetadata {
    pub dataset: Option<String>,
    pub epochs: usize,
    pub final_bce: Option<f64>,
    pub learning_rate: f64,
    pub train_graphs: usize,
}

/// Versioned JSON model document; weights are row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format_version: u32,
    pub input_dim: usize,
    pub hidden: usize,
    pub activation: Activation,
    pub seed: u64,
    pub w1: Vec<f64>,
    pub w2: Vec<f64>,
    pub metadata: TrainingMetadata,
}
