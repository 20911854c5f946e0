//! The MIS Hamiltonian as a sparse QUBO.
//!
//! The energy of a (relaxed) assignment `x ∈ [0,1]^n` is
//!
//! ```text
//! H(x) = -Σ_i r_i x_i + P Σ_{(i,j) ∈ E} x_i x_j
//! ```
//!
//! with per-node rewards `r_i = R · feature_i` and reward factor
//! `R = P |E| / |V|^n_exp`. With every reward equal to 1 this is the classic
//! MIS Hamiltonian.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

pub const DEFAULT_PENALTY: f64 = 2.0;
pub const DEFAULT_REWARD_EXPONENT: f64 = 1.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuboInstance {
    pub rewards: Vec<f64>,
    pub penalty: f64,
    pub edges: Vec<(usize, usize)>,
    pub reward_exponent: f64,
    pub reward_factor: f64,
}

/// `R = P |E| / |V|^n_exp`.
pub fn reward_factor(g: &Graph, penalty: f64, reward_exponent: f64) -> Result<f64> {
    if g.num_vertices() == 0 {
        return Err(Error::InvalidParameter("reward factor needs |V| >= 1".into()));
    }
    check_penalty(penalty)?;
    Ok(penalty * g.num_edges() as f64 / (g.num_vertices() as f64).powf(reward_exponent))
}

pub fn node_rewards(factor: f64, features: &[f64]) -> Vec<f64> {
    features.iter().map(|&x| factor * x).collect()
}

fn check_penalty(penalty: f64) -> Result<()> {
    if penalty > 0.0 && penalty.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "penalty must be positive, got {penalty}"
        )))
    }
}

impl QuboInstance {
    /// Modified Hamiltonian with rewards `R · features`.
    pub fn modified(
        g: &Graph,
        features: &[f64],
        penalty: f64,
        reward_exponent: f64,
    ) -> Result<Self> {
        expect_len(g.num_vertices(), features.len())?;
        let factor = reward_factor(g, penalty, reward_exponent)?;
        Ok(QuboInstance {
            rewards: node_rewards(factor, features),
            penalty,
            edges: g.edges().to_vec(),
            reward_exponent,
            reward_factor: factor,
        })
    }

    /// Classic Hamiltonian: every reward is 1.
    pub fn classic(g: &Graph, penalty: f64) -> Result<Self> {
        Self::with_rewards(g, vec![1.0; g.num_vertices()], penalty)
    }

    pub fn with_rewards(g: &Graph, rewards: Vec<f64>, penalty: f64) -> Result<Self> {
        expect_len(g.num_vertices(), rewards.len())?;
        check_penalty(penalty)?;
        Ok(QuboInstance {
            rewards,
            penalty,
            edges: g.edges().to_vec(),
            reward_exponent: 0.0,
            reward_factor: 1.0,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.rewards.len()
    }

    pub fn loss(&self, x: &[f64]) -> Result<f64> {
        expect_len(self.num_vars(), x.len())?;
        let reward: f64 = self.rewards.iter().zip(x).map(|(r, x)| r * x).sum();
        Ok(self.penalty_unchecked(x) - reward)
    }

    /// `∂H/∂x_i = -r_i + P Σ_{j ~ i} x_j`.
    pub fn grad(&self, x: &[f64]) -> Result<Vec<f64>> {
        expect_len(self.num_vars(), x.len())?;
        let mut g: Vec<f64> = self.rewards.iter().map(|r| -r).collect();
        for &(u, v) in &self.edges {
            g[u] += self.penalty * x[v];
            g[v] += self.penalty * x[u];
        }
        Ok(g)
    }

    /// The penalty part `P Σ_{(i,j) ∈ E} x_i x_j`.
    pub fn penalty_term(&self, x: &[f64]) -> Result<f64> {
        expect_len(self.num_vars(), x.len())?;
        Ok(self.penalty_unchecked(x))
    }

    fn penalty_unchecked(&self, x: &[f64]) -> f64 {
        self.penalty * self.edges.iter().map(|&(u, v)| x[u] * x[v]).sum::<f64>()
    }

    /// Energy of a binary assignment given as a selection mask.
    pub fn energy_of_set(&self, selected: &[bool]) -> Result<f64> {
        let x: Vec<f64> = selected.iter().map(|&s| f64::from(u8::from(s))).collect();
        self.loss(&x)
    }

    /// Upper-triangular dense `Q` with `xᵀQx = H(x)` on binary `x`.
    pub fn dense_q(&self) -> Vec<Vec<f64>> {
        let n = self.num_vars();
        let mut q = vec![vec![0.0; n]; n];
        for (i, &r) in self.rewards.iter().enumerate() {
            q[i][i] = -r;
        }
        for &(u, v) in &self.edges {
            q[u.min(v)][u.max(v)] = self.penalty;
        }
        q
    }
}

/// Unmodified MIS Hamiltonian `-Σ x_i + P Σ x_i x_j`.
pub fn classic_hamiltonian(g: &Graph, penalty: f64, x: &[f64]) -> Result<f64> {
    QuboInstance::classic(g, penalty)?.loss(x)
}

fn expect_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Dimension { expected, got })
    }
}
