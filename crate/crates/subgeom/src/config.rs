//! Central tolerance/sampling configuration and the deterministic sampler.
//!
//! Every threshold used anywhere in the crate lives here so that a run is
//! fully described by one record. Defaults match the differencing scheme:
//! first derivatives are exact (dual numbers), second derivatives go
//! through central finite differences, hence the looser `tol_second`.

use nalgebra::DVector;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::geometry::ChartManifold;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Config {
    /// Tolerance for identities involving first derivatives.
    pub tol_first: f64,
    /// Tolerance for identities involving second derivatives.
    pub tol_second: f64,
    /// Tolerance for purely algebraic (derivative-free) identities.
    pub tol_algebraic: f64,
    /// Tolerance for frame orthonormality and projector residuals.
    pub tol_frame: f64,
    /// Anti-invariance residual tolerance on unit vectors.
    pub tol_anti_invariant: f64,
    /// Relative singular-value threshold for rank decisions.
    pub rank_rel_threshold: f64,
    /// Condition-number guard for metric inversion.
    pub cond_max: f64,
    /// Base step for central finite differences: h = fd_step * (1 + |x|).
    pub fd_step: f64,
    /// Curve parameter step for the pullback-connection stencil.
    pub curve_step: f64,
    /// Number of sample points per check.
    pub samples: usize,
    /// RNG seed for point/vector sampling.
    pub seed: u64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            tol_first: 1e-5,
            tol_second: 1e-4,
            tol_algebraic: 1e-8,
            tol_frame: 1e-10,
            tol_anti_invariant: 1e-7,
            rank_rel_threshold: 1e-8,
            cond_max: 1e12,
            fd_step: 1e-5,
            curve_step: 1e-4,
            samples: 200,
            seed: 42,
        }
    }
}

impl Config {
    pub fn step_at(&self, coord: f64) -> f64 {
        self.fd_step * (1.0 + coord.abs())
    }

    /// Margin kept between samples and the domain boundary so that all
    /// stencils stay inside the box.
    pub fn margin(&self, coord_scale: f64) -> f64 {
        10.0 * self.fd_step * (1.0 + coord_scale.abs())
    }

    pub fn sampler(&self) -> Sampler {
        Sampler::new(self.seed, self.clone())
    }
}

/// Seeded pseudo-random sampler, uniform in the margin-shrunk domain box.
pub struct Sampler {
    rng: ChaCha8Rng,
    config: Config,
}

impl Sampler {
    pub fn new(seed: u64, config: Config) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed), config }
    }

    pub fn point(&mut self, m: &ChartManifold) -> DVector<f64> {
        let mut coords = DVector::zeros(m.dim);
        for i in 0..m.dim {
            let scale = m.domain.lo[i].abs().max(m.domain.hi[i].abs());
            let margin = self.config.margin(scale);
            let lo = m.domain.lo[i] + margin;
            let hi = m.domain.hi[i] - margin;
            coords[i] = self.rng.gen_range(lo..hi);
        }
        coords
    }

    /// Random tangent components, uniform in [-1, 1]^dim.
    pub fn vector(&mut self, dim: usize) -> DVector<f64> {
        DVector::from_fn(dim, |_, _| self.rng.gen_range(-1.0..1.0))
    }
}
