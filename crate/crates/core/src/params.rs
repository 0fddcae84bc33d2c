//! Pipeline parameters and their defaults.

use crate::error::Error;
use crate::geom::Point3;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

/// Sizing field bounding the largest allowed ball radius.
#[derive(Clone)]
pub enum Sizing {
    /// No upper bound beyond what the geometry dictates.
    Infinite,
    /// Uniform bound.
    Constant(f64),
    /// Spatially varying bound.
    Field(Arc<dyn Fn(Point3) -> f64 + Send + Sync>),
}

impl Sizing {
    pub fn at(&self, p: Point3) -> f64 {
        match self {
            Sizing::Infinite => f64::INFINITY,
            Sizing::Constant(s) => *s,
            Sizing::Field(f) => f(p),
        }
    }
}

impl fmt::Debug for Sizing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sizing::Infinite => write!(f, "Sizing::Infinite"),
            Sizing::Constant(s) => write!(f, "Sizing::Constant({s})"),
            Sizing::Field(_) => write!(f, "Sizing::Field(..)"),
        }
    }
}

/// All tunables of the pipeline.
#[derive(Clone, Debug)]
pub struct Parameters {
    /// Sharp-feature angle threshold, radians, must be below pi/2.
    pub theta_sharp: f64,
    /// Lipschitz bound on radius variation within a ball type class, in (0,1).
    pub lipschitz: f64,
    /// Sizing field.
    pub sizing: Sizing,
    /// Deep-coverage constant in (0,1).
    pub alpha: f64,
    /// Seed for all randomized stages.
    pub rng_seed: u64,
    /// Dihedral threshold for adaptive subdivision, radians.
    pub smoothing_dihedral_threshold: f64,
    /// Maximum adaptive subdivision rounds.
    pub smoothing_iterations: u32,
    /// Consecutive misses before the active pool subdivides.
    pub miss_limit: u32,
    /// Probability of rejecting a sample whose ball would contain an
    /// existing sample.
    pub density_rejection_prob: f64,
    /// Iteration cap for sliver elimination before safe mode kicks in.
    pub max_sliver_iterations: u32,
    /// Start directly in safe mode (coverage alpha halved).
    pub safe_mode: bool,
    /// Supersample count for the crease boundary tree.
    pub crease_supersamples: usize,
    /// Supersample count for the surface boundary tree.
    pub surface_supersamples: usize,
}

impl Default for Parameters {
    fn default() -> Self {
        Parameters {
            theta_sharp: 60.0_f64.to_radians(),
            lipschitz: 0.25,
            sizing: Sizing::Infinite,
            alpha: 1.0 - 3.0_f64.sqrt() / 2.0,
            rng_seed: 0,
            smoothing_dihedral_threshold: 175.0_f64.to_radians(),
            smoothing_iterations: 6,
            miss_limit: 100,
            density_rejection_prob: 0.1,
            max_sliver_iterations: 100,
            safe_mode: false,
            crease_supersamples: 100_000,
            surface_supersamples: 1_000_000,
        }
    }
}

impl Parameters {
    /// Reduced supersampling profile for fast test runs.
    pub fn desk_profile() -> Self {
        Parameters {
            crease_supersamples: 10_000,
            surface_supersamples: 100_000,
            ..Parameters::default()
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !(self.theta_sharp > 0.0 && self.theta_sharp < PI / 2.0) {
            return Err(Error::InvalidParameter(format!(
                "theta_sharp must be in (0, pi/2), got {}",
                self.theta_sharp
            )));
        }
        if !(self.lipschitz > 0.0 && self.lipschitz < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "lipschitz must be in (0,1), got {}",
                self.lipschitz
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must be in (0,1), got {}",
                self.alpha
            )));
        }
        if let Sizing::Constant(s) = self.sizing {
            if !(s > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "sizing must be positive, got {s}"
                )));
            }
        }
        if !(0.0..=1.0).contains(&self.density_rejection_prob) {
            return Err(Error::InvalidParameter(
                "density_rejection_prob must be in [0,1]".into(),
            ));
        }
        if self.miss_limit == 0 {
            return Err(Error::InvalidParameter("miss_limit must be positive".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let p = Parameters::default();
        p.validate().unwrap();
        assert!((p.alpha - 0.1339746).abs() < 1e-6);
    }

    #[test]
    fn rejects_out_of_range() {
        let mut p = Parameters::default();
        p.theta_sharp = 2.0;
        assert!(p.validate().is_err());
        let mut p = Parameters::default();
        p.lipschitz = 1.0;
        assert!(p.validate().is_err());
    }
}
