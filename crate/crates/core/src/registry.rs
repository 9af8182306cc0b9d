//! Name-based lookup of interchangeable strategies: Pólya weights, random
//! matrix ensembles and covariance kernels.
//!
//! Each family maps a registry name to a factory producing a trait object, so
//! front ends can select strategies from configuration and downstream code can
//! register additional implementations.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::curves::CurvePair;
use crate::error::{Error, Result};
use crate::gaussian_field::{CovarianceKernel, InducedKernel, UserGridKernel};
use crate::polya::{HatWeight, MBParams, PolyaWeight};
use crate::winding::{Ensemble, GinueEnsemble, MbEnsemble};

/// Parameters shared by weight and ensemble factories.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleParams {
    pub gamma: f64,
    pub delta: f64,
    pub n: usize,
}

/// Input from which a covariance kernel is built.
#[derive(Debug, Clone)]
pub enum KernelSource {
    /// The kernel induced by a pair of parameter functions.
    Curve(CurvePair),
    /// Values and first-slot derivatives on a uniform `m × m` grid (row major).
    Grid {
        m: usize,
        values: Vec<Complex64>,
        derivatives: Vec<Complex64>,
    },
}

pub type WeightFactory = fn(&EnsembleParams) -> Result<Box<dyn PolyaWeight>>;
pub type EnsembleFactory = fn(&EnsembleParams) -> Result<Box<dyn Ensemble>>;
pub type KernelFactory = fn(&KernelSource) -> Result<Box<dyn CovarianceKernel>>;

/// Registry of the three strategy families.
#[derive(Clone)]
pub struct Registry {
    weights: BTreeMap<&'static str, WeightFactory>,
    ensembles: BTreeMap<&'static str, EnsembleFactory>,
    kernels: BTreeMap<&'static str, KernelFactory>,
}

fn hat_weight(p: &EnsembleParams) -> Result<HatWeight> {
    HatWeight::new(MBParams::new(p.gamma, p.delta)?, p.n)
}

fn mb_weight_factory(p: &EnsembleParams) -> Result<Box<dyn PolyaWeight>> {
    Ok(Box::new(hat_weight(p)?))
}

fn ginue_factory(p: &EnsembleParams) -> Result<Box<dyn Ensemble>> {
    if p.gamma != 1.0 || p.delta != 0.0 {
        return Err(Error::Config(format!(
            "ensemble 'ginue' requires gamma = 1 and delta = 0, got ({}, {})",
            p.gamma, p.delta
        )));
    }
    if p.n == 0 {
        return Err(Error::Config("matrix size must be positive".into()));
    }
    Ok(Box::new(GinueEnsemble { n: p.n }))
}

fn mb_ensemble_factory(p: &EnsembleParams) -> Result<Box<dyn Ensemble>> {
    Ok(Box::new(MbEnsemble { weight: hat_weight(p)? }))
}

fn induced_factory(src: &KernelSource) -> Result<Box<dyn CovarianceKernel>> {
    match src {
        KernelSource::Curve(c) => Ok(Box::new(InducedKernel::new(c.clone()))),
        KernelSource::Grid { .. } => Err(Error::Config("kernel 'induced' needs a curve".into())),
    }
}

fn user_grid_factory(src: &KernelSource) -> Result<Box<dyn CovarianceKernel>> {
    match src {
        KernelSource::Grid { m, values, derivatives } => Ok(Box::new(UserGridKernel::new(*m, values.clone(), derivatives.clone())?)),
        KernelSource::Curve(_) => Err(Error::Config("kernel 'user-grid' needs tabulated values".into())),
    }
}

fn lookup<'a, F>(family: &str, map: &'a BTreeMap<&'static str, F>, name: &str) -> Result<&'a F> {
    map.get(name).ok_or_else(|| {
        let known: Vec<&str> = map.keys().copied().collect();
        Error::Config(format!("unknown {family} '{name}' (known: {})", known.join(", ")))
    })
}

impl Registry {
    /// An empty registry.
    pub fn empty() -> Self {
        Registry {
            weights: BTreeMap::new(),
            ensembles: BTreeMap::new(),
            kernels: BTreeMap::new(),
        }
    }

    /// The shipped strategies: weight `mb`; ensembles `ginue`, `mb`; kernels
    /// `induced`, `user-grid`.
    pub fn builtin() -> Self {
        let mut r = Registry::empty();
        r.register_weight("mb", mb_weight_factory);
        r.register_ensemble("ginue", ginue_factory);
        r.register_ensemble("mb", mb_ensemble_factory);
        r.register_kernel("induced", induced_factory);
        r.register_kernel("user-grid", user_grid_factory);
        r
    }

    pub fn register_weight(&mut self, name: &'static str, f: WeightFactory) {
        self.weights.insert(name, f);
    }
    pub fn register_ensemble(&mut self, name: &'static str, f: EnsembleFactory) {
        self.ensembles.insert(name, f);
    }
    pub fn register_kernel(&mut self, name: &'static str, f: KernelFactory) {
        self.kernels.insert(name, f);
    }

    /// # Errors
    /// Configuration error for an unknown name; factory errors are propagated.
    pub fn weight(&self, name: &str, params: &EnsembleParams) -> Result<Box<dyn PolyaWeight>> {
        lookup("weight", &self.weights, name)?(params)
    }
    /// # Errors
    /// Configuration error for an unknown name; factory errors are propagated.
    pub fn ensemble(&self, name: &str, params: &EnsembleParams) -> Result<Box<dyn Ensemble>> {
        lookup("ensemble", &self.ensembles, name)?(params)
    }
    /// # Errors
    /// Configuration error for an unknown name; factory errors are propagated.
    pub fn kernel(&self, name: &str, source: &KernelSource) -> Result<Box<dyn CovarianceKernel>> {
        lookup("kernel", &self.kernels, name)?(source)
    }

    pub fn weight_names(&self) -> Vec<&'static str> {
        self.weights.keys().copied().collect()
    }
    pub fn ensemble_names(&self) -> Vec<&'static str> {
        self.ensembles.keys().copied().collect()
    }
    pub fn kernel_names(&self) -> Vec<&'static str> {
        self.kernels.keys().copied().collect()
    }
}

impl Default for Registry {
    fn default() -> Self {
        Registry::builtin()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::example_curve;

    #[test]
    fn builtin_names_round_trip() {
        let r = Registry::builtin();
        assert_eq!(r.weight_names(), vec!["mb"]);
        assert_eq!(r.ensemble_names(), vec!["ginue", "mb"]);
        assert_eq!(r.kernel_names(), vec!["induced", "user-grid"]);
        let p = EnsembleParams { gamma: 2.0, delta: 0.5, n: 4 };
        assert_eq!(r.weight("mb", &p).unwrap().name(), "mb");
        assert_eq!(r.ensemble("mb", &p).unwrap().n(), 4);
        let g = EnsembleParams { gamma: 1.0, delta: 0.0, n: 3 };
        assert_eq!(r.ensemble("ginue", &g).unwrap().name(), "ginue");
        let k = r.kernel("induced", &KernelSource::Curve(example_curve())).unwrap();
        assert_eq!(k.name(), "induced");
    }

    #[test]
    fn lookup_failures_are_config_errors() {
        let r = Registry::builtin();
        let p = EnsembleParams { gamma: 2.0, delta: 0.5, n: 4 };
        assert!(matches!(r.ensemble("gue", &p), Err(Error::Config(_))));
        assert!(matches!(r.ensemble("ginue", &p), Err(Error::Config(_))));
        assert!(matches!(r.kernel("user-grid", &KernelSource::Curve(example_curve())), Err(Error::Config(_))));
        assert!(r.weight("mb", &EnsembleParams { gamma: -1.0, delta: 0.0, n: 2 }).is_err());
    }
}
