//! Per-command JSON configuration. Every field has a default, so a config
//! file only needs the values it changes; command-line flags are applied on
//! top.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use georay::experiments::{default_angles, standard_schemes, SweepParams};
use georay::geodesic::{Aabb, SeedRegion, TrackingParams};
use georay::io::Encoding;
use georay::phantom::{PhantomSpec, PresetKind, DEFAULT_EIGENVALUES};
use georay::tensor4::CrossingLayer;
use georay::tensor_core::MetricScheme;
use georay::tensor_field::InterpolationMethod;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

pub fn load<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading config {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing config {}", p.display()))
        }
    }
}

fn default_out() -> PathBuf {
    PathBuf::from("georay-out")
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhantomConfig {
    pub shape: PresetKind,
    /// Crossing angle in degrees, for `cross`.
    pub angle: f64,
    /// Replaces the preset geometry; seeds and target still come from the preset.
    pub phantom: Option<PhantomSpec>,
    pub noise: f64,
    pub rng_seed: u64,
    pub orders: Vec<u8>,
    pub n_gradients: usize,
    pub b: f64,
    #[serde(rename = "S0")]
    pub s0: f64,
    pub encoding: Encoding,
    #[serde(skip_serializing)]
    pub out: PathBuf,
}

impl Default for PhantomConfig {
    fn default() -> Self {
        Self {
            shape: PresetKind::Ushape,
            angle: 60.0,
            phantom: None,
            noise: 0.0,
            rng_seed: 42,
            orders: vec![2],
            n_gradients: 81,
            b: 1500.0,
            s0: 1.0,
            encoding: Encoding::Base64,
            out: default_out(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitConfig {
    pub signals: PathBuf,
    pub scheme: PathBuf,
    pub order: u8,
    pub encoding: Encoding,
    pub out: PathBuf,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            signals: PathBuf::from("signals.json"),
            scheme: PathBuf::from("scheme.json"),
            order: 2,
            encoding: Encoding::Base64,
            out: default_out(),
        }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrackConfig {
    /// Order-2 or order-4 field file.
    pub field: Option<PathBuf>,
    /// `preset.json` written by `phantom`: supplies seeds, target, crossing
    /// layers and the ground truth for angular deviation.
    pub preset: Option<PathBuf>,
    pub seeds: Option<SeedRegion>,
    pub target: Option<Aabb>,
    pub layers: Option<[CrossingLayer; 2]>,
    pub params: TrackingParams,
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CostProfileConfig {
    /// Unique entries (row-major upper triangle) of the endpoint tensors;
    /// both absent selects the built-in anisotropic to isotropic path.
    pub t1: Option<Vec<f64>>,
    pub t2: Option<Vec<f64>>,
    pub dim: usize,
    pub samples: usize,
    pub method: InterpolationMethod,
    pub schemes: Vec<MetricScheme>,
    /// Fiber eigenvalues for the isotropic-gap table.
    pub fiber: [f64; 3],
    pub out: PathBuf,
}

impl Default for CostProfileConfig {
    fn default() -> Self {
        Self {
            t1: None,
            t2: None,
            dim: 3,
            samples: 101,
            method: InterpolationMethod::LogEuclidean,
            schemes: standard_schemes(),
            fiber: DEFAULT_EIGENVALUES,
            out: default_out(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AngleSweepConfig {
    pub angles: Vec<f64>,
    pub sweep: SweepParams,
    pub out: PathBuf,
}

impl Default for AngleSweepConfig {
    fn default() -> Self {
        Self { angles: default_angles(), sweep: SweepParams::default(), out: default_out() }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlotConfig {
    pub field: Option<PathBuf>,
    pub tracks: Vec<PathBuf>,
    pub out: Option<PathBuf>,
}
