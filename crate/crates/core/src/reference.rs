//! Published reference values shipped as `reference_values.json`.

use serde::{Deserialize, Serialize};

use crate::enumerator::NoiseModel;
use crate::error::Result;
use crate::fixtures;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PublishedRates {
    pub code: String,
    pub params: String,
    pub d_x: usize,
    pub d_z: usize,
    pub p_l: f64,
    pub p_l_norm: f64,
    /// Codes whose matrices are not shipped; listed for comparison only.
    #[serde(default)]
    pub external: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PublishedCounts {
    pub code: String,
    pub params: String,
    pub weights: Vec<usize>,
    pub counts: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PublishedEnumerator {
    pub code: String,
    pub which: String,
    pub min_weight: usize,
    /// Coefficients from `min_weight` upward.
    pub coefficients: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PublishedMonteCarlo {
    pub code: String,
    pub shots: u64,
    pub n_trivial_syndrome: u64,
    pub n_logical_error: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceValues {
    pub schema_version: u32,
    pub noise: NoiseModel,
    pub published_error_rates: Vec<PublishedRates>,
    pub published_logical_counts: Vec<PublishedCounts>,
    pub published_enumerators: Vec<PublishedEnumerator>,
    pub published_monte_carlo: Vec<PublishedMonteCarlo>,
}

impl ReferenceValues {
    pub fn load() -> Result<Self> {
        Ok(serde_json::from_str(&fixtures::read("reference_values.json")?)?)
    }

    pub fn rates(&self, code: &str) -> Option<&PublishedRates> {
        self.published_error_rates.iter().find(|r| r.code == code)
    }
}
