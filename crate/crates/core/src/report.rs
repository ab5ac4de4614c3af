//! Error-rate and logical-count tables for the built-in codes.

use serde::{Deserialize, Serialize};

use crate::codelib;
use crate::enumerator::{EnumConfig, Enumerators, NoiseModel};
use crate::error::Result;
use crate::reference::{PublishedRates, ReferenceValues};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub code: String,
    pub n: usize,
    pub k: usize,
    pub d_x: Option<usize>,
    pub d_z: Option<usize>,
    pub p_l: f64,
    pub p_l_norm: f64,
    pub published: Option<PublishedRates>,
    /// `computed / published - 1`.
    pub rel_err_p_l: Option<f64>,
    pub rel_err_p_l_norm: Option<f64>,
}

/// Rates for every shipped code in the reference table.
pub fn error_rate_table(noise: &NoiseModel, cfg: &EnumConfig) -> Result<Vec<RateRow>> {
    let refs = ReferenceValues::load()?;
    let mut rows = Vec::new();
    for p in refs.published_error_rates.iter().filter(|p| !p.external) {
        let code = codelib::builtin(&p.code)?.code;
        let e = Enumerators::compute(&code, cfg)?;
        let d = e.distances();
        let r = e.error_rates(noise)?;
        let same_noise = *noise == refs.noise;
        rows.push(RateRow {
            code: p.code.clone(),
            n: e.n,
            k: e.k,
            d_x: d.d_x,
            d_z: d.d_z,
            p_l: r.p_l,
            p_l_norm: r.p_l_norm,
            rel_err_p_l: same_noise.then(|| r.p_l / p.p_l - 1.0),
            rel_err_p_l_norm: same_noise.then(|| r.p_l_norm / p.p_l_norm - 1.0),
            published: same_noise.then(|| p.clone()),
        });
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountRow {
    pub code: String,
    pub weights: Vec<usize>,
    pub counts: Vec<u64>,
    pub published: Vec<u64>,
}

/// Number of nontrivial logicals at the listed weights.
pub fn logical_count_table(cfg: &EnumConfig) -> Result<Vec<CountRow>> {
    let refs = ReferenceValues::load()?;
    refs.published_logical_counts
        .iter()
        .map(|p| {
            let code = codelib::builtin(&p.code)?.code;
            let c = Enumerators::compute(&code, cfg)?.c.scalar();
            Ok(CountRow {
                code: p.code.clone(),
                weights: p.weights.clone(),
                counts: p.weights.iter().map(|&w| c.get(w).copied().unwrap_or(0)).collect(),
                published: p.counts.clone(),
            })
        })
        .collect()
}
