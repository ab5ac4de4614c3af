//! Monte Carlo estimates of logical error rates by sampling Pauli errors.
//!
//! Each shot draws an X flip with probability `p_x` and a Z flip with
//! probability `p_z` on every qubit. Shots with a nontrivial syndrome are
//! discarded (the detect-and-reset rule); the rest are counted as logical
//! errors when they anticommute with some logical representative. For
//! Clifford encoding circuits with Pauli noise these statistics are the same
//! as those of the full prepare-encode-idle-decode-measure circuit, so no
//! circuit is simulated.
//!
//! Shots are split into fixed-size chunks; chunk `c` draws from stream `c`
//! of a ChaCha8 generator seeded with `seed`, so counts depend only on the
//! seed and never on the thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::code::StabilizerCode;
use crate::enumerator::{ErrorRates, NoiseModel};
use crate::error::{Error, Result};
use crate::gf2::PauliString;
use crate::parallel::{fold_chunks, Parallelism};

pub const CHUNK_SHOTS: u64 = 1 << 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McResult {
    pub shots: u64,
    pub n_trivial_syndrome: u64,
    pub n_logical_error: u64,
    pub p_l_hat: f64,
    /// `N_L / N_{s=0}`; `None` when no shot had a trivial syndrome.
    pub p_l_norm_hat: Option<f64>,
    pub seed: u64,
    pub noise: NoiseModel,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<ErrorRates>,
}

impl McResult {
    pub fn p_s0_hat(&self) -> f64 {
        self.n_trivial_syndrome as f64 / self.shots as f64
    }

    pub fn with_exact(mut self, rates: ErrorRates) -> Self {
        self.exact = Some(rates);
        self
    }
}

/// Stabilizer and logical rows as packed words for the inner loop.
struct Frame {
    n: usize,
    words: usize,
    stabilizers: Vec<(Vec<u64>, Vec<u64>)>,
    logicals: Vec<(Vec<u64>, Vec<u64>)>,
}

impl Frame {
    fn new(code: &StabilizerCode) -> Self {
        let pack = |p: &PauliString| (p.x_words().to_vec(), p.z_words().to_vec());
        Frame {
            n: code.n(),
            words: code.n().div_ceil(64).max(1),
            stabilizers: code.stabilizer().rows().iter().map(pack).collect(),
            logicals: code.logicals().iter().map(pack).collect(),
        }
    }

    fn anticommutes(ex: &[u64], ez: &[u64], row: &(Vec<u64>, Vec<u64>)) -> bool {
        let mut parity = 0u32;
        for w in 0..ex.len() {
            parity ^= (ex[w] & row.1[w]).count_ones() ^ (ez[w] & row.0[w]).count_ones();
        }
        parity & 1 == 1
    }

    /// `None` for a nontrivial syndrome, otherwise the bitmask of logical
    /// representatives the error anticommutes with.
    fn classify(&self, ex: &[u64], ez: &[u64]) -> Option<u64> {
        if self.stabilizers.iter().any(|r| Self::anticommutes(ex, ez, r)) {
            return None;
        }
        let mut mask = 0u64;
        for (i, l) in self.logicals.iter().enumerate() {
            if Self::anticommutes(ex, ez, l) {
                mask |= 1 << i;
            }
        }
        Some(mask)
    }
}

/// Logical action of `error`: `None` if it has a nontrivial syndrome, else a
/// bitmask over `code.logicals()` of the representatives it anticommutes
/// with. Zero means the error acts trivially.
pub fn classify(code: &StabilizerCode, error: &PauliString) -> Option<u64> {
    Frame::new(code).classify(error.x_words(), error.z_words())
}

#[derive(Clone, Copy, Default)]
struct Counts {
    trivial: u64,
    logical: u64,
}

fn run_chunk(frame: &Frame, noise: &NoiseModel, seed: u64, chunk: u64, shots: u64) -> Counts {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    let mut ex = vec![0u64; frame.words];
    let mut ez = vec![0u64; frame.words];
    let mut c = Counts::default();
    for _ in 0..shots {
        ex.fill(0);
        ez.fill(0);
        for q in 0..frame.n {
            if rng.gen_bool(noise.p_x) {
                ex[q / 64] |= 1 << (q % 64);
            }
            if rng.gen_bool(noise.p_z) {
                ez[q / 64] |= 1 << (q % 64);
            }
        }
        if let Some(mask) = frame.classify(&ex, &ez) {
            c.trivial += 1;
            if mask != 0 {
                c.logical += 1;
            }
        }
    }
    c
}

pub fn estimate(
    code: &StabilizerCode,
    noise: &NoiseModel,
    shots: u64,
    seed: u64,
    par: Parallelism,
) -> Result<McResult> {
    if shots == 0 {
        return Err(Error::InvalidConfig("shots must be >= 1".into()));
    }
    let noise = NoiseModel::new(noise.p_x, noise.p_z)?;
    let frame = Frame::new(code);
    let chunks = shots.div_ceil(CHUNK_SHOTS);
    let counts = fold_chunks(
        par,
        chunks as usize,
        Counts::default,
        |acc, c| {
            let c = c as u64;
            let len = CHUNK_SHOTS.min(shots - c * CHUNK_SHOTS);
            let r = run_chunk(&frame, &noise, seed, c, len);
            Counts {
                trivial: acc.trivial + r.trivial,
                logical: acc.logical + r.logical,
            }
        },
        |a, b| Counts {
            trivial: a.trivial + b.trivial,
            logical: a.logical + b.logical,
        },
    );
    Ok(McResult {
        shots,
        n_trivial_syndrome: counts.trivial,
        n_logical_error: counts.logical,
        p_l_hat: counts.logical as f64 / shots as f64,
        p_l_norm_hat: (counts.trivial > 0).then(|| counts.logical as f64 / counts.trivial as f64),
        seed,
        noise,
        exact: None,
    })
}
