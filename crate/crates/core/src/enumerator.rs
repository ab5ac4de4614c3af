//! Exact weight enumerators, the MacWilliams transform, distances and
//! logical error probabilities under independent X/Z noise.
//!
//! Histograms are indexed by `(w_x, w_z, w_total)`: `w_x` counts X and Y
//! sites, `w_z` counts Z and Y sites. The double enumerator is the
//! `(w_x, w_z)` marginal, the scalar one the `w_total` marginal.
//!
//! Groups are walked in Gray-code order, one generator multiplication per
//! element. The index space is split into a fixed number of contiguous
//! segments so parallel and sequential runs give identical counts.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::code::StabilizerCode;
use crate::error::{Error, Result};
use crate::gf2::PauliString;
use crate::parallel::{fold_chunks, Parallelism};

/// Default cap on `n - k` for exact enumeration.
pub const DEFAULT_CAP: usize = 26;

/// Largest generator count representable with `u64` counts.
const MAX_BITS: usize = 62;

const SEGMENTS_LOG2: usize = 8;

#[derive(Clone, Copy, Debug)]
pub struct EnumConfig {
    /// Maximum `n - k`; the normalizer may use `cap + 2k` generators.
    pub cap: usize,
    pub parallelism: Parallelism,
}

impl Default for EnumConfig {
    fn default() -> Self {
        EnumConfig {
            cap: DEFAULT_CAP,
            parallelism: Parallelism::default(),
        }
    }
}

/// Counts of group elements by `(w_x, w_z, w_total)`.
#[derive(Clone, PartialEq, Eq)]
pub struct WeightHistogram {
    n: usize,
    counts: Vec<u64>,
}

impl std::fmt::Debug for WeightHistogram {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_map()
            .entries(self.entries().map(|(wx, wz, wt, c)| ((wx, wz, wt), c)))
            .finish()
    }
}

impl WeightHistogram {
    pub fn zeros(n: usize) -> Self {
        WeightHistogram {
            n,
            counts: vec![0; (n + 1).pow(3)],
        }
    }

    #[inline]
    fn index(&self, wx: usize, wz: usize, wt: usize) -> usize {
        (wx * (self.n + 1) + wz) * (self.n + 1) + wt
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn get(&self, wx: usize, wz: usize, wt: usize) -> u64 {
        if wx > self.n || wz > self.n || wt > self.n {
            return 0;
        }
        self.counts[self.index(wx, wz, wt)]
    }

    pub fn add(&mut self, wx: usize, wz: usize, wt: usize, count: u64) {
        let i = self.index(wx, wz, wt);
        self.counts[i] += count;
    }

    /// Nonzero entries in `(w_x, w_z, w_total)` lexicographic order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, usize, u64)> + '_ {
        let m = self.n + 1;
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(move |(i, &c)| (i / (m * m), (i / m) % m, i % m, c))
    }

    pub fn to_map(&self) -> BTreeMap<(usize, usize, usize), u64> {
        self.entries()
            .map(|(a, b, c, n)| ((a, b, c), n))
            .collect()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn merge(mut self, other: &WeightHistogram) -> Self {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self
    }

    /// `self - other`; fails if any entry would go negative.
    pub fn checked_sub(&self, other: &WeightHistogram) -> Result<WeightHistogram> {
        if self.n != other.n {
            return Err(Error::LengthMismatch(self.n, other.n));
        }
        let mut out = self.clone();
        for (a, b) in out.counts.iter_mut().zip(&other.counts) {
            *a = a.checked_sub(*b).ok_or(Error::Overflow("histogram difference"))?;
        }
        Ok(out)
    }

    pub fn double(&self) -> DoubleEnumerator {
        let mut d = DoubleEnumerator::zeros(self.n);
        for (wx, wz, _, c) in self.entries() {
            d.counts[wx * (self.n + 1) + wz] += c;
        }
        d
    }

    /// Coefficients of the scalar enumerator, index = total weight.
    pub fn scalar(&self) -> Vec<u64> {
        let mut s = vec![0; self.n + 1];
        for (_, _, wt, c) in self.entries() {
            s[wt] += c;
        }
        s
    }

    /// Smallest total weight among entries matching `keep`.
    pub fn min_weight(&self, keep: impl Fn(usize, usize, usize) -> bool) -> Option<usize> {
        self.entries()
            .filter(|&(wx, wz, wt, _)| keep(wx, wz, wt))
            .map(|(_, _, wt, _)| wt)
            .min()
    }

    /// CSV rows `w_x,w_z,w_total,count,which` without a header.
    pub fn write_csv(&self, which: &str, out: &mut String) {
        for (wx, wz, wt, c) in self.entries() {
            let _ = writeln!(out, "{wx},{wz},{wt},{c},{which}");
        }
    }
}

/// Counts by `(w_x, w_z)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DoubleEnumerator {
    n: usize,
    counts: Vec<u64>,
}

impl DoubleEnumerator {
    pub fn zeros(n: usize) -> Self {
        DoubleEnumerator {
            n,
            counts: vec![0; (n + 1) * (n + 1)],
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn get(&self, wx: usize, wz: usize) -> u64 {
        self.counts[wx * (self.n + 1) + wz]
    }

    pub fn set(&mut self, wx: usize, wz: usize, c: u64) {
        self.counts[wx * (self.n + 1) + wz] = c;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        let m = self.n + 1;
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(move |(i, &c)| (i / m, i % m, c))
    }
}

/// Enumerate the group generated by `gens`, optionally shifted by `offset`.
///
/// `gens` must be independent for the counts to be group counts; this is
/// not checked here.
pub fn enumerate_span(
    gens: &[PauliString],
    offset: Option<&PauliString>,
    n: usize,
    par: Parallelism,
) -> Result<WeightHistogram> {
    let r = gens.len();
    if r > MAX_BITS {
        return Err(Error::ExactModeTooLarge {
            bits: r,
            cap: MAX_BITS,
        });
    }
    if let Some(g) = gens.iter().chain(offset).find(|g| g.num_qubits() != n) {
        return Err(Error::LengthMismatch(n, g.num_qubits()));
    }
    let seg_log = SEGMENTS_LOG2.min(r);
    let segments = 1usize << seg_log;
    let seg_len = 1u64 << (r - seg_log);
    if n <= 64 {
        let gx: Vec<u64> = gens.iter().map(|g| g.x_words().first().copied().unwrap_or(0)).collect();
        let gz: Vec<u64> = gens.iter().map(|g| g.z_words().first().copied().unwrap_or(0)).collect();
        let (ox, oz) = offset.map_or((0, 0), |o| {
            (
                o.x_words().first().copied().unwrap_or(0),
                o.z_words().first().copied().unwrap_or(0),
            )
        });
        Ok(fold_chunks(
            par,
            segments,
            || WeightHistogram::zeros(n),
            |mut h, s| {
                walk_single(&gx, &gz, ox, oz, s as u64 * seg_len, seg_len, &mut h);
                h
            },
            |a, b| a.merge(&b),
        ))
    } else {
        let base = offset.cloned().unwrap_or_else(|| PauliString::identity(n));
        Ok(fold_chunks(
            par,
            segments,
            || WeightHistogram::zeros(n),
            |mut h, s| {
                walk_multi(gens, &base, s as u64 * seg_len, seg_len, &mut h);
                h
            },
            |a, b| a.merge(&b),
        ))
    }
}

#[inline]
fn gray(i: u64) -> u64 {
    i ^ (i >> 1)
}

fn walk_single(gx: &[u64], gz: &[u64], ox: u64, oz: u64, start: u64, len: u64, h: &mut WeightHistogram) {
    let (mut x, mut z) = (ox, oz);
    let g0 = gray(start);
    for (j, (&a, &b)) in gx.iter().zip(gz).enumerate() {
        if (g0 >> j) & 1 == 1 {
            x ^= a;
            z ^= b;
        }
    }
    let m = h.n + 1;
    let counts = &mut h.counts;
    let end = start + len;
    let mut i = start;
    loop {
        let wx = x.count_ones() as usize;
        let wz = z.count_ones() as usize;
        let wt = (x | z).count_ones() as usize;
        counts[(wx * m + wz) * m + wt] += 1;
        i += 1;
        if i == end {
            break;
        }
        let t = i.trailing_zeros() as usize;
        x ^= gx[t];
        z ^= gz[t];
    }
}

fn walk_multi(gens: &[PauliString], base: &PauliString, start: u64, len: u64, h: &mut WeightHistogram) {
    let mut cur = base.clone();
    let g0 = gray(start);
    for (j, g) in gens.iter().enumerate() {
        if (g0 >> j) & 1 == 1 {
            cur.mul_assign(g);
        }
    }
    let end = start + len;
    let mut i = start;
    loop {
        h.add(cur.wt_x(), cur.wt_z(), cur.wt_total(), 1);
        i += 1;
        if i == end {
            break;
        }
        cur.mul_assign(&gens[i.trailing_zeros() as usize]);
    }
}

/// Naive enumeration re-multiplying every subset; test oracle for the Gray walk.
pub fn enumerate_naive(gens: &[PauliString], n: usize) -> WeightHistogram {
    let mut h = WeightHistogram::zeros(n);
    for mask in 0u64..(1 << gens.len()) {
        let mut p = PauliString::identity(n);
        for (j, g) in gens.iter().enumerate() {
            if (mask >> j) & 1 == 1 {
                p.mul_assign(g);
            }
        }
        h.add(p.wt_x(), p.wt_z(), p.wt_total(), 1);
    }
    h
}

fn check_cap(code: &StabilizerCode, cfg: &EnumConfig) -> Result<()> {
    let bits = code.n() - code.k();
    if bits > cfg.cap {
        return Err(Error::ExactModeTooLarge { bits, cap: cfg.cap });
    }
    Ok(())
}

/// The `A` histogram: all `2^(n-k)` stabilizer elements.
pub fn enumerate_stabilizer(code: &StabilizerCode, cfg: &EnumConfig) -> Result<WeightHistogram> {
    check_cap(code, cfg)?;
    enumerate_span(code.stabilizer().rows(), None, code.n(), cfg.parallelism)
}

/// The `B` histogram: all `2^(n+k)` normalizer elements.
pub fn enumerate_normalizer(code: &StabilizerCode, cfg: &EnumConfig) -> Result<WeightHistogram> {
    check_cap(code, cfg)?;
    enumerate_span(&code.normalizer_generators(), None, code.n(), cfg.parallelism)
}

/// Histogram of the coset `offset · S`.
pub fn enumerate_coset(
    code: &StabilizerCode,
    offset: &PauliString,
    cfg: &EnumConfig,
) -> Result<WeightHistogram> {
    check_cap(code, cfg)?;
    enumerate_span(code.stabilizer().rows(), Some(offset), code.n(), cfg.parallelism)
}

fn binomials(n: usize) -> Vec<Vec<i128>> {
    let mut c = vec![vec![0i128; n + 1]; n + 1];
    for i in 0..=n {
        c[i][0] = 1;
        for j in 1..=i {
            c[i][j] = c[i - 1][j - 1] + c[i - 1][j];
        }
    }
    c
}

/// `K[c][a] = Σ_j (-1)^j C(a, j) C(n-a, c-j)`.
fn krawtchouk(n: usize) -> Vec<Vec<i128>> {
    let bin = binomials(n);
    let mut k = vec![vec![0i128; n + 1]; n + 1];
    for c in 0..=n {
        for a in 0..=n {
            let mut s = 0i128;
            for j in 0..=c.min(a) {
                if c - j > n - a {
                    continue;
                }
                let t = bin[a][j] * bin[n - a][c - j];
                s += if j % 2 == 0 { t } else { -t };
            }
            k[c][a] = s;
        }
    }
    k
}

/// Double enumerator of the symplectic dual group.
///
/// Applied to `A` this yields `B`; applied to `B` it yields `A` again. The
/// input total must be a power of two (the group order). X weight of the
/// dual pairs with Z weight of the input:
/// `B[wx][wz] = |G|^-1 Σ_{a,b} A[a][b] K[wx][b] K[wz][a]`.
pub fn macwilliams_double(a: &DoubleEnumerator) -> Result<DoubleEnumerator> {
    let n = a.n;
    let order = a.total();
    if order == 0 || !order.is_power_of_two() {
        return Err(Error::InvalidState(format!(
            "histogram total {order} is not a group order"
        )));
    }
    let k = krawtchouk(n);
    let mut out = DoubleEnumerator::zeros(n);
    let entries: Vec<(usize, usize, i128)> =
        a.entries().map(|(x, z, c)| (x, z, c as i128)).collect();
    for wx in 0..=n {
        for wz in 0..=n {
            let mut s: i128 = 0;
            for &(ax, az, c) in &entries {
                let t = c
                    .checked_mul(k[wx][az])
                    .and_then(|t| t.checked_mul(k[wz][ax]))
                    .ok_or(Error::Overflow("MacWilliams transform"))?;
                s = s.checked_add(t).ok_or(Error::Overflow("MacWilliams transform"))?;
            }
            if s % order as i128 != 0 {
                return Err(Error::NonIntegral(wx, wz));
            }
            let v = s / order as i128;
            if v < 0 {
                return Err(Error::InvalidState(format!(
                    "negative dual coefficient at ({wx}, {wz})"
                )));
            }
            out.set(wx, wz, v as u64);
        }
    }
    Ok(out)
}

/// Independent bit-flip and phase-flip probabilities per qubit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub p_x: f64,
    pub p_z: f64,
}

impl NoiseModel {
    pub fn new(p_x: f64, p_z: f64) -> Result<Self> {
        let ok = |p: f64| (0.0..=1.0).contains(&p);
        if !ok(p_x) || !ok(p_z) {
            return Err(Error::InvalidConfig(format!(
                "noise ({p_x}, {p_z}) outside [0, 1]"
            )));
        }
        Ok(NoiseModel { p_x, p_z })
    }

    /// Probability of one particular Pauli with the given weights on `n` qubits.
    pub fn weight_probability(&self, n: usize, wx: usize, wz: usize) -> f64 {
        let f = |p: f64, w: usize| p.powi(w as i32) * (1.0 - p).powi((n - w) as i32);
        f(self.p_x, wx) * f(self.p_z, wz)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorRates {
    pub p_l: f64,
    pub p_s0: f64,
    pub p_l_norm: f64,
}

/// Neumaier compensated summation.
#[derive(Default)]
struct Sum {
    s: f64,
    c: f64,
}

impl Sum {
    fn add(&mut self, v: f64) {
        let t = self.s + v;
        if self.s.abs() >= v.abs() {
            self.c += (self.s - t) + v;
        } else {
            self.c += (v - t) + self.s;
        }
        self.s = t;
    }

    fn value(&self) -> f64 {
        self.s + self.c
    }
}

/// `Σ hist[wx][wz] · p(wx, wz)`.
pub fn evaluate(hist: &DoubleEnumerator, noise: &NoiseModel) -> f64 {
    let mut s = Sum::default();
    for (wx, wz, c) in hist.entries() {
        s.add(c as f64 * noise.weight_probability(hist.n, wx, wz));
    }
    s.value()
}

/// `A`, `B` and `C = B - A` for one code.
#[derive(Clone, Debug)]
pub struct Enumerators {
    pub n: usize,
    pub k: usize,
    pub a: WeightHistogram,
    pub b: WeightHistogram,
    pub c: WeightHistogram,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Distances {
    /// Minimum weight of a nontrivial logical (k = 0: of a nonidentity stabilizer).
    pub d: Option<usize>,
    /// Minimum weight of a nontrivial logical with no Z component.
    pub d_x: Option<usize>,
    /// Minimum weight of a nontrivial logical with no X component.
    pub d_z: Option<usize>,
}

impl Enumerators {
    pub fn compute(code: &StabilizerCode, cfg: &EnumConfig) -> Result<Self> {
        let a = enumerate_stabilizer(code, cfg)?;
        let b = enumerate_normalizer(code, cfg)?;
        let c = b.checked_sub(&a)?;
        Ok(Enumerators {
            n: code.n(),
            k: code.k(),
            a,
            b,
            c,
        })
    }

    /// Logical weight distribution `C = B - A`.
    pub fn logical(&self) -> &WeightHistogram {
        &self.c
    }

    pub fn distances(&self) -> Distances {
        if self.k == 0 {
            let d = self.a.min_weight(|_, _, wt| wt > 0);
            return Distances {
                d,
                d_x: self.a.min_weight(|wx, wz, _| wx > 0 && wz == 0),
                d_z: self.a.min_weight(|wx, wz, _| wz > 0 && wx == 0),
            };
        }
        Distances {
            d: self.c.min_weight(|_, _, _| true),
            d_x: self.c.min_weight(|_, wz, _| wz == 0),
            d_z: self.c.min_weight(|wx, _, _| wx == 0),
        }
    }

    pub fn error_rates(&self, noise: &NoiseModel) -> Result<ErrorRates> {
        let p_l = evaluate(&self.c.double(), noise);
        let p_s0 = evaluate(&self.b.double(), noise);
        if p_s0 == 0.0 {
            return Err(Error::NormUndefined);
        }
        Ok(ErrorRates {
            p_l,
            p_s0,
            p_l_norm: p_l / p_s0,
        })
    }

    /// CSV with header covering A, B and C.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("w_x,w_z,w_total,count,which\n");
        self.a.write_csv("A", &mut out);
        self.b.write_csv("B", &mut out);
        self.c.write_csv("C", &mut out);
        out
    }
}

/// Logical weight distribution of a code.
pub fn logical_weight_distribution(code: &StabilizerCode, cfg: &EnumConfig) -> Result<WeightHistogram> {
    Ok(Enumerators::compute(code, cfg)?.c)
}

pub fn distances(code: &StabilizerCode, cfg: &EnumConfig) -> Result<Distances> {
    Ok(Enumerators::compute(code, cfg)?.distances())
}

pub fn error_probabilities(
    code: &StabilizerCode,
    noise: &NoiseModel,
    cfg: &EnumConfig,
) -> Result<ErrorRates> {
    Enumerators::compute(code, cfg)?.error_rates(noise)
}

/// Minimum weights of the three nontrivial logical classes of a `k = 1`
/// code: `(X̄S, Z̄S, ȲS)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassDistances {
    pub d: usize,
    pub d_x: usize,
    pub d_z: usize,
    pub d_y: usize,
}

pub fn class_distances(code: &StabilizerCode, cfg: &EnumConfig) -> Result<ClassDistances> {
    if code.k() != 1 {
        return Err(Error::InvalidState(format!(
            "class distances need k = 1, got k = {}",
            code.k()
        )));
    }
    let x = code.logical_x(0).clone();
    let z = code.logical_z(0).clone();
    let mut y = x.clone();
    y.mul_assign(&z);
    let min = |p: &PauliString| -> Result<usize> {
        let h = enumerate_coset(code, p, cfg)?;
        Ok(h.min_weight(|_, _, _| true).expect("coset is nonempty"))
    };
    let (d_x, d_z, d_y) = (min(&x)?, min(&z)?, min(&y)?);
    Ok(ClassDistances {
        d: d_x.min(d_z).min(d_y),
        d_x,
        d_z,
        d_y,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub p_x: f64,
    pub p_z: f64,
    pub first: ErrorRates,
    pub second: ErrorRates,
    /// `second.p_l - first.p_l`.
    pub delta_p_l: f64,
    /// `second.p_l_norm - first.p_l_norm`.
    pub delta_p_l_norm: f64,
}

/// Error rates of two codes over a noise grid. Differences are taken as
/// second minus first.
pub fn sweep(
    first: &Enumerators,
    second: &Enumerators,
    grid: &[(f64, f64)],
) -> Result<Vec<SweepRow>> {
    grid.iter()
        .map(|&(p_x, p_z)| {
            let noise = NoiseModel::new(p_x, p_z)?;
            let a = first.error_rates(&noise)?;
            let b = second.error_rates(&noise)?;
            Ok(SweepRow {
                p_x,
                p_z,
                first: a,
                second: b,
                delta_p_l: b.p_l - a.p_l,
                delta_p_l_norm: b.p_l_norm - a.p_l_norm,
            })
        })
        .collect()
}
