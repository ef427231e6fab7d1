//! Measurements of what shares reveal about their source.
//!
//! * [`bit_balance`]: fair-coin chi-square per bit plane of one image.
//! * [`share_indistinguishability`] and [`subset_secrecy`]: two-sample
//!   chi-square between share distributions arising from two different
//!   sources, over many independent splits.
//! * [`simulate_known_rng_attack`]: replays the exact random draws of a
//!   deterministic split and counts which source bits a holder of one share
//!   can pin down. [`naive_otp_baseline`] does the same for plain XOR with a
//!   known pad.

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use zeroize::Zeroizing;

use crate::bitwise::{known_share_bit, partial_knowledge_bit, HeldShare};
use crate::error::{Error, Result};
use crate::raster::{Raster, RasterImage};
use crate::rng::{AddressSpace, RandomnessContext, Seed, SEED_LEN};
use crate::scheme::split_raster;
use crate::word::Sample;

/// Significance level of every chi-square gate.
pub const SIGNIFICANCE: f64 = 0.001;

/// Upper 0.001 quantile of chi-square with one degree of freedom.
pub const CRITICAL_1DOF: f64 = 10.828;

/// Upper [`SIGNIFICANCE`] quantile of chi-square with `dof` degrees of freedom.
pub fn critical_value(dof: usize) -> f64 {
    if dof == 1 {
        return CRITICAL_1DOF;
    }
    if dof == 0 {
        return f64::INFINITY;
    }
    ChiSquared::new(dof as f64)
        .expect("positive degrees of freedom")
        .inverse_cdf(1.0 - SIGNIFICANCE)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlaneStat {
    pub channel: u8,
    /// Bit position, 0 = least significant.
    pub bit: u8,
    pub ones: u64,
    pub zeros: u64,
    pub chi_square: f64,
}

impl PlaneStat {
    pub fn passes(&self) -> bool {
        self.chi_square < CRITICAL_1DOF
    }
}

/// Per-plane balance of an image, planes ordered by channel then bit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BitPlaneStats {
    pub pixels: u64,
    pub planes: Vec<PlaneStat>,
}

impl BitPlaneStats {
    pub fn passes(&self) -> bool {
        self.planes.iter().all(PlaneStat::passes)
    }

    pub fn worst(&self) -> Option<&PlaneStat> {
        self.planes
            .iter()
            .max_by(|a, b| a.chi_square.total_cmp(&b.chi_square))
    }

    /// `plane,channel,bit,ones,zeros,chi_square` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("plane,channel,bit,ones,zeros,chi_square\n");
        for (i, p) in self.planes.iter().enumerate() {
            let _ = writeln!(
                out,
                "{i},{},{},{},{},{:.6}",
                p.channel, p.bit, p.ones, p.zeros, p.chi_square
            );
        }
        out
    }
}

pub fn bit_balance(img: &RasterImage) -> BitPlaneStats {
    match img {
        RasterImage::Eight(r) => balance_of(r),
        RasterImage::Sixteen(r) => balance_of(r),
    }
}

fn balance_of<T: Sample>(r: &Raster<T>) -> BitPlaneStats {
    let channels = r.channels() as usize;
    let bits = T::DEPTH.bits() as usize;
    let ones = r
        .samples()
        .par_chunks(channels * 4096)
        .map(|chunk| {
            let mut ones = vec![0u64; channels * bits];
            for px in chunk.chunks_exact(channels) {
                for (c, s) in px.iter().enumerate() {
                    let v = s.widen();
                    for b in 0..bits {
                        ones[c * bits + b] += ((v >> b) & 1) as u64;
                    }
                }
            }
            ones
        })
        .reduce(
            || vec![0u64; channels * bits],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let n = r.geometry().pixel_count() as u64;
    let planes = ones
        .into_iter()
        .enumerate()
        .map(|(i, ones)| {
            let half = n as f64 / 2.0;
            PlaneStat {
                channel: (i / bits) as u8,
                bit: (i % bits) as u8,
                ones,
                zeros: n - ones,
                chi_square: (ones as f64 - half).powi(2) / (n as f64 / 4.0),
            }
        })
        .collect();
    BitPlaneStats { pixels: n, planes }
}

/// Two-sample chi-square homogeneity statistic over the bins occupied in
/// either histogram.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoSampleChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub critical: f64,
}

impl TwoSampleChiSquare {
    pub fn passes(&self) -> bool {
        self.statistic < self.critical
    }
}

pub fn two_sample_chi_square(a: &HashMap<u64, u64>, b: &HashMap<u64, u64>) -> TwoSampleChiSquare {
    let total_a: u64 = a.values().sum();
    let total_b: u64 = b.values().sum();
    let mut keys: Vec<u64> = a.keys().chain(b.keys()).copied().collect();
    keys.sort_unstable();
    keys.dedup();
    let (ka, kb) = if total_a == 0 || total_b == 0 {
        (0.0, 0.0)
    } else {
        (
            (total_b as f64 / total_a as f64).sqrt(),
            (total_a as f64 / total_b as f64).sqrt(),
        )
    };
    let mut statistic = 0.0;
    let mut bins = 0usize;
    for k in keys {
        let x = *a.get(&k).unwrap_or(&0) as f64;
        let y = *b.get(&k).unwrap_or(&0) as f64;
        if x + y > 0.0 {
            statistic += (ka * x - kb * y).powi(2) / (x + y);
            bins += 1;
        }
    }
    let dof = bins.saturating_sub(1);
    TwoSampleChiSquare {
        statistic,
        dof,
        critical: critical_value(dof),
    }
}

/// Where per-trial randomness comes from in repeated-split experiments.
#[derive(Debug, Clone)]
pub enum TrialSource {
    OsEntropy,
    /// Trial seeds are drawn in sequence from a ChaCha20 stream keyed by
    /// this seed, so a whole experiment is reproducible.
    Deterministic(Seed),
}

impl TrialSource {
    fn contexts(&self) -> impl FnMut() -> RandomnessContext {
        let mut stream = match self {
            TrialSource::OsEntropy => None,
            TrialSource::Deterministic(seed) => Some(ChaCha20Rng::from_seed(*seed.as_bytes())),
        };
        move || match &mut stream {
            None => RandomnessContext::os_entropy(),
            Some(stream) => {
                let mut bytes = Zeroizing::new([0u8; SEED_LEN]);
                stream.fill_bytes(&mut bytes[..]);
                RandomnessContext::deterministic(Seed::from_bytes(*bytes))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndistinguishabilityReport {
    pub trials: usize,
    /// One test per channel, pooling every pixel of every trial.
    pub channels: Vec<TwoSampleChiSquare>,
}

impl IndistinguishabilityReport {
    pub fn passes(&self) -> bool {
        self.channels.iter().all(TwoSampleChiSquare::passes)
    }

    /// `channel,statistic,dof,critical` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("channel,statistic,dof,critical\n");
        for (c, t) in self.channels.iter().enumerate() {
            let _ = writeln!(out, "{c},{:.6},{},{:.6}", t.statistic, t.dof, t.critical);
        }
        out
    }
}

/// Splits `a` and `b` `trials` times each (two shares, independent draws
/// for every split) and compares the first-share sample distributions
/// channel by channel.
pub fn share_indistinguishability(
    a: &RasterImage,
    b: &RasterImage,
    trials: usize,
    source: &TrialSource,
) -> Result<IndistinguishabilityReport> {
    let reports = subset_histograms(a, b, 2, trials, source, &[vec![0]], SubsetView::Tuple)?;
    Ok(IndistinguishabilityReport {
        trials,
        channels: reports.into_iter().next().unwrap_or_default(),
    })
}

/// How a subset of shares is observed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubsetView {
    /// The XOR of the subset's samples.
    Xor,
    /// The joint tuple of the subset's samples.
    Tuple,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsetReport {
    /// Share indices in the subset.
    pub members: Vec<usize>,
    pub channels: Vec<TwoSampleChiSquare>,
}

impl SubsetReport {
    pub fn passes(&self) -> bool {
        self.channels.iter().all(TwoSampleChiSquare::passes)
    }
}

/// Compares, for every non-empty proper subset of an `total_shares`-way
/// split, the subset's observed distribution under source `a` against
/// source `b`.
pub fn subset_secrecy(
    a: &RasterImage,
    b: &RasterImage,
    total_shares: usize,
    trials: usize,
    source: &TrialSource,
    view: SubsetView,
) -> Result<Vec<SubsetReport>> {
    if total_shares < 2 {
        return Err(Error::InvalidShareCount(total_shares));
    }
    if total_shares > 16 {
        return Err(Error::InvalidShareCount(total_shares));
    }
    let subsets: Vec<Vec<usize>> = (1u32..(1 << total_shares) - 1)
        .map(|mask| (0..total_shares).filter(|i| mask >> i & 1 == 1).collect())
        .collect();
    if view == SubsetView::Tuple
        && subsets
            .iter()
            .any(|s| s.len() as u32 * a.depth().bits() > 64)
    {
        return Err(Error::InvalidShareCount(total_shares));
    }
    let stats = subset_histograms(a, b, total_shares, trials, source, &subsets, view)?;
    Ok(subsets
        .into_iter()
        .zip(stats)
        .map(|(members, channels)| SubsetReport { members, channels })
        .collect())
}

type Histograms = Vec<Vec<HashMap<u64, u64>>>; // [subset][channel]

fn subset_histograms(
    a: &RasterImage,
    b: &RasterImage,
    total_shares: usize,
    trials: usize,
    source: &TrialSource,
    subsets: &[Vec<usize>],
    view: SubsetView,
) -> Result<Vec<Vec<TwoSampleChiSquare>>> {
    if a.geometry() != b.geometry() {
        return Err(Error::GeometryMismatch {
            index: 1,
            expected: a.geometry(),
            found: b.geometry(),
        });
    }
    if trials == 0 {
        return Err(Error::InsufficientSamples(
            "at least one trial is required".into(),
        ));
    }
    let channels = a.geometry().channels as usize;
    let empty = || -> Histograms { vec![vec![HashMap::new(); channels]; subsets.len()] };
    let (mut hist_a, mut hist_b) = (empty(), empty());
    let mut next_ctx = source.contexts();
    for _ in 0..trials {
        for (img, hist) in [(a, &mut hist_a), (b, &mut hist_b)] {
            let ctx = next_ctx();
            let shares: Vec<Vec<u32>> = crate::scheme::split_n(&crate::scheme::SplitRequest {
                source: img,
                total_shares,
                rng: &ctx,
                link_shares: false,
            })?
            .shares()
            .iter()
            .map(RasterImage::samples_u32)
            .collect();
            tally(&shares, channels, img.depth().bits(), subsets, view, hist);
        }
    }
    Ok(hist_a
        .iter()
        .zip(&hist_b)
        .map(|(ha, hb)| {
            ha.iter()
                .zip(hb)
                .map(|(x, y)| two_sample_chi_square(x, y))
                .collect()
        })
        .collect())
}

fn tally(
    shares: &[Vec<u32>],
    channels: usize,
    bits: u32,
    subsets: &[Vec<usize>],
    view: SubsetView,
    hist: &mut Histograms,
) {
    let samples = shares[0].len();
    for (subset, per_channel) in subsets.iter().zip(hist.iter_mut()) {
        for i in 0..samples {
            let key = subset.iter().fold(0u64, |acc, &s| {
                let v = shares[s][i] as u64;
                match view {
                    SubsetView::Xor => acc ^ v,
                    SubsetView::Tuple => (acc << bits) | v,
                }
            });
            *per_channel[i % channels].entry(key).or_insert(0) += 1;
        }
    }
}

/// Counts for one `(r1, r2, q)` combination.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CellTally {
    pub observations: u64,
    pub determined: u64,
    pub determined_correct: u64,
}

/// Outcome of a known-randomness attack over every bit of an image.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct RecoveryReport {
    pub total_bits: u64,
    pub determined_bits: u64,
    pub determined_correct_bits: u64,
    /// Determined bits whose inferred value was 1.
    pub determined_ones: u64,
    /// Indexed by `4 * r1 + 2 * r2 + q`, i.e. the rows of the partial
    /// knowledge table in order. Empty (all zero) for the naive baseline.
    pub cells: [CellTally; 8],
}

impl RecoveryReport {
    pub fn determined_fraction(&self) -> f64 {
        if self.total_bits == 0 {
            0.0
        } else {
            self.determined_bits as f64 / self.total_bits as f64
        }
    }

    pub fn all_determined_are_ones(&self) -> bool {
        self.determined_ones == self.determined_bits
    }

    /// Every determined bit was inferred correctly.
    pub fn is_sound(&self) -> bool {
        self.determined_correct_bits == self.determined_bits
    }

    pub fn merge(mut self, other: RecoveryReport) -> RecoveryReport {
        self.total_bits += other.total_bits;
        self.determined_bits += other.determined_bits;
        self.determined_correct_bits += other.determined_correct_bits;
        self.determined_ones += other.determined_ones;
        for (a, b) in self.cells.iter_mut().zip(other.cells) {
            a.observations += b.observations;
            a.determined += b.determined;
            a.determined_correct += b.determined_correct;
        }
        self
    }

    fn record(&mut self, inferred: Option<bool>, truth: bool) {
        self.total_bits += 1;
        if let Some(v) = inferred {
            self.determined_bits += 1;
            self.determined_ones += v as u64;
            self.determined_correct_bits += (v == truth) as u64;
        }
    }
}

/// Splits `source` into two shares under `seed`, then plays an attacker
/// who holds share `held`, replays every `(r1, r2)` draw from the same
/// seed, and infers source bits. Without `knows_which` the attacker does not
/// know which of the two shares it holds.
pub fn simulate_known_rng_attack(
    source: &RasterImage,
    seed: &Seed,
    held: HeldShare,
    knows_which: bool,
) -> Result<RecoveryReport> {
    match source {
        RasterImage::Eight(r) => attack(r, seed, held, knows_which),
        RasterImage::Sixteen(r) => attack(r, seed, held, knows_which),
    }
}

fn attack<T: Sample>(
    source: &Raster<T>,
    seed: &Seed,
    held: HeldShare,
    knows_which: bool,
) -> Result<RecoveryReport> {
    let shares = {
        let mut ctx = RandomnessContext::deterministic(seed.clone());
        let shares = split_raster(source, 2, &ctx)?;
        ctx.wipe();
        shares
    };
    let share = match held {
        HeldShare::First => &shares[0],
        HeldShare::Second => &shares[1],
    };
    // the attacker's own copy of the generator
    let replay = RandomnessContext::deterministic(seed.clone());
    let bits = T::DEPTH.bits();
    let space = AddressSpace {
        width: source.width() as u64,
        height: source.height(),
        channels: source.channels(),
    };
    let row_len = source.row_len();
    source
        .samples()
        .par_chunks(row_len)
        .zip(share.samples().par_chunks(row_len))
        .enumerate()
        .map(|(y, (src, observed))| {
            let mut r1 = vec![T::zero(); row_len];
            let mut r2 = vec![T::zero(); row_len];
            replay.fill_span(0, y as u32, 0, space, &mut r1, &mut r2)?;
            let mut report = RecoveryReport::default();
            for i in 0..row_len {
                let (p, q) = (src[i].widen(), observed[i].widen());
                let (a, b) = (r1[i].widen(), r2[i].widen());
                for bit in 0..bits {
                    let bit_of = |w: u32| (w >> bit) & 1 == 1;
                    let (p, q, a, b) = (bit_of(p), bit_of(q), bit_of(a), bit_of(b));
                    let inferred = if knows_which {
                        known_share_bit(a, b, q, held)
                    } else {
                        partial_knowledge_bit(a, b, q).value()
                    };
                    report.record(inferred, p);
                    let cell = &mut report.cells[4 * a as usize + 2 * b as usize + q as usize];
                    cell.observations += 1;
                    if let Some(v) = inferred {
                        cell.determined += 1;
                        cell.determined_correct += (v == p) as u64;
                    }
                }
            }
            Ok(report)
        })
        .try_reduce(RecoveryReport::default, |a, b| Ok(a.merge(b)))
}

/// Share of the naive scheme an attacker holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NaiveShare {
    /// The random pad itself.
    Pad,
    /// Source XOR pad.
    Masked,
}

/// The naive two-share scheme: share one is a random pad, share two is the
/// source XOR the pad. The attacker knows the pad (replayed from `seed`) and
/// knows which share it holds.
pub fn naive_otp_baseline(
    source: &RasterImage,
    seed: &Seed,
    held: NaiveShare,
) -> Result<RecoveryReport> {
    match source {
        RasterImage::Eight(r) => naive(r, seed, held),
        RasterImage::Sixteen(r) => naive(r, seed, held),
    }
}

fn naive<T: Sample>(source: &Raster<T>, seed: &Seed, held: NaiveShare) -> Result<RecoveryReport> {
    let ctx = RandomnessContext::deterministic(seed.clone());
    let bits = T::DEPTH.bits();
    let space = AddressSpace {
        width: source.width() as u64,
        height: source.height(),
        channels: source.channels(),
    };
    let row_len = source.row_len();
    source
        .samples()
        .par_chunks(row_len)
        .enumerate()
        .map(|(y, src)| {
            let mut pad = vec![T::zero(); row_len];
            let mut unused = vec![T::zero(); row_len];
            ctx.fill_span(0, y as u32, 0, space, &mut pad, &mut unused)?;
            let mut report = RecoveryReport::default();
            for (p, r) in src.iter().zip(&pad) {
                let share = match held {
                    NaiveShare::Pad => *r,
                    NaiveShare::Masked => *p ^ *r,
                };
                let (p, q, r) = (p.widen(), share.widen(), r.widen());
                for bit in 0..bits {
                    let truth = (p >> bit) & 1 == 1;
                    let inferred = match held {
                        NaiveShare::Pad => None,
                        NaiveShare::Masked => Some(((q ^ r) >> bit) & 1 == 1),
                    };
                    report.record(inferred, truth);
                }
            }
            Ok(report)
        })
        .try_reduce(RecoveryReport::default, |a, b| Ok(a.merge(b)))
}
