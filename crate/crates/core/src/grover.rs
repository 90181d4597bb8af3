//! Amplitude amplification: the analytic success model, a per-amplitude
//! reference simulator, and the randomized-iteration search driver.
//!
//! With `M` marked items among `N` and `θ = asin(√(M/N))`, `K` Grover
//! iterations leave probability `sin²((2K+1)θ)` on the marked set. Since
//! every track of a [`TrackTable`] carries the same amplitude before the
//! search stage, measurement is sampled from this formula instead of
//! evolving amplitudes over the whole table.

use std::f64::consts::FRAC_PI_2;

use rand::Rng;

use crate::error::{Error, Result};
use crate::qcore::{Qubit, TrackTable};
use crate::rng::SmlgRng;

/// Largest search space accepted by [`full_grover_oracle`].
pub const ORACLE_MAX_N: usize = 1 << 12;

fn check_counts(n: u64, m: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::usage("search space is empty"));
    }
    if m > n {
        return Err(Error::usage(format!("{m} marked items among {n}")));
    }
    Ok(())
}

/// `asin(√(M/N))`.
pub fn theta(n: u64, m: u64) -> Result<f64> {
    check_counts(n, m)?;
    Ok((m as f64 / n as f64).sqrt().asin())
}

/// `p(K) = sin²((2K+1)θ)`.
pub fn success_probability(n: u64, m: u64, k: u64) -> Result<f64> {
    let th = theta(n, m)?;
    if m == 0 {
        return Ok(0.0);
    }
    Ok(((2 * k + 1) as f64 * th).sin().powi(2))
}

/// `λ_M = (π/2)√(N/M) − 1`.
pub fn period(n: u64, m: u64) -> Result<f64> {
    check_counts(n, m)?;
    if m == 0 {
        return Err(Error::usage("no period without marked items"));
    }
    Ok(FRAC_PI_2 * (n as f64 / m as f64).sqrt() - 1.0)
}

/// Failure probability bound `(7/8)^c` after `c` rounds.
pub fn failure_bound(c: u32) -> f64 {
    0.875f64.powi(c as i32)
}

/// The sharper `(3/4)^c` bound of the single-marked-item analysis.
pub fn failure_bound_single(c: u32) -> f64 {
    0.75f64.powi(c as i32)
}

/// Runs `k` Grover iterations on an explicit amplitude vector of size `n`
/// and returns the probability mass on `marked`.
pub fn full_grover_oracle(n: usize, marked: &[usize], k: u32) -> Result<f64> {
    if !n.is_power_of_two() || n > ORACLE_MAX_N {
        return Err(Error::usage(format!(
            "oracle needs a power of two no larger than {ORACLE_MAX_N}, got {n}"
        )));
    }
    let mut is_marked = vec![false; n];
    for &s in marked {
        if s >= n {
            return Err(Error::usage(format!("marked index {s} out of range")));
        }
        if std::mem::replace(&mut is_marked[s], true) {
            return Err(Error::usage(format!("marked index {s} listed twice")));
        }
    }
    let mut amp = vec![1.0 / (n as f64).sqrt(); n];
    for _ in 0..k {
        for (a, &flag) in amp.iter_mut().zip(&is_marked) {
            if flag {
                *a = -*a;
            }
        }
        let mean = amp.iter().sum::<f64>() / n as f64;
        amp.iter_mut().for_each(|a| *a = 2.0 * mean - *a);
    }
    Ok(amp
        .iter()
        .zip(&is_marked)
        .filter(|(_, &f)| f)
        .map(|(a, _)| a * a)
        .sum())
}

/// Everything the analysis needs about one search.
#[derive(Clone, Debug, PartialEq)]
pub struct GroverPlan {
    pub n: u64,
    pub m: u64,
    pub theta: f64,
    pub lambda1: f64,
    pub k: u64,
    pub c: u32,
}

impl GroverPlan {
    pub fn new(n: u64, m: u64, k: u64, c: u32) -> Result<GroverPlan> {
        Ok(GroverPlan {
            n,
            m,
            theta: theta(n, m)?,
            lambda1: period(n, 1)?,
            k,
            c,
        })
    }

    pub fn probability(&self) -> f64 {
        if self.m == 0 {
            0.0
        } else {
            ((2 * self.k + 1) as f64 * self.theta).sin().powi(2)
        }
    }
}

/// Range from which each round draws its iteration count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum KRange {
    /// Uniform on `[0, ⌈λ₁⌉]`, the range of the failure-bound analysis.
    #[default]
    Period,
    /// Uniform on `[0, |P|]`, as written in the search pseudocode.
    Pattern(u64),
}

impl KRange {
    pub fn upper(&self, n: u64) -> Result<u64> {
        match *self {
            KRange::Period => Ok(period(n, 1)?.max(0.0).ceil() as u64),
            KRange::Pattern(p) => Ok(p),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    /// Maximum number of rounds.
    pub c: u32,
    pub k_range: KRange,
    /// Adds one index qubit whose `1` half is never marked, doubling the
    /// search space so that `M ≤ N/2`.
    pub double: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            c: 10,
            k_range: KRange::Period,
            double: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOutcome {
    /// Rank among the marked tracks of the measured one, on success.
    pub hit: Option<usize>,
    pub rounds: u32,
    /// `K` drawn in each round that ran.
    pub ks: Vec<u64>,
    /// `Σ (2K + 1)` over the rounds: `K` oracle calls, `K` diffusions and
    /// one measurement each.
    pub ops: u64,
    pub marked: u64,
    pub space: u64,
}

/// The round loop on bare counts: `n` tracks of which `marked` are marked.
pub fn randomized_search(
    n: u64,
    marked: u64,
    cfg: &SearchConfig,
    rng: &mut SmlgRng,
) -> Result<SearchOutcome> {
    if cfg.c < 1 {
        return Err(Error::usage("repetition budget c must be at least 1"));
    }
    check_counts(n, marked)?;
    let space = if cfg.double { 2 * n } else { n };
    let upper = cfg.k_range.upper(space)?;
    let mut out = SearchOutcome {
        hit: None,
        rounds: 0,
        ks: Vec::new(),
        ops: 0,
        marked,
        space,
    };
    for _ in 0..cfg.c {
        let k = rng.gen_range(0..=upper);
        out.rounds += 1;
        out.ks.push(k);
        out.ops += 2 * k + 1;
        if marked == 0 {
            continue;
        }
        let p = success_probability(space, marked, k)?;
        if rng.gen_bool(p.clamp(0.0, 1.0)) {
            out.hit = Some(rng.gen_range(0..marked as usize));
            break;
        }
    }
    Ok(out)
}

/// Amplitude amplification on a finalized table, marked on `q`.
///
/// Returns the measured track on success. The stage's operations are added
/// to the table's gate counter.
pub fn run_randomized_search(
    state: &mut TrackTable,
    q: Qubit,
    cfg: &SearchConfig,
    rng: &mut SmlgRng,
) -> Result<(Option<usize>, SearchOutcome)> {
    let marked = state.count_marked(q) as u64;
    let out = randomized_search(state.track_count() as u64, marked, cfg, rng)?;
    for (round, &k) in out.ks.iter().enumerate() {
        state.charge("grover", &format!("round={},K={k}", round + 1), 2 * k + 1);
    }
    let track = out.hit.map(|r| state.marked_tracks(q)[r]);
    Ok((track, out))
}
