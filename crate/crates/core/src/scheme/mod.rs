//! Block/subblock compressor with local decoding and local updates.
//!
//! An `n`-bit message is cut into blocks of `b1` bits and each block into
//! subblocks of `b0` bits. Every subblock is replaced by its fixed-length
//! codeword from [`crate::subblock`]; the rare atypical subblocks, whose
//! codeword is the reserved index 0, are kept verbatim in a per-block
//! [`crate::sparse`] structure. A one-bit flag per block records the event
//! that a block held more atypical subblocks than the structure can store.
//!
//! Reading or writing one message bit touches only the region of its block:
//! [`SchemeParams::decode_bound`] and [`SchemeParams::update_bound`] give the
//! worst-case number of probed bits.

mod container;
pub mod format;
mod params;
mod sizing;

use rand::Rng;

pub use container::{Container, Decoded, Transition};
pub use params::{SchemeParams, HEADER_BITS};
pub use sizing::{derive_params, meets_rate_target, MAX_B0};

use crate::bitstore::ProbeCounter;
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Draws `n` independent Bernoulli(`p`) bits, exactly.
pub fn sample_message<R: Rng + ?Sized>(n: u64, p: Rational, rng: &mut R) -> Vec<bool> {
    let (num, den) = (*p.numer(), *p.denom());
    (0..n).map(|_| num > 0 && rng.gen_range(0..den) < num).collect()
}

/// Outcome of a Monte Carlo failure estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ErrorEstimate {
    pub trials: u64,
    pub blocks_per_trial: u64,
    pub failed_blocks: u64,
    /// Trials with at least one failed block.
    pub failed_trials: u64,
}

impl ErrorEstimate {
    pub fn block_failure_rate(&self) -> f64 {
        self.failed_blocks as f64 / (self.trials * self.blocks_per_trial).max(1) as f64
    }

    pub fn message_failure_rate(&self) -> f64 {
        self.failed_trials as f64 / self.trials.max(1) as f64
    }
}

/// Samples `trials` messages and counts blocks with more than `beta`
/// atypical subblocks. No container is built.
pub fn estimate_error<R: Rng + ?Sized>(params: &SchemeParams, trials: u64, rng: &mut R) -> ErrorEstimate {
    let (num, den) = (*params.p.numer(), *params.p.denom());
    let b0 = params.b0 as u64;
    let mut est = ErrorEstimate {
        trials,
        blocks_per_trial: params.n_blocks(),
        failed_blocks: 0,
        failed_trials: 0,
    };
    for _ in 0..trials {
        let mut failed_here = 0;
        for block in 0..params.n_blocks() {
            let mut atypical = 0;
            for j in 0..params.subblocks_per_block() {
                let start = block * params.b1 + j * b0;
                let live = params.n.saturating_sub(start).min(b0);
                let w = (0..live).filter(|_| num > 0 && rng.gen_range(0..den) < num).count();
                if w as u32 > params.w0 {
                    atypical += 1;
                }
            }
            if atypical > params.beta {
                failed_here += 1;
            }
        }
        est.failed_blocks += failed_here;
        est.failed_trials += (failed_here > 0) as u64;
    }
    est
}

/// Random single-bit updates that keep the message weight fixed: clear a
/// random one, set a random zero, and repeat. Every step changes a bit and
/// the message stays distributed like a Bernoulli sample of its weight.
#[derive(Debug, Clone)]
pub struct SwapWalk {
    x: Vec<bool>,
    ones: usize,
    set_next: bool,
}

impl SwapWalk {
    pub fn new(x: Vec<bool>) -> Self {
        let ones = x.iter().filter(|&&b| b).count();
        SwapWalk { x, ones, set_next: false }
    }

    /// The message after the steps taken so far.
    pub fn message(&self) -> &[bool] {
        &self.x
    }

    /// Picks the next update; `None` when the message is constant.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Option<(u64, bool)> {
        if self.ones == 0 || self.ones == self.x.len() {
            return None;
        }
        let v = self.set_next;
        loop {
            let i = rng.gen_range(0..self.x.len());
            if self.x[i] != v {
                self.x[i] = v;
                if v {
                    self.ones += 1;
                } else {
                    self.ones -= 1;
                }
                self.set_next = !v;
                return Some((i as u64, v));
            }
        }
    }
}

/// Maximum and running total of probe counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ProbeStats {
    pub max: u64,
    pub total: u64,
    pub count: u64,
}

impl ProbeStats {
    pub fn record(&mut self, probes: u64) {
        self.max = self.max.max(probes);
        self.total += probes;
        self.count += 1;
    }

    pub fn mean(&self) -> f64 {
        self.total as f64 / self.count.max(1) as f64
    }
}

/// Measured probe counts of local operations.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    /// Every index of every non-failed block, on each sampled message.
    pub decode: ProbeStats,
    /// Random single-bit updates on sampled messages.
    pub update: ProbeStats,
    pub by_transition: Vec<(Transition, ProbeStats)>,
    /// Largest cost among hand-built instances of each transition.
    pub constructed_update: u64,
    pub failed_blocks: u64,
    pub capacity_failures: u64,
}

impl AuditReport {
    pub fn update_max(&self) -> u64 {
        self.update.max.max(self.constructed_update)
    }
}

/// Measures decode probes exhaustively and update probes on
/// `updates_per_trial` steps of a [`SwapWalk`], over `trials` sampled messages.
pub fn audit<R: Rng + ?Sized>(
    params: &SchemeParams,
    trials: u64,
    updates_per_trial: u64,
    rng: &mut R,
) -> Result<AuditReport> {
    let mut report = AuditReport {
        decode: ProbeStats::default(),
        update: ProbeStats::default(),
        by_transition: Vec::new(),
        constructed_update: constructed_updates(params)?.iter().map(|&(_, c)| c).max().unwrap_or(0),
        failed_blocks: 0,
        capacity_failures: 0,
    };
    for _ in 0..trials {
        let x = sample_message(params.n, params.p, rng);
        let mut c = Container::encode(&x, params)?;
        report.failed_blocks += c.failed_blocks().len() as u64;
        for i in 0..params.n {
            let mut probe = ProbeCounter::default();
            match c.local_decode(i, &mut probe) {
                Ok(_) => report.decode.record(probe.probe_count()),
                Err(Error::BlockFailed { .. }) => {}
                Err(e) => return Err(e),
            }
        }
        let mut walk = SwapWalk::new(x);
        for _ in 0..updates_per_trial {
            let Some((i, v)) = walk.step(rng) else {
                break;
            };
            let mut probe = ProbeCounter::default();
            match c.local_update(i, v, &mut probe) {
                Ok(t) => {
                    report.update.record(probe.probe_count());
                    match report.by_transition.iter_mut().find(|(k, _)| *k == t) {
                        Some((_, s)) => s.record(probe.probe_count()),
                        None => {
                            let mut s = ProbeStats::default();
                            s.record(probe.probe_count());
                            report.by_transition.push((t, s));
                        }
                    }
                }
                Err(Error::BlockFailed { .. }) => {}
                Err(Error::CapacityExceeded { .. }) => report.capacity_failures += 1,
                Err(e) => return Err(e),
            }
        }
    }
    Ok(report)
}

/// Probe cost of one hand-built update per transition that the geometry
/// allows. The atypical-to-typical case empties the first of two occupied
/// chunks, forcing the swap.
pub fn constructed_updates(params: &SchemeParams) -> Result<Vec<(Transition, u64)>> {
    let b0 = params.b0 as u64;
    let w0 = params.w0 as u64;
    let k = params.subblocks_per_block();
    let n = params.n;
    let mut out = Vec::new();
    let mut run = |x: Vec<bool>, i: u64, v: bool| -> Result<()> {
        let mut c = Container::encode(&x, params)?;
        let mut probe = ProbeCounter::default();
        let t = c.local_update(i, v, &mut probe)?;
        out.push((t, probe.probe_count()));
        Ok(())
    };
    let heavy = |x: &mut Vec<bool>, sub: u64, w: u64| {
        for t in 0..w {
            x[(sub * b0 + t) as usize] = true;
        }
    };
    // typical subblock gains a one and stays typical, or turns atypical
    if b0 <= n {
        run(vec![false; n as usize], 0, true)?;
    }
    if w0 < b0 && b0 <= n {
        let mut x = vec![false; n as usize];
        heavy(&mut x, 0, w0);
        run(x, w0, true)?;
    }
    if w0 + 2 <= b0 && b0 <= n {
        let mut x = vec![false; n as usize];
        heavy(&mut x, 0, w0 + 1);
        run(x, w0 + 1, true)?;
    }
    if w0 < b0 && k >= 2 && params.beta >= 2 && 2 * b0 <= n {
        let mut x = vec![false; n as usize];
        heavy(&mut x, 0, w0 + 1);
        heavy(&mut x, 1, w0 + 1);
        run(x, 0, false)?;
    }
    Ok(out)
}
