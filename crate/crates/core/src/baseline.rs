//! Naive blocking: the message is cut into blocks of `B` bits and each block
//! is coded on its own with the weight-threshold code, with no sparse
//! structure for the exceptions. Reaching a per-block error of `1/n` at a
//! fixed rate forces `B` to grow like `log n`, and every local operation has
//! to touch a whole codeword.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use rand::Rng;

use crate::bitstore::{BitStore, Probe, ProbeCounter, Unmetered};
use crate::error::{Error, Result};
use crate::rational::{binary_entropy, to_f64, Rational};
use crate::scheme::{sample_message, ProbeStats};
use crate::subblock::{codeword_bits, weight, SubblockCodec};

/// Largest block length tried.
pub const MAX_BLOCK: u32 = 4096;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaselineParams {
    pub n: u64,
    pub block: u32,
    pub w: u32,
    codeword_bits: u32,
}

impl BaselineParams {
    pub fn new(n: u64, block: u32, w: u32) -> Result<Self> {
        if n == 0 || block == 0 || w > block {
            return Err(Error::InvalidParams(format!("bad blocking n = {n}, B = {block}, w = {w}")));
        }
        Ok(BaselineParams {
            n,
            block,
            w,
            codeword_bits: codeword_bits(block, w),
        })
    }

    /// Smallest codeword whose rate is within `H(p) + 2 epsilon` and whose
    /// per-block overflow probability `P(weight > w)` is at most `1/n`,
    /// checked exactly.
    pub fn derive(n: u64, p: Rational, epsilon: Rational) -> Result<Self> {
        let cap = binary_entropy(to_f64(&p)) + 2.0 * to_f64(&epsilon);
        let mut best: Option<BaselineParams> = None;
        for block in 1..=MAX_BLOCK {
            if let Some(b) = &best {
                // L >= B * H(p) roughly; stop once blocks are clearly too long
                if block as f64 * binary_entropy(to_f64(&p)) > 2.0 * b.codeword_bits as f64 + 64.0 {
                    break;
                }
            }
            let Some(w) = min_threshold(block, p, n) else {
                continue;
            };
            let l = codeword_bits(block, w);
            if l as f64 > cap * block as f64 {
                continue;
            }
            if best.as_ref().is_none_or(|b| l < b.codeword_bits) {
                best = Some(BaselineParams::new(n, block, w)?);
            }
        }
        best.ok_or(Error::Infeasible { n, min_feasible_n: None })
    }

    pub fn codeword_bits(&self) -> u32 {
        self.codeword_bits
    }

    pub fn n_blocks(&self) -> u64 {
        self.n.div_ceil(self.block as u64)
    }

    /// Flag plus codeword.
    pub fn stride(&self) -> u64 {
        1 + self.codeword_bits as u64
    }

    pub fn rate(&self) -> Rational {
        Rational::new(self.n_blocks() * self.stride(), self.n)
    }

    pub fn decode_bound(&self) -> u64 {
        1 + self.codeword_bits as u64
    }

    pub fn update_bound(&self) -> u64 {
        1 + 2 * self.codeword_bits as u64
    }
}

/// Exact `P(Bin(block, p) > w)` as a fraction `(num, den)`.
pub fn overflow_probability(block: u32, w: u32, p: Rational) -> (BigUint, BigUint) {
    let (a, d) = (BigUint::from(*p.numer()), BigUint::from(*p.denom()));
    let b = &d - &a;
    let mut b_pows = Vec::with_capacity(block as usize + 1);
    b_pows.push(BigUint::one());
    for j in 0..block as usize {
        let next = &b_pows[j] * &b;
        b_pows.push(next);
    }
    let mut num = BigUint::zero();
    let mut c = BigUint::one();
    let mut a_pow = BigUint::one();
    for j in 0..=block {
        if j > 0 {
            c = c * (block - j + 1) / j;
            a_pow *= &a;
        }
        if j > w {
            num += &c * &a_pow * &b_pows[(block - j) as usize];
        }
    }
    (num, d.pow(block))
}

/// Smallest `w` with `P(weight > w) <= 1/n`.
fn min_threshold(block: u32, p: Rational, n: u64) -> Option<u32> {
    let pf = to_f64(&p);
    // float scan for a starting point, exact check around it
    let mut log_tail = f64::NEG_INFINITY;
    let mut guess = block;
    let mut log_pmf: Vec<f64> = Vec::with_capacity(block as usize + 1);
    if pf > 0.0 {
        let mut cur = block as f64 * (1.0 - pf).ln();
        for j in 0..=block {
            log_pmf.push(cur);
            cur += ((block - j) as f64 / (j + 1) as f64).ln() + (pf / (1.0 - pf)).ln();
        }
        for w in (0..block).rev() {
            let t = log_pmf[w as usize + 1];
            log_tail = if log_tail == f64::NEG_INFINITY {
                t
            } else {
                log_tail.max(t) + (-(log_tail - t).abs()).exp().ln_1p()
            };
            if log_tail > -(n as f64).ln() + 1e-6 {
                guess = w + 1;
                break;
            }
            guess = w;
        }
    } else {
        guess = 0;
    }
    let ok = |w: u32| {
        let (num, den) = overflow_probability(block, w, p);
        num * n <= den
    };
    let mut w = guess;
    if !ok(w) {
        while w < block && !ok(w) {
            w += 1;
        }
        return ok(w).then_some(w);
    }
    while w > 0 && ok(w - 1) {
        w -= 1;
    }
    Some(w)
}

/// A container of independently coded blocks.
#[derive(Clone)]
pub struct Blocked {
    params: BaselineParams,
    codec: SubblockCodec,
    store: BitStore,
}

impl Blocked {
    pub fn encode(x: &[bool], params: &BaselineParams) -> Result<Blocked> {
        if x.len() as u64 != params.n {
            return Err(Error::Length {
                expected: params.n as usize,
                actual: x.len(),
            });
        }
        let codec = SubblockCodec::with(params.block, params.w)?;
        let mut store = BitStore::new(params.n_blocks() * params.stride());
        let b = params.block as usize;
        let mut buf = vec![false; b];
        let mut cw = vec![false; params.codeword_bits as usize];
        for blk in 0..params.n_blocks() as usize {
            let end = ((blk + 1) * b).min(x.len());
            buf.fill(false);
            buf[..end - blk * b].copy_from_slice(&x[blk * b..end]);
            codec.encode_into(&buf, &mut cw)?;
            let base = blk as u64 * params.stride();
            store.set(base, weight(&buf) > params.w)?;
            store.write_bits(&mut Unmetered, base + 1, &cw)?;
        }
        Ok(Blocked {
            params: params.clone(),
            codec,
            store,
        })
    }

    pub fn params(&self) -> &BaselineParams {
        &self.params
    }

    pub fn failed_blocks(&self) -> usize {
        (0..self.params.n_blocks())
            .filter(|&b| self.store.get(b * self.params.stride()).unwrap_or(true))
            .count()
    }

    fn locate(&self, i: u64) -> Result<(u64, usize)> {
        if i >= self.params.n {
            return Err(Error::Address {
                addr: i,
                capacity: self.params.n,
            });
        }
        let b = self.params.block as u64;
        Ok((i / b, (i % b) as usize))
    }

    pub fn local_decode<P: Probe + ?Sized>(&self, i: u64, probe: &mut P) -> Result<bool> {
        let (block, offset) = self.locate(i)?;
        let base = block * self.params.stride();
        if self.store.read_bit(probe, base)? {
            return Err(Error::BlockFailed { block });
        }
        let mut cw = vec![false; self.params.codeword_bits as usize];
        self.store.read_bits(probe, base + 1, &mut cw)?;
        let mut prefix = vec![false; offset + 1];
        self.codec.decode_prefix(&cw, &mut prefix)?;
        Ok(prefix[offset])
    }

    /// Rewrites the whole codeword of the block; a block pushed over the
    /// threshold is flagged failed.
    pub fn local_update<P: Probe + ?Sized>(&mut self, i: u64, v: bool, probe: &mut P) -> Result<()> {
        let (block, offset) = self.locate(i)?;
        let base = block * self.params.stride();
        if self.store.read_bit(probe, base)? {
            return Err(Error::BlockFailed { block });
        }
        let mut cw = vec![false; self.params.codeword_bits as usize];
        self.store.read_bits(probe, base + 1, &mut cw)?;
        let mut data = self.codec.decode_subblock(&cw)?;
        if data[offset] == v {
            return Ok(());
        }
        data[offset] = v;
        if weight(&data) > self.params.w {
            self.store.write_bit(probe, base, true)?;
            return Err(Error::CapacityExceeded {
                nonzero: weight(&data) as u64,
                beta: self.params.w as u64,
            });
        }
        self.codec.encode_into(&data, &mut cw)?;
        self.store.write_bits(probe, base + 1, &cw)
    }
}

/// Measured decode and update probes: every index for decoding, `updates`
/// random writes.
pub fn audit<R: Rng + ?Sized>(
    params: &BaselineParams,
    p: Rational,
    updates: u64,
    rng: &mut R,
) -> Result<(ProbeStats, ProbeStats)> {
    let x = sample_message(params.n, p, rng);
    let mut c = Blocked::encode(&x, params)?;
    let mut decode = ProbeStats::default();
    for i in 0..params.n {
        let mut probe = ProbeCounter::default();
        match c.local_decode(i, &mut probe) {
            Ok(_) => decode.record(probe.probe_count()),
            Err(Error::BlockFailed { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    let mut update = ProbeStats::default();
    for _ in 0..updates {
        let i = rng.gen_range(0..params.n);
        let mut probe = ProbeCounter::default();
        let current = match c.local_decode(i, &mut Unmetered) {
            Ok(v) => v,
            Err(Error::BlockFailed { .. }) => continue,
            Err(e) => return Err(e),
        };
        match c.local_update(i, !current, &mut probe) {
            Ok(()) | Err(Error::CapacityExceeded { .. }) => update.record(probe.probe_count()),
            Err(e) => return Err(e),
        }
    }
    Ok((decode, update))
}
