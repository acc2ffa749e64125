//! Finite-`n` parameter search.
//!
//! Candidates `(b0, w0, k, beta)` with `b1 = k * b0` must satisfy
//!
//! * `L / b0 <= H(p) + epsilon`,
//! * a Chernoff bound of at most `1 / n` on the probability that a block
//!   holds more than `beta` atypical subblocks,
//! * a sparse structure of at most `(5/4) * epsilon * b1` bits.
//!
//! Among those, candidates whose payload rate stays within
//! `H(p) + 2 epsilon` are preferred; ties are broken by update bound, then
//! decode bound, then size. Floating point enters only through the entropy
//! and the tail estimate; every size comparison is exact.

use num_bigint::BigUint;
use num_traits::One;

use super::params::SchemeParams;
use crate::error::{Error, Result};
use crate::rational::{binary_entropy, to_f64, Rational};
use crate::sparse::SparseParams;

/// Largest subblock length tried.
pub const MAX_B0: u32 = 640;

/// Largest message length considered when looking for a feasible size.
const MAX_FEASIBLE_LOG2_N: u32 = 40;

/// Chooses parameters for messages of `n` bits from a Bernoulli(`p`) source.
pub fn derive_params(n: u64, p: Rational, epsilon: Rational) -> Result<SchemeParams> {
    if n == 0 {
        return Err(Error::InvalidParams("message length must be positive".into()));
    }
    if p * 2 >= Rational::from_integer(1) {
        return Err(Error::InvalidParams(format!("source parameter {p} must be below 1/2")));
    }
    if epsilon == Rational::from_integer(0) {
        return Err(Error::Infeasible { n, min_feasible_n: None });
    }
    if let Some(c) = search(n, p, epsilon) {
        return SchemeParams::new(n, p, epsilon, c.b0, c.w0, c.k * c.b0 as u64, c.beta);
    }
    let min_feasible_n = (n.max(1).ilog2() + 1..=MAX_FEASIBLE_LOG2_N)
        .map(|e| 1u64 << e)
        .find(|&m| search(m, p, epsilon).is_some());
    Err(Error::Infeasible { n, min_feasible_n })
}

/// Whether the payload rate stays within `H(p) + 2 epsilon`.
pub fn meets_rate_target(params: &SchemeParams) -> bool {
    let h = binary_entropy(to_f64(&params.p));
    to_f64(&params.payload_rate()) <= h + 2.0 * to_f64(&params.epsilon)
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    b0: u32,
    w0: u32,
    k: u64,
    beta: u64,
    rate_ok: bool,
    update: u64,
    decode: u64,
    payload: u64,
}

impl Candidate {
    fn key(&self) -> (bool, u64, u64, u64) {
        (!self.rate_ok, self.update, self.decode, self.payload)
    }
}

fn search(n: u64, p: Rational, epsilon: Rational) -> Option<Candidate> {
    let pf = to_f64(&p);
    let ef = to_f64(&epsilon);
    let h = binary_entropy(pf);
    let log_target = -(n as f64).ln();
    let mut best: Option<Candidate> = None;
    for b0 in 1..=MAX_B0.min(n.min(u32::MAX as u64) as u32) {
        let tails = log_upper_tails(b0, pf);
        let mut c = BigUint::one();
        let mut typical = BigUint::one();
        for w0 in 0..=b0 {
            if w0 > 0 {
                c = c * (b0 - w0 + 1) / w0;
                typical += &c;
            }
            let l = codeword_len(&typical);
            if l as f64 > (h + ef) * b0 as f64 {
                break;
            }
            let log_q = tails[w0 as usize];
            for k in k_grid(n, b0) {
                let Some(beta) = min_capacity(k, log_q, log_target) else {
                    continue;
                };
                let sp = SparseParams { b: k * b0 as u64, b1: b0, beta };
                // sparse bits <= (5/4) * epsilon * b1, exactly
                let lhs = 4 * sp.total_bits() as u128 * *epsilon.denom() as u128;
                let rhs = 5 * *epsilon.numer() as u128 * (k * b0 as u64) as u128;
                if lhs > rhs {
                    continue;
                }
                let cand = evaluate(n, b0, w0, l, k, beta, sp, h + 2.0 * ef);
                if best.is_none_or(|b| cand.key() < b.key()) {
                    best = Some(cand);
                }
            }
        }
    }
    best
}

#[allow(clippy::too_many_arguments)]
fn evaluate(n: u64, b0: u32, w0: u32, l: u32, k: u64, beta: u64, sp: SparseParams, rate_cap: f64) -> Candidate {
    let b1 = k * b0 as u64;
    let stride = k * l as u64 + sp.total_bits() + 1;
    let payload = n.div_ceil(b1) * stride;
    let bp = sp.pointer_bits() as u64;
    let cw = sp.counter_bits() as u64;
    let bm = sp.chunk_bits() as u64;
    let l = l as u64;
    let update = (2 + 2 * l)
        .max(3 + bp + b0 as u64)
        .max(3 + 2 * l + 2 * cw + bp + bm)
        .max(3 + 2 * bp + b0 as u64 + l + 2 * cw + 2 * bm);
    Candidate {
        b0,
        w0,
        k,
        beta,
        rate_ok: payload as f64 / n as f64 <= rate_cap,
        update,
        decode: 2 + (bp + 1).max(l),
        payload,
    }
}

fn codeword_len(typical: &BigUint) -> u32 {
    let m = typical + 1u32;
    let bits = m.bits() as u32;
    if m.count_ones() == 1 {
        bits - 1
    } else {
        bits
    }
}

/// Subblocks per block worth trying: every small count, a geometric ladder
/// up to a single block, and the counts that split `n` into few blocks.
fn k_grid(n: u64, b0: u32) -> Vec<u64> {
    let max_k = n.div_ceil(b0 as u64);
    let mut ks: Vec<u64> = (1..=64.min(max_k)).collect();
    let mut k = 64.0f64;
    while (k as u64) < max_k {
        k *= 1.03;
        ks.push((k.ceil() as u64).min(max_k));
    }
    for blocks in 1..=64u64 {
        ks.push(n.div_ceil(blocks * b0 as u64));
    }
    ks.sort_unstable();
    ks.dedup();
    ks
}

/// `ln P(weight > w0)` of a Binomial(`b0`, `p`) subblock, for every `w0`.
fn log_upper_tails(b0: u32, p: f64) -> Vec<f64> {
    let mut tails = vec![f64::NEG_INFINITY; b0 as usize + 1];
    if p <= 0.0 {
        return tails;
    }
    let mut log_pmf = Vec::with_capacity(b0 as usize + 1);
    let mut cur = b0 as f64 * (1.0 - p).ln();
    let odds = (p / (1.0 - p)).ln();
    for w in 0..=b0 {
        log_pmf.push(cur);
        cur += ((b0 - w) as f64 / (w + 1) as f64).ln() + odds;
    }
    let mut acc = f64::NEG_INFINITY;
    for w in (0..b0 as usize).rev() {
        acc = log_add(acc, log_pmf[w + 1]);
        tails[w] = acc;
    }
    tails
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Chernoff bound on `ln P(Bin(k, q) > beta)`.
pub(crate) fn log_overflow_bound(k: u64, log_q: f64, beta: u64) -> f64 {
    if beta >= k {
        return f64::NEG_INFINITY;
    }
    if log_q == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let q = log_q.exp();
    let a = (beta + 1) as f64 / k as f64;
    if a <= q {
        return 0.0;
    }
    if beta + 1 == k {
        return k as f64 * log_q;
    }
    let d = a * (a.ln() - log_q) + (1.0 - a) * ((1.0 - a) / (1.0 - q)).ln();
    -(k as f64) * d
}

/// Smallest capacity whose overflow bound is at most `exp(log_target)`.
fn min_capacity(k: u64, log_q: f64, log_target: f64) -> Option<u64> {
    let (mut lo, mut hi) = (1u64, k);
    if log_overflow_bound(k, log_q, hi) > log_target {
        return None;
    }
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if log_overflow_bound(k, log_q, mid) <= log_target {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Some(lo)
}
