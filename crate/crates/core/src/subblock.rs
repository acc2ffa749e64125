//! Fixed-length lossy subblock code.
//!
//! A subblock of `b0` bits is *typical* when its Hamming weight is at most
//! `w0`. Typical subblocks are mapped to their 1-based lexicographic rank
//! among all typical strings; every atypical subblock maps to the reserved
//! index 0, which decodes to the all-zero string. Ranks are written as
//! `L = ceil(log2(N_typ + 1))`-bit big-endian fields.
//!
//! Ranking uses the cumulative binomial table
//! `T(m, w) = #{strings of length m with weight <= w}`: the rank of `x` adds
//! `T(b0 - t - 1, w0 - ones_before(t))` for every position `t` holding a one.
//! Arithmetic is exact; codes whose index space fits in 128 bits use native
//! integers, larger ones fall back to `BigUint`.

use std::ops::{AddAssign, SubAssign};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Geometry of the subblock code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubblockParams {
    pub b0: u32,
    pub w0: u32,
    /// Codeword length in bits.
    pub codeword_bits: u32,
    /// Number of typical strings.
    pub n_typical: BigUint,
}

impl SubblockParams {
    pub fn new(b0: u32, w0: u32) -> Result<Self> {
        if b0 == 0 {
            return Err(Error::InvalidParams("subblock length must be positive".into()));
        }
        if w0 > b0 {
            return Err(Error::InvalidParams(format!("threshold w0 = {w0} exceeds b0 = {b0}")));
        }
        let n_typical = typical_count(b0, w0);
        let codeword_bits = codeword_bits(b0, w0);
        Ok(SubblockParams {
            b0,
            w0,
            codeword_bits,
            n_typical,
        })
    }
}

/// `sum_{w <= w0} C(b0, w)`.
pub fn typical_count(b0: u32, w0: u32) -> BigUint {
    let mut c = BigUint::one();
    let mut total = BigUint::one();
    for w in 1..=w0.min(b0) {
        c = c * (b0 - w + 1) / w;
        total += &c;
    }
    total
}

/// `ceil(log2(N_typ + 1))` without building the full code.
pub fn codeword_bits(b0: u32, w0: u32) -> u32 {
    let m = typical_count(b0, w0) + 1u32;
    let bits = bit_length(&m) as u32;
    if is_power_of_two(&m) {
        bits - 1
    } else {
        bits
    }
}

fn bit_length(v: &BigUint) -> u64 {
    v.bits()
}

fn is_power_of_two(v: &BigUint) -> bool {
    !v.is_zero() && v.count_ones() == 1
}

trait RankInt: Clone + Ord + Zero + One + for<'a> AddAssign<&'a Self> + for<'a> SubAssign<&'a Self> {
    fn from_big(v: &BigUint) -> Self;
    fn into_big(self) -> BigUint;
    fn bit(&self, k: u32) -> bool;
    fn set_bit(&mut self, k: u32);
}

impl RankInt for u128 {
    fn from_big(v: &BigUint) -> Self {
        v.to_u128().expect("value fits in 128 bits")
    }
    fn into_big(self) -> BigUint {
        BigUint::from(self)
    }
    fn bit(&self, k: u32) -> bool {
        (self >> k) & 1 == 1
    }
    fn set_bit(&mut self, k: u32) {
        *self |= 1 << k;
    }
}

impl RankInt for BigUint {
    fn from_big(v: &BigUint) -> Self {
        v.clone()
    }
    fn into_big(self) -> BigUint {
        self
    }
    fn bit(&self, k: u32) -> bool {
        BigUint::bit(self, k as u64)
    }
    fn set_bit(&mut self, k: u32) {
        BigUint::set_bit(self, k as u64, true)
    }
}

/// Cumulative binomial table, row `m` holding `T(m, 0..=w0)`.
#[derive(Debug, Clone)]
struct Table<T> {
    w0: u32,
    rows: Vec<T>,
}

impl<T: RankInt> Table<T> {
    fn build(b0: u32, w0: u32) -> Self {
        let width = (w0 + 1) as usize;
        let mut rows = Vec::with_capacity((b0 as usize + 1) * width);
        rows.extend(std::iter::repeat_n(T::one(), width));
        for m in 1..=b0 as usize {
            for w in 0..width {
                let mut v = rows[(m - 1) * width + w].clone();
                if w > 0 {
                    v += &rows[(m - 1) * width + w - 1].clone();
                }
                rows.push(v);
            }
        }
        Table { w0, rows }
    }

    #[inline]
    fn get(&self, m: u32, w: u32) -> &T {
        &self.rows[m as usize * (self.w0 as usize + 1) + w as usize]
    }

    fn rank(&self, b0: u32, x: &[bool]) -> T {
        let mut idx = T::one();
        let mut ones = 0;
        for (t, &bit) in x.iter().enumerate() {
            if bit {
                idx += self.get(b0 - t as u32 - 1, self.w0 - ones);
                ones += 1;
            }
        }
        idx
    }

    /// Writes the first `out.len()` bits of `unrank(idx)`; `idx >= 1`.
    fn unrank_prefix(&self, b0: u32, idx: &T, out: &mut [bool]) {
        let mut r = idx.clone();
        r -= &T::one();
        let mut ones = 0;
        for (t, slot) in out.iter_mut().enumerate() {
            if ones == self.w0 {
                *slot = false;
                continue;
            }
            let c = self.get(b0 - t as u32 - 1, self.w0 - ones);
            if r >= *c {
                r -= c;
                *slot = true;
                ones += 1;
            } else {
                *slot = false;
            }
        }
    }

    fn to_bits(v: &T, width: u32, out: &mut [bool]) {
        for (k, slot) in out.iter_mut().enumerate().take(width as usize) {
            *slot = v.bit(width - 1 - k as u32);
        }
    }

    fn from_bits(bits: &[bool]) -> T {
        let width = bits.len() as u32;
        let mut v = T::zero();
        for (k, &b) in bits.iter().enumerate() {
            if b {
                v.set_bit(width - 1 - k as u32);
            }
        }
        v
    }
}

#[derive(Debug, Clone)]
enum Tables {
    Narrow(Table<u128>),
    Wide(Table<BigUint>),
}

/// The subblock code with its precomputed ranking tables.
#[derive(Debug, Clone)]
pub struct SubblockCodec {
    params: SubblockParams,
    n_typical: Option<u128>,
    tables: Tables,
}

impl SubblockCodec {
    pub fn new(params: SubblockParams) -> Self {
        let (tables, n_typical) = if params.codeword_bits <= 127 {
            (
                Tables::Narrow(Table::build(params.b0, params.w0)),
                params.n_typical.to_u128(),
            )
        } else {
            (Tables::Wide(Table::build(params.b0, params.w0)), None)
        };
        SubblockCodec {
            params,
            n_typical,
            tables,
        }
    }

    pub fn with(b0: u32, w0: u32) -> Result<Self> {
        Ok(Self::new(SubblockParams::new(b0, w0)?))
    }

    pub fn params(&self) -> &SubblockParams {
        &self.params
    }

    pub fn b0(&self) -> u32 {
        self.params.b0
    }

    pub fn codeword_bits(&self) -> u32 {
        self.params.codeword_bits
    }

    fn check_len(&self, len: usize, expected: u32) -> Result<()> {
        if len != expected as usize {
            return Err(Error::Length {
                expected: expected as usize,
                actual: len,
            });
        }
        Ok(())
    }

    pub fn is_typical(&self, x: &[bool]) -> Result<bool> {
        self.check_len(x.len(), self.params.b0)?;
        Ok(weight(x) <= self.params.w0)
    }

    /// 1-based lexicographic rank of a typical subblock.
    pub fn rank(&self, x: &[bool]) -> Result<BigUint> {
        self.check_len(x.len(), self.params.b0)?;
        let w = weight(x);
        if w > self.params.w0 {
            return Err(Error::NotTypical { weight: w, w0: self.params.w0 });
        }
        Ok(match &self.tables {
            Tables::Narrow(t) => t.rank(self.params.b0, x).into_big(),
            Tables::Wide(t) => t.rank(self.params.b0, x),
        })
    }

    /// Inverse of [`rank`](Self::rank); index 0 is the atypical surrogate
    /// and decodes to the all-zero subblock.
    pub fn unrank(&self, idx: &BigUint) -> Result<Vec<bool>> {
        if idx > &self.params.n_typical {
            return Err(Error::InvalidParams(format!(
                "index {idx} exceeds {} typical strings",
                self.params.n_typical
            )));
        }
        let mut out = vec![false; self.params.b0 as usize];
        if idx.is_zero() {
            return Ok(out);
        }
        match &self.tables {
            Tables::Narrow(t) => t.unrank_prefix(self.params.b0, &u128::from_big(idx), &mut out),
            Tables::Wide(t) => t.unrank_prefix(self.params.b0, idx, &mut out),
        }
        Ok(out)
    }

    /// Writes the `L`-bit codeword of `x` into `out`.
    pub fn encode_into(&self, x: &[bool], out: &mut [bool]) -> Result<()> {
        self.check_len(x.len(), self.params.b0)?;
        self.check_len(out.len(), self.params.codeword_bits)?;
        let typical = weight(x) <= self.params.w0;
        let width = self.params.codeword_bits;
        match &self.tables {
            Tables::Narrow(t) => {
                let idx = if typical { t.rank(self.params.b0, x) } else { 0 };
                Table::<u128>::to_bits(&idx, width, out);
            }
            Tables::Wide(t) => {
                let idx = if typical { t.rank(self.params.b0, x) } else { BigUint::zero() };
                Table::<BigUint>::to_bits(&idx, width, out);
            }
        }
        Ok(())
    }

    pub fn encode_subblock(&self, x: &[bool]) -> Result<Vec<bool>> {
        let mut out = vec![false; self.params.codeword_bits as usize];
        self.encode_into(x, &mut out)?;
        Ok(out)
    }

    /// Decodes the first `out.len()` bits of the subblock named by `codeword`.
    pub fn decode_prefix(&self, codeword: &[bool], out: &mut [bool]) -> Result<()> {
        self.check_len(codeword.len(), self.params.codeword_bits)?;
        if out.len() > self.params.b0 as usize {
            return Err(Error::Length {
                expected: self.params.b0 as usize,
                actual: out.len(),
            });
        }
        match &self.tables {
            Tables::Narrow(t) => {
                let idx = Table::<u128>::from_bits(codeword);
                if idx == 0 {
                    out.fill(false);
                } else if Some(idx) > self.n_typical {
                    return Err(Error::MalformedContainer(format!("subcodeword index {idx} out of range")));
                } else {
                    t.unrank_prefix(self.params.b0, &idx, out);
                }
            }
            Tables::Wide(t) => {
                let idx = Table::<BigUint>::from_bits(codeword);
                if idx.is_zero() {
                    out.fill(false);
                } else if idx > self.params.n_typical {
                    return Err(Error::MalformedContainer(format!("subcodeword index {idx} out of range")));
                } else {
                    t.unrank_prefix(self.params.b0, &idx, out);
                }
            }
        }
        Ok(())
    }

    pub fn decode_subblock(&self, codeword: &[bool]) -> Result<Vec<bool>> {
        let mut out = vec![false; self.params.b0 as usize];
        self.decode_prefix(codeword, &mut out)?;
        Ok(out)
    }

    /// `x` when atypical, the all-zero subblock otherwise.
    pub fn error_vector(&self, x: &[bool]) -> Result<Vec<bool>> {
        if self.is_typical(x)? {
            Ok(vec![false; x.len()])
        } else {
            Ok(x.to_vec())
        }
    }
}

pub(crate) fn weight(x: &[bool]) -> u32 {
    x.iter().filter(|&&b| b).count() as u32
}
