//! Exact error analysis of small nonadaptive schemes.
//!
//! A [`SchemeDescription`] lists, for every codeword bit `C_j`, the message
//! bits it reads and its truth table, and for every decoded bit `X̂_i`, the
//! codeword bits it reads and its truth table. Because each `X̂_i` is a
//! function of the message bits in its *effective neighbourhood*
//! `N_eff(i) = ∪_{j ∈ N_d(i)} N_e(j)`, the bit error probability
//! `P(X̂_i != X_i)` under an i.i.d. Bernoulli(`p`) message can be computed by
//! enumerating only `N_eff(i) ∪ {i}`. All probabilities are exact rationals.
//!
//! Truth tables are indexed by the neighbourhood bits read as a binary
//! number whose most significant bit is the lowest-indexed neighbour.
//! Indices are 0-based in the API and 1-based in the text format:
//!
//! ```text
//! n 2
//! m 1
//! enc 1 1 01
//! dec 1 1 01
//! dec 2 1 01
//! ```

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::subblock::SubblockCodec;

/// Largest message length accepted.
pub const MAX_N: usize = 24;

/// A Boolean function of the bits at `neighbors`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalFunction {
    /// Strictly increasing, 0-based.
    pub neighbors: Vec<usize>,
    /// `2^neighbors.len()` entries.
    pub table: Vec<bool>,
}

impl LocalFunction {
    pub fn new(neighbors: Vec<usize>, table: Vec<bool>) -> Result<Self> {
        if neighbors.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParams("neighbours must be strictly increasing".into()));
        }
        if neighbors.len() > MAX_N || table.len() != 1 << neighbors.len() {
            return Err(Error::InvalidParams(format!(
                "truth table has {} rows for {} neighbours",
                table.len(),
                neighbors.len()
            )));
        }
        Ok(LocalFunction { neighbors, table })
    }

    /// Copy of `bit`.
    pub fn identity(bit: usize) -> Self {
        LocalFunction {
            neighbors: vec![bit],
            table: vec![false, true],
        }
    }

    pub fn constant(v: bool) -> Self {
        LocalFunction {
            neighbors: Vec::new(),
            table: vec![v],
        }
    }

    /// Evaluates on a word given as a bitmask (bit `t` = position `t`).
    pub fn eval(&self, word: u64) -> bool {
        let row = self
            .neighbors
            .iter()
            .fold(0usize, |acc, &t| (acc << 1) | ((word >> t) & 1) as usize);
        self.table[row]
    }
}

/// Encoder and decoder neighbourhoods of a nonadaptive scheme.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemeDescription {
    pub n: usize,
    pub m: usize,
    /// `enc[j]` computes codeword bit `j` from message bits.
    pub enc: Vec<LocalFunction>,
    /// `dec[i]` computes decoded bit `i` from codeword bits.
    pub dec: Vec<LocalFunction>,
}

impl SchemeDescription {
    pub fn new(n: usize, m: usize, enc: Vec<LocalFunction>, dec: Vec<LocalFunction>) -> Result<Self> {
        if n == 0 || n > MAX_N || m > 64 {
            return Err(Error::InvalidParams(format!("need 1 <= n <= {MAX_N} and m <= 64, got n = {n}, m = {m}")));
        }
        if enc.len() != m || dec.len() != n {
            return Err(Error::InvalidParams("one function per codeword bit and per message bit".into()));
        }
        if enc.iter().any(|f| f.neighbors.last().is_some_and(|&t| t >= n))
            || dec.iter().any(|f| f.neighbors.last().is_some_and(|&t| t >= m))
        {
            return Err(Error::InvalidParams("neighbour index out of range".into()));
        }
        Ok(SchemeDescription { n, m, enc, dec })
    }

    /// `C_j = X_j`, `X̂_i = C_i`.
    pub fn identity(n: usize) -> Self {
        let f: Vec<_> = (0..n).map(LocalFunction::identity).collect();
        SchemeDescription::new(n, n, f.clone(), f).expect("valid identity scheme")
    }

    /// Two message bits, one codeword bit `C_1 = X_1`, both bits decoded as
    /// `C_1`.
    pub fn gadget() -> Self {
        SchemeDescription::new(
            2,
            1,
            vec![LocalFunction::identity(0)],
            vec![LocalFunction::identity(0), LocalFunction::identity(0)],
        )
        .expect("valid gadget")
    }

    /// No codeword; every bit decodes to 0.
    pub fn constant_decoder(n: usize) -> Self {
        SchemeDescription::new(n, 0, Vec::new(), vec![LocalFunction::constant(false); n]).expect("valid scheme")
    }

    /// Independent copies side by side.
    pub fn disjoint_copies(&self, k: usize) -> Result<Self> {
        let shift = |f: &LocalFunction, by: usize| LocalFunction {
            neighbors: f.neighbors.iter().map(|&t| t + by).collect(),
            table: f.table.clone(),
        };
        let mut enc = Vec::new();
        let mut dec = Vec::new();
        for c in 0..k {
            enc.extend(self.enc.iter().map(|f| shift(f, c * self.n)));
            dec.extend(self.dec.iter().map(|f| shift(f, c * self.m)));
        }
        SchemeDescription::new(self.n * k, self.m * k, enc, dec)
    }

    /// Naive blocking: blocks of `block` message bits are each coded with the
    /// weight-threshold code with threshold `w`; every codeword bit reads the
    /// whole block and every decoded bit reads the block's whole codeword.
    pub fn blockwise(n: usize, block: usize, w: u32) -> Result<Self> {
        if block == 0 || !n.is_multiple_of(block) || block > 16 {
            return Err(Error::InvalidParams(format!("block {block} must divide n = {n} and be at most 16")));
        }
        let codec = SubblockCodec::with(block as u32, w)?;
        let l = codec.codeword_bits() as usize;
        let rows = 1usize << block;
        let mut enc_tables = vec![vec![false; rows]; l];
        for row in 0..rows {
            let x: Vec<bool> = (0..block).map(|t| (row >> (block - 1 - t)) & 1 == 1).collect();
            for (bit, table) in codec.encode_subblock(&x)?.into_iter().zip(&mut enc_tables) {
                table[row] = bit;
            }
        }
        let cw_rows = 1usize << l;
        let mut dec_tables = vec![vec![false; cw_rows]; block];
        for row in 0..cw_rows {
            let cw: Vec<bool> = (0..l).map(|t| (row >> (l - 1 - t)) & 1 == 1).collect();
            let x = match codec.decode_subblock(&cw) {
                Ok(x) => x,
                Err(Error::MalformedContainer(_)) => vec![false; block],
                Err(e) => return Err(e),
            };
            for (bit, table) in x.into_iter().zip(&mut dec_tables) {
                table[row] = bit;
            }
        }
        let mut enc = Vec::new();
        let mut dec = Vec::new();
        for b in 0..n / block {
            for table in &enc_tables {
                enc.push(LocalFunction::new((b * block..(b + 1) * block).collect(), table.clone())?);
            }
            for table in &dec_tables {
                dec.push(LocalFunction::new((b * l..(b + 1) * l).collect(), table.clone())?);
            }
        }
        SchemeDescription::new(n, enc.len(), enc, dec)
    }

    /// Random scheme with neighbourhoods of at most `max_degree` elements
    /// and uniformly random truth tables.
    pub fn random<R: Rng + ?Sized>(n: usize, m: usize, max_degree: usize, rng: &mut R) -> Result<Self> {
        let pick = |universe: usize, rng: &mut R| {
            let d = rng.gen_range(0..=max_degree.min(universe));
            let mut nb = rand::seq::index::sample(rng, universe, d).into_vec();
            nb.sort_unstable();
            let table = (0..1usize << d).map(|_| rng.gen::<bool>()).collect();
            LocalFunction { neighbors: nb, table }
        };
        let enc = (0..m).map(|_| pick(n, rng)).collect();
        let dec = (0..n).map(|_| pick(m, rng)).collect();
        SchemeDescription::new(n, m, enc, dec)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut n = None;
        let mut m = None;
        let mut enc: Vec<Option<LocalFunction>> = Vec::new();
        let mut dec: Vec<Option<LocalFunction>> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: &str| Error::Parse(format!("line {}: {msg}", lineno + 1));
            let tokens: Vec<&str> = line.split_whitespace().collect();
            let int = |s: &str| s.parse::<usize>().map_err(|_| bad(&format!("not an integer: {s:?}")));
            match tokens[0] {
                "n" | "m" => {
                    if tokens.len() != 2 {
                        return Err(bad("expected one value"));
                    }
                    let v = int(tokens[1])?;
                    if v > 64 {
                        return Err(bad("value too large"));
                    }
                    if tokens[0] == "n" {
                        n = Some(v);
                        dec = vec![None; v];
                    } else {
                        m = Some(v);
                        enc = vec![None; v];
                    }
                }
                kind @ ("enc" | "dec") => {
                    if tokens.len() < 3 {
                        return Err(bad("expected index, neighbours and truth table"));
                    }
                    let slots = if kind == "enc" { &mut enc } else { &mut dec };
                    let idx = int(tokens[1])?;
                    if idx == 0 || idx > slots.len() {
                        return Err(bad("index out of range or declared before n/m"));
                    }
                    let mut neighbors = Vec::new();
                    for t in &tokens[2..tokens.len() - 1] {
                        let v = int(t)?;
                        if v == 0 {
                            return Err(bad("neighbours are 1-based"));
                        }
                        neighbors.push(v - 1);
                    }
                    let table_str = tokens[tokens.len() - 1];
                    if !table_str.bytes().all(|c| c == b'0' || c == b'1') {
                        return Err(bad("truth table must be a 0/1 string"));
                    }
                    let table = table_str.bytes().map(|c| c == b'1').collect();
                    let f = LocalFunction::new(neighbors, table).map_err(|e| bad(&e.to_string()))?;
                    if slots[idx - 1].replace(f).is_some() {
                        return Err(bad("duplicate definition"));
                    }
                }
                other => return Err(bad(&format!("unknown directive {other:?}"))),
            }
        }
        let n = n.ok_or_else(|| Error::Parse("missing n".into()))?;
        let m = m.ok_or_else(|| Error::Parse("missing m".into()))?;
        let collect = |v: Vec<Option<LocalFunction>>, what: &str| {
            v.into_iter()
                .enumerate()
                .map(|(i, f)| f.ok_or_else(|| Error::Parse(format!("missing {what} {}", i + 1))))
                .collect::<Result<Vec<_>>>()
        };
        let enc = collect(enc, "enc")?;
        let dec = collect(dec, "dec")?;
        SchemeDescription::new(n, m, enc, dec).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("n {}\nm {}\n", self.n, self.m);
        for (kind, fs) in [("enc", &self.enc), ("dec", &self.dec)] {
            for (idx, f) in fs.iter().enumerate() {
                write!(out, "{kind} {}", idx + 1).unwrap();
                for t in &f.neighbors {
                    write!(out, " {}", t + 1).unwrap();
                }
                let table: String = f.table.iter().map(|&b| if b { '1' } else { '0' }).collect();
                writeln!(out, " {table}").unwrap();
            }
        }
        out
    }

    /// Codeword of a message given as a bitmask.
    pub fn encode(&self, x: u64) -> u64 {
        self.enc
            .iter()
            .enumerate()
            .fold(0, |acc, (j, f)| acc | ((f.eval(x) as u64) << j))
    }

    pub fn decode(&self, c: u64) -> u64 {
        self.dec
            .iter()
            .enumerate()
            .fold(0, |acc, (i, f)| acc | ((f.eval(c) as u64) << i))
    }

    /// Decoded bit `i` of message `x`.
    pub fn decode_bit(&self, x: u64, i: usize) -> bool {
        let c = self.dec[i]
            .neighbors
            .iter()
            .fold(0u64, |acc, &j| acc | ((self.enc[j].eval(x) as u64) << j));
        self.dec[i].eval(c)
    }

    /// Message bits that can influence `X̂_i`, sorted.
    pub fn effective_neighborhood(&self, i: usize) -> Vec<usize> {
        let mut set: Vec<usize> = self.dec[i]
            .neighbors
            .iter()
            .flat_map(|&j| self.enc[j].neighbors.iter().copied())
            .collect();
        set.sort_unstable();
        set.dedup();
        set
    }

    /// `N_eff(i) ∪ {i}`.
    pub fn augmented_neighborhood(&self, i: usize) -> Vec<usize> {
        let mut set = self.effective_neighborhood(i);
        if let Err(pos) = set.binary_search(&i) {
            set.insert(pos, i);
        }
        set
    }

    /// Exact `P(X̂_i != X_i)`, enumerating `N_eff(i) ∪ {i}` only.
    pub fn exact_bit_error(&self, i: usize, p: &BigRational) -> BigRational {
        let vars = self.augmented_neighborhood(i);
        let mut by_weight = vec![0u64; vars.len() + 1];
        for assignment in 0u64..1 << vars.len() {
            let x = spread(assignment, &vars);
            if self.decode_bit(x, i) != ((x >> i) & 1 == 1) {
                by_weight[assignment.count_ones() as usize] += 1;
            }
        }
        weight_polynomial(&by_weight, p)
    }

    /// Exact probability that some decoded bit is wrong, by enumerating all
    /// `2^n` messages.
    pub fn exact_block_error(&self, p: &BigRational) -> Result<BigRational> {
        if self.n > 20 {
            return Err(Error::InvalidParams(format!("full enumeration needs n <= 20, got {}", self.n)));
        }
        let mut by_weight = vec![0u64; self.n + 1];
        for x in 0u64..1 << self.n {
            if self.decode(self.encode(x)) != x {
                by_weight[x.count_ones() as usize] += 1;
            }
        }
        Ok(weight_polynomial(&by_weight, p))
    }

    pub fn check_error_floor(&self, p: &BigRational) -> Vec<FloorCheck> {
        let q = if p <= &(BigRational::one() - p) {
            p.clone()
        } else {
            BigRational::one() - p
        };
        (0..self.n)
            .map(|i| {
                let p_e = self.exact_bit_error(i, p);
                let eff = self.effective_neighborhood(i).len();
                let aug = self.augmented_neighborhood(i).len();
                let corrected_floor = pow(&q, aug);
                let naive_floor = pow(&(BigRational::one() - p), eff);
                FloorCheck {
                    i,
                    n_eff: eff,
                    holds: p_e.is_zero() || p_e >= corrected_floor,
                    naive_holds: p_e.is_zero() || p_e >= naive_floor,
                    p_e,
                    corrected_floor,
                    naive_floor,
                }
            })
            .collect()
    }

    /// Indices with positive error whose augmented neighbourhoods are
    /// pairwise disjoint, picked greedily in index order.
    pub fn greedy_disjoint_set(&self, p: &BigRational) -> Vec<usize> {
        let mut used = 0u64;
        let mut set = Vec::new();
        for i in 0..self.n {
            let mask = self.augmented_neighborhood(i).iter().fold(0u64, |a, &t| a | 1 << t);
            if mask & used == 0 && !self.exact_bit_error(i, p).is_zero() {
                used |= mask;
                set.push(i);
            }
        }
        set
    }

    pub fn block_error_bound(&self, p: &BigRational) -> Result<BlockErrorBound> {
        let exact = self.exact_block_error(p)?;
        let set = self.greedy_disjoint_set(p);
        let survive = set
            .iter()
            .fold(BigRational::one(), |acc, &i| acc * (BigRational::one() - self.exact_bit_error(i, p)));
        Ok(BlockErrorBound {
            exact,
            bound: BigRational::one() - survive,
            set,
        })
    }

    pub fn degree_report(&self) -> DegreeReport {
        let d: Vec<usize> = self.dec.iter().map(|f| f.neighbors.len()).collect();
        let e: Vec<usize> = self.enc.iter().map(|f| f.neighbors.len()).collect();
        let mut delta_l = vec![0usize; self.n];
        for f in &self.enc {
            for &t in &f.neighbors {
                delta_l[t] += 1;
            }
        }
        let mut delta_r = vec![0usize; self.m];
        for f in &self.dec {
            for &t in &f.neighbors {
                delta_r[t] += 1;
            }
        }
        let max = |v: &[usize]| v.iter().copied().max().unwrap_or(0);
        let avg = |v: &[usize]| Rational::new(v.iter().sum::<usize>() as u64, v.len().max(1) as u64);
        let ratio = |v: &[usize]| {
            let mx = max(v) as u64;
            if mx == 0 {
                Rational::from_integer(1)
            } else {
                Rational::new(v.iter().sum::<usize>() as u64, v.len() as u64 * mx)
            }
        };
        let d_wc = max(&d);
        let e_wc = max(&e);
        let u_wc = max(&delta_l);
        let greedy_size_bound = if d_wc * e_wc == 0 || self.m >= self.n {
            None
        } else {
            Some(Rational::new((self.n - self.m) as u64, (d_wc * e_wc) as u64))
        };
        DegreeReport {
            d_wc,
            e_wc,
            u_wc_proxy: u_wc,
            d_avg: avg(&d),
            e_avg: avg(&e),
            delta_l_avg: avg(&delta_l),
            d_ratio: ratio(&d),
            e_ratio: ratio(&e),
            delta_l_ratio: ratio(&delta_l),
            de_product: d_wc * e_wc,
            du_product: d_wc * u_wc,
            log2_n: (self.n as f64).log2(),
            adaptive_d: ceil_log2(d_wc),
            adaptive_e: ceil_log2(e_wc),
            adaptive_u: ceil_log2(u_wc),
            encoder_identity: e.iter().sum::<usize>() == delta_l.iter().sum::<usize>(),
            decoder_identity: d.iter().sum::<usize>() == delta_r.iter().sum::<usize>(),
            greedy_size_bound,
            d,
            e,
            delta_l,
            delta_r,
        }
    }
}

/// Per-index outcome of the error-floor check.
#[derive(Debug, Clone, PartialEq)]
pub struct FloorCheck {
    pub i: usize,
    pub n_eff: usize,
    pub p_e: BigRational,
    /// `min(p, 1-p)^|N_eff(i) ∪ {i}|`.
    pub corrected_floor: BigRational,
    /// `(1-p)^|N_eff(i)|`.
    pub naive_floor: BigRational,
    pub holds: bool,
    pub naive_holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockErrorBound {
    pub exact: BigRational,
    pub set: Vec<usize>,
    /// `1 - prod_{i in set} (1 - P_e(i))`.
    pub bound: BigRational,
}

/// Degrees of the encoding and decoding graphs.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeReport {
    /// `d_i = |N_d(i)|`.
    pub d: Vec<usize>,
    /// `e_j = |N_e(j)|`.
    pub e: Vec<usize>,
    /// Number of codeword bits reading message bit `i`.
    pub delta_l: Vec<usize>,
    /// Number of decoded bits reading codeword bit `j`.
    pub delta_r: Vec<usize>,
    pub d_wc: usize,
    pub e_wc: usize,
    /// Largest `delta_l`, a lower bound on nonadaptive update cost.
    pub u_wc_proxy: usize,
    pub d_avg: Rational,
    pub e_avg: Rational,
    pub delta_l_avg: Rational,
    /// Average over maximum, 1 when every degree is equal.
    pub d_ratio: Rational,
    pub e_ratio: Rational,
    pub delta_l_ratio: Rational,
    pub de_product: usize,
    pub du_product: usize,
    pub log2_n: f64,
    /// `ceil(log2)` of the worst-case degrees: the adaptive probe counts
    /// whose nonadaptive expansion reaches them.
    pub adaptive_d: u32,
    pub adaptive_e: u32,
    pub adaptive_u: u32,
    /// `sum e_j == sum delta_l`.
    pub encoder_identity: bool,
    /// `sum d_i == sum delta_r`.
    pub decoder_identity: bool,
    /// `n (1 - R) / (d_wc e_wc)`, when positive.
    pub greedy_size_bound: Option<Rational>,
}

/// Exact rational from a non-negative source parameter.
pub fn big_rational(p: &Rational) -> BigRational {
    BigRational::new(BigInt::from(*p.numer()), BigInt::from(*p.denom()))
}

fn ceil_log2(x: usize) -> u32 {
    crate::sparse::ceil_log2(x as u64)
}

fn pow(base: &BigRational, e: usize) -> BigRational {
    (0..e).fold(BigRational::one(), |acc, _| acc * base)
}

/// `sum_w counts[w] p^w (1-p)^(len-1-w)`.
fn weight_polynomial(counts: &[u64], p: &BigRational) -> BigRational {
    let q = BigRational::one() - p;
    let k = counts.len() - 1;
    counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .fold(BigRational::zero(), |acc, (w, &c)| {
            acc + BigRational::from_integer(BigInt::from(c)) * pow(p, w) * pow(&q, k - w)
        })
}

/// Places the bits of `assignment` at positions `vars`.
fn spread(assignment: u64, vars: &[usize]) -> u64 {
    vars.iter()
        .enumerate()
        .fold(0, |acc, (t, &v)| acc | (((assignment >> t) & 1) << v))
}
