use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::sparse::SparseParams;
use crate::subblock::codeword_bits;

/// Bits of the fixed container header.
pub const HEADER_BITS: u64 = 8 * super::format::HEADER_LEN as u64;

/// Parameters of the block/subblock compressor.
///
/// The message is zero-padded to a whole number of blocks of `b1` bits. Each
/// block is split into `b1 / b0` subblocks; each subblock gets an `L`-bit
/// codeword, and the atypical subblocks of a block are kept verbatim in a
/// sparse structure of capacity `beta` whose internal block length is `b0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemeParams {
    pub n: u64,
    pub p: Rational,
    pub epsilon: Rational,
    pub b0: u32,
    pub w0: u32,
    pub b1: u64,
    pub beta: u64,
    codeword_bits: u32,
}

impl SchemeParams {
    pub fn new(n: u64, p: Rational, epsilon: Rational, b0: u32, w0: u32, b1: u64, beta: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParams("message length must be positive".into()));
        }
        if p * 2 >= Rational::from_integer(1) {
            return Err(Error::InvalidParams(format!("source parameter {p} must be below 1/2")));
        }
        if b0 == 0 || w0 > b0 {
            return Err(Error::InvalidParams(format!("bad subblock geometry b0 = {b0}, w0 = {w0}")));
        }
        if b1 == 0 || !b1.is_multiple_of(b0 as u64) {
            return Err(Error::InvalidParams(format!("b0 = {b0} must divide b1 = {b1}")));
        }
        SparseParams::new(b1, b0, beta)?;
        let fields = [*p.numer(), *p.denom(), *epsilon.numer(), *epsilon.denom(), b1, beta];
        if fields.iter().any(|&v| v > u32::MAX as u64) {
            return Err(Error::InvalidParams("parameters must fit in 32 bits".into()));
        }
        Ok(SchemeParams {
            n,
            p,
            epsilon,
            b0,
            w0,
            b1,
            beta,
            codeword_bits: codeword_bits(b0, w0),
        })
    }

    /// `L`, the subcodeword length.
    pub fn codeword_bits(&self) -> u32 {
        self.codeword_bits
    }

    pub fn subblocks_per_block(&self) -> u64 {
        self.b1 / self.b0 as u64
    }

    pub fn sparse(&self) -> SparseParams {
        SparseParams {
            b: self.b1,
            b1: self.b0,
            beta: self.beta,
        }
    }

    pub fn n_blocks(&self) -> u64 {
        self.n.div_ceil(self.b1)
    }

    pub fn padded_n(&self) -> u64 {
        self.n_blocks() * self.b1
    }

    /// `W`: subcodewords plus sparse structure of one block.
    pub fn region_bits(&self) -> u64 {
        self.subblocks_per_block() * self.codeword_bits as u64 + self.sparse().total_bits()
    }

    /// Region width plus the failure flag.
    pub fn stride(&self) -> u64 {
        self.region_bits() + 1
    }

    pub fn payload_bits(&self) -> u64 {
        self.n_blocks() * self.stride()
    }

    /// Container size in bits over message length, header included.
    pub fn rate(&self) -> Rational {
        Rational::new(self.payload_bits() + HEADER_BITS, self.n)
    }

    /// Rate without the header.
    pub fn payload_rate(&self) -> Rational {
        Rational::new(self.payload_bits(), self.n)
    }

    /// Worst-case probes of a local decode: flag, status, then either the
    /// pointer and one stored bit or the whole subcodeword.
    pub fn decode_bound(&self) -> u64 {
        let sp = self.sparse();
        2 + (sp.pointer_bits() as u64 + 1).max(self.codeword_bits as u64)
    }

    /// Worst-case probes of a local update, maximized over the four
    /// typical/atypical transitions.
    pub fn update_bound(&self) -> u64 {
        let sp = self.sparse();
        let l = self.codeword_bits as u64;
        let b0 = self.b0 as u64;
        let bp = sp.pointer_bits() as u64;
        let cw = sp.counter_bits() as u64;
        let bm = sp.chunk_bits() as u64;
        let typical_to_typical = 2 + 2 * l;
        let atypical_to_atypical = 3 + bp + b0;
        let typical_to_atypical = 3 + 2 * l + 2 * cw + bp + bm;
        let atypical_to_typical = 3 + 2 * bp + b0 + l + 2 * cw + 2 * bm;
        typical_to_typical
            .max(atypical_to_atypical)
            .max(typical_to_atypical)
            .max(atypical_to_typical)
    }
}
