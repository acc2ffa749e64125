//! Byte layout of a container file.
//!
//! ```text
//! offset  size  field
//!      0     4  magic "LDC1"
//!      4     1  version (1)
//!      5     8  n
//!     13    16  p numerator, p denominator, epsilon numerator, epsilon denominator
//!     29    16  b0, w0, b1, beta
//!     45     8  payload length in bits
//!     53     -  payload, MSB first, zero-padded to a byte
//! ```
//!
//! All integers are big-endian. Region offsets are derived from the
//! parameters and never stored.

use super::container::Container;
use super::params::SchemeParams;
use crate::bitstore::BitStore;
use crate::error::{Error, Result};
use crate::rational::Rational;

pub const MAGIC: &[u8; 4] = b"LDC1";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 53;

/// Byte offset of payload bit `addr` inside a serialized container.
pub fn payload_byte(addr: u64) -> u64 {
    HEADER_LEN as u64 + addr / 8
}

pub fn write_header(params: &SchemeParams, out: &mut Vec<u8>) {
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    out.extend_from_slice(&params.n.to_be_bytes());
    for v in [
        *params.p.numer(),
        *params.p.denom(),
        *params.epsilon.numer(),
        *params.epsilon.denom(),
        params.b0 as u64,
        params.w0 as u64,
        params.b1,
        params.beta,
    ] {
        // SchemeParams::new guarantees every field fits in 32 bits.
        out.extend_from_slice(&(v as u32).to_be_bytes());
    }
    out.extend_from_slice(&params.payload_bits().to_be_bytes());
}

pub fn read_header(bytes: &[u8]) -> Result<SchemeParams> {
    let bad = |msg: &str| Error::MalformedContainer(msg.to_string());
    if bytes.len() < HEADER_LEN {
        return Err(bad("truncated header"));
    }
    if &bytes[..4] != MAGIC {
        return Err(bad("bad magic"));
    }
    if bytes[4] != VERSION {
        return Err(Error::MalformedContainer(format!("unsupported version {}", bytes[4])));
    }
    let u64_at = |off: usize| u64::from_be_bytes(bytes[off..off + 8].try_into().unwrap());
    let u32_at = |off: usize| u32::from_be_bytes(bytes[off..off + 4].try_into().unwrap()) as u64;
    let n = u64_at(5);
    let f: Vec<u64> = (0..8).map(|i| u32_at(13 + 4 * i)).collect();
    if f[1] == 0 || f[3] == 0 {
        return Err(bad("zero denominator"));
    }
    let params = SchemeParams::new(
        n,
        Rational::new(f[0], f[1]),
        Rational::new(f[2], f[3]),
        f[4] as u32,
        f[5] as u32,
        f[6],
        f[7],
    )
    .map_err(|e| Error::MalformedContainer(format!("bad parameters: {e}")))?;
    let payload_bits = u64_at(45);
    if payload_bits != params.payload_bits() {
        return Err(Error::MalformedContainer(format!(
            "payload length {payload_bits} does not match parameters ({})",
            params.payload_bits()
        )));
    }
    Ok(params)
}

impl Container {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.store().capacity().div_ceil(8) as usize);
        write_header(self.params(), &mut out);
        out.extend_from_slice(&self.store().to_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Container> {
        let params = read_header(bytes)?;
        let store = BitStore::from_bytes(&bytes[HEADER_LEN..], params.payload_bits())
            .map_err(|e| Error::MalformedContainer(format!("payload: {e}")))?;
        Container::from_parts(params, store)
    }
}
