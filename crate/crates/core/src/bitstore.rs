//! Fixed-capacity bit arrays with exact probe accounting.
//!
//! Every locality figure reported by this crate is measured here: each
//! metered read or write of a single bit is reported to a [`Probe`] sink.
//! The sink is passed explicitly to every operation, so a composite
//! operation (a sparse update, a container update) aggregates the probes of
//! everything it touches into one ledger.
//!
//! Fields are stored most significant bit first: the bit at `offset` is the
//! high-order bit of the value.

use crate::error::{Error, Result};

/// Receives one event per physical bit touched.
pub trait Probe {
    fn on_read(&mut self, addr: u64);
    fn on_write(&mut self, addr: u64, bit: bool);
}

/// Sink that drops every event. Used by the global encoder and decoder,
/// which are not subject to locality accounting.
#[derive(Debug, Default, Clone, Copy)]
pub struct Unmetered;

impl Probe for Unmetered {
    #[inline]
    fn on_read(&mut self, _addr: u64) {}
    #[inline]
    fn on_write(&mut self, _addr: u64, _bit: bool) {}
}

/// Counts reads and writes without remembering addresses.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct ProbeCounter {
    pub reads: u64,
    pub writes: u64,
}

impl ProbeCounter {
    pub fn probe_count(&self) -> u64 {
        self.reads + self.writes
    }
}

impl Probe for ProbeCounter {
    #[inline]
    fn on_read(&mut self, _addr: u64) {
        self.reads += 1;
    }
    #[inline]
    fn on_write(&mut self, _addr: u64, _bit: bool) {
        self.writes += 1;
    }
}

/// Full record of one logical operation: every address read, and every
/// `(address, new bit)` written, in order. A bit probed twice counts twice.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct ProbeLedger {
    reads: Vec<u64>,
    writes: Vec<(u64, bool)>,
}

impl ProbeLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn reads(&self) -> &[u64] {
        &self.reads
    }

    pub fn writes(&self) -> &[(u64, bool)] {
        &self.writes
    }

    pub fn probe_count(&self) -> u64 {
        (self.reads.len() + self.writes.len()) as u64
    }

    /// Applies the recorded writes, in order, onto `store` without metering.
    pub fn replay_writes(&self, store: &mut BitStore) -> Result<()> {
        for &(addr, bit) in &self.writes {
            store.set(addr, bit)?;
        }
        Ok(())
    }
}

impl Probe for ProbeLedger {
    fn on_read(&mut self, addr: u64) {
        self.reads.push(addr);
    }
    fn on_write(&mut self, addr: u64, bit: bool) {
        self.writes.push((addr, bit));
    }
}

/// A fixed-capacity array of bits.
#[derive(Clone, PartialEq, Eq)]
pub struct BitStore {
    words: Vec<u64>,
    capacity: u64,
}

impl std::fmt::Debug for BitStore {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BitStore")
            .field("capacity", &self.capacity)
            .finish_non_exhaustive()
    }
}

impl BitStore {
    /// An all-zero store of `capacity` bits.
    pub fn new(capacity: u64) -> Self {
        let words = capacity.div_ceil(64) as usize;
        BitStore {
            words: vec![0; words],
            capacity,
        }
    }

    /// Builds a store from bits packed most significant bit first. Trailing
    /// bits of the last byte beyond `capacity` must be zero.
    pub fn from_bytes(bytes: &[u8], capacity: u64) -> Result<Self> {
        if bytes.len() as u64 != capacity.div_ceil(8) {
            return Err(Error::Length {
                expected: capacity.div_ceil(8) as usize,
                actual: bytes.len(),
            });
        }
        let mut store = BitStore::new(capacity);
        for (chunk_idx, chunk) in bytes.chunks(8).enumerate() {
            let mut buf = [0u8; 8];
            buf[..chunk.len()].copy_from_slice(chunk);
            store.words[chunk_idx] = u64::from_be_bytes(buf);
        }
        if !capacity.is_multiple_of(64) {
            let last = store.words.len() - 1;
            let keep = capacity % 64;
            if store.words[last] << keep != 0 {
                return Err(Error::MalformedContainer(
                    "nonzero padding after the last payload bit".into(),
                ));
            }
        }
        Ok(store)
    }

    /// Bits packed most significant bit first, zero-padded to a byte.
    pub fn to_bytes(&self) -> Vec<u8> {
        let len = self.capacity.div_ceil(8) as usize;
        let mut out = Vec::with_capacity(self.words.len() * 8);
        for w in &self.words {
            out.extend_from_slice(&w.to_be_bytes());
        }
        out.truncate(len);
        out
    }

    pub fn capacity(&self) -> u64 {
        self.capacity
    }

    #[inline]
    fn check(&self, addr: u64) -> Result<()> {
        if addr < self.capacity {
            Ok(())
        } else {
            Err(Error::Address {
                addr,
                capacity: self.capacity,
            })
        }
    }

    #[inline]
    fn check_range(&self, offset: u64, width: u32) -> Result<()> {
        match offset.checked_add(width as u64) {
            Some(end) if end <= self.capacity => Ok(()),
            _ => Err(Error::Address {
                addr: offset.saturating_add(width as u64).saturating_sub(1),
                capacity: self.capacity,
            }),
        }
    }

    /// Unmetered read, for inspection and tests.
    #[inline]
    pub fn get(&self, addr: u64) -> Result<bool> {
        self.check(addr)?;
        Ok(self.raw(addr))
    }

    /// Unmetered write, for inspection and tests.
    #[inline]
    pub fn set(&mut self, addr: u64, v: bool) -> Result<()> {
        self.check(addr)?;
        self.raw_set(addr, v);
        Ok(())
    }

    /// Unmetered field read, for inspection and tests.
    pub fn get_field(&self, offset: u64, width: u32) -> Result<u64> {
        self.read_field(&mut Unmetered, offset, width)
    }

    #[inline]
    fn raw(&self, addr: u64) -> bool {
        (self.words[(addr / 64) as usize] >> (63 - addr % 64)) & 1 == 1
    }

    #[inline]
    fn raw_set(&mut self, addr: u64, v: bool) {
        let mask = 1u64 << (63 - addr % 64);
        let w = &mut self.words[(addr / 64) as usize];
        if v {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    #[inline]
    pub fn read_bit<P: Probe + ?Sized>(&self, probe: &mut P, addr: u64) -> Result<bool> {
        self.check(addr)?;
        probe.on_read(addr);
        Ok(self.raw(addr))
    }

    /// Writes `v` at `addr`. The write is recorded even when `v` equals the
    /// stored bit.
    #[inline]
    pub fn write_bit<P: Probe + ?Sized>(&mut self, probe: &mut P, addr: u64, v: bool) -> Result<()> {
        self.check(addr)?;
        probe.on_write(addr, v);
        self.raw_set(addr, v);
        Ok(())
    }

    /// Reads `width <= 64` bits starting at `offset` as an unsigned integer.
    pub fn read_field<P: Probe + ?Sized>(&self, probe: &mut P, offset: u64, width: u32) -> Result<u64> {
        if width > 64 {
            return Err(Error::InvalidParams(format!("field width {width} > 64")));
        }
        Ok(self.read_wide_field(probe, offset, width)? as u64)
    }

    /// Writes all `width <= 64` bits of `value` starting at `offset`.
    pub fn write_field<P: Probe + ?Sized>(
        &mut self,
        probe: &mut P,
        offset: u64,
        width: u32,
        value: u64,
    ) -> Result<()> {
        if width > 64 {
            return Err(Error::InvalidParams(format!("field width {width} > 64")));
        }
        self.write_wide_field(probe, offset, width, value as u128)
    }

    /// Like [`read_field`](Self::read_field) for fields up to 128 bits wide.
    pub fn read_wide_field<P: Probe + ?Sized>(
        &self,
        probe: &mut P,
        offset: u64,
        width: u32,
    ) -> Result<u128> {
        if width > 128 {
            return Err(Error::InvalidParams(format!("field width {width} > 128")));
        }
        self.check_range(offset, width)?;
        let mut value = 0u128;
        for k in 0..width as u64 {
            probe.on_read(offset + k);
            value = (value << 1) | self.raw(offset + k) as u128;
        }
        Ok(value)
    }

    /// Like [`write_field`](Self::write_field) for fields up to 128 bits wide.
    pub fn write_wide_field<P: Probe + ?Sized>(
        &mut self,
        probe: &mut P,
        offset: u64,
        width: u32,
        value: u128,
    ) -> Result<()> {
        if width > 128 {
            return Err(Error::InvalidParams(format!("field width {width} > 128")));
        }
        if width < 128 && value >> width != 0 {
            return Err(Error::FieldOverflow { value, width });
        }
        self.check_range(offset, width)?;
        for k in 0..width {
            let bit = (value >> (width - 1 - k)) & 1 == 1;
            let addr = offset + k as u64;
            probe.on_write(addr, bit);
            self.raw_set(addr, bit);
        }
        Ok(())
    }

    /// Reads `dst.len()` consecutive bits starting at `offset`.
    pub fn read_bits<P: Probe + ?Sized>(&self, probe: &mut P, offset: u64, dst: &mut [bool]) -> Result<()> {
        self.check_range(offset, dst.len() as u32)?;
        for (k, slot) in dst.iter_mut().enumerate() {
            probe.on_read(offset + k as u64);
            *slot = self.raw(offset + k as u64);
        }
        Ok(())
    }

    /// Writes `src` as consecutive bits starting at `offset`.
    pub fn write_bits<P: Probe + ?Sized>(&mut self, probe: &mut P, offset: u64, src: &[bool]) -> Result<()> {
        self.check_range(offset, src.len() as u32)?;
        for (k, &bit) in src.iter().enumerate() {
            probe.on_write(offset + k as u64, bit);
            self.raw_set(offset + k as u64, bit);
        }
        Ok(())
    }

    /// Copies `width` bits between two regions of this store, reading the
    /// whole source before writing.
    pub fn copy_bits<P: Probe + ?Sized>(&mut self, probe: &mut P, from: u64, to: u64, width: u32) -> Result<()> {
        let mut buf = vec![false; width as usize];
        self.read_bits(probe, from, &mut buf)?;
        self.write_bits(probe, to, &buf)
    }

    /// Iterator over all bits, unmetered.
    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.capacity).map(move |a| self.raw(a))
    }
}
