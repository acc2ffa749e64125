use super::params::SchemeParams;
use crate::bitstore::{BitStore, Probe, Unmetered};
use crate::error::{Error, Result};
use crate::sparse::SparseLayout;
use crate::subblock::{weight, SubblockCodec};

/// Which path a local update took.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Transition {
    /// The bit already had the requested value.
    Unchanged,
    TypicalToTypical,
    TypicalToAtypical,
    AtypicalToAtypical,
    AtypicalToTypical,
}

/// Output of a global decode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decoded {
    /// The `n` message bits; bits of failed blocks are a best-effort guess.
    pub bits: Vec<bool>,
    pub failed_blocks: Vec<u64>,
}

/// A compressed message: one fixed-width region per block.
///
/// Region `i` starts at bit `i * stride` and holds the failure flag, the
/// `b1 / b0` subcodewords and the sparse structure over the block's error
/// vector, in that order.
#[derive(Clone)]
pub struct Container {
    params: SchemeParams,
    codec: SubblockCodec,
    store: BitStore,
}

impl std::fmt::Debug for Container {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Container")
            .field("params", &self.params)
            .field("store", &self.store)
            .finish()
    }
}

impl Container {
    /// Compresses `x`, which must hold exactly `params.n` bits.
    pub fn encode(x: &[bool], params: &SchemeParams) -> Result<Container> {
        if x.len() as u64 != params.n {
            return Err(Error::Length {
                expected: params.n as usize,
                actual: x.len(),
            });
        }
        let codec = SubblockCodec::with(params.b0, params.w0)?;
        let mut c = Container {
            store: BitStore::new(params.payload_bits()),
            params: params.clone(),
            codec,
        };
        let b1 = params.b1 as usize;
        let mut block = vec![false; b1];
        for i in 0..params.n_blocks() {
            let start = i as usize * b1;
            let end = (start + b1).min(x.len());
            block.fill(false);
            block[..end - start].copy_from_slice(&x[start..end]);
            c.encode_block(i, &block)?;
        }
        Ok(c)
    }

    /// Wraps a payload store; the store must have exactly the payload size.
    pub fn from_parts(params: SchemeParams, store: BitStore) -> Result<Container> {
        if store.capacity() != params.payload_bits() {
            return Err(Error::MalformedContainer(format!(
                "payload holds {} bits, parameters need {}",
                store.capacity(),
                params.payload_bits()
            )));
        }
        let codec = SubblockCodec::with(params.b0, params.w0)?;
        Ok(Container { params, codec, store })
    }

    pub fn params(&self) -> &SchemeParams {
        &self.params
    }

    pub fn codec(&self) -> &SubblockCodec {
        &self.codec
    }

    pub fn store(&self) -> &BitStore {
        &self.store
    }

    pub fn region_start(&self, block: u64) -> u64 {
        block * self.params.stride()
    }

    pub fn flag_addr(&self, block: u64) -> u64 {
        self.region_start(block)
    }

    pub fn codeword_addr(&self, block: u64, sub: u64) -> u64 {
        self.region_start(block) + 1 + sub * self.params.codeword_bits() as u64
    }

    pub fn sparse_layout(&self, block: u64) -> SparseLayout {
        let k = self.params.subblocks_per_block();
        SparseLayout::at(self.params.sparse(), self.codeword_addr(block, k))
    }

    fn locate(&self, i: u64) -> Result<(u64, u64, u32)> {
        if i >= self.params.n {
            return Err(Error::Address {
                addr: i,
                capacity: self.params.n,
            });
        }
        let block = i / self.params.b1;
        let within = i % self.params.b1;
        let b0 = self.params.b0 as u64;
        Ok((block, within / b0, (within % b0) as u32))
    }

    fn encode_block(&mut self, block: u64, data: &[bool]) -> Result<()> {
        let p = &self.params;
        let b0 = p.b0 as usize;
        let l = p.codeword_bits() as usize;
        let mut errors = vec![false; data.len()];
        let mut atypical = 0u64;
        let mut cw = vec![false; l];
        for (j, sub) in data.chunks(b0).enumerate() {
            self.codec.encode_into(sub, &mut cw)?;
            self.store
                .write_bits(&mut Unmetered, self.codeword_addr(block, j as u64), &cw)?;
            if weight(sub) > p.w0 {
                atypical += 1;
                if atypical <= p.beta {
                    errors[j * b0..(j + 1) * b0].copy_from_slice(sub);
                }
            }
        }
        self.store.set(self.flag_addr(block), atypical > p.beta)?;
        let lay = self.sparse_layout(block);
        lay.init_encode(&mut self.store, &mut Unmetered, &errors)
    }

    pub fn is_failed(&self, block: u64) -> Result<bool> {
        self.store.get(self.flag_addr(block))
    }

    pub fn failed_blocks(&self) -> Vec<u64> {
        (0..self.params.n_blocks())
            .filter(|&b| self.store.get(self.flag_addr(b)).unwrap_or(true))
            .collect()
    }

    /// Decodes the whole message.
    pub fn decode(&self) -> Result<Decoded> {
        let p = &self.params;
        let b0 = p.b0 as usize;
        let l = p.codeword_bits() as usize;
        let mut bits = Vec::with_capacity(p.padded_n() as usize);
        let mut failed_blocks = Vec::new();
        let mut cw = vec![false; l];
        let mut sub = vec![false; b0];
        for block in 0..p.n_blocks() {
            if self.is_failed(block)? {
                failed_blocks.push(block);
            }
            let lay = self.sparse_layout(block);
            for j in 0..p.subblocks_per_block() {
                if lay.read_status(&self.store, &mut Unmetered, j)? {
                    let chunk = lay.read_pointer(&self.store, &mut Unmetered, j)?;
                    lay.read_data(&self.store, &mut Unmetered, chunk, &mut sub)?;
                } else {
                    self.store
                        .read_bits(&mut Unmetered, self.codeword_addr(block, j), &mut cw)?;
                    self.codec.decode_prefix(&cw, &mut sub)?;
                }
                bits.extend_from_slice(&sub);
            }
        }
        bits.truncate(p.n as usize);
        Ok(Decoded { bits, failed_blocks })
    }

    /// Recovers message bit `i` from its block's region alone.
    pub fn local_decode<P: Probe + ?Sized>(&self, i: u64, probe: &mut P) -> Result<bool> {
        let (block, sub, offset) = self.locate(i)?;
        if self.store.read_bit(probe, self.flag_addr(block))? {
            return Err(Error::BlockFailed { block });
        }
        let lay = self.sparse_layout(block);
        if lay.read_status(&self.store, probe, sub)? {
            let chunk = lay.read_pointer(&self.store, probe, sub)?;
            return lay.read_data_bit(&self.store, probe, chunk, offset);
        }
        let mut cw = vec![false; self.params.codeword_bits() as usize];
        self.store.read_bits(probe, self.codeword_addr(block, sub), &mut cw)?;
        let mut prefix = vec![false; offset as usize + 1];
        self.codec.decode_prefix(&cw, &mut prefix)?;
        Ok(prefix[offset as usize])
    }

    /// Sets message bit `i` to `v`, touching only its block's region.
    ///
    /// When a subblock turns atypical and its block's table is full, the
    /// block is flagged failed and [`Error::CapacityExceeded`] is returned.
    pub fn local_update<P: Probe + ?Sized>(&mut self, i: u64, v: bool, probe: &mut P) -> Result<Transition> {
        let (block, sub, offset) = self.locate(i)?;
        if self.store.read_bit(probe, self.flag_addr(block))? {
            return Err(Error::BlockFailed { block });
        }
        let lay = self.sparse_layout(block);
        let cw_addr = self.codeword_addr(block, sub);
        let l = self.params.codeword_bits() as usize;
        let mut data = vec![false; self.params.b0 as usize];
        let stored = if lay.read_status(&self.store, probe, sub)? {
            let chunk = lay.read_pointer(&self.store, probe, sub)?;
            lay.read_data(&self.store, probe, chunk, &mut data)?;
            Some(chunk)
        } else {
            let mut cw = vec![false; l];
            self.store.read_bits(probe, cw_addr, &mut cw)?;
            self.codec.decode_prefix(&cw, &mut data)?;
            None
        };
        if data[offset as usize] == v {
            return Ok(Transition::Unchanged);
        }
        data[offset as usize] = v;
        let typical = weight(&data) <= self.params.w0;
        match (stored, typical) {
            (None, true) => {
                let mut cw = vec![false; l];
                self.codec.encode_into(&data, &mut cw)?;
                self.store.write_bits(probe, cw_addr, &cw)?;
                Ok(Transition::TypicalToTypical)
            }
            (None, false) => {
                if let Err(e) = lay.insert_block(&mut self.store, probe, sub, &data) {
                    if matches!(e, Error::CapacityExceeded { .. }) {
                        self.store.write_bit(probe, self.flag_addr(block), true)?;
                    }
                    return Err(e);
                }
                self.store.write_bits(probe, cw_addr, &vec![false; l])?;
                Ok(Transition::TypicalToAtypical)
            }
            (Some(chunk), false) => {
                lay.write_data_bit(&mut self.store, probe, chunk, offset, v)?;
                Ok(Transition::AtypicalToAtypical)
            }
            (Some(chunk), true) => {
                let mut cw = vec![false; l];
                self.codec.encode_into(&data, &mut cw)?;
                self.store.write_bits(probe, cw_addr, &cw)?;
                lay.remove_block(&mut self.store, probe, sub, chunk)?;
                Ok(Transition::AtypicalToTypical)
            }
        }
    }

    /// Rewrites the sparse structure of every non-failed block in canonical
    /// form: chunks ordered by subblock, pointers of empty subblocks and
    /// unused chunks zeroed. The represented message does not change.
    pub fn canonicalize(&mut self) -> Result<()> {
        for block in 0..self.params.n_blocks() {
            if !self.is_failed(block)? {
                self.sparse_layout(block).normalize(&mut self.store)?;
            }
        }
        Ok(())
    }

    /// Full-scan check that every non-failed block's sparse structure is
    /// consistent and agrees with the typicality of its subblocks.
    pub fn check_invariants(&self) -> Result<(), String> {
        let p = &self.params;
        let l = p.codeword_bits() as usize;
        let mut cw = vec![false; l];
        for block in 0..p.n_blocks() {
            if self.is_failed(block).map_err(|e| e.to_string())? {
                continue;
            }
            let lay = self.sparse_layout(block);
            lay.check_canonical(&self.store)
                .map_err(|e| format!("block {block}: {e}"))?;
            for j in 0..p.subblocks_per_block() {
                let status = self.store.get(lay.status + j).map_err(|e| e.to_string())?;
                self.store
                    .read_bits(&mut Unmetered, self.codeword_addr(block, j), &mut cw)
                    .map_err(|e| e.to_string())?;
                let zero_cw = cw.iter().all(|&b| !b);
                if status && !zero_cw {
                    return Err(format!("block {block} subblock {j}: stored but codeword nonzero"));
                }
                if !status && zero_cw {
                    return Err(format!("block {block} subblock {j}: atypical codeword but not stored"));
                }
            }
        }
        Ok(())
    }

    /// Blocks whose regions differ between two containers with equal
    /// parameters.
    pub fn differing_blocks(&self, other: &Container) -> Vec<u64> {
        let stride = self.params.stride();
        (0..self.params.n_blocks())
            .filter(|&b| {
                let start = b * stride;
                (start..start + stride).any(|a| self.store.get(a).ok() != other.store.get(a).ok())
            })
            .collect()
    }
}
