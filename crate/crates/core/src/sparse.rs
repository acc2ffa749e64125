//! Dynamic succinct structure for sparse bit vectors.
//!
//! A vector of `b` bits is cut into `b / b1` blocks. Only nonzero blocks are
//! stored, each in a chunk of a memory table of `beta` chunks. The encoding
//! is the concatenation of four regions:
//!
//! | region          | size                          | content                                   |
//! |-----------------|-------------------------------|-------------------------------------------|
//! | status bits     | `b / b1`                      | bit `i` is set iff block `i` is nonzero    |
//! | memory table    | `beta * (b1 + b_r)`           | chunk = block data + reverse pointer       |
//! | memory pointers | `(b / b1) * b_p`              | chunk index of each nonzero block          |
//! | counter         | `c_w`                         | number of nonzero blocks                  |
//!
//! with `b_p = ceil(log2 beta)`, `b_r = ceil(log2(b / b1))` and
//! `c_w = ceil(log2(beta + 1))`. Chunks `0..c` hold exactly the `c` nonzero
//! blocks; deleting a block moves the last occupied chunk into the freed
//! slot and repoints its owner through the reverse pointer. The pointer of a
//! zero block and the content of chunks at or past the counter are not
//! meaningful.
//!
//! Decoding a bit costs one probe for a zero block and `2 + b_p` otherwise.
//! The costliest update empties a block whose chunk is not the last one and
//! touches `2 + 2 b_p + 2 c_w + b1 + 2 (b1 + b_r)` bits.

use std::fmt::Write as _;

use crate::bitstore::{BitStore, Probe, Unmetered};
use crate::error::{Error, Result};

/// `ceil(log2(x))`, with `ceil_log2(0) = ceil_log2(1) = 0`.
pub fn ceil_log2(x: u64) -> u32 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}

/// Parameters of the structure: vector length, block length and capacity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SparseParams {
    pub b: u64,
    pub b1: u32,
    pub beta: u64,
}

impl SparseParams {
    pub fn new(b: u64, b1: u32, beta: u64) -> Result<Self> {
        if b1 == 0 || b == 0 {
            return Err(Error::InvalidParams("b and b1 must be positive".into()));
        }
        if !b.is_multiple_of(b1 as u64) {
            return Err(Error::InvalidParams(format!("b1 = {b1} does not divide b = {b}")));
        }
        let n_blocks = b / b1 as u64;
        if beta == 0 || beta > n_blocks {
            return Err(Error::InvalidParams(format!(
                "capacity beta = {beta} must lie in [1, {n_blocks}]"
            )));
        }
        Ok(SparseParams { b, b1, beta })
    }

    pub fn n_blocks(&self) -> u64 {
        self.b / self.b1 as u64
    }

    /// `b_p`: width of a memory pointer.
    pub fn pointer_bits(&self) -> u32 {
        ceil_log2(self.beta)
    }

    /// `b_r`: width of a reverse pointer.
    pub fn reverse_bits(&self) -> u32 {
        ceil_log2(self.n_blocks())
    }

    /// `b_m = b1 + b_r`: width of a chunk.
    pub fn chunk_bits(&self) -> u32 {
        self.b1 + self.reverse_bits()
    }

    /// `c_w`: the counter ranges over `0..=beta`.
    pub fn counter_bits(&self) -> u32 {
        ceil_log2(self.beta + 1)
    }

    pub fn total_bits(&self) -> u64 {
        let nb = self.n_blocks();
        nb + self.beta * self.chunk_bits() as u64 + nb * self.pointer_bits() as u64 + self.counter_bits() as u64
    }

    /// The nominal space count, with every logarithm rounded up and the
    /// counter sized `ceil(log2 beta)` bits.
    pub fn nominal_space_bits(&self) -> u64 {
        let nb = self.n_blocks();
        let bp = self.pointer_bits() as u64;
        nb + self.beta * (self.b1 as u64 + self.reverse_bits() as u64) + nb * bp + bp
    }

    /// Worst-case probes of [`SparseLayout::decode_bit`].
    pub fn decode_bound(&self) -> u64 {
        2 + self.pointer_bits() as u64
    }

    /// Worst-case probes of [`SparseLayout::update_bit`] (the delete-and-move
    /// path).
    pub fn update_bound(&self) -> u64 {
        2 + 2 * self.pointer_bits() as u64
            + 2 * self.counter_bits() as u64
            + self.b1 as u64
            + 2 * self.chunk_bits() as u64
    }

    /// Itemized count `2 + 4 b_p + 2 b_m`, which leaves out the freed data bits
    /// and sizes the counter like a pointer. Reported for comparison only.
    pub fn short_update_itemized(&self) -> u64 {
        let bp = self.pointer_bits() as u64;
        2 + bp + 2 * bp + 2 * self.chunk_bits() as u64 + bp
    }

    /// Simplified count `2 + b1 + 4 b_p + b_r`. Reported for comparison only.
    pub fn short_update_simplified(&self) -> u64 {
        2 + self.b1 as u64 + 4 * self.pointer_bits() as u64 + self.reverse_bits() as u64
    }
}

/// Absolute bit offsets of the four regions inside a [`BitStore`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SparseLayout {
    pub params: SparseParams,
    pub base: u64,
    pub status: u64,
    pub table: u64,
    pub pointers: u64,
    pub counter: u64,
    pub total_bits: u64,
}

/// Layout of a structure starting at bit 0.
pub fn layout(params: SparseParams) -> SparseLayout {
    SparseLayout::at(params, 0)
}

/// Allocates a store and writes the initial encoding of `x` into it.
pub fn init_encode(x: &[bool], params: SparseParams) -> Result<BitStore> {
    let lay = layout(params);
    let mut store = BitStore::new(lay.total_bits);
    lay.init_encode(&mut store, &mut Unmetered, x)?;
    Ok(store)
}

/// Fully decoded view of a structure, for inspection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseState {
    pub status: Vec<bool>,
    pub pointers: Vec<u64>,
    /// `(data, reverse pointer)` for every chunk, occupied or not.
    pub chunks: Vec<(Vec<bool>, u64)>,
    pub counter: u64,
}

impl SparseLayout {
    pub fn at(params: SparseParams, base: u64) -> Self {
        let nb = params.n_blocks();
        let status = base;
        let table = status + nb;
        let pointers = table + params.beta * params.chunk_bits() as u64;
        let counter = pointers + nb * params.pointer_bits() as u64;
        let total_bits = params.total_bits();
        debug_assert_eq!(counter + params.counter_bits() as u64, base + total_bits);
        SparseLayout {
            params,
            base,
            status,
            table,
            pointers,
            counter,
            total_bits,
        }
    }

    pub fn end(&self) -> u64 {
        self.base + self.total_bits
    }

    fn check_block(&self, block: u64) -> Result<()> {
        if block < self.params.n_blocks() {
            Ok(())
        } else {
            Err(Error::Address {
                addr: block,
                capacity: self.params.n_blocks(),
            })
        }
    }

    fn check_index(&self, i: u64) -> Result<()> {
        if i < self.params.b {
            Ok(())
        } else {
            Err(Error::Address {
                addr: i,
                capacity: self.params.b,
            })
        }
    }

    fn status_addr(&self, block: u64) -> u64 {
        self.status + block
    }

    fn pointer_addr(&self, block: u64) -> u64 {
        self.pointers + block * self.params.pointer_bits() as u64
    }

    fn chunk_addr(&self, chunk: u64) -> u64 {
        self.table + chunk * self.params.chunk_bits() as u64
    }

    fn reverse_addr(&self, chunk: u64) -> u64 {
        self.chunk_addr(chunk) + self.params.b1 as u64
    }

    pub fn read_status<P: Probe + ?Sized>(&self, store: &BitStore, probe: &mut P, block: u64) -> Result<bool> {
        self.check_block(block)?;
        store.read_bit(probe, self.status_addr(block))
    }

    pub fn read_pointer<P: Probe + ?Sized>(&self, store: &BitStore, probe: &mut P, block: u64) -> Result<u64> {
        self.check_block(block)?;
        store.read_field(probe, self.pointer_addr(block), self.params.pointer_bits())
    }

    pub fn read_counter<P: Probe + ?Sized>(&self, store: &BitStore, probe: &mut P) -> Result<u64> {
        store.read_field(probe, self.counter, self.params.counter_bits())
    }

    /// Reads the first `out.len()` data bits of `chunk`.
    pub fn read_data<P: Probe + ?Sized>(
        &self,
        store: &BitStore,
        probe: &mut P,
        chunk: u64,
        out: &mut [bool],
    ) -> Result<()> {
        self.check_chunk(chunk)?;
        store.read_bits(probe, self.chunk_addr(chunk), out)
    }

    pub fn read_data_bit<P: Probe + ?Sized>(
        &self,
        store: &BitStore,
        probe: &mut P,
        chunk: u64,
        offset: u32,
    ) -> Result<bool> {
        self.check_chunk(chunk)?;
        store.read_bit(probe, self.chunk_addr(chunk) + offset as u64)
    }

    pub fn write_data_bit<P: Probe + ?Sized>(
        &self,
        store: &mut BitStore,
        probe: &mut P,
        chunk: u64,
        offset: u32,
        v: bool,
    ) -> Result<()> {
        self.check_chunk(chunk)?;
        store.write_bit(probe, self.chunk_addr(chunk) + offset as u64, v)
    }

    fn check_chunk(&self, chunk: u64) -> Result<()> {
        if chunk < self.params.beta {
            Ok(())
        } else {
            Err(Error::MalformedContainer(format!(
                "chunk index {chunk} outside table of {} chunks",
                self.params.beta
            )))
        }
    }

    /// Writes the canonical encoding of `x`: nonzero blocks occupy chunks in
    /// increasing block order, pointers of zero blocks and unused chunks are
    /// zero.
    pub fn init_encode<P: Probe + ?Sized>(&self, store: &mut BitStore, probe: &mut P, x: &[bool]) -> Result<()> {
        let p = &self.params;
        if x.len() as u64 != p.b {
            return Err(Error::Length {
                expected: p.b as usize,
                actual: x.len(),
            });
        }
        let b1 = p.b1 as usize;
        let nonzero = x.chunks(b1).filter(|blk| blk.iter().any(|&v| v)).count() as u64;
        if nonzero > p.beta {
            return Err(Error::CapacityExceeded { nonzero, beta: p.beta });
        }
        let mut next = 0u64;
        for (block, data) in x.chunks(b1).enumerate() {
            let block = block as u64;
            let occupied = data.iter().any(|&v| v);
            store.write_bit(probe, self.status_addr(block), occupied)?;
            let ptr = if occupied { next } else { 0 };
            store.write_field(probe, self.pointer_addr(block), p.pointer_bits(), ptr)?;
            if occupied {
                store.write_bits(probe, self.chunk_addr(next), data)?;
                store.write_field(probe, self.reverse_addr(next), p.reverse_bits(), block)?;
                next += 1;
            }
        }
        let zeros = vec![false; p.chunk_bits() as usize];
        for chunk in next..p.beta {
            store.write_bits(probe, self.chunk_addr(chunk), &zeros)?;
        }
        store.write_field(probe, self.counter, p.counter_bits(), next)
    }

    /// Bit `i` of the represented vector.
    pub fn decode_bit<P: Probe + ?Sized>(&self, store: &BitStore, probe: &mut P, i: u64) -> Result<bool> {
        self.check_index(i)?;
        let block = i / self.params.b1 as u64;
        if !self.read_status(store, probe, block)? {
            return Ok(false);
        }
        let chunk = self.read_pointer(store, probe, block)?;
        self.read_data_bit(store, probe, chunk, (i % self.params.b1 as u64) as u32)
    }

    /// The `b1` bits of block `block`.
    pub fn decode_block<P: Probe + ?Sized>(&self, store: &BitStore, probe: &mut P, block: u64) -> Result<Vec<bool>> {
        let mut out = vec![false; self.params.b1 as usize];
        if self.read_status(store, probe, block)? {
            let chunk = self.read_pointer(store, probe, block)?;
            self.read_data(store, probe, chunk, &mut out)?;
        }
        Ok(out)
    }

    /// Stores a new nonzero block whose status bit is known to be clear.
    /// Fails without writing anything when the table is full.
    pub fn insert_block<P: Probe + ?Sized>(
        &self,
        store: &mut BitStore,
        probe: &mut P,
        block: u64,
        data: &[bool],
    ) -> Result<u64> {
        let p = &self.params;
        self.check_block(block)?;
        if data.len() != p.b1 as usize {
            return Err(Error::Length {
                expected: p.b1 as usize,
                actual: data.len(),
            });
        }
        let count = self.read_counter(store, probe)?;
        if count >= p.beta {
            return Err(Error::CapacityExceeded {
                nonzero: count + 1,
                beta: p.beta,
            });
        }
        store.write_bit(probe, self.status_addr(block), true)?;
        store.write_field(probe, self.counter, p.counter_bits(), count + 1)?;
        store.write_field(probe, self.pointer_addr(block), p.pointer_bits(), count)?;
        store.write_bits(probe, self.chunk_addr(count), data)?;
        store.write_field(probe, self.reverse_addr(count), p.reverse_bits(), block)?;
        Ok(count)
    }

    /// Drops block `block`, stored in `chunk`, and refills the hole with the
    /// last occupied chunk.
    pub fn remove_block<P: Probe + ?Sized>(
        &self,
        store: &mut BitStore,
        probe: &mut P,
        block: u64,
        chunk: u64,
    ) -> Result<()> {
        let p = &self.params;
        self.check_block(block)?;
        store.write_bit(probe, self.status_addr(block), false)?;
        let count = self.read_counter(store, probe)?;
        if count == 0 || count > p.beta || chunk >= count {
            return Err(Error::MalformedContainer(format!(
                "chunk {chunk} freed with counter {count}"
            )));
        }
        let last = count - 1;
        store.write_field(probe, self.counter, p.counter_bits(), last)?;
        if chunk != last {
            store.copy_bits(probe, self.chunk_addr(last), self.chunk_addr(chunk), p.chunk_bits())?;
            // The reverse pointer was read as part of the chunk copy.
            let owner = store.get_field(self.reverse_addr(chunk), p.reverse_bits())?;
            self.check_block(owner)?;
            store.write_field(probe, self.pointer_addr(owner), p.pointer_bits(), chunk)?;
        }
        Ok(())
    }

    /// Sets bit `i` of the represented vector to `v`.
    pub fn update_bit<P: Probe + ?Sized>(&self, store: &mut BitStore, probe: &mut P, i: u64, v: bool) -> Result<()> {
        self.check_index(i)?;
        let b1 = self.params.b1 as u64;
        let block = i / b1;
        let offset = (i % b1) as u32;
        if !self.read_status(store, probe, block)? {
            if !v {
                return Ok(());
            }
            let mut data = vec![false; b1 as usize];
            data[offset as usize] = true;
            self.insert_block(store, probe, block, &data)?;
            return Ok(());
        }
        let chunk = self.read_pointer(store, probe, block)?;
        if v {
            if !self.read_data_bit(store, probe, chunk, offset)? {
                self.write_data_bit(store, probe, chunk, offset, true)?;
            }
            return Ok(());
        }
        let mut data = vec![false; b1 as usize];
        self.read_data(store, probe, chunk, &mut data)?;
        if !data[offset as usize] {
            return Ok(());
        }
        if data.iter().filter(|&&d| d).count() > 1 {
            self.write_data_bit(store, probe, chunk, offset, false)
        } else {
            self.remove_block(store, probe, block, chunk)
        }
    }

    /// Reads every region without metering.
    pub fn snapshot(&self, store: &BitStore) -> Result<SparseState> {
        let p = &self.params;
        let nb = p.n_blocks();
        let mut status = Vec::with_capacity(nb as usize);
        let mut pointers = Vec::with_capacity(nb as usize);
        for block in 0..nb {
            status.push(store.get(self.status_addr(block))?);
            pointers.push(store.get_field(self.pointer_addr(block), p.pointer_bits())?);
        }
        let mut chunks = Vec::with_capacity(p.beta as usize);
        for chunk in 0..p.beta {
            let mut data = vec![false; p.b1 as usize];
            store.read_bits(&mut Unmetered, self.chunk_addr(chunk), &mut data)?;
            let rev = store.get_field(self.reverse_addr(chunk), p.reverse_bits())?;
            chunks.push((data, rev));
        }
        let counter = store.get_field(self.counter, p.counter_bits())?;
        Ok(SparseState {
            status,
            pointers,
            chunks,
            counter,
        })
    }

    /// Full-scan check of the canonical-form invariant.
    pub fn check_canonical(&self, store: &BitStore) -> Result<(), String> {
        let st = self.snapshot(store).map_err(|e| e.to_string())?;
        let occupied = st.status.iter().filter(|&&s| s).count() as u64;
        if st.counter != occupied {
            return Err(format!("counter {} but {occupied} status bits set", st.counter));
        }
        let mut owner_of = vec![None; self.params.beta as usize];
        for (block, (&s, &ptr)) in st.status.iter().zip(&st.pointers).enumerate() {
            if !s {
                continue;
            }
            if ptr >= st.counter {
                return Err(format!("block {block} points at chunk {ptr} >= counter {}", st.counter));
            }
            if let Some(other) = owner_of[ptr as usize].replace(block) {
                return Err(format!("blocks {other} and {block} share chunk {ptr}"));
            }
            let (data, rev) = &st.chunks[ptr as usize];
            if *rev != block as u64 {
                return Err(format!("chunk {ptr} reverse pointer {rev}, expected {block}"));
            }
            if !data.iter().any(|&d| d) {
                return Err(format!("block {block} marked nonzero but chunk {ptr} is empty"));
            }
        }
        Ok(())
    }

    /// The represented vector, read without metering.
    pub fn decode_all(&self, store: &BitStore) -> Result<Vec<bool>> {
        let mut out = Vec::with_capacity(self.params.b as usize);
        for block in 0..self.params.n_blocks() {
            out.extend(self.decode_block(store, &mut Unmetered, block)?);
        }
        Ok(out)
    }

    /// Rewrites the region into the canonical encoding of the vector it
    /// represents, erasing any dependence on update history.
    pub fn normalize(&self, store: &mut BitStore) -> Result<()> {
        let x = self.decode_all(store)?;
        self.init_encode(store, &mut Unmetered, &x)
    }

    /// Text dump, one region per line.
    pub fn dump(&self, store: &BitStore) -> Result<String> {
        let st = self.snapshot(store)?;
        let bits = |v: &[bool]| v.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>();
        let mut out = String::new();
        writeln!(out, "status {}", bits(&st.status)).unwrap();
        let chunks: Vec<String> = st
            .chunks
            .iter()
            .map(|(d, r)| format!("{}:{r}", bits(d)))
            .collect();
        writeln!(out, "table {}", chunks.join(" ")).unwrap();
        let ptrs: Vec<String> = st.pointers.iter().map(u64::to_string).collect();
        writeln!(out, "pointers {}", ptrs.join(" ")).unwrap();
        write!(out, "counter {}", st.counter).unwrap();
        Ok(out)
    }
}
