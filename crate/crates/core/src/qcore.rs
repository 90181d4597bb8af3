//! A restricted quantum simulator for uniform, basis-aligned superpositions.
//!
//! The algorithms simulated here create superposition exactly once, with a
//! Hadamard block on an index register, and afterwards apply only gates
//! that are classical reversible maps on each basis state. The joint state
//! is therefore always `Σ_t (1/√N) |t⟩ |f(t)⟩`, and it is stored as `N`
//! classical *tracks*: one row per index value holding a bit for every
//! qubit and an integer for every register. Amplitudes are implicit.
//!
//! Qubits are stored column-major, one packed bit column per qubit, so the
//! X/CX/CCX family costs `O(N / 64)` word operations. Every primitive
//! operation bumps a gate counter by one; `apply_or` is six primitives.

use std::collections::HashMap;

use crate::bitvec::BitVector;
use crate::error::{Error, Result};

const WORD: usize = u64::BITS as usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Qubit(usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Reg(usize);

/// Destination of a QRAM read.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    Qubit(Qubit),
    Reg(Reg),
}

impl From<Qubit> for Target {
    fn from(q: Qubit) -> Target {
        Target::Qubit(q)
    }
}

impl From<Reg> for Target {
    fn from(r: Reg) -> Target {
        Target::Reg(r)
    }
}

#[derive(Clone, Debug)]
struct Register {
    name: String,
    width: u32,
    values: Vec<u64>,
}

impl Register {
    fn mask(&self) -> u64 {
        low_mask(self.width)
    }
}

/// Bits needed to hold every value in `0..=max`; at least one.
pub fn width_for(max: u64) -> u32 {
    (u64::BITS - max.leading_zeros()).max(1)
}

fn low_mask(width: u32) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

/// Classical memory addressed by quantum registers.
///
/// A read XORs `cell(index)` into the target; indices beyond the stored
/// data read `pad`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QramArray {
    name: String,
    width: u32,
    dims: Vec<usize>,
    cells: Vec<u64>,
    pad: u64,
}

impl QramArray {
    pub fn new(name: impl Into<String>, width: u32, cells: Vec<u64>) -> Result<QramArray> {
        let len = cells.len();
        QramArray::with_dims(name, width, vec![len], cells)
    }

    /// Row-major `rows × cols` array read with two index registers.
    pub fn matrix(
        name: impl Into<String>,
        width: u32,
        rows: usize,
        cols: usize,
        cells: Vec<u64>,
    ) -> Result<QramArray> {
        QramArray::with_dims(name, width, vec![rows, cols], cells)
    }

    fn with_dims(
        name: impl Into<String>,
        width: u32,
        dims: Vec<usize>,
        cells: Vec<u64>,
    ) -> Result<QramArray> {
        let name = name.into();
        if width == 0 || width > 63 {
            return Err(Error::usage(format!(
                "QRAM `{name}`: cell width {width} unsupported"
            )));
        }
        if dims.iter().product::<usize>() != cells.len() {
            return Err(Error::usage(format!(
                "QRAM `{name}`: shape does not match data"
            )));
        }
        if let Some(c) = cells.iter().find(|&&c| c > low_mask(width)) {
            return Err(Error::usage(format!(
                "QRAM `{name}`: cell value {c} does not fit in {width} bits"
            )));
        }
        Ok(QramArray {
            name,
            width,
            dims,
            cells,
            pad: 0,
        })
    }

    pub fn with_pad(mut self, pad: u64) -> Result<QramArray> {
        if pad > low_mask(self.width) {
            return Err(Error::usage(format!(
                "QRAM `{}`: pad value too wide",
                self.name
            )));
        }
        self.pad = pad;
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn pad(&self) -> u64 {
        self.pad
    }

    pub fn cell(&self, index: &[u64]) -> u64 {
        let mut flat = 0usize;
        for (&i, &d) in index.iter().zip(&self.dims) {
            if i >= d as u64 {
                return self.pad;
            }
            flat = flat * d + i as usize;
        }
        self.cells[flat]
    }
}

/// The uniform superposition, one classical row per index value.
#[derive(Clone, Debug)]
pub struct TrackTable {
    tracks: usize,
    words: usize,
    qubit_names: Vec<String>,
    qubit_ids: HashMap<String, Qubit>,
    bits: Vec<u64>,
    registers: Vec<Register>,
    register_ids: HashMap<String, Reg>,
    index: Option<Reg>,
    gates: u64,
    trace: Option<Vec<String>>,
}

impl Default for TrackTable {
    fn default() -> Self {
        TrackTable::new()
    }
}

impl TrackTable {
    /// A single track with nothing declared.
    pub fn new() -> TrackTable {
        TrackTable {
            tracks: 1,
            words: 1,
            qubit_names: Vec::new(),
            qubit_ids: HashMap::new(),
            bits: Vec::new(),
            registers: Vec::new(),
            register_ids: HashMap::new(),
            index: None,
            gates: 0,
            trace: None,
        }
    }

    pub fn declare_qubit(&mut self, name: impl Into<String>) -> Result<Qubit> {
        let name = name.into();
        if self.qubit_ids.contains_key(&name) {
            return Err(Error::usage(format!("qubit `{name}` already declared")));
        }
        let q = Qubit(self.qubit_names.len());
        self.qubit_ids.insert(name.clone(), q);
        self.qubit_names.push(name);
        self.bits.resize(self.bits.len() + self.words, 0);
        Ok(q)
    }

    pub fn declare_register(&mut self, name: impl Into<String>, width: u32) -> Result<Reg> {
        let name = name.into();
        if width > 63 {
            return Err(Error::usage(format!(
                "register `{name}` wider than 63 bits"
            )));
        }
        if self.register_ids.contains_key(&name) {
            return Err(Error::usage(format!("register `{name}` already declared")));
        }
        let r = Reg(self.registers.len());
        self.register_ids.insert(name.clone(), r);
        self.registers.push(Register {
            name,
            width,
            values: vec![0; self.tracks],
        });
        Ok(r)
    }

    pub fn qubit(&self, name: &str) -> Result<Qubit> {
        self.qubit_ids
            .get(name)
            .copied()
            .ok_or_else(|| Error::usage(format!("unknown qubit `{name}`")))
    }

    pub fn register(&self, name: &str) -> Result<Reg> {
        self.register_ids
            .get(name)
            .copied()
            .ok_or_else(|| Error::usage(format!("unknown register `{name}`")))
    }

    pub fn track_count(&self) -> usize {
        self.tracks
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_names.len()
    }

    pub fn gate_count(&self) -> u64 {
        self.gates
    }

    pub fn index_register(&self) -> Option<Reg> {
        self.index
    }

    pub fn qubit_name(&self, q: Qubit) -> &str {
        &self.qubit_names[q.0]
    }

    pub fn register_name(&self, r: Reg) -> &str {
        &self.registers[r.0].name
    }

    pub fn register_width(&self, r: Reg) -> u32 {
        self.registers[r.0].width
    }

    pub fn enable_trace(&mut self) {
        self.trace.get_or_insert_with(Vec::new);
    }

    pub fn take_trace(&mut self) -> Vec<String> {
        self.trace.as_mut().map(std::mem::take).unwrap_or_default()
    }

    /// Adds externally accounted primitive operations (the amplitude
    /// amplification stage) to the counter.
    pub(crate) fn charge(&mut self, op: &str, args: &str, count: u64) {
        self.gates += count;
        self.log(op, args);
    }

    fn log(&mut self, op: &str, args: &str) {
        let gates = self.gates;
        if let Some(t) = self.trace.as_mut() {
            t.push(format!("op={op} args={args} gates={gates}"));
        }
    }

    fn tick(&mut self, op: &str, args: impl FnOnce(&TrackTable) -> String) {
        self.gates += 1;
        if self.trace.is_some() {
            let a = args(self);
            self.log(op, &a);
        }
    }

    fn check_qubit(&self, q: Qubit) -> Result<()> {
        if q.0 >= self.qubit_names.len() {
            return Err(Error::usage(format!("unknown qubit handle {}", q.0)));
        }
        Ok(())
    }

    fn check_reg(&self, r: Reg) -> Result<()> {
        if r.0 >= self.registers.len() {
            return Err(Error::usage(format!("unknown register handle {}", r.0)));
        }
        Ok(())
    }

    fn col(&self, q: Qubit) -> &[u64] {
        &self.bits[q.0 * self.words..(q.0 + 1) * self.words]
    }

    fn tail_mask(&self, w: usize) -> u64 {
        if w + 1 == self.words && !self.tracks.is_multiple_of(WORD) {
            (1u64 << (self.tracks % WORD)) - 1
        } else {
            u64::MAX
        }
    }

    // ---- inspection -------------------------------------------------------

    pub fn bit(&self, q: Qubit, track: usize) -> bool {
        self.col(q)[track / WORD] >> (track % WORD) & 1 == 1
    }

    pub fn column(&self, q: Qubit) -> BitVector {
        let bits: Vec<bool> = (0..self.tracks).map(|t| self.bit(q, t)).collect();
        BitVector::from_bits(&bits)
    }

    pub fn value(&self, r: Reg, track: usize) -> u64 {
        self.registers[r.0].values[track]
    }

    pub fn values(&self, r: Reg) -> &[u64] {
        &self.registers[r.0].values
    }

    pub fn is_clean(&self, q: Qubit) -> bool {
        self.col(q).iter().all(|&w| w == 0)
    }

    pub fn require_clean(&self, q: Qubit) -> Result<()> {
        self.check_qubit(q)?;
        if self.is_clean(q) {
            Ok(())
        } else {
            Err(Error::ScratchNotClean(self.qubit_name(q).to_string()))
        }
    }

    pub fn register_is_zero(&self, r: Reg) -> bool {
        self.registers[r.0].values.iter().all(|&v| v == 0)
    }

    /// Number of tracks in which `q` is 1.
    pub fn count_marked(&self, q: Qubit) -> usize {
        self.col(q).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn marked_tracks(&self, q: Qubit) -> Vec<usize> {
        (0..self.tracks).filter(|&t| self.bit(q, t)).collect()
    }

    /// Equality of the represented state, ignoring counters and traces.
    pub fn same_state(&self, other: &TrackTable) -> bool {
        self.tracks == other.tracks
            && self.qubit_names == other.qubit_names
            && self.bits == other.bits
            && self.registers.len() == other.registers.len()
            && self
                .registers
                .iter()
                .zip(&other.registers)
                .all(|(a, b)| a.name == b.name && a.width == b.width && a.values == b.values)
    }

    // ---- superposition ----------------------------------------------------

    /// `H^{⊗w}` on a zeroed register of width `w` in a single-track table:
    /// afterwards there are `2^w` tracks and the register holds the track
    /// id in each. Every other cell is copied to all tracks.
    pub fn hadamard_init(&mut self, r: Reg) -> Result<()> {
        self.check_reg(r)?;
        if self.tracks != 1 {
            return Err(Error::usage(
                "hadamard_init on a table that is already in superposition",
            ));
        }
        if self.registers[r.0].values[0] != 0 {
            return Err(Error::usage("hadamard_init on a non-zero register"));
        }
        let width = self.registers[r.0].width;
        if width > 30 {
            return Err(Error::usage(format!(
                "index register of width {width} is too wide"
            )));
        }
        let tracks = 1usize << width;
        let words = tracks.div_ceil(WORD);
        let old_words = self.words;
        let mut bits = Vec::with_capacity(self.qubit_names.len() * words);
        for q in 0..self.qubit_names.len() {
            let set = self.bits[q * old_words] & 1 == 1;
            let start = bits.len();
            bits.resize(start + words, if set { u64::MAX } else { 0 });
            if set && !tracks.is_multiple_of(WORD) {
                bits[start + words - 1] = (1u64 << (tracks % WORD)) - 1;
            }
        }
        self.bits = bits;
        self.words = words;
        self.tracks = tracks;
        for reg in &mut self.registers {
            reg.values = vec![reg.values[0]; tracks];
        }
        self.registers[r.0].values = (0..tracks as u64).collect();
        self.index = Some(r);
        self.tick("h", |s| format!("{}[{width}]", s.register_name(r)));
        Ok(())
    }

    // ---- single-qubit family ----------------------------------------------

    pub fn apply_x(&mut self, q: Qubit) -> Result<()> {
        self.check_qubit(q)?;
        for w in 0..self.words {
            let m = self.tail_mask(w);
            self.bits[q.0 * self.words + w] ^= m;
        }
        self.tick("x", |s| s.qubit_name(q).to_string());
        Ok(())
    }

    pub fn apply_cx(&mut self, control: Qubit, target: Qubit) -> Result<()> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        if control == target {
            return Err(Error::usage("CX control and target must differ"));
        }
        for w in 0..self.words {
            let c = self.bits[control.0 * self.words + w];
            self.bits[target.0 * self.words + w] ^= c;
        }
        self.tick("cx", |s| {
            format!("{},{}", s.qubit_name(control), s.qubit_name(target))
        });
        Ok(())
    }

    pub fn apply_ccx(&mut self, c1: Qubit, c2: Qubit, target: Qubit) -> Result<()> {
        for q in [c1, c2, target] {
            self.check_qubit(q)?;
        }
        if c1 == target || c2 == target || c1 == c2 {
            return Err(Error::usage("CCX qubits must be distinct"));
        }
        for w in 0..self.words {
            let a = self.bits[c1.0 * self.words + w];
            let b = self.bits[c2.0 * self.words + w];
            self.bits[target.0 * self.words + w] ^= a & b;
        }
        self.tick("ccx", |s| {
            format!(
                "{},{},{}",
                s.qubit_name(c1),
                s.qubit_name(c2),
                s.qubit_name(target)
            )
        });
        Ok(())
    }

    /// `target = a ∨ b` by De Morgan: X a, X b, CCX(a, b → target),
    /// X target, X a, X b. Requires a clean target.
    pub fn apply_or(&mut self, a: Qubit, b: Qubit, target: Qubit) -> Result<()> {
        for q in [a, b, target] {
            self.check_qubit(q)?;
        }
        if a == b || a == target || b == target {
            return Err(Error::usage("OR qubits must be distinct"));
        }
        self.require_clean(target)?;
        self.apply_x(a)?;
        self.apply_x(b)?;
        self.apply_ccx(a, b, target)?;
        self.apply_x(target)?;
        self.apply_x(a)?;
        self.apply_x(b)
    }

    // ---- register-controlled ----------------------------------------------

    /// X on every bit of `r` selected by `mask`.
    pub fn apply_x_register(&mut self, r: Reg, mask: u64) -> Result<()> {
        self.check_reg(r)?;
        let reg = &mut self.registers[r.0];
        let mask = mask & reg.mask();
        reg.values.iter_mut().for_each(|v| *v ^= mask);
        self.tick("xr", |s| format!("{},{mask:#x}", s.register_name(r)));
        Ok(())
    }

    /// Generalized Toffoli with every qubit of `r` as control:
    /// `target ^= (r = 2^w − 1)`.
    pub fn apply_mcx(&mut self, r: Reg, target: Qubit) -> Result<()> {
        self.check_reg(r)?;
        self.check_qubit(target)?;
        self.mcx_raw(r, 0, target);
        self.tick("mcx", |s| {
            format!("{},{}", s.register_name(r), s.qubit_name(target))
        });
        Ok(())
    }

    /// `target ^= ((r ⊕ flip) = 2^w − 1)`; the X-conjugated Toffoli without
    /// touching the register.
    fn mcx_raw(&mut self, r: Reg, flip: u64, target: Qubit) {
        let reg = &self.registers[r.0];
        let ones = reg.mask();
        let base = target.0 * self.words;
        for (t, &v) in reg.values.iter().enumerate() {
            if (v ^ flip) & ones == ones {
                self.bits[base + t / WORD] ^= 1 << (t % WORD);
            }
        }
    }

    fn check_delta(&self, r: Reg, value: u64, target: Qubit) -> Result<u64> {
        self.check_reg(r)?;
        self.check_qubit(target)?;
        let mask = self.registers[r.0].mask();
        if value > mask {
            return Err(Error::usage(format!(
                "delta value {value} does not fit register `{}`",
                self.register_name(r)
            )));
        }
        Ok(!value & mask)
    }

    /// `target ^= δ(value, r)`: X on the zero bits of `value`, generalized
    /// Toffoli on `r`, then the same X gates again. One primitive.
    pub fn apply_delta(&mut self, r: Reg, value: u64, target: Qubit) -> Result<()> {
        let flip = self.check_delta(r, value, target)?;
        self.mcx_raw(r, flip, target);
        self.tick("delta", |s| {
            format!("{},{value},{}", s.register_name(r), s.qubit_name(target))
        });
        Ok(())
    }

    /// `target = δ(value, r)` on a clean target.
    pub fn apply_delta_init(&mut self, r: Reg, value: u64, target: Qubit) -> Result<()> {
        self.require_clean(target)?;
        self.apply_delta(r, value, target)
    }

    /// Returns a target holding `δ(value, r)` to zero; any other content is
    /// reported as corruption and left untouched.
    pub fn apply_delta_reset(&mut self, r: Reg, value: u64, target: Qubit) -> Result<()> {
        self.check_delta(r, value, target)?;
        if !self.holds_delta(r, value, target) {
            return Err(Error::StateCorruption(format!(
                "`{}` is not δ({value}, {})",
                self.qubit_name(target),
                self.register_name(r)
            )));
        }
        self.apply_delta(r, value, target)
    }

    /// Whether `target = δ(value, r)` in every track.
    pub fn holds_delta(&self, r: Reg, value: u64, target: Qubit) -> bool {
        self.registers[r.0]
            .values
            .iter()
            .enumerate()
            .all(|(t, &v)| self.bit(target, t) == (v == value))
    }

    /// QRAM read: `target ^= array[indices]` in every track.
    pub fn qram_read(&mut self, indices: &[Reg], array: &QramArray, target: Target) -> Result<()> {
        if indices.len() != array.dims.len() {
            return Err(Error::usage(format!(
                "QRAM `{}` needs {} index registers",
                array.name,
                array.dims.len()
            )));
        }
        for &r in indices {
            self.check_reg(r)?;
        }
        let mut idx = vec![0u64; indices.len()];
        match target {
            Target::Qubit(q) => {
                self.check_qubit(q)?;
                if array.width != 1 {
                    return Err(Error::usage(format!(
                        "QRAM `{}` has {}-bit cells, target is a qubit",
                        array.name, array.width
                    )));
                }
                let base = q.0 * self.words;
                for t in 0..self.tracks {
                    for (k, &r) in indices.iter().enumerate() {
                        idx[k] = self.registers[r.0].values[t];
                    }
                    if array.cell(&idx) & 1 == 1 {
                        self.bits[base + t / WORD] ^= 1 << (t % WORD);
                    }
                }
            }
            Target::Reg(dst) => {
                self.check_reg(dst)?;
                if indices.contains(&dst) {
                    return Err(Error::usage("QRAM target register is also an index"));
                }
                if self.registers[dst.0].width != array.width {
                    return Err(Error::usage(format!(
                        "QRAM `{}` has {}-bit cells, register `{}` has {}",
                        array.name,
                        array.width,
                        self.register_name(dst),
                        self.registers[dst.0].width
                    )));
                }
                for t in 0..self.tracks {
                    for (k, &r) in indices.iter().enumerate() {
                        idx[k] = self.registers[r.0].values[t];
                    }
                    let cell = array.cell(&idx);
                    self.registers[dst.0].values[t] ^= cell;
                }
            }
        }
        self.tick("qram", |s| {
            let ix: Vec<&str> = indices.iter().map(|&r| s.register_name(r)).collect();
            let dst = match target {
                Target::Qubit(q) => s.qubit_name(q).to_string(),
                Target::Reg(r) => s.register_name(r).to_string(),
            };
            format!("{}[{}],{dst}", array.name, ix.join(","))
        });
        Ok(())
    }

    /// `r = (r + by) mod 2^w`, where the addend register must hold 1 in
    /// every track.
    pub fn increment(&mut self, r: Reg, by: Reg) -> Result<()> {
        self.check_reg(r)?;
        self.check_reg(by)?;
        if r == by {
            return Err(Error::usage("cannot add a register to itself"));
        }
        if self.registers[by.0].values.iter().any(|&v| v != 1) {
            return Err(Error::StateCorruption(format!(
                "addend register `{}` is not 1 in every track",
                self.register_name(by)
            )));
        }
        let reg = &mut self.registers[r.0];
        let mask = reg.mask();
        reg.values
            .iter_mut()
            .for_each(|v| *v = v.wrapping_add(1) & mask);
        self.tick("inc", |s| {
            format!("{},{}", s.register_name(r), s.register_name(by))
        });
        Ok(())
    }
}
