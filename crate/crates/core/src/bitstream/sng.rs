//! Stochastic number generation: comparator against LFSR words.

use std::sync::Arc;

use super::lfsr::{default_taps, LfsrGenerator};
use super::stream::{BitStream, TlbStream};
use crate::error::{Error, Result};

/// Comparator threshold for `value`: `round(value * (2^width - 1))`.
pub fn threshold(value: f64, max_word: u64) -> u64 {
    (value * max_word as f64).round() as u64
}

/// Unipolar stream of length `len`. Bit `l` is one iff the zero-based rank
/// of the `l`-th LFSR word (`word - 1`, since nonzero states run from 1 to
/// `2^width - 1`) is below [`threshold`].
pub fn generate_unipolar(value: f64, len: usize, gen: &mut LfsrGenerator) -> Result<BitStream> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::Domain(format!("unipolar value {value} outside [0, 1]")));
    }
    let thr = threshold(value, gen.max_word());
    let mut words = Vec::with_capacity(len.div_ceil(64));
    let mut buf = [0u32; 64];
    let mut left = len;
    while left > 0 {
        let bits = left.min(64);
        gen.fill(&mut buf[..bits]);
        let mut w = 0u64;
        for (k, &word) in buf[..bits].iter().enumerate() {
            w |= (((word as u64 - 1) < thr) as u64) << k;
        }
        words.push(w);
        left -= bits;
    }
    BitStream::from_words(words, len)
}

/// Canonical two-line encoding: the line matching the sign of `x` carries
/// `|x|`, the other line is all-zero.
pub fn encode_tlb(x: f64, len: usize, gen: &mut LfsrGenerator) -> Result<TlbStream> {
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("two-line value {x} outside [-1, 1]")));
    }
    let mag = generate_unipolar(x.abs(), len, gen)?;
    place_sign(x, mag)
}

fn place_sign(x: f64, mag: BitStream) -> Result<TlbStream> {
    let zero = BitStream::zeros(mag.len());
    if x >= 0.0 {
        TlbStream::new(mag, zero)
    } else {
        TlbStream::new(zero, mag)
    }
}

/// Like [`generate_unipolar`] on a generator that is used for nothing else,
/// so constant streams can skip clocking it.
fn generate_unipolar_once(value: f64, len: usize, mut gen: LfsrGenerator) -> Result<BitStream> {
    if (0.0..=1.0).contains(&value) {
        let thr = threshold(value, gen.max_word());
        if thr == 0 {
            return Ok(BitStream::zeros(len));
        }
        if thr == gen.max_word() {
            return Ok(BitStream::ones(len));
        }
    }
    generate_unipolar(value, len, &mut gen)
}

/// Register shape used for every generated stream.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SngConfig {
    pub width: u32,
    pub taps: Vec<u32>,
}

impl SngConfig {
    pub fn new(width: u32, taps: Vec<u32>) -> Self {
        Self { width, taps }
    }

    pub fn with_width(width: u32) -> Result<Self> {
        Ok(Self {
            width,
            taps: default_taps(width)?.to_vec(),
        })
    }
}

impl Default for SngConfig {
    fn default() -> Self {
        Self {
            width: 16,
            taps: vec![16, 15, 13, 4],
        }
    }
}

/// SplitMix64 finaliser.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of logical stream `index`: `mix(master ^ mix(index))`, folded into
/// `width` bits and forced nonzero.
pub fn derive_seed(master: u64, index: u64, width: u32) -> u32 {
    let h = mix64(master ^ mix64(index));
    let folded = (h ^ (h >> 32)) as u32;
    let s = if width >= 32 {
        folded
    } else {
        folded & ((1u32 << width) - 1)
    };
    if s == 0 {
        1
    } else {
        s
    }
}

/// Hands out independently seeded generators, one per logical stream,
/// from a master seed and a running stream counter.
#[derive(Clone, Debug)]
pub struct StreamFactory {
    prototype: Arc<LfsrGenerator>,
    master: u64,
    next_index: u64,
}

impl StreamFactory {
    pub fn new(cfg: &SngConfig, master: u64) -> Result<Self> {
        let prototype = LfsrGenerator::new(cfg.width, &cfg.taps, 1)?;
        Ok(Self {
            prototype: Arc::new(prototype),
            master,
            next_index: 0,
        })
    }

    pub fn master(&self) -> u64 {
        self.master
    }

    /// Number of streams handed out so far.
    pub fn streams_issued(&self) -> u64 {
        self.next_index
    }

    pub fn next_generator(&mut self) -> LfsrGenerator {
        let seed = derive_seed(self.master, self.next_index, self.prototype.width());
        self.next_index += 1;
        self.prototype
            .reseeded(seed)
            .expect("derived seeds are nonzero and in range")
    }

    pub fn unipolar(&mut self, value: f64, len: usize) -> Result<BitStream> {
        let g = self.next_generator();
        generate_unipolar_once(value, len, g)
    }

    pub fn tlb(&mut self, x: f64, len: usize) -> Result<TlbStream> {
        if !(-1.0..=1.0).contains(&x) {
            return Err(Error::Domain(format!("two-line value {x} outside [-1, 1]")));
        }
        let g = self.next_generator();
        place_sign(x, generate_unipolar_once(x.abs(), len, g)?)
    }
}
