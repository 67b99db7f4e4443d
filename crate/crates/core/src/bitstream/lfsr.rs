//! Maximal-length Fibonacci LFSRs with a leap-forward word output.
//!
//! The register shifts right; the feedback bit is the XOR of the state bits
//! at positions `width - t` for every tap `t` (taps are 1-based, `width`
//! must be one of them) and enters at the MSB.
//!
//! A single clock of a Fibonacci register only contributes one fresh bit to
//! the state word, so consecutive words are strongly correlated. The number
//! generator therefore advances the register `leap` clocks per output word
//! (a leap-forward LFSR). `leap` is the smallest value `>= width` coprime
//! with the period, so the word sequence still visits every nonzero state
//! exactly once per period.

use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};

/// Known maximal-length tap sets, indexed by `width - 2`.
const DEFAULT_TAPS: [&[u32]; 31] = [
    &[2, 1],
    &[3, 2],
    &[4, 3],
    &[5, 3],
    &[6, 5],
    &[7, 6],
    &[8, 6, 5, 4],
    &[9, 5],
    &[10, 7],
    &[11, 9],
    &[12, 11, 10, 4],
    &[13, 12, 11, 8],
    &[14, 13, 12, 2],
    &[15, 14],
    &[16, 15, 13, 4],
    &[17, 14],
    &[18, 11],
    &[19, 18, 17, 14],
    &[20, 17],
    &[21, 19],
    &[22, 21],
    &[23, 18],
    &[24, 23, 22, 17],
    &[25, 22],
    &[26, 25, 24, 20],
    &[27, 26, 25, 22],
    &[28, 25],
    &[29, 27],
    &[30, 29, 28, 7],
    &[31, 28],
    &[32, 22, 2, 1],
];

pub const MIN_WIDTH: u32 = 2;
pub const MAX_WIDTH: u32 = 32;

pub fn default_taps(width: u32) -> Result<&'static [u32]> {
    if !(MIN_WIDTH..=MAX_WIDTH).contains(&width) {
        return Err(Error::Config(format!(
            "LFSR width {width} outside [{MIN_WIDTH}, {MAX_WIDTH}]"
        )));
    }
    Ok(DEFAULT_TAPS[(width - MIN_WIDTH) as usize])
}

/// Multiplication in GF(2)[x] / f, where `f` has degree `deg` (bit `deg` set).
fn gf2_mulmod(mut a: u64, mut b: u64, f: u64, deg: u32) -> u64 {
    let mut acc = 0u64;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if (a >> deg) & 1 == 1 {
            a ^= f;
        }
    }
    acc
}

fn gf2_powmod(base: u64, mut exp: u64, f: u64, deg: u32) -> u64 {
    let mut result = 1u64;
    let mut b = base;
    while exp != 0 {
        if exp & 1 == 1 {
            result = gf2_mulmod(result, b, f, deg);
        }
        b = gf2_mulmod(b, b, f, deg);
        exp >>= 1;
    }
    result
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Primitivity test for the feedback polynomial `x^w + sum x^t + 1`.
///
/// `x` has order `2^w - 1` modulo a degree-`w` polynomial only if that
/// polynomial is primitive (a reducible modulus has fewer units), so the
/// order test alone decides maximality.
pub fn taps_are_maximal(width: u32, taps: &[u32]) -> bool {
    if !(MIN_WIDTH..=MAX_WIDTH).contains(&width) || !taps.contains(&width) {
        return false;
    }
    if taps.iter().any(|&t| t == 0 || t > width) {
        return false;
    }
    let mut f = (1u64 << width) | 1;
    for &t in taps {
        if t < width {
            f ^= 1u64 << t;
        }
    }
    let order = (1u64 << width) - 1;
    let x = 0b10u64;
    if gf2_powmod(x, order, f, width) != 1 {
        return false;
    }
    prime_factors(order)
        .into_iter()
        .all(|q| gf2_powmod(x, order / q, f, width) != 1)
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Immutable register description shared by all generators of one shape.
#[derive(Debug)]
struct LfsrShape {
    width: u32,
    taps: Vec<u32>,
    tap_mask: u32,
    leap: u32,
    /// `leap_tables[k][v]` = state reached from `v << 8k` after `leap` clocks.
    leap_tables: Vec<[u32; 256]>,
    /// Whole word sequence, built on first use for narrow registers.
    orbit: OnceLock<Option<Orbit>>,
}

/// Widest register whose full word sequence is tabulated.
const ORBIT_MAX_WIDTH: u32 = 16;

/// The word sequence from state 1 and the position of every state in it.
#[derive(Debug)]
struct Orbit {
    words: Vec<u32>,
    position: Vec<u32>,
}

fn clock(state: u32, width: u32, tap_mask: u32) -> u32 {
    let fb = (state & tap_mask).count_ones() & 1;
    (state >> 1) | (fb << (width - 1))
}

impl LfsrShape {
    fn new(width: u32, taps: &[u32]) -> Result<Self> {
        if !(MIN_WIDTH..=MAX_WIDTH).contains(&width) {
            return Err(Error::Config(format!(
                "LFSR width {width} outside [{MIN_WIDTH}, {MAX_WIDTH}]"
            )));
        }
        if !taps_are_maximal(width, taps) {
            return Err(Error::Config(format!(
                "taps {taps:?} do not give a maximal-length {width}-bit LFSR"
            )));
        }
        let tap_mask = taps.iter().fold(0u32, |m, &t| m | (1u32 << (width - t)));
        let period = (1u64 << width) - 1;
        let mut leap = width;
        while gcd(leap as u64, period) != 1 {
            leap += 1;
        }

        let mut leap_tables = Vec::with_capacity(width.div_ceil(8) as usize);
        for k in 0..width.div_ceil(8) {
            let mut table = [0u32; 256];
            for (v, slot) in table.iter_mut().enumerate() {
                let mut s = ((v as u64) << (8 * k)) as u32;
                if width < 32 {
                    s &= (1u32 << width) - 1;
                }
                for _ in 0..leap {
                    s = clock(s, width, tap_mask);
                }
                *slot = s;
            }
            leap_tables.push(table);
        }

        Ok(Self {
            width,
            taps: taps.to_vec(),
            tap_mask,
            leap,
            leap_tables,
            orbit: OnceLock::new(),
        })
    }

    #[inline]
    fn leap(&self, state: u32) -> u32 {
        let mut out = 0u32;
        for (k, table) in self.leap_tables.iter().enumerate() {
            out ^= table[((state >> (8 * k)) & 0xff) as usize];
        }
        out
    }

    fn orbit(&self) -> Option<&Orbit> {
        self.orbit
            .get_or_init(|| {
                if self.width > ORBIT_MAX_WIDTH {
                    return None;
                }
                let period = (1usize << self.width) - 1;
                let mut words = Vec::with_capacity(period);
                let mut position = vec![0u32; period + 1];
                let mut s = 1u32;
                for i in 0..period {
                    words.push(s);
                    position[s as usize] = i as u32;
                    s = self.leap(s);
                }
                Some(Orbit { words, position })
            })
            .as_ref()
    }
}

/// A maximal-length LFSR. Cheap to clone; clones share the tap tables.
#[derive(Clone, Debug)]
pub struct LfsrGenerator {
    shape: Arc<LfsrShape>,
    state: u32,
}

impl LfsrGenerator {
    pub fn new(width: u32, taps: &[u32], seed: u32) -> Result<Self> {
        let shape = Arc::new(LfsrShape::new(width, taps)?);
        Self::from_shape(shape, seed)
    }

    pub fn with_default_taps(width: u32, seed: u32) -> Result<Self> {
        Self::new(width, default_taps(width)?, seed)
    }

    fn from_shape(shape: Arc<LfsrShape>, seed: u32) -> Result<Self> {
        let width = shape.width;
        if seed == 0 {
            return Err(Error::Config("LFSR seed must be nonzero".into()));
        }
        if width < 32 && seed >> width != 0 {
            return Err(Error::Config(format!(
                "seed {seed:#x} does not fit in {width} bits"
            )));
        }
        Ok(Self { shape, state: seed })
    }

    /// A new generator with the same register shape and a different seed.
    pub fn reseeded(&self, seed: u32) -> Result<Self> {
        Self::from_shape(Arc::clone(&self.shape), seed)
    }

    pub fn width(&self) -> u32 {
        self.shape.width
    }

    pub fn taps(&self) -> &[u32] {
        &self.shape.taps
    }

    /// Register clocks per output word.
    pub fn leap(&self) -> u32 {
        self.shape.leap
    }

    pub fn state(&self) -> u32 {
        self.state
    }

    /// Largest state value, `2^width - 1`.
    pub fn max_word(&self) -> u64 {
        (1u64 << self.shape.width) - 1
    }

    /// Period of both the clock sequence and the word sequence.
    pub fn period(&self) -> u64 {
        self.max_word()
    }

    /// One register clock.
    pub fn clock(&mut self) {
        self.state = clock(self.state, self.shape.width, self.shape.tap_mask);
    }

    /// Returns the current state word and advances by one word (`leap` clocks).
    #[inline]
    pub fn step(&mut self) -> u32 {
        let word = self.state;
        self.state = self.shape.leap(self.state);
        word
    }

    /// Fills `out` with the next `out.len()` words; same as calling
    /// [`Self::step`] for each slot.
    pub fn fill(&mut self, out: &mut [u32]) {
        match self.shape.orbit() {
            Some(orbit) => {
                let period = orbit.words.len();
                let mut i = orbit.position[self.state as usize] as usize;
                let mut filled = 0;
                while filled < out.len() {
                    let run = (out.len() - filled).min(period - i);
                    out[filled..filled + run].copy_from_slice(&orbit.words[i..i + run]);
                    filled += run;
                    i = (i + run) % period;
                }
                self.state = orbit.words[i];
            }
            None => {
                for slot in out {
                    *slot = self.step();
                }
            }
        }
    }
}
