use std::fmt;
use std::str::FromStr;

use crate::error::{check_len, Error, Result};

/// A fixed-length sequence of bits, packed little-endian into `u64` words.
///
/// Bits past `len` in the last word are always zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitStream {
    words: Vec<u64>,
    len: usize,
}

fn words_for(len: usize) -> usize {
    len.div_ceil(64)
}

impl BitStream {
    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; words_for(len)],
            len,
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut s = Self {
            words: vec![u64::MAX; words_for(len)],
            len,
        };
        s.clear_tail();
        s
    }

    /// Builds a stream by evaluating `f` at every position.
    pub fn from_fn(len: usize, mut f: impl FnMut(usize) -> bool) -> Self {
        let mut b = BitStreamBuilder::with_capacity(len);
        for i in 0..len {
            b.push(f(i));
        }
        b.finish()
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut b = BitStreamBuilder::with_capacity(0);
        for bit in bits {
            b.push(bit);
        }
        b.finish()
    }

    /// Wraps pre-packed words. Extra high bits in the final word are cleared.
    pub fn from_words(mut words: Vec<u64>, len: usize) -> Result<Self> {
        check_len(words_for(len), words.len())?;
        let mut s = Self {
            words: std::mem::take(&mut words),
            len,
        };
        s.clear_tail();
        Ok(s)
    }

    fn clear_tail(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_all_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Unipolar value: fraction of ones.
    pub fn unipolar(&self) -> f64 {
        if self.len == 0 {
            return 0.0;
        }
        self.count_ones() as f64 / self.len as f64
    }

    pub fn iter(&self) -> Bits<'_> {
        Bits {
            stream: self,
            pos: 0,
        }
    }

    fn zip_words(&self, other: &Self, f: impl Fn(u64, u64) -> u64) -> Result<Self> {
        check_len(self.len, other.len)?;
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(&a, &b)| f(a, b))
            .collect();
        let mut s = Self {
            words,
            len: self.len,
        };
        s.clear_tail();
        Ok(s)
    }

    pub fn and(&self, other: &Self) -> Result<Self> {
        self.zip_words(other, |a, b| a & b)
    }

    pub fn or(&self, other: &Self) -> Result<Self> {
        self.zip_words(other, |a, b| a | b)
    }

    /// `self AND NOT other`.
    pub fn and_not(&self, other: &Self) -> Result<Self> {
        self.zip_words(other, |a, b| a & !b)
    }

    /// Shifts the stream later in time by `depth` cycles. The first `depth`
    /// bits are zero and the tail is truncated.
    pub fn delayed(&self, depth: usize) -> Self {
        if depth == 0 {
            return self.clone();
        }
        if depth >= self.len {
            return Self::zeros(self.len);
        }
        let word_shift = depth / 64;
        let bit_shift = depth % 64;
        let mut words = vec![0u64; self.words.len()];
        for (i, w) in words.iter_mut().enumerate().skip(word_shift) {
            let src = i - word_shift;
            let mut v = self.words[src] << bit_shift;
            if bit_shift != 0 && src > 0 {
                v |= self.words[src - 1] >> (64 - bit_shift);
            }
            *w = v;
        }
        let mut s = Self {
            words,
            len: self.len,
        };
        s.clear_tail();
        s
    }
}

impl fmt::Debug for BitStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len <= 64 {
            write!(f, "BitStream({self})")
        } else {
            write!(f, "BitStream(len={}, ones={})", self.len, self.count_ones())
        }
    }
}

impl fmt::Display for BitStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitStream {
    type Err = Error;

    /// Parses a string of `0`/`1` characters, first character = cycle 0.
    fn from_str(s: &str) -> Result<Self> {
        let mut b = BitStreamBuilder::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => b.push(false),
                '1' => b.push(true),
                '_' => {}
                other => return Err(Error::Parse(format!("invalid bit character {other:?}"))),
            }
        }
        Ok(b.finish())
    }
}

pub struct Bits<'a> {
    stream: &'a BitStream,
    pos: usize,
}

impl Iterator for Bits<'_> {
    type Item = bool;

    fn next(&mut self) -> Option<bool> {
        if self.pos >= self.stream.len {
            return None;
        }
        let bit = (self.stream.words[self.pos / 64] >> (self.pos % 64)) & 1 == 1;
        self.pos += 1;
        Some(bit)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let rem = self.stream.len - self.pos;
        (rem, Some(rem))
    }
}

impl ExactSizeIterator for Bits<'_> {}

/// Append-only writer used by the circuit models to emit one bit per cycle.
#[derive(Debug, Default)]
pub struct BitStreamBuilder {
    words: Vec<u64>,
    len: usize,
}

impl BitStreamBuilder {
    pub fn with_capacity(len: usize) -> Self {
        Self {
            words: Vec::with_capacity(words_for(len)),
            len: 0,
        }
    }

    #[inline]
    pub fn push(&mut self, bit: bool) {
        let off = self.len % 64;
        if off == 0 {
            self.words.push(0);
        }
        if bit {
            *self.words.last_mut().unwrap() |= 1u64 << off;
        }
        self.len += 1;
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn finish(self) -> BitStream {
        BitStream {
            words: self.words,
            len: self.len,
        }
    }
}

/// Two-line bipolar number: `(ones(p) - ones(n)) / L`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TlbStream {
    p: BitStream,
    n: BitStream,
}

impl TlbStream {
    pub fn new(p: BitStream, n: BitStream) -> Result<Self> {
        check_len(p.len(), n.len())?;
        Ok(Self { p, n })
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            p: BitStream::zeros(len),
            n: BitStream::zeros(len),
        }
    }

    pub fn p(&self) -> &BitStream {
        &self.p
    }

    pub fn n(&self) -> &BitStream {
        &self.n
    }

    pub fn into_lines(self) -> (BitStream, BitStream) {
        (self.p, self.n)
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    /// True when one of the two lines is all-zero.
    pub fn is_canonical(&self) -> bool {
        self.p.is_all_zero() || self.n.is_all_zero()
    }

    /// True when no position carries a one on both lines.
    pub fn is_non_overlapping(&self) -> bool {
        self.p
            .words()
            .iter()
            .zip(self.n.words())
            .all(|(&a, &b)| a & b == 0)
    }

    /// Swaps the lines, i.e. negates the represented value.
    pub fn negated(&self) -> Self {
        Self {
            p: self.n.clone(),
            n: self.p.clone(),
        }
    }

    pub fn delayed(&self, depth: usize) -> Self {
        Self {
            p: self.p.delayed(depth),
            n: self.n.delayed(depth),
        }
    }

    /// Signed difference of ones counts.
    pub fn net_count(&self) -> i64 {
        self.p.count_ones() as i64 - self.n.count_ones() as i64
    }

    pub fn decode(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        self.net_count() as f64 / self.len() as f64
    }
}

/// Sign/magnitude pair: value `(1/L) * sum (1 - 2 s[l]) m[l]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignMagStream {
    s: BitStream,
    m: BitStream,
}

impl SignMagStream {
    pub fn new(s: BitStream, m: BitStream) -> Result<Self> {
        check_len(s.len(), m.len())?;
        Ok(Self { s, m })
    }

    pub fn sign(&self) -> &BitStream {
        &self.s
    }

    pub fn magnitude(&self) -> &BitStream {
        &self.m
    }

    pub fn len(&self) -> usize {
        self.m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.m.is_empty()
    }

    pub fn decode(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        let neg = self.m.and(&self.s).expect("equal lengths").count_ones() as i64;
        let total = self.m.count_ones() as i64;
        (total - 2 * neg) as f64 / self.len() as f64
    }
}

pub fn decode_tlb(s: &TlbStream) -> f64 {
    s.decode()
}

pub fn decode_signmag(s: &SignMagStream) -> f64 {
    s.decode()
}

/// `p = m AND NOT s`, `n = m AND s`.
pub fn signmag_to_tlb(u: &SignMagStream) -> TlbStream {
    TlbStream {
        p: u.m.and_not(&u.s).expect("equal lengths"),
        n: u.m.and(&u.s).expect("equal lengths"),
    }
}

/// `m = p OR n`, `s = n`. Requires a non-overlapping input; run the
/// cancellation circuit first if in doubt.
pub fn tlb_to_signmag(t: &TlbStream) -> Result<SignMagStream> {
    if !t.is_non_overlapping() {
        return Err(Error::Precondition(
            "two-line stream has ones on both lines at the same position".into(),
        ));
    }
    Ok(SignMagStream {
        s: t.n.clone(),
        m: t.p.or(&t.n)?,
    })
}
