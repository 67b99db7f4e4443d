//! Stochastic maximum and the shrink block built from two of them.

use crate::bitstream::{BitStream, BitStreamBuilder, TlbStream};
use crate::error::{check_len, Error, Result};

use super::cancel::cancel_streams;

/// Bounded credit counter standing in for the bidirectional shift register
/// of the stochastic maximum circuit.
///
/// Transition rules, with `c` the credit and `M` the capacity:
///
/// | a | b | out | credit                   |
/// |---|---|-----|--------------------------|
/// | 1 | 1 | 1   | unchanged                |
/// | 0 | 1 | 1   | `max(c - 1, 0)`          |
/// | 1 | 0 | 0   | `c + 1` if `c < M`       |
/// | 1 | 0 | 1   | unchanged if `c == M`    |
/// | 0 | 0 | 0   | unchanged                |
///
/// A one on `b` always reaches the output. A one on `a` that is not matched
/// by `b` is absorbed as credit until the register is full; credit is paid
/// back by later unmatched ones of `b`. The credit is a birth-death chain
/// whose stationary occupancy of the full state is what makes excess ones
/// of `a` leak through.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaxCircuitState {
    capacity: u32,
    credit: u32,
}

impl MaxCircuitState {
    pub fn new(capacity: u32) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::Config("max circuit capacity must be >= 1".into()));
        }
        Ok(Self {
            capacity,
            credit: 0,
        })
    }

    pub fn capacity(&self) -> u32 {
        self.capacity
    }

    pub fn credit(&self) -> u32 {
        self.credit
    }

    #[inline]
    pub fn step(&mut self, a: bool, b: bool) -> bool {
        match (a, b) {
            (true, true) => true,
            (false, true) => {
                self.credit = self.credit.saturating_sub(1);
                true
            }
            (true, false) => {
                if self.credit < self.capacity {
                    self.credit += 1;
                    false
                } else {
                    true
                }
            }
            (false, false) => false,
        }
    }

    /// Runs the state machine over two streams, continuing from the current
    /// credit.
    pub fn run(&mut self, a: &BitStream, b: &BitStream) -> Result<BitStream> {
        check_len(a.len(), b.len())?;
        let len = a.len();
        let table = NibbleTable::new(self);
        let mut out = Vec::with_capacity(a.words().len());
        for (&wa, &wb) in a.words().iter().zip(b.words()) {
            // no unmatched a ones and no credit to pay back: the word is b
            if wa & !wb == 0 && (wb & !wa == 0 || self.credit == 0) {
                out.push(wb);
                continue;
            }
            // tail bits past `len` are zero on both inputs, which leaves the
            // credit unchanged
            let mut w = 0u64;
            for k in (0..64).step_by(4) {
                let (o, c) = table.get(self.credit, (wa >> k) as usize & 0xf, (wb >> k) as usize & 0xf);
                self.credit = c;
                w |= (o as u64) << k;
            }
            out.push(w);
        }
        BitStream::from_words(out, len)
    }
}

/// Four cycles of the state machine at once, indexed by credit and the
/// input nibbles.
struct NibbleTable {
    entries: Vec<(u8, u32)>,
}

impl NibbleTable {
    fn new(proto: &MaxCircuitState) -> Self {
        let mut entries = Vec::with_capacity((proto.capacity as usize + 1) * 256);
        for credit in 0..=proto.capacity {
            for a in 0..16u32 {
                for b in 0..16u32 {
                    let mut st = MaxCircuitState { credit, ..*proto };
                    let mut o = 0u8;
                    for k in 0..4 {
                        if st.step((a >> k) & 1 == 1, (b >> k) & 1 == 1) {
                            o |= 1 << k;
                        }
                    }
                    entries.push((o, st.credit));
                }
            }
        }
        Self { entries }
    }

    #[inline]
    fn get(&self, credit: u32, a: usize, b: usize) -> (u8, u32) {
        self.entries[(credit as usize) << 8 | a << 4 | b]
    }
}

/// Stochastic maximum of two unipolar streams, starting from zero credit.
pub fn max_stream(a: &BitStream, b: &BitStream, capacity: u32) -> Result<BitStream> {
    MaxCircuitState::new(capacity)?.run(a, b)
}

/// Same as [`max_stream`] but writes one trace record per cycle.
pub fn max_stream_traced(
    a: &BitStream,
    b: &BitStream,
    capacity: u32,
    trace: &mut super::trace::TraceWriter<impl std::io::Write>,
) -> Result<BitStream> {
    check_len(a.len(), b.len())?;
    let mut st = MaxCircuitState::new(capacity)?;
    let mut out = BitStreamBuilder::with_capacity(a.len());
    for (cycle, (bit_a, bit_b)) in a.iter().zip(b.iter()).enumerate() {
        let o = st.step(bit_a, bit_b);
        trace.record_max(cycle, bit_a, bit_b, st.credit(), o)?;
        out.push(o);
    }
    Ok(out.finish())
}

/// SC shrink: both lines of a canonical `v` go through a stochastic maximum
/// against the same `lambda` stream, followed by cancellation.
pub fn shrink_stream(v: &TlbStream, lambda: &BitStream, capacity: u32) -> Result<TlbStream> {
    check_len(v.len(), lambda.len())?;
    if !v.is_canonical() {
        return Err(Error::Precondition(
            "shrink input must have one all-zero line".into(),
        ));
    }
    let p = max_stream(v.p(), lambda, capacity)?;
    let n = max_stream(v.n(), lambda, capacity)?;
    Ok(cancel_streams(&TlbStream::new(p, n)?))
}
