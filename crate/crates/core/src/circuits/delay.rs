use std::collections::VecDeque;

use crate::bitstream::TlbStream;

/// Flip-flop chain of fixed depth, zero-initialised.
#[derive(Clone, Debug)]
pub struct DelayLine {
    buf: VecDeque<bool>,
}

impl DelayLine {
    pub fn new(depth: usize) -> Self {
        Self {
            buf: std::iter::repeat_n(false, depth).collect(),
        }
    }

    pub fn depth(&self) -> usize {
        self.buf.len()
    }

    /// Clocks `bit` in and returns the bit that entered `depth` cycles ago.
    pub fn push(&mut self, bit: bool) -> bool {
        if self.buf.is_empty() {
            return bit;
        }
        self.buf.push_back(bit);
        self.buf.pop_front().unwrap()
    }
}

/// Both lines delayed by `depth` cycles; length is preserved.
pub fn delay_stream(s: &TlbStream, depth: usize) -> TlbStream {
    s.delayed(depth)
}
