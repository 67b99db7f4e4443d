//! Non-scaled addition with carry stores, and the multiplier and scalar
//! product built on top of it.
//!
//! Each output line can emit at most one bit per cycle. Ones that arrive in
//! excess are parked in a bounded carry store (one per line) and emitted in
//! later cycles. Positive and negative carries cancel pairwise, which leaves
//! the decoded value unchanged.

use std::io::Write;

use crate::bitstream::{BitStream, BitStreamBuilder, TlbStream};
use crate::error::{check_len, Error, Result};

use super::trace::TraceWriter;

/// Per-line accounting of a carry adder. For each line,
/// `pushed = emitted + residue + overflow + cancelled`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CarryStats {
    pub pushed_pos: u64,
    pub pushed_neg: u64,
    pub emitted_pos: u64,
    pub emitted_neg: u64,
    /// Units removed from both stores by cross-cancellation.
    pub cancelled: u64,
    pub overflow_pos: u64,
    pub overflow_neg: u64,
}

impl CarryStats {
    pub fn overflow(&self) -> u64 {
        self.overflow_pos + self.overflow_neg
    }
}

/// Positive and negative carry stores of depth `D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CarryAdderState {
    depth: u32,
    pos: u32,
    neg: u32,
    stats: CarryStats,
}

pub const DEFAULT_CARRY_DEPTH: u32 = 20;

impl CarryAdderState {
    pub fn new(depth: u32) -> Result<Self> {
        if depth == 0 {
            return Err(Error::Config("carry depth must be >= 1".into()));
        }
        Ok(Self {
            depth,
            pos: 0,
            neg: 0,
            stats: CarryStats::default(),
        })
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn positive_carries(&self) -> u32 {
        self.pos
    }

    pub fn negative_carries(&self) -> u32 {
        self.neg
    }

    pub fn stats(&self) -> CarryStats {
        self.stats
    }

    /// Clears the stores but keeps the cumulative statistics.
    pub fn reset_stores(&mut self) {
        self.pos = 0;
        self.neg = 0;
    }

    /// One clock: accept `pos_in` positive and `neg_in` negative units,
    /// cancel matching carries, emit at most one bit per line, then drop
    /// whatever exceeds the store depth.
    #[inline]
    pub fn cycle(&mut self, pos_in: u32, neg_in: u32) -> (bool, bool) {
        self.stats.pushed_pos += pos_in as u64;
        self.stats.pushed_neg += neg_in as u64;
        let mut pos = self.pos + pos_in;
        let mut neg = self.neg + neg_in;

        let c = pos.min(neg);
        pos -= c;
        neg -= c;
        self.stats.cancelled += c as u64;

        let out_p = (pos > 0) as u32;
        let out_n = (neg > 0) as u32;
        pos -= out_p;
        neg -= out_n;
        self.stats.emitted_pos += out_p as u64;
        self.stats.emitted_neg += out_n as u64;

        let over_p = pos.saturating_sub(self.depth);
        let over_n = neg.saturating_sub(self.depth);
        self.stats.overflow_pos += over_p as u64;
        self.stats.overflow_neg += over_n as u64;
        self.pos = pos - over_p;
        self.neg = neg - over_n;
        (out_p == 1, out_n == 1)
    }
}

fn common_len(streams: &[&TlbStream]) -> Result<usize> {
    let len = streams
        .first()
        .ok_or_else(|| Error::Precondition("at least one input stream required".into()))?
        .len();
    for s in streams {
        check_len(len, s.len())?;
    }
    Ok(len)
}

fn bit(words: &[u64], i: usize) -> u32 {
    ((words[i / 64] >> (i % 64)) & 1) as u32
}

/// Bit-sliced counters: slice `b` holds bit `b` of the per-cycle input count.
const MAX_SLICES: usize = 16;

fn slices_for(planes: usize) -> usize {
    (usize::BITS - planes.leading_zeros()) as usize
}

#[inline]
fn add_plane(count: &mut [u64], mut carry: u64) {
    for c in count.iter_mut() {
        if carry == 0 {
            break;
        }
        let t = *c & carry;
        *c ^= carry;
        carry = t;
    }
}

/// Clocks `state` over `len` cycles. For word `w`, `fill(w, pos, neg)` adds
/// every positive and negative input bit plane of that word to the counters.
fn drive(
    state: &mut CarryAdderState,
    len: usize,
    pos_planes: usize,
    neg_planes: usize,
    mut fill: impl FnMut(usize, &mut [u64], &mut [u64]),
) -> Result<TlbStream> {
    let (sp, sn) = (slices_for(pos_planes), slices_for(neg_planes));
    if sp > MAX_SLICES || sn > MAX_SLICES {
        return Err(Error::Precondition("too many adder inputs".into()));
    }
    let nwords = len.div_ceil(64);
    let mut out_p = Vec::with_capacity(nwords);
    let mut out_n = Vec::with_capacity(nwords);
    // after full cancellation at most one store is nonempty, so the pair is
    // tracked as one signed level
    let depth = state.depth as i32;
    let mut level = state.pos as i32 - state.neg as i32;
    let start_pos = state.pos as u64;
    let (mut pushed_p, mut pushed_n, mut over_p, mut over_n) = (0u64, 0u64, 0u64, 0u64);
    for w in 0..nwords {
        let mut cp = [0u64; MAX_SLICES];
        let mut cn = [0u64; MAX_SLICES];
        let (cp, cn) = (&mut cp[..sp], &mut cn[..sn]);
        fill(w, cp, cn);
        let (mut wp, mut wn) = (0u64, 0u64);
        let idle = level == 0 && cp.iter().chain(cn.iter()).all(|&c| c == 0);
        if !idle {
            pushed_p += weighted_ones(cp);
            pushed_n += weighted_ones(cn);
            let mut net = [0i32; 64];
            for (b, &c) in cp.iter().enumerate() {
                for (k, d) in net.iter_mut().enumerate() {
                    *d += (((c >> k) & 1) as i32) << b;
                }
            }
            for (b, &c) in cn.iter().enumerate() {
                for (k, d) in net.iter_mut().enumerate() {
                    *d -= (((c >> k) & 1) as i32) << b;
                }
            }
            for (k, &d) in net.iter().enumerate().take((len - w * 64).min(64)) {
                level += d;
                let op = (level > 0) as i32;
                let on = (level < 0) as i32;
                level -= op - on;
                let clamped = level.clamp(-depth, depth);
                over_p += (level - clamped).max(0) as u64;
                over_n += (clamped - level).max(0) as u64;
                level = clamped;
                wp |= (op as u64) << k;
                wn |= (on as u64) << k;
            }
        }
        out_p.push(wp);
        out_n.push(wn);
    }
    let out = TlbStream::new(BitStream::from_words(out_p, len)?, BitStream::from_words(out_n, len)?)?;

    state.pos = level.max(0) as u32;
    state.neg = (-level).max(0) as u32;
    let emitted_p = out.p().count_ones() as u64;
    let emitted_n = out.n().count_ones() as u64;
    let st = &mut state.stats;
    st.pushed_pos += pushed_p;
    st.pushed_neg += pushed_n;
    st.emitted_pos += emitted_p;
    st.emitted_neg += emitted_n;
    st.overflow_pos += over_p;
    st.overflow_neg += over_n;
    // per-line conservation closes the books on the cancelled units
    st.cancelled += start_pos + pushed_p - emitted_p - over_p - state.pos as u64;
    Ok(out)
}

/// Sum of the counts held in a bit-sliced counter.
fn weighted_ones(count: &[u64]) -> u64 {
    count
        .iter()
        .enumerate()
        .map(|(b, c)| (c.count_ones() as u64) << b)
        .sum()
}

/// Non-scaled sum of two-line streams through one carry adder.
pub fn nonscaled_add(inputs: &[&TlbStream], state: &mut CarryAdderState) -> Result<TlbStream> {
    let len = common_len(inputs)?;
    drive(state, len, inputs.len(), inputs.len(), |w, cp, cn| {
        for s in inputs {
            add_plane(cp, s.p().words()[w]);
            add_plane(cn, s.n().words()[w]);
        }
    })
}

/// Same as [`nonscaled_add`] but writes one trace record per cycle.
pub fn nonscaled_add_traced<W: Write>(
    inputs: &[&TlbStream],
    state: &mut CarryAdderState,
    trace: &mut TraceWriter<W>,
) -> Result<TlbStream> {
    let len = common_len(inputs)?;
    let mut p = BitStreamBuilder::with_capacity(len);
    let mut n = BitStreamBuilder::with_capacity(len);
    for l in 0..len {
        let mut pos_in = 0;
        let mut neg_in = 0;
        for s in inputs {
            pos_in += bit(s.p().words(), l);
            neg_in += bit(s.n().words(), l);
        }
        let (op, on) = state.cycle(pos_in, neg_in);
        trace.record_adder(l, pos_in, neg_in, state.pos, state.neg, op, on)?;
        p.push(op);
        n.push(on);
    }
    TlbStream::new(p.finish(), n.finish())
}

/// Two-line product. Per cycle the positive contributions are
/// `x.p & y.p` and `x.n & y.n`, the negative ones `x.p & y.n` and
/// `x.n & y.p`; they are merged through `state`.
///
/// The inputs must be uncorrelated for the output to approximate the
/// product of the decoded values.
pub fn tlb_multiply(x: &TlbStream, y: &TlbStream, state: &mut CarryAdderState) -> Result<TlbStream> {
    check_len(x.len(), y.len())?;
    let (xp, xn, yp, yn) = (x.p().words(), x.n().words(), y.p().words(), y.n().words());
    drive(state, x.len(), 2, 2, |w, cp, cn| {
        add_plane(cp, xp[w] & yp[w]);
        add_plane(cp, xn[w] & yn[w]);
        add_plane(cn, xp[w] & yn[w]);
        add_plane(cn, xn[w] & yp[w]);
    })
}

/// Scalar product `sum_j x_j * a_j`: all element products feed one shared
/// carry adder, so the result is emitted as a single two-line stream.
pub fn scalar_product(
    x: &[TlbStream],
    a: &[TlbStream],
    state: &mut CarryAdderState,
) -> Result<TlbStream> {
    check_len(x.len(), a.len())?;
    if x.is_empty() {
        return Err(Error::Precondition("scalar product of empty vectors".into()));
    }
    let refs: Vec<&TlbStream> = x.iter().chain(a).collect();
    let len = common_len(&refs)?;
    let planes = 2 * x.len();
    drive(state, len, planes, planes, |w, cp, cn| {
        for (xj, aj) in x.iter().zip(a) {
            let (xp, xn) = (xj.p().words()[w], xj.n().words()[w]);
            let (ap, an) = (aj.p().words()[w], aj.n().words()[w]);
            add_plane(cp, xp & ap);
            add_plane(cp, xn & an);
            add_plane(cn, xp & an);
            add_plane(cn, xn & ap);
        }
    })
}
