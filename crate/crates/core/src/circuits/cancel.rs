use crate::bitstream::TlbStream;

/// One cycle of the cancellation circuit: simultaneous ones annihilate.
#[inline]
pub fn cancel_step(p: bool, n: bool) -> (bool, bool) {
    (p && !n, n && !p)
}

/// Cancellation applied to every position of a two-line stream.
pub fn cancel_streams(s: &TlbStream) -> TlbStream {
    let p = s.p().and_not(s.n()).expect("equal lengths");
    let n = s.n().and_not(s.p()).expect("equal lengths");
    TlbStream::new(p, n).expect("equal lengths")
}
