//! Stochastic number formats and their generation.

pub mod file;
pub mod lfsr;
pub mod sng;
pub mod stream;

pub use file::{read_streams, write_streams};
pub use lfsr::{default_taps, taps_are_maximal, LfsrGenerator};
pub use sng::{derive_seed, encode_tlb, generate_unipolar, SngConfig, StreamFactory};
pub use stream::{
    decode_signmag, decode_tlb, signmag_to_tlb, tlb_to_signmag, BitStream, BitStreamBuilder,
    SignMagStream, TlbStream,
};
