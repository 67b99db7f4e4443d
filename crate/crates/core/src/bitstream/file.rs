//! Packed binary container for bitstreams.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic   4 bytes  "SCBS"
//! len     u64      bits per line (L)
//! lines   u32      number of lines
//! payload lines * ceil(L / 8) bytes; bit l of a line is bit (l % 8) of byte l / 8
//! ```

use std::io::{Read, Write};

use super::stream::{BitStream, BitStreamBuilder};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"SCBS";

pub fn write_streams<W: Write>(mut w: W, lines: &[&BitStream]) -> Result<()> {
    let len = lines.first().map_or(0, |s| s.len());
    for s in lines {
        crate::error::check_len(len, s.len())?;
    }
    w.write_all(MAGIC)?;
    w.write_all(&(len as u64).to_le_bytes())?;
    w.write_all(&(lines.len() as u32).to_le_bytes())?;
    let nbytes = len.div_ceil(8);
    let mut buf = Vec::with_capacity(nbytes);
    for s in lines {
        buf.clear();
        for word in s.words() {
            buf.extend_from_slice(&word.to_le_bytes());
        }
        buf.truncate(nbytes);
        w.write_all(&buf)?;
    }
    Ok(())
}

pub fn read_streams<R: Read>(mut r: R) -> Result<Vec<BitStream>> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Parse(format!("bad stream file magic {magic:?}")));
    }
    let mut len_bytes = [0u8; 8];
    r.read_exact(&mut len_bytes)?;
    let len = u64::from_le_bytes(len_bytes) as usize;
    let mut count_bytes = [0u8; 4];
    r.read_exact(&mut count_bytes)?;
    let count = u32::from_le_bytes(count_bytes) as usize;

    let mut buf = vec![0u8; len.div_ceil(8)];
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        r.read_exact(&mut buf)?;
        let mut b = BitStreamBuilder::with_capacity(len);
        for l in 0..len {
            b.push((buf[l / 8] >> (l % 8)) & 1 == 1);
        }
        out.push(b.finish());
    }
    Ok(out)
}
