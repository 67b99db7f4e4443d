//! Tab-separated per-cycle dumps of circuit state.

use std::io::Write;

use crate::error::Result;

pub struct TraceWriter<W: Write> {
    out: W,
    header_written: bool,
}

impl<W: Write> TraceWriter<W> {
    pub fn new(out: W) -> Self {
        Self {
            out,
            header_written: false,
        }
    }

    pub fn record_max(&mut self, cycle: usize, a: bool, b: bool, credit: u32, out: bool) -> Result<()> {
        if !self.header_written {
            writeln!(self.out, "# cycle\ta\tb\tcredit\tout")?;
            self.header_written = true;
        }
        writeln!(self.out, "{cycle}\t{}\t{}\t{credit}\t{}", a as u8, b as u8, out as u8)?;
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    pub fn record_adder(
        &mut self,
        cycle: usize,
        pos_in: u32,
        neg_in: u32,
        pos_store: u32,
        neg_store: u32,
        out_p: bool,
        out_n: bool,
    ) -> Result<()> {
        if !self.header_written {
            writeln!(self.out, "# cycle\tpos_in\tneg_in\tpos_carry\tneg_carry\tout_p\tout_n")?;
            self.header_written = true;
        }
        writeln!(
            self.out,
            "{cycle}\t{pos_in}\t{neg_in}\t{pos_store}\t{neg_store}\t{}\t{}",
            out_p as u8, out_n as u8
        )?;
        Ok(())
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}
