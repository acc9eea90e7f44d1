//! Binary trace: `PAR1`, then `k d p T n` as little-endian `u32`, then for
//! each path and time the `k` responses as bytes followed by the `d`
//! covariates as little-endian `f64`.

use std::io::{Read, Write};

use crate::error::{invalid, Result};
use crate::model::{PanelData, PathData};

pub const TRACE_MAGIC: [u8; 4] = *b"PAR1";

fn to_u32(v: usize, what: &str) -> Result<u32> {
    u32::try_from(v).map_err(|_| invalid(format!("{what} = {v} does not fit the trace header")))
}

fn io_err(e: std::io::Error) -> crate::Error {
    crate::Error::io("<trace>", e)
}

/// Writes `data` and the lag order `p` it was generated or fitted with.
pub fn write_trace<W: Write>(data: &PanelData, p: usize, mut w: W) -> Result<()> {
    let header = [
        to_u32(data.k(), "k")?,
        to_u32(data.d(), "d")?,
        to_u32(p, "p")?,
        to_u32(data.horizon(), "T")?,
        to_u32(data.n(), "n")?,
    ];
    let mut buf = Vec::with_capacity(24 + data.n() * data.horizon() * (data.k() + 8 * data.d()));
    buf.extend_from_slice(&TRACE_MAGIC);
    for h in header {
        buf.extend_from_slice(&h.to_le_bytes());
    }
    for path in data.paths() {
        for t in 0..path.len() {
            buf.extend_from_slice(path.y(t));
            for v in path.x(t) {
                buf.extend_from_slice(&v.to_le_bytes());
            }
        }
    }
    w.write_all(&buf).map_err(io_err)?;
    w.flush().map_err(io_err)
}

/// Reads a trace back; returns the panel and the stored lag order.
pub fn read_trace<R: Read>(mut r: R) -> Result<(PanelData, usize)> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(io_err)?;
    if magic != TRACE_MAGIC {
        return Err(invalid("not a PAR1 trace"));
    }
    let mut header = [0usize; 5];
    for h in &mut header {
        let mut b = [0u8; 4];
        r.read_exact(&mut b).map_err(io_err)?;
        *h = u32::from_le_bytes(b) as usize;
    }
    let [k, d, p, horizon, n] = header;
    if k == 0 || n == 0 {
        return Err(invalid("trace header has k = 0 or n = 0"));
    }
    let mut paths = Vec::with_capacity(n);
    let mut ybuf = vec![0u8; k];
    let mut xbuf = [0u8; 8];
    for _ in 0..n {
        let mut y = Vec::with_capacity(horizon * k);
        let mut x = Vec::with_capacity(horizon * d);
        for _ in 0..horizon {
            r.read_exact(&mut ybuf).map_err(io_err)?;
            y.extend_from_slice(&ybuf);
            for _ in 0..d {
                r.read_exact(&mut xbuf).map_err(io_err)?;
                x.push(f64::from_le_bytes(xbuf));
            }
        }
        paths.push(PathData::new(k, d, y, x)?);
    }
    let mut rest = [0u8; 1];
    if r.read(&mut rest).map_err(io_err)? != 0 {
        return Err(invalid("trailing bytes after trace data"));
    }
    Ok((PanelData::new(paths)?, p))
}
