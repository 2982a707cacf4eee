//! Binary parameter container.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic     8 bytes   "HFDSCKPT"
//! version   u32       1
//! kind      u32 length + UTF-8 ansatz name
//! blocks    u32 count, then per block:
//!             u32 name length + UTF-8 name
//!             u8  1 if complex, 0 if real
//!             u32 rank, rank x u64 dims
//! values    u64 count of (re, im) pairs, then count x (f64 re, f64 im)
//! ```
//!
//! Real parameter blocks are stored in the real part with a zero imaginary part.

use std::io::{Read, Write};

use num_complex::Complex;

use super::{Ansatz, ParamBlock};
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const MAGIC: &[u8; 8] = b"HFDSCKPT";
pub const VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub kind: String,
    pub blocks: Vec<ParamBlock>,
    pub values: Vec<Complex<f64>>,
}

impl Checkpoint {
    pub fn from_ansatz<T: Real, A: Ansatz<T> + ?Sized>(a: &A) -> Self {
        let blocks = a.blocks();
        let p = a.params();
        let mut values = Vec::new();
        let mut off = 0;
        for b in &blocks {
            let len = b.real_len();
            if b.complex {
                values.extend(p[off..off + len].chunks_exact(2).map(|c| Complex::new(c[0].as_f64(), c[1].as_f64())));
            } else {
                values.extend(p[off..off + len].iter().map(|x| Complex::new(x.as_f64(), 0.0)));
            }
            off += len;
        }
        Checkpoint { kind: a.name().to_string(), blocks, values }
    }

    /// Load the stored values into `a`, which must have the same kind and block table.
    pub fn apply_to<T: Real, A: Ansatz<T> + ?Sized>(&self, a: &mut A) -> Result<()> {
        if a.name() != self.kind || a.blocks() != self.blocks {
            return Err(Error::Checkpoint(format!("checkpoint holds a {} with a different shape table", self.kind)));
        }
        let mut p = Vec::with_capacity(a.num_params());
        let mut vals = self.values.iter();
        for b in &self.blocks {
            let n: usize = b.dims.iter().product();
            for z in vals.by_ref().take(n) {
                p.push(T::of(z.re));
                if b.complex {
                    p.push(T::of(z.im));
                }
            }
        }
        if p.len() != a.num_params() {
            return Err(Error::Checkpoint("value count does not match the shape table".into()));
        }
        a.set_params(&p);
        Ok(())
    }

    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        write_str(&mut w, &self.kind)?;
        w.write_all(&(self.blocks.len() as u32).to_le_bytes())?;
        for b in &self.blocks {
            write_str(&mut w, &b.name)?;
            w.write_all(&[u8::from(b.complex)])?;
            w.write_all(&(b.dims.len() as u32).to_le_bytes())?;
            for d in &b.dims {
                w.write_all(&(*d as u64).to_le_bytes())?;
            }
        }
        w.write_all(&(self.values.len() as u64).to_le_bytes())?;
        for z in &self.values {
            w.write_all(&z.re.to_le_bytes())?;
            w.write_all(&z.im.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Checkpoint("bad magic bytes".into()));
        }
        let version = read_u32(&mut r)?;
        if version != VERSION {
            return Err(Error::Checkpoint(format!("unsupported version {version}")));
        }
        let kind = read_str(&mut r)?;
        let n_blocks = read_u32(&mut r)?;
        let mut blocks = Vec::new();
        let mut expected = 0usize;
        for _ in 0..n_blocks {
            let name = read_str(&mut r)?;
            let mut flag = [0u8; 1];
            r.read_exact(&mut flag)?;
            let rank = read_u32(&mut r)?;
            let dims = (0..rank).map(|_| read_u64(&mut r).map(|d| d as usize)).collect::<Result<Vec<_>>>()?;
            expected += dims.iter().product::<usize>();
            blocks.push(ParamBlock { name, dims, complex: flag[0] != 0 });
        }
        let count = read_u64(&mut r)? as usize;
        if count != expected {
            return Err(Error::Checkpoint(format!("{count} values for a shape table of {expected}")));
        }
        let mut values = Vec::with_capacity(count);
        for _ in 0..count {
            let re = f64::from_le_bytes(read_array(&mut r)?);
            let im = f64::from_le_bytes(read_array(&mut r)?);
            values.push(Complex::new(re, im));
        }
        Ok(Checkpoint { kind, blocks, values })
    }
}

fn write_str<W: Write>(w: &mut W, s: &str) -> Result<()> {
    w.write_all(&(s.len() as u32).to_le_bytes())?;
    w.write_all(s.as_bytes())?;
    Ok(())
}

fn read_array<R: Read, const N: usize>(r: &mut R) -> Result<[u8; N]> {
    let mut b = [0u8; N];
    r.read_exact(&mut b)?;
    Ok(b)
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    Ok(u32::from_le_bytes(read_array(r)?))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    Ok(u64::from_le_bytes(read_array(r)?))
}

fn read_str<R: Read>(r: &mut R) -> Result<String> {
    let len = read_u32(r)? as usize;
    let mut buf = vec![0u8; len];
    r.read_exact(&mut buf)?;
    String::from_utf8(buf).map_err(|e| Error::Checkpoint(e.to_string()))
}
