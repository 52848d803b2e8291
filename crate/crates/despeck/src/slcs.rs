//! SLCS binary stack container.
//!
//! Layout on disk:
//!
//! ```text
//! offset  size  field
//! 0       6     magic 53 4C 43 53 01 00  ("SLCS", version 1)
//! 6       4     T   (u32, little endian)
//! 10      4     H   (u32, little endian)
//! 14      4     W   (u32, little endian)
//! 18      1     dtype: 0 = f32, 1 = f64
//! 19      1     layout: 0 = date-major, 1 = pixel-major
//! 20      6     reserved, zero
//! 26      ...   interleaved (re, im) samples, row-major within each plane,
//!               planes in the declared layout order
//! ```
//!
//! Real-valued rasters (truth maps, coherence sidecars) use the same
//! container with every imaginary part equal to zero.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::stack::{ComplexStack, Dtype, Layout, RealImage};

pub const MAGIC: [u8; 6] = [0x53, 0x4C, 0x43, 0x53, 0x01, 0x00];

pub fn write_stack(path: &Path, stack: &ComplexStack) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_stack_to(&mut w, stack)
}

pub fn write_stack_to<W: Write>(out: &mut W, stack: &ComplexStack) -> Result<()> {
    out.write_all(&MAGIC)?;
    out.write_all(&(stack.t() as u32).to_le_bytes())?;
    out.write_all(&(stack.h() as u32).to_le_bytes())?;
    out.write_all(&(stack.w() as u32).to_le_bytes())?;
    out.write_all(&[dtype_byte(stack.dtype), layout_byte(stack.layout())])?;
    out.write_all(&[0u8; 6])?;
    match stack.dtype {
        Dtype::F32 => {
            for v in stack.data() {
                out.write_all(&(v.re as f32).to_le_bytes())?;
                out.write_all(&(v.im as f32).to_le_bytes())?;
            }
        }
        Dtype::F64 => {
            for v in stack.data() {
                out.write_all(&v.re.to_le_bytes())?;
                out.write_all(&v.im.to_le_bytes())?;
            }
        }
    }
    Ok(())
}

pub fn read_stack(path: &Path) -> Result<ComplexStack> {
    let mut r = BufReader::new(File::open(path)?);
    read_stack_from(&mut r)
}

pub fn read_stack_from<R: Read>(input: &mut R) -> Result<ComplexStack> {
    let mut header = [0u8; 26];
    input.read_exact(&mut header).map_err(|_| Error::Format("SLCS header truncated".into()))?;
    if header[..6] != MAGIC {
        return Err(Error::Format("bad SLCS magic".into()));
    }
    let t = u32::from_le_bytes(header[6..10].try_into().unwrap()) as usize;
    let h = u32::from_le_bytes(header[10..14].try_into().unwrap()) as usize;
    let w = u32::from_le_bytes(header[14..18].try_into().unwrap()) as usize;
    let dtype = match header[18] {
        0 => Dtype::F32,
        1 => Dtype::F64,
        b => return Err(Error::Format(format!("unknown SLCS dtype byte {b}"))),
    };
    let layout = match header[19] {
        0 => Layout::DateMajor,
        1 => Layout::PixelMajor,
        b => return Err(Error::Format(format!("unknown SLCS layout byte {b}"))),
    };
    if header[20..26] != [0u8; 6] {
        return Err(Error::Format("nonzero reserved bytes in SLCS header".into()));
    }
    let count = t
        .checked_mul(h)
        .and_then(|v| v.checked_mul(w))
        .ok_or_else(|| Error::Format("SLCS dimensions overflow".into()))?;
    let mut data = Vec::with_capacity(count);
    match dtype {
        Dtype::F32 => {
            let mut buf = vec![0u8; count * 8];
            input.read_exact(&mut buf).map_err(|_| Error::Format("SLCS payload truncated".into()))?;
            for c in buf.chunks_exact(8) {
                let re = f32::from_le_bytes(c[0..4].try_into().unwrap());
                let im = f32::from_le_bytes(c[4..8].try_into().unwrap());
                data.push(Complex64::new(re as f64, im as f64));
            }
        }
        Dtype::F64 => {
            let mut buf = vec![0u8; count * 16];
            input.read_exact(&mut buf).map_err(|_| Error::Format("SLCS payload truncated".into()))?;
            for c in buf.chunks_exact(16) {
                let re = f64::from_le_bytes(c[0..8].try_into().unwrap());
                let im = f64::from_le_bytes(c[8..16].try_into().unwrap());
                data.push(Complex64::new(re, im));
            }
        }
    }
    let mut stack = ComplexStack::from_vec(t, h, w, layout, data)?;
    stack.dtype = dtype;
    Ok(stack)
}

/// Write a list of equally-sized real planes as a real-dtype sidecar.
pub fn write_real_planes(path: &Path, planes: &[RealImage]) -> Result<()> {
    if planes.is_empty() {
        return Err(Error::ShapeMismatch("no planes to write".into()));
    }
    let (h, w) = (planes[0].h(), planes[0].w());
    let mut data = Vec::with_capacity(planes.len() * h * w);
    for p in planes {
        if p.h() != h || p.w() != w {
            return Err(Error::ShapeMismatch("sidecar planes differ in size".into()));
        }
        data.extend(p.data().iter().map(|&v| Complex64::new(v, 0.0)));
    }
    let stack = ComplexStack::from_vec(planes.len(), h, w, Layout::DateMajor, data)?;
    write_stack(path, &stack)
}

pub fn read_real_planes(path: &Path) -> Result<Vec<RealImage>> {
    let stack = read_stack(path)?.permute_layout(Layout::DateMajor);
    let mut out = Vec::with_capacity(stack.t());
    for t in 0..stack.t() {
        let vals: Vec<f64> = stack.plane(t).iter().map(|c| c.re).collect();
        out.push(RealImage::from_vec(stack.h(), stack.w(), vals)?);
    }
    Ok(out)
}

fn dtype_byte(d: Dtype) -> u8 {
    match d {
        Dtype::F32 => 0,
        Dtype::F64 => 1,
    }
}

fn layout_byte(l: Layout) -> u8 {
    match l {
        Layout::DateMajor => 0,
        Layout::PixelMajor => 1,
    }
}
