//! Little-endian binary container for radial fields.
//!
//! ```text
//! offset size  field
//!  0     4     magic "IBNF"
//!  4     2     version (u16) = 1
//!  6     1     precision: 8 = complex64 (2×f32), 16 = complex128 (2×f64)
//!  7     1     reserved, 0
//!  8     4     N (u32)
//! 12     8     M (u64)
//! 20     8     R_max (f64)
//! 28     8     b (f64)
//! 36     8     alpha (f64)
//! 44     8     t (f64)
//! 52     …     M pairs (re, im)
//! ```

use std::io::{Read, Write};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use num_complex::Complex64;

use super::grid::RadialGrid;
use crate::error::ContainerError;

pub const MAGIC: &[u8; 4] = b"IBNF";
pub const VERSION: u16 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    Complex64,
    Complex128,
}

impl Precision {
    fn tag(self) -> u8 {
        match self {
            Precision::Complex64 => 8,
            Precision::Complex128 => 16,
        }
    }

    fn from_tag(tag: u8) -> Result<Self, ContainerError> {
        match tag {
            8 => Ok(Precision::Complex64),
            16 => Ok(Precision::Complex128),
            other => Err(ContainerError::Precision(other)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldHeader {
    pub dim: u32,
    pub m: u64,
    pub r_max: f64,
    pub b: f64,
    pub alpha: f64,
    pub t: f64,
    pub precision: Precision,
}

impl FieldHeader {
    /// Fails unless `N`, `M` and `R_max` agree with `grid` exactly.
    pub fn check_grid(&self, grid: &RadialGrid) -> Result<(), ContainerError> {
        if self.dim != grid.dim || self.m != grid.len() as u64 || self.r_max != grid.r_max {
            return Err(ContainerError::Mismatch(format!(
                "file has N={} M={} R_max={}, grid has N={} M={} R_max={}",
                self.dim,
                self.m,
                self.r_max,
                grid.dim,
                grid.len(),
                grid.r_max
            )));
        }
        Ok(())
    }
}

pub fn write_field<W: Write>(
    mut w: W,
    header: &FieldHeader,
    values: &[Complex64],
) -> Result<(), ContainerError> {
    if values.len() as u64 != header.m {
        return Err(ContainerError::Mismatch(format!(
            "header declares M={} but {} values were given",
            header.m,
            values.len()
        )));
    }
    w.write_all(MAGIC)?;
    w.write_u16::<LittleEndian>(VERSION)?;
    w.write_u8(header.precision.tag())?;
    w.write_u8(0)?;
    w.write_u32::<LittleEndian>(header.dim)?;
    w.write_u64::<LittleEndian>(header.m)?;
    for x in [header.r_max, header.b, header.alpha, header.t] {
        w.write_f64::<LittleEndian>(x)?;
    }
    for z in values {
        match header.precision {
            Precision::Complex64 => {
                w.write_f32::<LittleEndian>(z.re as f32)?;
                w.write_f32::<LittleEndian>(z.im as f32)?;
            }
            Precision::Complex128 => {
                w.write_f64::<LittleEndian>(z.re)?;
                w.write_f64::<LittleEndian>(z.im)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_field<R: Read>(mut r: R) -> Result<(FieldHeader, Vec<Complex64>), ContainerError> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(ContainerError::Magic);
    }
    let version = r.read_u16::<LittleEndian>()?;
    if version != VERSION {
        return Err(ContainerError::Version(version));
    }
    let precision = Precision::from_tag(r.read_u8()?)?;
    let _reserved = r.read_u8()?;
    let dim = r.read_u32::<LittleEndian>()?;
    let m = r.read_u64::<LittleEndian>()?;
    let r_max = r.read_f64::<LittleEndian>()?;
    let b = r.read_f64::<LittleEndian>()?;
    let alpha = r.read_f64::<LittleEndian>()?;
    let t = r.read_f64::<LittleEndian>()?;
    let mut values = Vec::with_capacity(m.min(1 << 24) as usize);
    for _ in 0..m {
        let z = match precision {
            Precision::Complex64 => Complex64::new(
                r.read_f32::<LittleEndian>()? as f64,
                r.read_f32::<LittleEndian>()? as f64,
            ),
            Precision::Complex128 => {
                Complex64::new(r.read_f64::<LittleEndian>()?, r.read_f64::<LittleEndian>()?)
            }
        };
        values.push(z);
    }
    Ok((FieldHeader { dim, m, r_max, b, alpha, t, precision }, values))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn header(m: u64, precision: Precision) -> FieldHeader {
        FieldHeader { dim: 5, m, r_max: 30.0, b: 1.0, alpha: 2.0, t: 1.25, precision }
    }

    #[test]
    fn roundtrip_double() {
        let values: Vec<_> = (0..7).map(|j| Complex64::new(j as f64 / 3.0, -(j as f64).sqrt())).collect();
        let mut buf = Vec::new();
        write_field(&mut buf, &header(7, Precision::Complex128), &values).unwrap();
        assert_eq!(buf.len(), 52 + 7 * 16);
        let (h, back) = read_field(buf.as_slice()).unwrap();
        assert_eq!(h, header(7, Precision::Complex128));
        assert_eq!(back, values);
    }

    #[test]
    fn roundtrip_single_rounds_to_f32() {
        let values = vec![Complex64::new(0.1, 0.2); 3];
        let mut buf = Vec::new();
        write_field(&mut buf, &header(3, Precision::Complex64), &values).unwrap();
        assert_eq!(buf.len(), 52 + 3 * 8);
        let (_, back) = read_field(buf.as_slice()).unwrap();
        assert_eq!(back[0].re, 0.1f32 as f64);
    }

    #[test]
    fn header_bytes() {
        let mut buf = Vec::new();
        write_field(&mut buf, &header(0, Precision::Complex128), &[]).unwrap();
        assert_eq!(&buf[0..4], b"IBNF");
        assert_eq!(&buf[4..8], &[1, 0, 16, 0]);
        assert_eq!(&buf[8..12], &5u32.to_le_bytes());
        assert_eq!(&buf[20..28], &30.0f64.to_le_bytes());
    }

    #[test]
    fn rejects_corruption() {
        let mut buf = Vec::new();
        write_field(&mut buf, &header(1, Precision::Complex128), &[Complex64::new(1.0, 0.0)]).unwrap();
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(read_field(bad.as_slice()), Err(ContainerError::Magic)));
        let mut bad = buf.clone();
        bad[6] = 4;
        assert!(matches!(read_field(bad.as_slice()), Err(ContainerError::Precision(4))));
        assert!(matches!(read_field(&buf[..buf.len() - 1]), Err(ContainerError::Io(_))));
    }
}
