use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{DmdError, Result};

/// Layout of a flattened 2D field: `nx` columns by `ny` rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FieldGrid {
    pub nx: usize,
    pub ny: usize,
    /// Row-major flattening (`k = row * nx + col`); column-major otherwise.
    pub row_major: bool,
}

impl FieldGrid {
    pub fn new(nx: usize, ny: usize) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(DmdError::input("grid dimensions must be positive"));
        }
        Ok(FieldGrid {
            nx,
            ny,
            row_major: true,
        })
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn check_dim(&self, n: usize) -> Result<()> {
        if self.len() != n {
            return Err(DmdError::input(format!(
                "grid {}x{} holds {} values, state dimension is {n}",
                self.nx,
                self.ny,
                self.len()
            )));
        }
        Ok(())
    }

    fn flat_index(&self, row: usize, col: usize) -> usize {
        if self.row_major {
            row * self.nx + col
        } else {
            col * self.ny + row
        }
    }
}

impl FromStr for FieldGrid {
    type Err = DmdError;

    /// Parses `NXxNY`, e.g. `199x449`.
    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(['x', 'X'])
            .ok_or_else(|| DmdError::input(format!("grid '{s}' is not of the form NXxNY")))?;
        let nx = a
            .trim()
            .parse()
            .map_err(|_| DmdError::input(format!("bad grid width '{a}'")))?;
        let ny = b
            .trim()
            .parse()
            .map_err(|_| DmdError::input(format!("bad grid height '{b}'")))?;
        FieldGrid::new(nx, ny)
    }
}

/// Binary greyscale PGM (P5, 8-bit) of one field, min-max scaled to 0..=255.
pub fn pgm_bytes(values: &[f64], grid: &FieldGrid) -> Result<Vec<u8>> {
    grid.check_dim(values.len())?;
    let (lo, hi) = values
        .iter()
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let span = hi - lo;
    let mut out = format!("P5\n{} {}\n255\n", grid.nx, grid.ny).into_bytes();
    out.reserve(grid.len());
    for row in 0..grid.ny {
        for col in 0..grid.nx {
            let v = values[grid.flat_index(row, col)];
            let level = if span > 0.0 && v.is_finite() {
                (255.0 * (v - lo) / span).round().clamp(0.0, 255.0) as u8
            } else {
                0
            };
            out.push(level);
        }
    }
    Ok(out)
}

pub fn write_pgm(path: impl AsRef<Path>, values: &[f64], grid: &FieldGrid) -> Result<()> {
    fs::write(path, pgm_bytes(values, grid)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_grid() {
        let g: FieldGrid = "3x2".parse().unwrap();
        assert_eq!((g.nx, g.ny), (3, 2));
        assert!("3*2".parse::<FieldGrid>().is_err());
        assert!("0x2".parse::<FieldGrid>().is_err());
    }

    #[test]
    fn min_max_scaled_p5() {
        let g = FieldGrid::new(2, 2).unwrap();
        let bytes = pgm_bytes(&[0.0, 1.0, 2.0, 4.0], &g).unwrap();
        let header = b"P5\n2 2\n255\n";
        assert_eq!(&bytes[..header.len()], header);
        assert_eq!(&bytes[header.len()..], &[0, 64, 128, 255]);
        assert!(pgm_bytes(&[0.0; 3], &g).is_err());
    }

    #[test]
    fn column_major_layout() {
        let g = FieldGrid {
            nx: 2,
            ny: 2,
            row_major: false,
        };
        let bytes = pgm_bytes(&[0.0, 1.0, 2.0, 3.0], &g).unwrap();
        let body = &bytes[bytes.len() - 4..];
        assert_eq!(body, &[0, 170, 85, 255]);
    }
}
