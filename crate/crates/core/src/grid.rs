//! Cell-centred scalar grids and their CSV text form.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// Row-major scalar grid: `data[j * nx + i]` is column `i` (x), row `j` (y,
/// counted upward from the bottom of the column).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    pub data: Vec<f64>,
}

impl Grid {
    pub fn filled(nx: usize, ny: usize, value: f64) -> Self {
        Self { nx, ny, data: vec![value; nx * ny] }
    }

    pub fn from_fn(nx: usize, ny: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                data.push(f(i, j));
            }
        }
        Self { nx, ny, data }
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.nx + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let idx = self.index(i, j);
        self.data[idx] = v;
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    /// One text line per row, bottom row first, 17 significant digits.
    pub fn to_csv_rows(&self) -> String {
        let mut out = String::with_capacity(self.data.len() * 24);
        for row in self.data.chunks(self.nx) {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{v:.16e}");
            }
            out.push('\n');
        }
        out
    }

    /// Parses rows written by [`Grid::to_csv_rows`], skipping `#` comment lines.
    pub fn from_csv_rows(text: &str) -> Result<Self, String> {
        let mut data = Vec::new();
        let mut nx = None;
        let mut ny = 0;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut count = 0;
            for tok in line.split(',') {
                let v: f64 = tok
                    .trim()
                    .parse()
                    .map_err(|e| format!("line {}: bad number {tok:?}: {e}", lineno + 1))?;
                data.push(v);
                count += 1;
            }
            match nx {
                None => nx = Some(count),
                Some(n) if n != count => {
                    return Err(format!("line {}: expected {n} values, found {count}", lineno + 1));
                }
                _ => {}
            }
            ny += 1;
        }
        let nx = nx.ok_or_else(|| "no data rows".to_string())?;
        Ok(Self { nx, ny, data })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn csv_rows_round_trip(nx in 1usize..6, ny in 1usize..6, seed in any::<u64>()) {
            let g = Grid::from_fn(nx, ny, |i, j| {
                let x = (seed ^ ((i * 31 + j * 17) as u64)).wrapping_mul(0x9E37_79B9_7F4A_7C15);
                f64::from_bits((x >> 12) | 0x3FF0_0000_0000_0000) - 1.5
            });
            let back = Grid::from_csv_rows(&g.to_csv_rows()).unwrap();
            prop_assert_eq!(back, g);
        }
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(Grid::from_csv_rows("1,2\n3\n").is_err());
    }
}
