use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Domain {
    /// Rows are subcarriers `m`, columns are OFDM symbols `n`.
    TimeFrequency,
    /// Rows are delay bins `l`, columns are Doppler bins `k`.
    DelayDoppler,
}

/// Dense `rows × cols` symbol grid stored column-major, so each column (one
/// OFDM symbol, or one Doppler bin) is contiguous.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    rows: usize,
    cols: usize,
    domain: Domain,
    data: Vec<C64>,
}

impl Grid {
    pub fn zeros(rows: usize, cols: usize, domain: Domain) -> Self {
        Self {
            rows,
            cols,
            domain,
            data: vec![C64::default(); rows * cols],
        }
    }

    /// # Panics
    /// If `data.len() != rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, domain: Domain, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), rows * cols, "grid data length");
        Self {
            rows,
            cols,
            domain,
            data,
        }
    }

    pub fn from_fn(rows: usize, cols: usize, domain: Domain, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut g = Self::zeros(rows, cols, domain);
        for c in 0..cols {
            for r in 0..rows {
                g.data[c * rows + r] = f(r, c);
            }
        }
        g
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub(crate) fn set_domain(&mut self, domain: Domain) {
        self.domain = domain;
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[col * self.rows + row]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, v: C64) {
        self.data[col * self.rows + row] = v;
    }

    pub fn column(&self, col: usize) -> &[C64] {
        &self.data[col * self.rows..(col + 1) * self.rows]
    }

    pub fn column_mut(&mut self, col: usize) -> &mut [C64] {
        &mut self.data[col * self.rows..(col + 1) * self.rows]
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn energy(&self) -> f64 {
        crate::numerics::energy(&self.data)
    }

    pub fn same_shape(&self, other: &Grid) -> bool {
        self.rows == other.rows && self.cols == other.cols
    }
}
