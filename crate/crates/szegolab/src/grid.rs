//! Uniform periodic grids carrying the discrete Fourier correspondence.
//!
//! A `Grid1D` covers the physical interval [-L, L) with n equispaced points
//! and the dual frequency lattice k*dxi, dxi = pi/L, in FFT bin order
//! (0, dxi, ..., -2 dxi, -dxi).  The consistency relation dx * dxi * n = 2*pi
//! holds exactly up to floating point.

use std::f64::consts::PI;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum GridError {
    #[error("n_points must be a power of two and >= 8, got {0}")]
    BadSize(usize),
    #[error("half_width must be positive, got {0}")]
    BadHalfWidth(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    pub half_width: f64,
    pub n_points: usize,
}

pub fn make_grid(half_width: f64, n_points: usize) -> Result<Grid1D, GridError> {
    if !n_points.is_power_of_two() || n_points < 8 {
        return Err(GridError::BadSize(n_points));
    }
    if !(half_width > 0.0) || !half_width.is_finite() {
        return Err(GridError::BadHalfWidth(half_width));
    }
    Ok(Grid1D {
        half_width,
        n_points,
    })
}

impl Grid1D {
    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.n_points as f64
    }

    pub fn dxi(&self) -> f64 {
        PI / self.half_width
    }

    /// Physical sample location of index j: x_j = -L + j*dx.
    pub fn x(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.dx()
    }

    /// Signed bin number of FFT-ordered index k, in -n/2 .. n/2-1.
    pub fn bin(&self, k: usize) -> i64 {
        let n = self.n_points as i64;
        let k = k as i64;
        if k < n / 2 {
            k
        } else {
            k - n
        }
    }

    /// Frequency of FFT-ordered index k.
    pub fn freq(&self, k: usize) -> f64 {
        self.bin(k) as f64 * self.dxi()
    }

    pub fn freqs(&self) -> Vec<f64> {
        (0..self.n_points).map(|k| self.freq(k)).collect()
    }

    /// FFT-ordered index holding signed bin b (must be within band).
    pub fn index_of_bin(&self, b: i64) -> Option<usize> {
        let n = self.n_points as i64;
        if b < -n / 2 || b >= n / 2 {
            return None;
        }
        Some(if b >= 0 { b as usize } else { (b + n) as usize })
    }

    /// The asymmetric highest-frequency bin (index n/2, frequency -n/2*dxi).
    pub fn nyquist_index(&self) -> usize {
        self.n_points / 2
    }

    /// Largest magnitude of a representable frequency, (n/2)*dxi.
    pub fn band_limit(&self) -> f64 {
        self.n_points as f64 / 2.0 * self.dxi()
    }

    /// Same box sampled at double the point count (doubled frequency band).
    pub fn padded(&self) -> Grid1D {
        Grid1D {
            half_width: self.half_width,
            n_points: 2 * self.n_points,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    pub gx: Grid1D,
    pub gy: Grid1D,
}

impl Grid2D {
    pub fn new(gx: Grid1D, gy: Grid1D) -> Grid2D {
        Grid2D { gx, gy }
    }

    pub fn len(&self) -> usize {
        self.gx.n_points * self.gy.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Row-major flat index: x-index major, so each xi-fiber over y is contiguous.
    pub fn idx(&self, ix: usize, iy: usize) -> usize {
        ix * self.gy.n_points + iy
    }
}
