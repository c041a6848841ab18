//! Discrete Fourier transforms under the 1/(2*pi) forward convention.
//!
//! Forward: uhat(xi) = (1/2pi) * integral e^{-i x xi} u(x) dx, discretized as
//! c_k = (dx/2pi) * (-1)^k * FFT(u)_k with samples on [-L, L); inverse carries
//! the dxi weight.  Parseval then reads dx*sum|u|^2 = 2pi*dxi*sum|c|^2.

use crate::grid::{Grid1D, Grid2D};
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

fn planner() -> &'static Mutex<FftPlanner<f64>> {
    static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    PLANNER.get_or_init(|| Mutex::new(FftPlanner::new()))
}

fn plan(n: usize, inverse: bool) -> Arc<dyn rustfft::Fft<f64>> {
    let mut p = planner().lock().unwrap();
    if inverse {
        p.plan_fft_inverse(n)
    } else {
        p.plan_fft_forward(n)
    }
}

/// Unnormalized DFT (sum with e^{-2pi i jk/n}) or its unnormalized inverse.
pub fn fft_in_place(buf: &mut [Complex64], inverse: bool) {
    plan(buf.len(), inverse).process(buf);
}

#[derive(Debug, Clone, PartialEq)]
pub struct Field1D {
    pub grid: Grid1D,
    pub values: Vec<Complex64>,
}

impl Field1D {
    pub fn new(grid: Grid1D, values: Vec<Complex64>) -> Field1D {
        assert_eq!(values.len(), grid.n_points, "field length must match grid");
        Field1D { grid, values }
    }

    pub fn zero(grid: Grid1D) -> Field1D {
        Field1D {
            grid,
            values: vec![Complex64::ZERO; grid.n_points],
        }
    }

    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> Complex64) -> Field1D {
        let values = (0..grid.n_points).map(|j| f(grid.x(j))).collect();
        Field1D { grid, values }
    }

    /// sqrt(dx * sum |u|^2) — the box L^2 norm.
    pub fn l2_norm(&self) -> f64 {
        (self.grid.dx() * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
    }

    /// dx * sum |u| — the box L^1 norm.
    pub fn l1_norm(&self) -> f64 {
        self.grid.dx() * self.values.iter().map(|v| v.norm()).sum::<f64>()
    }
}

/// Physical samples -> spectral coefficients in FFT bin order.
pub fn transform_forward(f: &Field1D) -> Vec<Complex64> {
    let mut buf = f.values.clone();
    fft_in_place(&mut buf, false);
    let w = f.grid.dx() / (2.0 * PI);
    for (k, c) in buf.iter_mut().enumerate() {
        let s = if k % 2 == 0 { w } else { -w };
        *c *= s;
    }
    buf
}

/// Spectral coefficients in FFT bin order -> physical samples.
pub fn transform_inverse(coeffs: &[Complex64], grid: Grid1D) -> Field1D {
    assert_eq!(coeffs.len(), grid.n_points);
    let mut buf: Vec<Complex64> = coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| if k % 2 == 0 { *c } else { -*c })
        .collect();
    fft_in_place(&mut buf, true);
    let w = grid.dxi();
    for c in buf.iter_mut() {
        *c *= w;
    }
    Field1D { grid, values: buf }
}

/// Re-embed coefficients on the same box at double the band (zero padding).
pub fn pad_coeffs(coeffs: &[Complex64], grid: Grid1D) -> Vec<Complex64> {
    let pg = grid.padded();
    let mut out = vec![Complex64::ZERO; pg.n_points];
    for (k, c) in coeffs.iter().enumerate() {
        let b = grid.bin(k);
        out[pg.index_of_bin(b).unwrap()] = *c;
    }
    out
}

/// Inverse of `pad_coeffs`: keep bins inside the narrow band, zero the
/// asymmetric Nyquist bin (it can carry a wrapped cubic alias).
pub fn truncate_coeffs(coeffs: &[Complex64], grid: Grid1D) -> Vec<Complex64> {
    let pg = grid.padded();
    assert_eq!(coeffs.len(), pg.n_points);
    let mut out = vec![Complex64::ZERO; grid.n_points];
    for k in 0..grid.n_points {
        let b = grid.bin(k);
        out[k] = coeffs[pg.index_of_bin(b).unwrap()];
    }
    out[grid.nyquist_index()] = Complex64::ZERO;
    out
}

/// Dealiased cubic product u * conj(v) * w on spectral coefficients.
///
/// Zero-pads to double band, multiplies pointwise in physical space, and
/// truncates back; exact for band-limited inputs because cubic aliases on the
/// doubled grid land outside the retained band.
pub fn triple_product_1d(
    u: &[Complex64],
    v: &[Complex64],
    w: &[Complex64],
    grid: Grid1D,
) -> Vec<Complex64> {
    let pg = grid.padded();
    let up = transform_inverse(&pad_coeffs(u, grid), pg);
    let vp = transform_inverse(&pad_coeffs(v, grid), pg);
    let wp = transform_inverse(&pad_coeffs(w, grid), pg);
    let prod: Vec<Complex64> = up
        .values
        .iter()
        .zip(vp.values.iter())
        .zip(wp.values.iter())
        .map(|((a, b), c)| a * b.conj() * c)
        .collect();
    let chat = transform_forward(&Field1D {
        grid: pg,
        values: prod,
    });
    truncate_coeffs(&chat, grid)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    /// Samples U(x_i, y_j).
    Physical,
    /// Partial transform Uhat(xi_i, y_j): Fourier in x, physical in y.
    XFourier,
    /// Full transform FU(xi_i, eta_j).
    Full,
}

/// A 2-D complex field together with the representation its values are in.
/// Storage is row-major with the x index major, so each x-row (a fiber over
/// y at fixed x or xi) is contiguous.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum2D {
    pub grid: Grid2D,
    pub rep: Representation,
    pub values: Vec<Complex64>,
}

impl Spectrum2D {
    pub fn new(grid: Grid2D, rep: Representation, values: Vec<Complex64>) -> Spectrum2D {
        assert_eq!(values.len(), grid.len(), "value count must match grid");
        Spectrum2D { grid, rep, values }
    }

    pub fn zero(grid: Grid2D, rep: Representation) -> Spectrum2D {
        Spectrum2D {
            grid,
            rep,
            values: vec![Complex64::ZERO; grid.len()],
        }
    }

    pub fn from_fn(grid: Grid2D, f: impl Fn(f64, f64) -> Complex64) -> Spectrum2D {
        let mut values = Vec::with_capacity(grid.len());
        for ix in 0..grid.gx.n_points {
            for iy in 0..grid.gy.n_points {
                values.push(f(grid.gx.x(ix), grid.gy.x(iy)));
            }
        }
        Spectrum2D {
            grid,
            rep: Representation::Physical,
            values,
        }
    }

    pub fn at(&self, ix: usize, iy: usize) -> Complex64 {
        self.values[self.grid.idx(ix, iy)]
    }

    pub fn at_mut(&mut self, ix: usize, iy: usize) -> &mut Complex64 {
        let i = self.grid.idx(ix, iy);
        &mut self.values[i]
    }

    /// Contiguous row ix (the fiber over the y axis at fixed x or xi).
    pub fn row(&self, ix: usize) -> &[Complex64] {
        let ny = self.grid.gy.n_points;
        &self.values[ix * ny..(ix + 1) * ny]
    }

    pub fn row_mut(&mut self, ix: usize) -> &mut [Complex64] {
        let ny = self.grid.gy.n_points;
        &mut self.values[ix * ny..(ix + 1) * ny]
    }

    fn transform_y(&mut self, forward: bool) {
        let gy = self.grid.gy;
        let n = gy.n_points;
        let fft = plan(n, !forward);
        let wf = gy.dx() / (2.0 * PI);
        let wi = gy.dxi();
        for ix in 0..self.grid.gx.n_points {
            let row = self.row_mut(ix);
            if forward {
                fft.process(row);
                for (k, c) in row.iter_mut().enumerate() {
                    *c *= if k % 2 == 0 { wf } else { -wf };
                }
            } else {
                for (k, c) in row.iter_mut().enumerate() {
                    *c *= if k % 2 == 0 { wi } else { -wi };
                }
                fft.process(row);
            }
        }
    }

    fn transform_x(&mut self, forward: bool) {
        let gx = self.grid.gx;
        let ny = self.grid.gy.n_points;
        let n = gx.n_points;
        let fft = plan(n, !forward);
        let wf = gx.dx() / (2.0 * PI);
        let wi = gx.dxi();
        let mut col = vec![Complex64::ZERO; n];
        for iy in 0..ny {
            for ix in 0..n {
                col[ix] = self.values[ix * ny + iy];
            }
            if forward {
                fft.process(&mut col);
                for (k, c) in col.iter_mut().enumerate() {
                    *c *= if k % 2 == 0 { wf } else { -wf };
                }
            } else {
                for (k, c) in col.iter_mut().enumerate() {
                    *c *= if k % 2 == 0 { wi } else { -wi };
                }
                fft.process(&mut col);
            }
            for ix in 0..n {
                self.values[ix * ny + iy] = col[ix];
            }
        }
    }

    /// Convert in place to the requested representation.
    pub fn to_rep(&mut self, rep: Representation) {
        use Representation::*;
        while self.rep != rep {
            match (self.rep, rep) {
                (Physical, _) => {
                    self.transform_x(true);
                    self.rep = XFourier;
                }
                (XFourier, Full) => {
                    self.transform_y(true);
                    self.rep = Full;
                }
                (XFourier, Physical) => {
                    self.transform_x(false);
                    self.rep = Physical;
                }
                (Full, _) => {
                    self.transform_y(false);
                    self.rep = XFourier;
                }
                _ => unreachable!(),
            }
        }
    }

    pub fn into_rep(mut self, rep: Representation) -> Spectrum2D {
        self.to_rep(rep);
        self
    }

    pub fn cloned_rep(&self, rep: Representation) -> Spectrum2D {
        self.clone().into_rep(rep)
    }

    /// Box L^2 norm, computable in any representation (Parseval).
    pub fn l2_norm(&self) -> f64 {
        let sq: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        let g = self.grid;
        let w = match self.rep {
            Representation::Physical => g.gx.dx() * g.gy.dx(),
            Representation::XFourier => 2.0 * PI * g.gx.dxi() * g.gy.dx(),
            Representation::Full => (2.0 * PI).powi(2) * g.gx.dxi() * g.gy.dxi(),
        };
        (w * sq).sqrt()
    }

    pub fn scale(&mut self, c: Complex64) {
        for v in self.values.iter_mut() {
            *v *= c;
        }
    }

    pub fn add_scaled(&mut self, other: &Spectrum2D, c: Complex64) {
        assert_eq!(self.rep, other.rep);
        for (a, b) in self.values.iter_mut().zip(other.values.iter()) {
            *a += c * b;
        }
    }

    /// Zero the asymmetric Nyquist row and column in Full representation.
    pub fn zero_nyquist(&mut self) {
        assert_eq!(self.rep, Representation::Full);
        let (nx, ny) = (self.grid.gx.n_points, self.grid.gy.n_points);
        for iy in 0..ny {
            *self.at_mut(nx / 2, iy) = Complex64::ZERO;
        }
        for ix in 0..nx {
            *self.at_mut(ix, ny / 2) = Complex64::ZERO;
        }
    }
}

/// Dealiased 2-D cubic product F * conj(G) * H in Full representation.
pub fn triple_product_2d(f: &Spectrum2D, g: &Spectrum2D, h: &Spectrum2D) -> Spectrum2D {
    assert_eq!(f.rep, Representation::Full);
    assert_eq!(g.rep, Representation::Full);
    assert_eq!(h.rep, Representation::Full);
    let grid = f.grid;
    let pg = Grid2D::new(grid.gx.padded(), grid.gy.padded());
    let embed = |s: &Spectrum2D| -> Spectrum2D {
        let mut out = Spectrum2D::zero(pg, Representation::Full);
        for ix in 0..grid.gx.n_points {
            let px = pg.gx.index_of_bin(grid.gx.bin(ix)).unwrap();
            for iy in 0..grid.gy.n_points {
                let py = pg.gy.index_of_bin(grid.gy.bin(iy)).unwrap();
                *out.at_mut(px, py) = s.at(ix, iy);
            }
        }
        out.into_rep(Representation::Physical)
    };
    let fp = embed(f);
    let gp = embed(g);
    let hp = embed(h);
    let mut prod = Spectrum2D::zero(pg, Representation::Physical);
    for i in 0..prod.values.len() {
        prod.values[i] = fp.values[i] * gp.values[i].conj() * hp.values[i];
    }
    let prod = prod.into_rep(Representation::Full);
    let mut out = Spectrum2D::zero(grid, Representation::Full);
    for ix in 0..grid.gx.n_points {
        let px = pg.gx.index_of_bin(grid.gx.bin(ix)).unwrap();
        for iy in 0..grid.gy.n_points {
            let py = pg.gy.index_of_bin(grid.gy.bin(iy)).unwrap();
            *out.at_mut(ix, iy) = prod.at(px, py);
        }
    }
    out.zero_nyquist();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use rand::{Rng, SeedableRng};

    fn randn(rng: &mut impl Rng) -> Complex64 {
        Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
    }

    /// Direct quadratic-cost evaluation of the weighted forward transform.
    fn dft_oracle(f: &Field1D) -> Vec<Complex64> {
        let g = f.grid;
        let n = g.n_points;
        let mut out = vec![Complex64::ZERO; n];
        for k in 0..n {
            let xi = g.freq(k);
            let mut acc = Complex64::ZERO;
            for j in 0..n {
                acc += f.values[j] * Complex64::new(0.0, -g.x(j) * xi).exp();
            }
            out[k] = acc * g.dx() / (2.0 * PI);
        }
        out
    }

    #[test]
    fn zero_transforms_to_zero() {
        let g = make_grid(PI, 8).unwrap();
        let c = transform_forward(&Field1D::zero(g));
        assert!(c.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn single_mode_is_single_bin() {
        let g = make_grid(PI, 8).unwrap();
        let f = Field1D::from_fn(g, |x| Complex64::new(0.0, x).exp());
        let c = transform_forward(&f);
        for k in 0..8 {
            let expect = if g.bin(k) == 1 {
                // hat(e^{ix}) integrates to 1 under the 1/2pi convention,
                // i.e. coefficient 1/dxi on the xi=1 bin.
                1.0 / g.dxi()
            } else {
                0.0
            };
            assert!((c[k].re - expect).abs() < 1e-12 && c[k].im.abs() < 1e-12);
        }
    }

    #[test]
    fn round_trip_and_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for n in [8usize, 32, 64] {
            let g = make_grid(3.0, n).unwrap();
            let f = Field1D::new(g, (0..n).map(|_| randn(&mut rng)).collect());
            let c = transform_forward(&f);
            let back = transform_inverse(&c, g);
            let err: f64 = f
                .values
                .iter()
                .zip(back.values.iter())
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(err / f.l2_norm() < 1e-12);
            let oracle = dft_oracle(&f);
            let derr: f64 = c
                .iter()
                .zip(oracle.iter())
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(derr < 1e-10);
        }
    }

    #[test]
    fn parseval_random_fields() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for n in [16usize, 128] {
            let g = make_grid(5.0, n).unwrap();
            for _ in 0..1000 {
                let f = Field1D::new(g, (0..n).map(|_| randn(&mut rng)).collect());
                let c = transform_forward(&f);
                let mass_p = g.dx() * f.values.iter().map(|v| v.norm_sqr()).sum::<f64>();
                let mass_s = 2.0 * PI * g.dxi() * c.iter().map(|v| v.norm_sqr()).sum::<f64>();
                assert!((mass_p - mass_s).abs() / mass_p < 1e-12);
            }
        }
    }

    #[test]
    fn spectrum2d_round_trip_parseval() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let g = Grid2D::new(make_grid(2.0, 16).unwrap(), make_grid(4.0, 32).unwrap());
        let u = Spectrum2D::new(
            g,
            Representation::Physical,
            (0..g.len()).map(|_| randn(&mut rng)).collect(),
        );
        let m0 = u.l2_norm();
        let full = u.cloned_rep(Representation::Full);
        assert!((full.l2_norm() - m0).abs() / m0 < 1e-12);
        let xf = full.cloned_rep(Representation::XFourier);
        assert!((xf.l2_norm() - m0).abs() / m0 < 1e-12);
        let back = xf.into_rep(Representation::Physical);
        let err: f64 = u
            .values
            .iter()
            .zip(back.values.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(err / m0 < 1e-12);
    }

    #[test]
    fn triple_product_matches_convolution() {
        // Single modes: e^{iax} * conj(e^{ibx}) * e^{icx} = e^{i(a-b+c)x}.
        let g = make_grid(PI, 16).unwrap();
        let mode = |a: i64| {
            let mut c = vec![Complex64::ZERO; 16];
            c[g.index_of_bin(a).unwrap()] = Complex64::new(1.0, 0.0);
            c
        };
        let p = triple_product_1d(&mode(3), &mode(5), &mode(4), g);
        // Coefficient of a pure physical mode with unit amplitude is
        // 1/dxi = 1 here; the product of unit-coefficient bins carries dxi^2.
        for k in 0..16 {
            let expect = if g.bin(k) == 2 { g.dxi().powi(2) } else { 0.0 };
            assert!((p[k].re - expect).abs() < 1e-12, "bin {k}");
            assert!(p[k].im.abs() < 1e-12);
        }
        // Out-of-band result must vanish, not wrap around.
        let p = triple_product_1d(&mode(7), &mode(-5), &mode(4), g);
        assert!(p.iter().all(|v| v.norm() < 1e-12));
    }
}
