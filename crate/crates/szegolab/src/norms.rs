//! The diagnostic norm family: Besov B^1_{1,1}, the algebra norm on G,
//! Z, S, S', Y, S+, Y+, mixed L^2_x H^s_y, and the space-time functional X_T.

use crate::grid::Grid1D;
use crate::project::{lp_block, lp_block_range};
use crate::transform::{transform_forward, transform_inverse, Field1D, Representation, Spectrum2D};
use num_complex::Complex64;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy)]
pub struct NormParams {
    /// Sobolev order of the H^N component of S.
    pub n: u32,
    /// Small exponent in the time weights of X_T.
    pub delta: f64,
}

impl Default for NormParams {
    fn default() -> Self {
        NormParams { n: 3, delta: 5e-5 }
    }
}

impl NormParams {
    pub fn validate(&self) -> Result<(), String> {
        if self.n < 3 {
            return Err(format!("Sobolev order must be >= 3, got {}", self.n));
        }
        if !(self.delta > 0.0 && self.delta < 1e-4) {
            return Err(format!("delta must lie in (0, 1e-4), got {}", self.delta));
        }
        Ok(())
    }
}

/// One row of norm diagnostics at a fixed simulation time.
#[derive(Debug, Clone, serde::Serialize)]
pub struct NormReport {
    pub t: f64,
    pub entries: Vec<(String, f64)>,
}

impl NormReport {
    /// CSV rows "t,norm_name,value".
    pub fn csv_rows(&self) -> String {
        let mut s = String::new();
        for (name, v) in &self.entries {
            s.push_str(&format!("{:.17e},{},{:.17e}\n", self.t, name, v));
        }
        s
    }
}

/// Homogeneous Besov seminorm sum_k 2^k ||Delta_{2^k} f||_{L^1}, restricted to
/// dyadic blocks the grid can resolve.
pub fn besov_seminorm(f: &Field1D) -> f64 {
    besov_seminorm_coeffs(&transform_forward(f), f.grid)
}

/// Same, starting from FFT-ordered spectral coefficients.
pub fn besov_seminorm_coeffs(coeffs: &[Complex64], grid: Grid1D) -> f64 {
    let mut total = 0.0;
    for k in lp_block_range(grid) {
        let block = lp_block(coeffs, grid, k);
        if block.iter().all(|c| c.norm_sqr() == 0.0) {
            continue;
        }
        let phys = transform_inverse(&block, grid);
        total += (2.0f64).powi(k) * phys.l1_norm();
    }
    total
}

/// ||f||_G = ||f||_{L^2} + ||f||_{B^1_{1,1}} — the fiber algebra norm.
pub fn g_norm(f: &Field1D) -> f64 {
    f.l2_norm() + besov_seminorm(f)
}

pub fn g_norm_coeffs(coeffs: &[Complex64], grid: Grid1D) -> f64 {
    let l2 = (2.0 * PI * grid.dxi() * coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()).sqrt();
    l2 + besov_seminorm_coeffs(coeffs, grid)
}

/// Fraction of spectral mass at |freq| >= band/4 — the truncation diagnostic
/// for quantities whose dyadic sums assume band-interior support.
pub fn truncation_tail(coeffs: &[Complex64], grid: Grid1D) -> f64 {
    let cut = grid.band_limit() / 4.0;
    let total: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
    if total == 0.0 {
        return 0.0;
    }
    let tail: f64 = coeffs
        .iter()
        .enumerate()
        .filter(|(k, _)| grid.freq(*k).abs() >= cut)
        .map(|(_, c)| c.norm_sqr())
        .sum();
    tail / total
}

/// ||F||_Z = sup over xi bins of the G-norm of the fiber y -> Fhat(xi, y).
pub fn z_norm(f: &Spectrum2D) -> f64 {
    let s = f.cloned_rep(Representation::XFourier);
    let gy = s.grid.gy;
    let mut best = 0.0f64;
    for ix in 0..s.grid.gx.n_points {
        let fiber = Field1D::new(gy, s.row(ix).to_vec());
        best = best.max(g_norm(&fiber));
    }
    best
}

/// Sobolev norm via the multiplier (1 + xi^2 + eta^2)^{N/2}.
pub fn h_n_norm(f: &Spectrum2D, n: u32) -> f64 {
    let s = f.cloned_rep(Representation::Full);
    let g = s.grid;
    let mut acc = 0.0;
    for ix in 0..g.gx.n_points {
        let xi = g.gx.freq(ix);
        for (iy, c) in s.row(ix).iter().enumerate() {
            let eta = g.gy.freq(iy);
            acc += (1.0 + xi * xi + eta * eta).powi(n as i32) * c.norm_sqr();
        }
    }
    ((2.0 * PI).powi(2) * g.gx.dxi() * g.gy.dxi() * acc).sqrt()
}

/// ||F||_{L^2_x H^s_y} via the multiplier (1 + eta^2)^{s/2}.
pub fn mixed_sobolev(f: &Spectrum2D, s: f64) -> f64 {
    let sp = f.cloned_rep(Representation::Full);
    let g = sp.grid;
    let mut acc = 0.0;
    for ix in 0..g.gx.n_points {
        for (iy, c) in sp.row(ix).iter().enumerate() {
            let eta = g.gy.freq(iy);
            acc += (1.0 + eta * eta).powf(s) * c.norm_sqr();
        }
    }
    ((2.0 * PI).powi(2) * g.gx.dxi() * g.gy.dxi() * acc).sqrt()
}

/// Multiply by the physical coordinate x (box-periodic sawtooth weight).
pub fn x_weighted(f: &Spectrum2D) -> Spectrum2D {
    let mut s = f.cloned_rep(Representation::Physical);
    let gx = s.grid.gx;
    for ix in 0..gx.n_points {
        let x = gx.x(ix);
        for v in s.row_mut(ix) {
            *v *= x;
        }
    }
    s
}

/// (1 + |D_x|) F via the Fourier multiplier 1 + |xi|.
pub fn dx_weighted(f: &Spectrum2D) -> Spectrum2D {
    let mut s = f.cloned_rep(Representation::Full);
    let gx = s.grid.gx;
    for ix in 0..gx.n_points {
        let m = 1.0 + gx.freq(ix).abs();
        for v in s.row_mut(ix) {
            *v *= m;
        }
    }
    s
}

pub fn s_norm(f: &Spectrum2D, p: &NormParams) -> f64 {
    h_n_norm(f, p.n) + mixed_sobolev(&x_weighted(f), 2.0)
}

pub fn s_prime_norm(f: &Spectrum2D, p: &NormParams) -> f64 {
    h_n_norm(f, p.n) + x_weighted(f).l2_norm()
}

pub fn y_norm(f: &Spectrum2D, p: &NormParams) -> f64 {
    s_norm(f, p) + z_norm(f)
}

pub fn s_plus_norm(f: &Spectrum2D, p: &NormParams) -> f64 {
    let xf = x_weighted(f);
    s_norm(f, p) + mixed_sobolev(&xf, 3.0) + s_norm(&dx_weighted(f), p) + s_norm(&xf, p)
}

pub fn y_plus_norm(f: &Spectrum2D, p: &NormParams) -> f64 {
    let xf = x_weighted(f);
    s_plus_norm(f, p)
        + z_norm(f)
        + z_norm(&dx_weighted(f))
        + z_norm(&xf)
        + z_norm(&x_weighted(&xf))
}

/// Discrete X_T functional over a sampled trajectory:
/// sup_t [ ||F||_Z + (1+t)^{-d} ||F||_Y + (1+t)^{1-3d} ||dF/dt||_Y ],
/// with dF/dt from centered differences (one-sided at the ends).
pub fn xt_diagnostic(traj: &[(f64, Spectrum2D)], p: &NormParams) -> Result<f64, String> {
    if traj.len() < 3 {
        return Err(format!(
            "X_T needs at least 3 samples for finite differences, got {}",
            traj.len()
        ));
    }
    let d = p.delta;
    let mut sup = 0.0f64;
    for i in 0..traj.len() {
        let (t, ref f) = traj[i];
        let (ta, fa, tb, fb) = if i == 0 {
            (traj[0].0, &traj[0].1, traj[1].0, &traj[1].1)
        } else if i == traj.len() - 1 {
            (traj[i - 1].0, &traj[i - 1].1, traj[i].0, &traj[i].1)
        } else {
            (traj[i - 1].0, &traj[i - 1].1, traj[i + 1].0, &traj[i + 1].1)
        };
        let mut diff = fb.cloned_rep(fa.rep);
        diff.add_scaled(fa, Complex64::new(-1.0, 0.0));
        diff.scale(Complex64::new(1.0 / (tb - ta), 0.0));
        let val = z_norm(f)
            + (1.0 + t.abs()).powf(-d) * y_norm(f, p)
            + (1.0 + t.abs()).powf(1.0 - 3.0 * d) * y_norm(&diff, p);
        sup = sup.max(val);
    }
    Ok(sup)
}

/// Least-squares line fit returning (slope, intercept, r_squared).
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let r2 = if syy > 0.0 && sxx > 0.0 {
        (sxy * sxy) / (sxx * syy)
    } else {
        1.0
    };
    (slope, intercept, r2)
}
