//! The cubic Szegő equation on the line: i du/dt = P+(|u|^2 u),
//! discretized on the half-line frequency lattice, plus rational data.

use crate::grid::Grid1D;
use crate::project::{szego_project, SzegoSign};
use crate::transform::{transform_inverse, triple_product_1d, Field1D};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, thiserror::Error)]
pub enum SzegoError {
    #[error("solution lost mass conservation (relative drift {0:.3e}); aborting")]
    MassDrift(f64),
    #[error("non-finite values encountered at t = {0}")]
    NonFinite(f64),
    #[error("spectral tail mass {0:.3e} exceeds budget {1:.3e}; widen the frequency band")]
    TailMass(f64, f64),
}

/// Discrete Hardy-space state: spectral coefficients over the eta lattice
/// with every negative-frequency bin exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SzegoState {
    pub grid: Grid1D,
    pub coeffs: Vec<Complex64>,
    pub t: f64,
}

impl SzegoState {
    pub fn new(grid: Grid1D, coeffs: Vec<Complex64>, t: f64) -> SzegoState {
        assert_eq!(coeffs.len(), grid.n_points);
        let coeffs = szego_project(&coeffs, grid, SzegoSign::Plus);
        SzegoState { grid, coeffs, t }
    }

    pub fn zero(grid: Grid1D) -> SzegoState {
        SzegoState {
            grid,
            coeffs: vec![Complex64::ZERO; grid.n_points],
            t: 0.0,
        }
    }

    /// Box L^2 mass (2pi * deta * sum |c|^2).
    pub fn mass(&self) -> f64 {
        2.0 * PI * self.grid.dxi() * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    /// ||d_y u||_{L^2} via the eta multiplier.
    pub fn dy_norm(&self) -> f64 {
        let w = 2.0 * PI * self.grid.dxi();
        (w * self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let eta = self.grid.freq(k);
                eta * eta * c.norm_sqr()
            })
            .sum::<f64>())
        .sqrt()
    }

    pub fn physical(&self) -> Field1D {
        transform_inverse(&self.coeffs, self.grid)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

/// Right-hand side -i P+(|u|^2 u) with a dealiased cubic product.
pub fn szego_rhs(u: &SzegoState) -> Vec<Complex64> {
    let cube = triple_product_1d(&u.coeffs, &u.coeffs, &u.coeffs, u.grid);
    let proj = szego_project(&cube, u.grid, SzegoSign::Plus);
    proj.into_iter().map(|c| Complex64::new(0.0, -1.0) * c).collect()
}

fn rk4_step(coeffs: &[Complex64], grid: Grid1D, t: f64, dt: f64) -> Vec<Complex64> {
    let state = |c: Vec<Complex64>| SzegoState {
        grid,
        coeffs: c,
        t,
    };
    let k1 = szego_rhs(&state(coeffs.to_vec()));
    let add = |c: &[Complex64], k: &[Complex64], s: f64| -> Vec<Complex64> {
        c.iter().zip(k).map(|(a, b)| a + b * s).collect()
    };
    let k2 = szego_rhs(&state(add(coeffs, &k1, dt / 2.0)));
    let k3 = szego_rhs(&state(add(coeffs, &k2, dt / 2.0)));
    let k4 = szego_rhs(&state(add(coeffs, &k3, dt)));
    coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| c + (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (dt / 6.0))
        .collect()
}

/// Suggested stable step for a given band: 1e-3 * 2*pi / band_limit.
pub fn default_dt(grid: Grid1D) -> f64 {
    1e-3 * 2.0 * PI / grid.band_limit()
}

/// Classical RK4 integration to t_end (forward or backward in time).
pub fn evolve_szego(u0: &SzegoState, t_end: f64, dt: f64) -> Result<SzegoState, SzegoError> {
    let mut cb = |_: &SzegoState| {};
    evolve_szego_with(u0, t_end, dt, &mut cb)
}

/// Same as `evolve_szego` but invokes `on_step` after every accepted step
/// (and once for the initial state).
pub fn evolve_szego_with(
    u0: &SzegoState,
    t_end: f64,
    dt: f64,
    on_step: &mut dyn FnMut(&SzegoState),
) -> Result<SzegoState, SzegoError> {
    assert!(dt > 0.0);
    let mass0 = u0.mass();
    let span = t_end - u0.t;
    let n_steps = (span.abs() / dt).ceil().max(1.0) as usize;
    let h = span / n_steps as f64;
    let mut u = u0.clone();
    on_step(&u);
    for _ in 0..n_steps {
        u.coeffs = rk4_step(&u.coeffs, u.grid, u.t, h);
        u.t += h;
        if !u.is_finite() {
            return Err(SzegoError::NonFinite(u.t));
        }
        if mass0 > 0.0 {
            let drift = (u.mass() - mass0).abs() / mass0;
            if drift > 0.01 {
                return Err(SzegoError::MassDrift(drift));
            }
        }
        on_step(&u);
    }
    Ok(u)
}

/// One term c * 1_{eta>=0} eta^k e^{-alpha eta} of a rational symbol.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct RationalTerm {
    pub k: u32,
    pub alpha_re: f64,
    pub alpha_im: f64,
    pub c_re: f64,
    pub c_im: f64,
}

impl RationalTerm {
    pub fn alpha(&self) -> Complex64 {
        Complex64::new(self.alpha_re, self.alpha_im)
    }
    pub fn c(&self) -> Complex64 {
        Complex64::new(self.c_re, self.c_im)
    }
}

/// uhat(eta) = sum of terms; the Fourier data of a rational Hardy function.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
pub struct RationalDatum {
    pub terms: Vec<RationalTerm>,
}

impl RationalDatum {
    pub fn new(terms: Vec<(u32, Complex64, Complex64)>) -> RationalDatum {
        let terms = terms
            .into_iter()
            .map(|(k, alpha, c)| RationalTerm {
                k,
                alpha_re: alpha.re,
                alpha_im: alpha.im,
                c_re: c.re,
                c_im: c.im,
            })
            .collect();
        RationalDatum { terms }
    }

    pub fn validate(&self) -> Result<(), String> {
        for t in &self.terms {
            if !(t.alpha_re > 0.0) {
                return Err(format!(
                    "rational term needs Re(alpha) > 0, got {}",
                    t.alpha_re
                ));
            }
        }
        Ok(())
    }

    /// Evaluate the symbol at a single frequency (0 for eta < 0).
    pub fn eval(&self, eta: f64) -> Complex64 {
        if eta < 0.0 {
            return Complex64::ZERO;
        }
        self.terms
            .iter()
            .map(|t| t.c() * eta.powi(t.k as i32) * (-t.alpha() * eta).exp())
            .sum()
    }

    /// Closed-form physical values; for k-th power terms
    /// u(y) = sum c * k! * i^{k+1} / (y + i*alpha)^{k+1}.
    pub fn eval_physical(&self, y: f64) -> Complex64 {
        let i = Complex64::new(0.0, 1.0);
        self.terms
            .iter()
            .map(|t| {
                let fact: f64 = (1..=t.k).map(|m| m as f64).product();
                t.c() * fact * i.powu(t.k + 1) / (y + i * t.alpha()).powu(t.k + 1)
            })
            .sum()
    }
}

/// Sample a rational symbol on the nonnegative bins of a grid.
///
/// Rejects grids whose band truncates more than `1e-8` of the symbol's
/// spectral mass (estimated by sampling a doubled band).
pub fn rational_datum_to_state(d: &RationalDatum, grid: Grid1D) -> Result<SzegoState, SzegoError> {
    let mut coeffs = vec![Complex64::ZERO; grid.n_points];
    let mut mass_in = 0.0;
    for k in 0..grid.n_points {
        let eta = grid.freq(k);
        if eta >= 0.0 {
            coeffs[k] = d.eval(eta);
            mass_in += coeffs[k].norm_sqr();
        }
    }
    // Tail estimate on the band extension [band, 2*band).
    let mut tail = 0.0;
    let half = grid.n_points / 2;
    for j in 0..half {
        let eta = grid.band_limit() + j as f64 * grid.dxi();
        tail += d.eval(eta).norm_sqr();
    }
    let total = mass_in + tail;
    if total > 0.0 && tail / total > 1e-8 {
        return Err(SzegoError::TailMass(tail / total, 1e-8));
    }
    Ok(SzegoState {
        grid,
        coeffs,
        t: 0.0,
    })
}
