//! Hankel and Toeplitz matrix realizations, the Lax-pair residual, and the
//! multiplicity tuning used to build cascade data.
//!
//! The Hankel operator H_u h = P+(u conj(h)) is antilinear; its matrix M acts
//! as h -> M conj(h), so H^2 is the linear map with matrix M conj(M) and the
//! singular values of H are the singular values of M.

use crate::grid::Grid1D;
use crate::szego::{evolve_szego, rational_datum_to_state, szego_rhs, RationalDatum, SzegoState};
use crate::transform::{fft_in_place, pad_coeffs, transform_forward, Field1D};
use nalgebra::DMatrix;
use num_complex::Complex64;

#[derive(Debug, thiserror::Error)]
pub enum HankelError {
    #[error("truncation size {0} exceeds grid half-size {1}")]
    TooLarge(usize, usize),
    #[error("flow error during probe: {0}")]
    Flow(#[from] crate::szego::SzegoError),
}

/// Dense discretization of the Hankel operator of a Hardy symbol.
#[derive(Debug, Clone)]
pub struct HankelOp {
    pub n: usize,
    pub deta: f64,
    /// Row-major n x n entries M[i][j] = uhat(eta_i + eta_j) * deta.
    pub matrix: Vec<Complex64>,
}

impl HankelOp {
    pub fn as_dmatrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.n, self.n, &self.matrix)
    }
}

/// Build the truncated Hankel matrix from a state's spectral coefficients.
/// Frequencies beyond the grid band carry zero coefficient.
pub fn hankel_matrix(u: &SzegoState, n: usize) -> Result<HankelOp, HankelError> {
    let half = u.grid.n_points / 2;
    if n > half {
        return Err(HankelError::TooLarge(n, half));
    }
    let deta = u.grid.dxi();
    let mut matrix = vec![Complex64::ZERO; n * n];
    for i in 0..n {
        for j in 0..n {
            let b = (i + j) as i64;
            if let Some(k) = u.grid.index_of_bin(b) {
                matrix[i * n + j] = u.coeffs[k] * deta;
            }
        }
    }
    Ok(HankelOp { n, deta, matrix })
}

/// Truncated Toeplitz matrix M[i][j] = bhat(eta_i - eta_j) * deta of a
/// (not necessarily Hardy) symbol given by spectral coefficients on a grid.
pub fn toeplitz_matrix(bhat: &[Complex64], grid: Grid1D, n: usize) -> DMatrix<Complex64> {
    assert!(n <= grid.n_points / 2);
    let deta = grid.dxi();
    DMatrix::from_fn(n, n, |i, j| {
        let b = i as i64 - j as i64;
        grid.index_of_bin(b)
            .map(|k| bhat[k] * deta)
            .unwrap_or(Complex64::ZERO)
    })
}

/// Singular values of H (descending, with multiplicity).
pub fn hankel_singular_values(h: &HankelOp) -> Vec<f64> {
    if h.n == 0 {
        return Vec::new();
    }
    let svd = h.as_dmatrix().svd(false, false);
    let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

/// Trace norm of sqrt(H^2): the sum of the singular values (Peller's
/// equivalent of the Besov seminorm of the symbol).
pub fn peller_trace_norm(h: &HankelOp) -> f64 {
    hankel_singular_values(h).iter().sum()
}

/// Spectral coefficients of |u|^2 on the doubled band (exact for
/// band-limited u).
fn abs2_coeffs_padded(u: &SzegoState) -> (Vec<Complex64>, Grid1D) {
    let pg = u.grid.padded();
    let padded = pad_coeffs(&u.coeffs, u.grid);
    // inverse transform on the padded grid
    let mut buf: Vec<Complex64> = padded
        .iter()
        .enumerate()
        .map(|(k, c)| if k % 2 == 0 { *c } else { -*c })
        .collect();
    fft_in_place(&mut buf, true);
    for c in buf.iter_mut() {
        *c *= pg.dxi();
    }
    let prod: Vec<Complex64> = buf.iter().map(|v| v * v.conj()).collect();
    let bhat = transform_forward(&Field1D {
        grid: pg,
        values: prod,
    });
    (bhat, pg)
}

/// Matrix of B_u = (i/2) H_u^2 - i T_{|u|^2} acting on the truncated
/// half-line bins.
pub fn lax_b_matrix(u: &SzegoState, n: usize) -> Result<DMatrix<Complex64>, HankelError> {
    let h = hankel_matrix(u, n)?;
    let m = h.as_dmatrix();
    let h2 = &m * m.map(|c| c.conj());
    let (bhat, pg) = abs2_coeffs_padded(u);
    let t = toeplitz_matrix(&bhat, pg, n);
    let i = Complex64::new(0.0, 1.0);
    Ok(h2 * (i * 0.5) - t * i)
}

/// Frobenius-norm residual of the Lax equation dH/dt = [B, H] at the state
/// u, probing the time derivative with a centered difference of width
/// dt_probe.  The commutator respects H's antilinearity:
/// [B, H] h = B(H h) - H(B h) has matrix C M - M conj(C).
pub fn lax_residual(u: &SzegoState, n: usize, dt_probe: f64) -> Result<f64, HankelError> {
    let m = hankel_matrix(u, n)?.as_dmatrix();
    let c = lax_b_matrix(u, n)?;
    let commutator = &c * &m - &m * c.map(|z| z.conj());
    let step = dt_probe / 8.0;
    let up = evolve_szego(u, u.t + dt_probe, step)?;
    let um = evolve_szego(u, u.t - dt_probe, step)?;
    let mp = hankel_matrix(&up, n)?.as_dmatrix();
    let mm = hankel_matrix(&um, n)?.as_dmatrix();
    let dm = (mp - mm) / Complex64::new(2.0 * dt_probe, 0.0);
    Ok((dm - commutator).norm())
}

#[derive(Debug, Clone)]
pub struct TuneResult {
    pub param: f64,
    pub datum: RationalDatum,
    /// (lambda1 - lambda2) / lambda1 at the returned parameter.
    pub gap_rel: f64,
    /// (parameter, signed degeneracy indicator) pairs examined.
    pub history: Vec<(f64, f64)>,
}

#[derive(Debug, thiserror::Error)]
pub enum TuneError {
    #[error("no degeneracy bracket found over the scan range; history: {history:?}")]
    NoBracket { history: Vec<(f64, f64)> },
    #[error("family is rank-deficient (fewer than two significant singular values)")]
    RankDeficient,
    #[error(transparent)]
    Flow(#[from] crate::szego::SzegoError),
    #[error(transparent)]
    Hankel(#[from] HankelError),
}

fn spectrum_of(d: &RationalDatum, grid: Grid1D, n: usize) -> Result<Vec<f64>, TuneError> {
    let u = rational_datum_to_state(d, grid)?;
    Ok(hankel_singular_values(&hankel_matrix(&u, n)?))
}

/// Signed degeneracy indicator: lambda1 - lambda2 with the sign of
/// mu_max + mu_min, where mu are eigenvalues of the Hermitian part.  For
/// families whose symbol is real (mirror-paired terms) the Hankel matrix is
/// real symmetric, its extreme eigenvalues have opposite signs once the
/// second term dominates, and mu_max + mu_min crosses zero exactly where
/// the two largest singular values collide.
fn signed_gap(d: &RationalDatum, grid: Grid1D, n: usize) -> Result<(f64, f64), TuneError> {
    let u = rational_datum_to_state(d, grid)?;
    let h = hankel_matrix(&u, n)?;
    let m = h.as_dmatrix();
    // Hermitian part (equals M itself for real symbols).
    let mut herm = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    // Flush entries at the subnormal tail to zero: on wide bands the symbol
    // decays below f64 normal range and nalgebra's tridiagonal eigensolver
    // emits NaNs when fed those entries.
    let top = herm.iter().map(|c| c.norm()).fold(0.0f64, f64::max);
    for c in herm.iter_mut() {
        if c.norm() < 1e-15 * top {
            *c = Complex64::ZERO;
        }
    }
    let eig = herm.symmetric_eigenvalues();
    let mut mu: Vec<f64> = eig.iter().copied().collect();
    mu.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let signed = mu[mu.len() - 1] + mu[0];
    let sv = hankel_singular_values(&h);
    let gap = if sv.len() >= 2 { sv[0] - sv[1] } else { sv[0] };
    Ok((signed, gap / sv[0].max(f64::MIN_POSITIVE)))
}

/// Search a one-parameter family of rational data for a datum whose two
/// largest Hankel singular values coincide (relative gap <= 1e-8).
pub fn tune_multiplicity(
    family: &dyn Fn(f64) -> RationalDatum,
    range: (f64, f64),
    scan_points: usize,
    grid: Grid1D,
    n: usize,
) -> Result<TuneResult, TuneError> {
    let tol = 1e-8;
    let mut history = Vec::new();
    let (lo, hi) = range;
    let mut bracket: Option<((f64, f64), (f64, f64))> = None;
    let mut prev: Option<(f64, f64)> = None;
    for i in 0..scan_points {
        let p = lo + (hi - lo) * i as f64 / (scan_points - 1) as f64;
        let d = family(p);
        let sv = spectrum_of(&d, grid, n)?;
        if sv.len() < 2 || sv[1] < 1e-8 * sv[0] {
            return Err(TuneError::RankDeficient);
        }
        let (signed, gap_rel) = signed_gap(&d, grid, n)?;
        history.push((p, signed));
        if gap_rel <= tol {
            return Ok(TuneResult {
                param: p,
                datum: d,
                gap_rel,
                history,
            });
        }
        if let Some((pp, ps)) = prev {
            if ps.signum() != signed.signum() {
                bracket = Some(((pp, ps), (p, signed)));
                break;
            }
        }
        prev = Some((p, signed));
    }
    let ((mut a, mut fa), (mut b, _fb)) = bracket.ok_or(TuneError::NoBracket {
        history: history.clone(),
    })?;
    // Bisection on the signed indicator.
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        let d = family(mid);
        let (signed, gap_rel) = signed_gap(&d, grid, n)?;
        history.push((mid, signed));
        if gap_rel <= tol || (b - a).abs() < 1e-15 * (1.0 + mid.abs()) {
            return Ok(TuneResult {
                param: mid,
                datum: d,
                gap_rel,
                history,
            });
        }
        if signed.signum() == fa.signum() {
            a = mid;
            fa = signed;
        } else {
            b = mid;
        }
    }
    let mid = 0.5 * (a + b);
    let d = family(mid);
    let (_, gap_rel) = signed_gap(&d, grid, n)?;
    Ok(TuneResult {
        param: mid,
        datum: d,
        gap_rel,
        history,
    })
}

/// A measured table of the 1-D cascade: (t, ||d_y u||, mass, trace norm).
#[derive(Debug, Clone, serde::Serialize)]
pub struct GrowthSample {
    pub t: f64,
    pub dy_norm: f64,
    pub mass: f64,
    pub trace_norm: f64,
}

/// Evolve a Szegő datum and tabulate the H^1-seminorm growth; fits
/// ||d_y u|| against t over the last half of the samples.
pub fn cascade_rate_1d(
    u0: &SzegoState,
    t_grid: &[f64],
    dt: f64,
    hankel_n: usize,
) -> Result<(Vec<GrowthSample>, f64, f64), HankelError> {
    let mut samples = Vec::with_capacity(t_grid.len());
    let mut u = u0.clone();
    for &t in t_grid {
        u = evolve_szego(&u, t, dt)?;
        let h = hankel_matrix(&u, hankel_n)?;
        samples.push(GrowthSample {
            t,
            dy_norm: u.dy_norm(),
            mass: u.mass(),
            trace_norm: peller_trace_norm(&h),
        });
    }
    let tail = &samples[samples.len() / 2..];
    let xs: Vec<f64> = tail.iter().map(|s| s.t).collect();
    let ys: Vec<f64> = tail.iter().map(|s| s.dy_norm).collect();
    let (slope, _, r2) = crate::norms::linear_fit(&xs, &ys);
    Ok((samples, slope, r2))
}

/// Convenience: the tendency field as a state (for residual checks).
pub fn rhs_state(u: &SzegoState) -> SzegoState {
    SzegoState {
        grid: u.grid,
        coeffs: szego_rhs(u),
        t: u.t,
    }
}
