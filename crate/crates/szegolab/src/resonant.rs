//! The resonant system for the half-wave profile: classification of the
//! resonance surface, the fiberwise-decoupled flow, and the scaled-solution
//! construction that seeds the cascade runs.

use crate::grid::Grid1D;
use crate::project::{szego_project, SzegoSign};
use crate::szego::{evolve_szego_with, SzegoState, SzegoError};
use crate::transform::{triple_product_1d, Representation, Spectrum2D};
use num_complex::Complex64;
use rayon::prelude::*;

/// omega(eta, eta1, eta2) = |eta| - |eta - eta1| + |eta2 - eta1| - |eta2|.
pub fn omega_direct(eta: f64, eta1: f64, eta2: f64) -> f64 {
    eta.abs() - (eta - eta1).abs() + (eta2 - eta1).abs() - eta2.abs()
}

/// Outcome of classifying a frequency triple by the sign pattern of the
/// quadruple (eta, eta - eta1, eta2 - eta1, eta2).  Boundary zeros count as
/// nonnegative ('+'), matching the convention that the zero frequency bin
/// belongs to the plus sector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonanceCase {
    /// 1..=14 for the mixed-sign cases; 0 when the quadruple has a single
    /// sign (the full-measure resonant set, omega = 0).
    pub case_id: u8,
    pub omega: f64,
    /// Signs of (eta, eta - eta1, eta2 - eta1, eta2); true = nonnegative.
    pub signs: [bool; 4],
}

impl ResonanceCase {
    pub fn is_resonant_zero(&self) -> bool {
        self.case_id == 0
    }
}

/// Classify a triple into the 14 mixed-sign cases with closed-form omega,
/// or the single-sign resonant-zero set.
pub fn classify_resonance(eta: f64, eta1: f64, eta2: f64) -> ResonanceCase {
    let q = [eta, eta - eta1, eta2 - eta1, eta2];
    let signs = [q[0] >= 0.0, q[1] >= 0.0, q[2] >= 0.0, q[3] >= 0.0];
    let (case_id, omega) = match signs {
        [true, true, true, true] | [false, false, false, false] => (0, 0.0),
        [true, false, false, false] => (1, 2.0 * eta),
        [false, true, true, true] => (2, -2.0 * eta),
        [true, false, true, true] => (3, 2.0 * eta - 2.0 * eta1),
        [false, true, false, false] => (4, 2.0 * eta1 - 2.0 * eta),
        [true, true, false, true] => (5, 2.0 * eta1 - 2.0 * eta2),
        [false, false, true, false] => (6, 2.0 * eta2 - 2.0 * eta1),
        [true, true, true, false] => (7, 2.0 * eta2),
        [false, false, false, true] => (8, -2.0 * eta2),
        [true, true, false, false] => (9, 2.0 * eta1),
        [false, false, true, true] => (10, -2.0 * eta1),
        [true, false, true, false] => (11, 2.0 * eta - 2.0 * eta1 + 2.0 * eta2),
        [false, true, false, true] => (12, -2.0 * eta + 2.0 * eta1 - 2.0 * eta2),
        [true, false, false, true] => (13, 2.0 * eta - 2.0 * eta2),
        [false, true, true, false] => (14, 2.0 * eta2 - 2.0 * eta),
    };
    ResonanceCase {
        case_id,
        omega,
        signs,
    }
}

/// State of the resonant flow: an x-Fourier spectrum (fibers over y at each
/// xi bin) carried on the resonant clock tau = pi * ln t.
#[derive(Debug, Clone, PartialEq)]
pub struct ResonantState {
    pub spectrum: Spectrum2D,
    pub tau: f64,
}

impl ResonantState {
    pub fn new(spectrum: Spectrum2D, tau: f64) -> ResonantState {
        assert_eq!(spectrum.rep, Representation::XFourier);
        ResonantState { spectrum, tau }
    }

    /// Fiber at xi bin ix as a Szegő-style coefficient vector over eta
    /// (the fiber's y content transformed to frequency space).
    fn fiber_coeffs(&self, ix: usize) -> Vec<Complex64> {
        use crate::transform::transform_forward;
        use crate::transform::Field1D;
        transform_forward(&Field1D::new(self.spectrum.grid.gy, self.spectrum.row(ix).to_vec()))
    }
}

/// Per-fiber tendency -i [P+(|g+|^2 g+) + P-(|g-|^2 g-)] on eta coefficients.
pub fn fiber_rhs(coeffs: &[Complex64], gy: Grid1D) -> Vec<Complex64> {
    let plus = szego_project(coeffs, gy, SzegoSign::Plus);
    let minus = szego_project(coeffs, gy, SzegoSign::Minus);
    let cube_p = triple_product_1d(&plus, &plus, &plus, gy);
    let cube_m = triple_product_1d(&minus, &minus, &minus, gy);
    let proj_p = szego_project(&cube_p, gy, SzegoSign::Plus);
    let proj_m = szego_project(&cube_m, gy, SzegoSign::Minus);
    proj_p
        .iter()
        .zip(proj_m.iter())
        .map(|(a, b)| Complex64::new(0.0, -1.0) * (a + b))
        .collect()
}

/// Tendency of the resonant system, computed fiber by fiber (x-Fourier
/// representation in, same representation out, y kept physical).
pub fn resonant_rhs(g: &ResonantState) -> Spectrum2D {
    use crate::transform::transform_inverse;
    let grid = g.spectrum.grid;
    let mut out = Spectrum2D::zero(grid, Representation::XFourier);
    let rows: Vec<Vec<Complex64>> = (0..grid.gx.n_points)
        .into_par_iter()
        .map(|ix| {
            let coeffs = g.fiber_coeffs(ix);
            if coeffs.iter().all(|c| c.norm_sqr() == 0.0) {
                return vec![Complex64::ZERO; grid.gy.n_points];
            }
            let tend = fiber_rhs(&coeffs, grid.gy);
            transform_inverse(&tend, grid.gy).values
        })
        .collect();
    for (ix, row) in rows.into_iter().enumerate() {
        out.row_mut(ix).copy_from_slice(&row);
    }
    out
}

#[derive(Debug, thiserror::Error)]
pub enum ResonantError {
    #[error("grid too large for the direct oracle ({0} eta bins > 64)")]
    OracleTooLarge(usize),
    #[error("fiber at xi bin {ix} failed: {source}")]
    Fiber {
        ix: usize,
        #[source]
        source: SzegoError,
    },
    #[error("tau {0} outside the sampled trajectory range [{1}, {2}]")]
    OutOfRange(f64, f64, f64),
}

/// Direct quadrature oracle for the resonant tendency: explicit sum over
/// (eta1, eta2) bin pairs whose bin-center classification is resonant-zero,
/// with weight deta^2.  Cost is quadratic per output bin; guarded to small
/// grids.
pub fn resonant_rhs_direct(g: &ResonantState) -> Result<Spectrum2D, ResonantError> {
    use crate::transform::transform_inverse;
    let grid = g.spectrum.grid;
    let ny = grid.gy.n_points;
    if ny > 64 {
        return Err(ResonantError::OracleTooLarge(ny));
    }
    let gy = grid.gy;
    let deta = gy.dxi();
    let mut out = Spectrum2D::zero(grid, Representation::XFourier);
    for ix in 0..grid.gx.n_points {
        let c = g.fiber_coeffs(ix);
        let mut tend = vec![Complex64::ZERO; ny];
        for m in 0..ny {
            let eta = gy.freq(m);
            let mut acc = Complex64::ZERO;
            // eta1 and eta2 range over the whole frequency lattice; bins for
            // eta - eta1 and eta2 - eta1 may fall outside the band, in which
            // case the coefficient is zero and the term drops.
            for a in 0..ny {
                let eta1 = gy.freq(a);
                let Some(k1) = gy.index_of_bin(gy.bin(m) - gy.bin(a)) else {
                    continue;
                };
                for b in 0..ny {
                    let eta2 = gy.freq(b);
                    if !classify_resonance(eta, eta1, eta2).is_resonant_zero() {
                        continue;
                    }
                    let Some(k2) = gy.index_of_bin(gy.bin(b) - gy.bin(a)) else {
                        continue;
                    };
                    acc += c[k1] * c[k2].conj() * c[b];
                }
            }
            tend[m] = Complex64::new(0.0, -1.0) * acc * deta * deta;
        }
        // Match the integrator's convention: the Nyquist bin is dropped.
        tend[gy.nyquist_index()] = Complex64::ZERO;
        let row = transform_inverse(&tend, gy).values;
        out.row_mut(ix).copy_from_slice(&row);
    }
    Ok(out)
}

/// RK4 evolution of the resonant system on the tau clock; every xi fiber
/// evolves independently under its own Szegő-type flow.
pub fn evolve_resonant(
    g0: &ResonantState,
    tau_end: f64,
    dtau: f64,
) -> Result<ResonantState, ResonantError> {
    use crate::transform::transform_inverse;
    let grid = g0.spectrum.grid;
    let rows: Result<Vec<Vec<Complex64>>, ResonantError> = (0..grid.gx.n_points)
        .into_par_iter()
        .map(|ix| {
            let coeffs = g0.fiber_coeffs(ix);
            if coeffs.iter().all(|c| c.norm_sqr() == 0.0) {
                return Ok(vec![Complex64::ZERO; grid.gy.n_points]);
            }
            let final_coeffs =
                evolve_fiber(&coeffs, grid.gy, g0.tau, tau_end, dtau).map_err(|source| {
                    ResonantError::Fiber { ix, source }
                })?;
            Ok(transform_inverse(&final_coeffs, grid.gy).values)
        })
        .collect();
    let rows = rows?;
    let mut out = Spectrum2D::zero(grid, Representation::XFourier);
    for (ix, row) in rows.into_iter().enumerate() {
        out.row_mut(ix).copy_from_slice(&row);
    }
    Ok(ResonantState {
        spectrum: out,
        tau: tau_end,
    })
}

/// RK4 on one fiber's eta coefficients under the two-sector tendency.
fn evolve_fiber(
    coeffs: &[Complex64],
    gy: Grid1D,
    tau0: f64,
    tau_end: f64,
    dtau: f64,
) -> Result<Vec<Complex64>, SzegoError> {
    let span = tau_end - tau0;
    let n_steps = (span.abs() / dtau).ceil().max(1.0) as usize;
    let h = span / n_steps as f64;
    let mass = |c: &[Complex64]| c.iter().map(|v| v.norm_sqr()).sum::<f64>();
    let mass0 = mass(coeffs);
    let mut c = coeffs.to_vec();
    let mut t = tau0;
    for _ in 0..n_steps {
        let k1 = fiber_rhs(&c, gy);
        let add = |base: &[Complex64], k: &[Complex64], s: f64| -> Vec<Complex64> {
            base.iter().zip(k).map(|(a, b)| a + b * s).collect()
        };
        let k2 = fiber_rhs(&add(&c, &k1, h / 2.0), gy);
        let k3 = fiber_rhs(&add(&c, &k2, h / 2.0), gy);
        let k4 = fiber_rhs(&add(&c, &k3, h), gy);
        for i in 0..c.len() {
            c[i] += (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (h / 6.0);
        }
        t += h;
        if c.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(SzegoError::NonFinite(t));
        }
        if mass0 > 0.0 && (mass(&c) - mass0).abs() / mass0 > 0.01 {
            return Err(SzegoError::MassDrift((mass(&c) - mass0).abs() / mass0));
        }
    }
    Ok(c)
}

/// A densely sampled 1-D Szegő trajectory usable for time interpolation.
pub struct SzegoTrajectory {
    pub grid: Grid1D,
    pub dt_sample: f64,
    /// Coefficient snapshots at times j * dt_sample, j = 0..len.
    pub samples: Vec<Vec<Complex64>>,
}

impl SzegoTrajectory {
    /// Integrate the plus-sector Szegő flow and keep every RK4 step.
    pub fn record(u0: &SzegoState, t_end: f64, dt_sample: f64) -> Result<SzegoTrajectory, SzegoError> {
        let mut samples = Vec::new();
        let n_steps = (t_end / dt_sample).ceil().max(1.0) as usize;
        let dt = t_end / n_steps as f64;
        let mut cb = |u: &SzegoState| samples.push(u.coeffs.clone());
        evolve_szego_with(u0, t_end, dt, &mut cb)?;
        Ok(SzegoTrajectory {
            grid: u0.grid,
            dt_sample: dt,
            samples,
        })
    }

    pub fn t_max(&self) -> f64 {
        (self.samples.len() - 1) as f64 * self.dt_sample
    }

    /// Catmull-Rom cubic interpolation of the coefficients at time t.
    pub fn interpolate(&self, t: f64) -> Result<Vec<Complex64>, ResonantError> {
        let tm = self.t_max();
        if t < 0.0 || t > tm * (1.0 + 1e-12) {
            return Err(ResonantError::OutOfRange(t, 0.0, tm));
        }
        let t = t.min(tm);
        let s = t / self.dt_sample;
        let j = (s.floor() as usize).min(self.samples.len() - 2);
        let x = s - j as f64;
        let get = |idx: i64| -> &[Complex64] {
            let idx = idx.clamp(0, self.samples.len() as i64 - 1) as usize;
            &self.samples[idx]
        };
        let (p0, p1, p2, p3) = (
            get(j as i64 - 1),
            get(j as i64),
            get(j as i64 + 1),
            get(j as i64 + 2),
        );
        let n = p1.len();
        let mut out = vec![Complex64::ZERO; n];
        for i in 0..n {
            let (a, b, c, d) = (p0[i], p1[i], p2[i], p3[i]);
            // Catmull-Rom basis
            out[i] = b
                + ((c - a) * 0.5) * x
                + (a - b * 2.5 + c * 2.0 - d * 0.5) * (x * x)
                + ((b - c) * 1.5 + (d - a) * 0.5) * (x * x * x);
        }
        Ok(out)
    }
}

/// The scaled construction: fiber xi of the resonant solution holds
/// rho * psi(xi) * u(rho^2 psi(xi)^2 tau, .), where u is a 1-D Szegő
/// trajectory and psi the plateau cutoff.
pub fn scaled_solution(
    u_traj: &SzegoTrajectory,
    rho: f64,
    psi: &dyn Fn(f64) -> f64,
    tau: f64,
    gx: Grid1D,
) -> Result<ResonantState, ResonantError> {
    use crate::grid::Grid2D;
    use crate::transform::transform_inverse;
    let gy = u_traj.grid;
    let grid = Grid2D::new(gx, gy);
    let mut out = Spectrum2D::zero(grid, Representation::XFourier);
    for ix in 0..gx.n_points {
        let p = psi(gx.freq(ix));
        if p == 0.0 {
            continue;
        }
        let coeffs = u_traj.interpolate(rho * rho * p * p * tau)?;
        let scaled: Vec<Complex64> = coeffs.iter().map(|c| c * rho * p).collect();
        let row = transform_inverse(&scaled, gy).values;
        out.row_mut(ix).copy_from_slice(&row);
    }
    Ok(ResonantState {
        spectrum: out,
        tau,
    })
}

/// Per-xi G-norms of the fibers (the max over the profile is the Z norm).
pub fn fiber_gnorm_profile(g: &ResonantState) -> Vec<f64> {
    let grid = g.spectrum.grid;
    (0..grid.gx.n_points)
        .map(|ix| crate::norms::g_norm_coeffs(&g.fiber_coeffs(ix), grid.gy))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, Grid2D};
    use crate::transform::transform_inverse;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    #[test]
    fn classify_worked_triples() {
        // (1, 2, -1): pattern (+,-,-,-), omega = 2*eta.
        let c = classify_resonance(1.0, 2.0, -1.0);
        assert_eq!(c.case_id, 1);
        assert_eq!(c.omega, 2.0);
        // (2, 1, 1): all components nonnegative: resonant zero.
        let c = classify_resonance(2.0, 1.0, 1.0);
        assert!(c.is_resonant_zero());
        assert_eq!(c.omega, 0.0);
        // (-1, -2, 1): omega = -2*eta = 2; direct 1 - 1 + 3 - 1 = 2.
        let c = classify_resonance(-1.0, -2.0, 1.0);
        assert_eq!(c.case_id, 2);
        assert_eq!(c.omega, 2.0);
        assert_eq!(omega_direct(-1.0, -2.0, 1.0), 2.0);
    }

    #[test]
    fn classify_matches_direct_formula_and_hits_all_cases() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let mut seen = [false; 15];
        for _ in 0..10_000 {
            let eta = (rng.gen::<f64>() - 0.5) * 10.0;
            let eta1 = (rng.gen::<f64>() - 0.5) * 10.0;
            let eta2 = (rng.gen::<f64>() - 0.5) * 10.0;
            let c = classify_resonance(eta, eta1, eta2);
            seen[c.case_id as usize] = true;
            let direct = omega_direct(eta, eta1, eta2);
            assert!(
                (c.omega - direct).abs() < 1e-12,
                "case {} at ({eta},{eta1},{eta2}): {} vs {direct}",
                c.case_id,
                c.omega
            );
        }
        // Cases 11 and 12 correspond to the strict sign patterns (+,-,+,-)
        // and (-,+,-,+) of (eta, eta-eta1, eta2-eta1, eta2).  Both are empty
        // away from the origin: eta - (eta - eta1) = eta1 = eta2 - (eta2 -
        // eta1), so the first pair and the last pair straddle eta1 with the
        // same orientation, forcing eta1 >= 0 from one pair and eta1 <= 0
        // from the other.  Then all four components vanish.  Random triples
        // can therefore never land there.
        for (id, s) in seen.iter().enumerate() {
            if id == 11 || id == 12 {
                assert!(!s, "infeasible case {id} was generated");
            } else {
                assert!(s, "case {id} never generated");
            }
        }
        // and the degenerate point itself classifies as fully resonant
        let origin = classify_resonance(0.0, 0.0, 0.0);
        assert_eq!(origin.omega, 0.0);
    }

    fn random_state(g: Grid2D, seed: u64, amp: f64) -> ResonantState {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut s = Spectrum2D::zero(g, Representation::XFourier);
        for ix in 0..g.gx.n_points {
            let mut coeffs = vec![Complex64::ZERO; g.gy.n_points];
            for (iy, c) in coeffs.iter_mut().enumerate() {
                // keep clear of the Nyquist bin, which integrators drop
                if iy != g.gy.nyquist_index() {
                    *c = Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5) * amp;
                }
            }
            let row = transform_inverse(&coeffs, g.gy).values;
            s.row_mut(ix).copy_from_slice(&row);
        }
        ResonantState::new(s, 0.0)
    }

    #[test]
    fn rhs_matches_direct_oracle() {
        let g = Grid2D::new(make_grid(2.0, 8).unwrap(), make_grid(4.0, 16).unwrap());
        for seed in 0..10u64 {
            let state = random_state(g, seed, 0.5);
            let fast = resonant_rhs(&state);
            let slow = resonant_rhs_direct(&state).unwrap();
            let mut diff = fast.clone();
            diff.add_scaled(&slow, Complex64::new(-1.0, 0.0));
            let rel = diff.l2_norm() / slow.l2_norm();
            assert!(rel < 1e-10, "seed {seed}: relative difference {rel}");
        }
    }

    #[test]
    fn oracle_guards_large_grids() {
        let g = Grid2D::new(make_grid(2.0, 8).unwrap(), make_grid(4.0, 128).unwrap());
        let state = random_state(g, 0, 0.1);
        assert!(matches!(
            resonant_rhs_direct(&state),
            Err(ResonantError::OracleTooLarge(128))
        ));
    }

    #[test]
    fn single_bin_hand_enumeration() {
        // Plus-sector fiber with bins at eta in {1, 2} (deta = 1):
        // the cubic convolution restricted to the all-plus resonance set.
        let gy = make_grid(PI, 16).unwrap();
        let gx = make_grid(2.0, 8).unwrap();
        let g = Grid2D::new(gx, gy);
        let (c1, c2) = (Complex64::new(0.3, 0.1), Complex64::new(-0.2, 0.4));
        let mut coeffs = vec![Complex64::ZERO; 16];
        coeffs[gy.index_of_bin(1).unwrap()] = c1;
        coeffs[gy.index_of_bin(2).unwrap()] = c2;
        let mut s = Spectrum2D::zero(g, Representation::XFourier);
        let row = transform_inverse(&coeffs, gy).values;
        s.row_mut(0).copy_from_slice(&row);
        let state = ResonantState::new(s, 0.0);
        let out = resonant_rhs_direct(&state).unwrap();
        // Hand enumeration of m = a - b + c over a, b, c in {1, 2}; every
        // quadruple (m, a, b, c) is automatically all-nonnegative, hence
        // resonant, including the boundary bin m = 0 from (1,2,1):
        // m=0: (1,2,1); m=1: (1,1,1),(1,2,2),(2,2,1);
        // m=2: (2,1,1),(1,1,2),(2,2,2); m=3: (2,1,2).
        // Weight deta^2 = 1, prefactor -i.
        let i = Complex64::new(0.0, 1.0);
        let expect0 = -i * (c1 * c2.conj() * c1);
        let expect1 = -i * (c1 * c1.conj() * c1 + c1 * c2.conj() * c2 + c2 * c2.conj() * c1);
        let expect2 = -i * (c2 * c1.conj() * c1 + c1 * c1.conj() * c2 + c2 * c2.conj() * c2);
        let expect3 = -i * (c2 * c1.conj() * c2);
        use crate::transform::{transform_forward, Field1D};
        let got = transform_forward(&Field1D::new(gy, out.row(0).to_vec()));
        for (bin, expect) in [(0i64, expect0), (1, expect1), (2, expect2), (3, expect3)] {
            let gotc = got[gy.index_of_bin(bin).unwrap()];
            assert!(
                (gotc - expect).norm() < 1e-12,
                "bin {bin}: {gotc} vs {expect}"
            );
        }
        // everything else vanishes
        for k in 0..16 {
            let b = gy.bin(k);
            if ![0, 1, 2, 3].contains(&b) {
                assert!(got[k].norm() < 1e-12);
            }
        }
    }

    #[test]
    fn fiber_decoupling_matches_szego() {
        // A fiber with plus-sector content only must follow the 1-D flow.
        let gy = make_grid(40.0, 256).unwrap();
        let gx = make_grid(2.0, 8).unwrap();
        let g = Grid2D::new(gx, gy);
        let d = crate::szego::RationalDatum::new(vec![(
            0,
            Complex64::new(1.0, 0.0),
            Complex64::new(0.7, 0.0),
        )]);
        let u0 = crate::szego::rational_datum_to_state(&d, gy).unwrap();
        let mut s = Spectrum2D::zero(g, Representation::XFourier);
        let row = transform_inverse(&u0.coeffs, gy).values;
        s.row_mut(3).copy_from_slice(&row);
        let state = ResonantState::new(s, 0.0);
        let evolved = evolve_resonant(&state, 1.0, 1e-2).unwrap();
        let u1 = crate::szego::evolve_szego(&u0, 1.0, 1e-2).unwrap();
        let fiber = evolved.fiber_coeffs(3);
        let err: f64 = fiber
            .iter()
            .zip(u1.coeffs.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(err < 1e-12, "fiber/1-D mismatch {err}");
        // Other fibers stay exactly zero.
        for ix in 0..8 {
            if ix != 3 {
                assert!(evolved.spectrum.row(ix).iter().all(|c| c.norm() == 0.0));
            }
        }
    }

    #[test]
    fn plus_sector_invariance() {
        let gy = make_grid(10.0, 32).unwrap();
        let gx = make_grid(2.0, 8).unwrap();
        let g = Grid2D::new(gx, gy);
        let mut state = random_state(g, 5, 0.3);
        // restrict to the plus sector
        state.spectrum = crate::project::sector_2d(&state.spectrum, SzegoSign::Plus);
        let evolved = evolve_resonant(&state, 0.5, 1e-2).unwrap();
        for ix in 0..g.gx.n_points {
            let c = evolved.fiber_coeffs(ix);
            for k in 0..g.gy.n_points {
                if g.gy.bin(k) < 0 {
                    assert!(c[k].norm() < 1e-14, "minus-sector leak at ({ix},{k})");
                }
            }
        }
    }

    #[test]
    fn scaled_solution_solves_resonant_system() {
        let gy = make_grid(40.0, 256).unwrap();
        let gx = make_grid(8.0, 16).unwrap();
        let d = crate::szego::RationalDatum::new(vec![(
            0,
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
        )]);
        let u0 = crate::szego::rational_datum_to_state(&d, gy).unwrap();
        let rho = 0.5;
        let tau_mid = 2.0;
        let check = |dtau: f64| -> f64 {
            let traj =
                SzegoTrajectory::record(&u0, rho * rho * (tau_mid + 1.0), dtau / 8.0).unwrap();
            let psi = crate::project::psi0;
            let g_at = |tau: f64| scaled_solution(&traj, rho, &psi, tau, gx).unwrap();
            // centered finite difference of d/dtau G
            let h = dtau;
            let gp = g_at(tau_mid + h);
            let gm = g_at(tau_mid - h);
            let gc = g_at(tau_mid);
            let mut dg = gp.spectrum.clone();
            dg.add_scaled(&gm.spectrum, Complex64::new(-1.0, 0.0));
            dg.scale(Complex64::new(1.0 / (2.0 * h), 0.0));
            // residual i dG/dtau - R[G,G,G]  (tendency = -i R)
            let rhs = resonant_rhs(&ResonantState::new(gc.spectrum, tau_mid));
            let mut resid = dg;
            resid.add_scaled(&rhs, Complex64::new(-1.0, 0.0));
            resid.l2_norm()
        };
        let r1 = check(0.2);
        let r2 = check(0.1);
        assert!(r1 / r2 > 3.0, "residual refinement ratio {} (r1={r1}, r2={r2})", r1 / r2);
        assert!(r2 < 1e-3);
    }

    #[test]
    fn scaled_solution_at_tau_zero() {
        let gy = make_grid(40.0, 256).unwrap();
        let gx = make_grid(8.0, 16).unwrap();
        let d = crate::szego::RationalDatum::new(vec![(
            0,
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
        )]);
        let u0 = crate::szego::rational_datum_to_state(&d, gy).unwrap();
        let traj = SzegoTrajectory::record(&u0, 1.0, 0.01).unwrap();
        let rho = 0.3;
        let g = scaled_solution(&traj, rho, &crate::project::psi0, 0.0, gx).unwrap();
        for ix in 0..gx.n_points {
            let xi = gx.freq(ix);
            let p = crate::project::psi0(xi);
            let c = g.fiber_coeffs(ix);
            if p == 0.0 {
                assert!(c.iter().all(|v| v.norm() < 1e-14));
            } else {
                for k in 0..gy.n_points {
                    let expect = u0.coeffs[k] * rho * p;
                    assert!((c[k] - expect).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn gnorm_profile_constant_for_single_modes() {
        let gy = make_grid(PI, 32).unwrap();
        let gx = make_grid(2.0, 8).unwrap();
        let g = Grid2D::new(gx, gy);
        let mut coeffs = vec![Complex64::ZERO; 32];
        coeffs[gy.index_of_bin(2).unwrap()] = Complex64::new(1.0, 0.0);
        let mut s = Spectrum2D::zero(g, Representation::XFourier);
        let row = transform_inverse(&coeffs, gy).values;
        for ix in 0..8 {
            s.row_mut(ix).copy_from_slice(&row);
        }
        let state = ResonantState::new(s, 0.0);
        let p0 = fiber_gnorm_profile(&state);
        let evolved = evolve_resonant(&state, 1.0, 1e-2).unwrap();
        let p1 = fiber_gnorm_profile(&evolved);
        for (a, b) in p0.iter().zip(p1.iter()) {
            assert!((a - b).abs() < 1e-8 * a.max(1.0));
        }
    }
}
