//! The half-wave Schrödinger flow (i d/dt + A) U = |U|^2 U with
//! A = d_x^2 - |D_y|, its profile formulation, the trilinear operators
//! N^t / I^t / N0^t, and the stationary-phase comparison against (pi/t) R.

use crate::project::{sector_2d, SzegoSign};
use crate::resonant::{resonant_rhs, ResonantState};
use crate::transform::{triple_product_2d, Representation, Spectrum2D};
use num_complex::Complex64;
use std::f64::consts::PI;

#[derive(Debug, thiserror::Error)]
pub enum HalfWaveError {
    #[error("non-finite values at t = {0}")]
    NonFinite(f64),
    #[error("step count not integral: span {0} / dt {1}")]
    BadStep(f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct HalfWaveState {
    pub field: Spectrum2D,
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileState {
    pub field: Spectrum2D,
    pub t: f64,
}

/// Multiply full-Fourier bins by e^{i t (-xi^2 - |eta|)} — the unitary group
/// of A.
pub fn linear_propagator(w: &Spectrum2D, t: f64) -> Spectrum2D {
    let mut s = w.cloned_rep(Representation::Full);
    let g = s.grid;
    for ix in 0..g.gx.n_points {
        let xi = g.gx.freq(ix);
        for (iy, v) in s.row_mut(ix).iter_mut().enumerate() {
            let eta = g.gy.freq(iy);
            let phase = t * (-xi * xi - eta.abs());
            *v *= Complex64::new(0.0, phase).exp();
        }
    }
    s
}

/// x-only Schrödinger group U(t) = e^{i t d_x^2}: multiplier e^{-i t xi^2}.
pub fn x_propagator(w: &Spectrum2D, t: f64) -> Spectrum2D {
    let mut s = w.cloned_rep(Representation::Full);
    let g = s.grid;
    for ix in 0..g.gx.n_points {
        let xi = g.gx.freq(ix);
        let m = Complex64::new(0.0, -t * xi * xi).exp();
        for v in s.row_mut(ix) {
            *v *= m;
        }
    }
    s
}

/// y-only half-wave phase e^{i s |D_y|}: multiplier e^{i s |eta|}.
pub fn y_halfwave_phase(w: &Spectrum2D, s_time: f64) -> Spectrum2D {
    let mut s = w.cloned_rep(Representation::Full);
    let g = s.grid;
    for ix in 0..g.gx.n_points {
        for (iy, v) in s.row_mut(ix).iter_mut().enumerate() {
            let eta = g.gy.freq(iy);
            *v *= Complex64::new(0.0, s_time * eta.abs()).exp();
        }
    }
    s
}

/// Profile F = e^{-i t A} U of a solution state.
pub fn profile(u: &HalfWaveState) -> ProfileState {
    ProfileState {
        field: linear_propagator(&u.field, -u.t),
        t: u.t,
    }
}

pub fn unprofile(f: &ProfileState) -> HalfWaveState {
    HalfWaveState {
        field: linear_propagator(&f.field, f.t),
        t: f.t,
    }
}

/// N^t[F, G, H] = e^{-itA}(e^{itA}F * conj(e^{itA}G) * e^{itA}H), dealiased.
pub fn op_n(f: &Spectrum2D, g: &Spectrum2D, h: &Spectrum2D, t: f64) -> Spectrum2D {
    let fp = linear_propagator(f, t);
    let gp = linear_propagator(g, t);
    let hp = linear_propagator(h, t);
    let prod = triple_product_2d(&fp, &gp, &hp);
    linear_propagator(&prod, -t)
}

/// I^t[f, g, h] = U(-t)(U(t)f * conj(U(t)g) * U(t)h) with U(t) = e^{it d_x^2}.
pub fn op_i(f: &Spectrum2D, g: &Spectrum2D, h: &Spectrum2D, t: f64) -> Spectrum2D {
    let fp = x_propagator(f, t);
    let gp = x_propagator(g, t);
    let hp = x_propagator(h, t);
    let prod = triple_product_2d(&fp, &gp, &hp);
    x_propagator(&prod, -t)
}

/// N^t computed through the factorization
/// N^t = e^{it|D_y|} I^t[e^{-it|D_y|}F, e^{-it|D_y|}G, e^{-it|D_y|}H];
/// used as an independent code path against `op_n`.
pub fn op_n_via_i(f: &Spectrum2D, g: &Spectrum2D, h: &Spectrum2D, t: f64) -> Spectrum2D {
    let fp = y_halfwave_phase(f, -t);
    let gp = y_halfwave_phase(g, -t);
    let hp = y_halfwave_phase(h, -t);
    let inner = op_i(&fp, &gp, &hp, t);
    y_halfwave_phase(&inner, t)
}

/// The sector-restricted operator
/// N0^t = P+ N^t[F+, G+, H+] + P- N^t[F-, G-, H-].
pub fn op_n0(f: &Spectrum2D, g: &Spectrum2D, h: &Spectrum2D, t: f64) -> Spectrum2D {
    let plus = op_n(
        &sector_2d(f, SzegoSign::Plus),
        &sector_2d(g, SzegoSign::Plus),
        &sector_2d(h, SzegoSign::Plus),
        t,
    );
    let minus = op_n(
        &sector_2d(f, SzegoSign::Minus),
        &sector_2d(g, SzegoSign::Minus),
        &sector_2d(h, SzegoSign::Minus),
        t,
    );
    let mut out = sector_2d(&plus, SzegoSign::Plus);
    out.add_scaled(&sector_2d(&minus, SzegoSign::Minus), Complex64::new(1.0, 0.0));
    out
}

/// The resonant trilinear form R[F, F, F] (no -i prefactor): fiberwise
/// sector products in y, pointwise in xi.
pub fn op_r(f: &Spectrum2D) -> Spectrum2D {
    let state = ResonantState::new(f.cloned_rep(Representation::XFourier), 0.0);
    let mut tend = resonant_rhs(&state);
    // resonant_rhs returns -i R; undo the prefactor.
    tend.scale(Complex64::new(0.0, 1.0));
    tend
}

/// Box mass integral |U|^2 dx dy.
pub fn mass(u: &HalfWaveState) -> f64 {
    u.field.l2_norm().powi(2)
}

/// Hamiltonian 1/2 (|d_x U|^2 + |D_y|U * conj(U)) + 1/4 |U|^4, via Fourier
/// multipliers for the quadratic terms and a dealiased physical quartic.
pub fn hamiltonian(u: &HalfWaveState) -> f64 {
    let s = u.field.cloned_rep(Representation::Full);
    let g = s.grid;
    let w = (2.0 * PI).powi(2) * g.gx.dxi() * g.gy.dxi();
    let mut quad = 0.0;
    for ix in 0..g.gx.n_points {
        let xi = g.gx.freq(ix);
        for (iy, c) in s.row(ix).iter().enumerate() {
            let eta = g.gy.freq(iy);
            quad += (xi * xi + eta.abs()) * c.norm_sqr();
        }
    }
    // |U|^4 on the doubled grid (|U|^2 is band-limited there).
    let cube = triple_product_2d(&s, &s, &s);
    // integral |U|^4 = <|U|^2 U, U> = (2pi)^2 dxi deta sum cube * conj(U)
    let mut quart = 0.0;
    for (a, b) in cube.values.iter().zip(s.values.iter()) {
        quart += (a * b.conj()).re;
    }
    0.5 * w * quad + 0.25 * w * quart
}

/// 2/3-rule dealiasing mask plus Nyquist zeroing, applied in Full
/// representation after every nonlinear substep.
fn dealias_mask(s: &mut Spectrum2D) {
    assert_eq!(s.rep, Representation::Full);
    let g = s.grid;
    let bx = (g.gx.n_points as i64) / 3;
    let by = (g.gy.n_points as i64) / 3;
    for ix in 0..g.gx.n_points {
        let kill_x = g.gx.bin(ix).abs() > bx;
        for (iy, v) in s.row_mut(ix).iter_mut().enumerate() {
            if kill_x || g.gy.bin(iy).abs() > by {
                *v = Complex64::ZERO;
            }
        }
    }
}

/// Strang splitting for (i d/dt + A)U = sign * |U|^2 U: exact pointwise
/// nonlinear phase (|U| is invariant along the nonlinear substep), exact
/// unitary linear propagator, 2/3-rule mask after each nonlinear substep.
///
/// `nonlinear_sign`: +1.0 for the defocusing default, -1.0 for the focusing
/// variant, 0.0 disables the nonlinearity (test hook).
pub fn evolve_halfwave(
    u0: &HalfWaveState,
    t1: f64,
    dt: f64,
    nonlinear_sign: f64,
) -> Result<HalfWaveState, HalfWaveError> {
    let mut cb = |_: &HalfWaveState| {};
    evolve_halfwave_with(u0, t1, dt, nonlinear_sign, &mut cb)
}

pub fn evolve_halfwave_with(
    u0: &HalfWaveState,
    t1: f64,
    dt: f64,
    nonlinear_sign: f64,
    on_step: &mut dyn FnMut(&HalfWaveState),
) -> Result<HalfWaveState, HalfWaveError> {
    assert!(dt > 0.0);
    let span = t1 - u0.t;
    let steps_f = span.abs() / dt;
    if (steps_f - steps_f.round()).abs() > 1e-9 * steps_f.max(1.0) {
        return Err(HalfWaveError::BadStep(span, dt));
    }
    let n_steps = steps_f.round().max(1.0) as usize;
    let h = span / n_steps as f64;
    let mut u = HalfWaveState {
        field: u0.field.cloned_rep(Representation::Full),
        t: u0.t,
    };
    on_step(&u);
    let half_phase = |s: Spectrum2D, h: f64| -> Spectrum2D {
        if nonlinear_sign == 0.0 {
            return s;
        }
        let mut p = s.into_rep(Representation::Physical);
        for v in p.values.iter_mut() {
            // i dU/dt = sign |U|^2 U pointwise.
            let phase = -nonlinear_sign * v.norm_sqr() * h / 2.0;
            *v *= Complex64::new(0.0, phase).exp();
        }
        let mut f = p.into_rep(Representation::Full);
        dealias_mask(&mut f);
        f
    };
    for _ in 0..n_steps {
        let a = half_phase(u.field, h);
        let b = linear_propagator(&a, h);
        u.field = half_phase(b, h);
        u.t += h;
        if !u
            .field
            .values
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
        {
            return Err(HalfWaveError::NonFinite(u.t));
        }
        on_step(&u);
    }
    Ok(u)
}

/// One row of the remainder-decay table for ||N0^t - (pi/t) R||.
#[derive(Debug, Clone, serde::Serialize)]
pub struct DecaySample {
    pub t: f64,
    pub l2: f64,
    pub z: f64,
}

/// Tabulate ||N0^t[F,F,F] - (pi/t) R[F,F,F]|| in L^2 and Z over t_list and
/// fit the log-log slope of the L^2 column over the upper decade.
pub fn resonant_comparison(f: &Spectrum2D, t_list: &[f64]) -> (Vec<DecaySample>, f64) {
    let r = op_r(f).into_rep(Representation::Full);
    let samples: Vec<DecaySample> = t_list
        .iter()
        .map(|&t| {
            let n0 = op_n0(f, f, f, t);
            let mut diff = n0;
            diff.add_scaled(&r, Complex64::new(-PI / t, 0.0));
            let l2 = diff.l2_norm();
            let z = crate::norms::z_norm(&diff);
            DecaySample { t, l2, z }
        })
        .collect();
    let tmax = t_list.iter().cloned().fold(f64::MIN, f64::max);
    let window: Vec<&DecaySample> = samples.iter().filter(|s| s.t >= tmax / 10.0).collect();
    let xs: Vec<f64> = window.iter().map(|s| s.t.ln()).collect();
    let ys: Vec<f64> = window.iter().map(|s| s.l2.max(1e-300).ln()).collect();
    let (slope, _, _) = crate::norms::linear_fit(&xs, &ys);
    (samples, slope)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, Grid2D};
    use rand::{Rng, SeedableRng};

    fn smooth_random(g: Grid2D, seed: u64, amp: f64) -> Spectrum2D {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut s = Spectrum2D::zero(g, Representation::Full);
        for ix in 0..g.gx.n_points {
            let bx = g.gx.bin(ix);
            for iy in 0..g.gy.n_points {
                let by = g.gy.bin(iy);
                if bx.abs() < (g.gx.n_points / 6) as i64 && by.abs() < (g.gy.n_points / 6) as i64 {
                    *s.at_mut(ix, iy) =
                        Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5) * amp;
                }
            }
        }
        s
    }

    #[test]
    fn propagator_identity_composition_unitarity() {
        let g = Grid2D::new(make_grid(4.0, 16).unwrap(), make_grid(4.0, 16).unwrap());
        let u = smooth_random(g, 1, 1.0);
        let id = linear_propagator(&u, 0.0);
        assert_eq!(id.values, u.values);
        let a = linear_propagator(&linear_propagator(&u, 0.3), 0.7);
        let b = linear_propagator(&u, 1.0);
        let mut d = a.clone();
        d.add_scaled(&b, Complex64::new(-1.0, 0.0));
        assert!(d.l2_norm() < 1e-12 * u.l2_norm());
        assert!((linear_propagator(&u, 5.0).l2_norm() - u.l2_norm()).abs() < 1e-12 * u.l2_norm());
    }

    #[test]
    fn dispersive_decay_in_x() {
        // sup_x of e^{it d_x^2} applied to a Gaussian decays like t^{-1/2}.
        let g = Grid2D::new(make_grid(400.0, 2048).unwrap(), make_grid(2.0, 8).unwrap());
        let u = Spectrum2D::from_fn(g, |x, _| Complex64::new((-x * x / 2.0).exp(), 0.0))
            .into_rep(Representation::Full);
        let mut ts = Vec::new();
        let mut sups = Vec::new();
        for k in 0..7 {
            let t = 1.0 * (2.0f64).powi(k); // 1..64
            let p = x_propagator(&u, t).into_rep(Representation::Physical);
            let sup = p.values.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
            ts.push(t.ln());
            sups.push(sup.ln());
        }
        let (slope, _, _) = crate::norms::linear_fit(&ts, &sups);
        assert!((slope + 0.5).abs() < 0.05, "dispersive slope {slope}");
    }

    #[test]
    fn op_n_two_paths_agree() {
        let g = Grid2D::new(make_grid(4.0, 32).unwrap(), make_grid(4.0, 32).unwrap());
        for seed in 0..5u64 {
            let f = smooth_random(g, seed, 1.0);
            let gg = smooth_random(g, seed + 50, 1.0);
            let h = smooth_random(g, seed + 100, 1.0);
            let t = 0.7 + seed as f64;
            let a = op_n(&f, &gg, &h, t);
            let b = op_n_via_i(&f, &gg, &h, t);
            let mut d = a.clone();
            d.add_scaled(&b, Complex64::new(-1.0, 0.0));
            let rel = d.l2_norm() / a.l2_norm();
            assert!(rel < 1e-12, "seed {seed}: path disagreement {rel}");
        }
    }

    #[test]
    fn op_n_at_time_zero_is_plain_product() {
        let g = Grid2D::new(make_grid(4.0, 16).unwrap(), make_grid(4.0, 16).unwrap());
        let f = smooth_random(g, 3, 1.0);
        let h = smooth_random(g, 4, 1.0);
        let zero = Spectrum2D::zero(g, Representation::Full);
        assert!(op_n(&f, &h, &zero, 1.3).l2_norm() == 0.0);
        let a = op_n(&f, &h, &f, 0.0);
        let b = triple_product_2d(&f, &h, &f);
        let mut d = a.clone();
        d.add_scaled(&b, Complex64::new(-1.0, 0.0));
        assert!(d.l2_norm() < 1e-12 * a.l2_norm());
    }

    #[test]
    fn op_n_linearity_structure() {
        let g = Grid2D::new(make_grid(4.0, 16).unwrap(), make_grid(4.0, 16).unwrap());
        let f = smooth_random(g, 7, 1.0);
        let gg = smooth_random(g, 8, 1.0);
        let h = smooth_random(g, 9, 1.0);
        let t = 1.1;
        let c = Complex64::new(0.6, -1.2);
        // linear in F
        let mut cf = f.clone();
        cf.scale(c);
        let a = op_n(&cf, &gg, &h, t);
        let mut b = op_n(&f, &gg, &h, t);
        b.scale(c);
        let mut d = a.clone();
        d.add_scaled(&b, Complex64::new(-1.0, 0.0));
        assert!(d.l2_norm() < 1e-12 * b.l2_norm());
        // antilinear in G
        let mut cg = gg.clone();
        cg.scale(c);
        let a = op_n(&f, &cg, &h, t);
        let mut b = op_n(&f, &gg, &h, t);
        b.scale(c.conj());
        let mut d = a.clone();
        d.add_scaled(&b, Complex64::new(-1.0, 0.0));
        assert!(d.l2_norm() < 1e-12 * b.l2_norm());
        // gauge covariance
        let theta = Complex64::new(0.0, 0.83).exp();
        let (mut tf, mut tg, mut th) = (f.clone(), gg.clone(), h.clone());
        tf.scale(theta);
        tg.scale(theta);
        th.scale(theta);
        let a = op_n(&tf, &tg, &th, t);
        let mut b = op_n(&f, &gg, &h, t);
        b.scale(theta);
        let mut d = a.clone();
        d.add_scaled(&b, Complex64::new(-1.0, 0.0));
        assert!(d.l2_norm() < 1e-12 * b.l2_norm());
    }

    #[test]
    fn op_n0_collapses_for_plus_sector_inputs() {
        let g = Grid2D::new(make_grid(4.0, 16).unwrap(), make_grid(4.0, 16).unwrap());
        let f = sector_2d(&smooth_random(g, 11, 1.0), SzegoSign::Plus);
        let t = 0.9;
        let a = op_n0(&f, &f, &f, t);
        let b = sector_2d(&op_n(&f, &f, &f, t), SzegoSign::Plus);
        let mut d = a.clone();
        d.add_scaled(&b.cloned_rep(a.rep), Complex64::new(-1.0, 0.0));
        assert!(d.l2_norm() < 1e-12 * b.l2_norm());
    }

    #[test]
    fn mass_hamiltonian_single_mode() {
        let g = Grid2D::new(make_grid(PI, 16).unwrap(), make_grid(PI, 16).unwrap());
        let amp = Complex64::new(0.3, 0.4); // |A| = 0.5
        let u = Spectrum2D::from_fn(g, |x, y| amp * Complex64::new(0.0, 2.0 * x + 3.0 * y).exp());
        let s = (2.0 * PI) * (2.0 * PI);
        let st = HalfWaveState {
            field: u.into_rep(Representation::Full),
            t: 0.0,
        };
        let m = mass(&st);
        assert!((m - 0.25 * s).abs() < 1e-10 * m);
        let h = hamiltonian(&st);
        let expect = 0.5 * (4.0 + 3.0) * 0.25 * s + 0.25 * 0.0625 * s;
        assert!((h - expect).abs() < 1e-10 * expect, "{h} vs {expect}");
    }

    #[test]
    fn evolve_zero_and_linear_hook() {
        let g = Grid2D::new(make_grid(4.0, 16).unwrap(), make_grid(4.0, 16).unwrap());
        let zero = HalfWaveState {
            field: Spectrum2D::zero(g, Representation::Full),
            t: 0.0,
        };
        let out = evolve_halfwave(&zero, 1.0, 0.125, 1.0).unwrap();
        assert!(out.field.values.iter().all(|c| c.norm() == 0.0));
        let u0 = HalfWaveState {
            field: smooth_random(g, 13, 0.5),
            t: 0.0,
        };
        let lin = evolve_halfwave(&u0, 1.0, 0.125, 0.0).unwrap();
        let direct = linear_propagator(&u0.field, 1.0);
        let mut d = lin.field.clone();
        d.add_scaled(&direct, Complex64::new(-1.0, 0.0));
        assert!(d.l2_norm() < 1e-12 * direct.l2_norm());
    }

    #[test]
    fn evolve_second_order_self_convergence() {
        let g = Grid2D::new(make_grid(6.0, 32).unwrap(), make_grid(6.0, 32).unwrap());
        let u0 = HalfWaveState {
            field: Spectrum2D::from_fn(g, |x, y| {
                Complex64::new(0.6 * (-(x * x + y * y) / 2.0).exp(), 0.0)
            })
            .into_rep(Representation::Full),
            t: 0.0,
        };
        let reference = evolve_halfwave(&u0, 1.0, 1.0 / 256.0, 1.0).unwrap();
        let err = |dt: f64| {
            let u = evolve_halfwave(&u0, 1.0, dt, 1.0).unwrap();
            let mut d = u.field.clone();
            d.add_scaled(&reference.field, Complex64::new(-1.0, 0.0));
            d.l2_norm()
        };
        let r = err(1.0 / 16.0) / err(1.0 / 32.0);
        assert!(r > 3.4 && r < 4.6, "Strang order ratio {r}");
    }

    #[test]
    fn mass_conserved_along_flow() {
        let g = Grid2D::new(make_grid(6.0, 32).unwrap(), make_grid(6.0, 32).unwrap());
        let u0 = HalfWaveState {
            field: Spectrum2D::from_fn(g, |x, y| {
                Complex64::new(0.3 * (-(x * x + y * y) / 2.0).exp(), 0.0)
            })
            .into_rep(Representation::Full),
            t: 0.0,
        };
        let m0 = mass(&u0);
        let u = evolve_halfwave(&u0, 5.0, 1.0 / 64.0, 1.0).unwrap();
        assert!((mass(&u) - m0).abs() / m0 < 1e-10);
    }

    #[test]
    fn profile_round_trip_and_linear_constancy() {
        let g = Grid2D::new(make_grid(4.0, 16).unwrap(), make_grid(4.0, 16).unwrap());
        let u = HalfWaveState {
            field: smooth_random(g, 17, 1.0),
            t: 1.7,
        };
        let back = unprofile(&profile(&u));
        let mut d = back.field.clone();
        d.add_scaled(&u.field, Complex64::new(-1.0, 0.0));
        assert!(d.l2_norm() < 1e-12 * u.field.l2_norm());
        // A linear solution has a constant profile.
        let u0 = smooth_random(g, 18, 1.0);
        let later = HalfWaveState {
            field: linear_propagator(&u0, 2.5),
            t: 2.5,
        };
        let f = profile(&later);
        let mut d = f.field.clone();
        d.add_scaled(&u0, Complex64::new(-1.0, 0.0));
        assert!(d.l2_norm() < 1e-12 * u0.l2_norm());
    }

    #[test]
    fn profile_tendency_matches_op_n() {
        // d/dt F = -i N^t[F, F, F] along the true flow (Duhamel residual).
        let g = Grid2D::new(make_grid(6.0, 32).unwrap(), make_grid(6.0, 32).unwrap());
        let u0 = HalfWaveState {
            field: Spectrum2D::from_fn(g, |x, y| {
                Complex64::new(0.4 * (-(x * x + y * y) / 2.0).exp(), 0.0)
            })
            .into_rep(Representation::Full),
            t: 0.0,
        };
        let t_mid = 0.5;
        let dt = 1.0 / 512.0;
        let at = |t: f64| profile(&evolve_halfwave(&u0, t, dt, 1.0).unwrap());
        let h = 1.0 / 64.0;
        let fp = at(t_mid + h);
        let fm = at(t_mid - h);
        let fc = at(t_mid);
        let mut df = fp.field.clone();
        df.add_scaled(&fm.field, Complex64::new(-1.0, 0.0));
        df.scale(Complex64::new(1.0 / (2.0 * h), 0.0));
        let mut rhs = op_n(&fc.field, &fc.field, &fc.field, t_mid);
        rhs.scale(Complex64::new(0.0, -1.0));
        let mut resid = df;
        resid.add_scaled(&rhs.cloned_rep(Representation::Full), Complex64::new(-1.0, 0.0));
        let rel = resid.l2_norm() / rhs.l2_norm();
        assert!(rel < 5e-3, "Duhamel residual {rel}");
    }

    #[test]
    fn op_i_decay_scaling() {
        // t * ||I^t[f,f,f]||_{L^2_x} stays bounded for fixed smooth input.
        let g = Grid2D::new(make_grid(200.0, 1024).unwrap(), make_grid(2.0, 8).unwrap());
        let f = Spectrum2D::from_fn(g, |x, _| Complex64::new((-x * x / 2.0).exp(), 0.0))
            .into_rep(Representation::Full);
        let mut products = Vec::new();
        for k in 0..6 {
            let t = (2.0f64).powi(k); // 1..32
            let v = op_i(&f, &f, &f, t).l2_norm();
            products.push(t * v);
        }
        let lo = products.iter().cloned().fold(f64::MAX, f64::min);
        let hi = products.iter().cloned().fold(f64::MIN, f64::max);
        assert!(hi / lo < 3.0, "t*||I^t|| spread {products:?}");
    }

    #[test]
    fn resonant_comparison_scaling_in_amplitude() {
        let g = Grid2D::new(make_grid(60.0, 128).unwrap(), make_grid(6.0, 16).unwrap());
        let f = Spectrum2D::from_fn(g, |x, y| {
            Complex64::new(0.2 * (-(x * x / 4.0 + y * y) / 2.0).exp(), 0.0)
        })
        .into_rep(Representation::Full);
        let ts = [4.0, 8.0];
        let (base, _) = resonant_comparison(&f, &ts);
        let mut f3 = f.clone();
        f3.scale(Complex64::new(3.0, 0.0));
        let (scaled, _) = resonant_comparison(&f3, &ts);
        for (a, b) in base.iter().zip(scaled.iter()) {
            assert!((b.l2 - 27.0 * a.l2).abs() < 1e-9 * b.l2.max(1e-30));
        }
        let zero = Spectrum2D::zero(g, Representation::Full);
        let (zs, _) = resonant_comparison(&zero, &ts);
        assert!(zs.iter().all(|s| s.l2 == 0.0 && s.z == 0.0));
    }
}
