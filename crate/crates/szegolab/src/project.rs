//! Szegő and Littlewood–Paley projectors plus the smooth bumps they share.

use crate::grid::Grid1D;
use crate::transform::{Representation, Spectrum2D};
use num_complex::Complex64;

/// Smooth plateau bump: 1 on |x| <= 1, 0 on |x| >= 2, C-infinity transition
/// exp(1 - 1/(1 - (|x|-1)^2)) in between.
pub fn psi0(x: f64) -> f64 {
    let a = x.abs();
    if a <= 1.0 {
        1.0
    } else if a >= 2.0 {
        0.0
    } else {
        let s = a - 1.0;
        (1.0 - 1.0 / (1.0 - s * s)).exp()
    }
}

/// Annulus bump phi(x) = psi0(x) - psi0(2x): supported on 1/2 < |x| < 2,
/// equals 1 at |x| = 1, and telescopes to a dyadic partition of unity.
pub fn phi(x: f64) -> f64 {
    psi0(x) - psi0(2.0 * x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SzegoSign {
    Plus,
    Minus,
}

/// Szegő projector on FFT-ordered coefficients: Plus keeps bins with
/// frequency >= 0 (the zero bin included), Minus is the complement.
pub fn szego_project(coeffs: &[Complex64], grid: Grid1D, sign: SzegoSign) -> Vec<Complex64> {
    assert_eq!(coeffs.len(), grid.n_points);
    coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let plus = grid.bin(k) >= 0;
            if (sign == SzegoSign::Plus) == plus {
                *c
            } else {
                Complex64::ZERO
            }
        })
        .collect()
}

/// Littlewood–Paley block: multiply bin eta by phi(eta / 2^k).
pub fn lp_block(coeffs: &[Complex64], grid: Grid1D, k: i32) -> Vec<Complex64> {
    assert_eq!(coeffs.len(), grid.n_points);
    let scale = (2.0f64).powi(k);
    coeffs
        .iter()
        .enumerate()
        .map(|(j, c)| c * phi(grid.freq(j) / scale))
        .collect()
}

/// Dyadic block indices whose annuli intersect the grid's frequency band.
pub fn lp_block_range(grid: Grid1D) -> std::ops::RangeInclusive<i32> {
    // Block k is supported on 2^(k-1) < |eta| < 2^(k+1); cover from below the
    // smallest nonzero frequency to above the band limit.
    let k_min = grid.dxi().log2().floor() as i32 - 1;
    let k_max = grid.band_limit().log2().ceil() as i32 + 1;
    k_min..=k_max
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QMode {
    /// Plateau cutoff psi0(xi / a).
    LowPass,
    /// Annulus phi(xi / a).
    Annulus,
}

/// Frequency cutoff acting on the xi axis of a full-Fourier spectrum.
pub fn q_project(s2d: &Spectrum2D, a: f64, mode: QMode) -> Spectrum2D {
    assert_eq!(s2d.rep, Representation::Full);
    let mut out = s2d.clone();
    let gx = s2d.grid.gx;
    for ix in 0..gx.n_points {
        let m = match mode {
            QMode::LowPass => psi0(gx.freq(ix) / a),
            QMode::Annulus => phi(gx.freq(ix) / a),
        };
        for v in out.row_mut(ix) {
            *v *= m;
        }
    }
    out
}

/// Sector restriction of a 2-D spectrum along the eta (y-frequency) axis.
/// Accepts XFourier or Full input; projects in Full and returns in the
/// input representation.
pub fn sector_2d(s2d: &Spectrum2D, sign: SzegoSign) -> Spectrum2D {
    let rep0 = s2d.rep;
    let mut s = s2d.cloned_rep(Representation::Full);
    let gy = s.grid.gy;
    for ix in 0..s.grid.gx.n_points {
        let row = s.row_mut(ix);
        for (iy, v) in row.iter_mut().enumerate() {
            let plus = gy.bin(iy) >= 0;
            if (sign == SzegoSign::Plus) != plus {
                *v = Complex64::ZERO;
            }
        }
    }
    s.into_rep(rep0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use rand::{Rng, SeedableRng};

    #[test]
    fn bump_shape() {
        assert_eq!(psi0(0.5), 1.0);
        assert_eq!(psi0(-1.0), 1.0);
        assert_eq!(psi0(2.0), 0.0);
        assert!(psi0(1.5) > 0.0 && psi0(1.5) < 1.0);
        assert_eq!(phi(1.0), 1.0);
        assert_eq!(phi(0.0), 0.0);
        assert_eq!(phi(0.5), 0.0);
        assert_eq!(phi(2.0), 0.0);
    }

    #[test]
    fn szego_single_bins() {
        let g = make_grid(1.0, 8).unwrap();
        let mut c = vec![Complex64::ZERO; 8];
        c[g.index_of_bin(2).unwrap()] = Complex64::new(1.0, 0.0);
        assert_eq!(szego_project(&c, g, SzegoSign::Plus), c);
        let mut d = vec![Complex64::ZERO; 8];
        d[g.index_of_bin(-2).unwrap()] = Complex64::new(1.0, 0.0);
        assert!(szego_project(&d, g, SzegoSign::Plus)
            .iter()
            .all(|v| v.norm() == 0.0));
        assert_eq!(szego_project(&d, g, SzegoSign::Minus), d);
    }

    #[test]
    fn projector_algebra_exact() {
        let g = make_grid(3.0, 32).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let s: Vec<Complex64> = (0..32)
            .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        let p = szego_project(&s, g, SzegoSign::Plus);
        let m = szego_project(&s, g, SzegoSign::Minus);
        assert_eq!(szego_project(&p, g, SzegoSign::Plus), p);
        assert!(szego_project(&p, g, SzegoSign::Minus)
            .iter()
            .all(|v| v.norm() == 0.0));
        let sum: Vec<Complex64> = p.iter().zip(m.iter()).map(|(a, b)| a + b).collect();
        assert_eq!(sum, s);
    }

    #[test]
    fn lp_partition_of_unity() {
        let g = make_grid(4.0, 64).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(6);
        let s: Vec<Complex64> = (0..64)
            .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        let mut acc = vec![Complex64::ZERO; 64];
        for k in lp_block_range(g) {
            for (a, b) in acc.iter_mut().zip(lp_block(&s, g, k)) {
                *a += b;
            }
        }
        for j in 0..64 {
            let f = g.freq(j).abs();
            if f > 0.0 && f < g.band_limit() / 4.0 {
                assert!((acc[j] - s[j]).norm() <= 1e-10 * s[j].norm().max(1.0));
            }
            if f == 0.0 {
                assert_eq!(acc[j], Complex64::ZERO);
            }
        }
    }

    #[test]
    fn lp_block_is_identity_on_its_center_frequency() {
        // dxi = 1, so the bin at eta = 4 = 2^2 sits exactly where phi = 1.
        let g = make_grid(std::f64::consts::PI, 64).unwrap();
        let mut s = vec![Complex64::ZERO; 64];
        let target = g.index_of_bin(4).unwrap();
        s[target] = Complex64::new(2.0, -1.0);
        let out = lp_block(&s, g, 2);
        assert_eq!(out[target], s[target]);
    }
}
