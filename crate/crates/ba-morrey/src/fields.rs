//! Deterministic field generators: seeded band-limited random fields,
//! compactly supported smooth bumps, and the truncated logarithm.

use crate::grid::{ComplexField, GridSpec};
use crate::transforms::fft_2d;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;

/// Random band-limited field: independent coefficients on the modes
/// `|kx|, |ky| <= kmax` with the zero mode left empty, so the result is
/// smooth, periodic and exactly mean-zero. Identical seeds give identical
/// fields bit for bit.
pub fn band_limited(spec: GridSpec, seed: u64, kmax: usize) -> ComplexField {
    let n = spec.n();
    assert!(kmax < n / 2, "band limit must stay below the Nyquist row");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hat = vec![Complex64::new(0.0, 0.0); n * n];
    let m = kmax as i64;
    for ky in -m..=m {
        for kx in -m..=m {
            if kx == 0 && ky == 0 {
                continue;
            }
            let re = rng.gen_range(-1.0..1.0);
            let im = rng.gen_range(-1.0..1.0);
            let ix = kx.rem_euclid(n as i64) as usize;
            let iy = ky.rem_euclid(n as i64) as usize;
            hat[iy * n + ix] = Complex64::new(re, im);
        }
    }
    fft_2d(&mut hat, n, true);
    ComplexField::from_values(spec, hat).expect("band-limited synthesis is finite")
}

/// Real-valued band-limited mean-zero field (imaginary parts exactly zero).
pub fn band_limited_real(spec: GridSpec, seed: u64, kmax: usize) -> ComplexField {
    let f = band_limited(spec, seed, kmax);
    let values = f.values().iter().map(|v| Complex64::new(v.re, 0.0)).collect();
    ComplexField::from_values(spec, values).expect("real part of a finite field is finite")
}

/// The standard mollifier profile: `exp(1 - 1/(1 - t^2))` for `|t| < 1`,
/// zero outside, so bumps built from it have genuinely compact support.
pub fn mollifier(t: f64) -> f64 {
    if t.abs() < 1.0 {
        (1.0 - 1.0 / (1.0 - t * t)).exp()
    } else {
        0.0
    }
}

/// Smooth compactly supported bump `amp * mollifier(|z - center| / radius)`.
pub fn bump(spec: GridSpec, center: Complex64, radius: f64, amp: f64) -> ComplexField {
    ComplexField::from_fn(spec, |z| Complex64::new(amp * mollifier((z - center).norm() / radius), 0.0))
        .expect("mollifier is finite")
}

/// Sum of seeded random bumps with centers in the square `Q(0, spread)`;
/// real-valued, smooth, compactly supported.
pub fn random_bump_sum(
    spec: GridSpec,
    seed: u64,
    count: usize,
    spread: f64,
    radius_range: (f64, f64),
    amp_range: (f64, f64),
) -> ComplexField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bumps = Vec::with_capacity(count);
    for _ in 0..count {
        let cx = rng.gen_range(-spread..spread);
        let cy = rng.gen_range(-spread..spread);
        let radius = rng.gen_range(radius_range.0..radius_range.1);
        let amp = rng.gen_range(amp_range.0..amp_range.1) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        bumps.push((Complex64::new(cx, cy), radius, amp));
    }
    ComplexField::from_fn(spec, |z| {
        let mut v = 0.0;
        for &(c, r, a) in &bumps {
            v += a * mollifier((z - c).norm() / r);
        }
        Complex64::new(v, 0.0)
    })
    .expect("bump sums are finite")
}

/// `log(max(|z|, floor))`: the classical unbounded-mean-oscillation symbol,
/// clamped near the origin so every sample is finite.
pub fn truncated_log_abs(spec: GridSpec, floor: f64) -> ComplexField {
    assert!(floor > 0.0);
    ComplexField::from_fn(spec, |z| Complex64::new(z.norm().max(floor).ln(), 0.0))
        .expect("clamped log is finite")
}

/// Subtract the window mean.
pub fn mean_zero(f: &ComplexField) -> ComplexField {
    let m = f.mean();
    let values = f.values().iter().map(|v| v - m).collect();
    ComplexField::from_values(*f.spec(), values).expect("finite shift")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn band_limited_is_mean_zero_and_deterministic() {
        let spec = GridSpec::new(64, 2.0).unwrap();
        let f = band_limited(spec, 42, 6);
        assert!(f.mean().norm() < 1e-13 * f.l2_norm());
        let g = band_limited(spec, 42, 6);
        assert_eq!(f.values(), g.values());
        let other = band_limited(spec, 43, 6);
        assert!(f.sub(&other).l2_norm() > 1e-6);
    }

    #[test]
    fn real_variant_is_exactly_real() {
        let spec = GridSpec::new(32, 1.0).unwrap();
        let f = band_limited_real(spec, 7, 4);
        assert!(f.is_real());
    }

    #[test]
    fn bump_has_compact_support() {
        let spec = GridSpec::new(64, 4.0).unwrap();
        let b = bump(spec, Complex64::new(0.0, 0.0), 1.0, 0.5);
        for (i, v) in b.values().iter().enumerate() {
            let z = b.spec().point_at(i);
            if z.norm() >= 1.0 {
                assert_eq!(v.re, 0.0);
            }
        }
        assert!(b.values().iter().any(|v| v.re > 0.4));
    }
}
