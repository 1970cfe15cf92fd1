//! The Beurling–Ahlfors transform and its relatives.
//!
//! Two independent evaluation routes are provided. The spectral route
//! applies Fourier multipliers on the torus: `B` is `m(xi) = conj(xi)/xi`,
//! the Cauchy transform inverts `dbar`, and the Wirtinger derivatives are
//! plain spectral differentiation. The quadrature route sums the truncated
//! singular kernel `K_B(z,u) = -(1/pi)(z-u)^{-2}` times a smooth radial
//! cutoff directly over the window, with no periodization; it serves as the
//! discrete stand-in for principal values and as an oracle for the spectral
//! path.
//!
//! Conventions shared by every spectral operator: wavenumbers are
//! `pi*k/L` for `k in [-n/2, n/2)`, the Nyquist row's derivative
//! contribution is zeroed for real-input symmetry, and the zero frequency is
//! annihilated (`m(0) := 0`), which fixes the additive-constant freedom.

use crate::error::{Error, Result};
use crate::family::SquareFamily;
use crate::grid::{ComplexField, GridSpec, RealField};
use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

// ---------------------------------------------------------------------------
// 2D FFT plumbing
// ---------------------------------------------------------------------------

fn transpose(values: &[Complex64], n: usize, out: &mut [Complex64]) {
    for jy in 0..n {
        for jx in 0..n {
            out[jx * n + jy] = values[jy * n + jx];
        }
    }
}

/// In-place unnormalized forward / normalized inverse 2D FFT.
pub(crate) fn fft_2d(values: &mut Vec<Complex64>, n: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    let fft = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    for row in values.chunks_exact_mut(n) {
        fft.process(row);
    }
    let mut scratch = vec![Complex64::new(0.0, 0.0); n * n];
    transpose(values, n, &mut scratch);
    for row in scratch.chunks_exact_mut(n) {
        fft.process(row);
    }
    transpose(&scratch, n, values);
    if inverse {
        let scale = 1.0 / (n * n) as f64;
        for v in values.iter_mut() {
            *v *= scale;
        }
    }
}

/// Signed wavenumber `pi*k/L` with the Nyquist bin zeroed.
fn wavenumber(k: usize, n: usize, half_width: f64) -> f64 {
    if k == n / 2 {
        return 0.0;
    }
    let signed = if k < n / 2 { k as i64 } else { k as i64 - n as i64 };
    PI * signed as f64 / half_width
}

/// Apply a Fourier multiplier `m(xi)` where `xi = kx + i*ky` runs over the
/// (Nyquist-zeroed) wavenumber grid.
pub(crate) fn apply_multiplier<M>(f: &ComplexField, m: M) -> ComplexField
where
    M: Fn(Complex64) -> Complex64,
{
    let spec = *f.spec();
    let n = spec.n();
    let l = spec.half_width();
    let mut hat = f.values().to_vec();
    fft_2d(&mut hat, n, false);
    for ky in 0..n {
        let wy = wavenumber(ky, n, l);
        for kx in 0..n {
            let wx = wavenumber(kx, n, l);
            hat[ky * n + kx] *= m(Complex64::new(wx, wy));
        }
    }
    fft_2d(&mut hat, n, true);
    ComplexField::from_raw(spec, hat)
}

// ---------------------------------------------------------------------------
// Spectral operators
// ---------------------------------------------------------------------------

/// Beurling–Ahlfors transform: multiplier `conj(xi)/xi`, zero frequency
/// annihilated. Exact (up to rounding) for band-limited fields and an
/// `L^2` isometry on mean-zero input.
pub fn beurling(f: &ComplexField) -> ComplexField {
    apply_multiplier(f, |xi| {
        if xi.re == 0.0 && xi.im == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            xi.conj() / xi
        }
    })
}

/// `N`-th iterate of the transform as the single multiplier `m(xi)^N`.
pub fn beurling_power(f: &ComplexField, n_power: u32) -> Result<ComplexField> {
    if n_power == 0 {
        return Err(Error::ZeroPower);
    }
    Ok(apply_multiplier(f, |xi| {
        if xi.re == 0.0 && xi.im == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            (xi.conj() / xi).powu(n_power)
        }
    }))
}

/// Which Wirtinger derivative to take.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WirtingerKind {
    /// `d/dz = (d/dx - i d/dy)/2`
    Dz,
    /// `d/dzbar = (d/dx + i d/dy)/2`
    DzBar,
}

/// Spectral Wirtinger derivative.
pub fn wirtinger(f: &ComplexField, kind: WirtingerKind) -> ComplexField {
    let half_i = Complex64::new(0.0, 0.5);
    match kind {
        WirtingerKind::Dz => apply_multiplier(f, |xi| half_i * xi.conj()),
        WirtingerKind::DzBar => apply_multiplier(f, |xi| half_i * xi),
    }
}

/// Cauchy transform: the spectral inverse of `dbar`, normalized so the
/// output has zero mean (the additive constant is fixed at zero).
pub fn cauchy(g: &ComplexField) -> ComplexField {
    apply_multiplier(g, |xi| {
        if xi.re == 0.0 && xi.im == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, -2.0) / xi
        }
    })
}

/// Sup-norm of the gradient, `max_z sqrt(|d_x f|^2 + |d_y f|^2)`, computed
/// spectrally.
pub fn gradient_sup_norm(f: &ComplexField) -> f64 {
    let dz = wirtinger(f, WirtingerKind::Dz);
    let dzbar = wirtinger(f, WirtingerKind::DzBar);
    dz.values()
        .iter()
        .zip(dzbar.values())
        .map(|(a, b)| {
            let dx = a + b;
            let dy = Complex64::new(0.0, 1.0) * (a - b);
            (dx.norm_sqr() + dy.norm_sqr()).sqrt()
        })
        .fold(0.0_f64, f64::max)
}

// ---------------------------------------------------------------------------
// Smooth truncation and quadrature
// ---------------------------------------------------------------------------

/// The radial plateau cutoff: identically 0 up to 1/2, identically 1 from 1
/// on, smooth and nondecreasing in between.
pub struct CutoffProfile;

impl CutoffProfile {
    pub fn value(t: f64) -> f64 {
        fn e(x: f64) -> f64 {
            if x > 0.0 {
                (-1.0 / x).exp()
            } else {
                0.0
            }
        }
        let x = 2.0 * (t - 0.5);
        let num = e(x);
        num / (num + e(1.0 - x))
    }
}

/// Truncation radius for the smooth cutoff; must resolve the transition
/// annulus, i.e. be at least two grid cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationScale {
    eta: f64,
}

impl TruncationScale {
    pub fn new(eta: f64, spec: &GridSpec) -> Result<Self> {
        let min = 2.0 * spec.spacing();
        if !(eta >= min) {
            return Err(Error::TruncationTooFine { eta, min });
        }
        Ok(Self { eta })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Finest truncation the grid resolves, `eta = 2h`; the discrete
    /// stand-in for the principal value.
    pub fn finest(spec: &GridSpec) -> Self {
        Self { eta: 2.0 * spec.spacing() }
    }
}

/// Untruncated kernel `K_B(v) = -(1/pi) / v^2`.
#[inline]
pub(crate) fn plain_kernel(dx: f64, dy: f64) -> Complex64 {
    // 1/v^2 = conj(v^2) / |v^2|^2 without complex division.
    let re2 = dx * dx - dy * dy;
    let im2 = 2.0 * dx * dy;
    let denom = re2 * re2 + im2 * im2;
    let scale = -1.0 / (PI * denom);
    Complex64::new(re2 * scale, -im2 * scale)
}

/// Kernel value at displacement `v`, truncated at scale `eta`.
pub fn truncated_kernel(v: Complex64, eta: f64) -> Complex64 {
    let d = v.norm();
    if d == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let t = CutoffProfile::value(d / eta);
    if t == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    plain_kernel(v.re, v.im) * t
}

/// Table of kernel values over integer displacements `[-w, w]^2`.
struct KernelTable {
    w: usize,
    values: Vec<Complex64>,
}

impl KernelTable {
    fn build<K>(w: usize, h: f64, kernel: K) -> Self
    where
        K: Fn(f64, f64) -> Complex64 + Sync,
    {
        let side = 2 * w + 1;
        let mut values = vec![Complex64::new(0.0, 0.0); side * side];
        values
            .par_chunks_mut(side)
            .enumerate()
            .for_each(|(row, chunk)| {
                let dy = (row as i64 - w as i64) as f64 * h;
                for (col, slot) in chunk.iter_mut().enumerate() {
                    let dx = (col as i64 - w as i64) as f64 * h;
                    *slot = if dx == 0.0 && dy == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        kernel(dx, dy)
                    };
                }
            });
        Self { w, values }
    }

    fn truncated(w: usize, h: f64, eta: f64) -> Self {
        Self::build(w, h, |dx, dy| {
            let d = dx.hypot(dy);
            let t = CutoffProfile::value(d / eta);
            if t == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                plain_kernel(dx, dy) * t
            }
        })
    }
}

/// `out(z) = h^2 sum_{u != z, |z-u| <= w*h} table(z-u) f(u)`, clipped at the
/// window edges (no wrap-around). Output samples are independent and the
/// inner summation order is fixed, so results are deterministic under any
/// parallel split.
fn kernel_convolution(f: &ComplexField, table: &KernelTable) -> ComplexField {
    let spec = *f.spec();
    let n = spec.n();
    let w = table.w as i64;
    let side = 2 * table.w + 1;
    let cell = spec.cell_area();
    let vals = f.values();
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    out.par_chunks_mut(n).enumerate().for_each(|(zy, out_row)| {
        let zy = zy as i64;
        let y_lo = (zy - w).max(0) as usize;
        let y_hi = ((zy + w) as usize).min(n - 1);
        for (zx, slot) in out_row.iter_mut().enumerate() {
            let zx = zx as i64;
            let x_lo = (zx - w).max(0) as usize;
            let x_hi = ((zx + w) as usize).min(n - 1);
            let mut acc_re = 0.0_f64;
            let mut acc_im = 0.0_f64;
            for uy in y_lo..=y_hi {
                let trow = ((zy - uy as i64 + w) as usize) * side;
                let f_row = &vals[uy * n + x_lo..=uy * n + x_hi];
                // table index runs backwards as ux increases
                let t_base = (zx - x_lo as i64 + w) as usize;
                for (k, fv) in f_row.iter().enumerate() {
                    let t = table.values[trow + t_base - k];
                    acc_re += t.re * fv.re - t.im * fv.im;
                    acc_im += t.re * fv.im + t.im * fv.re;
                }
            }
            *slot = Complex64::new(acc_re * cell, acc_im * cell);
        }
    });
    ComplexField::from_raw(spec, out)
}

/// Direct quadrature of the smoothly truncated transform: for every `z`,
/// `h^2 sum_u K_B(z,u) phi(|z-u|/eta) f(u)` over all window samples.
pub fn beurling_quadrature(f: &ComplexField, eta: TruncationScale) -> ComplexField {
    let spec = f.spec();
    let table = KernelTable::truncated(spec.n() - 1, spec.spacing(), eta.eta());
    kernel_convolution(f, &table)
}

/// Pointwise gap `|[b, B_eta]f(z) - [b, B_ref]f(z)|` where the reference is
/// the finest truncation `eta_ref = 2h`. The two truncated kernels agree
/// beyond `eta`, so only the difference kernel (supported on `|v| < eta`)
/// is summed.
pub fn commutator_truncation_gap(
    b: &ComplexField,
    f: &ComplexField,
    eta: TruncationScale,
) -> Result<RealField> {
    let spec = *f.spec();
    assert_eq!(b.spec(), &spec, "grid mismatch");
    let h = spec.spacing();
    let eta_ref = TruncationScale::finest(&spec).eta();
    let w = ((eta.eta() / h).ceil() as usize).min(spec.n() - 1);
    let table = KernelTable::build(w, h, |dx, dy| {
        let d = dx.hypot(dy);
        let t = CutoffProfile::value(d / eta.eta()) - CutoffProfile::value(d / eta_ref);
        if t == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            plain_kernel(dx, dy) * t
        }
    });
    let bf = b.pointwise_mul(f);
    let conv_f = kernel_convolution(f, &table);
    let conv_bf = kernel_convolution(&bf, &table);
    let values = b
        .values()
        .iter()
        .zip(conv_f.values())
        .zip(conv_bf.values())
        .map(|((bz, cf), cbf)| (bz * cf - cbf).norm())
        .collect();
    RealField::from_values(spec, values)
}

/// Pointwise maximum of `|B_eta f|` over a finite list of scales.
pub fn beurling_maximal(f: &ComplexField, scales: &[TruncationScale]) -> Result<RealField> {
    if scales.is_empty() {
        return Err(Error::EmptyScales);
    }
    let spec = *f.spec();
    let mut out = vec![0.0_f64; spec.len()];
    for scale in scales {
        let transformed = beurling_quadrature(f, *scale);
        for (slot, v) in out.iter_mut().zip(transformed.values()) {
            let m = v.norm();
            if m > *slot {
                *slot = m;
            }
        }
    }
    RealField::from_values(spec, out)
}

/// Hardy–Littlewood maximal function over a declared family: at each sample
/// the maximum of the mean of `|f|` over the family squares containing it.
/// The single-sample cell mean `|f(z)|` always participates as a floor, so
/// the value is total, conservative, and monotone under family enlargement.
pub fn hl_maximal(f: &ComplexField, family: &SquareFamily) -> RealField {
    let spec = *f.spec();
    let n = spec.n();
    let mut out: Vec<f64> = f.values().iter().map(|v| v.norm()).collect();
    for q in family.squares() {
        let (x_lo, x_hi, y_lo, y_hi) = q.index_ranges(&spec);
        if x_hi <= x_lo || y_hi <= y_lo {
            continue;
        }
        let mut sum = 0.0_f64;
        for jy in y_lo..y_hi {
            for jx in x_lo..x_hi {
                sum += f.values()[jy * n + jx].norm();
            }
        }
        let mean = sum / ((x_hi - x_lo) * (y_hi - y_lo)) as f64;
        for jy in y_lo..y_hi {
            for jx in x_lo..x_hi {
                let slot = &mut out[jy * n + jx];
                if mean > *slot {
                    *slot = mean;
                }
            }
        }
    }
    RealField::from_values(spec, out).expect("means of finite fields are finite")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Square;

    fn spec(n: usize, l: f64) -> GridSpec {
        GridSpec::new(n, l).unwrap()
    }

    /// Fourier mode with integer frequencies `(kx, ky)`.
    fn mode(g: GridSpec, kx: i32, ky: i32) -> ComplexField {
        let l = g.half_width();
        ComplexField::from_fn(g, |z| {
            let phase = PI / l * (kx as f64 * z.re + ky as f64 * z.im);
            Complex64::new(phase.cos(), phase.sin())
        })
        .unwrap()
    }

    fn max_diff(a: &ComplexField, b: &ComplexField) -> f64 {
        a.values()
            .iter()
            .zip(b.values())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn multiplier_on_axis_modes() {
        let g = spec(32, 1.0);
        // xi real: m = 1, transform is the identity on the mode.
        let fx = mode(g, 1, 0);
        assert!(max_diff(&beurling(&fx), &fx) < 1e-12);
        // xi imaginary: m = -1.
        let fy = mode(g, 0, 1);
        assert!(max_diff(&beurling(&fy), &fy.scaled(Complex64::new(-1.0, 0.0))) < 1e-12);
    }

    #[test]
    fn multiplier_diagonal_mode_is_minus_i() {
        let g = spec(32, 1.0);
        let f = mode(g, 1, 1);
        let expected = f.scaled(Complex64::new(0.0, -1.0));
        assert!(max_diff(&beurling(&f), &expected) < 1e-12);
    }

    #[test]
    fn power_one_matches_beurling_exactly() {
        let g = spec(32, 2.0);
        let f = mode(g, 2, -1);
        let a = beurling(&f);
        let b = beurling_power(&f, 1).unwrap();
        assert_eq!(a.values(), b.values());
    }

    #[test]
    fn power_two_matches_composition() {
        let g = spec(64, 2.0);
        let f = crate::fields::band_limited(g, 7, 6);
        let twice = beurling(&beurling(&f));
        let pow = beurling_power(&f, 2).unwrap();
        let rel = twice.sub(&pow).l2_norm() / f.l2_norm();
        assert!(rel < 1e-12, "rel = {rel}");
    }

    #[test]
    fn power_zero_rejected() {
        let g = spec(32, 1.0);
        let f = ComplexField::zeros(g);
        assert!(matches!(beurling_power(&f, 0), Err(Error::ZeroPower)));
    }

    #[test]
    fn isometry_on_mean_zero_fields() {
        let g = spec(64, 2.0);
        for seed in 0..3u64 {
            let f = crate::fields::band_limited(g, seed, 8);
            let ratio = beurling(&f).l2_norm() / f.l2_norm();
            assert!((ratio - 1.0).abs() < 1e-10, "ratio = {ratio}");
        }
    }

    #[test]
    fn wirtinger_matches_analytic_derivative() {
        let g = spec(64, 1.5);
        let l = g.half_width();
        let f = mode(g, 3, -2);
        // f = exp(i pi (3x - 2y)/L): dz f = (i/2)(3 - (-2) i) pi/L f
        let factor = Complex64::new(0.0, 0.5) * Complex64::new(3.0, 2.0) * PI / l;
        let expected = f.scaled(factor);
        let got = wirtinger(&f, WirtingerKind::Dz);
        let rel = max_diff(&got, &expected) / factor.norm();
        assert!(rel < 1e-10, "rel = {rel}");
        let factor_bar = Complex64::new(0.0, 0.5) * Complex64::new(3.0, -2.0) * PI / l;
        let got_bar = wirtinger(&f, WirtingerKind::DzBar);
        assert!(max_diff(&got_bar, &f.scaled(factor_bar)) / factor_bar.norm() < 1e-10);
    }

    #[test]
    fn wirtinger_of_constant_vanishes() {
        let g = spec(32, 1.0);
        let f = ComplexField::constant(g, Complex64::new(2.5, -1.0));
        assert!(wirtinger(&f, WirtingerKind::Dz).l2_norm() < 1e-12);
        assert!(wirtinger(&f, WirtingerKind::DzBar).l2_norm() < 1e-12);
    }

    #[test]
    fn cauchy_identities() {
        let g = spec(64, 2.0);
        let gfield = crate::fields::band_limited(g, 11, 7);
        let c = cauchy(&gfield);
        let back = wirtinger(&c, WirtingerKind::DzBar);
        let rel = back.sub(&gfield).l2_norm() / gfield.l2_norm();
        assert!(rel < 1e-10, "dbar o C rel = {rel}");
        let dz = wirtinger(&c, WirtingerKind::Dz);
        let rel2 = dz.sub(&beurling(&gfield)).l2_norm() / gfield.l2_norm();
        assert!(rel2 < 1e-10, "dz o C rel = {rel2}");
    }

    #[test]
    fn cauchy_of_zero_is_zero() {
        let g = spec(32, 1.0);
        assert_eq!(cauchy(&ComplexField::zeros(g)).l2_norm(), 0.0);
    }

    #[test]
    fn cutoff_profile_shape() {
        assert_eq!(CutoffProfile::value(0.2), 0.0);
        assert_eq!(CutoffProfile::value(0.5), 0.0);
        assert_eq!(CutoffProfile::value(1.0), 1.0);
        assert_eq!(CutoffProfile::value(3.0), 1.0);
        let mut prev = 0.0;
        for i in 0..=40 {
            let t = 0.4 + 0.7 * i as f64 / 40.0;
            let v = CutoffProfile::value(t);
            assert!((0.0..=1.0).contains(&v));
            assert!(v >= prev - 1e-15, "not nondecreasing at t = {t}");
            prev = v;
        }
    }

    #[test]
    fn truncation_scale_guard() {
        let g = spec(32, 1.0);
        let h = g.spacing();
        assert!(TruncationScale::new(2.0 * h, &g).is_ok());
        assert!(TruncationScale::new(1.5 * h, &g).is_err());
    }

    #[test]
    fn kernel_value_at_unit_displacement() {
        let k = plain_kernel(1.0, 0.0);
        assert!((k.re + 1.0 / PI).abs() < 1e-15);
        assert!(k.im.abs() < 1e-15);
    }

    #[test]
    fn quadrature_of_zero_is_zero() {
        let g = spec(32, 1.0);
        let f = ComplexField::zeros(g);
        let eta = TruncationScale::finest(&g);
        assert_eq!(beurling_quadrature(&f, eta).l2_norm(), 0.0);
    }

    #[test]
    fn quadrature_far_field_asymptotics() {
        let g = spec(128, 4.0);
        let q = Square::new(Complex64::new(0.0, 0.0), 0.25).unwrap();
        let f = ComplexField::from_fn(g, |z| {
            if q.contains_point(z) {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .unwrap();
        let out = beurling_quadrature(&f, TruncationScale::finest(&g));
        for &(zx, zy) in &[(2.5, 0.0), (0.0, -2.5), (2.0, 2.0)] {
            let jx = ((zx + 4.0) / g.spacing()).round() as usize;
            let jy = ((zy + 4.0) / g.spacing()).round() as usize;
            let got = out.get(jx, jy).norm();
            let z2 = zx * zx + zy * zy;
            let predicted = q.area() / (PI * z2);
            assert!(
                (got - predicted).abs() <= 0.2 * predicted,
                "far field at ({zx},{zy}): got {got}, predicted {predicted}"
            );
        }
    }

    #[test]
    fn gap_vanishes_for_constant_symbol() {
        let g = spec(64, 2.0);
        let b = ComplexField::constant(g, Complex64::new(3.0, 0.0));
        let f = crate::fields::band_limited(g, 3, 6);
        let eta = TruncationScale::new(8.0 * g.spacing(), &g).unwrap();
        let gap = commutator_truncation_gap(&b, &f, eta).unwrap();
        assert!(gap.max_abs() < 1e-12 * f.l2_norm());
    }

    #[test]
    fn gap_vanishes_for_zero_field() {
        let g = spec(64, 2.0);
        let b = crate::fields::band_limited_real(g, 5, 4);
        let f = ComplexField::zeros(g);
        let eta = TruncationScale::new(4.0 * g.spacing(), &g).unwrap();
        let gap = commutator_truncation_gap(&b, &f, eta).unwrap();
        assert_eq!(gap.max_abs(), 0.0);
    }

    #[test]
    fn gap_matches_two_full_quadratures() {
        let g = spec(32, 1.0);
        let b = crate::fields::band_limited_real(g, 2, 3);
        let f = crate::fields::band_limited(g, 9, 3);
        let eta = TruncationScale::new(6.0 * g.spacing(), &g).unwrap();
        let fine = TruncationScale::finest(&g);
        let commutator = |scale: TruncationScale, field: &ComplexField| {
            let t1 = beurling_quadrature(field, scale);
            let t2 = beurling_quadrature(&b.pointwise_mul(field), scale);
            b.pointwise_mul(&t1).sub(&t2)
        };
        let reference = commutator(eta, &f).sub(&commutator(fine, &f));
        let gap = commutator_truncation_gap(&b, &f, eta).unwrap();
        for (g1, g2) in gap.values().iter().zip(reference.values()) {
            assert!((g1 - g2.norm()).abs() < 1e-10);
        }
    }

    #[test]
    fn maximal_single_scale_and_monotonicity() {
        let g = spec(32, 1.0);
        let f = crate::fields::band_limited(g, 4, 4);
        let s1 = TruncationScale::new(2.0 * g.spacing(), &g).unwrap();
        let s2 = TruncationScale::new(4.0 * g.spacing(), &g).unwrap();
        let single = beurling_maximal(&f, &[s1]).unwrap();
        let b1 = beurling_quadrature(&f, s1);
        for (m, v) in single.values().iter().zip(b1.values()) {
            assert_eq!(*m, v.norm());
        }
        let both = beurling_maximal(&f, &[s1, s2]).unwrap();
        for (a, b) in single.values().iter().zip(both.values()) {
            assert!(b >= a);
        }
        assert!(beurling_maximal(&f, &[]).is_err());
    }

    #[test]
    fn hl_maximal_of_constant() {
        let g = spec(32, 2.0);
        let f = ComplexField::constant(g, Complex64::new(-2.0, 0.0));
        let fam = SquareFamily::dyadic_centered(&g, 1..=3).unwrap();
        let m = hl_maximal(&f, &fam);
        for v in m.values() {
            assert!((v - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn hl_maximal_far_field_decay() {
        let g = spec(128, 4.0);
        let q = Square::new(Complex64::new(0.0, 0.0), 0.25).unwrap();
        let f = ComplexField::from_fn(g, |z| {
            if q.contains_point(z) {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .unwrap();
        let fam = SquareFamily::dyadic_centered(&g, 0..=4).unwrap();
        let m = hl_maximal(&f, &fam);
        // dist ~ d from the support: best covering square has half-side ~ d.
        let d = 2.0;
        let jx = ((d + 4.0) / g.spacing()).round() as usize;
        let jy = (4.0 / g.spacing()).round() as usize;
        let got = m.values()[jy * g.n() + jx];
        let predicted = q.area() / (4.0 * d * d);
        assert!(got >= predicted / 4.0 && got <= predicted * 4.0, "got {got} predicted {predicted}");
    }

    #[test]
    fn hl_maximal_monotone_in_family() {
        let g = spec(64, 2.0);
        let f = crate::fields::band_limited(g, 12, 5);
        let small = SquareFamily::dyadic_centered(&g, 1..=2).unwrap();
        let large = small.merged(&SquareFamily::dyadic_cover(&g, 1..=3).unwrap());
        let a = hl_maximal(&f, &small);
        let b = hl_maximal(&f, &large);
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!(y >= x);
        }
    }
}
