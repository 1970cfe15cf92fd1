//! Periodic sampling of a square window of the complex plane, field storage,
//! square geometry and the Riemann-sum integration primitives.
//!
//! The window is `[-L, L)^2` sampled at `n` points per axis with spacing
//! `h = 2L/n`; since `n` is a power of two the product `h * n` recovers `2L`
//! exactly in f64 arithmetic. Sample `(jx, jy)` sits at
//! `z = (-L + jx*h) + i(-L + jy*h)` and is stored at flat index
//! `jy * n + jx` (x varies fastest).

use crate::error::{Error, Result};
use rustfft::num_complex::Complex64;

/// Uniform periodic grid over `[-L, L)^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    n: usize,
    half_width: f64,
}

impl GridSpec {
    /// Build a grid with `n` samples per axis (power of two, at least 8)
    /// over the window `[-half_width, half_width)^2`.
    pub fn new(n: usize, half_width: f64) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGridSize(n));
        }
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::InvalidHalfWidth(half_width));
        }
        Ok(Self { n, half_width })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Grid spacing `h = 2L/n`; exact because `n` is a power of two.
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    /// Total number of samples `n^2`.
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Cell area `h^2`, the Riemann-sum weight.
    pub fn cell_area(&self) -> f64 {
        let h = self.spacing();
        h * h
    }

    /// Sample point for axis indices `(jx, jy)`.
    pub fn point(&self, jx: usize, jy: usize) -> Complex64 {
        let h = self.spacing();
        Complex64::new(
            -self.half_width + jx as f64 * h,
            -self.half_width + jy as f64 * h,
        )
    }

    /// Flat index of `(jx, jy)`.
    pub fn index(&self, jx: usize, jy: usize) -> usize {
        debug_assert!(jx < self.n && jy < self.n);
        jy * self.n + jx
    }

    /// Axis indices of a flat index.
    pub fn axis_indices(&self, index: usize) -> (usize, usize) {
        (index % self.n, index / self.n)
    }

    /// Sample point for a flat index.
    pub fn point_at(&self, index: usize) -> Complex64 {
        let (jx, jy) = self.axis_indices(index);
        self.point(jx, jy)
    }

    /// Half-open index range `[lo, hi)` of samples with coordinate in
    /// `[a, b)` along one axis, clamped to the window.
    fn axis_range(&self, a: f64, b: f64) -> (usize, usize) {
        let h = self.spacing();
        let lo = ((a + self.half_width) / h).ceil().max(0.0);
        let hi = ((b + self.half_width) / h).ceil().min(self.n as f64);
        if hi <= lo {
            (0, 0)
        } else {
            (lo as usize, hi as usize)
        }
    }
}

/// Axis-aligned square `Q(center, r)` of side `2r`. Sample membership is
/// half-open: `z` belongs to `Q` iff `Re z` is in `[cx - r, cx + r)` and
/// `Im z` is in `[cy - r, cy + r)`, so quadrant splits tile exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Square {
    center: Complex64,
    half_side: f64,
}

impl Square {
    pub fn new(center: Complex64, half_side: f64) -> Result<Self> {
        if !(half_side > 0.0) || !half_side.is_finite() || !center.re.is_finite() || !center.im.is_finite() {
            return Err(Error::InvalidHalfSide(half_side));
        }
        Ok(Self { center, half_side })
    }

    pub fn center(&self) -> Complex64 {
        self.center
    }

    pub fn half_side(&self) -> f64 {
        self.half_side
    }

    /// Continuum area `(2r)^2`.
    pub fn area(&self) -> f64 {
        4.0 * self.half_side * self.half_side
    }

    /// Dilate about the center: `tQ = Q(z0, t*r)`.
    pub fn scaled(&self, t: f64) -> Square {
        Square { center: self.center, half_side: self.half_side * t }
    }

    /// Translate: `Q + z = Q(z0 + z, r)`.
    pub fn translated(&self, z: Complex64) -> Square {
        Square { center: self.center + z, half_side: self.half_side }
    }

    pub fn contains_point(&self, z: Complex64) -> bool {
        let r = self.half_side;
        z.re >= self.center.re - r
            && z.re < self.center.re + r
            && z.im >= self.center.im - r
            && z.im < self.center.im + r
    }

    /// Whether `other` sits inside `self` (as half-open boxes).
    pub fn contains_square(&self, other: &Square) -> bool {
        let (r, s) = (self.half_side, other.half_side);
        self.center.re - r <= other.center.re - s
            && other.center.re + s <= self.center.re + r
            && self.center.im - r <= other.center.im - s
            && other.center.im + s <= self.center.im + r
    }

    /// Whether the square's box overlaps the open window at all.
    pub fn intersects_window(&self, spec: &GridSpec) -> bool {
        let l = spec.half_width();
        let r = self.half_side;
        self.center.re - r < l
            && self.center.re + r > -l
            && self.center.im - r < l
            && self.center.im + r > -l
    }

    /// Whether the square sits inside the central half-window `Q(0, L/2)`.
    pub fn inside_half_window(&self, spec: &GridSpec) -> bool {
        let half = spec.half_width() / 2.0;
        let r = self.half_side;
        self.center.re - r >= -half
            && self.center.re + r <= half
            && self.center.im - r >= -half
            && self.center.im + r <= half
    }

    /// Index rectangle `[x_lo, x_hi) x [y_lo, y_hi)` of grid samples inside
    /// the square, clamped to the window.
    pub fn index_ranges(&self, spec: &GridSpec) -> (usize, usize, usize, usize) {
        let (x_lo, x_hi) =
            spec.axis_range(self.center.re - self.half_side, self.center.re + self.half_side);
        let (y_lo, y_hi) =
            spec.axis_range(self.center.im - self.half_side, self.center.im + self.half_side);
        (x_lo, x_hi, y_lo, y_hi)
    }

    /// Number of grid samples inside the square.
    pub fn sample_count(&self, spec: &GridSpec) -> usize {
        let (x_lo, x_hi, y_lo, y_hi) = self.index_ranges(spec);
        (x_hi - x_lo) * (y_hi - y_lo)
    }

    /// Flat indices of the samples inside the square, row by row.
    pub fn sample_indices(&self, spec: &GridSpec) -> Vec<usize> {
        let (x_lo, x_hi, y_lo, y_hi) = self.index_ranges(spec);
        let mut out = Vec::with_capacity((x_hi - x_lo) * (y_hi - y_lo));
        for jy in y_lo..y_hi {
            let row = jy * spec.n();
            for jx in x_lo..x_hi {
                out.push(row + jx);
            }
        }
        out
    }
}

impl std::fmt::Display for Square {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Q({:+.6}{:+.6}i, {:.6})", self.center.re, self.center.im, self.half_side)
    }
}

/// Complex samples of a function on the grid, row-major.
#[derive(Debug, Clone)]
pub struct ComplexField {
    spec: GridSpec,
    values: Vec<Complex64>,
}

impl ComplexField {
    /// Sample a pointwise formula; rejects non-finite values.
    pub fn from_fn<F>(spec: GridSpec, mut formula: F) -> Result<Self>
    where
        F: FnMut(Complex64) -> Complex64,
    {
        let n = spec.n();
        let mut values = Vec::with_capacity(n * n);
        for jy in 0..n {
            for jx in 0..n {
                let z = spec.point(jx, jy);
                let v = formula(z);
                if !v.re.is_finite() || !v.im.is_finite() {
                    return Err(Error::NonFiniteSample(z));
                }
                values.push(v);
            }
        }
        Ok(Self { spec, values })
    }

    /// Wrap raw values; rejects wrong length or non-finite entries.
    pub fn from_values(spec: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        assert_eq!(values.len(), spec.len(), "value buffer does not match the grid");
        for (i, v) in values.iter().enumerate() {
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::NonFiniteField(i));
            }
        }
        Ok(Self { spec, values })
    }

    pub fn constant(spec: GridSpec, c: Complex64) -> Self {
        Self { spec, values: vec![c; spec.len()] }
    }

    pub fn zeros(spec: GridSpec) -> Self {
        Self::constant(spec, Complex64::new(0.0, 0.0))
    }

    /// Internal constructor for transform outputs; finiteness is preserved
    /// by the operations that use it.
    pub(crate) fn from_raw(spec: GridSpec, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), spec.len());
        Self { spec, values }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn get(&self, jx: usize, jy: usize) -> Complex64 {
        self.values[self.spec.index(jx, jy)]
    }

    /// `true` when every imaginary part is exactly zero.
    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }

    /// Index of the first sample with a non-zero imaginary part, if any.
    pub fn first_non_real(&self) -> Option<usize> {
        self.values.iter().position(|v| v.im != 0.0)
    }

    /// Window mean `(1/|window|) h^2 sum f`.
    pub fn mean(&self) -> Complex64 {
        let sum: Complex64 = self.values.iter().sum();
        sum / self.values.len() as f64
    }

    /// `L^2` norm over the window: `(h^2 sum |f|^2)^(1/2)`.
    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        (self.spec.cell_area() * s).sqrt()
    }

    /// Pointwise product with another field on the same grid.
    pub fn pointwise_mul(&self, other: &ComplexField) -> ComplexField {
        assert_eq!(self.spec, other.spec, "grid mismatch");
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .collect();
        ComplexField { spec: self.spec, values }
    }

    pub fn scaled(&self, c: Complex64) -> ComplexField {
        ComplexField { spec: self.spec, values: self.values.iter().map(|v| v * c).collect() }
    }

    pub fn add(&self, other: &ComplexField) -> ComplexField {
        assert_eq!(self.spec, other.spec, "grid mismatch");
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        ComplexField { spec: self.spec, values }
    }

    pub fn sub(&self, other: &ComplexField) -> ComplexField {
        assert_eq!(self.spec, other.spec, "grid mismatch");
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        ComplexField { spec: self.spec, values }
    }

    /// Field of moduli.
    pub fn abs(&self) -> RealField {
        RealField { spec: self.spec, values: self.values.iter().map(|v| v.norm()).collect() }
    }

    /// Periodic translate `z -> f(z + xi)` for a grid shift `xi = (mx + i my) h`.
    pub fn roll(&self, mx: i64, my: i64) -> ComplexField {
        let n = self.spec.n() as i64;
        let mut values = Vec::with_capacity(self.values.len());
        for jy in 0..n {
            let sy = (jy + my).rem_euclid(n) as usize;
            for jx in 0..n {
                let sx = (jx + mx).rem_euclid(n) as usize;
                values.push(self.values[sy * n as usize + sx]);
            }
        }
        ComplexField { spec: self.spec, values }
    }
}

/// Real samples on the grid (weights, maximal functions, |Df|).
#[derive(Debug, Clone)]
pub struct RealField {
    spec: GridSpec,
    values: Vec<f64>,
}

impl RealField {
    pub fn from_fn<F>(spec: GridSpec, mut formula: F) -> Result<Self>
    where
        F: FnMut(Complex64) -> f64,
    {
        let n = spec.n();
        let mut values = Vec::with_capacity(n * n);
        for jy in 0..n {
            for jx in 0..n {
                let z = spec.point(jx, jy);
                let v = formula(z);
                if !v.is_finite() {
                    return Err(Error::NonFiniteSample(z));
                }
                values.push(v);
            }
        }
        Ok(Self { spec, values })
    }

    pub fn from_values(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        assert_eq!(values.len(), spec.len(), "value buffer does not match the grid");
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFiniteField(i));
            }
        }
        Ok(Self { spec, values })
    }

    pub fn constant(spec: GridSpec, c: f64) -> Self {
        Self { spec, values: vec![c; spec.len()] }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn to_complex(&self) -> ComplexField {
        ComplexField {
            spec: self.spec,
            values: self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }

    pub fn add(&self, other: &RealField) -> RealField {
        assert_eq!(self.spec, other.spec, "grid mismatch");
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        RealField { spec: self.spec, values }
    }
}

fn require_samples(square: &Square, spec: &GridSpec) -> Result<Vec<usize>> {
    if !square.intersects_window(spec) {
        return Err(Error::OutsideWindow(square.to_string()));
    }
    let idx = square.sample_indices(spec);
    if idx.is_empty() {
        return Err(Error::EmptySquare(square.to_string()));
    }
    Ok(idx)
}

/// Riemann sum `h^2 sum_{z in Q} f(z)` over the samples inside `Q` (clipped
/// to the window). Errors when `Q` misses the window entirely.
pub fn integrate_over_square(f: &ComplexField, square: &Square) -> Result<Complex64> {
    let spec = f.spec();
    if !square.intersects_window(spec) {
        return Err(Error::OutsideWindow(square.to_string()));
    }
    let (x_lo, x_hi, y_lo, y_hi) = square.index_ranges(spec);
    let mut sum = Complex64::new(0.0, 0.0);
    for jy in y_lo..y_hi {
        let row = &f.values()[jy * spec.n() + x_lo..jy * spec.n() + x_hi];
        for v in row {
            sum += v;
        }
    }
    Ok(sum * spec.cell_area())
}

/// Discrete average over the samples in `Q`. Anchoring the sum on the first
/// sample keeps constant fields exactly constant under averaging.
pub fn mean_over_square(f: &ComplexField, square: &Square) -> Result<Complex64> {
    let spec = f.spec();
    let idx = require_samples(square, spec)?;
    let anchor = f.values()[idx[0]];
    let mut dev = Complex64::new(0.0, 0.0);
    for &i in &idx {
        dev += f.values()[i] - anchor;
    }
    Ok(anchor + dev / idx.len() as f64)
}

/// Samples of `Q` (errors when empty or fully outside).
pub fn samples_in_square(spec: &GridSpec, square: &Square) -> Result<Vec<usize>> {
    require_samples(square, spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: usize, l: f64) -> GridSpec {
        GridSpec::new(n, l).unwrap()
    }

    #[test]
    fn make_grid_spacing() {
        assert_eq!(spec(8, 1.0).spacing(), 0.25);
        assert_eq!(spec(256, 4.0).spacing(), 0.03125);
        assert_eq!(spec(8, 1.0).spacing() * 8.0, 2.0);
    }

    #[test]
    fn make_grid_rejects_bad_sizes() {
        assert!(GridSpec::new(10, 1.0).is_err());
        assert!(GridSpec::new(4, 1.0).is_err());
        assert!(GridSpec::new(8, 0.0).is_err());
        assert!(GridSpec::new(8, -1.0).is_err());
    }

    #[test]
    fn sample_corner_and_constants() {
        let g = spec(8, 1.0);
        let f = ComplexField::from_fn(g, |z| z).unwrap();
        assert_eq!(f.get(0, 0), Complex64::new(-1.0, -1.0));
        let ones = ComplexField::from_fn(g, |_| Complex64::new(1.0, 0.0)).unwrap();
        assert!(ones.values().iter().all(|v| *v == Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn sample_rejects_singular_formula() {
        let g = spec(8, 1.0);
        // The grid contains z = 0, where 1/z blows up.
        let r = ComplexField::from_fn(g, |z| Complex64::new(1.0, 0.0) / z);
        assert!(r.is_err());
    }

    #[test]
    fn integrate_constant_matches_area() {
        let g = spec(256, 4.0);
        let f = ComplexField::constant(g, Complex64::new(1.0, 0.0));
        let q = Square::new(Complex64::new(0.3, -0.2), 0.7).unwrap();
        let v = integrate_over_square(&f, &q).unwrap();
        // One cell layer of boundary slack.
        let h = g.spacing();
        assert!((v.re - q.area()).abs() < 4.0 * 2.0 * q.half_side() * h + h * h);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn integrate_zero_field() {
        let g = spec(64, 2.0);
        let f = ComplexField::zeros(g);
        let q = Square::new(Complex64::new(0.0, 0.0), 0.5).unwrap();
        assert_eq!(integrate_over_square(&f, &q).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn integrate_odd_symmetry_is_exact() {
        let g = spec(64, 2.0);
        let f = ComplexField::from_fn(g, |z| Complex64::new(z.re, 0.0)).unwrap();
        // Radius strictly between grid multiples: the half-open membership
        // then yields a sample set symmetric about the center.
        let h = g.spacing();
        let q = Square::new(Complex64::new(0.0, 0.0), 0.5 + h / 2.0).unwrap();
        let v = integrate_over_square(&f, &q).unwrap();
        assert_eq!(v.re, 0.0);
    }

    #[test]
    fn integrate_outside_window_errors() {
        let g = spec(64, 2.0);
        let f = ComplexField::zeros(g);
        let q = Square::new(Complex64::new(10.0, 10.0), 0.5).unwrap();
        assert!(integrate_over_square(&f, &q).is_err());
    }

    #[test]
    fn mean_reproduces_constants_exactly() {
        let g = spec(64, 2.0);
        let c = Complex64::new(0.1234567890123, -9.87654321e-3);
        let f = ComplexField::constant(g, c);
        for &(cx, cy, r) in &[(0.0, 0.0, 0.37), (-1.1, 0.9, 0.61), (0.013, -0.77, 1.3)] {
            let q = Square::new(Complex64::new(cx, cy), r).unwrap();
            assert_eq!(mean_over_square(&f, &q).unwrap(), c);
        }
    }

    #[test]
    fn mean_indicator_left_half() {
        let g = spec(256, 2.0);
        let q = Square::new(Complex64::new(0.0, 0.0), 0.5).unwrap();
        let f = ComplexField::from_fn(g, |z| {
            if q.contains_point(z) && z.re < 0.0 {
                Complex64::new(1.0, 0.0)
            } else if q.contains_point(z) {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .unwrap();
        let m = mean_over_square(&f, &q).unwrap().re;
        let count = q.sample_count(&g) as f64;
        assert!((m - 0.5).abs() <= 2.0 / count.sqrt());
    }

    #[test]
    fn quadrant_split_tiles_exactly() {
        let g = spec(64, 2.0);
        let q = Square::new(Complex64::new(0.17, -0.23), 0.815).unwrap();
        let r = q.half_side() / 2.0;
        let mut all: Vec<usize> = Vec::new();
        for &(sx, sy) in &[(-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0), (1.0, 1.0)] {
            let sub = Square::new(q.center() + Complex64::new(sx * r, sy * r), r).unwrap();
            all.extend(sub.sample_indices(&g));
        }
        all.sort_unstable();
        let mut parent = q.sample_indices(&g);
        parent.sort_unstable();
        assert_eq!(all, parent);
    }

    #[test]
    fn roll_round_trips() {
        let g = spec(16, 1.0);
        let f = ComplexField::from_fn(g, |z| z * z + Complex64::new(0.3, 0.0)).unwrap();
        let rolled = f.roll(5, -3).roll(-5, 3);
        for (a, b) in f.values().iter().zip(rolled.values()) {
            assert_eq!(a, b);
        }
    }
}
