//! Muckenhoupt weights: construction, weighted measures, the family
//! estimate of the characteristic constant, and the absolute-continuity /
//! doubling diagnostics.

use crate::error::{Error, Result};
use crate::family::SquareFamily;
use crate::grid::{GridSpec, RealField, Square};
use rustfft::num_complex::Complex64;

/// Declared weight class, carried for reporting.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightClass {
    Constant(f64),
    /// `|z - center|^alpha`; in the plane this is an A_p weight exactly for
    /// `-2 < alpha < 2(p-1)`.
    Power { center: Complex64, alpha: f64 },
    /// Product of two power factors.
    PowerProduct { centers: [Complex64; 2], alphas: [f64; 2] },
    Custom,
}

impl std::fmt::Display for WeightClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            WeightClass::Constant(c) => write!(f, "constant({c})"),
            WeightClass::Power { center, alpha } => {
                write!(f, "|z-({:+.3}{:+.3}i)|^{}", center.re, center.im, alpha)
            }
            WeightClass::PowerProduct { centers, alphas } => write!(
                f,
                "|z-({:+.3}{:+.3}i)|^{} * |z-({:+.3}{:+.3}i)|^{}",
                centers[0].re, centers[0].im, alphas[0], centers[1].re, centers[1].im, alphas[1]
            ),
            WeightClass::Custom => write!(f, "custom"),
        }
    }
}

/// A strictly positive field together with its declared exponent `p`.
#[derive(Debug, Clone)]
pub struct Weight {
    values: RealField,
    p: f64,
    class: WeightClass,
}

fn check_exponent(p: f64) -> Result<()> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::InvalidExponent(p));
    }
    Ok(())
}

/// Cell average by 16x16 local refinement; used at samples where a power
/// factor is singular so the field stays finite and positive.
fn refined_cell_average<F>(spec: &GridSpec, z: Complex64, f: F) -> f64
where
    F: Fn(Complex64) -> f64,
{
    let h = spec.spacing();
    let mut sum = 0.0;
    for iy in 0..16 {
        for ix in 0..16 {
            let dx = ((ix as f64 + 0.5) / 16.0 - 0.5) * h;
            let dy = ((iy as f64 + 0.5) / 16.0 - 0.5) * h;
            sum += f(z + Complex64::new(dx, dy));
        }
    }
    sum / 256.0
}

impl Weight {
    pub fn constant(spec: GridSpec, c: f64, p: f64) -> Result<Self> {
        check_exponent(p)?;
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::NonPositiveWeight { index: 0, value: c });
        }
        Ok(Self { values: RealField::constant(spec, c), p, class: WeightClass::Constant(c) })
    }

    /// Power weight `|z - center|^alpha`. The sample coinciding with the
    /// center is replaced by the refined cell average of the weight.
    pub fn power(spec: GridSpec, center: Complex64, alpha: f64, p: f64) -> Result<Self> {
        check_exponent(p)?;
        let field = RealField::from_fn(spec, |z| {
            let d = (z - center).norm();
            if d == 0.0 {
                refined_cell_average(&spec, z, |u| (u - center).norm().powf(alpha))
            } else {
                d.powf(alpha)
            }
        })?;
        let w = Self { values: field, p, class: WeightClass::Power { center, alpha } };
        w.validate_positive()?;
        Ok(w)
    }

    pub fn power_product(
        spec: GridSpec,
        centers: [Complex64; 2],
        alphas: [f64; 2],
        p: f64,
    ) -> Result<Self> {
        check_exponent(p)?;
        let raw = move |z: Complex64| {
            (z - centers[0]).norm().powf(alphas[0]) * (z - centers[1]).norm().powf(alphas[1])
        };
        let field = RealField::from_fn(spec, |z| {
            if (z - centers[0]).norm() == 0.0 || (z - centers[1]).norm() == 0.0 {
                refined_cell_average(&spec, z, raw)
            } else {
                raw(z)
            }
        })?;
        let w = Self { values: field, p, class: WeightClass::PowerProduct { centers, alphas } };
        w.validate_positive()?;
        Ok(w)
    }

    /// Wrap an arbitrary positive field.
    pub fn from_field(values: RealField, p: f64) -> Result<Self> {
        check_exponent(p)?;
        let w = Self { values, p, class: WeightClass::Custom };
        w.validate_positive()?;
        Ok(w)
    }

    fn validate_positive(&self) -> Result<()> {
        for (i, &v) in self.values.values().iter().enumerate() {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::NonPositiveWeight { index: i, value: v });
            }
        }
        Ok(())
    }

    pub fn spec(&self) -> &GridSpec {
        self.values.spec()
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Dual exponent `p' = p/(p-1)`.
    pub fn p_dual(&self) -> f64 {
        self.p / (self.p - 1.0)
    }

    pub fn class(&self) -> &WeightClass {
        &self.class
    }

    pub fn values(&self) -> &[f64] {
        self.values.values()
    }

    pub fn field(&self) -> &RealField {
        &self.values
    }

    /// Rescale by a positive constant (the characteristic constant is
    /// invariant under this).
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(Error::NonPositiveWeight { index: 0, value: c });
        }
        let values = RealField::from_values(
            *self.values.spec(),
            self.values.values().iter().map(|v| v * c).collect(),
        )?;
        Ok(Self { values, p: self.p, class: WeightClass::Custom })
    }
}

/// `w(Q) = h^2 sum_{z in Q} w(z)`; strictly positive.
pub fn weighted_measure(w: &Weight, square: &Square) -> Result<f64> {
    let spec = w.spec();
    if !square.intersects_window(spec) {
        return Err(Error::OutsideWindow(square.to_string()));
    }
    let (x_lo, x_hi, y_lo, y_hi) = square.index_ranges(spec);
    if x_hi <= x_lo || y_hi <= y_lo {
        return Err(Error::EmptySquare(square.to_string()));
    }
    let n = spec.n();
    let mut sum = 0.0;
    for jy in y_lo..y_hi {
        for &v in &w.values()[jy * n + x_lo..jy * n + x_hi] {
            sum += v;
        }
    }
    Ok(sum * spec.cell_area())
}

/// Per-square characteristic term and the family maximum.
#[derive(Debug, Clone)]
pub struct ApReport {
    pub constant: f64,
    pub terms: Vec<(Square, f64)>,
    pub family_label: String,
}

/// Family estimate of the characteristic constant
/// `max_Q <w>_Q <w^{1-p'}>_Q^{p-1}`.
pub fn ap_constant(w: &Weight, family: &SquareFamily) -> Result<ApReport> {
    let spec = w.spec();
    let n = spec.n();
    let p = w.p();
    let dual_exp = 1.0 - w.p_dual();
    let mut terms = Vec::with_capacity(family.len());
    let mut constant = 0.0_f64;
    for q in family.squares() {
        let (x_lo, x_hi, y_lo, y_hi) = q.index_ranges(spec);
        let count = ((x_hi - x_lo) * (y_hi - y_lo)) as f64;
        let mut sum = 0.0;
        let mut dual_sum = 0.0;
        for jy in y_lo..y_hi {
            for &v in &w.values()[jy * n + x_lo..jy * n + x_hi] {
                sum += v;
                dual_sum += v.powf(dual_exp);
            }
        }
        let term = (sum / count) * (dual_sum / count).powf(p - 1.0);
        if !term.is_finite() {
            return Err(Error::Overflow(q.to_string()));
        }
        terms.push((*q, term));
        if term > constant {
            constant = term;
        }
    }
    Ok(ApReport { constant, terms, family_label: family.label().to_string() })
}

/// Least-squares fit of `log(w(E)/w(Q))` against `log(|E|/|Q|)`.
#[derive(Debug, Clone)]
pub struct SigmaFit {
    pub sigma: f64,
    pub c: f64,
    /// `(log area ratio, log weight ratio)` pairs used by the fit.
    pub points: Vec<(f64, f64)>,
}

fn least_squares_slope(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in points {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Fit the exponent in `w(E)/w(Q) <= C (|E|/|Q|)^sigma` over declared
/// subsets of `Q`. Subsets equal to `Q` (ratio 1) are degenerate and are
/// excluded from the fit.
pub fn sigma_estimate(w: &Weight, square: &Square, subsets: &[Square]) -> Result<SigmaFit> {
    if subsets.len() < 2 {
        return Err(Error::DegenerateFit(subsets.len()));
    }
    let spec = w.spec();
    let wq = weighted_measure(w, square)?;
    let area_q = (square.sample_count(spec) as f64) * spec.cell_area();
    let mut points = Vec::new();
    for e in subsets {
        if !square.contains_square(e) {
            return Err(Error::OutsideWindow(format!("{e} is not a subset of {square}")));
        }
        let we = weighted_measure(w, e)?;
        let area_e = (e.sample_count(spec) as f64) * spec.cell_area();
        let x = (area_e / area_q).ln();
        if x >= -1e-12 {
            // E = Q: a point at ratio (1,1) carries no slope information.
            continue;
        }
        points.push((x, (we / wq).ln()));
    }
    if points.len() < 2 {
        return Err(Error::DegenerateFit(points.len()));
    }
    let (sigma, intercept) = least_squares_slope(&points);
    Ok(SigmaFit { sigma, c: intercept.exp(), points })
}

/// Fitted growth exponent of `t -> w(tQ)`.
#[derive(Debug, Clone)]
pub struct DoublingFit {
    pub exponent: f64,
    /// `(log t, log w(tQ))` pairs, including `t = 1`.
    pub points: Vec<(f64, f64)>,
    /// Whether the fitted exponent stays below `2p + 0.2`.
    pub pass: bool,
}

/// Fit the exponent `d` in `w(tQ) ~ t^d w(Q)` over declared dilation
/// factors; the membership diagnostic passes iff `d <= 2p + 0.2`.
pub fn doubling_check(w: &Weight, square: &Square, factors: &[f64]) -> Result<DoublingFit> {
    if factors.is_empty() {
        return Err(Error::DegenerateFit(0));
    }
    let spec = w.spec();
    let mut points = vec![(0.0, weighted_measure(w, square)?.ln())];
    for &t in factors {
        if !(t > 1.0) {
            return Err(Error::InvalidConfig(format!("dilation factor must exceed 1, got {t}")));
        }
        let tq = square.scaled(t);
        let l = spec.half_width();
        let fully_inside = tq.center().re - tq.half_side() >= -l
            && tq.center().re + tq.half_side() <= l
            && tq.center().im - tq.half_side() >= -l
            && tq.center().im + tq.half_side() <= l;
        if !fully_inside {
            return Err(Error::OutsideWindow(tq.to_string()));
        }
        points.push((t.ln(), weighted_measure(w, &tq)?.ln()));
    }
    let (exponent, _) = least_squares_slope(&points);
    Ok(DoublingFit { exponent, points, pass: exponent <= 2.0 * w.p() + 0.2 })
}
