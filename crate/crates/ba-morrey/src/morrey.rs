//! Weighted Morrey norms over declared square families and the
//! total-boundedness diagnostics (norm, tail, translation modulus).

use crate::error::{Error, Result};
use crate::family::SquareFamily;
use crate::grid::{ComplexField, Square};
use crate::weights::{weighted_measure, Weight};
use rustfft::num_complex::Complex64;

/// The pair `(p, kappa)` indexing the space: `p` in `(1, inf)`, `kappa`
/// in `(0, 1)`, both strict.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MorreyParams {
    p: f64,
    kappa: f64,
}

impl MorreyParams {
    pub fn new(p: f64, kappa: f64) -> Result<Self> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::InvalidExponent(p));
        }
        if !(kappa > 0.0 && kappa < 1.0) {
            return Err(Error::InvalidKappa(kappa));
        }
        Ok(Self { p, kappa })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }
}

/// Inner integral of the norm: `(h^2 sum_{z in Q} |f|^p w)^{1/p}`.
pub fn weighted_lp_over_square(
    f: &ComplexField,
    w: &Weight,
    square: &Square,
    p: f64,
) -> Result<f64> {
    let spec = f.spec();
    assert_eq!(spec, w.spec(), "grid mismatch");
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
        let row = jy * n;
        for jx in x_lo..x_hi {
            sum += f.values()[row + jx].norm().powf(p) * w.values()[row + jx];
        }
    }
    Ok((sum * spec.cell_area()).powf(1.0 / p))
}

/// Single-square term `[w(Q)]^{-kappa/p} (int_Q |f|^p w)^{1/p}`.
pub fn morrey_term(
    f: &ComplexField,
    w: &Weight,
    params: &MorreyParams,
    square: &Square,
) -> Result<f64> {
    let lp = weighted_lp_over_square(f, w, square, params.p)?;
    let wq = weighted_measure(w, square)?;
    Ok(lp / wq.powf(params.kappa / params.p))
}

/// Norm over the declared family: the maximum of the per-square terms.
pub fn morrey_norm(
    f: &ComplexField,
    w: &Weight,
    params: &MorreyParams,
    family: &SquareFamily,
) -> Result<f64> {
    let mut best = 0.0_f64;
    for q in family.squares() {
        let term = morrey_term(f, w, params, q)?;
        if term > best {
            best = term;
        }
    }
    Ok(best)
}

/// Per-field total-boundedness diagnostics.
#[derive(Debug, Clone)]
pub struct FkTriple {
    /// (i) the norm itself.
    pub norm: f64,
    /// (ii) the norm of `f` restricted to `|z| > tail_radius`.
    pub tail: f64,
    /// (iii) the largest translation increment over the declared shifts.
    pub equicontinuity: f64,
}

/// Evaluate the three relative-compactness diagnostics for each field:
/// boundedness, uniform vanishing at infinity past `tail_radius`, and the
/// translation modulus over a declared list of grid shifts.
pub fn fk_diagnostics(
    fields: &[ComplexField],
    w: &Weight,
    params: &MorreyParams,
    family: &SquareFamily,
    tail_radius: f64,
    shifts: &[Complex64],
) -> Result<Vec<FkTriple>> {
    let spec = w.spec();
    let h = spec.spacing();
    // Shifts must be exact grid translations; rolls are then lossless.
    let mut steps = Vec::with_capacity(shifts.len());
    for xi in shifts {
        let mx = xi.re / h;
        let my = xi.im / h;
        if (mx - mx.round()).abs() > 1e-9 || (my - my.round()).abs() > 1e-9 {
            return Err(Error::ShiftOffGrid(*xi));
        }
        steps.push((mx.round() as i64, my.round() as i64));
    }
    let mut out = Vec::with_capacity(fields.len());
    for f in fields {
        let norm = morrey_norm(f, w, params, family)?;
        let masked_values: Vec<Complex64> = f
            .values()
            .iter()
            .enumerate()
            .map(|(i, v)| if spec.point_at(i).norm() > tail_radius { *v } else { Complex64::new(0.0, 0.0) })
            .collect();
        let masked = ComplexField::from_values(*spec, masked_values)?;
        let tail = morrey_norm(&masked, w, params, family)?;
        let mut equicontinuity = 0.0_f64;
        for &(mx, my) in &steps {
            let inc = f.roll(mx, my).sub(f);
            let term = morrey_norm(&inc, w, params, family)?;
            if term > equicontinuity {
                equicontinuity = term;
            }
        }
        out.push(FkTriple { norm, tail, equicontinuity });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    fn setup() -> (GridSpec, Weight, MorreyParams, SquareFamily) {
        let spec = GridSpec::new(128, 4.0).unwrap();
        let w = Weight::power(spec, Complex64::new(0.0, 0.0), 1.0, 2.0).unwrap();
        let params = MorreyParams::new(2.0, 0.5).unwrap();
        let family = SquareFamily::dyadic_centered(&spec, 1..=3).unwrap();
        (spec, w, params, family)
    }

    #[test]
    fn params_enforce_strict_ranges() {
        assert!(MorreyParams::new(1.0, 0.5).is_err());
        assert!(MorreyParams::new(2.0, 0.0).is_err());
        assert!(MorreyParams::new(2.0, 1.0).is_err());
        assert!(MorreyParams::new(2.0, 1.5).is_err());
        assert!(MorreyParams::new(2.0, 0.5).is_ok());
    }

    #[test]
    fn lp_of_indicator_is_weighted_measure_root() {
        let (spec, w, params, _) = setup();
        let e = Square::new(Complex64::new(0.4, 0.4), 0.3).unwrap();
        let q = Square::new(Complex64::new(0.0, 0.0), 1.0).unwrap();
        let f = ComplexField::from_fn(spec, |z| {
            if e.contains_point(z) { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) }
        })
        .unwrap();
        let lp = weighted_lp_over_square(&f, &w, &q, params.p()).unwrap();
        let we = weighted_measure(&w, &e).unwrap();
        assert!((lp - we.powf(1.0 / params.p())).abs() < 1e-12);
    }

    #[test]
    fn lp_trivias() {
        let (spec, w, params, _) = setup();
        let q = Square::new(Complex64::new(0.2, -0.1), 0.7).unwrap();
        assert_eq!(
            weighted_lp_over_square(&ComplexField::zeros(spec), &w, &q, params.p()).unwrap(),
            0.0
        );
        let ones = ComplexField::constant(spec, Complex64::new(1.0, 0.0));
        let unit_w = Weight::constant(spec, 1.0, 2.0).unwrap();
        let lp = weighted_lp_over_square(&ones, &unit_w, &q, params.p()).unwrap();
        let area = (q.sample_count(&spec) as f64) * spec.cell_area();
        assert!((lp - area.powf(0.5)).abs() < 1e-12);
    }

    #[test]
    fn norm_of_single_square_indicator() {
        let (spec, w, params, _) = setup();
        let q0 = Square::new(Complex64::new(0.0, 0.0), 0.5).unwrap();
        let family = SquareFamily::new(&spec, "only-q0", vec![q0]).unwrap();
        let f = ComplexField::from_fn(spec, |z| {
            if q0.contains_point(z) { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) }
        })
        .unwrap();
        let norm = morrey_norm(&f, &w, &params, &family).unwrap();
        let wq = weighted_measure(&w, &q0).unwrap();
        let expected = wq.powf((1.0 - params.kappa()) / params.p());
        assert!((norm - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn indicator_norm_dominated_by_support_measure() {
        let (spec, w, params, family) = setup();
        let fsq = Square::new(Complex64::new(0.3, -0.2), 0.4).unwrap();
        let f = ComplexField::from_fn(spec, |z| {
            if fsq.contains_point(z) { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) }
        })
        .unwrap();
        let norm = morrey_norm(&f, &w, &params, &family).unwrap();
        let wf = weighted_measure(&w, &fsq).unwrap();
        let bound = wf.powf((1.0 - params.kappa()) / params.p());
        assert!(norm <= bound * (1.0 + 1e-9), "norm {norm} > bound {bound}");
    }

    #[test]
    fn norm_monotone_in_family_and_homogeneous() {
        let (spec, w, params, family) = setup();
        let f = crate::fields::band_limited(spec, 17, 6);
        let bigger = family.merged(&SquareFamily::dyadic_cover(&spec, 1..=2).unwrap());
        let a = morrey_norm(&f, &w, &params, &family).unwrap();
        let b = morrey_norm(&f, &w, &params, &bigger).unwrap();
        assert!(b >= a);
        let c = Complex64::new(-0.3, 1.7);
        let scaled = morrey_norm(&f.scaled(c), &w, &params, &family).unwrap();
        assert!((scaled - c.norm() * a).abs() < 1e-12 * scaled.max(1.0));
    }

    #[test]
    fn kappa_monotonicity_both_regimes() {
        let spec = GridSpec::new(128, 4.0).unwrap();
        let f = crate::fields::band_limited(spec, 8, 5);
        let lo = MorreyParams::new(2.0, 0.2).unwrap();
        let hi = MorreyParams::new(2.0, 0.8).unwrap();
        // w(Q) > 1 regime: bigger kappa shrinks the term.
        let big_q = Square::new(Complex64::new(0.0, 0.0), 2.0).unwrap();
        let w_big = Weight::constant(spec, 1.0, 2.0).unwrap();
        let fam = SquareFamily::new(&spec, "one", vec![big_q]).unwrap();
        let a = morrey_norm(&f, &w_big, &lo, &fam).unwrap();
        let b = morrey_norm(&f, &w_big, &hi, &fam).unwrap();
        assert!(b < a);
        // w(Q) < 1 regime: bigger kappa grows the term.
        let w_small = Weight::constant(spec, 1e-3, 2.0).unwrap();
        let c = morrey_norm(&f, &w_small, &lo, &fam).unwrap();
        let d = morrey_norm(&f, &w_small, &hi, &fam).unwrap();
        assert!(d > c);
    }

    #[test]
    fn fk_diagnostics_trivias() {
        let (spec, w, params, family) = setup();
        let h = spec.spacing();
        let zero = ComplexField::zeros(spec);
        let triples = fk_diagnostics(
            &[zero],
            &w,
            &params,
            &family,
            1.0,
            &[Complex64::new(0.0, 0.0), Complex64::new(h, -2.0 * h)],
        )
        .unwrap();
        assert_eq!(triples[0].norm, 0.0);
        assert_eq!(triples[0].tail, 0.0);
        assert_eq!(triples[0].equicontinuity, 0.0);

        // Support inside Q(0,1) and tail radius 4: the tail term vanishes.
        let q = Square::new(Complex64::new(0.0, 0.0), 1.0).unwrap();
        let f = ComplexField::from_fn(spec, |z| {
            if q.contains_point(z) { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) }
        })
        .unwrap();
        let triples = fk_diagnostics(&[f], &w, &params, &family, 4.0 - 1e-9, &[Complex64::new(0.0, 0.0)])
            .unwrap();
        assert_eq!(triples[0].tail, 0.0);
        assert_eq!(triples[0].equicontinuity, 0.0);
        assert!(triples[0].norm > 0.0);
    }

    #[test]
    fn fk_rejects_off_grid_shift() {
        let (spec, w, params, family) = setup();
        let f = ComplexField::zeros(spec);
        let bad = Complex64::new(spec.spacing() * 0.5, 0.0);
        assert!(fk_diagnostics(&[f], &w, &params, &family, 1.0, &[bad]).is_err());
    }
}
