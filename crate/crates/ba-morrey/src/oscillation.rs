//! Median values, mean oscillation, the discrete BMO norm over declared
//! families, and the three-limit vanishing-oscillation probe.

use crate::error::{Error, Result};
use crate::family::SquareFamily;
use crate::grid::{mean_over_square, samples_in_square, ComplexField, Square};

/// Lower median of the (real) samples of `f` in `Q`: the value at sorted
/// index `floor((m-1)/2)`. Any point of the median interval minimizes
/// `c -> mean_Q |f - c|`; the lower endpoint makes the choice deterministic.
/// The strict level sets then satisfy `#{f > a} <= floor(m/2)` and
/// `#{f < a} <= floor(m/2)`.
pub fn median_value(f: &ComplexField, square: &Square) -> Result<f64> {
    let idx = samples_in_square(f.spec(), square)?;
    let mut vals = Vec::with_capacity(idx.len());
    for i in idx {
        let v = f.values()[i];
        if v.im != 0.0 {
            return Err(Error::NotRealField(i));
        }
        vals.push(v.re);
    }
    vals.sort_by(|a, b| a.partial_cmp(b).expect("finite fields sort totally"));
    Ok(vals[(vals.len() - 1) / 2])
}

/// Mean oscillation: the average of `|f - <f>_Q|` over the samples of `Q`
/// (complex modulus of the deviation, so complex symbols are covered).
pub fn mean_oscillation(f: &ComplexField, square: &Square) -> Result<f64> {
    let idx = samples_in_square(f.spec(), square)?;
    let mean = mean_over_square(f, square)?;
    let sum: f64 = idx.iter().map(|&i| (f.values()[i] - mean).norm()).sum();
    Ok(sum / idx.len() as f64)
}

/// Average of `|f - c|` over the samples of `Q`, for median optimality
/// checks and the median-centered oscillation.
pub fn mean_abs_deviation(f: &ComplexField, square: &Square, c: f64) -> Result<f64> {
    let idx = samples_in_square(f.spec(), square)?;
    let sum: f64 = idx.iter().map(|&i| (f.values()[i].re - c).abs()).sum();
    Ok(sum / idx.len() as f64)
}

/// Discrete BMO norm over a declared family: the largest mean oscillation.
pub fn bmo_norm(f: &ComplexField, family: &SquareFamily) -> Result<f64> {
    let mut best = 0.0_f64;
    for q in family.squares() {
        let o = mean_oscillation(f, q)?;
        if o > best {
            best = o;
        }
    }
    Ok(best)
}

/// Per-square oscillation summary.
#[derive(Debug, Clone)]
pub struct SquareOscillation {
    pub square: Square,
    pub mean: rustfft::num_complex::Complex64,
    pub median: f64,
    pub mean_oscillation: f64,
    pub median_oscillation: f64,
}

#[derive(Debug, Clone)]
pub struct OscillationReport {
    pub per_square: Vec<SquareOscillation>,
    /// Family maximum of the mean oscillation (the BMO proxy).
    pub family_max: f64,
}

/// Mean, median, and both oscillations per family square (real fields).
pub fn oscillation_report(f: &ComplexField, family: &SquareFamily) -> Result<OscillationReport> {
    let mut per_square = Vec::with_capacity(family.len());
    let mut family_max = 0.0_f64;
    for q in family.squares() {
        let mean = mean_over_square(f, q)?;
        let median = median_value(f, q)?;
        let mean_osc = mean_oscillation(f, q)?;
        let median_osc = mean_abs_deviation(f, q, median)?;
        family_max = family_max.max(mean_osc);
        per_square.push(SquareOscillation {
            square: *q,
            mean,
            median,
            mean_oscillation: mean_osc,
            median_oscillation: median_osc,
        });
    }
    Ok(OscillationReport { per_square, family_max })
}

/// Maxima of the mean oscillation over the three declared limit families:
/// vanishing area, growing area, and far translates.
#[derive(Debug, Clone)]
pub struct CmoProbeReport {
    pub small_max: f64,
    pub large_max: f64,
    pub translate_max: f64,
}

pub fn cmo_probe(
    f: &ComplexField,
    small_area: &SquareFamily,
    large_area: &SquareFamily,
    translated: &SquareFamily,
) -> Result<CmoProbeReport> {
    Ok(CmoProbeReport {
        small_max: bmo_norm(f, small_area)?,
        large_max: bmo_norm(f, large_area)?,
        translate_max: bmo_norm(f, translated)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use rustfft::num_complex::Complex64;

    fn spec() -> GridSpec {
        GridSpec::new(128, 4.0).unwrap()
    }

    /// A 2x2-sample square holding exactly the listed values.
    fn four_sample_field(vals: [f64; 4]) -> (ComplexField, Square) {
        let g = GridSpec::new(8, 1.0).unwrap();
        let h = g.spacing();
        // Square around samples (2,2),(3,2),(2,3),(3,3).
        let q = Square::new(Complex64::new(-1.0 + 2.5 * h, -1.0 + 2.5 * h), h).unwrap();
        let mut values = vec![Complex64::new(0.0, 0.0); g.len()];
        values[g.index(2, 2)] = Complex64::new(vals[0], 0.0);
        values[g.index(3, 2)] = Complex64::new(vals[1], 0.0);
        values[g.index(2, 3)] = Complex64::new(vals[2], 0.0);
        values[g.index(3, 3)] = Complex64::new(vals[3], 0.0);
        (ComplexField::from_values(g, values).unwrap(), q)
    }

    #[test]
    fn median_of_constant_is_constant() {
        let g = spec();
        let f = ComplexField::constant(g, Complex64::new(2.5, 0.0));
        let q = Square::new(Complex64::new(0.3, 0.1), 0.7).unwrap();
        assert_eq!(median_value(&f, &q).unwrap(), 2.5);
    }

    #[test]
    fn median_lower_tie_break() {
        let (f, q) = four_sample_field([1.0, 2.0, 3.0, 4.0]);
        assert_eq!(q.sample_count(f.spec()), 4);
        assert_eq!(median_value(&f, &q).unwrap(), 2.0);
    }

    #[test]
    fn median_rejects_complex_fields() {
        let g = spec();
        let f = ComplexField::constant(g, Complex64::new(1.0, 0.5));
        let q = Square::new(Complex64::new(0.0, 0.0), 0.5).unwrap();
        assert!(matches!(median_value(&f, &q), Err(Error::NotRealField(_))));
    }

    #[test]
    fn median_minimizes_mean_abs_deviation() {
        let g = spec();
        let f = crate::fields::band_limited_real(g, 23, 6);
        let q = Square::new(Complex64::new(0.5, -0.3), 0.8).unwrap();
        let alpha = median_value(&f, &q).unwrap();
        let best = mean_abs_deviation(&f, &q, alpha).unwrap();
        // Some sample value is always a minimizer, so scanning them is an
        // exhaustive oracle.
        for &i in &samples_in_square(&g, &q).unwrap() {
            let c = f.values()[i].re;
            assert!(best <= mean_abs_deviation(&f, &q, c).unwrap() + 1e-12);
        }
    }

    #[test]
    fn median_level_set_counts() {
        let g = spec();
        let q = Square::new(Complex64::new(-0.4, 0.9), 0.6).unwrap();
        for seed in 0..5u64 {
            let f = crate::fields::band_limited_real(g, seed, 5);
            let alpha = median_value(&f, &q).unwrap();
            let idx = samples_in_square(&g, &q).unwrap();
            let m = idx.len();
            let above = idx.iter().filter(|&&i| f.values()[i].re > alpha).count();
            let below = idx.iter().filter(|&&i| f.values()[i].re < alpha).count();
            assert!(above <= m / 2, "strict above {above} > {}", m / 2);
            assert!(below <= m / 2, "strict below {below} > {}", m / 2);
        }
    }

    #[test]
    fn oscillation_constant_and_split() {
        let g = spec();
        let c = ComplexField::constant(g, Complex64::new(7.0, 0.0));
        let q = Square::new(Complex64::new(0.0, 0.0), 1.0).unwrap();
        assert_eq!(mean_oscillation(&c, &q).unwrap(), 0.0);

        // +1 on one half, -1 on the other: oscillation 1.
        let (f, q4) = four_sample_field([1.0, 1.0, -1.0, -1.0]);
        assert!((mean_oscillation(&f, &q4).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn oscillation_two_sided_median_comparison() {
        let g = spec();
        let q = Square::new(Complex64::new(0.7, 0.2), 0.9).unwrap();
        for seed in 0..5u64 {
            let f = crate::fields::band_limited_real(g, seed + 100, 6);
            let o = mean_oscillation(&f, &q).unwrap();
            let alpha = median_value(&f, &q).unwrap();
            let med = mean_abs_deviation(&f, &q, alpha).unwrap();
            assert!(med <= o + 1e-12, "median-centered exceeds mean-centered");
            assert!(o <= 2.0 * med + 1e-12, "two-sided comparison fails");
        }
    }

    #[test]
    fn bmo_norm_basics() {
        let g = spec();
        let fam = SquareFamily::dyadic_centered(&g, 1..=3).unwrap();
        let c = ComplexField::constant(g, Complex64::new(-3.0, 0.0));
        assert_eq!(bmo_norm(&c, &fam).unwrap(), 0.0);

        let f = crate::fields::truncated_log_abs(g, g.spacing());
        let norm = bmo_norm(&f, &fam).unwrap();
        assert!(norm.is_finite() && norm > 0.1);
        // Larger family: the log's oscillation stays of the same size.
        let fam2 = fam.merged(&SquareFamily::dyadic_centered(&g, 4..=5).unwrap());
        let norm2 = bmo_norm(&f, &fam2).unwrap();
        assert!(norm2 >= norm && norm2 < 2.0 * norm);

        let scaled = f.scaled(Complex64::new(-2.0, 0.0));
        assert!((bmo_norm(&scaled, &fam).unwrap() - 2.0 * norm).abs() < 1e-12);
    }

    #[test]
    fn bmo_translation_covariance_is_exact() {
        let g = spec();
        let f = crate::fields::band_limited(g, 3, 5);
        let q = Square::new(Complex64::new(-0.5, 0.25), 0.5).unwrap();
        let fam = SquareFamily::new(&g, "one", vec![q]).unwrap();
        let (mx, my) = (7i64, -4i64);
        let h = g.spacing();
        let shift = Complex64::new(mx as f64 * h, my as f64 * h);
        let rolled = f.roll(mx, my);
        let moved = SquareFamily::new(&g, "one-moved", vec![q.translated(-shift)]).unwrap();
        assert_eq!(bmo_norm(&f, &fam).unwrap(), bmo_norm(&rolled, &moved).unwrap());
    }

    #[test]
    fn cmo_probe_zero_field() {
        let g = spec();
        let fam = SquareFamily::dyadic_centered(&g, 1..=2).unwrap();
        let z = ComplexField::zeros(g);
        let rep = cmo_probe(&z, &fam, &fam, &fam).unwrap();
        assert_eq!((rep.small_max, rep.large_max, rep.translate_max), (0.0, 0.0, 0.0));
    }
}
