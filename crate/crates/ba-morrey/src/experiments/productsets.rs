//! Product-set invariants: cover, half-cardinality, pointwise domination on
//! a pair subsample, and the two single-sign conditions.

use super::{anchor_of, Check, ExperimentResult, RunConfig, Table};
use crate::commutator::product_sets;
use crate::error::Result;
use crate::fields;
use crate::grid::{GridSpec, Square};
use rustfft::num_complex::Complex64;
use std::collections::HashSet;

pub fn run(config: &RunConfig) -> Result<ExperimentResult> {
    let seed = config.require_seed()?;
    let n = config.grid_n(256);
    let l = config.grid_l(4.0);
    let symbols = config.usize_param("symbols", 10)?;
    let subsample = config.usize_param("subsample", 32)?;
    let spec = GridSpec::new(n, l)?;

    let squares = [
        Square::new(Complex64::new(-1.0, -1.0), 0.15)?,
        Square::new(Complex64::new(-0.5, -0.8), 0.2)?,
        Square::new(Complex64::new(0.0, -0.3), 0.25)?,
        Square::new(Complex64::new(-0.9, 0.1), 0.18)?,
        Square::new(Complex64::new(0.3, 0.2), 0.12)?,
    ];

    let mut table = Table::new(&[
        "symbol",
        "square",
        "alpha",
        "f1_count",
        "f2_count",
        "half_floor",
        "all_invariants",
    ]);
    let mut all_ok = true;
    let mut detail = String::new();
    for s in 0..symbols {
        let b = fields::band_limited_real(spec, seed.wrapping_add(s as u64), 6);
        for (qi, q) in squares.iter().enumerate() {
            let sets = product_sets(&b, q)?;
            let nq = q.sample_count(&spec);
            let ns = sets.shifted_square.sample_count(&spec);

            let mut cover_e: HashSet<usize> = sets.e1.iter().copied().collect();
            cover_e.extend(&sets.e2);
            let mut cover_f: HashSet<usize> = sets.f1.iter().copied().collect();
            cover_f.extend(&sets.f2);
            let cover_ok = cover_e.len() == nq && cover_f.len() == ns;

            let half_ok = sets.f1.len() >= ns / 2 && sets.f2.len() >= ns / 2;

            let mut dominate_ok = true;
            let mut sign_ok = true;
            for j in [1usize, 2] {
                let e = sets.e(j);
                let f = sets.f(j);
                let step_e = (e.len() / subsample).max(1);
                let step_f = (f.len() / subsample).max(1);
                for &zi in e.iter().step_by(step_e) {
                    let z = spec.point_at(zi);
                    let bz = b.values()[zi].re;
                    for &ui in f.iter().step_by(step_f) {
                        let u = spec.point_at(ui);
                        let bu = b.values()[ui].re;
                        if (bz - sets.alpha).abs() > (bz - bu).abs() + 1e-14 {
                            dominate_ok = false;
                        }
                        let geo = (z.re - u.re) * (z.im - u.im);
                        let diff = bz - bu;
                        let sign_geo = geo > 0.0;
                        let sign_diff = if j == 1 { diff >= 0.0 } else { diff <= 0.0 };
                        if !sign_geo || !sign_diff {
                            sign_ok = false;
                        }
                    }
                }
            }

            let ok = cover_ok && half_ok && dominate_ok && sign_ok;
            if !ok && detail.is_empty() {
                detail = format!(
                    "symbol {s}, square {qi}: cover {cover_ok}, half {half_ok}, dominate {dominate_ok}, signs {sign_ok}"
                );
            }
            all_ok &= ok;
            table.push(vec![
                s.into(),
                qi.into(),
                sets.alpha.into(),
                sets.f1.len().into(),
                sets.f2.len().into(),
                (ns / 2).into(),
                if ok { 1i64.into() } else { 0i64.into() },
            ]);
        }
    }

    let checks = vec![Check::new(
        "product_set_invariants",
        all_ok,
        if all_ok {
            format!("cover, half-cardinality, domination and sign conditions hold for {symbols} symbols x {} squares", squares.len())
        } else {
            detail
        },
    )];

    Ok(ExperimentResult {
        name: "lemma21-productsets",
        anchor: anchor_of("lemma21-productsets"),
        table,
        checks,
        resolved: vec![
            ("grid_n".into(), n.to_string()),
            ("grid_l".into(), l.to_string()),
            ("seed".into(), seed.to_string()),
            ("symbols".into(), symbols.to_string()),
            ("squares".into(), squares.len().to_string()),
            ("subsample".into(), subsample.to_string()),
        ],
    })
}
