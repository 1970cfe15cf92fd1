//! Boundedness probes for the maximal truncated transform and the
//! Hardy–Littlewood maximal function on the weighted Morrey scale.

use super::{anchor_of, Check, ExperimentResult, RunConfig, Table};
use crate::error::Result;
use crate::family::SquareFamily;
use crate::fields;
use crate::grid::GridSpec;
use crate::morrey::{morrey_norm, MorreyParams};
use crate::transforms::{beurling_maximal, hl_maximal, TruncationScale};
use crate::weights::Weight;
use rustfft::num_complex::Complex64;

pub fn run(config: &RunConfig) -> Result<ExperimentResult> {
    let seed = config.require_seed()?;
    let n = config.grid_n(128);
    let l = config.grid_l(4.0);
    let probes = config.usize_param("probes", 3)?;
    let spec = GridSpec::new(n, l)?;
    let h = spec.spacing();
    let p = config.f64_param("p", 2.0)?;
    let kappa = config.f64_param("kappa", 0.5)?;
    let alpha = config.f64_param("alpha", 1.0)?;
    let params = MorreyParams::new(p, kappa)?;
    let w = Weight::power(spec, Complex64::new(0.0, 0.0), alpha, p)?;
    let family = SquareFamily::dyadic_centered(&spec, 1..=3)?
        .merged(&SquareFamily::dyadic_cover(&spec, 1..=3)?);

    let scales: Vec<TruncationScale> = [2.0, 4.0, 8.0, 16.0]
        .iter()
        .map(|f| TruncationScale::new(f * h, &spec))
        .collect::<Result<_>>()?;

    let mut table = Table::new(&["probe", "maximal_transform_ratio", "maximal_function_ratio"]);
    let mut ratios_t = Vec::new();
    let mut ratios_m = Vec::new();
    let mut monotone_ok = true;
    for i in 0..probes {
        let f = fields::random_bump_sum(
            spec,
            seed.wrapping_add(i as u64),
            3,
            l / 4.0,
            (0.4, 0.9),
            (0.4, 1.0),
        );
        let denom = morrey_norm(&f, &w, &params, &family)?;
        let bstar = beurling_maximal(&f, &scales)?;
        let ratio_t = morrey_norm(&bstar.to_complex(), &w, &params, &family)? / denom;
        let maximal = hl_maximal(&f, &family);
        let ratio_m = morrey_norm(&maximal.to_complex(), &w, &params, &family)? / denom;
        ratios_t.push(ratio_t);
        ratios_m.push(ratio_m);
        table.push(vec![i.into(), ratio_t.into(), ratio_m.into()]);

        if i == 0 {
            // Scale and family monotonicity, pointwise and exact.
            let fewer = beurling_maximal(&f, &scales[..2])?;
            monotone_ok &= fewer.values().iter().zip(bstar.values()).all(|(a, b)| b >= a);
            let smaller_family = SquareFamily::dyadic_centered(&spec, 1..=3)?;
            let coarse = hl_maximal(&f, &smaller_family);
            monotone_ok &= coarse.values().iter().zip(maximal.values()).all(|(a, b)| b >= a);
        }
    }

    let all_finite = ratios_t.iter().chain(&ratios_m).all(|r| r.is_finite() && *r > 0.0);
    let spread = |v: &[f64]| {
        v.iter().cloned().fold(f64::MIN, f64::max) / v.iter().cloned().fold(f64::MAX, f64::min)
    };
    let uniform = spread(&ratios_t).max(spread(&ratios_m));

    let checks = vec![
        Check::new(
            "ratios_finite_positive",
            all_finite,
            format!("maximal-transform ratios {ratios_t:.3?}, maximal-function ratios {ratios_m:.3?}"),
        ),
        Check::new(
            "monotone_in_scales_and_family",
            monotone_ok,
            "pointwise monotonicity under enlarging the scale list / square family".into(),
        ),
        Check::new(
            "ratios_uniform_across_probes",
            uniform <= 20.0,
            format!("largest max/min ratio spread across probes = {uniform:.3}"),
        ),
    ];

    Ok(ExperimentResult {
        name: "lemma33-maximal",
        anchor: anchor_of("lemma33-maximal"),
        table,
        checks,
        resolved: vec![
            ("grid_n".into(), n.to_string()),
            ("grid_l".into(), l.to_string()),
            ("seed".into(), seed.to_string()),
            ("probes".into(), probes.to_string()),
            ("p".into(), p.to_string()),
            ("kappa".into(), kappa.to_string()),
            ("alpha".into(), alpha.to_string()),
            ("scales_over_h".into(), "2,4,8,16".into()),
        ],
    })
}
