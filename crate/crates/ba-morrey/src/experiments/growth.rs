//! Iterated-transform growth probe: measured Morrey-norm ratios of
//! `b^N B^N` against the `N^2`-times-geometric envelope.

use super::{anchor_of, Check, ExperimentResult, RunConfig, Table};
use crate::beltrami::{envelope_decreasing_from, norm_growth_probe};
use crate::error::Result;
use crate::family::SquareFamily;
use crate::fields;
use crate::grid::GridSpec;
use crate::morrey::MorreyParams;
use crate::weights::Weight;
use rustfft::num_complex::Complex64;

pub fn run(config: &RunConfig) -> Result<ExperimentResult> {
    let seed = config.require_seed()?;
    let n = config.grid_n(256);
    let l = config.grid_l(4.0);
    let spec = GridSpec::new(n, l)?;
    let cases = config.usize_param("cases", 3)?;
    let n_max = config.usize_param("n_top", 8)? as u32;
    let fit_cutoff = config.usize_param("fit_cutoff", 4)? as u32;
    let amp = config.f64_param("amp", 0.5)?;
    let p = config.f64_param("p", 2.0)?;
    let kappa = config.f64_param("kappa", 0.5)?;
    let params = MorreyParams::new(p, kappa)?;
    let w = Weight::power(spec, Complex64::new(0.0, 0.0), 1.0, p)?;
    let family = SquareFamily::dyadic_centered(&spec, 1..=4)?;
    let ns: Vec<u32> = (1..=n_max).collect();

    let mut table = Table::new(&["case", "n", "measured", "envelope"]);
    let mut within = true;
    let mut detail = String::new();
    for case in 0..cases {
        // Smooth contractive coefficient: a seeded bump mixture rescaled to
        // amplitude `amp`.
        let raw = fields::random_bump_sum(
            spec,
            seed.wrapping_add(case as u64),
            3,
            l / 4.0,
            (0.5, 1.0),
            (0.5, 1.0),
        );
        let sup = raw.abs().max_abs();
        let b = raw.scaled(Complex64::new(amp / sup, 0.0));
        let probe = fields::band_limited(spec, seed.wrapping_add(100 + case as u64), n / 8);
        let growth =
            norm_growth_probe(&b, &ns, &[probe], &w, &params, &family, fit_cutoff)?;
        for row in &growth.rows {
            let measured = row.measured[0];
            if measured > row.envelope * (1.0 + 1e-9) {
                within = false;
                if detail.is_empty() {
                    detail = format!(
                        "case {case}, N = {}: measured {measured:.4e} above envelope {:.4e}",
                        row.n, row.envelope
                    );
                }
            }
            table.push(vec![case.into(), (row.n as i64).into(), measured.into(), row.envelope.into()]);
        }
    }

    let tail_decreasing = (7..n_max.max(8)).all(|k| envelope_decreasing_from(amp, k));

    let checks = vec![
        Check::new(
            "measured_within_fitted_envelope",
            within,
            if within {
                format!("every ratio for N <= {n_max} sits under the envelope fitted on N <= {fit_cutoff}")
            } else {
                detail
            },
        ),
        Check::new(
            "envelope_decreasing_from_7",
            tail_decreasing,
            format!("N^2 amp^N decreases from N = 7 at amp = {amp}"),
        ),
    ];

    Ok(ExperimentResult {
        name: "n2-growth",
        anchor: anchor_of("n2-growth"),
        table,
        checks,
        resolved: vec![
            ("grid_n".into(), n.to_string()),
            ("grid_l".into(), l.to_string()),
            ("seed".into(), seed.to_string()),
            ("cases".into(), cases.to_string()),
            ("n_top".into(), n_max.to_string()),
            ("fit_cutoff".into(), fit_cutoff.to_string()),
            ("amp".into(), amp.to_string()),
        ],
    })
}
