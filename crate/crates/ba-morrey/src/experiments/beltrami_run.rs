//! Beltrami-solve experiment: residuals, iteration counts, a-priori
//! ratios across seeds, and ratio growth as the coefficient approaches the
//! contraction limit.

use super::{anchor_of, Check, ExperimentResult, RunConfig, Table};
use crate::beltrami::{apriori_ratio, solve_beltrami, BeltramiProblem};
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
    let tol = config.f64_param("tol", 1e-8)?;
    let n_max = config.usize_param("n_max", 60)?;
    let rhs_count = config.usize_param("rhs", 5)?;
    let kmax = config.usize_param("kmax", 8)?;
    let p = config.f64_param("p", 2.0)?;
    let kappa = config.f64_param("kappa", 0.5)?;
    let params = MorreyParams::new(p, kappa)?;
    let w = Weight::power(spec, Complex64::new(0.0, 0.0), 1.0, p)?;
    let family = SquareFamily::dyadic_centered(&spec, 1..=4)?;

    let bump = |amp: f64| fields::bump(spec, Complex64::new(0.0, 0.0), 1.0, amp);

    let mut table = Table::new(&["run", "amp", "n_used", "residual_rel", "apriori_ratio"]);
    let mut worst_residual = 0.0_f64;
    let mut worst_n = 0usize;
    let mut ratios = Vec::new();
    for i in 0..rhs_count {
        let g = fields::band_limited(spec, seed.wrapping_add(i as u64), kmax);
        let problem = BeltramiProblem::new(bump(0.5), g, params, w.clone())?;
        let report = solve_beltrami(&problem, tol, n_max)?;
        let ratio = apriori_ratio(&report, &problem, &family)?;
        worst_residual = worst_residual.max(report.residual_rel);
        worst_n = worst_n.max(report.n_used);
        ratios.push(ratio);
        table.push(vec![
            i.into(),
            0.5.into(),
            report.n_used.into(),
            report.residual_rel.into(),
            ratio.into(),
        ]);
    }
    let ratio_spread = ratios.iter().cloned().fold(f64::MIN, f64::max)
        / ratios.iter().cloned().fold(f64::MAX, f64::min);

    // Contraction sweep on a fixed right-hand side.
    let g = fields::band_limited(spec, seed, kmax);
    let mut sweep = Vec::new();
    for &amp in &[0.3, 0.6, 0.9] {
        let problem = BeltramiProblem::new(bump(amp), g.clone(), params, w.clone())?;
        let report = solve_beltrami(&problem, tol, 400)?;
        let ratio = apriori_ratio(&report, &problem, &family)?;
        sweep.push(ratio);
        table.push(vec![
            (rhs_count as i64).into(),
            amp.into(),
            report.n_used.into(),
            report.residual_rel.into(),
            ratio.into(),
        ]);
    }

    let checks = vec![
        Check::new(
            "residual_within_1e-6",
            worst_residual <= 1e-6,
            format!("worst projected relative residual = {worst_residual:.3e}"),
        ),
        Check::new(
            "iterations_within_40",
            worst_n <= 40,
            format!("largest iteration count at amplitude 0.5 = {worst_n}"),
        ),
        Check::new(
            "apriori_ratio_uniform_2x",
            ratios.iter().all(|r| r.is_finite()) && ratio_spread <= 2.0,
            format!("ratios {ratios:.3?}, max/min = {ratio_spread:.3}"),
        ),
        Check::new(
            "ratio_grows_toward_contraction_limit",
            sweep[0] < sweep[1] && sweep[1] < sweep[2],
            format!("ratios across amplitudes 0.3/0.6/0.9 = {sweep:.3?}"),
        ),
    ];

    Ok(ExperimentResult {
        name: "beltrami-solve",
        anchor: anchor_of("beltrami-solve"),
        table,
        checks,
        resolved: vec![
            ("grid_n".into(), n.to_string()),
            ("grid_l".into(), l.to_string()),
            ("seed".into(), seed.to_string()),
            ("tol".into(), tol.to_string()),
            ("n_max".into(), n_max.to_string()),
            ("rhs".into(), rhs_count.to_string()),
            ("kmax".into(), kmax.to_string()),
            ("p".into(), p.to_string()),
            ("kappa".into(), kappa.to_string()),
            ("amps".into(), "0.3,0.6,0.9".into()),
        ],
    })
}
