//! Weight-machinery experiments: the characteristic constant over declared
//! families (with family-doubling stability) and the dilation-growth fit.

use super::{anchor_of, Check, ExperimentResult, RunConfig, Table};
use crate::error::Result;
use crate::family::SquareFamily;
use crate::grid::{GridSpec, Square};
use crate::weights::{ap_constant, doubling_check, Weight};
use rustfft::num_complex::Complex64;

fn base_and_doubled(spec: &GridSpec) -> Result<(SquareFamily, SquareFamily)> {
    let base = SquareFamily::dyadic_centered(spec, 1..=3)?
        .merged(&SquareFamily::dyadic_cover(spec, 2..=3)?);
    let doubled = base
        .merged(&SquareFamily::dyadic_centered(spec, 4..=4)?)
        .merged(&SquareFamily::dyadic_cover(spec, 4..=4)?);
    Ok((base, doubled))
}

pub fn ap_constant_run(config: &RunConfig) -> Result<ExperimentResult> {
    let n = config.grid_n(256);
    let l = config.grid_l(4.0);
    let spec = GridSpec::new(n, l)?;
    let (base, doubled) = base_and_doubled(&spec)?;

    let mut table = Table::new(&["weight", "p", "family", "constant"]);
    let mut checks = Vec::new();

    // Constants have characteristic constant exactly one.
    let mut worst_unit = 0.0_f64;
    for &p in &[1.5, 2.0, 3.0] {
        let w = Weight::constant(spec, 1.0, p)?;
        let c = ap_constant(&w, &base)?.constant;
        worst_unit = worst_unit.max((c - 1.0).abs());
        table.push(vec!["constant-1".into(), p.into(), "base".into(), c.into()]);
    }
    checks.push(Check::new(
        "unit_weight_constant_is_one",
        worst_unit <= 1e-6,
        format!("worst |[1]_Ap - 1| = {worst_unit:.3e}"),
    ));

    // |z| at p = 2: the family estimate is stable under doubling.
    let w = Weight::power(spec, Complex64::new(0.0, 0.0), 1.0, 2.0)?;
    let c_base = ap_constant(&w, &base)?.constant;
    let c_doubled = ap_constant(&w, &doubled)?.constant;
    let rel_change = (c_doubled - c_base).abs() / c_base;
    table.push(vec!["|z|".into(), 2.0.into(), "base".into(), c_base.into()]);
    table.push(vec!["|z|".into(), 2.0.into(), "doubled".into(), c_doubled.into()]);
    checks.push(Check::new(
        "family_doubling_stable_5pct",
        rel_change < 0.05,
        format!("constant {c_base:.6} -> {c_doubled:.6}, relative change {rel_change:.4}"),
    ));
    checks.push(Check::new(
        "constant_at_least_one",
        c_base >= 1.0 - 1e-6,
        format!("constant = {c_base:.6}"),
    ));

    // Out-of-range exponent: the estimate keeps growing as larger squares
    // join the family.
    let w_out = Weight::power(spec, Complex64::new(0.0, 0.0), 2.5, 2.0)?;
    let small = SquareFamily::dyadic_centered(&spec, 3..=4)?;
    let grown = small.merged(&SquareFamily::dyadic_centered(&spec, 1..=2)?);
    let c_small = ap_constant(&w_out, &small)?.constant;
    let c_grown = ap_constant(&w_out, &grown)?.constant;
    table.push(vec!["|z|^2.5".into(), 2.0.into(), "small".into(), c_small.into()]);
    table.push(vec!["|z|^2.5".into(), 2.0.into(), "grown".into(), c_grown.into()]);
    checks.push(Check::new(
        "out_of_range_grows",
        c_grown > 1.2 * c_small,
        format!("constant {c_small:.4} -> {c_grown:.4} as the family grows"),
    ));

    Ok(ExperimentResult {
        name: "ap-constant",
        anchor: anchor_of("ap-constant"),
        table,
        checks,
        resolved: vec![
            ("grid_n".into(), n.to_string()),
            ("grid_l".into(), l.to_string()),
            ("base_family".into(), "dyadic-centered(1..=3)+dyadic-cover(2..=3)".into()),
            ("doubled_family".into(), "base+dyadic-centered(4)+dyadic-cover(4)".into()),
        ],
    })
}

pub fn doubling_run(config: &RunConfig) -> Result<ExperimentResult> {
    let n = config.grid_n(256);
    let l = config.grid_l(4.0);
    let spec = GridSpec::new(n, l)?;
    let p = config.f64_param("p", 2.0)?;
    let r0 = config.f64_param("r0", l / 8.0)?;
    let square = Square::new(Complex64::new(0.0, 0.0), r0)?;
    let factors = [1.5, 2.0, 3.0, 4.0];

    let mut table = Table::new(&["alpha", "fitted_exponent", "expected", "error", "pass_2p"]);
    let mut worst = 0.0_f64;
    let mut all_pass = true;
    for &alpha in &[-1.0, -0.5, 0.5, 1.0] {
        let w = Weight::power(spec, Complex64::new(0.0, 0.0), alpha, p)?;
        let fit = doubling_check(&w, &square, &factors)?;
        let expected = 2.0 + alpha;
        let err = (fit.exponent - expected).abs();
        worst = worst.max(err);
        all_pass &= fit.pass;
        table.push(vec![
            alpha.into(),
            fit.exponent.into(),
            expected.into(),
            err.into(),
            if fit.pass { 1i64.into() } else { 0i64.into() },
        ]);
    }

    let checks = vec![
        Check::new(
            "exponent_matches_2_plus_alpha",
            worst <= 0.05,
            format!("worst |fit - (2 + alpha)| = {worst:.4}"),
        ),
        Check::new(
            "growth_within_2p_budget",
            all_pass,
            format!("all fitted exponents stayed below 2p + 0.2 = {}", 2.0 * p + 0.2),
        ),
    ];

    Ok(ExperimentResult {
        name: "doubling",
        anchor: anchor_of("doubling"),
        table,
        checks,
        resolved: vec![
            ("grid_n".into(), n.to_string()),
            ("grid_l".into(), l.to_string()),
            ("p".into(), p.to_string()),
            ("r0".into(), r0.to_string()),
            ("factors".into(), "1.5,2,3,4".into()),
            ("alphas".into(), "-1,-0.5,0.5,1".into()),
        ],
    })
}
