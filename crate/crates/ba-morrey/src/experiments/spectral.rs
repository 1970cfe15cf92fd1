//! Spectral-route experiments: the isometry (with multiplier powers) and
//! the Cauchy-transform identities.

use super::{anchor_of, Check, ExperimentResult, RunConfig, Table};
use crate::error::Result;
use crate::fields;
use crate::grid::GridSpec;
use crate::transforms::{beurling, beurling_power, cauchy, wirtinger, WirtingerKind};

pub fn isometry(config: &RunConfig) -> Result<ExperimentResult> {
    let seed = config.require_seed()?;
    let n = config.grid_n(256);
    let l = config.grid_l(4.0);
    let fields_count = config.usize_param("fields", 20)?;
    let kmax = config.usize_param("kmax", n / 8)?;
    let spec = GridSpec::new(n, l)?;

    let mut table = Table::new(&["field", "l2_ratio", "ratio_error", "power_n", "power_rel_error"]);
    let mut worst_iso = 0.0_f64;
    for i in 0..fields_count {
        let f = fields::band_limited(spec, seed.wrapping_add(i as u64), kmax);
        let ratio = beurling(&f).l2_norm() / f.l2_norm();
        let err = (ratio - 1.0).abs();
        worst_iso = worst_iso.max(err);
        table.push(vec![i.into(), ratio.into(), err.into(), 0i64.into(), 0.0.into()]);
    }

    // Multiplier powers against explicit composition, plus their isometry.
    let mut worst_power = 0.0_f64;
    let mut worst_power_iso = 0.0_f64;
    let probe = fields::band_limited(spec, seed.wrapping_add(1000), kmax);
    for &np in &[2u32, 4, 8] {
        let direct = beurling_power(&probe, np)?;
        let mut composed = probe.clone();
        for _ in 0..np {
            composed = beurling(&composed);
        }
        let rel = direct.sub(&composed).l2_norm() / probe.l2_norm();
        worst_power = worst_power.max(rel);
        let iso = (direct.l2_norm() / probe.l2_norm() - 1.0).abs();
        worst_power_iso = worst_power_iso.max(iso);
        table.push(vec![
            (fields_count as i64).into(),
            (1.0 + iso).into(),
            iso.into(),
            (np as i64).into(),
            rel.into(),
        ]);
    }

    let checks = vec![
        Check::new(
            "isometry_within_1e-10",
            worst_iso <= 1e-10,
            format!("worst |ratio - 1| = {worst_iso:.3e} over {fields_count} fields"),
        ),
        Check::new(
            "power_matches_composition_1e-9",
            worst_power <= 1e-9,
            format!("worst relative L2 mismatch = {worst_power:.3e} for N in {{2,4,8}}"),
        ),
        Check::new(
            "power_isometry_1e-10",
            worst_power_iso <= 1e-10,
            format!("worst power-isometry defect = {worst_power_iso:.3e}"),
        ),
    ];

    Ok(ExperimentResult {
        name: "isometry",
        anchor: anchor_of("isometry"),
        table,
        checks,
        resolved: vec![
            ("grid_n".into(), n.to_string()),
            ("grid_l".into(), l.to_string()),
            ("seed".into(), seed.to_string()),
            ("fields".into(), fields_count.to_string()),
            ("kmax".into(), kmax.to_string()),
        ],
    })
}

pub fn cauchy_identities(config: &RunConfig) -> Result<ExperimentResult> {
    let seed = config.require_seed()?;
    let n = config.grid_n(256);
    let l = config.grid_l(4.0);
    let fields_count = config.usize_param("fields", 10)?;
    let kmax = config.usize_param("kmax", n / 8)?;
    let spec = GridSpec::new(n, l)?;

    let mut table = Table::new(&["field", "dbar_identity_rel", "dz_identity_rel"]);
    let mut worst = 0.0_f64;
    for i in 0..fields_count {
        let g = fields::band_limited(spec, seed.wrapping_add(i as u64), kmax);
        let c = cauchy(&g);
        let dbar_rel = wirtinger(&c, WirtingerKind::DzBar).sub(&g).l2_norm() / g.l2_norm();
        let dz_rel = wirtinger(&c, WirtingerKind::Dz).sub(&beurling(&g)).l2_norm() / g.l2_norm();
        worst = worst.max(dbar_rel).max(dz_rel);
        table.push(vec![i.into(), dbar_rel.into(), dz_rel.into()]);
    }

    let checks = vec![Check::new(
        "cauchy_identities_within_1e-9",
        worst <= 1e-9,
        format!("worst relative identity residual = {worst:.3e} over {fields_count} fields"),
    )];

    Ok(ExperimentResult {
        name: "cauchy-identities",
        anchor: anchor_of("cauchy-identities"),
        table,
        checks,
        resolved: vec![
            ("grid_n".into(), n.to_string()),
            ("grid_l".into(), l.to_string()),
            ("seed".into(), seed.to_string()),
            ("fields".into(), fields_count.to_string()),
            ("kmax".into(), kmax.to_string()),
        ],
    })
}
