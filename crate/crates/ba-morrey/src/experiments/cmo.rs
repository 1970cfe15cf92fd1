//! Three-limit oscillation probe: maxima over nested families of shrinking
//! squares, growing squares, and far translates.

use super::{anchor_of, Check, ExperimentResult, RunConfig, Table};
use crate::error::Result;
use crate::family::SquareFamily;
use crate::fields;
use crate::grid::{ComplexField, GridSpec, Square};
use crate::oscillation::cmo_probe;
use rustfft::num_complex::Complex64;

fn fixed_radius_family(spec: &GridSpec, r: f64) -> Result<SquareFamily> {
    let centers = [
        (0.0, 0.0),
        (0.5, 0.5),
        (-0.5, 0.5),
        (0.5, -0.5),
        (-0.5, -0.5),
        (1.0, 0.0),
        (0.0, 1.0),
        (0.25, 0.0),
        (0.0, -0.25),
    ];
    let squares = centers
        .iter()
        .map(|&(x, y)| Square::new(Complex64::new(x, y), r))
        .collect::<crate::error::Result<Vec<_>>>()?;
    SquareFamily::new(spec, format!("radius-{r}"), squares)
}

fn translate_family(spec: &GridSpec, r: f64, d: f64) -> Result<SquareFamily> {
    let squares = vec![
        Square::new(Complex64::new(d, 0.0), r)?,
        Square::new(Complex64::new(-d, 0.0), r)?,
        Square::new(Complex64::new(0.0, d), r)?,
        Square::new(Complex64::new(0.0, -d), r)?,
    ];
    SquareFamily::new(spec, format!("translates-{d}"), squares)
}

fn growing_family(spec: &GridSpec, r: f64) -> Result<SquareFamily> {
    let l = spec.half_width();
    let mut squares = vec![Square::new(Complex64::new(0.0, 0.0), r)?];
    if r <= l / 2.0 {
        for &(x, y) in &[(0.3_f64, 0.3_f64), (-0.3, 0.2)] {
            if x.abs() + r <= l && y.abs() + r <= l {
                squares.push(Square::new(Complex64::new(x, y), r)?);
            }
        }
    }
    SquareFamily::new(spec, format!("area-{r}"), squares)
}

struct SequenceMaxima {
    small: Vec<f64>,
    large: Vec<f64>,
    translate: Vec<f64>,
}

fn sequences(f: &ComplexField, spec: &GridSpec, h: f64) -> Result<SequenceMaxima> {
    let small_radii = [1.0, 0.5, 0.25, 2.0 * h];
    let large_radii = [0.25, 0.5, 1.0, 2.0];
    let translate_dist = [0.5, 1.0, 2.0, 3.0];
    let mut out = SequenceMaxima { small: Vec::new(), large: Vec::new(), translate: Vec::new() };
    for stage in 0..4 {
        let report = cmo_probe(
            f,
            &fixed_radius_family(spec, small_radii[stage])?,
            &growing_family(spec, large_radii[stage])?,
            &translate_family(spec, 0.25, translate_dist[stage])?,
        )?;
        out.small.push(report.small_max);
        out.large.push(report.large_max);
        out.translate.push(report.translate_max);
    }
    Ok(out)
}

pub fn run(config: &RunConfig) -> Result<ExperimentResult> {
    let n = config.grid_n(256);
    let l = config.grid_l(4.0);
    let spec = GridSpec::new(n, l)?;
    let h = spec.spacing();
    let decay = config.f64_param("decay_factor", 2.0)?;

    let smooth = fields::bump(spec, Complex64::new(0.0, 0.0), 0.5, 1.0);
    let log_symbol = fields::truncated_log_abs(spec, h);

    let smooth_seq = sequences(&smooth, &spec, h)?;
    let log_seq = sequences(&log_symbol, &spec, h)?;

    let mut table = Table::new(&["symbol", "sequence", "stage", "oscillation_max"]);
    for (label, seq) in [("smooth", &smooth_seq), ("trunc-log", &log_seq)] {
        for (name, vals) in
            [("small", &seq.small), ("large", &seq.large), ("translate", &seq.translate)]
        {
            for (stage, v) in vals.iter().enumerate() {
                table.push(vec![label.into(), name.into(), stage.into(), (*v).into()]);
            }
        }
    }

    let ratio = |v: &[f64]| v.first().unwrap() / v.last().unwrap();
    let smooth_small = ratio(&smooth_seq.small);
    let smooth_large = ratio(&smooth_seq.large);
    let smooth_translate = ratio(&smooth_seq.translate);
    let log_small = ratio(&log_seq.small);

    let checks = vec![
        Check::new(
            "smooth_small_squares_decay",
            smooth_small >= decay,
            format!("first/last small-square maxima ratio = {smooth_small:.3}"),
        ),
        Check::new(
            "smooth_large_squares_decay",
            smooth_large >= decay,
            format!("first/last large-square maxima ratio = {smooth_large:.3}"),
        ),
        Check::new(
            "smooth_translates_decay",
            smooth_translate >= decay,
            format!("first/last translate maxima ratio = {smooth_translate:.3}"),
        ),
        Check::new(
            "log_small_squares_persist",
            log_small < decay,
            format!("truncated-log small-square ratio = {log_small:.3} stays below {decay}"),
        ),
    ];

    Ok(ExperimentResult {
        name: "cmo-probe",
        anchor: anchor_of("cmo-probe"),
        table,
        checks,
        resolved: vec![
            ("grid_n".into(), n.to_string()),
            ("grid_l".into(), l.to_string()),
            ("decay_factor".into(), decay.to_string()),
            ("small_radii".into(), "1,0.5,0.25,2h".into()),
            ("large_radii".into(), "0.25,0.5,1,2".into()),
            ("translate_distances".into(), "0.5,1,2,3".into()),
            ("bump".into(), "radius 0.5, amplitude 1".into()),
            ("log_floor".into(), "h".into()),
        ],
    })
}
