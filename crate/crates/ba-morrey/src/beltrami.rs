//! Neumann-series solver for `dbar f - b df = g` with `max|b| < 1`:
//! invert `Id - b B` by geometric iteration, then apply the Cauchy
//! transform. Residuals, per-iterate decay, and the weighted-Morrey
//! a-priori ratio are reported alongside the solution.

use crate::error::{Error, Result};
use crate::family::SquareFamily;
use crate::grid::ComplexField;
use crate::morrey::{morrey_norm, MorreyParams};
use crate::transforms::{beurling, beurling_power, cauchy, wirtinger, WirtingerKind};
use crate::weights::Weight;
use rustfft::num_complex::Complex64;

/// Problem data: coefficient `b` (contractive, compactly supported in the
/// central half-window), right-hand side `g`, and the norm indices.
#[derive(Debug, Clone)]
pub struct BeltramiProblem {
    pub b: ComplexField,
    pub g: ComplexField,
    pub params: MorreyParams,
    pub w: Weight,
}

impl BeltramiProblem {
    pub fn new(b: ComplexField, g: ComplexField, params: MorreyParams, w: Weight) -> Result<Self> {
        assert_eq!(b.spec(), g.spec(), "grid mismatch");
        assert_eq!(b.spec(), w.spec(), "grid mismatch");
        let sup = b.abs().max_abs();
        if !(sup < 1.0) {
            return Err(Error::NotContractive(sup));
        }
        let spec = b.spec();
        let half = spec.half_width() / 2.0;
        let mut leak = 0.0_f64;
        for (i, v) in b.values().iter().enumerate() {
            let z = spec.point_at(i);
            if (z.re.abs() >= half || z.im.abs() >= half) && v.norm() > leak {
                leak = v.norm();
            }
        }
        if leak > 1e-10 * sup.max(1e-300) {
            return Err(Error::SupportLeak(leak));
        }
        Ok(Self { b, g, params, w })
    }
}

/// How the partial sums are accumulated; both converge to the same limit
/// and serve as a cross-check of the iteration bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IterationOrder {
    /// `h_N = g + b B h_{N-1}`.
    Horner,
    /// Accumulate the powers `(bB)^k g` term by term.
    PowerAccumulation,
}

#[derive(Debug, Clone)]
pub struct NeumannReport {
    /// The partial sum reached.
    pub solution: ComplexField,
    /// Number of applications of `bB` performed.
    pub n_used: usize,
    /// `L^2` norms of the successive terms `(bB)^N g`, starting at `N = 0`.
    pub term_norms: Vec<f64>,
    pub converged: bool,
}

/// Invert `Id - bB` by Neumann iteration, stopping once the latest term
/// falls below `tol * ||g||_2` or `n_max` applications have been spent (the
/// partial sum is still returned, flagged as unconverged).
pub fn neumann_invert(
    b: &ComplexField,
    g: &ComplexField,
    tol: f64,
    n_max: usize,
) -> Result<NeumannReport> {
    neumann_invert_ordered(b, g, tol, n_max, IterationOrder::PowerAccumulation)
}

pub fn neumann_invert_ordered(
    b: &ComplexField,
    g: &ComplexField,
    tol: f64,
    n_max: usize,
    order: IterationOrder,
) -> Result<NeumannReport> {
    assert_eq!(b.spec(), g.spec(), "grid mismatch");
    let sup = b.abs().max_abs();
    if !(sup < 1.0) {
        return Err(Error::NotContractive(sup));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidConfig(format!("tol must be positive, got {tol}")));
    }
    let g_norm = g.l2_norm();
    let mut term_norms = vec![g_norm];
    if g_norm == 0.0 {
        return Ok(NeumannReport {
            solution: ComplexField::zeros(*g.spec()),
            n_used: 0,
            term_norms,
            converged: true,
        });
    }
    match order {
        IterationOrder::PowerAccumulation => {
            let mut sum = g.clone();
            let mut term = g.clone();
            let mut n_used = 0;
            let mut converged = term_norms[0] <= tol * g_norm;
            while !converged && n_used < n_max {
                term = b.pointwise_mul(&beurling(&term));
                n_used += 1;
                let norm = term.l2_norm();
                term_norms.push(norm);
                sum = sum.add(&term);
                if norm <= tol * g_norm {
                    converged = true;
                }
            }
            Ok(NeumannReport { solution: sum, n_used, term_norms, converged })
        }
        IterationOrder::Horner => {
            // h_N = g + bB h_{N-1}; the increment h_N - h_{N-1} is (bB)^N g.
            let mut prev = g.clone();
            let mut n_used = 0;
            let mut converged = term_norms[0] <= tol * g_norm;
            while !converged && n_used < n_max {
                let next = g.add(&b.pointwise_mul(&beurling(&prev)));
                n_used += 1;
                let norm = next.sub(&prev).l2_norm();
                term_norms.push(norm);
                prev = next;
                if norm <= tol * g_norm {
                    converged = true;
                }
            }
            Ok(NeumannReport { solution: prev, n_used, term_norms, converged })
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub f: ComplexField,
    pub dz_f: ComplexField,
    pub dzbar_f: ComplexField,
    pub n_used: usize,
    pub term_norms: Vec<f64>,
    pub converged: bool,
    /// Relative `L^2` residual of `dbar f - b df - g` after projecting out
    /// the kernel of the discrete `dbar` (the constant direction plus the
    /// zeroed Nyquist bins). The solution class is defined up to constants,
    /// and on the torus that kernel component of the data is not attainable.
    pub residual_rel: f64,
    /// Relative size of the kernel component that was projected away.
    pub dc_defect_rel: f64,
}

/// Remove the spectral bins annihilated by the discrete `dbar` (zero
/// frequency and the zeroed Nyquist rows' intersections).
fn project_out_dbar_kernel(f: &ComplexField) -> ComplexField {
    crate::transforms::apply_multiplier(f, |xi| {
        if xi.re == 0.0 && xi.im == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(1.0, 0.0)
        }
    })
}

/// Solve the equation: `f = C (Id - bB)^{-1} (g - mean g)`, with the
/// residual verified by independent spectral differentiation of `f`.
pub fn solve_beltrami(problem: &BeltramiProblem, tol: f64, n_max: usize) -> Result<SolveReport> {
    solve_beltrami_ordered(problem, tol, n_max, IterationOrder::PowerAccumulation)
}

pub fn solve_beltrami_ordered(
    problem: &BeltramiProblem,
    tol: f64,
    n_max: usize,
    order: IterationOrder,
) -> Result<SolveReport> {
    let g0 = crate::fields::mean_zero(&problem.g);
    let neumann = neumann_invert_ordered(&problem.b, &g0, tol, n_max, order)?;
    let f = cauchy(&neumann.solution);
    let dz_f = wirtinger(&f, WirtingerKind::Dz);
    let dzbar_f = wirtinger(&f, WirtingerKind::DzBar);
    let lhs = dzbar_f.sub(&problem.b.pointwise_mul(&dz_f));
    let residual = lhs.sub(&g0);
    let projected = project_out_dbar_kernel(&residual);
    let g_norm = problem.g.l2_norm();
    let (residual_rel, dc_defect_rel) = if g_norm == 0.0 {
        (0.0, 0.0)
    } else {
        (
            projected.l2_norm() / g_norm,
            residual.sub(&projected).l2_norm() / g_norm,
        )
    };
    Ok(SolveReport {
        f,
        dz_f,
        dzbar_f,
        n_used: neumann.n_used,
        term_norms: neumann.term_norms,
        converged: neumann.converged,
        residual_rel,
        dc_defect_rel,
    })
}

/// A-priori ratio `|| |df| + |dbar f| ||_Morrey / || g ||_Morrey`.
pub fn apriori_ratio(
    report: &SolveReport,
    problem: &BeltramiProblem,
    family: &SquareFamily,
) -> Result<f64> {
    if problem.g.l2_norm() == 0.0 {
        return Err(Error::ZeroRhs);
    }
    let df = report.dz_f.abs().add(&report.dzbar_f.abs());
    let num = morrey_norm(&df.to_complex(), &problem.w, &problem.params, family)?;
    let den = morrey_norm(&problem.g, &problem.w, &problem.params, family)?;
    Ok(num / den)
}

#[derive(Debug, Clone)]
pub struct GrowthRow {
    pub n: u32,
    /// Measured Morrey-norm ratio per probe field.
    pub measured: Vec<f64>,
    /// Envelope `c_fit * N^2 * sup|b|^N`.
    pub envelope: f64,
}

#[derive(Debug, Clone)]
pub struct GrowthTable {
    pub rows: Vec<GrowthRow>,
    pub c_fit: f64,
    pub sup_b: f64,
    /// Largest `N` used for calibrating `c_fit`; larger `N` are verified
    /// against the fitted envelope rather than folded into it.
    pub fit_cutoff: u32,
}

/// Measure `|| b^N B^N f ||_Morrey / || f ||_Morrey` for each `N`, fit the
/// envelope constant on `N <= fit_cutoff`, and tabulate the envelope for
/// every `N`.
pub fn norm_growth_probe(
    b: &ComplexField,
    n_list: &[u32],
    probes: &[ComplexField],
    w: &Weight,
    params: &MorreyParams,
    family: &SquareFamily,
    fit_cutoff: u32,
) -> Result<GrowthTable> {
    let sup_b = b.abs().max_abs();
    if !(sup_b < 1.0) {
        return Err(Error::NotContractive(sup_b));
    }
    let mut rows = Vec::with_capacity(n_list.len());
    let mut c_fit = 0.0_f64;
    for &n in n_list {
        if n == 0 {
            return Err(Error::ZeroPower);
        }
        let mut measured = Vec::with_capacity(probes.len());
        for f in probes {
            let bn: Vec<Complex64> = b.values().iter().map(|v| v.powu(n)).collect();
            let bn_field = ComplexField::from_values(*b.spec(), bn)?;
            let transformed = beurling_power(f, n)?;
            let num = morrey_norm(&bn_field.pointwise_mul(&transformed), w, params, family)?;
            let den = morrey_norm(f, w, params, family)?;
            let ratio = num / den;
            measured.push(ratio);
            if n <= fit_cutoff {
                let reference = (n as f64) * (n as f64) * sup_b.powi(n as i32);
                c_fit = c_fit.max(ratio / reference);
            }
        }
        rows.push(GrowthRow { n, measured, envelope: 0.0 });
    }
    for row in &mut rows {
        row.envelope = c_fit * (row.n as f64) * (row.n as f64) * sup_b.powi(row.n as i32);
    }
    Ok(GrowthTable { rows, c_fit, sup_b, fit_cutoff })
}

/// The envelope `N^2 t^N` decreases once `(1 + 1/N)^2 < 1/t`; for
/// `t = 1/2` this holds from `N = 3` on, in particular from `N = 7`.
pub fn envelope_decreasing_from(sup_b: f64, n: u32) -> bool {
    let n = n as f64;
    ((n + 1.0) / n).powi(2) * sup_b < 1.0
}
