//! Commutators `[b, B]f = b Bf - B(bf)`, the median product-set
//! construction, the oscillation test family with its lower and upper
//! bounds on shifted dilates, the pairwise separation experiment, and the
//! oscillation-versus-commutator chain.
//!
//! Everything here that evaluates the commutator of a compactly supported
//! source on a region disjoint from (or much larger than) the support does
//! so by direct kernel summation, independent of the spectral route.

use crate::error::{Error, Result};
use crate::family::SquareFamily;
use crate::grid::{samples_in_square, ComplexField, GridSpec, Square};
use crate::morrey::{morrey_norm, MorreyParams};
use crate::oscillation::{mean_oscillation, median_value};
use crate::transforms::{beurling, beurling_quadrature, plain_kernel, truncated_kernel, TruncationScale};
use crate::weights::{weighted_measure, Weight};
use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use std::f64::consts::PI;

/// Which evaluation route the commutator takes.
#[derive(Debug, Clone, Copy)]
pub enum CommutatorMode {
    /// Spectral multiplier for both transform applications.
    Fft,
    /// Truncated-kernel quadrature at the given scale.
    Quadrature(TruncationScale),
}

/// `[b, B]f = b * Bf - B(b f)` in the chosen mode.
pub fn commutator_apply(b: &ComplexField, f: &ComplexField, mode: CommutatorMode) -> Result<ComplexField> {
    assert_eq!(b.spec(), f.spec(), "grid mismatch");
    let bf = b.pointwise_mul(f);
    let (tf, tbf) = match mode {
        CommutatorMode::Fft => (beurling(f), beurling(&bf)),
        CommutatorMode::Quadrature(eta) => {
            (beurling_quadrature(f, eta), beurling_quadrature(&bf, eta))
        }
    };
    Ok(b.pointwise_mul(&tf).sub(&tbf))
}

// ---------------------------------------------------------------------------
// Product sets
// ---------------------------------------------------------------------------

/// Sample index sets `E_1, E_2` covering `Q` and `F_1, F_2` covering the
/// diagonally shifted square `Q~ = Q + 4r(1+i)`, split by the median of the
/// symbol over `Q~`. On `E_j x F_j` the distance of the symbol to the
/// median is dominated by the pointwise difference, and both
/// `(x-zeta)(y-eta)` and `b(z)-b(u)` keep a single sign.
#[derive(Debug, Clone)]
pub struct ProductSets {
    pub square: Square,
    pub shifted_square: Square,
    /// Median of the symbol over the shifted square.
    pub alpha: f64,
    pub e1: Vec<usize>,
    pub e2: Vec<usize>,
    pub f1: Vec<usize>,
    pub f2: Vec<usize>,
}

impl ProductSets {
    pub fn e(&self, j: usize) -> &[usize] {
        match j {
            1 => &self.e1,
            2 => &self.e2,
            _ => panic!("j must be 1 or 2"),
        }
    }

    pub fn f(&self, j: usize) -> &[usize] {
        match j {
            1 => &self.f1,
            2 => &self.f2,
            _ => panic!("j must be 1 or 2"),
        }
    }
}

/// The diagonal shift `4r(1+i)` that separates `Q~` from `Q`.
pub fn diagonal_shift(square: &Square) -> Complex64 {
    let d = 4.0 * square.half_side();
    Complex64::new(d, d)
}

pub fn product_sets(b: &ComplexField, square: &Square) -> Result<ProductSets> {
    let spec = b.spec();
    let shifted = square.translated(diagonal_shift(square));
    if !shifted.inside_half_window(spec) {
        return Err(Error::HalfWindowGuard("shifted square", shifted.to_string()));
    }
    let alpha = median_value(b, &shifted)?;
    let q_idx = samples_in_square(spec, square)?;
    let s_idx = samples_in_square(spec, &shifted)?;
    let mut sets = ProductSets {
        square: *square,
        shifted_square: shifted,
        alpha,
        e1: Vec::new(),
        e2: Vec::new(),
        f1: Vec::new(),
        f2: Vec::new(),
    };
    for i in q_idx {
        let v = b.values()[i].re;
        if v >= alpha {
            sets.e1.push(i);
        }
        if v <= alpha {
            sets.e2.push(i);
        }
    }
    for i in s_idx {
        let v = b.values()[i].re;
        if v <= alpha {
            sets.f1.push(i);
        }
        if v >= alpha {
            sets.f2.push(i);
        }
    }
    Ok(sets)
}

// ---------------------------------------------------------------------------
// Sparse fields and direct commutator sums
// ---------------------------------------------------------------------------

/// Real field supported on few samples, stored as `(index, value)` pairs.
/// Large grids keep test functions in this form instead of dense buffers.
#[derive(Debug, Clone)]
pub struct SparseField {
    spec: GridSpec,
    entries: Vec<(usize, f64)>,
}

impl SparseField {
    pub fn new(spec: GridSpec, entries: Vec<(usize, f64)>) -> Self {
        Self { spec, entries }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    /// Plain sum of the entry values (the discrete integral is `h^2` times
    /// this).
    pub fn value_sum(&self) -> f64 {
        self.entries.iter().map(|e| e.1).sum()
    }

    pub fn to_dense(&self) -> ComplexField {
        let mut f = ComplexField::zeros(self.spec);
        for &(i, v) in &self.entries {
            f.values_mut()[i] = Complex64::new(v, 0.0);
        }
        f
    }

    /// Morrey norm over a declared family, using only the support entries.
    pub fn morrey_norm(&self, w: &Weight, params: &MorreyParams, family: &SquareFamily) -> Result<f64> {
        let spec = &self.spec;
        let mut best = 0.0_f64;
        for q in family.squares() {
            let mut sum = 0.0;
            for &(i, v) in &self.entries {
                if q.contains_point(spec.point_at(i)) {
                    sum += v.abs().powf(params.p()) * w.values()[i];
                }
            }
            if sum == 0.0 {
                continue;
            }
            let lp = (sum * spec.cell_area()).powf(1.0 / params.p());
            let term = lp / weighted_measure(w, q)?.powf(params.kappa() / params.p());
            if term > best {
                best = term;
            }
        }
        Ok(best)
    }
}

/// Direct commutator of a sparse source evaluated at the given samples:
/// `h^2 sum_u (b(z) - b(u)) K_B(z - u) src(u)`. The kernel is truncated at
/// the finest resolvable scale, which only matters within two cells of the
/// support. Deterministic: per-sample sums run in a fixed order.
pub fn commutator_on_samples(
    b: &ComplexField,
    src: &SparseField,
    samples: &[usize],
) -> Vec<Complex64> {
    let spec = src.spec();
    let h = spec.spacing();
    let eta_ref = 2.0 * h;
    let near2 = eta_ref * eta_ref;
    let cell = spec.cell_area();
    let sources: Vec<(f64, f64, f64, f64)> = src
        .entries()
        .iter()
        .map(|&(i, v)| {
            let z = spec.point_at(i);
            (z.re, z.im, b.values()[i].re, v)
        })
        .collect();
    samples
        .par_iter()
        .map(|&zi| {
            let z = spec.point_at(zi);
            let bz = b.values()[zi].re;
            let mut acc = Complex64::new(0.0, 0.0);
            for &(ux, uy, bu, v) in &sources {
                let dx = z.re - ux;
                let dy = z.im - uy;
                let d2 = dx * dx + dy * dy;
                if d2 == 0.0 {
                    continue;
                }
                let k = if d2 >= near2 {
                    plain_kernel(dx, dy)
                } else {
                    truncated_kernel(Complex64::new(dx, dy), eta_ref)
                };
                acc += k * ((bz - bu) * v);
            }
            acc * cell
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Test family
// ---------------------------------------------------------------------------

/// One test function: supported on its square, sign-aligned with the
/// symbol's deviation from the median, exactly mean-zero, of size
/// `w(Q_j)^{(kappa-1)/p}` on the strict level sets.
#[derive(Debug, Clone)]
pub struct TestMember {
    pub square: Square,
    /// Median of the symbol over the square.
    pub alpha: f64,
    /// Balancing constant; `|a_j| <= 1/2` by the median level-set counts.
    pub a_j: f64,
    /// `w(Q_j)^{(kappa-1)/p}`.
    pub weight_factor: f64,
    /// Oscillation of the symbol over the square.
    pub oscillation: f64,
    pub f_j: SparseField,
    /// Strict upper level set `{b > alpha}`.
    pub upper: Vec<usize>,
    /// Strict lower level set `{b < alpha}`.
    pub lower: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct TestFamily {
    pub members: Vec<TestMember>,
    pub delta: f64,
    pub k0: u32,
}

/// Build the test family for a real symbol over declared squares. Each
/// square must oscillate above `delta`, and its `3^(k0+1)` dilate must sit
/// in the central half-window so later shifted dilates stay clear of
/// wrap-around.
pub fn build_test_family(
    b: &ComplexField,
    squares: &[Square],
    w: &Weight,
    params: &MorreyParams,
    k0: u32,
    delta: f64,
) -> Result<TestFamily> {
    if squares.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let spec = b.spec();
    let mut members = Vec::with_capacity(squares.len());
    for q in squares {
        let guard = q.scaled(f64::powi(3.0, k0 as i32 + 1));
        if !guard.inside_half_window(spec) {
            return Err(Error::HalfWindowGuard("dilated test square", guard.to_string()));
        }
        let osc = mean_oscillation(b, q)?;
        if !(osc > delta) {
            return Err(Error::OscillationBelowThreshold {
                square: q.to_string(),
                osc,
                delta,
            });
        }
        let alpha = median_value(b, q)?;
        let idx = samples_in_square(spec, q)?;
        let m = idx.len();
        let mut upper = Vec::new();
        let mut lower = Vec::new();
        for &i in &idx {
            let v = b.values()[i].re;
            if v > alpha {
                upper.push(i);
            } else if v < alpha {
                lower.push(i);
            }
        }
        let a_j = (upper.len() as f64 - lower.len() as f64) / m as f64;
        let wq = weighted_measure(w, q)?;
        let weight_factor = wq.powf((params.kappa() - 1.0) / params.p());
        let mut entries = Vec::with_capacity(m);
        for &i in &idx {
            let v = b.values()[i].re;
            let base = if v > alpha {
                1.0 - a_j
            } else if v < alpha {
                -1.0 - a_j
            } else {
                -a_j
            };
            entries.push((i, weight_factor * base));
        }
        members.push(TestMember {
            square: *q,
            alpha,
            a_j,
            weight_factor,
            oscillation: osc,
            f_j: SparseField::new(*spec, entries),
            upper,
            lower,
        });
    }
    Ok(TestFamily { members, delta, k0 })
}

// ---------------------------------------------------------------------------
// Lower and upper bounds on shifted dilates
// ---------------------------------------------------------------------------

/// The shifted dilate `3^(k-1) Q_j + 3^k r_j` along the positive x axis.
pub fn shifted_dilate(square: &Square, k: u32) -> Square {
    let r = square.half_side();
    let pow_km1 = f64::powi(3.0, k as i32 - 1);
    square
        .scaled(pow_km1)
        .translated(Complex64::new(3.0 * pow_km1 * r, 0.0))
}

/// Per `(j, k)` row of the bounds table.
#[derive(Debug, Clone)]
pub struct BoundRow {
    pub j: usize,
    pub k: u32,
    /// Weighted integral of `|[b,B]f_j|^p` over the shifted dilate.
    pub lower_lhs: f64,
    /// Reference `delta^p 3^(-2kp) w(Q_j)^(kappa-1) w(3^k Q_j)`.
    pub lower_ref: f64,
    /// Implied lower-bound constant `lower_lhs / lower_ref`.
    pub c1: f64,
    /// Weighted integral over the annulus `3^(k+1) Q_j minus 3^k Q_j`.
    pub upper_lhs: f64,
    /// Reference `3^(-2kp) w(Q_j)^(kappa-1) w(3^k Q_j)`.
    pub upper_ref: f64,
    /// Implied upper-bound constant `upper_lhs / upper_ref`.
    pub c2: f64,
    /// Exact geometric inclusions `3^(k-1)Q_j c 4Q_j^k c 3^(k+1)Q_j`.
    pub inclusions_exact: bool,
    /// `w(Q_j^k) / w(3^k Q_j)`.
    pub weight_ratio: f64,
}

fn annulus_samples(spec: &GridSpec, outer: &Square, inner: &Square) -> Vec<usize> {
    let (ox_lo, ox_hi, oy_lo, oy_hi) = outer.index_ranges(spec);
    let (ix_lo, ix_hi, iy_lo, iy_hi) = inner.index_ranges(spec);
    let n = spec.n();
    let mut out = Vec::new();
    for jy in oy_lo..oy_hi {
        let row = jy * n;
        if jy >= iy_lo && jy < iy_hi {
            for jx in ox_lo..ix_lo {
                out.push(row + jx);
            }
            for jx in ix_hi..ox_hi {
                out.push(row + jx);
            }
        } else {
            for jx in ox_lo..ox_hi {
                out.push(row + jx);
            }
        }
    }
    out
}

fn weighted_p_integral(
    values: &[Complex64],
    samples: &[usize],
    w: &Weight,
    p: f64,
    cell: f64,
) -> f64 {
    let mut sum = 0.0;
    for (v, &i) in values.iter().zip(samples) {
        sum += v.norm().powf(p) * w.values()[i];
    }
    sum * cell
}

/// Evaluate the lower bound on the shifted dilates and the upper bound on
/// the dyadic-in-3 annuli for every member and every `k` in range.
pub fn lower_upper_bounds(
    tf: &TestFamily,
    b: &ComplexField,
    w: &Weight,
    params: &MorreyParams,
    k_range: std::ops::RangeInclusive<u32>,
) -> Result<Vec<BoundRow>> {
    let spec = b.spec();
    let p = params.p();
    let cell = spec.cell_area();
    let mut rows = Vec::new();
    for (j, member) in tf.members.iter().enumerate() {
        let wq = weighted_measure(w, &member.square)?;
        let wq_pow = wq.powf(params.kappa() - 1.0);
        for k in k_range.clone() {
            let outer = member.square.scaled(f64::powi(3.0, k as i32 + 1));
            if !outer.inside_half_window(spec) {
                return Err(Error::HalfWindowGuard("dilated square", outer.to_string()));
            }
            let inner = member.square.scaled(f64::powi(3.0, k as i32));
            let target = shifted_dilate(&member.square, k);
            let prev = member.square.scaled(f64::powi(3.0, k as i32 - 1));
            let inclusions_exact =
                target.scaled(4.0).contains_square(&prev) && outer.contains_square(&target.scaled(4.0));

            let w_inner = weighted_measure(w, &inner)?;
            let decay = f64::powi(3.0, k as i32).powf(-2.0 * p);
            let lower_ref = tf.delta.powf(p) * decay * wq_pow * w_inner;
            let upper_ref = decay * wq_pow * w_inner;

            let target_idx = samples_in_square(spec, &target)?;
            let on_target = commutator_on_samples(b, &member.f_j, &target_idx);
            let lower_lhs = weighted_p_integral(&on_target, &target_idx, w, p, cell);

            let ann_idx = annulus_samples(spec, &outer, &inner);
            let on_ann = commutator_on_samples(b, &member.f_j, &ann_idx);
            let upper_lhs = weighted_p_integral(&on_ann, &ann_idx, w, p, cell);

            rows.push(BoundRow {
                j,
                k,
                lower_lhs,
                lower_ref,
                c1: lower_lhs / lower_ref,
                upper_lhs,
                upper_ref,
                c2: upper_lhs / upper_ref,
                inclusions_exact,
                weight_ratio: weighted_measure(w, &target)? / w_inner,
            });
        }
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// Separation experiment
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct SeparationReport {
    /// `(l, m, separation)` for every unordered pair.
    pub pairs: Vec<(usize, usize, f64)>,
    /// Minimum pairwise separation; `None` when fewer than two members.
    pub min_separation: Option<f64>,
    /// Which radii hypothesis held: "non-increasing", "non-decreasing" or
    /// "pinched".
    pub radii_condition: &'static str,
}

/// Pairwise Morrey-norm separations `|| [b,B]f_l - [b,B]f_m ||` over a
/// declared probe family, after verifying that the `3^(k1+1)`-dilates are
/// pairwise disjoint and the radii are monotone or pinched.
pub fn separation_experiment(
    tf: &TestFamily,
    b: &ComplexField,
    w: &Weight,
    params: &MorreyParams,
    k1: u32,
    probe: &SquareFamily,
) -> Result<SeparationReport> {
    let spec = b.spec();
    // 3 C_1 Q_j with C_1 = 3^k1.
    let factor = 3.0 * f64::powi(3.0, k1 as i32);
    let dilates: Vec<Square> = tf.members.iter().map(|m| m.square.scaled(factor)).collect();
    for l in 0..dilates.len() {
        for m in (l + 1)..dilates.len() {
            let (a, c) = (&dilates[l], &dilates[m]);
            let dx = (a.center().re - c.center().re).abs();
            let dy = (a.center().im - c.center().im).abs();
            if dx < a.half_side() + c.half_side() && dy < a.half_side() + c.half_side() {
                return Err(Error::NotDisjoint(a.to_string(), c.to_string()));
            }
        }
    }
    let radii: Vec<f64> = tf.members.iter().map(|m| m.square.half_side()).collect();
    let non_increasing = radii.windows(2).all(|p| p[0] >= p[1]);
    let non_decreasing = radii.windows(2).all(|p| p[0] <= p[1]);
    let radii_condition = if non_increasing {
        "non-increasing"
    } else if non_decreasing {
        "non-decreasing"
    } else if radii.iter().all(|r| *r > 0.0) {
        // A finite family is always pinched between its own extremes.
        "pinched"
    } else {
        return Err(Error::BadRadii);
    };

    // Commutator values per member on every probe square.
    let probe_samples: Vec<Vec<usize>> = probe
        .squares()
        .iter()
        .map(|q| samples_in_square(spec, q))
        .collect::<Result<_>>()?;
    let fields: Vec<Vec<Vec<Complex64>>> = tf
        .members
        .iter()
        .map(|member| {
            probe_samples
                .iter()
                .map(|idx| commutator_on_samples(b, &member.f_j, idx))
                .collect()
        })
        .collect();

    let cell = spec.cell_area();
    let mut pairs = Vec::new();
    for l in 0..tf.members.len() {
        for m in (l + 1)..tf.members.len() {
            let mut norm = 0.0_f64;
            for (qi, q) in probe.squares().iter().enumerate() {
                let idx = &probe_samples[qi];
                let mut sum = 0.0;
                for ((a, c), &i) in fields[l][qi].iter().zip(&fields[m][qi]).zip(idx) {
                    sum += (a - c).norm().powf(params.p()) * w.values()[i];
                }
                let term = (sum * cell).powf(1.0 / params.p())
                    / weighted_measure(w, q)?.powf(params.kappa() / params.p());
                if term > norm {
                    norm = term;
                }
            }
            pairs.push((l, m, norm));
        }
    }
    let min_separation = pairs.iter().map(|p| p.2).fold(None, |acc: Option<f64>, v| {
        Some(acc.map_or(v, |a| a.min(v)))
    });
    Ok(SeparationReport { pairs, min_separation, radii_condition })
}

// ---------------------------------------------------------------------------
// Oscillation vs commutator chain
// ---------------------------------------------------------------------------

/// Every displayed quantity of the oscillation-domination chain, in order.
/// Each step's inequality has a geometric cap recorded next to the measured
/// ratio; the final constant compares the oscillation with the middle
/// commutator quantity.
#[derive(Debug, Clone)]
pub struct ChainReport {
    /// `O(b; Q)`.
    pub osc: f64,
    /// Mean over `Q` of `|b - alpha|` (median over the shifted square).
    pub median_term: f64,
    /// Double mean against the normalized product sets.
    pub pair_term: f64,
    /// Distance-kernel form with `1/|z-u|^2`.
    pub distance_term: f64,
    /// Sign-definite form with `|(x-zeta)(y-eta)| / |z-u|^4`.
    pub kernel_term: f64,
    /// Imaginary-part commutator form.
    pub imag_term: f64,
    /// Direct commutator integrated over the `E_j`.
    pub commutator_e_term: f64,
    /// Direct commutator integrated over all of `Q` (the middle quantity).
    pub commutator_q_term: f64,
    /// `sum_j ||[b,B] chi_{F_j}||_{Morrey} * w(Q)^((kappa-1)/p)`.
    pub norm_term: f64,
    /// Largest observed `|z-u|^2 / |(x-zeta)(y-eta)|` over the sampled
    /// pairs; geometrically below 10/3.
    pub kernel_ratio_max: f64,
    /// `osc / commutator_q_term`.
    pub chain_constant: f64,
    /// `(step name, measured ratio, cap)` for each consecutive step.
    pub steps: Vec<(String, f64, f64)>,
}

/// Evaluate the chain for a real symbol on a centered square. The family
/// passed in is used for the closing Morrey-norm quantity; it should
/// contain `Q` itself for the closing step to be meaningful.
pub fn oscillation_vs_commutator(
    b: &ComplexField,
    square: &Square,
    w: &Weight,
    params: &MorreyParams,
    family: &SquareFamily,
) -> Result<ChainReport> {
    let spec = b.spec();
    let sets = product_sets(b, square)?;
    let alpha = sets.alpha;
    let h2 = spec.cell_area();
    let q_idx = samples_in_square(spec, square)?;
    let m_q = q_idx.len() as f64;
    let area_q = h2 * m_q;
    let m_shift = samples_in_square(spec, &sets.shifted_square)?.len();

    let osc = mean_oscillation(b, square)?;
    let median_term =
        q_idx.iter().map(|&i| (b.values()[i].re - alpha).abs()).sum::<f64>() / m_q;

    let mut pair_term = 0.0;
    let mut distance_term = 0.0;
    let mut kernel_term = 0.0;
    let mut imag_term = 0.0;
    let mut commutator_e_term = 0.0;
    let mut commutator_q_term = 0.0;
    let mut norm_term = 0.0;
    let mut kernel_ratio_max = 0.0_f64;
    let wq = weighted_measure(w, square)?;

    for j in [1usize, 2] {
        let e = sets.e(j);
        let f = sets.f(j);
        let f_points: Vec<(f64, f64, f64)> = f
            .iter()
            .map(|&i| {
                let u = spec.point_at(i);
                (u.re, u.im, b.values()[i].re)
            })
            .collect();

        let sum_dev: f64 = e.iter().map(|&i| (b.values()[i].re - alpha).abs()).sum();
        pair_term += f.len() as f64 * sum_dev / (m_q * m_q);

        let mut s_dist = 0.0;
        let mut s_kern = 0.0;
        let mut s_imag = 0.0;
        for &zi in e {
            let z = spec.point_at(zi);
            let bz = b.values()[zi].re;
            let dev = (bz - alpha).abs();
            let mut dist = 0.0;
            let mut kern = 0.0;
            let mut imag = 0.0;
            for &(ux, uy, bu) in &f_points {
                let s = z.re - ux;
                let t = z.im - uy;
                let d2 = s * s + t * t;
                dist += 1.0 / d2;
                let st = (s * t).abs();
                kern += (bz - bu).abs() * st / (d2 * d2);
                // Im K_B(v) = (2 s t / pi) / |v|^4, a real kernel.
                imag += (bz - bu) * 2.0 * s * t / (PI * d2 * d2);
                kernel_ratio_max = kernel_ratio_max.max(d2 / st);
            }
            s_dist += dev * dist;
            s_kern += kern;
            s_imag += imag.abs();
        }
        distance_term += h2 * s_dist / m_q;
        kernel_term += h2 * s_kern / m_q;
        imag_term += h2 * s_imag / m_q;

        // Direct commutator of chi_{F_j} on all of Q: the middle quantity,
        // restricted to E_j for the step before it.
        let chi_sparse = SparseField::new(*spec, f.iter().map(|&i| (i, 1.0)).collect());
        let comm = commutator_on_samples(b, &chi_sparse, &q_idx);
        let e_set: std::collections::HashSet<usize> = e.iter().copied().collect();
        for (v, &i) in comm.iter().zip(&q_idx) {
            let m = v.norm();
            commutator_q_term += m / m_q;
            if e_set.contains(&i) {
                commutator_e_term += m / m_q;
            }
        }

        // Closing quantity: the commutator as a global operator, in the
        // declared Morrey norm.
        let comm_global = commutator_apply(b, &chi_sparse.to_dense(), CommutatorMode::Fft)?;
        norm_term += morrey_norm(&comm_global, w, params, family)?
            * wq.powf((params.kappa() - 1.0) / params.p());
    }

    // Discrete caps for each step, from the set constructions and the
    // geometry of the diagonal shift (distances between Q and Q~ lie in
    // [2r, 6r] per axis).
    let r = square.half_side();
    let cap_median = 2.0;
    let cap_pair = m_q / ((m_shift + 1) / 2) as f64;
    let cap_distance = 72.0 * r * r / area_q;
    let cap_kernel = 10.0 / 3.0;
    let steps = vec![
        ("osc_vs_median".to_string(), osc / median_term, cap_median),
        ("median_vs_pair".to_string(), median_term / pair_term, cap_pair),
        ("pair_vs_distance".to_string(), pair_term / distance_term, cap_distance),
        ("distance_vs_kernel".to_string(), distance_term / kernel_term, cap_kernel),
        ("kernel_vs_imag".to_string(), kernel_term / imag_term, PI / 2.0),
        ("imag_vs_commutator".to_string(), imag_term / commutator_e_term, 1.0),
        ("e_vs_q".to_string(), commutator_e_term / commutator_q_term, 1.0),
    ];

    Ok(ChainReport {
        osc,
        median_term,
        pair_term,
        distance_term,
        kernel_term,
        imag_term,
        commutator_e_term,
        commutator_q_term,
        norm_term,
        kernel_ratio_max,
        chain_constant: osc / commutator_q_term,
        steps,
    })
}

/// Finite surrogate for the operator norm: the largest Morrey-norm ratio
/// `||[b,B]g|| / ||g||` over a declared probe set.
pub fn operator_norm_proxy(
    b: &ComplexField,
    probes: &[ComplexField],
    w: &Weight,
    params: &MorreyParams,
    family: &SquareFamily,
) -> Result<f64> {
    let mut best = 0.0_f64;
    for g in probes {
        let denom = morrey_norm(g, w, params, family)?;
        if denom == 0.0 {
            continue;
        }
        let comm = commutator_apply(b, g, CommutatorMode::Fft)?;
        let ratio = morrey_norm(&comm, w, params, family)? / denom;
        if ratio > best {
            best = ratio;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields;
    use crate::grid::GridSpec;

    fn spec() -> GridSpec {
        GridSpec::new(128, 4.0).unwrap()
    }

    fn setup_weight(g: GridSpec) -> (Weight, MorreyParams) {
        let w = Weight::power(g, Complex64::new(0.0, 0.0), 1.0, 2.0).unwrap();
        let params = MorreyParams::new(2.0, 0.5).unwrap();
        (w, params)
    }

    #[test]
    fn commutator_with_constant_symbol_vanishes() {
        let g = spec();
        let b = ComplexField::constant(g, Complex64::new(2.0, 0.0));
        let f = fields::band_limited(g, 5, 6);
        let fft = commutator_apply(&b, &f, CommutatorMode::Fft).unwrap();
        assert!(fft.l2_norm() < 1e-12 * f.l2_norm());
        let g64 = GridSpec::new(64, 4.0).unwrap();
        let b2 = ComplexField::constant(g64, Complex64::new(2.0, 0.0));
        let f2 = fields::band_limited(g64, 5, 6);
        let quad = commutator_apply(
            &b2,
            &f2,
            CommutatorMode::Quadrature(TruncationScale::finest(&g64)),
        )
        .unwrap();
        assert!(quad.l2_norm() < 1e-10 * f2.l2_norm());
    }

    #[test]
    fn commutator_of_zero_field_vanishes() {
        let g = spec();
        let b = fields::band_limited_real(g, 1, 4);
        let f = ComplexField::zeros(g);
        assert_eq!(commutator_apply(&b, &f, CommutatorMode::Fft).unwrap().l2_norm(), 0.0);
    }

    #[test]
    fn commutator_additive_in_symbol() {
        let g = spec();
        let b1 = fields::band_limited_real(g, 2, 5);
        let b2 = fields::band_limited_real(g, 3, 5);
        let f = fields::band_limited(g, 4, 5);
        let sum = commutator_apply(&b1.add(&b2), &f, CommutatorMode::Fft).unwrap();
        let parts = commutator_apply(&b1, &f, CommutatorMode::Fft)
            .unwrap()
            .add(&commutator_apply(&b2, &f, CommutatorMode::Fft).unwrap());
        let rel = sum.sub(&parts).l2_norm() / f.l2_norm();
        assert!(rel < 1e-11, "rel = {rel}");
    }

    #[test]
    fn product_sets_constant_symbol_degenerates() {
        let g = spec();
        let b = ComplexField::constant(g, Complex64::new(1.5, 0.0));
        let q = Square::new(Complex64::new(-0.8, -0.8), 0.15).unwrap();
        let sets = product_sets(&b, &q).unwrap();
        let nq = q.sample_count(&g);
        let ns = sets.shifted_square.sample_count(&g);
        assert_eq!(sets.e1.len(), nq);
        assert_eq!(sets.e2.len(), nq);
        assert_eq!(sets.f1.len(), ns);
        assert_eq!(sets.f2.len(), ns);
    }

    #[test]
    fn product_sets_linear_symbol_splits_by_line() {
        let g = spec();
        let b = ComplexField::from_fn(g, |z| Complex64::new(z.re, 0.0)).unwrap();
        let q = Square::new(Complex64::new(-0.9, -0.9), 0.2).unwrap();
        let sets = product_sets(&b, &q).unwrap();
        let ns = sets.shifted_square.sample_count(&g);
        assert!(sets.f1.len() >= ns / 2);
        assert!(sets.f2.len() >= ns / 2);
        for &i in &sets.e1 {
            assert!(b.values()[i].re >= sets.alpha);
        }
        for &i in &sets.e2 {
            assert!(b.values()[i].re <= sets.alpha);
        }
    }

    #[test]
    fn product_sets_invariants_on_random_symbols() {
        let g = spec();
        for seed in 0..3u64 {
            let b = fields::band_limited_real(g, seed + 40, 5);
            let q = Square::new(Complex64::new(-0.7, -0.5), 0.21).unwrap();
            let sets = product_sets(&b, &q).unwrap();
            // Cover.
            let nq = q.sample_count(&g);
            let ns = sets.shifted_square.sample_count(&g);
            let mut covered: std::collections::HashSet<usize> =
                sets.e1.iter().copied().collect();
            covered.extend(&sets.e2);
            assert_eq!(covered.len(), nq);
            let mut coveref: std::collections::HashSet<usize> =
                sets.f1.iter().copied().collect();
            coveref.extend(&sets.f2);
            assert_eq!(coveref.len(), ns);
            // Half cardinality.
            assert!(sets.f1.len() >= ns / 2);
            assert!(sets.f2.len() >= ns / 2);
            // Domination and single signs on a pair subsample.
            for j in [1, 2] {
                let e = sets.e(j);
                let f = sets.f(j);
                let step_e = (e.len() / 32).max(1);
                let step_f = (f.len() / 32).max(1);
                for &zi in e.iter().step_by(step_e) {
                    for &ui in f.iter().step_by(step_f) {
                        let bz = b.values()[zi].re;
                        let bu = b.values()[ui].re;
                        assert!((bz - sets.alpha).abs() <= (bz - bu).abs() + 1e-14);
                        let z = g.point_at(zi);
                        let u = g.point_at(ui);
                        assert!((z.re - u.re) * (z.im - u.im) > 0.0);
                        if j == 1 {
                            assert!(bz - bu >= 0.0);
                        } else {
                            assert!(bz - bu <= 0.0);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn product_sets_rejects_shift_outside_half_window() {
        let g = spec();
        let b = fields::band_limited_real(g, 9, 4);
        let q = Square::new(Complex64::new(1.5, 1.5), 0.3).unwrap();
        assert!(product_sets(&b, &q).is_err());
    }

    #[test]
    fn test_family_invariants() {
        let g = GridSpec::new(512, 4.0).unwrap();
        let (w, params) = setup_weight(g);
        let h = g.spacing();
        for seed in 0..3u64 {
            let b = fields::band_limited_real(g, seed + 60, 5);
            let squares = vec![
                Square::new(Complex64::new(0.0, 0.0), 4.0 * h).unwrap(),
                Square::new(Complex64::new(8.0 * h, 4.0 * h), 4.0 * h).unwrap(),
            ];
            let mut deltas = Vec::new();
            for q in &squares {
                deltas.push(mean_oscillation(&b, q).unwrap());
            }
            let delta = 0.5 * deltas.iter().cloned().fold(f64::INFINITY, f64::min);
            assert!(delta > 0.0);
            let tf = build_test_family(&b, &squares, &w, &params, 2, delta).unwrap();
            for member in &tf.members {
                // Mean zero within 1e-12 of the discrete sum scale.
                let m = member.square.sample_count(&g) as f64;
                let scale = member.weight_factor * m;
                assert!(member.f_j.value_sum().abs() <= 1e-12 * scale);
                // |a_j| <= 1/2 (and a fortiori the slack bound).
                assert!(member.a_j.abs() <= 0.5 + 1.0 / m);
                // Sign alignment and two-sided size on the strict level sets.
                for &(i, v) in member.f_j.entries() {
                    let dev = b.values()[i].re - member.alpha;
                    assert!(v * dev >= 0.0, "sign property violated");
                }
                for &i in member.upper.iter().chain(&member.lower) {
                    let v = member
                        .f_j
                        .entries()
                        .iter()
                        .find(|(k, _)| *k == i)
                        .unwrap()
                        .1
                        .abs();
                    assert!(v >= member.weight_factor * 0.5 * (1.0 - 1e-12));
                    assert!(v <= member.weight_factor * 1.5 * (1.0 + 1e-12));
                }
            }
        }
    }

    #[test]
    fn test_family_rejects_low_oscillation() {
        let g = spec();
        let (w, params) = setup_weight(g);
        let b = fields::band_limited_real(g, 3, 4);
        let q = Square::new(Complex64::new(0.0, 0.0), 0.0625).unwrap();
        let err = build_test_family(&b, &[q], &w, &params, 2, 1e9);
        assert!(matches!(err, Err(Error::OscillationBelowThreshold { .. })));
    }

    #[test]
    fn shifted_dilate_geometry_and_inclusions() {
        // Dyadic geometry: every coordinate below is exact in f64.
        let q = Square::new(Complex64::new(0.25, -0.125), 0.0078125).unwrap();
        for k in 1..=5u32 {
            let target = shifted_dilate(&q, k);
            let prev = q.scaled(f64::powi(3.0, k as i32 - 1));
            let outer = q.scaled(f64::powi(3.0, k as i32 + 1));
            assert!(target.scaled(4.0).contains_square(&prev), "k = {k}");
            assert!(outer.contains_square(&target.scaled(4.0)), "k = {k}");
            // Disjoint from the source square.
            assert!(
                target.center().re - target.half_side() >= q.center().re + q.half_side(),
                "k = {k}"
            );
        }
    }

    #[test]
    fn constant_symbol_commutator_sums_vanish() {
        let g = spec();
        let b = ComplexField::constant(g, Complex64::new(4.0, 0.0));
        let q = Square::new(Complex64::new(0.0, 0.0), 0.0625).unwrap();
        let idx = samples_in_square(&g, &q).unwrap();
        let src = SparseField::new(g, idx.iter().map(|&i| (i, 1.0)).collect());
        let eval = shifted_dilate(&q, 2);
        let eval_idx = samples_in_square(&g, &eval).unwrap();
        let vals = commutator_on_samples(&b, &src, &eval_idx);
        for v in vals {
            assert_eq!(v.norm(), 0.0);
        }
    }

    #[test]
    fn chain_report_trivial_and_random_symbols() {
        let g = spec();
        let (w, params) = setup_weight(g);
        let q = Square::new(Complex64::new(-0.5, -0.5), 0.25).unwrap();
        let family = SquareFamily::new(&g, "chain", vec![q])
            .unwrap()
            .merged(&SquareFamily::dyadic_centered(&g, 1..=3).unwrap());

        // Linear symbol: the classical example with a modest constant.
        let b = ComplexField::from_fn(g, |z| Complex64::new(z.re, 0.0)).unwrap();
        let rep = oscillation_vs_commutator(&b, &q, &w, &params, &family).unwrap();
        assert!(rep.chain_constant <= 64.0, "C = {}", rep.chain_constant);
        assert!(rep.kernel_ratio_max < 10.0 / 3.0 + 0.01);
        for (name, ratio, cap) in &rep.steps {
            assert!(
                *ratio <= cap * (1.0 + 1e-9),
                "step {name}: ratio {ratio} exceeds cap {cap}"
            );
        }
        // The imaginary-part identity is an equality up to rounding.
        let (_, ratio, cap) = &rep.steps[4];
        assert!((ratio - cap).abs() < 1e-9 * cap);
    }

    #[test]
    fn chain_constant_symbol_all_zero() {
        let g = spec();
        let (w, params) = setup_weight(g);
        let q = Square::new(Complex64::new(-0.5, -0.5), 0.25).unwrap();
        let family = SquareFamily::new(&g, "one", vec![q]).unwrap();
        let b = ComplexField::constant(g, Complex64::new(3.0, 0.0));
        let rep = oscillation_vs_commutator(&b, &q, &w, &params, &family).unwrap();
        assert_eq!(rep.osc, 0.0);
        assert!(rep.commutator_q_term < 1e-14);
        assert!(rep.norm_term < 1e-10);
    }
}
