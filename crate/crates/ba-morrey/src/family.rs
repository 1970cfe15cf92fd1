//! Declared finite square families.
//!
//! Every supremum over "all squares" is evaluated on a finite family that is
//! declared up front and carried in reports, so results are reproducible.

use crate::error::{Error, Result};
use crate::grid::{GridSpec, Square};
use rustfft::num_complex::Complex64;

/// A labelled, non-empty list of squares; each square must contain at least
/// one grid sample.
#[derive(Debug, Clone)]
pub struct SquareFamily {
    label: String,
    squares: Vec<Square>,
}

impl SquareFamily {
    pub fn new(spec: &GridSpec, label: impl Into<String>, squares: Vec<Square>) -> Result<Self> {
        if squares.is_empty() {
            return Err(Error::EmptyFamily);
        }
        for q in &squares {
            if !q.intersects_window(spec) {
                return Err(Error::OutsideWindow(q.to_string()));
            }
            if q.sample_count(spec) == 0 {
                return Err(Error::EmptySquare(q.to_string()));
            }
        }
        Ok(Self { label: label.into(), squares })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn squares(&self) -> &[Square] {
        &self.squares
    }

    pub fn len(&self) -> usize {
        self.squares.len()
    }

    pub fn is_empty(&self) -> bool {
        self.squares.is_empty()
    }

    /// Union of two families (labels joined with `+`).
    pub fn merged(&self, other: &SquareFamily) -> SquareFamily {
        let mut squares = self.squares.clone();
        squares.extend_from_slice(&other.squares);
        SquareFamily { label: format!("{}+{}", self.label, other.label), squares }
    }

    /// Centered squares of dyadic radii `L/2^j` for `j` in `exponents`.
    pub fn dyadic_centered(spec: &GridSpec, exponents: std::ops::RangeInclusive<u32>) -> Result<Self> {
        let l = spec.half_width();
        let mut squares = Vec::new();
        for j in exponents {
            let r = l / f64::powi(2.0, j as i32);
            squares.push(Square::new(Complex64::new(0.0, 0.0), r)?);
        }
        SquareFamily::new(spec, "dyadic-centered", squares)
    }

    /// For each dyadic radius `L/2^j`, squares on a lattice of pitch equal to
    /// the radius, so every window point is covered at every scale.
    pub fn dyadic_cover(spec: &GridSpec, exponents: std::ops::RangeInclusive<u32>) -> Result<Self> {
        let l = spec.half_width();
        let mut squares = Vec::new();
        for j in exponents {
            let r = l / f64::powi(2.0, j as i32);
            let steps = (2.0 * l / r).round() as i64;
            for ky in 0..steps {
                for kx in 0..steps {
                    let c = Complex64::new(-l + (kx as f64 + 0.5) * r, -l + (ky as f64 + 0.5) * r);
                    squares.push(Square::new(c, r)?);
                }
            }
        }
        SquareFamily::new(spec, "dyadic-cover", squares)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cover_contains_every_point_at_every_scale() {
        let spec = GridSpec::new(32, 2.0).unwrap();
        let fam = SquareFamily::dyadic_cover(&spec, 1..=3).unwrap();
        let z = Complex64::new(0.71, -1.13);
        for j in 1..=3u32 {
            let r = spec.half_width() / f64::powi(2.0, j as i32);
            let hit = fam
                .squares()
                .iter()
                .any(|q| (q.half_side() - r).abs() < 1e-12 && q.contains_point(z));
            assert!(hit, "no covering square of radius {r}");
        }
    }

    #[test]
    fn empty_family_rejected() {
        let spec = GridSpec::new(32, 2.0).unwrap();
        assert!(SquareFamily::new(&spec, "none", vec![]).is_err());
    }
}
