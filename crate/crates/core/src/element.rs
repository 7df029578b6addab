//! Elements of a finite ℓ∞-sum of rectangular complex matrix factors.
//!
//! A [`SpaceDescriptor`] lists the factor shapes; a [`TripleElement`] carries one
//! complex matrix per factor. The norm of an element is the largest spectral norm
//! over its blocks.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TripleError};

pub type CMatrix = DMatrix<Complex64>;

/// Default relative tolerance for numerical equality decisions.
pub const DEFAULT_RTOL: f64 = 1e-9;

/// Relative tolerance used by predicates and rank decisions.
///
/// Absolute thresholds are derived as `rtol * max(1, ‖input‖)`; numerical rank
/// uses `rtol * max(rows, cols) * σ_max` per block.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Tolerance(pub f64);

impl Tolerance {
    pub fn value(self) -> f64 {
        self.0
    }

    pub fn scaled(self, magnitude: f64) -> f64 {
        self.0 * magnitude.max(1.0)
    }

    /// Singular values strictly above this are retained in a block of shape `(rows, cols)`.
    pub fn rank_threshold(self, rows: usize, cols: usize, sigma_max: f64) -> f64 {
        self.0 * rows.max(cols) as f64 * sigma_max
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance(DEFAULT_RTOL)
    }
}

/// Shape of the ambient triple: an ordered, non-empty list of `(rows, cols)` factors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<(usize, usize)>", into = "Vec<(usize, usize)>")]
pub struct SpaceDescriptor {
    factors: Vec<(usize, usize)>,
}

impl SpaceDescriptor {
    pub fn new(factors: Vec<(usize, usize)>) -> Result<Self> {
        if factors.is_empty() {
            return Err(TripleError::InvalidSpace("no factors".into()));
        }
        if let Some(&(m, n)) = factors.iter().find(|&&(m, n)| m == 0 || n == 0) {
            return Err(TripleError::InvalidSpace(format!("factor {m}x{n} has a zero dimension")));
        }
        Ok(Self { factors })
    }

    /// A single rectangular factor `M_{rows,cols}`.
    pub fn single(rows: usize, cols: usize) -> Self {
        Self::new(vec![(rows, cols)]).expect("factor dimensions must be positive")
    }

    pub fn square(n: usize) -> Self {
        Self::single(n, n)
    }

    pub fn factors(&self) -> &[(usize, usize)] {
        &self.factors
    }

    pub fn num_blocks(&self) -> usize {
        self.factors.len()
    }

    pub fn is_single(&self) -> bool {
        self.factors.len() == 1
    }

    /// Complex dimension of the space.
    pub fn dim(&self) -> usize {
        self.factors.iter().map(|(m, n)| m * n).sum()
    }

    /// Dimension of the realified space (real parts stacked over imaginary parts).
    pub fn real_dim(&self) -> usize {
        2 * self.dim()
    }

    /// `min(rows, cols)` for every factor; the rank of a complete tripotent.
    pub fn full_ranks(&self) -> Vec<usize> {
        self.factors.iter().map(|&(m, n)| m.min(n)).collect()
    }

    pub fn ensure_same(&self, other: &SpaceDescriptor) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(TripleError::IncompatibleSpaces {
                left: self.clone(),
                right: other.clone(),
            })
        }
    }
}

impl fmt::Display for SpaceDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|(m, n)| format!("{m}x{n}")).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for SpaceDescriptor {
    type Err = TripleError;

    /// Parses `"2x2"` or `"2x2,3x2"`.
    fn from_str(s: &str) -> Result<Self> {
        let factors = s
            .split(',')
            .map(|part| {
                let part = part.trim();
                let (m, n) = part
                    .split_once(['x', 'X'])
                    .ok_or_else(|| TripleError::InvalidSpace(format!("expected RxC, got '{part}'")))?;
                let parse = |v: &str| {
                    v.trim()
                        .parse::<usize>()
                        .map_err(|_| TripleError::InvalidSpace(format!("bad dimension in '{part}'")))
                };
                Ok((parse(m)?, parse(n)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(factors)
    }
}

impl TryFrom<Vec<(usize, usize)>> for SpaceDescriptor {
    type Error = TripleError;
    fn try_from(factors: Vec<(usize, usize)>) -> Result<Self> {
        Self::new(factors)
    }
}

impl From<SpaceDescriptor> for Vec<(usize, usize)> {
    fn from(space: SpaceDescriptor) -> Self {
        space.factors
    }
}

/// An element of the ℓ∞-sum described by its [`SpaceDescriptor`].
#[derive(Debug, Clone, PartialEq)]
pub struct TripleElement {
    space: SpaceDescriptor,
    blocks: Vec<CMatrix>,
}

impl TripleElement {
    pub fn new(space: SpaceDescriptor, blocks: Vec<CMatrix>) -> Result<Self> {
        if blocks.len() != space.num_blocks() {
            return Err(TripleError::InvalidSpace(format!(
                "{} blocks supplied for {} factors",
                blocks.len(),
                space.num_blocks()
            )));
        }
        for (index, (block, &expected)) in blocks.iter().zip(space.factors()).enumerate() {
            if block.shape() != expected {
                return Err(TripleError::BlockShape {
                    index,
                    expected,
                    got: block.shape(),
                });
            }
        }
        Ok(Self { space, blocks })
    }

    /// Builds an element whose descriptor is read off the block shapes.
    pub fn from_blocks(blocks: Vec<CMatrix>) -> Result<Self> {
        let space = SpaceDescriptor::new(blocks.iter().map(|b| b.shape()).collect())?;
        Self::new(space, blocks)
    }

    pub fn from_matrix(block: CMatrix) -> Self {
        Self::from_blocks(vec![block]).expect("matrix must have positive dimensions")
    }

    /// Single real matrix given row by row.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let m = rows.len();
        let n = rows.first().map_or(0, |r| r.len());
        Self::from_matrix(CMatrix::from_fn(m, n, |i, j| Complex64::new(rows[i][j], 0.0)))
    }

    pub fn zeros(space: &SpaceDescriptor) -> Self {
        let blocks = space.factors().iter().map(|&(m, n)| CMatrix::zeros(m, n)).collect();
        Self {
            space: space.clone(),
            blocks,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_matrix(CMatrix::identity(n, n))
    }

    /// Square diagonal matrix with real entries.
    pub fn diag(values: &[f64]) -> Self {
        let d = DVector::from_iterator(values.len(), values.iter().map(|&v| Complex64::new(v, 0.0)));
        Self::from_matrix(CMatrix::from_diagonal(&d))
    }

    /// The matrix unit `E_{ij}` in `M_{rows,cols}`.
    pub fn matrix_unit(rows: usize, cols: usize, i: usize, j: usize) -> Self {
        let mut block = CMatrix::zeros(rows, cols);
        block[(i, j)] = Complex64::new(1.0, 0.0);
        Self::from_matrix(block)
    }

    /// ℓ∞-sum of the given elements, concatenating their factor lists.
    pub fn direct_sum(parts: &[TripleElement]) -> Result<Self> {
        Self::from_blocks(parts.iter().flat_map(|p| p.blocks.iter().cloned()).collect())
    }

    pub fn space(&self) -> &SpaceDescriptor {
        &self.space
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn block(&self, index: usize) -> &CMatrix {
        &self.blocks[index]
    }

    pub fn into_blocks(self) -> Vec<CMatrix> {
        self.blocks
    }

    /// Applies `f` to every block, keeping the descriptor.
    pub fn map_blocks(&self, mut f: impl FnMut(usize, &CMatrix) -> CMatrix) -> Self {
        let blocks = self.blocks.iter().enumerate().map(|(i, b)| f(i, b)).collect();
        Self {
            space: self.space.clone(),
            blocks,
        }
    }

    /// Blockwise combination of two elements on the same descriptor.
    pub fn zip_blocks(
        &self,
        other: &TripleElement,
        mut f: impl FnMut(&CMatrix, &CMatrix) -> CMatrix,
    ) -> Result<Self> {
        self.space.ensure_same(&other.space)?;
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| f(a, b)).collect();
        Ok(Self {
            space: self.space.clone(),
            blocks,
        })
    }

    /// Spectral norm of every block.
    pub fn block_norms(&self) -> Vec<f64> {
        self.blocks.iter().map(spectral_norm).collect()
    }

    /// `max_j ‖x_j‖` with the spectral norm on each block.
    pub fn norm(&self) -> f64 {
        self.block_norms().into_iter().fold(0.0, f64::max)
    }

    /// Largest entry modulus; zero test without an SVD.
    pub fn max_abs(&self) -> f64 {
        self.blocks
            .iter()
            .flat_map(|b| b.iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.max_abs() == 0.0
    }

    /// `‖self − other‖`.
    pub fn distance(&self, other: &TripleElement) -> Result<f64> {
        Ok(self.zip_blocks(other, |a, b| a - b)?.norm())
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        self.map_blocks(|_, b| b * factor)
    }

    /// Realified coordinates: all real parts (row-major, block by block) stacked over
    /// all imaginary parts.
    pub fn to_real_vector(&self) -> DVector<f64> {
        let n = self.space.dim();
        let mut out = DVector::zeros(2 * n);
        for (k, z) in self.row_major_entries().enumerate() {
            out[k] = z.re;
            out[n + k] = z.im;
        }
        out
    }

    pub fn from_real_vector(space: &SpaceDescriptor, v: &DVector<f64>) -> Result<Self> {
        let n = space.dim();
        if v.len() != 2 * n {
            return Err(TripleError::InvalidSpace(format!(
                "real vector of length {} for real dimension {}",
                v.len(),
                2 * n
            )));
        }
        let mut offset = 0;
        let blocks = space
            .factors()
            .iter()
            .map(|&(m, c)| {
                let block = CMatrix::from_fn(m, c, |i, j| {
                    let k = offset + i * c + j;
                    Complex64::new(v[k], v[n + k])
                });
                offset += m * c;
                block
            })
            .collect();
        Ok(Self {
            space: space.clone(),
            blocks,
        })
    }

    /// Entries of every block in row-major order, blocks in descriptor order.
    pub fn row_major_entries(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.blocks
            .iter()
            .flat_map(|b| (0..b.nrows()).flat_map(move |i| (0..b.ncols()).map(move |j| b[(i, j)])))
    }

    pub fn from_row_major(space: &SpaceDescriptor, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != space.dim() {
            return Err(TripleError::InvalidSpace(format!(
                "{} entries for complex dimension {}",
                entries.len(),
                space.dim()
            )));
        }
        let mut offset = 0;
        let blocks = space
            .factors()
            .iter()
            .map(|&(m, n)| {
                let block = CMatrix::from_fn(m, n, |i, j| entries[offset + i * n + j]);
                offset += m * n;
                block
            })
            .collect();
        Ok(Self {
            space: space.clone(),
            blocks,
        })
    }

    fn assert_same(&self, other: &TripleElement) {
        assert!(
            self.space == other.space,
            "arithmetic on incompatible spaces {} and {}",
            self.space,
            other.space
        );
    }
}

/// Largest singular value.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() || m.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
        return 0.0;
    }
    crate::linalg::singular_values(m).first().copied().unwrap_or(0.0)
}

// Operators panic on descriptor mismatch; use `zip_blocks` for a checked variant.

impl Add for &TripleElement {
    type Output = TripleElement;
    fn add(self, rhs: &TripleElement) -> TripleElement {
        self.assert_same(rhs);
        self.zip_blocks(rhs, |a, b| a + b).expect("checked above")
    }
}

impl Sub for &TripleElement {
    type Output = TripleElement;
    fn sub(self, rhs: &TripleElement) -> TripleElement {
        self.assert_same(rhs);
        self.zip_blocks(rhs, |a, b| a - b).expect("checked above")
    }
}

impl Add for TripleElement {
    type Output = TripleElement;
    fn add(self, rhs: TripleElement) -> TripleElement {
        &self + &rhs
    }
}

impl Sub for TripleElement {
    type Output = TripleElement;
    fn sub(self, rhs: TripleElement) -> TripleElement {
        &self - &rhs
    }
}

impl Mul<f64> for &TripleElement {
    type Output = TripleElement;
    fn mul(self, rhs: f64) -> TripleElement {
        self.scale(Complex64::new(rhs, 0.0))
    }
}

impl Mul<f64> for TripleElement {
    type Output = TripleElement;
    fn mul(self, rhs: f64) -> TripleElement {
        &self * rhs
    }
}

impl Mul<Complex64> for &TripleElement {
    type Output = TripleElement;
    fn mul(self, rhs: Complex64) -> TripleElement {
        self.scale(rhs)
    }
}

impl Neg for &TripleElement {
    type Output = TripleElement;
    fn neg(self) -> TripleElement {
        self * -1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_descriptors() {
        let s: SpaceDescriptor = "2x2, 3x2".parse().unwrap();
        assert_eq!(s.factors(), &[(2, 2), (3, 2)]);
        assert_eq!(s.to_string(), "2x2,3x2");
        assert_eq!(s.dim(), 10);
        assert!("".parse::<SpaceDescriptor>().is_err());
        assert!("0x2".parse::<SpaceDescriptor>().is_err());
        assert!("2by2".parse::<SpaceDescriptor>().is_err());
    }

    #[test]
    fn composite_norm_is_max_of_block_norms() {
        let a = TripleElement::diag(&[3.0, 0.5]);
        let b = TripleElement::from_real_rows(&[&[0.0, 4.0, 0.0], &[0.0, 0.0, 0.0]]);
        let s = TripleElement::direct_sum(&[a, b]).unwrap();
        assert_eq!(s.block_norms().len(), 2);
        assert!((s.norm() - 4.0).abs() < 1e-14);
    }

    #[test]
    fn block_shapes_must_match() {
        let space = SpaceDescriptor::single(2, 3);
        let err = TripleElement::new(space, vec![CMatrix::zeros(3, 2)]).unwrap_err();
        assert!(matches!(err, TripleError::BlockShape { .. }));
    }

    #[test]
    fn realification_round_trips() {
        let a = TripleElement::from_matrix(CMatrix::from_fn(2, 3, |i, j| {
            Complex64::new(i as f64 + 0.5, j as f64 - 1.0)
        }));
        let v = a.to_real_vector();
        assert_eq!(v.len(), 12);
        assert_eq!(v[1], 0.5);
        assert_eq!(v[6 + 1], 0.0);
        let back = TripleElement::from_real_vector(a.space(), &v).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn distance_rejects_mismatched_spaces() {
        let a = TripleElement::identity(2);
        let b = TripleElement::identity(3);
        assert!(matches!(
            a.distance(&b),
            Err(TripleError::IncompatibleSpaces { .. })
        ));
    }
}
