//! Triple product `{x,y,z} = ½(xy*z + zy*x)` and the operators built from it.
//!
//! All products act blockwise on ℓ∞-sums. Conjugate-linear maps such as `Q(x,y)` are
//! exposed both as callables and through their realification, a real matrix acting
//! on [`TripleElement::to_real_vector`] coordinates.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::element::{spectral_norm, CMatrix, SpaceDescriptor, Tolerance, TripleElement};
use crate::error::{Result, TripleError};

fn block_triple(x: &CMatrix, y: &CMatrix, z: &CMatrix) -> CMatrix {
    let ystar = y.adjoint();
    (x * &ystar * z + z * &ystar * x) * Complex64::new(0.5, 0.0)
}

fn ensure_all_same(first: &TripleElement, rest: &[&TripleElement]) -> Result<()> {
    rest.iter().try_for_each(|e| first.space().ensure_same(e.space()))
}

/// `{x,y,z}`, linear in `x` and `z`, conjugate-linear in `y`.
pub fn triple_product(x: &TripleElement, y: &TripleElement, z: &TripleElement) -> Result<TripleElement> {
    ensure_all_same(x, &[y, z])?;
    Ok(x.map_blocks(|i, xb| block_triple(xb, y.block(i), z.block(i))))
}

/// A real-linear operator on the realified space of a descriptor.
pub trait RealLinearOperator {
    fn space(&self) -> &SpaceDescriptor;

    /// Applies the map; the argument must already live on [`Self::space`].
    fn map(&self, z: &TripleElement) -> TripleElement;

    fn apply(&self, z: &TripleElement) -> Result<TripleElement> {
        self.space().ensure_same(z.space())?;
        Ok(self.map(z))
    }

    /// Matrix of the map in realified coordinates (real parts over imaginary parts).
    fn realified(&self) -> DMatrix<f64> {
        let space = self.space();
        let d = space.real_dim();
        let mut out = DMatrix::zeros(d, d);
        for k in 0..d {
            let mut e = DVector::zeros(d);
            e[k] = 1.0;
            let basis = TripleElement::from_real_vector(space, &e).expect("dimension matches");
            out.set_column(k, &self.map(&basis).to_real_vector());
        }
        out
    }
}

/// `z ↦ {x,z,y}`. Conjugate-linear; `Q(x) := Q(x,x)`.
#[derive(Debug, Clone)]
pub struct ConjugateLinearMap {
    x: TripleElement,
    y: TripleElement,
}

impl RealLinearOperator for ConjugateLinearMap {
    fn space(&self) -> &SpaceDescriptor {
        self.x.space()
    }

    fn map(&self, z: &TripleElement) -> TripleElement {
        self.x.map_blocks(|i, xb| block_triple(xb, z.block(i), self.y.block(i)))
    }
}

pub fn q_operator(x: &TripleElement, y: &TripleElement) -> Result<ConjugateLinearMap> {
    x.space().ensure_same(y.space())?;
    Ok(ConjugateLinearMap {
        x: x.clone(),
        y: y.clone(),
    })
}

/// `Q(x)z = {x,z,x}`, blockwise `x z* x`.
pub fn quadratic(x: &TripleElement, z: &TripleElement) -> Result<TripleElement> {
    triple_product(x, z, x)
}

#[derive(Debug, Clone)]
enum LinearKind {
    /// `L(x,y)z = {x,y,z}`
    Multiplication { x: TripleElement, y: TripleElement },
    /// `B(x,y) = I − 2L(x,y) + Q(x)Q(y)`
    Bergman { x: TripleElement, y: TripleElement },
    /// `P_k(e)`, `k ∈ {0,1,2}`
    Peirce { e: TripleElement, k: u8 },
}

/// A complex-linear operator built from the triple product.
#[derive(Debug, Clone)]
pub struct LinearMap {
    kind: LinearKind,
}

impl LinearMap {
    /// Eigenvalues of the symmetric part of the realified matrix, ascending.
    ///
    /// For hermitian operators such as `L(a,a)` or the Peirce projections this is
    /// the spectrum, each complex eigenvalue appearing twice.
    pub fn symmetric_spectrum(&self) -> Vec<f64> {
        let m = self.realified();
        let sym = (&m + m.transpose()) * 0.5;
        let mut values: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
        values.sort_by(f64::total_cmp);
        values
    }

    /// Operator norm for the spectral-norm triple structure. Exact for Bergman
    /// operators, which factor blockwise as `z ↦ A z C` with norm `max_j ‖A_j‖ ‖C_j‖`;
    /// an upper bound through the realified Frobenius structure otherwise.
    pub fn operator_norm(&self) -> f64 {
        match &self.kind {
            LinearKind::Bergman { x, y } => x
                .blocks()
                .iter()
                .zip(y.blocks())
                .map(|(xb, yb)| {
                    let (left, right) = bergman_factors(xb, yb);
                    spectral_norm(&left) * spectral_norm(&right)
                })
                .fold(0.0, f64::max),
            _ => {
                // ‖T‖_{∞→∞} ≤ √(Σ_j min(m_j,n_j)) · ‖T‖_{F→F}.
                let total_rank = self.space().full_ranks().into_iter().sum::<usize>() as f64;
                let realified = self.realified();
                let two_norm = crate::linalg::real_spectral_norm(&realified);
                two_norm * total_rank.sqrt()
            }
        }
    }
}

fn bergman_factors(x: &CMatrix, y: &CMatrix) -> (CMatrix, CMatrix) {
    let (m, n) = x.shape();
    let left = CMatrix::identity(m, m) - x * y.adjoint();
    let right = CMatrix::identity(n, n) - y.adjoint() * x;
    (left, right)
}

impl RealLinearOperator for LinearMap {
    fn space(&self) -> &SpaceDescriptor {
        match &self.kind {
            LinearKind::Multiplication { x, .. } | LinearKind::Bergman { x, .. } => x.space(),
            LinearKind::Peirce { e, .. } => e.space(),
        }
    }

    fn map(&self, z: &TripleElement) -> TripleElement {
        match &self.kind {
            LinearKind::Multiplication { x, y } => x.map_blocks(|i, xb| block_triple(xb, y.block(i), z.block(i))),
            LinearKind::Bergman { x, y } => z.map_blocks(|i, zb| {
                let (xb, yb) = (x.block(i), y.block(i));
                let l = block_triple(xb, yb, zb);
                let qy = block_triple(yb, zb, yb);
                let qxqy = block_triple(xb, &qy, xb);
                zb - l * Complex64::new(2.0, 0.0) + qxqy
            }),
            LinearKind::Peirce { e, k } => z.map_blocks(|i, zb| {
                let eb = e.block(i);
                let q2 = block_triple(eb, &block_triple(eb, zb, eb), eb);
                let l = block_triple(eb, eb, zb);
                let two = Complex64::new(2.0, 0.0);
                match k {
                    2 => q2,
                    1 => (l - &q2) * two,
                    _ => zb - l * two + q2,
                }
            }),
        }
    }
}

/// `L(x,y)z = {x,y,z}`.
pub fn l_operator(x: &TripleElement, y: &TripleElement) -> Result<LinearMap> {
    x.space().ensure_same(y.space())?;
    Ok(LinearMap {
        kind: LinearKind::Multiplication {
            x: x.clone(),
            y: y.clone(),
        },
    })
}

/// `B(x,y)z = z − 2{x,y,z} + Q(x)Q(y)z`; blockwise `(1 − xy*) z (1 − y*x)`.
pub fn bergman_operator(x: &TripleElement, y: &TripleElement) -> Result<LinearMap> {
    x.space().ensure_same(y.space())?;
    Ok(LinearMap {
        kind: LinearKind::Bergman {
            x: x.clone(),
            y: y.clone(),
        },
    })
}

/// `‖{x,x,x} − x‖ ≤ rtol · max(1, ‖x‖)`.
pub fn is_tripotent(x: &TripleElement, tol: Tolerance) -> bool {
    tripotent_residual(x) <= tol.scaled(x.norm())
}

fn tripotent_residual(x: &TripleElement) -> f64 {
    let cube = triple_product(x, x, x).expect("same element");
    (&cube - x).norm()
}

/// A validated tripotent (blockwise partial isometry).
#[derive(Debug, Clone, PartialEq)]
pub struct Tripotent {
    element: TripleElement,
    rank_per_block: Vec<usize>,
    complete: bool,
}

impl Tripotent {
    pub fn new(element: TripleElement, tol: Tolerance) -> Result<Self> {
        let residual = tripotent_residual(&element);
        if residual > tol.scaled(element.norm()) {
            return Err(TripleError::InvalidTripotent { residual });
        }
        // Singular values of a partial isometry are 0 or 1.
        let rank_per_block: Vec<usize> = element
            .blocks()
            .iter()
            .map(|b| crate::linalg::singular_values(b).iter().filter(|&&s| s > 0.5).count())
            .collect();
        let complete = rank_per_block == element.space().full_ranks();
        Ok(Self {
            element,
            rank_per_block,
            complete,
        })
    }

    pub fn zero(space: &SpaceDescriptor) -> Self {
        Self {
            element: TripleElement::zeros(space),
            rank_per_block: vec![0; space.num_blocks()],
            complete: false,
        }
    }

    pub fn element(&self) -> &TripleElement {
        &self.element
    }

    pub fn into_element(self) -> TripleElement {
        self.element
    }

    pub fn space(&self) -> &SpaceDescriptor {
        self.element.space()
    }

    pub fn rank_per_block(&self) -> &[usize] {
        &self.rank_per_block
    }

    /// `E₀(e) = {0}`; in matrix factors, every block has rank `min(rows, cols)`.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    /// `E₁(e) ≠ {0}`.
    pub fn has_peirce1(&self) -> bool {
        self.space()
            .factors()
            .iter()
            .zip(&self.rank_per_block)
            .any(|(&(m, n), &r)| r > 0 && (r < m || r < n))
    }

    pub fn projection(&self, k: u8) -> LinearMap {
        assert!(k <= 2, "Peirce index must be 0, 1 or 2");
        LinearMap {
            kind: LinearKind::Peirce {
                e: self.element.clone(),
                k,
            },
        }
    }

    /// `P_k(e)(x)`.
    pub fn project(&self, k: u8, x: &TripleElement) -> Result<TripleElement> {
        self.projection(k).apply(x)
    }

    /// Distance of `x` from the Peirce 2-space: `‖x − P₂(e)x‖`.
    pub fn peirce2_residual(&self, x: &TripleElement) -> Result<f64> {
        Ok((x - &self.project(2, x)?).norm())
    }
}

/// Completeness of a validated tripotent; equivalent to `P₀(e) = 0`.
pub fn is_complete(e: &Tripotent) -> bool {
    e.is_complete()
}

/// The three Peirce components of an element relative to a tripotent.
#[derive(Debug, Clone)]
pub struct PeirceDecomposition {
    pub tripotent: Tripotent,
    pub p2: TripleElement,
    pub p1: TripleElement,
    pub p0: TripleElement,
}

impl PeirceDecomposition {
    pub fn reconstruct(&self) -> TripleElement {
        &(&self.p2 + &self.p1) + &self.p0
    }

    pub fn component(&self, k: u8) -> &TripleElement {
        match k {
            2 => &self.p2,
            1 => &self.p1,
            _ => &self.p0,
        }
    }
}

pub fn peirce_decompose(a: &TripleElement, e: &Tripotent) -> Result<PeirceDecomposition> {
    e.space().ensure_same(a.space())?;
    Ok(PeirceDecomposition {
        tripotent: e.clone(),
        p2: e.project(2, a)?,
        p1: e.project(1, a)?,
        p0: e.project(0, a)?,
    })
}

fn ensure_in_peirce2(e: &Tripotent, x: &TripleElement, tol: Tolerance) -> Result<()> {
    let residual = e.peirce2_residual(x)?;
    if residual > tol.scaled(x.norm()) {
        return Err(TripleError::NotInPeirce2 { residual });
    }
    Ok(())
}

/// Jordan product `x ∘_e y = {x,e,y}` of the unital algebra `E₂(e)`.
pub fn jordan_product_at(e: &Tripotent, x: &TripleElement, y: &TripleElement, tol: Tolerance) -> Result<TripleElement> {
    ensure_in_peirce2(e, x, tol)?;
    ensure_in_peirce2(e, y, tol)?;
    triple_product(x, e.element(), y)
}

/// Involution `x^{*_e} = {e,x,e}` of `E₂(e)`.
pub fn involution_at(e: &Tripotent, x: &TripleElement, tol: Tolerance) -> Result<TripleElement> {
    ensure_in_peirce2(e, x, tol)?;
    triple_product(e.element(), x, e.element())
}
