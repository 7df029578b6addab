//! Singular-value functional calculus on triple elements.
//!
//! Every block `a_j = Σ σ_i u_i v_i*` is handled through its SVD: odd powers and
//! roots act on the singular values, the range tripotent replaces retained singular
//! values by 1, and the generalized inverse inverts them.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::element::{CMatrix, Tolerance, TripleElement};
use crate::error::{Result, TripleError};
use crate::linalg;
use crate::triple::{q_operator, quadratic, RealLinearOperator, Tripotent};

/// Thin SVD of one block, singular values descending.
#[derive(Debug, Clone)]
pub struct BlockSvd {
    /// `rows × k` with `k = min(rows, cols)`.
    pub u: CMatrix,
    pub sigma: Vec<f64>,
    /// `cols × k`.
    pub v: CMatrix,
    /// Count of singular values above the rank threshold.
    pub rank: usize,
}

impl BlockSvd {
    pub fn new(block: &CMatrix, tol: Tolerance) -> Self {
        let (m, n) = block.shape();
        let linalg::Svd { u, sigma, v } = linalg::svd(block);
        debug_assert_eq!(sigma.len(), m.min(n));
        let sigma_max = sigma.first().copied().unwrap_or(0.0);
        let threshold = tol.rank_threshold(m, n, sigma_max);
        let rank = if sigma_max == 0.0 {
            0
        } else {
            sigma.iter().filter(|&&s| s > threshold).count()
        };
        Self { u, sigma, v, rank }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.u.nrows(), self.v.nrows())
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank == self.sigma.len()
    }

    /// `Σ_{i<count} f(i, σ_i) u_i v_i*`.
    pub fn synthesize(&self, count: usize, mut f: impl FnMut(usize, f64) -> f64) -> CMatrix {
        let (m, n) = self.shape();
        let mut out = CMatrix::zeros(m, n);
        for i in 0..count {
            let w = f(i, self.sigma[i]);
            if w == 0.0 {
                continue;
            }
            let outer = self.u.column(i) * self.v.column(i).adjoint();
            out += outer * Complex64::new(w, 0.0);
        }
        out
    }

    /// `u_i v_i*`.
    pub fn direction(&self, i: usize) -> CMatrix {
        self.u.column(i) * self.v.column(i).adjoint()
    }
}

/// Per-block SVDs of an element, with numerical ranks under a tolerance.
#[derive(Debug, Clone)]
pub struct SvdCache {
    element: TripleElement,
    blocks: Vec<BlockSvd>,
}

impl SvdCache {
    pub fn new(a: &TripleElement, tol: Tolerance) -> Self {
        let blocks = a.blocks().iter().map(|b| BlockSvd::new(b, tol)).collect();
        Self {
            element: a.clone(),
            blocks,
        }
    }

    pub fn element(&self) -> &TripleElement {
        &self.element
    }

    pub fn blocks(&self) -> &[BlockSvd] {
        &self.blocks
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.rank).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(|b| b.rank == 0)
    }

    /// Every block has rank `min(rows, cols)`.
    pub fn is_full_rank(&self) -> bool {
        self.blocks.iter().all(BlockSvd::is_full_rank)
    }

    pub fn sigma_max(&self) -> f64 {
        self.blocks
            .iter()
            .filter_map(|b| b.sigma.first().copied())
            .fold(0.0, f64::max)
    }

    /// Smallest retained singular value over all blocks; `None` at zero.
    pub fn min_retained_sigma(&self) -> Option<f64> {
        self.blocks
            .iter()
            .filter(|b| b.rank > 0)
            .map(|b| b.sigma[b.rank - 1])
            .min_by(f64::total_cmp)
    }

    /// Smallest of the `min(rows, cols)` singular values over all blocks, retained or not.
    pub fn min_sigma(&self) -> f64 {
        self.blocks
            .iter()
            .filter_map(|b| b.sigma.last().copied())
            .fold(f64::INFINITY, f64::min)
    }

    /// Rebuilds an element applying `f` to retained singular values and dropping the rest.
    pub fn map_retained(&self, mut f: impl FnMut(f64) -> f64) -> TripleElement {
        self.element.map_blocks(|i, _| {
            let b = &self.blocks[i];
            b.synthesize(b.rank, |_, s| f(s))
        })
    }

    /// Rebuilds an element applying `f` to every singular value.
    pub fn map_all(&self, mut f: impl FnMut(f64) -> f64) -> TripleElement {
        self.element.map_blocks(|i, _| {
            let b = &self.blocks[i];
            b.synthesize(b.sigma.len(), |_, s| f(s))
        })
    }
}

fn check_odd(k: i64) -> Result<()> {
    if k <= 0 || k % 2 == 0 {
        Err(TripleError::InvalidExponent(k))
    } else {
        Ok(())
    }
}

/// `a^{[k]}` for odd `k`: `a^{[3]} = {a,a,a}`, `a^{[2n+1]} = {a,a,a^{[2n−1]}}`.
pub fn odd_power(a: &TripleElement, k: i64) -> Result<TripleElement> {
    check_odd(k)?;
    let cache = SvdCache::new(a, Tolerance::default());
    Ok(cache.map_all(|s| s.powi(k as i32)))
}

/// The unique `b` in the subtriple generated by `a` with `b^{[k]} = a`.
pub fn odd_root(a: &TripleElement, k: i64, tol: Tolerance) -> Result<TripleElement> {
    check_odd(k)?;
    let cache = SvdCache::new(a, tol);
    let inv = 1.0 / k as f64;
    Ok(cache.map_retained(|s| s.powf(inv)))
}

/// Range tripotent `r(a)`: the polar partial isometry `Σ_{retained} u_i v_i*`.
/// `r(0)` is the zero tripotent.
pub fn range_tripotent(a: &TripleElement, tol: Tolerance) -> Tripotent {
    range_tripotent_of(&SvdCache::new(a, tol))
}

pub fn range_tripotent_of(cache: &SvdCache) -> Tripotent {
    if cache.is_zero() {
        return Tripotent::zero(cache.element().space());
    }
    Tripotent::new(cache.map_retained(|_| 1.0), Tolerance::default())
        .expect("polar factor of an SVD is a partial isometry")
}

/// Whether `x` is positive in `E₂(e)`: `x ∈ E₂(e)` and `e* x` is hermitian
/// positive semidefinite in every block. With `invertible`, also that `x` has the
/// same rank as `e`, i.e. it is invertible in the Peirce-2 algebra.
pub fn is_positive_in_peirce2(e: &Tripotent, x: &TripleElement, invertible: bool, tol: Tolerance) -> Result<bool> {
    let scale = x.norm();
    if e.peirce2_residual(x)? > tol.scaled(scale) {
        return Ok(false);
    }
    for (i, xb) in x.blocks().iter().enumerate() {
        let eb = e.element().block(i);
        let h = eb.adjoint() * xb;
        if (&h - h.adjoint()).norm() > tol.scaled(scale) {
            return Ok(false);
        }
        let herm = (&h + h.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = linalg::hermitian_eigenvalues(&herm);
        if eig.iter().any(|&l| l < -tol.scaled(scale)) {
            return Ok(false);
        }
        if invertible && BlockSvd::new(xb, tol).rank != e.rank_per_block()[i] {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Generalized inverse `a†`: the element with `Q(a)a† = a`, `Q(a†)a = a†` and
/// `[Q(a), Q(a†)] = 0`. Blockwise `Σ_{retained} σ_i⁻¹ u_i v_i*`.
pub fn generalized_inverse(a: &TripleElement, tol: Tolerance) -> Result<TripleElement> {
    generalized_inverse_of(&SvdCache::new(a, tol))
}

pub fn generalized_inverse_of(cache: &SvdCache) -> Result<TripleElement> {
    if cache.is_zero() {
        return Err(TripleError::ZeroElement);
    }
    Ok(cache.map_retained(|s| 1.0 / s))
}

/// Residuals of the three generalized-inverse identities for the pair `(a, b)`:
/// `‖Q(a)b − a‖`, `‖Q(b)a − b‖` and the largest entry of the realified commutator
/// `Q(a)Q(b) − Q(b)Q(a)`.
pub fn generalized_inverse_residuals(a: &TripleElement, b: &TripleElement) -> Result<[f64; 3]> {
    let r1 = (&quadratic(a, b)? - a).norm();
    let r2 = (&quadratic(b, a)? - b).norm();
    let qa = q_operator(a, a)?.realified();
    let qb = q_operator(b, b)?.realified();
    let r3 = (&qa * &qb - &qb * &qa).amax();
    Ok([r1, r2, r3])
}

/// Nonzero elements of a finite-dimensional factor always admit a generalized
/// inverse; `0` is reported as not regular.
pub fn is_von_neumann_regular(a: &TripleElement, tol: Tolerance) -> bool {
    !SvdCache::new(a, tol).is_zero()
}

/// A reduced minimum modulus; `γ(0) = ∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConormValue {
    pub value: f64,
    pub regular: bool,
}

impl ConormValue {
    pub const INFINITE: ConormValue = ConormValue {
        value: f64::INFINITY,
        regular: false,
    };

    pub fn finite(value: f64) -> Self {
        Self {
            value,
            regular: value > 0.0,
        }
    }

    pub fn is_infinite(&self) -> bool {
        self.value.is_infinite()
    }

    /// The value, with the zero-element sentinel mapped to `None`.
    pub fn finite_value(&self) -> Option<f64> {
        (!self.is_infinite()).then_some(self.value)
    }
}

/// Infinity serializes as the string `"inf"`.
pub fn serialize_maybe_inf<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*v)
    }
}

impl Serialize for ConormValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        struct Inf(f64);
        impl Serialize for Inf {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                serialize_maybe_inf(&self.0, s)
            }
        }
        let mut st = s.serialize_struct("ConormValue", 2)?;
        st.serialize_field("value", &Inf(self.value))?;
        st.serialize_field("regular", &self.regular)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for ConormValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        #[derive(Deserialize)]
        struct Repr {
            value: Raw,
            regular: bool,
        }
        let r = Repr::deserialize(d)?;
        let value = match r.value {
            Raw::Num(v) => v,
            Raw::Str(s) if s == "inf" => f64::INFINITY,
            Raw::Str(s) => return Err(serde::de::Error::custom(format!("bad conorm value '{s}'"))),
        };
        Ok(ConormValue {
            value,
            regular: r.regular,
        })
    }
}

/// Quadratic conorm `γ^q(a) = 1/‖a†‖²`, i.e. the squared smallest retained singular value.
pub fn quadratic_conorm(a: &TripleElement, tol: Tolerance) -> ConormValue {
    quadratic_conorm_of(&SvdCache::new(a, tol))
}

pub fn quadratic_conorm_of(cache: &SvdCache) -> ConormValue {
    match cache.min_retained_sigma() {
        None => ConormValue::INFINITE,
        Some(s) => ConormValue::finite(s * s),
    }
}

/// Conorm of `a` in the C*-algebra sense, `γ(a)² = inf σ(aa*) ∖ {0}`, read off the
/// eigenvalues of `aa*`. Single factor only.
///
/// Eigenvalues of `aa*` carry absolute error of order `ε·λ_max`, so zero is decided
/// against the larger of that noise floor and the squared rank threshold. The chosen
/// eigenvalue is refined as the Rayleigh quotient `‖a* w‖²` of its eigenvector.
pub fn cstar_conorm(a: &TripleElement, tol: Tolerance) -> Result<ConormValue> {
    if !a.space().is_single() {
        return Err(TripleError::NotSingleFactor(a.space().clone()));
    }
    let block = a.block(0);
    let (m, n) = block.shape();
    let gram = block * block.adjoint();
    let (eig, vectors) = linalg::hermitian_eigen(&gram);
    let lambda_max = eig.iter().copied().fold(0.0, f64::max);
    if lambda_max == 0.0 {
        return Ok(ConormValue::INFINITE);
    }
    let noise = 64.0 * f64::EPSILON * (m.max(n) as f64) * lambda_max;
    let threshold = tol.rank_threshold(m, n, lambda_max.sqrt()).powi(2).max(noise);
    let Some(index) = (0..eig.len()).filter(|&i| eig[i] > threshold).min_by(|&i, &j| eig[i].total_cmp(&eig[j]))
    else {
        return Ok(ConormValue::INFINITE);
    };
    let w = vectors.column(index);
    let refined = (block.adjoint() * w).norm_squared();
    Ok(ConormValue::finite(refined.sqrt()))
}

/// Sampled upper bound for the reduced minimum modulus of `Q(a)` straight from its
/// definition `inf{‖Q(a)x‖ : dist(x, ker Q(a)) ≥ 1}`.
///
/// `ker Q(a)` is the kernel of `P₂(r(a))`, and `dist(x, ker Q(a)) = ‖P₂(r(a))x‖` in
/// the spectral norm, so each random `x` is rescaled to distance exactly 1.
pub fn sampled_conorm_upper_bound<R: Rng + ?Sized>(
    a: &TripleElement,
    samples: usize,
    tol: Tolerance,
    rng: &mut R,
) -> Result<f64> {
    let r = range_tripotent(a, tol);
    if r.element().is_zero() {
        return Ok(f64::INFINITY);
    }
    let mut best = f64::INFINITY;
    for _ in 0..samples {
        let x = a.map_blocks(|_, b| {
            CMatrix::from_fn(b.nrows(), b.ncols(), |_, _| {
                Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            })
        });
        let dist = r.project(2, &x)?.norm();
        if dist <= 1e-12 {
            continue;
        }
        let x = &x * (1.0 / dist);
        best = best.min(quadratic(a, &x)?.norm());
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triple::{is_tripotent, triple_product};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn random_element(rows: usize, cols: usize, rank: usize, rng: &mut ChaCha8Rng) -> TripleElement {
        let g = CMatrix::from_fn(rows, cols, |_, _| {
            Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        let svd = BlockSvd::new(&g, tol());
        TripleElement::from_matrix(svd.synthesize(rank, |_, s| s))
    }

    #[test]
    fn svd_reconstructs_and_sorts() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_element(3, 2, 2, &mut rng);
        let b = BlockSvd::new(a.block(0), tol());
        assert!(b.sigma.windows(2).all(|w| w[0] >= w[1]));
        let back = b.synthesize(b.sigma.len(), |_, s| s);
        assert!((back - a.block(0)).norm() <= 1e-12 * a.norm());
        assert_eq!(BlockSvd::new(&CMatrix::zeros(2, 2), tol()).rank, 0);
    }

    #[test]
    fn odd_power_examples() {
        let e = TripleElement::matrix_unit(2, 3, 1, 0);
        assert!((&odd_power(&e, 3).unwrap() - &e).norm() < 1e-14);

        let x = &TripleElement::matrix_unit(2, 2, 0, 0) * 2.0;
        let cube = triple_product(&x, &x, &x).unwrap();
        assert!((&odd_power(&x, 3).unwrap() - &cube).norm() < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = random_element(2, 3, 2, &mut rng);
        let a3 = triple_product(&a, &a, &a).unwrap();
        let a5 = triple_product(&a, &a, &a3).unwrap();
        assert!((&odd_power(&a, 5).unwrap() - &a5).norm() < 1e-12);

        assert_eq!(odd_power(&a, 2), Err(TripleError::InvalidExponent(2)));
        assert_eq!(odd_power(&a, -1), Err(TripleError::InvalidExponent(-1)));
    }

    #[test]
    fn odd_root_examples() {
        let e = TripleElement::identity(2);
        assert!((&odd_root(&e, 3, tol()).unwrap() - &e).norm() < 1e-14);

        let x = &TripleElement::matrix_unit(2, 2, 0, 0) * 8.0;
        let expected = &TripleElement::matrix_unit(2, 2, 0, 0) * 2.0;
        assert!((&odd_root(&x, 3, tol()).unwrap() - &expected).norm() < 1e-12);
        assert!(odd_root(&x, 0, tol()).is_err());
    }

    #[test]
    fn odd_roots_converge_to_range_tripotent() {
        let a = TripleElement::diag(&[3.0, 0.25, 0.0]);
        let r = range_tripotent(&a, tol());
        let mut previous = f64::INFINITY;
        for n in 1..40 {
            let k = 2 * n - 1;
            let gap = (&odd_root(&a, k, tol()).unwrap() - r.element()).norm();
            let expected = [3.0_f64, 0.25]
                .iter()
                .map(|s| (s.powf(1.0 / k as f64) - 1.0).abs())
                .fold(0.0, f64::max);
            assert!((gap - expected).abs() < 1e-12);
            assert!(gap <= previous);
            previous = gap;
        }
        assert!(previous < 0.04);
    }

    #[test]
    fn range_tripotent_examples() {
        let r = range_tripotent(&TripleElement::diag(&[3.0, 0.5]), tol());
        assert!((r.element() - &TripleElement::identity(2)).norm() < 1e-14);
        assert!(r.is_complete());

        let r = range_tripotent(&(&TripleElement::matrix_unit(2, 2, 0, 0) * 2.0), tol());
        assert!((r.element() - &TripleElement::matrix_unit(2, 2, 0, 0)).norm() < 1e-14);

        let zero = TripleElement::zeros(&crate::SpaceDescriptor::square(2));
        assert!(range_tripotent(&zero, tol()).element().is_zero());
    }

    #[test]
    fn range_tripotent_is_smallest_with_positive_peirce2() {
        let a = TripleElement::diag(&[2.0, 1.0, 0.0]);
        let r = range_tripotent(&a, tol());
        assert!(is_positive_in_peirce2(&r, &a, true, tol()).unwrap());
        // Proper sub-partial-isometries of r(a) = diag(1,1,0).
        for sub in [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]] {
            let smaller = Tripotent::new(TripleElement::diag(&sub), tol()).unwrap();
            assert!(!is_positive_in_peirce2(&smaller, &a, true, tol()).unwrap());
        }
        let rotated = Tripotent::new(
            TripleElement::from_real_rows(&[&[0.5, 0.5, 0.0], &[0.5, 0.5, 0.0], &[0.0, 0.0, 0.0]]),
            tol(),
        )
        .unwrap();
        assert!(!is_positive_in_peirce2(&rotated, &a, true, tol()).unwrap());
    }

    #[test]
    fn generalized_inverse_examples() {
        let e = TripleElement::matrix_unit(3, 2, 2, 1);
        assert!((&generalized_inverse(&e, tol()).unwrap() - &e).norm() < 1e-14);

        let a = TripleElement::diag(&[2.0, 4.0]);
        let g = generalized_inverse(&a, tol()).unwrap();
        assert!((&g - &TripleElement::diag(&[0.5, 0.25])).norm() < 1e-14);
        let r = generalized_inverse_residuals(&a, &g).unwrap();
        assert!(r.iter().all(|&x| x < 1e-12), "{r:?}");

        let zero = TripleElement::zeros(a.space());
        assert_eq!(generalized_inverse(&zero, tol()), Err(TripleError::ZeroElement));
    }

    #[test]
    fn generalized_inverse_identities_on_random_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for trial in 0..100 {
            let (m, n) = [(2, 2), (3, 3), (2, 3), (3, 2)][trial % 4];
            let rank = 1 + trial % m.min(n);
            let a = &random_element(m, n, rank, &mut rng) * 3.0;
            let g = generalized_inverse(&a, tol()).unwrap();
            let r = generalized_inverse_residuals(&a, &g).unwrap();
            let scale = a.norm().max(1.0).powi(3) * (1.0 + g.norm()).powi(3);
            assert!(r.iter().all(|&x| x <= 1e-9 * scale), "trial {trial}: {r:?}");
        }
    }

    #[test]
    fn von_neumann_regularity() {
        assert!(is_von_neumann_regular(&TripleElement::diag(&[1.0, 0.0]), tol()));
        let zero = TripleElement::zeros(&crate::SpaceDescriptor::single(2, 3));
        assert!(!is_von_neumann_regular(&zero, tol()));

        let mixed = TripleElement::direct_sum(&[
            TripleElement::zeros(&crate::SpaceDescriptor::square(2)),
            TripleElement::from_real_rows(&[&[1.0, 2.0, 0.0], &[0.0, 1.0, 1.0]]),
        ])
        .unwrap();
        assert!(is_von_neumann_regular(&mixed, tol()));
        let g = generalized_inverse(&mixed, tol()).unwrap();
        assert!(g.block(0).iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn conorm_examples() {
        let theta = 0.9_f64;
        let u = TripleElement::from_matrix(CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(theta.cos(), 0.0),
                Complex64::new(-theta.sin(), 0.0),
                Complex64::new(theta.sin(), 0.0),
                Complex64::new(theta.cos(), 0.0),
            ],
        ));
        assert!((quadratic_conorm(&u, tol()).value - 1.0).abs() < 1e-12);

        let a = TripleElement::diag(&[2.0, 0.0]);
        let gq = quadratic_conorm(&a, tol());
        assert!((gq.value - 4.0).abs() < 1e-12 && gq.regular);
        let ginv = generalized_inverse(&a, tol()).unwrap();
        assert!((1.0 / ginv.norm().powi(2) - 4.0).abs() < 1e-12);

        let zero = TripleElement::zeros(a.space());
        assert!(quadratic_conorm(&zero, tol()).is_infinite());
        assert!(cstar_conorm(&zero, tol()).unwrap().is_infinite());
    }

    #[test]
    fn cstar_conorm_examples() {
        assert!((cstar_conorm(&TripleElement::identity(3), tol()).unwrap().value - 1.0).abs() < 1e-12);
        let g = cstar_conorm(&TripleElement::diag(&[2.0, 0.0]), tol()).unwrap();
        assert!((g.value.powi(2) - 4.0).abs() < 1e-12);

        let composite =
            TripleElement::direct_sum(&[TripleElement::identity(2), TripleElement::identity(2)]).unwrap();
        assert!(matches!(
            cstar_conorm(&composite, tol()),
            Err(TripleError::NotSingleFactor(_))
        ));
    }

    #[test]
    fn conorm_serializes_infinity_as_string() {
        let s = serde_json::to_string(&ConormValue::INFINITE).unwrap();
        assert_eq!(s, r#"{"value":"inf","regular":false}"#);
        let back: ConormValue = serde_json::from_str(&s).unwrap();
        assert!(back.is_infinite());
        let v: ConormValue = serde_json::from_str(r#"{"value":4.0,"regular":true}"#).unwrap();
        assert_eq!(v, ConormValue::finite(4.0));
    }

    #[test]
    fn sampler_never_undercuts_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for trial in 0..20 {
            let (m, n) = [(2, 2), (2, 3), (3, 3)][trial % 3];
            let a = random_element(m, n, 1 + trial % m.min(n), &mut rng);
            let value = quadratic_conorm(&a, tol()).value;
            let sampled = sampled_conorm_upper_bound(&a, 500, tol(), &mut rng).unwrap();
            assert!(sampled >= value - 1e-6, "trial {trial}: {sampled} < {value}");
        }
    }

    #[test]
    fn range_tripotent_fixes_element_in_peirce2() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let a = random_element(3, 2, 1, &mut rng);
            let r = range_tripotent(&a, tol());
            assert!(is_tripotent(r.element(), tol()));
            assert!(r.peirce2_residual(&a).unwrap() < 1e-10);
        }
    }
}
