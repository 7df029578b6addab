//! Distances to the extreme points of the closed unit ball, the λ-function, and
//! continuity of the quadratic conorm.
//!
//! The extreme points of the unit ball are the complete tripotents (maximal partial
//! isometries blockwise). For `x` in the space,
//!
//! ```text
//! dist(x, ∂ₑ(E₁)) = max{1 − m_q(x), ‖x‖ − 1}   if x ∈ E_q⁻¹
//!                 = max{1, ‖x‖ − 1}            otherwise
//! ```
//!
//! and an independent oracle reads the same number off the singular values:
//! replacing every singular value by 1 gives a nearest maximal partial isometry.

use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bp::{alpha_q, conorm_perturbation_bound, m_q_of, ConormPerturbation};
use crate::element::{SpaceDescriptor, Tolerance, TripleElement};
use crate::error::{Result, TripleError};
use crate::sampling::{complex_gaussian, gaussian_element, keyed_rng};
use crate::spectral::{cstar_conorm, generalized_inverse_of, quadratic_conorm_of, ConormValue, SvdCache};
use crate::triple::{q_operator, RealLinearOperator, Tripotent};

/// Both routes to `dist(a, ∂ₑ(E₁))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremeDistance {
    pub formula: f64,
    pub oracle: f64,
}

impl ExtremeDistance {
    pub fn residual(&self) -> f64 {
        (self.formula - self.oracle).abs()
    }
}

pub fn dist_to_extreme_points(a: &TripleElement, tol: Tolerance) -> ExtremeDistance {
    dist_to_extreme_points_of(&SvdCache::new(a, tol))
}

pub fn dist_to_extreme_points_of(cache: &SvdCache) -> ExtremeDistance {
    let norm = cache.sigma_max();
    let formula = if cache.is_full_rank() {
        (1.0 - m_q_of(cache)).max(norm - 1.0)
    } else {
        1.0_f64.max(norm - 1.0)
    };
    ExtremeDistance {
        formula,
        oracle: oracle_distance(cache),
    }
}

/// `max_j max_i |σ_i(a_j) − 1|` over all `min(rows, cols)` singular values: the
/// distance to the nearest maximal partial isometry, block by block.
fn oracle_distance(cache: &SvdCache) -> f64 {
    cache
        .blocks()
        .iter()
        .flat_map(|b| b.sigma.iter().map(|s| (s - 1.0).abs()))
        .fold(0.0, f64::max)
}

/// A nearest complete tripotent: every singular value replaced by 1.
pub fn nearest_extreme_point(a: &TripleElement) -> Tripotent {
    let cache = SvdCache::new(a, Tolerance::default());
    Tripotent::new(cache.map_all(|_| 1.0), Tolerance::default()).expect("u v* of a thin SVD is a partial isometry")
}

/// Up to 3×3 block held on the stack, row-major.
#[derive(Clone, Copy)]
struct SmallBlock {
    rows: usize,
    cols: usize,
    data: [Complex64; 9],
}

impl SmallBlock {
    fn from_matrix(m: &crate::CMatrix) -> Option<Self> {
        let (rows, cols) = m.shape();
        if rows > 3 || cols > 3 {
            return None;
        }
        let mut data = [Complex64::new(0.0, 0.0); 9];
        for i in 0..rows {
            for j in 0..cols {
                data[i * cols + j] = m[(i, j)];
            }
        }
        Some(Self { rows, cols, data })
    }
}

/// Spectral norm of a block of at most 3×3 by one-sided Jacobi on the shorter side.
fn small_spectral_norm(d: &[Complex64; 9], rows: usize, cols: usize) -> f64 {
    // Vectors of length `len`, `count` of them; columns if rows ≥ cols, else conjugated rows.
    let (len, count) = (rows.max(cols), rows.min(cols));
    let mut v = [[Complex64::new(0.0, 0.0); 3]; 3];
    for (k, vk) in v.iter_mut().enumerate().take(count) {
        for (r, slot) in vk.iter_mut().enumerate().take(len) {
            *slot = if rows >= cols {
                d[r * cols + k]
            } else {
                d[k * cols + r].conj()
            };
        }
    }
    for _ in 0..40 {
        let mut rotated = false;
        for p in 0..count {
            for q in (p + 1)..count {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = Complex64::new(0.0, 0.0);
                for r in 0..len {
                    alpha += v[p][r].norm_sqr();
                    beta += v[q][r].norm_sqr();
                    gamma += v[p][r].conj() * v[q][r];
                }
                let g = gamma.norm();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let pc = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for r in 0..len {
                    let x = v[p][r];
                    let y = v[q][r] * pc;
                    v[p][r] = x * c - y * s;
                    v[q][r] = x * s + y * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    v.iter()
        .take(count)
        .map(|col| col.iter().take(len).map(|z| z.norm_sqr()).sum::<f64>())
        .fold(0.0, f64::max)
        .sqrt()
}

/// Haar-random maximal partial isometry written into `out`: `min(rows, cols)`
/// orthonormal vectors of length `max(rows, cols)` as columns or rows.
fn random_small_complete<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R, out: &mut [Complex64; 9]) {
    let (len, count) = (rows.max(cols), rows.min(cols));
    let mut v = [[Complex64::new(0.0, 0.0); 3]; 3];
    let mut k = 0;
    while k < count {
        for slot in v[k].iter_mut().take(len) {
            *slot = complex_gaussian(rng);
        }
        for _ in 0..2 {
            for j in 0..k {
                let proj: Complex64 = (0..len).map(|r| v[j][r].conj() * v[k][r]).sum();
                for r in 0..len {
                    let vj = v[j][r];
                    v[k][r] -= vj * proj;
                }
            }
        }
        let nrm = v[k].iter().take(len).map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nrm < 1e-8 {
            continue;
        }
        for slot in v[k].iter_mut().take(len) {
            *slot /= nrm;
        }
        k += 1;
    }
    *out = [Complex64::new(0.0, 0.0); 9];
    for (k, vk) in v.iter().enumerate().take(count) {
        for r in 0..len {
            if rows >= cols {
                out[r * cols + k] = vk[r];
            } else {
                out[k * cols + r] = vk[r];
            }
        }
    }
}

/// Smallest `‖a − e‖` over `count` Haar-random complete tripotents `e`.
///
/// Independent of the SVD oracle; used to confirm that no extreme point beats it.
/// Blocks larger than 3×3 fall back to dense arithmetic.
pub fn random_extreme_search<R: Rng + ?Sized>(a: &TripleElement, count: usize, rng: &mut R) -> f64 {
    let small: Option<Vec<SmallBlock>> = a.blocks().iter().map(SmallBlock::from_matrix).collect();
    let mut best = f64::INFINITY;
    match small {
        Some(blocks) => {
            let mut e = [Complex64::new(0.0, 0.0); 9];
            let mut diff = [Complex64::new(0.0, 0.0); 9];
            for _ in 0..count {
                let mut dist: f64 = 0.0;
                for b in &blocks {
                    random_small_complete(b.rows, b.cols, rng, &mut e);
                    for k in 0..b.rows * b.cols {
                        diff[k] = b.data[k] - e[k];
                    }
                    dist = dist.max(small_spectral_norm(&diff, b.rows, b.cols));
                }
                best = best.min(dist);
            }
        }
        None => {
            for _ in 0..count {
                let e = crate::sampling::random_complete_tripotent(a.space(), rng);
                best = best.min(a.distance(&e).expect("same space"));
            }
        }
    }
    best
}

/// `λ(a)` on the closed unit ball, or the one-sided bound where no value is known.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum LambdaValue {
    Exact(f64),
    AtMost(f64),
}

impl LambdaValue {
    pub fn value(&self) -> f64 {
        match *self {
            LambdaValue::Exact(v) | LambdaValue::AtMost(v) => v,
        }
    }
}

/// `λ(a) = (1 + m_q(a))/2` for BP quasi-invertible `a`; `½` for other `a` in the open
/// ball; only `λ(a) ≤ ½(1 − α_q(a)) = ½` on the unit sphere.
pub fn lambda_value(a: &TripleElement, tol: Tolerance) -> Result<LambdaValue> {
    let cache = SvdCache::new(a, tol);
    let norm = cache.sigma_max();
    if norm > 1.0 + tol.value() {
        return Err(TripleError::OutsideUnitBall(norm));
    }
    if cache.is_full_rank() {
        return Ok(LambdaValue::Exact((1.0 + m_q_of(&cache)) / 2.0));
    }
    if norm < 1.0 - tol.value() {
        Ok(LambdaValue::Exact(0.5))
    } else {
        Ok(LambdaValue::AtMost(0.5 * (1.0 - alpha_q(a))))
    }
}

/// `a = t·e + (1 − t)·y` with `e` extreme and `‖y‖ ≤ 1`.
#[derive(Debug, Clone)]
pub struct ConvexDecomposition {
    pub t: f64,
    pub e: Tripotent,
    pub y: TripleElement,
}

impl ConvexDecomposition {
    pub fn reconstruct(&self) -> TripleElement {
        &(self.e.element() * self.t) + &(&self.y * (1.0 - self.t))
    }
}

/// For `a` in the open unit ball outside `E_q⁻¹` and `0 < t < ½`: with `β = 1/t`,
/// takes a nearest extreme point `e` of `βa` (so `‖βa − e‖ < β − 1`) and sets
/// `y = (βa − e)/(β − 1)`.
pub fn convex_decompose(a: &TripleElement, t: f64, tol: Tolerance) -> Result<ConvexDecomposition> {
    if !(t > 0.0 && t < 0.5) {
        return Err(TripleError::UnsupportedDecomposition(format!("t = {t} is outside (0, 1/2)")));
    }
    let cache = SvdCache::new(a, tol);
    if cache.is_full_rank() {
        return Err(TripleError::UnsupportedDecomposition(
            "a is BP quasi-invertible; its λ exceeds 1/2".into(),
        ));
    }
    let norm = cache.sigma_max();
    if norm >= 1.0 {
        return Err(TripleError::Precondition(format!("‖a‖ = {norm} is not below 1")));
    }
    let beta = 1.0 / t;
    let scaled = a * beta;
    let e = nearest_extreme_point(&scaled);
    let gap = (&scaled - e.element()).norm();
    if gap >= beta - 1.0 {
        return Err(TripleError::CertificateFailed(format!(
            "‖βa − e‖ = {gap:.6e} is not below β − 1 = {:.6e}",
            beta - 1.0
        )));
    }
    let y = &(&scaled - e.element()) * (1.0 / (beta - 1.0));
    Ok(ConvexDecomposition { t, e, y })
}

/// Where `γ^q` is continuous, following the characterization on extremally rich
/// triples: continuous exactly at non-regular and at BP quasi-invertible points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ContinuityClass {
    ContinuousBp,
    /// Not reachable in matrix factors, where every nonzero element is regular.
    ContinuousNonregular,
    Discontinuous,
    ZeroSpecial,
}

pub fn continuity_classify(a: &TripleElement, tol: Tolerance) -> ContinuityClass {
    classify_of(&SvdCache::new(a, tol))
}

fn classify_of(cache: &SvdCache) -> ContinuityClass {
    if cache.is_zero() {
        ContinuityClass::ZeroSpecial
    } else if cache.is_full_rank() {
        ContinuityClass::ContinuousBp
    } else {
        ContinuityClass::Discontinuous
    }
}

/// One point `a_n = a + d/n` of an approach sequence.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SequencePoint {
    pub n: u64,
    /// `‖a_n − a‖`
    pub step: f64,
    #[serde(serialize_with = "crate::spectral::serialize_maybe_inf")]
    pub gamma_n: f64,
    /// `|γ^q(a_n) − γ^q(a)|`
    pub gamma_gap: f64,
    /// `‖a_n† − a†‖`
    pub ginv_gap: f64,
}

/// Evaluates `a_n = a + direction/n` at each `n`.
pub fn approach_sequence(
    a: &TripleElement,
    direction: &TripleElement,
    ns: &[u64],
    tol: Tolerance,
) -> Result<Vec<SequencePoint>> {
    a.space().ensure_same(direction.space())?;
    let ca = SvdCache::new(a, tol);
    let gamma_a = quadratic_conorm_of(&ca).value;
    let ginv_a = generalized_inverse_of(&ca)?;
    ns.iter()
        .map(|&n| {
            let delta = direction * (1.0 / n as f64);
            let an = a + &delta;
            let cn = SvdCache::new(&an, tol);
            let gamma_n = quadratic_conorm_of(&cn).value;
            let ginv_n = generalized_inverse_of(&cn)?;
            Ok(SequencePoint {
                n,
                step: delta.norm(),
                gamma_n,
                gamma_gap: (gamma_n - gamma_a).abs(),
                ginv_gap: (&ginv_n - &ginv_a).norm(),
            })
        })
        .collect()
}

/// Evidence for (dis)continuity of `γ^q` at `a`.
#[derive(Debug, Clone, Serialize)]
pub struct ContinuityWitness {
    pub class: ContinuityClass,
    pub gamma_a: f64,
    pub points: Vec<SequencePoint>,
}

impl ContinuityWitness {
    pub fn last(&self) -> &SequencePoint {
        self.points.last().expect("at least one step")
    }
}

/// Builds `a_n = a + (γ^q(a)^{1/2}/n)·u v*` for `n = 1..=n_steps`, where `u v*` is
/// a vanishing singular direction of a rank-deficient block (so `γ^q(a_n) → 0` while
/// `γ^q(a) > 0`) or, for BP quasi-invertible `a`, the direction of the smallest
/// singular value (so `γ^q(a_n) → γ^q(a)`).
pub fn continuity_witness(a: &TripleElement, n_steps: u64, tol: Tolerance) -> Result<ContinuityWitness> {
    if n_steps == 0 {
        return Err(TripleError::Precondition("n_steps must be positive".into()));
    }
    let cache = SvdCache::new(a, tol);
    let class = classify_of(&cache);
    if class == ContinuityClass::ZeroSpecial {
        return Err(TripleError::ZeroElement);
    }
    let gamma_a = quadratic_conorm_of(&cache).value;
    let (block, index) = match class {
        ContinuityClass::Discontinuous => cache
            .blocks()
            .iter()
            .enumerate()
            .find(|(_, b)| !b.is_full_rank())
            .map(|(j, b)| (j, b.rank))
            .expect("rank-deficient block exists"),
        _ => cache
            .blocks()
            .iter()
            .enumerate()
            .min_by(|(_, x), (_, y)| x.sigma.last().unwrap().total_cmp(y.sigma.last().unwrap()))
            .map(|(j, b)| (j, b.sigma.len() - 1))
            .expect("at least one block"),
    };
    let unit = cache.blocks()[block].direction(index);
    let direction = a.map_blocks(|j, b| {
        if j == block {
            &unit * Complex64::new(gamma_a.sqrt(), 0.0)
        } else {
            crate::CMatrix::zeros(b.nrows(), b.ncols())
        }
    });
    let ns: Vec<u64> = (1..=n_steps).collect();
    Ok(ContinuityWitness {
        class,
        gamma_a,
        points: approach_sequence(a, &direction, &ns, tol)?,
    })
}

/// Continuity of `γ^q` at a complete tripotent whose quadratic operator is neither
/// left nor right invertible.
#[derive(Debug, Clone, Serialize)]
pub struct TripotentContinuityReport {
    pub gamma_e: f64,
    /// Real dimension of `ker Q(e)`.
    pub kernel_dim: usize,
    /// Real rank of `Q(e)`.
    pub range_rank: usize,
    pub real_dim: usize,
    pub samples: usize,
    /// Samples where `|γ^q(e) − γ^q(e+δ)| ≤ γ^q(e)^{1/2}‖δ‖` fails.
    pub literal_violations: usize,
    /// Samples where `|γ^q(e) − γ^q(e+δ)| ≤ ‖δ‖(‖e‖ + ‖e+δ‖)` fails.
    pub chained_violations: usize,
    /// Largest `|γ^q(e) − γ^q(e+δ)| / ‖δ‖`.
    pub max_gap_ratio: f64,
}

impl TripotentContinuityReport {
    /// `Q(e)` has nontrivial kernel and non-full range.
    pub fn neither_one_sided_invertible(&self) -> bool {
        self.kernel_dim > 0 && self.range_rank < self.real_dim
    }
}

pub fn tripotent_conorm_continuity_case(
    e: &Tripotent,
    samples: usize,
    radius: f64,
    seed: u64,
    tol: Tolerance,
) -> Result<TripotentContinuityReport> {
    if !e.is_complete() {
        return Err(TripleError::Precondition("tripotent must be complete".into()));
    }
    if !e.has_peirce1() {
        return Err(TripleError::Precondition("Peirce 1-space of the tripotent is trivial".into()));
    }
    let q = q_operator(e.element(), e.element())?.realified();
    let real_dim = q.nrows();
    let gram = q.transpose() * &q;
    let eig = SymmetricEigen::new(gram).eigenvalues;
    let top = eig.iter().copied().fold(0.0, f64::max);
    let range_rank = eig.iter().filter(|&&l| l > 1e-18 * top.max(1.0) && l > 1e-12).count();
    let gamma_e = quadratic_conorm_of(&SvdCache::new(e.element(), tol)).value;

    let mut literal_violations = 0;
    let mut chained_violations = 0;
    let mut max_gap_ratio: f64 = 0.0;
    for k in 0..samples {
        let mut rng = keyed_rng(seed, k as u64, 0);
        let raw = gaussian_element(e.space(), &mut rng);
        let len = radius * rng.random::<f64>();
        let delta = &raw * (len / raw.norm());
        let b = e.element() + &delta;
        let p: ConormPerturbation = conorm_perturbation_bound(e.element(), &b, tol)?;
        literal_violations += usize::from(!p.literal_holds());
        chained_violations += usize::from(!p.chained_holds());
        if p.distance > 0.0 {
            max_gap_ratio = max_gap_ratio.max(p.conorm_gap / p.distance);
        }
    }
    Ok(TripotentContinuityReport {
        gamma_e,
        kernel_dim: real_dim - range_rank,
        range_rank,
        real_dim,
        samples,
        literal_violations,
        chained_violations,
        max_gap_ratio,
    })
}

/// λ as reported by `inspect`: undefined outside the closed unit ball.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum LambdaReport {
    Exact(f64),
    AtMost(f64),
    Undefined,
}

impl From<Result<LambdaValue>> for LambdaReport {
    fn from(r: Result<LambdaValue>) -> Self {
        match r {
            Ok(LambdaValue::Exact(v)) => LambdaReport::Exact(v),
            Ok(LambdaValue::AtMost(v)) => LambdaReport::AtMost(v),
            Err(_) => LambdaReport::Undefined,
        }
    }
}

/// One-shot summary of an element.
#[derive(Debug, Clone, Serialize)]
pub struct GeometryReport {
    pub space: SpaceDescriptor,
    pub norm: f64,
    pub rank_per_block: Vec<usize>,
    pub bp_status: bool,
    pub m_q: f64,
    pub alpha_q: f64,
    pub gamma_q: ConormValue,
    /// C*-algebra conorm; single factors only.
    pub gamma_cstar: Option<ConormValue>,
    pub dist_extreme_formula: f64,
    pub dist_extreme_oracle: f64,
    pub lambda: LambdaReport,
    pub continuity_class: ContinuityClass,
}

pub fn geometry_report(a: &TripleElement, tol: Tolerance) -> GeometryReport {
    let cache = SvdCache::new(a, tol);
    let dist = dist_to_extreme_points_of(&cache);
    GeometryReport {
        space: a.space().clone(),
        norm: cache.sigma_max(),
        rank_per_block: cache.ranks(),
        bp_status: cache.is_full_rank(),
        m_q: m_q_of(&cache),
        alpha_q: alpha_q(a),
        gamma_q: quadratic_conorm_of(&cache),
        gamma_cstar: cstar_conorm(a, tol).ok(),
        dist_extreme_formula: dist.formula,
        dist_extreme_oracle: dist.oracle,
        lambda: lambda_value(a, tol).into(),
        continuity_class: classify_of(&cache),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::sample_element;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn distance_examples() {
        let zero = TripleElement::zeros(&SpaceDescriptor::square(2));
        let d = dist_to_extreme_points(&zero, tol());
        assert_eq!((d.formula, d.oracle), (1.0, 1.0));

        let d = dist_to_extreme_points(&TripleElement::diag(&[3.0, 0.0]), tol());
        assert!((d.formula - 2.0).abs() < 1e-14 && (d.oracle - 2.0).abs() < 1e-14);

        let d = dist_to_extreme_points(&TripleElement::diag(&[2.0, 0.5]), tol());
        assert!((d.formula - 1.0).abs() < 1e-14 && (d.oracle - 1.0).abs() < 1e-14);
    }

    #[test]
    fn nearest_extreme_point_attains_oracle() {
        for (trial, profile) in [[2], [1], [0]].iter().enumerate() {
            let a = sample_element(&SpaceDescriptor::single(2, 3), profile, 1.7, trial as u64, 5).unwrap();
            let e = nearest_extreme_point(&a);
            assert!(e.is_complete());
            let d = dist_to_extreme_points(&a, tol());
            assert!(((&a - e.element()).norm() - d.oracle).abs() < 1e-12);
        }
    }

    #[test]
    fn small_kernel_matches_dense_norm() {
        let mut rng = keyed_rng(3, 0, 0);
        for (m, n) in [(1, 1), (1, 3), (2, 2), (2, 3), (3, 2), (3, 3)] {
            for _ in 0..20 {
                let x = crate::sampling::gaussian_matrix(m, n, &mut rng);
                let small = SmallBlock::from_matrix(&x).unwrap();
                let fast = small_spectral_norm(&small.data, m, n);
                let dense = crate::element::spectral_norm(&x);
                assert!((fast - dense).abs() < 1e-13 * dense.max(1.0));

                let mut e = [Complex64::new(0.0, 0.0); 9];
                random_small_complete(m, n, &mut rng, &mut e);
                let em = crate::CMatrix::from_fn(m, n, |i, j| e[i * n + j]);
                let t = Tripotent::new(TripleElement::from_matrix(em), tol()).unwrap();
                assert!(t.is_complete());
            }
        }
    }

    #[test]
    fn random_search_never_beats_oracle() {
        let space: SpaceDescriptor = "2x2,3x2".parse().unwrap();
        let mut rng = keyed_rng(8, 0, 1);
        for (trial, profile) in [[2, 2], [1, 2], [0, 1], [0, 0]].iter().enumerate() {
            let a = sample_element(&space, profile, 1.3, trial as u64, 8).unwrap();
            let oracle = dist_to_extreme_points(&a, tol()).oracle;
            let found = random_extreme_search(&a, 2000, &mut rng);
            assert!(found >= oracle - 1e-9, "{found} < {oracle}");
        }
        // a = 0: every complete tripotent is at distance exactly 1.
        let zero = TripleElement::zeros(&space);
        let found = random_extreme_search(&zero, 500, &mut rng);
        assert!((found - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lambda_examples() {
        let v = lambda_value(&TripleElement::diag(&[0.5, 0.25]), tol()).unwrap();
        assert_eq!(v, LambdaValue::Exact(0.625));
        assert_eq!(lambda_value(&TripleElement::diag(&[0.5, 0.0]), tol()).unwrap(), LambdaValue::Exact(0.5));
        assert_eq!(lambda_value(&TripleElement::identity(3), tol()).unwrap(), LambdaValue::Exact(1.0));
        assert_eq!(lambda_value(&TripleElement::diag(&[1.0, 0.0]), tol()).unwrap(), LambdaValue::AtMost(0.5));
        assert!(matches!(
            lambda_value(&TripleElement::diag(&[3.0, 0.0]), tol()),
            Err(TripleError::OutsideUnitBall(_))
        ));
    }

    #[test]
    fn convex_decomposition_examples() {
        let zero = TripleElement::zeros(&SpaceDescriptor::square(2));
        let d = convex_decompose(&zero, 0.25, tol()).unwrap();
        assert!((&d.y + &(d.e.element() * (1.0 / 3.0))).norm() < 1e-14);
        assert!(d.reconstruct().norm() < 1e-14);

        let a = TripleElement::diag(&[0.5, 0.0]);
        let d = convex_decompose(&a, 0.4, tol()).unwrap();
        assert!((d.e.element() - &TripleElement::identity(2)).norm() < 1e-14);
        assert!((&d.y - &TripleElement::diag(&[1.0 / 6.0, -2.0 / 3.0])).norm() < 1e-14);
        assert!((&d.reconstruct() - &a).norm() < 1e-14);
    }

    #[test]
    fn convex_decomposition_sweep_up_to_half() {
        let a = TripleElement::diag(&[0.9, 0.0]);
        for k in 1..50 {
            let t = k as f64 / 100.0;
            let d = convex_decompose(&a, t, tol()).unwrap();
            assert!(d.y.norm() <= 1.0 + 1e-12);
            assert!((&d.reconstruct() - &a).norm() <= 1e-10);
            assert!(d.e.is_complete());
        }
    }

    #[test]
    fn convex_decomposition_rejections() {
        let a = TripleElement::diag(&[0.5, 0.0]);
        assert!(matches!(
            convex_decompose(&a, 0.5, tol()),
            Err(TripleError::UnsupportedDecomposition(_))
        ));
        assert!(matches!(
            convex_decompose(&TripleElement::diag(&[0.5, 0.5]), 0.2, tol()),
            Err(TripleError::UnsupportedDecomposition(_))
        ));
        assert!(convex_decompose(&TripleElement::diag(&[1.0, 0.0]), 0.2, tol()).is_err());
    }

    #[test]
    fn classification_examples() {
        assert_eq!(
            continuity_classify(&TripleElement::diag(&[2.0, 1.0]), tol()),
            ContinuityClass::ContinuousBp
        );
        assert_eq!(
            continuity_classify(&TripleElement::matrix_unit(2, 2, 0, 0), tol()),
            ContinuityClass::Discontinuous
        );
        let zero = TripleElement::zeros(&SpaceDescriptor::square(2));
        assert_eq!(continuity_classify(&zero, tol()), ContinuityClass::ZeroSpecial);
        assert!(continuity_witness(&zero, 5, tol()).is_err());
    }

    #[test]
    fn discontinuity_witness_for_diag_2_0() {
        let w = continuity_witness(&TripleElement::diag(&[2.0, 0.0]), 1000, tol()).unwrap();
        assert_eq!(w.class, ContinuityClass::Discontinuous);
        assert!((w.gamma_a - 4.0).abs() < 1e-12);
        for p in &w.points {
            let expected = 4.0 / (p.n as f64).powi(2);
            assert!((p.gamma_n - expected).abs() < 1e-12 * 4.0, "n = {}", p.n);
        }
        assert!(w.last().gamma_n <= 1e-4);
    }

    #[test]
    fn continuity_witness_for_diag_2_1() {
        let w = continuity_witness(&TripleElement::diag(&[2.0, 1.0]), 100, tol()).unwrap();
        assert_eq!(w.class, ContinuityClass::ContinuousBp);
        for p in &w.points {
            let n = p.n as f64;
            let expected = (1.0 + 1.0 / n).powi(2);
            assert!((p.gamma_n - expected).abs() < 1e-12);
        }
        assert!(w.last().gamma_gap < 0.021);
    }

    #[test]
    fn generalized_inverses_converge_along_bp_sequence() {
        let a = TripleElement::diag(&[2.0, 1.0]);
        let d = TripleElement::diag(&[0.0, 1.0]);
        let points = approach_sequence(&a, &d, &[1, 10, 100, 1000], tol()).unwrap();
        for p in &points {
            let n = p.n as f64;
            let expected = (1.0 / (1.0 + 1.0 / n) - 1.0).abs();
            assert!((p.ginv_gap - expected).abs() < 1e-12);
            assert!(p.gamma_gap <= 3.0 / n + 1e-12);
        }
    }

    #[test]
    fn remark_case_in_m23() {
        let e = Tripotent::new(
            TripleElement::from_real_rows(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]),
            tol(),
        )
        .unwrap();
        let r = tripotent_conorm_continuity_case(&e, 100, 0.1, 21, tol()).unwrap();
        assert!((r.gamma_e - 1.0).abs() < 1e-14);
        // Q(e)z = e z* e kills the third column; real kernel dimension 2·2 = 4.
        assert_eq!(r.kernel_dim, 4);
        assert!(r.neither_one_sided_invertible());
        assert_eq!(r.chained_violations, 0);

        let u = Tripotent::new(TripleElement::identity(2), tol()).unwrap();
        assert!(tripotent_conorm_continuity_case(&u, 1, 0.1, 0, tol()).is_err());
        let small = Tripotent::new(TripleElement::matrix_unit(2, 3, 0, 0), tol()).unwrap();
        assert!(tripotent_conorm_continuity_case(&small, 1, 0.1, 0, tol()).is_err());
    }

    #[test]
    fn report_for_diag_3_0() {
        let r = geometry_report(&TripleElement::diag(&[3.0, 0.0]), tol());
        assert!((r.dist_extreme_formula - 2.0).abs() < 1e-14);
        assert_eq!(r.lambda, LambdaReport::Undefined);
        assert_eq!(r.continuity_class, ContinuityClass::Discontinuous);
        assert!(!r.bp_status);

        let zero = geometry_report(&TripleElement::zeros(&SpaceDescriptor::square(2)), tol());
        assert_eq!(zero.dist_extreme_formula, 1.0);
        assert_eq!(zero.lambda, LambdaReport::Exact(0.5));
        assert!(zero.gamma_q.is_infinite());
    }
}
