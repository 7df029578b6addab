//! Brown–Pedersen quasi-invertibility.
//!
//! `x` is BP quasi-invertible when `B(x,y) = 0` for some `y`; in a matrix factor
//! this is full rank `min(rows, cols)`, and in an ℓ∞-sum it holds blockwise.
//! `m_q(x)` is the distance from `x` to the non-quasi-invertible elements.

use crate::element::{SpaceDescriptor, Tolerance, TripleElement};
use crate::error::{Result, TripleError};
use crate::spectral::{
    generalized_inverse_of, is_positive_in_peirce2, quadratic_conorm_of, range_tripotent_of, SvdCache,
};
use crate::sampling::{all_rank_profiles, sample_element};
use crate::triple::{bergman_operator, Tripotent};

/// Largest admissible operator norm of `B(a, y)` for a quasi-inverse `y`.
pub const BERGMAN_RESIDUAL_TOL: f64 = 1e-8;

pub fn is_bp_quasi_invertible(a: &TripleElement, tol: Tolerance) -> bool {
    SvdCache::new(a, tol).is_full_rank()
}

/// BP quasi-invertibility of each block separately.
pub fn blockwise_status(a: &TripleElement, tol: Tolerance) -> Vec<bool> {
    SvdCache::new(a, tol).blocks().iter().map(|b| b.is_full_rank()).collect()
}

/// `m_q(a)`: the smallest of the `min(rows, cols)` singular values over all blocks
/// when `a` is BP quasi-invertible, otherwise 0.
pub fn m_q(a: &TripleElement, tol: Tolerance) -> f64 {
    m_q_of(&SvdCache::new(a, tol))
}

pub fn m_q_of(cache: &SvdCache) -> f64 {
    if cache.is_full_rank() {
        cache.min_sigma()
    } else {
        0.0
    }
}

/// `α_q(a) = dist(a, E_q⁻¹)`. Every space in the catalog is extremally rich, so
/// this is 0; [`extremal_richness_probe`] checks it constructively.
pub fn alpha_q(_a: &TripleElement) -> f64 {
    0.0
}

/// Evidence that an element is BP quasi-invertible.
#[derive(Debug, Clone)]
pub struct BpCertificate {
    pub element: TripleElement,
    pub quasi_inverse: TripleElement,
    /// Operator norm of `B(element, quasi_inverse)`.
    pub bergman_residual: f64,
    /// Operator norm of `B(quasi_inverse, element)`.
    pub reverse_residual: f64,
    /// `r(element)`, complete.
    pub complete_range: Tripotent,
}

/// Canonical quasi-inverse: the inverse of `a` in the Peirce-2 algebra of `r(a)`,
/// which coincides with the generalized inverse.
pub fn quasi_inverse(a: &TripleElement, tol: Tolerance) -> Result<BpCertificate> {
    let cache = SvdCache::new(a, tol);
    if !cache.is_full_rank() {
        return Err(TripleError::NoQuasiInverse);
    }
    let y = generalized_inverse_of(&cache)?;
    let range = range_tripotent_of(&cache);
    if !range.is_complete() {
        return Err(TripleError::CertificateFailed("range tripotent is not complete".into()));
    }
    if !is_positive_in_peirce2(&range, a, true, tol)? {
        return Err(TripleError::CertificateFailed(
            "element is not positive invertible in the Peirce 2-space of its range tripotent".into(),
        ));
    }
    let bergman_residual = bergman_operator(a, &y)?.operator_norm();
    let reverse_residual = bergman_operator(&y, a)?.operator_norm();
    if bergman_residual > BERGMAN_RESIDUAL_TOL || reverse_residual > BERGMAN_RESIDUAL_TOL {
        return Err(TripleError::CertificateFailed(format!(
            "Bergman residuals {bergman_residual:.3e} / {reverse_residual:.3e}"
        )));
    }
    Ok(BpCertificate {
        element: a.clone(),
        quasi_inverse: y,
        bergman_residual,
        reverse_residual,
        complete_range: range,
    })
}

/// Openness of `E_q⁻¹`: if `‖a − b‖ < γ^q(a)^{1/2}` then `b` is BP quasi-invertible.
///
/// Returns `Ok(true)` when the hypothesis holds (and `b` was confirmed quasi-invertible),
/// `Ok(false)` when it does not apply, and an error if `b` fails despite the hypothesis.
pub fn bp_perturbation_bound(a: &TripleElement, b: &TripleElement, tol: Tolerance) -> Result<bool> {
    let cache = SvdCache::new(a, tol);
    if !cache.is_full_rank() {
        return Err(TripleError::Precondition("a must be BP quasi-invertible".into()));
    }
    let radius = quadratic_conorm_of(&cache).value.sqrt();
    if a.distance(b)? >= radius {
        return Ok(false);
    }
    if is_bp_quasi_invertible(b, tol) {
        Ok(true)
    } else {
        Err(TripleError::CertificateFailed(format!(
            "b within {radius:.6e} of a is not BP quasi-invertible"
        )))
    }
}

/// Both sides of the conorm perturbation estimate for a pair `(a, b)` with
/// `‖a − b‖ < γ^q(a)^{1/2}`.
#[derive(Debug, Clone, Copy)]
pub struct ConormPerturbation {
    pub distance: f64,
    /// `|γ^q(a) − γ^q(b)|`
    pub conorm_gap: f64,
    /// `γ^q(a)^{1/2} ‖a − b‖`
    pub literal_bound: f64,
    /// `‖a − b‖ (‖a‖ + ‖b‖)`
    pub chained_bound: f64,
}

impl ConormPerturbation {
    pub fn literal_holds(&self) -> bool {
        self.conorm_gap <= self.literal_bound + 1e-10
    }

    pub fn chained_holds(&self) -> bool {
        self.conorm_gap <= self.chained_bound + 1e-10
    }
}

/// Evaluates the conorm perturbation estimate. Errors unless `a` is BP
/// quasi-invertible and `‖a − b‖ < γ^q(a)^{1/2}`.
pub fn conorm_perturbation_bound(a: &TripleElement, b: &TripleElement, tol: Tolerance) -> Result<ConormPerturbation> {
    let ca = SvdCache::new(a, tol);
    if !ca.is_full_rank() {
        return Err(TripleError::Precondition("a must be BP quasi-invertible".into()));
    }
    let gamma_a = quadratic_conorm_of(&ca).value;
    let distance = a.distance(b)?;
    if distance >= gamma_a.sqrt() {
        return Err(TripleError::Precondition(format!(
            "‖a − b‖ = {distance:.6e} is not below γ^q(a)^(1/2) = {:.6e}",
            gamma_a.sqrt()
        )));
    }
    let gamma_b = quadratic_conorm_of(&SvdCache::new(b, tol)).value;
    Ok(ConormPerturbation {
        distance,
        conorm_gap: (gamma_a - gamma_b).abs(),
        literal_bound: gamma_a.sqrt() * distance,
        chained_bound: distance * (a.norm() + b.norm()),
    })
}

/// Result of perturbing `a` by `β r(b)`.
#[derive(Debug, Clone)]
pub struct ExtremalPerturbation {
    pub c: TripleElement,
    pub m_q: f64,
    /// `β − ‖b − a‖`
    pub lower_bound: f64,
}

impl ExtremalPerturbation {
    pub fn slack(&self) -> f64 {
        self.m_q - self.lower_bound
    }
}

/// `c = a + β r(b)` for BP quasi-invertible `b` with `‖a − b‖ < β`; checks that `c`
/// is BP quasi-invertible, `m_q(c) ≥ β − ‖b − a‖`, and that `P₂(r(b))(a) + β r(b)`
/// is invertible in `E₂(r(b))`.
pub fn extremal_perturbation(
    a: &TripleElement,
    b: &TripleElement,
    beta: f64,
    tol: Tolerance,
) -> Result<ExtremalPerturbation> {
    let cb = SvdCache::new(b, tol);
    if !cb.is_full_rank() {
        return Err(TripleError::Precondition("b must be BP quasi-invertible".into()));
    }
    let dist = a.distance(b)?;
    if !(beta > 0.0 && dist < beta) {
        return Err(TripleError::Precondition(format!(
            "need 0 < ‖a − b‖ = {dist:.6e} < β = {beta:.6e}"
        )));
    }
    let e = range_tripotent_of(&cb);
    let shifted = e.element() * beta;
    let c = a + &shifted;
    let cc = SvdCache::new(&c, tol);
    if !cc.is_full_rank() {
        return Err(TripleError::CertificateFailed("a + βr(b) is not BP quasi-invertible".into()));
    }
    let m = m_q_of(&cc);
    let lower_bound = beta - dist;
    if m < lower_bound - 1e-9 {
        return Err(TripleError::CertificateFailed(format!(
            "m_q(a + βr(b)) = {m:.6e} below β − ‖b − a‖ = {lower_bound:.6e}"
        )));
    }
    let compressed = &e.project(2, a)? + &shifted;
    if !is_invertible_in_peirce2(&e, &compressed, tol)? {
        return Err(TripleError::CertificateFailed(
            "P₂(r(b))(a) + βr(b) is not invertible in E₂(r(b))".into(),
        ));
    }
    Ok(ExtremalPerturbation {
        c,
        m_q: m,
        lower_bound,
    })
}

/// `x ∈ E₂(e)` with the same rank as `e` in every block.
pub fn is_invertible_in_peirce2(e: &Tripotent, x: &TripleElement, tol: Tolerance) -> Result<bool> {
    if e.peirce2_residual(x)? > tol.scaled(x.norm()) {
        return Ok(false);
    }
    let cache = SvdCache::new(x, tol);
    Ok(cache.ranks() == e.rank_per_block())
}

/// Summary of a constructive density check for `E_q⁻¹`.
#[derive(Debug, Clone)]
pub struct RichnessReport {
    pub trials: usize,
    pub epsilons: Vec<f64>,
    /// Largest `‖a − b‖ / ε` over samples and schedule entries; at most ½.
    pub max_relative_distance: f64,
    /// Largest distance achieved at the last (smallest) ε; an upper bound for `α_q`.
    pub alpha_q_upper_bound: f64,
    pub failures: Vec<String>,
}

impl RichnessReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// The quasi-invertible approximant used by the richness probe: every singular
/// value below `ε/2` is raised to `ε/2`, so `‖a − b‖ ≤ ε/2`.
pub fn quasi_invertible_approximant(a: &TripleElement, epsilon: f64) -> TripleElement {
    let cache = SvdCache::new(a, Tolerance::default());
    let floor = epsilon / 2.0;
    cache.map_all(|s| s.max(floor))
}

/// Samples `trials` elements of the space, cycling through every rank profile so
/// that rank-deficient elements are included, and runs [`richness_check`].
pub fn extremal_richness_probe(space: &SpaceDescriptor, trials: usize, seed: u64, epsilons: &[f64]) -> RichnessReport {
    let profiles = all_rank_profiles(space);
    let samples: Vec<TripleElement> = (0..trials)
        .map(|t| {
            let profile = &profiles[t % profiles.len()];
            let scale = 0.5 + (t % 4) as f64;
            sample_element(space, profile, scale, t as u64, seed).expect("profile enumerated from the space")
        })
        .collect();
    richness_check(&samples, epsilons)
}

/// For each element and each `ε` in the schedule, builds `b ∈ E_q⁻¹` with
/// `‖a − b‖ ≤ ε` and checks it.
pub fn richness_check(samples: &[TripleElement], epsilons: &[f64]) -> RichnessReport {
    let mut failures = Vec::new();
    let mut max_relative: f64 = 0.0;
    let mut final_max: f64 = 0.0;
    for (i, a) in samples.iter().enumerate() {
        for (k, &eps) in epsilons.iter().enumerate() {
            let b = quasi_invertible_approximant(a, eps);
            let dist = a.distance(&b).expect("same space");
            max_relative = max_relative.max(dist / eps);
            if k + 1 == epsilons.len() {
                final_max = final_max.max(dist);
            }
            // The floor ε/2 must clear the rank threshold used for the verdict.
            let largest = a.space().factors().iter().map(|&(m, n)| m.max(n)).max().unwrap_or(1) as f64;
            let verdict_tol = Tolerance(eps / (4.0 * largest * b.norm().max(f64::MIN_POSITIVE)));
            if dist > eps || !is_bp_quasi_invertible(&b, verdict_tol) {
                failures.push(format!("sample {i}, eps {eps:e}: distance {dist:e}"));
            }
        }
    }
    RichnessReport {
        trials: samples.len(),
        epsilons: epsilons.to_vec(),
        max_relative_distance: max_relative,
        alpha_q_upper_bound: final_max,
        failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::quadratic_conorm;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn quasi_invertibility_examples() {
        assert!(is_bp_quasi_invertible(&TripleElement::diag(&[2.0, -1.0]), tol()));
        assert!(!is_bp_quasi_invertible(&TripleElement::diag(&[3.0, 0.0]), tol()));

        let wide = TripleElement::from_real_rows(&[&[1.0, 0.0, 2.0], &[0.0, 1.0, 1.0]]);
        let a = TripleElement::direct_sum(&[wide.clone(), TripleElement::diag(&[1.0, 3.0])]).unwrap();
        assert!(is_bp_quasi_invertible(&a, tol()));
        let broken = TripleElement::from_real_rows(&[&[1.0, 0.0, 2.0], &[0.0, 0.0, 0.0]]);
        let a = TripleElement::direct_sum(&[broken, TripleElement::diag(&[1.0, 3.0])]).unwrap();
        assert!(!is_bp_quasi_invertible(&a, tol()));
        assert_eq!(blockwise_status(&a, tol()), vec![false, true]);
    }

    #[test]
    fn quasi_inverse_of_unitary_is_itself() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let u = TripleElement::from_real_rows(&[&[s, -s], &[s, s]]);
        let cert = quasi_inverse(&u, tol()).unwrap();
        assert!((&cert.quasi_inverse - &u).norm() < 1e-14);
        assert!(cert.bergman_residual < 1e-14);
    }

    #[test]
    fn quasi_inverse_of_invertible_square() {
        let a = TripleElement::from_real_rows(&[&[2.0, 1.0], &[0.0, 3.0]]);
        let cert = quasi_inverse(&a, tol()).unwrap();
        let left = a.block(0) * cert.quasi_inverse.block(0).adjoint();
        assert!((left - crate::CMatrix::identity(2, 2)).norm() < 1e-12);
        assert!(cert.reverse_residual < 1e-12);
        assert!(cert.complete_range.is_complete());
    }

    #[test]
    fn quasi_inverse_of_wide_block() {
        let a = TripleElement::from_real_rows(&[&[1.0, 2.0, 0.0], &[0.0, 1.0, -1.0]]);
        let cert = quasi_inverse(&a, tol()).unwrap();
        let (ab, yb) = (a.block(0), cert.quasi_inverse.block(0));
        let rows = (ab * yb.adjoint() - crate::CMatrix::identity(2, 2)).norm();
        let cols = (yb.adjoint() * ab - crate::CMatrix::identity(3, 3)).norm();
        assert!(rows < 1e-12 || cols < 1e-12);
        assert!(cert.bergman_residual <= BERGMAN_RESIDUAL_TOL);
    }

    #[test]
    fn quasi_inverse_rejects_rank_deficient() {
        assert!(matches!(
            quasi_inverse(&TripleElement::diag(&[1.0, 0.0]), tol()),
            Err(TripleError::NoQuasiInverse)
        ));
    }

    #[test]
    fn m_q_is_distance_to_rank_deficient_set() {
        let a = TripleElement::diag(&[2.0, 0.5]);
        assert!((m_q(&a, tol()) - 0.5).abs() < 1e-15);
        assert!((m_q(&a, tol()).powi(2) - quadratic_conorm(&a, tol()).value).abs() < 1e-15);
        assert_eq!(m_q(&TripleElement::diag(&[2.0, 0.0]), tol()), 0.0);
        assert_eq!(alpha_q(&a), 0.0);
    }

    #[test]
    fn lemma_radius_examples() {
        let id = TripleElement::identity(2);
        assert!(bp_perturbation_bound(&id, &TripleElement::diag(&[1.0, 0.5]), tol()).unwrap());

        // Boundary: ‖a − b‖ = γ^q(a)^{1/2} = 1 and b is singular.
        let a = TripleElement::diag(&[2.0, 1.0]);
        let b = TripleElement::diag(&[2.0, 0.0]);
        assert!(!bp_perturbation_bound(&a, &b, tol()).unwrap());
        assert!(!is_bp_quasi_invertible(&b, tol()));

        assert!(matches!(
            bp_perturbation_bound(&b, &a, tol()),
            Err(TripleError::Precondition(_))
        ));
    }

    #[test]
    fn conorm_perturbation_examples() {
        let a = TripleElement::diag(&[2.0, 1.0]);
        let same = conorm_perturbation_bound(&a, &a, tol()).unwrap();
        assert_eq!(same.conorm_gap, 0.0);

        // |1 − 0.81| = 0.19: the chained bound 0.1·(2 + 2) holds, the literal 1·0.1 does not.
        let b = TripleElement::diag(&[2.0, 0.9]);
        let p = conorm_perturbation_bound(&a, &b, tol()).unwrap();
        assert!((p.conorm_gap - 0.19).abs() < 1e-12);
        assert!(p.chained_holds());
        assert!(!p.literal_holds());

        let far = TripleElement::diag(&[2.0, -0.5]);
        assert!(conorm_perturbation_bound(&a, &far, tol()).is_err());
    }

    #[test]
    fn extremal_perturbation_examples() {
        let id = TripleElement::identity(2);
        let p = extremal_perturbation(&id, &id, 1.0, tol()).unwrap();
        assert!((&p.c - &(&id * 2.0)).norm() < 1e-14);
        assert!((p.m_q - 2.0).abs() < 1e-14 && p.lower_bound == 1.0);

        let a = TripleElement::diag(&[1.0, 0.0]);
        let p = extremal_perturbation(&a, &id, 1.5, tol()).unwrap();
        assert!((&p.c - &TripleElement::diag(&[2.5, 1.5])).norm() < 1e-14);
        assert!((p.m_q - 1.5).abs() < 1e-14 && (p.lower_bound - 0.5).abs() < 1e-14);

        assert!(extremal_perturbation(&a, &id, 0.5, tol()).is_err());
        assert!(extremal_perturbation(&id, &a, 5.0, tol()).is_err());
    }

    #[test]
    fn richness_examples() {
        let zero = TripleElement::zeros(&SpaceDescriptor::square(2));
        let b = quasi_invertible_approximant(&zero, 0.1);
        assert!((&b - &(&TripleElement::identity(2) * 0.05)).norm() < 1e-15);

        let a = TripleElement::diag(&[3.0, 0.0]);
        let b = quasi_invertible_approximant(&a, 1e-4);
        assert!((&b - &TripleElement::diag(&[3.0, 5e-5])).norm() < 1e-15);

        let eps: Vec<f64> = (1..=12).map(|k| 10f64.powi(-k)).collect();
        let report = richness_check(&[zero, a, TripleElement::identity(2)], &eps);
        assert!(report.passed(), "{:?}", report.failures);
        assert!(report.alpha_q_upper_bound <= 1e-12);
        assert!(report.max_relative_distance <= 0.5 + 1e-12);

        for space in ["2x2", "3x3", "2x3", "2x2,3x2"] {
            let report = extremal_richness_probe(&space.parse().unwrap(), 60, 17, &eps);
            assert!(report.passed(), "{space}: {:?}", report.failures);
            assert!(report.alpha_q_upper_bound <= 1e-12);
        }
    }
}
