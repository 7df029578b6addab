//! Deterministic random elements.
//!
//! Randomness is counter-based: a ChaCha8 stream keyed by the run seed, with the
//! trial index selecting the stream and the draw index selecting a disjoint block
//! of the keystream. Results therefore do not depend on execution order.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::element::{CMatrix, SpaceDescriptor, TripleElement};
use crate::error::{Result, TripleError};
use crate::linalg;

/// Words of keystream reserved for each draw index.
const DRAW_STRIDE: u128 = 1 << 40;

/// RNG for `(seed, trial, draw)`.
pub fn keyed_rng(seed: u64, trial: u64, draw: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng.set_word_pos(draw as u128 * DRAW_STRIDE);
    rng
}

/// Standard complex Gaussian entry, `E|z|² = 1`.
pub fn complex_gaussian<R: rand::Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix<R: rand::Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

pub fn gaussian_element<R: rand::Rng + ?Sized>(space: &SpaceDescriptor, rng: &mut R) -> TripleElement {
    let blocks = space.factors().iter().map(|&(m, n)| gaussian_matrix(m, n, rng)).collect();
    TripleElement::new(space.clone(), blocks).expect("shapes follow the descriptor")
}

fn check_profile(space: &SpaceDescriptor, profile: &[usize]) -> Result<()> {
    let ok = profile.len() == space.num_blocks()
        && profile.iter().zip(space.full_ranks()).all(|(&r, full)| r <= full);
    if ok {
        Ok(())
    } else {
        Err(TripleError::InvalidRankProfile {
            space: space.clone(),
            profile: profile.to_vec(),
        })
    }
}

/// Complex Gaussian element truncated to the given rank per block and rescaled so
/// that `‖a‖ = scale` (the zero element when every rank is 0).
pub fn sample_element(
    space: &SpaceDescriptor,
    rank_profile: &[usize],
    scale: f64,
    trial: u64,
    seed: u64,
) -> Result<TripleElement> {
    check_profile(space, rank_profile)?;
    let mut rng = keyed_rng(seed, trial, 0);
    let raw = gaussian_element(space, &mut rng);
    let truncated = raw.map_blocks(|i, b| {
        let s = linalg::svd(b);
        let r = rank_profile[i];
        let mut out = CMatrix::zeros(b.nrows(), b.ncols());
        for k in 0..r {
            out += s.u.column(k) * s.v.column(k).adjoint() * Complex64::new(s.sigma[k], 0.0);
        }
        out
    });
    let norm = truncated.norm();
    if norm == 0.0 {
        return Ok(truncated);
    }
    Ok(&truncated * (scale / norm))
}

/// Element with prescribed singular values per block and Haar-random singular
/// vectors. Each list may be shorter than `min(rows, cols)`; missing values are 0.
pub fn sample_with_singular_values(
    space: &SpaceDescriptor,
    singular_values: &[Vec<f64>],
    trial: u64,
    seed: u64,
    draw: u64,
) -> Result<TripleElement> {
    let lengths: Vec<usize> = singular_values.iter().map(Vec::len).collect();
    check_profile(space, &lengths)?;
    let mut rng = keyed_rng(seed, trial, draw);
    let blocks = space
        .factors()
        .iter()
        .zip(singular_values)
        .map(|(&(m, n), sv)| {
            let s = linalg::svd(&gaussian_matrix(m, n, &mut rng));
            let mut out = CMatrix::zeros(m, n);
            for (k, &sigma) in sv.iter().enumerate() {
                out += s.u.column(k) * s.v.column(k).adjoint() * Complex64::new(sigma, 0.0);
            }
            out
        })
        .collect();
    TripleElement::new(space.clone(), blocks)
}

/// Haar-random maximal partial isometry (a complete tripotent) on the space.
pub fn random_complete_tripotent<R: rand::Rng + ?Sized>(space: &SpaceDescriptor, rng: &mut R) -> TripleElement {
    let blocks = space
        .factors()
        .iter()
        .map(|&(m, n)| {
            let s = linalg::svd(&gaussian_matrix(m, n, rng));
            &s.u * s.v.adjoint()
        })
        .collect();
    TripleElement::new(space.clone(), blocks).expect("shapes follow the descriptor")
}

/// Every rank profile of the space, in lexicographic order.
pub fn all_rank_profiles(space: &SpaceDescriptor) -> Vec<Vec<usize>> {
    let mut profiles = vec![Vec::new()];
    for full in space.full_ranks() {
        profiles = profiles
            .into_iter()
            .flat_map(|p| {
                (0..=full).map(move |r| {
                    let mut q = p.clone();
                    q.push(r);
                    q
                })
            })
            .collect();
    }
    profiles
}
